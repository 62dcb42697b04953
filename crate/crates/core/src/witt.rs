//! p-typical Witt vectors: ghost components, the universal sum and product
//! polynomials, Frobenius, Verschiebung, Teichmüller lifts, Dwork lifting, and
//! the identification of `W_N(F_q)` with a Galois ring.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::unram::{is_prime, UnramElement, UnramRing};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::{Arc, Mutex, OnceLock};

/// Longest Witt length the polynomial layout supports.
pub const MAX_LEN: usize = 5;
/// Variables of the universal polynomials: `x_i` is `i`, `y_i` is `MAX_LEN + i`.
pub const NVARS: usize = 2 * MAX_LEN;
/// Refuse to expand universal polynomials whose worst-case term count exceeds this.
pub const TERM_LIMIT: usize = 150_000;

/// Coefficient rings Witt vectors may live over.
pub trait CoeffRing {
    type E: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn from_bigint(&self, c: &BigInt) -> Self::E;
    /// `Some(p)` when the ring has characteristic `p`.
    fn char_p(&self) -> Option<u64>;
    fn is_zero(&self, a: &Self::E) -> bool {
        *a == self.zero()
    }
    fn pow(&self, a: &Self::E, mut e: u64) -> Self::E {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        r
    }
}

/// The integers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZZ;

impl CoeffRing for ZZ {
    type E = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_bigint(&self, c: &BigInt) -> BigInt {
        c.clone()
    }
    fn char_p(&self) -> Option<u64> {
        None
    }
}

impl CoeffRing for UnramRing {
    type E = UnramElement;
    fn zero(&self) -> UnramElement {
        self.zero_elem()
    }
    fn one(&self) -> UnramElement {
        self.one_elem()
    }
    fn add(&self, a: &UnramElement, b: &UnramElement) -> UnramElement {
        UnramRing::add(self, a, b)
    }
    fn sub(&self, a: &UnramElement, b: &UnramElement) -> UnramElement {
        UnramRing::sub(self, a, b)
    }
    fn mul(&self, a: &UnramElement, b: &UnramElement) -> UnramElement {
        UnramRing::mul(self, a, b)
    }
    fn from_bigint(&self, c: &BigInt) -> UnramElement {
        let m = BigInt::from(self.modulus());
        let r = ((c % &m) + &m) % &m;
        self.from_int(r.to_i64().expect("reduced residue fits"))
    }
    fn char_p(&self) -> Option<u64> {
        (self.precision() == 1).then(|| self.p())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector<E> {
    pub p: u64,
    pub coords: Vec<E>,
}

impl<E: Clone> WittVector<E> {
    pub fn new(p: u64, coords: Vec<E>) -> Self {
        WittVector { p, coords }
    }
    pub fn len(&self) -> usize {
        self.coords.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WittOp {
    Sum,
    Product,
}

/// Output length convention of the Verschiebung.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShiftMode {
    #[default]
    Truncate,
    Extend,
}

fn x_var(i: usize) -> usize {
    i
}
fn y_var(i: usize) -> usize {
    MAX_LEN + i
}

fn p_pow_big(p: u64, k: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), k)
}

/// The `m`-th ghost polynomial in the variables `vars`.
pub fn ghost_poly(p: u64, m: usize, vars: impl Fn(usize) -> usize, nvars: usize) -> Poly {
    let mut g = Poly::zero(nvars);
    for i in 0..=m {
        let e = (p as u32).pow((m - i) as u32);
        g = g.add(&Poly::var(nvars, vars(i)).pow(e).scale(&p_pow_big(p, i)));
    }
    g
}

/// Rings that support Dwork lifting: exact division by powers of p and a Frobenius lift ψ.
pub trait DworkRing {
    type E: Clone;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn scale(&self, a: &Self::E, c: &BigInt) -> Self::E;
    fn pow(&self, a: &Self::E, e: u32) -> Self::E;
    fn div_exact(&self, a: &Self::E, c: &BigInt) -> Option<Self::E>;
    fn psi(&self, a: &Self::E) -> Self::E;
}

/// ℤ with ψ = id.
impl DworkRing for ZZ {
    type E = BigInt;
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn scale(&self, a: &BigInt, c: &BigInt) -> BigInt {
        a * c
    }
    fn pow(&self, a: &BigInt, e: u32) -> BigInt {
        num_traits::pow(a.clone(), e as usize)
    }
    fn div_exact(&self, a: &BigInt, c: &BigInt) -> Option<BigInt> {
        let (q, r) = num_integer::Integer::div_rem(a, c);
        r.is_zero().then_some(q)
    }
    fn psi(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

/// Integer polynomial rings with ψ raising every variable to the p-th power.
#[derive(Clone, Copy, Debug)]
pub struct PolyFrobenius {
    pub p: u64,
}

impl DworkRing for PolyFrobenius {
    type E = Poly;
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b)
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a.sub(b)
    }
    fn scale(&self, a: &Poly, c: &BigInt) -> Poly {
        a.scale(c)
    }
    fn pow(&self, a: &Poly, e: u32) -> Poly {
        a.pow(e)
    }
    fn div_exact(&self, a: &Poly, c: &BigInt) -> Option<Poly> {
        a.div_exact(c)
    }
    fn psi(&self, a: &Poly) -> Poly {
        a.frobenius_lift(self.p as u32)
    }
}

/// Check Dwork's congruences `g_{m+1} ≡ ψ(g_m) (mod p^{m+1})`.
pub fn dwork_congruences<D: DworkRing>(ring: &D, p: u64, g: &[D::E]) -> Result<()> {
    for m in 0..g.len().saturating_sub(1) {
        let diff = ring.sub(&g[m + 1], &ring.psi(&g[m]));
        if ring.div_exact(&diff, &p_pow_big(p, m + 1)).is_none() {
            return Err(Error::Congruence { index: m + 1 });
        }
    }
    Ok(())
}

/// The unique `q` with `w_m(q) = g_m`, after checking Dwork's congruences.
pub fn dwork_lift<D: DworkRing>(ring: &D, p: u64, g: &[D::E]) -> Result<Vec<D::E>> {
    dwork_congruences(ring, p, g)?;
    let mut q: Vec<D::E> = Vec::with_capacity(g.len());
    // powers[i] = q_i^{p^{m-1-i}} going into step m
    let mut powers: Vec<D::E> = Vec::with_capacity(g.len());
    for (m, gm) in g.iter().enumerate() {
        let mut num = gm.clone();
        for (i, pw) in powers.iter_mut().enumerate() {
            *pw = ring.pow(pw, p as u32);
            num = ring.sub(&num, &ring.scale(pw, &p_pow_big(p, i)));
        }
        let qm = ring.div_exact(&num, &p_pow_big(p, m)).ok_or(Error::Congruence { index: m })?;
        powers.push(qm.clone());
        q.push(qm);
    }
    Ok(q)
}

/// Dwork lift over ℤ (ψ = id), returning a Witt vector.
pub fn dwork_lift_int(p: u64, g: &[BigInt]) -> Result<WittVector<BigInt>> {
    Ok(WittVector::new(p, dwork_lift(&ZZ, p, g)?))
}

fn ghost_targets(p: u64, n: usize, op: WittOp) -> Vec<Poly> {
    (0..n)
        .map(|m| {
            let gx = ghost_poly(p, m, x_var, NVARS);
            let gy = ghost_poly(p, m, y_var, NVARS);
            match op {
                WittOp::Sum => gx.add(&gy),
                WittOp::Product => gx.mul(&gy),
            }
        })
        .collect()
}

/// Worst-case number of monomials of weighted degree `p^m` in `x_0..x_m, y_0..y_m`.
pub fn term_bound(p: u64, m: usize) -> usize {
    let target = (p as usize).pow(m as u32);
    let mut ways = vec![0usize; target + 1];
    ways[0] = 1;
    for i in 0..=m {
        let w = (p as usize).pow(i as u32);
        for _ in 0..2 {
            for s in w..=target {
                ways[s] = ways[s].saturating_add(ways[s - w]);
            }
        }
    }
    ways[target]
}

/// Dwork integrality certificate for the first `n` universal polynomials, without expanding them.
pub fn dwork_certificate(p: u64, n: usize, op: WittOp) -> Result<()> {
    check_args(p, n)?;
    dwork_congruences(&PolyFrobenius { p }, p, &ghost_targets(p, n, op))
}

fn check_args(p: u64, n: usize) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 || n > MAX_LEN {
        return Err(Error::InvalidArgument(format!("Witt length must be in 1..={MAX_LEN}")));
    }
    Ok(())
}

type PolyCache = Mutex<HashMap<(u64, WittOp), Arc<Vec<Poly>>>>;

fn cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Can the first `n` universal polynomials be expanded under [`TERM_LIMIT`]?
pub fn expandable(p: u64, n: usize) -> bool {
    term_bound(p, n - 1) <= TERM_LIMIT
}

/// Cached universal polynomials; the returned list may be longer than `n`.
pub fn universal_polys(p: u64, n: usize, op: WittOp) -> Result<Arc<Vec<Poly>>> {
    check_args(p, n)?;
    if let Some(v) = cache().lock().unwrap().get(&(p, op)) {
        if v.len() >= n {
            return Ok(v.clone());
        }
    }
    let bound = term_bound(p, n - 1);
    if bound > TERM_LIMIT {
        return Err(Error::TooLarge {
            what: format!("universal polynomial {} of length {n} at p={p}", if op == WittOp::Sum { "S" } else { "P" }),
            size: bound,
            limit: TERM_LIMIT,
        });
    }
    let polys = Arc::new(dwork_lift(&PolyFrobenius { p }, p, &ghost_targets(p, n, op))?);
    let mut guard = cache().lock().unwrap();
    let entry = guard.entry((p, op)).or_insert_with(|| polys.clone());
    if entry.len() < polys.len() {
        *entry = polys.clone();
    }
    Ok(entry.clone())
}

/// `S_0..S_{n-1}` with `w_m(S) = w_m(x) + w_m(y)`.
pub fn universal_sum_polys(p: u64, n: usize) -> Result<Vec<Poly>> {
    Ok(universal_polys(p, n, WittOp::Sum)?[..n].to_vec())
}

/// `P_0..P_{n-1}` with `w_m(P) = w_m(x)·w_m(y)`.
pub fn universal_prod_polys(p: u64, n: usize) -> Result<Vec<Poly>> {
    Ok(universal_polys(p, n, WittOp::Product)?[..n].to_vec())
}

/// Human-readable names `x0..x4, y0..y4` for the universal-polynomial variables.
pub fn var_names() -> Vec<String> {
    (0..MAX_LEN).map(|i| format!("x{i}")).chain((0..MAX_LEN).map(|i| format!("y{i}"))).collect()
}

fn eval_poly<R: CoeffRing>(r: &R, poly: &Poly, vals: &[R::E]) -> R::E {
    let mut tables: HashMap<(usize, u32), R::E> = HashMap::new();
    let modulus = r.char_p().map(BigInt::from);
    let mut sum = r.zero();
    for (e, c) in poly.terms() {
        let coeff = match &modulus {
            Some(m) => {
                let c = c % m;
                if c.is_zero() {
                    continue;
                }
                r.from_bigint(&c)
            }
            None => r.from_bigint(c),
        };
        let mut t = coeff;
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if r.is_zero(&vals[i]) {
                t = r.zero();
                break;
            }
            let pw = tables.entry((i, k)).or_insert_with(|| r.pow(&vals[i], k as u64)).clone();
            t = r.mul(&t, &pw);
        }
        if !r.is_zero(&t) {
            sum = r.add(&sum, &t);
        }
    }
    sum
}

fn check_pair<E: Clone>(a: &WittVector<E>, b: &WittVector<E>) -> Result<()> {
    if a.p != b.p || a.len() != b.len() {
        return Err(Error::Mismatch(format!(
            "Witt vectors of (p, n) = ({}, {}) and ({}, {})",
            a.p,
            a.len(),
            b.p,
            b.len()
        )));
    }
    Ok(())
}

fn apply_op<R: CoeffRing>(r: &R, a: &WittVector<R::E>, b: &WittVector<R::E>, op: WittOp) -> Result<WittVector<R::E>> {
    check_pair(a, b)?;
    let n = a.len();
    if n == 0 {
        return Ok(a.clone());
    }
    let polys = universal_polys(a.p, n, op)?;
    let mut vals = vec![r.zero(); NVARS];
    for i in 0..n {
        vals[x_var(i)] = a.coords[i].clone();
        vals[y_var(i)] = b.coords[i].clone();
    }
    let coords = polys[..n].iter().map(|s| eval_poly(r, s, &vals)).collect();
    Ok(WittVector::new(a.p, coords))
}

pub fn witt_add<R: CoeffRing>(r: &R, a: &WittVector<R::E>, b: &WittVector<R::E>) -> Result<WittVector<R::E>> {
    apply_op(r, a, b, WittOp::Sum)
}

pub fn witt_mul<R: CoeffRing>(r: &R, a: &WittVector<R::E>, b: &WittVector<R::E>) -> Result<WittVector<R::E>> {
    apply_op(r, a, b, WittOp::Product)
}

/// Integer Witt arithmetic through the ghost map; works at every length.
pub fn witt_op_ghost(a: &WittVector<BigInt>, b: &WittVector<BigInt>, op: WittOp) -> Result<WittVector<BigInt>> {
    check_pair(a, b)?;
    let (ga, gb) = (ghost(&ZZ, a), ghost(&ZZ, b));
    let g: Vec<BigInt> = ga
        .iter()
        .zip(&gb)
        .map(|(x, y)| match op {
            WittOp::Sum => x + y,
            WittOp::Product => x * y,
        })
        .collect();
    dwork_lift_int(a.p, &g)
}

/// Ghost components `w_m = Σ p^i a_i^{p^{m-i}}`.
pub fn ghost<R: CoeffRing>(r: &R, a: &WittVector<R::E>) -> Vec<R::E> {
    (0..a.len())
        .map(|m| {
            let mut s = r.zero();
            for i in 0..=m {
                let t = r.pow(&a.coords[i], a.p.pow((m - i) as u32));
                let c = r.from_bigint(&p_pow_big(a.p, i));
                s = r.add(&s, &r.mul(&c, &t));
            }
            s
        })
        .collect()
}

/// Frobenius in characteristic p: coordinatewise p-th powers.
pub fn frobenius<R: CoeffRing>(r: &R, a: &WittVector<R::E>) -> Result<WittVector<R::E>> {
    if r.char_p() != Some(a.p) {
        return Err(Error::InvalidArgument("coordinatewise Frobenius needs a ring of characteristic p".into()));
    }
    Ok(WittVector::new(a.p, a.coords.iter().map(|x| r.pow(x, a.p)).collect()))
}

/// Frobenius over ℤ through the ghost map; the result is one coordinate shorter.
pub fn frobenius_int(a: &WittVector<BigInt>) -> Result<WittVector<BigInt>> {
    let g = ghost(&ZZ, a);
    dwork_lift_int(a.p, &g[1..])
}

/// Verschiebung `(a_0, a_1, …) ↦ (0, a_0, a_1, …)`.
pub fn verschiebung<R: CoeffRing>(r: &R, a: &WittVector<R::E>, mode: ShiftMode) -> WittVector<R::E> {
    let mut coords = Vec::with_capacity(a.len() + 1);
    coords.push(r.zero());
    coords.extend(a.coords.iter().cloned());
    if mode == ShiftMode::Truncate {
        coords.truncate(a.len());
    }
    WittVector::new(a.p, coords)
}

pub fn teichmuller<R: CoeffRing>(r: &R, p: u64, x: &R::E, n: usize) -> WittVector<R::E> {
    let mut coords = vec![r.zero(); n];
    if n > 0 {
        coords[0] = x.clone();
    }
    WittVector::new(p, coords)
}

/// Multiplication by an integer, by repeated doubling.
pub fn witt_scalar<R: CoeffRing>(r: &R, a: &WittVector<R::E>, mut k: u64) -> Result<WittVector<R::E>> {
    let mut acc = WittVector::new(a.p, vec![r.zero(); a.len()]);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = witt_add(r, &acc, &base)?;
        }
        k >>= 1;
        if k > 0 {
            base = witt_add(r, &base, &base)?;
        }
    }
    Ok(acc)
}

fn residue_to(ring: &UnramRing, a: &UnramElement) -> UnramElement {
    ring.from_coeffs(&a.0.iter().map(|&c| c as i64).collect::<Vec<_>>())
}

/// `Σ p^i τ(a_i^{p^{-i}})` for a Witt vector over the residue field of `ring`, of length `N`.
pub fn witt_to_unram(ring: &UnramRing, a: &WittVector<UnramElement>) -> Result<UnramElement> {
    if a.p != ring.p() || a.len() != ring.precision() as usize {
        return Err(Error::Mismatch("Witt length must equal the ring precision".into()));
    }
    let k = ring.residue_field();
    let mut x = ring.zero_elem();
    for (i, ai) in a.coords.iter().enumerate() {
        let root = k.sigma_pow(ai, -(i as i64));
        let t = ring.teichmuller(&residue_to(ring, &root));
        x = ring.add(&x, &ring.mul(&ring.p_pow(i as u32), &t));
    }
    Ok(x)
}

/// Inverse of [`witt_to_unram`]: peel off Teichmüller digits.
pub fn unram_to_witt(ring: &UnramRing, x: &UnramElement) -> WittVector<UnramElement> {
    let k = ring.residue_field();
    let mut rest = x.clone();
    let mut coords = Vec::with_capacity(ring.precision() as usize);
    for i in 0..ring.precision() {
        let digit = ring.reduce_p_pow(&rest, 1);
        let t = ring.teichmuller(&digit);
        rest = ring.div_p_pow(&ring.sub(&rest, &t), 1);
        let b = k.from_coeffs(&digit.0.iter().map(|&c| c as i64).collect::<Vec<_>>());
        coords.push(k.sigma_pow(&b, i as i64));
    }
    WittVector::new(ring.p(), coords)
}

pub fn witt_to_json(ring: &UnramRing, a: &WittVector<UnramElement>) -> serde_json::Value {
    serde_json::json!({
        "p": ring.p(),
        "d": ring.degree(),
        "N": a.len(),
        "coords": a.coords.iter().map(|c| c.0.clone()).collect::<Vec<_>>(),
    })
}
