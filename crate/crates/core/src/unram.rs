//! Galois rings `W_N(F_q) = (Z/p^N)[ξ]/(f)` with their Frobenius automorphism.
//!
//! The modulus `f` is the Teichmüller lift of the first primitive polynomial
//! of degree `d` over `F_p` (coefficients enumerated as a base-p counter).
//! Its roots are roots of unity, so `σ(ξ) = ξ^p` holds exactly.

use crate::error::{Error, Result};
use crate::linalg::Pir;
use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

/// Coefficients in the power basis; inline up to degree 4.
pub type Coeffs = SmallVec<[u64; 4]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnramElement(pub Coeffs);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnramRing {
    p: u64,
    d: usize,
    n: u32,
    modulus: u64,
    /// `f_0..f_{d-1}` of the monic modulus.
    f: Vec<u64>,
    /// `ξ^{d+k}` reduced, for `k = 0..d-1`.
    fold: Vec<Vec<u64>>,
    /// `sigma[k]` is the matrix of `σ^k` in the power basis, column-major by source power.
    sigma: Vec<Vec<Vec<u64>>>,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            out.push(i);
            while n.is_multiple_of(i) {
                n /= i;
            }
        }
        i += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiply two residues modulo the monic polynomial with low coefficients `f`, over `Z/m`.
fn polymulmod(a: &[u64], b: &[u64], f: &[u64], m: u64) -> Vec<u64> {
    let d = f.len();
    let mut c = vec![0u128; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + (x as u128) * (y as u128)) % (m as u128);
        }
    }
    for k in (d..2 * d).rev() {
        let top = c[k] % m as u128;
        if top == 0 {
            continue;
        }
        c[k] = 0;
        for (i, &fi) in f.iter().enumerate() {
            let idx = k - d + i;
            c[idx] = (c[idx] + (m as u128 - top) * fi as u128) % m as u128;
        }
    }
    c.truncate(d);
    c.into_iter().map(|x| (x % m as u128) as u64).collect()
}

fn polypowmod(a: &[u64], mut e: u128, f: &[u64], m: u64) -> Vec<u64> {
    let d = f.len();
    let mut result = vec![0u64; d];
    result[0] = 1 % m;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = polymulmod(&result, &base, f, m);
        }
        base = polymulmod(&base, &base, f, m);
        e >>= 1;
    }
    result
}

fn x_poly(d: usize) -> Vec<u64> {
    let mut x = vec![0u64; d];
    if d == 1 {
        x[0] = 0;
    } else {
        x[1] = 1;
    }
    x
}

/// Is `x` a generator of `(F_p[x]/(x^d + g))^×`? That forces the quotient to be a field.
fn is_primitive(g: &[u64], p: u64) -> bool {
    let d = g.len();
    if g[0] == 0 {
        return false;
    }
    let x = if d == 1 { vec![(p - g[0]) % p] } else { x_poly(d) };
    let q1 = (p as u128).pow(d as u32) - 1;
    let mut one = vec![0u64; d];
    one[0] = 1;
    if polypowmod(&x, q1, g, p) != one {
        return false;
    }
    prime_factors(q1 as u64).into_iter().all(|l| polypowmod(&x, q1 / l as u128, g, p) != one)
}

fn first_primitive(p: u64, d: usize) -> Vec<u64> {
    let total = p.pow(d as u32);
    for k in 0..total {
        let mut g = Vec::with_capacity(d);
        let mut r = k;
        for _ in 0..d {
            g.push(r % p);
            r /= p;
        }
        if is_primitive(&g, p) {
            return g;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

impl UnramRing {
    pub fn new(p: u64, d: usize, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d == 0 || n == 0 {
            return Err(Error::InvalidArgument("degree and precision must be at least 1".into()));
        }
        let modulus = (p as u128).checked_pow(n).filter(|&m| m < (1u128 << 31)).ok_or_else(|| {
            Error::InvalidArgument(format!("p^N = {p}^{n} does not fit the word-size backend"))
        })? as u64;
        if (p as u128).pow(d as u32) > 1 << 40 {
            return Err(Error::InvalidArgument(format!("F_{{{p}^{d}}} is too large")));
        }
        let g = first_primitive(p, d);
        let f = if d == 1 {
            // root r of x + g_0, lifted to the Teichmüller root of unity
            let r = (p - g[0]) % p;
            let t = polypowmod(&[r], (p as u128).pow(n - 1), &[0], modulus);
            vec![(modulus - t[0]) % modulus]
        } else {
            teichmuller_modulus(&g, p, d, n, modulus)
        };
        let mut ring = UnramRing { p, d, n, modulus, f, fold: vec![], sigma: vec![] };
        ring.fold = (0..d)
            .map(|k| {
                let mut e = vec![0u64; d];
                let xi = ring.xi();
                let mut acc = ring.pow(&ring.one_elem(), 0).0;
                for _ in 0..d + k {
                    acc = ring.mul_raw(&acc, &xi.0);
                }
                e.copy_from_slice(&acc);
                e
            })
            .collect();
        let xi_p = ring.pow(&ring.xi(), p);
        let mut s1 = Vec::with_capacity(d);
        let mut acc = ring.one_elem();
        for _ in 0..d {
            s1.push(acc.0.to_vec());
            acc = ring.mul(&acc, &xi_p);
        }
        let mut sigma = vec![identity_cols(d, modulus)];
        for k in 1..d {
            let prev: &Vec<Vec<u64>> = &sigma[k - 1];
            let next = compose_cols(&s1, prev, modulus);
            sigma.push(next);
        }
        debug_assert_eq!(compose_cols(&s1, &sigma[d - 1], modulus), identity_cols(d, modulus));
        ring.sigma = sigma;
        Ok(ring)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.d
    }
    pub fn precision(&self) -> u32 {
        self.n
    }
    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    /// Cardinality of the residue field.
    pub fn q(&self) -> u64 {
        self.p.pow(self.d as u32)
    }

    /// Monic modulus, coefficients from the constant term upwards.
    pub fn modulus_poly(&self) -> Vec<u64> {
        let mut v = self.f.clone();
        v.push(1);
        v
    }

    pub fn with_precision(&self, n: u32) -> Result<Self> {
        UnramRing::new(self.p, self.d, n)
    }

    pub fn residue_field(&self) -> Self {
        UnramRing::new(self.p, self.d, 1).expect("residue field of a valid ring")
    }

    pub fn one_elem(&self) -> UnramElement {
        let mut v: Coeffs = smallvec![0u64; self.d];
        v[0] = 1 % self.modulus;
        UnramElement(v)
    }

    pub fn zero_elem(&self) -> UnramElement {
        UnramElement(smallvec![0u64; self.d])
    }

    pub fn xi(&self) -> UnramElement {
        if self.d == 1 {
            UnramElement(smallvec![(self.modulus - self.f[0]) % self.modulus])
        } else {
            UnramElement(x_poly(self.d).into())
        }
    }

    pub fn from_int(&self, x: i64) -> UnramElement {
        let mut v: Coeffs = smallvec![0u64; self.d];
        v[0] = x.rem_euclid(self.modulus as i64) as u64;
        UnramElement(v)
    }

    pub fn from_coeffs(&self, c: &[i64]) -> UnramElement {
        assert_eq!(c.len(), self.d);
        UnramElement(c.iter().map(|&x| x.rem_euclid(self.modulus as i64) as u64).collect())
    }

    pub fn p_pow(&self, e: u32) -> UnramElement {
        if e >= self.n {
            self.zero_elem()
        } else {
            self.from_int(self.p.pow(e) as i64)
        }
    }

    fn mul_raw(&self, a: &[u64], b: &[u64]) -> Coeffs {
        let d = self.d;
        let m = self.modulus as u128;
        if d == 1 {
            return smallvec![(a[0] as u128 * b[0] as u128 % m) as u64];
        }
        let mut c: SmallVec<[u128; 8]> = smallvec![0u128; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                c[i + j] += x as u128 * y as u128;
            }
        }
        let mut out: SmallVec<[u128; 4]> = c[..d].iter().map(|x| x % m).collect();
        if self.fold.is_empty() {
            // during construction: fold by the modulus directly
            let mut full: Vec<u64> = c.iter().map(|x| (x % m) as u64).collect();
            full.resize(2 * d, 0);
            let lo = {
                let f = &self.f;
                let mut cc: Vec<u128> = full.iter().map(|&x| x as u128).collect();
                for k in (d..2 * d).rev() {
                    let top = cc[k] % m;
                    cc[k] = 0;
                    for (i, &fi) in f.iter().enumerate() {
                        cc[k - d + i] = (cc[k - d + i] + (m - top) * fi as u128) % m;
                    }
                }
                cc
            };
            return lo[..d].iter().map(|&x| (x % m) as u64).collect();
        }
        for k in 0..d - 1 {
            let top = c[d + k] % m;
            if top == 0 {
                continue;
            }
            for (i, &r) in self.fold[k].iter().enumerate() {
                out[i] = (out[i] + top * r as u128) % m;
            }
        }
        out.into_iter().map(|x| x as u64).collect()
    }

    pub fn add(&self, a: &UnramElement, b: &UnramElement) -> UnramElement {
        UnramElement(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % self.modulus).collect())
    }

    pub fn sub(&self, a: &UnramElement, b: &UnramElement) -> UnramElement {
        UnramElement(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + self.modulus - y) % self.modulus).collect())
    }

    pub fn neg(&self, a: &UnramElement) -> UnramElement {
        UnramElement(a.0.iter().map(|&x| (self.modulus - x) % self.modulus).collect())
    }

    pub fn mul(&self, a: &UnramElement, b: &UnramElement) -> UnramElement {
        UnramElement(self.mul_raw(&a.0, &b.0))
    }

    pub fn scale(&self, c: u64, a: &UnramElement) -> UnramElement {
        let m = self.modulus as u128;
        UnramElement(a.0.iter().map(|&x| ((x as u128 * c as u128) % m) as u64).collect())
    }

    pub fn pow(&self, a: &UnramElement, mut e: u64) -> UnramElement {
        let mut result = self.one_elem();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn pow_big(&self, a: &UnramElement, mut e: u128) -> UnramElement {
        let mut result = self.one_elem();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn is_zero_elem(&self, a: &UnramElement) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    /// p-adic valuation; `N` for zero.
    pub fn valuation(&self, a: &UnramElement) -> u32 {
        a.0.iter()
            .filter(|&&x| x != 0)
            .map(|&x| {
                let mut v = 0;
                let mut y = x;
                while y % self.p == 0 {
                    y /= self.p;
                    v += 1;
                }
                v
            })
            .min()
            .unwrap_or(self.n)
    }

    /// Divide every coefficient by `p^e`; the caller guarantees divisibility.
    pub fn div_p_pow(&self, a: &UnramElement, e: u32) -> UnramElement {
        let pe = self.p.pow(e);
        UnramElement(a.0.iter().map(|&x| x / pe).collect())
    }

    /// Reduce every coefficient modulo `p^e`.
    pub fn reduce_p_pow(&self, a: &UnramElement, e: u32) -> UnramElement {
        if e >= self.n {
            return a.clone();
        }
        let pe = self.p.pow(e);
        UnramElement(a.0.iter().map(|&x| x % pe).collect())
    }

    pub fn inverse(&self, a: &UnramElement) -> Option<UnramElement> {
        if self.valuation(a) != 0 {
            return None;
        }
        // inverse mod p from Lagrange, then Newton steps b <- b(2 - ab)
        let mut b = self.pow(a, self.q() - 2);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.n {
            b = self.mul(&b, &self.sub(&two, &self.mul(a, &b)));
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, &b), self.one_elem());
        Some(b)
    }

    /// `σ^k(a)` for any integer `k`.
    pub fn sigma_pow(&self, a: &UnramElement, k: i64) -> UnramElement {
        let k = k.rem_euclid(self.d as i64) as usize;
        if k == 0 {
            return a.clone();
        }
        let m = self.modulus as u128;
        let cols = &self.sigma[k];
        let mut out: SmallVec<[u128; 4]> = smallvec![0u128; self.d];
        for (j, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (i, &s) in cols[j].iter().enumerate() {
                out[i] = (out[i] + x as u128 * s as u128) % m;
            }
        }
        UnramElement(out.into_iter().map(|x| x as u64).collect())
    }

    pub fn sigma(&self, a: &UnramElement) -> UnramElement {
        self.sigma_pow(a, 1)
    }

    pub fn sigma_inv(&self, a: &UnramElement) -> UnramElement {
        self.sigma_pow(a, -1)
    }

    /// Teichmüller representative of the residue class of `a`.
    pub fn teichmuller(&self, a: &UnramElement) -> UnramElement {
        let a = self.reduce_p_pow(a, 1);
        self.pow_big(&a, (self.q() as u128).pow(self.n - 1))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> UnramElement {
        UnramElement((0..self.d).map(|_| rng.gen_range(0..self.modulus)).collect())
    }

    /// All elements of the residue field `F_q`, as residues in this ring.
    pub fn residue_elements(&self) -> Vec<UnramElement> {
        let q = self.q();
        (0..q)
            .map(|mut k| {
                let mut v = Vec::with_capacity(self.d);
                for _ in 0..self.d {
                    v.push(k % self.p);
                    k /= self.p;
                }
                UnramElement(v.into())
            })
            .collect()
    }

    /// Embedding into a ring of degree `d·m` with the same `p` and `N`, commuting with `σ`.
    pub fn embedding_into(&self, big: &UnramRing) -> Result<Embedding> {
        if big.p != self.p || big.n != self.n || !big.d.is_multiple_of(self.d) {
            return Err(Error::Mismatch("embedding needs equal p, N and d | d'".into()));
        }
        let small_q1 = self.q() - 1;
        let big_q1 = big.q() - 1;
        let zeta = big.xi();
        let step = big.pow(&zeta, big_q1 / small_q1);
        let fpoly = self.modulus_poly();
        let mut cand = big.one_elem();
        for _ in 0..small_q1.max(1) {
            cand = big.mul(&cand, &step);
            let mut val = big.zero_elem();
            for c in fpoly.iter().rev() {
                val = big.add(&big.mul(&val, &cand), &big.from_int(*c as i64));
            }
            if big.is_zero_elem(&val) {
                let mut powers = Vec::with_capacity(self.d);
                let mut acc = big.one_elem();
                for _ in 0..self.d {
                    powers.push(acc.clone());
                    acc = big.mul(&acc, &cand);
                }
                return Ok(Embedding { powers });
            }
        }
        Err(Error::Unsolvable("no root of the modulus in the extension".into()))
    }

    /// Row-major `d×d` matrix over `Z/p^N` of `x ↦ a·σ^t(x)` in the power basis.
    pub fn restrict(&self, a: &UnramElement, t: i64) -> Vec<u64> {
        let d = self.d;
        let k = t.rem_euclid(d as i64) as usize;
        let mut out = vec![0u64; d * d];
        for col in 0..d {
            let img = UnramRing::mul(self, a, &UnramElement(self.sigma[k][col].as_slice().into()));
            for row in 0..d {
                out[row * d + col] = img.0[row];
            }
        }
        out
    }

    pub fn to_json(&self, a: &UnramElement) -> serde_json::Value {
        serde_json::json!({"p": self.p, "d": self.d, "N": self.n, "coords": a.0})
    }
}

fn identity_cols(d: usize, m: u64) -> Vec<Vec<u64>> {
    (0..d)
        .map(|j| {
            let mut c = vec![0u64; d];
            c[j] = 1 % m;
            c
        })
        .collect()
}

/// Columns of `A·B` where both are given column-wise.
fn compose_cols(a: &[Vec<u64>], b: &[Vec<u64>], m: u64) -> Vec<Vec<u64>> {
    let d = a.len();
    b.iter()
        .map(|bc| {
            let mut out = vec![0u128; d];
            for (k, &x) in bc.iter().enumerate() {
                for i in 0..d {
                    out[i] = (out[i] + x as u128 * a[k][i] as u128) % m as u128;
                }
            }
            out.into_iter().map(|x| x as u64).collect()
        })
        .collect()
}

/// `Π_{i<d} (X − t^{p^i})` for the Teichmüller lift `t` of a root of `g`.
fn teichmuller_modulus(g: &[u64], p: u64, d: usize, n: u32, m: u64) -> Vec<u64> {
    let gl: Vec<u64> = g.to_vec();
    let t = polypowmod(&x_poly(d), (p as u128).pow(d as u32).pow(n - 1), &gl, m);
    // polynomial in X with coefficients in A = (Z/m)[x]/(g)
    let mut poly: Vec<Vec<u64>> = vec![{
        let mut one = vec![0u64; d];
        one[0] = 1;
        one
    }];
    let mut root = t;
    for _ in 0..d {
        let neg_root: Vec<u64> = root.iter().map(|&c| (m - c) % m).collect();
        let mut next = vec![vec![0u64; d]; poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            for i in 0..d {
                next[k + 1][i] = (next[k + 1][i] + c[i]) % m;
            }
            let prod = polymulmod(c, &neg_root, &gl, m);
            for i in 0..d {
                next[k][i] = (next[k][i] + prod[i]) % m;
            }
        }
        poly = next;
        root = polypowmod(&root, p as u128, &gl, m);
    }
    poly[..d]
        .iter()
        .map(|c| {
            assert!(c[1..].iter().all(|&x| x == 0), "Teichmüller modulus has non-constant coefficients");
            c[0]
        })
        .collect()
}

/// A σ-equivariant ring embedding between Galois rings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    powers: Vec<UnramElement>,
}

impl Embedding {
    pub fn apply(&self, big: &UnramRing, a: &UnramElement) -> UnramElement {
        let mut out = big.zero_elem();
        for (c, pw) in a.0.iter().zip(&self.powers) {
            if *c != 0 {
                out = big.add(&out, &big.scale(*c, pw));
            }
        }
        out
    }
}

impl Pir for UnramRing {
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
    fn neg(&self, a: &UnramElement) -> UnramElement {
        UnramRing::neg(self, a)
    }
    fn is_zero(&self, a: &UnramElement) -> bool {
        self.is_zero_elem(a)
    }
    fn is_unit(&self, a: &UnramElement) -> bool {
        self.valuation(a) == 0
    }
    fn inv_unit(&self, a: &UnramElement) -> UnramElement {
        self.inverse(a).expect("not a unit")
    }
    fn gcdex(
        &self,
        a: &UnramElement,
        b: &UnramElement,
    ) -> (UnramElement, UnramElement, UnramElement, UnramElement, UnramElement) {
        let (va, vb) = (self.valuation(a), self.valuation(b));
        let (one, zero) = (self.one_elem(), self.zero_elem());
        if va == self.n && vb == self.n {
            return (zero.clone(), one.clone(), zero.clone(), zero, one);
        }
        if va <= vb {
            let q = self.div_exact(b, a).expect("valuation order");
            (a.clone(), one.clone(), zero, self.neg(&q), one)
        } else {
            let q = self.div_exact(a, b).expect("valuation order");
            (b.clone(), zero, one.clone(), one, self.neg(&q))
        }
    }
    fn div_exact(&self, a: &UnramElement, b: &UnramElement) -> Option<UnramElement> {
        let (va, vb) = (self.valuation(a), self.valuation(b));
        if vb == self.n {
            return (va == self.n).then(|| self.zero_elem());
        }
        if va < vb {
            return None;
        }
        let ub = self.div_p_pow(b, vb);
        let qa = self.div_p_pow(a, vb);
        if ub == self.one_elem() {
            return Some(qa);
        }
        let inv = self.inverse(&ub).expect("unit part");
        Some(UnramRing::mul(self, &qa, &inv))
    }
    fn divides(&self, a: &UnramElement, b: &UnramElement) -> bool {
        self.valuation(a) <= self.valuation(b)
    }
    fn ann(&self, a: &UnramElement) -> UnramElement {
        self.p_pow(self.n - self.valuation(a))
    }
    fn reduce(&self, a: &UnramElement, m: &UnramElement) -> UnramElement {
        self.reduce_p_pow(a, self.valuation(m))
    }
    fn pivot_key(&self, a: &UnramElement) -> u64 {
        self.valuation(a) as u64
    }
    fn canon(&self, a: &UnramElement) -> (UnramElement, UnramElement) {
        let v = self.valuation(a);
        if v == self.n {
            return (self.zero_elem(), self.one_elem());
        }
        let u = self.div_p_pow(a, v);
        (self.p_pow(v), self.inverse(&u).expect("unit part"))
    }
}


/// `Z/p^N` with word-sized residues; the target of restriction of scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zmod {
    p: u64,
    n: u32,
    m: u64,
}

impl Zmod {
    pub fn new(p: u64, n: u32) -> Self {
        Zmod { p, n, m: p.pow(n) }
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.n
    }
    pub fn modulus(&self) -> u64 {
        self.m
    }
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        let mut x = a;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }
    pub fn p_pow(&self, e: u32) -> u64 {
        if e >= self.n {
            0
        } else {
            self.p.pow(e)
        }
    }
    pub fn inverse(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        let (mut r0, mut r1) = (self.m as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.m as i128) as u64)
    }
    fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }
}

impl Pir for Zmod {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.m
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.m
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.m - b) % self.m
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulm(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.m - a) % self.m
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        !a.is_multiple_of(self.p)
    }
    fn inv_unit(&self, a: &u64) -> u64 {
        self.inverse(*a).expect("not a unit")
    }
    fn gcdex(&self, a: &u64, b: &u64) -> (u64, u64, u64, u64, u64) {
        let (va, vb) = (self.valuation(*a), self.valuation(*b));
        if va == self.n && vb == self.n {
            return (0, 1, 0, 0, 1);
        }
        if va <= vb {
            let q = self.div_exact(b, a).expect("valuation order");
            (*a, 1, 0, self.neg(&q), 1)
        } else {
            let q = self.div_exact(a, b).expect("valuation order");
            (*b, 0, 1, 1, self.neg(&q))
        }
    }
    fn div_exact(&self, a: &u64, b: &u64) -> Option<u64> {
        let (va, vb) = (self.valuation(*a), self.valuation(*b));
        if vb == self.n {
            return (va == self.n).then_some(0);
        }
        if va < vb {
            return None;
        }
        let pv = self.p.pow(vb);
        if b / pv == 1 {
            return Some(a / pv);
        }
        let u = self.inverse(b / pv).expect("unit part");
        Some(self.mulm(a / pv, u))
    }
    fn divides(&self, a: &u64, b: &u64) -> bool {
        self.valuation(*a) <= self.valuation(*b)
    }
    fn ann(&self, a: &u64) -> u64 {
        self.p_pow(self.n - self.valuation(*a))
    }
    fn reduce(&self, a: &u64, m: &u64) -> u64 {
        let e = self.valuation(*m);
        if e >= self.n {
            *a
        } else {
            a % self.p.pow(e)
        }
    }
    fn pivot_key(&self, a: &u64) -> u64 {
        self.valuation(*a) as u64
    }
    fn canon(&self, a: &u64) -> (u64, u64) {
        let v = self.valuation(*a);
        if v == self.n {
            return (0, 1 % self.m);
        }
        let pv = self.p.pow(v);
        (pv, self.inverse(a / pv).expect("unit part"))
    }
}
