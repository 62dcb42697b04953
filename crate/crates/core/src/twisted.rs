//! Solver for homogeneous systems `Σ A·σ^t(X_k)·B ≡ 0` in unknown matrices over a Galois ring.
//!
//! When no unknown is twisted the system is linear over the Galois ring and is
//! solved there. Otherwise it is only linear over `Z/p^N`, and every entry is
//! expanded in the power basis (restriction of scalars).

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, SubModule};
use crate::semilinear::{same_twist, FinLenModule, SemilinearMap};
use crate::unram::{UnramElement, UnramRing, Zmod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// An unknown matrix whose `(i, j)` entry ranges over `p^{lo} W / p^{hi} W`.
#[derive(Clone, Debug)]
pub struct Unknown {
    pub rows: usize,
    pub cols: usize,
    pub lo: Vec<u32>,
    pub hi: Vec<u32>,
}

impl Unknown {
    pub fn new(rows: usize, cols: usize, lo: impl Fn(usize, usize) -> u32, hi: impl Fn(usize, usize) -> u32) -> Self {
        let mut l = Vec::with_capacity(rows * cols);
        let mut h = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let (a, b) = (lo(i, j), hi(i, j));
                l.push(a.min(b));
                h.push(b);
            }
        }
        Unknown { rows, cols, lo: l, hi: h }
    }

    /// The module of `W`-linear maps `src → tgt` in matrix form.
    pub fn hom(src: &FinLenModule, tgt: &FinLenModule) -> Self {
        Unknown::new(
            tgt.rank(),
            src.rank(),
            |i, j| tgt.divisors[i].saturating_sub(src.divisors[j]),
            |i, _| tgt.divisors[i],
        )
    }
}

/// `left · σ^twist(X or Xᵀ) · right`; a missing side is the identity.
#[derive(Clone, Debug)]
pub struct Term {
    pub unknown: usize,
    pub left: Option<Mat<UnramElement>>,
    pub twist: i64,
    pub transpose: bool,
    pub right: Option<Mat<UnramElement>>,
}

impl Term {
    pub fn plain(unknown: usize) -> Self {
        Term { unknown, left: None, twist: 0, transpose: false, right: None }
    }

    pub fn left(mut self, a: Mat<UnramElement>) -> Self {
        self.left = Some(a);
        self
    }

    pub fn right(mut self, b: Mat<UnramElement>) -> Self {
        self.right = Some(b);
        self
    }

    pub fn twisted(mut self, t: i64) -> Self {
        self.twist = t;
        self
    }

    pub fn transposed(mut self) -> Self {
        self.transpose = true;
        self
    }
}

/// A matrix equation; entry `(r, s)` is read modulo `p^{modulus[r·cols + s]}`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub rows: usize,
    pub cols: usize,
    pub modulus: Vec<u32>,
    pub terms: Vec<Term>,
}

impl Equation {
    pub fn new(rows: usize, cols: usize, modulus: impl Fn(usize, usize) -> u32) -> Self {
        let m = (0..rows * cols).map(|k| modulus(k / cols.max(1), k % cols.max(1))).collect();
        Equation { rows, cols, modulus: m, terms: vec![] }
    }

    pub fn term(mut self, t: Term) -> Self {
        self.terms.push(t);
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct System {
    pub unknowns: Vec<Unknown>,
    pub equations: Vec<Equation>,
}

/// Where each scalar slot of the unknowns lives.
#[derive(Clone, Debug)]
struct Layout {
    /// `(unknown, i, j, lo, hi)`
    slots: Vec<(usize, usize, usize, u32, u32)>,
    offsets: Vec<usize>,
    shapes: Vec<(usize, usize)>,
}

impl Layout {
    fn new(unknowns: &[Unknown]) -> Self {
        let mut slots = Vec::new();
        let mut offsets = Vec::new();
        let mut shapes = Vec::new();
        for (k, u) in unknowns.iter().enumerate() {
            offsets.push(slots.len());
            shapes.push((u.rows, u.cols));
            for i in 0..u.rows {
                for j in 0..u.cols {
                    let idx = i * u.cols + j;
                    slots.push((k, i, j, u.lo[idx], u.hi[idx]));
                }
            }
        }
        Layout { slots, offsets, shapes }
    }

    fn slot(&self, k: usize, i: usize, j: usize) -> usize {
        self.offsets[k] + i * self.shapes[k].1 + j
    }

    fn to_mats(&self, r: &UnramRing, vals: &[UnramElement]) -> Vec<Mat<UnramElement>> {
        let mut out: Vec<_> = self.shapes.iter().map(|&(a, b)| linalg::zeros(r, a, b)).collect();
        for (s, &(k, i, j, lo, hi)) in self.slots.iter().enumerate() {
            out[k][(i, j)] = r.reduce_p_pow(&r.mul(&r.p_pow(lo), &vals[s]), hi);
        }
        out
    }

    fn from_mats(&self, r: &UnramRing, xs: &[Mat<UnramElement>]) -> Option<Vec<UnramElement>> {
        self.slots
            .iter()
            .map(|&(k, i, j, lo, hi)| {
                let x = r.reduce_p_pow(&xs[k][(i, j)], hi);
                if r.valuation(&x) < lo {
                    return None;
                }
                Some(r.reduce_p_pow(&r.div_p_pow(&x, lo), hi - lo))
            })
            .collect()
    }
}

/// Entries `(out_index, slot, coefficient, twist)` of the linearised system.
fn linearise(r: &UnramRing, sys: &System, layout: &Layout) -> (Vec<u32>, Vec<(usize, usize, UnramElement, i64)>) {
    let mut moduli = Vec::new();
    let mut entries = Vec::new();
    for eq in &sys.equations {
        let base = moduli.len();
        moduli.extend(&eq.modulus);
        for t in &eq.terms {
            let u = &sys.unknowns[t.unknown];
            for i in 0..u.rows {
                for j in 0..u.cols {
                    let lo = u.lo[i * u.cols + j];
                    let scale = r.p_pow(lo);
                    if r.is_zero_elem(&scale) {
                        continue;
                    }
                    // position of this entry inside σ^t(X) or its transpose
                    let (a, b) = if t.transpose { (j, i) } else { (i, j) };
                    let lefts: Vec<(usize, UnramElement)> = match &t.left {
                        None => vec![(a, r.one_elem())],
                        Some(m) => (0..eq.rows).map(|row| (row, m[(row, a)].clone())).collect(),
                    };
                    let rights: Vec<(usize, UnramElement)> = match &t.right {
                        None => vec![(b, r.one_elem())],
                        Some(m) => (0..eq.cols).map(|col| (col, m[(b, col)].clone())).collect(),
                    };
                    let slot = layout.slot(t.unknown, i, j);
                    for (row, lc) in &lefts {
                        if r.is_zero_elem(lc) {
                            continue;
                        }
                        let ls = r.mul(lc, &scale);
                        for (col, rc) in &rights {
                            let c = r.mul(&ls, rc);
                            if !r.is_zero_elem(&c) {
                                entries.push((base + row * eq.cols + col, slot, c, t.twist));
                            }
                        }
                    }
                }
            }
        }
    }
    (moduli, entries)
}

/// Solutions forming a module over the Galois ring.
#[derive(Clone, Debug)]
pub struct WSolution {
    pub divisors: Vec<u32>,
    /// Generator `g` as one matrix per unknown.
    pub gens: Vec<Vec<Mat<UnramElement>>>,
    sub: SubModule<UnramElement>,
    amb: Vec<UnramElement>,
    layout: Layout,
}

impl WSolution {
    pub fn module(&self) -> FinLenModule {
        FinLenModule::new(self.divisors.clone())
    }

    /// Coordinates of a solution in terms of the generators.
    pub fn coords(&self, r: &UnramRing, xs: &[Mat<UnramElement>]) -> Option<Vec<UnramElement>> {
        let v = self.layout.from_mats(r, xs)?;
        self.sub.coords(r, &self.amb, &v)
    }

    pub fn combine(&self, r: &UnramRing, c: &[UnramElement]) -> Vec<Mat<UnramElement>> {
        let v = linalg::mat_vec(r, &self.sub.incl, c);
        self.layout.to_mats(r, &linalg::reduce_vec(r, &v, &self.amb))
    }

    /// Matrix of an endomorphism given on generators, as a map on the solution module.
    pub fn induced(
        &self,
        r: &UnramRing,
        twist: i64,
        image: impl Fn(&[Mat<UnramElement>]) -> Vec<Mat<UnramElement>>,
    ) -> Result<SemilinearMap> {
        let m = self.module();
        let mut cols = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            let img = image(g);
            cols.push(self.coords(r, &img).ok_or_else(|| Error::Relation("image leaves the solution module".into()))?);
        }
        let mat = Mat::from_cols(m.rank(), &cols, r.zero_elem());
        SemilinearMap::new(r, m.clone(), m, twist, mat)
    }
}

/// Solutions forming a `Z/p^N`-module; coordinates are power-basis coefficients.
#[derive(Clone, Debug)]
pub struct ZpSolution {
    pub divisors: Vec<u32>,
    pub gens: Vec<Vec<Mat<UnramElement>>>,
    sub: SubModule<u64>,
    amb: Vec<u64>,
    layout: Layout,
    zr: Zmod,
}

impl ZpSolution {
    pub fn module(&self) -> FinLenModule {
        FinLenModule::new(self.divisors.clone())
    }

    /// Order of the solution group, as `log_p`.
    pub fn log_order(&self) -> u32 {
        self.divisors.iter().sum()
    }

    pub fn coords(&self, r: &UnramRing, xs: &[Mat<UnramElement>]) -> Option<Vec<u64>> {
        let v = self.layout.from_mats(r, xs)?;
        let flat: Vec<u64> = v.iter().flat_map(|e| e.0.iter().copied()).collect();
        self.sub.coords(&self.zr, &self.amb, &flat)
    }

    pub fn combine(&self, r: &UnramRing, c: &[u64]) -> Vec<Mat<UnramElement>> {
        let v = linalg::reduce_vec(&self.zr, &linalg::mat_vec(&self.zr, &self.sub.incl, c), &self.amb);
        let d = r.degree();
        let vals: Vec<UnramElement> = v.chunks(d).map(|c| UnramElement(c.into())).collect();
        self.layout.to_mats(r, &vals)
    }

    /// Integer matrix of an additive endomorphism given on generators.
    pub fn induced(
        &self,
        r: &UnramRing,
        image: impl Fn(&[Mat<UnramElement>]) -> Vec<Mat<UnramElement>>,
    ) -> Result<Mat<u64>> {
        let mut cols = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            cols.push(self.coords(r, &image(g)).ok_or_else(|| Error::Relation("image leaves the solution group".into()))?);
        }
        Ok(Mat::from_cols(self.divisors.len(), &cols, 0))
    }
}

impl System {
    pub fn new() -> Self {
        System::default()
    }

    pub fn add_unknown(&mut self, u: Unknown) -> usize {
        self.unknowns.push(u);
        self.unknowns.len() - 1
    }

    pub fn add_equation(&mut self, e: Equation) {
        self.equations.push(e);
    }

    pub fn is_linear(&self, r: &UnramRing) -> bool {
        self.equations.iter().flat_map(|e| &e.terms).all(|t| same_twist(r, t.twist, 0))
    }

    /// Solve over the Galois ring; every term must be untwisted.
    pub fn solve_w(&self, r: &UnramRing) -> Result<WSolution> {
        if !self.is_linear(r) {
            return Err(Error::InvalidArgument("twisted unknowns need the Z/p^N solver".into()));
        }
        let layout = Layout::new(&self.unknowns);
        let (moduli, entries) = linearise(r, self, &layout);
        let mut a = linalg::zeros(r, moduli.len(), layout.slots.len());
        for (row, col, c, _) in entries {
            a[(row, col)] = r.add(&a[(row, col)], &c);
        }
        let f: Vec<_> = moduli.iter().map(|&e| r.p_pow(e)).collect();
        let amb: Vec<_> = layout.slots.iter().map(|s| r.p_pow(s.4 - s.3)).collect();
        let sub = linalg::submodule(r, &amb, &linalg::kernel_gens(r, &a, &f));
        let divisors: Vec<u32> = sub.divs.iter().map(|d| r.valuation(d)).collect();
        let gens = (0..sub.len()).map(|g| layout.to_mats(r, &sub.incl.col(g))).collect();
        Ok(WSolution { divisors, gens, sub, amb, layout })
    }

    /// Solve over `Z/p^N` after restriction of scalars.
    pub fn solve_zp(&self, r: &UnramRing) -> ZpSolution {
        let d = r.degree();
        let zr = Zmod::new(r.p(), r.precision());
        let layout = Layout::new(&self.unknowns);
        let (moduli, entries) = linearise(r, self, &layout);
        let mut a = linalg::zeros(&zr, moduli.len() * d, layout.slots.len() * d);
        let m = zr.modulus() as u128;
        for (row, col, c, t) in entries {
            let block = r.restrict(&c, t);
            for x in 0..d {
                for y in 0..d {
                    let v = &mut a[(row * d + x, col * d + y)];
                    *v = ((*v as u128 + block[x * d + y] as u128) % m) as u64;
                }
            }
        }
        let f: Vec<u64> = moduli.iter().flat_map(|&e| std::iter::repeat_n(zr.p_pow(e), d)).collect();
        let amb: Vec<u64> =
            layout.slots.iter().flat_map(|s| std::iter::repeat_n(zr.p_pow(s.4 - s.3), d)).collect();
        let sub = linalg::submodule(&zr, &amb, &linalg::kernel_gens(&zr, &a, &f));
        let divisors: Vec<u32> = sub.divs.iter().map(|&x| zr.valuation(x)).collect();
        let gens = (0..sub.len())
            .map(|g| {
                let col = sub.incl.col(g);
                let vals: Vec<UnramElement> = col.chunks(d).map(|c| UnramElement(c.into())).collect();
                layout.to_mats(r, &vals)
            })
            .collect();
        ZpSolution { divisors, gens, sub, amb, layout, zr }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    /// An explicit intertwiner (matrix of a `W`-linear bijection).
    Isomorphic(Mat<UnramElement>),
    NotIsomorphic,
    /// The search space was too large to exhaust and sampling found nothing.
    Undecided,
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic(_))
    }
}

const ENUMERATION_LIMIT: u64 = 1 << 16;
const SAMPLES: usize = 512;

/// Invertibility of a square matrix over the residue field.
pub fn invertible_mod_p(r: &UnramRing, x: &Mat<UnramElement>) -> bool {
    if x.rows != x.cols {
        return false;
    }
    let k = r.residue_field();
    let xr = x.map(|e| r.reduce_p_pow(e, 1));
    let s = linalg::snf(&k, &xr);
    s.d.len() == x.rows && s.d.iter().all(|e| !k.is_zero_elem(e))
}

/// Search for a `W`-linear bijection `X: M1 → M2` with `X∘op1 = op2∘X` for each pair of operators.
pub fn find_isomorphism(
    r: &UnramRing,
    m1: &FinLenModule,
    ops1: &[SemilinearMap],
    m2: &FinLenModule,
    ops2: &[SemilinearMap],
) -> Result<IsoVerdict> {
    if ops1.len() != ops2.len() {
        return Err(Error::Mismatch("operator lists differ in length".into()));
    }
    if m1.invariants() != m2.invariants() {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    if m1.is_zero() {
        return Ok(IsoVerdict::Isomorphic(linalg::zeros(r, 0, 0)));
    }
    let mut sys = System::new();
    let x = sys.add_unknown(Unknown::hom(m1, m2));
    for (a, b) in ops1.iter().zip(ops2) {
        if !same_twist(r, a.twist, b.twist) {
            return Err(Error::Mismatch("paired operators have different twists".into()));
        }
        let neg_b = linalg::mat_scale(r, &r.from_int(-1), &b.mat);
        sys.add_equation(
            Equation::new(m2.rank(), m1.rank(), |i, _| m2.divisors[i])
                .term(Term::plain(x).right(a.mat.clone()))
                .term(Term::plain(x).left(neg_b).twisted(a.twist)),
        );
    }
    // an F_p-spanning set of the solutions, with lifts
    let mut lifts: Vec<Mat<UnramElement>> = Vec::new();
    if sys.is_linear(r) {
        let sol = sys.solve_w(r)?;
        for g in &sol.gens {
            for c in 0..r.degree() {
                let mut e = vec![0i64; r.degree()];
                e[c] = 1;
                lifts.push(linalg::mat_scale(r, &r.from_coeffs(&e), &g[0]));
            }
        }
    } else {
        let sol = sys.solve_zp(r);
        lifts.extend(sol.gens.iter().map(|g| g[0].clone()));
    }
    let basis = independent_mod_p(r, lifts);
    search_invertible(r, &basis)
}

/// Drop lifts whose reductions mod `p` are dependent over `F_p`.
fn independent_mod_p(r: &UnramRing, lifts: Vec<Mat<UnramElement>>) -> Vec<Mat<UnramElement>> {
    let p = r.p();
    let flat = |m: &Mat<UnramElement>| -> Vec<u64> { m.data.iter().flat_map(|e| e.0.iter().map(|&c| c % p)).collect() };
    let mut echelon: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut keep = Vec::new();
    for l in lifts {
        let mut v = flat(&l);
        for (piv, row) in &echelon {
            if v[*piv] != 0 {
                let c = v[*piv];
                for (a, b) in v.iter_mut().zip(row) {
                    *a = (*a + p * p - c * b % p) % p;
                }
            }
        }
        if let Some(piv) = v.iter().position(|&c| c != 0) {
            let inv = Zmod::new(p, 1).inverse(v[piv]).expect("nonzero mod p");
            for a in v.iter_mut() {
                *a = *a * inv % p;
            }
            echelon.push((piv, v));
            keep.push(l);
        }
    }
    keep
}

fn search_invertible(r: &UnramRing, basis: &[Mat<UnramElement>]) -> Result<IsoVerdict> {
    if basis.is_empty() {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    let p = r.p();
    let combo = |c: &[u64]| -> Mat<UnramElement> {
        let mut acc = linalg::zeros(r, basis[0].rows, basis[0].cols);
        for (b, &k) in basis.iter().zip(c) {
            if k != 0 {
                acc = linalg::mat_add(r, &acc, &linalg::mat_scale(r, &r.from_int(k as i64), b));
            }
        }
        acc
    };
    let total = (p as f64).powi(basis.len() as i32);
    if total <= ENUMERATION_LIMIT as f64 {
        let mut c = vec![0u64; basis.len()];
        loop {
            // odometer increment
            let mut i = 0;
            while i < c.len() {
                c[i] += 1;
                if c[i] < p {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
            if i == c.len() {
                return Ok(IsoVerdict::NotIsomorphic);
            }
            let x = combo(&c);
            if invertible_mod_p(r, &x) {
                return Ok(IsoVerdict::Isomorphic(x));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x15_0_7e57);
    for _ in 0..SAMPLES {
        let c: Vec<u64> = (0..basis.len()).map(|_| rng.gen_range(0..p)).collect();
        let x = combo(&c);
        if invertible_mod_p(r, &x) {
            return Ok(IsoVerdict::Isomorphic(x));
        }
    }
    Ok(IsoVerdict::Undecided)
}
