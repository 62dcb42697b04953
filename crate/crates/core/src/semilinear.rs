//! Finite-length modules over a Galois ring and σ-semilinear maps between them.
//!
//! A module is `⊕ W/p^{e_i}`, stored by its exponents. A map with twist `t`
//! sends `x` to `A·σ^t(x)`, so composing adds twists.

use crate::error::{Error, Result};
use crate::linalg::{self, mat_mul, Mat, Pir, SubModule};
use crate::unram::{UnramElement, UnramRing};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FinLenModule {
    pub divisors: Vec<u32>,
}

impl FinLenModule {
    pub fn new(divisors: Vec<u32>) -> Self {
        FinLenModule { divisors }
    }

    pub fn zero() -> Self {
        FinLenModule { divisors: vec![] }
    }

    /// `W/p^e`.
    pub fn cyclic(e: u32) -> Self {
        FinLenModule { divisors: vec![e] }
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Length over `W`.
    pub fn length(&self) -> u32 {
        self.divisors.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn exponent(&self) -> u32 {
        self.divisors.iter().copied().max().unwrap_or(0)
    }

    /// Divisors sorted decreasingly; two modules are isomorphic iff these agree.
    pub fn invariants(&self) -> Vec<u32> {
        let mut v = self.divisors.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    pub fn elems(&self, r: &UnramRing) -> Vec<UnramElement> {
        self.divisors.iter().map(|&e| r.p_pow(e)).collect()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut d = self.divisors.clone();
        d.extend(&other.divisors);
        FinLenModule { divisors: d }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "divisors": self.divisors })
    }
}

pub fn exps_of(r: &UnramRing, divs: &[UnramElement]) -> Vec<u32> {
    divs.iter().map(|d| r.valuation(d)).collect()
}

/// Apply `σ^t` entrywise.
pub fn sigma_mat(r: &UnramRing, a: &Mat<UnramElement>, t: i64) -> Mat<UnramElement> {
    if t.rem_euclid(r.degree() as i64) == 0 {
        return a.clone();
    }
    a.map(|x| r.sigma_pow(x, t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearMap {
    pub src: FinLenModule,
    pub tgt: FinLenModule,
    pub twist: i64,
    pub mat: Mat<UnramElement>,
}

impl SemilinearMap {
    /// Checks well-definedness and reduces entries.
    pub fn new(r: &UnramRing, src: FinLenModule, tgt: FinLenModule, twist: i64, mat: Mat<UnramElement>) -> Result<Self> {
        if mat.rows != tgt.rank() || mat.cols != src.rank() {
            return Err(Error::Mismatch(format!(
                "matrix is {}x{}, modules have ranks {} -> {}",
                mat.rows,
                mat.cols,
                src.rank(),
                tgt.rank()
            )));
        }
        let mat = linalg::reduce_rows(r, &mat, &tgt.elems(r));
        for i in 0..mat.rows {
            for j in 0..mat.cols {
                let need = tgt.divisors[i].saturating_sub(src.divisors[j]);
                if r.valuation(&mat[(i, j)]) < need {
                    return Err(Error::Relation(format!(
                        "entry ({i},{j}) does not respect the orders p^{} -> p^{}",
                        src.divisors[j], tgt.divisors[i]
                    )));
                }
            }
        }
        Ok(SemilinearMap { src, tgt, twist, mat })
    }

    fn raw(r: &UnramRing, src: FinLenModule, tgt: FinLenModule, twist: i64, mat: Mat<UnramElement>) -> Self {
        let mat = linalg::reduce_rows(r, &mat, &tgt.elems(r));
        SemilinearMap { src, tgt, twist, mat }
    }

    pub fn zero(r: &UnramRing, src: &FinLenModule, tgt: &FinLenModule, twist: i64) -> Self {
        SemilinearMap { src: src.clone(), tgt: tgt.clone(), twist, mat: linalg::zeros(r, tgt.rank(), src.rank()) }
    }

    pub fn identity(r: &UnramRing, m: &FinLenModule) -> Self {
        SemilinearMap::raw(r, m.clone(), m.clone(), 0, linalg::identity(r, m.rank()))
    }

    /// Multiplication by a scalar, twisted by `σ^t`: `x ↦ c·σ^t(x)`.
    pub fn scalar(r: &UnramRing, m: &FinLenModule, c: &UnramElement, twist: i64) -> Self {
        let mat = linalg::diag(r, &vec![c.clone(); m.rank()]);
        SemilinearMap::raw(r, m.clone(), m.clone(), twist, mat)
    }

    pub fn apply(&self, r: &UnramRing, x: &[UnramElement]) -> Vec<UnramElement> {
        let sx: Vec<_> = x.iter().map(|a| r.sigma_pow(a, self.twist)).collect();
        linalg::reduce_vec(r, &linalg::mat_vec(r, &self.mat, &sx), &self.tgt.elems(r))
    }

    /// `self ∘ first`.
    pub fn compose(&self, r: &UnramRing, first: &SemilinearMap) -> Result<SemilinearMap> {
        if first.tgt != self.src {
            return Err(Error::Mismatch("composing maps with different middle modules".into()));
        }
        let mat = mat_mul(r, &self.mat, &sigma_mat(r, &first.mat, self.twist));
        Ok(SemilinearMap::raw(r, first.src.clone(), self.tgt.clone(), self.twist + first.twist, mat))
    }

    pub fn add(&self, r: &UnramRing, other: &SemilinearMap) -> Result<SemilinearMap> {
        if self.src != other.src || self.tgt != other.tgt || !same_twist(r, self.twist, other.twist) {
            return Err(Error::Mismatch("adding incompatible maps".into()));
        }
        Ok(SemilinearMap::raw(r, self.src.clone(), self.tgt.clone(), self.twist, linalg::mat_add(r, &self.mat, &other.mat)))
    }

    pub fn scale(&self, r: &UnramRing, c: &UnramElement) -> SemilinearMap {
        SemilinearMap::raw(r, self.src.clone(), self.tgt.clone(), self.twist, linalg::mat_scale(r, c, &self.mat))
    }

    pub fn is_zero(&self, r: &UnramRing) -> bool {
        linalg::is_zero_mat(r, &self.mat)
    }

    /// Equality as semilinear maps (twists compared modulo `d`).
    pub fn same_as(&self, r: &UnramRing, other: &SemilinearMap) -> bool {
        self.src == other.src && self.tgt == other.tgt && same_twist(r, self.twist, other.twist) && self.mat == other.mat
    }

    pub fn pow(&self, r: &UnramRing, k: u32) -> Result<SemilinearMap> {
        let mut acc = SemilinearMap::identity(r, &self.src);
        for _ in 0..k {
            acc = self.compose(r, &acc)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "twist": self.twist,
            "matrix": (0..self.mat.rows)
                .map(|i| self.mat.row(i).into_iter().map(|e| e.0).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

pub fn same_twist(r: &UnramRing, a: i64, b: i64) -> bool {
    (a - b).rem_euclid(r.degree() as i64) == 0
}

/// Smith form `A = U·D·V′` over the Galois ring; `D` has entries `p^e` (zero for `p^N`).
pub fn smith_normal_form(r: &UnramRing, a: &Mat<UnramElement>) -> (Mat<UnramElement>, Mat<UnramElement>, Mat<UnramElement>) {
    let s = linalg::snf(r, a);
    let mut d = linalg::zeros(r, a.rows, a.cols);
    for (k, x) in s.d.iter().enumerate() {
        d[(k, k)] = x.clone();
    }
    (s.p_inv, d, s.q_inv)
}

/// A submodule with its inclusion, as returned by [`kernel`] and [`image`].
#[derive(Clone, Debug)]
pub struct Sub {
    pub module: FinLenModule,
    pub incl: SemilinearMap,
    inner: SubModule<UnramElement>,
}

impl Sub {
    fn from_inner(r: &UnramRing, amb: &FinLenModule, inner: SubModule<UnramElement>) -> Sub {
        let module = FinLenModule::new(exps_of(r, &inner.divs));
        let incl = SemilinearMap::raw(r, module.clone(), amb.clone(), 0, inner.incl.clone());
        Sub { module, incl, inner }
    }

    /// Coordinates of an element of the ambient module lying in this submodule.
    pub fn coords(&self, r: &UnramRing, x: &[UnramElement]) -> Option<Vec<UnramElement>> {
        self.inner.coords(r, &self.incl.tgt.elems(r), x)
    }

    pub fn contains(&self, r: &UnramRing, x: &[UnramElement]) -> bool {
        self.coords(r, x).is_some()
    }

    /// A map into the ambient module whose image lies here, rewritten in sub coordinates.
    pub fn corestrict(&self, r: &UnramRing, f: &SemilinearMap) -> Result<SemilinearMap> {
        let mut cols = Vec::with_capacity(f.src.rank());
        for j in 0..f.src.rank() {
            let c = self
                .coords(r, &f.mat.col(j))
                .ok_or_else(|| Error::Relation("image does not lie in the submodule".into()))?;
            cols.push(c);
        }
        let mat = Mat::from_cols(self.module.rank(), &cols, r.zero_elem());
        Ok(SemilinearMap::raw(r, f.src.clone(), self.module.clone(), f.twist, mat))
    }

    /// The restriction of an endomorphism preserving this submodule.
    pub fn restrict_endo(&self, r: &UnramRing, f: &SemilinearMap) -> Result<SemilinearMap> {
        let g = f.compose(r, &self.incl)?;
        self.corestrict(r, &g)
    }
}

/// The submodule generated by the columns of `gens`.
pub fn span(r: &UnramRing, amb: &FinLenModule, gens: &Mat<UnramElement>) -> Sub {
    Sub::from_inner(r, amb, linalg::submodule(r, &amb.elems(r), gens))
}

pub fn kernel(r: &UnramRing, f: &SemilinearMap) -> Sub {
    // A·σ^t(x) = 0 iff σ^t(x) lies in the kernel of A
    let gens = linalg::kernel_gens(r, &f.mat, &f.tgt.elems(r));
    span(r, &f.src, &sigma_mat(r, &gens, -f.twist))
}

pub fn image(r: &UnramRing, f: &SemilinearMap) -> Sub {
    span(r, &f.tgt, &f.mat)
}

#[derive(Clone, Debug)]
pub struct Quot {
    pub module: FinLenModule,
    pub proj: SemilinearMap,
    /// Set-theoretic section, columns in target coordinates.
    pub lift: Mat<UnramElement>,
}

impl Quot {
    /// The endomorphism induced on the quotient; the caller guarantees `f` preserves the kernel.
    pub fn descend_endo(&self, r: &UnramRing, f: &SemilinearMap) -> SemilinearMap {
        let img = mat_mul(r, &f.mat, &sigma_mat(r, &self.lift, f.twist));
        let mat = mat_mul(r, &self.proj.mat, &img);
        SemilinearMap::raw(r, self.module.clone(), self.module.clone(), f.twist, mat)
    }
}

pub fn cokernel(r: &UnramRing, f: &SemilinearMap) -> Quot {
    let q = linalg::cokernel(r, &f.tgt.elems(r), &f.mat);
    let module = FinLenModule::new(exps_of(r, &q.divs));
    let proj = SemilinearMap::raw(r, f.tgt.clone(), module.clone(), 0, q.proj);
    Quot { module, proj, lift: q.lift }
}

/// Quotient of `m` by a submodule.
pub fn quotient(r: &UnramRing, sub: &Sub) -> Quot {
    cokernel(r, &sub.incl)
}

fn hom_offset(e_src: u32, e_tgt: u32) -> u32 {
    e_tgt.saturating_sub(e_src)
}

/// Slot `(i, j)` of a bifunctor module built on two divisor lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub i: usize,
    pub j: usize,
}

/// `Tor_1^W(M, L) = ⊕_{i,j} W/p^{min(e_i, f_j)}`, basis `p^{max(f_j−e_i,0)}·(e_i ⊗ l_j)` realised in `L[p^{e_i}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorModule {
    pub m: FinLenModule,
    pub l: FinLenModule,
    pub module: FinLenModule,
    pub slots: Vec<Slot>,
}

pub fn tor1_module(m: &FinLenModule, l: &FinLenModule) -> TorModule {
    let mut slots = Vec::new();
    let mut divs = Vec::new();
    for (i, &e) in m.divisors.iter().enumerate() {
        for (j, &f) in l.divisors.iter().enumerate() {
            slots.push(Slot { i, j });
            divs.push(e.min(f));
        }
    }
    TorModule { m: m.clone(), l: l.clone(), module: FinLenModule::new(divs), slots }
}

impl TorModule {
    /// The `rank(M) × rank(L)` matrix of `L`-values of a Tor element.
    pub fn to_matrix(&self, r: &UnramRing, c: &[UnramElement]) -> Mat<UnramElement> {
        let mut x = linalg::zeros(r, self.m.rank(), self.l.rank());
        for (k, s) in self.slots.iter().enumerate() {
            let off = hom_offset(self.m.divisors[s.i], self.l.divisors[s.j]);
            x[(s.i, s.j)] = r.mul(&r.p_pow(off), &c[k]);
        }
        x
    }

    pub fn from_matrix(&self, r: &UnramRing, x: &Mat<UnramElement>) -> Result<Vec<UnramElement>> {
        self.slots
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (e, f) = (self.m.divisors[s.i], self.l.divisors[s.j]);
                let v = r.reduce_p_pow(&x[(s.i, s.j)], f);
                let off = hom_offset(e, f);
                let c = r.div_exact(&v, &r.p_pow(off)).ok_or_else(|| Error::Relation("not a Tor element".into()))?;
                Ok(r.reduce_p_pow(&c, self.module.divisors[k]))
            })
            .collect()
    }
}

/// Chain-map lift `Φ1 = diag(p^{-e'})·Φ·diag(p^{e})` of a map between cyclic decompositions.
fn resolution_lift(r: &UnramRing, f: &SemilinearMap) -> Mat<UnramElement> {
    lift_matrix(r, &f.mat, &f.src, &f.tgt)
}

/// [`resolution_lift`] for a bare matrix between two cyclic decompositions.
pub fn lift_matrix(r: &UnramRing, mat: &Mat<UnramElement>, src: &FinLenModule, tgt: &FinLenModule) -> Mat<UnramElement> {
    Mat::from_fn(mat.rows, mat.cols, |k, i| {
        let (ek, ei) = (tgt.divisors[k], src.divisors[i]);
        let x = &mat[(k, i)];
        if ei >= ek {
            r.mul(x, &r.p_pow(ei - ek))
        } else {
            r.div_exact(x, &r.p_pow(ek - ei)).expect("well-defined map")
        }
    })
}

/// The map `Tor(f, g)`; both maps must have the same twist.
pub fn tor1_map(r: &UnramRing, f: &SemilinearMap, g: &SemilinearMap) -> Result<SemilinearMap> {
    if !same_twist(r, f.twist, g.twist) {
        return Err(Error::Mismatch(format!(
            "Tor of semilinear maps needs equal twists, got {} and {}",
            f.twist, g.twist
        )));
    }
    let src = tor1_module(&f.src, &g.src);
    let tgt = tor1_module(&f.tgt, &g.tgt);
    let phi1 = resolution_lift(r, f);
    let gt = g.mat.transpose();
    let mut cols = Vec::with_capacity(src.module.rank());
    for k in 0..src.module.rank() {
        let mut c = vec![r.zero_elem(); src.module.rank()];
        c[k] = r.one_elem();
        let x = src.to_matrix(r, &c);
        let img = mat_mul(r, &mat_mul(r, &phi1, &sigma_mat(r, &x, f.twist)), &gt);
        cols.push(tgt.from_matrix(r, &img)?);
    }
    let mat = Mat::from_cols(tgt.module.rank(), &cols, r.zero_elem());
    Ok(SemilinearMap::raw(r, src.module, tgt.module, f.twist, mat))
}

/// `Tor_1(M, L)` with the diagonal action of two endomorphisms of equal twist.
pub fn tor1(r: &UnramRing, f: &SemilinearMap, g: &SemilinearMap) -> Result<(FinLenModule, SemilinearMap)> {
    if let Some(max) = f.src.divisors.iter().chain(&g.src.divisors).max() {
        if *max > r.precision() {
            return Err(Error::Precision { have: r.precision(), need: *max });
        }
    }
    let t = tor1_map(r, f, g)?;
    Ok((t.src.clone(), t))
}

/// `Hom_W(M, L) = ⊕ W/p^{min(e_i, f_j)}`, basis `p^{max(f_j−e_i,0)}·E_{ji}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomModule {
    pub m: FinLenModule,
    pub l: FinLenModule,
    pub module: FinLenModule,
    pub slots: Vec<Slot>,
}

pub fn hom_module(m: &FinLenModule, l: &FinLenModule) -> HomModule {
    let t = tor1_module(m, l);
    HomModule { m: m.clone(), l: l.clone(), module: t.module, slots: t.slots }
}

impl HomModule {
    /// The `rank(L) × rank(M)` matrix of a homomorphism given in coordinates.
    pub fn to_matrix(&self, r: &UnramRing, c: &[UnramElement]) -> Mat<UnramElement> {
        let mut x = linalg::zeros(r, self.l.rank(), self.m.rank());
        for (k, s) in self.slots.iter().enumerate() {
            let off = hom_offset(self.m.divisors[s.i], self.l.divisors[s.j]);
            x[(s.j, s.i)] = r.mul(&r.p_pow(off), &c[k]);
        }
        x
    }

    pub fn from_matrix(&self, r: &UnramRing, x: &Mat<UnramElement>) -> Result<Vec<UnramElement>> {
        self.slots
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let (e, f) = (self.m.divisors[s.i], self.l.divisors[s.j]);
                let v = r.reduce_p_pow(&x[(s.j, s.i)], f);
                let c = r
                    .div_exact(&v, &r.p_pow(hom_offset(e, f)))
                    .ok_or_else(|| Error::Relation("not a homomorphism".into()))?;
                Ok(r.reduce_p_pow(&c, self.module.divisors[k]))
            })
            .collect()
    }
}

/// `Hom(f, g): X ↦ g∘X∘f` for `f: M′ → M` and `g: L → L′` with opposite twists; the result has the twist of `g`.
pub fn hom_map(r: &UnramRing, f: &SemilinearMap, g: &SemilinearMap) -> Result<SemilinearMap> {
    if !same_twist(r, f.twist, -g.twist) {
        return Err(Error::Mismatch("Hom functoriality needs opposite twists".into()));
    }
    let src = hom_module(&f.tgt, &g.src);
    let tgt = hom_module(&f.src, &g.tgt);
    let mut cols = Vec::with_capacity(src.module.rank());
    for k in 0..src.module.rank() {
        let mut c = vec![r.zero_elem(); src.module.rank()];
        c[k] = r.one_elem();
        let x = src.to_matrix(r, &c);
        let xf = mat_mul(r, &x, &f.mat);
        let img = mat_mul(r, &g.mat, &sigma_mat(r, &xf, g.twist));
        cols.push(tgt.from_matrix(r, &img)?);
    }
    let mat = Mat::from_cols(tgt.module.rank(), &cols, r.zero_elem());
    Ok(SemilinearMap::raw(r, src.module, tgt.module, g.twist, mat))
}

/// `Ext^1_W(M, L) = ⊕_i L/p^{e_i}L`, slot `(i, j)` generated by `l_j` in the `i`-th copy.
pub fn ext1_module(m: &FinLenModule, l: &FinLenModule) -> HomModule {
    hom_module(m, l)
}

/// `Ext(f, g)` for `f: M′ → M`, `g: L → L′` with opposite twists.
pub fn ext1_map(r: &UnramRing, f: &SemilinearMap, g: &SemilinearMap) -> Result<SemilinearMap> {
    if !same_twist(r, f.twist, -g.twist) {
        return Err(Error::Mismatch("Ext functoriality needs opposite twists".into()));
    }
    let src = ext1_module(&f.tgt, &g.src);
    let tgt = ext1_module(&f.src, &g.tgt);
    // Φ1 with d·Φ1 = Φ·d′ on the resolutions
    let phi1 = Mat::from_fn(f.mat.rows, f.mat.cols, |i, k| {
        let (ei, ek) = (f.tgt.divisors[i], f.src.divisors[k]);
        let x = &f.mat[(i, k)];
        if ek >= ei {
            r.mul(x, &r.p_pow(ek - ei))
        } else {
            r.div_exact(x, &r.p_pow(ei - ek)).expect("well-defined map")
        }
    });
    let mut cols = Vec::with_capacity(src.module.rank());
    for s in &src.slots {
        let mut y = linalg::zeros(r, g.src.rank(), f.tgt.rank());
        y[(s.j, s.i)] = r.one_elem();
        let img = mat_mul(r, &g.mat, &sigma_mat(r, &mat_mul(r, &y, &phi1), g.twist));
        let c: Vec<_> = tgt
            .slots
            .iter()
            .enumerate()
            .map(|(t, s2)| r.reduce_p_pow(&img[(s2.j, s2.i)], tgt.module.divisors[t]))
            .collect();
        cols.push(c);
    }
    let mat = Mat::from_cols(tgt.module.rank(), &cols, r.zero_elem());
    Ok(SemilinearMap::raw(r, src.module, tgt.module, g.twist, mat))
}

/// Base change along a σ-equivariant embedding of Galois rings.
pub fn base_change_map(big: &UnramRing, emb: &crate::unram::Embedding, f: &SemilinearMap) -> SemilinearMap {
    SemilinearMap {
        src: f.src.clone(),
        tgt: f.tgt.clone(),
        twist: f.twist,
        mat: f.mat.map(|x| emb.apply(big, x)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> UnramRing {
        UnramRing::new(2, 1, 3).unwrap()
    }

    #[test]
    fn smith_examples() {
        let r = ring();
        let a = Mat { rows: 1, cols: 1, data: vec![r.from_int(2)] };
        assert_eq!(smith_normal_form(&r, &a).1.data, vec![r.from_int(2)]);
        let b = Mat { rows: 2, cols: 2, data: vec![r.from_int(2), r.one_elem(), r.zero_elem(), r.from_int(2)] };
        let (u, d, v) = smith_normal_form(&r, &b);
        assert_eq!(d.data, vec![r.one_elem(), r.zero_elem(), r.zero_elem(), r.from_int(4)]);
        assert_eq!(mat_mul(&r, &mat_mul(&r, &u, &d), &v), b);
        let z = linalg::zeros(&r, 2, 2);
        assert!(linalg::is_zero_mat(&r, &smith_normal_form(&r, &z).1));
    }

    #[test]
    fn multiplication_by_p_on_w_mod_p2() {
        let r = ring();
        let m = FinLenModule::cyclic(2);
        let f = SemilinearMap::scalar(&r, &m, &r.from_int(2), 0);
        assert_eq!(kernel(&r, &f).module, FinLenModule::cyclic(1));
        assert_eq!(image(&r, &f).module, FinLenModule::cyclic(1));
        assert_eq!(cokernel(&r, &f).module, FinLenModule::cyclic(1));
    }

    #[test]
    fn zero_and_invertible_maps() {
        let r = ring();
        let m = FinLenModule::new(vec![1, 3]);
        let z = SemilinearMap::zero(&r, &m, &m, 0);
        assert_eq!(kernel(&r, &z).module.invariants(), m.invariants());
        assert_eq!(cokernel(&r, &z).module.invariants(), m.invariants());
        let id = SemilinearMap::identity(&r, &m);
        assert!(cokernel(&r, &id).module.is_zero());
    }

    #[test]
    fn tor_hom_ext_examples() {
        let r = ring();
        let (w2, w1) = (FinLenModule::cyclic(2), FinLenModule::cyclic(1));
        assert_eq!(tor1_module(&w2, &w1).module, w1);
        assert_eq!(hom_module(&w1, &w1).module, w1);
        assert_eq!(ext1_module(&w2, &w1).module, w1);
        assert_eq!(hom_module(&w1, &w2).module, w1);
        let zero = SemilinearMap::zero(&r, &w1, &w1, 1);
        let (t, f) = tor1(&r, &zero, &zero).unwrap();
        assert_eq!(t, w1);
        assert!(f.is_zero(&r));
    }
}
