//! Finite-length Dieudonné modules: a module with `F` (σ-semilinear) and `V`
//! (σ⁻¹-semilinear) satisfying `FV = VF = p`.
//!
//! Catalog matrices are written in the Teichmüller basis of `W_m(k)`, so
//! dumps are byte-stable.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::semilinear::{self as sl, same_twist, FinLenModule, SemilinearMap};
use crate::twisted::{find_isomorphism, IsoVerdict};
use crate::unram::{UnramElement, UnramRing};

#[derive(Clone, Debug, PartialEq)]
pub struct DieudonneModule {
    pub ring: UnramRing,
    pub module: FinLenModule,
    pub f: SemilinearMap,
    pub v: SemilinearMap,
}

fn check_precision(r: &UnramRing, need: u32) -> Result<()> {
    if need > r.precision() {
        return Err(Error::Precision { have: r.precision(), need });
    }
    Ok(())
}

impl DieudonneModule {
    /// Builds the module from matrices; only well-definedness is checked, see [`validate`](Self::validate).
    pub fn new(r: &UnramRing, module: FinLenModule, f: Mat<UnramElement>, v: Mat<UnramElement>) -> Result<Self> {
        check_precision(r, module.exponent())?;
        let f = SemilinearMap::new(r, module.clone(), module.clone(), 1, f)?;
        let v = SemilinearMap::new(r, module.clone(), module.clone(), -1, v)?;
        Ok(DieudonneModule { ring: r.clone(), module, f, v })
    }

    pub fn zero(r: &UnramRing) -> Self {
        let m = FinLenModule::zero();
        DieudonneModule {
            ring: r.clone(),
            f: SemilinearMap::zero(r, &m, &m, 1),
            v: SemilinearMap::zero(r, &m, &m, -1),
            module: m,
        }
    }

    fn from_maps(r: &UnramRing, f: SemilinearMap, v: SemilinearMap) -> Self {
        DieudonneModule { ring: r.clone(), module: f.src.clone(), f, v }
    }

    pub fn is_zero(&self) -> bool {
        self.module.is_zero()
    }

    /// Length over `W(k)`.
    pub fn length(&self) -> u32 {
        self.module.length()
    }

    /// Checks `FV = VF = p` and the twists; reports the first failure.
    pub fn validate(&self) -> Result<()> {
        let r = &self.ring;
        if !same_twist(r, self.f.twist, 1) {
            return Err(Error::Relation(format!("F has twist {} instead of 1", self.f.twist)));
        }
        if !same_twist(r, self.v.twist, -1) {
            return Err(Error::Relation(format!("V has twist {} instead of -1", self.v.twist)));
        }
        let p = SemilinearMap::scalar(r, &self.module, &r.p_pow(1), 0);
        if !self.f.compose(r, &self.v)?.same_as(r, &p) {
            return Err(Error::Relation("FV != p".into()));
        }
        if !self.v.compose(r, &self.f)?.same_as(r, &p) {
            return Err(Error::Relation("VF != p".into()));
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let r = &self.ring;
        let m = self.module.direct_sum(&other.module);
        let block = |a: &Mat<UnramElement>, b: &Mat<UnramElement>| {
            let (n1, n2) = (a.rows, b.rows);
            Mat::from_fn(n1 + n2, n1 + n2, |i, j| match (i < n1, j < n1) {
                (true, true) => a[(i, j)].clone(),
                (false, false) => b[(i - n1, j - n1)].clone(),
                _ => r.zero_elem(),
            })
        };
        DieudonneModule {
            ring: r.clone(),
            f: SemilinearMap { src: m.clone(), tgt: m.clone(), twist: 1, mat: block(&self.f.mat, &other.f.mat) },
            v: SemilinearMap { src: m.clone(), tgt: m.clone(), twist: -1, mat: block(&self.v.mat, &other.v.mat) },
            module: m,
        }
    }

    /// `F` bijective.
    pub fn is_f_etale(&self) -> bool {
        sl::cokernel(&self.ring, &self.f).module.is_zero()
    }

    /// `V` nilpotent.
    pub fn is_unipotent(&self) -> bool {
        self.v.pow(&self.ring, self.length()).map(|m| m.is_zero(&self.ring)).unwrap_or(false)
    }

    pub fn is_f_nilpotent(&self) -> bool {
        self.f.pow(&self.ring, self.length()).map(|m| m.is_zero(&self.ring)).unwrap_or(false)
    }

    pub fn is_v_bijective(&self) -> bool {
        sl::cokernel(&self.ring, &self.v).module.is_zero()
    }

    /// Restriction to a submodule stable under both operators.
    fn restrict_to(&self, sub: &sl::Sub) -> Result<DieudonneModule> {
        let r = &self.ring;
        Ok(DieudonneModule::from_maps(r, sub.restrict_endo(r, &self.f)?, sub.restrict_endo(r, &self.v)?))
    }

    /// Splits along powers of `op`: (image of `op^L`, kernel of `op^L`) for `L` = length.
    fn fitting(&self, op: &SemilinearMap) -> Result<(DieudonneModule, DieudonneModule)> {
        let r = &self.ring;
        if self.is_zero() {
            return Ok((self.clone(), self.clone()));
        }
        let big = op.pow(r, self.length())?;
        let bij = self.restrict_to(&sl::image(r, &big))?;
        let nil = self.restrict_to(&sl::kernel(r, &big))?;
        Ok((bij, nil))
    }

    /// (étale, connected): `F` bijective on the first part and nilpotent on the second.
    pub fn fitting_split_f(&self) -> Result<(DieudonneModule, DieudonneModule)> {
        self.fitting(&self.f)
    }

    /// (multiplicative, unipotent): `V` bijective on the first part and nilpotent on the second.
    pub fn fitting_split_v(&self) -> Result<(DieudonneModule, DieudonneModule)> {
        self.fitting(&self.v)
    }

    /// `Hom_W(M, CW(k))` with `F(α) = φ∘α∘V` and `V(α) = φ⁻¹∘α∘F`, in the dual basis.
    pub fn matlis_dual(&self) -> DieudonneModule {
        let r = &self.ring;
        let e = &self.module.divisors;
        let n = e.len();
        // [I(F)]_{ji} = σ(V_ij)·p^{e_j−e_i}, and dually for V
        let dual = |a: &Mat<UnramElement>, t: i64| {
            Mat::from_fn(n, n, |j, i| {
                let x = r.sigma_pow(&a[(i, j)], t);
                if e[j] >= e[i] {
                    r.mul(&x, &r.p_pow(e[j] - e[i]))
                } else {
                    r.div_p_pow(&r.reduce_p_pow(&x, r.precision()), e[i] - e[j])
                }
            })
        };
        let f = dual(&self.v.mat, 1);
        let v = dual(&self.f.mat, -1);
        DieudonneModule::new(r, self.module.clone(), f, v).expect("dual of a well-defined module")
    }

    /// Cartier duality of finite group schemes, realised through Matlis duality.
    pub fn cartier_dual(&self) -> DieudonneModule {
        self.matlis_dual()
    }

    /// Extension of scalars to `W(F_{q^m})`.
    pub fn base_change(&self, m: usize) -> Result<DieudonneModule> {
        if m == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let r = &self.ring;
        let big = UnramRing::new(r.p(), r.degree() * m, r.precision())?;
        let emb = r.embedding_into(&big)?;
        Ok(DieudonneModule {
            f: sl::base_change_map(&big, &emb, &self.f),
            v: sl::base_change_map(&big, &emb, &self.v),
            module: self.module.clone(),
            ring: big,
        })
    }

    /// Same ring, precision changed (divisors must fit).
    pub fn with_ring(&self, r: &UnramRing) -> Result<DieudonneModule> {
        if r.p() != self.ring.p() || r.degree() != self.ring.degree() {
            return Err(Error::Mismatch("rings differ in residue field".into()));
        }
        DieudonneModule::new(r, self.module.clone(), self.f.mat.clone(), self.v.mat.clone())
    }

    pub fn is_isomorphic(&self, other: &DieudonneModule) -> Result<IsoVerdict> {
        if self.ring != other.ring {
            return Err(Error::Mismatch("modules over different rings".into()));
        }
        find_isomorphism(
            &self.ring,
            &self.module,
            &[self.f.clone(), self.v.clone()],
            &other.module,
            &[other.f.clone(), other.v.clone()],
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "divisors": self.module.divisors,
            "F": self.f.to_json(),
            "V": self.v.to_json(),
        })
    }
}

/// `Tor_1^W` of the underlying modules with the diagonal `F`.
pub fn star(a: &DieudonneModule, b: &DieudonneModule) -> Result<(FinLenModule, SemilinearMap)> {
    if a.ring != b.ring {
        return Err(Error::Mismatch("modules over different rings".into()));
    }
    sl::tor1(&a.ring, &a.f, &b.f)
}

fn cyclic_scalar(r: &UnramRing, e: u32, f_pow: u32, v_pow: u32) -> Result<DieudonneModule> {
    check_precision(r, e)?;
    if e == 0 {
        return Ok(DieudonneModule::zero(r));
    }
    let m = FinLenModule::cyclic(e);
    let one = |k: u32| Mat::filled(1, 1, r.p_pow(k));
    DieudonneModule::new(r, m, one(f_pow), one(v_pow))
}

/// `D(α_{p^r}) = k[F]/(F^r)`, `V = 0`.
pub fn d_alpha(r: &UnramRing, n: usize) -> Result<DieudonneModule> {
    if n == 0 {
        return Ok(DieudonneModule::zero(r));
    }
    let f = Mat::from_fn(n, n, |i, j| if i == j + 1 { r.one_elem() } else { r.zero_elem() });
    DieudonneModule::new(r, FinLenModule::new(vec![1; n]), f, linalg::zeros(r, n, n))
}

/// `D(Z/p^m) = W_m(k)`, `F = σ`, `V = pσ⁻¹`.
pub fn d_const(r: &UnramRing, m: u32) -> Result<DieudonneModule> {
    cyclic_scalar(r, m, 0, 1)
}

/// `D(μ_{p^m}) = W_m(k)`, `F = pσ`, `V = σ⁻¹`.
pub fn d_mu(r: &UnramRing, m: u32) -> Result<DieudonneModule> {
    cyclic_scalar(r, m, 1, 0)
}

/// `D(W_m[F^n]) = R/(R·V^m + R·F^n)` on the basis `1, F, …, F^{n−1}, V, …, V^{m−1}`.
pub fn d_wittker(r: &UnramRing, m: u32, n: u32) -> Result<DieudonneModule> {
    if m == 0 || n == 0 {
        return Ok(DieudonneModule::zero(r));
    }
    check_precision(r, m.min(n))?;
    #[derive(Clone, Copy, PartialEq)]
    enum B {
        F(u32),
        V(u32),
    }
    let mut basis = vec![B::F(0)];
    basis.extend((1..n).map(B::F));
    basis.extend((1..m).map(B::V));
    let order = |b: B| match b {
        B::F(j) => m.min(n - j),
        B::V(i) => (m - i).min(n),
    };
    let divs: Vec<u32> = basis.iter().map(|&b| order(b)).collect();
    let idx = |b: B| basis.iter().position(|&c| c == b);
    let k = basis.len();
    let mut f = linalg::zeros(r, k, k);
    let mut v = linalg::zeros(r, k, k);
    // column c holds the image of basis element c, written as (scalar, target)
    let put = |mat: &mut Mat<UnramElement>, c: usize, tgt: Option<B>, pk: u32| {
        if let Some(i) = tgt.and_then(idx) {
            mat[(i, c)] = r.p_pow(pk);
        }
    };
    for (c, &b) in basis.iter().enumerate() {
        match b {
            B::F(j) => {
                put(&mut f, c, (j + 1 < n).then_some(B::F(j + 1)), 0);
                match j {
                    0 => put(&mut v, c, (m > 1).then_some(B::V(1)), 0),
                    1 => put(&mut v, c, Some(B::F(0)), 1),
                    _ => put(&mut v, c, Some(B::F(j - 1)), 1),
                }
            }
            B::V(i) => {
                put(&mut v, c, (i + 1 < m).then_some(B::V(i + 1)), 0);
                put(&mut f, c, Some(if i == 1 { B::F(0) } else { B::V(i - 1) }), 1);
            }
        }
    }
    DieudonneModule::new(r, FinLenModule::new(divs), f, v)
}

/// Covariant module of the étale formal group `Z/p^m`: `F = σ`, `V = pσ⁻¹`.
pub fn cov_const(r: &UnramRing, m: u32) -> Result<DieudonneModule> {
    cyclic_scalar(r, m, 0, 1)
}

/// Covariant module of `μ_{p^m}`: `F = pσ`, `V = σ⁻¹`.
pub fn cov_mu(r: &UnramRing, m: u32) -> Result<DieudonneModule> {
    cyclic_scalar(r, m, 1, 0)
}

/// Covariant module of `W_m[F^n]`, cut out of the co-Witt model `∏_{j≥1} W_j(k)` modulo `F^n`
/// as the kernel of `V^m`. Slot `j` holds `p^{lo_j}W/p^{hi_j}W` with
/// `F(a)_j = p·σ(a_{j−1})` and `V(a)_j = σ⁻¹(a_{j+1})`.
pub fn cov_wittker(r: &UnramRing, m: u32, n: u32) -> Result<DieudonneModule> {
    if m == 0 || n == 0 {
        return Ok(DieudonneModule::zero(r));
    }
    check_precision(r, n)?;
    let slots: Vec<(u32, u32)> = (1..m + n)
        .map(|j| (j.saturating_sub(m).min(n), j.min(n)))
        .filter(|(lo, hi)| hi > lo)
        .collect();
    let js: Vec<u32> = (1..m + n).filter(|&j| j.min(n) > j.saturating_sub(m).min(n)).collect();
    let k = slots.len();
    let divs: Vec<u32> = slots.iter().map(|(lo, hi)| hi - lo).collect();
    let mut f = linalg::zeros(r, k, k);
    let mut v = linalg::zeros(r, k, k);
    for (c, &j) in js.iter().enumerate() {
        let lo = slots[c].0;
        if let Some(t) = js.iter().position(|&x| x == j + 1) {
            // p·p^{lo_j} = p^{1 + lo_j − lo_{j+1}}·g_{j+1}
            f[(t, c)] = r.p_pow(1 + lo - slots[t].0);
        }
        if let Some(t) = js.iter().position(|&x| x + 1 == j) {
            v[(t, c)] = r.p_pow(lo - slots[t].0);
        }
    }
    DieudonneModule::new(r, FinLenModule::new(divs), f, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> UnramRing {
        UnramRing::new(2, 1, 4).unwrap()
    }

    #[test]
    fn catalog_validates() {
        let r = UnramRing::new(2, 2, 3).unwrap();
        for m in 0..=3 {
            d_const(&r, m).unwrap().validate().unwrap();
            d_mu(&r, m).unwrap().validate().unwrap();
        }
        for n in 0..=3 {
            d_alpha(&r, n).unwrap().validate().unwrap();
        }
        for m in 1..=3 {
            for n in 1..=3 {
                let d = d_wittker(&r, m, n).unwrap();
                d.validate().unwrap();
                assert_eq!(d.length(), m * n);
                let c = cov_wittker(&r, m, n).unwrap();
                c.validate().unwrap();
                assert_eq!(c.length(), m * n);
            }
        }
    }

    #[test]
    fn frobenius_times_inverse_is_not_p() {
        let r = f2();
        let k = FinLenModule::cyclic(1);
        let bad = DieudonneModule {
            ring: r.clone(),
            f: SemilinearMap::scalar(&r, &k, &r.one_elem(), 1),
            v: SemilinearMap::scalar(&r, &k, &r.one_elem(), -1),
            module: k,
        };
        assert!(matches!(bad.validate(), Err(Error::Relation(s)) if s == "FV != p"));
    }

    #[test]
    fn wittker_one_one_is_alpha() {
        let r = f2();
        assert_eq!(d_wittker(&r, 1, 1).unwrap(), d_alpha(&r, 1).unwrap());
    }

    #[test]
    fn fitting_splits() {
        let r = f2();
        let (et, conn) = d_alpha(&r, 1).unwrap().fitting_split_f().unwrap();
        assert!(et.is_zero() && conn.length() == 1);
        let (et, conn) = d_const(&r, 1).unwrap().fitting_split_f().unwrap();
        assert!(et.length() == 1 && conn.is_zero());
        let mixed = d_const(&r, 1).unwrap().direct_sum(&d_alpha(&r, 2).unwrap());
        let (et, conn) = mixed.fitting_split_f().unwrap();
        assert!(et.is_isomorphic(&d_const(&r, 1).unwrap()).unwrap().is_iso());
        assert!(conn.is_isomorphic(&d_alpha(&r, 2).unwrap()).unwrap().is_iso());
        let (mult, uni) = d_const(&r, 2).unwrap().fitting_split_v().unwrap();
        assert!(mult.is_zero() && uni.length() == 2);
    }

    #[test]
    fn matlis_examples() {
        let r = UnramRing::new(3, 2, 3).unwrap();
        assert_eq!(d_alpha(&r, 1).unwrap().matlis_dual(), d_alpha(&r, 1).unwrap());
        for m in 1..=3 {
            assert_eq!(d_const(&r, m).unwrap().matlis_dual(), d_mu(&r, m).unwrap());
        }
        for (m, n) in [(1, 2), (2, 1), (2, 2), (2, 3)] {
            let d = d_wittker(&r, m, n).unwrap();
            let dd = d.matlis_dual().matlis_dual();
            assert!(dd.is_isomorphic(&d).unwrap().is_iso());
            let cov = cov_wittker(&r, n, m).unwrap();
            assert!(d.cartier_dual().is_isomorphic(&cov).unwrap().is_iso(), "({m},{n})");
        }
    }

    #[test]
    fn star_of_small_modules() {
        let r = f2();
        let (m, f) = star(&d_alpha(&r, 1).unwrap(), &d_alpha(&r, 1).unwrap()).unwrap();
        assert_eq!(m, FinLenModule::cyclic(1));
        assert!(f.is_zero(&r));
        let (m, f) = star(&d_const(&r, 1).unwrap(), &d_const(&r, 1).unwrap()).unwrap();
        assert_eq!(m, FinLenModule::cyclic(1));
        assert!(sl::cokernel(&r, &f).module.is_zero());
        let (m, _) = star(&d_const(&r, 2).unwrap(), &DieudonneModule::zero(&r)).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn base_change_keeps_divisors() {
        let r = UnramRing::new(2, 1, 2).unwrap();
        let d = d_const(&r, 2).unwrap();
        let b = d.base_change(3).unwrap();
        assert_eq!(b.module, d.module);
        assert_eq!(b.ring.degree(), 3);
        b.validate().unwrap();
        assert!(b.is_f_etale());
        assert_eq!(d.base_change(1).unwrap(), d);
    }
}
