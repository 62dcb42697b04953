//! Finitely generated abelian groups with an automorphism standing for the
//! arithmetic Frobenius of `Gal(k̄/F_q)`, and the multiplicative tensor formulas.

use crate::error::{Error, Result};
use crate::linalg::{self, Integers, Mat};
use crate::semilinear::{FinLenModule, SemilinearMap};
use crate::twisted::{find_isomorphism, IsoVerdict};
use crate::unram::UnramRing;
use num_integer::Integer;

/// `⊕ Z/n_i` (with `n_i = 0` meaning `Z`) and the Frobenius action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaModule {
    pub cyclic: Vec<u64>,
    pub frobenius: Mat<i128>,
}

fn divs(m: &GammaModule) -> Vec<i128> {
    m.cyclic.iter().map(|&n| n as i128).collect()
}

fn reduce_entry(x: i128, n: u64) -> i128 {
    if n == 0 {
        x
    } else {
        x.rem_euclid(n as i128)
    }
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `n = p^v·m` with `p ∤ m`.
fn split_prime(n: u64, p: u64) -> (u32, u64) {
    let (mut v, mut m) = (0, n);
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    (v, m)
}

impl GammaModule {
    pub fn new(cyclic: Vec<u64>, frobenius: Mat<i128>) -> Result<Self> {
        let k = cyclic.len();
        if frobenius.rows != k || frobenius.cols != k {
            return Err(Error::Mismatch("Frobenius matrix has the wrong size".into()));
        }
        for i in 0..k {
            for j in 0..k {
                let (ni, nj) = (cyclic[i] as i128, cyclic[j] as i128);
                let x = frobenius[(i, j)];
                // Z/n_j → Z/n_i needs n_i | n_j·x
                let ok = if ni == 0 { nj == 0 || x == 0 } else { (nj * x) % ni == 0 };
                if !ok {
                    return Err(Error::Relation(format!("Frobenius entry ({i},{j}) is not well defined")));
                }
            }
        }
        let frobenius = Mat::from_fn(k, k, |i, j| reduce_entry(frobenius[(i, j)], cyclic[i]));
        let m = GammaModule { cyclic, frobenius };
        let c = linalg::cokernel(&Integers, &divs(&m), &m.frobenius);
        if !c.divs.is_empty() {
            return Err(Error::Relation("Frobenius is not an automorphism".into()));
        }
        Ok(m.normalized())
    }

    /// Drops trivial summands `Z/1`.
    fn normalized(self) -> Self {
        let keep: Vec<usize> = (0..self.cyclic.len()).filter(|&i| self.cyclic[i] != 1).collect();
        GammaModule {
            cyclic: keep.iter().map(|&i| self.cyclic[i]).collect(),
            frobenius: self.frobenius.select_rows(&keep).select_cols(&keep),
        }
    }

    pub fn zero() -> Self {
        GammaModule { cyclic: vec![], frobenius: Mat { rows: 0, cols: 0, data: vec![] } }
    }

    pub fn trivial(cyclic: Vec<u64>) -> Self {
        let k = cyclic.len();
        GammaModule { frobenius: linalg::identity(&Integers, k), cyclic }.normalized()
    }

    /// `Z/n` with Frobenius acting as multiplication by `a`.
    pub fn cyclic_with(n: u64, a: i128) -> Result<Self> {
        GammaModule::new(vec![n], Mat::filled(1, 1, a))
    }

    pub fn is_zero(&self) -> bool {
        self.cyclic.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.cyclic.iter().filter(|&&n| n == 0).count()
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<u128> {
        if !self.is_finite() {
            return None;
        }
        Some(self.cyclic.iter().map(|&n| n as u128).product())
    }

    /// Invariant factors `d_1 | d_2 | …` of the underlying group (zeros last for free parts).
    pub fn invariants(&self) -> Vec<u64> {
        let d = linalg::diag(&Integers, &divs(self));
        let s = linalg::snf(&Integers, &d);
        let mut out: Vec<u64> = s.d.iter().filter(|&&x| x != 1).map(|&x| x as u64).collect();
        out.sort_by_key(|&x| if x == 0 { u64::MAX } else { x });
        out
    }

    /// Smallest `k ≥ 1` with `φ^k = 1`, searched up to `limit`.
    pub fn action_order(&self, limit: u64) -> Option<u64> {
        let id = linalg::identity(&Integers, self.cyclic.len());
        let mut acc = self.frobenius.clone();
        for k in 1..=limit {
            if self.reduce(&acc) == self.reduce(&id) {
                return Some(k);
            }
            acc = linalg::mat_mul(&Integers, &self.frobenius, &acc);
        }
        None
    }

    fn reduce(&self, a: &Mat<i128>) -> Mat<i128> {
        Mat::from_fn(a.rows, a.cols, |i, j| reduce_entry(a[(i, j)], self.cyclic[i]))
    }

    pub fn is_trivial_action(&self) -> bool {
        self.action_order(1).is_some()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.cyclic.len(), other.cyclic.len());
        let mut cyclic = self.cyclic.clone();
        cyclic.extend(&other.cyclic);
        let frobenius = Mat::from_fn(a + b, a + b, |i, j| match (i < a, j < a) {
            (true, true) => self.frobenius[(i, j)],
            (false, false) => other.frobenius[(i - a, j - a)],
            _ => 0,
        });
        GammaModule { cyclic, frobenius }
    }

    /// The restriction to a Frobenius-stable subgroup.
    fn restrict(&self, sub: &linalg::SubModule<i128>) -> GammaModule {
        let amb = divs(self);
        let cols: Vec<Vec<i128>> = (0..sub.len())
            .map(|k| {
                let img = linalg::mat_vec(&Integers, &self.frobenius, &sub.incl.col(k));
                sub.coords(&Integers, &amb, &img).expect("stable subgroup")
            })
            .collect();
        let cyclic: Vec<u64> = sub.divs.iter().map(|&d| d as u64).collect();
        let frob = Mat::from_cols(cyclic.len(), &cols, 0);
        GammaModule { frobenius: Mat::from_fn(frob.rows, frob.cols, |i, j| reduce_entry(frob[(i, j)], cyclic[i])), cyclic }
    }

    fn image_of_scalar(&self, c: u64) -> GammaModule {
        let a = linalg::mat_scale(&Integers, &(c as i128), &linalg::identity(&Integers, self.cyclic.len()));
        self.restrict(&linalg::image(&Integers, &divs(self), &a))
    }

    /// The torsion subgroup.
    pub fn torsion(&self) -> GammaModule {
        let e = self.cyclic.iter().filter(|&&n| n != 0).fold(1u64, |acc, &n| acc.lcm(&n));
        let a = linalg::mat_scale(&Integers, &(e as i128), &linalg::identity(&Integers, self.cyclic.len()));
        let d = divs(self);
        self.restrict(&linalg::kernel(&Integers, &d, &d, &a))
    }

    /// The `ℓ`-primary part of the torsion.
    pub fn primary_part(&self, l: u64) -> GammaModule {
        let t = self.torsion();
        let c = t.cyclic.iter().fold(1u64, |acc, &n| acc.lcm(&split_prime(n, l).1));
        t.image_of_scalar(c)
    }

    /// The prime-to-`p` part of the torsion.
    pub fn prime_to(&self, p: u64) -> GammaModule {
        let t = self.torsion();
        let v = t.cyclic.iter().map(|&n| split_prime(n, p).0).max().unwrap_or(0);
        t.image_of_scalar(p.pow(v))
    }

    fn torsion_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.cyclic.iter().filter(|&&n| n > 1).flat_map(|&n| prime_factors(n)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// The inverse of the Frobenius matrix.
    pub fn frobenius_inverse(&self) -> Mat<i128> {
        let d = divs(self);
        let k = self.cyclic.len();
        let cols: Vec<Vec<i128>> = (0..k)
            .map(|j| {
                let mut e = vec![0i128; k];
                e[j] = 1;
                let x = linalg::solve_mod(&Integers, &self.frobenius, &d, &e).expect("automorphism");
                x.iter().zip(&self.cyclic).map(|(&v, &n)| reduce_entry(v, n)).collect()
            })
            .collect();
        Mat::from_cols(k, &cols, 0)
    }

    /// Isomorphism of Γ-modules. Free parts are compared only when their actions agree literally.
    pub fn is_isomorphic(&self, other: &GammaModule) -> Result<IsoVerdict> {
        if self.invariants() != other.invariants() {
            return Ok(IsoVerdict::NotIsomorphic);
        }
        if self.rank() > 0 {
            return Ok(if self == other { IsoVerdict::Isomorphic(Mat { rows: 0, cols: 0, data: vec![] }) } else { IsoVerdict::Undecided });
        }
        for l in self.torsion_primes() {
            let (a, b) = (self.primary_part(l), other.primary_part(l));
            let (ra, ma, fa) = a.as_chain_module(l)?;
            let (_, mb, fb) = b.as_chain_module(l)?;
            match find_isomorphism(&ra, &ma, &[fa], &mb, &[fb])? {
                IsoVerdict::Isomorphic(_) => {}
                v => return Ok(v),
            }
        }
        Ok(IsoVerdict::Isomorphic(Mat { rows: 0, cols: 0, data: vec![] }))
    }

    /// An `ℓ`-primary finite module as a module over `Z/ℓ^K`.
    fn as_chain_module(&self, l: u64) -> Result<(UnramRing, FinLenModule, SemilinearMap)> {
        let exps: Vec<u32> = self.cyclic.iter().map(|&n| split_prime(n, l).0).collect();
        let k = exps.iter().copied().max().unwrap_or(1).max(1);
        let r = UnramRing::new(l, 1, k)?;
        let m = FinLenModule::new(exps);
        let mat = self.frobenius.map(|&x| r.from_int(x.rem_euclid(l.pow(k) as i128) as i64));
        let f = SemilinearMap::new(&r, m.clone(), m.clone(), 0, mat)?;
        Ok((r, m, f))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "cyclic": self.cyclic,
            "frobenius": (0..self.frobenius.rows).map(|i| self.frobenius.row(i)).collect::<Vec<_>>(),
        })
    }
}

/// `Tor_1^Z(M1, M2)` with the diagonal action; slot `(i, j)` is `Z/gcd(a_i, b_j)` generated by `b_j/g` in the `i`-th copy of `M2`.
pub fn tor_diag(m1: &GammaModule, m2: &GammaModule) -> GammaModule {
    let mut slots = Vec::new();
    for (i, &a) in m1.cyclic.iter().enumerate() {
        for (j, &b) in m2.cyclic.iter().enumerate() {
            if a != 0 && b != 0 && a.gcd(&b) > 1 {
                slots.push((i, j, a.gcd(&b)));
            }
        }
    }
    let n = slots.len();
    let mut mat = Mat::filled(n, n, 0i128);
    for (c, &(i, j, _)) in slots.iter().enumerate() {
        let b = m2.cyclic[j];
        let gen = (b / slots[c].2) as i128;
        for (row, &(k, l, g)) in slots.iter().enumerate() {
            // Φ1_ki = Φ_ki·a_i/a_k, then the L-value of slot (k, l) divided by b_l/g
            let (ai, ak) = (m1.cyclic[i] as i128, m1.cyclic[k] as i128);
            let phi1 = m1.frobenius[(k, i)] * ai / ak;
            let val = (phi1 * gen * m2.frobenius[(l, j)]).rem_euclid(m2.cyclic[l] as i128);
            let unit = (m2.cyclic[l] / g) as i128;
            mat[(row, c)] = (val / unit).rem_euclid(g as i128);
        }
    }
    GammaModule { cyclic: slots.iter().map(|s| s.2).collect(), frobenius: mat }
}

/// `M1 ⊗_Z M2` with the diagonal action; slot `(i, j)` is `Z/gcd(a_i, b_j)` generated by `e_i ⊗ f_j`.
pub fn tensor_diag(m1: &GammaModule, m2: &GammaModule) -> GammaModule {
    let mut slots = Vec::new();
    for (i, &a) in m1.cyclic.iter().enumerate() {
        for (j, &b) in m2.cyclic.iter().enumerate() {
            let g = a.gcd(&b);
            if g != 1 {
                slots.push((i, j, g));
            }
        }
    }
    let n = slots.len();
    let mat = Mat::from_fn(n, n, |row, c| {
        let ((k, l, g), (i, j, _)) = (slots[row], slots[c]);
        reduce_entry(m1.frobenius[(k, i)] * m2.frobenius[(l, j)], g)
    });
    GammaModule { cyclic: slots.iter().map(|s| s.2).collect(), frobenius: mat }
}

/// `Z[1/p] ⊗ M`: the `p`-primary torsion is killed, free summands are kept as they are.
pub fn invert_p(m: &GammaModule, p: u64) -> GammaModule {
    let v = m.cyclic.iter().filter(|&&n| n != 0).map(|&n| split_prime(n, p).0).max().unwrap_or(0);
    m.image_of_scalar(p.pow(v))
}

/// `Hom(A, B)` with `γ·f = φ_B ∘ f ∘ φ_A⁻¹`.
pub fn hom_conj(a: &GammaModule, b: &GammaModule) -> GammaModule {
    // slot (j, i): X_ji ∈ (b_j/g)·Z/b_j ≅ Z/g
    let mut slots = Vec::new();
    for (i, &ai) in a.cyclic.iter().enumerate() {
        for (j, &bj) in b.cyclic.iter().enumerate() {
            if bj == 0 && ai != 0 {
                continue;
            }
            let g = ai.gcd(&bj);
            if g != 1 {
                slots.push((i, j, g));
            }
        }
    }
    let unit = |bj: u64, g: u64| if g == 0 { 1i128 } else { (bj / g) as i128 };
    let inv = a.frobenius_inverse();
    let n = slots.len();
    let mut mat = Mat::filled(n, n, 0i128);
    for (c, &(i, j, g)) in slots.iter().enumerate() {
        // X = unit·E_ji, image φ_B·X·φ_A⁻¹
        let u = unit(b.cyclic[j], g);
        for (row, &(k, l, h)) in slots.iter().enumerate() {
            let mut val = b.frobenius[(l, j)] * u * inv[(i, k)];
            val = reduce_entry(val, b.cyclic[l]);
            let uu = unit(b.cyclic[l], h);
            mat[(row, c)] = reduce_entry(val / uu, h);
        }
    }
    GammaModule { cyclic: slots.iter().map(|s| s.2).collect(), frobenius: mat }
}

/// Components of a multiplicative group: its prime-to-`p` torsion (the whole torsion in characteristic 0).
pub fn pi0_mult(m: &GammaModule, p: Option<u64>) -> GammaModule {
    match p {
        Some(p) => m.prime_to(p),
        None => m.torsion(),
    }
}

/// Multiplicative part of `G1 ⊗ G2` from `π̂₀(G1)(k̄)` and the character module of `G2`.
pub fn mult_tensor(pi0: &GammaModule, m2: &GammaModule) -> GammaModule {
    hom_conj(pi0, m2)
}

/// `μ_n(k̄)` over `F_q`: Frobenius acts by `q`.
pub fn roots_of_unity(n: u64, q: u64) -> GammaModule {
    if n == 1 {
        return GammaModule::zero();
    }
    GammaModule { cyclic: vec![n], frobenius: Mat::filled(1, 1, (q % n.max(1)) as i128) }
}

/// `π̂₀(G)(k̄) = Hom(M', k̄^×)` over `F_q`, `M'` the prime-to-`p` torsion of the character module.
pub fn pi0_points(m: &GammaModule, p: u64, q: u64) -> GammaModule {
    let tors = m.prime_to(p);
    let e = tors.invariants().last().copied().unwrap_or(1);
    hom_conj(&tors, &roots_of_unity(e, q))
}

/// Character module of the tensor of two multiplicative groups over `F_q`:
/// `Hom(π̂₀(G1)(k̄), M2)`. As an abelian group this is `Z[1/p] ⊗ (M1 ∗ M2)`; the Galois
/// action carries the inverse cyclotomic twist coming from `k̄^×`.
pub fn mult_mult_tensor(m1: &GammaModule, m2: &GammaModule, p: u64, q: u64) -> GammaModule {
    hom_conj(&pi0_points(m1, p, q), m2)
}

/// Invariant factors of `ker(φ − 1)`.
pub fn fixed_points(m: &GammaModule) -> Vec<u64> {
    let k = m.cyclic.len();
    let a = linalg::mat_sub(&Integers, &m.frobenius, &linalg::identity(&Integers, k));
    let d = divs(m);
    let sub = linalg::kernel(&Integers, &d, &d, &a);
    GammaModule { cyclic: sub.divs.iter().map(|&x| x as u64).collect(), frobenius: linalg::identity(&Integers, sub.len()) }
        .invariants()
}

/// A finite `Z/p^N`-module `⊕ Z/p^{e_i}` with an additive automorphism, as a Γ-module.
pub fn from_chain_group(p: u64, exps: &[u32], frob: &Mat<u64>) -> GammaModule {
    let cyclic: Vec<u64> = exps.iter().map(|&e| p.pow(e)).collect();
    let frobenius = Mat::from_fn(frob.rows, frob.cols, |i, j| (frob[(i, j)] as i128).rem_euclid(cyclic[i] as i128));
    GammaModule { cyclic, frobenius }.normalized()
}
