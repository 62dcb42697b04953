//! The pairing polynomials `P_n` of the universal bilinear map on truncated Witt Hopf algebras.
//!
//! `O(W^n) = ℤ[x_0..x_{n-1}]` with coaddition from the Witt sum polynomials. The tensor
//! product of two copies (as Hopf algebras with Verschiebung lift) is polynomial on the
//! bilinear symbols `x_ij = x_i ⊠ y_j`, and any `x^I ⊠ y^J` reduces to a polynomial in them
//! through
//!
//! * `(ab) ⊠ z = Σ (a ⊠ z') (b ⊠ z'')`,
//! * `a ⊠ (zw) = Σ (a' ⊠ z) (a'' ⊠ w)`,
//! * `1 ⊠ z = ε(z)`, `a ⊠ 1 = ε(a)`.
//!
//! The universal map sends the ghost polynomial `w_m` to `(w_m ⊠ w_m) / p^m`; its values on
//! the coordinates are recovered by Dwork lifting with the Frobenius lift `x_ij ↦ x_ij^p`.

use crate::error::{Error, Result};
use crate::poly::{render, Poly};
use crate::witt::{self, PolyFrobenius};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Default cap on the number of pairing polynomials.
pub const DEFAULT_MAX_LEN: usize = 3;
/// Default guard on the total number of memoized terms during reduction.
pub const DEFAULT_TERM_LIMIT: usize = 2_000_000;

/// Comultiplication of `ℤ[x_0..x_{n-1}]`: `Δ(x_m)` as a polynomial in `2n` variables,
/// the left tensor factor first.
#[derive(Clone, Debug)]
pub struct Coaddition {
    pub p: u64,
    pub n: usize,
    pub images: Vec<Poly>,
}

/// `Δ(x_m) = S_m(x ⊗ 1, 1 ⊗ x)` for `m < n`.
pub fn witt_coaddition(p: u64, n: usize) -> Result<Coaddition> {
    let sums = witt::universal_sum_polys(p, n)?;
    let mut map = vec![0usize; witt::NVARS];
    for i in 0..witt::MAX_LEN {
        // universal variables beyond the truncation never occur in S_0..S_{n-1}
        map[i] = i.min(n.saturating_sub(1));
        map[witt::MAX_LEN + i] = n + i.min(n.saturating_sub(1));
    }
    let images = sums.iter().map(|s| s.rename(2 * n, &map)).collect();
    Ok(Coaddition { p, n, images })
}

impl Coaddition {
    /// `Δ(x^I)` as a list of `(left exponents, right exponents, coefficient)`.
    pub fn delta_monomial(&self, exps: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, BigInt)> {
        let n = self.n;
        let mut prod = Poly::one(2 * n);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                prod = prod.mul(&self.images[i].pow(e));
            }
        }
        prod.sorted_terms().into_iter().map(|(e, c)| (e[..n].to_vec(), e[n..].to_vec(), c)).collect()
    }

    /// The counit: `1` on the constant monomial, `0` elsewhere.
    pub fn counit(exps: &[u32]) -> BigInt {
        if exps.iter().all(|&e| e == 0) {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    }
}

/// Which factor of a bilinear symbol gets split first when both have degree at least two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitOrder {
    LeftFirst,
    RightFirst,
}

/// Memoizing normal-form engine for `x^I ⊠ y^J` with both factors in `ℤ[x_0..x_{n-1}]`.
///
/// Results live in `n²` variables, `x_ij` at index `i·n + j`.
pub struct BoxReducer {
    coad: Coaddition,
    deltas: HashMap<Vec<u32>, Vec<(Vec<u32>, Vec<u32>, BigInt)>>,
    memo: HashMap<(Vec<u32>, Vec<u32>, SplitOrder), Poly>,
    terms: usize,
    term_limit: usize,
}

impl BoxReducer {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        Self::with_limit(p, n, DEFAULT_TERM_LIMIT)
    }

    pub fn with_limit(p: u64, n: usize, term_limit: usize) -> Result<Self> {
        if n == 0 || n * n > 32 {
            return Err(Error::InvalidArgument(format!("truncation {n} outside 1..=5")));
        }
        Ok(BoxReducer {
            coad: witt_coaddition(p, n)?,
            deltas: HashMap::new(),
            memo: HashMap::new(),
            terms: 0,
            term_limit,
        })
    }

    pub fn p(&self) -> u64 {
        self.coad.p
    }

    pub fn len(&self) -> usize {
        self.coad.n
    }

    pub fn is_empty(&self) -> bool {
        self.coad.n == 0
    }

    pub fn nvars(&self) -> usize {
        self.coad.n * self.coad.n
    }

    /// The generator `x_ij`.
    pub fn generator(&self, i: usize, j: usize) -> Poly {
        Poly::var(self.nvars(), i * self.coad.n + j)
    }

    fn delta(&mut self, exps: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, BigInt)> {
        if let Some(d) = self.deltas.get(exps) {
            return d.clone();
        }
        let d = self.coad.delta_monomial(exps);
        self.deltas.insert(exps.to_vec(), d.clone());
        d
    }

    /// Normal form of `x^left ⊠ y^right`.
    pub fn reduce(&mut self, left: &[u32], right: &[u32], order: SplitOrder) -> Result<Poly> {
        let n = self.coad.n;
        if left.len() != n || right.len() != n {
            return Err(Error::InvalidArgument(format!("exponent vectors must have length {n}")));
        }
        let key = (left.to_vec(), right.to_vec(), order);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let nv = self.nvars();
        let dl: u32 = left.iter().sum();
        let dr: u32 = right.iter().sum();
        let out = if dl == 0 {
            Poly::constant(nv, Coaddition::counit(right))
        } else if dr == 0 {
            Poly::constant(nv, Coaddition::counit(left))
        } else if dl == 1 && dr == 1 {
            let i = left.iter().position(|&e| e == 1).unwrap();
            let j = right.iter().position(|&e| e == 1).unwrap();
            self.generator(i, j)
        } else {
            let split_left = match order {
                SplitOrder::LeftFirst => dl >= 2,
                SplitOrder::RightFirst => dr < 2,
            };
            if split_left {
                self.split(left, right, order, false)?
            } else {
                self.split(right, left, order, true)?
            }
        };
        self.terms += out.len();
        if self.terms > self.term_limit {
            return Err(Error::TooLarge { what: "bilinear symbol reduction".into(), size: self.terms, limit: self.term_limit });
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    // Peel one variable off `a` and distribute over the coproduct of `b`. With `swapped` the
    // roles are mirrored, so `a` sits on the right of the symbol.
    fn split(&mut self, a: &[u32], b: &[u32], order: SplitOrder, swapped: bool) -> Result<Poly> {
        let n = self.coad.n;
        let k = a.iter().position(|&e| e > 0).unwrap();
        let mut single = vec![0u32; n];
        single[k] = 1;
        let mut rest = a.to_vec();
        rest[k] -= 1;
        let mut out = Poly::zero(self.nvars());
        for (b1, b2, c) in self.delta(b) {
            // the counit kills a ⊠ 1 for a of positive degree
            if b1.iter().all(|&e| e == 0) || b2.iter().all(|&e| e == 0) {
                continue;
            }
            let (f1, f2) = if swapped {
                (self.reduce(&b1, &single, order)?, self.reduce(&b2, &rest, order)?)
            } else {
                (self.reduce(&single, &b1, order)?, self.reduce(&rest, &b2, order)?)
            };
            if f1.is_zero() || f2.is_zero() {
                continue;
            }
            out = out.add(&f1.mul(&f2).scale(&c));
        }
        Ok(out)
    }

    /// `(Σ c_I x^I) ⊠ (Σ d_J y^J)` extended bilinearly; both polynomials in `n` variables.
    pub fn reduce_poly(&mut self, left: &Poly, right: &Poly, order: SplitOrder) -> Result<Poly> {
        let mut out = Poly::zero(self.nvars());
        for (i, c) in left.sorted_terms() {
            for (j, d) in right.sorted_terms() {
                let r = self.reduce(&i, &j, order)?;
                out = out.add(&r.scale(&(&c * &d)));
            }
        }
        Ok(out)
    }

    /// `w_m ⊠ w_m`.
    pub fn ghost_square(&mut self, m: usize) -> Result<Poly> {
        let n = self.coad.n;
        let w = witt::ghost_poly(self.p(), m, |i| i, n);
        self.reduce_poly(&w, &w, SplitOrder::LeftFirst)
    }
}

/// Sizes for [`iota_polys_with`].
#[derive(Clone, Copy, Debug)]
pub struct IotaConfig {
    pub max_len: usize,
    pub term_limit: usize,
}

impl Default for IotaConfig {
    fn default() -> Self {
        IotaConfig { max_len: DEFAULT_MAX_LEN, term_limit: DEFAULT_TERM_LIMIT }
    }
}

/// `P_1..P_n`, each in the `n²` variables `x_ij` (index `i·n + j`).
#[derive(Clone, Debug)]
pub struct PairingPolys {
    pub p: u64,
    pub n: usize,
    pub polys: Vec<Poly>,
    /// `(w_m ⊠ w_m) / p^m` for `m < n`.
    pub ghost_targets: Vec<Poly>,
}

/// `P_1..P_n` at the prime `p` with the default size caps.
pub fn iota_polys(p: u64, n: usize) -> Result<PairingPolys> {
    iota_polys_with(p, n, IotaConfig::default())
}

pub fn iota_polys_with(p: u64, n: usize, cfg: IotaConfig) -> Result<PairingPolys> {
    if n == 0 || n > cfg.max_len {
        return Err(Error::InvalidArgument(format!("number of pairing polynomials must be in 1..={}", cfg.max_len)));
    }
    let mut red = BoxReducer::with_limit(p, n, cfg.term_limit)?;
    let mut targets = Vec::with_capacity(n);
    for m in 0..n {
        let sq = red.ghost_square(m)?;
        let pm = num_traits::pow(BigInt::from(p), m);
        let t = sq.div_exact(&pm).ok_or_else(|| {
            Error::Relation(format!("w_{m} ⊠ w_{m} is not divisible by {p}^{m}"))
        })?;
        targets.push(t);
    }
    let polys = witt::dwork_lift(&PolyFrobenius { p }, p, &targets)?;
    Ok(PairingPolys { p, n, polys, ghost_targets: targets })
}

/// Variable names `x00, x01, ..` for a grid of side `n`.
pub fn grid_names(n: usize) -> Vec<String> {
    (0..n * n).map(|k| format!("x{}{}", k / n, k % n)).collect()
}

impl PairingPolys {
    /// `P_m` for `1 ≤ m ≤ n`.
    pub fn get(&self, m: usize) -> Option<&Poly> {
        m.checked_sub(1).and_then(|k| self.polys.get(k))
    }

    /// The ghost condition `w_m(P_1..P_{m+1}) = (w_m ⊠ w_m) / p^m`, evaluated symbolically.
    pub fn ghost_round_trip(&self) -> bool {
        let nv = self.n * self.n;
        (0..self.n).all(|m| {
            let w = witt::ghost_poly(self.p, m, |i| i, self.n);
            let mut vals = self.polys[..=m].to_vec();
            vals.resize(self.n, Poly::zero(nv));
            w.substitute(&vals) == self.ghost_targets[m]
        })
    }

    /// `P_m` is `x_{m-1,m-1}` plus terms in the variables `x_ij` with `i, j ≤ m-2`.
    pub fn leading_structure(&self) -> bool {
        let n = self.n;
        (1..=n).all(|m| {
            let lead = (m - 1) * n + (m - 1);
            let mut unit = vec![0u32; n * n];
            unit[lead] = 1;
            let p = &self.polys[m - 1];
            p.coeff(&unit).is_one()
                && p.terms().all(|(e, _)| {
                    e == unit || e.iter().enumerate().all(|(k, &x)| x == 0 || (k / n + 2 <= m && k % n + 2 <= m))
                })
        })
    }

    /// Each `P_m` is bihomogeneous of bidegree `(p^{m-1}, p^{m-1})`.
    pub fn bihomogeneous(&self) -> bool {
        let n = self.n;
        let p = self.p;
        (1..=n).all(|m| {
            let target = p.pow(m as u32 - 1);
            self.polys[m - 1].terms().all(|(e, _)| {
                let (mut r, mut c) = (0u64, 0u64);
                for (k, &x) in e.iter().enumerate() {
                    r += x as u64 * p.pow((k / n) as u32);
                    c += x as u64 * p.pow((k % n) as u32);
                }
                r == target && c == target
            })
        })
    }

    /// `P_{m+1}(x_{i-1,j-1}) = P_m(x_ij)` with out-of-range variables set to zero.
    pub fn shift_identity(&self) -> bool {
        let n = self.n;
        let nv = n * n;
        let shift: Vec<Poly> = (0..nv)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i == 0 || j == 0 {
                    Poly::zero(nv)
                } else {
                    Poly::var(nv, (i - 1) * n + (j - 1))
                }
            })
            .collect();
        (1..n).all(|m| self.polys[m].substitute(&shift) == self.polys[m - 1])
    }

    /// `P_m` with its variable `x_ab` moved to depth `(m-1-a, m-1-b)`, standing for
    /// `x_{a-m+1, b-m+1}`. The result lives on a depth grid of side `side`.
    pub fn at_depth(&self, m: usize, side: usize) -> Poly {
        let n = self.n;
        let map: Vec<usize> = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                // variables beyond row/column m-1 never occur in P_m
                let di = (m - 1).saturating_sub(a).min(side - 1);
                let dj = (m - 1).saturating_sub(b).min(side - 1);
                di * side + dj
            })
            .collect();
        self.polys[m - 1].rename(side * side, &map)
    }

    /// Sorted monomial dump, one `coefficient monomial` line per term.
    pub fn dump(&self) -> String {
        let names = grid_names(self.n);
        let mut s = String::new();
        for (m, poly) in self.polys.iter().enumerate() {
            s.push_str(&format!("P_{}:\n", m + 1));
            for (e, c) in poly.sorted_terms() {
                let single = Poly::monomial(poly.nvars(), &e, BigInt::one());
                s.push_str(&format!("  {c} {}\n", render(&single, &names)));
            }
        }
        s
    }
}

/// Does the lemma's bound cover `(n, r, s)`?
pub fn within_bound(p: u64, n: usize, r: usize, s: usize) -> bool {
    let (p, n, r, s) = (p as i64, n as i64, r as i64, s as i64);
    if s < p {
        n >= r
    } else {
        // n ≥ r + (s-p)/(p-1), cleared of the denominator
        (n - r) * (p - 1) >= s - p
    }
}

/// A monomial on the depth grid lies in `J_{a,b}^s` when its degree in the variables of depth
/// at least `(a, b)` reaches `s`.
fn in_power(e: &[u32], side: usize, a: usize, b: usize, s: usize) -> bool {
    let deg: u64 =
        e.iter().enumerate().filter(|(k, _)| k / side >= a && k % side >= b).map(|(_, &x)| x as u64).sum();
    deg >= s as u64
}

/// `P_{n+1} ≡ P_n (mod J_{1,r}^s + J_{r,1}^s)`, both read at non-positive indices ending at 0.
pub fn check_congruence(polys: &PairingPolys, n: usize, r: usize, s: usize) -> Result<bool> {
    if n == 0 || n + 1 > polys.n {
        return Err(Error::InvalidArgument(format!("need P_{n} and P_{} among {} polynomials", n + 1, polys.n)));
    }
    let side = n + 1;
    let diff = polys.at_depth(n + 1, side).sub(&polys.at_depth(n, side));
    let ok = diff.terms().all(|(e, _)| in_power(&e, side, 1, r, s) || in_power(&e, side, r, 1, s));
    Ok(ok)
}

/// A triple `(n, r, s)` outside the bound at which the congruence fails, if any exists with
/// `n < polys.n` and `r, s ≤ max`.
pub fn congruence_witness(polys: &PairingPolys, max: usize) -> Result<Option<(usize, usize, usize)>> {
    for n in 1..polys.n {
        for r in 1..=max {
            for s in 1..=max {
                if !within_bound(polys.p, n, r, s) && !check_congruence(polys, n, r, s)? {
                    return Ok(Some((n, r, s)));
                }
            }
        }
    }
    Ok(None)
}
