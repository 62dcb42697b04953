//! Tensor products of Dieudonné modules.
//!
//! * [`boxast_u`]: the unipotent product `K ⊛ᵘ L` of contravariant modules, as
//!   finitely supported sequences in `K ∗ L = Tor_1(K, L)`.
//! * [`boxc_trunc`]: the connected product `M1 ⊠ᶜ M2` of covariant modules,
//!   truncated modulo `F^B`.
//! * [`dieudonne_pairings`]: pairings into a co-Witt level over `F_{q^m}`,
//!   with their Frobenius action; these give the étale part of `⊠`.
//!
//! # The sequence model
//!
//! An element of `K ⊛ L` is a map `f: ℛ → K ∗ L`, and `ℛ` acts on such maps by
//! right multiplication, `(r'·f)(r) = f(r·r')`. A unipotent element is fixed
//! by its values `x_i = f(V^i)`, which vanish for large `i`. Then
//! `(V·f)(V^i) = f(V^{i+1})`, so `V` shifts the sequence down, and
//! `(F·f)(V^i) = f(V^i F) = p·x_{i−1}` for `i ≥ 1`, `(F·f)(1) = (F∗F)x_0`.
//!
//! Scalars act on the sequence by `a·x_i = σ^{-i}(a)·x_i`. The solver works
//! with `D_i = σ^i(x_i)` instead, on which the action is plain multiplication,
//! so the conditions become linear over `W(k)`.
//!
//! Elements of `K ∗ L` are stored as `rank K × rank L` matrices `X`, row `i`
//! being an element of `L[p^{e_i}]`. In these coordinates
//! `(1∗F)X = σ(X)·A_F(L)ᵀ`, `(V∗1)X = Φ·X` with `Φ` the lift of `σ(A_V(K))`
//! to the free resolution, and symmetrically for the other pair.
//!
//! [`boxast_u_oracle`] solves the defining conditions directly on a truncation
//! of `ℛ` without the normalisation, as an independent check on this model.

use crate::dieudonne::DieudonneModule;
use crate::error::{Error, Result};
use crate::galois::{self, GammaModule};
use crate::linalg::{self, Mat};
use crate::semilinear::{self as sl, sigma_mat, FinLenModule, SemilinearMap};
use crate::twisted::{Equation, System, Term, Unknown, WSolution, ZpSolution};
use crate::unram::{UnramElement, UnramRing};

fn same_ring(a: &DieudonneModule, b: &DieudonneModule) -> Result<UnramRing> {
    if a.ring != b.ring {
        return Err(Error::Mismatch("modules over different rings".into()));
    }
    Ok(a.ring.clone())
}

fn neg(r: &UnramRing, a: &Mat<UnramElement>) -> Mat<UnramElement> {
    linalg::mat_scale(r, &r.from_int(-1), a)
}

fn scaled_identity(r: &UnramRing, n: usize, c: UnramElement) -> Mat<UnramElement> {
    linalg::diag(r, &vec![c; n])
}

/// Matrices of `K ∗ L` shared by the solver, the oracle and the actions.
struct StarData {
    /// `K`-side matrix of `V∗1`.
    v_k: Mat<UnramElement>,
    /// `K`-side matrix of `F∗1`.
    f_k: Mat<UnramElement>,
    /// `K`-side matrix of `F∗F`.
    ff_k: Mat<UnramElement>,
    /// Transposed `L`-side matrices.
    f_lt: Mat<UnramElement>,
    v_lt: Mat<UnramElement>,
    k: FinLenModule,
    l: FinLenModule,
}

impl StarData {
    fn new(r: &UnramRing, k: &DieudonneModule, l: &DieudonneModule) -> Self {
        let km = &k.module;
        StarData {
            v_k: sl::lift_matrix(r, &sigma_mat(r, &k.v.mat, 1), km, km),
            f_k: sl::lift_matrix(r, &sigma_mat(r, &k.f.mat, -1), km, km),
            ff_k: sl::lift_matrix(r, &k.f.mat, km, km),
            f_lt: l.f.mat.transpose(),
            v_lt: l.v.mat.transpose(),
            k: km.clone(),
            l: l.module.clone(),
        }
    }

    fn unknown(&self) -> Unknown {
        let (e, f) = (&self.k.divisors, &self.l.divisors);
        Unknown::new(e.len(), f.len(), |i, j| f[j].saturating_sub(e[i]), |_, j| f[j])
    }

    fn equation(&self) -> Equation {
        let f = self.l.divisors.clone();
        Equation::new(self.k.rank(), self.l.rank(), move |_, j| f[j])
    }

    /// `(F∗F)X`.
    fn frobenius(&self, r: &UnramRing, x: &Mat<UnramElement>) -> Mat<UnramElement> {
        linalg::mat_mul(r, &linalg::mat_mul(r, &self.ff_k, &sigma_mat(r, x, 1)), &self.f_lt)
    }

    fn zero(&self, r: &UnramRing) -> Mat<UnramElement> {
        linalg::zeros(r, self.k.rank(), self.l.rank())
    }
}

/// `K ⊛ᵘ L` restricted to sequences supported below a bound.
#[derive(Clone, Debug)]
pub struct BoxastU {
    pub bound: usize,
    /// The solutions with `F` and `V`.
    pub module: DieudonneModule,
    /// Whether bound `B + 1` gives the same module.
    pub stabilized: bool,
    /// The solution module for each bound `1..=B+1`.
    pub profile: Vec<(usize, FinLenModule)>,
    pub solution: WSolution,
}

impl BoxastU {
    /// Ranks over the profile, `rank(b)` for `b = 1..=B+1`.
    pub fn rank_profile(&self) -> Vec<usize> {
        self.profile.iter().map(|(_, m)| m.rank()).collect()
    }

    /// The sequence `x_0, …, x_{B−1}` of `K ∗ L` matrices for solution coordinates `c`.
    pub fn sequence(&self, c: &[UnramElement]) -> Vec<Mat<UnramElement>> {
        let r = &self.module.ring;
        let d = self.solution.combine(r, c);
        d.iter().enumerate().map(|(i, m)| sigma_mat(r, m, -(i as i64))).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "bound": self.bound,
            "stabilized": self.stabilized,
            "profile": self.profile.iter().map(|(b, m)| serde_json::json!({"bound": b, "divisors": m.divisors})).collect::<Vec<_>>(),
            "module": self.module.to_json(),
        })
    }
}

fn sequence_system(r: &UnramRing, s: &StarData, b: usize) -> System {
    let mut sys = System::new();
    let u: Vec<usize> = (0..b).map(|_| sys.add_unknown(s.unknown())).collect();
    for i in 0..b {
        let ti = i as i64;
        // (1∗F)x_{i+1} = (V∗1)x_i, after σ^i
        let mut e1 = s.equation().term(Term::plain(u[i]).left(neg(r, &sigma_mat(r, &s.v_k, ti))));
        // (F∗1)x_{i+1} = (1∗V)x_i, after σ^{i+1}
        let mut e2 = s.equation().term(Term::plain(u[i]).right(neg(r, &sigma_mat(r, &s.v_lt, ti + 1))));
        if i + 1 < b {
            e1 = e1.term(Term::plain(u[i + 1]).right(sigma_mat(r, &s.f_lt, ti)));
            e2 = e2.term(Term::plain(u[i + 1]).left(sigma_mat(r, &s.f_k, ti + 1)));
        }
        sys.add_equation(e1);
        sys.add_equation(e2);
    }
    sys
}

/// The unipotent product `K ⊛ᵘ L`, cut off at sequences of support `< bound`.
pub fn boxast_u(k: &DieudonneModule, l: &DieudonneModule, bound: usize) -> Result<BoxastU> {
    if bound < 1 {
        return Err(Error::InvalidArgument("support bound must be at least 1".into()));
    }
    let r = same_ring(k, l)?;
    let s = StarData::new(&r, k, l);
    let mut profile = Vec::with_capacity(bound + 1);
    for b in 1..bound {
        profile.push((b, sequence_system(&r, &s, b).solve_w(&r)?.module()));
    }
    let sol = sequence_system(&r, &s, bound).solve_w(&r)?;
    let next = sequence_system(&r, &s, bound + 1).solve_w(&r)?.module();
    profile.push((bound, sol.module()));
    // the bound-B solutions embed into the bound-(B+1) ones, so equal invariants mean equality
    let stabilized = sol.module().invariants() == next.invariants();
    profile.push((bound + 1, next));

    let fmap = sol.induced(&r, 1, |d| {
        let mut out = Vec::with_capacity(bound);
        out.push(s.frobenius(&r, &d[0]));
        for i in 1..bound {
            out.push(linalg::mat_scale(&r, &r.p_pow(1), &sigma_mat(&r, &d[i - 1], 1)));
        }
        out
    })?;
    let vmap = sol.induced(&r, -1, |d| {
        let mut out: Vec<_> = d[1..].iter().map(|m| sigma_mat(&r, m, -1)).collect();
        out.push(s.zero(&r));
        out
    })?;
    let module = DieudonneModule::new(&r, sol.module(), fmap.mat, vmap.mat)?;
    Ok(BoxastU { bound, module, stabilized, profile, solution: sol })
}

/// Maps `ℛ → K ∗ L` on the truncation spanned by `V^i, F^j` (`i, j < bound`).
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub bound: usize,
    /// Unknowns in order `f(V^0..V^{B−1})`, then `f(F^1..F^{B−1})`.
    pub solution: ZpSolution,
    ring: UnramRing,
}

impl OracleSolution {
    pub fn module(&self) -> FinLenModule {
        self.solution.module()
    }

    pub fn log_order(&self) -> u32 {
        self.solution.log_order()
    }
}

/// Brute-force solution of the defining conditions of `K ⊛ L` on a truncation of `ℛ`.
///
/// `f` is determined by its values on the `W`-basis `V^i (i ≥ 0), F^j (j ≥ 1)`.
/// The conditions imposed are `𝓕`-linearity, `f(V^B) = 0`, and
/// `(1∗F)f(Vr) = (V∗1)f(r)`, `(F∗1)f(Vr) = (1∗V)f(r)` at every basis `r`,
/// using `V·F^j = p·F^{j−1}`. No normalisation is applied, so the system is
/// semilinear and solved over `Z/p^N`.
pub fn boxast_u_oracle(k: &DieudonneModule, l: &DieudonneModule, bound: usize) -> Result<OracleSolution> {
    if bound < 1 {
        return Err(Error::InvalidArgument("support bound must be at least 1".into()));
    }
    let r = same_ring(k, l)?;
    let s = StarData::new(&r, k, l);
    let mut sys = System::new();
    let xv: Vec<usize> = (0..bound).map(|_| sys.add_unknown(s.unknown())).collect();
    let xf: Vec<usize> = std::iter::once(xv[0]).chain((1..bound).map(|_| sys.add_unknown(s.unknown()))).collect();
    let p = r.p_pow(1);
    let n = s.k.rank();
    let ff = |u: usize| Term::plain(u).left(neg(&r, &s.ff_k)).twisted(1).right(s.f_lt.clone());

    // f(F^{j+1}) = (F∗F) f(F^j)
    for j in 0..bound.saturating_sub(1) {
        sys.add_equation(s.equation().term(Term::plain(xf[j + 1])).term(ff(xf[j])));
    }
    // p·f(V^{i−1}) = f(F·V^i) = (F∗F) f(V^i), with f(V^B) = 0
    for i in 1..=bound {
        let mut e = s.equation().term(Term::plain(xv[i - 1]).left(scaled_identity(&r, n, p.clone())));
        if i < bound {
            e = e.term(ff(xv[i]));
        }
        sys.add_equation(e);
    }
    // the two conditions at r = V^i: Vr = V^{i+1}
    for i in 0..bound {
        let mut c1 = s.equation().term(Term::plain(xv[i]).left(neg(&r, &s.v_k)));
        let mut c2 = s.equation().term(Term::plain(xv[i]).twisted(-1).right(neg(&r, &s.v_lt)));
        if i + 1 < bound {
            c1 = c1.term(Term::plain(xv[i + 1]).twisted(1).right(s.f_lt.clone()));
            c2 = c2.term(Term::plain(xv[i + 1]).left(s.f_k.clone()));
        }
        sys.add_equation(c1);
        sys.add_equation(c2);
    }
    // and at r = F^j: Vr = p·F^{j−1}
    for j in 1..bound {
        let c1 = s
            .equation()
            .term(Term::plain(xf[j - 1]).twisted(1).right(linalg::mat_scale(&r, &p, &s.f_lt)))
            .term(Term::plain(xf[j]).left(neg(&r, &s.v_k)));
        let c2 = s
            .equation()
            .term(Term::plain(xf[j - 1]).left(linalg::mat_scale(&r, &p, &s.f_k)))
            .term(Term::plain(xf[j]).twisted(-1).right(neg(&r, &s.v_lt)));
        sys.add_equation(c1);
        sys.add_equation(c2);
    }
    Ok(OracleSolution { bound, solution: sys.solve_zp(&r), ring: r })
}

/// Whether the sequence solver and the oracle describe the same set of maps.
///
/// Both sides are compared as sets of sequences `f(V^i)`: every `F_p`-spanning
/// element of each side must lie in the other.
pub fn matches_oracle(u: &BoxastU, o: &OracleSolution, k: &DieudonneModule, l: &DieudonneModule) -> bool {
    let r = &o.ring;
    if u.bound != o.bound || &u.module.ring != r {
        return false;
    }
    let s = StarData::new(r, k, l);
    let b = u.bound;
    let full = |xv: Vec<Mat<UnramElement>>| {
        let mut all = xv.clone();
        let mut cur = xv[0].clone();
        for _ in 1..b {
            cur = s.frobenius(r, &cur);
            all.push(cur.clone());
        }
        all
    };
    let xi = r.xi();
    for g in 0..u.solution.gens.len() {
        for c in 0..r.degree() {
            let mut coeff = vec![r.zero_elem(); u.solution.gens.len()];
            coeff[g] = r.pow(&xi, c as u64);
            if o.solution.coords(r, &full(u.sequence(&coeff))).is_none() {
                return false;
            }
        }
    }
    for g in &o.solution.gens {
        let d: Vec<_> = g[..b].iter().enumerate().map(|(i, m)| sigma_mat(r, m, i as i64)).collect();
        if u.solution.coords(r, &d).is_none() {
            return false;
        }
    }
    true
}

/// Kronecker product `A ⊗ B` on the basis `(a, b) ↦ a·rank(B) + b`.
fn kron(r: &UnramRing, a: &Mat<UnramElement>, b: &Mat<UnramElement>) -> Mat<UnramElement> {
    Mat::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        r.mul(&a[(i / b.rows, j / b.cols)], &b[(i % b.rows, j % b.cols)])
    })
}

/// The connected product `M1 ⊠ᶜ M2` of covariant modules, modulo `F^B`.
///
/// Works in `⊕_{j<B} F^j ⊗ (M1 ⊗ M2)`, coordinates `c·(F^j ⊗ b)`, modulo
/// `p·F^{j−1}⊗n = F^j⊗Vn` and the submodule generated by
/// `F⊗x⊗Vy − 1⊗Fx⊗y`, `F⊗Vx⊗y − 1⊗x⊗Fy`. `V` kills both generators, so that
/// submodule is the `W`-span of their `F^j`-translates. `F` is nilpotent on
/// the result, which is therefore its own connected part. At finite length
/// the submodule is already closed.
pub fn boxc_trunc(m1: &DieudonneModule, m2: &DieudonneModule, bound: usize) -> Result<DieudonneModule> {
    let r = same_ring(m1, m2)?;
    let (n1, n2) = (m1.module.rank(), m2.module.rank());
    let n = n1 * n2;
    if bound == 0 || n == 0 {
        return Ok(DieudonneModule::zero(&r));
    }
    let mut divs = Vec::with_capacity(n);
    for &e in &m1.module.divisors {
        for &f in &m2.module.divisors {
            divs.push(e.min(f));
        }
    }
    let amb = FinLenModule::new(divs.iter().copied().cycle().take(n * bound).collect());
    let v_n = kron(&r, &m1.v.mat, &m2.v.mat);
    let idx = |j: usize, a: usize, b: usize| j * n + a * n2 + b;
    let mut rels: Vec<Vec<UnramElement>> = Vec::new();
    let zero_col = || vec![r.zero_elem(); n * bound];

    for j in 1..=bound {
        for k in 0..n {
            let mut c = zero_col();
            c[(j - 1) * n + k] = r.p_pow(1);
            if j < bound {
                for t in 0..n {
                    c[j * n + t] = r.neg(&r.sigma_pow(&v_n[(t, k)], j as i64));
                }
            }
            rels.push(c);
        }
    }
    for j in 0..bound {
        let tj = j as i64;
        for a in 0..n1 {
            for b in 0..n2 {
                // F^{j+1}⊗x⊗Vy − F^j⊗Fx⊗y
                let mut c = zero_col();
                // F^{j+1}⊗Vx⊗y − F^j⊗x⊗Fy
                let mut d = zero_col();
                if j + 1 < bound {
                    for t in 0..n2 {
                        c[idx(j + 1, a, t)] = r.sigma_pow(&m2.v.mat[(t, b)], tj + 1);
                    }
                    for t in 0..n1 {
                        d[idx(j + 1, t, b)] = r.sigma_pow(&m1.v.mat[(t, a)], tj + 1);
                    }
                }
                for t in 0..n1 {
                    let x = r.sigma_pow(&m1.f.mat[(t, a)], tj);
                    c[idx(j, t, b)] = r.sub(&c[idx(j, t, b)], &x);
                }
                for t in 0..n2 {
                    let x = r.sigma_pow(&m2.f.mat[(t, b)], tj);
                    d[idx(j, a, t)] = r.sub(&d[idx(j, a, t)], &x);
                }
                rels.push(c);
                rels.push(d);
            }
        }
    }
    let gens = Mat::from_cols(n * bound, &rels, r.zero_elem());
    let q = sl::quotient(&r, &sl::span(&r, &amb, &gens));

    let f_amb = Mat::from_fn(n * bound, n * bound, |i, j| {
        if i >= n && i - n == j {
            r.one_elem()
        } else {
            r.zero_elem()
        }
    });
    let v_amb = Mat::from_fn(n * bound, n * bound, |i, j| {
        if i < n && j < n {
            v_n[(i, j)].clone()
        } else if j >= n && j - n == i {
            r.p_pow(1)
        } else {
            r.zero_elem()
        }
    });
    let f = SemilinearMap::new(&r, amb.clone(), amb.clone(), 1, f_amb)?;
    let v = SemilinearMap::new(&r, amb.clone(), amb, -1, v_amb)?;
    let fq = q.descend_endo(&r, &f);
    let vq = q.descend_endo(&r, &v);
    DieudonneModule::new(&r, q.module, fq.mat, vq.mat)
}

/// Dieudonné pairings `M1 × M2 → W_e(F_{q^m})` with the Frobenius of `F_{q^m}/F_q`.
///
/// The target is the co-Witt level `p^{-e}W/W`, with `F = σ` and `V = pσ⁻¹`.
#[derive(Clone, Debug)]
pub struct PairingSpace {
    pub m1: DieudonneModule,
    pub m2: DieudonneModule,
    pub level: usize,
    pub exponent: u32,
    /// The pairings as a `Z/p^e`-module, one unknown matrix `φ(g_a, h_b)` per generator.
    pub solution: ZpSolution,
    /// The pairings with the action of the `q`-Frobenius.
    pub gamma: GammaModule,
    /// Galois ring of the target.
    pub ring: UnramRing,
}

impl PairingSpace {
    /// `log_p` of the number of pairings.
    pub fn log_order(&self) -> u32 {
        self.solution.log_order()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "level": self.level,
            "exponent": self.exponent,
            "divisors": self.solution.divisors,
            "gamma": self.gamma.to_json(),
        })
    }
}

/// Smallest co-Witt level that holds every pairing: the exponent of `M1 ∗ M2`.
pub fn pairing_exponent(m1: &DieudonneModule, m2: &DieudonneModule) -> u32 {
    let e1 = m1.module.exponent();
    let e2 = m2.module.exponent();
    e1.min(e2)
}

/// All Dieudonné pairings of `M1 × M2` into `W_e(F_{q^m})`.
///
/// The identities `φ(Vx,Vy) = Vφ(x,y)`, `φ(Fx,y) = Fφ(x,Vy)` and
/// `φ(x,Fy) = Fφ(Vx,y)` are linear over `Z/p^e` in the values `φ(g_a, h_b)`,
/// which lie in `p^{e−min(e_a,f_b)}·W/p^e`.
pub fn dieudonne_pairings(m1: &DieudonneModule, m2: &DieudonneModule, level: usize, e: u32) -> Result<PairingSpace> {
    let r = same_ring(m1, m2)?;
    if level == 0 {
        return Err(Error::InvalidArgument("field level must be positive".into()));
    }
    let need = pairing_exponent(m1, m2);
    if e < need {
        return Err(Error::ExponentTooSmall { e, hint: need });
    }
    let prec = r.precision().max(e).max(1);
    let base = r.with_precision(prec)?;
    let a = m1.with_ring(&base)?.base_change(level)?;
    let b = m2.with_ring(&base)?.base_change(level)?;
    let big = a.ring.clone();
    let (n1, n2) = (a.module.rank(), b.module.rank());
    let (ea, eb) = (&a.module.divisors, &b.module.divisors);

    let mut sys = System::new();
    let phi = sys.add_unknown(Unknown::new(n1, n2, |i, j| e.saturating_sub(ea[i].min(eb[j])), |_, _| e));
    let eq = || Equation::new(n1, n2, |_, _| e);
    let p = big.p_pow(1);
    // φ(Vg_a, Vh_b) = p·σ⁻¹ φ(g_a, h_b)
    sys.add_equation(
        eq().term(Term::plain(phi).left(a.v.mat.transpose()).right(b.v.mat.clone()))
            .term(Term::plain(phi).twisted(-1).left(neg(&big, &scaled_identity(&big, n1, p)))),
    );
    // φ(Fg_a, h_b) = σ φ(g_a, Vh_b)
    sys.add_equation(
        eq().term(Term::plain(phi).left(a.f.mat.transpose()))
            .term(Term::plain(phi).twisted(1).right(neg(&big, &sigma_mat(&big, &b.v.mat, 1)))),
    );
    // φ(g_a, Fh_b) = σ φ(Vg_a, h_b)
    sys.add_equation(
        eq().term(Term::plain(phi).right(b.f.mat.clone()))
            .term(Term::plain(phi).twisted(1).left(neg(&big, &sigma_mat(&big, &a.v.mat, 1).transpose()))),
    );
    let solution = sys.solve_zp(&big);
    let d = r.degree() as i64;
    let frob = solution.induced(&big, |g| vec![sigma_mat(&big, &g[0], d)])?;
    let gamma = galois::from_chain_group(r.p(), &solution.divisors, &frob);
    Ok(PairingSpace { m1: m1.clone(), m2: m2.clone(), level, exponent: e, solution, gamma, ring: big })
}

/// One field level of [`etale_part_tensor`].
#[derive(Clone, Debug)]
pub struct EtaleLevel {
    pub level: usize,
    /// The pairing module at the deepest tower index.
    pub gamma: GammaModule,
    /// `log_p` of its order, for each tower index.
    pub orders: Vec<u32>,
    /// Whether the last two tower indices agree.
    pub stabilized: bool,
}

/// The pairings of two towers of covariant modules, level by level up to `cap`.
///
/// Each tower lists the quotients `M[V^n]` for `n = 1, 2, …`; pairings on a
/// quotient pull back to the next one, so the orders increase along the tower.
/// The two towers are walked in step.
pub fn etale_part_tensor(t1: &[DieudonneModule], t2: &[DieudonneModule], cap: usize) -> Result<Vec<EtaleLevel>> {
    if cap == 0 {
        return Err(Error::InvalidArgument("level cap must be positive".into()));
    }
    // a shorter tower is extended by its last entry
    let depth = if t1.is_empty() || t2.is_empty() { 0 } else { t1.len().max(t2.len()) };
    let mut out = Vec::with_capacity(cap);
    for level in 1..=cap {
        let mut orders = Vec::with_capacity(depth);
        let mut gamma = GammaModule::zero();
        for n in 0..depth {
            let a = &t1[n.min(t1.len() - 1)];
            let b = &t2[n.min(t2.len() - 1)];
            let ps = dieudonne_pairings(a, b, level, pairing_exponent(a, b))?;
            orders.push(ps.log_order());
            gamma = ps.gamma;
        }
        let stabilized = orders.len() < 2 || orders[orders.len() - 1] == orders[orders.len() - 2];
        out.push(EtaleLevel { level, gamma, orders, stabilized });
    }
    Ok(out)
}

/// First level from which the order stays constant up to the cap, if the cap goes past it.
pub fn stable_from(levels: &[EtaleLevel]) -> Option<usize> {
    let orders: Vec<u32> = levels.iter().map(|l| l.orders.last().copied().unwrap_or(0)).collect();
    let last = *orders.last()?;
    let mut k = orders.len();
    while k > 0 && orders[k - 1] == last {
        k -= 1;
    }
    (k + 1 < orders.len()).then(|| levels[k].level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dieudonne::{d_alpha, d_const, d_mu, d_wittker};

    fn f2(n: u32) -> UnramRing {
        UnramRing::new(2, 1, n).unwrap()
    }

    #[test]
    fn alpha_sequences_do_not_stabilize() {
        let r = f2(3);
        let a = d_alpha(&r, 1).unwrap();
        let u = boxast_u(&a, &a, 4).unwrap();
        assert_eq!(u.module.module, FinLenModule::new(vec![1; 4]));
        assert!(!u.stabilized);
        assert_eq!(u.rank_profile(), vec![1, 2, 3, 4, 5]);
        assert!(u.module.f.is_zero(&r));
        assert!(u.module.v.pow(&r, 4).unwrap().is_zero(&r));
        assert!(!u.module.v.pow(&r, 3).unwrap().is_zero(&r));
        u.module.validate().unwrap();
    }

    #[test]
    fn constant_sequences_are_single_values() {
        let r = f2(3);
        let c = d_const(&r, 1).unwrap();
        let u = boxast_u(&c, &c, 4).unwrap();
        assert_eq!(u.module.module, FinLenModule::new(vec![1]));
        assert!(u.stabilized);
        assert!(u.module.v.is_zero(&r));
        assert!(u.module.is_f_etale());
    }

    #[test]
    fn zero_and_bad_bound() {
        let r = f2(2);
        let a = d_alpha(&r, 1).unwrap();
        let z = DieudonneModule::zero(&r);
        assert!(boxast_u(&z, &a, 3).unwrap().module.is_zero());
        assert!(boxast_u(&a, &a, 0).is_err());
        assert_eq!(boxast_u_oracle(&z, &a, 3).unwrap().log_order(), 0);
    }

    #[test]
    fn oracle_agrees_on_small_cases() {
        let r = f2(3);
        let mods = [
            d_alpha(&r, 1).unwrap(),
            d_const(&r, 1).unwrap(),
            d_mu(&r, 1).unwrap(),
            d_wittker(&r, 1, 2).unwrap(),
            d_wittker(&r, 2, 1).unwrap(),
            d_const(&r, 2).unwrap(),
        ];
        for k in &mods {
            for l in &mods {
                for b in 1..4 {
                    let u = boxast_u(k, l, b).unwrap();
                    let o = boxast_u_oracle(k, l, b).unwrap();
                    assert_eq!(u.module.length(), o.log_order());
                    assert!(matches_oracle(&u, &o, k, l));
                }
            }
        }
    }

    #[test]
    fn oracle_alpha_rank() {
        let r = f2(2);
        let a = d_alpha(&r, 1).unwrap();
        assert_eq!(boxast_u_oracle(&a, &a, 5).unwrap().module(), FinLenModule::new(vec![1; 5]));
    }

    #[test]
    fn truncated_alpha_is_power_series() {
        let r = f2(2);
        let a = d_alpha(&r, 1).unwrap();
        for b in 1..=6 {
            let t = boxc_trunc(&a, &a, b).unwrap();
            assert_eq!(t.module, FinLenModule::new(vec![1; b]));
            t.validate().unwrap();
            assert!(t.v.is_zero(&r));
        }
        assert!(boxc_trunc(&DieudonneModule::zero(&r), &a, 3).unwrap().is_zero());
    }

    #[test]
    fn duality_on_small_cases() {
        let r = f2(3);
        let mods = [d_alpha(&r, 1).unwrap(), d_const(&r, 1).unwrap(), d_wittker(&r, 1, 2).unwrap()];
        for k in &mods {
            for l in &mods {
                for b in 1..4 {
                    let u = boxast_u(k, l, b).unwrap().module;
                    let c = boxc_trunc(&k.matlis_dual(), &l.matlis_dual(), b).unwrap().matlis_dual();
                    assert!(u.is_isomorphic(&c).unwrap().is_iso(), "b={b}");
                }
            }
        }
    }

    #[test]
    fn alpha_pairings_fill_the_field() {
        for (p, d) in [(2, 1), (2, 2), (3, 1)] {
            let r = UnramRing::new(p, d, 2).unwrap();
            let a = d_alpha(&r, 1).unwrap();
            for m in 1..=3 {
                let ps = dieudonne_pairings(&a, &a, m, 1).unwrap();
                assert_eq!(ps.solution.divisors, vec![1; d * m]);
            }
        }
    }

    #[test]
    fn pairing_exponent_guard() {
        let r = f2(3);
        let c = d_const(&r, 2).unwrap();
        assert_eq!(
            dieudonne_pairings(&c, &c, 1, 1).unwrap_err(),
            Error::ExponentTooSmall { e: 1, hint: 2 }
        );
        let z = DieudonneModule::zero(&r);
        assert_eq!(dieudonne_pairings(&z, &c, 1, 0).unwrap().log_order(), 0);
    }

    /// Every assignment of values on basis pairs, filtered by the three identities.
    fn brute_force_pairings(m1: &DieudonneModule, m2: &DieudonneModule, e: u32) -> usize {
        let r = m1.ring.with_precision(e.max(m1.ring.precision())).unwrap();
        let (a, b) = (m1.with_ring(&r).unwrap(), m2.with_ring(&r).unwrap());
        let (n1, n2) = (a.module.rank(), b.module.rank());
        let vals: Vec<u64> = (0..r.p().pow(e)).collect();
        let total = vals.len().pow((n1 * n2) as u32);
        let modp = |x: &UnramElement| x.0[0] % r.p().pow(e);
        let mut count = 0;
        for code in 0..total {
            let mut c = code;
            let phi = Mat::from_fn(n1, n2, |_, _| {
                let v = vals[c % vals.len()];
                c /= vals.len();
                r.from_int(v as i64)
            });
            let ok_order = (0..n1).all(|i| {
                (0..n2).all(|j| {
                    let o = a.module.divisors[i].min(b.module.divisors[j]);
                    modp(&r.mul(&phi[(i, j)], &r.p_pow(o))) == 0
                })
            });
            if !ok_order {
                continue;
            }
            let ev = |x: &[UnramElement], y: &[UnramElement]| {
                let mut s = r.zero_elem();
                for i in 0..n1 {
                    for j in 0..n2 {
                        s = r.add(&s, &r.mul(&r.mul(&x[i], &y[j]), &phi[(i, j)]));
                    }
                }
                modp(&s)
            };
            let basis = |n: usize, i: usize| (0..n).map(|k| if k == i { r.one_elem() } else { r.zero_elem() }).collect::<Vec<_>>();
            let good = (0..n1).all(|i| {
                (0..n2).all(|j| {
                    let (x, y) = (basis(n1, i), basis(n2, j));
                    let (fx, vx) = (a.f.apply(&r, &x), a.v.apply(&r, &x));
                    let (fy, vy) = (b.f.apply(&r, &y), b.v.apply(&r, &y));
                    let pe = r.p().pow(e);
                    ev(&vx, &vy) == (r.p() * ev(&x, &y)) % pe && ev(&fx, &y) == ev(&x, &vy) && ev(&x, &fy) == ev(&vx, &y)
                })
            });
            if good {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn pairings_match_enumeration() {
        let r = f2(2);
        let mods = [
            d_const(&r, 1).unwrap().matlis_dual(),
            d_const(&r, 2).unwrap().matlis_dual(),
            d_alpha(&r, 2).unwrap(),
            d_wittker(&r, 1, 2).unwrap(),
            d_mu(&r, 1).unwrap(),
        ];
        for a in &mods {
            for b in &mods {
                let e = pairing_exponent(a, b);
                let ps = dieudonne_pairings(a, b, 1, e).unwrap();
                assert_eq!(2usize.pow(ps.log_order()), brute_force_pairings(a, b, e));
            }
        }
    }

    #[test]
    fn alpha_tower_grows_constant_settles() {
        let r = UnramRing::new(2, 2, 2).unwrap();
        let a = [d_alpha(&r, 1).unwrap()];
        let lv = etale_part_tensor(&a, &a, 3).unwrap();
        let dims: Vec<u32> = lv.iter().map(|l| l.orders[0]).collect();
        assert_eq!(dims, vec![2, 4, 6]);
        assert_eq!(stable_from(&lv), None);
        let c = [d_const(&r, 1).unwrap().matlis_dual()];
        let lv = etale_part_tensor(&c, &c, 3).unwrap();
        assert_eq!(stable_from(&lv), Some(1));
        assert!(etale_part_tensor(&[], &a, 2).unwrap().iter().all(|l| l.gamma.is_zero()));
    }
}
