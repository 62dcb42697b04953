//! Group schemes over `F_q` as (unipotent Dieudonné data, multiplicative Γ-module),
//! the catalog, and their tensor product.
//!
//! A group `G = G^u × G^m` is stored through the contravariant Dieudonné module
//! of `G^u` and the character module `M = X(G^m_{k̄})`. Infinite groups are
//! towers of finite truncations. The tensor product has unipotent part
//! `D(G1^u) ⊛ᵘ D(G2^u)` and multiplicative part with character module
//!
//! ```text
//! Z[1/p] ⊗ (M1 ∗ M2)  ⊕  Hom(π̂₀(G1^u), M2)  ⊕  Hom(π̂₀(G2^u), M1)  ⊕  pairings of the duals into CW(k̄)
//! ```

use crate::boxtensor::{self, BoxastU, EtaleLevel};
use crate::dieudonne::{self as dm, DieudonneModule};
use crate::error::{Error, Result};
use crate::galois::{self, GammaModule};
use crate::linalg;
use crate::semilinear::sigma_mat;
use crate::twisted::{Equation, System, Term, Unknown};
use crate::unram::{UnramElement, UnramRing};

/// Version tag of the JSON report layout.
pub const REPORT_SCHEMA: &str = "gstensor.report/1";

/// Highest field level searched for the points of an étale group.
const MAX_POINT_LEVEL: usize = 64;

/// Dieudonné data of the unipotent part.
#[derive(Clone, Debug)]
pub enum Unipotent {
    Finite(DieudonneModule),
    /// Quotients `D(G[F^n])`, `n = 1, 2, …`, of a module of infinite length.
    Tower(Vec<DieudonneModule>),
}

impl Unipotent {
    pub fn levels(&self) -> &[DieudonneModule] {
        match self {
            Unipotent::Finite(d) => std::slice::from_ref(d),
            Unipotent::Tower(t) => t,
        }
    }

    pub fn is_tower(&self) -> bool {
        matches!(self, Unipotent::Tower(_))
    }

    pub fn is_zero(&self) -> bool {
        self.levels().iter().all(|d| d.is_zero())
    }

    fn deepest(&self) -> Option<&DieudonneModule> {
        self.levels().last()
    }
}

#[derive(Clone, Debug)]
pub struct GroupScheme {
    pub name: String,
    pub ring: UnramRing,
    pub unipotent: Unipotent,
    /// Character module of the multiplicative part.
    pub multiplicative: GammaModule,
    /// Dieudonné module of the `p`-primary multiplicative part, when known.
    pub avatar: Option<DieudonneModule>,
}

fn p_split(n: u64, p: u64) -> (u32, u64) {
    let (mut a, mut m) = (0, n);
    while m % p == 0 {
        m /= p;
        a += 1;
    }
    (a, m)
}

fn check_order(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("group order must be positive".into()));
    }
    Ok(())
}

/// `Z/m` (`p ∤ m`) as a character module: Frobenius acts on `μ_m(k̄)` by `q`.
fn constant_characters(r: &UnramRing, m: u64) -> Result<GammaModule> {
    Ok(galois::roots_of_unity(m, r.q()))
}

pub fn mu(r: &UnramRing, n: u64) -> Result<GroupScheme> {
    check_order(n)?;
    let (a, _) = p_split(n, r.p());
    Ok(GroupScheme {
        name: format!("μ_{n}"),
        ring: r.clone(),
        unipotent: Unipotent::Finite(DieudonneModule::zero(r)),
        multiplicative: GammaModule::trivial(vec![n]),
        avatar: Some(dm::d_mu(r, a)?),
    })
}

/// The constant group `Z/n`: its `p`-part is unipotent étale, the rest is of multiplicative type.
pub fn constant(r: &UnramRing, n: u64) -> Result<GroupScheme> {
    check_order(n)?;
    let (a, m) = p_split(n, r.p());
    Ok(GroupScheme {
        name: format!("Z/{n}"),
        ring: r.clone(),
        unipotent: Unipotent::Finite(dm::d_const(r, a)?),
        multiplicative: constant_characters(r, m)?,
        avatar: Some(DieudonneModule::zero(r)),
    })
}

/// `α_{p^r}`, given the order `p^r`.
pub fn alpha(r: &UnramRing, order: u64) -> Result<GroupScheme> {
    check_order(order)?;
    let (e, rest) = p_split(order, r.p());
    if rest != 1 {
        return Err(Error::InvalidArgument(format!("alpha needs a power of {}, got {order}", r.p())));
    }
    Ok(unipotent_group(r, format!("α_{order}"), Unipotent::Finite(dm::d_alpha(r, e as usize)?)))
}

/// `W_m[F^n]`.
pub fn witt_kernel(r: &UnramRing, m: u32, n: u32) -> Result<GroupScheme> {
    Ok(unipotent_group(r, format!("W_{m}[F^{n}]"), Unipotent::Finite(dm::d_wittker(r, m, n)?)))
}

pub fn gm(r: &UnramRing) -> GroupScheme {
    GroupScheme {
        name: "G_m".into(),
        ring: r.clone(),
        unipotent: Unipotent::Finite(DieudonneModule::zero(r)),
        multiplicative: GammaModule::trivial(vec![0]),
        avatar: Some(DieudonneModule::zero(r)),
    }
}

/// `G_a` through its truncations `α_p ⊂ α_{p²} ⊂ …`, `D = k[F]/(F^n)` for `n ≤ levels`.
pub fn ga(r: &UnramRing, levels: usize) -> Result<GroupScheme> {
    if levels == 0 {
        return Err(Error::InvalidArgument("G_a needs at least one truncation".into()));
    }
    let tower = (1..=levels).map(|n| dm::d_alpha(r, n)).collect::<Result<Vec<_>>>()?;
    Ok(unipotent_group(r, "G_a".into(), Unipotent::Tower(tower)))
}

fn unipotent_group(r: &UnramRing, name: String, u: Unipotent) -> GroupScheme {
    GroupScheme {
        name,
        ring: r.clone(),
        unipotent: u,
        multiplicative: GammaModule::zero(),
        avatar: Some(DieudonneModule::zero(r)),
    }
}

/// The Γ-module `G(k̄)` of an étale unipotent group, from its Dieudonné module (`F` bijective).
///
/// `G(F_{q^m}) = Hom_{W,F}(D, W_e(F_{q^m}))`, `e` the exponent of `D`; the
/// level is raised until the order reaches `p^{length D}`.
pub fn etale_points(d: &DieudonneModule) -> Result<GammaModule> {
    if d.is_zero() {
        return Ok(GammaModule::zero());
    }
    if !d.is_f_etale() {
        return Err(Error::InvalidArgument("points are only computed for F-bijective modules".into()));
    }
    let r = &d.ring;
    let e = d.module.exponent();
    let divs = d.module.divisors.clone();
    for level in 1..=MAX_POINT_LEVEL {
        let big = d.base_change(level)?;
        let br = &big.ring;
        let n = divs.len();
        let mut sys = System::new();
        let phi = sys.add_unknown(Unknown::new(1, n, |_, j| e - divs[j], |_, _| e));
        // φ(F g_j) = σ(φ(g_j))
        sys.add_equation(
            Equation::new(1, n, |_, _| e)
                .term(Term::plain(phi).right(big.f.mat.clone()))
                .term(Term::plain(phi).twisted(1).left(linalg::diag(br, &[br.from_int(-1)]))),
        );
        let sol = sys.solve_zp(br);
        if sol.log_order() == d.length() {
            let t = r.degree() as i64;
            let frob = sol.induced(br, |g| vec![sigma_mat(br, &g[0], t)])?;
            return Ok(galois::from_chain_group(r.p(), &sol.divisors, &frob));
        }
    }
    Err(Error::Unsolvable(format!("points not all rational over degree {MAX_POINT_LEVEL}")))
}

/// `π̂₀` of a unipotent group: the points of its étale quotient.
pub fn pi0_unipotent(u: &Unipotent) -> Result<GammaModule> {
    match u.deepest() {
        None => Ok(GammaModule::zero()),
        Some(d) => etale_points(&d.fitting_split_f()?.0),
    }
}

/// `μ`-type Dieudonné data for a `p`-primary character module with trivial action.
fn avatar_of(r: &UnramRing, m: &GammaModule) -> Option<DieudonneModule> {
    let pp = m.primary_part(r.p());
    if !pp.is_trivial_action() {
        return None;
    }
    let mut out = DieudonneModule::zero(r);
    for n in pp.invariants() {
        out = out.direct_sum(&dm::d_mu(r, p_split(n, r.p()).0).ok()?);
    }
    Some(out)
}

impl GroupScheme {
    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn is_finite(&self) -> bool {
        !self.unipotent.is_tower() && self.multiplicative.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.unipotent.is_zero() && self.multiplicative.is_zero()
    }

    fn require_finite(&self, what: &str) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidArgument(format!("{what} needs a finite group, {} is not", self.name)));
        }
        Ok(())
    }

    fn finite_unipotent(&self) -> &DieudonneModule {
        &self.unipotent.levels()[0]
    }

    /// The Cartier dual of a finite group.
    pub fn dual(&self) -> Result<GroupScheme> {
        self.require_finite("dual")?;
        let r = &self.ring;
        let avatar = self
            .avatar
            .clone()
            .or_else(|| avatar_of(r, &self.multiplicative))
            .ok_or_else(|| Error::Unsolvable("no Dieudonné data for the p-primary multiplicative part".into()))?;
        // the dual of the unipotent part splits again; the multiplicative avatar dualises to an étale unipotent part
        let (mult, unip) = self.finite_unipotent().cartier_dual().fitting_split_v()?;
        let unipotent = unip.direct_sum(&avatar.cartier_dual());
        let dual_chars = galois::pi0_points(&self.multiplicative, r.p(), r.q());
        let p_chars = etale_points(&mult.cartier_dual())?;
        Ok(GroupScheme {
            name: format!("dual({})", self.name),
            ring: r.clone(),
            unipotent: Unipotent::Finite(unipotent),
            multiplicative: dual_chars.direct_sum(&p_chars),
            avatar: Some(mult),
        })
    }

    /// `(G^u, G^m)`.
    pub fn split_unipotent_multiplicative(&self) -> (GroupScheme, GroupScheme) {
        let r = &self.ring;
        let u = GroupScheme {
            name: format!("{}^u", self.name),
            ring: r.clone(),
            unipotent: self.unipotent.clone(),
            multiplicative: GammaModule::zero(),
            avatar: Some(DieudonneModule::zero(r)),
        };
        let m = GroupScheme {
            name: format!("{}^m", self.name),
            ring: r.clone(),
            unipotent: Unipotent::Finite(DieudonneModule::zero(r)),
            multiplicative: self.multiplicative.clone(),
            avatar: self.avatar.clone(),
        };
        (u, m)
    }

    /// `(G_et, G_c)`: the étale quotient (`F` bijective on the unipotent part, prime-to-`p`
    /// multiplicative part) and the connected part.
    pub fn split_etale_connected(&self) -> Result<(GroupScheme, GroupScheme)> {
        self.require_finite("the étale/connected split")?;
        let r = &self.ring;
        let (et, conn) = self.finite_unipotent().fitting_split_f()?;
        let prime_to = self.multiplicative.prime_to(r.p());
        let pp = self.multiplicative.primary_part(r.p());
        let e = GroupScheme {
            name: format!("{}_et", self.name),
            ring: r.clone(),
            unipotent: Unipotent::Finite(et),
            multiplicative: prime_to,
            avatar: Some(DieudonneModule::zero(r)),
        };
        let c = GroupScheme {
            name: format!("{}_c", self.name),
            ring: r.clone(),
            unipotent: Unipotent::Finite(conn),
            multiplicative: pp,
            avatar: self.avatar.clone(),
        };
        Ok((e, c))
    }

    /// Matlis duals of the unipotent part, levelwise: covariant modules of the dual formal group.
    pub fn matlis(&self) -> Vec<DieudonneModule> {
        self.unipotent.levels().iter().map(|d| d.matlis_dual()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "p": self.ring.p(),
            "d": self.ring.degree(),
            "unipotent": self.unipotent.levels().iter().map(|d| d.to_json()).collect::<Vec<_>>(),
            "tower": self.unipotent.is_tower(),
            "multiplicative": self.multiplicative.to_json(),
        })
    }
}

/// Caps for the tensor computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorConfig {
    /// Support bound for the unipotent sequences.
    pub bound: usize,
    /// Highest field level `F_{q^m}` for the pairing summand.
    pub levels: usize,
}

impl Default for TensorConfig {
    fn default() -> Self {
        TensorConfig { bound: 8, levels: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct UnipotentSummand {
    /// One entry per tower index.
    pub levels: Vec<BoxastU>,
    pub stabilized: bool,
}

impl UnipotentSummand {
    pub fn module(&self) -> Option<&DieudonneModule> {
        self.levels.last().map(|b| &b.module)
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|b| b.module.is_zero() && b.stabilized)
    }
}

#[derive(Clone, Debug)]
pub struct PairingSummand {
    pub levels: Vec<EtaleLevel>,
    pub stable_from: Option<usize>,
}

impl PairingSummand {
    pub fn stabilized(&self) -> bool {
        self.stable_from.is_some()
    }

    /// The Γ-module at the highest level.
    pub fn module(&self) -> GammaModule {
        self.levels.last().map(|l| l.gamma.clone()).unwrap_or_else(GammaModule::zero)
    }
}

#[derive(Clone, Debug)]
pub struct TensorReport {
    pub left: String,
    pub right: String,
    pub ring: UnramRing,
    pub config: TensorConfig,
    pub unipotent: UnipotentSummand,
    /// `Z[1/p] ⊗ (M1 ∗ M2)`.
    pub tor_piece: GammaModule,
    /// `Hom(π̂₀(G1^u), M2)`.
    pub hom_left: GammaModule,
    /// `Hom(π̂₀(G2^u), M1)`.
    pub hom_right: GammaModule,
    pub pairing: PairingSummand,
}

fn stabilized_boxast(levels: &[BoxastU]) -> bool {
    let Some(last) = levels.last() else { return true };
    let tower_ok = match levels.len() {
        0 | 1 => true,
        n => levels[n - 2].module.module.invariants() == last.module.module.invariants(),
    };
    last.stabilized && tower_ok
}

/// `G1 ⊗ G2`, summand by summand.
pub fn tensor(g1: &GroupScheme, g2: &GroupScheme, cfg: TensorConfig) -> Result<TensorReport> {
    if g1.ring != g2.ring {
        return Err(Error::Mismatch("group schemes over different bases".into()));
    }
    let r = &g1.ring;
    let (u1, u2) = (g1.unipotent.levels(), g2.unipotent.levels());
    let depth = u1.len().max(u2.len());
    let mut seqs = Vec::with_capacity(depth);
    for n in 0..depth {
        let a = &u1[n.min(u1.len() - 1)];
        let b = &u2[n.min(u2.len() - 1)];
        seqs.push(boxtensor::boxast_u(a, b, cfg.bound)?);
    }
    let stabilized = stabilized_boxast(&seqs);
    let unipotent = UnipotentSummand { levels: seqs, stabilized };

    let tor_piece = galois::mult_mult_tensor(&g1.multiplicative, &g2.multiplicative, r.p(), r.q());
    let hom_left = galois::mult_tensor(&pi0_unipotent(&g1.unipotent)?, &g2.multiplicative);
    let hom_right = galois::mult_tensor(&pi0_unipotent(&g2.unipotent)?, &g1.multiplicative);

    let cov1 = g1.matlis();
    let cov2 = g2.matlis();
    let levels = boxtensor::etale_part_tensor(&cov1, &cov2, cfg.levels)?;
    let stable_from = boxtensor::stable_from(&levels);
    let pairing = PairingSummand { levels, stable_from };

    Ok(TensorReport {
        left: g1.name.clone(),
        right: g2.name.clone(),
        ring: r.clone(),
        config: cfg,
        unipotent,
        tor_piece,
        hom_left,
        hom_right,
        pairing,
    })
}

impl TensorReport {
    pub fn stabilized(&self) -> bool {
        self.unipotent.stabilized && self.pairing.stabilized()
    }

    /// Character module of the multiplicative part (the pairing summand at the highest level).
    pub fn multiplicative(&self) -> GammaModule {
        self.tor_piece.direct_sum(&self.hom_left).direct_sum(&self.hom_right).direct_sum(&self.pairing.module())
    }

    pub fn is_zero(&self) -> bool {
        self.unipotent.is_zero() && self.multiplicative().is_zero() && self.stabilized()
    }

    /// The product as a group scheme, when every summand has stabilized.
    pub fn as_group(&self) -> Result<GroupScheme> {
        if !self.stabilized() {
            return Err(Error::Unsolvable("the tensor product has not stabilized within the caps".into()));
        }
        let r = &self.ring;
        let unip = self.unipotent.module().cloned().unwrap_or_else(|| DieudonneModule::zero(r));
        let mult = self.multiplicative();
        Ok(GroupScheme {
            name: format!("{} ⊗ {}", self.left, self.right),
            ring: r.clone(),
            unipotent: Unipotent::Finite(unip),
            avatar: avatar_of(r, &mult),
            multiplicative: mult,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": REPORT_SCHEMA,
            "left": self.left,
            "right": self.right,
            "base": {"p": self.ring.p(), "d": self.ring.degree(), "precision": self.ring.precision()},
            "config": {"bound": self.config.bound, "levels": self.config.levels},
            "stabilized": self.stabilized(),
            "identified": identify_report(self),
            "unipotent": {
                "stabilized": self.unipotent.stabilized,
                "levels": self.unipotent.levels.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            },
            "multiplicative": {
                "tor": self.tor_piece.to_json(),
                "hom_left": self.hom_left.to_json(),
                "hom_right": self.hom_right.to_json(),
                "pairing": {
                    "stable_from": self.pairing.stable_from,
                    "levels": self.pairing.levels.iter().map(|l| serde_json::json!({
                        "level": l.level,
                        "orders": l.orders,
                        "gamma": l.gamma.to_json(),
                    })).collect::<Vec<_>>(),
                },
            },
        })
    }
}

/// Catalog name of a unipotent Dieudonné module, certified by an isomorphism test.
pub fn identify_unipotent(d: &DieudonneModule) -> Option<String> {
    if d.is_zero() {
        return Some("0".into());
    }
    let r = &d.ring;
    let p = r.p();
    let len = d.length();
    let mut candidates: Vec<(String, DieudonneModule)> = Vec::new();
    if d.module.rank() == 1 {
        candidates.push((format!("Z/{}", p.pow(len)), dm::d_const(r, len).ok()?));
    }
    candidates.push((format!("α_{}", p.pow(len)), dm::d_alpha(r, len as usize).ok()?));
    for m in 1..=len {
        if len.is_multiple_of(m) {
            let n = len / m;
            if m > 1 || n > 1 {
                candidates.push((format!("W_{m}[F^{n}]"), dm::d_wittker(r, m, n).ok()?));
            }
        }
    }
    candidates
        .into_iter()
        .find(|(_, c)| c.module.invariants() == d.module.invariants() && d.is_isomorphic(c).map(|v| v.is_iso()).unwrap_or(false))
        .map(|(name, _)| name)
}

/// Catalog name of a character module: `μ_n`, `Z/n` (prime to `p`) or `G_m`.
pub fn identify_multiplicative(r: &UnramRing, m: &GammaModule) -> Option<String> {
    if m.is_zero() {
        return Some("0".into());
    }
    if m == &GammaModule::trivial(vec![0]) {
        return Some("G_m".into());
    }
    let inv = m.invariants();
    if inv.len() != 1 || inv[0] == 0 {
        return None;
    }
    let n = inv[0];
    let iso = |c: &GammaModule| m.is_isomorphic(c).map(|v| v.is_iso()).unwrap_or(false);
    if iso(&GammaModule::trivial(vec![n])) {
        return Some(format!("μ_{n}"));
    }
    if !n.is_multiple_of(r.p()) && iso(&constant_characters(r, n).ok()?) {
        return Some(format!("Z/{n}"));
    }
    None
}

/// Name of a finite group built from catalog pieces, with the two halves of a constant group merged.
pub fn identify(g: &GroupScheme) -> Option<String> {
    if !g.is_finite() {
        return if g.unipotent.is_zero() && g.multiplicative == GammaModule::trivial(vec![0]) {
            Some("G_m".into())
        } else {
            None
        };
    }
    let u = identify_unipotent(g.finite_unipotent())?;
    let m = identify_multiplicative(&g.ring, &g.multiplicative)?;
    let p = g.p();
    let name = match (u.as_str(), m.as_str()) {
        (_, "0") => u,
        ("0", _) => m,
        _ => match (u.strip_prefix("Z/"), m.strip_prefix("Z/")) {
            (Some(a), Some(b)) if a.parse::<u64>().map(|x| x % p == 0).unwrap_or(false) => {
                format!("Z/{}", a.parse::<u64>().ok()? * b.parse::<u64>().ok()?)
            }
            _ => format!("{u} × {m}"),
        },
    };
    Some(name)
}

pub fn identify_report(rep: &TensorReport) -> Option<String> {
    identify(&rep.as_group().ok()?)
}

fn gamma_text(m: &GammaModule) -> String {
    if m.is_zero() {
        return "0".into();
    }
    let groups: Vec<String> = m.cyclic.iter().map(|&n| if n == 0 { "Z".into() } else { format!("Z/{n}") }).collect();
    let rows: Vec<String> = (0..m.frobenius.rows)
        .map(|i| m.frobenius.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("{} with Frobenius [{}]", groups.join(" ⊕ "), rows.join("; "))
}

fn module_text(d: &DieudonneModule) -> String {
    if d.is_zero() {
        return "0".into();
    }
    let divs: Vec<String> = d.module.divisors.iter().map(|e| format!("W_{e}")).collect();
    divs.join(" ⊕ ")
}

/// Plain-text rendering of a report.
pub fn render_text(rep: &TensorReport, profile: bool) -> String {
    if rep.is_zero() {
        return "0\n".into();
    }
    let mut s = String::new();
    let r = &rep.ring;
    s.push_str(&format!("{} ⊗ {} over F_{}\n", rep.left, rep.right, r.q()));
    let last = rep.unipotent.levels.last();
    match last {
        Some(b) if rep.unipotent.stabilized => {
            let name = identify_unipotent(&b.module).filter(|n| n != "0").map(|n| format!(" ({n})")).unwrap_or_default();
            s.push_str(&format!("unipotent: {}{}\n", module_text(&b.module), name));
        }
        Some(b) => {
            s.push_str(&format!("unipotent: non-stabilizing at bound {}\n", b.bound));
        }
        None => s.push_str("unipotent: 0\n"),
    }
    if profile || !rep.unipotent.stabilized {
        for (n, b) in rep.unipotent.levels.iter().enumerate() {
            let ranks: Vec<String> = b.rank_profile().iter().map(|x| x.to_string()).collect();
            let tag = if rep.unipotent.levels.len() > 1 { format!(" [tower {}]", n + 1) } else { String::new() };
            s.push_str(&format!("  profile rank(B), B=1..{}{}: {}\n", b.bound + 1, tag, ranks.join(" ")));
        }
    }
    s.push_str(&format!("multiplicative, Z[1/p] ⊗ (M1 ∗ M2): {}\n", gamma_text(&rep.tor_piece)));
    s.push_str(&format!("multiplicative, Hom(π0({}), M2): {}\n", rep.left, gamma_text(&rep.hom_left)));
    s.push_str(&format!("multiplicative, Hom(π0({}), M1): {}\n", rep.right, gamma_text(&rep.hom_right)));
    match rep.pairing.stable_from {
        Some(l) => s.push_str(&format!(
            "multiplicative, pairings: {} (stable from level {l})\n",
            gamma_text(&rep.pairing.module())
        )),
        None => s.push_str("multiplicative, pairings: non-stabilizing\n"),
    }
    if profile || !rep.pairing.stabilized() {
        for l in &rep.pairing.levels {
            s.push_str(&format!("  level F_{}^{}: order p^{}\n", r.q(), l.level, l.orders.last().copied().unwrap_or(0)));
        }
    }
    match identify_report(rep) {
        Some(n) => s.push_str(&format!("result: {n}\n")),
        None if rep.stabilized() => s.push_str("result: not in the catalog\n"),
        None => s.push_str("result: non-stabilizing\n"),
    }
    s
}

fn element_text(e: &UnramElement) -> String {
    match e.0.iter().skip(1).all(|&c| c == 0) {
        true => e.0.first().copied().unwrap_or(0).to_string(),
        false => format!("({})", e.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")),
    }
}

fn matrix_text(m: &linalg::Mat<UnramElement>) -> String {
    let rows: Vec<String> =
        (0..m.rows).map(|i| m.row(i).iter().map(element_text).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join("; "))
}

/// Plain-text dump of a Dieudonné module: the summands `W_e`, then the `F` and `V` matrices.
pub fn render_module(d: &DieudonneModule) -> String {
    if d.is_zero() {
        return "0\n".into();
    }
    let mut s = format!("{}\n", module_text(d));
    s.push_str(&format!("  F = {}\n", matrix_text(&d.f.mat)));
    s.push_str(&format!("  V = {}\n", matrix_text(&d.v.mat)));
    s
}

/// Plain-text dump of a group scheme.
pub fn render_group(g: &GroupScheme) -> String {
    let mut s = format!("{} over F_{}\n", g.name, g.ring.q());
    let levels = g.unipotent.levels();
    for (n, d) in levels.iter().enumerate() {
        let tag = if g.unipotent.is_tower() { format!(" [tower {}]", n + 1) } else { String::new() };
        let name = identify_unipotent(d).filter(|x| x != "0").map(|x| format!(" ({x})")).unwrap_or_default();
        let body = render_module(d);
        let (head, rest) = body.split_once('\n').unwrap_or((&body, ""));
        s.push_str(&format!("unipotent{tag}: {head}{name}\n{rest}"));
    }
    s.push_str(&format!("multiplicative: {}\n", gamma_text(&g.multiplicative)));
    match identify(g) {
        Some(n) => s.push_str(&format!("result: {n}\n")),
        None => s.push_str("result: not in the catalog\n"),
    }
    s
}

/// Tensor product of Hopf algebras in characteristic 0, on (Galois module, primitives dimension).
pub fn char0_tensor_hopf(a: &(GammaModule, usize), b: &(GammaModule, usize)) -> (GammaModule, usize) {
    let m = galois::tensor_diag(&a.0, &b.0);
    // (M ⊗ k̄)^Γ has dimension rank M by Galois descent
    let dim = a.0.rank() * b.1 + b.0.rank() * a.1 + a.1 * b.1;
    (m, dim)
}

/// Tensor product of affine groups in characteristic 0.
pub fn char0_tensor_affine(a: &(GammaModule, usize), b: &(GammaModule, usize)) -> (GammaModule, usize) {
    (galois::tor_diag(&a.0, &b.0), a.1 * b.1)
}
