//! Evaluation of parsed expressions against the library.

use crate::syntax::{Expr, ExprKind, Field, Op, Term};
use gstensor::dieudonne::DieudonneModule;
use gstensor::groupscheme::{self as gs, GroupScheme, TensorConfig, TensorReport, REPORT_SCHEMA};
use gstensor::UnramRing;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct Config {
    pub tensor: TensorConfig,
    /// Overrides the working precision `N`; by default the largest exponent the catalog terms need.
    pub precision: Option<u32>,
}


#[derive(Debug)]
pub enum EvalError {
    MissingField,
    /// A non-stabilized tensor product used where a group is needed.
    NonStabilizing(String),
    Type(String),
    Library(gstensor::Error),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::MissingField => write!(f, "no base field given; annotate the expression with `@ F(p,d)`"),
            EvalError::NonStabilizing(s) => write!(f, "{s} has not stabilized within the caps"),
            EvalError::Type(s) => write!(f, "{s}"),
            EvalError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EvalError {}

impl From<gstensor::Error> for EvalError {
    fn from(e: gstensor::Error) -> Self {
        EvalError::Library(e)
    }
}

pub enum Value {
    Group(GroupScheme),
    /// Covariant modules of the dual formal group, one per tower level.
    Modules { name: String, ring: UnramRing, levels: Vec<DieudonneModule> },
    Pair(GroupScheme, GroupScheme),
    Report(Box<TensorReport>),
}

impl Value {
    /// `false` only for a tensor report that has not stabilized within the caps.
    pub fn stabilized(&self) -> bool {
        match self {
            Value::Report(r) => r.stabilized(),
            _ => true,
        }
    }

    pub fn render_text(&self, profile: bool) -> String {
        match self {
            Value::Group(g) => gs::render_group(g),
            Value::Pair(a, b) => format!("{}\n{}", gs::render_group(a), gs::render_group(b)),
            Value::Report(r) => gs::render_text(r, profile),
            Value::Modules { name, ring, levels } => {
                let mut s = format!("{name} over F_{}\n", ring.q());
                for (n, d) in levels.iter().enumerate() {
                    let tag = if levels.len() > 1 { format!(" [tower {}]", n + 1) } else { String::new() };
                    s.push_str(&format!("module{tag}: {}", gs::render_module(d)));
                }
                s
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let group = |g: &GroupScheme| {
            let mut v = g.to_json();
            v["identified"] = serde_json::json!(gs::identify(g));
            v
        };
        match self {
            Value::Report(r) => r.to_json(),
            Value::Group(g) => serde_json::json!({"schema": REPORT_SCHEMA, "kind": "group", "group": group(g)}),
            Value::Pair(a, b) => {
                serde_json::json!({"schema": REPORT_SCHEMA, "kind": "pair", "first": group(a), "second": group(b)})
            }
            Value::Modules { name, ring, levels } => serde_json::json!({
                "schema": REPORT_SCHEMA,
                "kind": "modules",
                "name": name,
                "base": {"p": ring.p(), "d": ring.degree(), "precision": ring.precision()},
                "levels": levels.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
            }),
        }
    }
}

fn p_adic_valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Largest `W`-exponent among the catalog terms, at least 1.
pub fn needed_precision(e: &Expr, p: u64) -> u32 {
    match &e.kind {
        ExprKind::Term(t) => match t {
            Term::Mu(n) | Term::Constant(n) => p_adic_valuation(*n, p),
            Term::Witt(m, _) => *m,
            Term::Alpha { .. } | Term::Gm | Term::Ga => 1,
        }
        .max(1),
        ExprKind::Unary(_, a) => needed_precision(a, p),
        ExprKind::Tensor(a, b) => needed_precision(a, p).max(needed_precision(b, p)),
    }
}

/// The working ring for an expression.
pub fn base_ring(e: &Expr, cfg: &Config) -> Result<UnramRing, EvalError> {
    let Field { p, d } = e.base_field().ok_or(EvalError::MissingField)?;
    let n = cfg.precision.unwrap_or_else(|| needed_precision(e, p));
    Ok(UnramRing::new(p, d, n)?)
}

pub fn evaluate(e: &Expr, cfg: &Config) -> Result<Value, EvalError> {
    let r = base_ring(e, cfg)?;
    eval_in(&r, e, cfg)
}

fn term(r: &UnramRing, t: &Term, cfg: &Config) -> Result<GroupScheme, EvalError> {
    Ok(match t {
        Term::Mu(n) => gs::mu(r, *n)?,
        Term::Constant(n) => gs::constant(r, *n)?,
        Term::Alpha { base, exp } => {
            let order = base
                .checked_pow(exp.unwrap_or(1))
                .ok_or_else(|| EvalError::Type(format!("alpha({base}^{}) is too large", exp.unwrap_or(1))))?;
            gs::alpha(r, order)?
        }
        Term::Witt(m, n) => gs::witt_kernel(r, *m, *n)?,
        Term::Gm => gs::gm(r),
        Term::Ga => gs::ga(r, cfg.tensor.levels)?,
    })
}

fn group(r: &UnramRing, e: &Expr, cfg: &Config) -> Result<GroupScheme, EvalError> {
    match eval_in(r, e, cfg)? {
        Value::Group(g) => Ok(g),
        Value::Report(rep) => rep.as_group().map_err(|_| EvalError::NonStabilizing(e.to_string())),
        Value::Pair(..) => Err(EvalError::Type(format!("{e} is a pair of groups, not a group"))),
        Value::Modules { .. } => Err(EvalError::Type(format!("{e} is a list of modules, not a group"))),
    }
}

fn eval_in(r: &UnramRing, e: &Expr, cfg: &Config) -> Result<Value, EvalError> {
    Ok(match &e.kind {
        ExprKind::Term(t) => Value::Group(term(r, t, cfg)?),
        ExprKind::Tensor(a, b) => {
            let (ga, gb) = (group(r, a, cfg)?, group(r, b, cfg)?);
            Value::Report(Box::new(gs::tensor(&ga, &gb, cfg.tensor)?))
        }
        ExprKind::Unary(op, a) => {
            let g = group(r, a, cfg)?;
            match op {
                Op::Dual => Value::Group(g.dual()?),
                Op::Matlis => Value::Modules { name: format!("matlis({})", g.name), ring: r.clone(), levels: g.matlis() },
                Op::SplitUnipotentMultiplicative => {
                    let (u, m) = g.split_unipotent_multiplicative();
                    Value::Pair(u, m)
                }
                Op::SplitEtaleConnected => {
                    let (et, c) = g.split_etale_connected()?;
                    Value::Pair(et, c)
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn run(s: &str) -> Value {
        evaluate(&parse(s).unwrap(), &Config::default()).unwrap()
    }

    #[test]
    fn catalog_reports() {
        let v = run("tensor(mu(2), mu(2)) @ F(2,1)");
        assert_eq!(v.render_text(false), "0\n");
        let v = run("tensor(Z/(2), mu(2)) @ F(2,1)");
        assert!(v.render_text(false).ends_with("result: μ_2\n"));
        assert!(v.stabilized());
        let v = run("tensor(alpha(2), alpha(2)) @ F(2,1)");
        assert!(!v.stabilized());
    }

    #[test]
    fn alpha_is_self_dual() {
        let v = run("dual(alpha(2)) @ F(2,1)");
        let text = v.render_text(false);
        assert!(text.contains("unipotent: W_1 (α_2)\n  F = [0]\n  V = [0]\n"), "{text}");
        assert!(text.ends_with("result: α_2\n"));
    }

    #[test]
    fn precision_follows_terms() {
        let e = parse("tensor(W(3,1), mu(4)) @ F(2,1)").unwrap();
        assert_eq!(needed_precision(&e, 2), 3);
        let cfg = Config { precision: Some(5), ..Config::default() };
        assert_eq!(base_ring(&e, &cfg).unwrap().precision(), 5);
    }

    #[test]
    fn errors() {
        let e = parse("mu(2)").unwrap();
        assert!(matches!(evaluate(&e, &Config::default()), Err(EvalError::MissingField)));
        let e = parse("dual(split_u_m(mu(2))) @ F(2,1)").unwrap();
        assert!(matches!(evaluate(&e, &Config::default()), Err(EvalError::Type(_))));
        let e = parse("dual(tensor(alpha(2), alpha(2))) @ F(2,1)").unwrap();
        assert!(matches!(evaluate(&e, &Config::default()), Err(EvalError::NonStabilizing(_))));
        let e = parse("alpha(3) @ F(2,1)").unwrap();
        assert!(matches!(evaluate(&e, &Config::default()), Err(EvalError::Library(_))));
    }
}
