//! Dieudonné modules of small length: every isomorphism class over a prime field,
//! and random ones over larger fields.

use gstensor::dieudonne::{self as dm, DieudonneModule};
use gstensor::linalg;
use gstensor::semilinear::sigma_mat;
use gstensor::{FinLenModule, Mat, UnramElement, UnramRing};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashSet;

/// Divisor lists with total length in `1..=max`, largest first.
pub fn shapes(max: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for e in (1..=cap.min(rest)).rev() {
            cur.push(e);
            go(rest - e, e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max, max, &mut Vec::new(), &mut out);
    out
}

type Small = Vec<Vec<u64>>;

struct Shape {
    p: u64,
    e: Vec<u32>,
}

impl Shape {
    fn modulus(&self, i: usize) -> u64 {
        self.p.pow(self.e[i])
    }

    fn mul(&self, a: &Small, b: &Small) -> Small {
        let n = self.e.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum::<u64>() % self.modulus(i)).collect())
            .collect()
    }

    fn scalar(&self, c: u64) -> Small {
        let n = self.e.len();
        (0..n).map(|i| (0..n).map(|j| if i == j { c % self.modulus(i) } else { 0 }).collect()).collect()
    }

    /// Every matrix of a well-defined endomorphism: entry `(i, j)` in `p^{max(e_i−e_j,0)}·Z/p^{e_i}`.
    fn endomorphisms(&self) -> Vec<Small> {
        let n = self.e.len();
        let slots: Vec<(u64, u64)> = (0..n * n)
            .map(|k| {
                let (ei, ej) = (self.e[k / n], self.e[k % n]);
                (self.p.pow(ei.saturating_sub(ej)), self.p.pow(ei.min(ej)))
            })
            .collect();
        let total: u64 = slots.iter().map(|s| s.1).product();
        (0..total)
            .map(|mut code| {
                let mut m = vec![vec![0; n]; n];
                for (k, &(step, count)) in slots.iter().enumerate() {
                    m[k / n][k % n] = (code % count) * step;
                    code /= count;
                }
                m
            })
            .collect()
    }
}

/// Representatives of all Dieudonné modules of length `1..=max` over `F_p`, one per
/// isomorphism class, found by sweeping the valid `(F, V)` pairs in orbits of the
/// automorphism group. Over a prime field `σ` is trivial, so base change is conjugation.
pub fn classes_over_prime_field(r: &UnramRing, max: u32) -> Vec<DieudonneModule> {
    assert_eq!(r.degree(), 1);
    let p = r.p();
    let mut reps = Vec::new();
    for e in shapes(max) {
        let s = Shape { p, e: e.clone() };
        let ends = s.endomorphisms();
        let one = s.scalar(1);
        let pee = s.scalar(p);
        let auts: Vec<(&Small, &Small)> = ends
            .iter()
            .filter_map(|g| ends.iter().find(|h| s.mul(g, h) == one).map(|h| (g, h)))
            .collect();
        let mut seen: HashSet<(Small, Small)> = HashSet::new();
        for f in &ends {
            for v in &ends {
                if s.mul(f, v) != pee || s.mul(v, f) != pee || seen.contains(&(f.clone(), v.clone())) {
                    continue;
                }
                for (g, h) in &auts {
                    seen.insert((s.mul(g, &s.mul(f, h)), s.mul(g, &s.mul(v, h))));
                }
                let n = e.len();
                let mat = |a: &Small| Mat::from_fn(n, n, |i, j| r.from_int(a[i][j] as i64));
                reps.push(DieudonneModule::new(r, FinLenModule::new(e.clone()), mat(f), mat(v)).unwrap());
            }
        }
    }
    reps
}

/// Indecomposable catalog modules of length at most 3.
fn blocks(r: &UnramRing) -> Vec<DieudonneModule> {
    let mut out = Vec::new();
    for m in 1..=3 {
        out.push(dm::d_const(r, m).unwrap());
        out.push(dm::d_mu(r, m).unwrap());
        out.push(dm::d_alpha(r, m as usize).unwrap());
    }
    for n in 2..=3 {
        out.push(dm::d_alpha(r, n).unwrap().matlis_dual());
    }
    for (m, n) in [(1, 2), (2, 1), (1, 3), (3, 1)] {
        out.push(dm::d_wittker(r, m, n).unwrap());
    }
    out
}

/// A random change of basis by elementary operations: returns `(g, g⁻¹)`.
fn random_basis_change<R: Rng>(r: &UnramRing, e: &[u32], rng: &mut R) -> (Mat<UnramElement>, Mat<UnramElement>) {
    let n = e.len();
    let mut g = linalg::identity(r, n);
    let mut h = linalg::identity(r, n);
    for _ in 0..4 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let mut el = linalg::identity(r, n);
        let mut inv = linalg::identity(r, n);
        if i == j {
            let u = loop {
                let u = r.random(rng);
                if let Some(ui) = r.inverse(&u) {
                    break (u, ui);
                }
            };
            el[(i, i)] = u.0;
            inv[(i, i)] = u.1;
        } else {
            let c = r.mul(&r.random(rng), &r.p_pow(e[i].saturating_sub(e[j])));
            inv[(i, j)] = r.neg(&c);
            el[(i, j)] = c;
        }
        g = linalg::mat_mul(r, &g, &el);
        h = linalg::mat_mul(r, &inv, &h);
    }
    (g, h)
}

fn rebuild(d: &DieudonneModule, f: Mat<UnramElement>, v: Mat<UnramElement>) -> Option<DieudonneModule> {
    let m = DieudonneModule::new(&d.ring, d.module.clone(), f, v).ok()?;
    m.validate().ok()?;
    Some(m)
}

/// Random module of length `1..=3`: a random sum of catalog blocks in a random basis,
/// half the time with one entry of `F` or `V` changed; proposals that break
/// `FV = VF = p` are rejected.
pub fn random_module<R: Rng>(r: &UnramRing, rng: &mut R) -> DieudonneModule {
    let pool = blocks(r);
    loop {
        let mut m = DieudonneModule::zero(r);
        for _ in 0..rng.gen_range(1..=3) {
            let b = pool.choose(rng).unwrap();
            if m.length() + b.length() <= 3 {
                m = m.direct_sum(b);
            }
        }
        let e = m.module.divisors.clone();
        let (g, h) = random_basis_change(r, &e, rng);
        // in the new basis F has matrix g⁻¹·A·σ(g), V has g⁻¹·B·σ⁻¹(g)
        let mut f = linalg::mat_mul(r, &h, &linalg::mat_mul(r, &m.f.mat, &sigma_mat(r, &g, 1)));
        let mut v = linalg::mat_mul(r, &h, &linalg::mat_mul(r, &m.v.mat, &sigma_mat(r, &g, -1)));
        if rng.gen_bool(0.5) {
            let n = e.len();
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let c = r.mul(&r.random(rng), &r.p_pow(e[i].saturating_sub(e[j])));
            let target = if rng.gen_bool(0.5) { &mut f } else { &mut v };
            target[(i, j)] = r.add(&target[(i, j)], &c);
        }
        if let Some(out) = rebuild(&m, f, v) {
            return out;
        }
    }
}
