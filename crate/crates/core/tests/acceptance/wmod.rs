//! Finite abelian p-groups given by integer relation matrices.
//!
//! A square matrix `A` presents `Z^r / A·Z^r` (columns are relations). Tensor,
//! Tor, Hom, Ext and the Matlis dual are computed from presentations with
//! plain integer kernels and cokernels, so nothing here uses the slot formulas
//! of the library.

use gstensor::linalg::{self, Integers};
use gstensor::Mat;
use rand::Rng;

const Z: Integers = Integers;

fn p_exponent(p: u64, d: i128) -> u32 {
    let mut d = d.abs();
    assert!(d > 0, "free summand in a finite module");
    let mut e = 0;
    while d % p as i128 == 0 {
        d /= p as i128;
        e += 1;
    }
    assert_eq!(d, 1, "divisor is not a power of {p}");
    e
}

/// Exponents of the cyclic summands, largest first, without trivial ones.
fn exponents(p: u64, divs: &[i128]) -> Vec<u32> {
    let mut e: Vec<u32> = divs.iter().map(|&d| p_exponent(p, d)).filter(|&e| e > 0).collect();
    e.sort_unstable_by(|a, b| b.cmp(a));
    e
}

fn kron(a: &Mat<i128>, b: &Mat<i128>) -> Mat<i128> {
    Mat::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)])
}

fn eye(n: usize) -> Mat<i128> {
    linalg::identity(&Z, n)
}

fn pow(p: u64, e: u32) -> i128 {
    (p as i128).pow(e)
}

pub fn diagonal(p: u64, e: &[u32]) -> Mat<i128> {
    let d: Vec<i128> = e.iter().map(|&k| pow(p, k)).collect();
    linalg::diag(&Z, &d)
}

/// A presentation of `⊕ Z/p^{e_i}` scrambled by unimodular row and column operations,
/// padded with up to two trivial relations.
pub fn scrambled<R: Rng>(p: u64, e: &[u32], rng: &mut R) -> Mat<i128> {
    let mut exps = e.to_vec();
    exps.extend(std::iter::repeat_n(0, rng.gen_range(0..=2)));
    let mut a = diagonal(p, &exps);
    let n = a.rows;
    if n < 2 {
        return a;
    }
    for _ in 0..4 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c: i128 = rng.gen_range(-2..=2);
        if rng.gen_bool(0.5) {
            for k in 0..n {
                let x = a[(j, k)];
                a[(i, k)] += c * x;
            }
        } else {
            for k in 0..n {
                let x = a[(k, j)];
                a[(k, i)] += c * x;
            }
        }
    }
    a
}

fn divisors(a: &Mat<i128>) -> Vec<i128> {
    linalg::cokernel(&Z, &vec![0; a.rows], a).divs
}

pub fn invariants(p: u64, a: &Mat<i128>) -> Vec<u32> {
    exponents(p, &divisors(a))
}

/// `M ⊗ N = Z^{rs} / (A ⊗ 1, 1 ⊗ B)`.
pub fn tensor(p: u64, a: &Mat<i128>, b: &Mat<i128>) -> Vec<u32> {
    let rel = kron(a, &eye(b.rows)).hcat(&kron(&eye(a.rows), b));
    exponents(p, &linalg::cokernel(&Z, &vec![0; rel.rows], &rel).divs)
}

/// `Tor_1(M, N) = ker(A ⊗ 1 : N^r → N^r)`, from the resolution `0 → Z^r → Z^r → M → 0`.
pub fn tor(p: u64, a: &Mat<i128>, b: &Mat<i128>) -> Vec<u32> {
    let n = divisors(b);
    let amb: Vec<i128> = (0..a.rows).flat_map(|_| n.iter().copied()).collect();
    exponents(p, &linalg::kernel(&Z, &amb, &amb, &kron(a, &eye(n.len()))).divs)
}

/// `Hom(K, M) = ker(φ ↦ φ∘B)` inside `M^s`, `K` presented by `B`.
pub fn hom(p: u64, b: &Mat<i128>, a: &Mat<i128>) -> Vec<u32> {
    let m = divisors(a);
    let amb: Vec<i128> = (0..b.rows).flat_map(|_| m.iter().copied()).collect();
    exponents(p, &linalg::kernel(&Z, &amb, &amb, &kron(&b.transpose(), &eye(m.len()))).divs)
}

/// `Ext^1(M, K) = coker(Aᵀ ⊗ 1 : K^r → K^r)`.
pub fn ext(p: u64, a: &Mat<i128>, b: &Mat<i128>) -> Vec<u32> {
    let k = divisors(b);
    let amb: Vec<i128> = (0..a.rows).flat_map(|_| k.iter().copied()).collect();
    exponents(p, &linalg::cokernel(&Z, &amb, &kron(&a.transpose(), &eye(k.len()))).divs)
}

/// `Hom(M, p^{-big}Z/Z)`, which is the Matlis dual once `p^big` kills `M`.
pub fn matlis(p: u64, a: &Mat<i128>, big: u32) -> Vec<u32> {
    let amb = vec![pow(p, big); a.rows];
    exponents(p, &linalg::kernel(&Z, &amb, &amb, &a.transpose()).divs)
}
