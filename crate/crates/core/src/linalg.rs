//! Dense matrices and module algebra over principal ideal rings.
//!
//! Two rings implement [`Pir`]: the Galois rings of [`crate::unram`] (chain
//! rings, where every ideal is a power of p) and the integers, used for the
//! Galois-module side. Finitely generated modules are always presented as
//! `⊕ R/(d_i)` by a list of divisors; a zero divisor means a free summand.

use std::fmt::Debug;
use std::ops::{Index, IndexMut};

pub trait Pir {
    type E: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_unit(&self, a: &Self::E) -> bool;
    fn inv_unit(&self, a: &Self::E) -> Self::E;
    /// `(g, s, t, u, v)` with `g = s·a + t·b`, `0 = u·a + v·b` and `s·v − t·u` a unit.
    fn gcdex(&self, a: &Self::E, b: &Self::E) -> (Self::E, Self::E, Self::E, Self::E, Self::E);
    /// Some `q` with `q·b = a`, if one exists.
    fn div_exact(&self, a: &Self::E, b: &Self::E) -> Option<Self::E>;
    /// Generator of the annihilator ideal of `a`.
    fn ann(&self, a: &Self::E) -> Self::E;
    /// Canonical representative of `a` modulo the ideal `(m)`.
    fn reduce(&self, a: &Self::E, m: &Self::E) -> Self::E;
    /// Pivot preference for elimination; smaller is better. Only called on nonzero input.
    fn pivot_key(&self, a: &Self::E) -> u64;
    /// `(c, u)` with `u` a unit, `a·u = c`, and `c` the canonical generator of `(a)`.
    fn canon(&self, a: &Self::E) -> (Self::E, Self::E);

    fn divides(&self, a: &Self::E, b: &Self::E) -> bool {
        self.div_exact(b, a).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E> Index<(usize, usize)> for Mat<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Mat<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Clone> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, e: E) -> Self {
        Mat { rows, cols, data: vec![e; rows * cols] }
    }

    pub fn from_cols(rows: usize, cols: &[Vec<E>], fill: E) -> Self {
        let mut m = Mat::filled(rows, cols.len(), fill);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Mat::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Mat::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vcat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

pub fn zeros<R: Pir>(r: &R, rows: usize, cols: usize) -> Mat<R::E> {
    Mat::filled(rows, cols, r.zero())
}

pub fn identity<R: Pir>(r: &R, n: usize) -> Mat<R::E> {
    Mat::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn diag<R: Pir>(r: &R, d: &[R::E]) -> Mat<R::E> {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { r.zero() })
}

pub fn mat_mul<R: Pir>(r: &R, a: &Mat<R::E>, b: &Mat<R::E>) -> Mat<R::E> {
    assert_eq!(a.cols, b.rows, "matrix shapes do not compose");
    let mut out = zeros(r, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = &a[(i, k)];
            if r.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = &b[(k, j)];
                if !r.is_zero(y) {
                    out[(i, j)] = r.add(&out[(i, j)], &r.mul(x, y));
                }
            }
        }
    }
    out
}

pub fn mat_add<R: Pir>(r: &R, a: &Mat<R::E>, b: &Mat<R::E>) -> Mat<R::E> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat::from_fn(a.rows, a.cols, |i, j| r.add(&a[(i, j)], &b[(i, j)]))
}

pub fn mat_sub<R: Pir>(r: &R, a: &Mat<R::E>, b: &Mat<R::E>) -> Mat<R::E> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat::from_fn(a.rows, a.cols, |i, j| r.sub(&a[(i, j)], &b[(i, j)]))
}

pub fn mat_scale<R: Pir>(r: &R, c: &R::E, a: &Mat<R::E>) -> Mat<R::E> {
    a.map(|x| r.mul(c, x))
}

pub fn mat_vec<R: Pir>(r: &R, a: &Mat<R::E>, v: &[R::E]) -> Vec<R::E> {
    assert_eq!(a.cols, v.len());
    (0..a.rows)
        .map(|i| {
            let mut s = r.zero();
            for j in 0..a.cols {
                if !r.is_zero(&v[j]) {
                    s = r.add(&s, &r.mul(&a[(i, j)], &v[j]));
                }
            }
            s
        })
        .collect()
}

pub fn is_zero_mat<R: Pir>(r: &R, a: &Mat<R::E>) -> bool {
    a.data.iter().all(|x| r.is_zero(x))
}

/// Reduce row `i` of `a` modulo `divs[i]`.
pub fn reduce_rows<R: Pir>(r: &R, a: &Mat<R::E>, divs: &[R::E]) -> Mat<R::E> {
    assert_eq!(a.rows, divs.len());
    Mat::from_fn(a.rows, a.cols, |i, j| r.reduce(&a[(i, j)], &divs[i]))
}

pub fn reduce_vec<R: Pir>(r: &R, v: &[R::E], divs: &[R::E]) -> Vec<R::E> {
    v.iter().zip(divs).map(|(x, d)| r.reduce(x, d)).collect()
}

/// Smith form `D = P·A·Q` with the inverses of both transforms.
#[derive(Clone, Debug)]
pub struct Snf<E> {
    /// The `min(rows, cols)` diagonal entries, canonical generators, each dividing the next.
    pub d: Vec<E>,
    pub p: Mat<E>,
    pub p_inv: Mat<E>,
    pub q: Mat<E>,
    pub q_inv: Mat<E>,
}

struct SnfState<'a, R: Pir> {
    r: &'a R,
    a: Mat<R::E>,
    // untracked transforms are `None`
    p: Option<Mat<R::E>>,
    p_inv: Option<Mat<R::E>>,
    q: Option<Mat<R::E>>,
    q_inv: Option<Mat<R::E>>,
}

fn lin2<R: Pir>(r: &R, a: &R::E, x: &R::E, b: &R::E, y: &R::E) -> R::E {
    r.add(&r.mul(a, x), &r.mul(b, y))
}

// rows (k, i) <- T·(rows)
fn mix_rows<R: Pir>(r: &R, m: &mut Mat<R::E>, k: usize, i: usize, (s, t, u, v): &(R::E, R::E, R::E, R::E)) {
    for j in 0..m.cols {
        let x = m[(k, j)].clone();
        let y = m[(i, j)].clone();
        m[(k, j)] = lin2(r, s, &x, t, &y);
        m[(i, j)] = lin2(r, u, &x, v, &y);
    }
}

// cols (k, j) <- (s·c_k + t·c_j, u·c_k + v·c_j)
fn mix_cols<R: Pir>(r: &R, m: &mut Mat<R::E>, k: usize, j: usize, (s, t, u, v): &(R::E, R::E, R::E, R::E)) {
    for row in 0..m.rows {
        let x = m[(row, k)].clone();
        let y = m[(row, j)].clone();
        m[(row, k)] = lin2(r, s, &x, t, &y);
        m[(row, j)] = lin2(r, u, &x, v, &y);
    }
}

// row i += c·row k
fn add_row<R: Pir>(r: &R, m: &mut Mat<R::E>, i: usize, k: usize, c: &R::E) {
    for j in 0..m.cols {
        let x = r.mul(c, &m[(k, j)]);
        if !r.is_zero(&x) {
            m[(i, j)] = r.add(&m[(i, j)], &x);
        }
    }
}

// col j += c·col k
fn add_col<R: Pir>(r: &R, m: &mut Mat<R::E>, j: usize, k: usize, c: &R::E) {
    for row in 0..m.rows {
        let x = r.mul(&m[(row, k)], c);
        if !r.is_zero(&x) {
            m[(row, j)] = r.add(&m[(row, j)], &x);
        }
    }
}

/// The inverse of `[[s, t], [u, v]]`, laid out the same way.
fn inverse2<R: Pir>(r: &R, (s, t, u, v): &(R::E, R::E, R::E, R::E)) -> (R::E, R::E, R::E, R::E) {
    let di = r.inv_unit(&r.sub(&r.mul(s, v), &r.mul(t, u)));
    (r.mul(&di, v), r.neg(&r.mul(&di, t)), r.neg(&r.mul(&di, u)), r.mul(&di, s))
}

impl<'a, R: Pir> SnfState<'a, R> {
    // rows (k, i) <- T·(rows), T = [[s, t], [u, v]]
    fn row_op(&mut self, k: usize, i: usize, t: &(R::E, R::E, R::E, R::E)) {
        let r = self.r;
        let (one, zero) = (r.one(), r.zero());
        if t.0 == one && t.1 == zero && t.3 == one {
            // plain elimination: row i += u·row k
            add_row(r, &mut self.a, i, k, &t.2);
            if let Some(p) = &mut self.p {
                add_row(r, p, i, k, &t.2);
            }
            if let Some(pi) = &mut self.p_inv {
                add_col(r, pi, k, i, &r.neg(&t.2));
            }
            return;
        }
        mix_rows(r, &mut self.a, k, i, t);
        if let Some(p) = &mut self.p {
            mix_rows(r, p, k, i, t);
        }
        if let Some(pi) = &mut self.p_inv {
            // P⁻¹ picks up T⁻¹ on the right
            let (a, b, c, d) = inverse2(r, t);
            mix_cols(r, pi, k, i, &(a, c, b, d));
        }
    }

    fn col_op(&mut self, k: usize, j: usize, t: &(R::E, R::E, R::E, R::E)) {
        let r = self.r;
        let (one, zero) = (r.one(), r.zero());
        if t.0 == one && t.1 == zero && t.3 == one {
            // plain elimination: col j += u·col k
            add_col(r, &mut self.a, j, k, &t.2);
            if let Some(q) = &mut self.q {
                add_col(r, q, j, k, &t.2);
            }
            if let Some(qi) = &mut self.q_inv {
                add_row(r, qi, k, j, &r.neg(&t.2));
            }
            return;
        }
        mix_cols(r, &mut self.a, k, j, t);
        if let Some(q) = &mut self.q {
            mix_cols(r, q, k, j, t);
        }
        if let Some(qi) = &mut self.q_inv {
            let (a, b, c, d) = inverse2(r, t);
            mix_rows(r, qi, k, j, &(a, c, b, d));
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.a.swap_rows(a, b);
        if let Some(p) = &mut self.p {
            p.swap_rows(a, b);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.a.swap_cols(a, b);
        if let Some(q) = &mut self.q {
            q.swap_cols(a, b);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.swap_rows(a, b);
        }
    }

    fn scale_col(&mut self, k: usize, u: &R::E) {
        let r = self.r;
        for row in 0..self.a.rows {
            self.a[(row, k)] = r.mul(&self.a[(row, k)], u);
        }
        if let Some(q) = &mut self.q {
            for row in 0..q.rows {
                q[(row, k)] = r.mul(&q[(row, k)], u);
            }
        }
        if let Some(qi) = &mut self.q_inv {
            let ui = r.inv_unit(u);
            for c in 0..qi.cols {
                qi[(k, c)] = r.mul(&ui, &qi[(k, c)]);
            }
        }
    }

    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(u64, usize, usize)> = None;
        for i in k..self.a.rows {
            for j in k..self.a.cols {
                let x = &self.a[(i, j)];
                if self.r.is_zero(x) {
                    continue;
                }
                let key = self.r.pivot_key(x);
                if best.is_none_or(|(b, _, _)| key < b) {
                    best = Some((key, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Which transforms of a Smith form to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Track {
    pub p: bool,
    pub p_inv: bool,
    pub q: bool,
    pub q_inv: bool,
}

impl Track {
    pub const ALL: Track = Track { p: true, p_inv: true, q: true, q_inv: true };
    pub const NONE: Track = Track { p: false, p_inv: false, q: false, q_inv: false };
}

/// Smith normal form with minimal-key pivots, ties broken in row-major order.
pub fn snf<R: Pir>(r: &R, a: &Mat<R::E>) -> Snf<R::E> {
    snf_tracking(r, a, Track::ALL)
}

/// As [`snf`], computing only the requested transforms; the others come back as `0×0`.
pub fn snf_tracking<R: Pir>(r: &R, a: &Mat<R::E>, track: Track) -> Snf<R::E> {
    let (m, n) = (a.rows, a.cols);
    let id = |on: bool, k: usize| on.then(|| identity(r, k));
    let mut st = SnfState {
        r,
        a: a.clone(),
        p: id(track.p, m),
        p_inv: id(track.p_inv, m),
        q: id(track.q, n),
        q_inv: id(track.q_inv, n),
    };
    let kmax = m.min(n);
    let mut d = Vec::with_capacity(kmax);
    for k in 0..kmax {
        let Some((pi, pj)) = st.pivot(k) else {
            d.extend((k..kmax).map(|_| r.zero()));
            break;
        };
        st.swap_rows(k, pi);
        st.swap_cols(k, pj);
        // a canonical pivot makes the exact divisions below cheap
        let (_, u) = r.canon(&st.a[(k, k)]);
        if u != r.one() {
            st.scale_col(k, &u);
        }
        loop {
            for i in k + 1..m {
                if !r.is_zero(&st.a[(i, k)]) {
                    let (_, s, t, u, v) = r.gcdex(&st.a[(k, k)], &st.a[(i, k)]);
                    st.row_op(k, i, &(s, t, u, v));
                }
            }
            for j in k + 1..n {
                if !r.is_zero(&st.a[(k, j)]) {
                    let (_, s, t, u, v) = r.gcdex(&st.a[(k, k)], &st.a[(k, j)]);
                    st.col_op(k, j, &(s, t, u, v));
                }
            }
            if (k + 1..m).any(|i| !r.is_zero(&st.a[(i, k)])) {
                continue;
            }
            // Over non-chain rings the pivot may fail to divide the rest of the matrix.
            let piv = st.a[(k, k)].clone();
            let bad = (k + 1..m).find(|&i| (k + 1..n).any(|j| !r.divides(&piv, &st.a[(i, j)])));
            match bad {
                Some(i) => {
                    let one = r.one();
                    st.row_op(k, i, &(one.clone(), one.clone(), r.zero(), one));
                }
                None => break,
            }
        }
        let (c, u) = r.canon(&st.a[(k, k)]);
        if !r.is_zero(&c) && u != r.one() {
            st.scale_col(k, &u);
        }
        d.push(c);
    }
    let out = |x: Option<Mat<R::E>>| x.unwrap_or_else(|| zeros(r, 0, 0));
    Snf { d, p: out(st.p), p_inv: out(st.p_inv), q: out(st.q), q_inv: out(st.q_inv) }
}

/// Generators (as columns) of `{x ∈ R^n : A·x ∈ ⊕ (f_i)}`.
pub fn kernel_gens<R: Pir>(r: &R, a: &Mat<R::E>, f: &[R::E]) -> Mat<R::E> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(f.len(), m);
    let b = a.hcat(&diag(r, f));
    let s = snf_tracking(r, &b, Track { q: true, ..Track::NONE });
    let mut cols = Vec::new();
    for k in 0..n + m {
        let dk = if k < s.d.len() { s.d[k].clone() } else { r.zero() };
        let z = r.ann(&dk);
        if r.is_zero(&z) {
            continue;
        }
        let c: Vec<_> = (0..n).map(|i| r.mul(&s.q[(i, k)], &z)).collect();
        if c.iter().any(|x| !r.is_zero(x)) {
            cols.push(c);
        }
    }
    Mat::from_cols(n, &cols, r.zero())
}

/// Some exact solution of `A·x = b` over `R`.
pub fn solve<R: Pir>(r: &R, a: &Mat<R::E>, b: &[R::E]) -> Option<Vec<R::E>> {
    let s = snf_tracking(r, a, Track { p: true, q: true, ..Track::NONE });
    let y = mat_vec(r, &s.p, b);
    let mut z = vec![r.zero(); a.cols];
    for k in 0..a.rows {
        let dk = if k < s.d.len() { s.d[k].clone() } else { r.zero() };
        if r.is_zero(&dk) {
            if !r.is_zero(&y[k]) {
                return None;
            }
        } else {
            z[k] = r.div_exact(&y[k], &dk)?;
        }
    }
    Some(mat_vec(r, &s.q, &z))
}

/// Solve `A·x ≡ b` modulo the target divisors `f`.
pub fn solve_mod<R: Pir>(r: &R, a: &Mat<R::E>, f: &[R::E], b: &[R::E]) -> Option<Vec<R::E>> {
    let full = a.hcat(&diag(r, f));
    let x = solve(r, &full, b)?;
    Some(x[..a.cols].to_vec())
}

/// A submodule of `⊕ R/(amb_i)` in Smith-adapted coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SubModule<E> {
    pub divs: Vec<E>,
    /// Columns are the chosen generators, written in ambient coordinates.
    pub incl: Mat<E>,
}

impl<E: Clone + PartialEq + Debug> SubModule<E> {
    pub fn len(&self) -> usize {
        self.divs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divs.is_empty()
    }

    /// Coordinates of an ambient element known to lie in the submodule.
    pub fn coords<R: Pir<E = E>>(&self, r: &R, amb: &[E], x: &[E]) -> Option<Vec<E>> {
        let c = solve_mod(r, &self.incl, amb, x)?;
        Some(reduce_vec(r, &c, &self.divs))
    }
}

/// The submodule of `⊕ R/(amb_i)` generated by the columns of `gens`.
pub fn submodule<R: Pir>(r: &R, amb: &[R::E], gens: &Mat<R::E>) -> SubModule<R::E> {
    assert_eq!(gens.rows, amb.len());
    let g = gens.cols;
    if g == 0 {
        return SubModule { divs: vec![], incl: zeros(r, amb.len(), 0) };
    }
    let rel = kernel_gens(r, gens, amb);
    let s = snf_tracking(r, &rel, Track { p_inv: true, ..Track::NONE });
    let mut divs = Vec::new();
    let mut keep = Vec::new();
    for k in 0..g {
        let dk = if k < s.d.len() { s.d[k].clone() } else { r.zero() };
        if !r.is_unit(&dk) {
            divs.push(dk);
            keep.push(k);
        }
    }
    let incl = reduce_rows(r, &mat_mul(r, gens, &s.p_inv.select_cols(&keep)), amb);
    SubModule { divs, incl }
}

/// Kernel of a well-defined map `⊕ R/(src) → ⊕ R/(tgt)` given by `a`.
pub fn kernel<R: Pir>(r: &R, src: &[R::E], tgt: &[R::E], a: &Mat<R::E>) -> SubModule<R::E> {
    submodule(r, src, &kernel_gens(r, a, tgt))
}

/// Image of `a` as a submodule of the target.
pub fn image<R: Pir>(r: &R, tgt: &[R::E], a: &Mat<R::E>) -> SubModule<R::E> {
    submodule(r, tgt, a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quotient<E> {
    pub divs: Vec<E>,
    /// Projection from ambient coordinates.
    pub proj: Mat<E>,
    /// A set-theoretic section, columns in ambient coordinates.
    pub lift: Mat<E>,
}

/// Cokernel of `a` into `⊕ R/(tgt)`.
pub fn cokernel<R: Pir>(r: &R, tgt: &[R::E], a: &Mat<R::E>) -> Quotient<R::E> {
    assert_eq!(a.rows, tgt.len());
    let b = a.hcat(&diag(r, tgt));
    let s = snf_tracking(r, &b, Track { p: true, p_inv: true, ..Track::NONE });
    let mut divs = Vec::new();
    let mut keep = Vec::new();
    for k in 0..tgt.len() {
        let dk = s.d[k].clone();
        if !r.is_unit(&dk) {
            divs.push(dk);
            keep.push(k);
        }
    }
    let proj = reduce_rows(r, &s.p.select_rows(&keep), &divs);
    let lift = s.p_inv.select_cols(&keep);
    Quotient { divs, proj, lift }
}

/// The integers, with `i128` entries. Used for Galois modules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

impl Pir for Integers {
    type E = i128;

    fn zero(&self) -> i128 {
        0
    }
    fn one(&self) -> i128 {
        1
    }
    fn add(&self, a: &i128, b: &i128) -> i128 {
        a.checked_add(*b).expect("integer overflow")
    }
    fn sub(&self, a: &i128, b: &i128) -> i128 {
        a.checked_sub(*b).expect("integer overflow")
    }
    fn mul(&self, a: &i128, b: &i128) -> i128 {
        a.checked_mul(*b).expect("integer overflow")
    }
    fn neg(&self, a: &i128) -> i128 {
        -a
    }
    fn is_zero(&self, a: &i128) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &i128) -> bool {
        *a == 1 || *a == -1
    }
    fn inv_unit(&self, a: &i128) -> i128 {
        assert!(self.is_unit(a), "{a} is not a unit");
        *a
    }
    fn gcdex(&self, a: &i128, b: &i128) -> (i128, i128, i128, i128, i128) {
        let (a, b) = (*a, *b);
        if a == 0 && b == 0 {
            return (0, 1, 0, 0, 1);
        }
        if a == 0 {
            return (b, 0, 1, 1, 0);
        }
        if b % a == 0 {
            return (a, 1, 0, -(b / a), 1);
        }
        let (g, s, t) = ext_gcd(a, b);
        (g, s, t, -(b / g), a / g)
    }
    fn div_exact(&self, a: &i128, b: &i128) -> Option<i128> {
        if *b == 0 {
            return (*a == 0).then_some(0);
        }
        (a % b == 0).then(|| a / b)
    }
    fn ann(&self, a: &i128) -> i128 {
        i128::from(*a == 0)
    }
    fn reduce(&self, a: &i128, m: &i128) -> i128 {
        if *m == 0 {
            *a
        } else {
            a.rem_euclid(*m)
        }
    }
    fn pivot_key(&self, a: &i128) -> u64 {
        a.unsigned_abs().min(u64::MAX as u128) as u64
    }
    fn canon(&self, a: &i128) -> (i128, i128) {
        if *a < 0 {
            (-a, -1)
        } else {
            (*a, 1)
        }
    }
}
