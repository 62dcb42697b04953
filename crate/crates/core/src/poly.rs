//! Sparse multivariate polynomials over ℤ with packed exponent vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;

/// Exponents are packed into a `u128`, `128 / nvars` bits per variable (at most 32).
pub type Monomial = u128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: HashMap<Monomial, BigInt>,
}

fn bits_for(nvars: usize) -> u32 {
    if nvars == 0 {
        32
    } else {
        ((128 / nvars) as u32).min(32)
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= 32, "at most 32 variables");
        Poly { nvars, terms: HashMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Poly::zero(nvars);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(nvars, &unit_exps(nvars, i), BigInt::one())
    }

    pub fn monomial(nvars: usize, exps: &[u32], c: BigInt) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(p.pack(exps), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn bits(&self) -> u32 {
        bits_for(self.nvars)
    }

    fn mask(&self) -> u128 {
        (1u128 << self.bits()) - 1
    }

    pub fn max_exponent(&self) -> u32 {
        self.mask() as u32
    }

    pub fn pack(&self, exps: &[u32]) -> Monomial {
        assert_eq!(exps.len(), self.nvars);
        let b = self.bits();
        let mut m = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            assert!((e as u128) <= self.mask(), "exponent {e} overflows the packed monomial");
            m |= (e as u128) << (b * i as u32);
        }
        m
    }

    pub fn unpack(&self, m: Monomial) -> Vec<u32> {
        let b = self.bits();
        (0..self.nvars).map(|i| ((m >> (b * i as u32)) & self.mask()) as u32).collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &BigInt)> + '_ {
        self.terms.iter().map(move |(m, c)| (self.unpack(*m), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        self.terms.get(&self.pack(exps)).cloned().unwrap_or_default()
    }

    /// Terms sorted by total degree, then lexicographically on the exponent vector (descending).
    pub fn sorted_terms(&self) -> Vec<(Vec<u32>, BigInt)> {
        let mut v: Vec<_> = self.terms().map(|(e, c)| (e, c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    fn max_exps(&self) -> Vec<u32> {
        let mut mx = vec![0u32; self.nvars];
        for m in self.terms.keys() {
            for (i, e) in self.unpack(*m).into_iter().enumerate() {
                mx[i] = mx[i].max(e);
            }
        }
        mx
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(*m, c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let (ma, mb) = (self.max_exps(), other.max_exps());
        for (a, b) in ma.iter().zip(&mb) {
            assert!(
                (a + b) as u128 <= self.mask(),
                "product exponent {} overflows the packed monomial",
                a + b
            );
        }
        let mut out: HashMap<Monomial, BigInt> = HashMap::with_capacity(self.len().max(other.len()) * 2);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                match out.entry(m1 + m2) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += c;
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: out }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn div_exact(&self, c: &BigInt) -> Option<Poly> {
        let mut terms = HashMap::with_capacity(self.len());
        for (m, x) in &self.terms {
            let (q, r) = x.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.insert(*m, q);
        }
        Some(Poly { nvars: self.nvars, terms })
    }

    /// Is every coefficient divisible by `c`?
    pub fn divisible_by(&self, c: &BigInt) -> bool {
        self.terms.values().all(|x| x.is_multiple_of(c))
    }

    /// Raise every variable to the `k`-th power (the Frobenius lift `x ↦ x^k`).
    pub fn frobenius_lift(&self, k: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e: Vec<u32> = self.unpack(*m).into_iter().map(|x| x * k).collect();
            out.terms.insert(out.pack(&e), c.clone());
        }
        out
    }

    /// Move into a ring with `nvars` variables, sending variable `i` to `map[i]`.
    pub fn rename(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, x) in self.unpack(*m).into_iter().enumerate() {
                if x > 0 {
                    e[map[i]] += x;
                }
            }
            let packed = out.pack(&e);
            out.add_term(packed, c.clone());
        }
        out
    }

    /// Substitute a polynomial for each variable.
    pub fn substitute(&self, vals: &[Poly]) -> Poly {
        assert_eq!(vals.len(), self.nvars);
        let nv = vals.first().map_or(0, |v| v.nvars);
        let mut cache: HashMap<(usize, u32), Poly> = HashMap::new();
        let mut out = Poly::zero(nv);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (i, e) in self.unpack(*m).into_iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = cache.entry((i, e)).or_insert_with(|| vals[i].pow(e)).clone();
                t = t.mul(&pw);
            }
            out = out.add(&t);
        }
        out
    }

    /// Set the listed variables to zero.
    pub fn kill_vars(&self, vars: &[usize]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = self.unpack(*m);
            if vars.iter().all(|&v| e[v] == 0) {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    /// Evaluate at integer values.
    pub fn eval_int(&self, vals: &[BigInt]) -> BigInt {
        let mut sum = BigInt::zero();
        for (e, c) in self.terms() {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= num_traits::pow(vals[i].clone(), k as usize);
                }
            }
            sum += t;
        }
        sum
    }

    /// Keep only the terms accepted by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&[u32]) -> bool) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if keep(&self.unpack(*m)) {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

fn unit_exps(nvars: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0u32; nvars];
    e[i] = 1;
    e
}

/// Render with caller-supplied variable names, in the stable order of [`Poly::sorted_terms`].
pub fn render(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (e, c)) in p.sorted_terms().into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mut factors = Vec::new();
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(names[i].clone()),
                _ => factors.push(format!("{}^{}", names[i], x)),
            }
        }
        if factors.is_empty() {
            s.push_str(&a.to_string());
        } else {
            if !a.is_one() {
                s.push_str(&a.to_string());
                s.push('*');
            }
            s.push_str(&factors.join("*"));
        }
    }
    s
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", render(self, &names))
    }
}
