//! Finite abelian groups G = ℤ/N₁ × … × ℤ/N_k.
//!
//! Elements and characters are both addressed by a canonical index: the
//! mixed-radix lexicographic rank of the residue (resp. exponent) vector, last
//! coordinate fastest. Every dense function in the crate is laid out in this
//! order. A set is a sorted, duplicate-free `Vec<usize>` of canonical indices.
//!
//! The pairing is γ(x) = exp(2πi Σ_j e_j r_j / N_j). It is evaluated through an
//! integer phase k ∈ [0, L) with L = lcm(N_j), so γ(x) = exp(2πi k / L) and
//! equalities such as γ(x) = 1 are decided exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, ApcError, Result};

/// Largest group the crate will build; dense functions are allocated eagerly.
pub const MAX_GROUP_SIZE: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
    lcm: usize,
    weights: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub residues: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub exponents: Vec<i64>,
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f: Vec<i64> = Vec::deserialize(d)?;
        GroupSpec::new(&f).map_err(serde::de::Error::custom)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl GroupSpec {
    /// `make_group`: the product of cyclic groups of the given orders.
    pub fn new(factors: &[i64]) -> Result<Self> {
        if factors.is_empty() {
            return invalid("factor list is empty");
        }
        let mut fs = Vec::with_capacity(factors.len());
        let mut size: usize = 1;
        for &f in factors {
            if f < 1 {
                return invalid(format!("cyclic order {f} is not positive"));
            }
            let f = f as usize;
            size = size
                .checked_mul(f)
                .filter(|&s| s <= MAX_GROUP_SIZE)
                .ok_or_else(|| ApcError::InvalidArgument(format!("group order exceeds {MAX_GROUP_SIZE}")))?;
            fs.push(f);
        }
        let k = fs.len();
        let mut strides = vec![1usize; k];
        for j in (0..k.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * fs[j + 1];
        }
        let lcm = fs.iter().fold(1usize, |l, &f| l / gcd(l, f) * f);
        let weights = fs.iter().map(|&f| lcm / f).collect();
        Ok(GroupSpec { factors: fs, strides, size, lcm, weights })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(&[n as i64])
    }

    /// 𝔽_q^n as the product [q; n]. Primality is not checked here.
    pub fn power(q: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("exponent must be at least 1");
        }
        Self::new(&vec![q as i64; n])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Phase modulus L = lcm(N_j).
    pub fn exponent(&self) -> usize {
        self.lcm
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() == 1
    }

    /// Some(q) when every factor equals the same prime q.
    pub fn prime_power_base(&self) -> Option<usize> {
        let q = self.factors[0];
        if q < 2 || self.factors.iter().any(|&f| f != q) {
            return None;
        }
        let prime = (2..).take_while(|d| d * d <= q).all(|d| q % d != 0);
        prime.then_some(q)
    }

    pub fn descriptor(&self) -> String {
        self.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("x")
    }

    // ---------------------------------------------------------------------
    // index <-> residues
    // ---------------------------------------------------------------------

    pub fn residues(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        self.residues_into(idx, &mut out);
        out
    }

    pub fn residues_into(&self, mut idx: usize, out: &mut [usize]) {
        for j in (0..self.factors.len()).rev() {
            out[j] = idx % self.factors[j];
            idx /= self.factors[j];
        }
    }

    /// Canonical index of a residue vector, reducing each coordinate mod N_j.
    pub fn index_of(&self, residues: &[i64]) -> Result<usize> {
        if residues.len() != self.factors.len() {
            return invalid(format!("element has {} coordinates, group has {}", residues.len(), self.factors.len()));
        }
        Ok(residues
            .iter()
            .zip(&self.factors)
            .zip(&self.strides)
            .map(|((&r, &n), &s)| (r.rem_euclid(n as i64) as usize) * s)
            .sum())
    }

    pub fn index_of_unsigned(&self, residues: &[usize]) -> usize {
        residues.iter().zip(&self.factors).zip(&self.strides).map(|((&r, &n), &s)| (r % n) * s).sum()
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        GroupElement { residues: self.residues(idx).into_iter().map(|r| r as i64).collect() }
    }

    pub fn character(&self, idx: usize) -> Character {
        Character { exponents: self.residues(idx).into_iter().map(|r| r as i64).collect() }
    }

    /// Validates that `x` belongs to this group and returns its index.
    pub fn element_index(&self, x: &GroupElement) -> Result<usize> {
        self.check_vector(&x.residues, "element")?;
        self.index_of(&x.residues)
    }

    pub fn character_index(&self, g: &Character) -> Result<usize> {
        self.check_vector(&g.exponents, "character")?;
        self.index_of(&g.exponents)
    }

    fn check_vector(&self, v: &[i64], what: &str) -> Result<()> {
        if v.len() != self.factors.len() {
            return invalid(format!("{what} has {} coordinates, group has {}", v.len(), self.factors.len()));
        }
        for (r, &n) in v.iter().zip(&self.factors) {
            if *r < 0 || *r as usize >= n {
                return invalid(format!("{what} coordinate {r} outside [0, {n})"));
            }
        }
        Ok(())
    }

    // ---------------------------------------------------------------------
    // arithmetic on indices
    // ---------------------------------------------------------------------

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.factors.len() == 1 {
            let s = a + b;
            return if s >= self.size { s - self.size } else { s };
        }
        let mut out = 0;
        let (mut a, mut b) = (a, b);
        for j in (0..self.factors.len()).rev() {
            let n = self.factors[j];
            let mut r = a % n + b % n;
            if r >= n {
                r -= n;
            }
            out += r * self.strides[j];
            a /= n;
            b /= n;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        if self.factors.len() == 1 {
            return if a == 0 { 0 } else { self.size - a };
        }
        let mut out = 0;
        let mut a = a;
        for j in (0..self.factors.len()).rev() {
            let n = self.factors[j];
            let r = a % n;
            out += (if r == 0 { 0 } else { n - r }) * self.strides[j];
            a /= n;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// λ·a for an arbitrary integer λ.
    pub fn scale(&self, a: usize, lambda: i64) -> usize {
        let mut out = 0;
        let mut a = a;
        for j in (0..self.factors.len()).rev() {
            let n = self.factors[j] as i64;
            let r = (a % self.factors[j]) as i64;
            let lr = ((lambda.rem_euclid(n) as i128 * r as i128) % n as i128) as usize;
            out += lr * self.strides[j];
            a /= self.factors[j];
        }
        out
    }

    /// True when x ↦ λx is a bijection, i.e. gcd(λ, N_j) = 1 for every j.
    pub fn is_unit(&self, lambda: i64) -> bool {
        self.factors.iter().all(|&n| gcd(lambda.rem_euclid(n as i64) as usize, n) == 1 || n == 1)
    }

    /// Integer phase k ∈ [0, L) with γ(x) = exp(2πi k/L).
    pub fn phase(&self, chi: usize, x: usize) -> usize {
        if self.factors.len() == 1 {
            return ((chi as u128 * x as u128) % self.size as u128) as usize;
        }
        let l = self.lcm as u128;
        let (mut c, mut y) = (chi, x);
        let mut acc: u128 = 0;
        for j in (0..self.factors.len()).rev() {
            let n = self.factors[j];
            let e = (c % n) as u128;
            let r = (y % n) as u128;
            acc = (acc + (e * r % n as u128) * self.weights[j] as u128) % l;
            c /= n;
            y /= n;
        }
        acc as usize
    }

    /// `char_eval` on canonical indices.
    pub fn char_value(&self, chi: usize, x: usize) -> Complex64 {
        phase_to_unit(self.phase(chi, x), self.lcm)
    }

    /// `char_eval`: γ(x), rejecting inputs from another group.
    pub fn char_eval(&self, gamma: &Character, x: &GroupElement) -> Result<Complex64> {
        let c = self.character_index(gamma)?;
        let e = self.element_index(x)?;
        Ok(self.char_value(c, e))
    }

    /// |1 − γ(x)|, the chord distance, exactly symmetric in ±x.
    pub fn chord(&self, chi: usize, x: usize) -> f64 {
        chord_of_phase(self.phase(chi, x), self.lcm)
    }

    /// Characters are exponent vectors; conjugation negates them.
    pub fn conj_char(&self, chi: usize) -> usize {
        self.neg(chi)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

pub fn phase_to_unit(k: usize, l: usize) -> Complex64 {
    let t = 2.0 * PI * (k as f64) / (l as f64);
    Complex64::new(t.cos(), t.sin())
}

/// 2 sin(π k / L) computed on the folded phase so that k and L − k agree bit for bit.
pub fn chord_of_phase(k: usize, l: usize) -> f64 {
    let k = k % l;
    let folded = k.min(l - k);
    2.0 * (PI * folded as f64 / l as f64).sin()
}

// -------------------------------------------------------------------------
// set-level maps
// -------------------------------------------------------------------------

/// Sorts and deduplicates; every set handed to the crate passes through here.
pub fn normalize_set(mut a: Vec<usize>) -> Vec<usize> {
    a.sort_unstable();
    a.dedup();
    a
}

pub fn check_set(g: &GroupSpec, a: &[usize]) -> Result<()> {
    if let Some(&x) = a.iter().find(|&&x| x >= g.size()) {
        return invalid(format!("index {x} outside group of order {}", g.size()));
    }
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("set is not sorted and duplicate-free");
    }
    Ok(())
}

pub fn mask(g: &GroupSpec, a: &[usize]) -> Vec<bool> {
    let mut m = vec![false; g.size()];
    for &x in a {
        m[x] = true;
    }
    m
}

pub fn from_mask(m: &[bool]) -> Vec<usize> {
    m.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// A + t.
pub fn translate_set(g: &GroupSpec, a: &[usize], t: usize) -> Vec<usize> {
    normalize_set(a.iter().map(|&x| g.add(x, t)).collect())
}

/// `dilate_set`: {λa : a ∈ A}.
pub fn dilate_set(g: &GroupSpec, a: &[usize], lambda: i64) -> Vec<usize> {
    normalize_set(a.iter().map(|&x| g.scale(x, lambda)).collect())
}

pub fn negate_set(g: &GroupSpec, a: &[usize]) -> Vec<usize> {
    normalize_set(a.iter().map(|&x| g.neg(x)).collect())
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    intersect(a, b).len() == a.len()
}

/// A + B as a set.
pub fn sumset(g: &GroupSpec, a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut m = vec![false; g.size()];
    for &x in a {
        for &y in b {
            m[g.add(x, y)] = true;
        }
    }
    from_mask(&m)
}

/// `embed_interval`: A ⊆ [1, N] placed inside ℤ/(2N+1) by the identity on residues.
pub fn embed_interval(a: &[i64], n: i64) -> Result<(GroupSpec, Vec<usize>)> {
    if n < 1 {
        return invalid("interval length must be positive");
    }
    if let Some(&x) = a.iter().find(|&&x| x < 1 || x > n) {
        return invalid(format!("{x} lies outside [1, {n}]"));
    }
    let g = GroupSpec::cyclic((2 * n + 1) as usize)?;
    let set = normalize_set(a.iter().map(|&x| x as usize).collect());
    Ok((g, set))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(GroupSpec::new(&[3, 3]).unwrap().size(), 9);
        assert_eq!(GroupSpec::new(&[5]).unwrap().size(), 5);
        assert!(GroupSpec::new(&[3, 0]).is_err());
        assert!(GroupSpec::new(&[-2]).is_err());
        assert!(GroupSpec::new(&[]).is_err());
    }

    #[test]
    fn round_trip_mixed_radix() {
        let g = GroupSpec::new(&[3, 5, 7]).unwrap();
        let i = g.index_of(&[2, 4, 6]).unwrap();
        assert_eq!(i, 104);
        assert_eq!(g.residues(i), vec![2, 4, 6]);
        for idx in g.elements() {
            assert_eq!(g.index_of_unsigned(&g.residues(idx)), idx);
        }
    }

    #[test]
    fn char_eval_basics() {
        let g = GroupSpec::cyclic(4).unwrap();
        let v = g.char_eval(&Character { exponents: vec![1] }, &GroupElement { residues: vec![2] }).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(g.char_eval(&Character { exponents: vec![1, 0] }, &GroupElement { residues: vec![2] }).is_err());
        let triv = g.char_value(0, 3);
        assert!((triv - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn arithmetic_consistent() {
        let g = GroupSpec::new(&[4, 6]).unwrap();
        for a in g.elements() {
            assert_eq!(g.add(a, g.neg(a)), 0);
            assert_eq!(g.scale(a, -1), g.neg(a));
            assert_eq!(g.scale(a, 2), g.add(a, a));
            for b in g.elements() {
                assert_eq!(g.sub(g.add(a, b), b), a);
            }
        }
    }

    #[test]
    fn dilation_examples() {
        let g = GroupSpec::cyclic(5).unwrap();
        assert_eq!(dilate_set(&g, &[1], -2), vec![3]);
        assert_eq!(dilate_set(&g, &[0, 2, 4], 1), vec![0, 2, 4]);
        assert!(g.is_unit(2));
        assert!(!GroupSpec::cyclic(6).unwrap().is_unit(2));
    }

    #[test]
    fn embed_rejects_out_of_range() {
        assert!(embed_interval(&[0, 1], 3).is_err());
        let (g, s) = embed_interval(&[1, 2], 2).unwrap();
        assert_eq!(g.size(), 5);
        assert_eq!(s, vec![1, 2]);
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(GroupSpec::power(3, 4).unwrap().prime_power_base(), Some(3));
        assert_eq!(GroupSpec::new(&[3, 5]).unwrap().prime_power_base(), None);
        assert_eq!(GroupSpec::power(4, 2).unwrap().prime_power_base(), None);
    }
}
