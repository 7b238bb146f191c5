//! Dense functions on G under the expectation normalization.
//!
//! 𝔼 is the uniform average, f∗g(x) = 𝔼_y f(y)g(x−y), f∘g(x) = 𝔼_y f(y)g(x+y),
//! f̂(γ) = 𝔼_x f(x)·conj γ(x), and f = Σ_γ f̂(γ)γ. The transform runs one
//! cyclic factor at a time, so its cost is |G|·ΣN_j while every entry is still
//! an exact character sum.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, ApcError, Result};
use crate::group::GroupSpec;

/// Below this many multiply-adds the transform and scans stay sequential.
const PAR_THRESHOLD: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFn {
    group: GroupSpec,
    values: Vec<f64>,
}

/// f̂ indexed by character, in the same canonical order as elements.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierFn {
    group: GroupSpec,
    values: Vec<Complex64>,
}

/// A non-negative function with 𝔼μ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMeasure(GroupFn);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvMode {
    /// f∗g(x) = 𝔼_y f(y)g(x−y)
    Star,
    /// f∘g(x) = 𝔼_y f(y)g(x+y)
    Circ,
}

fn same_group(a: &GroupSpec, b: &GroupSpec) -> Result<()> {
    if a != b {
        return invalid(format!("functions live on different groups ({} vs {})", a.descriptor(), b.descriptor()));
    }
    Ok(())
}

impl GroupFn {
    pub fn new(group: &GroupSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != group.size() {
            return invalid(format!("{} values for a group of order {}", values.len(), group.size()));
        }
        Ok(GroupFn { group: group.clone(), values })
    }

    pub fn zeros(group: &GroupSpec) -> Self {
        GroupFn { group: group.clone(), values: vec![0.0; group.size()] }
    }

    pub fn constant(group: &GroupSpec, c: f64) -> Self {
        GroupFn { group: group.clone(), values: vec![c; group.size()] }
    }

    pub fn indicator(group: &GroupSpec, a: &[usize]) -> Self {
        let mut f = Self::zeros(group);
        for &x in a {
            f.values[x] = 1.0;
        }
        f
    }

    pub fn from_fn(group: &GroupSpec, mut f: impl FnMut(usize) -> f64) -> Self {
        GroupFn { group: group.clone(), values: group.elements().map(&mut f).collect() }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First index attaining the maximum.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] != 0.0).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GroupFn { group: self.group.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &GroupFn, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        Ok(GroupFn {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &GroupFn) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GroupFn) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GroupFn) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add_const(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// x ↦ f(x + t).
    pub fn shift(&self, t: usize) -> Self {
        let g = &self.group;
        GroupFn::from_fn(g, |x| self.values[g.add(x, t)])
    }

    /// x ↦ f(−x).
    pub fn reflect(&self) -> Self {
        let g = &self.group;
        GroupFn::from_fn(g, |x| self.values[g.neg(x)])
    }

    /// `index,value` lines under a header, in canonical order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{i},{v}\n"));
        }
        s
    }

    pub fn from_csv(group: &GroupSpec, text: &str) -> Result<Self> {
        let mut values = vec![0.0; group.size()];
        let mut seen = vec![false; group.size()];
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (ln == 0 && line == "index,value") {
                continue;
            }
            let (i, v) = line
                .split_once(',')
                .ok_or_else(|| ApcError::InvalidArgument(format!("line {}: expected index,value", ln + 1)))?;
            let i: usize =
                i.parse().map_err(|_| ApcError::InvalidArgument(format!("line {}: bad index {i:?}", ln + 1)))?;
            let v: f64 =
                v.parse().map_err(|_| ApcError::InvalidArgument(format!("line {}: bad value {v:?}", ln + 1)))?;
            if i >= values.len() || seen[i] {
                return invalid(format!("line {}: index {i} out of range or repeated", ln + 1));
            }
            seen[i] = true;
            values[i] = v;
        }
        if seen.iter().any(|&s| !s) {
            return invalid("CSV does not cover every group element");
        }
        GroupFn::new(group, values)
    }
}

impl FourierFn {
    pub fn new(group: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.size() {
            return invalid("Fourier data length does not match group order");
        }
        Ok(FourierFn { group: group.clone(), values })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, chi: usize) -> Complex64 {
        self.values[chi]
    }

    /// Σ_γ |f̂(γ)|.
    pub fn l1(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).sum()
    }

    pub fn mul(&self, other: &FourierFn) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        Ok(FourierFn {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn mul_conj(&self, other: &FourierFn) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        Ok(FourierFn {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).collect(),
        })
    }

    /// Σ_γ f̂(γ)·conj ĝ(γ).
    pub fn pairing(&self, other: &FourierFn) -> Result<Complex64> {
        same_group(&self.group, &other.group)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum())
    }
}

impl ProbMeasure {
    pub fn new(f: GroupFn) -> Result<Self> {
        if let Some(v) = f.values.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
            return invalid(format!("measure takes value {v}"));
        }
        let m = f.mean();
        if (m - 1.0).abs() > 1e-9 {
            return invalid(format!("measure has mean {m}, expected 1"));
        }
        Ok(ProbMeasure(f))
    }

    pub fn uniform(g: &GroupSpec) -> Self {
        ProbMeasure(GroupFn::constant(g, 1.0))
    }

    pub fn as_fn(&self) -> &GroupFn {
        &self.0
    }

    pub fn into_fn(self) -> GroupFn {
        self.0
    }

    pub fn group(&self) -> &GroupSpec {
        &self.0.group
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.support()
    }

    /// μ∗ν or μ∘ν, again a probability measure.
    pub fn convolve(&self, other: &ProbMeasure, mode: ConvMode) -> Result<ProbMeasure> {
        let mut h = convolve(&self.0, &other.0, mode)?;
        for v in h.values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(ProbMeasure(h))
    }

    /// x ↦ μ(x − t), the measure moved by t.
    pub fn translate(&self, t: usize) -> ProbMeasure {
        let g = self.group();
        ProbMeasure(GroupFn::from_fn(g, |x| self.0.values[g.sub(x, t)]))
    }
}

/// μ_A = (|G|/|A|)·1_A.
pub fn normalized_indicator(g: &GroupSpec, a: &[usize]) -> Result<ProbMeasure> {
    if a.is_empty() {
        return invalid("normalized indicator of the empty set");
    }
    crate::group::check_set(g, a)?;
    let w = g.size() as f64 / a.len() as f64;
    let mut f = GroupFn::zeros(g);
    for &x in a {
        f.values[x] = w;
    }
    Ok(ProbMeasure(f))
}

// -------------------------------------------------------------------------
// Fourier transform
// -------------------------------------------------------------------------

/// One pass of the character sum along every axis. `sign` is −1 for the
/// forward kernel conj γ and +1 for the inverse kernel γ.
fn transform(g: &GroupSpec, input: Vec<Complex64>, sign: f64) -> Vec<Complex64> {
    let mut cur = input;
    let size = g.size();
    for (&n, &stride) in g.factors().iter().zip(g.strides()) {
        if n == 1 {
            continue;
        }
        let tw: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = sign * 2.0 * PI * k as f64 / n as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        let block = n * stride;
        let src = &cur;
        let kernel = |pos: usize| -> Complex64 {
            let b = pos / block;
            let within = pos % block;
            let e = within / stride;
            let base = b * block + within % stride;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut k = 0usize;
            for r in 0..n {
                acc += src[base + r * stride] * tw[k];
                k += e;
                if k >= n {
                    k -= n;
                }
            }
            acc
        };
        let next: Vec<Complex64> = if size.saturating_mul(n) >= PAR_THRESHOLD {
            (0..size).into_par_iter().map(kernel).collect()
        } else {
            (0..size).map(kernel).collect()
        };
        cur = next;
    }
    cur
}

/// f̂(γ) = 𝔼_x f(x)·conj γ(x).
pub fn fourier(f: &GroupFn) -> FourierFn {
    let g = &f.group;
    let n = g.size() as f64;
    let vals = transform(g, f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), -1.0);
    FourierFn { group: g.clone(), values: vals.into_iter().map(|z| z / n).collect() }
}

/// Σ_γ f̂(γ)γ(x) without discarding the imaginary part.
pub fn inverse_complex(fh: &FourierFn) -> Vec<Complex64> {
    transform(&fh.group, fh.values.clone(), 1.0)
}

/// Σ_γ f̂(γ)γ(x), required to be real: an imaginary residue above
/// 1e−9·max(1, max|value|) is an internal error.
pub fn inverse(fh: &FourierFn) -> Result<GroupFn> {
    let z = inverse_complex(fh);
    let scale = z.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    if let Some((i, v)) = z.iter().enumerate().find(|(_, v)| v.im.abs() > 1e-9 * scale) {
        return Err(ApcError::Internal(format!("inverse transform has imaginary residue {} at index {i}", v.im)));
    }
    GroupFn::new(&fh.group, z.into_iter().map(|v| v.re).collect())
}

// -------------------------------------------------------------------------
// convolution
// -------------------------------------------------------------------------

/// Direct O(|G|²) evaluation of the definition; the oracle for [`convolve`].
pub fn convolve_naive(f: &GroupFn, h: &GroupFn, mode: ConvMode) -> Result<GroupFn> {
    same_group(&f.group, &h.group)?;
    let g = &f.group;
    let n = g.size() as f64;
    Ok(GroupFn::from_fn(g, |x| {
        let mut acc = 0.0;
        for y in g.elements() {
            let z = match mode {
                ConvMode::Star => g.sub(x, y),
                ConvMode::Circ => g.add(x, y),
            };
            acc += f.values[y] * h.values[z];
        }
        acc / n
    }))
}

/// Sums over the support of the sparser input. Values are exact sums of the
/// nonzero products, so a point outside the sumset is exactly zero.
fn convolve_sparse(f: &GroupFn, h: &GroupFn, mode: ConvMode) -> GroupFn {
    let g = &f.group;
    let n = g.size();
    let sf = f.support();
    let sh = h.support();
    let mut out = vec![0.0; n];
    if sf.len() <= sh.len() {
        // star: out[y + z] += f(y)h(z); circ: out[z − y] += f(y)h(z)
        for &y in &sf {
            let fy = f.values[y];
            for &z in &sh {
                let x = match mode {
                    ConvMode::Star => g.add(y, z),
                    ConvMode::Circ => g.sub(z, y),
                };
                out[x] += fy * h.values[z];
            }
        }
    } else {
        for &z in &sh {
            let hz = h.values[z];
            for &y in &sf {
                let x = match mode {
                    ConvMode::Star => g.add(y, z),
                    ConvMode::Circ => g.sub(z, y),
                };
                out[x] += f.values[y] * hz;
            }
        }
    }
    let inv = 1.0 / n as f64;
    for v in out.iter_mut() {
        *v *= inv;
    }
    GroupFn { group: g.clone(), values: out }
}

fn convolve_fourier(f: &GroupFn, h: &GroupFn, mode: ConvMode) -> Result<GroupFn> {
    let fh = fourier(f);
    let hh = fourier(h);
    let prod = match mode {
        ConvMode::Star => fh.mul(&hh)?,
        // f∘h(x) = 𝔼_y f(y)h(x+y) has transform conj(f̂)·ĥ
        ConvMode::Circ => hh.mul_conj(&fh)?,
    };
    let mut out = inverse(&prod)?;
    if f.is_nonnegative() && h.is_nonnegative() {
        // Round-off below 1e−11 of the peak is not mass; clearing it keeps supports exact.
        let peak = out.sup_abs();
        for v in out.values.iter_mut() {
            if v.abs() <= 1e-11 * peak {
                *v = 0.0;
            }
        }
    }
    Ok(out)
}

/// f∗h or f∘h. Uses the support-sparse sum when it is cheaper than the
/// transform, otherwise Fourier multiplication.
pub fn convolve(f: &GroupFn, h: &GroupFn, mode: ConvMode) -> Result<GroupFn> {
    same_group(&f.group, &h.group)?;
    let g = &f.group;
    let nf = f.values.iter().filter(|&&v| v != 0.0).count();
    let nh = h.values.iter().filter(|&&v| v != 0.0).count();
    let sparse_cost = nf.saturating_mul(nh);
    let fourier_cost = 3 * g.size() * g.factors().iter().sum::<usize>();
    if sparse_cost <= fourier_cost {
        Ok(convolve_sparse(f, h, mode))
    } else {
        convolve_fourier(f, h, mode)
    }
}

/// f^{(k)} = f∗…∗f (k copies).
pub fn power_convolve(f: &GroupFn, k: usize) -> Result<GroupFn> {
    if k == 0 {
        return invalid("convolution power must be at least 1");
    }
    let mut acc = f.clone();
    for _ in 1..k {
        acc = convolve(&acc, f, ConvMode::Star)?;
    }
    Ok(acc)
}

// -------------------------------------------------------------------------
// norms and inner products
// -------------------------------------------------------------------------

/// ‖f‖_{p(μ)} for p ≥ 1 or p = ∞ (max of |f| over supp μ).
/// Computed as M·(𝔼(|f|/M)^p μ)^{1/p} with M the sup over supp μ, so huge p cannot overflow.
pub fn lp_norm(f: &GroupFn, p: f64, mu: Option<&ProbMeasure>) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return invalid(format!("norm exponent {p} is below 1"));
    }
    let n = f.values.len() as f64;
    let weights: Option<&[f64]> = match mu {
        Some(m) => {
            same_group(&f.group, m.group())?;
            Some(&m.0.values)
        }
        None => None,
    };
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut sup = 0.0f64;
    for (i, &v) in f.values.iter().enumerate() {
        if w(i) > 0.0 {
            sup = sup.max(v.abs());
        }
    }
    if p.is_infinite() || sup == 0.0 {
        return Ok(sup);
    }
    let mut acc = 0.0;
    for (i, &v) in f.values.iter().enumerate() {
        let wi = w(i);
        if wi > 0.0 {
            acc += (v.abs() / sup).powf(p) * wi;
        }
    }
    Ok(sup * (acc / n).powf(1.0 / p))
}

/// ‖f‖^p_{p(μ)} directly, for the identities that are stated in p-th powers.
pub fn lp_norm_pow(f: &GroupFn, p: u32, mu: Option<&ProbMeasure>) -> Result<f64> {
    let n = f.values.len() as f64;
    if let Some(m) = mu {
        same_group(&f.group, m.group())?;
    }
    let mut acc = 0.0;
    for (i, &v) in f.values.iter().enumerate() {
        let wi = mu.map_or(1.0, |m| m.0.values[i]);
        if wi > 0.0 {
            acc += v.abs().powi(p as i32) * wi;
        }
    }
    Ok(acc / n)
}

/// ⟨f, h⟩_μ = 𝔼 f·h·μ; μ uniform when absent.
pub fn inner(f: &GroupFn, h: &GroupFn, mu: Option<&ProbMeasure>) -> Result<f64> {
    same_group(&f.group, &h.group)?;
    let n = f.values.len() as f64;
    let s: f64 = match mu {
        Some(m) => {
            same_group(&f.group, m.group())?;
            f.values.iter().zip(&h.values).zip(&m.0.values).map(|((a, b), w)| a * b * w).sum()
        }
        None => f.values.iter().zip(&h.values).map(|(a, b)| a * b).sum(),
    };
    Ok(s / n)
}

/// ⟨μ_{A1}∘μ_{A2}, f⟩ = (1/(|A1||A2|)) Σ_{a1, a2} f(a2 − a1), by direct summation.
pub fn diff_pair_inner(g: &GroupSpec, a1: &[usize], a2: &[usize], f: &GroupFn) -> f64 {
    if a1.is_empty() || a2.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    for &x in a1 {
        for &y in a2 {
            acc += f.values[g.sub(y, x)];
        }
    }
    acc / (a1.len() as f64 * a2.len() as f64)
}

/// μ_A∘μ_B as a function, computed by counting differences exactly.
pub fn diff_convolution(g: &GroupSpec, a: &[usize], b: &[usize]) -> Result<GroupFn> {
    if a.is_empty() || b.is_empty() {
        return invalid("difference convolution of an empty set");
    }
    let mut counts = vec![0u64; g.size()];
    for &x in a {
        for &y in b {
            counts[g.sub(y, x)] += 1;
        }
    }
    let w = g.size() as f64 / (a.len() as f64 * b.len() as f64);
    GroupFn::new(g, counts.into_iter().map(|c| c as f64 * w).collect())
}

/// μ_A∗μ_B as a function, computed by counting sums exactly.
pub fn sum_convolution(g: &GroupSpec, a: &[usize], b: &[usize]) -> Result<GroupFn> {
    if a.is_empty() || b.is_empty() {
        return invalid("convolution of an empty set");
    }
    let mut counts = vec![0u64; g.size()];
    for &x in a {
        for &y in b {
            counts[g.add(x, y)] += 1;
        }
    }
    let w = g.size() as f64 / (a.len() as f64 * b.len() as f64);
    GroupFn::new(g, counts.into_iter().map(|c| c as f64 * w).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn indicator_of_point_and_whole_group() {
        let g = GroupSpec::cyclic(5).unwrap();
        let m = normalized_indicator(&g, &[0]).unwrap();
        assert_eq!(m.as_fn().values(), &[5.0, 0.0, 0.0, 0.0, 0.0]);
        let all: Vec<usize> = g.elements().collect();
        assert!(normalized_indicator(&g, &all).unwrap().as_fn().values().iter().all(|&v| v == 1.0));
        assert!(normalized_indicator(&g, &[]).is_err());
    }

    #[test]
    fn point_mass_star_on_z3() {
        let g = GroupSpec::cyclic(3).unwrap();
        let d = GroupFn::indicator(&g, &[0]);
        let c = convolve(&d, &d, ConvMode::Star).unwrap();
        assert!(close(c.get(0), 1.0 / 3.0) && c.get(1) == 0.0 && c.get(2) == 0.0);
    }

    #[test]
    fn self_difference_at_zero_is_inverse_density() {
        let g = GroupSpec::new(&[4, 5]).unwrap();
        let a = vec![0, 3, 7, 11, 19];
        let mu = normalized_indicator(&g, &a).unwrap();
        let c = convolve(mu.as_fn(), mu.as_fn(), ConvMode::Circ).unwrap();
        assert!(close(c.get(0), 20.0 / 5.0));
        assert!(close(c.max(), 4.0));
    }

    #[test]
    fn fourier_of_constant_and_delta() {
        let g = GroupSpec::new(&[3, 4]).unwrap();
        let one = fourier(&GroupFn::constant(&g, 1.0));
        assert!((one.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(one.values()[1..].iter().all(|z| z.norm() < 1e-12));
        let delta = fourier(&GroupFn::indicator(&g, &[0]));
        assert!(delta.values().iter().all(|z| (z - Complex64::new(1.0 / 12.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn fourier_matches_character_sum() {
        let g = GroupSpec::new(&[3, 5, 2]).unwrap();
        let f = GroupFn::from_fn(&g, |x| (x as f64 * 0.37).sin());
        let fh = fourier(&f);
        for chi in g.elements() {
            let direct: Complex64 =
                g.elements().map(|x| f.get(x) * g.char_value(chi, x).conj()).sum::<Complex64>() / g.size() as f64;
            assert!((direct - fh.get(chi)).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_and_sparse_paths_agree() {
        let g = GroupSpec::cyclic(31).unwrap();
        let f = GroupFn::from_fn(&g, |x| ((x * 7) % 5) as f64 - 1.5);
        let h = GroupFn::from_fn(&g, |x| ((x * 3) % 4) as f64);
        for mode in [ConvMode::Star, ConvMode::Circ] {
            let a = convolve_fourier(&f, &h, mode).unwrap();
            let b = convolve_sparse(&f, &h, mode);
            let c = convolve_naive(&f, &h, mode).unwrap();
            for x in g.elements() {
                assert!(close(a.get(x), c.get(x)) && close(b.get(x), c.get(x)));
            }
        }
    }

    #[test]
    fn lp_norm_of_constant_and_large_exponent() {
        let g = GroupSpec::cyclic(6).unwrap();
        let f = GroupFn::constant(&g, -2.5);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!(close(lp_norm(&f, p, None).unwrap(), 2.5));
        }
        assert!(lp_norm(&f, 0.5, None).is_err());
        let h = GroupFn::from_fn(&g, |x| 1e3 * (x + 1) as f64);
        let v = lp_norm(&h, 5000.0, None).unwrap();
        assert!(v.is_finite() && v <= 6e3 && v > 5.9e3);
    }

    #[test]
    fn sup_norm_respects_support_of_measure() {
        let g = GroupSpec::cyclic(4).unwrap();
        let f = GroupFn::new(&g, vec![1.0, 9.0, 2.0, 3.0]).unwrap();
        let mu = normalized_indicator(&g, &[0, 2]).unwrap();
        assert_eq!(lp_norm(&f, f64::INFINITY, Some(&mu)).unwrap(), 2.0);
    }

    #[test]
    fn inverse_rejects_non_real_image() {
        let g = GroupSpec::cyclic(5).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 5];
        v[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(inverse(&FourierFn::new(&g, v).unwrap()), Err(ApcError::Internal(_))));
    }

    #[test]
    fn csv_round_trip() {
        let g = GroupSpec::new(&[2, 3]).unwrap();
        let f = GroupFn::from_fn(&g, |x| x as f64 / 3.0);
        assert_eq!(GroupFn::from_csv(&g, &f.to_csv()).unwrap(), f);
        assert!(GroupFn::from_csv(&g, "index,value\n0,1\n").is_err());
    }

    #[test]
    fn power_convolve_basics() {
        let g = GroupSpec::cyclic(7).unwrap();
        let one = GroupFn::constant(&g, 1.0);
        assert!(power_convolve(&one, 4).unwrap().values().iter().all(|&v| close(v, 1.0)));
        assert!(power_convolve(&one, 0).is_err());
    }
}
