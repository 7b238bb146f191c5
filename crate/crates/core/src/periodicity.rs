//! Almost periods of μ_{A1}∘μ_{A2}∗1_S, large spectra, and the Chang-type
//! containers (a subspace or a Bohr set) on which every large character is
//! nearly trivial.

use serde::Serialize;

use crate::bohr::BohrSet;
use crate::error::{invalid, ApcError, Result};
use crate::group::{check_set, GroupSpec};
use crate::harmonic::{
    convolve, diff_convolution, diff_pair_inner, fourier, normalized_indicator, power_convolve, ConvMode, GroupFn,
};
use crate::subspace::Subspace;

/// h = μ_{A1}∘μ_{A2}∗1_S.
pub fn smoothed_indicator(g: &GroupSpec, a1: &[usize], a2: &[usize], s: &[usize]) -> Result<GroupFn> {
    let m = diff_convolution(g, a1, a2)?;
    convolve(&m, &GroupFn::indicator(g, s), ConvMode::Star)
}

/// max_x |h(x + t) − h(x)|.
pub fn shift_defect(h: &GroupFn, t: usize) -> f64 {
    let g = h.group();
    let v = h.values();
    g.elements().map(|x| (v[g.add(x, t)] - v[x]).abs()).fold(0.0, f64::max)
}

/// `almost_periods`: X = {t ∈ container : ‖h(· + t) − h‖_∞ ≤ ε/k} for
/// h = μ_{A1}∘μ_{A2}∗1_S. Always contains 0. Then ‖μ_X^{(k)}∗h − h‖_∞ ≤ ε
/// by telescoping over the k shifts.
pub fn almost_periods(
    g: &GroupSpec,
    a1: &[usize],
    a2: &[usize],
    s: &[usize],
    container: &[usize],
    k: usize,
    eps: f64,
) -> Result<Vec<usize>> {
    for set in [a1, a2, container] {
        check_set(g, set)?;
        if set.is_empty() {
            return invalid("almost periods need non-empty A1, A2 and container");
        }
    }
    check_set(g, s)?;
    if k == 0 || !(eps > 0.0) {
        return invalid("need k ≥ 1 and ε > 0");
    }
    if !container.contains(&0) {
        return Err(ApcError::Precondition("container must contain 0".into()));
    }
    let h = smoothed_indicator(g, a1, a2, s)?;
    let tol = eps / k as f64;
    use rayon::prelude::*;
    let x: Vec<usize> = container.par_iter().copied().filter(|&t| shift_defect(&h, t) <= tol).collect();
    Ok(x)
}

/// `verify_smoothing`: ‖μ_X^{(k)}∗h − h‖_∞.
pub fn verify_smoothing(g: &GroupSpec, x: &[usize], k: usize, a1: &[usize], a2: &[usize], s: &[usize]) -> Result<f64> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let h = smoothed_indicator(g, a1, a2, s)?;
    let mu = normalized_indicator(g, x)?;
    let mk = power_convolve(mu.as_fn(), k)?;
    let sm = convolve(&mk, &h, ConvMode::Star)?;
    Ok(sm.sub(&h)?.sup_abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub theta: f64,
    /// Character indices with |μ̂_X(γ)| ≥ θ, ascending.
    pub chars: Vec<usize>,
}

/// Δ_θ(X) = {γ : |μ̂_X(γ)| ≥ θ}, with a 1e-9 allowance for round-off.
pub fn spectrum(g: &GroupSpec, x: &[usize], theta: f64) -> Result<Spectrum> {
    let mu = normalized_indicator(g, x)?;
    let fh = fourier(mu.as_fn());
    let chars = fh.values().iter().enumerate().filter(|(_, v)| v.norm() >= theta - 1e-9).map(|(i, _)| i).collect();
    Ok(Spectrum { theta, chars })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChangSubspace {
    pub subspace: Subspace,
    pub codim: usize,
    pub spectrum_size: usize,
}

/// `chang_subspace`: V = Δ_{1/2}(X)^⊥ in 𝔽_q^n, so γ(v) = 1 for every
/// γ ∈ Δ_{1/2}(X) and v ∈ V, checked in integer arithmetic on a basis.
pub fn chang_subspace(g: &GroupSpec, x: &[usize]) -> Result<ChangSubspace> {
    let q = g.prime_power_base().ok_or_else(|| ApcError::InvalidArgument("chang_subspace needs 𝔽_q^n".into()))?;
    if x.is_empty() {
        return invalid("X must be non-empty");
    }
    let spec = spectrum(g, x, 0.5)?;
    let rows: Vec<Vec<usize>> = spec.chars.iter().map(|&c| g.residues(c)).collect();
    let v = Subspace::null_space(q, g.rank(), &rows)?;
    for r in &rows {
        for b in &v.basis {
            if r.iter().zip(b).map(|(a, c)| a * c).sum::<usize>() % q != 0 {
                return Err(ApcError::Internal("annihilator basis vector is not killed by the spectrum".into()));
            }
        }
    }
    Ok(ChangSubspace { codim: v.codim(), subspace: v, spectrum_size: spec.chars.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChangBohr {
    pub bohr: BohrSet,
    /// Characters of Δ_{1/2}(X) not already represented in the host frequencies.
    pub added: Vec<usize>,
    pub spectrum_size: usize,
}

/// `chang_bohr`: B′ = regularized Bohr set on Λ ∪ Δ_{1/2}(X) with radius
/// min(ρ, ν). Conjugate pairs and the trivial character are represented once
/// or not at all; neither changes membership. |1 − γ(t)| ≤ ν then holds for
/// every γ ∈ Δ_{1/2}(X) and t ∈ B′.
pub fn chang_bohr(host: &BohrSet, x: &[usize], nu: f64) -> Result<ChangBohr> {
    if !(nu > 0.0) {
        return invalid("ν must be positive");
    }
    let g = host.group();
    if x.is_empty() {
        return invalid("X must be non-empty");
    }
    let spec = spectrum(g, x, 0.5)?;
    let mut freqs: Vec<usize> = host.freqs().to_vec();
    let mut added = Vec::new();
    for &c in &spec.chars {
        if c == 0 || freqs.contains(&c) || freqs.contains(&g.conj_char(c)) {
            continue;
        }
        freqs.push(c);
        added.push(c);
    }
    freqs.sort_unstable();
    let radius = host.radius().min(nu);
    let b = BohrSet::new(g, &freqs, radius)?.regularize()?;
    for &t in b.members() {
        for &c in &spec.chars {
            if g.chord(c, t) > nu * (1.0 + 1e-12) {
                return Err(ApcError::Internal("Chang Bohr set violates the spectrum bound".into()));
            }
        }
    }
    Ok(ChangBohr { bohr: b, added, spectrum_size: spec.chars.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsBound {
    /// max_{t ∈ T} ‖μ_X^{(k)}∗F(· + t) − μ_X^{(k)}∗F‖_∞, F = μ_A∘μ_A∘(μ_{A1}∘μ_{A2}).
    pub lhs: f64,
    /// (ν + 2^{1−k})·⟨μ_A∘μ_A, μ_{A1}∘μ_{A1}⟩^{1/2}⟨μ_A∘μ_A, μ_{A2}∘μ_{A2}⟩^{1/2}.
    pub rhs: f64,
    /// Σ_γ |F̂(γ)| and the Cauchy–Schwarz product bounding it.
    pub fourier_l1: f64,
    pub cs_product: f64,
    /// T = {t : |1 − γ(t)| ≤ ν for all γ ∈ Δ_{1/2}(X)}.
    pub shifts: usize,
}

/// Largest set of shifts on which every large character of X moves by at most ν.
pub fn spectral_kernel(g: &GroupSpec, x: &[usize], nu: f64) -> Result<Vec<usize>> {
    let spec = spectrum(g, x, 0.5)?;
    Ok(g.elements()
        .filter(|&t| spec.chars.iter().all(|&c| if nu == 0.0 { g.phase(c, t) == 0 } else { g.chord(c, t) <= nu }))
        .collect())
}

/// `cs_smoothing_bound` with ν = 0 (exact kernel) when absent.
pub fn cs_smoothing_bound(
    g: &GroupSpec,
    a: &[usize],
    a1: &[usize],
    a2: &[usize],
    x: &[usize],
    k: usize,
    nu: Option<f64>,
) -> Result<CsBound> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    let nu = nu.unwrap_or(0.0);
    if !(nu >= 0.0) {
        return invalid("ν must be non-negative");
    }
    let aa = diff_convolution(g, a, a)?;
    let m12 = diff_convolution(g, a1, a2)?;
    let f = convolve(&aa, &m12, ConvMode::Circ)?;
    let mu = normalized_indicator(g, x)?;
    let mk = power_convolve(mu.as_fn(), k)?;
    let sm = convolve(&mk, &f, ConvMode::Star)?;
    let shifts = spectral_kernel(g, x, nu)?;
    use rayon::prelude::*;
    let lhs = shifts.par_iter().map(|&t| shift_defect(&sm, t)).reduce(|| 0.0, f64::max);
    let s1 = diff_pair_inner(g, a1, a1, &aa).max(0.0).sqrt();
    let s2 = diff_pair_inner(g, a2, a2, &aa).max(0.0).sqrt();
    let fourier_l1 = fourier(&f).l1();
    Ok(CsBound {
        lhs,
        rhs: (nu + 2f64.powi(1 - k as i32)) * s1 * s2,
        fourier_l1,
        cs_product: s1 * s2,
        shifts: shifts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periods_of_a_subgroup_indicator() {
        let g = GroupSpec::cyclic(12).unwrap();
        let all: Vec<usize> = g.elements().collect();
        let s = vec![0, 4, 8];
        let x = almost_periods(&g, &all, &all, &s, &all, 3, 1e-9).unwrap();
        assert_eq!(x, all);
        // a single point: h = 1_S up to scaling, periods are the stabilizer of S
        let x = almost_periods(&g, &[0], &[0], &s, &all, 1, 1e-9).unwrap();
        assert_eq!(x, vec![0, 4, 8]);
        let d = verify_smoothing(&g, &x, 4, &[0], &[0], &s).unwrap();
        assert!(d <= 1e-12);
    }

    #[test]
    fn chang_on_subspace() {
        let g = GroupSpec::power(3, 3).unwrap();
        let v = Subspace::from_generators(3, 3, &[vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
        let x = v.members(&g);
        let c = chang_subspace(&g, &x).unwrap();
        assert_eq!(c.subspace, v);
        assert_eq!(c.codim, 1);
        let whole: Vec<usize> = g.elements().collect();
        assert_eq!(chang_subspace(&g, &whole).unwrap().codim, 0);
        assert_eq!(chang_subspace(&g, &[0]).unwrap().codim, 3);
    }

    #[test]
    fn chang_bohr_guarantee() {
        let g = GroupSpec::cyclic(101).unwrap();
        let host = BohrSet::new(&g, &[1], 1.0).unwrap().regularize().unwrap();
        let x: Vec<usize> = vec![0, 1, 100];
        let cb = chang_bohr(&host, &x, 0.3).unwrap();
        assert!(cb.bohr.radius() <= 0.3);
        assert!(cb.bohr.is_regular());
    }

    #[test]
    fn cs_bound_holds_on_small_case() {
        let g = GroupSpec::power(3, 2).unwrap();
        let a = vec![0, 1, 3, 4];
        let x = vec![0];
        let b = cs_smoothing_bound(&g, &a, &a, &a, &x, 2, None).unwrap();
        assert!(b.lhs <= b.rhs + 1e-9);
        assert!(b.fourier_l1 <= b.cs_product + 1e-9);
    }
}
