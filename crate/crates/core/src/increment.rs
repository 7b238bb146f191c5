//! Density increment steps and the drive that iterates them.
//!
//! A step either certifies many 3-APs or moves A into a translate of a
//! smaller structured host (a subspace of 𝔽_q^n, or a Bohr set in ℤ/N) on
//! which its relative density grows by a factor σ. The analytic path runs
//! unbalancing, sifting, almost periodicity and a Chang container in turn,
//! checking each intermediate inequality numerically. When it stops at a
//! desk-scale limit (a search budget, a p or k cap) the step may fall back to
//! the brute-force increment oracle; the trace records which path produced
//! each certificate. A failed inequality that should hold is reported as a
//! falsification, never suppressed.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::bohr::{narrow_density_dichotomy, smoothing_measure, BohrDescriptor, BohrSet, NarrowDensity};
use crate::error::{invalid, ApcError, Result};
use crate::extremal::{ap_ratio, count_3aps_direct, increment_oracle, Family};
use crate::group::{check_set, dilate_set, intersect, is_subset, normalize_set, translate_set, GroupSpec};
use crate::harmonic::{
    convolve, diff_convolution, diff_pair_inner, fourier, inner, lp_norm, normalized_indicator, power_convolve,
    sum_convolution, ConvMode, GroupFn, ProbMeasure,
};
use crate::periodicity::{
    almost_periods, chang_bohr, chang_subspace, shift_defect, smoothed_indicator, verify_smoothing,
};
use crate::sifting::{bohr_iterated_sift, ff_iterated_sift, SiftConfig, DEFAULT_C};
use crate::subspace::{subspaces_up_to_codim, Subspace};

pub const TRACE_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Nesting constant c in B′ ⊂_{c/d} B.
    pub c: f64,
    /// Largest exponent tried by the L^p scans.
    pub p_cap: usize,
    /// Drive step cap; 0 uses ⌈log_{1+2^-12} α^{-1}⌉.
    pub j_cap: usize,
    /// Largest k accepted for μ_X^{(k)}.
    pub k_cap: usize,
    /// ε values tried in order by the narrow density dichotomy.
    pub eps_grid: Vec<f64>,
    /// Relative slack in numeric verifications.
    pub tolerance: f64,
    pub seed: u64,
    pub fallback_to_oracle: bool,
    /// Search nodes and samples for every weighted sift.
    pub sift_node_budget: u64,
    pub sift_samples: usize,
    /// Chang radius ν and smoothing power k of the cyclic step.
    pub nu: f64,
    pub k_cyclic: usize,
    /// Most hosts the increment oracle may enumerate.
    pub oracle_cap: usize,
    /// Characters of largest |μ̂_A| combined into the Bohr oracle family.
    pub oracle_chars: usize,
    /// Radius halvings in the Bohr oracle family.
    pub oracle_radii: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            c: DEFAULT_C,
            p_cap: 64,
            j_cap: 0,
            k_cap: 64,
            eps_grid: vec![1.0 / 8192.0],
            tolerance: 1e-9,
            seed: 0,
            fallback_to_oracle: true,
            sift_node_budget: 200_000,
            sift_samples: 2_000,
            nu: 1.0 / 262_144.0,
            k_cyclic: 19,
            oracle_cap: 100_000,
            oracle_chars: 6,
            oracle_radii: 12,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c <= 0.01) {
            return invalid("c must lie in (0, 1/100]");
        }
        if self.p_cap == 0 || self.k_cap == 0 {
            return invalid("p_cap and k_cap must be positive");
        }
        if self.eps_grid.is_empty() || self.eps_grid.iter().any(|&e| !(e > 0.0 && e < 0.25)) {
            return invalid("eps_grid entries must lie in (0, 1/4)");
        }
        if !(self.tolerance >= 0.0 && self.tolerance < 1e-3) {
            return invalid("tolerance must lie in [0, 1e-3)");
        }
        if !(self.nu > 0.0) || self.k_cyclic == 0 {
            return invalid("ν and k must be positive");
        }
        Ok(())
    }

    fn sift(&self) -> SiftConfig {
        SiftConfig {
            node_budget: self.sift_node_budget,
            samples: self.sift_samples,
            seed: self.seed,
            c: self.c,
            ..SiftConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Host {
    Subspace { subspace: Subspace },
    Bohr { bohr: BohrDescriptor },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum IncrementCertificate {
    /// count ≥ threshold, both counted in the current host.
    ManyAps { count: u64, threshold: f64, alpha: f64 },
    /// (A + translate) ∩ host has relative density new_density ≥ σ·old_density.
    DensityIncrement { host: Host, translate: usize, sigma: f64, old_density: f64, new_density: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepPath {
    Analytic,
    Oracle,
}

/// One step: the certificate plus everything needed to audit it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub certificate: IncrementCertificate,
    pub path: StepPath,
    /// Which case of the step produced the certificate.
    pub branch: String,
    /// Parameters chosen along the way (p, k, ε, ν, …).
    pub params: BTreeMap<String, f64>,
    /// Verified inequalities as lhs − rhs, each ≥ 0 up to tolerance.
    pub slacks: BTreeMap<String, f64>,
    /// The limit that stopped the analytic path, when the oracle stepped in.
    pub analytic_stop: Option<String>,
}

struct Audit {
    params: BTreeMap<String, f64>,
    slacks: BTreeMap<String, f64>,
    tol: f64,
}

impl Audit {
    fn new(cfg: &PipelineConfig) -> Self {
        Audit { params: BTreeMap::new(), slacks: BTreeMap::new(), tol: cfg.tolerance }
    }

    fn param(&mut self, k: &str, v: f64) {
        self.params.insert(k.to_string(), v);
    }

    /// Records lhs − rhs and fails on a violated proven inequality.
    fn ge(&mut self, name: &str, lhs: f64, rhs: f64) -> Result<()> {
        self.slacks.insert(name.to_string(), lhs - rhs);
        if lhs >= rhs - self.tol * rhs.abs().max(1.0) {
            Ok(())
        } else {
            Err(ApcError::Internal(format!("{name}: {lhs} < {rhs}")))
        }
    }

    fn report(self, certificate: IncrementCertificate, branch: &str) -> StepReport {
        StepReport {
            certificate,
            path: StepPath::Analytic,
            branch: branch.to_string(),
            params: self.params,
            slacks: self.slacks,
            analytic_stop: None,
        }
    }
}

/// `unbalance_exponent`: the smallest p′ ≤ p_cap with ‖f + 1‖_{p′(ν)} ≥ 1 + ε/2,
/// for f with f̂ ≥ 0, ν with ν̂ ≥ 0 and ‖f‖_{p(ν)} ≥ ε.
pub fn unbalance_exponent(f: &GroupFn, nu: &ProbMeasure, p: f64, eps: f64, p_cap: usize) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) || !(p >= 1.0) {
        return invalid("need ε ∈ (0, 1] and p ≥ 1");
    }
    for (name, fh) in [("f", fourier(f)), ("ν", fourier(nu.as_fn()))] {
        let scale = fh.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
        if fh.values().iter().any(|v| v.re < -1e-9 * scale || v.im.abs() > 1e-9 * scale) {
            return Err(ApcError::Precondition(format!("{name} has a negative Fourier coefficient")));
        }
    }
    if lp_norm(f, p, Some(nu))? < eps {
        return Err(ApcError::Precondition("‖f‖_p(ν) is below ε".into()));
    }
    let g1 = f.add_const(1.0);
    for q in 1..=p_cap {
        if lp_norm(&g1, q as f64, Some(nu))? >= 1.0 + eps / 2.0 {
            return Ok(q);
        }
    }
    Err(ApcError::NotFound(format!("no exponent up to {p_cap} unbalances f + 1")))
}

fn density_in(g: &GroupSpec, a: &[usize], host: &[usize], t: usize) -> f64 {
    intersect(&translate_set(g, a, t), host).len() as f64 / host.len() as f64
}

// -------------------------------------------------------------------------
// finite-field step
// -------------------------------------------------------------------------

const FF_K: usize = 7;

/// `ff_step` on A ⊆ 𝔽_q^n (q odd).
pub fn ff_step(g: &GroupSpec, a: &[usize], cfg: &PipelineConfig) -> Result<StepReport> {
    cfg.validate()?;
    let q = g.prime_power_base().ok_or_else(|| ApcError::InvalidArgument("ff_step needs 𝔽_q^n".into()))?;
    if q % 2 == 0 {
        return invalid("ff_step needs odd q");
    }
    check_set(g, a)?;
    if a.is_empty() {
        return invalid("A must be non-empty");
    }
    let alpha = a.len() as f64 / g.size() as f64;
    let ratio = ap_ratio(g, a);
    if (ratio - 1.0).abs() <= 0.5 {
        let count = count_3aps_direct(g, a);
        let threshold = 0.5 * alpha.powi(3) * (g.size() as f64).powi(2);
        let mut au = Audit::new(cfg);
        au.param("ap_ratio", ratio);
        au.ge("count ≥ ½α³|G|²", count as f64, threshold)?;
        return Ok(au.report(IncrementCertificate::ManyAps { count, threshold, alpha }, "many-aps"));
    }
    match ff_analytic(g, a, alpha, cfg) {
        Ok(r) => Ok(r),
        Err(e @ ApcError::Internal(_)) | Err(e @ ApcError::InvalidArgument(_)) => Err(e),
        Err(e) => ff_fallback(g, a, alpha, cfg, e),
    }
}

fn ff_analytic(g: &GroupSpec, a: &[usize], alpha: f64, cfg: &PipelineConfig) -> Result<StepReport> {
    let mut au = Audit::new(cfg);
    let all: Vec<usize> = g.elements().collect();
    let aa = diff_convolution(g, a, a)?;
    let p = (1..=cfg.p_cap)
        .find(|&p| lp_norm(&aa, p as f64, None).map_or(false, |v| v >= 1.125))
        .ok_or_else(|| ApcError::NotFound(format!("‖μ_A∘μ_A‖_p < 1 + 2^-3 for every p ≤ {}", cfg.p_cap)))?;
    au.param("p", p as f64);
    if FF_K > cfg.k_cap {
        return Err(ApcError::ResourceLimit(format!("k = {FF_K} exceeds k_cap")));
    }
    let it = ff_iterated_sift(g, a, p, &cfg.sift())?;
    let sigma = it.sigma;
    au.param("sigma", sigma);
    au.param("p_sift", it.p_used as f64);
    au.param("chain", it.chain.len() as f64);
    au.param("k", FF_K as f64);
    let eps = 1.0 / 128.0;
    let s: Vec<usize> = g.elements().filter(|&x| aa.get(x) >= it.level).collect();
    let x = almost_periods(g, &it.a1, &it.a2, &s, &all, FF_K, eps)?;
    au.param("periods", x.len() as f64);
    let vs = verify_smoothing(g, &x, FF_K, &it.a1, &it.a2, &s)?;
    au.ge("smoothing ≤ ε", eps, vs)?;
    let cs = chang_subspace(g, &x)?;
    let v = cs.subspace;
    au.param("codim", cs.codim as f64);
    au.param("spectrum", cs.spectrum_size as f64);

    let m12 = diff_convolution(g, &it.a1, &it.a2)?;
    let mu_x = normalized_indicator(g, &x)?;
    let mk = power_convolve(mu_x.as_fn(), FF_K)?;
    let m12k = convolve(&m12, &mk, ConvMode::Star)?;
    let s_ind = GroupFn::indicator(g, &s);
    au.ge("⟨1_S, μ_{A1}∘μ_{A2}∗μ_X^(k)⟩ ≥ 1 − 2^-6", inner(&s_ind, &m12k, None)?, 1.0 - 1.0 / 64.0)?;
    au.ge("⟨μ_A∘μ_A, μ_{A1}∘μ_{A2}∗μ_X^(k)⟩ ≥ (1−2^-5)σ", inner(&aa, &m12k, None)?, (1.0 - 1.0 / 32.0) * sigma)?;
    let f = convolve(&aa, &m12, ConvMode::Circ)?;
    let gk = convolve(&mk, &f, ConvMode::Star)?;
    au.ge("μ_X^(k)∗F(0) ≥ (1−2^-5)σ", gk.get(0), (1.0 - 1.0 / 32.0) * sigma)?;
    let vm = v.members(g);
    let defect = vm.iter().map(|&t| shift_defect(&gk, t)).fold(0.0, f64::max);
    let cs_rhs = 2f64.powi(1 - FF_K as i32) * it.self_corr[0].sqrt() * it.self_corr[1].sqrt();
    au.ge("shift defect ≤ 2^{1−k}·CS", cs_rhs, defect)?;
    au.ge("CS ≤ 2^{2−k}σ", 2f64.powi(2 - FF_K as i32) * sigma, cs_rhs)?;
    let mu_v = normalized_indicator(g, &vm)?;
    let vg = convolve(mu_v.as_fn(), &gk, ConvMode::Star)?;
    au.ge("‖μ_V∗G − G‖ ≤ 2^-5σ", sigma / 32.0, vg.sub(&gk)?.sup_abs())?;
    au.ge("‖μ_V∗G‖ ≥ (1−2^-4)σ", vg.sup_abs(), (1.0 - 1.0 / 16.0) * sigma)?;
    let va = sum_convolution(g, &vm, a)?;
    let xmax = va.argmax();
    let peak = va.get(xmax);
    au.ge("‖μ_V∗μ_A‖ ≥ (1−2^-4)σ", peak, (1.0 - 1.0 / 16.0) * sigma)?;
    au.ge("‖μ_V∗μ_A‖ ≥ 1 + 2^-5", peak, 1.0 + 1.0 / 32.0)?;
    let translate = g.neg(xmax);
    let new_density = density_in(g, a, &vm, translate);
    au.ge("new density ≥ σα", new_density, peak * alpha)?;
    let cert = IncrementCertificate::DensityIncrement {
        host: Host::Subspace { subspace: v },
        translate,
        sigma: peak,
        old_density: alpha,
        new_density,
    };
    Ok(au.report(cert, "density-increment"))
}

fn ff_fallback(g: &GroupSpec, a: &[usize], alpha: f64, cfg: &PipelineConfig, why: ApcError) -> Result<StepReport> {
    if !cfg.fallback_to_oracle {
        return Err(why);
    }
    let q = g.prime_power_base().expect("checked by caller");
    let subs = subspaces_up_to_codim(q, g.rank(), g.rank(), cfg.oracle_cap)?;
    let threshold = 1.0 + 1.0 / 32.0;
    for m in 1..=g.rank() {
        let level: Vec<Subspace> = subs.iter().filter(|v| v.codim() == m).cloned().collect();
        let mut best: Option<(f64, usize, Subspace)> = None;
        for v in level {
            let (t, c) = crate::extremal::best_translate_subspace(g, a, &v);
            let d = c as f64 / v.size() as f64;
            if best.as_ref().map_or(true, |b| d > b.0) {
                best = Some((d, t, v));
            }
        }
        if let Some((d, t, v)) = best {
            if d >= threshold * alpha {
                let mut params = BTreeMap::new();
                params.insert("codim".into(), m as f64);
                let mut slacks = BTreeMap::new();
                slacks.insert("new density ≥ (1+2^-5)α".into(), d - threshold * alpha);
                return Ok(StepReport {
                    certificate: IncrementCertificate::DensityIncrement {
                        host: Host::Subspace { subspace: v },
                        translate: t,
                        sigma: d / alpha,
                        old_density: alpha,
                        new_density: d,
                    },
                    path: StepPath::Oracle,
                    branch: "density-increment".into(),
                    params,
                    slacks,
                    analytic_stop: Some(format!("{}: {why}", why.kind())),
                });
            }
        }
    }
    Err(ApcError::NotFound(format!("analytic path stopped ({why}) and no subspace gives a 1 + 2^-5 increment")))
}

// -------------------------------------------------------------------------
// cyclic step
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum HolderLift {
    /// ⟨μ_A∗μ_A, μ_C⟩ ≥ ½μ(B)^{-1}.
    ManyAps { value: f64 },
    /// ‖μ_A∗μ_{B′}‖_∞ ≥ 2μ(B)^{-1} at x.
    Increment { x: usize, value: f64 },
    /// B‴ ⊂_{c/d} B″ ⊂_{c/d} B′ and ‖μ_A∘μ_A‖_{p(μ_{B″}∘μ_{B″}∗μ_{B‴}∘μ_{B‴})} ≥ (1+2^-5)μ(B)^{-1}.
    Lp { inner: BohrSet, innermost: BohrSet, p: usize, norm: f64 },
}

/// `holder_lift` for A ⊆ B, regular B, B′ ⊆ B_{c/d}, non-empty C ⊆ B′.
pub fn holder_lift(a: &[usize], b: &BohrSet, b1: &BohrSet, c: &[usize], cfg: &PipelineConfig) -> Result<HolderLift> {
    let g = b.group();
    check_set(g, a)?;
    check_set(g, c)?;
    if a.is_empty() || c.is_empty() {
        return invalid("A and C must be non-empty");
    }
    if !b.is_regular() {
        return Err(ApcError::Precondition("B is not regular".into()));
    }
    let d = b.rank().max(1) as f64;
    if !is_subset(a, b.members()) || !is_subset(c, b1.members()) {
        return Err(ApcError::Precondition("need A ⊆ B and C ⊆ B′".into()));
    }
    if !is_subset(b1.members(), b.dilate(cfg.c / d).members()) {
        return Err(ApcError::Precondition("B′ is not inside B_{c/d}".into()));
    }
    let inv = 1.0 / b.density();
    let ss = sum_convolution(g, a, a)?;
    let mu_c = normalized_indicator(g, c)?;
    let v = inner(&ss, mu_c.as_fn(), None)?;
    if v >= 0.5 * inv {
        return Ok(HolderLift::ManyAps { value: v });
    }
    let ab = sum_convolution(g, a, b1.members())?;
    let x = ab.argmax();
    if ab.get(x) >= 2.0 * inv {
        return Ok(HolderLift::Increment { x, value: ab.get(x) });
    }
    let d1 = b1.rank().max(1) as f64;
    let b2 = b1.nested_regular(cfg.c / d1)?;
    let b3 = b2.nested_regular(cfg.c / d1)?;
    let nu = smoothing_measure(&b2, &b3)?;
    let aa = diff_convolution(g, a, a)?;
    let target = (1.0 + 1.0 / 32.0) * inv;
    let sup = lp_norm(&aa, f64::INFINITY, Some(&nu))?;
    if sup < target {
        return Err(ApcError::Internal(format!(
            "all three cases fail: even the sup of μ_A∘μ_A over the smoothing support is {sup} < {target}"
        )));
    }
    for p in 1..=cfg.p_cap {
        let n = lp_norm(&aa, p as f64, Some(&nu))?;
        if n >= target {
            return Ok(HolderLift::Lp { inner: b2, innermost: b3, p, norm: n });
        }
    }
    Err(ApcError::NotFound(format!("no exponent up to {} reaches (1+2^-5)μ(B)^-1", cfg.p_cap)))
}

/// The regular pair B¹ ⊂_{c/d} B, B² ⊂_{c/2d} B¹ used by the cyclic step.
pub fn cyclic_nest(b: &BohrSet, c: f64) -> Result<(BohrSet, BohrSet)> {
    let d = b.rank().max(1) as f64;
    let b1 = b.nested_regular(c / d)?;
    let b2 = b1.nested_regular(c / (2.0 * d))?;
    Ok((b1, b2))
}

/// `cyclic_step` on A ⊆ B in ℤ/N (N odd) with B¹ ⊂_{c/d} B, B² ⊂_{c/2d} B¹.
pub fn cyclic_step(a: &[usize], b: &BohrSet, b1: &BohrSet, b2: &BohrSet, cfg: &PipelineConfig) -> Result<StepReport> {
    cfg.validate()?;
    let g = b.group();
    if !g.is_cyclic() || g.size() % 2 == 0 {
        return invalid("cyclic_step needs ℤ/N with N odd");
    }
    check_set(g, a)?;
    if a.is_empty() || !is_subset(a, b.members()) {
        return Err(ApcError::Precondition("A must be a non-empty subset of B".into()));
    }
    if !b.is_regular() || !b1.is_regular() || !b2.is_regular() {
        return Err(ApcError::Precondition("B, B¹, B² must be regular".into()));
    }
    let alpha = a.len() as f64 / b.size() as f64;
    match cyclic_analytic(a, b, b1, b2, alpha, cfg) {
        Ok(r) => Ok(r),
        Err(e @ ApcError::Internal(_)) | Err(e @ ApcError::InvalidArgument(_)) => Err(e),
        Err(e) => cyclic_fallback(a, b, b1, b2, alpha, cfg, e),
    }
}

fn many_aps_cyclic(a: &[usize], alpha: f64, b1: &BohrSet, b2: &BohrSet) -> (u64, f64) {
    let g = b1.group();
    let n = g.size() as f64;
    let count = count_3aps_direct(g, a);
    let threshold = 0.25 * alpha.powi(3) * n * n * b1.density() * b2.density();
    (count, threshold)
}

fn cyclic_analytic(
    a: &[usize],
    b: &BohrSet,
    b1: &BohrSet,
    b2: &BohrSet,
    alpha: f64,
    cfg: &PipelineConfig,
) -> Result<StepReport> {
    let g = b.group();
    let mut au = Audit::new(cfg);
    let d = b.rank().max(1) as f64;
    au.param("rank", b.rank() as f64);
    au.param("c", cfg.c);
    let delta = b1.radius() / b.radius().max(f64::MIN_POSITIVE);
    let mut nd = None;
    let mut last_err = None;
    for &eps in &cfg.eps_grid {
        match narrow_density_dichotomy(a, b, b1, b2, eps, delta.min(1.0)) {
            Ok(r) => {
                nd = Some((eps, r));
                break;
            }
            Err(e @ ApcError::Internal(_)) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    let (eps, nd) = nd.ok_or_else(|| last_err.unwrap_or_else(|| ApcError::Precondition("empty ε grid".into())))?;
    au.param("eps", eps);
    let inv_b = 1.0 / b.density();
    let y = match nd {
        NarrowDensity::Increment { which, x, value } => {
            let host = if which == 1 { b1 } else { b2 };
            au.ge("μ_A∗μ_B′(x) ≥ (1+2ε)μ(B)^-1", value, (1.0 + 2.0 * eps) * inv_b)?;
            let t = g.neg(x);
            let sigma = 1.0 + 2.0 * eps;
            let new_density = density_in(g, a, host.members(), t);
            au.ge("new density ≥ σα", new_density, sigma * alpha)?;
            let cert = IncrementCertificate::DensityIncrement {
                host: Host::Bohr { bohr: host.descriptor() },
                translate: t,
                sigma,
                old_density: alpha,
                new_density,
            };
            return Ok(au.report(cert, if which == 1 { "narrow-density-1" } else { "narrow-density-2" }));
        }
        NarrowDensity::Both { x, .. } => g.neg(x),
    };
    au.param("y", y as f64);
    let ay = translate_set(g, a, y);
    let a1 = intersect(&ay, b1.members());
    let a2 = intersect(&ay, b2.members());
    let alpha1 = a1.len() as f64 / b1.size() as f64;
    au.ge("|(A+y) ∩ B¹| ≥ (1−4ε)α|B¹|", alpha1, (1.0 - 4.0 * eps) * alpha)?;
    au.ge("|(A+y) ∩ B²| ≥ (1−4ε)α|B²|", a2.len() as f64 / b2.size() as f64, (1.0 - 4.0 * eps) * alpha)?;
    let c = normalize_set(dilate_set(g, &a2, 2));
    let b2d = b2.scale_by_unit(2)?;
    let lift = holder_lift(&a1, b1, &b2d, &c, cfg)?;
    let inv_b1 = 1.0 / b1.density();
    let (sp, bb5, bb6, t, z1, z2) = match lift {
        HolderLift::ManyAps { value } => {
            au.ge("⟨μ_A′∗μ_A′, μ_C⟩ ≥ ½μ(B¹)^-1", value, 0.5 * inv_b1)?;
            let (count, threshold) = many_aps_cyclic(a, alpha, b1, b2);
            au.ge("3-AP count ≥ ¼α³N²μ(B¹)μ(B²)", count as f64, threshold)?;
            return Ok(au.report(IncrementCertificate::ManyAps { count, threshold, alpha }, "many-aps"));
        }
        HolderLift::Increment { x, value } => {
            au.ge("‖μ_A′∗μ_{2·B²}‖ ≥ 2μ(B¹)^-1", value, 2.0 * inv_b1)?;
            let t = g.sub(y, x);
            let sigma = 2.0 * (1.0 - 4.0 * eps);
            let new_density = density_in(g, a, b2d.members(), t);
            au.ge("new density ≥ σα", new_density, sigma * alpha)?;
            let cert = IncrementCertificate::DensityIncrement {
                host: Host::Bohr { bohr: b2d.descriptor() },
                translate: t,
                sigma,
                old_density: alpha,
                new_density,
            };
            return Ok(au.report(cert, "holder-increment"));
        }
        HolderLift::Lp { inner, innermost, p, norm } => {
            au.param("p", p as f64);
            au.ge("‖μ_A′∘μ_A′‖_p(ν) ≥ (1+2^-5)μ(B¹)^-1", norm, (1.0 + 1.0 / 32.0) * inv_b1)?;
            let it = bohr_iterated_sift(&a1, b1, &inner, &innermost, p, &cfg.sift())?;
            au.param("sigma_sift", it.sigma);
            au.param("chain", it.chain.len() as f64);
            (it.sigma, it.outer, it.inner, it.t, it.a1, it.a2)
        }
    };
    let k = cfg.k_cyclic;
    if k > cfg.k_cap {
        return Err(ApcError::ResourceLimit(format!("k = {k} exceeds k_cap")));
    }
    au.param("k", k as f64);
    au.param("nu", cfg.nu);
    let aa = diff_convolution(g, &a1, &a1)?;
    let level = (1.0 - 1.0 / 1024.0) * sp * inv_b1;
    let window = crate::group::sumset(g, bb5.members(), &translate_set(g, bb6.members(), t));
    let s: Vec<usize> = window.into_iter().filter(|&x| aa.get(x) >= level).collect();
    let neg_s = normalize_set(crate::group::negate_set(g, &s));
    let b7 = bb6.nested_regular(cfg.c / d)?;
    let eps_ap = 1.0 / 4096.0;
    let x = almost_periods(g, &z1, &z2, &neg_s, b7.members(), k, eps_ap)?;
    au.param("periods", x.len() as f64);
    let vs = verify_smoothing(g, &x, k, &z1, &z2, &neg_s)?;
    au.ge("smoothing ≤ 2^-12", eps_ap, vs)?;
    let h = smoothed_indicator(g, &z1, &z2, &neg_s)?;
    let mu_x = normalized_indicator(g, &x)?;
    let mk = power_convolve(mu_x.as_fn(), k)?;
    let hk = convolve(&mk, &h, ConvMode::Star)?;
    au.ge("μ_X^(k)∗h(0) ≥ 1 − 2^-11", hk.get(0), 1.0 - 1.0 / 2048.0)?;
    let m12 = diff_convolution(g, &z1, &z2)?;
    let f = convolve(&aa, &m12, ConvMode::Circ)?;
    let gk = convolve(&mk, &f, ConvMode::Star)?;
    au.ge("μ_X^(k)∗F(0) ≥ (1−2^-9)σ′μ(B¹)^-1", gk.get(0), (1.0 - 1.0 / 512.0) * sp * inv_b1)?;
    let cb = chang_bohr(&b7, &x, cfg.nu)?;
    let b8 = cb.bohr;
    au.param("rank_out", b8.rank() as f64);
    au.param("radius_out", b8.radius());
    let defect = b8.members().iter().map(|&u| shift_defect(&gk, u)).fold(0.0, f64::max);
    let s1 = diff_pair_inner(g, &z1, &z1, &aa);
    let s2 = diff_pair_inner(g, &z2, &z2, &aa);
    let cs = (cfg.nu + 2f64.powi(1 - k as i32)) * s1.sqrt() * s2.sqrt();
    au.ge("shift defect ≤ (ν+2^{1−k})·CS", cs, defect)?;
    au.ge("(ν+2^{1−k})·CS ≤ 2^-9σ′μ(B¹)^-1", sp * inv_b1 / 512.0, cs)?;
    let mu8 = b8.measure();
    let g8 = convolve(mu8.as_fn(), &gk, ConvMode::Star)?;
    au.ge("‖μ_B⁸∗G‖ ≥ (1−2^-8)σ′μ(B¹)^-1", g8.sup_abs(), (1.0 - 1.0 / 256.0) * sp * inv_b1)?;
    let pa = sum_convolution(g, b8.members(), &a1)?;
    let z = pa.argmax();
    au.ge("‖μ_B⁸∗μ_A′‖ ≥ (1−2^-8)σ′μ(B¹)^-1", pa.get(z), (1.0 - 1.0 / 256.0) * sp * inv_b1)?;
    let sigma = (1.0 - 1.0 / 256.0) * (1.0 - 4.0 * eps) * sp;
    au.ge("σ ≥ 1 + 2^-12", sigma, 1.0 + 1.0 / 4096.0)?;
    let translate = g.sub(y, z);
    let new_density = density_in(g, a, b8.members(), translate);
    au.ge("new density ≥ σα", new_density, sigma * alpha)?;
    let cert = IncrementCertificate::DensityIncrement {
        host: Host::Bohr { bohr: b8.descriptor() },
        translate,
        sigma,
        old_density: alpha,
        new_density,
    };
    Ok(au.report(cert, "sifted-increment"))
}

/// Bohr sets on the host frequencies plus up to two of the characters where
/// |1̂_A| is largest, over a grid of halved radii.
fn bohr_family(a: &[usize], b: &BohrSet, cfg: &PipelineConfig) -> Result<Vec<BohrSet>> {
    let g = b.group();
    let fh = fourier(&GroupFn::indicator(g, a));
    let mut chars: Vec<usize> = (1..g.size()).filter(|&c| c <= g.conj_char(c)).collect();
    chars.sort_by(|&x, &y| fh.get(y).norm().total_cmp(&fh.get(x).norm()).then(x.cmp(&y)));
    chars.truncate(cfg.oracle_chars);
    let mut sets: Vec<Vec<usize>> = vec![vec![]];
    for (i, &x) in chars.iter().enumerate() {
        sets.push(vec![x]);
        for &y in &chars[i + 1..] {
            sets.push(vec![x, y]);
        }
    }
    sets.push(chars.clone());
    let mut out = Vec::new();
    for extra in sets {
        let mut f: Vec<usize> = b.freqs().to_vec();
        f.extend(extra.iter().filter(|c| !b.freqs().contains(c)));
        f.sort_unstable();
        for i in 0..=cfg.oracle_radii {
            let r = b.radius() * 0.5f64.powi(i as i32);
            out.push(BohrSet::new(g, &f, r)?);
        }
    }
    Ok(out)
}

fn cyclic_fallback(
    a: &[usize],
    b: &BohrSet,
    b1: &BohrSet,
    b2: &BohrSet,
    alpha: f64,
    cfg: &PipelineConfig,
    why: ApcError,
) -> Result<StepReport> {
    if !cfg.fallback_to_oracle {
        return Err(why);
    }
    let g = b.group();
    let failure = Some(format!("{}: {why}", why.kind()));
    let (count, threshold) = many_aps_cyclic(a, alpha, b1, b2);
    if count as f64 >= threshold {
        let mut slacks = BTreeMap::new();
        slacks.insert("3-AP count ≥ ¼α³N²μ(B¹)μ(B²)".into(), count as f64 - threshold);
        return Ok(StepReport {
            certificate: IncrementCertificate::ManyAps { count, threshold, alpha },
            path: StepPath::Oracle,
            branch: "many-aps".into(),
            params: BTreeMap::new(),
            slacks,
            analytic_stop: failure,
        });
    }
    let fam = bohr_family(a, b, cfg)?;
    let hit = increment_oracle(g, a, &Family::Bohr(&fam), cfg.oracle_cap)?;
    let sigma = hit.density / alpha;
    if sigma < 1.0 + 1.0 / 4096.0 {
        return Err(ApcError::NotFound(format!(
            "analytic path stopped ({why}) and the Bohr family tops out at σ = {sigma}"
        )));
    }
    let host = fam[hit.host_index].clone();
    let mut params = BTreeMap::new();
    params.insert("rank_out".into(), host.rank() as f64);
    params.insert("radius_out".into(), host.radius());
    let mut slacks = BTreeMap::new();
    slacks.insert("σ ≥ 1 + 2^-12".into(), sigma - (1.0 + 1.0 / 4096.0));
    Ok(StepReport {
        certificate: IncrementCertificate::DensityIncrement {
            host: Host::Bohr { bohr: host.descriptor() },
            translate: hit.translate,
            sigma,
            old_density: alpha,
            new_density: hit.density,
        },
        path: StepPath::Oracle,
        branch: "density-increment".into(),
        params,
        slacks,
        analytic_stop: failure,
    })
}

// -------------------------------------------------------------------------
// drive
// -------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Ff,
    Cyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    Incomplete,
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub j: usize,
    /// Relative density of (A + translate) ∩ host before the step.
    pub density: f64,
    pub host_size: usize,
    /// Codimension (ff) or rank (cyclic) of the current host, and its radius.
    pub codim: Option<usize>,
    pub rank: Option<usize>,
    pub radius: Option<f64>,
    /// Ambient translate of A into the current host.
    pub translate: Vec<usize>,
    pub report: StepReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Closing {
    /// Progressions guaranteed by the final ManyAPs certificate.
    pub guaranteed: f64,
    /// Trivial progressions of A, |A|.
    pub trivial: f64,
    /// For AP-free A the guarantee cannot exceed the trivial count.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub schema: u32,
    pub mode: Mode,
    pub group: String,
    pub set_size: usize,
    pub alpha: f64,
    pub config: PipelineConfig,
    pub steps: Vec<TraceStep>,
    pub status: Status,
    pub step_budget: usize,
    /// Π σ_j over density increments, at most α^{-1}.
    pub sigma_product: f64,
    pub closing: Option<Closing>,
    pub message: Option<String>,
}

impl PipelineTrace {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Complete => 0,
            Status::Falsified => 1,
            Status::Incomplete => 3,
        }
    }
}

/// ⌈log_{1+2^-12} α^{-1}⌉, the longest possible run of increments.
pub fn step_budget(alpha: f64) -> usize {
    ((1.0 / alpha).ln() / (1.0 + 1.0 / 4096.0f64).ln()).ceil().max(0.0) as usize + 1
}

/// Subspace V′ ⊆ 𝔽_q^{dim V} pushed into the ambient space through V's basis.
fn ambient_subspace(outer: &Subspace, inner: &Subspace) -> Result<Subspace> {
    outer.push_forward(inner)
}

/// `drive`: iterate steps from A ⊆ G until ManyAPs, a stop, or a falsification.
pub fn drive(mode: Mode, g: &GroupSpec, a: &[usize], cfg: &PipelineConfig) -> Result<PipelineTrace> {
    cfg.validate()?;
    check_set(g, a)?;
    if a.is_empty() {
        return invalid("A must be non-empty");
    }
    match mode {
        Mode::Ff => {
            let q = g.prime_power_base().ok_or_else(|| ApcError::InvalidArgument("ff mode needs 𝔽_q^n".into()))?;
            if q % 2 == 0 {
                return invalid("ff mode needs odd q");
            }
        }
        Mode::Cyclic => {
            if !g.is_cyclic() || g.size() % 2 == 0 {
                return invalid("cyclic mode needs ℤ/N with N odd");
            }
        }
    }
    let alpha0 = a.len() as f64 / g.size() as f64;
    let budget = if cfg.j_cap > 0 { cfg.j_cap } else { step_budget(alpha0) };
    let mut trace = PipelineTrace {
        schema: TRACE_SCHEMA,
        mode,
        group: g.descriptor(),
        set_size: a.len(),
        alpha: alpha0,
        config: cfg.clone(),
        steps: Vec::new(),
        status: Status::Incomplete,
        step_budget: budget,
        sigma_product: 1.0,
        closing: None,
        message: None,
    };
    match mode {
        Mode::Ff => drive_ff(g, a, cfg, &mut trace),
        Mode::Cyclic => drive_cyclic(g, a, cfg, &mut trace),
    }
    Ok(trace)
}

fn stop(trace: &mut PipelineTrace, e: ApcError) {
    trace.status = if matches!(e, ApcError::Internal(_)) { Status::Falsified } else { Status::Incomplete };
    trace.message = Some(format!("{}: {e}", e.kind()));
}

fn drive_ff(g: &GroupSpec, a: &[usize], cfg: &PipelineConfig, trace: &mut PipelineTrace) {
    let q = g.prime_power_base().expect("checked");
    let mut v = Subspace::full(q, g.rank());
    let mut x = 0usize;
    for j in 0..trace.step_budget {
        // A_j = (A + x) ∩ V in V's coordinates.
        let members = v.members(g);
        let aj: Vec<usize> = intersect(&translate_set(g, a, x), &members);
        let density = aj.len() as f64 / members.len() as f64;
        let base = TraceStep {
            j,
            density,
            host_size: members.len(),
            codim: Some(v.codim()),
            rank: None,
            radius: None,
            translate: g.residues(x),
            report: StepReport {
                certificate: IncrementCertificate::ManyAps { count: 1, threshold: 0.5, alpha: 1.0 },
                path: StepPath::Analytic,
                branch: "many-aps".into(),
                params: BTreeMap::new(),
                slacks: BTreeMap::new(),
                analytic_stop: None,
            },
        };
        if v.dim() == 0 {
            // A point: the single trivial progression already meets ½α³|V|².
            trace.steps.push(base);
            finish(trace, a, 0.5);
            return;
        }
        let h = GroupSpec::power(q, v.dim()).expect("dimension ≥ 1");
        let coords: Vec<usize> = normalize_set(
            aj.iter().map(|&y| h.index_of_unsigned(&v.coords(&g.residues(y)).expect("member of V"))).collect(),
        );
        match ff_step(&h, &coords, cfg) {
            Err(e) => {
                stop(trace, e);
                return;
            }
            Ok(report) => {
                let cert = report.certificate.clone();
                trace.steps.push(TraceStep { report, ..base });
                match cert {
                    IncrementCertificate::ManyAps { threshold, .. } => {
                        finish(trace, a, threshold);
                        return;
                    }
                    IncrementCertificate::DensityIncrement { host, translate, sigma, .. } => {
                        let Host::Subspace { subspace } = host else { unreachable!("ff hosts are subspaces") };
                        let shift = v.combine(&h.residues(translate));
                        let shift_idx = g.index_of_unsigned(&shift);
                        let nv = match ambient_subspace(&v, &subspace) {
                            Ok(nv) => nv,
                            Err(e) => {
                                stop(trace, e);
                                return;
                            }
                        };
                        x = g.add(x, shift_idx);
                        v = nv;
                        trace.sigma_product *= sigma;
                    }
                }
            }
        }
    }
    trace.status = Status::Incomplete;
    trace.message = Some(format!("resource-limit: step cap {} reached", trace.step_budget));
}

fn finish(trace: &mut PipelineTrace, a: &[usize], guaranteed: f64) {
    trace.status = Status::Complete;
    let trivial = a.len() as f64;
    trace.closing = Some(Closing { guaranteed, trivial, consistent: guaranteed <= trivial * (1.0 + 1e-12) });
    if trace.sigma_product > 1.0 / trace.alpha * (1.0 + 1e-9) {
        trace.status = Status::Falsified;
        trace.message = Some("internal-error: product of increments exceeds α^-1".into());
    }
}

fn drive_cyclic(g: &GroupSpec, a: &[usize], cfg: &PipelineConfig, trace: &mut PipelineTrace) {
    let mut host = BohrSet::whole(g);
    let mut x = 0usize;
    for j in 0..trace.step_budget {
        let aj = intersect(&translate_set(g, a, x), host.members());
        let density = aj.len() as f64 / host.size() as f64;
        let nest = cyclic_nest(&host, cfg.c);
        let (b1, b2) = match nest {
            Ok(p) => p,
            Err(e) => {
                stop(trace, e);
                return;
            }
        };
        let step = if aj.is_empty() {
            Err(ApcError::Internal("translate left the host empty".into()))
        } else {
            cyclic_step(&aj, &host, &b1, &b2, cfg)
        };
        match step {
            Err(e) => {
                stop(trace, e);
                return;
            }
            Ok(report) => {
                let cert = report.certificate.clone();
                trace.steps.push(TraceStep {
                    j,
                    density,
                    host_size: host.size(),
                    codim: None,
                    rank: Some(host.rank()),
                    radius: Some(host.radius()),
                    translate: g.residues(x),
                    report,
                });
                match cert {
                    IncrementCertificate::ManyAps { threshold, .. } => {
                        finish(trace, a, threshold);
                        return;
                    }
                    IncrementCertificate::DensityIncrement { host: h, translate, sigma, .. } => {
                        let Host::Bohr { bohr } = h else { unreachable!("cyclic hosts are Bohr sets") };
                        match BohrSet::from_descriptor(&bohr) {
                            Ok(nb) => host = nb,
                            Err(e) => {
                                stop(trace, e);
                                return;
                            }
                        }
                        x = g.add(x, translate);
                        trace.sigma_product *= sigma;
                    }
                }
            }
        }
    }
    trace.status = Status::Incomplete;
    trace.message = Some(format!("resource-limit: step cap {} reached", trace.step_budget));
}

/// Recomputes a density-increment certificate from scratch: the host is
/// rebuilt, the translate applied, and the density recounted.
pub fn verify_increment(g: &GroupSpec, a: &[usize], cert: &IncrementCertificate) -> Result<f64> {
    match cert {
        IncrementCertificate::ManyAps { .. } => invalid("not a density increment"),
        IncrementCertificate::DensityIncrement { host, translate, sigma, old_density, new_density } => {
            let members = match host {
                Host::Subspace { subspace } => subspace.members(g),
                Host::Bohr { bohr } => BohrSet::from_descriptor(bohr)?.members().to_vec(),
            };
            let d = density_in(g, a, &members, *translate);
            if (d - new_density).abs() > 1e-12 || d < sigma * old_density * (1.0 - 1e-12) {
                return Err(ApcError::Internal(format!("certificate density {new_density} does not recount ({d})")));
            }
            Ok(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_random_set_has_many_aps() {
        let g = GroupSpec::power(3, 3).unwrap();
        let a: Vec<usize> = (0..27).filter(|x| x % 3 != 2).collect();
        let r = ff_step(&g, &a, &PipelineConfig::default()).unwrap();
        assert!(matches!(r.certificate, IncrementCertificate::ManyAps { .. }) || r.path == StepPath::Analytic);
    }

    #[test]
    fn cap_set_drive_completes() {
        let g = GroupSpec::power(3, 2).unwrap();
        let a: Vec<usize> = [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|r| g.index_of(r).unwrap()).collect();
        let t = drive(Mode::Ff, &g, &a, &PipelineConfig::default()).unwrap();
        assert_eq!(t.status, Status::Complete, "{:?}", t.message);
        assert!(t.sigma_product <= 1.0 / t.alpha + 1e-9);
    }

    #[test]
    fn cyclic_drive_small() {
        let g = GroupSpec::cyclic(31).unwrap();
        let a = vec![0, 1, 3, 4, 9, 10, 12, 13];
        let t = drive(Mode::Cyclic, &g, &a, &PipelineConfig::default()).unwrap();
        assert_eq!(t.status, Status::Complete, "{:?}", t.message);
    }

    #[test]
    fn config_round_trip() {
        let c = PipelineConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        let d: PipelineConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(c, d);
        assert!(serde_json::from_str::<PipelineConfig>("{\"bogus\": 1}").is_err());
    }

    #[test]
    fn unbalance_constant() {
        let g = GroupSpec::cyclic(5).unwrap();
        let f = GroupFn::constant(&g, 0.5);
        let nu = ProbMeasure::uniform(&g);
        assert_eq!(unbalance_exponent(&f, &nu, 2.0, 0.5, 8).unwrap(), 1);
    }
}
