//! Bohr sets B(Λ, ρ) = {x : max_{γ∈Λ} |1 − γ(x)| ≤ ρ} with exact regularity.
//!
//! Every Bohr set carries a shared norm table m(x) = max_γ |1 − γ(x)|. Its
//! sorted values are the only radii at which |B_r| changes, so the regularity
//! condition, which quantifies over a continuum of κ, reduces to finitely many
//! comparisons at those breakpoints.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{invalid, ApcError, Result};
use crate::group::{check_set, is_subset, mask, Character, GroupSpec};
use crate::harmonic::{convolve, lp_norm_pow, normalized_indicator, ConvMode, GroupFn, ProbMeasure};

#[derive(Debug)]
struct NormTable {
    /// m(x) by canonical index.
    norm: Vec<f64>,
    /// Distinct norm values, ascending.
    breaks: Vec<f64>,
    /// le[i] = #{x : m(x) ≤ breaks[i]}.
    le: Vec<usize>,
}

impl NormTable {
    fn build(g: &GroupSpec, freqs: &[usize]) -> Self {
        let norm: Vec<f64> =
            g.elements().map(|x| freqs.iter().fold(0.0f64, |m, &chi| m.max(g.chord(chi, x)))).collect();
        let mut sorted = norm.clone();
        sorted.sort_by(f64::total_cmp);
        let mut breaks = Vec::new();
        let mut le = Vec::new();
        for (i, &v) in sorted.iter().enumerate() {
            if i + 1 == sorted.len() || sorted[i + 1] != v {
                breaks.push(v);
                le.push(i + 1);
            }
        }
        NormTable { norm, breaks, le }
    }

    /// |B_r| = #{x : m(x) ≤ r}.
    fn count_le(&self, r: f64) -> usize {
        let i = self.breaks.partition_point(|&b| b <= r);
        if i == 0 {
            0
        } else {
            self.le[i - 1]
        }
    }

    /// #{x : m(x) < b} for the breakpoint at position i.
    fn count_lt_at(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.le[i - 1]
        }
    }
}

#[derive(Clone, Debug)]
pub struct BohrSet {
    group: GroupSpec,
    freqs: Vec<usize>,
    radius: f64,
    members: Vec<usize>,
    table: Arc<NormTable>,
}

/// JSON form used in traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrDescriptor {
    pub factors: Vec<usize>,
    pub freqs: Vec<Vec<i64>>,
    pub radius: f64,
    pub regular: bool,
}

impl PartialEq for BohrSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.freqs == other.freqs && self.radius == other.radius
    }
}

impl BohrSet {
    /// `bohr_build` on character indices.
    pub fn new(g: &GroupSpec, freqs: &[usize], radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return invalid(format!("Bohr radius {radius} must be a finite non-negative number"));
        }
        if let Some(&c) = freqs.iter().find(|&&c| c >= g.size()) {
            return invalid(format!("character index {c} outside the dual group"));
        }
        let mut fs = freqs.to_vec();
        fs.sort_unstable();
        fs.dedup();
        let table = Arc::new(NormTable::build(g, &fs));
        Ok(Self::with_table(g.clone(), fs, radius, table))
    }

    /// `bohr_build` on explicit characters.
    pub fn from_characters(g: &GroupSpec, freqs: &[Character], radius: f64) -> Result<Self> {
        let idx = freqs.iter().map(|c| g.character_index(c)).collect::<Result<Vec<_>>>()?;
        Self::new(g, &idx, radius)
    }

    fn with_table(group: GroupSpec, freqs: Vec<usize>, radius: f64, table: Arc<NormTable>) -> Self {
        let members = (0..group.size()).filter(|&x| table.norm[x] <= radius).collect();
        BohrSet { group, freqs, radius, members, table }
    }

    /// B = G, the rank-0 Bohr set.
    pub fn whole(g: &GroupSpec) -> Self {
        Self::new(g, &[], 1.0).expect("empty frequency set is valid")
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn freqs(&self) -> &[usize] {
        &self.freqs
    }

    pub fn rank(&self) -> usize {
        self.freqs.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// μ(B) = |B|/|G|.
    pub fn density(&self) -> f64 {
        self.members.len() as f64 / self.group.size() as f64
    }

    pub fn contains(&self, x: usize) -> bool {
        self.table.norm[x] <= self.radius
    }

    /// m(x) = max_{γ∈Λ} |1 − γ(x)|.
    pub fn norm(&self, x: usize) -> f64 {
        self.table.norm[x]
    }

    pub fn measure(&self) -> ProbMeasure {
        normalized_indicator(&self.group, &self.members).expect("Bohr sets contain 0")
    }

    /// B_δ: same frequencies, radius δρ.
    pub fn dilate(&self, delta: f64) -> Self {
        self.at_radius(self.radius * delta)
    }

    pub fn at_radius(&self, r: f64) -> Self {
        Self::with_table(self.group.clone(), self.freqs.clone(), r, Arc::clone(&self.table))
    }

    /// |B_{r}| for an absolute radius r.
    pub fn size_at(&self, r: f64) -> usize {
        self.table.count_le(r)
    }

    /// λ·B for λ a unit of every factor: the Bohr set with frequencies λ^{-1}Λ.
    pub fn scale_by_unit(&self, lambda: i64) -> Result<Self> {
        let g = &self.group;
        let inv: Vec<i64> = g
            .factors()
            .iter()
            .map(|&n| mod_inverse(lambda, n as i64))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ApcError::InvalidArgument(format!("{lambda} is not a unit in {}", g.descriptor())))?;
        let freqs: Vec<usize> = self
            .freqs
            .iter()
            .map(|&chi| {
                let e: Vec<i64> = g.residues(chi).iter().zip(&inv).map(|(&r, &u)| r as i64 * u).collect();
                g.index_of(&e).expect("rank matches")
            })
            .collect();
        Self::new(g, &freqs, self.radius)
    }

    pub fn descriptor(&self) -> BohrDescriptor {
        BohrDescriptor {
            factors: self.group.factors().to_vec(),
            freqs: self.freqs.iter().map(|&c| self.group.character(c).exponents).collect(),
            radius: self.radius,
            regular: self.is_regular(),
        }
    }

    pub fn from_descriptor(d: &BohrDescriptor) -> Result<Self> {
        let g = GroupSpec::new(&d.factors.iter().map(|&f| f as i64).collect::<Vec<_>>())?;
        let chars: Vec<Character> = d.freqs.iter().map(|e| Character { exponents: e.clone() }).collect();
        Self::from_characters(&g, &chars, d.radius)
    }

    // ---------------------------------------------------------------------
    // regularity
    // ---------------------------------------------------------------------

    /// A κ with |κ| ≤ 1/100d at which the regularity inequality fails, if any.
    /// The check visits only breakpoints b of the norm table:
    /// for b ∈ (r, r(1+w)] it needs |B_b| ≤ (1 + 100d(b/r − 1))|B|, and
    /// for b ∈ (r(1−w), r] it needs #{m < b} ≥ (1 − 100d(1 − b/r))|B|,
    /// the left limit of the step function just below b.
    pub fn regularity_violation(&self) -> Option<f64> {
        regularity_violation_at(&self.table, self.rank(), self.radius)
    }

    pub fn is_regular(&self) -> bool {
        self.regularity_violation().is_none()
    }

    /// The largest regular radius in [ρ/2, ρ].
    pub fn regularize(&self) -> Result<Self> {
        let r = find_regular_radius(&self.table, self.rank(), self.radius).ok_or_else(|| {
            ApcError::Internal(format!(
                "no regular radius in [{}, {}] for a rank-{} Bohr set",
                self.radius / 2.0,
                self.radius,
                self.rank()
            ))
        })?;
        Ok(self.at_radius(r))
    }

    /// A regular B_δ with δ ∈ [r/2, r], i.e. B′ ⊂_r B.
    pub fn nested_regular(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return invalid(format!("nesting ratio {r} outside (0, 1]"));
        }
        self.dilate(r).regularize()
    }
}

impl Serialize for BohrSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptor().serialize(s)
    }
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a.rem_euclid(n), n);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(n))
}

fn regularity_violation_at(t: &NormTable, d: usize, r: f64) -> Option<f64> {
    if d == 0 || r == 0.0 {
        return None;
    }
    let dd = d as f64;
    let w = 1.0 / (100.0 * dd);
    let n = t.count_le(r) as f64;
    // upper side
    let start = t.breaks.partition_point(|&b| b <= r);
    for i in start..t.breaks.len() {
        let b = t.breaks[i];
        if b > r * (1.0 + w) {
            break;
        }
        let kappa = b / r - 1.0;
        if t.le[i] as f64 > (1.0 + 100.0 * dd * kappa) * n {
            return Some(kappa);
        }
    }
    // lower side, scanning down from r
    let mut i = start;
    while i > 0 {
        i -= 1;
        let b = t.breaks[i];
        if b <= r * (1.0 - w) {
            break;
        }
        let u = 1.0 - b / r;
        if (t.count_lt_at(i) as f64) < (1.0 - 100.0 * dd * u) * n {
            return Some(-u);
        }
    }
    None
}

fn find_regular_radius(t: &NormTable, d: usize, rho: f64) -> Option<f64> {
    if d == 0 || rho == 0.0 || regularity_violation_at(t, d, rho).is_none() {
        return Some(rho);
    }
    let dd = d as f64;
    let w = 1.0 / (100.0 * dd);
    let lo_bound = rho / 2.0;
    // Gaps [b_i, b_{i+1}) of the step function, visited from the top down.
    let mut top = rho;
    let mut i = t.breaks.partition_point(|&b| b <= rho);
    while i > 0 && top >= lo_bound {
        i -= 1;
        let lo = t.breaks[i];
        let n = t.le[i] as f64;
        let gap_lo = lo.max(lo_bound);
        let mut cands: Vec<f64> = vec![top, gap_lo];
        // upper-side thresholds from breakpoints above the gap
        let mut j = i + 1;
        while j < t.breaks.len() && t.breaks[j] <= top * (1.0 + w) {
            let b = t.breaks[j];
            let u = (t.le[j] as f64 / n - 1.0) / (100.0 * dd);
            cands.push(b / (1.0 + u));
            cands.push(b / (1.0 + w));
            j += 1;
        }
        // lower-side thresholds from breakpoints at or below the gap
        let mut j = i + 1;
        while j > 0 {
            j -= 1;
            let b = t.breaks[j];
            if b <= gap_lo * (1.0 - w) {
                break;
            }
            let v = (1.0 - t.count_lt_at(j) as f64 / n) / (100.0 * dd);
            if v < 1.0 {
                cands.push(b / (1.0 - v));
            }
            cands.push(b / (1.0 - w));
        }
        cands.retain(|&c| c >= gap_lo && c <= top && c > lo);
        cands.sort_by(|a, b| b.total_cmp(a));
        cands.dedup();
        let mut probes = Vec::with_capacity(2 * cands.len() + 2);
        let mut prev = top;
        for &c in &cands {
            if c < prev {
                probes.push(0.5 * (prev + c));
            }
            probes.push(c);
            prev = c;
        }
        if gap_lo < prev && gap_lo > lo {
            probes.push(0.5 * (prev + gap_lo));
        }
        probes.sort_by(|a, b| b.total_cmp(a));
        for &r in &probes {
            if r > lo && r <= rho && r >= lo_bound && regularity_violation_at(t, d, r).is_none() {
                return Some(r);
            }
        }
        top = lo;
    }
    None
}

// -------------------------------------------------------------------------
// appendix inequalities as measurable quantities
// -------------------------------------------------------------------------

/// (|B_ρ|, (ρ/4)^d|B|) for a dilation factor ρ ∈ (0, 1).
pub fn size_bound(b: &BohrSet, rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho < 1.0) {
        return invalid("dilation factor must lie in (0, 1)");
    }
    Ok((b.dilate(rho).size() as f64, (rho / 4.0).powi(b.rank() as i32) * b.size() as f64))
}

/// (‖μ_{B_{1+δ}}∗μ − μ_{B_{1+δ}}‖₁, 200(ρ+δ)d) for μ supported on B_ρ.
pub fn narrow_support(b: &BohrSet, rho: f64, delta: f64, mu: &ProbMeasure) -> Result<(f64, f64)> {
    let d = b.rank().max(1) as f64;
    if !(rho > 0.0 && delta > 0.0 && rho + delta < 1.0 / (100.0 * d)) {
        return Err(ApcError::Precondition("need ρ, δ > 0 with ρ + δ < 1/100d".into()));
    }
    if !b.is_regular() {
        return Err(ApcError::Precondition("Bohr set is not regular".into()));
    }
    if !is_subset(&mu.support(), b.dilate(rho).members()) {
        return Err(ApcError::Precondition("measure is not supported on B_ρ".into()));
    }
    let wide = b.dilate(1.0 + delta).measure();
    let conv = convolve(wide.as_fn(), mu.as_fn(), ConvMode::Star)?;
    let diff = conv.sub(wide.as_fn())?;
    let l1 = diff.values().iter().map(|v| v.abs()).sum::<f64>() / diff.values().len() as f64;
    Ok((l1, 200.0 * (rho + delta) * d))
}

/// Minimum slacks of 1_{B_{1+Lρ}}∗ν − 1_B and 2μ_{B_{1+Lρ}}∗ν − μ_B over G,
/// for ν supported on L·B_ρ. Both are ≥ 0 when the approximation holds.
pub fn regular_approximation(b: &BohrSet, l: usize, rho: f64, nu: &ProbMeasure) -> Result<(f64, f64)> {
    let d = b.rank().max(1) as f64;
    if l == 0 || !(rho > 0.0 && rho <= 1.0 / (100.0 * l as f64 * d)) {
        return Err(ApcError::Precondition("need L ≥ 1 and ρ ≤ 1/100Ld".into()));
    }
    if !b.is_regular() {
        return Err(ApcError::Precondition("Bohr set is not regular".into()));
    }
    let g = b.group();
    let narrow = b.dilate(rho);
    let mut lb = vec![0usize];
    for _ in 0..l {
        lb = crate::group::sumset(g, &lb, narrow.members());
    }
    if !is_subset(&nu.support(), &lb) {
        return Err(ApcError::Precondition("ν is not supported on L·B_ρ".into()));
    }
    let wide = b.dilate(1.0 + l as f64 * rho);
    let ind_wide = GroupFn::indicator(g, wide.members());
    let smooth = convolve(&ind_wide, nu.as_fn(), ConvMode::Star)?;
    let ind_b = GroupFn::indicator(g, b.members());
    let s1 = smooth.sub(&ind_b)?.values().iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = g.size() as f64 / wide.size() as f64;
    let mu_b = b.measure();
    let s2 = smooth.scale(2.0 * ratio).sub(mu_b.as_fn())?.values().iter().copied().fold(f64::INFINITY, f64::min);
    Ok((s1, s2))
}

/// ν = μ_{B′}∘μ_{B′}∗μ_{B″}∘μ_{B″}.
pub fn smoothing_measure(b1: &BohrSet, b2: &BohrSet) -> Result<ProbMeasure> {
    let m1 = b1.measure();
    let m2 = b2.measure();
    let a = m1.convolve(&m1, ConvMode::Circ)?;
    let c = m2.convolve(&m2, ConvMode::Circ)?;
    a.convolve(&c, ConvMode::Star)
}

/// `lp_compare`: (‖f∘f‖^p_{p(ν)}, ½‖f⋆f‖^p_{p(μ_{B+t})}) where ⋆ is ∗ or ∘ per `variant`.
pub fn lp_compare(
    f: &GroupFn,
    b: &BohrSet,
    b1: &BohrSet,
    b2: &BohrSet,
    t: usize,
    p: u32,
    variant: ConvMode,
) -> Result<(f64, f64)> {
    if p < 2 || p % 2 == 1 {
        return invalid(format!("exponent {p} must be an even integer ≥ 2"));
    }
    let narrow = b.dilate(1.0 / (400.0 * b.rank().max(1) as f64));
    if !is_subset(b1.members(), narrow.members()) || !is_subset(b2.members(), narrow.members()) {
        return Err(ApcError::Precondition("B′, B″ must lie inside B_{1/400d}".into()));
    }
    let nu = smoothing_measure(b1, b2)?;
    let ff = convolve(f, f, ConvMode::Circ)?;
    let lhs = lp_norm_pow(&ff, p, Some(&nu))?;
    let g = b.group();
    let shifted = normalized_indicator(g, &crate::group::translate_set(g, b.members(), t))?;
    let rf = convolve(f, f, variant)?;
    let rhs = 0.5 * lp_norm_pow(&rf, p, Some(&shifted))?;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NarrowDensity {
    /// μ_A∗μ_{B′}(x) and μ_A∗μ_{B″}(x) both ≥ (1−4ε)μ(B)^{-1}.
    Both { x: usize, first: f64, second: f64 },
    /// ‖μ_A∗μ_{B′}‖_∞ (which = 1) or ‖μ_A∗μ_{B″}‖_∞ (which = 2) ≥ (1+2ε)μ(B)^{-1}, attained at x.
    Increment { which: u8, x: usize, value: f64 },
}

/// `narrow_density_dichotomy`. The increment case is reported first when both hold.
pub fn narrow_density_dichotomy(
    a: &[usize],
    b: &BohrSet,
    b1: &BohrSet,
    b2: &BohrSet,
    eps: f64,
    delta: f64,
) -> Result<NarrowDensity> {
    let g = b.group();
    check_set(g, a)?;
    if a.is_empty() || !is_subset(a, b.members()) {
        return Err(ApcError::Precondition("A must be a non-empty subset of B".into()));
    }
    if !b.is_regular() {
        return Err(ApcError::Precondition("B is not regular".into()));
    }
    let bd = b.dilate(delta);
    if !is_subset(b1.members(), bd.members()) || !is_subset(b2.members(), bd.members()) {
        return Err(ApcError::Precondition("B′, B″ must lie inside B_δ".into()));
    }
    if (b.size() as f64) < (1.0 - eps) * b.dilate(1.0 + delta).size() as f64 {
        return Err(ApcError::Precondition("|B| < (1−ε)|B_{1+δ}|".into()));
    }
    let inv = 1.0 / b.density();
    let c1 = crate::harmonic::sum_convolution(g, a, b1.members())?;
    let c2 = crate::harmonic::sum_convolution(g, a, b2.members())?;
    for (which, c) in [(1u8, &c1), (2u8, &c2)] {
        let x = c.argmax();
        if c.get(x) >= (1.0 + 2.0 * eps) * inv {
            return Ok(NarrowDensity::Increment { which, x, value: c.get(x) });
        }
    }
    let thr = (1.0 - 4.0 * eps) * inv;
    for x in g.elements() {
        if c1.get(x) >= thr && c2.get(x) >= thr {
            return Ok(NarrowDensity::Both { x, first: c1.get(x), second: c2.get(x) });
        }
    }
    Err(ApcError::Internal("neither case of the narrow density dichotomy holds".into()))
}

/// 1_{B+t} membership mask, used by callers that localize to translates.
pub fn translate_mask(b: &BohrSet, t: usize) -> Vec<bool> {
    let g = b.group();
    mask(g, &crate::group::translate_set(g, b.members(), t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_frequency_set_is_everything() {
        let g = GroupSpec::cyclic(9).unwrap();
        let b = BohrSet::new(&g, &[], 0.1).unwrap();
        assert_eq!(b.size(), 9);
        assert!(b.is_regular());
        assert_eq!(b.regularize().unwrap().radius(), 0.1);
    }

    #[test]
    fn radius_two_is_everything() {
        let g = GroupSpec::cyclic(11).unwrap();
        assert_eq!(BohrSet::new(&g, &[1, 3], 2.0).unwrap().size(), 11);
    }

    #[test]
    fn z7_unit_radius() {
        let g = GroupSpec::cyclic(7).unwrap();
        let b = BohrSet::new(&g, &[1], 1.0).unwrap();
        assert_eq!(b.members(), &[0, 1, 6]);
    }

    #[test]
    fn members_are_symmetric() {
        let g = GroupSpec::new(&[15, 7]).unwrap();
        let b = BohrSet::new(&g, &[8, 33, 50], 0.9).unwrap();
        for &x in b.members() {
            assert!(b.contains(g.neg(x)));
        }
        assert!(b.contains(0));
    }

    #[test]
    fn breakpoint_radius_is_never_regular() {
        let g = GroupSpec::cyclic(101).unwrap();
        let b = BohrSet::new(&g, &[1], 1.0).unwrap();
        let r = b.norm(5);
        assert!(!b.at_radius(r).is_regular());
    }

    #[test]
    fn regularize_z101() {
        let g = GroupSpec::cyclic(101).unwrap();
        let b = BohrSet::new(&g, &[1], 0.9).unwrap();
        let r = b.regularize().unwrap();
        assert!(r.radius() <= 0.9 && r.radius() >= 0.45);
        assert!(r.is_regular());
    }

    #[test]
    fn nested_is_contained() {
        let g = GroupSpec::cyclic(1009).unwrap();
        let b = BohrSet::new(&g, &[17, 400], 1.0).unwrap().regularize().unwrap();
        let n = b.nested_regular(0.3).unwrap();
        assert!(n.radius() >= 0.15 * b.radius() && n.radius() <= 0.3 * b.radius());
        assert!(is_subset(n.members(), b.members()));
        assert!(n.is_regular());
    }

    #[test]
    fn doubling_matches_setwise_dilation() {
        let g = GroupSpec::cyclic(101).unwrap();
        let b = BohrSet::new(&g, &[7, 30], 0.8).unwrap();
        let two_b = b.scale_by_unit(2).unwrap();
        assert_eq!(two_b.members(), crate::group::dilate_set(&g, b.members(), 2).as_slice());
        assert!(BohrSet::new(&GroupSpec::cyclic(10).unwrap(), &[1], 0.5).unwrap().scale_by_unit(2).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let g = GroupSpec::new(&[5, 5]).unwrap();
        let b = BohrSet::new(&g, &[6, 11], 0.7).unwrap();
        let d = b.descriptor();
        let back = BohrSet::from_descriptor(&d).unwrap();
        assert_eq!(back.members(), b.members());
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"factors\":[5,5]"));
    }

    #[test]
    fn lp_compare_zero_function() {
        let g = GroupSpec::cyclic(101).unwrap();
        let b = BohrSet::new(&g, &[1], 1.0).unwrap().regularize().unwrap();
        let b1 = b.nested_regular(1.0 / 400.0).unwrap();
        let (l, r) = lp_compare(&GroupFn::zeros(&g), &b, &b1, &b1, 0, 2, ConvMode::Star).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        assert!(lp_compare(&GroupFn::zeros(&g), &b, &b1, &b1, 0, 3, ConvMode::Star).is_err());
    }

    #[test]
    fn narrow_density_on_whole_bohr_set() {
        let g = GroupSpec::cyclic(401).unwrap();
        let b = BohrSet::new(&g, &[3], 1.2).unwrap().regularize().unwrap();
        let delta = 0.01;
        let b1 = b.dilate(delta);
        match narrow_density_dichotomy(b.members(), &b, &b1, &b1, 0.1, delta).unwrap() {
            NarrowDensity::Both { x, .. } => assert_eq!(x, 0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
