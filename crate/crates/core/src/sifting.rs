//! Sifting: restricting A to intersections of its translates so that the
//! difference structure of A concentrates on a large level set of μ_A∘μ_A.
//!
//! For a shift tuple s ∈ G^p, A_i(s) = C_i ∩ (A + s_1) ∩ … ∩ (A + s_p).

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::bohr::BohrSet;
use crate::error::{invalid, ApcError, Result};
use crate::group::{check_set, intersect, is_subset, mask, translate_set, GroupSpec};
use crate::harmonic::{convolve, diff_convolution, diff_pair_inner, lp_norm, ConvMode, GroupFn};
use crate::rng::seeded;

/// Knobs shared by every sifting search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SiftConfig {
    /// Search nodes before the exhaustive search gives up.
    pub node_budget: u64,
    /// Random tuples drawn once the node budget is spent.
    pub samples: usize,
    pub seed: u64,
    /// Chain density constants |A^{j+1}| ≥ c1·α^{c2}|A^j|; c2 defaults to the sift exponent.
    pub c1: f64,
    pub c2: Option<f64>,
    /// Density exponent constant of the localized chain; defaults to p + 2.
    pub c0: Option<f64>,
    /// Nesting constant c in B′ ⊂_{c/d} B.
    pub c: f64,
    /// Extra chain steps allowed beyond the doubling bound.
    pub chain_slack: usize,
}

pub const DEFAULT_C: f64 = 1.0 / (8192.0 * 100.0);

impl Default for SiftConfig {
    fn default() -> Self {
        SiftConfig {
            node_budget: 10_000_000,
            samples: 100_000,
            seed: 0,
            c1: 0.25,
            c2: None,
            c0: None,
            c: DEFAULT_C,
            chain_slack: 2,
        }
    }
}

/// A_i(s) for every i, from explicit containers.
pub fn sifted_sets(g: &GroupSpec, a: &[usize], s: &[usize], containers: &[&[usize]]) -> Vec<Vec<usize>> {
    let am = mask(g, a);
    containers.iter().map(|c| c.iter().copied().filter(|&x| s.iter().all(|&t| am[g.sub(x, t)])).collect()).collect()
}

fn tuples(n: usize, p: usize, cap: u64) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..p {
        total = total
            .checked_mul(n as u64)
            .filter(|&t| t <= cap)
            .ok_or_else(|| ApcError::ResourceLimit(format!("|G|^p exceeds the enumeration cap {cap}")))?;
    }
    Ok(total)
}

/// Sift identity sides (lhs, rhs):
/// lhs = ⟨(μ_A∘μ_A)^p, f⟩_μ with μ = μ_{C1}∘μ_{C2},
/// rhs = |G|^{−p}α^{−2p}γ1^{−1}γ2^{−1} Σ_s α1(s)α2(s)⟨μ_{A1(s)}∘μ_{A2(s)}, f⟩.
/// The sum runs over all of G^p, so |G|^p must not exceed `cap`.
pub fn sift_identity(
    g: &GroupSpec,
    a: &[usize],
    c1: &[usize],
    c2: &[usize],
    p: usize,
    f: &GroupFn,
    cap: u64,
) -> Result<(f64, f64)> {
    for s in [a, c1, c2] {
        check_set(g, s)?;
        if s.is_empty() {
            return invalid("sift identity needs non-empty A, C1, C2");
        }
    }
    if p == 0 {
        return invalid("p must be at least 1");
    }
    if f.group() != g {
        return invalid("test function lives on a different group");
    }
    let total = tuples(g.size(), p, cap)?;
    let n = g.size() as f64;
    let aa = diff_convolution(g, a, a)?;
    let mu = diff_convolution(g, c1, c2)?;
    let lhs =
        aa.values().iter().zip(mu.values()).zip(f.values()).map(|((x, m), v)| x.powi(p as i32) * m * v).sum::<f64>()
            / n;

    let am = mask(g, a);
    let mut s = vec![0usize; p];
    let mut acc = 0.0;
    for _ in 0..total {
        let in_all = |x: usize| s.iter().all(|&t| am[g.sub(x, t)]);
        let a1: Vec<usize> = c1.iter().copied().filter(|&x| in_all(x)).collect();
        let a2: Vec<usize> = c2.iter().copied().filter(|&x| in_all(x)).collect();
        if !a1.is_empty() && !a2.is_empty() {
            // α1α2⟨μ_{A1}∘μ_{A2}, f⟩ = |G|^{-2} Σ f(a2 − a1)
            acc += diff_pair_inner(g, &a1, &a2, f) * a1.len() as f64 * a2.len() as f64 / (n * n);
        }
        for slot in s.iter_mut().rev() {
            *slot += 1;
            if *slot < g.size() {
                break;
            }
            *slot = 0;
        }
    }
    let alpha = a.len() as f64 / n;
    let g1 = c1.len() as f64 / n;
    let g2 = c2.len() as f64 / n;
    let rhs = acc / (n.powi(p as i32) * alpha.powi(2 * p as i32) * g1 * g2);
    Ok((lhs, rhs))
}

// -------------------------------------------------------------------------
// weighted sifting
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSift {
    /// Shift tuple, padded to length p by repeating its last entry.
    pub shifts: Vec<usize>,
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub p: usize,
    pub eps: f64,
    /// ‖μ_A∘μ_A‖_{p(μ_{C1}∘μ_{C2})}.
    pub norm: f64,
    /// S = {x : μ_A∘μ_A(x) ≤ level}, level = (1−ε)·norm.
    pub level: f64,
    /// ⟨μ_{A1}∘μ_{A2}, 1_S⟩ and its bound 4(1−ε)^p.
    pub low_mass: f64,
    pub low_mass_bound: f64,
    /// |A_i|/|C_i| and the floor ¼α^p, α the density of A in its container.
    pub rel_density: [f64; 2],
    pub density_floor: f64,
    pub exhaustive: bool,
    pub nodes: u64,
}

impl WeightedSift {
    /// ⟨μ_{A1}∘μ_{A2}, 1_{G∖S}⟩ = 1 − low_mass.
    pub fn high_mass(&self) -> f64 {
        1.0 - self.low_mass
    }
}

struct SiftSearch<'a> {
    g: &'a GroupSpec,
    a: &'a [usize],
    am: Vec<bool>,
    high: Vec<bool>,
    floor: [f64; 2],
    bound: f64,
    p: usize,
    budget: u64,
    nodes: u64,
    /// Best remaining depth seen per state (A1, A2).
    seen: HashMap<(Vec<usize>, Vec<usize>), usize>,
}

enum Step {
    Found(Vec<usize>, Vec<usize>, Vec<usize>),
    Exhausted,
    Done,
}

impl SiftSearch<'_> {
    fn low_mass(&self, a1: &[usize], a2: &[usize]) -> f64 {
        let mut low = 0usize;
        for &x in a1 {
            for &y in a2 {
                if !self.high[self.g.sub(y, x)] {
                    low += 1;
                }
            }
        }
        low as f64 / (a1.len() as f64 * a2.len() as f64)
    }

    fn feasible(&self, a1: &[usize], a2: &[usize], c: [usize; 2]) -> bool {
        !a1.is_empty()
            && !a2.is_empty()
            && a1.len() as f64 >= self.floor[0] * c[0] as f64
            && a2.len() as f64 >= self.floor[1] * c[1] as f64
    }

    /// Children of a state: one per shift r that keeps both sets above the
    /// floor and shrinks at least one of them. At the root one non-shrinking
    /// shift stands for the state itself. Small states order children by low
    /// mass; large ones by size, smallest first, to reach tight sets quickly.
    fn children(&self, a1: &[usize], a2: &[usize], c: [usize; 2], root: bool) -> Vec<Child> {
        let g = self.g;
        let mut cnt1 = vec![0u32; g.size()];
        let mut cnt2 = vec![0u32; g.size()];
        for (set, cnt) in [(a1, &mut cnt1), (a2, &mut cnt2)] {
            for &x in set {
                for &y in self.a {
                    cnt[g.sub(x, y)] += 1;
                }
            }
        }
        let mut out = Vec::new();
        let mut keep_same = root;
        for r in g.elements() {
            let (k1, k2) = (cnt1[r] as usize, cnt2[r] as usize);
            if k1 == a1.len() && k2 == a2.len() {
                if !keep_same {
                    continue;
                }
                keep_same = false;
            }
            if k1 == 0
                || k2 == 0
                || (k1 as f64) < self.floor[0] * c[0] as f64
                || (k2 as f64) < self.floor[1] * c[1] as f64
            {
                continue;
            }
            out.push(Child { r, size: k1 * k2, low: None });
        }
        let cheap = (a1.len() * a2.len()).saturating_mul(out.len()) <= SCORE_BUDGET;
        if cheap {
            for ch in out.iter_mut() {
                let (n1, n2) = self.apply(a1, a2, ch.r);
                ch.low = Some(self.low_mass(&n1, &n2));
            }
            out.sort_by(|x, y| x.low.unwrap().total_cmp(&y.low.unwrap()).then(x.r.cmp(&y.r)));
        } else {
            out.sort_by_key(|ch| (ch.size, ch.r));
        }
        out
    }

    fn apply(&self, a1: &[usize], a2: &[usize], r: usize) -> (Vec<usize>, Vec<usize>) {
        let g = self.g;
        (
            a1.iter().copied().filter(|&x| self.am[g.sub(x, r)]).collect(),
            a2.iter().copied().filter(|&x| self.am[g.sub(x, r)]).collect(),
        )
    }

    fn dfs(&mut self, a1: Vec<usize>, a2: Vec<usize>, path: &mut Vec<usize>, c: [usize; 2]) -> Step {
        let remaining = self.p - path.len();
        if remaining == 0 {
            return Step::Done;
        }
        let key = (a1, a2);
        if let Some(&r) = self.seen.get(&key) {
            if r >= remaining {
                return Step::Done;
            }
        }
        let (a1, a2) = key;
        self.seen.insert((a1.clone(), a2.clone()), remaining);
        let kids = self.children(&a1, &a2, c, path.is_empty());
        for ch in kids {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Exhausted;
            }
            let (n1, n2) = self.apply(&a1, &a2, ch.r);
            let low = ch.low.unwrap_or_else(|| self.low_mass(&n1, &n2));
            path.push(ch.r);
            if low <= self.bound && self.feasible(&n1, &n2, c) {
                return Step::Found(path.clone(), n1, n2);
            }
            match self.dfs(n1, n2, path, c) {
                Step::Done => {
                    path.pop();
                }
                other => return other,
            }
        }
        Step::Done
    }
}

struct Child {
    r: usize,
    size: usize,
    low: Option<f64>,
}

const SCORE_BUDGET: usize = 1 << 22;

/// `weighted_sift` for A inside a container B (relative density α = |A|/|B|,
/// β = |B|/|G|). Finds s ∈ G^p with ⟨μ_{A1(s)}∘μ_{A2(s)}, 1_S⟩ ≤ 4(1−ε)^p and
/// |A_i(s)| ≥ ¼α^p|C_i|, where S = {μ_A∘μ_A ≤ (1−ε)‖μ_A∘μ_A‖_{p(μ_{C1}∘μ_{C2})}}.
///
/// The search walks the states (A1, A2) reachable by adding one shift at a
/// time, so it is exhaustive over G^p whenever it finishes inside the node
/// budget. After the budget it samples tuples; if none qualifies it reports
/// not-found. A finished search with no witness contradicts the averaging
/// argument and is an internal error.
#[allow(clippy::too_many_arguments)]
pub fn weighted_sift(
    g: &GroupSpec,
    a: &[usize],
    container: &[usize],
    c1: &[usize],
    c2: &[usize],
    p: usize,
    eps: f64,
    cfg: &SiftConfig,
) -> Result<WeightedSift> {
    for s in [a, container, c1, c2] {
        check_set(g, s)?;
        if s.is_empty() {
            return invalid("weighted sifting needs non-empty A, B, C1, C2");
        }
    }
    if p == 0 {
        return invalid("p must be at least 1");
    }
    if !(eps > 0.0 && eps < 1.0) {
        return invalid("ε must lie in (0, 1)");
    }
    if !is_subset(a, container) {
        return Err(ApcError::Precondition("A is not inside its container".into()));
    }
    let n = g.size() as f64;
    let alpha = a.len() as f64 / container.len() as f64;
    let beta = container.len() as f64 / n;
    let aa = diff_convolution(g, a, a)?;
    let mu = crate::harmonic::ProbMeasure::new(diff_convolution(g, c1, c2)?)?;
    let norm = lp_norm(&aa, p as f64, Some(&mu))?;
    if !crate::approx_ge(norm, 1.0 / beta) {
        return Err(ApcError::Precondition(format!("‖μ_A∘μ_A‖_p = {norm} is below β^-1 = {}", 1.0 / beta)));
    }
    let level = (1.0 - eps) * norm;
    let high: Vec<bool> = aa.values().iter().map(|&v| v > level).collect();
    let bound = 4.0 * (1.0 - eps).powf(p as f64);
    let floor_rel = 0.25 * alpha.powf(p as f64);
    let mut search = SiftSearch {
        g,
        a,
        am: mask(g, a),
        high,
        floor: [floor_rel, floor_rel],
        bound,
        p,
        budget: cfg.node_budget,
        nodes: 0,
        seen: HashMap::new(),
    };
    let sizes = [c1.len(), c2.len()];
    let mut path = Vec::new();
    let found = search.dfs(c1.to_vec(), c2.to_vec(), &mut path, sizes);
    let (shifts, a1, a2, exhaustive) = match found {
        Step::Found(s, x, y) => (s, x, y, true),
        Step::Done => {
            return Err(ApcError::Internal(format!(
                "exhaustive search over G^{p} found no shift tuple meeting the sifting bounds"
            )))
        }
        Step::Exhausted => {
            let mut rng = seeded(cfg.seed);
            let mut hit = None;
            'outer: for _ in 0..cfg.samples {
                let mut x: Vec<usize> = c1.to_vec();
                let mut y: Vec<usize> = c2.to_vec();
                let mut s = Vec::with_capacity(p);
                for _ in 0..p {
                    let r = rng.gen_range(0..g.size());
                    s.push(r);
                    x.retain(|&v| search.am[g.sub(v, r)]);
                    y.retain(|&v| search.am[g.sub(v, r)]);
                    if !search.feasible(&x, &y, sizes) {
                        continue 'outer;
                    }
                }
                if search.low_mass(&x, &y) <= bound {
                    hit = Some((s, x, y));
                    break;
                }
            }
            match hit {
                Some((s, x, y)) => (s, x, y, false),
                None => {
                    return Err(ApcError::NotFound(format!(
                        "no sifting tuple within {} nodes and {} samples",
                        cfg.node_budget, cfg.samples
                    )))
                }
            }
        }
    };
    let mut shifts = shifts;
    let last = *shifts.last().expect("non-empty shift path");
    shifts.resize(p, last);

    // Re-derive both sets from the tuple and re-check every bound.
    let sets = sifted_sets(g, a, &shifts, &[c1, c2]);
    if sets[0] != a1 || sets[1] != a2 {
        return Err(ApcError::Internal("sifted sets disagree with the search state".into()));
    }
    let low_ind = GroupFn::from_fn(g, |x| if aa.get(x) <= level { 1.0 } else { 0.0 });
    let low_mass = diff_pair_inner(g, &a1, &a2, &low_ind);
    let rel = [a1.len() as f64 / c1.len() as f64, a2.len() as f64 / c2.len() as f64];
    if low_mass > bound + 1e-12 || rel[0] < floor_rel || rel[1] < floor_rel {
        return Err(ApcError::Internal("weighted sift output violates its bounds".into()));
    }
    Ok(WeightedSift {
        shifts,
        a1,
        a2,
        p,
        eps,
        norm,
        level,
        low_mass,
        low_mass_bound: bound,
        rel_density: rel,
        density_floor: floor_rel,
        exhaustive,
        nodes: search.nodes,
    })
}

/// Smallest p′ ≥ p with factor·(1−ε)^{p′} ≤ target.
pub fn bump_exponent(p: usize, factor: f64, eps: f64, target: f64) -> usize {
    let need = ((target / factor).ln() / (1.0 - eps).ln()).ceil().max(1.0) as usize;
    let mut q = p.max(need.saturating_sub(1)).max(1);
    while factor * (1.0 - eps).powf(q as f64) > target {
        q += 1;
    }
    q
}

// -------------------------------------------------------------------------
// iterated sifting over a finite field
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub size: usize,
    /// ⟨μ_A∘μ_A, μ_{A^j}∘μ_{A^j}⟩.
    pub self_corr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IteratedSift {
    pub sigma: f64,
    /// Level (1 − 2^-7)σ defining S = {μ_A∘μ_A ≥ level}.
    pub level: f64,
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    /// ⟨μ_{A1}∘μ_{A2}, 1_S⟩.
    pub mass_on_s: f64,
    /// ⟨μ_A∘μ_A, μ_{A_i}∘μ_{A_i}⟩.
    pub self_corr: [f64; 2],
    pub chain: Vec<ChainLink>,
    /// Exponent of the first sift, after the bump.
    pub p_used: usize,
    pub exhaustive: bool,
}

const FF_EPS: f64 = 1.0 / 128.0;

/// `ff_iterated_sift` for A ⊆ G with ‖μ_A∘μ_A‖_p ≥ 1 + 2^-3: finds σ and
/// A1, A2 with ⟨μ_{A1}∘μ_{A2}, 1_S⟩ ≥ 1 − 2^-7 for S = {μ_A∘μ_A ≥ (1−2^-7)σ}
/// and ⟨μ_A∘μ_A, μ_{A_i}∘μ_{A_i}⟩ ≤ 2σ, through a maximal chain
/// A ⊇ A^1 ⊇ A^2 ⊇ … along which the self-correlation at least doubles.
pub fn ff_iterated_sift(g: &GroupSpec, a: &[usize], p: usize, cfg: &SiftConfig) -> Result<IteratedSift> {
    check_set(g, a)?;
    if a.is_empty() {
        return invalid("A must be non-empty");
    }
    if p == 0 {
        return invalid("p must be at least 1");
    }
    let all: Vec<usize> = g.elements().collect();
    let aa = diff_convolution(g, a, a)?;
    let base = lp_norm(&aa, p as f64, None)?;
    if !crate::approx_ge(base, 1.0 + 0.125) {
        return Err(ApcError::Precondition(format!("‖μ_A∘μ_A‖_p = {base} is below 1 + 2^-3")));
    }
    let alpha = a.len() as f64 / g.size() as f64;
    // 4(1−ε)^p ≤ 2^-7 makes the sifted pair put mass ≥ 1 − 2^-7 above the level.
    let p1 = bump_exponent(p, 4.0, FF_EPS, FF_EPS);
    let first = weighted_sift(g, a, &all, &all, &all, p1, FF_EPS, cfg)?;
    let corr = |x: &[usize]| diff_pair_inner(g, x, x, &aa);
    let mut exhaustive = first.exhaustive;
    let sigma1 = first.norm;
    let self1 = [corr(&first.a1), corr(&first.a2)];
    let mut chain = Vec::new();

    let (sigma, a1, a2, selfc) = if self1[0] <= 2.0 * sigma1 && self1[1] <= 2.0 * sigma1 {
        (sigma1, first.a1, first.a2, self1)
    } else {
        let pick = if self1[0] > 2.0 * sigma1 { first.a1 } else { first.a2 };
        let mut cur_corr = corr(&pick);
        let mut cur = pick;
        chain.push(ChainLink { size: cur.len(), self_corr: cur_corr });
        let p2 = bump_exponent(1, 4.0, FF_EPS, FF_EPS);
        let c2 = cfg.c2.unwrap_or(p2 as f64);
        let cap = (1.0 / alpha).log2().ceil().max(0.0) as usize + cfg.chain_slack;
        loop {
            if chain.len() > cap {
                return Err(ApcError::Internal(format!("sifting chain exceeded {cap} links")));
            }
            let ws = weighted_sift(g, a, &all, &cur, &cur, p2, FF_EPS, cfg)?;
            exhaustive &= ws.exhaustive;
            let c = [corr(&ws.a1), corr(&ws.a2)];
            let floor = cfg.c1 * alpha.powf(c2) * cur.len() as f64;
            let next = (0..2).find(|&i| c[i] >= 2.0 * cur_corr && [&ws.a1, &ws.a2][i].len() as f64 >= floor);
            match next {
                Some(i) => {
                    cur = if i == 0 { ws.a1 } else { ws.a2 };
                    cur_corr = c[i];
                    chain.push(ChainLink { size: cur.len(), self_corr: cur_corr });
                }
                None => {
                    if c.iter().any(|&v| v > 2.0 * cur_corr) {
                        return Err(ApcError::Internal(
                            "sifted subset doubles the correlation but is below the chain density".into(),
                        ));
                    }
                    break (cur_corr, ws.a1, ws.a2, c);
                }
            }
        }
    };
    let level = (1.0 - FF_EPS) * sigma;
    let s_ind = GroupFn::from_fn(g, |x| if aa.get(x) >= level { 1.0 } else { 0.0 });
    let mass = diff_pair_inner(g, &a1, &a2, &s_ind);
    let ok = mass >= 1.0 - FF_EPS - 1e-12
        && selfc.iter().all(|&v| v <= 2.0 * sigma * (1.0 + 1e-12))
        && sigma >= 1.125 * (1.0 - 1e-12)
        && sigma <= (1.0 / alpha) * (1.0 + 1e-12);
    if !ok {
        return Err(ApcError::Internal(format!(
            "iterated sifting output fails its bounds (σ = {sigma}, mass = {mass}, self = {selfc:?})"
        )));
    }
    Ok(IteratedSift { sigma, level, a1, a2, mass_on_s: mass, self_corr: selfc, chain, p_used: p1, exhaustive })
}

// -------------------------------------------------------------------------
// sifting inside Bohr sets
// -------------------------------------------------------------------------

/// max over translates t of ‖f‖_{p(μ_{B+t})} with the maximizing t (smallest on ties).
/// ‖f‖^p_{p(μ_{B+t})} = (1/|B|) Σ_{b∈B} |f(b + t)|^p.
pub fn max_translate_norm(f: &GroupFn, b: &[usize], p: usize) -> (usize, f64) {
    let g = f.group();
    let m = f.sup_abs();
    if m == 0.0 {
        return (0, 0.0);
    }
    let w: Vec<f64> = f.values().iter().map(|v| (v.abs() / m).powf(p as f64)).collect();
    let mut best = (0usize, f64::NEG_INFINITY);
    for t in g.elements() {
        let s: f64 = b.iter().map(|&x| w[g.add(x, t)]).sum::<f64>() / b.len() as f64;
        if s > best.1 {
            best = (t, s);
        }
    }
    (best.0, m * best.1.powf(1.0 / p as f64))
}

/// max_t ‖f‖_{p(ν_t)} over the translates ν_t(x) = ν(x − t) of a measure.
pub fn max_translate_measure_norm(f: &GroupFn, nu: &GroupFn, p: usize) -> Result<(usize, f64)> {
    let m = f.sup_abs();
    if m == 0.0 {
        return Ok((0, 0.0));
    }
    let w = f.map(|v| (v.abs() / m).powf(p as f64));
    // (w∘ν)(t) = 𝔼_x ν(x) w(x + t) = 𝔼_x w(x) ν(x − t)
    let c = convolve(nu, &w, ConvMode::Circ)?;
    let t = c.argmax();
    Ok((t, m * c.get(t).max(0.0).powf(1.0 / p as f64)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizedSift {
    /// 1 when C itself is kept, 2 when a weighted sift inside nested Bohr sets is used.
    pub case: u8,
    pub outer: BohrSet,
    pub inner: BohrSet,
    pub t: usize,
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    /// ⟨μ_A∘μ_A, μ_{A1}∘μ_{A2}⟩, at least σ.
    pub corr: f64,
    pub p: usize,
    /// Radius of `outer` relative to the input B¹.
    pub rho: f64,
    pub rel_density: [f64; 2],
}

fn nesting(b: &BohrSet) -> f64 {
    b.rank().max(1) as f64
}

/// Localized sifting: A ⊆ B, C ⊆ B¹ with ⟨μ_A∘μ_A, μ_C∘μ_C⟩ ≥ 2^7σ and
/// σ ≥ μ(B)^{-1}. Produces regular B″ ⊂_{c/d} B′ ⊆ B¹, t, A1 ⊆ B′ and
/// A2 ⊆ B″ + t with ⟨μ_A∘μ_A, μ_{A1}∘μ_{A2}⟩ ≥ σ.
pub fn localized_sift(
    a: &[usize],
    b: &BohrSet,
    b1: &BohrSet,
    c: &[usize],
    sigma: f64,
    cfg: &SiftConfig,
) -> Result<LocalizedSift> {
    let g = b.group();
    check_set(g, a)?;
    check_set(g, c)?;
    if a.is_empty() || c.is_empty() {
        return invalid("A and C must be non-empty");
    }
    if !is_subset(a, b.members()) || !is_subset(c, b1.members()) {
        return Err(ApcError::Precondition("need A ⊆ B and C ⊆ B¹".into()));
    }
    if !b1.is_regular() {
        return Err(ApcError::Precondition("B¹ is not regular".into()));
    }
    let inv_mu_b = 1.0 / b.density();
    if !crate::approx_ge(sigma, inv_mu_b) {
        return Err(ApcError::Precondition("σ < μ(B)^-1".into()));
    }
    let aa = diff_convolution(g, a, a)?;
    let cc = diff_pair_inner(g, c, c, &aa);
    if !crate::approx_ge(cc, 128.0 * sigma) {
        return Err(ApcError::Precondition(format!("⟨μ_A∘μ_A, μ_C∘μ_C⟩ = {cc} is below 2^7σ")));
    }
    let d = nesting(b1);
    let r = cfg.c / d;
    let b2 = b1.nested_regular(r)?;
    let alpha = a.len() as f64 / b.size() as f64;
    let gamma = c.len() as f64 / b1.size() as f64;
    let lo_a = crate::lo(alpha);
    let p_real = (crate::lo(gamma) / lo_a).max(lo_a / std::f64::consts::LN_2).max(3.0);
    let p = p_real.ceil() as usize;

    let (_, top) = max_translate_norm(&aa, b2.members(), p);
    if top <= 8.0 * sigma {
        // Keep C; localize its partner to the densest translate of B².
        let cm = mask(g, c);
        let wide = b1.dilate(1.0 + 1.0 / (200.0 * d));
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for &y in wide.members() {
            let cy: Vec<usize> = b2.members().iter().map(|&x| g.add(x, y)).filter(|&x| cm[x]).collect();
            if cy.is_empty() || (cy.len() as f64) < alpha * gamma * b2.size() as f64 {
                continue;
            }
            let v = diff_pair_inner(g, c, &cy, &aa);
            if best.as_ref().map_or(true, |b| v > b.0) {
                best = Some((v, y, cy));
            }
        }
        let (v, y, cy) = best.ok_or_else(|| ApcError::Internal("no translate of B² keeps a γα share of C".into()))?;
        if !crate::approx_ge(v, sigma) {
            return Err(ApcError::Internal(format!("best localized translate correlates {v} < σ = {sigma}")));
        }
        let rel = [1.0, cy.len() as f64 / b2.size() as f64];
        return Ok(LocalizedSift {
            case: 1,
            outer: b1.clone(),
            inner: b2,
            t: y,
            a1: c.to_vec(),
            a2: cy,
            corr: v,
            p,
            rho: 1.0,
            rel_density: [c.len() as f64 / b1.size() as f64, rel[1]],
        });
    }

    // Case 2: a translate of B² carries a large L^p mass.
    let pe = p + p % 2;
    let outer = b2.nested_regular(r)?;
    let inner = outer.nested_regular(r)?;
    let m0 = convolve(outer.measure().as_fn(), inner.measure().as_fn(), ConvMode::Circ)?;
    let (t, val) = max_translate_measure_norm(&aa, &m0, pe)?;
    if !crate::approx_ge(val, 4.0 * sigma) {
        return Err(ApcError::Internal(format!("averaged L^p mass {val} is below 4σ = {}", 4.0 * sigma)));
    }
    let shifted = translate_set(g, inner.members(), t);
    let ws = weighted_sift(g, a, b.members(), outer.members(), &shifted, pe, 0.5, cfg)?;
    let v = diff_pair_inner(g, &ws.a1, &ws.a2, &aa);
    if !crate::approx_ge(v, sigma) {
        return Err(ApcError::Internal(format!("localized sift pair correlates {v} < σ = {sigma}")));
    }
    let rho = outer.radius() / b1.radius();
    Ok(LocalizedSift {
        case: 2,
        rel_density: [ws.a1.len() as f64 / outer.size() as f64, ws.a2.len() as f64 / inner.size() as f64],
        outer,
        inner,
        t,
        a1: ws.a1,
        a2: ws.a2,
        corr: v,
        p: pe,
        rho,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrChainLink {
    pub outer: BohrSet,
    pub inner: BohrSet,
    pub t: usize,
    pub z1: Vec<usize>,
    pub z2: Vec<usize>,
    /// ⟨μ_A∘μ_A, μ_{Z1}∘μ_{Z2}⟩.
    pub corr: f64,
    /// Radius of this link's outer set over the previous link's set it was cut from.
    pub delta: f64,
    /// Densities |Z1|/|outer|, |Z2|/|inner|, and whether they clear the recorded floors.
    pub zeta: [f64; 2],
    pub density_floor_met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrIteratedSift {
    pub sigma: f64,
    /// S = {μ_A∘μ_A ≥ level}, level = (1 − 2^-10)σμ(B)^{-1}.
    pub level: f64,
    pub outer: BohrSet,
    pub inner: BohrSet,
    pub t: usize,
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub mass_on_s: f64,
    /// ⟨μ_A∘μ_A, μ_{A_i}∘μ_{A_i}⟩ / μ(B)^{-1}, each at most 2^8σ.
    pub self_corr: [f64; 2],
    pub chain: Vec<BohrChainLink>,
    pub p_used: usize,
    pub q_used: usize,
    pub exhaustive: bool,
}

fn check_nested(outer: &BohrSet, inner: &BohrSet, r: f64) -> Result<()> {
    if !outer.is_regular() || !inner.is_regular() {
        return Err(ApcError::Precondition("nested Bohr sets must be regular".into()));
    }
    if outer.freqs() != inner.freqs() {
        return Err(ApcError::Precondition("nested Bohr sets must share frequencies".into()));
    }
    let ratio = inner.radius() / outer.radius();
    if !(ratio <= r * (1.0 + 1e-12) && ratio >= 0.5 * r * (1.0 - 1e-12)) {
        return Err(ApcError::Precondition(format!("radius ratio {ratio} outside [r/2, r] for r = {r}")));
    }
    Ok(())
}

/// Iterated sifting inside Bohr sets: A ⊆ B, B² ⊂_{c/d} B¹ and
/// ‖μ_A∘μ_A‖_{p(μ_{B¹}∘μ_{B¹}∗μ_{B²}∘μ_{B²})} ≥ (1+2^-5)μ(B)^{-1}.
pub fn bohr_iterated_sift(
    a: &[usize],
    b: &BohrSet,
    b1: &BohrSet,
    b2: &BohrSet,
    p: usize,
    cfg: &SiftConfig,
) -> Result<BohrIteratedSift> {
    let g = b.group();
    check_set(g, a)?;
    if a.is_empty() || !is_subset(a, b.members()) {
        return Err(ApcError::Precondition("A must be a non-empty subset of B".into()));
    }
    if p == 0 {
        return invalid("p must be at least 1");
    }
    let d = nesting(b1);
    check_nested(b1, b2, cfg.c / d)?;
    let inv = 1.0 / b.density();
    let aa = diff_convolution(g, a, a)?;
    let nu = crate::bohr::smoothing_measure(b1, b2)?;
    let n0 = lp_norm(&aa, p as f64, Some(&nu))?;
    if !crate::approx_ge(n0, (1.0 + 1.0 / 32.0) * inv) {
        return Err(ApcError::Precondition(format!(
            "‖μ_A∘μ_A‖_p = {n0} is below (1+2^-5)μ(B)^-1 = {}",
            (1.0 + 1.0 / 32.0) * inv
        )));
    }
    let alpha = a.len() as f64 / b.size() as f64;
    // (1−2^-7)^p ≤ 2^-9
    let p1 = bump_exponent(p, 1.0, FF_EPS, 1.0 / 512.0);
    let m0 = convolve(b1.measure().as_fn(), b2.measure().as_fn(), ConvMode::Circ)?;
    let (t1, _) = max_translate_measure_norm(&aa, &m0, p1)?;
    let shifted = translate_set(g, b2.members(), t1);
    let ws = weighted_sift(g, a, b.members(), b1.members(), &shifted, p1, FF_EPS, cfg)?;
    let mut exhaustive = ws.exhaustive;
    let corr0 = diff_pair_inner(g, &ws.a1, &ws.a2, &aa);
    if !crate::approx_ge(corr0, (1.0 + FF_EPS) * inv) {
        return Err(ApcError::Internal(format!("first sifted pair correlates {corr0} < (1+2^-7)μ(B)^-1")));
    }
    let c0 = cfg.c0.unwrap_or(p as f64 + 2.0);
    let lo_exp = crate::lo(alpha) / std::f64::consts::LN_2 + c0;
    let z_floor = |prev: &[f64]| {
        let mut f = alpha.powf(lo_exp);
        for &z in prev {
            f = f.min(alpha.powf(c0) * z);
        }
        f
    };
    let zeta0 = [ws.a1.len() as f64 / b1.size() as f64, ws.a2.len() as f64 / b2.size() as f64];
    let mut chain = vec![BohrChainLink {
        outer: b1.clone(),
        inner: b2.clone(),
        t: t1,
        z1: ws.a1,
        z2: ws.a2,
        corr: corr0,
        delta: 1.0,
        zeta: zeta0,
        density_floor_met: zeta0.iter().all(|&z| z >= z_floor(&[])),
    }];
    let q = bump_exponent(1, 4.0, 1.0 / 1024.0, 1.0 / 16384.0);
    let cap = (1.0 / alpha).log2().ceil().max(0.0) as usize + cfg.chain_slack;
    loop {
        if chain.len() > cap + 1 {
            return Err(ApcError::Internal(format!("Bohr sifting chain exceeded {cap} links")));
        }
        let link = chain.last().expect("chain is non-empty").clone();
        let sigma = link.corr / inv;
        let ws = weighted_sift(g, a, b.members(), &link.z1, &link.z2, q, 1.0 / 1024.0, cfg)?;
        exhaustive &= ws.exhaustive;
        let sc = [diff_pair_inner(g, &ws.a1, &ws.a1, &aa), diff_pair_inner(g, &ws.a2, &ws.a2, &aa)];
        let over = (0..2).find(|&i| sc[i] > 256.0 * sigma * inv);
        match over {
            None => {
                let level = (1.0 - 1.0 / 1024.0) * sigma * inv;
                let s_ind = GroupFn::from_fn(g, |x| if aa.get(x) >= level { 1.0 } else { 0.0 });
                let mass = diff_pair_inner(g, &ws.a1, &ws.a2, &s_ind);
                let ok = mass >= 1.0 - 1.0 / 4096.0 - 1e-12
                    && sigma >= (1.0 + FF_EPS) * (1.0 - 1e-12)
                    && sigma <= (1.0 / alpha) * (1.0 + 1e-9);
                if !ok {
                    return Err(ApcError::Internal(format!(
                        "Bohr iterated sift fails its bounds (σ = {sigma}, mass = {mass})"
                    )));
                }
                check_nested(&link.outer, &link.inner, cfg.c / d)
                    .map_err(|e| ApcError::Internal(format!("final pair not nested: {e}")))?;
                return Ok(BohrIteratedSift {
                    sigma,
                    level,
                    outer: link.outer,
                    inner: link.inner,
                    t: link.t,
                    a1: ws.a1,
                    a2: ws.a2,
                    mass_on_s: mass,
                    self_corr: [sc[0] / inv, sc[1] / inv],
                    chain,
                    p_used: p1,
                    q_used: q,
                    exhaustive,
                });
            }
            Some(i) => {
                // Move the offending set into its own Bohr set and sift locally.
                let (host, cset) = if i == 0 {
                    (link.outer.clone(), ws.a1.clone())
                } else {
                    (link.inner.clone(), translate_set(g, &ws.a2, g.neg(link.t)))
                };
                let loc = localized_sift(a, b, &host, &cset, 2.0 * sigma * inv, cfg)?;
                let corr = diff_pair_inner(g, &loc.a1, &loc.a2, &aa);
                if !crate::approx_ge(corr, 2.0 * link.corr) {
                    return Err(ApcError::Internal("localized sift failed to double the correlation".into()));
                }
                let zeta =
                    [loc.a1.len() as f64 / loc.outer.size() as f64, loc.a2.len() as f64 / loc.inner.size() as f64];
                let prev: Vec<f64> = chain.iter().rev().take(1).flat_map(|l| l.zeta).collect();
                let floor = z_floor(&prev);
                chain.push(BohrChainLink {
                    delta: loc.outer.radius() / host.radius(),
                    outer: loc.outer,
                    inner: loc.inner,
                    t: loc.t,
                    z1: loc.a1,
                    z2: loc.a2,
                    corr,
                    zeta,
                    density_floor_met: zeta.iter().all(|&z| z >= floor),
                });
            }
        }
    }
}

/// Intersection of A with its translates, for callers that build C sets by hand.
pub fn translates_intersection(g: &GroupSpec, a: &[usize], shifts: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = g.elements().collect();
    for &s in shifts {
        out = intersect(&out, &translate_set(g, a, s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::random_subset;

    #[test]
    fn identity_matches_on_small_group() {
        let g = GroupSpec::cyclic(6).unwrap();
        let a = vec![0, 1, 3];
        let c1 = vec![0, 1, 2, 4];
        let c2 = vec![1, 2, 5];
        let f = GroupFn::from_fn(&g, |x| (x * x) as f64 - 1.5);
        for p in 1..=2 {
            let (l, r) = sift_identity(&g, &a, &c1, &c2, p, &f, 1_000_000).unwrap();
            assert!((l - r).abs() <= 1e-9 * l.abs().max(1.0), "p={p}: {l} vs {r}");
        }
    }

    #[test]
    fn whole_group_is_a_fixed_point() {
        let g = GroupSpec::cyclic(5).unwrap();
        let all: Vec<usize> = g.elements().collect();
        let w = weighted_sift(&g, &all, &all, &all, &all, 1, 0.5, &SiftConfig::default()).unwrap();
        assert_eq!(w.a1, all);
        assert_eq!(w.a2, all);
        assert_eq!(w.low_mass, 0.0);
    }

    #[test]
    fn random_weighted_sifts_meet_bounds() {
        let mut rng = seeded(3);
        for n in [7usize, 9, 12] {
            let g = GroupSpec::cyclic(n).unwrap();
            for _ in 0..5 {
                let a = random_subset(&mut rng, &g, 0.5);
                let all: Vec<usize> = g.elements().collect();
                let c1 = random_subset(&mut rng, &g, 0.6);
                let c2 = random_subset(&mut rng, &g, 0.6);
                match weighted_sift(&g, &a, &all, &c1, &c2, 2, 0.25, &SiftConfig::default()) {
                    Ok(w) => assert!(w.exhaustive && w.low_mass <= w.low_mass_bound),
                    Err(ApcError::Precondition(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn bump() {
        let p = bump_exponent(1, 4.0, 1.0 / 128.0, 1.0 / 128.0);
        assert!(4.0 * (1.0f64 - 1.0 / 128.0).powf(p as f64) <= 1.0 / 128.0);
        assert!(4.0 * (1.0f64 - 1.0 / 128.0).powf(p as f64 - 1.0) > 1.0 / 128.0);
        assert_eq!(bump_exponent(5000, 4.0, 1.0 / 128.0, 1.0 / 128.0), 5000);
    }

    #[test]
    fn iterated_sift_on_cap_set() {
        let g = GroupSpec::power(3, 2).unwrap();
        let a: Vec<usize> = [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|r| g.index_of(r).unwrap()).collect();
        let out = ff_iterated_sift(&g, &a, 2, &SiftConfig::default()).unwrap();
        assert!(out.mass_on_s >= 1.0 - 1.0 / 128.0);
        assert!(out.sigma >= 1.125);
    }
}
