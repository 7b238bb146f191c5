//! Ground-truth oracles: exact 3-AP counting, progression-free search,
//! brute-force density increments, Behrend-type constructions and the
//! bound curves used for reporting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohr::BohrSet;
use crate::error::{invalid, ApcError, Result};
use crate::group::{check_set, mask, GroupSpec};
use crate::harmonic::{fourier, GroupFn};
use crate::subspace::{subspaces_up_to_codim, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApCount {
    /// Pairs (a, d) with a, a+d, a+2d ∈ A.
    pub total: u64,
    /// d = 0 pairs; always |A|.
    pub trivial: u64,
    pub nontrivial: u64,
}

fn loop_count(g: &GroupSpec, a: &[usize]) -> u64 {
    let m = mask(g, a);
    let mut total = 0u64;
    for &x in a {
        for d in g.elements() {
            let y = g.add(x, d);
            if m[y] && m[g.add(y, d)] {
                total += 1;
            }
        }
    }
    total
}

/// |G|²·Σ_γ 1̂_A(γ)²·conj P̂(γ), where P(x) = #{w ∈ A : 2w = x}.
/// When 2 is a unit this is α³|G|²⟨μ_A∗μ_A, μ_{2·A}⟩.
fn fourier_count(g: &GroupSpec, a: &[usize]) -> Result<u64> {
    let ind = GroupFn::indicator(g, a);
    let mut push = GroupFn::zeros(g);
    for &w in a {
        push.values_mut()[g.add(w, w)] += 1.0;
    }
    let ih = fourier(&ind);
    let ph = fourier(&push);
    let s: Complex64 = ih.values().iter().zip(ph.values()).map(|(f, p)| f * f * p.conj()).sum();
    let n2 = (g.size() as f64).powi(2);
    let v = s * n2;
    if v.im.abs() > 1e-6 * v.re.abs().max(1.0) || v.re < -0.5 {
        return Err(ApcError::Internal(format!("Fourier 3-AP count {v} is not a non-negative real")));
    }
    Ok(v.re.round() as u64)
}

/// `count_3aps`: exact (a, d) loop, cross-checked against the Fourier form.
pub fn count_3aps(g: &GroupSpec, a: &[usize]) -> Result<ApCount> {
    if a.is_empty() {
        return invalid("3-AP count of the empty set");
    }
    check_set(g, a)?;
    let total = loop_count(g, a);
    let f = fourier_count(g, a)?;
    if f != total {
        return Err(ApcError::Internal(format!("3-AP count {total} disagrees with Fourier count {f}")));
    }
    let trivial = a.len() as u64;
    Ok(ApCount { total, trivial, nontrivial: total - trivial })
}

/// 3-AP count by the loop alone, for callers that need no cross-check.
pub fn count_3aps_direct(g: &GroupSpec, a: &[usize]) -> u64 {
    loop_count(g, a)
}

/// ⟨μ_A∗μ_A, μ_{2·A}⟩ = total/(α³|G|²); exact up to one rounding.
pub fn ap_ratio(g: &GroupSpec, a: &[usize]) -> f64 {
    let n = g.size() as f64;
    let k = a.len() as f64;
    loop_count(g, a) as f64 * n / (k * k * k)
}

/// `is_ap_free` on a group: no (a, d) with d ≠ 0 inside A.
pub fn is_ap_free(g: &GroupSpec, a: &[usize]) -> bool {
    let m = mask(g, a);
    for &x in a {
        for d in 1..g.size() {
            let y = g.add(x, d);
            if m[y] && m[g.add(y, d)] {
                return false;
            }
        }
    }
    true
}

/// Nontrivial integer 3-APs {a < b < c, a + c = 2b} in a set of integers.
pub fn count_interval_aps(a: &[i64]) -> u64 {
    let mut s: Vec<i64> = a.to_vec();
    s.sort_unstable();
    s.dedup();
    let set: std::collections::HashSet<i64> = s.iter().copied().collect();
    let mut n = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if (s[i] + s[j]) % 2 == 0 && set.contains(&((s[i] + s[j]) / 2)) {
                n += 1;
            }
        }
    }
    n
}

/// `is_ap_free` on integers.
pub fn is_ap_free_interval(a: &[i64]) -> bool {
    count_interval_aps(a) == 0
}

// -------------------------------------------------------------------------
// progression-free search
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxApFree {
    pub size: usize,
    /// Integers in [1, N] for the interval domain, canonical indices for a group.
    pub witness: Vec<i64>,
    /// False when the node budget ran out; `size` is then only a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

impl MaxApFree {
    /// Ok only for a completed search.
    pub fn into_exact(self) -> Result<Self> {
        if self.exact {
            Ok(self)
        } else {
            Err(ApcError::ResourceLimit(format!(
                "search budget exhausted; best found has size {} and is not certified optimal",
                self.size
            )))
        }
    }
}

struct IntervalSearch {
    n: usize,
    /// r[k] = exact maximum for [1, k], k < n.
    r: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl IntervalSearch {
    /// Elements are 1-based; `forbidden[v]` counts chosen pairs completing to v.
    fn go(&mut self, next: usize, chosen: &mut Vec<usize>, forbidden: &mut Vec<u32>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        if next > self.n {
            return;
        }
        let avail = (next..=self.n).filter(|&v| forbidden[v] == 0).count();
        let span = self.n - next + 1;
        let cap = if span < self.r.len() { avail.min(self.r[span]) } else { avail };
        if chosen.len() + cap <= self.best.len() {
            return;
        }
        for x in next..=self.n {
            if forbidden[x] != 0 {
                continue;
            }
            let avail_after = (x..=self.n).filter(|&v| forbidden[v] == 0).count();
            let span = self.n - x + 1;
            let cap = if span < self.r.len() { avail_after.min(self.r[span]) } else { avail_after };
            if chosen.len() + cap <= self.best.len() {
                break;
            }
            let mut marked = Vec::new();
            for &y in chosen.iter() {
                let z = 2 * x - y;
                if z <= self.n {
                    forbidden[z] += 1;
                    marked.push(z);
                }
            }
            chosen.push(x);
            self.go(x + 1, chosen, forbidden);
            chosen.pop();
            for z in marked {
                forbidden[z] -= 1;
            }
            if self.exhausted {
                return;
            }
        }
    }
}

/// `max_apfree` on [1, N]: branch and bound over increasing elements with 1
/// fixed in the set, bounded by the exact maxima of shorter intervals.
pub fn max_apfree_interval(n: usize, budget: u64) -> MaxApFree {
    if n == 0 {
        return MaxApFree { size: 0, witness: vec![], exact: true, nodes: 0 };
    }
    let mut r = vec![0usize; n + 1];
    let mut total_nodes = 0u64;
    let mut last = MaxApFree { size: 0, witness: vec![], exact: true, nodes: 0 };
    for k in 1..=n {
        let mut s = IntervalSearch {
            n: k,
            r: r[..k].to_vec(),
            best: Vec::new(),
            nodes: 0,
            budget: budget.saturating_sub(total_nodes),
            exhausted: false,
        };
        let mut chosen = vec![1usize];
        let mut forbidden = vec![0u32; k + 1];
        s.best = chosen.clone();
        s.go(2, &mut chosen, &mut forbidden);
        total_nodes += s.nodes;
        r[k] = s.best.len();
        last = MaxApFree {
            size: s.best.len(),
            witness: s.best.iter().map(|&v| v as i64).collect(),
            exact: !s.exhausted,
            nodes: total_nodes,
        };
        if s.exhausted {
            // Later lengths would rest on an uncertified bound.
            let mut w = last.witness.clone();
            w.retain(|&v| v as usize <= n);
            last.witness = w;
            last.exact = false;
            return last;
        }
    }
    last
}

/// Independent strategy: every subset of [1, N] as a bitmask, largest first.
pub fn max_apfree_bruteforce(n: usize) -> Result<MaxApFree> {
    if n > 24 {
        return invalid("bitmask search is limited to N ≤ 24");
    }
    let mut best: u32 = 0;
    let mut best_size = 0u32;
    let full: u64 = 1u64 << n;
    for m in 0..full {
        let m = m as u32;
        let sz = m.count_ones();
        if sz <= best_size {
            continue;
        }
        if bitmask_ap_free(m, n) {
            best = m;
            best_size = sz;
        }
    }
    let witness: Vec<i64> = (0..n).filter(|i| best >> i & 1 == 1).map(|i| i as i64 + 1).collect();
    Ok(MaxApFree { size: witness.len(), witness, exact: true, nodes: full })
}

fn bitmask_ap_free(m: u32, n: usize) -> bool {
    for d in 1..n {
        // a, a+d, a+2d all set
        let t = m & (m >> d) & (m >> (2 * d).min(31));
        if 2 * d < n && t != 0 {
            return false;
        }
    }
    true
}

struct GroupSearch<'a> {
    g: &'a GroupSpec,
    n: usize,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    /// halves[x] = all w with 2w = x.
    halves: Vec<Vec<usize>>,
}

impl GroupSearch<'_> {
    /// Undecided elements (index > x) that would close a 3-AP once x joins `chosen`.
    /// With an order-2 element d, {y, y+d} is itself the progression (y, y+d, y).
    fn completions(&self, x: usize, chosen: &[usize]) -> Vec<usize> {
        let g = self.g;
        let mut out: Vec<usize> = self.halves[g.add(x, x)].iter().copied().filter(|&z| z > x).collect();
        for &y in chosen {
            let mut comp = vec![g.sub(g.add(x, x), y), g.sub(g.add(y, y), x)];
            comp.extend(self.halves[g.add(x, y)].iter().copied());
            out.extend(comp.into_iter().filter(|&z| z > x && z != y));
        }
        out
    }

    fn go(&mut self, next: usize, chosen: &mut Vec<usize>, forbidden: &mut Vec<u32>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        for x in next..self.n {
            if forbidden[x] != 0 {
                continue;
            }
            let avail = (x..self.n).filter(|&v| forbidden[v] == 0).count();
            if chosen.len() + avail <= self.best.len() {
                return;
            }
            let marked = self.completions(x, chosen);
            for &z in &marked {
                forbidden[z] += 1;
            }
            chosen.push(x);
            self.go(x + 1, chosen, forbidden);
            chosen.pop();
            for z in marked {
                forbidden[z] -= 1;
            }
            if self.exhausted {
                return;
            }
        }
    }
}

/// `max_apfree` on a group, with 0 fixed in the set by translation invariance.
pub fn max_apfree_group(g: &GroupSpec, budget: u64) -> MaxApFree {
    let n = g.size();
    let mut halves = vec![Vec::new(); n];
    for w in g.elements() {
        halves[g.add(w, w)].push(w);
    }
    let mut s = GroupSearch { g, n, best: vec![0], nodes: 0, budget, exhausted: false, halves };
    let mut forbidden = vec![0u32; n];
    for z in s.completions(0, &[]) {
        forbidden[z] += 1;
    }
    let mut chosen = vec![0usize];
    s.go(1, &mut chosen, &mut forbidden);
    let mut best = s.best.clone();
    best.sort_unstable();
    debug_assert!(is_ap_free(g, &best));
    MaxApFree {
        size: best.len(),
        witness: best.iter().map(|&v| v as i64).collect(),
        exact: !s.exhausted,
        nodes: s.nodes,
    }
}

// -------------------------------------------------------------------------
// increment oracle
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Family<'a> {
    /// Every subspace of 𝔽_q^n with codimension exactly each of the listed levels.
    Subspaces {
        max_codim: usize,
    },
    Bohr(&'a [BohrSet]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleHit {
    /// Position of the host in the family enumeration.
    pub host_index: usize,
    pub subspace: Option<Subspace>,
    pub bohr: Option<crate::bohr::BohrDescriptor>,
    pub codim: Option<usize>,
    /// x with (A + x) ∩ V as dense as possible.
    pub translate: usize,
    pub count: usize,
    pub host_size: usize,
    pub density: f64,
}

/// Best translate of A into a subspace: max over cosets of |A ∩ (V − x)|.
pub fn best_translate_subspace(g: &GroupSpec, a: &[usize], v: &Subspace) -> (usize, usize) {
    let ann = v.annihilator();
    let q = v.q;
    let key = |x: usize| -> usize {
        let r = g.residues(x);
        ann.basis.iter().fold(0usize, |k, e| {
            let dot = e.iter().zip(&r).map(|(a, b)| a * b).sum::<usize>() % q;
            k * q + dot
        })
    };
    let mut counts = std::collections::HashMap::new();
    for &x in a {
        *counts.entry(key(x)).or_insert(0usize) += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    // smallest translate x whose coset −x attains the maximum
    for x in g.elements() {
        if counts.get(&key(g.neg(x))).copied().unwrap_or(0) == best {
            return (x, best);
        }
    }
    (0, best)
}

/// Best translate of A into a Bohr set: max_x |(A + x) ∩ B|.
pub fn best_translate_bohr(g: &GroupSpec, a: &[usize], b: &BohrSet) -> (usize, usize) {
    let mut counts = vec![0usize; g.size()];
    for &y in b.members() {
        for &x in a {
            counts[g.sub(y, x)] += 1;
        }
    }
    let mut best = 0;
    for x in g.elements() {
        if counts[x] > counts[best] {
            best = x;
        }
    }
    (best, counts[best])
}

/// `increment_oracle`: the exact maximizer of the relative density of
/// (A + x) ∩ V in V over the family and all translates. Ties go to the
/// earlier host, then the smaller translate.
pub fn increment_oracle(g: &GroupSpec, a: &[usize], family: &Family, cap: usize) -> Result<OracleHit> {
    check_set(g, a)?;
    if a.is_empty() {
        return invalid("increment oracle needs a non-empty set");
    }
    let mut best: Option<OracleHit> = None;
    let mut consider = |hit: OracleHit| {
        if best.as_ref().map_or(true, |b| hit.density > b.density) {
            best = Some(hit);
        }
    };
    match family {
        Family::Subspaces { max_codim } => {
            let q =
                g.prime_power_base().ok_or_else(|| ApcError::InvalidArgument("subspace family needs 𝔽_q^n".into()))?;
            let subs = subspaces_up_to_codim(q, g.rank(), *max_codim, cap)?;
            for (i, v) in subs.into_iter().enumerate() {
                let (x, c) = best_translate_subspace(g, a, &v);
                let size = v.size();
                consider(OracleHit {
                    host_index: i,
                    codim: Some(v.codim()),
                    subspace: Some(v),
                    bohr: None,
                    translate: x,
                    count: c,
                    host_size: size,
                    density: c as f64 / size as f64,
                });
            }
        }
        Family::Bohr(list) => {
            if list.len() > cap {
                return Err(ApcError::ResourceLimit(format!("{} Bohr sets exceed the cap {cap}", list.len())));
            }
            for (i, b) in list.iter().enumerate() {
                if b.group() != g {
                    return invalid("Bohr set lives on a different group");
                }
                let (x, c) = best_translate_bohr(g, a, b);
                consider(OracleHit {
                    host_index: i,
                    subspace: None,
                    bohr: Some(b.descriptor()),
                    codim: None,
                    translate: x,
                    count: c,
                    host_size: b.size(),
                    density: c as f64 / b.size() as f64,
                });
            }
        }
    }
    best.ok_or_else(|| ApcError::InvalidArgument("empty family".into()))
}

// -------------------------------------------------------------------------
// Behrend-type construction
// -------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehrendSet {
    pub elements: Vec<i64>,
    /// Digits lie in [0, m) in base 2m − 1.
    pub m: usize,
    pub dims: usize,
    /// Squared radius of the chosen sphere; None when every layer is kept (m = 2).
    pub layer: Option<usize>,
}

/// `behrend_lower`: the largest sphere layer of digit vectors over a small
/// grid of (m, dims), shifted into [1, N] and verified progression-free.
pub fn behrend_lower(n: usize) -> Result<BehrendSet> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    let limit = (n - 1) as u128;
    let mut best = BehrendSet { elements: vec![1], m: 1, dims: 1, layer: None };
    const ENUM_CAP: u128 = 1 << 20;
    const M_MAX: usize = 64;
    for m in 2..=M_MAX {
        let base = (2 * m - 1) as u128;
        if base > limit + 1 {
            break;
        }
        let mut dims = 1usize;
        while base.pow(dims as u32 - 1) <= limit && (m as u128).pow(dims as u32) <= ENUM_CAP {
            let cand = behrend_layers(m, dims, limit);
            if cand.elements.len() > best.elements.len() {
                best = cand;
            }
            dims += 1;
        }
    }
    if !is_ap_free_interval(&best.elements) {
        return Err(ApcError::Internal("Behrend construction produced a 3-AP".into()));
    }
    Ok(best)
}

fn behrend_layers(m: usize, dims: usize, limit: u128) -> BehrendSet {
    let base = (2 * m - 1) as u128;
    let layer_of = |r: usize| if m == 2 { 0 } else { r };
    let mut counts = vec![0usize; dims * (m - 1) * (m - 1) + 1];
    let mut place = vec![1u128; dims];
    for i in 1..dims {
        place[i] = place[i - 1] * base;
    }
    // digits from the most significant place, pruning prefixes already above the limit
    fn walk(i: usize, v: u128, r: usize, m: usize, limit: u128, place: &[u128], visit: &mut dyn FnMut(u128, usize)) {
        if v > limit {
            return;
        }
        if i == 0 {
            visit(v, r);
            return;
        }
        for d in 0..m {
            let w = v + d as u128 * place[i - 1];
            if w > limit {
                break;
            }
            walk(i - 1, w, r + d * d, m, limit, place, visit);
        }
    }
    walk(dims, 0, 0, m, limit, &place, &mut |_, r| counts[layer_of(r)] += 1);
    // largest layer, smallest radius on ties
    let best = (0..counts.len()).fold(0, |b, r| if counts[r] > counts[b] { r } else { b });
    let mut els = Vec::with_capacity(counts[best]);
    walk(dims, 0, 0, m, limit, &place, &mut |v, r| {
        if layer_of(r) == best {
            els.push(v as i64 + 1);
        }
    });
    els.sort_unstable();
    BehrendSet { elements: els, m, dims, layer: (m != 2).then_some(best) }
}

/// Greedy progression-free set in [1, N], the comparison baseline.
pub fn greedy_apfree(n: usize) -> Vec<i64> {
    let mut chosen: Vec<i64> = Vec::new();
    let mut blocked = vec![false; n + 1];
    for x in 1..=n {
        if blocked[x] {
            continue;
        }
        for &y in &chosen {
            let z = 2 * x as i64 - y;
            if z as usize <= n {
                blocked[z as usize] = true;
            }
        }
        chosen.push(x as i64);
    }
    chosen
}

// -------------------------------------------------------------------------
// bound curves
// -------------------------------------------------------------------------

/// `bound_curves`: (exp(−c(ln N)^{1/6}(ln ln N)^{−1/6})N, exp(−c(ln N)^{1/5})N).
pub fn bound_curves(n: f64, c: f64) -> Result<(f64, f64)> {
    if !(n >= 16.0) || !n.is_finite() {
        return invalid("N must be at least 16");
    }
    if !(c >= 0.0) || !c.is_finite() {
        return invalid("c must be a finite non-negative number");
    }
    let l = n.ln();
    let main = (-c * l.powf(1.0 / 6.0) * l.ln().powf(-1.0 / 6.0)).exp() * n;
    let ff = (-c * l.powf(0.2)).exp() * n;
    Ok((main, ff))
}

/// exp(−c·sqrt(ln N))·N, the Behrend-shape reference curve.
pub fn behrend_curve(n: f64, c: f64) -> f64 {
    (-c * n.ln().sqrt()).exp() * n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_on_z5_and_z7() {
        let g = GroupSpec::cyclic(5).unwrap();
        let all: Vec<usize> = g.elements().collect();
        assert_eq!(count_3aps(&g, &all).unwrap().total, 25);
        assert_eq!(count_3aps(&g, &[0]).unwrap().total, 1);
        let g7 = GroupSpec::cyclic(7).unwrap();
        let c = count_3aps(&g7, &[0, 1, 3]).unwrap();
        assert_eq!((c.total, c.trivial, c.nontrivial), (3, 3, 0));
    }

    #[test]
    fn doubled_set_not_negated_set() {
        // {1,2,3} ⊂ ℤ/7: d = ±1 give two nontrivial progressions.
        let g = GroupSpec::cyclic(7).unwrap();
        assert_eq!(count_3aps(&g, &[1, 2, 3]).unwrap().total, 5);
    }

    #[test]
    fn interval_checks() {
        assert!(is_ap_free_interval(&[1, 2, 4, 5]));
        assert!(!is_ap_free_interval(&[1, 2, 3]));
        assert!(is_ap_free_interval(&[7]));
    }

    #[test]
    fn small_maxima() {
        assert_eq!(max_apfree_interval(1, 1 << 20).size, 1);
        assert_eq!(max_apfree_interval(3, 1 << 20).size, 2);
        let r8 = max_apfree_interval(8, 1 << 20);
        assert_eq!(r8.size, 4);
        assert!(r8.exact && is_ap_free_interval(&r8.witness));
        assert_eq!(max_apfree_bruteforce(8).unwrap().size, 4);
    }

    #[test]
    fn cap_set_in_f3_squared() {
        let g = GroupSpec::power(3, 2).unwrap();
        let r = max_apfree_group(&g, 1 << 20);
        assert!(r.exact);
        assert_eq!(r.size, 4);
        // ℤ/4: {0, 2} is the progression (0, 2, 0).
        let z4 = GroupSpec::cyclic(4).unwrap();
        let r = max_apfree_group(&z4, 1 << 20);
        assert!(is_ap_free(&z4, &r.witness.iter().map(|&v| v as usize).collect::<Vec<_>>()));
        assert_eq!(r.size, 2);
    }

    #[test]
    fn oracle_on_hyperplane_coset() {
        let g = GroupSpec::power(3, 2).unwrap();
        // the coset {(1, y)} of the hyperplane x = 0
        let a: Vec<usize> = (0..3).map(|y| g.index_of(&[1, y]).unwrap()).collect();
        let hit = increment_oracle(&g, &a, &Family::Subspaces { max_codim: 1 }, 1000).unwrap();
        assert_eq!(hit.density, 1.0);
        assert_eq!(hit.codim, Some(1));
        let all: Vec<usize> = g.elements().collect();
        assert_eq!(increment_oracle(&g, &all, &Family::Subspaces { max_codim: 2 }, 1000).unwrap().density, 1.0);
    }

    #[test]
    fn behrend_small() {
        assert_eq!(behrend_lower(1).unwrap().elements, vec![1]);
        let b = behrend_lower(10).unwrap();
        assert!(is_ap_free_interval(&b.elements) && b.elements.iter().all(|&x| (1..=10).contains(&x)));
        let b = behrend_lower(1000).unwrap();
        let greedy = greedy_apfree(1000);
        assert!(2 * b.elements.len() >= greedy.len());
    }

    #[test]
    fn curves() {
        assert_eq!(bound_curves(1e6, 0.0).unwrap(), (1e6, 1e6));
        assert!(bound_curves(10.0, 1.0).is_err());
        let n = 64f64.exp();
        let (main, _) = bound_curves(n, 1.0).unwrap();
        let expect = n * (-(64f64.powf(1.0 / 6.0)) * 64f64.ln().powf(-1.0 / 6.0)).exp();
        assert!((main - expect).abs() <= 1e-9 * expect);
    }
}
