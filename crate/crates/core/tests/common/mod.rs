//! Brute-force oracles shared by the integration tests. Everything here
//! works from residue vectors and the textbook definitions, without the
//! library's transforms, convolutions or counting routines.

#![allow(dead_code)]

use std::f64::consts::PI;

use apcore::GroupSpec;
use num_complex::Complex64;
use rand::Rng;

/// Explicit group tables: residues of every element and an addition table.
pub struct Ag {
    pub n: usize,
    pub factors: Vec<usize>,
    pub res: Vec<Vec<usize>>,
    lcm: usize,
    add: Vec<u32>,
    neg: Vec<usize>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Ag {
    /// Tables for |G| ≤ 4096; cyclic groups of any size use modular arithmetic.
    pub fn new(g: &GroupSpec) -> Self {
        let n = g.size();
        let factors = g.factors().to_vec();
        let res: Vec<Vec<usize>> = (0..n).map(|i| g.residues(i)).collect();
        for (i, r) in res.iter().enumerate() {
            assert_eq!(g.index_of_unsigned(r), i, "canonical indexing is not a bijection");
        }
        let lcm = factors.iter().fold(1, |l, &f| l / gcd(l, f) * f);
        let cyclic = factors.len() == 1;
        assert!(cyclic || n <= 4096, "oracle tables are limited to 4096 elements");
        let add = if cyclic {
            Vec::new()
        } else {
            let mut t = vec![0u32; n * n];
            for x in 0..n {
                for y in 0..n {
                    let s: Vec<usize> =
                        res[x].iter().zip(&res[y]).zip(&factors).map(|((a, b), f)| (a + b) % f).collect();
                    t[x * n + y] = g.index_of_unsigned(&s) as u32;
                }
            }
            t
        };
        let mut ag = Ag { n, factors, res, lcm, add, neg: Vec::new() };
        ag.neg = if cyclic {
            (0..n).map(|x| (n - x) % n).collect()
        } else {
            (0..n).map(|x| (0..n).find(|&y| ag.add(x, y) == 0).unwrap()).collect()
        };
        ag
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        if self.add.is_empty() {
            (x + y) % self.n
        } else {
            self.add[x * self.n + y] as usize
        }
    }

    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    /// Phase k with γ(x) = e(k / lcm).
    pub fn phase(&self, chi: usize, x: usize) -> usize {
        let mut k = 0usize;
        for ((a, b), f) in self.res[chi].iter().zip(&self.res[x]).zip(&self.factors) {
            k = (k + a * b % f * (self.lcm / f)) % self.lcm;
        }
        k
    }

    pub fn chi(&self, chi: usize, x: usize) -> Complex64 {
        let t = 2.0 * PI * self.phase(chi, x) as f64 / self.lcm as f64;
        Complex64::new(t.cos(), t.sin())
    }

    /// |1 − γ(x)| = 2 sin(π k / L) on the folded phase.
    pub fn chord(&self, chi: usize, x: usize) -> f64 {
        let k = self.phase(chi, x);
        let f = k.min(self.lcm - k);
        2.0 * (PI * f as f64 / self.lcm as f64).sin()
    }

    pub fn dft(&self, f: &[f64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|c| (0..self.n).map(|x| self.chi(c, x).conj() * f[x]).sum::<Complex64>() / self.n as f64)
            .collect()
    }

    pub fn idft(&self, fh: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|x| (0..self.n).map(|c| fh[c] * self.chi(c, x)).sum()).collect()
    }

    /// (f∗h)(x) = 𝔼_y f(y)h(x−y).
    pub fn star(&self, f: &[f64], h: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for y in 0..self.n {
            if f[y] == 0.0 {
                continue;
            }
            for z in 0..self.n {
                out[self.add(y, z)] += f[y] * h[z];
            }
        }
        out.iter().map(|v| v / self.n as f64).collect()
    }

    /// (f∘h)(x) = 𝔼_y f(y)h(x+y).
    pub fn circ(&self, f: &[f64], h: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for y in 0..self.n {
            if f[y] == 0.0 {
                continue;
            }
            for z in 0..self.n {
                out[self.sub(z, y)] += f[y] * h[z];
            }
        }
        out.iter().map(|v| v / self.n as f64).collect()
    }

    pub fn ip(&self, f: &[f64], h: &[f64]) -> f64 {
        f.iter().zip(h).map(|(a, b)| a * b).sum::<f64>() / self.n as f64
    }

    pub fn mu(&self, a: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        for &x in a {
            v[x] = self.n as f64 / a.len() as f64;
        }
        v
    }

    pub fn ind(&self, a: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        for &x in a {
            v[x] = 1.0;
        }
        v
    }

    /// μ_A∘μ_B by pair counting.
    pub fn diff(&self, a: &[usize], b: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        let w = self.n as f64 / (a.len() as f64 * b.len() as f64);
        for &x in a {
            for &y in b {
                v[self.sub(y, x)] += w;
            }
        }
        v
    }

    /// Pairs (a, d) with a, a+d, a+2d ∈ A.
    pub fn ap_count(&self, a: &[usize]) -> u64 {
        let m = self.ind(a);
        let mut c = 0;
        for &x in a {
            for d in 0..self.n {
                let y = self.add(x, d);
                if m[y] == 1.0 && m[self.add(y, d)] == 1.0 {
                    c += 1;
                }
            }
        }
        c
    }

    pub fn translate(&self, a: &[usize], t: usize) -> Vec<usize> {
        let mut v: Vec<usize> = a.iter().map(|&x| self.add(x, t)).collect();
        v.sort_unstable();
        v
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn cclose(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Each element kept with probability `density`; never empty.
pub fn subset<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<usize> {
    let mut a: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
    if a.is_empty() {
        a.push(rng.gen_range(0..n));
    }
    a
}

pub fn random_reals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Non-negative weights on `support`, normalized to 𝔼 = 1 over a group of order n.
pub fn random_measure<R: Rng>(rng: &mut R, n: usize, support: &[usize]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for &x in support {
        v[x] = rng.gen_range(0.1..1.0);
    }
    let s: f64 = v.iter().sum();
    v.iter().map(|w| w * n as f64 / s).collect()
}

/// Groups with |G| ≤ cap from random factor lists of rank 1..=max_rank.
pub fn random_group<R: Rng>(rng: &mut R, cap: usize, max_rank: usize) -> GroupSpec {
    loop {
        let rank = rng.gen_range(1..=max_rank);
        let f: Vec<i64> = (0..rank).map(|_| rng.gen_range(2..=cap.min(16) as i64)).collect();
        if f.iter().product::<i64>() as usize <= cap {
            return GroupSpec::new(&f).unwrap();
        }
    }
}

/// Bohr membership from the definition: max_γ |1 − γ(x)| ≤ r.
pub fn bohr_members(ag: &Ag, freqs: &[usize], r: f64) -> Vec<usize> {
    (0..ag.n).filter(|&x| freqs.iter().all(|&c| ag.chord(c, x) <= r)).collect()
}

/// Regularity from the definition, evaluated at every size breakpoint:
/// (1 − 100d|κ|)|B| ≤ |B_{1+κ}| ≤ (1 + 100d|κ|)|B| for |κ| ≤ 1/100d.
pub fn is_regular(ag: &Ag, freqs: &[usize], r: f64) -> bool {
    let d = freqs.len();
    if d == 0 {
        return true;
    }
    let mut norms: Vec<f64> = (0..ag.n).map(|x| freqs.iter().map(|&c| ag.chord(c, x)).fold(0.0, f64::max)).collect();
    norms.sort_by(f64::total_cmp);
    let size_le = |s: f64| norms.partition_point(|&m| m <= s) as f64;
    let size_lt = |s: f64| norms.partition_point(|&m| m < s) as f64;
    let w = 1.0 / (100.0 * d as f64);
    let b = size_le(r);
    let dd = 100.0 * d as f64;
    for &m in &norms {
        if m > r && m <= r * (1.0 + w) {
            // sup of |B_s| over s ∈ [m, next breakpoint) is attained at s = m
            if size_le(m) > (1.0 + dd * (m / r - 1.0)) * b {
                return false;
            }
        }
        if m <= r && m > r * (1.0 - w) {
            // inf of |B_s| over s ∈ (previous breakpoint, m) is the left limit at m
            if size_lt(m) < (1.0 - dd * (1.0 - m / r)) * b {
                return false;
            }
        }
    }
    true
}
