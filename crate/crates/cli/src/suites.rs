//! Randomized self-checks behind `apc verify`.

use apcore::bohr::{size_bound, BohrSet};
use apcore::extremal::count_3aps;
use apcore::harmonic::{convolve, convolve_naive, fourier, inner, inverse, lp_norm_pow, ConvMode, GroupFn};
use apcore::increment::{drive, verify_increment, IncrementCertificate, Mode, PipelineConfig, Status};
use apcore::periodicity::{almost_periods, chang_subspace, verify_smoothing};
use apcore::rng::{random_subset, seeded, ApcRng};
use apcore::sifting::{sift_identity, weighted_sift, SiftConfig};
use apcore::{approx_eq, ApcError, GroupSpec};
use rand::Rng;

pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, e: ApcError) {
        self.checks += 1;
        self.failures.push(e.to_string());
    }
}

pub const SUITES: [&str; 5] = ["harmonic", "bohr", "sifting", "periodicity", "increment"];

fn random_group(rng: &mut ApcRng, cap: usize) -> GroupSpec {
    loop {
        let rank = rng.gen_range(1..=3);
        let f: Vec<i64> = (0..rank).map(|_| rng.gen_range(2..=9)).collect();
        if let Ok(g) = GroupSpec::new(&f) {
            if g.size() <= cap {
                return g;
            }
        }
    }
}

fn random_fn(rng: &mut ApcRng, g: &GroupSpec) -> GroupFn {
    GroupFn::from_fn(g, |_| rng.gen_range(-1.0..1.0))
}

pub fn run(name: &str, seed: u64, cap: usize) -> SuiteReport {
    let mut rng = seeded(seed);
    match name {
        "harmonic" => harmonic(&mut rng, cap),
        "bohr" => bohr(&mut rng, cap),
        "sifting" => sifting(&mut rng, cap),
        "periodicity" => periodicity(&mut rng, cap),
        _ => increment(&mut rng, cap),
    }
}

fn harmonic(rng: &mut ApcRng, cap: usize) -> SuiteReport {
    let mut r = SuiteReport::new("harmonic");
    for _ in 0..40 {
        let g = random_group(rng, cap.max(2));
        let f = random_fn(rng, &g);
        let h = random_fn(rng, &g);
        let k = random_fn(rng, &g);
        match inverse(&fourier(&f)) {
            Ok(back) => r.check(back.values().iter().zip(f.values()).all(|(a, b)| approx_eq(*a, *b)), || {
                format!("round trip on {}", g.descriptor())
            }),
            Err(e) => r.error(e),
        }
        let fh = fourier(&f);
        let l2: f64 = fh.values().iter().map(|v| v.norm_sqr()).sum();
        let direct = lp_norm_pow(&f, 2, None).unwrap();
        r.check(approx_eq(l2, direct), || format!("Parseval on {}", g.descriptor()));
        for mode in [ConvMode::Star, ConvMode::Circ] {
            let fast = convolve(&f, &h, mode).unwrap();
            let slow = convolve_naive(&f, &h, mode).unwrap();
            r.check(fast.values().iter().zip(slow.values()).all(|(a, b)| approx_eq(*a, *b)), || {
                format!("{mode:?} convolution paths disagree on {}", g.descriptor())
            });
        }
        let lhs = inner(&convolve(&f, &h, ConvMode::Star).unwrap(), &k, None).unwrap();
        let rhs = inner(&f, &convolve(&h, &k, ConvMode::Circ).unwrap(), None).unwrap();
        r.check(approx_eq(lhs, rhs), || format!("adjoint identity on {}", g.descriptor()));
    }
    r
}

fn bohr(rng: &mut ApcRng, cap: usize) -> SuiteReport {
    let mut r = SuiteReport::new("bohr");
    for _ in 0..20 {
        let n = rng.gen_range(5..=cap.clamp(5, 2001));
        let g = GroupSpec::cyclic(n).unwrap();
        let rank = rng.gen_range(1..=3);
        let freqs: Vec<usize> = (0..rank).map(|_| rng.gen_range(1..n)).collect();
        let rho = rng.gen_range(0.05..1.5);
        let b = match BohrSet::new(&g, &freqs, rho).and_then(|b| b.regularize()) {
            Ok(b) => b,
            Err(e) => {
                r.error(e);
                continue;
            }
        };
        r.check(b.is_regular(), || format!("regularize on ℤ/{n} is not regular"));
        r.check(b.radius() >= rho / 2.0 && b.radius() <= rho, || "regularized radius left [ρ/2, ρ]".into());
        for f in [0.1, 0.5, 0.9] {
            let (s, lb) = size_bound(&b, f).unwrap();
            r.check(s >= lb * (1.0 - 1e-12), || format!("size bound fails at ρ = {f} on ℤ/{n}"));
        }
        let back = BohrSet::from_descriptor(&b.descriptor()).unwrap();
        r.check(back.members() == b.members(), || "descriptor round trip".into());
    }
    r
}

fn sifting(rng: &mut ApcRng, cap: usize) -> SuiteReport {
    let mut r = SuiteReport::new("sifting");
    let cfg = SiftConfig::default();
    for _ in 0..30 {
        let g = random_group(rng, cap.clamp(2, 12));
        let a = random_subset(rng, &g, 0.5);
        let c1 = random_subset(rng, &g, 0.6);
        let c2 = random_subset(rng, &g, 0.6);
        let f = random_fn(rng, &g);
        let p = rng.gen_range(1..=2);
        match sift_identity(&g, &a, &c1, &c2, p, &f, 10_000_000) {
            Ok((l, rr)) => r.check(approx_eq(l, rr), || format!("sift identity {l} vs {rr}")),
            Err(e) => r.error(e),
        }
        let all: Vec<usize> = g.elements().collect();
        match weighted_sift(&g, &a, &all, &c1, &c2, p, 0.25, &cfg) {
            Ok(w) => r.check(w.low_mass <= w.low_mass_bound + 1e-12, || "weighted sift bound".into()),
            Err(ApcError::Precondition(_)) => {}
            Err(e) => r.error(e),
        }
    }
    r
}

fn periodicity(rng: &mut ApcRng, cap: usize) -> SuiteReport {
    let mut r = SuiteReport::new("periodicity");
    let g = if cap >= 81 { GroupSpec::power(3, 4).unwrap() } else { GroupSpec::power(3, 2).unwrap() };
    let all: Vec<usize> = g.elements().collect();
    for _ in 0..15 {
        let a1 = random_subset(rng, &g, 0.4);
        let a2 = random_subset(rng, &g, 0.4);
        let s = random_subset(rng, &g, 0.5);
        let k = rng.gen_range(1..=4);
        let eps = 0.25;
        let x = match almost_periods(&g, &a1, &a2, &s, &all, k, eps) {
            Ok(x) => x,
            Err(e) => {
                r.error(e);
                continue;
            }
        };
        let v = verify_smoothing(&g, &x, k, &a1, &a2, &s).unwrap();
        r.check(v <= eps * (1.0 + 1e-9), || format!("smoothing {v} > ε"));
        let cs = chang_subspace(&g, &x).unwrap();
        let spec = apcore::periodicity::spectrum(&g, &x, 0.5).unwrap();
        let ok = cs.subspace.members(&g).iter().all(|&t| spec.chars.iter().all(|&c| g.phase(c, t) == 0));
        r.check(ok, || "Chang subspace is not annihilated by the spectrum".into());
    }
    r
}

fn increment(rng: &mut ApcRng, cap: usize) -> SuiteReport {
    let mut r = SuiteReport::new("increment");
    let cfg = PipelineConfig::default();
    let n = if cap >= 27 { 3 } else { 2 };
    let g = GroupSpec::power(3, n).unwrap();
    for _ in 0..20 {
        let density = rng.gen_range(0.1..0.6);
        let a = random_subset(rng, &g, density);
        if let Err(e) = count_3aps(&g, &a) {
            r.error(e);
        }
        let t = match drive(Mode::Ff, &g, &a, &cfg) {
            Ok(t) => t,
            Err(e) => {
                r.error(e);
                continue;
            }
        };
        r.check(t.status == Status::Complete, || format!("drive ended {:?}: {:?}", t.status, t.message));
        r.check(t.sigma_product <= 1.0 / t.alpha * (1.0 + 1e-9), || "Π σ exceeds α^-1".into());
        if let Some(step) = t.steps.first() {
            if let IncrementCertificate::DensityIncrement { .. } = step.report.certificate {
                r.check(verify_increment(&g, &a, &step.report.certificate).is_ok(), || {
                    "first certificate does not recount".into()
                });
            }
        }
    }
    r
}
