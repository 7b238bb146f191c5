mod common;

use apcore::bohr::BohrSet;
use apcore::extremal::{count_3aps, increment_oracle, Family};
use apcore::group::{dilate_set, embed_interval, translate_set};
use apcore::harmonic::{diff_convolution, lp_norm_pow, GroupFn, ProbMeasure};
use apcore::increment::{drive, step_budget, Mode, PipelineConfig, Status};
use apcore::periodicity::{almost_periods, cs_smoothing_bound};
use apcore::sifting::{ff_iterated_sift, sift_identity, SiftConfig};
use apcore::{ApcError, GroupSpec};
use common::*;
use proptest::prelude::*;

fn group() -> impl Strategy<Value = GroupSpec> {
    prop::collection::vec(2i64..=7, 1..=3)
        .prop_filter("order ≤ 128", |f| f.iter().product::<i64>() <= 128)
        .prop_map(|f| GroupSpec::new(&f).unwrap())
}

/// A group with a non-empty subset given by a bit mask over its elements.
fn group_and_set() -> impl Strategy<Value = (GroupSpec, Vec<usize>)> {
    group().prop_flat_map(|g| {
        let n = g.size();
        (Just(g), prop::collection::vec(any::<bool>(), n)).prop_map(|(g, m)| {
            let mut a: Vec<usize> = (0..m.len()).filter(|&i| m[i]).collect();
            if a.is_empty() {
                a.push(0);
            }
            (g, a)
        })
    })
}

fn ff_set(n: usize) -> impl Strategy<Value = Vec<usize>> {
    let size = 3usize.pow(n as u32);
    prop::collection::btree_set(0..size, 1..size).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_is_a_bijection_and_characters_are_homomorphisms(g in group(), x in 0usize..1000, y in 0usize..1000, c in 0usize..1000) {
        let n = g.size();
        let (x, y, c) = (x % n, y % n, c % n);
        prop_assert_eq!(g.index_of_unsigned(&g.residues(x)), x);
        let lhs = g.char_value(c, g.add(x, y));
        let rhs = g.char_value(c, x) * g.char_value(c, y);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((g.char_value(c, g.neg(x)) - g.char_value(c, x).conj()).norm() < 1e-12);
    }

    #[test]
    fn counts_split_into_trivial_and_nontrivial((g, a) in group_and_set(), t in 0usize..1000) {
        let c = count_3aps(&g, &a).unwrap();
        prop_assert_eq!(c.trivial, a.len() as u64);
        prop_assert_eq!(c.total, c.trivial + c.nontrivial);
        let shifted = count_3aps(&g, &translate_set(&g, &a, t % g.size())).unwrap();
        prop_assert_eq!(shifted.total, c.total);
        if g.is_unit(-1) {
            prop_assert_eq!(count_3aps(&g, &dilate_set(&g, &a, -1)).unwrap().total, c.total);
        }
    }

    #[test]
    fn interval_embedding_adds_no_progressions(n in 1i64..40, mask in any::<u64>()) {
        let a: Vec<i64> = (1..=n).filter(|i| mask >> (i % 64) & 1 == 1).collect();
        prop_assume!(!a.is_empty());
        let (g, e) = embed_interval(&a, n).unwrap();
        let mut interval = 0u64;
        for &x in &a {
            for &z in &a {
                if x != z && (x + z) % 2 == 0 && a.contains(&((x + z) / 2)) {
                    interval += 1;
                }
            }
        }
        prop_assert_eq!(count_3aps(&g, &e).unwrap().nontrivial, interval);
    }

    #[test]
    fn difference_convolution_peaks_at_zero((g, a) in group_and_set()) {
        let aa = diff_convolution(&g, &a, &a).unwrap();
        let inv_alpha = g.size() as f64 / a.len() as f64;
        prop_assert!(close(aa.get(0), inv_alpha, 1e-12));
        prop_assert!(close(aa.sup_abs(), inv_alpha, 1e-12));
    }

    #[test]
    fn sift_probabilities_sum_to_one((g, a) in group_and_set(), p in 1usize..=2, m1 in any::<u64>(), m2 in any::<u64>()) {
        prop_assume!(g.size() <= 24);
        let pick = |m: u64| -> Vec<usize> {
            let s: Vec<usize> = (0..g.size()).filter(|i| m >> (i % 64) & 1 == 1).collect();
            if s.is_empty() { vec![0] } else { s }
        };
        let (c1, c2) = (pick(m1), pick(m2));
        let one = GroupFn::from_fn(&g, |_| 1.0);
        let (lhs, rhs) = sift_identity(&g, &a, &c1, &c2, p, &one, 1 << 20).unwrap();
        let aa = diff_convolution(&g, &a, &a).unwrap();
        let mu = ProbMeasure::new(diff_convolution(&g, &c1, &c2).unwrap()).unwrap();
        let norm = lp_norm_pow(&aa, p as u32, Some(&mu)).unwrap();
        prop_assert!(close(lhs, norm, 1e-9) && close(rhs, norm, 1e-9));
    }

    #[test]
    fn regularity_flag_matches_breakpoints(n in 5usize..400, f1 in 1usize..400, f2 in 1usize..400, rank in 1usize..=2, r in 0.05f64..2.0) {
        let g = GroupSpec::cyclic(n).unwrap();
        let ag = Ag::new(&g);
        let freqs: Vec<usize> = [f1 % n, f2 % n][..rank].to_vec();
        let b = BohrSet::new(&g, &freqs, r).unwrap();
        prop_assert_eq!(b.is_regular(), is_regular(&ag, &freqs, r));
        if b.is_regular() {
            // a dense grid of dilations must respect the regularity window
            let d = 100.0 * rank as f64;
            let size = b.size() as f64;
            for i in -200i32..=200 {
                let kappa = i as f64 / (200.0 * d);
                let s = bohr_members(&ag, &freqs, r * (1.0 + kappa)).len() as f64;
                prop_assert!(s <= (1.0 + d * kappa.abs()) * size + 1e-9 && s >= (1.0 - d * kappa.abs()) * size - 1e-9);
            }
        }
    }

    #[test]
    fn almost_periods_contain_zero_and_smoothing_obeys_the_bound((g, a) in group_and_set(), k in 1usize..=4, eps in 0.05f64..0.5, seed in any::<u64>()) {
        prop_assume!(g.size() <= 64);
        let mut rng = apcore::rng::seeded(seed);
        let n = g.size();
        let (a1, a2, s) = (subset(&mut rng, n, 0.5), subset(&mut rng, n, 0.5), subset(&mut rng, n, 0.5));
        let all: Vec<usize> = g.elements().collect();
        let x = almost_periods(&g, &a1, &a2, &s, &all, k, eps).unwrap();
        prop_assert!(x.contains(&0));
        let cs = cs_smoothing_bound(&g, &a, &a1, &a2, &x, k, None).unwrap();
        prop_assert!(cs.lhs <= cs.rhs * (1.0 + 1e-9) + 1e-12);
        prop_assert!(cs.fourier_l1 <= cs.cs_product * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn iterated_sift_chain_doubles_and_is_short(a in ff_set(3)) {
        let g = GroupSpec::power(3, 3).unwrap();
        match ff_iterated_sift(&g, &a, 2, &SiftConfig::default()) {
            Ok(it) => {
                let alpha = a.len() as f64 / 27.0;
                for w in it.chain.windows(2) {
                    prop_assert!(w[1].self_corr >= 2.0 * w[0].self_corr * (1.0 - 1e-12));
                    prop_assert!(w[1].size <= w[0].size);
                }
                prop_assert!(it.chain.len() <= (1.0 / alpha).log2().ceil() as usize + SiftConfig::default().chain_slack + 1);
                prop_assert!(it.sigma <= 1.0 / alpha * (1.0 + 1e-12));
            }
            Err(ApcError::Precondition(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn drive_respects_the_step_budget(a in ff_set(3)) {
        let g = GroupSpec::power(3, 3).unwrap();
        let t = drive(Mode::Ff, &g, &a, &PipelineConfig::default()).unwrap();
        let alpha = a.len() as f64 / 27.0;
        prop_assert_eq!(t.status, Status::Complete);
        prop_assert!(t.steps.len() <= step_budget(alpha));
        prop_assert!(t.sigma_product <= 1.0 / alpha * (1.0 + 1e-9));
    }

    #[test]
    fn oracle_density_grows_with_codimension(a in ff_set(2)) {
        let g = GroupSpec::power(3, 2).unwrap();
        let alpha = a.len() as f64 / 9.0;
        let mut last = 0.0;
        for m in 0..=2 {
            let hit = increment_oracle(&g, &a, &Family::Subspaces { max_codim: m }, 1 << 16).unwrap();
            prop_assert!(hit.density >= alpha - 1e-12 && hit.density >= last - 1e-12);
            last = hit.density;
        }
        prop_assert!(close(last, 1.0, 1e-12));
    }
}
