use ldlab::divergences::{
    binary_objective, binary_reverse_minimizer, j_divergence, j_minimizer_slices, kl, kl_slices, kl_variational_lb,
    pinsker_check, symmetric_kl,
};
use ldlab::ldp_lab::{exact_ball_probability_binary, joint_rate};
use ldlab::measures::{partition_distance, project, tv_distance, DiscreteMeasure, Partition, SimplexVector};
use ldlab::projections::{big_f, big_f_inv, forward_tilt, j_projection, reverse_projection};
use ldlab::random_measures::{sample_dp, sample_empirical, sample_wn, RngStream};
use proptest::prelude::*;

fn weights(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![4 => 0.01f64..1.0, 1 => Just(0.0)], m)
        .prop_filter("positive total", |v| v.iter().sum::<f64>() > 0.0)
}

fn simplex_pair() -> impl Strategy<Value = (SimplexVector, SimplexVector)> {
    (2usize..7)
        .prop_flat_map(|m| (weights(m), weights(m)))
        .prop_map(|(a, b)| (SimplexVector::from_weights(a).unwrap(), SimplexVector::from_weights(b).unwrap()))
}

fn positive_simplex(m: usize) -> impl Strategy<Value = SimplexVector> {
    prop::collection::vec(0.01f64..1.0, m).prop_map(|v| SimplexVector::from_weights(v).unwrap())
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((0.0f64..=1.0, 0.01f64..1.0), 1..12).prop_map(|pairs| {
        let (x, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        DiscreteMeasure::from_atoms(&x, &w).unwrap()
    })
}

proptest! {
    #[test]
    fn kl_nonnegative_and_zero_on_diagonal((a, b) in simplex_pair()) {
        prop_assert!(kl(&a, &b).unwrap() >= 0.0);
        prop_assert_eq!(kl(&a, &a).unwrap(), 0.0);
        let s = symmetric_kl(&a, &b).unwrap();
        prop_assert!(s >= kl(&a, &b).unwrap() || s.is_infinite());
    }

    #[test]
    fn j_symmetric_and_below_both_entropies((a, b) in simplex_pair()) {
        let j = j_divergence(&a, &b).unwrap();
        prop_assert!(j >= 0.0);
        prop_assert!((j - j_divergence(&b, &a).unwrap()).abs() <= 1e-12 || j.is_infinite());
        prop_assert!(j <= kl(&a, &b).unwrap() + 1e-12);
        prop_assert!(j <= kl(&b, &a).unwrap() + 1e-12);
        prop_assert!(j_divergence(&a, &a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn j_attained_by_geometric_mean((a, b) in simplex_pair()) {
        let j = j_divergence(&a, &b).unwrap();
        match j_minimizer_slices(a.coords(), b.coords()) {
            Some(v) => {
                let val = kl_slices(&v, a.coords()) + kl_slices(&v, b.coords());
                prop_assert!((val - j).abs() < 1e-10, "{} vs {}", val, j);
                let o = SimplexVector::from_weights(v).unwrap();
                prop_assert!((joint_rate(&o, &a, &b).unwrap() - j).abs() < 1e-10);
            }
            None => prop_assert!(j.is_infinite()),
        }
    }

    #[test]
    fn pinsker_type_bound((a, b) in simplex_pair()) {
        let c = pinsker_check(&a, &b).unwrap();
        prop_assert!(c.slack >= -1e-9);
        prop_assert!((c.tv - tv_distance(&a, &b).unwrap()).abs() < 1e-15);
        prop_assert!((c.tv - partition_distance(&a, &b).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn variational_bound_below_kl(a in positive_simplex(4), b in positive_simplex(4),
                                  fs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 4), 1..5)) {
        let lb = kl_variational_lb(&a, &b, &fs).unwrap();
        prop_assert!(lb <= kl(&a, &b).unwrap() + 1e-12);
        // log(a/b) attains the bound.
        let opt: Vec<f64> = a.coords().iter().zip(b.coords()).map(|(x, y)| (x / y).ln()).collect();
        let best = kl_variational_lb(&a, &b, &[opt]).unwrap();
        prop_assert!((best - kl(&a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn binary_minimizer_beats_every_p(q in 0.0f64..=1.0, r in 0.0f64..=1.0, p in 0.0f64..=1.0) {
        let m = binary_reverse_minimizer(q, r).unwrap();
        prop_assert!(m.value <= binary_objective(p, q, r) + 1e-12);
        if m.value.is_finite() {
            prop_assert!((binary_objective(m.p_hat, q, r) - m.value).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_contracts_divergences(a in measure(), b in measure(), cuts in prop::collection::btree_set(1u32..99, 1..4)) {
        let part = Partition::new(cuts.iter().map(|&c| c as f64 / 100.0).collect()).unwrap();
        let (pa, pb) = (project(&a, &part), project(&b, &part));
        prop_assert!((pa.coords().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(kl(&pa, &pb).unwrap() <= kl(&a, &b).unwrap() + 1e-12);
        prop_assert!(j_divergence(&pa, &pb).unwrap() <= j_divergence(&a, &b).unwrap() + 1e-12);
        prop_assert!(tv_distance(&pa, &pb).unwrap() <= tv_distance(&a, &b).unwrap() + 1e-12);
    }

    #[test]
    fn merging_fine_cells_matches_coarse_projection(a in measure(), coarse in prop::collection::btree_set(1u32..20, 1..3),
                                                    extra in prop::collection::btree_set(1u32..20, 0..3)) {
        let c: Vec<f64> = coarse.iter().map(|&t| t as f64 / 20.0).collect();
        let f: Vec<f64> = coarse.union(&extra).map(|&t| t as f64 / 20.0).collect();
        let (cp, fp) = (Partition::new(c).unwrap(), Partition::new(f).unwrap());
        let merged = project(&a, &fp).merge_cells(&fp, &cp).unwrap();
        let direct = project(&a, &cp);
        for (x, y) in merged.coords().iter().zip(direct.coords()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn f_round_trip(lam in -40.0f64..40.0) {
        let u = big_f(lam);
        prop_assert!(u > 0.0 && u < 1.0);
        prop_assert!((big_f_inv(u).unwrap() - lam).abs() < 1e-9);
        prop_assert!(big_f(lam + 0.01) > u);
    }

    #[test]
    fn projections_hit_the_mean(base in measure(), t in 0.05f64..0.95) {
        let (lo, hi) = base.positive_hull();
        prop_assume!(hi - lo > 1e-3);
        let u = lo + t * (hi - lo);
        let f = forward_tilt(&base, u).unwrap();
        let r = reverse_projection(&base, u).unwrap();
        let j = j_projection(&base, u).unwrap();
        for m in [&f.minimizer, &r.minimizer, &j.minimizer] {
            prop_assert!((m.mean() - u).abs() < 1e-8);
        }
        prop_assert!(j.value <= f.value + 1e-10);
        prop_assert!(j.value <= r.value + 1e-10);
    }

    #[test]
    fn samplers_normalized_and_reproducible(seed in any::<u64>(), n in 1usize..40, theta in 0.1f64..20.0) {
        let base = DiscreteMeasure::uniform_grid(32).unwrap();
        let s = RngStream::new(seed, 1);
        let e = sample_empirical(&base, n, &mut s.generator()).unwrap();
        let w = sample_wn(&base, n, &mut s.generator()).unwrap();
        let d = sample_dp(&base, theta, None, &mut s.generator()).unwrap();
        for x in [&e, &w, &d] {
            prop_assert!((x.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(w, sample_wn(&base, n, &mut s.generator()).unwrap());
        prop_assert_eq!(d, sample_dp(&base, theta, None, &mut s.generator()).unwrap());
    }

    #[test]
    fn exact_ball_is_a_probability(p in 0.01f64..0.99, q in 0.0f64..=1.0, d1 in 0.01f64..1.0, d2 in 0.01f64..1.0, n in 1usize..80) {
        let (small, large) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = exact_ball_probability_binary(p, q, small, n).unwrap();
        let b = exact_ball_probability_binary(p, q, large, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }
}
