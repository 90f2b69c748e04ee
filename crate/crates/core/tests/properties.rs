//! Property tests of exact invariants over random inputs.

use daugavet::analysis::{conv_distance, ConvOrder};
use daugavet::construction::law_of_large_numbers_norm;
use daugavet::measure::text::{parse_step, write_step};
use daugavet::measure::{best_constant, ky_fan, tail_measure, worst_set_integral, StepFunction};
use daugavet::rational::{int, one, q, zero, Rational};
use daugavet::suites::{law_by_convolution, random_step};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn step(seed: u64) -> StepFunction {
    random_step(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ky_fan_is_a_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (step(a), step(b), step(c));
        let fg = ky_fan(&f, &g).unwrap();
        prop_assert_eq!(&fg, &ky_fan(&g, &f).unwrap());
        prop_assert!(ky_fan(&f, &h).unwrap() <= &fg + ky_fan(&g, &h).unwrap());
        prop_assert_eq!(fg.clone() == zero(), f == g);
        prop_assert!(fg <= one());
    }

    #[test]
    fn ky_fan_is_the_infimum(a in any::<u64>(), b in any::<u64>(), k in 1i64..200) {
        let diff = step(a).sub(&step(b)).unwrap();
        let d = ky_fan(&diff, &StepFunction::zero()).unwrap();
        let eta = q(k, 1000);
        prop_assert!(tail_measure(&diff, &(&d + &eta)) <= &d + &eta);
        if eta < d {
            prop_assert!(tail_measure(&diff, &(&d - &eta)) > &d - &eta);
        }
    }

    #[test]
    fn norm_is_a_norm(a in any::<u64>(), b in any::<u64>(), num in -20i64..20, den in 1i64..7) {
        let (f, g) = (step(a), step(b));
        let c = q(num, den);
        prop_assert!(f.add(&g).unwrap().norm_l1() <= f.norm_l1() + g.norm_l1());
        prop_assert_eq!(f.scale(&c).norm_l1(), num_traits::Signed::abs(&c) * f.norm_l1());
    }

    #[test]
    fn refinement_changes_nothing(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (step(a), step(b));
        let (rf, rg) = StepFunction::refine(&f, &g).unwrap();
        prop_assert_eq!(rf.grid(), rg.grid());
        prop_assert_eq!((rf.norm_l1(), rf.integral()), (f.norm_l1(), f.integral()));
        prop_assert!(rf == f && rg == g);
    }

    #[test]
    fn text_format_round_trips(a in any::<u64>()) {
        let f = step(a);
        prop_assert_eq!(parse_step(&write_step(&f)).unwrap(), f);
    }

    #[test]
    fn worst_set_integral_is_monotone_and_concave(a in any::<u64>(), i in 0i64..=16, j in 0i64..=16) {
        let f = step(a);
        let (lo, hi) = (q(i.min(j), 16), q(i.max(j), 16));
        let w = |b: &Rational| worst_set_integral(&f, b).unwrap();
        prop_assert!(w(&lo) <= w(&hi));
        prop_assert!(w(&((&lo + &hi) * q(1, 2))) * int(2) >= w(&lo) + w(&hi));
        prop_assert_eq!(w(&one()), f.norm_l1());
    }

    #[test]
    fn best_constant_beats_every_sampled_constant(a in any::<u64>(), num in -12i64..12) {
        let f = step(a);
        let best = best_constant(&f, None);
        prop_assert_eq!(&ky_fan(&f, &StepFunction::constant(best.constant.clone())).unwrap(), &best.distance);
        prop_assert!(best.distance <= ky_fan(&f, &StepFunction::constant(q(num, 4))).unwrap());
    }

    #[test]
    fn law_of_large_numbers_matches_convolution(n in 1usize..30, num in 1i64..8) {
        let delta = q(num, 8);
        prop_assert_eq!(law_of_large_numbers_norm(&delta, n), law_by_convolution(&delta, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conv_distance_shrinks_as_the_order_grows(seeds in proptest::collection::vec(any::<u64>(), 2..5), y in any::<u64>()) {
        let zs: Vec<StepFunction> = seeds.iter().map(|&s| step(s)).collect();
        let y = step(y);
        let all = conv_distance(&y, &zs, ConvOrder::All).unwrap();
        let mut prev: Option<Rational> = None;
        for n in 1..=zs.len() {
            let d = conv_distance(&y, &zs, ConvOrder::AtMost(n)).unwrap();
            prop_assert!(d.is_exact());
            prop_assert!(all.upper <= d.lower);
            if let Some(p) = prev {
                prop_assert!(d.upper <= p);
            }
            prev = Some(d.upper);
        }
        prop_assert_eq!(prev.unwrap(), all.upper.clone());
        for z in &zs {
            prop_assert!(all.upper <= y.sub(z).unwrap().norm_l1());
        }
    }
}
