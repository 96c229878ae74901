mod support;

use proptest::prelude::*;
use qwalk_povm::povm::{match_rank1, povm_sum};
use qwalk_povm::protocols::sic::{sic_schedule, sic_vectors, SicSpec, ELEMENT_SITES, STEPS};
use qwalk_povm::protocols::usd::{self, UsdInput, UsdSpec};
use qwalk_povm::{evolve, kraus_from_walk, position_distribution, povm_from_kraus, Mat2, WalkSpec};
use support::{arb_schedule, arb_spinor, dense_povm};

proptest! {
    #[test]
    fn elements_sum_to_identity((steps, schedule) in arb_schedule(6), x0 in -2i64..=2) {
        let povm = povm_from_kraus(&kraus_from_walk(&schedule, steps, x0));
        prop_assert!(povm_sum(&povm).max_abs_diff(&Mat2::identity()) < 1e-10);
        for e in &povm {
            prop_assert!(e.operator.is_psd(1e-12));
        }
    }

    #[test]
    fn elements_match_dense_oracle((steps, schedule) in arb_schedule(6)) {
        let povm = povm_from_kraus(&kraus_from_walk(&schedule, steps, 0));
        let oracle = dense_povm(&schedule, steps, 0);
        for e in &povm {
            let o = oracle.get(&e.position).copied().unwrap_or_else(Mat2::zeros);
            prop_assert!(e.operator.max_abs_diff(&o) < 1e-12);
        }
        for x in oracle.keys() {
            prop_assert!(povm.iter().any(|e| e.position == *x));
        }
    }

    #[test]
    fn born_rule_matches_engine((steps, schedule) in arb_schedule(6), coin in arb_spinor()) {
        let povm = povm_from_kraus(&kraus_from_walk(&schedule, steps, 0));
        let spec = WalkSpec::new(steps, 0, coin, schedule).unwrap();
        let dist = position_distribution(&evolve(&spec));
        for e in &povm {
            prop_assert!((e.probability(&coin) - dist.get(e.position)).abs() < 1e-10);
        }
    }

    #[test]
    fn usd_has_no_errors(phi in 1.0..=90.0f64) {
        let schedule = usd::usd_schedule(phi).unwrap();
        let povm = povm_from_kraus(&kraus_from_walk(&schedule, usd::STEPS, 0));
        let (plus, minus) = usd::phi_states(phi);
        let minus_elem = povm.iter().find(|e| e.position == usd::MINUS_SITE).unwrap();
        let plus_elem = povm.iter().find(|e| e.position == usd::PLUS_SITE).unwrap();
        prop_assert!(minus_elem.probability(&plus) < 1e-12);
        prop_assert!(plus_elem.probability(&minus) < 1e-12);
    }
}

#[test]
fn sic_elements_are_scaled_projectors() {
    let povm = povm_from_kraus(&kraus_from_walk(&sic_schedule(), STEPS, 0));
    let xi = sic_vectors();
    for (i, site) in ELEMENT_SITES.iter().enumerate() {
        let e = povm.iter().find(|e| e.position == *site).unwrap();
        let m = match_rank1(e, &xi[i], 0.5).unwrap();
        assert!(m.matches, "element at {site}: residual {}", m.residual);
    }
    for e in &povm {
        if !ELEMENT_SITES.contains(&e.position) {
            assert!(
                e.operator.max_abs() < 1e-12,
                "site {} should be empty",
                e.position
            );
        }
    }
}

#[test]
fn sic_overlaps_are_one_third() {
    let xi = sic_vectors();
    for i in 0..4 {
        assert!((xi[i].norm_sqr() - 1.0).abs() < 1e-14);
        for j in (i + 1)..4 {
            assert!((xi[i].inner(&xi[j]).norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}

#[test]
fn sic_inputs_never_reach_their_element() {
    for spec in SicSpec::all() {
        let p = position_distribution(&evolve(&spec.walk_spec()));
        assert!(p.get(spec.forbidden_site()) < 1e-20);
    }
}

#[test]
fn superposition_weights_follow_ratio() {
    let spec = UsdSpec::new(60.0, UsdInput::Superposition { a: 0.3, b: 0.7 }).unwrap();
    let dist = position_distribution(&evolve(&spec.walk_spec().unwrap()));
    let ratio = dist.get(usd::PLUS_SITE) / dist.get(usd::MINUS_SITE);
    assert!((ratio - 0.09 / 0.49).abs() < 1e-12);
}
