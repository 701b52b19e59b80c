use bellgames::corrbox::{
    mixture_of_deterministic, random_local, random_nosignaling, stats, validate, FreeParams8,
    JointProbBox,
};
use bellgames::fine::{
    bell_values, fine_construct, lp_feasible, BellIndex, GammaMode, JointDist16,
};
use bellgames::gamecore::{
    corner_payoffs_unchecked, enumerate_nash, is_nash, nash_check, payoff, Game2x2, MixedProfile,
    NashSet, Player,
};
use bellgames::paperlab::{mp_report_with, pd_family_box, pd_report, PdReport, MpReport};
use bellgames::quantum::{born_box, random_setup};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn any_box() -> impl Strategy<Value = JointProbBox> {
    prop_oneof![
        any::<u64>().prop_map(random_local),
        any::<u64>().prop_map(|s| random_nosignaling(s).unwrap()),
    ]
}

fn weights() -> impl Strategy<Value = [f64; 16]> {
    prop::array::uniform16(0.0..1.0f64).prop_filter_map("nonzero mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.map(|v| v / s))
    })
}

fn entries() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-10.0..10.0f64)
}

fn profile() -> impl Strategy<Value = MixedProfile> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(x, y)| MixedProfile { x, y })
}

/// Symmetric games with `a3 > a1 > a4 > a2`.
fn pd_game() -> impl Strategy<Value = Game2x2> {
    prop::array::uniform4(0.01..3.0f64).prop_map(|[a2, g1, g2, g3]| {
        let a4 = a2 + g1;
        let a1 = a4 + g2;
        let a3 = a1 + g3;
        Game2x2::symmetric([a1, a2, a3, a4]).unwrap()
    })
}

fn same_geometry(s: &NashSet, t: &NashSet) -> bool {
    let close = |u: &NashSet, v: &NashSet| u.sample(0.05).iter().all(|&(x, y)| v.distance(x, y) <= 1e-9);
    close(s, t) && close(t, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_boxes_validate(b in any_box()) {
        prop_assert!(validate(&b, TOL).unwrap().valid);
    }

    #[test]
    fn free_params_round_trip(b in any_box()) {
        let back = FreeParams8::from_box(&b).reconstruct(TOL).unwrap();
        prop_assert!(back.max_abs_diff(&b) <= 1e-15);
    }

    #[test]
    fn relabelings_are_involutions(b in any_box()) {
        prop_assert_eq!(b.relabel_settings().relabel_settings(), b);
        prop_assert_eq!(b.flip_bob_outcomes().flip_bob_outcomes(), b);
    }

    #[test]
    fn mixtures_stay_valid(b in any_box(), c in any_box(), w in 0.0..=1.0f64) {
        prop_assert!(validate(&b.mix(&c, w), TOL).unwrap().valid);
    }

    #[test]
    fn chsh_within_no_signaling_bound(b in any_box()) {
        prop_assert!(stats(&b, TOL).unwrap().chsh_max_abs <= 4.0 + 1e-12);
    }

    #[test]
    fn bell_values_follow_setting_relabeling(b in any_box()) {
        let r = bell_values(&b, TOL).unwrap();
        let s = bell_values(&b.relabel_settings(), TOL).unwrap();
        for idx in BellIndex::ALL {
            prop_assert!((r.value(idx) - s.value(idx.relabeled())).abs() <= 1e-15);
        }
    }

    #[test]
    fn deterministic_mixtures_are_local_everywhere(w in weights()) {
        let b = mixture_of_deterministic(&w);
        prop_assert!(bell_values(&b, TOL).unwrap().satisfied);
        prop_assert!(lp_feasible(&b, TOL).unwrap().is_local());
        let c = fine_construct(&b, GammaMode::FineLiteral).unwrap();
        prop_assert!(c.dist.marginalize().max_abs_diff(&b) <= 1e-12);
        let d = JointDist16::from_flat(&w).marginalize();
        prop_assert!(d.max_abs_diff(&b) <= 1e-15);
    }

    #[test]
    fn lp_matches_bell_on_no_signaling_boxes(s in any::<u64>()) {
        let b = random_nosignaling(s).unwrap();
        let bell = bell_values(&b, TOL).unwrap().satisfied;
        prop_assert_eq!(lp_feasible(&b, TOL).unwrap().is_local(), bell);
        if bell {
            let c = fine_construct(&b, GammaMode::FineLiteral).unwrap();
            prop_assert!(c.dist.marginalize().max_abs_diff(&b) <= 1e-12);
        }
    }

    #[test]
    fn zero_sum_propagates(a in entries(), b in any_box(), p in profile()) {
        let g = Game2x2::new(a, a.map(|v| -v)).unwrap();
        let (u, v) = payoff(&g, &b, p);
        prop_assert!((u + v).abs() <= 1e-12);
    }

    #[test]
    fn payoff_is_bilinear(a in entries(), bb in entries(), b in any_box(), p in profile()) {
        let g = Game2x2::new(a, bb).unwrap();
        let c = corner_payoffs_unchecked(&g, &b);
        let (u, _) = payoff(&g, &b, p);
        let (x, y) = (p.x, p.y);
        let interp = (1.0 - y) * ((1.0 - x) * c.pi_a[1][1] + x * c.pi_a[0][1])
            + y * ((1.0 - x) * c.pi_a[1][0] + x * c.pi_a[0][0]);
        prop_assert!((u - interp).abs() <= 1e-12);
        // cross derivative is the same everywhere
        let h = 1e-3;
        let f = |x: f64, y: f64| c.payoff(x, y).0;
        let cross = |x: f64, y: f64| (f(x + h, y + h) - f(x + h, y) - f(x, y + h) + f(x, y)) / (h * h);
        let (x0, y0) = (x.min(1.0 - h), y.min(1.0 - h));
        prop_assert!((cross(x0, y0) - cross(0.0, 0.0)).abs() <= 1e-6);
        let mean = 0.25 * (c.pi_a[0][0] + c.pi_a[0][1] + c.pi_a[1][0] + c.pi_a[1][1]);
        prop_assert!((c.payoff(0.5, 0.5).0 - mean).abs() <= 1e-12);
    }

    #[test]
    fn enumerated_equilibria_pass_nash_check(a in entries(), bb in entries(), b in any_box()) {
        let g = Game2x2::new(a, bb).unwrap();
        let c = corner_payoffs_unchecked(&g, &b);
        let set = enumerate_nash(&g, &b, TOL);
        prop_assert!(!set.is_empty());
        for (x, y) in set.sample(0.02) {
            prop_assert!(nash_check(&c, x, y, TOL).ok, "({}, {}) in {:?}", x, y, set);
        }
    }

    #[test]
    fn pd_embedding_keeps_origin(g in pd_game(), s in any::<u64>()) {
        let b = pd_family_box(s);
        let origin = MixedProfile { x: 0.0, y: 0.0 };
        prop_assert!(is_nash(&g, &b, origin, TOL).ok);
        let (u, v) = payoff(&g, &b, origin);
        prop_assert!((u - g.a[3]).abs() <= 1e-12 && (v - g.b[3]).abs() <= 1e-12);
        prop_assert!(bell_values(&b, TOL).unwrap().satisfied);
    }

    #[test]
    fn equilibria_invariant_under_affine_payoffs(
        a in entries(), bb in entries(), b in any_box(),
        scale in 0.5..4.0f64, shift in -3.0..3.0f64, alice in any::<bool>(),
    ) {
        let g = Game2x2::new(a, bb).unwrap();
        let who = if alice { Player::Alice } else { Player::Bob };
        let h = g.affine(who, scale, shift).unwrap();
        let (s, t) = (enumerate_nash(&g, &b, TOL), enumerate_nash(&h, &b, TOL));
        prop_assert!(same_geometry(&s, &t), "{:?} vs {:?}", s, t);
    }

    #[test]
    fn born_boxes_are_valid_and_bounded(s in any::<u64>()) {
        let b = born_box(&random_setup(s)).unwrap();
        prop_assert!(validate(&b, TOL).unwrap().valid);
        prop_assert!(stats(&b, TOL).unwrap().chsh_max_abs <= 2.0 * std::f64::consts::SQRT_2 + 1e-9);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let pd = pd_report(&Game2x2::prisoners_dilemma(), 20, 1).unwrap();
    let back: PdReport = serde_json::from_str(&serde_json::to_string(&pd).unwrap()).unwrap();
    assert_eq!(back, pd);
    let mp = mp_report_with(2, 20);
    let back: MpReport = serde_json::from_str(&serde_json::to_string(&mp).unwrap()).unwrap();
    assert_eq!(back, mp);
}

#[test]
fn reports_are_deterministic() {
    assert_eq!(mp_report_with(3, 30), mp_report_with(3, 30));
}
