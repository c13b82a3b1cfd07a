use darwinlab::certify::{self, Check};
use darwinlab::channels::{self, Channel};
use darwinlab::infotheory::{conditional_mutual_information, entropy, entropy_of, mutual_information, pointer_entropy};
use darwinlab::nonmarkov::{self, AncillaMode, ModelConfig, ModelKind};
use darwinlab::states::{self, RandomKind, RandomSpec};
use darwinlab::{HilbertSpace, PointerBasis, SubsystemLabel};
use proptest::prelude::*;

fn mixed(seed: u64, ids: &[&str], rank: usize) -> darwinlab::QState {
    let space = HilbertSpace::qubits(ids).unwrap();
    states::random_state(&RandomSpec::new(RandomKind::GinibreMixed { rank }, seed), &space).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_within_dimension(seed in any::<u64>(), rank in 1usize..=8) {
        let st = mixed(seed, &["A", "B", "C"], rank);
        let h = entropy(&st).0;
        prop_assert!((-1e-12..=3.0 + 1e-12).contains(&h));
        prop_assert!(h <= (rank as f64).log2() + 1e-9);
    }

    #[test]
    fn mutual_information_symmetric_and_bounded(seed in any::<u64>(), rank in 1usize..=8) {
        let st = mixed(seed, &["A", "B", "C"], rank);
        let ab = mutual_information(&st, &["A"], &["B", "C"]).unwrap().0;
        let ba = mutual_information(&st, &["B", "C"], &["A"]).unwrap().0;
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1e-12..=2.0 + 1e-9).contains(&ab));
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), rank in 1usize..=8) {
        let st = mixed(seed, &["A", "B", "C"], rank);
        let c = conditional_mutual_information(&st, &["A"], &["B"], &["C"]).unwrap().0;
        prop_assert!(c >= -1e-9);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>(), rank in 1usize..=4) {
        let st = mixed(seed, &["A", "B"], rank);
        let red = st.reduce(&["B"]).unwrap();
        prop_assert!((red.rho().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(red.rho().hermiticity_error() < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_metric_on_samples(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (mixed(s1, &["A"], 2), mixed(s2, &["A"], 2), mixed(s3, &["A"], 1));
        let ab = a.trace_distance(&b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - b.trace_distance(&a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= a.trace_distance(&c).unwrap() + c.trace_distance(&b).unwrap() + 1e-12);
    }

    #[test]
    fn pointer_entropy_dominates_von_neumann(seed in any::<u64>()) {
        let st = mixed(seed, &["S"], 2);
        let basis = PointerBasis::computational(SubsystemLabel::qubit("S"));
        prop_assert!(pointer_entropy(&st, &basis).unwrap().0 >= entropy(&st).0 - 1e-12);
    }

    #[test]
    fn petz_map_is_a_channel(seed in any::<u64>(), nk in 1usize..=4) {
        let mut r = darwinlab::rng::stream(seed, 0);
        let ch = Channel::random(&mut r, 2, 2, nk);
        let refst = mixed(seed ^ 1, &["S"], 2);
        let petz = channels::petz_recovery(&ch, &refst).unwrap();
        prop_assert!(petz.completeness_error() < 1e-8);
        // Petz maps Λ(σ) back onto σ
        let back = petz.apply_matrix(&ch.apply_matrix(refst.rho()).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(refst.rho()) < 1e-8);
    }

    #[test]
    fn certification_rows_never_violate(seed in any::<u64>()) {
        for c in Check::ALL {
            for row in certify::certify(c, 3, seed).unwrap() {
                prop_assert!(row.passed, "{:?}", row);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maxent_ancilla_keeps_two_h_a(theta in 0.0f64..std::f64::consts::PI, g in 0.0f64..std::f64::consts::FRAC_PI_2, n in 1usize..=4, star in any::<bool>()) {
        let cfg = ModelConfig {
            kind: if star { ModelKind::SpinStar } else { ModelKind::Collision },
            n_env: n,
            se_coupling: theta,
            g,
            steps: 2 * n,
            ..Default::default()
        };
        let t = nonmarkov::run_model(&cfg, &AncillaMode::Maxent).unwrap();
        let mut rest = vec!["S".to_string()];
        rest.extend(states::fragment_ids(n));
        for st in &t.states {
            prop_assert!((st.purity() - 1.0).abs() < 1e-9);
            let i = mutual_information(st, &["A".to_string()], &rest).unwrap().0;
            let ha = entropy_of(st, &["A"]).unwrap().0;
            prop_assert!((i - 2.0 * ha).abs() < 1e-9);
        }
    }

    #[test]
    fn backflow_totals_are_non_negative(theta in 0.0f64..std::f64::consts::PI, g in 0.0f64..std::f64::consts::FRAC_PI_2, n in 1usize..=4) {
        let cfg = ModelConfig { n_env: n, se_coupling: theta, g, steps: 3 * n, ..Default::default() };
        let s = nonmarkov::backflow(&cfg, &AncillaMode::Maxent, None).unwrap();
        prop_assert!(s.blp_total >= 0.0 && s.cmi_backflow_total >= 0.0);
        prop_assert!(s.cmi.iter().all(|&x| x >= -1e-9));
        prop_assert_eq!(s.trace_distance.len(), 3 * n + 1);
    }

    #[test]
    fn measured_ancilla_identity(theta in 0.0f64..std::f64::consts::PI, g in 0.0f64..std::f64::consts::FRAC_PI_2, mask in 1u8..16) {
        let n = 4;
        let cfg = ModelConfig { n_env: n, se_coupling: theta, g, steps: 5, ..Default::default() };
        let t = nonmarkov::run_model(&cfg, &AncillaMode::None).unwrap();
        let e_sub: Vec<String> = states::fragment_ids(n).into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, f)| f).collect();
        let basis = PointerBasis::computational(SubsystemLabel::qubit("S"));
        let r = nonmarkov::bound29_check(t.last(), &basis, &e_sub, &Default::default(), &Default::default()).unwrap();
        prop_assert!(r.a_ok, "{:?}", r);
        prop_assert!((r.cmi - r.pointer_discord).abs() < 1e-9);
        prop_assert!(r.discord <= r.pointer_discord + 1e-9);
    }
}
