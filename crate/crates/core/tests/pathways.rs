//! Cross-checks between the evaluation pathways and the reference oracles.

use std::f64::consts::PI;

use pcband_core::dispersion::{flow_cos, general_cos};
use pcband_core::dtmm::TransferContext;
use pcband_core::oracle::{analytic_two_layer, monodromy_cos, staircase_limit_cos};
use pcband_core::stratified::period_transfer;
use pcband_core::*;
use proptest::prelude::*;

fn two_layer() -> LayerStack {
    LayerStack::new(vec![Layer { n: 1.0, d: 0.5 }, Layer { n: 3.0, d: 0.5 }]).unwrap()
}

fn oblique() -> IncidenceConfig {
    IncidenceConfig::new(1.0, PI / 4.0).unwrap()
}

fn model(medium: &Medium, inc: IncidenceConfig, pol: Polarization, pathway: Pathway) -> DispersionModel {
    DispersionModel::new(medium, inc, pol, pathway).unwrap()
}

#[test]
fn stratified_pathway_is_exact_for_two_layers() {
    let medium = Medium::Layers(two_layer());
    for inc in [IncidenceConfig::normal(), oblique()] {
        for pol in [Polarization::Te, Polarization::Tm] {
            let m = model(&medium, inc, pol, Pathway::Stratified);
            for i in 0..50 {
                let omega = 0.01 + 1.49 * i as f64 / 49.0;
                let k0 = k0_from_omega(omega, 1.0);
                let exact = analytic_two_layer(1.0, 3.0, 0.5, 0.5, &inc, k0, pol).unwrap();
                let got = m.cos_kl(omega).unwrap();
                assert!((got.re - exact).abs() < 1e-10, "{pol:?} Ω={omega}");
                assert_eq!(got.im, 0.0);
            }
        }
    }
}

#[test]
fn tm_interface_conditions_match_jump_matrices() {
    // the ODE oracle enforces continuity of A and A'/n²; the jump matrices
    // encode the same physics in envelope amplitudes
    let stack =
        LayerStack::new(vec![Layer { n: 1.4, d: 0.3 }, Layer { n: 2.6, d: 0.45 }, Layer { n: 1.9, d: 0.25 }]).unwrap();
    let p = Profile::from_layers(&stack);
    for &omega in &[0.2, 0.65, 1.3] {
        let k0 = k0_from_omega(omega, stack.period());
        let t = period_transfer(&stack, &oblique(), k0, Polarization::Tm).unwrap();
        let jumps = dispersion::bloch_cos_stratified(t.q.a11, t.k_first, stack.period());
        let ode = monodromy_cos(&p, &oblique(), k0, Polarization::Tm).unwrap();
        assert!((jumps - ode).abs() < 1e-8, "Ω={omega}: {jumps} vs {ode}");
    }
}

#[test]
fn normal_incidence_te_tm_identity_on_every_pathway() {
    let media: Vec<(Medium, Pathway)> = vec![
        (Profile::canonical(CanonicalProfile::Sinusoidal).into(), Pathway::Symmetric),
        (Profile::canonical(CanonicalProfile::Triangular).into(), Pathway::General),
        (Profile::canonical(CanonicalProfile::Square).into(), Pathway::Stratified),
        (Profile::canonical(CanonicalProfile::RampJump).into(), Pathway::General),
        (Medium::Layers(two_layer()), Pathway::Stratified),
    ];
    for (medium, pathway) in &media {
        let te = model(medium, IncidenceConfig::normal(), Polarization::Te, *pathway);
        let tm = model(medium, IncidenceConfig::normal(), Polarization::Tm, *pathway);
        for i in 1..=30 {
            let omega = 0.05 * i as f64;
            let (a, b) = (te.cos_kl(omega).unwrap(), tm.cos_kl(omega).unwrap());
            assert!((a - b).norm() < 1e-8, "{pathway} Ω={omega}: {a} vs {b}");
        }
    }
}

#[test]
fn symmetric_and_general_pathways_agree() {
    for kind in [CanonicalProfile::Sinusoidal, CanonicalProfile::Triangular] {
        let medium: Medium = Profile::canonical(kind).into();
        for inc in [IncidenceConfig::normal(), oblique()] {
            for pol in [Polarization::Te, Polarization::Tm] {
                let fast = model(&medium, inc, pol, Pathway::Symmetric);
                let slow = model(&medium, inc, pol, Pathway::General);
                for i in 1..=20 {
                    let omega = 0.075 * i as f64;
                    let (a, b) = (fast.cos_kl(omega).unwrap(), slow.cos_kl(omega).unwrap());
                    assert!((a - b).norm() < 1e-8, "{kind} {pol:?} Ω={omega}");
                }
            }
        }
    }
}

#[test]
fn oracles_agree_on_continuous_profiles() {
    for kind in CanonicalProfile::ALL {
        let p = Profile::canonical(kind);
        for (inc, pol) in [(IncidenceConfig::normal(), Polarization::Te), (oblique(), Polarization::Tm)] {
            for &omega in &[0.15, 0.7, 1.45] {
                let k0 = k0_from_omega(omega, 1.0);
                let ode = monodromy_cos(&p, &inc, k0, pol).unwrap();
                let stair = staircase_limit_cos(&p, &inc, k0, pol, 2048).unwrap();
                assert!((ode - stair.value).abs() < 1e-6, "{kind} {pol:?} Ω={omega}");
            }
        }
    }
}

#[test]
fn composed_flow_converges_to_monodromy() {
    let p = Profile::canonical(CanonicalProfile::Sinusoidal);
    for pol in [Polarization::Te, Polarization::Tm] {
        let k0 = k0_from_omega(0.6, 1.0);
        let ctx = TransferContext::new(&p, oblique(), k0, pol).unwrap();
        let ode = monodromy_cos(&p, &oblique(), k0, pol).unwrap();
        let flow = flow_cos(&ctx, -0.5, 1024).unwrap();
        assert!((flow.re - ode).abs() < 1e-7, "{pol:?}: {flow} vs {ode}");
    }
}

#[test]
fn single_exponential_depends_on_window() {
    // exp(∫U) drops the commutator terms of the true flow; its discriminant
    // therefore moves with the window start, while the converged flow does not
    let p = Profile::canonical(CanonicalProfile::Sinusoidal);
    let ctx = TransferContext::new(&p, IncidenceConfig::normal(), k0_from_omega(0.1, 1.0), Polarization::Te).unwrap();
    let a = general_cos(&ctx, -0.5, 1).unwrap().re;
    let b = general_cos(&ctx, 0.0, 1).unwrap().re;
    assert!((a - b).abs() > 1e-3, "{a} vs {b}");
}

#[test]
fn homogeneous_medium_everywhere() {
    let p = Profile::parse_expr("2").unwrap();
    let medium: Medium = p.clone().into();
    for pathway in [Pathway::Symmetric, Pathway::General, Pathway::Stratified] {
        let m = model(&medium, IncidenceConfig::normal(), Polarization::Te, pathway);
        let c = m.cos_kl(0.3).unwrap().re;
        assert!((c - (2.0 * PI * 0.3 * 2.0).cos()).abs() < 1e-12, "{pathway}");
    }
    let ode = monodromy_cos(&p, &IncidenceConfig::normal(), 1.0, Polarization::Te).unwrap();
    assert!((ode - 2f64.cos()).abs() < 1e-10);
}

#[test]
fn staircase_convergence_is_second_order() {
    let p = Profile::canonical(CanonicalProfile::Sinusoidal);
    let k0 = k0_from_omega(0.5, 1.0);
    let est = staircase_limit_cos(&p, &IncidenceConfig::normal(), k0, Polarization::Te, 256).unwrap();
    let [c64, c128, c256] = est.raw;
    let ratio = (c128 - c64).abs() / (c256 - c128).abs();
    assert!(ratio >= 4.0 - 0.1, "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn layered_pathway_matches_ode(
        n1 in 1.0f64..3.5, n2 in 1.0f64..3.5, d1 in 0.1f64..0.9, omega in 0.05f64..1.5, tm in any::<bool>(),
    ) {
        let stack = LayerStack::new(vec![Layer { n: n1, d: d1 }, Layer { n: n2, d: 1.0 - d1 }]).unwrap();
        let pol = if tm { Polarization::Tm } else { Polarization::Te };
        let inc = IncidenceConfig::new(1.0, 0.3).unwrap();
        let k0 = k0_from_omega(omega, 1.0);
        let m = DispersionModel::new(&Medium::Layers(stack.clone()), inc, pol, Pathway::Auto).unwrap();
        let exact = analytic_two_layer(n1, n2, d1, 1.0 - d1, &inc, k0, pol).unwrap();
        let ode = monodromy_cos(&Profile::from_layers(&stack), &inc, k0, pol).unwrap();
        prop_assert!((m.cos_kl(omega).unwrap().re - exact).abs() < 1e-10);
        prop_assert!((ode - exact).abs() < 1e-8);
    }

    #[test]
    fn symmetric_expression_profiles_take_the_fast_path(a in 0.1f64..0.9, omega in 0.05f64..1.2) {
        let p = Profile::parse_expr(&format!("2 + {a}*cos(2*pi*x)")).unwrap();
        let medium: Medium = p.into();
        let fast = DispersionModel::new(&medium, IncidenceConfig::normal(), Polarization::Te, Pathway::Auto).unwrap();
        prop_assert_eq!(fast.pathway(), Pathway::Symmetric);
        let slow = DispersionModel::new(&medium, IncidenceConfig::normal(), Polarization::Te, Pathway::General).unwrap();
        prop_assert!((fast.cos_kl(omega).unwrap() - slow.cos_kl(omega).unwrap()).norm() < 1e-8);
    }
}
