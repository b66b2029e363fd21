//! Acceptance gate: one test per criterion, each a single pass/fail line in
//! the test output. Tolerances and scenario counts are stated inline; every
//! test is deterministic.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jetstress::chart::{
    integrate_face_form, integrate_top_form, QuadratureRule, Region,
};
use jetstress::forms::{binomial, exterior_derivative, FormField};
use jetstress::harness::{
    run_scenario, run_suite, Mode, Scenario, WORKED_SECOND_ORDER,
};
use jetstress::jets::{
    include_second, iterate_prolong, lift_dual, prolong, restrict_dual, sym_count,
    IteratedDualPoint, Jet1Section, JetPoint, Section,
};
use jetstress::scalar::{PolyField, ScalarField};
use jetstress::stress::SecondOrderStress;

fn poly(seed: u64, n: usize, deg: u32) -> ScalarField {
    ScalarField::from(PolyField::random(seed, n, deg))
}

fn find_row<'a>(
    report: &'a jetstress::harness::ResidualReport,
    identity: &str,
) -> &'a jetstress::harness::IdentityRow {
    report
        .rows
        .iter()
        .find(|r| r.identity == identity)
        .unwrap_or_else(|| panic!("report has no '{identity}' row"))
}

/// Criterion 1: the fully worked second-order scenario reproduces the four
/// term values (2, 0, -2, 0) with residual <= 1e-12, in under a second.
#[test]
fn criterion_1_worked_example_exactness() {
    let start = Instant::now();
    let scenario = Scenario::from_json(WORKED_SECOND_ORDER).unwrap();
    let report = run_scenario(&scenario).unwrap();
    let row = find_row(&report, "four-term");
    let expected = [2.0, 0.0, -2.0, 0.0];
    for (term, want) in row.terms.iter().zip(expected) {
        assert!((term - want).abs() <= 1e-12, "term {term} vs {want}");
    }
    assert!(row.abs_residual <= 1e-12, "residual {}", row.abs_residual);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
}

/// Criterion 2: first-order virtual work balances to a relative residual of
/// 1e-10 on 50 seeded polynomial scenarios across n in {2,3}, d in {1,2},
/// all inside 30 seconds.
#[test]
fn criterion_2_first_order_virtual_work() {
    let start = Instant::now();
    let combos = [(2usize, 1usize), (2, 2), (3, 1), (3, 2)];
    for seed in 0..50u64 {
        let (n, d) = combos[(seed % 4) as usize];
        let scenario = Scenario::seeded(&format!("vw-{seed}"), Mode::FirstOrder, n, d, seed);
        let report = run_scenario(&scenario).unwrap();
        let row = find_row(&report, "virtual-work");
        assert!(
            row.rel_residual <= 1e-10,
            "seed {seed} (n={n}, d={d}): rel {}",
            row.rel_residual
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
}

/// Criterion 3: the pointwise divergence identity holds to 1e-12 relative
/// to the probe scale at 100 random points per scenario.
#[test]
fn criterion_3_divergence_pointwise() {
    let combos = [(2usize, 1usize), (2, 2), (3, 1), (3, 2)];
    for seed in 0..50u64 {
        let (n, d) = combos[(seed % 4) as usize];
        let scenario = Scenario::seeded(&format!("dp-{seed}"), Mode::FirstOrder, n, d, seed);
        let report = run_scenario(&scenario).unwrap();
        let row = find_row(&report, "divergence-pointwise");
        assert!(
            row.rel_residual <= 1e-12,
            "seed {seed} (n={n}, d={d}): rel {}",
            row.rel_residual
        );
        assert!(row.pass);
    }
}

/// Criterion 4: the dual restriction is the exact adjoint of the inclusion
/// of second-order jets, to 1e-14 over 1000 random pointwise trials with
/// n up to 4.
#[test]
fn criterion_4_adjunction() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xADD);
    for trial in 0..1000 {
        let n = rng.random_range(1..=4usize);
        let d = rng.random_range(1..=3usize);
        let mut val = |len: usize| -> Vec<f64> {
            (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let x = IteratedDualPoint::new(n, d, val(d), val(d * n), val(d * n), val(d * n * n))
            .unwrap();
        let jet =
            JetPoint::from_parts(n, d, vec![val(d), val(d * n), val(d * sym_count(n, 2))])
                .unwrap();
        let lhs = restrict_dual(&x).pair(&jet);
        let rhs = x.pair(&include_second(&jet).unwrap());
        let scale = 1.0f64.max(lhs.abs()).max(rhs.abs());
        assert!(
            (lhs - rhs).abs() <= 1e-14 * scale,
            "trial {trial} (n={n}, d={d}): {lhs} vs {rhs}"
        );
    }
}

/// Criterion 5: restricting after the canonical lift is the identity, both
/// on dual points (componentwise, 1e-15 slack) and on second-order stress
/// fields evaluated at random points.
#[test]
fn criterion_5_lift_restrict_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11F7);
    // dual points
    for _ in 0..200 {
        let n = rng.random_range(1..=4usize);
        let d = rng.random_range(1..=3usize);
        let mut val = |len: usize| -> Vec<f64> {
            (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let s = jetstress::jets::SecondOrderDualPoint::new(
            n,
            d,
            val(d),
            val(d * n),
            val(d * sym_count(n, 2)),
        )
        .unwrap();
        let back = restrict_dual(&lift_dual(&s));
        for (a, b) in s
            .s0
            .iter()
            .chain(s.s1.iter())
            .chain(s.s2.iter())
            .zip(back.s0.iter().chain(back.s1.iter()).chain(back.s2.iter()))
        {
            assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }
    // stress fields
    for seed in 0..10u64 {
        let n = 2 + (seed % 2) as usize;
        let d = 1 + (seed % 2) as usize;
        let c2 = sym_count(n, 2);
        let s = SecondOrderStress::new(
            n,
            d,
            (0..d).map(|i| poly(seed * 100 + i as u64, n, 2)).collect(),
            (0..d * n).map(|i| poly(seed * 100 + 10 + i as u64, n, 2)).collect(),
            (0..d * c2).map(|i| poly(seed * 100 + 40 + i as u64, n, 2)).collect(),
        )
        .unwrap();
        let back = s.lift_nonholonomic().restrict_second_order();
        let mut probe_rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| probe_rng.random_range(-1.0..1.0)).collect();
            for alpha in 0..d {
                let a = s.s0_field(alpha).eval(&x);
                let b = back.s0_field(alpha).eval(&x);
                assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));
                for i in 0..n {
                    for j in i..n {
                        let a = s.s2_field(alpha, i, j).eval(&x);
                        let b = back.s2_field(alpha, i, j).eval(&x);
                        assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));
                    }
                }
            }
        }
    }
}

/// Criterion 6: the once-integrated jet identity holds to 1e-10 relative on
/// 20 seeded scenarios whose jet sections are genuinely non-holonomic.
#[test]
fn criterion_6_jet_identity_nonholonomic() {
    let combos = [(2usize, 1usize), (2, 2), (3, 1), (3, 2)];
    for seed in 0..20u64 {
        let (n, d) = combos[(seed % 4) as usize];
        let scenario = Scenario::seeded(&format!("nh-{seed}"), Mode::Nonholonomic, n, d, seed);
        let report = run_scenario(&scenario).unwrap();
        let row = find_row(&report, "jet-identity");
        assert!(
            row.rel_residual <= 1e-10,
            "seed {seed} (n={n}, d={d}): rel {}",
            row.rel_residual
        );
    }
    // spot-check that the generated sections really are non-holonomic
    let a0 = vec![poly(7000, 2, 3)];
    let a1 = vec![poly(7001, 2, 3), poly(7002, 2, 3)];
    let a = Jet1Section::new(2, 1, a0, a1).unwrap();
    let b = iterate_prolong(&a, &[0.4, 0.6]).unwrap();
    assert!(
        b.holonomicity_defect() > 1e-3,
        "independent blocks should not look holonomic"
    );
}

/// Criterion 7: the four-term decomposition closes to 1e-9 relative on 20
/// seeded edge-compatible scenarios over n in {2,3}, with the oriented edge
/// sum below 1e-10 in each.
#[test]
fn criterion_7_four_term_identity() {
    let combos = [(2usize, 1usize), (2, 2), (3, 1), (3, 2)];
    for seed in 0..20u64 {
        let (n, d) = combos[(seed % 4) as usize];
        let scenario = Scenario::seeded(&format!("ft-{seed}"), Mode::SecondOrder, n, d, seed);
        let report = run_scenario(&scenario).unwrap();
        let four = find_row(&report, "four-term");
        assert!(
            four.rel_residual <= 1e-9,
            "seed {seed} (n={n}, d={d}): four-term rel {}",
            four.rel_residual
        );
        let edges = find_row(&report, "edge-cancellation");
        assert!(
            edges.terms[0].abs() <= 1e-10 * (1.0 + edges.terms[1].abs()),
            "seed {seed} (n={n}, d={d}): edge sum {}",
            edges.terms[0]
        );
    }
}

/// Criterion 8: Stokes on boxes and d^2 = 0, to 1e-12 relative, for random
/// polynomial forms of degree up to 6.
#[test]
fn criterion_8_stokes_and_d_squared() {
    let rule = QuadratureRule::default();
    for n in [2usize, 3] {
        let region = Region::from_bounds(
            &(0..n).map(|k| (-0.5 - 0.1 * k as f64, 1.0 + 0.2 * k as f64)).collect::<Vec<_>>(),
        )
        .unwrap();
        for seed in 0..10u64 {
            // Stokes: integral of d(omega) over the box equals the summed
            // oriented face integrals of omega, for an (n-1)-form
            let comps: Vec<ScalarField> = (0..n)
                .map(|c| poly(seed * 50 + c as u64, n, 6))
                .collect();
            let omega = FormField::new(n, n - 1, comps).unwrap();
            let d_omega = exterior_derivative(&omega).unwrap();
            let interior = integrate_top_form(&d_omega, &region, &rule).unwrap();
            let boundary: f64 = region
                .boundary_faces()
                .iter()
                .map(|f| integrate_face_form(&omega, f, &rule).unwrap())
                .sum();
            let scale = 1.0f64.max(interior.abs()).max(boundary.abs());
            assert!(
                (interior - boundary).abs() <= 1e-12 * scale,
                "stokes n={n} seed={seed}: {interior} vs {boundary}"
            );

            // d^2 = 0 on polynomial 1-forms in dimension >= 3. At degree 6
            // the two differentiation orders can differ by an ulp in the
            // coefficient products, so the bar is the stated relative one
            // rather than structural zero (which the degree-3 property
            // tests do check).
            if n >= 3 {
                let comps: Vec<ScalarField> = (0..n)
                    .map(|c| poly(seed * 60 + c as u64, n, 6))
                    .collect();
                let one_form = FormField::new(n, 1, comps).unwrap();
                let d_one = exterior_derivative(&one_form).unwrap();
                let dd = exterior_derivative(&d_one).unwrap();
                assert_eq!(dd.components().len(), binomial(n, 3));
                let mut probe_rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..10 {
                    let x: Vec<f64> =
                        (0..n).map(|_| probe_rng.random_range(-1.0..1.0)).collect();
                    let scale = d_one
                        .components()
                        .iter()
                        .fold(1.0f64, |m, c| m.max(c.eval(&x).abs()));
                    for comp in dd.components() {
                        assert!(
                            comp.eval(&x).abs() <= 1e-12 * scale,
                            "d^2 component {} at {x:?}",
                            comp.eval(&x)
                        );
                    }
                }
            }
        }
    }
}

/// Criterion 9: with every derivative taken by central differences instead
/// of polynomial calculus, all identity residuals stay below 1e-6 absolute.
#[test]
fn criterion_9_finite_difference_mode() {
    for mode in [Mode::FirstOrder, Mode::SecondOrder, Mode::Nonholonomic, Mode::EdgeCancel] {
        for seed in [1u64, 2] {
            let mut scenario =
                Scenario::seeded(&format!("fd-{}-{seed}", mode.as_str()), mode, 2, 1, seed);
            scenario.fd = true;
            let report = run_scenario(&scenario).unwrap();
            for row in &report.rows {
                assert_eq!(row.basis, "absolute");
                assert!(
                    row.pass,
                    "{} seed {seed} row {}: abs {} over bar {}",
                    mode.as_str(),
                    row.identity,
                    row.abs_residual,
                    row.tolerance
                );
            }
        }
    }
}

/// The built-in suite is the same set the command line runs; it must pass
/// wholesale and stay fast.
#[test]
fn suite_passes_end_to_end() {
    let start = Instant::now();
    let reports = run_suite().unwrap();
    assert!(reports.len() >= 20);
    for report in &reports {
        assert!(report.pass(), "{}", report.to_json());
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "suite took {elapsed:?}, budget 30 s");
}

/// Reports are bit-identical across runs apart from wall time.
#[test]
fn reports_are_reproducible() {
    for mode in [Mode::FirstOrder, Mode::SecondOrder, Mode::Nonholonomic, Mode::EdgeCancel] {
        let scenario = Scenario::seeded("repro", mode, 2, 2, 123);
        let a = run_scenario(&scenario).unwrap();
        let b = run_scenario(&scenario).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json(), "{}", mode.as_str());
    }
}

/// The non-holonomic stress pipeline agrees with direct evaluation through
/// prolongation, tying the harness integrals to the pointwise layer.
#[test]
fn pipeline_consistency_spot_check() {
    let y = jetstress::stress::NonHolonomicStress::random(99, 2, 2, 2);
    let u = Section::new(2, vec![poly(500, 2, 3), poly(501, 2, 3)]).unwrap();
    let density = jetstress::stress::iterated_action_density(&y, &u).unwrap();
    for probe in [[0.3, 0.4], [0.9, 0.1]] {
        let direct = jetstress::stress::eval_on_iterated_jet(&y, &u, &probe).unwrap();
        assert!((density.eval(&probe) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        // and the included 2-jet sees the same action through restriction
        let jet = prolong(&u, 2, &probe).unwrap();
        let via_restriction = y.restrict_second_order().eval(&jet, &probe).unwrap();
        assert!((via_restriction - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }
}
