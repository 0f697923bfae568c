//! Contract tests for gain synthesis, critical delays, two-root region
//! classification, remaining-spectrum characterization, and exponential
//! envelope constants.

use polecert_core::placement::{
    a_of_tau, assign_three, assign_two_exact, classify_two_root, design_p, design_pd,
    exp_estimate, imid_check, region_thresholds, remaining_spectrum_three,
    remaining_spectrum_two, solve_tau_for_a, solve_tau_for_a_detailed, tau_star_pair,
    tau_star_three, AssignedRoots, ControllerKind, MidDominance, Region, RootPair, RootTriple,
};
use polecert_core::quasipoly::{self, NeutralQuasiPoly};
use polecert_core::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    let err = (got - want).abs() / want.abs().max(1e-300);
    assert!(
        err <= tol,
        "{what}: got {got:.17e}, want {want:.17e}, rel err {err:.3e} > {tol:.1e}"
    );
}

fn triple(s1: f64, s2: f64, s3: f64) -> RootTriple {
    RootTriple::new(s1, s2, s3).unwrap()
}

fn pair(s1: f64, s2: f64) -> RootPair {
    RootPair::new(s1, s2).unwrap()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(
        flo.signum() != f(hi).signum(),
        "bisect bracket lacks a sign change"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scale-aware bound for |Δ(s)|: the float noise of each additive term.
fn delta_scale(qp: &NeutralQuasiPoly, s: Complex64) -> f64 {
    let e = (-qp.tau * s.re).exp();
    s.norm() + qp.a.abs() + e * (qp.alpha.abs() * s.norm() + qp.beta.abs())
}

// ---------------------------------------------------------------------------
// Gain synthesis examples.
// ---------------------------------------------------------------------------

#[test]
fn pd_design_places_equidistributed_triple_with_closed_form_gains() {
    let d = design_pd(2.0, 1.0, &triple(-5.0, -6.0, -7.0)).unwrap();
    assert_eq!(d.kind, ControllerKind::Pd);
    assert_eq!(d.plant_a, 1.0);
    assert_rel(d.tau, 1.5f64.ln(), 1e-12, "delay");
    let kd_closed = (2.0f64 / 3.0).powi(6);
    assert_rel(d.kd, kd_closed, 1e-12, "k_d vs (2/3)^6");
    assert_rel(d.kp, 11.0 * kd_closed, 1e-12, "k_p vs 11 (2/3)^6");
    // Equivalent exponential forms of the same gains.
    assert_rel(d.kd, (-6.0 * d.tau).exp(), 1e-12, "k_d vs e^(-6 tau)");
    assert_rel(
        d.kp,
        (-6.0 * d.tau).exp() * (6.0 + quasipoly::coth(0.5 * d.tau)),
        1e-12,
        "k_p vs e^(-6 tau) (6 + coth(tau/2))",
    );
    assert!(d.certificate.is_none());
    let qp = d.quasipoly().unwrap();
    assert_eq!((qp.a, qp.alpha, qp.beta, qp.tau), (d.plant_a, d.kd, d.kp, d.tau));
    for s in [-5.0, -6.0, -7.0] {
        let r = qp.eval_delta_real(s).abs();
        assert!(r <= 1e-13 * (1.0 + s.abs()), "residual {r:.3e} at {s}");
    }
}

#[test]
fn pd_design_hits_golden_ratio_delay_numerically() {
    let roots = triple(-3.0, -4.0, -6.0);
    let d = design_pd(1.0, 1.0, &roots).unwrap();
    let golden = (0.5 * (1.0 + 5.0f64.sqrt())).ln();
    assert_rel(d.tau, golden, 1e-10, "delay vs ln((1+sqrt 5)/2)");
    assert_rel(d.kd, 9.0 * 5.0f64.sqrt() - 20.0, 1e-10, "k_d vs 9 sqrt5 - 20");
    assert_rel(d.kp, 30.0 * 5.0f64.sqrt() - 66.0, 1e-10, "k_p vs 30 sqrt5 - 66");
    let search = solve_tau_for_a_detailed(&roots, 0.0).unwrap();
    assert_eq!(search.extra_brackets, 0, "the delay equation has one crossing");
}

#[test]
fn pd_design_matches_hyperexcitable_plant_decimals() {
    let d = design_pd(1.0, 2.0, &triple(-7.0, -8.0, -9.0)).unwrap();
    assert_rel(d.tau, 1.25f64.ln(), 1e-12, "delay");
    assert_rel(d.kd, 0.16777216, 1e-12, "k_d vs (4/5)^8");
    assert_rel(d.kp, 2.85212672, 1e-12, "k_p vs 17 (4/5)^8");
    // The two-decimal roundings quoted for this design.
    assert_eq!((d.tau * 100.0).round() / 100.0, 0.22);
    assert_eq!((d.kd * 100.0).round() / 100.0, 0.17);
    assert_eq!((d.kp * 100.0).round() / 100.0, 2.85);
}

#[test]
fn pd_design_rejects_unreachable_rate() {
    let err = design_pd(9.0, 1.0, &triple(-7.0, -8.0, -9.0)).unwrap_err();
    assert!(matches!(err, Error::RateUnreachable), "got {err}");
}

#[test]
fn p_design_places_pairs_and_double_root() {
    let d = design_p(1.0, 2.0, &pair(-7.0, -8.0)).unwrap();
    assert_eq!(d.kind, ControllerKind::P);
    assert_eq!(d.kd, 0.0);
    assert_rel(d.tau, (9.0f64 / 8.0).ln(), 1e-14, "delay vs ln(9/8)");
    assert_rel(d.kp, 8.0f64.powi(8) / 9.0f64.powi(7), 1e-12, "k_p' vs 8^8/9^7");

    let d = design_p(1.0, 2.0, &pair(-7.0, -9.0)).unwrap();
    assert_rel(d.tau, (0.5 * 5.0f64.sqrt()).ln(), 1e-14, "delay vs ln(sqrt5/2)");
    assert_rel(d.kp, 8.0 * 0.8f64.powf(3.5), 1e-12, "k_p' vs 8 (4/5)^(7/2)");

    let d = design_p(1.0, 2.0, &RootPair::coincident(-7.0).unwrap()).unwrap();
    assert_eq!(d.tau, 0.125, "double-root delay is -1/(a+s1) = 1/8 exactly");
    assert_rel(d.kp, 8.0 * (-7.0f64 / 8.0).exp(), 1e-14, "k_p' vs 8 e^(-7/8)");
    // The double root the design creates is marginally inside the dominance
    // band: tau (a + s1) = -1.
    assert_eq!(
        imid_check(-7.0, -1.0, d.tau).unwrap(),
        MidDominance::StrictlyDominant
    );
}

#[test]
fn p_design_rejects_unreachable_rate() {
    assert!(matches!(
        design_p(1.0, 2.0, &pair(1.5, 0.5)),
        Err(Error::RateUnreachable)
    ));
    assert!(matches!(
        design_p(9.0, 1.0, &RootPair::coincident(-7.0).unwrap()),
        Err(Error::RateUnreachable)
    ));
}

#[test]
fn pd_design_admits_larger_delays_than_p() {
    let tau_pd = tau_star_three(&triple(-7.0, -8.0, -9.0)).unwrap();
    assert_rel(tau_pd, (9.0f64 / 7.0).ln(), 1e-12, "tau* (PD)");
    let tau_p1 = tau_star_pair(&pair(-7.0, -8.0)).unwrap();
    assert_rel(tau_p1, (8.0f64 / 7.0).ln(), 1e-12, "tau* (P, -7,-8)");
    let tau_p2 = tau_star_pair(&pair(-7.0, -9.0)).unwrap();
    assert_rel(tau_p2, 0.5 * (9.0f64 / 7.0).ln(), 1e-12, "tau* (P, -7,-9)");
    assert!(tau_pd > tau_p1 && tau_pd > tau_p2);

    // The synthesized delays order the same way, and the P gain exceeds the
    // PD gain magnitude for the same plant and dominant root.
    let dpd = design_pd(1.0, 2.0, &triple(-7.0, -8.0, -9.0)).unwrap();
    let dp = design_p(1.0, 2.0, &pair(-7.0, -8.0)).unwrap();
    assert!(dpd.tau > dp.tau);
    assert!(dp.kp > (dpd.kp.powi(2) + dpd.kd.powi(2)).sqrt());
}

// ---------------------------------------------------------------------------
// Critical delays.
// ---------------------------------------------------------------------------

#[test]
fn tau_star_examples_and_crossing_signs() {
    let t = tau_star_three(&triple(-1.0, -2.0, -3.0)).unwrap();
    assert_rel(t, 3.0f64.ln(), 1e-12, "tau* equidistributed closed form");

    // Non-equidistributed: the numeric scan must land on the closed form
    // known for this triple.
    let golden = (0.5 * (1.0 + 5.0f64.sqrt())).ln();
    let t = tau_star_three(&triple(-3.0, -4.0, -6.0)).unwrap();
    assert_rel(t, golden, 1e-10, "tau* golden ratio");

    for roots in [
        triple(-1.0, -2.0, -3.0),
        triple(-3.0, -4.0, -6.0),
        triple(-7.0, -8.0, -9.0),
        triple(-0.5, -1.7, -2.4),
    ] {
        let ts = tau_star_three(&roots).unwrap();
        assert!(a_of_tau(&roots, ts).abs() <= 1e-11, "a(tau*) vanishes");
        let h = 1e-5 * ts;
        assert!(a_of_tau(&roots, ts - h) < 0.0, "a < 0 left of tau*");
        assert!(a_of_tau(&roots, ts + h) > 0.0, "a > 0 right of tau*");
    }

    assert!(matches!(
        tau_star_three(&triple(1.0, -1.0, -2.0)),
        Err(Error::NoStabilizingTau)
    ));
    assert!(matches!(
        tau_star_pair(&pair(0.0, -1.0)),
        Err(Error::NoStabilizingTau)
    ));
}

#[test]
fn solve_tau_matches_designed_delays() {
    let s = solve_tau_for_a_detailed(&triple(-5.0, -6.0, -7.0), 1.0).unwrap();
    assert_rel(s.tau, 1.5f64.ln(), 1e-12, "tau for a = 1");
    assert_eq!(s.extra_brackets, 0);

    let s = solve_tau_for_a_detailed(&triple(-7.0, -8.0, -9.0), -1.0).unwrap();
    assert_rel(s.tau, 1.25f64.ln(), 1e-12, "tau for a = -1");
    assert_eq!(s.extra_brackets, 0);

    let golden = (0.5 * (1.0 + 5.0f64.sqrt())).ln();
    let s = solve_tau_for_a_detailed(&triple(-3.0, -4.0, -6.0), 0.0).unwrap();
    assert_rel(s.tau, golden, 1e-10, "tau for a = 0");
    assert_eq!(s.extra_brackets, 0);

    assert!(matches!(
        solve_tau_for_a(&triple(-5.0, -6.0, -7.0), 5.0),
        Err(Error::RateUnreachable)
    ));
}

// ---------------------------------------------------------------------------
// Assignment identities and random residuals.
// ---------------------------------------------------------------------------

#[test]
fn two_root_assignment_closed_forms_at_lambda_zero_and_one() {
    let p = pair(-1.0, -2.0);
    // a = -s1 puts Lambda3 at 0: alpha = -e^(tau s2), beta = s1 e^(tau s2).
    let qp = assign_two_exact(&p, 1.0, 1.0).unwrap();
    assert_rel(qp.alpha, -(-2.0f64).exp(), 1e-14, "alpha at Lambda3 = 0");
    assert_rel(qp.beta, -(-2.0f64).exp(), 1e-14, "beta at Lambda3 = 0");
    // a = -s2 puts Lambda3 at 1: alpha = -e^(tau s1) exactly (the second
    // term of the alpha formula vanishes identically).
    let qp = assign_two_exact(&p, 2.0, 1.0).unwrap();
    assert_eq!(qp.alpha, -(-1.0f64).exp(), "alpha at Lambda3 = 1");
    for (a, s) in [(1.0, -1.0), (1.0, -2.0), (2.0, -1.0), (2.0, -2.0)] {
        let qp = assign_two_exact(&p, a, 1.0).unwrap();
        assert!(qp.eval_delta_real(s).abs() <= 1e-14 * (1.0 + s.abs()));
    }
    assert!(matches!(
        assign_two_exact(&RootPair::coincident(-1.0).unwrap(), 1.0, 1.0),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn assigned_roots_are_spectral_values_across_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x706c_6163);
    for _ in 0..1000 {
        let s1 = rng.gen_range(-6.0..1.5);
        let g1 = rng.gen_range(0.05..2.5);
        let g2 = rng.gen_range(0.05..2.5);
        let tau = rng.gen_range(0.05..1.2);
        let roots = triple(s1, s1 - g1, s1 - g1 - g2);
        let qp = assign_three(&roots, tau).unwrap();
        for s in [roots.s1, roots.s2, roots.s3] {
            let r = qp.eval_delta_real(s).abs();
            assert!(
                r <= 1e-11 * (1.0 + s.abs()),
                "triple residual {r:.3e} at s = {s} (tau = {tau}, roots = {roots:?})"
            );
        }
    }
    for _ in 0..1000 {
        let s1 = rng.gen_range(-6.0..1.5);
        let gap = rng.gen_range(0.05..3.0);
        let a = rng.gen_range(-8.0..8.0);
        let tau = rng.gen_range(0.05..1.5);
        let p = pair(s1, s1 - gap);
        let qp = assign_two_exact(&p, a, tau).unwrap();
        for s in [p.s1, p.s2] {
            let r = qp.eval_delta_real(s).abs();
            assert!(
                r <= 1e-11 * (1.0 + s.abs()),
                "pair residual {r:.3e} at s = {s} (a = {a}, tau = {tau}, pair = {p:?})"
            );
        }
    }
}

#[test]
fn equidistributed_alpha_is_exactly_the_midroot_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9_0d15);
    for _ in 0..200 {
        let s1 = rng.gen_range(-6.0..1.0);
        let d = rng.gen_range(0.05..2.0);
        let tau = rng.gen_range(0.05..1.5);
        let roots = triple(s1, s1 - d, s1 - 2.0 * d);
        let qp = assign_three(&roots, tau).unwrap();
        assert_rel(qp.alpha, (tau * roots.s2).exp(), 1e-12, "alpha vs e^(tau s2)");
    }
}

// ---------------------------------------------------------------------------
// Region classification.
// ---------------------------------------------------------------------------

#[test]
fn region_thresholds_frozen_ordered_and_smooth() {
    let (p1, p2, p3) = region_thresholds(1.0);
    assert_rel(p1, -1.718281828459045, 1e-14, "phi1(1)");
    assert_rel(p2, -1.392211191177333, 1e-14, "phi2(1)");
    assert_rel(p3, -0.581976706869326, 1e-14, "phi3(1)");
    // phi1(u) = -expm1(u) / (e^u (u-1) + 1) has an elementary value at 1:
    // -(e-1)/1 = 1-e.
    assert_rel(p1, 1.0 - std::f64::consts::E, 1e-14, "phi1(1) closed form");

    for u in [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let (p1, p2, p3) = region_thresholds(u);
        assert!(p1 < p2 && p2 < p3 && p3 < 1.0, "ordering fails at u = {u}");
    }

    // The series branch used below u = 1e-3 agrees with the direct
    // formulas evaluated at the same point (mild cancellation there).
    let u = 9e-4;
    let (q1, q2, _) = region_thresholds(u);
    let em1 = u.exp_m1();
    assert_rel(q1, -em1 / ((u - 1.0) * em1 + u), 1e-11, "phi1 series vs direct");
    assert_rel(q2, -u / (em1 - u), 1e-11, "phi2 series vs direct");
}

#[test]
fn classify_examples_locate_the_third_root() {
    let p = pair(-1.0, -2.0);
    // Lambda3 = -1 (a = 0): third root left of s2.
    let label = classify_two_root(&p, 0.0, 1.0).unwrap();
    assert_eq!(label.region, Region::R3);
    assert_eq!(label.boundary_with, None);
    let x = label.x.unwrap();
    assert!(x < -2.0);
    let qp = assign_two_exact(&p, 0.0, 1.0).unwrap();
    assert!(qp.eval_delta_real(x).abs() <= 1e-12 * (1.0 + x.abs()));

    // Lambda3 = 0.5 (a = 1.5): no third real root.
    let label = classify_two_root(&p, 1.5, 1.0).unwrap();
    assert_eq!(label.region, Region::R4);
    assert_eq!(label.x, None);

    // Lambda3 = -2 (a = -1): third root right of s1.
    let label = classify_two_root(&p, -1.0, 1.0).unwrap();
    assert_eq!(label.region, Region::R1);
    let x = label.x.unwrap();
    assert!(x > -1.0);
    let qp = assign_two_exact(&p, -1.0, 1.0).unwrap();
    assert!(qp.eval_delta_real(x).abs() <= 1e-12 * (1.0 + x.abs()));

    assert_eq!(format!("{}", Region::R1), "R1");
    assert_eq!(format!("{}", Region::R5), "R5");
}

#[test]
fn classify_reports_threshold_ties_with_both_labels() {
    let p = pair(-1.0, -2.0);
    let (p1, p2, p3) = region_thresholds(1.0);

    // Lambda3 pinned at each threshold: Lambda3 = (a + s1)/(s1 - s2).
    let label = classify_two_root(&p, p1 + 1.0, 1.0).unwrap();
    assert!(matches!(
        (label.region, label.boundary_with),
        (Region::R1, Some(Region::R2)) | (Region::R2, Some(Region::R1))
    ));
    assert_eq!(label.x, Some(-1.0), "third root collides with s1 at phi1");

    let label = classify_two_root(&p, p2 + 1.0, 1.0).unwrap();
    assert!(matches!(
        (label.region, label.boundary_with),
        (Region::R2, Some(Region::R3)) | (Region::R3, Some(Region::R2))
    ));
    assert_eq!(label.x, Some(-2.0), "third root collides with s2 at phi2");

    let label = classify_two_root(&p, p3 + 1.0, 1.0).unwrap();
    assert!(matches!(
        (label.region, label.boundary_with),
        (Region::R3, Some(Region::R4)) | (Region::R4, Some(Region::R3))
    ));
    assert_eq!(label.x, None, "third root escapes to -inf at phi3");

    let label = classify_two_root(&p, 2.0, 1.0).unwrap();
    assert_eq!(label.region, Region::R5);
    assert_eq!(label.boundary_with, Some(Region::R4));
    assert_eq!(label.x, None);
}

/// Sign-change scan of Delta(t) / ((t-s1)(t-s2)) over [s2-50, s1+50]:
/// deflating the assigned pair leaves exactly the coexisting real roots,
/// robustly even when one sits close to s1 or s2.
fn deflated_real_roots(qp: &NeutralQuasiPoly, s1: f64, s2: f64) -> Vec<f64> {
    let g = |t: f64| qp.eval_delta_real(t) / ((t - s1) * (t - s2));
    let (lo, hi) = (s2 - 50.0, s1 + 50.0);
    let n = 39_989;
    let mut found = Vec::new();
    let mut t_prev = lo;
    let mut g_prev = g(lo);
    for i in 1..=n {
        let t = lo + (hi - lo) * i as f64 / n as f64;
        let g_now = g(t);
        if g_prev.is_finite()
            && g_now.is_finite()
            && g_prev != 0.0
            && g_now != 0.0
            && g_prev.signum() != g_now.signum()
        {
            found.push(bisect(g, t_prev, t));
        }
        t_prev = t;
        g_prev = g_now;
    }
    found
}

#[test]
fn classifier_agrees_with_deflated_sign_scan_and_alpha_ranges() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7265_6769);
    let mut seen = [0usize; 5];
    for iter in 0..400 {
        let s1 = rng.gen_range(-3.0..1.0);
        let delta = rng.gen_range(0.2..2.5);
        let tau = rng.gen_range(0.1..1.2);
        let p = pair(s1, s1 - delta);
        let (p1, p2, p3) = region_thresholds(tau * delta);
        let m1 = 1e-5 * (1.0 + p1.abs());
        let m2 = 1e-5 * (1.0 + p2.abs());
        let m3 = 1e-5 * (1.0 + p3.abs());
        let want = iter % 5;
        let lambda3 = match want {
            0 => rng.gen_range(p1 - 1.5..p1 - m1),
            1 => rng.gen_range(p1 + m1..p2 - m2),
            2 => rng.gen_range(p2 + m2..p3 - m3),
            3 => rng.gen_range(p3 + m3..1.0 - 1e-5),
            _ => rng.gen_range(1.0 + 1e-5..2.5),
        };
        let a = lambda3 * delta - s1;
        let label = classify_two_root(&p, a, tau).unwrap();
        let expected = [Region::R1, Region::R2, Region::R3, Region::R4, Region::R5][want];
        assert_eq!(label.region, expected, "Lambda3 = {lambda3} (u = {})", tau * delta);
        assert_eq!(label.boundary_with, None);
        seen[want] += 1;

        let qp = assign_two_exact(&p, a, tau).unwrap();
        let e1t = (tau * s1).exp();
        match label.region {
            Region::R1 | Region::R2 | Region::R3 => assert!(qp.alpha > 0.0),
            Region::R4 => assert!(-e1t < qp.alpha && qp.alpha < 0.0),
            Region::R5 => assert!(qp.alpha <= -e1t),
        }

        if let Some(x) = label.x {
            // Skip rare draws whose third root leaves the scan window.
            if x > s1 + 49.0 || x < p.s2 - 49.0 {
                continue;
            }
        }
        let scanned = deflated_real_roots(&qp, p.s1, p.s2);
        match label.region {
            Region::R4 | Region::R5 => {
                assert!(scanned.is_empty(), "unexpected extra real root: {scanned:?}")
            }
            _ => {
                let x = label.x.unwrap();
                assert_eq!(scanned.len(), 1, "scan found {scanned:?}, classifier {x}");
                assert!(
                    (scanned[0] - x).abs() <= 1e-6 * (1.0 + x.abs()),
                    "scan {} vs classifier {x}",
                    scanned[0]
                );
                match label.region {
                    Region::R1 => assert!(x > p.s1),
                    Region::R2 => assert!(p.s2 < x && x < p.s1),
                    _ => assert!(x < p.s2),
                }
            }
        }
    }
    assert!(seen.iter().all(|&c| c >= 60), "region coverage {seen:?}");
}

#[test]
fn double_root_dominance_cases() {
    // tau (a + s1) in [-1, 0) is dominant, 0 is the marginal case, outside
    // is not dominant; the -1 endpoint is included, with no tolerance band.
    assert_eq!(imid_check(-1.5, 1.0, 1.0).unwrap(), MidDominance::StrictlyDominant);
    assert_eq!(imid_check(-1.0, 1.0, 1.0).unwrap(), MidDominance::DominantNotStrict);
    assert_eq!(imid_check(-2.5, 1.0, 1.0).unwrap(), MidDominance::NotDominant);
    assert_eq!(imid_check(-2.0, 1.0, 1.0).unwrap(), MidDominance::StrictlyDominant);
    assert_eq!(imid_check(0.3, 0.0, 1.0).unwrap(), MidDominance::NotDominant);
    assert_eq!(
        imid_check(-1.0 - 1e-13, 0.0, 1.0).unwrap(),
        MidDominance::NotDominant
    );
    assert_eq!(
        imid_check(5e-13, 0.0, 1.0).unwrap(),
        MidDominance::DominantNotStrict
    );
}

// ---------------------------------------------------------------------------
// Remaining spectrum.
// ---------------------------------------------------------------------------

#[test]
fn remaining_spectrum_of_equidistributed_triples_sits_on_the_midroot_axis() {
    struct Case {
        roots: RootTriple,
        tau: f64,
        xi_closed: f64,
        omegas: [f64; 3],
    }
    let cases = [
        Case {
            roots: triple(-5.0, -6.0, -7.0),
            tau: 1.5f64.ln(),
            xi_closed: 5.0 * 1.5f64.ln(),
            omegas: [8.980737686774829, 15.446966506137306, 21.805737337452592],
        },
        Case {
            roots: triple(-7.0, -8.0, -9.0),
            tau: 1.25f64.ln(),
            xi_closed: 9.0 * 1.25f64.ln(),
            omegas: [8.984973555533155, 15.449430315855065, 21.807482876001060],
        },
    ];
    for c in &cases {
        let sp = remaining_spectrum_three(&c.roots, c.tau, 3).unwrap();
        assert!(sp.on_axis);
        let axis = sp.axis_re.unwrap();
        assert!((axis - c.roots.s2).abs() <= 1e-12, "axis {axis} vs s2");
        assert_rel(sp.theta, 1.0, 1e-13, "theta");
        assert_rel(sp.xi, c.xi_closed, 1e-12, "xi vs tau coth(tau/2) closed form");
        let qp = assign_three(&c.roots, c.tau).unwrap();
        let big_p = sp.xi * (sp.theta + 1.0) / (2.0 * sp.theta);
        for (k, (&got, &want)) in sp.omegas.iter().zip(&c.omegas).enumerate() {
            assert!((got - want).abs() <= 1e-9, "omega[{k}] {got} vs {want}");
            let lo = (2.0 * (k + 1) as f64 - 1.0) * PI;
            let hi = (2.0 * (k + 1) as f64 + 1.0) * PI;
            assert!(lo < got && got < hi, "omega[{k}] outside its branch");
            assert!(got >= 2.0 * PI, "three-root omegas sit above 2 pi");
            let g = got * (0.5 * got).cos() - big_p * (0.5 * got).sin();
            assert!(g.abs() <= 1e-10 * (1.0 + got + big_p.abs()), "branch residual {g:.3e}");
            // The reported root really is a spectral value of Delta.
            let s = Complex64::new(axis, got / c.tau);
            let r = qp.eval_delta(s).norm();
            assert!(r <= 1e-9 * delta_scale(&qp, s), "Delta residual {r:.3e}");
        }
    }
}

#[test]
fn remaining_spectrum_reports_the_chain_when_off_axis() {
    // Golden-ratio design: theta != 1, so the identity fails and the
    // remaining spectrum is the chain at ln(alpha)/tau.
    let golden = (0.5 * (1.0 + 5.0f64.sqrt())).ln();
    let roots = triple(-3.0, -4.0, -6.0);
    let sp = remaining_spectrum_three(&roots, golden, 3).unwrap();
    assert!(!sp.on_axis);
    assert!(sp.omegas.is_empty());
    assert_rel(sp.theta, 0.5 * (3.0 * 5.0f64.sqrt() - 5.0), 1e-10, "theta vs (3 sqrt5 - 5)/2");
    assert_rel(sp.xi, 4.0 * golden, 1e-10, "xi vs 4 tau");
    assert_rel(sp.axis_re.unwrap(), -4.327724061815445, 1e-10, "chain abscissa");
    let qp = assign_three(&roots, golden).unwrap();
    assert_rel(sp.axis_re.unwrap(), qp.alpha.ln() / golden, 1e-13, "chain vs ln(alpha)/tau");
}

#[test]
fn remaining_spectrum_triple_root_limit() {
    // d -> 0 collapses the branch equation to tan(omega/2) = omega/2, whose
    // first positive root is 8.986818915818128.
    let d = 1e-4;
    let sp = remaining_spectrum_three(&triple(-1.0, -1.0 - d, -1.0 - 2.0 * d), 1.0, 1).unwrap();
    assert!(sp.on_axis);
    assert!((sp.omegas[0] - 8.986818915818128).abs() <= 1e-6);
    assert_rel(sp.xi, 2.0, 1e-8, "xi limit");
}

#[test]
fn remaining_spectrum_two_boundary_retarded_and_generic_cases() {
    let p = pair(-1.0, -2.0);

    // alpha = -e^(tau s1) exactly (a = -s2): remaining roots are the
    // vertical ladder s1 + 2 pi i k / tau.
    let sp = remaining_spectrum_two(&p, 2.0, 1.0, 4).unwrap();
    assert!(sp.on_axis);
    assert_eq!(sp.axis_re, Some(-1.0));
    assert_eq!(sp.xi, 0.0);
    let qp = assign_two_exact(&p, 2.0, 1.0).unwrap();
    for (k, &w) in sp.omegas.iter().enumerate() {
        assert_eq!(w, 2.0 * PI * (k + 1) as f64);
        let s = Complex64::new(-1.0, w);
        let r = qp.eval_delta(s).norm();
        assert!(r <= 1e-12 * delta_scale(&qp, s), "ladder residual {r:.3e}");
    }

    // Retarded locus (Lambda3 = phi3, alpha numerically zero): no chain and
    // no near-axis nonreal spectrum.
    let (_, _, p3) = region_thresholds(1.0);
    let sp = remaining_spectrum_two(&p, p3 + 1.0, 1.0, 3).unwrap();
    assert!(!sp.on_axis);
    assert_eq!(sp.theta, 0.0);
    assert_eq!(sp.axis_re, None);
    assert!(sp.omegas.is_empty());
    assert!(sp.xi > 0.0);

    // Regions with a coexisting third real root are rejected.
    for a in [0.0, -1.0, -0.5] {
        assert!(matches!(
            remaining_spectrum_two(&p, a, 1.0, 3),
            Err(Error::ThirdRealRootPresent)
        ));
    }

    // Generic on-axis R4 instance: the axis identity ln(-theta) =
    // xi (theta-1)/(2 theta) has a crossing in a between 1 and 1.9.
    let h = |a: f64| {
        let qp = assign_two_exact(&p, a, 1.0).unwrap();
        let theta = qp.alpha * (2.0f64).exp();
        let xi = (qp.alpha + (-1.0f64).exp()) / quasipoly::f1(1.0, -1.0, -2.0);
        (-theta).ln() - xi * (theta - 1.0) / (2.0 * theta)
    };
    let a_star = bisect(h, 1.0, 1.9);
    assert_eq!(classify_two_root(&p, a_star, 1.0).unwrap().region, Region::R4);
    let sp = remaining_spectrum_two(&p, a_star, 1.0, 3).unwrap();
    assert!(sp.on_axis, "identity holds at the bisected a");
    let axis = sp.axis_re.unwrap();
    let qp = assign_two_exact(&p, a_star, 1.0).unwrap();
    for (k, &w) in sp.omegas.iter().enumerate() {
        let lo = (2.0 * (k + 1) as f64 - 1.0) * PI;
        let hi = (2.0 * (k + 1) as f64 + 1.0) * PI;
        assert!(lo < w && w < hi, "omega[{k}] outside its branch");
        assert!(w >= PI, "two-root omegas sit above pi");
        let s = Complex64::new(axis, w);
        let r = qp.eval_delta(s).norm();
        assert!(r <= 1e-9 * delta_scale(&qp, s), "R4 axis residual {r:.3e}");
    }

    assert!(matches!(
        remaining_spectrum_two(&p, 2.0, 1.0, 0),
        Err(Error::InvalidInput(_))
    ));
}

// ---------------------------------------------------------------------------
// Exponential envelope constants.
// ---------------------------------------------------------------------------

#[test]
fn exp_estimate_constants_are_certified_envelopes() {
    let designs = [
        design_pd(2.0, 1.0, &triple(-5.0, -6.0, -7.0)).unwrap(),
        design_pd(1.0, 1.0, &triple(-3.0, -4.0, -6.0)).unwrap(),
        design_pd(1.0, 2.0, &triple(-7.0, -8.0, -9.0)).unwrap(),
    ];
    for d in &designs {
        let qp = d.quasipoly().unwrap();
        let est = exp_estimate(&qp, &d.assigned_roots, 0.1).unwrap();
        assert_eq!(est.epsilon, 0.1);
        assert_eq!(est.rate, d.assigned_roots.s1() + 0.1);
        assert!(est.k >= 1.0, "k = {} must dominate the t = 0 value", est.k);
        assert!(est.k0 > 0.0);
        assert!(est.t_cut > 0.0);
    }
}

#[test]
fn exp_estimate_retarded_limit_and_guards() {
    // A proportional design has alpha = 0 exactly: k collapses to 1 + k1.
    let d = design_p(1.0, 2.0, &pair(-7.0, -8.0)).unwrap();
    let qp = d.quasipoly().unwrap();
    assert_eq!(qp.alpha, 0.0);
    let est = exp_estimate(&qp, &d.assigned_roots, 0.1).unwrap();
    assert_eq!(est.k, 1.0 + est.k0);
    assert!(est.k >= 1.0);

    // Beyond the dominance boundary (R5) the contour margin is negative.
    let p = pair(-1.0, -2.0);
    let qp = assign_two_exact(&p, 2.5, 1.0).unwrap();
    assert!(matches!(
        exp_estimate(&qp, &AssignedRoots::Pair(p), 0.1),
        Err(Error::Solver(_))
    ));
    assert!(matches!(
        exp_estimate(&qp, &AssignedRoots::Pair(p), 0.0),
        Err(Error::InvalidInput(_))
    ));
}
