//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Expected values are either independent oracles computed in this file
//! (Gamma-function moments, periodic-trapezoid quadrature), printed closed
//! forms of the analyzed families, or structural bounds; tolerances are
//! pinned here and nowhere else.

use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use eulertop::families;
use eulertop::melnikov::{
    melnikov_allspheres, melnikov_quadrature, melnikov_semisphere, trig_moment, MelnikovError,
};
use eulertop::model::{
    casimir, hamiltonian, oval_level_ceiling, InertiaParams, State3,
};
use eulertop::perturbation::FieldSpec;
use eulertop::polynomial::{rat, Rat};
use eulertop::verifier::{casimir_drift, find_cycle, integrate, IntegratorConfig};
use eulertop::PerturbedSystem;

fn report(criterion: u32, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

/// Independent oracle: `2 Gamma((i+1)/2) Gamma((j+1)/2) / Gamma((i+j+2)/2)`
/// for even exponents, evaluated exactly through the half-integer Gamma
/// factorials.
fn gamma_moment_rat(i: u32, j: u32) -> Rat {
    let (u, v) = (i / 2, j / 2);
    let fact = |n: u32| -> BigInt {
        let mut f = BigInt::from(1);
        for t in 2..=n {
            f *= t;
        }
        f
    };
    let num = BigInt::from(2) * fact(2 * u) * fact(2 * v);
    let den = BigInt::from(4).pow(u + v) * fact(u) * fact(v) * fact(u + v);
    Rat::new(num, den)
}

/// Independent oracle: periodic trapezoid quadrature of `sin^i cos^j`.
fn quadrature_moment(i: u32, j: u32) -> f64 {
    let n = 8192;
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            t.sin().powi(i as i32) * t.cos().powi(j as i32)
        })
        .sum::<f64>()
        * 2.0
        * PI
        / n as f64
}

#[test]
fn criterion_1_moment_table() {
    let start = Instant::now();
    let mut checked = 0usize;
    for i in 0..=12u32 {
        for j in 0..=12u32 {
            let m = trig_moment(i, j);
            if i % 2 == 1 || j % 2 == 1 {
                assert!(m.rat_pi.is_zero(), "odd moment ({i},{j}) must vanish");
            } else {
                assert_eq!(
                    m.rat_pi,
                    gamma_moment_rat(i, j),
                    "rational part mismatch at ({i},{j})"
                );
            }
            let quad = quadrature_moment(i, j);
            assert!(
                (quad - m.value()).abs() <= 1e-12,
                "quadrature disagreement at ({i},{j}): {quad} vs {}",
                m.value()
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        elapsed.as_secs_f64() < 1.0,
        &format!(
            "{checked} moments match the Gamma formula exactly and quadrature to 1e-12 in {:.3}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_odd_homogeneous_fields_vanish() {
    let start = Instant::now();
    let params = InertiaParams::new(3.0, 2.0, 1.0).unwrap();
    let c = 1.0;
    let ceiling = oval_level_ceiling(&params, c);
    let mut rng = StdRng::seed_from_u64(20_20);
    let mut fields = 0usize;
    for m_deg in [3u32, 5] {
        for _ in 0..20 {
            let spec = families::random_reducible_cross(m_deg, &mut rng);
            let t = spec.build().unwrap();
            let mp = melnikov_allspheres(t.a(), t.b(), &params, c).unwrap();
            assert!(
                mp.rational_coeffs().iter().all(|r| r.is_zero()),
                "degree {m_deg} field has nonzero rational coefficients"
            );
            let field = FieldSpec::cross_product(spec).unwrap();
            for k in 1..=10 {
                let h = 0.9 * ceiling * k as f64 / 10.0;
                let i_quad = melnikov_quadrature(&field, &params, c, h, 1e-10).unwrap();
                assert!(
                    i_quad.abs() <= 1e-9,
                    "degree {m_deg}: |I({h})| = {} exceeds 1e-9",
                    i_quad.abs()
                );
            }
            fields += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        elapsed.as_secs_f64() < 10.0,
        &format!(
            "{fields} homogeneous degree-3/5 fields integrate to exactly zero ({:.2}s)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_field_independent_root_and_lambda() {
    // The admissible branch of the field-independent family: alpha + beta > 0
    // with mu3 below (beta - alpha)/(beta (alpha + beta)).
    let params = InertiaParams::from_alpha_beta(0.5, -0.25, 1.0).unwrap();
    let c = 1.25;
    let (alpha, beta) = (params.alpha(), params.beta());
    let h_expect = alpha * beta * c * c / (beta - alpha);
    let mut rng = StdRng::seed_from_u64(30_30);
    let mut roots = Vec::new();
    for trial in 0..5 {
        // lambda1 beta != lambda2 alpha, checked exactly below.
        let (l1, l2) = loop {
            let l1 = rat(rng.gen_range(1..9), rng.gen_range(1..4));
            let l2 = rat(rng.gen_range(-9..-1), rng.gen_range(1..4));
            let (ar, br, _) = params.exact_coefficients();
            if &l1 * &br != &l2 * &ar {
                break (l1, l2);
            }
        };
        let t = families::example1_field_padded(&l1, &l2, &mut rng).unwrap();
        let m = melnikov_allspheres(t.a(), t.b(), &params, c).unwrap();
        let found = m.body_roots().unwrap();
        assert_eq!(found.len(), 1, "trial {trial}: expected a unique positive root");
        let h = found[0].h;
        assert!(
            (h - h_expect).abs() <= 1e-10 * h_expect.abs(),
            "trial {trial}: root {h} vs {h_expect}"
        );
        assert!(found[0].simple);
        roots.push(h);

        // lambda from the quadratic coefficient of I = lambda h^2 (alpha beta
        // c^2 + (alpha - beta) h).
        let r = m.rational_coeffs();
        let lambda_computed =
            m.scale() * r[2].to_f64().unwrap() / (alpha * beta * c * c);
        let lambda_printed = PI
            * (l1.to_f64().unwrap() * beta - l2.to_f64().unwrap() * alpha)
            / (-alpha * beta).powf(2.5);
        assert!(
            (lambda_computed - lambda_printed).abs() <= 1e-10 * lambda_printed.abs(),
            "trial {trial}: lambda {lambda_computed} vs printed {lambda_printed}"
        );
        // Admissibility of the root under the printed filter.
        let rep = m.admissible_levels().unwrap();
        assert!(rep.roots.iter().any(|r| r.admissible));
    }
    let spread = roots
        .iter()
        .fold(0.0f64, |acc, &h| acc.max((h - roots[0]).abs()));
    report(
        3,
        spread <= 1e-10 * h_expect.abs(),
        &format!(
            "5 random fields share the root {h_expect:.12} (spread {spread:.2e}); lambda matches the printed formula"
        ),
    );
}

#[test]
fn criterion_4_verified_example() {
    let start = Instant::now();
    // Parameter set found automatically by scanning the admissibility filter.
    let setup = families::example2_admissible_search().expect("admissible parameter set");
    let params = setup.params;
    let field = families::example2_field(setup.k.clone()).unwrap();
    let m = melnikov_allspheres(field.a(), field.b(), &params, setup.c).unwrap();

    // I(h)/h linear in h with root 2 alpha beta / (alpha + beta).
    assert_eq!(m.rational_coeffs().len(), 3, "I/h must be linear");
    let h_root = 2.0 * params.alpha() * params.beta() / (params.alpha() + params.beta());
    let roots = m.body_roots().unwrap();
    assert_eq!(roots.len(), 1);
    assert!(
        (roots[0].h - h_root).abs() <= 1e-10 * h_root.abs(),
        "root {} vs closed form {h_root}",
        roots[0].h
    );
    let rep = m.admissible_levels().unwrap();
    let admissible_simple = rep
        .roots
        .iter()
        .filter(|r| r.admissible && r.simple)
        .count();
    assert_eq!(admissible_simple, 1);

    // Confirm exactly one cycle at each epsilon; the cycle's level deviation
    // from the invariant oval must shrink at first order. The printed field
    // is reversible about the section axis, so the section level converges
    // quadratically; the first-order rate shows in the level spread across
    // the two transverse crossings, which is odd in epsilon.
    let cfg = IntegratorConfig::with_tol(1e-12, 1e-14);
    let mut spreads = Vec::new();
    let mut h_section_errors = Vec::new();
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let sys = PerturbedSystem::new(params, FieldSpec::Tangent(field.clone()), eps);
        let cycle = find_cycle(&sys, setup.c, setup.h_star, &cfg).unwrap();
        let (h_up, h_lo) = cycle.h_transverse;
        spreads.push(0.5 * (h_up - h_lo).abs());
        h_section_errors.push((cycle.h_num - setup.h_star).abs());

        // Uniqueness on the leaf: starts spanning the annulus either fail or
        // land on the same cycle.
        if eps == 1e-2 {
            let mut found = vec![cycle.x_star];
            for factor in [0.25, 0.5, 0.75, 1.3, 1.6] {
                if let Ok(other) = find_cycle(&sys, setup.c, factor * setup.h_star, &cfg) {
                    found.push(other.x_star);
                }
            }
            let distinct = found
                .iter()
                .fold(0.0f64, |acc, &x| acc.max((x - found[0]).abs()));
            assert!(
                distinct <= 1e-6 * setup.c,
                "multiple cycles located: spread {distinct}"
            );
        }
    }
    // Section level converges (quadratically, so strictly decreasing).
    assert!(h_section_errors[0] > h_section_errors[1]);
    assert!(h_section_errors[1] > h_section_errors[2]);
    let mut ok = true;
    let mut detail = String::new();
    for pair in spreads.windows(2) {
        let ratio = pair[0] / pair[1];
        detail.push_str(&format!("ratio {ratio:.3} "));
        ok &= (1.6..=2.4).contains(&ratio);
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 60.0;
    report(
        4,
        ok,
        &format!(
            "one cycle confirmed at each epsilon; level deviation halves per halving ({detail}) in {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_root_count_bounds_and_sharpness() {
    let params = InertiaParams::new(3.0, 2.0, 1.0).unwrap();
    let c = 1.5;
    let mut rng = StdRng::seed_from_u64(50_50);
    let mut checked = 0usize;
    for trial in 0..200 {
        let n = rng.gen_range(2..=9u32);
        let bound = if n % 2 == 1 { (n - 1) / 2 } else { (n - 2) / 2 } as usize;
        let (p, q) = families::random_semisphere_pq(n, &mut rng);
        let m = melnikov_semisphere(&p, &q, &params, c);
        let count = match m.body_roots() {
            Ok(roots) => roots.len(),
            Err(MelnikovError::IdenticallyZero) => 0,
            Err(e) => panic!("unexpected error: {e}"),
        };
        assert!(
            count <= bound,
            "trial {trial}: degree {n} spec has {count} roots > bound {bound}"
        );
        checked += 1;
    }
    // Sharpness witnesses for every degree up to 7.
    for n in 2..=7u32 {
        let bound = if n % 2 == 1 { (n - 1) / 2 } else { (n - 2) / 2 } as usize;
        let spec = families::sharpness_witness(n, &params, 10.0);
        let m = melnikov_semisphere(&spec.p, &spec.q, &params, spec.c);
        let roots = m.body_roots().unwrap();
        assert_eq!(
            roots.len(),
            bound,
            "degree {n} witness must attain the bound {bound}"
        );
        for (idx, r) in roots.iter().enumerate() {
            assert!(r.simple, "witness root {idx} must be simple");
        }
    }
    report(
        5,
        true,
        &format!("{checked} random specs respect the count bound; witnesses attain it for n = 2..7"),
    );
}

#[test]
fn criterion_6_closed_form_matches_quadrature() {
    let start = Instant::now();
    let mut pairs = 0usize;

    let mut check_spec =
        |field: &FieldSpec, params: &InertiaParams, c: f64, closed: &dyn Fn(f64) -> f64| {
            let ceiling = oval_level_ceiling(params, c);
            let sign = params.alpha().signum();
            for k in 0..20 {
                // 20 log-spaced levels across two decades of the oval range.
                let u = 0.9 * ceiling * 10f64.powf(-2.0 * (19 - k) as f64 / 19.0);
                let h = sign * u;
                let i_closed = closed(h);
                // Absolute quadrature tolerance, scaled to the integral size.
                let tol = 1e-10 * (1.0 + i_closed.abs());
                let i_quad = melnikov_quadrature(field, params, c, h, tol).unwrap();
                let scale = i_closed.abs().max(i_quad.abs());
                assert!(
                    (i_closed - i_quad).abs() <= 1e-8 * scale + 1e-9,
                    "closed {i_closed} vs quadrature {i_quad} at h = {h}"
                );
                pairs += 1;
            }
        };

    // Criterion-2 population (identically zero).
    let params = InertiaParams::new(3.0, 2.0, 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(20_20);
    for m_deg in [3u32, 5] {
        for _ in 0..20 {
            let spec = families::random_reducible_cross(m_deg, &mut rng);
            let t = spec.build().unwrap();
            let m = melnikov_allspheres(t.a(), t.b(), &params, 1.0).unwrap();
            let field = FieldSpec::cross_product(spec).unwrap();
            check_spec(&field, &params, 1.0, &|h| m.eval(h));
        }
    }

    // Criterion-3 population.
    let params3 = InertiaParams::from_alpha_beta(0.5, -0.25, 1.0).unwrap();
    let mut rng = StdRng::seed_from_u64(30_30);
    for _ in 0..5 {
        let l1 = rat(rng.gen_range(1..9), rng.gen_range(1..4));
        let l2 = rat(rng.gen_range(-9..-1), rng.gen_range(1..4));
        let t = families::example1_field_padded(&l1, &l2, &mut rng).unwrap();
        let m = melnikov_allspheres(t.a(), t.b(), &params3, 1.25).unwrap();
        let field = FieldSpec::Tangent(t);
        check_spec(&field, &params3, 1.25, &|h| m.eval(h));
    }

    // Criterion-4 spec.
    let setup = families::example2_admissible_search().unwrap();
    let t = families::example2_field(setup.k.clone()).unwrap();
    let m = melnikov_allspheres(t.a(), t.b(), &setup.params, setup.c).unwrap();
    let field = FieldSpec::Tangent(t);
    check_spec(&field, &setup.params, setup.c, &|h| m.eval(h));

    // Criterion-5 population plus all witnesses.
    let mut rng = StdRng::seed_from_u64(50_50);
    let params5 = InertiaParams::new(3.0, 2.0, 1.0).unwrap();
    for _trial in 0..200 {
        let n = rng.gen_range(2..=9u32);
        let (p, q) = families::random_semisphere_pq(n, &mut rng);
        let spec =
            eulertop::perturbation::SemisphereSpec::new(p.clone(), q.clone(), Default::default(), 1.5)
                .unwrap();
        let m = melnikov_semisphere(&p, &q, &params5, 1.5);
        let field = FieldSpec::Semisphere(spec);
        check_spec(&field, &params5, 1.5, &|h| m.eval(h));
    }
    for n in 2..=7u32 {
        let spec = families::sharpness_witness(n, &params5, 4.0);
        let m = melnikov_semisphere(&spec.p, &spec.q, &params5, spec.c);
        let field = FieldSpec::Semisphere(spec);
        check_spec(&field, &params5, 4.0, &|h| m.eval(h));
    }

    report(
        6,
        true,
        &format!(
            "{pairs} (spec, level) pairs agree within 1e-8 relative ({:.1}s)",
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_invariance_suite() {
    let cfg = IntegratorConfig::default();
    let s0 = State3::new(0.6, 0.0, 0.8);

    // Tangent spec: the printed stabilization-style field.
    let params = InertiaParams::new(2.0, 4.0 / 3.0, 1.0).unwrap();
    let t = families::example2_field(eulertop::polynomial::rat_int(1)).unwrap();
    let sys = PerturbedSystem::new(params, FieldSpec::Tangent(t), 0.1);
    let drift_tangent = casimir_drift(&sys, &s0, 100.0, &cfg).unwrap();
    assert!(drift_tangent <= 1e-9, "tangent drift {drift_tangent}");

    // Cross-product specs.
    let mut rng = StdRng::seed_from_u64(70_70);
    let mut drift_cross_max = 0.0f64;
    for m_deg in [3u32, 4] {
        let spec = families::random_reducible_cross(m_deg, &mut rng);
        let field = FieldSpec::cross_product(spec).unwrap();
        let sys = PerturbedSystem::new(params, field, 0.1);
        let drift = casimir_drift(&sys, &s0, 100.0, &cfg).unwrap();
        drift_cross_max = drift_cross_max.max(drift);
    }
    assert!(
        drift_cross_max <= 1e-9,
        "cross-product drift {drift_cross_max}"
    );

    // Deliberately non-tangent control field (x1, 0, 0).
    let eps = 0.1;
    let control = |y: &[f64; 3]| {
        let s = State3::from_array(*y);
        let base = eulertop::model::euler_field(&params, &s);
        [base.x1 + eps * s.x1, base.x2, base.x3]
    };
    let d0 = s0.norm_sq();
    let traj = integrate(control, s0.as_array(), 10.0, &cfg).unwrap();
    let drift_control = traj
        .y
        .iter()
        .map(|y| (State3::from_array(*y).norm_sq() - d0).abs())
        .fold(0.0f64, f64::max);
    assert!(drift_control > 1e-3, "control drift {drift_control}");

    report(
        7,
        true,
        &format!(
            "tangent drift {drift_tangent:.2e}, cross drift {drift_cross_max:.2e}, control drift {drift_control:.2e}"
        ),
    );
}

#[test]
fn criterion_8_unperturbed_conservation() {
    let cfg = IntegratorConfig::default();
    let mut rng = StdRng::seed_from_u64(80_80);
    let mut worst_h = 0.0f64;
    let mut worst_d = 0.0f64;
    for _ in 0..10 {
        let params = loop {
            let mu = [
                rng.gen_range(0.4..3.0),
                rng.gen_range(0.4..3.0),
                rng.gen_range(0.4..3.0),
            ];
            if let Ok(p) = InertiaParams::new(mu[0], mu[1], mu[2]) {
                break p;
            }
        };
        let s0 = State3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let h0 = hamiltonian(&params, &s0);
        let d0 = casimir(&s0);
        let f = |y: &[f64; 3]| {
            let s = State3::from_array(*y);
            eulertop::model::euler_field(&params, &s).as_array()
        };
        let traj = integrate(f, s0.as_array(), 100.0, &cfg).unwrap();
        for y in &traj.y {
            let s = State3::from_array(*y);
            worst_h = worst_h.max((hamiltonian(&params, &s) - h0).abs());
            worst_d = worst_d.max((casimir(&s) - d0).abs());
        }
    }
    let ok = worst_h <= 1e-9 && worst_d <= 1e-9;
    report(
        8,
        ok,
        &format!("worst H drift {worst_h:.2e}, worst D drift {worst_d:.2e} over t in [0, 100]"),
    );
}
