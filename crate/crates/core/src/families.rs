//! Canned perturbation fields: the two worked examples, homogeneous
//! cross-product samples for the corollary checks, sharpness witnesses for
//! the root-count bounds, and the deterministic parameter search used by the
//! verification pipeline.

use num_traits::Zero;
use rand::Rng;

use crate::melnikov::{melnikov_allspheres, trig_moment};
use crate::model::InertiaParams;
use crate::perturbation::{CrossProductSpec, PerturbError, SemisphereSpec, TangentFieldSpec};
use crate::polynomial::{rat, rat_int, rat_from_f64, Poly3, Rat};

/// Substitutes `z -> x3^2` in a `(x1, x2, z)` polynomial.
fn z_to_x3sq(p: &Poly3) -> Poly3 {
    let mut out = Poly3::zero();
    for (e, c) in p.terms() {
        out.add_term([e[0], e[1], 2 * e[2]], c.clone());
    }
    out
}

/// Tangent field from reducible data: `A = x3 P(x1,x2,x3^2)`,
/// `B = x3 Q(x1,x2,x3^2)`, `C = -x1 P - x2 Q`.
pub fn tangent_from_pq(p: &Poly3, q: &Poly3) -> Result<TangentFieldSpec, PerturbError> {
    let a = p.from_z_form();
    let b = q.from_z_form();
    let x1 = Poly3::var(0);
    let x2 = Poly3::var(1);
    let c = x1
        .mul(&z_to_x3sq(p))?
        .add(&x2.mul(&z_to_x3sq(q))?)
        .neg();
    TangentFieldSpec::new(a, b, c)
}

/// The modified stabilization field of the second worked example:
/// `A = -x3 (k - x1 + x1 x3^2)`, `B = x2 x3 (1 + x3^2)`,
/// `C = k x1 + x1^2 (x3^2 - 1) - x2^2 (1 + x3^2)`, i.e. the reducible data
/// `P = -k + x (1 - z)`, `Q = y (1 + z)`.
pub fn example2_field(k: Rat) -> Result<TangentFieldSpec, PerturbError> {
    let mut p = Poly3::constant(-k);
    p.add_term([1, 0, 0], rat_int(1));
    p.add_term([1, 0, 1], rat_int(-1));
    let mut q = Poly3::zero();
    q.add_term([0, 1, 0], rat_int(1));
    q.add_term([0, 1, 1], rat_int(1));
    tangent_from_pq(&p, &q)
}

/// Predicted root of the second example: `h* = 2 alpha beta / (alpha + beta)`.
pub fn example2_root(params: &InertiaParams) -> Rat {
    let (alpha, beta, _) = params.exact_coefficients();
    rat_int(2) * &alpha * &beta / (&alpha + &beta)
}

/// Reducible data of the first worked example: `P = l1 x y^2 z`,
/// `Q = l2 x^2 y z`, the unique contributing monomials of the homogeneous
/// family whose root does not depend on the field.
pub fn example1_field(l1: &Rat, l2: &Rat) -> Result<TangentFieldSpec, PerturbError> {
    let p = Poly3::monomial([1, 2, 1], l1.clone());
    let q = Poly3::monomial([2, 1, 1], l2.clone());
    tangent_from_pq(&p, &q)
}

/// As [`example1_field`] but padded with random monomials of the same
/// homogeneous family that integrate to zero along every oval, keeping the
/// bifurcation function untouched.
pub fn example1_field_padded<R: Rng>(
    l1: &Rat,
    l2: &Rat,
    rng: &mut R,
) -> Result<TangentFieldSpec, PerturbError> {
    // Weighted degree 5 monomials (i + j + 2k = 5) that do not contribute:
    // in P everything without (i odd, j even), in Q without (i even, j odd).
    const P_PAD: [[u32; 3]; 6] = [
        [0, 5, 0],
        [2, 3, 0],
        [4, 1, 0],
        [0, 3, 1],
        [2, 1, 1],
        [0, 1, 2],
    ];
    const Q_PAD: [[u32; 3]; 6] = [
        [5, 0, 0],
        [3, 2, 0],
        [1, 4, 0],
        [3, 0, 1],
        [1, 2, 1],
        [1, 0, 2],
    ];
    let mut p = Poly3::monomial([1, 2, 1], l1.clone());
    let mut q = Poly3::monomial([2, 1, 1], l2.clone());
    for e in P_PAD {
        if rng.gen_bool(0.6) {
            p.add_term(e, rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
        }
    }
    for e in Q_PAD {
        if rng.gen_bool(0.6) {
            q.add_term(e, rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
        }
    }
    tangent_from_pq(&p, &q)
}

/// Root of the field-independent family: `h* = alpha beta c^2 / (beta - alpha)`.
pub fn example1_root(params: &InertiaParams, c: f64) -> Rat {
    let (alpha, beta, _) = params.exact_coefficients();
    let c2 = rat_from_f64(c * c).expect("finite c");
    &alpha * &beta * c2 / (&beta - &alpha)
}

fn random_coeff<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

/// Random homogeneous polynomial of total degree `d`, optionally restricted
/// to even powers of `x3`.
fn random_homogeneous<R: Rng>(d: u32, even_x3: bool, rng: &mut R) -> Poly3 {
    let mut p = Poly3::zero();
    for i in 0..=d {
        for j in 0..=(d - i) {
            let k = d - i - j;
            if even_x3 && k % 2 == 1 {
                continue;
            }
            if rng.gen_bool(0.7) {
                p.add_term([i, j, k], random_coeff(rng));
            }
        }
    }
    p
}

/// Random cross-product data with homogeneous `L, M, N` of degree `m - 1`;
/// the built field is homogeneous of degree `m` and tangent by construction.
pub fn random_homogeneous_cross<R: Rng>(m: u32, rng: &mut R) -> CrossProductSpec {
    CrossProductSpec::new(
        random_homogeneous(m - 1, false, rng),
        random_homogeneous(m - 1, false, rng),
        random_homogeneous(m - 1, false, rng),
    )
}

/// Random cross-product data whose built field has the reducible shape
/// `A = x3 P(x1,x2,x3^2)`, `B = x3 Q(x1,x2,x3^2)`: take `L`, `M` even in
/// `x3` and `N = x3 * Ntilde` with `Ntilde` even, all homogeneous.
pub fn random_reducible_cross<R: Rng>(m: u32, rng: &mut R) -> CrossProductSpec {
    assert!(m >= 2);
    let l = random_homogeneous(m - 1, true, rng);
    let mm = random_homogeneous(m - 1, true, rng);
    let ntilde = random_homogeneous(m - 2, true, rng);
    let n = Poly3::var(2).mul(&ntilde).expect("small degree");
    CrossProductSpec::new(l, mm, n)
}

/// Random `(P, Q)` pair for a single-sphere spec with degree exactly `n` in
/// `(x1, x2)` and light polynomial dependence on the Casimir slot.
pub fn random_semisphere_pq<R: Rng>(n: u32, rng: &mut R) -> (Poly3, Poly3) {
    let mut build = |top_parity_i: u32| {
        let mut p = Poly3::zero();
        for i in 0..=n {
            for j in 0..=(n - i) {
                if rng.gen_bool(0.5) {
                    let k = if rng.gen_bool(0.25) { 1 } else { 0 };
                    p.add_term([i, j, k], random_coeff(rng));
                }
            }
        }
        // Pin the top degree so the spec is genuinely of degree n.
        let i = top_parity_i.min(n);
        if p.degree_xy() != Some(n) {
            p.add_term([i, n - i, 0], rat_int(1));
        }
        p
    };
    (build(1), build(0))
}

/// Single-sphere spec of degree `n <= 7` whose bifurcation function attains
/// the sharp positive-root count: `(n-1)/2` roots for odd `n`, `(n-2)/2` for
/// even `n`, planted at `h = 1, 2, ...`.
pub fn sharpness_witness(n: u32, params: &InertiaParams, c: f64) -> SemisphereSpec {
    assert!((2..=9).contains(&n));
    assert!(params.alpha() > 0.0, "witness construction assumes alpha > 0");
    let k_count = if n % 2 == 1 { (n - 1) / 2 } else { (n - 2) / 2 };
    // Target G(h) = prod_{k=1..K} (h - k), coefficients g_0..g_K.
    let mut g = vec![rat_int(1)];
    for k in 1..=k_count {
        let mut next = vec![Rat::zero(); g.len() + 1];
        for (idx, coeff) in g.iter().enumerate() {
            next[idx + 1] += coeff;
            next[idx] -= coeff * rat_int(k as i64);
        }
        g = next;
    }
    let (alpha, _, _) = params.exact_coefficients();
    let two_over_alpha = rat_int(2) / &alpha;
    let mut p = Poly3::zero();
    for nu in 1..=(k_count + 1) {
        // Monomial x1 x2^{2(nu-1)} feeds r_nu with the factor
        // 2 (2/alpha)^{nu-1} W(2(nu-1), 2).
        let j = 2 * (nu - 1);
        let w = trig_moment(j, 2).rat_pi;
        let mut denom = rat_int(2) * w;
        for _ in 0..(nu - 1) {
            denom *= &two_over_alpha;
        }
        let coeff = &g[(nu - 1) as usize] / denom;
        p.add_term([1, j, 0], coeff);
    }
    if n % 2 == 0 {
        // Keep the stated degree without touching the integral.
        p.add_term([n, 0, 0], rat_int(1));
    }
    SemisphereSpec::new(p, Poly3::zero(), Poly3::zero(), c).expect("positive radius")
}

/// Outcome of the deterministic parameter hunt for the verified example.
#[derive(Debug, Clone)]
pub struct Example2Setup {
    pub params: InertiaParams,
    pub c: f64,
    pub k: Rat,
    pub h_star: f64,
}

/// Scans a small deterministic grid for a parameter set on which the second
/// example passes the admissibility filter with the predicted oval strictly
/// inside the disk, so the return-map verification is well posed.
pub fn example2_admissible_search() -> Option<Example2Setup> {
    let alphas = [0.25, 0.5, 1.0 / 3.0];
    let betas = [-0.5, -1.0, -2.0 / 3.0];
    let mu3s = [1.0, 0.5];
    let cs = [4.0, 5.0, 6.0, 3.0];
    for &alpha in &alphas {
        for &beta in &betas {
            if alpha + beta >= 0.0 {
                continue;
            }
            for &mu3 in &mu3s {
                let Ok(params) = InertiaParams::from_alpha_beta(alpha, beta, mu3) else {
                    continue;
                };
                for &c in &cs {
                    let h_star = 2.0 * params.alpha() * params.beta()
                        / (params.alpha() + params.beta());
                    if h_star <= 0.0 {
                        continue;
                    }
                    let bound =
                        0.5 * c * c * (1.0 / params.mu3() - (-params.alpha()).max(params.beta()));
                    if !(h_star < bound) {
                        continue;
                    }
                    let ax = (-2.0 * h_star / params.beta()).sqrt();
                    let ay = (2.0 * h_star / params.alpha()).sqrt();
                    if ax.max(ay) > 0.8 * c {
                        continue;
                    }
                    let ceiling = crate::model::oval_level_ceiling(&params, c);
                    if h_star > 0.75 * ceiling {
                        continue;
                    }
                    let field = example2_field(rat_int(1)).ok()?;
                    let m = melnikov_allspheres(field.a(), field.b(), &params, c).ok()?;
                    let report = m.admissible_levels().ok()?;
                    let confirmed = report
                        .admissible()
                        .any(|r| r.simple && r.inside_disk && (r.h_star - h_star).abs() < 1e-9);
                    if confirmed {
                        return Some(Example2Setup {
                            params,
                            c,
                            k: rat_int(1),
                            h_star,
                        });
                    }
                }
            }
        }
    }
    None
}

/// The non-tangent control field `(x1, 0, 0)`: its Casimir derivative is
/// `2 x1^2 > 0`, so the drift test has a positive control.
pub fn non_tangent_control() -> (Poly3, Poly3, Poly3) {
    (Poly3::var(0), Poly3::zero(), Poly3::zero())
}
