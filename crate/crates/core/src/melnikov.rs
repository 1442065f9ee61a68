//! First-order Poincare-Pontryagin analysis of the perturbed top.
//!
//! On the sphere of radius `c` the reduced system is a perturbation of the
//! planar center `H(x,y) = (alpha y^2 - beta x^2)/2`, whose ovals are the
//! ellipses `x = a cos(t), y = b sin(t)` with `a^2 = -2h/beta`,
//! `b^2 = 2h/alpha`. The bifurcation function is the line integral of the
//! perturbation data along those ovals; for polynomial data it collapses to
//! a finite combination of the moments `int sin^i cos^j dt`, which vanish
//! unless both exponents are even and are otherwise rational multiples of
//! pi. Everything up to a single common factor `pi / sqrt(-alpha beta)` is
//! therefore exact rational arithmetic, and is kept that way.

use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::PI;
use thiserror::Error;

use crate::model::{energy_from_level, oval_level_ceiling, InertiaParams};
use crate::perturbation::FieldSpec;
use crate::polynomial::{
    isolate_positive_roots, positive_roots_rational, rat_from_f64, rat_int, Poly3, PolyError, Rat,
    RootInfo, SqrtPoly,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MelnikovError {
    #[error("I(h) is identically zero; the first-order method is inconclusive")]
    IdenticallyZero,
    #[error("field is not of the reducible form x3 P(x1,x2,x3^2): {0}; use the quadrature path")]
    NotReducible(String),
    #[error("oval at h = {h} has semiaxes ({a}, {b}) not strictly inside the disk of radius {c}")]
    QuadratureDomain { h: f64, a: f64, b: f64, c: f64 },
    #[error("quadrature failed to reach tolerance {requested}; achieved {achieved}")]
    QuadratureNonConvergence { requested: f64, achieved: f64 },
    #[error("no oval levels available for bracketing (ceiling {0})")]
    EmptyLevelRange(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

// ---------------------------------------------------------------------------
// Trigonometric moments
// ---------------------------------------------------------------------------

/// Exact value of `int_0^{2pi} sin^i cos^j dt` as a rational multiple of pi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigMoment {
    pub i: u32,
    pub j: u32,
    /// The rational part; the moment is `rat_pi * pi`.
    pub rat_pi: Rat,
}

impl TrigMoment {
    pub fn value(&self) -> f64 {
        self.rat_pi.to_f64().unwrap() * PI
    }
}

/// Computes the moment by the double-factorial recurrence
/// `W(i,j) = W(i-2,j) (i-1)/(i+j)` (and symmetrically in `j`), seeded by
/// `W(0,0) = 2 pi`. Odd exponents vanish.
pub fn trig_moment(i: u32, j: u32) -> TrigMoment {
    TrigMoment {
        i,
        j,
        rat_pi: wr(i, j),
    }
}

/// Rational part of the moment (`W(i,j) / pi`).
fn wr(i: u32, j: u32) -> Rat {
    if i % 2 == 1 || j % 2 == 1 {
        return Rat::zero();
    }
    let mut value = rat_int(2);
    let mut ci = 0u32;
    let mut cj = 0u32;
    while cj + 2 <= j {
        value *= Rat::new((cj + 1).into(), (ci + cj + 2).into());
        cj += 2;
    }
    while ci + 2 <= i {
        value *= Rat::new((ci + 1).into(), (ci + cj + 2).into());
        ci += 2;
    }
    value
}

fn binomial(n: u32, k: u32) -> Rat {
    let mut v = Rat::one();
    for t in 0..k {
        v *= Rat::new((n - t).into(), (t + 1).into());
    }
    v
}

// ---------------------------------------------------------------------------
// Closed-form I(h)
// ---------------------------------------------------------------------------

/// Which perturbation family produced the function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Single preserved sphere; `I(h) = sqrt(h) M_n(h)` with `M_n` odd in
    /// `sqrt(h)`.
    Semisphere,
    /// All spheres preserved with `A = x3 P(x1,x2,x3^2)`;
    /// `I(h) = h M_{n-1}(h)` with `M_{n-1}` polynomial in `h`.
    AllSpheres,
}

/// Overall prefactor pulled out of the body polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    SqrtH,
    H,
}

/// `I(h)` in closed form.
///
/// Internally `I(h) = scale * sign(h) * R(h)` where `R` is a polynomial with
/// exact rational coefficients (in the original parameters, valid for either
/// sign of `alpha`) and `scale = pi / sqrt(-alpha beta)`. Ovals live on the
/// side `alpha h > 0`; the float `body` is expressed in `u = |h|` on that
/// side, so its parity structure matches the printed normal forms.
#[derive(Debug, Clone)]
pub struct MelnikovPoly {
    family: Family,
    factor: Factor,
    body: SqrtPoly,
    rat_coeffs: Vec<Rat>,
    scale: f64,
    params: InertiaParams,
    c: f64,
}

impl MelnikovPoly {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn factor(&self) -> Factor {
        self.factor
    }

    /// Float body: `M_n` (odd in `s = sqrt(u)`) for the semisphere family,
    /// `M_{n-1}` (even in `s`, i.e. a polynomial in `u`) for the all-spheres
    /// family, with `u = alpha h / |alpha|`.
    pub fn body(&self) -> &SqrtPoly {
        &self.body
    }

    /// Exact rational coefficients of `R(h)`; index = power of `h`, constant
    /// term always zero.
    pub fn rational_coeffs(&self) -> &[Rat] {
        &self.rat_coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn params(&self) -> &InertiaParams {
        &self.params
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.rat_coeffs.iter().all(|r| r.is_zero())
    }

    /// Evaluates `I(h)`. The overall sign follows the oval parameterization
    /// `(a cos t, b sin t)`; zero sets are orientation-independent.
    pub fn eval(&self, h: f64) -> f64 {
        let mut r = 0.0;
        for coeff in self.rat_coeffs.iter().rev() {
            r = r * h + coeff.to_f64().unwrap();
        }
        self.scale * h.signum() * r
    }

    /// Coefficients of `R(|h|)` on the physical side `alpha h > 0`.
    fn side_coeffs(&self) -> Vec<Rat> {
        let flip = self.params.alpha() < 0.0;
        self.rat_coeffs
            .iter()
            .enumerate()
            .map(|(k, r)| {
                if flip && k % 2 == 1 {
                    -r.clone()
                } else {
                    r.clone()
                }
            })
            .collect()
    }

    /// Positive roots of the body in the level magnitude `u = |h|`, isolated
    /// exactly and polished in floats. Identically zero input is refused.
    pub fn body_roots(&self) -> Result<Vec<RootInfo>, MelnikovError> {
        if self.is_zero() {
            return Err(MelnikovError::IdenticallyZero);
        }
        let side = self.side_coeffs();
        // G(u) = R_side(u) / u.
        let g: Vec<Rat> = side.into_iter().skip(1).collect();
        let max_coeff = g
            .iter()
            .map(|r| r.to_f64().unwrap().abs())
            .fold(0.0f64, f64::max);
        let report = positive_roots_rational(&g, 1e-9 * max_coeff);
        Ok(report.roots)
    }

    /// Predicted bifurcation levels with the admissibility filter applied.
    pub fn admissible_levels(&self) -> Result<BifurcationReport, MelnikovError> {
        let roots = self.body_roots()?;
        let sign = self.params.alpha().signum();
        let entries = roots
            .into_iter()
            .map(|r| {
                let h_star = sign * r.h;
                classify_root(
                    &self.params,
                    self.c,
                    h_star,
                    r.simple,
                    self.scale * r.deriv_mag,
                    r.borderline,
                )
            })
            .collect();
        Ok(BifurcationReport {
            c: self.c,
            mu3: self.params.mu3(),
            method: Method::ClosedForm,
            roots: entries,
        })
    }
}

fn classify_root(
    params: &InertiaParams,
    c: f64,
    h_star: f64,
    simple: bool,
    deriv_mag: f64,
    borderline: bool,
) -> BifurcationRoot {
    let alpha = params.alpha();
    let beta = params.beta();
    let half_c2 = 0.5 * c * c;
    let inv_mu3 = 1.0 / params.mu3();
    let sign_ok = alpha * h_star > 0.0;
    let bound_ok = if alpha > 0.0 {
        h_star < half_c2 * (inv_mu3 - (-alpha).max(beta))
    } else {
        h_star > half_c2 * (inv_mu3 - (-alpha).min(beta))
    };
    let semiaxis_x = (-2.0 * h_star / beta).max(0.0).sqrt();
    let semiaxis_y = (2.0 * h_star / alpha).max(0.0).sqrt();
    let inside_disk = semiaxis_x.max(semiaxis_y) < c;
    let admissible = sign_ok && bound_ok;
    let reason = if admissible {
        String::new()
    } else if !sign_ok {
        "alpha*h <= 0".to_string()
    } else {
        "level bound violated".to_string()
    };
    BifurcationRoot {
        h_star,
        h_bar: energy_from_level(params, c, h_star),
        admissible,
        simple,
        deriv_mag,
        borderline,
        semiaxis_x,
        semiaxis_y,
        inside_disk,
        reason,
    }
}

/// One predicted level.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationRoot {
    pub h_star: f64,
    /// Energy of the orbit on the sphere: `c^2/(2 mu3) - h_star`.
    pub h_bar: f64,
    pub admissible: bool,
    pub simple: bool,
    pub deriv_mag: f64,
    pub borderline: bool,
    pub semiaxis_x: f64,
    pub semiaxis_y: f64,
    /// Whether the oval actually fits inside the open disk; the printed
    /// admissibility bound does not imply this, and the verifier can only
    /// confirm cycles whose oval does.
    pub inside_disk: bool,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// Predicted bifurcation levels for one spec on one sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationReport {
    pub c: f64,
    pub mu3: f64,
    pub method: Method,
    pub roots: Vec<BifurcationRoot>,
}

impl BifurcationReport {
    pub fn admissible(&self) -> impl Iterator<Item = &BifurcationRoot> {
        self.roots.iter().filter(|r| r.admissible)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("h_star,h_bar,admissible,simple,reason\n");
        for r in &self.roots {
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{},{}\n",
                r.h_star,
                r.h_bar,
                r.admissible,
                r.simple,
                if r.reason.is_empty() { "ok" } else { &r.reason }
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "bifurcation report (c = {}, mu3 = {}, method = {})\n",
            self.c,
            self.mu3,
            match self.method {
                Method::ClosedForm => "closed form",
                Method::Quadrature => "quadrature",
            }
        );
        if self.roots.is_empty() {
            out.push_str("  no positive roots of I\n");
        }
        for r in &self.roots {
            out.push_str(&format!(
                "  h* = {:+.12e}  hbar* = {:+.12e}  admissible = {:5}  simple = {:5}  semiaxes = ({:.6}, {:.6}){}{}\n",
                r.h_star,
                r.h_bar,
                r.admissible,
                r.simple,
                r.semiaxis_x,
                r.semiaxis_y,
                if r.inside_disk { "" } else { "  [oval outside disk]" },
                if r.reason.is_empty() {
                    String::new()
                } else {
                    format!("  [{}]", r.reason)
                }
            ));
        }
        out
    }
}

/// Closed-form `I(h)` for the single-sphere family: integrates
/// `P(x,y,c^2) dy - Q(x,y,c^2) dx` along the ovals term by term.
/// `p` and `q` are polynomials in `(x1, x2, z)`.
pub fn melnikov_semisphere(
    p: &Poly3,
    q: &Poly3,
    params: &InertiaParams,
    c: f64,
) -> MelnikovPoly {
    let c2 = rat_from_f64(c * c).expect("finite c");
    let p2 = p.subst_slot2_const(&c2);
    let q2 = q.subst_slot2_const(&c2);
    let (alpha, beta, _) = params.exact_coefficients();
    let neg_two_over_beta = rat_int(-2) / &beta;
    let two_over_alpha = rat_int(2) / &alpha;

    let deg = p2.degree().max(q2.degree()).unwrap_or(0) as usize;
    let mut r = vec![Rat::zero(); deg / 2 + 2];

    for (e, coeff) in p2.terms() {
        let (i, j) = (e[0], e[1]);
        if i % 2 == 1 && j % 2 == 0 {
            let nu = ((i + j + 1) / 2) as usize;
            let term = coeff
                * pow_rat(&neg_two_over_beta, (i - 1) / 2)
                * pow_rat(&two_over_alpha, j / 2)
                * rat_int(2)
                * wr(j, i + 1);
            grow_add(&mut r, nu, term);
        }
    }
    for (e, coeff) in q2.terms() {
        let (i, j) = (e[0], e[1]);
        if i % 2 == 0 && j % 2 == 1 {
            let nu = ((i + j + 1) / 2) as usize;
            let term = coeff
                * pow_rat(&neg_two_over_beta, i / 2)
                * pow_rat(&two_over_alpha, (j - 1) / 2)
                * rat_int(2)
                * wr(j + 1, i);
            grow_add(&mut r, nu, term);
        }
    }
    finish_poly(r, Family::Semisphere, params, c)
}

/// Closed-form `I(h)` for the all-spheres family. Requires
/// `A = x3 P(x1,x2,x3^2)` and `B = x3 Q(x1,x2,x3^2)`; on the oval the third
/// argument becomes `c^2 + 2h (cos^2/beta - sin^2/alpha)`, which is expanded
/// exactly.
pub fn melnikov_allspheres(
    a: &Poly3,
    b: &Poly3,
    params: &InertiaParams,
    c: f64,
) -> Result<MelnikovPoly, MelnikovError> {
    let p = a
        .to_z_form()
        .map_err(|e| MelnikovError::NotReducible(format!("A: {e}")))?;
    let q = b
        .to_z_form()
        .map_err(|e| MelnikovError::NotReducible(format!("B: {e}")))?;
    Ok(melnikov_allspheres_pq(&p, &q, params, c))
}

/// Same as [`melnikov_allspheres`] with `P`, `Q` already extracted.
pub fn melnikov_allspheres_pq(
    p: &Poly3,
    q: &Poly3,
    params: &InertiaParams,
    c: f64,
) -> MelnikovPoly {
    let c2 = rat_from_f64(c * c).expect("finite c");
    let (alpha, beta, _) = params.exact_coefficients();
    let neg_two_over_beta = rat_int(-2) / &beta;
    let two_over_alpha = rat_int(2) / &alpha;
    let inv_beta = Rat::one() / &beta;
    let inv_alpha = Rat::one() / &alpha;

    let max_pow = {
        let d = |poly: &Poly3| {
            poly.terms()
                .map(|(e, _)| ((e[0] + e[1] + 1) / 2 + e[2]) as usize)
                .max()
                .unwrap_or(0)
        };
        d(p).max(d(q))
    };
    let mut r = vec![Rat::zero(); max_pow + 2];

    let mut accumulate = |is_p: bool, e: &[u32; 3], coeff: &Rat| {
        let (i, j, k) = (e[0], e[1], e[2]);
        let contributes = if is_p {
            i % 2 == 1 && j % 2 == 0
        } else {
            i % 2 == 0 && j % 2 == 1
        };
        if !contributes {
            return;
        }
        let nu0 = ((i + j + 1) / 2) as usize;
        let base = if is_p {
            coeff
                * pow_rat(&neg_two_over_beta, (i - 1) / 2)
                * pow_rat(&two_over_alpha, j / 2)
                * rat_int(2)
        } else {
            coeff
                * pow_rat(&neg_two_over_beta, i / 2)
                * pow_rat(&two_over_alpha, (j - 1) / 2)
                * rat_int(2)
        };
        for m in 0..=k {
            for l in 0..=m {
                let (sin_extra, cos_extra) = (2 * (m - l), 2 * l);
                let moment = if is_p {
                    wr(j + sin_extra, i + 1 + cos_extra)
                } else {
                    wr(j + 1 + sin_extra, i + cos_extra)
                };
                if moment.is_zero() {
                    continue;
                }
                let mut term = &base
                    * binomial(k, m)
                    * binomial(m, l)
                    * pow_rat(&c2, k - m)
                    * pow_rat(&rat_int(2), m)
                    * pow_rat(&inv_beta, l)
                    * pow_rat(&inv_alpha, m - l)
                    * moment;
                if (m - l) % 2 == 1 {
                    term = -term;
                }
                grow_add(&mut r, nu0 + m as usize, term);
            }
        }
    };

    for (e, coeff) in p.terms() {
        accumulate(true, e, coeff);
    }
    for (e, coeff) in q.terms() {
        accumulate(false, e, coeff);
    }
    finish_poly(r, Family::AllSpheres, params, c)
}

fn pow_rat(base: &Rat, exp: u32) -> Rat {
    let mut out = Rat::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

fn grow_add(r: &mut Vec<Rat>, idx: usize, term: Rat) {
    if idx >= r.len() {
        r.resize(idx + 1, Rat::zero());
    }
    r[idx] += term;
}

fn finish_poly(mut r: Vec<Rat>, family: Family, params: &InertiaParams, c: f64) -> MelnikovPoly {
    while matches!(r.last(), Some(t) if t.is_zero()) {
        r.pop();
    }
    if r.is_empty() {
        r.push(Rat::zero());
    }
    let scale = PI / (-params.alpha() * params.beta()).sqrt();
    // Physical-side coefficients (u = |h|), then float body.
    let flip = params.alpha() < 0.0;
    let mut body_coeffs = Vec::new();
    for (nu, coeff) in r.iter().enumerate().skip(1) {
        let mut v = coeff.to_f64().unwrap() * scale;
        if flip && nu % 2 == 1 {
            v = -v;
        }
        let s_pow = match family {
            Family::Semisphere => 2 * nu - 1,
            Family::AllSpheres => 2 * (nu - 1),
        };
        if s_pow >= body_coeffs.len() {
            body_coeffs.resize(s_pow + 1, 0.0);
        }
        body_coeffs[s_pow] = v;
    }
    MelnikovPoly {
        family,
        factor: match family {
            Family::Semisphere => Factor::SqrtH,
            Family::AllSpheres => Factor::H,
        },
        body: SqrtPoly::new(body_coeffs),
        rat_coeffs: r,
        scale,
        params: *params,
        c,
    }
}

// ---------------------------------------------------------------------------
// Quadrature oracle and numeric fallback
// ---------------------------------------------------------------------------

/// Default absolute tolerance of the quadrature oracle.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Numerical evaluation of the line integral
/// `oint (A dy - B dx) / sqrt(c^2 - x^2 - y^2)` along the oval at level `h`.
///
/// This is the independent oracle for both closed-form paths: for a
/// semisphere field `A = x3 P(...)` the integrand reduces pointwise to
/// `P dy - Q dx` on the preserved sphere. The integrand is smooth and
/// `2pi`-periodic, so the doubling trapezoid rule converges geometrically.
pub fn melnikov_quadrature(
    spec: &FieldSpec,
    params: &InertiaParams,
    c: f64,
    h: f64,
    tol: f64,
) -> Result<f64, MelnikovError> {
    let a_axis = (-2.0 * h / params.beta()).sqrt();
    let b_axis = (2.0 * h / params.alpha()).sqrt();
    if !(a_axis.is_finite() && b_axis.is_finite()) || a_axis.max(b_axis) >= c {
        return Err(MelnikovError::QuadratureDomain {
            h,
            a: a_axis,
            b: b_axis,
            c,
        });
    }
    let g = |theta: f64| -> f64 {
        let (sin_t, cos_t) = theta.sin_cos();
        let x = a_axis * cos_t;
        let y = b_axis * sin_t;
        let w = (c * c - x * x - y * y).sqrt();
        let [av, bv] = spec.eval_ab_chart(x, y, w);
        (av * b_axis * cos_t + bv * a_axis * sin_t) / w
    };

    let mut n = 32usize;
    let mut prev = trapezoid(&g, n);
    loop {
        n *= 2;
        let next = trapezoid(&g, n);
        let diff = (next - prev).abs();
        if diff <= tol {
            return Ok(next);
        }
        if n >= 1 << 20 {
            return Err(MelnikovError::QuadratureNonConvergence {
                requested: tol,
                achieved: diff,
            });
        }
        prev = next;
    }
}

fn trapezoid(g: &dyn Fn(f64) -> f64, n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    (0..n).map(|k| g(k as f64 * step)).sum::<f64>() * step
}

/// Root bracketing on the quadrature oracle, for tangent fields outside the
/// reducible form. Samples `I` on a level grid spanning the oval range,
/// brackets sign changes, and bisects.
pub fn melnikov_roots_quadrature(
    spec: &FieldSpec,
    params: &InertiaParams,
    c: f64,
    grid: usize,
) -> Result<BifurcationReport, MelnikovError> {
    let ceiling = oval_level_ceiling(params, c);
    if !(ceiling > 0.0) {
        return Err(MelnikovError::EmptyLevelRange(ceiling));
    }
    let sign = params.alpha().signum();
    let u_max = 0.995 * ceiling;
    let u_min = 1e-4 * ceiling;
    let n = grid.max(16);
    let us: Vec<f64> = (0..=n)
        .map(|k| u_min + (u_max - u_min) * k as f64 / n as f64)
        .collect();
    let mut vals = Vec::with_capacity(us.len());
    for &u in &us {
        vals.push(melnikov_quadrature(spec, params, c, sign * u, QUADRATURE_TOL)?);
    }
    let max_abs = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max_abs <= 1e-9 {
        return Err(MelnikovError::IdenticallyZero);
    }

    let mut roots = Vec::new();
    for k in 0..n {
        let (v0, v1) = (vals[k], vals[k + 1]);
        if v0 == 0.0 {
            // Exact hit on a grid node.
            let du = 1e-5 * ceiling;
            let d = (melnikov_quadrature(spec, params, c, sign * (us[k] + du), QUADRATURE_TOL)?
                - melnikov_quadrature(spec, params, c, sign * (us[k] - du), QUADRATURE_TOL)?)
                / (2.0 * du);
            let tol_d = 1e-6 * max_abs / ceiling;
            roots.push((us[k], d.abs(), d.abs() > tol_d, d.abs() < 10.0 * tol_d));
            continue;
        }
        if v0 * v1 >= 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (us[k], us[k + 1]);
        let mut f_lo = v0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let f_mid = melnikov_quadrature(spec, params, c, sign * mid, QUADRATURE_TOL)?;
            if f_lo * f_mid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
            if hi - lo <= 1e-13 * hi.max(1.0) {
                break;
            }
        }
        let u_star = 0.5 * (lo + hi);
        let du = 1e-5 * ceiling;
        let d = (melnikov_quadrature(spec, params, c, sign * (u_star + du), QUADRATURE_TOL)?
            - melnikov_quadrature(spec, params, c, sign * (u_star - du), QUADRATURE_TOL)?)
            / (2.0 * du);
        let tol_d = 1e-6 * max_abs / ceiling;
        roots.push((u_star, d.abs(), d.abs() > tol_d, d.abs() < 10.0 * tol_d));
    }

    let entries = roots
        .into_iter()
        .map(|(u, deriv, simple, borderline)| {
            classify_root(params, c, sign * u, simple, deriv, borderline && simple)
        })
        .collect();
    Ok(BifurcationReport {
        c,
        mu3: params.mu3(),
        method: Method::Quadrature,
        roots: entries,
    })
}

/// Full analysis of a perturbation spec on the sphere of radius `c`: closed
/// form when the family supports it, quadrature bracketing otherwise.
pub fn analyze(
    spec: &FieldSpec,
    params: &InertiaParams,
    c: f64,
) -> Result<(Option<MelnikovPoly>, BifurcationReport), MelnikovError> {
    match spec {
        FieldSpec::Semisphere(s) => {
            let m = melnikov_semisphere(&s.p, &s.q, params, s.c);
            let report = m.admissible_levels()?;
            Ok((Some(m), report))
        }
        _ => {
            let tangent = spec.as_tangent().expect("tangent variants");
            match melnikov_allspheres(tangent.a(), tangent.b(), params, c) {
                Ok(m) => {
                    let report = m.admissible_levels()?;
                    Ok((Some(m), report))
                }
                Err(MelnikovError::NotReducible(_)) => {
                    let report = melnikov_roots_quadrature(spec, params, c, 256)?;
                    Ok((None, report))
                }
                Err(e) => Err(e),
            }
        }
    }
}

/// Exact positive-root check used by tests: roots of `R(h)/h` on the rational
/// path, no floats involved.
pub fn exact_side_root_intervals(m: &MelnikovPoly) -> Vec<(Rat, Rat)> {
    let side = m.side_coeffs();
    let g: Vec<Rat> = side.into_iter().skip(1).collect();
    isolate_positive_roots(&g)
}

/// Samples `I(h)` across the oval range on the physical side, closed form
/// when available and the quadrature oracle otherwise. Used for plot data.
pub fn sample_curve(
    spec: &FieldSpec,
    params: &InertiaParams,
    c: f64,
    closed: Option<&MelnikovPoly>,
    n: usize,
) -> Result<Vec<(f64, f64)>, MelnikovError> {
    let ceiling = oval_level_ceiling(params, c);
    let sign = params.alpha().signum();
    let n = n.max(2);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let u = 0.98 * ceiling * k as f64 / n as f64;
        let h = sign * u;
        let value = match closed {
            Some(m) => m.eval(h),
            None => melnikov_quadrature(spec, params, c, h, QUADRATURE_TOL)?,
        };
        out.push((h, value));
    }
    Ok(out)
}
