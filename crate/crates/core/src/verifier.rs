//! Numerical confirmation of predicted limit cycles.
//!
//! The workhorse is a Dormand-Prince 5(4) integrator with continuous (dense)
//! output; section crossings are located on the dense polynomial rather than
//! by step bisection. Cycle hunting runs on the reduced planar system of the
//! invariant disk, where the section `y = 0, x > 0` cuts every oval exactly
//! once per revolution; the time rescaling that produces the reduced system
//! preserves orbits as sets, so periods are reported in rescaled time.

use thiserror::Error;

use crate::model::{casimir, euler_field, State3};
use crate::perturbation::{FieldSpec, PerturbedSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("maximum number of steps exceeded at t = {t}")]
    MaxStepsExceeded { t: f64 },
    #[error("no section crossing within t = {t_max}")]
    NoSectionCrossing { t_max: f64 },
    #[error("orbit escaped the disk at ({x}, {y}), radius {c}")]
    EscapedDisk { x: f64, y: f64, c: f64 },
    #[error("cycle iteration did not converge within {iterations} iterations")]
    CycleNotConverged { iterations: usize },
    #[error("iteration collapsed onto the center; no isolated cycle here")]
    TrivialFixedPoint,
    #[error("epsilon = 0: the section map is the identity on a continuum of fixed points")]
    ZeroEpsilon,
}

/// Tolerances and budgets for one integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        IntegratorConfig {
            rtol,
            atol,
            ..Default::default()
        }
    }
}

/// Sampled trajectory at the accepted steps.
#[derive(Debug, Clone, Default)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with dense output
// ---------------------------------------------------------------------------

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Quartic interpolant over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.rcont;
            out[i] = r[0][i]
                + theta
                    * (r[1][i]
                        + (1.0 - theta) * (r[2][i] + theta * (r[3][i] + (1.0 - theta) * r[4][i])));
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepOutcome<const N: usize> {
    pub t_prev: f64,
    pub t: f64,
    pub y_prev: [f64; N],
    pub y: [f64; N],
    pub dense: DenseStep<N>,
}

pub struct Dopri5<F, const N: usize> {
    f: F,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    t_end: f64,
    h: f64,
    steps: usize,
    last_rejected: bool,
}

fn axpy<const N: usize>(out: &mut [f64; N], base: &[f64; N], coeffs: &[(f64, [f64; N])]) {
    for i in 0..N {
        let mut v = base[i];
        for (c, k) in coeffs {
            v += c * k[i];
        }
        out[i] = v;
    }
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(&[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, y0: [f64; N], t_end: f64, cfg: IntegratorConfig) -> Self {
        let k1 = f(&y0);
        let h = Self::initial_step(&mut f, &y0, &k1, t_end, &cfg);
        Dopri5 {
            f,
            cfg,
            t: 0.0,
            y: y0,
            k1,
            t_end,
            h,
            steps: 0,
            last_rejected: false,
        }
    }

    fn initial_step(
        f: &mut F,
        y0: &[f64; N],
        f0: &[f64; N],
        t_end: f64,
        cfg: &IntegratorConfig,
    ) -> f64 {
        let sc = |y: &[f64; N], i: usize| cfg.atol + cfg.rtol * y[i].abs();
        let d0: f64 = (0..N).map(|i| (y0[i] / sc(y0, i)).powi(2)).sum::<f64>().sqrt();
        let d1: f64 = (0..N).map(|i| (f0[i] / sc(y0, i)).powi(2)).sum::<f64>().sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(t_end.abs().max(1e-6));
        let mut y1 = [0.0; N];
        axpy(&mut y1, y0, &[(h0, *f0)]);
        let f1 = f(&y1);
        let d2: f64 = (0..N)
            .map(|i| ((f1[i] - f0[i]) / sc(y0, i)).powi(2))
            .sum::<f64>()
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(cfg.max_step).min(t_end.abs())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    pub fn done(&self) -> bool {
        self.t >= self.t_end
    }

    /// Takes one accepted step (retrying rejected trial steps internally).
    pub fn advance(&mut self) -> Result<StepOutcome<N>, VerifyError> {
        loop {
            if self.steps >= self.cfg.max_steps {
                return Err(VerifyError::MaxStepsExceeded { t: self.t });
            }
            self.steps += 1;

            let mut h = self.h.min(self.cfg.max_step);
            if self.t + h > self.t_end {
                h = self.t_end - self.t;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(VerifyError::StepSizeUnderflow { t: self.t });
            }

            let y0 = self.y;
            let k1 = self.k1;
            let mut ks = [[0.0; N]; 7];
            ks[0] = k1;
            let mut ytmp = [0.0; N];
            for stage in 0..6 {
                for i in 0..N {
                    let mut v = y0[i];
                    for (j, k) in ks.iter().enumerate().take(stage + 1) {
                        v += h * A[stage][j] * k[i];
                    }
                    ytmp[i] = v;
                }
                ks[stage + 1] = (self.f)(&ytmp);
            }
            // 5th-order solution is the stage-6 argument (FSAL).
            let y1 = ytmp;
            let k7 = ks[6];

            let mut err_sq = 0.0;
            let mut finite = true;
            for i in 0..N {
                let e: f64 = (0..7).map(|j| E[j] * ks[j][i]).sum::<f64>() * h;
                let sc = self.cfg.atol + self.cfg.rtol * y0[i].abs().max(y1[i].abs());
                let q = e / sc;
                err_sq += q * q;
                finite &= y1[i].is_finite();
            }
            let err = (err_sq / N as f64).sqrt();

            if finite && err <= 1.0 {
                // Dense output coefficients.
                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let dy = y1[i] - y0[i];
                    let bspl = h * k1[i] - dy;
                    rcont[0][i] = y0[i];
                    rcont[1][i] = dy;
                    rcont[2][i] = bspl;
                    rcont[3][i] = dy - h * k7[i] - bspl;
                    rcont[4][i] = h * (0..7).map(|j| D[j] * ks[j][i]).sum::<f64>();
                }
                let outcome = StepOutcome {
                    t_prev: self.t,
                    t: self.t + h,
                    y_prev: y0,
                    y: y1,
                    dense: DenseStep {
                        t0: self.t,
                        h,
                        rcont,
                    },
                };
                let fac = if self.last_rejected { 1.0 } else { 5.0 };
                let scale = (0.9 * err.powf(-0.2)).min(fac).max(0.2);
                self.h = h * scale;
                self.t = outcome.t;
                self.y = y1;
                self.k1 = k7;
                self.last_rejected = false;
                return Ok(outcome);
            }

            let scale = if finite {
                (0.9 * err.powf(-0.2)).max(0.1)
            } else {
                0.1
            };
            self.h = h * scale;
            self.last_rejected = true;
        }
    }
}

/// Integrates an autonomous field over `[0, t_end]`, sampling at the
/// accepted steps.
pub fn integrate<F, const N: usize>(
    f: F,
    y0: [f64; N],
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>, VerifyError>
where
    F: FnMut(&[f64; N]) -> [f64; N],
{
    let mut stepper = Dopri5::new(f, y0, t_end, *cfg);
    let mut traj = Trajectory {
        t: vec![0.0],
        y: vec![y0],
    };
    while !stepper.done() {
        let out = stepper.advance()?;
        traj.t.push(out.t);
        traj.y.push(out.y);
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// Perturbed-top specific drivers
// ---------------------------------------------------------------------------

/// Raw 3D right-hand side of the perturbed system. Semisphere fields keep
/// their factored `C`, so the expression is total except exactly on the
/// equator plane, where a non-finite value surfaces as step-size underflow.
pub fn field_3d<'a>(sys: &'a PerturbedSystem) -> impl FnMut(&[f64; 3]) -> [f64; 3] + 'a {
    move |y: &[f64; 3]| {
        let s = State3::from_array(*y);
        let base = euler_field(&sys.params, &s);
        let pert = match &sys.spec {
            FieldSpec::Semisphere(spec) => {
                let d = casimir(&s);
                let args = [s.x1, s.x2, d];
                let pv = spec.p.eval_f64(args);
                let qv = spec.q.eval_f64(args);
                let rv = spec.r.eval_f64(args);
                [
                    s.x3 * pv,
                    s.x3 * qv,
                    (d - spec.c * spec.c) / (2.0 * s.x3) * rv - s.x1 * pv - s.x2 * qv,
                ]
            }
            other => other
                .eval(&s)
                .expect("tangent evaluation is total"),
        };
        [
            base.x1 + sys.epsilon * pert[0],
            base.x2 + sys.epsilon * pert[1],
            base.x3 + sys.epsilon * pert[2],
        ]
    }
}

/// Reduced planar system on the invariant disk of radius `c`, after the time
/// rescaling that removes the square-root factor:
/// `x' = alpha y + eps A(x,y,w)/w`, `y' = beta x + eps B(x,y,w)/w` with
/// `w = sqrt(c^2 - x^2 - y^2)`.
pub fn reduced_field<'a>(
    sys: &'a PerturbedSystem,
    c: f64,
) -> impl FnMut(&[f64; 2]) -> [f64; 2] + 'a {
    let alpha = sys.params.alpha();
    let beta = sys.params.beta();
    move |xy: &[f64; 2]| {
        let (x, y) = (xy[0], xy[1]);
        let w = (c * c - x * x - y * y).max(0.0).sqrt();
        let [a, b] = sys.spec.eval_ab_chart(x, y, w);
        [
            alpha * y + sys.epsilon * a / w,
            beta * x + sys.epsilon * b / w,
        ]
    }
}

/// Reference revolution time of the linear center (uniform over the
/// annulus).
pub fn base_period(sys: &PerturbedSystem) -> f64 {
    2.0 * std::f64::consts::PI / (-sys.params.alpha() * sys.params.beta()).sqrt()
}

/// Maximum Casimir deviation `|D(x(t)) - D(x(0))|` along the perturbed 3D
/// flow up to `t_end`.
pub fn casimir_drift(
    sys: &PerturbedSystem,
    s0: &State3,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, VerifyError> {
    let d0 = casimir(s0);
    let mut stepper = Dopri5::new(field_3d(sys), s0.as_array(), t_end, *cfg);
    let mut drift = 0.0f64;
    while !stepper.done() {
        let out = stepper.advance()?;
        let d = casimir(&State3::from_array(out.y));
        drift = drift.max((d - d0).abs());
    }
    Ok(drift)
}

/// One full revolution of the reduced system from `(x0, 0)` back to the
/// section `y = 0, x > 0` with matching crossing orientation. Returns the
/// landing coordinate and the (rescaled) transit time.
pub fn return_map(
    sys: &PerturbedSystem,
    c: f64,
    x0: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64), VerifyError> {
    if !(x0 > 0.0 && x0 < c) {
        return Err(VerifyError::EscapedDisk { x: x0, y: 0.0, c });
    }
    let t_max = 50.0 * base_period(sys);
    // Crossing orientation: sign of dy/dt at the start point of an oval.
    let dir = if sys.params.beta() < 0.0 { 1.0 } else { -1.0 };
    let mut stepper = Dopri5::new(reduced_field(sys, c), [x0, 0.0], t_max, *cfg);
    while !stepper.done() {
        let out = stepper.advance()?;
        let r2 = out.y[0] * out.y[0] + out.y[1] * out.y[1];
        if r2 >= c * c * (1.0 - 1e-12) {
            return Err(VerifyError::EscapedDisk {
                x: out.y[0],
                y: out.y[1],
                c,
            });
        }
        let (y_prev, y_new) = (out.y_prev[1], out.y[1]);
        if y_prev * dir > 0.0 && y_new * dir <= 0.0 {
            // Locate the crossing on the dense output.
            let (mut lo, mut hi) = (out.t_prev, out.t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let y_mid = out.dense.eval(mid)[1];
                if y_mid * dir > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t_star = 0.5 * (lo + hi);
            let state = out.dense.eval(t_star);
            if state[0] > 0.0 {
                return Ok((state[0], t_star));
            }
        }
    }
    Err(VerifyError::NoSectionCrossing { t_max })
}

/// Stability classification of a located cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleClass {
    Attracting,
    Repelling,
    /// `|rho - 1|` below the finite-difference noise floor.
    Unresolved,
}

/// A numerically confirmed limit cycle on the reduced disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    /// Section coordinate of the fixed point on `y = 0, x > 0`.
    pub x_star: f64,
    /// Revolution time in the rescaled clock of the reduced system.
    pub period: f64,
    /// Measured level `H(x_star, 0)`.
    pub h_num: f64,
    /// Levels measured at the two transverse axis crossings (`x = 0`) of the
    /// cycle, ordered (upper, lower). For fields that are reversible about
    /// the section axis the section level converges quadratically in epsilon
    /// while the cycle as a set only converges at first order; the level
    /// spread across these crossings sees the first-order rate.
    pub h_transverse: (f64, f64),
    /// Return-map derivative estimate.
    pub rho: f64,
    pub class: CycleClass,
    pub epsilon: f64,
}

/// Newton iteration on the section displacement `d(x) = R(x) - x`, seeded at
/// the section coordinate of the predicted level.
pub fn find_cycle(
    sys: &PerturbedSystem,
    c: f64,
    h_guess: f64,
    cfg: &IntegratorConfig,
) -> Result<CycleResult, VerifyError> {
    if sys.epsilon == 0.0 {
        return Err(VerifyError::ZeroEpsilon);
    }
    let beta = sys.params.beta();
    let x_seed = (-2.0 * h_guess / beta).sqrt();
    if !x_seed.is_finite() || x_seed <= 0.0 {
        return Err(VerifyError::TrivialFixedPoint);
    }
    let delta = 1e-6 * c;
    let tol = 1e-11 * c;
    let mut x = x_seed;
    let mut rho = f64::NAN;
    let mut period = f64::NAN;
    let mut converged = false;
    for _ in 0..50 {
        let (rx, tx) = return_map(sys, c, x, cfg)?;
        let d = rx - x;
        period = tx;
        let (rp, _) = return_map(sys, c, x + delta, cfg)?;
        let (rm, _) = return_map(sys, c, x - delta, cfg)?;
        rho = (rp - rm) / (2.0 * delta);
        if d.abs() <= tol {
            converged = true;
            break;
        }
        let slope = rho - 1.0;
        if slope.abs() < 1e-13 {
            return Err(VerifyError::CycleNotConverged { iterations: 50 });
        }
        let next = x - d / slope;
        if !next.is_finite() || next <= 0.0 || next >= c {
            return Err(VerifyError::CycleNotConverged { iterations: 50 });
        }
        x = next;
    }
    if !converged {
        return Err(VerifyError::CycleNotConverged { iterations: 50 });
    }
    if x.abs() < 1e-8 * c {
        return Err(VerifyError::TrivialFixedPoint);
    }
    let h_num = -0.5 * beta * x * x;
    let h_transverse = transverse_level(sys, c, x, h_num, cfg)?;
    let noise = 100.0 * cfg.rtol.max(cfg.atol / c.max(1e-300)) * c / delta;
    let class = if (rho - 1.0).abs() < 10.0 * noise {
        CycleClass::Unresolved
    } else if rho < 1.0 {
        CycleClass::Attracting
    } else {
        CycleClass::Repelling
    };
    Ok(CycleResult {
        x_star: x,
        period,
        h_num,
        h_transverse,
        rho,
        class,
        epsilon: sys.epsilon,
    })
}

/// Follows the cycle through one revolution and reports the reduced levels
/// at its two `x = 0` crossings, `(upper, lower)` by the sign of `y`.
fn transverse_level(
    sys: &PerturbedSystem,
    c: f64,
    x_star: f64,
    h_section: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64), VerifyError> {
    let alpha = sys.params.alpha();
    let t_max = 5.0 * base_period(sys);
    let dir = if sys.params.beta() < 0.0 { 1.0 } else { -1.0 };
    let mut stepper = Dopri5::new(reduced_field(sys, c), [x_star, 0.0], t_max, *cfg);
    let mut upper = h_section;
    let mut lower = h_section;
    while !stepper.done() {
        let out = stepper.advance()?;
        // Transverse crossings: the x coordinate changes sign.
        if out.y_prev[0] * out.y[0] < 0.0 {
            let (mut lo, mut hi) = (out.t_prev, out.t);
            let sign_lo = out.y_prev[0] > 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (out.dense.eval(mid)[0] > 0.0) == sign_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let y_cross = out.dense.eval(0.5 * (lo + hi))[1];
            let level = 0.5 * alpha * y_cross * y_cross;
            if y_cross > 0.0 {
                upper = level;
            } else {
                lower = level;
            }
        }
        // Stop after the first full revolution.
        let (y_prev, y_new) = (out.y_prev[1], out.y[1]);
        if stepper.t() > 0.1 * t_max && y_prev * dir > 0.0 && y_new * dir <= 0.0 {
            break;
        }
    }
    Ok((upper, lower))
}

/// One revolution of the full 3D flow back to the section
/// `x2 = 0, x1 > 0`, used for chart-consistency checks.
pub fn return_3d(
    sys: &PerturbedSystem,
    s0: &State3,
    cfg: &IntegratorConfig,
) -> Result<(State3, f64), VerifyError> {
    // The rescaled clock relates to the 3D one through dtau = x3 dt.
    let t_max = 50.0 * base_period(sys) * (1.0 + 1.0 / s0.x3.max(1e-6));
    let dir = if sys.params.beta() < 0.0 { 1.0 } else { -1.0 };
    let mut stepper = Dopri5::new(field_3d(sys), s0.as_array(), t_max, *cfg);
    while !stepper.done() {
        let out = stepper.advance()?;
        let (y_prev, y_new) = (out.y_prev[1], out.y[1]);
        if y_prev * dir > 0.0 && y_new * dir <= 0.0 {
            let (mut lo, mut hi) = (out.t_prev, out.t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if out.dense.eval(mid)[1] * dir > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t_star = 0.5 * (lo + hi);
            let y = out.dense.eval(t_star);
            if y[0] > 0.0 {
                return Ok((State3::from_array(y), t_star));
            }
        }
    }
    Err(VerifyError::NoSectionCrossing { t_max })
}
