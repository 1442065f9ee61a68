//! The unperturbed Euler top: inertia parameters, vector field, first
//! integrals, Poisson structure matrix and the chart that maps the upper
//! semisphere of an invariant sphere onto a planar disk.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::polynomial::{rat_from_f64, Rat};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("moments of inertia must be positive, got ({0}, {1}, {2})")]
    NonPositiveInertia(f64, f64, f64),
    #[error("degenerate top: alpha*beta = 0 (mu3 equals mu1 or mu2)")]
    DegenerateAlphaBeta,
    #[error("alpha*beta > 0 (x3 is the intermediate axis); the analysis requires alpha*beta < 0")]
    IntermediateAxis,
    #[error("invalid (alpha, beta) pair: alpha*beta must be negative, got ({0}, {1})")]
    InvalidAlphaBeta(f64, f64),
    #[error("mu3 = {mu3} incompatible with (alpha, beta) = ({alpha}, {beta}); need 1/mu3 > max(0, alpha, -beta)")]
    IncompatibleMu3 { alpha: f64, beta: f64, mu3: f64 },
    #[error("chart requires x3 > 0, got x3 = {0}")]
    ChartDomain(f64),
    #[error("chart inverse requires x^2 + y^2 < z, got x^2+y^2 = {r2}, z = {z}")]
    ChartInverseDomain { r2: f64, z: f64 },
}

/// Angular-momentum state of the top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl State3 {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        State3 { x1, x2, x3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        State3::new(a[0], a[1], a[2])
    }

    pub fn norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }
}

/// Point of the upper semisphere expressed in disk coordinates; `z` carries
/// the Casimir value and `c` the nominal sphere radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub c: f64,
}

/// Moments of inertia with the derived coefficients of the quadratic field.
///
/// Construction enforces `alpha * beta < 0`: the x3 axis must not be the
/// intermediate one, so that the poles of each sphere are centers surrounded
/// by periodic orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaParams {
    mu1: f64,
    mu2: f64,
    mu3: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl InertiaParams {
    pub fn new(mu1: f64, mu2: f64, mu3: f64) -> Result<Self, ModelError> {
        if !(mu1 > 0.0 && mu2 > 0.0 && mu3 > 0.0) {
            return Err(ModelError::NonPositiveInertia(mu1, mu2, mu3));
        }
        let alpha = (mu2 - mu3) / (mu2 * mu3);
        let beta = (mu3 - mu1) / (mu1 * mu3);
        let gamma = (mu1 - mu2) / (mu1 * mu2);
        if alpha * beta == 0.0 {
            return Err(ModelError::DegenerateAlphaBeta);
        }
        if alpha * beta > 0.0 {
            return Err(ModelError::IntermediateAxis);
        }
        Ok(InertiaParams {
            mu1,
            mu2,
            mu3,
            alpha,
            beta,
            gamma,
        })
    }

    /// Builds the top from `(alpha, beta)` and the remaining free degree of
    /// freedom `mu3`. Requires `1/mu3 > max(0, alpha, -beta)` so that all
    /// three moments come out positive.
    pub fn from_alpha_beta(alpha: f64, beta: f64, mu3: f64) -> Result<Self, ModelError> {
        if alpha * beta >= 0.0 {
            return Err(ModelError::InvalidAlphaBeta(alpha, beta));
        }
        if mu3 <= 0.0 {
            return Err(ModelError::IncompatibleMu3 { alpha, beta, mu3 });
        }
        let t = 1.0 / mu3;
        if t <= alpha.max(-beta).max(0.0) {
            return Err(ModelError::IncompatibleMu3 { alpha, beta, mu3 });
        }
        let mu2 = 1.0 / (t - alpha);
        let mu1 = 1.0 / (t + beta);
        InertiaParams::new(mu1, mu2, mu3)
    }

    pub fn mu(&self) -> [f64; 3] {
        [self.mu1, self.mu2, self.mu3]
    }

    pub fn mu3(&self) -> f64 {
        self.mu3
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(alpha, beta, gamma)` recomputed in exact rational arithmetic from
    /// the (exactly representable) float moments; here `alpha+beta+gamma = 0`
    /// holds identically.
    pub fn exact_coefficients(&self) -> (Rat, Rat, Rat) {
        let m1 = rat_from_f64(self.mu1).expect("finite mu1");
        let m2 = rat_from_f64(self.mu2).expect("finite mu2");
        let m3 = rat_from_f64(self.mu3).expect("finite mu3");
        let alpha = (&m2 - &m3) / (&m2 * &m3);
        let beta = (&m3 - &m1) / (&m1 * &m3);
        let gamma = (&m1 - &m2) / (&m1 * &m2);
        (alpha, beta, gamma)
    }
}

/// Right-hand side of the Euler equations: `(a x2 x3, b x1 x3, g x1 x2)`.
pub fn euler_field(p: &InertiaParams, s: &State3) -> State3 {
    State3::new(
        p.alpha * s.x2 * s.x3,
        p.beta * s.x1 * s.x3,
        p.gamma * s.x1 * s.x2,
    )
}

/// Kinetic energy, the Hamiltonian of the Lie-Poisson formulation.
pub fn hamiltonian(p: &InertiaParams, s: &State3) -> f64 {
    0.5 * (s.x1 * s.x1 / p.mu1 + s.x2 * s.x2 / p.mu2 + s.x3 * s.x3 / p.mu3)
}

/// The Casimir invariant: squared norm of the angular momentum.
pub fn casimir(s: &State3) -> f64 {
    s.norm_sq()
}

/// The so(3) structure matrix; the field factors as `J(s) grad H(s)`.
pub fn structure_matrix(s: &State3) -> [[f64; 3]; 3] {
    [
        [0.0, -s.x3, s.x2],
        [s.x3, 0.0, -s.x1],
        [-s.x2, s.x1, 0.0],
    ]
}

/// Gradient of the Hamiltonian.
pub fn grad_hamiltonian(p: &InertiaParams, s: &State3) -> [f64; 3] {
    [s.x1 / p.mu1, s.x2 / p.mu2, s.x3 / p.mu3]
}

/// The diffeomorphism `(x1,x2,x3) -> (x, y, z=D)` on `{x3 > 0}`.
pub fn chart_forward(s: &State3, c: f64) -> Result<ChartPoint, ModelError> {
    if s.x3 <= 0.0 {
        return Err(ModelError::ChartDomain(s.x3));
    }
    Ok(ChartPoint {
        x: s.x1,
        y: s.x2,
        z: casimir(s),
        c,
    })
}

/// Inverse chart: `(x, y, z) -> (x, y, +sqrt(z - x^2 - y^2))`.
pub fn chart_inverse(cp: &ChartPoint) -> Result<State3, ModelError> {
    let r2 = cp.x * cp.x + cp.y * cp.y;
    if r2 >= cp.z {
        return Err(ModelError::ChartInverseDomain { r2, z: cp.z });
    }
    Ok(State3::new(cp.x, cp.y, (cp.z - r2).sqrt()))
}

/// Reduced Hamiltonian on the disk: `H(x,y) = (alpha y^2 - beta x^2) / 2`.
pub fn reduced_hamiltonian(p: &InertiaParams, x: f64, y: f64) -> f64 {
    0.5 * (p.alpha * y * y - p.beta * x * x)
}

/// Energy level on the sphere of radius `c` corresponding to the reduced
/// level `h`: `hbar = c^2/(2 mu3) - h`.
pub fn energy_from_level(p: &InertiaParams, c: f64, h: f64) -> f64 {
    c * c / (2.0 * p.mu3) - h
}

/// Reduced level corresponding to an energy `hbar` on the sphere of radius
/// `c` (the conversion is an involution).
pub fn level_from_energy(p: &InertiaParams, c: f64, hbar: f64) -> f64 {
    c * c / (2.0 * p.mu3) - hbar
}

/// Largest reduced level whose oval still fits inside the open disk of
/// radius `c` (the separatrix level). Ovals exist for `alpha h > 0` with
/// `|h|` below this value.
pub fn oval_level_ceiling(p: &InertiaParams, c: f64) -> f64 {
    if p.alpha > 0.0 {
        0.5 * c * c * p.alpha.min(-p.beta)
    } else {
        0.5 * c * c * (-p.alpha).min(p.beta)
    }
}

/// Exact level-to-energy conversion used by the rational Melnikov pipeline.
pub fn energy_from_level_rat(p: &InertiaParams, c: f64, h: &Rat) -> f64 {
    let c2 = rat_from_f64(c).expect("finite c");
    let m3 = rat_from_f64(p.mu3).expect("finite mu3");
    let hbar = &c2 * &c2 / (Rat::from_integer(2.into()) * m3) - h;
    hbar.to_f64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::rat;
    use num_traits::Zero;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn sample_params(rng: &mut StdRng) -> InertiaParams {
        loop {
            let mu1 = rng.gen_range(0.3..4.0);
            let mu2 = rng.gen_range(0.3..4.0);
            let mu3 = rng.gen_range(0.3..4.0);
            if let Ok(p) = InertiaParams::new(mu1, mu2, mu3) {
                return p;
            }
        }
    }

    #[test]
    fn derived_coefficients_match_hand_values() {
        let p = InertiaParams::new(2.0, 3.0, 1.0).unwrap();
        assert!((p.alpha() - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.beta() + 0.5).abs() < 1e-15);
        assert!((p.gamma() + 1.0 / 6.0).abs() < 1e-15);
        let sum = p.alpha() + p.beta() + p.gamma();
        assert!(sum.abs() <= 1e-15);
        let (a, b, g) = p.exact_coefficients();
        assert_eq!(a, rat(2, 3));
        assert_eq!(b, rat(-1, 2));
        assert!((a + b + g).is_zero());
    }

    #[test]
    fn construction_rejects_bad_tops() {
        assert!(matches!(
            InertiaParams::new(-1.0, 2.0, 3.0),
            Err(ModelError::NonPositiveInertia(..))
        ));
        // mu3 equal to mu2 kills alpha.
        assert!(matches!(
            InertiaParams::new(2.0, 1.0, 1.0),
            Err(ModelError::DegenerateAlphaBeta)
        ));
        // mu3 intermediate: alpha*beta > 0.
        assert!(matches!(
            InertiaParams::new(1.0, 3.0, 2.0),
            Err(ModelError::IntermediateAxis)
        ));
        // mu1 = mu2 (gamma = 0) is fine as long as mu3 is extreme.
        assert!(InertiaParams::new(2.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn from_alpha_beta_reconstructs() {
        let p = InertiaParams::from_alpha_beta(0.25, -0.5, 1.0).unwrap();
        assert!((p.alpha() - 0.25).abs() < 1e-14);
        assert!((p.beta() + 0.5).abs() < 1e-14);
        assert!((p.mu3() - 1.0).abs() < 1e-15);
        assert!(InertiaParams::from_alpha_beta(0.25, -0.5, 5.0).is_err());
        assert!(InertiaParams::from_alpha_beta(0.25, 0.5, 1.0).is_err());
    }

    #[test]
    fn field_examples() {
        let p = InertiaParams::new(2.0, 3.0, 1.0).unwrap();
        // Axis equilibrium.
        let v = euler_field(&p, &State3::new(1.0, 0.0, 0.0));
        assert_eq!(v.as_array(), [0.0, 0.0, 0.0]);
        // Direct substitution at (1,1,1).
        let v = euler_field(&p, &State3::new(1.0, 1.0, 1.0));
        assert!((v.x1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((v.x2 + 0.5).abs() < 1e-15);
        assert!((v.x3 + 1.0 / 6.0).abs() < 1e-15);
        // Two factors vanish.
        let v = euler_field(&p, &State3::new(0.0, 1.0, 1.0));
        assert_eq!(v.as_array(), [p.alpha(), 0.0, 0.0]);
    }

    #[test]
    fn hamiltonian_and_casimir_examples() {
        let p = InertiaParams::new(2.0, 3.0, 1.0).unwrap();
        assert_eq!(hamiltonian(&p, &State3::new(0.0, 0.0, 0.0)), 0.0);
        let h = hamiltonian(&p, &State3::new(1.0, 2.0, 0.0));
        assert!((h - 11.0 / 12.0).abs() < 1e-15);
        let psym = InertiaParams::new(1.0 + 1e-9, 1.0, 2.0).unwrap();
        let h = hamiltonian(&psym, &State3::new(1.0, 1.0, 1.0));
        assert!((h - (0.5 / psym.mu()[0] + 0.5 + 0.25)).abs() < 1e-12);
        assert_eq!(casimir(&State3::new(1.0, 2.0, 2.0)), 9.0);
        assert_eq!(casimir(&State3::new(3.0, 4.0, 0.0)), 25.0);
    }

    #[test]
    fn structure_matrix_properties() {
        let mut rng = StdRng::seed_from_u64(7);
        // Zero state: rank 0.
        assert_eq!(
            structure_matrix(&State3::new(0.0, 0.0, 0.0)),
            [[0.0; 3]; 3]
        );
        let j = structure_matrix(&State3::new(1.0, 0.0, 0.0));
        assert_eq!(j[1][2], -1.0);
        assert_eq!(j[2][1], 1.0);
        for _ in 0..50 {
            let p = sample_params(&mut rng);
            let s = State3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let j = structure_matrix(&s);
            for r in 0..3 {
                for c in 0..3 {
                    assert_eq!(j[r][c], -j[c][r], "antisymmetry");
                }
            }
            // Field equals J grad H.
            let g = grad_hamiltonian(&p, &s);
            let f = euler_field(&p, &s);
            let scale = f.as_array().iter().fold(1e-300f64, |a, v| a.max(v.abs()));
            for r in 0..3 {
                let jr: f64 = (0..3).map(|c| j[r][c] * g[c]).sum();
                assert!(
                    (jr - f.as_array()[r]).abs() <= 1e-14 * scale.max(1.0),
                    "J grad H mismatch"
                );
            }
            // Both invariants are first integrals.
            let dh = g[0] * f.x1 + g[1] * f.x2 + g[2] * f.x3;
            let dd = 2.0 * (s.x1 * f.x1 + s.x2 * f.x2 + s.x3 * f.x3);
            let fscale = scale.max(s.norm_sq()).max(1.0);
            assert!(dh.abs() <= 1e-13 * fscale);
            assert!(dd.abs() <= 1e-13 * fscale);
        }
    }

    #[test]
    fn field_is_structure_matrix_times_gradient_exactly() {
        // In exact arithmetic the factorization has no roundoff at all:
        // row 1 of J grad H is x2 x3 (1/mu3 - 1/mu2) = alpha x2 x3, etc.
        let p = InertiaParams::new(2.0, 3.0, 1.0).unwrap();
        let (alpha, beta, gamma) = p.exact_coefficients();
        let [m1, m2, m3] = p.mu();
        let (m1, m2, m3) = (
            crate::polynomial::rat_from_f64(m1).unwrap(),
            crate::polynomial::rat_from_f64(m2).unwrap(),
            crate::polynomial::rat_from_f64(m3).unwrap(),
        );
        let x = [rat(3, 7), rat(-5, 2), rat(11, 13)];
        // J(s) grad H(s) componentwise.
        let j_grad = [
            -&x[2] * (&x[1] / &m2) + &x[1] * (&x[2] / &m3),
            &x[2] * (&x[0] / &m1) - &x[0] * (&x[2] / &m3),
            -&x[1] * (&x[0] / &m1) + &x[0] * (&x[1] / &m2),
        ];
        let field = [
            &alpha * &x[1] * &x[2],
            &beta * &x[0] * &x[2],
            &gamma * &x[0] * &x[1],
        ];
        assert_eq!(j_grad, field);
    }

    #[test]
    fn chart_roundtrip_and_domain() {
        let cp = chart_forward(&State3::new(0.0, 0.0, 2.0), 2.0).unwrap();
        assert_eq!((cp.x, cp.y, cp.z), (0.0, 0.0, 4.0));
        let s = chart_inverse(&cp).unwrap();
        assert_eq!(s.as_array(), [0.0, 0.0, 2.0]);

        let s0 = State3::new(0.6, 0.0, 0.8);
        let cp = chart_forward(&s0, 1.0).unwrap();
        assert!((cp.z - 1.0).abs() < 1e-15);
        let s1 = chart_inverse(&cp).unwrap();
        assert!((s1.x3 - 0.8).abs() < 1e-14);

        assert!(chart_forward(&State3::new(0.1, 0.2, 0.0), 1.0).is_err());
        assert!(chart_inverse(&ChartPoint {
            x: 1.0,
            y: 1.0,
            z: 1.5,
            c: 1.0
        })
        .is_err());
    }

    #[test]
    fn reduced_level_identity() {
        let mut rng = StdRng::seed_from_u64(11);
        let p = InertiaParams::new(2.0, 3.0, 1.0).unwrap();
        assert_eq!(reduced_hamiltonian(&p, 0.0, 0.0), 0.0);
        // alpha = 2/3, beta = -1/2 at (1,1): (2/3 + 1/2)/2 = 7/12.
        assert!((reduced_hamiltonian(&p, 1.0, 1.0) - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(energy_from_level(&p, 2.0, 0.0), 2.0);
        for _ in 0..200 {
            let c = rng.gen_range(0.5..3.0);
            let x = rng.gen_range(-0.6..0.6) * c;
            let y = rng.gen_range(-0.6..0.6) * c;
            if x * x + y * y >= c * c {
                continue;
            }
            let s = chart_inverse(&ChartPoint {
                x,
                y,
                z: c * c,
                c,
            })
            .unwrap();
            let lhs = hamiltonian(&p, &s) + reduced_hamiltonian(&p, x, y);
            let rhs = c * c / (2.0 * p.mu3());
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1.0));
        }
    }
}
