//! The two admissible Casimir-compatible perturbation families and the full
//! perturbed vector field.
//!
//! A perturbation `(A, B, C)` keeps every sphere invariant iff
//! `x1 A + x2 B + x3 C = 0`; one convenient family of solutions is the cross
//! product `(A,B,C) = (x3 M - x2 N, x1 N - x3 L, x2 L - x1 M)`. Perturbations
//! that preserve only the single sphere of radius `c` are parameterized by
//! three polynomials `P, Q, R` in `(x1, x2, D)` through
//! `A = x3 P`, `B = x3 Q`, `C = (D - c^2)/(2 x3) R - x1 P - x2 Q`.

use thiserror::Error;

use crate::model::{casimir, euler_field, InertiaParams, State3};
use crate::polynomial::{Poly3, PolyError};

/// Evaluating a semisphere field closer to the equator than this floor is a
/// domain error: the factored `C` stays finite on the preserved sphere, but
/// off-sphere the `1/x3` pole is real.
pub const DEFAULT_X3_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbError {
    #[error("semisphere radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("field is not tangent to the spheres: x1 A + x2 B + x3 C = {residual}")]
    TangencyViolated { residual: String },
    #[error("semisphere field evaluated at |x3| = {x3} below the floor {floor}")]
    EquatorEvaluation { x3: f64, floor: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Perturbation preserving the two semispheres of the single sphere `D = c^2`.
/// `p`, `q`, `r` are polynomials in `(x1, x2, z)` with `z` standing for the
/// Casimir value.
#[derive(Debug, Clone, PartialEq)]
pub struct SemisphereSpec {
    pub p: Poly3,
    pub q: Poly3,
    pub r: Poly3,
    pub c: f64,
}

impl SemisphereSpec {
    pub fn new(p: Poly3, q: Poly3, r: Poly3, c: f64) -> Result<Self, PerturbError> {
        if !(c > 0.0) {
            return Err(PerturbError::NonPositiveRadius(c));
        }
        Ok(SemisphereSpec { p, q, r, c })
    }

    /// `(A, B, C)` at a state with `|x3|` above the floor. `C` is evaluated
    /// in factored form so that on the preserved sphere the `(D - c^2)/x3`
    /// ratio is exactly zero rather than 0/0.
    pub fn eval_with_floor(&self, s: &State3, floor: f64) -> Result<[f64; 3], PerturbError> {
        if s.x3.abs() < floor {
            return Err(PerturbError::EquatorEvaluation { x3: s.x3, floor });
        }
        let d = casimir(s);
        let args = [s.x1, s.x2, d];
        let pv = self.p.eval_f64(args);
        let qv = self.q.eval_f64(args);
        let rv = self.r.eval_f64(args);
        let a = s.x3 * pv;
        let b = s.x3 * qv;
        let c = (d - self.c * self.c) / (2.0 * s.x3) * rv - s.x1 * pv - s.x2 * qv;
        Ok([a, b, c])
    }

    pub fn eval(&self, s: &State3) -> Result<[f64; 3], PerturbError> {
        self.eval_with_floor(s, DEFAULT_X3_FLOOR)
    }

    /// `P(x, y, c^2)` as a bivariate polynomial, the data entering `I(h)`.
    pub fn p_on_sphere(&self) -> Poly3 {
        let c2 = crate::polynomial::rat_from_f64(self.c * self.c).expect("finite c");
        self.p.subst_slot2_const(&c2)
    }

    pub fn q_on_sphere(&self) -> Poly3 {
        let c2 = crate::polynomial::rat_from_f64(self.c * self.c).expect("finite c");
        self.q.subst_slot2_const(&c2)
    }
}

/// Polynomial field tangent to every sphere: `x1 A + x2 B + x3 C = 0` as an
/// exact polynomial identity, checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFieldSpec {
    a: Poly3,
    b: Poly3,
    c: Poly3,
}

impl TangentFieldSpec {
    pub fn new(a: Poly3, b: Poly3, c: Poly3) -> Result<Self, PerturbError> {
        let residual = tangency_residual(&a, &b, &c)?;
        if !residual.is_zero() {
            return Err(PerturbError::TangencyViolated {
                residual: residual.to_text(),
            });
        }
        Ok(TangentFieldSpec { a, b, c })
    }

    pub fn a(&self) -> &Poly3 {
        &self.a
    }

    pub fn b(&self) -> &Poly3 {
        &self.b
    }

    pub fn c(&self) -> &Poly3 {
        &self.c
    }

    pub fn eval(&self, s: &State3) -> [f64; 3] {
        let x = s.as_array();
        [self.a.eval_f64(x), self.b.eval_f64(x), self.c.eval_f64(x)]
    }

    /// Extracts `(P, Q)` with `A = x3 P(x1,x2,x3^2)`, `B = x3 Q(x1,x2,x3^2)`
    /// when the field has the reducible structure; the closed-form `I(h)`
    /// only covers that shape.
    pub fn reduced_pq(&self) -> Result<(Poly3, Poly3), PolyError> {
        Ok((self.a.to_z_form()?, self.b.to_z_form()?))
    }
}

/// Cross-product data `(L, M, N)`; the derived field is tangent by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossProductSpec {
    pub l: Poly3,
    pub m: Poly3,
    pub n: Poly3,
}

impl CrossProductSpec {
    pub fn new(l: Poly3, m: Poly3, n: Poly3) -> Self {
        CrossProductSpec { l, m, n }
    }

    /// `(A, B, C) = (x3 M - x2 N, x1 N - x3 L, x2 L - x1 M)`.
    pub fn build(&self) -> Result<TangentFieldSpec, PerturbError> {
        let x1 = Poly3::var(0);
        let x2 = Poly3::var(1);
        let x3 = Poly3::var(2);
        let a = x3.mul(&self.m)?.sub(&x2.mul(&self.n)?);
        let b = x1.mul(&self.n)?.sub(&x3.mul(&self.l)?);
        let c = x2.mul(&self.l)?.sub(&x1.mul(&self.m)?);
        TangentFieldSpec::new(a, b, c)
    }
}

/// Exact tangency defect `x1 A + x2 B + x3 C`; the zero polynomial means all
/// spheres are invariant.
pub fn tangency_residual(a: &Poly3, b: &Poly3, c: &Poly3) -> Result<Poly3, PolyError> {
    let x1 = Poly3::var(0);
    let x2 = Poly3::var(1);
    let x3 = Poly3::var(2);
    Ok(x1.mul(a)?.add(&x2.mul(b)?).add(&x3.mul(c)?))
}

/// One of the admissible perturbation shapes, kind recorded explicitly.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Semisphere(SemisphereSpec),
    Tangent(TangentFieldSpec),
    CrossProduct {
        data: CrossProductSpec,
        built: TangentFieldSpec,
    },
}

impl FieldSpec {
    pub fn cross_product(data: CrossProductSpec) -> Result<Self, PerturbError> {
        let built = data.build()?;
        Ok(FieldSpec::CrossProduct { data, built })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FieldSpec::Semisphere(_) => "semisphere",
            FieldSpec::Tangent(_) => "tangent",
            FieldSpec::CrossProduct { .. } => "cross_product",
        }
    }

    /// The tangent field when every sphere is preserved.
    pub fn as_tangent(&self) -> Option<&TangentFieldSpec> {
        match self {
            FieldSpec::Semisphere(_) => None,
            FieldSpec::Tangent(t) => Some(t),
            FieldSpec::CrossProduct { built, .. } => Some(built),
        }
    }

    /// Perturbation components `(A, B, C)` at a state.
    pub fn eval(&self, s: &State3) -> Result<[f64; 3], PerturbError> {
        match self {
            FieldSpec::Semisphere(spec) => spec.eval(s),
            FieldSpec::Tangent(t) => Ok(t.eval(s)),
            FieldSpec::CrossProduct { built, .. } => Ok(built.eval(s)),
        }
    }

    /// `A` and `B` evaluated at chart coordinates `(x, y, w)` with
    /// `w = x3 > 0`; used by the reduced system and the quadrature oracle.
    pub fn eval_ab_chart(&self, x: f64, y: f64, w: f64) -> [f64; 2] {
        match self {
            FieldSpec::Semisphere(spec) => {
                let d = x * x + y * y + w * w;
                let args = [x, y, d];
                [w * spec.p.eval_f64(args), w * spec.q.eval_f64(args)]
            }
            FieldSpec::Tangent(t) => {
                let args = [x, y, w];
                [t.a.eval_f64(args), t.b.eval_f64(args)]
            }
            FieldSpec::CrossProduct { built, .. } => {
                let args = [x, y, w];
                [built.a.eval_f64(args), built.b.eval_f64(args)]
            }
        }
    }
}

/// The perturbed Euler top `x' = euler_field + epsilon (A, B, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedSystem {
    pub params: InertiaParams,
    pub spec: FieldSpec,
    pub epsilon: f64,
}

impl PerturbedSystem {
    pub fn new(params: InertiaParams, spec: FieldSpec, epsilon: f64) -> Self {
        PerturbedSystem {
            params,
            spec,
            epsilon,
        }
    }

    pub fn field(&self, s: &State3) -> Result<State3, PerturbError> {
        let base = euler_field(&self.params, s);
        let [a, b, c] = self.spec.eval(s)?;
        Ok(State3::new(
            base.x1 + self.epsilon * a,
            base.x2 + self.epsilon * b,
            base.x3 + self.epsilon * c,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::polynomial::{rat_int, Rat};
    use num_traits::One;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn poly(text: &str) -> Poly3 {
        Poly3::parse(text).unwrap()
    }

    #[test]
    fn semisphere_field_shape() {
        // P = 1, Q = R = 0 gives (A, B, C) = (x3, 0, -x1); tangent on every
        // point of the preserved sphere.
        let spec = SemisphereSpec::new(Poly3::one(), Poly3::zero(), Poly3::zero(), 1.0).unwrap();
        let s = State3::new(0.6, 0.0, 0.8);
        let [a, b, c] = spec.eval(&s).unwrap();
        assert!((a - 0.8).abs() < 1e-15);
        assert_eq!(b, 0.0);
        assert!((c + 0.6).abs() < 1e-15);
        assert!((s.x1 * a + s.x2 * b + s.x3 * c).abs() < 1e-15);

        // P = x1 on-sphere sample from the same geometry.
        let spec = SemisphereSpec::new(poly("x1"), Poly3::zero(), Poly3::zero(), 1.0).unwrap();
        let [a, b, c] = spec.eval(&s).unwrap();
        assert!((a - 0.48).abs() < 1e-15);
        assert_eq!(b, 0.0);
        assert!((c + 0.36).abs() < 1e-15);
        assert!((s.x1 * a + s.x2 * b + s.x3 * c).abs() < 1e-15);

        // Zero spec, zero field.
        let spec =
            SemisphereSpec::new(Poly3::zero(), Poly3::zero(), Poly3::zero(), 2.0).unwrap();
        assert_eq!(spec.eval(&s).unwrap(), [0.0, 0.0, 0.0]);

        // Equator evaluation is refused.
        assert!(spec
            .eval(&State3::new(1.0, 0.0, 1e-14))
            .is_err());
    }

    #[test]
    fn semisphere_invariance_on_and_off_sphere() {
        // Off the preserved sphere, D drifts with rate (D - c^2) R; on it the
        // tangency is exact.
        let mut rng = StdRng::seed_from_u64(3);
        let spec = SemisphereSpec::new(poly("x1 + z"), poly("x2^2"), poly("1 + x1"), 1.5).unwrap();
        for _ in 0..100 {
            let s = State3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.2..1.4),
            );
            let [a, b, c] = spec.eval(&s).unwrap();
            let dot = s.x1 * a + s.x2 * b + s.x3 * c;
            let d = casimir(&s);
            let expected = 0.5 * (d - spec.c * spec.c) * spec.r.eval_f64([s.x1, s.x2, d]);
            assert!(
                (dot - expected).abs() <= 1e-12 * expected.abs().max(1.0),
                "factored C identity"
            );
        }
    }

    #[test]
    fn cross_product_examples() {
        // L = M = N = 0.
        let z = CrossProductSpec::new(Poly3::zero(), Poly3::zero(), Poly3::zero());
        let t = z.build().unwrap();
        assert!(t.a().is_zero() && t.b().is_zero() && t.c().is_zero());

        // N = 1: rigid rotation about the x3 axis.
        let spin = CrossProductSpec::new(Poly3::zero(), Poly3::zero(), Poly3::one());
        let t = spin.build().unwrap();
        assert_eq!(t.a(), &poly("-x2"));
        assert_eq!(t.b(), &poly("x1"));
        assert!(t.c().is_zero());

        // L = x2, M = -x1, N = 0.
        let c = CrossProductSpec::new(poly("x2"), poly("-x1"), Poly3::zero());
        let t = c.build().unwrap();
        assert_eq!(t.a(), &poly("-x1 x3"));
        assert_eq!(t.b(), &poly("-x2 x3"));
        assert_eq!(t.c(), &poly("x1^2 + x2^2"));
    }

    #[test]
    fn tangency_residual_cases() {
        let c = CrossProductSpec::new(poly("x1 + x3^2"), poly("x2 x3"), poly("7"));
        let t = c.build().unwrap();
        assert!(tangency_residual(t.a(), t.b(), t.c()).unwrap().is_zero());

        let res = tangency_residual(&poly("x1"), &Poly3::zero(), &Poly3::zero()).unwrap();
        assert_eq!(res, poly("x1^2"));

        // The stabilization-style field of the worked example is tangent.
        let t = families::example2_field(Rat::one()).unwrap();
        assert!(tangency_residual(t.a(), t.b(), t.c()).unwrap().is_zero());

        // Construction rejects non-tangent data.
        assert!(TangentFieldSpec::new(poly("x1"), Poly3::zero(), Poly3::zero()).is_err());
    }

    #[test]
    fn homogeneity_of_cross_product_fields() {
        let mut rng = StdRng::seed_from_u64(11);
        for m in [3u32, 4, 5, 6] {
            for _ in 0..10 {
                let spec = families::random_homogeneous_cross(m, &mut rng);
                let t = spec.build().unwrap();
                for poly in [t.a(), t.b(), t.c()] {
                    if !poly.is_zero() {
                        assert_eq!(poly.homogeneous_degree(), Some(m));
                    }
                }
            }
        }
    }

    #[test]
    fn perturbed_field_values() {
        let params = InertiaParams::new(2.0, 3.0, 1.0).unwrap();
        // epsilon = 0 reduces to the Euler field.
        let spin = FieldSpec::cross_product(CrossProductSpec::new(
            Poly3::zero(),
            Poly3::zero(),
            Poly3::one(),
        ))
        .unwrap();
        let sys = PerturbedSystem::new(params, spin.clone(), 0.0);
        let s = State3::new(0.3, -0.4, 0.9);
        let f = sys.field(&s).unwrap();
        let e = euler_field(&params, &s);
        assert_eq!(f.as_array(), e.as_array());

        // Euler part vanishes at an axis point; only the rotation remains.
        let sys = PerturbedSystem::new(params, spin, 1.0);
        let f = sys.field(&State3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(f.as_array(), [0.0, 1.0, 0.0]);

        // Printed field of the worked example at the pole.
        let t = families::example2_field(rat_int(1)).unwrap();
        let sys = PerturbedSystem::new(params, FieldSpec::Tangent(t), 0.1);
        let f = sys.field(&State3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((f.x1 + 0.1).abs() < 1e-15);
        assert_eq!(f.x2, 0.0);
        assert_eq!(f.x3, 0.0);
    }

    #[test]
    fn casimir_derivative_vanishes_symbolically_for_tangent_fields() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let spec = families::random_homogeneous_cross(4, &mut rng);
            let t = spec.build().unwrap();
            // d/dt D = 2 (x1 A + x2 B + x3 C) identically.
            assert!(tangency_residual(t.a(), t.b(), t.c()).unwrap().is_zero());
        }
    }

    #[test]
    fn semisphere_casimir_defect_is_divisible_by_sphere_polynomial() {
        // Symbolically: x1 A + x2 B + x3 C = (D - c^2) R(x1, x2, D) / 2, an
        // exact polynomial identity once C is multiplied through by x3.
        let c = 1.5;
        let spec =
            SemisphereSpec::new(poly("x1 + z"), poly("x2^2 - 3 z"), poly("1 + x1 x2"), c).unwrap();
        let d = poly("x1^2 + x2^2 + x3^2");
        let subst = |f: &Poly3| f.subst_slot(2, &d).unwrap();
        let (p, q, r) = (subst(&spec.p), subst(&spec.q), subst(&spec.r));
        let x1 = Poly3::var(0);
        let x2 = Poly3::var(1);
        let x3 = Poly3::var(2);
        let a = x3.mul(&p).unwrap();
        let b = x3.mul(&q).unwrap();
        // x3 C = (D - c^2) R / 2 - x1 x3 P - x2 x3 Q.
        let c2 = crate::polynomial::rat_from_f64(c * c).unwrap();
        let d_minus = d.sub(&Poly3::constant(c2));
        let x3c = d_minus
            .mul(&r)
            .unwrap()
            .scale(&crate::polynomial::rat(1, 2))
            .sub(&x1.mul(&x3).unwrap().mul(&p).unwrap())
            .sub(&x2.mul(&x3).unwrap().mul(&q).unwrap());
        // x3 (x1 A + x2 B) + x3 (x3 C) = x3 (D - c^2) R / 2.
        let lhs = x3
            .mul(&x1.mul(&a).unwrap().add(&x2.mul(&b).unwrap()))
            .unwrap()
            .add(&x3.mul(&x3c).unwrap());
        let rhs = x3
            .mul(&d_minus.mul(&r).unwrap())
            .unwrap()
            .scale(&crate::polynomial::rat(1, 2));
        assert_eq!(lhs, rhs);
    }
}
