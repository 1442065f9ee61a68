//! Sparse trivariate polynomials with exact rational coefficients, univariate
//! polynomials in `s = sqrt(h)` with parity metadata, and positive real root
//! isolation (square-free Sturm chains over the rationals, Newton polish in
//! floats).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the symbolic layer.
pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// Exact conversion of a finite float; every finite `f64` is a rational.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Total degree beyond which polynomial products are refused.
pub const MAX_DEGREE: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial degree {0} exceeds the configured maximum {MAX_DEGREE}")]
    DegreeOverflow(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial is identically zero (I = 0)")]
    IdenticallyZero,
    #[error("monomial with odd power of x3 only: {0}")]
    NotX3Form(String),
}

/// Sparse polynomial in three variables with `BigRational` coefficients.
///
/// The three slots are (x1, x2, x3); when a polynomial represents data on the
/// Casimir variable the third slot is read as `z`. No zero coefficient is
/// ever stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly3 {
    terms: BTreeMap<[u32; 3], Rat>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Poly3::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly3::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    pub fn one() -> Self {
        Poly3::constant(Rat::one())
    }

    /// The variable `x1`, `x2` or `x3`/`z` for slot 0, 1, 2.
    pub fn var(slot: usize) -> Self {
        let mut e = [0u32; 3];
        e[slot] = 1;
        Poly3::monomial(e, Rat::one())
    }

    pub fn monomial(exps: [u32; 3], coeff: Rat) -> Self {
        let mut p = Poly3::zero();
        p.add_term(exps, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 3], &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: [u32; 3]) -> Rat {
        self.terms.get(&exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// Adds `coeff * x1^i x2^j x3^k`, dropping the entry if it cancels.
    pub fn add_term(&mut self, exps: [u32; 3], coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// Max total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max()
    }

    /// Max degree in the first two variables only.
    pub fn degree_xy(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1]).max()
    }

    /// `Some(d)` when every monomial has total degree `d`; zero is not
    /// homogeneous of any particular degree here.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e[0] + e[1] + e[2]);
        let d = it.next()?;
        it.all(|k| k == d).then_some(d)
    }

    pub fn neg(&self) -> Poly3 {
        let mut out = Poly3::zero();
        for (e, c) in &self.terms {
            out.terms.insert(*e, -c.clone());
        }
        out
    }

    pub fn add(&self, other: &Poly3) -> Poly3 {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly3) -> Poly3 {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Poly3 {
        if k.is_zero() {
            return Poly3::zero();
        }
        let mut out = Poly3::zero();
        for (e, c) in &self.terms {
            out.terms.insert(*e, c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly3) -> Result<Poly3, PolyError> {
        let mut out = Poly3::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let d = e[0] + e[1] + e[2];
                if d > MAX_DEGREE {
                    return Err(PolyError::DegreeOverflow(d));
                }
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Poly3, PolyError> {
        let mut out = Poly3::one();
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn eval_f64(&self, x: [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let c = c.to_f64().unwrap_or(f64::NAN);
            acc += c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32);
        }
        acc
    }

    pub fn eval_rat(&self, x: &[Rat; 3]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (slot, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &x[slot];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a rational constant for the third slot (`z <- value`).
    pub fn subst_slot2_const(&self, value: &Rat) -> Poly3 {
        let mut out = Poly3::zero();
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            for _ in 0..e[2] {
                coeff *= value;
            }
            out.add_term([e[0], e[1], 0], coeff);
        }
        out
    }

    /// Substitutes a polynomial for one variable slot.
    pub fn subst_slot(&self, slot: usize, replacement: &Poly3) -> Result<Poly3, PolyError> {
        let max_pow = self.terms.keys().map(|e| e[slot]).max().unwrap_or(0);
        let mut powers = Vec::with_capacity(max_pow as usize + 1);
        powers.push(Poly3::one());
        for k in 1..=max_pow {
            let next = powers[(k - 1) as usize].mul(replacement)?;
            powers.push(next);
        }
        let mut out = Poly3::zero();
        for (e, c) in &self.terms {
            let mut rest = [0u32; 3];
            for (i, v) in e.iter().enumerate() {
                if i != slot {
                    rest[i] = *v;
                }
            }
            let base = Poly3::monomial(rest, c.clone());
            out = out.add(&base.mul(&powers[e[slot] as usize])?);
        }
        Ok(out)
    }

    /// Interprets `self` as `A(x1,x2,x3)` and extracts `P` such that
    /// `A = x3 * P(x1, x2, x3^2)`; fails when any monomial has an even power
    /// of `x3`.
    pub fn to_z_form(&self) -> Result<Poly3, PolyError> {
        let mut out = Poly3::zero();
        for (e, c) in &self.terms {
            if e[2] % 2 == 0 {
                return Err(PolyError::NotX3Form(format!(
                    "x1^{} x2^{} x3^{}",
                    e[0], e[1], e[2]
                )));
            }
            out.add_term([e[0], e[1], (e[2] - 1) / 2], c.clone());
        }
        Ok(out)
    }

    /// Inverse of [`Poly3::to_z_form`]: `P(x1,x2,z) -> x3 * P(x1,x2,x3^2)`.
    pub fn from_z_form(&self) -> Poly3 {
        let mut out = Poly3::zero();
        for (e, c) in &self.terms {
            out.add_term([e[0], e[1], 2 * e[2] + 1], c.clone());
        }
        out
    }

    /// Canonical text rendering with `x3` naming the third slot.
    pub fn to_text(&self) -> String {
        self.render(["x1", "x2", "x3"])
    }

    /// Canonical text rendering with `z` naming the third slot.
    pub fn to_text_z(&self) -> String {
        self.render(["x1", "x2", "z"])
    }

    fn render(&self, names: [&str; 3]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // Graded lexicographic, highest degree first.
        let mut keys: Vec<&[u32; 3]> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da = a[0] + a[1] + a[2];
            let db = b[0] + b[1] + b[2];
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (idx, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let is_const = e[0] == 0 && e[1] == 0 && e[2] == 0;
            let mut vars = String::new();
            for (slot, name) in names.iter().enumerate() {
                match e[slot] {
                    0 => {}
                    1 => {
                        if !vars.is_empty() {
                            vars.push(' ');
                        }
                        vars.push_str(name);
                    }
                    k => {
                        if !vars.is_empty() {
                            vars.push(' ');
                        }
                        vars.push_str(name);
                        vars.push('^');
                        vars.push_str(&k.to_string());
                    }
                }
            }
            if is_const {
                out.push_str(&format_rat(&mag));
            } else if mag.is_one() {
                out.push_str(&vars);
            } else {
                out.push_str(&format_rat(&mag));
                out.push(' ');
                out.push_str(&vars);
            }
        }
        out
    }

    /// Parses the canonical text form. Accepted variable names: `x1`, `x2`,
    /// `x3` plus the aliases `x` (= x1), `y` (= x2) and `z` (= x3 slot).
    pub fn parse(input: &str) -> Result<Poly3, PolyError> {
        Parser::new(input).parse()
    }
}

fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly3({})", self.to_text())
    }
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            chars: input.chars().peekable(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn parse(&mut self) -> Result<Poly3, PolyError> {
        let mut acc = Poly3::zero();
        let mut sign = Rat::one();
        let mut saw_any = false;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                None => break,
                Some('+') => {
                    self.chars.next();
                    sign = Rat::one();
                }
                Some('-') => {
                    self.chars.next();
                    sign = -Rat::one();
                }
                Some(_) if !saw_any => {}
                Some(c) => {
                    return Err(PolyError::Parse(format!("expected '+' or '-', found '{c}'")))
                }
            }
            self.skip_ws();
            if self.chars.peek().is_none() {
                if saw_any {
                    return Err(PolyError::Parse("dangling sign".into()));
                }
                break;
            }
            let term = self.parse_term()?;
            acc = acc.add(&term.scale(&sign));
            sign = Rat::one();
            saw_any = true;
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Poly3, PolyError> {
        let mut coeff = Rat::one();
        let mut exps = [0u32; 3];
        let mut saw_factor = false;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some('*') => {
                    self.chars.next();
                    continue;
                }
                Some(c) if c.is_ascii_digit() => {
                    let r = self.parse_number()?;
                    coeff *= r;
                    saw_factor = true;
                }
                Some(c) if *c == 'x' || *c == 'y' || *c == 'z' => {
                    let slot = self.parse_var()?;
                    let exp = self.parse_exponent()?;
                    exps[slot] += exp;
                    saw_factor = true;
                }
                _ => break,
            }
        }
        if !saw_factor {
            return Err(PolyError::Parse("empty term".into()));
        }
        Ok(Poly3::monomial(exps, coeff))
    }

    fn parse_number(&mut self) -> Result<Rat, PolyError> {
        let num = self.parse_uint()?;
        self.skip_ws();
        if matches!(self.chars.peek(), Some('/')) {
            self.chars.next();
            self.skip_ws();
            let den = self.parse_uint()?;
            if den.is_zero() {
                return Err(PolyError::Parse("zero denominator".into()));
            }
            Ok(Rat::new(num, den))
        } else {
            Ok(Rat::from_integer(num))
        }
    }

    fn parse_uint(&mut self) -> Result<BigInt, PolyError> {
        let mut digits = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap());
        }
        if digits.is_empty() {
            return Err(PolyError::Parse("expected number".into()));
        }
        digits
            .parse::<BigInt>()
            .map_err(|e| PolyError::Parse(e.to_string()))
    }

    fn parse_var(&mut self) -> Result<usize, PolyError> {
        match self.chars.next() {
            Some('z') => Ok(2),
            Some('y') => Ok(1),
            Some('x') => match self.chars.peek() {
                Some('1') => {
                    self.chars.next();
                    Ok(0)
                }
                Some('2') => {
                    self.chars.next();
                    Ok(1)
                }
                Some('3') => {
                    self.chars.next();
                    Ok(2)
                }
                _ => Ok(0),
            },
            other => Err(PolyError::Parse(format!("expected variable, found {other:?}"))),
        }
    }

    fn parse_exponent(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        if matches!(self.chars.peek(), Some('^')) {
            self.chars.next();
            self.skip_ws();
            let n = self.parse_uint()?;
            n.to_u32()
                .ok_or_else(|| PolyError::Parse("exponent too large".into()))
        } else {
            Ok(1)
        }
    }
}

/// Parity of a polynomial in `s = sqrt(h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Dense polynomial in `s = sqrt(h)` with float coefficients; `coeffs[k]`
/// multiplies `s^k`. Exactness, when needed, lives upstream in the rational
/// moment table.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtPoly {
    coeffs: Vec<f64>,
    parity: Parity,
}

impl SqrtPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while matches!(coeffs.last(), Some(&c) if c == 0.0) {
            coeffs.pop();
        }
        let any_odd = coeffs.iter().skip(1).step_by(2).any(|&c| c != 0.0);
        let any_even = coeffs.iter().step_by(2).any(|&c| c != 0.0);
        let parity = match (any_even, any_odd) {
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        };
        SqrtPoly { coeffs, parity }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_s(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval_s(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn eval_h(&self, h: f64) -> f64 {
        self.eval_s(h.max(0.0).sqrt())
    }

    /// Coefficients in `h` of `M(s)/s` for odd parity, or of `M(s)` for even
    /// parity. `None` for mixed parity.
    pub fn as_h_poly(&self) -> Option<Vec<f64>> {
        match self.parity {
            Parity::Odd => Some(self.coeffs.iter().skip(1).step_by(2).copied().collect()),
            Parity::Even => Some(self.coeffs.iter().step_by(2).copied().collect()),
            Parity::Mixed => None,
        }
    }
}

/// One isolated positive root of a Melnikov-type polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RootInfo {
    /// Root location in the `h` variable, strictly positive.
    pub h: f64,
    /// Whether `|M'(s*)|` clears the simplicity tolerance.
    pub simple: bool,
    /// Magnitude of the derivative at the root.
    pub deriv_mag: f64,
    /// Set when the derivative magnitude sits within a factor 10 of the
    /// simplicity threshold; classification is then unreliable.
    pub borderline: bool,
}

/// Sorted positive roots with simplicity classification.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootReport {
    pub roots: Vec<RootInfo>,
}

impl RootReport {
    pub fn simple_roots(&self) -> impl Iterator<Item = &RootInfo> {
        self.roots.iter().filter(|r| r.simple)
    }
}

/// Isolates the positive `h` roots of `m`.
///
/// Odd/even parity polynomials reduce to a polynomial in `h`; mixed parity is
/// isolated in `s > 0` and mapped through `h = s^2`. An identically zero
/// input is rejected with [`PolyError::IdenticallyZero`] so callers can treat
/// the first-order method as inconclusive.
pub fn positive_roots(m: &SqrtPoly) -> Result<RootReport, PolyError> {
    if m.is_zero() {
        return Err(PolyError::IdenticallyZero);
    }
    let max_coeff = m.coeffs.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    let simple_tol = 1e-9 * max_coeff;

    let (h_coeffs, in_s) = match m.as_h_poly() {
        Some(c) => (c, false),
        None => (m.coeffs.clone(), true),
    };
    let exact: Vec<Rat> = h_coeffs
        .iter()
        .map(|&c| rat_from_f64(c).expect("finite coefficient"))
        .collect();
    let intervals = isolate_positive_roots(&exact);

    let mut roots = Vec::new();
    for (lo, hi) in intervals {
        let lo_f = lo.to_f64().unwrap();
        let hi_f = hi.to_f64().unwrap();
        let var = polish_root(&h_coeffs, lo_f, hi_f, &exact);
        let h = if in_s { var * var } else { var };
        // Simplicity is judged on the s-polynomial per the report contract.
        let s_star = h.sqrt();
        let deriv_mag = eval_deriv(&m.coeffs, s_star).abs();
        let simple = deriv_mag > simple_tol;
        let borderline = deriv_mag > 0.1 * simple_tol && deriv_mag < 10.0 * simple_tol;
        roots.push(RootInfo {
            h,
            simple,
            deriv_mag,
            borderline,
        });
    }
    roots.sort_by(|a, b| a.h.partial_cmp(&b.h).unwrap_or(Ordering::Equal));

    // Sanity: never report more positive roots than Descartes allows.
    let descartes = descartes_bound(&h_coeffs);
    if !in_s {
        assert!(
            roots.len() <= descartes,
            "root count {} exceeds Descartes bound {}",
            roots.len(),
            descartes
        );
    }
    Ok(RootReport { roots })
}

/// Positive roots of a dense rational polynomial in `h` (index = power).
/// Shared by the exact Melnikov path; returns polished floats.
pub fn positive_roots_rational(coeffs: &[Rat], simple_tol: f64) -> RootReport {
    let float: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap()).collect();
    let intervals = isolate_positive_roots(coeffs);
    let mut roots = Vec::new();
    for (lo, hi) in intervals {
        let h = polish_root(&float, lo.to_f64().unwrap(), hi.to_f64().unwrap(), coeffs);
        let deriv_mag = eval_deriv(&float, h).abs();
        let simple = deriv_mag > simple_tol;
        let borderline = deriv_mag > 0.1 * simple_tol && deriv_mag < 10.0 * simple_tol;
        roots.push(RootInfo {
            h,
            simple,
            deriv_mag,
            borderline,
        });
    }
    roots.sort_by(|a, b| a.h.partial_cmp(&b.h).unwrap_or(Ordering::Equal));
    RootReport { roots }
}

/// Descartes sign-variation bound for positive roots.
pub fn descartes_bound(coeffs: &[f64]) -> usize {
    let signs: Vec<i8> = coeffs
        .iter()
        .filter(|&&c| c != 0.0)
        .map(|&c| if c > 0.0 { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

// ---------------------------------------------------------------------------
// Exact univariate machinery (dense, index = power).
// ---------------------------------------------------------------------------

fn utrim(p: &mut Vec<Rat>) {
    while matches!(p.last(), Some(c) if c.is_zero()) {
        p.pop();
    }
}

fn uderiv(p: &[Rat]) -> Vec<Rat> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
        .collect()
}

fn ueval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Remainder of `a / b`; both dense, `b` nonzero.
fn urem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    utrim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let q = &r[dr] / lead;
        for k in 0..=db {
            let idx = dr - db + k;
            let delta = &q * &b[k];
            r[idx] -= delta;
        }
        r.pop();
        utrim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn ugcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    utrim(&mut x);
    utrim(&mut y);
    while !y.is_empty() {
        let r = urem(&x, &y);
        x = y;
        y = r;
    }
    // Normalize to monic to keep coefficient growth in check.
    if let Some(lead) = x.last().cloned() {
        if !lead.is_one() {
            for c in &mut x {
                *c /= &lead;
            }
        }
    }
    x
}

fn sturm_chain(p: &[Rat]) -> Vec<Vec<Rat>> {
    let mut chain = vec![p.to_vec(), uderiv(p)];
    utrim(&mut chain[0]);
    utrim(&mut chain[1]);
    while chain.last().is_some_and(|c| c.len() > 1) {
        let n = chain.len();
        let mut r = urem(&chain[n - 2], &chain[n - 1]);
        for c in &mut r {
            *c = -c.clone();
        }
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[Vec<Rat>], x: &Rat) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = ueval(p, x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Isolating intervals `(lo, hi]` for the distinct positive real roots of the
/// polynomial with the given dense rational coefficients.
pub fn isolate_positive_roots(coeffs: &[Rat]) -> Vec<(Rat, Rat)> {
    let mut p = coeffs.to_vec();
    utrim(&mut p);
    if p.len() <= 1 {
        return Vec::new();
    }
    // Strip roots at the origin.
    let shift = p.iter().take_while(|c| c.is_zero()).count();
    let p: Vec<Rat> = p[shift..].to_vec();
    if p.len() <= 1 {
        return Vec::new();
    }
    // Square-free part.
    let g = ugcd(&p, &uderiv(&p));
    let sf = if g.len() > 1 { udiv_exact(&p, &g) } else { p };

    let chain = sturm_chain(&sf);
    // Cauchy bound on root magnitude.
    let lead = sf.last().unwrap().clone();
    let mut bound = Rat::zero();
    for c in &sf[..sf.len() - 1] {
        let m = (c / &lead).abs();
        if m > bound {
            bound = m;
        }
    }
    bound += Rat::one();

    let zero = Rat::zero();
    let mut out = Vec::new();
    let mut stack = vec![(zero, bound)];
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_changes(&chain, &lo).saturating_sub(sign_changes(&chain, &hi));
        match count {
            0 => {}
            1 => {
                // Shrink the bracket before handing over to float polish.
                let (mut lo, mut hi) = (lo, hi);
                for _ in 0..40 {
                    let mid = (&lo + &hi) / rat_int(2);
                    let c_lo =
                        sign_changes(&chain, &lo).saturating_sub(sign_changes(&chain, &mid));
                    if c_lo == 1 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                out.push((lo, hi));
            }
            _ => {
                let mid = (&lo + &hi) / rat_int(2);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn udiv_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    utrim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![Rat::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / lead;
        q[dr - db] = c.clone();
        for k in 0..=db {
            let idx = dr - db + k;
            let delta = &c * &b[k];
            r[idx] -= delta;
        }
        r.pop();
        utrim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    q
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_deriv(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
}

/// Newton polish seeded from an exact isolating bracket; falls back to
/// bisection on the exact polynomial when Newton wanders.
fn polish_root(coeffs: &[f64], lo: f64, hi: f64, exact: &[Rat]) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let f = eval_poly(coeffs, x);
        let d = eval_deriv(coeffs, x);
        if d == 0.0 {
            break;
        }
        let step = f / d;
        let next = x - step;
        if !next.is_finite() || next < lo - (hi - lo) || next > hi + (hi - lo) {
            break;
        }
        x = next;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            return x;
        }
    }
    // Bisection fallback on the exact polynomial.
    let (mut lo_r, mut hi_r) = (
        rat_from_f64(lo).unwrap(),
        rat_from_f64(hi).unwrap(),
    );
    let sign_lo = ueval(exact, &lo_r).is_positive();
    for _ in 0..80 {
        let mid = (&lo_r + &hi_r) / rat_int(2);
        if ueval(exact, &mid).is_positive() == sign_lo {
            lo_r = mid;
        } else {
            hi_r = mid;
        }
    }
    ((lo_r.to_f64().unwrap()) + hi_r.to_f64().unwrap()) * 0.5
}
