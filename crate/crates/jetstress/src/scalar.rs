//! Scalar coefficient fields on a coordinate chart.
//!
//! Two representations are provided. [`PolyField`] is an exact multivariate
//! polynomial with `f64` coefficients; its partial derivatives and its
//! integral over a box are computed symbolically, so polynomial test cases
//! have closed-form reference values. [`BlackBoxField`] wraps an arbitrary
//! evaluator and differentiates by central finite differences; it exists so
//! that every identity checked exactly on polynomials can be re-checked in a
//! derivative-free mode.
//!
//! [`ScalarField`] is the common enum the rest of the crate works with.
//! Operations stay in the polynomial representation as long as both operands
//! are polynomials and fall back to closures otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::Region;
use crate::error::{Error, Result};

/// Default step for first-order central differences.
pub const FD_STEP_FIRST: f64 = 1e-5;
/// Default step for second and higher-order central differences.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// One monomial of a serialized polynomial: coefficient times
/// `x1^e1 * ... * xn^en`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// Exact multivariate polynomial over `dim` coordinates.
///
/// Terms are keyed by their exponent multi-index; zero coefficients are never
/// stored, so the zero polynomial has no terms and `is_zero` is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl PolyField {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        let mut p = Self::zero(dim);
        if value != 0.0 {
            p.terms.insert(vec![0; dim], value);
        }
        p
    }

    /// The coordinate function of the given axis (0-based).
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut exps = vec![0; dim];
        exps[axis] = 1;
        let mut p = Self::zero(dim);
        p.terms.insert(exps, 1.0);
        p
    }

    /// A single monomial `coeff * x^exponents`.
    pub fn monomial(dim: usize, exponents: &[u32], coeff: f64) -> Self {
        assert_eq!(exponents.len(), dim, "exponent list length must equal dim");
        let mut p = Self::zero(dim);
        if coeff != 0.0 {
            p.terms.insert(exponents.to_vec(), coeff);
        }
        p
    }

    pub fn from_terms(dim: usize, terms: &[PolyTerm]) -> Result<Self> {
        let mut p = Self::zero(dim);
        for t in terms {
            if t.exponents.len() != dim {
                return Err(Error::DimMismatch { expected: dim, got: t.exponents.len() });
            }
            p.add_term(&t.exponents, t.coeff);
        }
        Ok(p)
    }

    pub fn to_terms(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(e, &c)| PolyTerm { exponents: e.clone(), coeff: c })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, exps: &[u32], coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(exps);
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut m = *c;
            for (xi, &e) in x.iter().zip(exps.iter()) {
                m *= xi.powi(e as i32);
            }
            acc += m;
        }
        acc
    }

    /// Exact partial derivative along one axis.
    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let mut out = Self::zero(self.dim);
        for (exps, c) in &self.terms {
            let e = exps[axis];
            if e == 0 {
                continue;
            }
            let mut lowered = exps.clone();
            lowered[axis] = e - 1;
            out.add_term(&lowered, c * e as f64);
        }
        out
    }

    /// Iterated partial derivative described by an exponent multi-index.
    pub fn partial_multi(&self, multi: &[u32]) -> Result<Self> {
        if multi.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: multi.len() });
        }
        let mut out = self.clone();
        for (axis, &reps) in multi.iter().enumerate() {
            for _ in 0..reps {
                out = out.partial(axis);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "polynomial dimensions differ");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e, *c);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.dim);
        if factor != 0.0 {
            for (e, c) in &self.terms {
                out.add_term(e, c * factor);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "polynomial dimensions differ");
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(&exps, ca * cb);
            }
        }
        out
    }

    /// Substitute a constant for one coordinate; the result lives on the
    /// chart with that axis removed.
    pub fn restrict(&self, axis: usize, value: f64) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let mut out = Self::zero(self.dim - 1);
        for (exps, c) in &self.terms {
            let factor = value.powi(exps[axis] as i32);
            let mut rest: Vec<u32> = exps.clone();
            rest.remove(axis);
            out.add_term(&rest, c * factor);
        }
        out
    }

    /// Exact integral over a coordinate box.
    ///
    /// Each monomial integrates in closed form,
    ///
    /// ```text
    /// integral of c * prod_i x_i^(e_i)  =  c * prod_i (hi_i^(e_i+1) - lo_i^(e_i+1)) / (e_i + 1)
    /// ```
    ///
    /// which makes this the reference oracle for every quadrature result in
    /// the crate.
    pub fn integrate_box(&self, region: &Region) -> Result<f64> {
        if region.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: region.dim() });
        }
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut m = *c;
            for (axis, &e) in exps.iter().enumerate() {
                let (lo, hi) = region.bounds()[axis];
                let p = e as i32 + 1;
                m *= (hi.powi(p) - lo.powi(p)) / p as f64;
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Deterministic random polynomial: every monomial of total degree at
    /// most `max_degree` receives a coefficient drawn uniformly from
    /// `[-1, 1]`. The same seed always yields the same field.
    pub fn random(seed: u64, dim: usize, max_degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zero(dim);
        for exps in exponents_up_to(dim, max_degree) {
            let c: f64 = rng.random_range(-1.0..=1.0);
            p.add_term(&exps, c);
        }
        p
    }
}

/// All exponent tuples of length `dim` with total degree <= `max`, in
/// lexicographic order.
fn exponents_up_to(dim: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    fill(&mut out, &mut current, 0, max);
    return out;

    fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, axis: usize, budget: u32) {
        if axis == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=budget {
            current[axis] = e;
            fill(out, current, axis + 1, budget - e);
        }
        current[axis] = 0;
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Scalar field given only through an evaluator.
///
/// Derivatives are not applied eagerly: [`BlackBoxField::partial`] records the
/// request in a multi-index and evaluation dispatches on the total order,
///
/// ```text
/// order 1:  (f(x+h) - f(x-h)) / (2h)                 h = fd_first
/// order 2:  (f(x+h) - 2 f(x) + f(x-h)) / h^2          h = fd_second  (repeated axis)
///           nested central differences with fd_second (mixed axes)
/// ```
///
/// so a twice-differentiated field uses the wider second-order step
/// throughout and keeps the rounding error of the difference quotient in
/// check. Evaluators must accept points up to one step outside the region of
/// interest, since stencils reach past boundary points.
#[derive(Clone)]
pub struct BlackBoxField {
    dim: usize,
    eval_fn: Evaluator,
    deriv: Vec<u32>,
    fd_first: f64,
    fd_second: f64,
}

impl fmt::Debug for BlackBoxField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxField")
            .field("dim", &self.dim)
            .field("deriv", &self.deriv)
            .field("fd_first", &self.fd_first)
            .field("fd_second", &self.fd_second)
            .finish()
    }
}

impl BlackBoxField {
    pub fn from_fn<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            dim,
            eval_fn: Arc::new(f),
            deriv: vec![0; dim],
            fd_first: FD_STEP_FIRST,
            fd_second: FD_STEP_SECOND,
        }
    }

    /// Wrap a polynomial so that all of its derivatives are taken by finite
    /// differences. Used by the harness to re-run exact scenarios in
    /// derivative-free mode.
    pub fn from_poly(p: &PolyField) -> Self {
        let q = p.clone();
        Self::from_fn(p.dim(), move |x| q.eval(x))
    }

    pub fn with_steps(mut self, fd_first: f64, fd_second: f64) -> Self {
        assert!(fd_first > 0.0 && fd_second > 0.0, "finite-difference steps must be positive");
        self.fd_first = fd_first;
        self.fd_second = fd_second;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Pending derivative orders per axis.
    pub fn deriv(&self) -> &[u32] {
        &self.deriv
    }

    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let mut out = self.clone();
        out.deriv[axis] += 1;
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        let order: u32 = self.deriv.iter().sum();
        let h = if order >= 2 { self.fd_second } else { self.fd_first };
        self.eval_deriv(&self.deriv, x, h)
    }

    fn eval_deriv(&self, deriv: &[u32], x: &[f64], h: f64) -> f64 {
        let Some(axis) = deriv.iter().position(|&e| e > 0) else {
            return (self.eval_fn)(x);
        };
        let mut shifted = x.to_vec();
        if deriv[axis] >= 2 {
            let mut lower = deriv.to_vec();
            lower[axis] -= 2;
            shifted[axis] = x[axis] + h;
            let fp = self.eval_deriv(&lower, &shifted, h);
            shifted[axis] = x[axis] - h;
            let fm = self.eval_deriv(&lower, &shifted, h);
            let f0 = self.eval_deriv(&lower, x, h);
            (fp - 2.0 * f0 + fm) / (h * h)
        } else {
            let mut lower = deriv.to_vec();
            lower[axis] -= 1;
            shifted[axis] = x[axis] + h;
            let fp = self.eval_deriv(&lower, &shifted, h);
            shifted[axis] = x[axis] - h;
            let fm = self.eval_deriv(&lower, &shifted, h);
            (fp - fm) / (2.0 * h)
        }
    }

    /// Freeze one coordinate. Pending derivatives along any axis are baked
    /// into the new evaluator first, so the result is a plain field on the
    /// smaller chart.
    pub fn restrict(&self, axis: usize, value: f64) -> Self {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let inner = self.clone();
        let dim = self.dim - 1;
        Self {
            dim,
            eval_fn: Arc::new(move |y: &[f64]| {
                let mut full = Vec::with_capacity(y.len() + 1);
                full.extend_from_slice(&y[..axis]);
                full.push(value);
                full.extend_from_slice(&y[axis..]);
                inner.eval(&full)
            }),
            deriv: vec![0; dim],
            fd_first: self.fd_first,
            fd_second: self.fd_second,
        }
    }
}

/// Central finite difference of a black-box field along one axis.
pub fn fd_partial(f: &BlackBoxField, axis: usize, point: &[f64]) -> f64 {
    f.partial(axis).eval(point)
}

/// Common scalar-field representation used by forms, jets, and stresses.
#[derive(Clone, Debug)]
pub enum ScalarField {
    Poly(PolyField),
    BlackBox(BlackBoxField),
}

impl From<PolyField> for ScalarField {
    fn from(p: PolyField) -> Self {
        ScalarField::Poly(p)
    }
}

impl From<BlackBoxField> for ScalarField {
    fn from(b: BlackBoxField) -> Self {
        ScalarField::BlackBox(b)
    }
}

impl ScalarField {
    pub fn zero(dim: usize) -> Self {
        PolyField::zero(dim).into()
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        PolyField::constant(dim, value).into()
    }

    pub fn dim(&self) -> usize {
        match self {
            ScalarField::Poly(p) => p.dim(),
            ScalarField::BlackBox(b) => b.dim(),
        }
    }

    /// True only for the polynomial zero; used to keep products sparse.
    pub fn is_exactly_zero(&self) -> bool {
        matches!(self, ScalarField::Poly(p) if p.is_zero())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Poly(p) => p.eval(x),
            ScalarField::BlackBox(b) => b.eval(x),
        }
    }

    pub fn partial(&self, axis: usize) -> Self {
        match self {
            ScalarField::Poly(p) => p.partial(axis).into(),
            ScalarField::BlackBox(b) => b.partial(axis).into(),
        }
    }

    pub fn partial_multi(&self, multi: &[u32]) -> Result<Self> {
        if multi.len() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: multi.len() });
        }
        let mut out = self.clone();
        for (axis, &reps) in multi.iter().enumerate() {
            for _ in 0..reps {
                out = out.partial(axis);
            }
        }
        Ok(out)
    }

    pub fn restrict(&self, axis: usize, value: f64) -> Self {
        match self {
            ScalarField::Poly(p) => p.restrict(axis, value).into(),
            ScalarField::BlackBox(b) => b.restrict(axis, value).into(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "field dimensions differ");
        match (self, other) {
            (ScalarField::Poly(a), ScalarField::Poly(b)) => a.add(b).into(),
            _ => {
                if self.is_exactly_zero() {
                    return other.clone();
                }
                if other.is_exactly_zero() {
                    return self.clone();
                }
                let a = self.clone();
                let b = other.clone();
                BlackBoxField::from_fn(self.dim(), move |x| a.eval(x) + b.eval(x)).into()
            }
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        match self {
            ScalarField::Poly(p) => p.scale(factor).into(),
            ScalarField::BlackBox(b) => {
                let inner = b.clone();
                BlackBoxField::from_fn(b.dim(), move |x| factor * inner.eval(x)).into()
            }
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "field dimensions differ");
        if self.is_exactly_zero() || other.is_exactly_zero() {
            return Self::zero(self.dim());
        }
        match (self, other) {
            (ScalarField::Poly(a), ScalarField::Poly(b)) => a.mul(b).into(),
            _ => {
                let a = self.clone();
                let b = other.clone();
                BlackBoxField::from_fn(self.dim(), move |x| a.eval(x) * b.eval(x)).into()
            }
        }
    }

    /// Force the finite-difference representation (identity on black boxes).
    pub fn to_blackbox(&self) -> Self {
        match self {
            ScalarField::Poly(p) => BlackBoxField::from_poly(p).into(),
            ScalarField::BlackBox(_) => self.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Region;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    #[test]
    fn partial_multi_works() {
        // d/dx1 d/dx2 of (x1)^2 x2 = 2 x1
        let p = PolyField::monomial(2, &[2, 1], 1.0);
        let q = p.partial_multi(&[1, 1]).unwrap();
        assert_eq!(q, PolyField::monomial(2, &[1, 0], 2.0));
    }

    #[test]
    fn partial_multi_annihilates_low_degree() {
        let p = PolyField::coordinate(2, 0);
        let q = p.partial_multi(&[2, 0]).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn partial_multi_order_zero_is_identity() {
        let p = PolyField::random(7, 3, 3);
        assert_eq!(p.partial_multi(&[0, 0, 0]).unwrap(), p);
    }

    #[test]
    fn partial_multi_captures_errors() {
        let p = PolyField::random(7, 3, 2);
        assert!(p.partial_multi(&[1, 0]).is_err());
    }

    #[test]
    fn integrate_box_works() {
        let square = Region::unit_box(2).unwrap();
        let p = PolyField::monomial(2, &[1, 1], 1.0);
        assert_close(p.integrate_box(&square).unwrap(), 0.25, 1e-15);

        let cube = Region::unit_box(3).unwrap();
        assert_close(PolyField::constant(3, 1.0).integrate_box(&cube).unwrap(), 1.0, 1e-15);

        let rect = Region::from_bounds(&[(0.0, 2.0), (0.0, 1.0)]).unwrap();
        let x1 = PolyField::coordinate(2, 0);
        assert_close(x1.integrate_box(&rect).unwrap(), 2.0, 1e-15);
    }

    #[test]
    fn restrict_substitutes_coordinate() {
        // x1^2 x2 at x1 = 2 becomes 4 x2
        let p = PolyField::monomial(2, &[2, 1], 1.0);
        let r = p.restrict(0, 2.0);
        assert_eq!(r, PolyField::monomial(1, &[1], 4.0));
    }

    #[test]
    fn fd_partial_works() {
        let f = BlackBoxField::from_fn(2, |x| x[0] * x[1]);
        let got = fd_partial(&f, 0, &[0.5, 0.3]);
        assert_close(got, 0.3, 1e-9);
    }

    #[test]
    fn fd_partial_of_constant_is_zero() {
        let f = BlackBoxField::from_fn(2, |_| 4.0);
        assert_close(fd_partial(&f, 1, &[0.5, 0.3]), 0.0, 1e-12);
    }

    #[test]
    fn fd_second_derivatives_work() {
        // f = exp(x1 + 2 x2): d2f/dx1dx2 = 2 f, d2f/dx2^2 = 4 f
        let f = BlackBoxField::from_fn(2, |x| (x[0] + 2.0 * x[1]).exp());
        let at = [0.2f64, -0.1];
        let exact = (at[0] + 2.0 * at[1]).exp();
        let mixed = f.partial(0).partial(1).eval(&at);
        assert_close(mixed, 2.0 * exact, 1e-6);
        let pure = f.partial(1).partial(1).eval(&at);
        assert_close(pure, 4.0 * exact, 1e-5);
    }

    #[test]
    fn fd_convergence_is_second_order() {
        // Halving the step must shrink the error by roughly a factor of 4;
        // 3.5 leaves headroom for rounding noise at these step sizes.
        let exact_first = |x: &[f64]| (x[0] + 2.0 * x[1]).exp();
        let at = [0.3, 0.1];
        let truth = exact_first(&at);

        let coarse = BlackBoxField::from_fn(2, |x| (x[0] + 2.0 * x[1]).exp())
            .with_steps(1e-2, 1e-2);
        let fine = coarse.clone().with_steps(5e-3, 5e-3);
        let err_coarse = (coarse.partial(0).eval(&at) - truth).abs();
        let err_fine = (fine.partial(0).eval(&at) - truth).abs();
        assert!(
            err_coarse / err_fine >= 3.5,
            "first-order ratio {} too small",
            err_coarse / err_fine
        );

        let coarse2 = BlackBoxField::from_fn(2, |x| (x[0] + 2.0 * x[1]).exp())
            .with_steps(1e-2, 1e-2);
        let fine2 = coarse2.clone().with_steps(5e-3, 5e-3);
        let truth2 = 2.0 * truth;
        let err_coarse2 = (coarse2.partial(0).partial(1).eval(&at) - truth2).abs();
        let err_fine2 = (fine2.partial(0).partial(1).eval(&at) - truth2).abs();
        assert!(
            err_coarse2 / err_fine2 >= 3.5,
            "second-order ratio {} too small",
            err_coarse2 / err_fine2
        );
    }

    #[test]
    fn blackbox_restrict_bakes_pending_derivative() {
        // d/dx1 of x1^2 x2, then restricted to x1 = 1, is 2 x2.
        let f = BlackBoxField::from_fn(2, |x| x[0] * x[0] * x[1]);
        let g = f.partial(0).restrict(0, 1.0);
        assert_eq!(g.dim(), 1);
        assert_close(g.eval(&[0.7]), 1.4, 1e-8);
    }

    #[test]
    fn random_poly_is_deterministic() {
        let a = PolyField::random(1, 2, 3);
        let b = PolyField::random(1, 2, 3);
        assert_eq!(a, b);
        assert!(a.total_degree() <= 3);
        let c = PolyField::random(2, 2, 3);
        assert_ne!(a, c);
    }

    #[test]
    fn random_poly_respects_degree_bound() {
        for seed in 0..5 {
            let p = PolyField::random(seed, 3, 2);
            assert!(p.total_degree() <= 2);
        }
    }

    #[test]
    fn scalar_field_mixed_ops_promote() {
        let p = ScalarField::from(PolyField::coordinate(2, 0));
        let b = ScalarField::from(BlackBoxField::from_fn(2, |x| x[1]));
        let prod = p.mul(&b);
        assert!(matches!(prod, ScalarField::BlackBox(_)));
        assert_close(prod.eval(&[2.0, 3.0]), 6.0, 1e-12);
    }

    fn arb_poly(dim: usize) -> impl Strategy<Value = PolyField> {
        proptest::collection::vec(
            (proptest::collection::vec(0u32..3, dim), -2.0f64..2.0),
            0..6,
        )
        .prop_map(move |terms| {
            let mut p = PolyField::zero(dim);
            for (e, c) in terms {
                p.add_term(&e, c);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn mixed_partials_commute(p in arb_poly(3)) {
            let ab = p.partial(0).partial(2);
            let ba = p.partial(2).partial(0);
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn partial_is_linear(p in arb_poly(2), q in arb_poly(2), c in -3.0f64..3.0) {
            let lhs = p.add(&q.scale(c)).partial(1);
            let rhs = p.partial(1).add(&q.partial(1).scale(c));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_rule_holds_pointwise(p in arb_poly(2), q in arb_poly(2)) {
            let x = [0.37, -0.81];
            let lhs = p.mul(&q).partial(0).eval(&x);
            let rhs = p.partial(0).eval(&x) * q.eval(&x) + p.eval(&x) * q.partial(0).eval(&x);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }
}
