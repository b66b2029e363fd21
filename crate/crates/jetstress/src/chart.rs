//! Coordinate boxes, their oriented boundary faces, and tensor-product
//! Gauss-Legendre quadrature.
//!
//! A [`Region`] is an axis-aligned box carrying the standard orientation of
//! its chart. Its boundary consists of `2n` faces; the face where axis `k`
//! (0-based) is at its upper bound carries the induced sign `(-1)^k`, the
//! opposite face the negated sign. With this convention the Stokes identity
//!
//! ```text
//! integral_B d(omega)  =  sum over faces of  integral_face (pullback of omega)
//! ```
//!
//! holds on every box, which the form tests check directly.

use crate::error::{Error, Result};
use crate::forms::FormField;

/// Axis-aligned box with the standard chart orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    dim: usize,
    bounds: Vec<(f64, f64)>,
    orientation: f64,
}

impl Region {
    /// Build a box from per-axis bounds. Bounds must be finite with
    /// `lo < hi` on every axis.
    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::EmptyRegion);
        }
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidBounds { axis, lo, hi });
            }
        }
        Ok(Self { dim: bounds.len(), bounds: bounds.to_vec(), orientation: 1.0 })
    }

    /// The unit box `[0,1]^dim`.
    pub fn unit_box(dim: usize) -> Result<Self> {
        Self::from_bounds(&vec![(0.0, 1.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Orientation sign of the chart; always `+1` for boxes built here.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    /// The `2 * dim` oriented boundary faces, low side first per axis.
    pub fn boundary_faces(&self) -> Vec<OrientedFace> {
        let mut faces = Vec::with_capacity(2 * self.dim);
        for axis in 0..self.dim {
            faces.push(OrientedFace::new(self.clone(), axis, Side::Lo));
            faces.push(OrientedFace::new(self.clone(), axis, Side::Hi));
        }
        faces
    }

    /// Deterministic interior sample point from an external RNG stream.
    pub fn sample_point<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..hi))
            .collect()
    }
}

/// Which side of an axis a boundary face lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// One boundary face of a box, together with its induced orientation sign.
#[derive(Clone, Debug)]
pub struct OrientedFace {
    region: Region,
    axis: usize,
    side: Side,
    induced_sign: f64,
}

impl OrientedFace {
    fn new(region: Region, axis: usize, side: Side) -> Self {
        let base = if axis % 2 == 0 { 1.0 } else { -1.0 };
        let sign = match side {
            Side::Hi => base * region.orientation(),
            Side::Lo => -base * region.orientation(),
        };
        Self { region, axis, side, induced_sign: sign }
    }

    /// The ambient axis held fixed on this face (0-based).
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Sign carried by this face in the Stokes identity.
    pub fn induced_sign(&self) -> f64 {
        self.induced_sign
    }

    /// The constant value of the fixed coordinate.
    pub fn fixed_value(&self) -> f64 {
        let (lo, hi) = self.region.bounds()[self.axis];
        match self.side {
            Side::Lo => lo,
            Side::Hi => hi,
        }
    }

    pub fn ambient_region(&self) -> &Region {
        &self.region
    }

    /// The face as a box in its own chart (the remaining axes, in ascending
    /// order). `None` when the ambient region is one-dimensional and the
    /// face is a single point.
    pub fn chart_region(&self) -> Option<Region> {
        if self.region.dim() == 1 {
            return None;
        }
        let bounds: Vec<(f64, f64)> = self
            .region
            .bounds()
            .iter()
            .enumerate()
            .filter(|(a, _)| *a != self.axis)
            .map(|(_, b)| *b)
            .collect();
        Some(Region::from_bounds(&bounds).expect("face bounds inherit validity"))
    }

    /// Ambient axis of the face-chart coordinate at position `pos`.
    pub fn chart_axis(&self, pos: usize) -> usize {
        if pos < self.axis {
            pos
        } else {
            pos + 1
        }
    }

    /// Embed a face-chart point into the ambient chart.
    pub fn embed(&self, face_point: &[f64]) -> Vec<f64> {
        assert_eq!(face_point.len(), self.region.dim() - 1, "face point has wrong dimension");
        let mut out = Vec::with_capacity(self.region.dim());
        out.extend_from_slice(&face_point[..self.axis]);
        out.push(self.fixed_value());
        out.extend_from_slice(&face_point[self.axis..]);
        out
    }
}

/// Gauss-Legendre rule on `[-1, 1]`, applied per axis as a tensor product.
///
/// An `order`-point rule integrates polynomials of degree `2 * order - 1`
/// exactly on each axis. The default order is 8 (degree 15), comfortably
/// above every polynomial degree exercised by the verification harness.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::BadQuadratureOrder);
        }
        let (nodes, weights) = gauss_legendre(order);
        Ok(Self { order, nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Highest per-axis polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.order - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate an arbitrary evaluator over a box.
    pub fn integrate_fn<F>(&self, region: &Region, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = region.dim();
        let mut mids = Vec::with_capacity(n);
        let mut halves = Vec::with_capacity(n);
        for &(lo, hi) in region.bounds() {
            mids.push(0.5 * (lo + hi));
            halves.push(0.5 * (hi - lo));
        }
        let jacobian: f64 = halves.iter().product();

        let mut idx = vec![0usize; n];
        let mut point = vec![0.0f64; n];
        let mut acc = 0.0;
        loop {
            let mut w = 1.0;
            for axis in 0..n {
                let t = self.nodes[idx[axis]];
                point[axis] = mids[axis] + halves[axis] * t;
                w *= self.weights[idx[axis]];
            }
            acc += w * f(&point);

            // odometer over the tensor-product grid
            let mut axis = 0;
            loop {
                idx[axis] += 1;
                if idx[axis] < self.order {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
                if axis == n {
                    return acc * jacobian * region.orientation();
                }
            }
        }
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::new(8).expect("default order is valid")
    }
}

/// Integrate a top-degree form over a box.
pub fn integrate_top_form(omega: &FormField, region: &Region, rule: &QuadratureRule) -> Result<f64> {
    if omega.dim() != region.dim() {
        return Err(Error::DimMismatch { expected: region.dim(), got: omega.dim() });
    }
    if omega.degree() != region.dim() {
        return Err(Error::BadDegree { degree: omega.degree(), dim: region.dim() });
    }
    let density = &omega.components()[0];
    Ok(rule.integrate_fn(region, |x| density.eval(x)))
}

/// Integrate an ambient form of degree `n - 1` over one oriented face,
/// pulling it back to the face chart and applying the face's induced sign.
///
/// For a one-dimensional region the faces are points and the form has degree
/// zero, so the "integral" is a signed evaluation.
pub fn integrate_face_form(
    omega: &FormField,
    face: &OrientedFace,
    rule: &QuadratureRule,
) -> Result<f64> {
    let n = face.ambient_region().dim();
    if omega.dim() != n {
        return Err(Error::DimMismatch { expected: n, got: omega.dim() });
    }
    if omega.degree() + 1 != n {
        return Err(Error::BadDegree { degree: omega.degree(), dim: n });
    }
    if n == 1 {
        let value = omega.components()[0].eval(&[face.fixed_value()]);
        return Ok(face.induced_sign() * value);
    }
    let pulled = crate::forms::pullback_to_face(omega, face)?;
    let chart = face.chart_region().expect("n >= 2 has a face chart");
    let density = &pulled.components()[0];
    Ok(face.induced_sign() * rule.integrate_fn(&chart, |y| density.eval(y)))
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`,
/// found by Newton iteration on the Legendre recurrence.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess, accurate enough for Newton to
        // converge in a handful of steps for any practical order.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = -p / d;
            x += dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Recompute weights in sorted node order.
    for i in 0..n {
        let (_, d) = legendre_with_derivative(n, nodes[i]);
        weights[i] = 2.0 / ((1.0 - nodes[i] * nodes[i]) * d * d);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n` and its derivative at `x`, via the three-term
/// recurrence `(k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
