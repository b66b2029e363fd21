//! First- and second-order stresses in coordinates, their tractions and
//! divergences, and the boundary machinery for coordinate boxes.
//!
//! # First order
//!
//! A variational stress on an `n`-chart with fiber dimension `d` is the pair
//! of coefficient families `(R_alpha, S^i_alpha)` acting on first jets:
//!
//! ```text
//! S(j^1 w) = ( sum_a R_a w^a + sum_{a,i} S^i_a w^a_{,i} ) dx^1 ^ ... ^ dx^n
//! ```
//!
//! The traction drops `R` and contracts the derivative block with the chart
//! volume element, giving the boundary-force form
//!
//! ```text
//! sigma_(omit k),a = (-1)^k S^k_a            (k the omitted axis, 0-based)
//! ```
//!
//! and the divergence is the zeroth-order stress with coefficient
//! `S^k_{a,k} - R_a`, fixed by the pointwise identity
//!
//! ```text
//! S(j^1 w) = d(sigma(w)) - div S(w)
//! ```
//!
//! which holds exactly for polynomial data and is enforced by
//! [`divergence_residual`].
//!
//! # Second order
//!
//! Second-order stresses are handled through first-jet bundles of first-jet
//! bundles: a non-holonomic stress `Y` is a plain variational stress whose
//! fiber is the first-jet fiber, with blocks `(Y0, Y1, Y2, Y3)` acting on
//! iterated jet values `(B0, B1, B2, B3)`. Every second-order operation here
//! is the corresponding first-order operation across that identification
//! ([`NonHolonomicStress::as_first_order`]), so the second-order calculus is
//! literally a reuse of the first-order one:
//!
//! * [`NonHolonomicStress::traction`] gives the boundary object `Z` acting on
//!   first-jet values along each face;
//! * [`NonHolonomicStress::divergence`] lands back in a first-order stress
//!   over the original fiber, so it can be divided and tracted once more;
//! * [`boundary_divergence`] reads `Z` on a face as a first-order stress on
//!   the face chart, over the doubled fiber `(u, v)` with `v` the normal
//!   derivative of `u`, and splits it into a face traction and a face
//!   divergence.
//!
//! # Edges of boxes
//!
//! On a box the boundary is only piecewise smooth. The face-by-face
//! integration by parts leaves the oriented edge evaluations of the face
//! tractions, and two faces meeting at an edge cancel there exactly when the
//! off-diagonal symmetric part of `Y3` vanishes on that edge. Stresses with a
//! nonzero symmetric part exert genuine wedge forces on the skeleton, and the
//! closed four-term identity does not hold for them on a box; the harness
//! generates edge-compatible stresses (free diagonal, antisymmetric
//! off-diagonal `Y3`) for the identity suites and reports the edge sum
//! separately so the defect is visible rather than hidden.

use crate::chart::OrientedFace;
use crate::error::{Error, Result};
use crate::forms::{increasing_tuples, tuple_index, FormField};
use crate::jets::{
    enumerate_sym, iterate_prolong, jet1_deriv_slot, jet1_fiber_dim, jet1_value_slot,
    sym2_position, sym_count, tuple_to_exponents, IteratedJetPoint, Jet1Section, JetPoint, Section,
};
use crate::scalar::{PolyField, ScalarField};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// First-order variational stress: coefficients `R` (one per fiber slot) and
/// `S` (one per fiber slot and chart axis, stored `s[slot * n + i]`).
#[derive(Clone, Debug)]
pub struct VariationalStress {
    n: usize,
    d: usize,
    r: Vec<ScalarField>,
    s: Vec<ScalarField>,
}

impl VariationalStress {
    pub fn new(n: usize, d: usize, r: Vec<ScalarField>, s: Vec<ScalarField>) -> Result<Self> {
        if r.len() != d {
            return Err(Error::ComponentCount { expected: d, got: r.len() });
        }
        if s.len() != d * n {
            return Err(Error::ComponentCount { expected: d * n, got: s.len() });
        }
        for c in r.iter().chain(s.iter()) {
            if c.dim() != n {
                return Err(Error::DimMismatch { expected: n, got: c.dim() });
            }
        }
        Ok(Self { n, d, r, s })
    }

    pub fn zero(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            r: vec![ScalarField::zero(n); d],
            s: vec![ScalarField::zero(n); d * n],
        }
    }

    /// Deterministic random stress with polynomial coefficients of total
    /// degree at most `max_degree`.
    pub fn random(seed: u64, n: usize, d: usize, max_degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = |rng: &mut ChaCha8Rng| -> ScalarField {
            ScalarField::from(PolyField::random(rng.random::<u64>(), n, max_degree))
        };
        let r = (0..d).map(|_| field(&mut rng)).collect();
        let s = (0..d * n).map(|_| field(&mut rng)).collect();
        Self { n, d, r, s }
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    pub fn r_field(&self, alpha: usize) -> &ScalarField {
        &self.r[alpha]
    }

    pub fn s_field(&self, alpha: usize, i: usize) -> &ScalarField {
        &self.s[alpha * self.n + i]
    }

    /// Pointwise action on a first-jet value.
    pub fn eval(&self, jet: &JetPoint, point: &[f64]) -> Result<f64> {
        if jet.base_dim() != self.n || jet.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: jet.fiber_dim() });
        }
        if jet.order() < 1 {
            return Err(Error::OrderMismatch { requested: 1, available: jet.order() });
        }
        let mut acc = 0.0;
        for alpha in 0..self.d {
            acc += self.r[alpha].eval(point) * jet.value(alpha);
            for i in 0..self.n {
                acc += self.s[alpha * self.n + i].eval(point) * jet.first(alpha, i);
            }
        }
        Ok(acc)
    }

    /// Density of the action against a first-jet *section*, paired fiberwise
    /// (no derivatives of the argument are taken).
    pub fn fiber_action_density(&self, a: &Jet1Section) -> Result<ScalarField> {
        if a.base_dim() != self.n || a.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: a.fiber_dim() });
        }
        let mut acc = ScalarField::zero(self.n);
        for alpha in 0..self.d {
            acc = acc.add(&self.r[alpha].mul(a.value_field(alpha)));
            for i in 0..self.n {
                acc = acc.add(&self.s[alpha * self.n + i].mul(a.deriv_field(alpha, i)));
            }
        }
        Ok(acc)
    }

    /// Density of the first-order action `S(j^1 w)` as a scalar field; wrap
    /// in [`FormField::top`] to integrate it.
    pub fn action_density(&self, w: &Section) -> Result<ScalarField> {
        self.fiber_action_density(&Jet1Section::prolongation(w))
    }

    /// The principal part: same derivative coefficients, zero `R` block.
    /// Agrees with the full stress on jets whose value part vanishes.
    pub fn vertical_symbol(&self) -> Self {
        Self {
            n: self.n,
            d: self.d,
            r: vec![ScalarField::zero(self.n); self.d],
            s: self.s.clone(),
        }
    }

    /// Traction induced on boundaries: `sigma_(omit k),a = (-1)^k S^k_a`.
    pub fn traction(&self) -> TractionStress {
        let mut sigma = Vec::with_capacity(self.n * self.d);
        for k in 0..self.n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for alpha in 0..self.d {
                sigma.push(self.s[alpha * self.n + k].scale(sign));
            }
        }
        TractionStress { n: self.n, d: self.d, sigma }
    }

    /// The zeroth-order stress with coefficient `S^k_{a,k} - R_a` on each
    /// fiber slot, so that `S(j^1 w) = d(sigma(w)) - div S(w)` pointwise.
    pub fn divergence(&self) -> Self {
        let mut r = Vec::with_capacity(self.d);
        for alpha in 0..self.d {
            let mut acc = self.r[alpha].neg();
            for k in 0..self.n {
                acc = acc.add(&self.s[alpha * self.n + k].partial(k));
            }
            r.push(acc);
        }
        Self {
            n: self.n,
            d: self.d,
            r,
            s: vec![ScalarField::zero(self.n); self.d * self.n],
        }
    }

    /// Negation of the divergence: the body-force density balancing the
    /// stress in the virtual-work identity.
    pub fn body_force(&self) -> Self {
        self.divergence().negated()
    }

    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            d: self.d,
            r: self.r.iter().map(|c| c.neg()).collect(),
            s: self.s.iter().map(|c| c.neg()).collect(),
        }
    }
}

/// Boundary traction: one coefficient per omitted axis `k` and fiber slot,
/// stored `sigma[k * d + slot]`. Applying it to a section produces the
/// `(n-1)`-form whose face integrals are the boundary force.
#[derive(Clone, Debug)]
pub struct TractionStress {
    n: usize,
    d: usize,
    sigma: Vec<ScalarField>,
}

impl TractionStress {
    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    /// Coefficient on the basis form omitting axis `k`, for fiber slot
    /// `alpha`.
    pub fn sigma_field(&self, k: usize, alpha: usize) -> &ScalarField {
        &self.sigma[k * self.d + alpha]
    }

    /// The boundary-force form `sigma(w)`, an ambient `(n-1)`-form.
    pub fn apply(&self, w: &Section) -> Result<FormField> {
        if w.dim() != self.n || w.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: w.fiber_dim() });
        }
        let tuples = increasing_tuples(self.n, self.n - 1);
        let mut comps = vec![ScalarField::zero(self.n); tuples.len()];
        for k in 0..self.n {
            let tuple: Vec<usize> = (0..self.n).filter(|&a| a != k).collect();
            let pos = tuple_index(self.n, &tuple).expect("omission tuple exists");
            let mut acc = ScalarField::zero(self.n);
            for alpha in 0..self.d {
                acc = acc.add(&self.sigma[k * self.d + alpha].mul(w.component(alpha)));
            }
            comps[pos] = acc;
        }
        FormField::new(self.n, self.n - 1, comps)
    }
}

/// Pointwise defect of the definitional identity
/// `d(sigma(w)) - S(j^1 w) - div S(w)`; zero to rounding for polynomial data.
pub fn divergence_residual(stress: &VariationalStress, w: &Section, point: &[f64]) -> Result<f64> {
    let (d_term, action, div_term) = divergence_terms(stress, w, point)?;
    Ok((d_term - action - div_term).abs())
}

/// The three terms of the definitional identity at a point, in the order
/// `(d(sigma(w)), S(j^1 w), div S(w))`.
pub fn divergence_terms(
    stress: &VariationalStress,
    w: &Section,
    point: &[f64],
) -> Result<(f64, f64, f64)> {
    let sigma_w = stress.traction().apply(w)?;
    let d_form = crate::forms::exterior_derivative(&sigma_w)?;
    let d_term = d_form.components()[0].eval(point);
    let action = stress.action_density(w)?.eval(point);
    let div_term = stress.divergence().action_density(w)?.eval(point);
    Ok((d_term, action, div_term))
}

/// The boundary-force form of a stress restricted to one face.
pub fn surface_force(
    stress: &VariationalStress,
    face: &OrientedFace,
    w: &Section,
) -> Result<FormField> {
    let form = stress.traction().apply(w)?;
    crate::forms::pullback_to_face(&form, face)
}

/// Second-order stress acting on 2-jets through the sorted-slot pairing:
/// `S0` per fiber slot, `S1` per slot and axis, `S2` per slot and sorted
/// pair.
#[derive(Clone, Debug)]
pub struct SecondOrderStress {
    n: usize,
    d: usize,
    s0: Vec<ScalarField>,
    s1: Vec<ScalarField>,
    s2: Vec<ScalarField>,
}

impl SecondOrderStress {
    pub fn new(
        n: usize,
        d: usize,
        s0: Vec<ScalarField>,
        s1: Vec<ScalarField>,
        s2: Vec<ScalarField>,
    ) -> Result<Self> {
        if s0.len() != d {
            return Err(Error::ComponentCount { expected: d, got: s0.len() });
        }
        if s1.len() != d * n {
            return Err(Error::ComponentCount { expected: d * n, got: s1.len() });
        }
        let c2 = d * sym_count(n, 2);
        if s2.len() != c2 {
            return Err(Error::ComponentCount { expected: c2, got: s2.len() });
        }
        for c in s0.iter().chain(s1.iter()).chain(s2.iter()) {
            if c.dim() != n {
                return Err(Error::DimMismatch { expected: n, got: c.dim() });
            }
        }
        Ok(Self { n, d, s0, s1, s2 })
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    pub fn s0_field(&self, alpha: usize) -> &ScalarField {
        &self.s0[alpha]
    }

    pub fn s1_field(&self, alpha: usize, i: usize) -> &ScalarField {
        &self.s1[alpha * self.n + i]
    }

    pub fn s2_field(&self, alpha: usize, i: usize, j: usize) -> &ScalarField {
        &self.s2[alpha * sym_count(self.n, 2) + sym2_position(self.n, i, j)]
    }

    /// Pointwise action on a 2-jet value.
    pub fn eval(&self, jet: &JetPoint, point: &[f64]) -> Result<f64> {
        if jet.base_dim() != self.n || jet.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: jet.fiber_dim() });
        }
        if jet.order() < 2 {
            return Err(Error::OrderMismatch { requested: 2, available: jet.order() });
        }
        let c2 = sym_count(self.n, 2);
        let mut acc = 0.0;
        for alpha in 0..self.d {
            acc += self.s0[alpha].eval(point) * jet.value(alpha);
            for i in 0..self.n {
                acc += self.s1[alpha * self.n + i].eval(point) * jet.first(alpha, i);
            }
            for slot in 0..c2 {
                acc += self.s2[alpha * c2 + slot].eval(point) * jet.component(2, alpha, slot);
            }
        }
        Ok(acc)
    }

    /// Density of `S(j^2 u)` as a scalar field.
    pub fn action_density(&self, u: &Section) -> Result<ScalarField> {
        if u.dim() != self.n || u.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: u.fiber_dim() });
        }
        let tuples = enumerate_sym(self.n, 2);
        let mut acc = ScalarField::zero(self.n);
        for alpha in 0..self.d {
            acc = acc.add(&self.s0[alpha].mul(u.component(alpha)));
            for i in 0..self.n {
                acc = acc.add(&self.s1[alpha * self.n + i].mul(&u.component(alpha).partial(i)));
            }
            for (slot, tuple) in tuples.iter().enumerate() {
                let exps = tuple_to_exponents(self.n, tuple);
                let dd = u.component(alpha).partial_multi(&exps)?;
                acc = acc.add(&self.s2[alpha * tuples.len() + slot].mul(&dd));
            }
        }
        Ok(acc)
    }

    /// The canonical non-holonomic extension: value and first-order blocks
    /// move to `Y0` and `Y2`, `Y1` vanishes, and each off-diagonal
    /// second-order coefficient is split evenly between the two `Y3` slots.
    /// Restricting back with [`NonHolonomicStress::restrict_second_order`]
    /// recovers the input exactly.
    pub fn lift_nonholonomic(&self) -> NonHolonomicStress {
        let n = self.n;
        let d = self.d;
        let zero = || ScalarField::zero(n);
        let mut y3 = vec![zero(); d * n * n];
        for alpha in 0..d {
            for i in 0..n {
                for j in i..n {
                    let f = self.s2_field(alpha, i, j);
                    if i == j {
                        y3[(alpha * n + i) * n + i] = f.clone();
                    } else {
                        y3[(alpha * n + i) * n + j] = f.scale(0.5);
                        y3[(alpha * n + j) * n + i] = f.scale(0.5);
                    }
                }
            }
        }
        NonHolonomicStress {
            n,
            d,
            y0: self.s0.clone(),
            y1: vec![zero(); d * n],
            y2: self.s1.clone(),
            y3,
        }
    }
}

/// Stress on iterated first-jet values: blocks `Y0, Y1, Y2, Y3` paired with
/// `B0, B1, B2, B3`, with `y3[(alpha * n + i) * n + j]` the coefficient of
/// `B3[alpha, i, j]`. No symmetry is assumed anywhere.
#[derive(Clone, Debug)]
pub struct NonHolonomicStress {
    n: usize,
    d: usize,
    y0: Vec<ScalarField>,
    y1: Vec<ScalarField>,
    y2: Vec<ScalarField>,
    y3: Vec<ScalarField>,
}

impl NonHolonomicStress {
    pub fn new(
        n: usize,
        d: usize,
        y0: Vec<ScalarField>,
        y1: Vec<ScalarField>,
        y2: Vec<ScalarField>,
        y3: Vec<ScalarField>,
    ) -> Result<Self> {
        if y0.len() != d {
            return Err(Error::ComponentCount { expected: d, got: y0.len() });
        }
        if y1.len() != d * n || y2.len() != d * n {
            return Err(Error::ComponentCount { expected: d * n, got: y1.len().max(y2.len()) });
        }
        if y3.len() != d * n * n {
            return Err(Error::ComponentCount { expected: d * n * n, got: y3.len() });
        }
        for c in y0.iter().chain(y1.iter()).chain(y2.iter()).chain(y3.iter()) {
            if c.dim() != n {
                return Err(Error::DimMismatch { expected: n, got: c.dim() });
            }
        }
        Ok(Self { n, d, y0, y1, y2, y3 })
    }

    pub fn zero(n: usize, d: usize) -> Self {
        let zero = || ScalarField::zero(n);
        Self {
            n,
            d,
            y0: vec![zero(); d],
            y1: vec![zero(); d * n],
            y2: vec![zero(); d * n],
            y3: vec![zero(); d * n * n],
        }
    }

    /// Fully random stress. The identity suites that integrate by parts
    /// twice need [`NonHolonomicStress::random_edge_compatible`] instead;
    /// this generator is for the pointwise and single-integration laws,
    /// which hold for arbitrary coefficients.
    pub fn random(seed: u64, n: usize, d: usize, max_degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = |rng: &mut ChaCha8Rng| -> ScalarField {
            ScalarField::from(PolyField::random(rng.random::<u64>(), n, max_degree))
        };
        let y0 = (0..d).map(|_| field(&mut rng)).collect();
        let y1 = (0..d * n).map(|_| field(&mut rng)).collect();
        let y2 = (0..d * n).map(|_| field(&mut rng)).collect();
        let y3 = (0..d * n * n).map(|_| field(&mut rng)).collect();
        Self { n, d, y0, y1, y2, y3 }
    }

    /// Random stress whose `Y3` block has a free diagonal and an
    /// antisymmetric off-diagonal part.
    ///
    /// The oriented edge evaluations of the face tractions of two faces
    /// meeting at an edge cancel exactly when `Y3_ij + Y3_ji` vanishes there
    /// (for `i != j`); the symmetric part is a genuine wedge force
    /// concentrated on the codimension-2 skeleton of the box. Stresses drawn
    /// here satisfy the cancellation identically, so the closed four-term
    /// identity holds on boxes for them.
    pub fn random_edge_compatible(seed: u64, n: usize, d: usize, max_degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = |rng: &mut ChaCha8Rng| -> ScalarField {
            ScalarField::from(PolyField::random(rng.random::<u64>(), n, max_degree))
        };
        let y0 = (0..d).map(|_| field(&mut rng)).collect();
        let y1 = (0..d * n).map(|_| field(&mut rng)).collect();
        let y2 = (0..d * n).map(|_| field(&mut rng)).collect();
        let mut y3 = vec![ScalarField::zero(n); d * n * n];
        for alpha in 0..d {
            for i in 0..n {
                y3[(alpha * n + i) * n + i] = field(&mut rng);
                for j in i + 1..n {
                    let g = field(&mut rng);
                    y3[(alpha * n + i) * n + j] = g.clone();
                    y3[(alpha * n + j) * n + i] = g.neg();
                }
            }
        }
        Self { n, d, y0, y1, y2, y3 }
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    pub fn y0_field(&self, alpha: usize) -> &ScalarField {
        &self.y0[alpha]
    }

    pub fn y1_field(&self, alpha: usize, i: usize) -> &ScalarField {
        &self.y1[alpha * self.n + i]
    }

    pub fn y2_field(&self, alpha: usize, i: usize) -> &ScalarField {
        &self.y2[alpha * self.n + i]
    }

    pub fn y3_field(&self, alpha: usize, i: usize, j: usize) -> &ScalarField {
        &self.y3[(alpha * self.n + i) * self.n + j]
    }

    /// Pointwise action on an iterated jet value.
    pub fn eval(&self, b: &IteratedJetPoint, point: &[f64]) -> Result<f64> {
        if b.n != self.n || b.d != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: b.d });
        }
        let mut acc = 0.0;
        for alpha in 0..self.d {
            acc += self.y0[alpha].eval(point) * b.b0[alpha];
            for i in 0..self.n {
                acc += self.y1[alpha * self.n + i].eval(point) * b.b1_at(alpha, i);
                acc += self.y2[alpha * self.n + i].eval(point) * b.b2_at(alpha, i);
                for j in 0..self.n {
                    acc += self.y3[(alpha * self.n + i) * self.n + j].eval(point)
                        * b.b3_at(alpha, i, j);
                }
            }
        }
        Ok(acc)
    }

    /// The same data as a first-order variational stress whose fiber is the
    /// first-jet fiber: `Y0`/`Y1` become the `R` block on value/derivative
    /// slots, `Y2`/`Y3` the `S` block. Every second-order operation factors
    /// through this map.
    pub fn as_first_order(&self) -> VariationalStress {
        let n = self.n;
        let d = self.d;
        let big = jet1_fiber_dim(n, d);
        let mut r = vec![ScalarField::zero(n); big];
        let mut s = vec![ScalarField::zero(n); big * n];
        for alpha in 0..d {
            r[jet1_value_slot(n, d, alpha)] = self.y0[alpha].clone();
            for i in 0..n {
                r[jet1_deriv_slot(n, d, alpha, i)] = self.y1[alpha * n + i].clone();
                s[jet1_value_slot(n, d, alpha) * n + i] = self.y2[alpha * n + i].clone();
                for j in 0..n {
                    s[jet1_deriv_slot(n, d, alpha, i) * n + j] =
                        self.y3[(alpha * n + i) * n + j].clone();
                }
            }
        }
        VariationalStress::new(n, big, r, s).expect("validated layout")
    }

    /// Density of the action `Y(j^1 A)` against a first-jet section `A`,
    /// holonomic or not.
    pub fn action_density(&self, a: &Jet1Section) -> Result<ScalarField> {
        if a.base_dim() != self.n || a.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: a.fiber_dim() });
        }
        self.as_first_order().action_density(&a.as_flat_section())
    }

    /// The boundary object `Z`: the traction of the stress across the
    /// first-order identification, acting on first-jet values along faces.
    pub fn traction(&self) -> Jet1Traction {
        Jet1Traction { n: self.n, d: self.d, inner: self.as_first_order().traction() }
    }

    /// Divergence, read back as a first-order stress over the original
    /// fiber:
    ///
    /// ```text
    /// R_a   = Y2^j_{a,j} - Y0_a          (coefficient of the value slot)
    /// S^i_a = Y3^(ij)_{a,j} - Y1^i_a     (coefficient of the derivative slots)
    /// ```
    ///
    /// Because the result is again a variational stress it can be tracted
    /// and divided once more, which is what the second-order identities use.
    pub fn divergence(&self) -> VariationalStress {
        let big_div = self.as_first_order().divergence();
        let n = self.n;
        let d = self.d;
        let mut r = Vec::with_capacity(d);
        let mut s = Vec::with_capacity(d * n);
        for alpha in 0..d {
            r.push(big_div.r_field(jet1_value_slot(n, d, alpha)).clone());
        }
        for alpha in 0..d {
            for i in 0..n {
                s.push(big_div.r_field(jet1_deriv_slot(n, d, alpha, i)).clone());
            }
        }
        VariationalStress::new(n, d, r, s).expect("validated layout")
    }

    /// Divergence of the divergence: a zeroth-order stress on the original
    /// fiber, the interior term of the twice-integrated identity.
    pub fn double_divergence(&self) -> VariationalStress {
        self.divergence().divergence()
    }

    /// Forget the non-holonomic refinement: both first-order blocks add, and
    /// the two off-diagonal `Y3` slots collapse onto each sorted pair. The
    /// antisymmetric part of `Y3` is invisible to this map.
    pub fn restrict_second_order(&self) -> SecondOrderStress {
        let n = self.n;
        let d = self.d;
        let s0 = self.y0.clone();
        let mut s1 = Vec::with_capacity(d * n);
        for idx in 0..d * n {
            s1.push(self.y1[idx].add(&self.y2[idx]));
        }
        let tuples = enumerate_sym(n, 2);
        let mut s2 = Vec::with_capacity(d * tuples.len());
        for alpha in 0..d {
            for tuple in &tuples {
                let (i, j) = (tuple[0], tuple[1]);
                if i == j {
                    s2.push(self.y3_field(alpha, i, i).clone());
                } else {
                    s2.push(self.y3_field(alpha, i, j).add(self.y3_field(alpha, j, i)));
                }
            }
        }
        SecondOrderStress::new(n, d, s0, s1, s2).expect("validated layout")
    }
}

/// The traction of a non-holonomic stress: an `(n-1)`-form-valued functional
/// on first-jet values. Component accessors follow the block naming `Z0`
/// (value slots) and `Z1` (derivative slots).
#[derive(Clone, Debug)]
pub struct Jet1Traction {
    n: usize,
    d: usize,
    inner: TractionStress,
}

impl Jet1Traction {
    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    /// Coefficient of the value slot `alpha` on the form omitting axis `k`.
    pub fn z0_field(&self, k: usize, alpha: usize) -> &ScalarField {
        self.inner.sigma_field(k, jet1_value_slot(self.n, self.d, alpha))
    }

    /// Coefficient of the derivative slot `(alpha, i)` on the form omitting
    /// axis `k`.
    pub fn z1_field(&self, k: usize, i: usize, alpha: usize) -> &ScalarField {
        self.inner.sigma_field(k, jet1_deriv_slot(self.n, self.d, alpha, i))
    }

    /// The `(n-1)`-form `Z(A)` for a first-jet section `A`.
    pub fn apply(&self, a: &Jet1Section) -> Result<FormField> {
        if a.base_dim() != self.n || a.fiber_dim() != self.d {
            return Err(Error::DimMismatch { expected: self.d, got: a.fiber_dim() });
        }
        self.inner.apply(&a.as_flat_section())
    }
}

/// The three boundary objects carried by one face: the restriction of `Z` as
/// a first-order stress on the face chart, its traction (whose oriented edge
/// evaluations appear in the twice-integrated identity), and its divergence
/// (the face term of that identity).
#[derive(Clone, Debug)]
pub struct FacePieces {
    pub face_stress: VariationalStress,
    pub traction: TractionStress,
    pub divergence: VariationalStress,
}

/// Read the traction `Z` on one face as a first-order variational stress on
/// the face chart and split it.
///
/// The face chart only differentiates tangentially, so the ambient first-jet
/// argument decomposes into the doubled fiber `(u, v)` with `v` the normal
/// derivative of `u` (see [`face_jet_section`]):
///
/// * value slots `u`: `R = Z0`, `S^t = Z1` along tangential axes `t`;
/// * normal-derivative slots `v`: `R = Z1` along the face normal, `S = 0`.
///
/// The normal-derivative coefficient has no tangential-derivative partner,
/// so it contributes to the face divergence but never to the face traction.
pub fn face_stress(z: &Jet1Traction, face: &OrientedFace) -> Result<VariationalStress> {
    let n = z.n;
    if face.ambient_region().dim() != n {
        return Err(Error::DimMismatch { expected: n, got: face.ambient_region().dim() });
    }
    if n < 2 {
        return Err(Error::Unsupported(
            "face stresses need an ambient dimension of at least 2".into(),
        ));
    }
    let d = z.d;
    let k = face.axis();
    let c = face.fixed_value();
    let m = n - 1;
    let fiber = 2 * d;
    let mut r = vec![ScalarField::zero(m); fiber];
    let mut s = vec![ScalarField::zero(m); fiber * m];
    for alpha in 0..d {
        r[alpha] = z.z0_field(k, alpha).restrict(k, c);
        r[d + alpha] = z.z1_field(k, k, alpha).restrict(k, c);
        for tau in 0..m {
            let t = face.chart_axis(tau);
            s[alpha * m + tau] = z.z1_field(k, t, alpha).restrict(k, c);
        }
    }
    VariationalStress::new(m, fiber, r, s)
}

/// The doubled-fiber section `(u, du/dx_k)` restricted to a face, matching
/// the fiber layout of [`face_stress`].
pub fn face_jet_section(u: &Section, face: &OrientedFace) -> Result<Section> {
    let n = face.ambient_region().dim();
    if u.dim() != n {
        return Err(Error::DimMismatch { expected: n, got: u.dim() });
    }
    if n < 2 {
        return Err(Error::Unsupported(
            "face sections need an ambient dimension of at least 2".into(),
        ));
    }
    let k = face.axis();
    let c = face.fixed_value();
    let mut comps = Vec::with_capacity(2 * u.fiber_dim());
    for alpha in 0..u.fiber_dim() {
        comps.push(u.component(alpha).restrict(k, c));
    }
    for alpha in 0..u.fiber_dim() {
        comps.push(u.component(alpha).partial(k).restrict(k, c));
    }
    Section::new(n - 1, comps)
}

/// Split the boundary traction on one face into its face-chart traction and
/// face-chart divergence, together with the face stress they come from.
pub fn boundary_divergence(z: &Jet1Traction, face: &OrientedFace) -> Result<FacePieces> {
    let fs = face_stress(z, face)?;
    Ok(FacePieces { traction: fs.traction(), divergence: fs.divergence(), face_stress: fs })
}

/// Evaluate `Y(j^1 j^1 u)` pointwise for an ordinary section `u`.
pub fn eval_on_iterated_jet(
    y: &NonHolonomicStress,
    u: &Section,
    point: &[f64],
) -> Result<f64> {
    let a = Jet1Section::prolongation(u);
    let b = iterate_prolong(&a, point)?;
    y.eval(&b, point)
}

/// Density of `Y(j^1 j^1 u)` as a scalar field.
pub fn iterated_action_density(y: &NonHolonomicStress, u: &Section) -> Result<ScalarField> {
    y.action_density(&Jet1Section::prolongation(u))
}
