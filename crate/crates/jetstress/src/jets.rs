//! Jets of sections, iterated first-order jets, and the maps between them.
//!
//! A `k`-jet of a section `w` of a rank-`d` bundle over an `n`-chart stores,
//! for each order `p <= k`, the symmetric derivative components
//!
//! ```text
//! A^(p,alpha)_I = partial_I w^alpha,      I a nondecreasing p-tuple of axes,
//! ```
//!
//! one slot per *sorted* tuple and no multiplicity weights. Dual objects pair
//! against that storage by a plain sum over sorted tuples; with this
//! convention the restriction of an iterated dual along the holonomic
//! inclusion (see [`restrict_dual`]) is the exact algebraic adjoint of
//! [`include_second`], which the tests check to machine precision.
//!
//! First-order jets of first-order jets live in [`IteratedJetPoint`]: four
//! blocks `B0, B1, B2, B3` with *no* symmetry imposed across `B1`/`B2` or in
//! `B3`. Jets of genuine sections land in the holonomic subset (`B1 = B2`,
//! `B3` symmetric); everything else is a non-holonomic point, and the
//! second-order stress machinery is built to act on all of them.

use crate::error::{Error, Result};
use crate::scalar::ScalarField;

/// Number of nondecreasing `p`-tuples over `n` axes: `C(n+p-1, p)`.
pub fn sym_count(n: usize, p: usize) -> usize {
    crate::forms::binomial(n + p - 1, p)
}

/// All nondecreasing `p`-tuples over axes `0..n`, lexicographically.
///
/// These enumerate the independent symmetric derivative slots of order `p`.
pub fn enumerate_sym(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(sym_count(n, p));
    let mut current = Vec::with_capacity(p);
    fill(&mut out, &mut current, 0, n, p);
    return out;

    fn fill(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, start: usize, n: usize, p: usize) {
        if current.len() == p {
            out.push(current.clone());
            return;
        }
        for a in start..n {
            current.push(a);
            fill(out, current, a, n, p);
            current.pop();
        }
    }
}

/// Position of a sorted tuple within `enumerate_sym(n, p)`.
pub fn sym_position(n: usize, tuple: &[usize]) -> Option<usize> {
    enumerate_sym(n, tuple.len()).iter().position(|t| t == tuple)
}

/// Slot index of the sorted pair `(i, j)` among the order-2 tuples.
pub fn sym2_position(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // Row i starts after the pairs (0,0..n-1), (1,1..n-1), ..., (i-1, ...).
    i * n - i * (i + 1) / 2 + i + (j - i)
}

/// Exponent multi-index of a sorted tuple (how often each axis occurs).
pub fn tuple_to_exponents(n: usize, tuple: &[usize]) -> Vec<u32> {
    let mut exps = vec![0u32; n];
    for &a in tuple {
        exps[a] += 1;
    }
    exps
}

/// Section of a rank-`d` trivial bundle: one scalar field per fiber
/// coordinate.
#[derive(Clone, Debug)]
pub struct Section {
    dim: usize,
    comps: Vec<ScalarField>,
}

impl Section {
    pub fn new(dim: usize, comps: Vec<ScalarField>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::ComponentCount { expected: 1, got: 0 });
        }
        for c in &comps {
            if c.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, got: c.dim() });
            }
        }
        Ok(Self { dim, comps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn component(&self, alpha: usize) -> &ScalarField {
        &self.comps[alpha]
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    /// Switch every component to finite-difference evaluation.
    pub fn to_blackbox(&self) -> Self {
        Self { dim: self.dim, comps: self.comps.iter().map(|c| c.to_blackbox()).collect() }
    }
}

/// Value of a `k`-jet at one point: `comps[p][alpha * sym_count(n, p) + slot]`
/// holds the order-`p` component for fiber index `alpha` and sorted-tuple
/// `slot`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    base_dim: usize,
    fiber_dim: usize,
    comps: Vec<Vec<f64>>,
}

impl JetPoint {
    pub fn from_parts(base_dim: usize, fiber_dim: usize, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::ComponentCount { expected: 1, got: 0 });
        }
        for (p, block) in comps.iter().enumerate() {
            let expected = fiber_dim * sym_count(base_dim, p);
            if block.len() != expected {
                return Err(Error::ComponentCount { expected, got: block.len() });
            }
        }
        Ok(Self { base_dim, fiber_dim, comps })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    /// Jet order `k`.
    pub fn order(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn block(&self, p: usize) -> &[f64] {
        &self.comps[p]
    }

    pub fn component(&self, p: usize, alpha: usize, slot: usize) -> f64 {
        self.comps[p][alpha * sym_count(self.base_dim, p) + slot]
    }

    pub fn value(&self, alpha: usize) -> f64 {
        self.comps[0][alpha]
    }

    pub fn first(&self, alpha: usize, i: usize) -> f64 {
        self.comps[1][alpha * self.base_dim + i]
    }

    pub fn second(&self, alpha: usize, i: usize, j: usize) -> f64 {
        self.component(2, alpha, sym2_position(self.base_dim, i, j))
    }
}

/// Field of order-`k` jet components: one scalar field per order, fiber
/// slot, and sorted derivative tuple, in the same layout as [`JetPoint`].
///
/// Built by [`JetField::from_section`] the component fields are the exact
/// partials of the generating section and the field is holonomic by
/// construction; built directly from arbitrary fields, nothing relates the
/// blocks.
#[derive(Clone, Debug)]
pub struct JetField {
    n: usize,
    d: usize,
    comps: Vec<Vec<ScalarField>>,
}

impl JetField {
    pub fn new(n: usize, d: usize, comps: Vec<Vec<ScalarField>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::ComponentCount { expected: 1, got: 0 });
        }
        for (p, block) in comps.iter().enumerate() {
            let expected = d * sym_count(n, p);
            if block.len() != expected {
                return Err(Error::ComponentCount { expected, got: block.len() });
            }
            for c in block {
                if c.dim() != n {
                    return Err(Error::DimMismatch { expected: n, got: c.dim() });
                }
            }
        }
        Ok(Self { n, d, comps })
    }

    /// Materialize all derivative fields of a section through order `k`.
    pub fn from_section(section: &Section, k: usize) -> Result<Self> {
        let n = section.dim();
        let d = section.fiber_dim();
        let mut comps = Vec::with_capacity(k + 1);
        for p in 0..=k {
            let tuples = enumerate_sym(n, p);
            let mut block = Vec::with_capacity(d * tuples.len());
            for alpha in 0..d {
                for tuple in &tuples {
                    let exps = tuple_to_exponents(n, tuple);
                    block.push(section.component(alpha).partial_multi(&exps)?);
                }
            }
            comps.push(block);
        }
        Self::new(n, d, comps)
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn component_field(&self, p: usize, alpha: usize, slot: usize) -> &ScalarField {
        &self.comps[p][alpha * sym_count(self.n, p) + slot]
    }

    /// The jet value carried at one point.
    pub fn value_at(&self, point: &[f64]) -> Result<JetPoint> {
        if point.len() != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: point.len() });
        }
        let comps = self
            .comps
            .iter()
            .map(|block| block.iter().map(|c| c.eval(point)).collect())
            .collect();
        JetPoint::from_parts(self.n, self.d, comps)
    }
}

/// The `k`-jet of a section at a point: exact mixed partials for polynomial
/// components, central differences for black boxes.
pub fn prolong(section: &Section, k: usize, point: &[f64]) -> Result<JetPoint> {
    if point.len() != section.dim() {
        return Err(Error::DimMismatch { expected: section.dim(), got: point.len() });
    }
    JetField::from_section(section, k)?.value_at(point)
}

/// Truncate a jet to a lower order (the bundle projection).
pub fn project(jet: &JetPoint, p: usize) -> Result<JetPoint> {
    if p > jet.order() {
        return Err(Error::OrderMismatch { requested: p, available: jet.order() });
    }
    JetPoint::from_parts(
        jet.base_dim(),
        jet.fiber_dim(),
        jet.comps[..=p].to_vec(),
    )
}

/// Fiber dimension of the first-jet bundle seen as a plain bundle:
/// one value slot plus `n` derivative slots per original fiber coordinate.
pub fn jet1_fiber_dim(n: usize, d: usize) -> usize {
    d * (1 + n)
}

/// Flat slot of the value component `A^(0,alpha)`.
pub fn jet1_value_slot(_n: usize, _d: usize, alpha: usize) -> usize {
    alpha
}

/// Flat slot of the derivative component `A^(1,alpha)_i`.
pub fn jet1_deriv_slot(n: usize, d: usize, alpha: usize, i: usize) -> usize {
    d + alpha * n + i
}

/// Section of the first-jet bundle: value fields `A0` and derivative fields
/// `A1`, *not* required to come from a single underlying section.
///
/// `A1` is stored as `a1[alpha * n + i]`. A section built by
/// [`Jet1Section::prolongation`] is holonomic; independently chosen `A0`,
/// `A1` give the non-holonomic sections the second-order machinery acts on.
#[derive(Clone, Debug)]
pub struct Jet1Section {
    n: usize,
    d: usize,
    a0: Vec<ScalarField>,
    a1: Vec<ScalarField>,
}

impl Jet1Section {
    pub fn new(n: usize, d: usize, a0: Vec<ScalarField>, a1: Vec<ScalarField>) -> Result<Self> {
        if a0.len() != d {
            return Err(Error::ComponentCount { expected: d, got: a0.len() });
        }
        if a1.len() != d * n {
            return Err(Error::ComponentCount { expected: d * n, got: a1.len() });
        }
        for c in a0.iter().chain(a1.iter()) {
            if c.dim() != n {
                return Err(Error::DimMismatch { expected: n, got: c.dim() });
            }
        }
        Ok(Self { n, d, a0, a1 })
    }

    /// The holonomic first-jet section `j^1 u` of an ordinary section.
    pub fn prolongation(u: &Section) -> Self {
        let n = u.dim();
        let d = u.fiber_dim();
        let a0: Vec<ScalarField> = u.components().to_vec();
        let mut a1 = Vec::with_capacity(d * n);
        for alpha in 0..d {
            for i in 0..n {
                a1.push(u.component(alpha).partial(i));
            }
        }
        Self { n, d, a0, a1 }
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    pub fn value_field(&self, alpha: usize) -> &ScalarField {
        &self.a0[alpha]
    }

    pub fn deriv_field(&self, alpha: usize, i: usize) -> &ScalarField {
        &self.a1[alpha * self.n + i]
    }

    /// Reading the jet section as a plain section of a larger bundle, with
    /// the slot layout of [`jet1_value_slot`] and [`jet1_deriv_slot`]. This is
    /// the bridge that lets first-order stress operations act on second-order
    /// objects.
    pub fn as_flat_section(&self) -> Section {
        let mut comps = Vec::with_capacity(jet1_fiber_dim(self.n, self.d));
        comps.extend(self.a0.iter().cloned());
        comps.extend(self.a1.iter().cloned());
        Section::new(self.n, comps).expect("validated layout")
    }

    /// The fiber value at a point, as an order-1 jet record.
    pub fn value_at(&self, point: &[f64]) -> JetPoint {
        let values: Vec<f64> = self.a0.iter().map(|c| c.eval(point)).collect();
        let derivs: Vec<f64> = self.a1.iter().map(|c| c.eval(point)).collect();
        JetPoint::from_parts(self.n, self.d, vec![values, derivs]).expect("validated layout")
    }

    /// True when `A1` is exactly the derivative of `A0` (checked at the level
    /// of polynomial data where possible, otherwise at sample points).
    pub fn is_holonomic_at(&self, point: &[f64], tol: f64) -> bool {
        for alpha in 0..self.d {
            for i in 0..self.n {
                let lhs = self.deriv_field(alpha, i).eval(point);
                let rhs = self.value_field(alpha).partial(i).eval(point);
                if (lhs - rhs).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Value of a first-order jet of a first-jet section, with no holonomicity
/// imposed:
///
/// ```text
/// B0[alpha]        value of the A0 slot
/// B1[alpha, i]     value of the A1 slot
/// B2[alpha, i]     chart derivative of A0 along axis i
/// B3[alpha, i, j]  chart derivative of A1_i along axis j
/// ```
///
/// `B1` and `B2` are independent and `B3` carries no symmetry; points coming
/// from `j^1 j^1 u` satisfy `B1 = B2` and `B3` symmetric, but nothing here
/// assumes that.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedJetPoint {
    pub n: usize,
    pub d: usize,
    pub b0: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub b3: Vec<f64>,
}

impl IteratedJetPoint {
    pub fn new(n: usize, d: usize, b0: Vec<f64>, b1: Vec<f64>, b2: Vec<f64>, b3: Vec<f64>) -> Result<Self> {
        if b0.len() != d {
            return Err(Error::ComponentCount { expected: d, got: b0.len() });
        }
        if b1.len() != d * n || b2.len() != d * n {
            return Err(Error::ComponentCount { expected: d * n, got: b1.len().max(b2.len()) });
        }
        if b3.len() != d * n * n {
            return Err(Error::ComponentCount { expected: d * n * n, got: b3.len() });
        }
        Ok(Self { n, d, b0, b1, b2, b3 })
    }

    pub fn b1_at(&self, alpha: usize, i: usize) -> f64 {
        self.b1[alpha * self.n + i]
    }

    pub fn b2_at(&self, alpha: usize, i: usize) -> f64 {
        self.b2[alpha * self.n + i]
    }

    pub fn b3_at(&self, alpha: usize, i: usize, j: usize) -> f64 {
        self.b3[(alpha * self.n + i) * self.n + j]
    }

    /// Distance from the holonomic subset: max of `|B1 - B2|` and the
    /// antisymmetric part of `B3`.
    pub fn holonomicity_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for alpha in 0..self.d {
            for i in 0..self.n {
                defect = defect.max((self.b1_at(alpha, i) - self.b2_at(alpha, i)).abs());
                for j in 0..self.n {
                    defect = defect
                        .max((self.b3_at(alpha, i, j) - self.b3_at(alpha, j, i)).abs() * 0.5);
                }
            }
        }
        defect
    }
}

/// First-order jet of a first-jet section at a point.
///
/// Built by prolonging the flat section of `A`, so the block layout agrees
/// with the first-order machinery by construction.
pub fn iterate_prolong(a: &Jet1Section, point: &[f64]) -> Result<IteratedJetPoint> {
    let n = a.base_dim();
    let d = a.fiber_dim();
    let flat = prolong(&a.as_flat_section(), 1, point)?;
    let mut b0 = Vec::with_capacity(d);
    let mut b1 = Vec::with_capacity(d * n);
    let mut b2 = Vec::with_capacity(d * n);
    let mut b3 = Vec::with_capacity(d * n * n);
    for alpha in 0..d {
        b0.push(flat.value(jet1_value_slot(n, d, alpha)));
    }
    for alpha in 0..d {
        for i in 0..n {
            b1.push(flat.value(jet1_deriv_slot(n, d, alpha, i)));
        }
    }
    for alpha in 0..d {
        for i in 0..n {
            b2.push(flat.first(jet1_value_slot(n, d, alpha), i));
        }
    }
    for alpha in 0..d {
        for i in 0..n {
            for j in 0..n {
                b3.push(flat.first(jet1_deriv_slot(n, d, alpha, i), j));
            }
        }
    }
    IteratedJetPoint::new(n, d, b0, b1, b2, b3)
}

/// The canonical inclusion of second-order jets into iterated jets: both
/// first-order blocks receive the jet's first derivatives, and `B3` is the
/// (automatically symmetric) table of second derivatives.
pub fn include_second(jet: &JetPoint) -> Result<IteratedJetPoint> {
    if jet.order() < 2 {
        return Err(Error::OrderMismatch { requested: 2, available: jet.order() });
    }
    let n = jet.base_dim();
    let d = jet.fiber_dim();
    let mut b0 = Vec::with_capacity(d);
    let mut b1 = Vec::with_capacity(d * n);
    let mut b3 = Vec::with_capacity(d * n * n);
    for alpha in 0..d {
        b0.push(jet.value(alpha));
    }
    for alpha in 0..d {
        for i in 0..n {
            b1.push(jet.first(alpha, i));
        }
    }
    for alpha in 0..d {
        for i in 0..n {
            for j in 0..n {
                b3.push(jet.second(alpha, i, j));
            }
        }
    }
    let b2 = b1.clone();
    IteratedJetPoint::new(n, d, b0, b1, b2, b3)
}

/// Linear functional on iterated jet values, stored block-by-block with the
/// same layout as [`IteratedJetPoint`].
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedDualPoint {
    pub n: usize,
    pub d: usize,
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub x3: Vec<f64>,
}

impl IteratedDualPoint {
    pub fn new(n: usize, d: usize, x0: Vec<f64>, x1: Vec<f64>, x2: Vec<f64>, x3: Vec<f64>) -> Result<Self> {
        // same shape constraints as the points they pair with
        IteratedJetPoint::new(n, d, x0, x1, x2, x3).map(|p| Self {
            n: p.n,
            d: p.d,
            x0: p.b0,
            x1: p.b1,
            x2: p.b2,
            x3: p.b3,
        })
    }

    pub fn pair(&self, b: &IteratedJetPoint) -> f64 {
        assert_eq!((self.n, self.d), (b.n, b.d), "paired shapes differ");
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y.iter()).map(|(a, b)| a * b).sum::<f64>();
        dot(&self.x0, &b.b0) + dot(&self.x1, &b.b1) + dot(&self.x2, &b.b2) + dot(&self.x3, &b.b3)
    }
}

/// Linear functional on second-order jet values, pairing slot-by-slot
/// against the sorted-tuple storage (no multiplicity weights).
#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderDualPoint {
    pub n: usize,
    pub d: usize,
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

impl SecondOrderDualPoint {
    pub fn new(n: usize, d: usize, s0: Vec<f64>, s1: Vec<f64>, s2: Vec<f64>) -> Result<Self> {
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
        Ok(Self { n, d, s0, s1, s2 })
    }

    pub fn pair(&self, jet: &JetPoint) -> f64 {
        assert!(jet.order() >= 2, "second-order pairing needs an order-2 jet");
        assert_eq!((self.n, self.d), (jet.base_dim(), jet.fiber_dim()), "paired shapes differ");
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y.iter()).map(|(a, b)| a * b).sum::<f64>();
        dot(&self.s0, jet.block(0)) + dot(&self.s1, jet.block(1)) + dot(&self.s2, jet.block(2))
    }
}

/// Restrict an iterated dual along the inclusion of second-order jets:
///
/// ```text
/// S0          = X0
/// S1_i        = X1_i + X2_i
/// S2_(ii)     = X3_ii
/// S2_(ij)     = X3_ij + X3_ji          (i < j)
/// ```
///
/// This is the exact adjoint of [`include_second`] for the sorted-tuple
/// pairing: both first-order blocks of the inclusion feed the same jet
/// derivatives, so their duals add, and the two off-diagonal `B3` slots
/// collapse onto the single sorted second-order slot.
pub fn restrict_dual(x: &IteratedDualPoint) -> SecondOrderDualPoint {
    let n = x.n;
    let d = x.d;
    let s0 = x.x0.clone();
    let mut s1 = Vec::with_capacity(d * n);
    for idx in 0..d * n {
        s1.push(x.x1[idx] + x.x2[idx]);
    }
    let tuples = enumerate_sym(n, 2);
    let mut s2 = Vec::with_capacity(d * tuples.len());
    for alpha in 0..d {
        for tuple in &tuples {
            let (i, j) = (tuple[0], tuple[1]);
            let at = |i: usize, j: usize| x.x3[(alpha * n + i) * n + j];
            s2.push(if i == j { at(i, i) } else { at(i, j) + at(j, i) });
        }
    }
    SecondOrderDualPoint::new(n, d, s0, s1, s2).expect("shapes preserved")
}

/// The canonical right inverse of [`restrict_dual`]: place the value part in
/// `X0`, all first-order action in `X2`, and split each off-diagonal
/// second-order component evenly between the two `X3` slots.
///
/// `restrict_dual(lift_dual(s)) == s` holds exactly in floating point
/// (halving and re-adding a double is lossless), which pins down this choice
/// among the many right inverses.
pub fn lift_dual(s: &SecondOrderDualPoint) -> IteratedDualPoint {
    let n = s.n;
    let d = s.d;
    let x0 = s.s0.clone();
    let x1 = vec![0.0; d * n];
    let x2 = s.s1.clone();
    let mut x3 = vec![0.0; d * n * n];
    for alpha in 0..d {
        for i in 0..n {
            for j in i..n {
                let v = s.s2[alpha * sym_count(n, 2) + sym2_position(n, i, j)];
                if i == j {
                    x3[(alpha * n + i) * n + i] = v;
                } else {
                    x3[(alpha * n + i) * n + j] = 0.5 * v;
                    x3[(alpha * n + j) * n + i] = 0.5 * v;
                }
            }
        }
    }
    IteratedDualPoint::new(n, d, x0, x1, x2, x3).expect("shapes preserved")
}
