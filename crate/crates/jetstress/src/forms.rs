//! Differential forms with scalar-field coefficients on a coordinate chart.
//!
//! A degree-`p` form on an `n`-dimensional chart stores one coefficient field
//! per strictly increasing `p`-tuple of axes, in lexicographic order:
//!
//! ```text
//! omega = sum over increasing J of  f_J  dx^J,      dx^J = dx^(j1) ^ ... ^ dx^(jp)
//! ```
//!
//! The operations here are the coordinate versions of the wedge product, the
//! interior product with a coordinate direction, the exterior derivative, and
//! the pullback to a boundary face. Orientation signs of faces are *not*
//! folded into the pullback; they live on [`OrientedFace`] and enter only
//! through integration.

use crate::chart::OrientedFace;
use crate::error::{Error, Result};
use crate::scalar::ScalarField;

/// Binomial coefficient, sized for chart dimensions (no overflow concerns at
/// the scales this crate handles).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// All strictly increasing `p`-tuples over axes `0..n`, lexicographically.
pub fn increasing_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, p));
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
            fill(out, current, a + 1, n, p);
            current.pop();
        }
    }
}

/// Position of an increasing tuple within `increasing_tuples(n, p)`.
pub fn tuple_index(n: usize, tuple: &[usize]) -> Option<usize> {
    increasing_tuples(n, tuple.len()).iter().position(|t| t == tuple)
}

/// Differential form of fixed degree with one scalar coefficient per
/// increasing axis tuple.
#[derive(Clone, Debug)]
pub struct FormField {
    dim: usize,
    degree: usize,
    comps: Vec<ScalarField>,
}

impl FormField {
    pub fn new(dim: usize, degree: usize, comps: Vec<ScalarField>) -> Result<Self> {
        if degree > dim {
            return Err(Error::BadDegree { degree, dim });
        }
        let expected = binomial(dim, degree);
        if comps.len() != expected {
            return Err(Error::ComponentCount { expected, got: comps.len() });
        }
        for c in &comps {
            if c.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, got: c.dim() });
            }
        }
        Ok(Self { dim, degree, comps })
    }

    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        let count = binomial(dim, degree);
        Self::new(dim, degree, vec![ScalarField::zero(dim); count])
    }

    /// Degree-zero form from a scalar field.
    pub fn from_scalar(f: ScalarField) -> Self {
        let dim = f.dim();
        Self { dim, degree: 0, comps: vec![f] }
    }

    /// Top-degree form `f dx^1 ^ ... ^ dx^n`.
    pub fn top(f: ScalarField) -> Self {
        let dim = f.dim();
        Self { dim, degree: dim, comps: vec![f] }
    }

    /// The coordinate form `dx^axis`.
    pub fn basis_one_form(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let mut form = Self::zero(dim, 1)?;
        form.comps[axis] = ScalarField::constant(dim, 1.0);
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    /// Coefficient of `dx^tuple` (the tuple must be strictly increasing).
    pub fn component(&self, tuple: &[usize]) -> Result<&ScalarField> {
        let idx = tuple_index(self.dim, tuple)
            .filter(|_| tuple.len() == self.degree)
            .ok_or(Error::Unsupported(format!("no component dx^{tuple:?}")))?;
        Ok(&self.comps[idx])
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::BadDegree { degree: other.degree, dim: self.dim });
        }
        let comps = self
            .comps
            .iter()
            .zip(other.comps.iter())
            .map(|(a, b)| a.add(b))
            .collect();
        Self::new(self.dim, self.degree, comps)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let comps = self.comps.iter().map(|c| c.scale(factor)).collect();
        Self { dim: self.dim, degree: self.degree, comps }
    }

    /// Multiply every coefficient by a scalar field.
    pub fn scale_field(&self, f: &ScalarField) -> Self {
        let comps = self.comps.iter().map(|c| c.mul(f)).collect();
        Self { dim: self.dim, degree: self.degree, comps }
    }
}

/// Merge two disjoint increasing tuples into one, returning the permutation
/// sign, or `None` when they share an axis.
fn merge_with_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1.0;
    let mut i = 0;
    let mut j = 0;
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            merged.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            // moving b[j] past the remaining entries of a flips the sign once
            // per entry it crosses
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            merged.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((merged, sign))
}

/// Wedge product of two forms on the same chart.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), got: b.dim() });
    }
    let n = a.dim();
    let degree = a.degree() + b.degree();
    if degree > n {
        return Ok(FormField::zero(n, n).unwrap_or_else(|_| unreachable!()));
    }
    let tuples_a = increasing_tuples(n, a.degree());
    let tuples_b = increasing_tuples(n, b.degree());
    let out_tuples = increasing_tuples(n, degree);
    let mut comps = vec![ScalarField::zero(n); out_tuples.len()];
    for (ia, ta) in tuples_a.iter().enumerate() {
        if a.components()[ia].is_exactly_zero() {
            continue;
        }
        for (ib, tb) in tuples_b.iter().enumerate() {
            if b.components()[ib].is_exactly_zero() {
                continue;
            }
            if let Some((merged, sign)) = merge_with_sign(ta, tb) {
                let k = out_tuples.iter().position(|t| *t == merged).expect("merged tuple exists");
                let term = a.components()[ia].mul(&b.components()[ib]).scale(sign);
                comps[k] = comps[k].add(&term);
            }
        }
    }
    FormField::new(n, degree, comps)
}

/// Interior product with the coordinate direction `e_axis`.
///
/// On basis forms, `e_k` contracted into `dx^J` vanishes unless `k` appears
/// in `J`, in which case the axis is removed and the sign is `(-1)^pos` with
/// `pos` the position of `k` inside `J` (0-based).
pub fn interior_product(axis: usize, omega: &FormField) -> Result<FormField> {
    let n = omega.dim();
    if axis >= n {
        return Err(Error::AxisOutOfRange { axis, dim: n });
    }
    if omega.degree() == 0 {
        return Err(Error::BadDegree { degree: 0, dim: n });
    }
    let in_tuples = increasing_tuples(n, omega.degree());
    let out_tuples = increasing_tuples(n, omega.degree() - 1);
    let mut comps = vec![ScalarField::zero(n); out_tuples.len()];
    for (idx, tuple) in in_tuples.iter().enumerate() {
        if let Some(pos) = tuple.iter().position(|&a| a == axis) {
            let mut reduced = tuple.clone();
            reduced.remove(pos);
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let k = out_tuples.iter().position(|t| *t == reduced).expect("reduced tuple exists");
            comps[k] = comps[k].add(&omega.components()[idx].scale(sign));
        }
    }
    FormField::new(n, omega.degree() - 1, comps)
}

/// Coordinate exterior derivative.
pub fn exterior_derivative(omega: &FormField) -> Result<FormField> {
    let n = omega.dim();
    if omega.degree() >= n {
        return Err(Error::BadDegree { degree: omega.degree(), dim: n });
    }
    let in_tuples = increasing_tuples(n, omega.degree());
    let out_tuples = increasing_tuples(n, omega.degree() + 1);
    let mut comps = vec![ScalarField::zero(n); out_tuples.len()];
    for (idx, tuple) in in_tuples.iter().enumerate() {
        let f = &omega.components()[idx];
        if f.is_exactly_zero() {
            continue;
        }
        for k in 0..n {
            if tuple.contains(&k) {
                continue;
            }
            if let Some((merged, sign)) = merge_with_sign(&[k], tuple) {
                let pos = out_tuples.iter().position(|t| *t == merged).expect("merged tuple exists");
                comps[pos] = comps[pos].add(&f.partial(k).scale(sign));
            }
        }
    }
    FormField::new(n, omega.degree() + 1, comps)
}

/// Pull an ambient form back to a boundary face.
///
/// Components whose tuple contains the face's fixed axis vanish (that
/// coordinate is constant on the face); the remaining components have the
/// fixed value substituted and their tuples re-indexed to the face chart.
/// The face's induced orientation sign is *not* applied here.
pub fn pullback_to_face(omega: &FormField, face: &OrientedFace) -> Result<FormField> {
    let n = face.ambient_region().dim();
    if omega.dim() != n {
        return Err(Error::DimMismatch { expected: n, got: omega.dim() });
    }
    if n < 2 {
        return Err(Error::Unsupported(
            "pullback needs an ambient dimension of at least 2".into(),
        ));
    }
    if omega.degree() > n - 1 {
        return Err(Error::BadDegree { degree: omega.degree(), dim: n - 1 });
    }
    let k = face.axis();
    let value = face.fixed_value();
    let in_tuples = increasing_tuples(n, omega.degree());
    let out_tuples = increasing_tuples(n - 1, omega.degree());
    let mut comps = vec![ScalarField::zero(n - 1); out_tuples.len()];
    for (idx, tuple) in in_tuples.iter().enumerate() {
        if tuple.contains(&k) {
            continue;
        }
        let local: Vec<usize> =
            tuple.iter().map(|&a| if a > k { a - 1 } else { a }).collect();
        let pos = out_tuples.iter().position(|t| *t == local).expect("local tuple exists");
        comps[pos] = omega.components()[idx].restrict(k, value);
    }
    FormField::new(n - 1, omega.degree(), comps)
}
