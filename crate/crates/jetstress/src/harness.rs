//! Scenario-driven identity verification.
//!
//! A scenario names a region, a mode, and either explicit polynomial data or
//! a seed for deterministic generation. Running it produces a report of
//! identity rows, one per checked law, each with the individually integrated
//! terms, the residual, and a pass flag. All randomness flows through
//! counter-seeded streams, so reports are bit-identical across runs apart
//! from wall time.
//!
//! ## Modes
//!
//! * `first_order`: balances body force, boundary force, and the internal
//!   action of a first-order stress, and probes the pointwise divergence
//!   identity on sampled points.
//! * `second_order`: the four-term decomposition for an edge-compatible
//!   stress and a twice-differentiated argument, plus the once-integrated
//!   jet identity and the edge cancellation sum.
//! * `nonholonomic`: the once-integrated identity for an unconstrained
//!   stress against a first-jet section whose blocks are independent.
//! * `edge_cancel`: the oriented edge sum on its own, with the largest
//!   single edge contribution reported as evidence that the cancellation is
//!   between faces rather than term-by-term.
//!
//! ## Tolerances
//!
//! Residuals are compared relatively: `rel = abs / max(1, max |term|)`. In
//! finite-difference mode polynomial data is wrapped in opaque evaluators and
//! every derivative is taken numerically, so the comparison switches to an
//! absolute one with a correspondingly looser bar.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{integrate_face_form, integrate_top_form, QuadratureRule, Region};
use crate::error::{Error, Result};
use crate::forms::FormField;
use crate::jets::{Jet1Section, Section};
use crate::scalar::{PolyField, PolyTerm, ScalarField};
use crate::stress::{
    boundary_divergence, divergence_terms, face_jet_section, iterated_action_density,
    NonHolonomicStress, VariationalStress,
};

/// Relative bar for the integrated first-order balance.
pub const TOL_FIRST_ORDER: f64 = 1e-10;
/// Relative bar for the pointwise divergence identity.
pub const TOL_DIVERGENCE_POINTWISE: f64 = 1e-12;
/// Relative bar for the once-integrated jet identity.
pub const TOL_JET_IDENTITY: f64 = 1e-10;
/// Relative bar for the four-term decomposition.
pub const TOL_FOUR_TERM: f64 = 1e-9;
/// Relative bar for the oriented edge sum.
pub const TOL_EDGE_SUM: f64 = 1e-10;
/// Absolute bar used when derivatives are finite differences.
pub const TOL_FD: f64 = 1e-6;

/// Number of interior probe points for pointwise identities.
const POINTWISE_PROBES: usize = 100;

/// Which family of identities a scenario exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FirstOrder,
    SecondOrder,
    Nonholonomic,
    EdgeCancel,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::FirstOrder => "first_order",
            Mode::SecondOrder => "second_order",
            Mode::Nonholonomic => "nonholonomic",
            Mode::EdgeCancel => "edge_cancel",
        }
    }
}

/// Explicit polynomial data for a scenario. Each inner `Vec<PolyTerm>` is
/// one scalar coefficient; an empty list is the zero polynomial. Which keys
/// are consulted depends on the mode:
///
/// * `first_order`: `r` (fiber), `s` (fiber x axis, axis fastest), `w`
///   (fiber);
/// * `second_order` and `edge_cancel`: `y0`..`y3` (`y3` indexed
///   `(alpha, i, j)` with `j` fastest) and `u` (fiber);
/// * `nonholonomic`: `y0`..`y3` plus the jet section blocks `a0` (fiber) and
///   `a1` (fiber x axis).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitFields {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y3: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<Vec<PolyTerm>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<Vec<Vec<PolyTerm>>>,
}

fn default_quad_order() -> usize {
    8
}

/// One verification job, deserializable from JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub n: usize,
    pub d: usize,
    /// Chart box; the unit box when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    /// Seed for generated data; exactly one of `seed` and `fields`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<ExplicitFields>,
    /// Override for every row's tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Replace exact polynomial derivatives with finite differences.
    #[serde(default)]
    pub fd: bool,
}

impl Scenario {
    pub fn seeded(name: &str, mode: Mode, n: usize, d: usize, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            mode,
            n,
            d,
            bounds: None,
            quad_order: default_quad_order(),
            seed: Some(seed),
            fields: None,
            tol: None,
            fd: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn region(&self) -> Result<Region> {
        match &self.bounds {
            None => Region::unit_box(self.n),
            Some(b) => {
                if b.len() != self.n {
                    return Err(Error::Scenario(format!(
                        "scenario '{}': {} bound pairs for dimension {}",
                        self.name,
                        b.len(),
                        self.n
                    )));
                }
                let pairs: Vec<(f64, f64)> = b.iter().map(|p| (p[0], p[1])).collect();
                Region::from_bounds(&pairs)
            }
        }
    }
}

/// One verified identity: its labeled terms, the residual both ways, and
/// the verdict. `basis` records whether `tolerance` bounds the relative or
/// the absolute residual.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityRow {
    pub identity: String,
    pub term_labels: Vec<String>,
    pub terms: Vec<f64>,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub basis: String,
    pub pass: bool,
}

fn make_row(
    identity: &str,
    labels: &[&str],
    terms: Vec<f64>,
    abs_residual: f64,
    tolerance: f64,
    absolute: bool,
) -> IdentityRow {
    let scale = terms.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    let rel_residual = abs_residual / scale;
    let pass = if absolute { abs_residual <= tolerance } else { rel_residual <= tolerance };
    IdentityRow {
        identity: identity.to_string(),
        term_labels: labels.iter().map(|s| s.to_string()).collect(),
        terms,
        abs_residual,
        rel_residual,
        tolerance,
        basis: if absolute { "absolute" } else { "relative" }.to_string(),
        pass,
    }
}

/// Result of running one scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub scenario: String,
    pub mode: Mode,
    pub rows: Vec<IdentityRow>,
    pub wall_ms: f64,
}

impl ResidualReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the timing zeroed, for byte-level comparison of payloads.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_ms = 0.0;
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scenario,identity,term_labels,terms,abs_residual,rel_residual,tolerance,basis,pass\n",
        );
        for row in &self.rows {
            let labels = row.term_labels.join(";");
            let terms = row
                .terms
                .iter()
                .map(|t| format!("{t:e}"))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},\"{}\",\"{}\",{:e},{:e},{:e},{},{}\n",
                self.scenario,
                row.identity,
                labels,
                terms,
                row.abs_residual,
                row.rel_residual,
                row.tolerance,
                row.basis,
                row.pass
            ));
        }
        out
    }
}

/// Scenario data after resolution: concrete stresses and sections.
enum Resolved {
    First { stress: VariationalStress, w: Section },
    Second { y: NonHolonomicStress, u: Section },
    Jet { y: NonHolonomicStress, a: Jet1Section },
    Edges { y: NonHolonomicStress, u: Section },
}

fn parse_fields(
    name: &str,
    n: usize,
    what: &str,
    lists: &Option<Vec<Vec<PolyTerm>>>,
    expected: usize,
) -> Result<Vec<ScalarField>> {
    let lists = lists.as_ref().ok_or_else(|| {
        Error::Scenario(format!("scenario '{name}': missing field block '{what}'"))
    })?;
    if lists.len() != expected {
        return Err(Error::Scenario(format!(
            "scenario '{name}': field block '{what}' has {} entries, expected {expected}",
            lists.len()
        )));
    }
    lists
        .iter()
        .map(|terms| Ok(ScalarField::from(PolyField::from_terms(n, terms)?)))
        .collect()
}

/// Degrees used by the generators. Coefficient fields stay a notch below
/// the sections so every integrand is well inside the quadrature's exact
/// range at the default order.
const GEN_DEGREE_STRESS: u32 = 2;
const GEN_DEGREE_SECTION: u32 = 3;

fn resolve(scenario: &Scenario) -> Result<Resolved> {
    let n = scenario.n;
    let d = scenario.d;
    if n == 0 || d == 0 {
        return Err(Error::Scenario(format!(
            "scenario '{}': n and d must be positive",
            scenario.name
        )));
    }
    if scenario.mode != Mode::FirstOrder && n < 2 {
        return Err(Error::Scenario(format!(
            "scenario '{}': second-order modes need n >= 2",
            scenario.name
        )));
    }
    match (&scenario.seed, &scenario.fields) {
        (Some(_), Some(_)) => {
            return Err(Error::Scenario(format!(
                "scenario '{}': give either a seed or explicit fields, not both",
                scenario.name
            )))
        }
        (None, None) => {
            return Err(Error::Scenario(format!(
                "scenario '{}': needs a seed or explicit fields",
                scenario.name
            )))
        }
        _ => {}
    }

    let resolved = if let Some(seed) = scenario.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub = |rng: &mut ChaCha8Rng| rng.random::<u64>();
        match scenario.mode {
            Mode::FirstOrder => {
                let stress = VariationalStress::random(sub(&mut rng), n, d, GEN_DEGREE_STRESS);
                let comps = (0..d)
                    .map(|_| {
                        ScalarField::from(PolyField::random(sub(&mut rng), n, GEN_DEGREE_SECTION))
                    })
                    .collect();
                Resolved::First { stress, w: Section::new(n, comps)? }
            }
            Mode::SecondOrder | Mode::EdgeCancel => {
                let y =
                    NonHolonomicStress::random_edge_compatible(sub(&mut rng), n, d, GEN_DEGREE_STRESS);
                let comps = (0..d)
                    .map(|_| {
                        ScalarField::from(PolyField::random(sub(&mut rng), n, GEN_DEGREE_SECTION))
                    })
                    .collect();
                let u = Section::new(n, comps)?;
                if scenario.mode == Mode::SecondOrder {
                    Resolved::Second { y, u }
                } else {
                    Resolved::Edges { y, u }
                }
            }
            Mode::Nonholonomic => {
                let y = NonHolonomicStress::random(sub(&mut rng), n, d, GEN_DEGREE_STRESS);
                let a0 = (0..d)
                    .map(|_| {
                        ScalarField::from(PolyField::random(sub(&mut rng), n, GEN_DEGREE_SECTION))
                    })
                    .collect();
                let a1 = (0..d * n)
                    .map(|_| {
                        ScalarField::from(PolyField::random(sub(&mut rng), n, GEN_DEGREE_SECTION))
                    })
                    .collect();
                Resolved::Jet { y, a: Jet1Section::new(n, d, a0, a1)? }
            }
        }
    } else {
        let f = scenario.fields.as_ref().expect("checked above");
        let name = &scenario.name;
        match scenario.mode {
            Mode::FirstOrder => {
                let r = parse_fields(name, n, "r", &f.r, d)?;
                let s = parse_fields(name, n, "s", &f.s, d * n)?;
                let w = parse_fields(name, n, "w", &f.w, d)?;
                Resolved::First {
                    stress: VariationalStress::new(n, d, r, s)?,
                    w: Section::new(n, w)?,
                }
            }
            Mode::SecondOrder | Mode::EdgeCancel => {
                let y = explicit_nh(name, n, d, f)?;
                let u = Section::new(n, parse_fields(name, n, "u", &f.u, d)?)?;
                if scenario.mode == Mode::SecondOrder {
                    Resolved::Second { y, u }
                } else {
                    Resolved::Edges { y, u }
                }
            }
            Mode::Nonholonomic => {
                let y = explicit_nh(name, n, d, f)?;
                let a0 = parse_fields(name, n, "a0", &f.a0, d)?;
                let a1 = parse_fields(name, n, "a1", &f.a1, d * n)?;
                Resolved::Jet { y, a: Jet1Section::new(n, d, a0, a1)? }
            }
        }
    };

    if scenario.fd {
        Ok(match resolved {
            Resolved::First { stress, w } => Resolved::First {
                stress: blackbox_stress(&stress),
                w: w.to_blackbox(),
            },
            Resolved::Second { y, u } => Resolved::Second {
                y: blackbox_nh(&y),
                u: u.to_blackbox(),
            },
            Resolved::Jet { y, a } => Resolved::Jet {
                y: blackbox_nh(&y),
                a: blackbox_jet1(&a),
            },
            Resolved::Edges { y, u } => Resolved::Edges {
                y: blackbox_nh(&y),
                u: u.to_blackbox(),
            },
        })
    } else {
        Ok(resolved)
    }
}

fn explicit_nh(name: &str, n: usize, d: usize, f: &ExplicitFields) -> Result<NonHolonomicStress> {
    let y0 = parse_fields(name, n, "y0", &f.y0, d)?;
    let y1 = parse_fields(name, n, "y1", &f.y1, d * n)?;
    let y2 = parse_fields(name, n, "y2", &f.y2, d * n)?;
    let y3 = parse_fields(name, n, "y3", &f.y3, d * n * n)?;
    NonHolonomicStress::new(n, d, y0, y1, y2, y3)
}

fn blackbox_stress(s: &VariationalStress) -> VariationalStress {
    let n = s.base_dim();
    let d = s.fiber_dim();
    let r = (0..d).map(|a| s.r_field(a).to_blackbox()).collect();
    let sv = (0..d)
        .flat_map(|a| (0..n).map(move |i| (a, i)))
        .map(|(a, i)| s.s_field(a, i).to_blackbox())
        .collect();
    VariationalStress::new(n, d, r, sv).expect("same layout")
}

fn blackbox_nh(y: &NonHolonomicStress) -> NonHolonomicStress {
    let n = y.base_dim();
    let d = y.fiber_dim();
    let y0 = (0..d).map(|a| y.y0_field(a).to_blackbox()).collect();
    let pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|a| (0..n).map(move |i| (a, i))).collect();
    let y1 = pairs.iter().map(|&(a, i)| y.y1_field(a, i).to_blackbox()).collect();
    let y2 = pairs.iter().map(|&(a, i)| y.y2_field(a, i).to_blackbox()).collect();
    let y3 = (0..d)
        .flat_map(|a| (0..n).flat_map(move |i| (0..n).map(move |j| (a, i, j))))
        .map(|(a, i, j)| y.y3_field(a, i, j).to_blackbox())
        .collect();
    NonHolonomicStress::new(n, d, y0, y1, y2, y3).expect("same layout")
}

fn blackbox_jet1(a: &Jet1Section) -> Jet1Section {
    let n = a.base_dim();
    let d = a.fiber_dim();
    let a0 = (0..d).map(|al| a.value_field(al).to_blackbox()).collect();
    let a1 = (0..d)
        .flat_map(|al| (0..n).map(move |i| (al, i)))
        .map(|(al, i)| a.deriv_field(al, i).to_blackbox())
        .collect();
    Jet1Section::new(n, d, a0, a1).expect("same layout")
}

/// The three integrals of the first-order balance, in the order
/// `(body, boundary, internal)`; the identity is `body + boundary =
/// internal`.
pub fn first_order_terms(
    stress: &VariationalStress,
    w: &Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<(f64, f64, f64)> {
    let body = integrate_top_form(
        &FormField::top(stress.body_force().action_density(w)?),
        region,
        rule,
    )?;
    let sigma_form = stress.traction().apply(w)?;
    let mut boundary = 0.0;
    for face in region.boundary_faces() {
        boundary += integrate_face_form(&sigma_form, &face, rule)?;
    }
    let internal =
        integrate_top_form(&FormField::top(stress.action_density(w)?), region, rule)?;
    Ok((body, boundary, internal))
}

/// The once-integrated jet identity terms `(internal, boundary,
/// divergence)`; the identity is `internal = boundary - divergence`.
pub fn jet_identity_terms(
    y: &NonHolonomicStress,
    a: &Jet1Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<(f64, f64, f64)> {
    let internal = integrate_top_form(&FormField::top(y.action_density(a)?), region, rule)?;
    let z_form = y.traction().apply(a)?;
    let mut boundary = 0.0;
    for face in region.boundary_faces() {
        boundary += integrate_face_form(&z_form, &face, rule)?;
    }
    let div_density = y.divergence().fiber_action_density(a)?;
    let divergence = integrate_top_form(&FormField::top(div_density), region, rule)?;
    Ok((internal, boundary, divergence))
}

/// The four integrals of the twice-integrated decomposition, in the order
/// `(internal, double_divergence, face_divergence, face_traction)`; the
/// identity is `internal = double_divergence - face_divergence -
/// face_traction`, and its signed defect equals the oriented edge sum.
pub fn four_term_terms(
    y: &NonHolonomicStress,
    u: &Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<(f64, f64, f64, f64)> {
    let internal =
        integrate_top_form(&FormField::top(iterated_action_density(y, u)?), region, rule)?;

    let dd = y.double_divergence();
    let double_div =
        integrate_top_form(&FormField::top(dd.action_density(u)?), region, rule)?;

    let z = y.traction();
    let mut face_div = 0.0;
    for face in region.boundary_faces() {
        let pieces = boundary_divergence(&z, &face)?;
        let pair = face_jet_section(u, &face)?;
        let chart = face.chart_region().expect("n >= 2");
        let density = pieces.divergence.action_density(&pair)?;
        face_div += face.induced_sign() * integrate_top_form(&FormField::top(density), &chart, rule)?;
    }

    let div_traction = y.divergence().traction().apply(u)?;
    let mut face_trac = 0.0;
    for face in region.boundary_faces() {
        face_trac += integrate_face_form(&div_traction, &face, rule)?;
    }

    Ok((internal, double_div, face_div, face_trac))
}

/// The oriented edge sum left over by face-by-face integration by parts,
/// and the largest single edge contribution.
///
/// Each face's traction is integrated over each edge of its chart with the
/// face's ambient orientation sign; for stresses whose off-diagonal second
/// block is antisymmetric the contributions of the two faces at every edge
/// cancel, while single contributions stay finite.
pub fn edge_sum(
    y: &NonHolonomicStress,
    u: &Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    if region.dim() < 2 {
        return Err(Error::Unsupported("edge sums need dimension at least 2".into()));
    }
    let z = y.traction();
    let mut sum = 0.0;
    let mut max_single = 0.0f64;
    for face in region.boundary_faces() {
        let pieces = boundary_divergence(&z, &face)?;
        let pair = face_jet_section(u, &face)?;
        let traction_form = pieces.traction.apply(&pair)?;
        let chart = face.chart_region().expect("n >= 2");
        for edge in chart.boundary_faces() {
            let term = face.induced_sign() * integrate_face_form(&traction_form, &edge, rule)?;
            sum += term;
            max_single = max_single.max(term.abs());
        }
    }
    Ok((sum, max_single))
}

fn tol_for(scenario: &Scenario, default: f64) -> (f64, bool) {
    if scenario.fd {
        (scenario.tol.unwrap_or(TOL_FD), true)
    } else {
        (scenario.tol.unwrap_or(default), false)
    }
}

fn rows_first_order(
    scenario: &Scenario,
    stress: &VariationalStress,
    w: &Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<Vec<IdentityRow>> {
    let mut rows = Vec::new();

    let (body, boundary, internal) = first_order_terms(stress, w, region, rule)?;
    let (tol, absolute) = tol_for(scenario, TOL_FIRST_ORDER);
    rows.push(make_row(
        "virtual-work",
        &["body", "boundary", "internal"],
        vec![body, boundary, internal],
        (body + boundary - internal).abs(),
        tol,
        absolute,
    ));

    // Pointwise probes reuse the scenario seed so the row is reproducible;
    // explicit-field scenarios get a fixed stream.
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed.unwrap_or(0xD1CE).wrapping_add(1));
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for _ in 0..POINTWISE_PROBES {
        let x = region.sample_point(&mut rng);
        let (dt, at, vt) = divergence_terms(stress, w, &x)?;
        worst = worst.max((dt - at - vt).abs());
        scale = scale.max(dt.abs()).max(at.abs()).max(vt.abs());
    }
    let (tol, absolute) = tol_for(scenario, TOL_DIVERGENCE_POINTWISE);
    // In finite-difference mode the two-step pointwise identity carries
    // compounded truncation error; the integrated rows are the meaningful
    // check there, so the pointwise bar stays absolute but widened by the
    // probe scale.
    let tol = if absolute { tol * (1.0 + scale) } else { tol };
    rows.push(make_row(
        "divergence-pointwise",
        &["max-term-magnitude"],
        vec![scale],
        worst,
        tol,
        absolute,
    ));

    Ok(rows)
}

fn row_jet_identity(
    scenario: &Scenario,
    y: &NonHolonomicStress,
    a: &Jet1Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<IdentityRow> {
    let (internal, boundary, divergence) = jet_identity_terms(y, a, region, rule)?;
    let (tol, absolute) = tol_for(scenario, TOL_JET_IDENTITY);
    Ok(make_row(
        "jet-identity",
        &["internal", "boundary", "divergence"],
        vec![internal, boundary, divergence],
        (internal - boundary + divergence).abs(),
        tol,
        absolute,
    ))
}

fn row_four_term(
    scenario: &Scenario,
    y: &NonHolonomicStress,
    u: &Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<IdentityRow> {
    let (t1, t2, t3, t4) = four_term_terms(y, u, region, rule)?;
    let (tol, absolute) = tol_for(scenario, TOL_FOUR_TERM);
    Ok(make_row(
        "four-term",
        &["internal", "double-divergence", "face-divergence", "face-traction"],
        vec![t1, t2, t3, t4],
        (t1 - (t2 - t3 - t4)).abs(),
        tol,
        absolute,
    ))
}

fn row_edge_sum(
    scenario: &Scenario,
    y: &NonHolonomicStress,
    u: &Section,
    region: &Region,
    rule: &QuadratureRule,
) -> Result<IdentityRow> {
    let (sum, max_single) = edge_sum(y, u, region, rule)?;
    let (tol, absolute) = tol_for(scenario, TOL_EDGE_SUM);
    Ok(make_row(
        "edge-cancellation",
        &["edge-sum", "max-single-edge-term"],
        vec![sum, max_single],
        sum.abs(),
        tol,
        absolute,
    ))
}

/// Run one scenario and collect its identity rows.
pub fn run_scenario(scenario: &Scenario) -> Result<ResidualReport> {
    let start = Instant::now();
    let region = scenario.region()?;
    let rule = QuadratureRule::new(scenario.quad_order)?;
    let resolved = resolve(scenario)?;

    let rows = match &resolved {
        Resolved::First { stress, w } => rows_first_order(scenario, stress, w, &region, &rule)?,
        Resolved::Second { y, u } => {
            let a = Jet1Section::prolongation(u);
            vec![
                row_four_term(scenario, y, u, &region, &rule)?,
                row_jet_identity(scenario, y, &a, &region, &rule)?,
                row_edge_sum(scenario, y, u, &region, &rule)?,
            ]
        }
        Resolved::Jet { y, a } => vec![row_jet_identity(scenario, y, a, &region, &rule)?],
        Resolved::Edges { y, u } => vec![row_edge_sum(scenario, y, u, &region, &rule)?],
    };

    Ok(ResidualReport {
        scenario: scenario.name.clone(),
        mode: scenario.mode,
        rows,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// The two fully worked scenarios shipped with the crate, as JSON.
pub const WORKED_FIRST_ORDER: &str = include_str!("../../../scenarios/worked_first_order.json");
pub const WORKED_SECOND_ORDER: &str = include_str!("../../../scenarios/worked_second_order.json");

/// The built-in suite: both worked scenarios plus a deterministic spread of
/// seeded scenarios per mode and dimension.
pub fn suite_scenarios() -> Vec<Scenario> {
    let mut scenarios = vec![
        Scenario::from_json(WORKED_FIRST_ORDER).expect("embedded scenario parses"),
        Scenario::from_json(WORKED_SECOND_ORDER).expect("embedded scenario parses"),
    ];
    let dims = [(2usize, 1usize), (2, 2), (3, 1)];
    for mode in [Mode::FirstOrder, Mode::SecondOrder, Mode::Nonholonomic, Mode::EdgeCancel] {
        for &(n, d) in &dims {
            for seed in 1..=3u64 {
                let name = format!("{}-n{}d{}-seed{}", mode.as_str().replace('_', "-"), n, d, seed);
                scenarios.push(Scenario::seeded(&name, mode, n, d, seed));
            }
        }
    }
    scenarios
}

/// Run every suite scenario, in order.
pub fn run_suite() -> Result<Vec<ResidualReport>> {
    suite_scenarios().iter().map(run_scenario).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_first_order_terms_are_frozen() {
        let scenario = Scenario::from_json(WORKED_FIRST_ORDER).unwrap();
        let report = run_scenario(&scenario).unwrap();
        assert!(report.pass(), "{}", report.to_json());
        let row = &report.rows[0];
        assert_eq!(row.identity, "virtual-work");
        let expected = [-0.25, 0.5, 0.25];
        for (t, e) in row.terms.iter().zip(expected) {
            assert!((t - e).abs() < 1e-12, "term {t} vs {e}");
        }
    }

    #[test]
    fn worked_second_order_terms_are_frozen() {
        let scenario = Scenario::from_json(WORKED_SECOND_ORDER).unwrap();
        let report = run_scenario(&scenario).unwrap();
        assert!(report.pass(), "{}", report.to_json());
        let row = &report.rows[0];
        assert_eq!(row.identity, "four-term");
        let expected = [2.0, 0.0, -2.0, 0.0];
        for (t, e) in row.terms.iter().zip(expected) {
            assert!((t - e).abs() < 1e-12, "term {t} vs {e}");
        }
    }

    #[test]
    fn seeded_modes_all_pass() {
        for mode in [Mode::FirstOrder, Mode::SecondOrder, Mode::Nonholonomic, Mode::EdgeCancel] {
            for seed in [1u64, 2, 3] {
                let scenario = Scenario::seeded("t", mode, 2, 1, seed);
                let report = run_scenario(&scenario).unwrap();
                assert!(report.pass(), "{} seed {seed}: {}", mode.as_str(), report.to_json());
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let scenario = Scenario::seeded("det", Mode::SecondOrder, 2, 2, 9);
        let a = run_scenario(&scenario).unwrap();
        let b = run_scenario(&scenario).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
    }

    #[test]
    fn four_term_defect_equals_edge_sum_for_arbitrary_stress() {
        // The decomposition's signed defect is exactly the oriented edge
        // sum, for stresses with no edge compatibility at all. This pins the
        // failure of the closed identity on boxes to the codimension-2
        // skeleton and nothing else.
        let rule = QuadratureRule::default();
        for n in [2usize, 3] {
            for seed in 0..5u64 {
                let region = Region::unit_box(n).unwrap();
                let y = NonHolonomicStress::random(seed, n, 1, 2);
                let u = Section::new(
                    n,
                    vec![ScalarField::from(PolyField::random(1000 + seed, n, 3))],
                )
                .unwrap();
                let (t1, t2, t3, t4) = four_term_terms(&y, &u, &region, &rule).unwrap();
                let (e, _) = edge_sum(&y, &u, &region, &rule).unwrap();
                let defect = t1 - t2 + t3 + t4;
                let scale = 1.0f64.max(t1.abs()).max(t2.abs()).max(t3.abs()).max(t4.abs());
                assert!(
                    (defect - e).abs() <= 1e-10 * scale,
                    "n={n} seed={seed}: defect {defect} vs edge sum {e}"
                );
            }
        }
    }

    #[test]
    fn symmetric_offdiagonal_stress_breaks_the_closed_identity() {
        // A unit symmetric mixed block with u = x1 x2 concentrates a unit
        // wedge force: the edge sum is the alternating corner evaluation of
        // u, which is 1 on the unit square.
        let n = 2;
        // y3 slots (alpha=0): (0,0), (0,1), (1,0), (1,1); put 1 on (0,1)
        let y = NonHolonomicStress::new(
            n,
            1,
            vec![ScalarField::zero(n)],
            vec![ScalarField::zero(n); 2],
            vec![ScalarField::zero(n); 2],
            vec![
                ScalarField::zero(n),
                ScalarField::constant(n, 1.0),
                ScalarField::zero(n),
                ScalarField::zero(n),
            ],
        )
        .unwrap();
        let u = Section::new(
            n,
            vec![ScalarField::from(PolyField::monomial(n, &[1, 1], 1.0))],
        )
        .unwrap();
        let rule = QuadratureRule::default();
        let region = Region::unit_box(n).unwrap();
        let (sum, max_single) = edge_sum(&y, &u, &region, &rule).unwrap();
        assert!((sum.abs() - 1.0).abs() < 1e-12, "edge sum {sum}");
        assert!(max_single > 0.1);
        let (t1, t2, t3, t4) = four_term_terms(&y, &u, &region, &rule).unwrap();
        let defect = t1 - (t2 - t3 - t4);
        assert!((defect.abs() - 1.0).abs() < 1e-12, "defect {defect}");
    }

    #[test]
    fn edge_compatible_stresses_have_nonzero_single_edge_terms() {
        // Negative control: cancellation happens across faces, not because
        // each term is zero.
        let rule = QuadratureRule::default();
        let region = Region::unit_box(2).unwrap();
        let mut saw_nonzero = false;
        for seed in 1..=5u64 {
            let y = NonHolonomicStress::random_edge_compatible(seed, 2, 1, 2);
            let u = Section::new(
                2,
                vec![ScalarField::from(PolyField::random(2000 + seed, 2, 3))],
            )
            .unwrap();
            let (sum, max_single) = edge_sum(&y, &u, &region, &rule).unwrap();
            assert!(sum.abs() <= 1e-10 * (1.0 + max_single));
            if max_single > 1e-6 {
                saw_nonzero = true;
            }
        }
        assert!(saw_nonzero, "every single edge term vanished; control is vacuous");
    }

    #[test]
    fn fd_mode_passes_with_loose_bars() {
        for mode in [Mode::FirstOrder, Mode::SecondOrder, Mode::Nonholonomic] {
            let mut scenario = Scenario::seeded("fd", mode, 2, 1, 4);
            scenario.fd = true;
            let report = run_scenario(&scenario).unwrap();
            assert!(report.pass(), "{}: {}", mode.as_str(), report.to_json());
            for row in &report.rows {
                assert_eq!(row.basis, "absolute");
            }
        }
    }

    #[test]
    fn fd_and_exact_agree_on_the_same_data() {
        let exact = run_scenario(&Scenario::seeded("x", Mode::SecondOrder, 2, 1, 6)).unwrap();
        let mut fd_scenario = Scenario::seeded("x", Mode::SecondOrder, 2, 1, 6);
        fd_scenario.fd = true;
        let fd = run_scenario(&fd_scenario).unwrap();
        for (re, rf) in exact.rows.iter().zip(fd.rows.iter()) {
            for (te, tf) in re.terms.iter().zip(rf.terms.iter()) {
                assert!(
                    (te - tf).abs() <= 1e-5 * (1.0 + te.abs()),
                    "{}: exact {te} vs fd {tf}",
                    re.identity
                );
            }
        }
    }

    #[test]
    fn tolerance_override_can_fail_a_passing_row() {
        let mut scenario = Scenario::seeded("tight", Mode::FirstOrder, 2, 1, 5);
        scenario.tol = Some(1e-30);
        let report = run_scenario(&scenario).unwrap();
        // a residual never reaches 1e-30; requiring it must flip the verdict
        assert!(!report.pass());
    }

    #[test]
    fn scenario_validation_rejects_bad_input() {
        let mut both = Scenario::seeded("both", Mode::FirstOrder, 2, 1, 1);
        both.fields = Some(ExplicitFields::default());
        assert!(run_scenario(&both).is_err());

        let mut neither = Scenario::seeded("neither", Mode::FirstOrder, 2, 1, 1);
        neither.seed = None;
        assert!(run_scenario(&neither).is_err());

        let low_dim = Scenario::seeded("lowdim", Mode::SecondOrder, 1, 1, 1);
        assert!(run_scenario(&low_dim).is_err());

        let bad_bounds = Scenario {
            bounds: Some(vec![[0.0, 1.0]]),
            ..Scenario::seeded("badbounds", Mode::FirstOrder, 2, 1, 1)
        };
        assert!(run_scenario(&bad_bounds).is_err());
    }

    #[test]
    fn csv_has_one_line_per_row_plus_header() {
        let report = run_scenario(&Scenario::seeded("csv", Mode::SecondOrder, 2, 1, 3)).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 1 + report.rows.len());
        assert!(csv.starts_with("scenario,identity,"));
    }

    #[test]
    fn suite_covers_every_mode_and_passes() {
        let reports = run_suite().unwrap();
        assert!(reports.len() >= 20);
        for mode in ["first_order", "second_order", "nonholonomic", "edge_cancel"] {
            assert!(reports.iter().any(|r| r.mode.as_str() == mode));
        }
        for report in &reports {
            assert!(report.pass(), "{}", report.to_json());
        }
    }

    #[test]
    fn nonunit_boxes_pass_too() {
        let scenario = Scenario {
            bounds: Some(vec![[-1.5, 0.5], [0.25, 2.0]]),
            ..Scenario::seeded("offset", Mode::SecondOrder, 2, 1, 8)
        };
        let report = run_scenario(&scenario).unwrap();
        assert!(report.pass(), "{}", report.to_json());
    }
}
