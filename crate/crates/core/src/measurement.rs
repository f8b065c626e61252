//! Measurement directions and tunable-sharpness dichotomic measurements.
//!
//! A measurement is described by a unit Bloch vector m and a sharpness
//! eta in [0, 1]. The two branch operators are
//!
//! ```text
//! K(+-) = ( sqrt(1 +- eta) * (I + m.sigma)/2 + sqrt(1 -+ eta) * (I - m.sigma)/2 ) / sqrt(2)
//! ```
//!
//! which interpolate between a projective measurement (eta = 1) and the
//! non-interacting identity channel (eta = 0). The built-in direction sets
//! are the standard Platonic configurations for n = 2, 3, 4, 6, 10 settings.

use std::fmt::Write as _;

use thiserror::Error;

use crate::linalg::{Complex64, ComplexMatrix};

/// Unit-norm tolerance for [`BlochVector`].
const UNIT_NORM_TOL: f64 = 1e-12;

/// Second-moment deviation below which a set counts as a spherical 2-design.
const TWO_DESIGN_TOL: f64 = 1e-10;

/// Number of probe directions used by [`MeasurementSet::is_spherical_two_design`].
const TWO_DESIGN_PROBES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("unsupported setting count {0}: supported values are 2, 3, 4, 6, 10")]
    UnsupportedSettingCount(usize),
    #[error("sharpness {0} is outside [0, 1]")]
    SharpnessOutOfRange(f64),
    #[error("direction ({x}, {y}, {z}) is not unit length")]
    NotUnitLength { x: f64, y: f64, z: f64 },
    #[error("direction vector must be nonzero and finite")]
    InvalidDirection,
    #[error("measurement set must contain at least one direction")]
    EmptySet,
    #[error("set table line {line}: expected three numbers, found {found:?}")]
    MalformedTableLine { line: usize, found: String },
}

/// One of the two outcomes of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    /// +1 for `Plus`, -1 for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// Unit vector on the Bloch sphere: a measurement direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    /// Builds from components that must already have unit norm.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, MeasurementError> {
        let norm_sq = x * x + y * y + z * z;
        if !norm_sq.is_finite() {
            return Err(MeasurementError::InvalidDirection);
        }
        if (norm_sq - 1.0).abs() > UNIT_NORM_TOL {
            return Err(MeasurementError::NotUnitLength { x, y, z });
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes arbitrary nonzero components to a unit direction.
    pub fn from_unnormalized(x: f64, y: f64, z: f64) -> Result<Self, MeasurementError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(MeasurementError::InvalidDirection);
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// The opposite direction -m.
    pub fn antipode(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// The traceless Hermitian operator m.sigma.
    pub fn dot_sigma(&self) -> ComplexMatrix {
        let z = Complex64::new(self.z, 0.0);
        let off = Complex64::new(self.x, -self.y);
        ComplexMatrix::from_rows_2([[z, off], [off.conj(), -z]])
    }
}

/// Ordered list of measurement directions, one per setting index.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    directions: Vec<BlochVector>,
}

impl MeasurementSet {
    /// The standard direction set with `n` settings.
    ///
    /// The raw coordinates (before normalization) are, with a = (1+sqrt(5))/2:
    ///
    /// * n = 2: (1,0,1), (1,0,-1) — a square in the x-z plane
    /// * n = 3: the coordinate axes — octahedron
    /// * n = 4: (1,1,1), (1,-1,-1), (1,1,-1), (1,-1,1) — cube
    /// * n = 6: (0,1,a) and permutations — icosahedron
    /// * n = 10: (0,1/a,a) permutations plus the cube — dodecahedron
    ///
    /// Each set stores one representative per antipodal pair {m, -m};
    /// relabeling the outcome covers the antipode. Row order is the
    /// canonical setting index. All sets except n = 2 are spherical
    /// 2-designs.
    pub fn platonic(n: usize) -> Result<Self, MeasurementError> {
        let a = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let b = 1.0 / a;
        let rows: Vec<[f64; 3]> = match n {
            2 => vec![[1.0, 0.0, 1.0], [1.0, 0.0, -1.0]],
            3 => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            4 => vec![
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [1.0, 1.0, -1.0],
                [1.0, -1.0, 1.0],
            ],
            6 => vec![
                [0.0, 1.0, a],
                [0.0, 1.0, -a],
                [1.0, a, 0.0],
                [1.0, -a, 0.0],
                [a, 0.0, 1.0],
                [a, 0.0, -1.0],
            ],
            10 => vec![
                [0.0, b, a],
                [0.0, b, -a],
                [b, a, 0.0],
                [b, -a, 0.0],
                [a, 0.0, b],
                [a, 0.0, -b],
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [1.0, 1.0, -1.0],
                [1.0, -1.0, 1.0],
            ],
            other => return Err(MeasurementError::UnsupportedSettingCount(other)),
        };
        let directions = rows
            .into_iter()
            .map(|[x, y, z]| BlochVector::from_unnormalized(x, y, z))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { directions })
    }

    /// A set from explicit directions; must be nonempty.
    pub fn from_directions(directions: Vec<BlochVector>) -> Result<Self, MeasurementError> {
        if directions.is_empty() {
            return Err(MeasurementError::EmptySet);
        }
        Ok(Self { directions })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[BlochVector] {
        &self.directions
    }

    /// (1/n) sum_k (v . m_k)^2 — equals 1/3 for every unit v exactly when
    /// the set is a spherical 2-design.
    pub fn second_moment(&self, v: &BlochVector) -> f64 {
        let n = self.directions.len() as f64;
        self.directions
            .iter()
            .map(|m| {
                let d = v.dot(m);
                d * d
            })
            .sum::<f64>()
            / n
    }

    /// Checks the 2-design property against a fixed spread of probe
    /// directions (deterministic, so the verdict is reproducible).
    pub fn is_spherical_two_design(&self) -> bool {
        probe_directions()
            .iter()
            .all(|v| (self.second_moment(v) - 1.0 / 3.0).abs() <= TWO_DESIGN_TOL)
    }

    /// Plain-text table, one "x y z" triple per line, 17 significant digits
    /// (enough to round-trip f64 exactly).
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for m in &self.directions {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", m.x(), m.y(), m.z()).expect("string write");
        }
        out
    }

    /// Parses the [`to_table`](Self::to_table) format. Blank lines and lines
    /// starting with '#' are ignored; rows are normalized.
    pub fn parse_table(text: &str) -> Result<Self, MeasurementError> {
        let mut directions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed {
                Some(values) if values.len() == 3 => {
                    directions.push(BlochVector::from_unnormalized(
                        values[0], values[1], values[2],
                    )?);
                }
                _ => {
                    return Err(MeasurementError::MalformedTableLine {
                        line: idx + 1,
                        found: raw.to_string(),
                    })
                }
            }
        }
        Self::from_directions(directions)
    }
}

/// Evenly spread probe directions (golden-angle spiral).
fn probe_directions() -> Vec<BlochVector> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..TWO_DESIGN_PROBES)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / TWO_DESIGN_PROBES as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden_angle * i as f64;
            BlochVector::from_unnormalized(r * phi.cos(), r * phi.sin(), z)
                .expect("spiral points are nonzero")
        })
        .collect()
}

/// The two branch operators of a dichotomic measurement of sharpness
/// `sharpness` along `direction`. Both operators are Hermitian and satisfy
/// K+†K+ + K-†K- = I.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPair {
    k_plus: ComplexMatrix,
    k_minus: ComplexMatrix,
    direction: BlochVector,
    sharpness: f64,
}

impl KrausPair {
    pub fn new(direction: BlochVector, sharpness: f64) -> Result<Self, MeasurementError> {
        if !(0.0..=1.0).contains(&sharpness) {
            return Err(MeasurementError::SharpnessOutOfRange(sharpness));
        }
        let id = ComplexMatrix::identity(2);
        let m_sigma = direction.dot_sigma();
        let proj_plus = (&id + &m_sigma).scaled(0.5);
        let proj_minus = (&id - &m_sigma).scaled(0.5);
        let hi = ((1.0 + sharpness) / 2.0).sqrt();
        let lo = ((1.0 - sharpness) / 2.0).sqrt();
        Ok(Self {
            k_plus: &proj_plus.scaled(hi) + &proj_minus.scaled(lo),
            k_minus: &proj_plus.scaled(lo) + &proj_minus.scaled(hi),
            direction,
            sharpness,
        })
    }

    pub fn k_plus(&self) -> &ComplexMatrix {
        &self.k_plus
    }

    pub fn k_minus(&self) -> &ComplexMatrix {
        &self.k_minus
    }

    pub fn kraus(&self, outcome: Outcome) -> &ComplexMatrix {
        match outcome {
            Outcome::Plus => &self.k_plus,
            Outcome::Minus => &self.k_minus,
        }
    }

    pub fn direction(&self) -> &BlochVector {
        &self.direction
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// The POVM effects (M+, M-) with M = K† K. Both are positive
    /// semidefinite and sum to the identity; their difference is the
    /// observable eta * m.sigma.
    pub fn effects(&self) -> (ComplexMatrix, ComplexMatrix) {
        let plus = self
            .k_plus
            .adjoint()
            .matmul(&self.k_plus)
            .expect("2x2 by construction");
        let minus = self
            .k_minus
            .adjoint()
            .matmul(&self.k_minus)
            .expect("2x2 by construction");
        (plus, minus)
    }
}

/// The expectation-value observable of the measurement: eta * (m.sigma).
pub fn observable(
    direction: &BlochVector,
    sharpness: f64,
) -> Result<ComplexMatrix, MeasurementError> {
    if !(0.0..=1.0).contains(&sharpness) {
        return Err(MeasurementError::SharpnessOutOfRange(sharpness));
    }
    Ok(direction.dot_sigma().scaled(sharpness))
}
