//! Sharpness sweeps over the four-observer-pair steering scenario.
//!
//! Two sweep shapes are supported: a symmetric sweep where both first
//! observers share one sharpness eta, and a fixed-B sweep where Bob's
//! sharpness is pinned while Alice's varies. Rows carry the four steering
//! parameters, the local-hidden-state bound of the set and per-pair
//! violation flags, and serialize to plot-ready CSV. A bisection search
//! locates the sharpness window where all four pairs violate the bound
//! simultaneously.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use seqsteer::steering::{lhs_bound, scenario_on_set, CorrSign, ScenarioResult, SteeringError};
use seqsteer::MeasurementSet;

/// Hard cap on sweep grid sizes.
pub const MAX_POINTS: usize = 100_000;

/// Smallest accepted bisection tolerance.
pub const MIN_WINDOW_TOL: f64 = 1e-10;

/// CSV column layout, fixed for diff-stability.
pub const CSV_HEADER: &str = "eta_a,eta_b,n,s11,s12,s21,s22,c_n,violations";

/// Grid used to bracket the violation window before bisecting.
const WINDOW_SCAN_POINTS: usize = 1001;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Steering(#[from] SteeringError),
    #[error("eta range [{start}, {end}] must satisfy 0 <= start < end <= 1")]
    BadEtaRange { start: f64, end: f64 },
    #[error("points must be between 2 and {MAX_POINTS}, got {0}")]
    BadPointCount(usize),
    #[error("fixed eta_b {0} is outside [0, 1]")]
    BadFixedEtaB(f64),
    #[error("no measurement settings requested")]
    NoSettings,
    #[error("sweep mode mismatch: this entry point runs {expected} sweeps, got {actual}")]
    ModeMismatch {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("tolerance {0} is below the minimum {MIN_WINDOW_TOL}")]
    TolBelowMinimum(f64),
    #[error("csv line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
}

/// Which sharpness pattern the sweep walks through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMode {
    /// eta_A = eta_B = eta over the grid.
    Symmetric,
    /// eta_A over the grid, eta_B pinned.
    FixedB { eta_b: f64 },
}

impl SweepMode {
    fn name(&self) -> &'static str {
        match self {
            SweepMode::Symmetric => "symmetric",
            SweepMode::FixedB { .. } => "fixed-b",
        }
    }
}

/// A sweep request: mode, which sets to run, and the sharpness grid.
/// `custom_set` replaces the built-in sets when present.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub n_list: Vec<usize>,
    pub eta_start: f64,
    pub eta_end: f64,
    pub points: usize,
    pub sign: CorrSign,
    pub custom_set: Option<MeasurementSet>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.eta_start >= 0.0 && self.eta_start < self.eta_end && self.eta_end <= 1.0) {
            return Err(SweepError::BadEtaRange {
                start: self.eta_start,
                end: self.eta_end,
            });
        }
        if self.points < 2 || self.points > MAX_POINTS {
            return Err(SweepError::BadPointCount(self.points));
        }
        if let SweepMode::FixedB { eta_b } = self.mode {
            if !(0.0..=1.0).contains(&eta_b) {
                return Err(SweepError::BadFixedEtaB(eta_b));
            }
        }
        if self.custom_set.is_none() {
            if self.n_list.is_empty() {
                return Err(SweepError::NoSettings);
            }
            for &n in &self.n_list {
                MeasurementSet::platonic(n).map_err(SteeringError::from)?;
            }
        }
        Ok(())
    }

    /// Uniform grid over [eta_start, eta_end], endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.eta_end - self.eta_start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.eta_start + step * i as f64)
            .collect()
    }

    /// The measurement sets the sweep runs over, in row order.
    fn sets(&self) -> Result<Vec<MeasurementSet>, SweepError> {
        match &self.custom_set {
            Some(set) => Ok(vec![set.clone()]),
            None => self
                .n_list
                .iter()
                .map(|&n| {
                    MeasurementSet::platonic(n)
                        .map_err(SteeringError::from)
                        .map_err(SweepError::from)
                })
                .collect(),
        }
    }
}

/// Per-pair violation flags ordered (11, 12, 21, 22); renders as "1011".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViolationFlags(pub [bool; 4]);

impl fmt::Display for ViolationFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.0 {
            write!(f, "{}", u8::from(bit))?;
        }
        Ok(())
    }
}

impl FromStr for ViolationFlags {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 4 {
            return Err(format!("expected 4 flag characters, got {:?}", s));
        }
        let mut bits = [false; 4];
        for (slot, c) in bits.iter_mut().zip(chars) {
            *slot = match c {
                '0' => false,
                '1' => true,
                other => return Err(format!("invalid flag character {other:?}")),
            };
        }
        Ok(Self(bits))
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta_a: f64,
    pub eta_b: f64,
    pub n: usize,
    pub s11: f64,
    pub s12: f64,
    pub s21: f64,
    pub s22: f64,
    pub c_n: f64,
    pub violations: ViolationFlags,
}

impl SweepRow {
    fn from_result(result: ScenarioResult) -> Self {
        Self {
            eta_a: result.eta_a,
            eta_b: result.eta_b,
            n: result.n,
            s11: result.s11,
            s12: result.s12,
            s21: result.s21,
            s22: result.s22,
            c_n: result.c_n,
            violations: ViolationFlags(result.violations()),
        }
    }
}

/// Symmetric sweep: eta_A = eta_B = eta on a uniform grid, one block of
/// rows per requested set, rows ordered by (n, eta).
pub fn run_symmetric_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    if spec.mode != SweepMode::Symmetric {
        return Err(SweepError::ModeMismatch {
            expected: "symmetric",
            actual: spec.mode.name(),
        });
    }
    spec.validate()?;
    run_grid(spec, |eta| (eta, eta))
}

/// Fixed-B sweep: eta_A walks the grid while eta_B stays pinned.
pub fn run_fixed_b_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    let eta_b = match spec.mode {
        SweepMode::FixedB { eta_b } => eta_b,
        SweepMode::Symmetric => {
            return Err(SweepError::ModeMismatch {
                expected: "fixed-b",
                actual: spec.mode.name(),
            })
        }
    };
    spec.validate()?;
    run_grid(spec, |eta_a| (eta_a, eta_b))
}

/// Dispatches on the spec's mode.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    match spec.mode {
        SweepMode::Symmetric => run_symmetric_sweep(spec),
        SweepMode::FixedB { .. } => run_fixed_b_sweep(spec),
    }
}

fn run_grid(
    spec: &SweepSpec,
    point: impl Fn(f64) -> (f64, f64) + Sync,
) -> Result<Vec<SweepRow>, SweepError> {
    let grid = spec.grid();
    let mut rows = Vec::with_capacity(spec.n_list.len().max(1) * grid.len());
    for set in spec.sets()? {
        // Grid points are independent; evaluate in parallel, collect in
        // grid order.
        let block: Result<Vec<SweepRow>, SteeringError> = grid
            .par_iter()
            .map(|&eta| {
                let (eta_a, eta_b) = point(eta);
                scenario_on_set(eta_a, eta_b, &set, spec.sign).map(SweepRow::from_result)
            })
            .collect();
        rows.extend(block?);
    }
    Ok(rows)
}

/// Finds the symmetric-sharpness interval on which all four observer pairs
/// exceed the bound of the n-setting standard set, by bracketing on a
/// coarse grid and bisecting min(S11, S12, S21, S22) - C_n at each edge to
/// within `tol`. Returns `None` when no grid point violates all four
/// bounds (as happens for n = 2).
pub fn find_violation_window(n: usize, tol: f64) -> Result<Option<(f64, f64)>, SweepError> {
    let set = MeasurementSet::platonic(n).map_err(SteeringError::from)?;
    find_violation_window_on_set(&set, CorrSign::default(), tol)
}

/// As [`find_violation_window`] on an explicit set and sign convention.
pub fn find_violation_window_on_set(
    set: &MeasurementSet,
    sign: CorrSign,
    tol: f64,
) -> Result<Option<(f64, f64)>, SweepError> {
    if !tol.is_finite() || tol < MIN_WINDOW_TOL {
        return Err(SweepError::TolBelowMinimum(tol));
    }
    let bound = lhs_bound(set)?;
    let margin = |eta: f64| -> Result<f64, SweepError> {
        let r = scenario_on_set(eta, eta, set, sign)?;
        Ok(r.s11.min(r.s12).min(r.s21).min(r.s22) - bound)
    };

    let step = 1.0 / (WINDOW_SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..WINDOW_SCAN_POINTS).map(|i| i as f64 * step).collect();
    let margins: Result<Vec<f64>, SweepError> = grid.par_iter().map(|&eta| margin(eta)).collect();
    let margins = margins?;

    let Some(first_inside) = margins.iter().position(|&m| m > 0.0) else {
        return Ok(None);
    };
    let last_inside = margins
        .iter()
        .rposition(|&m| m > 0.0)
        .expect("at least first_inside");

    // The margin is negative at eta = 0 (every parameter vanishes) and, for
    // the built-in sets, at eta = 1 (the doubly averaged pair falls below
    // the bound), so both brackets normally sit inside the grid. Degenerate
    // custom sets may touch an endpoint; then the endpoint is the edge.
    let left = if first_inside > 0 {
        bisect_edge(&margin, grid[first_inside - 1], grid[first_inside], tol)?
    } else {
        grid[first_inside]
    };
    let right = if last_inside + 1 < grid.len() {
        bisect_edge(
            &|eta| margin(eta).map(|m| -m),
            grid[last_inside],
            grid[last_inside + 1],
            tol,
        )?
    } else {
        grid[last_inside]
    };
    Ok(Some((left, right)))
}

/// Bisects a sign change with f(lo) <= 0 < f(hi) or f monotone across the
/// bracket; returns the midpoint of the final bracket.
fn bisect_edge(
    f: &impl Fn(f64) -> Result<f64, SweepError>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, SweepError> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn fmt_float(x: f64) -> String {
    // 12 significant digits; well beyond plotting needs, below the crate's
    // tolerance thresholds. Negative zero is folded into zero so equal
    // sweeps always diff clean.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.11e}", x)
}

/// Writes rows as UTF-8 CSV with a header and LF line endings.
pub fn write_csv<W: Write>(writer: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(writer, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{}",
            fmt_float(row.eta_a),
            fmt_float(row.eta_b),
            row.n,
            fmt_float(row.s11),
            fmt_float(row.s12),
            fmt_float(row.s21),
            fmt_float(row.s22),
            fmt_float(row.c_n),
            row.violations,
        )?;
    }
    Ok(())
}

/// Parses CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, SweepError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        other => {
            return Err(SweepError::MalformedCsv {
                line: 1,
                reason: format!(
                    "expected header {CSV_HEADER:?}, found {:?}",
                    other.map(|(_, h)| h)
                ),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(SweepError::MalformedCsv {
                line: idx + 1,
                reason: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let float = |i: usize| -> Result<f64, SweepError> {
            fields[i].parse().map_err(|e| SweepError::MalformedCsv {
                line: idx + 1,
                reason: format!("field {}: {e}", i + 1),
            })
        };
        rows.push(SweepRow {
            eta_a: float(0)?,
            eta_b: float(1)?,
            n: fields[2].parse().map_err(|e| SweepError::MalformedCsv {
                line: idx + 1,
                reason: format!("field 3: {e}"),
            })?,
            s11: float(3)?,
            s12: float(4)?,
            s21: float(5)?,
            s22: float(6)?,
            c_n: float(7)?,
            violations: fields[8]
                .parse()
                .map_err(|reason| SweepError::MalformedCsv {
                    line: idx + 1,
                    reason,
                })?,
        });
    }
    Ok(rows)
}
