//! The sequential two-sided steering pipeline.
//!
//! A singlet pair is measured by two observers per side: the first with
//! tunable sharpness, the second always projectively. For a pair of
//! observers the steering parameter averages the outcome correlation over
//! matched settings,
//!
//! ```text
//! S = (1/n) sum_k sum_{a,b} sign(a) sign(b) p(a, b | k, k)
//! ```
//!
//! and steering is certified when S exceeds the bound C_n that any local
//! hidden state strategy can reach. Downstream observers see the uniform
//! average over the prior observer's settings and outcomes (no
//! post-selection), which contracts the shared correlations and makes the
//! four observer-pair parameters trade off against each other.

use thiserror::Error;

use crate::linalg::{Complex64, ComplexMatrix, LinalgError, Tolerances};
use crate::measurement::{KrausPair, MeasurementError, MeasurementSet, Outcome};

/// Eigenvalue floor for a valid density matrix; absorbs round-off
/// accumulated through repeated channel applications.
const STATE_PSD_TOL: f64 = 1e-9;

/// Eigenvalue floor for assemblage members.
const ASSEMBLAGE_PSD_TOL: f64 = 1e-10;

/// Largest setting count accepted by the sign enumeration in [`lhs_bound`].
const MAX_LHS_SETTINGS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteeringError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error("operator is {0}x{0}, expected 4x4 for a two-qubit state")]
    NotTwoQubit(usize),
    #[error("density matrix is not Hermitian: max |rho - rho†| = {0:.3e}")]
    StateNotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    StateNotNormalized(f64),
    #[error("density matrix has eigenvalue {0:.3e} below the positivity tolerance")]
    StateNotPositive(f64),
    #[error("assemblage member (setting {setting}) has eigenvalue {eigenvalue:.3e} below the positivity tolerance")]
    AssemblageNotPositive { setting: usize, eigenvalue: f64 },
    #[error("assemblage signals: outcome sum for setting {setting} deviates by {deviation:.3e}")]
    AssemblageSignals { setting: usize, deviation: f64 },
    #[error("assemblage outcome sum has trace {0}, expected 1")]
    AssemblageNotNormalized(f64),
    #[error("{0} settings exceed the sign-enumeration budget of {MAX_LHS_SETTINGS}")]
    TooManySettings(usize),
    #[error("observer config is for side {actual:?}, expected side {expected:?}")]
    WrongSide { expected: Side, actual: Side },
    #[error("at least one observer must be configured")]
    NoObserver,
}

/// Which qubit of the pair an observer measures. Side A is the left tensor
/// factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Sign convention applied to the correlation average.
///
/// The raw outcome-product average is negative on the anticorrelated
/// singlet; under `Anticorrelation` Alice announces the negated outcome so
/// the reported parameter is positive. `Raw` keeps the plain product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrSign {
    #[default]
    Anticorrelation,
    Raw,
}

impl CorrSign {
    pub fn factor(self) -> f64 {
        match self {
            CorrSign::Anticorrelation => -1.0,
            CorrSign::Raw => 1.0,
        }
    }
}

/// Validated 4x4 density matrix of the qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMatrix,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn new(rho: ComplexMatrix) -> Result<Self, SteeringError> {
        let tol = Tolerances::default();
        if rho.dim() != 4 {
            return Err(SteeringError::NotTwoQubit(rho.dim()));
        }
        let deviation = rho.hermiticity_deviation();
        if deviation > tol.hermiticity {
            return Err(SteeringError::StateNotHermitian(deviation));
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > tol.trace_check {
            return Err(SteeringError::StateNotNormalized(trace));
        }
        let eigenvalues = rho.hermitian_eigenvalues()?;
        if eigenvalues[0] < -STATE_PSD_TOL {
            return Err(SteeringError::StateNotPositive(eigenvalues[0]));
        }
        Ok(Self { rho })
    }

    /// The singlet (|01> - |10>)/sqrt(2) as a density matrix.
    pub fn singlet() -> Self {
        let h = Complex64::new(0.5, 0.0);
        let mut rho = ComplexMatrix::zeros(4);
        rho.set(1, 1, h);
        rho.set(1, 2, -h);
        rho.set(2, 1, -h);
        rho.set(2, 2, h);
        Self { rho }
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Tr(rho * observable) for a Hermitian 4x4 observable.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        (&self.rho * observable).trace().re
    }

    /// Tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }
}

/// One observer: which side they act on, how sharply they measure, and
/// which direction set they draw settings from.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverConfig {
    side: Side,
    sharpness: f64,
    set: MeasurementSet,
}

impl ObserverConfig {
    pub fn new(side: Side, sharpness: f64, set: MeasurementSet) -> Result<Self, SteeringError> {
        if !(0.0..=1.0).contains(&sharpness) {
            return Err(MeasurementError::SharpnessOutOfRange(sharpness).into());
        }
        Ok(Self {
            side,
            sharpness,
            set,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn set(&self) -> &MeasurementSet {
        &self.set
    }
}

/// The unnormalized conditional states of the untouched side, one per
/// (setting, outcome) of the measuring observer.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    entries: Vec<[ComplexMatrix; 2]>,
}

impl Assemblage {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, setting: usize, outcome: Outcome) -> &ComplexMatrix {
        match outcome {
            Outcome::Plus => &self.entries[setting][0],
            Outcome::Minus => &self.entries[setting][1],
        }
    }

    /// Sum over outcomes for one setting; the same reduced state for every
    /// setting when no-signalling holds.
    pub fn outcome_sum(&self, setting: usize) -> ComplexMatrix {
        &self.entries[setting][0] + &self.entries[setting][1]
    }

    /// Checks positivity of every member, no-signalling across settings and
    /// unit normalization of the outcome sum.
    pub fn validate(&self) -> Result<(), SteeringError> {
        let tol = Tolerances::default();
        for (k, pair) in self.entries.iter().enumerate() {
            for member in pair {
                let eigenvalues = member.hermitian_eigenvalues()?;
                if eigenvalues[0] < -ASSEMBLAGE_PSD_TOL {
                    return Err(SteeringError::AssemblageNotPositive {
                        setting: k,
                        eigenvalue: eigenvalues[0],
                    });
                }
            }
        }
        let reference = self.outcome_sum(0);
        let trace = reference.trace().re;
        if (trace - 1.0).abs() > tol.trace_check {
            return Err(SteeringError::AssemblageNotNormalized(trace));
        }
        for k in 1..self.entries.len() {
            let deviation = self.outcome_sum(k).max_abs_diff(&reference);
            if deviation > tol.trace_check {
                return Err(SteeringError::AssemblageSignals {
                    setting: k,
                    deviation,
                });
            }
        }
        Ok(())
    }
}

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.tensor(b).expect("2x2 operands by construction")
}

/// Applies one (setting, outcome) branch per side to the state and returns
/// the unnormalized post-measurement operator together with its probability.
/// `None` on a side means no measurement is applied there.
pub fn conditional_state(
    rho: &TwoQubitState,
    alice: Option<(&KrausPair, Outcome)>,
    bob: Option<(&KrausPair, Outcome)>,
) -> (ComplexMatrix, f64) {
    let id = ComplexMatrix::identity(2);
    let ka = alice.map_or_else(|| id.clone(), |(pair, o)| pair.kraus(o).clone());
    let kb = bob.map_or_else(|| id.clone(), |(pair, o)| pair.kraus(o).clone());
    let branch = kron(&ka, &kb);
    let sandwiched = &(&branch * rho.density()) * &branch.adjoint();
    let probability = sandwiched.trace().re;
    (sandwiched, probability)
}

/// The conditional-state assemblage seen by the untouched side when the
/// configured observer measures every setting with both outcomes.
pub fn assemblage(rho: &TwoQubitState, cfg: &ObserverConfig) -> Result<Assemblage, SteeringError> {
    let id = ComplexMatrix::identity(2);
    let mut entries = Vec::with_capacity(cfg.set().len());
    for direction in cfg.set().directions() {
        let pair = KrausPair::new(*direction, cfg.sharpness())?;
        let (m_plus, m_minus) = pair.effects();
        let mut row = Vec::with_capacity(2);
        for effect in [m_plus, m_minus] {
            let member = match cfg.side() {
                Side::A => (&kron(&effect, &id) * rho.density()).partial_trace_a()?,
                Side::B => (&kron(&id, &effect) * rho.density()).partial_trace_b()?,
            };
            row.push(member);
        }
        let minus = row.pop().expect("two effects");
        let plus = row.pop().expect("two effects");
        entries.push([plus, minus]);
    }
    Ok(Assemblage { entries })
}

/// The largest correlation average any local-hidden-state strategy reaches
/// on the given set: the maximum over sign patterns {a_k} of the top
/// eigenvalue of (1/n) sum_k a_k (m_k . sigma). Flipping every sign leaves
/// the value unchanged, so only half the patterns are enumerated.
pub fn lhs_bound(set: &MeasurementSet) -> Result<f64, SteeringError> {
    let n = set.len();
    if n > MAX_LHS_SETTINGS {
        return Err(SteeringError::TooManySettings(n));
    }
    let operators: Vec<ComplexMatrix> = set.directions().iter().map(|m| m.dot_sigma()).collect();
    let mut best = f64::NEG_INFINITY;
    for pattern in 0..(1usize << (n - 1)) {
        let mut sum = operators[0].clone();
        for (k, op) in operators.iter().enumerate().skip(1) {
            if pattern >> (k - 1) & 1 == 1 {
                sum = &sum + op;
            } else {
                sum = &sum - op;
            }
        }
        let eigenvalues = sum.scaled(1.0 / n as f64).hermitian_eigenvalues()?;
        best = best.max(*eigenvalues.last().expect("nonempty"));
    }
    Ok(best)
}

/// The matched-settings steering parameter between an observer of sharpness
/// `eta_a` on side A and `eta_b` on side B, under the default
/// anticorrelation sign convention.
pub fn steering_parameter(
    rho: &TwoQubitState,
    set: &MeasurementSet,
    eta_a: f64,
    eta_b: f64,
) -> Result<f64, SteeringError> {
    steering_parameter_with(rho, set, eta_a, eta_b, CorrSign::default())
}

/// As [`steering_parameter`] with an explicit sign convention.
pub fn steering_parameter_with(
    rho: &TwoQubitState,
    set: &MeasurementSet,
    eta_a: f64,
    eta_b: f64,
    sign: CorrSign,
) -> Result<f64, SteeringError> {
    let mut total = 0.0;
    for direction in set.directions() {
        let pair_a = KrausPair::new(*direction, eta_a)?;
        let pair_b = KrausPair::new(*direction, eta_b)?;
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                let (_, p) = conditional_state(rho, Some((&pair_a, a)), Some((&pair_b, b)));
                total += a.sign() * b.sign() * p;
            }
        }
    }
    Ok(sign.factor() * total / set.len() as f64)
}

/// The state handed to the next observers when the configured measurements
/// are performed but neither the settings nor the outcomes are disclosed:
/// the uniform average over all setting pairs and outcome branches. `None`
/// leaves that side untouched. The result is again a valid density matrix.
pub fn averaged_state(
    rho: &TwoQubitState,
    alice: Option<&ObserverConfig>,
    bob: Option<&ObserverConfig>,
) -> Result<TwoQubitState, SteeringError> {
    if alice.is_none() && bob.is_none() {
        return Err(SteeringError::NoObserver);
    }
    if let Some(cfg) = alice {
        if cfg.side() != Side::A {
            return Err(SteeringError::WrongSide {
                expected: Side::A,
                actual: cfg.side(),
            });
        }
    }
    if let Some(cfg) = bob {
        if cfg.side() != Side::B {
            return Err(SteeringError::WrongSide {
                expected: Side::B,
                actual: cfg.side(),
            });
        }
    }

    let (branches_a, settings_a) = side_branches(alice)?;
    let (branches_b, settings_b) = side_branches(bob)?;
    let mut sum = ComplexMatrix::zeros(4);
    for branch_a in &branches_a {
        for branch_b in &branches_b {
            let (conditional, _) = conditional_state(
                rho,
                branch_a.as_ref().map(|(pair, o)| (pair, *o)),
                branch_b.as_ref().map(|(pair, o)| (pair, *o)),
            );
            sum = &sum + &conditional;
        }
    }
    TwoQubitState::new(sum.scaled(1.0 / (settings_a * settings_b) as f64))
}

type Branch = Option<(KrausPair, Outcome)>;

/// All (setting, outcome) branches for one side and the setting count the
/// average divides by; an unconfigured side is a single identity branch.
fn side_branches(cfg: Option<&ObserverConfig>) -> Result<(Vec<Branch>, usize), SteeringError> {
    match cfg {
        None => Ok((vec![None], 1)),
        Some(cfg) => {
            let mut branches = Vec::with_capacity(2 * cfg.set().len());
            for direction in cfg.set().directions() {
                let pair = KrausPair::new(*direction, cfg.sharpness())?;
                branches.push(Some((pair.clone(), Outcome::Plus)));
                branches.push(Some((pair, Outcome::Minus)));
            }
            Ok((branches, cfg.set().len()))
        }
    }
}

/// Steering parameters of all four observer pairs at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioResult {
    pub eta_a: f64,
    pub eta_b: f64,
    pub n: usize,
    /// First Alice vs first Bob.
    pub s11: f64,
    /// First Alice vs second Bob.
    pub s12: f64,
    /// Second Alice vs first Bob.
    pub s21: f64,
    /// Second Alice vs second Bob.
    pub s22: f64,
    /// Bound reached by local-hidden-state strategies on this set.
    pub c_n: f64,
}

impl ScenarioResult {
    /// Strict violation of the bound, ordered (11, 12, 21, 22).
    pub fn violations(&self) -> [bool; 4] {
        [
            self.s11 > self.c_n,
            self.s12 > self.c_n,
            self.s21 > self.c_n,
            self.s22 > self.c_n,
        ]
    }
}

/// Runs the full four-pair scenario on the singlet with the n-setting
/// standard set: the first observers measure with sharpness `eta_a` and
/// `eta_b`, the second observers measure projectively on the averaged
/// post-measurement states.
///
/// For the 2-design sets (n >= 3) the four parameters do not depend on n;
/// the n = 2 square is not a 2-design, so its cross-pair values follow the
/// in-plane contraction (1 + sqrt(1 - eta^2))/2 instead.
pub fn scenario(eta_a: f64, eta_b: f64, n: usize) -> Result<ScenarioResult, SteeringError> {
    let set = MeasurementSet::platonic(n)?;
    scenario_on_set(eta_a, eta_b, &set, CorrSign::default())
}

/// As [`scenario`] on an explicit measurement set and sign convention.
pub fn scenario_on_set(
    eta_a: f64,
    eta_b: f64,
    set: &MeasurementSet,
    sign: CorrSign,
) -> Result<ScenarioResult, SteeringError> {
    let initial = TwoQubitState::singlet();
    let cfg_a = ObserverConfig::new(Side::A, eta_a, set.clone())?;
    let cfg_b = ObserverConfig::new(Side::B, eta_b, set.clone())?;

    let s11 = steering_parameter_with(&initial, set, eta_a, eta_b, sign)?;
    let after_a = averaged_state(&initial, Some(&cfg_a), None)?;
    let s21 = steering_parameter_with(&after_a, set, 1.0, eta_b, sign)?;
    let after_b = averaged_state(&initial, None, Some(&cfg_b))?;
    let s12 = steering_parameter_with(&after_b, set, eta_a, 1.0, sign)?;
    let after_both = averaged_state(&initial, Some(&cfg_a), Some(&cfg_b))?;
    let s22 = steering_parameter_with(&after_both, set, 1.0, 1.0, sign)?;
    let c_n = lhs_bound(set)?;

    Ok(ScenarioResult {
        eta_a,
        eta_b,
        n: set.len(),
        s11,
        s12,
        s21,
        s22,
        c_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::BlochVector;

    fn z_axis() -> BlochVector {
        BlochVector::new(0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn singlet_entries_and_purity() {
        let rho = TwoQubitState::singlet();
        assert!((rho.density().get(1, 1).re - 0.5).abs() < 1e-15);
        assert!((rho.density().get(1, 2).re + 0.5).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_reduced_state_is_maximally_mixed() {
        let rho = TwoQubitState::singlet();
        let reduced = rho.density().partial_trace_a().unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scaled(0.5)) < 1e-15);
    }

    #[test]
    fn singlet_is_perfectly_anticorrelated_along_z() {
        let rho = TwoQubitState::singlet();
        let sz = ComplexMatrix::pauli_z();
        let zz = sz.tensor(&sz).unwrap();
        assert!((rho.expectation(&zz) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn state_validation_rejects_bad_inputs() {
        assert!(matches!(
            TwoQubitState::new(ComplexMatrix::identity(2)),
            Err(SteeringError::NotTwoQubit(2))
        ));
        // Trace 4, not 1.
        assert!(matches!(
            TwoQubitState::new(ComplexMatrix::identity(4)),
            Err(SteeringError::StateNotNormalized(_))
        ));
        // Unit trace but indefinite.
        let sz = ComplexMatrix::pauli_z();
        let id = ComplexMatrix::identity(2);
        let m = &sz.tensor(&id).unwrap().scaled(0.5) + &ComplexMatrix::identity(4).scaled(0.25);
        assert!(matches!(
            TwoQubitState::new(m),
            Err(SteeringError::StateNotPositive(_))
        ));
    }

    #[test]
    fn sharp_anticorrelated_outcomes_on_the_singlet() {
        let rho = TwoQubitState::singlet();
        let pair = KrausPair::new(z_axis(), 1.0).unwrap();
        let (_, p_plus_minus) = conditional_state(
            &rho,
            Some((&pair, Outcome::Plus)),
            Some((&pair, Outcome::Minus)),
        );
        assert!((p_plus_minus - 0.5).abs() < 1e-13);
        let (_, p_plus_plus) = conditional_state(
            &rho,
            Some((&pair, Outcome::Plus)),
            Some((&pair, Outcome::Plus)),
        );
        assert!(p_plus_plus.abs() < 1e-13);
    }

    #[test]
    fn null_measurements_split_uniformly() {
        let rho = TwoQubitState::singlet();
        let pair_a = KrausPair::new(z_axis(), 0.0).unwrap();
        let pair_b = KrausPair::new(BlochVector::new(1.0, 0.0, 0.0).unwrap(), 0.0).unwrap();
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                let (_, p) = conditional_state(&rho, Some((&pair_a, a)), Some((&pair_b, b)));
                assert!((p - 0.25).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn unmeasured_sides_leave_the_state_alone() {
        let rho = TwoQubitState::singlet();
        let (out, p) = conditional_state(&rho, None, None);
        assert!(out.max_abs_diff(rho.density()) < 1e-15);
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sharp_assemblage_on_the_singlet_collapses_b() {
        let rho = TwoQubitState::singlet();
        let cfg = ObserverConfig::new(Side::A, 1.0, MeasurementSet::platonic(3).unwrap()).unwrap();
        let asm = assemblage(&rho, &cfg).unwrap();
        asm.validate().unwrap();
        // Setting 2 is the z axis; outcome + on A leaves B in |1><1| / 2.
        let mut expected = ComplexMatrix::zeros(2);
        expected.set(1, 1, Complex64::new(0.5, 0.0));
        assert!(asm.entry(2, Outcome::Plus).max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn null_assemblage_is_uniform() {
        let rho = TwoQubitState::singlet();
        let cfg = ObserverConfig::new(Side::A, 0.0, MeasurementSet::platonic(4).unwrap()).unwrap();
        let asm = assemblage(&rho, &cfg).unwrap();
        asm.validate().unwrap();
        let quarter = ComplexMatrix::identity(2).scaled(0.25);
        for k in 0..asm.n() {
            for o in Outcome::BOTH {
                assert!(asm.entry(k, o).max_abs_diff(&quarter) < 1e-13);
            }
        }
    }

    #[test]
    fn outcome_sums_reproduce_the_reduced_state() {
        let rho = TwoQubitState::singlet();
        for side in [Side::A, Side::B] {
            let cfg =
                ObserverConfig::new(side, 0.37, MeasurementSet::platonic(6).unwrap()).unwrap();
            let asm = assemblage(&rho, &cfg).unwrap();
            let reduced = match side {
                Side::A => rho.density().partial_trace_a().unwrap(),
                Side::B => rho.density().partial_trace_b().unwrap(),
            };
            for k in 0..asm.n() {
                assert!(asm.outcome_sum(k).max_abs_diff(&reduced) < 1e-12);
            }
        }
    }

    #[test]
    fn lhs_bounds_match_the_known_values() {
        let cases = [
            (2, 1.0 / 2.0_f64.sqrt(), 1e-12),
            (3, 1.0 / 3.0_f64.sqrt(), 1e-12),
            (4, 1.0 / 3.0_f64.sqrt(), 1e-12),
            (6, (1.0 + 5.0_f64.sqrt()) / 6.0, 1e-12),
            (10, 0.523606797749979, 1e-12),
        ];
        for (n, expected, tol) in cases {
            let set = MeasurementSet::platonic(n).unwrap();
            let bound = lhs_bound(&set).unwrap();
            assert!(
                (bound - expected).abs() < tol,
                "n={n}: {bound} vs {expected}"
            );
        }
    }

    #[test]
    fn lhs_bound_rejects_oversized_sets() {
        let z = z_axis();
        let set = MeasurementSet::from_directions(vec![z; 17]).unwrap();
        assert!(matches!(
            lhs_bound(&set),
            Err(SteeringError::TooManySettings(17))
        ));
    }

    #[test]
    fn steering_parameter_anchors() {
        let rho = TwoQubitState::singlet();
        for n in [2, 3, 4, 6, 10] {
            let set = MeasurementSet::platonic(n).unwrap();
            let sharp = steering_parameter(&rho, &set, 1.0, 1.0).unwrap();
            assert!((sharp - 1.0).abs() < 1e-12, "n={n}");
            let null_a = steering_parameter(&rho, &set, 0.0, 0.7).unwrap();
            assert!(null_a.abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn symmetric_weak_steering_is_eta_squared() {
        let rho = TwoQubitState::singlet();
        let set = MeasurementSet::platonic(3).unwrap();
        for eta in [0.2, 0.5, 0.766, 0.93] {
            let got = steering_parameter(&rho, &set, eta, eta).unwrap();
            assert!((got - eta * eta).abs() < 1e-13, "eta={eta}");
        }
    }

    #[test]
    fn raw_sign_convention_negates_the_parameter() {
        let rho = TwoQubitState::singlet();
        let set = MeasurementSet::platonic(3).unwrap();
        let flipped = steering_parameter_with(&rho, &set, 0.8, 0.6, CorrSign::Anticorrelation);
        let raw = steering_parameter_with(&rho, &set, 0.8, 0.6, CorrSign::Raw);
        assert!((flipped.unwrap() + raw.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn zero_sharpness_average_leaves_the_state_unchanged() {
        let rho = TwoQubitState::singlet();
        let set = MeasurementSet::platonic(3).unwrap();
        let cfg_a = ObserverConfig::new(Side::A, 0.0, set.clone()).unwrap();
        let cfg_b = ObserverConfig::new(Side::B, 0.0, set).unwrap();
        let out = averaged_state(&rho, Some(&cfg_a), Some(&cfg_b)).unwrap();
        assert!(out.density().max_abs_diff(rho.density()) < 1e-12);
    }

    #[test]
    fn one_sided_average_scales_off_diagonal_blocks() {
        // For a single z setting the off-diagonal blocks in the z eigenbasis
        // shrink by sqrt(1 - eta^2).
        let rho = TwoQubitState::singlet();
        let eta = 0.73;
        let set = MeasurementSet::from_directions(vec![z_axis()]).unwrap();
        let cfg = ObserverConfig::new(Side::A, eta, set).unwrap();
        let out = averaged_state(&rho, Some(&cfg), None).unwrap();
        let scale = (1.0 - eta * eta).sqrt();
        assert!((out.density().get(1, 2).re - scale * rho.density().get(1, 2).re).abs() < 1e-13);
        // Diagonal blocks are untouched.
        assert!((out.density().get(1, 1).re - 0.5).abs() < 1e-13);
    }

    /// Brute-force oracle for the averaged state: the explicit double sum
    /// over all setting pairs and outcome branches of the conditional
    /// states, computed independently of `averaged_state`.
    fn brute_force_average(
        rho: &TwoQubitState,
        set: &MeasurementSet,
        eta_a: f64,
        eta_b: f64,
    ) -> ComplexMatrix {
        let n = set.len();
        let mut sum = ComplexMatrix::zeros(4);
        let mut terms = 0;
        for ma in set.directions() {
            for mb in set.directions() {
                let pa = KrausPair::new(*ma, eta_a).unwrap();
                let pb = KrausPair::new(*mb, eta_b).unwrap();
                for a in Outcome::BOTH {
                    for b in Outcome::BOTH {
                        let (m, _) = conditional_state(rho, Some((&pa, a)), Some((&pb, b)));
                        sum = &sum + &m;
                        terms += 1;
                    }
                }
            }
        }
        assert_eq!(terms, 4 * n * n);
        sum.scaled(1.0 / (n * n) as f64)
    }

    #[test]
    fn sharp_two_sided_average_contracts_each_axis_to_one_ninth() {
        // All 36 conditional branches of the sharp 3-setting measurement on
        // both sides: each side contributes a factor 1/3, so the matched
        // correlations land at -1/9.
        let rho = TwoQubitState::singlet();
        let set = MeasurementSet::platonic(3).unwrap();
        let brute = brute_force_average(&rho, &set, 1.0, 1.0);

        let cfg_a = ObserverConfig::new(Side::A, 1.0, set.clone()).unwrap();
        let cfg_b = ObserverConfig::new(Side::B, 1.0, set.clone()).unwrap();
        let out = averaged_state(&rho, Some(&cfg_a), Some(&cfg_b)).unwrap();
        assert!(out.density().max_abs_diff(&brute) < 1e-13);

        for m in set.directions() {
            let op = m.dot_sigma().tensor(&m.dot_sigma()).unwrap();
            assert!((out.expectation(&op) + 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sharp_one_sided_average_contracts_each_axis_to_one_third() {
        let rho = TwoQubitState::singlet();
        let set = MeasurementSet::platonic(3).unwrap();
        let cfg_a = ObserverConfig::new(Side::A, 1.0, set.clone()).unwrap();
        let out = averaged_state(&rho, Some(&cfg_a), None).unwrap();
        for m in set.directions() {
            let op = m.dot_sigma().tensor(&m.dot_sigma()).unwrap();
            assert!((out.expectation(&op) + 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn averaged_state_checks_sides_and_presence() {
        let rho = TwoQubitState::singlet();
        let set = MeasurementSet::platonic(3).unwrap();
        assert!(matches!(
            averaged_state(&rho, None, None),
            Err(SteeringError::NoObserver)
        ));
        let cfg_b = ObserverConfig::new(Side::B, 0.5, set).unwrap();
        assert!(matches!(
            averaged_state(&rho, Some(&cfg_b), None),
            Err(SteeringError::WrongSide { .. })
        ));
    }

    #[test]
    fn scenario_sharp_anchor() {
        let result = scenario(1.0, 1.0, 3).unwrap();
        assert!((result.s11 - 1.0).abs() < 1e-12);
        assert!((result.s22 - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(result.violations(), [true, false, false, false]);
    }

    #[test]
    fn scenario_cross_pairs_agree_at_symmetric_sharpness() {
        for n in [2, 3, 6] {
            for eta in [0.3, 0.76, 0.9] {
                let result = scenario(eta, eta, n).unwrap();
                assert!((result.s12 - result.s21).abs() < 1e-12, "n={n} eta={eta}");
            }
        }
    }

    #[test]
    fn scenario_near_the_simultaneous_window() {
        let result = scenario(0.76, 0.76, 3).unwrap();
        assert_eq!(result.violations(), [true, true, true, true]);
    }
}
