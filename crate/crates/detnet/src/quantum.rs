//! Detector-network state model.
//!
//! Fixed conventions shared by the whole crate:
//!
//! * `|u+>` is the first basis vector of each two-level detector and
//!   `|u->` the second.
//! * Detector 1 is the leftmost tensor factor; detector j occupies the
//!   j-th slot from the left.
//! * [`FiringPattern`] bit j (zero-based) marks detector j+1 as having
//!   interacted. Its label string prints the highest bit first, so for
//!   four detectors mask 0b1000 reads "1000" and means detector 4 fired.
//! * States are compared through overlap magnitude, never entrywise, so
//!   global phase is physically irrelevant everywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{DetnetError, Result};
use crate::linalg::{c64, is_psd, CMatrix, CVector};

/// Norm / Hermiticity / trace construction tolerance.
const CONSTRUCT_TOL: f64 = 1e-10;
/// Allowed negative slack on PSD checks.
const PSD_SLACK: f64 = 1e-10;
/// Entrywise tolerance on POVM completeness.
const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on prior sums.
const PRIOR_TOL: f64 = 1e-12;
/// Largest supported detector count (composite dimension 64).
const MAX_DETECTORS: usize = 6;

/// Single-detector phase kick, diagonal in the u basis:
/// `U(theta) = diag(e^{i theta}, e^{-i theta})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorUnitary {
    theta: f64,
}

impl DetectorUnitary {
    /// `theta` must be a finite angle in `[0, pi/2]` radians.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta) {
            return Err(DetnetError::Invalid(format!(
                "detector angle {theta} outside [0, pi/2]"
            )));
        }
        Ok(DetectorUnitary { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// 2x2 matrix form in the (|u+>, |u->) basis.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_diag(&[
            Complex64::from_polar(1.0, self.theta),
            Complex64::from_polar(1.0, -self.theta),
        ])
    }
}

/// Which detectors of an n-detector row interacted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiringPattern {
    n: usize,
    mask: usize,
}

impl FiringPattern {
    /// `n` detectors (1..=6), `mask` bit j set when detector j+1 fired.
    pub fn new(n: usize, mask: usize) -> Result<Self> {
        if n == 0 || n > MAX_DETECTORS {
            return Err(DetnetError::Invalid(format!(
                "detector count {n} outside 1..={MAX_DETECTORS}"
            )));
        }
        if mask >> n != 0 {
            return Err(DetnetError::Invalid(format!(
                "mask {mask:#b} does not fit in {n} bits"
            )));
        }
        Ok(FiringPattern { n, mask })
    }

    pub fn detectors(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    /// True when detector j+1 (bit j) fired.
    pub fn fired(&self, j: usize) -> bool {
        assert!(j < self.n, "detector index out of range");
        (self.mask >> j) & 1 == 1
    }

    pub fn count_fired(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Binary label, highest bit leftmost: n=4, mask=0b1000 -> "1000".
    pub fn label(&self) -> String {
        (0..self.n)
            .rev()
            .map(|j| if self.fired(j) { '1' } else { '0' })
            .collect()
    }

    /// All 2^n patterns for n detectors in ascending mask order.
    pub fn all(n: usize) -> Result<Vec<FiringPattern>> {
        (0..(1usize << n)).map(|mask| Self::new(n, mask)).collect()
    }
}

impl fmt::Display for FiringPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Unit vector in a 2^n dimensional composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// The amplitude vector must have power-of-two dimension and unit
    /// norm within 1e-10.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if !amplitudes.dim().is_power_of_two() {
            return Err(DetnetError::Invalid(format!(
                "state dimension {} is not a power of two",
                amplitudes.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > CONSTRUCT_TOL {
            return Err(DetnetError::Invalid(format!(
                "state norm {norm} deviates from one"
            )));
        }
        Ok(PureState { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn vector(&self) -> &CVector {
        &self.amplitudes
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.amplitudes.inner(&other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.tensor(&other.amplitudes),
        }
    }

    pub fn projector(&self) -> CMatrix {
        self.amplitudes.projector()
    }
}

/// Trace-one positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Requires Hermiticity within 1e-10 entrywise, unit trace within
    /// 1e-10, and spectrum bounded below by -1e-10.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(DetnetError::DimensionMismatch(matrix.rows(), matrix.cols()));
        }
        if !matrix.is_hermitian(CONSTRUCT_TOL) {
            return Err(DetnetError::NotHermitian);
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CONSTRUCT_TOL || tr.im.abs() > CONSTRUCT_TOL {
            return Err(DetnetError::Invalid(format!(
                "density matrix trace {tr} deviates from one"
            )));
        }
        if !is_psd(&matrix, PSD_SLACK)? {
            return Err(DetnetError::NotPsd);
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(state: &PureState) -> DensityMatrix {
        // A unit vector's projector is exactly Hermitian, PSD, trace one.
        DensityMatrix {
            matrix: state.projector(),
        }
    }

    /// Convex mixture; weights must be nonnegative and sum to one
    /// within 1e-12, and all parts must share one dimension.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
        if parts.is_empty() {
            return Err(DetnetError::BadPriors);
        }
        let dim = parts[0].1.dim();
        let mut total = 0.0;
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if !w.is_finite() || *w < -PRIOR_TOL {
                return Err(DetnetError::BadPriors);
            }
            if rho.dim() != dim {
                return Err(DetnetError::DimensionMismatch(rho.dim(), dim));
            }
            total += w;
            acc = acc.add(&rho.matrix.scale(c64(*w, 0.0)));
        }
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(DetnetError::BadPriors);
        }
        DensityMatrix::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// POVM with string-labeled outcomes.
///
/// The label "fail" is conventionally the inconclusive outcome of an
/// unambiguous measurement; no other semantics are attached to labels.
#[derive(Debug, Clone)]
pub struct LabeledPovm {
    dim: usize,
    elements: Vec<(String, CMatrix)>,
}

impl LabeledPovm {
    /// Each element must be PSD within -1e-10 on a shared dimension,
    /// labels must be unique, and the elements must sum to the identity
    /// within 1e-9 entrywise.
    pub fn new(elements: Vec<(String, CMatrix)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(DetnetError::Invalid("povm needs at least one element".into()));
        }
        let dim = elements[0].1.rows();
        let mut sum = CMatrix::zeros(dim, dim);
        let mut seen = std::collections::BTreeSet::new();
        for (label, op) in &elements {
            if !seen.insert(label.clone()) {
                return Err(DetnetError::Invalid(format!(
                    "duplicate outcome label {label:?}"
                )));
            }
            if !op.is_square() || op.rows() != dim {
                return Err(DetnetError::DimensionMismatch(op.rows(), dim));
            }
            if !op.is_hermitian(CONSTRUCT_TOL) || !is_psd(op, PSD_SLACK)? {
                return Err(DetnetError::NotPositive);
            }
            sum = sum.add(op);
        }
        if sum.max_abs_diff(&CMatrix::identity(dim)) > COMPLETENESS_TOL {
            return Err(DetnetError::Invalid(
                "povm elements do not sum to the identity".into(),
            ));
        }
        Ok(LabeledPovm { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[(String, CMatrix)] {
        &self.elements
    }

    pub fn get(&self, label: &str) -> Option<&CMatrix> {
        self.elements
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, op)| op)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|(l, _)| l.as_str()).collect()
    }
}

/// Pure or mixed preparation attached to a hypothesis.
#[derive(Debug, Clone)]
pub enum HypothesisState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl HypothesisState {
    pub fn dim(&self) -> usize {
        match self {
            HypothesisState::Pure(s) => s.dim(),
            HypothesisState::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            HypothesisState::Pure(s) => DensityMatrix::from_pure(s),
            HypothesisState::Mixed(r) => r.clone(),
        }
    }
}

/// One labeled preparation with its prior probability.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub label: String,
    pub state: HypothesisState,
    pub prior: f64,
}

/// A complete set of hypotheses: priors sum to one within 1e-12.
#[derive(Debug, Clone)]
pub struct HypothesisEnsemble {
    hypotheses: Vec<Hypothesis>,
    dim: usize,
}

impl HypothesisEnsemble {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(DetnetError::BadPriors);
        }
        let dim = hypotheses[0].state.dim();
        let mut total = 0.0;
        let mut seen = std::collections::BTreeSet::new();
        for h in &hypotheses {
            if !h.prior.is_finite() || !(-PRIOR_TOL..=1.0 + PRIOR_TOL).contains(&h.prior) {
                return Err(DetnetError::BadPriors);
            }
            if h.state.dim() != dim {
                return Err(DetnetError::DimensionMismatch(h.state.dim(), dim));
            }
            if !seen.insert(h.label.clone()) {
                return Err(DetnetError::Invalid(format!(
                    "duplicate hypothesis label {:?}",
                    h.label
                )));
            }
            total += h.prior;
        }
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(DetnetError::BadPriors);
        }
        Ok(HypothesisEnsemble { hypotheses, dim })
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Prior-weighted average state `sum_j p_j rho_j`.
    pub fn weighted_density(&self) -> Result<DensityMatrix> {
        let parts: Vec<(f64, DensityMatrix)> = self
            .hypotheses
            .iter()
            .map(|h| (h.prior, h.state.density()))
            .collect();
        DensityMatrix::mixture(&parts)
    }
}

/// `|w_0> = (|u+> + |u->)/sqrt(2)`, `|w_1> = U(theta)|w_0>`.
pub fn w_state(j: u8, theta: f64) -> PureState {
    assert!(j <= 1, "detector state index must be 0 or 1");
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = if j == 0 {
        (c64(r, 0.0), c64(r, 0.0))
    } else {
        (
            Complex64::from_polar(r, theta),
            Complex64::from_polar(r, -theta),
        )
    };
    PureState {
        amplitudes: CVector::new(vec![a, b]),
    }
}

/// `|v_0> = (|u+> - |u->)/sqrt(2)`, `|v_1> = U(theta)|v_0>`; each `v_j`
/// is orthogonal to the matching `w_j`.
pub fn v_state(j: u8, theta: f64) -> PureState {
    assert!(j <= 1, "detector state index must be 0 or 1");
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = if j == 0 {
        (c64(r, 0.0), c64(-r, 0.0))
    } else {
        (
            Complex64::from_polar(r, theta),
            -Complex64::from_polar(r, -theta),
        )
    };
    PureState {
        amplitudes: CVector::new(vec![a, b]),
    }
}

/// Lifts the single-detector kick to the n-detector space: the pattern's
/// fired slots get `U(theta)`, the rest the identity, with detector 1 as
/// the leftmost tensor factor.
pub fn lift(u: &DetectorUnitary, pattern: &FiringPattern) -> CMatrix {
    let single = u.matrix();
    let id = CMatrix::identity(2);
    let mut out = if pattern.fired(0) { single.clone() } else { id.clone() };
    for j in 1..pattern.detectors() {
        let factor = if pattern.fired(j) { &single } else { &id };
        out = out.tensor(factor);
    }
    out
}

/// Born-rule outcome distribution `p(label) = Tr(Pi_label rho)`.
pub fn outcome_probabilities(
    povm: &LabeledPovm,
    rho: &DensityMatrix,
) -> Result<BTreeMap<String, f64>> {
    if povm.dim() != rho.dim() {
        return Err(DetnetError::DimensionMismatch(povm.dim(), rho.dim()));
    }
    Ok(povm
        .elements()
        .iter()
        .map(|(label, op)| (label.clone(), op.mul(rho.matrix()).trace().re))
        .collect())
}

/// Prior-weighted success `sum_j p_j Tr(Pi_{map(j)} rho_j)`, where
/// `label_map` sends each hypothesis label to the POVM outcome that
/// counts as a correct identification.
pub fn ensemble_success(
    povm: &LabeledPovm,
    ensemble: &HypothesisEnsemble,
    label_map: &BTreeMap<String, String>,
) -> Result<f64> {
    if povm.dim() != ensemble.dim() {
        return Err(DetnetError::DimensionMismatch(povm.dim(), ensemble.dim()));
    }
    let mut total = 0.0;
    for h in ensemble.hypotheses() {
        let outcome = label_map
            .get(&h.label)
            .ok_or_else(|| DetnetError::UnmappedLabel(h.label.clone()))?;
        let op = povm
            .get(outcome)
            .ok_or_else(|| DetnetError::UnmappedLabel(outcome.clone()))?;
        total += h.prior * op.mul(h.state.density().matrix()).trace().re;
    }
    Ok(total)
}
