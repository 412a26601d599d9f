//! Discrimination strategies: binary minimum-error measurement, unambiguous
//! product and cluster constructions, and the pretty-good measurement.
//!
//! Numerical conventions shared with the rest of the crate: priors sum to
//! one within 1e-12, PSD slack -1e-10, support cutoff for pseudo-inverses
//! 1e-12. Each constructor returns the measurement together with the
//! quantities needed by independent verification (spectra, scale factors,
//! characteristic-polynomial data).

use num_complex::Complex64;

use crate::error::{DetnetError, Result};
use crate::linalg::{c64, hermitian_eig, is_psd, psd_apply, CMatrix, CVector};
use crate::quantum::{
    v_state, w_state, DensityMatrix, FiringPattern, HypothesisEnsemble, LabeledPovm, PureState,
};

const PRIOR_TOL: f64 = 1e-12;
const PSD_SLACK: f64 = 1e-10;
const SUPPORT_CUTOFF: f64 = 1e-12;
/// Eigenvalues of the decision operator at most this far from zero count
/// as zero and are assigned to outcome 0, keeping the POVM deterministic.
const ZERO_EIG_TOL: f64 = 1e-12;
const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

fn check_priors(p0: f64, p1: f64) -> Result<()> {
    let ok = |p: f64| p.is_finite() && (-PRIOR_TOL..=1.0 + PRIOR_TOL).contains(&p);
    if !ok(p0) || !ok(p1) || (p0 + p1 - 1.0).abs() > PRIOR_TOL {
        return Err(DetnetError::BadPriors);
    }
    Ok(())
}

/// Outcome of the binary minimum-error construction.
///
/// `lambda_operator` is `p1 rho1 - p0 rho0`; `eigenvalues` its ascending
/// spectrum; `alpha` is the measurement rotation angle, present only for
/// the pure-qubit route; `ps = 1/2 + 1/2 ||lambda_operator||_1`, always
/// in `[1/2, 1]`.
#[derive(Debug, Clone)]
pub struct HelstromResult {
    pub lambda_operator: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub alpha: Option<f64>,
    pub povm: LabeledPovm,
    pub ps: f64,
}

/// Optimal two-hypothesis minimum-error measurement.
///
/// The POVM projects onto the strictly positive eigenspace of the
/// decision operator (outcome "1") and its complement (outcome "0");
/// eigenvalues within 1e-12 of zero go to outcome "0". The success
/// probability does not depend on that tie-break.
pub fn helstrom_binary(
    rho0: &DensityMatrix,
    p0: f64,
    rho1: &DensityMatrix,
    p1: f64,
) -> Result<HelstromResult> {
    check_priors(p0, p1)?;
    if rho0.dim() != rho1.dim() {
        return Err(DetnetError::DimensionMismatch(rho0.dim(), rho1.dim()));
    }
    let lambda = rho1
        .matrix()
        .scale(c64(p1, 0.0))
        .sub(&rho0.matrix().scale(c64(p0, 0.0)));
    let eig = hermitian_eig(&lambda)?;
    let trace_norm: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum();
    let ps = 0.5 + 0.5 * trace_norm;

    let n = rho0.dim();
    let mut pi1 = CMatrix::zeros(n, n);
    for (lam, vec) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *lam > ZERO_EIG_TOL {
            pi1 = pi1.add(&vec.projector());
        }
    }
    let pi0 = CMatrix::identity(n).sub(&pi1);
    let povm = LabeledPovm::new(vec![("0".into(), pi0), ("1".into(), pi1)])?;
    Ok(HelstromResult {
        lambda_operator: lambda,
        eigenvalues: eig.eigenvalues,
        alpha: None,
        povm,
        ps,
    })
}

/// Minimum-error measurement for the pure detector states `w0`, `w1` in
/// closed form.
///
/// The decision operator's eigenvalues are
/// `(1/2) { (p1 - p0) +- sqrt(p0^2 + p1^2 - 2 p0 p1 cos(2 theta)) }`
/// and the optimal projector pair is rotated by
/// `alpha = arg(p1 e^{-2 i theta} - p0)` in the u basis. When the two
/// weighted states coincide exactly the guessing measurement (identity
/// on outcome "0") is returned with `alpha = 0`.
pub fn helstrom_pure_qubit(p0: f64, p1: f64, theta: f64) -> Result<HelstromResult> {
    check_priors(p0, p1)?;
    let w0 = w_state(0, theta);
    let w1 = w_state(1, theta);
    let lambda = w1
        .projector()
        .scale(c64(p1, 0.0))
        .sub(&w0.projector().scale(c64(p0, 0.0)));

    let m = Complex64::from_polar(p1, -2.0 * theta) - p0;
    let gap = m.norm();
    let eigenvalues = vec![0.5 * ((p1 - p0) - gap), 0.5 * ((p1 - p0) + gap)];
    let ps = 0.5 * (1.0 + gap);

    let (alpha, pi1) = if gap <= 1e-15 {
        (0.0, CMatrix::zeros(2, 2))
    } else {
        let alpha = m.arg();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let vec = CVector::new(vec![c64(r, 0.0), Complex64::from_polar(r, alpha)]);
        (alpha, vec.projector())
    };
    let pi0 = CMatrix::identity(2).sub(&pi1);
    let povm = LabeledPovm::new(vec![("0".into(), pi0), ("1".into(), pi1)])?;
    Ok(HelstromResult {
        lambda_operator: lambda,
        eigenvalues,
        alpha: Some(alpha),
        povm,
        ps,
    })
}

/// Unambiguous measurement over all firing patterns of `n` product
/// detectors.
///
/// `gram_operator` is the single-detector operator
/// `T = |v0><v0| + |v1><v1|` whose largest eigenvalue `1 + cos(theta)`
/// fixes the admissible scale `c = 1 / lambda_max^n`; the pattern element
/// for `x` is `c` times the projector onto the tensor product of
/// `v_{1-x_j}` factors, which annihilates every pattern state except `x`.
#[derive(Debug, Clone)]
pub struct UnambiguousConstruction {
    pub gram_operator: CMatrix,
    pub lambda_max: f64,
    pub scale_c: f64,
    pub povm: LabeledPovm,
}

/// Builds the unambiguous product measurement.
///
/// Rejects `theta = 0` (all pattern states coincide, nothing can be
/// identified without error) with `DegenerateTheta` and angles outside
/// `(0, pi/2]` with `Invalid`.
pub fn unambiguous_product(n: usize, theta: f64) -> Result<UnambiguousConstruction> {
    if theta == 0.0 {
        return Err(DetnetError::DegenerateTheta);
    }
    if !theta.is_finite() || !(0.0..=HALF_PI + 1e-15).contains(&theta) {
        return Err(DetnetError::Invalid(format!(
            "detector angle {theta} outside (0, pi/2]"
        )));
    }
    let patterns = FiringPattern::all(n)?;

    let gram_operator = v_state(0, theta)
        .projector()
        .add(&v_state(1, theta).projector());
    let lambda_max = 1.0 + theta.cos();
    let scale_c = lambda_max.powi(-(n as i32));

    let dim = 1usize << n;
    let mut sum = CMatrix::zeros(dim, dim);
    let mut elements = Vec::with_capacity(patterns.len() + 1);
    for pat in &patterns {
        // The detector for slot j is flipped relative to the pattern bit:
        // <v_{1-x_j} | w_{x_j}> never vanishes while <v_k | w_k> = 0,
        // so this projector annihilates every pattern state but `pat`.
        let mut chi = v_state(1 - pat.fired(0) as u8, theta);
        for j in 1..n {
            chi = chi.tensor(&v_state(1 - pat.fired(j) as u8, theta));
        }
        let op = chi.projector().scale(c64(scale_c, 0.0));
        sum = sum.add(&op);
        elements.push((pat.label(), op));
    }
    let fail = CMatrix::identity(dim).sub(&sum);
    elements.push(("fail".into(), fail));
    let povm = LabeledPovm::new(elements)?;
    Ok(UnambiguousConstruction {
        gram_operator,
        lambda_max,
        scale_c,
        povm,
    })
}

/// Pretty-good measurement for an arbitrary hypothesis ensemble.
///
/// Each outcome is `p_j rho^{-1/2} rho_j rho^{-1/2}` on the support of
/// the average state `rho` (pseudo-inverse cutoff 1e-12); the projector
/// onto the null space of `rho` is appended as outcome "null" so the
/// POVM is complete exactly. Returns the measurement and its success
/// probability `sum_j p_j Tr(Pi_j rho_j)`.
pub fn pgm(ensemble: &HypothesisEnsemble) -> Result<(LabeledPovm, f64)> {
    let rho = ensemble.weighted_density()?;
    let inv_sqrt = psd_apply(rho.matrix(), |x| x.powf(-0.5), SUPPORT_CUTOFF)?;
    let support = psd_apply(rho.matrix(), |_| 1.0, SUPPORT_CUTOFF)?;
    let dim = rho.dim();

    let mut elements = Vec::with_capacity(ensemble.hypotheses().len() + 1);
    let mut ps = 0.0;
    for h in ensemble.hypotheses() {
        let rj = h.state.density();
        let op = inv_sqrt
            .mul(rj.matrix())
            .mul(&inv_sqrt)
            .scale(c64(h.prior, 0.0));
        ps += h.prior * op.mul(rj.matrix()).trace().re;
        elements.push((h.label.clone(), op));
    }
    elements.push(("null".into(), CMatrix::identity(dim).sub(&support)));
    let povm = LabeledPovm::new(elements)?;
    Ok((povm, ps))
}

/// Scale parameters of the two-cluster unambiguous measurement.
///
/// `z = -sin^2(theta)` is the overlap between the no-firing cluster state
/// and the detection direction used for it; `b = c0 + 2 c1 + c2`. The
/// documented admissible region is `c_i` in `[0, 1]` with
/// `1 - c1 - c2 + c1 c2 |z|^2 >= 0`; out-of-range scales are
/// representable so that [`cluster_unambiguous_povm`] can demonstrate the
/// `NotPositive` rejection, which is the enforcement point.
#[derive(Debug, Clone, Copy)]
pub struct ClusterPovmParams {
    theta: f64,
    c0: f64,
    c1: f64,
    c2: f64,
    z: Complex64,
    b: f64,
}

impl ClusterPovmParams {
    /// `theta` must be a finite angle in `[0, pi/2]`; scales must be
    /// finite and nonnegative.
    pub fn new(theta: f64, c0: f64, c1: f64, c2: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=HALF_PI + 1e-15).contains(&theta) {
            return Err(DetnetError::Invalid(format!(
                "cluster angle {theta} outside [0, pi/2]"
            )));
        }
        for c in [c0, c1, c2] {
            if !c.is_finite() || c < 0.0 {
                return Err(DetnetError::Invalid(format!(
                    "cluster scale {c} must be finite and nonnegative"
                )));
            }
        }
        let s2 = theta.sin().powi(2);
        Ok(ClusterPovmParams {
            theta,
            c0,
            c1,
            c2,
            z: c64(-s2, 0.0),
            b: c0 + 2.0 * c1 + c2,
        })
    }

    /// All three scales equal.
    pub fn uniform(theta: f64, c: f64) -> Result<Self> {
        Self::new(theta, c, c, c)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Sufficient condition for the failure element to be PSD on the
    /// mixed overlap sectors: `1 - c1 - c2 + c1 c2 |z|^2 >= 0` together
    /// with `c2 <= 1`.
    pub fn subspace_positive(&self) -> bool {
        let z2 = self.z.norm_sqr();
        1.0 - self.c1 - self.c2 + self.c1 * self.c2 * z2 >= -PRIOR_TOL
            && self.c2 <= 1.0 + PRIOR_TOL
    }
}

/// Per-cluster building blocks: the unfired two-detector state, the
/// detection direction orthogonal to every fired state, the projector
/// onto it, and the complement of the unfired-state projector.
fn cluster_blocks(theta: f64) -> (PureState, PureState, CMatrix, CMatrix) {
    let phi00 = w_state(0, theta).tensor(&w_state(0, theta));
    let perp = v_state(1, theta).tensor(&v_state(1, theta));
    let p = perp.projector();
    let r = CMatrix::identity(4).sub(&phi00.projector());
    (phi00, perp, p, r)
}

fn cluster_element_set(theta: f64, params: &ClusterPovmParams) -> [CMatrix; 5] {
    let (_, _, p, r) = cluster_blocks(theta);
    let pi0 = p.tensor(&p).scale(c64(params.c0, 0.0));
    let pi12 = r.tensor(&p).scale(c64(params.c1, 0.0));
    let pi34 = p.tensor(&r).scale(c64(params.c1, 0.0));
    let pboth = r.tensor(&r).scale(c64(params.c2, 0.0));
    let pif = CMatrix::identity(16)
        .sub(&pi0)
        .sub(&pi12)
        .sub(&pi34)
        .sub(&pboth);
    [pi0, pi12, pi34, pboth, pif]
}

/// Unambiguous measurement distinguishing which of two detector clusters
/// (detectors 1-2 and 3-4) contains excitations.
///
/// Outcomes: "none", "group12", "group34", "both", "fail". The failure
/// element is validated PSD by a full 16-dimensional eigendecomposition;
/// a violation (bad scale parameters) is reported as `NotPositive`.
/// `theta` must be the angle the params were built with.
pub fn cluster_unambiguous_povm(theta: f64, params: &ClusterPovmParams) -> Result<LabeledPovm> {
    if !theta.is_finite() || !(0.0..=HALF_PI + 1e-15).contains(&theta) {
        return Err(DetnetError::DegenerateTheta);
    }
    let [pi0, pi12, pi34, pboth, pif] = cluster_element_set(theta, params);
    if !is_psd(&pif, PSD_SLACK)? {
        return Err(DetnetError::NotPositive);
    }
    LabeledPovm::new(vec![
        ("none".into(), pi0),
        ("group12".into(), pi12),
        ("group34".into(), pi34),
        ("both".into(), pboth),
        ("fail".into(), pif),
    ])
}

/// Characteristic-polynomial cross-check for the cluster failure element
/// on the overlap sector spanned per cluster by the unfired state and
/// its detection direction.
///
/// `coefficients` are the monic quartic in `x = 1 - lambda`, descending
/// powers. `roots` come from the coefficients alone: the exact linear
/// factor `x = c1 |z|^2` is peeled off first and the remaining cubic is
/// solved in closed form (a second exact linear factor exists when
/// `c0 c2 = c1^2`, covering the equal-scale double root). The roots are
/// then compared against an independent eigendecomposition of the
/// restricted operator; `max_root_deviation` is the worst distance from
/// `1 - root` to that spectrum. At `theta = pi/2` the overlap sector
/// collapses to one dimension and the comparison set falls back to the
/// full 16-dimensional spectrum, which contains the sector limits.
#[derive(Debug, Clone)]
pub struct QuarticCheck {
    pub coefficients: [f64; 5],
    pub roots: Vec<Complex64>,
    pub subspace_eigenvalues: Vec<f64>,
    pub max_root_deviation: f64,
}

/// Roots of `x^2 + p x + q`, avoiding cancellation in the real case.
fn solve_monic_quadratic(p: f64, q: f64) -> (Complex64, Complex64) {
    let disc = p * p - 4.0 * q;
    if disc >= 0.0 {
        let sd = disc.sqrt();
        let x1 = if p >= 0.0 { (-p - sd) / 2.0 } else { (-p + sd) / 2.0 };
        let x2 = if x1 != 0.0 { q / x1 } else { -p - x1 };
        (c64(x1, 0.0), c64(x2, 0.0))
    } else {
        let sd = (-disc).sqrt();
        (c64(-p / 2.0, sd / 2.0), c64(-p / 2.0, -sd / 2.0))
    }
}

/// Roots of `x^3 + p x^2 + q x + r` with real coefficients: trigonometric
/// form for three real roots, real-cube-root Cardano otherwise, followed
/// by a safeguarded Newton polish that only accepts steps decreasing |f|
/// (plain Newton can diverge between near-double roots).
fn solve_monic_cubic(p: f64, q: f64, r: f64) -> [Complex64; 3] {
    let shift = p / 3.0;
    let pp = q - p * p / 3.0;
    let qq = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
    let f = |x: f64| ((x + p) * x + q) * x + r;
    let fp = |x: f64| (3.0 * x + 2.0 * p) * x + q;

    let trig = |pp: f64, qq: f64| -> [Complex64; 3] {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let ang = arg.acos() / 3.0;
        core::array::from_fn(|k| {
            c64(
                m * (ang - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift,
                0.0,
            )
        })
    };

    let raw: [Complex64; 3] = if pp == 0.0 && qq == 0.0 {
        [c64(-shift, 0.0); 3]
    } else if -4.0 * pp * pp * pp - 27.0 * qq * qq >= 0.0 && pp < 0.0 {
        trig(pp, qq)
    } else {
        let w = -qq / 2.0;
        let s2 = qq * qq / 4.0 + pp * pp * pp / 27.0;
        if s2 >= 0.0 {
            let sq = s2.sqrt();
            let u3 = if (w + sq).abs() >= (w - sq).abs() { w + sq } else { w - sq };
            let u = u3.cbrt();
            let v = if u != 0.0 { -pp / (3.0 * u) } else { 0.0 };
            let t1 = u + v;
            let im = (u - v).abs() * 3f64.sqrt() / 2.0;
            [
                c64(t1 - shift, 0.0),
                c64(-t1 / 2.0 - shift, im),
                c64(-t1 / 2.0 - shift, -im),
            ]
        } else {
            // s2 < 0 forces pp < 0 and three real roots.
            trig(pp, qq)
        }
    };

    raw.map(|x| {
        if x.im.abs() > 1e-14 {
            return x;
        }
        let mut xv = x.re;
        let mut fv = f(xv).abs();
        for _ in 0..3 {
            let d = fp(xv);
            if d == 0.0 {
                break;
            }
            let cand = xv - f(xv) / d;
            let fc = f(cand).abs();
            if fc < fv {
                xv = cand;
                fv = fc;
            } else {
                break;
            }
        }
        c64(xv, 0.0)
    })
}

pub fn quartic_characteristic(params: &ClusterPovmParams) -> Result<QuarticCheck> {
    let (c0, c1, c2) = (params.c0, params.c1, params.c2);
    let zz = params.z.norm_sqr().sqrt(); // |z| = sin^2(theta)
    let big_z = zz * zz; // |z|^2
    let b = params.b;
    let a2 = big_z * (2.0 * (c0 + c1) * (c1 + c2) - big_z * (c0 * c2 + c1 * c1));
    let a1 = -big_z * big_z * c1 * (c0 * c1 + 2.0 * c0 * c2 + c1 * c2);
    let a0 = big_z.powi(4) * c0 * c1 * c1 * c2;
    let coefficients = [1.0, -b, a2, a1, a0];

    // One root is exactly c1 |z|^2 (the swap-antisymmetric direction of
    // the two mixed sectors); peel it off by synthetic division.
    let xa = c1 * big_z;
    let p = -b + xa;
    let q = a2 + xa * p;
    let r = a1 + xa * q;
    let mut roots = vec![c64(xa, 0.0)];
    if (c0 * c2 - c1 * c1).abs() <= 1e-12 * (c1 * c1).max(1.0) {
        // The linear factor divides twice; the rest is an explicit
        // quadratic, which keeps the equal-scale double root exact.
        let p2 = p + xa;
        let q2 = q + xa * p2;
        let (x1, x2) = solve_monic_quadratic(p2, q2);
        roots.push(c64(xa, 0.0));
        roots.push(x1);
        roots.push(x2);
    } else {
        roots.extend(solve_monic_cubic(p, q, r));
    }

    // Independent reference: eigenvalues of the failure element restricted
    // to the overlap sector (invariant under every cluster element).
    let theta = params.theta;
    let pif = cluster_element_set(theta, params)[4].clone();
    let (phi00, perp, _, _) = cluster_blocks(theta);
    let z_inner = phi00.overlap(&perp);
    let g = perp.vector().sub(&phi00.vector().scale(z_inner));
    let gn = g.norm();
    let cluster_basis: Vec<CVector> = if gn > 1e-6 {
        vec![phi00.vector().clone(), g.scale(c64(1.0 / gn, 0.0))]
    } else {
        vec![phi00.vector().clone()]
    };
    let joint: Vec<CVector> = cluster_basis
        .iter()
        .flat_map(|x| cluster_basis.iter().map(move |y| x.tensor(y)))
        .collect();
    let k = joint.len();
    let mut restricted = CMatrix::zeros(k, k);
    for (i, vi) in joint.iter().enumerate() {
        let pv = pif.apply(vi);
        for (j, vj) in joint.iter().enumerate() {
            restricted.set(j, i, vj.inner(&pv));
        }
    }
    let subspace_eigenvalues = hermitian_eig(&restricted)?.eigenvalues;
    let reference: Vec<f64> = if k == 4 {
        subspace_eigenvalues.clone()
    } else {
        hermitian_eig(&pif)?.eigenvalues
    };

    let max_root_deviation = roots
        .iter()
        .map(|rt| {
            let lam = 1.0 - rt.re;
            let dist = reference
                .iter()
                .map(|e| (e - lam).abs())
                .fold(f64::INFINITY, f64::min);
            dist + rt.im.abs()
        })
        .fold(0.0, f64::max);

    Ok(QuarticCheck {
        coefficients,
        roots,
        subspace_eigenvalues,
        max_root_deviation,
    })
}
