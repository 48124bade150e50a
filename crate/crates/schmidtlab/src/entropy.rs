//! Schmidt number, Rényi and von Neumann entropies, inverse maps, and the
//! non-ideal-detection retention analysis.
//!
//! All entropies are in bits. The closed-form Rényi entropy uses the
//! argument `[(1+bσ)^{2α} - |1-bσ|^{2α}] / (4bσ)^α`, which follows from
//! direct summation over the Schmidt spectrum; the reciprocal of that
//! argument (a variant sometimes quoted, which yields negative entropies) is
//! kept behind [`renyi_literal_variant`] for documentation.

use serde::Serialize;

use crate::spectrum::SchmidtSpectrum;
use crate::{Error, Result};

/// Entropy summary for one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub b_sigma: f64,
    pub k: f64,
    /// `(α, H_α)` pairs.
    pub renyi: Vec<(f64, f64)>,
    pub s_exact: f64,
    /// `1 + log₂K`.
    pub s_approx_eq21: f64,
    /// Large-`K` expansion `(2/ln2 - 2) + log₂K - 1/(K ln8)`.
    pub s_expansion_eq22: f64,
}

impl EntropyReport {
    pub fn new(b_sigma: f64, alphas: &[f64]) -> Result<Self> {
        let k = schmidt_number(b_sigma)?;
        let renyi = alphas
            .iter()
            .map(|&a| Ok((a, renyi_closed(a, b_sigma)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            b_sigma,
            k,
            renyi,
            s_exact: von_neumann_exact(b_sigma)?,
            s_approx_eq21: von_neumann_approx(k, VnApproxForm::Eq21)?,
            s_expansion_eq22: von_neumann_approx(k, VnApproxForm::Eq22)?,
        })
    }
}

/// Which approximate von Neumann form to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VnApproxForm {
    /// `S ≈ 1 + log₂K`.
    Eq21,
    /// `S ≈ (2/ln2 - 2) + log₂K - 1/(K ln8)`.
    Eq22,
}

/// Entropy model for the retention analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RetentionModel {
    /// `S(K) = 1 + log₂K`.
    ApproxEq21,
    /// Exact von Neumann entropy along the `bσ` family.
    ExactSpectrum,
}

/// Non-ideal detection scenario: `eta = K_eff / K` is the fraction of
/// entangled modes the measurement can access.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DetectionScenario {
    pub eta: f64,
    pub model: RetentionModel,
}

impl DetectionScenario {
    pub fn new(eta: f64, model: RetentionModel) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0,1], got {eta}")));
        }
        Ok(Self { eta, model })
    }
}

fn check_b_sigma(b_sigma: f64) -> Result<f64> {
    if !(b_sigma.is_finite() && b_sigma > 0.0) {
        return Err(Error::Domain(format!(
            "b_sigma must be positive and finite, got {b_sigma}"
        )));
    }
    Ok(((b_sigma - 1.0) / (b_sigma + 1.0)).abs())
}

/// Schmidt number `K = ¼ (bσ + 1/bσ)²`.
pub fn schmidt_number(b_sigma: f64) -> Result<f64> {
    check_b_sigma(b_sigma)?;
    let s = b_sigma + 1.0 / b_sigma;
    Ok(0.25 * s * s)
}

/// Inverse map `bσ = sqrt(K) - sqrt(K-1)`, the branch `<= 1`; the other
/// valid solution is its reciprocal.
pub fn bsigma_from_k(k: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::Domain(format!("K must be >= 1, got {k}")));
    }
    // √K - √(K-1) cancels badly at large K; the reciprocal form is exact.
    Ok((k.sqrt() + (k - 1.0).sqrt()).recip())
}

/// `f(α) = 2 - log₂(α²)/(α-1)`, the constant offset of the large-`K`
/// Rényi approximation; `f(2) = 0`.
pub fn renyi_offset(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Domain(format!(
            "alpha must be positive and != 1, got {alpha}"
        )));
    }
    Ok(2.0 - (alpha * alpha).log2() / (alpha - 1.0))
}

/// Closed-form Rényi entropy `H_α = (2/(α-1)) log₂[(1-μ^{2α})/(1-μ²)^α]`.
pub fn renyi_closed(alpha: f64, b_sigma: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if alpha == 1.0 {
        return Err(Error::Domain(
            "alpha = 1 is the von Neumann limit; use von_neumann_exact".into(),
        ));
    }
    let mu = check_b_sigma(b_sigma)?;
    if mu == 0.0 {
        return Ok(0.0);
    }
    let x = mu * mu;
    let arg = (1.0 - x.powf(alpha)) / (1.0 - x).powf(alpha);
    Ok(2.0 / (alpha - 1.0) * arg.log2())
}

/// The Rényi formula with the reciprocal argument sometimes quoted in the
/// literature, i.e. the negative of [`renyi_closed`]'s; it yields negative
/// values and is retained for documentation only.
pub fn renyi_literal_variant(alpha: f64, b_sigma: f64) -> Result<f64> {
    renyi_closed(alpha, b_sigma).map(|h| -h)
}

/// Rényi entropy by direct summation over a spectrum. Requires either
/// `α > 1` or a tail below 1e-14, otherwise the discarded tail visibly
/// biases the sum.
pub fn renyi_from_spectrum(alpha: f64, spectrum: &SchmidtSpectrum) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Domain(format!(
            "alpha must be positive and != 1, got {alpha}"
        )));
    }
    if alpha <= 1.0 && spectrum.tail_mass >= 1e-14 {
        return Err(Error::Precision(format!(
            "tail mass {} too large for α = {alpha} <= 1",
            spectrum.tail_mass
        )));
    }
    let sum: f64 = spectrum.entries.iter().map(|(_, l)| l.powf(alpha)).sum();
    Ok((1.0 - alpha).recip() * sum.log2())
}

/// Large-`K` approximation `H_α(K) ≈ log₂K - f(α)`.
pub fn renyi_approx(alpha: f64, k: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::Domain(format!("K must be >= 1, got {k}")));
    }
    Ok(k.log2() - renyi_offset(alpha)?)
}

/// Exact von Neumann entropy in closed form:
/// `S = 2 [-log₂(1-μ²) - (μ²/(1-μ²)) log₂ μ²]` (the 2D spectrum is the
/// square of a geometric 1D spectrum).
pub fn von_neumann_exact(b_sigma: f64) -> Result<f64> {
    let mu = check_b_sigma(b_sigma)?;
    if mu == 0.0 {
        return Ok(0.0);
    }
    let x = mu * mu;
    Ok(2.0 * (-(1.0 - x).log2() - x / (1.0 - x) * x.log2()))
}

/// Approximate von Neumann entropy as a function of `K`.
pub fn von_neumann_approx(k: f64, form: VnApproxForm) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::Domain(format!("K must be >= 1, got {k}")));
    }
    Ok(match form {
        VnApproxForm::Eq21 => 1.0 + k.log2(),
        VnApproxForm::Eq22 => {
            2.0 / std::f64::consts::LN_2 - 2.0 + k.log2() - 1.0 / (k * 8.0_f64.ln())
        }
    })
}

fn entropy_for_model(k: f64, model: RetentionModel) -> Result<f64> {
    match model {
        RetentionModel::ApproxEq21 => von_neumann_approx(k, VnApproxForm::Eq21),
        RetentionModel::ExactSpectrum => von_neumann_exact(bsigma_from_k(k)?),
    }
}

/// Fraction of shared bits `S(ηK)/S(K)` retained under non-ideal detection.
pub fn retained_fraction(k: f64, scenario: DetectionScenario) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::Domain(format!("K must be >= 1, got {k}")));
    }
    let k_eff = scenario.eta * k;
    if k_eff < 1.0 {
        return Err(Error::Domain(format!(
            "effective mode count ηK = {k_eff} below one mode"
        )));
    }
    if scenario.eta == 1.0 {
        return Ok(1.0);
    }
    let num = entropy_for_model(k_eff, scenario.model)?;
    let den = entropy_for_model(k, scenario.model)?;
    if den == 0.0 {
        return Err(Error::Domain(
            "retention undefined at K = 1 (zero shared bits)".into(),
        ));
    }
    Ok(num / den)
}

/// Outcome of [`required_k`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RequiredK {
    pub k: f64,
    pub b_sigma: f64,
}

/// Smallest `K` whose retained fraction meets `target`, by bisection
/// (retention is monotone non-decreasing in `K`). Relative tolerance 1e-9.
pub fn required_k(eta: f64, target_fraction: f64, model: RetentionModel) -> Result<RequiredK> {
    let scenario = DetectionScenario::new(eta, model)?;
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "target fraction must lie in (0,1), got {target_fraction}"
        )));
    }
    if eta == 1.0 {
        return Ok(RequiredK { k: 1.0, b_sigma: 1.0 });
    }
    let meets = |k: f64| -> Result<bool> {
        if scenario.eta * k < 1.0 {
            return Ok(false);
        }
        Ok(retained_fraction(k, scenario)? >= target_fraction)
    };
    let mut hi = 2.0 / eta;
    while !meets(hi)? {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain(format!(
                "target fraction {target_fraction} unattainable at eta = {eta}"
            )));
        }
    }
    let mut lo = 1.0 / eta; // ηK = 1: numerator entropy can still be positive for eq21
    if meets(lo)? {
        hi = lo;
    }
    while (hi - lo) > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RequiredK {
        k: hi,
        b_sigma: bsigma_from_k(hi)?,
    })
}
