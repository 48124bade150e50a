//! Residual checks of the two bilinear generating-function identities behind
//! the analytic Schmidt spectra: the Hermite (Mehler) expansion of the 1D
//! cartesian kernel and the Laguerre (Hardy–Hille) expansion of the radial
//! blocks.
//!
//! Both checks return the maximum deviation over a fixed-seed random sample,
//! normalized by the identity's peak magnitude over the domain. Pointwise
//! relative error is not meaningful here: where the two sides cancel to
//! `~1e-12` of the peak, f64 summation noise alone would dominate a
//! pointwise quotient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::modes::{hg_1d, radial_mode};
use crate::spdc::DerivedParams;
use crate::specfun::bessel_i_scaled;
use crate::{Error, Result};

const SEED: u64 = 0x5EED_CAB1E;

fn series_terms(mu: f64, per_term_ratio: f64, cap: u32, what: &str) -> Result<u32> {
    if mu == 0.0 {
        return Ok(0);
    }
    // Geometric tail: Σ_{n>N} r^n C < 1e-12 once r^{N+1} C/(1-r) < 1e-12,
    // with a generous C = 100 bound on the mode products.
    let needed = ((1e-12 * (1.0 - per_term_ratio) / 100.0).ln() / per_term_ratio.ln()).ceil();
    if needed as u32 > cap {
        return Err(Error::Precision(format!(
            "{what}: {needed} series terms needed, above the stable limit {cap}"
        )));
    }
    Ok(needed as u32)
}

/// Residual of the Hermite bilinear expansion
/// `e^{-G(x²+y²-2η_A xy)} = (√π/Γ) √(1-μ²) Σ μ_signedⁿ hₙ(Γx) hₙ(Γy)`
/// over `sample_count` fixed-seed points in `[-3/Γ, 3/Γ]²`, normalized by
/// the left side's peak (1).
pub fn verify_mehler(dp: &DerivedParams, sample_count: usize) -> Result<f64> {
    if sample_count == 0 {
        return Err(Error::Domain("verify_mehler: need at least one sample".into()));
    }
    let n_terms = series_terms(dp.mu, dp.mu, 600, "verify_mehler")?;
    let scale = dp.mode_scale();
    let pref = std::f64::consts::PI.sqrt() / dp.gamma * (1.0 - dp.mu * dp.mu).sqrt();
    let half_width = 3.0 / dp.gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..sample_count {
        let x = rng.gen_range(-half_width..=half_width);
        let y = rng.gen_range(-half_width..=half_width);
        let lhs = (-dp.g_param * (x * x + y * y - 2.0 * dp.eta_a * x * y)).exp();
        let mut sum = 0.0;
        let mut pow = 1.0;
        for n in 0..=n_terms {
            sum += pow * hg_1d(n, scale, x)? * hg_1d(n, scale, y)?;
            pow *= dp.mu_signed;
        }
        worst = worst.max((lhs - pref * sum).abs());
    }
    Ok(worst)
}

/// Residual of the Laguerre bilinear expansion
/// `Σ_p μ^{2p} r_p^{(ℓ)}(x) r_p^{(ℓ)}(y) =
///  2 μ^{-ℓ}/(1-μ²) e^{-(x²+y²)(1+μ²)/(2(1-μ²))} I_ℓ(2xyμ/(1-μ²))`
/// over `sample_count` fixed-seed points with `x, y ∈ (0, 4]`, normalized by
/// the right side's peak over the sample. The Bessel argument uses the
/// positive `μ/(1-μ²)` convention, which is what positivity of the left side
/// forces; the closed form carries an overall factor 2 required by the
/// `μ → 0` limit against the unit-normalized radial modes.
pub fn verify_hardy_hille(ell: u32, mu: f64, sample_count: usize) -> Result<f64> {
    if !(mu.is_finite() && mu > 0.0 && mu < 1.0) {
        return Err(Error::Domain(format!("mu must lie in (0,1), got {mu}")));
    }
    if sample_count == 0 {
        return Err(Error::Domain("verify_hardy_hille: need at least one sample".into()));
    }
    let p_terms = series_terms(mu, mu * mu, 195, "verify_hardy_hille")?;
    let one_minus = 1.0 - mu * mu;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_abs: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for _ in 0..sample_count {
        let x: f64 = 4.0 - 4.0 * rng.gen::<f64>(); // (0, 4]
        let y: f64 = 4.0 - 4.0 * rng.gen::<f64>();
        let mut lhs = 0.0;
        let mut pow = 1.0;
        for p in 0..=p_terms {
            lhs += pow * radial_mode(ell, p, x)? * radial_mode(ell, p, y)?;
            pow *= mu * mu;
        }
        let z = 2.0 * x * y * mu / one_minus;
        let expo = -(x * x + y * y) * (1.0 + mu * mu) / (2.0 * one_minus) + z;
        let rhs = 2.0 * mu.powi(-(ell as i32)) / one_minus
            * expo.exp()
            * bessel_i_scaled(ell, z)?;
        worst_abs = worst_abs.max((lhs - rhs).abs());
        peak = peak.max(rhs.abs());
    }
    Ok(worst_abs / peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp(bs: f64) -> DerivedParams {
        DerivedParams::from_reduced(bs, 1.0).unwrap()
    }

    #[test]
    fn mehler_exact_at_separable_point() {
        assert!(verify_mehler(&dp(1.0), 50).unwrap() < 1e-14);
    }

    #[test]
    fn mehler_residual_small_both_sides_of_one() {
        assert!(verify_mehler(&dp(1.0 / 3.0), 200).unwrap() < 1e-9);
        assert!(verify_mehler(&dp(3.0), 200).unwrap() < 1e-9);
    }

    #[test]
    fn mehler_rejects_unreachable_truncation() {
        // μ so close to 1 that 600 Hermite terms cannot reach the tail target.
        assert!(matches!(
            verify_mehler(&dp(1e-4), 10),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn hardy_hille_residuals() {
        assert!(verify_hardy_hille(0, 0.5, 100).unwrap() < 1e-9);
        assert!(verify_hardy_hille(3, 0.7, 100).unwrap() < 1e-9);
    }

    #[test]
    fn hardy_hille_single_term_limit() {
        // μ → 0⁺: both sides collapse to the p = 0 product.
        assert!(verify_hardy_hille(0, 1e-8, 50).unwrap() < 1e-9);
        assert!(verify_hardy_hille(2, 1e-8, 50).unwrap() < 1e-9);
    }

    #[test]
    fn hardy_hille_rejects_bad_mu() {
        assert!(verify_hardy_hille(0, 0.0, 10).is_err());
        assert!(verify_hardy_hille(0, 1.0, 10).is_err());
    }
}
