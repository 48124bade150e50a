//! Physical-parameter derivation and biphoton kernel evaluation.
//!
//! The double-Gaussian kernel is normalized to unit L² norm with
//! `𝒩 = Γ²/π`, the unique constant for which the Schmidt expansion sums to
//! one. The exact sinc kernel has no closed-form norm; it is fixed by
//! quadrature at construction and cached.

use serde::Serialize;

use crate::modes::ModeScale;
use crate::specfun::bessel_i_scaled;
use crate::{Error, Result};

/// Pump and crystal inputs of the exact kernel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PumpCrystalParams {
    /// Pump waist `w_p` in meters.
    pub pump_waist: f64,
    /// Pump wavenumber `k_p` in inverse meters.
    pub pump_wavenumber: f64,
    /// Crystal length `L` in meters.
    pub crystal_length: f64,
    /// Residual phase mismatch `Φ` (dimensionless, default 0).
    pub phase_offset: f64,
}

impl PumpCrystalParams {
    pub fn new(pump_waist: f64, pump_wavenumber: f64, crystal_length: f64) -> Result<Self> {
        let p = Self {
            pump_waist,
            pump_wavenumber,
            crystal_length,
            phase_offset: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same, but from the pump vacuum wavelength in meters.
    pub fn from_wavelength(pump_waist: f64, pump_wavelength: f64, crystal_length: f64) -> Result<Self> {
        if !(pump_wavelength.is_finite() && pump_wavelength > 0.0) {
            return Err(Error::Domain(format!(
                "pump wavelength must be positive, got {pump_wavelength}"
            )));
        }
        Self::new(
            pump_waist,
            2.0 * std::f64::consts::PI / pump_wavelength,
            crystal_length,
        )
    }

    pub fn with_phase_offset(mut self, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::Domain("phase offset must be finite".into()));
        }
        self.phase_offset = phi;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pump_waist", self.pump_waist),
            ("pump_wavenumber", self.pump_wavenumber),
            ("crystal_length", self.crystal_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Rayleigh range `z_r = k_p w_p² / 2`.
    pub fn rayleigh_range(&self) -> f64 {
        self.pump_wavenumber * self.pump_waist * self.pump_waist / 2.0
    }
}

/// All scalar parameters of the double-Gaussian SPDC state, immutable after
/// construction and mutually consistent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivedParams {
    /// `b = ½ sqrt(L/k_p)` (meters).
    pub b: f64,
    /// `σ = 2/w_p` (inverse meters).
    pub sigma: f64,
    /// `bσ = sqrt(L/2z_r)` (dimensionless).
    pub b_sigma: f64,
    /// Rayleigh range of the pump, when derivable from the input (meters).
    pub rayleigh_range: Option<f64>,
    /// Mode width `Γ = 2 sqrt(b/σ)` (meters).
    pub gamma: f64,
    /// `μ = |bσ-1| / (bσ+1)` in [0,1).
    pub mu: f64,
    /// Signed variant `(bσ-1)/(bσ+1)`; negative for `bσ < 1`. The exact
    /// Schmidt pairing carries `μ_signed^N`; with the non-negative `μ`
    /// convention the idler mode is parity-reflected at odd orders.
    pub mu_signed: f64,
    /// `G = b² + 1/σ²` (square meters).
    pub g_param: f64,
    /// Per-axis correlation `η_A = (b²σ²-1)/(b²σ²+1)` in (-1,1). Named with
    /// the `_A` suffix to avoid collision with the detection efficiency η.
    pub eta_a: f64,
    /// Kernel normalization `𝒩 = Γ²/π` (inverse square meters).
    pub norm: f64,
}

impl DerivedParams {
    pub fn from_pump_crystal(pc: &PumpCrystalParams) -> Result<Self> {
        pc.validate()?;
        let b = 0.5 * (pc.crystal_length / pc.pump_wavenumber).sqrt();
        let sigma = 2.0 / pc.pump_waist;
        let mut dp = Self::from_b_sigma_pair(b, sigma)?;
        dp.rayleigh_range = Some(pc.rayleigh_range());
        Ok(dp)
    }

    /// Directly from `b` (meters) and `σ` (inverse meters).
    pub fn from_b_sigma_pair(b: f64, sigma: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0 && sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain(format!(
                "b and sigma must be positive and finite, got b={b}, sigma={sigma}"
            )));
        }
        let b_sigma = b * sigma;
        let gamma = 2.0 * (b / sigma).sqrt();
        let mu_signed = (b_sigma - 1.0) / (b_sigma + 1.0);
        let bs2 = b_sigma * b_sigma;
        Ok(Self {
            b,
            sigma,
            b_sigma,
            rayleigh_range: None,
            gamma,
            mu: mu_signed.abs(),
            mu_signed,
            g_param: b * b + 1.0 / (sigma * sigma),
            eta_a: (bs2 - 1.0) / (bs2 + 1.0),
            norm: gamma * gamma / std::f64::consts::PI,
        })
    }

    /// From the dimensionless control parameter `bσ` and the mode width `Γ`.
    pub fn from_reduced(b_sigma: f64, gamma: f64) -> Result<Self> {
        if !(b_sigma.is_finite() && b_sigma > 0.0 && gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!(
                "b_sigma and gamma must be positive and finite, got b_sigma={b_sigma}, gamma={gamma}"
            )));
        }
        // Γ² = 4b/σ and bσ fix b = Γ sqrt(bσ)/2.
        let b = gamma * b_sigma.sqrt() / 2.0;
        Self::from_b_sigma_pair(b, b_sigma / b)
    }

    pub fn mode_scale(&self) -> ModeScale {
        ModeScale::new(self.gamma).expect("gamma validated at construction")
    }
}

/// Double-Gaussian kernel `𝒩 exp(-|q_i+q_s|²/σ²) exp(-b²|q_i-q_s|²)`,
/// unit L² norm over ℝ²×ℝ².
pub fn kernel_gauss(dp: &DerivedParams, q_i: [f64; 2], q_s: [f64; 2]) -> f64 {
    let sum2 = (q_i[0] + q_s[0]).powi(2) + (q_i[1] + q_s[1]).powi(2);
    let diff2 = (q_i[0] - q_s[0]).powi(2) + (q_i[1] - q_s[1]).powi(2);
    dp.norm * (-sum2 / (dp.sigma * dp.sigma) - dp.b * dp.b * diff2).exp()
}

/// Angular Fourier component `sqrt(P_ℓ) F_ℓ(ρ_i, ρ_s)` of the
/// double-Gaussian kernel: `𝒩 e^{-G(ρ_i²+ρ_s²)} I_|ℓ|[2(b²-1/σ²) ρ_i ρ_s]`,
/// with the parity rule handling the negative Bessel argument at `bσ < 1`.
pub fn fourier_component(ell: i32, dp: &DerivedParams, rho_i: f64, rho_s: f64) -> Result<f64> {
    if !(rho_i >= 0.0 && rho_s >= 0.0) {
        return Err(Error::Domain(format!(
            "fourier_component: radii must be non-negative, got ({rho_i}, {rho_s})"
        )));
    }
    let z = 2.0 * dp.g_param * dp.eta_a * rho_i * rho_s; // 2(b²-1/σ²) ρ_i ρ_s
    let exponent = -dp.g_param * (rho_i * rho_i + rho_s * rho_s) + z.abs();
    Ok(dp.norm * exponent.exp() * bessel_i_scaled(ell.unsigned_abs(), z)?)
}

/// Exact sinc-phase-matching kernel (Gaussian pump times the sinc of the
/// longitudinal mismatch), with the normalization constant fixed numerically
/// at construction.
#[derive(Debug, Clone)]
pub struct SincKernel {
    params: PumpCrystalParams,
    norm: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl SincKernel {
    pub fn new(params: PumpCrystalParams) -> Result<Self> {
        params.validate()?;
        // |ψ|² factorizes in sum/difference coordinates (Jacobian 1/4):
        //   ∫|ψ|² = N'² (1/4) (2π/w_p²) (2π k_p/L) ∫₀^∞ sinc²(t+Φ) dt.
        let j = sinc_sq_halfline_integral(params.phase_offset);
        let norm_sq_over_npsq = 0.25
            * (2.0 * std::f64::consts::PI / (params.pump_waist * params.pump_waist))
            * (2.0 * std::f64::consts::PI * params.pump_wavenumber / params.crystal_length)
            * j;
        Ok(Self {
            params,
            norm: norm_sq_over_npsq.sqrt().recip(),
        })
    }

    pub fn params(&self) -> &PumpCrystalParams {
        &self.params
    }

    /// Cached normalization constant `N'`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn eval(&self, q_i: [f64; 2], q_s: [f64; 2]) -> f64 {
        let p = &self.params;
        let sum2 = (q_i[0] + q_s[0]).powi(2) + (q_i[1] + q_s[1]).powi(2);
        let diff2 = (q_i[0] - q_s[0]).powi(2) + (q_i[1] - q_s[1]).powi(2);
        let gauss = (-(p.pump_waist * p.pump_waist / 4.0) * sum2).exp();
        let arg = p.crystal_length * diff2 / (2.0 * p.pump_wavenumber) + p.phase_offset;
        self.norm * gauss * sinc(arg)
    }
}

/// `∫₀^∞ sinc²(t+Φ) dt` by composite Simpson over half-period panels plus an
/// analytic `1/(2T)`-type tail.
fn sinc_sq_halfline_integral(phi: f64) -> f64 {
    let t_max = 4000.0 * std::f64::consts::PI;
    let panels = 800_000usize;
    let h = t_max / panels as f64;
    let f = |t: f64| sinc(t + phi).powi(2);
    let mut sum = f(0.0) + f(t_max);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    let body = sum * h / 3.0;
    // Tail: mean of sin² is 1/2, so ∫_T^∞ ≈ 1/(2(T+Φ)).
    body + 0.5 / (t_max + phi)
}
