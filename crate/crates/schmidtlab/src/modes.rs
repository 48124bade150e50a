//! Normalized transverse mode functions in momentum space.
//!
//! All modes share the single scale parameter `Γ` ([`ModeScale`]): the 1D
//! Hermite-Gauss envelope is `e^{-Γ²q²/2}` and the Laguerre-Gauss envelope is
//! `e^{-Γ²ρ²/2}`. The Laguerre polynomial argument of the LG mode is `Γ²ρ²`,
//! the unique dimensionally consistent choice that matches the radial modes
//! [`radial_mode`] under `x = Γρ`.

use num_complex::Complex64;

use crate::specfun::{generalized_laguerre, hermite_function, log_factorial};
use crate::{Error, Result};

/// Width parameter `Γ` of the mode family, in units of length so that `Γ q`
/// is dimensionless for a transverse wavevector `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeScale {
    gamma: f64,
}

impl ModeScale {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!(
                "ModeScale: gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Mode label in either basis. The mode order `N` is `m + n` (cartesian) or
/// `|ℓ| + 2p` (polar) and is conserved by the HG↔LG conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(tag = "basis", rename_all = "snake_case")]
pub enum ModeIndex {
    Cartesian { m: u32, n: u32 },
    Polar { ell: i32, p: u32 },
}

impl ModeIndex {
    pub fn order(&self) -> u32 {
        match *self {
            ModeIndex::Cartesian { m, n } => m + n,
            ModeIndex::Polar { ell, p } => ell.unsigned_abs() + 2 * p,
        }
    }
}

/// 1D Hermite-Gauss mode `h_n(Γq)`, unit L² norm over `q ∈ ℝ`.
pub fn hg_1d(n: u32, scale: ModeScale, q: f64) -> Result<f64> {
    Ok(scale.gamma.sqrt() * hermite_function(n, scale.gamma * q)?)
}

/// 2D Hermite-Gauss mode `h_{mn}(q, q_⊥) = h_m(Γq) h_n(Γq_⊥)`.
pub fn hg_2d(m: u32, n: u32, scale: ModeScale, q: f64, q_perp: f64) -> Result<f64> {
    Ok(hg_1d(m, scale, q)? * hg_1d(n, scale, q_perp)?)
}

/// Laguerre-Gauss mode in momentum space with phase `e^{+iℓφ}`, unit L² norm
/// under the measure `ρ dρ dφ`.
pub fn lg(ell: i32, p: u32, scale: ModeScale, rho: f64, phi: f64) -> Result<Complex64> {
    if !(rho.is_finite() && rho >= 0.0) || !phi.is_finite() {
        return Err(Error::Domain(format!(
            "lg: invalid point (rho={rho}, phi={phi})"
        )));
    }
    let gamma = scale.gamma;
    let ell_abs = ell.unsigned_abs();
    let x = gamma * rho;
    // sqrt(Γ² p! / (π (p+|ℓ|)!)) assembled in log-space.
    let ln_norm = 0.5
        * (2.0 * gamma.ln() + log_factorial(p)
            - log_factorial(p + ell_abs)
            - std::f64::consts::PI.ln());
    let radial = ln_norm.exp()
        * (-x * x / 2.0).exp()
        * x.powi(ell_abs as i32)
        * generalized_laguerre(p, f64::from(ell_abs), x * x)?;
    Ok(radial * Complex64::from_polar(1.0, f64::from(ell) * phi))
}

/// Radial mode `r_p^(ℓ)(x)`, orthonormal under the measure `x dx` on
/// `[0, ∞)`.
pub fn radial_mode(ell: u32, p: u32, x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("radial_mode: invalid x = {x}")));
    }
    let ln_norm = 0.5 * (2.0_f64.ln() + log_factorial(p) - log_factorial(p + ell));
    Ok(ln_norm.exp()
        * (-x * x / 2.0).exp()
        * x.powi(ell as i32)
        * generalized_laguerre(p, f64::from(ell), x * x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::quad::{gauss_hermite_grid, half_line_radial_grid};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn scale(gamma: f64) -> ModeScale {
        ModeScale::new(gamma).unwrap()
    }

    #[test]
    fn hg_1d_examples() {
        let expect = std::f64::consts::PI.powf(-0.25);
        assert_relative_eq!(hg_1d(0, scale(1.0), 0.0).unwrap(), expect, max_relative = 1e-14);
        assert_eq!(hg_1d(1, scale(2.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn hg_1d_unit_norm_by_quadrature() {
        let grid = gauss_hermite_grid(64).unwrap();
        let sc = scale(1.0);
        let integral: f64 = grid
            .nodes()
            .iter()
            .zip(grid.unfolded_weights())
            .map(|(&q, w)| w * hg_1d(0, sc, q).unwrap().powi(2))
            .sum();
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hg_2d_is_separable() {
        let sc = scale(1.0);
        assert_relative_eq!(
            hg_2d(0, 0, sc, 0.0, 0.0).unwrap(),
            1.0 / std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        for y in [-2.0, 0.3, 1.7] {
            assert_eq!(hg_2d(1, 0, sc, 0.0, y).unwrap(), 0.0);
        }
        for i in 0..16 {
            for j in 0..16 {
                let a = -2.0 + 0.25 * i as f64;
                let b = -2.0 + 0.25 * j as f64;
                assert_eq!(
                    hg_2d(1, 2, sc, a, b).unwrap(),
                    hg_1d(1, sc, a).unwrap() * hg_1d(2, sc, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn lg_examples() {
        let sc = scale(1.0);
        let v = lg(0, 0, sc, 0.0, 0.7).unwrap();
        assert_relative_eq!(v.re, 1.0 / std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0);
        assert_eq!(lg(2, 0, sc, 0.0, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        // e^{iℓφ} phase: arg difference for ℓ=2 between φ=π/4 and φ=0 is π/2.
        let a = lg(2, 0, sc, 1.3, std::f64::consts::FRAC_PI_4).unwrap();
        let b = lg(2, 0, sc, 1.3, 0.0).unwrap();
        assert_abs_diff_eq!(a.arg() - b.arg(), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn radial_mode_examples() {
        assert_relative_eq!(
            radial_mode(0, 0, 0.0).unwrap(),
            2.0_f64.sqrt(),
            max_relative = 1e-14
        );
        assert_eq!(radial_mode(3, 0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn radial_mode_unit_norm_by_quadrature() {
        // ∫ r_1^(2)(x)² x dx = 1 with the half-line grid in u = x².
        let grid = half_line_radial_grid(64).unwrap();
        let integral: f64 = grid
            .nodes()
            .iter()
            .zip(grid.unfolded_weights())
            .map(|(&u, w)| w * 0.5 * radial_mode(2, 1, u.sqrt()).unwrap().powi(2))
            .sum();
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hg_2d_orthonormality_up_to_order_8() {
        let grid = gauss_hermite_grid(48).unwrap();
        let sc = scale(1.0);
        let pairs: Vec<(u32, u32)> = (0..=8)
            .flat_map(|order| (0..=order).map(move |m| (m, order - m)))
            .collect();
        for &(m, n) in &pairs {
            for &(mp, np) in &pairs {
                let mut overlap = 0.0;
                // Separable: product of two 1D overlaps.
                let mut o1 = 0.0;
                let mut o2 = 0.0;
                for (&q, w) in grid.nodes().iter().zip(grid.unfolded_weights()) {
                    o1 += w * hg_1d(m, sc, q).unwrap() * hg_1d(mp, sc, q).unwrap();
                    o2 += w * hg_1d(n, sc, q).unwrap() * hg_1d(np, sc, q).unwrap();
                }
                overlap += o1 * o2;
                let expect = if (m, n) == (mp, np) { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(overlap, expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn lg_orthonormality_up_to_order_8() {
        // ρ dρ via the half-line grid in u = ρ², trapezoid in φ.
        let radial = half_line_radial_grid(48).unwrap();
        let n_phi = 64usize;
        let sc = scale(1.0);
        let polar_indices: Vec<(i32, u32)> = (-8i32..=8)
            .flat_map(|ell| (0..=(8 - ell.unsigned_abs()) / 2).map(move |p| (ell, p)))
            .filter(|(ell, p)| ell.unsigned_abs() + 2 * p <= 8)
            .collect();
        for &(ell, p) in &polar_indices {
            for &(ellp, pp) in &polar_indices {
                let mut overlap = Complex64::new(0.0, 0.0);
                for (&u, w) in radial.nodes().iter().zip(radial.unfolded_weights()) {
                    let rho = u.sqrt();
                    let mut ang = Complex64::new(0.0, 0.0);
                    for k in 0..n_phi {
                        let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                        ang += lg(ell, p, sc, rho, phi).unwrap().conj()
                            * lg(ellp, pp, sc, rho, phi).unwrap();
                    }
                    ang *= 2.0 * std::f64::consts::PI / n_phi as f64;
                    overlap += w * 0.5 * ang;
                }
                let expect = if (ell, p) == (ellp, pp) { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(overlap.re, expect, epsilon = 1e-9);
                assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn radial_orthonormality_up_to_order_8() {
        let grid = half_line_radial_grid(48).unwrap();
        for ell in 0..=4u32 {
            for p in 0..=3u32 {
                for pp in 0..=3u32 {
                    let overlap: f64 = grid
                        .nodes()
                        .iter()
                        .zip(grid.unfolded_weights())
                        .map(|(&u, w)| {
                            let x = u.sqrt();
                            w * 0.5
                                * radial_mode(ell, p, x).unwrap()
                                * radial_mode(ell, pp, x).unwrap()
                        })
                        .sum();
                    let expect = if p == pp { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(overlap, expect, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn scale_covariance() {
        // hg_1d(n, Γ, q) = sqrt(Γ/Γ') hg_1d(n, Γ', q Γ/Γ').
        for &(g, gp) in &[(1.0, 2.0), (0.5, 3.0), (2.2, 0.7)] {
            for n in [0u32, 1, 3, 6] {
                for &q in &[-1.5, 0.2, 2.0] {
                    let lhs = hg_1d(n, scale(g), q).unwrap();
                    let rhs = (g / gp).sqrt() * hg_1d(n, scale(gp), q * g / gp).unwrap();
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn lg_matches_radial_mode() {
        // |lg(ℓ,p,Γ,ρ,φ)| = Γ/sqrt(2π) · r_p^(|ℓ|)(Γρ).
        for &gamma in &[0.8, 1.0, 2.5] {
            let sc = scale(gamma);
            for ell in -3i32..=3 {
                for p in 0..=3u32 {
                    for &rho in &[0.1, 0.9, 2.0] {
                        let lhs = lg(ell, p, sc, rho, 0.4).unwrap().norm();
                        let rhs = gamma / (2.0 * std::f64::consts::PI).sqrt()
                            * radial_mode(ell.unsigned_abs(), p, gamma * rho)
                                .unwrap()
                                .abs();
                        assert_relative_eq!(lhs, rhs, max_relative = 1e-10, epsilon = 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn lg_and_hg_agree_at_order_zero() {
        let sc = scale(1.3);
        for &x in &[-1.0f64, 0.0, 0.8] {
            for &y in &[-0.5f64, 0.0, 1.2] {
                let rho = (x * x + y * y).sqrt();
                let phi = y.atan2(x);
                let l = lg(0, 0, sc, rho, phi).unwrap();
                let h = hg_2d(0, 0, sc, x, y).unwrap();
                assert_abs_diff_eq!(l.re, h, epsilon = 1e-12);
                assert_abs_diff_eq!(l.im, 0.0, epsilon = 1e-12);
            }
        }
    }
}
