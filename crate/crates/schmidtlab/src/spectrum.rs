//! Analytic Schmidt spectra, spiral spectrum, kernel reconstruction, and the
//! HG↔LG block-unitary conversion.
//!
//! Spectra store *probabilities* λ (the eigenvalues of the reduced state);
//! the amplitudes √λ are available through [`SchmidtSpectrum::amplitude`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::modes::{hg_2d, lg, ModeIndex};
use crate::spdc::DerivedParams;
use crate::specfun::log_factorial;
use crate::{Error, Result};

/// Hard cap on the truncation order when a tail-mass target is requested.
pub const MAX_ORDER_CAP: u32 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Cartesian,
    Polar,
}

/// Truncation policy for [`build_spectrum`].
#[derive(Debug, Clone, Copy)]
pub enum Truncation {
    /// Keep every index with mode order `<= N`.
    MaxOrder(u32),
    /// Smallest order whose closed-form tail mass is `<= ε`.
    TailMass(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SchmidtSpectrum {
    pub basis: Basis,
    /// `(index, λ)` sorted by mode order, then by `m` ascending (cartesian)
    /// or `ℓ` ascending with `p` descending (polar).
    pub entries: Vec<(ModeIndex, f64)>,
    pub b_sigma: f64,
    pub max_order: u32,
    /// Closed-form mass of the discarded orders; `Σλ + tail_mass = 1`.
    pub tail_mass: f64,
}

impl SchmidtSpectrum {
    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, l)| l).sum()
    }

    /// Schmidt amplitude √λ for one entry.
    pub fn amplitude(&self, i: usize) -> f64 {
        self.entries[i].1.sqrt()
    }

    /// Purity `Σλ²` of the truncated spectrum.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|(_, l)| l * l).sum()
    }
}

fn mu_from(b_sigma: f64) -> Result<f64> {
    if !(b_sigma.is_finite() && b_sigma > 0.0) {
        return Err(Error::Domain(format!(
            "b_sigma must be positive and finite, got {b_sigma}"
        )));
    }
    Ok(((b_sigma - 1.0) / (b_sigma + 1.0)).abs())
}

/// Cartesian Schmidt probability `λ_{m,n} = (1-μ²)² μ^{2(m+n)}`.
pub fn cartesian_lambda(m: u32, n: u32, b_sigma: f64) -> Result<f64> {
    let mu = mu_from(b_sigma)?;
    let one_minus = 1.0 - mu * mu;
    Ok(one_minus * one_minus * mu.powi(2 * (m + n) as i32))
}

/// Polar Schmidt probability `λ_{ℓ,p} = (1-μ²)² μ^{2(2p+|ℓ|)}`.
pub fn polar_lambda(ell: i32, p: u32, b_sigma: f64) -> Result<f64> {
    let mu = mu_from(b_sigma)?;
    let one_minus = 1.0 - mu * mu;
    Ok(one_minus * one_minus * mu.powi(2 * (2 * p + ell.unsigned_abs()) as i32))
}

/// Closed-form mass of all orders beyond `n_max`:
/// `Σ_{N>n_max} (N+1)(1-μ²)² μ^{2N} = (n_max+2) x^{n_max+1} - (n_max+1) x^{n_max+2}`
/// with `x = μ²`.
fn tail_beyond(n_max: u32, mu: f64) -> f64 {
    let x = mu * mu;
    if x == 0.0 {
        return 0.0;
    }
    let nf = f64::from(n_max);
    (nf + 2.0) * x.powi(n_max as i32 + 1) - (nf + 1.0) * x.powi(n_max as i32 + 2)
}

/// Enumerate the spectrum up to a truncation in deterministic order.
pub fn build_spectrum(b_sigma: f64, basis: Basis, truncation: Truncation) -> Result<SchmidtSpectrum> {
    let mu = mu_from(b_sigma)?;
    let n_max = match truncation {
        Truncation::MaxOrder(n) => n,
        Truncation::TailMass(eps) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::Domain(format!(
                    "tail-mass target must lie in (0,1), got {eps}"
                )));
            }
            let mut n = 0;
            while tail_beyond(n, mu) > eps && n < MAX_ORDER_CAP {
                n += 1;
            }
            n
        }
    };
    let mut entries = Vec::new();
    for order in 0..=n_max {
        match basis {
            Basis::Cartesian => {
                for m in 0..=order {
                    let n = order - m;
                    entries.push((
                        ModeIndex::Cartesian { m, n },
                        cartesian_lambda(m, n, b_sigma)?,
                    ));
                }
            }
            Basis::Polar => {
                // ℓ ascending, p descending follows automatically from
                // ℓ = -order, -order+2, ..., order with p = (order-|ℓ|)/2.
                let ord = order as i32;
                let mut ell = -ord;
                while ell <= ord {
                    let p = (order - ell.unsigned_abs()) / 2;
                    entries.push((ModeIndex::Polar { ell, p }, polar_lambda(ell, p, b_sigma)?));
                    ell += 2;
                }
            }
        }
    }
    Ok(SchmidtSpectrum {
        basis,
        entries,
        b_sigma,
        max_order: n_max,
        tail_mass: tail_beyond(n_max, mu),
    })
}

/// OAM marginal distribution together with its truncation residual.
#[derive(Debug, Clone, Serialize)]
pub struct SpiralSpectrum {
    /// `(ℓ, P_ℓ)` for `|ℓ| <= ell_max`, ℓ ascending.
    pub entries: Vec<(i32, f64)>,
    /// `Σ_{|ℓ| > ell_max} P_ℓ` in closed form.
    pub tail: f64,
}

/// Spiral spectrum `P_ℓ = (1-μ²) μ^{2|ℓ|} / (1+μ²)`.
pub fn spiral_spectrum(b_sigma: f64, ell_max: u32) -> Result<SpiralSpectrum> {
    let mu = mu_from(b_sigma)?;
    let x = mu * mu;
    let entries = (-(ell_max as i32)..=ell_max as i32)
        .map(|ell| {
            (
                ell,
                (1.0 - x) * x.powi(ell.unsigned_abs() as i32) / (1.0 + x),
            )
        })
        .collect();
    let tail = 2.0 * x.powi(ell_max as i32 + 1) / (1.0 + x);
    Ok(SpiralSpectrum { entries, tail })
}

fn check_compatible(spectrum: &SchmidtSpectrum, dp: &DerivedParams) -> Result<()> {
    if (spectrum.b_sigma - dp.b_sigma).abs() > 1e-12 * dp.b_sigma.max(1.0) {
        return Err(Error::Domain(format!(
            "spectrum built for b_sigma = {} but parameters have b_sigma = {}",
            spectrum.b_sigma, dp.b_sigma
        )));
    }
    Ok(())
}

/// Partial sum of the cartesian decomposition at one point, using the
/// signed-μ pairing so it converges to [`kernel_gauss`] on both sides of
/// `bσ = 1`.
pub fn reconstruct_cartesian(
    spectrum: &SchmidtSpectrum,
    dp: &DerivedParams,
    q_i: [f64; 2],
    q_s: [f64; 2],
) -> Result<f64> {
    if spectrum.basis != Basis::Cartesian {
        return Err(Error::Domain("reconstruct_cartesian needs a cartesian spectrum".into()));
    }
    check_compatible(spectrum, dp)?;
    let scale = dp.mode_scale();
    let sign = dp.mu_signed.signum();
    let mut sum = 0.0;
    for &(index, lambda) in &spectrum.entries {
        let ModeIndex::Cartesian { m, n } = index else {
            unreachable!("basis checked above")
        };
        let order_sign = if dp.mu_signed == 0.0 {
            1.0
        } else {
            sign.powi((m + n) as i32)
        };
        sum += order_sign
            * lambda.sqrt()
            * hg_2d(m, n, scale, q_i[0], q_i[1])?
            * hg_2d(m, n, scale, q_s[0], q_s[1])?;
    }
    Ok(sum)
}

/// Polar counterpart; converges to the same kernel, so the imaginary part of
/// the partial sum is pure truncation noise.
pub fn reconstruct_polar(
    spectrum: &SchmidtSpectrum,
    dp: &DerivedParams,
    point_i: (f64, f64),
    point_s: (f64, f64),
) -> Result<Complex64> {
    if spectrum.basis != Basis::Polar {
        return Err(Error::Domain("reconstruct_polar needs a polar spectrum".into()));
    }
    check_compatible(spectrum, dp)?;
    let scale = dp.mode_scale();
    let sign = dp.mu_signed.signum();
    let mut sum = Complex64::new(0.0, 0.0);
    for &(index, lambda) in &spectrum.entries {
        let ModeIndex::Polar { ell, p } = index else {
            unreachable!("basis checked above")
        };
        let order = ell.unsigned_abs() + 2 * p;
        let order_sign = if dp.mu_signed == 0.0 {
            1.0
        } else {
            sign.powi(order as i32)
        };
        sum += order_sign
            * lambda.sqrt()
            * lg(ell, p, scale, point_i.0, point_i.1)?
            * lg(-ell, p, scale, point_s.0, point_s.1)?;
    }
    Ok(sum)
}

/// Convenience: reconstruction residual bound for a geometric spectrum.
/// `|ψ - ψ_trunc| <= 𝒩 · tail amplitude mass`, with the amplitude tail
/// `Σ_{N>n_max} (N+1)(1-μ²)μ^N` in closed form.
pub fn reconstruction_tail_bound(dp: &DerivedParams, n_max: u32) -> f64 {
    let mu = dp.mu;
    if mu == 0.0 {
        return 0.0;
    }
    let nf = f64::from(n_max);
    let amp_tail = (1.0 - mu * mu)
        * ((nf + 2.0) * mu.powi(n_max as i32 + 1) - (nf + 1.0) * mu.powi(n_max as i32 + 2))
        / ((1.0 - mu) * (1.0 - mu));
    dp.norm * amp_tail
}

/// Unitary block mapping the order-`N` HG modes `{h_{N-k,k}}` to the
/// order-`N` LG modes.
#[derive(Debug, Clone)]
pub struct ConversionBlock {
    pub order: u32,
    /// Rows: LG modes `(ℓ, p)` with `ℓ = -N, -N+2, ..., N` ascending and
    /// `p = (N-|ℓ|)/2`. Columns: HG modes `h_{N-k,k}`, `k = 0..=N`.
    pub matrix: DMatrix<Complex64>,
}

impl ConversionBlock {
    /// Row labels in matrix order.
    pub fn polar_indices(&self) -> Vec<(i32, u32)> {
        let n = self.order as i32;
        (0..=self.order)
            .map(|r| {
                let ell = -n + 2 * r as i32;
                (ell, (self.order - ell.unsigned_abs()) / 2)
            })
            .collect()
    }

    /// `max |UU† - I|` over all entries.
    pub fn unitarity_residual(&self) -> f64 {
        let u = &self.matrix;
        let prod = u * u.adjoint();
        let n = u.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::from(expect)).norm());
            }
        }
        worst
    }
}

/// Coefficients of `(1-t)^a (1+t)^b` by binomial convolution; entry `k` is
/// the `k`-th Taylor coefficient, i.e. `(1/k!) d^k/dt^k [..]|_0`.
fn signed_binomial_poly(a: u32, b: u32) -> Vec<f64> {
    let binom = |n: u32, k: u32| -> f64 {
        (log_factorial(n) - log_factorial(k) - log_factorial(n - k)).exp()
    };
    let deg = (a + b) as usize;
    let mut coeffs = vec![0.0; deg + 1];
    for i in 0..=a {
        let ci = if i % 2 == 0 { 1.0 } else { -1.0 } * binom(a, i);
        for j in 0..=b {
            coeffs[(i + j) as usize] += ci * binom(b, j);
        }
    }
    coeffs
}

/// Build the order-`N` HG→LG conversion block with the normalized
/// coefficients `b_{p,k} = (-1)^p sqrt((N-k)! k! / (2^N n! m!)) c_k i^k`,
/// where `c_k` is the `k`-th Taylor coefficient of `(1-t)^n (1+t)^m` and
/// `(n, m)` are the ladder indices of the LG mode: `n = p`, `m = p + |ℓ|`,
/// conjugated for negative `ℓ`. The `(-1)^p` row sign matches the Laguerre
/// convention of [`crate::modes::lg`] (no alternating sign in the radial
/// polynomial); fixed against grid projections of the modes themselves.
pub fn hg_to_lg_block(order: u32) -> Result<ConversionBlock> {
    if order > 60 {
        return Err(Error::Range(format!(
            "hg_to_lg_block: order {order} beyond supported range 60"
        )));
    }
    let size = (order + 1) as usize;
    let mut matrix = DMatrix::from_element(size, size, Complex64::new(0.0, 0.0));
    for row in 0..size {
        let ell = -(order as i32) + 2 * row as i32;
        let p = (order - ell.unsigned_abs()) / 2;
        let n = p;
        let m = p + ell.unsigned_abs();
        let poly = signed_binomial_poly(n, m);
        for (k, &c_k) in poly.iter().enumerate() {
            let ln_norm = 0.5
                * (log_factorial(order - k as u32) + log_factorial(k as u32)
                    - f64::from(order) * 2.0_f64.ln()
                    - log_factorial(n)
                    - log_factorial(m));
            let phase = Complex64::i().powu(k as u32);
            let phase = if ell < 0 { phase.conj() } else { phase };
            let row_sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            matrix[(row, k)] = phase * (row_sign * ln_norm.exp() * c_k);
        }
    }
    Ok(ConversionBlock { order, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spdc::kernel_gauss;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const BS_THIRD: f64 = 1.0 / 3.0;

    #[test]
    fn cartesian_lambda_examples() {
        assert_abs_diff_eq!(cartesian_lambda(0, 0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            cartesian_lambda(0, 0, BS_THIRD).unwrap(),
            9.0 / 16.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            cartesian_lambda(1, 1, BS_THIRD).unwrap(),
            9.0 / 256.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn polar_lambda_examples() {
        assert_relative_eq!(
            polar_lambda(0, 0, BS_THIRD).unwrap(),
            9.0 / 16.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            polar_lambda(2, 1, BS_THIRD).unwrap(),
            9.0 / 4096.0,
            max_relative = 1e-13
        );
        for ell in 0..6i32 {
            for p in 0..4u32 {
                assert_eq!(
                    polar_lambda(ell, p, 0.4).unwrap(),
                    polar_lambda(-ell, p, 0.4).unwrap()
                );
            }
        }
    }

    #[test]
    fn build_spectrum_separable_point() {
        let s = build_spectrum(1.0, Basis::Cartesian, Truncation::TailMass(1e-12)).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0], (ModeIndex::Cartesian { m: 0, n: 0 }, 1.0));
        assert_eq!(s.tail_mass, 0.0);
    }

    #[test]
    fn build_spectrum_polar_order_one() {
        let s = build_spectrum(BS_THIRD, Basis::Polar, Truncation::MaxOrder(1)).unwrap();
        let want = [
            (ModeIndex::Polar { ell: 0, p: 0 }, 9.0 / 16.0),
            (ModeIndex::Polar { ell: -1, p: 0 }, 9.0 / 64.0),
            (ModeIndex::Polar { ell: 1, p: 0 }, 9.0 / 64.0),
        ];
        assert_eq!(s.entries.len(), 3);
        for (got, expect) in s.entries.iter().zip(&want) {
            assert_eq!(got.0, expect.0);
            assert_relative_eq!(got.1, expect.1, max_relative = 1e-13);
        }
        assert_relative_eq!(s.tail_mass, 1.0 - 0.84375, max_relative = 1e-12);
    }

    #[test]
    fn degeneracy_and_per_order_sums_match_between_bases() {
        for &bs in &[0.05, BS_THIRD, 3.0, 20.0] {
            let cart = build_spectrum(bs, Basis::Cartesian, Truncation::MaxOrder(12)).unwrap();
            let pol = build_spectrum(bs, Basis::Polar, Truncation::MaxOrder(12)).unwrap();
            for order in 0..=12u32 {
                let sum = |s: &SchmidtSpectrum| -> f64 {
                    s.entries
                        .iter()
                        .filter(|(i, _)| i.order() == order)
                        .map(|(_, l)| l)
                        .sum()
                };
                let count = |s: &SchmidtSpectrum| {
                    s.entries.iter().filter(|(i, _)| i.order() == order).count()
                };
                assert_eq!(count(&cart), (order + 1) as usize);
                assert_eq!(count(&pol), (order + 1) as usize);
                assert_eq!(sum(&cart), sum(&pol));
            }
        }
    }

    #[test]
    fn truncated_mass_plus_tail_is_one() {
        for &bs in &[0.05, BS_THIRD, 1.0, 3.0, 20.0] {
            for basis in [Basis::Cartesian, Basis::Polar] {
                for trunc in [Truncation::MaxOrder(17), Truncation::TailMass(1e-9)] {
                    let s = build_spectrum(bs, basis, trunc).unwrap();
                    assert_abs_diff_eq!(s.total_mass() + s.tail_mass, 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn tail_mass_targets_are_met() {
        let s = build_spectrum(0.05, Basis::Cartesian, Truncation::TailMass(1e-12)).unwrap();
        assert!(s.tail_mass <= 1e-12);
        // And the order is minimal: one order fewer must exceed the target.
        if s.max_order > 0 {
            let smaller =
                build_spectrum(0.05, Basis::Cartesian, Truncation::MaxOrder(s.max_order - 1))
                    .unwrap();
            assert!(smaller.tail_mass > 1e-12);
        }
    }

    #[test]
    fn spiral_spectrum_values() {
        let s = spiral_spectrum(1.0, 5).unwrap();
        for &(ell, p) in &s.entries {
            if ell == 0 {
                assert_eq!(p, 1.0);
            } else {
                assert_eq!(p, 0.0);
            }
        }
        let s = spiral_spectrum(BS_THIRD, 8).unwrap();
        let p: std::collections::HashMap<i32, f64> = s.entries.iter().copied().collect();
        assert_relative_eq!(p[&0], 3.0 / 5.0, max_relative = 1e-13);
        assert_relative_eq!(p[&1], 3.0 / 20.0, max_relative = 1e-13);
        assert_relative_eq!(p[&-1], 3.0 / 20.0, max_relative = 1e-13);
        let total: f64 = s.entries.iter().map(|(_, p)| p).sum();
        assert_abs_diff_eq!(total + s.tail, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reconstruction_separable_point_is_exact() {
        let dp = DerivedParams::from_reduced(1.0, 1.0).unwrap();
        let s = build_spectrum(1.0, Basis::Cartesian, Truncation::MaxOrder(0)).unwrap();
        for &(qi, qs) in &[([0.0, 0.0], [0.0, 0.0]), ([0.4, -0.2], [0.1, 0.9])] {
            let recon = reconstruct_cartesian(&s, &dp, qi, qs).unwrap();
            assert_relative_eq!(recon, kernel_gauss(&dp, qi, qs), max_relative = 1e-12);
        }
    }

    #[test]
    fn reconstruction_converges_within_tail_bound() {
        for &bs in &[BS_THIRD, 3.0] {
            let dp = DerivedParams::from_reduced(bs, 1.0).unwrap();
            let s = build_spectrum(bs, Basis::Cartesian, Truncation::MaxOrder(40)).unwrap();
            let bound = reconstruction_tail_bound(&dp, 40);
            for &(qi, qs) in &[
                ([0.3, -0.5], [0.2, 0.6]),
                ([0.0, 0.0], [0.0, 0.0]),
                ([1.1, 0.4], [-0.8, 0.3]),
            ] {
                let recon = reconstruct_cartesian(&s, &dp, qi, qs).unwrap();
                assert!(
                    (recon - kernel_gauss(&dp, qi, qs)).abs() <= bound + 1e-12,
                    "bσ={bs}: residual {} above bound {bound}",
                    (recon - kernel_gauss(&dp, qi, qs)).abs()
                );
            }
        }
    }

    #[test]
    fn polar_and_cartesian_reconstructions_agree() {
        for &bs in &[BS_THIRD, 3.0] {
            let dp = DerivedParams::from_reduced(bs, 1.0).unwrap();
            let cart = build_spectrum(bs, Basis::Cartesian, Truncation::MaxOrder(40)).unwrap();
            let pol = build_spectrum(bs, Basis::Polar, Truncation::MaxOrder(40)).unwrap();
            for &((ri, pi), (rs, ps)) in &[
                ((0.5, 0.3), (0.7, 2.0)),
                ((1.2, -1.0), (0.2, 0.4)),
                ((0.0, 0.0), (0.9, 1.1)),
            ] {
                let qi = [ri * f64::cos(pi), ri * f64::sin(pi)];
                let qs = [rs * f64::cos(ps), rs * f64::sin(ps)];
                let c = reconstruct_cartesian(&cart, &dp, qi, qs).unwrap();
                let p = reconstruct_polar(&pol, &dp, (ri, pi), (rs, ps)).unwrap();
                assert_abs_diff_eq!(c, p.re, epsilon = 1e-9);
                assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn reconstruction_residual_tracks_shrinking_tail_bound() {
        // Pointwise residuals need not decrease monotonically (terms
        // alternate in sign), but they must stay under the closed-form tail
        // bound, which does.
        let dp = DerivedParams::from_reduced(BS_THIRD, 1.0).unwrap();
        let qi = [0.6, -0.3];
        let qs = [0.1, 0.8];
        let exact = kernel_gauss(&dp, qi, qs);
        let mut prev_bound = f64::INFINITY;
        for n_max in [2u32, 6, 10, 16, 24, 36] {
            let s = build_spectrum(BS_THIRD, Basis::Cartesian, Truncation::MaxOrder(n_max)).unwrap();
            let res = (reconstruct_cartesian(&s, &dp, qi, qs).unwrap() - exact).abs();
            let bound = reconstruction_tail_bound(&dp, n_max);
            assert!(bound < prev_bound);
            assert!(res <= bound + 1e-12, "order {n_max}: {res} > {bound}");
            prev_bound = bound;
        }
        assert!(prev_bound < 1e-8);
    }

    #[test]
    fn conversion_block_order_zero_and_one() {
        let b0 = hg_to_lg_block(0).unwrap();
        assert_eq!(b0.matrix.nrows(), 1);
        assert_relative_eq!(b0.matrix[(0, 0)].re, 1.0, max_relative = 1e-14);
        assert_abs_diff_eq!(b0.matrix[(0, 0)].im, 0.0);

        let b1 = hg_to_lg_block(1).unwrap();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        for r in 0..2 {
            for c in 0..2 {
                assert_relative_eq!(b1.matrix[(r, c)].norm(), inv_sqrt2, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn conversion_blocks_unitary() {
        for order in 0..=10u32 {
            let b = hg_to_lg_block(order).unwrap();
            assert!(
                b.unitarity_residual() < 1e-10,
                "order {order}: residual {}",
                b.unitarity_residual()
            );
        }
    }

    #[test]
    fn conversion_reproduces_lg_modes_on_grid() {
        let scale = crate::modes::ModeScale::new(1.0).unwrap();
        for order in 0..=6u32 {
            let block = hg_to_lg_block(order).unwrap();
            let indices = block.polar_indices();
            for (row, &(ell, p)) in indices.iter().enumerate() {
                let mut worst: f64 = 0.0;
                for i in 0..64 {
                    for j in 0..64 {
                        let x = -3.0 + 6.0 * i as f64 / 63.0;
                        let y = -3.0 + 6.0 * j as f64 / 63.0;
                        let rho = (x * x + y * y).sqrt();
                        let phi = y.atan2(x);
                        let want = lg(ell, p, scale, rho, phi).unwrap();
                        let mut got = Complex64::new(0.0, 0.0);
                        for k in 0..=order {
                            got += block.matrix[(row, k as usize)]
                                * hg_2d(order - k, k, scale, x, y).unwrap();
                        }
                        worst = worst.max((got - want).norm());
                    }
                }
                assert!(
                    worst < 1e-8,
                    "order {order}, (ℓ={ell}, p={p}): max abs error {worst}"
                );
            }
        }
    }

    #[test]
    fn purity_matches_schmidt_number() {
        for &bs in &[0.05, BS_THIRD, 3.0] {
            let s = build_spectrum(bs, Basis::Polar, Truncation::TailMass(1e-15)).unwrap();
            assert!(s.tail_mass < 1e-14);
            let k_from_purity = 1.0 / s.purity();
            let k = crate::entropy::schmidt_number(bs).unwrap();
            assert_relative_eq!(k_from_purity, k, max_relative = 1e-9);
        }
    }
}
