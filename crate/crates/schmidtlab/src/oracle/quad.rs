//! Gaussian quadrature grids for the Nyström discretizations.
//!
//! Nodes come from the Golub–Welsch Jacobi matrix (symmetric tridiagonal
//! eigenvalues, polished with one Newton step); weights are evaluated through
//! orthonormal Hermite/Laguerre *functions* rather than raw polynomials so
//! they stay representable at large degree.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::specfun::hermite_function;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Nodes/weights for `∫ e^{-x²} f(x) dx` over the full line.
    GaussHermiteFullLine,
    /// Nodes/weights for `∫₀^∞ e^{-u} f(u) du`; used for radial integrals
    /// after the substitution `u = x²` (so `x dx = du/2`).
    HalfLineRadial,
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ln_unfolded: Vec<f64>,
    kind: GridKind,
}

impl QuadratureGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Raw weights, including the `e^{-x²}` (or `e^{-u}`) factor. May
    /// underflow to zero at extreme nodes of very large grids.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Unfolded weights `w_i e^{x_i²}` (or `w_i e^{u_i}`) for plain
    /// `∫ f dx` use.
    pub fn unfolded_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.ln_unfolded.iter().map(|&l| l.exp())
    }

    /// Log of the unfolded weights, for assembling Nyström matrix entries
    /// fully in exponent space.
    pub fn ln_unfolded_weights(&self) -> &[f64] {
        &self.ln_unfolded
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = offdiag[i];
            m[(i + 1, i)] = offdiag[i];
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Gauss–Hermite rule for `∫ e^{-x²} f(x) dx`, `2 <= n <= 500`.
pub fn gauss_hermite_grid(n: usize) -> Result<QuadratureGrid> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "gauss_hermite_grid: need at least 2 nodes, got {n}"
        )));
    }
    if n > 500 {
        return Err(Error::Range(format!(
            "gauss_hermite_grid: n = {n} beyond stable construction limit 500"
        )));
    }
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let mut nodes = tridiagonal_eigenvalues(&diag, &offdiag);

    // One Newton step on ψ_n(x) = 0 using ψ_n'(x) = sqrt(2n) ψ_{n-1} - x ψ_n.
    let nn = n as u32;
    for x in nodes.iter_mut() {
        let psi_n = hermite_function(nn, *x)?;
        let psi_nm1 = hermite_function(nn - 1, *x)?;
        let deriv = (2.0 * n as f64).sqrt() * psi_nm1 - *x * psi_n;
        if deriv != 0.0 {
            *x -= psi_n / deriv;
        }
    }

    // Unfolded weight: w_i e^{x_i²} = 1 / (n ψ_{n-1}(x_i)²).
    let mut weights = Vec::with_capacity(n);
    let mut ln_unfolded = Vec::with_capacity(n);
    for &x in &nodes {
        let psi = hermite_function(nn - 1, x)?;
        let ln_w = -(n as f64).ln() - 2.0 * psi.abs().ln();
        ln_unfolded.push(ln_w);
        weights.push((ln_w - x * x).exp());
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        ln_unfolded,
        kind: GridKind::GaussHermiteFullLine,
    })
}

/// Orthonormal Laguerre function `φ_k(u) = e^{-u/2} L_k(u)`, by the Laguerre
/// recurrence applied to the damped values.
fn laguerre_function(k: u32, u: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = (-u / 2.0).exp();
    for j in 0..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - u) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss–Laguerre rule for `∫₀^∞ e^{-u} f(u) du`, `2 <= n <= 300`.
pub fn half_line_radial_grid(n: usize) -> Result<QuadratureGrid> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "half_line_radial_grid: need at least 2 nodes, got {n}"
        )));
    }
    if n > 300 {
        return Err(Error::Range(format!(
            "half_line_radial_grid: n = {n} beyond stable construction limit 300"
        )));
    }
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let offdiag: Vec<f64> = (1..n).map(|k| k as f64).collect();
    let mut nodes = tridiagonal_eigenvalues(&diag, &offdiag);

    let nn = n as u32;
    for u in nodes.iter_mut() {
        // Newton on φ_n(u) = 0: φ_n' = (n/u)(φ_n - φ_{n-1}) - φ_n/2.
        let phi_n = laguerre_function(nn, *u);
        let phi_nm1 = laguerre_function(nn - 1, *u);
        let deriv = (n as f64 / *u) * (phi_n - phi_nm1) - phi_n / 2.0;
        if deriv != 0.0 {
            *u -= phi_n / deriv;
        }
    }

    // Unfolded weight: w_i e^{u_i} = u_i / ((n+1)² φ_{n+1}(u_i)²).
    let mut weights = Vec::with_capacity(n);
    let mut ln_unfolded = Vec::with_capacity(n);
    for &u in &nodes {
        let phi = laguerre_function(nn + 1, u);
        let ln_w = u.ln() - 2.0 * ((n as f64 + 1.0) * phi.abs()).ln();
        ln_unfolded.push(ln_w);
        weights.push((ln_w - u).exp());
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        ln_unfolded,
        kind: GridKind::HalfLineRadial,
    })
}
