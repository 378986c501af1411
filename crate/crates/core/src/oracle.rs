//! Independent cross-check solver: the same circuit Hamiltonian
//! discretized on a uniform phase grid with hard-wall boundaries, solved
//! by Sturm-sequence bisection.
//!
//! This route shares *no* numerical machinery with the number-basis
//! construction: the wavefunction lives on real-space phase samples, the
//! kinetic term is a second-order central difference, and the lowest
//! eigenvalues come from a bisection count rather than a dense QR solve.
//! Agreement between the two routes therefore checks physics and
//! implementation simultaneously.
//!
//! Discretization: on `φ_i = −W + i·Δ`, `Δ = 2W/(n−1)`, the operator
//! `−4 E_C d²/dφ² + V(φ)` becomes the symmetric tridiagonal matrix with
//! diagonal `8 E_C/Δ² + V(φ_i)` and off-diagonal `−4 E_C/Δ²`; the wall
//! condition `ψ = 0` just outside the grid is implicit. The error is
//! `O(Δ²)`, so a (n, 2n−1) pair supports Richardson extrapolation.

use crate::circuit::{effective_phase_offset_at, CircuitParams, FluxBias};
use crate::error::{CoreError, Result};

/// Hard-wall phase window and grid resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGridSpec {
    half_width: f64,
    n_points: usize,
}

/// Default half-width: `8π`, generously past the `6 φ_zpf + |offset|`
/// containment requirement for the parameter regimes of interest.
pub const DEFAULT_HALF_WIDTH: f64 = 8.0 * std::f64::consts::PI;

/// Default grid resolution; keeps the `O(Δ²)` discretization error of the
/// lowest transitions below the 1e-4 relative cross-check budget.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Maximum tolerated fraction of an eigenstate's norm in the outer 5% of
/// the window on each side; above this the window is declared too small.
pub const BOUNDARY_NORM_LIMIT: f64 = 1e-8;

impl PhaseGridSpec {
    /// Validates a window. Requires `half_width > 0` and `n_points ≥ 801`
    /// (coarser grids leave visible `O(Δ²)` bias in the lowest levels).
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "phase window half-width must be positive and finite, got {half_width}"
            )));
        }
        if n_points < 801 {
            return Err(CoreError::InvalidParameter(format!(
                "phase grid needs at least 801 points, got {n_points}"
            )));
        }
        Ok(Self {
            half_width,
            n_points,
        })
    }

    /// Window half-width in radians.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Number of grid nodes.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// The same window at double resolution (`2n − 1` nodes halves `Δ`
    /// while keeping the endpoints aligned).
    pub fn doubled(&self) -> Self {
        Self {
            half_width: self.half_width,
            n_points: 2 * self.n_points - 1,
        }
    }
}

impl Default for PhaseGridSpec {
    fn default() -> Self {
        Self {
            half_width: DEFAULT_HALF_WIDTH,
            n_points: DEFAULT_GRID_POINTS,
        }
    }
}

/// Lowest `k` eigenvalues (GHz, ascending) of the phase-grid Hamiltonian
/// at an arbitrary bias.
///
/// Fails with [`CoreError::WindowTooSmall`] when the window violates the
/// `W ≥ 6 φ_zpf + |effective offset|` containment precondition, or when
/// the highest requested eigenstate leaks more than
/// [`BOUNDARY_NORM_LIMIT`] of its norm into the outer 5% of the grid.
pub fn phase_grid_eigenlevels(
    params: &CircuitParams,
    flux: &FluxBias,
    spec: &PhaseGridSpec,
    k: usize,
) -> Result<Vec<f64>> {
    let n = spec.n_points;
    let w = spec.half_width;
    if k == 0 || k > n {
        return Err(CoreError::InvalidParameter(format!(
            "requested {k} levels from a {n}-point grid"
        )));
    }
    let offset = effective_phase_offset_at(params, flux);
    let required = 6.0 * params.phi_zpf() + offset.abs();
    if w < required {
        return Err(CoreError::WindowTooSmall {
            half_width: w,
            detail: format!(
                "containment needs at least 6·phi_zpf + |offset| = {required:.3} rad"
            ),
        });
    }

    let delta = 2.0 * w / (n - 1) as f64;
    let kinetic = 4.0 * params.ec_ghz() / (delta * delta);
    let a1 = flux.a1_rad();
    let a2 = flux.a2_rad();
    let ej1 = params.ej1_ghz();
    let ej2 = params.ej2_ghz();
    let el = params.el_ghz();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let phi = -w + i as f64 * delta;
            let v = -ej1 * (phi - a1).cos() - ej2 * (phi - a2).cos() + 0.5 * el * phi * phi;
            2.0 * kinetic + v
        })
        .collect();
    let off = -kinetic;

    let levels = lowest_tridiag_eigenvalues(&diag, off, k);

    // Containment audit on the highest requested state.
    let psi = tridiag_eigenvector(&diag, off, levels[k - 1]);
    let guard = (0.05 * n as f64).ceil() as usize;
    let total: f64 = psi.iter().map(|x| x * x).sum();
    let outer: f64 = psi[..guard].iter().map(|x| x * x).sum::<f64>()
        + psi[n - guard..].iter().map(|x| x * x).sum::<f64>();
    let fraction = outer / total;
    if fraction > BOUNDARY_NORM_LIMIT {
        return Err(CoreError::WindowTooSmall {
            half_width: w,
            detail: format!(
                "state {} leaks {fraction:.3e} of its norm into the outer 5% of the grid",
                k - 1
            ),
        });
    }
    Ok(levels)
}

/// Richardson-extrapolated lowest `k` levels from the `(n, 2n−1)` grid
/// pair: `(4·fine − coarse)/3`, cancelling the leading `O(Δ²)` error.
pub fn richardson_phase_grid_levels(
    params: &CircuitParams,
    flux: &FluxBias,
    spec: &PhaseGridSpec,
    k: usize,
) -> Result<Vec<f64>> {
    let coarse = phase_grid_eigenlevels(params, flux, spec, k)?;
    let fine = phase_grid_eigenlevels(params, flux, &spec.doubled(), k)?;
    Ok(coarse
        .iter()
        .zip(fine.iter())
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

/// Lowest `k` eigenvalues of the symmetric tridiagonal matrix with the
/// given diagonal and constant off-diagonal, by Sturm-sequence bisection.
fn lowest_tridiag_eigenvalues(diag: &[f64], off: f64, k: usize) -> Vec<f64> {
    let e_abs = off.abs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &d in diag {
        lo = lo.min(d - 2.0 * e_abs);
        hi = hi.max(d + 2.0 * e_abs);
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let tol = 4.0 * f64::EPSILON * scale;
    let e2 = off * off;
    (0..k)
        .map(|j| {
            let mut a = lo;
            let mut b = hi;
            // Invariant: count(a) ≤ j < count(b).
            for _ in 0..120 {
                if b - a <= tol {
                    break;
                }
                let mid = 0.5 * (a + b);
                if count_below(diag, e2, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Number of eigenvalues strictly below `x` (Sturm count via the LDLᵀ
/// pivot recurrence, with the standard tiny-pivot guard).
fn count_below(diag: &[f64], e2: f64, x: f64) -> usize {
    const PIVMIN: f64 = 1e-300;
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q.abs() < PIVMIN {
        q = -PIVMIN;
    }
    if q < 0.0 {
        count += 1;
    }
    for &d in &diag[1..] {
        q = d - x - e2 / q;
        if q.abs() < PIVMIN {
            q = -PIVMIN;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvector for an already-converged eigenvalue via two rounds of
/// inverse iteration from a deterministic start vector.
fn tridiag_eigenvector(diag: &[f64], off: f64, lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let shifted: Vec<f64> = diag.iter().map(|d| d - lambda).collect();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * (7.1 * i as f64).sin()).collect();
    normalize(&mut v);
    for _ in 0..2 {
        solve_tridiag_inplace(&shifted, off, &mut v);
        normalize(&mut v);
    }
    v
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Solves `T x = b` in place for a symmetric tridiagonal `T` (diagonal
/// `diag`, constant off-diagonal `off`) by LU with partial pivoting —
/// stable even when `T` is nearly singular, which is exactly the inverse-
/// iteration use case. Tiny pivots are clamped rather than failed: the
/// resulting solution explodes along the null direction, which inverse
/// iteration wants.
fn solve_tridiag_inplace(diag: &[f64], off: f64, b: &mut [f64]) {
    const PIVMIN: f64 = 1e-300;
    let n = diag.len();
    if n == 1 {
        let d = if diag[0].abs() < PIVMIN {
            PIVMIN
        } else {
            diag[0]
        };
        b[0] /= d;
        return;
    }
    let mut d: Vec<f64> = diag.to_vec();
    let mut du: Vec<f64> = vec![off; n - 1];
    let mut du2: Vec<f64> = vec![0.0; n.saturating_sub(2)];
    let mut mult: Vec<f64> = vec![0.0; n - 1];
    let mut swapped: Vec<bool> = vec![false; n - 1];
    for i in 0..n - 1 {
        let sub = off; // subdiagonal entry below the current pivot
        if d[i].abs() >= sub.abs() {
            let pivot = if d[i].abs() < PIVMIN {
                PIVMIN.copysign(if d[i] == 0.0 { 1.0 } else { d[i] })
            } else {
                d[i]
            };
            let m = sub / pivot;
            d[i] = pivot;
            d[i + 1] -= m * du[i];
            mult[i] = m;
        } else {
            // Swap rows i and i+1.
            let m = d[i] / sub;
            let old_d_next = d[i + 1];
            let old_du_next = if i + 1 < n - 1 { du[i + 1] } else { 0.0 };
            d[i] = sub;
            let old_du_i = du[i];
            du[i] = old_d_next;
            if i + 1 < n - 1 {
                du2[i] = old_du_next;
                du[i + 1] = -m * old_du_next;
            }
            d[i + 1] = old_du_i - m * old_d_next;
            mult[i] = m;
            swapped[i] = true;
        }
    }
    // Forward elimination of the right-hand side.
    for i in 0..n - 1 {
        if swapped[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= mult[i] * b[i];
    }
    // Back substitution.
    let dn = if d[n - 1].abs() < PIVMIN {
        PIVMIN
    } else {
        d[n - 1]
    };
    b[n - 1] /= dn;
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n - 2).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}
