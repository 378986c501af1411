//! Transition spectra over flux, and location/classification of the
//! stationary points of the qubit frequency (sweet spots).
//!
//! All sweeps run over the tied bias line `Φ1 = r Φ2`, parameterized by
//! `x2 = Φ2/Φ0 ∈ [0, 1]`. Slopes are expressed per unit of *common-mode*
//! flux `Φs = Φ1 + Φ2` so they compose directly with the noise model.

use rayon::prelude::*;

use crate::circuit::{build_hamiltonian, lowest_eigenvalues, CircuitParams, FluxBias};
use crate::error::{CoreError, Result};
use crate::noise::{flux_sensitivity, SensitivityMode};

/// Two stationary points closer than this (in `Φ2/Φ0`) are treated as one
/// physical sweet spot: weak junction interference can split a spot into a
/// shallow micro-pair (min/max a few 1e-3 apart, sub-µGHz deep) that no
/// plotted spectrum resolves. The cluster is reported once, at its
/// highest-frequency member.
pub const MERGE_RADIUS_PHI0: f64 = 0.01;

/// Step (in `Φ2/Φ0`) of the symmetric second difference used to classify a
/// stationary point as a minimum or maximum. Larger than the slope step so
/// the curvature signal dominates eigensolver noise.
pub const KIND_PROBE_STEP_PHI0: f64 = 5e-4;

/// Default seeding grid for the sweet-spot search. Fine enough to expose
/// the micro-pair structure near engineered spots (which a 401-point grid
/// steps right over), so the merge logic sees it rather than missing the
/// spot entirely.
pub const DEFAULT_SEED_GRID_N: usize = 1001;

/// Default stationarity acceptance: |slope| below this (GHz per Φ0 of
/// common-mode flux) counts as a vanishing slope.
pub const DEFAULT_SLOPE_TOL: f64 = 1e-3;

/// Lowest `k` energy levels (GHz) at an arbitrary bias.
pub fn eigenlevels(
    params: &CircuitParams,
    flux: &FluxBias,
    dim: usize,
    k: usize,
) -> Result<Vec<f64>> {
    let h = build_hamiltonian(params, flux, dim)?;
    lowest_eigenvalues(&h, k)
}

/// Transition frequency `f_ij = E_j − E_i` (GHz) at an arbitrary bias.
/// Requires `i < j < dim`.
pub fn transition_frequency(
    params: &CircuitParams,
    flux: &FluxBias,
    i: usize,
    j: usize,
    dim: usize,
) -> Result<f64> {
    if i >= j {
        return Err(CoreError::InvalidParameter(format!(
            "transition indices must satisfy i < j, got ({i}, {j})"
        )));
    }
    if j >= dim {
        return Err(CoreError::InvalidParameter(format!(
            "transition level {j} requires basis size > {j}, got {dim}"
        )));
    }
    let levels = eigenlevels(params, flux, dim, j + 1)?;
    Ok(levels[j] - levels[i])
}

/// Qubit frequency `f01` (GHz) on the tied bias line at `x2 = Φ2/Φ0`.
pub fn f01_at(params: &CircuitParams, phi2_over_phi0: f64, dim: usize) -> Result<f64> {
    transition_frequency(
        params,
        &FluxBias::constrained(params.r(), phi2_over_phi0),
        0,
        1,
        dim,
    )
}

/// Result of a flux sweep of several transition frequencies.
#[derive(Debug, Clone)]
pub struct SpectrumSweep {
    /// Grid of `Φ2/Φ0` values, ascending.
    pub phi2_over_phi0: Vec<f64>,
    /// The `(i, j)` transitions evaluated, in column order.
    pub transitions: Vec<(usize, usize)>,
    /// `frequencies_ghz[p][t]` is transition `t` at grid point `p` (GHz).
    pub frequencies_ghz: Vec<Vec<f64>>,
}

/// Evaluates the requested transitions at every grid point on the tied
/// bias line, in parallel. The grid must be non-empty, finite, and
/// strictly increasing; each transition must satisfy `i < j < dim`.
pub fn sweep_spectrum(
    params: &CircuitParams,
    grid: &[f64],
    transitions: &[(usize, usize)],
    dim: usize,
) -> Result<SpectrumSweep> {
    validate_grid(grid)?;
    if transitions.is_empty() {
        return Err(CoreError::InvalidParameter(
            "at least one transition must be requested".into(),
        ));
    }
    let mut k_needed = 0;
    for &(i, j) in transitions {
        if i >= j {
            return Err(CoreError::InvalidParameter(format!(
                "transition indices must satisfy i < j, got ({i}, {j})"
            )));
        }
        if j >= dim {
            return Err(CoreError::InvalidParameter(format!(
                "transition level {j} requires basis size > {j}, got {dim}"
            )));
        }
        k_needed = k_needed.max(j + 1);
    }
    let frequencies_ghz = grid
        .par_iter()
        .map(|&x2| -> Result<Vec<f64>> {
            let bias = FluxBias::constrained(params.r(), x2);
            let levels = eigenlevels(params, &bias, dim, k_needed).map_err(|e| {
                CoreError::SweepPointFailed {
                    phi2_over_phi0: x2,
                    source: Box::new(e),
                }
            })?;
            Ok(transitions.iter().map(|&(i, j)| levels[j] - levels[i]).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep {
        phi2_over_phi0: grid.to_vec(),
        transitions: transitions.to_vec(),
        frequencies_ghz,
    })
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(CoreError::InvalidParameter("flux grid is empty".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidParameter(
            "flux grid contains non-finite values".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::InvalidParameter(
            "flux grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Uniform grid of `n ≥ 2` points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

/// Whether a stationary point of `f01` is a local minimum or maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpotKind {
    Minimum,
    Maximum,
}

impl std::fmt::Display for SpotKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpotKind::Minimum => write!(f, "min"),
            SpotKind::Maximum => write!(f, "max"),
        }
    }
}

/// A located stationary point of the qubit frequency on the tied bias line.
#[derive(Debug, Clone)]
pub struct SweetSpot {
    /// Location in `Φ2/Φ0`.
    pub phi2_over_phi0: f64,
    /// Qubit frequency there (GHz).
    pub f01_ghz: f64,
    /// Minimum or maximum, from a symmetric second difference.
    pub kind: SpotKind,
    /// |slope| left after refinement, GHz per Φ0 of common-mode flux.
    pub residual_slope_ghz_per_phi0: f64,
}

/// Settings for the sweet-spot search.
#[derive(Debug, Clone, Copy)]
pub struct SweetSpotSearch {
    /// Seeding grid resolution over `x2 ∈ [0, 1]` (≥ 101).
    pub grid_n: usize,
    /// Basis size for the eigensolves.
    pub dim: usize,
    /// Step of the fine central-difference slope (Φ0).
    pub fd_step_phi0: f64,
    /// Stationarity acceptance, GHz per Φ0 of common-mode flux.
    pub slope_tol: f64,
}

impl Default for SweetSpotSearch {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_SEED_GRID_N,
            dim: 50,
            fd_step_phi0: 1e-5,
            slope_tol: DEFAULT_SLOPE_TOL,
        }
    }
}

/// Common-mode slope of `f01` on the tied line at `x2`, GHz per Φ0 of Φs.
fn tied_slope(params: &CircuitParams, x2: f64, step: f64, dim: usize) -> Result<f64> {
    flux_sensitivity(
        params,
        &FluxBias::constrained(params.r(), x2),
        SensitivityMode::CommonMode,
        step,
        dim,
    )
}

/// One slope-sign-change bracket from the seeding grid.
struct Bracket {
    /// Index of the grid interval `[xs[i], xs[i+1]]` the change occurred in.
    interval: usize,
    lo: f64,
    hi: f64,
}

/// Finds all stationary points of `f01(x2)` over `x2 ∈ [0, 1]` on the tied
/// bias line.
///
/// Procedure: evaluate `f01` on a uniform seeding grid; bracket strict sign
/// changes of the central-difference slope; refine each bracket by
/// bisection on a fine-step slope until the bracket is ~1e-12 wide; add the
/// endpoints 0 and 1 when their slope vanishes within `slope_tol`; merge
/// stationary points closer than [`MERGE_RADIUS_PHI0`] into one spot
/// (reported at the member with the highest `f01`); classify each spot by a
/// symmetric second difference and record the residual slope.
///
/// Errors with [`CoreError::GridTooCoarse`] when sign changes in *adjacent*
/// grid intervals refine to points farther apart than the merge radius —
/// then the seeding grid genuinely cannot separate neighboring spots and a
/// denser grid is required.
pub fn find_sweet_spots(
    params: &CircuitParams,
    search: &SweetSpotSearch,
) -> Result<Vec<SweetSpot>> {
    let n = search.grid_n;
    let dim = search.dim;
    if n < 101 {
        return Err(CoreError::InvalidParameter(format!(
            "seeding grid must have at least 101 points, got {n}"
        )));
    }
    if !(search.fd_step_phi0.is_finite() && search.fd_step_phi0 > 0.0) {
        return Err(CoreError::InvalidParameter(
            "finite-difference step must be positive and finite".into(),
        ));
    }
    if !(search.slope_tol.is_finite() && search.slope_tol > 0.0) {
        return Err(CoreError::InvalidParameter(
            "slope tolerance must be positive and finite".into(),
        ));
    }

    let delta = 1.0 / (n - 1) as f64;
    let xs = linspace(0.0, 1.0, n);
    let fs: Vec<f64> = xs
        .par_iter()
        .map(|&x2| f01_at(params, x2, dim))
        .collect::<Result<Vec<_>>>()?;

    // Central-difference slope at interior grid points, per unit Φs.
    let scale = 1.0 / ((1.0 + params.r()) * 2.0 * delta);
    let coarse_slope = |i: usize| (fs[i + 1] - fs[i - 1]) * scale;

    let mut brackets: Vec<Bracket> = Vec::new();
    for i in 1..n - 2 {
        let a = coarse_slope(i);
        let b = coarse_slope(i + 1);
        if a == 0.0 {
            // An exact grid zero: refine in the surrounding interval pair.
            brackets.push(Bracket {
                interval: i,
                lo: xs[i] - delta,
                hi: xs[i] + delta,
            });
        } else if a * b < 0.0 {
            brackets.push(Bracket {
                interval: i,
                lo: xs[i],
                hi: xs[i + 1],
            });
        }
    }

    // Refine every bracket on the fine slope, in parallel.
    let step = search.fd_step_phi0;
    let refined: Vec<(usize, f64)> = brackets
        .par_iter()
        .map(|br| -> Result<(usize, f64)> {
            let root = refine_bracket(params, br.lo, br.hi, delta, step, dim)?;
            Ok((br.interval, root))
        })
        .collect::<Result<Vec<_>>>()?;

    // Adjacent grid intervals each holding a sign change: if their refined
    // roots do not collapse into one cluster, the grid cannot be trusted to
    // have separated the spots between them.
    for w in refined.windows(2) {
        let (ia, ra) = w[0];
        let (ib, rb) = w[1];
        if ib == ia + 1 && (rb - ra).abs() > MERGE_RADIUS_PHI0 {
            return Err(CoreError::GridTooCoarse {
                x_a: ra,
                x_b: rb,
                suggested_grid_n: 4 * (n - 1) + 1,
            });
        }
    }

    let mut roots: Vec<f64> = refined.iter().map(|&(_, r)| r).collect();

    // Endpoints join when their slope already vanishes within tolerance.
    for endpoint in [0.0, 1.0] {
        let s = tied_slope(params, endpoint, step, dim)?;
        if s.abs() < search.slope_tol {
            roots.push(endpoint);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-4);

    // Merge chains of nearby stationary points into single spots.
    let clusters = chain_clusters(&roots, MERGE_RADIUS_PHI0);
    let mut spots = Vec::with_capacity(clusters.len());
    for (start, end) in clusters {
        let members = &roots[start..end];
        let mut rep = members[0];
        let mut rep_f01 = f01_at(params, rep, dim)?;
        for &m in &members[1..] {
            let f = f01_at(params, m, dim)?;
            if f > rep_f01 {
                rep = m;
                rep_f01 = f;
            }
        }
        let kind = classify_spot(params, rep, dim)?;
        let residual = tied_slope(params, rep, step, dim)?.abs();
        spots.push(SweetSpot {
            phi2_over_phi0: rep,
            f01_ghz: rep_f01,
            kind,
            residual_slope_ghz_per_phi0: residual,
        });
    }
    Ok(spots)
}

/// Search with default settings (seeding grid [`DEFAULT_SEED_GRID_N`],
/// step 1e-5 Φ0, tolerance [`DEFAULT_SLOPE_TOL`]).
pub fn find_sweet_spots_default(params: &CircuitParams, dim: usize) -> Result<Vec<SweetSpot>> {
    find_sweet_spots(
        params,
        &SweetSpotSearch {
            dim,
            ..SweetSpotSearch::default()
        },
    )
}

/// Bisects the fine slope to a root inside (a possibly padded version of)
/// `[lo, hi]`.
fn refine_bracket(
    params: &CircuitParams,
    lo: f64,
    hi: f64,
    delta: f64,
    step: f64,
    dim: usize,
) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut sa = tied_slope(params, a, step, dim)?;
    let mut sb = tied_slope(params, b, step, dim)?;
    if sa == 0.0 {
        return Ok(a);
    }
    if sb == 0.0 {
        return Ok(b);
    }
    if sa * sb > 0.0 {
        // The coarse slope saw a sign change the fine slope does not see at
        // the exact endpoints (possible when the stationary point sits very
        // close to an endpoint). Pad by one grid interval and retry.
        a = lo - delta;
        b = hi + delta;
        sa = tied_slope(params, a, step, dim)?;
        sb = tied_slope(params, b, step, dim)?;
        if sa == 0.0 {
            return Ok(a);
        }
        if sb == 0.0 {
            return Ok(b);
        }
        if sa * sb > 0.0 {
            // No root visible to the fine slope; report the flattest point.
            let mid = 0.5 * (lo + hi);
            let sm = tied_slope(params, mid, step, dim)?;
            let mut best = (sa.abs(), a);
            for cand in [(sm.abs(), mid), (sb.abs(), b)] {
                if cand.0 < best.0 {
                    best = cand;
                }
            }
            return Ok(best.1);
        }
    }
    for _ in 0..60 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        let mid = 0.5 * (a + b);
        let sm = tied_slope(params, mid, step, dim)?;
        if sm == 0.0 {
            return Ok(mid);
        }
        if sa * sm < 0.0 {
            b = mid;
        } else {
            a = mid;
            sa = sm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Splits an ascending slice into maximal chains whose consecutive gaps
/// are ≤ `radius`; returns `[start, end)` index ranges.
pub(crate) fn chain_clusters(sorted: &[f64], radius: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if sorted.is_empty() {
        return out;
    }
    let mut start = 0;
    for i in 1..sorted.len() {
        if sorted[i] - sorted[i - 1] > radius {
            out.push((start, i));
            start = i;
        }
    }
    out.push((start, sorted.len()));
    out
}

/// Classifies a stationary point by the sign of a symmetric second
/// difference of `f01` with step [`KIND_PROBE_STEP_PHI0`].
fn classify_spot(params: &CircuitParams, x: f64, dim: usize) -> Result<SpotKind> {
    let h = KIND_PROBE_STEP_PHI0;
    let fm = f01_at(params, x - h, dim)?;
    let f0 = f01_at(params, x, dim)?;
    let fp = f01_at(params, x + h, dim)?;
    let d2 = fp - 2.0 * f0 + fm;
    Ok(if d2 > 0.0 {
        SpotKind::Minimum
    } else {
        SpotKind::Maximum
    })
}

/// Heuristic count of distinct sweet spots over one flux period for an
/// integer tie ratio `r > 1`: `r + 4` for odd `r`, `r + 3` for even `r`.
pub fn predicted_sweet_spot_count(r: u32) -> Result<usize> {
    if r <= 1 {
        return Err(CoreError::InvalidParameter(format!(
            "the count heuristic needs a tie ratio greater than 1, got {r}"
        )));
    }
    Ok(if r % 2 == 1 {
        r as usize + 4
    } else {
        r as usize + 3
    })
}

/// Candidate stationary locations from the effective-junction picture:
/// extrema of the effective junction energy at `x2 = m/(2r)`,
/// `m = 0, …, 2r`. Requires `r ≥ 1`.
pub fn analytic_sweet_spot_candidates(r: u32) -> Result<Vec<f64>> {
    if r < 1 {
        return Err(CoreError::InvalidParameter(
            "candidate locations need an integer tie ratio of at least 1".into(),
        ));
    }
    Ok((0..=2 * r).map(|m| m as f64 / (2 * r) as f64).collect())
}

/// Small-oscillation estimate of the mid-slope |∂f01/∂Φs| for the
/// single-junction device (`b = 0`) on its linear branch:
/// `4π² E_L E_JΣ / (E_L + E_JΣ)` in GHz per Φ0.
///
/// The well minimum tracks the bias linearly with stiffness set by the
/// series combination of the junction and the inductor, which makes `f01`
/// fall linearly between the aligned point and the half-quantum point.
pub fn linear_branch_slope_ghz_per_phi0(params: &CircuitParams) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    4.0 * pi2 * params.el_ghz() * params.ej_sum_ghz()
        / (params.el_ghz() + params.ej_sum_ghz())
}
