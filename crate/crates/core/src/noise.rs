//! 1/f flux-noise dephasing: frequency sensitivities to the two flux
//! channels, per-channel and total pure-dephasing rates, and flux sweeps
//! of the dephasing time.
//!
//! Conventions. Noise acts on the mode coordinates `Φs = Φ1 + Φ2`
//! (common mode, e.g. a global field) and `Φd = Φ1 − Φ2` (differential,
//! e.g. a local bias line). With 1/f spectra of amplitudes `A_Φs`, `A_Φd`
//! (in Φ0) and correlation coefficient `c_sd`, the Gaussian-decay rate is
//!
//! ```text
//! Γ = 2π · L · √( (A_s·s_s + c·A_d·s_d)² + (1−c²)·(A_d·s_d)² ) · 1e9  [1/s]
//! ```
//!
//! where `s_s`, `s_d` are the signed sensitivities `∂f01/∂Φs`, `∂f01/∂Φd`
//! in GHz/Φ0 and `L` is the logarithmic factor `√|ln(ζ/(f_ir·t_m))| ~ 4`.
//! The perfect-square grouping is algebraically identical to the textbook
//! `Γs² + Γd² + 2c·…` expansion but cannot cancel catastrophically, so
//! exact cancellation at `c = 1`, `A_s·s_s = −A_d·s_d` comes out as a true
//! zero. The off-diagonal element decays as `exp(−Γ²t²)` and `T_φ = 1/Γ`.

use rayon::prelude::*;

use crate::circuit::{CircuitParams, FluxBias};
use crate::error::{CoreError, Result};
use crate::spectrum::transition_frequency;

/// Smallest trustworthy finite-difference step in Φ0. The eigensolver
/// resolves frequencies to about 1e-12 GHz; a central difference with
/// step `h` therefore resolves slopes only to `1e-12/(2h)` GHz/Φ0. Below
/// 1e-9 Φ0 that floor reaches the 1e-3 GHz/Φ0 scale of the stationarity
/// tolerance, so the difference no longer measures the slope.
pub const MIN_RELIABLE_STEP_PHI0: f64 = 1e-9;

/// Default central-difference step (Φ0): truncation error ~1e-10 of the
/// curve scale while staying four orders above the noise floor.
pub const DEFAULT_FD_STEP_PHI0: f64 = 1e-5;

/// Default logarithmic factor `√|ln(ζ/(f_ir t_m))|` for 1/f dephasing.
pub const DEFAULT_LOG_FACTOR: f64 = 4.0;

/// The infrared-cutoff constant `ζ = e^{3/2−γ}/(2π) ≈ 0.400479` (with `γ`
/// Euler's constant) entering the self-consistent logarithmic factor.
pub fn zeta() -> f64 {
    const EULER_GAMMA: f64 = 0.577215664901532860606512090082;
    (1.5 - EULER_GAMMA).exp() / std::f64::consts::TAU
}

/// Which flux direction a sensitivity differentiates along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityMode {
    /// Slope per unit common-mode flux `Φs`, taken along the tied
    /// direction `δΦ1 = r·δΦ2` in which a global flux offset moves both
    /// loops together. On the tied bias line this is the direction the
    /// working point actually shifts, so it vanishes at sweet spots.
    CommonMode,
    /// Pure partial `∂f01/∂Φd` at fixed `Φs` — the direction a local bias
    /// asymmetry moves the fluxes. Generally nonzero even at common-mode
    /// sweet spots.
    Differential,
}

/// Central-difference sensitivity of `f01` (GHz per Φ0) at a bias point.
///
/// `step` is the full offset applied to the differentiated mode
/// coordinate on each side. Errors when the step is non-positive or below
/// [`MIN_RELIABLE_STEP_PHI0`].
pub fn flux_sensitivity(
    params: &CircuitParams,
    flux: &FluxBias,
    mode: SensitivityMode,
    step: f64,
    dim: usize,
) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "finite-difference step must be positive and finite, got {step}"
        )));
    }
    if step < MIN_RELIABLE_STEP_PHI0 {
        return Err(CoreError::StepUnreliable { step });
    }
    let r = params.r();
    let (plus, minus) = match mode {
        SensitivityMode::CommonMode => {
            // Tied direction, scaled so the common-mode coordinate moves
            // by exactly ±step: δΦ2 = step/(1+r), δΦ1 = r·step/(1+r).
            let d2 = step / (1.0 + r);
            let d1 = r * d2;
            (
                FluxBias::new(flux.phi1_over_phi0() + d1, flux.phi2_over_phi0() + d2)?,
                FluxBias::new(flux.phi1_over_phi0() - d1, flux.phi2_over_phi0() - d2)?,
            )
        }
        SensitivityMode::Differential => (
            // Φd moves by ±step while Φs stays fixed.
            FluxBias::new(
                flux.phi1_over_phi0() + 0.5 * step,
                flux.phi2_over_phi0() - 0.5 * step,
            )?,
            FluxBias::new(
                flux.phi1_over_phi0() - 0.5 * step,
                flux.phi2_over_phi0() + 0.5 * step,
            )?,
        ),
    };
    let fa = transition_frequency(params, &plus, 0, 1, dim)?;
    let fb = transition_frequency(params, &minus, 0, 1, dim)?;
    Ok((fa - fb) / (2.0 * step))
}

/// Differential sensitivity computed through the tie-slope
/// parameterization: write `Φd = β·Φs` at fixed `Φs ≠ 0`, differentiate
/// `f01` with respect to `β`, and divide by `Φs`. Algebraically identical
/// to the [`SensitivityMode::Differential`] partial; kept as an
/// independent cross-check route, not used in sweeps.
///
/// Errors when `|Φs| < 1e-6 Φ0` (the parameterization degenerates).
pub fn differential_sensitivity_via_tie_slope(
    params: &CircuitParams,
    flux: &FluxBias,
    step: f64,
    dim: usize,
) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "finite-difference step must be positive and finite, got {step}"
        )));
    }
    if step < MIN_RELIABLE_STEP_PHI0 {
        return Err(CoreError::StepUnreliable { step });
    }
    let phi_s = flux.phi_s_over_phi0();
    if phi_s.abs() < 1e-6 {
        return Err(CoreError::InvalidParameter(
            "tie-slope route needs |common-mode flux| of at least 1e-6 Phi0".into(),
        ));
    }
    let beta0 = flux.phi_d_over_phi0() / phi_s;
    // ε chosen so the implied Φd offset is ±step.
    let eps = step / phi_s.abs();
    let plus = FluxBias::from_modes(phi_s, (beta0 + eps) * phi_s);
    let minus = FluxBias::from_modes(phi_s, (beta0 - eps) * phi_s);
    let fa = transition_frequency(params, &plus, 0, 1, dim)?;
    let fb = transition_frequency(params, &minus, 0, 1, dim)?;
    // d(f)/dβ / Φs; the signed Φd separation between the points is 2εΦs.
    Ok((fa - fb) / (2.0 * eps * phi_s))
}

/// 1/f flux-noise model: channel amplitudes, correlation, and the
/// logarithmic factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    a_phi_s_phi0: f64,
    a_phi_d_phi0: f64,
    c_sd: f64,
    log_factor: f64,
    alpha: f64,
}

impl NoiseModel {
    /// Validates and stores a noise model.
    ///
    /// * `a_phi_s_phi0`, `a_phi_d_phi0` — 1/f amplitudes in Φ0, ≥ 0.
    /// * `c_sd` — correlation coefficient in `[−1, 1]`.
    /// * `log_factor` — `√|ln(ζ/(f_ir t_m))|`, > 0 (default
    ///   [`DEFAULT_LOG_FACTOR`]).
    /// * `alpha` — spectral exponent of the `1/f^α` spectrum, in `(0, 2)`.
    ///   Stored for reporting; the rate formulas here are the `α = 1`
    ///   forms.
    pub fn new(
        a_phi_s_phi0: f64,
        a_phi_d_phi0: f64,
        c_sd: f64,
        log_factor: f64,
        alpha: f64,
    ) -> Result<Self> {
        let all = [a_phi_s_phi0, a_phi_d_phi0, c_sd, log_factor, alpha];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "noise parameters must be finite".into(),
            ));
        }
        if a_phi_s_phi0 < 0.0 || a_phi_d_phi0 < 0.0 {
            return Err(CoreError::InvalidParameter(
                "noise amplitudes must be non-negative".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&c_sd) {
            return Err(CoreError::InvalidParameter(format!(
                "correlation coefficient must lie in [-1, 1], got {c_sd}"
            )));
        }
        if log_factor <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "logarithmic factor must be positive, got {log_factor}"
            )));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(CoreError::InvalidParameter(format!(
                "spectral exponent must lie in (0, 2), got {alpha}"
            )));
        }
        Ok(Self {
            a_phi_s_phi0,
            a_phi_d_phi0,
            c_sd,
            log_factor,
            alpha,
        })
    }

    /// Common-mode amplitude `A_Φs` (Φ0).
    pub fn a_phi_s_phi0(&self) -> f64 {
        self.a_phi_s_phi0
    }

    /// Differential amplitude `A_Φd` (Φ0).
    pub fn a_phi_d_phi0(&self) -> f64 {
        self.a_phi_d_phi0
    }

    /// Correlation coefficient `c_sd`.
    pub fn c_sd(&self) -> f64 {
        self.c_sd
    }

    /// Logarithmic factor `√|ln(ζ/(f_ir t_m))|`.
    pub fn log_factor(&self) -> f64 {
        self.log_factor
    }

    /// Spectral exponent `α` (stored for reporting only).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Copy with a different logarithmic factor (used by the
    /// self-consistent mode).
    pub fn with_log_factor(&self, log_factor: f64) -> Result<Self> {
        Self::new(
            self.a_phi_s_phi0,
            self.a_phi_d_phi0,
            self.c_sd,
            log_factor,
            self.alpha,
        )
    }
}

/// Single-channel pure-dephasing rate in 1/s:
/// `Γ = 2π · A · L · |s| · 1e9` for amplitude `A` (Φ0), log factor `L`,
/// and sensitivity `s` (GHz/Φ0).
pub fn mode_dephasing_rate(
    amplitude_phi0: f64,
    sensitivity_ghz_per_phi0: f64,
    log_factor: f64,
) -> f64 {
    std::f64::consts::TAU * amplitude_phi0 * log_factor * sensitivity_ghz_per_phi0.abs() * 1e9
}

/// Total dephasing rate in 1/s from both channels with correlation,
/// using the stable perfect-square grouping (see module docs). The signed
/// sensitivities carry the cross-term sign; the radicand is clamped at
/// zero against rounding.
pub fn total_dephasing_rate(
    model: &NoiseModel,
    sens_s_ghz_per_phi0: f64,
    sens_d_ghz_per_phi0: f64,
) -> f64 {
    let u = model.a_phi_s_phi0 * sens_s_ghz_per_phi0;
    let v = model.a_phi_d_phi0 * sens_d_ghz_per_phi0;
    let c = model.c_sd;
    let radicand = ((u + c * v) * (u + c * v) + (1.0 - c * c) * v * v).max(0.0);
    std::f64::consts::TAU * model.log_factor * 1e9 * radicand.sqrt()
}

/// Fixed-point solve of the logarithmic factor
/// `L = √|ln(ζ·Γ₁·L / f_ir)|` where `Γ₁` is the rate computed with unit
/// log factor and the measurement time is taken as `t_m = 1/Γ`. Runs at
/// most 20 iterations from `initial`, stopping at 1e-3 relative change.
///
/// A zero rate leaves the factor at `initial` (nothing decays, the factor
/// is immaterial).
pub fn self_consistent_log_factor(
    gamma_per_unit_log: f64,
    f_ir_hz: f64,
    initial: f64,
) -> Result<f64> {
    if !(f_ir_hz.is_finite() && f_ir_hz > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "infrared cutoff must be positive and finite, got {f_ir_hz} Hz"
        )));
    }
    if !(gamma_per_unit_log.is_finite() && gamma_per_unit_log >= 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "rate per unit log factor must be non-negative, got {gamma_per_unit_log}"
        )));
    }
    if !(initial.is_finite() && initial > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "initial log factor must be positive, got {initial}"
        )));
    }
    if gamma_per_unit_log == 0.0 {
        return Ok(initial);
    }
    let mut l = initial;
    for _ in 0..20 {
        let arg = zeta() * gamma_per_unit_log * l / f_ir_hz;
        let next = arg.ln().abs().sqrt().max(1e-6);
        let done = (next - l).abs() <= 1e-3 * l;
        l = next;
        if done {
            break;
        }
    }
    Ok(l)
}

/// Dephasing quantities along a flux sweep of the tied bias line.
#[derive(Debug, Clone)]
pub struct DephasingProfile {
    /// Grid of `Φ2/Φ0` values, ascending.
    pub phi2_over_phi0: Vec<f64>,
    /// Signed common-mode sensitivity `∂f01/∂Φs` (GHz/Φ0).
    pub sens_s: Vec<f64>,
    /// Signed differential sensitivity `∂f01/∂Φd` (GHz/Φ0).
    pub sens_d: Vec<f64>,
    /// Common-channel rate `Γs` (1/s).
    pub gamma_s: Vec<f64>,
    /// Differential-channel rate `Γd` (1/s).
    pub gamma_d: Vec<f64>,
    /// Total rate `Γ` with correlation (1/s).
    pub gamma_total: Vec<f64>,
    /// `T_φ = 1/Γ` in seconds; `+∞` where the total rate vanishes.
    pub t_phi_seconds: Vec<f64>,
    /// Logarithmic factor actually used at each point (constant unless the
    /// self-consistent mode recomputed it).
    pub log_factor_used: Vec<f64>,
}

/// Evaluates sensitivities and dephasing rates at every grid point on the
/// tied bias line, in parallel. Grid requirements as in spectrum sweeps.
pub fn dephasing_sweep(
    params: &CircuitParams,
    model: &NoiseModel,
    grid: &[f64],
    step: f64,
    dim: usize,
) -> Result<DephasingProfile> {
    dephasing_sweep_impl(params, model, grid, step, dim, None)
}

/// Like [`dephasing_sweep`], but re-solves the logarithmic factor
/// self-consistently at each grid point with infrared cutoff `f_ir_hz`,
/// starting from the model's configured factor.
pub fn dephasing_sweep_self_consistent(
    params: &CircuitParams,
    model: &NoiseModel,
    grid: &[f64],
    step: f64,
    dim: usize,
    f_ir_hz: f64,
) -> Result<DephasingProfile> {
    if !(f_ir_hz.is_finite() && f_ir_hz > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "infrared cutoff must be positive and finite, got {f_ir_hz} Hz"
        )));
    }
    dephasing_sweep_impl(params, model, grid, step, dim, Some(f_ir_hz))
}

fn dephasing_sweep_impl(
    params: &CircuitParams,
    model: &NoiseModel,
    grid: &[f64],
    step: f64,
    dim: usize,
    self_consistent_f_ir: Option<f64>,
) -> Result<DephasingProfile> {
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
    struct PointRow {
        sens_s: f64,
        sens_d: f64,
        gamma_s: f64,
        gamma_d: f64,
        gamma_total: f64,
        t_phi: f64,
        log_factor: f64,
    }
    let rows: Vec<PointRow> = grid
        .par_iter()
        .map(|&x2| -> Result<PointRow> {
            let wrap = |e: CoreError| CoreError::SweepPointFailed {
                phi2_over_phi0: x2,
                source: Box::new(e),
            };
            let bias = FluxBias::constrained(params.r(), x2);
            let ss =
                flux_sensitivity(params, &bias, SensitivityMode::CommonMode, step, dim)
                    .map_err(wrap)?;
            let sd =
                flux_sensitivity(params, &bias, SensitivityMode::Differential, step, dim)
                    .map_err(wrap)?;
            let log_factor = match self_consistent_f_ir {
                None => model.log_factor(),
                Some(f_ir) => {
                    let unit = model.with_log_factor(1.0).map_err(wrap)?;
                    let gamma_unit = total_dephasing_rate(&unit, ss, sd);
                    self_consistent_log_factor(gamma_unit, f_ir, model.log_factor())
                        .map_err(wrap)?
                }
            };
            let gamma_s = mode_dephasing_rate(model.a_phi_s_phi0(), ss, log_factor);
            let gamma_d = mode_dephasing_rate(model.a_phi_d_phi0(), sd, log_factor);
            let scaled = model.with_log_factor(log_factor).map_err(wrap)?;
            let gamma_total = total_dephasing_rate(&scaled, ss, sd);
            let t_phi = if gamma_total > 0.0 {
                1.0 / gamma_total
            } else {
                f64::INFINITY
            };
            Ok(PointRow {
                sens_s: ss,
                sens_d: sd,
                gamma_s,
                gamma_d,
                gamma_total,
                t_phi,
                log_factor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut profile = DephasingProfile {
        phi2_over_phi0: grid.to_vec(),
        sens_s: Vec::with_capacity(rows.len()),
        sens_d: Vec::with_capacity(rows.len()),
        gamma_s: Vec::with_capacity(rows.len()),
        gamma_d: Vec::with_capacity(rows.len()),
        gamma_total: Vec::with_capacity(rows.len()),
        t_phi_seconds: Vec::with_capacity(rows.len()),
        log_factor_used: Vec::with_capacity(rows.len()),
    };
    for row in rows {
        profile.sens_s.push(row.sens_s);
        profile.sens_d.push(row.sens_d);
        profile.gamma_s.push(row.gamma_s);
        profile.gamma_d.push(row.gamma_d);
        profile.gamma_total.push(row.gamma_total);
        profile.t_phi_seconds.push(row.t_phi);
        profile.log_factor_used.push(row.log_factor);
    }
    Ok(profile)
}
