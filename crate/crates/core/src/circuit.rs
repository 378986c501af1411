//! Circuit model: parameters, flux biases, harmonic-basis operators, and
//! Hamiltonian construction for a two-junction loop shunted by a linear
//! inductor.
//!
//! The single degree of freedom is the phase `φ` across the inductor. In
//! frequency units (GHz, i.e. energy over Planck's constant) the Hamiltonian
//! is
//!
//! ```text
//! H = 4 E_C n² − E_J1 cos(φ − a1) − E_J2 cos(φ − a2) + ½ E_L φ²
//! ```
//!
//! where `a1 = 2π (x1 + x2)` and `a2 = 2π x2` are phase shifts set by the two
//! loop fluxes `x1 = Φ1/Φ0`, `x2 = Φ2/Φ0`, and the junction energies derive
//! from a total `E_JΣ` and asymmetry ratio `b = E_J2/E_J1`:
//! `E_J1 = E_JΣ/(1+b)`, `E_J2 = E_JΣ·b/(1+b)`.
//!
//! Matrices are built in the harmonic-oscillator eigenbasis of the linear
//! part (`dim` lowest number states). The two cosine terms can be folded
//! into a single effective junction with flux-dependent strength and phase
//! offset; both constructions are provided and must agree level by level.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Circuit energies (GHz) and the two dimensionless ratios that fix the
/// junction split and the flux-bias tie.
///
/// * `b` — junction asymmetry, `E_J2/E_J1 ≥ 0` (0 disables the second
///   junction, leaving a single-junction inductively shunted qubit).
/// * `r` — bias-line tie ratio: the constrained bias locks `Φ1 = r Φ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    ec_ghz: f64,
    el_ghz: f64,
    ej_sum_ghz: f64,
    b: f64,
    r: f64,
}

impl CircuitParams {
    /// Validates and stores the circuit parameters.
    ///
    /// Requirements: `ec_ghz > 0`, `el_ghz > 0`, `ej_sum_ghz ≥ 0`,
    /// `b ≥ 0`, `r ≥ 0`, all finite.
    pub fn new(ec_ghz: f64, el_ghz: f64, ej_sum_ghz: f64, b: f64, r: f64) -> Result<Self> {
        let all = [ec_ghz, el_ghz, ej_sum_ghz, b, r];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "circuit parameters must be finite".into(),
            ));
        }
        if ec_ghz <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "charging energy must be positive, got {ec_ghz} GHz"
            )));
        }
        if el_ghz <= 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "inductive energy must be positive, got {el_ghz} GHz"
            )));
        }
        if ej_sum_ghz < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "total junction energy must be non-negative, got {ej_sum_ghz} GHz"
            )));
        }
        if b < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "junction asymmetry must be non-negative, got {b}"
            )));
        }
        if r < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "bias tie ratio must be non-negative, got {r}"
            )));
        }
        Ok(Self {
            ec_ghz,
            el_ghz,
            ej_sum_ghz,
            b,
            r,
        })
    }

    /// Charging energy `E_C` in GHz.
    pub fn ec_ghz(&self) -> f64 {
        self.ec_ghz
    }

    /// Inductive energy `E_L` in GHz.
    pub fn el_ghz(&self) -> f64 {
        self.el_ghz
    }

    /// Total junction energy `E_JΣ = E_J1 + E_J2` in GHz.
    pub fn ej_sum_ghz(&self) -> f64 {
        self.ej_sum_ghz
    }

    /// Junction asymmetry `b = E_J2/E_J1`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Bias tie ratio `r` (`Φ1 = r Φ2` on the constrained line).
    pub fn r(&self) -> f64 {
        self.r
    }

    /// First junction energy `E_J1 = E_JΣ/(1+b)` in GHz.
    pub fn ej1_ghz(&self) -> f64 {
        self.ej_sum_ghz / (1.0 + self.b)
    }

    /// Second junction energy `E_J2 = E_JΣ·b/(1+b)` in GHz.
    pub fn ej2_ghz(&self) -> f64 {
        self.ej_sum_ghz * self.b / (1.0 + self.b)
    }

    /// Tie slope in mode coordinates: on the constrained line the
    /// differential flux follows the common flux as `Φd = β Φs` with
    /// `β = (r−1)/(r+1)`.
    pub fn beta(&self) -> f64 {
        (self.r - 1.0) / (self.r + 1.0)
    }

    /// Zero-point phase spread of the linear part,
    /// `φ_zpf = (2 E_C / E_L)^{1/4}`.
    pub fn phi_zpf(&self) -> f64 {
        (2.0 * self.ec_ghz / self.el_ghz).powf(0.25)
    }

    /// Zero-point charge spread, `n_zpf = 1/(2 φ_zpf)`.
    pub fn n_zpf(&self) -> f64 {
        0.5 / self.phi_zpf()
    }
}

/// A flux working point, both loop fluxes in units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxBias {
    phi1: f64,
    phi2: f64,
}

impl FluxBias {
    /// An arbitrary (unconstrained) bias point. Both values must be finite.
    pub fn new(phi1_over_phi0: f64, phi2_over_phi0: f64) -> Result<Self> {
        if !phi1_over_phi0.is_finite() || !phi2_over_phi0.is_finite() {
            return Err(CoreError::InvalidParameter(
                "flux biases must be finite".into(),
            ));
        }
        Ok(Self {
            phi1: phi1_over_phi0,
            phi2: phi2_over_phi0,
        })
    }

    /// The bias on the tied line `Φ1 = r Φ2`, parameterized by `Φ2`.
    pub fn constrained(r: f64, phi2_over_phi0: f64) -> Self {
        Self {
            phi1: r * phi2_over_phi0,
            phi2: phi2_over_phi0,
        }
    }

    /// Builds a bias from mode coordinates: `Φ1 = (Φs+Φd)/2`,
    /// `Φ2 = (Φs−Φd)/2`.
    pub fn from_modes(phi_s_over_phi0: f64, phi_d_over_phi0: f64) -> Self {
        Self {
            phi1: 0.5 * (phi_s_over_phi0 + phi_d_over_phi0),
            phi2: 0.5 * (phi_s_over_phi0 - phi_d_over_phi0),
        }
    }

    /// First loop flux `Φ1/Φ0`.
    pub fn phi1_over_phi0(&self) -> f64 {
        self.phi1
    }

    /// Second loop flux `Φ2/Φ0`.
    pub fn phi2_over_phi0(&self) -> f64 {
        self.phi2
    }

    /// Common-mode flux `Φs = Φ1 + Φ2` in units of `Φ0`.
    pub fn phi_s_over_phi0(&self) -> f64 {
        self.phi1 + self.phi2
    }

    /// Differential flux `Φd = Φ1 − Φ2` in units of `Φ0`.
    pub fn phi_d_over_phi0(&self) -> f64 {
        self.phi1 - self.phi2
    }

    /// Phase shift of the first cosine, `a1 = 2π (x1 + x2)` in radians.
    pub fn a1_rad(&self) -> f64 {
        2.0 * std::f64::consts::PI * (self.phi1 + self.phi2)
    }

    /// Phase shift of the second cosine, `a2 = 2π x2` in radians.
    pub fn a2_rad(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.phi2
    }
}

/// Phase and charge operators truncated to the lowest `dim` number states
/// of the linear (LC) part of the circuit.
#[derive(Debug, Clone)]
pub struct FockOperators {
    /// Basis size.
    pub dim: usize,
    /// Zero-point phase spread used in the construction.
    pub phi_zpf: f64,
    /// Zero-point charge spread (`phi_zpf · n_zpf = 1/2`).
    pub n_zpf: f64,
    /// Phase operator `φ = φ_zpf (a + a†)`; real symmetric tridiagonal.
    pub phi: DMatrix<f64>,
    /// Charge operator `n = i n_zpf (a† − a)`; Hermitian, purely imaginary
    /// off-diagonal.
    pub n: DMatrix<Complex64>,
}

/// Builds the truncated phase and charge operators for `params`.
///
/// Requires `dim ≥ 2`.
pub fn make_fock_operators(params: &CircuitParams, dim: usize) -> Result<FockOperators> {
    if dim < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "basis size must be at least 2, got {dim}"
        )));
    }
    let phi_zpf = params.phi_zpf();
    let n_zpf = params.n_zpf();
    let mut phi = DMatrix::<f64>::zeros(dim, dim);
    let mut n = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim - 1 {
        let root = ((j + 1) as f64).sqrt();
        phi[(j, j + 1)] = phi_zpf * root;
        phi[(j + 1, j)] = phi_zpf * root;
        // n = i n_zpf (a† − a): the (j+1, j) element of a† is √(j+1).
        n[(j + 1, j)] = Complex64::new(0.0, n_zpf * root);
        n[(j, j + 1)] = Complex64::new(0.0, -n_zpf * root);
    }
    Ok(FockOperators {
        dim,
        phi_zpf,
        n_zpf,
        phi,
        n,
    })
}

/// The quadratic part `4 E_C n² + ½ E_L φ²` in the number basis.
///
/// With the zero-point spreads chosen for the same `E_C`, `E_L`, both the
/// diagonal contributions are equal and the `(k, k+2)` terms cancel, so the
/// matrix is exactly diagonal with spacing `√(8 E_C E_L)`; the general
/// pentadiagonal expression is kept so mismatched spreads would still be
/// represented correctly.
fn quadratic_part(params: &CircuitParams, dim: usize) -> DMatrix<f64> {
    let phi_zpf = params.phi_zpf();
    let n_zpf = params.n_zpf();
    let kin = 4.0 * params.ec_ghz() * n_zpf * n_zpf;
    let pot = 0.5 * params.el_ghz() * phi_zpf * phi_zpf;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        h[(k, k)] = (2 * k + 1) as f64 * (kin + pot);
        if k + 2 < dim {
            let root = (((k + 1) * (k + 2)) as f64).sqrt();
            h[(k, k + 2)] = (pot - kin) * root;
            h[(k + 2, k)] = h[(k, k + 2)];
        }
    }
    h
}

/// Spectral decomposition of a real symmetric matrix, or a convergence
/// error tagged with the matrix size.
fn symmetric_eigen(m: DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let n = m.nrows();
    SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or(CoreError::EigenSolveFailed { n })
}

/// Applies a scalar function of the phase operator via its spectral
/// decomposition: returns `V f(Λ) Vᵀ` where `φ = V Λ Vᵀ`.
fn phase_function_matrix(
    params: &CircuitParams,
    dim: usize,
    f: impl Fn(f64) -> f64,
) -> Result<DMatrix<f64>> {
    let ops = make_fock_operators(params, dim)?;
    let eig = symmetric_eigen(ops.phi)?;
    let v = eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let w = f(*lam);
        scaled.column_mut(j).scale_mut(w);
    }
    Ok(&scaled * v.transpose())
}

/// Symmetrizes in place, `H ← (H + Hᵀ)/2`, absorbing rounding asymmetry
/// from the spectral reconstruction.
fn symmetrize(h: &mut DMatrix<f64>) {
    let ht = h.transpose();
    *h += ht;
    *h *= 0.5;
}

/// Builds the full Hamiltonian with both cosine terms,
/// `H = 4 E_C n² − E_J1 cos(φ − a1) − E_J2 cos(φ − a2) + ½ E_L φ²`,
/// in the number basis (GHz). Requires `dim ≥ 2`.
pub fn build_hamiltonian(
    params: &CircuitParams,
    flux: &FluxBias,
    dim: usize,
) -> Result<DMatrix<f64>> {
    let a1 = flux.a1_rad();
    let a2 = flux.a2_rad();
    let ej1 = params.ej1_ghz();
    let ej2 = params.ej2_ghz();
    let mut h = quadratic_part(params, dim);
    h += phase_function_matrix(params, dim, |phi| {
        -ej1 * (phi - a1).cos() - ej2 * (phi - a2).cos()
    })?;
    symmetrize(&mut h);
    Ok(h)
}

/// Combined junction amplitude as a complex number:
/// `E_J1 e^{i a1} + E_J2 e^{i a2}`. Its magnitude is the effective junction
/// energy and its argument the effective phase offset.
fn combined_junction(params: &CircuitParams, flux: &FluxBias) -> Complex64 {
    let z1 = Complex64::from_polar(params.ej1_ghz(), flux.a1_rad());
    let z2 = Complex64::from_polar(params.ej2_ghz(), flux.a2_rad());
    z1 + z2
}

/// Effective junction energy at an arbitrary bias (GHz):
/// `|E_J1 e^{i a1} + E_J2 e^{i a2}|`.
pub fn effective_josephson_energy_at(params: &CircuitParams, flux: &FluxBias) -> f64 {
    combined_junction(params, flux).norm()
}

/// Effective phase offset at an arbitrary bias, in radians in `(−π, π]`:
/// `arg(E_J1 e^{i a1} + E_J2 e^{i a2})`.
pub fn effective_phase_offset_at(params: &CircuitParams, flux: &FluxBias) -> f64 {
    combined_junction(params, flux).arg()
}

/// Effective junction energy on the tied bias line `Φ1 = r Φ2` (GHz).
///
/// Closed form: `E_JΣ/(1+b) · √(1 + b² + 2b cos(2π r x2))`.
pub fn effective_josephson_energy(params: &CircuitParams, phi2_over_phi0: f64) -> f64 {
    effective_josephson_energy_at(
        params,
        &FluxBias::constrained(params.r(), phi2_over_phi0),
    )
}

/// Effective phase offset on the tied bias line `Φ1 = r Φ2`, radians in
/// `(−π, π]`.
pub fn effective_phase_offset(params: &CircuitParams, phi2_over_phi0: f64) -> f64 {
    effective_phase_offset_at(
        params,
        &FluxBias::constrained(params.r(), phi2_over_phi0),
    )
}

/// Builds the single-cosine form
/// `H = 4 E_C n² − E_eff(x2) cos(φ − φ_off(x2)) + ½ E_L φ²`
/// on the tied bias line. Spectrally identical to [`build_hamiltonian`]
/// at the constrained bias (the two cosines sum to one shifted cosine).
pub fn build_effective_hamiltonian(
    params: &CircuitParams,
    phi2_over_phi0: f64,
    dim: usize,
) -> Result<DMatrix<f64>> {
    let flux = FluxBias::constrained(params.r(), phi2_over_phi0);
    let e_eff = effective_josephson_energy_at(params, &flux);
    let offset = effective_phase_offset_at(params, &flux);
    let mut h = quadratic_part(params, dim);
    h += phase_function_matrix(params, dim, |phi| -e_eff * (phi - offset).cos())?;
    symmetrize(&mut h);
    Ok(h)
}

/// Lowest `k` eigenvalues of a real symmetric matrix, ascending (GHz).
pub fn lowest_eigenvalues(h: &DMatrix<f64>, k: usize) -> Result<Vec<f64>> {
    let n = h.nrows();
    if k == 0 || k > n {
        return Err(CoreError::InvalidParameter(format!(
            "requested {k} eigenvalues from a {n}x{n} matrix"
        )));
    }
    let eig = symmetric_eigen(h.clone())?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    vals.truncate(k);
    Ok(vals)
}
