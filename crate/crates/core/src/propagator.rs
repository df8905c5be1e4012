//! Exact unitary evolution U(z) = e^{-iHz} of Hermitian networks, intensity
//! traces, the closed-form lossy-dimer propagator, decay-rate fitting and
//! transfer-length extraction.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::chain::ChainHamiltonian;
use crate::error::{Error, Result};
use crate::network::{DimerSpec, NetworkHamiltonian};
use crate::spectrum::SpectralDecomp;

/// Transfer matrix U(z) mapping input-mode creation operators to outputs.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub u: DMatrix<Complex64>,
    /// Propagation distance, cm.
    pub z: f64,
    /// Hash of the generating Hamiltonian, for provenance checks.
    pub source_hash: u64,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }
}

/// Per-site intensities |u_{n,in}(z)|² sampled on a distance grid.
#[derive(Debug, Clone)]
pub struct IntensityTrace {
    pub z_grid: Vec<f64>,
    /// `intensities[iz][site]`.
    pub intensities: Vec<Vec<f64>>,
}

impl IntensityTrace {
    pub fn num_sites(&self) -> usize {
        self.intensities.first().map_or(0, Vec::len)
    }

    pub fn site(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        self.intensities.iter().map(move |row| row[n])
    }
}

/// Result of a log-linear decay fit.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Amplitude decay rate, cm⁻¹ (intensity slope is -2γ).
    pub gamma: f64,
    pub window: (f64, f64),
    /// RMS residual of ln I about the fitted line.
    pub rms_residual: f64,
}

/// FNV-1a over the matrix entries, used to tag transfer matrices with the
/// Hamiltonian that generated them.
fn hash_matrix(m: &DMatrix<f64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for x in m.iter() {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Cached eigendecomposition of one Hamiltonian, serving any number of
/// propagation distances. Tridiagonal networks take the dedicated
/// symmetric-tridiagonal eigensolver.
#[derive(Debug, Clone)]
pub struct Propagator {
    decomp: SpectralDecomp,
    source_hash: u64,
}

impl Propagator {
    pub fn new(h: &NetworkHamiltonian) -> Self {
        Self {
            decomp: SpectralDecomp::of_network(h),
            source_hash: hash_matrix(h.matrix()),
        }
    }

    pub fn from_chain(chain: &ChainHamiltonian) -> Self {
        Self {
            decomp: SpectralDecomp::of_chain(chain),
            source_hash: hash_matrix(&chain.to_dense()),
        }
    }

    pub fn dim(&self) -> usize {
        self.decomp.dim()
    }

    pub fn decomp(&self) -> &SpectralDecomp {
        &self.decomp
    }

    pub fn transfer_matrix(&self, z: f64) -> Result<TransferMatrix> {
        if z.is_nan() || z < 0.0 {
            return Err(Error::invalid(format!("z must be non-negative, got {z}")));
        }
        Ok(TransferMatrix {
            u: self.decomp.unitary(z),
            z,
            source_hash: self.source_hash,
        })
    }

    /// Intensity of every site over a strictly increasing z grid, for a
    /// single excited input site.
    pub fn site_intensities(&self, input_site: usize, z_grid: &[f64]) -> Result<IntensityTrace> {
        validate_grid(z_grid)?;
        if input_site >= self.dim() {
            return Err(Error::invalid(format!(
                "input site {input_site} out of range for dim {}",
                self.dim()
            )));
        }
        let mut intensities = Vec::with_capacity(z_grid.len());
        for &z in z_grid {
            let psi = self.decomp.evolve_basis_state(input_site, z)?;
            intensities.push(psi.iter().map(|a| a.norm_sqr()).collect());
        }
        Ok(IntensityTrace { z_grid: z_grid.to_vec(), intensities })
    }
}

fn validate_grid(z_grid: &[f64]) -> Result<()> {
    if z_grid.is_empty() {
        return Err(Error::invalid("empty z grid"));
    }
    if z_grid[0] < 0.0 {
        return Err(Error::invalid("z grid must start at z >= 0"));
    }
    if z_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("z grid must be strictly increasing"));
    }
    Ok(())
}

/// Uniform grid 0, step, 2·step, …, round(z_max/step)·step.
pub fn uniform_grid(z_max: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || !z_max.is_finite() || z_max <= 0.0 {
        return Err(Error::invalid("z_max and step must be positive"));
    }
    let n = (z_max / step).round() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// U(z) for a network Hamiltonian (one-shot; use [`Propagator`] for sweeps).
pub fn transfer_matrix(h: &NetworkHamiltonian, z: f64) -> Result<TransferMatrix> {
    Propagator::new(h).transfer_matrix(z)
}

/// Site intensities for a network Hamiltonian (one-shot).
pub fn site_intensities(
    h: &NetworkHamiltonian,
    input_site: usize,
    z_grid: &[f64],
) -> Result<IntensityTrace> {
    Propagator::new(h).site_intensities(input_site, z_grid)
}

/// Closed-form propagator G(z) = e^{-iH_eff z} of the lossy dimer with
/// H_eff = [[0, J0], [J0, -iγ]]. Writing H_eff = -i(γ/2)·I + A with
/// A² = (J0² - γ²/4)·I, the exponential is a global e^{-γz/2} envelope times
/// cos/sin (γ < 2J0), cosh/sinh (γ > 2J0) or linear (exceptional point)
/// factors.
pub fn dimer_propagator(spec: &DimerSpec, z: f64) -> Result<Matrix2<Complex64>> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::invalid(format!("z must be non-negative, got {z}")));
    }
    let j0 = spec.coupling;
    let g2 = spec.gamma / 2.0;
    let w2 = j0 * j0 - g2 * g2;
    // c = cos(Ωz), s = sin(Ωz)/Ω continued through Ω² <= 0.
    let (c, s) = if w2 > 0.0 {
        let w = w2.sqrt();
        ((w * z).cos(), (w * z).sin() / w)
    } else if w2 < 0.0 {
        let w = (-w2).sqrt();
        ((w * z).cosh(), (w * z).sinh() / w)
    } else {
        (1.0, z)
    };
    let env = (-g2 * z).exp();
    let i = Complex64::i();
    // G = env · (c·I - i·s·A), A = [[i γ/2, J0], [J0, -i γ/2]]
    let diag_a = Complex64::new(c + g2 * s, 0.0) * env;
    let diag_b = Complex64::new(c - g2 * s, 0.0) * env;
    let off = -i * (j0 * s * env);
    Ok(Matrix2::new(diag_a, off, off, diag_b))
}

/// Raw two-site intensity trace |G(z) e_excited|² of the closed-form dimer.
pub fn dimer_intensity_trace(
    spec: &DimerSpec,
    excited_site: usize,
    z_grid: &[f64],
) -> Result<IntensityTrace> {
    validate_grid(z_grid)?;
    if excited_site > 1 {
        return Err(Error::invalid("dimer sites are 0 (neutral) and 1 (lossy)"));
    }
    let mut intensities = Vec::with_capacity(z_grid.len());
    for &z in z_grid {
        let g = dimer_propagator(spec, z)?;
        intensities.push(vec![
            g[(0, excited_site)].norm_sqr(),
            g[(1, excited_site)].norm_sqr(),
        ]);
    }
    Ok(IntensityTrace { z_grid: z_grid.to_vec(), intensities })
}

/// Least-squares line through (z, ln I) inside the window; the amplitude
/// rate is minus half the intensity slope.
pub fn fit_decay(trace: &IntensityTrace, site: usize, window: (f64, f64)) -> Result<DecayFit> {
    if site >= trace.num_sites() {
        return Err(Error::invalid(format!("site {site} out of range")));
    }
    if window.0.is_nan() || window.1.is_nan() || window.0 >= window.1 {
        return Err(Error::invalid("fit window must satisfy z_min < z_max"));
    }
    let mut zs = Vec::new();
    let mut ys = Vec::new();
    for (iz, &z) in trace.z_grid.iter().enumerate() {
        if z < window.0 || z > window.1 {
            continue;
        }
        let intensity = trace.intensities[iz][site];
        if intensity <= 0.0 {
            return Err(Error::invalid(format!(
                "non-positive intensity {intensity} at z = {z}"
            )));
        }
        zs.push(z);
        ys.push(intensity.ln());
    }
    if zs.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 samples inside the window, got {}",
            zs.len()
        )));
    }
    let n = zs.len() as f64;
    let mz = zs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = zs.iter().map(|z| (z - mz) * (z - mz)).sum();
    let sxy: f64 = zs.iter().zip(&ys).map(|(z, y)| (z - mz) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mz;
    let rms = (zs
        .iter()
        .zip(&ys)
        .map(|(z, y)| {
            let r = y - (intercept + slope * z);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let gamma = -slope / 2.0;
    if gamma < 0.0 {
        return Err(Error::numerical(format!(
            "intensity grows over the window (gamma = {gamma:.4}); not a decay regime"
        )));
    }
    Ok(DecayFit { gamma, window, rms_residual: rms })
}

/// z of the first interior local maximum of `ys`, refined by fitting a
/// parabola through the three points around the discrete peak.
pub(crate) fn first_peak(zs: &[f64], ys: &[f64]) -> Option<f64> {
    for i in 1..ys.len().saturating_sub(1) {
        if ys[i - 1] < ys[i] && ys[i] >= ys[i + 1] {
            let denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
            if denom >= 0.0 {
                return Some(zs[i]);
            }
            let offset = 0.5 * (ys[i - 1] - ys[i + 1]) / denom;
            let step = 0.5 * (zs[i + 1] - zs[i - 1]);
            return Some(zs[i] + offset * step);
        }
    }
    None
}

/// Propagation distance of the first local maximum of the target site's
/// intensity. With `normalize_over = Some(sites)` the intensity is first
/// divided, at each z, by the total over those sites (post-selection onto a
/// subsystem).
pub fn transfer_length(
    trace: &IntensityTrace,
    target_site: usize,
    normalize_over: Option<&[usize]>,
) -> Result<f64> {
    if target_site >= trace.num_sites() {
        return Err(Error::invalid(format!("site {target_site} out of range")));
    }
    if let Some(sites) = normalize_over {
        if sites.iter().any(|&s| s >= trace.num_sites()) {
            return Err(Error::invalid("normalization site out of range"));
        }
        if !sites.contains(&target_site) {
            return Err(Error::invalid("target site must belong to the normalization set"));
        }
    }
    let ys: Vec<f64> = trace
        .intensities
        .iter()
        .map(|row| {
            let y = row[target_site];
            match normalize_over {
                Some(sites) => {
                    let total: f64 = sites.iter().map(|&s| row[s]).sum();
                    y / total
                }
                None => y,
            }
        })
        .collect();
    first_peak(&trace.z_grid, &ys)
        .ok_or_else(|| Error::invalid("no interior maximum in the trace range"))
}
