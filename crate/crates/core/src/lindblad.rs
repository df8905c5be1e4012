//! Independent validation path: integrate the Lindblad master equation for
//! the lossy dimer on the truncated two-mode Fock space and expose the
//! populations for comparison against post-selected network simulations.
//!
//! The generator is ∂_z ρ = -i(H_eff ρ - ρ H_eff†) + 2γ a_B ρ a_B† with
//! H_eff = J0 (a_A† a_B + a_B† a_A) - iγ a_B† a_B. The -iγ n_B inside H_eff
//! supplies the anticommutator half of the dissipator, so the full map is
//! trace-preserving with the 2γ jump coefficient; this pairing is verified
//! numerically by the trace tests rather than assumed.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::DimerSpec;

/// Ordered two-mode Fock configurations with at most `n_max` photons total,
/// sorted by (total, occupation of mode A descending):
/// n_max = 2 gives |00⟩, |10⟩, |01⟩, |20⟩, |11⟩, |02⟩.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    configs: Vec<(u32, u32)>,
}

impl FockBasis {
    pub fn two_mode(n_max: u32) -> Self {
        let mut configs = Vec::new();
        for total in 0..=n_max {
            for na in (0..=total).rev() {
                configs.push((na, total - na));
            }
        }
        Self { configs }
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[(u32, u32)] {
        &self.configs
    }

    pub fn index_of(&self, config: (u32, u32)) -> Option<usize> {
        self.configs.iter().position(|&c| c == config)
    }

    pub fn labels(&self) -> Vec<String> {
        self.configs.iter().map(|(a, b)| format!("P_{a}{b}")).collect()
    }

    /// Annihilation operator for mode 0 (A) or 1 (B) on this basis.
    fn lowering(&self, mode: usize) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (col, &(na, nb)) in self.configs.iter().enumerate() {
            let (occ, target) = if mode == 0 {
                (na, na.checked_sub(1).map(|x| (x, nb)))
            } else {
                (nb, nb.checked_sub(1).map(|x| (na, x)))
            };
            if let Some(t) = target {
                if let Some(row) = self.index_of(t) {
                    m[(row, col)] = Complex64::new((occ as f64).sqrt(), 0.0);
                }
            }
        }
        m
    }
}

/// Second-quantized operators of the lossy dimer on a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct DimerGenerators {
    pub basis: FockBasis,
    pub a_neutral: DMatrix<Complex64>,
    pub a_lossy: DMatrix<Complex64>,
    /// H_eff = J0 (a_A† a_B + a_B† a_A) - iγ a_B† a_B (non-Hermitian for γ > 0).
    pub h_eff: DMatrix<Complex64>,
    gamma: f64,
}

impl DimerGenerators {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

pub fn build_generators(spec: &DimerSpec, basis: &FockBasis) -> DimerGenerators {
    let a_n = basis.lowering(0);
    let a_l = basis.lowering(1);
    let j0 = Complex64::new(spec.coupling, 0.0);
    let hop = a_n.adjoint() * &a_l + a_l.adjoint() * &a_n;
    let n_lossy = a_l.adjoint() * &a_l;
    let h_eff = hop * j0 - n_lossy * Complex64::new(0.0, spec.gamma);
    DimerGenerators {
        basis: basis.clone(),
        a_neutral: a_n,
        a_lossy: a_l,
        h_eff,
        gamma: spec.gamma,
    }
}

/// Right-hand side of the master equation; the jump term involves only the
/// lossy mode.
pub fn lindblad_rhs(rho: &DMatrix<Complex64>, gen: &DimerGenerators) -> DMatrix<Complex64> {
    let i = Complex64::i();
    let h = &gen.h_eff;
    let coherent = (h * rho - rho * h.adjoint()) * (-i);
    let jump = (&gen.a_lossy * rho * gen.a_lossy.adjoint())
        * Complex64::new(2.0 * gen.gamma, 0.0);
    coherent + jump
}

/// Density matrix on a [`FockBasis`] at propagation distance `z`.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    pub rho: DMatrix<Complex64>,
    pub z: f64,
}

impl FockDensityMatrix {
    /// Pure Fock state |config⟩⟨config| at z = 0.
    pub fn pure(basis: &FockBasis, config: (u32, u32)) -> Result<Self> {
        let idx = basis
            .index_of(config)
            .ok_or_else(|| Error::invalid(format!("state {config:?} outside basis")))?;
        let mut rho = DMatrix::zeros(basis.dim(), basis.dim());
        rho[(idx, idx)] = Complex64::new(1.0, 0.0);
        Ok(Self { rho, z: 0.0 })
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re).collect()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let delta = &self.rho - self.rho.adjoint();
        delta.iter().fold(0.0f64, |a, x| a.max(x.norm()))
    }

    /// Smallest eigenvalue, computed through the real symmetric embedding
    /// [[X, -Y], [Y, X]] of the Hermitian matrix X + iY.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.rho.nrows();
        let mut em = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let x = self.rho[(i, j)].re;
                let y = self.rho[(i, j)].im;
                em[(i, j)] = x;
                em[(n + i, n + j)] = x;
                em[(i, n + j)] = -y;
                em[(n + i, j)] = y;
            }
        }
        crate::spectrum::SpectralDecomp::of_dense(&em).eigenvalues()[0]
    }
}

/// Diagonal populations recorded along the integration grid.
#[derive(Debug, Clone)]
pub struct PopulationTrace {
    pub z_grid: Vec<f64>,
    /// `populations[iz][basis_state]`.
    pub populations: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

/// Integrate the master equation with a classical fixed-step fourth-order
/// scheme, sampling the density matrix at every point of `z_grid` (each
/// interval is subdivided into steps of at most `step`). Aborts if the
/// trace drifts by more than 1e-6, which indicates the step is too large.
pub fn integrate(
    rho0: &FockDensityMatrix,
    gen: &DimerGenerators,
    z_grid: &[f64],
    step: f64,
) -> Result<(FockDensityMatrix, PopulationTrace)> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::invalid("integration step must be positive"));
    }
    if z_grid.is_empty() || z_grid[0] < rho0.z || z_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("z grid must be increasing and start at or after rho0.z"));
    }
    let mut rho = rho0.rho.clone();
    let mut z = rho0.z;
    let mut populations = Vec::with_capacity(z_grid.len());
    for &z_target in z_grid {
        let span = z_target - z;
        if span > 0.0 {
            let substeps = (span / step).ceil() as usize;
            let h = span / substeps as f64;
            for _ in 0..substeps {
                rho = rk4_step(&rho, gen, h);
            }
            z = z_target;
        }
        let tr = rho.trace().re;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::numerical(format!(
                "trace drifted to {tr} at z = {z_target}; reduce the integration step"
            )));
        }
        populations.push((0..rho.nrows()).map(|i| rho[(i, i)].re).collect());
    }
    let final_state = FockDensityMatrix { rho, z };
    let trace = PopulationTrace {
        z_grid: z_grid.to_vec(),
        populations,
        labels: gen.basis.labels(),
    };
    Ok((final_state, trace))
}

fn rk4_step(
    rho: &DMatrix<Complex64>,
    gen: &DimerGenerators,
    h: f64,
) -> DMatrix<Complex64> {
    let half = h / 2.0;
    let k1 = lindblad_rhs(rho, gen);
    let k2 = lindblad_rhs(&(rho + &k1 * Complex64::new(half, 0.0)), gen);
    let k3 = lindblad_rhs(&(rho + &k2 * Complex64::new(half, 0.0)), gen);
    let k4 = lindblad_rhs(&(rho + &k3 * Complex64::new(h, 0.0)), gen);
    rho + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
        * Complex64::new(h / 6.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::dimer_propagator;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn basis() -> FockBasis {
        FockBasis::two_mode(2)
    }

    #[test]
    fn basis_ordering_matches_convention() {
        let b = basis();
        assert_eq!(b.dim(), 6);
        assert_eq!(
            b.configs(),
            &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        );
    }

    #[test]
    fn lowering_operator_matrix_elements() {
        let b = basis();
        let gen = build_generators(&DimerSpec::new(0.3, 0.25).unwrap(), &b);
        // a_B |02> = sqrt(2) |01>
        let col = b.index_of((0, 2)).unwrap();
        let row = b.index_of((0, 1)).unwrap();
        assert_abs_diff_eq!(gen.a_lossy[(row, col)].re, 2.0f64.sqrt(), epsilon = 1e-15);
        // <11| H_eff |20> = sqrt(2) J0
        let r = b.index_of((1, 1)).unwrap();
        let c = b.index_of((2, 0)).unwrap();
        assert_abs_diff_eq!(gen.h_eff[(r, c)].re, 2.0f64.sqrt() * 0.3, epsilon = 1e-15);
    }

    #[test]
    fn h_eff_is_hermitian_without_loss() {
        let gen = build_generators(&DimerSpec::new(0.3, 0.0).unwrap(), &basis());
        let delta = &gen.h_eff - gen.h_eff.adjoint();
        assert!(delta.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn vacuum_is_fixed_point() {
        let gen = build_generators(&DimerSpec::new(0.3, 0.25).unwrap(), &basis());
        let rho = FockDensityMatrix::pure(&basis(), (0, 0)).unwrap();
        let rhs = lindblad_rhs(&rho.rho, &gen);
        assert!(rhs.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn single_mode_decay_balance() {
        // With J0 -> 0 and rho = |01><01|: dP01/dz = -2 gamma, dP00/dz = +2 gamma.
        let gamma = 0.25;
        let gen = build_generators(&DimerSpec::new(1e-300, gamma).unwrap(), &basis());
        let rho = FockDensityMatrix::pure(&basis(), (0, 1)).unwrap();
        let rhs = lindblad_rhs(&rho.rho, &gen);
        let i01 = basis().index_of((0, 1)).unwrap();
        let i00 = basis().index_of((0, 0)).unwrap();
        assert_abs_diff_eq!(rhs[(i01, i01)].re, -2.0 * gamma, epsilon = 1e-12);
        assert_abs_diff_eq!(rhs[(i00, i00)].re, 2.0 * gamma, epsilon = 1e-12);
    }

    #[test]
    fn rhs_is_traceless_for_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = basis();
        let gen = build_generators(&DimerSpec::new(0.3, 0.25).unwrap(), &b);
        for _ in 0..5 {
            // Random Hermitian PSD trace-one density matrix: rho = C C† / tr.
            let c = DMatrix::from_fn(6, 6, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let mut rho = &c * c.adjoint();
            let tr = rho.trace();
            rho /= tr;
            let rhs = lindblad_rhs(&rho, &gen);
            assert!(rhs.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn unitary_limit_matches_coupler() {
        // gamma = 0: one photon oscillates like the Hermitian coupler.
        let b = basis();
        let gen = build_generators(&DimerSpec::new(0.3, 0.0).unwrap(), &b);
        let rho0 = FockDensityMatrix::pure(&b, (1, 0)).unwrap();
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let (_, trace) = integrate(&rho0, &gen, &grid, 1e-3).unwrap();
        let i10 = b.index_of((1, 0)).unwrap();
        let i01 = b.index_of((0, 1)).unwrap();
        for (iz, &z) in grid.iter().enumerate() {
            let g = dimer_propagator(&DimerSpec::new(0.3, 0.0).unwrap(), z).unwrap();
            assert_abs_diff_eq!(
                trace.populations[iz][i10],
                g[(0, 0)].norm_sqr(),
                epsilon = 1e-8
            );
            assert_abs_diff_eq!(
                trace.populations[iz][i01],
                g[(1, 0)].norm_sqr(),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn no_jump_sector_follows_effective_propagator() {
        // The two-photon block only loses amplitude downward, so its
        // renormalized populations follow G(z) = e^{-i H_eff z} exactly.
        let b = basis();
        let spec = DimerSpec::new(0.3, 0.25).unwrap();
        let gen = build_generators(&spec, &b);
        let rho0 = FockDensityMatrix::pure(&b, (2, 0)).unwrap();
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let (_, trace) = integrate(&rho0, &gen, &grid, 1e-3).unwrap();
        for (iz, &z) in grid.iter().enumerate() {
            let g = dimer_propagator(&spec, z).unwrap();
            let a = g[(0, 0)];
            let bb = g[(1, 0)];
            let raw = [
                (a * a).norm_sqr(),
                2.0 * (a * bb).norm_sqr(),
                (bb * bb).norm_sqr(),
            ];
            let total: f64 = raw.iter().sum();
            let top: Vec<f64> = trace.populations[iz][3..6].to_vec();
            let top_total: f64 = top.iter().sum();
            for k in 0..3 {
                assert_abs_diff_eq!(top[k] / top_total, raw[k] / total, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn photons_drain_through_lossy_mode() {
        // |11> at long distance: every mode-B-occupied state empties.
        let b = basis();
        let gen = build_generators(&DimerSpec::new(0.3, 0.25).unwrap(), &b);
        let rho0 = FockDensityMatrix::pure(&b, (1, 1)).unwrap();
        let (state, _) = integrate(&rho0, &gen, &[100.0], 1e-2).unwrap();
        let pops = state.populations();
        let p_b_occupied: f64 = b
            .configs()
            .iter()
            .zip(&pops)
            .filter(|((_, nb), _)| *nb > 0)
            .map(|(_, &p)| p)
            .sum();
        assert!(p_b_occupied < 1e-4, "P(B occupied) = {p_b_occupied}");
        assert!((state.trace().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn trace_hermiticity_positivity_preserved() {
        let b = basis();
        let gen = build_generators(&DimerSpec::new(0.3, 0.25).unwrap(), &b);
        let rho0 = FockDensityMatrix::pure(&b, (2, 0)).unwrap();
        let grid: Vec<f64> = (1..=25).map(|i| i as f64).collect();
        let (_, trace) = integrate(&rho0, &gen, &grid, 1e-3).unwrap();
        let mut rho = rho0.clone();
        for &z in &grid {
            let (state, _) = integrate(&rho, &gen, &[z], 1e-3).unwrap();
            rho = state;
            assert!((rho.trace().re - 1.0).abs() < 1e-8);
            assert!(rho.hermiticity_error() < 1e-10);
            assert!(rho.min_eigenvalue() > -1e-9);
        }
        drop(trace);
    }

    #[test]
    fn oversized_step_aborts_with_diagnostic() {
        let b = basis();
        let gen = build_generators(&DimerSpec::new(3.0, 2.0).unwrap(), &b);
        let rho0 = FockDensityMatrix::pure(&b, (2, 0)).unwrap();
        let err = integrate(&rho0, &gen, &[50.0], 2.0).unwrap_err();
        match err {
            Error::Numerical(msg) => assert!(msg.contains("step")),
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn integrate_validates_grid() {
        let b = basis();
        let gen = build_generators(&DimerSpec::new(0.3, 0.25).unwrap(), &b);
        let rho0 = FockDensityMatrix::pure(&b, (2, 0)).unwrap();
        assert!(integrate(&rho0, &gen, &[], 1e-3).is_err());
        assert!(integrate(&rho0, &gen, &[1.0, 1.0], 1e-3).is_err());
        assert!(integrate(&rho0, &gen, &[1.0], 0.0).is_err());
    }
}
