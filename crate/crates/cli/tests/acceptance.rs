//! Acceptance suite: every headline quantitative claim, one test per
//! criterion, each printing a PASS line (run with `-- --nocapture` to see
//! them). Tolerances are pinned here, not configurable.
//!
//! Shared design point: kappa = 0.11 cm^-1, delta = 0.16 cm^-1, J0 = 0.3
//! cm^-1. The bath size M is a free parameter of the synthesis (the decay
//! law, not the coupling profile, is the invariant); M = 121 keeps the
//! truncated 50-site array transparent over z <= 10 cm. Effective-model
//! comparisons use the bandwidth-corrected rate
//! gamma_eff = gamma (1 - 2 gamma / (pi W)).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bathsim::{
    attach_chain_bath, build_coupler, build_generators, build_star, dimer_propagator,
    entanglement_peak_with, evolve_two_photon_with, fit_decay, integrate, output_amplitude,
    tridiagonalize, uniform_grid, ChainHamiltonian, DimerSpec, FockBasis, FockDensityMatrix,
    NetworkHamiltonian, PhotonConfig, Propagator, SpectralDecomp, StarBathSpec, TransferMatrix,
    DEFAULT_BREAKDOWN_TOL,
};

const GAMMA_LAW: f64 = PI * 0.11 * 0.11 / 0.16; // 0.237583 cm^-1

fn pass(criterion: u32, detail: impl AsRef<str>) {
    println!("[PASS] criterion {criterion}: {}", detail.as_ref());
}

fn synthesize(kappa: f64, delta: f64, levels: usize) -> ChainHamiltonian {
    let spec = StarBathSpec::new(kappa, delta, levels).unwrap();
    let star = build_star(&spec);
    tridiagonalize(&star, 0, star.dim(), DEFAULT_BREAKDOWN_TOL)
        .unwrap()
        .chain
}

fn default_pt_system() -> (NetworkHamiltonian, StarBathSpec) {
    let spec = StarBathSpec::new(0.11, 0.16, 121).unwrap();
    let star = build_star(&spec);
    let chain = tridiagonalize(&star, 0, star.dim(), DEFAULT_BREAKDOWN_TOL)
        .unwrap()
        .chain;
    let dimer = build_coupler(0.3, (0.0, 0.0)).unwrap();
    (attach_chain_bath(&dimer, 1, &chain, 50).unwrap(), spec)
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_1_spectrum_preservation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let n = 200;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let x = rng.gen_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    let h = NetworkHamiltonian::from_matrix(m, (0..n).map(|i| format!("s{i}")).collect()).unwrap();
    let r = tridiagonalize(&h, 0, n, DEFAULT_BREAKDOWN_TOL).unwrap();
    assert_eq!(r.steps_completed, n);
    let full = SpectralDecomp::of_dense(h.matrix());
    let reduced = SpectralDecomp::of_chain(&r.chain);
    let scale = full.eigenvalues().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut worst = 0.0f64;
    for (a, b) in full.eigenvalues().iter().zip(reduced.eigenvalues()) {
        worst = worst.max((a - b).abs() / scale);
    }
    assert!(worst < 1e-8, "relative eigenvalue mismatch {worst}");

    // 3x3 star worked example: eps = (0,0,0), J = (sqrt2, 1).
    let star3 = NetworkHamiltonian::from_matrix(
        DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, -1.0]),
        vec!["S".into(), "n+1".into(), "n-1".into()],
    )
    .unwrap();
    let r3 = tridiagonalize(&star3, 0, 3, DEFAULT_BREAKDOWN_TOL).unwrap();
    for &e in r3.chain.eps() {
        assert!(e.abs() < 1e-12);
    }
    assert!((r3.chain.couplings()[0] - 2.0f64.sqrt()).abs() < 1e-12);
    assert!((r3.chain.couplings()[1] - 1.0).abs() < 1e-12);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, format!("200-site spectrum mismatch {worst:.2e} (< 1e-8), 3x3 star exact, {elapsed:?}"));
}

#[test]
fn criterion_2_decay_law() {
    let start = Instant::now();
    let grid = uniform_grid(10.0, 0.01).unwrap();
    let mut fitted = Vec::new();
    // Two baths realizing the same law gamma = pi kappa^2 / delta = 0.2376:
    // the headline (kappa, delta) at the default M, and an M = 501 synthesis
    // with the spacing scaled so the 50-site truncation stays transparent
    // over the fit window. A 501-level bath at delta = 0.16 would have
    // J_max ~ (M-1) delta / (2 sqrt3) = 23 cm^-1 and L_max ~ 3.4 cm, putting
    // the truncation revival inside the window.
    let delta_scaled = 0.016;
    let kappa_scaled = (GAMMA_LAW * delta_scaled / PI).sqrt();
    for (kappa, delta, levels) in [(0.11, 0.16, 121), (kappa_scaled, delta_scaled, 501)] {
        let chain = synthesize(kappa, delta, levels).truncated(50).unwrap();
        let trace = Propagator::from_chain(&chain)
            .site_intensities(0, &grid)
            .unwrap();
        let fit = fit_decay(&trace, 0, (3.0, 10.0)).unwrap();
        assert!(
            (0.22..=0.26).contains(&fit.gamma),
            "gamma_fit = {} for M = {levels} outside [0.22, 0.26]",
            fit.gamma
        );
        fitted.push(fit.gamma);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(
        2,
        format!(
            "gamma_fit = {:.4} (M=121) and {:.4} (M=501, law-preserving spacing), both in [0.22, 0.26], {elapsed:?}",
            fitted[0], fitted[1]
        ),
    );
}

#[test]
fn criterion_3_truncation() {
    let start = Instant::now();
    // Bath sized so a 1000-site chain exists and the 50-site truncation is
    // transparent over 25 cm: W = 3 cm^-1 across 1001 levels.
    let delta = 0.006;
    let kappa = (GAMMA_LAW * delta / PI).sqrt();
    let chain = synthesize(kappa, delta, 1001);
    let grid = uniform_grid(25.0, 0.01).unwrap();
    let mut anchor: HashMap<usize, Vec<f64>> = HashMap::new();
    for n in [10usize, 50, 1000] {
        let truncated = chain.truncated(n).unwrap();
        let trace = Propagator::from_chain(&truncated)
            .site_intensities(0, &grid)
            .unwrap();
        anchor.insert(n, trace.site(0).collect());
    }
    let d_50_1000 = anchor[&50]
        .iter()
        .zip(&anchor[&1000])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(d_50_1000 < 1e-3, "N=50 vs N=1000 deviate by {d_50_1000}");
    let d_10 = grid
        .iter()
        .zip(anchor[&10].iter().zip(&anchor[&1000]))
        .filter(|(z, _)| (5.0..=25.0).contains(*z))
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(d_10 > 0.05, "N=10 revival only reaches {d_10}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(
        3,
        format!("|I50-I1000| = {d_50_1000:.2e} (< 1e-3), N=10 revival {d_10:.2} (> 0.05), {elapsed:?}"),
    );
}

#[test]
fn criterion_4_transfer_lengths() {
    let grid = uniform_grid(12.0, 0.01).unwrap();
    // Hermitian reference coupler.
    let herm = Propagator::new(&build_coupler(0.3, (0.0, 0.0)).unwrap());
    let herm_trace = herm.site_intensities(0, &grid).unwrap();
    let l_herm = bathsim::transfer_length(&herm_trace, 1, None).unwrap();
    assert!((l_herm - 5.24).abs() <= 0.05, "Hermitian length {l_herm}");

    // Bath-realized PT dimer, normalized subsystem intensities.
    let (full, spec) = default_pt_system();
    let p = Propagator::new(&full);
    let trace_a = p.site_intensities(0, &grid).unwrap();
    let trace_b = p.site_intensities(1, &grid).unwrap();
    let l_a = bathsim::transfer_length(&trace_a, 1, Some(&[0, 1])).unwrap();
    let l_b = bathsim::transfer_length(&trace_b, 0, Some(&[0, 1])).unwrap();
    assert!((l_a - 7.3).abs() <= 0.4, "A-excited length {l_a}");
    assert!((l_b - 4.1).abs() <= 0.3, "B-excited length {l_b}");

    // Closed-form propagator at the bandwidth-corrected rate must agree.
    let eff = DimerSpec::new(0.3, spec.effective_decay_rate()).unwrap();
    let ga = bathsim::dimer_intensity_trace(&eff, 0, &grid).unwrap();
    let gb = bathsim::dimer_intensity_trace(&eff, 1, &grid).unwrap();
    let l_a_closed = bathsim::transfer_length(&ga, 1, Some(&[0, 1])).unwrap();
    let l_b_closed = bathsim::transfer_length(&gb, 0, Some(&[0, 1])).unwrap();
    assert!(
        (l_a - l_a_closed).abs() <= 0.1,
        "A: bath {l_a} vs closed form {l_a_closed}"
    );
    assert!(
        (l_b - l_b_closed).abs() <= 0.1,
        "B: bath {l_b} vs closed form {l_b_closed}"
    );
    pass(
        4,
        format!(
            "lengths: Hermitian {l_herm:.3}, PT {l_a:.3}/{l_b:.3} cm (closed form {l_a_closed:.3}/{l_b_closed:.3})"
        ),
    );
}

#[test]
fn criterion_5_lindblad_equivalence() {
    let (full, spec) = default_pt_system();
    let p = Propagator::new(&full);
    let eff = DimerSpec::new(0.3, spec.effective_decay_rate()).unwrap();
    let basis = FockBasis::two_mode(2);
    let generators = build_generators(&eff, &basis);
    let grid = uniform_grid(10.0, 0.01).unwrap();

    let mut worst_network = 0.0f64;
    let mut worst_nojump = 0.0f64;
    for occ in [(2u32, 0u32), (0, 2)] {
        let rho0 = FockDensityMatrix::pure(&basis, occ).unwrap();
        let (_, populations) = integrate(&rho0, &generators, &grid, 1e-3).unwrap();
        let input = PhotonConfig(vec![occ.0, occ.1]);
        for (iz, &z) in grid.iter().enumerate() {
            let pops = &populations.populations[iz];
            let sector: f64 = pops[3..6].iter().sum();
            let lind = [pops[3] / sector, pops[4] / sector, pops[5] / sector];

            // vs post-selected full-network simulation
            let net = evolve_two_photon_with(&p, (0, 1), &input, z)
                .unwrap()
                .probabilities();
            for k in 0..3 {
                worst_network = worst_network.max((net[k] - lind[k]).abs());
            }

            // vs the no-jump amplitude evolution e^{-i H_eff z}
            let g = dimer_propagator(&eff, z).unwrap();
            let col = if occ.0 == 2 { 0 } else { 1 };
            let (a, b) = (g[(0, col)], g[(1, col)]);
            let raw = [
                (a * a).norm_sqr(),
                2.0 * (a * b).norm_sqr(),
                (b * b).norm_sqr(),
            ];
            let total: f64 = raw.iter().sum();
            for k in 0..3 {
                worst_nojump = worst_nojump.max((lind[k] - raw[k] / total).abs());
            }
        }
    }
    assert!(worst_network < 2e-2, "network vs Lindblad {worst_network}");
    assert!(worst_nojump < 1e-6, "no-jump sector vs G(z) {worst_nojump}");
    pass(
        5,
        format!("Lindblad vs network {worst_network:.2e} (< 2e-2), no-jump {worst_nojump:.2e} (< 1e-6)"),
    );
}

#[test]
fn criterion_6_two_photon_entanglement() {
    // Hermitian coupler: peak at 2.6 ± 0.2 cm with P = (0.25, 0.5, 0.25) ± 0.01.
    let herm = Propagator::new(&build_coupler(0.3, (0.0, 0.0)).unwrap());
    let input20 = PhotonConfig(vec![2, 0]);
    let (z_h, _) = entanglement_peak_with(&herm, (0, 1), &input20, 10.0, 0.01).unwrap();
    assert!((z_h - 2.6).abs() <= 0.2, "Hermitian peak {z_h}");
    let probs = evolve_two_photon_with(&herm, (0, 1), &input20, z_h)
        .unwrap()
        .probabilities();
    assert!((probs[0] - 0.25).abs() <= 0.01, "P20 {}", probs[0]);
    assert!((probs[1] - 0.5).abs() <= 0.01, "P11 {}", probs[1]);
    assert!((probs[2] - 0.25).abs() <= 0.01, "P02 {}", probs[2]);

    // PT dimer via bath: 3.6 ± 0.3 cm (|20> in the neutral site) and
    // 2.1 ± 0.3 cm (|02> in the lossy site).
    let (full, _) = default_pt_system();
    let p = Propagator::new(&full);
    let (z_a, s_a) = entanglement_peak_with(&p, (0, 1), &input20, 10.0, 0.01).unwrap();
    assert!((z_a - 3.6).abs() <= 0.3, "neutral-site peak {z_a}");
    let input02 = PhotonConfig(vec![0, 2]);
    let (z_b, _) = entanglement_peak_with(&p, (0, 1), &input02, 10.0, 0.01).unwrap();
    assert!((z_b - 2.1).abs() <= 0.3, "lossy-site peak {z_b}");
    // Separable |20> input still generates sizable entanglement.
    assert!(s_a > 0.5, "peak entropy {s_a} nats");
    pass(
        6,
        format!("entropy peaks: Hermitian {z_h:.3} cm, PT {z_a:.3}/{z_b:.3} cm, S* = {s_a:.4} nats"),
    );
}

#[test]
fn criterion_7_property_suites() {
    // Unitarity and single-photon probability conservation.
    let (full, _) = default_pt_system();
    let p = Propagator::new(&full);
    let n = p.dim();
    for z in [0.3, 2.7, 9.9] {
        let u = p.transfer_matrix(z).unwrap().u;
        let delta = u.adjoint() * &u - DMatrix::<Complex64>::identity(n, n);
        let worst = delta.iter().fold(0.0f64, |a, x| a.max(x.norm()));
        assert!(worst < 1e-10, "unitarity defect {worst} at z = {z}");
        let trace = p.site_intensities(0, &[z]).unwrap();
        let total: f64 = trace.intensities[0].iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "total probability {total}");
    }

    // Two-photon probabilities over the full network sum to one.
    let small_chain = synthesize(0.11, 0.16, 21);
    let dimer = build_coupler(0.3, (0.0, 0.0)).unwrap();
    let small = attach_chain_bath(&dimer, 1, &small_chain, small_chain.len()).unwrap();
    let m = small.dim();
    let mut input = vec![0u32; m];
    input[0] = 2;
    for z in [1.3, 6.1] {
        let u = bathsim::transfer_matrix(&small, z).unwrap();
        let total = sum_two_photon_outputs(&u, &input);
        assert!((total - 1.0).abs() < 1e-9, "two-photon total {total}");
    }

    // Lindblad trace conservation over 25 cm.
    let basis = FockBasis::two_mode(2);
    let generators = build_generators(&DimerSpec::new(0.3, GAMMA_LAW).unwrap(), &basis);
    let rho0 = FockDensityMatrix::pure(&basis, (2, 0)).unwrap();
    let grid = uniform_grid(25.0, 0.5).unwrap();
    let (state, _) = integrate(&rho0, &generators, &grid, 1e-3).unwrap();
    let drift = (state.trace().re - 1.0).abs();
    assert!(drift < 1e-8, "trace drift {drift}");

    // Permanent amplitudes equal brute-force operator expansion.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_perm = 0.0f64;
    for modes in 2..=4usize {
        let mat = DMatrix::from_fn(modes, modes, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let u = TransferMatrix { u: mat.clone(), z: 0.0, source_hash: 0 };
        for total in 1..=3u32 {
            for input in occupations(modes, total) {
                for output in occupations(modes, total) {
                    let fast = output_amplitude(
                        &u,
                        &PhotonConfig(input.clone()),
                        &PhotonConfig(output.clone()),
                    )
                    .unwrap();
                    let slow = expand_operators(&mat, &input, &output);
                    worst_perm = worst_perm.max((fast - slow).norm());
                }
            }
        }
    }
    assert!(worst_perm < 1e-12, "permanent vs expansion {worst_perm}");

    // Zeno: the anchor intensity derivative at z = 0 vanishes under grid
    // refinement.
    let chain = synthesize(0.11, 0.16, 121).truncated(50).unwrap();
    let anchor = Propagator::from_chain(&chain);
    let mut prev = f64::INFINITY;
    for h in [1e-1, 1e-2, 1e-3, 1e-4] {
        let t = anchor.site_intensities(0, &[0.0, h]).unwrap();
        let deriv = ((t.intensities[1][0] - t.intensities[0][0]) / h).abs();
        assert!(deriv < prev, "derivative {deriv} not shrinking at h = {h}");
        prev = deriv;
    }
    assert!(prev < 1e-3, "derivative limit {prev}");

    pass(
        7,
        format!("unitarity, probability sums, trace drift {drift:.1e}, permanents {worst_perm:.1e}, Zeno ok"),
    );
}

#[test]
fn criterion_8_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [
        ("synth-bath", "chain.dat"),
        ("dimer", "dimer_trace.dat"),
        ("two-photon", "two_photon_trace.dat"),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let status = Command::new(env!("CARGO_BIN_EXE_bathsim"))
                .current_dir(dir.path())
                .args([cmd, "--quiet"])
                .status()
                .unwrap();
            assert!(status.success(), "{cmd} run {run} failed");
            outputs.push(std::fs::read(dir.path().join(file)).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{cmd} output differs between runs");
    }
    pass(8, "repeated default runs are byte-identical");
}

// ---------------------------------------------------------------------------
// Test-side oracles.

fn occupations(modes: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(modes: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if modes == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            rec(modes - 1, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(modes, total, &mut Vec::new(), &mut out);
    out
}

fn sum_two_photon_outputs(u: &TransferMatrix, input: &[u32]) -> f64 {
    occupations(input.len(), 2)
        .into_iter()
        .map(|out| {
            output_amplitude(u, &PhotonConfig(input.to_vec()), &PhotonConfig(out))
                .unwrap()
                .norm_sqr()
        })
        .sum()
}

/// Brute-force second-quantized expansion, independent of the permanent.
fn expand_operators(u: &DMatrix<Complex64>, input: &[u32], output: &[u32]) -> Complex64 {
    let modes = input.len();
    let mut state: HashMap<Vec<u32>, Complex64> = HashMap::new();
    state.insert(vec![0; modes], Complex64::new(1.0, 0.0));
    for (i, &n_photons) in input.iter().enumerate() {
        for _ in 0..n_photons {
            let mut next: HashMap<Vec<u32>, Complex64> = HashMap::new();
            for (occ, amp) in &state {
                for m in 0..modes {
                    let mut bumped = occ.clone();
                    bumped[m] += 1;
                    let ladder = (bumped[m] as f64).sqrt();
                    *next.entry(bumped).or_insert(Complex64::new(0.0, 0.0)) +=
                        amp * u[(m, i)] * ladder;
                }
            }
            state = next;
        }
    }
    let norm: f64 = input
        .iter()
        .map(|&k| (1..=k).map(|x| x as f64).product::<f64>())
        .product();
    state
        .get(output)
        .copied()
        .unwrap_or(Complex64::new(0.0, 0.0))
        / norm.sqrt()
}
