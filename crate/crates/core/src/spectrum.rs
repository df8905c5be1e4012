//! Real symmetric eigendecompositions behind an immutable handle, so one
//! factorization serves every propagation distance.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chain::ChainHamiltonian;
use crate::error::{Error, Result};
use crate::network::NetworkHamiltonian;

/// Eigendecomposition H = W Λ Wᵀ of a real symmetric operator, eigenvalues
/// ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomp {
    /// Decompose a network Hamiltonian; tridiagonal networks are routed to
    /// the dedicated QL solver, everything else to a dense solver.
    pub fn of_network(h: &NetworkHamiltonian) -> Self {
        match h.as_chain() {
            Some(chain) => Self::of_chain(&chain),
            None => Self::of_dense(h.matrix()),
        }
    }

    pub fn of_chain(chain: &ChainHamiltonian) -> Self {
        let (eigenvalues, eigenvectors) =
            tridiagonal_eigen(chain.eps().to_vec(), chain.couplings().to_vec());
        Self { eigenvalues, eigenvectors }
    }

    pub fn of_dense(m: &DMatrix<f64>) -> Self {
        let se = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let n = m.nrows();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &se.eigenvectors.column(src));
        }
        Self { eigenvalues, eigenvectors }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// U(z) = W e^{-iΛz} Wᵀ. At z = 0 this returns the identity exactly.
    pub fn unitary(&self, z: f64) -> DMatrix<Complex64> {
        let n = self.dim();
        if z == 0.0 {
            return DMatrix::identity(n, n);
        }
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * z))
            .collect();
        let mut u = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, phase) in phases.iter().enumerate() {
                    acc += phase * (self.eigenvectors[(i, k)] * self.eigenvectors[(j, k)]);
                }
                u[(i, j)] = acc;
                u[(j, i)] = acc; // H real symmetric makes U complex symmetric
            }
        }
        u
    }

    /// Amplitude vector ψ(z) = U(z) e_input without forming U.
    pub fn evolve_basis_state(&self, input: usize, z: f64) -> Result<DVector<Complex64>> {
        let n = self.dim();
        if input >= n {
            return Err(Error::invalid(format!("site {input} out of range for dim {n}")));
        }
        let mut psi = DVector::zeros(n);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -self.eigenvalues[k] * z);
            let c = self.eigenvectors[(input, k)];
            if c == 0.0 {
                continue;
            }
            for i in 0..n {
                psi[i] += phase * (self.eigenvectors[(i, k)] * c);
            }
        }
        Ok(psi)
    }
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix by the
/// implicit QL method with Wilkinson shifts, accumulating the rotations.
/// Returns eigenvalues ascending with matching eigenvector columns.
pub(crate) fn tridiagonal_eigen(mut d: Vec<f64>, off: Vec<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = d.len();
    let mut v = DMatrix::<f64>::identity(n, n);
    if n == 1 {
        return (d, v);
    }
    // e[i] couples i and i+1; e[n-1] is workspace.
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible subdiagonal element splitting the problem.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");

            // Wilkinson shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Rotation underflow: deflate and retry.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = v[(k, i + 1)];
                    v[(k, i + 1)] = s * v[(k, i)] + c * f;
                    v[(k, i)] = c * v[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, carrying eigenvectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut sorted_v = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_v.set_column(dst, &v.column(src));
    }
    (sorted_d, sorted_v)
}
