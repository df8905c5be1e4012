//! Tridiagonal chain Hamiltonians: on-site detunings plus nearest-neighbour
//! couplings, the natural form of a 1-D waveguide array.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Real symmetric tridiagonal Hamiltonian.
///
/// `eps[i]` is the detuning of site `i` (cm⁻¹) and `couplings[i]` couples
/// sites `i` and `i + 1` (cm⁻¹). Couplings are stored non-negative; a gauge
/// transformation removes any sign without changing observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonian {
    eps: Vec<f64>,
    couplings: Vec<f64>,
}

impl ChainHamiltonian {
    pub fn new(eps: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::invalid("chain needs at least one site"));
        }
        if couplings.len() + 1 != eps.len() {
            return Err(Error::invalid(format!(
                "chain with {} sites needs {} couplings, got {}",
                eps.len(),
                eps.len() - 1,
                couplings.len()
            )));
        }
        if !eps.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("non-finite detuning"));
        }
        if !couplings.iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(Error::invalid("couplings must be finite and non-negative"));
        }
        Ok(Self { eps, couplings })
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty chains
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Keep the first `n` sites (prefix truncation; chain sites are ordered
    /// by Krylov depth, so this drops the far end of the array).
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::invalid(format!(
                "truncation length {n} outside 1..={}",
                self.len()
            )));
        }
        Ok(Self {
            eps: self.eps[..n].to_vec(),
            couplings: self.couplings[..n - 1].to_vec(),
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &e) in self.eps.iter().enumerate() {
            m[(i, i)] = e;
        }
        for (i, &j) in self.couplings.iter().enumerate() {
            m[(i, i + 1)] = j;
            m[(i + 1, i)] = j;
        }
        m
    }

    /// Write the chain as a plain-text table: one row per site with its
    /// detuning and the coupling to the next site (absent on the last row).
    /// Values use shortest round-trip formatting, so `read_table` recovers
    /// them bit-exactly.
    pub fn write_table<W: Write>(&self, mut w: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "index\teps[cm^-1]\tJ_to_next[cm^-1]")?;
        for i in 0..self.len() {
            if i + 1 < self.len() {
                writeln!(w, "{}\t{}\t{}", i, self.eps[i], self.couplings[i])?;
            } else {
                writeln!(w, "{}\t{}\t", i, self.eps[i])?;
            }
        }
        Ok(())
    }

    pub fn write_table_file(&self, path: &Path, comments: &[String]) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_table(&mut f, comments)
    }

    pub fn read_table<R: BufRead>(r: R) -> Result<Self> {
        let mut eps = Vec::new();
        let mut couplings = Vec::new();
        let mut saw_header = false;
        let mut expect_index = 0usize;
        for (lineno, line) in r.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let trimmed = line.trim_end();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !saw_header {
                if trimmed.split('\t').next() != Some("index") {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "expected header line starting with 'index'".into(),
                    });
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
                });
            }
            let idx: usize = fields[0].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad site index '{}'", fields[0]),
            })?;
            if idx != expect_index {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("site index {idx} out of order (expected {expect_index})"),
                });
            }
            expect_index += 1;
            let e: f64 = fields[1].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad detuning '{}'", fields[1]),
            })?;
            eps.push(e);
            if fields.len() == 3 && !fields[2].is_empty() {
                let j: f64 = fields[2].parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad coupling '{}'", fields[2]),
                })?;
                couplings.push(j);
            }
        }
        if !saw_header {
            return Err(Error::Parse {
                line: 0,
                msg: "missing header line".into(),
            });
        }
        Self::new(eps, couplings)
    }

    pub fn read_table_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_table(std::io::BufReader::new(f))
    }
}
