//! Scenario configuration: flat key-value TOML with one section per concern,
//! resolved against paper-default parameters so a bare invocation reproduces
//! the headline curves. One file describes one run.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bathsim::{Error, Result, StarBathSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SynthBath,
    Decay,
    Dimer,
    TwoPhoton,
    LindbladCompare,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::SynthBath => "synth-bath",
            Scenario::Decay => "decay",
            Scenario::Dimer => "dimer",
            Scenario::TwoPhoton => "two-photon",
            Scenario::LindbladCompare => "lindblad-compare",
        }
    }

    pub fn default_output(self) -> &'static str {
        match self {
            Scenario::SynthBath => "chain.dat",
            Scenario::Decay => "decay_trace.dat",
            Scenario::Dimer => "dimer_trace.dat",
            Scenario::TwoPhoton => "two_photon_trace.dat",
            Scenario::LindbladCompare => "lindblad_compare.dat",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<Scenario>,
    star: Option<RawStar>,
    bath: Option<RawBath>,
    dimer: Option<RawDimer>,
    grid: Option<RawGrid>,
    input: Option<RawInput>,
    fit: Option<RawFit>,
    compare: Option<RawCompare>,
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStar {
    kappa: Option<f64>,
    delta: Option<f64>,
    levels: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    truncate: Option<usize>,
    chain_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDimer {
    coupling: Option<f64>,
    gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    z_max: Option<f64>,
    z_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    site: Option<usize>,
    photons: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFit {
    window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompare {
    bound: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
}

/// Fully resolved run configuration. Every field is concrete; re-emitting
/// with [`ResolvedConfig::to_toml`] and re-parsing yields an equal value.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub kappa: f64,
    pub delta: f64,
    pub levels: usize,
    pub truncate: usize,
    pub chain_path: Option<PathBuf>,
    pub coupling: f64,
    /// Explicit target decay rate; when set, the star coupling is re-derived
    /// as kappa = sqrt(gamma·delta/pi). Zero means no bath at all.
    pub gamma_target: Option<f64>,
    pub z_max: f64,
    pub z_step: f64,
    pub excited_site: usize,
    pub photons: [u32; 2],
    pub fit_window: (f64, f64),
    pub compare_bound: f64,
    pub output: PathBuf,
}

impl ResolvedConfig {
    pub fn parse(
        scenario: Scenario,
        config_text: Option<&str>,
        out_override: Option<PathBuf>,
    ) -> Result<Self> {
        let raw: RawConfig = match config_text {
            Some(text) => toml::from_str(text)
                .map_err(|e| Error::invalid(format!("config: {e}")))?,
            None => RawConfig::default(),
        };
        if let Some(declared) = raw.scenario {
            if declared != scenario {
                return Err(Error::invalid(format!(
                    "config declares scenario '{}' but '{}' was requested",
                    declared.name(),
                    scenario.name()
                )));
            }
        }
        let star = raw.star.unwrap_or_default();
        let bath = raw.bath.unwrap_or_default();
        let dimer = raw.dimer.unwrap_or_default();
        let grid = raw.grid.unwrap_or_default();
        let input = raw.input.unwrap_or_default();
        let fit = raw.fit.unwrap_or_default();
        let compare = raw.compare.unwrap_or_default();
        let output = raw.output.unwrap_or_default();

        let photons_vec = input.photons.unwrap_or_else(|| vec![2, 0]);
        if photons_vec.len() != 2 {
            return Err(Error::invalid(format!(
                "input.photons must list the two subsystem modes, got {} entries",
                photons_vec.len()
            )));
        }
        let cfg = Self {
            scenario,
            kappa: star.kappa.unwrap_or(0.11),
            delta: star.delta.unwrap_or(0.16),
            levels: star.levels.unwrap_or(121),
            truncate: bath.truncate.unwrap_or(50),
            chain_path: bath.chain_path,
            coupling: dimer.coupling.unwrap_or(0.3),
            gamma_target: dimer.gamma,
            z_max: grid.z_max.unwrap_or(10.0),
            z_step: grid.z_step.unwrap_or(0.01),
            excited_site: input.site.unwrap_or(0),
            photons: [photons_vec[0], photons_vec[1]],
            fit_window: fit.window.map_or((3.0, 10.0), |w| (w[0], w[1])),
            compare_bound: compare.bound.unwrap_or(2e-2),
            output: out_override
                .or(output.path)
                .unwrap_or_else(|| PathBuf::from(scenario.default_output())),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_file(
        scenario: Scenario,
        path: Option<&Path>,
        out_override: Option<PathBuf>,
    ) -> Result<Self> {
        let text = match path {
            Some(p) => Some(std::fs::read_to_string(p)?),
            None => None,
        };
        Self::parse(scenario, text.as_deref(), out_override)
    }

    fn validate(&self) -> Result<()> {
        // Cheap parameter checks come first; nothing heavy may run before
        // the config is known to be sound.
        if self.needs_star() {
            StarBathSpec::new(self.star_kappa(), self.delta, self.levels)?;
            if self.truncate == 0 || self.truncate > self.levels + 1 {
                return Err(Error::invalid(format!(
                    "bath.truncate = {} outside 1..={} (star yields M+1 chain sites)",
                    self.truncate,
                    self.levels + 1
                )));
            }
        }
        if let Some(g) = self.gamma_target {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::invalid(format!("dimer.gamma must be >= 0, got {g}")));
            }
        }
        if !self.coupling.is_finite() || self.coupling <= 0.0 {
            return Err(Error::invalid(format!(
                "dimer.coupling must be positive, got {}",
                self.coupling
            )));
        }
        let grid_ok = self.z_max.is_finite()
            && self.z_step.is_finite()
            && self.z_step > 0.0
            && self.z_step <= self.z_max;
        if !grid_ok {
            return Err(Error::invalid(format!(
                "grid requires 0 < z_step <= z_max, got step {} and max {}",
                self.z_step, self.z_max
            )));
        }
        if self.chain_path.is_some() && self.scenario != Scenario::Decay {
            return Err(Error::invalid(
                "bath.chain_path import is only supported by the decay scenario",
            ));
        }
        match self.scenario {
            Scenario::Decay => {
                let (lo, hi) = self.fit_window;
                if lo.is_nan() || hi.is_nan() || lo >= hi {
                    return Err(Error::invalid("fit.window must satisfy z_min < z_max"));
                }
                if lo < 0.0 || hi > self.z_max {
                    return Err(Error::invalid(format!(
                        "fit.window ({lo}, {hi}) outside the z range [0, {}]",
                        self.z_max
                    )));
                }
                if self.gamma_target == Some(0.0) {
                    return Err(Error::invalid("decay scenario requires a lossy bath"));
                }
            }
            Scenario::Dimer => {
                if self.excited_site > 1 {
                    return Err(Error::invalid("input.site must be 0 (neutral) or 1 (lossy)"));
                }
            }
            Scenario::TwoPhoton | Scenario::LindbladCompare => {
                if self.photons.iter().sum::<u32>() != 2 {
                    return Err(Error::invalid(format!(
                        "input.photons must total two photons, got {:?}",
                        self.photons
                    )));
                }
                if !self.compare_bound.is_finite() || self.compare_bound <= 0.0 {
                    return Err(Error::invalid("compare.bound must be positive"));
                }
            }
            Scenario::SynthBath => {}
        }
        Ok(())
    }

    fn needs_star(&self) -> bool {
        if self.chain_path.is_some() {
            return false;
        }
        // gamma = 0 requests the bare Hermitian subsystem; no star needed.
        !matches!(
            (self.scenario, self.gamma_target),
            (
                Scenario::Dimer | Scenario::TwoPhoton | Scenario::LindbladCompare,
                Some(0.0)
            )
        )
    }

    /// Coupling of the synthesized star; an explicit gamma target re-derives
    /// it from the decay law gamma = pi kappa^2 / delta.
    pub fn star_kappa(&self) -> f64 {
        match self.gamma_target {
            Some(g) if g > 0.0 => (g * self.delta / PI).sqrt(),
            _ => self.kappa,
        }
    }

    /// Star specification for this run, `None` when gamma = 0 (Hermitian).
    pub fn star_spec(&self) -> Result<Option<StarBathSpec>> {
        if !self.needs_star() {
            return Ok(None);
        }
        StarBathSpec::new(self.star_kappa(), self.delta, self.levels).map(Some)
    }

    /// Re-emit the resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("scenario = \"{}\"\n\n", self.scenario.name()));
        s.push_str("[star]\n");
        s.push_str(&format!("kappa = {}\n", fmt_toml_float(self.kappa)));
        s.push_str(&format!("delta = {}\n", fmt_toml_float(self.delta)));
        s.push_str(&format!("levels = {}\n\n", self.levels));
        s.push_str("[bath]\n");
        s.push_str(&format!("truncate = {}\n", self.truncate));
        if let Some(p) = &self.chain_path {
            s.push_str(&format!("chain_path = {:?}\n", p.display().to_string()));
        }
        s.push('\n');
        s.push_str("[dimer]\n");
        s.push_str(&format!("coupling = {}\n", self.coupling));
        if let Some(g) = self.gamma_target {
            s.push_str(&format!("gamma = {}\n", fmt_toml_float(g)));
        }
        s.push('\n');
        s.push_str("[grid]\n");
        s.push_str(&format!("z_max = {}\n", fmt_toml_float(self.z_max)));
        s.push_str(&format!("z_step = {}\n\n", fmt_toml_float(self.z_step)));
        s.push_str("[input]\n");
        s.push_str(&format!("site = {}\n", self.excited_site));
        s.push_str(&format!("photons = [{}, {}]\n\n", self.photons[0], self.photons[1]));
        s.push_str("[fit]\n");
        s.push_str(&format!(
            "window = [{}, {}]\n\n",
            fmt_toml_float(self.fit_window.0),
            fmt_toml_float(self.fit_window.1)
        ));
        s.push_str("[compare]\n");
        s.push_str(&format!("bound = {}\n\n", fmt_toml_float(self.compare_bound)));
        s.push_str("[output]\n");
        s.push_str(&format!("path = {:?}\n", self.output.display().to_string()));
        s
    }

    /// Comment block recording the run for output-file headers.
    pub fn comment_block(&self) -> Vec<String> {
        self.to_toml()
            .lines()
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect()
    }
}

/// TOML floats need a decimal point or exponent to parse back as floats.
fn fmt_toml_float(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("nan") {
        s
    } else {
        format!("{s}.0")
    }
}
