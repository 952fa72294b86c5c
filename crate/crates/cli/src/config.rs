use std::path::Path;

use serde::{Deserialize, Serialize};

use crosstalk_core::damping::{Contact, LongTimeMethod, ProbeConfig};
use crosstalk_core::disorder::{Boundary, DisorderLaw, Route};
use crosstalk_core::lattice::{LatticeSpec, Symmetry, Vec3};

use crate::CliError;

/// Everything needed to reproduce one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub task: Task,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub dimension: usize,
    pub symmetry: Symmetry,
    pub omega0: f64,
    pub coupling: f64,
}

impl LatticeConfig {
    pub fn spec(&self) -> Result<LatticeSpec, CliError> {
        Ok(LatticeSpec::new(self.dimension, self.symmetry, self.omega0, self.coupling)?)
    }
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            dimension: 1,
            symmetry: Symmetry::Cubic,
            omega0: 1.0,
            coupling: 0.75,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSettings {
    pub omega: f64,
    pub lambda: f64,
    pub temperature: f64,
    pub contact: Contact,
}

impl ProbeSettings {
    pub fn probe(&self) -> ProbeConfig {
        ProbeConfig::new(self.omega, self.lambda)
            .with_temperature(self.temperature)
            .with_contact(self.contact.clone())
    }
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            omega: 1.01,
            lambda: 0.01,
            temperature: 0.0,
            contact: Contact::Point,
        }
    }
}

/// Probe separations in lattice units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Separations {
    /// `m * step` for `m = 0..=count`.
    Line { step: Vec3, count: usize },
    /// Lattice sites with `|x|, |y| <= extent`, optionally only `x, y >= 0`.
    Window { extent: usize, quadrant: bool },
    List { points: Vec<Vec3> },
}

impl Separations {
    pub fn points(&self, spec: &LatticeSpec) -> Result<Vec<Vec3>, CliError> {
        match self {
            Separations::Line { step, count } => Ok((0..=*count).map(|m| step.map(|c| c * m as f64)).collect()),
            Separations::List { points } => Ok(points.clone()),
            Separations::Window { extent, quadrant } => {
                if spec.dimension() != 2 {
                    return Err(CliError::Config("window separations need a 2D lattice".into()));
                }
                let a = spec.lattice_vectors();
                let e = *extent as i64;
                let reach = if spec.symmetry() == Symmetry::Triangular { 2 * e + 1 } else { e };
                let lim = *extent as f64 + 1e-9;
                let mut out = Vec::new();
                for i in -reach..=reach {
                    for j in -reach..=reach {
                        let r = [
                            i as f64 * a[0][0] + j as f64 * a[1][0],
                            i as f64 * a[0][1] + j as f64 * a[1][1],
                            0.0,
                        ];
                        let inside = r[0].abs() <= lim && r[1].abs() <= lim;
                        let quad_ok = !quadrant || (r[0] >= -1e-9 && r[1] >= -1e-9);
                        if inside && quad_ok {
                            out.push([r[0] + 0.0, r[1] + 0.0, 0.0]);
                        }
                    }
                }
                out.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
                Ok(out)
            }
        }
    }
}

/// Closed-form curve written next to computed cross-talk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overlay {
    /// `cos`, `J0` or `sinc` of `k r`, with `k` the resonant wavenumber along
    /// the first lattice direction.
    Isotropic,
    Diagonal,
    Eggcrate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSettings {
    pub n_sites: usize,
    pub amplitudes: Vec<f64>,
    pub realizations: usize,
    pub base_seed: u64,
    pub law: DisorderLaw,
    pub boundary: Boundary,
    pub route: Route,
}

impl Default for DisorderSettings {
    fn default() -> Self {
        DisorderSettings {
            n_sites: 2500,
            amplitudes: vec![0.0, 0.1],
            realizations: 1,
            base_seed: 1,
            law: DisorderLaw::OneSided,
            boundary: Boundary::Fixed,
            route: Route::Chebyshev,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    Dispersion {
        n_per_axis: usize,
        omegas: Vec<f64>,
        resolution: usize,
    },
    Crosstalk {
        probe: ProbeSettings,
        separations: Separations,
        /// Finite evaluation times; empty for the long-time limit.
        times: Vec<f64>,
        /// Grid for finite times; `None` picks the suggested grid per time.
        n_per_axis: Option<usize>,
        method: LongTimeMethod,
        overlay: Option<Overlay>,
        disorder: Option<DisorderSettings>,
    },
    Correlation {
        temperatures: Vec<f64>,
        separations: Separations,
        n_per_axis: usize,
        /// Iso-line level of the normalized map; only used for window separations.
        level: f64,
    },
    Dynamics {
        probe: ProbeSettings,
        separations: Separations,
        t_final: f64,
        squeezing: f64,
        method: LongTimeMethod,
        lamb_grid: Option<usize>,
        /// Number of equally spaced time samples per separation; 0 writes
        /// only the final values.
        trace_samples: usize,
        initial_mean: [f64; 4],
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Dispersion { .. } => "dispersion",
            Task::Crosstalk { .. } => "crosstalk",
            Task::Correlation { .. } => "correlation",
            Task::Dynamics { .. } => "dynamics",
        }
    }
}

impl RunConfig {
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("cannot parse config: {e}")))
    }

    /// Read a JSON config, or the config embedded in a dataset header.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if text.starts_with('#') {
            let line = text
                .lines()
                .take_while(|l| l.starts_with('#'))
                .find_map(|l| l.strip_prefix(crate::output::CONFIG_PREFIX))
                .ok_or_else(|| CliError::Config(format!("{} has no embedded config", path.display())))?;
            Self::from_json(line)
        } else {
            Self::from_json(&text)
        }
    }
}
