use clap::ValueEnum;

use crosstalk_core::damping::{Contact, LongTimeMethod};
use crosstalk_core::lattice::{LatticeSpec, Symmetry, WaveVector};

use crate::config::{DisorderSettings, LatticeConfig, Overlay, ProbeSettings, RunConfig, Separations, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "fig1b")]
    Fig1b,
    #[value(name = "fig2")]
    Fig2,
    #[value(name = "fig3-triangular")]
    Fig3Triangular,
    #[value(name = "fig4")]
    Fig4,
    #[value(name = "appxB")]
    AppxB,
    #[value(name = "appxC")]
    AppxC,
    #[value(name = "appxD")]
    AppxD,
}

const CHAIN: LatticeConfig = LatticeConfig {
    dimension: 1,
    symmetry: Symmetry::Cubic,
    omega0: 1.0,
    coupling: 0.75,
};

const SQUARE: LatticeConfig = LatticeConfig {
    dimension: 2,
    symmetry: Symmetry::Cubic,
    omega0: 1.0,
    coupling: 3.0 / 16.0,
};

const TRIANGULAR: LatticeConfig = LatticeConfig {
    dimension: 2,
    symmetry: Symmetry::Triangular,
    omega0: 1.0,
    coupling: 0.165,
};

fn probe(omega: f64) -> ProbeSettings {
    ProbeSettings {
        omega,
        lambda: 0.01,
        temperature: 0.0,
        contact: Contact::Point,
    }
}

fn chain_omega() -> f64 {
    LatticeSpec::cubic(1, 1.0, 0.75)
        .expect("valid chain")
        .frequency(&WaveVector::new(&[0.164]))
}

fn x_line(count: usize) -> Separations {
    Separations::Line {
        step: [1.0, 0.0, 0.0],
        count,
    }
}

fn map(lattice: LatticeConfig, omega: f64, extent: usize, quadrant: bool, times: Vec<f64>, overlay: Option<Overlay>) -> RunConfig {
    RunConfig {
        lattice,
        task: Task::Crosstalk {
            probe: probe(omega),
            separations: Separations::Window { extent, quadrant },
            times,
            n_per_axis: None,
            method: LongTimeMethod::Manifold { resolution: 2048 },
            overlay,
            disorder: None,
        },
    }
}

fn line(lattice: LatticeConfig, omega: f64, count: usize, overlay: Option<Overlay>) -> RunConfig {
    RunConfig {
        lattice,
        task: Task::Crosstalk {
            probe: probe(omega),
            separations: x_line(count),
            times: Vec::new(),
            n_per_axis: None,
            method: LongTimeMethod::Manifold { resolution: 2048 },
            overlay,
            disorder: None,
        },
    }
}

fn dispersion(lattice: LatticeConfig, omegas: Vec<f64>) -> RunConfig {
    RunConfig {
        lattice,
        task: Task::Dispersion {
            n_per_axis: 128,
            omegas,
            resolution: 256,
        },
    }
}

fn correlation(lattice: LatticeConfig, temperatures: Vec<f64>, separations: Separations) -> RunConfig {
    RunConfig {
        lattice,
        task: Task::Correlation {
            temperatures,
            separations,
            n_per_axis: 256,
            level: 0.01,
        },
    }
}

/// Named runs making up a preset; each is written to `<name>.csv`.
pub fn expand(preset: Preset) -> Vec<(&'static str, RunConfig)> {
    let saddle = 2.5f64.sqrt();
    match preset {
        Preset::Fig1b => {
            let omega = chain_omega();
            let clean = RunConfig {
                lattice: CHAIN,
                task: Task::Crosstalk {
                    probe: probe(omega),
                    separations: x_line(600),
                    times: vec![1e4],
                    n_per_axis: None,
                    method: LongTimeMethod::Manifold { resolution: 64 },
                    overlay: Some(Overlay::Isotropic),
                    disorder: None,
                },
            };
            let chain = RunConfig {
                lattice: CHAIN,
                task: Task::Crosstalk {
                    probe: probe(omega),
                    separations: x_line(600),
                    times: vec![1e4],
                    n_per_axis: None,
                    method: LongTimeMethod::Manifold { resolution: 64 },
                    overlay: Some(Overlay::Isotropic),
                    disorder: Some(DisorderSettings::default()),
                },
            };
            vec![("fig1b_clean", clean), ("fig1b_chain", chain)]
        }
        Preset::Fig2 => vec![
            ("fig2a", dispersion(SQUARE, vec![1.01, saddle, 1.95])),
            ("fig2b", map(SQUARE, 1.01, 30, true, Vec::new(), Some(Overlay::Isotropic))),
            ("fig2c", map(SQUARE, saddle, 10, true, Vec::new(), Some(Overlay::Diagonal))),
            ("fig2d", map(SQUARE, 1.95, 10, true, Vec::new(), Some(Overlay::Eggcrate))),
        ],
        Preset::Fig3Triangular => vec![
            ("fig3a", dispersion(TRIANGULAR, vec![1.01, 1.905, 1.99])),
            ("fig3b", map(TRIANGULAR, 1.01, 20, false, Vec::new(), Some(Overlay::Isotropic))),
            ("fig3c", map(TRIANGULAR, 1.905, 10, false, Vec::new(), None)),
            ("fig3d", map(TRIANGULAR, 1.99, 10, false, Vec::new(), None)),
        ],
        Preset::Fig4 => vec![
            ("fig4a_correlation", correlation(CHAIN, vec![0.0], x_line(50))),
            ("fig4a_crosstalk", line(CHAIN, 2.0, 50, Some(Overlay::Isotropic))),
            ("fig4b_correlation", correlation(SQUARE, vec![0.0], x_line(20))),
            ("fig4b_isotropic", line(SQUARE, 1.01, 20, Some(Overlay::Isotropic))),
            ("fig4b_high", line(SQUARE, 1.95, 20, Some(Overlay::Eggcrate))),
            (
                "fig4c",
                correlation(SQUARE, vec![0.0], Separations::Window { extent: 6, quadrant: false }),
            ),
        ],
        Preset::AppxB => vec![
            ("appxB_a", map(SQUARE, 1.01, 20, true, vec![50.0, 100.0, 200.0, 1000.0], None)),
            ("appxB_b", map(SQUARE, saddle, 10, true, vec![10.0, 30.0, 70.0, 1e4], None)),
            ("appxB_c", map(SQUARE, 1.95, 10, true, vec![10.0, 30.0, 70.0, 1e4], None)),
        ],
        Preset::AppxC => vec![(
            "appxC",
            correlation(SQUARE, vec![0.0, 1.0, 100.0], Separations::Window { extent: 6, quadrant: false }),
        )],
        Preset::AppxD => vec![(
            "appxD",
            correlation(TRIANGULAR, vec![0.0], Separations::Window { extent: 6, quadrant: false }),
        )],
    }
}
