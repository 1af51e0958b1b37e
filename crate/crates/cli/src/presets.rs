//! Built-in experiment presets.

use crate::config::{Experiment, ExperimentConfig};
use harmlab::Mode;

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "z1-control", summary: "epsilon scan on Z, (0, 1), r = 1..8, exact" },
    Preset { name: "z2-control", summary: "epsilon scan on Z^2, (0, e1), r = 1..16, auto" },
    Preset { name: "heisenberg-growth", summary: "growth profile of the Heisenberg group, r <= 16" },
    Preset { name: "f2-floor", summary: "epsilon scan on F_2, (e, a), r = 1..6, exact" },
    Preset { name: "lamplighter-scan", summary: "epsilon scan on the lamplighter group, (e, t), r = 1..8, auto" },
    Preset { name: "bs12-scan", summary: "epsilon scan on BS(1,2), (e, a), r = 1..7, auto" },
    Preset { name: "lemma2-suite", summary: "randomized nested-ball monotonicity on Z^2, F_2, lamplighter, BS(1,2)" },
    Preset { name: "telescoping-suite", summary: "geodesic ratio chains on Z (r <= 8), Z^2 (r <= 5), F_2 (r <= 4)" },
    Preset { name: "certify", summary: "growth certificates on Z (delta 1/4, r0 4) and F_2 (delta 1/4, r0 2)" },
    Preset { name: "mc-crosscheck", summary: "10^6 simulated exits on Z (r = 4) and F_2 (r = 3) against the solver" },
    Preset { name: "grigorchuk-probe", summary: "Grigorchuk balls r <= 8 with exit-measure and f_n checks" },
];

fn cfg(experiment: Experiment, group: &str, radius_min: usize, radius_max: usize, mode: Mode) -> ExperimentConfig {
    ExperimentConfig {
        experiment,
        group: group.into(),
        radius_min,
        radius_max,
        mode,
        ..Default::default()
    }
}

/// The configurations a preset runs, in order.
pub fn preset(name: &str) -> Option<Vec<ExperimentConfig>> {
    use Experiment::*;
    Some(match name {
        "z1-control" => vec![cfg(EpsilonScan, "z:1", 1, 8, Mode::Exact)],
        "z2-control" => vec![cfg(EpsilonScan, "z:2", 1, 16, Mode::Auto)],
        "heisenberg-growth" => vec![cfg(Growth, "heis", 0, 16, Mode::Exact)],
        "f2-floor" => vec![cfg(EpsilonScan, "free:2", 1, 6, Mode::Exact)],
        "lamplighter-scan" => vec![cfg(EpsilonScan, "lamplighter", 1, 8, Mode::Auto)],
        "bs12-scan" => vec![cfg(EpsilonScan, "bs:1:2", 1, 7, Mode::Auto)],
        "lemma2-suite" => ["z:2", "free:2", "lamplighter", "bs:1:2"]
            .iter()
            .map(|g| ExperimentConfig { instances: 100, ..cfg(Lemma2, g, 1, 4, Mode::Exact) })
            .collect(),
        "telescoping-suite" => vec![
            cfg(Telescope, "z:1", 1, 8, Mode::Exact),
            cfg(Telescope, "z:2", 1, 5, Mode::Exact),
            cfg(Telescope, "free:2", 1, 4, Mode::Exact),
        ],
        "certify" => vec![
            ExperimentConfig { delta: "1/4".into(), r0: 4, ..cfg(Certify, "z:1", 1, 12, Mode::Exact) },
            ExperimentConfig { delta: "1/4".into(), r0: 2, ..cfg(Certify, "free:2", 1, 6, Mode::Exact) },
        ],
        "mc-crosscheck" => vec![
            ExperimentConfig { samples: 1_000_000, seed: 20240601, ..cfg(Simulate, "z:1", 4, 4, Mode::Exact) },
            ExperimentConfig { samples: 1_000_000, seed: 20240601, ..cfg(Simulate, "free:2", 3, 3, Mode::Exact) },
        ],
        "grigorchuk-probe" => vec![cfg(ProbeGrigorchuk, "grigorchuk", 0, 8, Mode::Auto)],
        _ => return None,
    })
}
