//! Datasets for the five standard fidelity plots.
//!
//! | id | families | swept | fixed |
//! |----|----------|-------|-------|
//! | 1 | spq, hqA | r ∈ [0, 3] | R = 0 |
//! | 2 | spq, hqB | r ∈ [0, 3] | R = 0 |
//! | 3 | singlerail, coherent | r ∈ [0, 3] | R = 0 |
//! | 4 | spq, hqA | R ∈ [0, 1] | r ∈ {1.5, 2.0} |
//! | 5 | spq, hqB | R ∈ [0, 1] | r ∈ {1.5, 2.0} |
//!
//! Closed-form rows come in both variants where a correction exists, and
//! every figure also carries quadrature rows.

use hybridtele_core::closed_form::FormulaVariant;
use hybridtele_core::engine::QuadratureConfig;
use hybridtele_core::qubit::Family;

use crate::eval::Approach;
use crate::sweep::{run_sweep, SweepConfig, SweepRow, TopologyChoice};

/// Amplitudes for the two-mode hybrid curves.
pub const HYBRID_ALPHAS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
/// Amplitudes for the single-mode coherent-qubit curves.
pub const COHERENT_ALPHAS: [f64; 4] = [0.5, 0.75, 1.0, 1.5];
pub const LOSS_SQUEEZINGS: [f64; 2] = [1.5, 2.0];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("figure id must be 1 to 5, got {0}")]
pub struct InvalidFigure(pub u8);

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: u8,
    /// Lines for the CSV comment header.
    pub comments: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn steps(count: usize, step: f64) -> Vec<f64> {
    (0..=count).map(|i| i as f64 * step).collect()
}

fn squeezing_grid() -> Vec<f64> {
    steps(30, 0.1)
}

fn loss_grid() -> Vec<f64> {
    steps(20, 0.05)
}

const CLOSED_PRINTED: Approach = Approach::Closed(FormulaVariant::Printed);
const CLOSED_CORRECTED: Approach = Approach::Closed(FormulaVariant::Corrected);

fn part(family: Family, alphas: &[f64], r_grid: Vec<f64>, loss_grid: Vec<f64>, methods: &[Approach]) -> SweepConfig {
    SweepConfig {
        families: vec![family],
        alpha_grid: alphas.to_vec(),
        r_grid,
        loss_grid,
        topology: TopologyChoice::Auto,
        methods: methods.to_vec(),
        quad: QuadratureConfig::default(),
        seed: 0,
        out: None,
    }
}

/// Sweeps making up figure `id`, in output order.
pub fn figure_parts(id: u8) -> Result<Vec<SweepConfig>, InvalidFigure> {
    let photon = [CLOSED_PRINTED, Approach::Quadrature];
    let hybrid = [CLOSED_PRINTED, CLOSED_CORRECTED, Approach::Quadrature];
    let parts = match id {
        1 | 2 => {
            let hybrid_family = if id == 1 { Family::HqA } else { Family::HqB };
            vec![
                part(Family::Spq, &[0.0], squeezing_grid(), vec![0.0], &photon),
                part(hybrid_family, &HYBRID_ALPHAS, squeezing_grid(), vec![0.0], &hybrid),
            ]
        }
        3 => vec![
            part(Family::SingleRail, &[0.0], squeezing_grid(), vec![0.0], &photon),
            part(Family::CoherentQubit, &COHERENT_ALPHAS, squeezing_grid(), vec![0.0], &[Approach::Quadrature]),
        ],
        4 | 5 => {
            let hybrid_family = if id == 4 { Family::HqA } else { Family::HqB };
            vec![
                part(Family::Spq, &[0.0], LOSS_SQUEEZINGS.to_vec(), loss_grid(), &photon),
                part(hybrid_family, &HYBRID_ALPHAS, LOSS_SQUEEZINGS.to_vec(), loss_grid(), &hybrid),
            ]
        }
        other => return Err(InvalidFigure(other)),
    };
    Ok(parts)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn comments(id: u8) -> Vec<String> {
    let title = match id {
        1 => "figure 1: dual-rail single-photon qubit vs hybrid qubit type A, lossless channel, fidelity vs r",
        2 => "figure 2: dual-rail single-photon qubit vs hybrid qubit type B, lossless channel, fidelity vs r",
        3 => "figure 3: single-rail photon qubit vs coherent-state qubit, single-mode channel, fidelity vs r",
        4 => "figure 4: dual-rail single-photon qubit vs hybrid qubit type A under symmetric loss, fidelity vs R",
        _ => "figure 5: dual-rail single-photon qubit vs hybrid qubit type B under symmetric loss, fidelity vs R",
    };
    let alphas = if id == 3 { join(&COHERENT_ALPHAS) } else { join(&HYBRID_ALPHAS) };
    let mut lines = vec![title.to_owned(), format!("alpha set: {alphas} (chosen to span the alpha ~ 1 crossover)")];
    if id >= 4 {
        lines.push(format!("squeezing values: {}", join(&LOSS_SQUEEZINGS)));
    }
    lines.push("alpha is 0 for families that do not depend on it".to_owned());
    lines
}

pub fn reproduce_figure(id: u8) -> Result<FigureData, InvalidFigure> {
    let rows = figure_parts(id)?.iter().flat_map(run_sweep).collect();
    Ok(FigureData { id, comments: comments(id), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_ids() {
        assert_eq!(figure_parts(0), Err(InvalidFigure(0)));
        assert_eq!(figure_parts(6), Err(InvalidFigure(6)));
    }

    #[test]
    fn grids() {
        let r = squeezing_grid();
        assert_eq!((r.len(), r[0], r[30]), (31, 0.0, 3.0));
        let l = loss_grid();
        assert_eq!((l.len(), l[20]), (21, 1.0));
    }

    #[test]
    fn every_part_has_quadrature_rows() {
        for id in 1..=5 {
            for p in figure_parts(id).unwrap() {
                assert!(p.methods.contains(&Approach::Quadrature));
                p.validate().unwrap();
            }
        }
    }
}
