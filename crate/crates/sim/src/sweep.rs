//! Multi-threaded grid sweep.

use broadbeam_core::pg::{evaluate_sample, Band, CaseConfig, PGGrid, SweepWarning};
use broadbeam_core::Result;
use rayon::prelude::*;

/// Same result as [`broadbeam_core::pg::sweep`], evaluated on the rayon
/// pool. Samples are collected in grid order, so the output does not
/// depend on scheduling.
pub fn par_sweep(config: &CaseConfig, band: &Band) -> Result<PGGrid> {
    let area = &config.scenario.area;
    let (nx, ny) = area.shape();
    let points = area.points();
    let values = points
        .par_iter()
        .map(|&p| evaluate_sample(config, band, p))
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut pg = Vec::with_capacity(values.len());
    for (index, ((v, moved), p)) in values.into_iter().zip(&points).enumerate() {
        pg.push(v);
        if let Some(evaluated_at) = moved {
            log::debug!(
                "sample ({}, {}) is degenerate, evaluated at ({}, {})",
                p.x,
                p.y,
                evaluated_at.x,
                evaluated_at.y
            );
            warnings.push(SweepWarning {
                index,
                nominal: *p,
                evaluated_at,
            });
        }
    }
    if !warnings.is_empty() {
        log::info!(
            "{} degenerate samples moved by half a grid cell",
            warnings.len()
        );
    }
    Ok(PGGrid {
        nx,
        ny,
        x: points.iter().map(|p| p.x).collect(),
        y: points.iter().map(|p| p.y).collect(),
        pg,
        warnings,
    })
}
