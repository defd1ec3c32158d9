//! CSV artifacts. Every number is written as `{:.16e}` (17 significant
//! digits) so files round-trip exactly and are byte-identical across runs.

use std::io::Write;

use broadbeam_core::analytics::EmpiricalCdf;
use broadbeam_core::beamforming::{radiated_power_pattern, DualPolWeights};
use broadbeam_core::em::{reflection_coefficients, Material};
use broadbeam_core::pg::PGGrid;
use broadbeam_core::to_db;

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn write_rows<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    rows: impl IntoIterator<Item = [f64; N]>,
) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.map(fmt_num))?;
    }
    w.flush()?;
    Ok(())
}

/// `x, y, pg_linear, pg_db` in grid order.
pub fn write_coverage<W: Write>(out: W, grid: &PGGrid) -> csv::Result<()> {
    let rows = (0..grid.len()).map(|i| [grid.x[i], grid.y[i], grid.pg[i], to_db(grid.pg[i])]);
    write_rows(out, ["x", "y", "pg_linear", "pg_db"], rows)
}

/// `pg_db, cdf` at each distinct sample of a CDF over dB values.
pub fn write_cdf<W: Write>(out: W, cdf_db: &EmpiricalCdf) -> csv::Result<()> {
    write_rows(
        out,
        ["pg_db", "cdf"],
        cdf_db.steps().into_iter().map(|(v, f)| [v, f]),
    )
}

/// Reflection coefficients for `θ_i = 0, step, …, 90°`.
pub fn write_reflection<W: Write>(
    out: W,
    material: &Material,
    freq: f64,
    step_deg: f64,
) -> csv::Result<()> {
    let n = (90.0 / step_deg + 1e-9).floor() as usize;
    let rows = (0..=n).map(|i| {
        // hit 90° exactly on the last sample
        let deg = if i == n && (n as f64 * step_deg - 90.0).abs() < 1e-9 {
            90.0
        } else {
            i as f64 * step_deg
        };
        let r = reflection_coefficients(material, freq, deg.to_radians());
        [
            deg,
            r.gamma_perp.re,
            r.gamma_perp.im,
            r.gamma_perp.norm(),
            r.gamma_par.re,
            r.gamma_par.im,
            r.gamma_par.norm(),
        ]
    });
    write_rows(
        out,
        [
            "theta_deg",
            "gamma_perp_re",
            "gamma_perp_im",
            "gamma_perp_abs",
            "gamma_par_re",
            "gamma_par_im",
            "gamma_par_abs",
        ],
        rows,
    )
}

/// Azimuth cut of the total radiated power, `samples` points over
/// `[−180°, 180°]`.
pub fn write_pattern<W: Write>(
    out: W,
    weights: &DualPolWeights,
    spacing: f64,
    wavelength: f64,
    theta: f64,
    samples: usize,
) -> csv::Result<()> {
    let rows = (0..samples).map(|i| {
        let deg = if samples == 1 {
            0.0
        } else {
            -180.0 + 360.0 * i as f64 / (samples - 1) as f64
        };
        let p = radiated_power_pattern(weights, spacing, wavelength, deg.to_radians(), theta, 1.0);
        [deg, p, to_db(p)]
    });
    write_rows(out, ["phi_deg", "power_linear", "power_db"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use broadbeam_core::beamforming::dbf_weights;

    #[test]
    fn reflection_rows_end_at_grazing() {
        let mut buf = Vec::new();
        write_reflection(&mut buf, &Material::metal(), 2.6e9, 0.1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 902);
        assert!(lines[0].starts_with("theta_deg,gamma_perp_re"));
        let last: Vec<f64> = lines[901].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(last[0], 90.0);
        assert_eq!((last[1], last[4]), (-1.0, -1.0));
    }

    #[test]
    fn pattern_is_flat_in_file() {
        let mut buf = Vec::new();
        let lam = broadbeam_core::wavelength(2.6e9);
        write_pattern(&mut buf, &dbf_weights(8).unwrap(), lam / 2.0, lam, 0.0, 361).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(1) {
            let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((p - 16.0).abs() < 1e-9);
        }
    }
}
