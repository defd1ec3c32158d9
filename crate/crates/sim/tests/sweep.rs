use broadbeam::core::beamforming::PrecoderKind;
use broadbeam::core::channel::subcarrier_plan;
use broadbeam::core::pg::{sweep, Band, CaseConfig, CaseId};
use broadbeam::core::scenario::Environment;
use broadbeam::output::{write_cdf, write_coverage};
use broadbeam::sweep::par_sweep;

fn coarse(case: CaseId, env: Environment) -> CaseConfig {
    let mut c = CaseConfig::reference(case, env, PrecoderKind::Dft).unwrap();
    c.scenario.area.resolution = 0.5;
    c
}

#[test]
fn parallel_sweep_is_bit_identical_to_serial() {
    let wb = Band::Wideband(subcarrier_plan(2.6e9, 100e6, 8).unwrap());
    for case in CaseId::ALL {
        for env in Environment::ALL {
            let cfg = coarse(case, env);
            for band in [Band::Narrowband, wb.clone()] {
                let a = sweep(&cfg, &band).unwrap();
                let b = par_sweep(&cfg, &band).unwrap();
                assert_eq!(a.x, b.x);
                assert_eq!(a.y, b.y);
                assert_eq!(
                    a.pg.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                    b.pg.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
                );
                assert_eq!(a.warnings.len(), b.warnings.len());
            }
        }
    }
}

#[test]
fn coverage_and_cdf_csv_layout() {
    let grid = par_sweep(
        &coarse(CaseId::DistributedDbf, Environment::Metal),
        &Band::Narrowband,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_coverage(&mut buf, &grid).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,pg_linear,pg_db"));
    assert_eq!(lines.count(), grid.len());
    assert_eq!(grid.len(), 21 * 41);

    let cdf = broadbeam::core::analytics::build_cdf(&grid.pg)
        .unwrap()
        .map_monotone(broadbeam::core::to_db);
    let mut buf = Vec::new();
    write_cdf(&mut buf, &cdf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "pg_db,cdf");
    let last: Vec<f64> = rows
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last[1], 1.0);
}
