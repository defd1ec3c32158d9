use std::f64::consts::PI;

use broadbeam_core::analytics::build_cdf;
use broadbeam_core::beamforming::{random_phase_weights, OstbcMatrix, PrecoderKind, SlotPrecoder};
use broadbeam_core::channel::{path_channels, subcarrier_plan, SubcarrierPlan};
use broadbeam_core::geometry::{Point2, Polarization};
use broadbeam_core::pg::{
    pg_point, pg_point_wideband, sweep, symbol_oracle, total_transmit_energy, Band, BeamformerSet,
    CaseConfig, CaseId, ReceiverLinks,
};
use broadbeam_core::scenario::{Environment, Scenario};
use broadbeam_core::{to_db, wavelength, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference(case: CaseId, env: Environment) -> CaseConfig {
    CaseConfig::reference(case, env, PrecoderKind::Hadamard).unwrap()
}

fn random_rx(rng: &mut impl Rng) -> Point2 {
    Point2::new(rng.random_range(0.01..9.99), rng.random_range(0.0..20.0))
}

fn frobenius(config: &CaseConfig, rx: Point2, f: f64) -> f64 {
    let links = ReceiverLinks::new(&config.scenario, rx).unwrap();
    Polarization::BOTH
        .iter()
        .flat_map(|&pol| links.links()[0].vector_channel(f, pol))
        .flat_map(|h| h.into_iter())
        .map(|z| z.norm_sqr())
        .sum()
}

fn single_ap_configs(
    config: &CaseConfig,
    base: &[broadbeam_core::beamforming::DualPolWeights],
) -> Vec<CaseConfig> {
    (0..config.scenario.aps.len())
        .map(|l| {
            let mut s = config.scenario.clone();
            s.aps = vec![s.aps[l].clone()];
            CaseConfig::new(
                CaseId::CollocatedDbf,
                s,
                BeamformerSet::Simultaneous(vec![base[l].clone()]),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn oracle_matches_formula_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in CaseId::ALL {
        for env in Environment::ALL {
            for kind in [PrecoderKind::Dft, PrecoderKind::Hadamard] {
                let c = CaseConfig::reference(case, env, kind).unwrap();
                for i in 0..100 {
                    let rx = random_rx(&mut rng);
                    let f = c.scenario.carrier_hz;
                    let pg = pg_point(&c, rx, f).unwrap();
                    let oracle = symbol_oracle(&c, rx, f, 3, i).unwrap();
                    assert!(
                        (oracle - pg).abs() / pg < 1e-9,
                        "case {case:?} {env:?} at {rx:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn equal_energy_in_every_case() {
    for kind in [PrecoderKind::Dft, PrecoderKind::Hadamard] {
        for case in CaseId::ALL {
            let c = CaseConfig::reference(case, Environment::Los, kind).unwrap();
            assert!((total_transmit_energy(&c) - 16.0).abs() < 1e-12, "{case:?}");
        }
    }
}

#[test]
fn ostbc_gain_is_channel_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for env in Environment::ALL {
        let dft = CaseConfig::reference(CaseId::CollocatedOstbc, env, PrecoderKind::Dft).unwrap();
        let had = CaseConfig::new(
            CaseId::CollocatedOstbc,
            dft.scenario.clone(),
            BeamformerSet::Ostbc(OstbcMatrix::hadamard(8).unwrap()),
        )
        .unwrap();
        assert_ne!(dft.beamformers, had.beamformers);
        for _ in 0..200 {
            let rx = random_rx(&mut rng);
            let f = dft.scenario.carrier_hz;
            let want = frobenius(&dft, rx, f);
            for c in [&dft, &had] {
                let pg = pg_point(c, rx, f).unwrap();
                assert!((pg - want).abs() <= 1e-12 * want);
            }
        }
    }
}

#[test]
fn identity_precoder_removes_interference() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for env in Environment::ALL {
        for phi in [
            SlotPrecoder::identity(4),
            broadbeam_core::beamforming::slot_precoder(4, 4, PrecoderKind::Hadamard).unwrap(),
            broadbeam_core::beamforming::slot_precoder(8, 4, PrecoderKind::Dft).unwrap(),
        ] {
            let base_cfg = reference(CaseId::DistributedPrecoded, env);
            let BeamformerSet::SlotPrecoded { base, .. } = &base_cfg.beamformers else {
                panic!()
            };
            let base = base.clone();
            let cfg = CaseConfig::new(
                CaseId::DistributedPrecoded,
                base_cfg.scenario.clone(),
                BeamformerSet::SlotPrecoded {
                    base: base.clone(),
                    precoder: phi,
                },
            )
            .unwrap();
            let singles = single_ap_configs(&cfg, &base);
            for _ in 0..100 {
                let rx = random_rx(&mut rng);
                let f = cfg.scenario.carrier_hz;
                let total = pg_point(&cfg, rx, f).unwrap();
                let sum: f64 = singles.iter().map(|c| pg_point(c, rx, f).unwrap()).sum();
                assert!((total - sum).abs() <= 1e-9 * sum);
            }
        }
    }
}

#[test]
fn single_antenna_closed_form() {
    let mut s = Scenario::collocated();
    s.aps[0].num_dualpol = 1;
    let w = broadbeam_core::beamforming::dbf_weights(1).unwrap();
    let c = CaseConfig::new(
        CaseId::CollocatedDbf,
        s,
        BeamformerSet::Simultaneous(vec![w]),
    )
    .unwrap();
    let lam = c.scenario.wavelength();
    let pg = pg_point(&c, Point2::new(5.0, 0.0), c.scenario.carrier_hz).unwrap();
    let want = 2.0 * (lam / (4.0 * PI * 10.0)).powi(2);
    assert!((pg - want).abs() <= 1e-12 * want);
}

#[test]
fn vertical_part_ignores_horizontal_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for env in [Environment::Concrete, Environment::Metal] {
        let c = reference(CaseId::DistributedDbf, env);
        let BeamformerSet::Simultaneous(ws) = &c.beamformers else {
            panic!()
        };
        for _ in 0..100 {
            let rx = random_rx(&mut rng);
            let f = c.scenario.carrier_hz;
            let links = ReceiverLinks::new(&c.scenario, rx).unwrap();
            let mut e = [Complex64::new(0.0, 0.0); 3];
            let mut scalar = Complex64::new(0.0, 0.0);
            for (l, link) in links.links().iter().enumerate() {
                let field = link.field(f, Polarization::Vertical, &ws[l].w_v);
                for i in 0..3 {
                    e[i] += field[i];
                }
                for ch in path_channels(&c.scenario, l, rx, f, Polarization::Vertical).unwrap() {
                    assert_eq!(ch.direction.u, [0.0, 0.0, 1.0]);
                    scalar += ch
                        .coeffs
                        .iter()
                        .zip(&ws[l].w_v)
                        .map(|(g, w)| g * w)
                        .sum::<Complex64>();
                }
            }
            assert_eq!(
                (e[0], e[1]),
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            );
            assert!((e[2] - scalar).norm() <= 1e-12 * scalar.norm());
        }
    }
}

#[test]
fn random_phase_average_matches_ostbc() {
    let ostbc = reference(CaseId::CollocatedOstbc, Environment::Concrete);
    for rx in [Point2::new(2.0, 3.0), Point2::new(8.5, 17.0)] {
        let f = ostbc.scenario.carrier_hz;
        let target = pg_point(&ostbc, rx, f).unwrap();
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|seed| {
                let w = random_phase_weights(8, seed);
                let c = CaseConfig::new(
                    CaseId::CollocatedDbf,
                    ostbc.scenario.clone(),
                    BeamformerSet::Simultaneous(vec![w]),
                )
                .unwrap();
                pg_point(&c, rx, f).unwrap()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - target).abs() / target < 0.02, "{mean} vs {target}");
    }
}

#[test]
fn wideband_average() {
    let c = reference(CaseId::CollocatedDbf, Environment::Los);
    let rx = Point2::new(5.0, 0.0);
    let f = c.scenario.carrier_hz;
    let nb = pg_point(&c, rx, f).unwrap();
    let single = pg_point_wideband(&c, rx, &SubcarrierPlan::narrowband(f)).unwrap();
    assert_eq!(single, nb);
    let plan = subcarrier_plan(f, 100e6, 100).unwrap();
    let wb = pg_point_wideband(&c, rx, &plan).unwrap();
    assert!((wb - nb).abs() / nb < 0.01);
    let mean: f64 = plan
        .frequencies
        .iter()
        .map(|&g| pg_point(&c, rx, g).unwrap())
        .sum::<f64>()
        / 100.0;
    assert!((wb - mean).abs() <= 1e-12 * mean);
    assert!(wavelength(plan.frequencies[0]) > wavelength(plan.frequencies[99]));
}

#[test]
fn grid_shape_and_fades() {
    let mut q = Vec::new();
    for case in [CaseId::DistributedDbf, CaseId::DistributedPrecoded] {
        let c = reference(case, Environment::Los);
        let g = sweep(&c, &Band::Narrowband).unwrap();
        assert_eq!((g.nx, g.ny, g.len()), (101, 201, 20301));
        assert!(g.pg.iter().all(|&v| v >= 0.0 && v.is_finite()));
        let cdf = build_cdf(&g.pg).unwrap();
        q.push(to_db(cdf.quantile(0.0) / cdf.quantile(0.5)));
    }
    assert!(q[0] < -20.0, "case 3 min/median {} dB", q[0]);
    assert!(q[1] > -20.0, "case 4 min/median {} dB", q[1]);
}

#[test]
fn mismatched_beamformers_are_rejected() {
    let s = Scenario::distributed();
    let w = OstbcMatrix::dft(2);
    assert!(CaseConfig::new(CaseId::CollocatedOstbc, s, BeamformerSet::Ostbc(w)).is_err());
}
