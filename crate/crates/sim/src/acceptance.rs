//! Acceptance criteria. Criteria 1–7 need no sweep; 8–13 read the grids of
//! the full study; 14 (runtime and byte identity) is measured by callers.

use std::f64::consts::PI;
use std::time::Instant;

use broadbeam_core::analytics::{ks_distance, quantile_dominance, EmpiricalCdf};
use broadbeam_core::beamforming::{
    dbf_weights, radiated_power_pattern, slot_precoder, PrecoderKind,
};
use broadbeam_core::em::{intrinsic_impedance, reflection_coefficients, wave_constants, Material};
use broadbeam_core::geometry::Point2;
use broadbeam_core::pg::{
    pg_point, symbol_oracle, total_transmit_energy, BeamformerSet, CaseConfig, CaseId,
};
use broadbeam_core::scenario::{Environment, Scenario, CARRIER_HZ};
use broadbeam_core::{to_db, wavelength, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::experiment::{BandName, MatrixResults};

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Criterion {
            id,
            name,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

const ALL_PS: [f64; 5] = [0.01, 0.05, 0.1, 0.25, 0.5];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Worst relative deviation of the pattern sum from `2K` on the
/// 3601 × 19 (azimuth × elevation) grid.
pub fn flatness_deviation(k: usize) -> f64 {
    let lam = wavelength(CARRIER_HZ);
    let w = dbf_weights(k).expect("power of two");
    let target = 2.0 * k as f64;
    let mut worst = 0.0_f64;
    for it in 0..19 {
        let theta = (-90.0 + 10.0 * it as f64).to_radians();
        for ip in 0..3601 {
            let phi = (-180.0 + 0.1 * ip as f64).to_radians();
            let p = radiated_power_pattern(&w, lam / 2.0, lam, phi, theta, 1.0);
            worst = worst.max(rel(p, target));
        }
    }
    worst
}

pub fn criterion_1() -> Criterion {
    let start = Instant::now();
    let worst = [1, 2, 4, 8]
        .map(flatness_deviation)
        .into_iter()
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Criterion::new(
        1,
        "flat-beam contract",
        worst < 1e-9 && secs < 5.0,
        format!("max relative deviation {worst:.3e} for K in {{1,2,4,8}}, {secs:.2} s"),
    )
}

pub fn criterion_2() -> Criterion {
    let lam = wavelength(CARRIER_HZ);
    let w = dbf_weights(8).expect("power of two");
    let worst = (0..3601)
        .map(|i| {
            let phi = (-180.0 + 0.1 * i as f64).to_radians();
            (radiated_power_pattern(&w, lam / 2.0, lam, phi, 0.0, 1.0) - 16.0).abs()
        })
        .fold(0.0, f64::max);
    Criterion::new(
        2,
        "K=8 azimuth pattern is 16 (12.04 dB)",
        worst < 1e-9,
        format!("max |P − 16| = {worst:.3e}, 16 = {:.2} dB", to_db(16.0)),
    )
}

pub fn criterion_3() -> Criterion {
    let start = Instant::now();
    let f = CARRIER_HZ;
    let fs = Material::free_space();
    let eta0 = intrinsic_impedance(&fs, f);
    let beta0 = wave_constants(&fs, f).beta;
    let eta_c = intrinsic_impedance(&Material::concrete(), f);
    let metal = wave_constants(&Material::metal(), f);
    let eta_m = intrinsic_impedance(&Material::metal(), f);
    let checks = [
        rel(eta0.re, 376.7) < 0.01 && eta0.im == 0.0,
        rel(beta0.re, 54.5) < 0.01 && beta0.im == 0.0,
        crel(eta_c, Complex64::new(160.0, 20.0)) < 0.10,
        crel(metal.alpha, Complex64::new(3.2e5, 0.0)) < 0.10,
        crel(metal.beta, Complex64::new(3.2e5, 0.0)) < 0.10,
        crel(eta_m, Complex64::new(0.02, 0.02)) < 0.20,
    ];
    let secs = start.elapsed().as_secs_f64();
    Criterion::new(
        3,
        "material constants",
        checks.iter().all(|&c| c) && secs < 1.0,
        format!(
            "η0 = {:.2} Ω, β0 = {:.3} rad/m, η_concrete = {:.1}{:+.1}j Ω, metal α = {:.3e}, β = {:.3e}, η_metal = {:.4}{:+.4}j Ω",
            eta0.re, beta0.re, eta_c.re, eta_c.im, metal.alpha.re, metal.beta.re, eta_m.re, eta_m.im
        ),
    )
}

pub fn criterion_4() -> Criterion {
    let f = CARRIER_HZ;
    let metal = Material::metal();
    let concrete = Material::concrete();
    let metal_ok = (0..=8500).all(|i| {
        let r = reflection_coefficients(&metal, f, (i as f64 * 0.01).to_radians());
        r.gamma_perp.norm() > 0.99
            && r.gamma_par.norm() > 0.99
            && r.gamma_perp.re < 0.0
            && r.gamma_par.re > 0.0
    });
    let (mut min_deg, mut min_abs) = (0.0, f64::INFINITY);
    for i in 0..=8900 {
        let deg = i as f64 * 0.01;
        let a = reflection_coefficients(&concrete, f, deg.to_radians())
            .gamma_par
            .norm();
        if a < min_abs {
            (min_deg, min_abs) = (deg, a);
        }
    }
    let brewster_ok = (60.0..=70.0).contains(&min_deg);
    let grazing_ok = [&metal, &concrete].iter().all(|m| {
        let r = reflection_coefficients(m, f, PI / 2.0);
        r.gamma_perp == Complex64::new(-1.0, 0.0) && r.gamma_par == Complex64::new(-1.0, 0.0)
    });
    Criterion::new(
        4,
        "reflection coefficient behavior",
        metal_ok && brewster_ok && grazing_ok,
        format!(
            "metal |γ| > 0.99 with γ⊥≈−1, γ∥≈+1 on [0°, 85°]: {metal_ok}; concrete |γ∥| minimum {min_abs:.4} at {min_deg:.2}°; both −1 at 90°: {grazing_ok}"
        ),
    )
}

/// Largest relative error of `‖Φc‖² = ‖c‖²` over random `c`.
pub fn proposition_identity_error(trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = [
        (4, 4, PrecoderKind::Hadamard),
        (4, 4, PrecoderKind::Dft),
        (8, 4, PrecoderKind::Hadamard),
        (5, 3, PrecoderKind::Dft),
    ];
    let mut worst = 0.0_f64;
    for (t, l, kind) in shapes {
        let phi = slot_precoder(t, l, kind).expect("T >= L");
        for _ in 0..trials {
            let c: Vec<Complex64> = (0..l)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let lhs: f64 = phi.matrix().mul_vec(&c).iter().map(|z| z.norm_sqr()).sum();
            let rhs: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            worst = worst.max(rel(lhs, rhs));
        }
    }
    worst
}

fn random_point(rng: &mut impl Rng, scenario: &Scenario) -> Point2 {
    let a = &scenario.area;
    // keep off the reflector planes themselves
    let x = rng.random_range(a.x0..a.x1);
    let y = rng.random_range(a.y0..=a.y1);
    Point2::new(if x == a.x0 { (a.x0 + a.x1) / 2.0 } else { x }, y)
}

/// Case-4 PG against the sum of single-AP PGs at random LoS receivers.
pub fn cross_ap_cancellation_error(points: usize, seed: u64) -> broadbeam_core::Result<f64> {
    let case4 = CaseConfig::reference(
        CaseId::DistributedPrecoded,
        Environment::Los,
        PrecoderKind::Hadamard,
    )?;
    let BeamformerSet::SlotPrecoded { base, .. } = &case4.beamformers else {
        unreachable!("case 4 is slot precoded")
    };
    let singles = (0..case4.scenario.aps.len())
        .map(|l| {
            let mut s = case4.scenario.clone();
            s.aps = vec![s.aps[l].clone()];
            CaseConfig::new(
                CaseId::CollocatedDbf,
                s,
                BeamformerSet::Simultaneous(vec![base[l].clone()]),
            )
        })
        .collect::<broadbeam_core::Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let rx = random_point(&mut rng, &case4.scenario);
        let f = case4.scenario.carrier_hz;
        let total = pg_point(&case4, rx, f)?;
        let sum = singles
            .iter()
            .map(|c| pg_point(c, rx, f))
            .sum::<broadbeam_core::Result<f64>>()?;
        worst = worst.max(rel(total, sum));
    }
    Ok(worst)
}

pub fn criterion_5() -> Criterion {
    let identity = proposition_identity_error(1000, 5);
    match cross_ap_cancellation_error(200, 55) {
        Ok(pg_err) => Criterion::new(
            5,
            "orthogonal slot precoding",
            identity < 1e-12 && pg_err < 1e-9,
            format!("‖Φc‖² vs ‖c‖² max rel error {identity:.3e}; case 4 vs Σ single-AP PG max rel error {pg_err:.3e}"),
        ),
        Err(e) => Criterion::new(5, "orthogonal slot precoding", false, format!("error: {e}")),
    }
}

/// Worst relative gap between the PG formula and the symbol oracle over
/// `points` random receivers.
pub fn oracle_gap(config: &CaseConfig, points: usize, seed: u64) -> broadbeam_core::Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = config.scenario.carrier_hz;
    let mut worst = 0.0_f64;
    for i in 0..points {
        let rx = random_point(&mut rng, &config.scenario);
        let formula = pg_point(config, rx, f)?;
        let oracle = symbol_oracle(config, rx, f, 2, seed ^ i as u64)?;
        worst = worst.max(rel(oracle, formula));
    }
    Ok(worst)
}

pub fn criterion_6() -> Criterion {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for case in CaseId::ALL {
        for env in Environment::ALL {
            let gap = CaseConfig::reference(case, env, PrecoderKind::Dft)
                .and_then(|c| oracle_gap(&c, 100, 600 + case.number() as u64));
            match gap {
                Ok(g) => worst = worst.max(g),
                Err(e) => failures.push(format!("case {} {}: {e}", case.number(), env.name())),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Criterion::new(
        6,
        "symbol oracle equals PG formula",
        failures.is_empty() && worst < 1e-9 && secs < 30.0,
        if failures.is_empty() {
            format!(
                "max rel gap {worst:.3e} over 100 points × 4 cases × 3 environments, {secs:.2} s"
            )
        } else {
            failures.join("; ")
        },
    )
}

pub fn criterion_7() -> Criterion {
    let energies: Vec<f64> = CaseId::ALL
        .iter()
        .map(|&c| {
            CaseConfig::reference(c, Environment::Los, PrecoderKind::Hadamard)
                .map(|cfg| total_transmit_energy(&cfg))
                .unwrap_or(f64::NAN)
        })
        .collect();
    let worst = energies
        .iter()
        .map(|e| (e - 16.0).abs())
        .fold(0.0, f64::max);
    Criterion::new(
        7,
        "equal transmit energy",
        worst < 1e-12,
        format!("energies {energies:?}, max |E − 16| = {worst:.3e}"),
    )
}

/// Criteria that do not need the coverage grids.
pub fn static_criteria() -> Vec<Criterion> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ]
}

fn q(cdf: &EmpiricalCdf, p: f64) -> f64 {
    cdf.quantile(p)
}

/// Criteria 8–13 from the grids of the full study.
pub fn grid_criteria(m: &MatrixResults) -> anyhow::Result<Vec<Criterion>> {
    use BandName::{Nb, Wb};
    use CaseId::*;
    use Environment::{Concrete, Los, Metal};

    let mut out = Vec::new();

    let ks12 = ks_distance(
        m.cdf(CollocatedDbf, Nb, Los)?,
        m.cdf(CollocatedOstbc, Nb, Los)?,
    );
    out.push(Criterion::new(
        8,
        "LoS NB: cases 1 and 2 match",
        ks12 < 0.05,
        format!("KS distance {ks12:.4}"),
    ));

    let (c3, c4) = (
        m.cdf(DistributedDbf, Nb, Los)?,
        m.cdf(DistributedPrecoded, Nb, Los)?,
    );
    let gain = q(c4, 0.01) - q(c3, 0.01);
    let dom = quantile_dominance(c4, c3, &ALL_PS);
    out.push(Criterion::new(
        9,
        "LoS NB: case 4 avoids the fades of case 3",
        gain >= 10.0 && dom,
        format!(
            "1% quantile case 4 {:.2} dB vs case 3 {:.2} dB (gain {gain:.2} dB); dominance: {dom}",
            q(c4, 0.01),
            q(c3, 0.01)
        ),
    ));

    let mut ok10 = true;
    let mut d10 = Vec::new();
    for env in [Metal, Concrete] {
        let dom = quantile_dominance(
            m.cdf(CollocatedOstbc, Nb, env)?,
            m.cdf(CollocatedDbf, Nb, env)?,
            &ALL_PS,
        );
        ok10 &= dom;
        d10.push(format!("{}: {dom}", env.name()));
    }
    out.push(Criterion::new(
        10,
        "NLoS NB: case 2 dominates case 1",
        ok10,
        d10.join(", "),
    ));

    let mut ok11 = true;
    let mut d11 = Vec::new();
    for env in [Metal, Concrete] {
        let gap = |b| -> anyhow::Result<f64> {
            Ok(q(m.cdf(CollocatedOstbc, b, env)?, 0.1) - q(m.cdf(CollocatedDbf, b, env)?, 0.1))
        };
        let (nb, wb) = (gap(Nb)?, gap(Wb)?);
        let dom = quantile_dominance(
            m.cdf(CollocatedOstbc, Wb, env)?,
            m.cdf(CollocatedDbf, Wb, env)?,
            &ALL_PS,
        );
        ok11 &= wb < nb && dom;
        d11.push(format!(
            "{}: 10% gap NB {nb:.2} dB, WB {wb:.2} dB, WB dominance {dom}",
            env.name()
        ));
    }
    out.push(Criterion::new(
        11,
        "NLoS WB: case 2 lead over case 1 shrinks",
        ok11,
        d11.join("; "),
    ));

    let mut ok12 = true;
    let mut d12 = Vec::new();
    for env in [Metal, Concrete] {
        let dom = quantile_dominance(
            m.cdf(DistributedPrecoded, Nb, env)?,
            m.cdf(DistributedDbf, Nb, env)?,
            &ALL_PS[..4],
        );
        let diff =
            q(m.cdf(DistributedPrecoded, Wb, env)?, 0.1) - q(m.cdf(DistributedDbf, Wb, env)?, 0.1);
        ok12 &= dom && diff.abs() < 1.0;
        d12.push(format!(
            "{}: NB dominance {dom}, WB 10% difference {diff:.2} dB",
            env.name()
        ));
    }
    out.push(Criterion::new(
        12,
        "D-MIMO NLoS: case 4 vs case 3",
        ok12,
        d12.join("; "),
    ));

    let ks_wb = ks_distance(
        m.cdf(DistributedDbf, Wb, Los)?,
        m.cdf(DistributedPrecoded, Wb, Los)?,
    );
    let ks_nb = ks_distance(
        m.cdf(DistributedDbf, Nb, Los)?,
        m.cdf(DistributedPrecoded, Nb, Los)?,
    );
    out.push(Criterion::new(
        13,
        "LoS WB: case 3 approaches case 4",
        ks_wb < 0.1 && ks_nb > 0.3,
        format!("KS WB {ks_wb:.4}, NB {ks_nb:.4}"),
    ));
    Ok(out)
}

/// Checks that must hold for any configuration the CLI runs: energy
/// parity, unit-modulus broad-beam weights with a flat pattern, and
/// agreement with the symbol oracle.
pub fn hard_invariants(config: &CaseConfig, seed: u64) -> Vec<String> {
    let mut failures = Vec::new();
    let expected = 2.0 * config.scenario.total_antennas() as f64;
    let energy = total_transmit_energy(config);
    if (energy - expected).abs() > 1e-12 * expected {
        failures.push(format!("transmit energy {energy} != {expected}"));
    }
    let weights: Vec<_> = match &config.beamformers {
        BeamformerSet::Simultaneous(ws) => ws.iter().collect(),
        BeamformerSet::SlotPrecoded { base, .. } => base.iter().collect(),
        BeamformerSet::Ostbc(_) => Vec::new(),
    };
    let lam = config.scenario.wavelength();
    for w in weights {
        if !w.is_unit_modulus() {
            failures.push("broad-beam weights are not unit modulus".into());
        }
        let k = w.len() as f64;
        let flat = (0..3601).all(|i| {
            let phi = (-180.0 + 0.1 * i as f64).to_radians();
            rel(
                radiated_power_pattern(w, lam / 2.0, lam, phi, 0.0, 1.0),
                2.0 * k,
            ) < 1e-9
        });
        if !flat {
            failures.push("broad-beam pattern is not flat".into());
        }
    }
    match oracle_gap(config, 20, seed) {
        Ok(g) if g < 1e-9 => {}
        Ok(g) => failures.push(format!("symbol oracle differs from PG formula by {g:.3e}")),
        Err(e) => failures.push(format!("oracle check failed: {e}")),
    }
    failures
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub criteria: Vec<Criterion>,
    pub all_passed: bool,
}

impl Report {
    pub fn new(criteria: Vec<Criterion>) -> Report {
        let all_passed = criteria.iter().all(|c| c.passed);
        Report {
            criteria,
            all_passed,
        }
    }
}
