//! Power gain (received energy, not normalized by transmit power) for the
//! four transmission cases.
//!
//! With `H_{χ,l} = Σ_n û⁽ⁿ⁾_{χ,l} g⁽ⁿ⁾ᵀ_{χ,l}` the 3×K_l vector channel of AP
//! `l`:
//!
//! | case | power gain |
//! |------|------------|
//! | 1 collocated broad beam | `Σ_χ ‖H_χ w_χ‖²` |
//! | 2 collocated OSTBC | `Σ_χ ‖H_χ W‖²_F` |
//! | 3 distributed broad beam | `Σ_χ ‖Σ_l H_{χ,l} w_{χ,l}‖²` |
//! | 4 distributed slot-precoded | `Σ_χ Σ_t ‖Σ_l H_{χ,l} [Φ]_{t,l} w_{χ,l}‖²` |
//!
//! All cases radiate the same total energy, `2·Σ_l K_l`: single-slot cases
//! use unit-modulus weights, the OSTBC code has entries of magnitude `1/√K`
//! and `Φ` has orthonormal columns.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beamforming::{
    dbf_weights, slot_precoder, unit_uniform, DualPolWeights, OstbcMatrix, PrecoderKind,
    SlotPrecoder,
};
use crate::channel::{apply, ApLink, SubcarrierPlan};
use crate::em::reflection_coefficients;
use crate::geometry::{
    antenna_positions, field_direction, mirror_image, PathGeometry, Point2, Polarization,
};
use crate::scenario::{Environment, Scenario};
use crate::{wavelength, Error, Result};

/// The four transmission schemes of the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// One AP, broad-beam weights, one slot.
    CollocatedDbf,
    /// One AP, OSTBC code over `K` slots on both polarizations.
    CollocatedOstbc,
    /// Several APs, each with the same broad-beam weights, one slot.
    DistributedDbf,
    /// Several APs, broad-beam weights spread over slots by `Φ`.
    DistributedPrecoded,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [
        CaseId::CollocatedDbf,
        CaseId::CollocatedOstbc,
        CaseId::DistributedDbf,
        CaseId::DistributedPrecoded,
    ];

    pub fn number(self) -> u8 {
        match self {
            CaseId::CollocatedDbf => 1,
            CaseId::CollocatedOstbc => 2,
            CaseId::DistributedDbf => 3,
            CaseId::DistributedPrecoded => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<CaseId> {
        CaseId::ALL.into_iter().find(|c| c.number() == n)
    }
}

/// Transmit coefficients of a case.
#[derive(Debug, Clone, PartialEq)]
pub enum BeamformerSet {
    /// Every AP sends its own weights in a single slot.
    Simultaneous(Vec<DualPolWeights>),
    /// Single AP sends column `s` of `W` on both polarizations in slot `s`.
    Ostbc(OstbcMatrix),
    /// AP `l` sends `[Φ]_{t,l}·W_l` in slot `t`.
    SlotPrecoded {
        base: Vec<DualPolWeights>,
        precoder: SlotPrecoder,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub case: CaseId,
    pub scenario: Scenario,
    pub beamformers: BeamformerSet,
}

impl CaseConfig {
    pub fn new(case: CaseId, scenario: Scenario, beamformers: BeamformerSet) -> Result<Self> {
        scenario.validate()?;
        let sizes: Vec<usize> = scenario.aps.iter().map(|ap| ap.num_dualpol).collect();
        let check_weights = |ws: &[DualPolWeights]| -> Result<()> {
            if ws.len() != sizes.len() {
                return Err(Error::invalid(
                    "weights",
                    "one weight pair per access point required",
                ));
            }
            if ws.iter().zip(&sizes).any(|(w, &k)| w.len() != k) {
                return Err(Error::invalid(
                    "weights",
                    "weight length must equal antenna count",
                ));
            }
            Ok(())
        };
        match (&beamformers, case) {
            (BeamformerSet::Simultaneous(ws), CaseId::CollocatedDbf | CaseId::DistributedDbf) => {
                if case == CaseId::CollocatedDbf && sizes.len() != 1 {
                    return Err(Error::invalid("aps", "the collocated case has a single AP"));
                }
                check_weights(ws)?
            }
            (BeamformerSet::Ostbc(w), CaseId::CollocatedOstbc) => {
                if sizes.len() != 1 || w.size() != sizes[0] {
                    return Err(Error::invalid(
                        "ostbc",
                        "code size must match the single AP's antenna count",
                    ));
                }
            }
            (BeamformerSet::SlotPrecoded { base, precoder }, CaseId::DistributedPrecoded) => {
                check_weights(base)?;
                if precoder.aps() != sizes.len() {
                    return Err(Error::invalid("precoder", "Φ must have one column per AP"));
                }
            }
            _ => return Err(Error::invalid("case", "beamformers do not match the case")),
        }
        Ok(CaseConfig {
            case,
            scenario,
            beamformers,
        })
    }

    /// The reference setup: cases 1–2 use one AP with eight antennas at
    /// (5, 10); cases 3–4 four two-antenna APs along x = 5. Case 4 uses a
    /// square `Φ` of the given kind.
    pub fn reference(case: CaseId, env: Environment, precoder: PrecoderKind) -> Result<Self> {
        let (scenario, beamformers) = match case {
            CaseId::CollocatedDbf => {
                let s = Scenario::collocated();
                let w = dbf_weights(s.aps[0].num_dualpol)?;
                (s, BeamformerSet::Simultaneous(vec![w]))
            }
            CaseId::CollocatedOstbc => {
                let s = Scenario::collocated();
                let w = OstbcMatrix::dft(s.aps[0].num_dualpol);
                (s, BeamformerSet::Ostbc(w))
            }
            CaseId::DistributedDbf => {
                let s = Scenario::distributed();
                let w = dbf_weights(s.aps[0].num_dualpol)?;
                (s.clone(), BeamformerSet::Simultaneous(vec![w; s.aps.len()]))
            }
            CaseId::DistributedPrecoded => {
                let s = Scenario::distributed();
                let w = dbf_weights(s.aps[0].num_dualpol)?;
                let l = s.aps.len();
                let phi = slot_precoder(l, l, precoder)?;
                (
                    s,
                    BeamformerSet::SlotPrecoded {
                        base: vec![w; l],
                        precoder: phi,
                    },
                )
            }
        };
        CaseConfig::new(case, scenario.with_environment(env), beamformers)
    }

    /// Number of time slots.
    pub fn slots(&self) -> usize {
        match &self.beamformers {
            BeamformerSet::Simultaneous(_) => 1,
            BeamformerSet::Ostbc(w) => w.size(),
            BeamformerSet::SlotPrecoded { precoder, .. } => precoder.slots(),
        }
    }

    /// Coefficients of AP `l` in slot `t`.
    pub fn slot_weights(&self, t: usize, l: usize) -> DualPolWeights {
        match &self.beamformers {
            BeamformerSet::Simultaneous(ws) => ws[l].clone(),
            BeamformerSet::Ostbc(w) => {
                let col = w.slot(t);
                DualPolWeights {
                    w_v: col.clone(),
                    w_h: col,
                }
            }
            BeamformerSet::SlotPrecoded { base, precoder } => base[l].scaled(precoder.entry(t, l)),
        }
    }
}

fn norm_sqr3(e: &[Complex64; 3]) -> f64 {
    e.iter().map(|z| z.norm_sqr()).sum()
}

/// Channels from every AP to one receiver, reusable across frequencies.
#[derive(Debug, Clone)]
pub struct ReceiverLinks {
    links: Vec<ApLink>,
}

impl ReceiverLinks {
    pub fn new(scenario: &Scenario, rx: Point2) -> Result<Self> {
        let links = (0..scenario.aps.len())
            .map(|l| ApLink::new(scenario, l, rx))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReceiverLinks { links })
    }

    pub fn links(&self) -> &[ApLink] {
        &self.links
    }

    /// Power gain at `freq`; `scratch` holds per-AP vector channels.
    fn pg(&self, config: &CaseConfig, freq: f64, scratch: &mut Vec<Vec<[Complex64; 3]>>) -> f64 {
        scratch.resize(self.links.len(), Vec::new());
        let mut total = 0.0;
        for pol in Polarization::BOTH {
            for (link, h) in self.links.iter().zip(scratch.iter_mut()) {
                link.vector_channel_into(freq, pol, h);
            }
            total += match &config.beamformers {
                BeamformerSet::Simultaneous(ws) => {
                    // cases 1 and 3
                    let mut e = [Complex64::new(0.0, 0.0); 3];
                    for (h, w) in scratch.iter().zip(ws) {
                        let f = apply(h, w.get(pol));
                        for i in 0..3 {
                            e[i] += f[i];
                        }
                    }
                    norm_sqr3(&e)
                }
                BeamformerSet::Ostbc(w) => {
                    // case 2: Frobenius norm of H·W over slot columns
                    let h = &scratch[0];
                    (0..w.size())
                        .map(|s| norm_sqr3(&apply(h, &w.slot(s))))
                        .sum()
                }
                BeamformerSet::SlotPrecoded { base, precoder } => {
                    // case 4: per-AP fields, then combine per slot with Φ
                    let fields: Vec<[Complex64; 3]> = scratch
                        .iter()
                        .zip(base)
                        .map(|(h, w)| apply(h, w.get(pol)))
                        .collect();
                    (0..precoder.slots())
                        .map(|t| {
                            let mut e = [Complex64::new(0.0, 0.0); 3];
                            for (l, f) in fields.iter().enumerate() {
                                let phi = precoder.entry(t, l);
                                for i in 0..3 {
                                    e[i] += f[i] * phi;
                                }
                            }
                            norm_sqr3(&e)
                        })
                        .sum()
                }
            };
        }
        total
    }
}

/// Narrowband power gain at `rx`.
pub fn pg_point(config: &CaseConfig, rx: Point2, freq: f64) -> Result<f64> {
    let links = ReceiverLinks::new(&config.scenario, rx)?;
    Ok(links.pg(config, freq, &mut Vec::new()))
}

/// Mean power gain over the subcarriers of `plan`.
pub fn pg_point_wideband(config: &CaseConfig, rx: Point2, plan: &SubcarrierPlan) -> Result<f64> {
    if plan.frequencies.is_empty() {
        return Err(Error::invalid("plan", "no subcarriers"));
    }
    let links = ReceiverLinks::new(&config.scenario, rx)?;
    Ok(mean_pg(&links, config, plan))
}

fn mean_pg(links: &ReceiverLinks, config: &CaseConfig, plan: &SubcarrierPlan) -> f64 {
    let mut scratch = Vec::new();
    let sum: f64 = plan
        .frequencies
        .iter()
        .map(|&f| links.pg(config, f, &mut scratch))
        .sum();
    sum / plan.frequencies.len() as f64
}

/// Narrowband at the carrier, or averaged over subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub enum Band {
    Narrowband,
    Wideband(SubcarrierPlan),
}

impl Band {
    pub fn name(&self) -> &'static str {
        match self {
            Band::Narrowband => "nb",
            Band::Wideband(_) => "wb",
        }
    }
}

/// A grid sample that could not be evaluated where it lies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepWarning {
    pub index: usize,
    pub nominal: Point2,
    pub evaluated_at: Point2,
}

/// Power gain over the service area, x-major ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct PGGrid {
    pub nx: usize,
    pub ny: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub pg: Vec<f64>,
    pub warnings: Vec<SweepWarning>,
}

impl PGGrid {
    pub fn len(&self) -> usize {
        self.pg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pg.is_empty()
    }
}

/// Evaluates one grid sample. Samples on a reflector plane or on an antenna
/// are moved half a grid cell toward the area interior (along x for a
/// plane, along y for an antenna) and reported.
pub fn evaluate_sample(
    config: &CaseConfig,
    band: &Band,
    rx: Point2,
) -> Result<(f64, Option<Point2>)> {
    let eval = |p: Point2| -> Result<f64> {
        let links = ReceiverLinks::new(&config.scenario, p)?;
        Ok(match band {
            Band::Narrowband => links.pg(config, config.scenario.carrier_hz, &mut Vec::new()),
            Band::Wideband(plan) => mean_pg(&links, config, plan),
        })
    };
    match eval(rx) {
        Ok(v) => Ok((v, None)),
        Err(Error::DegenerateGeometry(_)) => {
            let moved = nudge(config, rx);
            Ok((eval(moved)?, Some(moved)))
        }
        Err(e) => Err(e),
    }
}

fn nudge(config: &CaseConfig, rx: Point2) -> Point2 {
    let area = &config.scenario.area;
    let half = area.resolution / 2.0;
    let mut p = rx;
    let mid_x = (area.x0 + area.x1) / 2.0;
    if config.scenario.reflectors.iter().any(|r| r.plane_x == p.x) {
        p.x += if p.x <= mid_x { half } else { -half };
    }
    let on_antenna = config
        .scenario
        .aps
        .iter()
        .flat_map(antenna_positions)
        .any(|a| a == p || a == rx);
    if on_antenna || config.scenario.aps.iter().any(|ap| ap.center == p) {
        let mid_y = (area.y0 + area.y1) / 2.0;
        p.y += if p.y <= mid_y { half } else { -half };
    }
    p
}

/// Serial sweep over the whole service area.
pub fn sweep(config: &CaseConfig, band: &Band) -> Result<PGGrid> {
    let area = &config.scenario.area;
    let (nx, ny) = area.shape();
    let points = area.points();
    let mut grid = PGGrid {
        nx,
        ny,
        x: Vec::with_capacity(points.len()),
        y: Vec::with_capacity(points.len()),
        pg: Vec::with_capacity(points.len()),
        warnings: Vec::new(),
    };
    for (index, p) in points.into_iter().enumerate() {
        let (v, moved) = evaluate_sample(config, band, p)?;
        grid.x.push(p.x);
        grid.y.push(p.y);
        grid.pg.push(v);
        if let Some(evaluated_at) = moved {
            grid.warnings.push(SweepWarning {
                index,
                nominal: p,
                evaluated_at,
            });
        }
    }
    Ok(grid)
}

/// `Σ_slots Σ_χ Σ_l Σ_k |w|²`.
pub fn total_transmit_energy(config: &CaseConfig) -> f64 {
    (0..config.slots())
        .flat_map(|t| (0..config.scenario.aps.len()).map(move |l| (t, l)))
        .map(|(t, l)| config.slot_weights(t, l).energy())
        .sum()
}

/// Slot-by-slot transmission simulated from the raw path terms.
///
/// In every slot all antennas of all APs send their coefficient times one
/// random unit-modulus symbol on both polarizations at once; the received
/// 3-D field is accumulated path by path and its energy summed over slots.
/// The result is averaged over `num_random_symbols` independent symbol
/// draws.
pub fn symbol_oracle(
    config: &CaseConfig,
    rx: Point2,
    freq: f64,
    num_random_symbols: usize,
    seed: u64,
) -> Result<f64> {
    let scenario = &config.scenario;
    let lambda = wavelength(freq);
    let draws = num_random_symbols.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // per AP: antenna positions and per-path (image source, γ_V, γ_H, û_V, û_H)
    let mut aps = Vec::with_capacity(scenario.aps.len());
    for ap in &scenario.aps {
        let mut paths = Vec::new();
        let los = PathGeometry {
            length: ap.center.distance(rx),
            incidence_angle: 0.0,
            path_index: 0,
        };
        paths.push((
            None,
            [Complex64::new(1.0, 0.0); 2],
            field_direction(
                ap.center,
                rx,
                &los,
                &scenario.reflectors,
                Polarization::Vertical,
            )?,
            field_direction(
                ap.center,
                rx,
                &los,
                &scenario.reflectors,
                Polarization::Horizontal,
            )?,
        ));
        for (m, r) in scenario.reflectors.iter().enumerate() {
            let image = mirror_image(ap.center, r);
            let ray = rx - image;
            let theta_i = ray.y.abs().atan2(ray.x.abs());
            let pair = reflection_coefficients(&r.material, scenario.carrier_hz, theta_i);
            let geom = PathGeometry {
                length: ray.norm(),
                incidence_angle: theta_i,
                path_index: m + 1,
            };
            paths.push((
                Some(r),
                [pair.gamma_perp, pair.gamma_par],
                field_direction(
                    ap.center,
                    rx,
                    &geom,
                    &scenario.reflectors,
                    Polarization::Vertical,
                )?,
                field_direction(
                    ap.center,
                    rx,
                    &geom,
                    &scenario.reflectors,
                    Polarization::Horizontal,
                )?,
            ));
        }
        aps.push((antenna_positions(ap), paths));
    }

    let mut energy = 0.0;
    for _ in 0..draws {
        for t in 0..config.slots() {
            let symbol = Complex64::from_polar(1.0, 2.0 * PI * unit_uniform(&mut rng));
            let mut e = [Complex64::new(0.0, 0.0); 3];
            for (l, (antennas, paths)) in aps.iter().enumerate() {
                let w = config.slot_weights(t, l);
                for (k, &ant) in antennas.iter().enumerate() {
                    for (reflector, gamma, u_v, u_h) in paths {
                        let source = match reflector {
                            None => ant,
                            Some(r) => {
                                if (ant.x - r.plane_x).signum() != (rx.x - r.plane_x).signum()
                                    || rx.x == r.plane_x
                                {
                                    return Err(Error::DegenerateGeometry(
                                        "point lies on reflector plane",
                                    ));
                                }
                                mirror_image(ant, r)
                            }
                        };
                        let d = source.distance(rx);
                        if d == 0.0 {
                            return Err(Error::DegenerateGeometry(
                                "receiver coincides with antenna",
                            ));
                        }
                        let phase = Complex64::from_polar(1.0, -2.0 * PI * d / lambda);
                        let spread = lambda / (4.0 * PI * d);
                        for (gamma, u, wk) in [(gamma[0], u_v, w.w_v[k]), (gamma[1], u_h, w.w_h[k])]
                        {
                            let term = gamma * spread * phase * wk * symbol;
                            for (x, u) in e.iter_mut().zip(u.u) {
                                *x += term * u;
                            }
                        }
                    }
                }
            }
            energy += norm_sqr3(&e);
        }
    }
    Ok(energy / draws as f64)
}
