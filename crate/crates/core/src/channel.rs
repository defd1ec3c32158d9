//! Free-space plus first-order-reflection channel.
//!
//! Each antenna-to-receiver channel is a sum of a line-of-sight term and one
//! term per reflector, `γ·λ/(4πd)·exp(−j2πd/λ)`. Paths are kept separate
//! because every path carries its own field direction. Reflection
//! coefficients are always evaluated at the scenario carrier, also when the
//! channel is synthesized at another subcarrier.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::em::reflection_coefficients;
use crate::geometry::{
    antenna_positions, field_direction, los_path, reflected_path, FieldDirection, PathGeometry,
    Point2, Polarization,
};
use crate::scenario::Scenario;
use crate::{wavelength, Error, Result, SPEED_OF_LIGHT};

/// `γ·λ/(4πd)·exp(−j2πd/λ)`.
pub fn path_coefficient(wavelength: f64, distance: f64, gamma: Complex64) -> Result<Complex64> {
    if distance.is_nan() || distance <= 0.0 {
        return Err(Error::invalid("distance", "must be > 0"));
    }
    if wavelength.is_nan() || wavelength <= 0.0 {
        return Err(Error::invalid("wavelength", "must be > 0"));
    }
    Ok(coefficient(wavelength, distance, gamma))
}

#[inline]
fn coefficient(wavelength: f64, distance: f64, gamma: Complex64) -> Complex64 {
    let amp = wavelength / (4.0 * PI * distance);
    let (s, c) = (-2.0 * PI * distance / wavelength).sin_cos();
    gamma * Complex64::new(amp * c, amp * s)
}

/// Channel of one path from every antenna of one AP.
#[derive(Debug, Clone, PartialEq)]
pub struct PathChannel {
    /// One coefficient per antenna, in [`antenna_positions`] order.
    pub coeffs: Vec<Complex64>,
    pub direction: FieldDirection,
    pub path_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct LinkPath {
    path_index: usize,
    /// Path length per antenna.
    lengths: Vec<f64>,
    /// Reflection coefficient per polarization (V, H); one for LoS.
    gamma: [Complex64; 2],
    direction: [FieldDirection; 2],
}

fn pol_index(pol: Polarization) -> usize {
    match pol {
        Polarization::Vertical => 0,
        Polarization::Horizontal => 1,
    }
}

/// Frequency-independent part of the channel between one AP and one
/// receiver: path lengths, carrier reflection coefficients and field
/// directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ApLink {
    paths: Vec<LinkPath>,
}

impl ApLink {
    pub fn new(scenario: &Scenario, ap_index: usize, rx: Point2) -> Result<ApLink> {
        let ap = scenario.aps.get(ap_index).ok_or(Error::OutOfRange {
            what: "access point",
            index: ap_index,
            len: scenario.aps.len(),
        })?;
        let antennas = antenna_positions(ap);
        let reflectors = &scenario.reflectors;
        let mut paths = Vec::with_capacity(reflectors.len() + 1);

        let lengths = antennas
            .iter()
            .map(|&a| los_path(a, rx).map(|p| p.length))
            .collect::<Result<Vec<_>>>()?;
        let los = PathGeometry {
            length: los_path(ap.center, rx).map(|p| p.length).unwrap_or(0.0),
            incidence_angle: 0.0,
            path_index: 0,
        };
        paths.push(LinkPath {
            path_index: 0,
            lengths,
            gamma: [Complex64::new(1.0, 0.0); 2],
            direction: directions(ap.center, rx, &los, scenario)?,
        });

        for (m, r) in reflectors.iter().enumerate() {
            let lengths = antennas
                .iter()
                .map(|&a| reflected_path(a, rx, r, ap.center).map(|p| p.length))
                .collect::<Result<Vec<_>>>()?;
            let geom = PathGeometry {
                path_index: m + 1,
                ..reflected_path(ap.center, rx, r, ap.center)?
            };
            let pair =
                reflection_coefficients(&r.material, scenario.carrier_hz, geom.incidence_angle);
            paths.push(LinkPath {
                path_index: m + 1,
                lengths,
                // vertical is perpendicular, horizontal is parallel
                gamma: [pair.gamma_perp, pair.gamma_par],
                direction: directions(ap.center, rx, &geom, scenario)?,
            });
        }
        Ok(ApLink { paths })
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Reflection coefficient applied on path `n` for `pol`.
    pub fn gamma(&self, n: usize, pol: Polarization) -> Complex64 {
        self.paths[n].gamma[pol_index(pol)]
    }

    pub fn channels(&self, freq: f64, pol: Polarization) -> Vec<PathChannel> {
        let lambda = wavelength(freq);
        let p = pol_index(pol);
        self.paths
            .iter()
            .map(|path| PathChannel {
                coeffs: path
                    .lengths
                    .iter()
                    .map(|&d| coefficient(lambda, d, path.gamma[p]))
                    .collect(),
                direction: path.direction[p],
                path_index: path.path_index,
            })
            .collect()
    }

    /// Number of antennas of the AP.
    pub fn num_antennas(&self) -> usize {
        self.paths[0].lengths.len()
    }

    /// Vector channel `Σ_n û_n·g⁽ⁿ⁾ᵀ`: one received-field 3-vector per
    /// antenna, written into `out` (resized as needed).
    pub fn vector_channel_into(&self, freq: f64, pol: Polarization, out: &mut Vec<[Complex64; 3]>) {
        let lambda = wavelength(freq);
        let p = pol_index(pol);
        out.clear();
        out.resize(self.num_antennas(), [Complex64::new(0.0, 0.0); 3]);
        for path in &self.paths {
            let u = path.direction[p].u;
            for (h, &d) in out.iter_mut().zip(&path.lengths) {
                let g = coefficient(lambda, d, path.gamma[p]);
                for (h_i, &u_i) in h.iter_mut().zip(&u) {
                    if u_i != 0.0 {
                        *h_i += g * u_i;
                    }
                }
            }
        }
    }

    pub fn vector_channel(&self, freq: f64, pol: Polarization) -> Vec<[Complex64; 3]> {
        let mut out = Vec::new();
        self.vector_channel_into(freq, pol, &mut out);
        out
    }

    /// Received field `Σ_n û_n·(g⁽ⁿ⁾ᵀ w)` for antenna weights `w`.
    pub fn field(&self, freq: f64, pol: Polarization, w: &[Complex64]) -> [Complex64; 3] {
        apply(&self.vector_channel(freq, pol), w)
    }
}

/// `Σ_k h_k·w_k` for a vector channel `h`.
#[inline]
pub fn apply(h: &[[Complex64; 3]], w: &[Complex64]) -> [Complex64; 3] {
    let mut e = [Complex64::new(0.0, 0.0); 3];
    for (hk, &wk) in h.iter().zip(w) {
        for (e_i, h_i) in e.iter_mut().zip(hk) {
            *e_i += h_i * wk;
        }
    }
    e
}

fn directions(
    center: Point2,
    rx: Point2,
    geom: &PathGeometry,
    scenario: &Scenario,
) -> Result<[FieldDirection; 2]> {
    Ok([
        field_direction(
            center,
            rx,
            geom,
            &scenario.reflectors,
            Polarization::Vertical,
        )?,
        field_direction(
            center,
            rx,
            geom,
            &scenario.reflectors,
            Polarization::Horizontal,
        )?,
    ])
}

/// LoS plus one [`PathChannel`] per reflector between AP `ap_index` and `rx`.
pub fn path_channels(
    scenario: &Scenario,
    ap_index: usize,
    rx: Point2,
    freq: f64,
    pol: Polarization,
) -> Result<Vec<PathChannel>> {
    Ok(ApLink::new(scenario, ap_index, rx)?.channels(freq, pol))
}

/// Uniform subcarrier grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierPlan {
    pub center_freq: f64,
    pub bandwidth: f64,
    pub frequencies: Vec<f64>,
}

impl SubcarrierPlan {
    pub fn count(&self) -> usize {
        self.frequencies.len()
    }

    /// Single carrier.
    pub fn narrowband(freq: f64) -> Self {
        SubcarrierPlan {
            center_freq: freq,
            bandwidth: 0.0,
            frequencies: alloc::vec![freq],
        }
    }
}

/// `count` frequencies spread uniformly over `[center − B/2, center + B/2]`,
/// both ends included.
pub fn subcarrier_plan(center: f64, bandwidth: f64, count: usize) -> Result<SubcarrierPlan> {
    if count == 0 {
        return Err(Error::invalid("subcarriers", "must be >= 1"));
    }
    if !(bandwidth >= 0.0 && bandwidth.is_finite()) {
        return Err(Error::invalid("bandwidth_hz", "must be >= 0"));
    }
    if !(center > 0.0 && center.is_finite()) {
        return Err(Error::invalid("carrier_hz", "must be > 0"));
    }
    let frequencies = if count == 1 {
        alloc::vec![center]
    } else {
        let lo = center - bandwidth / 2.0;
        let step = bandwidth / (count - 1) as f64;
        (0..count)
            .map(|i| {
                if i == count - 1 {
                    center + bandwidth / 2.0
                } else {
                    lo + step * i as f64
                }
            })
            .collect()
    };
    Ok(SubcarrierPlan {
        center_freq: center,
        bandwidth,
        frequencies,
    })
}

/// `B_c = c / d` for the largest path-length difference `d`.
pub fn coherence_bandwidth(max_path_difference: f64) -> Result<f64> {
    if max_path_difference.is_nan() || max_path_difference <= 0.0 {
        return Err(Error::invalid("max_path_difference", "must be > 0"));
    }
    Ok(SPEED_OF_LIGHT / max_path_difference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::Material;
    use crate::geometry::{AccessPoint, Reflector};
    use crate::scenario::Environment;

    #[test]
    fn coefficient_magnitude_and_phase() {
        let g = path_coefficient(0.11534, 10.0, Complex64::new(1.0, 0.0)).unwrap();
        // 0.11534 / (4π·10)
        assert!((g.norm() - 9.178_465_568_109_605e-4).abs() < 1e-16);
        assert!((g.norm() - 9.178e-4).abs() < 1e-7);
        assert_eq!(
            path_coefficient(0.1, 3.0, Complex64::new(0.0, 0.0))
                .unwrap()
                .norm(),
            0.0
        );
        let lam = 0.25;
        let g = path_coefficient(lam, lam, Complex64::new(1.0, 0.0)).unwrap();
        assert!(g.im.abs() / g.norm() < 1e-12 && g.re > 0.0);
        assert!(path_coefficient(0.1, 0.0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn los_only_has_one_path() {
        let s = Scenario::collocated();
        let rx = Point2::new(5.0, 0.0);
        let chans = path_channels(&s, 0, rx, s.carrier_hz, Polarization::Vertical).unwrap();
        assert_eq!(chans.len(), 1);
        let lam = s.wavelength();
        for (g, a) in chans[0].coeffs.iter().zip(antenna_positions(&s.aps[0])) {
            let d = a.distance(rx);
            assert!((g.norm() - lam / (4.0 * PI * d)).abs() < 1e-12);
        }
    }

    #[test]
    fn metal_vertical_reflections_flip_sign() {
        let s = Scenario::collocated().with_environment(Environment::Metal);
        let link = ApLink::new(&s, 0, Point2::new(3.0, 4.0)).unwrap();
        assert_eq!(link.num_paths(), 3);
        for n in 1..3 {
            assert!((link.gamma(n, Polarization::Vertical) + 1.0).norm() < 1e-3);
            assert!((link.gamma(n, Polarization::Horizontal) - 1.0).norm() < 1e-2);
        }
    }

    #[test]
    fn symmetric_reflectors_give_equal_lengths() {
        let s = Scenario {
            carrier_hz: 2.6e9,
            aps: alloc::vec![AccessPoint::new(Point2::new(5.0, 10.0), 1, 0.06)],
            reflectors: alloc::vec![
                Reflector::new(0.0, Material::concrete()),
                Reflector::new(10.0, Material::concrete()),
            ],
            area: Scenario::collocated().area,
        };
        let chans =
            path_channels(&s, 0, Point2::new(5.0, 17.0), 2.6e9, Polarization::Vertical).unwrap();
        assert!((chans[1].coeffs[0] - chans[2].coeffs[0]).norm() < 1e-15);
    }

    #[test]
    fn coincident_receiver_errors() {
        let s = Scenario::distributed();
        let a = antenna_positions(&s.aps[2])[1];
        assert!(path_channels(&s, 2, a, 2.6e9, Polarization::Vertical).is_err());
    }

    #[test]
    fn field_matches_channels() {
        let s = Scenario::collocated().with_environment(Environment::Concrete);
        let rx = Point2::new(7.3, 2.2);
        let link = ApLink::new(&s, 0, rx).unwrap();
        let w: Vec<Complex64> = (0..8)
            .map(|k| Complex64::from_polar(1.0, 0.3 * k as f64))
            .collect();
        for pol in Polarization::BOTH {
            let f = 2.63e9;
            let e = link.field(f, pol, &w);
            let mut expect = [Complex64::new(0.0, 0.0); 3];
            for ch in link.channels(f, pol) {
                let s: Complex64 = ch.coeffs.iter().zip(&w).map(|(g, w)| g * w).sum();
                for (x, u) in expect.iter_mut().zip(ch.direction.u) {
                    *x += s * u;
                }
            }
            for i in 0..3 {
                assert!((e[i] - expect[i]).norm() < 1e-18);
            }
        }
    }

    #[test]
    fn subcarrier_plans() {
        let p = subcarrier_plan(2.6e9, 100e6, 100).unwrap();
        assert_eq!(p.count(), 100);
        assert_eq!(p.frequencies[0], 2.55e9);
        assert_eq!(p.frequencies[99], 2.65e9);
        assert_eq!(subcarrier_plan(2.6e9, 0.0, 1).unwrap().frequencies, [2.6e9]);
        let two = subcarrier_plan(1e9, 2e6, 2).unwrap();
        assert_eq!(two.frequencies, [0.999e9, 1.001e9]);
        assert!(subcarrier_plan(1e9, 1e6, 0).is_err());
    }

    #[test]
    fn coherence_bandwidth_values() {
        assert!((coherence_bandwidth(10.0).unwrap() - 29.979_245_8e6).abs() < 1e-6);
        assert!((coherence_bandwidth(10.0).unwrap() - 30e6).abs() / 30e6 < 0.01);
        assert_eq!(coherence_bandwidth(SPEED_OF_LIGHT).unwrap(), 1.0);
        assert_eq!(coherence_bandwidth(1.0).unwrap(), 299_792_458.0);
        assert!(coherence_bandwidth(0.0).is_err());
        assert!(coherence_bandwidth(-1.0).is_err());
    }
}
