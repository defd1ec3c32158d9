//! Scenario description shared by the channel and power-gain modules.

use alloc::vec;
use alloc::vec::Vec;

use crate::em::Material;
use crate::geometry::{AccessPoint, Point2, Reflector};
use crate::{wavelength, Error, Result};

/// Rectangular service area sampled on an inclusive grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceArea {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    /// Grid step, m.
    pub resolution: f64,
}

impl ServiceArea {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.x0, self.x1, self.y0, self.y1, self.resolution]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("area", "bounds must be finite"));
        }
        if self.x1 < self.x0 || self.y1 < self.y0 {
            return Err(Error::invalid("area", "x1 >= x0 and y1 >= y0 required"));
        }
        if self.resolution <= 0.0 {
            return Err(Error::invalid("area.resolution", "must be > 0"));
        }
        Ok(())
    }

    fn steps(lo: f64, hi: f64, res: f64) -> usize {
        ((hi - lo) / res + 1e-9).floor() as usize + 1
    }

    /// Sample counts along x and y.
    pub fn shape(&self) -> (usize, usize) {
        (
            Self::steps(self.x0, self.x1, self.resolution),
            Self::steps(self.y0, self.y1, self.resolution),
        )
    }

    pub fn xs(&self) -> Vec<f64> {
        let (nx, _) = self.shape();
        (0..nx)
            .map(|i| self.x0 + i as f64 * self.resolution)
            .collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        let (_, ny) = self.shape();
        (0..ny)
            .map(|j| self.y0 + j as f64 * self.resolution)
            .collect()
    }

    /// All samples, x-major: x ascending in the outer loop, y ascending
    /// inside.
    pub fn points(&self) -> Vec<Point2> {
        let ys = self.ys();
        self.xs()
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| Point2::new(x, y)))
            .collect()
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// Propagation environment of the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Environment {
    /// Free space, no reflectors.
    Los,
    /// Concrete walls at both sides of the area.
    Concrete,
    /// Metal reflectors at both sides of the area.
    Metal,
}

impl Environment {
    pub const ALL: [Environment; 3] = [Environment::Los, Environment::Concrete, Environment::Metal];

    pub fn name(self) -> &'static str {
        match self {
            Environment::Los => "los",
            Environment::Concrete => "concrete",
            Environment::Metal => "metal",
        }
    }

    /// Reflectors at `x = area.x0` and `x = area.x1`.
    pub fn reflectors(self, area: &ServiceArea) -> Vec<Reflector> {
        let material = match self {
            Environment::Los => return Vec::new(),
            Environment::Concrete => Material::concrete(),
            Environment::Metal => Material::metal(),
        };
        vec![
            Reflector::new(area.x0, material.clone()),
            Reflector::new(area.x1, material),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub carrier_hz: f64,
    pub aps: Vec<AccessPoint>,
    pub reflectors: Vec<Reflector>,
    pub area: ServiceArea,
}

/// Carrier of the reference study, Hz.
pub const CARRIER_HZ: f64 = 2.6e9;

impl Scenario {
    fn reference_area() -> ServiceArea {
        ServiceArea {
            x0: 0.0,
            x1: 10.0,
            y0: 0.0,
            y1: 20.0,
            resolution: 0.1,
        }
    }

    /// One AP at (5, 10) with eight dual-polarized antennas along x,
    /// half-wavelength spacing, 10×20 m area, line of sight.
    pub fn collocated() -> Scenario {
        let spacing = wavelength(CARRIER_HZ) / 2.0;
        Scenario {
            carrier_hz: CARRIER_HZ,
            aps: vec![AccessPoint::new(Point2::new(5.0, 10.0), 8, spacing)],
            reflectors: Vec::new(),
            area: Self::reference_area(),
        }
    }

    /// Four APs at (5, 4), (5, 8), (5, 12), (5, 16) with two dual-polarized
    /// antennas each.
    pub fn distributed() -> Scenario {
        let spacing = wavelength(CARRIER_HZ) / 2.0;
        Scenario {
            carrier_hz: CARRIER_HZ,
            aps: [4.0, 8.0, 12.0, 16.0]
                .iter()
                .map(|&y| AccessPoint::new(Point2::new(5.0, y), 2, spacing))
                .collect(),
            reflectors: Vec::new(),
            area: Self::reference_area(),
        }
    }

    /// Replaces the reflectors by the ones of `env`.
    pub fn with_environment(mut self, env: Environment) -> Scenario {
        self.reflectors = env.reflectors(&self.area);
        self
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_hz)
    }

    pub fn total_antennas(&self) -> usize {
        self.aps.iter().map(|ap| ap.num_dualpol).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz.is_finite() && self.carrier_hz > 0.0) {
            return Err(Error::invalid("carrier_hz", "must be > 0"));
        }
        if self.aps.is_empty() {
            return Err(Error::invalid("ap", "at least one access point required"));
        }
        for ap in &self.aps {
            ap.validate()?;
        }
        for r in &self.reflectors {
            r.material.validate()?;
            if !r.plane_x.is_finite() {
                return Err(Error::invalid("reflector.x", "must be finite"));
            }
            for ap in &self.aps {
                for p in crate::geometry::antenna_positions(ap) {
                    if p.x == r.plane_x {
                        return Err(Error::invalid(
                            "reflector.x",
                            "antenna lies on reflector plane",
                        ));
                    }
                }
            }
        }
        self.area.validate()
    }
}
