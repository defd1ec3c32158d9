//! Electromagnetic material constants and Fresnel reflection coefficients.
//!
//! Incidence angles are measured from the surface normal, in `[0, π/2]`.
//! Polarizations follow the plane of incidence: `⊥` is the field normal to
//! it, `∥` the field within it. The parallel coefficient uses the reversed
//! reference direction, i.e. it is the negative of the common textbook form,
//! so a perfect conductor gives `γ⊥ = −1` and `γ∥ = +1`.
//!
//! Complex square roots are taken on the principal branch (non-negative real
//! part), which keeps impedances and attenuation passive.

use alloc::borrow::Cow;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

/// Vacuum permittivity ε0, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability μ0, H/m.
pub const MU_0: f64 = 4.0e-7 * PI;

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Linear isotropic medium, with constants relative to vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: Cow<'static, str>,
    /// Relative permittivity ε/ε0, complex (negative imaginary part for loss).
    pub rel_permittivity: Complex64,
    /// Relative permeability μ/μ0.
    pub rel_permeability: f64,
    /// Conductivity σ in S/m.
    pub conductivity: f64,
}

impl Material {
    pub const fn new(
        name: &'static str,
        rel_permittivity: Complex64,
        rel_permeability: f64,
        conductivity: f64,
    ) -> Self {
        Material {
            name: Cow::Borrowed(name),
            rel_permittivity,
            rel_permeability,
            conductivity,
        }
    }

    pub const fn free_space() -> Self {
        Material::new("free_space", Complex64::new(1.0, 0.0), 1.0, 0.0)
    }

    /// Concrete wall at 2.6 GHz.
    pub const fn concrete() -> Self {
        Material::new("concrete", Complex64::new(5.2, -0.6), 1.0, 0.1)
    }

    /// Metal reflector at 2.6 GHz.
    pub const fn metal() -> Self {
        Material::new("metal", Complex64::new(1.0, -6.0e7), 1.0, 1.0e7)
    }

    /// The built-in registry: concrete wall, metal reflector, free space.
    pub fn registry() -> [Material; 3] {
        [
            Material::concrete(),
            Material::metal(),
            Material::free_space(),
        ]
    }

    /// Looks up a registry material by name.
    pub fn by_name(name: &str) -> Option<Material> {
        Material::registry().into_iter().find(|m| m.name == name)
    }

    /// True when the medium is electrically identical to vacuum.
    pub fn is_free_space(&self) -> bool {
        self.rel_permittivity == Complex64::new(1.0, 0.0)
            && self.rel_permeability == 1.0
            && self.conductivity == 0.0
    }

    /// Checks the passivity invariants: `Re ε_r ≥ 1`, `σ ≥ 0`, `μ_r > 0`,
    /// all finite.
    pub fn validate(&self) -> crate::Result<()> {
        let eps = self.rel_permittivity;
        if !(eps.re.is_finite() && eps.im.is_finite()) || eps.re < 1.0 {
            return Err(crate::Error::invalid(
                "rel_permittivity",
                "real part must be finite and >= 1",
            ));
        }
        if !(self.conductivity.is_finite() && self.conductivity >= 0.0) {
            return Err(crate::Error::invalid("conductivity", "must be >= 0"));
        }
        if !(self.rel_permeability.is_finite() && self.rel_permeability > 0.0) {
            return Err(crate::Error::invalid("rel_permeability", "must be > 0"));
        }
        Ok(())
    }

    fn permittivity(&self) -> Complex64 {
        self.rel_permittivity * EPSILON_0
    }

    fn permeability(&self) -> f64 {
        self.rel_permeability * MU_0
    }

    /// `σ + jωε` with the complex permittivity as given.
    fn admittivity(&self, omega: f64) -> Complex64 {
        J * omega * self.permittivity() + self.conductivity
    }
}

/// Attenuation constant, phase constant and intrinsic impedance of a medium
/// at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConstants {
    /// α, Np/m. Complex when the permittivity is complex.
    pub alpha: Complex64,
    /// β, rad/m.
    pub beta: Complex64,
    /// η, ohms.
    pub eta: Complex64,
    /// ω = 2πf, rad/s.
    pub omega: f64,
}

impl WaveConstants {
    /// `α + jβ`, the combination that enters Snell's law.
    pub fn gamma(&self) -> Complex64 {
        self.alpha + J * self.beta
    }
}

/// Reflection coefficients of one reflector for one incidence angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub gamma_perp: Complex64,
    pub gamma_par: Complex64,
    /// θ_i, rad from the surface normal.
    pub incidence_angle: f64,
}

fn principal_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 {
        -r
    } else {
        r
    }
}

fn omega(freq: f64) -> f64 {
    2.0 * PI * freq
}

/// Intrinsic impedance `η = sqrt(jωμ / (σ + jωε))`.
pub fn intrinsic_impedance(material: &Material, freq: f64) -> Complex64 {
    let w = omega(freq);
    if material.conductivity == 0.0 && material.rel_permittivity.im == 0.0 {
        // lossless: real sqrt(μ/ε), exact for vacuum
        let ratio = material.permeability() / material.permittivity().re;
        return Complex64::new(ratio.sqrt(), 0.0);
    }
    principal_sqrt(J * w * material.permeability() / material.admittivity(w))
}

/// Exact propagation constant `sqrt(jωμ(σ + jωε))`.
pub fn propagation_constant(material: &Material, freq: f64) -> Complex64 {
    let w = omega(freq);
    principal_sqrt(J * w * material.permeability() * material.admittivity(w))
}

/// Wave constants in the good-dielectric / good-conductor form.
///
/// A medium is treated as a good conductor when `σ / (ω|ε|) ≥ 1`; then
/// `α = β = sqrt(ωμσ/2)`. Otherwise `α = (σ/2)·sqrt(μ/ε)` and
/// `β = ω·sqrt(με)` with the complex permittivity, which is why both come
/// out complex for a lossy dielectric.
pub fn wave_constants(material: &Material, freq: f64) -> WaveConstants {
    let w = omega(freq);
    let mu = material.permeability();
    let eps = material.permittivity();
    let sigma = material.conductivity;
    let eta = intrinsic_impedance(material, freq);

    let (alpha, beta) = if sigma / (w * eps.norm()) >= 1.0 {
        let v = (w * mu * sigma / 2.0).sqrt();
        (Complex64::new(v, 0.0), Complex64::new(v, 0.0))
    } else if eps.im == 0.0 {
        let eps = eps.re;
        let alpha = if sigma == 0.0 {
            0.0
        } else {
            sigma / 2.0 * (mu / eps).sqrt()
        };
        (
            Complex64::new(alpha, 0.0),
            Complex64::new(w * (mu * eps).sqrt(), 0.0),
        )
    } else {
        let alpha = principal_sqrt(Complex64::from(mu) / eps) * (sigma / 2.0);
        let beta = principal_sqrt(eps * mu) * w;
        (alpha, beta)
    };

    WaveConstants {
        alpha,
        beta,
        eta,
        omega: w,
    }
}

fn cos_incidence(theta_i: f64) -> f64 {
    if theta_i >= FRAC_PI_2 {
        0.0
    } else {
        theta_i.cos()
    }
}

/// `cos θ_t` from Snell's law, `sqrt(1 − (jβ0/(α_m + jβ_m))² sin²θ_i)`.
///
/// Complex for lossy media, where θ_t is not a physical angle.
pub fn snell_cos_theta_t(material: &Material, freq: f64, theta_i: f64) -> Complex64 {
    if material.is_free_space() {
        return Complex64::new(cos_incidence(theta_i), 0.0);
    }
    let beta0 = wave_constants(&Material::free_space(), freq).beta;
    let medium = wave_constants(material, freq);
    let ratio = J * beta0 / medium.gamma();
    let s = theta_i.sin();
    principal_sqrt(Complex64::new(1.0, 0.0) - ratio * ratio * (s * s))
}

/// Fresnel coefficients for a wave arriving from free space.
pub fn reflection_coefficients(material: &Material, freq: f64, theta_i: f64) -> ReflectionPair {
    let cos_i = cos_incidence(theta_i);
    if cos_i == 0.0 {
        // grazing incidence: both ratios collapse to -1
        return ReflectionPair {
            gamma_perp: Complex64::new(-1.0, 0.0),
            gamma_par: Complex64::new(-1.0, 0.0),
            incidence_angle: theta_i,
        };
    }
    let eta0 = intrinsic_impedance(&Material::free_space(), freq);
    let eta_m = intrinsic_impedance(material, freq);
    let cos_t = snell_cos_theta_t(material, freq, theta_i);

    let m_i = eta_m * cos_i;
    let o_t = eta0 * cos_t;
    let o_i = eta0 * cos_i;
    let m_t = eta_m * cos_t;

    ReflectionPair {
        gamma_perp: (m_i - o_t) / (m_i + o_t),
        gamma_par: (o_i - m_t) / (o_i + m_t),
        incidence_angle: theta_i,
    }
}
