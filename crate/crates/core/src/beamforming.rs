//! Transmit-side coefficients.
//!
//! A dual-polarized broad beam uses phase-only weights `(w_V, w_H)` whose
//! two-polarization power pattern `Σ_χ |aᵀw_χ|²` equals `2K` in every
//! direction. For arrays larger than two the weights are built by
//! complementary-pair doubling, `(a, b) → ([a b], [a −b])`, which keeps
//! `|A(z)|² + |B(z)|²` constant on the unit circle.
//!
//! Distributed transmission scales each AP's weights by one entry of a slot
//! precoder `Φ` with `ΦᴴΦ = I`, so the per-AP signals become orthogonal over
//! the `T` slots.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point2, Polarization};
use crate::linalg::CMatrix;
use crate::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Per-polarization weights of one AP.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPolWeights {
    pub w_v: Vec<Complex64>,
    pub w_h: Vec<Complex64>,
}

impl DualPolWeights {
    pub fn new(w_v: Vec<Complex64>, w_h: Vec<Complex64>) -> Result<Self> {
        if w_v.len() != w_h.len() {
            return Err(Error::invalid("weights", "w_v and w_h lengths differ"));
        }
        Ok(DualPolWeights { w_v, w_h })
    }

    pub fn len(&self) -> usize {
        self.w_v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w_v.is_empty()
    }

    pub fn get(&self, pol: Polarization) -> &[Complex64] {
        match pol {
            Polarization::Vertical => &self.w_v,
            Polarization::Horizontal => &self.w_h,
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        DualPolWeights {
            w_v: self.w_v.iter().map(|w| w * s).collect(),
            w_h: self.w_h.iter().map(|w| w * s).collect(),
        }
    }

    /// `Σ_χ Σ_k |w_{χ,k}|²`.
    pub fn energy(&self) -> f64 {
        self.w_v.iter().chain(&self.w_h).map(|w| w.norm_sqr()).sum()
    }

    pub fn is_unit_modulus(&self) -> bool {
        self.w_v
            .iter()
            .chain(&self.w_h)
            .all(|w| (w.norm() - 1.0).abs() <= UNIT_TOL)
    }
}

/// Array response `a(φ, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(pub Vec<Complex64>);

impl SteeringVector {
    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// `aᵀw`.
    pub fn response(&self, w: &[Complex64]) -> Complex64 {
        self.0.iter().zip(w).map(|(a, w)| a * w).sum()
    }
}

/// Steering vector of a `K`-element array along the y axis:
/// entry `k` is `exp(−j2π/λ·k·d·sin φ·cos θ)`.
pub fn steering_vector(
    k: usize,
    spacing: f64,
    wavelength: f64,
    phi: f64,
    theta: f64,
) -> SteeringVector {
    steering_vector_along(Point2::new(0.0, 1.0), k, spacing, wavelength, phi, theta)
}

/// Steering vector for an array along the unit vector `axis` in the x-y
/// plane. `φ` is azimuth from +x, `θ` elevation.
pub fn steering_vector_along(
    axis: Point2,
    k: usize,
    spacing: f64,
    wavelength: f64,
    phi: f64,
    theta: f64,
) -> SteeringVector {
    let (sp, cp) = phi.sin_cos();
    let ct = theta.cos();
    let proj = axis.x * cp * ct + axis.y * sp * ct;
    let step = -2.0 * PI / wavelength * spacing * proj;
    SteeringVector(
        (0..k)
            .map(|i| {
                if i == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, step * i as f64)
                }
            })
            .collect(),
    )
}

/// Two-antenna broad-beam pair from the first antenna's coefficients:
/// `w_V = [w1, −w2*]`, `w_H = [w2, w1*]`.
pub fn two_antenna_pair(w1: Complex64, w2: Complex64) -> Result<DualPolWeights> {
    if (w1.norm() - 1.0).abs() > UNIT_TOL || (w2.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid("w", "coefficients must have unit magnitude"));
    }
    Ok(DualPolWeights {
        w_v: vec![w1, -w2.conj()],
        w_h: vec![w2, w1.conj()],
    })
}

/// Broad-beam weights for `K` a power of two.
pub fn dbf_weights(k: usize) -> Result<DualPolWeights> {
    if !k.is_power_of_two() {
        return Err(Error::invalid(
            "k",
            "broad-beam weights need a power-of-two array",
        ));
    }
    let one = Complex64::new(1.0, 0.0);
    if k == 1 {
        return Ok(DualPolWeights {
            w_v: vec![one],
            w_h: vec![one],
        });
    }
    let mut a = vec![one, one];
    let mut b = vec![one, -one];
    while a.len() < k {
        let na: Vec<Complex64> = a.iter().chain(&b).copied().collect();
        let nb: Vec<Complex64> = a.iter().copied().chain(b.iter().map(|x| -x)).collect();
        a = na;
        b = nb;
    }
    Ok(DualPolWeights { w_v: a, w_h: b })
}

/// `Σ_χ |a(φ,θ)ᵀ w_χ|² · G` for an array along the y axis.
pub fn radiated_power_pattern(
    weights: &DualPolWeights,
    spacing: f64,
    wavelength: f64,
    phi: f64,
    theta: f64,
    element_gain: f64,
) -> f64 {
    radiated_power_pattern_along(
        Point2::new(0.0, 1.0),
        weights,
        spacing,
        wavelength,
        phi,
        theta,
        element_gain,
    )
}

pub fn radiated_power_pattern_along(
    axis: Point2,
    weights: &DualPolWeights,
    spacing: f64,
    wavelength: f64,
    phi: f64,
    theta: f64,
    element_gain: f64,
) -> f64 {
    let a = steering_vector_along(axis, weights.len(), spacing, wavelength, phi, theta);
    let power: f64 = Polarization::BOTH
        .iter()
        .map(|&pol| a.response(weights.get(pol)).norm_sqr())
        .sum();
    power * element_gain
}

/// OSTBC code matrix, rows are antennas and columns time slots.
#[derive(Debug, Clone, PartialEq)]
pub struct OstbcMatrix {
    w: CMatrix,
}

impl OstbcMatrix {
    /// Accepts any square `W` with `WWᴴ = I` and equal-magnitude entries.
    pub fn new(w: CMatrix) -> Result<Self> {
        let k = w.rows();
        if k == 0 || w.cols() != k {
            return Err(Error::invalid(
                "ostbc",
                "code matrix must be square and non-empty",
            ));
        }
        if w.matmul(&w.adjoint()).max_abs_diff(&CMatrix::identity(k)) > 1e-12 {
            return Err(Error::invalid("ostbc", "W Wᴴ must be the identity"));
        }
        let target = 1.0 / (k as f64).sqrt();
        for r in 0..k {
            for c in 0..k {
                if (w[(r, c)].norm() - target).abs() > 1e-12 {
                    return Err(Error::invalid(
                        "ostbc",
                        "entries must have magnitude 1/sqrt(K)",
                    ));
                }
            }
        }
        Ok(OstbcMatrix { w })
    }

    pub fn dft(k: usize) -> Self {
        OstbcMatrix { w: CMatrix::dft(k) }
    }

    pub fn hadamard(k: usize) -> Result<Self> {
        Ok(OstbcMatrix {
            w: CMatrix::hadamard(k)?,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    pub fn size(&self) -> usize {
        self.w.rows()
    }

    /// Antenna coefficients in slot `s`.
    pub fn slot(&self, s: usize) -> Vec<Complex64> {
        self.w.column(s)
    }
}

/// Scaled unitary DFT code of size `K`.
pub fn ostbc_matrix(k: usize) -> Result<OstbcMatrix> {
    if k == 0 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    Ok(OstbcMatrix::dft(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PrecoderKind {
    #[default]
    Dft,
    Hadamard,
}

/// `T × L` matrix `Φ` with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotPrecoder {
    phi: CMatrix,
}

impl SlotPrecoder {
    /// Checks `T ≥ L` and `ΦᴴΦ = I`.
    pub fn new(phi: CMatrix) -> Result<Self> {
        if phi.cols() == 0 || phi.rows() < phi.cols() {
            return Err(Error::invalid("precoder", "need T >= L >= 1"));
        }
        if phi
            .adjoint()
            .matmul(&phi)
            .max_abs_diff(&CMatrix::identity(phi.cols()))
            > 1e-12
        {
            return Err(Error::invalid("precoder", "Φᴴ Φ must be the identity"));
        }
        Ok(SlotPrecoder { phi })
    }

    pub fn identity(n: usize) -> Self {
        SlotPrecoder {
            phi: CMatrix::identity(n),
        }
    }

    pub fn slots(&self) -> usize {
        self.phi.rows()
    }

    pub fn aps(&self) -> usize {
        self.phi.cols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.phi
    }

    /// `[Φ]_{t,l}`, zero-based.
    pub fn entry(&self, t: usize, l: usize) -> Complex64 {
        self.phi[(t, l)]
    }
}

/// First `L` columns of a `T × T` scaled DFT or Hadamard matrix.
pub fn slot_precoder(slots: usize, aps: usize, kind: PrecoderKind) -> Result<SlotPrecoder> {
    if aps == 0 || slots < aps {
        return Err(Error::invalid("slots", "need T >= L >= 1"));
    }
    let full = match kind {
        PrecoderKind::Dft => CMatrix::dft(slots),
        PrecoderKind::Hadamard => CMatrix::hadamard(slots)?,
    };
    Ok(SlotPrecoder {
        phi: full.leading_columns(aps),
    })
}

/// Weights of AP `l` in slot `t` (both zero-based): `[Φ]_{t,l}·W_l`.
pub fn slot_weights(
    base: &[DualPolWeights],
    precoder: &SlotPrecoder,
    t: usize,
    l: usize,
) -> Result<DualPolWeights> {
    if t >= precoder.slots() {
        return Err(Error::OutOfRange {
            what: "slot",
            index: t,
            len: precoder.slots(),
        });
    }
    if l >= precoder.aps() || l >= base.len() {
        return Err(Error::OutOfRange {
            what: "access point",
            index: l,
            len: precoder.aps().min(base.len()),
        });
    }
    Ok(base[l].scaled(precoder.entry(t, l)))
}

/// Uniform value in `[0, 1)` from 53 random bits.
pub(crate) fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Phase-only weights with independent uniform phases; a baseline, not a
/// broad beam.
pub fn random_phase_weights(k: usize, seed: u64) -> DualPolWeights {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Complex64::from_polar(1.0, 2.0 * PI * unit_uniform(&mut rng));
    let w_v = (0..k).map(|_| draw()).collect();
    let w_h = (0..k).map(|_| draw()).collect();
    DualPolWeights { w_v, w_h }
}
