//! Spin-½ states: Bloch angles, single-particle spinors, two-body spin
//! amplitudes and the hidden-variable construction of the singlet.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into [−π, π).
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi - TAU * ((phi + PI) / TAU).floor();
    // rounding can land exactly on +π
    if w >= PI {
        w - TAU
    } else if w < -PI {
        w + TAU
    } else {
        w
    }
}

/// Eigenvalue label of s_z (or of s_z' in the rotated frame).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Bloch angles of a spin-½ hidden variable.
///
/// θ is clamped into [0, π] and φ wrapped into [−π, π). At the north pole
/// φ carries no information and is set to 0. At the south pole φ is kept,
/// since it is the relative phase of the only nonzero amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinOrientation {
    theta: f64,
    phi: f64,
}

impl SpinOrientation {
    pub fn new(theta_rad: f64, phi_rad: f64) -> Self {
        let theta = theta_rad.clamp(0.0, PI);
        let phi = if theta == 0.0 {
            0.0
        } else {
            wrap_angle(phi_rad)
        };
        Self { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The antipodal orientation (π − θ, φ − π).
    pub fn opposite(&self) -> Self {
        Self::new(PI - self.theta, self.phi - PI)
    }
}

/// Normalized single-particle spinor in the |±⟩ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub amp_plus: Complex64,
    pub amp_minus: Complex64,
}

impl Spinor {
    pub const UP: Spinor = Spinor {
        amp_plus: Complex64::new(1.0, 0.0),
        amp_minus: Complex64::new(0.0, 0.0),
    };
    pub const DOWN: Spinor = Spinor {
        amp_plus: Complex64::new(0.0, 0.0),
        amp_minus: Complex64::new(1.0, 0.0),
    };

    /// Builds a spinor from raw amplitudes, rescaling to unit norm.
    pub fn new(amp_plus: Complex64, amp_minus: Complex64) -> Result<Self> {
        let norm = (amp_plus.norm_sqr() + amp_minus.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amp_plus: amp_plus / norm,
            amp_minus: amp_minus / norm,
        })
    }

    pub fn basis(sign: Sign) -> Self {
        match sign {
            Sign::Plus => Self::UP,
            Sign::Minus => Self::DOWN,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_plus.norm_sqr() + self.amp_minus.norm_sqr()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.amp_plus.conj() * other.amp_plus + self.amp_minus.conj() * other.amp_minus
    }

    pub fn scale(&self, factor: Complex64) -> Spinor {
        Spinor {
            amp_plus: self.amp_plus * factor,
            amp_minus: self.amp_minus * factor,
        }
    }
}

/// cos(θ/2)|+⟩ + sin(θ/2) e^{iφ}|−⟩
pub fn spinor_from_orientation(o: SpinOrientation) -> Spinor {
    let (s, c) = (o.theta / 2.0).sin_cos();
    Spinor {
        amp_plus: Complex64::new(c, 0.0),
        amp_minus: Complex64::from_polar(s, o.phi),
    }
}

/// Inverse of [`spinor_from_orientation`]. The returned global phase γ
/// satisfies `s = e^{iγ} spinor_from_orientation(o)`.
pub fn orientation_from_spinor(s: Spinor) -> Result<(SpinOrientation, f64)> {
    let s = Spinor::new(s.amp_plus, s.amp_minus)?;
    let (r_plus, r_minus) = (s.amp_plus.norm(), s.amp_minus.norm());
    let theta = 2.0 * r_minus.atan2(r_plus);
    let phase = if r_plus > 0.0 { s.amp_plus.arg() } else { 0.0 };
    let phi = if r_minus > 0.0 {
        s.amp_minus.arg() - phase
    } else {
        0.0
    };
    Ok((SpinOrientation::new(theta, phi), wrap_angle(phase)))
}

/// Coordinates of `s` in the primed basis of the second magnet, using the
/// labeling in which |−⟩ ↦ (cos δ/2, sin δ/2) and |+⟩ ↦ (−sin δ/2, cos δ/2).
///
/// The matrix has determinant −1: it is a relabeling, not an SU(2) rotation.
pub fn rotate_basis_reflecting(s: Spinor, delta_rad: f64) -> Spinor {
    let (sn, cs) = (delta_rad / 2.0).sin_cos();
    Spinor {
        amp_plus: -sn * s.amp_plus + cs * s.amp_minus,
        amp_minus: cs * s.amp_plus + sn * s.amp_minus,
    }
}

/// Two-particle spin amplitudes Ψ^{a,b}, a for particle A and b for B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodySpinor {
    amps: [[Complex64; 2]; 2],
}

impl TwoBodySpinor {
    pub fn zero() -> Self {
        Self {
            amps: [[Complex64::new(0.0, 0.0); 2]; 2],
        }
    }

    /// (|+−⟩ − |−+⟩)/√2
    pub fn singlet() -> Self {
        let mut s = Self::zero();
        s.set(Sign::Plus, Sign::Minus, Complex64::new(FRAC_1_SQRT_2, 0.0));
        s.set(Sign::Minus, Sign::Plus, Complex64::new(-FRAC_1_SQRT_2, 0.0));
        s
    }

    pub fn get(&self, a: Sign, b: Sign) -> Complex64 {
        self.amps[a.index()][b.index()]
    }

    pub fn set(&mut self, a: Sign, b: Sign, value: Complex64) {
        self.amps[a.index()][b.index()] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &TwoBodySpinor) -> Complex64 {
        self.amps
            .iter()
            .flatten()
            .zip(other.amps.iter().flatten())
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = *self;
        out.amps.iter_mut().flatten().for_each(|z| *z *= factor);
        out
    }

    /// Antisymmetrized product a ⊗ b − b ⊗ a.
    pub fn antisymmetric_product(a: &Spinor, b: &Spinor) -> Self {
        let comp = |s: &Spinor, sign: Sign| match sign {
            Sign::Plus => s.amp_plus,
            Sign::Minus => s.amp_minus,
        };
        let mut out = Self::zero();
        for sa in [Sign::Plus, Sign::Minus] {
            for sb in [Sign::Plus, Sign::Minus] {
                out.set(
                    sa,
                    sb,
                    comp(a, sa) * comp(b, sb) - comp(b, sa) * comp(a, sb),
                );
            }
        }
        out
    }
}

/// Builds the antisymmetrized state of A with orientation `orient_a` and B
/// with the opposite orientation, then strips its global phase.
///
/// Returns the normalized spinor, which is the canonical singlet for every
/// input, and the phase γ such that the raw normalized state is e^{iγ}
/// times the returned one.
pub fn antisymmetrize_singlet(orient_a: SpinOrientation) -> (TwoBodySpinor, f64) {
    let a = spinor_from_orientation(orient_a);
    let b = spinor_from_orientation(orient_a.opposite());
    let raw = TwoBodySpinor::antisymmetric_product(&a, &b);
    // |Ψ^{+-}| = 1 for opposite orientations, so the norm is never zero.
    let raw = raw.scale(Complex64::new(1.0 / raw.norm_sqr().sqrt(), 0.0));
    let phase = raw.get(Sign::Plus, Sign::Minus).arg();
    (
        raw.scale(Complex64::from_polar(1.0, -phase)),
        wrap_angle(phase),
    )
}
