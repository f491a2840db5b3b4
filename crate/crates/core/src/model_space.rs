//! Geometry of the simply connected constant-curvature spaces `X_κ`.
//!
//! The κ-trigonometric functions interpolate between the spherical (κ > 0),
//! flat (κ = 0) and hyperbolic (κ < 0) cases. Near κ·t² = 0 they switch to
//! truncated power series so that the three branches glue continuously.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{find_root, integrate, Tolerance};

/// Below this value of `|κ| t²` the trigonometric functions use series.
const SERIES_THRESHOLD: f64 = 1e-6;

/// `sin_κ(t)`: `sin(√κ t)/√κ`, `t`, or `sinh(√-κ t)/√-κ`.
pub fn sin_k(kappa: f64, t: f64) -> f64 {
    let z = kappa * t * t;
    if z.abs() < SERIES_THRESHOLD {
        return t * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0)));
    }
    if kappa > 0.0 {
        let s = kappa.sqrt();
        (s * t).sin() / s
    } else {
        let s = (-kappa).sqrt();
        (s * t).sinh() / s
    }
}

/// `cos_κ(t) = sin_κ'(t)`.
pub fn cos_k(kappa: f64, t: f64) -> f64 {
    let z = kappa * t * t;
    if z.abs() < SERIES_THRESHOLD {
        return 1.0 - z / 2.0 * (1.0 - z / 12.0 * (1.0 - z / 30.0));
    }
    if kappa > 0.0 {
        (kappa.sqrt() * t).cos()
    } else {
        ((-kappa).sqrt() * t).cosh()
    }
}

/// `tan_κ(t) = sin_κ(t) / cos_κ(t)`; fails at the zeros of `cos_κ`.
pub fn tan_k(kappa: f64, t: f64) -> Result<f64> {
    let z = kappa * t * t;
    if z.abs() < SERIES_THRESHOLD {
        return Ok(t * (1.0 + z / 3.0 * (1.0 + z * 2.0 / 5.0 * (1.0 + z * 17.0 / 42.0))));
    }
    if kappa > 0.0 {
        let s = kappa.sqrt();
        let c = (s * t).cos();
        if c.abs() < 1e-15 {
            return Err(domain("tan_k", format!("cos_k vanishes at t = {t} for kappa = {kappa}")));
        }
        Ok((s * t).sin() / (s * c))
    } else {
        let s = (-kappa).sqrt();
        Ok((s * t).tanh() / s)
    }
}

/// Inverse of `tan_κ` on its principal branch. For κ < 0 the argument must
/// satisfy `|x| < 1/√-κ`.
pub fn arctan_k(kappa: f64, x: f64) -> Result<f64> {
    let z = kappa * x * x;
    if z.abs() < SERIES_THRESHOLD {
        return Ok(x * (1.0 - z / 3.0 + z * z / 5.0 - z * z * z / 7.0));
    }
    if kappa > 0.0 {
        let s = kappa.sqrt();
        Ok((s * x).atan() / s)
    } else {
        if z <= -1.0 {
            return Err(domain(
                "arctan_k",
                format!("|x| = {} not below 1/sqrt(-kappa) = {}", x.abs(), 1.0 / (-kappa).sqrt()),
            ));
        }
        let s = (-kappa).sqrt();
        Ok((s * x).atanh() / s)
    }
}

/// Inverse of `sin_κ` on its increasing branch `[0, π/(2√κ)]` (κ > 0) or all of
/// `[0, ∞)` (κ ≤ 0).
pub fn arcsin_k(kappa: f64, x: f64) -> Result<f64> {
    let z = kappa * x * x;
    if z.abs() < SERIES_THRESHOLD {
        return Ok(x * (1.0 + z / 6.0 + 3.0 * z * z / 40.0 + 5.0 * z * z * z / 112.0));
    }
    if kappa > 0.0 {
        if z > 1.0 {
            return Err(domain("arcsin_k", format!("x = {x} exceeds 1/sqrt(kappa)")));
        }
        let s = kappa.sqrt();
        Ok((s * x).min(1.0).asin() / s)
    } else {
        let s = (-kappa).sqrt();
        Ok((s * x).asinh() / s)
    }
}

/// `G_κ(x) = sin_κ(2 arctan_κ x) = 2x / (1 + κx²)`.
pub fn g_k(kappa: f64, x: f64) -> Result<f64> {
    let denom = 1.0 + kappa * x * x;
    if denom == 0.0 {
        return Err(Error::DivisionByZero("g_k"));
    }
    Ok(2.0 * x / denom)
}

/// `ω_{n-1}`: volume of the unit sphere `S^{n-1} ⊂ R^n`, i.e. `2π^{n/2}/Γ(n/2)`.
///
/// Accepts any `n ≥ 1` (`ω_0 = 2` counts the two points of `S^0`).
pub fn omega(n: usize) -> f64 {
    assert!(n >= 1, "omega needs n >= 1");
    let (mut value, mut k) = if n % 2 == 1 { (2.0, 1) } else { (2.0 * PI, 2) };
    while k < n {
        value *= 2.0 * PI / k as f64;
        k += 2;
    }
    value
}

/// Kinds of expansion served by [`ModelSpace::taylor_coeffs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaylorKind {
    SphereArea,
    BallVolume,
    IsoProfile,
    Sin,
    Cos,
    Tan,
    Arctan,
}

impl TaylorKind {
    pub const ALL: [TaylorKind; 7] = [
        TaylorKind::SphereArea,
        TaylorKind::BallVolume,
        TaylorKind::IsoProfile,
        TaylorKind::Sin,
        TaylorKind::Cos,
        TaylorKind::Tan,
        TaylorKind::Arctan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaylorKind::SphereArea => "sphere_area",
            TaylorKind::BallVolume => "ball_volume",
            TaylorKind::IsoProfile => "iso_profile",
            TaylorKind::Sin => "sin",
            TaylorKind::Cos => "cos",
            TaylorKind::Tan => "tan",
            TaylorKind::Arctan => "arctan",
        }
    }
}

impl std::str::FromStr for TaylorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaylorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown Taylor kind '{s}'")))
    }
}

/// Leading terms `Σ c_k x^{e_k}` of an expansion at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    pub kind: TaylorKind,
    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub terms: Vec<(f64, f64)>,
}

impl TaylorSeries {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(e, c)| c * x.powf(e)).sum()
    }

    pub fn coefficient(&self, index: usize) -> Option<f64> {
        self.terms.get(index).map(|t| t.1)
    }
}

/// The model space `X_κ` of dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    n: usize,
    kappa: f64,
}

fn volume_tolerance() -> Tolerance {
    Tolerance {
        rel: 1e-13,
        abs: 0.0,
        max_iter: 400,
    }
}

fn radius_tolerance() -> Tolerance {
    Tolerance {
        rel: 1e-15,
        abs: 0.0,
        max_iter: 200,
    }
}

impl ModelSpace {
    pub fn new(n: usize, kappa: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature must be finite, got {kappa}")));
        }
        Ok(Self { n, kappa })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `π/√κ` for κ > 0, `+∞` otherwise.
    pub fn conjugate_radius(&self) -> f64 {
        conjugate_radius(self.kappa)
    }

    fn check_radius(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain("model_space", format!("negative or NaN radius {t}")));
        }
        let limit = self.conjugate_radius();
        if t > limit {
            // tolerate rounding in callers that compute π/√κ themselves
            if t <= limit * (1.0 + 1e-14) {
                return Ok(limit);
            }
            return Err(Error::BeyondConjugateRadius { t, limit });
        }
        Ok(t)
    }

    /// `A_κ(t) = ω_{n-1} sin_κ(t)^{n-1}`.
    pub fn sphere_area(&self, t: f64) -> Result<f64> {
        let t = self.check_radius(t)?;
        Ok(omega(self.n) * sin_k(self.kappa, t).max(0.0).powi(self.n as i32 - 1))
    }

    /// `V_κ(t) = ω_{n-1} ∫_0^t sin_κ(s)^{n-1} ds`.
    pub fn ball_volume(&self, t: f64) -> Result<f64> {
        let t = self.check_radius(t)?;
        let kappa = self.kappa;
        let n = self.n;
        if kappa == 0.0 {
            return Ok(omega(n) * t.powi(n as i32) / n as f64);
        }
        match n {
            2 => {
                let s = sin_k(kappa, 0.5 * t);
                Ok(4.0 * PI * s * s)
            }
            3 => Ok(4.0 * PI * integral_sin_squared(kappa, t)),
            _ => {
                let m = n as i32 - 1;
                let value = integrate(|s| sin_k(kappa, s).max(0.0).powi(m), 0.0, t, &volume_tolerance())?;
                Ok(omega(n) * value)
            }
        }
    }

    /// Radius of the ball with volume `v`; inverse of [`ModelSpace::ball_volume`].
    pub fn ball_volume_inverse(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(domain("ball_volume_inverse", format!("negative or NaN volume {v}")));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        let n = self.n;
        let kappa = self.kappa;
        let euclid = (n as f64 * v / omega(n)).powf(1.0 / n as f64);
        if kappa > 0.0 {
            let total = self.full_space_volume()?;
            if v > total * (1.0 + 1e-13) {
                return Err(Error::VolumeOutOfRange { v, max: total });
            }
            if v >= total {
                return Ok(self.conjugate_radius());
            }
        }
        if kappa == 0.0 {
            return Ok(euclid);
        }
        if n == 2 {
            // V = 4π sin_κ(t/2)^2
            return Ok(2.0 * arcsin_k(kappa, (v / (4.0 * PI)).sqrt())?);
        }
        let (lo, hi) = if kappa > 0.0 {
            let conj = self.conjugate_radius();
            (euclid.min(conj), conj)
        } else {
            // hyperbolic balls are larger than flat ones of equal radius
            let mut hi = euclid.min(1.0 / (-kappa).sqrt());
            while self.ball_volume(hi)? < v {
                hi *= 2.0;
            }
            (0.0, hi)
        };
        find_root(|t| self.ball_volume(t).unwrap_or(f64::NAN) - v, lo, hi, &radius_tolerance())
    }

    /// `|X_κ|` for κ > 0.
    pub fn full_space_volume(&self) -> Result<f64> {
        if self.kappa <= 0.0 {
            return Err(domain(
                "full_space_volume",
                format!("X_kappa has infinite volume for kappa = {}", self.kappa),
            ));
        }
        self.ball_volume(self.conjugate_radius())
    }

    /// Isoperimetric profile `I_κ(v) = A_κ(V_κ^{-1}(v))`, restricted for κ > 0 to
    /// volumes up to a hemisphere (the increasing branch).
    pub fn isoperimetric_profile(&self, v: f64) -> Result<f64> {
        if self.kappa > 0.0 {
            let hemisphere = 0.5 * self.full_space_volume()?;
            if v > hemisphere * (1.0 + 1e-12) {
                return Err(Error::HemisphereExceeded { v, hemisphere });
            }
        }
        let t = self.ball_volume_inverse(v)?;
        self.sphere_area(t)
    }

    /// Leading terms of the expansion of `kind` at the origin.
    pub fn taylor_coeffs(&self, kind: TaylorKind) -> TaylorSeries {
        let k = self.kappa;
        let n = self.n as f64;
        let w = omega(self.n);
        let terms = match kind {
            TaylorKind::Sin => vec![(1.0, 1.0), (3.0, -k / 6.0), (5.0, k * k / 120.0)],
            TaylorKind::Cos => vec![(0.0, 1.0), (2.0, -k / 2.0), (4.0, k * k / 24.0)],
            TaylorKind::Tan => vec![(1.0, 1.0), (3.0, k / 3.0), (5.0, 2.0 * k * k / 15.0)],
            TaylorKind::Arctan => vec![(1.0, 1.0), (3.0, -k / 3.0), (5.0, k * k / 5.0)],
            TaylorKind::SphereArea => vec![(n - 1.0, w), (n + 1.0, -w * (n - 1.0) * k / 6.0)],
            TaylorKind::BallVolume => vec![
                (n, w / n),
                (n + 2.0, -(w / n) * n * (n - 1.0) * k / (6.0 * (n + 2.0))),
            ],
            TaylorKind::IsoProfile => vec![
                ((n - 1.0) / n, n.powf((n - 1.0) / n) * w.powf(1.0 / n)),
                (
                    (n + 1.0) / n,
                    -(n - 1.0) * k / (2.0 * (n + 2.0)) * n.powf((n + 1.0) / n) / w.powf(1.0 / n),
                ),
            ],
        };
        TaylorSeries { kind, terms }
    }
}

pub(crate) fn conjugate_radius(kappa: f64) -> f64 {
    if kappa > 0.0 {
        PI / kappa.sqrt()
    } else {
        f64::INFINITY
    }
}

/// `∫_0^t sin_κ(s)^2 ds`, by series where the closed form cancels.
fn integral_sin_squared(kappa: f64, t: f64) -> f64 {
    let z = kappa * t * t;
    if z.abs() < 0.5 {
        // sin_κ² = (1 - cos_κ(2s)) / (2κ), integrated term by term
        let mut sum = 0.0;
        let mut term = t * t * t / 3.0;
        let mut k = 1.0_f64;
        while term.abs() > 1e-18 * f64::abs(sum).max(f64::MIN_POSITIVE) {
            sum += term;
            // ratio between consecutive terms of Σ (-1)^{k+1} κ^{k-1} (2t)^{2k} t / (2 (2k)! (2k+1))
            term *= -4.0 * z * (2.0 * k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 2.0) * (2.0 * k + 3.0));
            k += 1.0;
        }
        sum
    } else {
        (t - sin_k(kappa, t) * cos_k(kappa, t)) / (2.0 * kappa)
    }
}
