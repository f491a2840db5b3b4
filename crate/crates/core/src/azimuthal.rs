//! Azimuthal maps `B_ρ(α) → X_κ`, `(t, u) ↦ (R(t), u)` in polar coordinates.
//!
//! At radius `t` the differential stretches radial directions by `R'(t)` and
//! the `n − 1` tangential directions by `sin_κ(R(t)) / sin_ρ(t)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_space::{arctan_k, conjugate_radius, sin_k, tan_k, ModelSpace};
use crate::numerics::{find_root, golden_section_max, golden_section_min, Tolerance};

/// Number of intervals in the base sampling grid on `[0, α]`.
pub const SAMPLE_INTERVALS: usize = 2048;

/// Relative mismatch accepted between the two one-sided derivatives at the
/// transition radius of a quasiconformal profile.
const GLUE_TOLERANCE: f64 = 1e-8;

/// Distance-function family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Profile {
    /// `R(t) = t`.
    Equidistant,
    /// `R(t) = σ t`.
    Contracting { sigma: f64 },
    /// `R' = sin_κ(R)/sin_ρ(t)` with `R'(0) = σ`, i.e.
    /// `R(t) = 2 arctan_κ(σ tan_ρ(t/2))`.
    Conformal { sigma: f64 },
    /// `R = V_κ⁻¹ ∘ V_ρ`.
    VolumePreserving,
    /// `R = σ t` up to `β`, then `R' = sin_κ(R)/(Q sin_ρ(t))`.
    QuasiconformalOptimal { q: f64, sigma: f64, beta: f64 },
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Equidistant => "equidistant",
            Profile::Contracting { .. } => "contracting",
            Profile::Conformal { .. } => "conformal",
            Profile::VolumePreserving => "volume_preserving",
            Profile::QuasiconformalOptimal { .. } => "quasiconformal_optimal",
        }
    }
}

/// Anything exposing pointwise singular values on `[0, α]`.
///
/// The anisometry sampler only needs this, so test code can feed it arbitrary
/// distance functions.
pub trait RadialProfile {
    fn alpha(&self) -> f64;
    /// `(radial, tangential)` stretch at radius `t`.
    fn singular_values(&self, t: f64) -> Result<(f64, f64)>;
}

/// Singular values of the azimuthal map with distance function value `r` and
/// derivative `r_prime` at radius `t`.
pub fn stretches(rho: f64, kappa: f64, t: f64, r: f64, r_prime: f64) -> (f64, f64) {
    if t == 0.0 {
        return (r_prime, r_prime);
    }
    (r_prime, sin_k(kappa, r) / sin_k(rho, t))
}

/// An azimuthal map between geodesic balls of the model spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AzimuthalMap {
    rho: f64,
    kappa: f64,
    n: usize,
    alpha: f64,
    profile: Profile,
    /// `tan_κ(σβ/2) / tan_ρ(β/2)^{1/Q}` for the quasiconformal profile.
    #[serde(skip)]
    qc_scale: f64,
}

impl AzimuthalMap {
    pub fn new(rho: f64, kappa: f64, n: usize, alpha: f64, profile: Profile) -> Result<Self> {
        let source = ModelSpace::new(n, rho)?;
        ModelSpace::new(n, kappa)?;
        if !(alpha > 0.0 && alpha < source.conjugate_radius()) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} must lie in (0, {}) for rho = {rho}",
                source.conjugate_radius()
            )));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let mut qc_scale = f64::NAN;
        match profile {
            Profile::Equidistant | Profile::VolumePreserving => {}
            Profile::Contracting { sigma } | Profile::Conformal { sigma } => positive("sigma", sigma)?,
            Profile::QuasiconformalOptimal { q, sigma, beta } => {
                positive("sigma", sigma)?;
                if !(q >= 1.0 && q.is_finite()) {
                    return Err(Error::InvalidParameter(format!("Q must be >= 1, got {q}")));
                }
                if !(beta > 0.0 && beta < alpha) {
                    return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, alpha = {alpha})")));
                }
                if sigma * beta >= conjugate_radius(kappa) {
                    return Err(Error::Blowup { radius: beta });
                }
                // C^1 gluing: the linear slope must match the ODE slope at beta
                let slope = sin_k(kappa, sigma * beta) / (q * sin_k(rho, beta));
                if (slope - sigma).abs() > GLUE_TOLERANCE * sigma {
                    return Err(Error::InvalidParameter(format!(
                        "beta = {beta} does not glue C^1: ODE slope {slope} vs sigma {sigma}"
                    )));
                }
                qc_scale = tan_k(kappa, 0.5 * sigma * beta)? / tan_k(rho, 0.5 * beta)?.powf(1.0 / q);
            }
        }
        Ok(Self {
            rho,
            kappa,
            n,
            alpha,
            profile,
            qc_scale,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn source(&self) -> ModelSpace {
        ModelSpace::new(self.n, self.rho).expect("validated at construction")
    }

    pub fn target(&self) -> ModelSpace {
        ModelSpace::new(self.n, self.kappa).expect("validated at construction")
    }

    /// First radius in `(0, α]` at which the image leaves the target chart,
    /// if any.
    pub fn blowup_radius(&self) -> Option<f64> {
        let conj_k = conjugate_radius(self.kappa);
        let hit = match self.profile {
            Profile::Equidistant => conj_k,
            Profile::Contracting { sigma } => conj_k / sigma,
            Profile::Conformal { sigma } => {
                if self.kappa >= 0.0 {
                    return None;
                }
                // σ tan_ρ(t/2) reaches 1/√-κ
                match arctan_k(self.rho, 1.0 / (sigma * (-self.kappa).sqrt())) {
                    Ok(half) => 2.0 * half,
                    Err(_) => return None,
                }
            }
            Profile::VolumePreserving => {
                if self.kappa <= 0.0 {
                    return None;
                }
                let total = self.target().full_space_volume().ok()?;
                self.source().ball_volume_inverse(total).unwrap_or(f64::INFINITY)
            }
            Profile::QuasiconformalOptimal { q, .. } => {
                if self.kappa >= 0.0 {
                    return None;
                }
                let limit = (1.0 / (self.qc_scale * (-self.kappa).sqrt())).powf(q);
                match arctan_k(self.rho, limit) {
                    Ok(half) => 2.0 * half,
                    Err(_) => return None,
                }
            }
        };
        (hit <= self.alpha).then_some(hit)
    }

    fn check_t(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.alpha * (1.0 + 1e-14)) {
            return Err(Error::InvalidParameter(format!(
                "radius {t} outside [0, alpha = {}]",
                self.alpha
            )));
        }
        if let Some(radius) = self.blowup_radius() {
            if t >= radius {
                return Err(Error::Blowup { radius });
            }
        }
        Ok(t.min(self.alpha))
    }

    /// `R(t)`.
    pub fn distance_r(&self, t: f64) -> Result<f64> {
        let t = self.check_t(t)?;
        let (rho, kappa) = (self.rho, self.kappa);
        match self.profile {
            Profile::Equidistant => Ok(t),
            Profile::Contracting { sigma } => Ok(sigma * t),
            Profile::Conformal { sigma } => {
                let big_t = tan_k(rho, 0.5 * t)?;
                Ok(2.0 * arctan_k(kappa, sigma * big_t)?)
            }
            Profile::VolumePreserving => {
                let v = self.source().ball_volume(t)?;
                self.target().ball_volume_inverse(v)
            }
            Profile::QuasiconformalOptimal { q, sigma, beta } => {
                if t <= beta {
                    return Ok(sigma * t);
                }
                let w = self.qc_scale * tan_k(rho, 0.5 * t)?.powf(1.0 / q);
                Ok(2.0 * arctan_k(kappa, w)?)
            }
        }
    }

    /// `R'(t)`.
    pub fn derivative_r_prime(&self, t: f64) -> Result<f64> {
        let t = self.check_t(t)?;
        let (rho, kappa) = (self.rho, self.kappa);
        match self.profile {
            Profile::Equidistant => Ok(1.0),
            Profile::Contracting { sigma } => Ok(sigma),
            Profile::Conformal { sigma } => {
                let big_t = tan_k(rho, 0.5 * t)?;
                let w = sigma * big_t;
                Ok(sigma * (1.0 + rho * big_t * big_t) / (1.0 + kappa * w * w))
            }
            Profile::VolumePreserving => {
                if t == 0.0 {
                    return Ok(1.0);
                }
                let r = self.distance_r(t)?;
                Ok((sin_k(rho, t) / sin_k(kappa, r)).powi(self.n as i32 - 1))
            }
            Profile::QuasiconformalOptimal { q, sigma, beta } => {
                if t <= beta {
                    return Ok(sigma);
                }
                let big_t = tan_k(rho, 0.5 * t)?;
                let w = self.qc_scale * big_t.powf(1.0 / q);
                Ok(w * (1.0 + rho * big_t * big_t) / (q * big_t * (1.0 + kappa * w * w)))
            }
        }
    }

    /// `(radial, tangential)` singular values of the differential at radius `t`.
    pub fn singular_values(&self, t: f64) -> Result<(f64, f64)> {
        let r = self.distance_r(t)?;
        let r_prime = self.derivative_r_prime(t)?;
        Ok(stretches(self.rho, self.kappa, t, r, r_prime))
    }

    /// Jacobian determinant `radial · tangential^{n-1}`.
    pub fn jacobian(&self, t: f64) -> Result<f64> {
        let (radial, tangential) = self.singular_values(t)?;
        Ok(radial * tangential.powi(self.n as i32 - 1))
    }

    /// Volume of the image of `B_ρ(t)`, which is the ball `B_κ(R(t))`.
    pub fn image_ball_volume(&self, t: f64) -> Result<f64> {
        let r = self.distance_r(t)?;
        self.target().ball_volume(r)
    }

    /// Samples the map on a regular polar grid; see [`GridProjection`].
    pub fn project_grid(&self, resolution: usize) -> Result<GridProjection> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!("resolution must be >= 2, got {resolution}")));
        }
        let blowup_radius = self.blowup_radius();
        let mut nodes = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            let t = self.alpha * i as f64 / (resolution - 1) as f64;
            if blowup_radius.is_some_and(|b| t >= b) {
                break;
            }
            let r = self.distance_r(t)?;
            let (radial_sv, tangential_sv) = stretches(self.rho, self.kappa, t, r, self.derivative_r_prime(t)?);
            for u_index in 0..resolution {
                nodes.push(GridNode {
                    t,
                    u_index,
                    u: 2.0 * PI * u_index as f64 / resolution as f64,
                    r,
                    radial_sv,
                    tangential_sv,
                });
            }
        }
        Ok(GridProjection { nodes, blowup_radius })
    }
}

impl RadialProfile for AzimuthalMap {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn singular_values(&self, t: f64) -> Result<(f64, f64)> {
        AzimuthalMap::singular_values(self, t)
    }
}

/// One node of [`AzimuthalMap::project_grid`]: source polar coordinates
/// `(t, u)` map to target polar coordinates `(r, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridNode {
    pub t: f64,
    pub u_index: usize,
    /// Angle along a great circle of directions, `2π · u_index / resolution`.
    pub u: f64,
    pub r: f64,
    pub radial_sv: f64,
    pub tangential_sv: f64,
}

/// Grid nodes in t-major order; truncated before `blowup_radius` when the map
/// leaves the target chart inside the source ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridProjection {
    pub nodes: Vec<GridNode>,
    pub blowup_radius: Option<f64>,
}

/// Extremal stretches of a map and the radii where they occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisometryReport {
    pub sigma1: f64,
    pub sigma2: f64,
    pub aniso: f64,
    pub argmin_radius: f64,
    pub argmax_radius: f64,
    /// The source ball is wider than its convexity radius `π/(2√ρ)`, where
    /// the infinitesimal constants may underestimate the metric ones.
    pub beyond_convexity_radius: bool,
}

/// Anisometry `|log σ₁| + |log σ₂|` of an azimuthal map.
pub fn anisometry(map: &AzimuthalMap, tol: &Tolerance) -> Result<AnisometryReport> {
    if let Some(radius) = map.blowup_radius() {
        return Err(Error::Blowup { radius });
    }
    let mut report = anisometry_of(map, tol)?;
    report.beyond_convexity_radius = map.rho > 0.0 && map.alpha > 0.5 * PI / map.rho.sqrt();
    Ok(report)
}

/// Anisometry of any radial profile: extrema of the pointwise singular values
/// over a uniform grid, refined by golden-section search on the neighbouring
/// cells.
pub fn anisometry_of<P: RadialProfile + ?Sized>(profile: &P, tol: &Tolerance) -> Result<AnisometryReport> {
    tol.validate()?;
    let alpha = profile.alpha();
    let grid = |i: usize| alpha * i as f64 / SAMPLE_INTERVALS as f64;
    let mut lo = (f64::INFINITY, 0usize);
    let mut hi = (f64::NEG_INFINITY, 0usize);
    for i in 0..=SAMPLE_INTERVALS {
        let (radial, tangential) = profile.singular_values(grid(i))?;
        if !(radial > 0.0 && tangential > 0.0) || !radial.is_finite() || !tangential.is_finite() {
            return Err(Error::Internal(format!(
                "non-positive singular values ({radial}, {tangential}) at t = {}",
                grid(i)
            )));
        }
        let (small, large) = (radial.min(tangential), radial.max(tangential));
        if small < lo.0 {
            lo = (small, i);
        }
        if large > hi.0 {
            hi = (large, i);
        }
    }
    let cell = |i: usize| (grid(i.saturating_sub(1)), grid((i + 1).min(SAMPLE_INTERVALS)));
    let refine_tol = Tolerance {
        rel: tol.rel.max(1e-15),
        abs: tol.abs.max(f64::EPSILON * alpha),
        max_iter: tol.max_iter.max(100),
    };
    let min_at = |t: f64| profile.singular_values(t).map_or(f64::INFINITY, |(a, b)| a.min(b));
    let max_at = |t: f64| profile.singular_values(t).map_or(f64::NEG_INFINITY, |(a, b)| a.max(b));
    let (a, b) = cell(lo.1);
    let (mut argmin, mut sigma1) = golden_section_min(min_at, a, b, &refine_tol);
    if lo.0 < sigma1 {
        (argmin, sigma1) = (grid(lo.1), lo.0);
    }
    let (a, b) = cell(hi.1);
    let (mut argmax, mut sigma2) = golden_section_max(max_at, a, b, &refine_tol);
    if hi.0 > sigma2 {
        (argmax, sigma2) = (grid(hi.1), hi.0);
    }
    Ok(AnisometryReport {
        sigma1,
        sigma2,
        aniso: sigma1.ln().abs() + sigma2.ln().abs(),
        argmin_radius: argmin,
        argmax_radius: argmax,
        beyond_convexity_radius: false,
    })
}

/// Transition radius `β ∈ (0, α)` of the quasiconformal profile with linear
/// slope `σ`: the root of `sin_κ(σβ) / (σ Q sin_ρ(β)) = 1`. `None` when the
/// linear map is already `Q`-quasiconformal on all of `[0, α]`.
pub fn qc_transition_radius(rho: f64, kappa: f64, q: f64, sigma: f64, alpha: f64) -> Result<Option<f64>> {
    // sin_κ(σt)/σ = sin_{κσ²}(t), so the ratio is sin_{κσ²}/sin_ρ, increasing in t when κσ² < ρ
    let k = kappa * sigma * sigma;
    let excess = |t: f64| {
        if t == 0.0 {
            1.0 / q - 1.0
        } else {
            sin_k(k, t) / (q * sin_k(rho, t)) - 1.0
        }
    };
    if q == 1.0 || k >= rho {
        return Ok(None);
    }
    if excess(alpha) <= 0.0 {
        return Ok(None);
    }
    let tol = Tolerance::new(1e-15, 0.0, 300)?;
    find_root(excess, 0.0, alpha, &tol).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{solve_ode, OdeConfig};

    fn tol() -> Tolerance {
        Tolerance::new(1e-12, 0.0, 200).unwrap()
    }

    #[test]
    fn validates_parameters() {
        assert!(AzimuthalMap::new(1.0, 0.0, 2, 0.0, Profile::Equidistant).is_err());
        assert!(AzimuthalMap::new(1.0, 0.0, 2, PI, Profile::Equidistant).is_err());
        assert!(AzimuthalMap::new(1.0, 0.0, 1, 1.0, Profile::Equidistant).is_err());
        assert!(AzimuthalMap::new(1.0, 0.0, 2, 1.0, Profile::Contracting { sigma: 0.0 }).is_err());
        assert!(AzimuthalMap::new(1.0, 0.0, 2, 1.0, Profile::Conformal { sigma: -1.0 }).is_err());
        let bad_q = Profile::QuasiconformalOptimal {
            q: 0.5,
            sigma: 1.0,
            beta: 0.5,
        };
        assert!(AzimuthalMap::new(1.0, 0.0, 2, 1.0, bad_q).is_err());
        // beta that does not glue C^1
        let bad_beta = Profile::QuasiconformalOptimal {
            q: 2.0,
            sigma: 1.0,
            beta: 0.5,
        };
        assert!(AzimuthalMap::new(1.0, 0.0, 2, 1.0, bad_beta).is_err());
    }

    #[test]
    fn equidistant_is_identity_profile() {
        let map = AzimuthalMap::new(0.5, -1.0, 3, 1.2, Profile::Equidistant).unwrap();
        for &t in &[0.0, 0.3, 1.2] {
            assert_eq!(map.distance_r(t).unwrap(), t);
            assert_eq!(map.derivative_r_prime(t).unwrap(), 1.0);
        }
        let same = AzimuthalMap::new(-0.5, -0.5, 3, 1.2, Profile::Equidistant).unwrap();
        let (r, s) = same.singular_values(0.7).unwrap();
        assert_eq!((r, s), (1.0, 1.0));
        let rep = anisometry(&same, &tol()).unwrap();
        assert_eq!((rep.sigma1, rep.sigma2, rep.aniso), (1.0, 1.0, 0.0));
    }

    #[test]
    fn flat_conformal_is_linear() {
        let map = AzimuthalMap::new(0.0, 0.0, 2, 2.0, Profile::Conformal { sigma: 0.7 }).unwrap();
        for &t in &[0.0, 0.5, 2.0] {
            assert!((map.distance_r(t).unwrap() - 0.7 * t).abs() < 1e-15);
        }
    }

    #[test]
    fn conformal_closed_form_solves_the_ode() {
        let (rho, kappa, sigma, alpha) = (1.0, -1.0, 0.8, 0.5);
        let map = AzimuthalMap::new(rho, kappa, 2, alpha, Profile::Conformal { sigma }).unwrap();
        let eps = 1e-6 * alpha;
        let out = solve_ode(
            |t, y| sin_k(kappa, y) / sin_k(rho, t),
            eps,
            sigma * eps,
            alpha,
            &OdeConfig::default(),
        )
        .unwrap();
        let sol = out.solution();
        for i in 1..=20 {
            let t = alpha * i as f64 / 20.0;
            let ode = sol.eval(t).unwrap();
            assert!((ode - map.distance_r(t).unwrap()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn conformal_singular_values_agree() {
        for &(rho, kappa, sigma) in &[(1.0, 0.0, 1.0), (1.0, -1.0, 0.6), (-0.25, -2.0, 0.4), (0.5, 0.25, 1.3)] {
            let map = AzimuthalMap::new(rho, kappa, 3, 1.2, Profile::Conformal { sigma }).unwrap();
            for i in 0..=50 {
                let t = 1.2 * i as f64 / 50.0;
                let (a, b) = map.singular_values(t).unwrap();
                assert!((a - b).abs() <= 1e-10 * a, "({rho},{kappa},{sigma}) t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn conformal_derivative_matches_finite_differences() {
        let map = AzimuthalMap::new(0.5, -1.0, 2, 1.5, Profile::Conformal { sigma: 0.9 }).unwrap();
        let h = 1e-5;
        for &t in &[0.2, 0.8, 1.4] {
            let fd = (map.distance_r(t + h).unwrap() - map.distance_r(t - h).unwrap()) / (2.0 * h);
            assert!((fd - map.derivative_r_prime(t).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn volume_preserving_has_unit_jacobian() {
        for n in 2..=4 {
            let map = AzimuthalMap::new(1.0, -0.5, n, 1.2, Profile::VolumePreserving).unwrap();
            for &t in &[0.0, 0.05, 0.6, 1.2] {
                assert!((map.jacobian(t).unwrap() - 1.0).abs() < 1e-12);
                let v = map.image_ball_volume(t).unwrap();
                let expected = map.source().ball_volume(t).unwrap();
                assert!((v - expected).abs() <= 1e-9 * expected.max(1e-300));
            }
            // radial stretch from finite differences of R
            let h = 1e-5;
            let t = 0.7;
            let fd = (map.distance_r(t + h).unwrap() - map.distance_r(t - h).unwrap()) / (2.0 * h);
            assert!((fd - map.derivative_r_prime(t).unwrap()).abs() < 1e-7, "n={n}");
        }
    }

    #[test]
    fn jacobian_closed_forms() {
        let map = AzimuthalMap::new(1.0, 0.0, 2, 1.5, Profile::Equidistant).unwrap();
        for &t in &[0.3, 1.0, 1.5] {
            let j = map.jacobian(t).unwrap();
            assert!((j - t / t.sin()).abs() < 1e-14);
        }
        let lin = AzimuthalMap::new(0.0, 0.0, 3, 1.0, Profile::Contracting { sigma: 0.5 }).unwrap();
        assert!((lin.jacobian(0.4).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn equidistant_onto_flat_matches_sine_ratio() {
        let alpha = 1.3;
        let map = AzimuthalMap::new(1.0, 0.0, 2, alpha, Profile::Equidistant).unwrap();
        let rep = anisometry(&map, &tol()).unwrap();
        assert_eq!(rep.sigma1, 1.0);
        assert!((rep.sigma2 - alpha / alpha.sin()).abs() < 1e-13);
        assert!((rep.aniso - (alpha / alpha.sin()).ln()).abs() < 1e-13);
        assert_eq!(rep.argmax_radius, alpha);
    }

    #[test]
    fn contracting_into_hyperbolic_space() {
        let alpha: f64 = 1.0;
        // sinh(σ₀α) = α
        let sigma0 = alpha.asinh() / alpha;
        let map = AzimuthalMap::new(0.0, -1.0, 2, alpha, Profile::Contracting { sigma: sigma0 }).unwrap();
        let rep = anisometry(&map, &tol()).unwrap();
        assert!((rep.sigma2 - 1.0).abs() < 1e-14);
        assert!((rep.sigma1 - sigma0).abs() < 1e-15);
        assert!((rep.aniso + sigma0.ln()).abs() < 1e-13);
    }

    #[test]
    fn conformal_blowup_in_hyperbolic_space() {
        let map = AzimuthalMap::new(-1.0, -1.0, 2, 2.0, Profile::Conformal { sigma: 2.0 }).unwrap();
        let radius = map.blowup_radius().unwrap();
        assert!((radius - 2.0 * 0.5f64.atanh()).abs() < 1e-14);
        assert!(matches!(map.distance_r(1.5), Err(Error::Blowup { .. })));
        assert!(matches!(anisometry(&map, &tol()), Err(Error::Blowup { .. })));
        let grid = map.project_grid(11).unwrap();
        assert_eq!(grid.blowup_radius, Some(radius));
        assert!(grid.nodes.iter().all(|n| n.t < radius));
        assert_eq!(grid.nodes.len(), 6 * 11);
        let tame = AzimuthalMap::new(-1.0, -1.0, 2, 2.0, Profile::Conformal { sigma: 1.0 }).unwrap();
        assert_eq!(tame.blowup_radius(), None);
    }

    #[test]
    fn grid_is_t_major_and_increasing() {
        let map = AzimuthalMap::new(1.0, 0.0, 2, 1.0, Profile::Conformal { sigma: 1.0 }).unwrap();
        let grid = map.project_grid(5).unwrap();
        assert_eq!(grid.nodes.len(), 25);
        for (k, node) in grid.nodes.iter().enumerate() {
            assert_eq!(node.u_index, k % 5);
        }
        for w in grid.nodes.chunks(5).collect::<Vec<_>>().windows(2) {
            assert!(w[1][0].t > w[0][0].t && w[1][0].r > w[0][0].r);
        }
        assert!(map.project_grid(1).is_err());
    }

    fn qc_map(rho: f64, kappa: f64, q: f64, sigma: f64, alpha: f64) -> AzimuthalMap {
        let beta = qc_transition_radius(rho, kappa, q, sigma, alpha).unwrap().unwrap();
        AzimuthalMap::new(rho, kappa, 3, alpha, Profile::QuasiconformalOptimal { q, sigma, beta }).unwrap()
    }

    #[test]
    fn quasiconformal_profile_saturates_and_glues() {
        let (rho, kappa, q, sigma, alpha) = (1.0, 0.0, 1.1, 1.0, 1.5);
        let map = qc_map(rho, kappa, q, sigma, alpha);
        let Profile::QuasiconformalOptimal { beta, .. } = map.profile() else { unreachable!() };
        for i in 1..=200 {
            let t = alpha * i as f64 / 200.0;
            let (a, b) = map.singular_values(t).unwrap();
            let ratio = a.max(b) / a.min(b);
            assert!(ratio <= q * (1.0 + 1e-8));
            if t > beta {
                assert!((ratio - q).abs() < 1e-10, "t={t}: {ratio}");
            }
        }
        let h = 1e-6;
        let left = map.derivative_r_prime(beta - h).unwrap();
        let right = map.derivative_r_prime(beta + h).unwrap();
        // right branch slope evaluated at beta itself
        let glued = sin_k(kappa, sigma * beta) / (q * sin_k(rho, beta));
        assert!((glued - sigma).abs() < 1e-8);
        assert!((left - sigma).abs() < 1e-15);
        assert!((right - sigma).abs() < 1e-5);
        // one-sided second derivatives differ
        let at = map.derivative_r_prime(beta).unwrap();
        let d2_left = (at - left) / h;
        let d2_right = (right - at) / h;
        let expected = sigma * (crate::model_space::cos_k(kappa, sigma * beta) - q * beta.cos()) / (q * beta.sin());
        assert!(d2_left.abs() < 1e-9);
        assert!((d2_right - expected).abs() < 1e-4, "{d2_right} vs {expected}");
        assert!(expected.abs() > 1e-2);
    }

    #[test]
    fn quasiconformal_closed_form_matches_ode() {
        let (rho, kappa, q, sigma, alpha) = (0.5, -1.0, 1.5, 0.7, 1.6);
        let map = qc_map(rho, kappa, q, sigma, alpha);
        let Profile::QuasiconformalOptimal { beta, .. } = map.profile() else { unreachable!() };
        let out = solve_ode(
            |t, y| sin_k(kappa, y) / (q * sin_k(rho, t)),
            beta,
            sigma * beta,
            alpha,
            &OdeConfig::default(),
        )
        .unwrap();
        for i in 0..=20 {
            let t = beta + (alpha - beta) * i as f64 / 20.0;
            let ode = out.solution().eval(t).unwrap();
            assert!((ode - map.distance_r(t).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn no_transition_when_linear_map_is_quasiconformal() {
        assert_eq!(qc_transition_radius(1.0, 0.0, 10.0, 1.0, 1.0).unwrap(), None);
        assert_eq!(qc_transition_radius(1.0, 0.0, 1.0, 1.0, 1.0).unwrap(), None);
        assert!(qc_transition_radius(1.0, 0.0, 1.05, 1.0, 1.0).unwrap().is_some());
    }

    #[test]
    fn flat_conformal_homothety() {
        let base = AzimuthalMap::new(0.0, 0.0, 2, 1.0, Profile::Conformal { sigma: 0.4 }).unwrap();
        let scaled = AzimuthalMap::new(0.0, 0.0, 2, 1.0, Profile::Conformal { sigma: 1.2 }).unwrap();
        for &t in &[0.1, 0.5, 1.0] {
            let lhs = scaled.distance_r(t).unwrap();
            let rhs = 3.0 * base.distance_r(t).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn convexity_flag() {
        let wide = AzimuthalMap::new(1.0, 0.0, 2, 2.0, Profile::Equidistant).unwrap();
        assert!(anisometry(&wide, &tol()).unwrap().beyond_convexity_radius);
        let narrow = AzimuthalMap::new(1.0, 0.0, 2, 1.0, Profile::Equidistant).unwrap();
        assert!(!anisometry(&narrow, &tol()).unwrap().beyond_convexity_radius);
    }
}
