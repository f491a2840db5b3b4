//! Sharp anisometry lower bounds for maps `B_ρ(α) → X_κ`, `κ ≤ ρ`, with the
//! azimuthal maps attaining them and the radii up to which they hold.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::azimuthal::{anisometry, qc_transition_radius, AzimuthalMap, Profile};
use crate::error::{domain, Error, Result};
use crate::model_space::{arcsin_k, conjugate_radius, cos_k, g_k, sin_k, tan_k, ModelSpace};
use crate::numerics::{find_root, Tolerance};

/// Map class whose infimal anisometry is sought.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum MapClass {
    General,
    VolumePreserving,
    Conformal,
    Quasiconformal { q: f64 },
}

impl MapClass {
    pub fn name(&self) -> &'static str {
        match self {
            MapClass::General => "general",
            MapClass::VolumePreserving => "volume_preserving",
            MapClass::Conformal => "conformal",
            MapClass::Quasiconformal { .. } => "quasiconformal",
        }
    }
}

/// Parameters of a bound evaluation. `inj_m`, `inj_n` default to `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub rho: f64,
    pub kappa: f64,
    pub n: usize,
    pub alpha: f64,
    pub map_class: MapClass,
    pub inj_m: f64,
    pub inj_n: f64,
}

impl BoundQuery {
    pub fn new(rho: f64, kappa: f64, n: usize, alpha: f64, map_class: MapClass) -> Result<Self> {
        let q = Self {
            rho,
            kappa,
            n,
            alpha,
            map_class,
            inj_m: f64::INFINITY,
            inj_n: f64::INFINITY,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_injectivity(mut self, inj_m: f64, inj_n: f64) -> Result<Self> {
        self.inj_m = inj_m;
        self.inj_n = inj_n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_class(mut self, map_class: MapClass) -> Result<Self> {
        self.map_class = map_class;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ModelSpace::new(self.n, self.rho)?;
        ModelSpace::new(self.n, self.kappa)?;
        if self.kappa > self.rho {
            return Err(Error::InvalidParameter(format!(
                "target curvature {} must not exceed source curvature {}",
                self.kappa, self.rho
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < conjugate_radius(self.rho)) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} must lie in (0, {})",
                self.alpha,
                conjugate_radius(self.rho)
            )));
        }
        if !(self.inj_m > 0.0) || !(self.inj_n > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "injectivity radii must be positive, got {} and {}",
                self.inj_m, self.inj_n
            )));
        }
        if let MapClass::Quasiconformal { q } = self.map_class {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(Error::InvalidParameter(format!("Q must be >= 1, got {q}")));
            }
        }
        Ok(())
    }

    fn source(&self) -> ModelSpace {
        ModelSpace::new(self.n, self.rho).expect("validated")
    }

    fn target(&self) -> ModelSpace {
        ModelSpace::new(self.n, self.kappa).expect("validated")
    }

    fn at(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    /// `min(inj(M), conj(ρ))`: no validity radius exceeds it.
    fn radius_cap(&self) -> f64 {
        self.inj_m.min(conjugate_radius(self.rho))
    }
}

/// A lower bound on anisometry and an azimuthal map attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub optimal_map: AzimuthalMap,
    pub validity_radius: f64,
    /// `α ≤ validity_radius`; outside it the value is still reported.
    pub validity_ok: bool,
}

fn root_tol() -> Tolerance {
    Tolerance {
        rel: 1e-15,
        abs: 0.0,
        max_iter: 300,
    }
}

fn sampler_tol() -> Tolerance {
    Tolerance {
        rel: 1e-13,
        abs: 0.0,
        max_iter: 200,
    }
}

fn finish(q: &BoundQuery, value: f64, map: AzimuthalMap, validity_radius: f64) -> BoundResult {
    BoundResult {
        value,
        optimal_map: map,
        validity_radius,
        validity_ok: q.alpha <= validity_radius,
    }
}

/// Dispatches on `q.map_class`.
pub fn bound(q: &BoundQuery) -> Result<BoundResult> {
    match q.map_class {
        MapClass::General => general_bound(q),
        MapClass::VolumePreserving => vp_bound(q),
        MapClass::Conformal => conformal_bound(q),
        MapClass::Quasiconformal { .. } => qc_bound(q),
    }
}

/// Contraction ratio `σ₀ ∈ (0, 1]` with `sin_κ(σ₀α) = sin_ρ(α)`, for κ < 0.
pub fn sigma0(rho: f64, kappa: f64, alpha: f64) -> Result<f64> {
    let target = sin_k(rho, alpha);
    find_root(|s| sin_k(kappa, s * alpha) - target, 0.0, 1.0, &root_tol()).map_err(|e| match e {
        Error::InvalidBracket { .. } => Error::Internal(format!("sigma0 not bracketed in (0, 1]: {e}")),
        other => other,
    })
}

/// Bound for arbitrary smooth maps.
pub fn general_bound(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let (value, map) = if q.kappa >= 0.0 {
        let value = (sin_k(q.kappa, q.alpha) / sin_k(q.rho, q.alpha)).ln();
        (value, AzimuthalMap::new(q.rho, q.kappa, q.n, q.alpha, Profile::Equidistant)?)
    } else {
        let s0 = sigma0(q.rho, q.kappa, q.alpha)?;
        (-s0.ln(), AzimuthalMap::new(q.rho, q.kappa, q.n, q.alpha, Profile::Contracting { sigma: s0 })?)
    };
    Ok(finish(q, value.max(0.0), map, radius_limit_a1(q)?))
}

/// Greatest `a ≤ cap` such that `holds` is true on all of `(0, a]`.
///
/// The conditions involved are true near 0; the first failure is located on a
/// uniform scan (or by doubling when `cap` is infinite) and then bisected.
fn first_failure<F: FnMut(f64) -> Result<bool>>(cap: f64, mut holds: F) -> Result<f64> {
    const SCAN: usize = 256;
    let (mut pass, mut fail) = if cap.is_finite() {
        let mut prev = 0.0;
        let mut failed = None;
        for i in 1..=SCAN {
            let a = cap * i as f64 / SCAN as f64;
            if !holds(a)? {
                failed = Some(a);
                break;
            }
            prev = a;
        }
        match failed {
            None => return Ok(cap),
            Some(a) => (prev, a),
        }
    } else {
        let mut a = 1.0;
        let mut prev = 0.0;
        loop {
            if !holds(a)? {
                break;
            }
            if a > 1e12 {
                return Ok(f64::INFINITY);
            }
            prev = a;
            a *= 2.0;
        }
        // refine the doubling step on a scan so a narrow early excursion is not skipped
        let mut lo = prev;
        for i in 1..=SCAN {
            let b = prev + (a - prev) * i as f64 / SCAN as f64;
            if !holds(b)? {
                return bisect_boundary(lo, b, holds);
            }
            lo = b;
        }
        (lo, a)
    };
    if pass == 0.0 {
        pass = fail * 1e-9;
        while !holds(pass)? {
            fail = pass;
            pass *= 1e-3;
            if pass < 1e-300 {
                return Ok(0.0);
            }
        }
    }
    bisect_boundary(pass, fail, holds)
}

fn bisect_boundary<F: FnMut(f64) -> Result<bool>>(mut pass: f64, mut fail: f64, mut holds: F) -> Result<f64> {
    while fail - pass > 1e-15 * fail {
        let mid = 0.5 * (pass + fail);
        if mid <= pass || mid >= fail {
            break;
        }
        if holds(mid)? {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok(pass)
}

/// Validity radius of [`general_bound`].
pub fn radius_limit_a1(q: &BoundQuery) -> Result<f64> {
    let (rho, kappa) = (q.rho, q.kappa);
    let cap = q.radius_cap();
    if kappa > 0.0 {
        // σ₂ below the bound's ratio keeps σ₁α ≤ σ₂α under the limit
        let limit = q.inj_n.min(0.5 * PI / kappa.sqrt());
        first_failure(cap, |a| {
            let s = sin_k(rho, a);
            Ok(s > 0.0 && a * sin_k(kappa, a) / s <= limit)
        })
    } else {
        if q.inj_n == f64::INFINITY {
            return Ok(cap);
        }
        first_failure(cap, |a| {
            let image = arcsin_k(kappa, sin_k(rho, a))?;
            Ok(a * a / image <= q.inj_n)
        })
    }
}

/// Bound for volume-preserving maps.
pub fn vp_bound(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let n = q.n as f64;
    let v = q.source().ball_volume(q.alpha)?;
    let boundary = q.target().isoperimetric_profile(v)?;
    let value = n / (n - 1.0) * (boundary / q.source().sphere_area(q.alpha)?).ln();
    let map = AzimuthalMap::new(q.rho, q.kappa, q.n, q.alpha, Profile::VolumePreserving)?;
    let mut validity = q.radius_cap();
    if q.kappa > 0.0 {
        let hemisphere = 0.5 * q.target().full_space_volume()?;
        if let Ok(r) = q.source().ball_volume_inverse(hemisphere) {
            validity = validity.min(r);
        }
    }
    Ok(finish(q, value.max(0.0), map, validity))
}

/// Closed-form conformal optimizer ratio `R'(0)` for κ < 0: the conformal
/// azimuthal map whose boundary stretch is 1.
fn conformal_sigma_closed(rho: f64, kappa: f64, alpha: f64) -> Result<f64> {
    let s = sin_k(rho, alpha);
    let big_t = tan_k(rho, 0.5 * alpha)?;
    let root = (1.0 - kappa * s * s).sqrt();
    // (√(1-κs²) - 1)/(-κs) rewritten without cancellation
    Ok(s / (1.0 + root) / big_t)
}

/// Same ratio by root finding on `G_κ(σ tan_ρ(α/2)) = sin_ρ(α)`.
fn conformal_sigma_numeric(rho: f64, kappa: f64, alpha: f64) -> Result<f64> {
    let s = sin_k(rho, alpha);
    let big_t = tan_k(rho, 0.5 * alpha)?;
    let edge = 1.0 / ((-kappa).sqrt() * big_t);
    find_root(|sigma| g_k(kappa, sigma * big_t).unwrap_or(f64::INFINITY) - s, 0.0, edge * (1.0 - 1e-15), &root_tol())
}

/// Bound for conformal maps.
pub fn conformal_bound(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let (rho, kappa, alpha) = (q.rho, q.kappa, q.alpha);
    let big_t = tan_k(rho, 0.5 * alpha)?;
    let t2 = big_t * big_t;
    let (value, sigma) = if kappa > 0.0 {
        (((rho - kappa) * t2 / (1.0 + kappa * t2)).ln_1p(), 1.0)
    } else if kappa == 0.0 {
        ((rho * t2).ln_1p(), 1.0)
    } else {
        let s = sin_k(rho, alpha);
        let c = cos_half_squared(rho, alpha);
        // log(-2κ sin_ρ²(α/2) / (√(1-κ sin_ρ²α) - 1)) with the difference rationalized
        let value = ((1.0 + (1.0 - kappa * s * s).sqrt()) / (2.0 * c)).ln();
        let closed = conformal_sigma_closed(rho, kappa, alpha)?;
        let numeric = conformal_sigma_numeric(rho, kappa, alpha)?;
        if (closed - numeric).abs() > 1e-9 * closed {
            return Err(Error::Internal(format!(
                "conformal optimizer mismatch: closed form {closed}, root finding {numeric}"
            )));
        }
        (value, closed)
    };
    let map = AzimuthalMap::new(rho, kappa, q.n, alpha, Profile::Conformal { sigma })?;
    Ok(finish(q, value.max(0.0), map, radius_limit_a3(q)?))
}

/// `cos_ρ(α/2)² = sin_ρ(α) / (2 tan_ρ(α/2))`.
fn cos_half_squared(rho: f64, alpha: f64) -> f64 {
    let c = cos_k(rho, 0.5 * alpha);
    c * c
}

/// Validity radius of [`conformal_bound`].
pub fn radius_limit_a3(q: &BoundQuery) -> Result<f64> {
    let cap = q.radius_cap();
    if q.kappa <= 0.0 {
        return Ok(cap);
    }
    let (rho, kappa, n) = (q.rho, q.kappa, q.n as f64);
    let total = q.target().full_space_volume()?;
    let source = q.source();
    first_failure(cap, |a| {
        let lhs = (total / (2.0 * source.ball_volume(a)?)).powf(1.0 / n);
        let t2 = tan_k(rho, 0.5 * a)?.powi(2);
        Ok(lhs >= 1.0 + (rho - kappa) * t2 / (1.0 + kappa * t2))
    })
}

/// `F(v) = Q log tan_κ(V_κ⁻¹(v)/2)`; for κ > 0 only up to a hemisphere.
pub fn f_kappa_q(kappa: f64, n: usize, q: f64, v: f64) -> Result<f64> {
    let space = ModelSpace::new(n, kappa)?;
    if kappa > 0.0 {
        let hemisphere = 0.5 * space.full_space_volume()?;
        if v > hemisphere * (1.0 + 1e-12) {
            return Err(Error::HemisphereExceeded { v, hemisphere });
        }
    }
    if !(v > 0.0) {
        return Err(domain("f_kappa_q", format!("volume must be positive, got {v}")));
    }
    let r = space.ball_volume_inverse(v)?;
    Ok(q * tan_k(kappa, 0.5 * r)?.ln())
}

/// Lower bound on `σ₂` of a `Q`-quasiconformal map whose image of `B(β)` has
/// the volume of a `κ`-ball of radius `r_beta`; `+∞` when the bound is
/// infinite (the argument of `G_κ` leaves its domain for κ < 0).
pub fn qc_sigma2_lower(rho: f64, kappa: f64, n: usize, q: f64, alpha: f64, beta: f64, r_beta: f64) -> Result<f64> {
    ModelSpace::new(n, rho)?;
    ModelSpace::new(n, kappa)?;
    if !(beta > 0.0 && beta < alpha && alpha < conjugate_radius(rho)) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < beta < alpha < conj(rho), got beta = {beta}, alpha = {alpha}"
        )));
    }
    if !(q >= 1.0) || !(r_beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("need Q >= 1 and r_beta >= 0, got {q}, {r_beta}")));
    }
    let ratio = tan_k(rho, 0.5 * alpha)? / tan_k(rho, 0.5 * beta)?;
    let w = tan_k(kappa, 0.5 * r_beta)? * ratio.powf(1.0 / q);
    if kappa < 0.0 && w * (-kappa).sqrt() >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(g_k(kappa, w)? / sin_k(rho, alpha))
}

/// Comparison map of the quasiconformal bound with linear slope `σ`: the
/// glued profile when a transition radius exists in `(0, α)`, otherwise the
/// linear map, which is then already `Q`-quasiconformal.
pub fn qc_comparison_map(q: &BoundQuery, quasi: f64, sigma: f64) -> Result<AzimuthalMap> {
    let profile = match qc_transition_radius(q.rho, q.kappa, quasi, sigma, q.alpha)? {
        Some(beta) => Profile::QuasiconformalOptimal { q: quasi, sigma, beta },
        None if sigma == 1.0 => Profile::Equidistant,
        None => Profile::Contracting { sigma },
    };
    AzimuthalMap::new(q.rho, q.kappa, q.n, q.alpha, profile)
}

fn qc_optimal_map(q: &BoundQuery, quasi: f64) -> Result<AzimuthalMap> {
    if q.kappa >= 0.0 {
        return qc_comparison_map(q, quasi, 1.0);
    }
    // σ with σ₂ = 1; log σ₂ is increasing in σ
    let log_sigma2 = |sigma: f64| -> f64 {
        match qc_comparison_map(q, quasi, sigma).and_then(|m| anisometry(&m, &sampler_tol())) {
            Ok(rep) => rep.sigma2.ln(),
            Err(Error::Blowup { .. }) => 50.0,
            Err(_) => f64::NAN,
        }
    };
    let mut lo = sigma0(q.rho, q.kappa, q.alpha)?.min(0.5);
    while log_sigma2(lo) > 0.0 {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::Internal("quasiconformal slope search lost its bracket".into()));
        }
    }
    let tol = Tolerance {
        rel: 1e-14,
        abs: 0.0,
        max_iter: 200,
    };
    let sigma = find_root(log_sigma2, lo, 1.0, &tol).map_err(|e| match e {
        Error::NonConvergence { iterations, .. } => Error::NonConvergence {
            what: "quasiconformal slope search",
            iterations,
        },
        other => other,
    })?;
    qc_comparison_map(q, quasi, sigma)
}

/// Bound for `Q`-quasiconformal maps; the value is the anisometry of the
/// glued comparison map. At `Q = 1` this is exactly [`conformal_bound`], and
/// once the linear map of [`general_bound`] is itself `Q`-quasiconformal the
/// two bounds coincide.
pub fn qc_bound(q: &BoundQuery) -> Result<BoundResult> {
    q.validate()?;
    let MapClass::Quasiconformal { q: quasi } = q.map_class else {
        return Err(Error::InvalidParameter(format!(
            "qc_bound needs the quasiconformal class, got {}",
            q.map_class.name()
        )));
    };
    if quasi == 1.0 {
        let conformal = conformal_bound(q)?;
        return Ok(finish(q, conformal.value, conformal.optimal_map, radius_limit_a4(q, quasi)?));
    }
    let map = qc_optimal_map(q, quasi)?;
    let validity = radius_limit_a4(q, quasi)?;
    if !matches!(map.profile(), Profile::QuasiconformalOptimal { .. }) {
        let general = general_bound(q)?;
        return Ok(finish(q, general.value, general.optimal_map, validity));
    }
    let value = anisometry(&map, &sampler_tol())?.aniso;
    Ok(finish(q, value, map, validity))
}

/// Validity radius of [`qc_bound`]. For κ > 0, the greatest α up to which
/// the half-volume of `X_κ` dominates `V_ρ(α)` scaled by the `n`-th power of
/// the exponentiated bound, the analogue of the conformal condition.
pub fn radius_limit_a4(q: &BoundQuery, quasi: f64) -> Result<f64> {
    let cap = q.radius_cap();
    if q.kappa <= 0.0 {
        return Ok(cap);
    }
    let n = q.n as f64;
    let total = q.target().full_space_volume()?;
    let source = q.source();
    let class = MapClass::Quasiconformal { q: quasi };
    first_failure(cap, |a| {
        let lhs = (total / (2.0 * source.ball_volume(a)?)).powf(1.0 / n);
        let at = q.at(a).with_class(class)?;
        let value = if quasi == 1.0 {
            let t2 = tan_k(q.rho, 0.5 * a)?.powi(2);
            ((q.rho - q.kappa) * t2 / (1.0 + q.kappa * t2)).ln_1p()
        } else {
            let map = qc_optimal_map(&at, quasi)?;
            match map.profile() {
                Profile::QuasiconformalOptimal { .. } => anisometry(&map, &sampler_tol())?.aniso,
                _ => (sin_k(q.kappa, a) / sin_k(q.rho, a)).ln(),
            }
        };
        Ok(lhs >= value.exp())
    })
}

/// Leading coefficient `c` of `bound(α) = c α² + O(α⁴)`.
///
/// A `Q`-quasiconformal class with `Q > 1` shares the general coefficient:
/// the linear comparison map is `Q`-quasiconformal on small balls.
pub fn small_alpha_coefficient(map_class: MapClass, rho: f64, kappa: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(kappa <= rho) {
        return Err(Error::InvalidParameter(format!("need kappa <= rho, got {kappa} > {rho}")));
    }
    let gap = rho - kappa;
    Ok(match map_class {
        MapClass::General => gap / 6.0,
        MapClass::Conformal => gap / 4.0,
        MapClass::VolumePreserving => n as f64 * gap / (2.0 * (n as f64 + 2.0)),
        MapClass::Quasiconformal { q: 1.0 } => gap / 4.0,
        MapClass::Quasiconformal { .. } => gap / 6.0,
    })
}

/// Outcome of [`ahlfors_blowup`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AhlforsOutcome {
    /// Radius lower bound `r(α)` of a ball with the volume of the image.
    Bounded { r: f64 },
    /// The conformal map with `R'(0) = σ₀` leaves hyperbolic space here.
    BlowsUpAt { radius: f64 },
}

/// Radius `2 artanh(1/σ₀)` where the curvature −1 conformal map with
/// `R'(0) = σ₀ > 1` escapes; `None` for `σ₀ ≤ 1`.
pub fn blowup_radius(sigma0: f64) -> Option<f64> {
    (sigma0 > 1.0).then(|| 2.0 * (1.0 / sigma0).atanh())
}

/// `tanh(r(α)/2) ≥ σ₀ tanh(α/2)` between balls of curvature −1.
pub fn ahlfors_blowup(sigma0: f64, alpha: f64) -> Result<AhlforsOutcome> {
    if !(sigma0 > 0.0 && sigma0.is_finite()) || !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need sigma0 > 0 and alpha > 0, got {sigma0}, {alpha}"
        )));
    }
    if let Some(radius) = blowup_radius(sigma0) {
        if alpha >= radius {
            return Ok(AhlforsOutcome::BlowsUpAt { radius });
        }
    }
    Ok(AhlforsOutcome::Bounded {
        r: 2.0 * (sigma0 * (0.5 * alpha).tanh()).atanh(),
    })
}

/// `sin_κ(σ₁ α) / sin_ρ(α)`: the least `σ₂` compatible with co-Lipschitz
/// constant `σ₁`.
pub fn general_sigma2_lemma(rho: f64, kappa: f64, n: usize, sigma1: f64, alpha: f64) -> Result<f64> {
    ModelSpace::new(n, rho)?;
    ModelSpace::new(n, kappa)?;
    if !(sigma1 > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma1 must be positive, got {sigma1}")));
    }
    if !(alpha > 0.0 && alpha < conjugate_radius(rho)) {
        return Err(Error::BeyondConjugateRadius {
            t: alpha,
            limit: conjugate_radius(rho),
        });
    }
    if sigma1 * alpha >= conjugate_radius(kappa) {
        return Err(Error::BeyondConjugateRadius {
            t: sigma1 * alpha,
            limit: conjugate_radius(kappa),
        });
    }
    Ok(sin_k(kappa, sigma1 * alpha) / sin_k(rho, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::golden_section_min;

    fn query(rho: f64, kappa: f64, n: usize, alpha: f64, class: MapClass) -> BoundQuery {
        BoundQuery::new(rho, kappa, n, alpha, class).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::new(1e-13, 0.0, 200).unwrap()
    }

    #[test]
    fn query_validation() {
        assert!(BoundQuery::new(0.0, 1.0, 2, 1.0, MapClass::General).is_err());
        assert!(BoundQuery::new(1.0, 0.0, 2, PI, MapClass::General).is_err());
        assert!(BoundQuery::new(1.0, 0.0, 2, 1.0, MapClass::Quasiconformal { q: 0.9 }).is_err());
        let q = query(1.0, 0.0, 2, 1.0, MapClass::General);
        assert!(q.with_injectivity(0.0, 1.0).is_err());
    }

    #[test]
    fn equal_curvatures_give_zero() {
        for &k in &[-1.0, 0.0, 0.5] {
            for class in [
                MapClass::General,
                MapClass::VolumePreserving,
                MapClass::Conformal,
                MapClass::Quasiconformal { q: 2.0 },
            ] {
                let r = bound(&query(k, k, 3, 1.0, class)).unwrap();
                assert!(r.value.abs() < 1e-12, "{k} {class:?}: {}", r.value);
            }
        }
    }

    #[test]
    fn general_flat_target() {
        let alpha = PI / 2.0;
        let r = general_bound(&query(1.0, 0.0, 2, alpha, MapClass::General)).unwrap();
        assert!((r.value - (PI / 2.0).ln()).abs() < 1e-15);
        let rep = anisometry(&r.optimal_map, &tol()).unwrap();
        assert!((rep.aniso - r.value).abs() < 1e-12);
    }

    #[test]
    fn general_hyperbolic_target() {
        let r = general_bound(&query(0.0, -1.0, 2, 1.0, MapClass::General)).unwrap();
        // σ₀ = asinh(1)
        assert!((r.value + 1f64.asinh().ln()).abs() < 1e-14);
        assert_eq!(r.optimal_map.profile(), Profile::Contracting { sigma: 1f64.asinh() });
        let rep = anisometry(&r.optimal_map, &tol()).unwrap();
        assert!((rep.aniso - r.value).abs() < 1e-12);
        assert!((rep.sigma2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn a1_limits() {
        let hadamard = query(1.0, -1.0, 2, 1.0, MapClass::General).with_injectivity(1.3, f64::INFINITY).unwrap();
        assert_eq!(radius_limit_a1(&hadamard).unwrap(), 1.3);
        let tight = query(-1.0, -2.0, 2, 0.1, MapClass::General).with_injectivity(0.3, f64::INFINITY).unwrap();
        assert_eq!(radius_limit_a1(&tight).unwrap(), 0.3);
        let sphere = query(1.0, 0.25, 2, 1.0, MapClass::General);
        let a1 = radius_limit_a1(&sphere).unwrap();
        assert!(a1 >= PI / 2.0);
        // 2α sin(α/2) / sin α = α / cos(α/2) reaches π/(2√κ) = π
        assert!((a1 / (0.5 * a1).cos() - PI).abs() < 1e-12, "{a1}");
        // a finite target injectivity radius binds
        let bound_n = sphere.with_injectivity(f64::INFINITY, 0.5).unwrap();
        let a = radius_limit_a1(&bound_n).unwrap();
        assert!((a / (0.5 * a).cos() - 0.5).abs() < 1e-12, "{a}");
        let neg = query(0.0, -1.0, 2, 0.2, MapClass::General).with_injectivity(f64::INFINITY, 2.0).unwrap();
        let a = radius_limit_a1(&neg).unwrap();
        assert!((a * a / a.asinh() - 2.0).abs() < 1e-12, "{a}");
    }

    #[test]
    fn a1_excludes_cells_where_conformal_beats_general() {
        // with the ratio inverted this cell would be admitted, yet the
        // conformal map there has smaller anisometry than the general formula
        let q = query(0.491, 0.4, 3, 2.785, MapClass::General);
        let general = general_bound(&q).unwrap();
        let conformal = conformal_bound(&q).unwrap();
        assert!(conformal.value < general.value);
        assert!(!general.validity_ok);
        let inverted = 2.785 * sin_k(0.491, 2.785) / sin_k(0.4, 2.785);
        assert!(inverted < 0.5 * PI / 0.4f64.sqrt());
    }

    #[test]
    fn vp_flat_target_in_the_plane() {
        let alpha: f64 = 1.0;
        let r = vp_bound(&query(1.0, 0.0, 2, alpha, MapClass::VolumePreserving)).unwrap();
        let expected = 2.0 * (1.0 / (alpha / 2.0).cos()).ln();
        assert!((r.value - expected).abs() < 1e-13, "{} vs {expected}", r.value);
        let rep = anisometry(&r.optimal_map, &tol()).unwrap();
        assert!((rep.aniso - r.value).abs() < 1e-10);
    }

    #[test]
    fn vp_equals_n_log_boundary_stretch() {
        for n in 2..=4 {
            let r = vp_bound(&query(0.5, -1.0, n, 1.2, MapClass::VolumePreserving)).unwrap();
            let (_, tangential) = r.optimal_map.singular_values(1.2).unwrap();
            assert!((r.value - n as f64 * tangential.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn conformal_flat_target() {
        for &alpha in &[0.3, 1.0, 2.0] {
            let r = conformal_bound(&query(1.0, 0.0, 2, alpha, MapClass::Conformal)).unwrap();
            let expected = -2.0 * (alpha / 2.0).cos().ln();
            assert!((r.value - expected).abs() < 1e-14);
            let rep = anisometry(&r.optimal_map, &tol()).unwrap();
            assert!((rep.aniso - r.value).abs() < 1e-10);
        }
    }

    #[test]
    fn conformal_hyperbolic_target_matches_numeric_optimum() {
        for &(rho, kappa, alpha) in &[(1.0, -1.0, 1.0), (0.0, -0.5, 1.6), (-0.25, -2.0, 0.8)] {
            let q = query(rho, kappa, 2, alpha, MapClass::Conformal);
            let r = conformal_bound(&q).unwrap();
            let rep = anisometry(&r.optimal_map, &tol()).unwrap();
            assert!((rep.aniso - r.value).abs() < 1e-10, "{rep:?} vs {}", r.value);
            assert!((rep.sigma2 - 1.0).abs() < 1e-12);
            // unsimplified branch formula
            let s = sin_k(rho, alpha);
            let h = sin_k(rho, 0.5 * alpha);
            let raw = (-2.0 * kappa * h * h / ((1.0 - kappa * s * s).sqrt() - 1.0)).ln();
            assert!((raw - r.value).abs() < 1e-10);
            let Profile::Conformal { sigma } = r.optimal_map.profile() else { unreachable!() };
            let aniso = |x: f64| {
                let m = AzimuthalMap::new(rho, kappa, 2, alpha, Profile::Conformal { sigma: x }).unwrap();
                anisometry(&m, &tol()).map_or(f64::INFINITY, |r| r.aniso)
            };
            let (best, _) = golden_section_min(aniso, 0.5 * sigma, 1.0, &Tolerance::new(1e-10, 0.0, 200).unwrap());
            assert!((best - sigma).abs() < 1e-6, "{best} vs {sigma}");
        }
    }

    #[test]
    fn a3_spherical_root() {
        let q = query(1.0, 0.5, 2, 0.5, MapClass::Conformal);
        let a3 = radius_limit_a3(&q).unwrap();
        let total = ModelSpace::new(2, 0.5).unwrap().full_space_volume().unwrap();
        let cond = |a: f64| {
            let lhs = (total / (2.0 * ModelSpace::new(2, 1.0).unwrap().ball_volume(a).unwrap())).sqrt();
            let t2 = (0.5 * a).tan().powi(2);
            lhs >= 1.0 + 0.5 * t2 / (1.0 + 0.5 * t2)
        };
        assert!(a3 > 0.0 && a3 < PI);
        assert!(cond(a3 - 1e-9) && !cond(a3 + 1e-9), "{a3}");
        assert_eq!(radius_limit_a3(&query(1.0, -1.0, 2, 0.5, MapClass::Conformal)).unwrap(), PI);
        let limited = query(1.0, -1.0, 2, 0.5, MapClass::Conformal).with_injectivity(0.7, f64::INFINITY).unwrap();
        assert_eq!(radius_limit_a3(&limited).unwrap(), 0.7);
    }

    #[test]
    fn f_round_trip_and_derivative() {
        for &(kappa, n) in &[(1.0, 2), (-1.0, 3), (0.0, 4), (0.5, 3)] {
            let space = ModelSpace::new(n, kappa).unwrap();
            for &t in &[0.2, 0.7, 1.3] {
                let v = space.ball_volume(t).unwrap();
                let f = f_kappa_q(kappa, n, 1.5, v).unwrap();
                assert!((f - 1.5 * tan_k(kappa, 0.5 * t).unwrap().ln()).abs() < 1e-9);
                let h = 1e-5 * v;
                let fd = (f_kappa_q(kappa, n, 1.5, v + h).unwrap() - f_kappa_q(kappa, n, 1.5, v - h).unwrap()) / (2.0 * h);
                let m = n as f64 - 1.0;
                let expected = 1.5 * crate::model_space::omega(n).powf(1.0 / m)
                    / space.isoperimetric_profile(v).unwrap().powf(n as f64 / m);
                assert!((fd - expected).abs() < 1e-5 * expected, "({kappa},{n},{t}): {fd} vs {expected}");
            }
        }
        // bounded image in hyperbolic space: Q log(1/√-κ)
        let space = ModelSpace::new(3, -1.0).unwrap();
        let far = f_kappa_q(-1.0, 3, 2.0, space.ball_volume(30.0).unwrap()).unwrap();
        assert!(far < 0.0 && far > -1e-10);
    }

    #[test]
    fn qc_sigma2_lower_cases() {
        // isometry saturates
        let v = qc_sigma2_lower(0.5, 0.5, 3, 1.0, 1.2, 0.4, 0.4).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        // conformal maps attain equality for every β
        let map = AzimuthalMap::new(1.0, -1.0, 2, 1.0, Profile::Conformal { sigma: 0.7 }).unwrap();
        let (_, at_alpha) = map.singular_values(1.0).unwrap();
        for &beta in &[0.1, 0.5, 0.9] {
            let r = map.distance_r(beta).unwrap();
            let lower = qc_sigma2_lower(1.0, -1.0, 2, 1.0, 1.0, beta, r).unwrap();
            assert!((lower - at_alpha).abs() < 1e-13);
        }
        assert_eq!(qc_sigma2_lower(-1.0, -1.0, 2, 1.0, 2.0, 1.0, 5.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn qc_reduces_to_conformal_at_q_one() {
        for &(rho, kappa) in &[(1.0, 0.0), (0.5, -1.0), (1.0, 0.25)] {
            let c = conformal_bound(&query(rho, kappa, 3, 1.0, MapClass::Conformal)).unwrap();
            let qc = qc_bound(&query(rho, kappa, 3, 1.0, MapClass::Quasiconformal { q: 1.0 })).unwrap();
            assert_eq!(c.value, qc.value);
        }
    }

    #[test]
    fn qc_decreases_to_general() {
        for &(rho, kappa) in &[(1.0, 0.0), (0.5, -1.0)] {
            let alpha = 1.2;
            let general = general_bound(&query(rho, kappa, 3, alpha, MapClass::General)).unwrap().value;
            let conformal = conformal_bound(&query(rho, kappa, 3, alpha, MapClass::Conformal)).unwrap().value;
            let mut prev = conformal;
            for &quasi in &[1.0001, 1.01, 1.05, 1.2, 1.5, 2.0, 10.0, 100.0] {
                let v = qc_bound(&query(rho, kappa, 3, alpha, MapClass::Quasiconformal { q: quasi })).unwrap().value;
                assert!(v <= prev + 1e-10, "Q={quasi}: {v} > {prev}");
                assert!(v >= general - 1e-10, "Q={quasi}: {v} < {general}");
                prev = v;
            }
            assert!((prev - general).abs() < 1e-12);
        }
    }

    #[test]
    fn qc_negative_target_has_unit_sigma2() {
        let r = qc_bound(&query(0.5, -1.0, 3, 1.4, MapClass::Quasiconformal { q: 1.1 })).unwrap();
        assert!(matches!(r.optimal_map.profile(), Profile::QuasiconformalOptimal { .. }));
        let rep = anisometry(&r.optimal_map, &tol()).unwrap();
        assert!((rep.sigma2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn small_alpha_coefficients() {
        assert_eq!(small_alpha_coefficient(MapClass::General, 6.0, 0.0, 2).unwrap(), 1.0);
        assert_eq!(small_alpha_coefficient(MapClass::Conformal, 1.0, -3.0, 2).unwrap(), 1.0);
        let big = small_alpha_coefficient(MapClass::VolumePreserving, 1.0, -1.0, 100_000).unwrap();
        assert!((big - 1.0).abs() < 1e-4);
    }

    #[test]
    fn ahlfors_cases() {
        for &a in &[0.1, 1.0, 5.0] {
            match ahlfors_blowup(1.0, a).unwrap() {
                AhlforsOutcome::Bounded { r } => assert!((r - a).abs() < 1e-12),
                other => panic!("{other:?}"),
            }
        }
        let expected = 2.0 * 0.5f64.atanh();
        assert_eq!(ahlfors_blowup(2.0, 3.0).unwrap(), AhlforsOutcome::BlowsUpAt { radius: expected });
        assert!(matches!(ahlfors_blowup(2.0, 0.5).unwrap(), AhlforsOutcome::Bounded { .. }));
        match ahlfors_blowup(0.5, 1.0).unwrap() {
            AhlforsOutcome::Bounded { r } => {
                let map = AzimuthalMap::new(-1.0, -1.0, 2, 1.0, Profile::Conformal { sigma: 0.5 }).unwrap();
                assert!((r - map.distance_r(1.0).unwrap()).abs() < 1e-13);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lemma_minimizers() {
        assert_eq!(general_sigma2_lemma(0.5, 0.5, 2, 1.0, 1.0).unwrap(), 1.0);
        let t = Tolerance::new(1e-12, 0.0, 300).unwrap();
        let objective = |rho: f64, kappa: f64, alpha: f64| {
            move |s: f64| s.ln().abs() + general_sigma2_lemma(rho, kappa, 2, s, alpha).unwrap().ln().abs()
        };
        let (s, _) = golden_section_min(objective(1.0, 0.25, 1.0), 0.1, 3.0, &t);
        assert!((s - 1.0).abs() < 1e-6);
        // flat target: every ratio in [sin α, 1] is optimal, only the value is pinned
        let (_, v) = golden_section_min(objective(1.0, 0.0, 1.0), 0.1, 10.0, &t);
        assert!((v + 1f64.sin().ln()).abs() < 1e-12);
        let (s, v) = golden_section_min(objective(0.0, -1.0, 1.0), 0.1, 10.0, &t);
        let s0 = sigma0(0.0, -1.0, 1.0).unwrap();
        assert!((s - s0).abs() < 1e-6 && (v + s0.ln()).abs() < 1e-10);
        assert!(general_sigma2_lemma(0.0, 1.0, 2, 4.0, 1.0).is_err());
    }

    #[test]
    fn dominance_on_a_small_grid() {
        for &(rho, kappa) in &[(1.0, 0.0), (0.5, -1.0), (0.0, -2.0), (1.0, 0.25)] {
            for &alpha in &[0.4, 1.2] {
                let g = general_bound(&query(rho, kappa, 3, alpha, MapClass::General)).unwrap().value;
                let c = conformal_bound(&query(rho, kappa, 3, alpha, MapClass::Conformal)).unwrap().value;
                let v = vp_bound(&query(rho, kappa, 3, alpha, MapClass::VolumePreserving)).unwrap().value;
                assert!(c >= g - 1e-12 && v >= g - 1e-12, "({rho},{kappa},{alpha}): {g} {c} {v}");
            }
        }
    }
}
