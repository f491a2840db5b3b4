//! Seeded verification suites behind `aniso verify`.
//!
//! Each suite reseeds its own generator from the requested seed, so a suite
//! reports the same measurements alone or as part of `all`.

use aniso_core::bounds::{small_alpha_coefficient, BoundQuery, MapClass};
use aniso_core::ellipsoid::{equality_deviation, equality_witness, lemma_check, random_instance};
use aniso_core::model_space::{arctan_k, cos_k, g_k, sin_k, tan_k, ModelSpace, TaylorKind};
use aniso_core::numerics::richardson_extrapolate;
use aniso_core::{anisometry, bound, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::Suite;
use crate::commands::sampler_tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn at_most(&mut self, name: &'static str, measured: f64, threshold: f64) {
        self.push(name, measured, Comparison::AtMost, threshold, measured <= threshold);
    }

    fn at_least(&mut self, name: &'static str, measured: f64, threshold: f64) {
        self.push(name, measured, Comparison::AtLeast, threshold, measured >= threshold);
    }

    fn push(&mut self, name: &'static str, measured: f64, comparison: Comparison, threshold: f64, pass: bool) {
        self.checks.push(Check {
            suite: self.suite,
            name,
            measured,
            comparison,
            threshold,
            pass,
        });
    }
}

pub fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Identities => "identities",
        Suite::Sharpness => "sharpness",
        Suite::Taylor => "taylor",
        Suite::Ellipsoid => "ellipsoid",
        Suite::All => "all",
    }
}

pub fn run(suite: Suite, seed: u64) -> Result<Report> {
    let parts = match suite {
        Suite::All => vec![Suite::Identities, Suite::Sharpness, Suite::Taylor, Suite::Ellipsoid],
        one => vec![one],
    };
    let mut checks = Vec::new();
    for part in parts {
        let mut rec = Recorder {
            suite: suite_name(part),
            checks: Vec::new(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match part {
            Suite::Identities => identities(&mut rec, &mut rng)?,
            Suite::Sharpness => sharpness(&mut rec)?,
            Suite::Taylor => taylor(&mut rec)?,
            Suite::Ellipsoid => ellipsoid(&mut rec, &mut rng)?,
            Suite::All => unreachable!("expanded above"),
        }
        checks.extend(rec.checks);
    }
    Ok(Report {
        suite: suite_name(suite),
        seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

fn identities(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let kappa: f64 = rng.random_range(-2.0..2.0);
        let x = if kappa < 0.0 {
            rng.random_range(0.0..0.99) / (-kappa).sqrt()
        } else {
            rng.random_range(0.0..3.0)
        };
        let rational = g_k(kappa, x)?;
        let trig = sin_k(kappa, 2.0 * arctan_k(kappa, x)?);
        worst = worst.max((rational - trig).abs() / rational.abs().max(1.0));
    }
    rec.at_most("double_angle_rational_form", worst, 1e-12);

    let mut worst = 0.0f64;
    for i in 0..=100 {
        let t = 1.4 * i as f64 / 100.0;
        for k in [1e-8, -1e-8] {
            worst = worst
                .max((sin_k(k, t) - sin_k(0.0, t)).abs())
                .max((cos_k(k, t) - cos_k(0.0, t)).abs())
                .max((tan_k(k, t)? - tan_k(0.0, t)?).abs())
                .max((arctan_k(k, t)? - arctan_k(0.0, t)?).abs());
        }
    }
    rec.at_most("continuity_across_zero_curvature", worst, 1e-6);

    let (mut worst_sin, mut worst_tan) = (0.0f64, 0.0f64);
    let h = 1e-5;
    for _ in 0..200 {
        let kappa: f64 = rng.random_range(-2.0..2.0);
        let frac = rng.random_range(0.05..0.9);
        let t = if kappa > 0.0 {
            frac * std::f64::consts::FRAC_PI_2 / kappa.sqrt()
        } else {
            2.0 * frac
        };
        let d_sin = (sin_k(kappa, t + h) - sin_k(kappa, t - h)) / (2.0 * h);
        let c = cos_k(kappa, t);
        worst_sin = worst_sin.max((d_sin - c).abs() / c.abs().max(1e-3));
        let d_tan = (tan_k(kappa, t + h)? - tan_k(kappa, t - h)?) / (2.0 * h);
        let expected = 1.0 + kappa * tan_k(kappa, t)?.powi(2);
        worst_tan = worst_tan.max((d_tan - expected).abs() / expected);
    }
    rec.at_most("sin_derivative_is_cos", worst_sin, 1e-6);
    rec.at_most("tan_derivative", worst_tan, 1e-6);

    let mut worst = 0.0f64;
    let mut monotone_gap = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..6);
        let kappa: f64 = rng.random_range(-2.0..2.0);
        let space = ModelSpace::new(n, kappa)?;
        let cap = if kappa > 0.0 { space.conjugate_radius() } else { 4.0 };
        let t = rng.random_range(0.01..0.98) * cap;
        let v = space.ball_volume(t)?;
        worst = worst.max((space.ball_volume_inverse(v)? - t).abs() / t);
        monotone_gap = monotone_gap.min(space.ball_volume(t + 0.01 * cap)? - v);
    }
    rec.at_most("ball_volume_round_trip", worst, 1e-10);
    rec.at_least("ball_volume_increment", monotone_gap, f64::MIN_POSITIVE);

    let mut concavity = f64::INFINITY;
    let mut curvature_order = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..5);
        let kappa: f64 = rng.random_range(-1.5..1.5);
        let space = ModelSpace::new(n, kappa)?;
        let top = if kappa > 0.0 {
            0.5 * space.full_space_volume()?
        } else {
            space.ball_volume(3.0)?
        };
        let x = rng.random_range(0.02..0.98) * top;
        let y = rng.random_range(0.02..0.98) * top;
        let mid = space.isoperimetric_profile(0.5 * (x + y))?;
        let chord = 0.5 * (space.isoperimetric_profile(x)? + space.isoperimetric_profile(y)?);
        concavity = concavity.min((mid - chord) / chord);
        let higher = ModelSpace::new(n, kappa + rng.random_range(0.0..0.5))?;
        let v = if higher.kappa() > 0.0 {
            x.min(0.5 * higher.full_space_volume()?)
        } else {
            x
        };
        let (lo, hi) = (space.isoperimetric_profile(v)?, higher.isoperimetric_profile(v)?);
        curvature_order = curvature_order.min((lo - hi) / lo);
    }
    rec.at_least("profile_midpoint_concavity", concavity, -1e-12);
    rec.at_least("profile_decreasing_in_curvature", curvature_order, -1e-12);
    Ok(())
}

const RHOS: [f64; 5] = [-1.0, -0.25, 0.0, 0.5, 1.0];
const KAPPAS: [f64; 5] = [-2.0, -1.0, -0.5, 0.0, 0.25];
const ALPHAS: [f64; 5] = [0.1, 0.4, 0.8, 1.2, 1.6];

fn sharpness(rec: &mut Recorder) -> Result<()> {
    let tol = sampler_tolerance();
    let classes: [(&'static str, MapClass, &[usize]); 4] = [
        ("general", MapClass::General, &[3]),
        ("volume_preserving", MapClass::VolumePreserving, &[2, 3, 4]),
        ("conformal", MapClass::Conformal, &[3]),
        ("quasiconformal_q2", MapClass::Quasiconformal { q: 2.0 }, &[3]),
    ];
    for (name, class, dims) in classes {
        let mut worst = 0.0f64;
        for &n in dims {
            for &rho in &RHOS {
                for &kappa in KAPPAS.iter().filter(|&&k| k < rho) {
                    for &alpha in &ALPHAS {
                        let res = match bound(&BoundQuery::new(rho, kappa, n, alpha, class)?) {
                            Err(Error::HemisphereExceeded { .. }) => continue,
                            other => other?,
                        };
                        let sampled = anisometry(&res.optimal_map, &tol)?.aniso;
                        worst = worst.max((sampled - res.value).abs());
                    }
                }
            }
        }
        rec.at_most(name, worst, 1e-7);
    }
    Ok(())
}

fn taylor(rec: &mut Recorder) -> Result<()> {
    let hs = [2e-2, 1e-2, 5e-3];
    let mut worst = 0.0f64;
    for &(n, kappa) in &[(2, 1.0), (3, -1.0), (4, 0.5), (5, -2.0)] {
        let space = ModelSpace::new(n, kappa)?;
        let series = space.taylor_coeffs(TaylorKind::BallVolume);
        let lead = series.coefficient(0).expect("leading term");
        let expected = series.coefficient(1).expect("second term") / lead;
        let mut vals = Vec::new();
        for &t in &hs {
            vals.push((space.ball_volume(t)? / (lead * t.powi(n as i32)) - 1.0) / (t * t));
        }
        worst = worst.max((richardson_extrapolate(&vals, 2.0) - expected).abs() / expected.abs());
    }
    rec.at_most("ball_volume_second_coefficient", worst, 1e-4);

    let mut worst = 0.0f64;
    for &kappa in &[-2.0, -0.5, 0.5, 1.0] {
        let expected = -kappa / 6.0;
        let vals: Vec<f64> = hs.iter().map(|&t| (sin_k(kappa, t) - t) / t.powi(3)).collect();
        worst = worst.max((richardson_extrapolate(&vals, 2.0) - expected).abs() / expected.abs());
    }
    rec.at_most("sin_cubic_coefficient", worst, 1e-4);

    let alphas = [1e-2, 5e-3, 2.5e-3];
    let mut worst: f64 = 0.0;
    for &(rho, kappa) in &[(1.0, 0.0), (0.5, -1.0), (0.0, -2.0), (1.0, 0.25)] {
        for (class, n) in [
            (MapClass::General, 3),
            (MapClass::Conformal, 3),
            (MapClass::VolumePreserving, 2),
            (MapClass::VolumePreserving, 4),
        ] {
            let mut vals = Vec::new();
            for &a in &alphas {
                vals.push(bound(&BoundQuery::new(rho, kappa, n, a, class)?)?.value / (a * a));
            }
            let expected = small_alpha_coefficient(class, rho, kappa, n)?;
            worst = worst.max((richardson_extrapolate(&vals, 2.0) - expected).abs() / expected);
        }
    }
    rec.at_most("small_alpha_bound_coefficients", worst, 1e-3);
    Ok(())
}

fn ellipsoid(rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut min_slack = f64::INFINITY;
    for k in 0..10_000 {
        let n = 2 + k % 9;
        let q = rng.random_range(1.0..5.0);
        let (form, normal) = random_instance(rng, n, q)?;
        let rep = lemma_check(&form, &normal, q)?;
        min_slack = min_slack.min(rep.first_slack).min(rep.second_slack);
    }
    rec.at_least("random_instance_min_slack", min_slack, -1e-10);

    let (mut witness, mut spectral, mut angle) = (0.0f64, 0.0f64, 0.0f64);
    for n in 2..=10 {
        let q = rng.random_range(1.0..5.0);
        let lambda = rng.random_range(0.2..3.0);
        let (form, normal) = equality_witness(rng, n, q, lambda)?;
        witness = witness.max(lemma_check(&form, &normal, q)?.second_slack.abs());
        let (s, a) = equality_deviation(&form, &normal, q)?;
        spectral = spectral.max(s);
        angle = angle.max(a);
    }
    rec.at_most("witness_slack", witness, 1e-9);
    rec.at_most("witness_spectral_pattern", spectral, 1e-6);
    rec.at_most("witness_normal_angle", angle, 1e-4);
    Ok(())
}
