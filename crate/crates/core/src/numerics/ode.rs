use super::{find_root, Tolerance};
use crate::error::{Error, Result};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense output coefficients (Hairer, Norsett & Wanner, DOPRI5 contd5).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    /// Per-step local error target; `max_iter` caps the number of attempted steps.
    pub tol: Tolerance,
    /// `|y|` beyond this value is reported as escape to infinity.
    pub ceiling: f64,
    /// Initial step; `None` picks 1% of the interval.
    pub initial_step: Option<f64>,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance {
                rel: 1e-12,
                abs: 1e-14,
                max_iter: 100_000,
            },
            ceiling: 1e12,
            initial_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    t: f64,
    h: f64,
    rcont: [f64; 5],
}

impl Step {
    fn eval(&self, t: f64) -> f64 {
        let theta = (t - self.t) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])))
    }
}

/// Dense-output solution of a scalar ODE over the traversed interval.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    t0: f64,
    y0: f64,
    steps: Vec<Step>,
}

impl OdeSolution {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(self.t0, |s| s.t + s.h)
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Accepted mesh points `(t, y)` including the initial condition.
    pub fn mesh(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push((self.t0, self.y0));
        for s in &self.steps {
            out.push((s.t + s.h, s.rcont[0] + s.rcont[1]));
        }
        out
    }

    /// Interpolated value at `t`; `None` outside the integrated range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if self.steps.is_empty() {
            return (t == self.t0).then_some(self.y0);
        }
        let forward = self.steps[0].h > 0.0;
        let inside = if forward {
            t >= self.t0 && t <= self.t_end()
        } else {
            t <= self.t0 && t >= self.t_end()
        };
        if !inside {
            return None;
        }
        let idx = self.steps.partition_point(|s| {
            let end = s.t + s.h;
            if forward {
                end < t
            } else {
                end > t
            }
        });
        let step = &self.steps[idx.min(self.steps.len() - 1)];
        Some(step.eval(t))
    }
}

/// How an integration ended.
#[derive(Debug, Clone)]
pub enum OdeOutcome {
    /// The solution reached `t1`.
    Completed(OdeSolution),
    /// The solution escaped to infinity (ceiling crossed or step size
    /// underflowed) at `radius`; `solution` covers the interval before it.
    Escaped { radius: f64, solution: OdeSolution },
}

impl OdeOutcome {
    pub fn solution(&self) -> &OdeSolution {
        match self {
            OdeOutcome::Completed(s) => s,
            OdeOutcome::Escaped { solution, .. } => solution,
        }
    }

    pub fn escape_radius(&self) -> Option<f64> {
        match self {
            OdeOutcome::Completed(_) => None,
            OdeOutcome::Escaped { radius, .. } => Some(*radius),
        }
    }
}

/// Integrates the scalar ODE `y' = f(t, y)` from `(t0, y0)` to `t1` with an
/// adaptive Dormand-Prince 5(4) scheme and 4th-order dense output.
pub fn solve_ode<F: Fn(f64, f64) -> f64>(f: F, t0: f64, y0: f64, t1: f64, config: &OdeConfig) -> Result<OdeOutcome> {
    config.tol.validate()?;
    if !t0.is_finite() || !t1.is_finite() || !y0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite ODE data t0={t0}, y0={y0}, t1={t1}"
        )));
    }
    let span = t1 - t0;
    let mut solution = OdeSolution {
        t0,
        y0,
        steps: Vec::new(),
    };
    if span == 0.0 {
        return Ok(OdeOutcome::Completed(solution));
    }
    let dir = span.signum();
    let tol = config.tol;
    let mut h = config.initial_step.map_or(0.01 * span.abs(), f64::abs).min(span.abs()) * dir;
    let mut t = t0;
    let mut y = y0;
    let mut k = [0.0; 7];
    k[0] = f(t, y);
    if !k[0].is_finite() {
        return Err(Error::Domain {
            func: "solve_ode",
            detail: format!("right-hand side not finite at t={t}"),
        });
    }

    for _ in 0..tol.max_iter {
        let remaining = t1 - t;
        if remaining * dir <= 0.0 {
            return Ok(OdeOutcome::Completed(solution));
        }
        if h.abs() >= remaining.abs() {
            h = remaining;
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            return Ok(OdeOutcome::Escaped {
                radius: t,
                solution,
            });
        }

        let mut finite = true;
        for s in 1..7 {
            let ys = y + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s] = f(t + C[s] * h, ys);
            if !k[s].is_finite() {
                finite = false;
                break;
            }
        }
        if !finite {
            h *= 0.25;
            continue;
        }
        let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err_abs = (h * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = tol.abs + tol.rel * y.abs().max(y_new.abs());
        let err = if scale > 0.0 { err_abs / scale } else { f64::INFINITY };

        if err <= 1.0 && y_new.is_finite() {
            let dy = y_new - y;
            let bspl = h * k[0] - dy;
            let step = Step {
                t,
                h,
                rcont: [
                    y,
                    dy,
                    bspl,
                    dy - h * k[6] - bspl,
                    h * (0..7).map(|j| D[j] * k[j]).sum::<f64>(),
                ],
            };
            solution.steps.push(step);
            if y_new.abs() > config.ceiling {
                let ceiling = config.ceiling.copysign(y_new);
                let crossing = find_root(
                    |s| step.eval(s) - ceiling,
                    t,
                    t + h,
                    &Tolerance::new(1e-15, 0.0, 200)?,
                )
                .unwrap_or(t + h);
                return Ok(OdeOutcome::Escaped {
                    radius: crossing,
                    solution,
                });
            }
            t += h;
            y = y_new;
            k[0] = k[6];
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
        }
    }
    Err(Error::NonConvergence {
        what: "adaptive ODE integration",
        iterations: tol.max_iter,
    })
}
