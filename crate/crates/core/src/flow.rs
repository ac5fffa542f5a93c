//! Gradient-Hamiltonian flow of `π = det` on `n x n` complex matrices.
//!
//! The vector field is
//!
//! ```text
//! V_{π,m} = -∇Re(π) / ‖∇Re(π)‖² · m Re(π)^{1 - 1/m}
//! ```
//!
//! with respect to the real inner product `⟨X, Y⟩ = Re Tr(XY*)`; `m = 1` is
//! the plain gradient-Hamiltonian field, for which `V(Re π) = -1`. Along a
//! flow line started on the real positive slice, `Re det` follows
//! `(det(B0)^{1/m} - t)^m`, so an `SL(n)` start reaches the singular fiber at
//! `t = 1`.
//!
//! Integration is an embedded Dormand-Prince 5(4) pair with per-entry error
//! control. The field blows up where `∇Re det` vanishes, so the integrator
//! stops once `Re det < det_stop_tol` and snaps the terminal point onto the
//! singular fiber using the conserved singular-value data of the current
//! point (see [`crate::contraction::contract_closed_form`]).

use num_complex::Complex64;

use crate::contraction::contract_closed_form;
use crate::error::{Error, Result};
use crate::matrix::{adjugate, momentum_right, CMat, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    /// Normalization index of `V_{π,m}`.
    pub m: u32,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub det_stop_tol: f64,
    pub max_steps: usize,
    /// Number of intervals of the uniform output grid on `[0, t_end]`.
    pub grid_intervals: usize,
    pub grad_floor: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            m: 1,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            det_stop_tol: 1e-6,
            max_steps: 100_000,
            grid_intervals: 100,
            grad_floor: 1e-12,
        }
    }
}

impl FlowConfig {
    pub fn with_m(m: u32) -> Self {
        Self { m, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let positive = [self.rel_tol, self.abs_tol, self.det_stop_tol, self.grad_floor];
        if self.m == 0 {
            return Err(Error::Domain("normalization index m must be positive".into()));
        }
        if positive.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Domain("flow tolerances must be positive".into()));
        }
        if self.grid_intervals == 0 {
            return Err(Error::Domain("grid_intervals must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSample {
    pub t: f64,
    pub b: ComplexMatrix,
    /// The sample sits on the uniform output grid.
    pub on_grid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    /// Every accepted step, starting at `t = 0`; the snapped terminal is last.
    pub samples: Vec<FlowSample>,
    pub step_stats: StepStats,
    pub terminal: ComplexMatrix,
    /// Time at which the flow reaches the singular fiber.
    pub t_end: f64,
    /// Time of the last integrated point before snapping.
    pub t_stop: f64,
}

impl FlowTrajectory {
    pub fn initial(&self) -> &ComplexMatrix {
        &self.samples[0].b
    }

    /// Samples on the uniform output grid, including both endpoints.
    pub fn grid(&self) -> impl Iterator<Item = &FlowSample> {
        self.samples.iter().filter(|s| s.on_grid)
    }

    /// Integrated samples, i.e. everything but the snapped terminal.
    pub fn integrated(&self) -> &[FlowSample] {
        &self.samples[..self.samples.len() - 1]
    }
}

/// Gradient of `Re det` for `⟨X, Y⟩ = Re Tr(XY*)`, equal to `adj(A)*`.
pub fn grad_re_det(a: &ComplexMatrix) -> ComplexMatrix {
    adjugate(a).adjoint()
}

/// `V_{π,m}` for `π = det`.
pub fn vfield(a: &ComplexMatrix, m: u32) -> Result<ComplexMatrix> {
    vfield_power(a, 1, m, FlowConfig::default().grad_floor)
}

/// `V_{π^p, m}` for `π = det`; `p = 1` gives [`vfield`].
pub fn vfield_power(a: &ComplexMatrix, p: u32, m: u32, grad_floor: f64) -> Result<ComplexMatrix> {
    if p == 0 || m == 0 {
        return Err(Error::Domain("power and normalization index must be positive".into()));
    }
    let det = a.det();
    // d(det^p) = p det^{p-1} Tr(adj(A) dA), so ∇Re(det^p) = conj(p det^{p-1}) adj(A)*.
    let coeff = (det.powu(p - 1) * p as f64).conj();
    let grad = adjugate(a).adjoint().into_inner() * coeff;
    let norm_sq = grad.norm_squared();
    if norm_sq.sqrt() < grad_floor {
        return Err(Error::SingularLocus {
            norm: norm_sq.sqrt(),
            floor: grad_floor,
        });
    }
    let mut scale = -1.0 / norm_sq;
    if m > 1 {
        let re = det.powu(p).re;
        if re < 0.0 {
            return Err(Error::Domain(format!("Re π = {re:e} < 0 for m = {m}")));
        }
        scale *= m as f64 * re.powf(1.0 - 1.0 / m as f64);
    }
    Ok(ComplexMatrix::wrap(grad * Complex64::new(scale, 0.0)))
}

// Dormand-Prince 5(4) tableau. The field is autonomous, so the stage nodes
// are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights equal the last row of A (FSAL); these are the
// differences between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step {
    y: CMat,
    dy: CMat,
    err: f64,
}

fn dopri_step<F>(f: &F, y: &CMat, dy0: &CMat, h: f64, cfg: &FlowConfig) -> Result<Step>
where
    F: Fn(&CMat) -> Result<CMat>,
{
    let mut k: Vec<CMat> = Vec::with_capacity(7);
    k.push(dy0.clone());
    let mut ys = y.clone();
    for row in &A[1..] {
        ys = y.clone();
        for (kj, &a) in k.iter().zip(row) {
            if a != 0.0 {
                ys += kj * Complex64::new(h * a, 0.0);
            }
        }
        k.push(f(&ys)?);
    }
    // The last stage is evaluated at the fifth-order solution.
    let dy = k[6].clone();
    let mut err_vec = CMat::zeros(y.nrows(), y.ncols());
    for (kj, &e) in k.iter().zip(&E) {
        if e != 0.0 {
            err_vec += kj * Complex64::new(h * e, 0.0);
        }
    }
    let err = error_norm(y, &ys, &err_vec, cfg);
    Ok(Step { y: ys, dy, err })
}

/// Max over real and imaginary parts of every entry of `|e| / (abs + rel |y|)`.
fn error_norm(y0: &CMat, y1: &CMat, e: &CMat, cfg: &FlowConfig) -> f64 {
    let mut worst = 0.0_f64;
    for ((a, b), d) in y0.iter().zip(y1.iter()).zip(e.iter()) {
        let sre = cfg.abs_tol + cfg.rel_tol * a.re.abs().max(b.re.abs());
        let sim = cfg.abs_tol + cfg.rel_tol * a.im.abs().max(b.im.abs());
        worst = worst.max(d.re.abs() / sre).max(d.im.abs() / sim);
    }
    worst
}

/// Integrates `V_{π,m}` from `b0` until `Re det` drops below
/// `cfg.det_stop_tol`, then snaps onto the singular fiber.
///
/// `det(b0)` must be real and positive. The integrator lands exactly on the
/// uniform grid `t_k = k t_end / grid_intervals`, so trajectories of related
/// starting points can be compared pointwise.
pub fn integrate_flow(b0: &ComplexMatrix, cfg: &FlowConfig) -> Result<FlowTrajectory> {
    cfg.validate()?;
    let d0 = b0.det();
    if d0.re.is_nan() || d0.re <= 0.0 || d0.im.abs() > 1e-10 * d0.norm().max(1.0) {
        return Err(Error::Domain(format!(
            "flow must start on the real positive slice, det(B0) = {d0}"
        )));
    }
    let m = cfg.m;
    let inv_m = 1.0 / m as f64;
    let t_end = d0.re.powf(inv_m);
    // Re det = (t_end - t)^m, so this is where it reaches det_stop_tol / 2^m.
    let t_target = t_end - 0.5 * cfg.det_stop_tol.powf(inv_m);

    let field = |y: &CMat| -> Result<CMat> {
        Ok(vfield_power(&ComplexMatrix::wrap(y.clone()), 1, m, cfg.grad_floor)?.into_inner())
    };

    let grid: Vec<f64> = (1..cfg.grid_intervals)
        .map(|k| k as f64 * t_end / cfg.grid_intervals as f64)
        .filter(|&t| t < t_target)
        .collect();
    let mut next_grid = 0;

    let mut samples = vec![FlowSample {
        t: 0.0,
        b: b0.clone(),
        on_grid: true,
    }];
    let mut stats = StepStats {
        accepted: 0,
        rejected: 0,
        min_step: f64::INFINITY,
    };
    let mut t = 0.0;
    let mut y = b0.as_mat().clone();
    let mut h = 1e-2 * t_end;
    let h_min = 1e-14 * t_end.max(1.0);

    if t_target > 0.0 {
        let mut dy = field(&y)?;
        loop {
            if y.clone().determinant().re < cfg.det_stop_tol || t >= t_target {
                break;
            }
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(Error::MaxSteps(cfg.max_steps));
            }
            let stop_at = grid.get(next_grid).copied().unwrap_or(t_target);
            let mut h_try = h;
            let mut lands = false;
            if t + h_try >= stop_at {
                h_try = stop_at - t;
                lands = true;
            }
            match dopri_step(&field, &y, &dy, h_try, cfg) {
                Ok(step) if step.err <= 1.0 => {
                    t = if lands { stop_at } else { t + h_try };
                    y = step.y;
                    dy = step.dy;
                    stats.accepted += 1;
                    stats.min_step = stats.min_step.min(h_try);
                    let on_grid = lands && next_grid < grid.len();
                    if on_grid {
                        next_grid += 1;
                    }
                    samples.push(FlowSample {
                        t,
                        b: ComplexMatrix::wrap(y.clone()),
                        on_grid,
                    });
                    let factor = if step.err == 0.0 {
                        5.0
                    } else {
                        (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    // Landing on a grid point shortens the step artificially;
                    // keep the proposed size rather than the clipped one.
                    h = if lands { h.max(h_try * factor) } else { h_try * factor };
                }
                Ok(step) => {
                    stats.rejected += 1;
                    h = h_try * (0.9 * step.err.powf(-0.2)).clamp(0.1, 0.9);
                }
                Err(Error::SingularLocus { .. }) | Err(Error::Domain(_)) => {
                    stats.rejected += 1;
                    h = h_try * 0.25;
                }
                Err(e) => return Err(e),
            }
            if h < h_min {
                let det = y.clone().determinant().re;
                if det < cfg.det_stop_tol {
                    break;
                }
                return Err(Error::StepUnderflow { t, det });
            }
        }
    }
    if !stats.min_step.is_finite() {
        stats.min_step = 0.0;
    }

    let last = ComplexMatrix::wrap(y);
    let det_last = last.det().re;
    if det_last >= cfg.det_stop_tol {
        return Err(Error::StepUnderflow { t, det: det_last });
    }
    let terminal = contract_closed_form(&last);
    samples.push(FlowSample {
        t: t_end,
        b: terminal.clone(),
        on_grid: true,
    });
    Ok(FlowTrajectory {
        samples,
        step_stats: stats,
        terminal,
        t_end,
        t_stop: t,
    })
}

/// Max-norm deviation of the traceless right momentum of `b` from that of `b0`.
pub fn momentum_drift(b0: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let mu0 = momentum_right(b0, true);
    let mu = momentum_right(b, true);
    crate::matrix::max_norm(&(mu.as_mat() - mu0.as_mat()))
}
