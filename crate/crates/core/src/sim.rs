//! Method-of-steps simulation of `x(t) = Σ A_j x(t-Λ_j) + B u(t)` on
//! commensurable meshes, the finite reachability operator over a horizon,
//! minimum-norm steering, and the frequency-domain consistency check
//! `H(s)·X(s) = B·U(s)`.
//!
//! Everything except the frequency check is exact rational arithmetic.
//!
//! Why the finite operator settles L1 exact controllability here: with all
//! delays multiples of the mesh step ρ, the recursion never mixes mesh
//! offsets, so an L1 function on an interval is a direct integral over
//! offsets θ ∈ [0, ρ) of identical copies of the cell recursion; the state
//! window is reachable for every integrable target iff the one cell-level
//! operator is onto, and solving cell-wise with any fixed right inverse maps
//! integrable data to integrable controls.

use num::complex::Complex64;
use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::hautus::SystemSpec;
use crate::measure::PiecewiseConstant;
use crate::ratmat::{dot, RatMatrix};
use crate::rational::{format_rational, rational_gcd, to_f64, Rational};
use crate::Result;

/// Coarsest mesh step carrying all delays: their rational gcd.
pub fn natural_mesh_step(spec: &SystemSpec) -> Result<Rational> {
    let mut step = Rational::zero();
    for lag in spec.delays() {
        let r = lag.as_rational().ok_or_else(|| {
            Error::MeshMismatch(format!("delay {lag} is not rational"))
        })?;
        step = rational_gcd(&step, &r);
    }
    if step.is_zero() {
        return Err(Error::MeshMismatch("no positive rational delay".into()));
    }
    Ok(step)
}

/// Default controllability horizon `d · Λ_N`.
pub fn default_horizon(spec: &SystemSpec) -> Result<Rational> {
    let last = spec.delays().last().expect("spec has delays");
    let lam = last.as_rational().ok_or_else(|| {
        Error::MeshMismatch(format!("delay {last} is not rational"))
    })?;
    Ok(lam * Rational::from_integer(spec.state_dim().into()))
}

/// Delays as integer cell shifts on mesh `rho`.
fn delay_shifts(spec: &SystemSpec, rho: &Rational) -> Result<Vec<usize>> {
    if !rho.is_positive() {
        return Err(Error::InvalidInput("mesh step must be positive".into()));
    }
    let mut shifts = Vec::with_capacity(spec.delays().len());
    for lag in spec.delays() {
        let r = lag.as_rational().ok_or_else(|| {
            Error::MeshMismatch(format!("delay {lag} is not rational"))
        })?;
        let ratio = &r / rho;
        if !ratio.is_integer() {
            return Err(Error::MeshMismatch(format!(
                "delay {} is not a multiple of mesh step {}",
                lag,
                format_rational(rho)
            )));
        }
        shifts.push(ratio.to_integer().to_usize().ok_or_else(|| {
            Error::MeshMismatch("delay shift exceeds usize".into())
        })?);
    }
    Ok(shifts)
}

fn cells_of(total: &Rational, rho: &Rational, what: &str) -> Result<usize> {
    let ratio = total / rho;
    if !ratio.is_integer() || ratio.is_negative() {
        return Err(Error::MeshMismatch(format!(
            "{what} {} is not a nonnegative multiple of mesh step {}",
            format_rational(total),
            format_rational(rho)
        )));
    }
    ratio
        .to_integer()
        .to_usize()
        .ok_or_else(|| Error::MeshMismatch(format!("{what} cell count exceeds usize")))
}

/// A simulated run: state on `[-Λ_N, t̃)` and control on `[0, t̃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mesh_step: Rational,
    pub state: PiecewiseConstant,
    pub control: PiecewiseConstant,
}

impl Trajectory {
    /// State cells on the terminal window `[T - Λ_N, T)`.
    pub fn terminal_window(&self, horizon_cells: usize, window_cells: usize) -> Vec<Vec<Rational>> {
        (0..window_cells)
            .map(|i| {
                self.state
                    .value_at_cell(horizon_cells as i64 - window_cells as i64 + i as i64)
            })
            .collect()
    }
}

/// Exact cellwise forward recursion. `x0` must cover `[-Λ_N, 0)` and `u`
/// must start at 0, both on mesh `rho`.
pub fn simulate(
    spec: &SystemSpec,
    rho: &Rational,
    x0: &PiecewiseConstant,
    u: &PiecewiseConstant,
) -> Result<Trajectory> {
    let shifts = delay_shifts(spec, rho)?;
    let n_max = *shifts.iter().max().expect("nonempty");
    let d = spec.state_dim();
    let m = spec.control_dim();
    if x0.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "initial state dimension {} != {d}",
            x0.dim()
        )));
    }
    if u.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "control dimension {} != {m}",
            u.dim()
        )));
    }
    if x0.mesh_step() != rho || u.mesh_step() != rho {
        return Err(Error::MeshMismatch("data mesh differs from requested mesh".into()));
    }
    if x0.start_cell() != -(n_max as i64) || x0.end_cell() != 0 {
        return Err(Error::MeshMismatch(format!(
            "initial state must cover exactly [-{n_max}, 0) cells, got [{}, {})",
            x0.start_cell(),
            x0.end_cell()
        )));
    }
    if u.start_cell() != 0 {
        return Err(Error::MeshMismatch("control must start at time 0".into()));
    }
    let steps = u.end_cell().max(0) as usize;
    let mut state: Vec<Vec<Rational>> = Vec::with_capacity(n_max + steps);
    for k in x0.start_cell()..0 {
        state.push(x0.value_at_cell(k));
    }
    for k in 0..steps {
        let mut cell = vec![Rational::zero(); d];
        for (a, n) in spec.a_matrices().iter().zip(&shifts) {
            let idx = n_max + k - n;
            let past = &state[idx];
            for i in 0..d {
                for j in 0..d {
                    let aij = a.get(i, j);
                    if !aij.is_zero() && !past[j].is_zero() {
                        cell[i] += aij * &past[j];
                    }
                }
            }
        }
        let uk = u.value_at_cell(k as i64);
        for i in 0..d {
            for j in 0..m {
                let bij = spec.b_matrix().get(i, j);
                if !bij.is_zero() && !uk[j].is_zero() {
                    cell[i] += bij * &uk[j];
                }
            }
        }
        state.push(cell);
    }
    Ok(Trajectory {
        mesh_step: rho.clone(),
        state: PiecewiseConstant::new(rho.clone(), -(n_max as i64), state, d)?,
        control: u.clone(),
    })
}

/// Finite linear map from stacked control cells on `[0, T)` to the stacked
/// terminal state window `[T - Λ_N, T)`, plus the free response from the
/// initial window. Stacking is cell-major.
#[derive(Debug, Clone)]
pub struct ReachabilityOperator {
    mesh_step: Rational,
    d: usize,
    m: usize,
    /// Cells in the terminal (and initial) window: `Λ_N / ρ`.
    window_cells: usize,
    /// Cells in the control horizon: `T / ρ`.
    horizon_cells: usize,
    matrix: RatMatrix,
    free_response: RatMatrix,
}

/// Assemble the operator from the impulse-response kernel
/// `G_0 = B`, `G_i = Σ_{n_j ≤ i} A_j G_{i - n_j}` (block Toeplitz), and the
/// free response by simulating unit impulses in each initial cell.
pub fn build_reachability(
    spec: &SystemSpec,
    rho: &Rational,
    horizon: &Rational,
) -> Result<ReachabilityOperator> {
    let shifts = delay_shifts(spec, rho)?;
    let n_max = *shifts.iter().max().expect("nonempty");
    let d = spec.state_dim();
    let m = spec.control_dim();
    let horizon_cells = cells_of(horizon, rho, "horizon")?;
    if horizon_cells < n_max {
        return Err(Error::InvalidInput(format!(
            "horizon must cover at least the largest delay ({n_max} cells), got {horizon_cells}"
        )));
    }

    // Impulse-response kernel.
    let mut kernel: Vec<RatMatrix> = Vec::with_capacity(horizon_cells);
    for i in 0..horizon_cells {
        if i == 0 {
            kernel.push(spec.b_matrix().clone());
            continue;
        }
        let mut g = RatMatrix::zeros(d, m);
        for (a, n) in spec.a_matrices().iter().zip(&shifts) {
            if *n <= i {
                let prev = &kernel[i - n];
                let contribution = a.matmul(prev)?;
                for r in 0..d {
                    for c in 0..m {
                        *g.get_mut(r, c) += contribution.get(r, c);
                    }
                }
            }
        }
        kernel.push(g);
    }

    let rows = n_max * d;
    let cols = horizon_cells * m;
    let mut matrix = RatMatrix::zeros(rows, cols);
    for (w, t) in (horizon_cells - n_max..horizon_cells).enumerate() {
        for c in 0..=t {
            let g = &kernel[t - c];
            for i in 0..d {
                for j in 0..m {
                    *matrix.get_mut(w * d + i, c * m + j) = g.get(i, j).clone();
                }
            }
        }
    }

    // Free response columns: unit impulse in each initial cell/component.
    let mut free_response = RatMatrix::zeros(rows, n_max * d);
    let zero_u = PiecewiseConstant::zeros(rho.clone(), 0, horizon_cells, m)?;
    for cell in 0..n_max {
        for comp in 0..d {
            let mut cells = vec![vec![Rational::zero(); d]; n_max];
            cells[cell][comp] = Rational::one();
            let x0 = PiecewiseConstant::new(rho.clone(), -(n_max as i64), cells, d)?;
            let traj = simulate(spec, rho, &x0, &zero_u)?;
            let window = traj.terminal_window(horizon_cells, n_max);
            for (w, values) in window.iter().enumerate() {
                for i in 0..d {
                    *free_response.get_mut(w * d + i, cell * d + comp) = values[i].clone();
                }
            }
        }
    }

    Ok(ReachabilityOperator {
        mesh_step: rho.clone(),
        d,
        m,
        window_cells: n_max,
        horizon_cells,
        matrix,
        free_response,
    })
}

fn stack(cells: &[Vec<Rational>]) -> Vec<Rational> {
    cells.iter().flatten().cloned().collect()
}

/// Certificate that a target is unreachable: a left null vector of the
/// operator that does not annihilate the defect.
#[derive(Debug, Clone, Serialize)]
pub struct UnreachableCertificate {
    pub left_null: Vec<String>,
    pub mismatch: String,
}

#[derive(Debug, Clone)]
pub enum SteerOutcome {
    /// Minimum-norm control on `[0, T)` reaching the target window exactly.
    Control(PiecewiseConstant),
    Unreachable(UnreachableCertificate),
}

impl ReachabilityOperator {
    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn free_response(&self) -> &RatMatrix {
        &self.free_response
    }

    pub fn window_cells(&self) -> usize {
        self.window_cells
    }

    pub fn horizon_cells(&self) -> usize {
        self.horizon_cells
    }

    /// Exact surjectivity test over the rationals.
    pub fn full_row_rank(&self) -> bool {
        self.matrix.rank() == self.matrix.nrows()
    }

    /// Solve `R·u = φ - free(x0)` with the minimum-norm exact solution
    /// `u = Rᵀ w`, `(R Rᵀ) w = y`, or produce an unreachability certificate.
    pub fn steer(
        &self,
        x0: &PiecewiseConstant,
        target: &PiecewiseConstant,
    ) -> Result<SteerOutcome> {
        let w = self.window_cells as i64;
        for (name, f) in [("initial state", x0), ("target window", target)] {
            if f.dim() != self.d {
                return Err(Error::DimensionMismatch(format!(
                    "{name} dimension {} != {}",
                    f.dim(),
                    self.d
                )));
            }
            if f.mesh_step() != &self.mesh_step || f.start_cell() != -w || f.end_cell() != 0 {
                return Err(Error::DimensionMismatch(format!(
                    "{name} must cover the window [-{}, 0) on the operator mesh",
                    self.window_cells
                )));
            }
        }
        let x0_stacked = stack(x0.cells());
        let target_stacked = stack(target.cells());
        let free = self.free_response.mul_vec(&x0_stacked)?;
        let defect: Vec<Rational> = target_stacked
            .iter()
            .zip(&free)
            .map(|(t, f)| t - f)
            .collect();

        for null in self.matrix.left_nullspace() {
            let mismatch = dot(&null, &defect);
            if !mismatch.is_zero() {
                return Ok(SteerOutcome::Unreachable(UnreachableCertificate {
                    left_null: null.iter().map(format_rational).collect(),
                    mismatch: format_rational(&mismatch),
                }));
            }
        }

        let transpose = self.matrix.transpose();
        let gram = self.matrix.matmul(&transpose)?;
        let w_vec = gram
            .solve(&defect)?
            .ok_or_else(|| Error::InvalidInput("normal equations inconsistent".into()))?;
        let u_stacked = transpose.mul_vec(&w_vec)?;
        let cells: Vec<Vec<Rational>> = u_stacked
            .chunks(self.m)
            .map(<[Rational]>::to_vec)
            .collect();
        Ok(SteerOutcome::Control(PiecewiseConstant::new(
            self.mesh_step.clone(),
            0,
            cells,
            self.m,
        )?))
    }
}

/// One frequency-domain sample of the residual `‖H(s)X_T(s) - B U_T(s)‖`
/// against its truncation-tail bound.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencySample {
    pub s: (f64, f64),
    pub residual: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyCheck {
    /// Growth abscissa `ln(max(1, Σ ||A_j||)) / ρ`; samples must stay above.
    pub alpha0: f64,
    pub samples: Vec<FrequencySample>,
    pub max_residual: f64,
}

/// Truncated transforms of a zero-initial-condition run driven by `u`:
/// exact cellwise integrals of `e^{-st}` against the simulated trajectory.
/// The residual must not exceed the closed-form geometric tail bound.
pub fn frequency_consistency_check(
    spec: &SystemSpec,
    rho: &Rational,
    u: &PiecewiseConstant,
    s_samples: &[Complex64],
) -> Result<FrequencyCheck> {
    let shifts = delay_shifts(spec, rho)?;
    let n_max = *shifts.iter().max().expect("nonempty");
    let d = spec.state_dim();
    let x0 = PiecewiseConstant::zeros(rho.clone(), -(n_max as i64), n_max, d)?;
    let traj = simulate(spec, rho, &x0, u)?;
    let steps = u.end_cell().max(0) as usize;
    let rho_f = to_f64(rho);

    let growth: f64 = spec
        .a_matrices()
        .iter()
        .map(|m| m.to_f64().norm())
        .sum::<f64>()
        .max(1.0);
    let alpha0 = growth.ln() / rho_f;

    // Window max at the truncation boundary controls the tail.
    let c0 = (0..n_max)
        .map(|i| {
            let cell = traj.state.value_at_cell(steps as i64 - 1 - i as i64);
            cell.iter().map(|v| to_f64(v).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0f64, f64::max);

    let b_f64 = spec.b_matrix().to_f64();
    let mut samples = Vec::with_capacity(s_samples.len());
    let mut max_residual = 0.0f64;
    for &s in s_samples {
        let sigma = s.re;
        if sigma <= alpha0 {
            return Err(Error::InvalidInput(format!(
                "sample Re s = {sigma} is not above the growth bound {alpha0}"
            )));
        }
        let cell_integral = |k: i64| -> Complex64 {
            if s.norm() == 0.0 {
                Complex64::new(rho_f, 0.0)
            } else {
                ((-s * (k as f64 * rho_f)).exp() - (-s * ((k + 1) as f64 * rho_f)).exp()) / s
            }
        };
        let mut x_t = vec![Complex64::new(0.0, 0.0); d];
        for k in 0..steps as i64 {
            let ci = cell_integral(k);
            let cell = traj.state.value_at_cell(k);
            for i in 0..d {
                x_t[i] += to_f64(&cell[i]) * ci;
            }
        }
        let mut u_t = vec![Complex64::new(0.0, 0.0); spec.control_dim()];
        for k in 0..steps as i64 {
            let ci = cell_integral(k);
            let cell = u.value_at_cell(k);
            for j in 0..spec.control_dim() {
                u_t[j] += to_f64(&cell[j]) * ci;
            }
        }
        let h = spec.h_eval(s);
        let mut residual_vec = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            for j in 0..d {
                residual_vec[i] += h[(i, j)] * x_t[j];
            }
            for j in 0..spec.control_dim() {
                residual_vec[i] -= b_f64[(i, j)] * u_t[j];
            }
        }
        let residual = residual_vec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();

        // Tail: ||x_k|| <= c0 g^{k-K+1} for k >= K, cell integrals bounded by
        // e^{-σkρ}(1 - e^{-σρ})/σ, summed geometrically.
        let decay = (-sigma * rho_f).exp();
        let tail = c0 * growth * (1.0 - decay) / sigma * (-sigma * steps as f64 * rho_f).exp()
            / (1.0 - growth * decay);
        let h_norm_bound = 1.0
            + spec
                .a_matrices()
                .iter()
                .zip(spec.delay_values())
                .map(|(m, lag)| m.to_f64().norm() * (-sigma * lag).exp())
                .sum::<f64>();
        let bound = h_norm_bound * tail;
        max_residual = max_residual.max(residual);
        samples.push(FrequencySample {
            s: (s.re, s.im),
            residual,
            bound,
        });
    }
    Ok(FrequencyCheck {
        alpha0,
        samples,
        max_residual,
    })
}
