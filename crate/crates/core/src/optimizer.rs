//! Maximizing moves by Lagrange-Newton multistart.
//!
//! For a line `L`, the active player's accumulated amplitudes `m` and the
//! previously played moves `M` (columns, `k` of them), a maximizing move `x`
//! maximizes `W(x) = sum_{i in L} (m_i + x_i)^2` subject to `|x| = 1` and
//! `M^T x = 0`. With the Lagrange function
//!
//! ```text
//! Lag(x, alpha, beta) = W(x) + alpha (1 - x.x) + beta . (M^T x)
//! ```
//!
//! the stationary points solve `grad Lag = 0`, a system of `10 + k` equations
//! whose Jacobian is the bordered Hessian
//!
//! ```text
//! H = [ A       -2x   M ]
//!     [ -2x^T    0    0 ]
//!     [ M^T      0    0 ]
//! ```
//!
//! with `A = diag(-2 alpha + 2 [i in L])`. Newton's method is run from
//! several random feasible starts and the best stationary point is accepted
//! only if `H` passes the second-order test.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Amplitudes, GameState, Line, Move, Player, SITES};

/// Newton stops once the residual max-norm drops below this.
pub const NEWTON_TOL: f64 = 1e-10;
/// A converged solution must still satisfy the system to this after the final
/// re-orthonormalization.
pub const ACCEPT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 200;
pub const MAX_HALVINGS: usize = 30;
/// Eigenvalues within this of zero count as zero in the second-order test.
pub const EIGEN_TOL: f64 = 1e-8;
pub const DEFAULT_RESTARTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("invalid constraint set: {0}")]
    InvalidConstraints(String),
    #[error("Newton iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("no maximizing move found ({converged} stationary points, none passed the second-order test)")]
    NotFound { converged: usize },
}

/// Previous moves, the active player's accumulated amplitudes and a target line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConstraintSet", into = "RawConstraintSet")]
pub struct ConstraintSet {
    previous: Vec<Amplitudes>,
    own: Amplitudes,
    line: Line,
}

#[derive(Serialize, Deserialize)]
struct RawConstraintSet {
    previous: Vec<Amplitudes>,
    own: Amplitudes,
    line: Line,
}

impl TryFrom<RawConstraintSet> for ConstraintSet {
    type Error = OptimizerError;
    fn try_from(raw: RawConstraintSet) -> Result<Self, Self::Error> {
        ConstraintSet::new(raw.previous, raw.own, raw.line)
    }
}

impl From<ConstraintSet> for RawConstraintSet {
    fn from(cs: ConstraintSet) -> Self {
        RawConstraintSet { previous: cs.previous, own: cs.own, line: cs.line }
    }
}

impl ConstraintSet {
    pub fn new(previous: Vec<Amplitudes>, own: Amplitudes, line: Line) -> Result<Self, OptimizerError> {
        if previous.len() > 8 {
            return Err(OptimizerError::InvalidConstraints(format!(
                "{} previous moves leave no feasible direction",
                previous.len()
            )));
        }
        if !own.is_finite() || previous.iter().any(|p| !p.is_finite()) {
            return Err(OptimizerError::InvalidConstraints("non-finite amplitudes".into()));
        }
        for (i, a) in previous.iter().enumerate() {
            for (j, b) in previous.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (a.dot(b) - expected).abs() > 1e-8 {
                    return Err(OptimizerError::InvalidConstraints(format!(
                        "previous moves {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(ConstraintSet { previous, own, line })
    }

    /// Constraints for `player` moving next in `state`.
    pub fn from_state(state: &GameState, player: Player, line: Line) -> ConstraintSet {
        ConstraintSet {
            previous: state.history().map(|(_, m)| *m.amplitudes()).collect(),
            own: *state.sum(player),
            line,
        }
    }

    pub fn with_line(&self, line: Line) -> ConstraintSet {
        ConstraintSet { line, ..self.clone() }
    }

    /// Number of previous moves.
    pub fn k(&self) -> usize {
        self.previous.len()
    }

    pub fn previous(&self) -> &[Amplitudes] {
        &self.previous
    }

    pub fn own(&self) -> &Amplitudes {
        &self.own
    }

    pub fn line(&self) -> Line {
        self.line
    }

    /// `W` evaluated at `x`.
    pub fn weight(&self, x: &Amplitudes) -> f64 {
        self.line.projected_weight(&(self.own + *x))
    }

    /// `v - M M^T v`, applied twice.
    pub fn project_feasible(&self, v: &Amplitudes) -> Amplitudes {
        let once = self.previous.iter().fold(*v, |acc, p| acc.sub_scaled(p.dot(&acc), p));
        self.previous.iter().fold(once, |acc, p| acc.sub_scaled(p.dot(&acc), p))
    }

    fn line_mask(&self) -> [f64; SITES] {
        let mut mask = [0.0; SITES];
        for i in self.line.site_indices() {
            mask[i] = 1.0;
        }
        mask
    }
}

/// A stationary point of the Lagrange function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarySolution {
    pub x: Move,
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub weight: f64,
    pub is_local_max: bool,
    pub residual: f64,
}

/// Gradient of the Lagrange function with respect to `(x, alpha, beta)`.
pub fn stationarity_residual(cs: &ConstraintSet, x: &Amplitudes, alpha: f64, beta: &[f64]) -> DVector<f64> {
    assert_eq!(beta.len(), cs.k(), "one multiplier per previous move");
    let k = cs.k();
    let mask = cs.line_mask();
    let mut r = DVector::zeros(10 + k);
    for i in 0..SITES {
        let mut g = -2.0 * alpha * x[i] + 2.0 * mask[i] * (cs.own[i] + x[i]);
        for (l, prev) in cs.previous.iter().enumerate() {
            g += beta[l] * prev[i];
        }
        r[i] = g;
    }
    r[SITES] = 1.0 - x.norm_squared();
    for (l, prev) in cs.previous.iter().enumerate() {
        r[SITES + 1 + l] = prev.dot(x);
    }
    r
}

fn max_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Signature of a symmetric matrix at a given zero tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BorderedHessian {
    matrix: DMatrix<f64>,
}

impl BorderedHessian {
    /// Hessian of the Lagrange function at `(x, alpha)`; it does not depend on beta.
    pub fn at(cs: &ConstraintSet, x: &Amplitudes, alpha: f64) -> BorderedHessian {
        let k = cs.k();
        let n = 10 + k;
        let mask = cs.line_mask();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..SITES {
            h[(i, i)] = -2.0 * alpha + 2.0 * mask[i];
            h[(i, SITES)] = -2.0 * x[i];
            h[(SITES, i)] = -2.0 * x[i];
            for (l, prev) in cs.previous.iter().enumerate() {
                h[(i, SITES + 1 + l)] = prev[i];
                h[(SITES + 1 + l, i)] = prev[i];
            }
        }
        BorderedHessian { matrix: h }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn inertia(&self, tol: f64) -> Inertia {
        let ev = self.eigenvalues();
        let negative = ev.iter().filter(|&&e| e < -tol).count();
        let positive = ev.iter().filter(|&&e| e > tol).count();
        Inertia { negative, zero: ev.len() - negative - positive, positive }
    }
}

pub fn bordered_hessian(cs: &ConstraintSet, sol: &StationarySolution) -> BorderedHessian {
    BorderedHessian::at(cs, sol.x.amplitudes(), sol.alpha)
}

/// Second-order test for a maximum with `k` moves already played.
///
/// The `k + 1` constraints always contribute `k + 1` positive and `k + 1`
/// negative eigenvalues; the remaining `8 - k` carry the signature of the
/// Hessian restricted to the tangent space. A maximum therefore has at most
/// `k + 1` positive eigenvalues. Directions along a flat ridge of maxima (any
/// unit vector inside the line's subspace on an empty board, say) show up as
/// zero eigenvalues and are allowed.
pub fn second_derivative_test(h: &BorderedHessian, k: usize) -> bool {
    h.inertia(EIGEN_TOL).positive <= k + 1
}

/// Strict form: no zero eigenvalues either, so at least `9 - k` (in fact
/// exactly 9) eigenvalues below `-EIGEN_TOL`.
pub fn is_strict_local_max(h: &BorderedHessian, k: usize) -> bool {
    let inertia = h.inertia(EIGEN_TOL);
    inertia.zero == 0 && inertia.positive <= k + 1 && inertia.negative >= SITES - k
}

/// Number of linearized ascent steps run from each random start before Newton.
pub const ASCENT_STEPS: usize = 50;

/// Monotone ascent on the feasible sphere. `W` is convex, so moving to the
/// feasible unit vector that maximizes its linearization never lowers it.
pub fn ascent_warm_start(cs: &ConstraintSet, guess: &Amplitudes, steps: usize) -> Option<Move> {
    let mut x = Move::normalize(cs.project_feasible(guess)).ok()?;
    let mask = cs.line_mask();
    for _ in 0..steps {
        let mut g = [0.0; SITES];
        for i in 0..SITES {
            g[i] = mask[i] * (cs.own[i] + x.amplitudes()[i]);
        }
        match Move::normalize(cs.project_feasible(&Amplitudes(g))) {
            Ok(next) if next.amplitudes().sub_scaled(1.0, x.amplitudes()).norm() < 1e-14 => return Some(next),
            Ok(next) => x = next,
            Err(_) => break,
        }
    }
    Some(x)
}

fn unpack(z: &DVector<f64>) -> (Amplitudes, f64, Vec<f64>) {
    let mut x = [0.0; SITES];
    x.copy_from_slice(&z.as_slice()[..SITES]);
    (Amplitudes(x), z[SITES], z.as_slice()[SITES + 1..].to_vec())
}

fn residual_of(cs: &ConstraintSet, z: &DVector<f64>) -> DVector<f64> {
    let (x, alpha, beta) = unpack(z);
    stationarity_residual(cs, &x, alpha, &beta)
}

fn newton_step(jac: &DMatrix<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(step) = jac.clone().lu().solve(&(-f)) {
        if step.iter().all(|v| v.is_finite()) {
            return Some(step);
        }
    }
    // Levenberg-regularized step when the Jacobian is singular
    let jt = jac.transpose();
    let mu = 1e-8 * (1.0 + jac.norm());
    let normal = &jt * jac + DMatrix::identity(jac.nrows(), jac.ncols()) * mu;
    normal
        .cholesky()
        .map(|c| c.solve(&(-(&jt * f))))
        .filter(|s| s.iter().all(|v| v.is_finite()))
}

/// Multipliers minimizing the stationarity residual at a feasible unit `x`:
/// with `g = 2 P (m + x)`, `alpha = x.g / 2` and `beta = -M^T g`.
fn least_squares_multipliers(cs: &ConstraintSet, x: &Amplitudes) -> (f64, Vec<f64>) {
    let mask = cs.line_mask();
    let mut g = [0.0; SITES];
    for i in 0..SITES {
        g[i] = 2.0 * mask[i] * (cs.own[i] + x[i]);
    }
    let g = Amplitudes(g);
    (0.5 * x.dot(&g), cs.previous.iter().map(|p| -p.dot(&g)).collect())
}

/// Damped Newton iteration on the stationarity system from a feasible
/// projection of `initial_guess`, with the multipliers started at their
/// least-squares values for that point.
pub fn solve_stationary(cs: &ConstraintSet, initial_guess: &Amplitudes) -> Result<StationarySolution, OptimizerError> {
    let mut sol = newton(cs, initial_guess)?;
    sol.is_local_max = second_derivative_test(&bordered_hessian(cs, &sol), cs.k());
    Ok(sol)
}

/// Newton solve without the second-order classification.
fn newton(cs: &ConstraintSet, initial_guess: &Amplitudes) -> Result<StationarySolution, OptimizerError> {
    let k = cs.k();
    let x0 = Move::normalize(cs.project_feasible(initial_guess))
        .map_err(|_| OptimizerError::NoConvergence { iterations: 0, residual: f64::INFINITY })?;
    let mut z = DVector::zeros(10 + k);
    z.as_mut_slice()[..SITES].copy_from_slice(&x0.amplitudes().0);
    let (alpha0, beta0) = least_squares_multipliers(cs, x0.amplitudes());
    z[SITES] = alpha0;
    z.as_mut_slice()[SITES + 1..].copy_from_slice(&beta0);

    let mut f = residual_of(cs, &z);
    let mut iterations = 0;
    while max_norm(&f) > NEWTON_TOL {
        if iterations == MAX_ITERATIONS {
            return Err(OptimizerError::NoConvergence { iterations, residual: max_norm(&f) });
        }
        iterations += 1;
        let (x, alpha, _) = unpack(&z);
        let jac = BorderedHessian::at(cs, &x, alpha).matrix;
        let step = newton_step(&jac, &f).ok_or(OptimizerError::SingularJacobian)?;
        let f_norm = f.norm();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &z + &step * t;
            let f_trial = residual_of(cs, &trial);
            if f_trial.norm() < f_norm {
                accepted = Some((trial, f_trial));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((z_new, f_new)) => {
                z = z_new;
                f = f_new;
            }
            None => return Err(OptimizerError::NoConvergence { iterations, residual: max_norm(&f) }),
        }
    }

    let (x, alpha, beta) = unpack(&z);
    let x = Move::normalize(cs.project_feasible(&x))
        .map_err(|_| OptimizerError::NoConvergence { iterations, residual: max_norm(&f) })?;
    let residual = max_norm(&stationarity_residual(cs, x.amplitudes(), alpha, &beta));
    if residual > ACCEPT_TOL {
        return Err(OptimizerError::NoConvergence { iterations, residual });
    }
    Ok(StationarySolution { weight: cs.weight(x.amplitudes()), is_local_max: false, x, alpha, beta, residual })
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Amplitudes {
    let mut g = [0.0; SITES];
    for v in g.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    Amplitudes(g)
}

/// Multistart search for the maximizing move along `cs.line()`.
///
/// Runs the Newton solve of [`solve_stationary`] from `restarts` random
/// starts, each first moved uphill by [`ascent_warm_start`], and accepts the
/// converged point with the largest weight if it passes
/// [`second_derivative_test`]. When only one feasible direction is
/// left, both of its signs are tried instead.
pub fn maximizing_move<R: Rng + ?Sized>(
    cs: &ConstraintSet,
    rng: &mut R,
    restarts: usize,
) -> Result<StationarySolution, OptimizerError> {
    let guesses: Vec<Amplitudes> = if cs.k() == SITES - 1 {
        let q = loop {
            if let Ok(q) = Move::normalize(cs.project_feasible(&gaussian(rng))) {
                break q;
            }
        };
        vec![*q.amplitudes(), *q.negated().amplitudes()]
    } else {
        (0..restarts).map(|_| gaussian(rng)).collect()
    };

    let mut best: Option<StationarySolution> = None;
    let mut converged = 0;
    for guess in &guesses {
        let start = if cs.k() == SITES - 1 {
            Some(*guess)
        } else {
            ascent_warm_start(cs, guess, ASCENT_STEPS).map(|x| *x.amplitudes())
        };
        let Some(start) = start else { continue };
        match newton(cs, &start) {
            Ok(sol) => {
                converged += 1;
                if best.as_ref().is_none_or(|b| sol.weight > b.weight) {
                    best = Some(sol);
                }
            }
            Err(e) => log::trace!("restart failed on line {}: {e}", cs.line()),
        }
    }
    match best {
        Some(mut sol) => {
            sol.is_local_max = second_derivative_test(&bordered_hessian(cs, &sol), cs.k());
            if sol.is_local_max {
                Ok(sol)
            } else {
                Err(OptimizerError::NotFound { converged })
            }
        }
        None => Err(OptimizerError::NotFound { converged }),
    }
}
