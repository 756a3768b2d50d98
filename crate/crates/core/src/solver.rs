//! Self-consistent single-atom linewidth and collective Lamb shift.
//!
//! The relation solved here is
//!
//! ```text
//! 1 + 2C / (2Δ + iγ) = (γ − 2iδ')²
//! ```
//!
//! with γ = γ₁₁/γ₀ and δ' = δ'₁₁/γ₀. Writing s = √(1 + u) for the
//! dimensionless effective wave number, γ = Re s and δ' = −Im s / 2. Only
//! Re s feeds back into the left-hand side, so the unknown is the scalar γ
//! and the map is `γ ← Re √(1 + 2C/(2Δ + iγ))`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelParams};
use crate::scalar::{ComplexRate, Real};

/// Largest cooperativity increment used when continuing from free space.
const CONTINUATION_STEP: f64 = 0.25;
/// Stalled fixed-point iterations before switching to Newton.
const STALL_LIMIT: usize = 200;
/// Finite-difference step for the Newton derivative.
const NEWTON_FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    InvalidParams(#[from] ModelError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("weak-drive source is singular (linewidth and detuning both zero)")]
    SingularSource,
    #[error(
        "no physical root: iteration collapsed onto Re(s) = 0 at C = {cooperativity}, detuning = {detuning} (last linewidth {last_gamma:e})"
    )]
    DegenerateBranch { cooperativity: f64, detuning: f64, last_gamma: f64 },
    #[error(
        "no convergence after {iterations} iterations at C = {cooperativity}, detuning = {detuning}: last linewidth {last_gamma}, residual {residual:e}"
    )]
    NoConvergence {
        cooperativity: f64,
        detuning: f64,
        last_gamma: f64,
        residual: f64,
        iterations: usize,
    },
}

/// Which internal iteration the solver may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Damped fixed point, falling back to Newton on stall.
    #[default]
    Auto,
    FixedPoint,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    pub tol: T,
    pub max_iter: usize,
    pub damping: T,
    #[serde(default)]
    pub strategy: Strategy,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-12), max_iter: 10_000, damping: T::one(), strategy: Strategy::Auto }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tol > T::zero()) {
            return Err(SolveError::InvalidConfig("tol must be > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(SolveError::InvalidConfig("max_iter must be >= 1".into()));
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(SolveError::InvalidConfig("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn with_strategy(self, strategy: Strategy) -> Self {
        Self { strategy, ..self }
    }
}

/// Which iteration produced the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FixedPoint,
    Newton,
}

/// Evidence that the returned root sits on the branch continued from free space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCertificate<T> {
    /// Slope of the fixed-point map at the root; |slope| < 1 means the root is locally attracting.
    pub map_slope: T,
    /// Cooperativity steps taken from C = 0 (0 when warm-started by a sweep).
    pub continuation_steps: usize,
    /// False when the continuation path broke and the root was found by a cold restart.
    pub continuous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfConsistentSolution<T> {
    pub cooperativity: T,
    pub detuning: T,
    pub gamma11: T,
    pub delta11p: T,
    /// Effective wave number in units of 2π/λ.
    pub s: ComplexRate<T>,
    pub residual_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
    pub branch: BranchCertificate<T>,
}

impl<T: Real> SelfConsistentSolution<T> {
    /// The free-space solution (γ, δ') = (1, 0).
    pub fn free_space(detuning: T) -> Self {
        Self {
            cooperativity: T::zero(),
            detuning,
            gamma11: T::one(),
            delta11p: T::zero(),
            s: Complex::new(T::one(), T::zero()),
            residual_norm: T::zero(),
            iterations: 0,
            converged: true,
            method: Method::FixedPoint,
            branch: BranchCertificate { map_slope: T::zero(), continuation_steps: 0, continuous: true },
        }
    }

    pub fn params(&self) -> ModelParams<T> {
        ModelParams { cooperativity: self.cooperativity, detuning: self.detuning, rabi: T::zero() }
    }
}

/// Weak-drive source term u = 2C / (2Δ + iγ).
pub fn weak_drive_source<T: Real>(
    cooperativity: T,
    gamma11: T,
    detuning: T,
) -> Result<ComplexRate<T>, SolveError> {
    if cooperativity == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let denom = Complex::new(T::lit(2.0) * detuning, gamma11);
    if denom.re == T::zero() && denom.im == T::zero() {
        return Err(SolveError::SingularSource);
    }
    Ok(Complex::new(T::lit(2.0) * cooperativity, T::zero()) / denom)
}

/// Principal square root of 1 + u with Re ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber<T> {
    pub s: ComplexRate<T>,
    /// Set when Re(s) = 0 exactly; the branch with Im(s) ≤ 0 was picked.
    pub degenerate: bool,
}

pub fn effective_wavenumber<T: Real>(u: ComplexRate<T>) -> Wavenumber<T> {
    let mut s = (Complex::new(T::one(), T::zero()) + u).sqrt();
    if s.re < T::zero() {
        s = -s;
    }
    let degenerate = s.re == T::zero();
    if degenerate && s.im > T::zero() {
        s.im = -s.im;
    }
    Wavenumber { s, degenerate }
}

/// 1 + 2C/(2Δ + iγ) − (γ − 2iδ')².
pub fn residual<T: Real>(
    gamma11: T,
    delta11p: T,
    params: &ModelParams<T>,
) -> Result<ComplexRate<T>, SolveError> {
    let u = weak_drive_source(params.cooperativity, gamma11, params.detuning)?;
    let rhs = Complex::new(gamma11, -T::lit(2.0) * delta11p);
    Ok(Complex::new(T::one(), T::zero()) + u - rhs * rhs)
}

struct Eval<T> {
    s: ComplexRate<T>,
    residual: T,
    degenerate: bool,
}

fn evaluate<T: Real>(params: &ModelParams<T>, g: T) -> Result<Eval<T>, SolveError> {
    let u = weak_drive_source(params.cooperativity, g, params.detuning)?;
    let w = effective_wavenumber(u);
    let gamma = w.s.re;
    let res = if gamma > T::zero() || params.detuning != T::zero() {
        residual(gamma, -w.s.im / T::lit(2.0), params)?.norm()
    } else {
        T::infinity()
    };
    Ok(Eval { s: w.s, residual: res, degenerate: w.degenerate })
}

fn map<T: Real>(params: &ModelParams<T>, g: T) -> Result<T, SolveError> {
    let u = weak_drive_source(params.cooperativity, g, params.detuning)?;
    Ok(effective_wavenumber(u).s.re)
}

// Below this the iterate is treated as having collapsed onto Re(s) = 0. In a gap the
// map contracts towards γ = 0 and the residual shrinks with γ, so the floor has to
// sit well above the tolerance or the collapse would pass as convergence.
fn collapse_floor<T: Real>(tol: T) -> T {
    (T::epsilon() * T::lit(100.0)).max(tol * T::lit(1e3))
}

enum Attempt<T> {
    Done { g: T, eval: Eval<T>, iterations: usize },
    Stalled { g: T, residual: T, iterations: usize },
    Collapsed { g: T },
}

fn fixed_point<T: Real>(params: &ModelParams<T>, cfg: &SolverConfig<T>, g0: T, budget: usize) -> Result<Attempt<T>, SolveError> {
    let mut g = g0;
    let mut damping = cfg.damping;
    let mut prev_step = T::zero();
    let mut best = T::infinity();
    let mut best_g = g;
    let mut stalled = 0usize;
    let floor = collapse_floor(cfg.tol);
    let min_damping = T::lit(1.0 / 1024.0);
    for it in 1..=budget {
        let eval = evaluate(params, g)?;
        if eval.degenerate || eval.s.re <= floor {
            return Ok(Attempt::Collapsed { g });
        }
        if eval.residual < cfg.tol && (eval.s.re - g).abs() < cfg.tol {
            return Ok(Attempt::Done { g, eval, iterations: it });
        }
        if eval.residual < best * T::lit(0.999) {
            best = eval.residual;
            best_g = g;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_LIMIT {
                return Ok(Attempt::Stalled { g: best_g, residual: best, iterations: it });
            }
        }
        let step = eval.s.re - g;
        if step * prev_step < T::zero() {
            damping = (damping / T::lit(2.0)).max(min_damping);
        }
        prev_step = step;
        let next = g + damping * step;
        g = if next > T::zero() { next } else { g / T::lit(2.0) };
    }
    Ok(Attempt::Stalled { g: best_g, residual: best, iterations: budget })
}

fn newton<T: Real>(params: &ModelParams<T>, cfg: &SolverConfig<T>, g0: T, budget: usize) -> Result<Attempt<T>, SolveError> {
    let h = |g: T| -> Result<T, SolveError> { Ok(g - map(params, g)?) };
    let eps = T::lit(NEWTON_FD_STEP);
    let floor = collapse_floor(cfg.tol);
    let mut g = g0;
    let mut best = T::infinity();
    let mut best_g = g;
    for it in 1..=budget {
        let eval = evaluate(params, g)?;
        if eval.degenerate || eval.s.re <= floor {
            return Ok(Attempt::Collapsed { g });
        }
        if eval.residual < cfg.tol && (eval.s.re - g).abs() < cfg.tol {
            return Ok(Attempt::Done { g, eval, iterations: it });
        }
        if eval.residual < best {
            best = eval.residual;
            best_g = g;
        }
        let hg = g - eval.s.re;
        let deriv = if g > eps * T::lit(2.0) {
            (h(g + eps)? - h(g - eps)?) / (eps + eps)
        } else {
            (h(g + eps)? - hg) / eps
        };
        if deriv == T::zero() || !deriv.is_finite() {
            break;
        }
        let next = g - hg / deriv;
        g = if next > T::zero() && next.is_finite() { next } else { g / T::lit(2.0) };
        if g <= floor {
            return Ok(Attempt::Collapsed { g });
        }
    }
    Ok(Attempt::Stalled { g: best_g, residual: best, iterations: budget })
}

fn map_slope<T: Real>(params: &ModelParams<T>, g: T) -> T {
    let eps = T::lit(NEWTON_FD_STEP) * g.max(T::one());
    let lo = (g - eps).max(g / T::lit(2.0));
    match (map(params, g + eps), map(params, lo)) {
        (Ok(a), Ok(b)) => (a - b) / (g + eps - lo),
        _ => T::nan(),
    }
}

/// Solves from the warm start `g0` without any continuation in C.
pub fn solve_from<T: Real>(
    params: &ModelParams<T>,
    config: &SolverConfig<T>,
    g0: T,
) -> Result<SelfConsistentSolution<T>, SolveError> {
    params.validate()?;
    config.validate()?;
    if params.cooperativity == T::zero() {
        return Ok(SelfConsistentSolution::free_space(params.detuning));
    }
    let g0 = if g0 > T::zero() && g0.is_finite() { g0 } else { T::one() };
    let fail = |g: T, residual: T, iterations: usize| SolveError::NoConvergence {
        cooperativity: params.cooperativity.as_f64(),
        detuning: params.detuning.as_f64(),
        last_gamma: g.as_f64(),
        residual: residual.as_f64(),
        iterations,
    };
    let collapsed = |g: T| SolveError::DegenerateBranch {
        cooperativity: params.cooperativity.as_f64(),
        detuning: params.detuning.as_f64(),
        last_gamma: g.as_f64(),
    };

    let (attempt, method, used) = match config.strategy {
        Strategy::FixedPoint => (fixed_point_unstalled(params, config, g0)?, Method::FixedPoint, 0),
        Strategy::Newton => (newton(params, config, g0, config.max_iter)?, Method::Newton, 0),
        Strategy::Auto => match fixed_point(params, config, g0, config.max_iter)? {
            Attempt::Stalled { g, iterations, .. } => {
                let left = config.max_iter.saturating_sub(iterations).max(1);
                (newton(params, config, g, left)?, Method::Newton, iterations)
            }
            other => (other, Method::FixedPoint, 0),
        },
    };

    match attempt {
        Attempt::Done { g, eval, iterations } => {
            let s = eval.s;
            Ok(SelfConsistentSolution {
                cooperativity: params.cooperativity,
                detuning: params.detuning,
                gamma11: s.re,
                delta11p: -s.im / T::lit(2.0),
                s,
                residual_norm: eval.residual,
                iterations: iterations + used,
                converged: true,
                method,
                branch: BranchCertificate {
                    map_slope: map_slope(params, g),
                    continuation_steps: 0,
                    continuous: true,
                },
            })
        }
        Attempt::Collapsed { g } => Err(collapsed(g)),
        Attempt::Stalled { g, residual, iterations } => Err(fail(g, residual, iterations + used)),
    }
}

/// Plain damped fixed point that runs the whole budget without handing over to Newton.
fn fixed_point_unstalled<T: Real>(params: &ModelParams<T>, cfg: &SolverConfig<T>, g0: T) -> Result<Attempt<T>, SolveError> {
    let mut g = g0;
    let mut total = 0usize;
    let mut best = T::infinity();
    let mut best_g = g0;
    while total < cfg.max_iter {
        match fixed_point(params, cfg, g, cfg.max_iter - total)? {
            Attempt::Stalled { g: gs, residual, iterations } => {
                total += iterations;
                if residual < best {
                    best = residual;
                    best_g = gs;
                } else {
                    break;
                }
                g = gs;
            }
            Attempt::Done { g, eval, iterations } => {
                return Ok(Attempt::Done { g, eval, iterations: total + iterations })
            }
            collapsed => return Ok(collapsed),
        }
    }
    Ok(Attempt::Stalled { g: best_g, residual: best, iterations: total })
}

/// Solves the self-consistent relation on the branch continued from free space.
///
/// The cooperativity is ramped from 0 to the target in steps of at most 0.25,
/// each step warm-started from the previous root. If the ramp breaks (a stretch
/// of C without a physical root), the target is attempted directly from the
/// free-space start and the certificate records the discontinuity.
pub fn solve<T: Real>(
    params: &ModelParams<T>,
    config: &SolverConfig<T>,
) -> Result<SelfConsistentSolution<T>, SolveError> {
    params.validate()?;
    config.validate()?;
    let target = params.cooperativity;
    if target == T::zero() {
        return Ok(SelfConsistentSolution::free_space(params.detuning));
    }
    let steps = (target / T::lit(CONTINUATION_STEP)).ceil().to_usize().unwrap_or(1).max(1);
    let mut g = T::one();
    let mut broken = None;
    for k in 1..=steps {
        let c = if k == steps { target } else { target * T::from_usize(k).unwrap() / T::from_usize(steps).unwrap() };
        match solve_from(&params.with_cooperativity(c), config, g) {
            Ok(sol) if k == steps => {
                let mut sol = sol;
                sol.branch.continuation_steps = steps;
                return Ok(sol);
            }
            Ok(sol) => g = sol.gamma11,
            Err(e) => {
                if k == steps {
                    broken = Some(e);
                }
                break;
            }
        }
    }
    // The ramp broke before the target (or at it): try the target cold.
    let mut sol = match solve_from(params, config, T::one()) {
        Ok(sol) => sol,
        Err(e) => return Err(broken.unwrap_or(e)),
    };
    sol.branch.continuation_steps = steps;
    sol.branch.continuous = false;
    Ok(sol)
}

/// One grid point of a sweep: its coordinates and either a root or the reason there is none.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T> {
    pub cooperativity: T,
    pub detuning: T,
    pub outcome: Result<SelfConsistentSolution<T>, SolveError>,
}

impl<T: Real> SweepPoint<T> {
    pub fn solution(&self) -> Option<&SelfConsistentSolution<T>> {
        self.outcome.as_ref().ok()
    }
}

fn check_grid<T: Real>(grid: &[T]) -> Result<(), SolveError> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(SolveError::InvalidConfig("grid values must be finite".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(SolveError::InvalidConfig("grid must be sorted ascending".into()));
    }
    Ok(())
}

fn continue_along<T: Real>(
    points: impl Iterator<Item = ModelParams<T>>,
    config: &SolverConfig<T>,
) -> Vec<SweepPoint<T>> {
    let mut warm: Option<T> = None;
    points
        .map(|p| {
            let outcome = match warm {
                Some(g) => solve_from(&p, config, g).or_else(|_| solve(&p, config)),
                None => solve(&p, config),
            };
            if let Ok(sol) = &outcome {
                warm = Some(sol.gamma11);
            }
            SweepPoint { cooperativity: p.cooperativity, detuning: p.detuning, outcome }
        })
        .collect()
}

/// Solves along a detuning grid at fixed cooperativity, warm-starting each point from its neighbour.
pub fn sweep_detuning<T: Real>(
    cooperativity: T,
    detuning_grid: &[T],
    config: &SolverConfig<T>,
) -> Result<Vec<SweepPoint<T>>, SolveError> {
    check_grid(detuning_grid)?;
    config.validate()?;
    ModelParams::weak(cooperativity, T::zero())?;
    Ok(continue_along(
        detuning_grid.iter().map(|&d| ModelParams { cooperativity, detuning: d, rabi: T::zero() }),
        config,
    ))
}

/// Solves along a cooperativity grid at fixed detuning, continuing from C = 0.
pub fn sweep_density<T: Real>(
    detuning: T,
    cooperativity_grid: &[T],
    config: &SolverConfig<T>,
) -> Result<Vec<SweepPoint<T>>, SolveError> {
    check_grid(cooperativity_grid)?;
    config.validate()?;
    if let Some(&c) = cooperativity_grid.iter().find(|c| **c < T::zero()) {
        return Err(ModelError::NegativeCooperativity(c.as_f64()).into());
    }
    Ok(continue_along(
        cooperativity_grid.iter().map(|&c| ModelParams { cooperativity: c, detuning, rabi: T::zero() }),
        config,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn source_examples() {
        assert_eq!(weak_drive_source(0.0, 0.3, 0.0).unwrap(), Complex::new(0.0, 0.0));
        let u = weak_drive_source(1.0, 1.0, 0.0).unwrap();
        assert!((u - Complex::new(0.0, -2.0)).norm() < 1e-15);
        let u = weak_drive_source(1.0, 1.0, 0.5).unwrap();
        assert!((u - Complex::new(1.0, -1.0)).norm() < 1e-15);
        assert_eq!(weak_drive_source(1.0, 0.0, 0.0), Err(SolveError::SingularSource));
    }

    #[test]
    fn wavenumber_examples() {
        let w = effective_wavenumber(Complex::new(0.0, 0.0));
        assert_eq!(w.s, Complex::new(1.0, 0.0));
        assert!(!w.degenerate);
        let w = effective_wavenumber(Complex::new(0.0, -2.0));
        assert!((w.s - Complex::new(1.272_019_649_514_069, -0.786_151_377_757_423_3)).norm() < 1e-12);
        assert!((w.s * w.s - Complex::new(1.0, -2.0)).norm() < 1e-14);
        let w = effective_wavenumber(Complex::new(3.0, 0.0));
        assert_eq!(w.s, Complex::new(2.0, 0.0));
    }

    #[test]
    fn wavenumber_flags_zero_real_part() {
        let w = effective_wavenumber(Complex::new(-5.0f64, 0.0));
        assert!(w.degenerate);
        assert_eq!(w.s.re, 0.0);
        assert!(w.s.im <= 0.0);
        assert!((w.s.im + 2.0).abs() < 1e-15);
    }

    #[test]
    fn free_space_limit() {
        for d in [-3.0, 0.0, 7.5] {
            let sol = solve(&ModelParams::weak(0.0, d).unwrap(), &cfg()).unwrap();
            assert_eq!((sol.gamma11, sol.delta11p, sol.residual_norm), (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn small_cooperativity_expansion() {
        let sol = solve(&ModelParams::weak(0.01, 0.0).unwrap(), &cfg()).unwrap();
        assert!((sol.gamma11 - 1.0).abs() < 2e-4);
        assert!((sol.delta11p - 0.005).abs() < 1e-5);
    }

    #[test]
    fn residual_examples() {
        let p0 = ModelParams::weak(0.0, 0.4).unwrap();
        assert_eq!(residual(1.0, 0.0, &p0).unwrap(), Complex::new(0.0, 0.0));
        let p1 = ModelParams::weak(1.0, 0.0).unwrap();
        let r = residual(1.0, 0.0, &p1).unwrap();
        assert!((r - Complex::new(0.0, -2.0)).norm() < 1e-15);
        let sol = solve(&p1, &cfg()).unwrap();
        assert!(residual(sol.gamma11, sol.delta11p, &p1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn solution_identities_hold_exactly() {
        let sol = solve(&ModelParams::weak(1.7, -0.3).unwrap(), &cfg()).unwrap();
        assert_eq!(sol.gamma11, sol.s.re);
        assert_eq!(sol.delta11p, -sol.s.im / 2.0);
        assert!(sol.gamma11 > 0.0);
        assert!(sol.converged && sol.residual_norm < 1e-12);
        assert!(sol.branch.map_slope.abs() < 1.0);
    }

    #[test]
    fn gap_without_physical_root_is_reported() {
        // Blue of resonance with 1 + C/Δ < 0 the map collapses onto Re(s) = 0.
        let err = solve(&ModelParams::weak(2.0, -1.0).unwrap(), &cfg()).unwrap_err();
        assert!(matches!(err, SolveError::DegenerateBranch { .. }), "{err}");
    }

    #[test]
    fn invalid_config_rejected() {
        let p = ModelParams::weak(1.0, 0.0).unwrap();
        let mut c = cfg();
        c.damping = 0.0;
        assert!(matches!(solve(&p, &c), Err(SolveError::InvalidConfig(_))));
        c.damping = 1.0;
        c.tol = 0.0;
        assert!(matches!(solve(&p, &c), Err(SolveError::InvalidConfig(_))));
        c.tol = 1e-12;
        c.max_iter = 0;
        assert!(matches!(solve(&p, &c), Err(SolveError::InvalidConfig(_))));
    }

    #[test]
    fn exhausted_budget_carries_last_iterate() {
        let p = ModelParams::weak(3.0, 0.0).unwrap();
        let c = SolverConfig { max_iter: 2, ..cfg() }.with_strategy(Strategy::FixedPoint);
        match solve_from(&p, &c, 1.0) {
            Err(SolveError::NoConvergence { last_gamma, residual, .. }) => {
                assert!(last_gamma > 0.0 && residual > 1e-12);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn single_precision_solves_too() {
        let c32 = SolverConfig::<f32> { tol: 1e-5, ..Default::default() };
        let s32 = solve(&ModelParams::weak(1.0f32, 0.0).unwrap(), &c32).unwrap();
        let s64 = solve(&ModelParams::weak(1.0f64, 0.0).unwrap(), &cfg()).unwrap();
        assert!((s32.gamma11 as f64 - s64.gamma11).abs() < 1e-5);
        assert!((s32.delta11p as f64 - s64.delta11p).abs() < 1e-5);
    }

    #[test]
    fn sweeps_reject_unsorted_grids() {
        assert!(sweep_detuning(1.0, &[0.0, -1.0], &cfg()).is_err());
        assert!(sweep_density(0.0, &[0.0, f64::NAN], &cfg()).is_err());
        assert!(sweep_density(0.0, &[-1.0, 0.0], &cfg()).is_err());
    }

    #[test]
    fn zero_density_sweep_is_free_space() {
        let pts = sweep_detuning(0.0, &[-5.0, 0.0, 5.0], &cfg()).unwrap();
        for p in &pts {
            let s = p.solution().unwrap();
            assert_eq!((s.gamma11, s.delta11p), (1.0, 0.0));
        }
        let pts = sweep_density(0.3, &[0.0], &cfg()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].solution().unwrap().gamma11, 1.0);
    }
}
