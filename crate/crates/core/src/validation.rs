//! Cross-module checks run by the `validate` command and the acceptance tests.
//!
//! Each check compares a computation against an independent route to the same
//! number (bisection scan, closed form, time-domain integration, quadrature) or
//! against a qualitative feature of the known curves.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli;
use crate::config::{parse_config, Command, Format};
use crate::ensemble::{
    self, effective_coherence, effective_coherence_quadrature_sphere, Geometry, McConfig, PairIntegrand, PairModel,
};
use crate::greens::{free_space_pair_terms, free_space_scalar, pair_terms};
use crate::model::ModelParams;
use crate::ode;
use crate::solver::{self, solve, sweep_density, sweep_detuning, SolverConfig};
use crate::twoatom::{
    self, perturbative_steady_state, qrt_rhs, qrt_spectrum, residual_eq15, source_function_full, steady_state_ode,
    QrtInitial, SteadyStateConfig, TwoAtomParams,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!("[{}] criterion {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub seed: u64,
    pub mc_samples: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { seed: 20_240_601, mc_samples: 200_000 }
    }
}

fn report(id: u32, name: &'static str, passed: bool, detail: String) -> CriterionReport {
    CriterionReport { id, name, passed, detail }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn cfg() -> SolverConfig<f64> {
    SolverConfig::default()
}

/// Root of γ = Re √(1 + 2C/(2Δ + iγ)) found by scanning γ for sign changes and
/// bisecting. Shares no code with the solver. `None` when no root exists.
pub fn bisection_root(cooperativity: f64, detuning: f64) -> Option<f64> {
    if cooperativity == 0.0 {
        return Some(1.0);
    }
    let h = |g: f64| {
        let u = Complex64::new(2.0 * cooperativity, 0.0) / Complex64::new(2.0 * detuning, g);
        g - (Complex64::new(1.0, 0.0) + u).sqrt().re
    };
    let g_max = 2.0 + 2.0 * cooperativity;
    let mut grid: Vec<f64> = (0..=2000).map(|i| 10f64.powf(-10.0 + 10.0 * i as f64 / 2000.0)).collect();
    grid.extend((1..=4000).map(|i| 1.0 + (g_max - 1.0) * i as f64 / 4000.0));
    let mut bracket = None;
    for w in grid.windows(2) {
        if h(w[0]).signum() != h(w[1]).signum() {
            bracket = Some((w[0], w[1]));
        }
    }
    let (mut lo, mut hi) = bracket?;
    let sign_lo = h(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

pub fn free_space_limit() -> CriterionReport {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for &c in &[0.0, 1e-14, 1e-12, 1e-10] {
        for det in linspace(-10.0, 10.0, 81) {
            match solve(&ModelParams::weak(c, det).unwrap(), &cfg()) {
                Ok(s) => worst = worst.max((s.gamma11 - 1.0).abs()).max(s.delta11p.abs()),
                Err(_) => failures += 1,
            }
        }
    }
    let passed = failures == 0 && worst <= 1e-8;
    report(1, "free-space limit", passed, format!("max deviation {worst:.2e} (tol 1e-8), {failures} failures"))
}

pub fn self_consistency(seed: u64) -> CriterionReport {
    let mut worst_res: f64 = 0.0;
    let (mut converged, mut no_root) = (0, 0);
    let mut unexpected = Vec::new();
    for c in linspace(0.0, 3.0, 21) {
        for det in linspace(-5.0, 5.0, 21) {
            match solve(&ModelParams::weak(c, det).unwrap(), &cfg()) {
                Ok(s) => {
                    converged += 1;
                    let r = solver::residual(s.gamma11, s.delta11p, &s.params()).unwrap().norm();
                    worst_res = worst_res.max(r);
                }
                Err(solver::SolveError::DegenerateBranch { .. }) if bisection_root(c, det).is_none() => no_root += 1,
                Err(e) => unexpected.push(format!("C={c} det={det}: {e}")),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap: f64 = 0.0;
    let mut disagreements = 0;
    for _ in 0..20 {
        let c = rng.random_range(0.0..3.0);
        let det = rng.random_range(-5.0..5.0);
        let ours = solve(&ModelParams::weak(c, det).unwrap(), &cfg()).ok().map(|s| s.gamma11);
        match (ours, bisection_root(c, det)) {
            (Some(a), Some(b)) => worst_gap = worst_gap.max((a - b).abs()),
            (None, None) => {}
            _ => disagreements += 1,
        }
    }
    let passed = unexpected.is_empty() && worst_res < 1e-12 && worst_gap <= 1e-9 && disagreements == 0;
    let mut detail = format!(
        "{converged} converged, {no_root} without a root; max residual {worst_res:.2e} (tol 1e-12); \
         oracle max |dγ| {worst_gap:.2e} (tol 1e-9), {disagreements} disagreements"
    );
    if !unexpected.is_empty() {
        let _ = write!(detail, "; unexpected: {}", unexpected.join("; "));
    }
    report(2, "self-consistency and bisection oracle", passed, detail)
}

pub fn small_c_shift_law() -> CriterionReport {
    let grid = linspace(0.0, 0.3, 31);
    let pts = sweep_density(0.0, &grid, &cfg()).unwrap();
    let xy: Vec<(f64, f64)> = pts.iter().filter_map(|p| p.solution().map(|s| (s.cooperativity, s.delta11p))).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let passed = xy.len() == grid.len() && (slope - 0.5).abs() <= 0.02;
    // The cubic term of δ'(C) = C/2 − O(C³) bends the fit over a finite window;
    // report the initial slope from the first few points alongside.
    let initial = xy[1].1 / xy[1].0;
    report(
        3,
        "small-C shift law",
        passed,
        format!("least-squares slope on [0, 0.3] {slope:.5} (expected 0.5 ± 0.02); δ'/C at C = 0.01: {initial:.5}"),
    )
}

pub fn figure_two_features() -> CriterionReport {
    let detunings = linspace(-5.0, 5.0, 201);
    let pts = sweep_detuning(2.0, &detunings, &cfg()).unwrap();
    let sols: Vec<_> = pts.iter().filter_map(|p| p.solution()).collect();
    let argmax = sols.iter().max_by(|a, b| a.gamma11.total_cmp(&b.gamma11)).unwrap();
    let argmin = sols.iter().min_by(|a, b| a.gamma11.total_cmp(&b.gamma11)).unwrap();
    let min_shift = sols.iter().map(|s| s.delta11p).fold(f64::INFINITY, f64::min);
    let a = argmax.detuning > 0.0 && argmin.detuning < 0.0;
    let b = min_shift >= -1e-10;

    let blue = -0.4;
    let grid: Vec<f64> = (0..=300).map(|i| i as f64 * 0.01).collect();
    let dens = sweep_density(blue, &grid, &cfg()).unwrap();
    let curve: Vec<(f64, f64)> = dens.iter().filter_map(|p| p.solution().map(|s| (s.cooperativity, s.gamma11))).collect();
    let minima: Vec<f64> = curve
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0)
        .collect();
    let c_ok = minima.iter().any(|c| (c - 0.8).abs() <= 0.3);
    let passed = a && b && c_ok;
    report(
        4,
        "linewidth and shift sweep features",
        passed,
        format!(
            "(a) max γ at Δ={:.2}, min at Δ={:.2} [{}]; (b) min δ' {min_shift:.2e} [{}]; \
             (c) Δ={blue} γ minima at C={minima:?} (want 0.8 ± 0.3) [{}]",
            argmax.detuning,
            argmin.detuning,
            ok(a),
            ok(b),
            ok(c_ok)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fail"
    }
}

pub fn pair_term_reductions(seed: u64) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5);
    let mut worst_fs: f64 = 0.0;
    for _ in 0..100 {
        let r = 10f64.powf(rng.random_range(-2.0..1.5));
        let p = free_space_pair_terms(r).unwrap();
        let d = free_space_scalar(r, 1.0).unwrap();
        worst_fs = worst_fs.max((p.gamma12 + 2.0 * d.re).abs()).max((p.delta12 - d.im).abs());
    }
    let mut worst_limit: f64 = 0.0;
    let mut first_order: f64 = 0.0;
    let mut drawn = 0;
    while drawn < 20 {
        let c = rng.random_range(0.0..3.0);
        let det = rng.random_range(-5.0..5.0);
        if let Ok(sol) = solve(&ModelParams::weak(c, det).unwrap(), &cfg()) {
            let p = pair_terms(1e-6, sol.s).unwrap();
            worst_limit = worst_limit.max((p.gamma12 - sol.s.re).abs());
            // Leading finite-r correction: Re s · k₀r · Im s.
            first_order = first_order.max((sol.s.re * 2.0 * std::f64::consts::PI * 1e-6 * sol.s.im).abs());
            drawn += 1;
        }
    }
    let zeros: Vec<f64> = [0.5, 1.0, 1.5]
        .iter()
        .map(|&z| {
            let f = |r: f64| free_space_pair_terms(r).unwrap().gamma12;
            let (mut lo, mut hi) = (z - 0.2, z + 0.2);
            let s_lo = f(lo).signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    let zero_err = zeros.iter().zip([0.5, 1.0, 1.5]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let passed = worst_fs <= 1e-12 && worst_limit <= 1e-6 && zero_err <= 1e-9;
    report(
        5,
        "pair-term reductions",
        passed,
        format!(
            "free-space max dev {worst_fs:.2e} (tol 1e-12); coincident-limit max dev {worst_limit:.2e} (tol 1e-6, \
             leading k₀r term {first_order:.2e}); \
             zeros at {zeros:.10?} (max err {zero_err:.1e}, tol 1e-9)"
        ),
    )
}

/// Random two-atom parameters whose pair terms come from a converged medium.
fn random_pair_params(rng: &mut ChaCha8Rng) -> TwoAtomParams<f64> {
    loop {
        let c = rng.random_range(0.2..2.0);
        let det = rng.random_range(-2.0..2.0);
        let Ok(sol) = solve(&ModelParams::weak(c, det).unwrap(), &cfg()) else { continue };
        let r = rng.random_range(0.2..2.0);
        let p = pair_terms(r, sol.s).unwrap();
        return TwoAtomParams {
            detuning: det,
            rabi: 0.0,
            gamma11: sol.gamma11,
            gamma12: p.gamma12,
            delta11: sol.delta11p,
            delta12: p.delta12,
        };
    }
}

pub fn dynamics_oracle(seed: u64) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let rabis = [1e-2, 1e-3, 1e-4];
    let mut slopes = Vec::new();
    let mut worst_residual: f64 = 0.0;
    let mut errors = Vec::new();
    for _ in 0..10 {
        let base = random_pair_params(&mut rng);
        let mut rel = Vec::new();
        for &w in &rabis {
            let p = base.with_rabi(w);
            let pert = perturbative_steady_state(&p).unwrap();
            let (a, b) = residual_eq15(&pert, &p);
            worst_residual = worst_residual.max(a.norm()).max(b.norm());
            let ss = SteadyStateConfig { rtol: 1e-12, atol: w * 1e-15, stop_norm: w * 1e-13, ..SteadyStateConfig::default() };
            match steady_state_ode(&p, &ss) {
                Ok(st) => rel.push((st.coherences().rho_eg - pert.rho_eg).norm() / pert.rho_eg.norm()),
                Err(e) => errors.push(e.to_string()),
            }
        }
        if rel.len() == rabis.len() {
            let xs: Vec<f64> = rabis.iter().map(|w| w.log10()).collect();
            let ys: Vec<f64> = rel.iter().map(|e| e.log10()).collect();
            let mx = xs.iter().sum::<f64>() / 3.0;
            let my = ys.iter().sum::<f64>() / 3.0;
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            slopes.push(sxy / sxx);
        }
    }
    let slope_ok = slopes.len() == 10 && slopes.iter().all(|s| (s - 2.0).abs() <= 0.3);
    let passed = slope_ok && errors.is_empty() && worst_residual < 1e-13;
    let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    report(
        6,
        "master equation vs perturbative steady state",
        passed,
        format!(
            "relative-error slopes in [{lo:.3}, {hi:.3}] over {} sets (want 2.0 ± 0.3); \
             max first-order residual {worst_residual:.2e} (tol 1e-13); {} integration errors",
            slopes.len(),
            errors.len()
        ),
    )
}

/// ∫₀^∞ y(τ)e^{−iωτ}dτ from an RK4 trajectory: the transient by Simpson's rule,
/// the constant tail y(∞) analytically as y(∞)/(iω).
pub fn qrt_time_domain(omega: f64, p: &TwoAtomParams<f64>, init: &QrtInitial<f64>) -> [Complex64; 3] {
    let t_end = 200.0 / p.gamma11;
    let steps = 40_000;
    let dt = t_end / steps as f64;
    let traj = ode::rk4_grid(
        |_, y, dy| dy.copy_from_slice(&qrt_rhs(y, p, init)),
        0.0,
        &init.y0,
        dt,
        steps,
    );
    let tail = traj[steps].clone();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, y) in traj.iter().enumerate() {
            let w = if j == 0 || j == steps { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
            let phase = Complex64::new(0.0, -omega * j as f64 * dt).exp();
            acc += (y[k] - tail[k]) * phase * w;
        }
        *slot = acc * (dt / 3.0);
        if tail[k] != Complex64::new(0.0, 0.0) {
            *slot += tail[k] / Complex64::new(0.0, omega);
        }
    }
    out
}

pub fn supplement_reduction(seed: u64) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7);
    let mut worst_src: f64 = 0.0;
    for _ in 0..20 {
        let c = rng.random_range(0.0..3.0);
        let p = TwoAtomParams {
            detuning: rng.random_range(-5.0..5.0),
            rabi: 0.0,
            gamma11: rng.random_range(0.2..3.0),
            gamma12: 0.0,
            delta11: rng.random_range(0.0..1.5),
            delta12: 0.0,
        };
        let full = source_function_full(p.delta11, &p, c, 0.0, Complex64::new(0.0, 0.0)).unwrap();
        let weak = solver::weak_drive_source(c, p.gamma11, p.detuning).unwrap();
        worst_src = worst_src.max((full - weak).norm());
    }
    let mut worst_qrt: f64 = 0.0;
    for &(rabi, det, g, d11, omega) in
        &[(0.3, 0.2, 1.0, 0.1, 0.7), (1.0, -0.5, 1.3, 0.4, -1.1), (0.05, 1.5, 0.8, 0.0, 2.0)]
    {
        let p = TwoAtomParams::single(det, rabi, g, d11);
        let ss = twoatom::maxwell_bloch_steady_state(&p).unwrap();
        for init in [QrtInitial::forward(ss[0].re, ss[1]), QrtInitial::commutator(ss[0].re, ss[1])] {
            let a = qrt_spectrum(omega, &p, &init).unwrap();
            let b = qrt_time_domain(omega, &p, &init);
            let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            worst_qrt = worst_qrt.max(err / scale);
        }
    }
    let passed = worst_src <= 1e-13 && worst_qrt <= 1e-6;
    report(
        7,
        "source-function reduction and regression spectrum",
        passed,
        format!("weak-drive max dev {worst_src:.2e} (tol 1e-13); spectrum vs time domain rel {worst_qrt:.2e} (tol 1e-6)"),
    )
}

fn ensemble_point(
    g: &Geometry,
    c: f64,
    mc: &McConfig,
) -> Result<(ensemble::EnsembleResult, solver::SelfConsistentSolution<f64>), String> {
    let params = ModelParams::new(c, 0.0, 1e-3).map_err(|e| e.to_string())?;
    let sol = solve(&params, &cfg()).map_err(|e| e.to_string())?;
    let r = effective_coherence(g, &sol, &params, PairModel::Renormalized, mc).map_err(|e| e.to_string())?;
    Ok((r, sol))
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn ensemble_limits(opts: &ValidationOptions) -> CriterionReport {
    let mc = McConfig::new(opts.mc_samples, opts.seed);
    let mut detail = String::new();
    let mut passed = true;

    let mut worst_sphere: f64 = 0.0;
    for c in [0.5, 1.0] {
        match ensemble_point(&Geometry::sphere(50.0), c, &mc) {
            Ok((r, s)) => {
                worst_sphere = worst_sphere.max(rel_dev(r.gamma_eff, s.gamma11)).max(rel_dev(r.delta_eff, s.delta11p))
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "sphere C={c}: {e}; ");
            }
        }
    }
    let a = worst_sphere <= 0.05;
    let _ = write!(detail, "(a) R=50 max rel dev {worst_sphere:.3} (tol 0.05) [{}]; ", ok(a));

    let radii: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1).collect();
    let mut b = true;
    for c in [2.0, 3.0] {
        let params = ModelParams::new(c, 0.0, 1e-3).unwrap();
        let sol = solve(&params, &cfg()).unwrap();
        let mc_b = McConfig::new(opts.mc_samples.min(100_000), opts.seed);
        let sweep = ensemble::sweep_geometry(&ensemble::sphere_family(&radii), &sol, &params, PairModel::Renormalized, &mc_b);
        let curve: Vec<(f64, f64)> = sweep
            .iter()
            .filter_map(|r| r.as_ref().ok().map(|r| (r.geometry.size(), r.delta_eff)))
            .collect();
        let minima: Vec<f64> = curve
            .windows(3)
            .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
            .map(|w| w[1].0)
            .collect();
        let hit = minima.iter().any(|r| (0.3 - 1e-9..=0.8 + 1e-9).contains(r));
        b &= hit && curve.len() == radii.len();
        let _ = write!(detail, "(b) C={c} δ_eff minima at R={minima:.2?} [{}]; ", ok(hit));
    }

    let mut worst_cyl: f64 = 0.0;
    for c in [0.5, 1.0] {
        match ensemble_point(&Geometry::cylinder(ensemble::DEFAULT_CYLINDER_RADIUS, 50.0), c, &mc) {
            Ok((r, s)) => {
                worst_cyl = worst_cyl.max(rel_dev(r.gamma_eff, s.gamma11)).max(rel_dev(r.delta_eff, s.delta11p))
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "cylinder C={c}: {e}; ");
            }
        }
    }
    let cyl = worst_cyl <= 0.10;
    let _ = write!(detail, "(c) cylinder L=50 max rel dev {worst_cyl:.3} (tol 0.10) [{}]", ok(cyl));
    report(8, "ensemble limits", passed && a && b && cyl, detail)
}

pub fn mc_vs_quadrature(opts: &ValidationOptions) -> CriterionReport {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for r in [0.3, 0.7, 1.5] {
        for c in [0.5, 1.0, 2.0] {
            let params = ModelParams::new(c, 0.0, 1e-3).unwrap();
            let sol = solve(&params, &cfg()).unwrap();
            let f = PairIntegrand::new(&sol, &params, PairModel::Renormalized).unwrap();
            let (mc, se) =
                ensemble::effective_coherence_mc(&Geometry::sphere(r), &f, &McConfig::new(opts.mc_samples, opts.seed))
                    .unwrap();
            let q = effective_coherence_quadrature_sphere(r, &f, 16, 16).unwrap();
            let z = (mc - q).norm() / se;
            worst = worst.max(z);
            if z > 3.0 {
                failures.push(format!("R={r} C={c}: {z:.2}σ"));
            }
        }
    }
    report(
        9,
        "Monte Carlo vs sphere quadrature",
        failures.is_empty(),
        format!("max |MC − quadrature| = {worst:.2} standard errors (tol 3) {}", failures.join(", ")),
    )
}

pub fn determinism(opts: &ValidationOptions) -> CriterionReport {
    let text = format!(
        "[model]\ncooperativity = 2.0\nrabi = 0.001\n[grid.size]\nvalues = [0.3, 0.6, 1.2]\n\
         [monte_carlo]\nn_samples = 20000\nseed = {}\n",
        opts.seed
    );
    let config = parse_config(&text).expect("static config");
    let mut outputs = Vec::new();
    let dir = std::env::temp_dir();
    let mut io_error = None;
    for (k, threads) in [1usize, 4, 4, 2].iter().enumerate() {
        let path = dir.join(format!("collective-lamb-determinism-{}-{k}.csv", std::process::id()));
        let run_opts = cli::RunOptions {
            out: Some(path.clone()),
            format: Some(Format::Csv),
            threads: Some(*threads),
            quiet: true,
            ..cli::RunOptions::default()
        };
        match cli::run(Command::EnsembleSweep, config.clone(), &run_opts) {
            Ok(_) => match std::fs::read(&path) {
                Ok(bytes) => outputs.push(bytes),
                Err(e) => io_error = Some(e.to_string()),
            },
            Err(e) => io_error = Some(e.to_string()),
        }
        let _ = std::fs::remove_file(&path);
    }
    let identical = outputs.len() == 4 && outputs.windows(2).all(|w| w[0] == w[1]);
    let detail = match io_error {
        Some(e) => format!("run failed: {e}"),
        None => format!("4 runs (1, 4, 4, 2 threads), {} bytes each, identical: {identical}", outputs[0].len()),
    };
    report(10, "determinism of ensemble sweeps", identical, detail)
}

/// All criteria in order.
pub fn run_all(opts: &ValidationOptions) -> Vec<CriterionReport> {
    vec![
        free_space_limit(),
        self_consistency(opts.seed),
        small_c_shift_law(),
        figure_two_features(),
        pair_term_reductions(opts.seed),
        dynamics_oracle(opts.seed),
        supplement_reduction(opts.seed),
        ensemble_limits(opts),
        mc_vs_quadrature(opts),
        determinism(opts),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_known_roots() {
        assert_eq!(bisection_root(0.0, 1.0), Some(1.0));
        let g = bisection_root(1.0, 0.0).unwrap();
        let s = solve(&ModelParams::weak(1.0, 0.0).unwrap(), &cfg()).unwrap();
        assert!((g - s.gamma11).abs() < 1e-12);
        assert_eq!(bisection_root(2.0, -1.0), None);
    }

    #[test]
    fn time_domain_transform_of_decay() {
        // Undriven, y(τ) = e^{Mτ}y₀; transform is (iω − M)⁻¹ y₀.
        let p = TwoAtomParams::single(0.3, 0.0, 1.0, 0.1);
        let init = QrtInitial::forward(0.4, Complex64::new(0.0, 0.0));
        let a = qrt_spectrum(0.5, &p, &init).unwrap();
        let b = qrt_time_domain(0.5, &p, &init);
        for k in 0..3 {
            assert!((a[k] - b[k]).norm() < 1e-8);
        }
    }

    #[test]
    fn pair_term_module_agrees_with_scalar() {
        let d = crate::greens::dressed_scalar(0.4, Complex64::new(1.0, 0.0)).unwrap();
        let p = free_space_pair_terms(0.4).unwrap();
        assert!((p.delta12 - d.im).abs() < 1e-15);
    }
}
