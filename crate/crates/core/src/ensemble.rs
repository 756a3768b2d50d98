//! Geometry-averaged probe coherence and the effective linewidth and shift it implies.
//!
//! The first probe atom is uniform over the sample volume, the second uniform along
//! the beam path (a segment on the ẑ axis through the centre). The averaged quantity
//! is the weak-drive pair coherence
//!
//! ```text
//! Ω / (δ'₁₁ + δ₁₂(r) + Δ − i(γ₁₁ + γ₁₂(r))/2),   r = |r₁ − r₂|
//! ```
//!
//! Everything here is f64: Monte Carlo sums need a fixed reduction order, and the
//! sampling volumes are large enough that f32 accumulation would dominate the error.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::greens::{self, PairTerms};
use crate::model::ModelParams;
use crate::solver::SelfConsistentSolution;

/// Pair separations below this are clamped (wavelength units).
pub const MIN_SEPARATION: f64 = 1e-9;
/// Draws per RNG stream. Stream `k` covers samples `k·CHUNK .. (k+1)·CHUNK`.
pub const CHUNK: usize = 4096;
/// Cylinder radius used when none is given.
pub const DEFAULT_CYLINDER_RADIUS: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("n_samples must be >= 1")]
    NoSamples,
    #[error("solution is not converged")]
    Unconverged,
    #[error("rabi frequency must be > 0 to invert the coherence")]
    ZeroRabi,
    #[error("effective coherence is zero; cannot invert")]
    ZeroCoherence,
    #[error("quadrature order must be >= 2 (got {0})")]
    QuadratureOrder(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Geometry {
    Sphere {
        radius: f64,
        #[serde(default)]
        beam_waist: f64,
    },
    Cylinder {
        radius: f64,
        length: f64,
        #[serde(default)]
        beam_waist: f64,
    },
}

impl Geometry {
    pub fn sphere(radius: f64) -> Self {
        Geometry::Sphere { radius, beam_waist: 0.0 }
    }

    pub fn cylinder(radius: f64, length: f64) -> Self {
        Geometry::Cylinder { radius, length, beam_waist: 0.0 }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        let bad = |m: &str| Err(EnsembleError::InvalidGeometry(m.into()));
        let ok = |x: f64| x.is_finite() && x > 0.0;
        let (transverse, waist) = match *self {
            Geometry::Sphere { radius, beam_waist } => {
                if !ok(radius) {
                    return bad("sphere radius must be > 0");
                }
                (radius, beam_waist)
            }
            Geometry::Cylinder { radius, length, beam_waist } => {
                if !ok(radius) {
                    return bad("cylinder radius must be > 0");
                }
                if !ok(length) {
                    return bad("cylinder length must be > 0");
                }
                (radius, beam_waist)
            }
        };
        if !(waist.is_finite() && waist >= 0.0 && waist < transverse) {
            return bad("beam waist must be >= 0 and smaller than the transverse size");
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Geometry::Sphere { radius, .. } => 4.0 / 3.0 * PI * radius.powi(3),
            Geometry::Cylinder { radius, length, .. } => PI * radius * radius * length,
        }
    }

    /// Sphere radius or cylinder length: the swept size.
    pub fn size(&self) -> f64 {
        match *self {
            Geometry::Sphere { radius, .. } => radius,
            Geometry::Cylinder { length, .. } => length,
        }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        match *self {
            Geometry::Sphere { radius, .. } => norm(p) <= radius,
            Geometry::Cylinder { radius, length, .. } => {
                p[0].hypot(p[1]) <= radius && p[2].abs() <= length / 2.0
            }
        }
    }
}

/// Which collective shift enters the pair denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairModel {
    /// Free-space part subtracted, so coincident pairs see the single-atom shift.
    #[default]
    Renormalized,
    /// Raw −cos(q′r)e^{q″r}/(2k₀r).
    Bare,
    /// γ₁₂ = δ₁₂ = 0: the bare single-atom Lorentzian.
    Off,
}

fn norm(p: [f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn symmetric<R: Rng>(rng: &mut R, half: f64) -> f64 {
    (2.0 * rng.random::<f64>() - 1.0) * half
}

fn disk<R: Rng>(rng: &mut R, radius: f64) -> (f64, f64) {
    loop {
        let (x, y) = (symmetric(rng, radius), symmetric(rng, radius));
        if x * x + y * y <= radius * radius {
            return (x, y);
        }
    }
}

/// Draws (r₁, r₂): r₁ uniform in the body by rejection from the bounding box,
/// r₂ uniform on the beam segment (within the waist if it is nonzero).
pub fn sample_pair<R: Rng>(g: &Geometry, rng: &mut R) -> ([f64; 3], [f64; 3]) {
    match *g {
        Geometry::Sphere { radius, beam_waist } => {
            let r1 = loop {
                let p = [symmetric(rng, radius), symmetric(rng, radius), symmetric(rng, radius)];
                if norm(p) <= radius {
                    break p;
                }
            };
            let r2 = loop {
                let (x, y) = if beam_waist > 0.0 { disk(rng, beam_waist) } else { (0.0, 0.0) };
                let p = [x, y, symmetric(rng, radius)];
                if norm(p) <= radius {
                    break p;
                }
            };
            (r1, r2)
        }
        Geometry::Cylinder { radius, length, beam_waist } => {
            let (x, y) = disk(rng, radius);
            let r1 = [x, y, symmetric(rng, length / 2.0)];
            let (x, y) = if beam_waist > 0.0 { disk(rng, beam_waist) } else { (0.0, 0.0) };
            (r1, [x, y, symmetric(rng, length / 2.0)])
        }
    }
}

/// Everything the pair integrand needs, resolved once per ensemble evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PairIntegrand {
    pub s: Complex64,
    pub delta11p: f64,
    pub gamma11: f64,
    pub detuning: f64,
    pub rabi: f64,
    pub model: PairModel,
}

impl PairIntegrand {
    pub fn new(
        sol: &SelfConsistentSolution<f64>,
        params: &ModelParams<f64>,
        model: PairModel,
    ) -> Result<Self, EnsembleError> {
        if !sol.converged {
            return Err(EnsembleError::Unconverged);
        }
        Ok(Self {
            s: sol.s,
            delta11p: sol.delta11p,
            gamma11: sol.gamma11,
            detuning: params.detuning,
            rabi: params.rabi,
            model,
        })
    }

    /// Pair coherence at separation `r` (clamped below at [`MIN_SEPARATION`]).
    pub fn eval(&self, r: f64) -> Complex64 {
        let r = r.max(MIN_SEPARATION);
        let (g12, d12) = match self.model {
            PairModel::Off => (0.0, 0.0),
            _ => {
                let PairTerms { gamma12, delta12, delta12_renormalized, .. } =
                    greens::pair_terms(r, self.s).expect("separation is clamped positive");
                let d = if self.model == PairModel::Bare { delta12 } else { delta12_renormalized };
                (gamma12, d)
            }
        };
        let denom = Complex64::new(self.delta11p + d12 + self.detuning, -(self.gamma11 + g12) / 2.0);
        self.rabi / denom
    }

    /// Value for an isolated atom (no partner), i.e. the homogeneous limit.
    pub fn single_atom(&self) -> Complex64 {
        self.rabi / Complex64::new(self.delta11p + self.detuning, -self.gamma11 / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self { n_samples, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub geometry: Geometry,
    pub rho_eff: Complex64,
    pub gamma_eff: f64,
    pub delta_eff: f64,
    pub n_samples: usize,
    pub mc_stderr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: Complex64,
    sum_sq: f64,
}

impl Moments {
    fn merge(self, other: Self) -> Self {
        Self { sum: self.sum + other.sum, sum_sq: self.sum_sq + other.sum_sq }
    }
}

fn pairwise(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments::default(),
        1 => parts[0],
        n => {
            let (a, b) = parts.split_at(n / 2);
            pairwise(a).merge(pairwise(b))
        }
    }
}

fn chunk_moments(g: &Geometry, f: &PairIntegrand, seed: u64, chunk: usize, count: usize) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let mut m = Moments::default();
    for _ in 0..count {
        let (r1, r2) = sample_pair(g, &mut rng);
        let x = f.eval(norm([r1[0] - r2[0], r1[1] - r2[1], r1[2] - r2[2]]));
        m.sum += x;
        m.sum_sq += x.norm_sqr();
    }
    m
}

/// Monte Carlo estimate of the averaged coherence and its standard error.
///
/// Samples are split into fixed chunks of [`CHUNK`] draws, chunk `k` using ChaCha8
/// seeded with `seed` on stream `k`. Chunk sums are combined by a fixed pairwise
/// tree, so the result is bit-identical for any thread count.
pub fn effective_coherence_mc(
    g: &Geometry,
    f: &PairIntegrand,
    mc: &McConfig,
) -> Result<(Complex64, f64), EnsembleError> {
    g.validate()?;
    if mc.n_samples == 0 {
        return Err(EnsembleError::NoSamples);
    }
    let chunks = mc.n_samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = CHUNK.min(mc.n_samples - k * CHUNK);
            chunk_moments(g, f, mc.seed, k, count)
        })
        .collect();
    let total = pairwise(&parts);
    let n = mc.n_samples as f64;
    let mean = total.sum / n;
    let stderr = if mc.n_samples > 1 {
        let var = ((total.sum_sq - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        f64::INFINITY
    };
    Ok((mean, stderr))
}

/// (γ_eff, δ_eff) from δ_eff − iγ_eff/2 = Ω/ρ_eff.
pub fn invert_effective(rho_eff: Complex64, rabi: f64) -> Result<(f64, f64), EnsembleError> {
    if rho_eff == Complex64::new(0.0, 0.0) {
        return Err(EnsembleError::ZeroCoherence);
    }
    let q = rabi / rho_eff;
    Ok((-2.0 * q.im, q.re))
}

/// ρ = (δ + iγ/2)/(δ² + γ²/4)·Ω, the inverse of [`invert_effective`].
pub fn forward_effective(gamma_eff: f64, delta_eff: f64, rabi: f64) -> Complex64 {
    Complex64::new(delta_eff, gamma_eff / 2.0) * (rabi / (delta_eff * delta_eff + gamma_eff * gamma_eff / 4.0))
}

fn integrand_for(
    sol: &SelfConsistentSolution<f64>,
    params: &ModelParams<f64>,
    model: PairModel,
) -> Result<PairIntegrand, EnsembleError> {
    if !(params.rabi > 0.0) {
        return Err(EnsembleError::ZeroRabi);
    }
    PairIntegrand::new(sol, params, model)
}

/// Averaged coherence over the sample plus the inverted effective linewidth and shift.
pub fn effective_coherence(
    g: &Geometry,
    sol: &SelfConsistentSolution<f64>,
    params: &ModelParams<f64>,
    model: PairModel,
    mc: &McConfig,
) -> Result<EnsembleResult, EnsembleError> {
    let f = integrand_for(sol, params, model)?;
    let (rho_eff, mc_stderr) = effective_coherence_mc(g, &f, mc)?;
    let (gamma_eff, delta_eff) = invert_effective(rho_eff, params.rabi)?;
    Ok(EnsembleResult {
        geometry: *g,
        rho_eff,
        gamma_eff,
        delta_eff,
        n_samples: mc.n_samples,
        mc_stderr,
        seed: mc.seed,
    })
}

/// Area of the sphere of radius `r` about a point at distance `d` from the centre
/// of a ball of radius `big_r` that lies inside the ball.
pub fn shell_area_inside_ball(r: f64, d: f64, big_r: f64) -> f64 {
    use std::f64::consts::PI;
    if r <= big_r - d {
        4.0 * PI * r * r
    } else if r >= big_r + d {
        0.0
    } else {
        2.0 * PI * r * r * (1.0 + (big_r * big_r - d * d - r * r) / (2.0 * d * r))
    }
}

fn panels(a: f64, b: f64, width: f64) -> impl Iterator<Item = (f64, f64)> {
    let n = (((b - a) / width).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    (0..n).map(move |i| (a + i as f64 * h, if i + 1 == n { b } else { a + (i + 1) as f64 * h }))
}

fn gl(rule: &GaussLegendre, a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| f(mid + half * x) * w)
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
        * half
}

/// Panel width for the composite rules: a quarter wavelength keeps the
/// oscillating pair terms well resolved.
const PANEL: f64 = 0.25;

/// Deterministic sphere average for a zero-waist beam.
///
/// For a beam point at height z the inner volume integral reduces, by symmetry,
/// to ∫ A(r, |z|) F(r) dr with A the shell area inside the ball; the remaining
/// two one-dimensional integrals use composite Gauss–Legendre rules with
/// `n_radial` nodes per radial panel and `n_axial` per axial panel.
pub fn effective_coherence_quadrature_sphere(
    radius: f64,
    f: &PairIntegrand,
    n_radial: usize,
    n_axial: usize,
) -> Result<Complex64, EnsembleError> {
    Geometry::sphere(radius).validate()?;
    let radial = GaussLegendre::new(n_radial).map_err(|_| EnsembleError::QuadratureOrder(n_radial))?;
    let axial = GaussLegendre::new(n_axial).map_err(|_| EnsembleError::QuadratureOrder(n_axial))?;
    let inner = |d: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let kink = (radius - d).max(0.0);
        for (lo, hi) in [(0.0, kink), (kink, radius + d)] {
            if hi <= lo {
                continue;
            }
            for (a, b) in panels(lo, hi, PANEL) {
                acc += gl(&radial, a, b, |r| f.eval(r) * shell_area_inside_ball(r, d, radius));
            }
        }
        acc
    };
    let axial_panels: Vec<(f64, f64)> = panels(0.0, radius, PANEL).collect();
    let parts: Vec<Complex64> = axial_panels.par_iter().map(|&(a, b)| gl(&axial, a, b, inner)).collect();
    let total = parts.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    // Symmetric in z: ∫_{−R}^{R} dz / 2R = ∫_0^R dz / R.
    Ok(total / (radius * Geometry::sphere(radius).volume()))
}

/// Evaluates every geometry with the same seed (common random numbers across the sweep).
pub fn sweep_geometry(
    family: &[Geometry],
    sol: &SelfConsistentSolution<f64>,
    params: &ModelParams<f64>,
    model: PairModel,
    mc: &McConfig,
) -> Vec<Result<EnsembleResult, EnsembleError>> {
    family.iter().map(|g| effective_coherence(g, sol, params, model, mc)).collect()
}

/// Sphere family over the given radii.
pub fn sphere_family(radii: &[f64]) -> Vec<Geometry> {
    radii.iter().map(|&r| Geometry::sphere(r)).collect()
}

/// Cylinder family of fixed radius over the given lengths.
pub fn cylinder_family(radius: f64, lengths: &[f64]) -> Vec<Geometry> {
    lengths.iter().map(|&l| Geometry::cylinder(radius, l)).collect()
}
