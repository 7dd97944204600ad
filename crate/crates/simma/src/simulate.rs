//! Path synthesis on dyadic grids and the Monte Carlo estimators that
//! confront the analytic verdicts with simulated total variation.
//!
//! Per component the sampler superposes:
//!
//! * a deterministic drift through the kernel's linear functional,
//! * a Gaussian part as a grid-increment convolution with variance
//!   `σ²·w·Δs` per noise cell,
//! * finite-activity jumps as an exact compound-Poisson superposition over
//!   the truncation window,
//! * stable jumps through the inverse-tail shot-noise series (magnitudes
//!   from arrival times of a unit-rate Poisson process, signs by the c1:c2
//!   ratio), truncated after `series_terms` draws with optional Gaussian
//!   compensation of the removed small jumps,
//! * tempered stable jumps as the stable series thinned by the exponential
//!   tempering factor, jump by jump.
//!
//! Everything is driven by [`SeedSpec`] streams, so equal seeds reproduce
//! samples bit for bit, and variation levels are computed through the
//! pairwise tree so `V_{n+1} >= V_n` holds exactly.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::criteria::MixedModel;
use crate::kernels::{Kernel, KernelPair};
use crate::noise::{LevyMeasure, NoiseComponent};
use crate::numerics::{integrate, variation_levels, Domain, QuadratureSpec, SeedSpec, Stream};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub const DEFAULT_SEED: u64 = 42;

/// Desk-scale realization plan for paths on `[0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct SimPlan {
    /// Dyadic level of the simulation grid.
    pub n_max: u32,
    /// Noise truncation window; `None` derives it from the kernel supports
    /// (unbounded supports are cut at 4 units below the window start).
    pub window: Option<(f64, f64)>,
    /// Truncation length of the shot-noise series per component.
    pub series_terms: usize,
    /// Optional magnitude floor: series jumps below it are truncated even
    /// before `series_terms` runs out.
    pub small_jump_cutoff: f64,
    /// Replace truncated small jumps by a Gaussian of matching variance.
    pub gaussian_compensation: bool,
    pub replicas: usize,
    pub seed: u64,
}

impl Default for SimPlan {
    fn default() -> Self {
        SimPlan {
            n_max: 12,
            window: None,
            series_terms: 10_000,
            small_jump_cutoff: 0.0,
            gaussian_compensation: true,
            replicas: 1000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Default cut below the unit interval for kernels with unbounded support.
const DEFAULT_UNBOUNDED_CUT: f64 = 4.0;

/// Window and grid geometry fixed for one run.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedPlan {
    pub n_max: u32,
    pub window: (f64, f64),
    pub series_terms: usize,
    pub small_jump_cutoff: f64,
    pub gaussian_compensation: bool,
    pub replicas: usize,
    pub seed: u64,
}

impl SimPlan {
    /// Resolve the window against the model's kernels and snap it to the
    /// simulation grid.
    pub fn resolve(&self, model: &MixedModel) -> Result<ResolvedPlan, SimError> {
        if self.n_max > 20 {
            return Err(SimError::Invalid(format!(
                "grid level {} too deep for path simulation (max 20)",
                self.n_max
            )));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for pair in &model.kernels {
            let (a, b) = pair.f.support();
            let b_eff = if b.is_finite() { b } else { DEFAULT_UNBOUNDED_CUT };
            lo = lo.min(-b_eff);
            hi = hi.max(1.0 - a.max(-DEFAULT_UNBOUNDED_CUT));
            if let Some(f0) = &pair.f0 {
                let (a0, b0) = f0.support();
                let b0_eff = if b0.is_finite() { b0 } else { DEFAULT_UNBOUNDED_CUT };
                lo = lo.min(-b0_eff);
                hi = hi.max(-a0.max(-DEFAULT_UNBOUNDED_CUT));
            }
        }
        let (mut lo, mut hi) = match self.window {
            Some((wl, wh)) => {
                if !(wl < wh) {
                    return Err(SimError::Invalid("window must satisfy lo < hi".into()));
                }
                // Bounded kernel supports must be fully covered.
                for pair in &model.kernels {
                    let (a, b) = pair.f.support();
                    if b.is_finite() && (wl > -b || wh < 1.0 - a) {
                        return Err(SimError::Invalid(format!(
                            "window [{wl}, {wh}] does not cover the kernel support dilated by \
                             [0, 1] (needs [{}, {}])",
                            -b,
                            1.0 - a
                        )));
                    }
                }
                (wl, wh)
            }
            None => (lo.min(0.0), hi.max(1.0)),
        };
        // Snap to grid multiples so kernel evaluations land on one lattice.
        let h = 0.5f64.powi(self.n_max as i32);
        lo = (lo / h).floor() * h;
        hi = (hi / h).ceil() * h;
        let infinite_activity = model.noise.components.iter().any(|c| {
            matches!(
                c.levy,
                Some(LevyMeasure::Stable { .. }) | Some(LevyMeasure::TemperedStable { .. })
            )
        });
        if infinite_activity && self.series_terms < 1000 {
            return Err(SimError::Invalid(
                "series_terms must be at least 1000 for infinite-activity noise".into(),
            ));
        }
        Ok(ResolvedPlan {
            n_max: self.n_max,
            window: (lo, hi),
            series_terms: self.series_terms,
            small_jump_cutoff: self.small_jump_cutoff,
            gaussian_compensation: self.gaussian_compensation,
            replicas: self.replicas,
            seed: self.seed,
        })
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PathDiagnostics {
    /// Variance per unit length of the truncated small jumps (zero when the
    /// series was not truncated or the noise is finite-activity).
    pub residual_small_jump_variance: f64,
    /// Expected-variation bound for the part of the noise outside the
    /// truncation window (kernels with unbounded support only).
    pub window_residual_bound: f64,
    pub warnings: Vec<String>,
}

/// One simulated path on the dyadic grid, pinned to `X_0 = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct PathSample {
    pub level: u32,
    /// `2^level + 1` values of `X_t - X_0` on `[0, 1]`.
    pub values: Vec<f64>,
    /// `V_0..=V_level`, nondecreasing exactly.
    pub variation_levels: Vec<f64>,
    pub methods: Vec<String>,
    pub diagnostics: PathDiagnostics,
}

impl PathSample {
    pub fn total_variation_level(&self) -> f64 {
        *self.variation_levels.last().unwrap()
    }
}

/// Variation levels of a sampled path.
pub fn bv_levels(sample: &PathSample) -> &[f64] {
    &sample.variation_levels
}

/// `∫_window φ_t(s) ds - ∫_window φ_0(s) ds` for the drift and compensator
/// terms. Zero for covered compact supports; fractional pairs use the
/// antiderivative.
fn linear_functional(pair: &KernelPair, window: (f64, f64), t: f64) -> f64 {
    let (a, b) = pair.f.support();
    if b.is_finite() && a.is_finite() {
        // The window covers the support dilated by [0, 1]: the sweep
        // integral of f(t - ·) is t-independent and cancels after pinning.
        return 0.0;
    }
    let anti = |x: f64| pair.f.antiderivative(x).unwrap_or(f64::NAN);
    // ∫_{w_lo}^{w_hi} f(t-s) ds = F(t - w_lo) - F(t - w_hi).
    let sweep = |t: f64| anti(t - window.0) - anti(t - window.1);
    sweep(t) - sweep(0.0)
}

/// `∫ (x - [[x]]·1_{|x|>=cut}) …`: mean of the truncation function over the
/// retained jumps `|x| >= cut`, per unit length and unit weight.
fn truncated_compensator_mean(levy: &LevyMeasure, cut: f64) -> f64 {
    if levy.is_symmetric() {
        return 0.0;
    }
    match levy {
        LevyMeasure::FiniteAtoms { atoms } => atoms
            .iter()
            .filter(|a| a.x.abs() >= cut)
            .map(|a| a.rate * a.x / a.x.abs().max(1.0))
            .sum(),
        LevyMeasure::Stable { c_pos, c_neg, alpha } => {
            let one_side = |c: f64| {
                if c == 0.0 {
                    return 0.0;
                }
                let sign_tail = c * cut.max(1.0).powf(-alpha) / alpha;
                let body = if cut < 1.0 {
                    if (*alpha - 1.0).abs() < 1e-12 {
                        c * (1.0 / cut).ln()
                    } else {
                        c * (1.0 - cut.powf(1.0 - alpha)) / (1.0 - alpha)
                    }
                } else {
                    0.0
                };
                sign_tail + body
            };
            one_side(*c_pos) - one_side(*c_neg)
        }
        LevyMeasure::TemperedStable { d_pos, d_neg, beta, lambda_pos, lambda_neg } => {
            let one_side = |d: f64, l: f64| {
                if d == 0.0 {
                    return 0.0;
                }
                let spec = QuadratureSpec::with_singularities(&[cut]);
                let tail = integrate(
                    |x: f64| d * x.powf(-beta - 1.0) * (-l * x).exp(),
                    Domain::upper_tail(cut.max(1.0)),
                    &spec,
                )
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
                let body = if cut < 1.0 {
                    integrate(
                        |x: f64| d * x.powf(-beta) * (-l * x).exp(),
                        Domain::new(cut, 1.0),
                        &spec,
                    )
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
                } else {
                    0.0
                };
                tail + body
            };
            one_side(*d_pos, *lambda_pos) - one_side(*d_neg, *lambda_neg)
        }
        LevyMeasure::TabulatedTail { .. } => 0.0,
    }
}

/// Draw Poisson arrival times on `[lo, hi)` at the given rate.
fn poisson_times<R: Rng>(rng: &mut R, lo: f64, hi: f64, rate: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if rate <= 0.0 {
        return out;
    }
    let mut t = lo;
    loop {
        let u: f64 = rng.random();
        t += -u.ln() / rate;
        if t >= hi {
            return out;
        }
        out.push(t);
    }
}

/// Magnitude-ordered stable series jumps on a window of length `len`:
/// `(position, signed jump)` plus the truncation cutoff actually reached.
struct StableSeries {
    jumps: Vec<(f64, f64)>,
    cutoff: f64,
}

fn stable_series<R: Rng>(
    rng_times: &mut R,
    rng_sizes: &mut R,
    c_pos: f64,
    c_neg: f64,
    alpha: f64,
    weight: f64,
    window: (f64, f64),
    terms: usize,
    floor: f64,
    temper: Option<(f64, f64)>,
) -> StableSeries {
    let len = window.1 - window.0;
    let total = weight * (c_pos + c_neg);
    let mut jumps = Vec::new();
    let mut gamma = 0.0f64;
    let mut cutoff = 0.0f64;
    for _ in 0..terms {
        let e: f64 = rng_times.random::<f64>();
        gamma += -e.ln();
        // Inverse of the tail mass r ↦ len·w·(c1+c2)/α·r^{-α} at Γ.
        let r = (alpha * gamma / (len * total)).powf(-1.0 / alpha);
        cutoff = r;
        if floor > 0.0 && r < floor {
            break;
        }
        let pos = window.0 + len * rng_sizes.random::<f64>();
        let positive = rng_sizes.random::<f64>() < c_pos / (c_pos + c_neg);
        if let Some((l_pos, l_neg)) = temper {
            let l = if positive { l_pos } else { l_neg };
            let keep: f64 = rng_sizes.random();
            if keep >= (-l * r).exp() {
                continue;
            }
        }
        jumps.push((pos, if positive { r } else { -r }));
    }
    StableSeries { jumps, cutoff }
}

/// Add `scale·(f(t_i - s) - f0(-s))` to the path accumulator for one jump.
fn add_jump(acc: &mut [f64], pair: &KernelPair, h: f64, s: f64, scale: f64) {
    let f_vals = pair.f.eval_lattice(-s, h, acc.len());
    let f0_val = pair.f0.as_ref().map_or(0.0, |f0| f0.eval(-s));
    for (a, fv) in acc.iter_mut().zip(f_vals) {
        *a += scale * (fv - f0_val);
    }
}

/// Gaussian part: grid-increment convolution with variance `σ²·w·Δs` per
/// noise cell, cells aligned with the path lattice.
fn add_gaussian_path<R: Rng>(
    acc: &mut [f64],
    rng: &mut R,
    pair: &KernelPair,
    h: f64,
    window: (f64, f64),
    variance_per_unit: f64,
) {
    if variance_per_unit <= 0.0 {
        return;
    }
    let cells = ((window.1 - window.0) / h).round() as usize;
    let amp = (variance_per_unit * h).sqrt();
    // t_i - s_k = (i - k)·h - w_lo - h/2 lies on one lattice.
    let offset_start = -(cells as f64 - 1.0) * h - window.0 - 0.5 * h;
    let f_row = pair.f.eval_lattice(offset_start, h, cells + acc.len());
    let z: Vec<f64> = (0..cells).map(|_| StandardNormal.sample(rng)).collect();
    // The f0 row couples to the same draws but is i-independent; it cancels
    // after pinning, so only the f correlation is accumulated.
    for (i, a) in acc.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (k, zk) in z.iter().enumerate() {
            // index of (i - k) in the row: i - k + cells - 1
            sum += f_row[i + cells - 1 - k] * zk;
        }
        *a += amp * sum;
    }
}

/// Simulate one path replica of the model on the dyadic grid.
///
/// The model must exist (run the existence check first); tabulated-tail
/// noise has no sampler and is rejected.
pub fn sample_path(
    model: &MixedModel,
    plan: &SimPlan,
    replica: u32,
) -> Result<PathSample, SimError> {
    let resolved = plan.resolve(model)?;
    sample_path_resolved(model, &resolved, replica)
}

pub fn sample_path_resolved(
    model: &MixedModel,
    plan: &ResolvedPlan,
    replica: u32,
) -> Result<PathSample, SimError> {
    let n = plan.n_max;
    let h = 0.5f64.powi(n as i32);
    let count = (1usize << n) + 1;
    let seed = SeedSpec::new(plan.seed);
    let mut values = vec![0.0f64; count];
    let mut methods = Vec::new();
    let mut diagnostics = PathDiagnostics::default();

    for (j, (comp, pair)) in model.components().enumerate() {
        let cj = j as u32;
        // Drift.
        if comp.theta != 0.0 {
            let lin: Vec<f64> = (0..count)
                .map(|i| linear_functional(pair, plan.window, i as f64 * h))
                .collect();
            for (v, l) in values.iter_mut().zip(&lin) {
                *v += comp.theta * comp.weight * l;
            }
            methods.push(format!("component {j}: drift"));
        }
        // Gaussian part.
        if comp.sigma2 > 0.0 {
            let mut rng = seed.rng(cj, replica, Stream::Gaussian, 0);
            add_gaussian_path(
                &mut values,
                &mut rng,
                pair,
                h,
                plan.window,
                comp.sigma2 * comp.weight,
            );
            methods.push(format!("component {j}: gaussian grid convolution"));
        }
        // Jump part.
        match &comp.levy {
            None => {}
            Some(LevyMeasure::FiniteAtoms { atoms }) => {
                let mut rng_t = seed.rng(cj, replica, Stream::JumpTimes, 0);
                let mut compensator = 0.0;
                for (ai, atom) in atoms.iter().enumerate() {
                    let mut rng_a = seed.rng(cj, replica, Stream::JumpSizes, ai as u32);
                    let times =
                        poisson_times(&mut rng_t, plan.window.0, plan.window.1, atom.rate * comp.weight);
                    let _ = &mut rng_a;
                    for s in times {
                        add_jump(&mut values, pair, h, s, atom.x);
                    }
                    compensator += atom.rate * atom.x / atom.x.abs().max(1.0);
                }
                if compensator != 0.0 {
                    for (i, v) in values.iter_mut().enumerate() {
                        *v -= comp.weight
                            * compensator
                            * linear_functional(pair, plan.window, i as f64 * h);
                    }
                }
                methods.push(format!("component {j}: compound poisson superposition"));
            }
            Some(LevyMeasure::Stable { c_pos, c_neg, alpha }) => {
                let mut rng_t = seed.rng(cj, replica, Stream::JumpTimes, 0);
                let mut rng_s = seed.rng(cj, replica, Stream::JumpSizes, 0);
                let series = stable_series(
                    &mut rng_t,
                    &mut rng_s,
                    *c_pos,
                    *c_neg,
                    *alpha,
                    comp.weight,
                    plan.window,
                    plan.series_terms,
                    plan.small_jump_cutoff,
                    None,
                );
                for (s, x) in &series.jumps {
                    add_jump(&mut values, pair, h, *s, *x);
                }
                // Compensator for the retained jumps.
                let m1 = comp.weight * truncated_compensator_mean(&comp.levy.clone().unwrap(), series.cutoff);
                if m1 != 0.0 {
                    for (i, v) in values.iter_mut().enumerate() {
                        *v -= m1 * linear_functional(pair, plan.window, i as f64 * h);
                    }
                }
                // Residual small jumps.
                let res_var = comp.weight
                    * model_residual_variance(&comp.levy.clone().unwrap(), series.cutoff);
                diagnostics.residual_small_jump_variance += res_var;
                if plan.gaussian_compensation && res_var > 0.0 {
                    let mut rng_c = seed.rng(cj, replica, Stream::Compensation, 0);
                    add_gaussian_path(&mut values, &mut rng_c, pair, h, plan.window, res_var);
                }
                methods.push(format!("component {j}: stable shot-noise series"));
            }
            Some(LevyMeasure::TemperedStable { d_pos, d_neg, beta, lambda_pos, lambda_neg }) => {
                let mut rng_t = seed.rng(cj, replica, Stream::JumpTimes, 0);
                let mut rng_s = seed.rng(cj, replica, Stream::JumpSizes, 0);
                let series = stable_series(
                    &mut rng_t,
                    &mut rng_s,
                    *d_pos,
                    *d_neg,
                    *beta,
                    comp.weight,
                    plan.window,
                    plan.series_terms,
                    plan.small_jump_cutoff,
                    Some((*lambda_pos, *lambda_neg)),
                );
                for (s, x) in &series.jumps {
                    add_jump(&mut values, pair, h, *s, *x);
                }
                let m1 = comp.weight * truncated_compensator_mean(&comp.levy.clone().unwrap(), series.cutoff);
                if m1 != 0.0 {
                    for (i, v) in values.iter_mut().enumerate() {
                        *v -= m1 * linear_functional(pair, plan.window, i as f64 * h);
                    }
                }
                let res_var = comp.weight
                    * model_residual_variance(&comp.levy.clone().unwrap(), series.cutoff);
                diagnostics.residual_small_jump_variance += res_var;
                if plan.gaussian_compensation && res_var > 0.0 {
                    let mut rng_c = seed.rng(cj, replica, Stream::Compensation, 0);
                    add_gaussian_path(&mut values, &mut rng_c, pair, h, plan.window, res_var);
                }
                methods.push(format!(
                    "component {j}: stable series with exponential tempering by rejection"
                ));
            }
            Some(LevyMeasure::TabulatedTail { .. }) => {
                return Err(SimError::Unsupported(
                    "tabulated-tail noise has no path sampler".into(),
                ));
            }
        }
        // Truncation-window residual for unbounded kernel supports.
        diagnostics.window_residual_bound += window_residual_bound(comp, pair, plan.window);
    }

    // Pin X_0 = 0.
    let x0 = values[0];
    for v in values.iter_mut() {
        *v -= x0;
    }
    values[0] = 0.0;
    let variation_levels = variation_levels(&values);
    Ok(PathSample {
        level: n,
        values,
        variation_levels,
        methods,
        diagnostics,
    })
}

/// `∫_{|x| < cut} x² ρ(dx)` per unit weight: the variance density of the
/// truncated small jumps.
fn model_residual_variance(levy: &LevyMeasure, cut: f64) -> f64 {
    if cut <= 0.0 {
        return 0.0;
    }
    levy.truncated_second_moment(cut).unwrap_or(0.0)
}

/// Expected-variation bound on the noise mass outside the window, for
/// kernels with unbounded support (mean-zero part only).
fn window_residual_bound(comp: &NoiseComponent, pair: &KernelPair, window: (f64, f64)) -> f64 {
    let (_, b) = pair.f.support();
    if b.is_finite() {
        return 0.0;
    }
    // Omitted region s < w_lo maps to kernel argument u = t - s > -w_lo.
    let u0 = -window.0;
    let spec = QuadratureSpec::default();
    let c_tail = if comp.sigma2 > 0.0 {
        comp.weight
            * comp.sigma2
            * integrate(
                |u: f64| pair.f.derivative(u).map(|d| d * d).unwrap_or(f64::NAN),
                Domain::upper_tail(u0),
                &spec,
            )
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY)
    } else {
        0.0
    };
    let d_tail = match &comp.levy {
        Some(m) if m.total_mass() > 0.0 => comp.weight
            * integrate(
                |u: f64| {
                    pair.f
                        .derivative(u)
                        .map(|d| m.xi(d))
                        .unwrap_or(f64::NAN)
                },
                Domain::upper_tail(u0),
                &spec,
            )
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY),
        _ => 0.0,
    };
    if !c_tail.is_finite() || !d_tail.is_finite() {
        return f64::INFINITY;
    }
    crate::criteria::SQRT_2_OVER_PI * c_tail.sqrt() + 1.25 * d_tail.max(d_tail.sqrt())
}

/// Monte Carlo estimate with standard error.
#[derive(Debug, Clone, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicas: usize,
    /// `(level, mean, std_error)` of the level estimates `2^m·E|ΔX|`.
    pub per_level: Vec<(u32, f64, f64)>,
}

fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Context for the single-increment sampler at one level: everything that
/// does not depend on the replica.
struct IncrementContext {
    /// Per component: `∫_window ψ_n(s)² ds` with `ψ_n(s) = f(2^{-n}-s) - f(-s)`.
    psi_l2: Vec<f64>,
    /// Per component: `∫_window ψ_n(s) ds`.
    psi_lin: Vec<f64>,
}

fn increment_context(model: &MixedModel, plan: &ResolvedPlan, n: u32) -> IncrementContext {
    let h = 0.5f64.powi(n as i32);
    let mut psi_l2 = Vec::new();
    let mut psi_lin = Vec::new();
    for pair in &model.kernels {
        let psi = |s: f64| pair.f.diff(h - s, -s);
        let spec = QuadratureSpec {
            rel_tol: 1e-9,
            singular_points: vec![0.0, h],
            ..QuadratureSpec::default()
        };
        let domain = Domain::new(plan.window.0, plan.window.1.max(h));
        let l2 = integrate(|s| psi(s) * psi(s), domain, &spec)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        let lin = linear_functional(pair, plan.window, h);
        psi_l2.push(l2);
        psi_lin.push(lin);
    }
    IncrementContext { psi_l2, psi_lin }
}

/// One replica of the pinned increment `X(2^{-n}) - X(0)`.
fn sample_increment(
    model: &MixedModel,
    plan: &ResolvedPlan,
    ctx: &IncrementContext,
    n: u32,
    replica: u32,
) -> Result<f64, SimError> {
    let h = 0.5f64.powi(n as i32);
    let seed = SeedSpec::new(plan.seed);
    let mut delta = 0.0f64;
    for (j, (comp, pair)) in model.components().enumerate() {
        let cj = j as u32;
        let psi = |s: f64| pair.f.diff(h - s, -s);
        if comp.theta != 0.0 {
            delta += comp.theta * comp.weight * ctx.psi_lin[j];
        }
        if comp.sigma2 > 0.0 {
            let mut rng = seed.rng(cj, replica, Stream::Gaussian, n);
            let z: f64 = StandardNormal.sample(&mut rng);
            delta += (comp.sigma2 * comp.weight * ctx.psi_l2[j]).sqrt() * z;
        }
        match &comp.levy {
            None => {}
            Some(LevyMeasure::FiniteAtoms { atoms }) => {
                let mut rng_t = seed.rng(cj, replica, Stream::JumpTimes, n);
                let mut compensator = 0.0;
                for atom in atoms {
                    for s in poisson_times(
                        &mut rng_t,
                        plan.window.0,
                        plan.window.1,
                        atom.rate * comp.weight,
                    ) {
                        delta += atom.x * psi(s);
                    }
                    compensator += atom.rate * atom.x / atom.x.abs().max(1.0);
                }
                delta -= comp.weight * compensator * ctx.psi_lin[j];
            }
            Some(LevyMeasure::Stable { c_pos, c_neg, alpha }) => {
                let mut rng_t = seed.rng(cj, replica, Stream::JumpTimes, n);
                let mut rng_s = seed.rng(cj, replica, Stream::JumpSizes, n);
                let series = stable_series(
                    &mut rng_t,
                    &mut rng_s,
                    *c_pos,
                    *c_neg,
                    *alpha,
                    comp.weight,
                    plan.window,
                    plan.series_terms,
                    plan.small_jump_cutoff,
                    None,
                );
                for (s, x) in &series.jumps {
                    delta += x * psi(*s);
                }
                let levy = comp.levy.as_ref().unwrap();
                delta -= comp.weight
                    * truncated_compensator_mean(levy, series.cutoff)
                    * ctx.psi_lin[j];
                let res_var = comp.weight * model_residual_variance(levy, series.cutoff);
                if plan.gaussian_compensation && res_var > 0.0 {
                    let mut rng_c = seed.rng(cj, replica, Stream::Compensation, n);
                    let z: f64 = StandardNormal.sample(&mut rng_c);
                    delta += (res_var * ctx.psi_l2[j]).sqrt() * z;
                }
            }
            Some(LevyMeasure::TemperedStable { d_pos, d_neg, beta, lambda_pos, lambda_neg }) => {
                let mut rng_t = seed.rng(cj, replica, Stream::JumpTimes, n);
                let mut rng_s = seed.rng(cj, replica, Stream::JumpSizes, n);
                let series = stable_series(
                    &mut rng_t,
                    &mut rng_s,
                    *d_pos,
                    *d_neg,
                    *beta,
                    comp.weight,
                    plan.window,
                    plan.series_terms,
                    plan.small_jump_cutoff,
                    Some((*lambda_pos, *lambda_neg)),
                );
                for (s, x) in &series.jumps {
                    delta += x * psi(*s);
                }
                let levy = comp.levy.as_ref().unwrap();
                delta -= comp.weight
                    * truncated_compensator_mean(levy, series.cutoff)
                    * ctx.psi_lin[j];
                let res_var = comp.weight * model_residual_variance(levy, series.cutoff);
                if plan.gaussian_compensation && res_var > 0.0 {
                    let mut rng_c = seed.rng(cj, replica, Stream::Compensation, n);
                    let z: f64 = StandardNormal.sample(&mut rng_c);
                    delta += (res_var * ctx.psi_l2[j]).sqrt() * z;
                }
            }
            Some(LevyMeasure::TabulatedTail { .. }) => {
                return Err(SimError::Unsupported(
                    "tabulated-tail noise has no increment sampler".into(),
                ));
            }
        }
    }
    Ok(delta)
}

/// Monte Carlo estimate of `2^n·E|X(2^{-n}) - X(0)|`, which by increment
/// stationarity equals `E V_n`; level estimates for `0..=n` ride along.
pub fn mc_expected_variation(
    model: &MixedModel,
    plan: &SimPlan,
    n: u32,
    replicas: usize,
) -> Result<MCEstimate, SimError> {
    if replicas < 100 {
        return Err(SimError::Invalid("need at least 100 replicas".into()));
    }
    let resolved = plan.resolve(model)?;
    let mut per_level = Vec::new();
    let mut top = (0.0, 0.0);
    for m in 0..=n {
        let ctx = increment_context(model, &resolved, m);
        let scale = 2.0f64.powi(m as i32);
        let samples: Result<Vec<f64>, SimError> = (0..replicas)
            .map(|r| sample_increment(model, &resolved, &ctx, m, r as u32).map(|d| scale * d.abs()))
            .collect();
        let (mean, se) = mean_se(&samples?);
        per_level.push((m, mean, se));
        if m == n {
            top = (mean, se);
        }
    }
    Ok(MCEstimate {
        mean: top.0,
        std_error: top.1,
        replicas,
        per_level,
    })
}

/// `I_n = Σ_v w_v·∫ ξ_v(f_n(s, v)) ds` with
/// `f_n(s) = 2^n·(f(2^{-n}-s) - f(-s))`; `+∞` when the integral diverges.
pub fn increment_integral(model: &MixedModel, n: u32) -> f64 {
    let h = 0.5f64.powi(n as i32);
    let mut total = 0.0;
    for (comp, pair) in model.components() {
        let Some(levy) = comp.levy.as_ref().filter(|m| m.total_mass() > 0.0) else {
            continue;
        };
        // Closed form for an indicator kernel with a stable measure: f_n is
        // ±2^n on two intervals of length 2^{-n}.
        if let (Kernel::Indicator { a, b }, Some(c)) = (&pair.f, levy.stable_xi_coefficient()) {
            if b - a >= h {
                let alpha = match levy {
                    LevyMeasure::Stable { alpha, .. } => *alpha,
                    _ => unreachable!(),
                };
                total += comp.weight * 2.0 * c * 2.0f64.powf(n as f64 * (alpha - 1.0));
                continue;
            }
        }
        let (a, b) = pair.f.support();
        let f_n = |s: f64| pair.increment_section(n, s);
        let integrand = |s: f64| levy.xi(f_n(s));
        let value = if a.is_finite() && b.is_finite() {
            let lo = (-b).min(h - b);
            let hi = (-a).max(h - a);
            let spec = QuadratureSpec {
                rel_tol: 1e-7,
                singular_points: vec![-b, h - b, -a, h - a, 0.0, h],
                ..QuadratureSpec::default()
            };
            match integrate(integrand, Domain::new(lo, hi), &spec) {
                Ok(r) => r.value,
                Err(_) => f64::INFINITY,
            }
        } else {
            let spec = QuadratureSpec {
                rel_tol: 1e-7,
                singular_points: vec![0.0, h],
                ..QuadratureSpec::default()
            };
            match crate::numerics::detect_divergence(
                integrand,
                Domain::new(f64::NEG_INFINITY, h),
                &spec,
            ) {
                crate::numerics::Convergence::Finite(v) => v,
                _ => f64::INFINITY,
            }
        };
        if !value.is_finite() {
            return f64::INFINITY;
        }
        total += comp.weight * value;
    }
    total
}

/// Sandwich check report: the increment mean against its analytic bounds.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub level: u32,
    pub i_n: f64,
    pub lower: f64,
    pub upper: f64,
    pub mc_mean: f64,
    pub mc_std_error: f64,
    pub within: bool,
}

/// Compare the Monte Carlo mean of `|2^n·ΔX|` with the analytic envelope
/// `[(1/4)·min(I_n, √I_n), (5/4)·max(I_n, √I_n)]` (3 standard errors of
/// slack on each side). Requires symmetric, purely non-Gaussian noise.
pub fn verify_l1_sandwich(
    model: &MixedModel,
    plan: &SimPlan,
    n: u32,
    replicas: usize,
) -> Result<SandwichReport, SimError> {
    for (comp, _) in model.components() {
        if comp.sigma2 != 0.0 || comp.theta != 0.0 {
            return Err(SimError::Invalid(
                "sandwich check needs θ = 0 and no Gaussian part".into(),
            ));
        }
        if let Some(m) = &comp.levy {
            if !m.is_symmetric() {
                return Err(SimError::Invalid("sandwich check needs symmetric noise".into()));
            }
        }
    }
    let i_n = increment_integral(model, n);
    let (lower, upper) = if i_n == 0.0 {
        (0.0, 0.0)
    } else {
        (0.25 * i_n.min(i_n.sqrt()), 1.25 * i_n.max(i_n.sqrt()))
    };
    let resolved = plan.resolve(model)?;
    let ctx = increment_context(model, &resolved, n);
    let scale = 2.0f64.powi(n as i32);
    let samples: Result<Vec<f64>, SimError> = (0..replicas)
        .map(|r| sample_increment(model, &resolved, &ctx, n, r as u32).map(|d| scale * d.abs()))
        .collect();
    let (mean, se) = mean_se(&samples?);
    let within = mean >= lower - 3.0 * se && mean <= upper + 3.0 * se;
    Ok(SandwichReport {
        level: n,
        i_n,
        lower,
        upper,
        mc_mean: mean,
        mc_std_error: se,
        within,
    })
}

/// Per-replica statistics of the finite-activity path experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroOneExperiment {
    pub replicas: usize,
    pub growth_threshold: f64,
    /// Fraction of replicas whose level growth stayed below the threshold.
    pub fraction_bounded: f64,
    /// Fraction with no Poisson point in the kernel-relevant window.
    pub fraction_empty_window: f64,
    /// Replicas with exactly one relevant point: count, smallest observed
    /// `V_n/V_4` growth ratio among resolved sections, and how many sections
    /// overlapped `[0, 1]` by less than one level-4 cell (too narrow for the
    /// `V_n/V_4` proxy to register).
    pub single_atom_count: usize,
    pub single_atom_min_growth: f64,
    pub single_atom_unresolved: usize,
    /// Every zero-atom replica had an identically flat path.
    pub zero_atom_all_flat: bool,
}

/// Finite-activity zero-one experiment: classify each replica's path as
/// variation-bounded or growing and track the empty-window fraction.
pub fn zero_one_experiment(
    model: &MixedModel,
    plan: &SimPlan,
    replicas: usize,
    growth_threshold: f64,
) -> Result<ZeroOneExperiment, SimError> {
    for (comp, _) in model.components() {
        if comp.sigma2 != 0.0 {
            return Err(SimError::Unsupported(
                "zero-one experiment is defined for finite-activity noise (no Gaussian part)"
                    .into(),
            ));
        }
        match &comp.levy {
            Some(LevyMeasure::FiniteAtoms { .. }) | None => {}
            _ => {
                return Err(SimError::Unsupported(
                    "zero-one experiment is defined for finite-activity noise".into(),
                ))
            }
        }
    }
    let resolved = plan.resolve(model)?;
    let n = resolved.n_max;
    if n < 8 {
        return Err(SimError::Invalid("experiment needs at least grid level 8".into()));
    }

    // Relevant windows per component: shifts whose kernel section meets the
    // unit interval.
    let relevant: Vec<(f64, f64)> = model
        .kernels
        .iter()
        .map(|pair| {
            let (a, b) = pair.f.support();
            (-b, 1.0 - a)
        })
        .collect();

    let mut bounded = 0usize;
    let mut empty = 0usize;
    let mut single_count = 0usize;
    let mut single_min_growth = f64::INFINITY;
    let mut single_unresolved = 0usize;
    let mut zero_atom_all_flat = true;

    // A section narrower than one level-4 cell cannot register on the
    // coarse side of the growth ratio.
    let resolve_width = 0.5f64.powi(4);

    for r in 0..replicas {
        // Regenerate the same jump times the path sampler will use, to count
        // relevant atoms. Identical stream derivation keeps them in sync.
        let seed = SeedSpec::new(resolved.seed);
        let mut relevant_points = 0usize;
        let mut last_overlap = 0.0f64;
        for (j, (comp, pair)) in model.components().enumerate() {
            if let Some(LevyMeasure::FiniteAtoms { atoms }) = &comp.levy {
                let (a_supp, b_supp) = pair.f.support();
                let mut rng_t = seed.rng(j as u32, r as u32, Stream::JumpTimes, 0);
                for atom in atoms {
                    for s in poisson_times(
                        &mut rng_t,
                        resolved.window.0,
                        resolved.window.1,
                        atom.rate * comp.weight,
                    ) {
                        if s > relevant[j].0 && s < relevant[j].1 {
                            relevant_points += 1;
                            last_overlap = (1.0 - s).min(b_supp) - (-s).max(a_supp);
                        }
                    }
                }
            }
        }
        let sample = sample_path_resolved(model, &resolved, r as u32)?;
        let levels = &sample.variation_levels;
        let v_top = levels[n as usize];
        let v_back = levels[(n - 4) as usize];
        let is_bounded = if v_top == 0.0 {
            true
        } else if v_back == 0.0 {
            false
        } else {
            v_top / v_back < growth_threshold
        };
        if is_bounded {
            bounded += 1;
        }
        if relevant_points == 0 {
            empty += 1;
            if v_top != 0.0 {
                zero_atom_all_flat = false;
            }
        }
        if relevant_points == 1 {
            single_count += 1;
            let v4 = levels[4];
            if v_top == 0.0 || last_overlap < resolve_width {
                single_unresolved += 1;
            } else {
                let growth = if v4 == 0.0 { f64::INFINITY } else { v_top / v4 };
                single_min_growth = single_min_growth.min(growth);
            }
        }
    }

    Ok(ZeroOneExperiment {
        replicas,
        growth_threshold,
        fraction_bounded: bounded as f64 / replicas as f64,
        fraction_empty_window: empty as f64 / replicas as f64,
        single_atom_count: single_count,
        single_atom_min_growth: single_min_growth,
        single_atom_unresolved: single_unresolved,
        zero_atom_all_flat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;
    use crate::noise::NoiseComponent;

    fn drift_only(c: f64) -> MixedModel {
        // Purely deterministic drift (test construction; configuration-level
        // validation would reject it).
        MixedModel::single(
            NoiseComponent::new(1.0, c, 0.0, None),
            KernelPair::anchored(Kernel::fractional(0.0)),
        )
        .unwrap()
    }

    #[test]
    fn drift_only_path_is_linear() {
        let model = drift_only(0.7);
        let plan = SimPlan { n_max: 6, ..SimPlan::default() };
        let sample = sample_path(&model, &plan, 0).unwrap();
        for (i, v) in sample.values.iter().enumerate() {
            let t = i as f64 / 64.0;
            assert!((v - 0.7 * t).abs() < 1e-12, "at {t}: {v}");
        }
        for lv in &sample.variation_levels {
            assert!((lv - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn drift_only_increment_estimates_are_exact() {
        let model = drift_only(-1.3);
        let plan = SimPlan { n_max: 8, ..SimPlan::default() };
        let est = mc_expected_variation(&model, &plan, 4, 200).unwrap();
        assert!((est.mean - 1.3).abs() < 1e-12);
        assert!(est.std_error < 1e-12);
    }

    #[test]
    fn brownian_increment_mean() {
        // σ² = 1 with the anchored step kernel: X is Brownian motion, so
        // 2^n·E|X(2^{-n})| = 2^{n/2}·√(2/π).
        let model = MixedModel::single(
            NoiseComponent::gaussian(1.0, 1.0),
            KernelPair::anchored(Kernel::fractional(0.0)),
        )
        .unwrap();
        let plan = SimPlan { n_max: 8, seed: 7, ..SimPlan::default() };
        let est = mc_expected_variation(&model, &plan, 4, 4000).unwrap();
        let want = 4.0 * crate::criteria::SQRT_2_OVER_PI;
        assert!(
            (est.mean - want).abs() < 3.0 * est.std_error,
            "mean {} vs {want} (se {})",
            est.mean,
            est.std_error
        );
        // Level means are nondecreasing within noise.
        for w in est.per_level.windows(2) {
            assert!(w[1].1 >= w[0].1 - 3.0 * (w[0].2 + w[1].2));
        }
    }

    #[test]
    fn brownian_path_variation_grows_like_sqrt_grid() {
        let model = MixedModel::single(
            NoiseComponent::gaussian(1.0, 1.0),
            KernelPair::anchored(Kernel::fractional(0.0)),
        )
        .unwrap();
        let plan = SimPlan { n_max: 10, seed: 3, ..SimPlan::default() };
        let sample = sample_path(&model, &plan, 1).unwrap();
        // E V_10 = 2^5·√(2/π) ≈ 25.53; a single path should land within a
        // few absolute units.
        let v = sample.total_variation_level();
        assert!(v > 18.0 && v < 34.0, "V_10 = {v}");
    }

    #[test]
    fn compound_poisson_counting_oracle() {
        // Indicator kernel, single atom (x = 1, rate 2): the path is a
        // difference of two counting processes. Direct event bookkeeping
        // reproduces the sampled path exactly.
        let atoms = LevyMeasure::finite_atoms(vec![(1.0, 2.0)]).unwrap();
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, atoms),
            KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
        )
        .unwrap();
        let plan = SimPlan { n_max: 9, seed: 11, ..SimPlan::default() };
        let resolved = plan.resolve(&model).unwrap();
        let sample = sample_path(&model, &plan, 5).unwrap();

        let seed = SeedSpec::new(resolved.seed);
        let mut rng_t = seed.rng(0, 5, Stream::JumpTimes, 0);
        let times = poisson_times(&mut rng_t, resolved.window.0, resolved.window.1, 2.0);
        let h = 0.5f64.powi(9);
        for (i, v) in sample.values.iter().enumerate() {
            let t = i as f64 * h;
            let direct: f64 = times
                .iter()
                .map(|s| {
                    let in_t = (t - s >= 0.0 && t - s <= 1.0) as i32 as f64;
                    let in_0 = (0.0 - s >= 0.0 && 0.0 - s <= 1.0) as i32 as f64;
                    in_t - in_0
                })
                .sum();
            assert!((v - direct).abs() < 1e-12, "t={t}: {v} vs {direct}");
        }
        // V at the top level counts isolated unit jumps.
        let v_top = sample.total_variation_level();
        assert!(v_top >= 1.0 || times.is_empty());
    }

    #[test]
    fn path_is_seed_deterministic() {
        let atoms = LevyMeasure::finite_atoms(vec![(1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let model = MixedModel::single(
            NoiseComponent::new(1.0, 0.0, 0.5, Some(atoms)),
            KernelPair::moving_average(Kernel::smooth_bump(-0.5, 0.5).unwrap()),
        )
        .unwrap();
        let plan = SimPlan { n_max: 8, seed: 99, ..SimPlan::default() };
        let a = sample_path(&model, &plan, 3).unwrap();
        let b = sample_path(&model, &plan, 3).unwrap();
        assert_eq!(a.values, b.values, "equal seeds must be bit-identical");
        let c = sample_path(&model, &plan, 4).unwrap();
        assert_ne!(a.values, c.values, "distinct replicas must differ");
    }

    #[test]
    fn variation_levels_monotone_across_families() {
        let models: Vec<MixedModel> = vec![
            MixedModel::single(
                NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
                KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
            )
            .unwrap(),
            MixedModel::single(
                NoiseComponent::jumps(
                    1.0,
                    LevyMeasure::tempered_stable(1.0, 1.0, 1.2, 1.0, 1.0).unwrap(),
                ),
                KernelPair::anchored(Kernel::fractional(0.25)),
            )
            .unwrap(),
            MixedModel::single(
                NoiseComponent::gaussian(1.0, 1.0),
                KernelPair::moving_average(Kernel::smooth_bump(-0.5, 0.5).unwrap()),
            )
            .unwrap(),
        ];
        let plan = SimPlan { n_max: 8, series_terms: 1500, seed: 1, ..SimPlan::default() };
        for (mi, model) in models.iter().enumerate() {
            for r in 0..4 {
                let sample = sample_path(model, &plan, r).unwrap();
                for w in sample.variation_levels.windows(2) {
                    assert!(w[1] >= w[0], "model {mi} replica {r}");
                }
            }
        }
    }

    #[test]
    fn increment_integral_indicator_stable_closed_form() {
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
            KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
        )
        .unwrap();
        let i0 = increment_integral(&model, 0);
        let i1 = increment_integral(&model, 1);
        assert!((i0 - 16.0).abs() < 1e-9, "I_0 = {i0}");
        assert!((i1 - 16.0 * 2.0f64.sqrt()).abs() < 1e-9, "I_1 = {i1}");
    }

    #[test]
    fn increment_integral_flat_kernel_is_zero() {
        let flat = Kernel::piecewise_linear(vec![(0.0, 2.0), (1.0, 2.0)]).unwrap();
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
            KernelPair::moving_average(flat),
        )
        .unwrap();
        assert_eq!(increment_integral(&model, 3), 0.0);
    }

    #[test]
    fn increment_integral_converges_to_df() {
        // Smooth kernel: I_n → D_f as the increment sections converge to
        // the derivative.
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
            KernelPair::moving_average(Kernel::smooth_bump(-1.0, 1.0).unwrap()),
        )
        .unwrap();
        let d_f = crate::criteria::df_integral(&model).value().unwrap();
        let i_10 = increment_integral(&model, 10);
        assert!(
            (i_10 - d_f).abs() < 0.01 * d_f,
            "I_10 = {i_10} vs D_f = {d_f}"
        );
    }

    #[test]
    fn sandwich_zero_cost_model() {
        let flat = Kernel::piecewise_linear(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
            KernelPair::moving_average(flat),
        )
        .unwrap();
        let plan = SimPlan { n_max: 8, series_terms: 1200, ..SimPlan::default() };
        let rep = verify_l1_sandwich(&model, &plan, 3, 150).unwrap();
        assert_eq!(rep.i_n, 0.0);
        assert_eq!(rep.lower, 0.0);
        assert!(rep.within, "{rep:?}");
        assert!(rep.mc_mean.abs() < 1e-9);
    }

    #[test]
    fn sandwich_indicator_stable_level2() {
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
            KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
        )
        .unwrap();
        let plan = SimPlan { n_max: 8, series_terms: 2000, seed: 5, ..SimPlan::default() };
        let rep = verify_l1_sandwich(&model, &plan, 2, 400).unwrap();
        assert!((rep.i_n - 32.0).abs() < 1e-9);
        assert!(rep.within, "{rep:?}");
    }

    #[test]
    fn sandwich_rejects_asymmetric_noise() {
        let atoms = LevyMeasure::finite_atoms(vec![(1.0, 1.0)]).unwrap();
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, atoms),
            KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
        )
        .unwrap();
        let plan = SimPlan::default();
        assert!(verify_l1_sandwich(&model, &plan, 2, 150).is_err());
    }

    #[test]
    fn zero_one_experiment_smoke() {
        let atoms = LevyMeasure::finite_atoms(vec![(1.0, 1.0)]).unwrap();
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, atoms),
            KernelPair::moving_average(Kernel::weierstrass_bump(0.5, 13, 20).unwrap()),
        )
        .unwrap();
        let plan = SimPlan { n_max: 10, seed: 17, ..SimPlan::default() };
        let exp = zero_one_experiment(&model, &plan, 400, 1.25).unwrap();
        // Unit-rate atoms on the length-2 relevant window: the empty-window
        // probability is e^{-2} ≈ 0.135.
        let p = exp.fraction_empty_window;
        assert!(p > 0.08 && p < 0.20, "empty fraction {p}");
        assert!(exp.zero_atom_all_flat);
        if exp.single_atom_count > exp.single_atom_unresolved {
            assert!(exp.single_atom_min_growth > 2.0, "min growth {}", exp.single_atom_min_growth);
        }
        // BV kernel control: everything is bounded.
        let bump_model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::finite_atoms(vec![(1.0, 1.0)]).unwrap()),
            KernelPair::moving_average(Kernel::smooth_bump(-0.4, 0.4).unwrap()),
        )
        .unwrap();
        let exp2 = zero_one_experiment(&bump_model, &plan, 200, 1.25).unwrap();
        assert_eq!(exp2.fraction_bounded, 1.0);
    }

    #[test]
    fn zero_one_experiment_rejects_infinite_activity() {
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::stable(1.0, 1.0, 1.5).unwrap()),
            KernelPair::moving_average(Kernel::smooth_bump(-0.4, 0.4).unwrap()),
        )
        .unwrap();
        assert!(zero_one_experiment(&model, &SimPlan::default(), 100, 1.25).is_err());
    }

    #[test]
    fn series_truncation_consistency() {
        // Doubling the series length moves the top-level variation by less
        // than the reported residual scale on a finite-variation model.
        let model = MixedModel::single(
            NoiseComponent::jumps(
                1.0,
                LevyMeasure::tempered_stable(1.0, 1.0, 1.2, 1.0, 1.0).unwrap(),
            ),
            KernelPair::anchored(Kernel::fractional(0.25)),
        )
        .unwrap();
        let base = SimPlan { n_max: 8, series_terms: 4000, seed: 23, ..SimPlan::default() };
        let double = SimPlan { series_terms: 8000, ..base.clone() };
        let v1 = sample_path(&model, &base, 2).unwrap();
        let v2 = sample_path(&model, &double, 2).unwrap();
        let d = (v1.total_variation_level() - v2.total_variation_level()).abs();
        let scale = v1.diagnostics.residual_small_jump_variance.sqrt() * 20.0
            + 0.05 * v1.total_variation_level();
        assert!(d <= scale.max(0.5), "variation moved by {d} (scale {scale})");
    }

    #[test]
    fn window_must_cover_compact_supports() {
        let model = MixedModel::single(
            NoiseComponent::jumps(1.0, LevyMeasure::finite_atoms(vec![(1.0, 1.0)]).unwrap()),
            KernelPair::moving_average(Kernel::indicator(0.0, 1.0).unwrap()),
        )
        .unwrap();
        let plan = SimPlan { window: Some((-0.2, 1.0)), ..SimPlan::default() };
        assert!(plan.resolve(&model).is_err());
    }
}
