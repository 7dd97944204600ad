//! Divergence detection for nonnegative integrands by nested truncation.
//!
//! Quadrature alone cannot certify that an integral diverges; this routine
//! integrates over a growing family of truncated domains and watches how the
//! value moves. Sustained growth flags divergence, geometrically decaying
//! increments allow extrapolation to a finite value, anything else is
//! reported as indeterminate. The growth thresholds are conventions and are
//! surfaced in reports so callers can tighten them.

use super::quad::{integrate, Domain, QuadratureSpec};

/// Outcome of a nested-truncation scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convergence {
    Finite(f64),
    Divergent(DivergesAt),
    Indeterminate,
}

/// Which end of the domain drives the divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergesAt {
    LowerEnd,
    UpperEnd,
}

impl Convergence {
    pub fn is_finite(&self) -> bool {
        matches!(self, Convergence::Finite(_))
    }
}

/// Growth per refinement that counts as "still growing".
const GROWTH_FACTOR: f64 = 1.10;
/// Consecutive growing refinements needed to declare divergence.
const GROWTH_RUNS: usize = 4;
/// Refinements per end before giving up.
const BUDGET: usize = 22;
/// Geometric refinement of the truncation margin.
const REFINE: f64 = 4.0;

/// Decide whether `∫ f` over `domain` is finite, for nonnegative `f`.
///
/// Both endpoints may be singular or infinite. Each end is scanned
/// separately so the divergence can be attributed to it.
pub fn detect_divergence<F: Fn(f64) -> f64>(
    f: F,
    domain: Domain,
    spec: &QuadratureSpec,
) -> Convergence {
    let Domain { lo, hi } = domain;
    // Inner anchor points, well inside the domain.
    let (a0, b0) = anchors(lo, hi);
    if a0 >= b0 {
        return Convergence::Indeterminate;
    }

    let loose = QuadratureSpec {
        rel_tol: spec.rel_tol.max(1e-7),
        abs_tol: spec.abs_tol,
        max_depth: spec.max_depth,
        singular_points: spec.singular_points.clone(),
        tail_transform: spec.tail_transform,
    };
    // Pieces need far less accuracy than a standalone integral; accept a
    // non-converged partial value whose error is negligible at scan scale.
    let piece = |a: f64, b: f64| -> Option<f64> {
        match integrate(&f, Domain::new(a, b), &loose) {
            Ok(r) => Some(r.value),
            Err(crate::numerics::QuadError::NoConvergence { partial, error_estimate })
                if error_estimate <= 1e-3 * partial.abs() =>
            {
                Some(partial)
            }
            Err(_) => None,
        }
    };

    let core = match piece(a0, b0) {
        Some(v) => v,
        None => return Convergence::Indeterminate,
    };

    // Scan one end: returns (converged_mass, diverging, indeterminate).
    let scan = |toward_hi: bool| -> (f64, bool, bool) {
        let mut total = 0.0;
        let mut prev_cum = core;
        let mut growth_run = 0usize;
        let mut prev_inc = f64::NAN;
        let mut decay_run = 0usize;
        let mut last_ratio = f64::NAN;
        let mut inner = if toward_hi { b0 } else { a0 };
        for k in 0..BUDGET {
            let outer = next_boundary(inner, if toward_hi { hi } else { lo }, toward_hi, k);
            if outer == inner {
                // Endpoint reached exactly.
                return (total, false, false);
            }
            let inc = match if toward_hi { piece(inner, outer) } else { piece(outer, inner) } {
                Some(v) => v.max(0.0),
                None => return (total, false, true),
            };
            total += inc;
            let cum = core + total;
            if cum > prev_cum * GROWTH_FACTOR && inc > spec.abs_tol {
                growth_run += 1;
                if growth_run >= GROWTH_RUNS {
                    return (total, true, false);
                }
            } else {
                growth_run = 0;
            }
            if prev_inc.is_finite() && prev_inc > 0.0 {
                last_ratio = inc / prev_inc;
                if last_ratio < 0.9 {
                    decay_run += 1;
                } else {
                    decay_run = 0;
                }
            }
            if inc <= spec.abs_tol.max(loose.rel_tol * cum.abs()) {
                return (total, false, false);
            }
            prev_cum = cum;
            prev_inc = inc;
            inner = outer;
        }
        // Budget exhausted. Geometrically decaying increments extrapolate to
        // a finite limit; anything else stays indeterminate.
        if decay_run >= 3 && last_ratio.is_finite() && last_ratio < 0.9 {
            let tail = prev_inc * last_ratio / (1.0 - last_ratio);
            return (total + tail, false, false);
        }
        (total, false, true)
    };

    let (lo_mass, lo_div, lo_ind) = scan(false);
    if lo_div {
        return Convergence::Divergent(DivergesAt::LowerEnd);
    }
    let (hi_mass, hi_div, hi_ind) = scan(true);
    if hi_div {
        return Convergence::Divergent(DivergesAt::UpperEnd);
    }
    if lo_ind || hi_ind {
        return Convergence::Indeterminate;
    }
    Convergence::Finite(core + lo_mass + hi_mass)
}

fn anchors(lo: f64, hi: f64) -> (f64, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let w = hi - lo;
            (lo + 0.25 * w, hi - 0.25 * w)
        }
        (true, false) => {
            let m = lo.abs().max(1.0);
            (lo + 0.25 * m, lo + 1.25 * m)
        }
        (false, true) => {
            let m = hi.abs().max(1.0);
            (hi - 1.25 * m, hi - 0.25 * m)
        }
        (false, false) => (-1.0, 1.0),
    }
}

fn next_boundary(inner: f64, end: f64, toward_hi: bool, _k: usize) -> f64 {
    if end.is_finite() {
        // Shrink the margin to the endpoint geometrically.
        let margin = (end - inner).abs() / REFINE;
        let next = if toward_hi { end - margin } else { end + margin };
        if (next - end).abs() < f64::EPSILON * end.abs().max(1e-300) {
            end
        } else {
            next
        }
    } else {
        // Push outward geometrically.
        let step = inner.abs().max(1.0) * (REFINE - 1.0);
        if toward_hi {
            inner + step
        } else {
            inner - step
        }
    }
}
