//! Closed-form-versus-quadrature identity battery.
//!
//! Each check pits a closed form used by the criteria layer against an
//! independent quadrature of the defining integral. The battery is what the
//! `identities` subcommand runs; tolerances can be scaled but default to the
//! values the checks are designed to meet.

use serde::Serialize;

use crate::criteria::fractional_section_cost;
use crate::noise::LevyMeasure;
use crate::numerics::{integrate, Domain, QuadratureSpec};

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub tolerance: f64,
    pub max_rel_error: f64,
    pub pass: bool,
}

fn check(name: String, tolerance: f64, max_rel_error: f64) -> IdentityCheck {
    IdentityCheck { name, tolerance, max_rel_error, pass: max_rel_error <= tolerance }
}

/// Quadrature of `f` against a symmetric stable density with unit
/// coefficients on both sides.
fn stable_quadrature(alpha: f64, f: impl Fn(f64) -> f64 + Copy, lo: f64) -> f64 {
    let spec = QuadratureSpec::with_singularities(&[0.0, lo]);
    2.0 * integrate(
        move |x: f64| f(x) * x.powf(-alpha - 1.0),
        Domain::upper_tail(lo),
        &spec,
    )
    .map(|r| r.value)
    .unwrap_or(f64::NAN)
}

/// Run the battery; `tol_scale` multiplies every default tolerance.
pub fn run_battery(tol_scale: f64) -> Vec<IdentityCheck> {
    let mut out = Vec::new();

    // ξ closed form: quadrature of (|ux|² ∧ |ux|) against the density equals
    // C·|u|^α with C = (c1+c2)(1/(α-1) + 1/(2-α)).
    {
        let mut worst = 0.0f64;
        for alpha in [1.2f64, 1.5, 1.9] {
            let c = 2.0 * (1.0 / (alpha - 1.0) + 1.0 / (2.0 - alpha));
            for u in [0.1f64, 1.0, 10.0] {
                let quad = stable_quadrature(alpha, |x| (u * x).min(u * u * x * x), 0.0);
                let closed = c * u.powf(alpha);
                worst = worst.max(((quad - closed) / closed).abs());
            }
        }
        out.push(check("stable xi closed form".into(), 1e-6 * tol_scale, worst));
    }

    // Stable moment ratio is the constant (2-α)/(α-1).
    {
        let mut worst = 0.0f64;
        for alpha in [1.2, 1.5, 1.9] {
            let m = LevyMeasure::stable(1.0, 1.0, alpha).unwrap();
            let k0 = (2.0 - alpha) / (alpha - 1.0);
            for i in 0..20 {
                let u = 1e-2 * (1e4f64).powf(i as f64 / 19.0);
                let r = m.moment_ratio(u).unwrap();
                worst = worst.max(((r - k0) / k0).abs());
            }
        }
        out.push(check("stable ratio constant".into(), 1e-6 * tol_scale, worst));
    }

    // Tail identities against tail-mass quadrature.
    {
        let mut worst = 0.0f64;
        let stable = LevyMeasure::stable(1.0, 1.0, 1.5).unwrap();
        let tempered = LevyMeasure::tempered_stable(1.0, 1.0, 1.5, 1.0, 1.0).unwrap();
        for m in [stable, tempered] {
            for i in 0..12 {
                let u = 0.01 * (10.0f64).powf(3.0 * i as f64 / 11.0);
                let outer = QuadratureSpec {
                    rel_tol: 1e-7,
                    singular_points: vec![0.0, u],
                    ..QuadratureSpec::default()
                };
                let g = |r: f64| m.tail_mass(r).unwrap();
                let tfm_q = u * g(u)
                    + integrate(g, Domain::upper_tail(u), &outer)
                        .map(|r| r.value)
                        .unwrap_or(f64::NAN);
                let tfm = m.tail_first_moment(u).unwrap();
                worst = worst.max(((tfm - tfm_q) / tfm_q).abs());
                let tsm_q = integrate(|r| 2.0 * r * g(r), Domain::new(0.0, u), &outer)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
                    - u * u * g(u);
                let tsm = m.truncated_second_moment(u).unwrap();
                worst = worst.max(((tsm - tsm_q) / tsm_q).abs());
            }
        }
        out.push(check("tail moment identities".into(), 1e-5 * tol_scale, worst));
    }

    // Fractional section cost: ∫(|f'x|² ∧ |f'x|) ds = |x|^{1/(1-α)}·S(α).
    {
        let mut worst = 0.0f64;
        for alpha in [0.1f64, 0.25, 0.4] {
            for x in [0.5f64, 1.0, 2.0] {
                let split = (alpha * x).powf(1.0 / (1.0 - alpha));
                let spec = QuadratureSpec::with_singularities(&[0.0, split]);
                let quad = integrate(
                    |s: f64| {
                        let z = x * alpha * s.powf(alpha - 1.0);
                        z.min(z * z)
                    },
                    Domain::upper_tail(0.0),
                    &spec,
                )
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
                let closed = x.powf(1.0 / (1.0 - alpha)) * fractional_section_cost(alpha);
                worst = worst.max(((quad - closed) / closed).abs());
            }
        }
        out.push(check("fractional section cost".into(), 1e-6 * tol_scale, worst));
    }

    // Karamata limit of the moment ratio for a regularly varying tail.
    {
        let m = LevyMeasure::stable(1.0, 1.0, 1.5).unwrap();
        let beta = -1.5f64;
        let limit = (1.0 - 1.0 / (beta + 1.0)) / (2.0 / (beta + 2.0) - 1.0);
        let r = m.moment_ratio(1e4).unwrap();
        out.push(check(
            "karamata ratio limit".into(),
            1e-2 * tol_scale,
            ((r - limit) / limit).abs(),
        ));
    }

    // Tempered small-u tail asymptotics: u^β·g(u) → (d1+d2)/β.
    {
        let m = LevyMeasure::tempered_stable(1.0, 1.0, 1.5, 1.0, 1.0).unwrap();
        let u: f64 = 1e-4;
        let lhs = u.powf(1.5) * m.tail_mass(u).unwrap();
        let rhs = 2.0 / 1.5;
        out.push(check(
            "tempered tail asymptotics".into(),
            1e-2 * tol_scale,
            ((lhs - rhs) / rhs).abs(),
        ));
    }

    // Tempered ξ asymptotics: ξ(u)/u² → (d1·l1^{β-2} + d2·l2^{β-2})·Γ(2-β)
    // as u → 0. The Γ value comes from its own quadrature.
    {
        let mut worst = 0.0f64;
        for beta in [1.2, 1.5] {
            let m = LevyMeasure::tempered_stable(1.0, 1.0, beta, 1.0, 1.0).unwrap();
            let gamma_quad = integrate(
                |t: f64| t.powf(1.0 - beta) * (-t).exp(),
                Domain::upper_tail(0.0),
                &QuadratureSpec::with_singularities(&[0.0]),
            )
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
            let c2 = 2.0 * gamma_quad;
            let u = 1e-3;
            let lhs = m.xi(u) / (u * u);
            worst = worst.max(((lhs - c2) / c2).abs());
        }
        out.push(check("tempered xi small-u asymptotics".into(), 1e-2 * tol_scale, worst));
    }

    // Tempered ξ asymptotics at the other end: ξ(u)/u^β approaches the
    // stable coefficient (d1+d2)·((β-1)^{-1} + (2-β)^{-1}) as u → ∞. The
    // approach is O(u^{1-β}), so the evaluation point moves out with β.
    {
        let mut worst = 0.0f64;
        for (beta, u) in [(1.2f64, 1e11f64), (1.5, 1e6)] {
            let m = LevyMeasure::tempered_stable(1.0, 1.0, beta, 1.0, 1.0).unwrap();
            let c1 = 2.0 * (1.0 / (beta - 1.0) + 1.0 / (2.0 - beta));
            let lhs = m.xi(u) / u.powf(beta);
            worst = worst.max(((lhs - c1) / c1).abs());
        }
        out.push(check("tempered xi large-u asymptotics".into(), 1e-2 * tol_scale, worst));
    }

    out
}
