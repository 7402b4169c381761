//! Brute-force minimisation of the conditional determinant over single-mode
//! Gaussian measurements, used as an independent check of the closed form in
//! [`TwoModeCovariance::optimal_conditional_determinant`].
//!
//! A pure Gaussian measurement on mode 2 has seed covariance
//! `sigma_m = R(phi) diag(lambda, 1/lambda) R(phi)^T`; the conditional
//! covariance of mode 1 is the Schur complement
//! `eps = A - C (B + sigma_m)^{-1} C^T`. The oracle scans a log grid in
//! `lambda` and a grid in `phi`, then refines locally. The homodyne limit
//! `lambda -> inf` is included analytically so boundary optima are matched
//! exactly rather than truncated at the grid edge.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCovariance;

/// Draw a random physical standard-form state by rejection:
/// `a, b` uniform in `[1, 10]`, `c, d` uniform within `+-sqrt(ab)`, retried
/// until the physicality gate accepts. Used by the oracle-equivalence checks.
pub fn random_physical_state(rng: &mut impl Rng) -> TwoModeCovariance {
    loop {
        let a: f64 = rng.gen_range(1.0..10.0);
        let b: f64 = rng.gen_range(1.0..10.0);
        let bound = (a * b).sqrt();
        let c = rng.gen_range(-bound..bound);
        let d = rng.gen_range(-bound..bound);
        if let Ok(sigma) = TwoModeCovariance::new(a, b, c, d) {
            return sigma;
        }
    }
}

/// Conditional determinant for the measurement `(ln lambda, phi)`.
fn det_eps(sigma: &TwoModeCovariance, ln_lambda: f64, phi: f64) -> f64 {
    let (a, b, c, d) = (sigma.a(), sigma.b(), sigma.c(), sigma.d());
    let lambda = ln_lambda.exp();
    let (sin, cos) = phi.sin_cos();
    // sigma_m = R diag(lambda, 1/lambda) R^T
    let m11 = b + lambda * cos * cos + sin * sin / lambda;
    let m22 = b + lambda * sin * sin + cos * cos / lambda;
    let m12 = (lambda - 1.0 / lambda) * sin * cos;
    // det(b I + sigma_m) = b^2 + b tr(sigma_m) + det(sigma_m); the naive
    // m11 m22 - m12^2 cancels catastrophically for extreme lambda
    let det_m = b * b + b * (lambda + 1.0 / lambda) + 1.0;
    let inv11 = m22 / det_m;
    let inv22 = m11 / det_m;
    let inv12 = -m12 / det_m;
    let e11 = a - c * c * inv11;
    let e22 = a - d * d * inv22;
    let e12 = -c * d * inv12;
    e11 * e22 - e12 * e12
}

/// Nelder-Mead polish for the narrow diagonal valleys the shrinking-grid
/// zoom converges into slowly.
fn nelder_mead(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    scale: f64,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut simplex = [
        start,
        [start[0] + scale, start[1]],
        [start[0], start[1] + scale],
    ];
    let mut values = simplex.map(&f);
    for _ in 0..max_iter {
        // order best -> worst
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let (b, m, w) = (order[0], order[1], order[2]);
        if (values[w] - values[b]).abs() <= 1e-15 * values[b].abs().max(1e-300) {
            break;
        }
        let centroid = [
            (simplex[b][0] + simplex[m][0]) / 2.0,
            (simplex[b][1] + simplex[m][1]) / 2.0,
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[w][0]),
            centroid[1] + (centroid[1] - simplex[w][1]),
        ];
        let fr = f(reflect);
        if fr < values[b] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[w][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[w][1]),
            ];
            let fe = f(expand);
            if fe < fr {
                simplex[w] = expand;
                values[w] = fe;
            } else {
                simplex[w] = reflect;
                values[w] = fr;
            }
        } else if fr < values[m] {
            simplex[w] = reflect;
            values[w] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[w][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[w][1] - centroid[1]),
            ];
            let fc = f(contract);
            if fc < values[w] {
                simplex[w] = contract;
                values[w] = fc;
            } else {
                for i in [m, w] {
                    simplex[i] = [
                        (simplex[i][0] + simplex[b][0]) / 2.0,
                        (simplex[i][1] + simplex[b][1]) / 2.0,
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best], values[best])
}

/// Homodyne limit `lambda -> inf` at angle `phi`:
/// `(B + sigma_m)^{-1} -> R diag(0, 1/b) R^T`.
fn det_eps_homodyne(sigma: &TwoModeCovariance, phi: f64) -> f64 {
    let (a, b, c, d) = (sigma.a(), sigma.b(), sigma.c(), sigma.d());
    let (sin, cos) = phi.sin_cos();
    let q11 = sin * sin / b;
    let q22 = cos * cos / b;
    let q12 = -sin * cos / b;
    let e11 = a - c * c * q11;
    let e22 = a - d * d * q22;
    let e12 = -c * d * q12;
    e11 * e22 - e12 * e12
}

/// Brute-force minimum of `det eps` over single-mode Gaussian measurements on
/// mode 2, scanning `lambda` over a log grid in `[1e-3, 1e3]` and
/// `phi in [0, pi)` with `grid_density` points per axis, followed by local
/// refinement. Refinement is allowed to wander outside the initial bracket so
/// that near-homodyne optima are not pinned to the grid edge.
pub fn measurement_oracle(sigma: &TwoModeCovariance, grid_density: usize) -> Result<f64> {
    if grid_density < 2 {
        return Err(Error::Domain {
            name: "grid_density",
            value: grid_density as f64,
            constraint: ">= 2",
        });
    }
    if sigma.is_uncorrelated() {
        return Ok(sigma.a() * sigma.a());
    }

    let n = grid_density;
    let ln_lo = -3.0 * std::f64::consts::LN_10;
    let ln_hi = 3.0 * std::f64::consts::LN_10;
    let pi = std::f64::consts::PI;

    let mut best = f64::INFINITY;
    let mut best_ln = 0.0;
    let mut best_phi = 0.0;
    for i in 0..n {
        let ln_lambda = ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = pi * j as f64 / n as f64;
            let v = det_eps(sigma, ln_lambda, phi);
            if v < best {
                best = v;
                best_ln = ln_lambda;
                best_phi = phi;
            }
        }
    }

    // Local refinement: re-grid a shrinking window around the incumbent; if
    // the incumbent sits on the window boundary, grow the window instead.
    let mut half_ln = (ln_hi - ln_lo) / (n - 1) as f64;
    let mut half_phi = pi / n as f64;
    for _ in 0..120 {
        let sub = 10i32;
        let mut improved_edge = false;
        for i in -sub..=sub {
            let ln_lambda = best_ln + half_ln * i as f64 / sub as f64;
            for j in -sub..=sub {
                let phi = best_phi + half_phi * j as f64 / sub as f64;
                let v = det_eps(sigma, ln_lambda, phi);
                if v < best {
                    best = v;
                    best_ln = ln_lambda;
                    best_phi = phi;
                    improved_edge = i.abs() == sub || j.abs() == sub;
                }
            }
        }
        if improved_edge {
            half_ln *= 2.0;
            half_phi = (half_phi * 2.0).min(pi);
        } else {
            half_ln *= 0.5;
            half_phi *= 0.5;
        }
        if half_ln < 1e-10 && half_phi < 1e-10 {
            break;
        }
        // lambda has run away: the optimum is the homodyne boundary
        if best_ln.abs() > 60.0 {
            break;
        }
    }
    // the shrinking grid creeps slowly along narrow diagonal valleys; polish
    // with Nelder-Mead from the incumbent at two scales
    if best_ln.abs() <= 60.0 {
        for scale in [0.1, 1e-4] {
            let (point, v) = nelder_mead(
                |p| det_eps(sigma, p[0], p[1]),
                [best_ln, best_phi],
                scale,
                600,
            );
            if v < best {
                best = v;
                best_ln = point[0];
                best_phi = point[1];
            }
        }
    }

    // Homodyne boundary candidates, refined over phi alone.
    let mut h_best = f64::INFINITY;
    let mut h_phi = 0.0;
    for j in 0..(4 * n) {
        let phi = pi * j as f64 / (4 * n) as f64;
        let v = det_eps_homodyne(sigma, phi);
        if v < h_best {
            h_best = v;
            h_phi = phi;
        }
    }
    let mut half = pi / (4 * n) as f64;
    for _ in 0..60 {
        for i in -8i32..=8 {
            let phi = h_phi + half * i as f64 / 8.0;
            let v = det_eps_homodyne(sigma, phi);
            if v < h_best {
                h_best = v;
                h_phi = phi;
            }
        }
        half *= 0.4;
        if half < 1e-12 {
            break;
        }
    }

    Ok(best.min(h_best))
}
