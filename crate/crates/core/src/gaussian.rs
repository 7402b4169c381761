//! Entropic correlation measures for two-mode Gaussian states in standard form.
//!
//! States are described by the covariance matrix diag-block parameters
//! `(a, b, c, d)`, in the unit-vacuum convention (vacuum has `a = b = 1`,
//! `c = d = 0`). Quantum discord, classical correlations and mutual
//! information are all evaluated in nats.

use crate::error::{Error, Result};

/// Tolerance for the physicality gate `nu_minus >= 1`.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// Cross covariances below this magnitude are treated as exactly zero, which
/// short-circuits the measurement optimisation to the product-state result
/// and avoids the `(b^2 - 1)^2 = 0` singularity path.
pub const UNCORRELATED_TOL: f64 = 1e-14;

/// Thermal-state entropy kernel
/// `f(x) = ((x+1)/2) ln((x+1)/2) - ((x-1)/2) ln((x-1)/2)`.
///
/// `f(1) = 0` and `f` is strictly increasing for `x >= 1`. Arguments a hair
/// below 1 (within 1e-8) are clamped; anything lower is a domain error and
/// signals an unphysical symplectic eigenvalue upstream.
pub fn entropy_f(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 1.0 - 1e-8 {
        return Err(Error::Domain {
            name: "x",
            value: x,
            constraint: "x >= 1 (entropy kernel argument)",
        });
    }
    let x = x.max(1.0);
    let p = (x + 1.0) / 2.0;
    let m = (x - 1.0) / 2.0;
    // m * ln m -> 0 as x -> 1
    let low = if m > 0.0 { m * m.ln() } else { 0.0 };
    Ok(p * p.ln() - low)
}

/// Symplectic invariants of a standard-form state and of its partial
/// transpose. `nu_minus >= 1` is the physicality condition; `nu_tilde_minus < 1`
/// witnesses entanglement (PPT criterion).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub nu_tilde_minus: f64,
}

/// Decomposition of the correlations carried by a two-mode state, in nats.
///
/// `total = quantum + classical` holds bit-exactly: both shares are built from
/// the same optimal conditional determinant and `total` is stored as their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationBreakdown {
    pub quantum: f64,
    pub classical: f64,
    pub total: f64,
    pub entangled: bool,
    /// `det eps` at the optimal Gaussian measurement on mode 2.
    pub cond_det: f64,
}

impl CorrelationBreakdown {
    /// Rescale the three correlation scalars by `factor`, preserving additivity.
    pub(crate) fn scaled(self, factor: f64) -> Self {
        CorrelationBreakdown {
            quantum: self.quantum * factor,
            classical: self.classical * factor,
            total: self.total * factor,
            ..self
        }
    }
}

/// Two-mode covariance matrix in standard form,
///
/// ```text
///     [ a 0 c 0 ]
///     [ 0 a 0 d ]
///     [ c 0 b 0 ]
///     [ 0 d 0 b ]
/// ```
///
/// Construction enforces `a, b >= 1` and the physicality gate
/// `nu_minus >= 1 - 1e-12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl TwoModeCovariance {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !v.is_finite() || v < 1.0 - PHYSICALITY_TOL {
                return Err(Error::Domain {
                    name,
                    value: v,
                    constraint: ">= 1 (unit vacuum convention)",
                });
            }
        }
        for (name, v) in [("c", c), ("d", d)] {
            if !v.is_finite() {
                return Err(Error::Domain {
                    name,
                    value: v,
                    constraint: "finite",
                });
            }
        }
        let sigma = TwoModeCovariance { a, b, c, d };
        let spectrum = sigma.symplectic_spectrum()?;
        if spectrum.nu_minus < 1.0 - PHYSICALITY_TOL {
            return Err(Error::Unphysical {
                nu_minus: spectrum.nu_minus,
            });
        }
        Ok(sigma)
    }

    pub fn vacuum() -> Self {
        TwoModeCovariance {
            a: 1.0,
            b: 1.0,
            c: 0.0,
            d: 0.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    /// The 4x4 realization in the `(q1, p1, q2, p2)` quadrature ordering.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        [
            [self.a, 0.0, self.c, 0.0],
            [0.0, self.a, 0.0, self.d],
            [self.c, 0.0, self.b, 0.0],
            [0.0, self.d, 0.0, self.b],
        ]
    }

    pub fn det(&self) -> f64 {
        (self.a * self.b - self.c * self.c) * (self.a * self.b - self.d * self.d)
    }

    pub fn is_uncorrelated(&self) -> bool {
        self.c.abs() < UNCORRELATED_TOL && self.d.abs() < UNCORRELATED_TOL
    }

    /// Symplectic eigenvalues `nu_plus >= nu_minus` from
    /// `nu^2 = (Delta -+ sqrt(Delta^2 - 4 det sigma)) / 2` with
    /// `Delta = a^2 + b^2 + 2cd`, plus the partial-transpose eigenvalue
    /// `nu_tilde_minus` (same formula with `Delta~ = a^2 + b^2 - 2cd`).
    pub fn symplectic_spectrum(&self) -> Result<SymplecticSpectrum> {
        let det = self.det();
        let delta = self.a * self.a + self.b * self.b + 2.0 * self.c * self.d;
        let delta_t = self.a * self.a + self.b * self.b - 2.0 * self.c * self.d;
        let nu = |delta: f64| -> Result<(f64, f64)> {
            let disc = delta * delta - 4.0 * det;
            if disc < -1e-9 * delta.powi(2).max(1.0) {
                return Err(Error::NumericDegeneracy { discriminant: disc });
            }
            let root = disc.max(0.0).sqrt();
            let plus = ((delta + root) / 2.0).max(0.0).sqrt();
            let minus = ((delta - root) / 2.0).max(0.0).sqrt();
            Ok((plus, minus))
        };
        let (nu_plus, nu_minus) = nu(delta)?;
        let (_, nu_tilde_minus) = nu(delta_t)?;
        Ok(SymplecticSpectrum {
            nu_plus,
            nu_minus,
            nu_tilde_minus,
        })
    }

    /// Mutual information `T = f(a) + f(b) - f(nu_plus) - f(nu_minus)`.
    pub fn mutual_information(&self) -> Result<f64> {
        let s = self.symplectic_spectrum()?;
        Ok(entropy_f(self.a)? + entropy_f(self.b)? - entropy_f(s.nu_plus)? - entropy_f(s.nu_minus)?)
    }

    /// Minimum over single-mode Gaussian measurements on mode 2 of the
    /// determinant of the conditional covariance matrix of mode 1.
    ///
    /// Closed form in the invariants `I1 = a^2`, `I2 = b^2`, `I3 = cd`,
    /// `I4 = det sigma`; the two branches correspond to heterodyne-like and
    /// homodyne-like optima. Cross-validated against [`measurement_oracle`]
    /// in the test suite.
    ///
    /// [`measurement_oracle`]: crate::measurement::measurement_oracle
    pub fn optimal_conditional_determinant(&self) -> Result<f64> {
        if self.is_uncorrelated() {
            // No measurement on an uncorrelated mode 2 reveals anything.
            return Ok(self.a * self.a);
        }
        if self.b - 1.0 < PHYSICALITY_TOL {
            return Err(Error::InconsistentState);
        }
        let i1 = self.a * self.a;
        let i2 = self.b * self.b;
        let i3 = self.c * self.d;
        let i4 = self.det();
        let det_eps = if (i4 - i1 * i2).powi(2) <= (1.0 + i2) * i3 * i3 * (i1 + i4) {
            let radicand = (i3 * i3 + (i2 - 1.0) * (i4 - i1)).max(0.0);
            (2.0 * i3 * i3
                + (i2 - 1.0) * (i4 - i1)
                + 2.0 * i3.abs() * radicand.sqrt())
                / ((i2 - 1.0) * (i2 - 1.0))
        } else {
            let s = i1 * i2 - i3 * i3 + i4;
            let radicand = (s * s - 4.0 * i1 * i2 * i4).max(0.0);
            (s - radicand.sqrt()) / (2.0 * i2)
        };
        if det_eps < 1.0 - 1e-9 {
            return Err(Error::NumericDegeneracy {
                discriminant: det_eps - 1.0,
            });
        }
        Ok(det_eps.max(1.0))
    }

    /// Full correlation breakdown:
    /// `Q = f(b) - f(nu+) - f(nu-) + f(sqrt(det eps))`,
    /// `C = f(a) - f(sqrt(det eps))`, `T = Q + C`.
    pub fn correlations(&self) -> Result<CorrelationBreakdown> {
        let s = self.symplectic_spectrum()?;
        let entangled = s.nu_tilde_minus < 1.0;
        if self.is_uncorrelated() {
            return Ok(CorrelationBreakdown {
                quantum: 0.0,
                classical: 0.0,
                total: 0.0,
                entangled,
                cond_det: self.a * self.a,
            });
        }
        let cond_det = self.optimal_conditional_determinant()?;
        let f_cond = entropy_f(cond_det.sqrt())?;
        let quantum =
            entropy_f(self.b)? - entropy_f(s.nu_plus)? - entropy_f(s.nu_minus)? + f_cond;
        let classical = entropy_f(self.a)? - f_cond;
        let clamp = |x: f64| if x < 0.0 && x > -PHYSICALITY_TOL { 0.0 } else { x };
        let quantum = clamp(quantum);
        let classical = clamp(classical);
        Ok(CorrelationBreakdown {
            quantum,
            classical,
            total: quantum + classical,
            entangled,
            cond_det,
        })
    }
}
