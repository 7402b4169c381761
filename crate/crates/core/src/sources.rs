//! Covariance-matrix constructors for the two light sources used in ghost
//! imaging: a 50:50-split thermal beam and SPDC-entangled beams, at the level
//! of individual speckle pairs and in the coarse-grained effective two-mode
//! description (cross block scaled by `1/sqrt(R)`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CorrelationBreakdown, TwoModeCovariance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceFamily {
    /// Thermal beam split on a balanced beam splitter.
    #[serde(rename = "thermal", alias = "thermal_split")]
    ThermalSplit,
    /// Two-mode squeezed vacuum from spontaneous parametric down-conversion.
    #[serde(rename = "spdc")]
    Spdc,
}

impl std::fmt::Display for SourceFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SourceFamily::ThermalSplit => write!(f, "thermal"),
            SourceFamily::Spdc => write!(f, "spdc"),
        }
    }
}

impl std::str::FromStr for SourceFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "thermal" | "thermal_split" | "thermal-split" => Ok(SourceFamily::ThermalSplit),
            "spdc" | "entangled" => Ok(SourceFamily::Spdc),
            other => Err(format!("unknown source family '{other}' (expected thermal|spdc)")),
        }
    }
}

/// Source parameters: `mu` photons per mode per beam, `M` speckles per pixel,
/// `R` pixels. The illumination `I = M mu` is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub family: SourceFamily,
    pub mu: f64,
    pub speckles_per_pixel: u32,
    pub pixel_count: u32,
}

impl SourceSpec {
    pub fn new(family: SourceFamily, mu: f64, speckles_per_pixel: u32, pixel_count: u32) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Domain {
                name: "mu",
                value: mu,
                constraint: ">= 0",
            });
        }
        if speckles_per_pixel < 1 {
            return Err(Error::Domain {
                name: "speckles_per_pixel",
                value: speckles_per_pixel as f64,
                constraint: ">= 1",
            });
        }
        if pixel_count < 1 {
            return Err(Error::Domain {
                name: "pixel_count",
                value: pixel_count as f64,
                constraint: ">= 1",
            });
        }
        Ok(SourceSpec {
            family,
            mu,
            speckles_per_pixel,
            pixel_count,
        })
    }

    pub fn illumination(&self) -> f64 {
        self.speckles_per_pixel as f64 * self.mu
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            constraint: ">= 0",
        });
    }
    Ok(())
}

/// Covariance matrix of one correlated speckle pair.
///
/// Thermal split: `(a, b, c, d) = (1+2mu, 1+2mu, 2mu, 2mu)`.
/// SPDC: `(1+2mu, 1+2mu, 2 sqrt(mu(mu+1)), -2 sqrt(mu(mu+1)))`, a pure
/// two-mode squeezed vacuum (`det sigma = 1`).
pub fn microscopic_pair(family: SourceFamily, mu: f64) -> Result<TwoModeCovariance> {
    coarse_grained(family, mu, 1)
}

/// Effective coarse-grained covariance matrix for a pixel against the bucket:
/// the cross block of [`microscopic_pair`] scaled by `1/sqrt(R)`.
///
/// The SPDC `d` entry keeps the two-mode-squeezed sign, `d = -c`; both
/// families are physical for every `mu >= 0`, `R >= 1`.
pub fn coarse_grained(family: SourceFamily, mu: f64, pixel_count: u32) -> Result<TwoModeCovariance> {
    check_mu(mu)?;
    if pixel_count < 1 {
        return Err(Error::Domain {
            name: "pixel_count",
            value: pixel_count as f64,
            constraint: ">= 1",
        });
    }
    let diag = 1.0 + 2.0 * mu;
    let scale = (pixel_count as f64).sqrt();
    match family {
        SourceFamily::ThermalSplit => {
            let c = 2.0 * mu / scale;
            TwoModeCovariance::new(diag, diag, c, c)
        }
        SourceFamily::Spdc => {
            let c = 2.0 * (mu * (mu + 1.0)).sqrt() / scale;
            TwoModeCovariance::new(diag, diag, c, -c)
        }
    }
}

/// Detector areas with their overlap; all in the same (arbitrary) area unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaPair {
    pub area1: f64,
    pub area2: f64,
    pub overlap: f64,
}

impl AreaPair {
    pub fn new(area1: f64, area2: f64, overlap: f64) -> Result<Self> {
        for (name, v) in [("area1", area1), ("area2", area2)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain {
                    name,
                    value: v,
                    constraint: "> 0",
                });
            }
        }
        if !(0.0..=area1.min(area2) * (1.0 + 1e-12)).contains(&overlap) {
            return Err(Error::Domain {
                name: "overlap",
                value: overlap,
                constraint: "0 <= overlap <= min(area1, area2)",
            });
        }
        Ok(AreaPair {
            area1,
            area2,
            overlap,
        })
    }
}

/// Cross-correlation scaling between effective area modes,
/// `A_overlap / sqrt(A1 A2)`; multiplies the `c`, `d` entries of the
/// matched-area covariance.
pub fn overlap_factor(areas: &AreaPair) -> f64 {
    areas.overlap / (areas.area1 * areas.area2).sqrt()
}

/// Covariance matrix of the two effective area modes: the matched-area
/// cross block scaled by [`overlap_factor`]. Scaling down the cross block
/// keeps the matrix physical.
pub fn overlap_scaled(
    matched: &TwoModeCovariance,
    areas: &AreaPair,
) -> Result<TwoModeCovariance> {
    let f = overlap_factor(areas);
    TwoModeCovariance::new(
        matched.a(),
        matched.b(),
        matched.c() * f,
        matched.d() * f,
    )
}

/// The `sqrt(R/2)` normalisation applied to coarse-grained correlations.
pub fn normalization_factor(pixel_count: u32) -> f64 {
    (pixel_count as f64 / 2.0).sqrt()
}

/// Correlations of `sigma` with `Q`, `C`, `T` multiplied by `sqrt(R/2)`.
/// The covariance matrix itself is never rescaled (it must stay physical).
pub fn normalized_correlations(
    sigma: &TwoModeCovariance,
    pixel_count: u32,
) -> Result<CorrelationBreakdown> {
    if pixel_count < 1 {
        return Err(Error::Domain {
            name: "pixel_count",
            value: pixel_count as f64,
            constraint: ">= 1",
        });
    }
    Ok(sigma
        .correlations()?
        .scaled(normalization_factor(pixel_count)))
}

/// Normalised total correlations `T~` of the coarse-grained source; the
/// quantity the SNR tracks quasi-linearly.
pub fn normalized_total(family: SourceFamily, mu: f64, pixel_count: u32) -> Result<f64> {
    if mu == 0.0 {
        return Ok(0.0);
    }
    let sigma = coarse_grained(family, mu, pixel_count)?;
    Ok(sigma.mutual_information()? * normalization_factor(pixel_count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn microscopic_thermal() {
        let s = microscopic_pair(SourceFamily::ThermalSplit, 1.0).unwrap();
        assert_eq!((s.a(), s.b(), s.c(), s.d()), (3.0, 3.0, 2.0, 2.0));
    }

    #[test]
    fn microscopic_vacuum() {
        let s = microscopic_pair(SourceFamily::ThermalSplit, 0.0).unwrap();
        assert_eq!((s.a(), s.b(), s.c(), s.d()), (1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn microscopic_spdc_is_pure() {
        let s = microscopic_pair(SourceFamily::Spdc, 1.0).unwrap();
        let c = 8.0f64.sqrt();
        assert!((s.c() - c).abs() < 1e-15);
        assert!((s.d() + c).abs() < 1e-15);
        assert!((s.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn microscopic_rejects_negative_mu() {
        assert!(microscopic_pair(SourceFamily::Spdc, -0.1).is_err());
    }

    #[test]
    fn coarse_thermal_r4() {
        let s = coarse_grained(SourceFamily::ThermalSplit, 1.0, 4).unwrap();
        assert_eq!((s.a(), s.b(), s.c(), s.d()), (3.0, 3.0, 1.0, 1.0));
    }

    #[test]
    fn coarse_r1_equals_microscopic() {
        for family in [SourceFamily::ThermalSplit, SourceFamily::Spdc] {
            let a = microscopic_pair(family, 0.7).unwrap();
            let b = coarse_grained(family, 0.7, 1).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn spdc_entanglement_boundary() {
        // entangled iff R < 1 + 1/mu
        let s = coarse_grained(SourceFamily::Spdc, 1.0, 4).unwrap();
        let spect = s.symplectic_spectrum().unwrap();
        assert!((spect.nu_tilde_minus - (3.0 - 2.0f64.sqrt() * 2.0)).abs() > 0.0);
        assert!(!s.correlations().unwrap().entangled, "R=4 > 2 separable");
        let micro = microscopic_pair(SourceFamily::Spdc, 1.0).unwrap();
        assert!(micro.correlations().unwrap().entangled);
        for (mu, r, expect) in [
            (0.1, 4u32, true),
            (0.1, 100, false),
            (10.0, 1, true),
            (10.0, 4, false),
        ] {
            let sigma = coarse_grained(SourceFamily::Spdc, mu, r).unwrap();
            let got = sigma.correlations().unwrap().entangled;
            assert_eq!(got, expect, "mu={mu} r={r}");
            assert_eq!(expect, (r as f64) < 1.0 + 1.0 / mu);
        }
    }

    #[test]
    fn thermal_always_separable() {
        for mu in [0.0, 0.1, 1.0, 10.0, 100.0, 1e6] {
            for r in [1u32, 4, 100, 10_000] {
                let sigma = coarse_grained(SourceFamily::ThermalSplit, mu, r).unwrap();
                let spect = sigma.symplectic_spectrum().unwrap();
                assert!(spect.nu_tilde_minus >= 1.0, "mu={mu} r={r}");
            }
        }
    }

    #[test]
    fn overlap_factor_cases() {
        let full = AreaPair::new(2.0, 2.0, 2.0).unwrap();
        assert_eq!(overlap_factor(&full), 1.0);
        let disjoint = AreaPair::new(2.0, 3.0, 0.0).unwrap();
        assert_eq!(overlap_factor(&disjoint), 0.0);
        let half = AreaPair::new(2.0, 2.0, 1.0).unwrap();
        assert_eq!(overlap_factor(&half), 0.5);
        // pixel of area A/4 fully inside a bucket of area A
        let pixel_in_bucket = AreaPair::new(1.0, 4.0, 1.0).unwrap();
        assert_eq!(overlap_factor(&pixel_in_bucket), 0.5);
        assert!(AreaPair::new(-1.0, 1.0, 0.0).is_err());
        assert!(AreaPair::new(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn overlap_scaling_of_covariance() {
        let matched = microscopic_pair(SourceFamily::ThermalSplit, 1.0).unwrap();
        let full = overlap_scaled(&matched, &AreaPair::new(2.0, 2.0, 2.0).unwrap()).unwrap();
        assert_eq!(full, matched);
        let disjoint = overlap_scaled(&matched, &AreaPair::new(2.0, 3.0, 0.0).unwrap()).unwrap();
        assert!(disjoint.is_uncorrelated());
        // pixel of a quarter the bucket area: half the cross correlations
        let quarter = overlap_scaled(&matched, &AreaPair::new(1.0, 4.0, 1.0).unwrap()).unwrap();
        assert_eq!((quarter.c(), quarter.d()), (1.0, 1.0));
    }

    #[test]
    fn normalization_trivial_at_r2() {
        let sigma = coarse_grained(SourceFamily::ThermalSplit, 1.0, 2).unwrap();
        let plain = sigma.correlations().unwrap();
        let scaled = normalized_correlations(&sigma, 2).unwrap();
        assert_eq!(plain, scaled);
        assert!((normalization_factor(100) - 50.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn thermal_high_illumination_limit() {
        // T~ -> sqrt(R/2) ln(R/(R-1)) as mu -> inf
        let r = 100u32;
        let t = normalized_total(SourceFamily::ThermalSplit, 1e6, r).unwrap();
        let limit = normalization_factor(r) * (r as f64 / (r as f64 - 1.0)).ln();
        assert!((t - limit).abs() / limit < 1e-4, "t={t} limit={limit}");
    }

    #[test]
    fn spdc_more_correlated_than_thermal() {
        for mu in [0.1, 1.0, 10.0, 100.0] {
            let t_th = normalized_total(SourceFamily::ThermalSplit, mu, 100).unwrap();
            let t_sp = normalized_total(SourceFamily::Spdc, mu, 100).unwrap();
            assert!(t_sp > t_th, "mu={mu}: {t_sp} <= {t_th}");
        }
    }

    #[test]
    fn total_monotone_in_mu() {
        let mut prev = -1.0;
        for i in 0..40 {
            let mu = 10f64.powf(-2.0 + 4.0 * i as f64 / 39.0);
            let t = microscopic_pair(SourceFamily::ThermalSplit, mu)
                .unwrap()
                .mutual_information()
                .unwrap();
            assert!(t > prev, "mu={mu}");
            prev = t;
        }
    }

    #[test]
    fn crossover_sign_matches_illumination_regime() {
        // sign(Q - C) = sign(1 - mu) for split thermal pairs
        for (mu, expect_q_dominant) in [(0.1, true), (0.5, true), (2.0, false), (10.0, false)] {
            let b = microscopic_pair(SourceFamily::ThermalSplit, mu)
                .unwrap()
                .correlations()
                .unwrap();
            assert_eq!(b.quantum > b.classical, expect_q_dominant, "mu={mu}");
        }
        let b = microscopic_pair(SourceFamily::ThermalSplit, 1.0)
            .unwrap()
            .correlations()
            .unwrap();
        assert!((b.quantum - b.classical).abs() <= 1e-9);
    }
}
