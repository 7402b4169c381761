//! Analytic signal-to-noise models for lensed ghost imaging with the
//! covariance imaging function, for thermal-split and SPDC-entangled sources,
//! together with their high-illumination asymptotes and the asymptotic
//! SNR-to-total-correlations ratio.

use crate::error::{Error, Result};
use crate::sources::SourceFamily;

fn check_params(mu: f64, speckles: u32, pixels: u32) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            constraint: ">= 0",
        });
    }
    if speckles < 1 {
        return Err(Error::Domain {
            name: "speckles_per_pixel",
            value: speckles as f64,
            constraint: ">= 1",
        });
    }
    if pixels < 1 {
        return Err(Error::Domain {
            name: "pixel_count",
            value: pixels as f64,
            constraint: ">= 1",
        });
    }
    Ok(())
}

/// `SNR = mu sqrt(M) / sqrt(mu^2 (2MR + M + 6) + 4 mu (MR + 1) + 2MR + 1)`.
pub fn snr_thermal(mu: f64, speckles: u32, pixels: u32) -> Result<f64> {
    check_params(mu, speckles, pixels)?;
    let m = speckles as f64;
    let r = pixels as f64;
    let den2 = mu * mu * (2.0 * m * r + m + 6.0) + 4.0 * mu * (m * r + 1.0) + 2.0 * m * r + 1.0;
    Ok(mu * m.sqrt() / den2.sqrt())
}

/// `SNR = sqrt(mu (mu+1) M) / sqrt(mu^2 (2MR + M + 6) + mu (2MR + M + 6) + 1)`.
pub fn snr_entangled(mu: f64, speckles: u32, pixels: u32) -> Result<f64> {
    check_params(mu, speckles, pixels)?;
    let m = speckles as f64;
    let r = pixels as f64;
    let k = 2.0 * m * r + m + 6.0;
    let den2 = mu * mu * k + mu * k + 1.0;
    Ok((mu * (mu + 1.0) * m).sqrt() / den2.sqrt())
}

pub fn snr(family: SourceFamily, mu: f64, speckles: u32, pixels: u32) -> Result<f64> {
    match family {
        SourceFamily::ThermalSplit => snr_thermal(mu, speckles, pixels),
        SourceFamily::Spdc => snr_entangled(mu, speckles, pixels),
    }
}

/// Common high-illumination limit of both sources,
/// `SNR -> sqrt(M / (6 + M (2R + 1)))` as `mu -> inf`.
pub fn snr_high_illumination_limit(speckles: u32, pixels: u32) -> f64 {
    let m = speckles as f64;
    let r = pixels as f64;
    (m / (6.0 + m * (2.0 * r + 1.0))).sqrt()
}

/// Asymptotic ratio of SNR to normalised total correlations,
/// `sqrt(1/(2R+1)) / (sqrt(R/2) ln(R/(R-1)))`, which tends to 1 for large `R`.
/// The numerator carries the additional large-`M` limit of the SNR.
pub fn ratio_limit(pixels: u32) -> Result<f64> {
    if pixels < 2 {
        return Err(Error::Domain {
            name: "pixel_count",
            value: pixels as f64,
            constraint: ">= 2 (ln(R/(R-1)) branch)",
        });
    }
    let r = pixels as f64;
    let num = (1.0 / (2.0 * r + 1.0)).sqrt();
    let den = (r / 2.0).sqrt() * (r / (r - 1.0)).ln();
    Ok(num / den)
}

/// SNR over normalised total correlations at finite parameters; reported next
/// to [`ratio_limit`] so the gap to the printed asymptote stays visible.
pub fn finite_ratio(family: SourceFamily, mu: f64, speckles: u32, pixels: u32) -> Result<f64> {
    let s = snr(family, mu, speckles, pixels)?;
    let t = crate::sources::normalized_total(family, mu, pixels)?;
    if t == 0.0 {
        return Err(Error::Domain {
            name: "mu",
            value: mu,
            constraint: "> 0 (correlations vanish)",
        });
    }
    Ok(s / t)
}
