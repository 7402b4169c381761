//! Frame-by-frame stochastic simulation of lensed ghost imaging with a binary
//! amplitude mask.
//!
//! Each frame draws one realization of all `R * M` source modes. For the
//! thermal source a mode is a complex circular-Gaussian amplitude with
//! `<|alpha|^2> = 2 mu`, split 50:50 between the arms, each arm then counting
//! shot-noise photons with conditional mean `|alpha|^2 / 2`. For SPDC a mode
//! draws `n` from the Bose-Einstein law with mean `mu` and both arms record
//! the identical count. The bucket arm only sums pixels the mask transmits.
//!
//! Frames are sampled in parallel; frame `i` uses an RNG stream derived from
//! `(seed, i)` so the ensemble is bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::sources::{SourceFamily, SourceSpec};

/// Number of contiguous frame batches used for standard-error estimates.
pub const BATCH_COUNT: usize = 20;

/// Binary transmission mask; `true` = full transmission (in-profile).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskImage {
    pixels: Vec<bool>,
}

impl MaskImage {
    /// Requires at least one in-profile and one out-of-profile pixel, else the
    /// SNR difference `S_in - S_out` is undefined.
    pub fn new(pixels: Vec<bool>) -> Result<Self> {
        let transmitting = pixels.iter().filter(|&&p| p).count();
        if transmitting == 0 || transmitting == pixels.len() {
            return Err(Error::InvalidMask);
        }
        Ok(MaskImage { pixels })
    }

    /// `transmitting` in-profile pixels followed by `opaque` blocked ones.
    pub fn from_counts(transmitting: usize, opaque: usize) -> Result<Self> {
        let mut pixels = vec![true; transmitting];
        pixels.resize(transmitting + opaque, false);
        MaskImage::new(pixels)
    }

    /// Parse a string of `1`/`0` characters.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let pixels = s
            .chars()
            .map(|ch| match ch {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::InvalidMask),
            })
            .collect::<Result<Vec<bool>>>()?;
        MaskImage::new(pixels)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn is_transmitting(&self, pixel: usize) -> bool {
        self.pixels[pixel]
    }

    pub fn transmitting_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn bitstring(&self) -> String {
        self.pixels.iter().map(|&p| if p { '1' } else { '0' }).collect()
    }
}

/// Per-frame photon counts of one sampled frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameCounts {
    /// Bucket total over transmitting pixels.
    pub bucket: u64,
    /// Spatially resolving arm, one count per pixel.
    pub pixels: Vec<u64>,
}

fn poisson_count(mean: f64, rng: &mut impl Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive mean");
    dist.sample(rng) as u64
}

fn bose_einstein_count(mu: f64, rng: &mut impl Rng) -> u64 {
    if mu <= 0.0 {
        return 0;
    }
    let q = mu / (1.0 + mu);
    let u: f64 = rng.gen();
    ((1.0 - u).ln() / q.ln()).floor() as u64
}

/// Draw one frame of all `R * M` modes.
pub fn sample_frame(spec: &SourceSpec, mask: &MaskImage, rng: &mut impl Rng) -> FrameCounts {
    let m = spec.speckles_per_pixel as usize;
    let mut pixels = vec![0u64; mask.len()];
    let mut bucket = 0u64;
    let amp_sd = spec.mu.sqrt();
    for (j, pixel) in pixels.iter_mut().enumerate() {
        let transmitting = mask.is_transmitting(j);
        for _ in 0..m {
            let (n1, n2) = match spec.family {
                SourceFamily::ThermalSplit => {
                    let x: f64 = rng.sample::<f64, _>(StandardNormal) * amp_sd;
                    let y: f64 = rng.sample::<f64, _>(StandardNormal) * amp_sd;
                    let intensity_per_arm = (x * x + y * y) / 2.0;
                    (
                        poisson_count(intensity_per_arm, rng),
                        poisson_count(intensity_per_arm, rng),
                    )
                }
                SourceFamily::Spdc => {
                    let n = bose_einstein_count(spec.mu, rng);
                    (n, n)
                }
            };
            if transmitting {
                bucket += n1;
            }
            *pixel += n2;
        }
    }
    FrameCounts { bucket, pixels }
}

/// Monte Carlo record of per-frame counts.
#[derive(Debug, Clone)]
pub struct FrameEnsemble {
    pub spec: SourceSpec,
    pub mask: MaskImage,
    pub frames: usize,
    pub rng_seed: u64,
    bucket_counts: Vec<u64>,
    /// Row-major `frames x R`.
    pixel_counts: Vec<u64>,
}

/// Empirical SNR and per-mode cross covariance with batch standard errors.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmpiricalResult {
    pub snr_hat: f64,
    pub snr_stderr: f64,
    pub per_mode_cross: f64,
    pub per_mode_cross_stderr: f64,
    pub batches: usize,
}

/// Per-mode cross covariance `<dn1 dn2>` predicted by the source statistics:
/// `mu^2` for split thermal light, `mu (mu + 1)` for SPDC. Equals `(c/2)^2`
/// of the microscopic covariance matrix.
pub fn per_mode_cross_expectation(family: SourceFamily, mu: f64) -> f64 {
    match family {
        SourceFamily::ThermalSplit => mu * mu,
        SourceFamily::Spdc => mu * (mu + 1.0),
    }
}

/// Sample `frames` independent frames. Deterministic in `(spec, mask, frames,
/// seed)` regardless of the rayon worker count.
pub fn simulate(
    spec: &SourceSpec,
    mask: &MaskImage,
    frames: usize,
    seed: u64,
) -> Result<FrameEnsemble> {
    if spec.pixel_count as usize != mask.len() {
        return Err(Error::Domain {
            name: "pixel_count",
            value: spec.pixel_count as f64,
            constraint: "equal to the mask length",
        });
    }
    if frames < 2 {
        return Err(Error::InsufficientData {
            need: "at least 2 frames",
            got: frames,
        });
    }
    let r = mask.len();
    let mut bucket_counts = vec![0u64; frames];
    let mut pixel_counts = vec![0u64; frames * r];
    bucket_counts
        .par_iter_mut()
        .zip(pixel_counts.par_chunks_mut(r))
        .enumerate()
        .with_min_len(64)
        .for_each(|(frame, (bucket, row))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(frame as u64);
            let counts = sample_frame(spec, mask, &mut rng);
            *bucket = counts.bucket;
            row.copy_from_slice(&counts.pixels);
        });
    Ok(FrameEnsemble {
        spec: *spec,
        mask: mask.clone(),
        frames,
        rng_seed: seed,
        bucket_counts,
        pixel_counts,
    })
}

/// Pooled covariance/variance statistics over a frame range.
struct RangeStats {
    s_in: f64,
    s_out: f64,
    /// var(S_in) + var(S_out) for a single in/out pixel pair, pooled over
    /// pixels (the in/out cross term vanishes); denominator of the SNR.
    pair_variance: f64,
}

impl FrameEnsemble {
    pub fn bucket_counts(&self) -> &[u64] {
        &self.bucket_counts
    }

    pub fn pixel_count_at(&self, frame: usize, pixel: usize) -> u64 {
        self.pixel_counts[frame * self.mask.len() + pixel]
    }

    /// Mean photon count per mode on the resolving arm at `pixel`.
    pub fn mean_count_per_mode(&self, pixel: usize) -> f64 {
        let r = self.mask.len();
        let mut acc = KahanSum::new();
        for frame in 0..self.frames {
            acc.add(self.pixel_counts[frame * r + pixel] as f64);
        }
        acc.value() / self.frames as f64 / self.spec.speckles_per_pixel as f64
    }

    /// Imaging function at `pixel`: the unbiased sample covariance of the
    /// bucket total and the pixel count across frames.
    pub fn imaging_function(&self, pixel: usize) -> Result<f64> {
        if self.frames < 2 {
            return Err(Error::InsufficientData {
                need: "at least 2 frames",
                got: self.frames,
            });
        }
        let r = self.mask.len();
        let (m1, m2) = self.means_for(0, self.frames, pixel);
        let mut acc = KahanSum::new();
        for frame in 0..self.frames {
            let db = self.bucket_counts[frame] as f64 - m1;
            let dp = self.pixel_counts[frame * r + pixel] as f64 - m2;
            acc.add(db * dp);
        }
        Ok(acc.value() / (self.frames as f64 - 1.0))
    }

    fn means_for(&self, lo: usize, hi: usize, pixel: usize) -> (f64, f64) {
        let r = self.mask.len();
        let mut b = KahanSum::new();
        let mut p = KahanSum::new();
        for frame in lo..hi {
            b.add(self.bucket_counts[frame] as f64);
            p.add(self.pixel_counts[frame * r + pixel] as f64);
        }
        let n = (hi - lo) as f64;
        (b.value() / n, p.value() / n)
    }

    fn range_stats(&self, lo: usize, hi: usize) -> RangeStats {
        let r = self.mask.len();
        let n = (hi - lo) as f64;
        let mut s_in = KahanSum::new();
        let mut s_out = KahanSum::new();
        let mut v_in = KahanSum::new();
        let mut v_out = KahanSum::new();
        let mut n_in = 0usize;
        let mut n_out = 0usize;
        for pixel in 0..r {
            let (m1, m2) = self.means_for(lo, hi, pixel);
            let mut sum_p = KahanSum::new();
            let mut sum_p2 = KahanSum::new();
            for frame in lo..hi {
                let db = self.bucket_counts[frame] as f64 - m1;
                let dp = self.pixel_counts[frame * r + pixel] as f64 - m2;
                let prod = db * dp;
                sum_p.add(prod);
                sum_p2.add(prod * prod);
            }
            let cov = sum_p.value() / (n - 1.0);
            let var_prod = (sum_p2.value() - sum_p.value() * sum_p.value() / n) / (n - 1.0);
            if self.mask.is_transmitting(pixel) {
                s_in.add(cov);
                v_in.add(var_prod);
                n_in += 1;
            } else {
                s_out.add(cov);
                v_out.add(var_prod);
                n_out += 1;
            }
        }
        RangeStats {
            s_in: s_in.value() / n_in as f64,
            s_out: s_out.value() / n_out as f64,
            pair_variance: v_in.value() / n_in as f64 + v_out.value() / n_out as f64,
        }
    }

    fn snr_from_stats(stats: &RangeStats) -> Result<f64> {
        let num = (stats.s_in - stats.s_out).abs();
        if stats.pair_variance <= 0.0 {
            // all-zero ensembles (mu = 0) carry no signal and no noise
            return if num == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::DegenerateVariance)
            };
        }
        Ok(num / stats.pair_variance.sqrt())
    }

    /// Empirical per-frame SNR
    /// `|<S_in - S_out>| / sqrt(var(S_in - S_out))`, where `S` is the product
    /// of bucket and pixel fluctuations of a single frame and the variance is
    /// that of a single in/out pixel pair. Standard errors come from
    /// [`BATCH_COUNT`] contiguous frame batches.
    pub fn empirical_snr(&self) -> Result<EmpiricalResult> {
        if self.frames < 2 * BATCH_COUNT {
            return Err(Error::InsufficientData {
                need: "at least two frames per batch",
                got: self.frames,
            });
        }
        let full = self.range_stats(0, self.frames);
        let snr_hat = Self::snr_from_stats(&full)?;
        let m = self.spec.speckles_per_pixel as f64;
        let per_mode_cross = full.s_in / m;

        let mut batch_snr = Vec::with_capacity(BATCH_COUNT);
        let mut batch_cross = Vec::with_capacity(BATCH_COUNT);
        for b in 0..BATCH_COUNT {
            let lo = b * self.frames / BATCH_COUNT;
            let hi = (b + 1) * self.frames / BATCH_COUNT;
            let stats = self.range_stats(lo, hi);
            batch_snr.push(Self::snr_from_stats(&stats)?);
            batch_cross.push(stats.s_in / m);
        }
        let stderr = |xs: &[f64]| crate::numeric::sample_std(xs) / (xs.len() as f64).sqrt();
        Ok(EmpiricalResult {
            snr_hat,
            snr_stderr: stderr(&batch_snr),
            per_mode_cross,
            per_mode_cross_stderr: stderr(&batch_cross),
            batches: BATCH_COUNT,
        })
    }

    /// CSV dump: `frame,bucket_count,pixel_0..pixel_{R-1}` under a `#` header
    /// block echoing the parameters and seed.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# schema: frames v1")?;
        writeln!(
            w,
            "# family={} mu={} speckles_per_pixel={} pixels={} mask={} frames={} seed={}",
            self.spec.family,
            self.spec.mu,
            self.spec.speckles_per_pixel,
            self.mask.len(),
            self.mask.bitstring(),
            self.frames,
            self.rng_seed
        )?;
        write!(w, "frame,bucket_count")?;
        for j in 0..self.mask.len() {
            write!(w, ",pixel_{j}")?;
        }
        writeln!(w)?;
        let r = self.mask.len();
        for frame in 0..self.frames {
            write!(w, "{frame},{}", self.bucket_counts[frame])?;
            for j in 0..r {
                write!(w, ",{}", self.pixel_counts[frame * r + j])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
