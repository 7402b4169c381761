//! Discretized near-field paraxial propagation from a disk source, for the
//! lensless ghost-imaging picture.
//!
//! Source-plane modes are plane waves `a(kappa)` on a uniform lattice with
//! spacing `kappa_spacing`; the field at a detection plane at distance `z` is
//! `E(rho) = sum_kappa g(rho, z; kappa) a(kappa)` with the Fresnel Green's
//! function
//!
//! ```text
//! g(rho, z; kappa) = (-i k0 e^{i k0 z} / 2 pi z)
//!                    * Int_disk d rho_s e^{i k0 |rho - rho_s|^2 / (2z)} e^{-i kappa . rho_s}
//! ```
//!
//! Two-point quantities reduce to the lattice autocorrelation
//! `W(m) = w sum_kappa F*(kappa) F(kappa + m dk)` of the aperture factor
//! `F(q) = Int_disk e^{i k0 rho_s^2/(2z)} e^{-i q . rho_s} d rho_s`. By
//! discrete Parseval this autocorrelation equals `h^2 DFT(disk)[m]` exactly:
//! the quadratic phases cancel and only the Fourier transform of the source
//! aperture survives, which is the delta-correlation mechanism. The lattice
//! sum reproduces the continuum integral whenever
//! `kappa_spacing <= pi / (2 source_radius)` (the autocorrelation of the disk
//! is supported on a 2-diameter square, so coarser lattices alias).
//!
//! [`greens_function`] evaluates the Fresnel integral by direct quadrature,
//! independent of the FFT route; [`two_path_crosscheck`] compares the two on
//! a small configuration.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Geometry of the propagation model: disk source, mode lattice, detector grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSetup {
    wavenumber: f64,
    distance: f64,
    source_radius: f64,
    kappa_spacing: f64,
    lattice_size: usize,
    detector_count: usize,
    detector_step: usize,
}

impl PropagationSetup {
    /// `lattice_size` is the mode-lattice side `N` (power of two);
    /// `detector_step` sets the detector pitch in units of the natural cell
    /// `z * kappa_spacing / k0`, which keeps every pairwise detector shift on
    /// the mode lattice.
    pub fn new(
        wavenumber: f64,
        distance: f64,
        source_radius: f64,
        kappa_spacing: f64,
        lattice_size: usize,
        detector_count: usize,
        detector_step: usize,
    ) -> Result<Self> {
        for (name, v) in [
            ("wavenumber", wavenumber),
            ("source_radius", source_radius),
            ("kappa_spacing", kappa_spacing),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain {
                    name,
                    value: v,
                    constraint: "> 0",
                });
            }
        }
        if !distance.is_finite() || distance <= 0.0 {
            return Err(Error::Domain {
                name: "z",
                value: distance,
                constraint: "> 0",
            });
        }
        if detector_count < 1 || detector_step < 1 {
            return Err(Error::Domain {
                name: "detector",
                value: detector_count.min(detector_step) as f64,
                constraint: ">= 1",
            });
        }
        if !lattice_size.is_power_of_two() || lattice_size < 64 {
            return Err(Error::Resolution(format!(
                "lattice_size {lattice_size} must be a power of two >= 64"
            )));
        }
        let alias_bound = std::f64::consts::PI / (2.0 * source_radius);
        if kappa_spacing > alias_bound * (1.0 + 1e-9) {
            return Err(Error::Resolution(format!(
                "kappa_spacing {kappa_spacing:e} exceeds pi/(2 source_radius) = {alias_bound:e}; \
                 the mode sum would alias the source autocorrelation"
            )));
        }
        let setup = PropagationSetup {
            wavenumber,
            distance,
            source_radius,
            kappa_spacing,
            lattice_size,
            detector_count,
            detector_step,
        };
        // the sampled disk must be reasonably round
        let radius_cells = source_radius / setup.aperture_sample_spacing();
        if radius_cells < 8.0 {
            return Err(Error::Resolution(format!(
                "source disk resolved by only {radius_cells:.1} aperture cells; increase lattice_size"
            )));
        }
        if detector_step * (detector_count.max(2) - 1) >= lattice_size / 2 {
            return Err(Error::Resolution(
                "detector grid extent exceeds half the mode lattice".into(),
            ));
        }
        Ok(setup)
    }

    /// 800 nm light, half-metre propagation, millimetre disk source.
    pub fn lab_default(
        lattice_size: usize,
        detector_count: usize,
        detector_step: usize,
    ) -> Result<Self> {
        let r_s = 1.0e-3;
        PropagationSetup::new(
            2.0 * std::f64::consts::PI / 800.0e-9,
            0.5,
            r_s,
            std::f64::consts::PI / (2.0 * r_s),
            lattice_size,
            detector_count,
            detector_step,
        )
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
    pub fn distance(&self) -> f64 {
        self.distance
    }
    pub fn source_radius(&self) -> f64 {
        self.source_radius
    }
    pub fn kappa_spacing(&self) -> f64 {
        self.kappa_spacing
    }
    pub fn lattice_size(&self) -> usize {
        self.lattice_size
    }
    pub fn detector_count(&self) -> usize {
        self.detector_count
    }
    pub fn detector_step(&self) -> usize {
        self.detector_step
    }

    /// Total number of modes in the lattice sum.
    pub fn mode_count(&self) -> usize {
        self.lattice_size * self.lattice_size
    }

    /// Detector pixel pitch, `detector_step * z * kappa_spacing / k0`.
    pub fn detector_spacing(&self) -> f64 {
        self.detector_step as f64 * self.distance * self.kappa_spacing / self.wavenumber
    }

    /// Aperture-plane sample spacing of the FFT grid, `2 pi / (N kappa_spacing)`.
    fn aperture_sample_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.lattice_size as f64 * self.kappa_spacing)
    }

    /// Paraxial small-angle parameter `source_radius / z`.
    pub fn paraxial_ratio(&self) -> f64 {
        self.source_radius / self.distance
    }

    /// True when the geometry strains the paraxial approximation.
    pub fn paraxial_strained(&self) -> bool {
        self.paraxial_ratio() > 0.1
    }

    /// Physical detector coordinate of integer grid index `n` (one axis),
    /// centred on the optical axis.
    fn detector_coord(&self, n: i64, count: usize) -> f64 {
        (n as f64 - (count as f64 - 1.0) / 2.0) * self.detector_spacing()
    }
}

fn fft2_inplace(data: &mut [Complex64], n: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    // transpose, transform rows, transpose back
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Mode-lattice two-point kernel
/// `K(rho_i, rho_j) = w sum_kappa g*(rho_i; kappa) g(rho_j; kappa)` with
/// `w = kappa_spacing^2 / (2 pi)^2`, evaluated through the Parseval identity
/// `W(m) = h^2 DFT(disk)[m]`.
pub struct ModeKernel {
    setup: PropagationSetup,
    /// `h^2 DFT(disk)`, wrapped indices, real by symmetry.
    w_table: Vec<f64>,
    n: usize,
}

impl ModeKernel {
    pub fn build(setup: &PropagationSetup) -> Self {
        let n = setup.lattice_size;
        let h = setup.aperture_sample_spacing();
        let r2 = setup.source_radius * setup.source_radius;
        let half = n as f64 / 2.0;
        let mut samples = vec![Complex64::new(0.0, 0.0); n * n];
        for sy in 0..n {
            let y = (sy as f64 - half) * h;
            for sx in 0..n {
                let x = (sx as f64 - half) * h;
                if x * x + y * y <= r2 {
                    samples[sy * n + sx] = Complex64::new(1.0, 0.0);
                }
            }
        }
        fft2_inplace(&mut samples, n);
        // samples sit at positions (s - N/2) h, so bin m of the raw DFT is
        // (-1)^(mx+my) times the centred transform (N even)
        let scale = h * h;
        let w_table = samples
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let sign = if ((idx / n) + (idx % n)).is_multiple_of(2) { 1.0 } else { -1.0 };
                v.re * scale * sign
            })
            .collect();
        ModeKernel {
            setup: setup.clone(),
            w_table,
            n,
        }
    }

    /// `W` at lattice shift `(mx, my)`; `W(0)` approximates the disk area.
    pub fn w(&self, mx: i64, my: i64) -> f64 {
        let n = self.n as i64;
        let ix = mx.rem_euclid(n) as usize;
        let iy = my.rem_euclid(n) as usize;
        self.w_table[iy * self.n + ix]
    }

    fn squared_prefactor(&self) -> f64 {
        let p = self.setup.wavenumber / (2.0 * std::f64::consts::PI * self.setup.distance);
        p * p
    }

    /// Detection-plane chirp `e^{i k0 |rho|^2 / (2z)}` at grid index `(nx, ny)`.
    fn chirp(&self, nx: i64, ny: i64, count: usize) -> Complex64 {
        let x = self.setup.detector_coord(nx, count);
        let y = self.setup.detector_coord(ny, count);
        self.chirp_at(x, y)
    }

    /// Chirp at an axis-centred cell index (used for region sums; regions
    /// must sit inside the geometric image of the source disk, else the
    /// finite mode band vignettes the field).
    fn chirp_centered(&self, nx: i64, ny: i64) -> Complex64 {
        let spacing = self.setup.detector_spacing();
        self.chirp_at(nx as f64 * spacing, ny as f64 * spacing)
    }

    fn chirp_at(&self, x: f64, y: f64) -> Complex64 {
        let phase = self.setup.wavenumber * (x * x + y * y) / (2.0 * self.setup.distance);
        Complex64::from_polar(1.0, phase)
    }

    /// Kernel between detector grid points `(ix, iy)` and `(jx, jy)`.
    pub fn kernel(&self, i: (i64, i64), j: (i64, i64), count: usize) -> Complex64 {
        let step = self.setup.detector_step as i64;
        let w = self.w(step * (j.0 - i.0), step * (j.1 - i.1));
        self.chirp(i.0, i.1, count).conj()
            * self.chirp(j.0, j.1, count)
            * self.squared_prefactor()
            * w
    }
}

/// Two-point field correlations `<E^dag(rho_i) E(rho_j)>` on the flattened
/// detector grid; Hermitian with real positive diagonal.
pub struct FieldGrid {
    pub detector_count: usize,
    pub detector_spacing: f64,
    pub mean_photons_per_mode: f64,
    pub mode_count: usize,
    entries: Vec<Complex64>,
}

impl FieldGrid {
    pub fn points(&self) -> usize {
        self.detector_count * self.detector_count
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.points() + j]
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.entry(i, i).re
    }

    pub fn max_hermiticity_residual(&self) -> f64 {
        let np = self.points();
        let mut worst = 0.0f64;
        for i in 0..np {
            for j in i..np {
                let r = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Long-form CSV: one `(i, j, re, im, abs)` row per grid point pair.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# schema: fieldgrid v1")?;
        writeln!(
            w,
            "# detector_count={} detector_spacing={} mu={} modes={}",
            self.detector_count, self.detector_spacing, self.mean_photons_per_mode, self.mode_count
        )?;
        writeln!(w, "i,j,re,im,abs")?;
        let np = self.points();
        for i in 0..np {
            for j in 0..np {
                let v = self.entry(i, j);
                writeln!(w, "{i},{j},{},{},{}", v.re, v.im, v.norm())?;
            }
        }
        Ok(())
    }
}

/// Metadata emitted next to exported field grids.
#[derive(Debug, Serialize)]
pub struct FieldGridMetadata {
    pub schema: &'static str,
    pub wavenumber: f64,
    pub distance: f64,
    pub source_radius: f64,
    pub kappa_spacing: f64,
    pub lattice_size: usize,
    pub mode_count: usize,
    pub detector_count: usize,
    pub detector_spacing: f64,
    pub mean_photons_per_mode: f64,
    pub paraxial_ratio: f64,
}

impl FieldGridMetadata {
    pub fn new(setup: &PropagationSetup, mu: f64) -> Self {
        FieldGridMetadata {
            schema: "fieldgrid v1",
            wavenumber: setup.wavenumber(),
            distance: setup.distance(),
            source_radius: setup.source_radius(),
            kappa_spacing: setup.kappa_spacing(),
            lattice_size: setup.lattice_size(),
            mode_count: setup.mode_count(),
            detector_count: setup.detector_count(),
            detector_spacing: setup.detector_spacing(),
            mean_photons_per_mode: mu,
            paraxial_ratio: setup.paraxial_ratio(),
        }
    }
}

/// Fresnel Green's function by direct quadrature over the disk source.
/// Sample density adapts to the largest phase gradient of the integrand.
pub fn greens_function(
    setup: &PropagationSetup,
    rho: [f64; 2],
    kappa: [f64; 2],
) -> Result<Complex64> {
    let k0 = setup.wavenumber;
    let z = setup.distance;
    let r_s = setup.source_radius;
    let grad = k0 * (rho[0].hypot(rho[1]) + r_s) / z + kappa[0].hypot(kappa[1]);
    let samples = ((5.0 * r_s * grad).ceil() as usize).clamp(300, 6000);
    greens_function_quadrature(setup, rho, kappa, samples)
}

/// Quadrature evaluation with an explicit sample count per axis (midpoint
/// rule over the disk bounding box).
pub fn greens_function_quadrature(
    setup: &PropagationSetup,
    rho: [f64; 2],
    kappa: [f64; 2],
    samples_per_axis: usize,
) -> Result<Complex64> {
    if samples_per_axis < 2 {
        return Err(Error::Domain {
            name: "samples_per_axis",
            value: samples_per_axis as f64,
            constraint: ">= 2",
        });
    }
    for v in rho.iter().chain(kappa.iter()) {
        if !v.is_finite() {
            return Err(Error::Domain {
                name: "rho/kappa",
                value: *v,
                constraint: "finite",
            });
        }
    }
    let k0 = setup.wavenumber;
    let z = setup.distance;
    let r_s = setup.source_radius;
    let n = samples_per_axis;
    let h = 2.0 * r_s / n as f64;
    let half_phase = k0 / (2.0 * z);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for sy in 0..n {
        let y = -r_s + (sy as f64 + 0.5) * h;
        for sx in 0..n {
            let x = -r_s + (sx as f64 + 0.5) * h;
            if x * x + y * y > r_s * r_s {
                continue;
            }
            let dx = rho[0] - x;
            let dy = rho[1] - y;
            let phase = half_phase * (dx * dx + dy * dy) - (kappa[0] * x + kappa[1] * y);
            let (s, c) = phase.sin_cos();
            re.add(c);
            im.add(s);
        }
    }
    let integral = Complex64::new(re.value(), im.value()) * (h * h);
    let pref = Complex64::new(0.0, -k0 / (2.0 * std::f64::consts::PI * z))
        * Complex64::from_polar(1.0, k0 * z);
    Ok(pref * integral)
}

/// Field correlation matrix `<E^dag(rho_i) E(rho_j)> = mu K(rho_i, rho_j)`
/// over the full detector grid.
pub fn field_correlations(
    setup: &PropagationSetup,
    mean_photons_per_mode: f64,
) -> Result<FieldGrid> {
    if !mean_photons_per_mode.is_finite() || mean_photons_per_mode < 0.0 {
        return Err(Error::Domain {
            name: "mean_photons_per_mode",
            value: mean_photons_per_mode,
            constraint: ">= 0",
        });
    }
    let nd = setup.detector_count;
    let np = nd * nd;
    if setup.mode_count() < 10 * np {
        return Err(Error::Resolution(format!(
            "{} modes for {np} detector pixels; the delta-limit regime needs >= 10x",
            setup.mode_count()
        )));
    }
    let kernel = ModeKernel::build(setup);
    let mut entries = vec![Complex64::new(0.0, 0.0); np * np];
    entries.par_chunks_mut(np).enumerate().for_each(|(i, row)| {
        let (iy, ix) = ((i / nd) as i64, (i % nd) as i64);
        for (j, slot) in row.iter_mut().enumerate() {
            let (jy, jx) = ((j / nd) as i64, (j % nd) as i64);
            *slot = kernel.kernel((ix, iy), (jx, jy), nd) * mean_photons_per_mode;
        }
    });
    Ok(FieldGrid {
        detector_count: nd,
        detector_spacing: setup.detector_spacing(),
        mean_photons_per_mode,
        mode_count: setup.mode_count(),
        entries,
    })
}

/// Centred square region of `side` cells on the detector lattice.
fn region_cells(side: usize) -> std::ops::Range<i64> {
    let s = side as i64;
    -(s / 2)..(s - s / 2)
}

fn region_side_cells(setup: &PropagationSetup, area: f64, name: &'static str) -> Result<usize> {
    if !area.is_finite() || area <= 0.0 {
        return Err(Error::Domain {
            name,
            value: area,
            constraint: "> 0",
        });
    }
    let side = (area.sqrt() / setup.detector_spacing()).round() as usize;
    if side < 4 {
        return Err(Error::Resolution(format!(
            "{name} resolved by {side} cells per side; need >= 4"
        )));
    }
    if side > setup.detector_count {
        return Err(Error::Resolution(format!(
            "{name} ({side} cells per side) exceeds the detector grid ({})",
            setup.detector_count
        )));
    }
    Ok(side)
}

/// The finite mode band only illuminates the geometric image of the source
/// disk (|rho| < source_radius); averaged-operator identities need the region
/// well inside it.
fn check_inside_source_image(
    setup: &PropagationSetup,
    side: usize,
    name: &'static str,
) -> Result<()> {
    let corner = (side as f64 / 2.0) * setup.detector_spacing() * 2.0f64.sqrt();
    if corner > 0.75 * setup.source_radius {
        return Err(Error::Resolution(format!(
            "{name} extends to {corner:.2e} m from the axis, outside the geometric source \
             image (radius {:.2e} m); correlations would vignette",
            setup.source_radius
        )));
    }
    Ok(())
}

/// Pairwise kernel sum `sum_{i in A, j in B} K(rho_i, rho_j)` over two
/// centred square regions, in units of `|pref|^2 drho^4` (constants that
/// cancel in all reported ratios are omitted). Partial sums are reduced in a
/// fixed order so the result is independent of the worker count.
fn region_pair_sum(kernel: &ModeKernel, side_a: usize, side_b: usize) -> Complex64 {
    let step = kernel.setup.detector_step as i64;
    let cells_b: Vec<(i64, i64, Complex64)> = region_cells(side_b)
        .flat_map(|jy| region_cells(side_b).map(move |jx| (jx, jy)))
        .map(|(jx, jy)| (jx, jy, kernel.chirp_centered(jx, jy)))
        .collect();
    let rows: Vec<Complex64> = region_cells(side_a)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&iy| {
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for ix in region_cells(side_a) {
                let ci = kernel.chirp_centered(ix, iy).conj();
                for &(jx, jy, cj) in &cells_b {
                    let w = kernel.w(step * (jx - ix), step * (jy - iy));
                    let v = ci * cj * w;
                    re.add(v.re);
                    im.add(v.im);
                }
            }
            Complex64::new(re.value(), im.value())
        })
        .collect();
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for v in rows {
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Normalised bucket-pixel cross correlation
/// `<E_b^dag E_p> / sqrt(A_p A_b)` divided by its matched-area value;
/// approaches `sqrt(A_p / A_b)` in the delta-correlation limit.
pub fn bucket_pixel_cross(
    setup: &PropagationSetup,
    pixel_area: f64,
    bucket_area: f64,
) -> Result<f64> {
    let pixel_side = region_side_cells(setup, pixel_area, "pixel_area")?;
    let bucket_side = region_side_cells(setup, bucket_area, "bucket_area")?;
    check_inside_source_image(setup, pixel_side, "pixel_area")?;
    if pixel_side > bucket_side {
        return Err(Error::Domain {
            name: "pixel_area",
            value: pixel_area,
            constraint: "<= bucket_area",
        });
    }
    let max_shift = setup.detector_step * (bucket_side / 2 + pixel_side / 2 + 1);
    if max_shift >= setup.lattice_size / 2 {
        return Err(Error::Resolution(
            "bucket/pixel extent exceeds half the mode lattice".into(),
        ));
    }
    let kernel = ModeKernel::build(setup);
    let cross = region_pair_sum(&kernel, bucket_side, pixel_side);
    let matched = region_pair_sum(&kernel, pixel_side, pixel_side);
    if matched.norm() == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(cross.norm() / matched.norm() * pixel_side as f64 / bucket_side as f64)
}

/// Effective two-mode covariance matrix of the pixel and bucket area modes:
/// the matched-area (single-speckle) matrix with its cross block scaled by
/// the computed [`bucket_pixel_cross`] factor instead of the lensed `1/sqrt(R)`.
pub fn effective_coarse_covariance(
    setup: &PropagationSetup,
    family: crate::sources::SourceFamily,
    mu: f64,
    pixel_area: f64,
    bucket_area: f64,
) -> Result<crate::gaussian::TwoModeCovariance> {
    let scale = bucket_pixel_cross(setup, pixel_area, bucket_area)?;
    let matched = crate::sources::microscopic_pair(family, mu)?;
    crate::gaussian::TwoModeCovariance::new(
        matched.a(),
        matched.b(),
        matched.c() * scale,
        matched.d() * scale,
    )
}

/// Discrete check of `<[d, d^dag]> = 1` for the area-averaged operator
/// `d = (1/sqrt(A)) Int_A E(rho) d rho`.
pub fn commutator_check(setup: &PropagationSetup, region_area: f64) -> Result<f64> {
    let side = region_side_cells(setup, region_area, "region_area")?;
    check_inside_source_image(setup, side, "region_area")?;
    let kernel = ModeKernel::build(setup);
    let sum = region_pair_sum(&kernel, side, side);
    let spacing = setup.detector_spacing();
    let area = (side as f64 * spacing) * (side as f64 * spacing);
    Ok(sum.norm() * kernel.squared_prefactor() * spacing.powi(4) / area)
}

/// Result of the quadrature-vs-FFT consistency run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrosscheckReport {
    pub max_rel_dev: f64,
    pub pairs: usize,
}

/// Compare the lattice-kernel route against brute-force quadrature of the
/// Green's function on one small configuration: for a handful of detector
/// pairs, evaluate `w sum_kappa g*(rho_i) g(rho_j)` with `g` from
/// [`greens_function_quadrature`] over an explicit mode window and report the
/// worst deviation relative to the kernel diagonal.
pub fn two_path_crosscheck() -> Result<CrosscheckReport> {
    let r_s = 2.0e-4;
    let setup = PropagationSetup::new(
        2.0 * std::f64::consts::PI / 800.0e-9,
        0.25,
        r_s,
        std::f64::consts::PI / (2.0 * r_s),
        128,
        5,
        1,
    )?;
    let kernel = ModeKernel::build(&setup);
    let nd = setup.detector_count();
    let pairs: Vec<((i64, i64), (i64, i64))> = vec![
        ((2, 2), (2, 2)),
        ((2, 2), (3, 2)),
        ((2, 2), (3, 3)),
        ((1, 2), (4, 2)),
        ((0, 0), (1, 3)),
    ];
    let dk = setup.kappa_spacing();
    // window covering the aperture-factor support plus the detector shifts
    let support_cells =
        ((setup.wavenumber() * r_s / setup.distance() + 15.0 / r_s) / dk).ceil() as i64;
    let win = support_cells + (nd as i64 - 1) + 1;
    let w_mode = dk * dk / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    let coord = |n: i64| setup.detector_coord(n, nd);
    let diag = kernel.kernel((2, 2), (2, 2), nd).norm();

    let kappas: Vec<[f64; 2]> = (-win..=win)
        .flat_map(|py| (-win..=win).map(move |px| [px as f64 * dk, py as f64 * dk]))
        .collect();
    let mut max_rel_dev = 0.0f64;
    for &(i, j) in &pairs {
        let rho_i = [coord(i.0), coord(i.1)];
        let rho_j = [coord(j.0), coord(j.1)];
        let terms: Vec<Complex64> = kappas
            .par_iter()
            .map(|kappa| {
                let gi = greens_function(&setup, rho_i, *kappa).expect("valid inputs");
                let gj = greens_function(&setup, rho_j, *kappa).expect("valid inputs");
                gi.conj() * gj
            })
            .collect();
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for t in terms {
            re.add(t.re);
            im.add(t.im);
        }
        let quad = Complex64::new(re.value(), im.value()) * w_mode;
        let fast = kernel.kernel(i, j, nd);
        max_rel_dev = max_rel_dev.max((quad - fast).norm() / diag);
    }
    Ok(CrosscheckReport {
        max_rel_dev,
        pairs: pairs.len(),
    })
}
