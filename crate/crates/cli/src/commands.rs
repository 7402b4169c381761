//! Subcommand implementations. Every command is deterministic given its
//! arguments and seed; data files carry a `#` header block echoing the full
//! parameter set.

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ghostcorr::lensless::{
    self, FieldGridMetadata, PropagationSetup,
};
use ghostcorr::montecarlo::{self, MaskImage};
use ghostcorr::snr;
use ghostcorr::sources::{self, SourceFamily};
use ghostcorr::validate;

use crate::config::{LogRange, RangeSpec, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;

pub fn parse_family(s: &str) -> Result<SourceFamily, String> {
    s.parse()
}

fn parse_range(s: &str) -> Result<RangeSpec, String> {
    s.parse().map_err(|e: anyhow::Error| format!("{e:#}"))
}

fn open_out(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file =
        File::create(path).with_context(|| format!("creating output {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn speckle_list(range: &RangeSpec) -> anyhow::Result<Vec<u32>> {
    range
        .values()?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                bail!("speckle counts must be integers >= 1 (got {v})")
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// correlations

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// One correlated speckle pair.
    Microscopic,
    /// Effective pixel-versus-bucket description (cross block / sqrt(R)).
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CorrelationsArgs {
    /// Light source family (thermal | spdc)
    #[arg(long, value_parser = parse_family)]
    pub family: SourceFamily,
    /// Mean photons per mode per beam
    #[arg(long)]
    pub mu: f64,
    #[arg(long, value_enum, default_value = "microscopic")]
    pub scale: Scale,
    /// Pixel count R (coarse matrix and sqrt(R/2) normalisation)
    #[arg(long, default_value_t = 100)]
    pub pixels: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Write the machine-readable report here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CorrelationsReport {
    schema: &'static str,
    family: String,
    scale: String,
    mu: f64,
    pixels: u32,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    nu_plus: f64,
    nu_minus: f64,
    nu_tilde_minus: f64,
    quantum: f64,
    classical: f64,
    total: f64,
    entangled: bool,
    cond_det: f64,
    normalization_factor: f64,
    quantum_normalized: f64,
    classical_normalized: f64,
    total_normalized: f64,
}

impl CorrelationsReport {
    fn csv_columns() -> &'static str {
        "family,scale,mu,pixels,a,b,c,d,nu_plus,nu_minus,nu_tilde_minus,quantum,classical,total,\
         entangled,cond_det,normalization_factor,quantum_normalized,classical_normalized,\
         total_normalized"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.scale,
            self.mu,
            self.pixels,
            self.a,
            self.b,
            self.c,
            self.d,
            self.nu_plus,
            self.nu_minus,
            self.nu_tilde_minus,
            self.quantum,
            self.classical,
            self.total,
            self.entangled,
            self.cond_det,
            self.normalization_factor,
            self.quantum_normalized,
            self.classical_normalized,
            self.total_normalized,
        )
    }
}

pub fn cmd_correlations(args: &CorrelationsArgs) -> anyhow::Result<i32> {
    let sigma = match args.scale {
        Scale::Microscopic => sources::microscopic_pair(args.family, args.mu),
        Scale::Coarse => sources::coarse_grained(args.family, args.mu, args.pixels),
    }
    .context("constructing the covariance matrix")?;
    let spectrum = sigma.symplectic_spectrum()?;
    let breakdown = sigma.correlations()?;
    let factor = sources::normalization_factor(args.pixels);
    let report = CorrelationsReport {
        schema: "correlations v1",
        family: args.family.to_string(),
        scale: match args.scale {
            Scale::Microscopic => "microscopic".into(),
            Scale::Coarse => "coarse".into(),
        },
        mu: args.mu,
        pixels: args.pixels,
        a: sigma.a(),
        b: sigma.b(),
        c: sigma.c(),
        d: sigma.d(),
        nu_plus: spectrum.nu_plus,
        nu_minus: spectrum.nu_minus,
        nu_tilde_minus: spectrum.nu_tilde_minus,
        quantum: breakdown.quantum,
        classical: breakdown.classical,
        total: breakdown.total,
        entangled: breakdown.entangled,
        cond_det: breakdown.cond_det,
        normalization_factor: factor,
        quantum_normalized: breakdown.quantum * factor,
        classical_normalized: breakdown.classical * factor,
        total_normalized: breakdown.total * factor,
    };

    println!("family              {}", report.family);
    println!("scale               {}", report.scale);
    println!("mu                  {}", report.mu);
    println!("(a, b, c, d)        ({}, {}, {}, {})", report.a, report.b, report.c, report.d);
    println!(
        "nu+, nu-, nu~-      {}, {}, {}",
        report.nu_plus, report.nu_minus, report.nu_tilde_minus
    );
    println!("quantum    Q        {}", report.quantum);
    println!("classical  C        {}", report.classical);
    println!("total      T        {}", report.total);
    println!("entangled           {}", report.entangled);
    println!("det eps (optimal)   {}", report.cond_det);
    println!(
        "normalized by sqrt(R/2) = {} at R = {}:",
        report.normalization_factor, report.pixels
    );
    println!(
        "  Q~, C~, T~        {}, {}, {}",
        report.quantum_normalized, report.classical_normalized, report.total_normalized
    );

    if let Some(path) = &args.out {
        let mut w = open_out(path)?;
        match args.format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut w, &report)?;
                writeln!(w)?;
            }
            OutputFormat::Csv => {
                writeln!(w, "# schema: correlations v1")?;
                writeln!(
                    w,
                    "# family={} scale={} mu={} pixels={}",
                    report.family, report.scale, report.mu, report.pixels
                )?;
                writeln!(w, "{}", CorrelationsReport::csv_columns())?;
                writeln!(w, "{}", report.csv_row())?;
            }
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// figure

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Speckle-speckle Q, C, T versus illumination and speckle count.
    Fig3,
    /// SNR versus normalised total correlations (quasi-linearity data).
    Fig4,
    /// Thermal and SPDC normalised totals and SNRs versus illumination.
    Fig5,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub id: FigureId,
    /// JSON sweep configuration; command-line flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    pub family: Option<SourceFamily>,
    /// Illumination range, e.g. `0.1,1,10` or `log:0.01:1000:40`
    #[arg(long, value_parser = parse_range)]
    pub illumination: Option<RangeSpec>,
    /// Speckle-count range (integers), e.g. `1,10,100,1000`
    #[arg(long, value_parser = parse_range)]
    pub speckles: Option<RangeSpec>,
    #[arg(long)]
    pub pixels: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn default_illumination() -> RangeSpec {
    RangeSpec::Log {
        log: LogRange {
            start: 0.01,
            stop: 1000.0,
            count: 40,
        },
    }
}

struct FigureGrid {
    family: SourceFamily,
    speckles: Vec<u32>,
    illumination: Vec<f64>,
    pixels: u32,
    seed: u64,
    out: PathBuf,
}

fn resolve_figure(
    args: &FigureArgs,
    default_out: &str,
    include_speckle_diagonal: bool,
) -> anyhow::Result<FigureGrid> {
    let mut config = match &args.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    config = config.overridden_by(SweepConfig {
        family: args.family,
        illumination: args.illumination.clone(),
        speckles: args.speckles.clone(),
        pixels: args.pixels,
        normalize: None,
        out: args.out.clone(),
        rng_seed: args.seed,
    });
    let speckles = speckle_list(
        &config
            .speckles
            .unwrap_or(RangeSpec::List(vec![1.0, 10.0, 100.0, 1000.0])),
    )?;
    let mut illumination = config
        .illumination
        .unwrap_or_else(default_illumination)
        .values()?;
    if include_speckle_diagonal {
        // sample the M = I diagonal (mu = 1) exactly
        for &m in &speckles {
            let v = m as f64;
            if !illumination.contains(&v) {
                illumination.push(v);
            }
        }
    }
    illumination.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // I = 0 is allowed in explicit lists and maps to the exact-zero
    // correlation result rather than the general formulas
    if illumination.iter().any(|&i| !i.is_finite() || i < 0.0) {
        bail!("illumination values must be >= 0");
    }
    let pixels = config.pixels.unwrap_or(100);
    if pixels < 1 {
        bail!("pixels must be >= 1");
    }
    Ok(FigureGrid {
        family: config.family.unwrap_or(SourceFamily::ThermalSplit),
        speckles,
        illumination,
        pixels,
        seed: config.rng_seed.unwrap_or(0),
        out: config.out.unwrap_or_else(|| PathBuf::from(default_out)),
    })
}

fn grid_points(grid: &FigureGrid) -> Vec<(u32, f64)> {
    let mut points = Vec::with_capacity(grid.speckles.len() * grid.illumination.len());
    for &m in &grid.speckles {
        for &i in &grid.illumination {
            points.push((m, i));
        }
    }
    points
}

pub fn cmd_figure(args: &FigureArgs) -> anyhow::Result<i32> {
    use rayon::prelude::*;
    match args.id {
        FigureId::Fig3 => {
            let grid = resolve_figure(args, "fig3.csv", true)?;
            let rows: Vec<String> = grid_points(&grid)
                .par_iter()
                .map(|&(m, i)| {
                    let mu = i / m as f64;
                    let b = sources::microscopic_pair(grid.family, mu)
                        .and_then(|s| s.correlations())
                        .expect("physical source");
                    format!(
                        "{m},{i},{mu},{},{},{},{}",
                        b.quantum, b.classical, b.total, b.entangled
                    )
                })
                .collect();
            let mut w = open_out(&grid.out)?;
            writeln!(w, "# schema: fig3 v1")?;
            writeln!(
                w,
                "# family={} speckles={:?} illumination_points={} seed={}",
                grid.family,
                grid.speckles,
                grid.illumination.len(),
                grid.seed
            )?;
            writeln!(w, "speckles,illumination,mu,quantum,classical,total,entangled")?;
            for row in rows {
                writeln!(w, "{row}")?;
            }
            println!("fig3 data: {} rows -> {}", grid_points(&grid).len(), grid.out.display());
        }
        FigureId::Fig4 => {
            let grid = resolve_figure(args, "fig4.csv", false)?;
            if grid.family != SourceFamily::ThermalSplit {
                bail!("fig4 models the thermal source");
            }
            let rows: Vec<(f64, f64, String)> = grid_points(&grid)
                .par_iter()
                .map(|&(m, i)| {
                    let mu = i / m as f64;
                    let s = snr::snr_thermal(mu, m, grid.pixels).expect("valid parameters");
                    let t = sources::normalized_total(grid.family, mu, grid.pixels)
                        .expect("valid parameters");
                    let dev = (s - t).abs();
                    (dev, t, format!("{m},{i},{mu},{s},{t},{dev}"))
                })
                .collect();
            let max_dev = rows.iter().map(|r| r.0).fold(0.0f64, f64::max);
            let max_t = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
            let mut w = open_out(&grid.out)?;
            writeln!(w, "# schema: fig4 v1")?;
            writeln!(
                w,
                "# family={} pixels={} speckles={:?} illumination_points={} seed={}",
                grid.family,
                grid.pixels,
                grid.speckles,
                grid.illumination.len(),
                grid.seed
            )?;
            writeln!(
                w,
                "# max_abs_dev={max_dev} max_t_norm={max_t} dev_over_max_t={}",
                max_dev / max_t
            )?;
            writeln!(w, "speckles,illumination,mu,snr,total_normalized,abs_dev")?;
            for row in &rows {
                writeln!(w, "{}", row.2)?;
            }
            println!(
                "fig4 data: {} rows -> {} (max |SNR - T~| = {:.3}% of max T~)",
                rows.len(),
                grid.out.display(),
                100.0 * max_dev / max_t
            );
        }
        FigureId::Fig5 => {
            let mut args5 = args.clone();
            if args5.speckles.is_none() {
                args5.speckles = Some(RangeSpec::List(vec![1.0]));
            }
            let grid = resolve_figure(&args5, "fig5.csv", false)?;
            let rows: Vec<String> = grid_points(&grid)
                .par_iter()
                .map(|&(m, i)| {
                    let mu = i / m as f64;
                    let t_th =
                        sources::normalized_total(SourceFamily::ThermalSplit, mu, grid.pixels)
                            .expect("valid parameters");
                    let t_sp = sources::normalized_total(SourceFamily::Spdc, mu, grid.pixels)
                        .expect("valid parameters");
                    let s_th = snr::snr_thermal(mu, m, grid.pixels).expect("valid parameters");
                    let s_sp = snr::snr_entangled(mu, m, grid.pixels).expect("valid parameters");
                    format!("{m},{i},{mu},{t_th},{t_sp},{s_th},{s_sp}")
                })
                .collect();
            let mut w = open_out(&grid.out)?;
            writeln!(w, "# schema: fig5 v1")?;
            writeln!(
                w,
                "# pixels={} speckles={:?} illumination_points={} seed={}",
                grid.pixels,
                grid.speckles,
                grid.illumination.len(),
                grid.seed
            )?;
            writeln!(
                w,
                "speckles,illumination,mu,total_norm_thermal,total_norm_spdc,snr_thermal,snr_entangled"
            )?;
            for row in rows {
                writeln!(w, "{row}")?;
            }
            println!(
                "fig5 data: {} rows -> {}",
                grid_points(&grid).len(),
                grid.out.display()
            );
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: SourceFamily,
    #[arg(long)]
    pub mu: f64,
    /// Speckles per pixel (M)
    #[arg(long, default_value_t = 10)]
    pub speckles: u32,
    /// Transmitting pixels behind the bucket (the formula R)
    #[arg(long, default_value_t = 25)]
    pub pixels_in: usize,
    /// Blocked pixels (seen by the resolving arm only)
    #[arg(long, default_value_t = 5)]
    pub pixels_out: usize,
    /// Explicit mask bitstring (1 = transmitting); overrides the pixel counts
    #[arg(long)]
    pub mask: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write a JSON summary here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dump the per-frame counts as CSV
    #[arg(long)]
    pub frames_csv: Option<PathBuf>,
    /// Exit nonzero unless the run agrees with the analytic model
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Serialize)]
struct CheckReport {
    passed: bool,
    snr_deviation_sigmas: f64,
    cross_deviation_sigmas: f64,
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    schema: &'static str,
    family: String,
    mu: f64,
    speckles_per_pixel: u32,
    mask: String,
    pixels: usize,
    transmitting: usize,
    frames: usize,
    seed: u64,
    batches: usize,
    snr_hat: f64,
    snr_stderr: f64,
    snr_analytic: f64,
    per_mode_cross: f64,
    per_mode_cross_stderr: f64,
    per_mode_cross_expected: f64,
    check: Option<CheckReport>,
}

fn deviation_sigmas(diff: f64, stderr: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if stderr == 0.0 {
        f64::INFINITY
    } else {
        diff.abs() / stderr
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<i32> {
    let mask = match &args.mask {
        Some(bits) => MaskImage::from_bitstring(bits)?,
        None => MaskImage::from_counts(args.pixels_in, args.pixels_out)?,
    };
    let spec = ghostcorr::SourceSpec::new(args.family, args.mu, args.speckles, mask.len() as u32)?;
    let ensemble = montecarlo::simulate(&spec, &mask, args.frames, args.seed)?;
    let result = ensemble.empirical_snr()?;
    let r_formula = mask.transmitting_count() as u32;
    let analytic = snr::snr(args.family, args.mu, args.speckles, r_formula)?;
    let cross_expected = montecarlo::per_mode_cross_expectation(args.family, args.mu);

    let snr_sigmas = deviation_sigmas(result.snr_hat - analytic, result.snr_stderr);
    let cross_sigmas = deviation_sigmas(
        result.per_mode_cross - cross_expected,
        result.per_mode_cross_stderr,
    );
    let check = args.check.then_some(CheckReport {
        passed: snr_sigmas <= 3.0 && cross_sigmas <= 5.0,
        snr_deviation_sigmas: snr_sigmas,
        cross_deviation_sigmas: cross_sigmas,
    });

    let summary = SimulateSummary {
        schema: "simulate-summary v1",
        family: args.family.to_string(),
        mu: args.mu,
        speckles_per_pixel: args.speckles,
        mask: mask.bitstring(),
        pixels: mask.len(),
        transmitting: mask.transmitting_count(),
        frames: args.frames,
        seed: args.seed,
        batches: result.batches,
        snr_hat: result.snr_hat,
        snr_stderr: result.snr_stderr,
        snr_analytic: analytic,
        per_mode_cross: result.per_mode_cross,
        per_mode_cross_stderr: result.per_mode_cross_stderr,
        per_mode_cross_expected: cross_expected,
        check,
    };

    println!(
        "{} mu={} M={} R={} frames={} seed={}",
        summary.family,
        summary.mu,
        summary.speckles_per_pixel,
        summary.transmitting,
        summary.frames,
        summary.seed
    );
    println!(
        "empirical SNR       {} +- {} (analytic {})",
        summary.snr_hat, summary.snr_stderr, summary.snr_analytic
    );
    println!(
        "per-mode cross cov  {} +- {} (expected {})",
        summary.per_mode_cross, summary.per_mode_cross_stderr, summary.per_mode_cross_expected
    );
    if let Some(check) = &summary.check {
        println!(
            "consistency check   {} (snr {:.2} sigma, cross {:.2} sigma)",
            if check.passed { "PASS" } else { "FAIL" },
            check.snr_deviation_sigmas,
            check.cross_deviation_sigmas
        );
    }

    if let Some(path) = &args.out {
        let mut w = open_out(path)?;
        serde_json::to_writer_pretty(&mut w, &summary)?;
        writeln!(w)?;
    }
    if let Some(path) = &args.frames_csv {
        let mut w = open_out(path)?;
        ensemble.write_csv(&mut w)?;
    }
    if let Some(check) = &summary.check {
        if !check.passed {
            return Ok(EXIT_CHECK_FAILED);
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// lensless

#[derive(Debug, Args)]
pub struct LenslessArgs {
    /// Wavelength [m]
    #[arg(long, default_value_t = 800.0e-9)]
    pub wavelength: f64,
    /// Propagation distance z [m]
    #[arg(long, default_value_t = 0.25)]
    pub distance: f64,
    /// Disk source radius [m]
    #[arg(long, default_value_t = 3.0e-3)]
    pub source_radius: f64,
    /// Mode-lattice spacing [rad/m]; default pi/(2 source_radius)
    #[arg(long)]
    pub kappa_spacing: Option<f64>,
    /// Mode lattice side (power of two)
    #[arg(long, default_value_t = 512)]
    pub lattice: usize,
    /// Detector canvas for the region checks (cells per side)
    #[arg(long, default_value_t = 64)]
    pub detector: usize,
    /// Detector grid exported as the field-correlation matrix
    #[arg(long, default_value_t = 16)]
    pub field_detector: usize,
    /// Field-grid pitch in natural cells
    #[arg(long, default_value_t = 2)]
    pub field_step: usize,
    /// Mean photons per mode
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Pixel side in detector cells for the scaling checks
    #[arg(long, default_value_t = 16)]
    pub pixel_cells: usize,
    /// Bucket-to-pixel area ratios to evaluate
    #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 9.0, 16.0])]
    pub ratios: Vec<f64>,
    /// Region side in cells for the commutator check
    #[arg(long, default_value_t = 48)]
    pub region_cells: usize,
    /// Write the field-correlation CSV here (metadata JSON alongside)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit nonzero if any physics gate fails
    #[arg(long)]
    pub check: bool,
}

pub fn cmd_lensless(args: &LenslessArgs) -> anyhow::Result<i32> {
    let k0 = 2.0 * std::f64::consts::PI / args.wavelength;
    let dk = args
        .kappa_spacing
        .unwrap_or(std::f64::consts::PI / (2.0 * args.source_radius));
    let regions = PropagationSetup::new(
        k0,
        args.distance,
        args.source_radius,
        dk,
        args.lattice,
        args.detector,
        1,
    )?;
    let spacing = regions.detector_spacing();
    println!(
        "lensless model: k0={k0:.6e} z={} r_s={} dk={dk:.6e} lattice={} modes={}",
        args.distance,
        args.source_radius,
        args.lattice,
        regions.mode_count()
    );
    println!(
        "detector cell {spacing:.6e} m; paraxial ratio {:.4}{}",
        regions.paraxial_ratio(),
        if regions.paraxial_strained() {
            " (WARNING: paraxial approximation strained)"
        } else {
            ""
        }
    );

    let mut all_ok = true;

    let crosscheck = lensless::two_path_crosscheck()?;
    let cc_ok = crosscheck.max_rel_dev <= 0.05;
    all_ok &= cc_ok;
    println!(
        "quadrature/FFT crosscheck: max deviation {:.4} over {} pairs -> {}",
        crosscheck.max_rel_dev,
        crosscheck.pairs,
        if cc_ok { "PASS" } else { "FAIL" }
    );

    let pixel_area = (args.pixel_cells as f64 * spacing).powi(2);
    for &ratio in &args.ratios {
        if !ratio.is_finite() || ratio < 1.0 {
            bail!("area ratios must be >= 1 (got {ratio})");
        }
        let cross = lensless::bucket_pixel_cross(&regions, pixel_area, pixel_area * ratio)?;
        let expected = (1.0 / ratio).sqrt();
        let ok = (cross - expected).abs() <= 0.05 * expected;
        all_ok &= ok;
        println!(
            "bucket/pixel area ratio {ratio:>6.1}: cross = {cross:.5}, sqrt(Ap/Ab) = {expected:.5} -> {}",
            if ok { "PASS" } else { "FAIL" }
        );
    }

    let region_area = (args.region_cells as f64 * spacing).powi(2);
    let comm = lensless::commutator_check(&regions, region_area)?;
    let comm_ok = (comm - 1.0).abs() <= 0.02;
    all_ok &= comm_ok;
    println!(
        "area-averaged commutator ({} cells): {comm:.5} -> {}",
        args.region_cells,
        if comm_ok { "PASS" } else { "FAIL" }
    );

    let field_setup = PropagationSetup::new(
        k0,
        args.distance,
        args.source_radius,
        dk,
        args.lattice,
        args.field_detector,
        args.field_step,
    )?;
    let grid = lensless::field_correlations(&field_setup, args.mu)?;
    println!(
        "field grid {0}x{0}: diagonal {1:.6e}, hermiticity residual {2:.2e}",
        grid.detector_count,
        grid.diagonal(0),
        grid.max_hermiticity_residual()
    );
    if let Some(path) = &args.out {
        let mut w = open_out(path)?;
        grid.write_csv(&mut w)?;
        let meta_path = path.with_extension("meta.json");
        let mut mw = open_out(&meta_path)?;
        serde_json::to_writer_pretty(&mut mw, &FieldGridMetadata::new(&field_setup, args.mu))?;
        writeln!(mw)?;
        println!(
            "field grid -> {} (metadata {})",
            path.display(),
            meta_path.display()
        );
    }

    if args.check && !all_ok {
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// validate

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

pub fn cmd_validate(args: &ValidateArgs) -> anyhow::Result<i32> {
    let results = validate::run_all(args.seed);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut all_ok = true;
    for r in &results {
        all_ok &= r.passed;
        println!(
            "{:<width$}  {}  {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail,
            width = width
        );
    }
    println!(
        "{} checks, {} failed",
        results.len(),
        results.iter().filter(|r| !r.passed).count()
    );
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

