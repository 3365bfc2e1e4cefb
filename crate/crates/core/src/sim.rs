//! Monte-Carlo harness: BLER sweeps over schemes and list sizes, paired
//! scheme comparisons, latency reports and deterministic persistence.
//!
//! Frame `i` of a sweep always draws from the RNG stream derived from
//! `(master_seed, i)`, and error counts are merged in frame order, so the
//! results are identical for any worker count.

use crate::channel::{quantize_frame, random_frame};
use crate::latency::{reference_rows, total_latency, LatencyReport};
use crate::list::{Census, ListConfig, ListDecoder, Scheme, ThresholdVariant};
use crate::polar::CodeSpec;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Scheme selector as it appears in config files and CSV rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    ExactSort,
    Dts,
    DtsAdvance,
    SmbDts,
    FullMbd,
}

impl SchemeKind {
    pub fn uses_merged_bits(self) -> bool {
        matches!(self, SchemeKind::SmbDts | SchemeKind::FullMbd)
    }

    pub fn to_scheme(self, merged_bits: usize) -> Scheme {
        match self {
            SchemeKind::ExactSort => Scheme::ExactSort,
            SchemeKind::Dts => Scheme::Dts,
            SchemeKind::DtsAdvance => Scheme::DtsAdvance,
            SchemeKind::SmbDts => Scheme::SmbDts { merged_bits },
            SchemeKind::FullMbd => Scheme::FullMbd { merged_bits },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ExactSort => "exact-sort",
            SchemeKind::Dts => "dts",
            SchemeKind::DtsAdvance => "dts-advance",
            SchemeKind::SmbDts => "smb-dts",
            SchemeKind::FullMbd => "full-mbd",
        }
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-sort" => Ok(SchemeKind::ExactSort),
            "dts" => Ok(SchemeKind::Dts),
            "dts-advance" => Ok(SchemeKind::DtsAdvance),
            "smb-dts" => Ok(SchemeKind::SmbDts),
            "full-mbd" => Ok(SchemeKind::FullMbd),
            other => Err(Error::Parse(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Declarative sweep configuration, loadable from TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub spec: PathBuf,
    pub schemes: Vec<SchemeKind>,
    pub list_sizes: Vec<usize>,
    #[serde(default = "default_merged_bits")]
    pub merged_bits: Vec<usize>,
    pub ebn0_db: Vec<f64>,
    pub max_frames: u64,
    #[serde(default = "default_max_errors")]
    pub max_errors: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// 0 means one worker per CPU.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_llr_scale")]
    pub llr_scale: f64,
    /// Force the plain threshold rule in the tuple scheme.
    #[serde(default)]
    pub smb_standard_thresholds: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_merged_bits() -> Vec<usize> {
    vec![8]
}

fn default_max_errors() -> u64 {
    u64::MAX
}

fn default_llr_scale() -> f64 {
    1.0
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::InvalidArgument("empty Eb/N0 grid".into()));
        }
        if self.max_errors == 0 {
            return Err(Error::InvalidArgument("max_errors must be >= 1".into()));
        }
        if self.schemes.is_empty() || self.list_sizes.is_empty() {
            return Err(Error::InvalidArgument("no schemes or list sizes".into()));
        }
        Ok(())
    }
}

/// One measured point of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlerPoint {
    pub scheme: SchemeKind,
    pub list_size: usize,
    /// Merged bits; absent for bit-serial schemes.
    pub merged_bits: Option<usize>,
    pub ebn0_db: f64,
    pub frames: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub wall_time_s: f64,
}

impl BlerPoint {
    pub const CSV_HEADER: &'static str =
        "scheme,list_size,merged_bits,ebn0_db,frames,block_errors,bler,wall_time_s";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6e},{:.3}",
            self.scheme.name(),
            self.list_size,
            self.merged_bits.map(|m| m.to_string()).unwrap_or_default(),
            self.ebn0_db,
            self.frames,
            self.block_errors,
            self.bler,
            self.wall_time_s
        )
    }

    /// CSV row with the wall time zeroed; every byte of this form is
    /// determined by the config and seed.
    pub fn csv_row_canonical(&self) -> String {
        let mut p = self.clone();
        p.wall_time_s = 0.0;
        p.csv_row()
    }
}

/// Wilson 95% confidence interval on a binomial proportion.
pub fn wilson_interval(errors: u64, frames: u64) -> (f64, f64) {
    if frames == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959964f64;
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One-sided paired sign test: probability of observing at most `c`
/// successes in `b + c` fair coin flips. Small values reject the hypothesis
/// that the two error indicators are exchangeable.
pub fn paired_sign_test_p(b: u64, c: u64) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    // exact binomial tail, stable enough for the event counts seen here
    let ln_half = 0.5f64.ln();
    let mut p = 0.0;
    for k in 0..=c {
        let mut ln_term = (n as f64) * ln_half;
        for j in 0..k {
            ln_term += ((n - j) as f64).ln() - ((j + 1) as f64).ln();
        }
        p += ln_term.exp();
    }
    p.min(1.0)
}

fn decoder_config(scheme: Scheme, list_size: usize, standard: bool) -> ListConfig {
    let mut cfg = ListConfig::new(list_size, scheme);
    if standard {
        cfg = cfg.with_smb_thresholds(ThresholdVariant::Standard);
    }
    cfg
}

/// Frame-stream parameters of one operating point.
#[derive(Debug, Clone, Copy)]
pub struct PointOptions {
    pub ebn0_db: f64,
    pub max_frames: u64,
    pub max_errors: u64,
    pub master_seed: u64,
    pub llr_scale: f64,
    pub standard_thresholds: bool,
}

impl PointOptions {
    pub fn new(ebn0_db: f64, max_frames: u64, master_seed: u64) -> Self {
        PointOptions {
            ebn0_db,
            max_frames,
            max_errors: u64::MAX,
            master_seed,
            llr_scale: 1.0,
            standard_thresholds: false,
        }
    }
}

/// Decodes frames `[0, max_frames)` of the stream at one operating point,
/// stopping early once `max_errors` block errors are seen in frame order.
/// Returns `(frames_used, block_errors, per_frame_errors)`.
pub fn run_point(
    spec: &CodeSpec,
    scheme: Scheme,
    list_size: usize,
    opts: &PointOptions,
    pool: &rayon::ThreadPool,
) -> Result<(u64, u64, Vec<bool>)> {
    use rayon::prelude::*;
    let chunk: u64 = 512;
    let mut frames_used = 0u64;
    let mut errors = 0u64;
    let mut flags = Vec::new();
    let mut start = 0u64;
    while start < opts.max_frames {
        let end = (start + chunk).min(opts.max_frames);
        let batch: Vec<bool> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(
                    || {
                        ListDecoder::new(
                            spec,
                            decoder_config(scheme, list_size, opts.standard_thresholds),
                        )
                    },
                    |dec, i| {
                        let dec = dec.as_mut().expect("decoder config");
                        let (u, fr) = random_frame(spec, opts.ebn0_db, opts.master_seed, i)?;
                        let q = quantize_frame(&fr.rx_llrs, opts.llr_scale);
                        let out = dec.decode(&q)?;
                        // A block error is a selected output that differs
                        // from the transmitted source word.
                        Ok::<bool, Error>(out.u_hat != u)
                    },
                )
                .collect::<std::result::Result<Vec<bool>, Error>>()
        })?;
        for is_err in batch {
            frames_used += 1;
            if is_err {
                errors += 1;
            }
            flags.push(is_err);
            if errors >= opts.max_errors {
                return Ok((frames_used, errors, flags));
            }
        }
        start = end;
    }
    Ok((frames_used, errors, flags))
}

fn make_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))
}

/// Runs the full sweep grid; points are appended to the output files as
/// they complete, so partial results survive an interrupt.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<BlerPoint>> {
    cfg.validate()?;
    let spec = CodeSpec::load(&cfg.spec)?;
    let pool = make_pool(cfg.workers)?;
    let mut points = Vec::new();
    let mut csv = match &cfg.out {
        Some(base) => {
            let path = base.with_extension("csv");
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "# polar-lscd sweep v1")?;
            writeln!(f, "{}", BlerPoint::CSV_HEADER)?;
            Some(f)
        }
        None => None,
    };
    for &scheme_kind in &cfg.schemes {
        for &l in &cfg.list_sizes {
            let m_grid: Vec<Option<usize>> = if scheme_kind.uses_merged_bits() {
                cfg.merged_bits.iter().map(|&m| Some(m)).collect()
            } else {
                vec![None]
            };
            for m in m_grid {
                for &ebn0 in &cfg.ebn0_db {
                    if cfg.max_frames == 0 {
                        continue;
                    }
                    let scheme = scheme_kind.to_scheme(m.unwrap_or(0));
                    let t0 = Instant::now();
                    let opts = PointOptions {
                        ebn0_db: ebn0,
                        max_frames: cfg.max_frames,
                        max_errors: cfg.max_errors,
                        master_seed: cfg.master_seed,
                        llr_scale: cfg.llr_scale,
                        standard_thresholds: cfg.smb_standard_thresholds,
                    };
                    let (frames, errors, _) = run_point(&spec, scheme, l, &opts, &pool)?;
                    let point = BlerPoint {
                        scheme: scheme_kind,
                        list_size: l,
                        merged_bits: m,
                        ebn0_db: ebn0,
                        frames,
                        block_errors: errors,
                        bler: errors as f64 / frames as f64,
                        wall_time_s: t0.elapsed().as_secs_f64(),
                    };
                    if let Some(f) = csv.as_mut() {
                        writeln!(f, "{}", point.csv_row())?;
                        f.flush()?;
                    }
                    points.push(point);
                }
            }
        }
    }
    if let Some(base) = &cfg.out {
        let json = serde_json::to_string_pretty(&points).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(base.with_extension("json"), json)?;
    }
    Ok(points)
}

/// Paired comparison of one scheme pair at one point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparePoint {
    pub baseline: SchemeKind,
    pub scheme: SchemeKind,
    pub merged_bits: Option<usize>,
    pub list_size: usize,
    pub ebn0_db: f64,
    pub frames: u64,
    pub baseline_errors: u64,
    pub scheme_errors: u64,
    pub baseline_ci: (f64, f64),
    pub scheme_ci: (f64, f64),
    /// Frames failed by exactly one side, `(baseline_only, scheme_only)`.
    pub discordant: (u64, u64),
    pub ci_overlap: bool,
}

/// Runs every configured scheme on the same frame streams and reports the
/// per-point deltas against the first scheme in the list.
pub fn compare_schemes(cfg: &SweepConfig) -> Result<Vec<ComparePoint>> {
    cfg.validate()?;
    let spec = CodeSpec::load(&cfg.spec)?;
    let pool = make_pool(cfg.workers)?;
    let baseline_kind = cfg.schemes[0];
    let mut rows = Vec::new();
    for &l in &cfg.list_sizes {
        for &ebn0 in &cfg.ebn0_db {
            let grids: Vec<(SchemeKind, Option<usize>)> = cfg
                .schemes
                .iter()
                .flat_map(|&k| {
                    if k.uses_merged_bits() {
                        cfg.merged_bits.iter().map(|&m| (k, Some(m))).collect::<Vec<_>>()
                    } else {
                        vec![(k, None)]
                    }
                })
                .collect();
            let mut flags: Vec<Vec<bool>> = Vec::new();
            for &(kind, m) in &grids {
                let opts = PointOptions {
                    ebn0_db: ebn0,
                    max_frames: cfg.max_frames,
                    max_errors: u64::MAX, // paired runs must see identical frames
                    master_seed: cfg.master_seed,
                    llr_scale: cfg.llr_scale,
                    standard_thresholds: cfg.smb_standard_thresholds,
                };
                let (_, _, f) = run_point(&spec, kind.to_scheme(m.unwrap_or(0)), l, &opts, &pool)?;
                flags.push(f);
            }
            let base = &flags[0];
            for (gi, &(kind, m)) in grids.iter().enumerate().skip(1) {
                let f = &flags[gi];
                let base_errs = base.iter().filter(|&&e| e).count() as u64;
                let errs = f.iter().filter(|&&e| e).count() as u64;
                let b_only = base.iter().zip(f).filter(|(&b, &s)| b && !s).count() as u64;
                let s_only = base.iter().zip(f).filter(|(&b, &s)| !b && s).count() as u64;
                let frames = base.len() as u64;
                let bci = wilson_interval(base_errs, frames);
                let sci = wilson_interval(errs, frames);
                rows.push(ComparePoint {
                    baseline: baseline_kind,
                    scheme: kind,
                    merged_bits: m,
                    list_size: l,
                    ebn0_db: ebn0,
                    frames,
                    baseline_errors: base_errs,
                    scheme_errors: errs,
                    baseline_ci: bci,
                    scheme_ci: sci,
                    discordant: (b_only, s_only),
                    ci_overlap: bci.0 <= sci.1 && sci.0 <= bci.1,
                });
            }
        }
    }
    Ok(rows)
}

pub fn render_compare(rows: &[ComparePoint]) -> String {
    let mut s = String::from(
        "baseline      scheme        M  L   Eb/N0  frames  base_err  err   overlap\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<12}  {:<12}  {:<2} {:<3} {:<6} {:<7} {:<9} {:<5} {}",
            r.baseline.name(),
            r.scheme.name(),
            r.merged_bits.map(|m| m.to_string()).unwrap_or_default(),
            r.list_size,
            r.ebn0_db,
            r.frames,
            r.baseline_errors,
            r.scheme_errors,
            if r.ci_overlap { "yes" } else { "NO" },
        );
    }
    s
}

/// Latency table over a list of merge settings, shaped like the reference
/// comparison: one column per `M`, the reference schedules appended.
pub fn latency_table(spec: &CodeSpec, p_lanes: usize, merged: &[usize]) -> Result<String> {
    let reports: Vec<LatencyReport> = merged
        .iter()
        .map(|&m| total_latency(spec, p_lanes, m))
        .collect::<Result<_>>()?;
    let refs = reference_rows(spec, p_lanes);
    let mut s = String::new();
    let _ = write!(s, "{:<28}", "M");
    for r in &reports {
        let _ = write!(s, "{:>8}", r.merged_bits);
    }
    for r in &refs {
        let _ = write!(s, "  [{}]", r.name);
    }
    let _ = writeln!(s);
    let row = |s: &mut String, label: &str, vals: Vec<String>| {
        let _ = write!(s, "{label:<28}");
        for v in vals {
            let _ = write!(s, "{v:>8}");
        }
        let _ = writeln!(s);
    };
    row(
        &mut s,
        "LM cycles",
        reports
            .iter()
            .map(|r| r.lm_cycles.to_string())
            .chain(refs.iter().map(|r| r.lm_cycles.to_string()))
            .collect(),
    );
    row(
        &mut s,
        "SCD below stage 3",
        reports
            .iter()
            .map(|r| r.scd_below_stage3.to_string())
            .chain(refs.iter().map(|r| r.scd_below_stage3.to_string()))
            .collect(),
    );
    row(
        &mut s,
        "SCD at/above stage 3",
        reports
            .iter()
            .map(|r| r.scd_at_or_above_stage3.to_string())
            .chain(refs.iter().map(|r| r.scd_at_or_above_stage3.to_string()))
            .collect(),
    );
    row(
        &mut s,
        "total (w/o saving)",
        reports
            .iter()
            .map(|r| r.total_without_saving.to_string())
            .chain(refs.iter().map(|r| r.total.to_string()))
            .collect(),
    );
    row(
        &mut s,
        "fine-tuning saving",
        reports.iter().map(|r| r.d_fine.to_string()).collect(),
    );
    row(
        &mut s,
        "zero-prefix saving",
        reports.iter().map(|r| r.d_zero.to_string()).collect(),
    );
    row(
        &mut s,
        "total (with saving)",
        reports
            .iter()
            .map(|r| r.total.to_string())
            .chain(refs.iter().map(|r| r.total.to_string()))
            .collect(),
    );
    let _ = writeln!(
        s,
        "baseline: traditional {} cycles, whole-tree look-ahead {} cycles",
        reports.first().map(|r| r.d_trd).unwrap_or(0),
        reports.first().map(|r| r.d_pglah).unwrap_or(0),
    );
    Ok(s)
}

/// Latency reports serialized together with the reference rows.
pub fn latency_json(spec: &CodeSpec, p_lanes: usize, merged: &[usize]) -> Result<String> {
    #[derive(Serialize)]
    struct Out {
        reports: Vec<LatencyReport>,
        references: Vec<crate::latency::ReferenceRow>,
    }
    let reports: Vec<LatencyReport> = merged
        .iter()
        .map(|&m| total_latency(spec, p_lanes, m))
        .collect::<Result<_>>()?;
    let references = reference_rows(spec, p_lanes);
    serde_json::to_string_pretty(&Out { reports, references })
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Census table for one merge setting.
pub fn census_table(spec: &CodeSpec, merged_bits: usize) -> String {
    let tuples = crate::list::tuple_divide(spec, merged_bits);
    Census::of(&tuples).render()
}
