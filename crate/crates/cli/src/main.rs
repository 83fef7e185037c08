//! `cifc`: classification, regions, gaps, atlases and the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 regime mismatch.

mod input;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cifc_core::inner::{inner_by_id, INNER_IDS};
use cifc_core::io::{csv_table, fmt12, region_to_csv, region_to_json};
use cifc_core::outer::{outer_by_id, OUTER_IDS};
use cifc_core::region::gap_report;
use cifc_core::sweep::uniform;
use cifc_core::verify::{atlas, atlas_csv, run_suite, s_channel_atlas, AtlasGrid, AtlasMode};
use cifc_core::{classify, ChannelParams, Error, RateRegion, Sweep};
use serde_json::json;

use input::{ChannelArgs, FileConfig, Format};

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure { code: 2, message }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 1, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RegimeMismatch(_) => 3,
            Error::InvalidArgument(_)
            | Error::EmptyInput
            | Error::DegenerateDirectLink
            | Error::InvalidChannel(_)
            | Error::InvalidTransform(_)
            | Error::SingularPreset(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "cifc", version, about = "Bounds and capacity regions of the Gaussian cognitive interference channel")]
struct Cli {
    /// JSON file mirroring the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output encoding: csv (default) or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output path (a directory for `region` and `verify`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Coarser grids, as used by bulk sweeps.
    #[arg(long, global = true)]
    fast: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regime flags, condition margins and the capacity result that applies.
    Classify {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Boundary tables of outer bounds and achievable schemes.
    Region {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Comma-separated ids; prefix with `outer:` or `inner:` to disambiguate `best`.
        #[arg(long, value_delimiter = ',')]
        ids: Vec<String>,
    },
    /// Additive and multiplicative gap between an outer bound and a scheme.
    Gap {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        outer: Option<String>,
        #[arg(long)]
        inner: Option<String>,
    },
    /// Regime or gap map over a real (a, b) grid, or the S-channel (P, b) slice.
    Atlas {
        /// Sets both powers.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        p2: Option<f64>,
        /// regime or gap.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a_max: Option<f64>,
        #[arg(long)]
        b_min: Option<f64>,
        #[arg(long)]
        b_max: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        /// S-channel slice: `a = 0`, `P1 = P2 = P` log-spaced on [p-min, p-max].
        #[arg(long)]
        s_slice: bool,
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
    },
    /// Theorem suite over seeded random channels.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Number of channels (default 1000).
        #[arg(long)]
        n: Option<usize>,
    },
}

struct Ctx {
    file: FileConfig,
    format: Format,
    out: Option<PathBuf>,
    fast: bool,
}

impl Ctx {
    fn sweep(&self, bulk: bool) -> Sweep {
        match &self.file.sweep {
            Some(s) => s.clone(),
            None if self.fast || bulk || self.file.fast == Some(true) => Sweep::fast(),
            None => Sweep::default(),
        }
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(path, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_classify(ctx: &Ctx, channel: &ChannelArgs) -> Result<u8, Failure> {
    let ch = channel.resolve(&ctx.file)?;
    let rep = classify(&ch, cifc_core::channel::DEFAULT_TOL);
    let text = match ctx.format {
        Format::Json => json_text(&json!({
            "channel": ch,
            "label": rep.capacity_known.label(),
            "report": rep,
        })),
        Format::Csv => {
            let mut header = vec![
                "a_re", "a_im", "b", "p1", "p2", "weak", "strong", "very_strong", "pdc", "s_channel", "z_channel",
                "degraded", "capacity_known",
            ];
            let keys: Vec<String> = rep.margins.keys().map(|k| format!("margin_{k}")).collect();
            header.extend(keys.iter().map(String::as_str));
            let mut row = vec![fmt12(ch.a.re), fmt12(ch.a.im), fmt12(ch.b), fmt12(ch.p1), fmt12(ch.p2)];
            for f in [rep.weak, rep.strong, rep.very_strong, rep.pdc, rep.s_channel, rep.z_channel, rep.degraded] {
                row.push(f.to_string());
            }
            row.push(rep.capacity_known.label().to_string());
            row.extend(rep.margins.values().map(|&m| fmt12(m)));
            csv_table(&header, [row])
        }
    };
    ctx.emit(&text)?;
    Ok(0)
}

/// Bare ids resolve to the outer bound when one exists with that name.
fn region_by_id(ch: &ChannelParams, id: &str, sweep: &Sweep) -> Result<RateRegion, Failure> {
    if let Some(rest) = id.strip_prefix("outer:") {
        return Ok(outer_by_id(ch, rest, sweep)?.with_id(id));
    }
    if let Some(rest) = id.strip_prefix("inner:") {
        return Ok(inner_by_id(ch, rest, sweep)?.with_id(id));
    }
    let is_outer = OUTER_IDS.contains(&id) || id.starts_with("transform:");
    if is_outer {
        Ok(outer_by_id(ch, id, sweep)?)
    } else if INNER_IDS.contains(&id) || id.starts_with("e:") {
        Ok(inner_by_id(ch, id, sweep)?)
    } else {
        Err(Failure::usage(format!(
            "--ids: unknown id `{id}`; outer: {}; inner: {}",
            OUTER_IDS.join(", "),
            INNER_IDS.join(", ")
        )))
    }
}

fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn cmd_region(ctx: &Ctx, channel: &ChannelArgs, ids: &[String]) -> Result<u8, Failure> {
    let ch = channel.resolve(&ctx.file)?;
    let ids: Vec<String> = if ids.is_empty() { ctx.file.ids.clone().unwrap_or_default() } else { ids.to_vec() };
    if ids.is_empty() {
        return Err(Failure::usage("--ids: at least one bound or scheme id is required".into()));
    }
    let sweep = ctx.sweep(false);
    let regions = ids.iter().map(|id| region_by_id(&ch, id, &sweep)).collect::<Result<Vec<_>, _>>()?;
    if let Some(dir) = &ctx.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        for r in &regions {
            let (ext, text) = match ctx.format {
                Format::Csv => ("csv", region_to_csv(r)),
                Format::Json => ("json", region_to_json(r)),
            };
            let path = dir.join(format!("{}.{ext}", file_stem(&r.id)));
            std::fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        }
        return Ok(0);
    }
    let mut text = String::new();
    match ctx.format {
        Format::Csv => {
            for (k, r) in regions.iter().enumerate() {
                if k > 0 {
                    text.push('\n');
                }
                writeln!(text, "# {}", r.id).unwrap();
                text.push_str(&region_to_csv(r));
            }
        }
        Format::Json => {
            let all: Vec<serde_json::Value> =
                regions.iter().map(|r| serde_json::from_str(&region_to_json(r)).expect("valid json")).collect();
            text = json_text(&serde_json::Value::Array(all));
        }
    }
    print!("{text}");
    Ok(0)
}

fn cmd_gap(ctx: &Ctx, channel: &ChannelArgs, outer: &Option<String>, inner: &Option<String>) -> Result<u8, Failure> {
    let ch = channel.resolve(&ctx.file)?;
    let outer_id = outer.clone().or(ctx.file.outer.clone()).unwrap_or_else(|| "best".into());
    let inner_id = inner.clone().or(ctx.file.inner.clone()).unwrap_or_else(|| "best".into());
    let sweep = ctx.sweep(false);
    let o = outer_by_id(&ch, &outer_id, &sweep)?;
    let i = inner_by_id(&ch, &inner_id, &sweep)?;
    let g = gap_report(&o, &i);
    let text = match ctx.format {
        Format::Json => json_text(&json!({ "outer": outer_id, "inner": inner_id, "gap": g })),
        Format::Csv => csv_table(
            &["outer", "inner", "additive", "worst_r1_additive", "multiplicative", "worst_r1_multiplicative"],
            [vec![
                outer_id,
                inner_id,
                fmt12(g.additive),
                fmt12(g.worst_r1_additive),
                fmt12(g.multiplicative),
                fmt12(g.worst_r1_multiplicative),
            ]],
        ),
    };
    ctx.emit(&text)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_atlas(
    ctx: &Ctx,
    p: Option<f64>,
    p1: Option<f64>,
    p2: Option<f64>,
    mode: &Option<String>,
    bounds: [Option<f64>; 4],
    resolution: Option<usize>,
    s_slice: bool,
    p_range: (Option<f64>, Option<f64>),
) -> Result<u8, Failure> {
    let f = &ctx.file;
    let d = AtlasGrid::default();
    let grid = AtlasGrid {
        a_min: bounds[0].or(f.a_min).unwrap_or(d.a_min),
        a_max: bounds[1].or(f.a_max).unwrap_or(d.a_max),
        b_min: bounds[2].or(f.b_min).unwrap_or(d.b_min),
        b_max: bounds[3].or(f.b_max).unwrap_or(d.b_max),
        resolution: resolution.or(f.resolution).unwrap_or(d.resolution),
    };
    if grid.resolution < 2 {
        return Err(Failure::usage("--resolution: must be at least 2".into()));
    }
    if s_slice {
        let lo = p_range.0.unwrap_or(0.1);
        let hi = p_range.1.unwrap_or(1000.0);
        if !(lo > 0.0 && hi >= lo) {
            return Err(Failure::usage("--p-min/--p-max: need 0 < p-min <= p-max".into()));
        }
        let ps: Vec<f64> = uniform(lo.log10(), hi.log10(), grid.resolution).into_iter().map(|e| 10f64.powf(e)).collect();
        let bs = uniform(grid.b_min, grid.b_max, grid.resolution);
        let cells = s_channel_atlas(&ps, &bs)?;
        let text = match ctx.format {
            Format::Json => json_text(&json!(cells.iter().map(|(p, c)| json!({"p": p, "cell": c})).collect::<Vec<_>>())),
            Format::Csv => {
                let body = atlas_csv(&cells.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>());
                let mut lines = body.lines();
                let mut text = format!("p,{}\n", lines.next().unwrap_or_default());
                for ((p, _), line) in cells.iter().zip(lines) {
                    writeln!(text, "{},{line}", fmt12(*p)).unwrap();
                }
                text
            }
        };
        ctx.emit(&text)?;
        return Ok(0);
    }
    let p1 = p1.or(p).or(f.p1).or(f.p).ok_or_else(|| Failure::usage("--p or --p1 is required".into()))?;
    let p2 = p2.or(p).or(f.p2).or(f.p).ok_or_else(|| Failure::usage("--p or --p2 is required".into()))?;
    let mode: AtlasMode = mode
        .clone()
        .or(f.mode.clone())
        .unwrap_or_else(|| "regime".into())
        .parse()
        .map_err(|e: Error| Failure::usage(format!("--mode: {e}")))?;
    let cells = atlas(&grid, p1, p2, mode, &ctx.sweep(true))?;
    let text = match ctx.format {
        Format::Json => json_text(&json!(cells)),
        Format::Csv => atlas_csv(&cells),
    };
    ctx.emit(&text)?;
    Ok(0)
}

fn cmd_verify(ctx: &Ctx, seed: Option<u64>, n: Option<usize>) -> Result<u8, Failure> {
    let seed = seed.or(ctx.file.seed).unwrap_or(42);
    let n = n.or(ctx.file.n).unwrap_or(1000);
    if n == 0 {
        return Err(Failure::usage("--n: the suite needs at least one channel".into()));
    }
    let reports = run_suite(seed, n, &ctx.sweep(true))?;
    println!("seed {seed}, {n} channels");
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let failing: Vec<_> = reports.iter().filter(|r| !r.holds).collect();
    if let Some(worst) = failing.iter().max_by(|a, b| a.worst_violation.total_cmp(&b.worst_violation)) {
        if let Some(rec) = worst.worst() {
            let c = &rec.channel;
            println!(
                "worst offender: {} channel #{} (a = {}{:+}j, b = {}, p1 = {}, p2 = {}): value {} > bound {} ({})",
                worst.theorem_id,
                rec.index,
                fmt12(c.a.re),
                c.a.im,
                fmt12(c.b),
                fmt12(c.p1),
                fmt12(c.p2),
                fmt12(rec.value),
                fmt12(rec.bound),
                rec.note
            );
        }
    }
    if let Some(dir) = &ctx.out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        match ctx.format {
            Format::Csv => {
                for r in &reports {
                    let path = dir.join(format!("{}.csv", file_stem(&r.theorem_id)));
                    std::fs::write(&path, r.to_csv()).map_err(|e| Failure::io(&path, e))?;
                }
            }
            Format::Json => {
                let path = dir.join("reports.json");
                std::fs::write(&path, json_text(&json!(reports))).map_err(|e| Failure::io(&path, e))?;
            }
        }
    }
    Ok(if failing.is_empty() { 0 } else { 1 })
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CIFC_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("CIFC_THREADS: expected a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("CIFC_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    init_threads()?;
    let file = FileConfig::load(cli.config.as_deref())?;
    let format = match (cli.format, &file.format) {
        (Some(f), _) => f,
        (None, Some(s)) => s.parse().map_err(|e: String| Failure::usage(format!("--format: {e}")))?,
        (None, None) => Format::Csv,
    };
    let out = cli.out.clone().or(file.out.clone());
    let ctx = Ctx { file, format, out, fast: cli.fast };
    match &cli.command {
        Command::Classify { channel } => cmd_classify(&ctx, channel),
        Command::Region { channel, ids } => cmd_region(&ctx, channel, ids),
        Command::Gap { channel, outer, inner } => cmd_gap(&ctx, channel, outer, inner),
        Command::Atlas { p, p1, p2, mode, a_min, a_max, b_min, b_max, resolution, s_slice, p_min, p_max } => cmd_atlas(
            &ctx,
            *p,
            *p1,
            *p2,
            mode,
            [*a_min, *a_max, *b_min, *b_max],
            *resolution,
            *s_slice,
            (p_min.or(ctx.file.p_min), p_max.or(ctx.file.p_max)),
        ),
        Command::Verify { seed, n } => cmd_verify(&ctx, *seed, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
