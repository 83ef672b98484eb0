use std::io::{Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use roomgain::fom::Averaging;
use roomgain::io::job::{parse_job_request, ErrorClass, GridArgs, JobResult, PointArgs, SweepArgs};
use roomgain::io::{
    heatmap_csv, parse_layout_document, read_text, run_job, sweep_csv, ErrorBody, JobContext, JobError, JobMode,
    JobRequest, ParamOverrides, DEFAULT_PRESET, PRESET_DIR_ENV,
};
use roomgain::oracle::SuiteOptions;
use roomgain::service::{serve, ServiceConfig};

const EXIT_PROBE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(name = "roomgain", version, about = "Interference and power gain figures of merit for floor plans")]
struct Cli {
    /// Radio parameter preset.
    #[arg(long, global = true, env = "ROOMGAIN_PRESET", default_value = DEFAULT_PRESET)]
    preset: String,
    /// Directory of additional `<name>.toml` presets.
    #[arg(long, global = true, env = PRESET_DIR_ENV)]
    preset_dir: Option<PathBuf>,
    /// Override one preset field, e.g. `--set p_th_dbw_m2=-90`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct LayoutSource {
    /// Layout document (JSON).
    #[arg(long)]
    layout: Option<PathBuf>,
    /// Shipped layout: rect-5x10, l-shape or office-a1.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AveragingArg {
    Linear,
    Db,
}

impl From<AveragingArg> for Averaging {
    fn from(a: AveragingArg) -> Self {
        match a {
            AveragingArg::Linear => Averaging::Linear,
            AveragingArg::Db => Averaging::Db,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the coverage radii R_O, R_L, R_N.
    Radii {
        #[arg(long)]
        json: bool,
    },
    /// Figures of merit at one probe point (JSON).
    Evaluate {
        #[command(flatten)]
        source: LayoutSource,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        /// Minimum probe-to-wall distance [m].
        #[arg(long, default_value_t = roomgain::DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Figures of merit over a grid of cell centres.
    Heatmap {
        #[command(flatten)]
        source: LayoutSource,
        /// Cell size [m] (default 0.25).
        #[arg(long, conflicts_with = "cells")]
        res: Option<f64>,
        /// Cells along the longer side instead of a cell size.
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long, default_value_t = roomgain::DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, value_enum, default_value = "linear")]
        averaging: AveragingArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file (default stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Room-average gains of rectangles over areas × aspect ratios.
    Sweep {
        /// Floor areas [m²], comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        areas: Vec<f64>,
        /// Aspect ratios (≥ 1), comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        ars: Vec<f64>,
        #[arg(long, default_value_t = roomgain::DEFAULT_RESOLUTION)]
        res: f64,
        #[arg(long, default_value_t = roomgain::DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, value_enum, default_value = "linear")]
        averaging: AveragingArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle validation suite; exit 4 if any comparison fails.
    Validate {
        /// Wall distances per angle in the toy-model sweep.
        #[arg(long, default_value_t = 20)]
        quad_points: usize,
        /// Probe points per Monte Carlo case.
        #[arg(long, default_value_t = 20)]
        probes: usize,
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Skip the Monte Carlo comparisons.
        #[arg(long)]
        no_mc: bool,
        /// Skip the closed form vs Monte Carlo timing.
        #[arg(long)]
        no_timing: bool,
        /// Print the full report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run a JSON job request from a file (`-` for stdin).
    Job { request: PathBuf },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Evaluation worker threads (default: one per core).
        #[arg(long)]
        workers: Option<usize>,
    },
}

impl Cli {
    fn request(&self, mode: JobMode, source: Option<&LayoutSource>, args: serde_json::Value) -> anyhow::Result<JobRequest> {
        let mut overrides = ParamOverrides::default();
        for s in &self.set {
            overrides.set(s).map_err(JobError::from)?;
        }
        let (layout, layout_ref) = match source {
            Some(LayoutSource { layout: Some(path), .. }) => {
                (Some(read_text(path).and_then(|t| parse_layout_document(&t)).map_err(JobError::from)?), None)
            }
            Some(LayoutSource { fixture: Some(name), .. }) => (None, Some(name.clone())),
            _ => (None, None),
        };
        Ok(JobRequest { layout, layout_ref, preset: Some(self.preset.clone()), overrides, mode: Some(mode), args })
    }

    fn context(&self) -> JobContext {
        JobContext { preset_dir: self.preset_dir.clone() }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("responses always serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let ctx = cli.context();
    match &cli.command {
        Command::Radii { json } => {
            let req = cli.request(JobMode::Point, None, serde_json::Value::Null)?;
            let (params, _) = req.resolve_params(&ctx)?;
            let r = params.radii;
            if *json {
                emit(None, &pretty(&r))?;
            } else {
                emit(None, &format!("R_O = {:.3} m\nR_L = {:.3} m\nR_N = {:.3} m\n", r.r_o, r.r_l, r.r_n))?;
            }
        }
        Command::Evaluate { source, x, y, margin } => {
            let args = serde_json::to_value(PointArgs { x: *x, y: *y, margin: *margin })?;
            let resp = run_job(&cli.request(JobMode::Point, Some(source), args)?, &ctx)?;
            emit(None, &pretty(&resp))?;
        }
        Command::Heatmap { source, res, cells, margin, averaging, format, out } => {
            let args = GridArgs { resolution: *res, cells: *cells, margin: Some(*margin), averaging: (*averaging).into() };
            let resp = run_job(&cli.request(JobMode::Grid, Some(source), serde_json::to_value(args)?)?, &ctx)?;
            let JobResult::Grid(grid) = &resp.result else { unreachable!("grid job returns a grid") };
            let text = match format {
                Format::Csv => heatmap_csv(grid),
                Format::Json => pretty(grid),
            };
            emit(out.as_deref(), &text)?;
            for d in &resp.diagnostics {
                eprintln!("{d}");
            }
        }
        Command::Sweep { areas, ars, res, margin, averaging, format, out } => {
            let args = SweepArgs {
                areas: areas.clone(),
                aspect_ratios: ars.clone(),
                resolution: Some(*res),
                margin: Some(*margin),
                averaging: (*averaging).into(),
            };
            let resp = run_job(&cli.request(JobMode::Sweep, None, serde_json::to_value(args)?)?, &ctx)?;
            let JobResult::Sweep(sweep) = &resp.result else { unreachable!("sweep job returns rows") };
            let text = match format {
                Format::Csv => sweep_csv(&sweep.rows),
                Format::Json => pretty(&sweep.rows),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Validate { quad_points, probes, samples, seed, no_mc, no_timing, json } => {
            let opts = SuiteOptions {
                quad_points: *quad_points,
                monte_carlo: !no_mc,
                mc_probes: *probes,
                mc_samples: *samples,
                seed: *seed,
                timing: !no_timing,
            };
            let resp = run_job(&cli.request(JobMode::Validate, None, serde_json::to_value(opts)?)?, &ctx)?;
            let JobResult::Validate(report) = &resp.result else { unreachable!("validate job returns a report") };
            if *json {
                emit(None, &pretty(report))?;
            } else {
                emit(None, &format!("{report}\n"))?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
        }
        Command::Job { request } => {
            let text = if request.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                read_text(request).map_err(JobError::from)?
            };
            let req = parse_job_request(&text).map_err(JobError::from)?;
            let resp = run_job(&req, &ctx)?;
            emit(None, &pretty(&resp))?;
            if !resp.passed() {
                return Ok(ExitCode::from(EXIT_VALIDATION));
            }
        }
        Command::Serve { port, host, workers } => {
            let addr = SocketAddr::new(*host, *port);
            let config = ServiceConfig { preset_dir: cli.preset_dir.clone(), workers: *workers };
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(serve(addr, config))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// One JSON line on stderr and the exit code for the error's class.
fn report_error(e: &anyhow::Error) -> ExitCode {
    let (body, code) = match e.downcast_ref::<JobError>() {
        Some(j) => {
            let code = match j.class() {
                ErrorClass::Probe => EXIT_PROBE,
                ErrorClass::Input => EXIT_INPUT,
                ErrorClass::Internal => 1,
            };
            (j.body(), code)
        }
        None => (
            ErrorBody {
                error: "internal".into(),
                message: format!("{e:#}"),
                path: None,
                line: None,
                column: None,
                details: serde_json::Value::Null,
            },
            1,
        ),
    };
    eprintln!("{}", serde_json::to_string(&body).expect("error bodies always serialize"));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let body = serde_json::json!({ "error": "usage", "message": e.render().to_string() });
            eprintln!("{body}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}
