//! Command-line front end of the `nlbreak` binary.
//!
//! Exit codes: 0 success, 1 failed check or computation, 2 usage error.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::{QubitChannel, CP_TOL};
use crate::error::Error;
use crate::nlbreak::{
    breaks_mes_nonlocality, crossing_from_rows, family_sweep, is_strongly_nlb, linspace, Family, FamilyRow, SweepGrid,
};
use crate::state::{c_spectrum, hidden_nonlocality, horodecki_m};
use crate::verify::{self, VerifyOptions};
use crate::volume::{estimate_volumes, estimate_volumes_with_workers, Mode, VolumeReport};

#[derive(Debug, Parser)]
#[command(name = "nlbreak", version, about = "CHSH nonlocality breaking of qubit channels")]
pub struct Cli {
    /// Output format; defaults to a table on a terminal and JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one channel: CP, unital, EB, MES-breaking, strongly breaking.
    Analyze(ChannelArgs),
    /// Best CHSH value over pure inputs, along a family or for one channel.
    Sweep(SweepArgs),
    /// Monte Carlo volumes of the channel classes.
    Volume(VolumeArgs),
    /// Run every reference check and report expected against computed values.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel JSON, inline (`{"t": [...], "lambda": [...]}`) or a file path.
    #[arg(long, conflicts_with = "family")]
    pub channel: Option<String>,
    /// Named family: ampdamp, extremal or qfamily.
    #[arg(long)]
    pub family: Option<Family>,
    /// Amplitude-damping strength.
    #[arg(long)]
    pub p: Option<f64>,
    /// q-family weight.
    #[arg(long)]
    pub q: Option<f64>,
    /// Extremal-channel angle u.
    #[arg(long)]
    pub u: Option<f64>,
    /// Extremal-channel angle v (also fixes v in extremal sweeps).
    #[arg(long)]
    pub v: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: ChannelArgs,
    /// First family parameter (default: start of the family's range).
    #[arg(long)]
    pub from: Option<f64>,
    /// Last family parameter (default: end of the family's range).
    #[arg(long)]
    pub to: Option<f64>,
    /// Family parameter step.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Euler-angle grid spacing in radians.
    #[arg(long, default_value_t = 0.1)]
    pub angle_step: f64,
    /// Schmidt-coefficient grid spacing.
    #[arg(long, default_value_t = 0.05)]
    pub lambda_step: f64,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    /// Number of draws; scientific notation such as 1e7 is accepted.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub samples: u64,
    /// Seed of the sample stream.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample unital channels (t = 0) only.
    #[arg(long)]
    pub unital: bool,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Full-mode volumes with 10⁶ samples and a widened tolerance.
    #[arg(long)]
    pub fast: bool,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
    /// Run only these criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}

fn parse_count(s: &str) -> Result<u64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(x.is_finite() && x >= 1.0 && x.fract() == 0.0 && x <= 1e15) {
        return Err(format!("'{s}' is not a positive whole number"));
    }
    Ok(x as u64)
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(Error),
    /// A verification ran and at least one check failed.
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) | Failure::Checks => 1,
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Compute(e) => eprintln!("error: {e}"),
                Failure::Checks => {}
            }
            f.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Outcome {
    let format = cli.format.unwrap_or(if cli.out.is_none() && std::io::stdout().is_terminal() {
        Format::Table
    } else {
        Format::Json
    });
    let mut sink = Sink::open(cli.out.as_ref())?;
    match &cli.command {
        Command::Analyze(a) => analyze(a, format, &mut sink),
        Command::Sweep(a) => sweep(a, format, &mut sink),
        Command::Volume(a) => volume(a, format, &mut sink),
        Command::VerifyPaper(a) => verify_paper(a, if a.json { Format::Json } else { format }, &mut sink),
    }
}

struct Sink(Box<dyn Write>);

impl Sink {
    fn open(path: Option<&PathBuf>) -> Result<Self, Failure> {
        Ok(Sink(match path {
            Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?),
            None => Box::new(std::io::stdout().lock()),
        }))
    }

    fn text(&mut self, s: &str) -> Outcome {
        self.0.write_all(s.as_bytes()).map_err(|e| Failure::Compute(e.into()))
    }

    fn json<T: Serialize>(&mut self, v: &T) -> Outcome {
        let s = serde_json::to_string(v).map_err(|e| Failure::Compute(e.into()))?;
        self.text(&(s + "\n"))
    }

    fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> Outcome {
        let mut w = csv::Writer::from_writer(&mut self.0);
        let wrap = |e: csv::Error| Failure::Compute(e.into());
        w.write_record(header).map_err(wrap)?;
        for r in rows {
            w.write_record(r).map_err(wrap)?;
        }
        w.flush().map_err(|e| Failure::Compute(e.into()))
    }
}

fn need(name: &str, v: Option<f64>) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")))
}

/// The channel named by `--channel` or `--family` with its parameter flags.
pub fn resolve_channel(a: &ChannelArgs) -> Result<QubitChannel, Failure> {
    if let Some(spec) = &a.channel {
        let text = if spec.trim_start().starts_with('{') {
            spec.clone()
        } else {
            std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{spec}: {e}")))?
        };
        return serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed channel: {e}")));
    }
    let ch = match a.family {
        Some(Family::AmpDamp) => Family::AmpDamp.channel(need("p", a.p)?, 0.0),
        Some(Family::QFamily) => Family::QFamily.channel(need("q", a.q)?, 0.0),
        Some(Family::Extremal) => Family::Extremal.channel(need("u", a.u)?, need("v", a.v)?),
        None => return Err(Failure::Usage("give --channel or --family".into())),
    };
    ch.map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub channel: QubitChannel,
    pub completely_positive: bool,
    pub unital: bool,
    pub entanglement_breaking: bool,
    pub nlb_mes: bool,
    pub snlb: bool,
    pub choi_m: f64,
    pub choi_chsh: f64,
    pub c_spectrum: [f64; 4],
    pub c_ratio: f64,
    pub filtered_optimal_violation: f64,
}

pub fn analyze_channel(ch: &QubitChannel) -> crate::Result<AnalyzeReport> {
    let choi = ch.choi_state()?;
    let m = horodecki_m(&choi);
    let spec = c_spectrum(&choi)?;
    let hidden = hidden_nonlocality(&choi)?;
    Ok(AnalyzeReport {
        channel: ch.clone(),
        completely_positive: true,
        unital: ch.is_unital(1e-12),
        entanglement_breaking: ch.is_entanglement_breaking(CP_TOL)?,
        nlb_mes: breaks_mes_nonlocality(ch)?,
        snlb: is_strongly_nlb(ch)?,
        choi_m: m,
        choi_chsh: 2.0 * m.sqrt(),
        c_spectrum: spec.values,
        c_ratio: spec.ratio,
        filtered_optimal_violation: hidden.optimal_violation,
    })
}

fn mark(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(a: &ChannelArgs, format: Format, sink: &mut Sink) -> Outcome {
    let ch = resolve_channel(a)?;
    if !ch.is_completely_positive(CP_TOL) {
        let min = crate::linalg::min_eigenvalue_hermitian(&ch.choi_matrix());
        return Err(Failure::Compute(Error::NotCompletelyPositive(min)));
    }
    let r = analyze_channel(&ch)?;
    let rows: Vec<(&str, String)> = vec![
        ("completely_positive", mark(r.completely_positive).into()),
        ("unital", mark(r.unital).into()),
        ("entanglement_breaking", mark(r.entanglement_breaking).into()),
        ("nlb_mes", mark(r.nlb_mes).into()),
        ("snlb", mark(r.snlb).into()),
        ("choi_m", format!("{:.10}", r.choi_m)),
        ("choi_chsh", format!("{:.10}", r.choi_chsh)),
        ("c_spectrum", format!("{:.10?}", r.c_spectrum)),
        ("c_ratio", format!("{:.10}", r.c_ratio)),
        ("filtered_optimal_violation", format!("{:.10}", r.filtered_optimal_violation)),
    ];
    match format {
        Format::Json => sink.json(&r),
        Format::Csv => sink
            .csv(&["quantity", "value"], &rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect::<Vec<_>>()),
        Format::Table => {
            let mut s = format!("channel t = {:?}, lambda = {:?}\n", r.channel.t, r.channel.lambda);
            for (k, v) in rows {
                s += &format!("  {k:<28} {v}\n");
            }
            sink.text(&s)
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepOutput {
    family: Option<Family>,
    parameter: Option<&'static str>,
    grid: SweepGrid,
    rows: Vec<FamilyRow>,
    crossing: Option<f64>,
}

fn sweep(a: &SweepArgs, format: Format, sink: &mut Sink) -> Outcome {
    let grid = SweepGrid { angle_step: a.angle_step, lambda_step: a.lambda_step };
    let prepared = grid.prepare().map_err(|e| Failure::Usage(e.to_string()))?;
    let out = match (a.source.family, &a.source.channel) {
        (Some(family), None) => {
            if !(a.step.is_finite() && a.step > 0.0) {
                return Err(Failure::Usage("--step must be positive".into()));
            }
            let (lo, hi) = family.default_range();
            let params = linspace(a.from.unwrap_or(lo), a.to.unwrap_or(hi), a.step);
            let v = if family == Family::Extremal { need("v", a.source.v)? } else { 0.0 };
            let rows = family_sweep(&prepared, family, &params, v)?;
            let crossing = crossing_from_rows(&prepared, family, v, &rows, 1e-3)?;
            SweepOutput { family: Some(family), parameter: Some(family.parameter_name()), grid, rows, crossing }
        }
        _ => {
            let ch = resolve_channel(&a.source)?;
            let r = prepared.max_m(&ch)?;
            let rows = vec![FamilyRow { param: f64::NAN, best_m: r.best_m, best_spec: r.best_spec }];
            SweepOutput { family: None, parameter: None, grid, rows, crossing: None }
        }
    };
    let pname = out.parameter.unwrap_or("param");
    match format {
        Format::Json => sink.json(&out),
        Format::Csv => {
            let rows: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|r| {
                    let [al, be, ga] = r.best_spec.euler;
                    let p = if r.param.is_nan() { String::new() } else { format!("{}", r.param) };
                    vec![
                        p,
                        format!("{:.12}", r.best_m),
                        format!("{}", r.best_spec.schmidt_lambda),
                        format!("{al}"),
                        format!("{be}"),
                        format!("{ga}"),
                    ]
                })
                .collect();
            sink.csv(&[pname, "best_m", "schmidt_lambda", "alpha", "beta", "gamma"], &rows)
        }
        Format::Table => {
            let mut s = format!("{:>8} {:>14} {:>8} {:>22}\n", pname, "best M", "λ", "Euler (α, β, γ)");
            for r in &out.rows {
                let [al, be, ga] = r.best_spec.euler;
                let p = if r.param.is_nan() { "-".to_string() } else { format!("{:.4}", r.param) };
                s += &format!(
                    "{p:>8} {:>14.10} {:>8.3} ({al:.3}, {be:.3}, {ga:.3})\n",
                    r.best_m, r.best_spec.schmidt_lambda
                );
            }
            if let Some(x) = out.crossing {
                s += &format!("best M first exceeds 1 near {pname} = {x:.4}\n");
            }
            sink.text(&s)
        }
    }
}

fn volume(a: &VolumeArgs, format: Format, sink: &mut Sink) -> Outcome {
    let mode = if a.unital { Mode::Unital } else { Mode::Full };
    let report: VolumeReport = match a.workers {
        Some(w) => estimate_volumes_with_workers(a.samples, a.seed, mode, w as usize)?,
        None => estimate_volumes(a.samples, a.seed, mode)?,
    };
    match format {
        Format::Json => sink.json(&report),
        Format::Table => sink.text(&report.table()),
        Format::Csv => {
            let f = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v}"));
            let row = vec![
                report.mode.to_string(),
                report.seed.to_string(),
                report.samples_drawn.to_string(),
                report.cp_accepted.to_string(),
                report.eb_count.to_string(),
                report.nlb_mes_count.to_string(),
                report.snlb_count.to_string(),
                f(report.fractions.eb),
                f(report.fractions.nlb_mes),
                f(report.fractions.snlb),
            ];
            sink.csv(
                &[
                    "mode",
                    "seed",
                    "samples",
                    "cp_accepted",
                    "eb",
                    "nlb_mes",
                    "snlb",
                    "eb_fraction",
                    "nlb_mes_fraction",
                    "snlb_fraction",
                ],
                &[row],
            )
        }
    }
}

fn verify_paper(a: &VerifyArgs, format: Format, sink: &mut Sink) -> Outcome {
    let opts = VerifyOptions { fast: a.fast };
    let ids: Vec<u8> = if a.only.is_empty() { verify::CRITERIA.iter().map(|c| c.0).collect() } else { a.only.clone() };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = verify::run_criterion(id, opts)?;
        if format == Format::Table {
            sink.text(&o.render())?;
        }
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed());
    match format {
        Format::Json => sink.json(&serde_json::json!({ "passed": passed, "criteria": outcomes }))?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = outcomes
                .iter()
                .flat_map(|o| {
                    o.checks.iter().map(move |c| {
                        vec![
                            o.id.to_string(),
                            c.name.clone(),
                            c.expected.clone(),
                            c.computed.clone(),
                            c.passed.to_string(),
                            c.gating.to_string(),
                        ]
                    })
                })
                .collect();
            sink.csv(&["criterion", "check", "expected", "computed", "passed", "gating"], &rows)?
        }
        Format::Table => {
            let n = outcomes.iter().filter(|o| o.passed()).count();
            sink.text(&format!("{n} of {} criteria passed\n", outcomes.len()))?
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
