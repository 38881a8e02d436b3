use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use boolnl::bounds::{standard_reports, BoundReport, BOUND_CSV_HEADER};
use boolnl::experiments::{
    exact_oracle, run_concentration, run_convergence, run_joint, ExperimentKind, ExperimentManifest,
};
use boolnl::nonlin::{nonlinearity, nonlinearity_exhaustive_par, NonlinearityResult};
use boolnl::rmcode::{greedy_separated_set, weight_census_par};
use boolnl::sampling::STREAM_FORMAT_VERSION;
use boolnl::truth_table::TABLE_FILE_MAGIC;
use boolnl::{RmCodeSpec, TruthTable};
use serde_json::{json, Value};

use crate::cli::{
    BoundsArgs, CensusArgs, Command, Common, Format, Input, JointArgs, NonlinArgs, OracleArgs, SepSetArgs, SweepArgs,
    TableArgs,
};

/// Failures after argument parsing; all exit with status 1.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Domain(#[from] boolnl::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl Failure {
    /// The reader went away (`boolnl ... | head`); not worth reporting.
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            Failure::Io(e) | Failure::Domain(boolnl::Error::Io(e)) => e,
            Failure::Domain(_) => return false,
        };
        io.kind() == io::ErrorKind::BrokenPipe
    }
}

type Outcome = Result<(), Failure>;

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_json(out: &mut dyn Write, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn parse_table(hex: &str, n: u32) -> Result<TruthTable, Failure> {
    let hex = hex.trim();
    let hex = hex.strip_prefix("0x").unwrap_or(hex);
    Ok(TruthTable::parse_hex(hex, n)?)
}

/// Tables from `--tt`, or from `--in` as a binary table file or as hex lines.
fn read_tables(input: &Input, n: u32) -> Result<Vec<TruthTable>, Failure> {
    if let Some(hex) = &input.tt {
        return Ok(vec![parse_table(hex, n)?]);
    }
    let path = input.input.as_ref().expect("clap requires --tt or --in");
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(TABLE_FILE_MAGIC) {
        let table = TruthTable::read_binary(bytes.as_slice())?;
        if table.n() != n {
            return Err(boolnl::Error::DimensionMismatch {
                left: table.n(),
                right: n,
            }
            .into());
        }
        return Ok(vec![table]);
    }
    let text =
        String::from_utf8(bytes).map_err(|_| boolnl::Error::Format("input is neither binary nor UTF-8".into()))?;
    let tables = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_table(l, n))
        .collect::<Result<Vec<_>, _>>()?;
    if tables.is_empty() {
        return Err(boolnl::Error::Format("no tables in input".into()).into());
    }
    Ok(tables)
}

/// Runs one subcommand. `meta` is the effective configuration, written next
/// to `--out` as `<out>.meta.json`.
pub fn run(command: Command, meta: Value) -> Outcome {
    let common = match &command {
        Command::Wht(a) | Command::Anf(a) => &a.common,
        Command::Nonlin(a) => &a.common,
        Command::Census(a) => &a.common,
        Command::SepSet(a) => &a.common,
        Command::Bounds(a) => &a.common,
        Command::McConverge(a) | Command::McConcentration(a) => &a.common,
        Command::McJoint(a) => &a.common,
        Command::OracleExact(a) => &a.common,
    };
    if let Some(out) = &common.out {
        let mut f = File::create(sibling(out, ".meta.json"))?;
        write_json(&mut f, &meta)?;
    }
    match command {
        Command::Wht(a) => wht(a),
        Command::Anf(a) => anf(a),
        Command::Nonlin(a) => nonlin(a),
        Command::Census(a) => census(a),
        Command::SepSet(a) => sep_set(a),
        Command::Bounds(a) => bounds(a),
        Command::McConverge(a) => mc_converge(a),
        Command::McJoint(a) => mc_joint(a),
        Command::McConcentration(a) => mc_concentration(a),
        Command::OracleExact(a) => oracle(a),
    }
}

fn format(common: &Common, default: Format) -> Format {
    common.format.unwrap_or(default)
}

fn wht(a: TableArgs) -> Outcome {
    let tables = read_tables(&a.input, a.n)?;
    let mut out = open_out(a.common.out.as_deref())?;
    for f in &tables {
        let spectrum = f.walsh_hadamard()?;
        match format(&a.common, Format::Csv) {
            Format::Csv => {
                writeln!(out, "a,w")?;
                for (i, w) in spectrum.values().iter().enumerate() {
                    writeln!(out, "{i},{w}")?;
                }
            }
            Format::Json => {
                let (a_max, w_max) = spectrum.max_abs();
                write_json(
                    &mut out,
                    &json!({
                        "n": f.n(),
                        "tt": f.to_hex(),
                        "values": spectrum.values(),
                        "max_abs_index": a_max,
                        "max_abs": w_max.unsigned_abs(),
                    }),
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn monomial_name(mask: u64) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..64)
        .filter(|j| mask >> j & 1 == 1)
        .map(|j| format!("x{}", j + 1))
        .collect()
}

fn anf(a: TableArgs) -> Outcome {
    let tables = read_tables(&a.input, a.n)?;
    let mut out = open_out(a.common.out.as_deref())?;
    for f in &tables {
        let anf = f.mobius_transform();
        match format(&a.common, Format::Json) {
            Format::Csv => {
                writeln!(out, "mask,monomial")?;
                for m in anf.monomials() {
                    writeln!(out, "{m},{}", monomial_name(m))?;
                }
            }
            Format::Json => {
                write_json(
                    &mut out,
                    &json!({
                        "n": f.n(),
                        "tt": f.to_hex(),
                        "degree": anf.degree(),
                        "anf_hex": anf.as_bits().to_hex(),
                        "monomials": anf.monomials().map(monomial_name).collect::<Vec<_>>(),
                    }),
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn nonlin(a: NonlinArgs) -> Outcome {
    let tables = read_tables(&a.input, a.n)?;
    let jobs = a.jobs.unwrap_or_else(default_jobs);
    let results = tables
        .iter()
        .map(|f| {
            if a.r == 1 || jobs <= 1 {
                nonlinearity(f, a.r)
            } else {
                nonlinearity_exhaustive_par(f, a.r, jobs)
            }
        })
        .collect::<Result<Vec<NonlinearityResult>, _>>()?;
    let mut out = open_out(a.common.out.as_deref())?;
    match format(&a.common, Format::Json) {
        Format::Json => {
            for res in &results {
                serde_json::to_writer(&mut out, &res.to_json()).map_err(io::Error::from)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            writeln!(out, "n,r,nonlinearity,y,lambda,ratio,best_message_hex")?;
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for res in &results {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    res.n,
                    res.r,
                    res.value,
                    res.y,
                    opt(res.lambda),
                    opt(res.ratio),
                    res.best_message_hex()
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn census(a: CensusArgs) -> Outcome {
    let spec = RmCodeSpec::new(a.r, a.n)?;
    let census = weight_census_par(&spec, a.jobs.unwrap_or_else(default_jobs))?;
    let mut out = open_out(a.common.out.as_deref())?;
    match format(&a.common, Format::Csv) {
        Format::Csv => write!(out, "{}", census.to_csv())?,
        Format::Json => write_json(&mut out, &census.to_json())?,
    }
    out.flush()?;
    Ok(())
}

fn sep_set(a: SepSetArgs) -> Outcome {
    let spec = RmCodeSpec::new(a.r, a.n)?;
    let set = greedy_separated_set(&spec, a.alpha)?;
    let mut out = open_out(a.common.out.as_deref())?;
    match format(&a.common, Format::Csv) {
        Format::Csv => write!(out, "{}", set.members_csv())?,
        Format::Json => {
            let mut summary = set.summary_json();
            summary["audit"] = json!(set.audit());
            summary["members_hex"] = json!(set.members().iter().map(|&m| set.message_hex(m)).collect::<Vec<_>>());
            write_json(&mut out, &summary)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_reports(out: &mut dyn Write, reports: &[BoundReport], fmt: Format) -> io::Result<()> {
    match fmt {
        Format::Csv => {
            writeln!(out, "{BOUND_CSV_HEADER}")?;
            for r in reports {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
        Format::Json => write_json(out, &serde_json::to_value(reports).map_err(io::Error::from)?)?,
    }
    out.flush()
}

fn bounds(a: BoundsArgs) -> Outcome {
    let mut reports = Vec::new();
    for &n in &a.n {
        reports.extend(standard_reports(n, a.r, a.alpha)?);
    }
    let mut out = open_out(a.common.out.as_deref())?;
    write_reports(&mut out, &reports, format(&a.common, Format::Csv))?;
    Ok(())
}

fn manifest(
    kind: ExperimentKind,
    n: Vec<u32>,
    r: u32,
    s: &crate::cli::Sampling,
    out: Option<&Path>,
) -> ExperimentManifest {
    let mut m = ExperimentManifest::new(kind, n, r, s.samples)
        .with_seed(s.seed)
        .with_jobs(s.jobs.unwrap_or_else(default_jobs));
    m.output_path = out.map(Path::to_path_buf);
    m
}

/// Rows go to `--out` (or stdout) as CSV; per-n summaries go to
/// `<out>.summary.json`. With `--format json` only the summaries are written.
fn mc_converge(a: SweepArgs) -> Outcome {
    let out_path = a.common.out.as_deref();
    let m = manifest(ExperimentKind::Converge, a.n, a.r, &a.sampling, out_path);
    m.validate()?;
    let summaries = match format(&a.common, Format::Csv) {
        Format::Csv => {
            let out = open_out(out_path)?;
            let summaries = run_convergence(&m, out)?;
            if let Some(p) = out_path {
                let mut f = File::create(sibling(p, ".summary.json"))?;
                write_json(&mut f, &json!(summaries))?;
            }
            summaries
        }
        Format::Json => {
            let summaries = run_convergence(&m, io::sink())?;
            let mut out = open_out(out_path)?;
            write_json(&mut out, &json!(summaries))?;
            out.flush()?;
            summaries
        }
    };
    debug_assert_eq!(summaries.len(), m.n_values.len());
    Ok(())
}

fn mc_concentration(a: SweepArgs) -> Outcome {
    let m = manifest(
        ExperimentKind::Concentration,
        a.n,
        a.r,
        &a.sampling,
        a.common.out.as_deref(),
    );
    let reports = run_concentration(&m)?;
    let mut out = open_out(a.common.out.as_deref())?;
    write_reports(&mut out, &reports, format(&a.common, Format::Csv))?;
    Ok(())
}

fn mc_joint(a: JointArgs) -> Outcome {
    let g = match &a.g_tt {
        Some(hex) => parse_table(hex, a.n)?,
        None => TruthTable::coordinate(a.n, 1)?,
    };
    let h = match &a.h_tt {
        Some(hex) => parse_table(hex, a.n)?,
        None => TruthTable::coordinate(a.n, 2)?,
    };
    let m = manifest(
        ExperimentKind::Joint,
        vec![a.n],
        a.r,
        &a.sampling,
        a.common.out.as_deref(),
    );
    let reports = run_joint(&m, &g, &h)?;
    let mut out = open_out(a.common.out.as_deref())?;
    write_reports(&mut out, &reports, format(&a.common, Format::Csv))?;
    Ok(())
}

fn oracle(a: OracleArgs) -> Outcome {
    let dist = exact_oracle(a.n, a.r)?;
    let mut out = open_out(a.common.out.as_deref())?;
    match format(&a.common, Format::Json) {
        Format::Json => write_json(&mut out, &dist.to_json())?,
        Format::Csv => {
            writeln!(out, "nonlinearity,count")?;
            for (v, c) in &dist.counts {
                writeln!(out, "{v},{c}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Effective configuration of a parsed invocation, for `<out>.meta.json`.
pub fn metadata(sub: &str, matches: &clap::ArgMatches) -> Value {
    let command = crate::cli::command();
    let known: Vec<String> = command
        .find_subcommand(sub)
        .map(|c| c.get_arguments().map(|a| a.get_id().to_string()).collect())
        .unwrap_or_default();
    let mut config = serde_json::Map::new();
    for id in matches.ids().filter(|id| known.iter().any(|k| k == id.as_str())) {
        if let Ok(Some(raw)) = matches.try_get_raw(id.as_str()) {
            let values: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            let value = match values.as_slice() {
                [one] => json!(one),
                _ => json!(values),
            };
            config.insert(id.as_str().to_string(), value);
        }
    }
    json!({
        "tool": "boolnl",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": sub,
        "stream_format_version": STREAM_FORMAT_VERSION,
        "config": config,
    })
}
