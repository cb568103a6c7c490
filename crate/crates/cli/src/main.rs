mod setlit;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dcover::bounds::{default_grid, lemma_bound_table, Delta, Order};
use dcover::census::{exhaustive_census_records, monte_carlo_census_records, unlabeled_census, CensusReport};
use dcover::graph::ConnectionSet;
use dcover::group::{AbelianGroup, GroupSpec};
use dcover::lemmas;
use dcover::stability::{Classifier, StabilityRecord};
use dcover::{Caps, HpBoundProfile};
use serde_json::json;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "dcover", version, about = "Stability of Cayley graphs of abelian groups under the canonical double cover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one connection set.
    Classify(ClassifyArgs),
    /// Classify every inverse-closed set, or a uniform sample.
    Census(CensusArgs),
    /// Run the exact structural checks over all abelian groups up to an order.
    CheckLemmas(CheckArgs),
    /// Evaluate the proportion bounds.
    Bounds(BoundsArgs),
}

#[derive(Args, Clone)]
struct CapArgs {
    /// Largest graph (in vertices) handed to the automorphism search.
    #[arg(long, default_value_t = Caps::default().graph_vertices)]
    max_vertices: usize,
    /// Largest group order enumerated for Aut(G) and Hol(G).
    #[arg(long, default_value_t = Caps::default().group_order)]
    max_group_order: usize,
    /// Largest |B(S)| enumerated element by element.
    #[arg(long, default_value_t = Caps::default().perm_elements)]
    max_b_elements: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            graph_vertices: self.max_vertices,
            group_order: self.max_group_order,
            perm_elements: self.max_b_elements,
            ..Caps::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Group, e.g. C5 or C2xC10.
    group: String,
    /// Elements, e.g. `1,4` or `(1,0),(0,3)`; empty for the empty set.
    set: String,
    /// Close the set under negation instead of rejecting it.
    #[arg(long)]
    symmetrize: bool,
    #[arg(long, value_enum, default_value_t = RecordFormat::Json)]
    format: RecordFormat,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusFormat {
    Csv,
    Json,
    Jsonl,
}

#[derive(Args)]
struct CensusArgs {
    group: String,
    /// Every inverse-closed set.
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Number of uniform samples.
    #[arg(long, requires = "seed")]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "DCOVER_WORKERS", default_value_t = 1)]
    workers: usize,
    /// csv: one row per bucket; json: full report; jsonl: one record per set.
    #[arg(long, value_enum, default_value_t = CensusFormat::Json)]
    format: CensusFormat,
    /// Also group the Cayley graphs up to isomorphism (exhaustive only).
    #[arg(long)]
    unlabeled: bool,
    /// Exit with status 3 when any field is indeterminate.
    #[arg(long)]
    strict: bool,
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: CapArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 16)]
    order_limit: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Table)]
    format: TableFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundsFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct BoundsArgs {
    /// Group orders; may be repeated. `2^t` is accepted.
    #[arg(long = "r")]
    r: Vec<String>,
    /// Values in (0, 1/2) as decimals or fractions; may be repeated.
    #[arg(long)]
    delta: Vec<String>,
    /// The default grid: r = 2^10..2^30 against delta in {0.01, 0.05, 0.1, 0.2}.
    #[arg(long)]
    grid: bool,
    /// Mantissa bits.
    #[arg(long, default_value_t = dcover::real::DEFAULT_PRECISION)]
    precision: usize,
    #[arg(long, value_enum, default_value_t = BoundsFormat::Csv)]
    format: BoundsFormat,
}

/// An error that maps to a specific exit status.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn parse_group(s: &str) -> Result<AbelianGroup> {
    let spec: GroupSpec = s.parse()?;
    Ok(AbelianGroup::from_spec(&spec)?)
}

fn out_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// A record as a JSON object carrying `schema_version`.
fn versioned_record(rec: &StabilityRecord) -> Result<serde_json::Value> {
    let mut v = serde_json::to_value(rec)?;
    v["schema_version"] = json!(SCHEMA_VERSION);
    Ok(v)
}

fn write_records_csv(w: &mut dyn Write, recs: &[StabilityRecord]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(StabilityRecord::CSV_HEADER)?;
    for r in recs {
        wr.write_record(r.csv_row())?;
    }
    wr.flush()?;
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let g = parse_group(&a.group)?;
    let caps = a.caps.caps();
    let mut elems = setlit::parse_set(&g, &a.set)?;
    if a.symmetrize {
        let extra: Vec<usize> = elems.iter().map(|&x| g.neg(x)).collect();
        elems.extend(extra);
        elems.sort_unstable();
        elems.dedup();
    }
    let s = ConnectionSet::from_elements(&g, &elems).map_err(|e| match e {
        dcover::Error::NotInverseClosed => anyhow::anyhow!("{} is not inverse-closed in {g}; pass --symmetrize to close it", a.set),
        e => e.into(),
    })?;
    let rec = Classifier::new(&g, &caps)?.classify(&s)?;
    let mut w = out_writer(&None)?;
    match a.format {
        RecordFormat::Json => {
            serde_json::to_writer_pretty(&mut w, &versioned_record(&rec)?)?;
            writeln!(w)?;
        }
        RecordFormat::Csv => write_records_csv(&mut w, std::slice::from_ref(&rec))?,
    }
    w.flush()?;
    Ok(())
}

fn census(a: CensusArgs) -> Result<()> {
    let g = parse_group(&a.group)?;
    let caps = a.caps.caps();
    if a.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let keep = matches!(a.format, CensusFormat::Jsonl);
    let (report, records): (CensusReport, Vec<StabilityRecord>) = match (a.exhaustive, a.samples) {
        (true, _) => exhaustive_census_records(&g, &caps, a.workers, keep)?,
        (false, Some(n)) => monte_carlo_census_records(&g, n, a.seed.expect("clap requires seed"), &caps, a.workers, keep)?,
        (false, None) => bail!("choose --exhaustive or --samples N --seed S"),
    };
    let unlabeled = if a.unlabeled {
        if !a.exhaustive {
            bail!("--unlabeled needs --exhaustive");
        }
        Some(unlabeled_census(&g, &caps, a.workers)?)
    } else {
        None
    };
    let mut w = out_writer(&a.output)?;
    match a.format {
        CensusFormat::Json => {
            let v = json!({ "schema_version": SCHEMA_VERSION, "census": report, "unlabeled": unlabeled });
            serde_json::to_writer_pretty(&mut w, &v)?;
            writeln!(w)?;
        }
        CensusFormat::Csv => {
            let mut wr = csv::Writer::from_writer(&mut w);
            wr.write_record(CensusReport::CSV_HEADER)?;
            for row in report.csv_rows() {
                wr.write_record(row)?;
            }
            if let Some(u) = &unlabeled {
                for (bucket, count) in [
                    ("unlabeled", u.unlabeled),
                    ("good-unlabeled", u.good_unlabeled),
                    ("hol-orbits", u.hol_orbits),
                    ("good-hol-orbits", u.good_hol_orbits),
                ] {
                    wr.write_record([report.group.clone(), bucket.into(), count.to_string(), String::new(), String::new()])?;
                }
            }
            wr.flush()?;
        }
        CensusFormat::Jsonl => {
            for r in &records {
                serde_json::to_writer(&mut w, &versioned_record(r)?)?;
                writeln!(w)?;
            }
        }
    }
    w.flush()?;
    if a.strict && report.has_indeterminate() {
        eprintln!(
            "indeterminate: {} undecided stability, {} undecided hierarchy fields",
            report.counts.indeterminate, report.counts.hierarchy_indeterminate
        );
        return Err(Exit(3).into());
    }
    Ok(())
}

fn check_lemmas(a: CheckArgs) -> Result<()> {
    let rows = lemmas::run_all(a.order_limit, &Caps::default())?;
    let mut w = out_writer(&None)?;
    match a.format {
        TableFormat::Json => {
            serde_json::to_writer_pretty(&mut w, &json!({ "schema_version": SCHEMA_VERSION, "checks": rows }))?;
            writeln!(w)?;
        }
        TableFormat::Csv => {
            let mut wr = csv::Writer::from_writer(&mut w);
            wr.write_record(["check", "group", "cases", "failures", "skipped", "status", "note"])?;
            for r in &rows {
                let status = if r.passed() { "pass" } else { "fail" };
                wr.write_record([r.check, &r.group, &r.cases.to_string(), &r.failures.to_string(), &r.skipped.to_string(), status, &r.note])?;
            }
            wr.flush()?;
        }
        TableFormat::Table => {
            writeln!(w, "{:<30} {:<14} {:>7} {:>8} {:>7}  status", "check", "group", "cases", "failures", "skipped")?;
            for r in &rows {
                let status = if r.passed() { "pass" } else { "FAIL" };
                writeln!(w, "{:<30} {:<14} {:>7} {:>8} {:>7}  {status}", r.check, r.group, r.cases, r.failures, r.skipped)?;
                if !r.passed() && !r.note.is_empty() {
                    writeln!(w, "    {}", r.note)?;
                }
            }
            let failed = rows.iter().filter(|r| !r.passed()).count();
            writeln!(w, "{} checks, {failed} failed", rows.len())?;
        }
    }
    w.flush()?;
    if rows.iter().any(|r| !r.passed()) {
        return Err(Exit(1).into());
    }
    Ok(())
}

fn parse_order(s: &str) -> Result<Order> {
    let s = s.trim();
    if let Some(t) = s.strip_prefix("2^") {
        return Ok(Order::PowerOfTwo(t.parse().with_context(|| format!("bad exponent in {s:?}"))?));
    }
    let v: f64 = s.parse().with_context(|| format!("bad r {s:?}"))?;
    if v.fract() != 0.0 || v < 0.0 || v > u64::MAX as f64 {
        bail!("r must be a non-negative integer, got {s:?}");
    }
    Ok(Order::Int(v as u64))
}

fn bounds(a: BoundsArgs) -> Result<()> {
    if a.precision < 64 {
        bail!("--precision must be at least 64");
    }
    let deltas: Vec<Delta> = a.delta.iter().map(|d| d.parse()).collect::<std::result::Result<_, _>>()?;
    let points: Vec<(Order, Delta)> = if a.grid || a.r.is_empty() {
        if !a.r.is_empty() {
            bail!("--grid and --r are exclusive");
        }
        let grid = default_grid();
        if deltas.is_empty() {
            grid
        } else {
            let orders: Vec<Order> = grid.iter().map(|p| p.0).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            orders.into_iter().flat_map(|r| deltas.iter().map(move |d| (r, d.clone()))).collect()
        }
    } else {
        if deltas.is_empty() {
            bail!("--r needs at least one --delta");
        }
        let orders: Vec<Order> = a.r.iter().map(|s| parse_order(s)).collect::<Result<_>>()?;
        orders.into_iter().flat_map(|r| deltas.iter().map(move |d| (r, d.clone()))).collect()
    };
    let profiles: Vec<HpBoundProfile> = points
        .iter()
        .map(|(r, d)| lemma_bound_table(*r, d, &a.precision))
        .collect::<dcover::Result<_>>()?;
    let mut w = out_writer(&None)?;
    match a.format {
        BoundsFormat::Csv => {
            let mut wr = csv::Writer::from_writer(&mut w);
            wr.write_record(HpBoundProfile::csv_header())?;
            for p in &profiles {
                wr.write_record(p.csv_row())?;
            }
            wr.flush()?;
        }
        BoundsFormat::Json => {
            serde_json::to_writer_pretty(&mut w, &json!({ "schema_version": SCHEMA_VERSION, "profiles": profiles }))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn exit_status(e: &anyhow::Error) -> u8 {
    if let Some(Exit(code)) = e.downcast_ref::<Exit>() {
        return *code;
    }
    match e.downcast_ref::<dcover::Error>() {
        Some(dcover::Error::Invariant(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Classify(a) => classify(a),
        Command::Census(a) => census(a),
        Command::CheckLemmas(a) => check_lemmas(a),
        Command::Bounds(a) => bounds(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            if e.downcast_ref::<Exit>().is_none() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_status(&e))
        }
    }
}
