//! The `fq` command-line harness.
//!
//! Every command is a deterministic function of its arguments: the thread
//! count only changes how fast results arrive. Timing goes to stderr (and
//! into JSON only when `--timing` is given) so that outputs can be compared
//! byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::discrepancy::{
    box_count_discrepancy_residues, erdos_turan_bound_residues, koksma_szusz_bound_residues, star_discrepancy,
    uniform_discrepancy, UnitSequence1D,
};
use crate::error::FqError;
use crate::expsum::{boundary_allowance, complete_exp_sum, heath_brown_sum, pattern_exp_sum, FrequencyVector};
use crate::fixtures;
use crate::line::{integral_i, integral_i_exact, line_value, mean_line_distance, LineSpec};
use crate::output::rational_decimal;
use crate::pattern::{
    admissible_region, count_all_permutations, count_pattern, emit_point_sets, spanned_residues, DisplacementPattern,
    Permutation,
};
use crate::prime::OddPrime;
use crate::repro::{reproduce, ReproReport, TableId};
use crate::table::{fermat_quotient_oracle, FermatQuotientTable};

/// Largest prime for which `matrix` dumps without `--force`.
pub const MATRIX_DUMP_LIMIT: i64 = 10_000;
/// Largest number of primes `zeros` will scan.
pub const ZERO_SCAN_LIMIT: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Fq(#[from] FqError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "fq", version, about = "Fermat quotient matrix experiments")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "FQ_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout. For `figures` this is the
    /// directory that receives the CSV files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include wall time in JSON reports.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Dump the full Fermat quotient matrix with its inverse row.
    Matrix(MatrixArgs),
    /// Reproduce a reference table and diff it cell by cell.
    Repro(ReproArgs),
    /// Count origins whose spanned tuple follows one ordering.
    PatternCount(PatternArgs),
    /// Count origins for every ordering in one sweep.
    PermSweep(SweepArgs),
    /// Mean distance from the base row to a line mod 1.
    LineMean(LineArgs),
    /// Exponential sums of Fermat quotients.
    Expsum(ExpsumArgs),
    /// Discrepancy of the base row and of spanned point sets.
    Discrepancy(DiscrepancyArgs),
    /// Plot-ready CSV data for the reference figures.
    Figures(FigureArgs),
    /// Scan primes for vanishing Fermat quotients.
    Zeros(ZerosArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Matrix(_) => "matrix",
            Command::Repro(_) => "repro",
            Command::PatternCount(_) => "pattern-count",
            Command::PermSweep(_) => "perm-sweep",
            Command::LineMean(_) => "line-mean",
            Command::Expsum(_) => "expsum",
            Command::Discrepancy(_) => "discrepancy",
            Command::Figures(_) => "figures",
            Command::Zeros(_) => "zeros",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MatrixArgs {
    #[arg(long)]
    pub p: i64,
    /// Allow dumps above the size guard.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproArgs {
    /// T1, A11, A12, A2 or all.
    #[arg(long)]
    pub table: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PatternArgs {
    #[arg(long)]
    pub p: i64,
    /// One-based permutation, e.g. `2,3,1`.
    #[arg(long)]
    pub sigma: String,
    /// Displacement vectors, e.g. `10,6;1,6;2,6`.
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: String,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub p: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: String,
}

#[derive(Debug, Args, Serialize)]
pub struct LineArgs {
    #[arg(long)]
    pub p: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub d: f64,
    /// Also evaluate the limiting double integral with this many cells.
    #[arg(long)]
    pub integral_steps: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub p: i64,
    /// Pattern for the complete and restricted sums.
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: Option<String>,
    /// Frequency vector, e.g. `1,0,2`.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Also survey this many random frequencies with sup-norm at most `--h-bound`.
    #[arg(long, default_value_t = 0)]
    pub random_h: usize,
    #[arg(long, default_value_t = 3)]
    pub h_bound: i64,
    /// Multiplier for the short-interval sum over `X < n <= X + Y`.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long, default_value_t = 0)]
    pub x: u64,
    #[arg(long)]
    pub y: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscrepancyArgs {
    #[arg(long)]
    pub p: i64,
    /// Truncation for the Erdos-Turan bound.
    #[arg(long, default_value_t = 10)]
    pub k: u64,
    /// Spanning pattern for the multidimensional checks.
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: Option<String>,
    /// Grid side for the box discrepancy.
    #[arg(long, default_value_t = 6)]
    pub l: u64,
    /// Frequency cutoff for the Koksma-Szusz bound; skipped when absent.
    #[arg(long)]
    pub h_bound: Option<u64>,
    /// Constant multiplying the Koksma-Szusz bound.
    #[arg(long, default_value_t = 1.0)]
    pub c_n: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FigureArgs {
    /// fig1, fig2-1..3, fig3-1..3, fig4-1..6 or custom.
    #[arg(long)]
    pub id: String,
    /// Line as `C,D`; repeat for several lines (fig1).
    #[arg(long = "line", allow_hyphen_values = true)]
    pub lines: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub p: Option<i64>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub vectors: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ZerosArgs {
    #[arg(long, default_value_t = 3)]
    pub pmin: i64,
    #[arg(long)]
    pub pmax: i64,
    #[arg(long, default_value_t = 2)]
    pub bmax: u64,
}

/// What a command hands back to the driver.
struct Outcome {
    results: Value,
    csv: Option<String>,
    success: bool,
}

impl Outcome {
    fn ok(results: Value, csv: Option<String>) -> Self {
        Outcome {
            results,
            csv,
            success: true,
        }
    }
}

/// Runs `fq` with the given argv and returns the process exit code:
/// 0 on success, 1 when a reproduction has mismatches, 2 on bad input.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "fq: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let started = Instant::now();
    let outcome = pool.install(|| dispatch(cli))?;
    let elapsed = started.elapsed();
    let _ = writeln!(
        stderr,
        "fq {}: {:.3} ms",
        cli.command.name(),
        elapsed.as_secs_f64() * 1e3
    );

    let text = match cli.format {
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage(format!("{} has no CSV output; use --format json", cli.command.name())))?,
        Format::Json => {
            let mut report = json!({
                "job": {
                    "command": cli.command.name(),
                    "parameters": job_parameters(&cli.command)?,
                    "seed": cli.seed,
                },
                "results": outcome.results,
            });
            if cli.timing {
                report["wall_time_ms"] = json!(elapsed.as_secs_f64() * 1e3);
            }
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
    };
    match &cli.out {
        // for figures --out names the CSV directory
        Some(path) if !matches!(cli.command, Command::Figures(_)) => fs::write(path, text)?,
        _ => stdout.write_all(text.as_bytes())?,
    }
    Ok(if outcome.success { 0 } else { 1 })
}

fn job_parameters(cmd: &Command) -> Result<Value, CliError> {
    let v = serde_json::to_value(cmd)?;
    // externally tagged: {"matrix": {...}}
    Ok(v.as_object()
        .and_then(|o| o.values().next().cloned())
        .unwrap_or(Value::Null))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Matrix(a) => cmd_matrix(a),
        Command::Repro(a) => cmd_repro(a),
        Command::PatternCount(a) => cmd_pattern_count(a),
        Command::PermSweep(a) => cmd_perm_sweep(a),
        Command::LineMean(a) => cmd_line_mean(a),
        Command::Expsum(a) => cmd_expsum(a, cli.seed),
        Command::Discrepancy(a) => cmd_discrepancy(a),
        Command::Figures(a) => cmd_figures(a, cli.out.as_deref()),
        Command::Zeros(a) => cmd_zeros(a),
    }
}

fn table_for(p: i64) -> Result<FermatQuotientTable, CliError> {
    Ok(FermatQuotientTable::build(OddPrime::new(p)?))
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// The full matrix, rows `a = 0..p-1`, in the reference layout.
pub fn matrix_rows(t: &FermatQuotientTable) -> Vec<Vec<u64>> {
    (0..t.prime().get()).map(|a| t.row(a)).collect()
}

fn cmd_matrix(a: &MatrixArgs) -> Result<Outcome, CliError> {
    if a.p > MATRIX_DUMP_LIMIT && !a.force {
        return Err(CliError::Usage(format!(
            "p = {} exceeds the dump limit {MATRIX_DUMP_LIMIT}; pass --force to override",
            a.p
        )));
    }
    let t = table_for(a.p)?;
    let p = t.prime().get();
    let rows = matrix_rows(&t);
    let mut csv = String::new();
    writeln!(csv, "row,{}", join(1..p)).unwrap();
    writeln!(csv, "b_inv,{}", join(t.inverses())).unwrap();
    for (i, row) in rows.iter().enumerate() {
        writeln!(csv, "{i},{}", join(row)).unwrap();
    }
    let results = json!({ "p": p, "inverses": t.inverses(), "rows": rows });
    Ok(Outcome::ok(results, Some(csv)))
}

fn repro_csv(reports: &[ReproReport]) -> String {
    let mut csv = String::from("table,cell,expected,actual,match\n");
    for r in reports {
        for c in &r.cells {
            writeln!(
                csv,
                "{},{},{},{},{}",
                r.table.name(),
                c.cell,
                c.expected,
                c.actual,
                c.matched
            )
            .unwrap();
        }
    }
    csv
}

fn cmd_repro(a: &ReproArgs) -> Result<Outcome, CliError> {
    let ids: Vec<TableId> = if a.table.eq_ignore_ascii_case("all") {
        TableId::ALL.to_vec()
    } else {
        vec![TableId::parse(&a.table)?]
    };
    let reports = ids.into_iter().map(reproduce).collect::<Result<Vec<_>, _>>()?;
    let success = reports.iter().all(|r| r.all_match);
    let csv = repro_csv(&reports);
    let results = if reports.len() == 1 {
        serde_json::to_value(&reports[0])?
    } else {
        json!({ "all_match": success, "tables": reports })
    };
    Ok(Outcome {
        results,
        csv: Some(csv),
        success,
    })
}

const COUNT_HEADER: &str = "p,sigma,vectors,region_card,count,tie_count,main_term,ratio\n";

fn count_row(r: &crate::pattern::PatternCountReport) -> String {
    format!(
        "{},{},\"{}\",{},{},{},{},{}\n",
        r.p,
        join(r.sigma.one_based()).replace(',', " "),
        r.pattern,
        r.region_card,
        r.count,
        r.tie_count,
        r.main_term,
        r.ratio
    )
}

fn cmd_pattern_count(a: &PatternArgs) -> Result<Outcome, CliError> {
    let t = table_for(a.p)?;
    let pattern = DisplacementPattern::parse(&a.vectors)?;
    let sigma = Permutation::parse(&a.sigma)?;
    let report = count_pattern(&t, &pattern, &sigma)?;
    let mut results = serde_json::to_value(&report)?;
    results["distinct_t"] = json!(pattern.distinct_t());
    if pattern.has_warning() {
        results["warning"] = json!("second components are not pairwise distinct");
    }
    let csv = format!("{COUNT_HEADER}{}", count_row(&report));
    Ok(Outcome::ok(results, Some(csv)))
}

fn cmd_perm_sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let t = table_for(a.p)?;
    let pattern = DisplacementPattern::parse(&a.vectors)?;
    let reports = count_all_permutations(&t, &pattern)?;
    let region = admissible_region(t.prime(), &pattern);
    let ties = reports.first().map(|r| r.tie_count).unwrap_or(0);
    let total: u64 = reports.iter().map(|r| r.count).sum::<u64>() + ties;
    let counts: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "sigma": r.sigma, "count": r.count, "ratio": r.ratio }))
        .collect();
    let results = json!({
        "p": t.prime(),
        "pattern": pattern,
        "region": region,
        "main_term": reports.first().map(|r| r.main_term),
        "tie_count": ties,
        "partition_total": total,
        "partition_holds": total == region.cardinality,
        "counts": counts,
    });
    let mut csv = String::from(COUNT_HEADER);
    for r in &reports {
        csv.push_str(&count_row(r));
    }
    Ok(Outcome::ok(results, Some(csv)))
}

fn cmd_line_mean(a: &LineArgs) -> Result<Outcome, CliError> {
    let t = table_for(a.p)?;
    let line = LineSpec::new(a.c, a.d)?;
    let r = mean_line_distance(&t, &line);
    let mut results = serde_json::to_value(&r)?;
    if let Some(n) = r.exact_numerator {
        // integers beyond 2^53 survive as strings
        results["exact_numerator"] = json!(n.to_string());
        results["exact_denominator"] = json!((t.prime().square() as u128).to_string());
    }
    if let Some(steps) = a.integral_steps {
        results["integral_quadrature"] = json!(integral_i(&line, steps)?);
        results["integral_exact"] = json!(integral_i_exact(&line));
    }
    let csv = format!(
        "p,c,d,mean,deviation,error_scale\n{},{},{},{},{},{}\n",
        r.p, a.c, a.d, r.mean, r.deviation, r.error_scale
    );
    Ok(Outcome::ok(results, Some(csv)))
}

fn cmd_expsum(a: &ExpsumArgs, seed: u64) -> Result<Outcome, CliError> {
    let t = table_for(a.p)?;
    let p = t.prime().get();
    let mut results = json!({ "p": p });
    let mut csv = String::from("kind,h,re,im,norm,bound,terms\n");
    if let Some(m) = a.m {
        let y = a.y.ok_or_else(|| CliError::Usage("--m needs --y".into()))?;
        let r = heath_brown_sum(&t, m, a.x, y)?;
        writeln!(
            csv,
            "short-interval,{m},{},{},{},{},{}",
            r.re, r.im, r.norm, r.bound, r.terms
        )
        .unwrap();
        results["short_interval"] = json!({ "m": m, "x": a.x, "y": y, "sum": r, "ratio": r.ratio() });
    }
    if let Some(v) = &a.vectors {
        let pattern = DisplacementPattern::parse(v)?;
        let mut freqs = Vec::new();
        if let Some(h) = &a.h {
            freqs.push(FrequencyVector::parse(h)?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..a.random_h {
            loop {
                let h: Vec<i64> = (0..pattern.dim())
                    .map(|_| rng.gen_range(-a.h_bound..=a.h_bound))
                    .collect();
                if h.iter().any(|&x| x != 0) {
                    freqs.push(FrequencyVector::new(h));
                    break;
                }
            }
        }
        if freqs.is_empty() {
            return Err(CliError::Usage("--vectors needs --h or --random-h".into()));
        }
        let allowance = boundary_allowance(&pattern, p);
        let mut entries = Vec::new();
        for h in &freqs {
            let full = complete_exp_sum(&t, &pattern, h)?;
            let restricted = pattern_exp_sum(&t, &pattern, h)?;
            let gap = (full.value() - restricted.value()).norm();
            let label = join(&h.h).replace(',', " ");
            for (kind, r) in [("complete", &full), ("restricted", &restricted)] {
                writeln!(
                    csv,
                    "{kind},{label},{},{},{},{},{}",
                    r.re, r.im, r.norm, r.bound, r.terms
                )
                .unwrap();
            }
            entries.push(json!({
                "h": h.h,
                "complete": full,
                "restricted": restricted,
                "gap": gap,
                "gap_allowance": allowance,
                "gap_within_allowance": gap <= allowance + 1e-6,
            }));
        }
        results["pattern"] = json!(pattern);
        results["sums"] = json!(entries);
    }
    if a.m.is_none() && a.vectors.is_none() {
        return Err(CliError::Usage("expsum needs --m/--y or --vectors".into()));
    }
    Ok(Outcome::ok(results, Some(csv)))
}

fn cmd_discrepancy(a: &DiscrepancyArgs) -> Result<Outcome, CliError> {
    let t = table_for(a.p)?;
    let p = t.prime().get();
    let row: Vec<u64> = t.base_row().iter().map(|&x| x as u64).collect();
    let seq = UnitSequence1D::from_residues(&row, p)?;
    let d = uniform_discrepancy(&seq);
    let et = erdos_turan_bound_residues(&row, p, a.k)?;
    let mut results = json!({
        "p": p,
        "base_row": {
            "length": row.len(),
            "uniform_discrepancy": d,
            "star_discrepancy": star_discrepancy(&seq),
            "erdos_turan_k": a.k,
            "erdos_turan_bound": et,
            "counting_discrepancy": d * row.len() as f64,
            "bound_holds": d * row.len() as f64 <= et,
        },
    });
    let mut csv = format!(
        "quantity,value\nuniform_discrepancy,{d}\nstar_discrepancy,{}\nerdos_turan_bound,{et}\n",
        star_discrepancy(&seq)
    );
    if let Some(v) = &a.vectors {
        let pattern = DisplacementPattern::parse(v)?;
        let points = spanned_residues(&t, &pattern);
        if points.is_empty() {
            return Err(CliError::Usage("the admissible region is empty".into()));
        }
        let boxes = box_count_discrepancy_residues(&points, p, a.l)?;
        let n = pattern.dim() as i32;
        let lp = (p as f64).ln();
        let mut spanned = json!({
            "pattern": pattern,
            "points": points.len(),
            "l": a.l,
            "box_discrepancy": boxes,
            "box_count_deviation": boxes * points.len() as f64,
            "p_log_n_p": p as f64 * lp.powi(n),
        });
        writeln!(csv, "box_discrepancy,{boxes}").unwrap();
        if let Some(h) = a.h_bound {
            let ks = koksma_szusz_bound_residues(&points, p, h, a.c_n)?;
            spanned["koksma_szusz_h"] = json!(h);
            spanned["koksma_szusz_c_n"] = json!(a.c_n);
            spanned["koksma_szusz_bound"] = json!(ks);
            spanned["box_over_bound"] = json!(boxes / ks);
            writeln!(csv, "koksma_szusz_bound,{ks}").unwrap();
        }
        results["spanned"] = spanned;
    }
    Ok(Outcome::ok(results, Some(csv)))
}

/// Reference parameters behind each pattern figure: `(prime, sigma, vectors)`.
pub fn figure_parameters(id: &str) -> Option<(i64, Permutation, DisplacementPattern)> {
    let (table, row) = match id {
        "fig2-1" => ("A11", 0),
        "fig2-2" => ("A11", 1),
        "fig2-3" => ("A11", 2),
        "fig3-1" => ("A12", 0),
        "fig3-2" => ("A12", 1),
        "fig3-3" => ("A12", 2),
        _ => {
            let k: usize = id.strip_prefix("fig4-")?.parse().ok()?;
            if !(1..=6).contains(&k) {
                return None;
            }
            ("A2", k - 1)
        }
    };
    let t = fixtures::pattern_table(table)?;
    let r = t.rows.get(row)?;
    Some((t.prime, r.permutation().ok()?, r.pattern().ok()?))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<String, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(name.to_string())
}

/// Origins CSV (`a,b`) and coordinates CSV (`x1,...,xN`).
pub fn point_set_csvs(
    t: &FermatQuotientTable,
    pattern: &DisplacementPattern,
    sigma: &Permutation,
) -> Result<(String, String, usize), FqError> {
    let sets = emit_point_sets(t, pattern, sigma)?;
    let p = t.prime().get();
    let mut origins = String::from("a,b\n");
    for (a, b) in &sets.origins {
        writeln!(origins, "{a},{b}").unwrap();
    }
    let header = join((1..=pattern.dim()).map(|j| format!("x{j}")));
    let mut coords = format!("{header}\n");
    for r in &sets.residues {
        writeln!(coords, "{}", join(r.iter().map(|&k| rational_decimal(k, p)))).unwrap();
    }
    Ok((origins, coords, sets.origins.len()))
}

fn cmd_figures(a: &FigureArgs, out: Option<&Path>) -> Result<Outcome, CliError> {
    let dir = PathBuf::from(out.unwrap_or(Path::new("figures")));
    if a.id == "fig1" || a.id == "line" {
        if a.lines.is_empty() {
            return Err(CliError::Usage("line figures need at least one --line C,D".into()));
        }
        if a.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        let mut csv = String::from("line,c,d,x,y\n");
        let mut lines = Vec::new();
        for (k, spec) in a.lines.iter().enumerate() {
            let parts: Vec<f64> = spec
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad --line {spec:?}")))?;
            let [c, d] = parts[..] else {
                return Err(CliError::Usage(format!("--line takes C,D, got {spec:?}")));
            };
            let line = LineSpec::new(c, d)?;
            for i in 0..a.samples {
                let x = i as f64 / (a.samples - 1) as f64;
                writeln!(csv, "{},{c},{d},{x},{}", k + 1, line_value(&line, x)).unwrap();
            }
            lines.push(json!({ "c": c, "d": d }));
        }
        let file = write_file(&dir, &format!("{}_lines.csv", a.id), &csv)?;
        return Ok(Outcome::ok(
            json!({ "id": a.id, "files": [file], "lines": lines, "rows": a.samples * a.lines.len() }),
            None,
        ));
    }
    let (p, sigma, pattern) = if a.id == "custom" {
        let (Some(p), Some(s), Some(v)) = (a.p, &a.sigma, &a.vectors) else {
            return Err(CliError::Usage("custom figures need --p, --sigma and --vectors".into()));
        };
        (p, Permutation::parse(s)?, DisplacementPattern::parse(v)?)
    } else {
        figure_parameters(&a.id).ok_or_else(|| CliError::Usage(format!("unknown figure id {:?}", a.id)))?
    };
    let t = table_for(p)?;
    let (origins, coords, rows) = point_set_csvs(&t, &pattern, &sigma)?;
    let f1 = write_file(&dir, &format!("{}_origins.csv", a.id), &origins)?;
    let f2 = write_file(&dir, &format!("{}_points.csv", a.id), &coords)?;
    Ok(Outcome::ok(
        json!({ "id": a.id, "p": p, "sigma": sigma, "pattern": pattern, "rows": rows, "files": [f1, f2] }),
        None,
    ))
}

fn cmd_zeros(a: &ZerosArgs) -> Result<Outcome, CliError> {
    if a.pmax >= crate::prime::MAX_PRIME_EXCLUSIVE {
        return Err(FqError::TooLarge(a.pmax).into());
    }
    let primes: Vec<i64> = (a.pmin.max(3)..=a.pmax).filter(|&n| OddPrime::new(n).is_ok()).collect();
    if primes.len() > ZERO_SCAN_LIMIT {
        return Err(CliError::Usage(format!(
            "{} primes exceed the scan limit {ZERO_SCAN_LIMIT}",
            primes.len()
        )));
    }
    let scans: Vec<(u64, Vec<u64>)> = {
        use rayon::prelude::*;
        primes
            .par_iter()
            .map(|&n| {
                let p = OddPrime::new(n).expect("filtered to primes");
                let top = a.bmax.min(p.square() - 1);
                let zeros = (2..=top)
                    .filter(|b| b % p.get() != 0)
                    .filter(|&b| fermat_quotient_oracle(b, p).expect("unit below p^2") == 0)
                    .collect();
                (p.get(), zeros)
            })
            .collect()
    };
    let mut csv = String::from("p,b,wieferich\n");
    let mut entries = Vec::new();
    let mut wieferich = Vec::new();
    for (p, zeros) in &scans {
        let w = fermat_quotient_oracle(2, OddPrime::new(*p as i64)?)? == 0;
        if w {
            wieferich.push(*p);
        }
        for b in zeros {
            writeln!(csv, "{p},{b},{w}").unwrap();
        }
        if !zeros.is_empty() || w {
            entries.push(json!({ "p": p, "zero_bases": zeros, "wieferich": w }));
        }
    }
    let results = json!({
        "pmin": a.pmin,
        "pmax": a.pmax,
        "bmax": a.bmax,
        "primes_scanned": scans.len(),
        "wieferich": wieferich,
        "primes_with_zeros": entries,
    });
    Ok(Outcome::ok(results, Some(csv)))
}
