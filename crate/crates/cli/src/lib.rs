//! Command-line front end for `torus-indep`.
//!
//! [`run`] parses arguments, runs one subcommand inside a rayon pool of the
//! requested size and writes a JSON, CSV or plain-text report. Reports never
//! mention the thread count, so the same arguments give the same bytes for
//! any `--threads`.

use std::fmt::Write as _;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use torus_indep::bounds::{self, CSV_HEADER};
use torus_indep::isoperimetry::{self, IsoReport, SampledCheck};
use torus_indep::maxset::{all_labels, intersection_profile, MaxSetLabel};
use torus_indep::polymer::polymer_report;
use torus_indep::{count_brute, count_transfer, enumerate_maximum, Caps, ClassIndex, Error, TorusGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "torus-indep", version, about = "Exact counts and checks for independent sets in Z_m^n")]
pub struct Cli {
    /// Worker threads (default: all cores). Does not change any output.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,

    /// Cap overrides, e.g. "subset=27,states=500000". Applied after
    /// TORUS_INDEP_CAPS.
    #[arg(long, global = true)]
    caps: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count independent sets.
    Count(CountArgs),
    /// Enumerate the maximum independent sets.
    Maxis(MaxisArgs),
    /// Cluster expansion terms of the polymer model on a maximum set.
    Polymer(PolymerArgs),
    /// Vertex-isoperimetric checks between residue classes.
    Isoperim(IsoArgs),
    /// Lower bounds next to exact counts.
    Bounds(BoundsArgs),
    /// Small versions of every check.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct Torus {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
}

impl Torus {
    fn graph(&self) -> Result<TorusGraph, Error> {
        TorusGraph::new(self.m, self.n)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Brute,
    Transfer,
    Both,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    torus: Torus,
    #[arg(long, value_enum, default_value_t = MethodArg::Transfer)]
    method: MethodArg,
    /// Also report the number of sets of each size.
    #[arg(long)]
    by_size: bool,
}

#[derive(Args, Debug)]
struct MaxisArgs {
    #[command(flatten)]
    torus: Torus,
    /// Confirm by brute force that no other maximum sets exist.
    #[arg(long)]
    verify: bool,
    /// Pairwise intersection sizes.
    #[arg(long)]
    intersections: bool,
}

#[derive(Args, Debug)]
struct PolymerArgs {
    #[command(flatten)]
    torus: Torus,
    #[arg(long, default_value_t = 2)]
    max_cluster_size: usize,
    /// Compare L_1, L_2 with their closed forms.
    #[arg(long)]
    check_closed_form: bool,
    /// Maximum set the model is built on, as "q:+-..". Default: the first.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum IsoCheck {
    Theorem,
    Slices,
    Corollary,
    Counterexample,
    Conjecture,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Dir {
    #[value(name = "+1")]
    Plus,
    #[value(name = "-1")]
    Minus,
    Both,
}

#[derive(Args, Debug)]
struct IsoArgs {
    #[arg(long, default_value_t = 3)]
    m: u32,
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value_t = IsoCheck::Theorem)]
    check: IsoCheck,
    /// Source class.
    #[arg(long, default_value_t = 0)]
    p: u32,
    #[arg(long, value_enum, default_value_t = Dir::Both, allow_hyphen_values = true)]
    dir: Dir,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Seed for sampled modes; generated and echoed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Classes P for the corollary, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    classes: Vec<u32>,
    /// Candidate constants for the conjecture probe.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    c_grid: Vec<f64>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    n_min: u32,
    #[arg(long, default_value_t = 4)]
    n_max: u32,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long)]
    seed: Option<u64>,
}

/// A rendered report and whether it found a violation.
struct Outcome {
    json: Value,
    csv: String,
    human: String,
    violation: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn fresh_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn dirs(d: Dir) -> Vec<i32> {
    match d {
        Dir::Plus => vec![1],
        Dir::Minus => vec![-1],
        Dir::Both => vec![1, -1],
    }
}

fn count(a: &CountArgs, caps: &Caps) -> Result<Outcome, Error> {
    let g = a.torus.graph()?;
    let mut profiles = Vec::new();
    if a.method != MethodArg::Transfer {
        profiles.push(count_brute(&g, a.by_size, caps)?);
    }
    if a.method != MethodArg::Brute {
        profiles.push(count_transfer(&g, a.by_size, caps)?);
    }
    let agree = profiles.windows(2).all(|w| w[0].total == w[1].total && w[0].by_size == w[1].by_size);
    let json = if profiles.len() == 1 {
        to_value(&profiles[0])
    } else {
        json!({ "m": g.m(), "n": g.n(), "profiles": profiles, "agree": agree })
    };
    let mut csv = String::from("m,n,method,size,count\n");
    let mut human = String::new();
    for p in &profiles {
        let method = to_value(&p.method);
        let method = method.as_str().unwrap_or_default();
        writeln!(csv, "{},{},{},total,{}", p.m, p.n, method, p.total).unwrap();
        writeln!(human, "|I(Z_{}^{})| = {} ({method})", p.m, p.n, p.total).unwrap();
        for (k, c) in p.by_size.iter().flatten().enumerate() {
            writeln!(csv, "{},{},{},{k},{c}", p.m, p.n, method).unwrap();
            writeln!(human, "  size {k}: {c}").unwrap();
        }
    }
    if profiles.len() > 1 {
        writeln!(human, "methods agree: {agree}").unwrap();
    }
    Ok(Outcome {
        json,
        csv,
        human,
        violation: !agree,
    })
}

fn maxis(a: &MaxisArgs, caps: &Caps) -> Result<Outcome, Error> {
    let g = a.torus.graph()?;
    let family = enumerate_maximum(&g, a.verify, caps)?;
    let profile = a.intersections.then(|| intersection_profile(&g, &family));
    let set_size = family.sets.first().map_or(0, |s| s.len());
    let violation = profile
        .as_ref()
        .is_some_and(|p| p.within_bound == Some(false) || !p.disjoint_violations.is_empty());
    let mut json = json!({
        "m": g.m(),
        "n": g.n(),
        "count": family.sets.len(),
        "set_size": set_size,
        "cross_check": family.cross_check,
        "sets": family.labels.iter().zip(&family.sets)
            .map(|(l, s)| json!({ "label": l, "set": s }))
            .collect::<Vec<_>>(),
    });
    let mut csv = String::from("label,set\n");
    for (l, s) in family.labels.iter().zip(&family.sets) {
        writeln!(csv, "{l},{}", s.to_hex()).unwrap();
    }
    let mut human = format!(
        "{} maximum independent sets of size {set_size} in Z_{}^{} (cross-check: {})\n",
        family.sets.len(),
        g.m(),
        g.n(),
        to_value(&family.cross_check).as_str().unwrap_or_default()
    );
    if let Some(p) = &profile {
        json["intersections"] = json!({
            "max_off_diagonal": p.max_off_diagonal,
            "bound": p.bound,
            "within_bound": p.within_bound,
            "disjoint_violations": p.disjoint_violations,
            "matrix": p.matrix,
        });
        writeln!(human, "largest pairwise intersection: {}", p.max_off_diagonal).unwrap();
        if let Some(b) = p.bound {
            writeln!(human, "bound: {b}").unwrap();
        }
    }
    Ok(Outcome {
        json,
        csv,
        human,
        violation,
    })
}

fn polymer(a: &PolymerArgs, caps: &Caps) -> Result<Outcome, Error> {
    let g = a.torus.graph()?;
    let label: MaxSetLabel = match &a.label {
        Some(s) => s.parse()?,
        None => all_labels(&g).remove(0),
    };
    let r = polymer_report(&g, &label, a.max_cluster_size, a.check_closed_form, caps)?;
    let json = to_value(&r);
    let mut csv = String::from("r,enumerated,closed_form,match\n");
    let mut human = format!("polymer model on Z_{}^{} over iota({})\n", g.m(), g.n(), r.ground_label);
    for t in json["L"].as_array().into_iter().flatten() {
        let f = |k: &str| match &t[k] {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            v => v.to_string(),
        };
        writeln!(csv, "{},{},{},{}", f("r"), f("enumerated"), f("closed_form"), f("match")).unwrap();
        write!(human, "L_{} = {}", f("r"), f("enumerated")).unwrap();
        if !f("closed_form").is_empty() {
            write!(human, " (closed form {}, match {})", f("closed_form"), f("match")).unwrap();
        }
        human.push('\n');
    }
    Ok(Outcome {
        json,
        csv,
        human,
        violation: !r.all_match(),
    })
}

fn iso_theorem(a: &IsoArgs, g: &TorusGraph, caps: &Caps, seed: u64) -> Result<Outcome, Error> {
    let p = g.class_index(a.p as i64);
    let exhaustive = match a.mode {
        Mode::Exhaustive => true,
        Mode::Sampled => false,
        Mode::Auto => g.class_size() <= caps.subset,
    };
    let reports: Vec<IsoReport> = dirs(a.dir)
        .into_iter()
        .map(|d| {
            if exhaustive {
                isoperimetry::verify_theorem_exhaustive(g, p, d, caps)
            } else {
                isoperimetry::verify_theorem_sampled(g, p, d, a.samples, seed)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut csv = String::from("m,n,p,dir,mode,tested,min_slack,violations\n");
    let mut human = String::new();
    for r in &reports {
        let mode = to_value(&r.mode);
        let mode = mode.as_str().unwrap_or_default();
        let slack = r.min_slack.map(|s| format!("{s:.12}")).unwrap_or_default();
        writeln!(csv, "{},{},{},{},{mode},{},{slack},{}", r.m, r.n, r.p, r.dir, r.tested, r.violations).unwrap();
        writeln!(
            human,
            "Z_{}^{} p={} dir={:+}: {} sets ({mode}), min slack {slack}, {} violations",
            r.m, r.n, r.p, r.dir, r.tested, r.violations
        )
        .unwrap();
    }
    Ok(Outcome {
        violation: reports.iter().any(|r| !r.passed()),
        json: json!({ "check": "theorem", "reports": reports }),
        csv,
        human,
    })
}

fn sampled_outcome(check: &str, g: &TorusGraph, runs: Vec<(Value, SampledCheck)>) -> Outcome {
    let mut csv = String::from("m,n,case,samples,seed,failures\n");
    let mut human = String::new();
    for (case, r) in &runs {
        let case = case.to_string().replace(',', ";");
        writeln!(csv, "{},{},{case},{},{},{}", g.m(), g.n(), r.samples, r.seed, r.failures).unwrap();
        writeln!(human, "{check} {case}: {} sets, {} failures (seed {})", r.samples, r.failures, r.seed).unwrap();
    }
    Outcome {
        violation: runs.iter().any(|(_, r)| !r.passed()),
        json: json!({
            "check": check,
            "m": g.m(),
            "n": g.n(),
            "runs": runs.iter().map(|(c, r)| json!({ "case": c, "result": r })).collect::<Vec<_>>(),
        }),
        csv,
        human,
    }
}

fn isoperim(a: &IsoArgs, caps: &Caps) -> Result<Outcome, Error> {
    let seed = a.seed.unwrap_or_else(fresh_seed);
    match a.check {
        IsoCheck::Theorem => iso_theorem(a, &TorusGraph::new(a.m, a.n)?, caps, seed),
        IsoCheck::Slices => {
            let g = TorusGraph::new(a.m, a.n)?;
            let p = g.class_index(a.p as i64);
            let runs = dirs(a.dir)
                .into_iter()
                .map(|d| Ok((json!({ "p": p.0, "dir": d }), isoperimetry::slice_sweep(&g, p, d, a.samples, seed)?)))
                .collect::<Result<_, Error>>()?;
            Ok(sampled_outcome("slices", &g, runs))
        }
        IsoCheck::Corollary => {
            let g = TorusGraph::new(a.m, a.n)?;
            let run = isoperimetry::corollary_sweep(&g, &a.classes, a.samples, seed)?;
            Ok(sampled_outcome("corollary", &g, vec![(json!({ "classes": a.classes }), run)]))
        }
        IsoCheck::Counterexample => {
            if a.m != 3 {
                return Err(Error::Unsupported("the counterexample lives in Z_3^n".into()));
            }
            let c = isoperimetry::counterexample_construct(a.n)?;
            let human = format!(
                "n={}: |A| = {}, |A|/|complement| = {}, |N(A, I_0)| = {}, certified {}\n",
                c.n, c.size, c.ratio, c.boundary, c.certified
            );
            Ok(Outcome {
                csv: format!("n,size,ratio,boundary,certified\n{},{},{},{},{}\n", c.n, c.size, c.ratio, c.boundary, c.certified),
                violation: !c.certified,
                json: to_value(&c),
                human,
            })
        }
        IsoCheck::Conjecture => {
            if a.m != 3 {
                return Err(Error::Unsupported("the conjecture probe lives in Z_3^n".into()));
            }
            let r = isoperimetry::conjecture_probe(a.n, &a.c_grid, a.samples, seed, caps)?;
            let mut csv = String::from("n,c,violations\n");
            let mut human = format!(
                "n={}: {} sets, {} constraining, worst C {}\n",
                r.n, r.sets_tested, r.sets_constraining, r.worst_c
            );
            for row in &r.grid {
                writeln!(csv, "{},{},{}", r.n, row.c, row.violations).unwrap();
                writeln!(human, "  C = {}: {} violations", row.c, row.violations).unwrap();
            }
            // Evidence only: nothing here counts as a violation.
            Ok(Outcome {
                json: to_value(&r),
                csv,
                human,
                violation: false,
            })
        }
    }
}

fn bounds_table(a: &BoundsArgs, caps: &Caps) -> Result<Outcome, Error> {
    if a.n_min == 0 || a.n_min > a.n_max {
        return Err(Error::Domain(format!("bad n range {}..={}", a.n_min, a.n_max)));
    }
    let rows = bounds::compare_table(a.m, a.n_min..=a.n_max, caps)?;
    let mut csv = format!("{CSV_HEADER}\n");
    let mut human = String::new();
    for r in &rows {
        writeln!(csv, "{}", r.csv_row()).unwrap();
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
        writeln!(
            human,
            "m={} n={}: exact {} thm1 core {} thm2 core {:.3} conjecture {} gap {}",
            r.m,
            r.n,
            f(r.exact_log2),
            f(r.thm1_core_log2),
            r.thm2_core_log2,
            f(r.conjecture_log2),
            f(r.gap_bits)
        )
        .unwrap();
    }
    Ok(Outcome {
        violation: rows.iter().any(|r| r.cores_below_exact == Some(false)),
        json: to_value(&rows),
        csv,
        human,
    })
}

fn selftest(a: &SelftestArgs, caps: &Caps) -> Result<Outcome, Error> {
    let seed = a.seed.unwrap_or_else(fresh_seed);
    let mut results: Vec<(&str, bool)> = Vec::new();
    for (m, n) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)] {
        let g = TorusGraph::new(m, n)?;
        let b = count_brute(&g, true, caps)?;
        let t = count_transfer(&g, true, caps)?;
        results.push(("count brute = transfer", b.total == t.total && b.by_size == t.by_size));
    }
    for (m, n) in [(3, 2), (3, 3), (5, 2)] {
        let g = TorusGraph::new(m, n)?;
        let f = enumerate_maximum(&g, true, caps)?;
        let p = intersection_profile(&g, &f);
        results.push(("maximum sets", f.sets.len() == (m as usize) << (n - 1) && p.within_bound != Some(false)));
    }
    let g = TorusGraph::new(5, 2)?;
    let r = polymer_report(&g, &all_labels(&g)[0], 2, true, caps)?;
    results.push(("cluster expansion closed forms", r.all_match()));
    for (m, n) in [(3, 2), (3, 3), (5, 2)] {
        let g = TorusGraph::new(m, n)?;
        for d in [1, -1] {
            let r = isoperimetry::verify_theorem_exhaustive(&g, ClassIndex(0), d, caps)?;
            results.push(("isoperimetry exhaustive", r.passed()));
        }
    }
    let g = TorusGraph::new(5, 3)?;
    results.push(("slice bounds", isoperimetry::slice_sweep(&g, ClassIndex(0), 1, 1000, seed)?.passed()));
    results.push(("corollary", isoperimetry::corollary_sweep(&g, &[0, 2], 1000, seed)?.passed()));
    for n in 2..=6 {
        results.push(("counterexample", isoperimetry::counterexample_construct(n)?.certified));
    }
    for m in [3, 5, 7] {
        let rows = bounds::compare_table(m, 1..=2, caps)?;
        results.push(("bounds below exact", rows.iter().all(|r| r.cores_below_exact != Some(false))));
    }
    let mut csv = String::from("check,passed\n");
    let mut human = String::new();
    for (name, ok) in &results {
        writeln!(csv, "{name},{ok}").unwrap();
        writeln!(human, "{} {name}", if *ok { "ok  " } else { "FAIL" }).unwrap();
    }
    Ok(Outcome {
        violation: results.iter().any(|(_, ok)| !ok),
        json: json!({
            "seed": seed,
            "checks": results.iter().map(|(n, ok)| json!({ "check": n, "passed": ok })).collect::<Vec<_>>(),
        }),
        csv,
        human,
    })
}

fn execute(cli: &Cli, caps: &Caps) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Count(a) => count(a, caps),
        Command::Maxis(a) => maxis(a, caps),
        Command::Polymer(a) => polymer(a, caps),
        Command::Isoperim(a) => isoperim(a, caps),
        Command::Bounds(a) => bounds_table(a, caps),
        Command::Selftest(a) => selftest(a, caps),
    }
}

fn resolve_caps(cli: &Cli) -> Result<Caps, Error> {
    let caps = Caps::from_env()?;
    match &cli.caps {
        Some(spec) => caps.apply_overrides(spec),
        None => Ok(caps),
    }
}

/// Runs the tool on `args` (without the program name) and returns the exit
/// code: 0 on success, 1 when a check found a violation, 2 on bad input.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("torus-indep".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(out, "{}", e.render());
            return code;
        }
    };
    let caps = match resolve_caps(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = match pool.install(|| execute(&cli, &caps)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.json).expect("json") + "\n",
        Format::Csv => outcome.csv,
        Format::Human => outcome.human,
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if outcome.violation {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}
