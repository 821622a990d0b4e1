//! The `geonil` command line: flag parsing, dispatch, and report output.
//!
//! Exit codes: `0` every claim verified, `2` something falsified (witnesses
//! are printed), `3` inconclusive with nothing falsified, `1` usage or
//! runtime error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::dynmap::{build_example, DynError, IntMap, Point, System};
use crate::ff::{is_prime, Field, FieldError, FieldRef};
use crate::fib::{self, FibError, FibGroup};
use crate::mpoly::{parse_poly, PolyError};
use crate::orbits::{self, DepthTable, OrbitError, OrbitOutcome};
use crate::search::{self, SearchError, SearchMode, SearchSpace, Shard};
use crate::theorems::{self, Budgets, ReportWitness, Subject, TheoremError, Variant, VerificationReport, Verdict};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FALSIFIED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub fn exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Verified => EXIT_VERIFIED,
        Verdict::Falsified => EXIT_FALSIFIED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Fib(#[from] FibError),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "geonil", version, about = "Nilpotent and geometrically nilpotent subvarieties of polynomial maps over finite fields")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Write machine-readable output here (`-` for stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads; results never depend on this.
    #[arg(long, global = true, env = "GEONIL_JOBS")]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Step budget for each orbit.
    #[arg(long, global = true, default_value_t = orbits::DEFAULT_ORBIT_BUDGET)]
    pub orbit_budget: u64,
    /// Term cap for symbolic composition.
    #[arg(long, global = true)]
    pub term_budget: Option<u64>,
    /// Largest point space scanned for whole-space questions.
    #[arg(long, global = true, default_value_t = orbits::DEFAULT_SCAN_CAP)]
    pub scan_cap: u64,
}

impl GlobalOpts {
    fn budgets(&self) -> Result<Budgets, CliError> {
        let b = Budgets {
            orbit_steps: self.orbit_budget,
            term_budget: self.term_budget.unwrap_or(Budgets::default().term_budget),
            scan_cap: self.scan_cap,
        };
        if b.orbit_steps == 0 || b.term_budget == 0 || b.scan_cap == 0 {
            return Err(CliError::Usage("--orbit-budget, --term-budget and --scan-cap must be positive".into()));
        }
        Ok(b)
    }
}

#[derive(Debug, Args)]
pub struct ExampleOpts {
    /// example1, example2_literal, example2_corrected, example3_literal, example3_corrected
    #[arg(long)]
    pub example: String,
    /// Parameter `a` of example1.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<i64>,
    #[arg(long)]
    pub p: u64,
}

impl ExampleOpts {
    fn subject(&self) -> Result<Subject, CliError> {
        let params: Vec<(&str, BigInt)> = self.a.iter().map(|&a| ("a", BigInt::from(a))).collect();
        Ok(Subject::from(&build_example(&self.example, &params)?))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe F_{p^m}: modulus, generator, and a few elements.
    FieldInfo {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Print the orbit of one point until it reaches the origin or repeats.
    Orbit {
        #[command(flatten)]
        ex: ExampleOpts,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// `2,0,1` or coefficient tuples `[1,0],[0,1],[0,0]`.
        #[arg(long)]
        point: String,
    },
    /// Depth histogram over Y(F_{p^m}) for each m up to --m-max.
    DepthTable {
        #[command(flatten)]
        ex: ExampleOpts,
        #[arg(long, default_value_t = 1)]
        m_max: u32,
    },
    /// Check a claim and exit with its verdict.
    Verify(VerifyArgs),
    /// Cycle and tail structure of t -> h(t) on F_{p^m}.
    RhoStats {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Polynomial in `t`; defaults to `t^2 + a`.
        #[arg(long)]
        h: Option<String>,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        a: i64,
    },
    /// Fibonacci-type recursions in finite groups.
    Fib {
        #[command(subcommand)]
        op: FibCommand,
    },
    /// Compose polynomial maps symbolically.
    Compose {
        /// Outer map, coordinates separated by commas, e.g. `y,0`.
        #[arg(long)]
        map: String,
        /// Inner map; defaults to the outer one.
        #[arg(long)]
        inner: Option<String>,
        /// Print the k-th iterate of --map instead.
        #[arg(long)]
        power: Option<u32>,
        /// Variable names, comma separated; defaults to x,y,z,...
        #[arg(long)]
        vars: Option<String>,
        /// Reduce coefficients mod p.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Search two-variable maps for a geometrically nilpotent, non-nilpotent curve.
    Search2d {
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Total degree cap of the map.
        #[arg(long = "degree", default_value_t = 2)]
        degree: u32,
        /// Total degree cap of the curve.
        #[arg(long, default_value_t = 1)]
        variety_degree: u32,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
        /// Sample this many pairs at random instead of enumerating all.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        shard_index: u64,
        #[arg(long, default_value_t = 1)]
        shard_count: u64,
        /// Record every pair, not just survivors.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Lemma5,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub claim: Claim,
    #[arg(long, default_value = "corrected")]
    pub variant: Variant,
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub m_max: u32,
    /// Parameter `a` of example1, for thm2.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub a: i64,
    /// Map for thm1, coordinates separated by commas.
    #[arg(long, default_value = "y,0")]
    pub map: String,
    /// Largest iterate tried symbolically for thm1.
    #[arg(long, default_value_t = 4)]
    pub k_max: u32,
    /// Largest modulus for lemma5.
    #[arg(long, default_value_t = 50)]
    pub n_max: u64,
}

#[derive(Debug, Subcommand)]
pub enum FibCommand {
    /// First index where the recursion from (a0, a0) hits the identity.
    HitTime {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 1)]
        a0: u64,
    },
    /// Check the pair-map cycle argument for every (or one) seed.
    LemmaCheck {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        a0: Option<u64>,
    },
    /// Does the generator's sequence avoid 1 up to index k?
    GeneratorBound {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Defaults to every k the precondition admits.
        #[arg(long)]
        k: Option<u64>,
    },
}

/// `--n` for Z/n, or `--p`/`--m` for the unit group of F_{p^m}. Elements of
/// the unit group are field-element indices.
#[derive(Debug, Args)]
pub struct GroupArgs {
    #[arg(long, conflicts_with = "p")]
    pub n: Option<u64>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

impl GroupArgs {
    fn group(&self) -> Result<FibGroup, CliError> {
        match (self.n, self.p) {
            (Some(0), _) => Err(CliError::Usage("--n must be positive".into())),
            (Some(n), _) => Ok(FibGroup::additive(n)),
            (None, Some(p)) => Ok(FibGroup::Multiplicative(field(p, self.m)?)),
            (None, None) => Err(CliError::Usage("give --n or --p".into())),
        }
    }
}

fn field(p: u64, m: u32) -> Result<FieldRef, CliError> {
    if !is_prime(p) {
        return Err(CliError::Usage(format!("--p {p} is not prime")));
    }
    if m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    Ok(Field::extension(p, m)?)
}

fn parse_map(text: &str, vars: Option<&str>) -> Result<IntMap, CliError> {
    let coords: Vec<&str> = text.split(',').map(str::trim).collect();
    let names: Vec<String> = match vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        None => crate::mpoly::default_var_names(coords.len()),
    };
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(IntMap::parse(&coords, &names)?)
}

/// Collects the machine-readable output of a command.
enum Payload {
    Lines(Vec<String>),
    Csv(String),
}

impl Payload {
    fn json<T: Serialize>(items: &[T]) -> Payload {
        Payload::Lines(items.iter().map(|i| serde_json::to_string(i).expect("serializable")).collect())
    }
}

struct Outcome {
    code: i32,
    payload: Payload,
}

fn depth_csv(tables: &[DepthTable]) -> String {
    let mut s = format!("{}\n", DepthTable::CSV_HEADER);
    for t in tables {
        s.push_str(&t.csv_row());
        s.push('\n');
    }
    s
}

fn reports_outcome(reports: Vec<VerificationReport>, format: Format, out: &mut dyn Write) -> Result<Outcome, CliError> {
    for r in &reports {
        writeln!(out, "{} {}: {}", r.claim.as_str(), describe_params(r), r.verdict)?;
        if let Some(seq) = r.stats.extra.get("max_depth_sequence") {
            writeln!(out, "  max depth by m: {seq}")?;
        }
        if r.verdict == Verdict::Falsified {
            for w in &r.witnesses {
                writeln!(out, "  witness {}", describe_witness(w))?;
            }
        }
    }
    let code = exit_code(Verdict::combine(reports.iter().map(|r| r.verdict)));
    let payload = match format {
        Format::Json => Payload::json(&reports),
        Format::Csv => {
            let tables: Vec<DepthTable> = reports.iter().flat_map(|r| r.stats.tables.clone()).collect();
            Payload::Csv(depth_csv(&tables))
        }
    };
    Ok(Outcome { code, payload })
}

fn describe_params(r: &VerificationReport) -> String {
    let parts: Vec<String> = r
        .params
        .iter()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect();
    format!("[{}]", parts.join(" "))
}

fn describe_witness(w: &ReportWitness) -> String {
    let mut s = w.role.clone();
    if let Some(m) = w.m {
        s.push_str(&format!(" m={m}"));
    }
    if let Some(p) = &w.point {
        s.push_str(&format!(" point={}", format_coords(p)));
    }
    if let Some(d) = w.depth {
        s.push_str(&format!(" depth={d}"));
    }
    if let Some(l) = w.cycle_len {
        s.push_str(&format!(" cycle_len={l}"));
    }
    if let Some(d) = &w.detail {
        s.push_str(&format!(" {d}"));
    }
    s
}

/// `(2,2,2)` over a prime field, `([1,0],[0,1])` otherwise.
fn format_coords(coords: &[Vec<u64>]) -> String {
    let parts: Vec<String> = coords
        .iter()
        .map(|c| match c.as_slice() {
            [x] => x.to_string(),
            many => format!("[{}]", many.iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
        })
        .collect();
    format!("({})", parts.join(","))
}

fn field_info(p: u64, m: u32, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let f = field(p, m)?;
    let g = f.find_generator();
    writeln!(out, "{}", f.spec())?;
    writeln!(out, "q = {}", f.q())?;
    writeln!(out, "modulus coefficients (low degree first): {:?}", f.spec().modulus)?;
    writeln!(out, "generator: {} (coefficients {:?})", f.format(g), f.coeffs(g))?;
    let shown: Vec<String> = f.elements().take(8).map(|x| f.format(x)).collect();
    writeln!(out, "first elements: {}", shown.join(", "))?;
    let info = serde_json::json!({
        "spec": f.spec(),
        "generator": f.coeffs(g),
        "lookup_tables": f.has_tables(),
    });
    Ok(Outcome {
        code: EXIT_VERIFIED,
        payload: Payload::json(&[info]),
    })
}

fn orbit_cmd(ex: &ExampleOpts, m: u32, point: &str, g: &GlobalOpts, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let f = field(ex.p, m)?;
    let subject = ex.subject()?;
    let sys: System = subject.over(&f);
    let start = Point::parse(point, &f).map_err(CliError::Usage)?;
    if start.len() != sys.nvars() {
        return Err(CliError::Usage(format!(
            "--point has {} coordinates, the map needs {}",
            start.len(),
            sys.nvars()
        )));
    }
    if !sys.variety_eval.all_vanish(&start) {
        writeln!(out, "note: {} is not on Y", start.format(&f))?;
    }
    let path = orbits::trajectory(&sys.map_eval, &start, &sys.fixed_point, g.orbit_budget);
    let shown: Vec<String> = path.iter().map(|p| p.format(&f)).collect();
    writeln!(out, "{}", shown.join(" -> "))?;
    let status = orbits::orbit_status(&sys.map_eval, &start, &sys.fixed_point, g.orbit_budget);
    let (code, summary) = match &status {
        OrbitOutcome::ReachedTarget { depth } => (EXIT_VERIFIED, serde_json::json!({"outcome": "reached_target", "depth": depth})),
        OrbitOutcome::EnteredCycle { tail, cycle_len, witness } => (
            EXIT_FALSIFIED,
            serde_json::json!({"outcome": "entered_cycle", "tail": tail, "cycle_len": cycle_len, "on_cycle": witness.coeffs(&f)}),
        ),
        OrbitOutcome::BudgetExhausted { steps } => {
            (EXIT_INCONCLUSIVE, serde_json::json!({"outcome": "budget_exhausted", "steps": steps}))
        }
    };
    match &status {
        OrbitOutcome::ReachedTarget { depth } => writeln!(out, "depth {depth}")?,
        OrbitOutcome::EnteredCycle { tail, cycle_len, witness } => writeln!(
            out,
            "entered a cycle of length {cycle_len} after {tail} steps, at {}",
            witness.format(&f)
        )?,
        OrbitOutcome::BudgetExhausted { steps } => writeln!(out, "budget exhausted after {steps} steps")?,
    }
    let record = serde_json::json!({
        "field": f.spec(),
        "example": subject.label,
        "start": start.coeffs(&f),
        "trajectory": path.iter().map(|p| p.coeffs(&f)).collect::<Vec<_>>(),
        "status": summary,
    });
    Ok(Outcome {
        code,
        payload: Payload::json(&[record]),
    })
}

fn depth_table_cmd(ex: &ExampleOpts, m_max: u32, g: &GlobalOpts, out: &mut dyn Write) -> Result<Outcome, CliError> {
    if !is_prime(ex.p) {
        return Err(CliError::Usage(format!("--p {} is not prime", ex.p)));
    }
    let subject = ex.subject()?;
    let mut tables = Vec::new();
    writeln!(out, "{}", DepthTable::CSV_HEADER)?;
    for m in 1..=m_max {
        let f = field(ex.p, m)?;
        let sys = subject.over(&f);
        let t = orbits::depth_profile(&sys.map_eval, &sys.variety_eval, &sys.fixed_point, g.orbit_budget)?;
        writeln!(out, "{}", t.csv_row())?;
        tables.push(t);
    }
    let mut verdict = Verdict::Verified;
    for t in &tables {
        if let Some(c) = t.cycle_witness() {
            verdict = Verdict::Falsified;
            writeln!(
                out,
                "  over {}: {} starts on Y never reach the fixed point; first cycle at {} (length {})",
                t.spec,
                t.non_terminating_count,
                format_coords(&c.on_cycle.coords),
                c.cycle_len
            )?;
        } else if t.budget_exhausted_count > 0 && verdict == Verdict::Verified {
            verdict = Verdict::Inconclusive;
        }
    }
    let payload = match g.format {
        Format::Json => Payload::json(&tables),
        Format::Csv => Payload::Csv(depth_csv(&tables)),
    };
    Ok(Outcome {
        code: exit_code(verdict),
        payload,
    })
}

fn verify_cmd(v: &VerifyArgs, g: &GlobalOpts, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let budgets = g.budgets()?;
    if !is_prime(v.p) {
        return Err(CliError::Usage(format!("--p {} is not prime", v.p)));
    }
    if v.m_max == 0 {
        return Err(CliError::Usage("--m-max must be at least 1".into()));
    }
    let reports = match v.claim {
        Claim::Thm1 => {
            let map = parse_map(&v.map, None)?;
            let ms: Vec<u32> = (1..=v.m_max).collect();
            vec![theorems::verify_thm1(&v.map, &map, v.p, &ms, v.k_max, budgets)?]
        }
        Claim::Thm2 => {
            let subject = Subject::from(&crate::dynmap::ExampleInstance::example1(v.a));
            vec![
                theorems::verify_geometric_nilpotence(&subject, v.p, v.m_max, budgets)?,
                theorems::verify_non_uniformity(&subject, v.p, v.m_max, budgets)?,
            ]
        }
        Claim::Thm3 => vec![theorems::verify_thm3(v.variant, v.p, v.m_max, budgets)?],
        Claim::Thm4 => vec![theorems::verify_thm4(v.variant, v.p, v.m_max, budgets)?],
        Claim::Lemma5 => vec![theorems::verify_lemma5_suite(v.n_max, budgets)?],
        Claim::All => theorems::verify_all(budgets)?,
    };
    let reports = reports
        .into_iter()
        .map(|mut r| {
            r.seed = g.seed;
            r
        })
        .collect();
    reports_outcome(reports, g.format, out)
}

fn rho_cmd(p: u64, m: u32, h: Option<&str>, a: i64, g: &GlobalOpts, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let f = field(p, m)?;
    let text = h.map(str::to_string).unwrap_or_else(|| format!("t^2 + ({a})"));
    let poly = parse_poly(&text, &["t"])?.reduce(&f);
    let stats = orbits::rho_stats(&poly)?;
    writeln!(out, "h(t) = {text} over {}: {} components", stats.spec, stats.components.len())?;
    for c in &stats.components {
        let cyc: Vec<String> = c.cycle.iter().map(|&i| f.format(f.element(i))).collect();
        writeln!(
            out,
            "  cycle length {} [{}], {} tail nodes, max tail {}",
            c.cycle_length,
            cyc.join(" "),
            c.tail_nodes,
            c.max_tail
        )?;
    }
    let payload = match g.format {
        Format::Json => Payload::json(&[&stats]),
        Format::Csv => {
            let mut s = String::from("p,m,q,cycle_length,tail_nodes,max_tail,cycle\n");
            for c in &stats.components {
                let cyc: Vec<String> = c.cycle.iter().map(u64::to_string).collect();
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    f.p(),
                    f.m(),
                    f.q(),
                    c.cycle_length,
                    c.tail_nodes,
                    c.max_tail,
                    cyc.join(";")
                ));
            }
            Payload::Csv(s)
        }
    };
    Ok(Outcome {
        code: EXIT_VERIFIED,
        payload,
    })
}

fn fib_cmd(op: &FibCommand, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match op {
        FibCommand::HitTime { group, a0 } => {
            let grp = group.group()?;
            let trace = fib::fib_hit_time(&grp, *a0, grp.default_budget())?;
            writeln!(out, "{}: seed {} hits the identity at index {}", grp.name(), a0, trace.hit_index)?;
            writeln!(out, "  {:?}", trace.prefix)?;
            Ok(Outcome {
                code: EXIT_VERIFIED,
                payload: Payload::json(&[trace]),
            })
        }
        FibCommand::LemmaCheck { group, a0 } => {
            let grp = group.group()?;
            let seeds: Vec<u64> = match a0 {
                Some(s) => vec![*s],
                None => grp.elements().collect(),
            };
            let reports = seeds
                .iter()
                .map(|&s| fib::verify_lemma5(&grp, s))
                .collect::<Result<Vec<_>, _>>()?;
            let failed: Vec<&fib::Lemma5Report> = reports.iter().filter(|r| !r.verified).collect();
            writeln!(out, "{}: {} seeds checked, {} failures", grp.name(), reports.len(), failed.len())?;
            for r in reports.iter().take(if seeds.len() == 1 { 1 } else { 0 }) {
                writeln!(out, "  seed {}: hit {}, cycle length {}", r.seed, r.hit_index, r.cycle_len)?;
            }
            for r in &failed {
                writeln!(out, "  witness seed {}: {:?}", r.seed, r)?;
            }
            let code = if failed.is_empty() { EXIT_VERIFIED } else { EXIT_FALSIFIED };
            Ok(Outcome {
                code,
                payload: Payload::json(&reports),
            })
        }
        FibCommand::GeneratorBound { p, m, k } => {
            let f = field(*p, *m)?;
            let ks: Vec<u64> = match k {
                Some(k) => vec![*k],
                None => (1..)
                    .take_while(|&k| fib::fibonacci(k) < (f.q() - 1).into())
                    .collect(),
            };
            let reports = ks
                .iter()
                .map(|&k| fib::generator_bound_check(&f, k))
                .collect::<Result<Vec<_>, _>>()?;
            let mut code = EXIT_VERIFIED;
            for r in &reports {
                match r.first_identity {
                    None => writeln!(out, "{} k={} (F_k={}): holds", f.spec(), r.k, r.fib_k)?,
                    Some(i) => {
                        code = EXIT_FALSIFIED;
                        writeln!(
                            out,
                            "{} k={} (F_k={}): falsified, generator {:?} gives a_{} = 1",
                            f.spec(),
                            r.k,
                            r.fib_k,
                            r.generator,
                            i
                        )?
                    }
                }
            }
            Ok(Outcome {
                code,
                payload: Payload::json(&reports),
            })
        }
    }
}

fn compose_cmd(
    map: &str,
    inner: Option<&str>,
    power: Option<u32>,
    vars: Option<&str>,
    p: Option<u64>,
    g: &GlobalOpts,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let budget = g.budgets()?.term_budget as usize;
    let outer = parse_map(map, vars)?;
    let names: Vec<String> = match vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        None => crate::mpoly::default_var_names(outer.nvars()),
    };
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let coords: Vec<String> = match p {
        None => {
            let result = match (power, inner) {
                (Some(_), Some(_)) => return Err(CliError::Usage("give --inner or --power, not both".into())),
                (Some(k), None) => outer.iterate_symbolic(k.max(1), budget)?,
                (None, Some(i)) => outer.compose(&parse_map(i, vars)?, budget)?,
                (None, None) => outer.compose(&outer, budget)?,
            };
            result.coords().iter().map(|c| c.display_with(&names)).collect()
        }
        Some(p) => {
            let f = field(p, 1)?;
            let outer_f = outer.reduce(&f);
            let result = match (power, inner) {
                (Some(_), Some(_)) => return Err(CliError::Usage("give --inner or --power, not both".into())),
                (Some(k), None) => outer_f.iterate_symbolic(k.max(1), budget)?,
                (None, Some(i)) => outer_f.compose(&parse_map(i, vars)?.reduce(&f), budget)?,
                (None, None) => outer_f.compose(&outer_f, budget)?,
            };
            result.coords().iter().map(|c| c.display_with(&names)).collect()
        }
    };
    writeln!(out, "({})", coords.join(", "))?;
    Ok(Outcome {
        code: EXIT_VERIFIED,
        payload: Payload::json(&[serde_json::json!({"vars": names, "coords": coords, "p": p})]),
    })
}

#[allow(clippy::too_many_arguments)]
fn search_cmd(
    q: u64,
    degree: u32,
    variety_degree: u32,
    m_max: u32,
    samples: Option<u64>,
    shard: Shard,
    all: bool,
    g: &GlobalOpts,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let mut space = SearchSpace::new(q, degree, variety_degree, m_max);
    space.orbit_budget = g.orbit_budget;
    if let Some(t) = g.term_budget {
        space.term_budget = t as usize;
    }
    space.shard = shard;
    space.seed = g.seed;
    space.keep_all = all;
    if let Some(samples) = samples {
        space.mode = SearchMode::Random { samples };
    }
    let result = search::run_search(&space)?;
    let s = result.summary;
    writeln!(
        out,
        "q={q} D={degree} d={variety_degree} m_max={m_max} shard {}/{}: {} pairs, {} rejected by cycle, {} uniform, {} inconclusive, {} surviving",
        shard.index, shard.count, s.total, s.rejected_cycle, s.rejected_uniform, s.inconclusive, s.surviving
    )?;
    for c in result
        .candidates
        .iter()
        .filter(|c| matches!(c.classification, search::Classification::Surviving { .. }))
    {
        writeln!(out, "  survivor #{}: T = ({}, {}), Y: {} = 0", c.index, c.map[0], c.map[1], c.variety)?;
    }
    let code = if s.inconclusive > 0 { EXIT_INCONCLUSIVE } else { EXIT_VERIFIED };
    let payload = match g.format {
        Format::Json => Payload::Lines(result.json_lines().lines().map(str::to_string).collect()),
        Format::Csv => return Err(CliError::Usage("search2d writes JSON lines only".into())),
    };
    Ok(Outcome { code, payload })
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let g = &cli.global;
    g.budgets()?;
    match &cli.command {
        Command::FieldInfo { p, m } => field_info(*p, *m, out),
        Command::Orbit { ex, m, point } => orbit_cmd(ex, *m, point, g, out),
        Command::DepthTable { ex, m_max } => depth_table_cmd(ex, *m_max, g, out),
        Command::Verify(v) => verify_cmd(v, g, out),
        Command::RhoStats { p, m, h, a } => rho_cmd(*p, *m, h.as_deref(), *a, g, out),
        Command::Fib { op } => {
            if g.format == Format::Csv {
                return Err(CliError::Usage("fib writes JSON only".into()));
            }
            fib_cmd(op, out)
        }
        Command::Compose {
            map,
            inner,
            power,
            vars,
            p,
        } => compose_cmd(map, inner.as_deref(), *power, vars.as_deref(), *p, g, out),
        Command::Search2d {
            q,
            degree,
            variety_degree,
            m_max,
            samples,
            shard_index,
            shard_count,
            all,
        } => search_cmd(
            *q,
            *degree,
            *variety_degree,
            *m_max,
            *samples,
            Shard {
                index: *shard_index,
                count: *shard_count,
            },
            *all,
            g,
            out,
        ),
    }
}

fn write_payload(payload: &Payload, dest: &std::path::Path, out: &mut dyn Write) -> io::Result<()> {
    let body = match payload {
        Payload::Lines(lines) => {
            let mut s = lines.join("\n");
            s.push('\n');
            s
        }
        Payload::Csv(s) => s.clone(),
    };
    if dest.as_os_str() == "-" {
        out.write_all(body.as_bytes())
    } else {
        File::create(dest)?.write_all(body.as_bytes())
    }
}

/// Parse `args` (including the program name) and run, writing the human
/// summary to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if informational {
                let _ = write!(out, "{}", e.render());
                return EXIT_VERIFIED;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_ERROR;
        }
    };
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            let _ = writeln!(err, "error: --jobs must be positive");
            return EXIT_ERROR;
        }
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let result = dispatch(&cli, out).and_then(|o| {
        if let Some(dest) = &cli.global.out {
            write_payload(&o.payload, dest, out)?;
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
