use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use entro_core::bounds::{
    agm_from_logs, normal_bound, polymatroid_bound, satisfies_stats, worst_case_normal, worst_case_product,
    BoundReport, StatSpec,
};
use entro_core::domination::{canonical_clique_tree, dominates, enumerate_homomorphisms, Domination};
use entro_core::engine::{generic_join, generic_join_par, gj_plan, heavy_light, heavy_light_plan, ExecStats};
use entro_core::implication::{implies, parse_constraints, relax_conditional, relaxation_check, Relaxation};
use entro_core::inequality::{check_normal, check_shannon, Verdict};
use entro_core::relation::{naive_eval, to_csv};
use entro_core::{Database, Error, LinExpr, Query, Rational, Relation, SetFunction, VarUniverse};

#[derive(Parser)]
#[command(name = "entro", version, about = "Entropic output-size bounds, worst-case instances and joins")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Upper bound on |Q(D)| from statistics.
    Bound {
        query: PathBuf,
        stats: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Polymatroid)]
        method: Method,
    },
    /// Build a database meeting the statistics whose output approaches the bound.
    Worstcase {
        query: PathBuf,
        stats: PathBuf,
        outdir: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Evaluate a query over a directory of CSV files.
    Join {
        query: PathBuf,
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Gj)]
        algo: Algo,
        /// Comma-separated variable order for Generic Join (default: head order).
        #[arg(long)]
        order: Option<String>,
        /// Write the result CSV here instead of into the report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate the first Generic Join level in parallel.
        #[arg(long)]
        parallel: bool,
    },
    /// Check an information inequality `LHS >= RHS` (first line `vars X,Y,...`).
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Domain::Polymatroid)]
        domain: Domain,
        /// Exit with status 4 when the inequality is invalid.
        #[arg(long)]
        strict: bool,
    },
    /// Decide an FD/MVD implication.
    Implies {
        premises: PathBuf,
        /// Conclusion, e.g. `fd A -> C` or `mvd A ->> B | C,D`.
        #[arg(long)]
        conclude: String,
        #[arg(long)]
        strict: bool,
    },
    /// Decide whether |Q(D)| <= |Q'(D)| on every database.
    Dominates {
        q: PathBuf,
        qprime: PathBuf,
        /// Where to write the witness database when domination fails.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Agm,
    Polymatroid,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Product,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Gj,
    Hl,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Polymatroid,
    Normal,
}

/// Key-value report with indented blocks, printed only on success.
struct Report {
    out: String,
    negative: bool,
}

impl Report {
    fn new(args: &[String], inputs: &[&Path]) -> Result<Self, Error> {
        let mut h = Sha256::new();
        for p in inputs {
            digest_path(&mut h, p)?;
        }
        let digest: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let mut r = Report { out: String::new(), negative: false };
        r.kv("command", &args.join(" "));
        r.kv("inputs_sha256", &digest);
        Ok(r)
    }

    fn kv(&mut self, k: &str, v: &str) {
        self.out.push_str(&format!("{k}: {v}\n"));
    }

    fn rat(&mut self, k: &str, v: &Rational) {
        self.kv(k, &fmt_rat(v));
    }

    fn block(&mut self, k: &str, body: &str) {
        self.out.push_str(&format!("{k}:\n"));
        for line in body.lines() {
            self.out.push_str(&format!("  {line}\n"));
        }
    }
}

fn digest_path(h: &mut Sha256, p: &Path) -> Result<(), Error> {
    if p.is_dir() {
        let mut names: Vec<PathBuf> = fs::read_dir(p)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        names.sort();
        for n in names.iter().filter(|n| n.extension().is_some_and(|e| e == "csv")) {
            h.update(n.file_name().unwrap().to_string_lossy().as_bytes());
            h.update(fs::read(n)?);
        }
    } else {
        h.update(fs::read(p)?);
    }
    Ok(())
}

fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} ({})", r.to_decimal(6))
    }
}

fn read(p: &Path) -> Result<String, Error> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_query(p: &Path) -> Result<Query, Error> {
    Query::parse(&read(p)?)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::ResourceCap(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli.cmd, &args) {
        Ok(r) => {
            print!("{}", r.out);
            ExitCode::from(if r.negative { 4 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Cmd, args: &[String]) -> Result<Report, Error> {
    let mut argv = vec!["entro".to_string()];
    argv.extend(args.iter().skip(1).cloned());
    match cmd {
        Cmd::Bound { query, stats, method } => cmd_bound(&argv, &query, &stats, method),
        Cmd::Worstcase { query, stats, outdir, mode } => cmd_worstcase(&argv, &query, &stats, &outdir, mode),
        Cmd::Join { query, data, algo, order, out, parallel } => {
            cmd_join(&argv, &query, &data, algo, order.as_deref(), out.as_deref(), parallel)
        }
        Cmd::Check { file, domain, strict } => cmd_check(&argv, &file, domain, strict),
        Cmd::Implies { premises, conclude, strict } => cmd_implies(&argv, &premises, &conclude, strict),
        Cmd::Dominates { q, qprime, witness_dir, strict } => {
            cmd_dominates(&argv, &q, &qprime, witness_dir.as_deref(), strict)
        }
    }
}

fn bound_for(q: &Query, spec: &StatSpec, method: Method) -> Result<BoundReport, Error> {
    match method {
        Method::Agm => {
            if !spec.is_cardinality_only() {
                return Err(Error::Invalid("the AGM bound uses cardinality statistics only".into()));
            }
            agm_from_logs(q, &spec.atom_cardinality_logs())
        }
        Method::Polymatroid => polymatroid_bound(q, spec),
        Method::Normal => normal_bound(q, spec),
    }
}

fn write_bound(r: &mut Report, q: &Query, spec: &StatSpec, b: &BoundReport) -> Result<(), Error> {
    r.kv("method", &b.method.to_string());
    let Some(log) = &b.log_bound else {
        r.kv("verdict", "unbounded");
        return Ok(());
    };
    r.kv("verdict", "bounded");
    r.rat("log2_bound", log);
    let approx = b.bound_f64().unwrap_or(f64::INFINITY);
    r.kv("bound", &format!("{approx:.3}"));
    r.kv("bound_rounded", &format!("{}", approx.round()));
    if let Some(d) = &b.dual_value {
        r.rat("dual_value", d);
    }
    let u = q.universe();
    let mut w = String::new();
    if b.method == entro_core::bounds::BoundMethod::Agm {
        for (a, x) in q.atoms.iter().zip(&b.weights) {
            w.push_str(&format!("{}: {}\n", a.relation, fmt_rat(x)));
        }
    } else {
        for (i, x) in b.weights.iter().enumerate() {
            if !x.is_zero() {
                w.push_str(&format!("{}: {}\n", spec.format_entry(i), fmt_rat(x)));
            }
        }
        r.kv("inequality", &b.sigma_inequality(spec)?.to_string());
    }
    r.block("weights", &w);
    if let Some(h) = &b.h_star {
        r.block("h_star", &setfn_table(h));
    }
    if let Some(d) = &b.normal {
        let s: String =
            d.support().map(|(v, a)| format!("a[{}]: {}\n", u.fmt_compact(v), fmt_rat(a))).collect();
        r.block("normal_decomposition", &s);
    }
    Ok(())
}

fn setfn_table(h: &SetFunction) -> String {
    let u = h.universe();
    u.all_sets().skip(1).map(|s| format!("{}: {}\n", u.fmt_compact(s), fmt_rat(h.get(s)))).collect()
}

fn cmd_bound(argv: &[String], query: &Path, stats: &Path, method: Method) -> Result<Report, Error> {
    let q = load_query(query)?;
    let spec = StatSpec::parse(&read(stats)?, &q)?;
    let mut r = Report::new(argv, &[query, stats])?;
    r.kv("query", &q.to_string());
    let b = bound_for(&q, &spec, method)?;
    write_bound(&mut r, &q, &spec, &b)?;
    Ok(r)
}

fn card_values(q: &Query, spec: &StatSpec) -> Result<Vec<Rational>, Error> {
    spec.atom_cardinality_logs()
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let l = l.as_ref().ok_or_else(|| {
                Error::Invalid(format!("atom `{}` has no cardinality statistic", q.atoms[j].relation))
            })?;
            let entry = spec
                .entries()
                .iter()
                .find(|e| e.log == *l && e.stat.guard == q.atoms[j].relation && e.stat.is_cardinality());
            match entry.and_then(|e| e.value.clone()) {
                Some(v) => Ok(v),
                None if l.is_integer() => Ok(Rational::pow2(i64::try_from(l.numer()).unwrap_or(i64::MAX))),
                None => Err(Error::Invalid("product mode needs integer or explicit cardinalities".into())),
            }
        })
        .collect()
}

fn cmd_worstcase(argv: &[String], query: &Path, stats: &Path, outdir: &Path, mode: Mode) -> Result<Report, Error> {
    let q = load_query(query)?;
    let spec = StatSpec::parse(&read(stats)?, &q)?;
    let product = match mode {
        Mode::Product => true,
        Mode::Normal => false,
        Mode::Auto => spec.is_cardinality_only(),
    };
    let (db, bound) = if product {
        let cards = card_values(&q, &spec)?;
        (worst_case_product(&q, &cards)?, entro_core::bounds::agm_bound(&q, &cards)?)
    } else {
        (worst_case_normal(&q, &spec)?, normal_bound(&q, &spec)?)
    };
    let violations = satisfies_stats(&q, &db, &spec)?;
    let out = naive_eval(&q, &db)?;
    db.write_dir(outdir)?;
    let mut r = Report::new(argv, &[query, stats])?;
    r.kv("mode", if product { "product" } else { "normal" });
    r.kv("outdir", &outdir.display().to_string());
    let sizes: String = db.relations.iter().map(|(n, rel)| format!("{n}: {}\n", rel.len())).collect();
    r.block("relation_sizes", &sizes);
    r.kv("satisfies_stats", if violations.is_empty() { "true" } else { "false" });
    for v in &violations {
        r.kv("violation", &format!("{} degree {}", v.label, v.degree));
    }
    r.kv("output_size", &out.len().to_string());
    if let Some(log) = &bound.log_bound {
        r.rat("log2_bound", log);
        let ratio = out.len() as f64 / log.to_f64().exp2();
        r.kv("ratio_to_bound", &format!("{ratio:.6}"));
    }
    Ok(r)
}

fn cmd_join(
    argv: &[String],
    query: &Path,
    data: &Path,
    algo: Algo,
    order: Option<&str>,
    out: Option<&Path>,
    parallel: bool,
) -> Result<Report, Error> {
    let q = load_query(query)?;
    let db = Database::load_dir(data, &q)?;
    let mut r = Report::new(argv, &[query, data])?;
    let (result, stats, plan): (Relation, Option<ExecStats>, String) = match algo {
        Algo::Naive => (naive_eval(&q, &db)?, None, "nested loops in atom order\n".into()),
        Algo::Gj => {
            let order: Vec<String> = match order {
                Some(o) => o.split(',').map(|s| s.trim().to_string()).collect(),
                None => q.head.clone(),
            };
            let (res, st) =
                if parallel { generic_join_par(&q, &db, &order)? } else { generic_join(&q, &db, &order)? };
            (res, Some(st), gj_plan(&q, &order))
        }
        Algo::Hl => {
            let cards: Vec<Rational> = (0..q.atoms.len())
                .map(|j| db.bound_atom(&q, j).map(|a| Rational::from_int(a.len().max(1) as i64)))
                .collect::<Result<_, _>>()?;
            let proof = heavy_light_plan(&q, &cards)?;
            let (res, st) = heavy_light(&q, &db, &cards, &proof)?;
            (res, Some(st), proof.format(q.universe()))
        }
    };
    r.kv("algorithm", match algo {
        Algo::Gj => "generic-join",
        Algo::Hl => "heavy-light",
        Algo::Naive => "naive",
    });
    r.block("plan", &plan);
    r.kv("output_size", &result.len().to_string());
    if let Some(st) = stats {
        r.block("exec_stats", &st.to_string());
    }
    let csv = to_csv(&result);
    match out {
        Some(p) => {
            fs::write(p, &csv)?;
            r.kv("result_csv", &p.display().to_string());
        }
        None => r.block("result", &csv),
    }
    Ok(r)
}

/// `vars X,Y,Z` followed by `LHS >= RHS` or `LHS <= RHS`; `#` comments.
fn parse_inequality(text: &str) -> Result<(VarUniverse, LinExpr, String), Error> {
    let mut vars = None;
    let mut body = String::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if let Some(v) = line.strip_prefix("vars") {
            let names: Vec<&str> = v.trim_start_matches(':').split(',').map(str::trim).collect();
            vars = Some(VarUniverse::new(&names)?);
        } else if !line.is_empty() {
            body.push_str(line);
            body.push(' ');
        }
    }
    let u = vars.ok_or_else(|| Error::Parse("missing `vars X,Y,...` line".into()))?;
    let (lhs, rhs, flip) = if let Some((l, r)) = body.split_once(">=") {
        (l, r, false)
    } else if let Some((l, r)) = body.split_once("<=") {
        (l, r, true)
    } else {
        return Err(Error::Parse("expected `>=` or `<=`".into()));
    };
    let (l, rr) = (LinExpr::parse(lhs.trim(), &u)?, LinExpr::parse(rhs.trim(), &u)?);
    let c = if flip { rr.sub(&l) } else { l.sub(&rr) };
    let shown = body.trim().to_string();
    Ok((u, c, shown))
}

fn cmd_check(argv: &[String], file: &Path, domain: Domain, strict: bool) -> Result<Report, Error> {
    let (u, c, shown) = parse_inequality(&read(file)?)?;
    let verdict = match domain {
        Domain::Polymatroid => check_shannon(&u, &c)?,
        Domain::Normal => check_normal(&u, &c)?,
    };
    let mut r = Report::new(argv, &[file])?;
    r.kv("inequality", &shown);
    r.kv("normalized", &format!("{} >= 0", c.format(&u)));
    r.kv("domain", match domain {
        Domain::Polymatroid => "polymatroids",
        Domain::Normal => "normal polymatroids",
    });
    match verdict {
        Verdict::Valid => r.kv("verdict", "valid"),
        Verdict::Invalid { witness, value } => {
            r.kv("verdict", "invalid");
            r.rat("witness_value", &value);
            r.block("witness", &setfn_table(&witness));
            r.negative = strict;
        }
    }
    Ok(r)
}

fn cmd_implies(argv: &[String], premises: &Path, conclude: &str, strict: bool) -> Result<Report, Error> {
    let (u, ps, concl) = parse_constraints(&read(premises)?, &[conclude])?;
    let c = concl[0];
    let v = implies(&u, &ps, &c)?;
    let mut r = Report::new(argv, &[premises])?;
    r.kv("vars", &u.names().join(","));
    let listed: String = ps.iter().map(|p| format!("{}\n", p.format(&u))).collect();
    r.block("premises", &listed);
    r.kv("conclusion", &c.format(&u));
    r.kv("holds", if v.holds { "true" } else { "false" });
    if let Some(l) = &v.lambda {
        r.rat("lambda", l);
        r.kv("relaxation_shannon_valid", if relaxation_check(&u, &ps, &c)? { "true" } else { "false" });
        let measures: Vec<LinExpr> = ps.iter().map(|p| p.measure(&u)).collect();
        if let Relaxation::Lambda(tight) = relax_conditional(&u, &measures, &c.measure(&u), &Rational::zero())? {
            r.kv("lambda_lp", &tight.iter().map(fmt_rat).collect::<Vec<_>>().join(", "));
        }
    }
    if let Some((w, rel)) = &v.counterexample {
        r.kv("counterexample_W", &u.fmt_set(*w));
        r.block("counterexample", &to_csv(rel));
        r.negative = strict;
    }
    Ok(r)
}

fn cmd_dominates(
    argv: &[String],
    qp: &Path,
    qprimep: &Path,
    witness_dir: Option<&Path>,
    strict: bool,
) -> Result<Report, Error> {
    let q = load_query(qp)?;
    let qprime = load_query(qprimep)?;
    let mut r = Report::new(argv, &[qp, qprimep])?;
    r.kv("q", &q.to_string());
    r.kv("qprime", &qprime.to_string());
    if let Some(t) = canonical_clique_tree(&qprime) {
        r.kv("clique_tree", &t.to_string());
        r.kv("et_expression", &t.et_expression().format(qprime.universe()));
    }
    let homs: String =
        enumerate_homomorphisms(&qprime, &q).iter().map(|h| format!("{}\n", h.format(&qprime, &q))).collect();
    r.block("homomorphisms", &homs);
    match dominates(&q, &qprime)? {
        Domination::Yes => r.kv("dominates", "yes"),
        Domination::Undecided { reason } => {
            r.kv("dominates", "undecided");
            r.kv("reason", &reason);
        }
        Domination::No { witness, counterexample, q_size, qprime_size } => {
            r.kv("dominates", "no");
            let u = q.universe();
            let a: String =
                counterexample.support().map(|(v, a)| format!("a[{}]: {}\n", u.fmt_compact(v), fmt_rat(a))).collect();
            r.block("counterexample", &a);
            r.kv("q_size", &q_size.to_string());
            r.kv("qprime_size", &qprime_size.to_string());
            if let Some(dir) = witness_dir {
                witness.write_dir(dir)?;
                r.kv("witness_dir", &dir.display().to_string());
            }
            r.negative = strict;
        }
    }
    Ok(r)
}
