use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use hkt_core::rootsys::{build_root_system, extended_dynkin_surgery};
use hkt_core::spaces::{
    build_coset_triple, classify_family, enumerate_quotients, surgery_chain, Factor, SpaceSpec, Verdict,
    VerificationReport, VerifyConfig,
};
use hkt_core::{Family, HktError};

mod canon;

const GRAMMAR: &str = "expected FACTORS[/QUOTIENT], e.g. A2, A3xU1^1, B3xU1^2/A1:gamma, A3xU1/A1:betaxU1";

#[derive(Parser)]
#[command(name = "hkt", version, about = "Quaternion triples and HKT certificates for compact Lie groups")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Residual tolerance for algebraic checks
    #[arg(long, global = true, env = "HKT_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Finite-difference step for the Nijenhuis check
    #[arg(long, global = true, default_value_t = 1e-4)]
    fd_step: f64,
    /// Emit canonical JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for catalog verification (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Root system, Cartan matrix and extended-Dynkin surgery
    Roots {
        /// Family and rank, e.g. B3
        algebra: String,
    },
    /// Build the triple for a space and certify it
    Verify {
        spec: String,
        /// Skip the finite-difference Nijenhuis check
        #[arg(long)]
        no_nijenhuis: bool,
    },
    /// U(1) padding needed for each rank of a family
    Classify { family: String, max_rank: usize },
    /// Group manifold and cosets of one simple factor
    Catalog {
        family: String,
        rank: usize,
        #[arg(long, default_value_t = 1)]
        max_level: usize,
        /// Also certify every enumerated space
        #[arg(long)]
        verify: bool,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<HktError> for Failure {
    fn from(e: HktError) -> Self {
        match e {
            HktError::Parse(_)
            | HktError::UnsupportedFamilyRank { .. }
            | HktError::ExceptionalRootSystem
            | HktError::InvalidQuotient(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn max_rank_for(f: Family) -> usize {
    match f {
        Family::A => 8,
        Family::B | Family::C => 4,
        Family::D => 5,
    }
}

fn parse_family(s: &str) -> Result<Family, Failure> {
    s.parse().map_err(|e: String| Failure::Usage(e))
}

fn check_range(f: Family, rank: usize) -> Result<(), Failure> {
    if rank == 0 || rank > max_rank_for(f) {
        return Err(Failure::Usage(format!(
            "{f}{rank} is out of range: ranks 1..={} are supported for {f}",
            max_rank_for(f)
        )));
    }
    Ok(())
}

fn config(c: &Common, nijenhuis: bool) -> Result<VerifyConfig, Failure> {
    if !(c.tol > 0.0 && c.tol <= 1e-3) {
        return Err(Failure::Usage(format!("--tol must lie in (0, 1e-3], got {}", c.tol)));
    }
    if !(c.fd_step > 0.0 && c.fd_step <= 1e-2) {
        return Err(Failure::Usage(format!("--fd-step must lie in (0, 1e-2], got {}", c.fd_step)));
    }
    Ok(VerifyConfig {
        tol: c.tol,
        fd_step: c.fd_step,
        nijenhuis,
        ..VerifyConfig::default()
    })
}

fn emit_json<T: serde::Serialize>(v: &T) -> Result<(), Failure> {
    let s = canon::to_string(v).map_err(|e| Failure::Internal(e.to_string()))?;
    print!("{s}");
    Ok(())
}

fn fmt_res(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.2e}"))
}

fn cmd_roots(c: &Common, algebra: &str) -> Result<ExitCode, Failure> {
    if algebra.len() < 2 {
        return Err(Failure::Usage(format!("expected an algebra such as B3, got '{algebra}'")));
    }
    let (fam, rank) = algebra.split_at(1);
    let family = parse_family(fam)?;
    let rank: usize = rank
        .parse()
        .map_err(|_| Failure::Usage(format!("bad rank in '{algebra}'")))?;
    let rs = build_root_system(family, rank)?;
    let surgery = extended_dynkin_surgery(&rs)?;
    let chain = surgery_chain(&rs)?;
    if c.json {
        let doc = json!({
            "root_system": rs.to_doc(),
            "surgery": {
                "summands": surgery.summands.iter().map(|s| s.type_label()).collect::<Vec<_>>(),
                "abelian_rank": surgery.abelian_rank,
            },
            "basic_roots": chain.iter().map(|n| json!({"level": n.level, "label": n.label()})).collect::<Vec<_>>(),
        });
        emit_json(&doc)?;
        return Ok(ExitCode::SUCCESS);
    }
    let doc = rs.to_doc();
    println!("{} ({}), dim {}", rs.type_label(), family.group_name(rank), rs.algebra_dim());
    println!("simple roots:");
    for (k, r) in doc.simple_roots.iter().enumerate() {
        println!("  {:8} ({})", hkt_core::rootsys::simple_root_name(k), r.join(", "));
    }
    println!("positive roots ({}):", doc.positive_roots.len());
    for (k, r) in doc.positive_roots.iter().enumerate() {
        println!("  {:24} ({})", rs.root_label(k), r.join(", "));
    }
    println!("cartan matrix:");
    for row in &doc.cartan_matrix {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:3}")).collect();
        println!("  {}", cells.join(""));
    }
    println!("highest root: ({})  labels {:?}", doc.highest_root.join(", "), doc.dynkin_labels);
    let parts: Vec<String> = surgery.summands.iter().map(|s| s.type_label()).collect();
    let mut summary = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
    if surgery.abelian_rank > 0 {
        summary.push_str(&format!(" + u(1)^{}", surgery.abelian_rank));
    }
    println!("surgery: {summary}");
    println!("basic roots:");
    for n in &chain {
        println!("  level {}  {}", n.level, n.label());
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_for(v: Verdict) -> ExitCode {
    match v {
        Verdict::Certified => ExitCode::SUCCESS,
        Verdict::Failed => ExitCode::from(1),
        Verdict::NotAdmissible => ExitCode::from(3),
    }
}

fn print_report(r: &VerificationReport) {
    println!("{}  [{}]", r.name, r.spec);
    println!("dimension {}  padding required {}", r.dimension, r.padding_required);
    println!("verdict: {}", r.verdict);
    if let Some(m) = &r.message {
        println!("  {m}");
    }
    let Some(c) = &r.certificate else { return };
    println!("basic roots:");
    for b in &c.basic_roots_used {
        println!("  level {}  {}  ({})", b.level, b.label, b.root.join(", "));
    }
    println!("{:4} {:>10} {:>10} {:>10} {:>10} {:>10}", "", "integr", "square", "bismut", "torsion", "nijenhuis");
    for (n, g) in [("I", &c.residuals.i), ("J", &c.residuals.j), ("K", &c.residuals.k)] {
        println!(
            "{n:4} {:>10} {:>10} {:>10} {:>10} {:>10}",
            fmt_res(Some(g.integrability)),
            fmt_res(Some(g.square)),
            fmt_res(Some(g.bismut)),
            fmt_res(g.torsion_match),
            fmt_res(g.nijenhuis)
        );
    }
    println!("quaternion {:.2e}  jacobi {:.2e}", c.quaternion, c.jacobi);
    if r.spec.is_coset() {
        println!(
            "subspace leak {:.2e}  mixed f(m,m,h) {:.2e}",
            c.invariance_leak, c.coset_closure_residual
        );
    }
    println!("automorphisms:");
    for a in &c.automorphisms {
        println!(
            "  {} level {} {:24} orth {:.1e} inv {:.1e}",
            serde_json::to_value(a.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(), a.level, a.label, a.orthogonality, a.invariance
        );
    }
}

fn cmd_verify(c: &Common, spec: &str, no_nijenhuis: bool) -> Result<ExitCode, Failure> {
    let cfg = config(c, !no_nijenhuis)?;
    let spec = SpaceSpec::parse(spec).map_err(|e| match e {
        HktError::Parse(m) => Failure::Usage(format!("{m}\n{GRAMMAR}")),
        other => other.into(),
    })?;
    for f in &spec.simple_factors {
        check_range(f.family, f.rank)?;
    }
    let report = build_coset_triple(&spec, &cfg)?;
    if c.json {
        emit_json(&report)?;
    } else {
        print_report(&report);
    }
    Ok(exit_for(report.verdict))
}

fn cmd_classify(c: &Common, family: &str, max_rank: usize) -> Result<ExitCode, Failure> {
    let family = parse_family(family)?;
    check_range(family, max_rank)?;
    let rows = classify_family(family, max_rank)?;
    if c.json {
        emit_json(&rows)?;
    } else {
        println!("{:>4} {:>7}  group", "rank", "padding");
        for r in rows {
            println!("{:>4} {:>7}  {}", r.rank, r.padding, r.name);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog(c: &Common, family: &str, rank: usize, max_level: usize, verify: bool) -> Result<ExitCode, Failure> {
    let family = parse_family(family)?;
    check_range(family, rank)?;
    let cfg = config(c, true)?;
    let specs = enumerate_quotients(Factor::new(family, rank)?, max_level)?;
    if !verify {
        if c.json {
            let rows: Vec<_> = specs
                .iter()
                .map(|s| {
                    json!({"name": s.name(), "spec": s.to_string(), "dimension": s.tangent_dim().unwrap_or(0),
                           "padding": s.u1_count})
                })
                .collect();
            emit_json(&rows)?;
        } else {
            println!("{:36} {:28} {:>5} {:>7}", "name", "spec", "dim", "padding");
            for s in &specs {
                println!("{:36} {:28} {:>5} {:>7}", s.name(), s.to_string(), s.tangent_dim()?, s.u1_count);
            }
        }
        return Ok(ExitCode::SUCCESS);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs)
        .build()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let reports: Vec<VerificationReport> = pool.install(|| {
        specs
            .par_iter()
            .map(|s| build_coset_triple(s, &cfg))
            .collect::<Result<Vec<_>, _>>()
    })?;
    if c.json {
        emit_json(&reports)?;
    } else {
        println!("{:36} {:28} {:>5} {:>7}  {:14} {:>10}", "name", "spec", "dim", "padding", "verdict", "max resid");
        for r in &reports {
            println!(
                "{:36} {:28} {:>5} {:>7}  {:14} {:>10}",
                r.name,
                r.spec.to_string(),
                r.dimension,
                r.spec.u1_count,
                r.verdict.to_string(),
                fmt_res(r.max_residual())
            );
        }
    }
    let worst = reports
        .iter()
        .map(|r| r.verdict)
        .find(|v| *v != Verdict::Certified)
        .unwrap_or(Verdict::Certified);
    Ok(exit_for(worst))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let c = &cli.common;
    let out = match &cli.cmd {
        Cmd::Roots { algebra } => cmd_roots(c, algebra),
        Cmd::Verify { spec, no_nijenhuis } => cmd_verify(c, spec, *no_nijenhuis),
        Cmd::Classify { family, max_rank } => cmd_classify(c, family, *max_rank),
        Cmd::Catalog {
            family,
            rank,
            max_level,
            verify,
        } => cmd_catalog(c, family, *rank, *max_level, *verify),
    };
    match out {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
