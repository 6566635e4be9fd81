//! `ultradiv`: verifiers and constructors for ultrafilter divisibility at
//! finite scale.

use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use ultradiv::arith::{factorize, first_primes, level_of};
use ultradiv::coloring::{
    check_thick_lemmas, class_of, color_pair, color_tuple, is_thick_bounded, verify_progr,
    verify_refinement, PartitionGuard, ThickParams,
};
use ultradiv::constructions::{
    ec_enumerate, family_is_thick, g_value, greedy_thick_extend, verify_g_disjoint,
};
use ultradiv::filters::{divides_down, divides_up, product_principal, FinFilter, FinUniverse};
use ultradiv::patterns::{
    extend_divisible, generate_falpha_limited, shape_class, shape_name, witness_set, Pattern,
    PrimeAssignment, FALPHA_LIMIT,
};
use ultradiv::{Error, Nat, NatSet};

const AFTER_HELP: &str = "\
Pattern specs are comma-separated entries (label,exponent)xmultiplicity,
e.g. \"(p,1)x2,(q,3)\" (multiplicity defaults to 1). Assignments are
label:prime,prime,... groups separated by ';', e.g. \"p:3,5,7; q:11,13\".
`falpha` also accepts both in one argument: \"(p,1)x2 | p:3,5,7\".

ULTRADIV_GUARD overrides combinatorial guards: \"off\" lifts them, \"E,P\"
allows partitions of up to E elements into up to P parts.

Exit status: 0 pass or value, 1 verified violation, 2 usage error.";

#[derive(Parser)]
#[command(name = "ultradiv", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// Universe bound N for filter commands: filters live on {1..N}.
    #[arg(long, global = true, default_value = "10000")]
    universe: Nat,
    /// Window W bounding materialized sets.
    #[arg(long, global = true)]
    window: Option<Nat>,
    /// Seed for randomized harnesses.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Factorization pattern, level and shape class of n.
    Classify { n: Nat },
    /// Divisibility of the principal ultrafilters at m and n.
    Divides { m: Nat, n: Nat },
    /// The product of principal ultrafilters at m and n.
    Product { m: Nat, n: Nat },
    /// Color of a pair or tuple of indices, or the class of a number.
    Color(ColorArgs),
    /// Run a verification suite: progr, refinement, thick-lemmas, g-disjoint.
    Verify(VerifyArgs),
    /// Generate S_alpha from a pattern and an assignment.
    Falpha {
        spec: String,
        assignment: Option<String>,
    },
    /// Separating witness for a pair alpha, beta with alpha not below beta.
    Witness {
        alpha: Pattern,
        beta: Pattern,
        assignment: PrimeAssignment,
    },
    /// Extend l in S_alpha to a multiple in S_beta.
    Extend {
        l: Nat,
        alpha: Pattern,
        beta: Pattern,
        assignment: PrimeAssignment,
    },
    /// Bounded thickness of a set of primes.
    Thick(ThickArgs),
    /// Eventually constant functions assigned to the first primes.
    Ecfun(EcfunArgs),
    /// Greedy thickness-preserving extension of a family.
    Greedy(GreedyArgs),
}

#[derive(Args)]
struct ColorArgs {
    /// Indices; two give a pair color, more give the tuple color.
    indices: Vec<u64>,
    /// Classify this product of distinct primes instead.
    #[arg(long, conflicts_with = "indices")]
    number: Option<Nat>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 1024)]
    a0_max: u64,
    #[arg(long, default_value_t = 64)]
    d_max: u64,
    /// Arity for refinement.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 40)]
    index_bound: u64,
    #[arg(long, default_value_t = 500)]
    samples: u64,
    /// Index primes for g-disjoint.
    #[arg(long, default_value_t = 500)]
    count: usize,
    /// g-disjoint checks all pairs m < n <= max.
    #[arg(long, default_value_t = 4)]
    max: u64,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Product arity.
    #[arg(long = "arity", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k_max: u32,
    #[arg(long, default_value_t = 1)]
    m_max: usize,
}

#[derive(Args)]
struct ThickArgs {
    /// Comma-separated primes.
    primes: String,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct EcfunArgs {
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Also report g_n(i) for this n.
    #[arg(long)]
    g: Option<u64>,
}

#[derive(Args)]
struct GreedyArgs {
    /// Seed sets of primes, ';'-separated. Default: the first 12 primes.
    #[arg(long)]
    seeds: Option<String>,
    /// Candidate sets, ';'-separated.
    #[arg(long)]
    candidates: Option<String>,
    /// Draw this many random candidates inside the seed window.
    #[arg(long, default_value_t = 0)]
    random: usize,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Outcome {
    Pass,
    Fail,
    Value,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    params: Value,
    outcome: Outcome,
    result: Value,
    elapsed_ms: f64,
}

fn guard_from_env() -> Result<PartitionGuard, Error> {
    match std::env::var("ULTRADIV_GUARD") {
        Err(_) => Ok(PartitionGuard::default()),
        Ok(v) if v.trim() == "off" => Ok(PartitionGuard::unlimited()),
        Ok(v) => {
            let (e, p) = v.split_once(',').ok_or_else(|| {
                Error::Parse(format!("ULTRADIV_GUARD={v:?} is not \"off\" or \"E,P\""))
            })?;
            let num = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("ULTRADIV_GUARD: {e}")))
            };
            Ok(PartitionGuard {
                max_elements: num(e)?.min(63),
                max_parts: num(p)?,
            })
        }
    }
}

fn falpha_limit() -> u128 {
    match std::env::var("ULTRADIV_GUARD") {
        Ok(v) if v.trim() == "off" => u128::MAX,
        _ => FALPHA_LIMIT,
    }
}

fn prime_set(s: &str) -> Result<NatSet, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(Nat::from_str)
        .collect()
}

fn prime_sets(s: &str) -> Result<Vec<NatSet>, Error> {
    s.split(';').map(prime_set).collect()
}

fn params(p: ParamArgs) -> Result<ThickParams, Error> {
    ThickParams::new(p.n, p.k_max, p.m_max)
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn principal(n: &Nat, u: &FinUniverse) -> Result<FinFilter, Error> {
    FinFilter::principal(n.clone(), u.clone())
}

fn execute(cli: &Cli) -> Result<(&'static str, Value, Outcome, Value), Error> {
    let guard = guard_from_env()?;
    Ok(match &cli.command {
        Command::Classify { n } => {
            let fac = factorize(n);
            let (shape, class) = if n.is_one() {
                (Vec::new(), "1".to_string())
            } else {
                let s = shape_class(n)?;
                let name = shape_name(&s);
                (s, name)
            };
            let result = json!({
                "factorization": fac.to_string(),
                "pattern": Pattern::of_number(n).to_string(),
                "sigma": Pattern::of_number(n).sigma(),
                "level": level_of(n),
                "shape": shape,
                "class": class,
            });
            ("classify", json!({ "n": n }), Outcome::Value, result)
        }
        Command::Divides { m, n } => {
            let u = FinUniverse::new(cli.universe.clone());
            let (x, y) = (principal(m, &u)?, principal(n, &u)?);
            let result = json!({
                "divides_up": divides_up(&x, &y)?,
                "divides_down": divides_down(&x, &y)?,
            });
            (
                "divides",
                json!({ "m": m, "n": n, "universe": cli.universe }),
                Outcome::Value,
                result,
            )
        }
        Command::Product { m, n } => {
            let w = cli.window.clone().unwrap_or_else(|| cli.universe.clone());
            let r = product_principal(m, n, &w)?;
            let outcome = verdict(r.consistent);
            (
                "product",
                json!({ "m": m, "n": n, "window": w }),
                outcome,
                to_value(&r),
            )
        }
        Command::Color(args) => {
            if let Some(x) = &args.number {
                let n = factorize(x).distinct_primes();
                let k = class_of(n, x)?;
                (
                    "color",
                    json!({ "number": x }),
                    Outcome::Value,
                    json!({ "arity": n, "class": k }),
                )
            } else {
                let k = match args.indices.as_slice() {
                    [a, b] => color_pair(*a, *b)?,
                    idx => color_tuple(idx, idx.len())?,
                };
                (
                    "color",
                    json!({ "indices": args.indices }),
                    Outcome::Value,
                    json!({ "color": k }),
                )
            }
        }
        Command::Verify(v) => verify(v, cli.seed)?,
        Command::Falpha { spec, assignment } => {
            let (pat, asg) = match (spec.split_once('|'), assignment) {
                (Some((p, a)), None) => (p, a),
                (None, Some(a)) => (spec.as_str(), a.as_str()),
                _ => {
                    return Err(Error::InvalidArgument(
                        "give the assignment once, after '|' or as a second argument".into(),
                    ))
                }
            };
            let alpha: Pattern = pat.trim().parse()?;
            let asg: PrimeAssignment = asg.trim().parse()?;
            let set = generate_falpha_limited(&alpha, &asg, falpha_limit())?;
            let params = json!({ "pattern": alpha.to_string(), "assignment": asg.to_string() });
            (
                "falpha",
                params,
                Outcome::Value,
                json!({ "size": set.len(), "set": set }),
            )
        }
        Command::Witness {
            alpha,
            beta,
            assignment,
        } => {
            let params = json!({ "alpha": alpha.to_string(), "beta": beta.to_string(), "assignment": assignment.to_string() });
            match witness_set(alpha, beta, assignment, cli.window.as_ref()) {
                Ok(cert) => ("witness", params, verdict(cert.is_valid()), to_value(&cert)),
                Err(Error::NoWitness) => (
                    "witness",
                    params,
                    Outcome::Value,
                    json!({ "dominated": true }),
                ),
                Err(e) => return Err(e),
            }
        }
        Command::Extend {
            l,
            alpha,
            beta,
            assignment,
        } => {
            let out = extend_divisible(l, alpha, beta, assignment)?;
            let params = json!({ "l": l, "alpha": alpha.to_string(), "beta": beta.to_string(), "assignment": assignment.to_string() });
            (
                "extend",
                params,
                Outcome::Value,
                json!({ "extended": out, "divides": l.divides(&out) }),
            )
        }
        Command::Thick(t) => {
            let a = prime_set(&t.primes)?;
            let p = params(t.params)?;
            let v = is_thick_bounded(&a, p, guard)?;
            (
                "thick",
                json!({ "primes": a, "params": p }),
                Outcome::Value,
                to_value(&v),
            )
        }
        Command::Ecfun(e) => {
            let asg = ec_enumerate(e.count)?;
            let rows = asg
                .iter()
                .map(|(i, f)| {
                    let g = e.g.map(|n| g_value(&asg, i, n)).transpose()?;
                    Ok(json!({ "index": i, "function": f.to_string(), "g": g }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            (
                "ecfun",
                json!({ "count": e.count, "g": e.g }),
                Outcome::Value,
                json!(rows),
            )
        }
        Command::Greedy(g) => {
            let p = params(g.params)?;
            let seeds = match &g.seeds {
                Some(s) => prime_sets(s)?,
                None => vec![first_primes(12)],
            };
            let mut candidates = match &g.candidates {
                Some(s) => prime_sets(s)?,
                None => Vec::new(),
            };
            let window: Vec<Nat> = seeds
                .iter()
                .fold(NatSet::new(), |acc, s| acc.union(s))
                .into_iter()
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            for _ in 0..g.random {
                candidates.push(
                    window
                        .iter()
                        .filter(|_| rng.gen_bool(0.5))
                        .cloned()
                        .collect(),
                );
            }
            let out = greedy_thick_extend(&seeds, &candidates, p, guard)?;
            let thick = family_is_thick(&out.family, p, guard)?;
            let result = json!({
                "dead_ends": out.dead_ends(),
                "family_thick": thick,
                "outcome": out,
            });
            (
                "greedy",
                json!({ "params": p, "random": g.random, "seed": cli.seed }),
                verdict(thick),
                result,
            )
        }
    })
}

fn verify(v: &VerifyArgs, seed: u64) -> Result<(&'static str, Value, Outcome, Value), Error> {
    Ok(match v.suite.as_str() {
        "progr" => {
            let r = verify_progr(v.k, v.a0_max, v.d_max)?;
            let params =
                json!({ "suite": "progr", "k": v.k, "a0_max": v.a0_max, "d_max": v.d_max });
            ("verify", params, verdict(r.passed()), to_value(&r))
        }
        "refinement" => {
            let r = verify_refinement(v.n, v.index_bound)?;
            let params = json!({ "suite": "refinement", "n": v.n, "index_bound": v.index_bound });
            ("verify", params, verdict(r.passed()), to_value(&r))
        }
        "thick-lemmas" => {
            let r = check_thick_lemmas(v.samples, seed)?;
            let params = json!({ "suite": "thick-lemmas", "samples": v.samples, "seed": seed });
            ("verify", params, verdict(r.passed()), to_value(&r))
        }
        "g-disjoint" => {
            let asg = ec_enumerate(v.count)?;
            let mut reports = Vec::new();
            for m in 1..=v.max {
                for n in m + 1..=v.max {
                    reports.push(verify_g_disjoint(&asg, m, n)?);
                }
            }
            let pass = reports.iter().all(|r| r.passed());
            let params = json!({ "suite": "g-disjoint", "count": v.count, "max": v.max });
            ("verify", params, verdict(pass), to_value(&reports))
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {other:?}; expected progr, refinement, thick-lemmas or g-disjoint"
            )))
        }
    })
}

fn render_text(r: &Report) -> String {
    let mut out = format!(
        "{}: {}",
        r.command,
        serde_json::to_string(&r.outcome)
            .expect("enum")
            .trim_matches('"')
    );
    out.push_str(&format!(
        " ({:.1} ms)\n  params: {}",
        r.elapsed_ms, r.params
    ));
    match &r.result {
        Value::Object(fields) => {
            for (k, v) in fields {
                out.push_str(&format!("\n  {k}: {v}"));
            }
        }
        other => out.push_str(&format!("\n  result: {other}")),
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match execute(&cli) {
        Ok((command, params, outcome, result)) => {
            let report = Report {
                command,
                params,
                outcome,
                result,
                elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
            };
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string(&report).expect("reports serialize")
                ),
                Format::Text => println!("{}", render_text(&report)),
            }
            if outcome == Outcome::Fail {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
