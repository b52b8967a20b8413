//! Command-line front end: parse presentation documents, dispatch analyses,
//! emit JSON reports.
//!
//! Exit status: 0 decided-true, 1 decided-false, 2 undecided, 3 input error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use logmonoid::chart;
use logmonoid::family::{self, FamilyParams, FamilyShape};
use logmonoid::io as lio;
use logmonoid::log_monoid::{descent_check, LogMonoid};
use logmonoid::monoid::TriState;
use logmonoid::pushout;
use logmonoid::ring::{RingElem, RingMap};
use logmonoid::semistable::{self, DetectOptions};
use logmonoid::series::{self, PrimaryDecompConfig, SeriesRing};
use logmonoid::snf;
use logmonoid::word::Word;

#[derive(Parser)]
#[command(
    name = "logmonoid",
    version,
    about = "Monoid, chart and model-ring analyses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON document.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write the report here as well as to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Degree bound override (default: document bound or LOGMONOID_BOUND).
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// Seed for random families.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock runtime in the report (off keeps reports
    /// byte-identical across runs).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sharpness, irreducibles, groupification and bounded cancellativity
    /// of a presentation.
    Analyze,
    /// Search for a semistable structure on a homomorphism document.
    DetectSemistable {
        /// Also search subsets of the canonical sigma (<= 6 generators).
        #[arg(long)]
        sigma_subsets: bool,
    },
    /// Validate the structure carried by the document against (S1)-(S4).
    ValidateSemistable,
    /// Quotient transport: document carries hom, structure and N generators.
    Quotient,
    /// Pushout of two homomorphism documents {"f": ..., "g": ...}.
    Pushout {
        /// Degree for the class table fallback.
        #[arg(long, default_value_t = 4)]
        table_degree: u32,
    },
    /// Classify a chart homomorphism into cases I/II/III.
    ClassifyChart {
        /// Coefficient characteristic for regularity realization.
        #[arg(long, default_value_t = 2)]
        p: u8,
        /// t-adic precision for regularity realization.
        #[arg(long, default_value_t = 4)]
        precision: u8,
    },
    /// Primary-decomposition identities in the model ring.
    PrimaryDecompCheck(PrimaryArgs),
    /// Descent exactness for a faithfully flat toy extension.
    DescentCheck,
    /// Unit rigidity enumeration in A[[X]]/(X_1...X_n - t^a).
    UnitRigidity(RigidityArgs),
    /// Deterministic chart families with ground truth.
    GenerateFamily {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Args)]
struct PrimaryArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    a: u32,
    /// Comma-separated B entries (length n).
    #[arg(long = "B", value_delimiter = ',', num_args = 0.., default_value = "")]
    b: Vec<u32>,
    /// Comma-separated I entries (length n).
    #[arg(long = "I", value_delimiter = ',', num_args = 0.., default_value = "")]
    i: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    p: u8,
    /// t-adic precision of the coefficient ring.
    #[arg(long = "N", default_value_t = 4)]
    precision: u8,
    #[arg(long, default_value_t = 5)]
    d: u32,
}

#[derive(Args)]
struct RigidityArgs {
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Number of disjoint supports (consecutive singletons; the last takes
    /// the remaining variables).
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 2)]
    p: u8,
    /// t-adic precision of the coefficient ring.
    #[arg(long = "N", default_value_t = 2)]
    precision: u8,
    #[arg(long, default_value_t = 4)]
    d: u32,
    /// J = t^k R.
    #[arg(long, default_value_t = 1)]
    j_power: usize,
    #[arg(long, default_value_t = 1)]
    a: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Free,
    UMonoid,
    Semistable,
}

struct Outcome {
    result: Value,
    decided: bool,
    truth: bool,
    bound_used: Option<u32>,
    witnesses: Value,
}

impl Outcome {
    fn new(result: Value, decided: bool, truth: bool, bound_used: Option<u32>) -> Self {
        Outcome {
            result,
            decided,
            truth,
            bound_used,
            witnesses: Value::Null,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let default_bound = cli
        .bound
        .or_else(|| {
            std::env::var("LOGMONOID_BOUND")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(12);

    let input: Value = match &cli.json {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(s) => match serde_json::from_str(&s) {
                Ok(v) => v,
                Err(e) => return input_error(&format!("invalid JSON in {}: {e}", path.display())),
            },
            Err(e) => return input_error(&format!("cannot read {}: {e}", path.display())),
        },
        None => {
            if matches!(
                cli.command,
                Command::Analyze
                    | Command::DetectSemistable { .. }
                    | Command::ValidateSemistable
                    | Command::Quotient
                    | Command::Pushout { .. }
                    | Command::ClassifyChart { .. }
                    | Command::DescentCheck
            ) {
                let mut buf = String::new();
                if std::io::stdin().read_to_string(&mut buf).is_err() || buf.trim().is_empty() {
                    return input_error("these commands need --json <path> or JSON on stdin");
                }
                match serde_json::from_str(&buf) {
                    Ok(v) => v,
                    Err(e) => return input_error(&format!("invalid JSON on stdin: {e}")),
                }
            } else {
                Value::Null
            }
        }
    };

    let command_name = command_name(&cli.command);
    let digest_input = json!({
        "command": command_name,
        "document": input,
        "seed": cli.seed,
        "bound": default_bound,
    });
    let inputs_digest = sha256_hex(&canonical_string(&digest_input));

    let outcome = run(&cli, &input, default_bound);
    match outcome {
        Ok(out) => {
            let runtime_ms: Value = if cli.timings {
                json!(start.elapsed().as_millis() as u64)
            } else {
                Value::Null
            };
            let report = json!({
                "command": command_name,
                "inputs_digest": inputs_digest,
                "result": out.result,
                "witnesses": out.witnesses,
                "decided": out.decided,
                "bound_used": out.bound_used,
                "runtime_ms": runtime_ms,
            });
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            if !out.decided {
                ExitCode::from(2)
            } else if out.truth {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => input_error(&msg),
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze => "analyze",
        Command::DetectSemistable { .. } => "detect-semistable",
        Command::ValidateSemistable => "validate-semistable",
        Command::Quotient => "quotient",
        Command::Pushout { .. } => "pushout",
        Command::ClassifyChart { .. } => "classify-chart",
        Command::PrimaryDecompCheck(_) => "primary-decomp-check",
        Command::DescentCheck => "descent-check",
        Command::UnitRigidity(_) => "unit-rigidity",
        Command::GenerateFamily { .. } => "generate-family",
    }
}

fn canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("canonical serialization")
}

fn sha256_hex(s: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(s.as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn run(cli: &Cli, input: &Value, bound: u32) -> Result<Outcome, String> {
    match &cli.command {
        Command::Analyze => analyze(input, bound),
        Command::DetectSemistable { sigma_subsets } => {
            detect_semistable(input, bound, *sigma_subsets)
        }
        Command::ValidateSemistable => validate_semistable(input, bound),
        Command::Quotient => quotient(input, bound),
        Command::Pushout { table_degree } => pushout_cmd(input, bound, *table_degree),
        Command::ClassifyChart { p, precision } => classify_chart(input, bound, *p, *precision),
        Command::PrimaryDecompCheck(args) => primary_decomp(args),
        Command::DescentCheck => descent(input, bound),
        Command::UnitRigidity(args) => unit_rigidity(args),
        Command::GenerateFamily { shape, count } => {
            generate_family(*shape, cli.seed, *count, bound)
        }
    }
}

fn analyze(input: &Value, bound: u32) -> Result<Outcome, String> {
    let m = lio::parse_monoid(input, "", bound).map_err(|e| e.to_string())?;
    let sharp = m.is_sharp();
    let irreducibles: Option<Vec<Word>> = if sharp.state.is_true() {
        Some(
            m.irreducibles()
                .map_err(|e| e.to_string())?
                .iter()
                .map(|e| e.word().clone())
                .collect(),
        )
    } else {
        None
    };
    let group = snf::cokernel(
        m.relations().len(),
        m.gen_count(),
        &m.relations()
            .iter()
            .flat_map(|(l, r)| {
                l.iter()
                    .zip(r)
                    .map(|(&a, &b)| i128::from(a) - i128::from(b))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>(),
    );
    let cancellative = m
        .is_cancellative_up_to(m.congruence_bound().min(5))
        .map_err(|e| e.to_string())?;
    let decided = m.is_decision_exact();
    let mut out = Outcome::new(
        json!({
            "sharp": sharp.state,
            "irreducibles": irreducibles,
            "groupification": { "rank": group.rank, "torsion_divisors": group.torsion_divisors },
            "cancellative_within_bound": cancellative,
            "exact_decision": decided,
        }),
        true,
        true,
        Some(m.congruence_bound()),
    );
    out.witnesses = json!(sharp.unit_witnesses);
    Ok(out)
}

fn detect_semistable(input: &Value, bound: u32, subsets: bool) -> Result<Outcome, String> {
    let h = lio::parse_hom(input, "", bound).map_err(|e| e.to_string())?;
    let opts = DetectOptions {
        bound: None,
        sigma_subset_search: subsets,
    };
    let found = semistable::all_structures(&h, opts).map_err(|e| e.to_string())?;
    let truth = !found.is_empty();
    Ok(Outcome::new(
        json!({
            "structures": found.iter().map(lio::structure_to_json).collect::<Vec<_>>(),
        }),
        true,
        truth,
        Some(h.target().congruence_bound().min(8)),
    ))
}

fn validate_semistable(input: &Value, bound: u32) -> Result<Outcome, String> {
    let h = lio::parse_hom(input, "", bound).map_err(|e| e.to_string())?;
    let s = lio::parse_structure(input, "").map_err(|e| e.to_string())?;
    let rep = semistable::validate_semistable(&h, &s).map_err(|e| e.to_string())?;
    Ok(Outcome::new(
        json!({
            "state": rep.state,
            "failed_condition": rep.failed_condition,
        }),
        rep.state != TriState::Undecided,
        rep.state.is_true(),
        Some(rep.bound_used),
    ))
}

fn quotient(input: &Value, bound: u32) -> Result<Outcome, String> {
    let h = lio::parse_hom(input, "", bound).map_err(|e| e.to_string())?;
    let s = lio::parse_structure(input, "").map_err(|e| e.to_string())?;
    let n_field = input
        .get("N")
        .and_then(|v| v.as_array())
        .ok_or("missing field /N: generators of the submonoid")?;
    let n_gens: Vec<Word> = n_field
        .iter()
        .map(|w| {
            w.as_array()
                .map(|a| a.iter().map(|x| x.as_u64().unwrap_or(0) as u32).collect())
                .ok_or("N entries must be exponent vectors")
        })
        .collect::<Result<_, _>>()?;
    let res = semistable::quotient_semistable(&h, &s, &n_gens).map_err(|e| e.to_string())?;
    Ok(Outcome::new(
        json!({
            "quotient": lio::monoid_to_json(&res.quotient),
            "induced_hom": lio::hom_to_json(&res.induced_hom),
            "structure": lio::structure_to_json(&res.structure),
        }),
        true,
        true,
        Some(h.target().congruence_bound()),
    ))
}

fn pushout_cmd(input: &Value, bound: u32, table_degree: u32) -> Result<Outcome, String> {
    let f = lio::parse_hom(input.get("f").ok_or("missing field /f")?, "/f", bound)
        .map_err(|e| e.to_string())?;
    let g = lio::parse_hom(input.get("g").ok_or("missing field /g")?, "/g", bound)
        .map_err(|e| e.to_string())?;
    let po = pushout::pushout(&f, &g).map_err(|e| e.to_string())?;

    // presentation output when the base is free of rank <= 1 and both legs
    // are free: generators of both sides, one relation f(1) = g(1)
    let base_free = f.source().relations().is_empty() && f.source().gen_count() <= 1;
    let legs_free = f.target().relations().is_empty() && g.target().relations().is_empty();
    let result = if base_free && legs_free {
        let mut gens: Vec<String> = f
            .target()
            .generators()
            .iter()
            .map(|s| format!("L_{s}"))
            .collect();
        gens.extend(g.target().generators().iter().map(|s| format!("R_{s}")));
        let nl = f.target().gen_count();
        let nr = g.target().gen_count();
        let mut relations: Vec<(Word, Word)> = Vec::new();
        if f.source().gen_count() == 1 {
            let mut lhs = vec![0u32; nl + nr];
            lhs[..nl].copy_from_slice(&f.images()[0]);
            let mut rhs = vec![0u32; nl + nr];
            rhs[nl..].copy_from_slice(&g.images()[0]);
            relations.push((lhs, rhs));
        }
        json!({
            "presentation": {
                "generators": gens,
                "relations": relations,
                "bound": f.source().congruence_bound(),
            },
            "verified_to_degree": table_degree,
        })
    } else {
        // class table up to the requested degree
        let elems = pushout::elements_up_to(&po, table_degree);
        let mut classes: Vec<(Word, Word)> = Vec::new();
        for e in elems {
            if !classes.iter().any(|c| po.pairs_equal(c, &e).is_true()) {
                classes.push(e);
            }
        }
        classes.sort();
        json!({
            "class_table_degree": table_degree,
            "classes": classes.iter().map(|(p, r)| json!({"left": p, "right": r})).collect::<Vec<_>>(),
        })
    };
    Ok(Outcome::new(result, true, true, Some(po.bound())))
}

fn classify_chart(input: &Value, bound: u32, p: u8, precision: u8) -> Result<Outcome, String> {
    let h = lio::parse_hom(input, "", bound).map_err(|e| e.to_string())?;
    let c = match chart::classify_chart(&h) {
        Ok(c) => c,
        Err(chart::ChartError::UndecidedAtBound { bound }) => {
            return Ok(Outcome::new(
                json!({ "case": null, "reason": "undecided at bound" }),
                false,
                false,
                Some(bound),
            ));
        }
        Err(e) => return Err(e.to_string()),
    };
    let boundary = chart::boundary_monomial(&c).ok();
    let marking = chart::marking_value(&c);
    let log_trivial = chart::is_log_trivial(&h).map_err(|e| e.to_string())?;
    let regularity = match c.case {
        chart::ChartCase::II => {
            chart::verify_regular_elements(&h, &c, if p == 2 { 3 } else { p }, precision, 4).ok()
        }
        _ => chart::verify_regular_elements(&h, &c, p, precision, 5).ok(),
    };
    Ok(Outcome::new(
        json!({
            "case": format!("{:?}", c.case),
            "complement": c.complement,
            "structure": c.structure.as_ref().map(lio::structure_to_json),
            "boundary_monomial": boundary,
            "marking": marking,
            "log_trivial": log_trivial,
            "regular_elements": c.regular_elements,
            "regularity": regularity.map(|v| json!({
                "all_regular": v.all_regular,
                "per_element": v.per_element,
            })),
        }),
        true,
        true,
        Some(h.target().congruence_bound().min(8)),
    ))
}

fn primary_decomp(args: &PrimaryArgs) -> Result<Outcome, String> {
    let b = if args.b.len() == 1 && args.b[0] == 0 && args.n == 0 {
        Vec::new()
    } else {
        args.b.clone()
    };
    let i = if args.i.len() == 1 && args.i[0] == 0 && args.n == 0 {
        Vec::new()
    } else {
        args.i.clone()
    };
    if b.len() != args.n || i.len() != args.n {
        return Err(format!(
            "--b and --i must have length n = {} (got {} and {})",
            args.n,
            b.len(),
            i.len()
        ));
    }
    let cfg = PrimaryDecompConfig {
        l: args.l,
        n: args.n,
        a: args.a,
        b,
        i,
        p: args.p,
        precision: args.precision,
        degree: args.d,
    };
    let rep = series::primary_decomp_check(&cfg).map_err(|e| e.to_string())?;
    Ok(Outcome::new(
        serde_json::to_value(&rep).expect("report serializes"),
        true,
        rep.all_hold,
        Some(cfg.degree),
    ))
}

fn descent(input: &Value, bound: u32) -> Result<Outcome, String> {
    let base_ring = lio::parse_ring(input.get("base").ok_or("missing field /base")?, "/base")
        .map_err(|e| e.to_string())?;
    let ext_ring = lio::parse_ring(
        input.get("extension").ok_or("missing field /extension")?,
        "/extension",
    )
    .map_err(|e| e.to_string())?;
    let m_doc = input.get("monoid").ok_or("missing field /monoid")?;
    let base_monoid = lio::parse_monoid(m_doc, "/monoid", bound).map_err(|e| e.to_string())?;
    let images: Vec<RingElem> = match input.get("images") {
        Some(v) => v
            .as_array()
            .ok_or("images must be an array")?
            .iter()
            .map(|e| {
                e.as_array()
                    .map(|a| RingElem(a.iter().map(|x| x.as_u64().unwrap_or(0) as u8).collect()))
                    .ok_or("image entries must be coefficient arrays")
            })
            .collect::<Result<_, _>>()?,
        None => vec![base_ring.zero(); base_monoid.gen_count()],
    };
    let degree = input
        .get("degree")
        .and_then(|v| v.as_u64())
        .map(|d| d as u32)
        .unwrap_or(4);
    let m =
        LogMonoid::associated(base_monoid, base_ring.clone(), images).map_err(|e| e.to_string())?;
    let f = RingMap::ScalarEmbed {
        dom: base_ring,
        cod: ext_ring,
    };
    f.validate().map_err(|e| e.to_string())?;
    let rep = descent_check(&m, &f, degree).map_err(|e| e.to_string())?;
    Ok(Outcome::new(
        serde_json::to_value(&rep).expect("report serializes"),
        true,
        rep.injective && rep.equalizer_ok,
        Some(degree),
    ))
}

fn unit_rigidity(args: &RigidityArgs) -> Result<Outcome, String> {
    if args.l > args.n {
        return Err("need l <= n disjoint supports".into());
    }
    let ring = SeriesRing::model_ring(args.p, args.precision, args.n, 0, args.a, &[], None, args.d)
        .map_err(|e| e.to_string())?;
    // supports: first l-1 singletons, the last takes the rest
    let mut supports: Vec<Word> = Vec::new();
    for i in 0..args.l {
        let mut s = vec![0u32; args.n];
        if i + 1 == args.l {
            for item in s.iter_mut().skip(i) {
                *item = 1;
            }
        } else {
            s[i] = 1;
        }
        supports.push(s);
    }
    let rep =
        series::unit_rigidity_check(&ring, args.j_power, &supports).map_err(|e| e.to_string())?;
    Ok(Outcome::new(
        serde_json::to_value(&rep).expect("report serializes"),
        true,
        rep.only_trivial,
        Some(args.d),
    ))
}

fn generate_family(
    shape: ShapeArg,
    seed: u64,
    count: usize,
    bound: u32,
) -> Result<Outcome, String> {
    let shape = match shape {
        ShapeArg::Free => FamilyShape::Free,
        ShapeArg::UMonoid => FamilyShape::UMonoid,
        ShapeArg::Semistable => FamilyShape::Semistable,
    };
    let params = FamilyParams {
        bound,
        ..FamilyParams::default()
    };
    let instances =
        family::generate_family(shape, &params, seed, count).map_err(|e| e.to_string())?;
    let list: Vec<Value> = instances
        .iter()
        .map(|inst| {
            let expected = match &inst.expected {
                family::ExpectedCase::Free { rank } => json!({"case": "I", "rank": rank}),
                family::ExpectedCase::UMonoid { size } => json!({"case": "II", "size": size}),
                family::ExpectedCase::Semistable { structure } => {
                    json!({"case": "III", "structure": lio::structure_to_json(structure)})
                }
            };
            json!({
                "index": inst.index,
                "hom": lio::hom_to_json(&inst.hom),
                "expected": expected,
            })
        })
        .collect();
    Ok(Outcome::new(
        json!({ "instances": list }),
        true,
        true,
        Some(bound),
    ))
}
