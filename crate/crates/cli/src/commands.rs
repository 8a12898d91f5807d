//! Command dispatch. Every command returns a JSON report; keys are sorted
//! by `serde_json`'s default map, and integers that can outgrow 64 bits are
//! written as decimal strings.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use apseq::arith::factor_u64;
use apseq::heightgraph::DEFAULT_RESIDUE_BUDGET;
use apseq::oracle::{coded_prefix, default_window, DEFAULT_MAX_WINDOW};
use apseq::periodicity::periodic_witnesses;
use apseq::{
    factor_intersection, periodicity_test, prefix_ap_scan, APDecider, Alphabet, AutoClassification,
    ClassifyOptions, Error, GraphContext, LevelReport, Letter, Morphism, PeriodicityVerdict, SeedPair,
    SpectrumAnalysis, SpectrumMethod, SpectrumOptions, Status,
};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::input::{parse_input, AnalysisInput, ParseError};

pub const SCHEMA: u64 = 1;
const LISTED_ELEMENTS: u64 = 100;

#[derive(Clone, Debug)]
pub enum Command {
    Info,
    Periodic,
    Spectrum,
    Check { difference: u64 },
    Height,
    Graph { dot: Option<PathBuf> },
    Classify { max_level: u32 },
    Periods { max_level: u32 },
    Oracle { difference: u64, length: Option<usize> },
    Intersect { other: PathBuf, length: usize },
    Complexity { max_n: usize },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Periodic => "periodic",
            Command::Spectrum => "spectrum",
            Command::Check { .. } => "check",
            Command::Height => "height",
            Command::Graph { .. } => "graph",
            Command::Classify { .. } => "classify",
            Command::Periods { .. } => "periods",
            Command::Oracle { .. } => "oracle",
            Command::Intersect { .. } => "intersect",
            Command::Complexity { .. } => "complexity",
        }
    }

    fn echo(&self, bound: usize) -> Value {
        let mut args = Map::new();
        match self {
            Command::Check { difference } => {
                args.insert("difference".into(), json!(difference));
            }
            Command::Graph { dot } => {
                args.insert("dot".into(), json!(dot.as_ref().map(|p| p.display().to_string())));
            }
            Command::Classify { max_level } | Command::Periods { max_level } => {
                args.insert("max_level".into(), json!(max_level));
            }
            Command::Oracle { difference, length } => {
                args.insert("difference".into(), json!(difference));
                args.insert("length".into(), json!(length));
            }
            Command::Intersect { other, length } => {
                args.insert("other".into(), json!(other.display().to_string()));
                args.insert("length".into(), json!(length));
            }
            Command::Complexity { max_n } => {
                args.insert("max_n".into(), json!(max_n));
            }
            _ => {}
        }
        args.insert("nonperiodic_bound".into(), json!(bound));
        json!({ "name": self.name(), "args": args })
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Precondition(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Internal(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Parse(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => CliError::Internal(e.to_string()),
            Error::Primitivity => CliError::Precondition(format!("primitivity: {e}")),
            Error::ProperRequired => CliError::Precondition(format!("properness: {e}")),
            Error::PeriodicInput { .. } => CliError::Precondition(format!("non-periodicity: {e}")),
            Error::NotCoding(_) => CliError::Precondition(format!("coding: {e}")),
            Error::Budget { .. } => CliError::Precondition(format!("residue budget: {e}")),
            Error::Domain(_) => CliError::Precondition(e.to_string()),
        }
    }
}

type CmdResult = Result<Value, CliError>;

pub fn load(path: &std::path::Path) -> Result<AnalysisInput, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text).map_err(|e: ParseError| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Runs `command` on `input` and returns the complete report.
pub fn run(input: &AnalysisInput, command: &Command, bound: usize) -> CmdResult {
    let options = SpectrumOptions {
        nonperiodic_bound: bound,
    };
    let body = match command {
        Command::Info => info(input)?,
        Command::Periodic => periodic(input, bound)?,
        Command::Spectrum => spectrum(input, &options)?,
        Command::Check { difference } => check(input, *difference, &options)?,
        Command::Height => height(input)?,
        Command::Graph { dot } => graph(input, dot.as_deref())?,
        Command::Classify { max_level } => classify(input, *max_level)?,
        Command::Periods { max_level } => periods(input, *max_level)?,
        Command::Oracle { difference, length } => oracle(input, *difference, *length)?,
        Command::Intersect { other, length } => intersect(input, &load(other)?, *length)?,
        Command::Complexity { max_n } => complexity(input, *max_n)?,
    };
    let mut report = Map::new();
    report.insert("schema".into(), json!(SCHEMA));
    report.insert("command".into(), command.echo(bound));
    report.insert("input".into(), describe_input(input));
    if let Value::Object(fields) = body {
        report.extend(fields);
    }
    Ok(Value::Object(report))
}

fn symbol(alphabet: &Alphabet, a: Letter) -> Value {
    json!(alphabet.symbol(a))
}

fn symbols<'a>(alphabet: &Alphabet, letters: impl IntoIterator<Item = &'a Letter>) -> Value {
    Value::Array(letters.into_iter().map(|&a| symbol(alphabet, a)).collect())
}

fn big(n: &BigInt) -> Value {
    json!(n.to_string())
}

fn seed_value(alphabet: &Alphabet, seed: &SeedPair) -> Value {
    json!(seed.render(alphabet))
}

fn describe_input(input: &AnalysisInput) -> Value {
    let alphabet = input.sigma.domain();
    let rules: Map<String, Value> = alphabet
        .letters()
        .map(|a| {
            let image: Vec<&str> = input.sigma.image(a).iter().map(|&b| alphabet.symbol(b)).collect();
            (alphabet.symbol(a).to_string(), json!(image.join(" ")))
        })
        .collect();
    let coding = input.phi.as_ref().map(|phi| {
        alphabet
            .letters()
            .map(|a| (alphabet.symbol(a).to_string(), symbol(phi.codomain(), phi.code(a))))
            .collect::<Map<String, Value>>()
    });
    json!({
        "alphabet": alphabet.symbols(),
        "rules": rules,
        "coding": coding,
        "seed": input.seed.map(|s| seed_value(alphabet, &s)),
    })
}

/// The fixed point to work on: the given seed, or the smallest power of
/// `σ` with a one-sided seed.
fn fixed_point(input: &AnalysisInput) -> Result<(usize, Morphism, SeedPair), CliError> {
    match input.seed {
        Some(seed) => {
            input.sigma.fixed_point_prefix(&seed, 1)?;
            Ok((1, input.sigma.clone(), seed))
        }
        None => Ok(input.sigma.seeded_power()?),
    }
}

fn fixed_point_value(alphabet: &Alphabet, power: usize, seed: &SeedPair) -> Value {
    json!({ "power": power, "seed": seed_value(alphabet, seed) })
}

fn graph_context(input: &AnalysisInput) -> Result<GraphContext, CliError> {
    Ok(GraphContext::new(&input.sigma, input.seed)?)
}

fn conditional(bound: Option<usize>) -> Value {
    match bound {
        Some(b) => json!({ "nonperiodic_bound": b }),
        None => Value::Null,
    }
}

fn info(input: &AnalysisInput) -> CmdResult {
    let sigma = &input.sigma;
    let alphabet = sigma.domain();
    let profile = sigma.profile();
    let incidence = sigma.incidence();
    let matrix: Vec<Value> = (0..incidence.rows())
        .map(|i| Value::Array(incidence.row(i).iter().map(big).collect()))
        .collect();
    let seeded = sigma
        .seeded_power()
        .ok()
        .map(|(k, _, seed)| fixed_point_value(alphabet, k, &seed));
    let seeds: Vec<Value> = sigma
        .admissible_seeds()?
        .iter()
        .map(|s| seed_value(alphabet, s))
        .collect();
    Ok(json!({
        "profile": {
            "max_len": profile.max_len,
            "min_len": profile.min_len,
            "constant_length": profile.constant_length,
            "left_proper": profile.left_proper,
            "right_proper": profile.right_proper,
            "growing_letters": symbols(alphabet, profile.growing_letters.iter()),
        },
        "primitive": sigma.is_primitive(),
        "incidence": matrix,
        "seeds": seeds,
        "fixed_point": seeded,
    }))
}

fn verdict_value(verdict: &PeriodicityVerdict) -> Value {
    match verdict {
        PeriodicityVerdict::Periodic {
            minimal_period,
            per_residue,
        } => json!({
            "verdict": "periodic",
            "minimal_period": minimal_period,
            "essential_periods": per_residue,
        }),
        PeriodicityVerdict::NonPeriodicCertified => json!({ "verdict": "non_periodic" }),
        PeriodicityVerdict::NonPeriodicUpTo { bound } => json!({
            "verdict": "non_periodic",
            "conditional": { "nonperiodic_bound": bound },
        }),
    }
}

fn periodic(input: &AnalysisInput, bound: usize) -> CmdResult {
    let (power, sigma, seed) = fixed_point(input)?;
    let verdict = periodicity_test(&sigma, &seed, bound)?;
    let mut out = verdict_value(&verdict);
    out["fixed_point"] = fixed_point_value(sigma.domain(), power, &seed);
    Ok(out)
}

fn spectrum_value(analysis: &SpectrumAnalysis) -> Value {
    let desc = &analysis.descriptor;
    let bounded: Map<String, Value> = desc
        .bounded_primes
        .iter()
        .map(|(q, e)| (q.to_string(), json!(e)))
        .collect();
    let elements: Vec<Value> = desc
        .elements_up_to(LISTED_ELEMENTS)
        .into_iter()
        .map(|p| if p == 1 { json!("1 (trivial)") } else { json!(p.to_string()) })
        .collect();
    let method = match &analysis.method {
        SpectrumMethod::ConstantLength { length, height } => json!({
            "kind": "constant_length",
            "length": length,
            "height": height,
        }),
        SpectrumMethod::Proper {
            prime_periods,
            infinite_primes,
            trace,
        } => json!({
            "kind": "proper",
            "prime_periods": prime_periods,
            "infinite_primes": infinite_primes,
            "stabilization": {
                "steps": trace.entries.iter().map(|e| json!({
                    "n": e.n,
                    "g": big(&e.g),
                    "g_bounded": big(&e.g_tilde),
                })).collect::<Vec<_>>(),
                "stop": trace.stop,
                "cap": trace.cap,
            },
        }),
    };
    let mut out = json!({
        "spectrum": {
            "infinite_primes": desc.infinite_primes,
            "bounded_primes": bounded,
            "display": desc.to_string(),
            "elements_up_to": LISTED_ELEMENTS,
            "elements": elements,
            "trivial": desc.is_trivial(),
        },
        "method": method,
        "conditional": conditional(analysis.conditional_bound()),
    });
    if desc.is_trivial() {
        out["note"] = json!("no non-trivial rational eigenvalue");
    }
    out
}

fn spectrum(input: &AnalysisInput, options: &SpectrumOptions) -> CmdResult {
    Ok(spectrum_value(&apseq::spectrum_with(&input.sigma, options)?))
}

fn witnesses_value(alphabet: &Alphabet, witnesses: &[(u64, Letter)]) -> Value {
    Value::Array(
        witnesses
            .iter()
            .map(|&(r, b)| json!({ "residue": r, "letter": symbol(alphabet, b) }))
            .collect(),
    )
}

fn check(input: &AnalysisInput, p: u64, options: &SpectrumOptions) -> CmdResult {
    if p == 0 {
        return Err(CliError::Usage("--difference must be positive".into()));
    }
    let phi = input.coding();
    let codomain = phi.codomain().clone();
    if input.sigma.profile().constant_length.is_some_and(|l| l >= 2) {
        let ctx = graph_context(input)?;
        let result = ctx.check_difference(&phi, p)?;
        return Ok(json!({
            "method": "period_graph",
            "requested": p,
            "reduced": result.reduced,
            "level": result.level,
            "difference": ctx.graph.difference(result.level)?,
            "witnesses": witnesses_value(&codomain, &result.witnesses),
            "constant": !result.witnesses.is_empty(),
            "conditional": Value::Null,
        }));
    }
    let decider = match APDecider::new(&input.sigma, input.phi.as_ref(), options) {
        Ok(d) => d,
        Err(Error::PeriodicInput { .. }) => return check_periodic(input, &phi, p, options.nonperiodic_bound),
        Err(e) => return Err(e.into()),
    };
    let decision = decider.decide(p)?;
    let witnesses: Vec<(u64, Letter)> = decision.witnesses.iter().map(|w| (w.residue, w.letter)).collect();
    Ok(json!({
        "method": "proper",
        "requested": p,
        "reduced": decision.reduced,
        "exponent": decision.exponent,
        "escalations": decision.escalations,
        "witnesses": witnesses_value(&codomain, &witnesses),
        "constant": !witnesses.is_empty(),
        "conditional": conditional(decider.spectrum().conditional_bound()),
    }))
}

fn check_periodic(input: &AnalysisInput, phi: &Morphism, p: u64, bound: usize) -> CmdResult {
    let (_, sigma, seed) = fixed_point(input)?;
    let verdict = periodicity_test(&sigma, &seed, bound)?;
    let PeriodicityVerdict::Periodic { minimal_period, .. } = verdict else {
        return Err(CliError::Internal("periodic input lost its period".into()));
    };
    let word = coded_prefix(&sigma, &seed, Some(phi), minimal_period as usize)?;
    let witnesses = periodic_witnesses(&word, p);
    Ok(json!({
        "method": "periodic",
        "requested": p,
        "reduced": p,
        "minimal_period": minimal_period,
        "witnesses": witnesses_value(phi.codomain(), &witnesses),
        "constant": !witnesses.is_empty(),
        "conditional": Value::Null,
    }))
}

fn height(input: &AnalysisInput) -> CmdResult {
    let ctx = graph_context(input)?;
    let alphabet = ctx.sigma.domain();
    let classes: Vec<Value> = ctx.height.classes.iter().map(|c| symbols(alphabet, c.iter())).collect();
    Ok(json!({
        "height": ctx.height.h,
        "length": ctx.graph.length(),
        "classes": classes,
        "fixed_point": fixed_point_value(alphabet, ctx.power, &ctx.seed),
    }))
}

fn vertex_value(ctx: &GraphContext, phi: &Morphism, v: usize) -> Value {
    let letters = ctx.graph.vertex(v);
    let image: BTreeSet<Letter> = letters.iter().map(|&b| phi.code(b)).collect();
    json!({
        "id": v,
        "letters": symbols(ctx.sigma.domain(), letters.iter()),
        "image": symbols(phi.codomain(), image.iter()),
    })
}

fn graph(input: &AnalysisInput, dot: Option<&std::path::Path>) -> CmdResult {
    let ctx = graph_context(input)?;
    let phi = input.coding();
    let g = &ctx.graph;
    let vertices: Vec<Value> = (0..g.vertex_count())
        .map(|v| {
            let mut value = vertex_value(&ctx, &phi, v);
            value["successors"] = json!(g.successors(v));
            value["root"] = json!(g.roots().contains(&v));
            value
        })
        .collect();
    if let Some(path) = dot {
        let text = g.export_automaton(ctx.sigma.domain(), &phi)?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(json!({
        "length": g.length(),
        "height": g.height(),
        "vertex_count": g.vertex_count(),
        "roots": g.roots(),
        "branching_number": g.branching_number(),
        "vertices": vertices,
        "dot": dot.map(|p| p.display().to_string()),
        "fixed_point": fixed_point_value(ctx.sigma.domain(), ctx.power, &ctx.seed),
    }))
}

fn levels_value(levels: &[LevelReport], codomain: &Alphabet) -> Value {
    Value::Array(
        levels
            .iter()
            .map(|r| {
                json!({
                    "level": r.level,
                    "difference": r.difference.to_string(),
                    "singleton_count": r.singleton_count,
                    "new_essential_periods": r.new_essential_periods.iter().map(|e| json!({
                        "period": e.period.to_string(),
                        "residue": e.residue,
                        "letter": symbol(codomain, e.letter),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn classify(input: &AnalysisInput, max_level: u32) -> CmdResult {
    let ctx = graph_context(input)?;
    let phi = input.coding();
    let options = ClassifyOptions {
        max_level,
        budget: DEFAULT_RESIDUE_BUDGET,
    };
    let accepting: Vec<Value> = (0..ctx.graph.vertex_count())
        .filter(|&v| {
            let image: BTreeSet<Letter> = ctx.graph.vertex(v).iter().map(|&b| phi.code(b)).collect();
            image.len() == 1
        })
        .map(|v| vertex_value(&ctx, &phi, v))
        .collect();
    let details = match ctx.graph.classify_with(&phi, &options)? {
        AutoClassification::NoConstantAP => json!({ "classification": "NoConstantAP" }),
        AutoClassification::Periodic {
            level,
            difference,
            minimal_period,
        } => json!({
            "classification": "Periodic",
            "level": level,
            "difference": difference.to_string(),
            "minimal_period": minimal_period.to_string(),
        }),
        AutoClassification::UnboundedEssentialPeriods {
            cycle,
            path_to_singleton,
        } => json!({
            "classification": "UnboundedEssentialPeriods",
            "cycle": cycle.iter().map(|&v| vertex_value(&ctx, &phi, v)).collect::<Vec<_>>(),
            "path_to_singleton": path_to_singleton.iter().map(|&v| vertex_value(&ctx, &phi, v)).collect::<Vec<_>>(),
        }),
        AutoClassification::HasConstantAP { levels, truncated } => json!({
            "classification": "HasConstantAP",
            "levels": levels_value(&levels, phi.codomain()),
            "truncated": truncated,
        }),
    };
    let mut out = details;
    out["accepting_vertices"] = Value::Array(accepting);
    out["vertex_count"] = json!(ctx.graph.vertex_count());
    Ok(out)
}

fn periods(input: &AnalysisInput, max_level: u32) -> CmdResult {
    let ctx = graph_context(input)?;
    let phi = input.coding();
    let (levels, truncated) = match ctx.graph.level_reports_with(&phi, max_level, DEFAULT_RESIDUE_BUDGET) {
        Ok(levels) => (levels, false),
        Err(Error::Budget { partial, .. }) => (partial, true),
        Err(e) => return Err(e.into()),
    };
    let mut found: BTreeSet<u64> = BTreeSet::new();
    for r in &levels {
        found.extend(r.new_essential_periods.iter().map(|e| e.period));
    }
    Ok(json!({
        "levels": levels_value(&levels, phi.codomain()),
        "essential_periods": found.iter().map(u64::to_string).collect::<Vec<_>>(),
        "truncated": truncated,
        "budget": DEFAULT_RESIDUE_BUDGET,
    }))
}

fn oracle(input: &AnalysisInput, p: u64, length: Option<usize>) -> CmdResult {
    if p == 0 {
        return Err(CliError::Usage("--difference must be positive".into()));
    }
    let (power, sigma, seed) = fixed_point(input)?;
    let phi = input.coding();
    let window = match length {
        Some(l) => l,
        None => {
            let max_exp = factor_u64(p).into_values().max().unwrap_or(0);
            let exponent = max_exp * sigma.domain().len() as u32;
            default_window(p, sigma.max_len(), exponent, DEFAULT_MAX_WINDOW)
        }
    };
    let word = coded_prefix(&sigma, &seed, Some(&phi), window)?;
    let scan = prefix_ap_scan(&word, p)?;
    let codomain = phi.codomain();
    let residues: Vec<Value> = scan
        .iter()
        .map(|r| match r.status {
            Status::Constant(b) => json!({
                "residue": r.residue,
                "status": "constant",
                "letter": symbol(codomain, b),
                "positions_scanned": r.positions_scanned,
            }),
            Status::Violated(first, differs) => json!({
                "residue": r.residue,
                "status": "violated",
                "first_position": first,
                "differing_position": differs,
                "positions_scanned": r.positions_scanned,
            }),
        })
        .collect();
    let constant = scan.iter().filter(|r| r.is_constant()).count();
    Ok(json!({
        "difference": p,
        "window": window,
        "constant_residues": constant,
        "violated_residues": scan.len() - constant,
        "residues": residues,
        "fixed_point": fixed_point_value(sigma.domain(), power, &seed),
        "note": "finite-window evidence, not a proof",
    }))
}

fn intersect(input: &AnalysisInput, other: &AnalysisInput, n: usize) -> CmdResult {
    let (pa, sa, seed_a) = fixed_point(input)?;
    let (pb, sb, seed_b) = fixed_point(other)?;
    let common = factor_intersection((&sa, &seed_a), (&sb, &seed_b), n)?;
    Ok(json!({
        "length": n,
        "common_factors": common,
        "factors": sa.factors_of_length(&seed_a, n)?.len(),
        "other_factors": sb.factors_of_length(&seed_b, n)?.len(),
        "fixed_point": fixed_point_value(sa.domain(), pa, &seed_a),
        "other_fixed_point": fixed_point_value(sb.domain(), pb, &seed_b),
    }))
}

fn complexity(input: &AnalysisInput, max_n: usize) -> CmdResult {
    if max_n == 0 {
        return Err(CliError::Usage("--max-n must be positive".into()));
    }
    let (power, sigma, seed) = fixed_point(input)?;
    let profile = sigma.complexity_profile(Some(&seed), max_n)?;
    Ok(json!({
        "complexity": profile,
        "fixed_point": fixed_point_value(sigma.domain(), power, &seed),
    }))
}
