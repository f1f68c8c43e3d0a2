//! Command-line front end: geometry ingestion (built-in names or a JSON
//! configuration file), command dispatch, and deterministic machine-readable
//! output. All rationals are rendered as `p` or `p/q` strings, never floats.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 unsupported regime (e.g. a non-Fano ambient for the S-function).

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use quasimap_core::acceptance;
use quasimap_core::chow::{
    factorial, paper_basis, render_class, render_rat, ChowRing, PairedBasis,
};
use quasimap_core::givental::{j0_coefficient, pt_psi_invariant, s_function};
use quasimap_core::lefschetz::{
    comb_vanishing_report, lefschetz_series, p0_series, relative_ladder,
    relative_point_invariant, wallcross_check, ProfileKind,
};
use quasimap_core::recursion::{
    evaluate, reduce, Evaluation, Expression, Insertion, InvariantLeaf, LeafKind, Marking,
    RecursionContext, TieBreak,
};
use quasimap_core::series::{extract_invariants, ZElement};
use quasimap_core::toric::{validate_fan, CurveClass, DivisorClass, Fan, GeometryFlags};
use quasimap_core::{builtin_geometry, EngineError, Geometry, BUILTIN_GEOMETRIES};

#[derive(Parser)]
#[command(name = "quasimap", version, about = "Exact quasimap invariants of toric hypersurface pairs")]
struct Cli {
    #[command(flatten)]
    source: GeometrySource,

    /// Truncation cap (ample degree) for series commands.
    #[arg(long, global = true, default_value_t = 3)]
    cap: i64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GeometrySource {
    /// Built-in geometry name (p2-line, p3-quadric, p3-cubic, p3-quartic, quintic).
    #[arg(long, global = true)]
    geometry: Option<String>,

    /// JSON configuration file describing the fan, Y, ample class and flags.
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the fan and report its numerology.
    Validate,
    /// Print the monomial basis, the Poincare pairing matrix, and the paired
    /// homogeneous basis.
    Cohomology,
    /// Two-pointed descendant invariants per effective class up to the cap.
    Invariants {
        #[arg(long, value_enum, default_value_t = Target::X)]
        target: Target,
    },
    /// The correction series P0 and the restricted series of Y.
    Lefschetz,
    /// The relative ladder and point invariant for one class.
    Relative {
        /// Curve class as comma-separated pairings (D_rho . beta).
        #[arg(long)]
        beta: String,
    },
    /// Per-class wall-crossing comparison up to the cap.
    Wallcross,
    /// Symbolically reduce a relative invariant to absolute ones.
    Expand {
        /// Tangency orders at the markings, comma separated.
        #[arg(long)]
        alpha: String,
        /// Insertions per marking: 1, Y, pt, or eta<i>.
        #[arg(long)]
        insertions: String,
        /// Curve class as comma-separated pairings.
        #[arg(long)]
        beta: String,
        #[arg(long, value_enum, default_value_t = TieBreakArg::Smallest)]
        tie_break: TieBreakArg,
        /// Total number of dual-basis tokens (defaults to restricted + 1).
        #[arg(long)]
        token_arity: Option<usize>,
    },
    /// Run the acceptance suite (or a per-geometry slice when --geometry is
    /// given); exits non-zero on any failure.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    X,
    Y,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Smallest,
    Largest,
}

#[derive(Deserialize)]
struct ConfigFile {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    #[serde(rename = "Y")]
    y: Vec<i64>,
    ample: Vec<i64>,
    #[serde(default)]
    flags: ConfigFlags,
    #[serde(default)]
    cap: Option<i64>,
}

#[derive(Deserialize, Default)]
struct ConfigFlags {
    #[serde(default)]
    very_ample_y: bool,
    #[serde(default)]
    contains_all_curve_classes: bool,
}

enum Failure {
    Verification(String),
    Input(String),
    Regime(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::NotFano { .. } | EngineError::NotSemipositive(_) => {
                Failure::Regime(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("configuration parse error: {e}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("invalid input: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Regime(msg)) => {
            eprintln!("unsupported regime: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_geometry(source: &GeometrySource) -> Result<(Geometry, Option<i64>), Failure> {
    match (&source.geometry, &source.config) {
        (Some(name), None) => Ok((builtin_geometry(name)?, None)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let config: ConfigFile = serde_json::from_str(&text)?;
            let fan = Fan {
                dim: config.rays.first().map(|r| r.len()).unwrap_or(0),
                rays: config.rays,
                max_cones: config.max_cones,
            };
            let geom = Geometry::new(
                fan,
                DivisorClass { coeffs: config.y },
                DivisorClass {
                    coeffs: config.ample,
                },
                GeometryFlags {
                    very_ample_y: config.flags.very_ample_y,
                    contains_all_curve_classes: config.flags.contains_all_curve_classes,
                },
            )?;
            Ok((geom, config.cap))
        }
        (Some(_), Some(_)) => Err(Failure::Input(
            "pass either --geometry or --config, not both".into(),
        )),
        (None, None) => Err(Failure::Input(format!(
            "no geometry given; pass --geometry <{}> or --config <file>",
            BUILTIN_GEOMETRIES.join("|")
        ))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    // `verify` without a geometry runs the whole suite.
    if matches!(cli.command, Command::Verify)
        && cli.source.geometry.is_none()
        && cli.source.config.is_none()
    {
        return verify_all();
    }
    let (geom, config_cap) = load_geometry(&cli.source)?;
    let cap = config_cap.unwrap_or(cli.cap);
    match cli.command {
        Command::Validate => validate_cmd(&geom),
        Command::Cohomology => cohomology_cmd(&geom),
        Command::Invariants { target } => invariants_cmd(&geom, cap, target),
        Command::Lefschetz => lefschetz_cmd(&geom, cap),
        Command::Relative { beta } => relative_cmd(&geom, &beta),
        Command::Wallcross => wallcross_cmd(&geom, cap),
        Command::Expand {
            alpha,
            insertions,
            beta,
            tie_break,
            token_arity,
        } => expand_cmd(&geom, &alpha, &insertions, &beta, tie_break, token_arity),
        Command::Verify => verify_geometry(&geom, cap),
    }
}

fn emit(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn parse_int_list(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Failure::Input(format!("bad integer '{t}': {e}")))
        })
        .collect()
}

fn parse_beta(geom: &Geometry, text: &str) -> Result<CurveClass, Failure> {
    let beta = CurveClass {
        pairings: parse_int_list(text)?,
    };
    geom.check_curve_class(&beta)?;
    if !beta.is_zero() && !geom.is_effective(&beta) {
        return Err(Failure::Input(format!(
            "{:?} is not an effective class",
            beta.pairings
        )));
    }
    Ok(beta)
}

fn beta_key(beta: &CurveClass) -> String {
    beta.pairings
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn zelt_json(z: &ZElement) -> Value {
    let coeffs: Vec<Value> = z
        .coeffs
        .iter()
        .map(|(exp, class)| json!({ "z": exp, "class": render_class(class) }))
        .collect();
    Value::Array(coeffs)
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

fn validate_cmd(geom: &Geometry) -> Result<(), Failure> {
    let report = validate_fan(&geom.fan)?;
    let walls: Vec<String> = geom.wall_classes().iter().map(beta_key).collect();
    emit(&json!({
        "dim": report.dim,
        "rays": report.num_rays,
        "max_cones": report.num_max_cones,
        "picard_rank": report.picard_rank,
        "walls": walls,
        "fano": geom.is_fano(),
        "minus_ky_nef": geom.ky_nef(),
        "smooth": true,
        "status": "PASS",
    }));
    Ok(())
}

fn cohomology_cmd(geom: &Geometry) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let basis = ring.monomial_basis();
    let elements: Vec<_> = basis.iter().map(|m| ring.basis_element(m)).collect();
    let mut matrix = Vec::new();
    for a in &elements {
        let row: Vec<String> = elements
            .iter()
            .map(|b| render_rat(&ring.pairing(a, b).unwrap()))
            .collect();
        matrix.push(Value::from(row));
    }
    let paired = paper_basis(&ring, geom)?;
    emit(&json!({
        "basis": elements.iter().map(render_class).collect::<Vec<_>>(),
        "pairing_matrix": matrix,
        "paired_basis": {
            "upper": paired.upper.iter().map(render_class).collect::<Vec<_>>(),
            "lower": paired.lower.iter().map(render_class).collect::<Vec<_>>(),
        },
        "point_class": render_class(&ring.point_class()),
    }));
    Ok(())
}

fn invariants_cmd(geom: &Geometry, cap: i64, target: Target) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let paired = paper_basis(&ring, geom)?;
    let mut per_class = BTreeMap::new();
    let restricted = match target {
        Target::X => None,
        Target::Y => Some(lefschetz_series(geom, &ring, cap)?),
    };
    for beta in effective_up_to(geom, cap)? {
        let series = match &restricted {
            None => s_function(geom, &ring, &beta)?,
            Some(s) => s.0.coeff(&beta),
        };
        let table = extract_invariants(&ring, &series, &paired.lower)?;
        let rows: Vec<Value> = table
            .iter()
            .map(|((i, k), v)| {
                json!({
                    "class_index": i,
                    "psi_power": k,
                    "value": render_rat(v),
                })
            })
            .collect();
        per_class.insert(beta_key(&beta), Value::Array(rows));
    }
    emit(&json!({
        "target": match target { Target::X => "X", Target::Y => "Y" },
        "cap": cap,
        "basis": paired.lower.iter().map(render_class).collect::<Vec<_>>(),
        "invariants": per_class,
    }));
    Ok(())
}

fn effective_up_to(geom: &Geometry, cap: i64) -> Result<Vec<CurveClass>, Failure> {
    if cap <= 0 {
        return Ok(Vec::new());
    }
    match geom.enumerate_effective(cap) {
        Ok(list) => Ok(list),
        Err(EngineError::CapTooSmall { .. }) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

fn lefschetz_cmd(geom: &Geometry, cap: i64) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let p0 = p0_series(geom, &ring, cap)?;
    let series = lefschetz_series(geom, &ring, cap)?;
    let p0_json: BTreeMap<String, String> = p0
        .terms
        .iter()
        .map(|(b, c)| (beta_key(b), render_rat(c)))
        .collect();
    let series_json: BTreeMap<String, Value> = series
        .0
        .terms
        .iter()
        .map(|(b, z)| (beta_key(b), zelt_json(z)))
        .collect();
    emit(&json!({
        "cap": cap,
        "p0": p0_json,
        "restricted_series": series_json,
    }));
    Ok(())
}

fn relative_cmd(geom: &Geometry, beta_text: &str) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let beta = parse_beta(geom, beta_text)?;
    let e = geom.y_degree(&beta);
    if e < 1 {
        return Err(Failure::Input(
            "relative data needs Y.beta >= 1 (classes with Y.beta = 0 are excluded)".into(),
        ));
    }
    let rungs = relative_ladder(geom, &ring, &beta, e)?;
    let point = relative_point_invariant(geom, &ring, &beta)?;
    let reports: Vec<Value> = (0..e)
        .map(|m| {
            let r = comb_vanishing_report(geom, &ring, &beta, m)?;
            Ok(json!({
                "tangency": m,
                "surviving_only_at_top": r.surviving_only_at_top,
                "profiles": r.entries.iter().map(|p| json!({
                    "kind": match &p.kind {
                        ProfileKind::RelativeTerm => "relative-term".to_string(),
                        ProfileKind::ZeroTeeth => "zero-teeth".to_string(),
                        ProfileKind::OneTooth { beta1, multiplicity, .. } =>
                            format!("one-tooth beta1={} m={}", beta_key(beta1), multiplicity),
                    },
                    "virtual_dim": p.virtual_dim,
                    "obstruction": p.obstruction,
                    "surviving": p.surviving,
                })).collect::<Vec<_>>(),
            }))
        })
        .collect::<Result<_, Failure>>()?;
    emit(&json!({
        "beta": beta_key(&beta),
        "y_degree": e,
        "ladder": rungs.iter().map(zelt_json).collect::<Vec<_>>(),
        "relative_point_invariant": render_rat(&point),
        "correction_audit": reports,
    }));
    Ok(())
}

fn wallcross_cmd(geom: &Geometry, cap: i64) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let mut rows = Vec::new();
    let mut all_equal = true;
    for beta in effective_up_to(geom, cap)? {
        if geom.y_degree(&beta) < 1 {
            continue;
        }
        let outcome = wallcross_check(geom, &ring, &beta)?;
        all_equal &= outcome.equal;
        rows.push(json!({
            "beta": beta_key(&beta),
            "lhs": zelt_json(&outcome.lhs),
            "rhs": zelt_json(&outcome.rhs),
            "equal": outcome.equal,
        }));
    }
    emit(&json!({
        "cap": cap,
        "classes": rows,
        "status": if all_equal { "PASS" } else { "FAIL" },
    }));
    if all_equal {
        Ok(())
    } else {
        Err(Failure::Verification("wall-crossing mismatch".into()))
    }
}

fn parse_insertion(
    ring: &ChowRing,
    geom: &Geometry,
    paired: &PairedBasis,
    text: &str,
) -> Result<Insertion, Failure> {
    let t = text.trim();
    let class = if t == "1" {
        ring.one()
    } else if t.eq_ignore_ascii_case("y") {
        ring.divisor_element(&geom.y.coeffs)
    } else if t.eq_ignore_ascii_case("pt") {
        ring.point_class()
    } else if let Some(idx) = t.strip_prefix("eta") {
        let i: usize = idx
            .parse()
            .map_err(|_| Failure::Input(format!("bad insertion '{t}'")))?;
        paired
            .lower
            .get(i)
            .cloned()
            .ok_or_else(|| Failure::Input(format!("eta{i} out of range")))?
    } else {
        return Err(Failure::Input(format!(
            "unknown insertion '{t}' (use 1, Y, pt, or eta<i>)"
        )));
    };
    Ok(Insertion::Class(class))
}

fn leaf_json(leaf: &InvariantLeaf) -> Value {
    json!({
        "kind": match leaf.kind {
            LeafKind::AbsX => "absolute-ambient",
            LeafKind::AbsY => "absolute-hypersurface",
            LeafKind::Rel => "relative",
        },
        "beta": beta_key(&leaf.beta),
        "markings": leaf.markings.iter().enumerate().map(|(i, m)| json!({
            "insertion": match &m.insertion {
                Insertion::Class(c) => render_class(c),
                Insertion::Upper { index, factor } =>
                    format!("({})*rho^{}", render_class(factor), index),
                Insertion::Lower { index, factor } =>
                    format!("({})*rho_{}", render_class(factor), index),
            },
            "psi": m.psi,
            "tangency": if leaf.kind == LeafKind::Rel { leaf.tangency[i] } else { 0 },
        })).collect::<Vec<_>>(),
    })
}

fn expression_json(expr: &Expression) -> Value {
    Value::Array(
        expr.terms
            .iter()
            .map(|(c, leaves)| {
                json!({
                    "coefficient": render_rat(c),
                    "factors": leaves.iter().map(leaf_json).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn expand_cmd(
    geom: &Geometry,
    alpha_text: &str,
    insertions_text: &str,
    beta_text: &str,
    tie_break: TieBreakArg,
    token_arity: Option<usize>,
) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let paired = paper_basis(&ring, geom)?;
    let beta = parse_beta(geom, beta_text)?;
    let alpha: Vec<u32> = parse_int_list(alpha_text)?
        .into_iter()
        .map(|a| u32::try_from(a).map_err(|_| Failure::Input("negative tangency".into())))
        .collect::<Result<_, _>>()?;
    let insertions: Vec<Insertion> = insertions_text
        .split(',')
        .map(|t| parse_insertion(&ring, geom, &paired, t))
        .collect::<Result<_, _>>()?;
    if insertions.len() != alpha.len() {
        return Err(Failure::Input(
            "alpha and insertions must have the same length".into(),
        ));
    }
    let markings = insertions
        .into_iter()
        .map(|insertion| Marking { insertion, psi: 0 })
        .collect();
    let leaf = InvariantLeaf::relative(geom, beta, markings, alpha)?;
    let mut ctx = RecursionContext::new(geom, &ring, &paired);
    if let Some(l) = token_arity {
        if l < ctx.restricted_tokens() {
            return Err(Failure::Input(format!(
                "token arity must be at least the restricted count {}",
                ctx.restricted_tokens()
            )));
        }
        ctx = ctx.with_token_arity(l);
    }
    let tie = match tie_break {
        TieBreakArg::Smallest => TieBreak::SmallestIndex,
        TieBreakArg::Largest => TieBreak::LargestIndex,
    };
    let (expr, trace) = reduce(&ctx, &leaf, tie)?;
    let value = match evaluate(&ctx, &expr)? {
        Evaluation::Value(v) => json!({ "value": render_rat(&v) }),
        Evaluation::Unevaluable(l) => json!({ "unevaluable_leaf": l.to_string() }),
    };
    emit(&json!({
        "input": leaf_json(&leaf),
        "trace": trace.steps.iter().map(|s| json!({
            "expanded_measure": s.expanded,
            "marking": s.marking,
            "emitted_measures": s.emitted,
        })).collect::<Vec<_>>(),
        "strictly_decreasing": trace.strictly_decreasing(),
        "expression": expression_json(&expr),
        "pretty": expr.to_string(),
        "evaluation": value,
    }));
    Ok(())
}

fn verify_all() -> Result<(), Failure> {
    let reports = acceptance::run_all();
    let mut all = true;
    for r in &reports {
        println!("{r}");
        for d in &r.details {
            println!("  {d}");
        }
        all &= r.passed;
    }
    println!("{}", if all { "PASS" } else { "FAIL" });
    if all {
        Ok(())
    } else {
        Err(Failure::Verification("acceptance suite failed".into()))
    }
}

/// Geometry-focused verification: the correction series, the cross-oracle,
/// the telescoping identity, and wall-crossing, all at the given cap.
fn verify_geometry(geom: &Geometry, cap: i64) -> Result<(), Failure> {
    let ring = ChowRing::build(geom)?;
    let mut ok = true;

    let p0 = p0_series(geom, &ring, cap)?;
    let coeffs: Vec<String> = p0
        .terms
        .iter()
        .filter(|(b, _)| !b.is_zero())
        .map(|(b, c)| format!("q^[{}] {}", beta_key(b), render_rat(c)))
        .collect();
    println!("P0 coefficients: {{{}}}", coeffs.join(", "));

    let y = ring.divisor_element(&geom.y.coeffs);
    for beta in effective_up_to(geom, cap)? {
        let e = geom.y_degree(&beta);
        if e >= 1 {
            let lhs = pt_psi_invariant(geom, &ring, &beta)? * factorial(e as u64);
            let rhs = j0_coefficient(geom, &beta)?;
            if lhs != rhs {
                ok = false;
                println!("cross-oracle mismatch at beta = {}", beta_key(&beta));
            }
            if !wallcross_check(geom, &ring, &beta)?.equal {
                ok = false;
                println!("wall-crossing mismatch at beta = {}", beta_key(&beta));
            }
        }
        let mut lhs = s_function(geom, &ring, &beta)?;
        for j in 0..=e {
            lhs = lhs.mul(&ZElement::linear(&ring, &y, j), &ring)?;
        }
        let top = relative_ladder(geom, &ring, &beta, e)?.pop().unwrap();
        let rhs = top.mul(&ZElement::linear(&ring, &y, e), &ring)?;
        if lhs != rhs {
            ok = false;
            println!("telescoping mismatch at beta = {}", beta_key(&beta));
        }
        for m in 0..e {
            let report = comb_vanishing_report(geom, &ring, &beta, m)?;
            if !report.surviving_only_at_top || report.entries.iter().any(|p| p.surviving) {
                ok = false;
                println!(
                    "surviving correction profile below top tangency at beta = {}",
                    beta_key(&beta)
                );
            }
        }
    }
    println!("{}", if ok { "PASS" } else { "FAIL" });
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification("geometry verification failed".into()))
    }
}
