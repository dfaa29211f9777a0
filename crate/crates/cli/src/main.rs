//! Batch front-end: parses weight specs and queries, runs the library and
//! emits deterministic JSON/CSV/pretty output.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use widthlab::approx::{
    approx_number, approx_number_linf, characterization_bounds, limit_diagnostic, regime_bounds_iso,
    Exactness, Regime,
};
use widthlab::constants::ConstantsRegistry;
use widthlab::entropy::entropy_interval;
use widthlab::gevrey::mixed_vs_gevrey_compare;
use widthlab::lattice::{
    grid_count_hyperbolic_with_ceiling, grid_count_pball_with_ceiling,
};
use widthlab::tractability::{
    classify_gevrey, classify_iso, info_complexity_bounds_iso, info_complexity_exact, TractClass,
};
use widthlab::weights::{WeightKind, WeightSpec};
use widthlab::Error;

#[derive(Parser)]
#[command(name = "widthlab", version, about = "approximation numbers of weighted periodic embeddings")]
struct Cli {
    /// output format
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// relative tolerance for interval targets
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    /// counting ceiling as a power of two exponent
    #[arg(long, global = true, default_value_t = 128)]
    count_ceiling_log2: u32,
    /// calibration registry JSON file
    #[arg(long, global = true)]
    constants_file: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Pretty,
}

#[derive(Args)]
struct SpecArg {
    /// weight spec as JSON, e.g. '{"kind":"Isotropic","d":2,"s":1,"p":1}'
    #[arg(long)]
    spec: String,
}

#[derive(Subcommand)]
enum Command {
    /// count integer points in a ball or hyperbolic cross
    GridCount {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        d: u32,
    },
    /// exact approximation numbers
    Approx {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        n: Option<u64>,
        /// a:b:step inclusive range of n
        #[arg(long)]
        n_range: Option<String>,
        #[arg(long, default_value = "l2")]
        target: String,
    },
    /// entropy number bounds of l_p^d -> l_inf^d
    Entropy {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: String,
    },
    /// certified bounds on a_n
    Bounds {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "generalized")]
        theorem: String,
    },
    /// mixed vs Gevrey comparison table
    GevreyCompare {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n_max: u64,
    },
    /// tractability verdict
    Tract {
        #[arg(long)]
        problem: String,
        /// comma separated, e.g. s=1,p=inf
        #[arg(long)]
        params: String,
    },
    /// information complexity n(eps, d)
    InfoComplexity {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = false)]
        lemma: bool,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
    },
    /// limit diagnostic series
    Limits {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        n_max: u64,
    },
    /// fit registry constants from a sample file
    Calibrate {
        /// JSON file {tag: [[exact, shape], ...], ...}
        #[arg(long)]
        grid: String,
    },
}

/// One output field; integers travel as decimal strings.
enum Field {
    Str(String),
    Count(BigUint),
    Int(u64),
    Real(f64),
    Bool(bool),
}

fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

struct Row {
    fields: Vec<(&'static str, Field)>,
}

impl Row {
    fn new() -> Self {
        Row { fields: Vec::new() }
    }

    fn push(mut self, key: &'static str, value: Field) -> Self {
        self.fields.push((key, value));
        self
    }

    fn sorted(&self) -> Vec<&(&'static str, Field)> {
        let mut v: Vec<_> = self.fields.iter().collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (k, f)) in self.sorted().into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = match f {
                Field::Str(v) => write!(out, "\"{k}\":{}", serde_json::Value::from(v.as_str())),
                Field::Count(v) => write!(out, "\"{k}\":\"{v}\""),
                Field::Int(v) => write!(out, "\"{k}\":{v}"),
                Field::Real(v) => write!(out, "\"{k}\":{}", fmt_real(*v)),
                Field::Bool(v) => write!(out, "\"{k}\":{v}"),
            };
        }
        out.push('}');
        out
    }

    fn csv_cell(f: &Field) -> String {
        match f {
            Field::Str(v) => v.clone(),
            Field::Count(v) => v.to_string(),
            Field::Int(v) => v.to_string(),
            Field::Real(v) => format!("{v:.16e}"),
            Field::Bool(v) => v.to_string(),
        }
    }
}

fn emit(rows: &[Row], output: Output) {
    match output {
        Output::Json => {
            for row in rows {
                println!("{}", row.to_json());
            }
        }
        Output::Csv => {
            if let Some(first) = rows.first() {
                let header: Vec<&str> = first.fields.iter().map(|(k, _)| *k).collect();
                println!("{}", header.join(","));
                for row in rows {
                    let cells: Vec<String> =
                        row.fields.iter().map(|(_, f)| Row::csv_cell(f)).collect();
                    println!("{}", cells.join(","));
                }
            }
        }
        Output::Pretty => {
            for row in rows {
                for (k, f) in &row.fields {
                    println!("{k} = {}", Row::csv_cell(f));
                }
                println!();
            }
        }
    }
}

fn parse_p(text: &str) -> Result<f64, Error> {
    if text == "inf" || text == "infinity" {
        return Ok(f64::INFINITY);
    }
    text.parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad norm exponent: {text}")))
}

fn parse_spec(text: &str) -> Result<WeightSpec, Error> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec JSON: {e}")))?;
    WeightSpec::from_json(&v)
}

fn parse_params(text: &str) -> Result<Vec<(String, f64)>, Error> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {part}")))?;
        out.push((k.trim().to_string(), parse_p(v.trim())?));
    }
    Ok(out)
}

fn get_param(params: &[(String, f64)], key: &str) -> Result<f64, Error> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Parse(format!("missing parameter {key}")))
}

fn parse_range(text: &str) -> Result<(u64, u64, u64), Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse("range must be a:b:step".into()));
    }
    let a = parts[0].parse().map_err(|_| Error::Parse("bad range start".into()))?;
    let b = parts[1].parse().map_err(|_| Error::Parse("bad range end".into()))?;
    let step = parts[2].parse().map_err(|_| Error::Parse("bad range step".into()))?;
    if step == 0 || b < a {
        return Err(Error::InvalidParameter("need step >= 1 and b >= a".into()));
    }
    Ok((a, b, step))
}

fn spec_json(spec: &WeightSpec) -> String {
    spec.to_json().map(|v| v.to_string()).unwrap_or_else(|_| "null".into())
}

fn load_registry(path: Option<&str>) -> Result<ConstantsRegistry, Error> {
    match path {
        None => Ok(ConstantsRegistry::with_defaults()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Parse(format!("constants file {p}: {e}")))?;
            let v = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("constants file {p}: {e}")))?;
            ConstantsRegistry::from_json(&v)
        }
    }
}

fn class_name(class: &TractClass) -> String {
    match class {
        TractClass::Curse => "curse".into(),
        TractClass::IntractableNotCurse => "intractable-not-curse".into(),
        TractClass::WeaklyTractable => "weakly-tractable".into(),
        TractClass::QuasiPolynomiallyTractable => "quasi-polynomially-tractable".into(),
        TractClass::AlphaBetaWeaklyTractable(a, b) => format!("({a},{b})-weakly-tractable"),
        TractClass::PolynomiallyTractable => "polynomially-tractable".into(),
    }
}

fn run(cli: Cli) -> Result<Vec<Row>, Error> {
    if !(cli.tolerance > 0.0 && cli.tolerance <= 1e-3) {
        return Err(Error::InvalidParameter("tolerance must lie in (0, 1e-3]".into()));
    }
    if cli.count_ceiling_log2 < 20 {
        return Err(Error::InvalidParameter("ceiling must be at least 2^20".into()));
    }
    let ceiling = BigUint::from(1u32) << cli.count_ceiling_log2;
    let registry = load_registry(cli.constants_file.as_deref())?;
    match cli.command {
        Command::GridCount { shape, p, r, d } => {
            let count = match shape.as_str() {
                "pball" => grid_count_pball_with_ceiling(parse_p(&p)?, r, d, &ceiling)?,
                "hyperbolic" => grid_count_hyperbolic_with_ceiling(r, d, &ceiling)?,
                other => return Err(Error::Parse(format!("unknown shape {other}"))),
            };
            Ok(vec![Row::new()
                .push("count", Field::Count(count.value))
                .push("shape", Field::Str(shape))
                .push("r", Field::Real(r))
                .push("d", Field::Int(d as u64))])
        }
        Command::Approx { spec, n, n_range, target } => {
            let spec = parse_spec(&spec.spec)?;
            let ns: Vec<u64> = match (n, n_range) {
                (Some(n), None) => vec![n],
                (None, Some(r)) => {
                    let (a, b, step) = parse_range(&r)?;
                    (a..=b).step_by(step as usize).collect()
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "give exactly one of --n and --n-range".into(),
                    ))
                }
            };
            let mut rows = Vec::new();
            for n in ns {
                let (res, target_name) = match target.as_str() {
                    "l2" => (approx_number(&spec, n)?, "L2"),
                    "linf" => (approx_number_linf(&spec, n, cli.tolerance)?, "Linf"),
                    other => return Err(Error::Parse(format!("unknown target {other}"))),
                };
                let (exact, lo, hi) = match res.exactness {
                    Exactness::Exact => (true, res.value, res.value),
                    Exactness::Interval { lower, upper } => (false, lower, upper),
                };
                rows.push(
                    Row::new()
                        .push("n", Field::Int(n))
                        .push("value", Field::Real(res.value))
                        .push("lower", Field::Real(lo))
                        .push("upper", Field::Real(hi))
                        .push("exact", Field::Bool(exact))
                        .push("target", Field::Str(target_name.into()))
                        .push("spec", Field::Str(spec_json(&spec))),
                );
            }
            Ok(rows)
        }
        Command::Entropy { n, d, p } => {
            let est = entropy_interval(n, d, parse_p(&p)?)?;
            let mut row = Row::new()
                .push("n", Field::Int(n))
                .push("d", Field::Int(d as u64))
                .push("p", Field::Str(p))
                .push("lower", Field::Real(est.lower))
                .push("upper", Field::Real(est.upper))
                .push("lower_provenance", Field::Str(est.lower_provenance.into()))
                .push("upper_provenance", Field::Str(est.upper_provenance.into()));
            if let Some(e) = est.exact {
                row = row.push("exact_value", Field::Real(e));
            }
            Ok(vec![row])
        }
        Command::Bounds { spec, n, theorem } => {
            let spec = parse_spec(&spec.spec)?;
            let (regime, pair) = match theorem.as_str() {
                "base" | "generalized" => (None, characterization_bounds(&spec, n)?),
                "regime" => match &spec.kind {
                    WeightKind::Isotropic { s, p } => {
                        let (regime, pair) = regime_bounds_iso(*s, *p, spec.d, n, &registry)?;
                        (Some(regime), pair)
                    }
                    _ => {
                        return Err(Error::Unsupported(
                            "regime bounds cover isotropic specs".into(),
                        ))
                    }
                },
                other => return Err(Error::Parse(format!("unknown theorem {other}"))),
            };
            let mut row = Row::new()
                .push("n", Field::Int(n))
                .push("lower", Field::Real(pair.lower))
                .push("upper", Field::Real(pair.upper))
                .push("provenance", Field::Str(pair.provenance))
                .push("calibrated", Field::Bool(pair.calibrated))
                .push("spec", Field::Str(spec_json(&spec)));
            if let Some(regime) = regime {
                let name = match regime {
                    Regime::PreD => "pre-d",
                    Regime::Preasymptotic => "preasymptotic",
                    Regime::Asymptotic => "asymptotic",
                };
                row = row.push("regime", Field::Str(name.into()));
            }
            Ok(vec![row])
        }
        Command::GevreyCompare { s, d, n_max } => {
            let grid: Vec<u64> = (1..=n_max).collect();
            let rows = mixed_vs_gevrey_compare(s, d, &grid)?;
            Ok(rows
                .into_iter()
                .map(|r| {
                    Row::new()
                        .push("n", Field::Int(r.n))
                        .push("a_mixed", Field::Real(r.a_mixed))
                        .push("a_gevrey", Field::Real(r.a_gevrey))
                        .push("ksu15_lower", Field::Real(r.ksu15_lower.unwrap_or(f64::NAN)))
                        .push("ksu15_upper", Field::Real(r.ksu15_upper.unwrap_or(f64::NAN)))
                        .push("ratio", Field::Real(r.ratio))
                })
                .collect())
        }
        Command::Tract { problem, params } => {
            let params = parse_params(&params)?;
            let verdict = match problem.as_str() {
                "iso" => classify_iso(get_param(&params, "s")?, get_param(&params, "p")?)?,
                "gevrey" => classify_gevrey(
                    get_param(&params, "alpha")?,
                    get_param(&params, "beta")?,
                    get_param(&params, "p")?,
                )?,
                other => return Err(Error::Parse(format!("unknown problem {other}"))),
            };
            let mut row = Row::new()
                .push("problem", Field::Str(problem))
                .push("class", Field::Str(class_name(&verdict.class)))
                .push("witness", Field::Str(verdict.witness.into()));
            if let Some(t) = verdict.ab_weak_above {
                row = row.push("ab_weak_for_alpha_above", Field::Real(t));
            }
            Ok(vec![row])
        }
        Command::InfoComplexity { spec, eps, lemma, gamma } => {
            let spec = parse_spec(&spec.spec)?;
            if lemma {
                let (s, p) = match &spec.kind {
                    WeightKind::Isotropic { s, p } => (*s, *p),
                    _ => {
                        return Err(Error::Unsupported(
                            "lemma bounds cover isotropic specs".into(),
                        ))
                    }
                };
                let b = info_complexity_bounds_iso(s, p, eps, spec.d, &registry, gamma)?;
                Ok(vec![Row::new()
                    .push("eps", Field::Real(eps))
                    .push("log2_n_lower", Field::Real(b.log2_n.lower))
                    .push("log2_n_upper", Field::Real(b.log2_n.upper))
                    .push("branch", Field::Str(b.upper_branch.into()))
                    .push("lower_active", Field::Bool(b.lower_active))
                    .push("calibrated", Field::Bool(b.log2_n.calibrated))
                    .push("spec", Field::Str(spec_json(&spec)))])
            } else {
                let res = info_complexity_exact(&spec, eps)?;
                Ok(vec![Row::new()
                    .push("eps", Field::Real(eps))
                    .push("d", Field::Int(res.d as u64))
                    .push("n", Field::Count(res.value))
                    .push("method", Field::Str(res.method.into()))
                    .push("spec", Field::Str(spec_json(&spec)))])
            }
        }
        Command::Limits { spec, n_max } => {
            let spec = parse_spec(&spec.spec)?;
            let mut grid = Vec::new();
            let mut n = 10u64;
            while n < n_max {
                grid.push(n);
                n = n.saturating_mul(10);
            }
            grid.push(n_max);
            let rep = limit_diagnostic(&spec, &grid)?;
            let mut rows: Vec<Row> = rep
                .points
                .iter()
                .map(|pt| {
                    Row::new()
                        .push("n", Field::Int(pt.n))
                        .push("normalized", Field::Real(pt.normalized))
                        .push("target", Field::Real(pt.target))
                })
                .collect();
            rows.push(
                Row::new()
                    .push("converging", Field::Bool(rep.converging))
                    .push("hypotheses_met", Field::Bool(rep.hypotheses_met)),
            );
            Ok(rows)
        }
        Command::Calibrate { grid } => {
            let text = std::fs::read_to_string(&grid)
                .map_err(|e| Error::Parse(format!("grid file {grid}: {e}")))?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("grid file: {e}")))?;
            let obj = v
                .as_object()
                .ok_or_else(|| Error::Parse("grid file must be a JSON object".into()))?;
            let mut registry = registry;
            let mut rows = Vec::new();
            for (tag, samples) in obj {
                let samples: Vec<(f64, f64)> = samples
                    .as_array()
                    .ok_or_else(|| Error::Parse(format!("samples for {tag} must be an array")))?
                    .iter()
                    .map(|pair| {
                        let a = pair.get(0).and_then(serde_json::Value::as_f64);
                        let b = pair.get(1).and_then(serde_json::Value::as_f64);
                        match (a, b) {
                            (Some(a), Some(b)) => Ok((a, b)),
                            _ => Err(Error::Parse(format!("bad sample pair for {tag}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?;
                let fitted = registry.calibrate(tag, &samples)?;
                rows.push(
                    Row::new()
                        .push("tag", Field::Str(tag.clone()))
                        .push("c_low", Field::Real(fitted.c_low))
                        .push("c_high", Field::Real(fitted.c_high))
                        .push("samples", Field::Int(samples.len() as u64)),
                );
            }
            Ok(rows)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .parse_filters(&std::env::var("WIDTHLAB_LOG").unwrap_or_else(|_| "error".into()))
        .init();
    let cli = Cli::parse();
    let output = cli.output;
    match run(cli) {
        Ok(rows) => {
            emit(&rows, output);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CountCeiling { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
