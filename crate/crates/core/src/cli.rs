//! Command-line front end: argument parsing, dispatch and JSON/CSV output.

use crate::circle::{classify_arc, moment_report, moment_report_grid, uniformity_scan, weyl_sum};
use crate::counting::{
    lambda_corners, lambda_model, lambda_poly, lambda_prime, lambda_star, lambda_w, poly_k, OperatorResult,
};
use crate::error::{Error, Result};
use crate::experiments::{
    compare_study, count_corners, fraction_comparison_report, generate_set, phase_line, random_sign_line,
    sarkozy_check_line, smoothed_weight, varnavides_subsample, SetKind, Shape,
};
use crate::fourier::dft_positive;
use crate::grid::{Direction, GridFn, LineFn, PhaseFn, C64};
use crate::inverse::{u1_witness_line, u1xu1_witness, u2_witness_line, u2xu1_witness, Payload, Witness, WitnessKind};
use crate::io::{read_input, set_to_json, Input};
use crate::norms::{
    box_norm, box_norm_fft, check_box_properties, dual_difference_check, line_box_norm, unnormalized_box_norm,
    unnormalized_line_norm, van_der_corput_check, BoxSpec, DualForm, Property, DEFAULT_BUDGET,
};
use crate::poly::{build_w_trick, IntPolynomial, RealPolynomial};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::{self, Write};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cornerlab", version, about = "Polynomial corners toolkit")]
pub struct Cli {
    /// Worker threads for internal parallel loops.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Work budget in multiply-adds; CORNERLAB_BUDGET is used when absent.
    #[arg(long, global = true)]
    pub budget: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weyl sum S(xi) = sum_{z in [K]} e(xi Q(z)), or its maximum over a grid.
    Weyl(WeylArgs),
    /// Largest Fourier coefficient of nu* over residue classes mod V.
    Uniformity(UniformityArgs),
    /// Major/minor arc split of the even moments of S.
    Moments(MomentsArgs),
    /// Prints the W-trick context of P.
    Wtrick(WtrickArgs),
    /// Counting operators.
    Count(CountArgs),
    /// Box norms and their properties.
    Norm(NormArgs),
    /// Inverse-theorem witnesses.
    Inverse(InverseArgs),
    /// Generates a point set.
    Generate(GenerateArgs),
    /// Experiment harnesses with tabular output.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["xi", "scan_grid"])))]
pub struct WeylArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: usize,
    #[arg(long, conflicts_with = "scan_grid", allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub scan_grid: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ContextArgs {
    #[arg(long = "P", allow_hyphen_values = true)]
    #[serde(rename = "P")]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: i64,
    #[arg(long)]
    pub w: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct UniformityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ctx: ContextArgs,
    #[arg(long = "V", default_value_t = 1)]
    #[serde(rename = "V")]
    pub v: u64,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub grid_mult: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: usize,
    /// Degree used for the arcs; defaults to the degree of the polynomial.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct WtrickArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ctx: ContextArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountOp {
    Corners,
    Poly,
    Model,
    Wtrick,
    Star,
    Prime,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[arg(long, value_enum)]
    pub op: CountOp,
    /// A grid or set2d file, or "ones".
    #[arg(long, default_value = "ones")]
    pub f0: String,
    #[arg(long, default_value = "ones")]
    pub f1: String,
    #[arg(long, default_value = "ones")]
    pub f2: String,
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<i64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long = "V")]
    #[serde(rename = "V")]
    pub v: Option<i64>,
    #[arg(long)]
    pub r: Option<i64>,
    /// Constant phase a(y) = alpha for the prime operator.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub box_spec: String,
    #[arg(long)]
    pub unnormalized: bool,
    #[arg(long, conflicts_with = "unnormalized")]
    pub check: Option<String>,
    /// Use the FFT path (needs one e1 and one e2 factor).
    #[arg(long, conflicts_with_all = ["unnormalized", "check"])]
    pub fft: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct InverseArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub h: Option<i64>,
    #[arg(long, default_value = "e1,e2")]
    pub dirs: String,
    /// Scale N' of the U^1 witness; defaults to 4N.
    #[arg(long = "N-prime")]
    #[serde(rename = "N_prime")]
    pub n_prime: Option<i64>,
    /// Frequency grid of the U^2 witness; defaults to 4 len.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Random,
    DiagonalFree,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCmd {
    /// Lambda^W against Lambda^Model on random sets.
    Compare(CompareArgs),
    /// Corner counts and Varnavides subsampling.
    Supersaturation(SuperArgs),
    /// Van der Corput inequality on seeded instances.
    Vdc(VdcArgs),
    /// Dual-difference interchange on seeded dual forms.
    Ddi(DdiArgs),
    /// Two-point polynomial correlations against linear progressions.
    Sarkozy(SarkozyArgs),
    /// Smoothed cut-off weights.
    Smoothweight(SmoothArgs),
    /// Fraction comparison for V-tricked compositions.
    Fraction(FractionArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ctx: ContextArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value = "0.5", value_delimiter = ',')]
    pub densities: Vec<f64>,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SuperKind {
    Random,
    DiagonalFree,
    File,
}

#[derive(Debug, Args, Serialize)]
pub struct SuperArgs {
    #[arg(long, value_enum, default_value_t = SuperKind::Random)]
    pub kind: SuperKind,
    #[arg(long, default_value_t = 96)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "M", default_value_t = 4)]
    #[serde(rename = "M")]
    pub m: usize,
    /// Side lengths P(z) instead of z.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct VdcArgs {
    #[arg(long = "N", default_value_t = 512)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long = "H", default_value_t = 10)]
    #[serde(rename = "H")]
    pub h: i64,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    /// Probability of +1 in the random signs.
    #[arg(long, default_value_t = 0.75)]
    pub bias: f64,
    #[arg(long, default_value_t = 500)]
    pub count: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DdiArgs {
    #[arg(long = "N", default_value_t = 24)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long = "box", default_value = "e1:3;e2:3")]
    #[serde(rename = "box")]
    pub box_spec: String,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value = "z^2", allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 50)]
    pub count: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SarkozyArgs {
    #[arg(long = "N", default_value_t = 256)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value = "z^2", allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, default_value_t = 8)]
    pub q_max: i64,
    /// f0 = f1 = e(x / period) on [N]; random signs when absent.
    #[arg(long)]
    pub period: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SmoothArgs {
    #[arg(long = "N", default_value_t = 4096)]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value = "0.01,0.02,0.04", value_delimiter = ',')]
    pub epsilons: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FractionArgs {
    #[arg(long = "R", allow_hyphen_values = true)]
    #[serde(rename = "R")]
    pub r_poly: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub ctx: ContextArgs,
    #[arg(long = "V")]
    #[serde(rename = "V")]
    pub v: i64,
    #[arg(long, default_value_t = 0)]
    pub r: i64,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

/// %.17g-style float formatting.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if neg { "-" } else { "" };
    if !(-5..17).contains(&exp) {
        let d = digits.trim_end_matches('0');
        let m = if d.len() > 1 { format!("{}.{}", &d[..1], &d[1..]) } else { d.to_string() };
        let es = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{m}e{es}{:02}", exp.abs());
    }
    let s = if exp >= 0 {
        let p = exp as usize + 1;
        let (int, frac) = digits.split_at(p.min(digits.len()));
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        let frac = format!("{}{}", "0".repeat((-exp - 1) as usize), digits);
        format!("0.{}", frac.trim_end_matches('0'))
    };
    format!("{sign}{s}")
}

struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serialises with 17 significant digits per float.
pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17);
    value.serialize(&mut ser).expect("serializable");
    String::from_utf8(buf).expect("utf8")
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => to_json_line(other),
    }
}

fn params_of<T: Serialize>(command: &str, args: &T) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    if let Value::Object(o) = serde_json::to_value(args).expect("serializable") {
        m.extend(o);
    }
    Value::Object(m)
}

fn record(params: Value, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("params".into(), params);
    if let Value::Object(o) = body {
        m.extend(o);
    } else {
        m.insert("result".into(), body);
    }
    Value::Object(m)
}

fn value_of<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn write_table(out: &OutArgs, params: Value, rows: &[Value], stdout: &mut dyn Write) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    match out.format {
        Format::Jsonl => {
            writeln!(buf, "{}", to_json_line(&json!({ "params": params })))?;
            for r in rows {
                writeln!(buf, "{}", to_json_line(r))?;
            }
        }
        Format::Csv => {
            writeln!(buf, "# {}", to_json_line(&params))?;
            let mut w = csv::Writer::from_writer(&mut buf);
            if let Some(Value::Object(first)) = rows.first() {
                w.write_record(first.keys()).map_err(|e| Error::Io(e.to_string()))?;
            }
            for r in rows {
                if let Value::Object(o) = r {
                    w.write_record(o.values().map(cell)).map_err(|e| Error::Io(e.to_string()))?;
                }
            }
            w.flush()?;
        }
    }
    match &out.out {
        Some(path) => {
            std::fs::write(path, &buf)?;
            let summary = json!({ "params": params, "rows": rows.len(), "out": path.display().to_string() });
            writeln!(stdout, "{}", to_json_line(&summary))?;
        }
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn parse_poly(text: &str) -> Result<IntPolynomial> {
    IntPolynomial::parse(text)
}

fn load_fn(spec: &str, n: usize) -> Result<GridFn> {
    if spec == "ones" {
        Ok(GridFn::ones(n))
    } else {
        read_input(std::path::Path::new(spec))?.into_grid()
    }
}

fn operator_json(r: &OperatorResult) -> Value {
    json!({
        "value_re": r.value.re,
        "value_im": r.value.im,
        "normalization": r.normalization,
        "count_equivalent": r.count_equivalent,
        "path_agreement_error": r.path_agreement_error,
    })
}

fn line_json(l: &LineFn) -> Value {
    json!({
        "offset": l.offset(),
        "values": l.values().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
    })
}

fn witness_json(w: &Witness) -> Value {
    let payload = match &w.payload {
        Payload::Constant(c) => json!({ "re": c.re, "im": c.im }),
        Payload::Phase { a, b } => json!({ "a": a, "b": b }),
        Payload::Product { b1, b2 } => json!({ "b1": line_json(b1), "b2": line_json(b2) }),
        Payload::Modulated { g, a, b, z0 } => json!({
            "g": line_json(g),
            "a": a.phases(),
            "b": b.phases(),
            "z0": z0,
        }),
    };
    json!({
        "kind": value_of(&w.kind),
        "phases": payload,
        "correlation": w.correlation,
        "norm_pow": w.norm_pow,
        "hypothesis": w.hypothesis,
        "bound": w.bound,
        "direction_ok": w.direction_ok,
        "realized_constant": w.realized_constant,
    })
}

/// Splits "e1,(1,2),e2" at commas outside parentheses.
fn split_dirs(s: &str) -> Result<Vec<Direction>> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(Direction::parse(&cur)?);
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(Direction::parse(&cur)?);
    }
    Ok(out)
}

fn budget_of(cli: &Cli) -> Result<f64> {
    if let Some(b) = cli.budget {
        return Ok(b);
    }
    match std::env::var("CORNERLAB_BUDGET") {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("CORNERLAB_BUDGET '{v}' is not a number"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let budget = budget_of(cli)?;
    let single = |params: Value, body: Value, out: &mut dyn Write| -> Result<()> {
        writeln!(out, "{}", to_json_line(&record(params, body)))?;
        Ok(())
    };
    match &cli.command {
        Command::Weyl(a) => {
            let q = parse_poly(&a.poly)?;
            let params = params_of("weyl", a);
            let body = if let Some(xi) = a.xi {
                let s = weyl_sum(&q, a.k, xi)?;
                json!({ "re": s.re, "im": s.im })
            } else {
                let m = a.scan_grid.expect("clap enforces the group");
                if m == 0 {
                    return Err(Error::Argument("scan grid must be positive".into()));
                }
                let mut hist = vec![C64::new(0.0, 0.0); m];
                for t in q.values_on(a.k)? {
                    hist[t.rem_euclid(m as i64) as usize] += 1.0;
                }
                let spec = dft_positive(&hist, m);
                let (k, v) = spec
                    .iter()
                    .enumerate()
                    .skip(1)
                    .fold((0, 0.0), |b, (k, v)| if v.norm() > b.1 { (k, v.norm()) } else { b });
                json!({ "max_abs": v, "argmax_xi": k as f64 / m as f64, "argmax_k": k })
            };
            single(params, body, stdout)
        }
        Command::Uniformity(a) => {
            let ctx = build_w_trick(&parse_poly(&a.ctx.p)?, a.ctx.rho, a.ctx.w)?;
            let rep = uniformity_scan(&ctx, a.n, a.v, a.grid_mult)?;
            let mut body = value_of(&rep);
            body["ratio"] = json!(rep.max_abs / rep.trivial_bound);
            single(params_of("uniformity", a), body, stdout)
        }
        Command::Moments(a) => {
            let q = parse_poly(&a.poly)?;
            let d = a.d.unwrap_or(q.degree() as u32);
            let rep = match a.grid {
                Some(m) => moment_report_grid(&q, a.k, d, a.epsilon, a.s, m)?,
                None => moment_report(&q, a.k, d, a.epsilon, a.s)?,
            };
            let mut body = value_of(&rep);
            body["arc_at_zero"] = value_of(&classify_arc(0.0, a.k, d, a.epsilon));
            single(params_of("moments", a), body, stdout)
        }
        Command::Wtrick(a) => {
            let ctx = build_w_trick(&parse_poly(&a.ctx.p)?, a.ctx.rho, a.ctx.w)?;
            let mut body = ctx.to_json();
            if let Some(n) = a.n {
                body["K"] = json!(ctx.k_for(n));
            }
            single(params_of("wtrick", a), body, stdout)
        }
        Command::Count(a) => {
            let n = a.n;
            let f0 = load_fn(&a.f0, n)?;
            let f1 = load_fn(&a.f1, n)?;
            let f2 = load_fn(&a.f2, n)?;
            let need = |o: Option<&String>, name: &str| -> Result<IntPolynomial> {
                parse_poly(o.ok_or_else(|| Error::Argument(format!("--{name} is required for this operator")))?)
            };
            let ctx = || -> Result<_> {
                let p = need(a.poly.as_ref(), "poly")?;
                let rho = a.rho.ok_or_else(|| Error::Argument("--rho is required".into()))?;
                let w = a.w.ok_or_else(|| Error::Argument("--w is required".into()))?;
                build_w_trick(&p, rho, w)
            };
            let res = match a.op {
                CountOp::Corners => lambda_corners(&f0, &f1, &f2, n),
                CountOp::Poly => {
                    let p = need(a.poly.as_ref(), "poly")?;
                    lambda_poly(&f0, &f1, &f2, &p, n)?
                }
                CountOp::Model => {
                    let d = match (a.d, &a.poly) {
                        (Some(d), _) => d,
                        (None, Some(p)) => parse_poly(p)?.degree() as u32,
                        (None, None) => 2,
                    };
                    lambda_model(&f0, &f1, &f2, n, d)?
                }
                CountOp::Wtrick => lambda_w(&f0, &f1, &f2, &ctx()?, n)?,
                CountOp::Star => lambda_star(&f0, &f1, &f2, &ctx()?, n)?,
                CountOp::Prime => {
                    let v = a.v.ok_or_else(|| Error::Argument("--V is required".into()))?;
                    let r = a.r.unwrap_or(0);
                    let phase = PhaseFn::constant(f1.n(), a.alpha.unwrap_or(0.0));
                    lambda_prime(&phase, &f1, &f2, &ctx()?, v, r, n)?
                }
            };
            single(params_of("count", a), operator_json(&res), stdout)
        }
        Command::Norm(a) => {
            let spec = BoxSpec::parse(&a.box_spec)?;
            let input = read_input(&a.input)?;
            let params = params_of("norm", a);
            let body = match input {
                Input::Line(f) => {
                    if spec.factors.iter().any(|b| b.dir != Direction::e1()) {
                        return Err(Error::Argument("line inputs take e1 factors only".into()));
                    }
                    if a.check.is_some() || a.fft {
                        return Err(Error::Argument("--check and --fft need a grid input".into()));
                    }
                    if a.unnormalized {
                        let steps: Vec<i64> = spec.factors.iter().map(|b| b.step).collect();
                        value_of(&unnormalized_line_norm(&f, &steps, budget)?)
                    } else {
                        let fac: Vec<(i64, i64)> = spec.factors.iter().map(|b| (b.step, b.half)).collect();
                        value_of(&line_box_norm(&f, &fac, budget)?)
                    }
                }
                other => {
                    let f = other.into_grid()?;
                    if a.unnormalized {
                        let dirs: Vec<Direction> = spec.factors.iter().map(|b| b.dir).collect();
                        value_of(&unnormalized_box_norm(&f, &dirs, budget)?)
                    } else if let Some(p) = &a.check {
                        value_of(&check_box_properties(&f, &spec, &Property::parse(p)?, budget)?)
                    } else if a.fft {
                        value_of(&box_norm_fft(&f, &spec, budget)?)
                    } else {
                        value_of(&box_norm(&f, &spec, budget)?)
                    }
                }
            };
            single(params, body, stdout)
        }
        Command::Inverse(a) => {
            let kind = WitnessKind::parse(&a.kind)?;
            let input = read_input(&a.input)?;
            let w = match kind {
                WitnessKind::U1 => {
                    let f = input.into_line()?;
                    let n = f.end().max(1) as usize;
                    u1_witness_line(&f, n, a.n_prime.unwrap_or(4 * n as i64))?
                }
                WitnessKind::U2 => {
                    let f = input.into_line()?;
                    u2_witness_line(&f, a.m.unwrap_or(4 * f.len().max(1)))?
                }
                WitnessKind::U1xU1 => {
                    let dirs = split_dirs(&a.dirs)?;
                    if dirs.len() != 2 {
                        return Err(Error::Argument("--dirs needs two directions".into()));
                    }
                    u1xu1_witness(&input.into_grid()?, dirs[0], dirs[1])?
                }
                WitnessKind::U2xU1 => {
                    let f = input.into_grid()?;
                    let h = a.h.unwrap_or((f.n() as i64 / 2).max(1));
                    u2xu1_witness(&f, h, budget)?
                }
            };
            single(params_of("inverse", a), witness_json(&w), stdout)
        }
        Command::Generate(a) => {
            let kind = match a.kind {
                GenKind::Random => SetKind::Random { density: a.density },
                GenKind::DiagonalFree => SetKind::DiagonalFree,
            };
            let set = generate_set(&kind, a.n, a.seed)?;
            if let Some(path) = &a.out {
                std::fs::write(path, set_to_json(set.n(), set.points()))?;
            }
            let body = json!({
                "size": set.len(),
                "density": set.density(),
                "nontrivial_corners": count_corners(&set, &Shape::Linear, true)?,
            });
            single(params_of("generate", a), body, stdout)
        }
        Command::Experiment(e) => experiment(e, budget, stdout),
    }
}

fn experiment(cmd: &ExperimentCmd, budget: f64, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        ExperimentCmd::Compare(a) => {
            let ctx = build_w_trick(&parse_poly(&a.ctx.p)?, a.ctx.rho, a.ctx.w)?;
            let seeds: Vec<u64> = (0..a.count).map(|i| a.out.seed.wrapping_add(i)).collect();
            let rows = compare_study(&ctx, a.n, &a.densities, &seeds)?;
            let rows: Vec<Value> = rows.iter().map(value_of).collect();
            write_table(&a.out, params_of("experiment compare", a), &rows, stdout)
        }
        ExperimentCmd::Supersaturation(a) => {
            let kind = match a.kind {
                SuperKind::Random => SetKind::Random { density: a.density },
                SuperKind::DiagonalFree => SetKind::DiagonalFree,
                SuperKind::File => SetKind::File(
                    a.input.clone().ok_or_else(|| Error::Argument("--input is required for file sets".into()))?,
                ),
            };
            let set = generate_set(&kind, a.n, a.out.seed)?;
            let shape = match &a.poly {
                Some(p) => Shape::Poly(parse_poly(p)?),
                None => Shape::Linear,
            };
            let corners = count_corners(&set, &shape, true)?;
            let rep = varnavides_subsample(&set, a.m)?;
            let rows: Vec<Value> = rep
                .rows
                .iter()
                .map(|r| {
                    let mut v = value_of(r);
                    v["good_pairs"] = json!(rep.good_pairs);
                    v["coverage_check"] = json!(rep.coverage_check);
                    v["corner_lower_bound"] = json!(rep.corner_lower_bound);
                    v["nontrivial_corners"] = json!(corners);
                    v["density"] = json!(rep.density);
                    v
                })
                .collect();
            write_table(&a.out, params_of("experiment supersaturation", a), &rows, stdout)
        }
        ExperimentCmd::Vdc(a) => {
            let rows = vdc_rows(a)?;
            write_table(&a.out, params_of("experiment vdc", a), &rows, stdout)
        }
        ExperimentCmd::Ddi(a) => {
            let rows = ddi_rows(a, budget)?;
            write_table(&a.out, params_of("experiment ddi", a), &rows, stdout)
        }
        ExperimentCmd::Sarkozy(a) => {
            let q = parse_poly(&a.poly)?;
            let mut rows = Vec::new();
            for i in 0..a.count {
                let seed = a.out.seed.wrapping_add(i);
                let (f0, f1) = match a.period {
                    Some(p) if p > 0 => {
                        let f = phase_line(a.n, 1.0 / p as f64);
                        (f.conj(), f)
                    }
                    Some(_) => return Err(Error::Argument("--period must be positive".into())),
                    None => (random_sign_line(a.n, seed), random_sign_line(a.n, seed ^ 0x9e37_79b9_7f4a_7c15)),
                };
                let rep = sarkozy_check_line(&f0, &f1, &q, a.n, a.q_max)?;
                let mut v = value_of(&rep);
                v["seed"] = json!(seed);
                rows.push(v);
            }
            write_table(&a.out, params_of("experiment sarkozy", a), &rows, stdout)
        }
        ExperimentCmd::Smoothweight(a) => {
            let mut rows = Vec::new();
            for &eps in &a.epsilons {
                let (_, rep) = smoothed_weight(a.n, a.d, eps)?;
                rows.push(value_of(&rep));
            }
            write_table(&a.out, params_of("experiment smoothweight", a), &rows, stdout)
        }
        ExperimentCmd::Fraction(a) => {
            let ctx = build_w_trick(&parse_poly(&a.ctx.p)?, a.ctx.rho, a.ctx.w)?;
            let rp = RealPolynomial::parse(&a.r_poly)?;
            let rep = fraction_comparison_report(&rp, &ctx, a.v, a.r, a.t)?;
            write_table(&a.out, params_of("experiment fraction", a), &[value_of(&rep)], stdout)
        }
    }
}

/// Random signs with bias, redrawn until |E f| meets delta.
pub fn biased_line(n: usize, bias: f64, rng: &mut ChaCha8Rng) -> LineFn {
    let v: Vec<C64> = (0..n).map(|_| C64::new(if rng.gen_bool(bias) { 1.0 } else { -1.0 }, 0.0)).collect();
    LineFn::new(0, v).expect("bounded")
}

fn vdc_rows(a: &VdcArgs) -> Result<Vec<Value>> {
    if !(0.0..=1.0).contains(&a.bias) {
        return Err(Error::Argument("bias must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.out.seed);
    let mut rows = Vec::new();
    for i in 0..a.count {
        let f = biased_line(a.n, a.bias, &mut rng);
        let rep = van_der_corput_check(&f, a.n, a.h, a.delta)?;
        let mut v = value_of(&rep);
        v["instance"] = json!(i);
        rows.push(v);
    }
    Ok(rows)
}

/// Slices f1(x + P(z), y) f2(x, y + P(z)) for z in [K], at most 32 of them.
pub fn d0_dual_form(f1: &GridFn, f2: &GridFn, p: &IntPolynomial) -> Result<DualForm> {
    let n = f1.n();
    let k = poly_k(p, n)?.min(32);
    let slices = p
        .values_on(k)?
        .into_iter()
        .map(|t| {
            GridFn::from_fn(n, |x, y| {
                let (x, y) = (x as i64, y as i64);
                f1.get(x + t, y) * f2.get(x, y + t)
            })
        })
        .collect();
    DualForm::new(slices)
}

fn ddi_rows(a: &DdiArgs, budget: f64) -> Result<Vec<Value>> {
    let spec = BoxSpec::parse(&a.box_spec)?;
    let p = parse_poly(&a.poly)?;
    let mut rows = Vec::new();
    for i in 0..a.count {
        let seed = a.out.seed.wrapping_add(i);
        let s1 = generate_set(&SetKind::Random { density: a.density }, a.n, 2 * seed)?;
        let s2 = generate_set(&SetKind::Random { density: a.density }, a.n, 2 * seed + 1)?;
        let form = d0_dual_form(&s1.indicator(), &s2.indicator(), &p)?;
        let rep = dual_difference_check(&form, &spec, a.r, budget)?;
        let mut v = value_of(&rep);
        v["seed"] = json!(seed);
        rows.push(v);
    }
    Ok(rows)
}

/// Runs the CLI on `argv`, writing results to `stdout`; returns the exit code.
pub fn run_with(argv: &[String], stdout: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return 2;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let outcome = pool.install(|| dispatch(&cli, &mut buf));
    let _ = stdout.write_all(&buf);
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            let obj = json!({ "error": err.name(), "message": err.to_string() });
            let _ = writeln!(stdout, "{}", to_json_line(&obj));
            1
        }
    }
}

pub fn run(argv: &[String]) -> i32 {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let code = run_with(argv, &mut lock);
    let _ = lock.flush();
    code
}
