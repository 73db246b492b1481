//! Batch front door.  One job per process: parse the job description,
//! validate it, dispatch to the library, print one deterministic report.
//!
//! JSON reports are an envelope `{tool, version, job, result}` with sorted
//! keys; CSV output carries the same provenance as leading `#` comment
//! lines, which the CSV readers here skip.  Exit code 0 means the job ran
//! and every internal verification held, 1 means a verification failed
//! (a certificate did not replay, a required inequality came back false),
//! 2 means the job description itself was rejected.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bernstein::{eps_and_order_domination, gr_commutativity_check, WeightedRingSpec};
use crate::charp::{
    f_regularity_scan, ring_fixture, veronese_ffrt, MonomialIdeal, RingPresentation,
};
use crate::dmod::{bs_solve, holonomic_growth_report, theta_hom, GrowthModule, LocalizedRing};
use crate::error::{Error, Result};
use crate::filtration::{bernstein_check, dim_estimate, length_bound, DimSequence};
use crate::invariants::{
    diff_signature_estimate, differential_power, fixture, invariant_bf_basis, reynolds_poly,
    FiniteMatrixGroup,
};
use crate::poly::Poly;
use crate::rat::{parse_rat, rat_i};
use crate::simplicity::{membership_certificate, min_constant_table, reduce_to_unit, Move};
use crate::text::{parse_dp_op, parse_fp_poly, parse_poly, parse_qop, poly_to_json, qop_to_json};
use crate::weyl::{commute_identity_exact, WeylOp};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "diffops",
    version,
    about = "Exact computations in rings of differential operators",
    propagate_version = true
)]
pub struct Cli {
    /// Emit CSV instead of JSON (only for jobs with a tabular result).
    #[arg(long, global = true)]
    pub csv: bool,

    /// Emit the JSON envelope (the default).
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for the randomized suites; fixed seed, fixed output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Weyl algebra arithmetic on canonical operator text.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Generalized Bernstein filtrations: dimensions, bases, checks.
    #[command(subcommand)]
    Bf(BfCmd),
    /// Growth estimates and inequalities on dimension sequences.
    #[command(subcommand)]
    Filtration(FiltrationCmd),
    /// Invariant rings of finite groups.
    #[command(subcommand)]
    Invariants(InvariantsCmd),
    /// Linear-simplicity certificates.
    #[command(subcommand)]
    Simplicity(SimplicityCmd),
    /// Bernstein-Sato functional equations.
    #[command(subcommand)]
    Bs(BsCmd),
    /// Actions on localizations.
    #[command(subcommand)]
    Dmod(DmodCmd),
    /// Characteristic-p splitting ideals and Frobenius toolkit.
    #[command(subcommand)]
    Charp(CharpCmd),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RingArgs {
    /// Number of polynomial variables.
    #[arg(long, default_value_t = 1)]
    pub n: usize,

    /// Comma-separated positive variable weights; defaults to all 1.
    #[arg(long)]
    pub weights: Option<String>,

    /// Filtration slope a (rational, must exceed every weight).
    #[arg(long, default_value = "2")]
    pub slope: String,
}

impl RingArgs {
    fn spec(&self) -> Result<WeightedRingSpec> {
        let weights = match &self.weights {
            None => vec![1; self.n],
            Some(s) => parse_u32_list(s, "--weights")?,
        };
        if weights.len() != self.n {
            return Err(Error::BadParameter(format!(
                "--weights: expected {} entries, got {}",
                self.n,
                weights.len()
            )));
        }
        let slope = parse_rat(&self.slope)
            .map_err(|e| Error::BadParameter(format!("--slope: {e}")))?;
        WeightedRingSpec::new(self.n, weights, slope)
            .map_err(|e| Error::BadParameter(format!("--slope/--weights: {e}")))
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum WeylCmd {
    /// Multiply two operators and print the normal form.
    Mul(WeylMulArgs),
    /// Apply an operator to a polynomial.
    Apply(WeylApplyArgs),
    /// Check the bracket expansion of delta f^j against direct expansion.
    Commute(WeylCommuteArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeylMulArgs {
    /// Number of variables.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Left factor, canonical operator text.
    #[arg(long)]
    pub a: String,
    /// Right factor.
    #[arg(long)]
    pub b: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeylApplyArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Operator, canonical text.
    #[arg(long)]
    pub op: String,
    /// Polynomial argument.
    #[arg(long)]
    pub f: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeylCommuteArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub f: String,
    /// Power of f to commute past; negative powers probe in R_f.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub j: i64,
    /// Denominator exponent of the probe element for negative j.
    #[arg(long, default_value_t = 2)]
    pub t: u32,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum BfCmd {
    /// Dimension sequence dim B_i for i = 0..=imax.
    Dim(BfDimArgs),
    /// Monomial operator basis of the level-i piece.
    Basis(BfBasisArgs),
    /// Filtration sanity checks: order domination and gr commutativity.
    Check(BfCheckArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BfDimArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long, default_value_t = 10)]
    pub imax: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BfBasisArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Filtration level to enumerate.
    #[arg(long, default_value_t = 2)]
    pub level: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BfCheckArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long, default_value_t = 8)]
    pub imax: u64,
    /// Levels of the two random factors in the gr commutativity sample.
    #[arg(long, default_value_t = 3)]
    pub i: u64,
    #[arg(long, default_value_t = 3)]
    pub j: u64,
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum FiltrationCmd {
    /// Fit degree and multiplicity to a dimension sequence.
    Estimate(FiltSeqArgs),
    /// Reindex a sequence along i -> floor(i^(p/q)).
    Reindex(FiltReindexArgs),
    /// Degree and multiplicity inequalities for a module over an algebra.
    Bernstein(FiltBernsteinArgs),
    /// Numeric length bound from multiplicities.
    LengthBound(FiltLengthBoundArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FiltSeqArgs {
    /// Inline comma-separated dimensions, e.g. "1,3,6,10".
    #[arg(long)]
    pub dims: Option<String>,
    /// CSV file with i,dim rows (as written by `bf dim --csv`).
    #[arg(long)]
    pub file: Option<String>,
    #[arg(long, default_value = "F")]
    pub label: String,
    #[arg(long, default_value_t = 4)]
    pub window: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FiltReindexArgs {
    #[command(flatten)]
    pub seq: FiltSeqArgs,
    /// Numerator of the reindexing exponent.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Denominator of the reindexing exponent.
    #[arg(long, default_value_t = 1)]
    pub q: u32,
    #[arg(long, default_value_t = 10)]
    pub imax: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FiltBernsteinArgs {
    /// Algebra dimension sequence, inline comma-separated.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Algebra dimension sequence, CSV file.
    #[arg(long)]
    pub algebra_file: Option<String>,
    /// Module dimension sequence, inline comma-separated.
    #[arg(long)]
    pub module: Option<String>,
    /// Module dimension sequence, CSV file.
    #[arg(long)]
    pub module_file: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub window: usize,
    /// Comparison constant for the multiplicity inequality.
    #[arg(long)]
    pub c: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FiltLengthBoundArgs {
    /// Multiplicity of the algebra.
    #[arg(long)]
    pub eg: String,
    /// Multiplicity of the module.
    #[arg(long)]
    pub ef: String,
    /// Membership constant.
    #[arg(long)]
    pub c: u64,
    /// Degree ratio.
    #[arg(long)]
    pub theta: String,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum InvariantsCmd {
    /// Basis of the invariant part of a filtration level.
    Basis(InvBasisArgs),
    /// Differential signature estimate from differential powers.
    Signature(InvSignatureArgs),
    /// Graded data of one differential power.
    Power(InvPowerArgs),
    /// Reynolds averaging of a polynomial.
    Reynolds(InvReynoldsArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InvBasisArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Group fixture name, e.g. cyclic-sign(1), rot4, diag-signs(2), perm(3).
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 2)]
    pub level: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InvSignatureArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 8)]
    pub imax: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InvPowerArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long)]
    pub group: String,
    /// Which differential power to expand.
    #[arg(long, default_value_t = 2)]
    pub i: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InvReynoldsArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub f: String,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum SimplicityCmd {
    /// Reduce an operator to a nonzero constant by iterated brackets.
    Reduce(SimpReduceArgs),
    /// Certificate that 1 lies in B_Ci delta B_Ci.
    Membership(SimpMembershipArgs),
    /// Least certifying constants over whole levels.
    Table(SimpTableArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimpReduceArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long)]
    pub op: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimpMembershipArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long)]
    pub op: String,
    /// Level i with op in B_i.
    #[arg(long)]
    pub level: u64,
    /// Constant C bounding the side factors to B_Ci.
    #[arg(long, default_value_t = 1)]
    pub c: u64,
    /// Optional group fixture: restrict side factors to invariants.
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimpTableArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    #[arg(long, default_value_t = 4)]
    pub imax: u64,
    #[arg(long, default_value_t = 3)]
    pub cmax: u64,
    /// Extra random two-term combinations per level.
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum BsCmd {
    /// Search for delta(s) f^(s+1) = b(s) f^s.
    Solve(BsSolveArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BsSolveArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub f: String,
    /// Filtration level bound for delta (standard weights, slope 2).
    #[arg(long, default_value_t = 6)]
    pub level: u64,
    /// Degree in s of the operator ansatz.
    #[arg(long, default_value_t = 1)]
    pub sdeg: u32,
    /// Largest degree tried for b(s).
    #[arg(long, default_value_t = 3)]
    pub bdeg: u32,
    /// Restrict delta to the invariant part for this group fixture.
    #[arg(long)]
    pub group: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum DmodCmd {
    /// Apply an operator to num/f^t in the localization R_f.
    Act(DmodActArgs),
    /// Closed form of the action on f^(-m) R_f via the bracket chain.
    Theta(DmodThetaArgs),
    /// Dimension growth of R or R_f under the induced filtration.
    Growth(DmodGrowthArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DmodActArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub op: String,
    /// Numerator of the argument.
    #[arg(long, default_value = "1")]
    pub num: String,
    /// Denominator exponent of the argument.
    #[arg(long, default_value_t = 0)]
    pub t: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DmodThetaArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub op: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DmodGrowthArgs {
    #[command(flatten)]
    pub ring: RingArgs,
    /// Localize at this polynomial; omit for the plain polynomial ring.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub imax: u64,
    #[arg(long, default_value_t = 4)]
    pub window: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum CharpCmd {
    /// Splitting ideal chain and F-regularity scan.
    Split(CharpSplitArgs),
    /// Veronese Frobenius decomposition multiplicities.
    Ffrt(CharpFfrtArgs),
    /// Level and order of a divided-power operator.
    Level(CharpLevelArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CharpSplitArgs {
    /// Ring fixture name (poly-p2-2, xy-hypersurface-p2, quadric-p3,
    /// cusp-p5, singh-swanson-p2) or inline JSON
    /// {"p":..,"n":..,"ideal":[..]} / {"p":..,"n":..,"f":".."}.
    #[arg(long)]
    pub ring: String,
    #[arg(long, default_value_t = 3)]
    pub emax: u32,
    /// Degree window for graded routes and containment checks.
    #[arg(long, default_value_t = 8)]
    pub window: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CharpFfrtArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Veronese degree.
    #[arg(long, default_value_t = 2)]
    pub r: u64,
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub e: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CharpLevelArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    /// Divided-power operator text, e.g. "x1*D1^(2)".
    #[arg(long)]
    pub op: String,
}

/// Everything a finished job hands back to main.
#[derive(Debug)]
pub struct CliOutput {
    pub json: Value,
    pub csv: Option<String>,
    pub ok: bool,
}

fn parse_u32_list(s: &str, field: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::BadParameter(format!("{field}: bad entry '{t}'")))
        })
        .collect()
}

fn parse_u64_list(s: &str, field: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::BadParameter(format!("{field}: bad entry '{t}'")))
        })
        .collect()
}

fn parse_rat_field(s: &str, field: &str) -> Result<crate::rat::Rat> {
    parse_rat(s).map_err(|e| Error::BadParameter(format!("{field}: {e}")))
}

fn group_fixture(name: &str) -> Result<FiniteMatrixGroup> {
    fixture(name).map_err(|e| Error::BadParameter(format!("--group: {e}")))
}

fn load_seq(args: &FiltSeqArgs) -> Result<DimSequence> {
    match (&args.dims, &args.file) {
        (Some(_), Some(_)) => Err(Error::BadParameter(
            "--dims/--file: give exactly one source".into(),
        )),
        (Some(inline), None) => {
            let dims = parse_u64_list(inline, "--dims")?;
            let text = dims
                .iter()
                .enumerate()
                .map(|(i, d)| format!("{i},{d}"))
                .collect::<Vec<_>>()
                .join("\n");
            DimSequence::from_csv(args.label.clone(), &text)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::BadParameter(format!("--file: {path}: {e}")))?;
            DimSequence::from_csv(args.label.clone(), &text)
        }
        (None, None) => Err(Error::BadParameter(
            "--dims/--file: a dimension sequence is required".into(),
        )),
    }
}

fn load_named_seq(
    inline: &Option<String>,
    file: &Option<String>,
    label: &str,
    field: &str,
) -> Result<DimSequence> {
    let args = FiltSeqArgs {
        dims: inline.clone(),
        file: file.clone(),
        label: label.to_string(),
        window: 0,
    };
    load_seq(&args).map_err(|e| match e {
        Error::BadParameter(m) => Error::BadParameter(m.replace("--dims/--file", field)),
        other => other,
    })
}

fn charp_ring(spec: &str) -> Result<RingPresentation> {
    let spec = spec.trim();
    if !spec.starts_with('{') {
        return ring_fixture(spec).map_err(|e| Error::BadParameter(format!("--ring: {e}")));
    }
    let v: Value = serde_json::from_str(spec)
        .map_err(|e| Error::BadParameter(format!("--ring: invalid JSON: {e}")))?;
    let p = v
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::BadParameter("--ring.p: a prime is required".into()))?;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::BadParameter("--ring.n: the arity is required".into()))?
        as usize;
    let ring = match (v.get("ideal"), v.get("f")) {
        (Some(_), Some(_)) => {
            return Err(Error::BadParameter(
                "--ring.ideal/--ring.f: give at most one".into(),
            ))
        }
        (None, None) => RingPresentation::Polynomial { p, n },
        (Some(gens), None) => {
            let list = gens.as_array().ok_or_else(|| {
                Error::BadParameter("--ring.ideal: expected an array of monomials".into())
            })?;
            let mut monos = Vec::new();
            for g in list {
                let s = g.as_str().ok_or_else(|| {
                    Error::BadParameter("--ring.ideal: entries must be strings".into())
                })?;
                let poly = parse_poly(s, n)
                    .map_err(|e| Error::BadParameter(format!("--ring.ideal: {e}")))?;
                let terms = poly.sorted_terms();
                if terms.len() != 1 || terms[0].1 != rat_i(1) {
                    return Err(Error::BadParameter(format!(
                        "--ring.ideal: '{s}' is not a monic monomial"
                    )));
                }
                monos.push(terms[0].0.clone());
            }
            RingPresentation::MonomialQuotient {
                p,
                n,
                ideal: MonomialIdeal::new(n, monos)?,
            }
        }
        (None, Some(f)) => {
            let s = f.as_str().ok_or_else(|| {
                Error::BadParameter("--ring.f: expected a polynomial string".into())
            })?;
            let fp = parse_fp_poly(s, n, p)
                .map_err(|e| Error::BadParameter(format!("--ring.f: {e}")))?;
            RingPresentation::PrincipalQuotient { f: fp }
        }
    };
    ring.validate()
        .map_err(|e| Error::BadParameter(format!("--ring: {e}")))?;
    Ok(ring)
}

fn move_name(m: &Move) -> String {
    match m {
        Move::D(j) => format!("d{}", j + 1),
        Move::X(j) => format!("x{}", j + 1),
    }
}

fn estimate_json(e: &crate::filtration::GrowthEstimate) -> Value {
    json!({
        "degree": e.degree.to_string(),
        "multiplicity": e.multiplicity.to_string(),
        "stable": e.stable,
        "window": e.window,
        "period": e.period,
    })
}

fn csv_rows(header: &str, rows: Vec<String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

/// Runs a validated job.  Usage problems come back as Err; internal
/// verification failures come back as `ok = false` on the output.
pub fn run(cli: &Cli) -> Result<CliOutput> {
    if cli.csv && cli.json {
        return Err(Error::BadParameter(
            "--csv/--json: choose one output format".into(),
        ));
    }
    let (name, args_json, result, csv, ok) = dispatch(cli)?;
    if cli.csv && csv.is_none() {
        return Err(Error::BadParameter(format!(
            "--csv: the job '{name}' has no tabular form"
        )));
    }
    let job = json!({
        "command": name,
        "args": args_json,
        "seed": cli.seed,
        "format": if cli.csv { "csv" } else { "json" },
    });
    let envelope = json!({
        "tool": "diffops",
        "version": env!("CARGO_PKG_VERSION"),
        "job": job,
        "result": result,
    });
    let csv = csv.map(|body| {
        format!(
            "# tool: diffops {}\n# job: {}\n{}",
            env!("CARGO_PKG_VERSION"),
            serde_json::to_string(&envelope["job"]).expect("job serializes"),
            body
        )
    });
    Ok(CliOutput {
        json: envelope,
        csv,
        ok,
    })
}

type Dispatched = (&'static str, Value, Value, Option<String>, bool);

fn ser<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("args serialize")
}

fn dispatch(cli: &Cli) -> Result<Dispatched> {
    match &cli.command {
        Command::Weyl(WeylCmd::Mul(a)) => {
            let x = parse_qop(&a.a, a.n).map_err(|e| Error::BadParameter(format!("--a: {e}")))?;
            let y = parse_qop(&a.b, a.n).map_err(|e| Error::BadParameter(format!("--b: {e}")))?;
            let prod = x.mul(&y);
            let result = json!({
                "product": prod.to_string(),
                "terms": qop_to_json(&prod),
                "order": prod.order(),
            });
            Ok(("weyl mul", ser(a), result, None, true))
        }
        Command::Weyl(WeylCmd::Apply(a)) => {
            let op =
                parse_qop(&a.op, a.n).map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let f = parse_poly(&a.f, a.n).map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
            let img = op.apply(&f);
            let result = json!({
                "image": img.to_string(),
                "terms": poly_to_json(&img),
            });
            Ok(("weyl apply", ser(a), result, None, true))
        }
        Command::Weyl(WeylCmd::Commute(a)) => {
            let op =
                parse_qop(&a.op, a.n).map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let f = parse_poly(&a.f, a.n).map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
            let holds = if a.j >= 0 {
                let j = u32::try_from(a.j).expect("nonnegative");
                commute_identity_exact(&op, &f, j)
            } else {
                let ring = LocalizedRing::new(f.clone())?;
                let probe = ring.elt(Poly::one(a.n), a.t);
                ring.commute_probe(&op, a.j, &probe)
            };
            let result = json!({"holds": holds, "j": a.j});
            Ok(("weyl commute", ser(a), result, None, holds))
        }
        Command::Bf(BfCmd::Dim(a)) => {
            let spec = a.ring.spec()?;
            let seq = spec.dim_seq(a.imax);
            let result = json!({
                "label": seq.label(),
                "dims": seq.dims(),
            });
            Ok(("bf dim", ser(a), result, Some(seq.to_csv()), true))
        }
        Command::Bf(BfCmd::Basis(a)) => {
            let spec = a.ring.spec()?;
            let ops: Vec<String> = spec
                .basis(a.level)
                .into_iter()
                .map(|(x, d)| WeylOp::term(x, d, rat_i(1)).to_string())
                .collect();
            let result = json!({
                "level": a.level,
                "dim": ops.len(),
                "ops": ops,
            });
            Ok(("bf basis", ser(a), result, None, true))
        }
        Command::Bf(BfCmd::Check(a)) => {
            let spec = a.ring.spec()?;
            let eps = eps_and_order_domination(&spec, a.imax);
            let gr = gr_commutativity_check(&spec, a.i, a.j, a.samples, cli.seed);
            let ok = eps.ok && gr.ok;
            let result = json!({
                "eps": eps.eps,
                "c": eps.c,
                "checked_upto": eps.checked_upto,
                "order_domination_ok": eps.ok,
                "gr_samples": gr.samples,
                "gr_ok": gr.ok,
                "gr_failure": gr.failure,
            });
            Ok(("bf check", ser(a), result, None, ok))
        }
        Command::Filtration(FiltrationCmd::Estimate(a)) => {
            let seq = load_seq(a)?;
            let est = dim_estimate(&seq, a.window)?;
            let csv = csv_rows(
                "degree,multiplicity,stable,window,period",
                vec![format!(
                    "{},{},{},{},{}",
                    est.degree, est.multiplicity, est.stable, est.window, est.period
                )],
            );
            Ok((
                "filtration estimate",
                ser(a),
                estimate_json(&est),
                Some(csv),
                true,
            ))
        }
        Command::Filtration(FiltrationCmd::Reindex(a)) => {
            let seq = load_seq(&a.seq)?;
            let out = seq.reindex_power(a.p, a.q, a.imax)?;
            let result = json!({
                "label": out.label(),
                "dims": out.dims(),
            });
            Ok((
                "filtration reindex",
                ser(a),
                result,
                Some(out.to_csv()),
                true,
            ))
        }
        Command::Filtration(FiltrationCmd::Bernstein(a)) => {
            let alg = load_named_seq(&a.algebra, &a.algebra_file, "B", "--algebra")?;
            let md = load_named_seq(&a.module, &a.module_file, "M", "--module")?;
            let check = bernstein_check(&alg, &md, a.window, a.c)?;
            let ok = check.degree_holds && check.multiplicity_holds.unwrap_or(true);
            let result = json!({
                "algebra": estimate_json(&check.algebra),
                "module": estimate_json(&check.module),
                "degree_holds": check.degree_holds,
                "degree_equality_case": check.degree_equality_case,
                "multiplicity_holds": check.multiplicity_holds,
            });
            Ok(("filtration bernstein", ser(a), result, None, ok))
        }
        Command::Filtration(FiltrationCmd::LengthBound(a)) => {
            let eg = parse_rat_field(&a.eg, "--eg")?;
            let ef = parse_rat_field(&a.ef, "--ef")?;
            let theta = parse_rat_field(&a.theta, "--theta")?;
            let bound = length_bound(&eg, &ef, a.c, &theta)?;
            let result = json!({"bound": bound.to_string()});
            Ok(("filtration length-bound", ser(a), result, None, true))
        }
        Command::Invariants(InvariantsCmd::Basis(a)) => {
            let spec = a.ring.spec()?;
            let g = group_fixture(&a.group)?;
            let space = invariant_bf_basis(&g, &spec, a.level)?;
            let ops: Vec<String> = space.basis.iter().map(|op| op.to_string()).collect();
            let result = json!({
                "level": space.level,
                "dim": ops.len(),
                "ops": ops,
            });
            Ok(("invariants basis", ser(a), result, None, true))
        }
        Command::Invariants(InvariantsCmd::Signature(a)) => {
            let spec = a.ring.spec()?;
            let g = group_fixture(&a.group)?;
            let est = diff_signature_estimate(&g, &spec, a.imax)?;
            let rows: Vec<String> = est
                .dims
                .iter()
                .zip(est.values.iter())
                .enumerate()
                .map(|(i, (d, v))| format!("{},{},{}", i + 1, d, v))
                .collect();
            let result = json!({
                "dims": est.dims,
                "values": est.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "trailing": est.trailing.to_string(),
                "krull_dim": est.krull_dim,
            });
            let csv = csv_rows("i,dim,value", rows);
            Ok(("invariants signature", ser(a), result, Some(csv), true))
        }
        Command::Invariants(InvariantsCmd::Power(a)) => {
            let spec = a.ring.spec()?;
            let g = group_fixture(&a.group)?;
            let rep = differential_power(&g, &spec, a.i)?;
            let result = json!({
                "i": rep.i,
                "degree_cutoff": rep.degree_cutoff,
                "quotient_graded_dims": rep.quotient_graded_dims,
                "total_dim": rep.total_dim,
                "pairing_rank": rep.pairing_rank,
            });
            Ok(("invariants power", ser(a), result, None, true))
        }
        Command::Invariants(InvariantsCmd::Reynolds(a)) => {
            let g = group_fixture(&a.group)?;
            if g.n() != a.n {
                return Err(Error::BadParameter(format!(
                    "--group: acts on {} variables, --n is {}",
                    g.n(),
                    a.n
                )));
            }
            let f = parse_poly(&a.f, a.n).map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
            let img = reynolds_poly(&g, &f);
            let result = json!({"image": img.to_string()});
            Ok(("invariants reynolds", ser(a), result, None, true))
        }
        Command::Simplicity(SimplicityCmd::Reduce(a)) => {
            let spec = a.ring.spec()?;
            let op = parse_qop(&a.op, a.ring.n)
                .map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let cert = reduce_to_unit(&op, &spec)?;
            let result = json!({
                "constant": cert.constant.to_string(),
                "moves": cert.moves.iter().map(move_name).collect::<Vec<_>>(),
                "verified": cert.verified,
            });
            let ok = cert.verified;
            Ok(("simplicity reduce", ser(a), result, None, ok))
        }
        Command::Simplicity(SimplicityCmd::Membership(a)) => {
            let spec = a.ring.spec()?;
            let op = parse_qop(&a.op, a.ring.n)
                .map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let group = match &a.group {
                None => None,
                Some(name) => Some(group_fixture(name)?),
            };
            let found = membership_certificate(&op, a.level, a.c, &spec, group.as_ref())?;
            let (result, ok) = match found {
                None => (json!({"found": false, "c": a.c}), true),
                Some(cert) => {
                    let comb: Vec<Value> = cert
                        .combination
                        .iter()
                        .map(|(l, r, c)| {
                            json!({
                                "left": l.to_string(),
                                "right": r.to_string(),
                                "coeff": c.to_string(),
                            })
                        })
                        .collect();
                    let ok = cert.verified;
                    (
                        json!({
                            "found": true,
                            "c": cert.c,
                            "level": cert.level,
                            "terms": comb.len(),
                            "combination": comb,
                            "verified": cert.verified,
                        }),
                        ok,
                    )
                }
            };
            Ok(("simplicity membership", ser(a), result, None, ok))
        }
        Command::Simplicity(SimplicityCmd::Table(a)) => {
            let spec = a.ring.spec()?;
            let group = match &a.group {
                None => None,
                Some(name) => Some(group_fixture(name)?),
            };
            let table =
                min_constant_table(&spec, group.as_ref(), a.imax, a.cmax, a.samples, cli.seed)?;
            let rows: Vec<String> = table
                .iter()
                .map(|e| {
                    format!(
                        "{},{},{},{}",
                        e.level,
                        e.sampled,
                        e.max_c.map(|c| c.to_string()).unwrap_or_default(),
                        e.capped
                    )
                })
                .collect();
            let entries: Vec<Value> = table
                .iter()
                .map(|e| {
                    json!({
                        "level": e.level,
                        "sampled": e.sampled,
                        "max_c": e.max_c,
                        "capped": e.capped,
                    })
                })
                .collect();
            let csv = csv_rows("level,sampled,max_c,capped", rows);
            let result = json!({"entries": entries});
            Ok(("simplicity table", ser(a), result, Some(csv), true))
        }
        Command::Bs(BsCmd::Solve(a)) => {
            let f = parse_poly(&a.f, a.n).map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
            let group = match &a.group {
                None => None,
                Some(name) => Some(group_fixture(name)?),
            };
            let sol = bs_solve(&f, a.level, a.sdeg, a.bdeg, group.as_ref())?;
            let (result, ok) = match sol {
                None => (json!({"found": false}), true),
                Some(s) => {
                    let ok = s.verified;
                    (
                        json!({
                            "found": true,
                            "b": s.b.to_string(),
                            "delta": s.delta.to_string(),
                            "verified": s.verified,
                            "minimal_in_search": s.minimal_in_search,
                            "level": s.level,
                            "s_degree": s.s_degree,
                            "b_degree": s.b_degree,
                            "invariant_space": s.invariant_space,
                        }),
                        ok,
                    )
                }
            };
            Ok(("bs solve", ser(a), result, None, ok))
        }
        Command::Dmod(DmodCmd::Act(a)) => {
            let f = parse_poly(&a.f, a.n).map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
            let op =
                parse_qop(&a.op, a.n).map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let num =
                parse_poly(&a.num, a.n).map_err(|e| Error::BadParameter(format!("--num: {e}")))?;
            let ring = LocalizedRing::new(f)?;
            let v = ring.elt(num, a.t);
            let w = ring.act(&op, &v);
            let result = json!({
                "num": w.num.to_string(),
                "t": w.t,
                "rendered": format!("({})/f^{}", w.num, w.t),
            });
            Ok(("dmod act", ser(a), result, None, true))
        }
        Command::Dmod(DmodCmd::Theta(a)) => {
            let f = parse_poly(&a.f, a.n).map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
            let op =
                parse_qop(&a.op, a.n).map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let ring = LocalizedRing::new(f)?;
            let sf = theta_hom(&ring, &op);
            let result = json!({
                "fpow": sf.fpow,
                "num": sf.num.to_string(),
            });
            Ok(("dmod theta", ser(a), result, None, true))
        }
        Command::Dmod(DmodCmd::Growth(a)) => {
            let spec = a.ring.spec()?;
            let module = match &a.f {
                None => GrowthModule::PolyRing,
                Some(s) => {
                    let f = parse_poly(s, a.ring.n)
                        .map_err(|e| Error::BadParameter(format!("--f: {e}")))?;
                    GrowthModule::Localized(f)
                }
            };
            let rep = holonomic_growth_report(&module, &spec, a.imax, a.window)?;
            let result = json!({
                "dims": rep.dims.dims(),
                "estimate": estimate_json(&rep.estimate),
                "ring_dim": rep.ring_dim,
                "matches_ring_dim": rep.matches_ring_dim,
                "stretch": rep.stretch,
                "fpow_step": rep.fpow_step,
            });
            Ok((
                "dmod growth",
                ser(a),
                result,
                Some(rep.dims.to_csv()),
                true,
            ))
        }
        Command::Charp(CharpCmd::Split(a)) => {
            let ring = charp_ring(&a.ring)?;
            let rep = f_regularity_scan(&ring, a.emax, a.window)?;
            let ideals: Vec<Value> = rep
                .ideals
                .iter()
                .map(|id| {
                    json!({
                        "e": id.e,
                        "q": id.q,
                        "contains_one": id.contains_one,
                        "gens": id.monomial.as_ref().map(|m| m.to_string()),
                        "graded_dims": id.graded_dims,
                    })
                })
                .collect();
            let ok = rep.chain_verified;
            let result = json!({
                "p": rep.p,
                "e_max": rep.e_max,
                "window": rep.window,
                "f_pure": rep.f_pure,
                "chain_verified": rep.chain_verified,
                "witness_a": rep.witness_a,
                "stabilized_nonzero": rep.stabilized_nonzero,
                "strictly_shrinking": rep.strictly_shrinking,
                "verdict": rep.verdict,
                "ideals": ideals,
            });
            Ok(("charp split", ser(a), result, None, ok))
        }
        Command::Charp(CharpCmd::Ffrt(a)) => {
            let classes = veronese_ffrt(a.n, a.r, a.p, a.e)?;
            let rows: Vec<String> = classes
                .iter()
                .map(|(j, m)| format!("{j},{m}"))
                .collect();
            let map: Value = classes
                .iter()
                .map(|(j, m)| (j.to_string(), Value::String(m.to_string())))
                .collect::<serde_json::Map<_, _>>()
                .into();
            let csv = csv_rows("class,multiplicity", rows);
            let result = json!({"classes": map});
            Ok(("charp ffrt", ser(a), result, Some(csv), true))
        }
        Command::Charp(CharpCmd::Level(a)) => {
            let op = parse_dp_op(&a.op, a.n, a.p)
                .map_err(|e| Error::BadParameter(format!("--op: {e}")))?;
            let level = op.level_of();
            let order = op.order();
            let result = json!({
                "level": level,
                "order": order,
                "order_cap_from_level": (a.n as u64) * (a.p.pow(level).saturating_sub(1)),
            });
            Ok(("charp level", ser(a), result, None, true))
        }
    }
}

/// Prints the report and maps the outcome to the exit code contract.
/// Write errors on stdout (a closed pipe downstream) are ignored.
pub fn main_run(cli: &Cli) -> i32 {
    use std::io::Write;
    match run(cli) {
        Ok(out) => {
            let text = match out.csv {
                Some(csv) => csv,
                None => {
                    let mut s = serde_json::to_string_pretty(&out.json)
                        .expect("report serializes");
                    s.push('\n');
                    s
                }
            };
            let _ = std::io::stdout().write_all(text.as_bytes());
            if out.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_line(line: &str) -> CliOutput {
        let cli = Cli::try_parse_from(line.split_whitespace()).expect("parses");
        run(&cli).expect("runs")
    }

    fn run_err(line: &str) -> Error {
        let cli = Cli::try_parse_from(line.split_whitespace()).expect("parses");
        run(&cli).expect_err("rejects")
    }

    #[test]
    fn dim_csv_golden() {
        let out = run_line("diffops bf dim --n 1 --weights 1 --slope 2 --imax 10 --csv");
        let csv = out.csv.expect("tabular");
        assert!(csv.lines().last().unwrap() == "10,66");
        assert!(csv.starts_with("# tool: diffops"));
        assert!(out.ok);
    }

    #[test]
    fn bs_solve_golden() {
        let out = run_line("diffops bs solve --f x^2 --level 6 --sdeg 1 --bdeg 3");
        let r = &out.json["result"];
        assert_eq!(r["found"], Value::Bool(true));
        assert_eq!(r["b"], Value::String("s^2 + 3/2*s + 1/2".into()));
        assert_eq!(r["verified"], Value::Bool(true));
        assert!(out.ok);
    }

    #[test]
    fn charp_split_golden() {
        let out = run_line("diffops charp split --ring xy-hypersurface-p2 --emax 3");
        let r = &out.json["result"];
        assert_eq!(
            r["verdict"],
            Value::String("F-pure, not strongly F-regular (window)".into())
        );
        assert_eq!(r["ideals"][0]["gens"], Value::String("(x1, x2)".into()));
        assert!(out.ok);
    }

    #[test]
    fn envelope_carries_job() {
        let out = run_line("diffops weyl mul --n 1 --a d --b x");
        assert_eq!(out.json["tool"], Value::String("diffops".into()));
        assert_eq!(
            out.json["version"],
            Value::String(env!("CARGO_PKG_VERSION").into())
        );
        assert_eq!(out.json["job"]["command"], Value::String("weyl mul".into()));
        assert_eq!(out.json["job"]["args"]["a"], Value::String("d".into()));
        assert_eq!(
            out.json["result"]["product"],
            Value::String("x1*d1 + 1".into())
        );
    }

    #[test]
    fn usage_errors_name_the_field() {
        let e = run_err("diffops bf dim --n 2 --weights 1 --slope 2");
        assert!(e.to_string().contains("--weights"));
        let e = run_err("diffops weyl mul --a q9 --b x");
        assert!(e.to_string().contains("--a"));
        let e = run_err("diffops weyl mul --a x --b x --csv");
        assert!(e.to_string().contains("--csv"));
        let e = run_err("diffops charp split --ring no-such-ring --emax 1");
        assert!(e.to_string().contains("--ring"));
    }

    #[test]
    fn inline_json_rings() {
        let cli = Cli::try_parse_from([
            "diffops",
            "charp",
            "split",
            "--ring",
            r#"{"p":2,"n":2,"ideal":["x1*x2"]}"#,
            "--emax",
            "2",
        ])
        .expect("parses");
        let out = run(&cli).expect("runs");
        assert_eq!(
            out.json["result"]["ideals"][0]["gens"],
            Value::String("(x1, x2)".into())
        );
        let cli = Cli::try_parse_from([
            "diffops",
            "charp",
            "split",
            "--ring",
            r#"{"p":5,"n":2,"f":"x^2 + y^3"}"#,
            "--emax",
            "1",
            "--window",
            "6",
        ])
        .expect("parses");
        let out = run(&cli).expect("runs");
        assert_eq!(out.json["result"]["f_pure"], Value::Bool(false));
    }

    #[test]
    fn deterministic_bytes() {
        for line in [
            "diffops bf check --n 2 --slope 2 --imax 6 --seed 7",
            "diffops simplicity table --n 1 --slope 2 --imax 3 --cmax 2 --seed 3",
            "diffops invariants signature --n 1 --slope 2 --group cyclic-sign(1) --imax 6",
        ] {
            let a = run_line(line);
            let b = run_line(line);
            assert_eq!(
                serde_json::to_string(&a.json).unwrap(),
                serde_json::to_string(&b.json).unwrap()
            );
        }
    }

    #[test]
    fn verification_failure_flags_not_ok() {
        let out = run_line("diffops weyl commute --n 1 --op x*d --f x^2 --j -2 --t 1");
        assert!(out.ok, "localized commute identity holds");
        let out = run_line("diffops filtration bernstein --algebra 1,3,6,10,15,21,28,36,45,55 --module 1,1,1,1,1,1,1,1,1,1 --window 4");
        assert!(!out.ok);
        assert_eq!(out.json["result"]["degree_holds"], Value::Bool(false));
    }
}
