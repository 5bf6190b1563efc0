//! Command-line front end for `enriques-core`.
//!
//! Exit codes: 0 on success, 1 when a verification or certification fails,
//! 2 on usage or input errors.

pub mod acceptance;

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use enriques_core::involution::{self, ExtendedInvolution};
use enriques_core::lattice::{self, Lattice, LatticeVector};
use enriques_core::model::branch::BranchPolynomial;
use enriques_core::model::space::{self, M0Verdict};
use enriques_core::quadric::{self, QuadricAction};
use num_rational::BigRational;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use acceptance::{default_budget, Status};

#[derive(Parser, Debug)]
#[command(name = "enriques-kit", version, about = "Exact lattice, quadric-action and branch-curve computations")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Maximum number of boxes for torus sign certificates.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Seed for randomized operations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integral lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Involutions of E8neg ⊕ U with δ-data.
    #[command(subcommand)]
    Involution(InvolutionCmd),
    /// Real structures on the quadric commuting with s.
    #[command(subcommand)]
    Actions(ActionsCmd),
    /// Bidegree-(4,4) branch polynomials.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Runs the acceptance suite.
    VerifyPaper {
        /// Run a single criterion, e.g. AC-8.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct LatticeInput {
    /// A named lattice: U, E8neg, D4neg, nA1, diag(a,b,...).
    #[arg(long, conflicts_with = "file")]
    pub name: Option<String>,
    /// A lattice JSON file ("-" for stdin).
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Signature (n₊, n₋, n₀).
    Signature(LatticeInput),
    /// Invariant factors of the discriminant group and, for even lattices, the form.
    Discriminant(LatticeInput),
    /// Maximal even sublattice.
    EvenSublattice(LatticeInput),
    /// Isometry between two definite lattices given by name.
    Isometry { a: String, b: String },
}

#[derive(Subcommand, Debug)]
pub enum InvolutionCmd {
    /// Type of the plane spanned by a standard pair: {"involution", "u1", "u2"}.
    ClassifyPlane { file: Option<PathBuf> },
    /// Plane of type I(0,w2): {"involution", "u1", "u2", "d4": [4 vectors]}.
    FindI0w2 { file: Option<PathBuf> },
    /// Reality of the pencil of a primitive isotropic vector: {"involution", "x"}.
    PencilReality { file: Option<PathBuf> },
    /// The model involution with a D4 ⊕ U frame.
    ModelFrame,
}

#[derive(Subcommand, Debug)]
pub enum ActionsCmd {
    /// Classify an action given as JSON.
    Classify { file: Option<PathBuf> },
    /// The five actions on P¹×P¹ and the two on Σ₂.
    Table,
}

#[derive(Subcommand, Debug)]
pub enum ModelCmd {
    /// Check the coefficient constraints.
    Validate { file: Option<PathBuf> },
    /// Certify membership in M0.
    Check { file: Option<PathBuf> },
    /// The fixed center polynomial.
    Center,
    /// Seeded sample of M0 near the center.
    Sample {
        #[arg(long, default_value = "1/4")]
        radius: String,
    },
    /// Certified straight-line path between two members of M0.
    Connect {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
}

/// Outcome of a subcommand: text for humans, a JSON value, and whether the
/// checked property held.
struct Output {
    text: String,
    json: serde_json::Value,
    ok: bool,
}

impl Output {
    fn new<T: Serialize>(text: impl Into<String>, value: &T, ok: bool) -> Result<Self> {
        Ok(Output {
            text: text.into(),
            json: serde_json::to_value(value)?,
            ok,
        })
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn parse<T: DeserializeOwned>(path: Option<&PathBuf>) -> Result<T> {
    let s = read_input(path)?;
    serde_json::from_str(&s).context("parsing JSON input")
}

fn load_lattice(input: &LatticeInput) -> Result<Lattice> {
    match (&input.name, &input.file) {
        (Some(n), _) => Ok(lattice::standard_lattice(n)?),
        (None, f) => parse(f.as_ref()),
    }
}

#[derive(Deserialize)]
struct PlaneInput {
    involution: ExtendedInvolution,
    u1: LatticeVector,
    u2: LatticeVector,
    #[serde(default)]
    d4: Option<[LatticeVector; 4]>,
}

#[derive(Deserialize)]
struct PencilInput {
    involution: ExtendedInvolution,
    x: LatticeVector,
}

fn lattice_cmd(cmd: &LatticeCmd) -> Result<Output> {
    match cmd {
        LatticeCmd::Signature(i) => {
            let s = lattice::signature(&load_lattice(i)?);
            Output::new(s.to_string(), &[s.pos, s.neg, s.zero], true)
        }
        LatticeCmd::Discriminant(i) => {
            let l = load_lattice(i)?;
            let group = lattice::discriminant_group(&l)?;
            let form = if lattice::is_even(&l) { Some(lattice::discriminant_form(&l)?) } else { None };
            let mut text = format!("group {:?}", group.iter().map(ToString::to_string).collect::<Vec<_>>());
            if let Some(f) = &form {
                text.push_str(&format!(", {} form", if f.is_even() { "even" } else { "odd" }));
            }
            let value = serde_json::json!({
                "invariant_factors": group.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "form": form,
            });
            Output::new(text, &value, true)
        }
        LatticeCmd::EvenSublattice(i) => {
            let e = lattice::max_even_sublattice(&load_lattice(i)?);
            let text = format!("index {}, det {}", e.index, e.lattice.det());
            let value = serde_json::json!({ "index": e.index.to_string(), "lattice": e.lattice, "basis": e.basis });
            Output::new(text, &value, true)
        }
        LatticeCmd::Isometry { a, b } => {
            let (la, lb) = (lattice::standard_lattice(a)?, lattice::standard_lattice(b)?);
            let iso = lattice::isometry_search(&la, &lb)?;
            let text = match &iso {
                Some(m) => format!("isometric: {:?}", lattice::to_i64_matrix(&m.matrix)),
                None => "not isometric".to_string(),
            };
            let ok = iso.is_some();
            Output::new(text, &iso, ok)
        }
    }
}

fn involution_cmd(cmd: &InvolutionCmd) -> Result<Output> {
    match cmd {
        InvolutionCmd::ClassifyPlane { file } => {
            let i: PlaneInput = parse(file.as_ref())?;
            let t = involution::classify_plane(&i.involution, &i.u1, &i.u2)?;
            Output::new(t.to_string(), &t, true)
        }
        InvolutionCmd::FindI0w2 { file } => {
            let i: PlaneInput = parse(file.as_ref())?;
            let d4 = i.d4.ok_or_else(|| anyhow!("input needs a \"d4\" frame"))?;
            let (a, b) = involution::find_plane_i0w2(&i.involution, &i.u1, &i.u2, &d4)?;
            let text = format!("{:?}\n{:?}", a.coords, b.coords);
            Output::new(text, &serde_json::json!({ "u1": a, "u2": b }), true)
        }
        InvolutionCmd::PencilReality { file } => {
            let i: PencilInput = parse(file.as_ref())?;
            let v = involution::pencil_reality(&i.involution, &i.x)?;
            Output::new(format!("{v:?}"), &v, true)
        }
        InvolutionCmd::ModelFrame => {
            let f = involution::model_frame();
            let value = serde_json::json!({ "involution": f.involution, "u1": f.u1, "u2": f.u2, "d4": f.d4 });
            Output::new(serde_json::to_string_pretty(&value)?, &value, true)
        }
    }
}

fn report_line(r: &quadric::ActionReport) -> String {
    format!(
        "type {}: halves ({}, {}), invariant fibers ({}, {}), s-fixed real points {}, H2 {:?}",
        r.type_id, r.halves[0], r.halves[1], r.invariant_fibers[0], r.invariant_fibers[1], r.s_real_fixed_points, r.h2_matrix
    )
}

fn actions_cmd(cmd: &ActionsCmd) -> Result<Output> {
    match cmd {
        ActionsCmd::Classify { file } => {
            let a: QuadricAction = parse(file.as_ref())?;
            let r = quadric::classify_action(&a)?;
            Output::new(report_line(&r), &r, true)
        }
        ActionsCmd::Table => {
            let mut text = String::from("P1 x P1:\n");
            let mut rows = Vec::new();
            for a in quadric::canonical_actions() {
                let r = quadric::classify_action(&a)?;
                text.push_str(&format!("  {}\n", report_line(&r)));
                rows.push(r);
            }
            text.push_str("Sigma2:\n");
            let mut sigma2 = Vec::new();
            for a in quadric::canonical_sigma2_actions() {
                let r = quadric::classify_sigma2_action(&a)?;
                text.push_str(&format!("  type {}: {} invariant generatrices\n", r.type_id, r.invariant_fibers[0]));
                sigma2.push(r);
            }
            Output::new(text.trim_end(), &serde_json::json!({ "p1xp1": rows, "sigma2": sigma2 }), true)
        }
    }
}

fn verdict_output(v: &M0Verdict) -> Result<Output> {
    let (text, ok) = match v {
        M0Verdict::Valid(c) => (
            format!(
                "valid: {} on the torus ({} boxes, depth {}), corners nonzero, {} singular points",
                space::exposition_sign(&c.torus),
                c.torus.boxes.len(),
                c.torus.depth,
                c.singularities.count()
            ),
            true,
        ),
        M0Verdict::Rejected(r) => (format!("rejected: {} clause", r.clause()), false),
        M0Verdict::Inconclusive(i) => (format!("inconclusive: {i:?}"), false),
    };
    Output::new(text, v, ok)
}

fn model_cmd(cmd: &ModelCmd, budget: usize, seed: u64) -> Result<Output> {
    match cmd {
        ModelCmd::Validate { file } => {
            let raw: serde_json::Value = parse(file.as_ref())?;
            match serde_json::from_value::<BranchPolynomial>(raw) {
                Ok(p) => Output::new("valid", &p, true),
                Err(e) => Output::new(format!("invalid: {e}"), &serde_json::json!({ "error": e.to_string() }), false),
            }
        }
        ModelCmd::Check { file } => {
            let p: BranchPolynomial = parse(file.as_ref())?;
            verdict_output(&space::is_in_m0(&p, budget))
        }
        ModelCmd::Center => {
            let p = space::center_polynomial();
            Output::new(serde_json::to_string(&p)?, &p, true)
        }
        ModelCmd::Sample { radius } => {
            let r: BigRational = enriques_core::json::parse_rational(radius).map_err(|e| anyhow!(e))?;
            let p = space::sample_m0(seed, &r, budget)?;
            Output::new(serde_json::to_string(&p)?, &p, true)
        }
        ModelCmd::Connect { a, b, samples } => {
            let p0: BranchPolynomial = parse(Some(a))?;
            let p1: BranchPolynomial = parse(Some(b))?;
            match space::connect_path(&p0, &p1, *samples, seed, budget) {
                Ok(chain) => {
                    let repaired = chain.iter().filter(|s| s.repaired).count();
                    Output::new(format!("{} certified samples, {repaired} repaired", chain.len()), &chain, true)
                }
                Err(e) => Output::new(format!("failed: {e}"), &serde_json::json!({ "error": e.to_string() }), false),
            }
        }
    }
}

/// Caps rayon's global pool from `ENRIQUES_KIT_THREADS`, once per process.
fn configure_threads() {
    if let Some(n) = std::env::var("ENRIQUES_KIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let budget = cli.budget.unwrap_or_else(default_budget);
    let seed = cli.seed.unwrap_or(0);
    let output = match &cli.command {
        Command::Lattice(c) => lattice_cmd(c)?,
        Command::Involution(c) => involution_cmd(c)?,
        Command::Actions(c) => actions_cmd(c)?,
        Command::Model(c) => model_cmd(c, budget as usize, seed)?,
        Command::VerifyPaper { only } => {
            if let Some(id) = only {
                if acceptance::criterion(id).is_none() {
                    return Err(anyhow!("unknown criterion {id:?}"));
                }
            }
            let report = acceptance::verify_paper(only.as_deref(), budget);
            let text = report
                .entries
                .iter()
                .map(|e| {
                    let mark = match e.status {
                        Status::Verified => "PASS",
                        Status::Failed => "FAIL",
                        Status::Inconclusive => "INCONCLUSIVE",
                    };
                    format!("{mark:<12} {:<6} {:>8} ms  {}", e.id, e.ms, e.detail)
                })
                .collect::<Vec<_>>()
                .join("\n");
            let ok = report.all_verified();
            Output::new(text, &report, ok)?
        }
    };
    if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&output.json)?)?;
    } else {
        writeln!(out, "{}", output.text)?;
    }
    Ok(if output.ok { 0 } else { 1 })
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}
