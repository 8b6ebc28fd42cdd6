//! Subcommand implementations. Each returns its report and an outcome; the
//! binary wraps them in an [`crate::report::Envelope`].

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use cgt_core::omega::{branch_step, divergence_check, parse_bits, parse_schedule, run_omega, DEMO_SCHEDULE};
use cgt_core::pseries::{DeltaLadder, Membership, TIETZE_BUDGET};
use cgt_core::schreier::{schreier_rank, subgroup_presentation, tietze_simplify};
use cgt_core::{enumerate, parse_presentation, EnumLimits, Presentation, Word};
use cgt_hyperbolic::quasi::quasigeodesic_fit;
use cgt_hyperbolic::slimness::empirical_slimness;
use cgt_hyperbolic::torsion::torsion_profile;
use cgt_hyperbolic::triangle::{reflection_ball, relation_residuals, rotation_ball};
use cgt_hyperbolic::{aperiodicity_scan, build_reflections, LabError, TriangleGroupSpec};

use crate::pipeline::{run_chain, ChainInput, Verdict};
use crate::report::Outcome;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] cgt_core::Error),
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl CommandError {
    pub fn outcome(&self) -> Outcome {
        use cgt_core::Error as E;
        match self {
            CommandError::Usage(_) | CommandError::Io { .. } => Outcome::UsageError,
            CommandError::Core(e) | CommandError::Lab(LabError::Core(e)) => match e {
                E::Limit(_) => Outcome::Inconclusive,
                E::UnknownSymbol(_)
                | E::DuplicateGenerator(_)
                | E::InvalidName(_)
                | E::Syntax { .. }
                | E::EmptyRelator { .. }
                | E::AlphabetMismatch { .. }
                | E::EmptyAlphabet
                | E::NotPrime(_)
                | E::Schedule(_) => Outcome::UsageError,
                _ => Outcome::Fail,
            },
            CommandError::Lab(LabError::NotHyperbolic { .. } | LabError::InvalidSpec(_)) => Outcome::UsageError,
            CommandError::Lab(LabError::OutsideBall(_)) => Outcome::Inconclusive,
            CommandError::Lab(_) => Outcome::Fail,
        }
    }
}

pub type CommandResult = Result<(Value, Outcome), CommandError>;

fn read(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(|source| CommandError::Io { path: path.to_path_buf(), source })
}

fn load_presentation(path: &Path) -> Result<Presentation, CommandError> {
    Ok(parse_presentation(&read(path)?)?)
}

fn load_subgroup(pr: &Presentation, path: Option<&Path>) -> Result<Vec<Word>, CommandError> {
    match path {
        Some(p) => Ok(pr.alphabet().parse_word_list(&read(p)?)?),
        None => Ok(Vec::new()),
    }
}

fn positive(name: &str, v: usize) -> Result<(), CommandError> {
    if v == 0 {
        return Err(CommandError::Usage(format!("--{name} must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimitArgs {
    /// Largest number of coset rows any enumeration may allocate.
    #[arg(long, default_value_t = 200_000)]
    pub max_cosets: usize,
    /// Wall-clock limit per enumeration, in milliseconds.
    #[arg(long)]
    pub time_limit_ms: Option<u64>,
}

impl LimitArgs {
    pub fn limits(&self) -> Result<EnumLimits, CommandError> {
        positive("max-cosets", self.max_cosets)?;
        let mut l = EnumLimits::new(self.max_cosets);
        if let Some(ms) = self.time_limit_ms {
            positive("time-limit-ms", ms as usize)?;
            l = l.with_time(Duration::from_millis(ms));
        }
        Ok(l)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CosetEnumArgs {
    /// Presentation file (`gens: ...` / `rels: ...`).
    #[arg(long)]
    pub presentation: PathBuf,
    /// Subgroup generators, one word per line or comma separated.
    /// Omitted means the trivial subgroup.
    #[arg(long)]
    pub subgroup: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitArgs,
    /// Include the full table in the report.
    #[arg(long)]
    pub table: bool,
}

pub fn coset_enum(args: &CosetEnumArgs) -> CommandResult {
    let pr = load_presentation(&args.presentation)?;
    let sub = load_subgroup(&pr, args.subgroup.as_deref())?;
    let e = enumerate(&pr, &sub, args.limits.limits()?)?;
    let transversal: Vec<String> = e.table.transversal().reps.iter().map(|w| pr.format_word(w)).collect();
    let mut report = json!({
        "index": e.table.index(),
        "stats": e.stats,
        "transversal": transversal,
    });
    if args.table {
        let rows: Vec<&[u32]> = (0..e.table.n_cosets()).map(|c| e.table.row(c)).collect();
        report["table"] = json!(rows);
    }
    Ok((report, Outcome::Pass))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SubgroupPresentationArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    #[arg(long)]
    pub subgroup: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitArgs,
    /// Skip Tietze simplification.
    #[arg(long)]
    pub raw: bool,
    /// Maximum number of Tietze moves.
    #[arg(long, default_value_t = TIETZE_BUDGET)]
    pub tietze_budget: usize,
}

pub fn subgroup_presentation_cmd(args: &SubgroupPresentationArgs) -> CommandResult {
    let pr = load_presentation(&args.presentation)?;
    let sub = load_subgroup(&pr, args.subgroup.as_deref())?;
    let table = enumerate(&pr, &sub, args.limits.limits()?)?.table;
    let mut sp = subgroup_presentation(&pr, &table)?;
    if !args.raw {
        sp = tietze_simplify(&sp, args.tietze_budget);
    }
    let q = &sp.presentation;
    let ambient: Vec<Value> = q
        .alphabet()
        .names()
        .iter()
        .zip(sp.ambient_words())
        .map(|(n, w)| json!({"generator": n, "word": pr.format_word(&w)}))
        .collect();
    let report = json!({
        "index": table.index(),
        "schreier_rank": schreier_rank(pr.ngens() as u64, table.index() as u64),
        "generators": q.ngens(),
        "relators": q.relators().len(),
        "relator_lengths": sp.relator_lengths(),
        "presentation": q.to_string(),
        "ambient": ambient,
        "simplified": sp.simplified,
        "tietze_steps": sp.tietze_steps,
    });
    let outcome = if args.raw || sp.simplified { Outcome::Pass } else { Outcome::Inconclusive };
    Ok((report, outcome))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PSeriesArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    #[arg(long)]
    pub prime: u32,
    /// Deepest level `t` to compute.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[command(flatten)]
    pub limits: LimitArgs,
    /// Also report the first level not containing this word (repeatable).
    #[arg(long = "word")]
    pub words: Vec<String>,
}

pub fn p_series(args: &PSeriesArgs) -> CommandResult {
    let pr = load_presentation(&args.presentation)?;
    let words: Vec<Word> = args.words.iter().map(|w| pr.word(w)).collect::<cgt_core::Result<_>>()?;
    let mut ladder = DeltaLadder::new(&pr, args.prime, args.limits.limits()?)?;
    let series = ladder.orders(args.depth);
    let mut outcome = if series.truncated { Outcome::Inconclusive } else { Outcome::Pass };
    let mut memberships = Vec::new();
    for (text, w) in args.words.iter().zip(&words) {
        let m = ladder.membership(w)?;
        if matches!(m, Membership::Undecided { .. }) {
            outcome = Outcome::Inconclusive;
        }
        memberships.push(json!({"word": text, "membership": m}));
    }
    Ok((json!({"series": series, "membership": memberships}), outcome))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OmegaRunArgs {
    /// Base group; defaults to the free group on `a, b`.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    /// Generators of N; omitted means N is the whole group.
    #[arg(long)]
    pub subgroup: Option<PathBuf>,
    /// Schedule file (`candidate m [s_override]` per line); defaults to the
    /// demonstration schedule.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Branch bits, e.g. `01`.
    #[arg(long, default_value = "00")]
    pub bits: String,
    #[arg(long, default_value_t = 2)]
    pub prime: u32,
    /// Depth of the final series report (default: the final q).
    #[arg(long)]
    pub depth: Option<usize>,
    #[command(flatten)]
    pub limits: LimitArgs,
    /// At every step, also build the sibling branch and compare layer
    /// orders at the recorded level.
    #[arg(long)]
    pub siblings: bool,
}

pub fn omega_run(args: &OmegaRunArgs) -> CommandResult {
    let pr = match &args.presentation {
        Some(p) => load_presentation(p)?,
        None => cgt_core::omega::demo_instance().0,
    };
    let sub = load_subgroup(&pr, args.subgroup.as_deref())?;
    let schedule_text = match &args.schedule {
        Some(p) => read(p)?,
        None => DEMO_SCHEDULE.to_string(),
    };
    let schedule = parse_schedule(&schedule_text, pr.alphabet())?;
    let bits = parse_bits(&args.bits)?;
    let limits = args.limits.limits()?;
    let run = run_omega(&pr, &sub, args.prime, &bits, &schedule, limits, args.depth)?;
    let mut outcome = if run.report.truncated { Outcome::Inconclusive } else { Outcome::Pass };
    let mut report = json!({"run": run});
    if args.siblings {
        let mut rows = Vec::new();
        for (k, (&bit, entry)) in bits.iter().zip(&schedule).enumerate() {
            let parent = &run.states[k];
            let (s0, _) = branch_step(parent, 0, entry, args.prime, limits)?;
            let (s1, _) = branch_step(parent, 1, entry, args.prime, limits)?;
            let d = divergence_check(&s0, &s1, args.prime, limits)?;
            if d.inconclusive.is_some() {
                outcome = outcome.max_severity(Outcome::Inconclusive);
            } else if !d.strict {
                outcome = Outcome::Fail;
            }
            rows.push(json!({"step": k + 1, "taken": bit, "divergence": d}));
        }
        report["siblings"] = json!(rows);
    }
    Ok((report, outcome))
}

impl Outcome {
    fn max_severity(self, other: Outcome) -> Outcome {
        if self == Outcome::Fail || other == Outcome::Fail {
            Outcome::Fail
        } else if self == Outcome::Inconclusive || other == Outcome::Inconclusive {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupChoice {
    /// Orientation-preserving subgroup on `x = ab`, `y = bc`.
    Rotation,
    /// Full reflection group on `a, b, c`.
    Reflection,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TriangleLabArgs {
    /// Angles as `p,q,r`.
    #[arg(long, default_value = "2,4,8")]
    pub spec: String,
    #[arg(long, value_enum, default_value_t = GroupChoice::Rotation)]
    pub group: GroupChoice,
    #[arg(long, default_value_t = 8)]
    pub radius: usize,
    /// Identity and dedup tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Cap for the torsion profile.
    #[arg(long, default_value_t = 16)]
    pub max_order: u32,
    /// Number of sampled triangles (0 skips the estimate).
    #[arg(long, default_value_t = 0)]
    pub slimness_samples: usize,
    /// Periodic word to fit quasigeodesic constants for.
    #[arg(long)]
    pub quasifit: Option<String>,
    #[arg(long, default_value_t = 8)]
    pub max_power: usize,
    /// Cap on the additive constant (default `2·|B|`).
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Element to scan for periodic paths near its geodesic.
    #[arg(long)]
    pub aperiodic: Option<String>,
    #[arg(long = "Lambda", alias = "lambda", default_value_t = 0)]
    pub lambda: usize,
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    #[arg(long, default_value_t = 4)]
    pub period_cap: usize,
    /// Write the ball as a tab-separated adjacency list.
    #[arg(long)]
    pub export_ball: Option<PathBuf>,
}

pub fn triangle_lab(args: &TriangleLabArgs, seed: u64) -> CommandResult {
    let spec = TriangleGroupSpec::parse(&args.spec)?;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(CommandError::Usage("--tol must be positive".into()));
    }
    let refl = build_reflections(spec)?;
    let tol = args.tol;
    let [a, b, c] = refl;
    let residuals = relation_residuals(spec, &refl);
    let orders = [(a * b).order(args.max_order, tol), (b * c).order(args.max_order, tol), (a * c).order(args.max_order, tol)];
    let ball = match args.group {
        GroupChoice::Rotation => rotation_ball(spec, args.radius, tol)?,
        GroupChoice::Reflection => reflection_ball(spec, args.radius, tol)?,
    };
    let torsion = torsion_profile(&ball, args.max_order, tol);
    let mut report = json!({
        "spec": spec,
        "relation_residuals": residuals,
        "generator_orders": {"ab": orders[0], "bc": orders[1], "ac": orders[2]},
        "ball": {"radius": ball.radius, "vertices": ball.len(), "edges": ball.edges().count()},
        "torsion": torsion,
    });
    if let Some(path) = &args.export_ball {
        let mut text = String::from("# vertex\tword\tgenerator\tvertex\n");
        for (v, w, g, u) in ball.adjacency() {
            text.push_str(&format!("{v}\t{w}\t{g}\t{u}\n"));
        }
        std::fs::write(path, text).map_err(|source| CommandError::Io { path: path.clone(), source })?;
    }
    if args.slimness_samples > 0 {
        report["slimness"] = json!(empirical_slimness(&ball, args.slimness_samples, seed));
    }
    if let Some(text) = &args.quasifit {
        let w = ball.alphabet.parse_word(text)?;
        report["quasifit"] = json!(quasigeodesic_fit(&ball, &w, args.max_power, args.c_max)?);
    }
    let mut outcome = Outcome::Pass;
    if let Some(text) = &args.aperiodic {
        let w = ball.alphabet.parse_word(text)?;
        let verdict = aperiodicity_scan(&ball, &w, args.lambda, args.t, args.period_cap)?;
        if matches!(verdict, cgt_hyperbolic::Aperiodicity::Undecided { .. }) {
            outcome = Outcome::Inconclusive;
        }
        report["aperiodic"] = json!(verdict);
    }
    if residuals.iter().any(|&r| r > 1e-9) {
        outcome = Outcome::Fail;
    }
    Ok((report, outcome))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeControl {
    /// `(xy)^7` in place of `(xy)^8`.
    WrongRelator,
    /// `x*y^2` in place of `[x,y^3]`.
    WrongGenerator,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WiegoldArgs {
    #[arg(long, default_value_t = 200_000)]
    pub max_cosets: usize,
    /// Radius of the ball used for the torsion cross-check.
    #[arg(long, default_value_t = 8)]
    pub radius: usize,
    /// Run a mutated input instead of the real one.
    #[arg(long, value_enum)]
    pub negative_control: Option<NegativeControl>,
}

pub fn wiegold_verify(args: &WiegoldArgs) -> Result<(Value, Outcome, String), CommandError> {
    positive("max-cosets", args.max_cosets)?;
    let input = match args.negative_control {
        None => ChainInput::default(),
        Some(NegativeControl::WrongRelator) => ChainInput::wrong_relator(),
        Some(NegativeControl::WrongGenerator) => ChainInput::wrong_generator(),
    };
    let report = run_chain(&input, EnumLimits::new(args.max_cosets), args.radius);
    let outcome = match report.verdict {
        Verdict::Pass => Outcome::Pass,
        Verdict::Fail => Outcome::Fail,
        Verdict::Incomplete => Outcome::Inconclusive,
    };
    Ok((json!(report), outcome, report.render()))
}
