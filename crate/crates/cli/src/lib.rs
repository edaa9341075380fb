//! Batch front end for `recgame-core`: loads or generates a game, runs one
//! analysis, and writes a deterministic CSV or JSON report.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when the analysis hits a
//! limitation (no pure equilibrium, enumeration cap, dynamics that do not
//! settle). Failures print a one-line JSON reason on stderr.

pub mod report;
pub mod reproduce;

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use recgame_core::dynamics::find_deviation_cycle;
use recgame_core::generators::{
    gen_example1, gen_impossibility, gen_prop6, gen_prop7, gen_tight_poa, random_game, RandomGameConfig,
};
use recgame_core::upoa::{min_utility_curve_with, SolveOptions};
use recgame_core::{
    check_axioms, display_distribution, enumerate_pne, payoff_vector, price_of_anarchy, sampler_fit,
    shapley_distribution, sorted_levels, user_price_of_anarchy, AnyGame, Axiom, DynamicsConfig, Error, Game,
    MediatorKind, PoAResult, Rational, ResponseRule, Scalar, Schedule, StrategyProfile, UtilityConfig,
    DEFAULT_ENUMERATION_CAP,
};

use report::{Cell, Format, Report};
use reproduce::{reproduce_paper, ReproduceOptions};

/// A failed run: exit status plus a machine-readable reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub reason: &'static str,
    pub message: String,
}

impl Failure {
    pub fn invalid(reason: &'static str, message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            reason,
            message: message.into(),
        }
    }

    pub fn limitation(reason: &'static str, message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            reason,
            message: message.into(),
        }
    }

    /// `{"exit_code": …, "reason": …, "message": …}` on one line.
    pub fn to_json(&self) -> String {
        json!({"exit_code": self.code, "reason": self.reason, "message": self.message}).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.reason, self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let reason = match &e {
            Error::CapExceeded { .. } => return Failure::limitation("cap_exceeded", e.to_string()),
            Error::Schema { .. }
            | Error::SatisfactionOutOfRange { .. }
            | Error::UnknownItem { .. }
            | Error::UnknownUser { .. }
            | Error::EmptyMenu { .. }
            | Error::BudgetOutOfRange { .. }
            | Error::Json(_) => "invalid_game",
            Error::InvalidProfile(_) => "invalid_profile",
            Error::Io(_) | Error::Csv(_) => "io",
            Error::Solver(_) | Error::InfeasibleStationaryPoint { .. } | Error::NotMinimal { .. } => "solver",
            _ => "invalid_argument",
        };
        Failure::invalid(reason, e.to_string())
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::invalid("io", format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "recgame",
    version,
    about = "Recommendation games with strategic content providers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Display probabilities of every user under one profile.
    ///
    /// Columns: user, player, strategy, satisfaction, probability. Each user
    /// ends with a `none` row holding the probability of showing nothing.
    Mediate(MediateArgs),
    /// Compare Shapley-mediator draws with the closed form.
    ///
    /// Columns: user, outcome, count, empirical, closed_form.
    SampleCheck(SampleCheckArgs),
    /// Check the fairness, efficiency and stability axioms.
    ///
    /// Uses the given game, or a pool of random games when none is given.
    /// Columns: mediator, axiom, status, checked, skipped, counterexample.
    Axioms(AxiomsArgs),
    /// Run better- or best-response dynamics.
    ///
    /// Columns: step, player, from, to, payoff_delta, potential_delta.
    /// Exits 2 when no equilibrium is reached within --max-steps moves.
    Dynamics(DynamicsArgs),
    /// Enumerate pure Nash equilibria.
    ///
    /// Columns: profile, welfare, payoff_<player>... Exits 2 when there is none.
    Pne(AnalysisArgs),
    /// Price of anarchy (expected displays).
    ///
    /// Columns: game_id, mediator, metric, optimum, worst_eq, ratio,
    /// optimum_profile, worst_eq_profile, equilibria.
    Poa(AnalysisArgs),
    /// User price of anarchy (expected user satisfaction).
    ///
    /// Columns as for `poa`.
    Upoa(UpoaArgs),
    /// Minimum single-user utility of the Shapley mediator for N = 1..n-max.
    ///
    /// Columns: N, U_star, upoa_bound, residual.
    UpoaCurve(CurveArgs),
    /// Write a generated game as a JSON game file.
    Generate(GenerateArgs),
    /// Recompute every published example and bound.
    ///
    /// Columns: id, claim, expected, observed, status. Exits 1 on any mismatch.
    ReproducePaper(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorName {
    /// The three-user, two-player running example.
    Example1,
    /// Cyclic instance without equilibria under TOP/BTL (--x, --y).
    Impossibility,
    /// Star instance attaining the PoA bound (--n).
    TightPoa,
    /// One user, one player (--eps).
    Prop6,
    /// Instance with a bad TOP equilibrium (--delta, --eps).
    Prop7,
    /// Random game drawn with --seed.
    Random,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// JSON game file.
    #[arg(long, value_name = "PATH", conflicts_with = "generator")]
    pub game: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorName>,
    /// impossibility: satisfaction x (default 0.9).
    #[arg(long)]
    pub x: Option<String>,
    /// impossibility: satisfaction y (default 0.5).
    #[arg(long)]
    pub y: Option<String>,
    /// tight-poa: number of players (default 3).
    #[arg(long)]
    pub n: Option<usize>,
    /// prop6 (default 0.01) and prop7 (default 0.005).
    #[arg(long)]
    pub eps: Option<String>,
    /// prop7 (default 0.01).
    #[arg(long)]
    pub delta: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MediateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "shapley")]
    pub mediator: MediatorKind,
    /// Comma-separated strategy labels, one per player.
    #[arg(long)]
    pub profile: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleCheckArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub profile: String,
    /// Draws per user.
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AxiomsArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Mediator to check; all five when omitted.
    #[arg(long)]
    pub mediator: Option<MediatorKind>,
    /// Size of the random pool used when no game is given.
    #[arg(long, default_value_t = 200)]
    pub games: usize,
    /// Random profiles per game.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "shapley")]
    pub mediator: MediatorKind,
    /// Initial profile; every player's first strategy when omitted.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long, default_value = "round-robin")]
    pub schedule: Schedule,
    #[arg(long, default_value = "better")]
    pub rule: ResponseRule,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "shapley")]
    pub mediator: MediatorKind,
    /// Largest profile space to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct UpoaArgs {
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Utility of showing nothing, in [0,1].
    #[arg(long, default_value = "0")]
    pub plain: String,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    /// Random monotone vectors per N for the minimality check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Largest N of the utility curve.
    #[arg(long, default_value_t = 1000)]
    pub n_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `--out` or to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(stdout, "{}", e.render()).map_err(|e| Failure::invalid("io", e.to_string()))?;
            return Ok(());
        }
        Err(e) => return Err(Failure::invalid("usage", e.render().to_string().trim_end())),
    };
    execute(cli.command, stdout)
}

macro_rules! with_game {
    ($game:expr, |$g:ident| $body:expr) => {
        match $game {
            AnyGame::Exact($g) => $body,
            AnyGame::Float($g) => $body,
        }
    };
}

/// A report plus a failure to raise after it has been written.
type Outcome = (Report, Option<Failure>);

pub fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (outcome, output) = match command {
        Command::Mediate(a) => {
            let (id, game) = load_game(&a.game, a.output.seed)?;
            (with_game!(game, |g| mediate(&id, &g, &a)), a.output)
        }
        Command::SampleCheck(a) => {
            let (id, game) = load_game(&a.game, a.output.seed)?;
            (with_game!(game, |g| sample_check(&id, &g, &a)), a.output)
        }
        Command::Axioms(a) => {
            let outcome = if game_given(&a.game) {
                let (id, game) = load_game(&a.game, a.output.seed)?;
                with_game!(game, |g| axioms(&id, std::slice::from_ref(&g), &a))
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(a.output.seed);
                let pool: Vec<Game<Rational>> = (0..a.games)
                    .map(|_| random_game(&mut rng, &RandomGameConfig::default()))
                    .collect();
                axioms(&format!("random pool of {}", a.games), &pool, &a)
            };
            (outcome, a.output)
        }
        Command::Dynamics(a) => {
            let (id, game) = load_game(&a.game, a.output.seed)?;
            (with_game!(game, |g| dynamics(&id, &g, &a)), a.output)
        }
        Command::Pne(a) => {
            let (id, game) = load_game(&a.game, a.output.seed)?;
            (with_game!(game, |g| pne(&id, &g, &a)), a.output)
        }
        Command::Poa(a) => {
            let (id, game) = load_game(&a.game, a.output.seed)?;
            let outcome = with_game!(game, |g| price_of_anarchy(&g, a.mediator, a.cap)
                .map_err(Failure::from)
                .map(|res| poa_report("poa", &id, &g, &a, res)));
            (outcome, a.output)
        }
        Command::Upoa(a) => {
            let (id, game) = load_game(&a.analysis.game, a.analysis.output.seed)?;
            let plain = parse_unit("--plain", &a.plain)?;
            let outcome = with_game!(game, |g| {
                UtilityConfig::new(to_scalar(plain))
                    .and_then(|cfg| user_price_of_anarchy(&g, a.analysis.mediator, &cfg, a.analysis.cap))
                    .map_err(Failure::from)
                    .map(|res| {
                        let (mut rep, fail) = poa_report("upoa", &id, &g, &a.analysis, res);
                        rep.meta.insert(1, ("plain".into(), Cell::scalar(&plain)));
                        (rep, fail)
                    })
            });
            (outcome, a.analysis.output)
        }
        Command::UpoaCurve(a) => (curve(&a), a.output),
        Command::Generate(a) => return generate(&a, stdout),
        Command::ReproducePaper(a) => (Ok(reproduce(&a)), a.output),
    };
    let (report, failure) = outcome?;
    write_report(&report, &output, stdout)?;
    failure.map_or(Ok(()), Err)
}

fn write_report(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            let mut w = BufWriter::new(file);
            report.render(output.format, &mut w).map_err(|e| io_failure(path, e))?;
            w.flush().map_err(|e| io_failure(path, e))
        }
        None => report
            .render(output.format, stdout)
            .map_err(|e| Failure::invalid("io", e.to_string())),
    }
}

fn game_given(a: &GameArgs) -> bool {
    a.game.is_some() || a.generator.is_some()
}

/// Parses a satisfaction-like parameter as an exact value in `(0,1]` or `[0,1]`.
fn parse_unit(flag: &str, text: &str) -> Result<Rational, Failure> {
    let v: Rational = text
        .parse()
        .map_err(|e| Failure::invalid("invalid_argument", format!("{flag}: {e}")))?;
    if v < Rational::new(0, 1) || v > Rational::new(1, 1) {
        return Err(Failure::invalid(
            "invalid_argument",
            format!("{flag}: {v} outside [0,1]"),
        ));
    }
    Ok(v)
}

fn to_scalar<S: Scalar>(v: Rational) -> S {
    S::from_ratio(v.numer() as i64, v.denom() as i64)
}

/// Loads `--game` or builds `--generator`; returns a game id for reports.
pub fn load_game(a: &GameArgs, seed: u64) -> Result<(String, AnyGame), Failure> {
    let used: Vec<&str> = [
        ("--x", a.x.is_some()),
        ("--y", a.y.is_some()),
        ("--n", a.n.is_some()),
        ("--eps", a.eps.is_some()),
        ("--delta", a.delta.is_some()),
    ]
    .into_iter()
    .filter_map(|(flag, set)| set.then_some(flag))
    .collect();
    let allowed: &[&str] = match a.generator {
        Some(GeneratorName::Impossibility) => &["--x", "--y"],
        Some(GeneratorName::TightPoa) => &["--n"],
        Some(GeneratorName::Prop6) => &["--eps"],
        Some(GeneratorName::Prop7) => &["--delta", "--eps"],
        _ => &[],
    };
    if let Some(flag) = used.iter().find(|f| !allowed.contains(f)) {
        return Err(Failure::invalid(
            "invalid_argument",
            format!("{flag} does not apply to this game source"),
        ));
    }
    let param =
        |flag: &str, value: &Option<String>, default: &str| parse_unit(flag, value.as_deref().unwrap_or(default));

    if let Some(path) = &a.game {
        let bytes = std::fs::read(path).map_err(|e| io_failure(path, e))?;
        let game = recgame_core::parse_game(&bytes).map_err(|e| {
            let f = Failure::from(e);
            Failure {
                message: format!("{}: {}", path.display(), f.message),
                ..f
            }
        })?;
        let id = path
            .file_stem()
            .map_or_else(|| "game".into(), |s| s.to_string_lossy().into_owned());
        return Ok((id, game));
    }
    let (id, game): (String, AnyGame) = match a.generator {
        None => return Err(Failure::invalid("usage", "one of --game or --generator is required")),
        Some(GeneratorName::Example1) => ("example1".into(), gen_example1().into()),
        Some(GeneratorName::Impossibility) => {
            let (x, y) = (param("--x", &a.x, "0.9")?, param("--y", &a.y, "0.5")?);
            (format!("impossibility(x={x},y={y})"), gen_impossibility(x, y)?.into())
        }
        Some(GeneratorName::TightPoa) => {
            let n = a.n.unwrap_or(3);
            (format!("tight-poa(n={n})"), gen_tight_poa::<Rational>(n)?.into())
        }
        Some(GeneratorName::Prop6) => {
            let eps = param("--eps", &a.eps, "0.01")?;
            (format!("prop6(eps={eps})"), gen_prop6(eps)?.into())
        }
        Some(GeneratorName::Prop7) => {
            let (delta, eps) = (param("--delta", &a.delta, "0.01")?, param("--eps", &a.eps, "0.005")?);
            (format!("prop7(delta={delta},eps={eps})"), gen_prop7(delta, eps)?.into())
        }
        Some(GeneratorName::Random) => (
            format!("random(seed={seed})"),
            random_game(&mut ChaCha8Rng::seed_from_u64(seed), &RandomGameConfig::default()).into(),
        ),
    };
    Ok((id, game))
}

fn game_meta(rep: &mut Report, id: &str) {
    rep.meta("game", Cell::text(id));
}

fn mediate<S: Scalar>(id: &str, g: &Game<S>, a: &MediateArgs) -> Result<Outcome, Failure> {
    let x = g.parse_profile(&a.profile)?;
    let mut rep = Report::new(
        "mediate",
        a.output.seed,
        ["user", "player", "strategy", "satisfaction", "probability"],
    );
    game_meta(&mut rep, id);
    rep.meta("mediator", Cell::text(a.mediator.name()));
    rep.meta("profile", Cell::text(g.profile_label(&x)));
    let pv = payoff_vector(g, a.mediator, &x);
    for (p, payoff) in g.players().iter().zip(&pv.payoffs) {
        rep.meta(format!("payoff_{}", p.name), Cell::scalar(payoff));
    }
    rep.meta("welfare", Cell::scalar(&pv.welfare));
    for u in 0..g.num_users() {
        let d = display_distribution(g, a.mediator, &x, u);
        let sats = g.profile_sats(&x, u);
        let user = &g.users()[u];
        for (j, p) in g.players().iter().enumerate() {
            rep.push(vec![
                Cell::text(user),
                Cell::text(&p.name),
                Cell::text(g.strategy_label(j, x.0[j])),
                Cell::scalar(&sats[j]),
                Cell::scalar(&d.per_player[j]),
            ]);
        }
        rep.push(vec![
            Cell::text(user),
            Cell::text("none"),
            Cell::empty(),
            Cell::empty(),
            Cell::scalar(&d.none_prob),
        ]);
    }
    Ok((rep, None))
}

fn sample_check<S: Scalar>(id: &str, g: &Game<S>, a: &SampleCheckArgs) -> Result<Outcome, Failure> {
    if a.draws == 0 {
        return Err(Failure::invalid("invalid_argument", "--draws must be positive"));
    }
    let x = g.parse_profile(&a.profile)?;
    let mut rep = Report::new(
        "sample-check",
        a.output.seed,
        ["user", "outcome", "count", "empirical", "closed_form"],
    );
    game_meta(&mut rep, id);
    rep.meta("profile", Cell::text(g.profile_label(&x)));
    rep.meta("draws", Cell::int(a.draws));
    let mut rng = ChaCha8Rng::seed_from_u64(a.output.seed);
    let mut worst_tv = 0.0f64;
    let mut worst_none = 0.0f64;
    for u in 0..g.num_users() {
        let levels = sorted_levels(g, &x, u);
        let fit = sampler_fit(&levels, a.draws, &mut rng);
        let exact = shapley_distribution(&levels).outcome_probs();
        let names = g.players().iter().map(|p| p.name.as_str()).chain(["none"]);
        for (k, name) in names.enumerate() {
            rep.push(vec![
                Cell::text(&g.users()[u]),
                Cell::text(name),
                Cell::int(fit.counts[k]),
                Cell::float(fit.empirical[k]),
                Cell::scalar(&exact[k]),
            ]);
        }
        worst_tv = worst_tv.max(fit.total_variation);
        worst_none = worst_none.max(fit.none_gap);
    }
    rep.meta("max_total_variation", Cell::float(worst_tv));
    rep.meta("max_none_gap", Cell::float(worst_none));
    Ok((rep, None))
}

fn axioms<S: Scalar>(id: &str, pool: &[Game<S>], a: &AxiomsArgs) -> Result<Outcome, Failure> {
    let mut rep = Report::new(
        "axioms",
        a.output.seed,
        ["mediator", "axiom", "status", "checked", "skipped", "counterexample"],
    );
    game_meta(&mut rep, id);
    rep.meta("trials", Cell::int(a.trials as u64));
    let kinds: Vec<MediatorKind> = a.mediator.map_or_else(|| MediatorKind::ALL.to_vec(), |k| vec![k]);
    for kind in kinds {
        let mut rng = ChaCha8Rng::seed_from_u64(a.output.seed);
        let report = check_axioms(kind, pool, a.trials, &mut rng);
        for axiom in Axiom::ALL {
            let o = report.outcome(axiom);
            let witness = o.counterexample.as_ref().map_or_else(Cell::empty, |c| {
                let user = c
                    .user
                    .map(|u| format!(", user {}", c.game.users()[u]))
                    .unwrap_or_default();
                Cell::text(format!(
                    "game {}, profile ({}){user}: {}",
                    c.game_index,
                    c.game.profile_label(&c.profile),
                    c.detail
                ))
            });
            rep.push(vec![
                Cell::text(kind.name()),
                Cell::text(axiom.name()),
                Cell::text(if o.passed() { "pass" } else { "fail" }),
                Cell::int(o.checked as u64),
                Cell::int(o.skipped as u64),
                witness,
            ]);
        }
    }
    Ok((rep, None))
}

fn dynamics<S: Scalar>(id: &str, g: &Game<S>, a: &DynamicsArgs) -> Result<Outcome, Failure> {
    let start = match &a.profile {
        Some(p) => g.parse_profile(p)?,
        None => StrategyProfile(vec![0; g.num_players()]),
    };
    let cfg = DynamicsConfig {
        schedule: a.schedule,
        rule: a.rule,
        seed: a.output.seed,
        max_steps: a.max_steps,
    };
    let trace = recgame_core::run_dynamics(g, a.mediator, &start, &cfg)?;
    let mut rep = Report::new(
        "dynamics",
        a.output.seed,
        ["step", "player", "from", "to", "payoff_delta", "potential_delta"],
    );
    game_meta(&mut rep, id);
    rep.meta("mediator", Cell::text(a.mediator.name()));
    rep.meta("schedule", Cell::text(a.schedule.to_string()));
    rep.meta("initial", Cell::text(g.profile_label(&trace.initial)));
    rep.meta("terminal", Cell::text(g.profile_label(&trace.terminal)));
    rep.meta("converged", Cell::flag(trace.converged));
    rep.meta("steps", Cell::int(trace.step_count() as u64));
    for (k, s) in trace.steps.iter().enumerate() {
        rep.push(vec![
            Cell::int(k as u64 + 1),
            Cell::text(&g.players()[s.player].name),
            Cell::text(g.strategy_label(s.player, s.from)),
            Cell::text(g.strategy_label(s.player, s.to)),
            Cell::scalar(&s.payoff_delta),
            s.potential_delta.as_ref().map_or_else(Cell::empty, Cell::scalar),
        ]);
    }
    let failure = (!trace.converged).then(|| {
        Failure::limitation(
            "not_converged",
            format!(
                "no equilibrium reached within {} improving moves; last profile ({})",
                a.max_steps,
                g.profile_label(&trace.terminal)
            ),
        )
    });
    Ok((rep, failure))
}

fn cycle_text<S: Scalar>(g: &Game<S>, cycle: &Option<Vec<StrategyProfile>>) -> String {
    match cycle {
        Some(c) => {
            let mut steps: Vec<String> = c.iter().map(|x| format!("({})", g.profile_label(x))).collect();
            steps.push(steps[0].clone());
            format!("better-response cycle {}", steps.join(" -> "))
        }
        None => "no better-response cycle found from the first profile".into(),
    }
}

fn pne<S: Scalar>(id: &str, g: &Game<S>, a: &AnalysisArgs) -> Result<Outcome, Failure> {
    let eqs = enumerate_pne(g, a.mediator, a.cap)?;
    let mut columns = vec!["profile".to_string(), "welfare".to_string()];
    columns.extend(g.players().iter().map(|p| format!("payoff_{}", p.name)));
    let mut rep = Report::new("pne", a.output.seed, columns);
    game_meta(&mut rep, id);
    rep.meta("mediator", Cell::text(a.mediator.name()));
    rep.meta("profiles", Cell::int(g.profile_space_size()));
    rep.meta("equilibria", Cell::int(eqs.len() as u64));
    for x in &eqs {
        let pv = payoff_vector(g, a.mediator, x);
        let mut row = vec![Cell::text(g.profile_label(x)), Cell::scalar(&pv.welfare)];
        row.extend(pv.payoffs.iter().map(Cell::scalar));
        rep.push(row);
    }
    let failure = eqs.is_empty().then(|| {
        let steps = g.num_players() * g.profile_space_size().min(1 << 20) as usize + 1;
        let cycle = find_deviation_cycle(g, a.mediator, &g.profile_at(0), steps);
        Failure::limitation(
            "no_pne",
            format!("{} has no pure equilibrium: {}", a.mediator, cycle_text(g, &cycle)),
        )
    });
    Ok((rep, failure))
}

fn poa_report<S: Scalar>(command: &'static str, id: &str, g: &Game<S>, a: &AnalysisArgs, res: PoAResult<S>) -> Outcome {
    let mut rep = Report::new(
        command,
        a.output.seed,
        [
            "game_id",
            "mediator",
            "metric",
            "optimum",
            "worst_eq",
            "ratio",
            "optimum_profile",
            "worst_eq_profile",
            "equilibria",
        ],
    );
    game_meta(&mut rep, id);
    let ratio = match res.ratio.finite() {
        Some(v) => Cell::scalar(&v),
        None => Cell {
            text: "inf".into(),
            json: json!("inf"),
        },
    };
    rep.push(vec![
        Cell::text(id),
        Cell::text(a.mediator.name()),
        Cell::text(res.metric.name()),
        Cell::scalar(&res.optimum),
        res.worst_eq.as_ref().map_or_else(Cell::empty, Cell::scalar),
        ratio,
        Cell::text(g.profile_label(&res.optimum_profile)),
        res.worst_eq_profile
            .as_ref()
            .map_or_else(Cell::empty, |x| Cell::text(g.profile_label(x))),
        Cell::int(res.equilibria as u64),
    ]);
    let failure = (!res.has_equilibrium()).then(|| {
        Failure::limitation(
            "no_pne",
            format!("{} has no pure equilibrium: {}", a.mediator, cycle_text(g, &res.cycle)),
        )
    });
    (rep, failure)
}

fn curve(a: &CurveArgs) -> Result<Outcome, Failure> {
    let opts = SolveOptions {
        minimality_samples: a.samples,
        seed: a.output.seed,
    };
    let points = min_utility_curve_with(a.n_max, &opts)?;
    let mut rep = Report::new("upoa-curve", a.output.seed, ["N", "U_star", "upoa_bound", "residual"]);
    rep.meta("n_max", Cell::int(a.n_max as u64));
    rep.meta("minimality_samples", Cell::int(a.samples as u64));
    let worst = points
        .iter()
        .min_by(|p, q| p.utility.total_cmp(&q.utility))
        .expect("n_max ≥ 1");
    rep.meta("min_U_star", Cell::float(worst.utility));
    rep.meta("argmin_N", Cell::int(worst.players as u64));
    rep.meta("max_upoa_bound", Cell::float(worst.upoa_bound));
    for p in &points {
        rep.push(vec![
            Cell::int(p.players as u64),
            Cell::float(p.utility),
            Cell::float(p.upoa_bound),
            Cell::float(p.residual),
        ]);
    }
    Ok((rep, None))
}

fn generate(a: &GenerateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if !game_given(&a.game) {
        return Err(Failure::invalid("usage", "one of --game or --generator is required"));
    }
    let (_, game) = load_game(&a.game, a.seed)?;
    let text = serde_json::to_string_pretty(&game.to_json()).expect("game JSON serializes") + "\n";
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::invalid("io", e.to_string())),
    }
}

fn reproduce(a: &ReproduceArgs) -> Outcome {
    let rows = reproduce_paper(&ReproduceOptions {
        n_max: a.n_max,
        minimality_samples: a.samples,
        seed: a.output.seed,
        ..ReproduceOptions::default()
    });
    let mut rep = Report::new(
        "reproduce-paper",
        a.output.seed,
        ["id", "claim", "expected", "observed", "status"],
    );
    rep.meta("n_max", Cell::int(a.n_max as u64));
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    rep.meta(
        "passed",
        Cell::text(format!("{}/{}", rows.len() - failed.len(), rows.len())),
    );
    for r in &rows {
        rep.push(vec![
            Cell::text(r.id),
            Cell::text(r.claim),
            Cell::text(&r.expected),
            Cell::text(&r.observed),
            Cell::text(if r.pass { "pass" } else { "FAIL" }),
        ]);
    }
    let failure = (!failed.is_empty())
        .then(|| Failure::invalid("reproduction_mismatch", format!("rows failed: {}", failed.join(", "))));
    (rep, failure)
}
