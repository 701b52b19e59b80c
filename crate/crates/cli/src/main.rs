mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bellgames::corrbox::{
    make_box, stats, validate, BoxSpec, CerecedaSet, FreeParams8, DEFAULT_TOL,
};
use bellgames::fine::{
    bell_values, fine_construct_with, lp_feasible, AlphaRule, FeasibilityVerdict, FineError,
    FineOptions, GammaMode, NotConstructible,
};
use bellgames::gamecore::{
    corner_payoffs, enumerate_nash, grid_bruteforce_nash, hausdorff, MixedProfile, NashSet,
};
use bellgames::paperlab::{audit_identities, describe_set, mp_report_with, pd_report, CheckStatus};
use bellgames::quantum::{born_box, QuantumSetup, QuantumState};
use bellgames::{JointProbBox, Outcome};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bellgames", version, about = "Correlation boxes, Bell tests and games played on them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, validate and summarize boxes.
    #[command(subcommand)]
    Box(BoxCmd),
    /// Bell-system check.
    #[command(subcommand)]
    Bell(BellCmd),
    /// Joint-distribution construction for a local box.
    #[command(subcommand)]
    Fine(FineCmd),
    /// Linear feasibility over deterministic strategies.
    #[command(subcommand)]
    Lp(LpCmd),
    /// Payoffs and equilibria of a 2x2 game played on a box.
    #[command(subcommand)]
    Game(GameCmd),
    /// Boxes from two-qubit measurements.
    #[command(subcommand)]
    Quantum(QuantumCmd),
    /// Reproduction report for the prisoner's dilemma or matching pennies.
    Reproduce(ReproduceArgs),
    /// Check every printed identity against direct computation on one box.
    Audit(AuditArgs),
}

#[derive(Subcommand)]
enum BoxCmd {
    /// Write a box file.
    Gen(GenArgs),
    /// Exit 1 if the box is not a no-signaling probability box.
    Validate {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Marginals, correlations and CHSH sums.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Product,
    Deterministic,
    Cereceda,
    Pr,
    Free,
    RandomLocal,
    RandomNs,
}

#[derive(Args)]
struct GenArgs {
    variant: Variant,
    /// Cereceda set, 1 or 2.
    #[arg(long)]
    set: Option<u8>,
    /// Product marginals `pA1,pA2,pB1,pB2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    marginals: Option<Vec<f64>>,
    /// Deterministic outcomes for A1 A2 B1 B2, e.g. `+-+-`.
    #[arg(long, allow_hyphen_values = true)]
    outcomes: Option<String>,
    /// Free parameters `pA1,pA2,pB1,pB2,p11,p12,p21,p22`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(short)]
    o: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BellCmd {
    /// Exit 1 if any of the eight inequalities is violated.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fine,
    #[value(alias = "paper")]
    Summed,
}

impl From<ModeArg> for GammaMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fine => GammaMode::FineLiteral,
            ModeArg::Summed => GammaMode::SummedMarginals,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphaArg {
    Projection,
    Product,
}

#[derive(Subcommand)]
enum FineCmd {
    /// Build the sixteen-outcome joint distribution.
    Construct {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "fine")]
        gamma_mode: ModeArg,
        #[arg(long, value_enum, default_value = "projection")]
        alpha_rule: AlphaArg,
        /// Reject instead of clamping tiny negative entries.
        #[arg(long)]
        strict: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LpCmd {
    /// Exit 1 if the box is nonlocal.
    Feasible {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum GameCmd {
    Payoff {
        /// `pd`, `mp`, or a game file.
        #[arg(short)]
        g: String,
        #[arg(short)]
        b: PathBuf,
        #[arg(short)]
        x: f64,
        #[arg(short)]
        y: f64,
    },
    Nash {
        #[arg(short)]
        g: String,
        #[arg(short)]
        b: PathBuf,
        /// Also run the grid search with N points per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum QuantumCmd {
    /// Born-rule box for planar measurement directions.
    Box {
        /// `phi+`, `psi-`, `00`, or comma-separated amplitudes on |00>,|01>,|10>,|11>
        /// (four reals or four re,im pairs).
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        /// Angles in degrees for A1, A2, B1, B2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        angles: Vec<f64>,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Pd,
    Mp,
}

#[derive(Args)]
struct ReproduceArgs {
    which: Which,
    /// Number of random boxes.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(short)]
    b: PathBuf,
    #[arg(short)]
    g: String,
    #[arg(long)]
    json: bool,
}

enum Failure {
    /// Negative verdict; the message has already been printed.
    Negative,
    Usage(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

fn tolerance() -> Result<f64, Failure> {
    match std::env::var("BELLGAMES_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| Failure::Usage(anyhow!("BELLGAMES_TOL={s:?} is not a nonnegative number"))),
    }
}

fn emit(text: &str, path: Option<&Path>) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> CmdResult {
    println!("{}", serde_json::to_string_pretty(v).map_err(|e| Failure::Solver(e.into()))?);
    Ok(())
}

/// Loads a box and rejects it with exit 1 when it is not valid.
fn load_valid(path: &Path, tol: f64) -> Result<JointProbBox, Failure> {
    let b = files::read_box(path)?;
    let report = validate(&b, tol).map_err(|e| Failure::Usage(e.into()))?;
    if !report.valid {
        eprintln!("invalid box: {}", report.summary());
        return Err(Failure::Negative);
    }
    Ok(b)
}

fn fmt(v: f64) -> String {
    // avoid printing "-0"
    format!("{}", v + 0.0)
}

fn exactly<const N: usize>(name: &str, v: Vec<f64>) -> anyhow::Result<[f64; N]> {
    let n = v.len();
    v.try_into()
        .map_err(|_| anyhow!("--{name} takes {N} comma-separated numbers, got {n}"))
}

fn parse_outcomes(s: &str) -> anyhow::Result<[Outcome; 4]> {
    let v: Vec<Outcome> = s.chars().filter_map(Outcome::from_char).collect();
    if v.len() != 4 || s.chars().count() != 4 {
        anyhow::bail!("expected four of '+'/'-', got {s:?}");
    }
    Ok([v[0], v[1], v[2], v[3]])
}

fn cmd_box(cmd: BoxCmd, tol: f64) -> CmdResult {
    match cmd {
        BoxCmd::Gen(a) => {
            let need = |name: &str| anyhow!("variant needs --{name}");
            let spec = match a.variant {
                Variant::Product => {
                    BoxSpec::Product(exactly("marginals", a.marginals.ok_or_else(|| need("marginals"))?)?)
                }
                Variant::Deterministic => {
                    BoxSpec::Deterministic(parse_outcomes(&a.outcomes.ok_or_else(|| need("outcomes"))?)?)
                }
                Variant::Cereceda => {
                    let n = a.set.ok_or_else(|| need("set"))?;
                    BoxSpec::Cereceda(
                        CerecedaSet::from_number(n).ok_or_else(|| anyhow!("--set must be 1 or 2"))?,
                    )
                }
                Variant::Pr => BoxSpec::Pr,
                Variant::Free => {
                    let p: [f64; 8] = exactly("params", a.params.ok_or_else(|| need("params"))?)?;
                    BoxSpec::FromFreeParams(FreeParams8 {
                        pa: [p[0], p[1]],
                        pb: [p[2], p[3]],
                        pp: [[p[4], p[5]], [p[6], p[7]]],
                    })
                }
                Variant::RandomLocal => BoxSpec::RandomLocal(a.seed.ok_or_else(|| need("seed"))?),
                Variant::RandomNs => BoxSpec::RandomNoSignaling(a.seed.ok_or_else(|| need("seed"))?),
            };
            let b = make_box(spec).map_err(|e| Failure::Usage(e.into()))?;
            emit(&files::render_box(&b), a.o.as_deref())
        }
        BoxCmd::Validate { file, tol: t } => {
            let b = files::read_box(&file)?;
            let report = validate(&b, t.unwrap_or(tol)).map_err(|e| Failure::Usage(e.into()))?;
            println!("{}", report.summary());
            if report.valid {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
        BoxCmd::Stats { file, json } => {
            let b = load_valid(&file, tol)?;
            let st = stats(&b, tol).map_err(|e| Failure::Usage(e.into()))?;
            if json {
                return print_json(&st);
            }
            println!("P(A1) = {}  P(A2) = {}", fmt(st.pa[0]), fmt(st.pa[1]));
            println!("P(B1) = {}  P(B2) = {}", fmt(st.pb[0]), fmt(st.pb[1]));
            for i in 0..2 {
                for j in 0..2 {
                    println!("E{}{} = {}", i + 1, j + 1, fmt(st.e[i][j]));
                }
            }
            println!("max |CHSH| = {}", fmt(st.chsh_max_abs));
            Ok(())
        }
    }
}

fn cmd_bell(cmd: BellCmd, tol: f64) -> CmdResult {
    let BellCmd::Check { file, json } = cmd;
    let b = load_valid(&file, tol)?;
    let r = bell_values(&b, tol).map_err(|e| Failure::Usage(e.into()))?;
    if json {
        print_json(&r)?;
    } else {
        for (n, (idx, side, slack)) in r.inequality_slacks().iter().enumerate() {
            let bound = match side {
                bellgames::fine::BellSide::Lower => ">= -1",
                bellgames::fine::BellSide::Upper => "<= 0",
            };
            let mark = if *slack < -tol { "VIOLATED" } else { "ok" };
            println!(
                "inequality {}: X{idx} = {} {bound}  {mark}",
                n + 1,
                fmt(r.value(*idx))
            );
        }
        for v in &r.violations {
            println!("violated: X{} {} side, value {}", v.index, v.side, fmt(v.value));
        }
        println!("{}", if r.satisfied { "local" } else { "Bell system violated" });
    }
    if r.satisfied {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn cmd_fine(cmd: FineCmd, tol: f64) -> CmdResult {
    let FineCmd::Construct { file, gamma_mode, alpha_rule, strict, o } = cmd;
    let b = load_valid(&file, tol)?;
    let mut opts = FineOptions::new(gamma_mode.into()).tol(tol).alpha_rule(match alpha_rule {
        AlphaArg::Projection => AlphaRule::FeasibleProjection,
        AlphaArg::Product => AlphaRule::GammaTimesMarginal,
    });
    if strict {
        opts = opts.strict();
    }
    match fine_construct_with(&b, opts) {
        Ok(c) => {
            let text = serde_json::to_string_pretty(&c).map_err(|e| Failure::Solver(e.into()))?;
            emit(&format!("{text}\n"), o.as_deref())
        }
        Err(FineError::NotConstructible(nc)) => {
            match nc {
                NotConstructible::BellViolated { violations } => {
                    for v in violations {
                        eprintln!("violated: X{} {} side, value {}", v.index, v.side, fmt(v.value));
                    }
                }
                other => eprintln!("not constructible: {other}"),
            }
            Err(Failure::Negative)
        }
        Err(FineError::Solver(s)) => Err(Failure::Solver(anyhow!(s))),
        Err(e) => Err(Failure::Solver(e.into())),
    }
}

fn cmd_lp(cmd: LpCmd, tol: f64) -> CmdResult {
    let LpCmd::Feasible { file, json } = cmd;
    let b = load_valid(&file, tol)?;
    let verdict = lp_feasible(&b, tol).map_err(|e| match e {
        FineError::Box(e) => Failure::Usage(e.into()),
        e => Failure::Solver(e.into()),
    })?;
    if json {
        print_json(&verdict)?;
    } else {
        match &verdict {
            FeasibilityVerdict::Local { weights } => {
                println!("local");
                let strategies = bellgames::corrbox::deterministic_strategies();
                for (w, s) in weights.iter().zip(strategies) {
                    if *w > 0.0 {
                        let label: String = s.iter().map(|o| o.symbol()).collect();
                        println!("  {label}  {}", fmt(*w));
                    }
                }
            }
            FeasibilityVerdict::Nonlocal { violations, infeasibility } => {
                println!("nonlocal (phase-one objective {})", fmt(*infeasibility));
                for v in violations {
                    println!("violated: X{} {} side, value {}", v.index, v.side, fmt(v.value));
                }
            }
        }
    }
    if verdict.is_local() {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

#[derive(Serialize)]
struct NashOutput {
    nash_set: NashSet,
    /// Payoffs at each isolated equilibrium.
    payoffs: Vec<(f64, f64)>,
    grid_points: Option<usize>,
    grid_hausdorff: Option<f64>,
}

fn cmd_game(cmd: GameCmd, tol: f64) -> CmdResult {
    match cmd {
        GameCmd::Payoff { g, b, x, y } => {
            let game = files::read_game(&g)?;
            let bx = load_valid(&b, tol)?;
            let p = MixedProfile::new(x, y).map_err(|e| Failure::Usage(e.into()))?;
            let (u, v) = bellgames::gamecore::payoff(&game, &bx, p);
            println!("payoffs ({}, {})", fmt(u), fmt(v));
            Ok(())
        }
        GameCmd::Nash { g, b, grid, json } => {
            let game = files::read_game(&g)?;
            let bx = load_valid(&b, tol)?;
            let c = corner_payoffs(&game, &bx).map_err(|e| Failure::Usage(e.into()))?;
            let set = enumerate_nash(&game, &bx, tol);
            let payoffs: Vec<(f64, f64)> = set.points().iter().map(|p| c.payoff(p.x, p.y)).collect();
            let mut out = NashOutput { nash_set: set, payoffs, grid_points: None, grid_hausdorff: None };
            if let Some(n) = grid {
                if n < 2 {
                    return Err(Failure::Usage(anyhow!("--grid needs at least 2 points")));
                }
                let gn = grid_bruteforce_nash(&game, &bx, n, bellgames::paperlab::GRID_EPS);
                let h = hausdorff(&out.nash_set, &gn, 0.5 / (n - 1) as f64);
                out.grid_points = Some(gn.points.len());
                out.grid_hausdorff = h.is_finite().then_some(h);
            }
            if json {
                return print_json(&out);
            }
            match &out.nash_set {
                NashSet::Points { points } if points.len() == 1 => println!(
                    "unique NE ({}, {}), payoffs ({}, {})",
                    fmt(points[0].x),
                    fmt(points[0].y),
                    fmt(out.payoffs[0].0),
                    fmt(out.payoffs[0].1)
                ),
                set => {
                    println!("NE set: {}", describe_set(set));
                    for (p, (u, v)) in set.points().iter().zip(&out.payoffs) {
                        println!("  ({}, {}) payoffs ({}, {})", fmt(p.x), fmt(p.y), fmt(*u), fmt(*v));
                    }
                }
            }
            if let Some(n) = out.grid_points {
                match out.grid_hausdorff {
                    Some(h) => println!("grid: {n} points, Hausdorff distance {}", fmt(h)),
                    None => println!("grid: {n} points, no match with the exact set"),
                }
            }
            Ok(())
        }
    }
}

fn parse_state(s: &str) -> anyhow::Result<QuantumState> {
    match s {
        "phi+" => return Ok(QuantumState::phi_plus()),
        "psi-" => return Ok(QuantumState::psi_minus()),
        "00" => return Ok(QuantumState::zero_zero()),
        _ => {}
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("unrecognized state {s:?}"))?;
    let amps: Vec<Complex64> = match v.len() {
        4 => v.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        8 => v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        n => anyhow::bail!("expected 4 or 8 amplitude components, got {n}"),
    };
    let st = QuantumState::Pure([amps[0], amps[1], amps[2], amps[3]]);
    st.validate()?;
    Ok(st)
}

fn cmd_quantum(cmd: QuantumCmd) -> CmdResult {
    let QuantumCmd::Box { state, angles, o } = cmd;
    let st = parse_state(&state)?;
    let setup = QuantumSetup::planar_degrees(st, exactly("angles", angles)?)
        .map_err(|e| Failure::Usage(e.into()))?;
    let b = born_box(&setup).map_err(|e| Failure::Solver(e.into()))?;
    emit(&files::render_box(&b), o.as_deref())
}

fn cmd_reproduce(a: ReproduceArgs) -> CmdResult {
    match a.which {
        Which::Pd => {
            let r = pd_report(&bellgames::Game2x2::prisoners_dilemma(), a.seeds.unwrap_or(100), a.seed)
                .map_err(|e| Failure::Solver(e.into()))?;
            if a.json {
                return print_json(&r);
            }
            let s = &r.summary;
            println!("prisoner's dilemma on {} boxes (seed {})", s.n_boxes, r.seed);
            println!("  Bell system satisfied everywhere: {}", s.bell_all_satisfied);
            println!("  marginal constraints hold: {}", s.constraints_all_hold);
            println!("  origin is the only equilibrium: {}", s.origin_only_all);
            println!("  payoff at origin is (a4, b4): {}", s.payoff_all_a4_b4);
            println!(
                "  identity block matches: {} (max residual {:e})",
                s.identity_block_all_match, s.identity_block_max_residual
            );
            println!("  reduced equilibrium conditions hold: {}", s.reduced_nash_all_ok);
            println!("  payoff after constraints matches: {}", s.payoff_after_all_match);
            println!("  new-equilibrium condition mismatches: {}", s.new_ne_mismatches);
            println!("  grid search agrees: {}", s.grid_confirmed_all);
        }
        Which::Mp => {
            let r = mp_report_with(a.seed, a.seeds.unwrap_or(200));
            if a.json {
                return print_json(&r);
            }
            println!("matching pennies (seed {})", r.seed);
            println!(
                "  classical: {}, payoffs ({}, {}), reproduced: {}",
                describe_set(&r.classical.nash_set),
                fmt(r.classical.payoff.0),
                fmt(r.classical.payoff.1),
                r.classical.reproduces_classical
            );
            println!(
                "  random local boxes: {} ({} constructible)",
                r.random_local.n_boxes, r.random_local.constructible
            );
            for s in &r.random_local.checks {
                let mode = s.gamma_mode.map(|m| format!(" [{m}]")).unwrap_or_default();
                println!(
                    "    {}{mode}: {}/{} match, max residual {:e}",
                    s.name, s.matches, s.evaluated, s.max_residual
                );
            }
            for c in &r.cereceda {
                println!("  set {} (max |CHSH| {}):", c.set, fmt(c.chsh_max_abs));
                for m in &c.modes {
                    println!(
                        "    [{}] gamma {}, alpha {}, beta {}, omega {}",
                        m.gamma_mode,
                        fmt(m.gamma),
                        fmt(m.alpha),
                        fmt(m.beta),
                        fmt(m.omega)
                    );
                }
                println!("    equilibria: {}", describe_set(&c.exact_nash));
                println!("    grid agrees: {}", c.oracle_agrees);
            }
            println!("  discrepancies: {}", r.discrepancies.len());
            for d in &r.discrepancies {
                let set = d.set.map(|s| format!(" set {s}")).unwrap_or_default();
                let mode = d.gamma_mode.map(|m| format!(" [{m}]")).unwrap_or_default();
                println!(
                    "    {}{set}{mode}: claimed {}, recomputed {}",
                    d.name, d.claimed, d.recomputed
                );
            }
        }
    }
    Ok(())
}

fn cmd_audit(a: AuditArgs, tol: f64) -> CmdResult {
    let game = files::read_game(&a.g)?;
    let b = load_valid(&a.b, tol)?;
    let checks = audit_identities(&b, &game).map_err(|e| Failure::Usage(e.into()))?;
    if a.json {
        return print_json(&checks);
    }
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_else(|| "-".into());
    for c in &checks {
        let status = match c.status {
            CheckStatus::Match => "match",
            CheckStatus::Mismatch => "MISMATCH",
            CheckStatus::Skipped => "skipped",
        };
        let mode = c.gamma_mode.map(|m| format!(" [{m}]")).unwrap_or_default();
        println!(
            "{:<24}{:<17} {:<9} lhs {} rhs {} residual {}",
            c.name,
            mode,
            status,
            opt(c.lhs),
            opt(c.rhs),
            opt(c.residual)
        );
        if let Some(note) = &c.note {
            println!("    {note}");
        }
    }
    let bad = checks.iter().filter(|c| c.status == CheckStatus::Mismatch).count();
    println!("{} checks, {bad} mismatches", checks.len());
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    let tol = tolerance()?;
    match cli.command {
        Command::Box(c) => cmd_box(c, tol),
        Command::Bell(c) => cmd_bell(c, tol),
        Command::Fine(c) => cmd_fine(c, tol),
        Command::Lp(c) => cmd_lp(c, tol),
        Command::Game(c) => cmd_game(c, tol),
        Command::Quantum(c) => cmd_quantum(c),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Audit(a) => cmd_audit(a, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
