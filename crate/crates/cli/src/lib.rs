//! Command-line front end: parses signal, table and system files, runs the
//! checkers and prints a report.
//!
//! Exit codes: 0 yes/passed, 1 no/refuted, 2 unknown, 3 usage or parse
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use asynkit::generator::{FirstTransition, Generator, Settling, TrajectoryConfig};
use asynkit::mode::{self, Grid, ModeKind};
use asynkit::properties::{self as props, PropertyVerdict, StabilityKind, TestConfig, WitnessDetail};
use asynkit::text;
use asynkit::{BitVec, BoolFn, Error, Limits, Rat, Signal, System, Transform, Verdict};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

pub const BUDGET_ENV: &str = "ASYNKIT_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "asynkit", version, about = "Exact semantics for asynchronous Boolean systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Signal algebra.
    Signal {
        #[command(subcommand)]
        op: SignalOp,
    },
    /// Membership, enumeration and structure of systems.
    Sys {
        #[command(subcommand)]
        op: SysOp,
    },
    /// Randomized property checks.
    Prop {
        #[command(subcommand)]
        op: PropOp,
    },
    /// Fundamental-mode verification and construction.
    Mode {
        #[command(subcommand)]
        op: ModeOp,
    },
    /// Generator functions.
    Gen {
        #[command(subcommand)]
        op: GenOp,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Machine,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Enumeration horizon.
    #[arg(long, value_parser = parse_rat_arg)]
    horizon: Option<Rat>,
    /// Cap on enumerated members; overrides ASYNKIT_BUDGET.
    #[arg(long)]
    budget: Option<usize>,
    /// Directory for result and witness files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum SignalOp {
    /// Value at time --t.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_rat_arg, allow_negative_numbers = true)]
        t: Rat,
        #[command(flatten)]
        common: Common,
    },
    /// Shift by --d.
    Translate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_rat_arg, allow_negative_numbers = true)]
        d: Rat,
        #[command(flatten)]
        common: Common,
    },
    /// Hold the left limit from --t on.
    Freeze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_rat_arg)]
        t: Rat,
        #[command(flatten)]
        common: Common,
    },
    /// Complement every coordinate.
    Complement {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum SysOp {
    /// Whether --x is a response to --u.
    Contains {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        x: PathBuf,
        /// Extra enumeration grid points, comma separated.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate the members for --u.
    Enumerate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Initial states reachable for --u.
    Initials {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Whether `--system` is included in `--other` on the probe corpus.
    Includes {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Structural facts: autonomy, finiteness, determinism.
    Classify {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StabKind {
    Absolute,
    Relative,
    RelativeTo,
    Di,
}

#[derive(Args, Debug)]
struct PropArgs {
    #[arg(long)]
    system: PathBuf,
    /// Chance that a random input gets a periodic tail.
    #[arg(long, default_value_t = 0.0)]
    tails: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum PropOp {
    /// First non-anticipation condition.
    Na1(PropArgs),
    /// Second non-anticipation condition.
    Na2(PropArgs),
    /// Time invariance.
    Tinv(PropArgs),
    /// Symmetry under coordinate permutations.
    Sym(PropArgs),
    /// Symmetry under complementing inputs and states.
    Rfsym(PropArgs),
    /// Stability of the chosen kind.
    Stab {
        #[arg(long, value_enum)]
        kind: StabKind,
        /// Truth table for the relative kinds.
        #[arg(long = "F")]
        func: Option<PathBuf>,
        #[command(flatten)]
        args: PropArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeKindArg {
    Pseudo,
    Fundamental,
    Relative,
    Di,
}

#[derive(Subcommand, Debug)]
enum ModeOp {
    /// Check a mode of the chosen kind on a grid.
    Verify {
        #[arg(long, value_enum)]
        kind: ModeKindArg,
        #[arg(long)]
        system: PathBuf,
        #[arg(long = "F")]
        func: Option<PathBuf>,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        x: PathBuf,
        /// Grid times; defaults to 0 and the switch times of `u`.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Build a mode for a settling generated system.
    Construct {
        #[arg(long)]
        system: PathBuf,
        /// Input values `l0,l1,..` (fundamental) or target values (with `--F`).
        #[arg(long)]
        inputs: String,
        /// Construct relative to this function, inputs being its targets.
        #[arg(long = "F")]
        func: Option<PathBuf>,
        #[arg(long, value_parser = parse_rat_arg, default_value = "0")]
        t0: Rat,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum GenOp {
    /// Successor states of --mu under --lambda.
    Succ {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: String,
        #[command(flatten)]
        common: Common,
    },
    /// Whether --x is a trajectory for --u.
    Member {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        x: PathBuf,
        /// Leave a first switch not after the first input switch unjustified.
        #[arg(long)]
        free_first: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate trajectories from --x0.
    Enumerate {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        x0: String,
        /// Update slots between grid points.
        #[arg(long, default_value_t = 3)]
        steps: usize,
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Whether every input settles the generator.
    Settling {
        #[arg(long)]
        phi: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Apply an input transform to the generator.
    Gamma {
        #[arg(long)]
        phi: PathBuf,
        /// `complement`, `extend`, `substitute:I,J` or `drop:I` (1-based).
        #[arg(long)]
        transform: String,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_rat_arg(s: &str) -> Result<Rat, String> {
    asynkit::rat::parse_rat(s).ok_or_else(|| format!("expected a rational P/Q, found `{s}`"))
}

/// Failure of a run: a usage problem or an error from the library.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Collected output of one command.
struct Report {
    code: i32,
    fields: Vec<(String, String)>,
    csv: Option<String>,
    /// Text printed as-is in text format (e.g. an emitted signal).
    body: Option<String>,
    files: Vec<(String, String)>,
}

impl Report {
    fn new(code: i32) -> Report {
        Report { code, fields: Vec::new(), csv: None, body: None, files: Vec::new() }
    }

    fn field(&mut self, k: &str, v: impl ToString) -> &mut Report {
        self.fields.push((k.to_string(), v.to_string()));
        self
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Machine => {
                for (k, v) in &self.fields {
                    s.push_str(&format!("{k}={v}\n"));
                }
            }
            Format::Csv if self.csv.is_some() => s.push_str(self.csv.as_ref().unwrap()),
            _ => {
                let w = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.fields {
                    s.push_str(&format!("{k:w$}  {v}\n"));
                }
                if let Some(b) = &self.body {
                    s.push_str(b);
                }
            }
        }
        s
    }
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_signal(path: &Path) -> Res<Signal> {
    Ok(text::parse_signal(&read(path)?, &path.display().to_string())?)
}

fn load_table(path: &Path) -> Res<BoolFn> {
    Ok(text::parse_boolfn(&read(path)?, &path.display().to_string())?)
}

fn load_phi(path: &Path) -> Res<Generator> {
    Ok(text::parse_generator(&read(path)?, &path.display().to_string())?)
}

fn load_system(path: &Path) -> Res<System> {
    Ok(text::parse_system(&read(path)?, &path.display().to_string(), path.parent())?)
}

fn bits_arg(s: &str) -> Res<BitVec> {
    BitVec::parse(s).map_err(|_| Failure::Usage(format!("expected a bit string, found `{s}`")))
}

fn times_arg(s: &str) -> Res<Vec<Rat>> {
    text::parse_times(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn budget(common: &Common, env_budget: Option<usize>) -> Option<usize> {
    common.budget.or(env_budget)
}

fn limits(common: &Common, env_budget: Option<usize>) -> Limits {
    let mut l = Limits::default();
    if let Some(h) = common.horizon {
        l.horizon = h;
    }
    if let Some(b) = budget(common, env_budget) {
        l.max_members = b;
    }
    l
}

fn test_config(args: &PropArgs, env_budget: Option<usize>) -> TestConfig {
    let mut cfg = TestConfig::default().with_trials(args.common.trials, args.common.seed);
    cfg.tail_probability = args.tails;
    if let Some(h) = args.common.horizon {
        cfg.limits.horizon = h;
    }
    if let Some(b) = budget(&args.common, env_budget) {
        cfg.limits.max_members = b;
    }
    cfg
}

fn one_line(s: &Signal) -> String {
    format!("{s:?}")
}

fn signal_report(s: &Signal, name: &str) -> Report {
    let mut r = Report::new(EXIT_YES);
    r.field("signal", one_line(s));
    r.body = Some(text::emit_signal(s));
    r.csv = Some(signal_csv(s));
    r.file(name, text::emit_signal(s));
    r
}

/// `t,bits,mask` rows: the value before 0, then every transition.
fn signal_csv(s: &Signal) -> String {
    let mut out = format!("t,bits,mask\n-,{},{}\n", s.initial(), BitVec::zeros(s.width()));
    let end = s.tail().map(|t| t.start + t.period * Rat::from_integer(2));
    let transitions = match end {
        Some(end) => {
            let mut prev = s.initial();
            s.switches_until(end)
                .into_iter()
                .map(|e| {
                    let before = prev;
                    prev = e.value;
                    (e.time, before, e.value)
                })
                .collect()
        }
        None => s.transitions(),
    };
    for (t, before, after) in transitions {
        out.push_str(&format!("{t},{after},{}\n", BitVec::new(s.width(), before.bits() ^ after.bits())));
    }
    out
}

fn property_report(v: &PropertyVerdict, seed: u64) -> Report {
    let code = match v {
        PropertyVerdict::Passed { .. } => EXIT_YES,
        PropertyVerdict::Refuted { .. } => EXIT_NO,
        PropertyVerdict::Unknown { .. } => EXIT_UNKNOWN,
    };
    let mut r = Report::new(code);
    r.field("verdict", v.label()).field("seed", seed);
    match v {
        PropertyVerdict::Passed { trials, undecided } => {
            r.field("trials", trials).field("undecided", undecided);
        }
        PropertyVerdict::Unknown { trials } => {
            r.field("trials", trials);
        }
        PropertyVerdict::Refuted { trial, witness } => {
            r.field("trial", trial).field("witness.u", one_line(&witness.u)).field("witness.x", one_line(&witness.x));
            r.file("witness_u.sig", text::emit_signal(&witness.u));
            r.file("witness_x.sig", text::emit_signal(&witness.x));
            match &witness.detail {
                WitnessDetail::None => {}
                WitnessDetail::Shift(d) => {
                    r.field("witness.d", d);
                }
                WitnessDetail::Prefix { v, t1 } => {
                    r.field("witness.v", one_line(v)).field("witness.t1", t1);
                    r.file("witness_v.sig", text::emit_signal(v));
                }
                WitnessDetail::Swap(i, j) => {
                    r.field("witness.swap", format!("{},{}", i + 1, j + 1));
                }
                WitnessDetail::Complemented => {
                    r.field("witness.complemented", "true");
                }
            }
        }
    }
    r
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Signal { op } => match op {
            SignalOp::Eval { common, .. }
            | SignalOp::Translate { common, .. }
            | SignalOp::Freeze { common, .. }
            | SignalOp::Complement { common, .. } => common,
        },
        Command::Sys { op } => match op {
            SysOp::Contains { common, .. }
            | SysOp::Enumerate { common, .. }
            | SysOp::Initials { common, .. }
            | SysOp::Includes { common, .. }
            | SysOp::Classify { common, .. } => common,
        },
        Command::Prop { op } => match op {
            PropOp::Na1(a) | PropOp::Na2(a) | PropOp::Tinv(a) | PropOp::Sym(a) | PropOp::Rfsym(a) => &a.common,
            PropOp::Stab { args, .. } => &args.common,
        },
        Command::Mode { op } => match op {
            ModeOp::Verify { common, .. } | ModeOp::Construct { common, .. } => common,
        },
        Command::Gen { op } => match op {
            GenOp::Succ { common, .. }
            | GenOp::Member { common, .. }
            | GenOp::Enumerate { common, .. }
            | GenOp::Settling { common, .. }
            | GenOp::Gamma { common, .. } => common,
        },
    }
}

fn run_signal(op: &SignalOp) -> Res<Report> {
    Ok(match op {
        SignalOp::Eval { input, t, .. } => {
            let s = load_signal(input)?;
            let mut r = Report::new(EXIT_YES);
            r.field("t", t).field("value", s.eval(*t)).field("left_limit", s.left_limit(*t));
            r
        }
        SignalOp::Translate { input, d, .. } => signal_report(&load_signal(input)?.translate(*d)?, "translated.sig"),
        SignalOp::Freeze { input, t, .. } => signal_report(&load_signal(input)?.freeze(*t), "frozen.sig"),
        SignalOp::Complement { input, .. } => signal_report(&load_signal(input)?.complement(), "complement.sig"),
    })
}

fn run_sys(op: &SysOp, env_budget: Option<usize>) -> Res<Report> {
    Ok(match op {
        SysOp::Contains { system, u, x, grid, common } => {
            let f = load_system(system)?;
            let mut lim = limits(common, env_budget);
            if let Some(g) = grid {
                lim = lim.with_extra(times_arg(g)?);
            }
            let v = f.contains(&load_signal(u)?, &load_signal(x)?, &lim)?;
            let mut r = Report::new(verdict_code(&v));
            r.field("verdict", v.label());
            if let Verdict::Unknown(why) = &v {
                r.field("reason", why);
            }
            r.field("horizon", lim.horizon).field("budget", lim.max_members);
            r
        }
        SysOp::Enumerate { system, u, grid, common } => {
            let f = load_system(system)?;
            let mut lim = limits(common, env_budget);
            if let Some(g) = grid {
                lim = lim.with_extra(times_arg(g)?);
            }
            let e = f.enumerate(&load_signal(u)?, &lim)?;
            let mut r = Report::new(EXIT_YES);
            r.field("count", e.members.len()).field("exhaustive", e.exhaustive).field("complete", e.complete);
            let mut csv = String::from("member,t,bits,mask\n");
            for (i, x) in e.members.iter().enumerate() {
                r.field(&format!("member.{}", i + 1), one_line(x));
                r.file(&format!("member_{}.sig", i + 1), text::emit_signal(x));
                for row in signal_csv(x).lines().skip(1) {
                    csv.push_str(&format!("{},{row}\n", i + 1));
                }
            }
            r.csv = Some(csv);
            r
        }
        SysOp::Initials { system, u, common } => {
            let f = load_system(system)?;
            let s = f.initial_states(&load_signal(u)?, &limits(common, env_budget))?;
            let mut r = Report::new(EXIT_YES);
            let states: Vec<String> = s.states.iter().map(|b| b.to_string()).collect();
            r.field("states", states.join(",")).field("exact", s.exact);
            r
        }
        SysOp::Includes { system, other, common } => {
            let f = load_system(system)?;
            let g = load_system(other)?;
            let probes = asynkit::sample::probe_corpus(f.arity().0, true);
            let (v, w) = f.includes(&g, &probes, &limits(common, env_budget))?;
            let mut r = Report::new(verdict_code(&v));
            r.field("verdict", v.label()).field("probes", probes.len());
            if let Some((u, x)) = w {
                r.field("witness.u", one_line(&u)).field("witness.x", one_line(&x));
                r.file("witness_u.sig", text::emit_signal(&u));
                r.file("witness_x.sig", text::emit_signal(&x));
            }
            r
        }
        SysOp::Classify { system, .. } => {
            let c = load_system(system)?.classify();
            let mut r = Report::new(EXIT_YES);
            r.field("autonomous", c.autonomous.label())
                .field("finite", c.finite.label())
                .field("deterministic", c.deterministic.label());
            r
        }
    })
}

fn run_prop(op: &PropOp, env_budget: Option<usize>) -> Res<Report> {
    let (args, name) = match op {
        PropOp::Na1(a) => (a, "na1"),
        PropOp::Na2(a) => (a, "na2"),
        PropOp::Tinv(a) => (a, "tinv"),
        PropOp::Sym(a) => (a, "sym"),
        PropOp::Rfsym(a) => (a, "rfsym"),
        PropOp::Stab { args, .. } => (args, "stab"),
    };
    let f = load_system(&args.system)?;
    let cfg = test_config(args, env_budget);
    let v = match op {
        PropOp::Na1(_) => props::test_nonanticipation1(&f, &cfg)?,
        PropOp::Na2(_) => props::test_nonanticipation2(&f, &cfg)?,
        PropOp::Tinv(_) => props::test_time_invariance(&f, &cfg)?,
        PropOp::Sym(_) => props::test_coord_symmetry(&f, &cfg)?,
        PropOp::Rfsym(_) => props::test_rf_symmetry(&f, &cfg)?,
        PropOp::Stab { kind, func, .. } => {
            let table = || -> Res<BoolFn> {
                let p = func.as_ref().ok_or_else(|| Failure::Usage("this stability kind needs --F".into()))?;
                load_table(p)
            };
            let k = match kind {
                StabKind::Absolute => StabilityKind::Absolute,
                StabKind::Relative => StabilityKind::Relative,
                StabKind::RelativeTo => StabilityKind::RelativeTo(table()?),
                StabKind::Di => StabilityKind::DelayInsensitiveTo(table()?),
            };
            props::test_stability(&k, &f, &cfg)?
        }
    };
    let mut r = property_report(&v, cfg.seed);
    r.fields.insert(0, ("property".into(), name.into()));
    Ok(r)
}

fn run_mode(op: &ModeOp, env_budget: Option<usize>) -> Res<Report> {
    let table = |p: &Option<PathBuf>| -> Res<BoolFn> {
        let p = p.as_ref().ok_or_else(|| Failure::Usage("this kind needs --F".into()))?;
        load_table(p)
    };
    Ok(match op {
        ModeOp::Verify { kind, system, func, u, x, grid, common } => {
            let f = load_system(system)?;
            let kind = match kind {
                ModeKindArg::Pseudo => ModeKind::Pseudo,
                ModeKindArg::Fundamental => ModeKind::Fundamental,
                ModeKindArg::Relative => ModeKind::RelativeTo(table(func)?),
                ModeKindArg::Di => ModeKind::DelayInsensitiveTo(table(func)?),
            };
            let (u, x) = (load_signal(u)?, load_signal(x)?);
            let times = match grid {
                Some(g) => times_arg(g)?,
                None => {
                    let mut t = vec![Rat::from_integer(0)];
                    t.extend(u.transitions().into_iter().map(|(t, _, _)| t).filter(|t| *t > Rat::from_integer(0)));
                    t
                }
            };
            let grid = Grid::new(times)?;
            let rep = mode::verify_mode(&f, &kind, &u, &x, &grid, &limits(common, env_budget))?;
            let mut r = Report::new(verdict_code(&rep.verdict));
            r.field("kind", rep.kind).field("verdict", rep.verdict.label()).field("grid", &grid);
            for c in &rep.conditions {
                let at = c.failing_k.map_or(String::new(), |k| format!(" at k={k}"));
                r.field(&format!("condition.{}", c.condition.name()), format!("{}{at}", c.verdict.label()));
            }
            if let Some((c, k)) = &rep.failure {
                r.field("failure", c.name());
                if let Some(k) = k {
                    r.field("failure.k", k);
                }
            }
            let eq: Vec<String> = rep.equilibrium.iter().map(|(l, m)| format!("({l},{m})")).collect();
            r.field("equilibrium", eq.join(" "));
            r
        }
        ModeOp::Construct { system, inputs, func, t0, common } => {
            let f = load_system(system)?;
            let vals = inputs.split(',').map(|s| bits_arg(s.trim())).collect::<Res<Vec<_>>>()?;
            let c = match func {
                Some(_) => mode::construct_mode_relative(&f, &table(func)?, &vals, *t0, common.seed)?,
                None => mode::construct_mode(&f, &vals, *t0, common.seed)?,
            };
            let mut r = Report::new(EXIT_YES);
            r.field("u", one_line(&c.u)).field("x", one_line(&c.x)).field("grid", &c.grid).field("seed", common.seed);
            r.file("u.sig", text::emit_signal(&c.u));
            r.file("x.sig", text::emit_signal(&c.x));
            r.file("grid.txt", format!("{}\n", c.grid));
            r
        }
    })
}

fn parse_transform(s: &str) -> Res<Transform> {
    let bad = || Failure::Usage(format!("unknown transform `{s}`"));
    let idx = |v: &str| -> Res<usize> {
        match v.trim().parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(bad()),
        }
    };
    match s.split_once(':') {
        None if s == "complement" => Ok(Transform::Complement),
        None if s == "extend" => Ok(Transform::Extend),
        Some(("drop", i)) => Ok(Transform::Drop(idx(i)?)),
        Some(("substitute", ij)) => {
            let (i, j) = ij.split_once(',').ok_or_else(bad)?;
            Ok(Transform::Substitute { from: idx(i)?, to: idx(j)? })
        }
        _ => Err(bad()),
    }
}

fn run_gen(op: &GenOp, env_budget: Option<usize>) -> Res<Report> {
    Ok(match op {
        GenOp::Succ { phi, lambda, mu, .. } => {
            let g = load_phi(phi)?;
            let (l, m) = (bits_arg(lambda)?, bits_arg(mu)?);
            let s = g.successors(l, m)?;
            let mut r = Report::new(EXIT_YES);
            r.field("phi", g.phi(l, m)).field("stable", g.is_stable_point(l, m));
            r.field("successors", s.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","));
            r
        }
        GenOp::Member { phi, u, x, free_first, .. } => {
            let g = load_phi(phi)?;
            let rule = if *free_first { FirstTransition::Free } else { FirstTransition::Justified };
            let x = load_signal(x)?;
            let ok = g.check_membership(&load_signal(u)?, &x, rule)?;
            let mut r = Report::new(if ok { EXIT_YES } else { EXIT_NO });
            r.field("verdict", Verdict::from_bool(ok).label()).field("x0", x.initial());
            r
        }
        GenOp::Enumerate { phi, u, x0, steps, grid, common } => {
            let g = load_phi(phi)?;
            let mut cfg = TrajectoryConfig { max_internal_steps: *steps, ..TrajectoryConfig::default() };
            if let Some(b) = budget(common, env_budget) {
                cfg.max_paths = b;
            }
            if let Some(gr) = grid {
                cfg.extra_times = times_arg(gr)?;
            }
            let set = g.enumerate_trajectories(&load_signal(u)?, bits_arg(x0)?, &cfg)?;
            let mut r = Report::new(EXIT_YES);
            r.field("count", set.trajectories.len()).field("exhaustive", set.exhaustive).field("complete", set.complete);
            let mut csv = String::from("trajectory,t,bits,mask\n");
            for (i, tr) in set.trajectories.iter().enumerate() {
                let s = tr.to_signal();
                r.field(&format!("trajectory.{}", i + 1), one_line(&s));
                r.file(&format!("trajectory_{}.sig", i + 1), text::emit_signal(&s));
                r.file(&format!("trajectory_{}.csv", i + 1), tr.to_csv());
                for row in tr.to_csv().lines().skip(1) {
                    csv.push_str(&format!("{},{row}\n", i + 1));
                }
            }
            r.csv = Some(csv);
            r
        }
        GenOp::Settling { phi, .. } => match load_phi(phi)?.settling_check() {
            Settling::Settles => {
                let mut r = Report::new(EXIT_YES);
                r.field("verdict", "yes");
                r
            }
            Settling::Oscillates { lambda, states } => {
                let mut r = Report::new(EXIT_NO);
                r.field("verdict", "no").field("lambda", lambda);
                r.field("cycle", states.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","));
                r
            }
        },
        GenOp::Gamma { phi, transform, .. } => {
            let g = load_phi(phi)?.gamma(parse_transform(transform)?)?;
            let mut r = Report::new(EXIT_YES);
            r.field("m", g.m()).field("n", g.n());
            r.body = Some(text::emit_generator(&g));
            r.file("gamma.tt", text::emit_generator(&g));
            r
        }
    })
}

fn env_budget() -> Result<Option<usize>, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("{BUDGET_ENV} must be a count, found `{v}`")),
        Err(_) => Ok(None),
    }
}

/// Variant name of a library error, e.g. `NotASignal`.
fn error_kind(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_USAGE,
        Error::BudgetExceeded(_) => EXIT_UNKNOWN,
        _ => EXIT_NO,
    }
}

/// Runs one command line, writing the report to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let env_budget = match env_budget() {
        Ok(b) => b,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let common = common_of(&cli.command).clone();
    let result = match &cli.command {
        Command::Signal { op } => run_signal(op),
        Command::Sys { op } => run_sys(op, env_budget),
        Command::Prop { op } => run_prop(op, env_budget),
        Command::Mode { op } => run_mode(op, env_budget),
        Command::Gen { op } => run_gen(op, env_budget),
    };
    let report = match result {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Core(e)) => {
            let code = error_code(&e);
            let mut r = Report::new(code);
            r.field("error", e.to_string()).field("error.kind", error_kind(&e));
            let _ = write!(out, "{}", r.render(common.format));
            let _ = writeln!(err, "error: {e}");
            return code;
        }
    };
    if let Some(dir) = &common.out {
        if let Err(e) = write_files(dir, &report.files) {
            let _ = writeln!(err, "error: cannot write to {}: {e}", dir.display());
            return EXIT_USAGE;
        }
    }
    let _ = write!(out, "{}", report.render(common.format));
    report.code
}

fn write_files(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in files {
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}
