//! Refutation testers for non-anticipation, time invariance, symmetry and
//! stability.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::rat::{int, rat, Rat};
use crate::sample::{probe_corpus, trial_rng, SignalGen};
use crate::signal::Signal;
use crate::system::{Limits, System, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessDetail {
    None,
    /// Translation amount.
    Shift(Rat),
    /// Second input with the same prefix, the cut and, when found, the
    /// member of `f(v)` compared against.
    Prefix { v: Signal, t1: Rat },
    /// Input coordinates swapped (0-based).
    Swap(usize, usize),
    Complemented,
}

/// A concrete counterexample: input, state and property-specific data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub u: Signal,
    pub x: Signal,
    pub detail: WitnessDetail,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u={} x={}", self.u, self.x)?;
        match &self.detail {
            WitnessDetail::None => Ok(()),
            WitnessDetail::Shift(d) => write!(f, " d={d}"),
            WitnessDetail::Prefix { v, t1 } => write!(f, " v={v} t1={t1}"),
            WitnessDetail::Swap(i, j) => write!(f, " swap={},{}", i + 1, j + 1),
            WitnessDetail::Complemented => write!(f, " complemented"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyVerdict {
    /// No counterexample in `trials`; `undecided` of them could not be
    /// settled within the budget.
    Passed { trials: usize, undecided: usize },
    Refuted { trial: usize, witness: Witness },
    /// Every trial was undecided.
    Unknown { trials: usize },
}

impl PropertyVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PropertyVerdict::Passed { .. })
    }

    pub fn refuted(&self) -> bool {
        matches!(self, PropertyVerdict::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            PropertyVerdict::Refuted { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PropertyVerdict::Passed { .. } => "passed",
            PropertyVerdict::Refuted { .. } => "refuted",
            PropertyVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// Trial source and search bounds shared by all testers.
#[derive(Clone, Debug)]
pub struct TestConfig {
    pub trials: usize,
    pub seed: u64,
    /// Fixed inputs are tried first.
    pub use_corpus: bool,
    /// Chance that a random input gets a periodic tail.
    pub tail_probability: f64,
    pub max_events: usize,
    pub limits: Limits,
    /// Compare prefixes on `(-inf, t1]` instead of `(-inf, t1)`.
    pub closed_prefix: bool,
    pub shrink: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            trials: 100,
            seed: 0,
            use_corpus: true,
            tail_probability: 0.0,
            max_events: 3,
            limits: Limits { horizon: int(8), max_members: 512, ..Limits::default() },
            closed_prefix: false,
            shrink: true,
        }
    }
}

impl TestConfig {
    pub fn with_trials(mut self, trials: usize, seed: u64) -> TestConfig {
        self.trials = trials;
        self.seed = seed;
        self
    }

    fn signal_gen(&self, width: usize) -> SignalGen {
        SignalGen { max_events: self.max_events, ..SignalGen::new(width) }.with_tails(self.tail_probability)
    }

    /// The trial's input; also returns the trial RNG for further draws.
    fn input(&self, width: usize, trial: usize) -> (Signal, rand_chacha::ChaCha8Rng) {
        let corpus = if self.use_corpus { probe_corpus(width, self.tail_probability > 0.0) } else { Vec::new() };
        let mut rng = trial_rng(self.seed, trial);
        let u = match corpus.get(trial) {
            Some(u) => u.clone(),
            None => self.signal_gen(width).sample(&mut rng),
        };
        (u, rng)
    }
}

enum Trial {
    Ok,
    Undecided,
    Refuted(Witness),
}

fn run_trials(cfg: &TestConfig, f: impl Fn(usize) -> Result<Trial> + Sync) -> Result<PropertyVerdict> {
    let results: Vec<Result<Trial>> = (0..cfg.trials).into_par_iter().map(&f).collect();
    let mut undecided = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Trial::Ok => {}
            Trial::Undecided => undecided += 1,
            Trial::Refuted(witness) => return Ok(PropertyVerdict::Refuted { trial: i, witness }),
        }
    }
    if undecided == cfg.trials && cfg.trials > 0 {
        Ok(PropertyVerdict::Unknown { trials: cfg.trials })
    } else {
        Ok(PropertyVerdict::Passed { trials: cfg.trials, undecided })
    }
}

/// Smaller inputs derived from `u`: one event or the tail dropped, or event
/// times rounded down.
fn shrink_candidates(u: &Signal) -> Vec<Signal> {
    let mut out = Vec::new();
    if u.tail().is_some() {
        out.push(Signal::new(u.width(), u.initial(), u.events().to_vec(), None).unwrap());
    }
    for i in 0..u.events().len() {
        let mut ev = u.events().to_vec();
        ev.remove(i);
        if let Ok(s) = Signal::new(u.width(), u.initial(), ev, u.tail().cloned()) {
            out.push(s);
        }
    }
    let rounded: Vec<_> = u.events().iter().map(|e| crate::signal::Event::new(e.time.floor(), e.value)).collect();
    if let Ok(s) = Signal::new(u.width(), u.initial(), rounded, u.tail().cloned()) {
        out.push(s);
    }
    out.retain(|s| s != u);
    out
}

/// Greedy event-deletion shrinking of the input of a witness.
fn shrink(w: Witness, check: impl Fn(&Signal) -> Result<Option<Witness>>) -> Witness {
    let mut best = w;
    for _ in 0..32 {
        let next = shrink_candidates(&best.u).into_iter().find_map(|c| check(&c).ok().flatten());
        match next {
            Some(w) => best = w,
            None => break,
        }
    }
    best
}

/// Exact per-pair form of non-anticipation (def. 1): `x` constant, or both
/// switch and the input switches first.
pub fn nonanticipation1_pair(u: &Signal, x: &Signal) -> bool {
    match (u.first_switch(), x.first_switch()) {
        (_, None) => true,
        (Some(tu), Some(tx)) => tu <= tx,
        (None, Some(_)) => false,
    }
}

/// Direct check of the translation condition for every `d` in a critical
/// set around the first switches.
pub fn nonanticipation1_sweep(u: &Signal, x: &Signal) -> bool {
    let mut ds: Vec<Rat> = vec![Rat::zero()];
    let fs: Vec<Rat> = [u.first_switch(), x.first_switch()].into_iter().flatten().collect();
    for &a in &fs {
        ds.push(-a);
        for &b in &fs {
            ds.push(-(a + b) / int(2));
        }
        ds.push(-a - rat(1, 2));
        ds.push(-a + rat(1, 2));
    }
    ds.push(int(-1000));
    ds.iter().all(|&d| u.translate(d).is_err() || x.translate(d).is_ok())
}

fn members(f: &System, u: &Signal, limits: &Limits) -> Result<Option<Vec<Signal>>> {
    match f.enumerate(u, limits) {
        Ok(e) => {
            if e.members.is_empty() && !e.complete {
                Ok(None)
            } else {
                Ok(Some(e.members.into_iter().collect()))
            }
        }
        Err(Error::EmptyValue(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn test_nonanticipation1(f: &System, cfg: &TestConfig) -> Result<PropertyVerdict> {
    let m = f.arity().0;
    let check = |u: &Signal| -> Result<Option<Witness>> {
        let Some(xs) = members(f, u, &cfg.limits)? else { return Ok(None) };
        Ok(xs
            .into_iter()
            .find(|x| !nonanticipation1_pair(u, x))
            .map(|x| Witness { u: u.clone(), x, detail: WitnessDetail::None }))
    };
    run_trials(cfg, |i| {
        let (u, _) = cfg.input(m, i);
        let Some(xs) = members(f, &u, &cfg.limits)? else { return Ok(Trial::Undecided) };
        match xs.into_iter().find(|x| !nonanticipation1_pair(&u, x)) {
            Some(x) => {
                let w = Witness { u, x, detail: WitnessDetail::None };
                Ok(Trial::Refuted(if cfg.shrink { shrink(w, check) } else { w }))
            }
            None => Ok(Trial::Ok),
        }
    })
}

/// `u` before `t1`, then `u` complemented from `t1 + 1` on, or a random
/// signal from `t1` on.
fn mutate_after(u: &Signal, t1: Rat, rng: &mut impl Rng, gen: &SignalGen, random: bool) -> Signal {
    let (other, cut) = if random {
        let r = gen.sample(rng);
        (r.translate(t1).unwrap_or(r), t1)
    } else {
        (u.complement(), t1 + Rat::one())
    };
    let gate = Signal::indicator(cut, None).unwrap();
    Signal::combine(&[u, &other, &gate], u.width(), |v| if v[2].get(0) { v[1] } else { v[0] })
}

fn prefix_match(a: &Signal, b: &Signal, t1: Rat, closed: bool) -> bool {
    a.prefix_equal(b, t1, closed).unwrap_or(false)
}

/// Checks the def.-2 implication on one `(u, v, t1)`.
fn na2_triple(f: &System, u: &Signal, v: &Signal, t1: Rat, cfg: &TestConfig) -> Result<Trial> {
    let Some(xs) = members(f, u, &cfg.limits)? else { return Ok(Trial::Undecided) };
    let lim = cfg.limits.with_extra([t1]);
    let ev = match f.enumerate(v, &lim) {
        Ok(e) => e,
        Err(Error::EmptyValue(_)) => return Ok(Trial::Undecided),
        Err(e) => return Err(e),
    };
    let mut undecided = false;
    for x in xs {
        if ev.members.iter().any(|y| prefix_match(&x, y, t1, cfg.closed_prefix)) {
            continue;
        }
        // x itself, or x frozen at t1, may lie in f(v) off the grid.
        let mut found = false;
        for y in [x.clone(), x.freeze(t1)] {
            if prefix_match(&x, &y, t1, cfg.closed_prefix) && f.contains(v, &y, &cfg.limits)?.is_yes() {
                found = true;
                break;
            }
        }
        if found {
            continue;
        }
        if ev.complete {
            return Ok(Trial::Refuted(Witness { u: u.clone(), x, detail: WitnessDetail::Prefix { v: v.clone(), t1 } }));
        }
        undecided = true;
    }
    Ok(if undecided { Trial::Undecided } else { Trial::Ok })
}

pub fn test_nonanticipation2(f: &System, cfg: &TestConfig) -> Result<PropertyVerdict> {
    let m = f.arity().0;
    let gen = cfg.signal_gen(m);
    run_trials(cfg, |i| {
        let (u, mut rng) = cfg.input(m, i);
        // The first half of each trial's draws use the unit cut and the
        // complement mutation; the rest are random.
        let t1 = if i % 2 == 0 { Rat::one() } else { gen.random_time(&mut rng) };
        let v = mutate_after(&u, t1, &mut rng, &gen, i % 2 == 1);
        let a = na2_triple(f, &u, &v, t1, cfg)?;
        if !matches!(a, Trial::Ok) {
            return Ok(a);
        }
        na2_triple(f, &v, &u, t1, cfg)
    })
}

/// One instance of the time-invariance implication.
pub fn time_invariance_pair(f: &System, u: &Signal, x: &Signal, d: Rat, limits: &Limits) -> Result<Verdict> {
    let Ok(ud) = u.translate(d) else { return Ok(Verdict::Yes) };
    let Ok(xd) = x.translate(d) else { return Ok(Verdict::No) };
    f.contains(&ud, &xd, limits)
}

fn shifts(u: &Signal, x: &Signal, rng: &mut impl Rng) -> Vec<Rat> {
    let mut ds = vec![Rat::one(), rat(rng.gen_range(0..=8), 2)];
    for s in [u.first_switch(), x.first_switch()].into_iter().flatten() {
        ds.push(-s);
        ds.push(-s + rat(1, 2));
    }
    ds.sort();
    ds.dedup();
    ds
}

pub fn test_time_invariance(f: &System, cfg: &TestConfig) -> Result<PropertyVerdict> {
    let m = f.arity().0;
    let trial = |u: &Signal, rng: &mut rand_chacha::ChaCha8Rng| -> Result<Trial> {
        let Some(xs) = members(f, u, &cfg.limits)? else { return Ok(Trial::Undecided) };
        let mut undecided = false;
        for x in xs {
            for d in shifts(u, &x, rng) {
                match time_invariance_pair(f, u, &x, d, &cfg.limits)? {
                    Verdict::Yes => {}
                    Verdict::No => {
                        return Ok(Trial::Refuted(Witness { u: u.clone(), x, detail: WitnessDetail::Shift(d) }));
                    }
                    Verdict::Unknown(_) => undecided = true,
                }
            }
        }
        Ok(if undecided { Trial::Undecided } else { Trial::Ok })
    };
    run_trials(cfg, |i| {
        let (u, mut rng) = cfg.input(m, i);
        match trial(&u, &mut rng)? {
            Trial::Refuted(w) if cfg.shrink => Ok(Trial::Refuted(shrink(w, |c| {
                Ok(match trial(c, &mut trial_rng(cfg.seed, i))? {
                    Trial::Refuted(w) => Some(w),
                    _ => None,
                })
            }))),
            t => Ok(t),
        }
    })
}

/// Compares `f(u)` with `h(f(u'))` in both directions: members of one side
/// refused by the other refute.
fn compare_sides(
    f: &System,
    u: &Signal,
    u2: &Signal,
    map: impl Fn(&Signal) -> Signal,
    detail: WitnessDetail,
    limits: &Limits,
) -> Result<Trial> {
    let (Some(a), Some(b)) = (members(f, u, limits)?, members(f, u2, limits)?) else { return Ok(Trial::Undecided) };
    let mut undecided = false;
    for x in &a {
        match f.contains(u2, &map(x), limits)? {
            Verdict::No => return Ok(Trial::Refuted(Witness { u: u.clone(), x: x.clone(), detail })),
            Verdict::Unknown(_) => undecided = true,
            Verdict::Yes => {}
        }
    }
    for y in &b {
        match f.contains(u, &map(y), limits)? {
            Verdict::No => return Ok(Trial::Refuted(Witness { u: u2.clone(), x: y.clone(), detail })),
            Verdict::Unknown(_) => undecided = true,
            Verdict::Yes => {}
        }
    }
    Ok(if undecided { Trial::Undecided } else { Trial::Ok })
}

fn swap(u: &Signal, i: usize) -> Signal {
    let mut sigma: Vec<usize> = (0..u.width()).collect();
    sigma.swap(i, i + 1);
    u.permute(&sigma).expect("transposition")
}

pub fn test_coord_symmetry(f: &System, cfg: &TestConfig) -> Result<PropertyVerdict> {
    let m = f.arity().0;
    if m < 2 {
        return Ok(PropertyVerdict::Passed { trials: 0, undecided: 0 });
    }
    let trial = |u: &Signal, i: usize| {
        compare_sides(f, u, &swap(u, i), |x| x.clone(), WitnessDetail::Swap(i, i + 1), &cfg.limits)
    };
    run_trials(cfg, |k| {
        let (u, mut rng) = cfg.input(m, k);
        let i = rng.gen_range(0..m - 1);
        match trial(&u, i)? {
            Trial::Refuted(w) if cfg.shrink => Ok(Trial::Refuted(shrink(w, |c| {
                Ok(match trial(c, i)? {
                    Trial::Refuted(w) => Some(w),
                    _ => None,
                })
            }))),
            t => Ok(t),
        }
    })
}

pub fn test_rf_symmetry(f: &System, cfg: &TestConfig) -> Result<PropertyVerdict> {
    let m = f.arity().0;
    let trial = |u: &Signal| compare_sides(f, u, &u.complement(), |x| x.complement(), WitnessDetail::Complemented, &cfg.limits);
    run_trials(cfg, |k| {
        let (u, _) = cfg.input(m, k);
        match trial(&u)? {
            Trial::Refuted(w) if cfg.shrink => Ok(Trial::Refuted(shrink(w, |c| {
                Ok(match trial(c)? {
                    Trial::Refuted(w) => Some(w),
                    _ => None,
                })
            }))),
            t => Ok(t),
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilityKind {
    Absolute,
    Relative,
    RelativeTo(BoolFn),
    DelayInsensitiveTo(BoolFn),
}

impl StabilityKind {
    pub fn name(&self) -> &'static str {
        match self {
            StabilityKind::Absolute => "absolute",
            StabilityKind::Relative => "relative",
            StabilityKind::RelativeTo(_) => "relative-to",
            StabilityKind::DelayInsensitiveTo(_) => "delay-insensitive",
        }
    }
}

/// Whether `(u, x)` satisfies the stability clause of `kind`.
pub fn stability_pair(kind: &StabilityKind, u: &Signal, x: &Signal) -> Result<bool> {
    Ok(match kind {
        StabilityKind::Absolute => x.eventually_constant(),
        StabilityKind::Relative => !u.eventually_constant() || x.eventually_constant(),
        StabilityKind::RelativeTo(f) => !u.pointwise(f)?.eventually_constant() || x.eventually_constant(),
        StabilityKind::DelayInsensitiveTo(f) => match u.pointwise(f)?.limit() {
            None => true,
            Some(v) => {
                if v.width() != x.width() {
                    return Err(Error::ArityMismatch(format!("F has {} outputs, state width {}", v.width(), x.width())));
                }
                x.limit() == Some(v)
            }
        },
    })
}

pub fn test_stability(kind: &StabilityKind, f: &System, cfg: &TestConfig) -> Result<PropertyVerdict> {
    let m = f.arity().0;
    let check = |u: &Signal| -> Result<Option<Witness>> {
        let Some(xs) = members(f, u, &cfg.limits)? else { return Ok(None) };
        for x in xs {
            if !stability_pair(kind, u, &x)? {
                return Ok(Some(Witness { u: u.clone(), x, detail: WitnessDetail::None }));
            }
        }
        Ok(None)
    };
    run_trials(cfg, |i| {
        let (u, _) = cfg.input(m, i);
        let Some(xs) = members(f, &u, &cfg.limits)? else { return Ok(Trial::Undecided) };
        for x in xs {
            if !stability_pair(kind, &u, &x)? {
                let w = Witness { u: u.clone(), x, detail: WitnessDetail::None };
                return Ok(Trial::Refuted(if cfg.shrink { shrink(w, check) } else { w }));
            }
        }
        Ok(Trial::Ok)
    })
}
