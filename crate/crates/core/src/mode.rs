//! Fundamental-mode verification and construction.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::bits::BitVec;
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::generator::Settling;
use crate::rat::{int, Rat};
use crate::sample::trial_rng;
use crate::signal::Signal;
use crate::system::{Limits, System, Verdict};

/// Strictly increasing times, continued past the last one by unit steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    times: Vec<Rat>,
}

impl Grid {
    pub fn new(times: Vec<Rat>) -> Result<Grid> {
        if times.is_empty() {
            return Err(Error::Invalid("empty grid".into()));
        }
        if times[0] < Rat::zero() {
            return Err(Error::NegativeEventTime(times[0]));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::NonIncreasingTimes(w[1]));
        }
        Ok(Grid { times })
    }

    pub fn times(&self) -> &[Rat] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `t_k`, following the unit-step continuation past the last element.
    pub fn time(&self, k: usize) -> Rat {
        match self.times.get(k) {
            Some(t) => *t,
            None => *self.times.last().unwrap() + int((k + 1 - self.times.len()) as i64),
        }
    }

    /// Grid times extended until strictly past `end`.
    fn extended(&self, end: Option<Rat>) -> Vec<Rat> {
        let mut out = self.times.clone();
        if let Some(end) = end {
            while *out.last().unwrap() <= end {
                let t = *out.last().unwrap() + Rat::one();
                out.push(t);
            }
        }
        out
    }

    pub fn translate(&self, d: Rat) -> Result<Grid> {
        Grid::new(self.times.iter().map(|t| *t + d).collect())
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.times.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Pseudo,
    Fundamental,
    RelativeTo(BoolFn),
    DelayInsensitiveTo(BoolFn),
}

impl ModeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModeKind::Pseudo => "pseudo",
            ModeKind::Fundamental => "fundamental",
            ModeKind::RelativeTo(_) => "relative",
            ModeKind::DelayInsensitiveTo(_) => "di",
        }
    }

    fn function(&self) -> Option<&BoolFn> {
        match self {
            ModeKind::RelativeTo(f) | ModeKind::DelayInsensitiveTo(f) => Some(f),
            _ => None,
        }
    }

    /// Names of the conditions this kind requires.
    pub fn required(&self) -> &'static [Condition] {
        use Condition::*;
        match self {
            ModeKind::Pseudo => &[PrefixMember],
            ModeKind::Fundamental => &[InputSettledBefore, InputConstant, PrefixMember],
            ModeKind::RelativeTo(_) => &[InputSettledBefore, ImageConstant, PrefixMember],
            ModeKind::DelayInsensitiveTo(_) => &[InputSettledBefore, ImageConstant, PrefixMember, SettledValue],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// `x in f(u)` itself.
    Member,
    /// `u` does not switch before `t_0`.
    InputSettledBefore,
    /// `u` is constant on every `[t_k, t_k+1)`.
    InputConstant,
    /// `F(u)` is constant on every `[t_k, t_k+1)`.
    ImageConstant,
    /// Frozen prefixes at every `t_k`, `k >= 1`, are members.
    PrefixMember,
    /// `x(t_k - 0) = F(u(t_k - 0))` for `k >= 1`.
    SettledValue,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Member => "member",
            Condition::InputSettledBefore => "input-settled-before-start",
            Condition::InputConstant => "input-constant-between",
            Condition::ImageConstant => "image-constant-between",
            Condition::PrefixMember => "prefix-member",
            Condition::SettledValue => "settled-value",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionResult {
    pub condition: Condition,
    pub verdict: Verdict,
    /// First grid index where it fails.
    pub failing_k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeReport {
    pub kind: &'static str,
    pub verdict: Verdict,
    pub conditions: Vec<ConditionResult>,
    /// First required condition that fails, with its grid index.
    pub failure: Option<(Condition, Option<usize>)>,
    pub equilibrium: Vec<(BitVec, BitVec)>,
}

impl ModeReport {
    pub fn condition(&self, c: Condition) -> Option<&ConditionResult> {
        self.conditions.iter().find(|r| r.condition == c)
    }
}

/// `(u(t_k - 0), x(t_k - 0))` at every grid time.
pub fn equilibrium_points(u: &Signal, x: &Signal, grid: &Grid) -> Vec<(BitVec, BitVec)> {
    grid.times.iter().map(|&t| (u.left_limit(t), x.left_limit(t))).collect()
}

/// `(u, x)` frozen at `t_k`, `k >= 1`.
pub fn prefixes(u: &Signal, x: &Signal, grid: &Grid, k: usize) -> Result<(Signal, Signal)> {
    if k == 0 {
        return Err(Error::IndexOutOfRange(k));
    }
    let t = grid.time(k);
    Ok((u.freeze(t), x.freeze(t)))
}

/// Inserts `tau` between `t_{k-1}` and `t_k`.
pub fn refine_grid(grid: &Grid, k: usize, tau: Rat) -> Result<Grid> {
    if k == 0 || k >= grid.len() {
        return Err(Error::IndexOutOfRange(k));
    }
    let (lo, hi) = (grid.times[k - 1], grid.times[k]);
    if !(lo < tau && tau < hi) {
        return Err(Error::OutOfInterval { tau, lo, hi });
    }
    let mut times = grid.times.clone();
    times.insert(k, tau);
    Grid::new(times)
}

fn last_switch(s: &Signal) -> Option<Rat> {
    s.last_event_time()
}

/// First `k` with a switch of `w` strictly inside `(t_k, t_k+1)`.
fn first_inner_switch(w: &Signal, times: &[Rat]) -> Option<usize> {
    times.windows(2).position(|p| w.switches_between(p[0], p[1]).iter().any(|e| e.time > p[0]))
}

fn condition(c: Condition, verdict: Verdict, failing_k: Option<usize>) -> ConditionResult {
    ConditionResult { condition: c, verdict, failing_k }
}

/// Checks the conditions of `kind` for `(u, x)` on `grid`.
pub fn verify_mode(f: &System, kind: &ModeKind, u: &Signal, x: &Signal, grid: &Grid, limits: &Limits) -> Result<ModeReport> {
    f.check_io(u, Some(x))?;
    if u.tail().is_some() || x.tail().is_some() {
        return Err(Error::PeriodicTailUnsupported);
    }
    let image = match kind.function() {
        Some(func) => {
            if func.arity_in() != u.width() {
                return Err(Error::ArityMismatch(format!("F takes {} inputs, u has width {}", func.arity_in(), u.width())));
            }
            if matches!(kind, ModeKind::DelayInsensitiveTo(_)) && func.arity_out() != x.width() {
                return Err(Error::ArityMismatch(format!("F has {} outputs, x has width {}", func.arity_out(), x.width())));
            }
            Some(u.pointwise(func)?)
        }
        None => None,
    };
    let end = [last_switch(u), last_switch(x)].into_iter().flatten().max();
    let times = grid.extended(end);
    let mut results = Vec::new();

    results.push(condition(Condition::Member, f.contains(u, x, limits)?, None));

    let t0 = times[0];
    let early = u.switches_until(t0).is_empty();
    results.push(condition(Condition::InputSettledBefore, Verdict::from_bool(early), (!early).then_some(0)));

    let k = first_inner_switch(u, &times);
    results.push(condition(Condition::InputConstant, Verdict::from_bool(k.is_none()), k));

    if let Some(img) = &image {
        let k = first_inner_switch(img, &times);
        results.push(condition(Condition::ImageConstant, Verdict::from_bool(k.is_none()), k));
    }

    // Past the last switch the frozen pair is (u, x) itself.
    let mut pm = Verdict::Yes;
    let mut pm_k = None;
    for (k, &t) in times.iter().enumerate().skip(1) {
        let past = end.map_or(true, |e| t > e);
        let v = if past { results[0].verdict.clone() } else { f.contains(&u.freeze(t), &x.freeze(t), limits)? };
        if !v.is_yes() && pm_k.is_none() {
            pm_k = Some(k);
        }
        pm = pm.and(v);
        if pm.is_no() || past {
            break;
        }
    }
    if times.len() == 1 {
        pm = results[0].verdict.clone();
    }
    results.push(condition(Condition::PrefixMember, pm, pm_k));

    if let ModeKind::DelayInsensitiveTo(func) = kind {
        let k = times.iter().enumerate().skip(1).find(|(_, &t)| x.left_limit(t) != func.eval(u.left_limit(t))).map(|(k, _)| k);
        results.push(condition(Condition::SettledValue, Verdict::from_bool(k.is_none()), k));
    }

    let mut verdict = results[0].verdict.clone();
    let mut failure = None;
    if verdict.is_no() {
        failure = Some((Condition::Member, None));
    }
    for c in kind.required() {
        let r = results.iter().find(|r| r.condition == *c).expect("computed");
        if r.verdict.is_no() && failure.is_none() {
            failure = Some((*c, r.failing_k));
        }
        verdict = verdict.and(r.verdict.clone());
    }
    Ok(ModeReport { kind: kind.name(), verdict, conditions: results, failure, equilibrium: equilibrium_points(u, x, grid) })
}

/// A constructed mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub u: Signal,
    pub x: Signal,
    pub grid: Grid,
}

/// Fair execution from `mu` under `lambda` to a stable state. Random
/// nonempty sets of excited coordinates, with every fourth step updating
/// all of them so that no coordinate waits forever.
fn settle(gen: &crate::generator::Generator, lambda: BitVec, mut mu: BitVec, rng: &mut impl Rng) -> Result<Vec<BitVec>> {
    let mut path = Vec::new();
    let cap = 64 * (1usize << gen.n()) * (gen.n() + 1);
    while !gen.is_stable_point(lambda, mu) {
        if path.len() >= cap {
            return Err(Error::NotSettling(format!("no stable state under input {lambda}")));
        }
        let target = gen.phi(lambda, mu);
        mu = if path.len() % 4 == 3 {
            target
        } else {
            let exc = BitVec::new(gen.n(), target.bits() ^ mu.bits());
            let mut mask = 0u64;
            while mask == 0 {
                mask = rng.gen_range(0..(1u64 << gen.n())) & exc.bits();
            }
            BitVec::new(gen.n(), mu.bits() ^ mask)
        };
        path.push(mu);
    }
    Ok(path)
}

/// Input stepping through `inputs` with the state settling before every
/// input change: `t_k+1 = t_k + (settling steps) + 1`.
pub fn construct_mode(f: &System, inputs: &[BitVec], t0: Rat, seed: u64) -> Result<Construction> {
    let System::Generated { gen, init } = f else {
        return Err(Error::Invalid("construction needs a generated system".into()));
    };
    if inputs.is_empty() {
        return Err(Error::Invalid("no input vectors".into()));
    }
    if let Some(v) = inputs.iter().find(|v| v.width() != gen.m()) {
        return Err(Error::WidthMismatch { expected: gen.m(), found: v.width() });
    }
    if t0 < Rat::zero() {
        return Err(Error::NegativeEventTime(t0));
    }
    if let Settling::Oscillates { lambda, .. } = gen.settling_check() {
        return Err(Error::NotSettling(format!("fair oscillation under input {lambda}")));
    }
    let mut rng = trial_rng(seed, 0);
    let starts: Vec<BitVec> = init.states(inputs[0]).into_iter().collect();
    let x0 = starts[rng.gen_range(0..starts.len())];
    let mut u_events = Vec::new();
    let mut x_events = Vec::new();
    let mut times = vec![t0];
    let mut t = t0;
    let mut mu = x0;
    for (k, &lambda) in inputs.iter().enumerate() {
        if k > 0 {
            u_events.push((t, lambda));
        }
        let path = settle(gen, lambda, mu, &mut rng)?;
        for (j, s) in path.iter().enumerate() {
            x_events.push((t + int(j as i64 + 1), *s));
        }
        mu = path.last().copied().unwrap_or(mu);
        t = t + int(path.len() as i64 + 1);
        times.push(t);
    }
    let u = Signal::from_events(inputs[0], &u_events)?;
    let x = Signal::from_events(x0, &x_events)?;
    Ok(Construction { u, x, grid: Grid::new(times)? })
}

/// Constructs a mode whose settled states are `targets`, through the
/// lexicographically least preimages under `func`.
pub fn construct_mode_relative(f: &System, func: &BoolFn, targets: &[BitVec], t0: Rat, seed: u64) -> Result<Construction> {
    let inputs = targets
        .iter()
        .map(|x| func.least_preimage(*x).ok_or_else(|| Error::TargetNotInRange(x.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let c = construct_mode(f, &inputs, t0, seed)?;
    for &t in c.grid.times().iter().skip(1) {
        let (l, mu) = (c.u.left_limit(t), c.x.left_limit(t));
        if func.eval(l) != mu {
            return Err(Error::Invalid(format!("state settled to {mu} instead of {} at {t}", func.eval(l))));
        }
    }
    Ok(c)
}
