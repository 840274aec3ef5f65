//! Membership predicates of the built-in delay models. All are single-output.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::rat::{int, Rat};
use crate::signal::Signal;

/// Signal the state has to follow eventually.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Coord(usize),
    And,
    /// 0 when the product of the inputs settles, else the first input.
    ZeroIfAndSettles,
    /// 0 when the input settles, else the first input.
    ZeroIfInputSettles,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DelayKind {
    /// `x` eventually equals the target.
    EventuallyFollows(Target),
    /// `x(t) = u_i(t)` for all `t >= 0`; `x(0-0)` is free.
    AgreesFromZero(usize),
    /// A rising edge of `x` at `t` needs `u_1(t-d)...u_m(t-d) = 1`.
    RiseGuarded { delay: Rat },
    /// Autonomous: every 1-pulse lasts more than `rise`, every 0-pulse more
    /// than `fall`.
    PulseWidth { rise: Rat, fall: Rat },
    /// No falling edges; a rising edge at `t` needs the product of the
    /// inputs to be 1 on all of `[t - lookback, inf)`.
    RiseAfterSettledAnd { lookback: Rat },
    /// `x` is the constant "product of the inputs is 1 arbitrarily late".
    LimSupAnd,
    /// `x(t)` is 1 when `u` was 1 on all of `[t - rise, t)`, 0 when `u` was
    /// 0 on all of `[t - fall, t)`, free otherwise.
    InertialBounds { rise: Rat, fall: Rat },
    /// `x(t) >= u_1(t)...u_m(t)`.
    DominatesAnd,
    /// `x = chi[0,1) xor u_1 chi[2,inf)`.
    PulseThenGate,
    /// `{1}` if `u_1 = chi[0,inf)`, else `{u_1}`.
    StepOrCopy,
}

fn one() -> BitVec {
    BitVec::ones(1)
}

fn zero() -> BitVec {
    BitVec::zeros(1)
}

pub(crate) fn and_of(u: &Signal) -> Signal {
    u.map(1, |v| BitVec::new(1, v.all() as u64))
}

fn xor(a: &Signal, b: &Signal) -> Signal {
    Signal::combine(&[a, b], 1, |v| BitVec::new(1, v[0].bits() ^ v[1].bits()))
}

/// `before` on `(-inf, t0)`, `target` from `t0` on.
pub(crate) fn follow_from(before: BitVec, target: &Signal, t0: Rat) -> Signal {
    let gate = Signal::from_events(zero(), &[(t0, one())]).expect("t0 >= 0");
    Signal::combine(&[target, &gate], target.width(), |v| if v[1].get(0) { v[0] } else { before })
}

/// `w` is constant `v` on `[a, b)`.
fn constant_on(w: &Signal, a: Rat, b: Rat, v: BitVec) -> bool {
    w.eval(a) == v && w.switches_between(a, b).iter().all(|e| e.time <= a)
}

impl DelayKind {
    pub fn name(&self) -> &'static str {
        match self {
            DelayKind::EventuallyFollows(Target::Coord(_)) => "eventually-equal",
            DelayKind::EventuallyFollows(Target::And) => "eventually-and",
            DelayKind::EventuallyFollows(Target::ZeroIfAndSettles) => "zero-if-and-settles",
            DelayKind::EventuallyFollows(Target::ZeroIfInputSettles) => "zero-if-input-settles",
            DelayKind::AgreesFromZero(_) => "agrees-from-zero",
            DelayKind::RiseGuarded { .. } => "rise-guarded",
            DelayKind::PulseWidth { .. } => "pulse-width",
            DelayKind::RiseAfterSettledAnd { .. } => "rise-after-settled-and",
            DelayKind::LimSupAnd => "limsup-and",
            DelayKind::InertialBounds { .. } => "inertial",
            DelayKind::DominatesAnd => "dominates-and",
            DelayKind::PulseThenGate => "pulse-then-gate",
            DelayKind::StepOrCopy => "step-or-copy",
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::ArityMismatch(msg));
        match self {
            DelayKind::EventuallyFollows(Target::Coord(i)) | DelayKind::AgreesFromZero(i) if *i >= m => {
                bad(format!("coordinate {} out of range for {m} inputs", i + 1))
            }
            DelayKind::InertialBounds { rise, fall } => {
                if m != 1 {
                    bad("inertial delay takes one input".into())
                } else if *rise <= Rat::zero() || *fall <= Rat::zero() {
                    Err(Error::Invalid("inertial delays must be positive".into()))
                } else {
                    Ok(())
                }
            }
            DelayKind::RiseGuarded { delay: d } | DelayKind::RiseAfterSettledAnd { lookback: d } if *d < Rat::zero() => {
                Err(Error::Invalid("delay must be nonnegative".into()))
            }
            DelayKind::PulseWidth { rise, fall } if *rise < Rat::zero() || *fall < Rat::zero() => {
                Err(Error::Invalid("pulse widths must be nonnegative".into()))
            }
            _ if m == 0 => bad("at least one input required".into()),
            _ => Ok(()),
        }
    }

    pub fn target(&self, u: &Signal) -> Option<Signal> {
        let DelayKind::EventuallyFollows(t) = self else { return None };
        Some(match t {
            Target::Coord(i) => u.coord(*i),
            Target::And => and_of(u),
            Target::ZeroIfAndSettles => {
                if and_of(u).eventually_constant() {
                    Signal::constant(zero())
                } else {
                    u.coord(0)
                }
            }
            Target::ZeroIfInputSettles => {
                if u.eventually_constant() {
                    Signal::constant(zero())
                } else {
                    u.coord(0)
                }
            }
        })
    }

    /// The single member for deterministic kinds.
    pub fn image(&self, u: &Signal) -> Option<Signal> {
        match self {
            DelayKind::LimSupAnd => {
                let a = and_of(u);
                let v = match a.limit() {
                    Some(v) => v,
                    None => one(),
                };
                Some(Signal::constant(v))
            }
            DelayKind::PulseThenGate => {
                let pulse = Signal::indicator(int(0), Some(int(1))).unwrap();
                let gate = Signal::indicator(int(2), None).unwrap();
                let u1 = u.coord(0);
                Some(Signal::combine(&[&u1, &pulse, &gate], 1, |v| {
                    BitVec::new(1, v[1].bits() ^ (v[0].bits() & v[2].bits()))
                }))
            }
            DelayKind::StepOrCopy => {
                let u1 = u.coord(0);
                if u1 == Signal::indicator(int(0), None).unwrap() {
                    Some(Signal::constant(one()))
                } else {
                    Some(u1)
                }
            }
            _ => None,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, DelayKind::LimSupAnd | DelayKind::PulseThenGate | DelayKind::StepOrCopy)
    }

    /// Whole value set when it is finite and known in closed form.
    pub fn finite_members(&self, u: &Signal) -> Option<BTreeSet<Signal>> {
        if let Some(x) = self.image(u) {
            return Some([x].into());
        }
        match self {
            DelayKind::AgreesFromZero(i) => {
                let ui = u.coord(*i);
                Some([zero(), one()].iter().map(|&b| follow_from(b, &ui, Rat::zero())).collect())
            }
            _ => None,
        }
    }

    pub fn contains(&self, u: &Signal, x: &Signal) -> bool {
        if let Some(img) = self.image(u) {
            return img == *x;
        }
        match self {
            DelayKind::EventuallyFollows(_) => {
                let t = self.target(u).unwrap();
                xor(x, &t).limit() == Some(zero())
            }
            DelayKind::AgreesFromZero(i) => {
                let d = xor(x, &u.coord(*i));
                d.tail().is_none() && d.eval(Rat::zero()) == zero() && d.events().iter().all(|e| e.time.is_zero())
            }
            DelayKind::RiseGuarded { delay } => {
                let a = and_of(&u.translate(*delay).expect("nonnegative shift"));
                let c = Signal::flatten(&[x, &a]).unwrap();
                c.transitions().iter().all(|(_, before, after)| {
                    let rising = !before.get(0) && after.get(0);
                    !rising || after.get(1)
                })
            }
            DelayKind::PulseWidth { rise, fall } => {
                let (limit, end) = match x.tail() {
                    Some(t) => (t.start + t.period, t.start + t.period * int(3)),
                    None => {
                        let e = x.last_event_time().unwrap_or_else(Rat::zero);
                        (e, e + Rat::one())
                    }
                };
                let sw = x.switches_until(end);
                sw.windows(2).filter(|w| w[0].time <= limit).all(|w| {
                    let width = if w[0].value.get(0) { *rise } else { *fall };
                    w[1].time > w[0].time + width
                })
            }
            DelayKind::RiseAfterSettledAnd { lookback } => {
                if x.tail().is_some() {
                    return false;
                }
                let mut prev = x.initial();
                for e in x.events() {
                    if prev.get(0) && !e.value.get(0) {
                        return false;
                    }
                    prev = e.value;
                }
                let Some(rise) = x.events().first() else { return true };
                let a = and_of(u);
                if a.limit() != Some(one()) {
                    return false;
                }
                match a.last_event_time() {
                    Some(ta) => rise.time - *lookback >= ta,
                    None => true,
                }
            }
            DelayKind::InertialBounds { rise, fall } => inertial_ok(u, x, *rise, *fall),
            DelayKind::DominatesAnd => {
                let c = Signal::flatten(&[x, &and_of(u)]).unwrap();
                let ok = |v: BitVec| v.get(0) || !v.get(1);
                ok(c.initial()) && c.transitions().iter().all(|(_, _, after)| ok(*after))
            }
            DelayKind::LimSupAnd | DelayKind::PulseThenGate | DelayKind::StepOrCopy => unreachable!(),
        }
    }

    pub fn initial_states(&self, u: &Signal) -> BTreeSet<BitVec> {
        if let Some(img) = self.image(u) {
            return [img.initial()].into();
        }
        match self {
            DelayKind::DominatesAnd if u.initial().all() => [one()].into(),
            DelayKind::InertialBounds { .. } => [u.initial()].into(),
            _ => [zero(), one()].into(),
        }
    }

    /// Grid points the kind's members may switch at besides the input's.
    pub fn declared_times(&self, u: &Signal, horizon: Rat) -> Vec<Rat> {
        let shifted = |d: Rat| -> Vec<Rat> { u.switches_until(horizon).iter().map(|e| e.time + d).collect() };
        match self {
            DelayKind::RiseGuarded { delay } => shifted(*delay),
            DelayKind::InertialBounds { rise, fall } => {
                let mut v = shifted(*rise);
                v.extend(shifted(*fall));
                v
            }
            DelayKind::RiseAfterSettledAnd { lookback } => {
                and_of(u).switches_until(horizon).iter().map(|e| e.time + *lookback).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Signals a member may coincide with from its last grid point on.
    pub fn tails(&self, u: &Signal) -> Vec<Signal> {
        match self {
            DelayKind::EventuallyFollows(_) => vec![self.target(u).unwrap()],
            DelayKind::InertialBounds { rise, fall } => {
                let d = if rise < fall { *rise } else { *fall };
                vec![u.translate(d).expect("nonnegative shift")]
            }
            _ => Vec::new(),
        }
    }

    pub fn is_autonomous(&self) -> bool {
        matches!(self, DelayKind::PulseWidth { .. })
    }

    /// Value sets known to be infinite for some input.
    pub fn is_infinite(&self) -> bool {
        !self.is_deterministic() && !matches!(self, DelayKind::AgreesFromZero(_))
    }
}

fn inertial_ok(u: &Signal, x: &Signal, rise: Rat, fall: Rat) -> bool {
    let joint = Signal::flatten(&[u, x]).unwrap();
    let (start, period) = joint.periodic_from();
    let span = if rise > fall { rise } else { fall };
    let end = match period {
        Some(p) => start + span + p,
        None => start + span,
    };
    let mut crit: Vec<Rat> = Vec::new();
    for e in u.switches_until(end + int(1)) {
        crit.extend([e.time, e.time + rise, e.time + fall]);
    }
    crit.extend(x.switches_until(end + int(1)).iter().map(|e| e.time));
    crit.push(end);
    crit.sort();
    crit.dedup();
    let mut points = vec![crit[0] - int(1)];
    for w in crit.windows(2) {
        points.push(w[0]);
        points.push((w[0] + w[1]) / int(2));
    }
    points.push(*crit.last().unwrap());
    points.push(*crit.last().unwrap() + int(1));
    let one = BitVec::ones(1);
    let zero = BitVec::zeros(1);
    points.into_iter().all(|t| {
        let xv = x.eval(t).get(0);
        let lo = constant_on(u, t - rise, t, one);
        let hi_zero = constant_on(u, t - fall, t, zero);
        (!lo || xv) && (!hi_zero || !xv)
    })
}
