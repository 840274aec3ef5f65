//! Ultimately periodic piecewise-constant Boolean signals over exact time.
//!
//! A signal is an initial value held on `(-inf, t0)`, a finite list of switch
//! events at times `>= 0`, and an optional periodic tail. Values are
//! right-continuous: the value at an event time is the event's value.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::bits::{BitVec, MAX_WIDTH};
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::rat::{lcm, modulo, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub time: Rat,
    pub value: BitVec,
}

impl Event {
    pub fn new(time: Rat, value: BitVec) -> Self {
        Event { time, value }
    }
}

/// Repeating pattern from `start` on: value `pattern[j].1` holds on
/// `[start + k*period + pattern[j].0, start + k*period + pattern[j+1].0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tail {
    pub start: Rat,
    pub period: Rat,
    pub pattern: Vec<(Rat, BitVec)>,
}

impl Tail {
    fn value_at(&self, t: Rat) -> BitVec {
        let off = modulo(t - self.start, self.period);
        let j = self.pattern.partition_point(|(o, _)| *o <= off);
        self.pattern[j - 1].1
    }

    fn left_limit(&self, t: Rat) -> BitVec {
        let off = modulo(t - self.start, self.period);
        if off.is_zero() {
            return self.pattern.last().unwrap().1;
        }
        let j = self.pattern.partition_point(|(o, _)| *o < off);
        self.pattern[j - 1].1
    }

    /// Switch times in `[a, b)`.
    fn switches_between(&self, a: Rat, b: Rat) -> Vec<Event> {
        let mut out = Vec::new();
        if b <= self.start || b <= a {
            return out;
        }
        let from = if a > self.start { a } else { self.start };
        let mut base = self.start + ((from - self.start) / self.period).floor() * self.period;
        'outer: loop {
            for &(o, v) in &self.pattern {
                let t = base + o;
                if t >= b {
                    break 'outer;
                }
                if t >= from {
                    out.push(Event::new(t, v));
                }
            }
            base += self.period;
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signal {
    width: usize,
    initial: BitVec,
    events: Vec<Event>,
    tail: Option<Tail>,
}

fn last_value(initial: BitVec, events: &[Event]) -> BitVec {
    events.last().map_or(initial, |e| e.value)
}

fn push_event(initial: BitVec, events: &mut Vec<Event>, time: Rat, value: BitVec) {
    if last_value(initial, events) != value {
        events.push(Event::new(time, value));
    }
}

fn canonical_tail(initial: BitVec, events: &mut Vec<Event>, tail: Tail) -> Option<Tail> {
    let Tail { mut start, period, pattern } = tail;
    let mut pat: Vec<(Rat, BitVec)> = Vec::with_capacity(pattern.len());
    for (o, v) in pattern {
        if pat.last().map_or(true, |p| p.1 != v) {
            pat.push((o, v));
        }
    }
    // A boundary where the last value equals the first is a no-op: fold the
    // first segment into the transient and restart the pattern after it.
    while pat.len() > 1 && pat.last().unwrap().1 == pat[0].1 {
        let o1 = pat[1].0;
        push_event(initial, events, start, pat[0].1);
        start += o1;
        pat = pat[1..].iter().map(|&(o, v)| (o - o1, v)).collect();
    }
    if pat.len() == 1 {
        push_event(initial, events, start, pat[0].1);
        return None;
    }
    let mut period = period;
    let r = pat.len();
    for q in 2..r {
        if r % q != 0 {
            continue;
        }
        let shift = pat[q].0;
        if shift * Rat::from_integer((r / q) as i64) != period {
            continue;
        }
        if (q..r).all(|j| pat[j].1 == pat[j - q].1 && pat[j].0 - pat[j - q].0 == shift) {
            pat.truncate(q);
            period = shift;
            break;
        }
    }
    if last_value(initial, events) == pat[0].1 {
        let o1 = pat[1].0;
        let first = pat[0].1;
        start += o1;
        let mut rotated: Vec<(Rat, BitVec)> = pat[1..].iter().map(|&(o, v)| (o - o1, v)).collect();
        rotated.push((period - o1, first));
        pat = rotated;
    }
    // Pull the start back while the last transient event is the previous
    // periodic switch.
    while let Some(&last) = events.last() {
        let &(ol, vl) = pat.last().unwrap();
        if last.time == start - period + ol && last.value == vl {
            events.pop();
            start = last.time;
            let shift = period - ol;
            let mut rotated = vec![(Rat::zero(), vl)];
            rotated.extend(pat[..pat.len() - 1].iter().map(|&(o, v)| (o + shift, v)));
            pat = rotated;
        } else {
            break;
        }
    }
    Some(Tail { start, period, pattern: pat })
}

fn canonical(width: usize, initial: BitVec, raw: Vec<Event>, tail: Option<Tail>) -> Signal {
    let mut events = Vec::with_capacity(raw.len());
    for e in raw {
        push_event(initial, &mut events, e.time, e.value);
    }
    let tail = tail.and_then(|t| canonical_tail(initial, &mut events, t));
    Signal { width, initial, events, tail }
}

impl Signal {
    /// Validating constructor; the result is canonical.
    pub fn new(width: usize, initial: BitVec, events: Vec<Event>, tail: Option<Tail>) -> Result<Signal> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::TooWide(width));
        }
        let check = |v: &BitVec| {
            if v.width() != width {
                Err(Error::WidthMismatch { expected: width, found: v.width() })
            } else {
                Ok(())
            }
        };
        check(&initial)?;
        let mut prev: Option<Rat> = None;
        for e in &events {
            check(&e.value)?;
            if e.time.is_negative() {
                return Err(Error::NegativeEventTime(e.time));
            }
            if prev.is_some_and(|p| e.time <= p) {
                return Err(Error::NonIncreasingTimes(e.time));
            }
            prev = Some(e.time);
        }
        if let Some(t) = &tail {
            if t.start.is_negative() {
                return Err(Error::NegativeEventTime(t.start));
            }
            if prev.is_some_and(|p| t.start <= p) {
                return Err(Error::NonIncreasingTimes(t.start));
            }
            if !t.period.is_positive() {
                return Err(Error::InvalidTail("period must be positive".into()));
            }
            if t.pattern.is_empty() || !t.pattern[0].0.is_zero() {
                return Err(Error::InvalidTail("pattern must start at offset 0".into()));
            }
            for w in t.pattern.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::InvalidTail("pattern offsets must increase".into()));
                }
            }
            if t.pattern.last().unwrap().0 >= t.period {
                return Err(Error::InvalidTail("pattern offset beyond period".into()));
            }
            for (_, v) in &t.pattern {
                check(v)?;
            }
        }
        Ok(canonical(width, initial, events, tail))
    }

    pub fn constant(value: BitVec) -> Signal {
        Signal { width: value.width(), initial: value, events: Vec::new(), tail: None }
    }

    /// Finite signal from `(time, value)` pairs.
    pub fn from_events(initial: BitVec, events: &[(Rat, BitVec)]) -> Result<Signal> {
        let evs = events.iter().map(|&(t, v)| Event::new(t, v)).collect();
        Signal::new(initial.width(), initial, evs, None)
    }

    /// Width-1 indicator of `[a, b)`, or of `[a, inf)` when `b` is `None`.
    pub fn indicator(a: Rat, b: Option<Rat>) -> Result<Signal> {
        let one = BitVec::ones(1);
        let zero = BitVec::zeros(1);
        let mut ev = vec![(a, one)];
        if let Some(b) = b {
            ev.push((b, zero));
        }
        Signal::from_events(zero, &ev)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn initial(&self) -> BitVec {
        self.initial
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    pub fn is_constant(&self) -> bool {
        self.events.is_empty() && self.tail.is_none()
    }

    pub fn eval(&self, t: Rat) -> BitVec {
        if let Some(tail) = &self.tail {
            if t >= tail.start {
                return tail.value_at(t);
            }
        }
        match self.events.partition_point(|e| e.time <= t) {
            0 => self.initial,
            k => self.events[k - 1].value,
        }
    }

    pub fn left_limit(&self, t: Rat) -> BitVec {
        if let Some(tail) = &self.tail {
            if t > tail.start {
                return tail.left_limit(t);
            }
        }
        match self.events.partition_point(|e| e.time < t) {
            0 => self.initial,
            k => self.events[k - 1].value,
        }
    }

    pub fn first_switch(&self) -> Option<Rat> {
        self.events.first().map(|e| e.time).or(self.tail.as_ref().map(|t| t.start))
    }

    /// Time of the last transient switch, ignoring the tail.
    pub fn last_event_time(&self) -> Option<Rat> {
        self.events.last().map(|e| e.time)
    }

    /// All switches strictly before `end`.
    pub fn switches_until(&self, end: Rat) -> Vec<Event> {
        let mut out: Vec<Event> = self.events.iter().copied().filter(|e| e.time < end).collect();
        if let Some(tail) = &self.tail {
            out.extend(tail.switches_between(tail.start, end));
        }
        out
    }

    /// Switches with time in `[a, b)`.
    pub fn switches_between(&self, a: Rat, b: Rat) -> Vec<Event> {
        let mut out: Vec<Event> =
            self.events.iter().copied().filter(|e| e.time >= a && e.time < b).collect();
        if let Some(tail) = &self.tail {
            out.extend(tail.switches_between(a, b));
        }
        out
    }

    /// Every distinct `(time, before, after)` switch pattern: the transient
    /// switches, one tail period, and the wrap-around switch closing it.
    pub fn transitions(&self) -> Vec<(Rat, BitVec, BitVec)> {
        let end = match &self.tail {
            Some(t) => t.start + t.period + t.period,
            None => self.events.last().map_or(Rat::zero(), |e| e.time + Rat::from_integer(1)),
        };
        let limit = match &self.tail {
            Some(t) => t.start + t.period,
            None => end,
        };
        let mut prev = self.initial;
        let mut out = Vec::new();
        for e in self.switches_until(end) {
            if e.time > limit {
                break;
            }
            out.push((e.time, prev, e.value));
            prev = e.value;
        }
        out
    }

    /// Time after which the signal is periodic (or constant), and the period
    /// if any.
    pub fn periodic_from(&self) -> (Rat, Option<Rat>) {
        match &self.tail {
            Some(t) => (t.start, Some(t.period)),
            None => (self.events.last().map_or(Rat::zero(), |e| e.time), None),
        }
    }

    pub fn translate(&self, d: Rat) -> Result<Signal> {
        let Some(first) = self.first_switch() else {
            return Ok(self.clone());
        };
        if (first + d).is_negative() {
            return Err(Error::NotASignal { d, at: first + d });
        }
        Ok(Signal {
            width: self.width,
            initial: self.initial,
            events: self.events.iter().map(|e| Event::new(e.time + d, e.value)).collect(),
            tail: self.tail.as_ref().map(|t| Tail { start: t.start + d, ..t.clone() }),
        })
    }

    /// Equal to `self` before `t`, holding the left limit at `t` afterwards.
    pub fn freeze(&self, t: Rat) -> Signal {
        Signal { width: self.width, initial: self.initial, events: self.switches_until(t), tail: None }
    }

    pub fn limit(&self) -> Option<BitVec> {
        match self.tail {
            Some(_) => None,
            None => Some(last_value(self.initial, &self.events)),
        }
    }

    pub fn eventually_constant(&self) -> bool {
        self.tail.is_none()
    }

    /// Pointwise image of several signals under `f`.
    pub fn combine(signals: &[&Signal], out_width: usize, f: impl Fn(&[BitVec]) -> BitVec) -> Signal {
        let sample = |t: Rat| -> BitVec {
            let vals: Vec<BitVec> = signals.iter().map(|s| s.eval(t)).collect();
            f(&vals)
        };
        let inits: Vec<BitVec> = signals.iter().map(|s| s.initial).collect();
        let initial = f(&inits);
        let period = signals
            .iter()
            .filter_map(|s| s.tail.as_ref().map(|t| t.period))
            .reduce(lcm);
        let mut times: Vec<Rat> = Vec::new();
        let tail = match period {
            None => {
                for s in signals {
                    times.extend(s.events.iter().map(|e| e.time));
                }
                None
            }
            Some(p) => {
                let start = signals
                    .iter()
                    .map(|s| match &s.tail {
                        Some(t) => t.start,
                        None => s.events.last().map_or(Rat::zero(), |e| e.time),
                    })
                    .max()
                    .unwrap();
                let mut offs = vec![Rat::zero()];
                for s in signals {
                    times.extend(s.switches_until(start).iter().map(|e| e.time));
                    offs.extend(s.switches_between(start, start + p).iter().map(|e| e.time - start));
                }
                offs.sort();
                offs.dedup();
                let pattern = offs.into_iter().map(|o| (o, sample(start + o))).collect();
                Some(Tail { start, period: p, pattern })
            }
        };
        times.sort();
        times.dedup();
        let events = times.into_iter().map(|t| Event::new(t, sample(t))).collect();
        canonical(out_width, initial, events, tail)
    }

    pub fn map(&self, out_width: usize, f: impl Fn(BitVec) -> BitVec) -> Signal {
        Signal::combine(&[self], out_width, |v| f(v[0]))
    }

    pub fn complement(&self) -> Signal {
        self.map(self.width, |v| v.complement())
    }

    /// `out[k] = self[sigma[k]]`.
    pub fn permute(&self, sigma: &[usize]) -> Result<Signal> {
        let mut seen = vec![false; self.width];
        if sigma.len() != self.width {
            return Err(Error::BadPermutation(self.width));
        }
        for &i in sigma {
            if i >= self.width || seen[i] {
                return Err(Error::BadPermutation(self.width));
            }
            seen[i] = true;
        }
        Ok(self.map(self.width, |v| v.select(sigma)))
    }

    pub fn project(&self, index: &[usize]) -> Result<Signal> {
        if index.is_empty() {
            return Err(Error::EmptyProjection);
        }
        if let Some(&i) = index.iter().find(|&&i| i >= self.width) {
            return Err(Error::CoordinateOutOfRange { index: i, width: self.width });
        }
        Ok(self.map(index.len(), |v| v.select(index)))
    }

    pub fn coord(&self, i: usize) -> Signal {
        self.project(&[i]).expect("coordinate in range")
    }

    pub fn flatten(parts: &[&Signal]) -> Result<Signal> {
        let width: usize = parts.iter().map(|s| s.width).sum();
        if parts.is_empty() {
            return Err(Error::EmptyProjection);
        }
        if width > MAX_WIDTH {
            return Err(Error::TooWide(width));
        }
        Ok(Signal::combine(parts, width, BitVec::concat))
    }

    /// Splits coordinates into consecutive groups of the given widths.
    pub fn split(&self, widths: &[usize]) -> Result<Vec<Signal>> {
        let total: usize = widths.iter().sum();
        if total != self.width {
            return Err(Error::WidthMismatch { expected: self.width, found: total });
        }
        let mut pos = 0;
        let mut out = Vec::with_capacity(widths.len());
        for &w in widths {
            let idx: Vec<usize> = (pos..pos + w).collect();
            out.push(self.project(&idx)?);
            pos += w;
        }
        Ok(out)
    }

    /// Agreement on `(-inf, t1)`, or on `(-inf, t1]` when `closed`.
    pub fn prefix_equal(&self, other: &Signal, t1: Rat, closed: bool) -> Result<bool> {
        if self.width != other.width {
            return Err(Error::WidthMismatch { expected: self.width, found: other.width });
        }
        let mut same = self.initial == other.initial && self.switches_until(t1) == other.switches_until(t1);
        if closed {
            same = same && self.eval(t1) == other.eval(t1);
        }
        Ok(same)
    }

    pub fn pointwise(&self, f: &BoolFn) -> Result<Signal> {
        if f.arity_in() != self.width {
            return Err(Error::ArityMismatch(format!(
                "function takes {} inputs, signal has width {}",
                f.arity_in(),
                self.width
            )));
        }
        Ok(self.map(f.arity_out(), |v| f.eval(v)))
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.initial)?;
        for e in &self.events {
            write!(f, " @{}:{}", e.time, e.value)?;
        }
        if let Some(t) = &self.tail {
            write!(f, " tail@{} every {} [", t.start, t.period)?;
            for (i, (o, v)) in t.pattern.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "+{o}:{v}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
