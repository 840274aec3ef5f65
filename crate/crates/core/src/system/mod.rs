//! Representable asynchronous systems `f: S^(m) -> P*(S^(n))` and their
//! combinators.

mod classify;
pub mod delay;
mod eval;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::bits::BitVec;
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::generator::{FirstTransition, Generator};
use crate::rat::{int, Rat};
use crate::signal::Signal;

pub use classify::Classification;
pub use delay::{DelayKind, Target};
pub use eval::Enumeration;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown(String),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn is_yes(&self) -> bool {
        *self == Verdict::Yes
    }

    pub fn is_no(&self) -> bool {
        *self == Verdict::No
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            (Verdict::Unknown(r), _) | (_, Verdict::Unknown(r)) => Verdict::Unknown(r),
        }
    }

    pub fn or(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Yes, _) | (_, Verdict::Yes) => Verdict::Yes,
            (Verdict::No, Verdict::No) => Verdict::No,
            (Verdict::Unknown(r), _) | (_, Verdict::Unknown(r)) => Verdict::Unknown(r),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Unknown(r) => write!(f, "unknown ({r})"),
            v => f.write_str(v.label()),
        }
    }
}

/// Search bounds for membership, enumeration and initial states.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Grid points beyond this are ignored when enumerating.
    pub horizon: Rat,
    /// Cap on enumerated candidates, members and search combinations.
    pub max_members: usize,
    /// Update slots between consecutive grid points of generated systems.
    pub internal_steps: usize,
    /// Extra enumeration grid points.
    pub extra_times: Vec<Rat>,
    pub first_transition: FirstTransition,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            horizon: int(10),
            max_members: 4096,
            internal_steps: 3,
            extra_times: Vec::new(),
            first_transition: FirstTransition::Justified,
        }
    }
}

impl Limits {
    pub fn with_extra(&self, times: impl IntoIterator<Item = Rat>) -> Limits {
        let mut l = self.clone();
        l.extra_times.extend(times);
        l.extra_times.sort();
        l.extra_times.dedup();
        l
    }
}

/// Initial states `phi(u)`; depends on `u(0-0)` only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InitialStateSpec {
    ConstantSet(BTreeSet<BitVec>),
    FromInput(BTreeMap<BitVec, BTreeSet<BitVec>>),
}

impl InitialStateSpec {
    pub fn constant(states: impl IntoIterator<Item = BitVec>) -> InitialStateSpec {
        InitialStateSpec::ConstantSet(states.into_iter().collect())
    }

    /// Each input value maps to the stable states of `gen` under it.
    pub fn stable_states(gen: &Generator) -> Result<InitialStateSpec> {
        let mut map = BTreeMap::new();
        for l in BitVec::all_of_width(gen.m()) {
            let s: BTreeSet<BitVec> = gen.stable_states(l).into_iter().collect();
            if s.is_empty() {
                return Err(Error::NotSettling(format!("no stable state under input {l}")));
            }
            map.insert(l, s);
        }
        Ok(InitialStateSpec::FromInput(map))
    }

    pub fn states(&self, lambda: BitVec) -> BTreeSet<BitVec> {
        match self {
            InitialStateSpec::ConstantSet(s) => s.clone(),
            InitialStateSpec::FromInput(map) => map.get(&lambda).cloned().unwrap_or_default(),
        }
    }

    fn validate(&self, m: usize, n: usize) -> Result<()> {
        let check_set = |s: &BTreeSet<BitVec>| -> Result<()> {
            if s.is_empty() {
                return Err(Error::Invalid("empty initial state set".into()));
            }
            match s.iter().find(|v| v.width() != n) {
                Some(v) => Err(Error::WidthMismatch { expected: n, found: v.width() }),
                None => Ok(()),
            }
        };
        match self {
            InitialStateSpec::ConstantSet(s) => check_set(s),
            InitialStateSpec::FromInput(map) => {
                for l in BitVec::all_of_width(m) {
                    match map.get(&l) {
                        Some(s) => check_set(s)?,
                        None => return Err(Error::Invalid(format!("no initial states for input {l}"))),
                    }
                }
                Ok(())
            }
        }
    }
}

/// Indices in combinator variants are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// `{(u_1 o tau^d_1, .., u_w o tau^d_w)}`; all delays zero is the identity.
    IdealDelay { delays: Vec<Rat> },
    Pointwise(BoolFn),
    Autonomous { m: usize, set: BTreeSet<Signal> },
    /// Every signal of width `n`.
    Universe { m: usize, n: usize },
    Delay { m: usize, kind: DelayKind },
    Generated { gen: Generator, init: InitialStateSpec },
    Complement(Box<System>),
    Extend(Box<System>),
    Substitute { inner: Box<System>, from: usize, to: usize },
    DropInput { inner: Box<System>, index: usize },
    Intersect(Box<System>, Box<System>),
    IntersectSet(Box<System>, BTreeSet<Signal>),
    Union(Box<System>, Box<System>),
    UnionSet(Box<System>, BTreeSet<Signal>),
    Parallel(Vec<System>),
    Serial { outer: Box<System>, inner: Vec<System> },
}

fn arity_err(msg: String) -> Error {
    Error::ArityMismatch(msg)
}

fn set_width(set: &BTreeSet<Signal>) -> Result<usize> {
    let w = set.iter().next().ok_or_else(|| Error::Invalid("empty signal set".into()))?.width();
    match set.iter().find(|s| s.width() != w) {
        Some(s) => Err(Error::WidthMismatch { expected: w, found: s.width() }),
        None => Ok(w),
    }
}

impl System {
    pub fn ideal_delay(delays: Vec<Rat>) -> Result<System> {
        if delays.is_empty() {
            return Err(arity_err("ideal delay needs at least one coordinate".into()));
        }
        if delays.iter().any(|d| *d < Rat::zero()) {
            return Err(Error::Invalid("delays must be nonnegative".into()));
        }
        Ok(System::IdealDelay { delays })
    }

    /// Same delay on every coordinate.
    pub fn uniform_delay(width: usize, d: Rat) -> Result<System> {
        System::ideal_delay(vec![d; width])
    }

    pub fn identity(width: usize) -> System {
        System::IdealDelay { delays: vec![Rat::zero(); width] }
    }

    pub fn pointwise(f: BoolFn) -> System {
        System::Pointwise(f)
    }

    pub fn autonomous(m: usize, set: impl IntoIterator<Item = Signal>) -> Result<System> {
        let set: BTreeSet<Signal> = set.into_iter().collect();
        set_width(&set)?;
        if m == 0 {
            return Err(arity_err("input width must be positive".into()));
        }
        Ok(System::Autonomous { m, set })
    }

    pub fn universe(m: usize, n: usize) -> System {
        System::Universe { m, n }
    }

    pub fn delay_model(m: usize, kind: DelayKind) -> Result<System> {
        kind.validate(m)?;
        Ok(System::Delay { m, kind })
    }

    pub fn generated(gen: Generator, init: InitialStateSpec) -> Result<System> {
        init.validate(gen.m(), gen.n())?;
        Ok(System::Generated { gen, init })
    }

    pub fn complement(f: System) -> System {
        System::Complement(Box::new(f))
    }

    pub fn extend(f: System) -> System {
        System::Extend(Box::new(f))
    }

    pub fn substitute(f: System, from: usize, to: usize) -> Result<System> {
        let (m, _) = f.arity();
        if from == to || from >= m || to >= m {
            return Err(arity_err(format!("bad substitution {}->{} for {m} inputs", from + 1, to + 1)));
        }
        Ok(System::Substitute { inner: Box::new(f), from, to })
    }

    /// Drops input `index`, spot-checking on `probes` (inputs of the
    /// original arity) that `f` does not depend on it.
    pub fn drop_input(f: System, index: usize, probes: &[Signal], limits: &Limits) -> Result<System> {
        let (m, _) = f.arity();
        if index >= m || m == 1 {
            return Err(arity_err(format!("cannot drop input {} of {m}", index + 1)));
        }
        for u in probes {
            let u0 = set_coord(u, index, false);
            let u1 = set_coord(u, index, true);
            for (a, b) in [(&u0, &u1), (&u1, &u0)] {
                let e = f.enumerate(a, limits)?;
                for x in &e.members {
                    if f.contains(b, x, limits)?.is_no() {
                        return Err(Error::DependenceDetected(index));
                    }
                }
            }
        }
        Ok(System::DropInput { inner: Box::new(f), index })
    }

    fn same_arity(f: &System, g: &System) -> Result<()> {
        if f.arity() != g.arity() {
            return Err(arity_err(format!("arities {:?} and {:?} differ", f.arity(), g.arity())));
        }
        Ok(())
    }

    pub fn intersect(f: System, g: System) -> Result<System> {
        System::same_arity(&f, &g)?;
        Ok(System::Intersect(Box::new(f), Box::new(g)))
    }

    pub fn union(f: System, g: System) -> Result<System> {
        System::same_arity(&f, &g)?;
        Ok(System::Union(Box::new(f), Box::new(g)))
    }

    pub fn intersect_set(f: System, set: impl IntoIterator<Item = Signal>) -> Result<System> {
        let set: BTreeSet<Signal> = set.into_iter().collect();
        if set_width(&set)? != f.arity().1 {
            return Err(arity_err("set width differs from system output".into()));
        }
        Ok(System::IntersectSet(Box::new(f), set))
    }

    pub fn union_set(f: System, set: impl IntoIterator<Item = Signal>) -> Result<System> {
        let set: BTreeSet<Signal> = set.into_iter().collect();
        if set_width(&set)? != f.arity().1 {
            return Err(arity_err("set width differs from system output".into()));
        }
        Ok(System::UnionSet(Box::new(f), set))
    }

    pub fn parallel(parts: Vec<System>) -> Result<System> {
        if parts.is_empty() {
            return Err(arity_err("empty parallel connection".into()));
        }
        Ok(System::Parallel(parts))
    }

    pub fn serial(outer: System, inner: Vec<System>) -> Result<System> {
        let outs: usize = inner.iter().map(|g| g.arity().1).sum();
        if inner.is_empty() || outs != outer.arity().0 {
            return Err(arity_err(format!("inner outputs {outs} != outer inputs {}", outer.arity().0)));
        }
        Ok(System::Serial { outer: Box::new(outer), inner })
    }

    /// `(m, n)`: input and state widths.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            System::IdealDelay { delays } => (delays.len(), delays.len()),
            System::Pointwise(f) => (f.arity_in(), f.arity_out()),
            System::Autonomous { m, set } => (*m, set.iter().next().map_or(0, |s| s.width())),
            System::Universe { m, n } => (*m, *n),
            System::Delay { m, .. } => (*m, 1),
            System::Generated { gen, .. } => (gen.m(), gen.n()),
            System::Complement(f) | System::Intersect(f, _) | System::Union(f, _) => f.arity(),
            System::IntersectSet(f, _) | System::UnionSet(f, _) => f.arity(),
            System::Substitute { inner, .. } => inner.arity(),
            System::Extend(f) => {
                let (m, n) = f.arity();
                (m + 1, n)
            }
            System::DropInput { inner, .. } => {
                let (m, n) = inner.arity();
                (m - 1, n)
            }
            System::Parallel(parts) => parts.iter().fold((0, 0), |(m, n), p| {
                let (a, b) = p.arity();
                (m + a, n + b)
            }),
            System::Serial { outer, inner } => (inner.iter().map(|g| g.arity().0).sum(), outer.arity().1),
        }
    }

    pub(crate) fn check_io(&self, u: &Signal, x: Option<&Signal>) -> Result<()> {
        let (m, n) = self.arity();
        if u.width() != m {
            return Err(arity_err(format!("system takes {m} inputs, input signal has width {}", u.width())));
        }
        if let Some(x) = x {
            if x.width() != n {
                return Err(arity_err(format!("system has {n} states, state signal has width {}", x.width())));
            }
        }
        Ok(())
    }
}

/// `u` with coordinate `i` replaced by a constant.
pub fn set_coord(u: &Signal, i: usize, b: bool) -> Signal {
    u.map(u.width(), |v| v.with(i, b))
}

/// `u` with a constant-0 coordinate inserted at `i`.
pub fn insert_zero(u: &Signal, i: usize) -> Signal {
    u.map(u.width() + 1, |v| crate::boolfn::insert_bit(v, i, false))
}

/// `u` with coordinate `to` overwritten by coordinate `from`.
pub fn substitute_input(u: &Signal, from: usize, to: usize) -> Signal {
    u.map(u.width(), |v| v.with(to, v.get(from)))
}

/// Constant inputs of width `m` and one unit step per coordinate.
pub fn default_probes(m: usize) -> Vec<Signal> {
    let mut out: Vec<Signal> = BitVec::all_of_width(m.min(4)).map(|v| {
        if m <= 4 {
            Signal::constant(v)
        } else {
            Signal::constant(BitVec::concat(&[v, BitVec::zeros(m - 4)]))
        }
    })
    .collect();
    for i in 0..m {
        let step = Signal::from_events(BitVec::zeros(m), &[(int(1), BitVec::zeros(m).with(i, true))]).unwrap();
        out.push(step);
    }
    out
}
