//! Membership, enumeration and initial states.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{insert_zero, substitute_input, InitialStateSpec, Limits, System, Verdict};
use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::generator::{trajectory_signals, FirstTransition, TrajectoryConfig};
use crate::rat::{int, Rat};
use crate::signal::Signal;

/// Members found on the enumeration grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub members: BTreeSet<Signal>,
    /// No budget truncation: every member whose switches lie on the grid
    /// is listed.
    pub exhaustive: bool,
    /// `members` is the whole value set.
    pub complete: bool,
}

impl Enumeration {
    fn exact(members: BTreeSet<Signal>) -> Enumeration {
        Enumeration { members, exhaustive: true, complete: true }
    }

    fn partial() -> Enumeration {
        Enumeration { members: BTreeSet::new(), exhaustive: false, complete: false }
    }
}

/// Result of the initial-state computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialStates {
    pub states: BTreeSet<BitVec>,
    /// False when the set is only known to contain the true one.
    pub exact: bool,
}

fn split_io(parts: &[System], u: &Signal) -> Result<Vec<Signal>> {
    let widths: Vec<usize> = parts.iter().map(|p| p.arity().0).collect();
    u.split(&widths)
}

fn split_state(parts: &[System], x: &Signal) -> Result<Vec<Signal>> {
    let widths: Vec<usize> = parts.iter().map(|p| p.arity().1).collect();
    x.split(&widths)
}

/// Cartesian product of member lists, capped at `cap` tuples.
fn product(lists: &[Vec<Signal>], cap: usize) -> (Vec<Vec<Signal>>, bool) {
    let mut out: Vec<Vec<Signal>> = vec![Vec::new()];
    let mut truncated = false;
    for l in lists {
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for s in l {
                if next.len() >= cap {
                    truncated = true;
                    break 'outer;
                }
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push(p);
            }
        }
        out = next;
    }
    (out, truncated)
}

fn switch_times(signals: &[&Signal], horizon: Rat) -> Vec<Rat> {
    let mut v: Vec<Rat> = signals.iter().flat_map(|s| s.switches_until(horizon + int(1))).map(|e| e.time).collect();
    v.sort();
    v.dedup();
    v
}

/// `prefix` before `t0`, `tail` from `t0` on.
fn splice(prefix: &Signal, tail: &Signal, t0: Rat) -> Signal {
    let gate = Signal::indicator(t0, None).expect("t0 >= 0");
    Signal::combine(&[prefix, tail, &gate], prefix.width(), |v| if v[2].get(0) { v[1] } else { v[0] })
}

/// Signals of width `n` whose switches lie on `grid`, optionally following
/// one of `tails` from some grid point on. Returns the candidates and
/// whether the grid had to be cut to stay within `cap`.
fn grid_candidates(n: usize, grid: &[Rat], tails: &[Signal], cap: usize) -> (BTreeSet<Signal>, bool) {
    let mut grid = grid.to_vec();
    let mut truncated = false;
    let count = |k: usize| -> u128 { 1u128 << (n * (k + 1)).min(100) };
    while grid.len() > 1 && count(grid.len()) * (1 + tails.len() as u128) > cap as u128 {
        grid.pop();
        truncated = true;
    }
    let build = |code: u128, k: usize| -> Signal {
        let mask = (1u128 << n) - 1;
        let value = |j: usize| BitVec::new(n, ((code >> (n * j)) & mask) as u64);
        let evs: Vec<(Rat, BitVec)> = (0..k).map(|j| (grid[j], value(j + 1))).collect();
        Signal::from_events(value(0), &evs).expect("grid increasing")
    };
    let mut out = BTreeSet::new();
    for code in 0..count(grid.len()) {
        out.insert(build(code, grid.len()));
    }
    for t in tails {
        for (j, &g) in grid.iter().enumerate() {
            for code in 0..count(j) {
                out.insert(splice(&build(code, j), t, g));
            }
        }
    }
    (out, truncated)
}

impl System {
    /// Decides `x in f(u)`; `Unknown` only when a bounded search gives up.
    pub fn contains(&self, u: &Signal, x: &Signal, limits: &Limits) -> Result<Verdict> {
        self.check_io(u, Some(x))?;
        Ok(match self {
            System::IdealDelay { delays } => {
                let parts: Vec<Signal> = delays
                    .iter()
                    .enumerate()
                    .map(|(i, d)| u.coord(i).translate(*d).expect("nonnegative shift"))
                    .collect();
                let refs: Vec<&Signal> = parts.iter().collect();
                Verdict::from_bool(Signal::flatten(&refs)? == *x)
            }
            System::Pointwise(f) => Verdict::from_bool(u.pointwise(f)? == *x),
            System::Autonomous { set, .. } => Verdict::from_bool(set.contains(x)),
            System::Universe { .. } => Verdict::Yes,
            System::Delay { kind, .. } => Verdict::from_bool(kind.contains(u, x)),
            System::Generated { gen, init } => {
                if !init.states(u.initial()).contains(&x.initial()) {
                    Verdict::No
                } else {
                    Verdict::from_bool(gen.check_membership(u, x, limits.first_transition)?)
                }
            }
            System::Complement(f) => f.contains(u, &x.complement(), limits)?,
            System::Extend(f) => {
                let m = u.width() - 1;
                f.contains(&u.project(&(0..m).collect::<Vec<_>>())?, x, limits)?
            }
            System::Substitute { inner, from, to } => inner.contains(&substitute_input(u, *from, *to), x, limits)?,
            System::DropInput { inner, index } => inner.contains(&insert_zero(u, *index), x, limits)?,
            System::Intersect(f, g) => {
                let a = f.contains(u, x, limits)?;
                if a.is_no() {
                    a
                } else {
                    a.and(g.contains(u, x, limits)?)
                }
            }
            System::Union(f, g) => {
                let a = f.contains(u, x, limits)?;
                if a.is_yes() {
                    a
                } else {
                    a.or(g.contains(u, x, limits)?)
                }
            }
            System::IntersectSet(f, set) => {
                if set.contains(x) {
                    f.contains(u, x, limits)?
                } else {
                    Verdict::No
                }
            }
            System::UnionSet(f, set) => {
                if set.contains(x) {
                    Verdict::Yes
                } else {
                    f.contains(u, x, limits)?
                }
            }
            System::Parallel(parts) => {
                let us = split_io(parts, u)?;
                let xs = split_state(parts, x)?;
                let mut v = Verdict::Yes;
                for ((p, ui), xi) in parts.iter().zip(&us).zip(&xs) {
                    v = v.and(p.contains(ui, xi, limits)?);
                    if v.is_no() {
                        break;
                    }
                }
                v
            }
            System::Serial { outer, inner } => serial_contains(outer, inner, u, x, limits)?,
        })
    }

    /// Members of `f(u)` on the enumeration grid, within the budget.
    pub fn enumerate(&self, u: &Signal, limits: &Limits) -> Result<Enumeration> {
        self.check_io(u, None)?;
        Ok(match self {
            System::IdealDelay { .. } | System::Pointwise(_) => {
                let x = match self {
                    System::Pointwise(f) => u.pointwise(f)?,
                    System::IdealDelay { delays } => {
                        let parts: Vec<Signal> =
                            delays.iter().enumerate().map(|(i, d)| u.coord(i).translate(*d).unwrap()).collect();
                        Signal::flatten(&parts.iter().collect::<Vec<_>>())?
                    }
                    _ => unreachable!(),
                };
                Enumeration::exact([x].into())
            }
            System::Autonomous { set, .. } => Enumeration::exact(set.clone()),
            System::Universe { n, .. } => {
                let grid = delay_grid(u, limits, &[]);
                let (members, truncated) = grid_candidates(*n, &grid, &[], limits.max_members);
                Enumeration { members, exhaustive: !truncated, complete: false }
            }
            System::Delay { kind, .. } => {
                if let Some(ms) = kind.finite_members(u) {
                    return Ok(Enumeration::exact(ms));
                }
                let grid = delay_grid(u, limits, &kind.declared_times(u, limits.horizon));
                let cap = limits.max_members.saturating_mul(8).max(64);
                let (cands, mut truncated) = grid_candidates(1, &grid, &kind.tails(u), cap);
                let mut members = BTreeSet::new();
                for c in cands {
                    if kind.contains(u, &c) {
                        if members.len() >= limits.max_members {
                            truncated = true;
                            break;
                        }
                        members.insert(c);
                    }
                }
                Enumeration { members, exhaustive: !truncated, complete: false }
            }
            System::Generated { gen, init } => {
                if u.tail().is_some() {
                    return Ok(Enumeration::partial());
                }
                let cfg = TrajectoryConfig {
                    max_internal_steps: limits.internal_steps,
                    fairness_filter: true,
                    max_paths: limits.max_members,
                    extra_times: limits.extra_times.iter().copied().filter(|t| *t <= limits.horizon).collect(),
                };
                let mut e = Enumeration::exact(BTreeSet::new());
                for x0 in init.states(u.initial()) {
                    let set = gen.enumerate_trajectories(u, x0, &cfg)?;
                    e.exhaustive &= set.exhaustive;
                    e.complete &= set.complete;
                    e.members.extend(trajectory_signals(&set));
                }
                if limits.first_transition == FirstTransition::Free {
                    e.complete = false;
                }
                e
            }
            System::Complement(f) => {
                let e = f.enumerate(u, limits)?;
                Enumeration { members: e.members.iter().map(|x| x.complement()).collect(), ..e }
            }
            System::Extend(f) => {
                let m = u.width() - 1;
                f.enumerate(&u.project(&(0..m).collect::<Vec<_>>())?, limits)?
            }
            System::Substitute { inner, from, to } => inner.enumerate(&substitute_input(u, *from, *to), limits)?,
            System::DropInput { inner, index } => inner.enumerate(&insert_zero(u, *index), limits)?,
            System::Intersect(f, g) => {
                let ef = f.enumerate(u, limits)?;
                let (base, other) = if !ef.complete {
                    let eg = g.enumerate(u, limits)?;
                    if eg.complete {
                        (eg, f)
                    } else {
                        (ef, g)
                    }
                } else {
                    (ef, g)
                };
                let mut e = Enumeration { members: BTreeSet::new(), ..base.clone() };
                for x in &base.members {
                    match other.contains(u, x, limits)? {
                        Verdict::Yes => {
                            e.members.insert(x.clone());
                        }
                        Verdict::No => {}
                        Verdict::Unknown(_) => {
                            e.complete = false;
                            e.exhaustive = false;
                        }
                    }
                }
                if e.members.is_empty() && e.complete {
                    return Err(Error::EmptyValue(format!("intersection is empty for input {u}")));
                }
                e
            }
            System::IntersectSet(f, set) => {
                let mut e = Enumeration::exact(BTreeSet::new());
                for x in set {
                    match f.contains(u, x, limits)? {
                        Verdict::Yes => {
                            e.members.insert(x.clone());
                        }
                        Verdict::No => {}
                        Verdict::Unknown(_) => {
                            e.complete = false;
                            e.exhaustive = false;
                        }
                    }
                }
                if e.members.is_empty() && e.complete {
                    return Err(Error::EmptyValue(format!("intersection with the set is empty for input {u}")));
                }
                e
            }
            System::Union(f, g) => {
                let a = f.enumerate(u, limits)?;
                let b = g.enumerate(u, limits)?;
                Enumeration {
                    members: a.members.union(&b.members).cloned().collect(),
                    exhaustive: a.exhaustive && b.exhaustive,
                    complete: a.complete && b.complete,
                }
            }
            System::UnionSet(f, set) => {
                let mut e = f.enumerate(u, limits)?;
                e.members.extend(set.iter().cloned());
                e
            }
            System::Parallel(parts) => {
                let us = split_io(parts, u)?;
                let mut lists = Vec::new();
                let mut e = Enumeration::exact(BTreeSet::new());
                for (p, ui) in parts.iter().zip(&us) {
                    let ep = p.enumerate(ui, limits)?;
                    e.exhaustive &= ep.exhaustive;
                    e.complete &= ep.complete;
                    lists.push(ep.members.into_iter().collect::<Vec<_>>());
                }
                let (tuples, truncated) = product(&lists, limits.max_members);
                if truncated {
                    e.exhaustive = false;
                    e.complete = false;
                }
                for t in tuples {
                    e.members.insert(Signal::flatten(&t.iter().collect::<Vec<_>>())?);
                }
                e
            }
            System::Serial { outer, inner } => {
                let (ys, mut e) = serial_intermediates(inner, u, limits, &[])?;
                for y in ys {
                    let eo = outer.enumerate(&y, limits)?;
                    e.exhaustive &= eo.exhaustive;
                    e.complete &= eo.complete;
                    e.members.extend(eo.members);
                    if e.members.len() > limits.max_members {
                        e.exhaustive = false;
                        e.complete = false;
                        break;
                    }
                }
                e
            }
        })
    }

    /// `phi(u) = {x(0-0) | x in f(u)}`.
    pub fn initial_states(&self, u: &Signal, limits: &Limits) -> Result<InitialStates> {
        self.check_io(u, None)?;
        let exact = |states: BTreeSet<BitVec>| InitialStates { states, exact: true };
        let mapped = |r: InitialStates, f: &dyn Fn(BitVec) -> BitVec| InitialStates {
            states: r.states.into_iter().map(f).collect(),
            exact: r.exact,
        };
        Ok(match self {
            System::IdealDelay { .. } => exact([u.initial()].into()),
            System::Pointwise(f) => exact([f.eval(u.initial())].into()),
            System::Autonomous { set, .. } => exact(set.iter().map(|x| x.initial()).collect()),
            System::Universe { n, .. } => exact(BitVec::all_of_width(*n).collect()),
            System::Delay { kind, .. } => exact(kind.initial_states(u)),
            System::Generated { init, .. } => exact(init.states(u.initial())),
            System::Complement(f) => mapped(f.initial_states(u, limits)?, &|v| v.complement()),
            System::Extend(f) => {
                let m = u.width() - 1;
                f.initial_states(&u.project(&(0..m).collect::<Vec<_>>())?, limits)?
            }
            System::Substitute { inner, from, to } => inner.initial_states(&substitute_input(u, *from, *to), limits)?,
            System::DropInput { inner, index } => inner.initial_states(&insert_zero(u, *index), limits)?,
            System::Union(f, g) => {
                let a = f.initial_states(u, limits)?;
                let b = g.initial_states(u, limits)?;
                InitialStates { states: a.states.union(&b.states).copied().collect(), exact: a.exact && b.exact }
            }
            System::UnionSet(f, set) => {
                let mut a = f.initial_states(u, limits)?;
                a.states.extend(set.iter().map(|x| x.initial()));
                a
            }
            System::Intersect(..) | System::IntersectSet(..) => {
                let e = self.enumerate(u, limits)?;
                if e.complete {
                    exact(e.members.iter().map(|x| x.initial()).collect())
                } else {
                    let (a, b) = match self {
                        System::Intersect(f, g) => (f.initial_states(u, limits)?, g.initial_states(u, limits)?),
                        System::IntersectSet(f, set) => {
                            (f.initial_states(u, limits)?, exact(set.iter().map(|x| x.initial()).collect()))
                        }
                        _ => unreachable!(),
                    };
                    InitialStates { states: a.states.intersection(&b.states).copied().collect(), exact: false }
                }
            }
            System::Parallel(parts) => {
                let us = split_io(parts, u)?;
                let mut acc: Vec<BitVec> = Vec::new();
                let mut all_exact = true;
                for (i, (p, ui)) in parts.iter().zip(&us).enumerate() {
                    let r = p.initial_states(ui, limits)?;
                    all_exact &= r.exact;
                    acc = if i == 0 {
                        r.states.into_iter().collect()
                    } else {
                        acc.iter().flat_map(|a| r.states.iter().map(move |b| BitVec::concat(&[*a, *b]))).collect()
                    };
                }
                InitialStates { states: acc.into_iter().collect(), exact: all_exact }
            }
            System::Serial { outer, inner } => {
                let e = self.enumerate(u, limits)?;
                if e.complete {
                    exact(e.members.iter().map(|x| x.initial()).collect())
                } else {
                    // phi of the outer system over every combination of inner
                    // initial states.
                    let us = split_io(inner, u)?;
                    let mut combos: Vec<BitVec> = Vec::new();
                    for (i, (g, ui)) in inner.iter().zip(&us).enumerate() {
                        let r = g.initial_states(ui, limits)?;
                        combos = if i == 0 {
                            r.states.into_iter().collect()
                        } else {
                            combos.iter().flat_map(|a| r.states.iter().map(move |b| BitVec::concat(&[*a, *b]))).collect()
                        };
                    }
                    let mut states = BTreeSet::new();
                    for y0 in combos {
                        states.extend(outer.initial_states(&Signal::constant(y0), limits)?.states);
                    }
                    InitialStates { states, exact: false }
                }
            }
        })
    }

    /// Union of `phi(u)` over the probes, and whether that is all of
    /// `Theta_f`.
    pub fn initial_state_set(&self, probes: &[Signal], limits: &Limits) -> Result<(BTreeSet<BitVec>, bool)> {
        let mut out = BTreeSet::new();
        for u in probes {
            out.extend(self.initial_states(u, limits)?.states);
        }
        if self.phi_input_independent() {
            if let Some(u) = probes.first() {
                let r = self.initial_states(u, limits)?;
                return Ok((r.states, r.exact));
            }
        }
        Ok((out, false))
    }

    /// `phi(u)` provably does not depend on `u`.
    pub fn phi_input_independent(&self) -> bool {
        match self {
            System::Autonomous { .. } | System::Universe { .. } => true,
            System::Generated { init: InitialStateSpec::ConstantSet(_), .. } => true,
            System::Complement(f) | System::Extend(f) => f.phi_input_independent(),
            System::Substitute { inner, .. } | System::DropInput { inner, .. } => inner.phi_input_independent(),
            System::Union(f, g) => f.phi_input_independent() && g.phi_input_independent(),
            System::UnionSet(f, _) => f.phi_input_independent(),
            System::Parallel(parts) => parts.iter().all(|p| p.phi_input_independent()),
            _ => false,
        }
    }

    /// `f(u) subset g(u)` on every probe: `No` with a witness as soon as a
    /// member of `f(u)` is refused by `g`, `Yes` only when every enumeration
    /// of `f` was complete and every membership was decided.
    pub fn includes(&self, g: &System, probes: &[Signal], limits: &Limits) -> Result<(Verdict, Option<(Signal, Signal)>)> {
        if self.arity() != g.arity() {
            return Err(Error::ArityMismatch(format!("arities {:?} and {:?} differ", self.arity(), g.arity())));
        }
        let mut verdict = Verdict::Yes;
        for u in probes {
            let e = self.enumerate(u, limits)?;
            if !e.complete {
                verdict = verdict.and(Verdict::Unknown("enumeration of the first system is not complete".into()));
            }
            for x in &e.members {
                match g.contains(u, x, limits)? {
                    Verdict::No => return Ok((Verdict::No, Some((u.clone(), x.clone())))),
                    Verdict::Yes => {}
                    v => verdict = verdict.and(v),
                }
            }
        }
        Ok((verdict, None))
    }
}

fn delay_grid(u: &Signal, limits: &Limits, declared: &[Rat]) -> Vec<Rat> {
    let mut grid: Vec<Rat> = vec![Rat::zero()];
    grid.extend(u.switches_until(limits.horizon + int(1)).iter().map(|e| e.time));
    grid.extend(limits.extra_times.iter().copied());
    grid.extend(declared.iter().copied());
    grid.retain(|t| *t >= Rat::zero() && *t <= limits.horizon);
    grid.sort();
    grid.dedup();
    grid
}

/// Candidate intermediate signals of a serial connection, flattened.
fn serial_intermediates(
    inner: &[System],
    u: &Signal,
    limits: &Limits,
    extra: &[Rat],
) -> Result<(Vec<Signal>, Enumeration)> {
    let us = split_io(inner, u)?;
    let lim = limits.with_extra(extra.iter().copied());
    let mut e = Enumeration::exact(BTreeSet::new());
    let mut lists = Vec::new();
    for (g, ui) in inner.iter().zip(&us) {
        let eg = g.enumerate(ui, &lim)?;
        e.exhaustive &= eg.exhaustive;
        e.complete &= eg.complete;
        lists.push(eg.members.into_iter().collect::<Vec<_>>());
    }
    let (tuples, truncated) = product(&lists, limits.max_members);
    if truncated {
        e.exhaustive = false;
        e.complete = false;
    }
    let ys = tuples.iter().map(|t| Signal::flatten(&t.iter().collect::<Vec<_>>())).collect::<Result<Vec<_>>>()?;
    Ok((ys, e))
}

fn serial_contains(outer: &System, inner: &[System], u: &Signal, x: &Signal, limits: &Limits) -> Result<Verdict> {
    let extra = switch_times(&[u, x], limits.horizon);
    let (ys, e) = serial_intermediates(inner, u, limits, &extra)?;
    let mut unknown = false;
    for y in &ys {
        match outer.contains(y, x, limits)? {
            Verdict::Yes => return Ok(Verdict::Yes),
            Verdict::No => {}
            Verdict::Unknown(_) => unknown = true,
        }
    }
    if e.complete && !unknown {
        Ok(Verdict::No)
    } else {
        Ok(Verdict::Unknown(format!("no intermediate signal found among {} candidates", ys.len())))
    }
}
