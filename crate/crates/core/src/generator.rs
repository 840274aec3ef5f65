//! Generator functions `Phi: B^m x B^n -> B^n` and the unbounded-delay
//! trajectory sets they define.
//!
//! A state `x` belongs to `L(u, x0)` when `x(0-0) = x0`, every switch of a
//! coordinate takes the value of `Phi` computed from the left limits of `u`
//! and `x` at the switch time, and no coordinate stays excited towards a
//! fixed value forever without updating.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::bits::BitVec;
use crate::boolfn::{insert_bit, remove_bit, BoolFn, Transform};
use crate::error::{Error, Result};
use crate::rat::{int, Rat};
use crate::signal::Signal;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    m: usize,
    n: usize,
    table: BoolFn,
}

/// How a switch at the first grid point is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FirstTransition {
    /// Justified from left limits like every other switch.
    #[default]
    Justified,
    /// The first state switch is unconstrained when it does not come after
    /// the first input switch.
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub initial: BitVec,
    pub times: Vec<Rat>,
    pub states: Vec<BitVec>,
    /// Coordinates that changed at each grid time.
    pub masks: Vec<BitVec>,
}

impl Trajectory {
    pub fn to_signal(&self) -> Signal {
        let evs: Vec<(Rat, BitVec)> = self.times.iter().copied().zip(self.states.iter().copied()).collect();
        Signal::from_events(self.initial, &evs).expect("slot times increase")
    }

    /// `t,bits,mask` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,bits,mask\n");
        s.push_str(&format!("-,{},{}\n", self.initial, BitVec::zeros(self.initial.width())));
        for ((t, v), k) in self.times.iter().zip(&self.states).zip(&self.masks) {
            s.push_str(&format!("{t},{v},{k}\n"));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryConfig {
    pub max_internal_steps: usize,
    pub fairness_filter: bool,
    pub max_paths: usize,
    /// Extra grid points besides 0 and the input switch times.
    pub extra_times: Vec<Rat>,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig { max_internal_steps: 3, fairness_filter: true, max_paths: 1 << 14, extra_times: Vec::new() }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
    /// Every member whose switches lie on the slot grid is listed (no
    /// budget truncation).
    pub exhaustive: bool,
    /// The listed set is the whole trajectory set: no state was ever
    /// excited, so nothing can switch off the grid either.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Settling {
    Settles,
    /// A fair execution under input `lambda` cycling through `states`.
    Oscillates { lambda: BitVec, states: Vec<BitVec> },
}

/// Update times used by the enumerator: every base point, `steps` evenly
/// spaced points between consecutive base points, and `steps` unit steps
/// after the last one.
pub fn slot_times(base: &[Rat], steps: usize) -> Vec<Rat> {
    let mut out = Vec::new();
    let k = Rat::from_integer(steps as i64 + 1);
    for (i, &b) in base.iter().enumerate() {
        out.push(b);
        match base.get(i + 1) {
            Some(&next) => {
                for j in 1..=steps {
                    out.push(b + (next - b) * Rat::from_integer(j as i64) / k);
                }
            }
            None => {
                for j in 1..=steps {
                    out.push(b + Rat::from_integer(j as i64));
                }
            }
        }
    }
    out
}

impl Generator {
    pub fn new(m: usize, n: usize, table: BoolFn) -> Result<Generator> {
        if table.arity_in() != m + n || table.arity_out() != n {
            return Err(Error::ArityMismatch(format!(
                "generator table must be in {} out {n}, found in {} out {}",
                m + n,
                table.arity_in(),
                table.arity_out()
            )));
        }
        Ok(Generator { m, n, table })
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(BitVec, BitVec) -> BitVec) -> Generator {
        let table = BoolFn::from_fn(m + n, n, |lm| {
            let p = lm.split(&[m, n]);
            f(p[0], p[1])
        });
        Generator { m, n, table }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &BoolFn {
        &self.table
    }

    pub fn phi(&self, lambda: BitVec, mu: BitVec) -> BitVec {
        self.table.eval(BitVec::concat(&[lambda, mu]))
    }

    fn check(&self, lambda: BitVec, mu: BitVec) -> Result<()> {
        if lambda.width() != self.m || mu.width() != self.n {
            return Err(Error::ArityMismatch(format!(
                "generator expects ({}, {}), got ({}, {})",
                self.m,
                self.n,
                lambda.width(),
                mu.width()
            )));
        }
        Ok(())
    }

    pub fn excited_set(&self, lambda: BitVec, mu: BitVec) -> Vec<usize> {
        let p = self.phi(lambda, mu);
        (0..self.n).filter(|&i| p.get(i) != mu.get(i)).collect()
    }

    pub fn is_stable_point(&self, lambda: BitVec, mu: BitVec) -> bool {
        self.phi(lambda, mu) == mu
    }

    /// All `nu` with each `nu_i` in `{mu_i, Phi_i(lambda, mu)}`, ascending.
    pub fn successors(&self, lambda: BitVec, mu: BitVec) -> Result<Vec<BitVec>> {
        self.check(lambda, mu)?;
        Ok(self.successors_unchecked(lambda, mu))
    }

    fn successors_unchecked(&self, lambda: BitVec, mu: BitVec) -> Vec<BitVec> {
        let diff = self.phi(lambda, mu).bits() ^ mu.bits();
        let mut out = Vec::new();
        // Enumerate submasks of the excited set.
        let mut sub = diff;
        loop {
            out.push(BitVec::new(self.n, mu.bits() ^ sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & diff;
        }
        out.sort();
        out
    }

    pub fn stable_states(&self, lambda: BitVec) -> Vec<BitVec> {
        BitVec::all_of_width(self.n).filter(|&mu| self.is_stable_point(lambda, mu)).collect()
    }

    fn check_widths(&self, u: &Signal, x: &Signal) -> Result<()> {
        if u.width() != self.m {
            return Err(Error::WidthMismatch { expected: self.m, found: u.width() });
        }
        if x.width() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, found: x.width() });
        }
        Ok(())
    }

    /// Decides `x in L(u, x(0-0))` exactly.
    pub fn check_membership(&self, u: &Signal, x: &Signal, rule: FirstTransition) -> Result<bool> {
        self.check_widths(u, x)?;
        let joint = Signal::flatten(&[u, x])?;
        let widths = [self.m, self.n];
        let free_first = match (rule, x.first_switch(), u.first_switch()) {
            (FirstTransition::Free, Some(tx), Some(tu)) => tx <= tu,
            (FirstTransition::Free, Some(_), None) => true,
            _ => false,
        };
        let first_x = x.first_switch();
        for (t, before, after) in joint.transitions() {
            let b = before.split(&widths);
            let a = after.split(&widths);
            if a[1] == b[1] {
                continue;
            }
            if free_first && Some(t) == first_x {
                continue;
            }
            let target = self.phi(b[0], b[1]);
            let changed = a[1].bits() ^ b[1].bits();
            if (a[1].bits() ^ target.bits()) & changed != 0 {
                return Ok(false);
            }
        }
        match joint.tail() {
            None => {
                let last = joint.limit().unwrap().split(&widths);
                Ok(self.is_stable_point(last[0], last[1]))
            }
            Some(tail) => {
                let pts: Vec<Vec<BitVec>> = tail.pattern.iter().map(|(_, v)| v.split(&widths)).collect();
                for i in 0..self.n {
                    let held = pts.iter().all(|p| p[1].get(i) == pts[0][1].get(i));
                    let always_excited = pts.iter().all(|p| self.phi(p[0], p[1]).get(i) != p[1].get(i));
                    if held && always_excited {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Breadth-first enumeration of the trajectories whose updates happen at
    /// the slot times derived from the input switches.
    pub fn enumerate_trajectories(&self, u: &Signal, x0: BitVec, cfg: &TrajectoryConfig) -> Result<TrajectorySet> {
        if u.width() != self.m {
            return Err(Error::WidthMismatch { expected: self.m, found: u.width() });
        }
        if x0.width() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, found: x0.width() });
        }
        if u.tail().is_some() {
            return Err(Error::PeriodicTailUnsupported);
        }
        let mut base: Vec<Rat> = vec![Rat::zero()];
        base.extend(u.events().iter().map(|e| e.time));
        base.extend(cfg.extra_times.iter().copied().filter(|t| *t >= Rat::zero()));
        base.sort();
        base.dedup();
        let slots = slot_times(&base, cfg.max_internal_steps);
        let mut exhaustive = true;
        let mut excited = false;
        // Each path: (current state, states so far, masks so far).
        let mut paths: Vec<(BitVec, Vec<BitVec>, Vec<BitVec>)> = vec![(x0, Vec::new(), Vec::new())];
        for &t in &slots {
            let lambda = u.left_limit(t);
            let mut next = Vec::with_capacity(paths.len());
            for (mu, states, masks) in paths {
                excited |= !self.is_stable_point(lambda, mu);
                for nu in self.successors_unchecked(lambda, mu) {
                    if next.len() >= cfg.max_paths {
                        exhaustive = false;
                        break;
                    }
                    let mut s = states.clone();
                    s.push(nu);
                    let mut k = masks.clone();
                    k.push(BitVec::new(self.n, nu.bits() ^ mu.bits()));
                    next.push((nu, s, k));
                }
            }
            paths = next;
        }
        let final_lambda = u.limit().expect("no tail");
        let mut trajectories = Vec::new();
        for (mu, states, masks) in paths {
            excited |= !self.is_stable_point(final_lambda, mu);
            if cfg.fairness_filter && !self.is_stable_point(final_lambda, mu) {
                continue;
            }
            trajectories.push(Trajectory { initial: x0, times: slots.clone(), states, masks });
        }
        let complete = exhaustive && !excited && cfg.max_internal_steps > 0;
        Ok(TrajectorySet { trajectories, exhaustive, complete })
    }

    /// Closed-form membership for a constant generator: each coordinate
    /// switches at most once, from `x0_i` to the constant's `i`-th bit.
    pub fn constant_closed_form(&self, x0: BitVec, x: &Signal) -> Result<bool> {
        if !self.table.is_constant() {
            return Err(Error::NotConstantPhi);
        }
        if x.width() != self.n || x0.width() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, found: x.width() });
        }
        let x1 = self.table.rows()[0];
        if x.initial() != x0 || x.tail().is_some() {
            return Ok(false);
        }
        Ok((0..self.n).all(|i| {
            let xi = x.coord(i);
            if x0.get(i) == x1.get(i) {
                xi.is_constant()
            } else {
                xi.events().len() == 1
            }
        }))
    }

    pub fn gamma(&self, kind: Transform) -> Result<Generator> {
        let (m, n) = (self.m, self.n);
        match kind {
            Transform::Complement => Ok(Generator::from_fn(m, n, |l, mu| self.phi(l, mu.complement()).complement())),
            Transform::Extend => Ok(Generator::from_fn(m + 1, n, |l, mu| self.phi(remove_bit(l, m), mu))),
            Transform::Substitute { from, to } => {
                if from == to || from >= m || to >= m {
                    return Err(Error::ArityMismatch(format!("bad substitution {from}->{to}")));
                }
                Ok(Generator::from_fn(m, n, |l, mu| self.phi(l.with(to, l.get(from)), mu)))
            }
            Transform::Drop(i) => {
                if i >= m || m == 1 {
                    return Err(Error::ArityMismatch(format!("cannot drop input {i} of {m}")));
                }
                if let Some((a, b)) = self.table.depends_on(i) {
                    return Err(Error::DependsOnDroppedInput { input: i, a: a.to_string(), b: b.to_string() });
                }
                Ok(Generator::from_fn(m - 1, n, |l, mu| self.phi(insert_bit(l, i, false), mu)))
            }
        }
    }

    /// Whether every fair execution under every constant input reaches a
    /// stable point. Exact: a fair infinite execution exists iff some
    /// nontrivial strongly connected component of the proper-update graph
    /// has no coordinate that is held and excited throughout it.
    pub fn settling_check(&self) -> Settling {
        let size = 1usize << self.n;
        for lambda in BitVec::all_of_width(self.m) {
            let adj: Vec<Vec<usize>> = (0..size)
                .map(|s| {
                    let mu = BitVec::new(self.n, s as u64);
                    self.successors_unchecked(lambda, mu)
                        .into_iter()
                        .filter(|nu| *nu != mu)
                        .map(|nu| nu.bits() as usize)
                        .collect()
                })
                .collect();
            for comp in strongly_connected(&adj) {
                if comp.len() < 2 {
                    continue;
                }
                let states: Vec<BitVec> = comp.iter().map(|&s| BitVec::new(self.n, s as u64)).collect();
                let unfair = (0..self.n).any(|i| {
                    states.iter().all(|s| s.get(i) == states[0].get(i))
                        && states.iter().all(|s| self.phi(lambda, *s).get(i) != s.get(i))
                });
                if !unfair {
                    let mut states = states;
                    states.sort();
                    return Settling::Oscillates { lambda, states };
                }
            }
        }
        Settling::Settles
    }

    /// Runs a fair execution from `mu` under constant `lambda` until it is
    /// stable, choosing nonempty sets of excited coordinates with `pick`.
    pub fn settle_with(
        &self,
        lambda: BitVec,
        mut mu: BitVec,
        max_steps: usize,
        mut pick: impl FnMut(&[BitVec]) -> usize,
    ) -> Result<Vec<BitVec>> {
        let mut path = Vec::new();
        while !self.is_stable_point(lambda, mu) {
            if path.len() >= max_steps {
                return Err(Error::NotSettling(format!("no stable point within {max_steps} steps")));
            }
            let succ: Vec<BitVec> = self.successors_unchecked(lambda, mu).into_iter().filter(|s| *s != mu).collect();
            mu = succ[pick(&succ)];
            path.push(mu);
        }
        Ok(path)
    }

    /// Input-free: `Phi(lambda, mu)` does not depend on `lambda`.
    pub fn ignores_input(&self) -> bool {
        (0..self.m).all(|i| self.table.depends_on(i).is_none())
    }

    pub fn all_states_stable(&self) -> bool {
        BitVec::all_of_width(self.m).all(|l| BitVec::all_of_width(self.n).all(|mu| self.is_stable_point(l, mu)))
    }

    /// The generator whose every point is stable (`Phi(lambda, mu) = mu`).
    pub fn hold(m: usize, n: usize) -> Generator {
        Generator::from_fn(m, n, |_, mu| mu)
    }
}

/// Tarjan's algorithm; components in reverse topological order.
fn strongly_connected(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(st: &mut St, v: usize) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on[v] = true;
        for k in 0..st.adj[v].len() {
            let w = st.adj[v][k];
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on[w] => st.low[v] = st.low[v].min(iw),
                _ => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.out.push(comp);
        }
    }
    let n = adj.len();
    let mut st = St { adj, index: vec![None; n], low: vec![0; n], on: vec![false; n], stack: Vec::new(), next: 0, out: Vec::new() };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.out
}

/// Distinct trajectory signals of a set.
pub fn trajectory_signals(set: &TrajectorySet) -> BTreeSet<Signal> {
    set.trajectories.iter().map(|t| t.to_signal()).collect()
}

/// Unit-step schedule used by the mode constructor: `t + 1, t + 2, ..`.
pub fn unit_steps(t: Rat, k: usize) -> Vec<Rat> {
    (1..=k as i64).map(|j| t + int(j)).collect()
}
