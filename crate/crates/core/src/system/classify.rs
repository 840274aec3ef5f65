//! Structural autonomy, finitude and determinism.

use std::fmt;

use super::{InitialStateSpec, System, Verdict};
use crate::bits::BitVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub autonomous: Verdict,
    pub finite: Verdict,
    pub deterministic: Verdict,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "autonomous={} finite={} deterministic={}",
            self.autonomous.label(),
            self.finite.label(),
            self.deterministic.label()
        )
    }
}

fn unknown() -> Verdict {
    Verdict::Unknown("structure is insufficient".into())
}

fn yes_or_unknown(v: Verdict) -> Verdict {
    if v.is_yes() {
        v
    } else {
        unknown()
    }
}

fn all_yes(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
    vs.into_iter().fold(Verdict::Yes, Verdict::and)
}

impl System {
    pub fn classify(&self) -> Classification {
        use Verdict::{No, Yes};
        let c = |a, f, d| Classification { autonomous: a, finite: f, deterministic: d };
        match self {
            System::IdealDelay { .. } => c(No, Yes, Yes),
            System::Pointwise(f) => c(Verdict::from_bool(f.is_constant()), Yes, Yes),
            System::Autonomous { set, .. } => c(Yes, Yes, Verdict::from_bool(set.len() == 1)),
            System::Universe { .. } => c(Yes, No, No),
            System::Delay { kind, .. } => {
                let finite = if kind.is_infinite() { No } else { Yes };
                c(Verdict::from_bool(kind.is_autonomous()), finite, Verdict::from_bool(kind.is_deterministic()))
            }
            System::Generated { gen, init } => {
                let m = gen.m();
                // An initial state that some input excites can wait an
                // arbitrary time before switching.
                let movable = BitVec::all_of_width(m).any(|l0| {
                    init.states(l0).iter().any(|mu| BitVec::all_of_width(m).any(|l| !gen.is_stable_point(l, *mu)))
                });
                let (finite, det) = if movable {
                    (No, No)
                } else {
                    let single = BitVec::all_of_width(m).all(|l| init.states(l).len() == 1);
                    (Yes, Verdict::from_bool(single))
                };
                let autonomous = match init {
                    InitialStateSpec::ConstantSet(_) if !movable || gen.ignores_input() => Yes,
                    _ if !movable => {
                        let first = init.states(BitVec::zeros(m));
                        Verdict::from_bool(BitVec::all_of_width(m).all(|l| init.states(l) == first))
                    }
                    _ => unknown(),
                };
                c(autonomous, finite, det)
            }
            System::Complement(f) | System::Extend(f) => f.classify(),
            System::Substitute { inner, .. } | System::DropInput { inner, .. } => {
                let k = inner.classify();
                c(yes_or_unknown(k.autonomous), yes_or_unknown(k.finite), yes_or_unknown(k.deterministic))
            }
            System::Intersect(f, g) => {
                let (a, b) = (f.classify(), g.classify());
                c(
                    yes_or_unknown(a.autonomous.and(b.autonomous)),
                    yes_or_unknown(a.finite.or(b.finite)),
                    yes_or_unknown(a.deterministic.or(b.deterministic)),
                )
            }
            System::Union(f, g) => {
                let (a, b) = (f.classify(), g.classify());
                let finite = a.finite.clone().and(b.finite.clone());
                let det = if finite.is_no() { No } else { unknown() };
                c(yes_or_unknown(a.autonomous.and(b.autonomous)), finite, det)
            }
            System::IntersectSet(f, set) => {
                let a = f.classify();
                let det = if set.len() == 1 { Yes } else { yes_or_unknown(a.deterministic) };
                c(yes_or_unknown(a.autonomous), Yes, det)
            }
            System::UnionSet(f, _) => {
                let a = f.classify();
                let det = if a.finite.is_no() { No } else { unknown() };
                c(yes_or_unknown(a.autonomous), a.finite, det)
            }
            System::Parallel(parts) => {
                let ks: Vec<Classification> = parts.iter().map(|p| p.classify()).collect();
                c(
                    all_yes(ks.iter().map(|k| k.autonomous.clone())),
                    all_yes(ks.iter().map(|k| k.finite.clone())),
                    all_yes(ks.iter().map(|k| k.deterministic.clone())),
                )
            }
            System::Serial { outer, inner } => {
                let o = outer.classify();
                let ks: Vec<Classification> = inner.iter().map(|p| p.classify()).collect();
                let inner_auto = all_yes(ks.iter().map(|k| k.autonomous.clone()));
                let autonomous = if o.autonomous.is_yes() || inner_auto.is_yes() { Yes } else { unknown() };
                let finite = all_yes(ks.iter().map(|k| k.finite.clone()).chain([o.finite]));
                let det = all_yes(ks.iter().map(|k| k.deterministic.clone()).chain([o.deterministic]));
                c(autonomous, yes_or_unknown(finite), yes_or_unknown(det))
            }
        }
    }
}
