//! Dense truth tables `B^m -> B^n`.

use std::collections::BTreeSet;

use crate::bits::BitVec;
use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BoolFn {
    m: usize,
    n: usize,
    table: Vec<BitVec>,
}

/// Coordinate transforms on functions; indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    Complement,
    Extend,
    Substitute { from: usize, to: usize },
    Drop(usize),
}

fn check_arity(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 || m > MAX_ARITY || n > MAX_ARITY {
        return Err(Error::ArityMismatch(format!("arities must be in 1..={MAX_ARITY}, got in {m} out {n}")));
    }
    Ok(())
}

/// `lambda` with a coordinate `b` inserted at position `i`.
pub fn insert_bit(lambda: BitVec, i: usize, b: bool) -> BitVec {
    let w = lambda.width();
    let head = lambda.select(&(0..i).collect::<Vec<_>>());
    let rest = lambda.select(&(i..w).collect::<Vec<_>>());
    BitVec::concat(&[head, BitVec::new(1, b as u64), rest])
}

/// `lambda` with coordinate `i` removed.
pub fn remove_bit(lambda: BitVec, i: usize) -> BitVec {
    let idx: Vec<usize> = (0..lambda.width()).filter(|&k| k != i).collect();
    lambda.select(&idx)
}

impl BoolFn {
    pub fn new(m: usize, n: usize, table: Vec<BitVec>) -> Result<BoolFn> {
        check_arity(m, n)?;
        if table.len() != 1 << m {
            return Err(Error::ArityMismatch(format!("expected {} rows, found {}", 1 << m, table.len())));
        }
        if let Some(r) = table.iter().find(|r| r.width() != n) {
            return Err(Error::WidthMismatch { expected: n, found: r.width() });
        }
        Ok(BoolFn { m, n, table })
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(BitVec) -> BitVec) -> BoolFn {
        check_arity(m, n).expect("arity in range");
        let table = BitVec::all_of_width(m)
            .map(|l| {
                let r = f(l);
                assert_eq!(r.width(), n, "row width");
                r
            })
            .collect();
        BoolFn { m, n, table }
    }

    pub fn identity(m: usize) -> BoolFn {
        BoolFn::from_fn(m, m, |l| l)
    }

    pub fn constant(m: usize, mu: BitVec) -> BoolFn {
        BoolFn::from_fn(m, mu.width(), |_| mu)
    }

    pub fn and(m: usize) -> BoolFn {
        BoolFn::from_fn(m, 1, |l| BitVec::new(1, l.all() as u64))
    }

    pub fn or(m: usize) -> BoolFn {
        BoolFn::from_fn(m, 1, |l| BitVec::new(1, (l.bits() != 0) as u64))
    }

    pub fn xor(m: usize) -> BoolFn {
        BoolFn::from_fn(m, 1, |l| BitVec::new(1, (l.count_ones() % 2) as u64))
    }

    pub fn not() -> BoolFn {
        BoolFn::from_fn(1, 1, |l| l.complement())
    }

    /// `lambda -> lambda_i`.
    pub fn projection(m: usize, i: usize) -> BoolFn {
        BoolFn::from_fn(m, 1, |l| l.select(&[i]))
    }

    pub fn arity_in(&self) -> usize {
        self.m
    }

    pub fn arity_out(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.table
    }

    pub fn eval(&self, lambda: BitVec) -> BitVec {
        debug_assert_eq!(lambda.width(), self.m);
        self.table[lambda.bits() as usize]
    }

    pub fn apply(&self, lambda: BitVec) -> Result<BitVec> {
        if lambda.width() != self.m {
            return Err(Error::ArityMismatch(format!("expected {} inputs, got {}", self.m, lambda.width())));
        }
        Ok(self.eval(lambda))
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|r| *r == self.table[0])
    }

    pub fn depends_on(&self, i: usize) -> Option<(BitVec, BitVec)> {
        BitVec::all_of_width(self.m)
            .filter(|l| !l.get(i))
            .map(|l| (l, l.with(i, true)))
            .find(|(a, b)| self.eval(*a) != self.eval(*b))
    }

    pub fn transform(&self, kind: Transform) -> Result<BoolFn> {
        match kind {
            Transform::Complement => Ok(BoolFn::from_fn(self.m, self.n, |l| self.eval(l).complement())),
            Transform::Extend => {
                check_arity(self.m + 1, self.n)?;
                Ok(BoolFn::from_fn(self.m + 1, self.n, |l| self.eval(remove_bit(l, self.m))))
            }
            Transform::Substitute { from, to } => {
                if from == to || from >= self.m || to >= self.m {
                    return Err(Error::ArityMismatch(format!("bad substitution {from}->{to}")));
                }
                Ok(BoolFn::from_fn(self.m, self.n, |l| self.eval(l.with(to, l.get(from)))))
            }
            Transform::Drop(i) => {
                if i >= self.m || self.m == 1 {
                    return Err(Error::ArityMismatch(format!("cannot drop input {i} of {}", self.m)));
                }
                if let Some((a, b)) = self.depends_on(i) {
                    return Err(Error::DependsOnDroppedInput { input: i, a: a.to_string(), b: b.to_string() });
                }
                Ok(self.restrict_zero(i))
            }
        }
    }

    /// `F(lambda_1, .., 0, .., lambda_m)` with the fixed coordinate removed,
    /// without checking independence.
    pub fn restrict_zero(&self, i: usize) -> BoolFn {
        BoolFn::from_fn(self.m - 1, self.n, |l| self.eval(insert_bit(l, i, false)))
    }

    /// `F o (F1, .., Fp)` where all `Fi` read the same input.
    pub fn compose(&self, inner: &[BoolFn]) -> Result<BoolFn> {
        let outs: usize = inner.iter().map(|g| g.n).sum();
        if outs != self.m || inner.is_empty() {
            return Err(Error::ArityMismatch(format!("inner outputs {outs} != outer inputs {}", self.m)));
        }
        let m = inner[0].m;
        if inner.iter().any(|g| g.m != m) {
            return Err(Error::ArityMismatch("inner functions differ in input arity".into()));
        }
        Ok(BoolFn::from_fn(m, self.n, |l| {
            let mid: Vec<BitVec> = inner.iter().map(|g| g.eval(l)).collect();
            self.eval(BitVec::concat(&mid))
        }))
    }

    /// `F o (F1, .., Fp)` where `Fi` reads its own block of inputs, as in a
    /// serial connection.
    pub fn compose_blocks(&self, inner: &[BoolFn]) -> Result<BoolFn> {
        let outs: usize = inner.iter().map(|g| g.n).sum();
        if outs != self.m {
            return Err(Error::ArityMismatch(format!("inner outputs {outs} != outer inputs {}", self.m)));
        }
        let prod = BoolFn::direct_product(inner)?;
        self.compose(&[prod])
    }

    pub fn direct_product(parts: &[BoolFn]) -> Result<BoolFn> {
        if parts.is_empty() {
            return Err(Error::ArityMismatch("empty product".into()));
        }
        let m: usize = parts.iter().map(|g| g.m).sum();
        let n: usize = parts.iter().map(|g| g.n).sum();
        check_arity(m, n)?;
        let widths: Vec<usize> = parts.iter().map(|g| g.m).collect();
        Ok(BoolFn::from_fn(m, n, |l| {
            let outs: Vec<BitVec> = l.split(&widths).iter().zip(parts).map(|(x, g)| g.eval(*x)).collect();
            BitVec::concat(&outs)
        }))
    }

    pub fn is_coord_symmetric(&self) -> bool {
        (0..self.m.saturating_sub(1)).all(|i| {
            let mut sigma: Vec<usize> = (0..self.m).collect();
            sigma.swap(i, i + 1);
            BitVec::all_of_width(self.m).all(|l| self.eval(l) == self.eval(l.select(&sigma)))
        })
    }

    pub fn is_rf_symmetric(&self) -> bool {
        BitVec::all_of_width(self.m).all(|l| self.eval(l) == self.eval(l.complement()).complement())
    }

    pub fn range(&self) -> BTreeSet<BitVec> {
        self.table.iter().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.range().len() == self.table.len()
    }

    /// Lexicographically least `lambda` with `F(lambda) = target`.
    pub fn least_preimage(&self, target: BitVec) -> Option<BitVec> {
        BitVec::all_of_width(self.m).find(|l| self.eval(*l) == target)
    }

    /// Whether equal values of `self` force equal values of `g`.
    pub fn refines(&self, g: &BoolFn) -> bool {
        let rows = 1usize << self.m;
        (0..rows).all(|a| (a + 1..rows).all(|b| self.table[a] != self.table[b] || g.table[a] == g.table[b]))
    }
}
