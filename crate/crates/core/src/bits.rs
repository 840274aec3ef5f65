//! Fixed-width Boolean vectors. Coordinate 0 is the most significant bit, so
//! the packed value doubles as a lexicographic truth-table row index.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    width: u8,
    bits: u64,
}

fn mask(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl BitVec {
    pub fn new(width: usize, bits: u64) -> Self {
        assert!(width <= MAX_WIDTH, "bit vector width {width} too large");
        BitVec { width: width as u8, bits: bits & mask(width) }
    }

    pub fn zeros(width: usize) -> Self {
        Self::new(width, 0)
    }

    pub fn ones(width: usize) -> Self {
        Self::new(width, u64::MAX)
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        let mut v = Self::zeros(bools.len());
        for (i, &b) in bools.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_WIDTH {
            return Err(Error::Invalid(format!("bad bit string `{s}`")));
        }
        let mut bools = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bools.push(false),
                '1' => bools.push(true),
                _ => return Err(Error::Invalid(format!("bad bit string `{s}`"))),
            }
        }
        Ok(Self::from_bools(&bools))
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Packed value; equals the lexicographic row index.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.width());
        (self.bits >> (self.width() - 1 - i)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.width());
        let m = 1u64 << (self.width() - 1 - i);
        if b {
            self.bits |= m;
        } else {
            self.bits &= !m;
        }
    }

    pub fn with(mut self, i: usize, b: bool) -> Self {
        self.set(i, b);
        self
    }

    pub fn complement(&self) -> Self {
        Self::new(self.width(), !self.bits)
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn all(&self) -> bool {
        self.bits == mask(self.width())
    }

    /// `out[k] = self[index[k]]`.
    pub fn select(&self, index: &[usize]) -> Self {
        let mut out = Self::zeros(index.len());
        for (k, &i) in index.iter().enumerate() {
            out.set(k, self.get(i));
        }
        out
    }

    pub fn concat(parts: &[BitVec]) -> Self {
        let width: usize = parts.iter().map(|p| p.width()).sum();
        let mut bits = 0u64;
        for p in parts {
            bits = if p.width() == 64 { p.bits } else { (bits << p.width()) | p.bits };
        }
        Self::new(width, bits)
    }

    /// Splits into consecutive pieces of the given widths.
    pub fn split(&self, widths: &[usize]) -> Vec<BitVec> {
        let mut out = Vec::with_capacity(widths.len());
        let mut pos = 0;
        for &w in widths {
            let idx: Vec<usize> = (pos..pos + w).collect();
            out.push(self.select(&idx));
            pos += w;
        }
        out
    }

    /// All vectors of the given width in lexicographic order.
    pub fn all_of_width(width: usize) -> impl Iterator<Item = BitVec> {
        assert!(width < 32);
        (0..(1u64 << width)).map(move |b| BitVec::new(width, b))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}
