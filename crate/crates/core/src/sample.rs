//! Seeded random signals, functions and generators, plus a fixed probe
//! corpus.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitVec;
use crate::boolfn::BoolFn;
use crate::generator::Generator;
use crate::rat::{int, rat, Rat};
use crate::signal::{Event, Signal, Tail};

/// Shape of random signals.
#[derive(Clone, Debug)]
pub struct SignalGen {
    pub width: usize,
    pub max_events: usize,
    /// Event times are `k / denom` for `denom` drawn from this list.
    pub denominators: Vec<i64>,
    /// Latest transient event time.
    pub max_time: i64,
    /// Chance of appending a periodic tail.
    pub tail_probability: f64,
}

impl SignalGen {
    pub fn new(width: usize) -> SignalGen {
        SignalGen { width, max_events: 3, denominators: vec![1, 2], max_time: 4, tail_probability: 0.0 }
    }

    pub fn with_tails(mut self, p: f64) -> SignalGen {
        self.tail_probability = p;
        self
    }

    pub fn random_bits(&self, rng: &mut impl Rng) -> BitVec {
        random_bits(self.width, rng)
    }

    pub fn random_time(&self, rng: &mut impl Rng) -> Rat {
        let d = self.denominators[rng.gen_range(0..self.denominators.len())];
        rat(rng.gen_range(0..=self.max_time * d), d)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Signal {
        let k = rng.gen_range(0..=self.max_events);
        let mut times: Vec<Rat> = (0..k).map(|_| self.random_time(rng)).collect();
        times.sort();
        times.dedup();
        let events: Vec<Event> = times.into_iter().map(|t| Event::new(t, self.random_bits(rng))).collect();
        let tail = if rng.gen_bool(self.tail_probability) {
            let last = events.last().map_or(Rat::zero(), |e| e.time);
            let start = last + int(rng.gen_range(1..=2));
            let period = int(rng.gen_range(1..=2)) * int(2);
            let a = self.random_bits(rng);
            let mut b = self.random_bits(rng);
            if a == b {
                b = a.complement();
            }
            Some(Tail { start, period, pattern: vec![(Rat::zero(), a), (period / int(2), b)] })
        } else {
            None
        };
        Signal::new(self.width, self.random_bits(rng), events, tail).expect("valid by construction")
    }
}

pub fn random_bits(width: usize, rng: &mut impl Rng) -> BitVec {
    let bits = if width == 64 { rng.gen() } else { rng.gen_range(0..(1u64 << width)) };
    BitVec::new(width, bits)
}

pub fn random_boolfn(m: usize, n: usize, rng: &mut impl Rng) -> BoolFn {
    let rows = BitVec::all_of_width(m).map(|_| random_bits(n, rng)).collect();
    BoolFn::new(m, n, rows).expect("arity in range")
}

pub fn random_generator(m: usize, n: usize, rng: &mut impl Rng) -> Generator {
    Generator::new(m, n, random_boolfn(m + n, n, rng)).expect("arity in range")
}

/// Generator whose every execution under a constant input settles:
/// resampled until the settling check passes, then falls back to a
/// tracking generator.
pub fn random_settling_generator(m: usize, n: usize, rng: &mut impl Rng) -> Generator {
    for _ in 0..64 {
        let g = random_generator(m, n, rng);
        if g.settling_check() == crate::generator::Settling::Settles {
            return g;
        }
    }
    Generator::from_fn(m, n, |l, _| BitVec::new(n, l.bits() & ((1u64 << n.min(m)) - 1)))
}

/// The RNG for one trial; independent of evaluation order.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

/// Square wave `chi[0,1) + chi[2,3) + ..`.
pub fn square_wave() -> Signal {
    let tail = Tail { start: Rat::zero(), period: int(2), pattern: vec![(Rat::zero(), BitVec::ones(1)), (int(1), BitVec::zeros(1))] };
    Signal::new(1, BitVec::zeros(1), vec![], Some(tail)).expect("valid tail")
}

/// Fixed inputs tried before random ones: constants, unit steps at 0 and 1
/// in each coordinate, and (when `tails`) square waves in the first and in
/// all coordinates.
pub fn probe_corpus(width: usize, tails: bool) -> Vec<Signal> {
    let mut out: Vec<Signal> = Vec::new();
    let consts: Vec<BitVec> = if width <= 3 {
        BitVec::all_of_width(width).collect()
    } else {
        vec![BitVec::zeros(width), BitVec::ones(width)]
    };
    out.extend(consts.into_iter().map(Signal::constant));
    let z = BitVec::zeros(width);
    for at in [0, 1] {
        for i in 0..width {
            out.push(Signal::from_events(z, &[(int(at), z.with(i, true))]).expect("one event"));
        }
    }
    if tails {
        let sq = square_wave();
        let zero = Signal::constant(BitVec::zeros(1));
        let mut first = vec![&sq];
        first.extend(std::iter::repeat(&zero).take(width - 1));
        out.push(Signal::flatten(&first).expect("widths"));
        if width > 1 {
            out.push(Signal::flatten(&vec![&sq; width]).expect("widths"));
        }
    }
    out
}
