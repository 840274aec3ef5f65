//! Exact rational time.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Rat {
    Ratio::from_integer(n)
}

/// Parses `P/Q` or `P`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                None
            } else {
                Some(Ratio::new(p, q))
            }
        }
        None => s.parse::<i64>().ok().map(Ratio::from_integer),
    }
}

/// Least common multiple of two positive rationals.
pub fn lcm(a: Rat, b: Rat) -> Rat {
    debug_assert!(a.is_positive() && b.is_positive());
    let n = a.numer().lcm(b.numer());
    let d = a.denom().gcd(b.denom());
    Ratio::new(n, d)
}

/// `t` reduced into `[0, period)`.
pub fn modulo(t: Rat, period: Rat) -> Rat {
    let k = (t / period).floor();
    let r = t - k * period;
    debug_assert!(!r.is_negative() && r < period);
    r
}

pub fn is_zero(t: &Rat) -> bool {
    t.is_zero()
}
