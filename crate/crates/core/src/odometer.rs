//! Supernatural numbers, odometer points and the factor coordinates of a shift.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tower::modulo;

/// Exponent of a prime in a supernatural number. `Infinite` absorbs everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    pub fn at_most(self, bound: u32) -> u32 {
        match self {
            Exponent::Finite(e) => e.min(bound),
            Exponent::Infinite => bound,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(e) => write!(f, "{e}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization of `n >= 1` in increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A formal product of prime powers with exponents in `{1, 2, ...} ∪ {∞}`.
///
/// Absent primes have exponent zero; zero exponents are never stored, so the
/// derived equality is exact equality of supernatural numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SupernaturalNumber {
    factors: BTreeMap<u64, Exponent>,
}

impl SupernaturalNumber {
    pub fn one() -> Self {
        SupernaturalNumber::default()
    }

    pub fn from_integer(n: u64) -> Self {
        assert!(n >= 1, "supernatural numbers are built from positive integers");
        SupernaturalNumber {
            factors: factorize(n)
                .into_iter()
                .map(|(p, e)| (p, Exponent::Finite(e)))
                .collect(),
        }
    }

    pub fn from_factors<I: IntoIterator<Item = (u64, Exponent)>>(factors: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, e) in factors {
            if !is_prime(p) {
                return Err(Error::parse(1, 1, format!("{p} is not prime")));
            }
            if e == Exponent::Finite(0) {
                continue;
            }
            if map.insert(p, e).is_some() {
                return Err(Error::parse(1, 1, format!("prime {p} listed twice")));
            }
        }
        Ok(SupernaturalNumber { factors: map })
    }

    /// `lcm(base · ratio^i : i ∈ N)`: primes of `ratio` get exponent ∞.
    pub fn lcm_of_geometric(base: u64, ratio: u64) -> Self {
        let mut u = SupernaturalNumber::from_integer(base);
        if ratio > 1 {
            for (p, _) in factorize(ratio) {
                u.factors.insert(p, Exponent::Infinite);
            }
        }
        u
    }

    /// lcm of a finite list of positive integers.
    pub fn lcm_of<I: IntoIterator<Item = u64>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(SupernaturalNumber::one(), |acc, n| {
                acc.lcm(&SupernaturalNumber::from_integer(n))
            })
    }

    pub fn exponent(&self, p: u64) -> Exponent {
        self.factors.get(&p).copied().unwrap_or(Exponent::Finite(0))
    }

    pub fn factors(&self) -> impl Iterator<Item = (u64, Exponent)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.values().all(|e| *e != Exponent::Infinite)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.keys().next_back().copied()
    }

    /// The value as an integer, when every exponent is finite and the product fits.
    pub fn to_integer(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, (&p, &e)| match e {
            Exponent::Finite(k) => acc.checked_mul(p.checked_pow(k)?),
            Exponent::Infinite => None,
        })
    }

    /// Pointwise maximum of exponents.
    pub fn lcm(&self, other: &SupernaturalNumber) -> SupernaturalNumber {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let slot = factors.entry(p).or_insert(e);
            *slot = (*slot).max(e);
        }
        SupernaturalNumber { factors }
    }

    /// Whether the positive integer `q` is a factor, i.e. its exponents are pointwise below.
    pub fn is_factor(&self, q: u64) -> bool {
        q >= 1
            && factorize(q)
                .into_iter()
                .all(|(p, e)| Exponent::Finite(e) <= self.exponent(p))
    }

    /// Pointwise comparison of exponents (`self | other`).
    pub fn divides(&self, other: &SupernaturalNumber) -> bool {
        self.factors.iter().all(|(&p, &e)| e <= other.exponent(p))
    }
}

impl PartialOrd for SupernaturalNumber {
    /// The divisibility order.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.divides(other), other.divides(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            match e {
                Exponent::Finite(1) => write!(f, "{p}")?,
                _ => write!(f, "{p}^{e}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for SupernaturalNumber {
    type Err = Error;

    /// Parses `2^inf * 5`; `1` is the empty product.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "1" {
            return Ok(SupernaturalNumber::one());
        }
        let mut factors = BTreeMap::new();
        let mut column = 1;
        for piece in s.split('*') {
            let lead = piece.len() - piece.trim_start().len();
            let col = column + lead;
            column += piece.len() + 1;
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Error::parse(1, col, "empty factor"));
            }
            let (base, exp) = match piece.split_once('^') {
                Some((b, e)) => (b.trim(), Some(e.trim())),
                None => (piece, None),
            };
            let p: u64 = base
                .parse()
                .map_err(|_| Error::parse(1, col, format!("bad prime {base:?}")))?;
            if !is_prime(p) {
                return Err(Error::parse(1, col, format!("{p} is not prime")));
            }
            let e = match exp {
                None => Exponent::Finite(1),
                Some("inf") => Exponent::Infinite,
                Some(e) => match e.parse::<u32>() {
                    Ok(0) | Err(_) => {
                        return Err(Error::parse(1, col, format!("bad exponent {e:?}")))
                    }
                    Ok(k) => Exponent::Finite(k),
                },
            };
            if factors.insert(p, e).is_some() {
                return Err(Error::parse(1, col, format!("prime {p} listed twice")));
            }
        }
        Ok(SupernaturalNumber { factors })
    }
}

pub fn supernatural_lcm(a: &SupernaturalNumber, b: &SupernaturalNumber) -> SupernaturalNumber {
    a.lcm(b)
}

pub fn supernatural_equal(a: &SupernaturalNumber, b: &SupernaturalNumber) -> bool {
    a == b
}

pub fn divides(q: u64, a: &SupernaturalNumber) -> bool {
    a.is_factor(q)
}

/// Odometers are conjugate exactly when their supernatural numbers agree.
pub fn odometers_conjugate(u: &SupernaturalNumber, v: &SupernaturalNumber) -> bool {
    u == v
}

/// A finite prefix `(m_0, ..., m_d)` of a point of the odometer along `(u_0, ..., u_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OdometerPoint {
    periods: Vec<u64>,
    coords: Vec<u64>,
}

impl OdometerPoint {
    pub fn new(periods: Vec<u64>, coords: Vec<u64>) -> Result<Self> {
        check_chain(&periods)?;
        if coords.len() != periods.len() {
            return Err(Error::InvalidPoint(format!(
                "{} coordinates for {} periods",
                coords.len(),
                periods.len()
            )));
        }
        for (i, (&m, &u)) in coords.iter().zip(&periods).enumerate() {
            if m >= u {
                return Err(Error::InvalidPoint(format!("coordinate {i} is {m} >= {u}")));
            }
            if i > 0 && m % periods[i - 1] != coords[i - 1] {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {i} is not coherent with coordinate {}",
                    i - 1
                )));
            }
        }
        Ok(OdometerPoint { periods, coords })
    }

    pub fn zero(periods: Vec<u64>) -> Result<Self> {
        let coords = vec![0; periods.len()];
        OdometerPoint::new(periods, coords)
    }

    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Adds `n` to every coordinate; `n = 1` is the odometer map.
    pub fn add(&self, n: i64) -> OdometerPoint {
        let coords = self
            .coords
            .iter()
            .zip(&self.periods)
            .map(|(&m, &u)| {
                let shift = n.rem_euclid(u as i64) as u64;
                (m + shift) % u
            })
            .collect();
        OdometerPoint {
            periods: self.periods.clone(),
            coords,
        }
    }
}

fn check_chain(periods: &[u64]) -> Result<()> {
    if periods.is_empty() {
        return Err(Error::InvalidPoint("empty period prefix".into()));
    }
    if let Some(u) = periods.iter().find(|&&u| u < 2) {
        return Err(Error::InvalidPoint(format!("period {u} must exceed 1")));
    }
    if let Some(w) = periods.windows(2).find(|w| w[1] % w[0] != 0) {
        return Err(Error::InvalidPoint(format!("{} does not divide {}", w[0], w[1])));
    }
    Ok(())
}

pub fn odometer_add(x: &OdometerPoint, n: i64) -> OdometerPoint {
    x.add(n)
}

/// Odometer coordinates of `σ^k(α)`: `m_i = k mod u_i`.
pub fn psi_coordinates(k: i64, periods: &[u64]) -> Result<OdometerPoint> {
    check_chain(periods)?;
    let coords = periods.iter().map(|&u| modulo(k, u as usize) as u64).collect();
    Ok(OdometerPoint {
        periods: periods.to_vec(),
        coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sn(s: &str) -> SupernaturalNumber {
        s.parse().unwrap()
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["2^inf * 5", "2^2 * 3 * 5", "1", "3^inf", "7^4"] {
            assert_eq!(sn(s).to_string(), s);
        }
        assert_eq!(sn(" 5 *2^inf ").to_string(), "2^inf * 5");
        assert_eq!(sn("2^1").to_string(), "2");
    }

    #[test]
    fn bad_text_rejected() {
        for s in ["4", "2^0", "2 * 2", "", "2 *", "x", "2^-1", "2^infinity"] {
            assert!(s.parse::<SupernaturalNumber>().is_err(), "{s}");
        }
        match "2 * 9".parse::<SupernaturalNumber>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(sn("2^2 * 5").lcm(&sn("2 * 3")), sn("2^2 * 3 * 5"));
        assert_eq!(sn("2^inf").lcm(&sn("2^3")), sn("2^inf"));
        assert_eq!(SupernaturalNumber::lcm_of([5, 10, 20, 40]), sn("2^3 * 5"));
        assert_eq!(SupernaturalNumber::lcm_of_geometric(5, 2), sn("2^inf * 5"));
    }

    #[test]
    fn divisibility_and_equality() {
        let u = sn("2^inf * 5");
        assert!(supernatural_equal(&u, &sn("2^inf * 5")));
        assert!(divides(40, &u));
        assert!(!divides(3, &u));
        assert!(!divides(25, &u));
        let a = SupernaturalNumber::lcm_of_geometric(2, 2);
        let b = SupernaturalNumber::lcm_of_geometric(2, 4);
        assert_eq!(a, b);
        assert_eq!(a, sn("2^inf"));
    }

    #[test]
    fn conjugacy_of_odometers() {
        let a = SupernaturalNumber::lcm_of_geometric(2, 2);
        let b = SupernaturalNumber::lcm_of_geometric(2, 4);
        assert!(odometers_conjugate(&a, &b));
        assert!(!odometers_conjugate(&sn("2^inf"), &sn("3^inf")));
        assert!(!odometers_conjugate(&sn("2^inf * 5"), &sn("2^inf")));
    }

    #[test]
    fn odometer_addition() {
        let x = OdometerPoint::new(vec![2, 4, 8], vec![1, 3, 7]).unwrap();
        assert_eq!(x.add(1).coords(), &[0, 0, 0]);
        let z = OdometerPoint::zero(vec![2, 4, 8]).unwrap();
        assert_eq!(z.add(5).coords(), &[1, 1, 5]);
        assert_eq!(x.add(8), x);
        assert_eq!(x.add(-1).coords(), &[0, 2, 6]);
    }

    #[test]
    fn incoherent_points_rejected() {
        assert!(OdometerPoint::new(vec![2, 4, 8], vec![1, 2, 7]).is_err());
        assert!(OdometerPoint::new(vec![2, 4, 8], vec![1, 3, 8]).is_err());
        assert!(OdometerPoint::new(vec![2, 6], vec![0, 0]).is_ok());
        assert!(OdometerPoint::new(vec![4, 6], vec![0, 0]).is_err());
        assert!(OdometerPoint::new(vec![1, 2], vec![0, 0]).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_coordinates(7, &[2, 4, 8]).unwrap().coords(), &[1, 3, 7]);
        assert_eq!(psi_coordinates(-1, &[2, 4, 8]).unwrap().coords(), &[1, 3, 7]);
        for k in -100..100 {
            let here = psi_coordinates(k, &[2, 4, 8]).unwrap();
            assert_eq!(psi_coordinates(k + 1, &[2, 4, 8]).unwrap(), here.add(1));
        }
    }
}
