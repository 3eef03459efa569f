//! Exact points of the circle ℚ/ℤ and the angle map `t ↦ d·t mod 1`.
//!
//! Every angle is stored as a reduced fraction `p/q` with `0 ≤ p < q`.
//! Integers are arbitrary precision, so denominators of the form `q·dⁿ`
//! never overflow no matter how deep a tower is built.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::AngleError;

/// A rational point of the circle `ℝ/ℤ`, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle {
    num: BigUint,
    den: BigUint,
}

impl Angle {
    pub fn zero() -> Angle {
        Angle {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    /// Canonical representative of `p/q mod 1`.
    pub fn reduce(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Angle, AngleError> {
        let p = p.into();
        let q = q.into();
        if q.sign() != Sign::Plus {
            return Err(AngleError::NonPositiveDenominator);
        }
        let r = p.mod_floor(&q);
        let num = r.to_biguint().expect("mod_floor with positive modulus is non-negative");
        let den = q.to_biguint().expect("positive");
        Ok(Angle::from_unsigned(num, den))
    }

    /// `num/den mod 1` for an already non-negative numerator and positive denominator.
    pub fn from_unsigned(num: BigUint, den: BigUint) -> Angle {
        assert!(!den.is_zero(), "zero denominator");
        let num = num % &den;
        if num.is_zero() {
            return Angle::zero();
        }
        let g = num.gcd(&den);
        Angle {
            num: num / &g,
            den: den / g,
        }
    }

    /// Convenience constructor for small literals.
    pub fn new(p: i64, q: i64) -> Result<Angle, AngleError> {
        Angle::reduce(p, q)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `d·a mod 1`.
    pub fn mu(&self, d: u32) -> Angle {
        Angle::from_unsigned(&self.num * d, self.den.clone())
    }

    /// `μᵈ` applied `n` times.
    pub fn mu_iter(&self, d: u32, n: usize) -> Angle {
        let mut a = self.clone();
        for _ in 0..n {
            a = a.mu(d);
        }
        a
    }

    /// The `d` solutions of `μ_d(x) = a`, in increasing order from 0.
    pub fn preimages(&self, d: u32) -> Vec<Angle> {
        let den = &self.den * d;
        (0..d)
            .map(|i| Angle::from_unsigned(&self.num + &self.den * i, den.clone()))
            .collect()
    }

    /// Preperiod/cycle decomposition of the forward orbit under `μ_d`.
    pub fn orbit(&self, d: u32) -> OrbitDecomposition {
        let mut seen: HashMap<Angle, usize> = HashMap::new();
        let mut seq = Vec::new();
        let mut a = self.clone();
        loop {
            if let Some(&i) = seen.get(&a) {
                let cycle = seq.split_off(i);
                return OrbitDecomposition {
                    preperiod: seq,
                    cycle,
                };
            }
            seen.insert(a.clone(), seq.len());
            let next = a.mu(d);
            seq.push(a);
            a = next;
        }
    }

    /// Counterclockwise distance from `self` to `other`, in `[0, 1)`.
    pub fn ccw_distance_to(&self, other: &Angle) -> BigRational {
        let a = self.to_rational();
        let b = other.to_rational();
        let mut diff = b - a;
        if diff < BigRational::zero() {
            diff += BigRational::one();
        }
        diff
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }

    /// Reduce an arbitrary rational modulo 1.
    pub fn from_rational(r: &BigRational) -> Angle {
        Angle::reduce(r.numer().clone(), r.denom().clone()).expect("rational denominators are positive")
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_rational();
        r.to_f64().unwrap_or_else(|| {
            // Huge operands: scale both down before dividing.
            let shift = self.den.bits().saturating_sub(60);
            let n = (&self.num >> shift).to_f64().unwrap_or(0.0);
            let d = (&self.den >> shift).to_f64().unwrap_or(1.0);
            n / d
        })
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Angle {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Angle, AngleError> {
        let t = s.trim();
        let bad = || AngleError::Syntax(s.to_string());
        match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Angle::reduce(p, q)
            }
            None => {
                let p: BigInt = t.parse().map_err(|_| bad())?;
                Angle::reduce(p, 1)
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Angle, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Closed counterclockwise arc from `start` to `end`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicArc {
    pub start: Angle,
    pub end: Angle,
}

impl CyclicArc {
    pub fn new(start: Angle, end: Angle) -> Result<CyclicArc, AngleError> {
        if start == end {
            return Err(AngleError::DegenerateArc(start.to_string()));
        }
        Ok(CyclicArc { start, end })
    }

    pub fn length(&self) -> BigRational {
        self.start.ccw_distance_to(&self.end)
    }

    /// Inclusive membership.
    pub fn contains(&self, x: &Angle) -> bool {
        self.start.ccw_distance_to(x) <= self.length()
    }
}

impl fmt::Display for CyclicArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub preperiod: Vec<Angle>,
    pub cycle: Vec<Angle>,
}

impl OrbitDecomposition {
    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn len(&self) -> usize {
        self.preperiod.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = &Angle> {
        self.preperiod.iter().chain(self.cycle.iter())
    }
}

/// Whether `b` lies strictly inside the counterclockwise arc from `a` to `c`.
pub fn cyclic_between(a: &Angle, b: &Angle, c: &Angle) -> Result<bool, AngleError> {
    if a == b || b == c || a == c {
        return Err(AngleError::Coincident);
    }
    Ok(if a < c { a < b && b < c } else { b > a || b < c })
}

/// Whether two disjoint finite sets have interleaved points `a < b < c < d`
/// with `a, c` from one set and `b, d` from the other.
pub fn sets_cross(a: &[Angle], b: &[Angle]) -> Result<bool, AngleError> {
    if a.is_empty() || b.is_empty() {
        return Err(AngleError::EmptySet);
    }
    let mut tagged: Vec<(&Angle, bool)> = a
        .iter()
        .map(|x| (x, false))
        .chain(b.iter().map(|x| (x, true)))
        .collect();
    tagged.sort_by(|x, y| x.0.cmp(y.0));
    if tagged.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(AngleError::NotDisjoint);
    }
    // Interleaving means at least four maximal runs around the circle.
    let changes = (0..tagged.len())
        .filter(|&i| tagged[i].1 != tagged[(i + 1) % tagged.len()].1)
        .count();
    Ok(changes >= 4)
}
