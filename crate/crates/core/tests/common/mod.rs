#![allow(dead_code)]

use lamina::{Angle, PortraitPair};
use num_bigint::BigInt;
use num_rational::BigRational;

type Classes<'a> = &'a [&'a [(i64, i64)]];

pub const G_WHITE: Classes = &[&[(2, 16), (10, 16)], &[(3, 16), (7, 16)], &[(11, 16), (15, 16)]];
pub const G_BLACK: Classes = &[&[(1, 16), (5, 16)], &[(6, 16), (14, 16)], &[(9, 16), (13, 16)]];

pub fn g() -> PortraitPair {
    PortraitPair::from_ratios(4, G_WHITE, G_BLACK).unwrap()
}

pub fn r4() -> PortraitPair {
    PortraitPair::from_ratios(3, &[&[(1, 9), (4, 9), (7, 9)]], &[&[(1, 3), (2, 3)], &[(1, 6), (5, 6)]]).unwrap()
}

pub fn r2() -> PortraitPair {
    PortraitPair::from_ratios(
        4,
        &[&[(7, 60), (22, 60), (37, 60)], &[(43, 60), (58, 60)]],
        &[&[(15, 60), (30, 60), (45, 60)], &[(13, 60), (58, 60)]],
    )
    .unwrap()
}

/// Degree-2 pair whose white class {0, 1/2} contains its own image.
pub fn fatou_pair() -> PortraitPair {
    PortraitPair::from_ratios(2, &[&[(0, 1), (1, 2)]], &[&[(1, 12), (7, 12)]]).unwrap()
}

pub fn reference_pairs() -> Vec<(&'static str, PortraitPair)> {
    vec![("g", g()), ("R4", r4()), ("R2", r2())]
}

pub fn ang(p: i64, q: i64) -> Angle {
    Angle::new(p, q).unwrap()
}

pub fn rat(a: &Angle) -> BigRational {
    BigRational::new(BigInt::from(a.numerator().clone()), BigInt::from(a.denominator().clone()))
}

/// `μ⁻ⁿ(A⁰)` by repeated division, sorted; written without the library's preimage code.
pub fn level_set_oracle(zero: &[Angle], d: i64, n: usize) -> Vec<BigRational> {
    let mut set: Vec<BigRational> = zero.iter().map(rat).collect();
    for _ in 0..n {
        let mut next = Vec::with_capacity(set.len() * d as usize);
        for x in &set {
            for i in 0..d {
                next.push((x + BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(d)));
            }
        }
        set = next;
    }
    set.sort();
    set.dedup();
    set
}

/// Do chords `{a, b}` and `{c, e}` of the unit circle cross in their interiors?
pub fn chords_cross(a: &BigRational, b: &BigRational, c: &BigRational, e: &BigRational) -> bool {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let inside = |x: &BigRational| lo < x && x < hi;
    let distinct = [c, e].iter().all(|x| *x != a && *x != b);
    distinct && inside(c) != inside(e)
}
