//! Portrait pairs shared by the benchmarks.

use lamina::PortraitPair;

/// The degree-4 Lattès example with `k = 4`.
pub fn lattes_pair() -> PortraitPair {
    PortraitPair::from_ratios(
        4,
        &[&[(2, 16), (10, 16)], &[(3, 16), (7, 16)], &[(11, 16), (15, 16)]],
        &[&[(1, 16), (5, 16)], &[(6, 16), (14, 16)], &[(9, 16), (13, 16)]],
    )
    .expect("valid portrait")
}

/// The cubic example with `k = 3`.
pub fn cubic_pair() -> PortraitPair {
    PortraitPair::from_ratios(3, &[&[(1, 9), (4, 9), (7, 9)]], &[&[(1, 3), (2, 3)], &[(1, 6), (5, 6)]])
        .expect("valid portrait")
}
