//! Exact construction of the white and black circle laminations of an
//! expanding Thurston map described by two critical portraits.
//!
//! Start from a [`PortraitPair`] (parsed with [`parse_portrait_pair`] or
//! built directly), wrap it in a [`Tower`], and build levels on demand:
//!
//! ```
//! use lamina::{parse_portrait_pair, Color, Tower};
//!
//! let pair = parse_portrait_pair(r#"
//! degree = 3
//! white = [["1/9", "4/9", "7/9"]]
//! black = [["1/3", "2/3"], ["1/6", "5/6"]]
//! "#).unwrap();
//! let mut tower = Tower::new(pair).unwrap();
//! tower.build_to(2).unwrap();
//! assert_eq!(tower.gaps(Color::White, 2).len(), 9);
//! assert_eq!(tower.relation(Color::White, 2).class_count(), 19);
//! ```

pub mod angle;
pub mod boundary;
pub mod checks;
pub mod circuit;
mod dsu;
pub mod error;
pub mod lamination;
pub mod portrait;
pub mod relations;
pub mod render;

pub use angle::{cyclic_between, sets_cross, Angle, CyclicArc, OrbitDecomposition};
pub use boundary::{approx_class, big_g_class, fatou_class, gap_itinerary, ApproxClass, BigGClass, Certificate, GapItinerary, Side};
pub use checks::{run_invariants, InvariantReport, SuiteOptions};
pub use circuit::{check_semiconjugacy, circuit, entropy_measure_report, gap_boundary_measure, Circuit, MeasureReport};
pub use error::{AngleError, BuildError, ConfigError, PartitionError, PortraitError, RenderError};
pub use lamination::{
    angles_at_level, classify, connection_graph, ConnectionGraph, DynType, GapSet, LevelAngles, LevelRelation,
    Location, Stabilization, Tower, DEFAULT_BUDGET,
};
pub use portrait::{
    orbit_set, parse_portrait_pair, validate, Axiom, Color, CriticalPortrait, PortraitPair, Separation,
    ValidationReport, Verdict, ZeroData,
};
pub use relations::{join, level_join, meet, restriction_equal, vertex_cnc, CncPartition, IndexPartition, Partition};
pub use render::{render_lamination, render_tiling, turtle_trace, AngleRule, DiskStyle, GeometryConfig, LeafShape, TilingStyle, TurtleTrace};
