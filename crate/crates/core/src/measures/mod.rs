//! Discrete measures on curves in the plane, the curve families they are
//! built from, and elementary distances between them.

mod curve;
mod measure;
mod transport;

pub use curve::{
    quadrature_measure, sample_iid, CurveKind, ParametricCurve, ARC_TABLE_NODES, NODES_PER_PERIOD,
};
pub use measure::{DiscreteMeasure, MeasureKind};
pub use transport::{circular_w1, displacement_cost, hausdorff_distance, project_to_circle};
