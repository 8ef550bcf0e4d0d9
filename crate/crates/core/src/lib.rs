//! Exact and sketched algorithms for point sets in Hamming spaces.
//!
//! The crate covers:
//!
//! * bit-packed 0-1 matrices and small-alphabet symbol matrices ([`bits`]),
//!   with a shared plain-text format ([`text`]);
//! * the exact two-way correspondence between all-pairs Hamming distances
//!   and arithmetic 0-1 matrix products, plus an exact spanning-tree
//!   baseline ([`reduction`]);
//! * GF(2) random projections at geometrically spaced distance scales
//!   ([`sketch`]) and the approximate all-pairs distance procedure built on
//!   them ([`appapham`]), with approximate spanning trees and nearest
//!   neighbours;
//! * approximate 0-1 matrix products with per-entry error bounds
//!   ([`approxmm`]);
//! * the exact distance product whose running time follows the spanning-tree
//!   cost of the rows ([`msthamming`]);
//! * sketch-accelerated farthest-first clustering ([`clustering`]).
//!
//! Real-valued quantities (scales, approximate distances, estimated
//! products) are generic over [`Real`]; the aliases at the crate root fix
//! the scalar to `f64` or `f32`.

pub mod appapham;
pub mod approxmm;
pub mod bits;
pub mod clustering;
pub mod error;
pub mod generate;
pub mod msthamming;
pub mod reduction;
pub mod render;
pub mod sketch;
pub mod text;
pub mod tree;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use crate::appapham::{
    approx_mst, approx_mst_sigma, approx_nearest_neighbors, apphap, ApproxDistanceMatrix,
};
pub use crate::approxmm::{approx_product, entry_error_bounds, ApproxProductMatrix, Branch, ErrorSlack};
pub use crate::bits::{
    binary_embed, complement, hamming_distance, sigma_hamming_distance, BitMatrix, BitRow,
    BitVector, SymbolMatrix, SymbolRow,
};
pub use crate::clustering::{
    center_clustering, diameter_clustering, gonzalez_exact, CenterSketch, ClusteringResult,
};
pub use crate::error::{Error, Result};
pub use crate::msthamming::{
    build_traversal, mmst_distances, mmst_distances_with, output_sensitive_mst,
    output_sensitive_mst_with, MmstOptions, MmstStats, MstCostEstimate, Orientation, Traversal,
};
pub use crate::reduction::{
    distances_from_products, exact_mst, exact_product, product_from_distances, CountMatrix,
    DistanceMatrix, ProductMatrix,
};
pub use crate::sketch::{
    build_family, passes_at, project, SketchFamily, SketchOptions, SketchParams,
    ThresholdConstants, ThresholdSearch,
};
pub use crate::text::Matrix;
pub use crate::tree::{SpanningTree, TreeEdge};

/// Scalar used for scales, approximate distances and estimated products.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}

pub type SketchParamsF64 = SketchParams<f64>;
pub type SketchParamsF32 = SketchParams<f32>;
pub type SketchOptionsF64 = SketchOptions<f64>;
pub type SketchOptionsF32 = SketchOptions<f32>;
pub type SketchFamilyF64 = SketchFamily<f64>;
pub type SketchFamilyF32 = SketchFamily<f32>;
pub type ApproxDistancesF64 = ApproxDistanceMatrix<f64>;
pub type ApproxDistancesF32 = ApproxDistanceMatrix<f32>;
pub type ApproxProductF64 = ApproxProductMatrix<f64>;
pub type ApproxProductF32 = ApproxProductMatrix<f32>;
pub type SpanningTreeF64 = SpanningTree<f64>;
pub type SpanningTreeF32 = SpanningTree<f32>;
pub type ClusteringF64 = ClusteringResult<f64>;
pub type ClusteringF32 = ClusteringResult<f32>;
