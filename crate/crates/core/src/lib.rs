//! Exact-arithmetic erasure coding over Galois rings.
//!
//! The crate builds Galois rings GR(p^n, m), realizes the extension
//! GR(p^n, ml) over GR(p^n, m) with a trace-dual basis, evaluates and decodes
//! generalized Reed-Solomon codes over subtractive point sets, and repairs a
//! single erased coordinate by downloading one subring symbol from every
//! surviving node instead of k full symbols. A small on-disk shard store
//! simulates the distributed-storage side.
//!
//! All arithmetic is exact; every equality in the test suite is bitwise.

mod error;
mod fppoly;
pub mod grs;
pub mod repair;
pub mod ring;
pub mod storage;
pub mod tower;
pub mod zpn;

pub use error::{Error, Result};
pub use grs::GrsCode;
pub use repair::{
    naive_repair, BandwidthReport, GenericRepairScheme, HelperMessage, TraceRepairScheme,
};
pub use ring::{GRElement, RingContext};
pub use storage::{Manifest, SchemeKind, ShardStore};
pub use tower::{is_subtractive, TowerContext};
pub use zpn::{PrimePower, ZpnMatrix, ZpnScalar};
