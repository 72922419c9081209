//! Finite fields, matrix groups over them, and z-class computations.

pub mod error;
pub mod ff;
pub mod galh1;
pub mod grpcore;
pub mod matfq;
pub mod paperlab;
pub mod poly;
pub mod zclass;

pub use error::{Error, Result};
pub use ff::{make_field, Embedding, Field, FieldCtx, Fq};
pub use grpcore::{FamilySpec, GroupSpec, GroupTable, Subgroup};
pub use matfq::Mat;
pub use paperlab::{run_experiment, verify_suite, Experiment, Params, Verdict};
pub use poly::Poly;
pub use zclass::{z_partition, ZEngine, ZPartition};
