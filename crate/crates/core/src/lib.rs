//! Lowest-density vertical MDS array codes for `n`-node networks that must
//! survive up to `r` node failures.
//!
//! Every node stores `m` data and `p` parity symbols. The generator's
//! nonsystematic part is `A = Ã ⊗ D`, with `Ã` a totally nonsingular `k × r`
//! matrix and `D` the `(m+p)`-order antidiagonal, which makes each data symbol
//! touch exactly `r` parities. The crate covers construction, encoding and
//! recovery, exhaustive verification, code planning on incomplete network
//! graphs, and a small deterministic network simulator.

pub mod codec;
pub mod construct;
pub mod field;
pub mod graph;
pub mod netsim;
pub mod subsets;
pub mod verify;

pub use codec::{
    decode, decode_rowwise, encode, encode_with_generator, CodecError, CodewordArray, DataBlock, ErasurePattern,
};
pub use construct::{
    block_support, build_d_matrix, build_generator, build_layout, cauchy_totally_nonsingular, derive_params,
    design_code, dual_code, extend_code, ArrayLayout, CodeParams, CodeSpec, ConstructError, GeneratorA,
};
pub use field::{FieldElement, FieldError, Matrix, PrimeField};
pub use graph::{
    analyze_graph, graph_admits_no_ld_mds, min_degree_ok, place_code, plan_divisible_code, plan_r2_code,
    reduce_to_regular, support_graph, verify_plan, Graph, GraphCodePlan, GraphError, GraphVerdict,
};
pub use netsim::{
    concentrator_collect, inject_failures, run_round, simulate, NetsimError, NetworkConfig, NetworkState,
    ReadingSource, SimReport,
};
pub use verify::{
    check_lowest_density, check_mds_exhaustive, check_mds_sampled, failure_submatrix, structurally_singular,
    totally_nonsingular, VerificationReport, VerifyError,
};
