//! Grid-valued block factors and their run probabilities.
//!
//! A function `f: {1..M}^k -> values` drives the process
//! `Z_i = f(U_i, ..., U_{i+k-1})` with `U_i` uniform on `{1..M}` (or continuous
//! noise discretized by `ceil(M U)`, which has the same law).

mod construction;
mod function;
mod minimize;
mod montecarlo;
mod paths;
mod runs;

pub use construction::{
    construct_h, distinctness_bound_check, verify_impossibility, verify_impossibility_with_limit,
    DistinctnessReport, ImpossibilityReport, DEFAULT_TUPLE_LIMIT,
};
pub use function::{coords_into, table_len, GridFile, GridFunction, Range, RankedTable, Value, TABLE_BUDGET};
pub use minimize::{
    adversarial_min, verify_lower_bound, AdversarialMin, LowerBoundReport, MinimizeMode,
    DEFAULT_EXHAUSTIVE_LIMIT,
};
pub use montecarlo::{mc_estimate, MCEstimate, Noise, ProcessSpec};
pub use paths::{
    counting_bridge_check, falling_factorial_inverse, mono_path_count, BridgeOptions, BridgeReport,
    PathLowerBound, DEFAULT_COLORING_LIMIT,
};
pub use runs::{
    derived_sign_function, exact_run_probability, exact_run_probability_with_budget, run_count_direct,
    value_run_count, value_run_probability, RunEvent, RunReport, DEFAULT_EXACT_BUDGET,
};
