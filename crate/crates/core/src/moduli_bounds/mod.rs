//! Solid moduli of continuity of `Re g̃` on closure grids, the upper-bound
//! functionals for them, the Dini integral, and sharpness ratios.

mod functionals;
mod grid;
mod report;

pub use functionals::{
    bound_thm1, bound_thm2, bound_zygmund, dini_integral, DiniValue, Modulus, ModulusTable, NODES_PER_DECADE,
};
pub use grid::{
    scattered_modulus_table, solid_modulus, solid_modulus_table, ClosureGrid, GridPoint, GridPointKind, LAYER_FIRST,
    LAYER_LAST,
};
pub use report::{
    build_bound_report, curve_modulus, majorant_tail, sharpness_ratios, spread, BoundReport, BoundRow, ReportOptions,
    SharpnessRow, SharpnessTable, REPORT_HEADER, SHARPNESS_UPPER,
};
