//! Case files, bundled cases and report output.

mod bundled;
mod case_file;
mod report;

pub use bundled::{bundled_names, bundled_source, resolve_case_file};
pub use case_file::{
    calibrate_from_dispatch, load_case, CaseFile, DemandSection, FixedPointOverrides, SolverOverrides,
};
pub use report::{
    write_json, write_leasing_csv, write_mdc_csv, write_report_dir, write_summary_csv, LEASING_COLUMNS,
    MDC_COLUMNS, SUMMARY_COLUMNS,
};
