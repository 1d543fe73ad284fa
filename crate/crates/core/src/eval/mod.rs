//! Accuracy, per-dataset ranks, the Friedman test, the Nemenyi critical
//! difference, win/tie/loss tallies, report output and the cross-validation
//! runner that fills result tables.

mod cv;
mod report;
mod stats;
mod table;

pub use cv::{
    crossval, fit_and_score, grid_search, Classifier, CvConfig, CvOutcome, GridParam, GridSpec,
};
pub use report::{emit_report, summarize, ReportFormat, ReportStats};
pub use stats::{accuracy, chi2_upper_tail, friedman_chi2, nemenyi_cd, nemenyi_q, rank_row};
pub use table::{wtl, Cell, RankTable, ResultTable, Wtl, TIE_TOL};
