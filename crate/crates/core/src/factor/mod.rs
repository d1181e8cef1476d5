//! Panels, complexification and the max-ratio test for the number of
//! factors.
//!
//! A real `p x T` panel is turned into a `p x T/2` complex panel by pairing
//! period `t` with period `t + T/2`. Under Gaussian idiosyncratic noise the
//! sample covariance of the complex panel is complex Wishart, whose top
//! eigenvalues have joint Tracy–Widom fluctuations; gap ratios are then
//! compared against [`CriticalTable`](crate::table::CriticalTable) values.

mod inference;
mod panel;

pub use inference::{
    confidence_set, confidence_set_from_ratios, gap_ratios, run_test, run_test_from_ratios, scree_data, ConfidenceSet,
    KmaxConvention, TestReport,
};
pub use panel::{complexify, cov_eigs, split, ComplexPanel, Panel};
