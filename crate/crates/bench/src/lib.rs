//! Shared inputs for the criterion benchmarks.

use phaseref_core::{parse_scenarios, Scenario, ValidatedParams};

pub fn canonical() -> ValidatedParams {
    ValidatedParams::canonical()
}

/// The four curves of the PIA figure plus the VOA curve.
pub fn all_scenarios() -> Vec<Scenario> {
    parse_scenarios("conv,trusted,pia:g=2,pia:g=10,voa:r=1/T").expect("static scenario list")
}
