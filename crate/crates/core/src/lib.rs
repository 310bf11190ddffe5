//! Security analysis of continuous-variable QKD with a locally generated
//! local oscillator: excess-noise budgets under the conventional and trusted
//! phase-noise models, phase-reference intensity attacks, asymptotic key
//! rates and the intensity-monitoring countermeasure.
//!
//! ```
//! use phaseref_core::{key_rate_at, AttackSpec, Scenario, ValidatedParams};
//!
//! let params = ValidatedParams::canonical();
//! let trusted = key_rate_at(&params, 30.0, &Scenario::Trusted).unwrap();
//! let attacked = key_rate_at(&params, 30.0, &Scenario::attack(AttackSpec::pia(2.0, 1.0))).unwrap();
//! assert!(attacked.k < trusted.k);
//! ```

pub mod analysis;
pub mod attacks;
pub mod error;
pub mod keyrate;
pub mod monitor;
pub mod noise;
pub mod params;

pub use analysis::{
    evaluate_point, eve_fraction, insecure_region, key_rate_at, parse_scenarios, sweep,
    zero_key_distance, RegionReport, Scenario, SweepRow, SweepTable,
};
pub use attacks::{AttackNoise, AttackOutcome, AttackSpec, VoaRatio};
pub use error::{Error, Result, ValidationErrors};
pub use keyrate::{holevo_bound, secret_key_rate, KeyRateResult};
pub use monitor::{MonitorParams, MonitorReading, ReadingMode};
pub use noise::{BudgetModel, NoiseBudget, NoiseComponents};
pub use params::{
    AdcVariant, ChannelPoint, LeakageVariant, RefPoint, SystemParams, ValidatedParams, VoaVariant,
};
