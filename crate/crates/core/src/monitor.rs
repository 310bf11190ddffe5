//! Real-time monitoring of the phase-reference intensity at Bob.
//!
//! A tap sends a small share of the reference to an amplifier and power
//! meter. The chain is summarized by the relative half-width `σ` of the
//! reading interval. Bob calibrates the trusted phase noise from the upper end
//! of that interval, which can only under-credit trusted noise, and raises an
//! alarm when the reading leaves `[1 − τ, 1 + τ]` times the calibrated value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{evaluate_scenario, eve_fraction, Scenario};
use crate::attacks::AttackSpec;
use crate::error::{Error, Result, ValidationErrors};
use crate::keyrate::{secret_key_rate, KeyRateResult};
use crate::noise::{assemble_components, trusted_budget_with};
use crate::params::{check_transmittance, ValidatedParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorParams {
    /// Share of the reference power sent to the meter, in (0, 1).
    pub tap_ratio: f64,
    /// Gain of the monitor amplifier, >= 1.
    pub monitor_gain: f64,
    /// Relative half-width `σ` of the reading interval.
    pub meter_rel_error: f64,
    /// Relative deviation `τ` that raises an alarm.
    pub alarm_threshold: f64,
}

impl Default for MonitorParams {
    fn default() -> Self {
        Self {
            tap_ratio: 0.01,
            monitor_gain: 100.0,
            meter_rel_error: 0.0,
            alarm_threshold: 0.05,
        }
    }
}

impl MonitorParams {
    pub fn validate(&self) -> Result<()> {
        let mut errs = ValidationErrors::default();
        if !(self.tap_ratio > 0.0 && self.tap_ratio < 1.0) {
            errs.push(
                "tap_ratio",
                format!("must lie in (0, 1), got {}", self.tap_ratio),
            );
        }
        if !(self.monitor_gain.is_finite() && self.monitor_gain >= 1.0) {
            errs.push(
                "monitor_gain",
                format!("must be >= 1, got {}", self.monitor_gain),
            );
        }
        if !(self.meter_rel_error.is_finite() && (0.0..1.0).contains(&self.meter_rel_error)) {
            errs.push(
                "sigma",
                format!("must lie in [0, 1), got {}", self.meter_rel_error),
            );
        }
        if !(self.alarm_threshold.is_finite() && self.alarm_threshold > 0.0) {
            errs.push("tau", format!("must be > 0, got {}", self.alarm_threshold));
        }
        errs.into_result(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReadingMode {
    /// The meter reports the true intensity with a `±σ` interval.
    Interval,
    /// The point estimate is drawn uniformly from `true · [1 − σ, 1 + σ]`.
    Sampled { seed: u64 },
}

/// Intensity reading in SNU.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorReading {
    pub point_estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl MonitorReading {
    fn around(point: f64, sigma: f64) -> Self {
        Self {
            point_estimate: point,
            lower: point * (1.0 - sigma),
            upper: point * (1.0 + sigma),
        }
    }
}

fn check_intensity(v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "true_intensity",
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

pub fn monitor_reading(
    true_intensity: f64,
    mp: &MonitorParams,
    mode: ReadingMode,
) -> Result<MonitorReading> {
    match mode {
        ReadingMode::Interval => {
            check_intensity(true_intensity)?;
            mp.validate()?;
            Ok(MonitorReading::around(true_intensity, mp.meter_rel_error))
        }
        ReadingMode::Sampled { seed } => {
            sampled_reading(true_intensity, mp, &mut ChaCha8Rng::seed_from_u64(seed))
        }
    }
}

/// One sampled reading drawn from `rng`.
pub fn sampled_reading<R: Rng + ?Sized>(
    true_intensity: f64,
    mp: &MonitorParams,
    rng: &mut R,
) -> Result<MonitorReading> {
    check_intensity(true_intensity)?;
    mp.validate()?;
    let sigma = mp.meter_rel_error;
    let point = if sigma > 0.0 {
        true_intensity * rng.random_range((1.0 - sigma)..=(1.0 + sigma))
    } else {
        true_intensity
    };
    Ok(MonitorReading::around(point, sigma))
}

/// Trusted phase noise (Bob-referred) calibrated from the upper intensity
/// bound, `V_A χ_T / upper`.
pub fn conservative_trusted_noise(
    reading: &MonitorReading,
    v_a: f64,
    chi_trusted: f64,
) -> Result<f64> {
    if !(reading.upper > 0.0 && reading.upper.is_finite()) {
        return Err(Error::invalid(
            "upper",
            format!("reading upper bound must be > 0, got {}", reading.upper),
        ));
    }
    Ok(v_a * chi_trusted / reading.upper)
}

/// Alarm when the reading deviates from the calibrated intensity by more
/// than `τ` relative.
pub fn detect(calibrated_intensity: f64, reading: &MonitorReading, tau: f64) -> bool {
    let ratio = reading.point_estimate / calibrated_intensity;
    ratio > 1.0 + tau || ratio < 1.0 - tau
}

/// Key rate Bob obtains at transmittance `t` when he recalibrates the trusted
/// phase noise from the monitored intensity (interval mode). The total
/// excess noise he estimates is the same as without the attack.
pub fn defended_key_rate(
    params: &ValidatedParams,
    t: f64,
    attack: Option<&AttackSpec>,
    mp: &MonitorParams,
) -> Result<KeyRateResult> {
    defended_key_rate_with(params, t, attack, mp, ReadingMode::Interval).map(|(k, _)| k)
}

pub fn defended_key_rate_with(
    params: &ValidatedParams,
    t: f64,
    attack: Option<&AttackSpec>,
    mp: &MonitorParams,
    mode: ReadingMode,
) -> Result<(KeyRateResult, MonitorReading)> {
    check_transmittance(t)?;
    mp.validate()?;
    if let Some(a) = attack {
        a.validate()?;
    }
    let components = assemble_components(params, t)?;
    let scale = attack.map_or(1.0, |a| a.intensity_scale(t));
    let reading = monitor_reading(params.reference_intensity * scale, mp, mode)?;
    let calibrated = conservative_trusted_noise(
        &reading,
        params.modulation_variance,
        components.reference_noise.trusted,
    )?;
    let budget = trusted_budget_with(&components, params, t, calibrated);
    Ok((secret_key_rate(params, &budget)?, reading))
}

/// Everything the `monitor` command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    pub distance_km: f64,
    pub transmittance: f64,
    pub attack: Option<AttackSpec>,
    pub monitor: MonitorParams,
    pub mode: ReadingMode,
    pub calibrated_intensity: f64,
    pub reading: MonitorReading,
    pub detected: bool,
    /// Rate Bob claims with the static calibration.
    pub naive: KeyRateResult,
    /// Rate Bob claims after recalibrating from the monitor.
    pub defended: KeyRateResult,
    /// Secure rate under the attack when Bob does not monitor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attacked: Option<KeyRateResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eve_fraction_undefended: Option<f64>,
}

pub fn monitor_report(
    params: &ValidatedParams,
    distance_km: f64,
    attack: Option<&AttackSpec>,
    mp: &MonitorParams,
    mode: ReadingMode,
) -> Result<MonitorReport> {
    let t = crate::params::transmittance(distance_km, params.fiber_loss_db_per_km)?;
    let (defended, reading) = defended_key_rate_with(params, t, attack, mp, mode)?;
    let components = assemble_components(params, t)?;
    let naive = evaluate_scenario(params, t, &components, &Scenario::Trusted)?.key;
    let attacked = attack
        .map(|a| evaluate_scenario(params, t, &components, &Scenario::attack(*a)).map(|r| r.key))
        .transpose()?;
    Ok(MonitorReport {
        distance_km,
        transmittance: t,
        attack: attack.copied(),
        monitor: *mp,
        mode,
        calibrated_intensity: params.reference_intensity,
        reading,
        detected: detect(params.reference_intensity, &reading, mp.alarm_threshold),
        naive,
        defended,
        eve_fraction_undefended: attacked.map(|k| eve_fraction(naive.k, k.k)),
        attacked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{conventional_budget, trusted_budget};
    use crate::params::{transmittance, SystemParams};

    const T30: f64 = 0.251_188_643_150_958;

    fn sigma(s: f64) -> MonitorParams {
        MonitorParams {
            meter_rel_error: s,
            ..Default::default()
        }
    }

    #[test]
    fn readings() {
        let r = monitor_reading(1000.0, &sigma(0.0), ReadingMode::Interval).unwrap();
        assert_eq!(
            (r.lower, r.point_estimate, r.upper),
            (1000.0, 1000.0, 1000.0)
        );
        let r = monitor_reading(1000.0, &sigma(0.02), ReadingMode::Interval).unwrap();
        assert!((r.lower - 980.0).abs() < 1e-12 && (r.upper - 1020.0).abs() < 1e-12);
        assert_eq!(r.point_estimate, 1000.0);

        let a = monitor_reading(1000.0, &sigma(0.02), ReadingMode::Sampled { seed: 7 }).unwrap();
        let b = monitor_reading(1000.0, &sigma(0.02), ReadingMode::Sampled { seed: 7 }).unwrap();
        assert_eq!(a, b);
        assert!(a.lower <= a.point_estimate && a.point_estimate <= a.upper);
        assert!((980.0..=1020.0).contains(&a.point_estimate));
        let c = monitor_reading(1000.0, &sigma(0.02), ReadingMode::Sampled { seed: 8 }).unwrap();
        assert_ne!(a, c);

        assert!(monitor_reading(-1.0, &sigma(0.0), ReadingMode::Interval).is_err());
        assert!(monitor_reading(1.0, &sigma(1.5), ReadingMode::Interval).is_err());
    }

    #[test]
    fn calibration_from_upper_bound() {
        let r = MonitorReading::around(1000.0, 0.0);
        assert!((conservative_trusted_noise(&r, 4.0, 3.4).unwrap() - 0.0136).abs() < 1e-15);
        let r = MonitorReading::around(2000.0, 0.0);
        assert!((conservative_trusted_noise(&r, 4.0, 3.4).unwrap() - 0.0068).abs() < 1e-15);
        assert_eq!(conservative_trusted_noise(&r, 0.0, 3.4).unwrap(), 0.0);
        assert!(conservative_trusted_noise(&MonitorReading::around(0.0, 0.0), 4.0, 3.4).is_err());
    }

    #[test]
    fn detection_rule() {
        let honest = MonitorReading::around(1000.0, 0.0);
        for tau in [1e-6, 0.05, 0.5] {
            assert!(!detect(1000.0, &honest, tau));
        }
        assert!(detect(1000.0, &MonitorReading::around(2000.0, 0.0), 0.1));
        assert!(detect(1000.0, &MonitorReading::around(500.0, 0.0), 0.1));
    }

    #[test]
    fn honest_channel_never_alarms() {
        let mp = MonitorParams {
            meter_rel_error: 0.02,
            alarm_threshold: 0.05,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let r = sampled_reading(1000.0, &mp, &mut rng).unwrap();
            assert!(!detect(1000.0, &r, mp.alarm_threshold));
        }
    }

    #[test]
    fn defended_fixed_point() {
        let p = ValidatedParams::canonical();
        let c = assemble_components(&p, T30).unwrap();
        let stat = secret_key_rate(&p, &trusted_budget(&c, &p, T30)).unwrap();
        let def = defended_key_rate(&p, T30, None, &sigma(0.0)).unwrap();
        assert!(((def.k - stat.k) / stat.k).abs() < 1e-12);
    }

    #[test]
    fn defended_pia_chain() {
        let p = ValidatedParams::canonical();
        let c = assemble_components(&p, T30).unwrap();
        let attack = AttackSpec::pia(2.0, 1.0);
        let stat = secret_key_rate(&p, &trusted_budget(&c, &p, T30)).unwrap().k;
        let conv = secret_key_rate(&p, &conventional_budget(&c, &p, T30))
            .unwrap()
            .k;
        let attacked = evaluate_scenario(&p, T30, &c, &Scenario::attack(attack))
            .unwrap()
            .key
            .k;
        let def = defended_key_rate(&p, T30, Some(&attack), &sigma(0.0))
            .unwrap()
            .k;
        assert!(conv <= def, "{conv} {def}");
        assert!(def <= attacked, "{def} {attacked}");
        assert!(attacked <= stat);
    }

    #[test]
    fn defended_voa_leaves_eve_nothing() {
        // with channel-referred accounting the recalibrated budget is exactly
        // the true attacked budget: nothing remains hidden
        let p = ValidatedParams::canonical();
        let c = assemble_components(&p, T30).unwrap();
        let attack = AttackSpec::voa_inverse_t();
        let true_rate = evaluate_scenario(&p, T30, &c, &Scenario::attack(attack))
            .unwrap()
            .key
            .k;
        let def = defended_key_rate(&p, T30, Some(&attack), &sigma(0.0))
            .unwrap()
            .k;
        assert!(((def - true_rate) / true_rate).abs() < 1e-10);

        let recal = conservative_trusted_noise(
            &MonitorReading::around(p.reference_intensity / T30, 0.0),
            p.modulation_variance,
            c.reference_noise.trusted,
        )
        .unwrap();
        // trusted noise actually present at Bob under the VOA
        let actual = c.phase_error_trusted * T30;
        assert!((recal - actual).abs() < 1e-15);
    }

    #[test]
    fn report() {
        let p = SystemParams::canonical().validate().unwrap();
        let r = monitor_report(
            &p,
            30.0,
            Some(&AttackSpec::pia(2.0, 1.0)),
            &sigma(0.01),
            ReadingMode::Interval,
        )
        .unwrap();
        assert!(r.detected);
        assert!(r.defended.k < r.naive.k);
        assert!(r.eve_fraction_undefended.unwrap() > 0.0);
        let honest = monitor_report(&p, 30.0, None, &sigma(0.01), ReadingMode::Interval).unwrap();
        assert!(!honest.detected);
        assert!(honest.attacked.is_none());
        assert_eq!(transmittance(30.0, 0.2).unwrap(), r.transmittance);
    }
}
