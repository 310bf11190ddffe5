//! System parameters, unit conversions and validation.
//!
//! All noise quantities are in shot-noise units (SNU). Extinction ratios and
//! modulator dynamics are configured in dB and converted where they enter a
//! formula. The JSON form uses one key per field (`V_A`, `beta`, `eta`, ...)
//! and rejects unknown keys.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationErrors};

/// Denominator form of the reference-to-signal leakage noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LeakageVariant {
    /// `2 E² / (R_e + R_p)`
    Sum,
    /// `2 E² / (R_e · R_p)`
    Product,
}

/// Exponent form of the ADC quantization bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdcVariant {
    /// `E² / (12 · 2^n)`
    #[serde(rename = "PAPER_2N")]
    TwoPowN,
    /// `E² / (12 · 2^(2n))`, the usual uniform-quantizer variance.
    #[serde(rename = "ALT_22N")]
    TwoPow2N,
}

/// Reference point of the VOA attack noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoaVariant {
    /// `ξ_T (1 − 1/r)`, Bob-referred.
    #[serde(rename = "PAPER_EQ19")]
    BobReferred,
    /// `(ξ_T / T)(1 − 1/r)`, referred to the channel input like the PIA case.
    #[serde(rename = "CHANNEL_REFERRED")]
    ChannelReferred,
}

/// Where the configured reference intensity is specified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RefPoint {
    /// Intensity measured at Bob; the Alice-side value is back-propagated
    /// through the channel and detector.
    AtBob,
    /// Intensity launched by Alice.
    AtAlice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Modulation variance (SNU).
    #[serde(rename = "V_A")]
    pub modulation_variance: f64,
    /// Reconciliation efficiency in (0, 1].
    #[serde(rename = "beta")]
    pub reconciliation_efficiency: f64,
    /// Detector efficiency in (0, 1].
    #[serde(rename = "eta")]
    pub detector_efficiency: f64,
    /// Detector electronic noise (SNU).
    #[serde(rename = "v_el")]
    pub electronic_noise: f64,
    /// Baseline system excess noise (SNU).
    #[serde(rename = "xi_0")]
    pub system_excess_noise: f64,
    /// Channel excess noise seen by the reference pulse (SNU).
    #[serde(rename = "eps_0")]
    pub reference_channel_noise: f64,
    #[serde(rename = "n_adc")]
    pub adc_bits: u32,
    /// Amplitude-modulator dynamics (dB).
    #[serde(rename = "d_dB")]
    pub am_dynamics_db: f64,
    #[serde(rename = "R_e_dB")]
    pub modulator_extinction_db: f64,
    #[serde(rename = "R_p_dB")]
    pub pbs_extinction_db: f64,
    /// Phase-reference intensity, squared amplitude (SNU).
    #[serde(rename = "E_R2")]
    pub reference_intensity: f64,
    /// Fiber attenuation (dB/km).
    #[serde(rename = "alpha")]
    pub fiber_loss_db_per_km: f64,
    /// Pulse repetition rate (Hz). Informational only.
    #[serde(rename = "f_rep")]
    pub repetition_rate_hz: f64,
    pub leakage_variant: LeakageVariant,
    pub adc_variant: AdcVariant,
    pub voa_variant: VoaVariant,
    pub ref_point: RefPoint,
}

impl SystemParams {
    /// The reference parameter set with the formula variants that reproduce
    /// the published curves (see README, "Canonical profile").
    pub fn canonical() -> Self {
        Self {
            modulation_variance: 4.0,
            reconciliation_efficiency: 0.95,
            detector_efficiency: 0.5,
            electronic_noise: 0.1,
            system_excess_noise: 0.01,
            reference_channel_noise: 0.0,
            adc_bits: 10,
            am_dynamics_db: 40.0,
            modulator_extinction_db: 40.0,
            pbs_extinction_db: 30.0,
            reference_intensity: 1000.0,
            fiber_loss_db_per_km: 0.2,
            repetition_rate_hz: 100e6,
            leakage_variant: LeakageVariant::Product,
            adc_variant: AdcVariant::TwoPow2N,
            voa_variant: VoaVariant::ChannelReferred,
            ref_point: RefPoint::AtAlice,
        }
    }

    /// Same numbers with the alternative form of every ambiguous formula.
    pub fn literal() -> Self {
        Self {
            leakage_variant: LeakageVariant::Sum,
            adc_variant: AdcVariant::TwoPowN,
            voa_variant: VoaVariant::BobReferred,
            ref_point: RefPoint::AtBob,
            ..Self::canonical()
        }
    }

    /// Heterodyne detection noise referred to Bob's input, `(2 − η + 2 v_el) / η`.
    pub fn detection_noise(&self) -> f64 {
        let eta = self.detector_efficiency;
        (2.0 - eta + 2.0 * self.electronic_noise) / eta
    }

    pub fn validate(self) -> Result<ValidatedParams> {
        validate(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))
    }

    /// Applies a `name=value` override using the JSON key names. Values that
    /// parse as JSON are used as such; anything else is taken as a string.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (name, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid(assignment, "override must look like name=value"))?;
        let (name, raw) = (name.trim(), raw.trim());
        let value: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));

        let mut map = match serde_json::to_value(&*self) {
            Ok(serde_json::Value::Object(map)) => map,
            _ => unreachable!("SystemParams serializes to an object"),
        };
        if !map.contains_key(name) {
            return Err(Error::invalid(name, "unknown parameter"));
        }
        map.insert(name.to_string(), value);
        *self = serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| Error::invalid(name, e.to_string()))?;
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::canonical()
    }
}

/// Parameters that passed [`validate`]. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedParams(SystemParams);

impl ValidatedParams {
    pub fn into_inner(self) -> SystemParams {
        self.0
    }

    pub fn canonical() -> Self {
        Self(SystemParams::canonical())
    }
}

impl Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.0
    }
}

impl Serialize for ValidatedParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Checks every field and reports all violations at once.
pub fn validate(params: SystemParams) -> Result<ValidatedParams> {
    let p = &params;
    let mut errs = ValidationErrors::default();

    let mut non_negative = |name: &str, v: f64| {
        if !v.is_finite() || v < 0.0 {
            errs.push(name, format!("must be finite and >= 0, got {v}"));
        }
    };
    non_negative("V_A", p.modulation_variance);
    non_negative("v_el", p.electronic_noise);
    non_negative("xi_0", p.system_excess_noise);
    non_negative("eps_0", p.reference_channel_noise);
    non_negative("d_dB", p.am_dynamics_db);
    non_negative("R_e_dB", p.modulator_extinction_db);
    non_negative("R_p_dB", p.pbs_extinction_db);
    non_negative("alpha", p.fiber_loss_db_per_km);
    non_negative("f_rep", p.repetition_rate_hz);

    for (name, v) in [
        ("beta", p.reconciliation_efficiency),
        ("eta", p.detector_efficiency),
    ] {
        if !(v > 0.0 && v <= 1.0) {
            errs.push(name, format!("must lie in (0, 1], got {v}"));
        }
    }
    if !(p.reference_intensity.is_finite() && p.reference_intensity > 0.0) {
        errs.push(
            "E_R2",
            format!("must be finite and > 0, got {}", p.reference_intensity),
        );
    }
    if p.adc_bits == 0 {
        errs.push("n_adc", "must be a positive bit count");
    }

    errs.into_result(ValidatedParams(params))
}

/// `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> Result<f64> {
    if !x_db.is_finite() {
        return Err(Error::invalid("dB", format!("must be finite, got {x_db}")));
    }
    Ok(10f64.powf(x_db / 10.0))
}

/// Fiber transmittance `10^(−α d / 10)`.
pub fn transmittance(distance_km: f64, alpha_db_per_km: f64) -> Result<f64> {
    let mut errs = ValidationErrors::default();
    if !(distance_km.is_finite() && distance_km >= 0.0) {
        errs.push(
            "distance_km",
            format!("must be finite and >= 0, got {distance_km}"),
        );
    }
    if !(alpha_db_per_km.is_finite() && alpha_db_per_km >= 0.0) {
        errs.push(
            "alpha",
            format!("must be finite and >= 0, got {alpha_db_per_km}"),
        );
    }
    errs.into_result(())?;
    Ok(10f64.powf(-alpha_db_per_km * distance_km / 10.0))
}

/// A point on the fiber link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPoint {
    pub distance_km: f64,
    pub transmittance: f64,
}

impl ChannelPoint {
    pub fn at_distance(distance_km: f64, alpha_db_per_km: f64) -> Result<Self> {
        Ok(Self {
            distance_km,
            transmittance: transmittance(distance_km, alpha_db_per_km)?,
        })
    }

    /// A channel given directly by its transmittance; the distance is
    /// recovered from `alpha` when that is positive and reported as 0 otherwise.
    pub fn from_transmittance(t: f64, alpha_db_per_km: f64) -> Result<Self> {
        check_transmittance(t)?;
        let distance_km = if alpha_db_per_km > 0.0 {
            -10.0 * t.log10() / alpha_db_per_km
        } else {
            0.0
        };
        Ok(Self {
            distance_km,
            transmittance: t,
        })
    }
}

pub(crate) fn check_transmittance(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "T",
            format!("transmittance must lie in (0, 1], got {t}"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!(close(db_to_linear(40.0).unwrap(), 1e4, 1e-14));
        assert!(close(db_to_linear(30.0).unwrap(), 1e3, 1e-14));
        assert!(db_to_linear(f64::NAN).unwrap_err().is_validation());
        assert!(db_to_linear(f64::INFINITY).is_err());
    }

    #[test]
    fn fiber_transmittance() {
        assert_eq!(transmittance(0.0, 0.2).unwrap(), 1.0);
        assert!(close(transmittance(30.0, 0.2).unwrap(), 0.251189, 2e-6));
        assert!(close(transmittance(50.0, 0.2).unwrap(), 0.1, 1e-14));
        let err = transmittance(-1.0, 0.2).unwrap_err();
        match err {
            Error::Validation(v) => assert!(v.names("distance_km")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(transmittance(1.0, -0.2).is_err());
    }

    #[test]
    fn figure_defaults_are_valid() {
        let p = SystemParams::default().validate().unwrap();
        assert_eq!(p.modulation_variance, 4.0);
        assert_eq!(p.reconciliation_efficiency, 0.95);
        assert_eq!(p.detector_efficiency, 0.5);
        assert_eq!(p.electronic_noise, 0.1);
        assert_eq!(p.system_excess_noise, 0.01);
        assert_eq!(p.adc_bits, 10);
        assert_eq!(p.am_dynamics_db, 40.0);
        assert_eq!(p.modulator_extinction_db, 40.0);
        assert_eq!(p.pbs_extinction_db, 30.0);
        assert_eq!(p.reference_intensity, 1000.0);
        assert_eq!(p.fiber_loss_db_per_km, 0.2);
        assert!(SystemParams::literal().validate().is_ok());
    }

    #[test]
    fn rejects_out_of_range_fields_by_name() {
        let p = SystemParams {
            detector_efficiency: 1.5,
            ..Default::default()
        };
        match p.validate().unwrap_err() {
            Error::Validation(v) => {
                assert_eq!(v.0.len(), 1);
                assert!(v.names("eta"));
            }
            other => panic!("unexpected {other:?}"),
        }

        let p = SystemParams {
            reference_intensity: 0.0,
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(Error::Validation(v)) if v.names("E_R2")));
    }

    #[test]
    fn reports_every_violation() {
        let p = SystemParams {
            detector_efficiency: 0.0,
            reconciliation_efficiency: 2.0,
            electronic_noise: -0.1,
            adc_bits: 0,
            ..Default::default()
        };
        let Err(Error::Validation(v)) = p.validate() else {
            panic!("expected validation failure")
        };
        let mut names: Vec<_> = v.fields().collect();
        names.sort_unstable();
        assert_eq!(names, ["beta", "eta", "n_adc", "v_el"]);
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let p = SystemParams::default().validate().unwrap();
        let text = serde_json::to_string_pretty(&p).unwrap();
        assert!(text.contains("\"V_A\""));
        assert!(text.contains("\"PRODUCT\""));
        let back = SystemParams::from_json(&text).unwrap().validate().unwrap();
        assert_eq!(back, p);

        let bad = text.replacen("\"beta\"", "\"gamma\"", 1);
        assert!(SystemParams::from_json(&bad).unwrap_err().is_validation());
    }

    #[test]
    fn overrides() {
        let mut p = SystemParams::default();
        p.set("eta=0.6").unwrap();
        p.set("leakage_variant=SUM").unwrap();
        p.set("n_adc = 12").unwrap();
        assert_eq!(p.detector_efficiency, 0.6);
        assert_eq!(p.leakage_variant, LeakageVariant::Sum);
        assert_eq!(p.adc_bits, 12);
        assert!(p.set("nope=1").is_err());
        assert!(p.set("eta").is_err());
        assert!(p.set("leakage_variant=DIFF").is_err());
    }

    #[test]
    fn channel_point_inverts_distance() {
        let c = ChannelPoint::at_distance(30.0, 0.2).unwrap();
        let back = ChannelPoint::from_transmittance(c.transmittance, 0.2).unwrap();
        assert!(close(back.distance_km, 30.0, 1e-12));
        assert!(ChannelPoint::from_transmittance(0.0, 0.2).is_err());
        assert!(ChannelPoint::from_transmittance(1.2, 0.2).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn db_is_multiplicative(a in -200.0..200.0f64, b in -200.0..200.0f64) {
                let lhs = db_to_linear(a + b).unwrap();
                let rhs = db_to_linear(a).unwrap() * db_to_linear(b).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
            }

            #[test]
            fn transmittance_decreases(d in 0.0..300.0f64, dd in 1e-6..50.0f64, alpha in 1e-3..1.0f64) {
                let t0 = transmittance(d, alpha).unwrap();
                let t1 = transmittance(d + dd, alpha).unwrap();
                prop_assert!(t1 < t0);
                prop_assert!(t0 <= 1.0 && t0 > 0.0);
            }
        }
    }
}
