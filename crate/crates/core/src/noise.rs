//! Excess-noise components and the conventional / trusted noise budgets.
//!
//! Channel-line quantities are referred to the channel input, detection
//! quantities to Bob's input. The trusted model moves the detector-related
//! part of the phase-reference measurement noise from the line budget to the
//! detection budget; the total referred to the channel input is unchanged.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{
    check_transmittance, db_to_linear, AdcVariant, LeakageVariant, RefPoint, SystemParams,
};

/// Itemized excess noise at one channel transmittance. All values in SNU.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseComponents {
    pub baseline: f64,
    /// Amplitude-modulator imperfection.
    pub modulation: f64,
    /// Reference-to-signal photon leakage.
    pub leakage: f64,
    /// ADC quantization.
    pub quantization: f64,
    /// Relative phase drift at emission. Not modeled, always 0.
    pub drift: f64,
    /// Relative phase accumulated in the channel. Not modeled, always 0.
    pub channel_phase: f64,
    /// Phase-reference measurement noise, channel-input referred.
    pub phase_error: f64,
    pub phase_error_untrusted: f64,
    /// Bob-referred trusted part; enters the line budget divided by `T`.
    pub phase_error_trusted: f64,
    /// Total noise added on the reference pulse (dimensionless).
    pub reference_noise: ReferenceNoise,
    pub total: f64,
}

impl NoiseComponents {
    /// `ξ_drift + ξ_channel + ξ_error`.
    pub fn phase(&self) -> f64 {
        self.drift + self.channel_phase + self.phase_error
    }
}

/// Noise added on the phase-reference pulse and its trusted/untrusted split,
/// `total = untrusted + trusted / T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceNoise {
    pub total: f64,
    pub untrusted: f64,
    pub trusted: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BudgetModel {
    Conventional,
    Trusted,
    Attacked,
}

/// Added-noise budget of the signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub model: BudgetModel,
    /// Channel added noise, channel-input referred.
    pub chi_line: f64,
    /// Detection added noise, Bob-input referred.
    pub chi_het: f64,
    /// `chi_line + chi_het / T`.
    pub chi_tot: f64,
    pub transmittance: f64,
}

impl NoiseBudget {
    pub fn new(model: BudgetModel, chi_line: f64, chi_het: f64, transmittance: f64) -> Self {
        Self {
            model,
            chi_line,
            chi_het,
            chi_tot: chi_line + chi_het / transmittance,
            transmittance,
        }
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

/// Squared maximal signal amplitude, `(E_Smax)² = 10 V_A`.
fn max_signal_intensity(v_a: f64) -> f64 {
    10.0 * v_a
}

/// `ξ_AM = 10 V_A · 10^(−d/10)`.
pub fn modulation_noise(v_a: f64, d_db: f64) -> Result<f64> {
    non_negative("V_A", v_a)?;
    non_negative("d_dB", d_db)?;
    Ok(max_signal_intensity(v_a) * db_to_linear(-d_db)?)
}

/// Leakage of the reference pulse into the signal slot. `r_e` and `r_p` are
/// linear extinction ratios; `reference_at_alice` is the Alice-side intensity.
pub fn leakage_noise(
    reference_at_alice: f64,
    r_e: f64,
    r_p: f64,
    variant: LeakageVariant,
) -> Result<f64> {
    non_negative("E_RA2", reference_at_alice)?;
    for (name, v) in [("R_e", r_e), ("R_p", r_p)] {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::invalid(
                name,
                format!("extinction ratio must be > 0, got {v}"),
            ));
        }
    }
    let denom = match variant {
        LeakageVariant::Sum => r_e + r_p,
        LeakageVariant::Product => r_e * r_p,
    };
    Ok(2.0 * reference_at_alice / denom)
}

/// Quantization noise, taking the lower bound with equality.
pub fn adc_noise(v_a: f64, bits: u32, variant: AdcVariant) -> Result<f64> {
    non_negative("V_A", v_a)?;
    if bits == 0 {
        return Err(Error::invalid("n_adc", "must be a positive bit count"));
    }
    let exponent = match variant {
        AdcVariant::TwoPowN => bits,
        AdcVariant::TwoPow2N => bits.saturating_mul(2),
    };
    let levels = 2f64.powi(exponent.min(i32::MAX as u32) as i32);
    Ok(max_signal_intensity(v_a) / (12.0 * levels))
}

/// Noise added on the reference pulse:
/// untrusted `1/T − 1 + ε_0`, trusted `(2 − η + 2 v_el)/η`.
pub fn reference_chi(t: f64, eps_0: f64, eta: f64, v_el: f64) -> Result<ReferenceNoise> {
    check_transmittance(t)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid(
            "eta",
            format!("must lie in (0, 1], got {eta}"),
        ));
    }
    non_negative("eps_0", eps_0)?;
    non_negative("v_el", v_el)?;
    let untrusted = 1.0 / t - 1.0 + eps_0;
    let trusted = (2.0 - eta + 2.0 * v_el) / eta;
    Ok(ReferenceNoise {
        total: untrusted + trusted / t,
        untrusted,
        trusted,
    })
}

/// Phase-reference measurement noise split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseError {
    pub total: f64,
    pub untrusted: f64,
    /// Bob-referred.
    pub trusted: f64,
}

/// `ξ_error = V_A (χ + 1) / E_R²` and its parts
/// `ξ_U = V_A (1 + χ_U) / E_R²`, `ξ_T = V_A χ_T / E_R²`.
pub fn phase_error_noise(v_a: f64, reference: &ReferenceNoise, e_r2: f64) -> Result<PhaseError> {
    non_negative("V_A", v_a)?;
    if e_r2.is_nan() || e_r2 <= 0.0 {
        return Err(Error::invalid("E_R2", format!("must be > 0, got {e_r2}")));
    }
    Ok(PhaseError {
        total: v_a * (reference.total + 1.0) / e_r2,
        untrusted: v_a * (1.0 + reference.untrusted) / e_r2,
        trusted: v_a * reference.trusted / e_r2,
    })
}

/// Alice-side reference intensity implied by the configured value.
pub fn reference_at_alice(params: &SystemParams, t: f64) -> f64 {
    match params.ref_point {
        RefPoint::AtAlice => params.reference_intensity,
        RefPoint::AtBob => params.reference_intensity / (t * params.detector_efficiency),
    }
}

/// Evaluates every noise term at transmittance `t`.
pub fn assemble_components(params: &SystemParams, t: f64) -> Result<NoiseComponents> {
    check_transmittance(t)?;
    let v_a = params.modulation_variance;
    let modulation = modulation_noise(v_a, params.am_dynamics_db)?;
    let leakage = leakage_noise(
        reference_at_alice(params, t),
        db_to_linear(params.modulator_extinction_db)?,
        db_to_linear(params.pbs_extinction_db)?,
        params.leakage_variant,
    )?;
    let quantization = adc_noise(v_a, params.adc_bits, params.adc_variant)?;
    let reference = reference_chi(
        t,
        params.reference_channel_noise,
        params.detector_efficiency,
        params.electronic_noise,
    )?;
    let phase = phase_error_noise(v_a, &reference, params.reference_intensity)?;
    let baseline = params.system_excess_noise;

    Ok(NoiseComponents {
        baseline,
        modulation,
        leakage,
        quantization,
        drift: 0.0,
        channel_phase: 0.0,
        phase_error: phase.total,
        phase_error_untrusted: phase.untrusted,
        phase_error_trusted: phase.trusted,
        reference_noise: reference,
        total: baseline + modulation + leakage + quantization + phase.total,
    })
}

/// Every phase-noise term credited to Eve.
pub fn conventional_budget(
    components: &NoiseComponents,
    params: &SystemParams,
    t: f64,
) -> NoiseBudget {
    NoiseBudget::new(
        BudgetModel::Conventional,
        1.0 / t - 1.0 + components.total,
        params.detection_noise(),
        t,
    )
}

/// Detector-related phase-reference noise treated as trusted.
pub fn trusted_budget(components: &NoiseComponents, params: &SystemParams, t: f64) -> NoiseBudget {
    trusted_budget_with(components, params, t, components.phase_error_trusted)
}

/// Trusted budget with an externally calibrated trusted phase noise
/// (Bob-referred) in place of the static value.
pub fn trusted_budget_with(
    components: &NoiseComponents,
    params: &SystemParams,
    t: f64,
    phase_error_trusted: f64,
) -> NoiseBudget {
    let c = components;
    let chi_line =
        1.0 / t - 1.0 + c.baseline + c.modulation + c.leakage + c.quantization + c.phase_error
            - phase_error_trusted / t;
    let chi_het = params.detection_noise() + phase_error_trusted;
    NoiseBudget::new(BudgetModel::Trusted, chi_line, chi_het, t)
}
