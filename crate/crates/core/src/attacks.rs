//! Phase-reference intensity attacks.
//!
//! Eve raises the reference intensity seen by Bob while Bob keeps using the
//! intensity calibrated before the run. The trusted phase noise he credits is
//! then too large, and Eve spends the difference on extra attack noise on the
//! signal so that the total excess noise Bob estimates is unchanged.
//!
//! Two ways of raising the intensity are modeled: a phase-insensitive
//! amplifier (PIA) with gain `g` and idler variance `N`, which adds its own
//! amplification noise, and a variable optical attenuator (VOA) whose
//! attenuation is relaxed by a factor `r` after calibration, which adds none.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{trusted_budget, BudgetModel, NoiseBudget, NoiseComponents};
use crate::params::{check_transmittance, SystemParams, VoaVariant};

/// Intensity ratio used by the VOA attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VoaRatio {
    Fixed(f64),
    /// `r = 1/T` at every distance: the reference arrives as if the channel
    /// were lossless.
    InverseTransmittance,
}

impl VoaRatio {
    pub fn at(self, t: f64) -> f64 {
        match self {
            VoaRatio::Fixed(r) => r,
            VoaRatio::InverseTransmittance => 1.0 / t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttackSpec {
    Pia {
        /// Amplification factor `g`.
        gain: f64,
        /// Idler-mode variance `N` (SNU); 1 is a vacuum-limited amplifier.
        idler: f64,
    },
    Voa {
        ratio: VoaRatio,
    },
}

impl AttackSpec {
    pub fn pia(gain: f64, idler: f64) -> Self {
        AttackSpec::Pia { gain, idler }
    }

    pub fn voa(ratio: f64) -> Self {
        AttackSpec::Voa {
            ratio: VoaRatio::Fixed(ratio),
        }
    }

    pub fn voa_inverse_t() -> Self {
        AttackSpec::Voa {
            ratio: VoaRatio::InverseTransmittance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AttackSpec::Pia { gain, idler } => {
                check_gain(gain)?;
                check_idler(idler)
            }
            AttackSpec::Voa {
                ratio: VoaRatio::Fixed(r),
            } => check_ratio(r),
            AttackSpec::Voa { .. } => Ok(()),
        }
    }

    /// Factor by which the reference intensity at Bob exceeds its calibrated
    /// value during the run.
    pub fn intensity_scale(&self, t: f64) -> f64 {
        match *self {
            AttackSpec::Pia { gain, .. } => gain,
            AttackSpec::Voa { ratio } => ratio.at(t),
        }
    }

    /// Column-safe short name, e.g. `pia_g10_n1` or `voa_rinvT`.
    pub fn label(&self) -> String {
        match *self {
            AttackSpec::Pia { gain, idler } => format!("pia_g{gain}_n{idler}"),
            AttackSpec::Voa {
                ratio: VoaRatio::Fixed(r),
            } => format!("voa_r{r}"),
            AttackSpec::Voa {
                ratio: VoaRatio::InverseTransmittance,
            } => "voa_rinvT".to_string(),
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AttackSpec::Pia { gain, idler } => write!(f, "pia:g={gain},n={idler}"),
            AttackSpec::Voa {
                ratio: VoaRatio::Fixed(r),
            } => write!(f, "voa:r={r}"),
            AttackSpec::Voa {
                ratio: VoaRatio::InverseTransmittance,
            } => f.write_str("voa:r=1/T"),
        }
    }
}

fn check_gain(g: f64) -> Result<()> {
    if g.is_finite() && g >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "g",
            format!("deamplification not an attack: need g >= 1, got {g}"),
        ))
    }
}

fn check_idler(n: f64) -> Result<()> {
    if n.is_finite() && n >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "N",
            format!("idler variance must be >= 1, got {n}"),
        ))
    }
}

fn check_ratio(r: f64) -> Result<()> {
    if r.is_finite() && r >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "r",
            format!("intensity ratio must be >= 1, got {r}"),
        ))
    }
}

/// Noise bookkeeping of an attack. All SNU, channel-input referred unless
/// noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackNoise {
    /// Amplifier noise on the reference, `(g−1)N/(gT)`. Zero for the VOA.
    pub amplifier_chi: f64,
    /// Extra phase noise caused by the amplifier. Zero for the VOA.
    pub amplifier_phase_noise: f64,
    /// Reduction of the trusted phase noise.
    pub trusted_reduction: f64,
    /// Additional attack noise Eve can place on the signal.
    pub xi_attack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackOutcome {
    pub attack: AttackSpec,
    pub noise: AttackNoise,
    pub budget: NoiseBudget,
}

/// Amplification noise on the reference pulse referred to the channel input.
pub fn pia_amplifier_chi(gain: f64, idler: f64, t: f64) -> Result<f64> {
    check_gain(gain)?;
    check_idler(idler)?;
    check_transmittance(t)?;
    Ok((gain - 1.0) * idler / (gain * t))
}

pub fn pia_attack_noise(
    params: &SystemParams,
    t: f64,
    components: &NoiseComponents,
    gain: f64,
    idler: f64,
) -> Result<AttackNoise> {
    let amplifier_chi = pia_amplifier_chi(gain, idler, t)?;
    let amplifier_phase_noise =
        params.modulation_variance * amplifier_chi / params.reference_intensity;
    let trusted_reduction = components.phase_error_trusted / t * (1.0 - 1.0 / gain);
    Ok(AttackNoise {
        amplifier_chi,
        amplifier_phase_noise,
        trusted_reduction,
        xi_attack: trusted_reduction - amplifier_phase_noise,
    })
}

pub fn voa_attack_noise(
    components: &NoiseComponents,
    t: f64,
    ratio: f64,
    variant: VoaVariant,
) -> Result<AttackNoise> {
    check_ratio(ratio)?;
    check_transmittance(t)?;
    let keep = 1.0 - 1.0 / ratio;
    let trusted_reduction = match variant {
        VoaVariant::BobReferred => components.phase_error_trusted * keep,
        VoaVariant::ChannelReferred => components.phase_error_trusted / t * keep,
    };
    Ok(AttackNoise {
        amplifier_chi: 0.0,
        amplifier_phase_noise: 0.0,
        trusted_reduction,
        xi_attack: trusted_reduction,
    })
}

/// Moves `xi_attack` from the detection budget to the line budget, keeping the
/// total referred to the channel input.
pub fn attacked_budget(trusted: &NoiseBudget, xi_attack: f64, t: f64) -> Result<NoiseBudget> {
    if xi_attack.is_nan() {
        return Err(Error::invalid("xi_attack", "NaN"));
    }
    if xi_attack < 0.0 {
        return Err(Error::AttackIneffective { xi_attack });
    }
    let chi_het = trusted.chi_het - t * xi_attack;
    if chi_het < 0.0 {
        return Err(Error::AttackOverBudget { chi_het });
    }
    Ok(NoiseBudget::new(
        BudgetModel::Attacked,
        trusted.chi_line + xi_attack,
        chi_het,
        t,
    ))
}

/// Whether a PIA with idler variance `idler` yields positive attack noise for
/// every gain above 1.
pub fn pia_effective(chi_trusted: f64, idler: f64) -> bool {
    chi_trusted > idler
}

/// Noise terms for any attack kind.
pub fn attack_noise(
    params: &SystemParams,
    t: f64,
    components: &NoiseComponents,
    attack: &AttackSpec,
) -> Result<AttackNoise> {
    attack.validate()?;
    match *attack {
        AttackSpec::Pia { gain, idler } => pia_attack_noise(params, t, components, gain, idler),
        AttackSpec::Voa { ratio } => {
            voa_attack_noise(components, t, ratio.at(t), params.voa_variant)
        }
    }
}

/// Full attacked scenario at transmittance `t`.
pub fn apply_attack(
    params: &SystemParams,
    t: f64,
    components: &NoiseComponents,
    attack: &AttackSpec,
) -> Result<AttackOutcome> {
    let noise = attack_noise(params, t, components, attack)?;
    let trusted = trusted_budget(components, params, t);
    let budget = attacked_budget(&trusted, noise.xi_attack, t)?;
    Ok(AttackOutcome {
        attack: *attack,
        noise,
        budget,
    })
}
