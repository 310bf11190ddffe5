//! Asymptotic reverse-reconciliation key rate of the Gaussian-modulated
//! coherent-state protocol with heterodyne detection and trusted detector
//! noise, against collective attacks.
//!
//! Eve's information is the Holevo quantity `S(E) − S(E|b)`, evaluated from the
//! symplectic eigenvalues of the two-mode state shared by Alice and Bob
//! (`λ₁, λ₂`) and of the state conditioned on Bob's heterodyne outcome
//! (`λ₃, λ₄`; the fifth eigenvalue is 1). Both pairs are roots of a quadratic
//! in `λ²`, so no general eigensolver is needed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::NoiseBudget;
use crate::params::{check_transmittance, SystemParams};

/// Round-off allowance below the vacuum value 1. Near a double root the
/// quadratic formula loses half the digits, so this sits well above `√ε`.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRateResult {
    /// Alice–Bob mutual information, bits per channel use.
    pub i_ab: f64,
    /// Holevo bound on Eve's information, bits per channel use.
    pub chi_be: f64,
    /// `β I_AB − χ_BE`, possibly negative.
    pub k: f64,
    pub k_clamped: f64,
}

impl KeyRateResult {
    pub fn bits_per_second(&self, repetition_rate_hz: f64) -> f64 {
        self.k_clamped * repetition_rate_hz
    }
}

/// Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue `x`.
pub fn g_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 - EIGENVALUE_TOLERANCE {
        return Err(Error::UnphysicalEigenvalue(x));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    let up = (x + 1.0) / 2.0;
    let down = (x - 1.0) / 2.0;
    Ok(up * up.log2() - down * down.log2())
}

/// Heterodyne Shannon information `log2((V + χ_tot)/(1 + χ_tot))`, `V = V_A + 1`.
pub fn mutual_information(v_a: f64, chi_tot: f64) -> Result<f64> {
    if !(v_a >= 0.0 && v_a.is_finite()) {
        return Err(Error::invalid(
            "V_A",
            format!("must be finite and >= 0, got {v_a}"),
        ));
    }
    if chi_tot.is_nan() || chi_tot < 0.0 {
        return Err(Error::invalid(
            "chi_tot",
            format!("must be >= 0, got {chi_tot}"),
        ));
    }
    let v = v_a + 1.0;
    Ok(((v + chi_tot) / (1.0 + chi_tot)).log2())
}

/// Symplectic spectrum together with the quadratic coefficients it came from:
/// `λ₁² + λ₂² = A`, `λ₁² λ₂² = B`, `λ₃² + λ₄² = C`, `λ₃² λ₄² = D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: [f64; 4],
}

/// Roots of `x² − s x + p = 0` as `(√x₊, √x₋)`. The small root is taken from
/// the product to avoid cancellation.
fn sqrt_roots(sum: f64, product: f64, what: &str) -> Result<(f64, f64)> {
    let disc = sum * sum - 4.0 * product;
    if disc < -EIGENVALUE_TOLERANCE * sum.abs().max(1.0).powi(2) || disc.is_nan() {
        return Err(Error::UnphysicalCovariance(format!(
            "{what}: negative discriminant {disc}"
        )));
    }
    let big = (sum + disc.max(0.0).sqrt()) / 2.0;
    let small = if big > 0.0 { product / big } else { 0.0 };
    Ok((big.sqrt(), small.max(0.0).sqrt()))
}

pub fn symplectic_spectrum(
    v_a: f64,
    t: f64,
    chi_line: f64,
    chi_het: f64,
) -> Result<SymplecticSpectrum> {
    check_transmittance(t)?;
    if !(v_a >= 0.0 && v_a.is_finite()) {
        return Err(Error::invalid(
            "V_A",
            format!("must be finite and >= 0, got {v_a}"),
        ));
    }
    for (name, v) in [("chi_line", chi_line), ("chi_het", chi_het)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(
                name,
                format!("must be finite and >= 0, got {v}"),
            ));
        }
    }

    let v = v_a + 1.0;
    let chi_tot = chi_line + chi_het / t;
    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = (t * (v * chi_line + 1.0)).powi(2);
    let sqrt_b = t * (v * chi_line + 1.0);
    let norm = (t * (v + chi_tot)).powi(2);
    let c = (a * chi_het * chi_het
        + b
        + 1.0
        + 2.0 * chi_het * (v * sqrt_b + t * (v + chi_line))
        + 2.0 * t * (v * v - 1.0))
        / norm;
    let d = (v + sqrt_b * chi_het).powi(2) / norm;

    let (l1, l2) = sqrt_roots(a, b, "joint state")?;
    let (l3, l4) = sqrt_roots(c, d, "conditional state")?;
    let lambda = [l1, l2, l3, l4];
    if let Some(&bad) = lambda.iter().find(|&&l| l < 1.0 - EIGENVALUE_TOLERANCE) {
        return Err(Error::UnphysicalCovariance(format!(
            "symplectic eigenvalue {bad} below 1"
        )));
    }
    Ok(SymplecticSpectrum { a, b, c, d, lambda })
}

/// Holevo bound `χ_BE` in bits per channel use.
pub fn holevo_bound(v_a: f64, t: f64, chi_line: f64, chi_het: f64) -> Result<f64> {
    let s = symplectic_spectrum(v_a, t, chi_line, chi_het)?;
    let [l1, l2, l3, l4] = s.lambda;
    Ok(g_entropy(l1)? + g_entropy(l2)? - g_entropy(l3)? - g_entropy(l4)?)
}

/// `K = β I_AB − χ_BE` for the given budget.
pub fn secret_key_rate(params: &SystemParams, budget: &NoiseBudget) -> Result<KeyRateResult> {
    let v_a = params.modulation_variance;
    let i_ab = mutual_information(v_a, budget.chi_tot)?;
    let chi_be = holevo_bound(v_a, budget.transmittance, budget.chi_line, budget.chi_het)?;
    let k = params.reconciliation_efficiency * i_ab - chi_be;
    Ok(KeyRateResult {
        i_ab,
        chi_be,
        k,
        k_clamped: k.max(0.0),
    })
}
