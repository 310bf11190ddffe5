//! Distance sweeps, zero-key distances and insecure regions.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::attacks::{apply_attack, AttackNoise, AttackSpec, VoaRatio};
use crate::error::{Error, Result};
use crate::keyrate::{secret_key_rate, KeyRateResult};
use crate::noise::{
    assemble_components, conventional_budget, trusted_budget, NoiseBudget, NoiseComponents,
};
use crate::params::{transmittance, ValidatedParams};

/// One curve of the key-rate figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scenario {
    Conventional,
    Trusted,
    Attacked { attack: AttackSpec },
}

impl Scenario {
    pub fn attack(spec: AttackSpec) -> Self {
        Scenario::Attacked { attack: spec }
    }

    pub fn label(&self) -> String {
        match self {
            Scenario::Conventional => "conv".into(),
            Scenario::Trusted => "tr".into(),
            Scenario::Attacked { attack } => attack.label(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Conventional => f.write_str("conv"),
            Scenario::Trusted => f.write_str("trusted"),
            Scenario::Attacked { attack } => attack.fmt(f),
        }
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(key, format!("not a number: {value:?}")))
}

impl FromStr for Scenario {
    type Err = Error;

    /// `conv`, `trusted`, `pia:g=2,n=1` or `voa:r=4` / `voa:r=1/T`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut gain = None;
        let mut idler = 1.0;
        let mut ratio = None;
        for kv in args.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::invalid(s, format!("expected key=value, got {kv:?}")))?;
            match (kind, key.trim()) {
                ("pia", "g") => gain = Some(parse_number("g", value)?),
                ("pia", "n" | "N") => idler = parse_number("N", value)?,
                ("voa", "r") => {
                    ratio = Some(match value.trim() {
                        "1/T" | "inv-T" | "inverse-T" | "invT" => VoaRatio::InverseTransmittance,
                        v => VoaRatio::Fixed(parse_number("r", v)?),
                    })
                }
                _ => {
                    return Err(Error::invalid(
                        s,
                        format!("unknown scenario argument {key:?}"),
                    ))
                }
            }
        }
        let scenario = match kind {
            "conv" | "conventional" if args.is_empty() => Scenario::Conventional,
            "trusted" | "tr" if args.is_empty() => Scenario::Trusted,
            "pia" => Scenario::attack(AttackSpec::Pia {
                gain: gain.ok_or_else(|| Error::invalid(s, "pia needs g=<gain>"))?,
                idler,
            }),
            "voa" => Scenario::attack(AttackSpec::Voa {
                ratio: ratio.ok_or_else(|| Error::invalid(s, "voa needs r=<ratio> or r=1/T"))?,
            }),
            _ => return Err(Error::invalid(s, "unknown scenario")),
        };
        if let Scenario::Attacked { attack } = &scenario {
            attack.validate()?;
        }
        Ok(scenario)
    }
}

/// Parses a comma-separated scenario list such as
/// `conv,trusted,pia:g=2,n=1,pia:g=10,voa:r=1/T`. A `key=value` item without a
/// kind prefix belongs to the preceding attack. Duplicates are dropped.
pub fn parse_scenarios(list: &str) -> Result<Vec<Scenario>> {
    let mut groups: Vec<String> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        match groups.last_mut() {
            Some(prev) if !item.contains(':') && item.contains('=') => {
                prev.push(',');
                prev.push_str(item);
            }
            _ => groups.push(item.to_string()),
        }
    }
    let mut out: Vec<Scenario> = Vec::new();
    for g in groups {
        let s: Scenario = g.parse()?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Budget, key rate and (for attacks) the attack bookkeeping of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub budget: NoiseBudget,
    pub key: KeyRateResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack_noise: Option<AttackNoise>,
}

pub fn evaluate_scenario(
    params: &ValidatedParams,
    t: f64,
    components: &NoiseComponents,
    scenario: &Scenario,
) -> Result<ScenarioResult> {
    let (budget, attack_noise) = match scenario {
        Scenario::Conventional => (conventional_budget(components, params, t), None),
        Scenario::Trusted => (trusted_budget(components, params, t), None),
        Scenario::Attacked { attack } => {
            let outcome = apply_attack(params, t, components, attack)?;
            (outcome.budget, Some(outcome.noise))
        }
    };
    let key = secret_key_rate(params, &budget)?;
    Ok(ScenarioResult {
        budget,
        key,
        attack_noise,
    })
}

/// Key rate of one scenario at `distance_km`.
pub fn key_rate_at(
    params: &ValidatedParams,
    distance_km: f64,
    scenario: &Scenario,
) -> Result<KeyRateResult> {
    let t = transmittance(distance_km, params.fiber_loss_db_per_km)?;
    let components = assemble_components(params, t)?;
    Ok(evaluate_scenario(params, t, &components, scenario)?.key)
}

/// Share of the claimed (trusted-model) key that is insecure under an attack,
/// `1 − K_attacked / K_trusted` clipped to `[0, 1]`; 0 when there is no
/// claimed key.
pub fn eve_fraction(k_trusted: f64, k_attacked: f64) -> f64 {
    if k_trusted.is_nan() || k_trusted <= 0.0 {
        return 0.0;
    }
    (1.0 - k_attacked / k_trusted).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub scenario: Scenario,
    #[serde(flatten)]
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellOutcome {
    Ok {
        #[serde(flatten)]
        result: ScenarioResult,
        #[serde(skip_serializing_if = "Option::is_none")]
        eve_fraction: Option<f64>,
    },
    Failed {
        kind: String,
        error: String,
    },
}

impl Cell {
    pub fn result(&self) -> Option<&ScenarioResult> {
        match &self.outcome {
            CellOutcome::Ok { result, .. } => Some(result),
            CellOutcome::Failed { .. } => None,
        }
    }

    pub fn eve_fraction(&self) -> Option<f64> {
        match self.outcome {
            CellOutcome::Ok { eve_fraction, .. } => eve_fraction,
            CellOutcome::Failed { .. } => None,
        }
    }

    pub fn k(&self) -> Option<f64> {
        self.result().map(|r| r.key.k)
    }
}

/// Every requested scenario evaluated at one distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub distance_km: f64,
    pub transmittance: f64,
    pub xi_tot: f64,
    pub components: NoiseComponents,
    pub cells: Vec<Cell>,
}

impl SweepRow {
    pub fn cell(&self, scenario: &Scenario) -> Option<&Cell> {
        self.cells.iter().find(|c| &c.scenario == scenario)
    }
}

/// Evaluates `scenarios` at one distance. Per-scenario failures are recorded
/// in the cells.
pub fn evaluate_point(
    params: &ValidatedParams,
    distance_km: f64,
    scenarios: &[Scenario],
) -> Result<SweepRow> {
    let t = transmittance(distance_km, params.fiber_loss_db_per_km)?;
    let components = assemble_components(params, t)?;
    let trusted_k = evaluate_scenario(params, t, &components, &Scenario::Trusted).map(|r| r.key.k);

    let cells = scenarios
        .iter()
        .map(|scenario| {
            let outcome = match evaluate_scenario(params, t, &components, scenario) {
                Ok(result) => {
                    let eve_fraction = match (scenario, &trusted_k) {
                        (Scenario::Attacked { .. }, Ok(k_tr)) => {
                            Some(eve_fraction(*k_tr, result.key.k))
                        }
                        _ => None,
                    };
                    CellOutcome::Ok {
                        result,
                        eve_fraction,
                    }
                }
                Err(e) => CellOutcome::Failed {
                    kind: e.kind().to_string(),
                    error: e.to_string(),
                },
            };
            Cell {
                scenario: *scenario,
                outcome,
            }
        })
        .collect();

    Ok(SweepRow {
        distance_km,
        transmittance: t,
        xi_tot: components.total,
        components,
        cells,
    })
}

/// Distance grid `d_min, d_min + step, ...` up to and including `d_max` when
/// it falls on the grid.
pub fn distance_grid(d_min: f64, d_max: f64, step: f64) -> Result<Vec<f64>> {
    let mut errs = crate::error::ValidationErrors::default();
    if !(d_min.is_finite() && d_min >= 0.0) {
        errs.push("from", format!("must be finite and >= 0, got {d_min}"));
    }
    if !(d_max.is_finite() && d_max > d_min) {
        errs.push(
            "to",
            format!("must be finite and > from ({d_min}), got {d_max}"),
        );
    }
    if !(step.is_finite() && step > 0.0) {
        errs.push("step", format!("must be finite and > 0, got {step}"));
    }
    errs.into_result(())?;
    let n = ((d_max - d_min) / step * (1.0 + 1e-12)).floor() as usize;
    Ok((0..=n).map(|i| d_min + i as f64 * step).collect())
}

pub fn sweep(
    params: &ValidatedParams,
    scenarios: &[Scenario],
    d_min: f64,
    d_max: f64,
    step: f64,
) -> Result<Vec<SweepRow>> {
    distance_grid(d_min, d_max, step)?
        .into_par_iter()
        .map(|d| evaluate_point(params, d, scenarios))
        .collect()
}

/// Fixed leading columns of the sweep table.
pub const SWEEP_HEADER: [&str; 15] = [
    "distance_km",
    "T",
    "xi_tot",
    "chi_line_conv",
    "chi_het_conv",
    "chi_tot_conv",
    "K_conv",
    "chi_line_tr",
    "chi_het_tr",
    "chi_tot_tr",
    "K_tr",
    "K_pia",
    "eve_frac_pia",
    "K_voa",
    "eve_frac_voa",
];

/// Sweep rows flattened to named columns. Cells of scenarios that were not
/// requested, or that failed, are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

enum Column {
    Distance,
    Transmittance,
    XiTot,
    ChiLine(usize),
    ChiHet(usize),
    ChiTot(usize),
    K(usize),
    EveFraction(usize),
    Empty,
}

impl SweepTable {
    /// The first PIA and first VOA scenario fill the fixed `K_pia` / `K_voa`
    /// columns; further attack scenarios append `K_<label>,eve_frac_<label>`.
    pub fn new(scenarios: &[Scenario], rows: &[SweepRow]) -> Self {
        let position = |pred: &dyn Fn(&Scenario) -> bool| scenarios.iter().position(pred);
        let conv = position(&|s| matches!(s, Scenario::Conventional));
        let tr = position(&|s| matches!(s, Scenario::Trusted));
        let is_pia = |s: &Scenario| {
            matches!(
                s,
                Scenario::Attacked {
                    attack: AttackSpec::Pia { .. }
                }
            )
        };
        let is_voa = |s: &Scenario| {
            matches!(
                s,
                Scenario::Attacked {
                    attack: AttackSpec::Voa { .. }
                }
            )
        };
        let pia = position(&is_pia);
        let voa = position(&is_voa);
        let or_empty = |i: Option<usize>, f: fn(usize) -> Column| i.map_or(Column::Empty, f);

        let mut columns = vec![
            Column::Distance,
            Column::Transmittance,
            Column::XiTot,
            or_empty(conv, Column::ChiLine),
            or_empty(conv, Column::ChiHet),
            or_empty(conv, Column::ChiTot),
            or_empty(conv, Column::K),
            or_empty(tr, Column::ChiLine),
            or_empty(tr, Column::ChiHet),
            or_empty(tr, Column::ChiTot),
            or_empty(tr, Column::K),
            or_empty(pia, Column::K),
            or_empty(pia, Column::EveFraction),
            or_empty(voa, Column::K),
            or_empty(voa, Column::EveFraction),
        ];
        let mut header: Vec<String> = SWEEP_HEADER.iter().map(|s| s.to_string()).collect();
        for (i, s) in scenarios.iter().enumerate() {
            if matches!(s, Scenario::Attacked { .. }) && Some(i) != pia && Some(i) != voa {
                header.push(format!("K_{}", s.label()));
                header.push(format!("eve_frac_{}", s.label()));
                columns.push(Column::K(i));
                columns.push(Column::EveFraction(i));
            }
        }

        let rows = rows
            .iter()
            .map(|row| {
                columns
                    .iter()
                    .map(|col| {
                        let cell = |i: usize| row.cell(&scenarios[i]);
                        let budget = |i: usize| cell(i).and_then(Cell::result).map(|r| r.budget);
                        match *col {
                            Column::Distance => Some(row.distance_km),
                            Column::Transmittance => Some(row.transmittance),
                            Column::XiTot => Some(row.xi_tot),
                            Column::ChiLine(i) => budget(i).map(|b| b.chi_line),
                            Column::ChiHet(i) => budget(i).map(|b| b.chi_het),
                            Column::ChiTot(i) => budget(i).map(|b| b.chi_tot),
                            Column::K(i) => cell(i).and_then(Cell::k),
                            Column::EveFraction(i) => cell(i).and_then(Cell::eve_fraction),
                            Column::Empty => None,
                        }
                    })
                    .collect()
            })
            .collect();
        Self { header, rows }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), std::io::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(
                row.iter()
                    .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
            )?;
        }
        out.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Array of objects keyed by the CSV header; empty cells become `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| {
                        (
                            k.clone(),
                            v.map_or(serde_json::Value::Null, serde_json::Value::from),
                        )
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Bisection settings for [`zero_key_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroKeySearch {
    pub max_distance_km: f64,
    /// Coarse pre-scan step used to bracket the crossing.
    pub scan_step_km: f64,
    pub tolerance_km: f64,
}

impl Default for ZeroKeySearch {
    fn default() -> Self {
        Self {
            max_distance_km: 200.0,
            scan_step_km: 5.0,
            tolerance_km: 0.01,
        }
    }
}

/// Bisection on a bracket `f(lo) > 0 >= f(hi)` until the bracket is narrower
/// than `tol`; returns its midpoint.
pub fn bisect_sign_change<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(f(lo)? > 0.0 && f(hi)? <= 0.0) {
        return Err(Error::RootSearch(format!(
            "[{lo}, {hi}] does not bracket a sign change"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Distance where the key rate of `scenario` first reaches zero, or
/// `f64::INFINITY` if it stays positive up to the search limit.
pub fn zero_key_distance(params: &ValidatedParams, scenario: &Scenario) -> Result<f64> {
    zero_key_distance_with(params, scenario, ZeroKeySearch::default())
}

pub fn zero_key_distance_with(
    params: &ValidatedParams,
    scenario: &Scenario,
    search: ZeroKeySearch,
) -> Result<f64> {
    let k = |d: f64| key_rate_at(params, d, scenario).map(|r| r.k);
    if k(0.0)? <= 0.0 {
        return Err(Error::NoPositiveKey(scenario.to_string()));
    }

    let grid = distance_grid(0.0, search.max_distance_km, search.scan_step_km)?;
    let mut bracket = None;
    let mut prev = 0.0;
    for &d in &grid[1..] {
        let positive = k(d)? > 0.0;
        match (bracket, positive) {
            (None, false) => bracket = Some((prev, d)),
            (Some(_), true) => {
                return Err(Error::RootSearch(format!(
                    "{scenario}: key rate turns positive again at {d} km"
                )))
            }
            _ => {}
        }
        prev = d;
    }
    match bracket {
        Some((lo, hi)) => bisect_sign_change(lo, hi, search.tolerance_km, k),
        None => Ok(f64::INFINITY),
    }
}

/// Distance interval where the trusted model still claims a key but the
/// attack has already removed it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionReport {
    pub attack: AttackSpec,
    pub d_zero_attack: f64,
    pub d_zero_trusted: f64,
    pub insecure_interval: [f64; 2],
    pub width_km: f64,
}

pub fn insecure_region(params: &ValidatedParams, attack: &AttackSpec) -> Result<RegionReport> {
    attack.validate()?;
    let d_zero_trusted = zero_key_distance(params, &Scenario::Trusted)?;
    let d_zero_attack = zero_key_distance(params, &Scenario::attack(*attack))?.min(d_zero_trusted);
    Ok(RegionReport {
        attack: *attack,
        d_zero_attack,
        d_zero_trusted,
        insecure_interval: [d_zero_attack, d_zero_trusted],
        width_km: d_zero_trusted - d_zero_attack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;

    fn canonical() -> ValidatedParams {
        ValidatedParams::canonical()
    }

    #[test]
    fn scenario_parsing() {
        let list = parse_scenarios("conv,trusted,pia:g=2,pia:g=10,n=1,voa:r=1/T,voa:r=4").unwrap();
        assert_eq!(
            list,
            vec![
                Scenario::Conventional,
                Scenario::Trusted,
                Scenario::attack(AttackSpec::pia(2.0, 1.0)),
                Scenario::attack(AttackSpec::pia(10.0, 1.0)),
                Scenario::attack(AttackSpec::voa_inverse_t()),
                Scenario::attack(AttackSpec::voa(4.0)),
            ]
        );
        assert_eq!(parse_scenarios("conv,conv").unwrap().len(), 1);
        assert!(parse_scenarios("").unwrap().is_empty());
        assert!(parse_scenarios("pia").is_err());
        assert!(parse_scenarios("pia:g=0.5").is_err());
        assert!(parse_scenarios("voa:g=2").is_err());
        assert!(parse_scenarios("bogus").is_err());
        for s in &list {
            assert_eq!(&s.to_string().parse::<Scenario>().unwrap(), s);
        }
    }

    #[test]
    fn fraction_definition() {
        assert_eq!(eve_fraction(0.5, 0.5), 0.0);
        assert_eq!(eve_fraction(0.5, -0.1), 1.0);
        assert_eq!(eve_fraction(0.5, 0.0), 1.0);
        assert_eq!(eve_fraction(0.0, -1.0), 0.0);
        assert_eq!(eve_fraction(-0.2, -1.0), 0.0);
        assert!((eve_fraction(0.4, 0.3) - 0.25).abs() < 1e-15);
        assert_eq!(eve_fraction(0.4, 0.5), 0.0);
    }

    #[test]
    fn grid() {
        assert_eq!(distance_grid(0.0, 80.0, 1.0).unwrap().len(), 81);
        assert_eq!(distance_grid(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert_eq!(distance_grid(0.0, 1.05, 0.5).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(distance_grid(5.0, 5.0, 1.0).unwrap_err().is_validation());
        assert!(distance_grid(0.0, 5.0, 0.0).is_err());
        assert!(distance_grid(-1.0, 5.0, 1.0).is_err());
    }

    #[test]
    fn sweep_without_scenarios() {
        let rows = sweep(&canonical(), &[], 0.0, 10.0, 5.0).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.cells.is_empty()));
        let table = SweepTable::new(&[], &rows);
        let csv = table.to_csv_string();
        let first = csv.lines().nth(1).unwrap();
        assert!(first.starts_with("0,1,"));
        assert!(first.ends_with(",,,,,,,,,,,,"));
    }

    #[test]
    fn failed_cells_do_not_abort() {
        // N above the trusted detection noise: PIA is self-defeating
        let scenarios = [
            Scenario::Trusted,
            Scenario::attack(AttackSpec::pia(2.0, 5.0)),
        ];
        let rows = sweep(&canonical(), &scenarios, 0.0, 20.0, 10.0).unwrap();
        for row in &rows {
            assert!(row.cells[0].result().is_some());
            assert!(matches!(row.cells[1].outcome, CellOutcome::Failed { .. }));
        }
        let table = SweepTable::new(&scenarios, &rows);
        let k_pia = table.header.iter().position(|h| h == "K_pia").unwrap();
        assert!(table.rows.iter().all(|r| r[k_pia].is_none()));
    }

    #[test]
    fn extra_attack_columns() {
        let scenarios = parse_scenarios("conv,trusted,pia:g=2,pia:g=10,voa:r=1/T,voa:r=2").unwrap();
        let rows = sweep(&canonical(), &scenarios, 0.0, 2.0, 1.0).unwrap();
        let table = SweepTable::new(&scenarios, &rows);
        assert_eq!(&table.header[..15], &SWEEP_HEADER);
        assert_eq!(
            &table.header[15..],
            [
                "K_pia_g10_n1",
                "eve_frac_pia_g10_n1",
                "K_voa_r2",
                "eve_frac_voa_r2"
            ]
        );
        assert!(table.rows.iter().all(|r| r.iter().all(Option::is_some)));
        let json = table.to_json();
        assert_eq!(json.as_array().unwrap().len(), 3);
        assert!(json[0]["K_pia_g10_n1"].is_number());
    }

    #[test]
    fn bisection_matches_fine_grid() {
        // K(d) = 37.3 - d: crossing known in closed form
        let root = bisect_sign_change(35.0, 40.0, 0.01, |d| Ok(37.3 - d)).unwrap();
        assert!((root - 37.3).abs() <= 0.01);
        assert!(bisect_sign_change(0.0, 1.0, 0.01, |d| Ok(5.0 - d)).is_err());
    }

    #[test]
    fn zero_key_distance_brackets_the_crossing() {
        let p = canonical();
        let d = zero_key_distance(&p, &Scenario::Trusted).unwrap();
        assert!(key_rate_at(&p, d - 0.01, &Scenario::Trusted).unwrap().k > 0.0);
        assert!(key_rate_at(&p, d + 0.01, &Scenario::Trusted).unwrap().k < 0.0);

        // fine-grid oracle: last positive point on a 0.005 km grid
        let grid = distance_grid(d - 1.0, d + 1.0, 0.005).unwrap();
        let last_positive = grid
            .iter()
            .copied()
            .filter(|&x| key_rate_at(&p, x, &Scenario::Trusted).unwrap().k > 0.0)
            .fold(f64::NAN, f64::max);
        assert!((d - last_positive).abs() <= 0.01);
    }

    #[test]
    fn zero_key_edge_cases() {
        let lossless = SystemParams {
            fiber_loss_db_per_km: 0.0,
            ..SystemParams::canonical()
        }
        .validate()
        .unwrap();
        assert_eq!(
            zero_key_distance(&lossless, &Scenario::Trusted).unwrap(),
            f64::INFINITY
        );

        let hopeless = SystemParams {
            system_excess_noise: 2.0,
            ..SystemParams::canonical()
        }
        .validate()
        .unwrap();
        assert!(matches!(
            zero_key_distance(&hopeless, &Scenario::Conventional),
            Err(Error::NoPositiveKey(_))
        ));
    }

    #[test]
    fn region_without_attack_is_empty() {
        let p = canonical();
        let r = insecure_region(&p, &AttackSpec::voa(1.0)).unwrap();
        assert_eq!(r.width_km, 0.0);
        assert_eq!(r.d_zero_attack, r.d_zero_trusted);
        let r = insecure_region(&p, &AttackSpec::pia(1.0, 1.0)).unwrap();
        assert_eq!(r.width_km, 0.0);
    }

    #[test]
    fn region_grows_with_ratio() {
        let p = canonical();
        let widths: Vec<f64> = [
            AttackSpec::voa(1.0),
            AttackSpec::voa(2.0),
            AttackSpec::voa_inverse_t(),
        ]
        .iter()
        .map(|a| insecure_region(&p, a).unwrap().width_km)
        .collect();
        assert!(widths.windows(2).all(|w| w[1] >= w[0]), "{widths:?}");
        assert!(widths[2] > 0.0);

        let voa = insecure_region(&p, &AttackSpec::voa_inverse_t()).unwrap();
        let pia = insecure_region(&p, &AttackSpec::pia(1e9, 1.0)).unwrap();
        assert!(voa.d_zero_attack <= pia.d_zero_attack);
        assert!(voa.width_km >= pia.width_km);
    }
}
