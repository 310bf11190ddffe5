use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use phaseref_core::analysis::{evaluate_point, CellOutcome, SweepRow};
use phaseref_core::monitor::monitor_report;
use phaseref_core::{
    insecure_region, parse_scenarios, sweep, AttackSpec, Error, MonitorParams, ReadingMode,
    Scenario, SweepTable, SystemParams, ValidatedParams, ValidationErrors,
};

use crate::args::{AttackAt, AttackKind, Cli, Command, Format, PiaArgs, RatioMode, VoaArgs};

#[derive(Debug)]
pub enum CliError {
    /// Command-line syntax rejected by the parser.
    Usage(String),
    Core(Error),
    /// One scenario of a point evaluation failed.
    Scenario {
        kind: String,
        message: String,
    },
    Io {
        path: String,
        message: String,
    },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        let mut errs = ValidationErrors::default();
        errs.push(field, message);
        CliError::Core(Error::Validation(errs))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Scenario { kind, .. } if kind == "validation" => 2,
            CliError::Core(_) | CliError::Scenario { .. } | CliError::Io { .. } => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let body = match self {
            CliError::Usage(message) => json!({ "kind": "usage", "message": message.trim_end() }),
            CliError::Core(Error::Validation(errs)) => json!({
                "kind": "validation",
                "message": errs.to_string(),
                "fields": errs,
            }),
            CliError::Core(e) => json!({ "kind": e.kind(), "message": e.to_string() }),
            CliError::Scenario { kind, message } => json!({ "kind": kind, "message": message }),
            CliError::Io { path, message } => {
                json!({ "kind": "io", "path": path, "message": message })
            }
        };
        json!({ "error": body }).to_string()
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn load_params(cli: &Cli) -> Result<ValidatedParams> {
    let mut params = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::invalid("config", format!("{}: {e}", path.display())))?;
            SystemParams::from_json(&text)?
        }
        None => SystemParams::canonical(),
    };
    for assignment in &cli.overrides {
        params.set(assignment)?;
    }
    Ok(params.validate()?)
}

pub fn run(cli: &Cli) -> Result<()> {
    let params = load_params(cli)?;
    match &cli.command {
        Command::Point(a) => {
            let scenarios = scenario_list(&a.scenarios)?;
            let row = evaluate_point(&params, a.distance, &scenarios)?;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => emit_json(cli, &row)?,
                Format::Csv => emit(
                    cli,
                    &SweepTable::new(&scenarios, std::slice::from_ref(&row)).to_csv_string(),
                )?,
            }
            first_failure(&row)
        }
        Command::Sweep(a) => {
            let scenarios = scenario_list(&a.scenarios)?;
            let rows = sweep(&params, &scenarios, a.from, a.to, a.step)?;
            let table = SweepTable::new(&scenarios, &rows);
            match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => emit(cli, &table.to_csv_string()),
                Format::Json => emit_json(cli, &table.to_json()),
            }
        }
        Command::Attack { kind } => {
            json_only(cli, "attack")?;
            let (spec, distance) = match kind {
                AttackAt::Pia { spec, distance } => (pia_spec(spec), *distance),
                AttackAt::Voa { spec, distance } => (voa_spec(spec), *distance),
            };
            spec.validate()?;
            let scenario = Scenario::attack(spec);
            let row = evaluate_point(&params, distance, &[Scenario::Trusted, scenario])?;
            first_failure(&row)?;
            let trusted = row.cells[0].result().expect("checked above");
            let attacked = row.cells[1].result().expect("checked above");
            let region = insecure_region(&params, &spec)?;
            emit_json(
                cli,
                &json!({
                    "attack": spec,
                    "label": spec.to_string(),
                    "distance_km": distance,
                    "transmittance": row.transmittance,
                    "noise": attacked.attack_noise,
                    "trusted": trusted.key,
                    "attacked": attacked.key,
                    "eve_fraction": row.cells[1].eve_fraction(),
                    "d_zero_attack": finite(region.d_zero_attack),
                    "d_zero_trusted": finite(region.d_zero_trusted),
                }),
            )
        }
        Command::Region { kind } => {
            json_only(cli, "region")?;
            let spec = match kind {
                AttackKind::Pia(a) => pia_spec(a),
                AttackKind::Voa(a) => voa_spec(a),
            };
            let r = insecure_region(&params, &spec)?;
            emit_json(
                cli,
                &json!({
                    "attack": spec,
                    "label": spec.to_string(),
                    "d_zero_attack": finite(r.d_zero_attack),
                    "d_zero_trusted": finite(r.d_zero_trusted),
                    "insecure_interval": [finite(r.insecure_interval[0]), finite(r.insecure_interval[1])],
                    "width_km": finite(r.width_km),
                }),
            )
        }
        Command::Monitor(a) => {
            json_only(cli, "monitor")?;
            let attack = a.attack.as_deref().map(parse_attack).transpose()?;
            let mode = match (a.sampled, cli.seed) {
                (false, _) => ReadingMode::Interval,
                (true, Some(seed)) => ReadingMode::Sampled { seed },
                (true, None) => return Err(CliError::invalid("seed", "--sampled requires --seed")),
            };
            let mp = MonitorParams {
                tap_ratio: a.tap_ratio,
                monitor_gain: a.monitor_gain,
                meter_rel_error: a.sigma,
                alarm_threshold: a.tau,
            };
            let report = monitor_report(&params, a.distance, attack.as_ref(), &mp, mode)?;
            emit_json(cli, &report)
        }
    }
}

fn scenario_list(list: &str) -> Result<Vec<Scenario>> {
    let scenarios = parse_scenarios(list)?;
    if scenarios.is_empty() {
        return Err(CliError::invalid("scenarios", "no scenario given"));
    }
    Ok(scenarios)
}

fn parse_attack(text: &str) -> Result<AttackSpec> {
    match text.parse::<Scenario>()? {
        Scenario::Attacked { attack } => Ok(attack),
        other => Err(CliError::invalid(
            "attack",
            format!("{other} is not an attack"),
        )),
    }
}

fn pia_spec(a: &PiaArgs) -> AttackSpec {
    AttackSpec::pia(a.g, a.n)
}

fn voa_spec(a: &VoaArgs) -> AttackSpec {
    match (a.r, a.r_mode) {
        (Some(r), _) => AttackSpec::voa(r),
        (None, Some(RatioMode::InverseT)) | (None, None) => AttackSpec::voa_inverse_t(),
    }
}

/// JSON has no infinity; a missing zero crossing is `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn json_only(cli: &Cli, command: &str) -> Result<()> {
    match cli.format {
        Some(Format::Csv) => Err(CliError::invalid(
            "format",
            format!("{command} only writes json"),
        )),
        _ => Ok(()),
    }
}

/// Output is still written for the scenarios that succeeded.
fn first_failure(row: &SweepRow) -> Result<()> {
    for cell in &row.cells {
        if let CellOutcome::Failed { kind, error } = &cell.outcome {
            return Err(CliError::Scenario {
                kind: kind.clone(),
                message: format!("{}: {error}", cell.scenario),
            });
        }
    }
    Ok(())
}

fn emit_json<T: Serialize + ?Sized>(cli: &Cli, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    emit(cli, &text)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => write_file(path, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
