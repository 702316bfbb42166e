use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use noma_outage::analytic::{pout_scenario, ClosedFormVariant, OutageResult};
use noma_outage::montecarlo::{sample_outage, sample_outage_protocol, McConfig, McModel};
use noma_outage::orderstat::{pout_quadrature, QuadratureRegion};
use noma_outage::scenario::{db_to_linear, linearize, pathloss_mean_gain, ScenarioSpec};
use noma_outage::sweep::{self, Preset, SweepPlan, SweepSpec};
use noma_outage::validate::{self, sig6, ValidationConfig};
use noma_outage::Error;

use crate::{McArgs, MethodArg, ModelArg, VariantArg};

pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Numeric(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        if err.is_input_error() {
            CliError::Input(err.to_string())
        } else {
            CliError::Numeric(err.to_string())
        }
    }
}

fn io_error(path: &Path, err: io::Error) -> CliError {
    CliError::Input(format!("cannot write {}: {err}", path.display()))
}

type CliResult = Result<ExitCode, CliError>;

fn closed_variant(v: VariantArg) -> ClosedFormVariant {
    match v {
        VariantArg::Paper => ClosedFormVariant::PaperEq25,
        VariantArg::Corrected => ClosedFormVariant::Corrected,
    }
}

fn mc_config(args: &McArgs, model: McModel) -> McConfig {
    McConfig::new(args.samples, args.seed).with_workers(args.workers).with_model(model)
}

fn print_result(spec: &ScenarioSpec, result: &OutageResult) {
    println!("n        {}", spec.n());
    println!("value    {}", sig6(result.value));
    println!("method   {}", result.method);
    println!("variant  {}", result.variant);
    if let Some(se) = result.stderr {
        println!("stderr   {}", sig6(se));
    }
}

pub fn outage(path: &Path, variant: VariantArg, method: MethodArg, model: ModelArg, tol: f64, mc: &McArgs) -> CliResult {
    let spec = ScenarioSpec::from_path(path)?;
    for warning in spec.warnings() {
        eprintln!("warning: {warning}");
    }
    let result = match method {
        MethodArg::Closed => pout_scenario(&spec, closed_variant(variant))?,
        MethodArg::Quad => {
            // The published limits reproduce the published variant; the ordered
            // region is the corrected one.
            let region = match variant {
                VariantArg::Paper => QuadratureRegion::PaperBounds,
                VariantArg::Corrected => QuadratureRegion::OrderedRegion,
            };
            let lin = linearize(&spec)?;
            pout_quadrature(&lin.means, lin.pthres_linear, region, tol)?
        }
        MethodArg::Mc => match model {
            ModelArg::Pair => {
                let lin = linearize(&spec)?;
                sample_outage(&lin.means, lin.pthres_linear, &mc_config(mc, McModel::PairThenOrder))?
            }
            ModelArg::Protocol => {
                let lin = linearize(&spec)?;
                let gains = spec
                    .ues
                    .iter()
                    .map(|ue| pathloss_mean_gain(spec.carrier_hz, ue.distance_m, spec.alpha))
                    .collect::<Result<Vec<_>, _>>()?;
                let powers = spec.ues.iter().map(|ue| db_to_linear(ue.snr_db)).collect::<Result<Vec<_>, _>>()?;
                sample_outage_protocol(&gains, &powers, lin.pthres_linear, &mc_config(mc, McModel::OrderThenPair))?
            }
        },
    };
    print_result(&spec, &result);
    Ok(ExitCode::SUCCESS)
}

pub fn sweep(source: &str, out: Option<&Path>) -> CliResult {
    let plan: SweepPlan = match source.parse::<Preset>() {
        Ok(preset) => preset.plan(),
        Err(_) => SweepSpec::from_path(source)?.into(),
    };
    let rows = sweep::run(&plan)?;
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(path, e))?;
            sweep::write_csv(&rows, BufWriter::new(file))?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => sweep::write_csv(&rows, io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn validate(instances: usize, out: Option<&Path>, mc: &McArgs) -> CliResult {
    let cfg = ValidationConfig {
        instances,
        seed: mc.seed,
        samples: mc.samples,
        workers: mc.workers,
        ..ValidationConfig::default()
    };
    let report = validate::run(&cfg)?;
    validate::write_table(&report, io::stdout().lock())?;
    if let Some(path) = out {
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        let mut w = BufWriter::new(file);
        validate::write_csv(&report, &mut w)?;
        w.flush().map_err(|e| io_error(path, e))?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
