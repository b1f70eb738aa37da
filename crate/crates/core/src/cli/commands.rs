use std::fs::File;
use std::io::BufWriter;

use rayon::prelude::*;
use serde_json::{Map, Value};

use super::config::{resolve_network, resolve_scheme};
use super::{
    num, usage, Body, ClassicalMode, Cli, Command, FileConfig, Format, NetworkArgs, Outcome,
    RunSpec, SweepGrid, EXIT_MISMATCH, EXIT_OK,
};
use crate::classical::{enumerate_deterministic_max, region_slice, DFamily, SampledClassicalModel};
use crate::error::{Error, Result};
use crate::inequality::combinatorics::k_empty_from_counts;
use crate::inequality::sweep::{diagonal_sweep, grid_sweep, sweep_value_direct};
use crate::inequality::visibility::Threshold;
use crate::inequality::{
    bell_value, classical_bound, critical_visibility, find_critical_visibility, k_spectrum,
    predicted_quantum_value, q_spectrum, violates, BobSettingMap, KSpectrum,
};
use crate::network::{NetworkConfig, SubsetIndex};
use crate::quantum::{network_table, MeasurementScheme, Scheme};
use crate::swapping::{swap_spectrum, SwapConditioning};

/// Largest number of branch observers simulated as a dense table by the CLI.
pub const SIMULATION_OBSERVERS: usize = 8;

const VALUE_TOLERANCE: f64 = 1e-9;
const VISIBILITY_TOLERANCE: f64 = 1e-6;
const IDENTITY_TOLERANCE: f64 = 1e-12;

struct Ctx<'a> {
    cli: &'a Cli,
    file: &'a FileConfig,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.cli.seed.or(self.file.seed).unwrap_or(0)
    }

    fn run_spec(
        &self,
        command: &'static str,
        config: Option<NetworkConfig>,
        scheme: Option<Scheme>,
        default_format: Format,
    ) -> RunSpec {
        RunSpec {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            scheme,
            parameters: Map::new(),
            seed: self.seed(),
            format: self.cli.format.unwrap_or(default_format),
            out: self.cli.out.clone(),
        }
    }
}

fn spectrum_json(s: &KSpectrum) -> Value {
    Value::Object(
        s.entries()
            .iter()
            .enumerate()
            .map(|(mask, &k)| (mask.to_string(), num(k)))
            .collect(),
    )
}

fn simulable(config: &NetworkConfig) -> bool {
    config.total_observers() <= SIMULATION_OBSERVERS
}

fn over_budget(config: &NetworkConfig) -> String {
    format!(
        "{config} has {} branch observers, above the simulation budget of {SIMULATION_OBSERVERS}; \
         reporting closed forms only",
        config.total_observers()
    )
}

pub fn run(cli: &Cli, file: &FileConfig) -> Result<Outcome> {
    let ctx = Ctx { cli, file };
    match &cli.command {
        Command::Violate { net, table } => violate(&ctx, net, table.as_deref()),
        Command::Sweep { l, n, points, grid } => sweep(&ctx, *l, *n, *points, *grid),
        Command::Noise { net } => noise(&ctx, net),
        Command::Classical {
            net,
            mode,
            trials,
            lattice,
            points,
        } => classical(&ctx, net, *mode, *trials, *lattice, *points),
        Command::Region {
            net,
            value,
            fixed,
            resolution,
        } => region(&ctx, net, *value, *fixed, *resolution),
        Command::Swap { net, conditioning } => swap(&ctx, net, conditioning.as_deref()),
        Command::Bound { net } => bound(&ctx, net),
    }
}

fn violate(ctx: &Ctx, net: &NetworkArgs, table_path: Option<&std::path::Path>) -> Result<Outcome> {
    let config = resolve_network(net, ctx.file)?;
    let scheme = resolve_scheme(net, ctx.file, Scheme::Xy);
    let run = ctx.run_spec("violate", Some(config.clone()), Some(scheme), Format::Json);
    let predicted = predicted_quantum_value(&config, scheme);
    let bound = classical_bound(&config);
    let mut fields = Map::new();
    let mut warnings = Vec::new();
    let mut exit = EXIT_OK;

    if simulable(&config) {
        let table = network_table(
            &config,
            &MeasurementScheme::standard(&config, scheme),
            &vec![1.0; config.n()],
        )?;
        if let Some(path) = table_path {
            table.write_csv(BufWriter::new(File::create(path)?))?;
        }
        let spectrum = q_spectrum(&table, &BobSettingMap::for_scheme(&config, scheme)?)?;
        let value = bell_value(&spectrum);
        let agrees = (value - predicted).abs() <= VALUE_TOLERANCE;
        if !agrees {
            exit = EXIT_MISMATCH;
        }
        fields.insert("simulated_value".into(), num(value));
        fields.insert("agrees".into(), Value::from(agrees));
        fields.insert("entries".into(), spectrum_json(&spectrum));
    } else {
        if table_path.is_some() {
            return Err(usage(
                "--table needs a network within the simulation budget",
            ));
        }
        warnings.push(over_budget(&config));
        fields.insert("simulated_value".into(), Value::Null);
    }
    fields.insert("predicted_value".into(), num(predicted));
    fields.insert("classical_bound".into(), num(bound));
    fields.insert("violated".into(), Value::from(violates(predicted, bound)));
    Ok(Outcome {
        run,
        body: Body::Report(fields),
        warnings,
        exit,
    })
}

fn sweep(
    ctx: &Ctx,
    l: Option<usize>,
    n: Option<usize>,
    points: Option<usize>,
    grid: Option<SweepGrid>,
) -> Result<Outcome> {
    let l = l.or(ctx.file.l).unwrap_or(2);
    let n = n.or(ctx.file.n).unwrap_or(1);
    let points = points.or(ctx.file.points).unwrap_or(101);
    let grid = grid.unwrap_or(SweepGrid::Diagonal);
    let config = NetworkConfig::homogeneous(n, l)?;
    let mut run = ctx.run_spec("sweep", Some(config), None, Format::Csv);
    run.parameters.insert("points".into(), Value::from(points));
    run.parameters
        .insert("grid".into(), serde_json::to_value(grid)?);

    let sweep = match grid {
        SweepGrid::Diagonal => diagonal_sweep(l, points)?,
        SweepGrid::Full => grid_sweep(l, points)?,
    };
    let mut warnings = Vec::new();
    let mut exit = EXIT_OK;
    if l <= 12 {
        let worst = sweep
            .par_iter()
            .map(|p| sweep_value_direct(p.theta0, p.theta1, l).map(|d| (d - p.value).abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if worst > VALUE_TOLERANCE {
            warnings.push(format!(
                "expansion and direct summation differ by {worst:e}"
            ));
            exit = EXIT_MISMATCH;
        }
    } else {
        warnings.push(format!("L = {l} is too large for the direct cross-check"));
    }
    let rows = sweep
        .iter()
        .map(|p| vec![p.theta0, p.theta1, p.value])
        .collect();
    Ok(Outcome {
        run,
        body: Body::Rows {
            header: vec!["theta0".into(), "theta1".into(), "value".into()],
            rows,
            comment: None,
        },
        warnings,
        exit,
    })
}

fn noise(ctx: &Ctx, net: &NetworkArgs) -> Result<Outcome> {
    let config = resolve_network(net, ctx.file)?;
    let scheme = resolve_scheme(net, ctx.file, Scheme::Xy);
    let run = ctx.run_spec("noise", Some(config.clone()), Some(scheme), Format::Json);
    let closed = critical_visibility(&config, scheme);
    let mut fields = Map::new();
    let mut warnings = Vec::new();
    let mut exit = EXIT_OK;
    fields.insert("closed_form".into(), closed.map_or(Value::Null, num));
    fields.insert(
        "predicted_value".into(),
        num(predicted_quantum_value(&config, scheme)),
    );
    fields.insert("classical_bound".into(), num(classical_bound(&config)));

    if simulable(&config) {
        match find_critical_visibility(&config, scheme)? {
            Threshold::Crossing { visibility } => {
                fields.insert("bisection".into(), num(visibility));
                let agrees = closed.is_some_and(|c| (c - visibility).abs() <= VISIBILITY_TOLERANCE);
                fields.insert("agrees".into(), Value::from(agrees));
                fields.insert("no_violation".into(), Value::from(false));
                if !agrees {
                    exit = EXIT_MISMATCH;
                }
            }
            Threshold::NoViolation {
                value_at_full_visibility,
            } => {
                fields.insert("bisection".into(), Value::Null);
                fields.insert("no_violation".into(), Value::from(true));
                fields.insert(
                    "value_at_full_visibility".into(),
                    num(value_at_full_visibility),
                );
                fields.insert("agrees".into(), Value::from(closed.is_none()));
                if closed.is_some() {
                    exit = EXIT_MISMATCH;
                }
            }
        }
    } else {
        warnings.push(over_budget(&config));
        fields.insert("bisection".into(), Value::Null);
        fields.insert("no_violation".into(), Value::from(closed.is_none()));
    }
    Ok(Outcome {
        run,
        body: Body::Report(fields),
        warnings,
        exit,
    })
}

fn classical(
    ctx: &Ctx,
    net: &NetworkArgs,
    mode: ClassicalMode,
    trials: Option<usize>,
    lattice: Option<usize>,
    points: Option<usize>,
) -> Result<Outcome> {
    let config = resolve_network(net, ctx.file)?;
    let mut run = ctx.run_spec("classical", Some(config.clone()), None, Format::Json);
    run.parameters
        .insert("mode".into(), serde_json::to_value(mode)?);
    let bound = classical_bound(&config);
    let mut fields = Map::new();
    fields.insert("classical_bound".into(), num(bound));
    let mut warnings = Vec::new();
    let mut exit = EXIT_OK;

    match mode {
        ClassicalMode::DFamily => {
            let points = points.or(ctx.file.points).unwrap_or(100);
            if points < 2 {
                return Err(usage("--points must be at least 2"));
            }
            run.parameters.insert("points".into(), Value::from(points));
            let l = config.l_max();
            let check_tables = simulable(&config);
            let results = (0..points)
                .into_par_iter()
                .map(|i| {
                    // position k is offset along the grid so positions differ
                    let keep: Vec<f64> = (0..l)
                        .map(|k| {
                            ((i + k * (points / l.max(1))) % points) as f64 / (points - 1) as f64
                        })
                        .collect();
                    let family = DFamily::source_symmetric(&config, &keep)?;
                    let spectrum = family.spectrum()?;
                    let drift = if check_tables {
                        let map = BobSettingMap::convention(l)?;
                        k_spectrum(&family.table()?, &map)?.max_abs_diff(&spectrum)
                    } else {
                        0.0
                    };
                    Ok((bell_value(&spectrum), drift))
                })
                .collect::<Result<Vec<_>>>()?;
            let max = results
                .iter()
                .map(|r| r.0)
                .fold(f64::NEG_INFINITY, f64::max);
            let min = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
            let drift = results.iter().map(|r| r.1).fold(0.0, f64::max);
            let saturates = (max - bound).abs() <= IDENTITY_TOLERANCE
                && (min - bound).abs() <= IDENTITY_TOLERANCE;
            if !check_tables {
                warnings.push(over_budget(&config));
            }
            if drift > IDENTITY_TOLERANCE || !saturates {
                exit = EXIT_MISMATCH;
            }
            fields.insert("max_value".into(), num(max));
            fields.insert("min_value".into(), num(min));
            fields.insert("saturates".into(), Value::from(saturates));
            fields.insert("table_spectrum_drift".into(), num(drift));
        }
        ClassicalMode::Sample => {
            let trials = trials.or(ctx.file.trials).unwrap_or(10_000);
            let lattice = lattice.or(ctx.file.lattice).unwrap_or(4);
            run.parameters.insert("trials".into(), Value::from(trials));
            run.parameters
                .insert("lattice".into(), Value::from(lattice));
            if !simulable(&config) {
                return Err(Error::size(
                    "table observers",
                    config.total_observers(),
                    1,
                    SIMULATION_OBSERVERS,
                ));
            }
            let scheme = resolve_scheme(net, ctx.file, Scheme::Xy);
            let map = BobSettingMap::for_scheme(&config, scheme)?;
            let seed = ctx.seed();
            let (max, argmax) = (0..trials as u64)
                .into_par_iter()
                .map(|i| {
                    let s = seed.wrapping_add(i);
                    let model = SampledClassicalModel::sample(
                        s,
                        &config,
                        lattice,
                        map.required_settings(),
                    )?;
                    Ok((bell_value(&q_spectrum(&model.table()?, &map)?), s))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(
                    (f64::NEG_INFINITY, seed),
                    |a, b| if b.0 > a.0 { b } else { a },
                );
            let within = max <= bound + VALUE_TOLERANCE;
            if !within {
                exit = EXIT_MISMATCH;
            }
            fields.insert("max_value".into(), num(max));
            fields.insert("argmax_seed".into(), Value::from(argmax));
            fields.insert("within_bound".into(), Value::from(within));
        }
        ClassicalMode::Enumerate => {
            let map = BobSettingMap::convention(config.l_max())?;
            let (max, strategy) = enumerate_deterministic_max(&config, &map)?;
            let within = max <= bound + VALUE_TOLERANCE;
            if !within {
                exit = EXIT_MISMATCH;
            }
            fields.insert("max_value".into(), num(max));
            fields.insert("argmax".into(), serde_json::to_value(strategy)?);
            fields.insert("within_bound".into(), Value::from(within));
        }
    }
    Ok(Outcome {
        run,
        body: Body::Report(fields),
        warnings,
        exit,
    })
}

fn region(
    ctx: &Ctx,
    net: &NetworkArgs,
    value: Option<f64>,
    fixed: Option<u32>,
    resolution: Option<usize>,
) -> Result<Outcome> {
    let config = resolve_network(net, ctx.file)?;
    let fixed = SubsetIndex::from_mask(fixed.or(ctx.file.fixed).unwrap_or(0b11));
    let value = value
        .or(ctx.file.value)
        .unwrap_or_else(|| 0.25f64.powi(config.n() as i32));
    let resolution = resolution.or(ctx.file.resolution).unwrap_or(101);
    let mut run = ctx.run_spec("region", Some(config.clone()), None, Format::Csv);
    run.parameters
        .insert("fixed".into(), Value::from(fixed.mask()));
    run.parameters.insert("value".into(), num(value));
    run.parameters
        .insert("resolution".into(), Value::from(resolution));

    let points = region_slice(&config, fixed, value, resolution)?;
    let mut exit = EXIT_OK;
    let n = config.n() as f64;
    if points.iter().any(|p| {
        (p.k.iter().map(|k| k.abs().powf(1.0 / n)).sum::<f64>() - 1.0).abs() > IDENTITY_TOLERANCE
    }) {
        exit = EXIT_MISMATCH;
    }
    let rows = points
        .iter()
        .map(|p| vec![p.k[0], p.k[1], p.k[2]])
        .collect();
    Ok(Outcome {
        run,
        body: Body::Rows {
            header: vec!["K_empty".into(), "K_1".into(), "K_2".into()],
            rows,
            comment: Some(format!(
                "n={} L={} fixed=K_{} value={} grid={}",
                config.n(),
                config.l_max(),
                fixed.column_name(),
                crate::format::fmt_float(value),
                resolution
            )),
        },
        warnings: Vec::new(),
        exit,
    })
}

fn swap(ctx: &Ctx, net: &NetworkArgs, conditioning: Option<&std::path::Path>) -> Result<Outcome> {
    let config = resolve_network(net, ctx.file)?;
    let scheme = resolve_scheme(net, ctx.file, Scheme::Rotated);
    let mut run = ctx.run_spec("swap", Some(config.clone()), Some(scheme), Format::Json);
    let conditioning = match conditioning {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            SwapConditioning::from_json(&text, &config).map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
                other => other,
            })?
        }
        None => SwapConditioning::default_for(&config)?,
    };
    let conditioning_json: Value = serde_json::from_str(&conditioning.to_json()?)?;
    run.parameters
        .insert("conditioning".into(), conditioning_json);

    let spectrum = swap_spectrum(&config, scheme, &conditioning)?;
    let swap_value = bell_value(&spectrum);
    let mut fields = Map::new();
    let mut warnings = Vec::new();
    fields.insert("swap_value".into(), num(swap_value));
    fields.insert("entries".into(), spectrum_json(&spectrum));
    if simulable(&config) {
        let table = network_table(
            &config,
            &MeasurementScheme::standard(&config, scheme),
            &vec![1.0; config.n()],
        )?;
        let separable = bell_value(&q_spectrum(
            &table,
            &BobSettingMap::for_scheme(&config, scheme)?,
        )?);
        fields.insert("separable_value".into(), num(separable));
        fields.insert(
            "equal".into(),
            Value::from((separable - swap_value).abs() <= VALUE_TOLERANCE),
        );
    } else {
        warnings.push(over_budget(&config));
        fields.insert("separable_value".into(), Value::Null);
    }
    fields.insert("classical_bound".into(), num(classical_bound(&config)));
    Ok(Outcome {
        run,
        body: Body::Report(fields),
        warnings,
        exit: EXIT_OK,
    })
}

fn bound(ctx: &Ctx, net: &NetworkArgs) -> Result<Outcome> {
    let config = resolve_network(net, ctx.file)?;
    let run = ctx.run_spec("bound", Some(config.clone()), None, Format::Json);
    let mut fields = Map::new();
    let mut exit = EXIT_OK;
    fields.insert("classical_bound".into(), num(classical_bound(&config)));
    for scheme in [Scheme::Xy, Scheme::Rotated] {
        let name = scheme.name();
        fields.insert(
            format!("predicted_{name}"),
            num(predicted_quantum_value(&config, scheme)),
        );
        fields.insert(
            format!("critical_visibility_{name}"),
            critical_visibility(&config, scheme).map_or(Value::Null, num),
        );
    }
    if config.is_homogeneous() && config.l_max() % 2 == 0 {
        // counting form of |K_∅| under the XY scheme
        let l = config.l_max();
        let k = k_empty_from_counts(config.n(), l)?;
        let from_counts = (l as f64).exp2() * k.powf(1.0 / config.n() as f64);
        let agrees =
            (from_counts - predicted_quantum_value(&config, Scheme::Xy)).abs() <= VALUE_TOLERANCE;
        if !agrees {
            exit = EXIT_MISMATCH;
        }
        fields.insert("k_empty_from_counts".into(), num(k));
        fields.insert("agrees".into(), Value::from(agrees));
    }
    Ok(Outcome {
        run,
        body: Body::Report(fields),
        warnings: Vec::new(),
        exit,
    })
}
