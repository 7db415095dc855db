//! Subcommand implementations.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use stringcat_core::encoder::{EncoderKind, GammaPoissonEncoder, StringEncoder};
use stringcat_core::evaluation::{self, FprRow};
use stringcat_core::gamma_poisson::GammaPoissonModel;
use stringcat_core::{matrix_io, Encoded, RecoveryReport};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, CliResult};
use crate::ingest::{self, Table};

const TRACE_FILE: &str = "trace.csv";

fn open_output(cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::new("io", format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

/// The encoded column together with the table it came from.
struct Input {
    table: Table,
    index: usize,
    column: Vec<String>,
}

fn read_input(cfg: &RunConfig) -> CliResult<Input> {
    let table = ingest::read_table(cfg.require_input()?)?;
    let index = table.column_index(cfg.require_column()?)?;
    let column = table.categories(index);
    if column.is_empty() {
        return Err(CliError::config("input has no data rows"));
    }
    Ok(Input { table, index, column })
}

fn emit_matrix(cfg: &RunConfig, x: &Encoded, header: &[String], input: &Input) -> CliResult<()> {
    if header.len() != x.ncols() {
        return Err(stringcat_core::Error::DimensionMismatch {
            expected: x.ncols(),
            actual: header.len(),
        }
        .into());
    }
    let mut out = open_output(cfg)?;
    match cfg.format {
        OutputFormat::Binary => {
            if cfg.passthrough {
                return Err(CliError::config("--passthrough needs --format csv"));
            }
            matrix_io::write_binary(x, &mut out)?;
        }
        OutputFormat::Csv => {
            let keep: Vec<usize> = if cfg.passthrough {
                (0..input.table.headers.len()).filter(|&j| j != input.index).collect()
            } else {
                Vec::new()
            };
            let mut w = csv::Writer::from_writer(&mut out);
            let mut record: Vec<String> = keep.iter().map(|&j| input.table.headers[j].clone()).collect();
            record.extend(header.iter().cloned());
            w.write_record(&record)?;
            for (i, row) in x.rows().into_iter().enumerate() {
                record.clear();
                let src = &input.table.records[i];
                record.extend(keep.iter().map(|&j| src.get(j).cloned().unwrap_or_default()));
                record.extend(row.iter().map(f64::to_string));
                w.write_record(&record)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_csv_lines<'a>(cfg: &RunConfig, header: &str, rows: impl Iterator<Item = String> + 'a) -> CliResult<()> {
    let mut out = open_output(cfg)?;
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

fn require_gamma_poisson(cfg: &RunConfig, command: &str) -> CliResult<()> {
    if cfg.encoder != EncoderKind::GammaPoisson {
        return Err(CliError::config(format!(
            "{command} needs --encoder gamma-poisson (got {})",
            cfg.encoder
        )));
    }
    Ok(())
}

fn fit_model(cfg: &RunConfig, column: &[String]) -> CliResult<GammaPoissonModel<f64>> {
    let model = GammaPoissonModel::fit(column, cfg.gamma_poisson.clone())?;
    if model.not_converged() {
        let fit = model.metadata().fit.clone().unwrap_or_default();
        warn(format_args!(
            "fit stopped after {} epochs without converging (last topic change {})",
            fit.epochs, fit.last_change
        ));
    }
    let stats = &model.metadata().stats;
    if stats.inner_cap_hits > 0 {
        warn(format_args!(
            "activation solver hit the iteration cap {} times during fit",
            stats.inner_cap_hits
        ));
    }
    Ok(model)
}

fn gp_transform(model: &GammaPoissonModel<f64>, column: &[String]) -> CliResult<Encoded> {
    let (x, stats) = model.transform_with_stats(column)?;
    if stats.empty_rows > 0 {
        warn(format_args!(
            "{} rows share no n-gram with the vocabulary and were set to the prior mode",
            stats.empty_rows
        ));
    }
    if stats.inner_cap_hits > 0 {
        warn(format_args!(
            "activation solver hit the iteration cap on {} rows",
            stats.inner_cap_hits
        ));
    }
    Ok(x)
}

fn gp_header(model: &GammaPoissonModel<f64>) -> Vec<String> {
    matrix_io::column_names(EncoderKind::GammaPoisson.column_prefix(), model.dim())
}

pub fn fit(cfg: &RunConfig) -> CliResult<()> {
    require_gamma_poisson(cfg, "fit")?;
    let dir = cfg.require_model()?;
    let input = read_input(cfg)?;
    let model = fit_model(cfg, &input.column)?;
    model.save(dir)?;
    let trace = model.metadata().fit.clone().unwrap_or_default().trace_csv();
    std::fs::write(dir.join(TRACE_FILE), trace)?;
    Ok(())
}

pub fn transform(cfg: &RunConfig) -> CliResult<()> {
    let model = GammaPoissonModel::<f64>::load(cfg.require_model()?)?;
    let input = read_input(cfg)?;
    let x = gp_transform(&model, &input.column)?;
    emit_matrix(cfg, &x, &gp_header(&model), &input)
}

pub fn encode(cfg: &RunConfig) -> CliResult<()> {
    let input = read_input(cfg)?;
    if cfg.encoder == EncoderKind::GammaPoisson {
        let model = fit_model(cfg, &input.column)?;
        let x = gp_transform(&model, &input.column)?;
        return emit_matrix(cfg, &x, &gp_header(&model), &input);
    }
    let mut encoder = cfg.encoder_spec().build()?;
    let x = encoder.fit_transform(&input.column)?;
    let header = encoder.feature_names(1)?;
    emit_matrix(cfg, &x, &header, &input)
}

pub fn simulate(cfg: &RunConfig) -> CliResult<()> {
    let rows = evaluation::generate(&cfg.simulate)?;
    let mut out = open_output(cfg)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["category"])?;
    for r in &rows {
        w.write_record([r])?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

pub fn recover(cfg: &RunConfig) -> CliResult<()> {
    let input = read_input(cfg)?;
    let mut encoder = cfg.encoder_spec().build()?;
    encoder.fit(&input.column)?;
    let report = evaluation::recover_nmi(encoder.as_ref(), &cfg.labels)?;
    write_csv_lines(cfg, RecoveryReport::CSV_HEADER, std::iter::once(report.csv_row()))
}

pub fn inclusion_bench(cfg: &RunConfig) -> CliResult<()> {
    if cfg.probes.is_empty() {
        return Err(CliError::config("inclusion-bench needs --probes"));
    }
    let input = read_input(cfg)?;
    let probes: Vec<String> = cfg.probes.iter().map(|p| stringcat_core::textprep::normalize(p)).collect();
    eprintln!("note: ratio convention {}", cfg.fpr.convention.as_str());
    let rows = evaluation::fpr_experiment(&input.column, &probes, &cfg.epsilons, &cfg.fpr)?;
    write_csv_lines(cfg, FprRow::CSV_HEADER, rows.iter().map(FprRow::csv_row))
}

pub fn topics(cfg: &RunConfig) -> CliResult<()> {
    let model = match &cfg.model {
        Some(dir) => GammaPoissonModel::<f64>::load(dir)?,
        None => {
            require_gamma_poisson(cfg, "topics without --model")?;
            fit_model(cfg, &read_input(cfg)?.column)?
        }
    };
    let names = GammaPoissonEncoder::from_model(model).feature_names(cfg.top_k)?;
    let mut out = open_output(cfg)?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["dimension", "label"])?;
    for (i, label) in names.iter().enumerate() {
        w.write_record([i.to_string().as_str(), label])?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}
