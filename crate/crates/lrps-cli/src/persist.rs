//! Instance directory layout.
//!
//! `generate` writes and `solve` reads a directory holding one instance:
//!
//! - `meta.csv`: `key,value` lines: dimensions, budgets, observation model
//!   and its parameters, seeds, noise norm;
//! - `L_star.bin`, `M_star.bin`: planted ground truth;
//! - `observations.csv`: for mask models, `row,col,value` lines in mask
//!   order; for identity/gaussian models one value per line;
//! - `mask.csv`: `row,col` lines (mask models only).
//!
//! Gaussian operators are reconstructed from `(shape, p, seed)` recorded in
//! the meta file; mask operators from `mask.csv`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lrps_core::derive_seed;
use lrps_ops::{
    read_mask_csv, write_mask_csv, MeasurementOperator, ObservationVector, OperatorTag,
};

use crate::instance::SyntheticInstance;
use crate::io::{read_matrix, write_matrix};
use crate::CliError;

pub fn save_instance(dir: &Path, inst: &SyntheticInstance) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_matrix(&dir.join("L_star.bin"), &inst.low_rank)?;
    write_matrix(&dir.join("M_star.bin"), &inst.sparse)?;

    let (rows, cols) = inst.operator.input_shape();
    let mut meta: Vec<(String, String)> = vec![
        ("rows".into(), rows.to_string()),
        ("cols".into(), cols.to_string()),
        ("seed".into(), inst.seed.to_string()),
        ("noise_norm".into(), format!("{:.17e}", inst.noise_norm)),
        ("p".into(), inst.operator.output_dim().to_string()),
    ];
    match inst.operator.tag() {
        OperatorTag::Identity => meta.push(("model".into(), "identity".into())),
        OperatorTag::Mask => meta.push(("model".into(), "mask".into())),
        OperatorTag::Gaussian => {
            meta.push(("model".into(), "gaussian".into()));
            let seed = inst.operator.gaussian_seed().ok_or_else(|| {
                CliError::argument("explicit-coefficient operators are not serializable")
            })?;
            meta.push(("opseed".into(), seed.to_string()));
        }
    }

    let meta_file = fs::File::create(dir.join("meta.csv")).map_err(|e| CliError::io(dir, e))?;
    let mut out = BufWriter::new(meta_file);
    writeln!(out, "key,value").map_err(|e| CliError::io(dir, e))?;
    for (k, v) in &meta {
        writeln!(out, "{k},{v}").map_err(|e| CliError::io(dir, e))?;
    }

    let obs_file =
        fs::File::create(dir.join("observations.csv")).map_err(|e| CliError::io(dir, e))?;
    let mut out = BufWriter::new(obs_file);
    match inst.operator.omega() {
        Some(omega) => {
            for ((r, c), v) in omega.iter().zip(inst.observations.as_slice()) {
                writeln!(out, "{r},{c},{v:.16e}").map_err(|e| CliError::io(dir, e))?;
            }
        }
        None => {
            for v in inst.observations.as_slice() {
                writeln!(out, "{v:.16e}").map_err(|e| CliError::io(dir, e))?;
            }
        }
    }

    if inst.operator.tag() == OperatorTag::Mask {
        let mask_file = fs::File::create(dir.join("mask.csv")).map_err(|e| CliError::io(dir, e))?;
        let mut out = BufWriter::new(mask_file);
        write_mask_csv(&inst.operator, &mut out)?;
    }
    Ok(())
}

pub fn load_instance(dir: &Path) -> Result<SyntheticInstance, CliError> {
    let meta_path = dir.join("meta.csv");
    let file = fs::File::open(&meta_path).map_err(|e| CliError::io(&meta_path, e))?;
    let mut meta = BTreeMap::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(&meta_path, e))?;
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once(',').ok_or_else(|| {
            CliError::parse(
                &format!("meta.csv line {}", lineno + 1),
                "expected key,value",
            )
        })?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |key: &str| -> Result<&String, CliError> {
        meta.get(key)
            .ok_or_else(|| CliError::parse("meta.csv", &format!("missing key `{key}`")))
    };
    let parse_usize = |key: &str| -> Result<usize, CliError> {
        get(key)?
            .parse()
            .map_err(|e| CliError::parse("meta.csv", &format!("{key}: {e}")))
    };
    let rows = parse_usize("rows")?;
    let cols = parse_usize("cols")?;
    let p = parse_usize("p")?;
    let seed: u64 = get("seed")?
        .parse()
        .map_err(|e| CliError::parse("meta.csv", &format!("seed: {e}")))?;
    let noise_norm: f64 = get("noise_norm")?
        .parse()
        .map_err(|e| CliError::parse("meta.csv", &format!("noise_norm: {e}")))?;

    let model = get("model")?.as_str();
    let (operator, observations) = match model {
        "identity" => {
            let op = MeasurementOperator::identity(rows, cols);
            let values = read_plain_observations(&dir.join("observations.csv"))?;
            (op, values)
        }
        "gaussian" => {
            let opseed: u64 = get("opseed")?
                .parse()
                .map_err(|e| CliError::parse("meta.csv", &format!("opseed: {e}")))?;
            let op = MeasurementOperator::gaussian(rows, cols, p, opseed)?;
            let values = read_plain_observations(&dir.join("observations.csv"))?;
            (op, values)
        }
        "mask" => {
            let mask_path = dir.join("mask.csv");
            let file = fs::File::open(&mask_path).map_err(|e| CliError::io(&mask_path, e))?;
            let op = read_mask_csv::<f64>(rows, cols, &mut BufReader::new(file))?;
            let values = read_mask_observations(&dir.join("observations.csv"), &op)?;
            (op, values)
        }
        other => {
            return Err(CliError::parse(
                "meta.csv",
                &format!("unknown model `{other}`"),
            ))
        }
    };
    if observations.len() != operator.output_dim() {
        return Err(CliError::parse(
            "observations.csv",
            &format!(
                "expected {} observations, found {}",
                operator.output_dim(),
                observations.len()
            ),
        ));
    }

    Ok(SyntheticInstance {
        low_rank: read_matrix(&dir.join("L_star.bin"))?,
        sparse: read_matrix(&dir.join("M_star.bin"))?,
        operator,
        observations,
        noise_norm,
        seed,
    })
}

fn read_plain_observations(path: &Path) -> Result<ObservationVector<f64>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(t.parse::<f64>().map_err(|e| {
            CliError::parse(
                &format!("observations.csv line {}", lineno + 1),
                &e.to_string(),
            )
        })?);
    }
    ObservationVector::new(values).map_err(|e| CliError::parse("observations.csv", &e.to_string()))
}

/// Mask observations are `row,col,value` lines; values must arrive in the
/// operator's sorted mask order.
fn read_mask_observations(
    path: &Path,
    op: &MeasurementOperator<f64>,
) -> Result<ObservationVector<f64>, CliError> {
    let omega = op
        .omega()
        .ok_or_else(|| CliError::argument("operator is not a mask"))?;
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::new();
    for ((lineno, line), (er, ec)) in BufReader::new(file).lines().enumerate().zip(omega.iter()) {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let at = format!("observations.csv line {}", lineno + 1);
        let mut parts = line.trim().split(',');
        let r: usize = parts
            .next()
            .ok_or_else(|| CliError::parse(&at, "missing row"))?
            .trim()
            .parse()
            .map_err(|e: std::num::ParseIntError| CliError::parse(&at, &e.to_string()))?;
        let c: usize = parts
            .next()
            .ok_or_else(|| CliError::parse(&at, "missing col"))?
            .trim()
            .parse()
            .map_err(|e: std::num::ParseIntError| CliError::parse(&at, &e.to_string()))?;
        let v: f64 = parts
            .next()
            .ok_or_else(|| CliError::parse(&at, "missing value"))?
            .trim()
            .parse()
            .map_err(|e: std::num::ParseFloatError| CliError::parse(&at, &e.to_string()))?;
        if (r, c) != (er, ec) {
            return Err(CliError::parse(
                &at,
                &format!("index ({r},{c}) does not match mask order ({er},{ec})"),
            ));
        }
        values.push(v);
    }
    ObservationVector::new(values).map_err(|e| CliError::parse("observations.csv", &e.to_string()))
}

/// Deterministic seed for a (config, rep) cell of a benchmark.
pub fn rep_seed(master: u64, config_idx: usize, rep: usize) -> u64 {
    derive_seed(master, &[config_idx as u64, rep as u64])
}
