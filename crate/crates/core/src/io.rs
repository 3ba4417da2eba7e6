//! File formats: sparse raster text and dense weight CSV.
//!
//! Raster format: a header line `N T`, then one line per neuron holding its
//! space-separated ascending spike timesteps (an empty line for a silent
//! neuron). Weight format: a header line with one `E`/`I` class token per
//! presynaptic column, then `N` CSV rows of weights in volts. Floats are
//! written in Rust's shortest round-trip form, so read(write(x)) is
//! bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::Raster;
use crate::weights::{NeuronClass, WeightMatrix};

pub fn write_raster(path: &Path, raster: &Raster) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(out, "{} {}", raster.n_neurons(), raster.n_steps())?;
        for i in 0..raster.n_neurons() {
            let times = raster.spike_times(i);
            let mut first = true;
            for t in times {
                if first {
                    write!(out, "{t}")?;
                    first = false;
                } else {
                    write!(out, " {t}")?;
                }
            }
            writeln!(out)?;
        }
        out.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

pub fn read_raster(path: &Path) -> Result<Raster> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.display().to_string(),
        line: line + 1,
        reason,
    };

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty file".into()))
        .and_then(|(n, l)| l.map(|l| (n, l)).map_err(|e| Error::io(path, e)))?;
    let mut toks = header.split_whitespace();
    let n_neurons: usize = toks
        .next()
        .ok_or_else(|| parse_err(line_no, "missing neuron count".into()))?
        .parse()
        .map_err(|e| parse_err(line_no, format!("bad neuron count: {e}")))?;
    let n_steps: usize = toks
        .next()
        .ok_or_else(|| parse_err(line_no, "missing step count".into()))?
        .parse()
        .map_err(|e| parse_err(line_no, format!("bad step count: {e}")))?;
    if toks.next().is_some() {
        return Err(parse_err(line_no, "trailing tokens in header".into()));
    }

    let mut raster = Raster::zeros(n_neurons, n_steps)
        .map_err(|e| parse_err(line_no, e.to_string()))?;
    for neuron in 0..n_neurons {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(neuron + 1, format!("truncated: expected {n_neurons} neuron lines")))
            .and_then(|(n, l)| l.map(|l| (n, l)).map_err(|e| Error::io(path, e)))?;
        let mut prev: Option<usize> = None;
        for tok in line.split_whitespace() {
            let t: usize = tok
                .parse()
                .map_err(|e| parse_err(line_no, format!("bad timestep {tok:?}: {e}")))?;
            if t >= n_steps {
                return Err(parse_err(line_no, format!("timestep {t} >= {n_steps}")));
            }
            if let Some(p) = prev {
                if t <= p {
                    return Err(parse_err(line_no, format!("timesteps not increasing at {t}")));
                }
            }
            prev = Some(t);
            raster.set_spike(neuron, t);
        }
    }
    Ok(raster)
}

pub fn write_weights(path: &Path, weights: &WeightMatrix) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        let header: Vec<&str> = weights
            .classes()
            .iter()
            .map(|c| match c {
                NeuronClass::Excitatory => "E",
                NeuronClass::Inhibitory => "I",
            })
            .collect();
        writeln!(out, "{}", header.join(","))?;
        let n = weights.n_neurons();
        for post in 0..n {
            let row: Vec<String> = weights.row(post).iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

pub fn read_weights(path: &Path) -> Result<WeightMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.display().to_string(),
        line: line + 1,
        reason,
    };

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty file".into()))
        .and_then(|(n, l)| l.map(|l| (n, l)).map_err(|e| Error::io(path, e)))?;
    let classes: Vec<NeuronClass> = header
        .split(',')
        .enumerate()
        .map(|(col, tok)| match tok.trim() {
            "E" => Ok(NeuronClass::Excitatory),
            "I" => Ok(NeuronClass::Inhibitory),
            other => Err(parse_err(line_no, format!("bad class {other:?} in column {col}"))),
        })
        .collect::<Result<_>>()?;
    let n = classes.len();

    let mut w = Vec::with_capacity(n * n);
    for post in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(post + 1, format!("truncated: expected {n} weight rows")))
            .and_then(|(ln, l)| l.map(|l| (ln, l)).map_err(|e| Error::io(path, e)))?;
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(line_no, format!("bad weight {tok:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(parse_err(line_no, format!("expected {n} columns, found {}", row.len())));
        }
        w.extend_from_slice(&row);
    }
    WeightMatrix::from_parts(n, w, classes)
        .map_err(|e| parse_err(0, e.to_string()))
}
