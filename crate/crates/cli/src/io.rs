//! Matrix, factor chain, parameter and trace files.
//!
//! Matrices are CSV (plain rows) or JSON `{"rows", "cols", "entries"}`;
//! chains and parameter vectors are JSON only. Numbers are written in the
//! shortest form that parses back to the same `f64`, so every file
//! round-trips exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sympfact_core::optim::OptimizerTrace;
use sympfact_core::param::ParamVector;
use sympfact_core::symplectic::{DiagonalFactor, Factor, FactorChain, Side, UnitTriangularFactor};
use sympfact_core::Mat;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    /// `.csv` is CSV; anything else is JSON.
    pub fn for_output(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Self::Csv,
            _ => Self::Json,
        }
    }

    /// By extension, falling back to sniffing for a leading `{`.
    fn for_input(path: &Path, text: &str) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Self::Csv,
            Some(e) if e.eq_ignore_ascii_case("json") => Self::Json,
            _ if text.trim_start().starts_with('{') => Self::Json,
            _ => Self::Csv,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDto {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FactorDto {
    Upper { s: Vec<Vec<f64>> },
    Lower { s: Vec<Vec<f64>> },
    Diagonal { p: Vec<Vec<f64>> },
}

/// Index 0 is the rightmost (first applied) factor.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainDto {
    d: usize,
    factors: Vec<FactorDto>,
}

/// Which map a parameter file feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    /// Nine blocks, the whole symplectic group.
    Sp,
    /// Four blocks of `L`, giving `L · Lᵀ`.
    Spp,
    /// Ten reduced-chain blocks plus nine blocks of the conjugator.
    Sps,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDto {
    #[serde(default = "default_kind")]
    kind: ParamKind,
    d: usize,
    blocks: Vec<Vec<f64>>,
}

fn default_kind() -> ParamKind {
    ParamKind::Sp
}

/// Any JSON document the CLI writes.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AnyJson {
    Matrix(MatrixDto),
    Chain(ChainDto),
    Params(ParamsDto),
}

/// What a `check` input file describes.
#[derive(Debug)]
pub enum Document {
    Matrix(Mat),
    Chain(FactorChain),
    Params(ParamKind, ParamVector),
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn finite(path: &Path, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::parse(path, format!("non-finite entry {x}")))
    }
}

fn rows_to_mat(path: &Path, rows: usize, cols: usize, entries: Vec<Vec<f64>>) -> Result<Mat> {
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(CliError::parse(
            path,
            format!("entries do not form a {rows}x{cols} matrix"),
        ));
    }
    let data = entries
        .into_iter()
        .flatten()
        .map(|x| finite(path, x))
        .collect::<Result<Vec<_>>>()?;
    Mat::from_vec(rows, cols, data).map_err(|e| CliError::parse(path, e))
}

fn mat_to_rows(m: &Mat) -> Vec<Vec<f64>> {
    m.as_slice()
        .chunks(m.cols().max(1))
        .take(m.rows())
        .map(<[f64]>::to_vec)
        .collect()
}

fn square(path: &Path, entries: Vec<Vec<f64>>) -> Result<Mat> {
    let n = entries.len();
    rows_to_mat(path, n, n, entries)
}

fn parse_csv(path: &Path, text: &str) -> Result<Mat> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::parse(path, e))?;
        let row = record
            .iter()
            .map(|field| {
                let x: f64 = field
                    .parse()
                    .map_err(|_| CliError::parse(path, format!("not a number: {field:?}")))?;
                finite(path, x)
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    if entries.is_empty() {
        return Err(CliError::parse(path, "empty matrix file"));
    }
    let cols = entries[0].len();
    rows_to_mat(path, entries.len(), cols, entries)
}

fn chain_from_dto(path: &Path, dto: ChainDto) -> Result<FactorChain> {
    let d = dto.d;
    let mut chain = FactorChain::new(d);
    for f in dto.factors {
        let factor: Factor = match f {
            FactorDto::Upper { s } => {
                UnitTriangularFactor::new(Side::Upper, square(path, s)?)?.into()
            }
            FactorDto::Lower { s } => {
                UnitTriangularFactor::new(Side::Lower, square(path, s)?)?.into()
            }
            FactorDto::Diagonal { p } => DiagonalFactor::new(square(path, p)?)?.into(),
        };
        chain.push(factor)?;
    }
    Ok(chain)
}

fn params_from_dto(path: &Path, dto: ParamsDto) -> Result<(ParamKind, ParamVector)> {
    for x in dto.blocks.iter().flatten() {
        finite(path, *x)?;
    }
    Ok((dto.kind, ParamVector::new(dto.d, dto.blocks)?))
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    let text = read_text(path)?;
    match MatrixFormat::for_input(path, &text) {
        MatrixFormat::Csv => parse_csv(path, &text),
        MatrixFormat::Json => {
            let dto: MatrixDto =
                serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
            rows_to_mat(path, dto.rows, dto.cols, dto.entries)
        }
    }
}

/// A matrix, chain or parameter file, told apart by shape.
pub fn read_document(path: &Path) -> Result<Document> {
    let text = read_text(path)?;
    if MatrixFormat::for_input(path, &text) == MatrixFormat::Csv {
        return Ok(Document::Matrix(parse_csv(path, &text)?));
    }
    let any: AnyJson = serde_json::from_str(&text)
        .map_err(|_| CliError::parse(path, "not a matrix, factor chain or parameter file"))?;
    Ok(match any {
        AnyJson::Matrix(m) => Document::Matrix(rows_to_mat(path, m.rows, m.cols, m.entries)?),
        AnyJson::Chain(c) => Document::Chain(chain_from_dto(path, c)?),
        AnyJson::Params(p) => {
            let (kind, p) = params_from_dto(path, p)?;
            Document::Params(kind, p)
        }
    })
}

pub fn write_matrix(path: &Path, m: &Mat) -> Result<()> {
    match MatrixFormat::for_output(path) {
        MatrixFormat::Csv => {
            let mut out = String::new();
            for row in mat_to_rows(m) {
                let fields: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            write_text(path, &out)
        }
        MatrixFormat::Json => write_json(
            path,
            &MatrixDto {
                rows: m.rows(),
                cols: m.cols(),
                entries: mat_to_rows(m),
            },
        ),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_chain(path: &Path, chain: &FactorChain) -> Result<()> {
    let factors = chain
        .factors()
        .iter()
        .map(|f| match f {
            Factor::Unit(u) => match u.side() {
                Side::Upper => FactorDto::Upper {
                    s: mat_to_rows(u.s()),
                },
                Side::Lower => FactorDto::Lower {
                    s: mat_to_rows(u.s()),
                },
            },
            Factor::Diagonal(p) => FactorDto::Diagonal {
                p: mat_to_rows(p.p()),
            },
        })
        .collect();
    write_json(
        path,
        &ChainDto {
            d: chain.half_dim(),
            factors,
        },
    )
}

pub fn write_params(path: &Path, kind: ParamKind, p: &ParamVector) -> Result<()> {
    write_json(
        path,
        &ParamsDto {
            kind,
            d: p.d,
            blocks: p.blocks.clone(),
        },
    )
}

#[derive(Debug, Serialize)]
struct TraceRow {
    iteration: usize,
    objective: f64,
    grad_norm: f64,
    residual: f64,
}

pub fn write_trace(path: &Path, trace: &OptimizerTrace) -> Result<()> {
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io {
            path: PathBuf::from(path),
            source,
        },
        other => CliError::parse(path, format!("{other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for (iteration, e) in trace.iterates.iter().enumerate() {
        w.serialize(TraceRow {
            iteration,
            objective: e.objective,
            grad_norm: e.grad_norm,
            residual: e.residual,
        })
        .map_err(io_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    fn awkward() -> Mat {
        Mat::from_rows(&[[0.1, -1e-300, 1.0 / 3.0], [1e300, -0.0, 2f64.sqrt()]]).unwrap()
    }

    #[test]
    fn matrix_round_trips_exactly() {
        for name in ["m.csv", "m.json", "m.txt"] {
            let (_dir, path) = tmp(name);
            write_matrix(&path, &awkward()).unwrap();
            let back = read_matrix(&path).unwrap();
            assert_eq!(back.shape(), (2, 3));
            for (a, b) in back.as_slice().iter().zip(awkward().as_slice()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn csv_rejects_ragged_and_garbage() {
        let (_dir, path) = tmp("m.csv");
        fs::write(&path, "1,2\n3\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(CliError::Parse { .. })));
        fs::write(&path, "1,x\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(CliError::Parse { .. })));
        fs::write(&path, "1,NaN\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(CliError::Parse { .. })));
        fs::write(&path, "# comment\n 1 , 2 \n").unwrap();
        assert_eq!(
            read_matrix(&path).unwrap(),
            Mat::from_rows(&[[1.0, 2.0]]).unwrap()
        );
    }

    #[test]
    fn json_shape_must_match() {
        let (_dir, path) = tmp("m.json");
        fs::write(&path, r#"{"rows": 2, "cols": 1, "entries": [[1.0]]}"#).unwrap();
        assert!(matches!(read_matrix(&path), Err(CliError::Parse { .. })));
    }

    #[test]
    fn chain_and_params_round_trip() {
        let chain = FactorChain::from_factors(
            1,
            vec![
                Factor::upper(Mat::from_rows(&[[0.1]]).unwrap()).unwrap(),
                Factor::diagonal(Mat::from_rows(&[[-3.0]]).unwrap()).unwrap(),
                Factor::lower(Mat::from_rows(&[[1.0 / 3.0]]).unwrap()).unwrap(),
            ],
        )
        .unwrap();
        let (_dir, path) = tmp("c.json");
        write_chain(&path, &chain).unwrap();
        assert!(matches!(read_document(&path).unwrap(), Document::Chain(c) if c == chain));

        let p = ParamVector::new(2, vec![vec![0.1, 0.2, 1e-17]; 4]).unwrap();
        let (_dir2, path) = tmp("p.json");
        write_params(&path, ParamKind::Spp, &p).unwrap();
        assert!(
            matches!(read_document(&path).unwrap(), Document::Params(ParamKind::Spp, q) if q == p)
        );
    }
}
