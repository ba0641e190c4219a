//! Instance directories: `instance.json` plus plain-text data files.
//!
//! | file | content |
//! |------|---------|
//! | `phi.txt`, `b.txt` | least-squares design and observations |
//! | `mask.txt` | `p n m_obs` header, then `row col value` (1-based) |
//! | `features.txt`, `labels.txt` | logistic data |
//! | `truth.txt`, `noise.txt` | planted signal and noise, when known |

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Descriptor, ProblemInstance};
use crate::error::{Error, Result};
use crate::models::{Signal, StructureModel};
use crate::numerics::text::{read_matrix, read_vector, write_matrix, write_vector};
use crate::objectives::{AnyObjective, LeastSquares, LogisticL2, MaskedLeastSquares, Objective};
use crate::scalar::Scalar;

/// [`StructureModel`] as stored on disk, with 1-based group indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FileModel {
    Sparse { n: usize, k: usize },
    Block { groups: Vec<Vec<usize>>, k: usize },
    LowRank { rows: usize, cols: usize, r: usize },
}

impl From<&StructureModel> for FileModel {
    fn from(m: &StructureModel) -> Self {
        match m {
            StructureModel::Sparse { n, k } => Self::Sparse { n: *n, k: *k },
            StructureModel::Block { groups, k } => Self::Block {
                groups: groups
                    .iter()
                    .map(|g| g.iter().map(|i| i + 1).collect())
                    .collect(),
                k: *k,
            },
            StructureModel::LowRank { rows, cols, r } => Self::LowRank {
                rows: *rows,
                cols: *cols,
                r: *r,
            },
        }
    }
}

impl FileModel {
    pub fn to_model(&self) -> Result<StructureModel> {
        match self {
            Self::Sparse { n, k } => StructureModel::sparse(*n, *k),
            Self::Block { groups, k } => {
                let groups = groups
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|&i| {
                                i.checked_sub(1).ok_or_else(|| {
                                    Error::Parse("group indices are 1-based".into())
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                StructureModel::block(groups, *k)
            }
            Self::LowRank { rows, cols, r } => StructureModel::low_rank(*rows, *cols, *r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ObjectiveKind {
    LeastSquares,
    MaskedLeastSquares,
    Logistic,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    objective: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    model: FileModel,
    descriptor: Descriptor,
    has_truth: bool,
    has_noise: bool,
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

fn read_file(dir: &Path, name: &str) -> Result<String> {
    fs::read_to_string(dir.join(name)).map_err(|e| Error::Io(format!("{name}: {e}")))
}

fn write_mask<T: Scalar>(m: &MaskedLeastSquares<T>) -> String {
    let (p, n) = m.dims();
    let mut out = format!("{p} {n} {}\n", m.positions().len());
    for (&(i, j), v) in m.positions().iter().zip(m.values().iter()) {
        writeln!(out, "{} {} {v}", i + 1, j + 1).expect("write to string");
    }
    out
}

fn read_mask<T: Scalar>(text: &str) -> Result<MaskedLeastSquares<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty mask file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad mask header {header:?}"))))
        .collect::<Result<_>>()?;
    let [p, n, count] = dims[..] else {
        return Err(Error::Parse(format!("mask header must be `p n m_obs`, got {header:?}")));
    };
    let mut obs = Vec::with_capacity(count);
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [i, j, v] = toks[..] else {
            return Err(Error::Parse(format!("mask line must be `row col value`, got {line:?}")));
        };
        let idx = |t: &str| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(x) if x >= 1 => Ok(x - 1),
                _ => Err(Error::Parse(format!("bad 1-based index {t:?}"))),
            }
        };
        let v = v
            .parse::<T>()
            .map_err(|_| Error::Parse(format!("cannot parse {v:?} as a number")))?;
        obs.push((idx(i)?, idx(j)?, v));
    }
    if obs.len() != count {
        return Err(Error::Parse(format!("mask header says {count} entries, found {}", obs.len())));
    }
    MaskedLeastSquares::new(p, n, obs)
}

fn write_signal<T: Scalar>(x: &Signal<T>) -> String {
    match x {
        Signal::Vector(v) => write_vector(v),
        Signal::Matrix(m) => write_matrix(m),
    }
}

fn read_signal<T: Scalar>(text: &str, model: &StructureModel) -> Result<Signal<T>> {
    let x = match model {
        StructureModel::LowRank { .. } => Signal::Matrix(read_matrix(text)?),
        _ => Signal::Vector(read_vector(text)?),
    };
    model.check_shape(&x)?;
    Ok(x)
}

/// Writes `instance` into `dir`, creating it if needed.
pub fn save_instance<T: Scalar>(instance: &ProblemInstance<T>, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (kind, lambda) = match &instance.objective {
        AnyObjective::LeastSquares(ls) => {
            write_file(dir, "phi.txt", &write_matrix(ls.phi()))?;
            write_file(dir, "b.txt", &write_vector(ls.b()))?;
            (ObjectiveKind::LeastSquares, None)
        }
        AnyObjective::MaskedLeastSquares(m) => {
            write_file(dir, "mask.txt", &write_mask(m))?;
            (ObjectiveKind::MaskedLeastSquares, None)
        }
        AnyObjective::Logistic(lg) => {
            write_file(dir, "features.txt", &write_matrix(lg.features()))?;
            write_file(dir, "labels.txt", &write_vector(lg.labels()))?;
            (ObjectiveKind::Logistic, lg.lambda().to_f64())
        }
    };
    if let Some(t) = &instance.truth {
        write_file(dir, "truth.txt", &write_signal(t))?;
    }
    if let Some(e) = &instance.noise {
        write_file(dir, "noise.txt", &write_vector(e))?;
    }
    let manifest = Manifest {
        objective: kind,
        lambda,
        model: FileModel::from(&instance.model),
        descriptor: instance.descriptor.clone(),
        has_truth: instance.truth.is_some(),
        has_noise: instance.noise.is_some(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    write_file(dir, "instance.json", &json)
}

pub fn load_instance<T: Scalar>(dir: &Path) -> Result<ProblemInstance<T>> {
    let manifest: Manifest = serde_json::from_str(&read_file(dir, "instance.json")?)
        .map_err(|e| Error::Parse(format!("instance.json: {e}")))?;
    let model = manifest.model.to_model()?;
    let objective = match manifest.objective {
        ObjectiveKind::LeastSquares => AnyObjective::LeastSquares(LeastSquares::new(
            read_matrix(&read_file(dir, "phi.txt")?)?,
            read_vector(&read_file(dir, "b.txt")?)?,
        )?),
        ObjectiveKind::MaskedLeastSquares => {
            AnyObjective::MaskedLeastSquares(read_mask(&read_file(dir, "mask.txt")?)?)
        }
        ObjectiveKind::Logistic => AnyObjective::Logistic(LogisticL2::new(
            read_matrix(&read_file(dir, "features.txt")?)?,
            read_vector(&read_file(dir, "labels.txt")?)?,
            T::lit(manifest.lambda.unwrap_or(0.0)),
        )?),
    };
    if objective.shape() != model.shape() {
        return Err(Error::Dimension(format!(
            "objective variable {:?} but model {:?}",
            objective.shape(),
            model.shape()
        )));
    }
    let truth = if manifest.has_truth {
        Some(read_signal(&read_file(dir, "truth.txt")?, &model)?)
    } else {
        None
    };
    let noise = if manifest.has_noise {
        Some(read_vector(&read_file(dir, "noise.txt")?)?)
    } else {
        None
    };
    Ok(ProblemInstance {
        objective,
        model,
        truth,
        noise,
        seed: manifest.descriptor.seed,
        descriptor: manifest.descriptor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DenseMatrix, DenseVector};
    use crate::problems::{gen_ar1, gen_iid_gaussian, gen_matrix_completion, Ar1Params};

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("acciht-io-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn round_trips() {
        let (ar, _) = gen_ar1::<f64>(&Ar1Params { n: 30, m_total: 40, k: 3, ..Ar1Params::default() }).unwrap();
        let cases = [
            gen_iid_gaussian::<f64>(12, 7, 3, 0.3, 5).unwrap(),
            ar,
            gen_matrix_completion::<f64>(6, 5, 2, 0.6, 1).unwrap(),
        ];
        for (i, inst) in cases.iter().enumerate() {
            let d = tmpdir(&format!("rt{i}"));
            save_instance(inst, &d).unwrap();
            assert_eq!(&load_instance::<f64>(&d).unwrap(), inst);
            fs::remove_dir_all(&d).unwrap();
        }
    }

    #[test]
    fn block_and_logistic_round_trip() {
        let model = StructureModel::contiguous_blocks(2, 2, 1).unwrap();
        let inst = ProblemInstance {
            objective: AnyObjective::Logistic(
                LogisticL2::new(
                    DenseMatrix::from_rows(&[vec![1.0, 0.5, -1.0, 2.0], vec![0.0, 1.0, 1.0, -0.25]])
                        .unwrap(),
                    DenseVector::from(vec![1.0, -1.0]),
                    0.5,
                )
                .unwrap(),
            ),
            model,
            truth: None,
            noise: None,
            seed: 0,
            descriptor: Descriptor {
                generator: "manual".into(),
                params: serde_json::Value::Null,
                seed: 0,
            },
        };
        let d = tmpdir("logit");
        save_instance(&inst, &d).unwrap();
        let text = read_file(&d, "instance.json").unwrap();
        assert!(text.contains("\"groups\": [\n      [\n        1,"));
        assert_eq!(load_instance::<f64>(&d).unwrap(), inst);
        fs::remove_dir_all(&d).unwrap();
    }

    #[test]
    fn mask_format() {
        let m = MaskedLeastSquares::new(3, 4, vec![(0, 1, 2.5), (2, 3, -1.0)]).unwrap();
        assert_eq!(write_mask(&m), "3 4 2\n1 2 2.5\n3 4 -1\n");
        assert_eq!(read_mask::<f64>(&write_mask(&m)).unwrap(), m);
        assert!(read_mask::<f64>("3 4 1\n0 1 2\n").is_err());
        assert!(read_mask::<f64>("3 4 2\n1 1 2\n").is_err());
        assert!(FileModel::Block { groups: vec![vec![0]], k: 1 }.to_model().is_err());
    }

    #[test]
    fn missing_files_are_reported() {
        let d = tmpdir("missing");
        fs::create_dir_all(&d).unwrap();
        assert!(matches!(load_instance::<f64>(&d), Err(Error::Io(_))));
        fs::remove_dir_all(&d).unwrap();
    }
}
