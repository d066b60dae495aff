//! Group files and data-path resolution.
//!
//! A group file is JSON: a backend tag, a degree (permutation points or
//! matrix dimension), and a generator list. Permutation generators are
//! arrays of 0-based images; matrix generators are arrays of lowercase hex
//! row words with bit j of row i holding entry (i, j).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blackbox::{BlackboxError, GroupElement};
use crate::gf2::BitMatrix;
use crate::perm::Permutation;

/// Environment variable naming the fallback data directory.
pub const DATA_ENV: &str = "GROUPSLEUTH_DATA";

#[derive(Debug, Error)]
pub enum FilesError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("unknown backend `{0}` (expected `perm` or `gf2`)")]
    BadBackend(String),
    #[error("generator {index}: {msg}")]
    BadGenerator { index: usize, msg: String },
    #[error("file has no generators")]
    NoGenerators,
    #[error(transparent)]
    Element(#[from] BlackboxError),
    #[error("file {name} not found directly or under ${DATA_ENV}")]
    NotFound { name: String },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawGenerator {
    Perm(Vec<u16>),
    Mat(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    backend: String,
    degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    generators: Vec<RawGenerator>,
}

/// Resolve a data file: an existing path wins; otherwise the name is tried
/// under the directory named by `GROUPSLEUTH_DATA`.
pub fn resolve_data_path(name: &str) -> Result<PathBuf, FilesError> {
    let direct = PathBuf::from(name);
    if direct.exists() {
        return Ok(direct);
    }
    if let Ok(root) = std::env::var(DATA_ENV) {
        let joined = Path::new(&root).join(name);
        if joined.exists() {
            return Ok(joined);
        }
    }
    Err(FilesError::NotFound { name: name.into() })
}

fn read_to_string(path: &Path) -> Result<String, FilesError> {
    std::fs::read_to_string(path).map_err(|source| FilesError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load and validate a generator list.
pub fn load_group(path: &Path) -> Result<Vec<GroupElement>, FilesError> {
    let text = read_to_string(path)?;
    let file: GroupFile = serde_json::from_str(&text).map_err(|source| FilesError::Json {
        path: path.display().to_string(),
        source,
    })?;
    parse_group_file(&file)
}

/// Load a named group, resolving through the data directory if needed.
pub fn load_group_by_name(name: &str) -> Result<Vec<GroupElement>, FilesError> {
    load_group(&resolve_data_path(name)?)
}

fn parse_group_file(file: &GroupFile) -> Result<Vec<GroupElement>, FilesError> {
    if file.generators.is_empty() {
        return Err(FilesError::NoGenerators);
    }
    let mut out = Vec::with_capacity(file.generators.len());
    for (index, raw) in file.generators.iter().enumerate() {
        let bad = |msg: String| FilesError::BadGenerator { index, msg };
        let elt = match (file.backend.as_str(), raw) {
            ("perm", RawGenerator::Perm(images)) => {
                if images.len() != file.degree {
                    return Err(bad(format!(
                        "has {} images, degree says {}",
                        images.len(),
                        file.degree
                    )));
                }
                GroupElement::Perm(
                    Permutation::from_images(images.clone()).map_err(|e| bad(e.to_string()))?,
                )
            }
            ("gf2", RawGenerator::Mat(rows)) => {
                if rows.len() != file.degree {
                    return Err(bad(format!(
                        "has {} rows, dimension says {}",
                        rows.len(),
                        file.degree
                    )));
                }
                let mut words = Vec::with_capacity(rows.len());
                for r in rows {
                    words.push(
                        u64::from_str_radix(r, 16)
                            .map_err(|_| bad(format!("bad hex row `{r}`")))?,
                    );
                }
                GroupElement::Mat(
                    BitMatrix::from_rows(file.degree, words).map_err(|e| bad(e.to_string()))?,
                )
            }
            ("perm", RawGenerator::Mat(_)) => {
                return Err(bad("permutation backend expects arrays of images".into()))
            }
            ("gf2", RawGenerator::Perm(_)) => {
                return Err(bad("gf2 backend expects arrays of hex row strings".into()))
            }
            (other, _) => return Err(FilesError::BadBackend(other.to_string())),
        };
        out.push(elt);
    }
    // Mixed degrees cannot happen (checked above); mixed backends cannot
    // happen (single tag). A final consistency pass is still cheap.
    for g in &out[1..] {
        if g.backend_name() != out[0].backend_name() || g.size() != out[0].size() {
            return Err(FilesError::NoGenerators);
        }
    }
    Ok(out)
}

/// Write a generator list in the format `load_group` reads.
pub fn save_group(
    path: &Path,
    name: Option<&str>,
    gens: &[GroupElement],
) -> Result<(), FilesError> {
    let first = gens.first().ok_or(FilesError::NoGenerators)?;
    let file = GroupFile {
        backend: first.backend_name().into(),
        degree: first.size(),
        name: name.map(|s| s.to_string()),
        generators: gens
            .iter()
            .map(|g| match g {
                GroupElement::Perm(p) => RawGenerator::Perm(p.images().to_vec()),
                GroupElement::Mat(m) => RawGenerator::Mat(
                    m.rows().iter().map(|w| format!("{w:x}")).collect(),
                ),
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&file).expect("group files always serialize");
    std::fs::write(path, text).map_err(|source| FilesError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_group_round_trip() {
        let dir = std::env::temp_dir().join("groupfile-test-perm");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.json");
        let gens = vec![
            GroupElement::Perm(Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]).unwrap()),
            GroupElement::Perm(Permutation::from_cycles(5, &[&[0, 2, 4]]).unwrap()),
        ];
        save_group(&path, Some("alt5"), &gens).unwrap();
        let back = load_group(&path).unwrap();
        assert_eq!(back, gens);
    }

    #[test]
    fn gf2_group_round_trip() {
        let dir = std::env::temp_dir().join("groupfile-test-gf2");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.json");
        let mut c = BitMatrix::zero(3).unwrap();
        c.set_entry(1, 0, true);
        c.set_entry(2, 1, true);
        c.set_entry(0, 2, true);
        c.set_entry(1, 2, true);
        let gens = vec![GroupElement::Mat(c)];
        save_group(&path, None, &gens).unwrap();
        let back = load_group(&path).unwrap();
        assert_eq!(back, gens);
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = std::env::temp_dir().join("groupfile-test-bad");
        std::fs::create_dir_all(&dir).unwrap();

        let truncated = dir.join("t.json");
        std::fs::write(&truncated, "{\"backend\": \"perm\", \"degree\":").unwrap();
        assert!(matches!(load_group(&truncated), Err(FilesError::Json { .. })));

        let badback = dir.join("b.json");
        std::fs::write(
            &badback,
            "{\"backend\": \"quaternionic\", \"degree\": 2, \"generators\": [[1,0]]}",
        )
        .unwrap();
        assert!(matches!(load_group(&badback), Err(FilesError::BadBackend(_))));

        let notperm = dir.join("n.json");
        std::fs::write(
            &notperm,
            "{\"backend\": \"perm\", \"degree\": 3, \"generators\": [[0,0,1]]}",
        )
        .unwrap();
        assert!(matches!(
            load_group(&notperm),
            Err(FilesError::BadGenerator { index: 0, .. })
        ));

        let badhex = dir.join("h.json");
        std::fs::write(
            &badhex,
            "{\"backend\": \"gf2\", \"degree\": 2, \"generators\": [[\"1\", \"zz\"]]}",
        )
        .unwrap();
        assert!(matches!(
            load_group(&badhex),
            Err(FilesError::BadGenerator { index: 0, .. })
        ));
    }

    #[test]
    fn data_dir_resolution() {
        let dir = std::env::temp_dir().join("groupfile-test-data");
        std::fs::create_dir_all(&dir).unwrap();
        let inner = dir.join("present.json");
        std::fs::write(&inner, "{}").unwrap();
        // Absolute existing path resolves to itself without the variable.
        let direct = resolve_data_path(inner.to_str().unwrap()).unwrap();
        assert_eq!(direct, inner);
        // Missing names report failure.
        assert!(matches!(
            resolve_data_path("no-such-file-anywhere.json"),
            Err(FilesError::NotFound { .. })
        ));
    }
}
