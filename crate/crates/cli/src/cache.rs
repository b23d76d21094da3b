//! On-disk checkpoints: built groups, normalizers, clique stores and the
//! 4.j pipeline report.  Everything is written to a temporary file first
//! and renamed, so an interrupted run never leaves a half-written entry.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rmlt::catalog::{BuiltCase, CaseId, Catalog};
use rmlt::lingroup::{GroupFile, LinearGroup};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::CliError;

#[derive(Serialize, Deserialize)]
struct CachedCase {
    group: GroupFile,
    g0: GroupFile,
}

pub struct Store {
    dir: PathBuf,
    catalog: Catalog,
}

impl Store {
    pub fn new(dir: PathBuf, assets: Option<PathBuf>) -> Self {
        let catalog = match assets {
            Some(a) => Catalog::with_asset_dir(a),
            None => Catalog::new(),
        };
        Store { dir, catalog }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    fn path(&self, kind: &str, id: CaseId, ext: &str) -> PathBuf {
        self.dir.join(kind).join(format!("{id}.{ext}"))
    }

    pub fn case(&self, id: CaseId) -> Result<BuiltCase, CliError> {
        let path = self.path("groups", id, "json");
        if let Some(c) = read_json::<CachedCase>(&path)? {
            let built = BuiltCase {
                descriptor: id.descriptor(),
                group: Arc::new(c.group.load()?),
                g0: Arc::new(c.g0.load()?),
            };
            self.catalog.insert_built(built)?;
        }
        let built = self.catalog.build(id)?;
        if !path.exists() {
            let c = CachedCase {
                group: built.group.to_file(),
                g0: built.g0.to_file(),
            };
            write_json(&path, &c)?;
        }
        Ok(built)
    }

    pub fn normalizer(&self, id: CaseId) -> Result<Arc<LinearGroup>, CliError> {
        self.case(id)?;
        let path = self.path("normalizers", id, "json");
        if let Some(f) = read_json::<GroupFile>(&path)? {
            self.catalog.insert_normalizer(id, Arc::new(f.load()?))?;
        }
        let n = self.catalog.normalizer(id)?;
        if !path.exists() {
            write_json(&path, &n.to_file())?;
        }
        Ok(n)
    }

    pub fn cliques(&self, id: CaseId) -> PathBuf {
        self.path("cliques", id, "jsonl")
    }

    pub fn pipeline(&self) -> PathBuf {
        self.dir.join("e32_report.json")
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<Option<T>, CliError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(serde_json::from_str(&s)?)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, |tmp| Ok(fs::write(tmp, s)?))
}

/// Runs `write` against a sibling temporary path, then renames it over
/// `path`.
pub fn write_atomic(
    path: &Path,
    write: impl FnOnce(&Path) -> Result<(), CliError>,
) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    write(&tmp)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
