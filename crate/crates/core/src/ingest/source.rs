use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::model::canonical_path;

pub type Lines = Arc<[String]>;

/// Splits on `\n` and `\r\n`; a lone `\r` is kept as content.
pub fn split_lines(text: &str) -> Vec<String> {
    text.lines().map(str::to_string).collect()
}

enum Backing {
    Disk(PathBuf),
    Memory(HashMap<String, Lines>),
}

/// A checked-out revision. Files are read on first use and cached; each
/// file is filled at most once even under concurrent access.
pub struct SourceTree {
    backing: Backing,
    cache: Mutex<HashMap<String, Arc<OnceLock<Option<Lines>>>>>,
}

impl std::fmt::Debug for SourceTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.backing {
            Backing::Disk(root) => f.debug_tuple("SourceTree").field(root).finish(),
            Backing::Memory(files) => f
                .debug_struct("SourceTree")
                .field("in_memory_files", &files.len())
                .finish(),
        }
    }
}

impl SourceTree {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        SourceTree {
            backing: Backing::Disk(root.into()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// A tree held entirely in memory, keyed by repository-relative path.
    pub fn in_memory<I, P, T>(files: I) -> Self
    where
        I: IntoIterator<Item = (P, T)>,
        P: AsRef<str>,
        T: AsRef<str>,
    {
        let files = files
            .into_iter()
            .map(|(p, t)| {
                (
                    canonical_path(p.as_ref()),
                    Lines::from(split_lines(t.as_ref())),
                )
            })
            .collect();
        SourceTree {
            backing: Backing::Memory(files),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn empty() -> Self {
        Self::in_memory(std::iter::empty::<(&str, &str)>())
    }

    pub fn root(&self) -> Option<&Path> {
        match &self.backing {
            Backing::Disk(root) => Some(root),
            Backing::Memory(_) => None,
        }
    }

    pub fn load(&self, file_path: &str) -> Result<Lines> {
        let key = canonical_path(file_path);
        if let Backing::Memory(files) = &self.backing {
            return files.get(&key).cloned().ok_or(Error::FileMissing(key));
        }
        let cell = {
            let mut cache = self.cache.lock().expect("source cache poisoned");
            cache.entry(key.clone()).or_default().clone()
        };
        cell.get_or_init(|| self.read_disk(&key))
            .clone()
            .ok_or(Error::FileMissing(key))
    }

    pub fn contains(&self, file_path: &str) -> bool {
        self.load(file_path).is_ok()
    }

    fn read_disk(&self, key: &str) -> Option<Lines> {
        let Backing::Disk(root) = &self.backing else {
            return None;
        };
        let bytes = std::fs::read(root.join(key)).ok()?;
        let text = String::from_utf8_lossy(&bytes);
        Some(Lines::from(split_lines(&text)))
    }
}

/// Lines of `file_path` (index 0 is line 1), or `FileMissing`.
pub fn load_source(tree: &SourceTree, file_path: &str) -> Result<Lines> {
    tree.load(file_path)
}
