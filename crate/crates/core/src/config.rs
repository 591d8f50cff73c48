use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunable constants of the matching strategies and the assignment step.
///
/// Defaults keep the score bands disjoint: location in `[0.5, 1.0]`,
/// snippet at `0.9`, hash in `[0.4, 0.5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    /// Lines of context on each side of a warning for hash fingerprints.
    pub context_window: u32,
    /// Lines per shingle.
    pub shingle_size: usize,
    /// Minimum Jaccard similarity for a hash candidate.
    pub hash_threshold: f64,
    /// Hash candidate score is `hash_weight * jaccard`.
    pub hash_weight: f64,
    /// Location score is `location_floor + (1 - location_floor) * overlap`.
    pub location_floor: f64,
    pub snippet_score: f64,
    /// Assignment pairs scoring below this are discarded.
    pub min_score: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            context_window: 3,
            shingle_size: 3,
            hash_threshold: 0.8,
            hash_weight: 0.5,
            location_floor: 0.5,
            snippet_score: 0.9,
            min_score: 0.5,
        }
    }
}

impl MatchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: MatchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        unit("hash_threshold", self.hash_threshold)?;
        unit("hash_weight", self.hash_weight)?;
        unit("location_floor", self.location_floor)?;
        unit("snippet_score", self.snippet_score)?;
        unit("min_score", self.min_score)?;
        if self.shingle_size == 0 {
            return Err(Error::Config("shingle_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override() {
        let cfg = MatchConfig::from_toml("min_score = 0.7\ncontext_window = 5\n").unwrap();
        assert_eq!(cfg.min_score, 0.7);
        assert_eq!(cfg.context_window, 5);
        assert_eq!(cfg.shingle_size, 3);
    }

    #[test]
    fn rejects_out_of_range_and_unknown_keys() {
        assert!(MatchConfig::from_toml("min_score = 1.5").is_err());
        assert!(MatchConfig::from_toml("shingle_size = 0").is_err());
        assert!(MatchConfig::from_toml("bogus = 1").is_err());
    }
}
