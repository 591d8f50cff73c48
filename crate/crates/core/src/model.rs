//! Warning representation shared by every stage of the tracker.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::Hasher;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which revision a warning belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    Pre,
    Post,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Pre => "PRE",
            Side::Post => "POST",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One static-analysis warning: rule, enclosing code element and line range.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WarningInstance {
    pub warning_type: String,
    pub project: String,
    pub class_name: String,
    pub method_name: String,
    pub field_name: String,
    pub file_path: String,
    pub start_line: u32,
    pub end_line: u32,
    pub side: Side,
    pub ordinal: u32,
}

impl WarningInstance {
    /// Builds a warning with ordinal 0, canonicalizing `file_path`.
    pub fn new(
        side: Side,
        warning_type: impl Into<String>,
        file_path: &str,
        start_line: u32,
        end_line: u32,
    ) -> Self {
        WarningInstance {
            warning_type: warning_type.into(),
            project: String::new(),
            class_name: String::new(),
            method_name: String::new(),
            field_name: String::new(),
            file_path: canonical_path(file_path),
            start_line,
            end_line,
            side,
            ordinal: 0,
        }
    }

    pub fn with_project(mut self, project: impl Into<String>) -> Self {
        self.project = project.into();
        self
    }

    pub fn with_class(mut self, class_name: impl Into<String>) -> Self {
        self.class_name = class_name.into();
        self
    }

    pub fn with_method(mut self, method_name: impl Into<String>) -> Self {
        self.method_name = method_name.into();
        self
    }

    pub fn with_field(mut self, field_name: impl Into<String>) -> Self {
        self.field_name = field_name.into();
        self
    }

    pub fn with_ordinal(mut self, ordinal: u32) -> Self {
        self.ordinal = ordinal;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_line < 1 || self.end_line < 1 {
            return Err(Error::SchemaViolation(format!(
                "line numbers must be >= 1 (got {}..{})",
                self.start_line, self.end_line
            )));
        }
        if self.start_line > self.end_line {
            return Err(Error::SchemaViolation(format!(
                "start_line {} > end_line {}",
                self.start_line, self.end_line
            )));
        }
        if self.file_path.is_empty() {
            return Err(Error::SchemaViolation("empty file_path".into()));
        }
        if self.file_path.contains('\\') {
            return Err(Error::SchemaViolation(format!(
                "non-canonical file_path {:?}",
                self.file_path
            )));
        }
        Ok(())
    }

    /// Number of lines covered by the warning.
    pub fn line_count(&self) -> u32 {
        self.end_line - self.start_line + 1
    }

    /// Metadata key used for exact matching: everything except side and ordinal.
    pub(crate) fn metadata_key(&self) -> MetadataKey<'_> {
        MetadataKey {
            warning_type: &self.warning_type,
            class_name: &self.class_name,
            method_name: &self.method_name,
            field_name: &self.field_name,
            file_path: &self.file_path,
            start_line: self.start_line,
            end_line: self.end_line,
        }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        (
            &self.file_path,
            self.start_line,
            self.end_line,
            &self.warning_type,
            self.ordinal,
        )
            .cmp(&(
                &other.file_path,
                other.start_line,
                other.end_line,
                &other.warning_type,
                other.ordinal,
            ))
            .then_with(|| {
                (
                    &self.class_name,
                    &self.method_name,
                    &self.field_name,
                    &self.project,
                )
                    .cmp(&(
                        &other.class_name,
                        &other.method_name,
                        &other.field_name,
                        &other.project,
                    ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct MetadataKey<'a> {
    warning_type: &'a str,
    class_name: &'a str,
    method_name: &'a str,
    field_name: &'a str,
    file_path: &'a str,
    start_line: u32,
    end_line: u32,
}

/// Normalizes separators to '/' and strips any leading "./".
pub fn canonical_path(path: &str) -> String {
    let mut s = path.replace('\\', "/");
    while let Some(rest) = s.strip_prefix("./") {
        s = rest.to_string();
    }
    s
}

/// Stable identifier of a warning.
///
/// The canonical string
/// `side|warning_type|file_path|start_line|end_line|class_name|method_name|field_name|ordinal`
/// is hashed with 64-bit FNV-1a and rendered as 16 lowercase hex digits.
pub fn warning_id(w: &WarningInstance) -> String {
    let canonical = format!(
        "{}|{}|{}|{}|{}|{}|{}|{}|{}",
        w.side,
        w.warning_type,
        w.file_path,
        w.start_line,
        w.end_line,
        w.class_name,
        w.method_name,
        w.field_name,
        w.ordinal
    );
    let mut hasher = fnv::FnvHasher::default();
    hasher.write(canonical.as_bytes());
    format!("{:016x}", hasher.finish())
}

/// Exact-matching predicate. Side and ordinal do not participate.
pub fn metadata_equal(a: &WarningInstance, b: &WarningInstance) -> bool {
    a.metadata_key() == b.metadata_key()
}

/// Warnings of one revision, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WarningSet {
    side: Side,
    warnings: Vec<WarningInstance>,
}

/// Metadata that separates duplicates: type, class, method, field, file and range.
type DuplicateKey = (String, String, String, String, String, u32, u32);

impl WarningSet {
    pub fn empty(side: Side) -> Self {
        WarningSet {
            side,
            warnings: Vec::new(),
        }
    }

    /// Builds a set from warnings in report order.
    ///
    /// Ordinals are (re)assigned in input order among metadata-identical
    /// duplicates, then the set is sorted canonically.
    pub fn from_report_order(side: Side, warnings: Vec<WarningInstance>) -> Result<Self> {
        // project is not part of the id, so it does not separate duplicates
        let mut seen: HashMap<DuplicateKey, u32> = HashMap::new();
        let mut out = Vec::with_capacity(warnings.len());
        for mut w in warnings {
            if w.side != side {
                return Err(Error::SchemaViolation(format!(
                    "warning on side {} added to {} set",
                    w.side, side
                )));
            }
            w.file_path = canonical_path(&w.file_path);
            w.validate()?;
            let key = (
                w.warning_type.clone(),
                w.class_name.clone(),
                w.method_name.clone(),
                w.field_name.clone(),
                w.file_path.clone(),
                w.start_line,
                w.end_line,
            );
            let slot = seen.entry(key).or_insert(0);
            w.ordinal = *slot;
            *slot += 1;
            out.push(w);
        }
        out.sort_by(WarningInstance::canonical_cmp);
        Ok(WarningSet {
            side,
            warnings: out,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn warnings(&self) -> &[WarningInstance] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.warnings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, WarningInstance> {
        self.warnings.iter()
    }

    /// Ids of all members in canonical order. Fails on a digest collision.
    pub fn ids(&self) -> Result<Vec<String>> {
        let ids: Vec<String> = self.warnings.iter().map(warning_id).collect();
        let mut by_id: HashMap<&str, usize> = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if let Some(prev) = by_id.insert(id.as_str(), i) {
                return Err(Error::IdCollision {
                    id: id.clone(),
                    first: format!("{:?}", self.warnings[prev]),
                    second: format!("{:?}", self.warnings[i]),
                });
            }
        }
        Ok(ids)
    }
}

impl<'a> IntoIterator for &'a WarningSet {
    type Item = &'a WarningInstance;
    type IntoIter = std::slice::Iter<'a, WarningInstance>;

    fn into_iter(self) -> Self::IntoIter {
        self.warnings.iter()
    }
}

/// The two revisions being compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitPair {
    pub pre_commit_id: String,
    pub post_commit_id: String,
    pub pre_root: PathBuf,
    pub post_root: PathBuf,
}

impl CommitPair {
    pub fn check_roots(&self) -> Result<()> {
        for root in [&self.pre_root, &self.post_root] {
            if !root.is_dir() {
                return Err(Error::FileMissing(root.display().to_string()));
            }
            std::fs::read_dir(root).map_err(|e| Error::Io {
                path: root.display().to_string(),
                source: e,
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionStatus {
    Persistent,
    Resolved,
    NewlyIntroduced,
}

impl EvolutionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EvolutionStatus::Persistent => "persistent",
            EvolutionStatus::Resolved => "resolved",
            EvolutionStatus::NewlyIntroduced => "newly_introduced",
        }
    }
}

impl std::str::FromStr for EvolutionStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "persistent" => Ok(EvolutionStatus::Persistent),
            "resolved" => Ok(EvolutionStatus::Resolved),
            "newly_introduced" => Ok(EvolutionStatus::NewlyIntroduced),
            other => Err(Error::SchemaViolation(format!("unknown status {other:?}"))),
        }
    }
}

impl fmt::Display for EvolutionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Strategy that produced a match or a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Exact,
    Location,
    Snippet,
    Hash,
    RefactorExact,
    Hungarian,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Exact => "EXACT",
            Strategy::Location => "LOCATION",
            Strategy::Snippet => "SNIPPET",
            Strategy::Hash => "HASH",
            Strategy::RefactorExact => "REFACTOR_EXACT",
            Strategy::Hungarian => "HUNGARIAN",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Approach {
    Soa,
    Improved,
}

impl Approach {
    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Soa => "SOA",
            Approach::Improved => "IMPROVED",
        }
    }
}

impl std::str::FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "soa" => Ok(Approach::Soa),
            "improved" => Ok(Approach::Improved),
            other => Err(Error::Config(format!("unknown approach {other:?}"))),
        }
    }
}

/// One accepted pairing.
///
/// `basis` is the candidate strategy behind a `HUNGARIAN` match (location or
/// snippet); it is `None` for every other strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub pre_id: String,
    pub post_id: String,
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Strategy>,
    pub score: f64,
}

/// One field changed by a refactoring rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldChange {
    pub field: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteLogEntry {
    pub original_id: String,
    pub changes: Vec<FieldChange>,
}

/// Final classification of both warning sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingReport {
    pub approach: Approach,
    #[serde(default)]
    pub pre_commit: String,
    #[serde(default)]
    pub post_commit: String,
    pub matches: Vec<Match>,
    pub resolved: Vec<String>,
    pub newly_introduced: Vec<String>,
    #[serde(default)]
    pub rewrite_log: Vec<RewriteLogEntry>,
}

impl TrackingReport {
    pub fn persistent_count(&self) -> usize {
        self.matches.len()
    }

    /// Status of every id mentioned in the report.
    pub fn statuses(&self) -> HashMap<&str, EvolutionStatus> {
        let mut out = HashMap::with_capacity(
            2 * self.matches.len() + self.resolved.len() + self.newly_introduced.len(),
        );
        for m in &self.matches {
            out.insert(m.pre_id.as_str(), EvolutionStatus::Persistent);
            out.insert(m.post_id.as_str(), EvolutionStatus::Persistent);
        }
        for id in &self.resolved {
            out.insert(id.as_str(), EvolutionStatus::Resolved);
        }
        for id in &self.newly_introduced {
            out.insert(id.as_str(), EvolutionStatus::NewlyIntroduced);
        }
        out
    }

    /// Checks the partition property against the sets the report was built from.
    pub fn check_partition(&self, pre: &WarningSet, post: &WarningSet) -> Result<()> {
        let pre_ids = pre.ids()?;
        let post_ids = post.ids()?;
        let mut seen_pre: HashMap<&str, u32> = pre_ids.iter().map(|id| (id.as_str(), 0)).collect();
        let mut seen_post: HashMap<&str, u32> =
            post_ids.iter().map(|id| (id.as_str(), 0)).collect();
        let bump = |map: &mut HashMap<&str, u32>, id: &str| -> Result<()> {
            match map.get_mut(id) {
                Some(n) => {
                    *n += 1;
                    Ok(())
                }
                None => Err(Error::UnknownId(id.to_string())),
            }
        };
        for m in &self.matches {
            bump(&mut seen_pre, &m.pre_id)?;
            bump(&mut seen_post, &m.post_id)?;
        }
        for id in &self.resolved {
            bump(&mut seen_pre, id)?;
        }
        for id in &self.newly_introduced {
            bump(&mut seen_post, id)?;
        }
        for (id, n) in seen_pre.iter().chain(seen_post.iter()) {
            if *n != 1 {
                return Err(Error::DuplicateMatch(format!("{id} classified {n} times")));
            }
        }
        Ok(())
    }

    /// Canonical serialized form: pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is always serializable");
        let mut s = serde_json::to_string_pretty(&value).expect("value is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedReport {
            offset: 0,
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_one() -> WarningInstance {
        WarningInstance::new(
            Side::Pre,
            "SE_BAD_FIELD",
            "org/jclouds/ContextBuilder.java",
            70,
            75,
        )
        .with_project("jclouds")
        .with_class("ContextBuilderTest")
    }

    #[test]
    fn id_is_deterministic() {
        assert_eq!(warning_id(&figure_one()), warning_id(&figure_one()));
    }

    #[test]
    fn ordinal_disambiguates() {
        let a = figure_one();
        let b = figure_one().with_ordinal(1);
        assert_ne!(warning_id(&a), warning_id(&b));
    }

    #[test]
    fn figure_one_golden_id() {
        // FNV-1a 64 of
        // "PRE|SE_BAD_FIELD|org/jclouds/ContextBuilder.java|70|75|ContextBuilderTest|||0",
        // computed with an independent implementation.
        assert_eq!(warning_id(&figure_one()), "09cb2de8526a5030");
    }

    #[test]
    fn metadata_equal_ignores_side() {
        let a = figure_one();
        let mut b = figure_one();
        b.side = Side::Post;
        assert!(metadata_equal(&a, &b));
        b.start_line = 71;
        assert!(!metadata_equal(&a, &b));
    }

    #[test]
    fn moved_file_is_not_metadata_equal() {
        let a = figure_one();
        let mut b = figure_one();
        b.side = Side::Post;
        b.file_path = "org/jclouds/core/ContextBuilder.java".into();
        assert!(!metadata_equal(&a, &b));
    }

    #[test]
    fn canonical_path_rules() {
        assert_eq!(canonical_path("./a\\b\\C.java"), "a/b/C.java");
        assert_eq!(canonical_path("././x.java"), "x.java");
        assert_eq!(canonical_path("src/x.java"), "src/x.java");
    }

    #[test]
    fn set_assigns_ordinals_and_sorts() {
        let w = |line| WarningInstance::new(Side::Pre, "T", "b.java", line, line);
        let set = WarningSet::from_report_order(
            Side::Pre,
            vec![
                w(9),
                WarningInstance::new(Side::Pre, "T", "a.java", 3, 3),
                w(9),
            ],
        )
        .unwrap();
        let got: Vec<_> = set
            .iter()
            .map(|w| (w.file_path.as_str(), w.start_line, w.ordinal))
            .collect();
        assert_eq!(
            got,
            vec![("a.java", 3, 0), ("b.java", 9, 0), ("b.java", 9, 1)]
        );
        assert_eq!(set.ids().unwrap().len(), 3);
    }

    #[test]
    fn set_rejects_wrong_side_and_bad_range() {
        let post = WarningInstance::new(Side::Post, "T", "a.java", 1, 1);
        assert!(WarningSet::from_report_order(Side::Pre, vec![post]).is_err());
        let bad = WarningInstance::new(Side::Pre, "T", "a.java", 5, 4);
        assert!(matches!(
            WarningSet::from_report_order(Side::Pre, vec![bad]),
            Err(Error::SchemaViolation(_))
        ));
    }
}
