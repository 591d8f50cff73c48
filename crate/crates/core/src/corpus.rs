//! Seeded synthetic commit pairs with known ground truth.
//!
//! Every generated line is unique within its commit pair, so the expected
//! line mapping of each scenario is unambiguous. Scenarios:
//!
//! * `line-shift`: code inserted above the warnings.
//! * `snippet-move`: a three-line block holding a warning moves further down.
//! * `method-rename`: a method is renamed and moved; warnings on its
//!   declaration change metadata. One RENAME_METHOD record.
//! * `file-move`: a class moves to another package and gains code in front
//!   of every warning. One MOVE_CLASS record.
//! * `drastic`: a method is deleted and an unrelated one added.
//! * `greedy-trap`: a chain of overlapping candidates where taking the best
//!   local match first strands the last warning.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{write_labels, GroundTruthLabel};
use crate::ingest::{
    serialize_generic_warnings, serialize_refactorings, CodeElementRef, RefactoringKind,
    RefactoringRecord, SourceTree,
};
use crate::model::{warning_id, EvolutionStatus, Side, WarningInstance, WarningSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKind {
    LineShift,
    SnippetMove,
    MethodRename,
    FileMove,
    Drastic,
    GreedyTrap,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::LineShift,
        ScenarioKind::SnippetMove,
        ScenarioKind::MethodRename,
        ScenarioKind::FileMove,
        ScenarioKind::Drastic,
        ScenarioKind::GreedyTrap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::LineShift => "line-shift",
            ScenarioKind::SnippetMove => "snippet-move",
            ScenarioKind::MethodRename => "method-rename",
            ScenarioKind::FileMove => "file-move",
            ScenarioKind::Drastic => "drastic",
            ScenarioKind::GreedyTrap => "greedy-trap",
        }
    }

    /// Whether the scenario's changes come from a refactoring.
    pub fn is_refactoring(self) -> bool {
        matches!(self, ScenarioKind::MethodRename | ScenarioKind::FileMove)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim().replace('_', "-"))
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

/// How many pairs of each scenario to generate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    pub seed: u64,
    pub mix: BTreeMap<ScenarioKind, usize>,
}

impl CorpusConfig {
    /// `pairs` spread as evenly as possible over all scenarios.
    pub fn balanced(seed: u64, pairs: usize) -> Self {
        let k = ScenarioKind::ALL.len();
        let mix = ScenarioKind::ALL
            .iter()
            .enumerate()
            .map(|(i, kind)| (*kind, pairs / k + usize::from(i < pairs % k)))
            .collect();
        CorpusConfig { seed, mix }
    }

    /// Parses `line-shift=3,greedy-trap=2`.
    pub fn with_mix(seed: u64, text: &str) -> Result<Self> {
        let mut mix = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, count) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("mix entry {part:?} is not name=count")))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("mix entry {part:?} has a bad count")))?;
            *mix.entry(name.parse()?).or_insert(0) += count;
        }
        Ok(CorpusConfig { seed, mix })
    }

    pub fn pairs(&self) -> usize {
        self.mix.values().sum()
    }

    /// Scenario order: round-robin over kinds until every count is used up.
    fn schedule(&self) -> Vec<ScenarioKind> {
        let mut left = self.mix.clone();
        let mut out = Vec::with_capacity(self.pairs());
        while left.values().any(|&n| n > 0) {
            for (kind, n) in left.iter_mut() {
                if *n > 0 {
                    out.push(*kind);
                    *n -= 1;
                }
            }
        }
        out
    }
}

/// One generated commit pair.
#[derive(Debug, Clone)]
pub struct PairFixture {
    pub name: String,
    pub kind: ScenarioKind,
    pub pre_commit: String,
    pub post_commit: String,
    pub pre_files: BTreeMap<String, String>,
    pub post_files: BTreeMap<String, String>,
    pub pre: WarningSet,
    pub post: WarningSet,
    pub records: Vec<RefactoringRecord>,
    pub labels: Vec<GroundTruthLabel>,
    /// Pre warnings whose metadata a refactoring changed.
    pub affected_pre_ids: Vec<String>,
}

impl PairFixture {
    pub fn pre_tree(&self) -> SourceTree {
        SourceTree::in_memory(&self.pre_files)
    }

    pub fn post_tree(&self) -> SourceTree {
        SourceTree::in_memory(&self.post_files)
    }

    pub fn true_status(&self, id: &str) -> Option<EvolutionStatus> {
        self.labels
            .iter()
            .find(|l| l.warning_id == id)
            .map(|l| l.true_status)
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub seed: u64,
    pub pairs: Vec<PairFixture>,
}

impl Corpus {
    pub fn generate(cfg: &CorpusConfig) -> Corpus {
        let mut g = Gen {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            counter: 0,
        };
        let pairs = cfg
            .schedule()
            .into_iter()
            .enumerate()
            .map(|(i, kind)| build_pair(&mut g, i, kind))
            .collect();
        Corpus {
            seed: cfg.seed,
            pairs,
        }
    }

    pub fn affected_pre_ids(&self) -> impl Iterator<Item = &str> {
        self.pairs
            .iter()
            .flat_map(|p| p.affected_pre_ids.iter().map(String::as_str))
    }

    /// Share of pre warnings touched by a refactoring.
    pub fn affected_fraction(&self) -> f64 {
        let total: usize = self.pairs.iter().map(|p| p.pre.len()).sum();
        if total == 0 {
            return 0.0;
        }
        self.affected_pre_ids().count() as f64 / total as f64
    }

    /// Writes every pair below `dir` plus a `manifest.json` listing them.
    pub fn write_to(&self, dir: &Path) -> Result<Manifest> {
        let mut entries = Vec::new();
        for p in &self.pairs {
            let base = dir.join(&p.name);
            for (side, files) in [("pre", &p.pre_files), ("post", &p.post_files)] {
                for (rel, text) in files {
                    write_file(&base.join(side).join(rel), text)?;
                }
            }
            write_file(
                &base.join("pre-warnings.json"),
                &serialize_generic_warnings(&p.pre),
            )?;
            write_file(
                &base.join("post-warnings.json"),
                &serialize_generic_warnings(&p.post),
            )?;
            write_file(
                &base.join("refactorings.json"),
                &serialize_refactorings(&p.records),
            )?;
            write_file(&base.join("labels.csv"), &write_labels(&p.labels))?;
            let rel = |f: &str| format!("{}/{f}", p.name);
            entries.push(ManifestEntry {
                name: p.name.clone(),
                scenario: Some(p.kind.to_string()),
                pre_commit: p.pre_commit.clone(),
                post_commit: p.post_commit.clone(),
                pre_root: rel("pre"),
                post_root: rel("post"),
                pre_warnings: rel("pre-warnings.json"),
                post_warnings: rel("post-warnings.json"),
                format: "generic".into(),
                refactorings: Some(rel("refactorings.json")),
                labels: Some(rel("labels.csv")),
            });
        }
        let manifest = Manifest {
            seed: Some(self.seed),
            pairs: entries,
        };
        write_file(&dir.join("manifest.json"), &manifest.to_json())?;
        Ok(manifest)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

/// List of commit pairs to track. Paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub seed: Option<u64>,
    pub pairs: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub pre_commit: String,
    #[serde(default)]
    pub post_commit: String,
    pub pre_root: String,
    pub post_root: String,
    pub pre_warnings: String,
    pub post_warnings: String,
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default)]
    pub refactorings: Option<String>,
    #[serde(default)]
    pub labels: Option<String>,
}

fn default_format() -> String {
    "generic".into()
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::SchemaViolation(format!("{}: {e}", path.display())))
    }

    /// Resolves a manifest-relative path.
    pub fn resolve(manifest_path: &Path, rel: &str) -> PathBuf {
        manifest_path.parent().unwrap_or(Path::new(".")).join(rel)
    }
}

const TYPES: [&str; 6] = [
    "DLS_DEAD_LOCAL_STORE",
    "NP_NULL_ON_SOME_PATH",
    "SE_BAD_FIELD",
    "URF_UNREAD_FIELD",
    "UnusedLocalVariable",
    "EmptyCatchBlock",
];

const WORDS: [&str; 8] = [
    "alpha", "bravo", "delta", "echo", "kilo", "lima", "oscar", "tango",
];

struct Gen {
    rng: ChaCha8Rng,
    counter: u64,
}

impl Gen {
    fn next(&mut self) -> u64 {
        self.counter += 1;
        self.counter
    }

    fn stmt(&mut self) -> String {
        let c = self.next();
        let a = self.rng.gen_range(1..100);
        let b = self.rng.gen_range(1..100);
        let w = WORDS[self.rng.gen_range(0..WORDS.len())];
        match self.rng.gen_range(0..5) {
            0 => format!("        int v{c} = {a} * {b};"),
            1 => format!("        String s{c} = \"{w}-{c}\";"),
            2 => format!("        log(\"{w} step {c}\", {a});"),
            3 => format!("        total{c} += compute({a}, {b});"),
            _ => format!("        if (flag{c}) {{ reset({a}); }}"),
        }
    }

    fn stmts(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.stmt()).collect()
    }

    fn body(&mut self, lo: usize, hi: usize) -> Vec<String> {
        let n = self.rng.gen_range(lo..=hi);
        self.stmts(n)
    }

    fn method_name(&mut self) -> String {
        let w = WORDS[self.rng.gen_range(0..WORDS.len())];
        format!("{w}{}", self.next())
    }

    fn ty(&mut self) -> &'static str {
        TYPES[self.rng.gen_range(0..TYPES.len())]
    }

    fn distinct_types(&mut self, k: usize) -> Vec<&'static str> {
        TYPES.choose_multiple(&mut self.rng, k).copied().collect()
    }

    fn commit(&mut self) -> String {
        format!("{:016x}", self.rng.gen::<u64>())
    }
}

/// A method: declaration, body, closing line.
#[derive(Clone)]
struct Method {
    name: String,
    decl: String,
    body: Vec<String>,
    close: String,
}

impl Method {
    fn new(g: &mut Gen, name: String, body: Vec<String>) -> Self {
        Method {
            decl: format!("    void {name}() {{"),
            close: format!("    }} // end {}", g.next()),
            name,
            body,
        }
    }

    fn sig(&self) -> String {
        format!("{}()", self.name)
    }

    fn renamed(&self, name: String) -> Self {
        Method {
            decl: format!("    void {name}() {{"),
            name,
            body: self.body.clone(),
            close: self.close.clone(),
        }
    }

    fn lines(&self) -> impl Iterator<Item = &String> {
        std::iter::once(&self.decl)
            .chain(self.body.iter())
            .chain(std::iter::once(&self.close))
    }
}

fn class_file(pkg: &str, cls: &str, methods: &[&Method]) -> Vec<String> {
    let mut out = vec![
        format!("package {pkg}; // {cls}"),
        format!("public class {cls} {{"),
    ];
    for m in methods {
        out.extend(m.lines().cloned());
    }
    out.push(format!("}} // {pkg}.{cls}"));
    out
}

fn file_path(pkg: &str, cls: &str) -> String {
    format!("src/{}/{cls}.java", pkg.replace('.', "/"))
}

fn line_of(lines: &[String], text: &str) -> u32 {
    lines
        .iter()
        .position(|l| l == text)
        .map(|i| i as u32 + 1)
        .unwrap_or_else(|| panic!("anchor {text:?} not in file"))
}

/// Scenario under construction.
#[derive(Default)]
struct Draft {
    pre_files: BTreeMap<String, Vec<String>>,
    post_files: BTreeMap<String, Vec<String>>,
    pre: Vec<WarningInstance>,
    post: Vec<WarningInstance>,
    persistent: Vec<(usize, usize)>,
    affected: Vec<usize>,
    records: Vec<RefactoringRecord>,
}

/// Where a warning sits: file, class, method, first line text, line count.
#[derive(Clone, Copy)]
struct Spot<'a> {
    file: &'a str,
    class: &'a str,
    method: &'a str,
    anchor: &'a str,
    len: u32,
}

impl Draft {
    fn place(&self, side: Side, ty: &str, s: &Spot<'_>) -> WarningInstance {
        let files = match side {
            Side::Pre => &self.pre_files,
            Side::Post => &self.post_files,
        };
        let start = line_of(&files[s.file], s.anchor);
        WarningInstance::new(side, ty, s.file, start, start + s.len - 1)
            .with_project("synthetic")
            .with_class(s.class)
            .with_method(s.method)
    }

    fn pre_only(&mut self, ty: &str, s: Spot<'_>) -> usize {
        let w = self.place(Side::Pre, ty, &s);
        self.pre.push(w);
        self.pre.len() - 1
    }

    fn post_only(&mut self, ty: &str, s: Spot<'_>) -> usize {
        let w = self.place(Side::Post, ty, &s);
        self.post.push(w);
        self.post.len() - 1
    }

    fn persistent(&mut self, ty: &str, pre: Spot<'_>, post: Spot<'_>) -> usize {
        let i = self.pre_only(ty, pre);
        let j = self.post_only(ty, post);
        self.persistent.push((i, j));
        i
    }

    fn same(&mut self, ty: &str, s: Spot<'_>) -> usize {
        self.persistent(ty, s, s)
    }
}

fn build_pair(g: &mut Gen, index: usize, kind: ScenarioKind) -> PairFixture {
    let pkg = format!("p{index}");
    let mut d = Draft::default();
    match kind {
        ScenarioKind::LineShift => line_shift(g, &mut d, &pkg),
        ScenarioKind::SnippetMove => snippet_move(g, &mut d, &pkg),
        ScenarioKind::MethodRename => method_rename(g, &mut d, &pkg),
        ScenarioKind::FileMove => file_move(g, &mut d, &pkg),
        ScenarioKind::Drastic => drastic(g, &mut d, &pkg),
        ScenarioKind::GreedyTrap => greedy_trap(g, &mut d, &pkg),
    }
    background(g, &mut d, &pkg);
    finish(g, format!("pair-{index:03}-{kind}"), kind, d)
}

/// An unchanged file with at most one warning.
fn background(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let cls = "Util";
    let file = file_path(pkg, cls);
    let fqn = format!("{pkg}.{cls}");
    let name = g.method_name();
    let body = g.body(4, 6);
    let m = Method::new(g, name, body);
    let lines = class_file(pkg, cls, &[&m]);
    d.pre_files.insert(file.clone(), lines.clone());
    d.post_files.insert(file.clone(), lines);
    if g.rng.gen_bool(0.5) {
        let ty = g.ty();
        let at = g.rng.gen_range(0..m.body.len());
        d.same(
            ty,
            Spot {
                file: &file,
                class: &fqn,
                method: &m.sig(),
                anchor: &m.body[at],
                len: 1,
            },
        );
    }
}

fn line_shift(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let cls = "Shift";
    let file = file_path(pkg, cls);
    let fqn = format!("{pkg}.{cls}");
    let methods: Vec<Method> = (0..3)
        .map(|_| {
            let name = g.method_name();
            let body = g.body(5, 8);
            Method::new(g, name, body)
        })
        .collect();
    let head = {
        let name = g.method_name();
        let body = g.body(2, 6);
        Method::new(g, name, body)
    };
    let mut post_methods: Vec<&Method> = vec![&head];
    post_methods.extend(methods.iter());
    d.pre_files.insert(
        file.clone(),
        class_file(pkg, cls, &methods.iter().collect::<Vec<_>>()),
    );
    d.post_files
        .insert(file.clone(), class_file(pkg, cls, &post_methods));
    for m in &methods {
        let len = g.rng.gen_range(1..=2usize);
        let at = g.rng.gen_range(0..=m.body.len() - len);
        let ty = g.ty();
        d.same(
            ty,
            Spot {
                file: &file,
                class: &fqn,
                method: &m.sig(),
                anchor: &m.body[at],
                len: len as u32,
            },
        );
    }
}

fn snippet_move(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let cls = "Block";
    let file = file_path(pkg, cls);
    let fqn = format!("{pkg}.{cls}");
    let name = g.method_name();
    let body = g.body(12, 14);
    let m = Method::new(g, name, body);
    let other = {
        let name = g.method_name();
        let body = g.body(4, 6);
        Method::new(g, name, body)
    };
    // body[1..=3] moves behind body[9]
    let mut moved_body = vec![m.body[0].clone()];
    moved_body.extend(m.body[4..=9].iter().cloned());
    moved_body.extend(m.body[1..=3].iter().cloned());
    moved_body.extend(m.body[10..].iter().cloned());
    let moved = Method {
        body: moved_body,
        ..m.clone()
    };
    d.pre_files
        .insert(file.clone(), class_file(pkg, cls, &[&m, &other]));
    d.post_files
        .insert(file.clone(), class_file(pkg, cls, &[&moved, &other]));
    let types = g.distinct_types(2);
    let len = g.rng.gen_range(1..=2u32);
    let sig = m.sig();
    d.same(
        types[0],
        Spot {
            file: &file,
            class: &fqn,
            method: &sig,
            anchor: &m.body[2],
            len,
        },
    );
    let last = m.body.last().expect("non-empty body");
    d.same(
        types[1],
        Spot {
            file: &file,
            class: &fqn,
            method: &sig,
            anchor: last,
            len: 1,
        },
    );
}

fn method_rename(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let cls = "Service";
    let file = file_path(pkg, cls);
    let fqn = format!("{pkg}.{cls}");
    let target = {
        let name = g.method_name();
        let body = g.body(4, 6);
        Method::new(g, name, body)
    };
    let others: Vec<Method> = (0..3)
        .map(|_| {
            let name = g.method_name();
            let body = g.body(5, 7);
            Method::new(g, name, body)
        })
        .collect();
    let renamed = target.renamed(g.method_name());
    let mut pre_order = vec![&target];
    pre_order.extend(others.iter());
    let mut post_order: Vec<&Method> = others.iter().collect();
    post_order.push(&renamed);
    let pre_lines = class_file(pkg, cls, &pre_order);
    let post_lines = class_file(pkg, cls, &post_order);
    let span = |lines: &[String], m: &Method| (line_of(lines, &m.decl), line_of(lines, &m.close));
    let (pre_s, pre_e) = span(&pre_lines, &target);
    let (post_s, post_e) = span(&post_lines, &renamed);
    d.pre_files.insert(file.clone(), pre_lines);
    d.post_files.insert(file.clone(), post_lines);

    // warnings reported on the declaration
    let affected = g.rng.gen_range(2..=3u32);
    for len in 1..=affected {
        let ty = g.ty();
        let i = d.persistent(
            ty,
            Spot {
                file: &file,
                class: &fqn,
                method: &target.sig(),
                anchor: &target.decl,
                len,
            },
            Spot {
                file: &file,
                class: &fqn,
                method: &renamed.sig(),
                anchor: &renamed.decl,
                len,
            },
        );
        d.affected.push(i);
    }
    let keep = &others[1];
    let at = g.rng.gen_range(0..keep.body.len());
    let ty = g.ty();
    d.same(
        ty,
        Spot {
            file: &file,
            class: &fqn,
            method: &keep.sig(),
            anchor: &keep.body[at],
            len: 1,
        },
    );
    d.records.push(RefactoringRecord::new(
        RefactoringKind::RenameMethod,
        CodeElementRef {
            file_path: file.clone(),
            class_name: fqn.clone(),
            method_name: target.sig(),
            field_name: String::new(),
            start_line: pre_s,
            end_line: pre_e,
        },
        CodeElementRef {
            file_path: file.clone(),
            class_name: fqn.clone(),
            method_name: renamed.sig(),
            field_name: String::new(),
            start_line: post_s,
            end_line: post_e,
        },
    ));
}

fn file_move(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let cls = "Mover";
    let (pkg_a, pkg_b) = (format!("{pkg}.core"), format!("{pkg}.api"));
    let (file_a, file_b) = (file_path(&pkg_a, cls), file_path(&pkg_b, cls));
    let (fqn_a, fqn_b) = (format!("{pkg_a}.{cls}"), format!("{pkg_b}.{cls}"));
    let methods: Vec<Method> = (0..3)
        .map(|_| {
            let name = g.method_name();
            let body = g.body(5, 7);
            Method::new(g, name, body)
        })
        .collect();
    let mut anchors = Vec::new();
    let mut post_methods = Vec::new();
    for m in &methods {
        let at = g.rng.gen_range(1..m.body.len());
        let mut body = m.body[..at].to_vec();
        body.extend(g.stmts(2));
        body.extend(m.body[at..].iter().cloned());
        post_methods.push(Method { body, ..m.clone() });
        anchors.push(at);
    }
    let pre_lines = class_file(&pkg_a, cls, &methods.iter().collect::<Vec<_>>());
    let post_lines = class_file(&pkg_b, cls, &post_methods.iter().collect::<Vec<_>>());
    let (pre_n, post_n) = (pre_lines.len() as u32, post_lines.len() as u32);
    d.pre_files.insert(file_a.clone(), pre_lines);
    d.post_files.insert(file_b.clone(), post_lines);
    for (m, at) in methods.iter().zip(anchors) {
        let ty = g.ty();
        let i = d.persistent(
            ty,
            Spot {
                file: &file_a,
                class: &fqn_a,
                method: &m.sig(),
                anchor: &m.body[at],
                len: 1,
            },
            Spot {
                file: &file_b,
                class: &fqn_b,
                method: &m.sig(),
                anchor: &m.body[at],
                len: 1,
            },
        );
        d.affected.push(i);
    }
    d.records.push(RefactoringRecord::new(
        RefactoringKind::MoveClass,
        CodeElementRef {
            file_path: file_a,
            class_name: fqn_a,
            start_line: 2,
            end_line: pre_n,
            ..Default::default()
        },
        CodeElementRef {
            file_path: file_b,
            class_name: fqn_b,
            start_line: 2,
            end_line: post_n,
            ..Default::default()
        },
    ));
}

fn drastic(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let cls = "Rewrite";
    let file = file_path(pkg, cls);
    let fqn = format!("{pkg}.{cls}");
    let old = {
        let name = g.method_name();
        let body = g.body(4, 6);
        Method::new(g, name, body)
    };
    let keep = {
        let name = g.method_name();
        let body = g.body(5, 7);
        Method::new(g, name, body)
    };
    let new = {
        let name = g.method_name();
        let body = g.body(4, 6);
        Method::new(g, name, body)
    };
    d.pre_files
        .insert(file.clone(), class_file(pkg, cls, &[&old, &keep]));
    d.post_files
        .insert(file.clone(), class_file(pkg, cls, &[&new, &keep]));
    let types = g.distinct_types(3);
    let n_res = g.rng.gen_range(1..=2usize);
    for k in 0..n_res {
        d.pre_only(
            types[0],
            Spot {
                file: &file,
                class: &fqn,
                method: &old.sig(),
                anchor: &old.body[2 * k],
                len: 1,
            },
        );
    }
    let n_new = g.rng.gen_range(1..=2usize);
    for k in 0..n_new {
        d.post_only(
            types[1],
            Spot {
                file: &file,
                class: &fqn,
                method: &new.sig(),
                anchor: &new.body[2 * k + 1],
                len: 1,
            },
        );
    }
    let at = g.rng.gen_range(0..keep.body.len());
    d.same(
        types[2],
        Spot {
            file: &file,
            class: &fqn,
            method: &keep.sig(),
            anchor: &keep.body[at],
            len: 1,
        },
    );
}

/// Chain of `n` pre warnings. Greedy order hands each pre warning the post
/// warning meant for its successor and strands the last one.
fn greedy_trap(g: &mut Gen, d: &mut Draft, pkg: &str) {
    let n = g.rng.gen_range(2..=3usize);
    trap_layout(g, d, pkg, n);
}

fn trap_layout(g: &mut Gen, d: &mut Draft, pkg: &str, n: usize) {
    let cls = "Trap";
    let file = file_path(pkg, cls);
    let fqn = format!("{pkg}.{cls}");
    let name = g.method_name();
    let sig = format!("{name}()");
    let head = {
        let mut h = vec![
            format!("package {pkg}; // {cls}"),
            format!("public class {cls} {{"),
            format!("    void {name}() {{"),
        ];
        h.extend(g.stmts(2));
        h
    };
    let b: Vec<Vec<String>> = (0..n).map(|_| g.stmts(2)).collect();
    let s: Vec<Vec<String>> = (0..n).map(|_| g.stmts(2)).collect();
    let x: Vec<Vec<String>> = (0..n).map(|_| g.stmts(2)).collect();
    let n1 = g.stmts(2);
    let fill = g.stmts(28);
    let tail = vec![
        format!("    }} // end {}", g.next()),
        format!("}} // {fqn}"),
    ];

    let mut pre = head.clone();
    for k in 0..n {
        pre.extend(b[k].iter().cloned());
        pre.extend(s[k].iter().cloned());
    }
    pre.extend(fill.iter().cloned());
    pre.extend(tail.iter().cloned());

    let mut post = head;
    post.extend(n1.iter().cloned());
    for k in 1..n {
        post.extend(b[k].iter().cloned());
        post.extend(if k + 1 < n { &x[k] } else { &s[k] }.iter().cloned());
    }
    post.extend(fill);
    post.extend(b[0].iter().cloned());
    post.extend(tail);
    d.pre_files.insert(file.clone(), pre);
    d.post_files.insert(file.clone(), post);

    let ty = g.ty();
    let spot = |anchor: &'_ str, len: u32| (anchor.to_string(), len);
    // p1 = B1 and its true counterpart, B1 at the end of the post file
    let pre_spots: Vec<(String, u32)> = (0..n)
        .map(|k| spot(&b[k][0], if k == 0 || k + 1 == n { 2 } else { 3 }))
        .collect();
    let post_spots: Vec<(String, u32)> = (0..n)
        .map(|k| match k {
            0 => spot(&b[0][0], 2),
            1 => spot(&n1[1], 3),
            _ => spot(&x[k - 1][1], 3),
        })
        .collect();
    for k in 0..n {
        d.persistent(
            ty,
            Spot {
                file: &file,
                class: &fqn,
                method: &sig,
                anchor: &pre_spots[k].0,
                len: pre_spots[k].1,
            },
            Spot {
                file: &file,
                class: &fqn,
                method: &sig,
                anchor: &post_spots[k].0,
                len: post_spots[k].1,
            },
        );
    }
}

fn finish(g: &mut Gen, name: String, kind: ScenarioKind, d: Draft) -> PairFixture {
    let pre_ids: Vec<String> = d.pre.iter().map(warning_id).collect();
    let post_ids: Vec<String> = d.post.iter().map(warning_id).collect();
    let pre =
        WarningSet::from_report_order(Side::Pre, d.pre).expect("generated warnings are valid");
    let post =
        WarningSet::from_report_order(Side::Post, d.post).expect("generated warnings are valid");
    debug_assert_eq!(pre.ids().expect("no collisions").len(), pre_ids.len());

    let mut pre_status = vec![EvolutionStatus::Resolved; pre_ids.len()];
    let mut post_status = vec![EvolutionStatus::NewlyIntroduced; post_ids.len()];
    for &(i, j) in &d.persistent {
        pre_status[i] = EvolutionStatus::Persistent;
        post_status[j] = EvolutionStatus::Persistent;
    }
    let mut labels: Vec<GroundTruthLabel> = pre_ids
        .iter()
        .zip(pre_status)
        .chain(post_ids.iter().zip(post_status))
        .map(|(id, s)| GroundTruthLabel {
            warning_id: id.clone(),
            true_status: s,
        })
        .collect();
    labels.sort_by(|a, b| a.warning_id.cmp(&b.warning_id));
    let join = |files: BTreeMap<String, Vec<String>>| {
        files
            .into_iter()
            .map(|(k, v)| (k, v.join("\n") + "\n"))
            .collect::<BTreeMap<_, _>>()
    };
    PairFixture {
        name,
        kind,
        pre_commit: g.commit(),
        post_commit: g.commit(),
        pre_files: join(d.pre_files),
        post_files: join(d.post_files),
        pre,
        post,
        records: d.records,
        labels,
        affected_pre_ids: d.affected.iter().map(|&i| pre_ids[i].clone()).collect(),
    }
}

/// The greedy-trap layout with a chain of `n` warnings, on its own.
pub fn greedy_trap_fixture(seed: u64, n: usize) -> PairFixture {
    assert!(n >= 2, "a trap needs at least two warnings");
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        counter: 0,
    };
    let mut d = Draft::default();
    trap_layout(&mut g, &mut d, "trap", n);
    finish(
        &mut g,
        format!("greedy-trap-{n}x{n}"),
        ScenarioKind::GreedyTrap,
        d,
    )
}
