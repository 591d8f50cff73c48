//! Exact, location, snippet and hash matching.
//!
//! Every generator enforces the type gate (same `warning_type`). Location
//! and snippet candidates also share the pre warning's `file_path`; hash
//! candidates may come from any file. Candidate lists are sorted by score
//! (descending), then post id.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::config::MatchConfig;
use crate::diff::{map_range, LineMapping};
use crate::ingest::SourceTree;
use crate::model::{MetadataKey, Strategy, WarningInstance, WarningSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub pre_id: String,
    pub post_id: String,
    pub strategy: Strategy,
    pub score: f64,
}

/// A warning together with its id.
pub type Keyed<'a> = (&'a str, &'a WarningInstance);

/// Result of exact matching, as indices into the inputs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExactOutcome {
    pub pairs: Vec<(usize, usize)>,
    pub pre_rest: Vec<usize>,
    pub post_rest: Vec<usize>,
}

/// Pairs metadata-identical warnings. Duplicates pair up by rank: the k-th
/// pre duplicate (in input order) with the k-th post duplicate.
pub fn exact_match(pre: &[WarningInstance], post: &[WarningInstance]) -> ExactOutcome {
    let mut pool: HashMap<MetadataKey<'_>, VecDeque<usize>> = HashMap::new();
    for (j, w) in post.iter().enumerate() {
        pool.entry(w.metadata_key()).or_default().push_back(j);
    }
    let mut out = ExactOutcome::default();
    let mut post_taken = vec![false; post.len()];
    for (i, w) in pre.iter().enumerate() {
        match pool
            .get_mut(&w.metadata_key())
            .and_then(VecDeque::pop_front)
        {
            Some(j) => {
                post_taken[j] = true;
                out.pairs.push((i, j));
            }
            None => out.pre_rest.push(i),
        }
    }
    out.post_rest = (0..post.len()).filter(|&j| !post_taken[j]).collect();
    out
}

/// [`exact_match`] over whole sets.
pub fn exact_match_sets(pre: &WarningSet, post: &WarningSet) -> ExactOutcome {
    exact_match(pre.warnings(), post.warnings())
}

fn sort_candidates(c: &mut [CandidatePair]) {
    c.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.post_id.cmp(&b.post_id))
    });
}

/// Line-count Jaccard overlap of two non-empty inclusive ranges.
pub fn range_overlap(a: (u32, u32), b: (u32, u32)) -> f64 {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    if lo > hi {
        return 0.0;
    }
    let inter = (hi - lo + 1) as f64;
    let union = (a.1.max(b.1) - a.0.min(b.0) + 1) as f64;
    inter / union
}

/// Location matching: project the pre range through the file's line mapping
/// and propose every same-type post warning intersecting the image.
pub fn location_candidates(
    pre_w: &WarningInstance,
    pre_id: &str,
    post: &[Keyed<'_>],
    mapping: &LineMapping,
    cfg: &MatchConfig,
) -> Vec<CandidatePair> {
    let Some(image) = map_range(mapping, pre_w.start_line, pre_w.end_line) else {
        return Vec::new();
    };
    let image = (*image.start(), *image.end());
    let mut out: Vec<CandidatePair> = post
        .iter()
        .filter(|(_, q)| q.warning_type == pre_w.warning_type && q.file_path == pre_w.file_path)
        .filter_map(|(id, q)| {
            let overlap = range_overlap(image, (q.start_line, q.end_line));
            (overlap > 0.0).then(|| CandidatePair {
                pre_id: pre_id.to_string(),
                post_id: id.to_string(),
                strategy: Strategy::Location,
                score: cfg.location_floor + (1.0 - cfg.location_floor) * overlap,
            })
        })
        .collect();
    sort_candidates(&mut out);
    out
}

/// Trimmed, non-blank lines of `start..=end` (clamped to the file).
pub fn normalized_lines(lines: &[String], start: u32, end: u32) -> Vec<&str> {
    let len = lines.len() as u32;
    if start > len || start > end {
        return Vec::new();
    }
    let lo = start.max(1);
    let hi = end.min(len);
    lines[(lo - 1) as usize..hi as usize]
        .iter()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty())
        .collect()
}

/// Snippet matching: identical normalized code between start and end line.
///
/// `pre_lines` is the file the pre warning's range refers to, `post_lines`
/// the post file with path `pre_w.file_path`. Either being `None` (file
/// missing) yields no candidates, as does an empty snippet.
pub fn snippet_candidates(
    pre_w: &WarningInstance,
    pre_id: &str,
    post: &[Keyed<'_>],
    pre_lines: Option<&[String]>,
    post_lines: Option<&[String]>,
    cfg: &MatchConfig,
) -> Vec<CandidatePair> {
    let (Some(pre_lines), Some(post_lines)) = (pre_lines, post_lines) else {
        return Vec::new();
    };
    let snippet = normalized_lines(pre_lines, pre_w.start_line, pre_w.end_line);
    if snippet.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<CandidatePair> = post
        .iter()
        .filter(|(_, q)| q.warning_type == pre_w.warning_type && q.file_path == pre_w.file_path)
        .filter(|(_, q)| normalized_lines(post_lines, q.start_line, q.end_line) == snippet)
        .map(|(id, _)| CandidatePair {
            pre_id: pre_id.to_string(),
            post_id: id.to_string(),
            strategy: Strategy::Snippet,
            score: cfg.snippet_score,
        })
        .collect();
    sort_candidates(&mut out);
    out
}

/// Set of consecutive-line shingles over a warning's surrounding code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint(HashSet<String>);

impl Fingerprint {
    /// Context is `start - window ..= end + window`, clamped and normalized.
    /// Returns `None` when the context is empty.
    pub fn of(lines: &[String], start: u32, end: u32, cfg: &MatchConfig) -> Option<Self> {
        let ctx = normalized_lines(
            lines,
            start.saturating_sub(cfg.context_window).max(1),
            end.saturating_add(cfg.context_window),
        );
        if ctx.is_empty() {
            return None;
        }
        let w = cfg.shingle_size.min(ctx.len());
        Some(Fingerprint(ctx.windows(w).map(|s| s.join("\n")).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn jaccard(&self, other: &Fingerprint) -> f64 {
        let inter = self.0.intersection(&other.0).count();
        let union = self.0.len() + other.0.len() - inter;
        if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// Hash matching over post warnings in any file.
pub fn hash_candidates(
    pre_w: &WarningInstance,
    pre_id: &str,
    post_all: &[Keyed<'_>],
    pre_src: &SourceTree,
    post_src: &SourceTree,
    cfg: &MatchConfig,
) -> Vec<CandidatePair> {
    let Ok(pre_lines) = pre_src.load(&pre_w.file_path) else {
        return Vec::new();
    };
    let Some(pre_fp) = Fingerprint::of(&pre_lines, pre_w.start_line, pre_w.end_line, cfg) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (id, q) in post_all {
        if q.warning_type != pre_w.warning_type {
            continue;
        }
        let Ok(post_lines) = post_src.load(&q.file_path) else {
            continue;
        };
        let Some(fp) = Fingerprint::of(&post_lines, q.start_line, q.end_line, cfg) else {
            continue;
        };
        if let Some(c) = hash_candidate(pre_id, &pre_fp, id, &fp, cfg) {
            out.push(c);
        }
    }
    sort_candidates(&mut out);
    out
}

pub(crate) fn hash_candidate(
    pre_id: &str,
    pre_fp: &Fingerprint,
    post_id: &str,
    post_fp: &Fingerprint,
    cfg: &MatchConfig,
) -> Option<CandidatePair> {
    let j = pre_fp.jaccard(post_fp);
    // 1e-12 absorbs division rounding at the threshold
    (j > 0.0 && j + 1e-12 >= cfg.hash_threshold).then(|| CandidatePair {
        pre_id: pre_id.to_string(),
        post_id: post_id.to_string(),
        strategy: Strategy::Hash,
        score: cfg.hash_weight * j,
    })
}
