//! The two tracking pipelines and final classification.

use std::collections::{HashMap, HashSet};

use crate::assignment::{build_matrix, solve_assignment};
use crate::config::MatchConfig;
use crate::diff::{build_line_mapping, compute_diff, LineMapping};
use crate::error::{Error, Result};
use crate::ingest::{RefactoringRecord, SourceTree};
use crate::model::{Approach, Match, Strategy, TrackingReport, WarningInstance, WarningSet};
use crate::refactor::rewrite_set;
use crate::strategies::{
    exact_match, exact_match_sets, hash_candidate, location_candidates, snippet_candidates,
    CandidatePair, Fingerprint, Keyed,
};

/// Commit identifiers copied into the report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommitIds {
    pub pre: String,
    pub post: String,
}

/// Line mappings per (pre file, post file), computed on first use.
struct MappingCache<'a> {
    pre_src: &'a SourceTree,
    post_src: &'a SourceTree,
    maps: HashMap<(String, String), Option<LineMapping>>,
}

impl<'a> MappingCache<'a> {
    fn new(pre_src: &'a SourceTree, post_src: &'a SourceTree) -> Self {
        MappingCache {
            pre_src,
            post_src,
            maps: HashMap::new(),
        }
    }

    fn get(&mut self, pre_file: &str, post_file: &str) -> Option<&LineMapping> {
        let (pre_src, post_src) = (self.pre_src, self.post_src);
        self.maps
            .entry((pre_file.to_string(), post_file.to_string()))
            .or_insert_with(|| {
                let a = pre_src.load(pre_file).ok()?;
                let b = post_src.load(post_file).ok()?;
                Some(build_line_mapping(&compute_diff(&a, &b)))
            })
            .as_ref()
    }
}

fn matched(pre_id: &str, c: &CandidatePair) -> Match {
    Match {
        pre_id: pre_id.to_string(),
        post_id: c.post_id.clone(),
        strategy: c.strategy,
        basis: None,
        score: c.score,
    }
}

fn exact(pre_id: &str, post_id: &str, strategy: Strategy) -> Match {
    Match {
        pre_id: pre_id.to_string(),
        post_id: post_id.to_string(),
        strategy,
        basis: None,
        score: 1.0,
    }
}

/// Baseline cascade: exact matching, then per remaining pre warning (in
/// canonical order) location, snippet and hash matching, each taking the
/// best unclaimed post warning.
pub fn track_soa(
    pre: &WarningSet,
    post: &WarningSet,
    pre_src: &SourceTree,
    post_src: &SourceTree,
    cfg: &MatchConfig,
    commits: &CommitIds,
) -> Result<TrackingReport> {
    cfg.validate()?;
    let pre_ids = pre.ids()?;
    let post_ids = post.ids()?;
    let (pw, qw) = (pre.warnings(), post.warnings());

    let ex = exact_match_sets(pre, post);
    let mut matches: Vec<Match> = ex
        .pairs
        .iter()
        .map(|&(i, j)| exact(&pre_ids[i], &post_ids[j], Strategy::Exact))
        .collect();
    let mut claimed = vec![true; qw.len()];
    for &j in &ex.post_rest {
        claimed[j] = false;
    }

    let mut maps = MappingCache::new(pre_src, post_src);
    let mut post_fps: HashMap<usize, Option<Fingerprint>> = HashMap::new();

    for &i in &ex.pre_rest {
        let w = &pw[i];
        let id = pre_ids[i].as_str();
        let same_file: Vec<(usize, Keyed<'_>)> = ex
            .post_rest
            .iter()
            .filter(|&&j| !claimed[j] && qw[j].file_path == w.file_path)
            .map(|&j| (j, (post_ids[j].as_str(), &qw[j])))
            .collect();
        let keyed: Vec<Keyed<'_>> = same_file.iter().map(|(_, k)| *k).collect();
        let index_of = |post_id: &str| {
            same_file
                .iter()
                .find(|(_, (pid, _))| *pid == post_id)
                .map(|(j, _)| *j)
                .expect("candidate comes from the pool")
        };

        if let Some(mapping) = maps.get(&w.file_path, &w.file_path) {
            if let Some(best) = location_candidates(w, id, &keyed, mapping, cfg)
                .into_iter()
                .next()
            {
                claimed[index_of(&best.post_id)] = true;
                matches.push(matched(id, &best));
                continue;
            }
        }

        let pre_lines = pre_src.load(&w.file_path).ok();
        let post_lines = post_src.load(&w.file_path).ok();
        let snippet = snippet_candidates(
            w,
            id,
            &keyed,
            pre_lines.as_deref(),
            post_lines.as_deref(),
            cfg,
        );
        if let Some(best) = snippet.into_iter().next() {
            claimed[index_of(&best.post_id)] = true;
            matches.push(matched(id, &best));
            continue;
        }

        let Some(pre_fp) = pre_lines
            .as_deref()
            .and_then(|l| Fingerprint::of(l, w.start_line, w.end_line, cfg))
        else {
            continue;
        };
        let mut best: Option<(usize, CandidatePair)> = None;
        for &j in &ex.post_rest {
            let q = &qw[j];
            if claimed[j] || q.warning_type != w.warning_type {
                continue;
            }
            let fp = post_fps.entry(j).or_insert_with(|| {
                let lines = post_src.load(&q.file_path).ok()?;
                Fingerprint::of(&lines, q.start_line, q.end_line, cfg)
            });
            let Some(fp) = fp.as_ref() else { continue };
            if let Some(c) = hash_candidate(id, &pre_fp, &post_ids[j], fp, cfg) {
                let better = best.as_ref().is_none_or(|(_, b)| {
                    c.score > b.score || (c.score == b.score && c.post_id < b.post_id)
                });
                if better {
                    best = Some((j, c));
                }
            }
        }
        if let Some((j, c)) = best {
            claimed[j] = true;
            matches.push(matched(id, &c));
        }
    }

    classify(Approach::Soa, matches, &pre_ids, &post_ids, commits)
}

/// Refactoring-aware tracking: exact matching, metadata rewrite, exact
/// matching on rewritten metadata, then location and snippet candidates
/// resolved by a global assignment.
pub fn track_improved(
    pre: &WarningSet,
    post: &WarningSet,
    pre_src: &SourceTree,
    post_src: &SourceTree,
    records: &[RefactoringRecord],
    cfg: &MatchConfig,
    commits: &CommitIds,
) -> Result<TrackingReport> {
    cfg.validate()?;
    let pre_ids = pre.ids()?;
    let post_ids = post.ids()?;
    let (pw, qw) = (pre.warnings(), post.warnings());

    let ex = exact_match_sets(pre, post);
    let mut matches: Vec<Match> = ex
        .pairs
        .iter()
        .map(|&(i, j)| exact(&pre_ids[i], &post_ids[j], Strategy::Exact))
        .collect();

    let originals: Vec<WarningInstance> = ex.pre_rest.iter().map(|&i| pw[i].clone()).collect();
    let rewritten = rewrite_set(&originals, records);
    for c in &rewritten.conflicts {
        log::warn!("conflicting refactoring records: {c}");
    }
    let post_rest: Vec<WarningInstance> = ex.post_rest.iter().map(|&j| qw[j].clone()).collect();
    let ex2 = exact_match(&rewritten.warnings, &post_rest);
    for &(k, l) in &ex2.pairs {
        matches.push(exact(
            &pre_ids[ex.pre_rest[k]],
            &post_ids[ex.post_rest[l]],
            Strategy::RefactorExact,
        ));
    }

    let rem_post: Vec<usize> = ex2.post_rest.iter().map(|&l| ex.post_rest[l]).collect();
    let rem_post_ids: Vec<String> = rem_post.iter().map(|&j| post_ids[j].clone()).collect();
    let rem_pre_ids: Vec<String> = ex2
        .pre_rest
        .iter()
        .map(|&k| pre_ids[ex.pre_rest[k]].clone())
        .collect();

    let mut maps = MappingCache::new(pre_src, post_src);
    let mut candidates = Vec::new();
    for &k in &ex2.pre_rest {
        let orig = &originals[k];
        let id = pre_ids[ex.pre_rest[k]].as_str();
        let mut probe = rewritten.warnings[k].clone();
        probe.start_line = orig.start_line;
        probe.end_line = orig.end_line;
        let pool: Vec<Keyed<'_>> = rem_post
            .iter()
            .filter(|&&j| qw[j].file_path == probe.file_path)
            .map(|&j| (post_ids[j].as_str(), &qw[j]))
            .collect();
        if pool.is_empty() {
            continue;
        }
        if let Some(mapping) = maps.get(&orig.file_path, &probe.file_path) {
            candidates.extend(location_candidates(&probe, id, &pool, mapping, cfg));
        }
        let pre_lines = pre_src.load(&orig.file_path).ok();
        let post_lines = post_src.load(&probe.file_path).ok();
        candidates.extend(snippet_candidates(
            &probe,
            id,
            &pool,
            pre_lines.as_deref(),
            post_lines.as_deref(),
            cfg,
        ));
    }
    let matrix = build_matrix(&candidates, &rem_pre_ids, &rem_post_ids)?;
    for a in solve_assignment(&matrix, cfg.min_score) {
        matches.push(Match {
            pre_id: a.pre_id,
            post_id: a.post_id,
            strategy: Strategy::Hungarian,
            basis: Some(a.basis),
            score: a.score,
        });
    }

    let mut report = classify(Approach::Improved, matches, &pre_ids, &post_ids, commits)?;
    report.rewrite_log = rewritten.log;
    Ok(report)
}

/// Runs the pipeline selected by `approach`. The baseline ignores `records`.
#[allow(clippy::too_many_arguments)]
pub fn track(
    approach: Approach,
    pre: &WarningSet,
    post: &WarningSet,
    pre_src: &SourceTree,
    post_src: &SourceTree,
    records: &[RefactoringRecord],
    cfg: &MatchConfig,
    commits: &CommitIds,
) -> Result<TrackingReport> {
    match approach {
        Approach::Soa => track_soa(pre, post, pre_src, post_src, cfg, commits),
        Approach::Improved => track_improved(pre, post, pre_src, post_src, records, cfg, commits),
    }
}

/// Derives statuses from a match list. Matches are reported in canonical
/// order of their pre warning; unmatched ids keep canonical order.
pub fn classify(
    approach: Approach,
    mut matches: Vec<Match>,
    pre_ids: &[String],
    post_ids: &[String],
    commits: &CommitIds,
) -> Result<TrackingReport> {
    let pre_pos: HashMap<&str, usize> = pre_ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let post_known: HashSet<&str> = post_ids.iter().map(String::as_str).collect();
    let mut seen_pre = HashSet::new();
    let mut seen_post = HashSet::new();
    for m in &matches {
        if !pre_pos.contains_key(m.pre_id.as_str()) || !post_known.contains(m.post_id.as_str()) {
            return Err(Error::UnknownId(format!("{} -> {}", m.pre_id, m.post_id)));
        }
        if !seen_pre.insert(m.pre_id.as_str()) {
            return Err(Error::DuplicateMatch(m.pre_id.clone()));
        }
        if !seen_post.insert(m.post_id.as_str()) {
            return Err(Error::DuplicateMatch(m.post_id.clone()));
        }
    }
    let resolved = pre_ids
        .iter()
        .filter(|id| !seen_pre.contains(id.as_str()))
        .cloned()
        .collect();
    let newly_introduced = post_ids
        .iter()
        .filter(|id| !seen_post.contains(id.as_str()))
        .cloned()
        .collect();
    matches.sort_by_key(|m| pre_pos[m.pre_id.as_str()]);
    Ok(TrackingReport {
        approach,
        pre_commit: commits.pre.clone(),
        post_commit: commits.post.clone(),
        matches,
        resolved,
        newly_introduced,
        rewrite_log: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CodeElementRef, RefactoringKind};
    use crate::model::{EvolutionStatus, Side};

    fn set(side: Side, ws: Vec<WarningInstance>) -> WarningSet {
        WarningSet::from_report_order(side, ws).unwrap()
    }

    fn w(side: Side, t: &str, f: &str, s: u32, e: u32) -> WarningInstance {
        WarningInstance::new(side, t, f, s, e)
    }

    fn numbered(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix} line {i};")).collect()
    }

    #[test]
    fn identical_commits_are_all_exact() {
        let src = SourceTree::in_memory([("A.java", numbered("a", 30).join("\n"))]);
        let pre = set(
            Side::Pre,
            vec![
                w(Side::Pre, "X", "A.java", 3, 4),
                w(Side::Pre, "Y", "A.java", 10, 10),
            ],
        );
        let post = set(
            Side::Post,
            vec![
                w(Side::Post, "X", "A.java", 3, 4),
                w(Side::Post, "Y", "A.java", 10, 10),
            ],
        );
        for report in [
            track_soa(
                &pre,
                &post,
                &src,
                &src,
                &MatchConfig::default(),
                &CommitIds::default(),
            )
            .unwrap(),
            track_improved(
                &pre,
                &post,
                &src,
                &src,
                &[],
                &MatchConfig::default(),
                &CommitIds::default(),
            )
            .unwrap(),
        ] {
            assert_eq!(report.matches.len(), 2);
            assert!(report.matches.iter().all(|m| m.strategy == Strategy::Exact));
            assert!(report.resolved.is_empty() && report.newly_introduced.is_empty());
        }
    }

    #[test]
    fn shifted_warning_found_by_location() {
        let a = numbered("a", 30);
        let mut b = numbered("new", 4);
        b.extend(a.iter().cloned());
        let pre_src = SourceTree::in_memory([("A.java", a.join("\n"))]);
        let post_src = SourceTree::in_memory([("A.java", b.join("\n"))]);
        let pre = set(Side::Pre, vec![w(Side::Pre, "X", "A.java", 10, 12)]);
        let post = set(Side::Post, vec![w(Side::Post, "X", "A.java", 14, 16)]);
        let r = track_soa(
            &pre,
            &post,
            &pre_src,
            &post_src,
            &MatchConfig::default(),
            &CommitIds::default(),
        )
        .unwrap();
        assert_eq!(r.matches.len(), 1);
        assert_eq!(r.matches[0].strategy, Strategy::Location);
        assert_eq!(r.matches[0].score, 1.0);
        let r = track_improved(
            &pre,
            &post,
            &pre_src,
            &post_src,
            &[],
            &MatchConfig::default(),
            &CommitIds::default(),
        )
        .unwrap();
        assert_eq!(r.matches[0].strategy, Strategy::Hungarian);
        assert_eq!(r.matches[0].basis, Some(Strategy::Location));
        r.check_partition(&pre, &post).unwrap();
    }

    #[test]
    fn method_rename_with_edits() {
        // the renamed method also moves and its body changes around the
        // warning, so neither location nor hash can rescue the baseline
        let a = numbered("a", 40);
        let mut b = vec!["void renamed() {".to_string()];
        b.extend(numbered("fresh", 20));
        b.extend(a[..5].iter().cloned());
        let pre_src = SourceTree::in_memory([("A.java", a.join("\n"))]);
        let post_src = SourceTree::in_memory([("A.java", b.join("\n"))]);
        let pre = set(
            Side::Pre,
            vec![w(Side::Pre, "X", "A.java", 30, 30)
                .with_class("A")
                .with_method("old()")],
        );
        let post = set(
            Side::Post,
            vec![w(Side::Post, "X", "A.java", 1, 1)
                .with_class("A")
                .with_method("renamed()")],
        );
        let rec = RefactoringRecord::new(
            RefactoringKind::RenameMethod,
            CodeElementRef {
                file_path: "A.java".into(),
                class_name: "A".into(),
                method_name: "old()".into(),
                field_name: String::new(),
                start_line: 30,
                end_line: 35,
            },
            CodeElementRef {
                file_path: "A.java".into(),
                class_name: "A".into(),
                method_name: "renamed()".into(),
                field_name: String::new(),
                start_line: 1,
                end_line: 1,
            },
        );
        let cfg = MatchConfig::default();
        let soa = track_soa(
            &pre,
            &post,
            &pre_src,
            &post_src,
            &cfg,
            &CommitIds::default(),
        )
        .unwrap();
        assert_eq!(soa.resolved.len(), 1);
        assert_eq!(soa.newly_introduced.len(), 1);
        let imp = track_improved(
            &pre,
            &post,
            &pre_src,
            &post_src,
            &[rec],
            &cfg,
            &CommitIds::default(),
        )
        .unwrap();
        assert_eq!(imp.matches.len(), 1);
        assert_eq!(imp.matches[0].strategy, Strategy::RefactorExact);
        assert_eq!(imp.rewrite_log.len(), 1);
        assert_eq!(imp.matches[0].pre_id, pre.ids().unwrap()[0]);
    }

    #[test]
    fn type_gate_blocks_everything() {
        let src = SourceTree::in_memory([("A.java", numbered("a", 30).join("\n"))]);
        let pre = set(Side::Pre, vec![w(Side::Pre, "X", "A.java", 3, 4)]);
        let post = set(Side::Post, vec![w(Side::Post, "Y", "A.java", 3, 4)]);
        let cfg = MatchConfig::default();
        let soa = track_soa(&pre, &post, &src, &src, &cfg, &CommitIds::default()).unwrap();
        let imp =
            track_improved(&pre, &post, &src, &src, &[], &cfg, &CommitIds::default()).unwrap();
        for r in [soa, imp] {
            assert!(r.matches.is_empty());
            assert_eq!(
                r.statuses()[r.resolved[0].as_str()],
                EvolutionStatus::Resolved
            );
        }
    }

    #[test]
    fn missing_files_only_allow_exact() {
        let pre = set(
            Side::Pre,
            vec![
                w(Side::Pre, "X", "Gone.java", 3, 4),
                w(Side::Pre, "X", "Gone.java", 9, 9),
            ],
        );
        let post = set(
            Side::Post,
            vec![
                w(Side::Post, "X", "Gone.java", 3, 4),
                w(Side::Post, "X", "Gone.java", 12, 12),
            ],
        );
        let r = track_soa(
            &pre,
            &post,
            &SourceTree::empty(),
            &SourceTree::empty(),
            &MatchConfig::default(),
            &CommitIds::default(),
        )
        .unwrap();
        assert_eq!(r.matches.len(), 1);
        assert_eq!(r.resolved.len(), 1);
    }

    #[test]
    fn classify_rejects_reuse() {
        let ids = |p: &str| vec![format!("{p}1"), format!("{p}2")];
        let m = |a: &str, b: &str| exact(a, b, Strategy::Exact);
        let err = classify(
            Approach::Soa,
            vec![m("p1", "q1"), m("p2", "q1")],
            &ids("p"),
            &ids("q"),
            &CommitIds::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateMatch(id) if id == "q1"));
        let ok = classify(
            Approach::Soa,
            vec![m("p2", "q1")],
            &ids("p"),
            &ids("q"),
            &CommitIds::default(),
        )
        .unwrap();
        assert_eq!(ok.resolved, vec!["p1"]);
        assert_eq!(ok.newly_introduced, vec!["q2"]);
    }
}
