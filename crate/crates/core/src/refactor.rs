//! Rewrites pre-commit warning metadata through refactoring records so that
//! matching sees post-commit coordinates.
//!
//! Every record is evaluated against the *original* warning. A record that
//! encloses the warning proposes new values for some fields; proposals that
//! leave a field unchanged are ignored. When two records propose different
//! values for the same field the earlier record wins and the clash is
//! reported as a [`Conflict`].

use crate::error::Error;
use crate::ingest::{CodeElementRef, RefactoringKind, RefactoringRecord};
use crate::model::{warning_id, FieldChange, RewriteLogEntry, Side, WarningInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub original_id: String,
    pub field: &'static str,
    pub kept: String,
    pub kept_record: usize,
    pub rejected: String,
    pub rejected_record: usize,
}

impl std::fmt::Display for Conflict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "warning {}: record #{} sets {} to {:?}, record #{} to {:?}; keeping the first",
            self.original_id,
            self.kept_record,
            self.field,
            self.kept,
            self.rejected_record,
            self.rejected
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewriteOutcome {
    pub warning: WarningInstance,
    pub changes: Vec<FieldChange>,
    pub conflicts: Vec<Conflict>,
}

const FIELDS: [&str; 5] = [
    "class_name",
    "method_name",
    "file_path",
    "start_line",
    "end_line",
];

fn field_value(w: &WarningInstance, field: &str) -> String {
    match field {
        "class_name" => w.class_name.clone(),
        "method_name" => w.method_name.clone(),
        "file_path" => w.file_path.clone(),
        "start_line" => w.start_line.to_string(),
        "end_line" => w.end_line.to_string(),
        _ => unreachable!("unknown rewrite field {field}"),
    }
}

fn set_field(w: &mut WarningInstance, field: &str, value: &str) {
    match field {
        "class_name" => w.class_name = value.to_string(),
        "method_name" => w.method_name = value.to_string(),
        "file_path" => w.file_path = value.to_string(),
        "start_line" => w.start_line = value.parse().expect("line proposals are numeric"),
        "end_line" => w.end_line = value.parse().expect("line proposals are numeric"),
        _ => unreachable!("unknown rewrite field {field}"),
    }
}

/// `a.b.C` matches both `a.b.C` and the simple name `C`.
fn class_matches(record_class: &str, warning_class: &str) -> bool {
    !record_class.is_empty()
        && !warning_class.is_empty()
        && (record_class == warning_class
            || record_class
                .strip_suffix(warning_class)
                .is_some_and(|prefix| prefix.ends_with('.'))
            || warning_class
                .strip_suffix(record_class)
                .is_some_and(|prefix| prefix.ends_with('.')))
}

/// Renders `after` in the same qualification style as `current`.
fn restyle_class(current: &str, before: &str, after: &str) -> String {
    let simple = |s: &str| s.rsplit('.').next().unwrap_or(s).to_string();
    if current == before || current.contains('.') {
        after.to_string()
    } else {
        simple(after)
    }
}

fn encloses(el: &CodeElementRef, w: &WarningInstance) -> bool {
    el.file_path == w.file_path && el.encloses(w.start_line, w.end_line)
}

/// Field proposals of one record for one warning.
fn proposals(w: &WarningInstance, r: &RefactoringRecord) -> Vec<(&'static str, String)> {
    let (before, after) = (&r.before, &r.after);
    let mut out = Vec::new();
    let applies = match r.kind {
        RefactoringKind::RenameMethod => {
            let applies = before.file_path == w.file_path
                && ((!before.method_name.is_empty() && before.method_name == w.method_name)
                    || before.encloses(w.start_line, w.end_line));
            if applies && !after.method_name.is_empty() {
                out.push(("method_name", after.method_name.clone()));
            }
            applies
        }
        RefactoringKind::RenameClass | RefactoringKind::MoveClass => {
            let applies =
                before.file_path == w.file_path && class_matches(&before.class_name, &w.class_name);
            if applies {
                if !after.class_name.is_empty() {
                    out.push((
                        "class_name",
                        restyle_class(&w.class_name, &before.class_name, &after.class_name),
                    ));
                }
                if !after.file_path.is_empty() {
                    out.push(("file_path", after.file_path.clone()));
                }
            }
            applies
        }
        RefactoringKind::MoveRenameFile => {
            let applies = before.file_path == w.file_path;
            if applies && !after.file_path.is_empty() {
                out.push(("file_path", after.file_path.clone()));
            }
            applies
        }
        RefactoringKind::ExtractMethod => {
            let applies = encloses(before, w);
            if applies {
                if !after.method_name.is_empty() {
                    out.push(("method_name", after.method_name.clone()));
                }
                if !after.file_path.is_empty() {
                    out.push(("file_path", after.file_path.clone()));
                }
            }
            applies
        }
        RefactoringKind::Other => false,
    };
    if applies && before.has_range() && after.has_range() && encloses(before, w) {
        let delta = i64::from(after.start_line) - i64::from(before.start_line);
        let shift = |line: u32| (i64::from(line) + delta).max(1).to_string();
        out.push(("start_line", shift(w.start_line)));
        out.push(("end_line", shift(w.end_line)));
    }
    out
}

pub fn rewrite_warning(w: &WarningInstance, records: &[RefactoringRecord]) -> RewriteOutcome {
    let mut chosen: Vec<Option<(String, usize)>> = vec![None; FIELDS.len()];
    let mut conflicts = Vec::new();
    for (idx, r) in records.iter().enumerate() {
        for (field, value) in proposals(w, r) {
            if value == field_value(w, field) {
                continue;
            }
            let slot = FIELDS
                .iter()
                .position(|f| *f == field)
                .expect("known field");
            match &chosen[slot] {
                None => chosen[slot] = Some((value, idx)),
                Some((kept, kept_idx)) if *kept != value => conflicts.push(Conflict {
                    original_id: warning_id(w),
                    field,
                    kept: kept.clone(),
                    kept_record: *kept_idx,
                    rejected: value,
                    rejected_record: idx,
                }),
                Some(_) => {}
            }
        }
    }
    let mut out = w.clone();
    let mut changes = Vec::new();
    for (slot, choice) in chosen.into_iter().enumerate() {
        if let Some((value, _)) = choice {
            let field = FIELDS[slot];
            changes.push(FieldChange {
                field: field.to_string(),
                from: field_value(w, field),
                to: value.clone(),
            });
            set_field(&mut out, field, &value);
        }
    }
    if out.start_line > out.end_line {
        // only one endpoint moved; keep the original extent
        out.end_line = out.start_line + (w.end_line - w.start_line);
    }
    RewriteOutcome {
        warning: out,
        changes,
        conflicts,
    }
}

/// Rewritten warnings, index-aligned with the input.
#[derive(Debug, Clone, PartialEq)]
pub struct RewrittenSet {
    pub warnings: Vec<WarningInstance>,
    pub log: Vec<RewriteLogEntry>,
    pub conflicts: Vec<Conflict>,
}

impl RewrittenSet {
    /// All conflicts folded into one error, if there were any.
    pub fn conflict_error(&self) -> Option<Error> {
        if self.conflicts.is_empty() {
            return None;
        }
        let msg = self
            .conflicts
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        Some(Error::ConflictingRecords(msg))
    }
}

pub fn rewrite_set(pre: &[WarningInstance], records: &[RefactoringRecord]) -> RewrittenSet {
    let mut warnings = Vec::with_capacity(pre.len());
    let mut log = Vec::new();
    let mut conflicts = Vec::new();
    for w in pre {
        debug_assert_eq!(w.side, Side::Pre);
        let outcome = rewrite_warning(w, records);
        if !outcome.changes.is_empty() {
            log.push(RewriteLogEntry {
                original_id: warning_id(w),
                changes: outcome.changes,
            });
        }
        conflicts.extend(outcome.conflicts);
        warnings.push(outcome.warning);
    }
    RewrittenSet {
        warnings,
        log,
        conflicts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::metadata_equal;
    use proptest::prelude::*;

    fn el(file: &str, class: &str, method: &str, s: u32, e: u32) -> CodeElementRef {
        CodeElementRef {
            file_path: file.into(),
            class_name: class.into(),
            method_name: method.into(),
            field_name: String::new(),
            start_line: s,
            end_line: e,
        }
    }

    fn warning(file: &str, class: &str, method: &str, s: u32, e: u32) -> WarningInstance {
        WarningInstance::new(Side::Pre, "DLS_DEAD_LOCAL_STORE", file, s, e)
            .with_class(class)
            .with_method(method)
    }

    #[test]
    fn method_rename_reaches_post_metadata() {
        let w = warning("a/B.java", "a.B", "m1()", 12, 13);
        let rec = RefactoringRecord::new(
            RefactoringKind::RenameMethod,
            el("a/B.java", "a.B", "m1()", 10, 20),
            el("a/B.java", "a.B", "m2()", 10, 20),
        );
        let out = rewrite_warning(&w, &[rec]);
        assert_eq!(out.warning.method_name, "m2()");
        assert_eq!(out.changes.len(), 1);
        let mut post = w.clone().with_method("m2()");
        post.side = Side::Post;
        assert!(metadata_equal(&out.warning, &post));
    }

    #[test]
    fn no_records_is_identity() {
        let w = warning("a/B.java", "a.B", "m1()", 12, 13);
        let out = rewrite_warning(&w, &[]);
        assert_eq!(out.warning, w);
        assert!(out.changes.is_empty());
    }

    #[test]
    fn file_move_shifts_lines() {
        let w = warning("a/B.java", "B", "", 30, 35);
        let rec = RefactoringRecord::new(
            RefactoringKind::MoveRenameFile,
            el("a/B.java", "", "", 10, 60),
            el("b/B.java", "", "", 22, 72),
        );
        let out = rewrite_warning(&w, &[rec]);
        assert_eq!(out.warning.file_path, "b/B.java");
        assert_eq!((out.warning.start_line, out.warning.end_line), (42, 47));
    }

    #[test]
    fn move_class_keeps_simple_name_style() {
        let rec = RefactoringRecord::new(
            RefactoringKind::MoveClass,
            el("a/B.java", "a.B", "", 0, 0),
            el("b/B.java", "b.B", "", 0, 0),
        );
        let simple = rewrite_warning(
            &warning("a/B.java", "B", "", 5, 5),
            std::slice::from_ref(&rec),
        );
        assert_eq!(simple.warning.class_name, "B");
        assert_eq!(simple.warning.file_path, "b/B.java");
        let qualified = rewrite_warning(&warning("a/B.java", "a.B", "", 5, 5), &[rec]);
        assert_eq!(qualified.warning.class_name, "b.B");
    }

    #[test]
    fn extract_method_moves_fragment() {
        let w = warning("a/B.java", "a.B", "big()", 40, 42);
        let rec = RefactoringRecord::new(
            RefactoringKind::ExtractMethod,
            el("a/B.java", "a.B", "big()", 38, 45),
            el("a/B.java", "a.B", "helper()", 80, 87),
        );
        let out = rewrite_warning(&w, &[rec]);
        assert_eq!(out.warning.method_name, "helper()");
        assert_eq!((out.warning.start_line, out.warning.end_line), (82, 84));
        // a warning outside the fragment is untouched
        let outside = warning("a/B.java", "a.B", "big()", 50, 50);
        let rec = RefactoringRecord::new(
            RefactoringKind::ExtractMethod,
            el("a/B.java", "a.B", "big()", 38, 45),
            el("a/B.java", "a.B", "helper()", 80, 87),
        );
        assert_eq!(rewrite_warning(&outside, &[rec]).warning, outside);
    }

    #[test]
    fn conflicting_records_first_wins() {
        let w = warning("a/B.java", "a.B", "m1()", 12, 13);
        let r1 = RefactoringRecord::new(
            RefactoringKind::RenameMethod,
            el("a/B.java", "", "m1()", 0, 0),
            el("a/B.java", "", "m2()", 0, 0),
        );
        let r2 = RefactoringRecord::new(
            RefactoringKind::RenameMethod,
            el("a/B.java", "", "m1()", 0, 0),
            el("a/B.java", "", "m3()", 0, 0),
        );
        let out = rewrite_warning(&w, &[r1, r2]);
        assert_eq!(out.warning.method_name, "m2()");
        assert_eq!(out.conflicts.len(), 1);
        assert_eq!(out.conflicts[0].field, "method_name");
        assert_eq!(out.conflicts[0].rejected, "m3()");
    }

    #[test]
    fn set_rewrite_logs_only_affected() {
        let mut ws: Vec<_> = (0..7)
            .map(|i| warning("a/B.java", "a.B", "other()", 100 + i, 100 + i))
            .collect();
        ws.extend((0..3).map(|i| warning("a/B.java", "a.B", "m1()", 12 + i, 12 + i)));
        let rec = RefactoringRecord::new(
            RefactoringKind::RenameMethod,
            el("a/B.java", "a.B", "m1()", 10, 20),
            el("a/B.java", "a.B", "m2()", 10, 20),
        );
        let out = rewrite_set(&ws, &[rec]);
        assert_eq!(out.log.len(), 3);
        assert_eq!(out.warnings.len(), ws.len());
        assert!(out.conflict_error().is_none());
        assert_eq!(rewrite_set(&ws, &[]).warnings, ws);
        let other = RefactoringRecord::new(
            RefactoringKind::Other,
            el("a/B.java", "a.B", "m1()", 10, 20),
            el("a/B.java", "a.B", "m2()", 10, 20),
        );
        assert!(rewrite_set(&ws, &[other]).log.is_empty());
    }

    fn arb_record() -> impl Strategy<Value = RefactoringRecord> {
        let kind = prop::sample::select(vec![
            RefactoringKind::RenameMethod,
            RefactoringKind::RenameClass,
            RefactoringKind::MoveClass,
            RefactoringKind::MoveRenameFile,
            RefactoringKind::ExtractMethod,
            RefactoringKind::Other,
        ]);
        let file = prop::sample::select(vec!["a/B.java", "b/B.java", "c/D.java"]);
        let class = prop::sample::select(vec!["", "a.B", "B", "c.D"]);
        let method = prop::sample::select(vec!["", "m1()", "m2()"]);
        (
            kind,
            file.clone(),
            class.clone(),
            method.clone(),
            0u32..40,
            0u32..30,
            file,
            class,
            method,
            0u32..40,
        )
            .prop_map(|(k, bf, bc, bm, bs, len, af, ac, am, as_)| {
                let be = if bs == 0 { 0 } else { bs + len };
                let ae = if as_ == 0 { 0 } else { as_ + len };
                RefactoringRecord::new(k, el(bf, bc, bm, bs, be), el(af, ac, am, as_, ae))
            })
    }

    proptest! {
        #[test]
        fn rewrite_preserves_type_project_and_cardinality(
            recs in prop::collection::vec(arb_record(), 0..6),
            lines in prop::collection::vec((1u32..50, 0u32..5), 1..12),
        ) {
            let ws: Vec<_> = lines
                .iter()
                .enumerate()
                .map(|(i, (s, l))| {
                    warning(if i % 2 == 0 { "a/B.java" } else { "c/D.java" }, "a.B", "m1()", *s, s + l)
                        .with_project("proj")
                })
                .collect();
            let out = rewrite_set(&ws, &recs);
            prop_assert_eq!(out.warnings.len(), ws.len());
            for (a, b) in ws.iter().zip(&out.warnings) {
                prop_assert_eq!(&a.warning_type, &b.warning_type);
                prop_assert_eq!(&a.project, &b.project);
                prop_assert!(b.start_line >= 1 && b.start_line <= b.end_line);
            }
            let logged: std::collections::HashSet<_> =
                out.log.iter().map(|e| e.original_id.clone()).collect();
            for (a, b) in ws.iter().zip(&out.warnings) {
                if !logged.contains(&warning_id(a)) {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
