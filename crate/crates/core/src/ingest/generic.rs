//! Tool-neutral JSON warning list.
//!
//! ```json
//! [
//!   {
//!     "class": "ContextBuilderTest",
//!     "end_line": 75,
//!     "field": "",
//!     "file_path": "org/jclouds/ContextBuilder.java",
//!     "method": "",
//!     "project": "jclouds",
//!     "start_line": 70,
//!     "warning_type": "SE_BAD_FIELD"
//!   }
//! ]
//! ```

use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use crate::error::{Error, Result};
use crate::model::{Side, WarningInstance, WarningSet};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    warning_type: String,
    #[serde(default)]
    project: String,
    #[serde(default)]
    class: String,
    #[serde(default)]
    method: String,
    #[serde(default)]
    field: String,
    file_path: String,
    start_line: u32,
    end_line: u32,
}

pub fn parse_generic_warnings(bytes: &[u8], side: Side) -> Result<WarningSet> {
    let records: Vec<Record> = serde_json::from_slice(bytes).map_err(|e| match e.classify() {
        Category::Data => Error::SchemaViolation(e.to_string()),
        _ => Error::MalformedReport {
            offset: byte_offset(bytes, e.line(), e.column()),
            message: e.to_string(),
        },
    })?;
    let warnings = records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let w =
                WarningInstance::new(side, r.warning_type, &r.file_path, r.start_line, r.end_line)
                    .with_project(r.project)
                    .with_class(r.class)
                    .with_method(r.method)
                    .with_field(r.field);
            w.validate()
                .map_err(|e| Error::SchemaViolation(format!("record {i}: {e}")))?;
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?;
    WarningSet::from_report_order(side, warnings)
}

/// Canonical text form: pretty JSON, keys sorted, canonical warning order.
pub fn serialize_generic_warnings(set: &WarningSet) -> String {
    let records: Vec<Record> = set
        .iter()
        .map(|w| Record {
            warning_type: w.warning_type.clone(),
            project: w.project.clone(),
            class: w.class_name.clone(),
            method: w.method_name.clone(),
            field: w.field_name.clone(),
            file_path: w.file_path.clone(),
            start_line: w.start_line,
            end_line: w.end_line,
        })
        .collect();
    // Value maps are ordered by key
    let value = serde_json::to_value(&records).expect("records serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> u64 {
    if line == 0 {
        return 0;
    }
    let mut remaining = line - 1;
    let mut start = 0usize;
    if remaining > 0 {
        for (i, b) in bytes.iter().enumerate() {
            if *b == b'\n' {
                remaining -= 1;
                if remaining == 0 {
                    start = i + 1;
                    break;
                }
            }
        }
    }
    (start + column.saturating_sub(1)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIGURE_ONE: &str = r#"[{"warning_type": "SE_BAD_FIELD", "project": "jclouds",
        "class": "ContextBuilderTest", "method": "", "field": "",
        "file_path": "org/jclouds/ContextBuilder.java", "start_line": 70, "end_line": 75}]"#;

    #[test]
    fn figure_one_record() {
        let set = parse_generic_warnings(FIGURE_ONE.as_bytes(), Side::Pre).unwrap();
        let expected = WarningInstance::new(
            Side::Pre,
            "SE_BAD_FIELD",
            "org/jclouds/ContextBuilder.java",
            70,
            75,
        )
        .with_project("jclouds")
        .with_class("ContextBuilderTest");
        assert_eq!(set.warnings(), &[expected]);
    }

    #[test]
    fn inverted_range_is_schema_violation() {
        let text =
            r#"[{"warning_type": "X", "file_path": "A.java", "start_line": 75, "end_line": 70}]"#;
        assert!(matches!(
            parse_generic_warnings(text.as_bytes(), Side::Pre),
            Err(Error::SchemaViolation(_))
        ));
    }

    #[test]
    fn wrong_field_type_is_schema_violation() {
        let text = r#"[{"warning_type": "X", "file_path": "A.java", "start_line": "ten", "end_line": 70}]"#;
        assert!(matches!(
            parse_generic_warnings(text.as_bytes(), Side::Pre),
            Err(Error::SchemaViolation(_))
        ));
    }

    #[test]
    fn broken_json_is_malformed() {
        assert!(matches!(
            parse_generic_warnings(b"[{\"warning_type\": ", Side::Pre),
            Err(Error::MalformedReport { .. })
        ));
    }

    #[test]
    fn empty_list() {
        assert!(parse_generic_warnings(b"[]", Side::Post)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn serialization_sorts_keys() {
        let set = parse_generic_warnings(FIGURE_ONE.as_bytes(), Side::Pre).unwrap();
        let text = serialize_generic_warnings(&set);
        let keys: Vec<usize> = [
            "\"class\"",
            "\"end_line\"",
            "\"field\"",
            "\"file_path\"",
            "\"method\"",
            "\"project\"",
            "\"start_line\"",
            "\"warning_type\"",
        ]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    fn arb_warning() -> impl Strategy<Value = WarningInstance> {
        (
            prop::sample::select(vec!["A", "B", "NP_NULL"]),
            prop::sample::select(vec!["a/X.java", "b/Y.java"]),
            1u32..50,
            0u32..5,
            prop::sample::select(vec!["", "C", "pkg.D"]),
            prop::sample::select(vec!["", "m()", "run(int)"]),
        )
            .prop_map(|(t, f, s, len, c, m)| {
                WarningInstance::new(Side::Pre, t, f, s, s + len)
                    .with_class(c)
                    .with_method(m)
            })
    }

    proptest! {
        #[test]
        fn round_trip(ws in prop::collection::vec(arb_warning(), 0..20)) {
            let set = WarningSet::from_report_order(Side::Pre, ws).unwrap();
            let text = serialize_generic_warnings(&set);
            let again = parse_generic_warnings(text.as_bytes(), Side::Pre).unwrap();
            prop_assert_eq!(&again, &set);
            // and the parser is deterministic
            prop_assert_eq!(parse_generic_warnings(text.as_bytes(), Side::Pre).unwrap(), again);
        }
    }
}
