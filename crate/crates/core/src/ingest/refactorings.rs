//! Refactoring records.
//!
//! Two input shapes are accepted:
//!
//! * a flat list of `{type, before: {...}, after: {...}}` objects where each
//!   side carries `file, class, method, field, start_line, end_line`;
//! * RefactoringMiner's JSON output (`{"commits": [{"refactorings": [...]}]}`
//!   or a single commit object), where the first entry of
//!   `leftSideLocations` / `rightSideLocations` becomes before / after.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::canonical_path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RefactoringKind {
    RenameMethod,
    RenameClass,
    MoveClass,
    MoveRenameFile,
    ExtractMethod,
    Other,
}

impl RefactoringKind {
    /// Maps both our spelling (`RENAME_METHOD`) and RefactoringMiner's
    /// (`Rename Method`) onto a kind; anything unrecognized is `Other`.
    pub fn from_type_name(name: &str) -> Self {
        let norm: String = name
            .trim()
            .chars()
            .map(|c| match c {
                ' ' | '-' => '_',
                c => c.to_ascii_uppercase(),
            })
            .collect();
        match norm.as_str() {
            "RENAME_METHOD" => RefactoringKind::RenameMethod,
            "RENAME_CLASS" => RefactoringKind::RenameClass,
            "MOVE_CLASS" | "MOVE_AND_RENAME_CLASS" | "MOVE_RENAME_CLASS" => {
                RefactoringKind::MoveClass
            }
            "MOVE_RENAME_FILE" | "MOVE_AND_RENAME_FILE" | "MOVE_FILE" | "RENAME_FILE" => {
                RefactoringKind::MoveRenameFile
            }
            "EXTRACT_METHOD" | "EXTRACT_AND_MOVE_METHOD" => RefactoringKind::ExtractMethod,
            _ => RefactoringKind::Other,
        }
    }
}

/// Coordinates of a code element on one side of a refactoring. Empty strings
/// and zero lines mean "not applicable".
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct CodeElementRef {
    #[serde(rename = "file")]
    pub file_path: String,
    #[serde(rename = "class")]
    pub class_name: String,
    #[serde(rename = "method")]
    pub method_name: String,
    #[serde(rename = "field")]
    pub field_name: String,
    pub start_line: u32,
    pub end_line: u32,
}

impl CodeElementRef {
    pub fn has_range(&self) -> bool {
        self.start_line >= 1 && self.end_line >= self.start_line
    }

    /// Whether `start..=end` lies inside this element's range.
    pub fn encloses(&self, start: u32, end: u32) -> bool {
        self.has_range() && self.start_line <= start && end <= self.end_line
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RefactoringRecord {
    pub kind: RefactoringKind,
    /// Type name as it appeared in the input.
    pub type_name: String,
    pub before: CodeElementRef,
    pub after: CodeElementRef,
}

impl RefactoringRecord {
    pub fn new(kind: RefactoringKind, before: CodeElementRef, after: CodeElementRef) -> Self {
        let type_name = match kind {
            RefactoringKind::RenameMethod => "Rename Method",
            RefactoringKind::RenameClass => "Rename Class",
            RefactoringKind::MoveClass => "Move Class",
            RefactoringKind::MoveRenameFile => "Move And Rename File",
            RefactoringKind::ExtractMethod => "Extract Method",
            RefactoringKind::Other => "Other",
        };
        RefactoringRecord {
            kind,
            type_name: type_name.to_string(),
            before,
            after,
        }
    }
}

#[derive(Deserialize)]
struct FlatRecord {
    #[serde(rename = "type")]
    type_name: String,
    #[serde(default)]
    before: CodeElementRef,
    #[serde(default)]
    after: CodeElementRef,
}

#[derive(Serialize)]
struct FlatRecordOut<'a> {
    after: &'a CodeElementRef,
    before: &'a CodeElementRef,
    #[serde(rename = "type")]
    type_name: &'a str,
}

/// Flat-list form accepted by [`parse_refactorings`].
pub fn serialize_refactorings(records: &[RefactoringRecord]) -> String {
    let flat: Vec<FlatRecordOut<'_>> = records
        .iter()
        .map(|r| FlatRecordOut {
            after: &r.after,
            before: &r.before,
            type_name: &r.type_name,
        })
        .collect();
    let value = serde_json::to_value(&flat).expect("records serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub fn parse_refactorings(bytes: &[u8]) -> Result<Vec<RefactoringRecord>> {
    let value: Value = serde_json::from_slice(bytes).map_err(malformed)?;
    let mut out = Vec::new();
    match &value {
        Value::Array(items) if items.iter().all(is_native_refactoring) && !items.is_empty() => {
            for item in items {
                out.push(native_record(item)?);
            }
        }
        Value::Array(_) => {
            let flat: Vec<FlatRecord> = serde_json::from_value(value).map_err(malformed)?;
            for r in flat {
                out.push(finish(r.type_name, r.before, r.after)?);
            }
        }
        Value::Object(obj) if obj.contains_key("commits") => {
            let commits = obj["commits"]
                .as_array()
                .ok_or_else(|| malformed_msg("`commits` is not a list"))?;
            for commit in commits {
                native_commit(commit, &mut out)?;
            }
        }
        Value::Object(obj) if obj.contains_key("refactorings") => {
            native_commit(&value, &mut out)?;
        }
        _ => {
            return Err(malformed_msg(
                "expected a list of records or a RefactoringMiner document",
            ))
        }
    }
    Ok(out)
}

fn finish(
    type_name: String,
    mut before: CodeElementRef,
    mut after: CodeElementRef,
) -> Result<RefactoringRecord> {
    before.file_path = canonical_path(&before.file_path);
    after.file_path = canonical_path(&after.file_path);
    let kind = RefactoringKind::from_type_name(&type_name);
    if kind != RefactoringKind::Other && (before.file_path.is_empty() || after.file_path.is_empty())
    {
        return Err(malformed_msg(&format!(
            "{type_name:?} record needs both before.file and after.file"
        )));
    }
    Ok(RefactoringRecord {
        kind,
        type_name,
        before,
        after,
    })
}

fn is_native_refactoring(v: &Value) -> bool {
    v.get("leftSideLocations").is_some() || v.get("rightSideLocations").is_some()
}

fn native_commit(commit: &Value, out: &mut Vec<RefactoringRecord>) -> Result<()> {
    let Some(list) = commit.get("refactorings") else {
        return Ok(());
    };
    let list = list
        .as_array()
        .ok_or_else(|| malformed_msg("`refactorings` is not a list"))?;
    for item in list {
        out.push(native_record(item)?);
    }
    Ok(())
}

fn native_record(item: &Value) -> Result<RefactoringRecord> {
    let type_name = item
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed_msg("refactoring without a `type` string"))?
        .to_string();
    let description = item
        .get("description")
        .and_then(Value::as_str)
        .unwrap_or("");
    let class_hint = class_from_description(description);
    let mut before = location(item.get("leftSideLocations"))?;
    let mut after = location(item.get("rightSideLocations"))?;
    for side in [&mut before, &mut after] {
        if side.class_name.is_empty() {
            if let Some(c) = &class_hint {
                side.class_name = c.clone();
            }
        }
    }
    finish(type_name, before, after)
}

fn location(v: Option<&Value>) -> Result<CodeElementRef> {
    let Some(v) = v else {
        return Ok(CodeElementRef::default());
    };
    let list = v
        .as_array()
        .ok_or_else(|| malformed_msg("side locations must be a list"))?;
    let Some(first) = list.first() else {
        return Ok(CodeElementRef::default());
    };
    let get_str = |k: &str| first.get(k).and_then(Value::as_str).unwrap_or("");
    let get_line = |k: &str| -> Result<u32> {
        match first.get(k) {
            None => Ok(0),
            Some(n) => n
                .as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| malformed_msg(&format!("`{k}` is not a line number"))),
        }
    };
    let mut r = CodeElementRef {
        file_path: get_str("filePath").to_string(),
        start_line: get_line("startLine")?,
        end_line: get_line("endLine")?,
        ..CodeElementRef::default()
    };
    let element = get_str("codeElement");
    match get_str("codeElementType") {
        "METHOD_DECLARATION" => r.method_name = method_from_code_element(element),
        "TYPE_DECLARATION" => r.class_name = element.trim().to_string(),
        "FIELD_DECLARATION" => r.field_name = field_from_code_element(element),
        _ => {}
    }
    Ok(r)
}

/// `"public m1(a int) : void"` → `"m1(a int)"`.
fn method_from_code_element(element: &str) -> String {
    let Some(open) = element.find('(') else {
        return element.trim().to_string();
    };
    let name_start = element[..open]
        .rfind(char::is_whitespace)
        .map(|i| i + 1)
        .unwrap_or(0);
    let close = element[open..]
        .find(')')
        .map(|i| open + i + 1)
        .unwrap_or(element.len());
    element[name_start..close].to_string()
}

/// `"private count : int"` → `"count"`.
fn field_from_code_element(element: &str) -> String {
    let decl = element.split(':').next().unwrap_or(element).trim();
    decl.rsplit(char::is_whitespace)
        .next()
        .unwrap_or(decl)
        .to_string()
}

fn class_from_description(description: &str) -> Option<String> {
    let idx = description.rfind(" in class ")?;
    let rest = &description[idx + " in class ".len()..];
    let name = rest.split_whitespace().next()?;
    Some(name.to_string())
}

fn malformed(e: serde_json::Error) -> Error {
    Error::MalformedReport {
        offset: 0,
        message: e.to_string(),
    }
}

fn malformed_msg(msg: &str) -> Error {
    Error::MalformedReport {
        offset: 0,
        message: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Shape of `RefactoringMiner -c <repo> <sha> -json out.json` on a toy
    // repository where Greeter.hello() was renamed to greet().
    const NATIVE: &str = r#"{
  "commits": [{
    "repository": "https://example.org/toy.git",
    "sha1": "9c2b1f0",
    "url": "https://example.org/toy/commit/9c2b1f0",
    "refactorings": [{
      "type": "Rename Method",
      "description": "Rename Method\tpublic m1() : void renamed to public m2() : void in class com.acme.Greeter",
      "leftSideLocations": [{
        "filePath": "src/main/java/com/acme/Greeter.java",
        "startLine": 10, "endLine": 14, "startColumn": 5, "endColumn": 6,
        "codeElementType": "METHOD_DECLARATION",
        "description": "original method declaration",
        "codeElement": "public m1() : void"
      }],
      "rightSideLocations": [{
        "filePath": "src/main/java/com/acme/Greeter.java",
        "startLine": 10, "endLine": 14, "startColumn": 5, "endColumn": 6,
        "codeElementType": "METHOD_DECLARATION",
        "description": "method declaration with rename",
        "codeElement": "public m2() : void"
      }]
    }, {
      "type": "Inline Variable",
      "description": "Inline Variable\ttmp : int in method public m2() : void from class com.acme.Greeter",
      "leftSideLocations": [], "rightSideLocations": []
    }]
  }]
}"#;

    #[test]
    fn native_rename_method() {
        let recs = parse_refactorings(NATIVE.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        let r = &recs[0];
        assert_eq!(r.kind, RefactoringKind::RenameMethod);
        assert_eq!(r.before.method_name, "m1()");
        assert_eq!(r.after.method_name, "m2()");
        assert_eq!(r.before.file_path, "src/main/java/com/acme/Greeter.java");
        assert_eq!(r.after.file_path, r.before.file_path);
        assert_eq!(r.before.class_name, "com.acme.Greeter");
        assert_eq!((r.before.start_line, r.before.end_line), (10, 14));
        assert_eq!(recs[1].kind, RefactoringKind::Other);
        assert_eq!(recs[1].type_name, "Inline Variable");
    }

    #[test]
    fn flat_records_keep_order_and_other() {
        let text = r#"[
  {"type": "Inline Variable", "before": {}, "after": {}},
  {"type": "MOVE_CLASS",
   "before": {"file": "a/B.java", "class": "a.B", "start_line": 1, "end_line": 40},
   "after": {"file": "b/B.java", "class": "b.B", "start_line": 1, "end_line": 40}}
]"#;
        let recs = parse_refactorings(text.as_bytes()).unwrap();
        assert_eq!(recs[0].kind, RefactoringKind::Other);
        assert_eq!(recs[1].kind, RefactoringKind::MoveClass);
        assert_eq!(recs[1].after.file_path, "b/B.java");
    }

    #[test]
    fn empty_inputs() {
        assert!(parse_refactorings(b"[]").unwrap().is_empty());
        assert!(parse_refactorings(br#"{"commits": []}"#)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_refactorings(b"{").is_err());
        assert!(parse_refactorings(b"42").is_err());
        assert!(parse_refactorings(
            br#"[{"type": "Rename Method", "before": {"file": "A.java"}, "after": {}}]"#
        )
        .is_err());
    }

    #[test]
    fn code_element_names() {
        assert_eq!(method_from_code_element("public m1() : void"), "m1()");
        assert_eq!(
            method_from_code_element("private static parse(text String, n int) : List<String>"),
            "parse(text String, n int)"
        );
        assert_eq!(field_from_code_element("private count : int"), "count");
        assert_eq!(
            RefactoringKind::from_type_name("Move And Rename Class"),
            RefactoringKind::MoveClass
        );
    }

    #[test]
    fn flat_form_round_trips() {
        let rec = RefactoringRecord::new(
            RefactoringKind::RenameMethod,
            CodeElementRef {
                file_path: "a/B.java".into(),
                class_name: "a.B".into(),
                method_name: "m1()".into(),
                start_line: 10,
                end_line: 20,
                ..Default::default()
            },
            CodeElementRef {
                file_path: "a/B.java".into(),
                class_name: "a.B".into(),
                method_name: "m2()".into(),
                start_line: 30,
                end_line: 40,
                ..Default::default()
            },
        );
        let text = serialize_refactorings(std::slice::from_ref(&rec));
        assert_eq!(parse_refactorings(text.as_bytes()).unwrap(), vec![rec]);
        assert_eq!(serialize_refactorings(&[]), "[]\n");
    }
}
