//! Readers for warning reports, refactoring records and source trees.

mod generic;
mod pmd;
mod refactorings;
mod source;
mod spotbugs;

pub use generic::{parse_generic_warnings, serialize_generic_warnings};
pub use pmd::{parse_pmd_report, parse_pmd_report_with};
pub use refactorings::{
    parse_refactorings, serialize_refactorings, CodeElementRef, RefactoringKind, RefactoringRecord,
};
pub use source::{load_source, split_lines, SourceTree};
pub use spotbugs::{parse_spotbugs_report, parse_spotbugs_report_with};

use std::collections::HashMap;
use std::str::FromStr;

use quick_xml::events::BytesStart;

use crate::error::{Error, Result};
use crate::model::{canonical_path, Side, WarningSet};

/// Report flavours accepted by [`parse_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Pmd,
    Spotbugs,
    Generic,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pmd" => Ok(ReportFormat::Pmd),
            "spotbugs" => Ok(ReportFormat::Spotbugs),
            "generic" | "json" => Ok(ReportFormat::Generic),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// Options shared by the XML report parsers.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Project name stamped on every warning.
    pub project: String,
    /// Analyzed root; stripped from absolute file names so paths become
    /// repository-relative.
    pub strip_prefix: Option<String>,
}

impl ParseOptions {
    pub(crate) fn relative_path(&self, raw: &str) -> String {
        let path = canonical_path(raw);
        if let Some(prefix) = &self.strip_prefix {
            let prefix = canonical_path(prefix);
            let prefix = prefix.trim_end_matches('/');
            if !prefix.is_empty() {
                if let Some(rest) = path.strip_prefix(prefix) {
                    if let Some(rest) = rest.strip_prefix('/') {
                        return rest.to_string();
                    }
                }
            }
        }
        path
    }
}

pub fn parse_report(
    format: ReportFormat,
    bytes: &[u8],
    side: Side,
    opts: &ParseOptions,
) -> Result<WarningSet> {
    match format {
        ReportFormat::Pmd => parse_pmd_report_with(bytes, side, opts),
        ReportFormat::Spotbugs => parse_spotbugs_report_with(bytes, side, opts),
        ReportFormat::Generic => parse_generic_warnings(bytes, side),
    }
}

pub(crate) fn xml_error(offset: u64, err: impl std::fmt::Display) -> Error {
    Error::MalformedReport {
        offset,
        message: err.to_string(),
    }
}

pub(crate) fn attributes(e: &BytesStart<'_>, offset: u64) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| xml_error(offset, err))?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr
            .unescape_value()
            .map_err(|err| xml_error(offset, err))?
            .into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

pub(crate) fn required<'a>(
    attrs: &'a HashMap<String, String>,
    element: &str,
    attribute: &str,
    offset: u64,
) -> Result<&'a str> {
    attrs
        .get(attribute)
        .map(String::as_str)
        .ok_or_else(|| Error::MissingAttribute {
            element: element.to_string(),
            attribute: attribute.to_string(),
            offset,
        })
}

pub(crate) fn line_attr(
    attrs: &HashMap<String, String>,
    element: &str,
    attribute: &str,
    offset: u64,
) -> Result<u32> {
    let raw = required(attrs, element, attribute, offset)?;
    raw.trim()
        .parse::<u32>()
        .map_err(|_| Error::MalformedReport {
            offset,
            message: format!("<{element}> attribute `{attribute}` is not a line number: {raw:?}"),
        })
}
