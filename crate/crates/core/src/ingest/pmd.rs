//! PMD XML reports.
//!
//! ```xml
//! <pmd version="6.55.0">
//!   <file name="/src/org/jclouds/ContextBuilder.java">
//!     <violation beginline="70" endline="75" rule="UnusedPrivateField"
//!                class="ContextBuilder" method="build" variable="x">message</violation>
//!   </file>
//! </pmd>
//! ```

use quick_xml::events::Event;
use quick_xml::Reader;

use super::{attributes, line_attr, required, xml_error, ParseOptions};
use crate::error::Result;
use crate::model::{Side, WarningInstance, WarningSet};

pub fn parse_pmd_report(bytes: &[u8], side: Side) -> Result<WarningSet> {
    parse_pmd_report_with(bytes, side, &ParseOptions::default())
}

pub fn parse_pmd_report_with(bytes: &[u8], side: Side, opts: &ParseOptions) -> Result<WarningSet> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut depth = 0usize;
    let mut saw_root = false;
    let mut current_file: Option<String> = None;
    let mut warnings = Vec::new();

    loop {
        let offset = reader.buffer_position();
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_error(reader.error_position(), e))?;
        match event {
            Event::Eof => break,
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_start = matches!(event, Event::Start(_));
                let name = e.name();
                if depth == 0 {
                    if name.as_ref() != b"pmd" {
                        return Err(xml_error(
                            offset,
                            format!(
                                "expected <pmd> root, found <{}>",
                                String::from_utf8_lossy(name.as_ref())
                            ),
                        ));
                    }
                    saw_root = true;
                }
                match name.as_ref() {
                    b"file" => {
                        let attrs = attributes(e, offset)?;
                        let raw = required(&attrs, "file", "name", offset)?;
                        current_file = Some(opts.relative_path(raw));
                    }
                    b"violation" => {
                        let attrs = attributes(e, offset)?;
                        let file = current_file.as_deref().ok_or_else(|| {
                            xml_error(offset, "<violation> outside of a <file> element")
                        })?;
                        let rule = required(&attrs, "violation", "rule", offset)?;
                        let begin = line_attr(&attrs, "violation", "beginline", offset)?;
                        let end = if attrs.contains_key("endline") {
                            line_attr(&attrs, "violation", "endline", offset)?
                        } else {
                            begin
                        };
                        let class_name = match attrs.get("class") {
                            Some(c) => c.clone(),
                            None => class_from_basename(file),
                        };
                        let w = WarningInstance::new(side, rule, file, begin, end)
                            .with_project(opts.project.clone())
                            .with_class(class_name)
                            .with_method(attrs.get("method").cloned().unwrap_or_default())
                            .with_field(attrs.get("variable").cloned().unwrap_or_default());
                        warnings.push(w);
                    }
                    _ => {}
                }
                if is_start {
                    depth += 1;
                }
            }
            Event::End(ref e) => {
                depth = depth.saturating_sub(1);
                if e.name().as_ref() == b"file" {
                    current_file = None;
                }
            }
            _ => {}
        }
        buf.clear();
    }
    if !saw_root {
        return Err(xml_error(0, "document has no <pmd> root element"));
    }
    if depth != 0 {
        return Err(xml_error(
            reader.buffer_position(),
            "unexpected end of document inside an open element",
        ));
    }
    WarningSet::from_report_order(side, warnings)
}

fn class_from_basename(path: &str) -> String {
    let base = path.rsplit('/').next().unwrap_or(path);
    match base.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem.to_string(),
        _ => base.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn empty_report() {
        let set = parse_pmd_report(
            br#"<?xml version="1.0"?><pmd version="6.55.0"></pmd>"#,
            Side::Pre,
        )
        .unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn figure_one_shape() {
        let xml = br#"<pmd>
  <file name="org/jclouds/ContextBuilder.java">
    <violation beginline="70" endline="75" begincolumn="1" endcolumn="2" rule="SE_BAD_FIELD" class="ContextBuilderTest" priority="3">
      Non-transient non-serializable instance field
    </violation>
  </file>
</pmd>"#;
        let set = parse_pmd_report_with(
            xml,
            Side::Pre,
            &ParseOptions {
                project: "jclouds".into(),
                strip_prefix: None,
            },
        )
        .unwrap();
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
    fn duplicates_get_ordinals() {
        let xml = br#"<pmd><file name="A.java">
<violation beginline="3" endline="3" rule="R" class="A"/>
<violation beginline="3" endline="3" rule="R" class="A"/>
</file></pmd>"#;
        let set = parse_pmd_report(xml, Side::Post).unwrap();
        let ords: Vec<u32> = set.iter().map(|w| w.ordinal).collect();
        assert_eq!(ords, vec![0, 1]);
    }

    #[test]
    fn class_defaults_to_file_basename() {
        let xml = br#"<pmd><file name="./src/com/acme/Widget.java">
<violation beginline="9" endline="12" rule="UnusedLocalVariable" method="run" variable="tmp"/>
</file></pmd>"#;
        let set = parse_pmd_report(xml, Side::Pre).unwrap();
        let w = &set.warnings()[0];
        assert_eq!(w.file_path, "src/com/acme/Widget.java");
        assert_eq!(w.class_name, "Widget");
        assert_eq!(w.method_name, "run");
        assert_eq!(w.field_name, "tmp");
    }

    #[test]
    fn missing_rule_is_reported_with_element() {
        let xml =
            br#"<pmd><file name="A.java"><violation beginline="3" endline="3"/></file></pmd>"#;
        match parse_pmd_report(xml, Side::Pre) {
            Err(Error::MissingAttribute {
                element,
                attribute,
                offset,
            }) => {
                assert_eq!(element, "violation");
                assert_eq!(attribute, "rule");
                assert!(offset > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_xml() {
        assert!(matches!(
            parse_pmd_report(b"<pmd><file name=\"A.java\"></pmd>", Side::Pre),
            Err(Error::MalformedReport { .. })
        ));
        assert!(matches!(
            parse_pmd_report(b"<pmd><file name=\"A.java\">", Side::Pre),
            Err(Error::MalformedReport { .. })
        ));
        assert!(matches!(
            parse_pmd_report(b"<checkstyle/>", Side::Pre),
            Err(Error::MalformedReport { .. })
        ));
    }
}
