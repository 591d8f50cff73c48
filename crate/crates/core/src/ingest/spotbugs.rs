//! SpotBugs XML reports (`<BugCollection>` documents).
//!
//! Each `<BugInstance>` contributes one warning. Class, method and field come
//! from the child element marked `primary="true"` (else the first one). The
//! line range comes from the BugInstance's own `<SourceLine>` children
//! (primary, else first); when that carries no line numbers the primary
//! method's and then the primary class's `<SourceLine>` are tried.

use std::collections::HashMap;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::{attributes, line_attr, xml_error, ParseOptions};
use crate::error::{Error, Result};
use crate::model::{Side, WarningInstance, WarningSet};

pub fn parse_spotbugs_report(bytes: &[u8], side: Side) -> Result<WarningSet> {
    parse_spotbugs_report_with(bytes, side, &ParseOptions::default())
}

type Attrs = HashMap<String, String>;

#[derive(Default)]
struct Element {
    attrs: Attrs,
    source_line: Option<(Attrs, u64)>,
}

impl Element {
    fn is_primary(&self) -> bool {
        self.attrs.get("primary").map(String::as_str) == Some("true")
    }
}

#[derive(Default)]
struct Bug {
    offset: u64,
    attrs: Attrs,
    classes: Vec<Element>,
    methods: Vec<Element>,
    fields: Vec<Element>,
    source_lines: Vec<(Attrs, u64)>,
}

fn pick(elems: &[Element]) -> Option<&Element> {
    elems
        .iter()
        .find(|e| e.is_primary())
        .or_else(|| elems.first())
}

impl Bug {
    fn into_warning(self, side: Side, opts: &ParseOptions) -> Result<WarningInstance> {
        let warning_type =
            self.attrs
                .get("type")
                .cloned()
                .ok_or_else(|| Error::MissingAttribute {
                    element: "BugInstance".into(),
                    attribute: "type".into(),
                    offset: self.offset,
                })?;
        let class = pick(&self.classes);
        let method = pick(&self.methods);
        let field = pick(&self.fields);

        let direct = self
            .source_lines
            .iter()
            .find(|(a, _)| a.get("primary").map(String::as_str) == Some("true"))
            .or_else(|| self.source_lines.first());
        let candidates = [
            direct,
            method.and_then(|m| m.source_line.as_ref()),
            class.and_then(|c| c.source_line.as_ref()),
        ];
        let chosen = candidates
            .iter()
            .flatten()
            .find(|(a, _)| a.contains_key("start") && a.contains_key("sourcepath"));
        let (sl, sl_offset) = match chosen {
            Some((a, off)) => (a, *off),
            None => {
                // report against the element we would have used
                let (attrs, off) = candidates
                    .iter()
                    .flatten()
                    .next()
                    .map(|(a, o)| (a, *o))
                    .ok_or_else(|| Error::MissingAttribute {
                        element: "BugInstance".into(),
                        attribute: "SourceLine".into(),
                        offset: self.offset,
                    })?;
                let missing = if attrs.contains_key("sourcepath") {
                    "start"
                } else {
                    "sourcepath"
                };
                return Err(Error::MissingAttribute {
                    element: "SourceLine".into(),
                    attribute: missing.into(),
                    offset: off,
                });
            }
        };
        let start = line_attr(sl, "SourceLine", "start", sl_offset)?;
        let end = if sl.contains_key("end") {
            line_attr(sl, "SourceLine", "end", sl_offset)?
        } else {
            start
        };
        let path = opts.relative_path(&sl["sourcepath"]);
        let attr = |e: Option<&Element>, key: &str| {
            e.and_then(|e| e.attrs.get(key).cloned())
                .unwrap_or_default()
        };
        let class_name = match class {
            Some(c) => c.attrs.get("classname").cloned().unwrap_or_default(),
            None => sl.get("classname").cloned().unwrap_or_default(),
        };
        Ok(WarningInstance::new(side, warning_type, &path, start, end)
            .with_project(opts.project.clone())
            .with_class(class_name)
            .with_method(attr(method, "name"))
            .with_field(attr(field, "name")))
    }
}

pub fn parse_spotbugs_report_with(
    bytes: &[u8],
    side: Side,
    opts: &ParseOptions,
) -> Result<WarningSet> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut saw_root = false;
    let mut bug: Option<Bug> = None;
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
                let name = e.name().as_ref().to_vec();
                if stack.is_empty() {
                    if name != b"BugCollection" {
                        return Err(xml_error(
                            offset,
                            format!(
                                "expected <BugCollection> root, found <{}>",
                                String::from_utf8_lossy(&name)
                            ),
                        ));
                    }
                    saw_root = true;
                }
                let parent = stack.last().map(Vec::as_slice);
                match (name.as_slice(), bug.as_mut()) {
                    (b"BugInstance", None) => {
                        bug = Some(Bug {
                            offset,
                            attrs: attributes(e, offset)?,
                            ..Bug::default()
                        });
                        if !is_start {
                            let b = bug.take().expect("just set");
                            warnings.push(b.into_warning(side, opts)?);
                        }
                    }
                    (b"Class", Some(b)) if parent == Some(b"BugInstance") => {
                        b.classes.push(Element {
                            attrs: attributes(e, offset)?,
                            ..Element::default()
                        });
                    }
                    (b"Method", Some(b)) if parent == Some(b"BugInstance") => {
                        b.methods.push(Element {
                            attrs: attributes(e, offset)?,
                            ..Element::default()
                        });
                    }
                    (b"Field", Some(b)) if parent == Some(b"BugInstance") => {
                        b.fields.push(Element {
                            attrs: attributes(e, offset)?,
                            ..Element::default()
                        });
                    }
                    (b"SourceLine", Some(b)) => {
                        let attrs = attributes(e, offset)?;
                        let owner = match parent {
                            Some(b"BugInstance") => None,
                            Some(b"Class") => b.classes.last_mut(),
                            Some(b"Method") => b.methods.last_mut(),
                            Some(b"Field") => b.fields.last_mut(),
                            _ => {
                                // SourceLines nested elsewhere (e.g. inside
                                // <Type>) do not describe the warning.
                                if is_start {
                                    stack.push(name);
                                }
                                buf.clear();
                                continue;
                            }
                        };
                        match owner {
                            None => b.source_lines.push((attrs, offset)),
                            Some(el) => {
                                if el.source_line.is_none() {
                                    el.source_line = Some((attrs, offset));
                                }
                            }
                        }
                    }
                    _ => {}
                }
                if is_start {
                    stack.push(name);
                }
            }
            Event::End(ref e) => {
                stack.pop();
                if e.name().as_ref() == b"BugInstance" {
                    if let Some(b) = bug.take() {
                        warnings.push(b.into_warning(side, opts)?);
                    }
                }
            }
            _ => {}
        }
        buf.clear();
    }
    if !saw_root {
        return Err(xml_error(0, "document has no <BugCollection> root element"));
    }
    if !stack.is_empty() {
        return Err(xml_error(
            reader.buffer_position(),
            "unexpected end of document inside an open element",
        ));
    }
    WarningSet::from_report_order(side, warnings)
}
