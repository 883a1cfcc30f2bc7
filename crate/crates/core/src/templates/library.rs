use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::{Template, TemplateGate};

/// Templates sorted by size, with the matching data derived from them.
#[derive(Clone, Debug, Default)]
pub struct TemplateLibrary {
    templates: Vec<Template>,
    sequences: Vec<Vec<Vec<usize>>>,
    class_masks: Vec<u32>,
}

impl TemplateLibrary {
    pub fn new(mut templates: Vec<Template>) -> Self {
        templates.sort_by_key(|t| t.size());
        let mut lib = TemplateLibrary::default();
        for t in templates {
            lib.push(t);
        }
        lib
    }

    /// Adds a template, keeping the size order.
    pub fn push(&mut self, t: Template) {
        let pos = self.templates.partition_point(|x| x.size() <= t.size());
        self.sequences.insert(pos, t.oriented_sequences());
        self.class_masks.insert(pos, t.class_closure().iter().fold(0, |a, v| a | v));
        self.templates.insert(pos, t);
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn max_size(&self) -> usize {
        self.templates.last().map_or(0, |t| t.size())
    }

    /// The templates of size at most `max_size`.
    pub fn up_to(&self, max_size: usize) -> TemplateLibrary {
        TemplateLibrary::new(self.templates.iter().filter(|t| t.size() <= max_size).cloned().collect())
    }

    pub(crate) fn sequences(&self, idx: usize) -> &[Vec<usize>] {
        &self.sequences[idx]
    }

    /// Gates that carry at least one class control.
    pub(crate) fn class_mask(&self, idx: usize) -> u32 {
        self.class_masks[idx]
    }

    /// Checks every template for the identity property.
    pub fn verify(&self) -> Result<()> {
        for (i, t) in self.templates.iter().enumerate() {
            if !t.verify() {
                return Err(Error::Template(format!("template {} is not an identity:\n{t}", i + 1)));
            }
        }
        Ok(())
    }
}

fn parse_index(tok: &str, prefix: char, limit: usize, line: usize) -> Result<usize> {
    tok.strip_prefix(prefix)
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&k| k >= 1 && k <= limit)
        .map(|k| k - 1)
        .ok_or_else(|| Error::parse(line, format!("bad line reference `{tok}`")))
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize, usize)> {
    let err = || Error::parse(line_no, "expected `template m=<size> lines=<t>,<c>`");
    let mut parts = line.split_whitespace();
    if parts.next() != Some("template") {
        return Err(err());
    }
    let m: usize = parts
        .next()
        .and_then(|p| p.strip_prefix("m="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(err)?;
    let (t, c) = parts
        .next()
        .and_then(|p| p.strip_prefix("lines="))
        .and_then(|v| v.split_once(','))
        .ok_or_else(err)?;
    let t: usize = t.parse().map_err(|_| err())?;
    let c: usize = c.parse().map_err(|_| err())?;
    if parts.next().is_some() {
        return Err(err());
    }
    Ok((m, t, c))
}

pub fn parse_library(text: &str) -> Result<TemplateLibrary> {
    struct Pending {
        header_line: usize,
        m: usize,
        t: usize,
        gates: Vec<TemplateGate>,
        classes: Vec<u32>,
    }
    let mut templates = Vec::new();
    let mut cur: Option<Pending> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match cur.as_mut() {
            None => {
                let (m, t, c) = parse_header(line, line_no)?;
                cur = Some(Pending {
                    header_line: line_no,
                    m,
                    t,
                    gates: Vec::new(),
                    classes: vec![0; c],
                });
            }
            Some(p) => {
                if let Some(rest) = line.strip_prefix("reducible-cycles:") {
                    if p.gates.len() != p.m {
                        return Err(Error::parse(
                            line_no,
                            format!("template declares {} gates but lists {}", p.m, p.gates.len()),
                        ));
                    }
                    let mut red = Vec::new();
                    for tok in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let r: usize = tok
                            .parse()
                            .ok()
                            .filter(|&r| r < p.m)
                            .ok_or_else(|| Error::parse(line_no, format!("bad cycle index `{tok}`")))?;
                        red.push(r);
                    }
                    let p = cur.take().expect("inside a template");
                    let tpl = Template::new(p.t, p.gates, p.classes)
                        .map_err(|e| Error::parse(p.header_line, e.to_string()))?
                        .with_reducible(red);
                    templates.push(tpl);
                    continue;
                }
                let gi = p.gates.len();
                if gi >= p.m || gi >= super::MAX_TEMPLATE_SIZE {
                    return Err(Error::parse(line_no, "more gates than declared"));
                }
                let body = line
                    .strip_prefix("TOF(")
                    .and_then(|s| s.strip_suffix(')'))
                    .and_then(|s| s.split_once(';'))
                    .ok_or_else(|| Error::parse(line_no, format!("`{line}` is not a template gate")))?;
                let target = parse_index(body.1.trim(), 't', p.t, line_no)?;
                let mut t_controls = 0u32;
                for tok in body.0.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    if tok.starts_with('t') {
                        let u = parse_index(tok, 't', p.t, line_no)?;
                        if u == target {
                            return Err(Error::parse(line_no, "target repeated as control"));
                        }
                        t_controls |= 1 << u;
                    } else {
                        let c = parse_index(tok, 'C', p.classes.len(), line_no)?;
                        p.classes[c] |= 1 << gi;
                    }
                }
                p.gates.push(TemplateGate { t_controls, target });
            }
        }
    }
    if let Some(p) = cur {
        return Err(Error::parse(p.header_line, "template missing `reducible-cycles:` footer"));
    }
    Ok(TemplateLibrary::new(templates))
}

pub fn format_library(lib: &TemplateLibrary) -> String {
    lib.templates().iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n")
}

const SHIPPED: &str = include_str!("../../data/templates.txt");

/// The shipped library, parsed and verified once.
pub fn default_library() -> &'static TemplateLibrary {
    static LIB: OnceLock<TemplateLibrary> = OnceLock::new();
    LIB.get_or_init(|| {
        let lib = parse_library(SHIPPED).expect("shipped template library parses");
        lib.verify().expect("shipped templates realize the identity");
        lib
    })
}
