//! Text formats for functions (`.perm`) and networks (`.tofn`).
//!
//! ```text
//! # .perm
//! width 3
//! 1 0 3 2 5 7 4 6
//!
//! # .tofn
//! lines a,b,c
//! TOF(b;a)
//! TOF(a,c;b)
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::function::ReversibleFunction;
use crate::gate::{default_line_names, ToffoliGate};
use crate::network::Network;
use crate::MAX_WIDTH;

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_function(text: &str, width_cap: usize) -> Result<ReversibleFunction> {
    let mut width: Option<(usize, usize)> = None;
    let mut values: Vec<u32> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if width.is_none() {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("width") {
                return Err(Error::parse(line_no, "expected `width <n>`"));
            }
            let n: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(line_no, "expected `width <n>`"))?;
            if parts.next().is_some() {
                return Err(Error::parse(line_no, "trailing tokens after width"));
            }
            let cap = width_cap.min(MAX_WIDTH);
            if n == 0 || n > cap {
                return Err(Error::WidthOutOfRange { width: n, cap });
            }
            width = Some((n, line_no));
            continue;
        }
        for tok in line.split_whitespace() {
            let v: u32 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("`{tok}` is not an integer")))?;
            values.push(v);
        }
    }
    let (n, _) = width.ok_or_else(|| Error::parse(last_line.max(1), "missing `width` header"))?;
    if values.len() != 1 << n {
        return Err(Error::parse(
            last_line,
            format!("expected {} outputs, found {}", 1usize << n, values.len()),
        ));
    }
    ReversibleFunction::new(n, values)
}

pub fn format_function(f: &ReversibleFunction) -> String {
    let mut out = format!("width {}\n", f.width());
    for chunk in f.table().chunks(16) {
        let row: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// A network together with its line names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkFile {
    pub names: Vec<String>,
    pub network: Network,
}

impl NetworkFile {
    pub fn with_default_names(network: Network) -> Self {
        NetworkFile {
            names: default_line_names(network.width()),
            network,
        }
    }
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_gate(text: &str, names: &[String], line_no: usize) -> Result<ToffoliGate> {
    let body = text
        .strip_prefix("TOF(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::parse(line_no, format!("`{text}` is not of the form TOF(...)")))?;
    let lookup = |name: &str| -> Result<usize> {
        let name = name.trim();
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::parse(line_no, format!("unknown line `{name}`")))
    };
    let (controls, target) = match body.split_once(';') {
        Some((c, t)) => (c, t),
        // `TOF(a)` is accepted as the NOT gate.
        None => ("", body),
    };
    let mut mask = 0u32;
    for c in controls.split(',').filter(|c| !c.trim().is_empty()) {
        let idx = lookup(c)?;
        if mask & (1 << idx) != 0 {
            return Err(Error::parse(line_no, format!("control `{}` repeated", c.trim())));
        }
        mask |= 1 << idx;
    }
    let t = lookup(target)?;
    ToffoliGate::from_mask(mask, t).map_err(|e| Error::parse(line_no, e.to_string()))
}

pub fn format_gate(gate: &ToffoliGate, names: &[String]) -> String {
    let controls: Vec<&str> = gate.control_lines().map(|c| names[c].as_str()).collect();
    format!("TOF({};{})", controls.join(","), names[gate.target()])
}

pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let mut names: Option<Vec<String>> = None;
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        match &names {
            None => {
                let rest = line
                    .strip_prefix("lines")
                    .ok_or_else(|| Error::parse(line_no, "expected `lines a,b,c,...`"))?
                    .trim();
                let list: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
                if list.is_empty() || list.len() > MAX_WIDTH {
                    return Err(Error::parse(line_no, "line count out of range"));
                }
                for (i, n) in list.iter().enumerate() {
                    if !is_valid_name(n) {
                        return Err(Error::parse(line_no, format!("invalid line name `{n}`")));
                    }
                    if list[..i].contains(n) {
                        return Err(Error::parse(line_no, format!("duplicate line name `{n}`")));
                    }
                }
                names = Some(list);
            }
            Some(list) => gates.push(parse_gate(line, list, line_no)?),
        }
    }
    let names = names.ok_or_else(|| Error::parse(1, "missing `lines` header"))?;
    let network = Network::from_gates(names.len(), gates)?;
    Ok(NetworkFile { names, network })
}

pub fn format_network(file: &NetworkFile) -> String {
    let mut out = format!("lines {}\n", file.names.join(","));
    for g in file.network.gates() {
        let _ = writeln!(out, "{}", format_gate(g, &file.names));
    }
    out
}
