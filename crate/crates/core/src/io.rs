//! Text encodings: graph6 and the `n; u-v, u-v` edge list.
//!
//! graph6 follows the de-facto standard: the vertex count as one byte
//! `n + 63` (or `~` plus three 6-bit bytes for `n >= 63`), then the upper
//! triangle of the adjacency matrix in column order `(0,1), (0,2), (1,2),
//! (0,3), ...`, packed big-endian into 6-bit groups, zero-padded, each
//! group offset by 63.

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_VERTICES};

const HEADER: &str = ">>graph6<<";

fn parse_err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        offset,
        message: message.into(),
    })
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = Vec::new();
    if n < 63 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut bits = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            bits += 1;
            if bits == 6 {
                out.push(acc + 63);
                acc = 0;
                bits = 0;
            }
        }
    }
    if bits > 0 {
        out.push((acc << (6 - bits)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

pub fn from_graph6(line: &str) -> Result<Graph> {
    let (body, base) = match line.strip_prefix(HEADER) {
        Some(rest) => (rest, HEADER.len()),
        None => (line, 0),
    };
    let bytes = body.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return parse_err(base + i, format!("byte 0x{b:02x} outside the graph6 range"));
        }
    }
    let Some(&first) = bytes.first() else {
        return parse_err(base, "empty graph6 string");
    };
    let (n, mut pos) = if first == 126 {
        if bytes.get(1) == Some(&126) {
            return parse_err(
                base + 1,
                "graphs with more than 258047 vertices are not supported",
            );
        }
        if bytes.len() < 4 {
            return parse_err(base + bytes.len(), "truncated vertex count");
        }
        let n = bytes[1..4]
            .iter()
            .fold(0usize, |acc, &b| acc << 6 | (b - 63) as usize);
        (n, 4)
    } else {
        ((first - 63) as usize, 1)
    };
    if n > MAX_VERTICES {
        return parse_err(
            base,
            format!("{n} vertices exceeds the cap of {MAX_VERTICES}"),
        );
    }
    let total_bits = n * n.saturating_sub(1) / 2;
    let needed = total_bits.div_ceil(6);
    if bytes.len() - pos != needed {
        let at = base + (pos + needed).min(bytes.len());
        return parse_err(
            at,
            format!(
                "expected {needed} adjacency bytes for {n} vertices, found {}",
                bytes.len() - pos
            ),
        );
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = bytes[pos + k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    pos += needed;
    if total_bits % 6 != 0 {
        let last = bytes[pos - 1] - 63;
        let pad = 6 - total_bits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return parse_err(base + pos - 1, "non-zero padding bits");
        }
    }
    Graph::from_edges(n, &edges)
}

pub fn to_edge_list(g: &Graph) -> String {
    g.to_string()
}

/// Parses `n; u-v, u-v, ...`. Whitespace is free; the edge list may be empty.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let Some(semi) = text.find(';') else {
        return parse_err(text.len(), "missing ';' after the vertex count");
    };
    let head = &text[..semi];
    let n: usize = match head.trim().parse() {
        Ok(n) => n,
        Err(_) => return parse_err(0, format!("bad vertex count {:?}", head.trim())),
    };
    if n > MAX_VERTICES {
        return parse_err(0, format!("{n} vertices exceeds the cap of {MAX_VERTICES}"));
    }
    let mut edges = Vec::new();
    let mut offset = semi + 1;
    for item in text[semi + 1..].split(',') {
        let here = offset;
        offset += item.len() + 1;
        if item.trim().is_empty() {
            if text[semi + 1..].trim().is_empty() {
                continue;
            }
            return parse_err(here, "empty edge");
        }
        let Some((a, b)) = item.split_once('-') else {
            return parse_err(
                here,
                format!("edge {:?} is not of the form u-v", item.trim()),
            );
        };
        let (Ok(u), Ok(v)) = (a.trim().parse::<usize>(), b.trim().parse::<usize>()) else {
            return parse_err(
                here,
                format!("edge {:?} has a non-numeric endpoint", item.trim()),
            );
        };
        if u >= n || v >= n || u == v {
            return parse_err(here, format!("edge {u}-{v} invalid for {n} vertices"));
        }
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// One line of input: edge list when it contains `;`, graph6 otherwise.
pub fn parse_graph_line(line: &str) -> Result<Graph> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.contains(';') {
        parse_edge_list(line)
    } else {
        from_graph6(line.trim())
    }
}
