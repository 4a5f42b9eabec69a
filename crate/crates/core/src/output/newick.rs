use thiserror::Error;

use super::fmt_num;
use crate::hac::Dendrogram;

fn needs_quotes(label: &str) -> bool {
    label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,_".contains(c))
}

fn quote(label: &str) -> String {
    if needs_quotes(label) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Rooted Newick. A child's branch length is its parent's merge height
/// minus its own (zero for leaves); centroid inversions give negative
/// lengths, written unchanged. Children appear in order of their smallest
/// leaf index.
pub fn to_newick(dendrogram: &Dendrogram) -> String {
    fn write(d: &Dendrogram, id: usize, out: &mut String) {
        match d.ordered_children(id) {
            None => out.push_str(&quote(&d.labels[id])),
            Some(pair) => {
                let height = d.height(id);
                out.push('(');
                for (i, child) in pair.into_iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write(d, child, out);
                    out.push(':');
                    out.push_str(&fmt_num(height - d.height(child)));
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    write(dendrogram, dendrogram.root(), &mut out);
    out.push(';');
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("newick: {message} at byte {offset}")]
pub struct NewickError {
    pub message: String,
    pub offset: usize,
}

/// Parsed Newick node.
#[derive(Debug, Clone, PartialEq)]
pub struct NewickNode {
    pub label: Option<String>,
    pub length: Option<f64>,
    pub children: Vec<NewickNode>,
}

impl NewickNode {
    /// Leaf labels in left-to-right order.
    pub fn leaves(&self) -> Vec<&str> {
        if self.children.is_empty() {
            return self.label.as_deref().into_iter().collect();
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> NewickError {
        NewickError {
            message: message.to_string(),
            offset: self.pos,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn node(&mut self) -> Result<NewickNode, NewickError> {
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.node()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        let label = self.label()?;
        let length = if self.peek() == Some(b':') {
            self.pos += 1;
            let start = self.pos;
            while matches!(self.peek(), Some(c) if !b",);".contains(&c)) {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
            Some(text.parse().map_err(|_| self.err("bad branch length"))?)
        } else {
            None
        };
        Ok(NewickNode {
            label,
            length,
            children,
        })
    }

    fn label(&mut self) -> Result<Option<String>, NewickError> {
        if self.peek() == Some(b'\'') {
            self.pos += 1;
            let mut out = Vec::new();
            loop {
                match self.peek() {
                    None => return Err(self.err("unterminated quoted label")),
                    Some(b'\'') if self.src.get(self.pos + 1) == Some(&b'\'') => {
                        out.push(b'\'');
                        self.pos += 2;
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                }
            }
            return String::from_utf8(out)
                .map(Some)
                .map_err(|_| self.err("label is not utf-8"));
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if !b"(),:;".contains(&c)) {
            self.pos += 1;
        }
        if self.pos == start {
            return Ok(None);
        }
        let raw = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.err("label is not utf-8"))?;
        Ok(Some(raw.replace('_', " ")))
    }
}

/// Reads a single rooted Newick tree.
pub fn parse_newick(text: &str) -> Result<NewickNode, NewickError> {
    let mut p = Parser {
        src: text.trim().as_bytes(),
        pos: 0,
    };
    let root = p.node()?;
    if p.peek() != Some(b';') {
        return Err(p.err("expected `;`"));
    }
    p.pos += 1;
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(root)
}
