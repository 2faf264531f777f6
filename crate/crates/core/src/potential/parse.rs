use std::collections::HashMap;

use serde::Deserialize;

use super::{Potential, PotentialError};
use crate::exactmath::IntMat;

#[derive(Deserialize)]
struct MatrixForm {
    monomials: Vec<Vec<i64>>,
}

/// Parses a monomial sum such as `x1^3*x2 + x2^4`, the JSON form
/// `{"monomials": [[3,1],[0,4]]}` or the bare matrix `[[3,1],[0,4]]`.
/// Monomial order is preserved.
pub fn parse_potential(text: &str) -> Result<Potential, PotentialError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let json_err = |e: serde_json::Error| PotentialError::Syntax { pos: e.column().saturating_sub(1), msg: e.to_string() };
        let form: MatrixForm = if trimmed.starts_with('[') {
            MatrixForm { monomials: serde_json::from_str(trimmed).map_err(json_err)? }
        } else {
            serde_json::from_str(trimmed).map_err(json_err)?
        };
        let d = form.monomials.len();
        if let Some(bad) = form.monomials.iter().find(|r| r.len() != d) {
            return Err(PotentialError::NotSquare { monomials: d, variables: bad.len() });
        }
        if form.monomials.iter().flatten().any(|&a| a < 0) {
            return Err(PotentialError::Syntax { pos: 0, msg: "negative exponent".into() });
        }
        return Potential::from_matrix(IntMat::from_rows(&form.monomials));
    }
    let monomials = Parser { src: text.as_bytes(), pos: 0 }.expression()?;
    assemble(monomials)
}

type Monomial = Vec<(String, i64)>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, msg: impl Into<String>) -> PotentialError {
        PotentialError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn expression(&mut self) -> Result<Vec<Monomial>, PotentialError> {
        let mut out = vec![self.monomial()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    out.push(self.monomial()?);
                }
                None => return Ok(out),
                Some(c) => return Err(self.error(format!("unexpected character {:?}", c as char))),
            }
        }
    }

    fn monomial(&mut self) -> Result<Monomial, PotentialError> {
        let mut out = vec![self.factor()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            out.push(self.factor()?);
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<(String, i64), PotentialError> {
        let name = self.identifier()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            if e == 0 {
                return Err(self.error("exponent must be positive"));
            }
            Ok((name, e))
        } else {
            Ok((name, 1))
        }
    }

    fn identifier(&mut self) -> Result<String, PotentialError> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            Some(c) => return Err(self.error(format!("expected variable, found {:?}", c as char))),
            None => return Err(self.error("expected variable, found end of input")),
        }
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn integer(&mut self) -> Result<i64, PotentialError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected exponent"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PotentialError::Syntax { pos: start, msg: "exponent out of range".into() })
    }
}

/// `x<k>` index, if the name has that shape.
fn numbered(name: &str) -> Option<u64> {
    name.strip_prefix('x').filter(|s| !s.is_empty()).and_then(|s| s.parse().ok())
}

fn assemble(monomials: Vec<Monomial>) -> Result<Potential, PotentialError> {
    let mut names: Vec<String> = Vec::new();
    for (name, _) in monomials.iter().flatten() {
        if !names.contains(name) {
            names.push(name.clone());
        }
    }
    if names.iter().all(|n| numbered(n).is_some()) {
        names.sort_by_key(|n| numbered(n));
    }
    let d = names.len();
    if monomials.len() != d {
        return Err(PotentialError::NotSquare { monomials: monomials.len(), variables: d });
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut rows = vec![vec![0i64; d]; d];
    for (row, mono) in rows.iter_mut().zip(&monomials) {
        for (name, e) in mono {
            row[index[name.as_str()]] += e;
        }
    }
    Potential::with_names(IntMat::from_rows(&rows), names)
}
