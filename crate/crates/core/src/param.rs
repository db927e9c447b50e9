//! Text form of Tadic parameters.
//!
//! ```text
//! param    := block ( "x" block )*
//! block    := "U(" name ":" degree "," d "," t ")" shift?
//!           | "P(" "U(" name ":" degree "," d "," t ")" "," rational ")"
//! shift    := "@" rational
//! rational := ["-"] int [ "/" int ]
//! name     := [A-Za-z_][A-Za-z0-9_]* ( "~" | "*" )?
//! ```
//!
//! A trailing `~` marks a contragredient label and `*` a self-dual one.
//! Whitespace is allowed between tokens.

use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::segment::{CuspidalLabel, SpehBlock, TadicBlock, TadicParameter, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        self.skip_ws();
        for (i, c) in lit.chars().enumerate() {
            if self.chars.get(self.pos + i) != Some(&c) {
                let at = self.pos;
                self.pos += i;
                let found = self.found();
                self.pos = at + i;
                return self.err(format!("expected {lit:?}, found {found}"));
            }
        }
        self.pos += lit.chars().count();
        Ok(())
    }

    fn found(&self) -> String {
        match self.chars.get(self.pos) {
            Some(c) => format!("{c:?}"),
            None => "end of input".into(),
        }
    }

    fn name(&mut self) -> Result<CuspidalLabel, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == '_' => self.pos += 1,
            _ => return self.err(format!("expected a label name, found {}", self.found())),
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let mut label = CuspidalLabel::new(name, 1);
        match self.chars.get(self.pos) {
            Some('~') => {
                self.pos += 1;
                label.dual = true;
            }
            Some('*') => {
                self.pos += 1;
                label = label.self_dual();
            }
            _ => {}
        }
        Ok(label)
    }

    fn digits(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(format!("expected an integer, found {}", self.found()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn positive(&mut self, what: &str) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let v = self.digits()?;
        if v == 0 || v > u32::MAX as i64 {
            self.pos = start;
            return self.err(format!("{what} must be a positive integer"));
        }
        Ok(v as u32)
    }

    fn rational(&mut self) -> Result<Q, ParseError> {
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let num = self.digits()?;
        let den = if self.peek() == Some('/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let d = self.digits()?;
            if d == 0 {
                self.pos = at;
                return self.err("zero denominator");
            }
            d
        } else {
            1
        };
        Ok(Q::new(if neg { -num } else { num }, den))
    }

    fn speh(&mut self) -> Result<SpehBlock, ParseError> {
        self.expect("U(")?;
        let mut rho = self.name()?;
        self.expect(":")?;
        rho.degree = self.positive("degree")?;
        self.expect(",")?;
        let d = self.positive("d")?;
        self.expect(",")?;
        let t = self.positive("t")?;
        self.expect(")")?;
        Ok(SpehBlock::new(rho, d, t, Q::zero()))
    }

    fn block(&mut self) -> Result<TadicBlock, ParseError> {
        match self.peek() {
            Some('U') => {
                let mut b = self.speh()?;
                if self.peek() == Some('@') {
                    self.pos += 1;
                    b.alpha = self.rational()?;
                }
                Ok(TadicBlock::plain(b))
            }
            Some('P') => {
                self.expect("P(")?;
                let mut b = self.speh()?;
                self.expect(",")?;
                b.alpha = self.rational()?;
                self.expect(")")?;
                Ok(TadicBlock::paired(b))
            }
            _ => self.err(format!("expected \"U(\" or \"P(\", found {}", self.found())),
        }
    }
}

pub fn parse_parameter(input: &str) -> Result<TadicParameter, ParseError> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
    };
    let mut blocks = vec![p.block()?];
    while p.peek().is_some() {
        p.expect("x")?;
        blocks.push(p.block()?);
    }
    Ok(TadicParameter::new(blocks))
}

fn write_speh(out: &mut String, b: &SpehBlock) {
    let mark = if b.rho.self_dual { "*" } else { "" };
    let _ = write!(out, "U({}{}:{},{},{})", b.rho.display_name(), mark, b.rho.degree, b.d, b.t);
}

pub fn format_block(b: &TadicBlock) -> String {
    let mut s = String::new();
    if b.paired {
        s.push_str("P(");
        write_speh(&mut s, &b.block);
        let _ = write!(s, ",{})", b.block.alpha);
    } else {
        write_speh(&mut s, &b.block);
        let _ = write!(s, "@{}", b.block.alpha);
    }
    s
}

pub fn format_parameter(p: &TadicParameter) -> String {
    p.blocks().iter().map(format_block).collect::<Vec<_>>().join(" x ")
}

/// A bare product of Speh blocks written as plain blocks; empty products
/// print as `1`.
pub fn format_product(blocks: &[SpehBlock]) -> String {
    if blocks.is_empty() {
        return "1".into();
    }
    blocks
        .iter()
        .map(|b| format_block(&TadicBlock::plain(b.clone())))
        .collect::<Vec<_>>()
        .join(" x ")
}
