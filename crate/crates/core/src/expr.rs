//! Constant expressions for numeric command-line input: decimals, `p/q`
//! fractions, `+ - * /`, parentheses and `sqrt(...)`.

use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.src[self.pos..].chars().find(|c| !c.is_whitespace())
    }

    fn bump(&mut self) -> Option<char> {
        let rest = &self.src[self.pos..];
        let skipped = rest.len() - rest.trim_start().len();
        self.pos += skipped;
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<f64> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc += self.term()?;
                }
                Some('-' | '−') => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*' | '·') => {
                    self.bump();
                    acc *= self.unary()?;
                }
                Some('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs == 0.0 {
                        return Err(self.error("division by zero"));
                    }
                    acc /= rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        match self.peek() {
            Some('-' | '−') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.bump();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let v = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = self.src[self.pos..].trim_start();
                self.pos = self.src.len() - rest.len();
                let name: String = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphabetic())
                    .collect();
                self.pos += name.len();
                if name != "sqrt" {
                    return Err(self.error(&format!("unknown function {name:?}")));
                }
                let v = self.atom()?;
                if v < 0.0 {
                    return Err(self.error("square root of a negative number"));
                }
                Ok(v.sqrt())
            }
            _ => Err(self.error("expected a number")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let rest = self.src[self.pos..].trim_start();
        self.pos = self.src.len() - rest.len();
        let mut len = 0;
        let bytes = rest.as_bytes();
        while len < bytes.len() {
            let b = bytes[len];
            let exponent_sign =
                len > 0 && (b == b'-' || b == b'+') && matches!(bytes[len - 1], b'e' | b'E');
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exponent_sign {
                len += 1;
            } else {
                break;
            }
        }
        let text = &rest[..len];
        self.pos += len;
        text.parse::<f64>()
            .map_err(|_| self.error(&format!("bad number {text:?}")))
    }
}

/// Evaluates a constant expression such as `1/4 - (3 + sqrt(33))/24`.
pub fn eval(src: &str) -> Result<f64> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    if !v.is_finite() {
        return Err(Error::Parse(format!("{src:?} is not finite")));
    }
    Ok(v)
}

/// Parses a comma-separated list of expressions.
pub fn eval_list(src: &str) -> Result<Vec<f64>> {
    let src = src.trim().trim_start_matches('[').trim_end_matches(']');
    if src.trim().is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    split_top_level(src).into_iter().map(eval).collect()
}

/// Splits on commas outside parentheses.
fn split_top_level(src: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&src[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&src[start..]);
    out
}
