//! S-expression text form of [`SmoothExpr`], used in reproducibility logs.
//!
//! Grammar: a number literal, or `(op args…)` with `op` one of
//! `x add sub mul neg pow sin cos exp sqrt recip sigma step blend`.

use crate::error::{Error, Result};

use super::expr::SmoothExpr;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn atom(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() || c == '(' || c == ')' {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return self.err("expected an atom");
        }
        Ok(&self.src[start..self.pos])
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let a = self.atom()?;
        a.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.err(format!("expected a number, found `{a}`"))
        })
    }

    fn integer(&mut self) -> Result<u32> {
        let a = self.atom()?;
        a.parse::<u32>()
            .or_else(|_| self.err(format!("expected a nonnegative integer, found `{a}`")))
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<SmoothExpr> {
        if self.peek() != Some('(') {
            return self.number().map(SmoothExpr::Const);
        }
        self.expect('(')?;
        let op_pos = self.pos;
        let op = self.atom()?;
        let node = match op {
            "x" => SmoothExpr::Coord(self.integer()? as usize),
            "add" => self.expr()? + self.expr()?,
            "sub" => self.expr()? - self.expr()?,
            "mul" => self.expr()? * self.expr()?,
            "neg" => -self.expr()?,
            "pow" => {
                let base = self.expr()?;
                base.pow(self.integer()?)
            }
            "sin" => self.expr()?.sin(),
            "cos" => self.expr()?.cos(),
            "exp" => self.expr()?.exp(),
            "sigma" => self.expr()?.sigma(),
            "sqrt" => {
                let arg = self.expr()?;
                arg.sqrt(self.number()?)
            }
            "recip" => {
                let arg = self.expr()?;
                arg.recip(self.number()?)
            }
            "step" => {
                let arg = self.expr()?;
                let lo = self.number()?;
                arg.step(lo, self.number()?)
            }
            "blend" => {
                let w = self.expr()?;
                let a = self.expr()?;
                SmoothExpr::blend(w, a, self.expr()?)
            }
            other => {
                self.pos = op_pos;
                return self.err(format!("unknown operator `{other}`"));
            }
        };
        self.expect(')')?;
        Ok(node)
    }
}

/// Parse the text produced by `SmoothExpr`'s `Display`.
pub fn parse(src: &str) -> Result<SmoothExpr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl std::str::FromStr for SmoothExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}
