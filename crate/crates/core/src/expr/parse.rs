//! Recursive-descent parser for the expression grammar in `docs/grammar.md`.

use super::{Branch, Expr, LinearGuard, ParseError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Amp,
    Le,
    Ge,
    Lt,
    Gt,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Eof => "end of input".into(),
            other => format!("{other:?}"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b';' => Some(Tok::Semi),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        match c {
            b'&' => {
                i += 1;
                if i < bytes.len() && bytes[i] == b'&' {
                    i += 1;
                }
                out.push((Tok::Amp, start));
            }
            b'<' | b'>' => {
                let eq = i + 1 < bytes.len() && bytes[i + 1] == b'=';
                let t = match (c, eq) {
                    (b'<', true) => Tok::Le,
                    (b'<', false) => Tok::Lt,
                    (_, true) => Tok::Ge,
                    (_, false) => Tok::Gt,
                };
                i += if eq { 2 } else { 1 };
                out.push((t, start));
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s
                    .parse()
                    .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number {s:?}") })?;
                if !v.is_finite() {
                    return Err(ParseError::Syntax { offset: start, message: format!("number {s:?} overflows") });
                }
                out.push((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { offset: start, message: format!("unexpected character {ch:?}") });
            }
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dimension: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, t: Tok, expected: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat(&Tok::Plus) {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.eat(&Tok::Caret) {
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parens = self.eat(&Tok::LParen);
        let negative = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let off = self.offset();
        let v = match *self.peek() {
            Tok::Num(v) => v,
            _ => return Err(self.unexpected("integer exponent")),
        };
        self.bump();
        if v.fract() != 0.0 || v > i32::MAX as f64 {
            return Err(ParseError::Syntax {
                offset: off,
                message: format!("exponent {v} is not an integer (use sqrt for fractional powers)"),
            });
        }
        if parens {
            self.expect(Tok::RParen, "')'")?;
        }
        let n = v as i32;
        Ok(if negative { -n } else { n })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.ident(name, off)
            }
            _ => Err(self.unexpected("a number, variable, function or '('")),
        }
    }

    fn ident(&mut self, name: String, off: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "sqrt" | "abs" => {
                let args = self.call_args()?;
                if args.len() != 1 {
                    return Err(ParseError::Arity { name, expected: 1, found: args.len(), offset: off });
                }
                let a = Box::new(args.into_iter().next().expect("one argument"));
                Ok(if name == "sqrt" { Expr::Sqrt(a) } else { Expr::Abs(a) })
            }
            "pw" => self.piecewise(),
            _ => match variable_index(&name) {
                Some(i) if i >= 1 && i <= self.dimension => Ok(Expr::Var(i - 1)),
                _ => Err(ParseError::UnknownIdentifier { name, offset: off }),
            },
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RParen, "',' or ')'")?;
            return Ok(args);
        }
    }

    fn piecewise(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LBracket, "'[' after pw")?;
        let mut branches = Vec::new();
        loop {
            let mut guard = vec![self.comparison()?];
            while self.eat(&Tok::Amp) {
                guard.push(self.comparison()?);
            }
            self.expect(Tok::Colon, "'&' or ':'")?;
            let body = self.expr()?;
            branches.push(Branch { guard, body });
            if self.eat(&Tok::Semi) {
                if self.eat(&Tok::RBracket) {
                    break;
                }
                continue;
            }
            self.expect(Tok::RBracket, "';' or ']'")?;
            break;
        }
        Ok(Expr::Piecewise(branches))
    }

    fn comparison(&mut self) -> Result<LinearGuard, ParseError> {
        let off = self.offset();
        let lhs = self.expr()?;
        let flip = match self.peek() {
            Tok::Le | Tok::Lt => false,
            Tok::Ge | Tok::Gt => true,
            _ => return Err(self.unexpected("a comparison (<=, >=, <, >)")),
        };
        self.bump();
        let rhs = self.expr()?;
        let (small, large) = if flip { (rhs, lhs) } else { (lhs, rhs) };
        let n = self.dimension;
        let nonlinear = || ParseError::Syntax { offset: off, message: "piecewise guards must be linear".into() };
        let (a_s, c_s) = small.affine(n).ok_or_else(nonlinear)?;
        let (a_l, c_l) = large.affine(n).ok_or_else(nonlinear)?;
        // small <= large  <=>  (a_s - a_l)·x <= c_l - c_s ; "+ 0.0" clears negative zeros
        let coeffs = a_s.iter().zip(&a_l).map(|(s, l)| (s - l) + 0.0).collect();
        let bound = (c_l - c_s) + 0.0;
        Ok(LinearGuard { coeffs, bound })
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

pub(super) fn parse(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, dimension };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}
