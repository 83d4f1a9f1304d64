use num_complex::Complex64;
use thiserror::Error;

use super::{eval, MapExpr, SymbolMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at column {}: {message}", position + 1)]
    Syntax { position: usize, message: String },
    #[error("expected {expected} component expressions, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable z{index} at column {} is outside 1..={dim}", position + 1)]
    VariableOutOfRange { index: usize, dim: usize, position: usize },
    #[error("mob parameter at column {} has modulus {modulus}, must be < 1", position + 1)]
    MobParameter { modulus: f64, position: usize },
}

impl ParseError {
    /// Byte offset into the source, where one applies.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::VariableOutOfRange { position, .. }
            | ParseError::MobParameter { position, .. } => Some(*position),
            ParseError::DimensionMismatch { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Real(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Semi,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Real(x) => format!("number {x}"),
            Token::Imag(x) => format!("imaginary number {x}i"),
            Token::Ident(s) => format!("'{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Comma => "','".into(),
            Token::Semi => "';'".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let simple = match b {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b',' => Some(Token::Comma),
            b';' => Some(Token::Semi),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() || b == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when digits follow, so "2exp(z1)" is not swallowed
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
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("malformed number '{text}'")))?;
            if !value.is_finite() {
                return Err(syntax(start, format!("number '{text}' is not finite")));
            }
            let imag = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
            if imag {
                i += 1;
                out.push((Token::Imag(value), start));
            } else {
                out.push((Token::Real(value), start));
            }
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(src[start..i].to_string()), start));
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(syntax(start, format!("unexpected character '{ch}'")));
        }
    }
    out.push((Token::End, src.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].0
    }

    fn position(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.position(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<MapExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = MapExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = MapExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<MapExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = MapExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = MapExpr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<MapExpr, ParseError> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(MapExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<MapExpr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Token::Real(x) => Ok(MapExpr::constant(x, 0.0)),
            Token::Imag(y) => Ok(MapExpr::constant(0.0, y)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Token::Ident(name) => self.ident(&name, pos),
            other => Err(syntax(pos, format!("unexpected {}", other.describe()))),
        }
    }

    fn ident(&mut self, name: &str, pos: usize) -> Result<MapExpr, ParseError> {
        if name == "i" {
            return Ok(MapExpr::constant(0.0, 1.0));
        }
        if let Some(digits) = name.strip_prefix('z') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits
                    .parse()
                    .map_err(|_| syntax(pos, format!("bad variable '{name}'")))?;
                if index == 0 || index > self.dim {
                    return Err(ParseError::VariableOutOfRange {
                        index,
                        dim: self.dim,
                        position: pos,
                    });
                }
                return Ok(MapExpr::Var(index - 1));
            }
        }
        match name {
            "pow" => {
                self.expect(Token::LParen)?;
                let base = self.expr()?;
                self.expect(Token::Comma)?;
                let (tok, kpos) = self.bump();
                let k = match tok {
                    Token::Real(k) if k >= 0.0 && k.fract() == 0.0 && k <= u32::MAX as f64 => k as u32,
                    other => {
                        return Err(syntax(
                            kpos,
                            format!("pow exponent must be a nonnegative integer, found {}", other.describe()),
                        ))
                    }
                };
                self.expect(Token::RParen)?;
                Ok(MapExpr::Pow(Box::new(base), k))
            }
            "mob" | "scale" => {
                self.expect(Token::LParen)?;
                let cpos = self.position();
                let c = self.constant()?;
                self.expect(Token::Comma)?;
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                if name == "mob" {
                    let modulus = c.norm();
                    if modulus >= 1.0 {
                        return Err(ParseError::MobParameter {
                            modulus,
                            position: cpos,
                        });
                    }
                    Ok(MapExpr::Mob(c, Box::new(e)))
                } else {
                    Ok(MapExpr::Scale(c, Box::new(e)))
                }
            }
            "exp" | "log" => {
                self.expect(Token::LParen)?;
                let e = Box::new(self.expr()?);
                self.expect(Token::RParen)?;
                Ok(if name == "exp" { MapExpr::Exp(e) } else { MapExpr::Log(e) })
            }
            "cplx" => {
                self.expect(Token::LParen)?;
                let re = self.signed_number()?;
                self.expect(Token::Comma)?;
                let im = self.signed_number()?;
                self.expect(Token::RParen)?;
                Ok(MapExpr::constant(re, im))
            }
            _ => Err(syntax(pos, format!("unknown name '{name}'"))),
        }
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let negative = *self.peek() == Token::Minus;
        if negative {
            self.bump();
        }
        let (tok, pos) = self.bump();
        match tok {
            Token::Real(x) => Ok(if negative { -x } else { x }),
            other => Err(syntax(pos, format!("expected a real number, found {}", other.describe()))),
        }
    }

    /// A variable-free expression, folded to its value.
    fn constant(&mut self) -> Result<num_complex::Complex64, ParseError> {
        let pos = self.position();
        let e = self.expr()?;
        if e.arity() > 0 {
            return Err(syntax(pos, "parameter must be a constant expression"));
        }
        let value: Complex64 = eval::eval_constant(&e)
            .map_err(|err| syntax(pos, format!("cannot fold parameter: {err}")))?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(syntax(pos, "parameter is not finite"));
        }
        Ok(value)
    }
}

/// Parses one scalar expression over `z1..z{dim}`.
pub fn parse_expr(source: &str, dim: usize) -> Result<MapExpr, ParseError> {
    let mut p = Parser {
        tokens: tokenize(source)?,
        cursor: 0,
        dim,
    };
    let e = p.expr()?;
    if *p.peek() != Token::End {
        return Err(syntax(
            p.position(),
            format!("unexpected {} after expression", p.peek().describe()),
        ));
    }
    Ok(e)
}

/// Parses a `;`-separated list of exactly `dim` component expressions.
pub fn parse_map(source: &str, dim: usize) -> Result<SymbolMap, ParseError> {
    let mut p = Parser {
        tokens: tokenize(source)?,
        cursor: 0,
        dim,
    };
    let mut components = vec![p.expr()?];
    loop {
        match p.peek() {
            Token::Semi => {
                p.bump();
                components.push(p.expr()?);
            }
            Token::End => break,
            other => {
                return Err(syntax(
                    p.position(),
                    format!("expected ';' or end of input, found {}", other.describe()),
                ))
            }
        }
    }
    let found = components.len();
    SymbolMap::new(dim, components).map_err(|_| ParseError::DimensionMismatch { expected: dim, found })
}

#[cfg(test)]
mod tests {
    use super::*;
    use MapExpr::*;

    fn b(e: MapExpr) -> Box<MapExpr> {
        Box::new(e)
    }

    #[test]
    fn identity_map() {
        let m = parse_map("z1; z2", 2).unwrap();
        assert_eq!(m.components(), &[Var(0), Var(1)]);
    }

    #[test]
    fn power_map() {
        let m = parse_map("pow(z1,2); z2", 2).unwrap();
        assert_eq!(m.components(), &[Pow(b(Var(0)), 2), Var(1)]);
    }

    #[test]
    fn mob_and_scale() {
        let m = parse_map("mob(0.5, z1); scale(0.5, z2)", 2).unwrap();
        assert_eq!(
            m.components(),
            &[
                Mob(Complex64::new(0.5, 0.0), b(Var(0))),
                Scale(Complex64::new(0.5, 0.0), b(Var(1)))
            ]
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse_expr("z1 - z2 - 1", 2).unwrap(),
            Sub(b(Sub(b(Var(0)), b(Var(1)))), b(MapExpr::constant(1.0, 0.0)))
        );
        assert_eq!(
            parse_expr("z1 + z2 * 2", 2).unwrap(),
            Add(b(Var(0)), b(Mul(b(Var(1)), b(MapExpr::constant(2.0, 0.0)))))
        );
        assert_eq!(
            parse_expr("z1 / 2 / 3", 1).unwrap(),
            Div(b(Div(b(Var(0)), b(MapExpr::constant(2.0, 0.0)))), b(MapExpr::constant(3.0, 0.0)))
        );
        // unary minus binds tighter than '*'
        assert_eq!(
            parse_expr("-z1 * z1", 1).unwrap(),
            Mul(b(Neg(b(Var(0)))), b(Var(0)))
        );
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_expr("0.5i", 1).unwrap(), MapExpr::constant(0.0, 0.5));
        assert_eq!(parse_expr("i", 1).unwrap(), MapExpr::constant(0.0, 1.0));
        assert_eq!(parse_expr("cplx(-0.3, 0.4)", 1).unwrap(), MapExpr::constant(-0.3, 0.4));
        assert_eq!(parse_expr("1e-3", 1).unwrap(), MapExpr::constant(1e-3, 0.0));
        assert_eq!(
            parse_expr("2exp(z1)", 1),
            Err(ParseError::Syntax {
                position: 1,
                message: "unexpected 'exp' after expression".into()
            })
        );
        let m = parse_expr("mob(0.3 + 0.4i, z1)", 1).unwrap();
        assert_eq!(m, Mob(Complex64::new(0.3, 0.4), b(Var(0))));
        let m = parse_expr("scale(-1/3, z1)", 1).unwrap();
        assert_eq!(m, Scale(Complex64::new(-1.0 / 3.0, 0.0), b(Var(0))));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_map("z1; z2 +", 2).unwrap_err();
        assert_eq!(err.position(), Some(8));
        let err = parse_map("z1 $ z2", 1).unwrap_err();
        assert_eq!(err.position(), Some(3));
        assert!(err.to_string().contains("column 4"));
        assert_eq!(
            parse_map("z1", 2),
            Err(ParseError::DimensionMismatch { expected: 2, found: 1 })
        );
        assert_eq!(
            parse_map("z1; z3", 2),
            Err(ParseError::VariableOutOfRange { index: 3, dim: 2, position: 4 })
        );
        assert!(matches!(parse_expr("z0", 2), Err(ParseError::VariableOutOfRange { index: 0, .. })));
        assert!(matches!(
            parse_expr("mob(1, z1)", 1),
            Err(ParseError::MobParameter { position: 4, .. })
        ));
        assert!(matches!(parse_expr("mob(0.8i + 0.7, z1)", 1), Err(ParseError::MobParameter { .. })));
        assert!(parse_expr("mob(z1, z1)", 1).is_err());
        assert!(parse_expr("pow(z1, 1.5)", 1).is_err());
        assert!(parse_expr("pow(z1, -1)", 1).is_err());
        assert!(parse_expr("sin(z1)", 1).is_err());
        assert!(parse_expr("(z1", 1).is_err());
        assert!(parse_expr("", 1).is_err());
        assert!(parse_expr("1e999", 1).is_err());
    }
}
