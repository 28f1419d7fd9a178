//! Complex expression language for custom fields.
//!
//! Variables: `z`, `zeta` (alias `ζ`, `w`), `xi` (alias `ξ`). Constants: `i`, `pi`, `e`.
//! Operators `+ - * / ^`, `|expr|` for modulus, functions `abs conj re im exp log sqrt arg sin cos`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Imag,
    Var(Var),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    Z,
    Slot,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Abs,
    Conj,
    Re,
    Im,
    Exp,
    Log,
    Sqrt,
    Arg,
    Sin,
    Cos,
}

/// Parsed expression in z and a second slot (ζ or ξ).
#[derive(Clone, Debug)]
pub struct Expr {
    root: Node,
    source: String,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let chars: Vec<(usize, char)> = src.char_indices().collect();
        let mut p = Parser { s: chars, pos: 0, bars: 0 };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(Self {
            root,
            source: src.to_string(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, z: Complex64, slot: Complex64) -> Complex64 {
        eval(&self.root, z, slot)
    }
}

fn eval(n: &Node, z: Complex64, s: Complex64) -> Complex64 {
    match n {
        Node::Num(v) => Complex64::new(*v, 0.0),
        Node::Imag => Complex64::new(0.0, 1.0),
        Node::Var(Var::Z) => z,
        Node::Var(Var::Slot) => s,
        Node::Neg(a) => -eval(a, z, s),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval(a, z, s), eval(b, z, s));
            match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                '/' => x / y,
                _ => {
                    if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() < 64.0 {
                        x.powi(y.re as i32)
                    } else if x.im == 0.0 && x.re >= 0.0 && y.im == 0.0 {
                        Complex64::new(x.re.powf(y.re), 0.0)
                    } else {
                        x.powc(y)
                    }
                }
            }
        }
        Node::Call(f, a) => {
            let x = eval(a, z, s);
            match f {
                Func::Abs => Complex64::new(x.norm(), 0.0),
                Func::Conj => x.conj(),
                Func::Re => Complex64::new(x.re, 0.0),
                Func::Im => Complex64::new(x.im, 0.0),
                Func::Exp => x.exp(),
                Func::Log => x.ln(),
                Func::Sqrt => x.sqrt(),
                Func::Arg => Complex64::new(x.arg(), 0.0),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
    }
}

struct Parser {
    s: Vec<(usize, char)>,
    pos: usize,
    bars: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> Error {
        let col = self.s.get(self.pos).map_or_else(
            || self.s.last().map_or(0, |(i, c)| i + c.len_utf8()),
            |(i, _)| *i,
        );
        Error::Parse {
            col: col + 1,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).map(|c| c.1)
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let saved = self.bars;
                self.bars = 0;
                let e = self.expr()?;
                self.bars = saved;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('|') => {
                self.pos += 1;
                self.bars += 1;
                let e = self.expr()?;
                self.bars -= 1;
                if self.peek() != Some('|') {
                    return Err(self.err("expected closing `|`"));
                }
                self.pos += 1;
                Ok(Node::Call(Func::Abs, Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos].1;
            let exp_sign = (c == '-' || c == '+')
                && self.pos > start
                && matches!(self.s[self.pos - 1].1, 'e' | 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.s[start..self.pos].iter().map(|c| c.1).collect();
        text.parse()
            .map(Node::Num)
            .map_err(|_| {
                self.pos = start;
                self.err("malformed number")
            })
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].1.is_alphanumeric() || self.s[self.pos].1 == '_') {
            self.pos += 1;
        }
        let name: String = self.s[start..self.pos].iter().map(|c| c.1).collect();
        let func = match name.as_str() {
            "z" => return Ok(Node::Var(Var::Z)),
            "zeta" | "ζ" | "w" | "xi" | "ξ" => return Ok(Node::Var(Var::Slot)),
            "i" => return Ok(Node::Imag),
            "pi" => return Ok(Node::Num(std::f64::consts::PI)),
            "e" => return Ok(Node::Num(std::f64::consts::E)),
            "abs" => Func::Abs,
            "conj" => Func::Conj,
            "re" => Func::Re,
            "im" => Func::Im,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "arg" => Func::Arg,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => {
                self.pos = start;
                return Err(self.err(&format!("unknown identifier `{name}`")));
            }
        };
        if self.peek() != Some('(') {
            return Err(self.err("expected `(` after function name"));
        }
        self.pos += 1;
        let saved = self.bars;
        self.bars = 0;
        let arg = self.expr()?;
        self.bars = saved;
        if self.peek() != Some(')') {
            return Err(self.err("expected `)`"));
        }
        self.pos += 1;
        Ok(Node::Call(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluates_power_field() {
        let e = Expr::parse("-0.2/1.8 * zeta^3/|zeta|^2").unwrap();
        let w = c(0.3, -0.4);
        let want = -0.2 / 1.8 * w * w * w / w.norm_sqr();
        assert!((e.eval(c(0.0, 0.0), w) - want).norm() < 1e-15);
    }

    #[test]
    fn functions_and_precedence() {
        let e = Expr::parse("conj(z) + 2*i*xi - re(z)^2 + exp(0)").unwrap();
        let z = c(0.5, 1.0);
        let x = c(2.0, 0.0);
        assert_eq!(e.eval(z, x), z.conj() + c(0.0, 4.0) - 0.25 + 1.0);
        let e = Expr::parse("2^-1 + 1e-3").unwrap();
        assert!((e.eval(z, x) - 0.501).norm() < 1e-15);
        let e = Expr::parse("|z - |xi||").unwrap();
        assert!((e.eval(c(3.0, 0.0), c(0.0, 1.0)).re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reports_columns() {
        match Expr::parse("z + foo(1)") {
            Err(Error::Parse { col, .. }) => assert_eq!(col, 5),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("(z").is_err());
        assert!(Expr::parse("z +").is_err());
    }
}
