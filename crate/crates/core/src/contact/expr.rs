//! A small arithmetic language for user-supplied conformal factors.
//!
//! Grammar: `+ - * / ^`, parentheses, numbers, `pi`, the functions
//! `exp log sqrt sin cos`, chart variables `x1 y1 ... t` and ambient
//! variables `u0 v0 ...` (real and imaginary parts of the sphere point).

use crate::error::{Error, Result};
use crate::jets::Jet;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X(usize),
    Y(usize),
    T,
    U(usize),
    V(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Bin(Op::Add, Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Bin(Op::Sub, Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Bin(Op::Mul, Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Bin(Op::Div, Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            // right associative, binds tighter than unary minus on the left
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(f) = func(&name) {
                    if !self.eat('(') {
                        return Err(Error::Parse(format!("'{name}' needs an argument")));
                    }
                    let e = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::Parse("missing ')'".into()));
                    }
                    return Ok(Expr::Call(f, Box::new(e)));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                Ok(Expr::Var(var(&name)?))
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

fn func(name: &str) -> Option<Func> {
    Some(match name {
        "exp" => Func::Exp,
        "log" | "ln" => Func::Log,
        "sqrt" => Func::Sqrt,
        "sin" => Func::Sin,
        "cos" => Func::Cos,
        _ => return None,
    })
}

fn var(name: &str) -> Result<Var> {
    if name == "t" {
        return Ok(Var::T);
    }
    let (head, tail) = name.split_at(1);
    let idx: usize = tail
        .parse()
        .map_err(|_| Error::Parse(format!("unknown identifier '{name}'")))?;
    match head {
        "x" if idx >= 1 => Ok(Var::X(idx - 1)),
        "y" if idx >= 1 => Ok(Var::Y(idx - 1)),
        "u" => Ok(Var::U(idx)),
        "v" => Ok(Var::V(idx)),
        _ => Err(Error::Parse(format!("unknown identifier '{name}'"))),
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Variable values available to an evaluation.
pub struct Env<'a> {
    pub chart: &'a [Jet],
    /// `(re, im)` of every ambient coordinate.
    pub ambient: &'a [(Jet, Jet)],
}

impl Expr {
    pub fn eval(&self, env: &Env<'_>) -> Result<Jet> {
        let proto = &env.chart[0];
        Ok(match self {
            Expr::Num(v) => proto.splat(*v),
            Expr::Var(v) => {
                let m = (env.chart.len() - 1) / 2;
                match *v {
                    Var::X(a) if a < m => env.chart[2 * a].clone(),
                    Var::Y(a) if a < m => env.chart[2 * a + 1].clone(),
                    Var::T => env.chart[2 * m].clone(),
                    Var::U(j) if j < env.ambient.len() => env.ambient[j].0.clone(),
                    Var::V(j) if j < env.ambient.len() => env.ambient[j].1.clone(),
                    other => return Err(Error::Parse(format!("variable {other:?} out of range"))),
                }
            }
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(env)?;
                match op {
                    Op::Add => x + b.eval(env)?,
                    Op::Sub => x - b.eval(env)?,
                    Op::Mul => x * b.eval(env)?,
                    Op::Div => x.try_div(&b.eval(env)?)?,
                    Op::Pow => match b.as_ref() {
                        Expr::Num(k) if k.fract() == 0.0 && k.abs() <= 64.0 => {
                            let p = x.powi(k.abs() as u32);
                            if *k < 0.0 {
                                p.recip()?
                            } else {
                                p
                            }
                        }
                        Expr::Num(k) => x.powf(*k)?,
                        other => (other.eval(env)? * x.ln()?).exp(),
                    },
                }
            }
            Expr::Call(f, e) => {
                let x = e.eval(env)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => x.ln()?,
                    Func::Sqrt => x.sqrt()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                }
            }
        })
    }
}
