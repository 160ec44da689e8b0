//! A small arithmetic-expression evaluator for user curve configs.
//!
//! Grammar: numbers, the parameter `s`, `pi`, unary minus, `+ - * / ^`,
//! parentheses, and the functions sin, cos, tan, sinh, cosh, tanh, exp,
//! log, sqrt, abs. Expressions are parsed once into an AST and evaluated
//! per point.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expression(0)?;
        if p.pos != p.tokens.len() {
            return Err(Error::Config(format!(
                "trailing input in expression {src:?}"
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => s,
            Expr::Neg(e) => -e.eval(s),
            Expr::Add(a, b) => a.eval(s) + b.eval(s),
            Expr::Sub(a, b) => a.eval(s) - b.eval(s),
            Expr::Mul(a, b) => a.eval(s) * b.eval(s),
            Expr::Div(a, b) => a.eval(s) / b.eval(s),
            Expr::Pow(a, b) => a.eval(s).powf(b.eval(s)),
            Expr::Call(f, e) => {
                let v = e.eval(s);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                    Func::Tanh => v.tanh(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Sqrt => v.sqrt(),
                    Func::Abs => v.abs(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number {text:?}")))?;
                out.push(Token::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(bytes[start..i].iter().collect()));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Token::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            _ => return Err(Error::Config(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.atom()?;
        while let Some(Token::Op(op)) = self.peek().cloned() {
            let (lbp, rbp) = match op {
                '+' | '-' => (1, 2),
                '*' | '/' => (3, 4),
                '^' => (6, 5), // right-associative
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expression(rbp)?;
            lhs = match op {
                '+' => Expr::Add(Box::new(lhs), Box::new(rhs)),
                '-' => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                '*' => Expr::Mul(Box::new(lhs), Box::new(rhs)),
                '/' => Expr::Div(Box::new(lhs), Box::new(rhs)),
                '^' => Expr::Pow(Box::new(lhs), Box::new(rhs)),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Op('-')) => Ok(Expr::Neg(Box::new(self.expression(5)?))),
            Some(Token::Op('+')) => self.expression(5),
            Some(Token::LParen) => {
                let e = self.expression(0)?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Config("missing closing parenthesis".into())),
                }
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "s" | "t" => Ok(Expr::Var),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                other => {
                    let f = match other {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "tan" => Func::Tan,
                        "sinh" => Func::Sinh,
                        "cosh" => Func::Cosh,
                        "tanh" => Func::Tanh,
                        "exp" => Func::Exp,
                        "log" | "ln" => Func::Log,
                        "sqrt" => Func::Sqrt,
                        "abs" => Func::Abs,
                        _ => return Err(Error::Config(format!("unknown identifier {other:?}"))),
                    };
                    match self.next() {
                        Some(Token::LParen) => {
                            let arg = self.expression(0)?;
                            match self.next() {
                                Some(Token::RParen) => Ok(Expr::Call(f, Box::new(arg))),
                                _ => Err(Error::Config("missing closing parenthesis".into())),
                            }
                        }
                        _ => Err(Error::Config(format!("{other} expects parentheses"))),
                    }
                }
            },
            other => Err(Error::Config(format!("unexpected token {other:?}"))),
        }
    }
}
