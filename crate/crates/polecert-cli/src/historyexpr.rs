//! Initial-history expressions over a tiny closed grammar:
//!
//! ```text
//!     expr  := term (('+' | '-') term)*
//!     term  := unary ('*' unary)*
//!     unary := '-' unary | atom
//!     atom  := NUMBER | 't' | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Evaluation is on dual numbers, so every history carries its exact
//! derivative; the neutral integrator needs both.

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    T,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Exp(Box<Node>),
}

#[derive(Debug, Clone)]
pub struct HistoryExpr {
    root: Node,
}

impl HistoryExpr {
    pub fn parse(src: &str) -> Result<Self, String> {
        let tokens = tokenize(src)?;
        let mut p = ParseState { tokens, pos: 0 };
        let root = p.expr()?;
        match p.peek() {
            None => Ok(HistoryExpr { root }),
            Some((tok, at)) => Err(format!("unexpected {tok} at byte {at}")),
        }
    }

    /// (value, derivative) at t.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        eval_dual(&self.root, t)
    }
}

fn eval_dual(n: &Node, t: f64) -> (f64, f64) {
    match n {
        Node::Const(c) => (*c, 0.0),
        Node::T => (t, 1.0),
        Node::Add(a, b) => {
            let (av, ad) = eval_dual(a, t);
            let (bv, bd) = eval_dual(b, t);
            (av + bv, ad + bd)
        }
        Node::Sub(a, b) => {
            let (av, ad) = eval_dual(a, t);
            let (bv, bd) = eval_dual(b, t);
            (av - bv, ad - bd)
        }
        Node::Mul(a, b) => {
            let (av, ad) = eval_dual(a, t);
            let (bv, bd) = eval_dual(b, t);
            (av * bv, ad * bv + av * bd)
        }
        Node::Neg(a) => {
            let (av, ad) = eval_dual(a, t);
            (-av, -ad)
        }
        Node::Sin(a) => {
            let (av, ad) = eval_dual(a, t);
            (av.sin(), av.cos() * ad)
        }
        Node::Cos(a) => {
            let (av, ad) = eval_dual(a, t);
            (av.cos(), -av.sin() * ad)
        }
        Node::Exp(a) => {
            let (av, ad) = eval_dual(a, t);
            let e = av.exp();
            (e, e * ad)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Num(v) => write!(f, "number {v}"),
            Token::Ident(s) => write!(f, "'{s}'"),
            Token::Plus => f.write_str("'+'"),
            Token::Minus => f.write_str("'-'"),
            Token::Star => f.write_str("'*'"),
            Token::LParen => f.write_str("'('"),
            Token::RParen => f.write_str("')'"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, String> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            '(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // Exponent suffix, sign optional: 1e-3, 2.5e2.
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| format!("bad number '{text}' at byte {start}"))?;
                out.push((Token::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
            }
            other => return Err(format!("unexpected character '{other}' at byte {i}")),
        }
    }
    Ok(out)
}

struct ParseState {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl ParseState {
    fn peek(&self) -> Option<(&Token, usize)> {
        self.tokens.get(self.pos).map(|(t, at)| (t, *at))
    }

    fn bump(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), String> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, at)) => Err(format!("expected {want}, found {t} at byte {at}")),
            None => Err(format!("expected {want}, found end of expression")),
        }
    }

    fn expr(&mut self) -> Result<Node, String> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Token::Plus => Node::Add as fn(_, _) -> _,
                Token::Minus => Node::Sub as fn(_, _) -> _,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = op(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some((Token::Star, _))) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, String> {
        if matches!(self.peek(), Some((Token::Minus, _))) {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, String> {
        match self.bump() {
            Some((Token::Num(v), _)) => Ok(Node::Const(v)),
            Some((Token::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some((Token::Ident(name), at)) => match name.as_str() {
                "t" => Ok(Node::T),
                "sin" | "cos" | "exp" => {
                    self.expect(Token::LParen)?;
                    let inner = Box::new(self.expr()?);
                    self.expect(Token::RParen)?;
                    Ok(match name.as_str() {
                        "sin" => Node::Sin(inner),
                        "cos" => Node::Cos(inner),
                        _ => Node::Exp(inner),
                    })
                }
                _ => Err(format!(
                    "unknown name '{name}' at byte {at}: the grammar has t, sin, cos, exp, \
                     and constants"
                )),
            },
            Some((t, at)) => Err(format!("unexpected {t} at byte {at}")),
            None => Err("empty expression".to_string()),
        }
    }
}
