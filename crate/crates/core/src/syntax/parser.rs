//! Recursive descent parser for the problem file format.
//!
//! ```text
//! problem := decl (";" decl)* [";"]
//! decl    := "at" NOM ":" expr | ROLE "(" NOM "," NOM ")" | NOM "=" NOM
//!          | NOM "!=" NOM | ROLE "<=" ROLE | "refl" ROLE | "trans" ROLE
//! expr    := atom | "!" expr | expr "&" expr | expr "|" expr
//!          | "<" ROLE ">" NAT expr | "[" ROLE "]" NAT expr
//!          | "E" NAT expr | "A" NAT expr | "(" expr ")"
//! atom    := PROP | "@" NOM
//! ```
//!
//! Prefix operators bind tighter than `&`, which binds tighter than `|`.
//! Binary operators associate to the left. `#` starts a line comment.

use std::collections::HashMap;

use thiserror::Error;

use super::{to_nnf, Expression, Namespace, Problem, ValidationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Semi,
    Colon,
    LParen,
    RParen,
    Comma,
    Eq,
    Neq,
    Le,
    Lt,
    Gt,
    LBrack,
    RBrack,
    Bang,
    Amp,
    Pipe,
    At,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => {
                let s = match other {
                    Tok::Semi => ";",
                    Tok::Colon => ":",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Comma => ",",
                    Tok::Eq => "=",
                    Tok::Neq => "!=",
                    Tok::Le => "<=",
                    Tok::Lt => "<",
                    Tok::Gt => ">",
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::Bang => "!",
                    Tok::Amp => "&",
                    Tok::Pipe => "|",
                    Tok::At => "@",
                    _ => unreachable!(),
                };
                format!("`{s}`")
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn syntax_error(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            let word: String = chars[start..i].iter().collect();
            // `E0`, `A12`: a global modality glued to its grade.
            if word.len() > 1
                && (word.starts_with('E') || word.starts_with('A'))
                && word[1..].bytes().all(|b| b.is_ascii_digit())
            {
                let n = word[1..]
                    .parse::<u32>()
                    .map_err(|_| syntax_error(pos, format!("grade in `{word}` is too large")))?;
                out.push((Tok::Ident(word[..1].to_string()), pos));
                let grade_pos = Pos {
                    line: pos.line,
                    column: pos.column + 1,
                };
                out.push((Tok::Nat(n), grade_pos));
            } else {
                out.push((Tok::Ident(word), pos));
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            column += i - start;
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<u32>()
                .map_err(|_| syntax_error(pos, format!("grade `{text}` is too large")))?;
            out.push((Tok::Nat(n), pos));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('!', Some('=')) => (Tok::Neq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            (';', _) => (Tok::Semi, 1),
            (':', _) => (Tok::Colon, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('!', _) => (Tok::Bang, 1),
            ('&', _) => (Tok::Amp, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('@', _) => (Tok::At, 1),
            _ => return Err(syntax_error(pos, format!("unexpected character `{c}`"))),
        };
        out.push((tok, pos));
        i += width;
        column += width;
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    /// First namespace each identifier was used in, with its position.
    names: HashMap<String, (Namespace, Pos)>,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
            names: HashMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax_error(
                self.pos(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn name(&mut self, ns: Namespace) -> Result<String, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) => {
                match self.names.get(&s) {
                    Some((prev, first)) if *prev != ns => {
                        return Err(syntax_error(
                            pos,
                            format!(
                                "`{s}` used as a {ns} but was used as a {prev} at line {}, column {}",
                                first.line, first.column
                            ),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        self.names.insert(s.clone(), (ns, pos));
                    }
                }
                Ok(s)
            }
            other => Err(syntax_error(
                pos,
                format!("expected {ns} name, found {}", other.describe()),
            )),
        }
    }

    fn grade(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Nat(n) => Ok(n),
            other => Err(syntax_error(
                pos,
                format!("expected grade after modal operator, found {}", other.describe()),
            )),
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Expression::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.prefix()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.prefix()?;
            lhs = Expression::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expression, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Expression::not(self.prefix()?))
            }
            Tok::Lt => {
                self.bump();
                let r = self.name(Namespace::Role)?;
                self.expect(Tok::Gt)?;
                let n = self.grade()?;
                Ok(Expression::Diamond(r, n, Box::new(self.prefix()?)))
            }
            Tok::LBrack => {
                self.bump();
                let r = self.name(Namespace::Role)?;
                self.expect(Tok::RBrack)?;
                let n = self.grade()?;
                Ok(Expression::Box(r, n, Box::new(self.prefix()?)))
            }
            Tok::Ident(s) if (s == "E" || s == "A") && matches!(self.peek_at(1), Tok::Nat(_)) => {
                self.bump();
                let n = self.grade()?;
                let body = self.prefix()?;
                Ok(if s == "E" {
                    Expression::exists(n, body)
                } else {
                    Expression::forall(n, body)
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::At => {
                self.bump();
                Ok(Expression::Nom(self.name(Namespace::Nominal)?))
            }
            Tok::Ident(_) => Ok(Expression::Prop(self.name(Namespace::Proposition)?)),
            other => Err(syntax_error(
                pos,
                format!("expected expression, found {}", other.describe()),
            )),
        }
    }

    fn decl(&mut self, p: &mut Problem) -> Result<(), ParseError> {
        let pos = self.pos();
        let head = match self.peek() {
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(syntax_error(
                    pos,
                    format!("expected declaration, found {}", other.describe()),
                ))
            }
        };
        let next = self.peek_at(1).clone();
        let after = self.peek_at(2).clone();
        match (head.as_str(), &next, &after) {
            ("at", Tok::Ident(_), Tok::Colon) => {
                self.bump();
                let x = self.name(Namespace::Nominal)?;
                self.expect(Tok::Colon)?;
                let e = self.expr()?;
                p.labels.push((to_nnf(&e), x));
            }
            ("refl" | "trans", Tok::Ident(_), Tok::Semi | Tok::Eof) => {
                self.bump();
                let r = self.name(Namespace::Role)?;
                if head == "refl" {
                    p.reflexive.insert(r);
                } else {
                    p.transitive.insert(r);
                }
            }
            (_, Tok::LParen, _) => {
                let r = self.name(Namespace::Role)?;
                self.expect(Tok::LParen)?;
                let x = self.name(Namespace::Nominal)?;
                self.expect(Tok::Comma)?;
                let y = self.name(Namespace::Nominal)?;
                self.expect(Tok::RParen)?;
                p.edges.push((r, x, y));
            }
            (_, Tok::Eq | Tok::Neq, _) => {
                let x = self.name(Namespace::Nominal)?;
                let equal = self.bump() == Tok::Eq;
                let y = self.name(Namespace::Nominal)?;
                if equal {
                    p.equations.push((x, y));
                } else {
                    p.disequations.push((x, y));
                }
            }
            (_, Tok::Le, _) => {
                let r = self.name(Namespace::Role)?;
                self.bump();
                let s = self.name(Namespace::Role)?;
                p.inclusions.push((r, s));
            }
            _ => {
                return Err(syntax_error(
                    pos,
                    format!("cannot parse a declaration starting with `{head}`"),
                ))
            }
        }
        Ok(())
    }

    fn problem(&mut self) -> Result<Problem, ParseError> {
        let mut p = Problem::default();
        self.decl(&mut p)?;
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Semi => {
                    self.bump();
                    if *self.peek() == Tok::Eof {
                        break;
                    }
                    self.decl(&mut p)?;
                }
                other => {
                    return Err(syntax_error(
                        self.pos(),
                        format!("expected `;` or end of input, found {}", other.describe()),
                    ))
                }
            }
        }
        Ok(p)
    }
}

/// Parses, normalizes and validates a problem file.
pub fn parse_problem(src: &str) -> Result<Problem, ParseError> {
    let mut parser = Parser::new(src)?;
    let problem = parser.problem()?;
    problem.validate()?;
    Ok(problem)
}

/// Parses a single expression (no declarations, no NNF conversion).
pub fn parse_expression(src: &str) -> Result<Expression, ParseError> {
    let mut parser = Parser::new(src)?;
    let e = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(syntax_error(
            parser.pos(),
            format!("unexpected {} after expression", parser.peek().describe()),
        ));
    }
    Ok(e)
}
