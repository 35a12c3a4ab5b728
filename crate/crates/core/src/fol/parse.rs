//! Recursive-descent parser for the surface FOL syntax.
//!
//! Precedence, tightest first: `¬`, `∧`, `∨`, `⊕`, `→`, `↔`. Implication
//! associates to the right, everything else to the left. A quantifier
//! without parentheses takes everything to its right up to the end of the
//! enclosing group. See `docs/fol-grammar.md` for the full grammar.

use std::collections::BTreeMap;

use super::ast::{Connective, Formula, Term};
use super::FolError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    ForAll,
    Exists,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Xor,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::ForAll => "`∀`".into(),
            Tok::Exists => "`∃`".into(),
            Tok::Not => "`¬`".into(),
            Tok::And => "`∧`".into(),
            Tok::Or => "`∨`".into(),
            Tok::Implies => "`→`".into(),
            Tok::Iff => "`↔`".into(),
            Tok::Xor => "`⊕`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn syntax(offset: usize, expected: &[&str], found: impl Into<String>) -> FolError {
    FolError::Syntax {
        offset,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.into(),
    }
}

const CONNECTIVES: &[&str] = &["`∧`", "`∨`", "`⊕`", "`→`", "`↔`"];

fn lex(text: &str) -> Result<Vec<Spanned>, FolError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let starts_with = |i: usize, s: &str| {
        s.chars()
            .enumerate()
            .all(|(k, c)| chars.get(i + k) == Some(&c))
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let offset = i;
        let (tok, len) = match c {
            '∀' => (Tok::ForAll, 1),
            '∃' => (Tok::Exists, 1),
            '¬' | '~' => (Tok::Not, 1),
            '∧' | '&' => (Tok::And, 1),
            '∨' | '|' => (Tok::Or, 1),
            '→' | '⇒' => (Tok::Implies, 1),
            '↔' | '⇔' => (Tok::Iff, 1),
            '⊕' => (Tok::Xor, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            ':' => (Tok::Colon, 1),
            '-' if starts_with(i, "->") => (Tok::Implies, 2),
            '<' if starts_with(i, "<->") => (Tok::Iff, 3),
            '<' if starts_with(i, "<~>") => (Tok::Xor, 3),
            '=' | '<' | '>' | '≠' | '≤' | '≥' | '!' | '+' | '-' | '*' | '/' => {
                return Err(syntax(
                    offset,
                    CONNECTIVES,
                    format!("`{c}` (equality, comparison and arithmetic are not supported)"),
                ));
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "forall" => Tok::ForAll,
                    "exists" => Tok::Exists,
                    "xor" => Tok::Xor,
                    _ => Tok::Ident(word),
                };
                (tok, j - i)
            }
            other => {
                return Err(syntax(offset, &["formula"], format!("`{other}`")));
            }
        };
        out.push(Spanned { tok, offset });
        i += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        offset: chars.len(),
    });
    Ok(out)
}

/// Names that read as variables; such a name in argument position must be
/// bound by an enclosing quantifier.
fn looks_like_variable(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if ('u'..='z').contains(&c) => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    bound: Vec<String>,
    arities: BTreeMap<String, usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<(), FolError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), expected, self.peek().describe()))
        }
    }

    fn formula(&mut self) -> Result<Formula, FolError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, FolError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, FolError> {
        let lhs = self.xor()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        op: Tok,
        conn: Connective,
        next: fn(&mut Self) -> Result<Formula, FolError>,
    ) -> Result<Formula, FolError> {
        let mut lhs = next(self)?;
        while *self.peek() == op {
            self.bump();
            let rhs = next(self)?;
            lhs = Formula::binary(conn, lhs, rhs);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Formula, FolError> {
        self.left_assoc(Tok::Xor, Connective::Xor, Self::or)
    }

    fn or(&mut self) -> Result<Formula, FolError> {
        self.left_assoc(Tok::Or, Connective::Or, Self::and)
    }

    fn and(&mut self) -> Result<Formula, FolError> {
        self.left_assoc(Tok::And, Connective::And, Self::unary)
    }

    fn unary(&mut self) -> Result<Formula, FolError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::ForAll | Tok::Exists => self.quantified(),
            _ => self.primary(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, FolError> {
        let universal = self.bump().tok == Tok::ForAll;
        let mut vars = vec![self.variable_name()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            vars.push(self.variable_name()?);
        }
        if matches!(self.peek(), Tok::Dot | Tok::Colon) {
            self.bump();
        }
        let depth = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.formula();
        self.bound.truncate(depth);
        let mut body = body?;
        for v in vars.into_iter().rev() {
            body = if universal {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            };
        }
        Ok(body)
    }

    fn variable_name(&mut self) -> Result<String, FolError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(syntax(self.offset(), &["variable"], other.describe())),
        }
    }

    fn primary(&mut self) -> Result<Formula, FolError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, &["`)`"])?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, &["`,`", "`)`"])?;
                    args
                } else {
                    Vec::new()
                };
                match self.arities.get(&name) {
                    Some(&expected) if expected != args.len() => {
                        return Err(FolError::ArityMismatch {
                            predicate: name,
                            expected,
                            found: args.len(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        self.arities.insert(name.clone(), args.len());
                    }
                }
                Ok(Formula::atom(name, args))
            }
            other => Err(syntax(
                self.offset(),
                &["`(`", "`¬`", "`∀`", "`∃`", "predicate"],
                other.describe(),
            )),
        }
    }

    fn term(&mut self) -> Result<Term, FolError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(syntax(
                        self.offset(),
                        &["`,`", "`)`"],
                        "`(` (function symbols are not supported)",
                    ));
                }
                if self.bound.iter().rev().any(|b| *b == name) {
                    Ok(Term::Variable(name))
                } else if looks_like_variable(&name) {
                    Err(FolError::FreeVariable { name, offset })
                } else {
                    Ok(Term::Constant(name))
                }
            }
            other => Err(syntax(offset, &["term"], other.describe())),
        }
    }
}

/// Parse one closed formula from surface text.
pub fn parse_formula(text: &str) -> Result<Formula, FolError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        bound: Vec::new(),
        arities: BTreeMap::new(),
    };
    if *p.peek() == Tok::Eof {
        return Err(syntax(0, &["formula"], "end of input"));
    }
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        let mut expected = CONNECTIVES.to_vec();
        expected.push("end of input");
        return Err(syntax(p.offset(), &expected, p.peek().describe()));
    }
    Ok(f)
}
