//! Recursive-descent parser for the concrete formula syntax.
//!
//! Grammar (unary operators bind tightest, `->` is right-associative):
//!
//! ```text
//! formula := impl
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := ("~" | "<le>" | "[le]" | "<lt>" | "[lt]" | "[gt]" | "(=)" | "F" | "<F>") unary
//!          | atom
//! atom    := "T" | "B" | "Bp" | "Bnp" | "(" formula ")"
//! ```
//!
//! Derived operators are expanded while parsing, so the returned AST contains
//! only core nodes.

use thiserror::Error;

use super::formula::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Tilde,
    DiamLeq,
    BoxLeq,
    DiamLt,
    BoxLt,
    BoxGt,
    EqTheta,
    BoxF,
    DiamF,
    AndOp,
    OrOp,
    Arrow,
    LParen,
    RParen,
    Top,
    Atom(Atom),
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, position: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            position,
            message: message.into(),
        }
    }

    fn tokenize(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'~' => {
                    self.pos += 1;
                    out.push((start, Tok::Tilde));
                }
                b'&' => {
                    self.pos += 1;
                    out.push((start, Tok::AndOp));
                }
                b'|' => {
                    self.pos += 1;
                    out.push((start, Tok::OrOp));
                }
                b'-' => {
                    if self.bytes.get(self.pos + 1) == Some(&b'>') {
                        self.pos += 2;
                        out.push((start, Tok::Arrow));
                    } else {
                        return Err(self.error(start, "expected `->`"));
                    }
                }
                b'(' => {
                    if self.src[self.pos..].starts_with("(=)") {
                        self.pos += 3;
                        out.push((start, Tok::EqTheta));
                    } else {
                        self.pos += 1;
                        out.push((start, Tok::LParen));
                    }
                }
                b')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                b'<' => {
                    let rest = &self.src[self.pos..];
                    if rest.starts_with("<le>") {
                        self.pos += 4;
                        out.push((start, Tok::DiamLeq));
                    } else if rest.starts_with("<lt>") {
                        self.pos += 4;
                        out.push((start, Tok::DiamLt));
                    } else if rest.starts_with("<F>") {
                        self.pos += 3;
                        out.push((start, Tok::DiamF));
                    } else {
                        return Err(self.error(start, "unknown token starting with `<`"));
                    }
                }
                b'[' => {
                    let rest = &self.src[self.pos..];
                    if rest.starts_with("[le]") {
                        self.pos += 4;
                        out.push((start, Tok::BoxLeq));
                    } else if rest.starts_with("[lt]") {
                        self.pos += 4;
                        out.push((start, Tok::BoxLt));
                    } else if rest.starts_with("[gt]") {
                        self.pos += 4;
                        out.push((start, Tok::BoxGt));
                    } else {
                        return Err(self.error(start, "unknown token starting with `[`"));
                    }
                }
                c if c.is_ascii_alphabetic() => {
                    let mut end = self.pos;
                    while end < self.bytes.len() && self.bytes[end].is_ascii_alphanumeric() {
                        end += 1;
                    }
                    let word = &self.src[self.pos..end];
                    self.pos = end;
                    let tok = match word {
                        "T" => Tok::Top,
                        "F" => Tok::BoxF,
                        _ => match Atom::from_name(word) {
                            Some(atom) => Tok::Atom(atom),
                            None => {
                                return Err(
                                    self.error(start, format!("unknown identifier {word:?}"))
                                )
                            }
                        },
                    };
                    out.push((start, tok));
                }
                other => {
                    return Err(self.error(start, format!("unexpected character {:?}", other as char)))
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    cursor: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.cursor).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.cursor).map(|(_, t)| t.clone());
        if tok.is_some() {
            self.cursor += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.position(),
            message: message.into(),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.peek() == Some(&Tok::OrOp) {
            self.bump();
            let rhs = self.and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::AndOp) {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::DiamLeq) => {
                self.bump();
                Ok(Formula::diam_leq(self.unary()?))
            }
            Some(Tok::BoxLeq) => {
                self.bump();
                Ok(Formula::box_leq(self.unary()?))
            }
            Some(Tok::DiamLt) => {
                self.bump();
                Ok(Formula::diam_lt(self.unary()?))
            }
            Some(Tok::BoxLt) => {
                self.bump();
                Ok(Formula::box_lt(self.unary()?))
            }
            Some(Tok::BoxGt) => {
                self.bump();
                Ok(Formula::box_gt(self.unary()?))
            }
            Some(Tok::EqTheta) => {
                self.bump();
                Ok(Formula::eq_theta(self.unary()?))
            }
            Some(Tok::BoxF) => {
                self.bump();
                Ok(Formula::box_f(self.unary()?))
            }
            Some(Tok::DiamF) => {
                self.bump();
                Ok(Formula::diam_f(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Top) => {
                self.bump();
                Ok(Formula::Top)
            }
            Some(Tok::Atom(_)) => {
                let Some(Tok::Atom(a)) = self.bump() else {
                    unreachable!()
                };
                Ok(Formula::atom(a))
            }
            Some(Tok::LParen) => {
                let open = self.position();
                self.bump();
                let inner = self.formula()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(ParseError {
                        position: open,
                        message: "unbalanced parenthesis".to_string(),
                    })
                }
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses concrete syntax into a core-node AST with derived operators
/// expanded.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: text.len(),
    };
    let formula = parser.formula()?;
    if parser.cursor != parser.tokens.len() {
        return Err(parser.error("trailing input after formula"));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_with_negated_modality() {
        let f = parse("B & ~<le> B").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::atom(Atom::B),
                Formula::not(Formula::diam_leq(Formula::atom(Atom::B))),
            )
        );
    }

    #[test]
    fn gt_of_negation_expands_to_negated_diamond() {
        let f = parse("[gt] ~B").unwrap();
        assert_eq!(f, Formula::not(Formula::diam_leq(Formula::atom(Atom::B))));
    }

    #[test]
    fn dangling_operator_is_an_error() {
        let err = parse("(=) B &").unwrap_err();
        assert_eq!(err.position, 7);
        assert!(err.message.contains("end of input"));
    }

    #[test]
    fn unbalanced_parenthesis_reports_position() {
        let err = parse("(B & T").unwrap_err();
        assert_eq!(err.position, 0);
        assert!(err.message.contains("unbalanced"));
    }

    #[test]
    fn unknown_identifier_reports_position() {
        let err = parse("B & Qx").unwrap_err();
        assert_eq!(err.position, 4);
        assert!(err.message.contains("Qx"));
    }

    #[test]
    fn precedence_and_associativity() {
        // `->` binds loosest and to the right; `|` via de Morgan; unary tightest.
        let f = parse("B -> B -> T").unwrap();
        assert_eq!(
            f,
            Formula::implies(
                Formula::atom(Atom::B),
                Formula::implies(Formula::atom(Atom::B), Formula::Top)
            )
        );
        let g = parse("~B & T | B").unwrap();
        assert_eq!(
            g,
            Formula::or(
                Formula::and(Formula::not(Formula::atom(Atom::B)), Formula::Top),
                Formula::atom(Atom::B)
            )
        );
    }

    #[test]
    fn friendship_tokens() {
        let f = parse("F Bp & <F> Bp").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::box_f(Formula::atom(Atom::Bp)),
                Formula::diam_f(Formula::atom(Atom::Bp)),
            )
        );
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "B",
            "T",
            "~B",
            "~~B",
            "B & ~<le> B",
            "<lt> B",
            "[lt] ~B",
            "[gt] ~B",
            "(=) (B & T)",
            "F Bp & <F> Bnp",
            "B -> ~B | T",
            "[le] (B & B) & B",
        ] {
            let ast = parse(text).unwrap();
            let printed = ast.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(ast, reparsed, "round trip failed for {text:?} -> {printed:?}");
        }
    }
}
