//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! or     := and ('|' and)*
//! and    := until ('&' until)*
//! until  := unary ('U' until)?          right associative
//! unary  := ('!' | 'X' | 'F' | 'G') unary | atom
//! atom   := 'true' | 'false' | ident | '(' or ')'
//! ident  := [a-z_][a-z0-9_]*
//! ```

use super::formula::Formula;
use super::{Alphabet, LtlError};

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Ident(&'a str),
    True,
    False,
    Not,
    And,
    Or,
    Next,
    Until,
    Eventually,
    Globally,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Token<'a>)>, LtlError> {
        let mut lexer = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(tok) = lexer.next_token()? {
            out.push(tok);
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Token<'a>)>, LtlError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = bytes[start];
        let single = match c {
            b'!' => Some(Token::Not),
            b'&' => Some(Token::And),
            b'|' => Some(Token::Or),
            b'X' => Some(Token::Next),
            b'U' => Some(Token::Until),
            b'F' => Some(Token::Eventually),
            b'G' => Some(Token::Globally),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok(Some((start, tok)));
        }
        if c.is_ascii_lowercase() || c == b'_' {
            let mut end = start + 1;
            while end < bytes.len()
                && (bytes[end].is_ascii_lowercase() || bytes[end].is_ascii_digit() || bytes[end] == b'_')
            {
                end += 1;
            }
            self.pos = end;
            let word = &self.src[start..end];
            let tok = match word {
                "true" => Token::True,
                "false" => Token::False,
                _ => Token::Ident(word),
            };
            return Ok(Some((start, tok)));
        }
        let ch = self.src[start..].chars().next().unwrap();
        Err(LtlError::Syntax {
            pos: start,
            message: format!("unexpected character {ch:?}"),
        })
    }
}

struct Parser<'a, 'b> {
    tokens: Vec<(usize, Token<'a>)>,
    at: usize,
    len: usize,
    alphabet: Option<&'b Alphabet>,
}

impl<'a, 'b> Parser<'a, 'b> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> LtlError {
        LtlError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn eat(&mut self, tok: &Token<'_>) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn parse_or(&mut self) -> Result<Formula, LtlError> {
        let mut items = vec![self.parse_and()?];
        while self.eat(&Token::Or) {
            items.push(self.parse_and()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn parse_and(&mut self) -> Result<Formula, LtlError> {
        let mut items = vec![self.parse_until()?];
        while self.eat(&Token::And) {
            items.push(self.parse_until()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn parse_until(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.parse_unary()?;
        if self.eat(&Token::Until) {
            let rhs = self.parse_until()?;
            Ok(Formula::until(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_unary(&mut self) -> Result<Formula, LtlError> {
        match self.peek() {
            Some(Token::Not) => {
                self.at += 1;
                Ok(Formula::not(self.parse_unary()?))
            }
            Some(Token::Next) => {
                self.at += 1;
                Ok(Formula::next(self.parse_unary()?))
            }
            Some(Token::Eventually) => {
                self.at += 1;
                Ok(Formula::eventually(self.parse_unary()?))
            }
            Some(Token::Globally) => {
                self.at += 1;
                Ok(Formula::globally(self.parse_unary()?))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, LtlError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Token::True) => {
                self.at += 1;
                Ok(Formula::True)
            }
            Some(Token::False) => {
                self.at += 1;
                Ok(Formula::False)
            }
            Some(Token::Ident(name)) => {
                self.at += 1;
                match self.alphabet {
                    Some(alphabet) => match alphabet.lookup(name) {
                        Some(sym) => Ok(Formula::Atom(alphabet.shared_name(sym).clone())),
                        None => Err(LtlError::UnknownIdentifier {
                            name: name.to_string(),
                            pos,
                        }),
                    },
                    None => Ok(Formula::atom(name)),
                }
            }
            Some(Token::LParen) => {
                self.at += 1;
                let inner = self.parse_or()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(tok) => Err(self.error(format!("unexpected token {tok:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn parse_with(text: &str, alphabet: Option<&Alphabet>) -> Result<Formula, LtlError> {
    let tokens = Lexer::tokens(text)?;
    let mut parser = Parser {
        tokens,
        at: 0,
        len: text.len(),
        alphabet,
    };
    let f = parser.parse_or()?;
    if parser.at != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(f.canonicalize())
}

/// Parses and canonicalizes `text`, resolving every atom against `alphabet`.
pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Formula, LtlError> {
    parse_with(text, Some(alphabet))
}

/// Parses and canonicalizes `text` without checking atoms against an alphabet.
pub fn parse_unchecked(text: &str) -> Result<Formula, LtlError> {
    parse_with(text, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minecraft() -> Alphabet {
        Alphabet::new(["pick", "lava", "door", "apple", "egg"]).unwrap()
    }

    #[test]
    fn fig1_task_tree() {
        let f = parse(
            "!lava U (egg & (!lava U (pick & (!lava U door))))",
            &minecraft(),
        )
        .unwrap();
        let nl = || Formula::not(Formula::atom("lava"));
        let inner = Formula::until(nl(), Formula::atom("door"));
        let mid = Formula::until(nl(), Formula::and(vec![Formula::atom("pick"), inner]).canonicalize());
        let expected = Formula::until(nl(), Formula::and(vec![Formula::atom("egg"), mid]).canonicalize());
        assert_eq!(f, expected);
    }

    #[test]
    fn literals_and_desugaring() {
        assert_eq!(parse_unchecked("true").unwrap(), Formula::True);
        assert_eq!(parse_unchecked("false").unwrap(), Formula::False);
        assert_eq!(
            parse_unchecked("F a").unwrap(),
            Formula::until(Formula::True, Formula::atom("a"))
        );
    }

    #[test]
    fn precedence() {
        // & binds tighter than |, U tighter than &
        let f = parse_unchecked("a | b & c U d").unwrap();
        let expected = Formula::or(vec![
            Formula::atom("a"),
            Formula::and(vec![
                Formula::atom("b"),
                Formula::until(Formula::atom("c"), Formula::atom("d")),
            ]),
        ])
        .canonicalize();
        assert_eq!(f, expected);
        // U is right associative
        let g = parse_unchecked("a U b U c").unwrap();
        assert_eq!(
            g,
            Formula::until(
                Formula::atom("a"),
                Formula::until(Formula::atom("b"), Formula::atom("c"))
            )
        );
        // unary binds tightest
        let h = parse_unchecked("!a U X b").unwrap();
        assert_eq!(
            h,
            Formula::until(
                Formula::not(Formula::atom("a")),
                Formula::next(Formula::atom("b"))
            )
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_unchecked("a & (b | c") {
            Err(LtlError::Syntax { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("unexpected {other:?}"),
        }
        match parse_unchecked("a $ b") {
            Err(LtlError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_unchecked(""), Err(LtlError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_unchecked("a b"), Err(LtlError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn unknown_identifier() {
        match parse("F diamond", &minecraft()) {
            Err(LtlError::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "diamond");
                assert_eq!(pos, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let a = minecraft();
        for text in [
            "!lava U (egg & (!lava U (pick & (!lava U door))))",
            "F (pick & F door) & F (apple | egg)",
            "X (pick U !door) | G egg",
            "true",
            "false",
        ] {
            let f = parse(text, &a).unwrap();
            assert_eq!(parse(&f.to_string(), &a).unwrap(), f, "{text}");
        }
    }
}
