use super::{Formula, SyntaxError, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Top,
    Bot,
    Kv,
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Caret,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let start = i;
        let tok = match ch {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            'a'..='z' => {
                while i < bytes.len() && matches!(bytes[i], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            'K' if text[i..].starts_with("Kv") => {
                i += 2;
                out.push((start, Tok::Kv));
                continue;
            }
            'T' => Tok::Top,
            'F' => Tok::Bot,
            '~' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '^' => Tok::Caret,
            ',' => Tok::Comma,
            '>' => Tok::RAngle,
            '-' if text[i..].starts_with("->") => {
                i += 2;
                out.push((start, Tok::Implies));
                continue;
            }
            '<' if text[i..].starts_with("<->") => {
                i += 3;
                out.push((start, Tok::Iff));
                continue;
            }
            '<' => Tok::LAngle,
            _ => {
                let found = text[i..].chars().next().unwrap_or(ch);
                return Err(SyntaxError::Lex { pos: i, found });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser<'v> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    vocab: Option<&'v Vocabulary>,
}

/// Parses `text` against `vocab`; every identifier must be declared there.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula, SyntaxError> {
    Parser::new(text, Some(vocab))?.run()
}

/// Parses `text` accepting any identifier. Use [`Formula::symbols`] to recover
/// the vocabulary the formula uses.
pub fn parse_open(text: &str) -> Result<Formula, SyntaxError> {
    Parser::new(text, None)?.run()
}

impl<'v> Parser<'v> {
    fn new(text: &str, vocab: Option<&'v Vocabulary>) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            vocab,
        })
    }

    fn run(mut self) -> Result<Formula, SyntaxError> {
        let f = self.formula()?;
        self.expect(Tok::Eof, "end of input")?;
        Ok(f)
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].1.clone();
        if tok != Tok::Eof {
            self.at += 1;
        }
        tok
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if *self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        SyntaxError::Unexpected {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self, kind: &'static str) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if let Some(v) = self.vocab {
                    let known = match kind {
                        "agent" => v.agent_index(&name).is_some(),
                        "constant" => v.constant_index(&name).is_some(),
                        _ => v.prop_index(&name).is_some(),
                    };
                    if !known {
                        return Err(SyntaxError::UnknownIdentifier { kind, name });
                    }
                }
                Ok(name)
            }
            _ => Err(self.unexpected(kind)),
        }
    }

    // iff := imp ('<->' iff)?
    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.implication()?;
        if self.eat(Tok::Iff) {
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disjunction()?;
        if self.eat(Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while self.eat(Tok::Or) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat(Tok::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::LBracket => {
                self.bump();
                let agent = self.ident("agent")?;
                self.expect(Tok::RBracket, "`]`")?;
                self.modal_tail(agent, false)
            }
            Tok::LAngle => {
                self.bump();
                let agent = self.ident("agent")?;
                self.expect(Tok::RAngle, "`>`")?;
                self.modal_tail(agent, true)
            }
            Tok::Kv => {
                self.bump();
                self.expect(Tok::LBracket, "`[` after Kv")?;
                let agent = self.ident("agent")?;
                self.expect(Tok::RBracket, "`]`")?;
                self.kv_args(agent)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::bot())
            }
            Tok::Ident(_) => Ok(Formula::Prop(self.ident("proposition")?)),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.unexpected("formula")),
        }
    }

    /// After `[a]` or `<a>`: either `^c` and a unary/binary argument list, or a
    /// plain operand.
    fn modal_tail(&mut self, agent: String, diamond: bool) -> Result<Formula, SyntaxError> {
        if !self.eat(Tok::Caret) {
            let body = self.unary()?;
            return Ok(if diamond {
                Formula::dia(agent, body)
            } else {
                Formula::boxed(agent, body)
            });
        }
        let constant = self.ident("constant")?;
        if *self.peek() == Tok::LParen {
            let open = self.pos();
            self.bump();
            let first = self.formula()?;
            if self.eat(Tok::Comma) {
                let second = self.formula()?;
                if *self.peek() == Tok::Comma {
                    return Err(SyntaxError::Arity {
                        pos: self.pos(),
                        what: "binary modality takes exactly two arguments".into(),
                    });
                }
                self.expect(Tok::RParen, "`)`")?;
                return Ok(if diamond {
                    Formula::dia_b(agent, constant, first, second)
                } else {
                    Formula::bbox_b(agent, constant, first, second)
                });
            }
            if *self.peek() != Tok::RParen {
                return Err(SyntaxError::Arity {
                    pos: open,
                    what: "expected `,` or `)` in modal argument list".into(),
                });
            }
            self.bump();
            return Ok(if diamond {
                Formula::dia_u(agent, constant, first)
            } else {
                Formula::bbox_u(agent, constant, first)
            });
        }
        let body = self.unary()?;
        Ok(if diamond {
            Formula::dia_u(agent, constant, body)
        } else {
            Formula::bbox_u(agent, constant, body)
        })
    }

    // `(f, c)` or the sugar `(c)` for Kv(T, c)
    fn kv_args(&mut self, agent: String) -> Result<Formula, SyntaxError> {
        let open = self.pos();
        self.expect(Tok::LParen, "`(` after Kv[..]")?;
        if let (Tok::Ident(name), Tok::RParen) = (self.peek().clone(), self.toks[self.at + 1].1.clone()) {
            let constant = self.ident("constant").map_err(|e| match e {
                SyntaxError::UnknownIdentifier { .. } => SyntaxError::UnknownIdentifier { kind: "constant", name },
                other => other,
            })?;
            self.bump();
            return Ok(Formula::kv(agent, Formula::Top, constant));
        }
        let cond = self.formula()?;
        if !self.eat(Tok::Comma) {
            return Err(SyntaxError::Arity {
                pos: open,
                what: "Kv takes a condition and a constant".into(),
            });
        }
        if self.toks[self.at + 1].1 == Tok::Comma {
            return Err(SyntaxError::Arity {
                pos: self.pos(),
                what: "Kv takes exactly two arguments".into(),
            });
        }
        let constant = self.ident("constant")?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Formula::kv(agent, cond, constant))
    }
}
