use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Open,
    Close,
    /// A bare word: keyword, identifier or number.
    Atom(String),
    Str(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first byte of the token.
    pub offset: usize,
}

/// Tokenizer for the s-expression surface syntax. `;` starts a comment that
/// runs to the end of the line.
pub(crate) struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    pub fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        let Some(c) = self.src[start..].chars().next() else {
            return Ok(None);
        };
        let kind = match c {
            '(' => {
                self.pos += 1;
                TokenKind::Open
            }
            ')' => {
                self.pos += 1;
                TokenKind::Close
            }
            '"' => TokenKind::Str(self.string(start)?),
            _ => {
                let rest = &self.src[start..];
                let len = rest
                    .find(|c: char| c.is_ascii_whitespace() || matches!(c, '(' | ')' | '"' | ';'))
                    .unwrap_or(rest.len());
                self.pos += len;
                TokenKind::Atom(rest[..len].to_string())
            }
        };
        Ok(Some(Token { kind, offset: start }))
    }

    fn string(&mut self, start: usize) -> Result<String, ParseError> {
        let mut out = String::new();
        let mut chars = self.src[start + 1..].char_indices();
        let base = start + 1;
        loop {
            let Some((i, c)) = chars.next() else {
                return Err(ParseError::new(self.src.len(), "unterminated string literal"));
            };
            match c {
                '"' => {
                    self.pos = base + i + 1;
                    return Ok(out);
                }
                '\\' => {
                    let Some((j, esc)) = chars.next() else {
                        return Err(ParseError::new(self.src.len(), "unterminated string literal"));
                    };
                    match esc {
                        '"' => out.push('"'),
                        '\\' => out.push('\\'),
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        'u' => {
                            let hex_start = base + j + 1;
                            let hex = self.src.get(hex_start..hex_start + 4).unwrap_or("");
                            if hex.len() != 4 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
                                return Err(ParseError::new(
                                    base + j - 1,
                                    "\\u escape needs four hex digits",
                                ));
                            }
                            let code = u32::from_str_radix(hex, 16).expect("checked hex digits");
                            let ch = char::from_u32(code).ok_or_else(|| {
                                ParseError::new(base + j - 1, "\\u escape is not a scalar value")
                            })?;
                            out.push(ch);
                            for _ in 0..4 {
                                chars.next();
                            }
                        }
                        other => {
                            return Err(ParseError::new(
                                base + j - 1,
                                format!("unknown escape \\{other}"),
                            ))
                        }
                    }
                }
                c => out.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let mut lx = Lexer::new(src);
        let mut out = Vec::new();
        while let Some(t) = lx.next_token().unwrap() {
            out.push(t.kind);
        }
        out
    }

    #[test]
    fn tokens_and_comments() {
        assert_eq!(
            kinds("(int 1) ; trailing\n unit"),
            vec![
                TokenKind::Open,
                TokenKind::Atom("int".into()),
                TokenKind::Atom("1".into()),
                TokenKind::Close,
                TokenKind::Atom("unit".into()),
            ]
        );
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            kinds(r#""a\"b\\c\n\t\ré""#),
            vec![TokenKind::Str("a\"b\\c\n\t\r\u{e9}".into())]
        );
    }

    #[test]
    fn bad_escapes() {
        let mut lx = Lexer::new(r#""\q""#);
        assert!(lx.next_token().is_err());
        let mut lx = Lexer::new(r#""\u12""#);
        assert!(lx.next_token().is_err());
        let mut lx = Lexer::new(r#""\ud800""#);
        assert!(lx.next_token().is_err());
        let mut lx = Lexer::new("\"open");
        assert_eq!(lx.next_token().unwrap_err().offset, 5);
    }
}
