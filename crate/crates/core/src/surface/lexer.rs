use super::{ParseError, Pos, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Str(String),
    Dot,
    Comma,
    Colon,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Bang,
    Query,
    Amp,
    Plus,
    Minus,
    OPlus,
    Bar,
    BarGt,
    LtBar,
    Star,
    Caret,
    Eq,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Str(_) => "string literal".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Bang => "!",
            Tok::Query => "?",
            Tok::Amp => "&",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::OPlus => "(+)",
            Tok::Bar => "|",
            Tok::BarGt => "|>",
            Tok::LtBar => "<|",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::Eq => "=",
            Tok::Ident(_) | Tok::Nat(_) | Tok::Str(_) => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub start: Pos,
    pub end: Pos,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let err = |msg: String, start: Pos, end: Pos| ParseError {
        message: msg,
        span: SourceSpan { file: file.to_string(), start, end },
    };
    while i < chars.len() {
        let c = chars[i];
        let start = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let mut width = 1;
        let tok = if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            width = j - i;
            Tok::Ident(chars[i..j].iter().collect())
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            width = j - i;
            let text: String = chars[i..j].iter().collect();
            let n = text.parse::<u64>().map_err(|_| {
                err(format!("number `{text}` is out of range"), start, Pos { line, col: col + width })
            })?;
            Tok::Nat(n)
        } else if c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            loop {
                if j >= chars.len() || chars[j] == '\n' {
                    return Err(err("unterminated string literal".into(), start, Pos { line, col: col + (j - i) }));
                }
                match chars[j] {
                    '"' => break,
                    '\\' => {
                        let esc = chars.get(j + 1).copied();
                        s.push(match esc {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => {
                                let p = Pos { line, col: col + (j - i) };
                                return Err(err("unknown escape sequence".into(), p, Pos { line, col: p.col + 2 }));
                            }
                        });
                        j += 2;
                    }
                    ch => {
                        s.push(ch);
                        j += 1;
                    }
                }
            }
            width = j + 1 - i;
            Tok::Str(s)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                ('(', Some('+')) if chars.get(i + 2) == Some(&')') => {
                    width = 3;
                    Tok::OPlus
                }
                ('|', Some('>')) => {
                    width = 2;
                    Tok::BarGt
                }
                ('<', Some('|')) => {
                    width = 2;
                    Tok::LtBar
                }
                ('.', _) => Tok::Dot,
                (',', _) => Tok::Comma,
                (':', _) => Tok::Colon,
                (';', _) => Tok::Semi,
                ('(', _) => Tok::LParen,
                (')', _) => Tok::RParen,
                ('{', _) => Tok::LBrace,
                ('}', _) => Tok::RBrace,
                ('<', _) => Tok::Lt,
                ('>', _) => Tok::Gt,
                ('!', _) => Tok::Bang,
                ('?', _) => Tok::Query,
                ('&', _) => Tok::Amp,
                ('+', _) => Tok::Plus,
                ('-', _) => Tok::Minus,
                ('|', _) => Tok::Bar,
                ('*', _) | ('•', _) => Tok::Star,
                ('^', _) => Tok::Caret,
                ('=', _) => Tok::Eq,
                _ => {
                    return Err(err(format!("unexpected character `{c}`"), start, Pos { line, col: col + 1 }));
                }
            }
        };
        i += width;
        col += width;
        out.push(Token { tok, start, end: Pos { line, col } });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s, "t").unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_compound_symbols() {
        assert_eq!(toks("a (+) b"), vec![Tok::Ident("a".into()), Tok::OPlus, Tok::Ident("b".into())]);
        assert_eq!(toks("k|>{"), vec![Tok::Ident("k".into()), Tok::BarGt, Tok::LBrace]);
        assert_eq!(toks("k<|l"), vec![Tok::Ident("k".into()), Tok::LtBar, Tok::Ident("l".into())]);
        assert_eq!(toks("f' # note\n1"), vec![Tok::Ident("f'".into()), Tok::Nat(1)]);
    }

    #[test]
    fn strings_unescape() {
        assert_eq!(toks(r#""a\"b\\""#), vec![Tok::Str("a\"b\\".into())]);
        assert!(lex("\"open", "t").is_err());
    }

    #[test]
    fn positions_track_lines() {
        let t = lex("a\n  b", "t").unwrap();
        assert_eq!((t[1].start.line, t[1].start.col), (2, 3));
    }
}
