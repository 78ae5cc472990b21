use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// An unexpected character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub found: char,
}

const PUNCT2: [&str; 4] = ["->", "<-", "|-", "=>"];
const PUNCT1: [&str; 12] = ["{", "}", "(", ")", ";", ":", ",", "=", "<", ">", "*", "."];

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '?' | '\'' | '′')
}

/// Splits `src` into tokens; `#` starts a comment running to the end of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
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
            }
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(s),
                line,
                col,
            });
            col += i - start;
            continue;
        }
        if let Some(next) = chars.get(i + 1) {
            let pair: String = [c, *next].iter().collect();
            if let Some(p) = PUNCT2.iter().find(|p| **p == pair) {
                out.push(Token {
                    tok: Tok::Punct(p),
                    line,
                    col,
                });
                i += 2;
                col += 2;
                continue;
            }
        }
        let single = c.to_string();
        match PUNCT1.iter().find(|p| **p == single) {
            Some(p) => {
                out.push(Token {
                    tok: Tok::Punct(p),
                    line,
                    col,
                });
                i += 1;
                col += 1;
            }
            None => return Err(LexError { line, col, found: c }),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn function_cells_and_arrows() {
        assert_eq!(
            toks("<{}|-?>=valof 1.? -> <- =>"),
            vec![
                Tok::Punct("<"),
                Tok::Punct("{"),
                Tok::Punct("}"),
                Tok::Punct("|-"),
                Tok::Ident("?".into()),
                Tok::Punct(">"),
                Tok::Punct("="),
                Tok::Ident("valof".into()),
                Tok::Ident("1".into()),
                Tok::Punct("."),
                Tok::Ident("?".into()),
                Tok::Punct("->"),
                Tok::Punct("<-"),
                Tok::Punct("=>"),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let ts = tokenize("# header\n  cds A' {").unwrap();
        assert_eq!(ts[0].tok, Tok::Ident("cds".into()));
        assert_eq!((ts[0].line, ts[0].col), (2, 3));
        assert_eq!(ts[1].tok, Tok::Ident("A'".into()));
        assert_eq!(tokenize("a $").unwrap_err(), LexError { line: 1, col: 3, found: '$' });
    }
}
