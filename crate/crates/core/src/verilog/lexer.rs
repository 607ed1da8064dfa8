use super::ast::Pos;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number {
        width: Option<u32>,
        value: u64,
    },
    Sym(&'static str),
    /// An operator outside the supported subset.
    Foreign(String),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: &[&str] = &[
    "<=", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "@", "*", "=", "~", "&", "|", "^", "?",
];

const FOREIGN: &[&str] = &[
    "===", "!==", "<<<", ">>>", "==", "!=", "&&", "||", "<<", ">>", ">=", "**", "+", "-", "/", "%",
    "!", "<", ">", "#", "$",
];

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos {
            line,
            col: i - line_start + 1,
        };
        if c == b'\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let end = src[i + 2..].find("*/").ok_or(ParseError::Syntax {
                line: pos.line,
                col: pos.col,
                message: "unterminated block comment".into(),
            })?;
            for &b in &bytes[i..i + 2 + end + 2] {
                if b == b'\n' {
                    line += 1;
                }
            }
            i += 2 + end + 2;
            if let Some(nl) = src[..i].rfind('\n') {
                line_start = nl + 1;
            }
            continue;
        }
        if c == b'`' {
            let end = src[i..].find('\n').map_or(bytes.len(), |n| i + n);
            let directive = src[i..end].trim();
            if directive.starts_with("`timescale") {
                i = end;
                continue;
            }
            return Err(ParseError::Unsupported {
                line: pos.line,
                col: pos.col,
                construct: format!("compiler directive `{directive}`"),
            });
        }
        if c.is_ascii_alphabetic() || c == b'_' || c == b'\\' {
            let start = i;
            if c == b'\\' {
                return Err(ParseError::Unsupported {
                    line: pos.line,
                    col: pos.col,
                    construct: "escaped identifier".into(),
                });
            }
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$')
            {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() || c == b'\'' {
            let (tok, next) = lex_number(src, i, pos)?;
            out.push(Token { tok, pos });
            i = next;
            continue;
        }
        if let Some(f) = FOREIGN.iter().find(|f| src[i..].starts_with(**f)) {
            // `<=` is supported and shares a prefix with `<`.
            if !src[i..].starts_with("<=") {
                out.push(Token {
                    tok: Tok::Foreign(f.to_string()),
                    pos,
                });
                i += f.len();
                continue;
            }
        }
        if let Some(s) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            out.push(Token {
                tok: Tok::Sym(s),
                pos,
            });
            i += s.len();
            continue;
        }
        return Err(ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: format!("unexpected character `{}`", c as char),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos {
            line,
            col: i - line_start + 1,
        },
    });
    Ok(out)
}

fn digits_while(src: &str, mut i: usize, ok: impl Fn(u8) -> bool) -> usize {
    let b = src.as_bytes();
    while i < b.len() && (ok(b[i]) || b[i] == b'_') {
        i += 1;
    }
    i
}

fn lex_number(src: &str, start: usize, pos: Pos) -> Result<(Tok, usize), ParseError> {
    let syntax = |message: String| ParseError::Syntax {
        line: pos.line,
        col: pos.col,
        message,
    };
    let b = src.as_bytes();
    let mut i = start;
    let mut width = None;
    if b[i].is_ascii_digit() {
        let end = digits_while(src, i, |c| c.is_ascii_digit());
        let text: String = src[i..end].chars().filter(|&c| c != '_').collect();
        i = end;
        let j = src[i..].len() - src[i..].trim_start_matches([' ', '\t']).len();
        if b.get(i + j) != Some(&b'\'') {
            let value = text
                .parse::<u64>()
                .map_err(|_| syntax(format!("number `{text}` is too large")))?;
            return Ok((Tok::Number { width: None, value }, i));
        }
        let w: u32 = text
            .parse()
            .map_err(|_| syntax(format!("bad width `{text}`")))?;
        if w == 0 || w > 64 {
            return Err(ParseError::Unsupported {
                line: pos.line,
                col: pos.col,
                construct: format!("literal width {w} (1..=64 supported)"),
            });
        }
        width = Some(w);
        i += j;
    }
    // at the apostrophe
    i += 1;
    let base_char = b.get(i).copied().unwrap_or(b' ').to_ascii_lowercase();
    if base_char == b's' {
        return Err(ParseError::Unsupported {
            line: pos.line,
            col: pos.col,
            construct: "signed literal".into(),
        });
    }
    i += 1;
    let radix = match base_char {
        b'b' => 2,
        b'o' => 8,
        b'd' => 10,
        b'h' => 16,
        _ => return Err(syntax("expected base b, o, d or h after `'`".into())),
    };
    while i < b.len() && (b[i] == b' ' || b[i] == b'\t') {
        i += 1;
    }
    let end = digits_while(src, i, |c| c.is_ascii_alphanumeric() && c != b'_');
    let text: String = src[i..end].chars().filter(|&c| c != '_').collect();
    if text.is_empty() {
        return Err(syntax("literal has no digits".into()));
    }
    if text
        .chars()
        .any(|c| matches!(c, 'x' | 'X' | 'z' | 'Z' | '?'))
    {
        return Err(ParseError::Unsupported {
            line: pos.line,
            col: pos.col,
            construct: "x/z literal digits".into(),
        });
    }
    let value = u64::from_str_radix(&text, radix)
        .map_err(|_| syntax(format!("bad base-{radix} digits `{text}`")))?;
    if let Some(w) = width {
        if w < 64 && value >> w != 0 {
            return Err(syntax(format!("value {value} does not fit in {w} bits")));
        }
    }
    Ok((Tok::Number { width, value }, end))
}
