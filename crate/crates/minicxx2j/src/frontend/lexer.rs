//! Hand-rolled lexer for MiniCxx.
//!
//! `#include` lines are tolerated and discarded; every other preprocessor
//! directive is a syntax error. The `// @resource` marker comment is not a
//! token but its line number is recorded so the parser can annotate the
//! class definition that follows it.

use crate::diag::{Code, Diagnostic, Span};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    /// Includes the surrounding quotes, escapes kept verbatim.
    Char(String),
    Str(String),
    Kw(Kw),
    P(P),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kw {
    Class,
    Enum,
    Typedef,
    Public,
    Private,
    Protected,
    Virtual,
    Const,
    Return,
    If,
    Else,
    While,
    For,
    True,
    False,
    Throw,
    Try,
    Catch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P {
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    ColonColon,
    Tilde,
    Lt,
    Gt,
    Le,
    Ge,
    Shl,
    Shr,
    EqEq,
    Ne,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Not,
    AndAnd,
    OrOr,
    Amp,
    Inc,
    Dec,
    Arrow,
    Dot,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug)]
pub struct LexOutput {
    pub tokens: Vec<Token>,
    /// Lines holding a `// @resource` marker comment.
    pub resource_marker_lines: BTreeSet<usize>,
}

pub fn lex(src: &str) -> Result<LexOutput, Diagnostic> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut markers = BTreeSet::new();
    let mut i = 0;
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! err {
        ($off:expr, $msg:expr) => {
            return Err(Diagnostic::at(Code::SyntaxError, $msg, src, $off))
        };
    }

    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let (tline, tcol) = (line, col);

        let mut advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
            for _ in 0..n {
                if *i < bytes.len() {
                    if bytes[*i] == b'\n' {
                        *line += 1;
                        *col = 1;
                    } else {
                        *col += 1;
                    }
                    *i += 1;
                }
            }
        };

        if c.is_ascii_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }

        // Line comment; record the resource marker.
        if c == '/' && i + 1 < bytes.len() && bytes[i + 1] == b'/' {
            let mut j = i;
            while j < bytes.len() && bytes[j] != b'\n' {
                j += 1;
            }
            let text = &src[i + 2..j];
            if text.trim() == "@resource" {
                markers.insert(line);
            }
            advance(&mut i, &mut line, &mut col, j - i);
            continue;
        }

        // Block comment.
        if c == '/' && i + 1 < bytes.len() && bytes[i + 1] == b'*' {
            let mut j = i + 2;
            loop {
                if j + 1 >= bytes.len() {
                    err!(start, "unterminated block comment");
                }
                if bytes[j] == b'*' && bytes[j + 1] == b'/' {
                    j += 2;
                    break;
                }
                j += 1;
            }
            advance(&mut i, &mut line, &mut col, j - i);
            continue;
        }

        // Preprocessor: only #include lines pass, and they are dropped.
        if c == '#' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j] as char).is_ascii_whitespace() && bytes[j] != b'\n' {
                j += 1;
            }
            let word_start = j;
            while j < bytes.len() && (bytes[j] as char).is_ascii_alphabetic() {
                j += 1;
            }
            let word = &src[word_start..j];
            if word != "include" {
                err!(start, format!("unsupported preprocessor directive '#{word}'"));
            }
            while j < bytes.len() && bytes[j] != b'\n' {
                j += 1;
            }
            advance(&mut i, &mut line, &mut col, j - i);
            continue;
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len()
                && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
            {
                j += 1;
            }
            let text = &src[i..j];
            let tok = match text {
                "class" => Tok::Kw(Kw::Class),
                "enum" => Tok::Kw(Kw::Enum),
                "typedef" => Tok::Kw(Kw::Typedef),
                "public" => Tok::Kw(Kw::Public),
                "private" => Tok::Kw(Kw::Private),
                "protected" => Tok::Kw(Kw::Protected),
                "virtual" => Tok::Kw(Kw::Virtual),
                "const" => Tok::Kw(Kw::Const),
                "return" => Tok::Kw(Kw::Return),
                "if" => Tok::Kw(Kw::If),
                "else" => Tok::Kw(Kw::Else),
                "while" => Tok::Kw(Kw::While),
                "for" => Tok::Kw(Kw::For),
                "true" => Tok::Kw(Kw::True),
                "false" => Tok::Kw(Kw::False),
                "throw" => Tok::Kw(Kw::Throw),
                "try" => Tok::Kw(Kw::Try),
                "catch" => Tok::Kw(Kw::Catch),
                _ => Tok::Ident(text.to_string()),
            };
            tokens.push(Token {
                tok,
                span: Span::new(i, j),
                line: tline,
                col: tcol,
            });
            advance(&mut i, &mut line, &mut col, j - i);
            continue;
        }

        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                j += 1;
            }
            tokens.push(Token {
                tok: Tok::Int(src[i..j].to_string()),
                span: Span::new(i, j),
                line: tline,
                col: tcol,
            });
            advance(&mut i, &mut line, &mut col, j - i);
            continue;
        }

        if c == '\'' || c == '"' {
            let quote = c;
            let mut j = i + 1;
            loop {
                if j >= bytes.len() {
                    err!(start, "unterminated literal");
                }
                if bytes[j] == b'\\' {
                    j += 2;
                    continue;
                }
                if bytes[j] as char == quote {
                    j += 1;
                    break;
                }
                if bytes[j] == b'\n' {
                    err!(start, "unterminated literal");
                }
                j += 1;
            }
            let text = src[i..j].to_string();
            let tok = if quote == '\'' { Tok::Char(text) } else { Tok::Str(text) };
            tokens.push(Token {
                tok,
                span: Span::new(i, j),
                line: tline,
                col: tcol,
            });
            advance(&mut i, &mut line, &mut col, j - i);
            continue;
        }

        // Punctuation, maximal munch.
        let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
        let (p, len) = match two {
            "::" => (P::ColonColon, 2),
            "<<" => (P::Shl, 2),
            ">>" => (P::Shr, 2),
            "<=" => (P::Le, 2),
            ">=" => (P::Ge, 2),
            "==" => (P::EqEq, 2),
            "!=" => (P::Ne, 2),
            "&&" => (P::AndAnd, 2),
            "||" => (P::OrOr, 2),
            "++" => (P::Inc, 2),
            "--" => (P::Dec, 2),
            "->" => (P::Arrow, 2),
            _ => match c {
                '{' => (P::LBrace, 1),
                '}' => (P::RBrace, 1),
                '(' => (P::LParen, 1),
                ')' => (P::RParen, 1),
                '[' => (P::LBracket, 1),
                ']' => (P::RBracket, 1),
                ';' => (P::Semi, 1),
                ',' => (P::Comma, 1),
                ':' => (P::Colon, 1),
                '~' => (P::Tilde, 1),
                '<' => (P::Lt, 1),
                '>' => (P::Gt, 1),
                '=' => (P::Assign, 1),
                '+' => (P::Plus, 1),
                '-' => (P::Minus, 1),
                '*' => (P::Star, 1),
                '/' => (P::Slash, 1),
                '%' => (P::Percent, 1),
                '!' => (P::Not, 1),
                '&' => (P::Amp, 1),
                '.' => (P::Dot, 1),
                _ => err!(start, format!("unexpected character '{c}'")),
            },
        };
        tokens.push(Token {
            tok: Tok::P(p),
            span: Span::new(i, i + len),
            line: tline,
            col: tcol,
        });
        advance(&mut i, &mut line, &mut col, len);
    }

    Ok(LexOutput {
        tokens,
        resource_marker_lines: markers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_class_skeleton() {
        let t = toks("class Foo {};");
        assert_eq!(
            t,
            vec![
                Tok::Kw(Kw::Class),
                Tok::Ident("Foo".into()),
                Tok::P(P::LBrace),
                Tok::P(P::RBrace),
                Tok::P(P::Semi),
            ]
        );
    }

    #[test]
    fn include_lines_are_discarded() {
        let t = toks("#include <string>\nclass A;");
        assert_eq!(t[0], Tok::Kw(Kw::Class));
    }

    #[test]
    fn other_directives_are_errors() {
        let e = lex("#define X 1\n").unwrap_err();
        assert_eq!(e.code, Code::SyntaxError);
    }

    #[test]
    fn resource_marker_lines_are_recorded() {
        let out = lex("// @resource\nclass Cursor {};\n").unwrap();
        assert!(out.resource_marker_lines.contains(&1));
    }

    #[test]
    fn maximal_munch_on_shifts_and_compares() {
        let t = toks("a << b <= c == d");
        assert!(t.contains(&Tok::P(P::Shl)));
        assert!(t.contains(&Tok::P(P::Le)));
        assert!(t.contains(&Tok::P(P::EqEq)));
    }

    #[test]
    fn string_escapes_kept_verbatim() {
        let t = toks(r#""a\n\"b""#);
        assert_eq!(t, vec![Tok::Str(r#""a\n\"b""#.into())]);
    }

    #[test]
    fn error_carries_line_and_column() {
        let e = lex("class A;\n   @").unwrap_err();
        assert_eq!((e.line, e.col), (2, 4));
    }
}
