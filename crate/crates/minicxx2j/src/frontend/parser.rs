//! Recursive-descent parser for MiniCxx.
//!
//! A translation unit is a sequence of typedefs, enums, forward
//! declarations, class definitions and free-function definitions. `->`
//! and `.` are normalized into one member-access form at parse time, and
//! `<<`/`>>` always parse as stream shifts.

use super::ast::*;
use super::lexer::{self, Kw, LexOutput, Tok, Token, P};
use crate::diag::{Code, Diagnostic, Span};
use std::collections::BTreeSet;

pub struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    resource_lines: BTreeSet<usize>,
    /// Type names usable in casts and declarations: builtins plus every
    /// typedef, enum and class seen so far in this unit.
    known_types: BTreeSet<String>,
}

const TYPE_WORDS: &[&str] = &["void", "bool", "char", "int", "long", "double", "unsigned", "signed"];

const STD_TYPES: &[&str] = &[
    "std::string",
    "std::vector",
    "std::map",
    "std::iostream",
    "std::istream",
    "std::ostream",
    "std::stringstream",
];

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, builtin_typedefs: &[&str]) -> Result<Self, Diagnostic> {
        let LexOutput {
            tokens,
            resource_marker_lines,
        } = lexer::lex(src)?;
        let mut known_types: BTreeSet<String> =
            STD_TYPES.iter().map(|s| s.to_string()).collect();
        for w in TYPE_WORDS {
            known_types.insert(w.to_string());
        }
        for t in builtin_typedefs {
            known_types.insert(t.to_string());
        }
        Ok(Parser {
            src,
            tokens,
            pos: 0,
            resource_lines: resource_marker_lines,
            known_types,
        })
    }

    // ---- token helpers ----

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn cur_token(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn cur_start(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.span.start)
            .unwrap_or(self.src.len())
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn at_p(&self, p: P) -> bool {
        matches!(self.peek(), Some(Tok::P(q)) if *q == p)
    }

    fn at_kw(&self, k: Kw) -> bool {
        matches!(self.peek(), Some(Tok::Kw(q)) if *q == k)
    }

    fn eat_p(&mut self, p: P) -> bool {
        if self.at_p(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err_here(&self, msg: impl Into<String>) -> Diagnostic {
        let off = self.cur_start();
        Diagnostic::at(Code::SyntaxError, msg, self.src, off)
    }

    fn expect_p(&mut self, p: P, what: &str) -> Result<Token, Diagnostic> {
        if self.at_p(p) {
            Ok(self.bump())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Span), Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let t = self.bump();
                if let Tok::Ident(name) = t.tok {
                    Ok((name, t.span))
                } else {
                    unreachable!()
                }
            }
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    /// Splits a `>>` token into two `>` when closing nested template args.
    fn eat_gt_splitting_shr(&mut self) -> bool {
        if self.at_p(P::Gt) {
            self.pos += 1;
            return true;
        }
        if self.at_p(P::Shr) {
            let t = &mut self.tokens[self.pos];
            let s = t.span.start;
            t.tok = Tok::P(P::Gt);
            t.span = Span::new(s + 1, t.span.end);
            return true;
        }
        false
    }

    // ---- types ----

    fn ident_text(&self, k: usize) -> Option<&str> {
        match self.peek_at(k) {
            Some(Tok::Ident(s)) => Some(s.as_str()),
            _ => None,
        }
    }

    /// Attempts to parse a type spelling. On failure the position is
    /// restored and None is returned. `saw_star` reports whether the
    /// spelling carried pointer decoration (used to reject `a * b;` as a
    /// declaration).
    fn try_parse_type(&mut self) -> Option<(String, Span, bool)> {
        let save = self.pos;
        match self.parse_type_inner() {
            Ok(x) => Some(x),
            Err(_) => {
                self.pos = save;
                None
            }
        }
    }

    fn parse_type_inner(&mut self) -> Result<(String, Span, bool), Diagnostic> {
        let start = self.cur_start();
        let mut words: Vec<String> = Vec::new();
        if self.at_kw(Kw::Const) {
            self.bump();
        }
        // Multi-word intrinsics: (unsigned|signed)? (char|int|long (long)?|double)
        match self.ident_text(0) {
            Some("unsigned") | Some("signed") => {
                words.push(self.bump_ident());
                match self.ident_text(0) {
                    Some("char") | Some("int") | Some("double") => words.push(self.bump_ident()),
                    Some("long") => {
                        words.push(self.bump_ident());
                        if self.ident_text(0) == Some("long") {
                            words.push(self.bump_ident());
                        }
                    }
                    _ => {}
                }
            }
            Some("long") => {
                words.push(self.bump_ident());
                if self.ident_text(0) == Some("long") {
                    words.push(self.bump_ident());
                }
            }
            Some(_) => {
                let mut name = self.bump_ident();
                while self.at_p(P::ColonColon) {
                    self.bump();
                    let (part, _) = self.expect_ident("identifier after '::'")?;
                    name.push_str("::");
                    name.push_str(&part);
                }
                words.push(name);
            }
            None => return Err(self.err_here("expected type")),
        }
        let mut spelling = words.join(" ");

        // Template arguments, only for the known std templates.
        if self.at_p(P::Lt) {
            if spelling != "std::vector" && spelling != "std::map" {
                return Err(self.err_here(format!(
                    "user-defined template '{spelling}' is not supported"
                )));
            }
            self.bump();
            let mut args = Vec::new();
            loop {
                let (arg, _, _) = self.parse_type_inner()?;
                args.push(arg);
                if self.eat_p(P::Comma) {
                    continue;
                }
                if self.eat_gt_splitting_shr() {
                    break;
                }
                return Err(self.err_here("expected ',' or '>' in template arguments"));
            }
            spelling = format!("{}<{}>", spelling, args.join(", "));
        }

        let mut saw_star = false;
        loop {
            if self.at_p(P::Star) {
                self.bump();
                saw_star = true;
            } else if self.at_p(P::Amp) {
                self.bump();
            } else {
                break;
            }
        }
        let span = Span::new(start, self.prev_end());
        Ok((spelling, span, saw_star))
    }

    fn bump_ident(&mut self) -> String {
        match self.bump().tok {
            Tok::Ident(s) => s,
            _ => unreachable!("caller checked for identifier"),
        }
    }

    fn type_is_known(&self, spelling: &str) -> bool {
        let base = spelling.split('<').next().unwrap_or(spelling);
        let first_word = base.split_whitespace().next().unwrap_or(base);
        self.known_types.contains(base)
            || self.known_types.contains(first_word)
            || base.starts_with("std::")
    }

    // ---- translation unit ----

    pub fn parse_translation_unit(&mut self) -> Result<AstNode, Diagnostic> {
        let mut children = Vec::new();
        while self.peek().is_some() {
            children.push(self.parse_top_level()?);
        }
        Ok(AstNode::with_children(
            NodeKind::TranslationUnit,
            Span::new(0, self.src.len()),
            Payload::None,
            children,
        ))
    }

    fn parse_top_level(&mut self) -> Result<AstNode, Diagnostic> {
        match self.peek() {
            Some(Tok::Kw(Kw::Typedef)) => self.parse_typedef(),
            Some(Tok::Kw(Kw::Enum)) => self.parse_enum(),
            Some(Tok::Kw(Kw::Class)) => self.parse_class_or_forward(),
            Some(_) => self.parse_free_function(),
            None => Err(self.err_here("unexpected end of input")),
        }
    }

    fn parse_typedef(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump(); // typedef
        let (target, _, _) = self.parse_type_inner()?;
        let (name, _) = self.expect_ident("typedef name")?;
        let end_tok = self.expect_p(P::Semi, "';' after typedef")?;
        self.known_types.insert(name.clone());
        Ok(AstNode::new(
            NodeKind::TypedefDecl,
            Span::new(start, end_tok.span.end),
            Payload::Typedef { name, target },
        ))
    }

    fn parse_enum(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump(); // enum
        let (name, _) = self.expect_ident("enum name")?;
        self.expect_p(P::LBrace, "'{' after enum name")?;
        let mut entries: Vec<EnumEntry> = Vec::new();
        let mut next_value: i64 = 0;
        loop {
            if self.at_p(P::RBrace) {
                break;
            }
            let (entry_name, _) = self.expect_ident("enum entry")?;
            let (value, explicit) = if self.eat_p(P::Assign) {
                let neg = self.eat_p(P::Minus);
                let v = match self.peek() {
                    Some(Tok::Int(_)) => {
                        let t = self.bump();
                        match t.tok {
                            Tok::Int(text) => text.parse::<i64>().map_err(|_| {
                                Diagnostic::at(
                                    Code::SyntaxError,
                                    "enum value out of range",
                                    self.src,
                                    t.span.start,
                                )
                            })?,
                            _ => unreachable!(),
                        }
                    }
                    _ => return Err(self.err_here("expected integer enum value")),
                };
                (if neg { -v } else { v }, true)
            } else {
                (next_value, false)
            };
            next_value = value + 1;
            entries.push(EnumEntry {
                name: entry_name,
                value,
                explicit,
            });
            if !self.eat_p(P::Comma) {
                break;
            }
        }
        self.expect_p(P::RBrace, "'}' closing enum")?;
        let end_tok = self.expect_p(P::Semi, "';' after enum")?;
        self.known_types.insert(name.clone());
        Ok(AstNode::new(
            NodeKind::EnumDecl,
            Span::new(start, end_tok.span.end),
            Payload::Enum { name, entries },
        ))
    }

    fn parse_class_or_forward(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        let class_line = self.cur_token().map(|t| t.line).unwrap_or(0);
        self.bump(); // class
        let (name, _) = self.expect_ident("class name")?;
        self.known_types.insert(name.clone());
        if self.at_p(P::Semi) {
            let end_tok = self.bump();
            return Ok(AstNode::new(
                NodeKind::ForwardDecl,
                Span::new(start, end_tok.span.end),
                Payload::Name { name },
            ));
        }

        let mut bases = Vec::new();
        if self.eat_p(P::Colon) {
            loop {
                if self.at_kw(Kw::Private) || self.at_kw(Kw::Protected) {
                    return Err(self.err_here("only public inheritance is supported"));
                }
                if self.at_kw(Kw::Public) {
                    self.bump();
                }
                let (base, _) = self.expect_ident("base class name")?;
                bases.push(BaseSpec { name: base });
                if !self.eat_p(P::Comma) {
                    break;
                }
            }
        }

        self.expect_p(P::LBrace, "'{' opening class body")?;
        let mut members = Vec::new();
        let mut visibility = Visibility::Private;
        while !self.at_p(P::RBrace) {
            if let Some(v) = self.try_visibility_label()? {
                visibility = v;
                continue;
            }
            members.push(self.parse_member(&name, visibility)?);
        }
        self.expect_p(P::RBrace, "'}' closing class body")?;
        let end_tok = self.expect_p(P::Semi, "';' after class body")?;

        let resource_annotated = class_line > 1 && self.resource_lines.contains(&(class_line - 1));
        Ok(AstNode::with_children(
            NodeKind::ClassDecl,
            Span::new(start, end_tok.span.end),
            Payload::Class {
                name,
                bases,
                resource_annotated,
            },
            members,
        ))
    }

    fn try_visibility_label(&mut self) -> Result<Option<Visibility>, Diagnostic> {
        let v = match self.peek() {
            Some(Tok::Kw(Kw::Public)) => Visibility::Public,
            Some(Tok::Kw(Kw::Private)) => Visibility::Private,
            Some(Tok::Kw(Kw::Protected)) => Visibility::Protected,
            _ => return Ok(None),
        };
        if matches!(self.peek_at(1), Some(Tok::P(P::Colon))) {
            self.bump();
            self.bump();
            return Ok(Some(v));
        }
        Ok(None)
    }

    fn parse_member(
        &mut self,
        class_name: &str,
        visibility: Visibility,
    ) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();

        if self.at_kw(Kw::Enum) {
            return self.parse_enum();
        }

        let mut is_virtual = false;
        if self.at_kw(Kw::Virtual) {
            self.bump();
            is_virtual = true;
        }

        // Destructor.
        if self.at_p(P::Tilde) {
            self.bump();
            let (dname, _) = self.expect_ident("destructor name")?;
            if dname != class_name {
                return Err(self.err_here("destructor name must match class name"));
            }
            self.expect_p(P::LParen, "'(' after destructor name")?;
            self.expect_p(P::RParen, "')' in destructor")?;
            let body = self.parse_block()?;
            let end = body.span.end;
            return Ok(AstNode::with_children(
                NodeKind::DtorDecl,
                Span::new(start, end),
                Payload::Dtor {
                    name: dname,
                    visibility,
                },
                vec![body],
            ));
        }

        // Constructor: identifier equal to the class name followed by '('.
        if !is_virtual
            && self.ident_text(0) == Some(class_name)
            && matches!(self.peek_at(1), Some(Tok::P(P::LParen)))
        {
            let (cname, _) = self.expect_ident("constructor name")?;
            let params = self.parse_params()?;
            let mut inits = Vec::new();
            if self.eat_p(P::Colon) {
                loop {
                    let init_start = self.cur_start();
                    let (target, _) = self.expect_ident("initializer target")?;
                    self.expect_p(P::LParen, "'(' in initializer")?;
                    let mut args = Vec::new();
                    if !self.at_p(P::RParen) {
                        loop {
                            args.push(self.parse_expr()?);
                            if !self.eat_p(P::Comma) {
                                break;
                            }
                        }
                    }
                    let close = self.expect_p(P::RParen, "')' in initializer")?;
                    inits.push(AstNode::with_children(
                        NodeKind::Call,
                        Span::new(init_start, close.span.end),
                        Payload::Call { callee: target },
                        args,
                    ));
                    if !self.eat_p(P::Comma) {
                        break;
                    }
                }
            }
            let body = self.parse_block()?;
            let end = body.span.end;
            let init_count = inits.len();
            let mut children = params;
            children.extend(inits);
            children.push(body);
            return Ok(AstNode::with_children(
                NodeKind::CtorDecl,
                Span::new(start, end),
                Payload::Ctor {
                    name: cname,
                    visibility,
                    init_count,
                },
                children,
            ));
        }

        // Field or method: type name ...
        let (ty, _, _) = self.parse_type_inner()?;
        let (name, _) = self.expect_ident("member name")?;
        if self.at_p(P::LParen) {
            let params = self.parse_params()?;
            let mut is_pure = false;
            let mut body = None;
            if self.eat_p(P::Assign) {
                match self.peek() {
                    Some(Tok::Int(v)) if v == "0" => {
                        self.bump();
                    }
                    _ => return Err(self.err_here("expected '0' in pure-virtual marker")),
                }
                is_pure = true;
                self.expect_p(P::Semi, "';' after pure-virtual method")?;
            } else if self.at_p(P::LBrace) {
                body = Some(self.parse_block()?);
            } else {
                self.expect_p(P::Semi, "';' after method declaration")?;
            }
            let end = body
                .as_ref()
                .map(|b| b.span.end)
                .unwrap_or_else(|| self.prev_end());
            let has_body = body.is_some();
            let mut children = params;
            if let Some(b) = body {
                children.push(b);
            }
            return Ok(AstNode::with_children(
                NodeKind::MethodDecl,
                Span::new(start, end),
                Payload::Method {
                    name,
                    ret: ty,
                    visibility,
                    is_virtual,
                    is_pure,
                    has_body,
                },
                children,
            ));
        }
        let end_tok = self.expect_p(P::Semi, "';' after field")?;
        Ok(AstNode::new(
            NodeKind::FieldDecl,
            Span::new(start, end_tok.span.end),
            Payload::Field {
                name,
                ty,
                visibility,
            },
        ))
    }

    fn parse_params(&mut self) -> Result<Vec<AstNode>, Diagnostic> {
        self.expect_p(P::LParen, "'('")?;
        let mut params = Vec::new();
        if !self.at_p(P::RParen) {
            loop {
                let start = self.cur_start();
                let (ty, _, _) = self.parse_type_inner()?;
                let (name, nspan) = self.expect_ident("parameter name")?;
                params.push(AstNode::new(
                    NodeKind::ParamDecl,
                    Span::new(start, nspan.end),
                    Payload::Param { name, ty },
                ));
                if !self.eat_p(P::Comma) {
                    break;
                }
            }
        }
        self.expect_p(P::RParen, "')'")?;
        Ok(params)
    }

    fn parse_free_function(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        let (ty, _, _) = self.parse_type_inner()?;
        let (name, _) = self.expect_ident("function name")?;
        let params = self.parse_params()?;
        let body = self.parse_block()?;
        let end = body.span.end;
        let mut children = params;
        children.push(body);
        Ok(AstNode::with_children(
            NodeKind::MethodDecl,
            Span::new(start, end),
            Payload::Method {
                name,
                ret: ty,
                visibility: Visibility::Public,
                is_virtual: false,
                is_pure: false,
                has_body: true,
            },
            children,
        ))
    }

    // ---- statements ----

    pub fn parse_block(&mut self) -> Result<AstNode, Diagnostic> {
        let open = self.expect_p(P::LBrace, "'{'")?;
        let mut stmts = Vec::new();
        while !self.at_p(P::RBrace) {
            if self.peek().is_none() {
                return Err(self.err_here("unterminated block"));
            }
            stmts.push(self.parse_statement()?);
        }
        let close = self.expect_p(P::RBrace, "'}'")?;
        Ok(AstNode::with_children(
            NodeKind::Block,
            Span::new(open.span.start, close.span.end),
            Payload::None,
            stmts,
        ))
    }

    fn parse_statement(&mut self) -> Result<AstNode, Diagnostic> {
        match self.peek() {
            Some(Tok::P(P::LBrace)) => self.parse_block(),
            Some(Tok::Kw(Kw::If)) => self.parse_if(),
            Some(Tok::Kw(Kw::While)) => self.parse_while(),
            Some(Tok::Kw(Kw::For)) => self.parse_for(),
            Some(Tok::Kw(Kw::Return)) => self.parse_return(),
            Some(Tok::Kw(Kw::Throw)) => self.parse_throw(),
            Some(Tok::Kw(Kw::Try)) => self.parse_try(),
            _ => {
                if let Some(stmt) = self.try_parse_var_decl()? {
                    return Ok(stmt);
                }
                let start = self.cur_start();
                let expr = self.parse_expr()?;
                let end_tok = self.expect_p(P::Semi, "';' after expression")?;
                Ok(AstNode::with_children(
                    NodeKind::ExprStmt,
                    Span::new(start, end_tok.span.end),
                    Payload::None,
                    vec![expr],
                ))
            }
        }
    }

    /// Declaration statements need two identifiers in a row (`Type name`)
    /// followed by `;`, `=` or `(`. Pointer spellings are rejected here so
    /// `a * b;` stays an expression.
    fn try_parse_var_decl(&mut self) -> Result<Option<AstNode>, Diagnostic> {
        let save = self.pos;
        let start = self.cur_start();
        let Some((ty, _, saw_star)) = self.try_parse_type() else {
            return Ok(None);
        };
        if saw_star {
            self.pos = save;
            return Ok(None);
        }
        let name = match self.peek() {
            Some(Tok::Ident(_)) => self.bump_ident(),
            _ => {
                self.pos = save;
                return Ok(None);
            }
        };
        match self.peek() {
            Some(Tok::P(P::Semi)) => {
                let end_tok = self.bump();
                Ok(Some(AstNode::new(
                    NodeKind::VarDeclStmt,
                    Span::new(start, end_tok.span.end),
                    Payload::VarDecl {
                        name,
                        ty,
                        ctor_style: false,
                    },
                )))
            }
            Some(Tok::P(P::Assign)) => {
                self.bump();
                let init = self.parse_expr()?;
                let end_tok = self.expect_p(P::Semi, "';' after declaration")?;
                Ok(Some(AstNode::with_children(
                    NodeKind::VarDeclStmt,
                    Span::new(start, end_tok.span.end),
                    Payload::VarDecl {
                        name,
                        ty,
                        ctor_style: false,
                    },
                    vec![init],
                )))
            }
            Some(Tok::P(P::LParen)) => {
                self.bump();
                let mut args = Vec::new();
                if !self.at_p(P::RParen) {
                    loop {
                        args.push(self.parse_expr()?);
                        if !self.eat_p(P::Comma) {
                            break;
                        }
                    }
                }
                self.expect_p(P::RParen, "')' in declaration")?;
                let end_tok = self.expect_p(P::Semi, "';' after declaration")?;
                Ok(Some(AstNode::with_children(
                    NodeKind::VarDeclStmt,
                    Span::new(start, end_tok.span.end),
                    Payload::VarDecl {
                        name,
                        ty,
                        ctor_style: true,
                    },
                    args,
                )))
            }
            _ => {
                self.pos = save;
                Ok(None)
            }
        }
    }

    fn parse_if(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump(); // if
        self.expect_p(P::LParen, "'(' after if")?;
        let cond = self.parse_expr()?;
        self.expect_p(P::RParen, "')' after condition")?;
        let then = self.parse_statement()?;
        let mut children = vec![cond, then];
        let mut end = children[1].span.end;
        if self.at_kw(Kw::Else) {
            self.bump();
            let els = self.parse_statement()?;
            end = els.span.end;
            children.push(els);
        }
        Ok(AstNode::with_children(
            NodeKind::If,
            Span::new(start, end),
            Payload::None,
            children,
        ))
    }

    fn parse_while(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump();
        self.expect_p(P::LParen, "'(' after while")?;
        let cond = self.parse_expr()?;
        self.expect_p(P::RParen, "')' after condition")?;
        let body = self.parse_statement()?;
        let end = body.span.end;
        Ok(AstNode::with_children(
            NodeKind::While,
            Span::new(start, end),
            Payload::None,
            vec![cond, body],
        ))
    }

    fn parse_for(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump();
        self.expect_p(P::LParen, "'(' after for")?;
        let mut children = Vec::new();
        let has_init = if self.eat_p(P::Semi) {
            false
        } else if let Some(decl) = self.try_parse_var_decl()? {
            children.push(decl);
            true
        } else {
            let estart = self.cur_start();
            let e = self.parse_expr()?;
            let end_tok = self.expect_p(P::Semi, "';' in for")?;
            children.push(AstNode::with_children(
                NodeKind::ExprStmt,
                Span::new(estart, end_tok.span.end),
                Payload::None,
                vec![e],
            ));
            true
        };
        let has_cond = if self.at_p(P::Semi) {
            false
        } else {
            children.push(self.parse_expr()?);
            true
        };
        self.expect_p(P::Semi, "';' after for condition")?;
        let has_step = if self.at_p(P::RParen) {
            false
        } else {
            children.push(self.parse_expr()?);
            true
        };
        self.expect_p(P::RParen, "')' closing for")?;
        let body = self.parse_statement()?;
        let end = body.span.end;
        children.push(body);
        Ok(AstNode::with_children(
            NodeKind::For,
            Span::new(start, end),
            Payload::For {
                has_init,
                has_cond,
                has_step,
            },
            children,
        ))
    }

    fn parse_return(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump();
        let mut children = Vec::new();
        if !self.at_p(P::Semi) {
            children.push(self.parse_expr()?);
        }
        let end_tok = self.expect_p(P::Semi, "';' after return")?;
        Ok(AstNode::with_children(
            NodeKind::Return,
            Span::new(start, end_tok.span.end),
            Payload::None,
            children,
        ))
    }

    fn parse_throw(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump();
        let expr = self.parse_expr()?;
        let end_tok = self.expect_p(P::Semi, "';' after throw")?;
        Ok(AstNode::with_children(
            NodeKind::Throw,
            Span::new(start, end_tok.span.end),
            Payload::None,
            vec![expr],
        ))
    }

    fn parse_try(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        self.bump();
        let block = self.parse_block()?;
        let mut children = vec![block];
        let mut end = children[0].span.end;
        let mut any_catch = false;
        while self.at_kw(Kw::Catch) {
            any_catch = true;
            self.bump();
            self.expect_p(P::LParen, "'(' after catch")?;
            let pstart = self.cur_start();
            let (ty, _, _) = self.parse_type_inner()?;
            let (pname, nspan) = self.expect_ident("catch parameter name")?;
            self.expect_p(P::RParen, "')' after catch parameter")?;
            children.push(AstNode::new(
                NodeKind::ParamDecl,
                Span::new(pstart, nspan.end),
                Payload::Param { name: pname, ty },
            ));
            let handler = self.parse_block()?;
            end = handler.span.end;
            children.push(handler);
        }
        if !any_catch {
            return Err(self.err_here("try without catch"));
        }
        Ok(AstNode::with_children(
            NodeKind::Try,
            Span::new(start, end),
            Payload::None,
            children,
        ))
    }

    // ---- expressions ----

    pub fn parse_expr(&mut self) -> Result<AstNode, Diagnostic> {
        self.parse_assign()
    }

    fn parse_assign(&mut self) -> Result<AstNode, Diagnostic> {
        let lhs = self.parse_or()?;
        if self.at_p(P::Assign) {
            self.bump();
            let rhs = self.parse_assign()?;
            let span = Span::cover(lhs.span, rhs.span);
            return Ok(AstNode::with_children(
                NodeKind::BinaryOp,
                span,
                Payload::Binary { op: BinOp::Assign },
                vec![lhs, rhs],
            ));
        }
        Ok(lhs)
    }

    fn binary_left(
        &mut self,
        next: fn(&mut Self) -> Result<AstNode, Diagnostic>,
        table: &[(P, BinOp)],
    ) -> Result<AstNode, Diagnostic> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (p, op) in table {
                if self.at_p(*p) {
                    self.bump();
                    let rhs = next(self)?;
                    let span = Span::cover(lhs.span, rhs.span);
                    lhs = AstNode::with_children(
                        NodeKind::BinaryOp,
                        span,
                        Payload::Binary { op: *op },
                        vec![lhs, rhs],
                    );
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn parse_or(&mut self) -> Result<AstNode, Diagnostic> {
        self.binary_left(Self::parse_and, &[(P::OrOr, BinOp::Or)])
    }

    fn parse_and(&mut self) -> Result<AstNode, Diagnostic> {
        self.binary_left(Self::parse_equality, &[(P::AndAnd, BinOp::And)])
    }

    fn parse_equality(&mut self) -> Result<AstNode, Diagnostic> {
        self.binary_left(
            Self::parse_relational,
            &[(P::EqEq, BinOp::Eq), (P::Ne, BinOp::Ne)],
        )
    }

    fn parse_relational(&mut self) -> Result<AstNode, Diagnostic> {
        self.binary_left(
            Self::parse_shift,
            &[
                (P::Le, BinOp::Le),
                (P::Ge, BinOp::Ge),
                (P::Lt, BinOp::Lt),
                (P::Gt, BinOp::Gt),
            ],
        )
    }

    fn parse_shift(&mut self) -> Result<AstNode, Diagnostic> {
        let mut lhs = self.parse_additive()?;
        loop {
            let dir = if self.at_p(P::Shl) {
                ShiftDir::Out
            } else if self.at_p(P::Shr) {
                ShiftDir::In
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.parse_additive()?;
            let span = Span::cover(lhs.span, rhs.span);
            lhs = AstNode::with_children(
                NodeKind::StreamShift,
                span,
                Payload::Shift { dir },
                vec![lhs, rhs],
            );
        }
    }

    fn parse_additive(&mut self) -> Result<AstNode, Diagnostic> {
        self.binary_left(
            Self::parse_multiplicative,
            &[(P::Plus, BinOp::Add), (P::Minus, BinOp::Sub)],
        )
    }

    fn parse_multiplicative(&mut self) -> Result<AstNode, Diagnostic> {
        self.binary_left(
            Self::parse_unary,
            &[
                (P::Star, BinOp::Mul),
                (P::Slash, BinOp::Div),
                (P::Percent, BinOp::Rem),
            ],
        )
    }

    fn parse_unary(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        let op = match self.peek() {
            Some(Tok::P(P::Not)) => Some((UnOp::Not, false)),
            Some(Tok::P(P::Minus)) => Some((UnOp::Neg, false)),
            Some(Tok::P(P::Inc)) => Some((UnOp::Inc, false)),
            Some(Tok::P(P::Dec)) => Some((UnOp::Dec, false)),
            _ => None,
        };
        if let Some((op, postfix)) = op {
            self.bump();
            let operand = self.parse_unary()?;
            let span = Span::new(start, operand.span.end);
            return Ok(AstNode::with_children(
                NodeKind::UnaryOp,
                span,
                Payload::Unary { op, postfix },
                vec![operand],
            ));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<AstNode, Diagnostic> {
        let mut expr = self.parse_primary()?;
        loop {
            if self.at_p(P::Dot) || self.at_p(P::Arrow) {
                self.bump();
                let (member, mspan) = self.expect_ident("member name")?;
                if self.at_p(P::LParen) {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.at_p(P::RParen) {
                        loop {
                            args.push(self.parse_expr()?);
                            if !self.eat_p(P::Comma) {
                                break;
                            }
                        }
                    }
                    let close = self.expect_p(P::RParen, "')' closing call")?;
                    let span = Span::new(expr.span.start, close.span.end);
                    let mut children = vec![expr];
                    children.extend(args);
                    expr = AstNode::with_children(
                        NodeKind::MemberCall,
                        span,
                        Payload::MemberCall { method: member },
                        children,
                    );
                } else {
                    let span = Span::new(expr.span.start, mspan.end);
                    expr = AstNode::with_children(
                        NodeKind::MemberAccess,
                        span,
                        Payload::MemberAccess { member },
                        vec![expr],
                    );
                }
                continue;
            }
            if self.at_p(P::LBracket) {
                self.bump();
                let idx = self.parse_expr()?;
                let close = self.expect_p(P::RBracket, "']' closing index")?;
                let span = Span::new(expr.span.start, close.span.end);
                expr = AstNode::with_children(
                    NodeKind::Index,
                    span,
                    Payload::None,
                    vec![expr, idx],
                );
                continue;
            }
            if self.at_p(P::Inc) || self.at_p(P::Dec) {
                let op = if self.at_p(P::Inc) { UnOp::Inc } else { UnOp::Dec };
                let t = self.bump();
                let span = Span::new(expr.span.start, t.span.end);
                expr = AstNode::with_children(
                    NodeKind::UnaryOp,
                    span,
                    Payload::Unary { op, postfix: true },
                    vec![expr],
                );
                continue;
            }
            return Ok(expr);
        }
    }

    /// True when the current token can begin an operand, which is what
    /// distinguishes `(T) x` casts from parenthesized expressions.
    fn at_operand_start(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_))
                | Some(Tok::Int(_))
                | Some(Tok::Char(_))
                | Some(Tok::Str(_))
                | Some(Tok::Kw(Kw::True))
                | Some(Tok::Kw(Kw::False))
                | Some(Tok::P(P::LParen))
                | Some(Tok::P(P::Not))
                | Some(Tok::P(P::Minus))
                | Some(Tok::P(P::Inc))
                | Some(Tok::P(P::Dec))
        )
    }

    fn parse_primary(&mut self) -> Result<AstNode, Diagnostic> {
        let start = self.cur_start();
        match self.peek().cloned() {
            Some(Tok::Int(text)) => {
                let t = self.bump();
                Ok(AstNode::new(
                    NodeKind::Literal,
                    t.span,
                    Payload::Literal {
                        kind: LiteralKind::Int,
                        text,
                    },
                ))
            }
            Some(Tok::Char(text)) => {
                let t = self.bump();
                Ok(AstNode::new(
                    NodeKind::Literal,
                    t.span,
                    Payload::Literal {
                        kind: LiteralKind::Char,
                        text,
                    },
                ))
            }
            Some(Tok::Str(text)) => {
                let t = self.bump();
                Ok(AstNode::new(
                    NodeKind::Literal,
                    t.span,
                    Payload::Literal {
                        kind: LiteralKind::Str,
                        text,
                    },
                ))
            }
            Some(Tok::Kw(Kw::True)) | Some(Tok::Kw(Kw::False)) => {
                let t = self.bump();
                let text = if matches!(t.tok, Tok::Kw(Kw::True)) { "true" } else { "false" };
                Ok(AstNode::new(
                    NodeKind::Literal,
                    t.span,
                    Payload::Literal {
                        kind: LiteralKind::Bool,
                        text: text.to_string(),
                    },
                ))
            }
            Some(Tok::P(P::LParen)) => {
                // C-style cast or parenthesized expression.
                let save = self.pos;
                self.bump();
                if let Some((ty, _, saw_star)) = self.try_parse_type() {
                    if !saw_star && self.at_p(P::RParen) && self.type_is_known(&ty) {
                        self.bump();
                        if self.at_operand_start() {
                            let operand = self.parse_unary()?;
                            let span = Span::new(start, operand.span.end);
                            return Ok(AstNode::with_children(
                                NodeKind::Cast,
                                span,
                                Payload::Cast { ty },
                                vec![operand],
                            ));
                        }
                    }
                }
                self.pos = save;
                self.bump();
                let inner = self.parse_expr()?;
                let close = self.expect_p(P::RParen, "')'")?;
                // The parenthesized group keeps the inner node; the wider
                // span records the parentheses.
                let mut node = inner;
                node.span = Span::new(start, close.span.end);
                Ok(node)
            }
            Some(Tok::Ident(first)) => {
                // static_cast<T>(e)
                if first == "static_cast" {
                    self.bump();
                    self.expect_p(P::Lt, "'<' after static_cast")?;
                    let (ty, _, _) = self.parse_type_inner()?;
                    if !self.eat_gt_splitting_shr() {
                        return Err(self.err_here("expected '>' closing static_cast"));
                    }
                    self.expect_p(P::LParen, "'(' in static_cast")?;
                    let operand = self.parse_expr()?;
                    let close = self.expect_p(P::RParen, "')' closing static_cast")?;
                    return Ok(AstNode::with_children(
                        NodeKind::Cast,
                        Span::new(start, close.span.end),
                        Payload::Cast { ty },
                        vec![operand],
                    ));
                }
                // Possibly qualified name, possibly a call.
                let mut name = self.bump_ident();
                while self.at_p(P::ColonColon) {
                    self.bump();
                    let (part, _) = self.expect_ident("identifier after '::'")?;
                    name.push_str("::");
                    name.push_str(&part);
                }
                if self.at_p(P::LParen) {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.at_p(P::RParen) {
                        loop {
                            args.push(self.parse_expr()?);
                            if !self.eat_p(P::Comma) {
                                break;
                            }
                        }
                    }
                    let close = self.expect_p(P::RParen, "')' closing call")?;
                    return Ok(AstNode::with_children(
                        NodeKind::Call,
                        Span::new(start, close.span.end),
                        Payload::Call { callee: name },
                        args,
                    ));
                }
                Ok(AstNode::new(
                    NodeKind::NameRef,
                    Span::new(start, self.prev_end()),
                    Payload::Name { name },
                ))
            }
            _ => Err(self.err_here("expected expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> AstNode {
        let mut p = Parser::new(src, &["size_t"]).unwrap();
        p.parse_translation_unit().unwrap()
    }

    fn parse_err(src: &str) -> Diagnostic {
        match Parser::new(src, &["size_t"]) {
            Ok(mut p) => p.parse_translation_unit().unwrap_err(),
            Err(e) => e,
        }
    }

    #[test]
    fn minimal_class() {
        let tu = parse("class Foo {};");
        assert_eq!(tu.children.len(), 1);
        assert_eq!(tu.children[0].kind, NodeKind::ClassDecl);
        match &tu.children[0].payload {
            Payload::Class { name, bases, .. } => {
                assert_eq!(name, "Foo");
                assert!(bases.is_empty());
            }
            p => panic!("unexpected payload {p:?}"),
        }
    }

    #[test]
    fn enum_values_follow_previous_plus_one() {
        let tu = parse("enum Color {RED = 0, BLACK, WHITE = 3};");
        match &tu.children[0].payload {
            Payload::Enum { name, entries } => {
                assert_eq!(name, "Color");
                let vals: Vec<(String, i64)> =
                    entries.iter().map(|e| (e.name.clone(), e.value)).collect();
                assert_eq!(
                    vals,
                    vec![
                        ("RED".to_string(), 0),
                        ("BLACK".to_string(), 1),
                        ("WHITE".to_string(), 3)
                    ]
                );
            }
            p => panic!("unexpected payload {p:?}"),
        }
    }

    #[test]
    fn forward_then_definition() {
        // Oracle: hand-built two-node unit.
        let tu = parse("class A; class A { void f(); };");
        assert_eq!(tu.children.len(), 2);
        assert_eq!(tu.children[0].kind, NodeKind::ForwardDecl);
        assert_eq!(tu.children[1].kind, NodeKind::ClassDecl);
        let expected_fwd = AstNode::new(
            NodeKind::ForwardDecl,
            Span::default(),
            Payload::Name { name: "A".into() },
        );
        assert!(tu.children[0].structurally_equal(&expected_fwd));
        let method = &tu.children[1].children[0];
        assert_eq!(method.kind, NodeKind::MethodDecl);
        match &method.payload {
            Payload::Method { name, ret, has_body, .. } => {
                assert_eq!(name, "f");
                assert_eq!(ret, "void");
                assert!(!has_body);
            }
            p => panic!("unexpected payload {p:?}"),
        }
    }

    #[test]
    fn spans_nest_and_root_covers_input() {
        let src = "class Foo : public Bar {\npublic:\n    int work(int a) { return a + 1; }\n};\n";
        let tu = parse(src);
        assert!(tu.spans_nested());
        assert_eq!(&src[tu.span.start..tu.span.end], src);
    }

    #[test]
    fn arrow_and_dot_normalize_to_one_access_form() {
        let a = parse("void f() { o.run(1); }");
        let b = parse("void f() { o->run(1); }");
        assert!(a.structurally_equal(&b));
    }

    #[test]
    fn stream_shift_chain_parses_left_associative() {
        let tu = parse(r#"void f() { std::cout << "x" << 42 << std::endl; }"#);
        let stmt = &tu.children[0].children[0].children[0];
        assert_eq!(stmt.kind, NodeKind::ExprStmt);
        let root = &stmt.children[0];
        assert_eq!(root.kind, NodeKind::StreamShift);
        assert_eq!(root.children[0].kind, NodeKind::StreamShift);
    }

    #[test]
    fn cast_versus_parenthesized_expression() {
        let cast = parse("void f() { int x; x = (int) x; }");
        let body = &cast.children[0].children[0].children[0];
        let assign = &body.children[1].children[0];
        assert_eq!(assign.children[1].kind, NodeKind::Cast);

        let paren = parse("void f() { int a; a = (a) + 1; }");
        let body = &paren.children[0].children[0].children[0];
        let assign = &body.children[1].children[0];
        assert_eq!(assign.children[1].kind, NodeKind::BinaryOp);
    }

    #[test]
    fn ctor_with_initializer_list() {
        let tu = parse("class Foo { public: Foo(int a) : m_a(a) { } private: int m_a; };");
        let ctor = &tu.children[0].children[0];
        assert_eq!(ctor.kind, NodeKind::CtorDecl);
        match &ctor.payload {
            Payload::Ctor { init_count, .. } => assert_eq!(*init_count, 1),
            p => panic!("unexpected payload {p:?}"),
        }
    }

    #[test]
    fn resource_annotation_attaches_to_next_class() {
        let tu = parse("// @resource\nclass Cursor { public: ~Cursor() { } };");
        match &tu.children[0].payload {
            Payload::Class { resource_annotated, .. } => assert!(resource_annotated),
            p => panic!("unexpected payload {p:?}"),
        }
    }

    #[test]
    fn private_inheritance_is_rejected() {
        let e = parse_err("class A {}; class B : private A {};");
        assert_eq!(e.code, Code::SyntaxError);
    }

    #[test]
    fn user_template_is_a_parse_error() {
        let e = parse_err("void f() { MyBox<int> b; b.get(); }");
        assert_eq!(e.code, Code::SyntaxError);
    }

    #[test]
    fn nested_template_args_split_shr() {
        let tu = parse("void f() { std::map<std::string, std::vector<int>> m; m.size(); }");
        let body = &tu.children[0].children[0].children[0];
        match &body.payload {
            Payload::VarDecl { ty, .. } => {
                assert_eq!(ty, "std::map<std::string, std::vector<int>>")
            }
            p => panic!("unexpected payload {p:?}"),
        }
    }

    #[test]
    fn throw_and_try_catch_parse() {
        let tu = parse("void f() { try { throw 1; } catch (int e) { return; } }");
        let body = &tu.children[0].children[0];
        assert_eq!(body.children[0].kind, NodeKind::Try);
        assert_eq!(body.children[0].children[0].children[0].kind, NodeKind::Throw);
    }
}
