//! Prints an AST back as MiniCxx source.
//!
//! Used by the round-trip property: reparsing the printed text yields a
//! structurally equal tree.

use super::ast::*;

pub fn print_unit(tu: &AstNode) -> String {
    let mut out = String::new();
    for child in &tu.children {
        print_decl(child, 0, &mut out);
    }
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn print_decl(node: &AstNode, level: usize, out: &mut String) {
    match (&node.kind, &node.payload) {
        (NodeKind::TypedefDecl, Payload::Typedef { name, target }) => {
            indent(level, out);
            out.push_str(&format!("typedef {target} {name};\n"));
        }
        (NodeKind::ForwardDecl, Payload::Name { name }) => {
            indent(level, out);
            out.push_str(&format!("class {name};\n"));
        }
        (NodeKind::EnumDecl, Payload::Enum { name, entries }) => {
            indent(level, out);
            let body = entries
                .iter()
                .map(|e| {
                    if e.explicit {
                        format!("{} = {}", e.name, e.value)
                    } else {
                        e.name.clone()
                    }
                })
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!("enum {name} {{{body}}};\n"));
        }
        (
            NodeKind::ClassDecl,
            Payload::Class {
                name,
                bases,
                resource_annotated,
            },
        ) => {
            if *resource_annotated {
                indent(level, out);
                out.push_str("// @resource\n");
            }
            indent(level, out);
            out.push_str(&format!("class {name}"));
            if !bases.is_empty() {
                out.push_str(" : ");
                out.push_str(
                    &bases
                        .iter()
                        .map(|b| format!("public {}", b.name))
                        .collect::<Vec<_>>()
                        .join(", "),
                );
            }
            out.push_str(" {\n");
            let mut vis: Option<Visibility> = None;
            for member in &node.children {
                let mv = member_visibility(member);
                if let Some(v) = mv {
                    if vis != Some(v) {
                        out.push_str(&format!("{}:\n", v.cxx_keyword()));
                        vis = Some(v);
                    }
                }
                print_decl(member, level + 1, out);
            }
            indent(level, out);
            out.push_str("};\n");
        }
        (NodeKind::FieldDecl, Payload::Field { name, ty, .. }) => {
            indent(level, out);
            out.push_str(&format!("{ty} {name};\n"));
        }
        (
            NodeKind::MethodDecl,
            Payload::Method {
                name,
                ret,
                is_virtual,
                is_pure,
                has_body,
                ..
            },
        ) => {
            indent(level, out);
            if *is_virtual {
                out.push_str("virtual ");
            }
            out.push_str(&format!("{ret} {name}("));
            out.push_str(&params_text(node));
            out.push(')');
            if *is_pure {
                out.push_str(" = 0;\n");
            } else if *has_body {
                out.push(' ');
                let body = node.children.last().expect("body present");
                print_block(body, level, out);
                out.push('\n');
            } else {
                out.push_str(";\n");
            }
        }
        (NodeKind::CtorDecl, Payload::Ctor { name, init_count, .. }) => {
            indent(level, out);
            out.push_str(&format!("{name}("));
            out.push_str(&params_text(node));
            out.push(')');
            let param_count = node
                .children
                .iter()
                .filter(|c| c.kind == NodeKind::ParamDecl)
                .count();
            if *init_count > 0 {
                out.push_str(" : ");
                let inits = &node.children[param_count..param_count + init_count];
                out.push_str(
                    &inits
                        .iter()
                        .map(|i| match &i.payload {
                            Payload::Call { callee } => {
                                format!("{}({})", callee, args_text(&i.children))
                            }
                            _ => String::new(),
                        })
                        .collect::<Vec<_>>()
                        .join(", "),
                );
            }
            out.push(' ');
            let body = node.children.last().expect("ctor body");
            print_block(body, level, out);
            out.push('\n');
        }
        (NodeKind::DtorDecl, Payload::Dtor { name, .. }) => {
            indent(level, out);
            out.push_str(&format!("~{name}() "));
            let body = node.children.last().expect("dtor body");
            print_block(body, level, out);
            out.push('\n');
        }
        _ => {}
    }
}

fn member_visibility(node: &AstNode) -> Option<Visibility> {
    match &node.payload {
        Payload::Field { visibility, .. }
        | Payload::Method { visibility, .. }
        | Payload::Ctor { visibility, .. }
        | Payload::Dtor { visibility, .. } => Some(*visibility),
        _ => None,
    }
}

fn params_text(node: &AstNode) -> String {
    node.children
        .iter()
        .filter(|c| c.kind == NodeKind::ParamDecl)
        .map(|p| match &p.payload {
            Payload::Param { name, ty } => format!("{ty} {name}"),
            _ => String::new(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn args_text(args: &[AstNode]) -> String {
    args.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

fn print_block(block: &AstNode, level: usize, out: &mut String) {
    out.push_str("{\n");
    for stmt in &block.children {
        print_stmt(stmt, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn print_stmt(stmt: &AstNode, level: usize, out: &mut String) {
    match (&stmt.kind, &stmt.payload) {
        (NodeKind::Block, _) => {
            indent(level, out);
            print_block(stmt, level, out);
            out.push('\n');
        }
        (NodeKind::ExprStmt, _) => {
            indent(level, out);
            out.push_str(&print_expr(&stmt.children[0]));
            out.push_str(";\n");
        }
        (NodeKind::VarDeclStmt, Payload::VarDecl { name, ty, ctor_style }) => {
            indent(level, out);
            if *ctor_style {
                out.push_str(&format!("{ty} {name}({});\n", args_text(&stmt.children)));
            } else if stmt.children.is_empty() {
                out.push_str(&format!("{ty} {name};\n"));
            } else {
                out.push_str(&format!(
                    "{ty} {name} = {};\n",
                    print_expr(&stmt.children[0])
                ));
            }
        }
        (NodeKind::If, _) => {
            indent(level, out);
            out.push_str(&format!("if ({}) ", print_expr(&stmt.children[0])));
            print_stmt_inline(&stmt.children[1], level, out);
            if let Some(els) = stmt.children.get(2) {
                indent(level, out);
                out.push_str("else ");
                print_stmt_inline(els, level, out);
            }
        }
        (NodeKind::While, _) => {
            indent(level, out);
            out.push_str(&format!("while ({}) ", print_expr(&stmt.children[0])));
            print_stmt_inline(&stmt.children[1], level, out);
        }
        (NodeKind::For, Payload::For { has_init, has_cond, has_step }) => {
            indent(level, out);
            let mut idx = 0;
            let init_text = if *has_init {
                let init = &stmt.children[idx];
                idx += 1;
                match (&init.kind, &init.payload) {
                    (NodeKind::VarDeclStmt, Payload::VarDecl { name, ty, .. }) => {
                        if init.children.is_empty() {
                            format!("{ty} {name};")
                        } else {
                            format!("{ty} {name} = {};", print_expr(&init.children[0]))
                        }
                    }
                    (NodeKind::ExprStmt, _) => format!("{};", print_expr(&init.children[0])),
                    _ => ";".to_string(),
                }
            } else {
                ";".to_string()
            };
            let cond_text = if *has_cond {
                let c = print_expr(&stmt.children[idx]);
                idx += 1;
                c
            } else {
                String::new()
            };
            let step_text = if *has_step {
                let s = print_expr(&stmt.children[idx]);
                idx += 1;
                s
            } else {
                String::new()
            };
            let _ = idx;
            out.push_str(&format!("for ({init_text} {cond_text}; {step_text}) "));
            print_stmt_inline(stmt.children.last().expect("for body"), level, out);
        }
        (NodeKind::Return, _) => {
            indent(level, out);
            if stmt.children.is_empty() {
                out.push_str("return;\n");
            } else {
                out.push_str(&format!("return {};\n", print_expr(&stmt.children[0])));
            }
        }
        (NodeKind::Throw, _) => {
            indent(level, out);
            out.push_str(&format!("throw {};\n", print_expr(&stmt.children[0])));
        }
        (NodeKind::Try, _) => {
            indent(level, out);
            out.push_str("try ");
            print_block(&stmt.children[0], level, out);
            let mut i = 1;
            while i + 1 < stmt.children.len() + 1 && i < stmt.children.len() {
                if let Payload::Param { name, ty } = &stmt.children[i].payload {
                    out.push_str(&format!(" catch ({ty} {name}) "));
                    print_block(&stmt.children[i + 1], level, out);
                }
                i += 2;
            }
            out.push('\n');
        }
        (NodeKind::EnumDecl, _) => print_decl(stmt, level, out),
        _ => {}
    }
}

fn print_stmt_inline(stmt: &AstNode, level: usize, out: &mut String) {
    if stmt.kind == NodeKind::Block {
        print_block(stmt, level, out);
        out.push('\n');
    } else {
        out.push('\n');
        print_stmt(stmt, level + 1, out);
    }
}

pub fn print_expr(e: &AstNode) -> String {
    match (&e.kind, &e.payload) {
        (NodeKind::Literal, Payload::Literal { text, .. }) => text.clone(),
        (NodeKind::NameRef, Payload::Name { name }) => name.clone(),
        (NodeKind::BinaryOp, Payload::Binary { op }) => {
            let l = wrap(&e.children[0], prec(&e.children[0]) < bin_prec(*op));
            let r = wrap(
                &e.children[1],
                prec(&e.children[1]) <= bin_prec(*op) && *op != BinOp::Assign,
            );
            format!("{l} {} {r}", op.symbol())
        }
        (NodeKind::StreamShift, Payload::Shift { dir }) => {
            let sym = match dir {
                ShiftDir::Out => "<<",
                ShiftDir::In => ">>",
            };
            format!(
                "{} {sym} {}",
                print_expr(&e.children[0]),
                wrap(&e.children[1], prec(&e.children[1]) <= 10)
            )
        }
        (NodeKind::UnaryOp, Payload::Unary { op, postfix }) => {
            let inner = wrap(&e.children[0], prec(&e.children[0]) < 13);
            if *postfix {
                format!("{inner}{}", op.symbol())
            } else {
                format!("{}{inner}", op.symbol())
            }
        }
        (NodeKind::Call, Payload::Call { callee }) => {
            format!("{callee}({})", args_text(&e.children))
        }
        (NodeKind::MemberCall, Payload::MemberCall { method }) => {
            let recv = wrap(&e.children[0], prec(&e.children[0]) < 14);
            format!("{recv}.{method}({})", args_text(&e.children[1..]))
        }
        (NodeKind::MemberAccess, Payload::MemberAccess { member }) => {
            let recv = wrap(&e.children[0], prec(&e.children[0]) < 14);
            format!("{recv}.{member}")
        }
        (NodeKind::Index, _) => {
            let recv = wrap(&e.children[0], prec(&e.children[0]) < 14);
            format!("{recv}[{}]", print_expr(&e.children[1]))
        }
        (NodeKind::Cast, Payload::Cast { ty }) => {
            format!("({ty}) {}", wrap(&e.children[0], prec(&e.children[0]) < 13))
        }
        _ => String::new(),
    }
}

fn wrap(e: &AstNode, needs: bool) -> String {
    let text = print_expr(e);
    if needs {
        format!("({text})")
    } else {
        text
    }
}

fn bin_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Assign => 1,
        BinOp::Or => 3,
        BinOp::And => 4,
        BinOp::Eq | BinOp::Ne => 8,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 9,
        BinOp::Add | BinOp::Sub => 11,
        BinOp::Mul | BinOp::Div | BinOp::Rem => 12,
    }
}

fn prec(e: &AstNode) -> u8 {
    match (&e.kind, &e.payload) {
        (NodeKind::BinaryOp, Payload::Binary { op }) => bin_prec(*op),
        (NodeKind::StreamShift, _) => 10,
        (NodeKind::UnaryOp, _) => 13,
        (NodeKind::Cast, _) => 13,
        (NodeKind::Call, _)
        | (NodeKind::MemberCall, _)
        | (NodeKind::MemberAccess, _)
        | (NodeKind::Index, _) => 14,
        _ => 15,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::Parser;

    fn parse(src: &str) -> AstNode {
        let mut p = Parser::new(src, &["size_t"]).unwrap();
        p.parse_translation_unit().unwrap()
    }

    fn roundtrip(src: &str) {
        let first = parse(src);
        let printed = print_unit(&first);
        let second = parse(&printed);
        assert!(
            first.structurally_equal(&second),
            "round trip changed structure;\nprinted:\n{printed}"
        );
    }

    #[test]
    fn roundtrip_class_with_members() {
        roundtrip(
            "class Foo : public Bar {\npublic:\n  Foo(int a) : m_a(a) { }\n  \
             int work(size_t n) { return m_a + 1; }\nprivate:\n  int m_a;\n};\n",
        );
    }

    #[test]
    fn roundtrip_enum_and_typedef() {
        roundtrip("typedef size_t MyLen;\nenum Color {RED = 0, BLACK, WHITE = 3};\nclass A;\n");
    }

    #[test]
    fn roundtrip_statements_and_expressions() {
        roundtrip(
            "class C {\npublic:\n  void f(int x) {\n    if (x == 1) { x = 2; } else x = 3;\n    \
             while (x < 10) x++;\n    for (int i = 0; i < 3; i++) { x = x + i; }\n    \
             std::cout << \"v\" << x << std::endl;\n  }\n};\n",
        );
    }

    #[test]
    fn printer_keeps_operator_precedence() {
        let tu = parse("void f() { int a; a = (1 + 2) * 3; }");
        let printed = print_unit(&tu);
        assert!(printed.contains("a = (1 + 2) * 3;"));
    }
}
