//! Heterogeneous syntax tree for MiniCxx translation units.
//!
//! Every node carries its kind, ordered children, the byte span it was
//! parsed from and a kind-specific payload. Spans are lossless: a node's
//! span always lies inside its parent's and the root covers the whole file.

use crate::diag::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    TranslationUnit,
    ClassDecl,
    ForwardDecl,
    EnumDecl,
    TypedefDecl,
    FieldDecl,
    MethodDecl,
    CtorDecl,
    DtorDecl,
    ParamDecl,
    Block,
    If,
    While,
    For,
    Return,
    ExprStmt,
    VarDeclStmt,
    Throw,
    Try,
    BinaryOp,
    UnaryOp,
    Call,
    MemberCall,
    MemberAccess,
    Index,
    Cast,
    Literal,
    NameRef,
    StreamShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Visibility {
    Public,
    Protected,
    Private,
}

impl Visibility {
    pub fn java_keyword(&self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Protected => "protected",
            Visibility::Private => "private",
        }
    }

    pub fn cxx_keyword(&self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Protected => "protected",
            Visibility::Private => "private",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Assign,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Assign => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
    Inc,
    Dec,
}

impl UnOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            UnOp::Not => "!",
            UnOp::Neg => "-",
            UnOp::Inc => "++",
            UnOp::Dec => "--",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftDir {
    Out, // <<
    In,  // >>
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiteralKind {
    Int,
    Char,
    Str,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumEntry {
    pub name: String,
    pub value: i64,
    /// Whether the value was written in source or computed by the
    /// previous-plus-one rule.
    pub explicit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseSpec {
    pub name: String,
}

/// Kind-specific attributes. Children hold all sub-expressions and
/// sub-statements so span nesting stays checkable in one place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    None,
    /// ForwardDecl, NameRef (possibly `::`-qualified).
    Name { name: String },
    Class {
        name: String,
        bases: Vec<BaseSpec>,
        resource_annotated: bool,
    },
    Enum {
        name: String,
        entries: Vec<EnumEntry>,
    },
    Typedef {
        name: String,
        target: String,
    },
    Field {
        name: String,
        ty: String,
        visibility: Visibility,
    },
    /// Also used for top-level free functions (visibility Public).
    Method {
        name: String,
        ret: String,
        visibility: Visibility,
        is_virtual: bool,
        is_pure: bool,
        has_body: bool,
    },
    /// Children: params, then one Call node per initializer-list entry,
    /// then the body block.
    Ctor {
        name: String,
        visibility: Visibility,
        init_count: usize,
    },
    Dtor {
        name: String,
        visibility: Visibility,
    },
    Param {
        name: String,
        ty: String,
    },
    /// Children: initializer expressions. `ctor_style` distinguishes
    /// `T x(a, b);` from `T x = e;`.
    VarDecl {
        name: String,
        ty: String,
        ctor_style: bool,
    },
    For {
        has_init: bool,
        has_cond: bool,
        has_step: bool,
    },
    Binary { op: BinOp },
    Unary { op: UnOp, postfix: bool },
    Shift { dir: ShiftDir },
    Call { callee: String },
    MemberCall { method: String },
    MemberAccess { member: String },
    Cast { ty: String },
    Literal {
        kind: LiteralKind,
        /// Verbatim source text including quotes for char/string literals.
        text: String,
    },
}

#[derive(Debug, Clone)]
pub struct AstNode {
    pub kind: NodeKind,
    pub children: Vec<AstNode>,
    pub span: Span,
    pub payload: Payload,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Span, payload: Payload) -> Self {
        AstNode {
            kind,
            children: Vec::new(),
            span,
            payload,
        }
    }

    pub fn with_children(
        kind: NodeKind,
        span: Span,
        payload: Payload,
        children: Vec<AstNode>,
    ) -> Self {
        AstNode {
            kind,
            children,
            span,
            payload,
        }
    }

    /// Structural equality ignoring spans.
    pub fn structurally_equal(&self, other: &AstNode) -> bool {
        self.kind == other.kind
            && payload_eq(&self.payload, &other.payload)
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(other.children.iter())
                .all(|(a, b)| a.structurally_equal(b))
    }

    /// True if every child's span lies within its parent's, recursively.
    pub fn spans_nested(&self) -> bool {
        self.children
            .iter()
            .all(|c| self.span.contains(&c.span) && c.spans_nested())
    }

    pub fn is_expression(&self) -> bool {
        matches!(
            self.kind,
            NodeKind::BinaryOp
                | NodeKind::UnaryOp
                | NodeKind::Call
                | NodeKind::MemberCall
                | NodeKind::MemberAccess
                | NodeKind::Index
                | NodeKind::Cast
                | NodeKind::Literal
                | NodeKind::NameRef
                | NodeKind::StreamShift
        )
    }

    pub fn class_name(&self) -> Option<&str> {
        match &self.payload {
            Payload::Class { name, .. } => Some(name),
            Payload::Name { name } if self.kind == NodeKind::ForwardDecl => Some(name),
            _ => None,
        }
    }
}

/// Enum entry equality disregards the `explicit` flag: `BLACK` and
/// `BLACK = 1` resolve to the same entry.
fn payload_eq(a: &Payload, b: &Payload) -> bool {
    match (a, b) {
        (
            Payload::Enum { name: na, entries: ea },
            Payload::Enum { name: nb, entries: eb },
        ) => {
            na == nb
                && ea.len() == eb.len()
                && ea
                    .iter()
                    .zip(eb.iter())
                    .all(|(x, y)| x.name == y.name && x.value == y.value)
        }
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name_node(name: &str, span: Span) -> AstNode {
        AstNode::new(NodeKind::NameRef, span, Payload::Name { name: name.into() })
    }

    #[test]
    fn structural_equality_ignores_spans() {
        let a = name_node("x", Span::new(0, 1));
        let b = name_node("x", Span::new(5, 6));
        assert!(a.structurally_equal(&b));
        let c = name_node("y", Span::new(0, 1));
        assert!(!a.structurally_equal(&c));
    }

    #[test]
    fn enum_equality_ignores_explicit_flag() {
        let e1 = Payload::Enum {
            name: "Color".into(),
            entries: vec![EnumEntry { name: "BLACK".into(), value: 1, explicit: false }],
        };
        let e2 = Payload::Enum {
            name: "Color".into(),
            entries: vec![EnumEntry { name: "BLACK".into(), value: 1, explicit: true }],
        };
        assert!(payload_eq(&e1, &e2));
    }

    #[test]
    fn span_nesting_detects_violations() {
        let child = name_node("x", Span::new(5, 20));
        let parent = AstNode::with_children(
            NodeKind::ExprStmt,
            Span::new(0, 10),
            Payload::None,
            vec![child],
        );
        assert!(!parent.spans_nested());
    }
}
