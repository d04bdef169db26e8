//! C++ type spellings, typedef resolution and canonical types.
//!
//! Canonicalization follows every typedef to its fixpoint, strips const
//! and reference/pointer decoration and normalizes spacing, so rule-table
//! lookups compare intrinsic type text only.

use crate::diag::{Code, Diagnostic};
use std::collections::{BTreeMap, BTreeSet};

/// Substitution depth after which typedef resolution gives up.
const MAX_TYPEDEF_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CxxType {
    /// Type text as written, spacing normalized.
    pub spelling: String,
    /// Intrinsic type text after following all typedefs.
    pub canonical: String,
    pub template_args: Vec<CxxType>,
    pub is_enum: bool,
    pub is_class: bool,
}

impl CxxType {
    /// Base name of the canonical type without template arguments,
    /// e.g. `std::map` for `std::map<std::string, int>`.
    pub fn canonical_base(&self) -> &str {
        match self.canonical.find('<') {
            Some(i) => &self.canonical[..i],
            None => &self.canonical,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self.canonical.as_str(),
            "char" | "int" | "long" | "unsigned int" | "unsigned long" | "unsigned long long"
                | "long long" | "double"
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct TypedefTable {
    entries: BTreeMap<String, String>,
}

impl TypedefTable {
    pub fn new() -> Self {
        TypedefTable::default()
    }

    /// The table every unit starts from: a 64-bit data model where
    /// `size_t` is an alias for `unsigned long long`.
    pub fn builtin() -> Self {
        let mut t = TypedefTable::new();
        t.insert("size_t", "unsigned long long");
        t.insert("std::size_t", "unsigned long long");
        t
    }

    pub fn insert(&mut self, name: &str, target: &str) {
        self.entries.insert(name.to_string(), target.to_string());
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries.get(name).map(|s| s.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    /// Parses a `name=target` overrides file ('#' comments, blank lines
    /// ignored) on top of the builtin table.
    pub fn from_overrides(text: &str) -> Result<Self, Diagnostic> {
        let mut table = TypedefTable::builtin();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((name, target)) = line.split_once('=') else {
                return Err(Diagnostic::new(
                    Code::Config,
                    format!("typedefs file line {}: expected name=target", lineno + 1),
                ));
            };
            table.insert(name.trim(), target.trim());
        }
        Ok(table)
    }
}

/// Names of types the unit knows to be enums or classes; used to set the
/// flags on resolved types.
#[derive(Debug, Clone, Default)]
pub struct TypeUniverse {
    pub enums: BTreeSet<String>,
    pub classes: BTreeSet<String>,
}

const STREAM_TYPES: &[&str] = &[
    "std::iostream",
    "std::istream",
    "std::ostream",
    "std::stringstream",
];

pub fn is_stream_type(canonical: &str) -> bool {
    STREAM_TYPES.contains(&canonical)
}

fn is_intrinsic(base: &str) -> bool {
    matches!(
        base,
        "void" | "bool" | "char" | "int" | "long" | "double"
            | "unsigned" | "signed"
            | "unsigned int" | "unsigned long" | "unsigned long long" | "long long"
            | "std::string"
    ) || is_stream_type(base)
        || base == "std::vector"
        || base == "std::map"
}

/// Splits `base<args>` into the base text and top-level argument texts.
fn split_template(text: &str) -> (String, Vec<String>) {
    let Some(open) = text.find('<') else {
        return (text.trim().to_string(), Vec::new());
    };
    if !text.trim_end().ends_with('>') {
        return (text.trim().to_string(), Vec::new());
    }
    let base = text[..open].trim().to_string();
    let inner = &text[open + 1..text.trim_end().len() - 1];
    let mut args = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '<' => {
                depth += 1;
                cur.push(ch);
            }
            '>' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                args.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        args.push(cur.trim().to_string());
    }
    (base, args)
}

/// Normalizes a type spelling: single spaces between words, `const` and
/// trailing `&`/`*` stripped, tight template brackets.
pub fn strip_decoration(text: &str) -> String {
    let mut t = text.trim().to_string();
    while t.ends_with('&') || t.ends_with('*') {
        t.pop();
        t = t.trim_end().to_string();
    }
    let t = t
        .split_whitespace()
        .filter(|w| *w != "const")
        .collect::<Vec<_>>()
        .join(" ");
    // Tighten template brackets and comma spacing.
    let mut out = String::with_capacity(t.len());
    let mut chars = t.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            ' ' => {
                if matches!(chars.peek(), Some('<') | Some('>') | Some(',')) {
                    continue;
                }
                out.push(' ');
            }
            '<' | ',' => {
                out.push(c);
                if c == ',' {
                    out.push(' ');
                }
                while chars.peek() == Some(&' ') {
                    chars.next();
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Resolves a type spelling to its canonical type: the fixpoint of
/// typedef substitution with flags drawn from the unit's type universe.
pub fn resolve_canonical_type(
    text: &str,
    typedefs: &TypedefTable,
    universe: &TypeUniverse,
) -> Result<CxxType, Diagnostic> {
    let spelling = strip_decoration(text);
    let mut current = spelling.clone();
    let mut depth = 0usize;
    loop {
        let (base, args) = split_template(&current);
        if let Some(target) = typedefs.get(&base) {
            depth += 1;
            if depth > MAX_TYPEDEF_DEPTH {
                return Err(Diagnostic::new(
                    Code::TypedefCycle,
                    format!("typedef substitution for '{text}' did not terminate"),
                ));
            }
            current = if args.is_empty() {
                target.to_string()
            } else {
                format!("{}<{}>", target, args.join(", "))
            };
            continue;
        }
        // Base is intrinsic or a user type; canonicalize the arguments.
        let mut canon_args = Vec::new();
        for a in &args {
            canon_args.push(resolve_canonical_type(a, typedefs, universe)?);
        }
        let canonical = if canon_args.is_empty() {
            strip_decoration(&base)
        } else {
            format!(
                "{}<{}>",
                strip_decoration(&base),
                canon_args
                    .iter()
                    .map(|a| a.canonical.clone())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        };
        let is_enum = universe.enums.contains(&base);
        let is_class = !is_enum
            && (universe.classes.contains(&base)
                || (!is_intrinsic(&base) && base.chars().next().is_some_and(|c| c.is_uppercase())));
        return Ok(CxxType {
            spelling,
            canonical,
            template_args: canon_args,
            is_enum,
            is_class: is_class || base == "std::string" || is_stream_type(&base)
                || base == "std::vector" || base == "std::map",
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str, tt: &TypedefTable) -> CxxType {
        resolve_canonical_type(text, tt, &TypeUniverse::default()).unwrap()
    }

    #[test]
    fn size_t_resolves_to_unsigned_long_long() {
        let t = resolve("size_t", &TypedefTable::builtin());
        assert_eq!(t.canonical, "unsigned long long");
    }

    #[test]
    fn intrinsic_is_its_own_fixpoint() {
        let t = resolve("int", &TypedefTable::builtin());
        assert_eq!(t.canonical, "int");
    }

    #[test]
    fn two_step_chain_follows_to_fixpoint() {
        // Oracle: MyLen -> size_t -> unsigned long long, two substitutions
        // by hand.
        let mut tt = TypedefTable::builtin();
        tt.insert("MyLen", "size_t");
        let t = resolve("MyLen", &tt);
        assert_eq!(t.canonical, "unsigned long long");
    }

    #[test]
    fn resolution_is_idempotent() {
        let mut tt = TypedefTable::builtin();
        tt.insert("MyLen", "size_t");
        for spelling in ["MyLen", "size_t", "int", "std::vector<MyLen>"] {
            let once = resolve(spelling, &tt);
            let twice = resolve(&once.canonical, &tt);
            assert_eq!(once.canonical, twice.canonical, "for {spelling}");
        }
    }

    #[test]
    fn cycle_is_detected() {
        let mut tt = TypedefTable::new();
        tt.insert("A", "B");
        tt.insert("B", "A");
        let e = resolve_canonical_type("A", &tt, &TypeUniverse::default()).unwrap_err();
        assert_eq!(e.code, Code::TypedefCycle);
    }

    #[test]
    fn template_args_canonicalize_recursively() {
        let mut tt = TypedefTable::builtin();
        tt.insert("Key", "std::string");
        let t = resolve("std::map<Key, size_t>", &tt);
        assert_eq!(t.canonical, "std::map<std::string, unsigned long long>");
        assert_eq!(t.canonical_base(), "std::map");
        assert_eq!(t.template_args.len(), 2);
        assert_eq!(t.template_args[1].canonical, "unsigned long long");
    }

    #[test]
    fn const_and_reference_are_stripped() {
        let t = resolve("const std::string&", &TypedefTable::builtin());
        assert_eq!(t.canonical, "std::string");
        assert_eq!(t.spelling, "std::string");
    }

    #[test]
    fn enum_flag_comes_from_universe() {
        let mut universe = TypeUniverse::default();
        universe.enums.insert("Color".to_string());
        let t = resolve_canonical_type("Color", &TypedefTable::builtin(), &universe).unwrap();
        assert!(t.is_enum);
        assert!(!t.is_class);
    }
}
