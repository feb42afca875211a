//! Def-use analysis over a parsed program.

use std::collections::{BTreeMap, BTreeSet};

use crate::alpha::split_func_label;
use crate::ast::{Node, NodeKind, UNIT_LABEL};

/// Names provided by the usual competitive-programming headers.
pub const LIBRARY_NAMES: &[&str] = &[
    "printf", "scanf", "puts", "putchar", "getchar", "gets", "fgets", "fputs", "sprintf", "sscanf", "fprintf",
    "fscanf", "fflush", "getc", "putc", "fgetc", "fputc", "stdin", "stdout", "stderr", "EOF", "NULL", "memset",
    "memcpy", "memmove", "memcmp", "strlen", "strcmp", "strncmp", "strcpy", "strncpy", "strcat", "strncat", "strchr",
    "strrchr", "strstr", "abs", "labs", "llabs", "fabs", "fabsf", "sqrt", "sqrtl", "cbrt", "pow", "powl", "floor",
    "ceil", "round", "trunc", "fmod", "log", "log2", "log10", "exp", "sin", "cos", "tan", "asin", "acos", "atan",
    "atan2", "hypot", "fmin", "fmax", "malloc", "calloc", "realloc", "free", "qsort", "bsearch", "exit", "rand",
    "srand", "time", "clock", "atoi", "atol", "atoll", "atof", "strtol", "strtoll", "strtoul", "strtoull", "strtod",
    "toupper", "tolower", "isdigit", "isalpha", "isalnum", "isupper", "islower", "isspace", "ispunct", "INT_MAX",
    "INT_MIN", "UINT_MAX", "LONG_MAX", "LONG_MIN", "ULONG_MAX", "LLONG_MAX", "LLONG_MIN", "ULLONG_MAX", "SHRT_MAX",
    "SHRT_MIN", "CHAR_MAX", "CHAR_MIN", "CHAR_BIT", "DBL_MAX", "DBL_MIN", "FLT_MAX", "FLT_MIN", "RAND_MAX",
    "EXIT_SUCCESS", "EXIT_FAILURE", "true", "false", "M_PI", "INFINITY", "NAN",
];

pub fn is_library_name(name: &str) -> bool {
    LIBRARY_NAMES.contains(&name)
}

/// Prefix marking an identifier that still needs a variable.
pub const HOLE_PREFIX: &str = "$";

pub fn is_hole(n: &Node) -> bool {
    n.kind == NodeKind::Identifier && n.label.starts_with(HOLE_PREFIX)
}

/// What a use site demands of the variable placed there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Need {
    Any,
    Scalar,
    Integral,
    /// Base of `k` nested subscripts.
    Array(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub ty: String,
    pub dims: usize,
    pub global: bool,
    pub param: bool,
    /// Enclosing function name; empty for globals.
    pub function: String,
}

impl VarInfo {
    pub fn is_integral(&self) -> bool {
        !(self.ty.contains("float") || self.ty.contains("double"))
    }

    pub fn satisfies(&self, need: Need) -> bool {
        match need {
            Need::Any => true,
            Need::Scalar => self.dims == 0,
            Need::Integral => self.dims == 0 && self.is_integral(),
            Need::Array(k) => self.dims == k,
        }
    }
}

/// An unresolved hole and the variables visible where it occurs, in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleSite {
    pub path: Vec<usize>,
    pub name: String,
    pub need: Need,
    pub visible: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct DefUse {
    pub vars: Vec<VarInfo>,
    pub used: Vec<bool>,
    /// Names used without any visible declaration (holes included).
    pub undeclared: BTreeSet<String>,
    pub holes: Vec<HoleSite>,
}

impl DefUse {
    /// `(function, name)` of locals that are declared but never referenced.
    pub fn unused_locals(&self) -> BTreeSet<(String, String)> {
        self.vars
            .iter()
            .zip(&self.used)
            .filter(|(v, used)| !v.global && !v.param && !**used)
            .map(|(v, _)| (v.function.clone(), v.name.clone()))
            .collect()
    }
}

pub fn analyze(root: &Node) -> DefUse {
    let mut functions = BTreeSet::new();
    let tops: Vec<&Node> = if root.kind == NodeKind::Block && root.label == UNIT_LABEL {
        root.children.iter().collect()
    } else {
        vec![root]
    };
    for t in tops {
        if t.kind == NodeKind::FuncDef {
            functions.insert(split_func_label(&t.label).1.to_string());
        }
    }
    let mut w = Walker { out: DefUse::default(), scopes: vec![Vec::new()], functions, function: String::new() };
    let mut path = Vec::new();
    w.node(root, &mut path, Need::Scalar);
    w.out
}

struct Walker {
    out: DefUse,
    scopes: Vec<Vec<usize>>,
    functions: BTreeSet<String>,
    function: String,
}

fn declarator_shape(d: &Node) -> Option<(&str, usize)> {
    match d.kind {
        NodeKind::Identifier => Some((&d.label, 0)),
        NodeKind::BinOp if d.label == "[]" => d.children.first().and_then(declarator_shape).map(|(n, k)| (n, k + 1)),
        NodeKind::Assign if d.label == "=" => d.children.first().and_then(declarator_shape),
        _ => None,
    }
}

const INTEGRAL_OPS: &[&str] = &["%", "<<", ">>", "&", "|", "^", "%=", "<<=", ">>=", "&=", "|=", "^=", "~"];

impl Walker {
    fn declare(&mut self, name: &str, ty: &str, dims: usize, param: bool) {
        let global = self.scopes.len() == 1;
        self.out.vars.push(VarInfo {
            name: name.to_string(),
            ty: ty.to_string(),
            dims,
            global,
            param,
            function: if global { String::new() } else { self.function.clone() },
        });
        self.out.used.push(false);
        let k = self.out.vars.len() - 1;
        self.scopes.last_mut().unwrap().push(k);
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        self.scopes.iter().rev().flat_map(|s| s.iter().rev()).copied().find(|&k| self.out.vars[k].name == name)
    }

    fn visible(&self) -> Vec<usize> {
        let mut by_name: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &self.scopes {
            for &k in s {
                by_name.insert(&self.out.vars[k].name, k);
            }
        }
        let mut ks: Vec<usize> = by_name.into_values().collect();
        ks.sort_unstable();
        ks
    }

    fn children(&mut self, n: &Node, path: &mut Vec<usize>, need: impl Fn(usize) -> Need) {
        for (i, c) in n.children.iter().enumerate() {
            path.push(i);
            self.node(c, path, need(i));
            path.pop();
        }
    }

    fn scoped(&mut self, n: &Node, path: &mut Vec<usize>) {
        self.scopes.push(Vec::new());
        self.children(n, path, |_| Need::Scalar);
        self.scopes.pop();
    }

    fn node(&mut self, n: &Node, path: &mut Vec<usize>, need: Need) {
        match n.kind {
            NodeKind::Block if n.label == UNIT_LABEL => self.children(n, path, |_| Need::Scalar),
            NodeKind::Block | NodeKind::For => self.scoped(n, path),
            NodeKind::FuncDef => {
                self.function = split_func_label(&n.label).1.to_string();
                self.scopes.push(Vec::new());
                for (i, c) in n.children.iter().enumerate() {
                    path.push(i);
                    if c.kind == NodeKind::Decl {
                        if let Some((name, dims)) = c.children.first().and_then(declarator_shape) {
                            self.declare(name, &c.label, dims, true);
                        }
                    } else {
                        self.node(c, path, Need::Scalar);
                    }
                    path.pop();
                }
                self.scopes.pop();
                self.function.clear();
            }
            NodeKind::Decl => {
                for (i, d) in n.children.iter().enumerate() {
                    path.push(i);
                    if let Some((name, dims)) = declarator_shape(d) {
                        self.declare(name, &n.label, dims, false);
                    }
                    self.declarator(d, path);
                    path.pop();
                }
            }
            NodeKind::Identifier => self.use_name(n, path, need),
            NodeKind::Call => {
                for (i, c) in n.children.iter().enumerate() {
                    path.push(i);
                    if i == 0 && c.kind == NodeKind::Identifier {
                        let name = &c.label;
                        let known = self.functions.contains(name) || is_library_name(name);
                        if !known {
                            self.use_name(c, path, Need::Any);
                        }
                    } else {
                        self.node(c, path, Need::Any);
                    }
                    path.pop();
                }
            }
            NodeKind::BinOp if n.label == "[]" => {
                let depth = match need {
                    Need::Array(k) => k + 1,
                    _ => 1,
                };
                self.children(n, path, |i| if i == 0 { Need::Array(depth) } else { Need::Integral });
            }
            NodeKind::BinOp | NodeKind::Assign | NodeKind::UnOp if INTEGRAL_OPS.contains(&n.label.as_str()) => {
                self.children(n, path, |_| Need::Integral)
            }
            NodeKind::UnOp if n.label == "&" => self.children(n, path, |_| Need::Scalar),
            _ => self.children(n, path, |_| Need::Scalar),
        }
    }

    /// Visit the expressions inside a declarator (dimensions, initializer).
    fn declarator(&mut self, d: &Node, path: &mut Vec<usize>) {
        match d.kind {
            NodeKind::Identifier => {}
            NodeKind::BinOp if d.label == "[]" => {
                path.push(0);
                self.declarator(&d.children[0], path);
                path.pop();
                if let Some(dim) = d.children.get(1) {
                    path.push(1);
                    self.node(dim, path, Need::Integral);
                    path.pop();
                }
            }
            NodeKind::Assign => {
                path.push(0);
                self.declarator(&d.children[0], path);
                path.pop();
                if let Some(init) = d.children.get(1) {
                    path.push(1);
                    self.node(init, path, Need::Scalar);
                    path.pop();
                }
            }
            _ => self.node(d, path, Need::Scalar),
        }
    }

    fn use_name(&mut self, n: &Node, path: &[usize], need: Need) {
        if n.label.starts_with(HOLE_PREFIX) {
            self.out.undeclared.insert(n.label.clone());
            let visible = self.visible();
            self.out.holes.push(HoleSite { path: path.to_vec(), name: n.label.clone(), need, visible });
            return;
        }
        if let Some(k) = self.resolve(&n.label) {
            self.out.used[k] = true;
        } else if !self.functions.contains(&n.label) && !is_library_name(&n.label) {
            self.out.undeclared.insert(n.label.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    #[test]
    fn undeclared_and_unused() {
        let ast = parse("int g; int main(){ int a, b = 2; double z; a = b + y; printf(\"%d\", a); return helper(a); }")
            .unwrap();
        let du = analyze(&ast.root);
        assert_eq!(du.undeclared.iter().cloned().collect::<Vec<_>>(), vec!["helper".to_string(), "y".to_string()]);
        let unused: Vec<_> = du.unused_locals().into_iter().map(|(_, n)| n).collect();
        assert_eq!(unused, vec!["z".to_string()]);
    }

    #[test]
    fn scopes_end_with_blocks() {
        let ast = parse("int main(){ { int t = 1; t++; } for (int i = 0; i < 3; i++) ; return t + i; }").unwrap();
        let du = analyze(&ast.root);
        assert!(du.undeclared.contains("t") && du.undeclared.contains("i"));
    }

    #[test]
    fn holes_record_context() {
        let mut ast = parse("int main(){ int a[5], n; double d; a[n] = n % 2; return 0; }").unwrap();
        let assign = ast.root.get_mut(&[0, 2]).unwrap();
        assign.children[0].children[1] = Node::ident("$i");
        assign.children[1].children[0] = Node::ident("$m");
        let du = analyze(&ast.root);
        assert_eq!(du.holes.len(), 2);
        assert_eq!(du.holes[0].need, Need::Integral);
        assert_eq!(du.holes[1].need, Need::Integral);
        let names: Vec<&str> = du.holes[0].visible.iter().map(|&k| du.vars[k].name.as_str()).collect();
        assert_eq!(names, vec!["a", "n", "d"]);
    }
}
