use crate::ast::{Ast, Node, NodeKind, UNIT_LABEL};

const INDENT: &str = "    ";

pub fn print_ast(ast: &Ast) -> String {
    let mut out = String::new();
    for line in &ast.preamble {
        out.push_str(line);
        out.push('\n');
    }
    if !ast.preamble.is_empty() {
        out.push('\n');
    }
    if ast.root.kind == NodeKind::Block && ast.root.label == UNIT_LABEL {
        for (i, item) in ast.root.children.iter().enumerate() {
            if i > 0 && (item.kind == NodeKind::FuncDef || ast.root.children[i - 1].kind == NodeKind::FuncDef) {
                out.push('\n');
            }
            top_level(item, &mut out);
        }
    } else {
        top_level(&ast.root, &mut out);
    }
    out
}

fn top_level(n: &Node, out: &mut String) {
    match n.kind {
        NodeKind::FuncDef => {
            let (params, body) = match n.children.last() {
                Some(b) if b.kind == NodeKind::Block => (&n.children[..n.children.len() - 1], Some(b)),
                _ => (&n.children[..], None),
            };
            out.push_str(&n.label);
            out.push('(');
            let ps: Vec<String> = params.iter().map(param).collect();
            out.push_str(&ps.join(", "));
            out.push(')');
            match body {
                Some(b) => {
                    out.push('\n');
                    block_lines(b, 0, out);
                    out.push('\n');
                }
                None => out.push_str(";\n"),
            }
        }
        _ => stmt(n, 0, out),
    }
}

fn param(n: &Node) -> String {
    match n.children.first() {
        Some(d) => format!("{} {}", n.label, expr(d)),
        None => n.label.clone(),
    }
}

fn pad(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str(INDENT);
    }
}

/// `{ ... }` with the opening brace at the current position.
fn block_lines(b: &Node, level: usize, out: &mut String) {
    out.push_str("{\n");
    for s in &b.children {
        stmt(s, level + 1, out);
    }
    pad(level, out);
    out.push('}');
}

pub fn decl_text(n: &Node) -> String {
    let ds: Vec<String> = n
        .children
        .iter()
        .map(|d| match (d.kind, d.label.as_str()) {
            (NodeKind::Assign, "=") if d.children.len() == 2 && d.children[1].label == "," => {
                format!("{} = ({})", expr(&d.children[0]), expr(&d.children[1]))
            }
            _ => expr(d),
        })
        .collect();
    if ds.is_empty() {
        n.label.clone()
    } else {
        format!("{} {}", n.label, ds.join(", "))
    }
}

/// Whether `then` would capture a following `else` when printed unbraced.
fn captures_else(then: &Node) -> bool {
    match then.kind {
        NodeKind::If => match then.children.get(2) {
            None => true,
            Some(e) => captures_else(e),
        },
        NodeKind::While => then.children.get(1).is_some_and(captures_else),
        NodeKind::For => then.children.get(3).is_some_and(captures_else),
        _ => false,
    }
}

/// Body of a control statement; the header is already written.
fn body(b: &Node, level: usize, out: &mut String, force_brace: bool) {
    if b.kind == NodeKind::Block && b.label != UNIT_LABEL {
        out.push(' ');
        block_lines(b, level, out);
        out.push('\n');
    } else if force_brace {
        out.push_str(" {\n");
        stmt(b, level + 1, out);
        pad(level, out);
        out.push_str("}\n");
    } else if b.kind == NodeKind::Empty {
        out.push_str(" ;\n");
    } else {
        out.push('\n');
        stmt(b, level + 1, out);
    }
}

fn stmt(n: &Node, level: usize, out: &mut String) {
    match n.kind {
        NodeKind::Empty => {}
        NodeKind::Block => {
            if n.label == UNIT_LABEL {
                for c in &n.children {
                    stmt(c, level, out);
                }
            } else {
                pad(level, out);
                block_lines(n, level, out);
                out.push('\n');
            }
        }
        NodeKind::If => {
            pad(level, out);
            if_chain(n, level, out);
        }
        NodeKind::While => {
            pad(level, out);
            out.push_str(&format!("while ({})", child_expr(n, 0)));
            body(n.children.get(1).unwrap_or(&Node::empty()), level, out, false);
        }
        NodeKind::For => {
            pad(level, out);
            let init = match n.children.first() {
                Some(d) if d.kind == NodeKind::Decl => decl_text(d),
                Some(e) if e.kind != NodeKind::Empty => expr(e),
                _ => String::new(),
            };
            let cond = child_expr(n, 1);
            let step = child_expr(n, 2);
            let sep = |s: &str| if s.is_empty() { String::new() } else { format!(" {s}") };
            out.push_str(&format!("for ({init};{};{})", sep(&cond), sep(&step)));
            body(n.children.get(3).unwrap_or(&Node::empty()), level, out, false);
        }
        NodeKind::Return => {
            pad(level, out);
            match n.children.first() {
                Some(e) => out.push_str(&format!("return {};\n", expr(e))),
                None => out.push_str("return;\n"),
            }
        }
        NodeKind::Break => {
            pad(level, out);
            out.push_str("break;\n");
        }
        NodeKind::Continue => {
            pad(level, out);
            out.push_str("continue;\n");
        }
        NodeKind::Decl => {
            pad(level, out);
            out.push_str(&decl_text(n));
            out.push_str(";\n");
        }
        NodeKind::FuncDef => top_level(n, out),
        _ => {
            pad(level, out);
            out.push_str(&expr(n));
            out.push_str(";\n");
        }
    }
}

fn if_chain(n: &Node, level: usize, out: &mut String) {
    out.push_str(&format!("if ({})", child_expr(n, 0)));
    let empty = Node::empty();
    let then = n.children.get(1).unwrap_or(&empty);
    match n.children.get(2) {
        None => body(then, level, out, false),
        Some(els) => {
            body(then, level, out, captures_else(then));
            pad(level, out);
            out.push_str("else");
            if els.kind == NodeKind::If {
                out.push(' ');
                if_chain(els, level, out);
            } else {
                body(els, level, out, false);
            }
        }
    }
}

fn child_expr(n: &Node, i: usize) -> String {
    match n.children.get(i) {
        Some(c) if c.kind != NodeKind::Empty => expr(c),
        _ => String::new(),
    }
}

fn is_prefix_unop(n: &Node) -> bool {
    n.kind == NodeKind::UnOp && !n.label.starts_with("post")
}

/// Operand of a binary operator: wrap anything that is not atomic.
fn operand(n: &Node) -> String {
    let atomic = match n.kind {
        NodeKind::Identifier | NodeKind::Literal | NodeKind::Call => true,
        NodeKind::BinOp => n.label == "[]",
        NodeKind::UnOp => !is_prefix_unop(n),
        _ => false,
    };
    if atomic {
        expr(n)
    } else {
        format!("({})", expr(n))
    }
}

pub fn expr(n: &Node) -> String {
    match n.kind {
        NodeKind::Identifier | NodeKind::Literal => n.label.clone(),
        NodeKind::Empty => String::new(),
        NodeKind::Call => {
            let callee = n.children.first().map(operand).unwrap_or_default();
            let args: Vec<String> = n.children.iter().skip(1).map(arg).collect();
            format!("{callee}({})", args.join(", "))
        }
        NodeKind::Assign => {
            let l = n.children.first().map(operand).unwrap_or_default();
            let r = match n.children.get(1) {
                Some(r) if r.kind == NodeKind::BinOp && r.label == "," => format!("({})", expr(r)),
                Some(r) if r.kind == NodeKind::Assign => expr(r),
                Some(r) => plain_or_operand(r),
                None => String::new(),
            };
            format!("{l} {} {r}", n.label)
        }
        NodeKind::UnOp => unop(n),
        NodeKind::BinOp => match n.label.as_str() {
            "[]" => {
                let base = n.children.first().map(operand).unwrap_or_default();
                let idx = n.children.get(1).map(expr).unwrap_or_default();
                format!("{base}[{idx}]")
            }
            "{}" => {
                let items: Vec<String> = n.children.iter().map(arg).collect();
                format!("{{{}}}", items.join(", "))
            }
            "?:" => {
                let parts: Vec<String> = n.children.iter().map(operand).collect();
                format!("{} ? {} : {}", parts[0], parts.get(1).cloned().unwrap_or_default(), parts.get(2).cloned().unwrap_or_default())
            }
            "," => {
                let parts: Vec<String> = n.children.iter().map(plain_or_operand).collect();
                parts.join(", ")
            }
            op => {
                let l = n.children.first().map(operand).unwrap_or_default();
                let r = n.children.get(1).map(operand).unwrap_or_default();
                format!("{l}{op}{r}")
            }
        },
        // statements never appear in expression position in parsed trees
        _ => {
            let mut s = String::new();
            stmt(n, 0, &mut s);
            s.trim_end().to_string()
        }
    }
}

/// Right-hand sides and list items print bare unless they are comma
/// expressions or assignments.
fn plain_or_operand(n: &Node) -> String {
    match n.kind {
        NodeKind::Assign => format!("({})", expr(n)),
        NodeKind::BinOp if n.label == "," => format!("({})", expr(n)),
        _ => expr(n),
    }
}

fn arg(n: &Node) -> String {
    match n.kind {
        NodeKind::BinOp if n.label == "," => format!("({})", expr(n)),
        _ => expr(n),
    }
}

fn unop(n: &Node) -> String {
    let label = n.label.as_str();
    if let Some(ty) = label.strip_prefix("sizeof:") {
        return format!("sizeof({ty})");
    }
    let child = n.children.first();
    let inner = |c: Option<&Node>| -> String {
        match c {
            Some(c) => match c.kind {
                NodeKind::Identifier | NodeKind::Literal | NodeKind::Call => expr(c),
                NodeKind::BinOp if c.label == "[]" => expr(c),
                NodeKind::UnOp if c.label.starts_with("post") => expr(c),
                _ => format!("({})", expr(c)),
            },
            None => String::new(),
        }
    };
    if let Some(ty) = label.strip_prefix("cast:") {
        return format!("({ty}){}", inner(child));
    }
    match label {
        "post++" => format!("{}++", inner(child)),
        "post--" => format!("{}--", inner(child)),
        "sizeof" => format!("sizeof({})", child.map(expr).unwrap_or_default()),
        op => format!("{op}{}", inner(child)),
    }
}
