use crate::ast::{Node, NodeKind, Span, BLOCK_LABEL, UNIT_LABEL};
use crate::frontend::lexer::{Tok, Token};
use crate::frontend::SyntaxError;

const TYPE_WORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "const",
    "static", "register", "volatile", "extern", "inline", "_Bool", "bool", "size_t", "int8_t",
    "uint8_t", "int16_t", "uint16_t", "int32_t", "uint32_t", "int64_t", "uint64_t",
];

const REJECTED_WORDS: &[&str] = &["struct", "union", "enum", "typedef", "switch", "case", "default", "goto"];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "^=", "|="];

/// Binary operator levels, loosest first (below the conditional operator).
const BINARY_LEVELS: &[&[&str]] = &[
    &["||"],
    &["&&"],
    &["|"],
    &["^"],
    &["&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["<<", ">>"],
    &["+", "-"],
    &["*", "/", "%"],
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            Tok::Ident(s) | Tok::Int(s) | Tok::Float(s) | Tok::Char(s) | Tok::Str(s) => format!("`{s}`"),
            Tok::Punct(p) => format!("`{p}`"),
        };
        SyntaxError::new(format!("{}, found {found}", msg.into()), self.span())
    }

    fn check_rejected(&self) -> PResult<()> {
        if let Tok::Ident(s) = self.peek() {
            if REJECTED_WORDS.contains(&s.as_str()) {
                return Err(SyntaxError::new(format!("`{s}` is not supported"), self.span()));
            }
        }
        Ok(())
    }

    fn at_type(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    pub fn parse_unit(&mut self) -> PResult<Node> {
        let start = self.span();
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            if self.eat_punct(";") {
                continue;
            }
            items.push(self.external()?);
        }
        match items.len() {
            0 => Err(SyntaxError::new("empty translation unit", start)),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(Node::new(NodeKind::Block, UNIT_LABEL, items).with_span(start.to(self.prev_span()))),
        }
    }

    fn type_specifiers(&mut self) -> PResult<String> {
        self.check_rejected()?;
        let mut words = Vec::new();
        while self.at_type() {
            if let Tok::Ident(s) = self.bump().tok {
                words.push(s);
            }
        }
        if words.is_empty() {
            return Err(self.error("expected a type"));
        }
        if self.is_punct("*") {
            return Err(SyntaxError::new("pointer types are not supported", self.span()));
        }
        Ok(words.join(" "))
    }

    fn ident(&mut self) -> PResult<Node> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if !TYPE_WORDS.contains(&s.as_str()) && !is_keyword(&s) => {
                self.bump();
                Ok(Node::ident(s).with_span(span))
            }
            _ => Err(self.error("expected an identifier")),
        }
    }

    fn external(&mut self) -> PResult<Node> {
        let start = self.span();
        let ty = self.type_specifiers()?;
        if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct("(")) {
            let name = self.ident()?;
            self.expect_punct("(")?;
            let mut children = self.params()?;
            let label = format!("{ty} {}", name.label);
            if self.eat_punct(";") {
                return Ok(Node::new(NodeKind::FuncDef, label, children).with_span(start.to(self.prev_span())));
            }
            if !self.is_punct("{") {
                return Err(self.error("expected function body"));
            }
            children.push(self.block()?);
            return Ok(Node::new(NodeKind::FuncDef, label, children).with_span(start.to(self.prev_span())));
        }
        let decl = self.decl_rest(ty, start)?;
        self.expect_punct(";")?;
        Ok(decl)
    }

    fn params(&mut self) -> PResult<Vec<Node>> {
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        if self.is_word("void") && matches!(self.peek_at(1), Tok::Punct(")")) {
            self.bump();
            self.bump();
            return Ok(params);
        }
        loop {
            let start = self.span();
            let ty = self.type_specifiers()?;
            let mut children = Vec::new();
            if matches!(self.peek(), Tok::Ident(_)) {
                let mut d = self.ident()?;
                while self.eat_punct("[") {
                    let dim = if self.is_punct("]") { Node::empty() } else { self.conditional()? };
                    self.expect_punct("]")?;
                    d = Node::new(NodeKind::BinOp, "[]", vec![d, dim]);
                }
                children.push(d);
            }
            params.push(Node::new(NodeKind::Decl, ty, children).with_span(start.to(self.prev_span())));
            if self.eat_punct(")") {
                return Ok(params);
            }
            self.expect_punct(",")?;
        }
    }

    /// Declarators after the type, without the trailing `;`.
    fn decl_rest(&mut self, ty: String, start: Span) -> PResult<Node> {
        let mut declarators = Vec::new();
        loop {
            if self.is_punct("*") {
                return Err(SyntaxError::new("pointer declarators are not supported", self.span()));
            }
            let mut d = self.ident()?;
            if self.is_punct("(") {
                return Err(SyntaxError::new("nested function declarations are not supported", self.span()));
            }
            while self.eat_punct("[") {
                let dim = if self.is_punct("]") { Node::empty() } else { self.conditional()? };
                self.expect_punct("]")?;
                d = Node::new(NodeKind::BinOp, "[]", vec![d, dim]);
            }
            if self.eat_punct("=") {
                let init = self.initializer()?;
                d = Node::new(NodeKind::Assign, "=", vec![d, init]);
            }
            declarators.push(d);
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(Node::new(NodeKind::Decl, ty, declarators).with_span(start.to(self.prev_span())))
    }

    fn initializer(&mut self) -> PResult<Node> {
        if self.eat_punct("{") {
            let mut items = Vec::new();
            while !self.is_punct("}") {
                items.push(self.initializer()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("}")?;
            Ok(Node::new(NodeKind::BinOp, "{}", items))
        } else {
            self.assignment()
        }
    }

    fn block(&mut self) -> PResult<Node> {
        let start = self.span();
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.error("expected `}`"));
            }
            let s = self.statement()?;
            if s.kind != NodeKind::Empty {
                stmts.push(s);
            }
        }
        self.bump();
        Ok(Node::new(NodeKind::Block, BLOCK_LABEL, stmts).with_span(start.to(self.prev_span())))
    }

    fn statement(&mut self) -> PResult<Node> {
        self.check_rejected()?;
        let start = self.span();
        if self.is_punct("{") {
            return self.block();
        }
        if self.eat_punct(";") {
            return Ok(Node::empty().with_span(start));
        }
        if self.at_type() {
            let ty = self.type_specifiers()?;
            let d = self.decl_rest(ty, start)?;
            self.expect_punct(";")?;
            return Ok(d);
        }
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => String::new(),
        };
        match word.as_str() {
            "if" => {
                self.bump();
                self.expect_punct("(")?;
                let guard = self.expression()?;
                self.expect_punct(")")?;
                let then = self.statement()?;
                let mut children = vec![guard, then];
                if self.is_word("else") {
                    self.bump();
                    children.push(self.statement()?);
                }
                Ok(Node::new(NodeKind::If, "if", children).with_span(start.to(self.prev_span())))
            }
            "while" => {
                self.bump();
                self.expect_punct("(")?;
                let guard = self.expression()?;
                self.expect_punct(")")?;
                let body = self.statement()?;
                Ok(Node::new(NodeKind::While, "while", vec![guard, body]).with_span(start.to(self.prev_span())))
            }
            "do" => {
                self.bump();
                let body = self.statement()?;
                if !self.is_word("while") {
                    return Err(self.error("expected `while` after do-body"));
                }
                self.bump();
                self.expect_punct("(")?;
                let guard = self.expression()?;
                self.expect_punct(")")?;
                self.expect_punct(";")?;
                if has_loop_exit(&body) {
                    return Err(SyntaxError::new("do-while bodies with break/continue are not supported", start));
                }
                let span = start.to(self.prev_span());
                // do S while (c);  ==>  { S while (c) S }
                let w = Node::new(NodeKind::While, "while", vec![guard, body.clone()]).with_span(span);
                let mut first = vec![body, w];
                first.retain(|n| n.kind != NodeKind::Empty);
                Ok(Node::new(NodeKind::Block, BLOCK_LABEL, first).with_span(span))
            }
            "for" => {
                self.bump();
                self.expect_punct("(")?;
                let init = if self.is_punct(";") {
                    Node::empty()
                } else if self.at_type() {
                    let s = self.span();
                    let ty = self.type_specifiers()?;
                    self.decl_rest(ty, s)?
                } else {
                    self.expression()?
                };
                self.expect_punct(";")?;
                let cond = if self.is_punct(";") { Node::empty() } else { self.expression()? };
                self.expect_punct(";")?;
                let step = if self.is_punct(")") { Node::empty() } else { self.expression()? };
                self.expect_punct(")")?;
                let body = self.statement()?;
                Ok(Node::new(NodeKind::For, "for", vec![init, cond, step, body]).with_span(start.to(self.prev_span())))
            }
            "return" => {
                self.bump();
                let children = if self.is_punct(";") { vec![] } else { vec![self.expression()?] };
                self.expect_punct(";")?;
                Ok(Node::new(NodeKind::Return, "return", children).with_span(start.to(self.prev_span())))
            }
            "break" => {
                self.bump();
                self.expect_punct(";")?;
                Ok(Node::leaf(NodeKind::Break, "break").with_span(start))
            }
            "continue" => {
                self.bump();
                self.expect_punct(";")?;
                Ok(Node::leaf(NodeKind::Continue, "continue").with_span(start))
            }
            "else" => Err(self.error("`else` without `if`")),
            _ => {
                let e = self.expression()?;
                self.expect_punct(";")?;
                Ok(e)
            }
        }
    }

    pub fn expression(&mut self) -> PResult<Node> {
        let start = self.span();
        let mut e = self.assignment()?;
        while self.eat_punct(",") {
            let r = self.assignment()?;
            e = Node::new(NodeKind::BinOp, ",", vec![e, r]).with_span(start.to(self.prev_span()));
        }
        Ok(e)
    }

    fn assignment(&mut self) -> PResult<Node> {
        let start = self.span();
        let lhs = self.conditional()?;
        if let Tok::Punct(p) = *self.peek() {
            if ASSIGN_OPS.contains(&p) {
                self.bump();
                let rhs = self.assignment()?;
                return Ok(Node::new(NodeKind::Assign, p, vec![lhs, rhs]).with_span(start.to(self.prev_span())));
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Node> {
        let start = self.span();
        let c = self.binary(0)?;
        if self.eat_punct("?") {
            let a = self.expression()?;
            self.expect_punct(":")?;
            let b = self.conditional()?;
            return Ok(Node::new(NodeKind::BinOp, "?:", vec![c, a, b]).with_span(start.to(self.prev_span())));
        }
        Ok(c)
    }

    fn binary(&mut self, level: usize) -> PResult<Node> {
        if level == BINARY_LEVELS.len() {
            return self.unary();
        }
        let start = self.span();
        let mut lhs = self.binary(level + 1)?;
        loop {
            let op = match *self.peek() {
                Tok::Punct(p) if BINARY_LEVELS[level].contains(&p) => p,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = Node::new(NodeKind::BinOp, op, vec![lhs, rhs]).with_span(start.to(self.prev_span()));
        }
    }

    fn cast_type_ahead(&self) -> bool {
        self.is_punct("(") && matches!(self.peek_at(1), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    fn unary(&mut self) -> PResult<Node> {
        let start = self.span();
        if let Tok::Punct(p) = *self.peek() {
            match p {
                "++" | "--" | "+" | "-" | "!" | "~" | "&" => {
                    self.bump();
                    let operand = self.unary()?;
                    return Ok(Node::new(NodeKind::UnOp, p, vec![operand]).with_span(start.to(self.prev_span())));
                }
                "*" => return Err(SyntaxError::new("pointer dereference is not supported", start)),
                "(" if self.cast_type_ahead() => {
                    self.bump();
                    let ty = self.type_specifiers()?;
                    self.expect_punct(")")?;
                    let operand = self.unary()?;
                    return Ok(Node::new(NodeKind::UnOp, format!("cast:{ty}"), vec![operand])
                        .with_span(start.to(self.prev_span())));
                }
                _ => {}
            }
        }
        if self.is_word("sizeof") {
            self.bump();
            if self.cast_type_ahead() {
                self.bump();
                let ty = self.type_specifiers()?;
                self.expect_punct(")")?;
                return Ok(Node::leaf(NodeKind::UnOp, format!("sizeof:{ty}")).with_span(start.to(self.prev_span())));
            }
            let operand = self.unary()?;
            return Ok(Node::new(NodeKind::UnOp, "sizeof", vec![operand]).with_span(start.to(self.prev_span())));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Node> {
        let start = self.span();
        let mut e = self.primary()?;
        loop {
            if self.eat_punct("[") {
                let idx = self.expression()?;
                self.expect_punct("]")?;
                e = Node::new(NodeKind::BinOp, "[]", vec![e, idx]).with_span(start.to(self.prev_span()));
            } else if self.eat_punct("(") {
                let mut children = vec![e];
                if !self.eat_punct(")") {
                    loop {
                        children.push(self.assignment()?);
                        if self.eat_punct(")") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
                e = Node::new(NodeKind::Call, "call", children).with_span(start.to(self.prev_span()));
            } else if self.is_punct("++") || self.is_punct("--") {
                let op = if self.is_punct("++") { "post++" } else { "post--" };
                self.bump();
                e = Node::new(NodeKind::UnOp, op, vec![e]).with_span(start.to(self.prev_span()));
            } else if self.is_punct(".") || self.is_punct("->") {
                return Err(SyntaxError::new("member access is not supported", self.span()));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Node> {
        let span = self.span();
        self.check_rejected()?;
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) && !TYPE_WORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Node::ident(s).with_span(span))
            }
            Tok::Int(s) | Tok::Float(s) | Tok::Char(s) => {
                self.bump();
                Ok(Node::literal(s).with_span(span))
            }
            Tok::Str(s) => {
                self.bump();
                let mut text = s;
                while let Tok::Str(next) = self.peek().clone() {
                    self.bump();
                    text.pop();
                    text.push_str(&next[1..]);
                }
                Ok(Node::literal(text).with_span(span.to(self.prev_span())))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => Err(self.error("expected an expression")),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "if" | "else" | "while" | "do" | "for" | "return" | "break" | "continue" | "sizeof" | "switch"
            | "case" | "default" | "goto" | "struct" | "union" | "enum" | "typedef"
    )
}

/// `break`/`continue` that would bind to the enclosing do-while.
fn has_loop_exit(n: &Node) -> bool {
    match n.kind {
        NodeKind::Break | NodeKind::Continue => true,
        NodeKind::While | NodeKind::For => false,
        _ => n.children.iter().any(has_loop_exit),
    }
}
