//! Recursive-descent parser for the Java subset.
//!
//! Failure policy: errors below the top level never abort the parse.
//! Statements and class members that fail to parse are re-scanned into
//! [`NodeKind::Unknown`] nodes spanning the skipped tokens, with any
//! balanced `{...}` regions inside them still parsed as block children.
//! Only top-level segmentation failures (unbalanced braces, text that is
//! not a package/import/type declaration) surface as [`ParseError`].

use super::lexer::{lex, line_col, Token, TokenKind};
use super::{AstNode, NodeKind, ParseError, Span};

/// Internal error: byte position plus message; converted to a line/column
/// [`ParseError`] only when it escapes the top level.
struct PErr {
    byte: usize,
    msg: String,
}

const MODIFIERS: [&str; 12] = [
    "public", "protected", "private", "static", "final", "abstract", "native",
    "synchronized", "transient", "volatile", "strictfp", "default",
];

const PRIMITIVES: [&str; 9] = [
    "boolean", "byte", "short", "int", "long", "char", "float", "double", "void",
];

const ASSIGN_OPS: [&str; 12] = [
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
];

/// Binary operator precedence levels, loosest first.
const BINARY_LEVELS: [&[&str]; 10] = [
    &["||"],
    &["&&"],
    &["|"],
    &["^"],
    &["&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["<<", ">>", ">>>"],
    &["+", "-"],
    &["*", "/", "%"],
];

pub(crate) fn parse_compilation_unit(source: &str) -> Result<AstNode, ParseError> {
    let toks: Vec<Token> = lex(source)
        .into_iter()
        .filter(|t| !t.kind.is_comment())
        .collect();
    let mut parser = Parser { src: source, toks, pos: 0 };
    parser.compilation_unit().map_err(|e| {
        let (line, column) = line_col(source, e.byte);
        ParseError { line, column, message: e.msg }
    })
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    // ----- token plumbing -------------------------------------------------

    fn peek_at(&self, ahead: usize) -> Option<Token> {
        self.toks.get(self.pos + ahead).copied()
    }

    fn peek(&self) -> Option<Token> {
        self.peek_at(0)
    }

    fn text(&self, tok: Token) -> &'a str {
        tok.text(self.src)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek()?;
        self.pos += 1;
        Some(t)
    }

    /// Byte offset of the next token, or end of input.
    fn cur_byte(&self) -> usize {
        self.peek().map_or(self.src.len(), |t| t.start)
    }

    /// End offset of the most recently consumed token.
    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn token_is(&self, ahead: usize, kind: TokenKind, text: &str) -> bool {
        self.peek_at(ahead)
            .is_some_and(|t| t.kind == kind && self.text(t) == text)
    }

    fn at_punct(&self, s: &str) -> bool {
        self.token_is(0, TokenKind::Punct, s)
    }

    fn at_punct_ahead(&self, ahead: usize, s: &str) -> bool {
        self.token_is(ahead, TokenKind::Punct, s)
    }

    fn at_keyword(&self, s: &str) -> bool {
        self.token_is(0, TokenKind::Keyword, s)
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().is_some_and(|t| t.kind == kind)
    }

    fn eat_punct(&mut self, s: &str) -> bool {
        if self.at_punct(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, s: &str) -> bool {
        if self.at_keyword(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, s: &str) -> Result<Token, PErr> {
        if self.at_punct(s) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.err_here(&format!("expected `{s}`")))
        }
    }

    fn expect_identifier(&mut self) -> Result<Token, PErr> {
        if self.at_kind(TokenKind::Identifier) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.err_here("expected an identifier"))
        }
    }

    fn err_here(&self, msg: &str) -> PErr {
        let found = match self.peek() {
            Some(t) => format!("found `{}`", self.text(t)),
            None => "found end of input".to_string(),
        };
        PErr { byte: self.cur_byte(), msg: format!("{msg}, {found}") }
    }

    fn node_from(&self, kind: NodeKind, start: usize) -> AstNode {
        AstNode::new(kind, Span::new(start, self.prev_end()))
    }

    // ----- top level ------------------------------------------------------

    fn compilation_unit(&mut self) -> Result<AstNode, PErr> {
        self.check_brace_balance()?;
        let mut cu = AstNode::new(NodeKind::CompilationUnit, Span::new(0, self.src.len()));
        while self.peek().is_some() {
            if self.eat_punct(";") {
                continue;
            }
            cu.children.push(self.top_level_declaration()?);
        }
        Ok(cu)
    }

    /// Braces must balance (outside comments and strings, which the lexer
    /// already removed) for the input to be segmentable at all.
    fn check_brace_balance(&self) -> Result<(), PErr> {
        let mut stack: Vec<usize> = Vec::new();
        for t in &self.toks {
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.text(self.src) {
                "{" => stack.push(t.start),
                "}" if stack.pop().is_none() => {
                    return Err(PErr {
                        byte: t.start,
                        msg: "unbalanced braces: unexpected `}`".to_string(),
                    });
                }
                _ => {}
            }
        }
        if let Some(&open) = stack.last() {
            return Err(PErr { byte: open, msg: "unbalanced braces: unclosed `{`".to_string() });
        }
        Ok(())
    }

    fn top_level_declaration(&mut self) -> Result<AstNode, PErr> {
        if self.at_keyword("package") {
            return self.package_declaration();
        }
        if self.at_keyword("import") {
            return self.import_declaration();
        }
        self.type_declaration()
    }

    /// The node catalog has no package kind, so the declaration parses into
    /// an Unknown node carrying the package name.
    fn package_declaration(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `package`
        let name = self.qualified_name()?;
        self.expect_punct(";")?;
        let mut node = self.node_from(NodeKind::Unknown, start);
        node.set_attr("construct", "package");
        node.set_attr("name", name);
        Ok(node)
    }

    fn import_declaration(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `import`
        let is_static = self.eat_keyword("static");
        let mut name = self.qualified_name()?;
        if self.eat_punct(".") {
            self.expect_punct("*")?;
            name.push_str(".*");
        }
        self.expect_punct(";")?;
        let mut node = self.node_from(NodeKind::ImportDeclaration, start);
        node.set_attr("name", name);
        if is_static {
            node.set_attr("static", "true");
        }
        Ok(node)
    }

    fn qualified_name(&mut self) -> Result<String, PErr> {
        let first = self.expect_identifier()?;
        let mut name = self.text(first).to_string();
        while self.at_punct(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier)
        {
            self.bump();
            let part = self.bump().unwrap();
            name.push('.');
            name.push_str(self.text(part));
        }
        Ok(name)
    }

    // ----- declarations ---------------------------------------------------

    fn at_annotation_use(&self) -> bool {
        self.at_punct("@") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    /// `@Name` or `@Name(...)`; the catalog has no annotation kind.
    fn annotation(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `@`
        let name = self.qualified_name()?;
        if self.at_punct("(") {
            self.skip_balanced_parens()?;
        }
        let mut node = self.node_from(NodeKind::Unknown, start);
        node.set_attr("construct", "annotation");
        node.set_attr("name", name);
        Ok(node)
    }

    fn skip_balanced_parens(&mut self) -> Result<(), PErr> {
        self.expect_punct("(")?;
        let mut depth = 1usize;
        while depth > 0 {
            let t = self.bump().ok_or_else(|| self.err_here("unclosed `(`"))?;
            if t.kind == TokenKind::Punct {
                match self.text(t) {
                    "(" => depth += 1,
                    ")" => depth -= 1,
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn eat_modifier(&mut self) -> Option<String> {
        let t = self.peek()?;
        if t.kind == TokenKind::Keyword && MODIFIERS.contains(&self.text(t)) {
            self.bump();
            Some(self.text(t).to_string())
        } else {
            None
        }
    }

    /// Annotations and modifiers preceding a declaration; annotations
    /// become leading children of the declaration they annotate.
    fn decl_prefix(&mut self) -> Result<(Vec<AstNode>, Vec<String>), PErr> {
        let mut annotations = Vec::new();
        let mut modifiers = Vec::new();
        loop {
            if self.at_annotation_use() {
                annotations.push(self.annotation()?);
            } else if let Some(m) = self.eat_modifier() {
                modifiers.push(m);
            } else {
                return Ok((annotations, modifiers));
            }
        }
    }

    fn at_type_declaration_keyword(&self) -> bool {
        self.at_keyword("class")
            || self.at_keyword("interface")
            || self.at_keyword("enum")
            || (self.at_punct("@") && self.token_is(1, TokenKind::Keyword, "interface"))
    }

    fn type_declaration(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        let (annotations, modifiers) = self.decl_prefix()?;
        self.type_declaration_tail(start, annotations, modifiers)
    }

    fn type_declaration_tail(
        &mut self,
        start: usize,
        annotations: Vec<AstNode>,
        modifiers: Vec<String>,
    ) -> Result<AstNode, PErr> {
        let decl_kind = if self.eat_keyword("class") {
            "class"
        } else if self.eat_keyword("interface") {
            "interface"
        } else if self.eat_keyword("enum") {
            "enum"
        } else if self.at_punct("@") && self.token_is(1, TokenKind::Keyword, "interface") {
            self.bump();
            self.bump();
            "annotation"
        } else {
            return Err(self.err_here("expected a type declaration"));
        };
        let name = self.expect_identifier()?;
        let name = self.text(name).to_string();
        if self.at_punct("<") {
            self.skip_generics()?;
        }
        // Supertypes are type references, not expressions; they produce no
        // nodes of their own.
        if self.eat_keyword("extends") {
            loop {
                self.parse_type()?;
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        if self.eat_keyword("implements") {
            loop {
                self.parse_type()?;
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct("{")?;
        let mut children = annotations;
        if decl_kind == "enum" {
            self.enum_constants(&mut children)?;
        }
        children.extend(self.class_body_members()?);
        let mut node = self.node_from(NodeKind::ClassDeclaration, start);
        node.set_attr("kind", decl_kind);
        node.set_attr("name", name);
        if !modifiers.is_empty() {
            node.set_attr("modifiers", modifiers.join(" "));
        }
        node.children = children;
        Ok(node)
    }

    /// Enum constants up to the separating `;` (or the closing `}`); each
    /// constant is a VariableDeclarator, argument lists and constant class
    /// bodies are skipped.
    fn enum_constants(&mut self, children: &mut Vec<AstNode>) -> Result<(), PErr> {
        loop {
            while self.at_annotation_use() {
                children.push(self.annotation()?);
            }
            if self.at_punct("}") || self.eat_punct(";") {
                return Ok(());
            }
            let start = self.cur_byte();
            self.expect_identifier()?;
            let name_text = self.toks[self.pos - 1].text(self.src).to_string();
            if self.at_punct("(") {
                self.skip_balanced_parens()?;
            }
            let mut constant = self.node_from(NodeKind::VariableDeclarator, start);
            constant.set_attr("name", name_text);
            if self.at_punct("{") {
                let body_start = self.cur_byte();
                self.skip_balanced_braces()?;
                let mut body = self.node_from(NodeKind::Unknown, body_start);
                body.set_attr("construct", "enum_constant_body");
                constant.children.push(body);
                constant.span.end = self.prev_end();
            }
            children.push(constant);
            if !self.eat_punct(",") && !self.at_punct("}") && !self.at_punct(";") {
                return Err(self.err_here("expected `,` or `;` in enum body"));
            }
        }
    }

    fn skip_balanced_braces(&mut self) -> Result<(), PErr> {
        self.expect_punct("{")?;
        let mut depth = 1usize;
        while depth > 0 {
            let t = self.bump().ok_or_else(|| self.err_here("unclosed `{`"))?;
            if t.kind == TokenKind::Punct {
                match self.text(t) {
                    "{" => depth += 1,
                    "}" => depth -= 1,
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Class body members up to and including the closing `}`. Individual
    /// members that fail to parse are recovered as Unknown nodes.
    fn class_body_members(&mut self) -> Result<Vec<AstNode>, PErr> {
        let mut members = Vec::new();
        loop {
            if self.eat_punct("}") {
                return Ok(members);
            }
            if self.peek().is_none() {
                return Err(self.err_here("unclosed class body"));
            }
            if self.eat_punct(";") {
                continue;
            }
            let start_pos = self.pos;
            match self.class_member() {
                Ok(member) => members.push(member),
                Err(_) => {
                    self.pos = start_pos;
                    members.push(self.recover_member());
                }
            }
        }
    }

    fn class_member(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        let (annotations, modifiers) = self.decl_prefix()?;
        if self.at_type_declaration_keyword() {
            return self.type_declaration_tail(start, annotations, modifiers);
        }
        // Initializer block, `static { ... }` or bare `{ ... }`.
        if self.at_punct("{") {
            let block = self.block()?;
            let mut node = self.node_from(NodeKind::Unknown, start);
            node.set_attr("construct", "initializer");
            node.children = annotations;
            node.children.push(block);
            return Ok(node);
        }
        if self.at_punct("<") {
            self.skip_generics()?; // generic method type parameters
        }
        // Constructor: an identifier directly followed by `(` (a field or
        // method would have a type before the name).
        if self.at_kind(TokenKind::Identifier) && self.at_punct_ahead(1, "(") {
            let name = self.bump().unwrap();
            let name = self.text(name).to_string();
            return self.method_tail(start, annotations, modifiers, name, None);
        }
        let ty = self.parse_type()?;
        let name = self.expect_identifier()?;
        let name_text = self.text(name).to_string();
        if self.at_punct("(") {
            return self.method_tail(start, annotations, modifiers, name_text, Some(ty));
        }
        // Field declaration.
        let declarators = self.declarators(name)?;
        self.expect_punct(";")?;
        let mut node = self.node_from(NodeKind::VariableDeclaration, start);
        node.set_attr("type", ty);
        node.set_attr("role", "field");
        if !modifiers.is_empty() {
            node.set_attr("modifiers", modifiers.join(" "));
        }
        node.children = annotations;
        node.children.extend(declarators);
        Ok(node)
    }

    /// Shared tail for methods and constructors: parameter list, optional
    /// `throws`, then a body (wrapped in a MethodExpression node) or `;`.
    fn method_tail(
        &mut self,
        start: usize,
        annotations: Vec<AstNode>,
        modifiers: Vec<String>,
        name: String,
        return_type: Option<String>,
    ) -> Result<AstNode, PErr> {
        let params = self.parameter_list()?;
        while self.at_punct("[") && self.at_punct_ahead(1, "]") {
            self.bump();
            self.bump(); // archaic `int m()[]` array suffix
        }
        let mut throws = Vec::new();
        if self.eat_keyword("throws") {
            loop {
                throws.push(self.qualified_name()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let mut children = annotations;
        children.extend(params);
        if self.at_punct("{") {
            let body = self.block()?;
            let mut wrapper = AstNode::new(NodeKind::MethodExpression, body.span);
            wrapper.children.push(body);
            children.push(wrapper);
        } else {
            self.expect_punct(";")?; // abstract or interface method
        }
        let mut node = self.node_from(NodeKind::MethodDeclaration, start);
        node.set_attr("name", name);
        match return_type {
            Some(ty) => node.set_attr("return_type", ty),
            None => node.set_attr("constructor", "true"),
        }
        if !modifiers.is_empty() {
            node.set_attr("modifiers", modifiers.join(" "));
        }
        if !throws.is_empty() {
            node.set_attr("throws", throws.join(","));
        }
        node.children = children;
        Ok(node)
    }

    fn parameter_list(&mut self) -> Result<Vec<AstNode>, PErr> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            let start = self.cur_byte();
            let (annotations, _modifiers) = self.decl_prefix()?;
            let mut ty = self.parse_type()?;
            let name = self.expect_identifier()?;
            let name_text = self.text(name).to_string();
            while self.at_punct("[") && self.at_punct_ahead(1, "]") {
                self.bump();
                self.bump();
                ty.push_str("[]");
            }
            let mut declarator =
                AstNode::new(NodeKind::VariableDeclarator, Span::new(name.start, name.end));
            declarator.set_attr("name", name_text);
            let mut param = self.node_from(NodeKind::VariableDeclaration, start);
            param.set_attr("type", ty);
            param.set_attr("role", "param");
            param.children = annotations;
            param.children.push(declarator);
            params.push(param);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    /// One or more `name [= init]` declarators; the first name token has
    /// already been consumed by the caller.
    fn declarators(&mut self, first_name: Token) -> Result<Vec<AstNode>, PErr> {
        let mut list = Vec::new();
        let mut name = first_name;
        loop {
            let mut decl =
                AstNode::new(NodeKind::VariableDeclarator, Span::new(name.start, name.end));
            decl.set_attr("name", self.text(name).to_string());
            while self.at_punct("[") && self.at_punct_ahead(1, "]") {
                self.bump();
                self.bump(); // `int a[]` array dims on the declarator
                decl.span.end = self.prev_end();
            }
            if self.eat_punct("=") {
                let init = if self.at_punct("{") {
                    self.array_initializer()?
                } else {
                    self.expression()?
                };
                decl.span.end = init.span.end.max(decl.span.end);
                decl.children.push(init);
            }
            list.push(decl);
            if !self.eat_punct(",") {
                return Ok(list);
            }
            name = self.expect_identifier()?;
        }
    }

    /// Recovery for a class member that failed to parse: consume up to a
    /// `;` at depth zero or through a trailing block, keeping any balanced
    /// blocks as parsed children.
    fn recover_member(&mut self) -> AstNode {
        let start = self.cur_byte();
        let mut node = AstNode::new(NodeKind::Unknown, Span::new(start, start));
        node.set_attr("construct", "member");
        self.recover_tokens(&mut node, true);
        node.span.end = self.prev_end().max(start);
        node
    }

    // ----- statements -----------------------------------------------------

    fn block(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.expect_punct("{")?;
        let mut node = AstNode::new(NodeKind::BlockStatement, Span::new(start, start));
        loop {
            if self.eat_punct("}") {
                node.span.end = self.prev_end();
                return Ok(node);
            }
            if self.peek().is_none() {
                return Err(self.err_here("unclosed `{`"));
            }
            if self.eat_punct(";") {
                continue;
            }
            let stmt = self.statement();
            node.children.push(stmt);
        }
    }

    /// Parse one statement; never fails. A statement that cannot be parsed
    /// is consumed into an Unknown node (blocks inside it still parse).
    fn statement(&mut self) -> AstNode {
        let start_pos = self.pos;
        match self.statement_inner() {
            Ok(node) => node,
            Err(_) => {
                self.pos = start_pos;
                self.unknown_statement()
            }
        }
    }

    fn statement_inner(&mut self) -> Result<AstNode, PErr> {
        if self.at_annotation_use() {
            // e.g. an annotated local variable declaration
            let start = self.cur_byte();
            let annotation = self.annotation()?;
            let mut rest = self.statement_inner()?;
            rest.children.insert(0, annotation);
            rest.span.start = start;
            return Ok(rest);
        }
        if self.at_punct("{") {
            return self.block();
        }
        if self.at_keyword("if") {
            return self.if_statement();
        }
        if self.at_keyword("while") {
            return self.while_statement();
        }
        if self.at_keyword("do") {
            return self.do_statement();
        }
        if self.at_keyword("for") {
            return self.for_statement();
        }
        if self.at_keyword("switch") {
            return self.switch_statement();
        }
        if self.at_keyword("return") {
            return self.return_statement();
        }
        if self.at_keyword("break") || self.at_keyword("continue") {
            let start = self.cur_byte();
            let kw = self.bump().unwrap();
            let construct = self.text(kw).to_string();
            if self.at_kind(TokenKind::Identifier) {
                self.bump(); // optional label
            }
            self.expect_punct(";")?;
            let mut node = self.node_from(NodeKind::Unknown, start);
            node.set_attr("construct", construct);
            return Ok(node);
        }
        if self.at_keyword("throw") {
            let start = self.cur_byte();
            self.bump();
            let value = self.expression()?;
            self.expect_punct(";")?;
            let mut node = self.node_from(NodeKind::Unknown, start);
            node.set_attr("construct", "throw");
            node.children.push(value);
            return Ok(node);
        }
        if self.at_keyword("assert") {
            let start = self.cur_byte();
            self.bump();
            let cond = self.expression()?;
            let mut node_children = vec![cond];
            if self.eat_punct(":") {
                node_children.push(self.expression()?);
            }
            self.expect_punct(";")?;
            let mut node = self.node_from(NodeKind::Unknown, start);
            node.set_attr("construct", "assert");
            node.children = node_children;
            return Ok(node);
        }
        if self.at_keyword("synchronized") {
            let start = self.cur_byte();
            self.bump();
            self.expect_punct("(")?;
            let lock = self.expression()?;
            self.expect_punct(")")?;
            let body = self.block()?;
            let mut node = self.node_from(NodeKind::Unknown, start);
            node.set_attr("construct", "synchronized");
            node.children = vec![lock, body];
            return Ok(node);
        }
        if self.at_keyword("try") {
            return self.try_statement();
        }
        if self.at_keyword("class") || self.at_keyword("abstract") || self.at_keyword("final") {
            // possibly a local class; `final` may instead start a variable
            let save = self.pos;
            if let Ok(decl) = self.try_local_class() {
                return Ok(decl);
            }
            self.pos = save;
        }
        // Labeled statement: `name: ...`
        if self.at_kind(TokenKind::Identifier)
            && self.at_punct_ahead(1, ":")
            && !self.at_punct_ahead(2, ":")
        {
            let start = self.cur_byte();
            self.bump();
            self.bump();
            let inner = self.statement();
            let mut node = AstNode::new(NodeKind::Unknown, Span::new(start, inner.span.end));
            node.set_attr("construct", "labeled");
            node.children.push(inner);
            node.span.end = self.prev_end();
            return Ok(node);
        }
        if let Some(decl) = self.try_local_var(true)? {
            return Ok(decl);
        }
        let start = self.cur_byte();
        let expr = self.expression()?;
        self.expect_punct(";")?;
        let _ = start;
        Ok(expr)
    }

    fn try_local_class(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        let mut modifiers = Vec::new();
        while let Some(m) = self.eat_modifier() {
            modifiers.push(m);
        }
        if self.at_keyword("class") {
            self.type_declaration_tail(start, Vec::new(), modifiers)
        } else {
            Err(self.err_here("not a local class"))
        }
    }

    /// Attempt a local variable declaration; backtracks and returns
    /// `Ok(None)` when the tokens are an expression statement instead.
    fn try_local_var(&mut self, consume_semi: bool) -> Result<Option<AstNode>, PErr> {
        let save = self.pos;
        let start = self.cur_byte();
        let mut modifiers = Vec::new();
        while self.at_keyword("final") {
            self.bump();
            modifiers.push("final".to_string());
        }
        let ty = match self.parse_type() {
            Ok(ty) => ty,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        let looks_like_decl = self.at_kind(TokenKind::Identifier)
            && (self.at_punct_ahead(1, "=")
                || self.at_punct_ahead(1, ";")
                || self.at_punct_ahead(1, ",")
                || self.at_punct_ahead(1, ":")
                || (self.at_punct_ahead(1, "[") && self.at_punct_ahead(2, "]")));
        if !looks_like_decl {
            self.pos = save;
            return Ok(None);
        }
        let name = self.expect_identifier()?;
        let declarators = self.declarators(name)?;
        if consume_semi {
            self.expect_punct(";")?;
        }
        let mut node = self.node_from(NodeKind::VariableDeclaration, start);
        node.set_attr("type", ty);
        node.set_attr("role", "local");
        if !modifiers.is_empty() {
            node.set_attr("modifiers", modifiers.join(" "));
        }
        node.children = declarators;
        Ok(Some(node))
    }

    fn if_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `if`
        self.expect_punct("(")?;
        let cond = self.expression()?;
        self.expect_punct(")")?;
        let then_branch = self.statement();
        let mut children = vec![cond, then_branch];
        if self.eat_keyword("else") {
            children.push(self.statement());
        }
        let mut node = self.node_from(NodeKind::IfStatement, start);
        node.children = children;
        Ok(node)
    }

    fn while_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump();
        self.expect_punct("(")?;
        let cond = self.expression()?;
        self.expect_punct(")")?;
        let body = self.statement();
        let mut node = self.node_from(NodeKind::WhileStatement, start);
        node.children = vec![cond, body];
        Ok(node)
    }

    fn do_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump();
        let body = self.statement();
        if !self.eat_keyword("while") {
            return Err(self.err_here("expected `while` after `do` body"));
        }
        self.expect_punct("(")?;
        let cond = self.expression()?;
        self.expect_punct(")")?;
        self.expect_punct(";")?;
        let mut node = self.node_from(NodeKind::DoStatement, start);
        node.children = vec![body, cond];
        Ok(node)
    }

    /// Classic and enhanced `for`. The header is classified by scanning to
    /// the matching `)`: a `:` at paren depth one before any `;` marks the
    /// enhanced form.
    fn for_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `for`
        if !self.at_punct("(") {
            return Err(self.err_here("expected `(` after `for`"));
        }
        if self.foreach_header_ahead() {
            self.bump(); // `(`
            let var_start = self.cur_byte();
            let (annotations, modifiers) = self.decl_prefix()?;
            let ty = self.parse_type()?;
            let name = self.expect_identifier()?;
            let mut declarator =
                AstNode::new(NodeKind::VariableDeclarator, Span::new(name.start, name.end));
            declarator.set_attr("name", self.text(name).to_string());
            let mut var = self.node_from(NodeKind::VariableDeclaration, var_start);
            var.set_attr("type", ty);
            var.set_attr("role", "local");
            if !modifiers.is_empty() {
                var.set_attr("modifiers", modifiers.join(" "));
            }
            var.children = annotations;
            var.children.push(declarator);
            self.expect_punct(":")?;
            let iterable = self.expression()?;
            self.expect_punct(")")?;
            let body = self.statement();
            let mut node = self.node_from(NodeKind::ForEachStatement, start);
            node.children = vec![var, iterable, body];
            return Ok(node);
        }
        self.bump(); // `(`
        let mut children = Vec::new();
        if !self.eat_punct(";") {
            if let Some(init) = self.try_local_var(true)? {
                children.push(init);
            } else {
                loop {
                    children.push(self.expression()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct(";")?;
            }
        }
        if !self.at_punct(";") {
            children.push(self.expression()?);
        }
        self.expect_punct(";")?;
        if !self.at_punct(")") {
            loop {
                children.push(self.expression()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        children.push(self.statement());
        let mut node = self.node_from(NodeKind::ForStatement, start);
        node.children = children;
        Ok(node)
    }

    /// Lookahead classification of a `for` header, starting at `(`.
    fn foreach_header_ahead(&self) -> bool {
        let mut depth = 0usize;
        let mut i = self.pos;
        while let Some(t) = self.toks.get(i) {
            if t.kind == TokenKind::Punct {
                match t.text(self.src) {
                    "(" => depth += 1,
                    ")" => {
                        if depth == 1 {
                            return false;
                        }
                        depth -= 1;
                    }
                    ";" if depth == 1 => return false,
                    ":" if depth == 1 => return true,
                    _ => {}
                }
            }
            i += 1;
        }
        false
    }

    fn switch_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `switch`
        self.expect_punct("(")?;
        let selector = self.expression()?;
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut children = vec![selector];
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.peek().is_none() {
                return Err(self.err_here("unclosed switch body"));
            }
            if self.eat_keyword("case") {
                loop {
                    children.push(self.expression()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct(":")?;
                continue;
            }
            if self.eat_keyword("default") {
                self.expect_punct(":")?;
                continue;
            }
            if self.eat_punct(";") {
                continue;
            }
            children.push(self.statement());
        }
        let mut node = self.node_from(NodeKind::SwitchStatement, start);
        node.children = children;
        Ok(node)
    }

    fn return_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `return`
        let mut node_children = Vec::new();
        if !self.at_punct(";") {
            node_children.push(self.expression()?);
        }
        self.expect_punct(";")?;
        let mut node = self.node_from(NodeKind::ReturnStatement, start);
        node.children = node_children;
        Ok(node)
    }

    /// try / try-with-resources; no catalog kind exists, so the statement
    /// becomes Unknown while its blocks and resource declarations still
    /// parse as children.
    fn try_statement(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `try`
        let mut children = Vec::new();
        if self.at_punct("(") {
            self.bump();
            loop {
                if self.at_punct(")") {
                    break;
                }
                match self.try_local_var(false)? {
                    Some(resource) => children.push(resource),
                    None => {
                        children.push(self.expression()?);
                    }
                }
                if !self.eat_punct(";") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        children.push(self.block()?);
        while self.at_keyword("catch") {
            self.bump();
            self.expect_punct("(")?;
            let param_start = self.cur_byte();
            let (_annotations, modifiers) = self.decl_prefix()?;
            let mut ty = self.parse_type()?;
            while self.eat_punct("|") {
                ty.push('|');
                ty.push_str(&self.parse_type()?);
            }
            let name = self.expect_identifier()?;
            let mut declarator =
                AstNode::new(NodeKind::VariableDeclarator, Span::new(name.start, name.end));
            declarator.set_attr("name", self.text(name).to_string());
            let mut param = self.node_from(NodeKind::VariableDeclaration, param_start);
            param.set_attr("type", ty);
            param.set_attr("role", "catch_param");
            if !modifiers.is_empty() {
                param.set_attr("modifiers", modifiers.join(" "));
            }
            param.children.push(declarator);
            self.expect_punct(")")?;
            children.push(param);
            children.push(self.block()?);
        }
        if self.eat_keyword("finally") {
            children.push(self.block()?);
        }
        let mut node = self.node_from(NodeKind::Unknown, start);
        node.set_attr("construct", "try");
        node.children = children;
        Ok(node)
    }

    /// Consume an unparseable statement into an Unknown node: up to `;` at
    /// depth zero (consumed), a `}` at depth zero (left for the caller), or
    /// through a trailing block.
    fn unknown_statement(&mut self) -> AstNode {
        let start = self.cur_byte();
        let mut node = AstNode::new(NodeKind::Unknown, Span::new(start, start));
        node.set_attr("construct", "statement");
        self.recover_tokens(&mut node, false);
        node.span.end = self.prev_end().max(start);
        node
    }

    /// Shared token-consuming recovery. Balanced `{...}` regions are parsed
    /// as proper blocks and kept as children. With `member_mode`, a block
    /// at depth zero ends the member (method bodies); statements also stop
    /// there unless an `else`/`catch`/`finally`/`while` continuation
    /// follows.
    fn recover_tokens(&mut self, node: &mut AstNode, member_mode: bool) {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                match self.text(t) {
                    ";" if depth == 0 => {
                        self.bump();
                        return;
                    }
                    "}" if depth == 0 => return,
                    "{" => {
                        if let Ok(block) = self.block() {
                            node.children.push(block);
                        } else {
                            // unclosed block: swallow the rest
                            while self.bump().is_some() {}
                            return;
                        }
                        if depth == 0 {
                            let continues = self.at_keyword("else")
                                || self.at_keyword("catch")
                                || self.at_keyword("finally")
                                || self.at_keyword("while");
                            if member_mode || !continues {
                                return;
                            }
                        }
                        continue;
                    }
                    "(" | "[" => depth += 1,
                    ")" | "]" => {
                        if depth == 0 {
                            return;
                        }
                        depth -= 1;
                    }
                    _ => {}
                }
            }
            self.bump();
        }
    }

    // ----- types ----------------------------------------------------------

    /// A type reference as whitespace-free text: qualified name or
    /// primitive, generics absorbed, plus `[]` and `...` suffixes.
    fn parse_type(&mut self) -> Result<String, PErr> {
        let mut text = String::new();
        let t = self.peek().ok_or_else(|| self.err_here("expected a type"))?;
        if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&self.text(t)) {
            self.bump();
            text.push_str(self.text(t));
        } else if t.kind == TokenKind::Identifier {
            self.bump();
            text.push_str(self.text(t));
            loop {
                if self.at_punct("<") {
                    text.push_str(&self.skip_generics()?);
                } else if self.at_punct(".")
                    && self.peek_at(1).is_some_and(|n| n.kind == TokenKind::Identifier)
                {
                    self.bump();
                    let part = self.bump().unwrap();
                    text.push('.');
                    text.push_str(self.text(part));
                } else {
                    break;
                }
            }
        } else {
            return Err(self.err_here("expected a type"));
        }
        while self.at_punct("[") && self.at_punct_ahead(1, "]") {
            self.bump();
            self.bump();
            text.push_str("[]");
        }
        if self.at_punct("...") {
            self.bump();
            text.push_str("...");
        }
        Ok(text)
    }

    /// Skip a generic type-argument list starting at `<`, returning its
    /// text without whitespace. Fails fast on tokens that cannot occur in
    /// type arguments so backtracking callers give up early.
    fn skip_generics(&mut self) -> Result<String, PErr> {
        let start = self.cur_byte();
        let mut depth = 0i32;
        loop {
            let t = self.peek().ok_or_else(|| self.err_here("unclosed type arguments"))?;
            let text = self.text(t);
            if t.kind == TokenKind::Punct {
                match text {
                    "<" => depth += 1,
                    "<<" => depth += 2,
                    ">" => depth -= 1,
                    ">>" => depth -= 2,
                    ">>>" => depth -= 3,
                    ";" | "{" | "}" | ")" => {
                        return Err(self.err_here("not a type-argument list"))
                    }
                    _ => {}
                }
            }
            self.bump();
            if depth <= 0 {
                break;
            }
        }
        let end = self.prev_end();
        Ok(self.src[start..end].chars().filter(|c| !c.is_whitespace()).collect())
    }

    // ----- expressions ----------------------------------------------------

    fn expression(&mut self) -> Result<AstNode, PErr> {
        let lhs = self.ternary()?;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct && ASSIGN_OPS.contains(&self.text(t)) {
                let op = self.text(t).to_string();
                self.bump();
                let rhs = self.expression()?; // right-associative
                let mut node =
                    AstNode::new(NodeKind::BinaryExpression, Span::new(lhs.span.start, rhs.span.end));
                node.set_attr("operator", op);
                node.children = vec![lhs, rhs];
                return Ok(node);
            }
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> Result<AstNode, PErr> {
        let cond = self.binary(0)?;
        if !self.eat_punct("?") {
            return Ok(cond);
        }
        let then_value = self.expression()?;
        self.expect_punct(":")?;
        let else_value = self.ternary()?;
        let mut node = AstNode::new(
            NodeKind::ConditionalExpression,
            Span::new(cond.span.start, else_value.span.end),
        );
        node.children = vec![cond, then_value, else_value];
        Ok(node)
    }

    fn binary(&mut self, level: usize) -> Result<AstNode, PErr> {
        if level >= BINARY_LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            // `instanceof` binds like a comparison.
            if level == 6 && self.at_keyword("instanceof") {
                self.bump();
                let ty_start = self.cur_byte();
                let ty = self.parse_type()?;
                let mut rhs =
                    AstNode::new(NodeKind::Identifier, Span::new(ty_start, self.prev_end()));
                rhs.set_attr("name", ty);
                let mut node = AstNode::new(
                    NodeKind::BinaryExpression,
                    Span::new(lhs.span.start, rhs.span.end),
                );
                node.set_attr("operator", "instanceof");
                node.children = vec![lhs, rhs];
                lhs = node;
                continue;
            }
            let Some(t) = self.peek() else { break };
            if t.kind != TokenKind::Punct || !BINARY_LEVELS[level].contains(&self.text(t)) {
                break;
            }
            let op = self.text(t).to_string();
            self.bump();
            let rhs = self.binary(level + 1)?;
            let mut node =
                AstNode::new(NodeKind::BinaryExpression, Span::new(lhs.span.start, rhs.span.end));
            node.set_attr("operator", op);
            node.children = vec![lhs, rhs];
            lhs = node;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<AstNode, PErr> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                let text = self.text(t);
                if matches!(text, "+" | "-" | "!" | "~" | "++" | "--") {
                    let start = t.start;
                    let op = text.to_string();
                    self.bump();
                    let operand = self.unary()?;
                    let mut node =
                        AstNode::new(NodeKind::UnaryExpression, Span::new(start, operand.span.end));
                    node.set_attr("operator", op);
                    node.set_attr("position", "prefix");
                    node.children = vec![operand];
                    return Ok(node);
                }
                // Primitive cast, e.g. `(int) x`.
                if text == "("
                    && self
                        .peek_at(1)
                        .is_some_and(|n| n.kind == TokenKind::Keyword
                            && PRIMITIVES.contains(&self.text(n))
                            && self.text(n) != "void")
                {
                    let save = self.pos;
                    let start = t.start;
                    self.bump();
                    let ty = self.parse_type()?;
                    if self.eat_punct(")") {
                        let operand = self.unary()?;
                        let mut node = AstNode::new(
                            NodeKind::UnaryExpression,
                            Span::new(start, operand.span.end),
                        );
                        node.set_attr("operator", "cast");
                        node.set_attr("type", ty);
                        node.children = vec![operand];
                        return Ok(node);
                    }
                    self.pos = save;
                }
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<AstNode, PErr> {
        let mut node = self.primary()?;
        loop {
            if self.at_punct(".") {
                let after = self.peek_at(1);
                let is_name = after.is_some_and(|t| {
                    t.kind == TokenKind::Identifier
                        || (t.kind == TokenKind::Keyword
                            && matches!(self.text(t), "this" | "class" | "super" | "new"))
                });
                if !is_name {
                    break;
                }
                if after.unwrap().kind == TokenKind::Identifier && self.at_punct_ahead(2, "(") {
                    // method call with receiver
                    self.bump(); // `.`
                    let name = self.bump().unwrap();
                    let args = self.argument_list()?;
                    let mut call = AstNode::new(
                        NodeKind::MethodCall,
                        Span::new(node.span.start, self.prev_end()),
                    );
                    call.set_attr("name", self.text(name).to_string());
                    call.children.push(node);
                    call.children.extend(args);
                    node = call;
                    continue;
                }
                // plain member access: fold into the receiver
                self.bump();
                let part = self.bump().unwrap();
                if node.kind == NodeKind::Identifier && node.children.is_empty() {
                    let merged = format!("{}.{}", node.attr("name").unwrap_or(""), self.text(part));
                    node.attrs.retain(|(k, _)| k != "name");
                    node.set_attr("name", merged);
                }
                node.span.end = part.end;
                continue;
            }
            if self.at_punct("(") && node.kind == NodeKind::Identifier && node.children.is_empty()
            {
                let name = node.attr("name").unwrap_or("").to_string();
                if !name.contains('.') {
                    let args = self.argument_list()?;
                    let mut call = AstNode::new(
                        NodeKind::MethodCall,
                        Span::new(node.span.start, self.prev_end()),
                    );
                    call.set_attr("name", name);
                    call.children = args;
                    node = call;
                    continue;
                }
                // Dotted receiver folded earlier: split the last segment
                // back out as the method name.
                let (prefix, last) = name.rsplit_once('.').unwrap();
                let mut receiver = AstNode::new(NodeKind::Identifier, node.span);
                receiver.set_attr("name", prefix.to_string());
                receiver.span.end = node.span.end.saturating_sub(last.len() + 1);
                let args = self.argument_list()?;
                let mut call = AstNode::new(
                    NodeKind::MethodCall,
                    Span::new(node.span.start, self.prev_end()),
                );
                call.set_attr("name", last.to_string());
                call.children.push(receiver);
                call.children.extend(args);
                node = call;
                continue;
            }
            if self.at_punct("[") {
                self.bump();
                let index = self.expression()?;
                self.expect_punct("]")?;
                let mut access = AstNode::new(
                    NodeKind::BinaryExpression,
                    Span::new(node.span.start, self.prev_end()),
                );
                access.set_attr("operator", "[]");
                access.children = vec![node, index];
                node = access;
                continue;
            }
            if self.at_punct("++") || self.at_punct("--") {
                let op = self.text(self.peek().unwrap()).to_string();
                self.bump();
                let mut unary = AstNode::new(
                    NodeKind::UnaryExpression,
                    Span::new(node.span.start, self.prev_end()),
                );
                unary.set_attr("operator", op);
                unary.set_attr("position", "postfix");
                unary.children = vec![node];
                node = unary;
                continue;
            }
            if self.at_punct("::") {
                // method reference
                self.bump();
                if self.at_kind(TokenKind::Identifier) || self.at_keyword("new") {
                    self.bump();
                }
                let mut mr = AstNode::new(
                    NodeKind::Unknown,
                    Span::new(node.span.start, self.prev_end()),
                );
                mr.set_attr("construct", "method_ref");
                mr.children = vec![node];
                node = mr;
                continue;
            }
            break;
        }
        Ok(node)
    }

    fn argument_list(&mut self) -> Result<Vec<AstNode>, PErr> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expression()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<AstNode, PErr> {
        let t = self.peek().ok_or_else(|| self.err_here("expected an expression"))?;
        let literal_type = match t.kind {
            TokenKind::IntLiteral => Some("int"),
            TokenKind::FloatLiteral => Some("float"),
            TokenKind::StringLiteral => Some("string"),
            TokenKind::CharLiteral => Some("char"),
            TokenKind::BoolLiteral => Some("boolean"),
            TokenKind::NullLiteral => Some("null"),
            _ => None,
        };
        if let Some(ty) = literal_type {
            self.bump();
            let mut node = AstNode::new(NodeKind::Literal, Span::new(t.start, t.end));
            node.set_attr("value", self.text(t).to_string());
            node.set_attr("type", ty);
            return Ok(node);
        }
        if t.kind == TokenKind::Identifier {
            // single-parameter lambda: `x -> ...`
            if self.at_punct_ahead(1, "->") {
                return self.lambda();
            }
            self.bump();
            let mut node = AstNode::new(NodeKind::Identifier, Span::new(t.start, t.end));
            node.set_attr("name", self.text(t).to_string());
            return Ok(node);
        }
        if t.kind == TokenKind::Keyword {
            match self.text(t) {
                "this" | "super" => {
                    self.bump();
                    let mut node = AstNode::new(NodeKind::Identifier, Span::new(t.start, t.end));
                    node.set_attr("name", self.text(t).to_string());
                    return Ok(node);
                }
                "new" => return self.creation(),
                _ => {}
            }
        }
        if self.at_punct("(") {
            if self.lambda_params_ahead() {
                return self.lambda();
            }
            self.bump();
            let inner = self.expression()?;
            self.expect_punct(")")?;
            return Ok(inner);
        }
        Err(self.err_here("expected an expression"))
    }

    /// `new Type(args) [body]`, `new Type[dims]... [init]`.
    fn creation(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.bump(); // `new`
        let ty_start = self.cur_byte();
        // element type sans array suffix: dims are parsed as expressions
        let mut ty = String::new();
        let t = self.peek().ok_or_else(|| self.err_here("expected a type after `new`"))?;
        if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&self.text(t)) {
            self.bump();
            ty.push_str(self.text(t));
        } else {
            ty = self.parse_type_no_suffix()?;
        }
        let _ = ty_start;
        let mut node = AstNode::new(NodeKind::MethodCall, Span::new(start, self.prev_end()));
        node.set_attr("name", ty);
        node.set_attr("form", "new");
        if self.at_punct("(") {
            let args = self.argument_list()?;
            node.children = args;
            if self.at_punct("{") {
                // anonymous class body: members still parse
                self.bump();
                let members = self.class_body_members()?;
                node.children.extend(members);
            }
        } else if self.at_punct("[") {
            while self.at_punct("[") {
                self.bump();
                if !self.at_punct("]") {
                    node.children.push(self.expression()?);
                }
                self.expect_punct("]")?;
            }
            if self.at_punct("{") {
                node.children.push(self.array_initializer()?);
            }
        }
        node.span.end = self.prev_end();
        Ok(node)
    }

    /// Like [`parse_type`] but leaves `[` for the caller (array creation
    /// parses its dimensions as expressions).
    fn parse_type_no_suffix(&mut self) -> Result<String, PErr> {
        let first = self.expect_identifier()?;
        let mut text = self.text(first).to_string();
        loop {
            if self.at_punct("<") {
                text.push_str(&self.skip_generics()?);
            } else if self.at_punct(".")
                && self.peek_at(1).is_some_and(|n| n.kind == TokenKind::Identifier)
            {
                self.bump();
                let part = self.bump().unwrap();
                text.push('.');
                text.push_str(self.text(part));
            } else {
                return Ok(text);
            }
        }
    }

    fn lambda_params_ahead(&self) -> bool {
        debug_assert!(self.at_punct("("));
        let mut depth = 0usize;
        let mut i = self.pos;
        while let Some(t) = self.toks.get(i) {
            if t.kind == TokenKind::Punct {
                match t.text(self.src) {
                    "(" => depth += 1,
                    ")" => {
                        depth -= 1;
                        if depth == 0 {
                            return self
                                .toks
                                .get(i + 1)
                                .is_some_and(|n| n.kind == TokenKind::Punct && n.text(self.src) == "->");
                        }
                    }
                    _ => {}
                }
            }
            i += 1;
        }
        false
    }

    /// Lambdas are outside the subset grammar: the whole expression becomes
    /// an Unknown node whose body still parses as a child.
    fn lambda(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        if self.at_punct("(") {
            self.skip_balanced_parens()?;
        } else {
            self.expect_identifier()?;
        }
        if !self.eat_punct("->") {
            return Err(self.err_here("expected `->` in lambda"));
        }
        let body = if self.at_punct("{") { self.block()? } else { self.expression()? };
        let mut node = AstNode::new(NodeKind::Unknown, Span::new(start, body.span.end));
        node.set_attr("construct", "lambda");
        node.children = vec![body];
        node.span.end = self.prev_end();
        Ok(node)
    }

    /// `{ e1, e2, ... }` with nesting; no catalog kind exists, so the
    /// initializer is Unknown with the element expressions as children.
    fn array_initializer(&mut self) -> Result<AstNode, PErr> {
        let start = self.cur_byte();
        self.expect_punct("{")?;
        let mut node = AstNode::new(NodeKind::Unknown, Span::new(start, start));
        node.set_attr("construct", "array_initializer");
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.peek().is_none() {
                return Err(self.err_here("unclosed array initializer"));
            }
            let element = if self.at_punct("{") {
                self.array_initializer()?
            } else {
                self.expression()?
            };
            node.children.push(element);
            if !self.eat_punct(",") && !self.at_punct("}") {
                return Err(self.err_here("expected `,` or `}` in array initializer"));
            }
        }
        node.span.end = self.prev_end();
        Ok(node)
    }
}
