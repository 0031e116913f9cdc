//! Solidity source loading: target discovery, parsing into the [`AstNode`]
//! schema, and the span bookkeeping everything downstream relies on.
//!
//! Parsing is delegated to `solang-parser`; this module lowers its parse tree
//! into the crate's own node schema, computing exact byte spans for every
//! token the mutation operators touch. Constructs outside the schema (inline
//! assembly, user-defined operators, ...) become `Opaque` nodes so traversal
//! stays total without pretending to understand them.

use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use solang_parser::helpers::CodeLocation;
use solang_parser::pt;
use thiserror::Error;

use crate::ast::{
    AssignOp, AstNode, BaseRef, BinOp, ContractKind, ElemType, FnKind, FunctionInfo,
    ModifierInvocation, Mutability, NodeKind, ParamInfo, SourceSpan, StateVarInfo, StorageLoc,
    UnaryOp, VarDeclInfo, Visibility,
};

/// A parsed target file.
#[derive(Clone, Debug)]
pub struct SourceFile {
    /// Project-relative path with forward slashes.
    pub path: String,
    pub text: String,
    /// Hex-encoded SHA-256 of `text`.
    pub content_hash: String,
    pub ast: AstNode,
}

impl SourceFile {
    pub fn from_text(path: &str, text: &str) -> Result<Self, ParseError> {
        let ast = parse_source(path, text)?;
        Ok(SourceFile {
            path: path.to_string(),
            text: text.to_string(),
            content_hash: content_hash(text),
            ast,
        })
    }

    pub fn load(project_dir: &Path, rel_path: &str) -> Result<Self, ParseError> {
        let full = project_dir.join(rel_path);
        let text = fs::read_to_string(&full).map_err(|e| ParseError {
            file: rel_path.to_string(),
            line: 0,
            column: 0,
            message: format!("cannot read file: {e}"),
        })?;
        SourceFile::from_text(rel_path, &text)
    }

    /// File name without the .sol extension, used in mutant ids.
    pub fn stem(&self) -> &str {
        let name = self.path.rsplit('/').next().unwrap_or(&self.path);
        name.strip_suffix(".sol").unwrap_or(name)
    }
}

pub fn content_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize, Deserialize)]
#[error("{file}:{line}:{column}: {message}")]
pub struct ParseError {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// 1-based line and column for a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
    (line, column)
}

pub fn parse_source(path: &str, text: &str) -> Result<AstNode, ParseError> {
    let (unit, _comments) = solang_parser::parse(text, 0).map_err(|diags| {
        let first = diags
            .iter()
            .find(|d| d.level == solang_parser::diagnostics::Level::Error)
            .or_else(|| diags.first());
        let (offset, message) = match first {
            Some(d) => (span_of(&d.loc).start, d.message.clone()),
            None => (0, "unknown parse failure".to_string()),
        };
        let (line, column) = line_col(text, offset);
        ParseError {
            file: path.to_string(),
            line,
            column,
            message,
        }
    })?;
    let lowerer = Lower { src: text };
    let mut root = AstNode::new(NodeKind::SourceUnit, SourceSpan::new(0, text.len()));
    for part in &unit.0 {
        root.children.push(lowerer.unit_part(part));
    }
    Ok(root)
}

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("invalid glob pattern {pattern:?}: {source}")]
    BadPattern {
        pattern: String,
        source: globset::Error,
    },
    #[error("no contracts matched {pattern:?} under {dir}")]
    EmptyTargetSet { pattern: String, dir: String },
    #[error("cannot scan {dir}: {source}")]
    Io {
        dir: String,
        source: std::io::Error,
    },
}

/// Finds target contracts under `project_dir`: files matching `pattern`,
/// minus anything matching a `skip` entry (matched against both the relative
/// path and the bare file name). Directories in `exclude_dirs` are never
/// descended into. Paths come back sorted and project-relative.
pub fn discover_targets(
    project_dir: &Path,
    pattern: &str,
    skip: &[String],
    exclude_dirs: &[&str],
) -> Result<Vec<String>, TargetError> {
    let include = build_globset(std::slice::from_ref(&pattern.to_string()))?;
    let skip_set = build_globset(skip)?;
    let mut files = Vec::new();
    walk(project_dir, project_dir, exclude_dirs, &mut files).map_err(|e| TargetError::Io {
        dir: project_dir.display().to_string(),
        source: e,
    })?;
    let mut out = Vec::new();
    for rel in files {
        let rel_str = rel.to_string_lossy().replace('\\', "/");
        if !include.is_match(&rel_str) {
            continue;
        }
        let name = rel_str.rsplit('/').next().unwrap_or(&rel_str);
        if skip_set.is_match(&rel_str) || skip_set.is_match(name) {
            continue;
        }
        out.push(rel_str);
    }
    out.sort();
    if out.is_empty() {
        return Err(TargetError::EmptyTargetSet {
            pattern: pattern.to_string(),
            dir: project_dir.display().to_string(),
        });
    }
    Ok(out)
}

fn build_globset(patterns: &[String]) -> Result<GlobSet, TargetError> {
    let mut builder = GlobSetBuilder::new();
    for p in patterns {
        let glob = Glob::new(p).map_err(|source| TargetError::BadPattern {
            pattern: p.clone(),
            source,
        })?;
        builder.add(glob);
    }
    builder.build().map_err(|source| TargetError::BadPattern {
        pattern: patterns.join(","),
        source,
    })
}

fn walk(
    root: &Path,
    dir: &Path,
    exclude_dirs: &[&str],
    out: &mut Vec<PathBuf>,
) -> std::io::Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().to_string();
        let ty = entry.file_type()?;
        if ty.is_dir() {
            if exclude_dirs.contains(&name.as_str()) {
                continue;
            }
            walk(root, &path, exclude_dirs, out)?;
        } else if ty.is_file() {
            if let Ok(rel) = path.strip_prefix(root) {
                out.push(rel.to_path_buf());
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Lowering from the solang parse tree
// ---------------------------------------------------------------------------

fn span_of(loc: &pt::Loc) -> SourceSpan {
    match loc {
        pt::Loc::File(_, start, end) => SourceSpan::new(*start, *end),
        other => panic!("unexpected non-file location {other:?}"),
    }
}

/// Advances past whitespace and comments starting at `pos`.
fn skip_trivia(src: &str, mut pos: usize) -> usize {
    let b = src.as_bytes();
    loop {
        while pos < b.len() && b[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos + 1 < b.len() && b[pos] == b'/' && b[pos + 1] == b'/' {
            while pos < b.len() && b[pos] != b'\n' {
                pos += 1;
            }
        } else if pos + 1 < b.len() && b[pos] == b'/' && b[pos + 1] == b'*' {
            pos += 2;
            while pos + 1 < b.len() && !(b[pos] == b'*' && b[pos + 1] == b'/') {
                pos += 1;
            }
            pos = (pos + 2).min(b.len());
        } else {
            return pos;
        }
    }
}

/// Span of `token`, which the grammar guarantees is the next real token at or
/// after `from`.
fn token_at(src: &str, from: usize, token: &str) -> SourceSpan {
    let pos = skip_trivia(src, from);
    if src[pos..].starts_with(token) {
        SourceSpan::new(pos, pos + token.len())
    } else {
        // Grammar and lowering disagree; fall back to a bounded search so the
        // span still lands on the token instead of arbitrary text.
        match src[pos..].find(token) {
            Some(off) => SourceSpan::new(pos + off, pos + off + token.len()),
            None => SourceSpan::new(pos, pos),
        }
    }
}

/// Byte offset just past the `(` that is the next real token at or after
/// `from`.
pub fn after_open_paren(src: &str, from: usize) -> usize {
    token_at(src, from, "(").end
}

/// Walks back from `end` over whitespace, returning the trimmed end offset.
fn rtrim_ws(src: &str, start: usize, mut end: usize) -> usize {
    let b = src.as_bytes();
    while end > start && b[end - 1].is_ascii_whitespace() {
        end -= 1;
    }
    end
}

/// Byte offset just past the `)` closing the paren group that opens at or
/// after `from`. Comment-aware, tracks nesting.
fn past_matching_paren(src: &str, from: usize) -> usize {
    let open = skip_trivia(src, from);
    let b = src.as_bytes();
    debug_assert!(open < b.len() && b[open] == b'(', "expected '(' at {open}");
    let mut depth = 0usize;
    let mut pos = open;
    while pos < b.len() {
        pos = skip_trivia(src, pos);
        if pos >= b.len() {
            break;
        }
        match b[pos] {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return pos + 1;
                }
            }
            b'"' | b'\'' => {
                let quote = b[pos];
                pos += 1;
                while pos < b.len() && b[pos] != quote {
                    if b[pos] == b'\\' {
                        pos += 1;
                    }
                    pos += 1;
                }
            }
            _ => {}
        }
        pos += 1;
    }
    pos
}

struct Lower<'a> {
    src: &'a str,
}

impl<'a> Lower<'a> {
    fn unit_part(&self, part: &pt::SourceUnitPart) -> AstNode {
        use pt::SourceUnitPart as P;
        match part {
            P::PragmaDirective(p) => AstNode::new(NodeKind::Pragma, span_of(&self.pragma_loc(p))),
            P::ImportDirective(imp) => {
                let loc = match imp {
                    pt::Import::Plain(_, loc)
                    | pt::Import::GlobalSymbol(_, _, loc)
                    | pt::Import::Rename(_, _, loc) => loc,
                };
                AstNode::new(NodeKind::Import, span_of(loc))
            }
            P::ContractDefinition(c) => self.contract(c),
            P::EnumDefinition(e) => self.enum_def(e),
            P::StructDefinition(s) => AstNode::new(
                NodeKind::StructDef {
                    name: ident_name(&s.name),
                },
                span_of(&s.loc),
            ),
            P::EventDefinition(e) => AstNode::new(
                NodeKind::EventDef {
                    name: ident_name(&e.name),
                },
                span_of(&e.loc),
            ),
            P::ErrorDefinition(e) => AstNode::new(
                NodeKind::ErrorDef {
                    name: ident_name(&e.name),
                },
                span_of(&e.loc),
            ),
            P::FunctionDefinition(f) => self.function(f),
            P::VariableDefinition(v) => self.state_var(v),
            P::TypeDefinition(t) => AstNode::new(NodeKind::Opaque, span_of(&t.loc)),
            P::Annotation(a) => AstNode::new(NodeKind::Opaque, span_of(&a.loc)),
            P::Using(u) => AstNode::new(NodeKind::Opaque, span_of(&u.loc)),
            P::StraySemicolon(loc) => AstNode::new(NodeKind::Opaque, span_of(loc)),
        }
    }

    fn pragma_loc(&self, p: &pt::PragmaDirective) -> pt::Loc {
        match p {
            pt::PragmaDirective::Identifier(loc, _, _)
            | pt::PragmaDirective::StringLiteral(loc, _, _)
            | pt::PragmaDirective::Version(loc, _, _) => *loc,
        }
    }

    fn contract(&self, c: &pt::ContractDefinition) -> AstNode {
        let kind = match c.ty {
            pt::ContractTy::Abstract(_) => ContractKind::Abstract,
            pt::ContractTy::Contract(_) => ContractKind::Contract,
            pt::ContractTy::Interface(_) => ContractKind::Interface,
            pt::ContractTy::Library(_) => ContractKind::Library,
        };
        let bases = c
            .base
            .iter()
            .map(|b| BaseRef {
                name: path_name(&b.name),
                name_span: span_of(&b.name.loc),
                has_args: b.args.is_some(),
            })
            .collect();
        let mut node = AstNode::new(
            NodeKind::Contract {
                name: ident_name(&c.name),
                kind,
                bases,
            },
            span_of(&c.loc),
        );
        for part in &c.parts {
            node.children.push(self.contract_part(part));
        }
        node
    }

    fn contract_part(&self, part: &pt::ContractPart) -> AstNode {
        use pt::ContractPart as P;
        match part {
            P::StructDefinition(s) => AstNode::new(
                NodeKind::StructDef {
                    name: ident_name(&s.name),
                },
                span_of(&s.loc),
            ),
            P::EventDefinition(e) => AstNode::new(
                NodeKind::EventDef {
                    name: ident_name(&e.name),
                },
                span_of(&e.loc),
            ),
            P::EnumDefinition(e) => self.enum_def(e),
            P::ErrorDefinition(e) => AstNode::new(
                NodeKind::ErrorDef {
                    name: ident_name(&e.name),
                },
                span_of(&e.loc),
            ),
            P::VariableDefinition(v) => self.state_var(v),
            P::FunctionDefinition(f) => self.function(f),
            P::TypeDefinition(t) => AstNode::new(NodeKind::Opaque, span_of(&t.loc)),
            P::Annotation(a) => AstNode::new(NodeKind::Opaque, span_of(&a.loc)),
            P::Using(u) => AstNode::new(NodeKind::Opaque, span_of(&u.loc)),
            P::StraySemicolon(loc) => AstNode::new(NodeKind::Opaque, span_of(loc)),
        }
    }

    fn enum_def(&self, e: &pt::EnumDefinition) -> AstNode {
        let members = e
            .values
            .iter()
            .flatten()
            .map(|id| (id.name.clone(), span_of(&id.loc)))
            .collect();
        AstNode::new(
            NodeKind::EnumDef {
                name: ident_name(&e.name),
                members,
            },
            span_of(&e.loc),
        )
    }

    fn state_var(&self, v: &pt::VariableDefinition) -> AstNode {
        let mut visibility = None;
        let mut is_constant = false;
        let mut is_immutable = false;
        for attr in &v.attrs {
            match attr {
                pt::VariableAttribute::Visibility(vis) => {
                    if let Some((mapped, span)) = map_visibility(vis) {
                        visibility = Some((mapped, span));
                    }
                }
                pt::VariableAttribute::Constant(_) => is_constant = true,
                pt::VariableAttribute::Immutable(_) => is_immutable = true,
                _ => {}
            }
        }
        let info = StateVarInfo {
            name: ident_name(&v.name),
            name_span: v
                .name
                .as_ref()
                .map(|n| span_of(&n.loc))
                .unwrap_or(SourceSpan::new(0, 0)),
            ty_text: self.slice(&v.ty.loc()).to_string(),
            visibility,
            is_constant,
            is_immutable,
        };
        let mut node = AstNode::new(NodeKind::StateVar(info), span_of(&v.loc));
        if let Some(init) = &v.initializer {
            node.children.push(self.expr(init));
        }
        node
    }

    fn function(&self, f: &pt::FunctionDefinition) -> AstNode {
        let fn_kind = match f.ty {
            pt::FunctionTy::Constructor => FnKind::Constructor,
            pt::FunctionTy::Function => FnKind::Function,
            pt::FunctionTy::Fallback => FnKind::Fallback,
            pt::FunctionTy::Receive => FnKind::Receive,
            pt::FunctionTy::Modifier => FnKind::Modifier,
        };
        let params: Vec<ParamInfo> = f
            .params
            .iter()
            .filter_map(|(loc, p)| p.as_ref().map(|p| self.param(loc, p)))
            .collect();
        let returns: Vec<ParamInfo> = f
            .returns
            .iter()
            .filter_map(|(loc, p)| p.as_ref().map(|p| self.param(loc, p)))
            .collect();
        // Modifier definitions may omit the parens entirely.
        let after_name = span_of(&f.name_loc).end;
        let params_end = if skip_trivia(self.src, after_name) < self.src.len()
            && self.src.as_bytes()[skip_trivia(self.src, after_name)] == b'('
        {
            past_matching_paren(self.src, after_name)
        } else {
            after_name
        };

        let mut visibility = None;
        let mut mutability = None;
        let mut is_virtual = false;
        let mut override_span = None;
        let mut modifiers = Vec::new();
        for attr in &f.attributes {
            match attr {
                pt::FunctionAttribute::Visibility(vis) => {
                    if let Some(mapped) = map_visibility(vis) {
                        visibility = Some(mapped);
                    }
                }
                pt::FunctionAttribute::Mutability(m) => {
                    let mapped = match m {
                        pt::Mutability::Pure(loc) => (Mutability::Pure, span_of(loc)),
                        pt::Mutability::View(loc) => (Mutability::View, span_of(loc)),
                        pt::Mutability::Constant(loc) => (Mutability::View, span_of(loc)),
                        pt::Mutability::Payable(loc) => (Mutability::Payable, span_of(loc)),
                    };
                    mutability = Some(mapped);
                }
                pt::FunctionAttribute::Virtual(_) => is_virtual = true,
                pt::FunctionAttribute::Override(loc, _) => override_span = Some(span_of(loc)),
                pt::FunctionAttribute::BaseOrModifier(loc, base) => {
                    modifiers.push(ModifierInvocation {
                        name: path_name(&base.name),
                        name_span: span_of(&base.name.loc),
                        span: span_of(loc),
                        args: base.args.as_ref().map(|args| {
                            args.iter().map(|a| self.slice(&a.loc()).to_string()).collect()
                        }),
                    });
                }
                pt::FunctionAttribute::Immutable(_) | pt::FunctionAttribute::Error(_) => {}
            }
        }
        let body_start = f.body.as_ref().and_then(|b| match b {
            pt::Statement::Block { loc, .. } => Some(span_of(loc).start + 1),
            _ => None,
        });
        let info = FunctionInfo {
            name: f.name.as_ref().map(|n| n.name.clone()),
            fn_kind,
            params,
            returns,
            params_end,
            visibility,
            mutability,
            is_virtual,
            override_span,
            modifiers,
            has_body: f.body.is_some(),
            body_start,
        };
        let mut node = AstNode::new(NodeKind::Function(Box::new(info)), span_of(&f.loc));
        if let Some(body) = &f.body {
            node.children.push(self.stmt(body));
        }
        node
    }

    fn param(&self, loc: &pt::Loc, p: &pt::Parameter) -> ParamInfo {
        ParamInfo {
            ty_text: self.slice(&p.ty.loc()).to_string(),
            ty_span: span_of(&p.ty.loc()),
            name: p.name.as_ref().map(|n| n.name.clone()),
            name_span: p.name.as_ref().map(|n| span_of(&n.loc)),
            storage: p.storage.as_ref().map(map_storage),
            span: span_of(loc),
        }
    }

    fn stmt(&self, s: &pt::Statement) -> AstNode {
        use pt::Statement as S;
        let span = span_of(&s.loc());
        match s {
            S::Block {
                unchecked,
                statements,
                ..
            } => {
                let mut node = AstNode::new(
                    NodeKind::Block {
                        unchecked: *unchecked,
                    },
                    span,
                );
                for st in statements {
                    node.children.push(self.stmt(st));
                }
                node
            }
            S::Assembly { .. } => AstNode::new(NodeKind::Opaque, span),
            S::Args(..) => AstNode::new(NodeKind::Opaque, span),
            S::If(_, cond, then, els) => {
                let else_kw = els
                    .as_ref()
                    .map(|_| token_at(self.src, span_of(&then.loc()).end, "else"));
                let mut node = AstNode::new(NodeKind::If { else_kw }, span);
                node.children.push(self.expr(cond));
                node.children.push(self.stmt(then));
                if let Some(e) = els {
                    node.children.push(self.stmt(e));
                }
                node
            }
            S::While(_, cond, body) => {
                let mut node = AstNode::new(NodeKind::While, span);
                node.children.push(self.expr(cond));
                node.children.push(self.stmt(body));
                node
            }
            S::Expression(_, e) => {
                let mut node = AstNode::new(NodeKind::ExprStatement, span);
                node.children.push(self.expr(e));
                node
            }
            S::VariableDefinition(_, decl, init) => {
                let info = VarDeclInfo {
                    name: decl.name.as_ref().map(|n| n.name.clone()),
                    name_span: decl.name.as_ref().map(|n| span_of(&n.loc)),
                    ty_text: self.slice(&decl.ty.loc()).to_string(),
                    storage: decl.storage.as_ref().map(map_storage),
                };
                let mut node = AstNode::new(NodeKind::VarDeclStatement(info), span);
                if let Some(e) = init {
                    node.children.push(self.expr(e));
                }
                node
            }
            S::For(_, init, cond, update, body) => {
                let mut children = Vec::new();
                if let Some(st) = init {
                    children.push(self.stmt(st));
                }
                let cond_child = cond.as_ref().map(|c| {
                    children.push(self.expr(c));
                    children.len() - 1
                });
                if let Some(u) = update {
                    children.push(self.expr(u));
                }
                if let Some(b) = body {
                    children.push(self.stmt(b));
                }
                let mut node = AstNode::new(NodeKind::For { cond_child }, span);
                node.children = children;
                node
            }
            S::DoWhile(_, body, cond) => {
                let mut node = AstNode::new(NodeKind::DoWhile, span);
                node.children.push(self.stmt(body));
                node.children.push(self.expr(cond));
                node
            }
            S::Continue(_) => AstNode::new(NodeKind::Continue, span),
            S::Break(_) => AstNode::new(NodeKind::Break, span),
            S::Return(_, value) => {
                let mut node = AstNode::new(NodeKind::Return, span);
                if let Some(v) = value {
                    node.children.push(self.expr(v));
                }
                node
            }
            S::Revert(_, path, args) => {
                let mut node = AstNode::new(
                    NodeKind::Revert {
                        error_name: path.as_ref().map(path_name),
                    },
                    span,
                );
                for a in args {
                    node.children.push(self.expr(a));
                }
                node
            }
            S::RevertNamedArgs(_, path, args) => {
                let mut node = AstNode::new(
                    NodeKind::Revert {
                        error_name: path.as_ref().map(path_name),
                    },
                    span,
                );
                for a in args {
                    node.children.push(self.expr(&a.expr));
                }
                node
            }
            S::Emit(_, call) => {
                let mut node = AstNode::new(NodeKind::Emit, span);
                node.children.push(self.expr(call));
                node
            }
            S::Try(_, expr, returns, catches) => {
                let mut node = AstNode::new(
                    NodeKind::Try {
                        catch_count: catches.len(),
                    },
                    span,
                );
                node.children.push(self.expr(expr));
                if let Some((_, body)) = returns {
                    node.children.push(self.stmt(body));
                }
                for clause in catches {
                    let (cl_loc, body) = match clause {
                        pt::CatchClause::Simple(loc, _, body) => (loc, body),
                        pt::CatchClause::Named(loc, _, _, body) => (loc, body),
                    };
                    let mut cl = AstNode::new(NodeKind::CatchClause, span_of(cl_loc));
                    cl.children.push(self.stmt(body));
                    node.children.push(cl);
                }
                node
            }
            S::Error(loc) => AstNode::new(NodeKind::Opaque, span_of(loc)),
        }
    }

    fn expr(&self, e: &pt::Expression) -> AstNode {
        use pt::Expression as E;
        let span = span_of(&e.loc());
        match e {
            E::PostIncrement(_, inner) => self.unary(span, UnaryOp::Inc, "++", false, inner),
            E::PostDecrement(_, inner) => self.unary(span, UnaryOp::Dec, "--", false, inner),
            E::PreIncrement(_, inner) => self.unary(span, UnaryOp::Inc, "++", true, inner),
            E::PreDecrement(_, inner) => self.unary(span, UnaryOp::Dec, "--", true, inner),
            E::Not(_, inner) => self.unary(span, UnaryOp::Not, "!", true, inner),
            E::BitwiseNot(_, inner) => self.unary(span, UnaryOp::BitNot, "~", true, inner),
            E::Negate(_, inner) => self.unary(span, UnaryOp::Neg, "-", true, inner),
            E::UnaryPlus(_, inner) => {
                let mut node = AstNode::new(NodeKind::Opaque, span);
                node.children.push(self.expr(inner));
                node
            }
            E::Power(_, l, r) => self.binary(span, BinOp::Pow, l, r),
            E::Multiply(_, l, r) => self.binary(span, BinOp::Mul, l, r),
            E::Divide(_, l, r) => self.binary(span, BinOp::Div, l, r),
            E::Modulo(_, l, r) => self.binary(span, BinOp::Mod, l, r),
            E::Add(_, l, r) => self.binary(span, BinOp::Add, l, r),
            E::Subtract(_, l, r) => self.binary(span, BinOp::Sub, l, r),
            E::ShiftLeft(_, l, r) => self.binary(span, BinOp::Shl, l, r),
            E::ShiftRight(_, l, r) => self.binary(span, BinOp::Shr, l, r),
            E::BitwiseAnd(_, l, r) => self.binary(span, BinOp::BitAnd, l, r),
            E::BitwiseXor(_, l, r) => self.binary(span, BinOp::BitXor, l, r),
            E::BitwiseOr(_, l, r) => self.binary(span, BinOp::BitOr, l, r),
            E::Less(_, l, r) => self.binary(span, BinOp::Lt, l, r),
            E::More(_, l, r) => self.binary(span, BinOp::Gt, l, r),
            E::LessEqual(_, l, r) => self.binary(span, BinOp::Le, l, r),
            E::MoreEqual(_, l, r) => self.binary(span, BinOp::Ge, l, r),
            E::Equal(_, l, r) => self.binary(span, BinOp::Eq, l, r),
            E::NotEqual(_, l, r) => self.binary(span, BinOp::Ne, l, r),
            E::And(_, l, r) => self.binary(span, BinOp::And, l, r),
            E::Or(_, l, r) => self.binary(span, BinOp::Or, l, r),
            E::ConditionalOperator(_, c, t, f) => {
                let mut node = AstNode::new(NodeKind::Conditional, span);
                node.children.push(self.expr(c));
                node.children.push(self.expr(t));
                node.children.push(self.expr(f));
                node
            }
            E::Assign(_, l, r) => self.assign(span, AssignOp::Assign, l, r),
            E::AssignOr(_, l, r) => self.assign(span, AssignOp::BitOr, l, r),
            E::AssignAnd(_, l, r) => self.assign(span, AssignOp::BitAnd, l, r),
            E::AssignXor(_, l, r) => self.assign(span, AssignOp::BitXor, l, r),
            E::AssignShiftLeft(_, l, r) => self.assign(span, AssignOp::Shl, l, r),
            E::AssignShiftRight(_, l, r) => self.assign(span, AssignOp::Shr, l, r),
            E::AssignAdd(_, l, r) => self.assign(span, AssignOp::Add, l, r),
            E::AssignSubtract(_, l, r) => self.assign(span, AssignOp::Sub, l, r),
            E::AssignMultiply(_, l, r) => self.assign(span, AssignOp::Mul, l, r),
            E::AssignDivide(_, l, r) => self.assign(span, AssignOp::Div, l, r),
            E::AssignModulo(_, l, r) => self.assign(span, AssignOp::Mod, l, r),
            E::BoolLiteral(_, value) => AstNode::new(NodeKind::BoolLit { value: *value }, span),
            E::NumberLiteral(_, _, _, unit) => {
                let (number_span, unit_info) = self.literal_spans(span, unit);
                AstNode::new(
                    NodeKind::NumberLit {
                        number_span,
                        unit: unit_info,
                    },
                    span,
                )
            }
            E::RationalNumberLiteral(..) => AstNode::new(NodeKind::Opaque, span),
            E::HexNumberLiteral(_, _, unit) => {
                let (number_span, _) = self.literal_spans(span, unit);
                AstNode::new(NodeKind::HexNumberLit { number_span }, span)
            }
            E::StringLiteral(parts) => self.string_literal(parts),
            E::Type(_, ty) => AstNode::new(
                NodeKind::TypeExpr {
                    ty: map_type(ty, self.src),
                },
                span,
            ),
            E::HexLiteral(parts) => {
                let span = SourceSpan::new(
                    span_of(&parts[0].loc).start,
                    span_of(&parts[parts.len() - 1].loc).end,
                );
                AstNode::new(NodeKind::HexStringLit, span)
            }
            E::AddressLiteral(..) => AstNode::new(NodeKind::AddressLit, span),
            E::Variable(id) => AstNode::new(
                NodeKind::Variable {
                    name: id.name.clone(),
                },
                span,
            ),
            E::List(_, items) => {
                let mut node = AstNode::new(NodeKind::Tuple, span);
                for (item_loc, item) in items {
                    if let Some(p) = item {
                        if p.name.is_none() && p.storage.is_none() {
                            node.children.push(self.expr(&p.ty));
                        } else {
                            node.children
                                .push(AstNode::new(NodeKind::Opaque, span_of(item_loc)));
                        }
                    }
                }
                node
            }
            E::ArrayLiteral(_, items) => {
                let mut node = AstNode::new(NodeKind::ArrayLit, span);
                for item in items {
                    node.children.push(self.expr(item));
                }
                node
            }
            E::ArraySubscript(_, base, index) => {
                let mut node = AstNode::new(NodeKind::Index, span);
                node.children.push(self.expr(base));
                if let Some(i) = index {
                    node.children.push(self.expr(i));
                }
                node
            }
            E::ArraySlice(_, base, from, to) => {
                let mut node = AstNode::new(NodeKind::Index, span);
                node.children.push(self.expr(base));
                if let Some(f) = from {
                    node.children.push(self.expr(f));
                }
                if let Some(t) = to {
                    node.children.push(self.expr(t));
                }
                node
            }
            E::Parenthesis(_, inner) => {
                let mut node = AstNode::new(NodeKind::Parenthesized, span);
                node.children.push(self.expr(inner));
                node
            }
            E::MemberAccess(_, base, member) => {
                let mut node = AstNode::new(
                    NodeKind::MemberAccess {
                        member: member.name.clone(),
                        member_span: span_of(&member.loc),
                    },
                    span,
                );
                node.children.push(self.expr(base));
                node
            }
            E::FunctionCall(_, callee, args) => self.call(span, callee, args),
            E::FunctionCallBlock(_, callee, block) => {
                // A call-options block without an argument list; rare enough
                // to keep opaque while still lowering what's inside.
                let mut node = AstNode::new(NodeKind::Opaque, span);
                node.children.push(self.expr(callee));
                for value in block_option_values(block) {
                    node.children.push(self.expr(value));
                }
                node
            }
            E::NamedFunctionCall(_, callee, args) => {
                let mut node = AstNode::new(
                    NodeKind::Call {
                        options: Vec::new(),
                        named_args: true,
                        args_from: 1,
                    },
                    span,
                );
                node.children.push(self.expr(callee));
                for a in args {
                    node.children.push(self.expr(&a.expr));
                }
                node
            }
            E::New(_, inner) => {
                let mut node = AstNode::new(NodeKind::New, span);
                node.children.push(self.expr(inner));
                node
            }
            E::Delete(_, inner) => {
                let mut node = AstNode::new(NodeKind::DeleteExpr, span);
                node.children.push(self.expr(inner));
                node
            }
        }
    }

    fn call(&self, span: SourceSpan, callee: &pt::Expression, args: &[pt::Expression]) -> AstNode {
        let mut options = Vec::new();
        let mut children = Vec::new();
        if let pt::Expression::FunctionCallBlock(_, inner_callee, block) = callee {
            children.push(self.expr(inner_callee));
            for arg in block_named_args(block) {
                options.push(arg.name.name.clone());
                children.push(self.expr(&arg.expr));
            }
        } else {
            children.push(self.expr(callee));
        }
        let args_from = children.len();
        for a in args {
            children.push(self.expr(a));
        }
        let mut node = AstNode::new(
            NodeKind::Call {
                options,
                named_args: false,
                args_from,
            },
            span,
        );
        node.children = children;
        node
    }

    fn unary(
        &self,
        span: SourceSpan,
        op: UnaryOp,
        token: &str,
        prefix: bool,
        inner: &pt::Expression,
    ) -> AstNode {
        let inner_span = span_of(&inner.loc());
        let op_span = if prefix {
            token_at(self.src, span.start, token)
        } else {
            token_at(self.src, inner_span.end, token)
        };
        let mut node = AstNode::new(
            NodeKind::Unary {
                op,
                op_span,
                prefix,
            },
            span,
        );
        node.children.push(self.expr(inner));
        node
    }

    fn binary(&self, span: SourceSpan, op: BinOp, l: &pt::Expression, r: &pt::Expression) -> AstNode {
        let op_span = token_at(self.src, span_of(&l.loc()).end, op.token());
        let mut node = AstNode::new(NodeKind::Binary { op, op_span }, span);
        node.children.push(self.expr(l));
        node.children.push(self.expr(r));
        node
    }

    fn assign(
        &self,
        span: SourceSpan,
        op: AssignOp,
        l: &pt::Expression,
        r: &pt::Expression,
    ) -> AstNode {
        let op_span = token_at(self.src, span_of(&l.loc()).end, op.token());
        let mut node = AstNode::new(NodeKind::Assign { op, op_span }, span);
        node.children.push(self.expr(l));
        node.children.push(self.expr(r));
        node
    }

    fn string_literal(&self, parts: &[pt::StringLiteral]) -> AstNode {
        let lit_node = |p: &pt::StringLiteral| {
            AstNode::new(
                NodeKind::StringLit {
                    value: p.string.clone(),
                    unicode: p.unicode,
                },
                span_of(&p.loc),
            )
        };
        if parts.len() == 1 {
            return lit_node(&parts[0]);
        }
        let span = SourceSpan::new(
            span_of(&parts[0].loc).start,
            span_of(&parts[parts.len() - 1].loc).end,
        );
        let mut node = AstNode::new(NodeKind::Opaque, span);
        for p in parts {
            node.children.push(lit_node(p));
        }
        node
    }

    /// Splits a literal span into the numeric token and an optional unit
    /// suffix (`1 ether` has the number `1` and the unit `ether`).
    fn literal_spans(
        &self,
        span: SourceSpan,
        unit: &Option<pt::Identifier>,
    ) -> (SourceSpan, Option<(String, SourceSpan)>) {
        match unit {
            Some(u) => {
                let unit_span = span_of(&u.loc);
                let number_end = rtrim_ws(self.src, span.start, unit_span.start);
                (
                    SourceSpan::new(span.start, number_end),
                    Some((u.name.clone(), unit_span)),
                )
            }
            None => (span, None),
        }
    }

    fn slice(&self, loc: &pt::Loc) -> &'a str {
        span_of(loc).slice(self.src)
    }
}

fn block_named_args(block: &pt::Statement) -> &[pt::NamedArgument] {
    match block {
        pt::Statement::Args(_, args) => args,
        _ => &[],
    }
}

fn block_option_values(block: &pt::Statement) -> Vec<&pt::Expression> {
    block_named_args(block).iter().map(|a| &a.expr).collect()
}

fn ident_name(id: &Option<pt::Identifier>) -> String {
    id.as_ref().map(|i| i.name.clone()).unwrap_or_default()
}

fn path_name(path: &pt::IdentifierPath) -> String {
    path.identifiers
        .iter()
        .map(|i| i.name.as_str())
        .collect::<Vec<_>>()
        .join(".")
}

fn map_visibility(vis: &pt::Visibility) -> Option<(Visibility, SourceSpan)> {
    let (mapped, loc) = match vis {
        pt::Visibility::External(loc) => (Visibility::External, loc),
        pt::Visibility::Public(loc) => (Visibility::Public, loc),
        pt::Visibility::Internal(loc) => (Visibility::Internal, loc),
        pt::Visibility::Private(loc) => (Visibility::Private, loc),
    };
    loc.as_ref().map(|l| (mapped, span_of(l)))
}

fn map_storage(storage: &pt::StorageLocation) -> (StorageLoc, SourceSpan) {
    match storage {
        pt::StorageLocation::Memory(loc) => (StorageLoc::Memory, span_of(loc)),
        pt::StorageLocation::Storage(loc) => (StorageLoc::Storage, span_of(loc)),
        pt::StorageLocation::Calldata(loc) => (StorageLoc::Calldata, span_of(loc)),
    }
}

fn map_type(ty: &pt::Type, src: &str) -> ElemType {
    match ty {
        pt::Type::Address => ElemType::Address { payable: false },
        pt::Type::AddressPayable | pt::Type::Payable => ElemType::Address { payable: true },
        pt::Type::Bool => ElemType::Bool,
        pt::Type::String => ElemType::Str,
        pt::Type::Int(n) => ElemType::Int(*n),
        pt::Type::Uint(n) => ElemType::Uint(*n),
        pt::Type::Bytes(n) => ElemType::Bytes(*n),
        pt::Type::DynamicBytes => ElemType::DynamicBytes,
        other => {
            let _ = src;
            ElemType::Other(format!("{other:?}"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::visit;

    fn parse(src: &str) -> AstNode {
        parse_source("t.sol", src).expect("fixture parses")
    }

    #[test]
    fn binary_operator_token_span_is_exact() {
        let src = "contract C { function f(uint a, uint b) public pure returns (uint) { return a + b; } }";
        let root = parse(src);
        let binaries = visit(&root, &|n| matches!(n.kind, NodeKind::Binary { .. }));
        assert_eq!(binaries.len(), 1);
        match &binaries[0].kind {
            NodeKind::Binary { op, op_span } => {
                assert_eq!(*op, BinOp::Add);
                assert_eq!(op_span.slice(src), "+");
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn operator_token_scan_skips_comments() {
        let src = "contract C { function f(uint a) public pure returns (uint) { return a /* plus */ + 1; } }";
        let root = parse(src);
        let binaries = visit(&root, &|n| matches!(n.kind, NodeKind::Binary { .. }));
        match &binaries[0].kind {
            NodeKind::Binary { op_span, .. } => assert_eq!(op_span.slice(src), "+"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn number_literal_unit_is_split_from_the_number() {
        let src = "contract C { uint x = 2 ether; }";
        let root = parse(src);
        let lits = visit(&root, &|n| matches!(n.kind, NodeKind::NumberLit { .. }));
        match &lits[0].kind {
            NodeKind::NumberLit { number_span, unit } => {
                assert_eq!(number_span.slice(src), "2");
                let (name, span) = unit.as_ref().unwrap();
                assert_eq!(name, "ether");
                assert_eq!(span.slice(src), "ether");
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn spans_exclude_surrounding_trivia() {
        let src = "contract C {\n    // setter\n    function f(uint v) public { x = v; }\n    uint x;\n}";
        let root = parse(src);
        for node in visit(&root, &|_| true) {
            if node.span.is_empty() {
                continue;
            }
            let text = node.text(src);
            assert_eq!(text, text.trim(), "span has leading/trailing trivia: {text:?}");
        }
    }

    #[test]
    fn assembly_blocks_become_opaque_nodes() {
        let src = "contract C { function f() public pure returns (uint r) { assembly { r := 1 } } }";
        let root = parse(src);
        let opaque = visit(&root, &|n| matches!(n.kind, NodeKind::Opaque));
        assert_eq!(opaque.len(), 1);
        assert!(opaque[0].text(src).starts_with("assembly"));
        assert!(opaque[0].children.is_empty());
    }

    #[test]
    fn parse_error_reports_line_and_column() {
        let err = parse_source("bad.sol", "contract C {\n  function _ {]\n}").unwrap_err();
        assert_eq!(err.file, "bad.sol");
        assert_eq!(err.line, 2);
        assert!(err.column > 1);
        assert!(!err.message.is_empty());
    }

    #[test]
    fn function_params_end_lands_after_closing_paren() {
        let src = "contract C { function f(uint a, bool b) public {} function g() internal {} }";
        let root = parse(src);
        let fns = visit(&root, &|n| matches!(n.kind, NodeKind::Function(_)));
        let infos: Vec<_> = fns
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Function(f) => f,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(&src[infos[0].params_end - 1..infos[0].params_end], ")");
        assert_eq!(&src[infos[0].params_end..infos[0].params_end + 7], " public");
        assert_eq!(&src[infos[1].params_end - 2..infos[1].params_end], "()");
    }

    #[test]
    fn call_options_are_recorded() {
        let src = "contract C { function f(address payable p) public { (bool ok, ) = p.call{value: 1}(\"\"); require(ok, \"x\"); } }";
        let root = parse(src);
        let calls = visit(&root, &|n| {
            matches!(&n.kind, NodeKind::Call { options, .. } if !options.is_empty())
        });
        assert_eq!(calls.len(), 1);
        match &calls[0].kind {
            NodeKind::Call {
                options, args_from, ..
            } => {
                assert_eq!(options, &vec!["value".to_string()]);
                assert_eq!(*args_from, 2);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn discover_targets_applies_glob_and_skip_list() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        fs::create_dir_all(root.join("contracts/lib")).unwrap();
        fs::write(root.join("contracts/A.sol"), "contract A {}").unwrap();
        fs::write(root.join("contracts/lib/B.sol"), "contract B {}").unwrap();
        fs::write(root.join("contracts/Migrations.sol"), "contract M {}").unwrap();
        fs::write(root.join("README.md"), "not solidity").unwrap();
        let found = discover_targets(
            root,
            "contracts/**/*.sol",
            &["Migrations.sol".to_string()],
            &[".git"],
        )
        .unwrap();
        assert_eq!(found, vec!["contracts/A.sol", "contracts/lib/B.sol"]);
    }

    #[test]
    fn discover_targets_empty_set_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = discover_targets(dir.path(), "contracts/**/*.sol", &[], &[]).unwrap_err();
        assert!(matches!(err, TargetError::EmptyTargetSet { .. }));
    }

    #[test]
    fn content_hash_is_stable_hex_sha256() {
        assert_eq!(
            content_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn line_col_is_one_based() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 3), (2, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
