//! Syntax tree types anchored to byte ranges in the original source, plus the
//! splicing primitives that turn a [`Mutation`] into mutant source text.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Half-open byte range `[start, end)` into the original source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end, "span start {start} > end {end}");
        SourceSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn slice<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

/// A single-span textual edit produced by one mutation operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mutation {
    /// Operator mnemonic, e.g. "BOR".
    pub operator: String,
    pub span: SourceSpan,
    /// Exact text replaced (must equal the source slice at `span`).
    pub original: String,
    pub replacement: String,
    /// Project-relative path of the mutated file.
    pub file: String,
    /// Human-readable position of the mutated node, for diagnostics.
    pub node_path: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpliceError {
    #[error("span [{start},{end}) invalid for file of {len} bytes", start = span.start, end = span.end)]
    InvalidSpan { span: SourceSpan, len: usize },
    #[error("span text mismatch: expected {expected:?}, found {found:?}")]
    SpanMismatch { expected: String, found: String },
}

/// Applies a mutation to the original file text, returning the mutant text.
/// The edit is purely textual: everything outside `mutation.span` is preserved
/// byte for byte.
pub fn splice(source: &str, mutation: &Mutation) -> Result<String, SpliceError> {
    let span = mutation.span;
    if span.start > span.end
        || span.end > source.len()
        || !source.is_char_boundary(span.start)
        || !source.is_char_boundary(span.end)
    {
        return Err(SpliceError::InvalidSpan {
            span,
            len: source.len(),
        });
    }
    let found = &source[span.start..span.end];
    if found != mutation.original {
        return Err(SpliceError::SpanMismatch {
            expected: mutation.original.clone(),
            found: found.to_string(),
        });
    }
    let mut out = String::with_capacity(source.len() + mutation.replacement.len());
    out.push_str(&source[..span.start]);
    out.push_str(&mutation.replacement);
    out.push_str(&source[span.end..]);
    Ok(out)
}

/// Builds the replacement text that comments out `span`, extending it through
/// an immediately following semicolon so no empty statement is left behind.
///
/// Returns the extended span and the replacement. Uses block-comment
/// delimiters unless the text already contains `*/`, in which case every line
/// is prefixed with a line comment and a trailing newline protects any code
/// that follows on the same line.
pub fn comment_out(source: &str, span: SourceSpan) -> (SourceSpan, String) {
    let mut end = span.end;
    let bytes = source.as_bytes();
    let mut probe = end;
    while probe < bytes.len() && (bytes[probe] as char).is_whitespace() {
        probe += 1;
    }
    if probe < bytes.len() && bytes[probe] == b';' {
        end = probe + 1;
    }
    let extended = SourceSpan::new(span.start, end);
    let text = extended.slice(source);
    let replacement = if text.contains("*/") {
        let mut out = String::new();
        for (i, line) in text.split('\n').enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str("//");
            out.push_str(line);
        }
        out.push('\n');
        out
    } else {
        format!("/*{text}*/")
    };
    (extended, replacement)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractKind {
    Contract,
    Abstract,
    Interface,
    Library,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRef {
    pub name: String,
    pub name_span: SourceSpan,
    pub has_args: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
}

impl Visibility {
    pub fn keyword(&self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::External => "external",
            Visibility::Internal => "internal",
            Visibility::Private => "private",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutability {
    Pure,
    View,
    Payable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StorageLoc {
    Memory,
    Storage,
    Calldata,
}

impl StorageLoc {
    pub fn keyword(&self) -> &'static str {
        match self {
            StorageLoc::Memory => "memory",
            StorageLoc::Storage => "storage",
            StorageLoc::Calldata => "calldata",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FnKind {
    Constructor,
    Function,
    Fallback,
    Receive,
    Modifier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamInfo {
    pub ty_text: String,
    pub ty_span: SourceSpan,
    pub name: Option<String>,
    pub name_span: Option<SourceSpan>,
    pub storage: Option<(StorageLoc, SourceSpan)>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierInvocation {
    pub name: String,
    pub name_span: SourceSpan,
    pub span: SourceSpan,
    pub args: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionInfo {
    pub name: Option<String>,
    pub fn_kind: FnKind,
    pub params: Vec<ParamInfo>,
    pub returns: Vec<ParamInfo>,
    /// Byte offset just past the closing `)` of the parameter list.
    pub params_end: usize,
    pub visibility: Option<(Visibility, SourceSpan)>,
    pub mutability: Option<(Mutability, SourceSpan)>,
    pub is_virtual: bool,
    pub override_span: Option<SourceSpan>,
    pub modifiers: Vec<ModifierInvocation>,
    pub has_body: bool,
    /// Byte offset just past the body's opening `{`, when a body exists.
    pub body_start: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateVarInfo {
    pub name: String,
    pub name_span: SourceSpan,
    pub ty_text: String,
    pub visibility: Option<(Visibility, SourceSpan)>,
    pub is_constant: bool,
    pub is_immutable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDeclInfo {
    pub name: Option<String>,
    pub name_span: Option<SourceSpan>,
    pub ty_text: String,
    pub storage: Option<(StorageLoc, SourceSpan)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
}

impl BinOp {
    pub fn token(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Shl,
    Shr,
    BitAnd,
    BitOr,
    BitXor,
}

impl AssignOp {
    pub fn token(&self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Mod => "%=",
            AssignOp::Shl => "<<=",
            AssignOp::Shr => ">>=",
            AssignOp::BitAnd => "&=",
            AssignOp::BitOr => "|=",
            AssignOp::BitXor => "^=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnaryOp {
    Inc,
    Dec,
    Not,
    BitNot,
    Neg,
}

/// Elementary type appearing as an expression (the callee of a cast).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElemType {
    Address { payable: bool },
    Bool,
    Str,
    Uint(u16),
    Int(u16),
    Bytes(u8),
    DynamicBytes,
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    SourceUnit,
    Pragma,
    Import,
    Contract {
        name: String,
        kind: ContractKind,
        bases: Vec<BaseRef>,
    },
    EnumDef {
        name: String,
        members: Vec<(String, SourceSpan)>,
    },
    StructDef {
        name: String,
    },
    EventDef {
        name: String,
    },
    ErrorDef {
        name: String,
    },
    StateVar(StateVarInfo),
    Function(Box<FunctionInfo>),
    // statements
    Block {
        unchecked: bool,
    },
    ExprStatement,
    VarDeclStatement(VarDeclInfo),
    /// children: condition, then-branch, optional else-branch
    If {
        else_kw: Option<SourceSpan>,
    },
    /// children: condition, body
    While,
    /// children: body, condition
    DoWhile,
    /// children in source order; `cond_child` indexes the condition if present
    For {
        cond_child: Option<usize>,
    },
    Break,
    Continue,
    Return,
    Revert {
        error_name: Option<String>,
    },
    Emit,
    /// children: tried expression, body, catch clauses
    Try {
        catch_count: usize,
    },
    CatchClause,
    /// Assembly blocks and constructs outside the schema.
    Opaque,
    // expressions
    Binary {
        op: BinOp,
        op_span: SourceSpan,
    },
    Assign {
        op: AssignOp,
        op_span: SourceSpan,
    },
    Unary {
        op: UnaryOp,
        op_span: SourceSpan,
        prefix: bool,
    },
    /// children: condition, true-value, false-value
    Conditional,
    /// children: callee, call-option values if any, then arguments
    Call {
        options: Vec<String>,
        named_args: bool,
        /// index of the first argument in `children`
        args_from: usize,
    },
    MemberAccess {
        member: String,
        member_span: SourceSpan,
    },
    Index,
    Variable {
        name: String,
    },
    TypeExpr {
        ty: ElemType,
    },
    NumberLit {
        /// Span of the numeric token, excluding any unit suffix.
        number_span: SourceSpan,
        unit: Option<(String, SourceSpan)>,
    },
    HexNumberLit {
        /// Span of the 0x token, excluding any unit suffix.
        number_span: SourceSpan,
    },
    AddressLit,
    BoolLit {
        value: bool,
    },
    StringLit {
        value: String,
        unicode: bool,
    },
    HexStringLit,
    ArrayLit,
    Tuple,
    New,
    DeleteExpr,
    Parenthesized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: NodeKind,
    pub span: SourceSpan,
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: SourceSpan) -> Self {
        AstNode {
            kind,
            span,
            children: Vec::new(),
        }
    }

    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        self.span.slice(source)
    }

    /// Short label used in diagnostic node paths.
    pub fn label(&self) -> String {
        match &self.kind {
            NodeKind::Contract { name, .. } => format!("Contract[{name}]"),
            NodeKind::Function(f) => match &f.name {
                Some(n) => format!("Function[{n}]"),
                None => format!("{:?}", f.fn_kind),
            },
            NodeKind::EnumDef { name, .. } => format!("Enum[{name}]"),
            NodeKind::StateVar(v) => format!("StateVar[{}]", v.name),
            NodeKind::Binary { op, .. } => format!("Binary[{}]", op.token()),
            NodeKind::Assign { op, .. } => format!("Assign[{}]", op.token()),
            NodeKind::Call { .. } => "Call".to_string(),
            NodeKind::MemberAccess { member, .. } => format!("Member[{member}]"),
            other => {
                let dbg = format!("{other:?}");
                dbg.split([' ', '(', '{']).next().unwrap_or("Node").to_string()
            }
        }
    }
}

/// Collects, in depth-first source order, every node satisfying `matcher`.
pub fn visit<'a>(root: &'a AstNode, matcher: &dyn Fn(&AstNode) -> bool) -> Vec<&'a AstNode> {
    let mut out = Vec::new();
    fn go<'a>(node: &'a AstNode, matcher: &dyn Fn(&AstNode) -> bool, out: &mut Vec<&'a AstNode>) {
        if matcher(node) {
            out.push(node);
        }
        for child in &node.children {
            go(child, matcher, out);
        }
    }
    go(root, matcher, &mut out);
    out
}
