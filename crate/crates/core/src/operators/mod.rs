//! The mutation operators: 25 Solidity-specific and 19 general rules, each a
//! pure function from a parsed file to an ordered list of candidate
//! mutations. Preconditions bake in the stillborn-avoidance checks; anything
//! a single-file parse cannot prove is left to the external compiler.

mod context;
mod declarations;
mod expressions;
mod literals;
mod statements;
mod tables;

pub use context::{build_context, ContractInfo, FileContext, Site};
pub use tables::{operator_info, OperatorInfo, CATALOG};

use crate::ast::{comment_out, Mutation, SourceSpan};
use crate::parser::SourceFile;

/// A parsed file plus its semantic context, ready for operator application.
pub struct PreparedFile<'a> {
    pub file: &'a SourceFile,
    pub info: FileContext,
}

pub fn prepare(file: &SourceFile) -> PreparedFile<'_> {
    PreparedFile {
        info: build_context(&file.ast),
        file,
    }
}

impl PreparedFile<'_> {
    /// Runs one operator over the file. Unknown ids yield nothing; use
    /// [`operator_info`] to validate ids up front.
    pub fn apply(&self, id: &str) -> Vec<Mutation> {
        let ctx = OpCtx {
            file: self.file,
            info: &self.info,
            op: id,
        };
        let mut out = match id {
            "AVR" => expressions::address_value(&ctx),
            "CCD" => declarations::constructor_deletion(&ctx),
            "DLR" => statements::data_location(&ctx),
            "DOD" => expressions::delete_operator(&ctx),
            "EED" => statements::event_emission(&ctx),
            "EHC" => statements::exception_handling(&ctx),
            "ETR" => expressions::ether_transfer(&ctx),
            "FVR" => declarations::function_visibility(&ctx),
            "GVR" => expressions::global_variable(&ctx),
            "MCR" => expressions::math_crypto(&ctx),
            "MOC" => declarations::modifier_order(&ctx),
            "MOD" => declarations::modifier_deletion(&ctx),
            "MOI" => declarations::modifier_insertion(&ctx),
            "MOR" => declarations::modifier_replacement(&ctx),
            "OMD" => declarations::overridden_modifier_deletion(&ctx),
            "PKD" => declarations::payable_keyword(&ctx),
            "RSD" => statements::return_statement(&ctx),
            "RVS" => declarations::return_values_swap(&ctx),
            "SCEC" => expressions::contract_cast(&ctx),
            "SFD" => statements::selfdestruct_deletion(&ctx),
            "SFI" => statements::selfdestruct_insertion(&ctx),
            "SFR" => expressions::safemath(&ctx),
            "TOR" => expressions::tx_origin(&ctx),
            "VUR" => literals::unit_replacement(&ctx),
            "VVR" => declarations::variable_visibility(&ctx),
            "ACM" => expressions::overloaded_call_args(&ctx),
            "AOR" => expressions::assignment_operator(&ctx),
            "BCRD" => statements::break_continue(&ctx),
            "BLR" => literals::boolean(&ctx),
            "BOR" => expressions::binary_operator(&ctx),
            "CBD" => statements::catch_block(&ctx),
            "CSC" => statements::conditional(&ctx),
            "ECS" => expressions::smaller_type_cast(&ctx),
            "ER" => declarations::enum_replacement(&ctx),
            "HLR" => literals::hexadecimal(&ctx),
            "ICM" => expressions::increments_mirror(&ctx),
            "ILR" => literals::integer(&ctx),
            "LSC" => statements::loop_condition(&ctx),
            "OLFD" => declarations::overloaded_function_deletion(&ctx),
            "ORFD" => declarations::overridden_function_deletion(&ctx),
            "SKD" => expressions::super_deletion(&ctx),
            "SKI" => expressions::super_insertion(&ctx),
            "SLR" => literals::string(&ctx),
            "UORD" => expressions::unary_operator(&ctx),
            _ => Vec::new(),
        };
        out.retain(|m| m.replacement != m.original);
        out.sort_by(|a, b| {
            (a.span.start, a.span.end, &a.replacement).cmp(&(b.span.start, b.span.end, &b.replacement))
        });
        out
    }
}

/// Runs one operator over one file.
pub fn apply_operator(id: &str, file: &SourceFile) -> Vec<Mutation> {
    prepare(file).apply(id)
}

/// Shared state handed to each operator implementation.
pub(crate) struct OpCtx<'a> {
    pub file: &'a SourceFile,
    pub info: &'a FileContext,
    pub op: &'a str,
}

impl OpCtx<'_> {
    pub fn src(&self) -> &str {
        &self.file.text
    }

    pub fn mutation(&self, span: SourceSpan, replacement: impl Into<String>, path: &str) -> Mutation {
        Mutation {
            operator: self.op.to_string(),
            span,
            original: span.slice(self.src()).to_string(),
            replacement: replacement.into(),
            file: self.file.path.clone(),
            node_path: path.to_string(),
        }
    }

    /// Comment-out mutation over `span`, swallowing a trailing semicolon.
    pub fn commented(&self, span: SourceSpan, path: &str) -> Mutation {
        let (extended, replacement) = comment_out(self.src(), span);
        self.mutation(extended, replacement, path)
    }
}

/// Diagnostic location string for a traversal site ("Contract.function").
pub(crate) fn path_of(site: &Site) -> String {
    let mut out = String::new();
    if let Some(c) = site.contract {
        out.push_str(&c.name);
    }
    if let Some(f) = site.function {
        if let Some(name) = &f.name {
            if !out.is_empty() {
                out.push('.');
            }
            out.push_str(name);
        }
    }
    out
}

/// Extends `span` over immediately following spaces and tabs, for deletions
/// that would otherwise leave doubled whitespace.
pub(crate) fn with_trailing_ws(src: &str, span: SourceSpan) -> SourceSpan {
    let bytes = src.as_bytes();
    let mut end = span.end;
    while end < bytes.len() && (bytes[end] == b' ' || bytes[end] == b'\t') {
        end += 1;
    }
    SourceSpan::new(span.start, end)
}
