//! Expression-level operators: operator-token swaps, global variable and
//! builtin replacements, address values, casts, super calls, and overloaded
//! call arguments.

use super::context::{normalize_ty, walk, ContractInfo, FileContext, Site};
use super::tables::{
    aor_replacement, bor_replacement, lookup, GVR_TABLE, MCR_TABLE, SFR_TABLE, TOR_TABLE,
};
use super::{path_of, OpCtx};
use crate::ast::{
    AssignOp, AstNode, BinOp, ContractKind, ElemType, Mutability, Mutation, NodeKind, SourceSpan,
    UnaryOp, Visibility,
};

/// BOR: binary operator → designated same-class replacement.
pub(super) fn binary_operator(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::Binary { op, op_span } = &site.node.kind {
            if let Some(replacement) = bor_replacement(*op) {
                out.push(ctx.mutation(*op_span, replacement, &path_of(site)));
            }
        }
    });
    out
}

/// AOR: compound assignment operator → designated replacement.
pub(super) fn assignment_operator(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::Assign { op, op_span } = &site.node.kind {
            if let Some(replacement) = aor_replacement(*op) {
                out.push(ctx.mutation(*op_span, replacement, &path_of(site)));
            }
        }
    });
    out
}

/// UORD: ++ ↔ --; unary -, !, ~ are deleted.
pub(super) fn unary_operator(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::Unary { op, op_span, .. } = &site.node.kind {
            let path = path_of(site);
            match op {
                UnaryOp::Inc => out.push(ctx.mutation(*op_span, "--", &path)),
                UnaryOp::Dec => out.push(ctx.mutation(*op_span, "++", &path)),
                UnaryOp::Neg | UnaryOp::Not | UnaryOp::BitNot => {
                    let inner = site.node.children[0].span;
                    out.push(ctx.mutation(
                        site.node.span,
                        inner.slice(ctx.src()).to_string(),
                        &path,
                    ));
                }
            }
        }
    });
    out
}

/// ICM: `x -= e` → `x = -e`.
pub(super) fn increments_mirror(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::Assign {
            op: AssignOp::Sub,
            op_span,
        } = &site.node.kind
        {
            out.push(ctx.mutation(*op_span, "= -", &path_of(site)));
        }
    });
    out
}

/// DOD: `delete e` → `e`.
pub(super) fn delete_operator(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::DeleteExpr = &site.node.kind {
            let inner = site.node.children[0].span;
            out.push(ctx.mutation(
                site.node.span,
                inner.slice(ctx.src()).to_string(),
                &path_of(site),
            ));
        }
    });
    out
}

/// The `base.member` shape as a normalized key ("msg.sender"), when the base
/// is a plain identifier.
fn member_key(node: &AstNode) -> Option<String> {
    if let NodeKind::MemberAccess { member, .. } = &node.kind {
        if let Some(NodeKind::Variable { name }) = node.children.first().map(|c| &c.kind) {
            return Some(format!("{name}.{member}"));
        }
    }
    None
}

/// Bare call `f(...)`: callee identifier name and argument child range.
fn bare_call(node: &AstNode) -> Option<(&str, usize)> {
    if let NodeKind::Call {
        options, args_from, ..
    } = &node.kind
    {
        if !options.is_empty() {
            return None;
        }
        if let Some(NodeKind::Variable { name }) = node.children.first().map(|c| &c.kind) {
            return Some((name, *args_from));
        }
    }
    None
}

/// GVR: swap global variables within compatible-type classes.
pub(super) fn global_variable(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let path = path_of(site);
        if let Some(key) = member_key(site.node) {
            if let Some(replacement) = lookup(GVR_TABLE, &key) {
                // msg.value only compiles where the compiler can prove a
                // payable call path: payable functions, or internal ones.
                if replacement == "msg.value" && !msg_value_allowed(site) {
                    return;
                }
                out.push(ctx.mutation(site.node.span, replacement, &path));
            }
        } else if let Some(("gasleft", args_from)) = bare_call(site.node) {
            if site.node.children.len() == args_from {
                out.push(ctx.mutation(site.node.span, "block.gaslimit", &path));
            }
        }
    });
    out
}

fn msg_value_allowed(site: &Site) -> bool {
    let Some(f) = site.function else { return false };
    if matches!(f.mutability, Some((Mutability::Payable, _))) {
        return true;
    }
    matches!(
        f.visibility,
        Some((Visibility::Internal, _)) | Some((Visibility::Private, _))
    )
}

/// TOR: msg.sender ↔ tx.origin.
pub(super) fn tx_origin(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let Some(key) = member_key(site.node) {
            if let Some(replacement) = lookup(TOR_TABLE, &key) {
                out.push(ctx.mutation(site.node.span, replacement, &path_of(site)));
            }
        }
    });
    out
}

/// MCR: addmod ↔ mulmod, keccak256 ↔ sha256.
pub(super) fn math_crypto(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let Some((name, _)) = bare_call(site.node) {
            if let Some(replacement) = lookup(MCR_TABLE, name) {
                out.push(ctx.mutation(site.node.children[0].span, replacement, &path_of(site)));
            }
        }
    });
    out
}

/// SFR: SafeMath-style member calls add/sub/mul/div/mod with one argument.
pub(super) fn safemath(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Call {
            options, args_from, ..
        } = &site.node.kind
        else {
            return;
        };
        if !options.is_empty() || site.node.children.len() - args_from != 1 {
            return;
        }
        let callee = &site.node.children[0];
        let NodeKind::MemberAccess {
            member,
            member_span,
        } = &callee.kind
        else {
            return;
        };
        if matches!(&callee.children[0].kind, NodeKind::Variable { name } if name == "super") {
            return;
        }
        if let Some(replacement) = lookup(SFR_TABLE, member) {
            out.push(ctx.mutation(*member_span, replacement, &path_of(site)));
        }
    });
    out
}

/// ETR: swap ether transfer functions, keeping the use site's return shape
/// legal: transfer→send anywhere; send→transfer and call{value:v}("")→
/// transfer only in statement position; plain or gas-only low-level calls
/// cycle call→delegatecall→staticcall→call.
pub(super) fn ether_transfer(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Call {
            options, args_from, ..
        } = &site.node.kind
        else {
            return;
        };
        let callee = &site.node.children[0];
        let NodeKind::MemberAccess {
            member,
            member_span,
        } = &callee.kind
        else {
            return;
        };
        let arg_count = site.node.children.len() - args_from;
        let in_statement = matches!(
            site.parent.map(|p| &p.kind),
            Some(NodeKind::ExprStatement)
        );
        let path = path_of(site);
        match member.as_str() {
            "transfer" if options.is_empty() && arg_count == 1 => {
                out.push(ctx.mutation(*member_span, "send", &path));
            }
            "send" if options.is_empty() && arg_count == 1 && in_statement => {
                out.push(ctx.mutation(*member_span, "transfer", &path));
            }
            "call" | "delegatecall" | "staticcall" => {
                let value_at = options.iter().position(|o| o == "value");
                let gas_only = options.iter().all(|o| o == "gas");
                if member == "call" && value_at.is_some() && in_statement && arg_count == 1 {
                    let data = &site.node.children[*args_from];
                    let empty_data =
                        matches!(&data.kind, NodeKind::StringLit { value, .. } if value.is_empty());
                    if empty_data {
                        let receiver = callee.children[0].span.slice(ctx.src());
                        let amount = site.node.children[1 + value_at.unwrap()].span.slice(ctx.src());
                        out.push(ctx.mutation(
                            site.node.span,
                            format!("{receiver}.transfer({amount})"),
                            &path,
                        ));
                    }
                } else if gas_only && arg_count == 1 {
                    let replacement = match member.as_str() {
                        "call" => "delegatecall",
                        "delegatecall" => "staticcall",
                        _ => "call",
                    };
                    out.push(ctx.mutation(*member_span, replacement, &path));
                }
            }
            _ => {}
        }
    });
    out
}

/// Address-typed expression detection without a type checker; returns
/// whether the expression is the zero address.
fn address_like(node: &AstNode, src: &str, info: &FileContext) -> Option<bool> {
    match &node.kind {
        NodeKind::AddressLit => {
            let digits = node.span.slice(src).trim_start_matches("0x");
            Some(digits.chars().all(|c| c == '0'))
        }
        NodeKind::Call { args_from, .. } => {
            let callee = node.children.first()?;
            if !matches!(
                &callee.kind,
                NodeKind::TypeExpr {
                    ty: ElemType::Address { .. }
                }
            ) || node.children.len() - args_from != 1
            {
                return None;
            }
            let arg = &node.children[*args_from];
            let zero = match &arg.kind {
                NodeKind::NumberLit { number_span, .. } => number_span.slice(src) == "0",
                NodeKind::HexNumberLit { number_span } => number_span
                    .slice(src)
                    .trim_start_matches("0x")
                    .chars()
                    .all(|c| c == '0'),
                _ => false,
            };
            Some(zero)
        }
        NodeKind::MemberAccess { .. } => {
            let key = member_key(node)?;
            matches!(key.as_str(), "msg.sender" | "tx.origin" | "block.coinbase").then_some(false)
        }
        NodeKind::Variable { name } => info.address_idents.contains(name).then_some(false),
        _ => None,
    }
}

/// Positions where swapping in a different address value stays syntactically
/// assignable: assignment/initializer right-hand sides, call arguments, and
/// equality comparisons.
fn avr_context(site: &Site) -> bool {
    let Some(parent) = site.parent else { return false };
    match &parent.kind {
        NodeKind::Assign {
            op: AssignOp::Assign,
            ..
        } => site.child_index == 1,
        NodeKind::VarDeclStatement(_) | NodeKind::StateVar(_) => site.child_index == 0,
        NodeKind::Call { args_from, .. } => site.child_index >= *args_from,
        NodeKind::Binary { op, .. } => matches!(op, BinOp::Eq | BinOp::Ne),
        _ => false,
    }
}

/// AVR: address value → address(0), or address(this) when it already is the
/// zero address.
pub(super) fn address_value(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if !avr_context(site) {
            return;
        }
        if let Some(is_zero) = address_like(site.node, ctx.src(), ctx.info) {
            let replacement = if is_zero { "address(this)" } else { "address(0)" };
            out.push(ctx.mutation(site.node.span, replacement, &path_of(site)));
        }
    });
    out
}

/// SCEC: `T(addrExpr)` with T a contract or interface declared in this file
/// → cast to a different in-file contract/interface type.
pub(super) fn contract_cast(ctx: &OpCtx) -> Vec<Mutation> {
    let castable: Vec<&ContractInfo> = ctx
        .info
        .contracts
        .iter()
        .filter(|c| c.kind != ContractKind::Library)
        .collect();
    if castable.len() < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let Some((name, args_from)) = bare_call(site.node) else {
            return;
        };
        if site.node.children.len() - args_from != 1
            || !castable.iter().any(|c| c.name == name)
            || address_like(&site.node.children[args_from], ctx.src(), ctx.info).is_none()
        {
            return;
        }
        if let Some(other) = castable.iter().find(|c| c.name != name) {
            out.push(ctx.mutation(
                site.node.children[0].span,
                other.name.clone(),
                &path_of(site),
            ));
        }
    });
    out
}

/// ECS: explicit conversion forced down to the smallest width of its kind.
pub(super) fn smaller_type_cast(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Call { args_from, .. } = &site.node.kind else {
            return;
        };
        if site.node.children.len() - args_from != 1 {
            return;
        }
        let callee = &site.node.children[0];
        let NodeKind::TypeExpr { ty } = &callee.kind else {
            return;
        };
        let replacement = match ty {
            ElemType::Uint(n) if *n > 8 => "uint8",
            ElemType::Int(n) if *n > 8 => "int8",
            ElemType::Bytes(n) if *n > 1 => "bytes1",
            _ => return,
        };
        out.push(ctx.mutation(callee.span, replacement, &path_of(site)));
    });
    out
}

/// Does `contract` (or an in-file ancestor) declare a function callable by
/// bare name with this arity?
fn resolves_locally(info: &FileContext, contract: &ContractInfo, name: &str, arity: usize) -> bool {
    std::iter::once(contract)
        .chain(info.ancestors_of(contract))
        .flat_map(|c| &c.functions)
        .any(|f| {
            f.name == name
                && f.arity == arity
                && f.has_body
                && f.visibility != Some(Visibility::External)
        })
}

/// SKD: `super.f(...)` → `f(...)`.
pub(super) fn super_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Call { args_from, .. } = &site.node.kind else {
            return;
        };
        let callee = &site.node.children[0];
        let NodeKind::MemberAccess { member, .. } = &callee.kind else {
            return;
        };
        if !matches!(&callee.children[0].kind, NodeKind::Variable { name } if name == "super") {
            return;
        }
        let Some(contract) = site.contract else { return };
        let arity = site.node.children.len() - args_from;
        if resolves_locally(ctx.info, contract, member, arity) {
            out.push(ctx.mutation(callee.span, member.clone(), &path_of(site)));
        }
    });
    out
}

/// SKI: `f(...)` → `super.f(...)` inside a contract that overrides `f` while
/// an in-file base still provides an implementation.
pub(super) fn super_insertion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let Some((name, args_from)) = bare_call(site.node) else {
            return;
        };
        let Some(contract) = site.contract else { return };
        let arity = site.node.children.len() - args_from;
        let overrides_here = contract.functions.iter().any(|f| f.name == name);
        let base_provides = ctx.info.ancestors_of(contract).any(|base| {
            base.functions.iter().any(|f| {
                f.name == name
                    && f.arity == arity
                    && f.has_body
                    && f.visibility != Some(Visibility::External)
            })
        });
        if overrides_here && base_provides {
            out.push(ctx.mutation(
                site.node.children[0].span,
                format!("super.{name}"),
                &path_of(site),
            ));
        }
    });
    out
}

/// Synthesizable default value for a parameter type, for ACM argument lists.
fn default_for(ty: &str) -> Option<String> {
    let ty = normalize_ty(ty);
    if ty == "bool" {
        return Some("false".to_string());
    }
    if ty == "string" || ty == "bytes" {
        return Some("\"\"".to_string());
    }
    if ty == "address" {
        return Some("address(0)".to_string());
    }
    if ty == "address payable" {
        return Some("payable(address(0))".to_string());
    }
    if let Some(n) = ty.strip_prefix("bytes") {
        if n.parse::<u8>().map_or(false, |n| (1..=32).contains(&n)) {
            return Some(format!("{ty}(0)"));
        }
    }
    let digits_ok = |s: &str| s.is_empty() || s.chars().all(|c| c.is_ascii_digit());
    if let Some(n) = ty.strip_prefix("uint") {
        if digits_ok(n) {
            return Some("0".to_string());
        }
    }
    if let Some(n) = ty.strip_prefix("int") {
        if digits_ok(n) {
            return Some("0".to_string());
        }
    }
    None
}

/// ACM: rewrite a call to an overloaded function so it matches a different
/// overload, synthesizing defaults for extra parameters and truncating for
/// missing ones.
pub(super) fn overloaded_call_args(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let Some((name, args_from)) = bare_call(site.node) else {
            return;
        };
        let Some(contract) = site.contract else { return };
        let overloads: Vec<_> = std::iter::once(contract)
            .chain(ctx.info.ancestors_of(contract))
            .flat_map(|c| &c.functions)
            .filter(|f| f.name == name)
            .collect();
        let mut distinct: Vec<&Vec<String>> = overloads.iter().map(|f| &f.param_types).collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() < 2 {
            return;
        }
        let args: Vec<&AstNode> = site.node.children[args_from..].iter().collect();
        let target = overloads
            .iter()
            .filter(|f| f.arity != args.len())
            .find_map(|f| {
                let kept = args.len().min(f.arity);
                let mut pieces: Vec<String> = args[..kept]
                    .iter()
                    .map(|a| a.span.slice(ctx.src()).to_string())
                    .collect();
                for param in &f.params[kept..] {
                    pieces.push(default_for(&param.ty_text)?);
                }
                Some(pieces.join(", "))
            });
        let Some(new_args) = target else { return };
        let span = match (args.first(), args.last()) {
            (Some(first), Some(last)) => SourceSpan::new(first.span.start, last.span.end),
            _ => {
                let open = crate::parser::after_open_paren(ctx.src(), site.node.children[0].span.end);
                SourceSpan::new(open, open)
            }
        };
        out.push(ctx.mutation(span, new_args, &path_of(site)));
    });
    out
}
