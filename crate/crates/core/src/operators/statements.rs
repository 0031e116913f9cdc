//! Statement-level operators: conditions, loops, control transfers, emits,
//! exception handling, selfdestruct, catch clauses, and data locations.

use super::context::walk;
use super::tables::SFI_STATEMENT;
use super::{path_of, OpCtx};
use crate::ast::{
    AstNode, FnKind, Mutability, Mutation, NodeKind, SourceSpan, StorageLoc, Visibility,
};

/// The bare-identifier callee name of an expression statement's call, if the
/// statement has that shape (`require(...)`, `selfdestruct(...)`).
fn statement_call_name(node: &AstNode) -> Option<(&str, &AstNode)> {
    if !matches!(node.kind, NodeKind::ExprStatement) {
        return None;
    }
    let call = node.children.first()?;
    let NodeKind::Call {
        options, args_from, ..
    } = &call.kind
    else {
        return None;
    };
    if !options.is_empty() || *args_from != 1 {
        return None;
    }
    match &call.children[0].kind {
        NodeKind::Variable { name } => Some((name, call)),
        _ => None,
    }
}

/// CSC: if-condition → true and → false; else branch commented out.
pub(super) fn conditional(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::If { else_kw } = &site.node.kind {
            let path = path_of(site);
            let cond = site.node.children[0].span;
            out.push(ctx.mutation(cond, "true", &path));
            out.push(ctx.mutation(cond, "false", &path));
            if let Some(kw) = else_kw {
                let branch = site.node.children.last().unwrap();
                let span = SourceSpan::new(kw.start, branch.span.end);
                out.push(ctx.commented(span, &path));
            }
        }
    });
    out
}

/// LSC: loop condition → true and → false.
pub(super) fn loop_condition(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let cond = match &site.node.kind {
            NodeKind::While => Some(&site.node.children[0]),
            NodeKind::DoWhile => Some(&site.node.children[1]),
            NodeKind::For { cond_child } => cond_child.map(|i| &site.node.children[i]),
            _ => None,
        };
        if let Some(cond) = cond {
            let path = path_of(site);
            out.push(ctx.mutation(cond.span, "true", &path));
            out.push(ctx.mutation(cond.span, "false", &path));
        }
    });
    out
}

/// BCRD: break ↔ continue, and comment-out of each.
pub(super) fn break_continue(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let swapped = match &site.node.kind {
            NodeKind::Break => "continue",
            NodeKind::Continue => "break",
            _ => return,
        };
        let path = path_of(site);
        out.push(ctx.mutation(site.node.span, swapped, &path));
        out.push(ctx.commented(site.node.span, &path));
    });
    out
}

/// RSD: comment out a return statement.
pub(super) fn return_statement(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if matches!(site.node.kind, NodeKind::Return) {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// EED: comment out an emit statement.
pub(super) fn event_emission(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if matches!(site.node.kind, NodeKind::Emit) {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// EHC: comment out require/assert/revert statements; swap require ↔ assert
/// (require's message argument is dropped when swapping to assert).
pub(super) fn exception_handling(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let path = path_of(site);
        if matches!(site.node.kind, NodeKind::Revert { .. }) {
            out.push(ctx.commented(site.node.span, &path));
            return;
        }
        let Some((name, call)) = statement_call_name(site.node) else {
            return;
        };
        let args = &call.children[1..];
        match (name, args.len()) {
            ("require", 1 | 2) => {
                out.push(ctx.commented(site.node.span, &path));
                let cond = args[0].span.slice(ctx.src());
                out.push(ctx.mutation(call.span, format!("assert({cond})"), &path));
            }
            ("assert", 1) => {
                out.push(ctx.commented(site.node.span, &path));
                let cond = args[0].span.slice(ctx.src());
                out.push(ctx.mutation(call.span, format!("require({cond})"), &path));
            }
            // revert("...") sometimes parses as a plain call statement rather
            // than a revert statement, depending on the argument shape.
            ("revert", _) => out.push(ctx.commented(site.node.span, &path)),
            _ => {}
        }
    });
    out
}

/// SFD: comment out a selfdestruct call statement.
pub(super) fn selfdestruct_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let Some(("selfdestruct", _)) = statement_call_name(site.node) {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// SFI: insert a selfdestruct as the first statement of every externally
/// callable state-changing function.
pub(super) fn selfdestruct_insertion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        let externally_callable = matches!(
            f.visibility,
            Some((Visibility::Public, _)) | Some((Visibility::External, _))
        );
        let state_changing = !matches!(
            f.mutability,
            Some((Mutability::View, _)) | Some((Mutability::Pure, _))
        );
        if f.fn_kind != FnKind::Function
            || f.name.is_none()
            || !externally_callable
            || !state_changing
        {
            return;
        }
        if let Some(body_start) = f.body_start {
            out.push(ctx.mutation(
                SourceSpan::new(body_start, body_start),
                format!(" {SFI_STATEMENT}"),
                &path_of(site),
            ));
        }
    });
    out
}

/// CBD: comment out one catch clause of a try with at least two.
pub(super) fn catch_block(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Try { catch_count } = &site.node.kind else {
            return;
        };
        if *catch_count < 2 {
            return;
        }
        let path = path_of(site);
        for clause in &site.node.children {
            if matches!(clause.kind, NodeKind::CatchClause) {
                out.push(ctx.commented(clause.span, &path));
            }
        }
    });
    out
}

/// DLR: swap data location keywords on local declarations; calldata also
/// moves to memory.
pub(super) fn data_location(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::VarDeclStatement(decl) = &site.node.kind {
            if let Some((loc, span)) = &decl.storage {
                let replacement = match loc {
                    StorageLoc::Memory => "storage",
                    StorageLoc::Storage => "memory",
                    StorageLoc::Calldata => "memory",
                };
                out.push(ctx.mutation(*span, replacement, &path_of(site)));
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{mutations, replacements};

    #[test]
    fn csc_forces_conditions_and_drops_else() {
        let src = "contract C {
            uint x;
            function f(uint e) public {
                if (e > 100) { x += 2; } else { x += 1; }
            }
        }";
        let muts = mutations(src, "CSC");
        assert_eq!(muts.len(), 3);
        assert_eq!(muts[0], ("e > 100".into(), "false".into()));
        assert_eq!(muts[1], ("e > 100".into(), "true".into()));
        assert_eq!(muts[2].0, "else { x += 1; }");
        assert_eq!(muts[2].1, "/*else { x += 1; }*/");
    }

    #[test]
    fn csc_handles_if_without_else() {
        let src = "contract C {
            uint x;
            function f(bool go) public {
                if (go) { x += 1; }
            }
        }";
        assert_eq!(
            mutations(src, "CSC"),
            vec![
                ("go".into(), "false".into()),
                ("go".into(), "true".into()),
            ]
        );
    }

    #[test]
    fn lsc_forces_loop_conditions() {
        let src = "contract C {
            function f(uint n) public pure returns (uint) {
                uint s = 0;
                uint i = 0;
                while (i < n) { i++; }
                for (uint j = 0; j < n; j++) { s += j; }
                do { s += 1; } while (s < n);
                return s;
            }
        }";
        assert_eq!(
            mutations(src, "LSC"),
            vec![
                ("i < n".into(), "false".into()),
                ("i < n".into(), "true".into()),
                ("j < n".into(), "false".into()),
                ("j < n".into(), "true".into()),
                ("s < n".into(), "false".into()),
                ("s < n".into(), "true".into()),
            ]
        );
    }

    #[test]
    fn bcrd_swaps_and_deletes_jump_statements() {
        let src = "contract C {
            function f(uint n) public pure returns (uint) {
                uint s = 0;
                for (uint i = 0; i < n; i++) {
                    if (i == 2) { continue; }
                    if (i == 5) { break; }
                    s += i;
                }
                return s;
            }
        }";
        assert_eq!(
            mutations(src, "BCRD"),
            vec![
                ("continue".into(), "break".into()),
                ("continue;".into(), "/*continue;*/".into()),
                ("break".into(), "continue".into()),
                ("break;".into(), "/*break;*/".into()),
            ]
        );
    }

    #[test]
    fn rsd_comments_out_returns() {
        let src = "contract C {
            function f(uint x) public pure returns (uint) {
                if (x > 1) { return x; }
                return 0;
            }
        }";
        assert_eq!(
            replacements(src, "RSD"),
            vec!["/*return x;*/", "/*return 0;*/"]
        );
    }

    #[test]
    fn eed_comments_out_emits() {
        let src = "contract C {
            event Moved(uint to);
            uint pos;
            function f(uint to) public {
                pos = to;
                emit Moved(to);
            }
        }";
        assert_eq!(
            mutations(src, "EED"),
            vec![("emit Moved(to);".into(), "/*emit Moved(to);*/".into())]
        );
    }

    #[test]
    fn ehc_comments_guards_and_swaps_require_with_assert() {
        let src = "contract C {
            uint level;
            function f(uint s) public {
                require(s > 0, \"step\");
                level += s;
                assert(level >= s);
                if (level > 100) { revert(\"cap\"); }
            }
        }";
        assert_eq!(
            mutations(src, "EHC"),
            vec![
                ("require(s > 0, \"step\")".into(), "assert(s > 0)".into()),
                (
                    "require(s > 0, \"step\");".into(),
                    "/*require(s > 0, \"step\");*/".into()
                ),
                ("assert(level >= s)".into(), "require(level >= s)".into()),
                (
                    "assert(level >= s);".into(),
                    "/*assert(level >= s);*/".into()
                ),
                ("revert(\"cap\");".into(), "/*revert(\"cap\");*/".into()),
            ]
        );
    }

    #[test]
    fn ehc_handles_bare_revert_statements() {
        let src = "contract C {
            function f() public pure {
                revert();
            }
        }";
        assert_eq!(replacements(src, "EHC"), vec!["/*revert();*/"]);
    }

    #[test]
    fn sfd_comments_out_selfdestruct_calls() {
        let src = "contract C {
            address payable w;
            function f() public { selfdestruct(w); }
        }";
        assert_eq!(replacements(src, "SFD"), vec!["/*selfdestruct(w);*/"]);
    }

    #[test]
    fn sfi_targets_externally_callable_state_changing_functions() {
        let src = "contract C {
            uint total;
            function put() public payable { total += msg.value; }
            function audit() public view returns (uint) { return total; }
            function tune(uint k) internal { total *= k; }
            receive() external payable {}
        }";
        assert_eq!(
            replacements(src, "SFI"),
            vec![" selfdestruct(payable(msg.sender));"]
        );
        let muts = mutations(src, "SFI");
        assert_eq!(muts[0].0, "");
    }

    #[test]
    fn cbd_needs_at_least_two_catch_clauses() {
        let two = "contract C {
            uint hits;
            uint faults;
            uint panics;
            function f(address t) public {
                try C(t).noop() {
                    hits += 1;
                } catch Error(string memory) {
                    faults += 1;
                } catch {
                    panics += 1;
                }
            }
            function noop() public pure {}
        }";
        let muts = mutations(two, "CBD");
        assert_eq!(muts.len(), 2);
        assert!(muts[0].0.starts_with("catch Error"));
        assert!(muts[1].0.starts_with("catch {"));

        let one = "contract C {
            uint hits;
            function f(address t) public {
                try C(t).noop() {
                    hits += 1;
                } catch {
                    hits = 0;
                }
            }
            function noop() public pure {}
        }";
        assert!(mutations(one, "CBD").is_empty());
    }

    #[test]
    fn dlr_swaps_local_data_locations() {
        let src = "contract C {
            struct S { uint v; }
            S[] items;
            function f(uint i, bytes calldata data) external view returns (uint) {
                S storage a = items[i];
                S memory b = items[i];
                bytes calldata c = data;
                return a.v + b.v + c.length;
            }
        }";
        assert_eq!(replacements(src, "DLR"), vec!["memory", "storage", "memory"]);
    }
}
