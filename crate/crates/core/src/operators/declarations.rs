//! Declaration-level operators: constructors, visibility keywords, modifier
//! lists, overrides, overloads, return structures, and enum definitions.

use super::context::{normalize_ty, walk, ContractInfo};
use super::{path_of, with_trailing_ws, OpCtx};
use crate::ast::{
    AstNode, ContractKind, FnKind, FunctionInfo, ModifierInvocation, Mutability, Mutation,
    NodeKind, SourceSpan, Visibility,
};

/// Does this invocation-list entry name a base contract rather than a
/// modifier? Constructors list base-constructor calls among their attributes.
fn names_contract(ctx: &OpCtx, contract: Option<&ContractInfo>, inv: &ModifierInvocation) -> bool {
    ctx.info.contract(&inv.name).is_some()
        || contract.is_some_and(|c| c.base_names.contains(&inv.name))
}

fn modifier_invocations<'f>(
    ctx: &OpCtx,
    contract: Option<&ContractInfo>,
    f: &'f FunctionInfo,
) -> Vec<&'f ModifierInvocation> {
    f.modifiers
        .iter()
        .filter(|inv| !names_contract(ctx, contract, inv))
        .collect()
}

/// Modifiers invocable from `contract`: its own and its in-file ancestors',
/// nearest declaration first, deduplicated by name.
fn reachable_modifiers<'a>(ctx: &'a OpCtx, contract: &'a ContractInfo) -> Vec<&'a super::context::ModSig> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for c in std::iter::once(contract).chain(ctx.info.ancestors_of(contract)) {
        for m in &c.modifiers {
            if !seen.contains(&&m.name) {
                seen.push(&m.name);
                out.push(m);
            }
        }
    }
    out
}

/// CCD: comment out a constructor. Constructors that pass arguments to a
/// base constructor are skipped; removing them cannot compile.
pub(super) fn constructor_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        if f.fn_kind != FnKind::Constructor {
            return;
        }
        let passes_base_args = f.modifiers.iter().any(|inv| {
            names_contract(ctx, site.contract, inv)
                && inv.args.as_ref().is_some_and(|a| !a.is_empty())
        });
        if !passes_base_args {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// FVR: swap a function's visibility keyword within
/// public/external/internal/private, minus the combinations that cannot
/// compile: receive/fallback are untouched, payable functions stay externally
/// callable, virtual functions cannot go private, functions called by bare
/// name anywhere in the file cannot become external, and interface members
/// and override-carrying declarations are pinned by their counterparts.
pub(super) fn function_visibility(ctx: &OpCtx) -> Vec<Mutation> {
    const ALL: [Visibility; 4] = [
        Visibility::Public,
        Visibility::External,
        Visibility::Internal,
        Visibility::Private,
    ];
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        let Some((current, span)) = f.visibility else {
            return;
        };
        let Some(name) = &f.name else { return };
        if f.fn_kind != FnKind::Function
            || !f.has_body
            || f.override_span.is_some()
            || site.contract.is_none_or(|c| c.kind == ContractKind::Interface)
        {
            return;
        }
        let payable = matches!(f.mutability, Some((Mutability::Payable, _)));
        let path = path_of(site);
        for candidate in ALL {
            if candidate == current {
                continue;
            }
            if payable && !matches!(candidate, Visibility::Public | Visibility::External) {
                continue;
            }
            if f.is_virtual && candidate == Visibility::Private {
                continue;
            }
            if candidate == Visibility::External && ctx.info.is_bare_called(name) {
                continue;
            }
            out.push(ctx.mutation(span, candidate.keyword(), &path));
        }
    });
    out
}

/// VVR: swap a state variable's visibility within public/internal/private;
/// default visibility gains an explicit `public`. `external` is invalid for
/// variables and never produced.
pub(super) fn variable_visibility(ctx: &OpCtx) -> Vec<Mutation> {
    const ALL: [Visibility; 3] = [Visibility::Public, Visibility::Internal, Visibility::Private];
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::StateVar(v) = &site.node.kind else {
            return;
        };
        let path = path_of(site);
        match v.visibility {
            Some((current, span)) => {
                for candidate in ALL {
                    if candidate != current {
                        out.push(ctx.mutation(span, candidate.keyword(), &path));
                    }
                }
            }
            None => {
                if !v.name_span.is_empty() {
                    let at = SourceSpan::new(v.name_span.start, v.name_span.start);
                    out.push(ctx.mutation(at, "public ", &path));
                }
            }
        }
    });
    out
}

/// PKD: delete `payable` from function and constructor headers.
/// receive/fallback require it and are never touched.
pub(super) fn payable_keyword(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        if !matches!(f.fn_kind, FnKind::Function | FnKind::Constructor) {
            return;
        }
        if let Some((Mutability::Payable, span)) = f.mutability {
            let span = with_trailing_ws(ctx.src(), span);
            out.push(ctx.mutation(span, "", &path_of(site)));
        }
    });
    out
}

/// MOD: remove one modifier invocation from a function header.
pub(super) fn modifier_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        let path = path_of(site);
        for inv in modifier_invocations(ctx, site.contract, f) {
            let span = with_trailing_ws(ctx.src(), inv.span);
            out.push(ctx.mutation(span, "", &path));
        }
    });
    out
}

/// MOC: swap each adjacent pair of modifier invocations.
pub(super) fn modifier_order(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        let invs = modifier_invocations(ctx, site.contract, f);
        let path = path_of(site);
        for pair in invs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let a_text = a.span.slice(ctx.src());
            let b_text = b.span.slice(ctx.src());
            if a_text == b_text {
                continue;
            }
            let gap = &ctx.src()[a.span.end..b.span.start];
            out.push(ctx.mutation(
                SourceSpan::new(a.span.start, b.span.end),
                format!("{b_text}{gap}{a_text}"),
                &path,
            ));
        }
    });
    out
}

/// MOI: attach a reachable parameterless modifier to a function not already
/// carrying it, right after the parameter list.
pub(super) fn modifier_insertion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        let Some(contract) = site.contract else { return };
        if f.fn_kind != FnKind::Function || f.name.is_none() || !f.has_body {
            return;
        }
        let path = path_of(site);
        let at = SourceSpan::new(f.params_end, f.params_end);
        for m in reachable_modifiers(ctx, contract) {
            if m.param_count != 0 || f.modifiers.iter().any(|inv| inv.name == m.name) {
                continue;
            }
            out.push(ctx.mutation(at, format!(" {}", m.name), &path));
        }
    });
    out
}

/// MOR: replace a modifier invocation with a different reachable modifier
/// that takes no parameters or the same number as the original's arguments.
pub(super) fn modifier_replacement(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        let Some(contract) = site.contract else { return };
        let path = path_of(site);
        for inv in modifier_invocations(ctx, site.contract, f) {
            let arg_count = inv.args.as_ref().map_or(0, |a| a.len());
            for m in reachable_modifiers(ctx, contract) {
                if m.name == inv.name {
                    continue;
                }
                let replacement = if m.param_count == 0 {
                    m.name.clone()
                } else if m.param_count == arg_count {
                    format!("{}({})", m.name, inv.args.as_ref().unwrap().join(", "))
                } else {
                    continue;
                };
                out.push(ctx.mutation(inv.span, replacement, &path));
            }
        }
    });
    out
}

/// OMD: comment out an overriding modifier definition when an in-file base
/// declares the virtual original.
pub(super) fn overridden_modifier_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        if f.fn_kind != FnKind::Modifier || f.override_span.is_none() {
            return;
        }
        let Some(contract) = site.contract else { return };
        let Some(name) = &f.name else { return };
        let base_declares = ctx
            .info
            .ancestors_of(contract)
            .any(|c| c.modifiers.iter().any(|m| &m.name == name && m.is_virtual));
        if base_declares {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// ORFD: comment out an overriding function when an in-file base provides an
/// implementation of the same signature.
pub(super) fn overridden_function_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        if f.fn_kind != FnKind::Function || f.override_span.is_none() {
            return;
        }
        let Some(contract) = site.contract else { return };
        let Some(name) = &f.name else { return };
        let base_implements = ctx.info.ancestors_of(contract).any(|c| {
            c.functions
                .iter()
                .any(|g| &g.name == name && g.arity == f.params.len() && g.has_body)
        });
        if base_implements {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// OLFD: comment out one overloaded definition, unless some call site in the
/// file resolves uniquely to it (the deletion could not compile).
pub(super) fn overloaded_function_deletion(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        let NodeKind::Function(f) = &site.node.kind else {
            return;
        };
        if f.fn_kind != FnKind::Function {
            return;
        }
        let Some(contract) = site.contract else { return };
        let Some(name) = &f.name else { return };
        let overloads: Vec<_> = contract.functions.iter().filter(|g| &g.name == name).collect();
        if overloads.len() < 2 {
            return;
        }
        let arity = f.params.len();
        let siblings_with_arity = overloads.iter().filter(|g| g.arity == arity).count();
        let uniquely_called = siblings_with_arity == 1
            && ctx
                .info
                .bare_call_arities
                .get(name)
                .is_some_and(|arities| arities.contains(&arity));
        if !uniquely_called {
            out.push(ctx.commented(site.node.span, &path_of(site)));
        }
    });
    out
}

/// RVS: swap adjacent same-type values in explicit return tuples, and
/// adjacent same-type names in named-return clauses of functions that assign
/// their results instead of returning them.
pub(super) fn return_values_swap(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        match &site.node.kind {
            NodeKind::Return => {
                let Some(f) = site.function else { return };
                if f.returns.len() < 2 {
                    return;
                }
                let Some(tuple) = site.node.children.first() else {
                    return;
                };
                if !matches!(tuple.kind, NodeKind::Tuple)
                    || tuple.children.len() != f.returns.len()
                {
                    return;
                }
                let path = path_of(site);
                for i in 0..tuple.children.len() - 1 {
                    if normalize_ty(&f.returns[i].ty_text)
                        != normalize_ty(&f.returns[i + 1].ty_text)
                    {
                        continue;
                    }
                    push_swap(ctx, &mut out, tuple.children[i].span, tuple.children[i + 1].span, &path);
                }
            }
            NodeKind::Function(f) => {
                if f.returns.len() < 2 || has_valued_return(site.node) {
                    return;
                }
                let path = path_of(site);
                for i in 0..f.returns.len() - 1 {
                    let (a, b) = (&f.returns[i], &f.returns[i + 1]);
                    if normalize_ty(&a.ty_text) != normalize_ty(&b.ty_text) {
                        continue;
                    }
                    let (Some(a_span), Some(b_span)) = (a.name_span, b.name_span) else {
                        continue;
                    };
                    push_swap(ctx, &mut out, a_span, b_span, &path);
                }
            }
            _ => {}
        }
    });
    out
}

fn has_valued_return(node: &AstNode) -> bool {
    if matches!(node.kind, NodeKind::Return) && !node.children.is_empty() {
        return true;
    }
    node.children.iter().any(has_valued_return)
}

/// One contiguous splice swapping the texts at two spans, keeping the gap.
fn push_swap(ctx: &OpCtx, out: &mut Vec<Mutation>, a: SourceSpan, b: SourceSpan, path: &str) {
    let a_text = a.slice(ctx.src());
    let b_text = b.slice(ctx.src());
    if a_text == b_text {
        return;
    }
    let gap = &ctx.src()[a.end..b.start];
    out.push(ctx.mutation(
        SourceSpan::new(a.start, b.end),
        format!("{b_text}{gap}{a_text}"),
        path,
    ));
}

/// ER: swap an enum definition's first two members; replace an enum member
/// access with the definition's first differing member.
pub(super) fn enum_replacement(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        match &site.node.kind {
            NodeKind::EnumDef { members, .. } if members.len() >= 2 => {
                push_swap(ctx, &mut out, members[0].1, members[1].1, &path_of(site));
            }
            NodeKind::MemberAccess {
                member,
                member_span,
            } => {
                let Some(NodeKind::Variable { name }) =
                    site.node.children.first().map(|c| &c.kind)
                else {
                    return;
                };
                let Some(def) = ctx.info.enums.iter().find(|e| &e.name == name) else {
                    return;
                };
                if def.members.len() < 2 || !def.members.contains(member) {
                    return;
                }
                if let Some(other) = def.members.iter().find(|m| *m != member) {
                    out.push(ctx.mutation(*member_span, other.clone(), &path_of(site)));
                }
            }
            _ => {}
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{mutations, replacements};

    #[test]
    fn ccd_comments_constructors_without_base_arguments() {
        let src = "contract A {
            uint x;
            constructor() { x = 1; }
        }
        contract P {
            uint p;
            constructor(uint v) { p = v; }
        }
        contract D is P {
            constructor(uint v) P(v) {}
        }";
        let muts = mutations(src, "CCD");
        assert_eq!(muts.len(), 2);
        assert!(muts[0].0.starts_with("constructor() { x = 1; }"));
        assert!(muts[1].0.starts_with("constructor(uint v) { p = v; }"));
    }

    #[test]
    fn fvr_swaps_visibility_within_legal_combinations() {
        let src = "contract C {
            uint state;
            function poke() external { state += 1; }
            function bump() internal { state += 2; }
            function trigger() public { bump(); }
        }";
        assert_eq!(
            replacements(src, "FVR"),
            vec![
                "internal", "private", "public", // poke: external, not bare-called
                "private", "public", // bump: bare-called, external excluded
                "external", "internal", "private", // trigger
            ]
        );
    }

    #[test]
    fn fvr_keeps_payable_functions_externally_callable() {
        let src = "contract C { function buy() public payable {} }";
        assert_eq!(
            mutations(src, "FVR"),
            vec![("public".into(), "external".into())]
        );
    }

    #[test]
    fn fvr_never_makes_virtual_functions_private() {
        let src = "contract C { function f() public virtual {} }";
        assert_eq!(replacements(src, "FVR"), vec!["external", "internal"]);
    }

    #[test]
    fn fvr_skips_receive_fallback_overrides_and_interfaces() {
        let src = "interface I {
            function f() external;
        }
        contract A {
            function f() public virtual {}
        }
        contract B is A {
            function f() public override {}
            receive() external payable {}
            fallback() external payable {}
        }";
        // Only A.f is eligible; it is virtual, so private is excluded too.
        assert_eq!(replacements(src, "FVR"), vec!["external", "internal"]);
    }

    #[test]
    fn vvr_swaps_state_variable_visibility_and_fills_defaults() {
        let src = "contract C {
            uint public total;
            uint internal cursor;
            uint private seed;
            uint counter;
        }";
        let muts = mutations(src, "VVR");
        assert_eq!(
            muts,
            vec![
                ("public".into(), "internal".into()),
                ("public".into(), "private".into()),
                ("internal".into(), "private".into()),
                ("internal".into(), "public".into()),
                ("private".into(), "internal".into()),
                ("private".into(), "public".into()),
                ("".into(), "public ".into()),
            ]
        );
        assert!(muts.iter().all(|(_, r)| r != "external"));
    }

    #[test]
    fn pkd_deletes_payable_only_from_plain_functions_and_constructors() {
        let src = "contract C {
            uint raised;
            constructor() payable {}
            function give() public payable { raised += 1; }
            receive() external payable {}
            fallback() external payable {}
        }";
        assert_eq!(
            mutations(src, "PKD"),
            vec![
                ("payable ".into(), "".into()),
                ("payable ".into(), "".into()),
            ]
        );
    }

    #[test]
    fn mod_removes_modifier_invocations_but_not_base_constructor_calls() {
        let src = "contract P {
            uint p;
            constructor(uint v) { p = v; }
        }
        contract D is P {
            address owner;
            modifier onlyOwner() { require(msg.sender == owner); _; }
            constructor(uint v) P(v) {}
            function f() public onlyOwner { owner = msg.sender; }
        }";
        assert_eq!(
            mutations(src, "MOD"),
            vec![("onlyOwner ".into(), "".into())]
        );
    }

    #[test]
    fn moc_swaps_adjacent_distinct_modifiers() {
        let src = "contract C {
            modifier a() { _; }
            modifier b() { _; }
            function f() public a b {}
            function g() public a a {}
        }";
        assert_eq!(mutations(src, "MOC"), vec![("a b".into(), "b a".into())]);
    }

    #[test]
    fn moi_attaches_reachable_parameterless_modifiers() {
        let src = "contract A {
            modifier guard() { _; }
        }
        contract B is A {
            modifier timed(uint t) { _; }
            uint total;
            function add(uint v) public guard { total += v; }
            function peek() public view returns (uint) { return total; }
        }";
        let muts = mutations(src, "MOI");
        assert_eq!(muts, vec![("".into(), " guard".into())]);
    }

    #[test]
    fn mor_replaces_with_arity_compatible_alternatives() {
        let src = "contract C {
            address owner;
            address admin;
            modifier onlyOwner() { require(msg.sender == owner); _; }
            modifier onlyAdmin() { require(msg.sender == admin); _; }
            modifier capped(uint v) { require(v < 10); _; }
            function f(uint v) public capped(v) { owner = msg.sender; }
        }";
        assert_eq!(
            mutations(src, "MOR"),
            vec![
                ("capped(v)".into(), "onlyAdmin".into()),
                ("capped(v)".into(), "onlyOwner".into()),
            ]
        );
    }

    #[test]
    fn omd_deletes_overriding_modifiers_with_virtual_bases() {
        let src = "contract Base {
            modifier guard() virtual { _; }
            uint value;
            function set(uint v) public guard { value = v; }
        }
        contract Strict is Base {
            modifier guard() override { require(msg.sender != address(0)); _; }
        }";
        let muts = mutations(src, "OMD");
        assert_eq!(muts.len(), 1);
        assert!(muts[0].1.starts_with("/*modifier guard() override"));
    }

    #[test]
    fn orfd_deletes_overrides_backed_by_base_implementations() {
        let src = "contract Animal {
            function sound() public pure virtual returns (uint) { return 1; }
        }
        contract Dog is Animal {
            function sound() public pure override returns (uint) { return 2; }
        }";
        let muts = mutations(src, "ORFD");
        assert_eq!(muts.len(), 1);
        assert!(muts[0].0.starts_with("function sound() public pure override"));
    }

    #[test]
    fn orfd_skips_overrides_of_unimplemented_signatures() {
        let src = "abstract contract Shape {
            function area() public virtual returns (uint);
        }
        contract Square is Shape {
            function area() public override returns (uint) { return 4; }
        }";
        assert!(mutations(src, "ORFD").is_empty());
    }

    #[test]
    fn olfd_keeps_the_overload_a_call_site_needs() {
        let src = "contract Notifier {
            event Ping(address target, uint code);
            function ping(address target) public { emit Ping(target, 0); }
            function ping(address target, uint code) public { emit Ping(target, code); }
            function broadcast(address target) public { ping(target); }
        }";
        let muts = mutations(src, "OLFD");
        assert_eq!(muts.len(), 1);
        assert!(muts[0].0.starts_with("function ping(address target, uint code)"));
    }

    #[test]
    fn rvs_swaps_tuple_returns_and_named_return_clauses() {
        let src = "contract C {
            function bounds(uint lo, uint hi) public pure returns (uint, uint) {
                return (lo, hi);
            }
            function split(uint amount) public pure returns (uint half, uint rest) {
                half = amount / 2;
                rest = amount - half;
            }
            function mixed(uint a, bool f) public pure returns (uint, bool) {
                return (a, f);
            }
        }";
        assert_eq!(
            mutations(src, "RVS"),
            vec![
                ("lo, hi".into(), "hi, lo".into()),
                ("half, uint rest".into(), "rest, uint half".into()),
            ]
        );
    }

    #[test]
    fn er_swaps_definitions_and_accesses() {
        let src = "contract Workflow {
            enum Stage { Draft, Review, Final }
            Stage public stage;
            function advance() public {
                if (stage == Stage.Draft) { stage = Stage.Review; }
            }
        }";
        assert_eq!(
            mutations(src, "ER"),
            vec![
                ("Draft, Review".into(), "Review, Draft".into()),
                ("Draft".into(), "Review".into()),
                ("Review".into(), "Draft".into()),
            ]
        );
    }
}
