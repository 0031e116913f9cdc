//! Per-file semantic context collected before operators run: contract and
//! function symbol tables, inheritance links (within the file), enum
//! definitions, call-site shapes, and address-typed identifiers. Single-file
//! scope only; preconditions that would need cross-file resolution degrade to
//! skipping the mutation.

use std::collections::{HashMap, HashSet};

use crate::ast::{
    AstNode, ContractKind, FnKind, FunctionInfo, NodeKind, ParamInfo, Visibility,
};

#[derive(Clone, Debug)]
pub struct FnSig {
    pub name: String,
    pub fn_kind: FnKind,
    pub arity: usize,
    pub param_types: Vec<String>,
    pub params: Vec<ParamInfo>,
    pub has_body: bool,
    pub is_virtual: bool,
    pub has_override: bool,
    pub visibility: Option<Visibility>,
}

#[derive(Clone, Debug)]
pub struct ModSig {
    pub name: String,
    pub param_count: usize,
    pub is_virtual: bool,
    pub has_override: bool,
}

#[derive(Clone, Debug)]
pub struct EnumInfo {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ContractInfo {
    pub name: String,
    pub kind: ContractKind,
    /// Direct base names as written in the inheritance list.
    pub base_names: Vec<String>,
    /// Transitive base names resolvable within this file, nearest first.
    pub ancestors: Vec<String>,
    pub functions: Vec<FnSig>,
    pub modifiers: Vec<ModSig>,
}

#[derive(Debug, Default)]
pub struct FileContext {
    pub contracts: Vec<ContractInfo>,
    pub enums: Vec<EnumInfo>,
    /// Function names invoked by bare name somewhere in the file, with the
    /// argument counts seen at those call sites.
    pub bare_call_arities: HashMap<String, HashSet<usize>>,
    /// Identifiers declared with an address type anywhere in the file.
    pub address_idents: HashSet<String>,
}

impl FileContext {
    pub fn contract(&self, name: &str) -> Option<&ContractInfo> {
        self.contracts.iter().find(|c| c.name == name)
    }

    /// The contract's in-file ancestors, nearest first.
    pub fn ancestors_of<'a>(&'a self, c: &'a ContractInfo) -> impl Iterator<Item = &'a ContractInfo> {
        c.ancestors.iter().filter_map(|n| self.contract(n))
    }

    pub fn is_bare_called(&self, name: &str) -> bool {
        self.bare_call_arities.contains_key(name)
    }
}

/// Collapses whitespace runs so type texts compare structurally
/// ("mapping(address => uint)" vs the same with a line break).
pub fn normalize_ty(ty: &str) -> String {
    ty.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn build_context(root: &AstNode) -> FileContext {
    let mut ctx = FileContext::default();

    for child in &root.children {
        match &child.kind {
            NodeKind::Contract { name, kind, bases } => {
                let mut info = ContractInfo {
                    name: name.clone(),
                    kind: *kind,
                    base_names: bases.iter().map(|b| b.name.clone()).collect(),
                    ancestors: Vec::new(),
                    functions: Vec::new(),
                    modifiers: Vec::new(),
                };
                for part in &child.children {
                    match &part.kind {
                        NodeKind::Function(f) => {
                            if f.fn_kind == FnKind::Modifier {
                                info.modifiers.push(ModSig {
                                    name: f.name.clone().unwrap_or_default(),
                                    param_count: f.params.len(),
                                    is_virtual: f.is_virtual,
                                    has_override: f.override_span.is_some(),
                                });
                            } else {
                                info.functions.push(fn_sig(f));
                            }
                        }
                        NodeKind::EnumDef { name, members } => ctx.enums.push(EnumInfo {
                            name: name.clone(),
                            members: members.iter().map(|(n, _)| n.clone()).collect(),
                        }),
                        _ => {}
                    }
                }
                ctx.contracts.push(info);
            }
            NodeKind::EnumDef { name, members } => ctx.enums.push(EnumInfo {
                name: name.clone(),
                members: members.iter().map(|(n, _)| n.clone()).collect(),
            }),
            _ => {}
        }
    }

    resolve_ancestors(&mut ctx.contracts);
    collect_usages(root, &mut ctx);
    ctx
}

fn fn_sig(f: &FunctionInfo) -> FnSig {
    FnSig {
        name: f.name.clone().unwrap_or_default(),
        fn_kind: f.fn_kind,
        arity: f.params.len(),
        param_types: f.params.iter().map(|p| normalize_ty(&p.ty_text)).collect(),
        params: f.params.clone(),
        has_body: f.has_body,
        is_virtual: f.is_virtual,
        has_override: f.override_span.is_some(),
        visibility: f.visibility.map(|(v, _)| v),
    }
}

fn resolve_ancestors(contracts: &mut [ContractInfo]) {
    let names: Vec<String> = contracts.iter().map(|c| c.name.clone()).collect();
    let direct: HashMap<String, Vec<String>> = contracts
        .iter()
        .map(|c| (c.name.clone(), c.base_names.clone()))
        .collect();
    for contract in contracts.iter_mut() {
        let mut seen = HashSet::new();
        let mut queue: Vec<String> = contract.base_names.clone();
        let mut out = Vec::new();
        while let Some(base) = queue.pop() {
            if !names.contains(&base) || !seen.insert(base.clone()) {
                continue;
            }
            out.push(base.clone());
            if let Some(next) = direct.get(&base) {
                queue.extend(next.iter().cloned());
            }
        }
        contract.ancestors = out;
    }
}

fn collect_usages(node: &AstNode, ctx: &mut FileContext) {
    match &node.kind {
        NodeKind::Call { args_from, .. } => {
            if let Some(NodeKind::Variable { name }) = node.children.first().map(|c| &c.kind) {
                let arity = node.children.len() - args_from;
                ctx.bare_call_arities
                    .entry(name.clone())
                    .or_default()
                    .insert(arity);
            }
        }
        NodeKind::StateVar(v) => {
            if is_address_ty(&v.ty_text) {
                ctx.address_idents.insert(v.name.clone());
            }
        }
        NodeKind::VarDeclStatement(v) => {
            if is_address_ty(&v.ty_text) {
                if let Some(name) = &v.name {
                    ctx.address_idents.insert(name.clone());
                }
            }
        }
        NodeKind::Function(f) => {
            for p in f.params.iter().chain(&f.returns) {
                if is_address_ty(&p.ty_text) {
                    if let Some(name) = &p.name {
                        ctx.address_idents.insert(name.clone());
                    }
                }
            }
        }
        _ => {}
    }
    for child in &node.children {
        collect_usages(child, ctx);
    }
}

fn is_address_ty(ty: &str) -> bool {
    matches!(normalize_ty(ty).as_str(), "address" | "address payable")
}

/// One traversal position with its lexical surroundings.
pub struct Site<'t> {
    pub node: &'t AstNode,
    pub parent: Option<&'t AstNode>,
    /// Index of `node` within `parent.children`.
    pub child_index: usize,
    pub contract: Option<&'t ContractInfo>,
    pub function: Option<&'t FunctionInfo>,
}

/// Depth-first walk delivering every node together with its enclosing
/// contract and function.
pub fn walk<'t>(root: &'t AstNode, ctx: &'t FileContext, f: &mut dyn FnMut(&Site<'t>)) {
    fn go<'t>(
        node: &'t AstNode,
        parent: Option<&'t AstNode>,
        child_index: usize,
        contract: Option<&'t ContractInfo>,
        function: Option<&'t FunctionInfo>,
        ctx: &'t FileContext,
        f: &mut dyn FnMut(&Site<'t>),
    ) {
        let contract = match &node.kind {
            NodeKind::Contract { name, .. } => ctx.contract(name).or(contract),
            _ => contract,
        };
        let function = match &node.kind {
            NodeKind::Function(info) => Some(&**info),
            _ => function,
        };
        f(&Site {
            node,
            parent,
            child_index,
            contract,
            function,
        });
        for (i, child) in node.children.iter().enumerate() {
            go(child, Some(node), i, contract, function, ctx, f);
        }
    }
    go(root, None, 0, None, None, ctx, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_source;

    fn ctx_of(src: &str) -> (AstNode, FileContext) {
        let root = parse_source("t.sol", src).unwrap();
        let ctx = build_context(&root);
        (root, ctx)
    }

    #[test]
    fn collects_contract_functions_and_modifiers() {
        let src = "contract A { modifier m() { _; } function f(uint x) public {} }";
        let (_, ctx) = ctx_of(src);
        let a = ctx.contract("A").unwrap();
        assert_eq!(a.modifiers.len(), 1);
        assert_eq!(a.modifiers[0].name, "m");
        assert_eq!(a.functions.len(), 1);
        assert_eq!(a.functions[0].arity, 1);
        assert_eq!(a.functions[0].param_types, vec!["uint".to_string()]);
    }

    #[test]
    fn ancestors_are_transitive_within_the_file() {
        let src = "contract A {} contract B is A {} contract C is B {}";
        let (_, ctx) = ctx_of(src);
        let c = ctx.contract("C").unwrap();
        assert!(c.ancestors.contains(&"A".to_string()));
        assert!(c.ancestors.contains(&"B".to_string()));
        assert!(!c.ancestors.contains(&"C".to_string()));
    }

    #[test]
    fn bare_calls_and_address_idents_are_collected() {
        let src = "contract A { address owner; function f(address to) public { g(1, 2); } function g(uint a, uint b) internal {} }";
        let (_, ctx) = ctx_of(src);
        assert!(ctx.is_bare_called("g"));
        assert!(ctx.bare_call_arities["g"].contains(&2));
        assert!(!ctx.is_bare_called("f"));
        assert!(ctx.address_idents.contains("owner"));
        assert!(ctx.address_idents.contains("to"));
    }

    #[test]
    fn walk_tracks_enclosing_contract_and_function() {
        let src = "contract A { function f() public { x = 1; } uint x; }";
        let (root, ctx) = ctx_of(src);
        let mut seen = false;
        walk(&root, &ctx, &mut |site| {
            if matches!(site.node.kind, NodeKind::Assign { .. }) {
                assert_eq!(site.contract.unwrap().name, "A");
                assert_eq!(site.function.unwrap().name.as_deref(), Some("f"));
                seen = true;
            }
        });
        assert!(seen);
    }
}
