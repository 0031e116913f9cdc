//! Operator catalog and every fixed replacement table in one place, so the
//! token-level choices can be revised without touching traversal code.

use crate::ast::{AssignOp, BinOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorInfo {
    /// Mnemonic used in mutant ids and config flags.
    pub id: &'static str,
    pub name: &'static str,
    pub solidity_specific: bool,
}

/// The full operator catalog: 25 Solidity-specific, then 19 general.
pub const CATALOG: &[OperatorInfo] = &[
    OperatorInfo { id: "AVR", name: "Address Value Replacement", solidity_specific: true },
    OperatorInfo { id: "CCD", name: "Contract Constructor Deletion", solidity_specific: true },
    OperatorInfo { id: "DLR", name: "Data Location keyword Replacement", solidity_specific: true },
    OperatorInfo { id: "DOD", name: "Delete Operator Deletion", solidity_specific: true },
    OperatorInfo { id: "EED", name: "Event Emission Deletion", solidity_specific: true },
    OperatorInfo { id: "EHC", name: "Exception Handling statement Change", solidity_specific: true },
    OperatorInfo { id: "ETR", name: "Ether Transfer function Replacement", solidity_specific: true },
    OperatorInfo { id: "FVR", name: "Function Visibility Replacement", solidity_specific: true },
    OperatorInfo { id: "GVR", name: "Global Variable Replacement", solidity_specific: true },
    OperatorInfo { id: "MCR", name: "Mathematical and Cryptographic function Replacement", solidity_specific: true },
    OperatorInfo { id: "MOC", name: "Modifiers Order Change", solidity_specific: true },
    OperatorInfo { id: "MOD", name: "Modifier Deletion", solidity_specific: true },
    OperatorInfo { id: "MOI", name: "Modifier Insertion", solidity_specific: true },
    OperatorInfo { id: "MOR", name: "Modifier Replacement", solidity_specific: true },
    OperatorInfo { id: "OMD", name: "Overridden Modifier Deletion", solidity_specific: true },
    OperatorInfo { id: "PKD", name: "Payable Keyword Deletion", solidity_specific: true },
    OperatorInfo { id: "RSD", name: "Return Statement Deletion", solidity_specific: true },
    OperatorInfo { id: "RVS", name: "Return Values Swap", solidity_specific: true },
    OperatorInfo { id: "SCEC", name: "Switch Call Expression Casting", solidity_specific: true },
    OperatorInfo { id: "SFD", name: "Selfdestruct Function Deletion", solidity_specific: true },
    OperatorInfo { id: "SFI", name: "Selfdestruct Function Insertion", solidity_specific: true },
    OperatorInfo { id: "SFR", name: "SafeMath Function Replacement", solidity_specific: true },
    OperatorInfo { id: "TOR", name: "Transaction Origin Replacement", solidity_specific: true },
    OperatorInfo { id: "VUR", name: "Variable Unit Replacement", solidity_specific: true },
    OperatorInfo { id: "VVR", name: "Variable Visibility Replacement", solidity_specific: true },
    OperatorInfo { id: "ACM", name: "Argument Change of overloaded Method call", solidity_specific: false },
    OperatorInfo { id: "AOR", name: "Assignment Operator Replacement", solidity_specific: false },
    OperatorInfo { id: "BCRD", name: "Break and Continue Replacement and Deletion", solidity_specific: false },
    OperatorInfo { id: "BLR", name: "Boolean Literal Replacement", solidity_specific: false },
    OperatorInfo { id: "BOR", name: "Binary Operator Replacement", solidity_specific: false },
    OperatorInfo { id: "CBD", name: "Catch Block Deletion", solidity_specific: false },
    OperatorInfo { id: "CSC", name: "Conditional Statement Change", solidity_specific: false },
    OperatorInfo { id: "ECS", name: "Explicit Conversion to Smaller type", solidity_specific: false },
    OperatorInfo { id: "ER", name: "Enum Replacement", solidity_specific: false },
    OperatorInfo { id: "HLR", name: "Hexadecimal Literal Replacement", solidity_specific: false },
    OperatorInfo { id: "ICM", name: "Increments Mirror", solidity_specific: false },
    OperatorInfo { id: "ILR", name: "Integer Literal Replacement", solidity_specific: false },
    OperatorInfo { id: "LSC", name: "Loop Statement Change", solidity_specific: false },
    OperatorInfo { id: "OLFD", name: "Overloaded Function Deletion", solidity_specific: false },
    OperatorInfo { id: "ORFD", name: "Overridden Function Deletion", solidity_specific: false },
    OperatorInfo { id: "SKD", name: "Super Keyword Deletion", solidity_specific: false },
    OperatorInfo { id: "SKI", name: "Super Keyword Insertion", solidity_specific: false },
    OperatorInfo { id: "SLR", name: "String Literal Replacement", solidity_specific: false },
    OperatorInfo { id: "UORD", name: "Unary Operator Replacement and Deletion", solidity_specific: false },
];

pub fn operator_info(id: &str) -> Option<&'static OperatorInfo> {
    CATALOG.iter().find(|o| o.id == id)
}

/// Compound-assignment swaps, one designated replacement each.
pub fn aor_replacement(op: AssignOp) -> Option<&'static str> {
    Some(match op {
        AssignOp::Add => "-=",
        AssignOp::Sub => "+=",
        AssignOp::Mul => "/=",
        AssignOp::Div => "*=",
        AssignOp::Mod => "*=",
        AssignOp::Shl => ">>=",
        AssignOp::Shr => "<<=",
        AssignOp::BitAnd => "|=",
        AssignOp::BitOr => "&=",
        AssignOp::BitXor => "&=",
        AssignOp::Assign => return None,
    })
}

/// Binary-operator swaps within each class, one designated replacement each.
pub fn bor_replacement(op: BinOp) -> Option<&'static str> {
    Some(match op {
        BinOp::Add => "-",
        BinOp::Sub => "+",
        BinOp::Mul => "/",
        BinOp::Div => "*",
        BinOp::Mod => "*",
        BinOp::Pow => "*",
        BinOp::Lt => "<=",
        BinOp::Le => "<",
        BinOp::Gt => ">=",
        BinOp::Ge => ">",
        BinOp::Eq => "!=",
        BinOp::Ne => "==",
        BinOp::And => "||",
        BinOp::Or => "&&",
        BinOp::BitAnd => "|",
        BinOp::BitOr => "&",
        BinOp::BitXor => "&",
        BinOp::Shl => ">>",
        BinOp::Shr => "<<",
    })
}

/// Global variable/function swaps within compatible-type classes, keyed by
/// the exact source shape of the expression.
pub const GVR_TABLE: &[(&str, &str)] = &[
    ("block.timestamp", "block.number"),
    ("block.number", "block.timestamp"),
    ("block.gaslimit", "gasleft()"),
    ("gasleft()", "block.gaslimit"),
    ("msg.value", "tx.gasprice"),
    ("tx.gasprice", "msg.value"),
    ("msg.sender", "block.coinbase"),
    ("block.coinbase", "msg.sender"),
];

pub const TOR_TABLE: &[(&str, &str)] = &[
    ("msg.sender", "tx.origin"),
    ("tx.origin", "msg.sender"),
];

/// Math and crypto builtins with interchangeable signatures. ripemd160 is
/// absent: it returns bytes20, so swapping it in never compiles.
pub const MCR_TABLE: &[(&str, &str)] = &[
    ("addmod", "mulmod"),
    ("mulmod", "addmod"),
    ("keccak256", "sha256"),
    ("sha256", "keccak256"),
];

/// SafeMath member-call swaps (add/sub and mul/div are involutions).
pub const SFR_TABLE: &[(&str, &str)] = &[
    ("add", "sub"),
    ("sub", "add"),
    ("mul", "div"),
    ("div", "mul"),
    ("mod", "mul"),
];

/// Unit-suffix swaps to the adjacent denomination, one replacement each.
pub const VUR_TABLE: &[(&str, &str)] = &[
    ("wei", "gwei"),
    ("gwei", "ether"),
    ("ether", "gwei"),
    ("seconds", "minutes"),
    ("minutes", "hours"),
    ("hours", "days"),
    ("days", "weeks"),
    ("weeks", "days"),
];

pub fn lookup(table: &[(&str, &'static str)], key: &str) -> Option<&'static str> {
    table.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

/// Statement SFI splices in after a function body's opening brace.
pub const SFI_STATEMENT: &str = "selfdestruct(payable(msg.sender));";

/// Fallback string for SLR on an already-empty literal.
pub const SLR_NONEMPTY: &str = "\"sumo\"";
