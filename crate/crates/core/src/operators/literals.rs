//! Literal-value operators: booleans, strings, integers, hex numbers, and
//! unit suffixes.

use num_bigint::BigUint;

use super::context::walk;
use super::tables::{lookup, SLR_NONEMPTY, VUR_TABLE};
use super::{path_of, OpCtx};
use crate::ast::{Mutation, NodeKind};

/// BLR: true ↔ false.
pub(super) fn boolean(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::BoolLit { value } = &site.node.kind {
            let replacement = if *value { "false" } else { "true" };
            out.push(ctx.mutation(site.node.span, replacement, &path_of(site)));
        }
    });
    out
}

/// SLR: nonempty string → ""; empty string → a nonempty marker.
pub(super) fn string(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::StringLit { value, .. } = &site.node.kind {
            let replacement = if value.is_empty() { SLR_NONEMPTY } else { "\"\"" };
            out.push(ctx.mutation(site.node.span, replacement, &path_of(site)));
        }
    });
    out
}

/// ILR: integer literal v → v+1 and v−1; 0 gets only +1. The unit suffix, if
/// any, stays untouched.
pub(super) fn integer(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::NumberLit { number_span, .. } = &site.node.kind {
            let Some(value) = parse_decimal(number_span.slice(ctx.src())) else {
                return;
            };
            let path = path_of(site);
            let one = BigUint::from(1u8);
            out.push(ctx.mutation(*number_span, (&value + &one).to_string(), &path));
            if value > BigUint::from(0u8) {
                out.push(ctx.mutation(*number_span, (&value - &one).to_string(), &path));
            }
        }
    });
    out
}

/// Parses a decimal integer literal, tolerating underscores and a
/// non-negative exponent (`1_000`, `2e8`). Fractional forms never reach here;
/// they parse as rational literals.
fn parse_decimal(text: &str) -> Option<BigUint> {
    let cleaned: String = text.chars().filter(|c| *c != '_').collect();
    let (mantissa, exp) = match cleaned.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().ok()?),
        None => (cleaned.as_str(), 0),
    };
    let base: BigUint = mantissa.parse().ok()?;
    Some(base * BigUint::from(10u8).pow(exp))
}

/// HLR: hex literal → 0x0; zero hex literal → 0x1.
pub(super) fn hexadecimal(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::HexNumberLit { number_span } = &site.node.kind {
            let digits = number_span
                .slice(ctx.src())
                .trim_start_matches("0x")
                .trim_start_matches("0X");
            let is_zero = digits.chars().all(|c| c == '0' || c == '_');
            let replacement = if is_zero { "0x1" } else { "0x0" };
            out.push(ctx.mutation(*number_span, replacement, &path_of(site)));
        }
    });
    out
}

/// VUR: swap a literal's ether/time unit suffix with the adjacent
/// denomination.
pub(super) fn unit_replacement(ctx: &OpCtx) -> Vec<Mutation> {
    let mut out = Vec::new();
    walk(&ctx.file.ast, ctx.info, &mut |site| {
        if let NodeKind::NumberLit {
            unit: Some((unit, unit_span)),
            ..
        } = &site.node.kind
        {
            if let Some(replacement) = lookup(VUR_TABLE, unit) {
                out.push(ctx.mutation(*unit_span, replacement, &path_of(site)));
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{mutations, replacements};
    use super::parse_decimal;
    use num_bigint::BigUint;

    #[test]
    fn blr_flips_both_directions() {
        let src = "contract C { bool a = true; bool b = false; }";
        assert_eq!(
            mutations(src, "BLR"),
            vec![
                ("true".into(), "false".into()),
                ("false".into(), "true".into()),
            ]
        );
    }

    #[test]
    fn slr_empties_nonempty_and_fills_empty() {
        let src = r#"contract C { string a = "hi"; string b = ""; }"#;
        assert_eq!(
            mutations(src, "SLR"),
            vec![
                (r#""hi""#.into(), r#""""#.into()),
                (r#""""#.into(), r#""sumo""#.into()),
            ]
        );
    }

    #[test]
    fn ilr_steps_both_ways_but_zero_only_up() {
        let src = "contract C { uint a = 5; uint b = 0; }";
        assert_eq!(
            mutations(src, "ILR"),
            vec![
                ("5".into(), "4".into()),
                ("5".into(), "6".into()),
                ("0".into(), "1".into()),
            ]
        );
    }

    #[test]
    fn ilr_expands_exponent_and_underscore_forms() {
        let src = "contract C { uint a = 1e3; uint b = 2_000; }";
        assert_eq!(
            replacements(src, "ILR"),
            vec!["1001", "999", "1999", "2001"]
        );
    }

    #[test]
    fn ilr_leaves_unit_suffix_alone() {
        let src = "contract C { uint a = 2 ether; }";
        assert_eq!(
            mutations(src, "ILR"),
            vec![("2".into(), "1".into()), ("2".into(), "3".into())]
        );
    }

    #[test]
    fn parse_decimal_handles_separators_and_exponents() {
        assert_eq!(parse_decimal("1_000"), Some(BigUint::from(1000u32)));
        assert_eq!(parse_decimal("25e2"), Some(BigUint::from(2500u32)));
        assert_eq!(parse_decimal("0"), Some(BigUint::from(0u32)));
        assert_eq!(parse_decimal("abc"), None);
    }

    #[test]
    fn hlr_zeroes_and_unzeroes() {
        let src = "contract C { uint a = 0xFF; uint b = 0x00; }";
        assert_eq!(
            mutations(src, "HLR"),
            vec![
                ("0xFF".into(), "0x0".into()),
                ("0x00".into(), "0x1".into()),
            ]
        );
    }

    #[test]
    fn vur_swaps_ether_and_time_units() {
        let src = "contract C { uint a = 1 ether; uint b = 3 days; uint c = 2 weeks; }";
        assert_eq!(replacements(src, "VUR"), vec!["gwei", "weeks", "days"]);
    }

    #[test]
    fn vur_replaces_only_the_unit_token() {
        let src = "contract C { uint a = 4 hours; }";
        assert_eq!(mutations(src, "VUR"), vec![("hours".into(), "days".into())]);
    }
}
