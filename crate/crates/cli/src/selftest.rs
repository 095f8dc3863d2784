//! `primecover selftest`: exhaustive small-group invariant suites and oracle
//! cross-checks, with a fault-injection hook for exercising the failure
//! path.

use crate::{CliError, CODE_MISMATCH};
use primecover_core::*;
use std::collections::BTreeSet;

fn subset_from_mask(g: &Group, mask: u64) -> sumset::GroupSubset {
    sumset::GroupSubset::from_indices(g, (0..g.order()).filter(|&i| mask >> i & 1 == 1)).unwrap()
}

fn shapes_up_to(order_max: u64) -> Vec<Vec<u64>> {
    (2..=order_max).flat_map(abelian_groups_of_order).collect()
}

pub struct SelftestOutcome {
    pub output: String,
    pub exit: i32,
}

pub fn run(inject_fault: Option<&str>) -> std::result::Result<SelftestOutcome, CliError> {
    if let Some(fault) = inject_fault {
        if fault != "kneser" {
            return Err(CliError::config(format!("unknown fault `{fault}`")));
        }
    }
    let mut out = String::new();

    // sumset bound: every subset of every abelian group of order <= 16
    let mut kneser_checks = 0u64;
    for shape in shapes_up_to(16) {
        let g = make_group(&shape).map_err(CliError::from)?;
        for mask in 1u64..(1 << g.order()) {
            let a = subset_from_mask(&g, mask);
            let s = sumset(&a, &a).map_err(CliError::from)?;
            let s = if inject_fault == Some("kneser") && s.card() > 1 {
                // drop one element of A+A to exercise the failure path
                let elems = s.elements();
                sumset::GroupSubset::from_indices(&g, elems.into_iter().skip(1))
                    .map_err(CliError::from)?
            } else {
                s
            };
            let h = stabilizer(&s);
            let lambda = a.iter().map(|e| h.coset_of(e)).collect::<BTreeSet<_>>().len() as u64;
            if s.card() < (2 * lambda - 1) * h.size() {
                out.push_str(&format!(
                    "selftest failure: kneser_audit shape={shape:?} subset={:?} |A+A|={} < (2*{lambda}-1)*{}\n",
                    a.elements(),
                    s.card(),
                    h.size()
                ));
                return Ok(SelftestOutcome { output: out, exit: CODE_MISMATCH });
            }
            kneser_checks += 1;
        }
    }
    out.push_str(&format!("kneser_audit: {kneser_checks} subsets, orders <= 16: ok\n"));

    // overcount: |A| + |B| > |G| forces A + B = G, exhaustive to order 10
    let mut pairs = 0u64;
    for shape in shapes_up_to(10) {
        let g = make_group(&shape).map_err(CliError::from)?;
        let order = g.order();
        for ma in 1u64..(1 << order) {
            let a = subset_from_mask(&g, ma);
            for mb in ma..(1 << order) {
                if ma.count_ones() as u64 + mb.count_ones() as u64 <= order {
                    continue;
                }
                let b = subset_from_mask(&g, mb);
                if !sumset(&a, &b).map_err(CliError::from)?.is_full() {
                    out.push_str(&format!(
                        "selftest failure: overcount shape={shape:?} A={:?} B={:?}\n",
                        a.elements(),
                        b.elements()
                    ));
                    return Ok(SelftestOutcome { output: out, exit: CODE_MISMATCH });
                }
                pairs += 1;
            }
        }
    }
    out.push_str(&format!("overcount: {pairs} pairs, orders <= 10: ok\n"));

    // dichotomy: orders <= 12, every subset meeting the hypotheses classifies
    let mut qualifying = 0u64;
    for shape in shapes_up_to(12) {
        let g = make_group(&shape).map_err(CliError::from)?;
        for mask in 1u64..(1 << g.order()) {
            let a = subset_from_mask(&g, mask);
            let double = iterated_sumset(&a, 2).map_err(CliError::from)?;
            if !a.union(&double).map_err(CliError::from)?.is_full()
                || !stabilizer(&double).is_trivial()
            {
                continue;
            }
            if let Err(e) = classify_exceptional(&a) {
                out.push_str(&format!(
                    "selftest failure: dichotomy shape={shape:?} A={:?}: {e}\n",
                    a.elements()
                ));
                return Ok(SelftestOutcome { output: out, exit: CODE_MISMATCH });
            }
            qualifying += 1;
        }
    }
    out.push_str(&format!("dichotomy: {qualifying} qualifying subsets, orders <= 12: ok\n"));

    // cover theorems: orders <= 12, all four variants
    let variants = [
        CoverVariant::First,
        CoverVariant::Second,
        CoverVariant::Third,
        CoverVariant::Fourth,
    ];
    let mut verdicts = 0u64;
    for shape in shapes_up_to(12) {
        let g = make_group(&shape).map_err(CliError::from)?;
        let order = g.order();
        for mask in 1u64..(1 << order) {
            let a = subset_from_mask(&g, mask);
            for variant in variants {
                let t = variant.threshold();
                if (mask.count_ones() as i64) * t.den <= t.num * order as i64 {
                    continue;
                }
                if variant == CoverVariant::Fourth && !g.two_part_is_elementary() {
                    continue;
                }
                if let Err(e) = apply_cover_theorem(&a, variant) {
                    out.push_str(&format!(
                        "selftest failure: cover {variant:?} shape={shape:?} A={:?}: {e}\n",
                        a.elements()
                    ));
                    return Ok(SelftestOutcome { output: out, exit: CODE_MISMATCH });
                }
                verdicts += 1;
            }
        }
    }
    out.push_str(&format!("cover theorems: {verdicts} verdicts, orders <= 12: ok\n"));

    // additive coverage vs a direct modular-product brute force
    let pt = sieve_primes(1000).map_err(CliError::from)?;
    let mut oracle_checks = 0u64;
    for q in 3u64..=60 {
        let units = unit_group(q).map_err(CliError::from)?;
        let residues: BTreeSet<u64> = pt
            .primes_below(200)
            .map_err(CliError::from)?
            .iter()
            .filter(|&&p| q % p != 0)
            .map(|&p| p % q)
            .collect();
        for k in [3u32, 4] {
            let mut reach = residues.clone();
            for _ in 1..k {
                let mut next = BTreeSet::new();
                for &a in &reach {
                    for &b in &residues {
                        next.insert(a * b % q);
                    }
                }
                reach = next;
            }
            let report = verify_product_cover(&pt, &units, 200, k).map_err(CliError::from)?;
            let covered: BTreeSet<u64> = units
                .residues()
                .iter()
                .copied()
                .filter(|r| !report.uncovered.contains(r))
                .collect();
            if covered != reach {
                out.push_str(&format!("selftest failure: product cover oracle q={q} k={k}\n"));
                return Ok(SelftestOutcome { output: out, exit: CODE_MISMATCH });
            }
            oracle_checks += 1;
        }
    }
    out.push_str(&format!("product-cover oracle: {oracle_checks} (q, k) cases: ok\n"));

    // factor counts from the sieve vs naive trial division
    let pt = sieve_primes(20_000).map_err(CliError::from)?;
    for n in 2u64..=20_000 {
        let mut m = n;
        let mut count = 0u32;
        let mut d = 2;
        while d * d <= m {
            while m % d == 0 {
                count += 1;
                m /= d;
            }
            d += 1;
        }
        if m > 1 {
            count += 1;
        }
        if pt.omega(n) != count {
            out.push_str(&format!("selftest failure: omega oracle n={n}\n"));
            return Ok(SelftestOutcome { output: out, exit: CODE_MISMATCH });
        }
    }
    out.push_str("omega oracle: n <= 20000: ok\n");
    out.push_str("selftest: all suites passed\n");
    Ok(SelftestOutcome { output: out, exit: 0 })
}
