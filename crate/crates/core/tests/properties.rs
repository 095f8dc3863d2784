//! Randomized cross-checks of the set-arithmetic machinery against naive
//! oracles.

use primecover_core::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn shape_strategy() -> impl Strategy<Value = Vec<u64>> {
    // random cyclic factor lists with order <= 64
    prop::collection::vec(2u64..=16, 1..=3).prop_filter("order cap", |v| {
        v.iter().product::<u64>() <= 64
    })
}

fn group_and_masks() -> impl Strategy<Value = (Vec<u64>, u64, u64, u64)> {
    shape_strategy().prop_flat_map(|shape| {
        let order = shape.iter().product::<u64>();
        let mask = if order == 64 { u64::MAX } else { (1u64 << order) - 1 };
        (Just(shape), 1..=mask, 1..=mask, 1..=mask)
    })
}

fn subset_from_mask(g: &Group, mask: u64) -> GroupSubset {
    GroupSubset::from_indices(g, (0..g.order()).filter(|&i| mask >> i & 1 == 1)).unwrap()
}

fn naive_sumset(a: &GroupSubset, b: &GroupSubset) -> BTreeSet<u64> {
    let g = a.group();
    let mut out = BTreeSet::new();
    for x in a.iter() {
        for y in b.iter() {
            out.insert(g.add(x, y));
        }
    }
    out
}

proptest! {
    #[test]
    fn sumset_matches_naive_and_commutes((shape, ma, mb, _mc) in group_and_masks()) {
        let g = make_group(&shape).unwrap();
        let a = subset_from_mask(&g, ma);
        let b = subset_from_mask(&g, mb);
        let ab = sumset(&a, &b).unwrap();
        let ba = sumset(&b, &a).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.elements().into_iter().collect::<BTreeSet<_>>(), naive_sumset(&a, &b));
    }

    #[test]
    fn sumset_associates((shape, ma, mb, mc) in group_and_masks()) {
        let g = make_group(&shape).unwrap();
        let a = subset_from_mask(&g, ma);
        let b = subset_from_mask(&g, mb);
        let c = subset_from_mask(&g, mc);
        let left = sumset(&sumset(&a, &b).unwrap(), &c).unwrap();
        let right = sumset(&a, &sumset(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kneser_bound_on_random_subsets((shape, ma, _mb, _mc) in group_and_masks()) {
        let g = make_group(&shape).unwrap();
        let a = subset_from_mask(&g, ma);
        // kneser_audit errors out on any bound violation
        let audit = kneser_audit(&a).unwrap();
        prop_assert!(audit.holds);
    }

    #[test]
    fn stabilizer_matches_brute_force((shape, ma, _mb, _mc) in group_and_masks()) {
        let g = make_group(&shape).unwrap();
        let c = subset_from_mask(&g, ma);
        let h = stabilizer(&c);
        for x in 0..g.order() {
            let translated: BTreeSet<u64> = c.iter().map(|e| g.add(e, x)).collect();
            let fixed = translated == c.elements().into_iter().collect::<BTreeSet<_>>();
            prop_assert_eq!(h.contains(x), fixed, "element {}", x);
        }
    }
}

/// The additive-coordinate cover check must agree with a direct
/// modular-product enumeration.
#[test]
fn product_cover_matches_modular_oracle() {
    let pt = sieve_primes(500).unwrap();
    for q in 3u64..=200 {
        let units = unit_group(q).unwrap();
        let residues: BTreeSet<u64> = pt
            .primes()
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
            let report = verify_product_cover(&pt, &units, 500, k).unwrap();
            let covered_set: BTreeSet<u64> = units
                .residues()
                .iter()
                .copied()
                .filter(|r| !report.uncovered.contains(r))
                .collect();
            assert_eq!(covered_set, reach, "q = {q}, k = {k}");
            assert_eq!(report.covered, reach.len() as u64 == units.phi(), "q = {q}, k = {k}");
        }
    }
}

/// Subgroup enumeration agrees with a closure-based brute force on shapes
/// where the latter is affordable.
#[test]
fn subgroup_enumeration_vs_closure_oracle() {
    for shape in [vec![12u64], vec![2, 6], vec![2, 2, 3], vec![16], vec![4, 4]] {
        let g = make_group(&shape).unwrap();
        let order = g.order();
        let mut brute: BTreeSet<Vec<u64>> = BTreeSet::new();
        for mask in 1u64..(1 << order) {
            if mask & 1 == 0 {
                continue;
            }
            let elems: Vec<u64> = (0..order).filter(|&i| mask >> i & 1 == 1).collect();
            let closed = elems.iter().all(|&a| {
                elems.iter().all(|&b| elems.binary_search(&g.add(a, b)).is_ok())
            });
            if closed {
                brute.insert(elems);
            }
        }
        let mut enumerated: BTreeSet<Vec<u64>> = BTreeSet::new();
        for index in 1..=order {
            for h in enumerate_subgroups_of_index(&g, index).unwrap() {
                enumerated.insert(h.members().iter_ones().map(|i| i as u64).collect());
            }
        }
        assert_eq!(enumerated, brute, "shape {shape:?}");
    }
}
