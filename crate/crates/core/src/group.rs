//! Finite abelian groups as products of cyclic factors, with full element
//! indexing, subgroup enumeration, quotients, and the multiplicative group
//! (Z/qZ)* mapped to additive coordinates via discrete-log tables.

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Largest group order we allow a full element table for.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 22;
/// Largest subgroup index we enumerate.
pub const DEFAULT_MAX_INDEX: u64 = 64;

/// A finite abelian group written additively, elements indexed 0..order-1
/// via mixed-radix encoding over the cyclic factors. Index 0 is the identity.
#[derive(Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    cyclic_orders: Vec<u64>,
    strides: Vec<u64>,
    order: u64,
}

pub type Group = Arc<FiniteAbelianGroup>;

pub fn make_group(cyclic_orders: &[u64]) -> Result<Group> {
    make_group_with_limit(cyclic_orders, DEFAULT_MAX_ORDER)
}

pub fn make_group_with_limit(cyclic_orders: &[u64], max_order: u64) -> Result<Group> {
    if cyclic_orders.iter().any(|&n| n == 0) {
        return Err(Error::Domain("cyclic factor of order 0".into()));
    }
    // Normalized ascending so reports are deterministic.
    let mut orders: Vec<u64> = cyclic_orders.to_vec();
    orders.sort_unstable();
    let mut order: u64 = 1;
    for &n in &orders {
        order = order
            .checked_mul(n)
            .filter(|&o| o <= max_order)
            .ok_or_else(|| Error::SizeLimit(format!("group order exceeds {max_order}")))?;
    }
    let mut strides = Vec::with_capacity(orders.len());
    let mut s = 1u64;
    for &n in &orders {
        strides.push(s);
        s *= n;
    }
    Ok(Arc::new(FiniteAbelianGroup {
        cyclic_orders: orders,
        strides,
        order,
    }))
}

impl FiniteAbelianGroup {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub(crate) fn strides(&self) -> &[u64] {
        &self.strides
    }

    pub fn encode(&self, coords: &[u64]) -> u64 {
        debug_assert_eq!(coords.len(), self.cyclic_orders.len());
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c * s)
            .sum()
    }

    pub fn decode(&self, idx: u64) -> Vec<u64> {
        debug_assert!(idx < self.order);
        let mut rest = idx;
        self.cyclic_orders
            .iter()
            .map(|&n| {
                let c = rest % n;
                rest /= n;
                c
            })
            .collect()
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let mut ra = a;
        let mut rb = b;
        let mut out = 0u64;
        for (&n, &s) in self.cyclic_orders.iter().zip(&self.strides) {
            let ca = ra % n;
            let cb = rb % n;
            let mut c = ca + cb;
            if c >= n {
                c -= n;
            }
            out += c * s;
            ra /= n;
            rb /= n;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let mut ra = a;
        let mut out = 0u64;
        for (&n, &s) in self.cyclic_orders.iter().zip(&self.strides) {
            let c = ra % n;
            if c != 0 {
                out += (n - c) * s;
            }
            ra /= n;
        }
        out
    }

    pub fn element_order(&self, a: u64) -> u64 {
        let mut ra = a;
        let mut ord = 1u64;
        for &n in &self.cyclic_orders {
            let c = ra % n;
            let co = if c == 0 { 1 } else { n / gcd(n, c) };
            ord = lcm(ord, co);
            ra /= n;
        }
        ord
    }

    /// True when every even cyclic factor has 2-adic valuation exactly 1,
    /// i.e. the 2-part of the group is elementary abelian.
    pub fn two_part_is_elementary(&self) -> bool {
        self.cyclic_orders
            .iter()
            .all(|&n| n % 2 == 1 || n % 4 == 2)
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// A subgroup of a `FiniteAbelianGroup`: membership bitset, index Y and the
/// coset labeling (the subgroup itself is coset 0).
#[derive(Clone, Debug)]
pub struct Subgroup {
    group: Group,
    members: Bitset,
    index: u64,
    coset_label: Vec<u32>,
}

impl Subgroup {
    pub fn from_members(group: &Group, members: Bitset) -> Result<Subgroup> {
        if members.len() != group.order() as usize {
            return Err(Error::InvariantViolation(
                "membership bitset length != group order".into(),
            ));
        }
        if !members.get(0) {
            return Err(Error::InvariantViolation(
                "subgroup does not contain the identity".into(),
            ));
        }
        let elems: Vec<usize> = members.iter_ones().collect();
        for &a in &elems {
            for &b in &elems {
                if !members.get(group.add(a as u64, b as u64) as usize) {
                    return Err(Error::InvariantViolation(format!(
                        "set not closed under addition: {a} + {b}"
                    )));
                }
            }
        }
        let size = elems.len() as u64;
        debug_assert_eq!(group.order() % size, 0);
        let index = group.order() / size;
        let coset_label = label_cosets(group, &members, index);
        Ok(Subgroup {
            group: group.clone(),
            members,
            index,
            coset_label,
        })
    }

    /// Same as `from_members` but skips the closure re-check; for bitsets that
    /// are subgroups by construction (kernels, stabilizers).
    pub(crate) fn from_members_unchecked(group: &Group, members: Bitset) -> Subgroup {
        debug_assert!(members.get(0));
        let size = members.count() as u64;
        let index = group.order() / size;
        let coset_label = label_cosets(group, &members, index);
        Subgroup {
            group: group.clone(),
            members,
            index,
            coset_label,
        }
    }

    pub fn trivial(group: &Group) -> Subgroup {
        let mut members = Bitset::new(group.order() as usize);
        members.set(0);
        Subgroup::from_members_unchecked(group, members)
    }

    pub fn full(group: &Group) -> Subgroup {
        Subgroup::from_members_unchecked(group, Bitset::full(group.order() as usize))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn members(&self) -> &Bitset {
        &self.members
    }

    pub fn size(&self) -> u64 {
        self.group.order() / self.index
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn contains(&self, elem: u64) -> bool {
        self.members.get(elem as usize)
    }

    pub fn is_trivial(&self) -> bool {
        self.index == self.group.order()
    }

    pub fn coset_of(&self, elem: u64) -> u32 {
        self.coset_label[elem as usize]
    }

    pub fn coset_labels(&self) -> &[u32] {
        &self.coset_label
    }
}

fn label_cosets(group: &Group, members: &Bitset, index: u64) -> Vec<u32> {
    let order = group.order() as usize;
    let mut labels = vec![u32::MAX; order];
    let mut next = 0u32;
    for x in 0..order {
        if labels[x] != u32::MAX {
            continue;
        }
        for h in members.iter_ones() {
            labels[group.add(x as u64, h as u64) as usize] = next;
        }
        next += 1;
    }
    debug_assert_eq!(next as u64, index);
    labels
}

/// Integer partitions of n, each sorted descending.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Cyclic-order lists (primary decompositions) of every abelian group of
/// order n, one list per isomorphism class.
pub fn abelian_groups_of_order(n: u64) -> Vec<Vec<u64>> {
    let mut shapes: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for part in partitions(e) {
            for shape in &shapes {
                let mut s = shape.clone();
                for &exp in &part {
                    s.push(p.pow(exp));
                }
                next.push(s);
            }
        }
        shapes = next;
    }
    for s in &mut shapes {
        s.sort_unstable();
    }
    shapes.sort();
    shapes
}

/// Evaluate the homomorphism G -> B determined by generator images, walking
/// element indices in odometer order. Calls `sink(idx, value)` per element.
fn walk_hom<F: FnMut(u64, u64)>(g: &Group, b: &Group, images: &[u64], mut sink: F) {
    let k = g.cyclic_orders().len();
    let mut coords = vec![0u64; k];
    let mut val = 0u64;
    for idx in 0..g.order() {
        sink(idx, val);
        let mut i = 0;
        while i < k {
            coords[i] += 1;
            val = b.add(val, images[i]);
            if coords[i] < g.cyclic_orders()[i] {
                break;
            }
            coords[i] = 0;
            i += 1;
        }
    }
}

fn hom_images_per_generator(g: &Group, b: &Group) -> Vec<Vec<u64>> {
    g.cyclic_orders()
        .iter()
        .map(|&n| {
            (0..b.order())
                .filter(|&y| n % b.element_order(y) == 0)
                .collect()
        })
        .collect()
}

const MAX_HOM_WORK: u128 = 200_000_000;

fn for_each_hom<F: FnMut(&[u64]) -> bool>(g: &Group, b: &Group, mut f: F) -> Result<()> {
    let candidates = hom_images_per_generator(g, b);
    let hom_count: u128 = candidates.iter().map(|c| c.len() as u128).product();
    if hom_count.saturating_mul(g.order() as u128) > MAX_HOM_WORK {
        return Err(Error::LimitExceeded(format!(
            "homomorphism enumeration too large ({hom_count} maps on a group of order {})",
            g.order()
        )));
    }
    let k = candidates.len();
    let mut images = vec![0u64; k];
    fn rec<F: FnMut(&[u64]) -> bool>(
        candidates: &[Vec<u64>],
        images: &mut [u64],
        depth: usize,
        f: &mut F,
    ) -> bool {
        if depth == candidates.len() {
            return f(images);
        }
        for &y in &candidates[depth] {
            images[depth] = y;
            if rec(candidates, images, depth + 1, f) {
                return true;
            }
        }
        false
    }
    rec(&candidates, &mut images, 0, &mut f);
    Ok(())
}

/// The complete, duplicate-free list of subgroups of index exactly `index`,
/// found as kernels of surjective homomorphisms onto each abelian group of
/// that order. Y not dividing the order yields an empty list.
pub fn enumerate_subgroups_of_index(g: &Group, index: u64) -> Result<Vec<Subgroup>> {
    enumerate_subgroups_with_limit(g, index, DEFAULT_MAX_INDEX)
}

// Enumeration is pure in (cyclic_orders, index), and hypothesis checks call
// it once per subset, so results are memoized process-wide. Entries store
// members plus coset labels; the Subgroup is rebuilt around the caller's
// group handle.
type SubgroupCacheEntry = Vec<(Bitset, Vec<u32>)>;
static SUBGROUP_CACHE: std::sync::OnceLock<
    std::sync::Mutex<std::collections::HashMap<(Vec<u64>, u64), SubgroupCacheEntry>>,
> = std::sync::OnceLock::new();

pub fn enumerate_subgroups_with_limit(g: &Group, index: u64, max_index: u64) -> Result<Vec<Subgroup>> {
    if index > max_index {
        return Err(Error::LimitExceeded(format!(
            "subgroup index {index} exceeds the configured maximum {max_index}"
        )));
    }
    if index == 0 || g.order() % index != 0 {
        return Ok(Vec::new());
    }
    let cache = SUBGROUP_CACHE.get_or_init(Default::default);
    let key = (g.cyclic_orders().to_vec(), index);
    if let Some(entry) = cache.lock().unwrap().get(&key) {
        return Ok(entry
            .iter()
            .map(|(members, labels)| Subgroup {
                group: g.clone(),
                members: members.clone(),
                index,
                coset_label: labels.clone(),
            })
            .collect());
    }
    let kernel_size = (g.order() / index) as usize;
    let mut seen: BTreeMap<Vec<u64>, Bitset> = BTreeMap::new();
    for shape in abelian_groups_of_order(index) {
        let b = make_group(&shape)?;
        for_each_hom(g, &b, |images| {
            let mut kernel = Bitset::new(g.order() as usize);
            walk_hom(g, &b, images, |idx, val| {
                if val == 0 {
                    kernel.set(idx as usize);
                }
            });
            if kernel.count() == kernel_size {
                seen.entry(kernel.blocks().to_vec()).or_insert(kernel);
            }
            false
        })?;
    }
    let subgroups: Vec<Subgroup> = seen
        .into_values()
        .map(|members| Subgroup::from_members_unchecked(g, members))
        .collect();
    cache.lock().unwrap().insert(
        key,
        subgroups
            .iter()
            .map(|s| (s.members.clone(), s.coset_label.clone()))
            .collect(),
    );
    Ok(subgroups)
}

/// Quotient G/H together with the projection (element index -> quotient
/// element index), a surjective homomorphism with kernel exactly H.
pub fn quotient_map(g: &Group, h: &Subgroup) -> Result<(Group, Vec<u32>)> {
    if h.group().as_ref() != g.as_ref() {
        return Err(Error::MismatchedParents);
    }
    let index = h.index();
    if index == 1 {
        let q = make_group(&[1])?;
        return Ok((q, vec![0u32; g.order() as usize]));
    }
    for shape in abelian_groups_of_order(index) {
        let b = make_group(&shape)?;
        let mut found: Option<Vec<u32>> = None;
        for_each_hom(g, &b, |images| {
            let mut kernel_ok = true;
            let mut proj = vec![0u32; g.order() as usize];
            walk_hom(g, &b, images, |idx, val| {
                proj[idx as usize] = val as u32;
                if (val == 0) != h.contains(idx) {
                    kernel_ok = false;
                }
            });
            if kernel_ok {
                found = Some(proj);
                true
            } else {
                false
            }
        })?;
        if let Some(proj) = found {
            return Ok((b, proj));
        }
    }
    Err(Error::InvariantViolation(
        "no quotient structure matched; subgroup is not a kernel".into(),
    ))
}

// ---------------------------------------------------------------------------
// The unit group (Z/qZ)* in additive coordinates.
// ---------------------------------------------------------------------------

/// (Z/qZ)* with a verified isomorphism onto an additive `FiniteAbelianGroup`.
pub struct UnitGroupMap {
    modulus: u64,
    group: Group,
    to_index: Vec<u32>,
    from_index: Vec<u64>,
}

const NOT_A_UNIT: u32 = u32::MAX;

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factorize(p - 1);
    'cand: for g in 2..p {
        for &(r, _) in &factors {
            if pow_mod(g, (p - 1) / r, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root");
}

/// Generator of (Z/p^k Z)* for odd p: lift a primitive root mod p.
fn primitive_root_mod_pk(p: u64, k: u32) -> u64 {
    let g = primitive_root_mod_p(p);
    if k == 1 {
        return g;
    }
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// One cyclic coordinate of the CRT decomposition: for the prime-power
/// modulus `pk_modulus`, `table[r]` is this coordinate of the discrete log
/// of r (for r invertible mod pk_modulus).
struct CrtCoordinate {
    cyclic_order: u64,
    pk_modulus: u64,
    table: Vec<u32>,
}

fn crt_coordinates(p: u64, k: u32) -> Vec<CrtCoordinate> {
    let m = p.pow(k);
    if p == 2 {
        match k {
            1 => vec![],
            2 => vec![CrtCoordinate {
                cyclic_order: 2,
                pk_modulus: 4,
                table: vec![NOT_A_UNIT, 0, NOT_A_UNIT, 1],
            }],
            _ => {
                // <-1> x <5>, orders 2 and 2^(k-2).
                let half = m / 4;
                let mut sign = vec![NOT_A_UNIT; m as usize];
                let mut exp = vec![NOT_A_UNIT; m as usize];
                for s in 0..2u64 {
                    let mut v = if s == 0 { 1 } else { m - 1 };
                    for e in 0..half {
                        sign[v as usize] = s as u32;
                        exp[v as usize] = e as u32;
                        v = (v * 5) % m;
                    }
                }
                vec![
                    CrtCoordinate {
                        cyclic_order: 2,
                        pk_modulus: m,
                        table: sign,
                    },
                    CrtCoordinate {
                        cyclic_order: half,
                        pk_modulus: m,
                        table: exp,
                    },
                ]
            }
        }
    } else {
        let ord = m / p * (p - 1);
        let g = primitive_root_mod_pk(p, k);
        let mut table = vec![NOT_A_UNIT; m as usize];
        let mut v = 1u64;
        for e in 0..ord {
            debug_assert_eq!(table[v as usize], NOT_A_UNIT);
            table[v as usize] = e as u32;
            v = ((v as u128 * g as u128) % m as u128) as u64;
        }
        vec![CrtCoordinate {
            cyclic_order: ord,
            pk_modulus: m,
            table,
        }]
    }
}

/// Build (Z/qZ)* as an additive group with discrete-log tables.
///
/// The isomorphism is spot-checked at construction (exhaustively for small q,
/// on deterministic pseudorandom pairs otherwise); `verify_exhaustive` runs
/// the full pairwise homomorphism check.
pub fn unit_group(q: u64) -> Result<UnitGroupMap> {
    if q < 3 {
        return Err(Error::UnsupportedModulus(q));
    }
    if q > DEFAULT_MAX_ORDER {
        return Err(Error::SizeLimit(format!(
            "modulus {q} exceeds the full-table maximum {DEFAULT_MAX_ORDER}"
        )));
    }
    let mut coords: Vec<CrtCoordinate> = Vec::new();
    for (p, k) in factorize(q) {
        coords.extend(crt_coordinates(p, k));
    }
    coords.sort_by_key(|c| c.cyclic_order);
    let orders: Vec<u64> = coords.iter().map(|c| c.cyclic_order).collect();
    let group = make_group(&orders)?;
    debug_assert_eq!(group.cyclic_orders(), &orders[..]);

    let mut to_index = vec![NOT_A_UNIT; q as usize];
    let mut from_index = vec![0u64; group.order() as usize];
    let mut scratch = vec![0u64; coords.len()];
    for r in 1..q {
        if gcd(r, q) != 1 {
            continue;
        }
        for (slot, c) in scratch.iter_mut().zip(&coords) {
            let t = c.table[(r % c.pk_modulus) as usize];
            debug_assert_ne!(t, NOT_A_UNIT);
            *slot = t as u64;
        }
        let idx = group.encode(&scratch);
        to_index[r as usize] = idx as u32;
        from_index[idx as usize] = r;
    }

    let map = UnitGroupMap {
        modulus: q,
        group,
        to_index,
        from_index,
    };
    map.spot_check()?;
    Ok(map)
}

impl UnitGroupMap {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn phi(&self) -> u64 {
        self.group.order()
    }

    /// Element index of a residue (reduced mod q); None for non-units.
    pub fn to_index(&self, residue: u64) -> Option<u64> {
        let r = residue % self.modulus;
        let t = self.to_index[r as usize];
        (t != NOT_A_UNIT).then_some(t as u64)
    }

    pub fn residue(&self, idx: u64) -> u64 {
        self.from_index[idx as usize]
    }

    pub fn residues(&self) -> &[u64] {
        &self.from_index
    }

    fn check_pair(&self, a: u64, b: u64) -> Result<()> {
        let prod = (a as u128 * b as u128 % self.modulus as u128) as u64;
        let lhs = self.to_index(prod).unwrap();
        let rhs = self
            .group
            .add(self.to_index(a).unwrap(), self.to_index(b).unwrap());
        if lhs != rhs {
            return Err(Error::InvariantViolation(format!(
                "discrete log is not a homomorphism at ({a}, {b}) mod {}",
                self.modulus
            )));
        }
        Ok(())
    }

    fn spot_check(&self) -> Result<()> {
        if self.modulus <= 300 {
            return self.verify_exhaustive();
        }
        // xorshift over the unit list, seeded by q for reproducibility
        let n = self.from_index.len() as u64;
        let mut state = self.modulus | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % n
        };
        for _ in 0..256 {
            let a = self.from_index[next() as usize];
            let b = self.from_index[next() as usize];
            self.check_pair(a, b)?;
        }
        Ok(())
    }

    pub fn verify_exhaustive(&self) -> Result<()> {
        for &a in &self.from_index {
            for &b in &self.from_index {
                self.check_pair(a, b)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_group_basics() {
        let g = make_group(&[2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        let g = make_group(&[5]).unwrap();
        assert_eq!(g.order(), 5);
        // elementary abelian of order 8: every nonzero element has order 2
        let g = make_group(&[2, 2, 2]).unwrap();
        assert_eq!(g.order(), 8);
        for x in 1..8 {
            assert_eq!(g.element_order(x), 2);
        }
    }

    #[test]
    fn make_group_rejects_oversize() {
        assert!(matches!(
            make_group(&[1 << 23]),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let g = make_group(&[3, 4, 5]).unwrap();
        for idx in 0..g.order() {
            assert_eq!(g.encode(&g.decode(idx)), idx);
        }
        assert_eq!(g.add(0, 17), 17);
        for idx in 0..g.order() {
            assert_eq!(g.add(idx, g.neg(idx)), 0);
        }
    }

    #[test]
    fn group_law_is_commutative_associative() {
        let g = make_group(&[4, 6]).unwrap();
        for a in 0..g.order() {
            for b in 0..g.order() {
                assert_eq!(g.add(a, b), g.add(b, a));
                for c in [0, 1, 7, 23] {
                    assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
                }
            }
        }
    }

    #[test]
    fn unit_group_structures() {
        // q=7: cyclic of order 6
        assert_eq!(unit_group(7).unwrap().group().cyclic_orders(), &[6]);
        // q=8: {1,3,5,7} all self-inverse
        assert_eq!(unit_group(8).unwrap().group().cyclic_orders(), &[2, 2]);
        // q=15: CRT of (Z/3)* and (Z/5)*
        assert_eq!(unit_group(15).unwrap().group().cyclic_orders(), &[2, 4]);
        assert!(matches!(unit_group(2), Err(Error::UnsupportedModulus(2))));
    }

    #[test]
    fn unit_group_exhaustive_small_moduli() {
        for q in 3..200u64 {
            let ug = unit_group(q).unwrap();
            let phi = (1..q).filter(|&r| gcd(r, q) == 1).count() as u64;
            assert_eq!(ug.phi(), phi, "phi({q})");
            // bijection onto 0..phi-1
            let mut seen = vec![false; phi as usize];
            for r in 1..q {
                if gcd(r, q) == 1 {
                    let i = ug.to_index(r).unwrap();
                    assert!(!seen[i as usize]);
                    seen[i as usize] = true;
                    assert_eq!(ug.residue(i), r);
                }
            }
            ug.verify_exhaustive().unwrap();
        }
    }

    #[test]
    fn subgroup_enumeration_klein_group() {
        let g = make_group(&[2, 2]).unwrap();
        let subs = enumerate_subgroups_of_index(&g, 2).unwrap();
        assert_eq!(subs.len(), 3);
        for s in &subs {
            assert_eq!(s.size(), 2);
        }
    }

    #[test]
    fn subgroup_enumeration_cyclic_5() {
        let g = make_group(&[5]).unwrap();
        let subs = enumerate_subgroups_of_index(&g, 5).unwrap();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].is_trivial());
        // Y does not divide the order: empty, not an error
        assert!(enumerate_subgroups_of_index(&g, 2).unwrap().is_empty());
        assert!(matches!(
            enumerate_subgroups_of_index(&g, 65),
            Err(Error::LimitExceeded(_))
        ));
    }

    #[test]
    fn subgroup_enumeration_z2_z4_index_2() {
        // derived oracle: exhaustive enumeration of closed subsets of order 4
        let g = make_group(&[2, 4]).unwrap();
        let subs = enumerate_subgroups_of_index(&g, 2).unwrap();
        assert_eq!(subs.len(), 3);
        let brute = brute_force_subgroups(&g)
            .into_iter()
            .filter(|s| s.count() == 4)
            .count();
        assert_eq!(brute, 3);
    }

    /// All subgroups by closure of generated subsets; independent oracle.
    fn brute_force_subgroups(g: &Group) -> Vec<Bitset> {
        use std::collections::BTreeSet;
        let order = g.order();
        let mut found: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut frontier: Vec<Bitset> = Vec::new();
        let mut trivial = Bitset::new(order as usize);
        trivial.set(0);
        found.insert(trivial.blocks().to_vec());
        frontier.push(trivial);
        while let Some(h) = frontier.pop() {
            for x in 1..order {
                if h.get(x as usize) {
                    continue;
                }
                let ext = close_under_addition(g, &h, x);
                if found.insert(ext.blocks().to_vec()) {
                    frontier.push(ext);
                }
            }
        }
        found
            .into_iter()
            .map(|blocks| {
                let mut b = Bitset::new(order as usize);
                for (w, word) in blocks.iter().enumerate() {
                    for i in 0..64 {
                        if word >> i & 1 == 1 {
                            b.set(w * 64 + i);
                        }
                    }
                }
                b
            })
            .collect()
    }

    fn close_under_addition(g: &Group, h: &Bitset, extra: u64) -> Bitset {
        let mut set = h.clone();
        set.set(extra as usize);
        loop {
            let elems: Vec<usize> = set.iter_ones().collect();
            let before = elems.len();
            for &a in &elems {
                for &b in &elems {
                    set.set(g.add(a as u64, b as u64) as usize);
                }
            }
            if set.count() == before {
                return set;
            }
        }
    }

    #[test]
    fn subgroup_counts_match_brute_force_up_to_order_36() {
        for shape in [
            vec![2u64, 2],
            vec![4],
            vec![6],
            vec![2, 4],
            vec![8],
            vec![2, 2, 2],
            vec![12],
            vec![2, 6],
            vec![3, 3],
            vec![16],
            vec![2, 8],
            vec![4, 4],
            vec![2, 2, 4],
            vec![2, 2, 2, 2],
            vec![6, 6],
            vec![2, 18],
        ] {
            let g = make_group(&shape).unwrap();
            let brute = brute_force_subgroups(&g);
            for y in 1..=g.order() {
                if g.order() % y != 0 || y > DEFAULT_MAX_INDEX {
                    continue;
                }
                let subs = enumerate_subgroups_of_index(&g, y).unwrap();
                let expect = brute
                    .iter()
                    .filter(|s| s.count() as u64 == g.order() / y)
                    .count();
                assert_eq!(subs.len(), expect, "shape {shape:?}, index {y}");
                for s in &subs {
                    // returned subgroups are genuinely closed
                    Subgroup::from_members(&g, s.members().clone()).unwrap();
                }
            }
        }
    }

    #[test]
    fn quotient_z6_by_03() {
        let g = make_group(&[6]).unwrap();
        let members = Bitset::from_indices(6, [0, 3]);
        let h = Subgroup::from_members(&g, members).unwrap();
        let (q, proj) = quotient_map(&g, &h).unwrap();
        assert_eq!(q.order(), 3);
        // projection is a homomorphism with kernel H
        for a in 0..6u64 {
            for b in 0..6u64 {
                assert_eq!(
                    proj[g.add(a, b) as usize] as u64,
                    q.add(proj[a as usize] as u64, proj[b as usize] as u64)
                );
            }
            assert_eq!(proj[a as usize] == 0, h.contains(a));
        }
    }

    #[test]
    fn quotient_by_trivial_is_identity_reindexing() {
        let g = make_group(&[2, 4]).unwrap();
        let h = Subgroup::trivial(&g);
        let (q, proj) = quotient_map(&g, &h).unwrap();
        assert_eq!(q.order(), 8);
        let mut seen = vec![false; 8];
        for x in 0..8 {
            assert!(!seen[proj[x] as usize]);
            seen[proj[x] as usize] = true;
        }
    }

    #[test]
    fn quotient_unit_group_8() {
        // (Z/8)* / {1,7}: order 2 (derived by brute-force coset table)
        let ug = unit_group(8).unwrap();
        let g = ug.group().clone();
        let mut members = Bitset::new(4);
        members.set(ug.to_index(1).unwrap() as usize);
        members.set(ug.to_index(7).unwrap() as usize);
        let h = Subgroup::from_members(&g, members).unwrap();
        let (q, proj) = quotient_map(&g, &h).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj.iter().filter(|&&v| v == 0).count(), 2);
    }

    #[test]
    fn coset_labels_consistent() {
        let g = make_group(&[12]).unwrap();
        let h = Subgroup::from_members(&g, Bitset::from_indices(12, [0, 4, 8])).unwrap();
        assert_eq!(h.index(), 4);
        for x in 0..12u64 {
            assert_eq!(h.coset_of(x) == 0, h.contains(x));
            for m in h.members().iter_ones() {
                assert_eq!(h.coset_of(g.add(x, m as u64)), h.coset_of(x));
            }
        }
    }

    #[test]
    fn non_closed_set_rejected() {
        let g = make_group(&[6]).unwrap();
        let res = Subgroup::from_members(&g, Bitset::from_indices(6, [0, 1]));
        assert!(matches!(res, Err(Error::InvariantViolation(_))));
    }
}
