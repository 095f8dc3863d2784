//! Bitset set arithmetic over a finite abelian group: sumsets, iterated
//! sumsets, stabilizers, coset counts and the Kneser-bound audit.

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::group::{Group, Subgroup};
use crate::rational::Rational;

/// A subset of a finite abelian group, stored as a bitset over element
/// indices.
#[derive(Clone, Debug)]
pub struct GroupSubset {
    group: Group,
    bits: Bitset,
}

impl PartialEq for GroupSubset {
    fn eq(&self, other: &Self) -> bool {
        self.group.as_ref() == other.group.as_ref() && self.bits == other.bits
    }
}
impl Eq for GroupSubset {}

impl GroupSubset {
    pub fn empty(group: &Group) -> GroupSubset {
        GroupSubset {
            group: group.clone(),
            bits: Bitset::new(group.order() as usize),
        }
    }

    pub fn full(group: &Group) -> GroupSubset {
        GroupSubset {
            group: group.clone(),
            bits: Bitset::full(group.order() as usize),
        }
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(group: &Group, iter: I) -> Result<GroupSubset> {
        let mut s = GroupSubset::empty(group);
        for i in iter {
            if i >= group.order() {
                return Err(Error::Domain(format!(
                    "element index {i} out of range for group of order {}",
                    group.order()
                )));
            }
            s.bits.set(i as usize);
        }
        Ok(s)
    }

    pub fn from_bits(group: &Group, bits: Bitset) -> Result<GroupSubset> {
        if bits.len() != group.order() as usize {
            return Err(Error::InvariantViolation(
                "bitset length != group order".into(),
            ));
        }
        Ok(GroupSubset {
            group: group.clone(),
            bits,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn bits(&self) -> &Bitset {
        &self.bits
    }

    pub fn insert(&mut self, elem: u64) {
        self.bits.set(elem as usize);
    }

    pub fn contains(&self, elem: u64) -> bool {
        self.bits.get(elem as usize)
    }

    pub fn card(&self) -> u64 {
        self.bits.count() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    /// |A|/|G| as an exact rational.
    pub fn density(&self) -> Rational {
        Rational::new(self.card() as i64, self.group.order() as i64)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| i as u64)
    }

    pub fn elements(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn union(&self, other: &GroupSubset) -> Result<GroupSubset> {
        same_parent(self, other)?;
        let mut out = self.clone();
        out.bits.or_assign(&other.bits);
        Ok(out)
    }

    pub fn intersection(&self, other: &GroupSubset) -> Result<GroupSubset> {
        same_parent(self, other)?;
        let mut out = self.clone();
        out.bits.and_assign(&other.bits);
        Ok(out)
    }

    pub fn complement(&self) -> GroupSubset {
        GroupSubset {
            group: self.group.clone(),
            bits: self.bits.complement(),
        }
    }

    /// { -a : a in A }
    pub fn negated(&self) -> GroupSubset {
        let mut out = GroupSubset::empty(&self.group);
        for a in self.iter() {
            out.insert(self.group.neg(a));
        }
        out
    }

    /// OR the translate A + g into `acc`. The walk keeps both the source
    /// coordinates and the translated index as odometers, so each step is
    /// O(1) amortized instead of a full decode/encode.
    pub(crate) fn translate_or_into(&self, g: u64, acc: &mut Bitset) {
        let orders = self.group.cyclic_orders();
        let strides = self.group.strides();
        let k = orders.len();
        let mut xc = vec![0u64; k];
        let mut tc = self.group.decode(g);
        let mut t = g;
        let order = self.group.order();
        for x in 0..order {
            if self.bits.get(x as usize) {
                acc.set(t as usize);
            }
            let mut i = 0;
            while i < k {
                xc[i] += 1;
                tc[i] += 1;
                t += strides[i];
                if tc[i] == orders[i] {
                    tc[i] = 0;
                    t -= orders[i] * strides[i];
                }
                if xc[i] < orders[i] {
                    break;
                }
                xc[i] = 0;
                i += 1;
            }
        }
    }

    pub fn translate(&self, g: u64) -> GroupSubset {
        let mut bits = Bitset::new(self.group.order() as usize);
        self.translate_or_into(g, &mut bits);
        GroupSubset {
            group: self.group.clone(),
            bits,
        }
    }

    /// True iff A + g = A, with early exit.
    pub(crate) fn translate_equals(&self, g: u64) -> bool {
        let orders = self.group.cyclic_orders();
        let strides = self.group.strides();
        let k = orders.len();
        let mut xc = vec![0u64; k];
        let mut tc = self.group.decode(g);
        let mut t = g;
        let order = self.group.order();
        for x in 0..order {
            if self.bits.get(x as usize) != self.bits.get(t as usize) {
                return false;
            }
            let mut i = 0;
            while i < k {
                xc[i] += 1;
                tc[i] += 1;
                t += strides[i];
                if tc[i] == orders[i] {
                    tc[i] = 0;
                    t -= orders[i] * strides[i];
                }
                if xc[i] < orders[i] {
                    break;
                }
                xc[i] = 0;
                i += 1;
            }
        }
        true
    }
}

fn same_parent(a: &GroupSubset, b: &GroupSubset) -> Result<()> {
    if a.group.as_ref() != b.group.as_ref() {
        return Err(Error::MismatchedParents);
    }
    Ok(())
}

/// A + B = { a + b : a in A, b in B }; representation counts are not tracked.
pub fn sumset(a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    same_parent(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(GroupSubset::empty(&a.group));
    }
    let (small, large) = if a.card() <= b.card() { (a, b) } else { (b, a) };
    let mut acc = Bitset::new(a.group.order() as usize);
    for g in small.iter() {
        large.translate_or_into(g, &mut acc);
        if acc.is_full() {
            break;
        }
    }
    GroupSubset::from_bits(&a.group, acc)
}

/// kA for k >= 1 by repeated sumset; k = 0 is rejected.
pub fn iterated_sumset(a: &GroupSubset, k: u32) -> Result<GroupSubset> {
    if k == 0 {
        return Err(Error::Domain("iterated sumset requires k >= 1".into()));
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = sumset(&acc, a)?;
    }
    Ok(acc)
}

/// Stabilizer H = { g : g + C = C }. The stabilizer of the empty set is the
/// full group (g + empty = empty for every g).
pub fn stabilizer(c: &GroupSubset) -> Subgroup {
    let group = &c.group;
    if c.is_empty() || c.is_full() {
        return Subgroup::full(group);
    }
    // g + c0 must land in C, so candidates are exactly C - c0.
    let c0 = c.bits.first_one().unwrap() as u64;
    let candidates = c.translate(group.neg(c0));
    let mut members = Bitset::new(group.order() as usize);
    for g in candidates.iter() {
        if c.translate_equals(g) {
            members.set(g as usize);
        }
    }
    Subgroup::from_members_unchecked(group, members)
}

/// Number of distinct cosets of H met by A.
pub fn cosets_met(a: &GroupSubset, h: &Subgroup) -> Result<u64> {
    if a.group.as_ref() != h.group().as_ref() {
        return Err(Error::MismatchedParents);
    }
    let mut seen = Bitset::new(h.index() as usize);
    for x in a.iter() {
        seen.set(h.coset_of(x) as usize);
    }
    Ok(seen.count() as u64)
}

/// True iff C + H = C, i.e. C is a union of H-cosets.
pub fn is_coset_union(c: &GroupSubset, h: &Subgroup) -> Result<bool> {
    if c.group.as_ref() != h.group().as_ref() {
        return Err(Error::MismatchedParents);
    }
    if c.is_empty() {
        return Ok(true);
    }
    Ok(h.members().iter_ones().all(|m| c.translate_equals(m as u64)))
}

/// Outcome of the Kneser bound check on a single set: with H the stabilizer
/// of A+A and lambda the number of H-cosets met by A, |A+A| >= (2*lambda-1)|H|.
#[derive(Debug)]
pub struct KneserAudit {
    pub stabilizer: Subgroup,
    pub lambda: u64,
    pub double_size: u64,
    pub bound: u64,
    pub holds: bool,
}

/// Run the Kneser bound on A. The bound is a theorem, so a failure is
/// reported as an implementation bug rather than a data condition. Also
/// checks that 3A is a union of cosets of the stabilizer of 2A.
pub fn kneser_audit(a: &GroupSubset) -> Result<KneserAudit> {
    if a.is_empty() {
        return Err(Error::Domain("kneser_audit requires a nonempty set".into()));
    }
    let double = sumset(a, a)?;
    let h = stabilizer(&double);
    let lambda = cosets_met(a, &h)?;
    let double_size = double.card();
    let bound = (2 * lambda - 1) * h.size();
    let holds = double_size >= bound;
    if !holds {
        return Err(Error::TheoremViolation {
            check: "kneser_audit".into(),
            detail: format!(
                "|A+A| = {double_size} < (2*{lambda}-1)*{} = {bound}",
                h.size()
            ),
        });
    }
    let triple = sumset(&double, a)?;
    if !is_coset_union(&triple, &h)? {
        return Err(Error::TheoremViolation {
            check: "kneser_audit".into(),
            detail: "3A is not a union of cosets of stab(2A)".into(),
        });
    }
    Ok(KneserAudit {
        stabilizer: h,
        lambda,
        double_size,
        bound,
        holds,
    })
}

/// The coset threshold lambda(Y): ceil(eta*Y)+1 when Y = 2 mod 3 and
/// 2 <= Y <= 1/(3*eta - 1), else ceil(eta*Y). All comparisons are exact; a
/// tie at the boundary takes the +1 branch.
pub fn lambda_threshold(eta: &Rational, y: u64) -> Result<u64> {
    let three_eta_minus_one = Rational::new(3 * eta.num - eta.den, eta.den);
    if three_eta_minus_one.num <= 0 {
        return Err(Error::Domain(format!("lambda_threshold requires eta > 1/3, got {eta}")));
    }
    let base = eta.ceil_mul(y) as u64;
    // Y <= 1/(3*eta-1)  <=>  Y * (3*num - den) <= den
    let in_window = y >= 2
        && y as i128 * three_eta_minus_one.num as i128 <= three_eta_minus_one.den as i128;
    if y % 3 == 2 && in_window {
        Ok(base + 1)
    } else {
        Ok(base)
    }
}

/// Smallest subgroup containing A: close {0} together with A and -A under
/// addition.
pub fn generated_subgroup(a: &GroupSubset) -> Subgroup {
    let group = &a.group;
    let mut s = a.union(&a.negated()).expect("same parent");
    s.insert(0);
    loop {
        let next = sumset(&s, &s).expect("same parent");
        if next == s {
            break;
        }
        s = next;
    }
    Subgroup::from_members_unchecked(group, s.bits)
}
