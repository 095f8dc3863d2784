//! Hypothesis systems and gate logic for the triple- and quadruple-sumset
//! cover theorems.
//!
//! Each variant pairs an exact rational density threshold with a set of
//! coset-intersection hypotheses; when the hypotheses hold the conclusion
//! 3A = G is recomputed, and a mismatch is reported as an implementation
//! bug, never silently accepted.

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups_of_index, Subgroup};
use crate::rational::Rational;
use crate::sumset::{cosets_met, generated_subgroup, iterated_sumset, stabilizer, sumset, GroupSubset};
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct HypothesisFlags {
    /// A generates G.
    pub c0: bool,
    /// A meets every coset of every index-2 subgroup.
    pub c1: bool,
    /// A intersects every subgroup of index = 2 mod 3 with index <= y0.
    pub c2: bool,
    /// A u 2A meets every coset of every such subgroup.
    pub c3: bool,
    pub y0: u64,
}

impl HypothesisFlags {
    pub fn all(&self) -> bool {
        self.c0 && self.c1 && self.c2 && self.c3
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CoverVariant {
    First,
    Second,
    Third,
    Fourth,
}

impl CoverVariant {
    pub fn threshold(&self) -> Rational {
        match self {
            CoverVariant::First => Rational::new(2, 5),
            CoverVariant::Second => Rational::new(3, 8),
            CoverVariant::Third => Rational::new(1, 3),
            CoverVariant::Fourth => Rational::new(4, 11),
        }
    }
}

/// Where a hypothesis failed, or the element left uncovered.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FailureWitness {
    pub hypothesis: Option<String>,
    /// Index of the offending subgroup.
    pub y: Option<u64>,
    pub subgroup: Option<Vec<u64>>,
    /// Representative of the missed coset.
    pub coset: Option<u64>,
    /// Element not reached by 3A.
    pub uncovered: Option<u64>,
}

impl FailureWitness {
    fn hypothesis(name: &str, y: u64, h: Option<&Subgroup>, coset: Option<u64>) -> FailureWitness {
        FailureWitness {
            hypothesis: Some(name.to_string()),
            y: Some(y),
            subgroup: h.map(|h| h.members().iter_ones().map(|i| i as u64).collect()),
            coset,
            uncovered: None,
        }
    }

}

#[derive(Clone, Debug, Serialize)]
pub struct CoverVerdict {
    pub variant: CoverVariant,
    pub order: u64,
    pub density: Rational,
    pub flags: HypothesisFlags,
    pub hypotheses_met: bool,
    pub conclusion_3a_eq_g: bool,
    pub failure_witness: Option<FailureWitness>,
}

impl CoverVerdict {
    /// JSON export record: {variant, order, density:{num,den}, flags,
    /// covered, witness}.
    pub fn json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            variant: CoverVariant,
            order: u64,
            density: Rational,
            flags: HypothesisFlags,
            covered: bool,
            witness: &'a Option<FailureWitness>,
        }
        serde_json::to_string(&Line {
            variant: self.variant,
            order: self.order,
            density: self.density,
            flags: self.flags,
            covered: self.conclusion_3a_eq_g,
            witness: &self.failure_witness,
        })
        .expect("serialization cannot fail")
    }
}

fn c1_check(a: &GroupSubset) -> Result<(bool, Option<FailureWitness>)> {
    for h in enumerate_subgroups_of_index(a.group(), 2)? {
        if cosets_met(a, &h)? != 2 {
            let missed = (0..a.group().order())
                .find(|&x| !a.iter().any(|e| h.coset_of(e) == h.coset_of(x)));
            return Ok((false, Some(FailureWitness::hypothesis("c1", 2, Some(&h), missed))));
        }
    }
    Ok((true, None))
}

fn relevant_indices(order: u64, y0: u64) -> impl Iterator<Item = u64> {
    (2..=y0.min(order)).filter(move |y| y % 3 == 2 && order % y == 0)
}

fn c2_check(a: &GroupSubset, y0: u64) -> Result<(bool, Option<FailureWitness>)> {
    for y in relevant_indices(a.group().order(), y0) {
        for h in enumerate_subgroups_of_index(a.group(), y)? {
            if !a.bits().intersects(h.members()) {
                return Ok((false, Some(FailureWitness::hypothesis("c2", y, Some(&h), None))));
            }
        }
    }
    Ok((true, None))
}

fn c3_check(a: &GroupSubset, y0: u64) -> Result<(bool, Option<FailureWitness>)> {
    let union = a.union(&sumset(a, a)?)?;
    for y in relevant_indices(a.group().order(), y0) {
        for h in enumerate_subgroups_of_index(a.group(), y)? {
            if cosets_met(&union, &h)? != y {
                let missed = (0..a.group().order())
                    .find(|&x| !union.iter().any(|e| h.coset_of(e) == h.coset_of(x)));
                return Ok((false, Some(FailureWitness::hypothesis("c3", y, Some(&h), missed))));
            }
        }
    }
    Ok((true, None))
}

/// Recompute all four flags by full subgroup enumeration.
pub fn check_hypotheses(a: &GroupSubset, y0: u64) -> Result<HypothesisFlags> {
    if y0 < 2 {
        return Err(Error::Domain(format!("y0 = {y0} but the hypothesis system needs y0 >= 2")));
    }
    Ok(HypothesisFlags {
        c0: generated_subgroup(a).index() == 1,
        c1: c1_check(a)?.0,
        c2: c2_check(a, y0)?.0,
        c3: c3_check(a, y0)?.0,
        y0,
    })
}

/// Y0 of the third variant: floor(1/(3*eta - 1)); an integer value of
/// 1/(3*eta - 1) is included.
pub fn third_variant_y0(eta: &Rational) -> Result<u64> {
    let d = 3 * eta.num - eta.den;
    if d <= 0 {
        return Err(Error::Domain(format!("eta = {eta} but the third variant needs eta > 1/3")));
    }
    Ok(Rational::new(eta.den, d).floor() as u64)
}

/// Evaluate one cover-theorem variant on A: threshold as exact rational,
/// variant hypotheses, then the conclusion 3A = G recomputed.
pub fn apply_cover_theorem(a: &GroupSubset, variant: CoverVariant) -> Result<CoverVerdict> {
    let eta = a.density();
    let threshold = variant.threshold();
    if eta <= threshold {
        return Err(Error::Domain(format!(
            "density {eta} does not exceed the {variant:?}-variant threshold {threshold}"
        )));
    }
    if variant == CoverVariant::Fourth && !a.group().two_part_is_elementary() {
        return Err(Error::Domain(
            "structural requirement fails: the 2-part of G is not elementary abelian".into(),
        ));
    }

    let (c0, c0_witness) = {
        let ok = generated_subgroup(a).index() == 1;
        let w = (!ok).then(|| FailureWitness::hypothesis("c0", 1, None, None));
        (ok, w)
    };
    let (c1, c1_witness) = c1_check(a)?;
    // c2/c3 ranges per variant; the first variant only assumes c0 and c1.
    let (c2_y0, c3_y0, flags_y0) = match variant {
        CoverVariant::First => (None, None, 2),
        CoverVariant::Second => (Some(5), Some(5), 5),
        CoverVariant::Third => {
            let y0 = third_variant_y0(&eta)?;
            (Some(y0), Some(y0), y0)
        }
        CoverVariant::Fourth => (Some(5), Some(8), 8),
    };
    let (c2, c2_witness) = match c2_y0 {
        Some(y0) => c2_check(a, y0)?,
        None => (true, None),
    };
    let (c3, c3_witness) = match c3_y0 {
        Some(y0) => c3_check(a, y0)?,
        None => (true, None),
    };
    let flags = HypothesisFlags { c0, c1, c2, c3, y0: flags_y0 };
    let hypotheses_met = flags.all();

    let triple = iterated_sumset(a, 3)?;
    let conclusion = triple.is_full();
    if hypotheses_met && !conclusion {
        return Err(Error::TheoremViolation {
            check: format!("apply_cover_theorem({variant:?})"),
            detail: format!(
                "hypotheses met at density {eta} on group of order {} but 3A != G",
                a.group().order()
            ),
        });
    }
    let failure_witness = if hypotheses_met {
        None
    } else {
        [c0_witness, c1_witness, c2_witness, c3_witness]
            .into_iter()
            .flatten()
            .next()
            .map(|mut w| {
                if !conclusion {
                    w.uncovered = triple.complement().iter().next();
                }
                w
            })
    };
    Ok(CoverVerdict {
        variant,
        order: a.group().order(),
        density: eta,
        flags,
        hypotheses_met,
        conclusion_3a_eq_g: conclusion,
        failure_witness,
    })
}

/// True iff the k-fold sumset fills the group, k in {2, 3, 4}.
pub fn covers(a: &GroupSubset, k: u32) -> Result<bool> {
    if !(2..=4).contains(&k) {
        return Err(Error::Domain(format!("covers expects k in 2..=4, got {k}")));
    }
    Ok(iterated_sumset(a, k)?.is_full())
}

pub const FOUR_PRIME_DEFAULT_THRESHOLD: Rational = Rational { num: 5, den: 18 };

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FourPrimeBranch {
    LargeIndex,
    SmallIndex,
}

/// Outcome of the quadruple-sumset gate: the two-branch counting argument
/// over the cosets of H = stab(2A), plus the recomputed conclusion 4A = G.
#[derive(Clone, Debug, Serialize)]
pub struct FourPrimeGateReport {
    pub order: u64,
    pub density: Rational,
    pub threshold: Rational,
    /// Index Y of H = stab(2A).
    pub y: u64,
    /// Cosets of H met by A.
    pub n: u64,
    /// Cosets of H met by 2A.
    pub m: u64,
    pub branch: FourPrimeBranch,
    pub gate_passed: bool,
    pub four_a_eq_g: bool,
    pub failure_witness: Option<String>,
}

pub fn four_prime_gate(a: &GroupSubset) -> Result<FourPrimeGateReport> {
    four_prime_gate_with_threshold(a, FOUR_PRIME_DEFAULT_THRESHOLD)
}

/// The gate with a configurable density threshold (default 5/18), so the
/// sensitivity of the constant can be probed.
pub fn four_prime_gate_with_threshold(
    a: &GroupSubset,
    threshold: Rational,
) -> Result<FourPrimeGateReport> {
    let eta = a.density();
    if eta < threshold {
        return Err(Error::Domain(format!(
            "density {eta} is below the gate threshold {threshold}"
        )));
    }
    let double = sumset(a, a)?;
    let h = stabilizer(&double);
    let y = h.index();
    let n = cosets_met(a, &h)?;
    let m = cosets_met(&double, &h)?;

    // Either branch certifies 2|2A/H| > Y, whence 2A + 2A fills every
    // H-coset and 4A = G.
    let (branch, gate_passed, failure_witness) = if y >= 55 {
        let lower = 2 * threshold.ceil_mul(y) - 1;
        if 2 * lower > y as i64 {
            (FourPrimeBranch::LargeIndex, true, None)
        } else {
            (
                FourPrimeBranch::LargeIndex,
                false,
                Some(format!("2*(2*ceil({threshold}*{y})-1) = {} <= Y = {y}", 2 * lower)),
            )
        }
    } else if n + m < y {
        (
            FourPrimeBranch::SmallIndex,
            false,
            Some(format!("|A/H| + |2A/H| = {n} + {m} < Y = {y}")),
        )
    } else {
        let lower = (2 * n as i64 - 1).max(y as i64 - n as i64);
        if 2 * lower > y as i64 {
            (FourPrimeBranch::SmallIndex, true, None)
        } else {
            (
                FourPrimeBranch::SmallIndex,
                false,
                Some(format!("2*max(2n-1, Y-n) = {} <= Y = {y} (n = {n})", 2 * lower)),
            )
        }
    };
    let four_a_eq_g = sumset(&double, &double)?.is_full();
    if gate_passed && !four_a_eq_g {
        return Err(Error::TheoremViolation {
            check: "four_prime_gate".into(),
            detail: format!("gate passed (Y = {y}, n = {n}, m = {m}) but 4A != G"),
        });
    }
    Ok(FourPrimeGateReport {
        order: a.group().order(),
        density: eta,
        threshold,
        y,
        n,
        m,
        branch,
        gate_passed,
        four_a_eq_g,
        failure_witness,
    })
}
