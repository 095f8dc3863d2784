//! Finite abelian group sumset machinery, exceptional-set search, cover
//! theorem auditing, and desk-scale prime experiments in unit groups.

pub mod auditor;
pub mod bitset;
pub mod error;
pub mod exceptional;
pub mod group;
pub mod primes;
pub mod rational;
pub mod sumset;

pub use auditor::{
    apply_cover_theorem, check_hypotheses, covers, four_prime_gate,
    four_prime_gate_with_threshold, third_variant_y0, CoverVariant, CoverVerdict,
    FourPrimeBranch, FourPrimeGateReport, HypothesisFlags,
};
pub use bitset::Bitset;
pub use error::{Error, Result};
pub use exceptional::{
    canonical_representative, classify_exceptional, diff_table_against_reference,
    feasible_indices, search_exceptional, search_exceptional_with_limit, table_rows,
    trouble_index_report, verify_certificate, CertificateChecks, DensityMode, Dichotomy,
    ExceptionalCertificate, FeasibleMode, TroubleDiscrepancy, TroubleIndexReport,
    DEFAULT_SEARCH_MAX, REFERENCE_TABLE, REFERENCE_TROUBLE_INDICES,
};
pub use group::{
    abelian_groups_of_order, enumerate_subgroups_of_index, factorize, make_group,
    quotient_map, unit_group, FiniteAbelianGroup, Group, Subgroup, UnitGroupMap,
};
pub use primes::{
    brun_titchmarsh_exponent_ratio, convolution_identity_check, density_probe,
    least_p2_in_cosets, least_prime_in_subgroup, min_cover_exponent, prime_residues,
    sieve_primes, verify_product_cover, verify_product_cover_with_witnesses,
    ConvolutionCheckResult, CoverReport, MinCoverResult, P2Audit, PrimeTable, Regime,
    SubgroupPrimeAudit,
};
pub use rational::{parse_rational, Rational, RationalDensity};
pub use sumset::{
    cosets_met, generated_subgroup, is_coset_union, iterated_sumset, kneser_audit,
    lambda_threshold, stabilizer, sumset, GroupSubset, KneserAudit,
};
