use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{ratio_statistic, CriticalTable};

/// Outcome of testing `H0: k = k0` against `k0 < k <= kmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub k0: usize,
    pub kmax: usize,
    pub statistic: f64,
    pub critical_value: f64,
    pub level: f64,
    pub reject: bool,
    pub percentile_of_statistic: f64,
}

/// Whether `kmax` itself, which is never tested, belongs to the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KmaxConvention {
    #[default]
    Include,
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSet {
    pub level: f64,
    pub kmax: usize,
    pub kmax_convention: KmaxConvention,
    pub members: BTreeSet<usize>,
    pub reports: Vec<TestReport>,
}

fn check_hypotheses(k0: usize, kmax: usize) -> Result<()> {
    if k0 >= kmax {
        return Err(Error::InvalidInput(format!("k0 = {k0} must be below kmax = {kmax}")));
    }
    Ok(())
}

fn report(statistic: f64, k0: usize, kmax: usize, table: &CriticalTable, level: f64) -> Result<TestReport> {
    let m = kmax - k0;
    let critical_value = table.critical_value(level, m)?;
    Ok(TestReport {
        k0,
        kmax,
        statistic,
        critical_value,
        level,
        reject: statistic > critical_value,
        percentile_of_statistic: table.percentile_of(statistic, m)?,
    })
}

/// Tests `k0` factors against at most `kmax` with the statistic
/// `max_{k0 < i <= kmax} (g_i - g_{i+1}) / (g_{i+1} - g_{i+2})`.
pub fn run_test(eigs: &[f64], k0: usize, kmax: usize, table: &CriticalTable, level: f64) -> Result<TestReport> {
    check_hypotheses(k0, kmax)?;
    if eigs.len() < kmax + 2 {
        return Err(Error::Configuration(format!(
            "kmax = {kmax} needs {} eigenvalues, only {} available",
            kmax + 2,
            eigs.len()
        )));
    }
    let statistic = ratio_statistic(&eigs[k0..], kmax - k0)?;
    report(statistic, k0, kmax, table, level)
}

/// As [`run_test`], from precomputed ratios where `ratios[i - 1]` is
/// `(g_i - g_{i+1}) / (g_{i+1} - g_{i+2})`.
pub fn run_test_from_ratios(
    ratios: &[f64],
    k0: usize,
    kmax: usize,
    table: &CriticalTable,
    level: f64,
) -> Result<TestReport> {
    check_hypotheses(k0, kmax)?;
    if ratios.len() < kmax {
        return Err(Error::Configuration(format!(
            "kmax = {kmax} needs {kmax} ratios, only {} available",
            ratios.len()
        )));
    }
    if ratios[..kmax].iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidInput("ratios must be finite and non-negative".into()));
    }
    let statistic = ratios[k0..kmax].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report(statistic, k0, kmax, table, level)
}

fn invert(
    kmax: usize,
    level: f64,
    convention: KmaxConvention,
    mut test: impl FnMut(usize) -> Result<TestReport>,
) -> Result<ConfidenceSet> {
    if kmax == 0 {
        return Err(Error::InvalidInput("kmax must be at least 1".into()));
    }
    let reports = (0..kmax).map(&mut test).collect::<Result<Vec<_>>>()?;
    let mut members: BTreeSet<usize> = reports.iter().filter(|r| !r.reject).map(|r| r.k0).collect();
    if convention == KmaxConvention::Include {
        members.insert(kmax);
    }
    Ok(ConfidenceSet {
        level,
        kmax,
        kmax_convention: convention,
        members,
        reports,
    })
}

/// Inverts the tests for `k0 = 0..kmax`.
pub fn confidence_set(
    eigs: &[f64],
    kmax: usize,
    table: &CriticalTable,
    level: f64,
    convention: KmaxConvention,
) -> Result<ConfidenceSet> {
    invert(kmax, level, convention, |k0| run_test(eigs, k0, kmax, table, level))
}

pub fn confidence_set_from_ratios(
    ratios: &[f64],
    kmax: usize,
    table: &CriticalTable,
    level: f64,
    convention: KmaxConvention,
) -> Result<ConfidenceSet> {
    invert(kmax, level, convention, |k0| {
        run_test_from_ratios(ratios, k0, kmax, table, level)
    })
}

/// `(i, g_i)` pairs with 1-based rank.
pub fn scree_data(eigs: &[f64]) -> Vec<(usize, f64)> {
    eigs.iter().enumerate().map(|(i, &g)| (i + 1, g)).collect()
}

/// Consecutive gap ratios `(g_i - g_{i+1}) / (g_{i+1} - g_{i+2})`.
pub fn gap_ratios(eigs: &[f64]) -> Vec<f64> {
    eigs.windows(3).map(|w| (w[0] - w[1]) / (w[1] - w[2])).collect()
}

impl TestReport {
    fn write_tree(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = " ".repeat(indent);
        writeln!(f, "{pad}test_report")?;
        writeln!(f, "{pad}  k0: {}", self.k0)?;
        writeln!(f, "{pad}  kmax: {}", self.kmax)?;
        writeln!(f, "{pad}  statistic: {}", self.statistic)?;
        writeln!(f, "{pad}  critical_value: {}", self.critical_value)?;
        writeln!(f, "{pad}  level: {}", self.level)?;
        writeln!(f, "{pad}  reject: {}", self.reject)?;
        writeln!(f, "{pad}  percentile_of_statistic: {}", self.percentile_of_statistic)
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_tree(f, 0)
    }
}

impl fmt::Display for ConfidenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.members.iter().map(usize::to_string).collect();
        let convention = match self.kmax_convention {
            KmaxConvention::Include => "include",
            KmaxConvention::Exclude => "exclude",
        };
        writeln!(f, "confidence_set")?;
        writeln!(f, "  level: {}", self.level)?;
        writeln!(f, "  kmax: {}", self.kmax)?;
        writeln!(f, "  kmax_convention: {convention}")?;
        writeln!(f, "  members: [{}]", members.join(", "))?;
        writeln!(f, "  reports")?;
        for r in &self.reports {
            r.write_tree(f, 4)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GAMMA: [f64; 9] = [3.99, 1.16, 0.76, 0.66, 0.50, 0.48, 0.40, 0.37, 0.34];
    const RATIOS: [f64; 7] = [7.14, 3.77, 0.65, 12.73, 0.15, 2.98, 1.18];

    fn table() -> CriticalTable {
        CriticalTable::reference()
    }

    #[test]
    fn full_range_statistic() {
        let r = run_test_from_ratios(&RATIOS, 0, 7, &table(), 0.95).unwrap();
        assert_eq!(r.statistic, 12.73);
        assert_eq!(r.critical_value, 8.29);
        assert!(r.reject);
        let expected = 0.98 + 0.01 * (12.73 - 11.75) / (14.88 - 11.75);
        assert!((r.percentile_of_statistic - expected).abs() < 1e-12);
    }

    #[test]
    fn k0_four_is_not_rejected() {
        let r = run_test_from_ratios(&RATIOS, 4, 7, &table(), 0.95).unwrap();
        assert_eq!(r.statistic, 2.98);
        assert_eq!(r.critical_value, 6.46);
        assert!(!r.reject);
    }

    #[test]
    fn statistics_and_critical_values_per_k0() {
        let stats = [12.73, 12.73, 12.73, 12.73, 2.98, 2.98, 1.18];
        let crits = [8.29, 7.95, 7.50, 7.01, 6.46, 5.73, 4.52];
        let set = confidence_set_from_ratios(&RATIOS, 7, &table(), 0.95, KmaxConvention::Include).unwrap();
        for (k0, r) in set.reports.iter().enumerate() {
            assert_eq!(r.k0, k0);
            assert_eq!(r.statistic, stats[k0]);
            assert_eq!(r.critical_value, crits[k0]);
            assert_eq!(r.reject, k0 < 4);
        }
        assert_eq!(set.members, BTreeSet::from([4, 5, 6, 7]));
        let excl = confidence_set_from_ratios(&RATIOS, 7, &table(), 0.95, KmaxConvention::Exclude).unwrap();
        assert_eq!(excl.members, BTreeSet::from([4, 5, 6]));
    }

    #[test]
    fn rounded_eigenvalues_lose_the_k0_zero_rejection() {
        // Two-digit eigenvalues give (0.66 - 0.50) / (0.50 - 0.48) = 8 for
        // i = 4, below the 8.29 cutoff; the exact ratios give 12.73.
        let r = run_test(&GAMMA, 0, 7, &table(), 0.95).unwrap();
        assert!((r.statistic - 8.0).abs() < 1e-9);
        assert!(!r.reject);
        let ratios = gap_ratios(&GAMMA);
        assert_eq!(ratios.len(), 7);
        assert!((ratios[0] - 7.075).abs() < 1e-9);
    }

    #[test]
    fn equality_does_not_reject() {
        let ratios = [0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 8.29];
        let r = run_test_from_ratios(&ratios, 0, 7, &table(), 0.95).unwrap();
        assert_eq!(r.statistic, r.critical_value);
        assert!(!r.reject);
    }

    #[test]
    fn all_small_statistics_keep_everything() {
        let eigs: Vec<f64> = (0..12).map(|i| 10.0 - i as f64).collect();
        let set = confidence_set(&eigs, 7, &table(), 0.95, KmaxConvention::Include).unwrap();
        assert_eq!(set.members, (0..=7).collect());
    }

    #[test]
    fn errors() {
        let t = table();
        assert!(matches!(
            run_test(&GAMMA[..8], 0, 7, &t, 0.95),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            run_test(&GAMMA, 0, 7, &t, 0.975),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(run_test(&GAMMA, 7, 7, &t, 0.95), Err(Error::InvalidInput(_))));
        let long: Vec<f64> = (0..20).map(|i| 20.0 - i as f64).collect();
        assert!(matches!(run_test(&long, 0, 9, &t, 0.95), Err(Error::Configuration(_))));
    }

    #[test]
    fn scree() {
        let s = scree_data(&GAMMA);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], (1, 3.99));
        assert_eq!(s[8], (9, 0.34));
        assert!(scree_data(&[]).is_empty());
    }

    #[test]
    fn report_tree_lists_fields() {
        let set = confidence_set_from_ratios(&RATIOS, 7, &table(), 0.95, KmaxConvention::Include).unwrap();
        let text = set.to_string();
        assert!(text.starts_with("confidence_set\n"));
        assert!(text.contains("  members: [4, 5, 6, 7]\n"));
        assert_eq!(text.matches("test_report").count(), 7);
        assert!(text.contains("    critical_value: 8.29\n"));
    }

    proptest! {
        #[test]
        fn affine_invariant_decisions(
            gaps in proptest::collection::vec(0.01f64..3.0, 9..14),
            a in 0.01f64..50.0,
            b in -50.0f64..50.0,
        ) {
            let mut e = vec![10.0];
            for g in &gaps {
                let last = *e.last().unwrap();
                e.push(last - g);
            }
            let moved: Vec<f64> = e.iter().map(|x| a * x + b).collect();
            let t = table();
            let x = confidence_set(&e, 7, &t, 0.95, KmaxConvention::Include).unwrap();
            let y = confidence_set(&moved, 7, &t, 0.95, KmaxConvention::Include).unwrap();
            prop_assert_eq!(&x.members, &y.members);
            for (r, s) in x.reports.iter().zip(&y.reports) {
                prop_assert!((r.statistic - s.statistic).abs() <= 1e-8 * r.statistic.max(1.0));
            }
        }

        #[test]
        fn higher_level_nests(gaps in proptest::collection::vec(0.01f64..3.0, 9..14)) {
            let mut e = vec![10.0];
            for g in &gaps {
                let last = *e.last().unwrap();
                e.push(last - g);
            }
            let t = table();
            let lo = confidence_set(&e, 7, &t, 0.95, KmaxConvention::Include).unwrap();
            let hi = confidence_set(&e, 7, &t, 0.99, KmaxConvention::Include).unwrap();
            prop_assert!(lo.members.is_subset(&hi.members));
        }
    }
}
