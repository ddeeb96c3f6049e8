//! Right-hand sides of the eight band/gap inequalities and their slack
//! against a computed spectrum.
//!
//! With `G = 4 (a_1 ... a_p)^{1/p}`, `m = min a`, `M = max a`:
//!
//! | id     | inequality                                        |
//! |--------|---------------------------------------------------|
//! | `rad`  | `r >= G`                                          |
//! | `mes`  | `sum |sigma_i| <= G`                              |
//! | `mes1` | `sum |sigma_i| <= 4m`                             |
//! | `est`  | `sum |gamma_i| >= G - 4m`                         |
//! | `est2` | `sum |gamma_i| >= 2M - 4m`                        |
//! | `est4` | `sum |gamma_i| >= (2/p)(M - m)`                   |
//! | `estb` | `sum |gamma_i| >= max b - min b`                  |
//! | `estc` | `sum |gamma_i| >= max(max(G, 2M) - 4m, max b - min b)` |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bands::Spectrum;
use crate::error::Error;
use crate::instance::PeriodicJacobi;

/// Default relative tolerance; the absolute threshold is `tol * (1 + r)`.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityId {
    Rad,
    Mes,
    Mes1,
    Est,
    Est2,
    Est4,
    Estb,
    Estc,
}

impl InequalityId {
    pub const ALL: [InequalityId; 8] =
        [Self::Rad, Self::Mes, Self::Mes1, Self::Est, Self::Est2, Self::Est4, Self::Estb, Self::Estc];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rad => "rad",
            Self::Mes => "mes",
            Self::Mes1 => "mes1",
            Self::Est => "est",
            Self::Est2 => "est2",
            Self::Est4 => "est4",
            Self::Estb => "estb",
            Self::Estc => "estc",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Rad => "r >= 4 (a_1...a_p)^(1/p)",
            Self::Mes => "band measure <= 4 (a_1...a_p)^(1/p)",
            Self::Mes1 => "band measure <= 4 min a",
            Self::Est => "gap measure >= 4 (a_1...a_p)^(1/p) - 4 min a",
            Self::Est2 => "gap measure >= 2 max a - 4 min a",
            Self::Est4 => "gap measure >= (2/p)(max a - min a)",
            Self::Estb => "gap measure >= max b - min b",
            Self::Estc => "gap measure >= max(max(4 (a_1...a_p)^(1/p), 2 max a) - 4 min a, max b - min b)",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown inequality id {s:?}")))
    }
}

/// Right-hand sides, depending only on the instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRhs {
    pub geomean4: f64,
    pub min4: f64,
    pub max2: f64,
    pub rhs_rad: f64,
    pub rhs_mes: f64,
    pub rhs_mes1: f64,
    pub rhs_est: f64,
    pub rhs_est2: f64,
    pub rhs_est4: f64,
    pub rhs_estb: f64,
    pub rhs_estc: f64,
}

impl EstimateRhs {
    pub fn get(&self, id: InequalityId) -> f64 {
        match id {
            InequalityId::Rad => self.rhs_rad,
            InequalityId::Mes => self.rhs_mes,
            InequalityId::Mes1 => self.rhs_mes1,
            InequalityId::Est => self.rhs_est,
            InequalityId::Est2 => self.rhs_est2,
            InequalityId::Est4 => self.rhs_est4,
            InequalityId::Estb => self.rhs_estb,
            InequalityId::Estc => self.rhs_estc,
        }
    }
}

pub fn estimate_rhs(j: &PeriodicJacobi) -> EstimateRhs {
    let p = j.period() as f64;
    let (min_a, max_a) = (j.min_a(), j.max_a());
    let geomean4 = 4.0 * j.geometric_mean_a();
    let min4 = 4.0 * min_a;
    let max2 = 2.0 * max_a;
    let b_osc = j.max_b() - j.min_b();
    EstimateRhs {
        geomean4,
        min4,
        max2,
        rhs_rad: geomean4,
        rhs_mes: geomean4,
        rhs_mes1: min4,
        rhs_est: geomean4 - min4,
        rhs_est2: max2 - min4,
        rhs_est4: (2.0 / p) * (max_a - min_a),
        rhs_estb: b_osc,
        rhs_estc: (geomean4.max(max2) - min4).max(b_osc),
    }
}

/// One checked inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    /// Nonnegative when the inequality holds.
    pub slack: f64,
    pub holds: bool,
}

/// Comparison against the older bound `p^2 sqrt(p) max |gamma_i| >= max a - min a`.
/// Informational only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxGapComparison {
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    #[serde(flatten)]
    pub rhs: EstimateRhs,
    pub r: f64,
    pub band_measure: f64,
    pub gap_measure: f64,
    pub tolerance: f64,
    pub checks: Vec<InequalityCheck>,
    pub violated: Vec<InequalityId>,
    pub max_gap_comparison: MaxGapComparison,
}

impl EstimateReport {
    pub fn slack(&self, id: InequalityId) -> f64 {
        self.check(id).slack
    }

    pub fn check(&self, id: InequalityId) -> &InequalityCheck {
        self.checks.iter().find(|c| c.id == id).expect("every inequality is checked")
    }

    /// Smallest slack over all eight inequalities.
    pub fn min_slack(&self) -> (InequalityId, f64) {
        self.checks.iter().map(|c| (c.id, c.slack)).min_by(|x, y| x.1.total_cmp(&y.1)).expect("nonempty")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["p".to_string(), "r".into(), "band_measure".into(), "gap_measure".into()];
        for id in InequalityId::ALL {
            cols.push(format!("rhs_{id}"));
        }
        for id in InequalityId::ALL {
            cols.push(format!("slack_{id}"));
        }
        cols.push("violated".into());
        cols.join(",")
    }

    pub fn csv_row(&self, p: usize) -> String {
        use crate::report::fmt_num;
        let mut cols =
            vec![p.to_string(), fmt_num(self.r), fmt_num(self.band_measure), fmt_num(self.gap_measure)];
        cols.extend(InequalityId::ALL.iter().map(|id| fmt_num(self.rhs.get(*id))));
        cols.extend(InequalityId::ALL.iter().map(|id| fmt_num(self.slack(*id))));
        cols.push(self.violated.iter().map(|id| id.as_str()).collect::<Vec<_>>().join(";"));
        cols.join(",")
    }
}

/// Checks all eight inequalities for `j` against its spectrum `s`.
///
/// A slack below `-rel_tol * (1 + r)` is a violation. The inequalities are
/// theorems, so a violation points at a numerical defect.
pub fn check_estimates(j: &PeriodicJacobi, s: &Spectrum, rel_tol: f64) -> EstimateReport {
    let rhs = estimate_rhs(j);
    let sum = &s.summary;
    let tolerance = rel_tol * (1.0 + sum.radius_r);

    let checks: Vec<InequalityCheck> = InequalityId::ALL
        .iter()
        .map(|&id| {
            let r = rhs.get(id);
            let (lhs, slack) = match id {
                InequalityId::Rad => (sum.radius_r, sum.radius_r - r),
                InequalityId::Mes | InequalityId::Mes1 => (sum.band_measure, r - sum.band_measure),
                _ => (sum.gap_measure, sum.gap_measure - r),
            };
            InequalityCheck { id, lhs, rhs: r, slack, holds: slack >= -tolerance }
        })
        .collect();
    let violated = checks.iter().filter(|c| !c.holds).map(|c| c.id).collect();

    let p = j.period() as f64;
    EstimateReport {
        rhs,
        r: sum.radius_r,
        band_measure: sum.band_measure,
        gap_measure: sum.gap_measure,
        tolerance,
        checks,
        violated,
        max_gap_comparison: MaxGapComparison {
            lhs: p * p * p.sqrt() * s.max_gap(),
            rhs: j.max_a() - j.min_a(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::band_structure;

    fn inst(a: &[f64], b: &[f64]) -> PeriodicJacobi {
        PeriodicJacobi::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn rhs_p2_example() {
        let r = estimate_rhs(&inst(&[1.0, 2.0], &[0.0, 0.0]));
        // Independent arithmetic: 4 sqrt(1 * 2) - 4 * 1.
        let expected = 4.0 * 2f64.sqrt() - 4.0;
        assert!((r.rhs_est - expected).abs() < 1e-14);
        assert!((r.rhs_est - 1.656_854_249_492_38).abs() < 1e-12);
        assert_eq!(r.rhs_est2, 0.0);
        assert_eq!(r.rhs_estb, 0.0);
        assert!((r.rhs_estc - expected).abs() < 1e-14);
        assert_eq!(r.rhs_est4, 1.0);
        assert_eq!(r.rhs_rad, r.rhs_mes);
    }

    #[test]
    fn rhs_free_case_vanishes() {
        let r = estimate_rhs(&PeriodicJacobi::free(5).unwrap());
        assert!(r.rhs_est.abs() < 1e-15);
        assert_eq!(r.rhs_est4, 0.0);
        assert_eq!(r.rhs_estb, 0.0);
        assert!(r.rhs_estc.abs() < 1e-15);
    }

    #[test]
    fn rhs_theorem_family_first_order() {
        for p in [2usize, 3, 4, 7] {
            let c = 1e-6;
            let mut a = vec![1.0; p];
            a[p - 1] = 1.0 - c;
            let r = estimate_rhs(&inst(&a, &vec![0.0; p]));
            let first_order = 4.0 * (p as f64 - 1.0) / p as f64 * c;
            assert!((r.rhs_est - first_order).abs() < 10.0 * c * c + 1e-15, "p={p}");
        }
    }

    #[test]
    fn check_p2_example() {
        let j = inst(&[1.0, 2.0], &[0.0, 0.0]);
        let rep = check_estimates(&j, &band_structure(&j).unwrap(), DEFAULT_RELATIVE_TOLERANCE);
        assert!(rep.violated.is_empty());
        assert!((rep.slack(InequalityId::Estc) - (2.0 - (4.0 * 2f64.sqrt() - 4.0))).abs() < 1e-12);
        assert!((rep.slack(InequalityId::Estc) - 0.343).abs() < 1e-3);
    }

    #[test]
    fn check_diagonal_equality_case() {
        let j = inst(&[0.1, 0.1], &[0.0, 1.0]);
        let rep = check_estimates(&j, &band_structure(&j).unwrap(), DEFAULT_RELATIVE_TOLERANCE);
        assert!(rep.violated.is_empty());
        assert_eq!(rep.slack(InequalityId::Estb), 0.0);
    }

    #[test]
    fn check_free_equality_case() {
        let j = PeriodicJacobi::free(4).unwrap();
        let rep = check_estimates(&j, &band_structure(&j).unwrap(), DEFAULT_RELATIVE_TOLERANCE);
        assert!(rep.violated.is_empty(), "{:?}", rep.violated);
        assert!(rep.gap_measure.abs() < 1e-12);
        assert!(rep.slack(InequalityId::Mes1).abs() < 1e-12);
        assert!((rep.band_measure - 4.0).abs() < 1e-12);
    }

    #[test]
    fn violation_is_reported() {
        // A spectrum that is too narrow for its couplings must trip `rad`.
        let j = inst(&[1.0, 2.0], &[0.0, 0.0]);
        let fake = Spectrum::from_sorted_edges(&[-1.0, -0.5, 0.5, 1.0]);
        let rep = check_estimates(&j, &fake, DEFAULT_RELATIVE_TOLERANCE);
        assert!(rep.violated.contains(&InequalityId::Rad));
        assert!(!rep.check(InequalityId::Rad).holds);
    }

    #[test]
    fn ids_round_trip_text() {
        for id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        }
        assert!("nope".parse::<InequalityId>().is_err());
        assert_eq!(serde_json::to_string(&InequalityId::Mes1).unwrap(), "\"mes1\"");
    }

    #[test]
    fn geometric_mean_bounds() {
        let j = inst(&[1e-3, 2.0, 7.0, 1e3], &[0.0; 4]);
        let r = estimate_rhs(&j);
        assert!(r.min4 <= r.geomean4 && r.geomean4 <= 4.0 * j.max_a());
    }
}
