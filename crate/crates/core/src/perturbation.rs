//! The one-weak-bond family `a = (1, ..., 1, 1 - c)`, `b = 0`, and its
//! first-order perturbation picture.
//!
//! At `c = 0` the `k = 0` Floquet matrix is the free periodic matrix with
//! eigenvalues `2 cos(2 pi n / p)`; every interior level is double. The
//! perturbation `-c J_1` (ones in the two corners) splits each double level
//! by `c` times the eigenvalue split of the 2x2 matrix `H_n`, which is `4/p`
//! for every `n`. Each of the `p - 1` gaps therefore opens to `4c/p + o(c)`
//! and the gap measure is `4 (p - 1) c / p + o(c)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bands::band_structure;
use crate::error::{Error, Result};
use crate::estimates::estimate_rhs;
use crate::instance::PeriodicJacobi;
use crate::report::fmt_num;

/// Family parameters `(p, c)` with `p >= 2`, `0 < c < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Family {
    p: usize,
    c: f64,
}

impl Theorem1Family {
    pub fn new(p: usize, c: f64) -> Result<Self> {
        if p < 2 {
            return Err(Error::PeriodTooSmall(p));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::BadC(c));
        }
        Ok(Self { p, c })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn instance(&self) -> PeriodicJacobi {
        let mut a = vec![1.0; self.p];
        a[self.p - 1] = 1.0 - self.c;
        PeriodicJacobi::new(a, vec![0.0; self.p]).expect("0 < c < 1 keeps couplings positive")
    }
}

/// `a = (1, ..., 1, 1 - c)`, `b = 0`: the weak bond closes the period.
pub fn theorem1_instance(p: usize, c: f64) -> Result<PeriodicJacobi> {
    Ok(Theorem1Family::new(p, c)?.instance())
}

pub type Hermitian2 = [[Complex64; 2]; 2];

/// Closed form of the degenerate-level matrix for even `p` and
/// `1 <= n <= p/2 - 1`:
///
/// ```text
/// H_n = (1/p) [[cos(2 pi n (p-1)/p),      2 e^{ 2 pi i n (p+1)/p}],
///              [2 e^{-2 pi i n (p+1)/p},  cos(2 pi n (p-1)/p)    ]]
/// ```
pub fn h_matrix(p: usize, n: usize) -> Result<Hermitian2> {
    check_degenerate_index(p, n)?;
    let (pf, nf) = (p as f64, n as f64);
    let diag = Complex64::new((2.0 * PI * nf * (pf - 1.0) / pf).cos() / pf, 0.0);
    let off = Complex64::from_polar(2.0 / pf, 2.0 * PI * nf * (pf + 1.0) / pf);
    Ok([[diag, off], [off.conj(), diag]])
}

/// `H_n` rebuilt entry by entry as `v_r^* J_1 v_s` from the plane-wave
/// eigenvectors `v_{n1} = p^{-1/2} (e^{2 pi i n j/p})_j` and
/// `v_{n2} = p^{-1/2} (e^{-2 pi i n j/p})_j`, `j = 1..p`.
///
/// The off-diagonal modulus and the eigenvalue split agree with
/// [`h_matrix`]; the sandwich diagonal is `(2/p) cos(2 pi n / p)`, twice the
/// closed-form diagonal. Only the split feeds the gap law.
pub fn h_matrix_from_sandwich(p: usize, n: usize) -> Result<Hermitian2> {
    check_degenerate_index(p, n)?;
    let scale = 1.0 / (p as f64).sqrt();
    let wave = |sign: f64| -> Vec<Complex64> {
        (1..=p).map(|j| Complex64::from_polar(scale, sign * 2.0 * PI * (n * j) as f64 / p as f64)).collect()
    };
    let vs = [wave(1.0), wave(-1.0)];
    // J_1 couples the first and last site only.
    let sandwich = |u: &[Complex64], v: &[Complex64]| u[0].conj() * v[p - 1] + u[p - 1].conj() * v[0];
    let mut h = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            h[r][s] = sandwich(&vs[r], &vs[s]);
        }
    }
    Ok(h)
}

fn check_degenerate_index(p: usize, n: usize) -> Result<()> {
    if p < 4 || !p.is_multiple_of(2) {
        return Err(Error::IndexOutOfRange { index: n, p, reason: "p must be even and at least 4" });
    }
    if n == 0 || n > p / 2 - 1 {
        return Err(Error::IndexOutOfRange { index: n, p, reason: "n must lie in 1..=p/2-1" });
    }
    Ok(())
}

/// Ascending eigenvalues of a 2x2 Hermitian matrix.
pub fn hermitian2_eigenvalues(h: &Hermitian2) -> [f64; 2] {
    let mid = 0.5 * (h[0][0].re + h[1][1].re);
    let rad = (0.5 * (h[0][0].re - h[1][1].re)).hypot(h[0][1].norm());
    [mid - rad, mid + rad]
}

pub fn eigenvalue_split(h: &Hermitian2) -> f64 {
    let [lo, hi] = hermitian2_eigenvalues(h);
    hi - lo
}

/// First-order predictions for the family at `(p, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPrediction {
    pub predicted_gap_lengths: Vec<f64>,
    pub predicted_gap_sum: f64,
    pub predicted_extreme_shift_magnitude: f64,
    pub hn_offdiag_magnitude: f64,
}

/// First-order gap law. Unlike [`theorem1_instance`], `c = 0` is accepted
/// as the unperturbed limit where every prediction vanishes.
pub fn first_order_prediction(p: usize, c: f64) -> Result<PerturbationPrediction> {
    if p < 2 {
        return Err(Error::PeriodTooSmall(p));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::BadC(c));
    }
    let pf = p as f64;
    let single = 4.0 * c / pf;
    let predicted_gap_lengths = vec![single; p - 1];
    Ok(PerturbationPrediction {
        predicted_gap_sum: predicted_gap_lengths.iter().sum(),
        predicted_gap_lengths,
        predicted_extreme_shift_magnitude: 2.0 * c / pf,
        hn_offdiag_magnitude: 2.0 / pf,
    })
}

/// Measured first-order movement of the outer spectral edges,
/// `((lambda_max - 2) / c, (lambda_min + 2) / c)`.
pub fn extreme_edge_shifts(p: usize, c: f64) -> Result<(f64, f64)> {
    let s = band_structure(&theorem1_instance(p, c)?)?;
    Ok(((s.summary.lambda_max - 2.0) / c, (s.summary.lambda_min + 2.0) / c))
}

/// One row of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub p: usize,
    pub c: f64,
    pub gap_sum_measured: f64,
    pub gap_sum_predicted: f64,
    /// `measured / predicted`, tends to 1 as `c -> 0`.
    pub ratio: f64,
    pub rhs_est: f64,
    /// `max_i | |gamma_i| - 4c/p |`.
    pub max_single_gap_abs_err: f64,
}

/// Exact spectra of the family against the first-order law, one row per `c`.
pub fn theorem1_report(p: usize, c_values: &[f64]) -> Result<Vec<Theorem1Row>> {
    c_values
        .iter()
        .map(|&c| {
            let j = theorem1_instance(p, c)?;
            let s = band_structure(&j)?;
            let pred = first_order_prediction(p, c)?;
            let measured = s.summary.gap_measure;
            let max_single_gap_abs_err = s
                .gaps
                .iter()
                .zip(&pred.predicted_gap_lengths)
                .map(|(g, want)| (g.length - want).abs())
                .fold(0.0, f64::max);
            Ok(Theorem1Row {
                p,
                c,
                gap_sum_measured: measured,
                gap_sum_predicted: pred.predicted_gap_sum,
                ratio: measured / pred.predicted_gap_sum,
                rhs_est: estimate_rhs(&j).rhs_est,
                max_single_gap_abs_err,
            })
        })
        .collect()
}

pub const THEOREM1_CSV_HEADER: &str =
    "p,c,gap_sum_measured,gap_sum_predicted,ratio,rhs_est,max_single_gap_abs_err";

pub fn theorem1_csv(rows: &[Theorem1Row]) -> String {
    let mut out = String::from(THEOREM1_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.p,
            fmt_num(r.c),
            fmt_num(r.gap_sum_measured),
            fmt_num(r.gap_sum_predicted),
            fmt_num(r.ratio),
            fmt_num(r.rhs_est),
            fmt_num(r.max_single_gap_abs_err)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::{floquet_matrix, Boundary};
    use crate::eigen::symmetric_eigenvalues;

    #[test]
    fn instance_examples() {
        let j = theorem1_instance(4, 0.1).unwrap();
        assert_eq!(j.a(), &[1.0, 1.0, 1.0, 0.9]);
        assert_eq!(j.b(), &[0.0; 4]);
        assert_eq!(theorem1_instance(2, 0.5).unwrap().a(), &[1.0, 0.5]);
        assert_eq!(theorem1_instance(3, 1.0), Err(Error::BadC(1.0)));
        assert_eq!(theorem1_instance(3, 0.0), Err(Error::BadC(0.0)));
        assert_eq!(theorem1_instance(1, 0.5), Err(Error::PeriodTooSmall(1)));
    }

    #[test]
    fn h_matrix_p4() {
        let h = h_matrix(4, 1).unwrap();
        let eps = 1e-15;
        assert!(h[0][0].norm() < eps && h[1][1].norm() < eps);
        assert!((h[0][1] - Complex64::new(0.0, 0.5)).norm() < eps);
        assert!((h[1][0] - Complex64::new(0.0, -0.5)).norm() < eps);
        let [lo, hi] = hermitian2_eigenvalues(&h);
        assert!((lo + 0.5).abs() < eps && (hi - 0.5).abs() < eps);
        assert!((eigenvalue_split(&h) - 1.0).abs() < eps);
    }

    #[test]
    fn h_matrix_p6() {
        let h = h_matrix(6, 1).unwrap();
        assert!((h[0][0].re - 1.0 / 12.0).abs() < 1e-15);
        assert!((eigenvalue_split(&h) - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn h_matrix_offdiag_modulus() {
        for p in (4..=20).step_by(2) {
            for n in 1..p / 2 {
                assert!((h_matrix(p, n).unwrap()[0][1].norm() - 2.0 / p as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn h_matrix_index_errors() {
        assert!(matches!(h_matrix(5, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(h_matrix(2, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(h_matrix(8, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(h_matrix(8, 4), Err(Error::IndexOutOfRange { .. })));
        assert!(h_matrix(8, 3).is_ok());
    }

    #[test]
    fn sandwich_matches_closed_form_split() {
        for p in (4..=16).step_by(2) {
            for n in 1..p / 2 {
                let closed = h_matrix(p, n).unwrap();
                let sand = h_matrix_from_sandwich(p, n).unwrap();
                let pf = p as f64;
                assert!((sand[0][1].norm() - closed[0][1].norm()).abs() < 1e-14);
                assert!((eigenvalue_split(&sand) - eigenvalue_split(&closed)).abs() < 1e-14);
                assert!((sand[0][0].re - 2.0 * closed[0][0].re).abs() < 1e-14);
                assert!((sand[0][0].re - 2.0 / pf * (2.0 * PI * n as f64 / pf).cos()).abs() < 1e-14);
                assert!(sand[0][0].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn prediction_examples() {
        let pr = first_order_prediction(4, 0.01).unwrap();
        assert!((pr.predicted_gap_sum - 0.03).abs() < 1e-16);
        assert!(pr.predicted_gap_lengths.iter().all(|g| (g - 0.01).abs() < 1e-17));
        assert_eq!(pr.predicted_gap_lengths.len(), 3);
        assert_eq!(pr.hn_offdiag_magnitude, 0.5);

        let pr = first_order_prediction(2, 0.1).unwrap();
        assert!((pr.predicted_gap_sum - 0.2).abs() < 1e-16);

        let pr = first_order_prediction(8, 0.0).unwrap();
        assert!(pr.predicted_gap_lengths.iter().all(|g| *g == 0.0));
        assert_eq!(pr.predicted_gap_sum, 0.0);
        assert_eq!(pr.predicted_extreme_shift_magnitude, 0.0);
        assert_eq!(first_order_prediction(3, 1.0), Err(Error::BadC(1.0)));
    }

    #[test]
    fn report_p2_is_exact() {
        let rows = theorem1_report(2, &[0.01]).unwrap();
        assert!((rows[0].gap_sum_measured - 0.02).abs() < 1e-15);
        assert!((rows[0].ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_p4_ratio_converges() {
        let rows = theorem1_report(4, &[1e-2, 1e-3, 1e-4]).unwrap();
        let dev: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
        assert!(dev[0] < 5e-2 && dev[1] < dev[0] && dev[2] < dev[1], "{dev:?}");
        assert!(dev[2] < 1e-3);
    }

    #[test]
    fn report_odd_period() {
        let rows = theorem1_report(3, &[1e-3]).unwrap();
        assert!((rows[0].ratio - 1.0).abs() < 1e-2);
    }

    #[test]
    fn unperturbed_levels_are_cosines() {
        for p in 2..=12 {
            let j = PeriodicJacobi::free(p).unwrap();
            let got = symmetric_eigenvalues(&floquet_matrix(&j, Boundary::Periodic)).unwrap();
            let mut want: Vec<f64> = (0..p).map(|n| 2.0 * (2.0 * PI * n as f64 / p as f64).cos()).collect();
            want.sort_by(f64::total_cmp);
            for (x, y) in got.iter().zip(&want) {
                assert!((x - y).abs() < 1e-10, "p={p}");
            }
        }
    }

    #[test]
    fn extreme_edges_move_by_two_c_over_p() {
        for p in [2usize, 3, 4, 6] {
            let c = 1e-6;
            let (top, bottom) = extreme_edge_shifts(p, c).unwrap();
            let want = 2.0 / p as f64;
            assert!((top.abs() - want).abs() < 1e-4, "p={p} top={top}");
            assert!((bottom.abs() - want).abs() < 1e-4, "p={p} bottom={bottom}");
            // Weakening a bond pulls both outer edges inward.
            assert!(top < 0.0 && bottom > 0.0);
        }
    }

    #[test]
    fn csv_layout() {
        let csv = theorem1_csv(&theorem1_report(3, &[0.1, 0.01]).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], THEOREM1_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 7);
    }
}
