//! Band/gap assembly from the `k = 0` and `k = pi` Floquet matrices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::discriminant::band_edges_by_bisection;
use crate::eigen::{symmetric_eigenvalues, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::instance::PeriodicJacobi;

/// Gaps shorter than this are reported as numerically closed.
pub const CLOSED_GAP_THRESHOLD: f64 = 1e-10;

/// The two real Bloch boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `k = 0`, `e^{ik} = 1`.
    Periodic,
    /// `k = pi`, `e^{ik} = -1`.
    Antiperiodic,
}

impl Boundary {
    pub fn from_k(k: f64) -> Result<Self> {
        if k == 0.0 {
            Ok(Self::Periodic)
        } else if k == PI {
            Ok(Self::Antiperiodic)
        } else {
            Err(Error::UnsupportedK(k))
        }
    }

    fn phase(self) -> f64 {
        match self {
            Self::Periodic => 1.0,
            Self::Antiperiodic => -1.0,
        }
    }
}

/// The `p x p` Floquet matrix `J(a, b, e^{ik})` at `k` in `{0, pi}`.
///
/// Diagonal `b`, off-diagonals `a[0..p-1]`, and the corner entries carry
/// `e^{ik} a[p-1]`. For `p = 2` the corner is the off-diagonal slot itself,
/// so the entry becomes `a[0] + e^{ik} a[1]`.
pub fn floquet_matrix(j: &PeriodicJacobi, boundary: Boundary) -> SymmetricMatrix {
    let p = j.period();
    let corner = boundary.phase() * j.a()[p - 1];
    SymmetricMatrix::from_upper_fn(p, |r, c| {
        let mut v = 0.0;
        if r == c {
            v += j.b()[r];
        }
        if c == r + 1 {
            v += j.a()[r];
        }
        if r == 0 && c == p - 1 {
            v += corner;
        }
        v
    })
    .expect("period is at least 2")
}

/// [`floquet_matrix`] addressed by the quasi-momentum value.
pub fn floquet_matrix_at(j: &PeriodicJacobi, k: f64) -> Result<SymmetricMatrix> {
    Ok(floquet_matrix(j, Boundary::from_k(k)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    pub length: f64,
}

impl Gap {
    pub fn is_numerically_closed(&self) -> bool {
        self.length < CLOSED_GAP_THRESHOLD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub radius_r: f64,
    pub band_measure: f64,
    pub gap_measure: f64,
}

/// `p` bands and `p - 1` gaps partitioning `[lambda_min, lambda_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bands: Vec<Band>,
    pub gaps: Vec<Gap>,
    pub summary: SpectrumSummary,
}

impl Spectrum {
    /// Builds the partition from `2p` ascending edges by pairing
    /// `(x_{2i-1}, x_{2i})` into bands.
    pub fn from_sorted_edges(edges: &[f64]) -> Self {
        assert!(edges.len() >= 2 && edges.len().is_multiple_of(2), "need an even number of edges");
        let bands: Vec<Band> = edges.chunks_exact(2).map(|w| Band { lo: w[0], hi: w[1] }).collect();
        let gaps: Vec<Gap> =
            bands.windows(2).map(|w| Gap { lo: w[0].hi, hi: w[1].lo, length: w[1].lo - w[0].hi }).collect();
        let lambda_min = edges[0];
        let lambda_max = edges[edges.len() - 1];
        let summary = SpectrumSummary {
            lambda_min,
            lambda_max,
            radius_r: lambda_max - lambda_min,
            band_measure: bands.iter().map(Band::length).sum(),
            gap_measure: gaps.iter().map(|g| g.length).sum(),
        };
        Self { bands, gaps, summary }
    }

    pub fn period(&self) -> usize {
        self.bands.len()
    }

    /// The `2p` edges in ascending order.
    pub fn edges(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|b| [b.lo, b.hi]).collect()
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().map(|g| g.length).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpectrumExport::from(self)).expect("spectrum serializes")
    }
}

/// Export shape `{"bands": [[lo, hi], ...], "gaps": [[lo, hi], ...], "gap_lengths", "r", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumExport {
    pub bands: Vec<[f64; 2]>,
    pub gaps: Vec<[f64; 2]>,
    pub gap_lengths: Vec<f64>,
    pub r: f64,
    pub band_measure: f64,
    pub gap_measure: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub numerically_closed_gaps: Vec<usize>,
}

impl From<&Spectrum> for SpectrumExport {
    fn from(s: &Spectrum) -> Self {
        Self {
            bands: s.bands.iter().map(|b| [b.lo, b.hi]).collect(),
            gaps: s.gaps.iter().map(|g| [g.lo, g.hi]).collect(),
            gap_lengths: s.gaps.iter().map(|g| g.length).collect(),
            r: s.summary.radius_r,
            band_measure: s.summary.band_measure,
            gap_measure: s.summary.gap_measure,
            lambda_min: s.summary.lambda_min,
            lambda_max: s.summary.lambda_max,
            numerically_closed_gaps: s
                .gaps
                .iter()
                .enumerate()
                .filter(|(_, g)| g.is_numerically_closed())
                .map(|(i, _)| i + 1)
                .collect(),
        }
    }
}

/// Eigenvalues of both Floquet matrices, merged ascending.
pub fn floquet_edges(j: &PeriodicJacobi) -> Result<Vec<f64>> {
    let mut edges = symmetric_eigenvalues(&floquet_matrix(j, Boundary::Periodic))?;
    edges.extend(symmetric_eigenvalues(&floquet_matrix(j, Boundary::Antiperiodic))?);
    edges.sort_by(f64::total_cmp);
    Ok(edges)
}

/// Band/gap structure of `j` via the eigensolver path.
pub fn band_structure(j: &PeriodicJacobi) -> Result<Spectrum> {
    Ok(Spectrum::from_sorted_edges(&floquet_edges(j)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub agree: bool,
    pub max_deviation: f64,
}

/// Compares eigensolver edges against the discriminant bisection oracle.
/// Disagreement, including an oracle failure, is reported, not raised.
pub fn cross_check(j: &PeriodicJacobi, tol: f64) -> CrossCheck {
    let (Ok(eig), Ok(oracle)) = (floquet_edges(j), band_edges_by_bisection(j)) else {
        return CrossCheck { agree: false, max_deviation: f64::INFINITY };
    };
    let max_deviation = eig.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    CrossCheck { agree: max_deviation <= tol, max_deviation }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(a: &[f64], b: &[f64]) -> PeriodicJacobi {
        PeriodicJacobi::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn floquet_matrix_free_p4_periodic() {
        let m = floquet_matrix(&PeriodicJacobi::free(4).unwrap(), Boundary::Periodic);
        assert_eq!(
            m.rows(),
            vec![
                vec![0.0, 1.0, 0.0, 1.0],
                vec![1.0, 0.0, 1.0, 0.0],
                vec![0.0, 1.0, 0.0, 1.0],
                vec![1.0, 0.0, 1.0, 0.0],
            ]
        );
        let m = floquet_matrix(&PeriodicJacobi::free(4).unwrap(), Boundary::Antiperiodic);
        assert_eq!(m.get(0, 3), -1.0);
        assert_eq!(m.get(3, 0), -1.0);
    }

    #[test]
    fn floquet_matrix_p2_overlap() {
        let j = inst(&[1.0, 2.0], &[0.0, 0.0]);
        let m = floquet_matrix_at(&j, PI).unwrap();
        assert_eq!(m.rows(), vec![vec![0.0, -1.0], vec![-1.0, 0.0]]);
        let m = floquet_matrix_at(&j, 0.0).unwrap();
        assert_eq!(m.rows(), vec![vec![0.0, 3.0], vec![3.0, 0.0]]);
    }

    #[test]
    fn floquet_matrix_p3_constant() {
        let j = inst(&[1.0; 3], &[5.0; 3]);
        let m = floquet_matrix(&j, Boundary::Periodic);
        assert_eq!(m.rows(), vec![vec![5.0, 1.0, 1.0], vec![1.0, 5.0, 1.0], vec![1.0, 1.0, 5.0]]);
        assert_eq!(floquet_matrix_at(&j, 1.0), Err(Error::UnsupportedK(1.0)));
    }

    #[test]
    fn band_structure_p2() {
        let s = band_structure(&inst(&[1.0, 2.0], &[0.0, 0.0])).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() < 1e-14;
        assert!(close(s.bands[0].lo, -3.0) && close(s.bands[0].hi, -1.0));
        assert!(close(s.bands[1].lo, 1.0) && close(s.bands[1].hi, 3.0));
        assert!(close(s.gaps[0].lo, -1.0) && close(s.gaps[0].hi, 1.0) && close(s.gaps[0].length, 2.0));
        assert!(close(s.summary.radius_r, 6.0));
        assert!(close(s.summary.band_measure, 4.0));
        assert!(close(s.summary.gap_measure, 2.0));
    }

    #[test]
    fn band_structure_free_p4() {
        let s = band_structure(&PeriodicJacobi::free(4).unwrap()).unwrap();
        let r2 = 2f64.sqrt();
        let want = [(-2.0, -r2), (-r2, 0.0), (0.0, r2), (r2, 2.0)];
        for (b, (lo, hi)) in s.bands.iter().zip(want) {
            assert!((b.lo - lo).abs() < 1e-13 && (b.hi - hi).abs() < 1e-13);
        }
        assert!(s.gaps.iter().all(|g| g.length.abs() < 1e-10 && g.is_numerically_closed()));
    }

    #[test]
    fn band_structure_weak_coupling_gap() {
        let s = band_structure(&inst(&[0.1, 0.1], &[0.0, 1.0])).unwrap();
        // k = pi matrix is diag(0, 1), so the gap is exactly [0, 1].
        assert_eq!(s.gaps[0].lo, 0.0);
        assert_eq!(s.gaps[0].hi, 1.0);
        assert_eq!(s.gaps[0].length, 1.0);
        let outer = (1.0 - 1.16f64.sqrt()) / 2.0;
        assert!((s.bands[0].lo - outer).abs() < 1e-14);
        assert!((s.bands[1].hi - (1.0 - outer)).abs() < 1e-14);
    }

    #[test]
    fn cross_check_examples() {
        let c = cross_check(&inst(&[1.0, 2.0], &[0.0, 0.0]), 1e-8);
        assert!(c.agree && c.max_deviation < 1e-10);
        assert!(cross_check(&PeriodicJacobi::free(6).unwrap(), 1e-8).agree);
    }

    #[test]
    fn spectrum_partition_invariants() {
        let j = inst(&[0.4, 2.5, 1.0, 0.9, 3.1], &[1.0, -1.0, 0.0, 2.0, 0.5]);
        let s = band_structure(&j).unwrap();
        assert_eq!(s.bands.len(), 5);
        assert_eq!(s.gaps.len(), 4);
        for (i, g) in s.gaps.iter().enumerate() {
            assert_eq!(s.bands[i].hi, g.lo);
            assert_eq!(g.hi, s.bands[i + 1].lo);
            assert!(g.length >= 0.0);
        }
        let sum = s.summary.band_measure + s.summary.gap_measure;
        assert!((sum - s.summary.radius_r).abs() < 1e-12 * (1.0 + s.summary.radius_r));
    }

    #[test]
    fn export_json_shape() {
        let s = band_structure(&inst(&[1.0, 2.0], &[0.0, 0.0])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["bands"].as_array().unwrap().len(), 2);
        assert_eq!(v["gaps"][0].as_array().unwrap().len(), 2);
        assert!((v["r"].as_f64().unwrap() - 6.0).abs() < 1e-13);
        assert!(v["band_measure"].is_number() && v["gap_measure"].is_number());
    }
}
