//! Transfer matrices, the discriminant `Delta(lambda)`, and the
//! discriminant-side route to band edges and dispersion curves.
//!
//! With `u_n = (y_n, y_{n-1})`, the recurrence
//! `a_{n-1} y_{n-1} + b_n y_n + a_n y_{n+1} = lambda y_n` becomes
//! `u_{n+1} = T_n(lambda) u_n` with
//!
//! ```text
//! T_n = [[(lambda - b_n) / a_n, -a_{n-1} / a_n],
//!        [1,                     0             ]]
//! ```
//!
//! `det T_n = a_{n-1} / a_n`, so the monodromy `M = T_{p-1} ... T_0` has
//! unit determinant. `Delta = tr M`; the spectrum is `{ |Delta| <= 2 }` and
//! the band edges are the `2p` roots of `Delta^2 = 4`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bands::{floquet_matrix, Boundary};
use crate::eigen::{sturm_bisect, tridiagonalize};
use crate::error::{Error, Result};
use crate::instance::PeriodicJacobi;

pub type Mat2 = [[f64; 2]; 2];

/// Periods above this use compensated products when forming the monodromy.
pub const COMPENSATED_PERIOD: usize = 64;

const MAX_BISECTIONS: usize = 200;

/// Single-site transfer matrix `T_n(lambda)` for `0 <= n < p`.
pub fn transfer_matrix(j: &PeriodicJacobi, n: usize, lambda: f64) -> Mat2 {
    assert!(n < j.period(), "site index {n} out of range");
    let an = j.a()[n];
    let prev = j.coupling(n as isize - 1);
    [[(lambda - j.b()[n]) / an, -prev / an], [1.0, 0.0]]
}

/// Monodromy matrix `T_{p-1}(lambda) ... T_0(lambda)`.
pub fn monodromy(j: &PeriodicJacobi, lambda: f64) -> Mat2 {
    let compensated = j.period() > COMPENSATED_PERIOD;
    let mut m: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    for n in 0..j.period() {
        let t = transfer_matrix(j, n, lambda);
        m = if compensated { mul_compensated(&t, &m) } else { mul(&t, &m) };
    }
    m
}

/// `Delta(lambda) = tr M(lambda)`.
pub fn discriminant(j: &PeriodicJacobi, lambda: f64) -> f64 {
    let m = monodromy(j, lambda);
    if j.period() > COMPENSATED_PERIOD {
        let (s, e) = two_sum(m[0][0], m[1][1]);
        s + e
    } else {
        m[0][0] + m[1][1]
    }
}

/// `Delta(lambda)` together with a first-order bound on its rounding
/// error, from the same product taken over entrywise absolute values.
pub fn discriminant_with_error_bound(j: &PeriodicJacobi, lambda: f64) -> (f64, f64) {
    let mut abs_m: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    for n in 0..j.period() {
        let t = transfer_matrix(j, n, lambda).map(|row| row.map(f64::abs));
        abs_m = mul(&t, &abs_m);
    }
    let growth = (4 * j.period() + 4) as f64 * f64::EPSILON;
    (discriminant(j, lambda), growth * (abs_m[0][0] + abs_m[1][1]))
}

/// `Delta'(lambda)` by forward differentiation of the monodromy product.
pub fn discriminant_slope(j: &PeriodicJacobi, lambda: f64) -> f64 {
    let mut m: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut dm: Mat2 = [[0.0; 2]; 2];
    for n in 0..j.period() {
        let t = transfer_matrix(j, n, lambda);
        let inv_a = 1.0 / j.a()[n];
        let tm = mul(&t, &dm);
        // T_n' has the single entry 1 / a_n in the top-left corner.
        dm = [[tm[0][0] + inv_a * m[0][0], tm[0][1] + inv_a * m[0][1]], tm[1]];
        m = mul(&t, &m);
    }
    dm[0][0] + dm[1][1]
}

/// Determinant with a single rounding of the cross term.
pub fn det(m: &Mat2) -> f64 {
    dot2(m[0][0], m[1][1], -m[0][1], m[1][0])
}

fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = x[r][0] * y[0][c] + x[r][1] * y[1][c];
        }
    }
    out
}

fn mul_compensated(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = dot2(x[r][0], y[0][c], x[r][1], y[1][c]);
        }
    }
    out
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `x1 * y1 + x2 * y2` in twice the working precision, rounded once.
#[inline]
fn dot2(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let p1 = x1 * y1;
    let e1 = x1.mul_add(y1, -p1);
    let p2 = x2 * y2;
    let e2 = x2.mul_add(y2, -p2);
    let (s, e3) = two_sum(p1, p2);
    s + (e1 + e2 + e3)
}

/// Search interval containing the whole spectrum with margin.
pub fn root_bracket(j: &PeriodicJacobi) -> (f64, f64) {
    let reach = 2.0 * j.max_a() + 1.0;
    (j.min_b() - reach, j.max_b() + reach)
}

/// Eigenvalues of the Dirichlet truncation on sites `0..p-1`, i.e. the
/// zeros of the lower-left monodromy entry. There is one in the closure of
/// each gap and `|Delta| >= 2` at each, so they split the real line into
/// `p` pieces holding exactly one band apiece.
pub fn dirichlet_eigenvalues(j: &PeriodicJacobi) -> Vec<f64> {
    let size = j.period() - 1;
    let diag = &j.b()[..size];
    let off = &j.a()[..size.saturating_sub(1)];
    let (lo, hi) = root_bracket(j);
    (0..size).map(|k| sturm_bisect(diag, off, k, lo, hi)).collect()
}

/// Bisects for a sign change of `f` on `[lo, hi]`, assuming `f(lo)` and
/// `f(hi)` have opposite signs; zero counts as positive.
fn bisect_sign(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, lo_positive: bool) -> f64 {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) >= 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Edges of the single band inside the piece `[lo, hi]`, whose ends lie
/// outside the spectrum (`|Delta| >= 2`) with opposite signs of `Delta`.
///
/// The zero of `Delta` in the piece is an interior point of the band; from
/// there `|Delta| - 2` is bisected outward toward each end. An end where
/// `|Delta|` is within rounding error of 2 is a closed-gap point (a double
/// root of `Delta^2 - 4`, where bisection would only resolve the square
/// root of the noise) and is itself the edge, unless `|Delta|` visibly
/// grows into the piece, in which case the touching band is the neighbour.
fn band_in_piece(j: &PeriodicJacobi, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (dlo, dhi) = (discriminant(j, lo), discriminant(j, hi));
    if (dlo > 0.0) == (dhi > 0.0) || dlo == 0.0 || dhi == 0.0 {
        return None;
    }
    let center = bisect_sign(|x| discriminant(j, x), lo, hi, dlo > 0.0);
    let outside = |x: f64| discriminant(j, x).abs() - 2.0;
    // `inward` is +1 at the lower end and -1 at the upper end.
    let touches = |x: f64, inward: f64| {
        let (d, err) = discriminant_with_error_bound(j, x);
        if d.abs() - 2.0 > err {
            return false;
        }
        let growth = inward * d.signum() * discriminant_slope(j, x) * (hi - lo);
        growth <= 1e3 * err
    };
    let lower = if touches(lo, 1.0) { lo } else { bisect_sign(outside, lo, center, true) };
    let upper = if touches(hi, -1.0) { hi } else { bisect_sign(outside, center, hi, false) };
    Some((lower, upper))
}

/// Band edges from the transfer-matrix discriminant alone.
///
/// The line is cut at the Dirichlet eigenvalues (Sturm bisection), leaving
/// one band per piece, and each band's edges are found by bisection on
/// `Delta`. A closed gap is a cut where `|Delta|` touches 2; both
/// neighbouring pieces report it, giving the double root.
///
/// Accurate while the monodromy entries stay moderate. With couplings
/// spread over several decades the products lose every significant digit
/// near the edges; [`band_edges_by_bisection`] is the robust route.
pub fn band_edges_by_transfer_matrix(j: &PeriodicJacobi) -> Result<Vec<f64>> {
    let p = j.period();
    let (lo, hi) = root_bracket(j);
    let mut cuts = Vec::with_capacity(p + 1);
    cuts.push(lo);
    cuts.extend(dirichlet_eigenvalues(j));
    cuts.push(hi);

    let mut edges = Vec::with_capacity(2 * p);
    for w in cuts.windows(2) {
        if let Some((x, y)) = band_in_piece(j, w[0], w[1]) {
            edges.push(x);
            edges.push(y);
        }
    }
    if edges.len() != 2 * p {
        return Err(Error::RootCountMismatch { found: edges.len(), expected: 2 * p });
    }
    edges.sort_by(f64::total_cmp);
    Ok(edges)
}

/// Number of roots of `Delta(x) = 2 cos k` with `x < lambda`.
///
/// The roots of `Delta = 2 cos k` are the eigenvalues of the Floquet matrix
/// `J(k)`, since `det(lambda - J(k)) = (a_0 ... a_{p-1}) (Delta(lambda) - 2 cos k)`.
/// The count is the number of negative pivots in a congruence of
/// `J(k) - lambda`: an `LDL^T` sweep over the open chain `0..p-1` followed by
/// the Schur complement of the last site, which carries the Bloch phase.
/// This evaluates the sign structure of `Delta - 2 cos k` without forming
/// the monodromy product, so it stays reliable where the product does not.
///
/// Near a closed gap (`k` in `{0, pi}` with `lambda` at a double root) the
/// Schur step cancels and only resolves about the square root of the
/// working precision; [`band_edges_by_bisection`] avoids that case.
pub fn level_count(j: &PeriodicJacobi, k: f64, lambda: f64) -> usize {
    let p = j.period();
    let (a, b) = (j.a(), j.b());
    let phase = Complex64::from_polar(1.0, k);
    let scale = a.iter().chain(b).fold(lambda.abs(), |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale * 1e-3;
    let nonzero = |d: f64| if d == 0.0 { -tiny } else { d };

    if p == 2 {
        let off = Complex64::new(a[0], 0.0) + phase * a[1];
        let d0 = nonzero(b[0] - lambda);
        let d1 = nonzero(b[1] - lambda - off.norm_sqr() / d0);
        return usize::from(d0 < 0.0) + usize::from(d1 < 0.0);
    }

    // Coupling column of the last site: the corner at row 0 and the chain
    // bond at row p-2.
    let corner = phase * a[p - 1];
    let mut count = 0;
    let mut pivot = 1.0;
    let mut w = Complex64::new(0.0, 0.0);
    let mut schur = b[p - 1] - lambda;
    for i in 0..p - 1 {
        let u = match i {
            0 => corner,
            _ if i == p - 2 => Complex64::new(a[p - 2], 0.0),
            _ => Complex64::new(0.0, 0.0),
        };
        if i == 0 {
            pivot = nonzero(b[0] - lambda);
            w = u;
        } else {
            let l = a[i - 1] / pivot;
            pivot = nonzero(b[i] - lambda - l * a[i - 1]);
            w = u - w * l;
        }
        if pivot < 0.0 {
            count += 1;
        }
        schur -= w.norm_sqr() / pivot;
    }
    count + usize::from(nonzero(schur) < 0.0)
}

/// `index`-th (0-based) root of `Delta = 2 cos k`, by bisection on
/// [`level_count`]. Used for `0 < k < pi`, where the roots lie strictly
/// inside the bands.
fn level_root(j: &PeriodicJacobi, k: f64, index: usize) -> f64 {
    let (mut lo, mut hi) = root_bracket(j);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if level_count(j, k, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All `2p` roots of `Delta^2 = 4` (the `p` roots of `Delta = 2` and the
/// `p` roots of `Delta = -2`), ascending, with multiplicity.
///
/// The roots of `Delta = +-2` are the eigenvalues of the real Floquet
/// matrices `J(0)` and `J(pi)`. Each matrix is reduced to tridiagonal form by
/// Householder reflections and its roots are isolated by Sturm counts and
/// bisected to full working precision. Both steps are backward stable, so
/// double roots at closed gaps come out twice with no special handling, and
/// the route shares nothing with the Jacobi-rotation eigensolver.
pub fn band_edges_by_bisection(j: &PeriodicJacobi) -> Result<Vec<f64>> {
    let p = j.period();
    let (lo, hi) = root_bracket(j);
    let mut edges = Vec::with_capacity(2 * p);
    for boundary in [Boundary::Periodic, Boundary::Antiperiodic] {
        let (diag, off) = tridiagonalize(&floquet_matrix(j, boundary));
        for index in 0..p {
            edges.push(sturm_bisect(&diag, &off, index, lo, hi));
        }
    }
    let inside = edges.iter().filter(|x| **x > lo && **x < hi).count();
    if inside != 2 * p {
        return Err(Error::RootCountMismatch { found: inside, expected: 2 * p });
    }
    edges.sort_by(f64::total_cmp);
    Ok(edges)
}

/// `lambda_i(k)`: the point of band `band` (1-based, ascending) where
/// `Delta = 2 cos k`, for `0 <= k <= pi`. It is the `band`-th root of that
/// level equation; at `k = 0` and `k = pi` it is a band edge.
pub fn dispersion(j: &PeriodicJacobi, band: usize, k: f64) -> Result<f64> {
    let p = j.period();
    if band == 0 || band > p {
        return Err(Error::BandIndexOutOfRange { index: band, p });
    }
    if !(0.0..=PI).contains(&k) {
        return Err(Error::MomentumOutOfRange(k));
    }
    if k == 0.0 || k == PI {
        let boundary = if k == 0.0 { Boundary::Periodic } else { Boundary::Antiperiodic };
        let (diag, off) = tridiagonalize(&floquet_matrix(j, boundary));
        let (lo, hi) = root_bracket(j);
        return Ok(sturm_bisect(&diag, &off, band - 1, lo, hi));
    }
    Ok(level_root(j, k, band - 1))
}

/// Dispersion curves sampled on a uniform `k`-grid over `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    pub k: Vec<f64>,
    /// `values[m][i]` is `lambda_{i+1}(k[m])`.
    pub values: Vec<Vec<f64>>,
}

pub fn dispersion_table(j: &PeriodicJacobi, kpoints: usize) -> Result<DispersionTable> {
    if kpoints < 2 {
        return Err(Error::InvalidConfig(format!("kpoints must be at least 2, got {kpoints}")));
    }
    let p = j.period();
    let mut k = Vec::with_capacity(kpoints);
    let mut values = Vec::with_capacity(kpoints);
    for m in 0..kpoints {
        let km = if m + 1 == kpoints { PI } else { PI * m as f64 / (kpoints - 1) as f64 };
        let row = (1..=p).map(|band| dispersion(j, band, km)).collect::<Result<Vec<_>>>()?;
        k.push(km);
        values.push(row);
    }
    Ok(DispersionTable { k, values })
}

impl DispersionTable {
    pub fn to_csv(&self) -> String {
        let p = self.values.first().map_or(0, Vec::len);
        let mut out = String::from("k");
        for i in 1..=p {
            out.push_str(&format!(",lambda_{i}"));
        }
        out.push('\n');
        for (k, row) in self.k.iter().zip(&self.values) {
            out.push_str(&crate::report::fmt_num(*k));
            for v in row {
                out.push(',');
                out.push_str(&crate::report::fmt_num(*v));
            }
            out.push('\n');
        }
        out
    }
}
