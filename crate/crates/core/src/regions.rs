//! Convergence-region predicates and the `(ω, φ)` grid scanner.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::moments::{f_one_raw, MomentTransition};
use crate::params::PsoParams;
use crate::scalar::Scalar;
use crate::{linalg, moments};

pub const REGIONS_HEADER: &str =
    "omega,phi,f1,deterministic,lyapunov,mean_square,noisy_fht,pbest_convergence";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionVerdict<T> {
    pub deterministic: bool,
    pub lyapunov: bool,
    pub mean_square: bool,
    pub noisy_fht: bool,
    pub pbest_convergence: bool,
    pub f1: T,
}

/// `|ω| < 1` and `0 < φ1 + φ2 < 4(1 + ω)`.
pub fn in_deterministic_region<T: Scalar>(omega: T, phi1: T, phi2: T) -> bool {
    let sum = phi1 + phi2;
    omega.abs() < T::one() && sum > T::zero() && sum < T::lit(4.0) * (T::one() + omega)
}

/// `|ω| < 1`, `ω ≠ 0` and `φ1 + φ2 < 2(1 − 2|ω| + ω²)/(1 + ω)`.
pub fn in_lyapunov_region<T: Scalar>(omega: T, phi1: T, phi2: T) -> bool {
    let two = T::lit(2.0);
    omega.abs() < T::one()
        && omega != T::zero()
        && phi1 + phi2 < two * (T::one() - two * omega.abs() + omega * omega) / (T::one() + omega)
}

/// `0 ≤ ω < 1`, `φ1 + φ2 > 0` and `f(1) > 0`.
pub fn in_mean_square_region<T: Scalar>(omega: T, phi1: T, phi2: T) -> bool {
    omega >= T::zero()
        && omega < T::one()
        && phi1 + phi2 > T::zero()
        && f_one_raw(omega, phi1, phi2) > T::zero()
}

/// Mean-square and expectation conditions together with `f(1) > 1/3`.
/// The `δ ≤ ε` requirement concerns the run, not `(ω, φ)`, and is not checked.
pub fn in_noisy_fht_region<T: Scalar>(omega: T, phi1: T, phi2: T) -> bool {
    in_mean_square_region(omega, phi1, phi2)
        && in_deterministic_region(omega, phi1, phi2)
        && f_one_raw(omega, phi1, phi2) > T::lit(1.0 / 3.0)
}

/// `f(1) > max{φ1², φ2²}(1 + ω)/6` on top of the expectation and variance
/// conditions.
pub fn in_pbest_convergence_region<T: Scalar>(omega: T, phi1: T, phi2: T) -> bool {
    let bound = (phi1 * phi1).max(phi2 * phi2) * (T::one() + omega) / T::lit(6.0);
    in_mean_square_region(omega, phi1, phi2)
        && in_deterministic_region(omega, phi1, phi2)
        && f_one_raw(omega, phi1, phi2) > bound
}

pub fn classify<T: Scalar>(omega: T, phi1: T, phi2: T) -> RegionVerdict<T> {
    RegionVerdict {
        deterministic: in_deterministic_region(omega, phi1, phi2),
        lyapunov: in_lyapunov_region(omega, phi1, phi2),
        mean_square: in_mean_square_region(omega, phi1, phi2),
        noisy_fht: in_noisy_fht_region(omega, phi1, phi2),
        pbest_convergence: in_pbest_convergence_region(omega, phi1, phi2),
        f1: f_one_raw(omega, phi1, phi2),
    }
}

/// Cell `(i, j)` of a scan: `omega` indexes rows, `phi` columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell<T> {
    pub omega: T,
    pub phi: T,
    pub verdict: RegionVerdict<T>,
}

/// Row-major grid of cells on the diagonal `φ1 = φ2 = φ`.
#[derive(Debug, Clone)]
pub struct RegionGrid<T> {
    pub resolution: usize,
    pub omegas: Vec<T>,
    pub phis: Vec<T>,
    pub cells: Vec<RegionCell<T>>,
}

/// Cell centres `lo + (k + 1/2)(hi − lo)/resolution`: no sample sits on an
/// interval end point.
pub fn cell_centres<T: Scalar>(lo: T, hi: T, resolution: usize) -> Vec<T> {
    let width = (hi - lo) / T::from_usize(resolution).unwrap();
    (0..resolution)
        .map(|k| lo + (T::from_usize(k).unwrap() + T::lit(0.5)) * width)
        .collect()
}

pub fn scan_regions<T: Scalar>(
    omega_range: (T, T),
    phi_range: (T, T),
    resolution: usize,
) -> RegionGrid<T> {
    let omegas = cell_centres(omega_range.0, omega_range.1, resolution);
    let phis = cell_centres(phi_range.0, phi_range.1, resolution);
    let cells = omegas
        .par_iter()
        .flat_map_iter(|&omega| {
            phis.iter().map(move |&phi| RegionCell {
                omega,
                phi,
                verdict: classify(omega, phi, phi),
            })
        })
        .collect();
    RegionGrid {
        resolution,
        omegas,
        phis,
        cells,
    }
}

impl<T: Scalar> RegionGrid<T> {
    pub fn cell(&self, i: usize, j: usize) -> &RegionCell<T> {
        &self.cells[i * self.phis.len() + j]
    }

    /// Cells with `ω ∈ (0,1)` violating `lyapunov ⊆ mean_square ⊆ deterministic`.
    pub fn nesting_violations(&self) -> Vec<&RegionCell<T>> {
        self.cells
            .iter()
            .filter(|c| c.omega > T::zero() && c.omega < T::one())
            .filter(|c| {
                let v = &c.verdict;
                (v.lyapunov && !v.mean_square) || (v.mean_square && !v.deterministic)
            })
            .collect()
    }

    /// Cells violating `noisy_fht ⊆ mean_square`.
    pub fn noisy_violations(&self) -> Vec<&RegionCell<T>> {
        self.cells
            .iter()
            .filter(|c| c.verdict.noisy_fht && !c.verdict.mean_square)
            .collect()
    }
}

/// Comparison of `sign f(1)` against `ρ(second-moment block) < 1` on a grid.
#[derive(Debug, Clone)]
pub struct SpectralAgreement {
    pub cells: usize,
    pub agreements: usize,
    /// Disagreeing cells whose 4-neighbourhood contains the opposite `f(1)` sign.
    pub boundary_disagreements: usize,
    pub interior_disagreements: usize,
    /// Cells where power iteration failed to converge.
    pub not_converged: usize,
    /// Largest |power − cubic| over converged cells.
    pub max_cross_check_gap: f64,
    /// Cells where the asymmetric printing of `f(1)` disagrees with the spectrum.
    pub asymmetric_disagreements: usize,
}

impl SpectralAgreement {
    pub fn agreement_rate(&self) -> f64 {
        self.agreements as f64 / self.cells as f64
    }
}

/// Runs the typo-adjudication scan: for every cell the spectral radius of the
/// homogeneous second-moment block is computed by power iteration (with the
/// characteristic cubic as cross-check) and compared to `f(1) > 0`.
pub fn spectral_agreement(
    omega_range: (f64, f64),
    phi_range: (f64, f64),
    resolution: usize,
) -> SpectralAgreement {
    let omegas = cell_centres(omega_range.0, omega_range.1, resolution);
    let phis = cell_centres(phi_range.0, phi_range.1, resolution);
    struct Cell {
        f1_pos: bool,
        stable: Option<bool>,
        gap: f64,
        asym_pos: bool,
    }
    let cells: Vec<Cell> = omegas
        .par_iter()
        .flat_map_iter(|&omega| {
            phis.iter().map(move |&phi| {
                let params = PsoParams {
                    omega,
                    phi1: phi,
                    phi2: phi,
                    delta: 0.0,
                    alpha: 1.0,
                    epsilon: 1.0,
                    m: 1,
                    n: 1,
                };
                let block = MomentTransition::new(&params, 0.0, 0.0).second_moment_block();
                let power = moments::spectral_radius(&block).ok();
                let cubic = linalg::cubic_spectral_radius(&block).unwrap_or(f64::NAN);
                Cell {
                    f1_pos: f_one_raw(omega, phi, phi) > 0.0,
                    stable: power.map(|r| r < 1.0),
                    gap: power.map(|r| (r - cubic).abs()).unwrap_or(0.0),
                    asym_pos: moments::f_one_asymmetric(omega, phi, phi) > 0.0,
                }
            })
        })
        .collect();

    let (rows, cols) = (omegas.len(), phis.len());
    let mut out = SpectralAgreement {
        cells: cells.len(),
        agreements: 0,
        boundary_disagreements: 0,
        interior_disagreements: 0,
        not_converged: 0,
        max_cross_check_gap: 0.0,
        asymmetric_disagreements: 0,
    };
    for i in 0..rows {
        for j in 0..cols {
            let c = &cells[i * cols + j];
            out.max_cross_check_gap = out.max_cross_check_gap.max(c.gap);
            if c.stable.is_none() {
                out.not_converged += 1;
            }
            if let Some(stable) = c.stable {
                if c.asym_pos != stable {
                    out.asymmetric_disagreements += 1;
                }
            }
            if c.stable == Some(c.f1_pos) {
                out.agreements += 1;
                continue;
            }
            let neighbours = [
                (i.wrapping_sub(1), j),
                (i + 1, j),
                (i, j.wrapping_sub(1)),
                (i, j + 1),
            ];
            let straddles = neighbours
                .iter()
                .filter(|&&(a, b)| a < rows && b < cols)
                .any(|&(a, b)| cells[a * cols + b].f1_pos != c.f1_pos);
            if straddles {
                out.boundary_disagreements += 1;
            } else {
                out.interior_disagreements += 1;
            }
        }
    }
    out
}

/// `%.9g`-style rendering: nine significant digits, trailing zeros trimmed.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn write_regions_csv<T: Scalar>(grid: &RegionGrid<T>) -> String {
    let mut out = String::with_capacity(64 * (grid.cells.len() + 1));
    out.push_str(REGIONS_HEADER);
    out.push('\n');
    let b = |v: bool| if v { '1' } else { '0' };
    for c in &grid.cells {
        let v = &c.verdict;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_sig9(c.omega.to_f64_lossy()),
            fmt_sig9(c.phi.to_f64_lossy()),
            fmt_sig9(v.f1.to_f64_lossy()),
            b(v.deterministic),
            b(v.lyapunov),
            b(v.mean_square),
            b(v.noisy_fht),
            b(v.pbest_convergence),
        );
    }
    out
}

/// Nested-region rendering: one rectangle per cell, coloured by the innermost
/// region containing it. ω runs left to right, φ bottom to top.
pub fn render_regions_svg<T: Scalar>(grid: &RegionGrid<T>) -> String {
    const PLOT: f64 = 480.0;
    const MARGIN: f64 = 60.0;
    let rows = grid.omegas.len().max(1) as f64;
    let cols = grid.phis.len().max(1) as f64;
    let (cw, ch) = (PLOT / rows, PLOT / cols);
    let size = PLOT + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>"#
    );
    for (i, _) in grid.omegas.iter().enumerate() {
        for (j, _) in grid.phis.iter().enumerate() {
            let v = &grid.cell(i, j).verdict;
            let fill = if v.lyapunov {
                "#08306b"
            } else if v.pbest_convergence {
                "#2171b5"
            } else if v.noisy_fht {
                "#6baed6"
            } else if v.mean_square {
                "#c6dbef"
            } else if v.deterministic {
                "#f0f0f0"
            } else {
                continue;
            };
            let x = MARGIN + i as f64 * cw;
            let y = MARGIN + PLOT - (j as f64 + 1.0) * ch;
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
                cw + 0.01,
                ch + 0.01
            );
        }
    }
    let (w_lo, w_hi) = axis_span(&grid.omegas);
    let (p_lo, p_hi) = axis_span(&grid.phis);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="16" text-anchor="middle">ω</text>"#,
        MARGIN + PLOT / 2.0,
        size - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" font-size="16" text-anchor="middle">φ</text>"#,
        MARGIN + PLOT / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
        MARGIN + PLOT + 16.0,
        fmt_sig9(w_lo)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
        MARGIN + PLOT,
        MARGIN + PLOT + 16.0,
        fmt_sig9(w_hi)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        MARGIN + PLOT,
        fmt_sig9(p_lo)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        MARGIN + 4.0,
        fmt_sig9(p_hi)
    );
    svg.push_str("</svg>\n");
    svg
}

fn axis_span<T: Scalar>(centres: &[T]) -> (f64, f64) {
    match (centres.first(), centres.last()) {
        (Some(a), Some(b)) => (a.to_f64_lossy(), b.to_f64_lossy()),
        _ => (0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_examples() {
        assert!(in_deterministic_region(0.4, 1.5, 1.5));
        assert!(!in_deterministic_region(1.0, 1.0, 1.0));
        assert!(!in_deterministic_region(0.0, 2.0, 2.0));
    }

    #[test]
    fn lyapunov_examples() {
        assert!(!in_lyapunov_region(0.4, 1.5, 1.5));
        assert!(!in_lyapunov_region(0.0, 0.1, 0.1));
        assert!(in_lyapunov_region(0.1, 0.1, 0.1));
    }

    #[test]
    fn mean_square_examples() {
        assert!(in_mean_square_region(0.4, 1.5, 1.5));
        assert!(!in_mean_square_region(0.99, 2.0, 2.0));
        assert!(!in_mean_square_region(0.5, 0.0, 0.0));
    }

    #[test]
    fn noisy_examples() {
        assert!(in_noisy_fht_region(0.4, 1.5, 1.5));
        // f(1) ≈ 0.02 for tiny accelerations
        let f1 = f_one_raw(0.4, 0.01, 0.01);
        assert!(f1 < 1.0 / 3.0);
        assert!(!in_noisy_fht_region(0.4, 0.01, 0.01));
    }

    #[test]
    fn pbest_examples() {
        assert!(in_pbest_convergence_region(0.4, 1.5, 1.5));
        assert!(!in_pbest_convergence_region(0.4, 2.5, 2.5));
        // f(1) = 1 − 1/12 − 1/12 − 1/8 = 17/24 > 0.25/6
        assert!((f_one_raw(0.0_f64, 0.5, 0.5) - 17.0 / 24.0).abs() < 1e-15);
        assert!(in_pbest_convergence_region(0.0, 0.5, 0.5));
    }

    #[test]
    fn tiny_scan_has_four_cells() {
        let g = scan_regions((0.0, 1.0), (0.0, 4.0), 2);
        assert_eq!(g.cells.len(), 4);
        assert_eq!(g.omegas, vec![0.25, 0.75]);
        assert_eq!(g.phis, vec![1.0, 3.0]);
        let csv = write_regions_csv(&g);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with(REGIONS_HEADER));
    }

    #[test]
    fn single_point_matches_predicates() {
        let g = scan_regions((0.35, 0.45), (1.45, 1.55), 1);
        let c = g.cells[0];
        assert_eq!(c.verdict, classify(0.4, 1.5, 1.5));
    }

    #[test]
    fn mean_square_shrinks_near_unit_inertia() {
        let g = scan_regions((0.998, 1.0), (0.0, 4.0), 400);
        let last = g
            .cells
            .iter()
            .filter(|c| c.verdict.mean_square)
            .map(|c| c.phi)
            .fold(0.0, f64::max);
        let mid = scan_regions((0.5, 0.502), (0.0, 4.0), 400)
            .cells
            .iter()
            .filter(|c| c.verdict.mean_square)
            .map(|c| c.phi)
            .fold(0.0, f64::max);
        assert!(last < 0.02, "largest stable phi at omega≈0.999: {last}");
        assert!(mid > 1.0);
    }

    #[test]
    fn nesting_holds_on_moderate_grid() {
        let g = scan_regions((0.0, 1.0), (0.0, 4.0), 100);
        assert!(g.nesting_violations().is_empty());
        assert!(g.noisy_violations().is_empty());
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.645), "0.645");
        assert_eq!(fmt_sig9(0.00125), "0.00125");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(-2.0), "-2");
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig9(123456789012.0), "1.23456789e+11");
    }

    #[test]
    fn svg_has_axes() {
        let g = scan_regions((0.0, 1.0), (0.0, 4.0), 10);
        let svg = render_regions_svg(&g);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(">ω<") && svg.contains(">φ<"));
    }

    #[test]
    fn small_spectral_scan_agrees() {
        let a = spectral_agreement((0.0, 1.0), (0.0, 4.0), 40);
        assert_eq!(a.not_converged, 0);
        assert_eq!(a.interior_disagreements, 0);
        assert!(a.agreement_rate() > 0.99);
        assert!(a.asymmetric_disagreements > 0);
    }
}
