//! Gauss–Legendre panel quadrature on the disk with meshes graded toward
//! boundary singularities.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial from the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre `P_n(x)` and its derivative via the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A one-dimensional panel `[a, b]`.
pub type Panel = (f64, f64);

/// Maps reference Gauss–Legendre nodes onto a list of panels, returning
/// flattened `(node, weight)` pairs.
pub fn panel_nodes(panels: &[Panel], gl: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels.len() * gl.0.len());
    for &(a, b) in panels {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (&x, &w) in gl.0.iter().zip(&gl.1) {
            out.push((c + h * x, h * w));
        }
    }
    out
}

/// Geometrically decreasing offsets `w, w/2, ...` clamped at `floor`.
pub fn graded_offsets(w: f64, floor: f64) -> Vec<f64> {
    let mut out = vec![w];
    let mut x = w;
    while x > floor {
        x = (x / 2.0).max(floor);
        out.push(x);
    }
    out
}

/// Radial panels on `[0, 1]`: a bulk panel `[0, 1/2]`, then panels whose
/// distance to 1 halves down to `floor`, and a final sliver reaching 1.
pub fn radial_mesh(floor: f64) -> Vec<Panel> {
    let mut pts = vec![0.0, 0.5];
    let mut s = 0.5;
    while s > floor {
        s = (s / 2.0).max(floor);
        pts.push(1.0 - s);
    }
    pts.push(1.0);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Angular panels on `[0, 2π]`: breakpoints graded geometrically around
/// each center angle (window halfwidth `width` halving down to `floor`),
/// merged and sorted, with gaps larger than `gap` filled uniformly.
pub fn angular_mesh(centers: &[f64], width: f64, floor: f64, gap: f64) -> Vec<Panel> {
    let two_pi = 2.0 * PI;
    let mut brk: Vec<f64> = vec![0.0, two_pi];
    for &c in centers {
        let phi = c.rem_euclid(two_pi);
        brk.push(phi);
        for off in graded_offsets(width, floor) {
            brk.push((phi + off).rem_euclid(two_pi));
            brk.push((phi - off).rem_euclid(two_pi));
        }
    }
    brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    brk.dedup_by(|a, b| (*a - *b).abs() < 1e-16);

    let mut panels = Vec::new();
    for w in brk.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a > gap {
            let n = ((b - a) / gap).ceil() as usize;
            let h = (b - a) / n as f64;
            for k in 0..n {
                panels.push((a + k as f64 * h, a + (k + 1) as f64 * h));
            }
        } else if b > a + 1e-16 {
            panels.push((a, b));
        }
    }
    panels
}

/// Default gap for uniform fill between graded angular windows.
pub const ANGULAR_GAP: f64 = 2.0 * PI / 24.0;
/// Default graded window halfwidth around a pole angle.
pub const ANGULAR_WINDOW: f64 = 0.4;
/// Default grading floor (smallest panel scale).
pub const GRADING_FLOOR: f64 = 1e-13;

/// Quadrature resolution for disk integrals.
///
/// `radial` and `angular` are total node budgets in the spirit of an
/// `R x A` polar product grid; they are spread over the graded panel
/// meshes as per-panel Gauss–Legendre orders.
#[derive(Debug, Clone, Copy)]
pub struct QuadGrid {
    pub radial: usize,
    pub angular: usize,
    /// Integration restricted to `|z| <= 1 - boundary_margin` where an
    /// operation says so.
    pub boundary_margin: f64,
}

impl Default for QuadGrid {
    fn default() -> Self {
        QuadGrid { radial: 64, angular: 256, boundary_margin: 1e-6 }
    }
}

impl QuadGrid {
    pub fn new(radial: usize, angular: usize) -> Self {
        QuadGrid { radial, angular, ..Default::default() }
    }

    /// Gauss–Legendre order per radial panel.
    pub fn radial_order(&self) -> usize {
        (self.radial / 8).clamp(4, 24)
    }

    /// Gauss–Legendre order per angular panel.
    pub fn angular_order(&self) -> usize {
        (self.angular / 32).clamp(4, 24)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree-15 exactness: integral of x^14 over [-1,1] = 2/15
        let s: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gl_matches_known_five_point_values() {
        let (x, _) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((x[4] - 0.906_179_845_938_664).abs() < 1e-12);
    }

    #[test]
    fn disk_area_reproduced() {
        // Normalized area: integral of 2r dr * dphi/(2pi) over the disk = 1.
        let grid = QuadGrid::new(64, 256);
        let gl_r = gauss_legendre(grid.radial_order());
        let gl_a = gauss_legendre(grid.angular_order());
        let r_nodes = panel_nodes(&radial_mesh(GRADING_FLOOR), &gl_r);
        let a_panels = angular_mesh(&[0.0], ANGULAR_WINDOW, GRADING_FLOOR, ANGULAR_GAP);
        let a_nodes = panel_nodes(&a_panels, &gl_a);
        let sr: f64 = r_nodes.iter().map(|&(r, w)| w * 2.0 * r).sum();
        let sa: f64 = a_nodes.iter().map(|&(_, w)| w).sum::<f64>() / (2.0 * PI);
        assert!((sr * sa - 1.0).abs() < 1e-10, "area {}", sr * sa);
        assert!(r_nodes.iter().all(|&(_, w)| w > 0.0));
        assert!(a_nodes.iter().all(|&(_, w)| w > 0.0));
    }

    #[test]
    fn angular_mesh_covers_circle_once() {
        let panels = angular_mesh(&[1.3, 4.0], ANGULAR_WINDOW, 1e-10, ANGULAR_GAP);
        let total: f64 = panels.iter().map(|&(a, b)| b - a).sum();
        assert!((total - 2.0 * PI).abs() < 1e-9);
        for w in panels.windows(2) {
            assert!(w[0].1 <= w[1].0 + 1e-12);
        }
    }

    #[test]
    fn radial_mesh_reaches_floor() {
        let panels = radial_mesh(1e-13);
        assert_eq!(panels.first().unwrap().0, 0.0);
        assert_eq!(panels.last().unwrap().1, 1.0);
        let penultimate = panels[panels.len() - 2];
        assert!((1.0 - penultimate.1 - 1e-13).abs() < 1e-15);
    }
}
