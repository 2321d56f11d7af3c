//! Symmetry measurements on tensor-grid fields: evenness in x₁, foliated
//! Schwarz monotonicity, critical points and the sign of ∂u/∂x₁ on x₁ = 0.

use rayon::prelude::*;
use serde::Serialize;

use super::problem::PlanarField;
use crate::error::{invalid, Result};
use crate::radial::{RadialDomain, RadialSolution};

pub const DEFAULT_DIRECTIONS: usize = 360;

/// Values on a tensor grid, index i·ny + j, with a mask selecting the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    /// Center used for radii in the foliated-Schwarz test.
    pub center: [f64; 2],
}

impl GridField {
    pub fn at(&self, i: usize, j: usize) -> usize {
        i * self.y.len() + j
    }

    /// The u-values of a planar solution; the center is the middle of the rectangle.
    pub fn from_planar(field: &PlanarField) -> Self {
        let p = &field.problem;
        GridField {
            x: (0..=p.n1).map(|i| p.x1(i)).collect(),
            y: (0..=p.n2).map(|j| p.x2(j)).collect(),
            values: field.u.clone(),
            mask: vec![true; p.node_count()],
            center: [0.0, 0.5 * p.height],
        }
    }

    /// Samples f on the disk of the given radius, on a (2n+1)² grid centered at 0.
    pub fn on_disk(radius: f64, half_nodes: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let coords: Vec<f64> = (0..=2 * half_nodes)
            .map(|i| (i as f64 - half_nodes as f64) * radius / half_nodes as f64)
            .collect();
        let mut values = Vec::with_capacity(coords.len() * coords.len());
        let mut mask = Vec::with_capacity(values.capacity());
        for &x in &coords {
            for &y in &coords {
                let inside = x * x + y * y <= radius * radius;
                mask.push(inside);
                values.push(if inside { f(x, y) } else { 0.0 });
            }
        }
        GridField {
            x: coords.clone(),
            y: coords,
            values,
            mask,
            center: [0.0, 0.0],
        }
    }

    /// A radial profile spread over the plane section of its ball or annulus;
    /// u is linearly interpolated in r.
    pub fn from_radial(sol: &RadialSolution, half_nodes: usize) -> Self {
        let outer = sol.domain.outer();
        let inner = match sol.domain {
            RadialDomain::Ball { .. } => 0.0,
            RadialDomain::Annulus { inner, .. } => inner,
        };
        let h = sol.spacing();
        let r0 = sol.grid[0];
        let m = sol.grid.len() - 1;
        let interp = |r: f64| {
            let pos = ((r - r0) / h).max(0.0);
            let i = (pos.floor() as usize).min(m - 1);
            let t = (r - sol.grid[i]) / h;
            (1.0 - t) * sol.u[i] + t * sol.u[i + 1]
        };
        let mut g = GridField::on_disk(outer, half_nodes, |x, y| interp((x * x + y * y).sqrt()));
        for i in 0..g.x.len() {
            for j in 0..g.y.len() {
                let k = g.at(i, j);
                let r2 = g.x[i] * g.x[i] + g.y[j] * g.y[j];
                if r2 < inner * inner {
                    g.mask[k] = false;
                    g.values[k] = 0.0;
                }
            }
        }
        g
    }

    fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, m)| **m)
            .fold(0.0f64, |acc, (v, _)| acc.max(v.abs()))
    }

    fn spacing(&self) -> f64 {
        let dx = (self.x[self.x.len() - 1] - self.x[0]) / (self.x.len() - 1) as f64;
        let dy = (self.y[self.y.len() - 1] - self.y[0]) / (self.y.len() - 1) as f64;
        dx.max(dy)
    }

    /// Central-difference gradient where all four neighbours are in the domain.
    fn gradient(&self, i: usize, j: usize) -> Option<[f64; 2]> {
        let (nx, ny) = (self.x.len(), self.y.len());
        if i == 0 || j == 0 || i + 1 >= nx || j + 1 >= ny {
            return None;
        }
        let nb = [self.at(i - 1, j), self.at(i + 1, j), self.at(i, j - 1), self.at(i, j + 1)];
        if !self.mask[self.at(i, j)] || nb.iter().any(|&k| !self.mask[k]) {
            return None;
        }
        Some([
            (self.values[nb[1]] - self.values[nb[0]]) / (self.x[i + 1] - self.x[i - 1]),
            (self.values[nb[3]] - self.values[nb[2]]) / (self.y[j + 1] - self.y[j - 1]),
        ])
    }

    fn validate(&self) -> Result<()> {
        let n = self.x.len() * self.y.len();
        if self.x.len() < 3 || self.y.len() < 3 || self.values.len() != n || self.mask.len() != n {
            return invalid("grid field needs at least 3x3 nodes and matching value/mask arrays");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x1: f64,
    pub x2: f64,
    pub grad_norm: f64,
    /// Distance to the line through the center along the best direction.
    pub distance_to_axis: f64,
    /// |x₁|, the distance to the reflection line.
    pub distance_to_t: f64,
}

/// Sign of ∂u/∂x₁ on the mesh column x₁ = 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSignSummary {
    pub nodes: usize,
    pub positive: usize,
    pub negative: usize,
    /// |∂u/∂x₁| ≤ zero_tol
    pub zero: usize,
    pub zero_tol: f64,
    pub min: f64,
    pub max: f64,
    /// ∂u/∂x₁ ≥ −zero_tol somewhere on T.
    pub nonnegative_somewhere: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// max |u(x₁,x₂) − u(−x₁,x₂)| / max |u|
    pub even_deviation: f64,
    /// Smallest normalized monotonicity violation over the sampled directions.
    pub foliated_schwarz_deviation: f64,
    pub best_direction: [f64; 2],
    pub directions: usize,
    pub critical_epsilon: f64,
    pub critical_points: Vec<CriticalPoint>,
    pub t_derivative: Option<TSignSummary>,
}

fn even_deviation(g: &GridField, scale: f64) -> f64 {
    let nx = g.x.len();
    let mut worst = 0.0f64;
    for i in 0..nx {
        let mi = nx - 1 - i;
        for j in 0..g.y.len() {
            let (a, b) = (g.at(i, j), g.at(mi, j));
            if g.mask[a] && g.mask[b] {
                worst = worst.max((g.values[a] - g.values[b]).abs());
            }
        }
    }
    if scale > 0.0 {
        worst / scale
    } else {
        0.0
    }
}

/// Nodes grouped by distance to the center (within a relative tolerance).
fn radius_groups(g: &GridField) -> Vec<Vec<usize>> {
    let mut nodes: Vec<(f64, usize)> = Vec::new();
    for i in 0..g.x.len() {
        for j in 0..g.y.len() {
            let k = g.at(i, j);
            if g.mask[k] {
                let (dx, dy) = (g.x[i] - g.center[0], g.y[j] - g.center[1]);
                nodes.push(((dx * dx + dy * dy).sqrt(), k));
            }
        }
    }
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let rmax = nodes.last().map(|n| n.0).unwrap_or(0.0);
    let tol = 1e-9 * rmax.max(1e-300);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (r, k) in nodes {
        if r - last > tol || groups.is_empty() {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(k);
        last = r;
    }
    groups.retain(|grp| grp.len() > 1);
    groups
}

fn schwarz_violation(g: &GridField, groups: &[Vec<usize>], xi: [f64; 2], scale: f64) -> f64 {
    let ny = g.y.len();
    let floor = 1e-12 * scale;
    let mut total = 0.0;
    for grp in groups {
        let mut pts: Vec<(f64, f64)> = grp
            .iter()
            .map(|&k| {
                let (i, j) = (k / ny, k % ny);
                let proj = (g.x[i] - g.center[0]) * xi[0] + (g.y[j] - g.center[1]) * xi[1];
                (proj, g.values[k])
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ptol = 1e-9 * pts.iter().fold(0.0f64, |m, p| m.max(p.0.abs())).max(1e-300);
        // levels of equal projection; each must not fall below anything before it
        let mut running_max = f64::NEG_INFINITY;
        let mut start = 0;
        while start < pts.len() {
            let mut end = start + 1;
            while end < pts.len() && pts[end].0 - pts[start].0 <= ptol {
                end += 1;
            }
            let level = &pts[start..end];
            let lo = level.iter().fold(f64::INFINITY, |m, p| m.min(p.1));
            let drop = running_max - lo;
            if drop > floor {
                total += drop;
            }
            running_max = level.iter().fold(running_max, |m, p| m.max(p.1));
            start = end;
        }
    }
    if scale > 0.0 {
        total / scale
    } else {
        0.0
    }
}

fn t_summary(g: &GridField, zero_tol: f64) -> Option<TSignSummary> {
    let nx = g.x.len();
    if nx % 2 == 0 {
        return None;
    }
    let i = nx / 2;
    let ptol = 1e-12 * (g.x[nx - 1] - g.x[0]).abs();
    if g.x[i].abs() > ptol {
        return None;
    }
    let mut s = TSignSummary {
        nodes: 0,
        positive: 0,
        negative: 0,
        zero: 0,
        zero_tol,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        nonnegative_somewhere: false,
    };
    for j in 0..g.y.len() {
        if let Some([d1, _]) = g.gradient(i, j) {
            s.nodes += 1;
            s.min = s.min.min(d1);
            s.max = s.max.max(d1);
            if d1.abs() <= zero_tol {
                s.zero += 1;
            } else if d1 > 0.0 {
                s.positive += 1;
            } else {
                s.negative += 1;
            }
        }
    }
    s.nonnegative_somewhere = s.nodes > 0 && s.max >= -zero_tol;
    Some(s)
}

/// All metrics with `directions` equally spaced unit vectors ξ.
pub fn symmetry_metrics(g: &GridField, directions: usize) -> Result<SymmetryReport> {
    g.validate()?;
    if directions == 0 {
        return invalid("need at least one direction");
    }
    let scale = g.max_abs();
    let groups = radius_groups(g);
    let scores: Vec<(f64, [f64; 2])> = (0..directions)
        .into_par_iter()
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / directions as f64;
            let xi = [th.cos(), th.sin()];
            (schwarz_violation(g, &groups, xi, scale), xi)
        })
        .collect();
    let (best, best_xi) = scores
        .iter()
        .fold((f64::INFINITY, [1.0, 0.0]), |acc, s| if s.0 < acc.0 { *s } else { acc });

    // A node is critical when |∇u| is a local minimum over its eight
    // neighbours and at most h·max|D²u|, the gradient a node can carry when a
    // true critical point lies within one cell.
    let (nx, ny) = (g.x.len(), g.y.len());
    let grads: Vec<Option<f64>> = (0..nx * ny)
        .map(|k| g.gradient(k / ny, k % ny).map(|d| d[0].hypot(d[1])))
        .collect();
    let mut grad_max = 0.0f64;
    let mut curvature = 0.0f64;
    for i in 1..nx.saturating_sub(1) {
        for j in 1..ny.saturating_sub(1) {
            if let Some(gn) = grads[g.at(i, j)] {
                grad_max = grad_max.max(gn);
                let c = g.values[g.at(i, j)];
                let hx = 0.5 * (g.x[i + 1] - g.x[i - 1]);
                let hy = 0.5 * (g.y[j + 1] - g.y[j - 1]);
                let uxx = (g.values[g.at(i + 1, j)] - 2.0 * c + g.values[g.at(i - 1, j)]) / (hx * hx);
                let uyy = (g.values[g.at(i, j + 1)] - 2.0 * c + g.values[g.at(i, j - 1)]) / (hy * hy);
                curvature = curvature.max(uxx.abs()).max(uyy.abs());
            }
        }
    }
    let eps = g.spacing() * curvature;
    let mut critical_points = Vec::new();
    for i in 1..nx.saturating_sub(1) {
        for j in 1..ny.saturating_sub(1) {
            let Some(norm) = grads[g.at(i, j)] else { continue };
            if norm > eps {
                continue;
            }
            let mut local_min = true;
            for (di, dj) in [(0, 1), (2, 1), (1, 0), (1, 2), (0, 0), (0, 2), (2, 0), (2, 2)] {
                match grads[g.at(i + di - 1, j + dj - 1)] {
                    Some(other) => local_min &= norm <= other,
                    None => local_min = false,
                }
            }
            if local_min {
                let (rx, ry) = (g.x[i] - g.center[0], g.y[j] - g.center[1]);
                critical_points.push(CriticalPoint {
                    x1: g.x[i],
                    x2: g.y[j],
                    grad_norm: norm,
                    distance_to_axis: (rx * best_xi[1] - ry * best_xi[0]).abs(),
                    distance_to_t: g.x[i].abs(),
                });
            }
        }
    }
    Ok(SymmetryReport {
        even_deviation: even_deviation(g, scale),
        foliated_schwarz_deviation: best,
        best_direction: best_xi,
        directions,
        critical_epsilon: eps,
        critical_points,
        t_derivative: t_summary(g, 1e-9 * grad_max.max(1e-300)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_field_is_symmetric_in_every_direction() {
        let g = GridField::on_disk(1.0, 20, |x, y| 1.0 - (x * x + y * y));
        let rep = symmetry_metrics(&g, 36).unwrap();
        assert_eq!(rep.even_deviation, 0.0);
        assert_eq!(rep.foliated_schwarz_deviation, 0.0);
        for k in 0..36 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 36.0;
            let groups = radius_groups(&g);
            assert_eq!(schwarz_violation(&g, &groups, [th.cos(), th.sin()], 1.0), 0.0);
        }
        // the maximum sits at the center
        assert!(rep.critical_points.iter().any(|c| c.x1 == 0.0 && c.x2 == 0.0));
    }

    #[test]
    fn constructed_asymmetry_is_detected() {
        let g = GridField::on_disk(1.0, 20, |x, y| y * (1.0 - (x * x + y * y).sqrt()) * (1.0 + x));
        let rep = symmetry_metrics(&g, 36).unwrap();
        assert!(rep.even_deviation > 0.1, "{}", rep.even_deviation);
    }

    #[test]
    fn axial_monotone_field_has_a_good_direction() {
        // η(r, x·ξ) increasing in x·ξ with ξ = (0, 1)
        let g = GridField::on_disk(1.0, 16, |x, y| (1.0 - (x * x + y * y)) * (2.0 + y));
        let rep = symmetry_metrics(&g, 360).unwrap();
        assert_eq!(rep.foliated_schwarz_deviation, 0.0);
        assert!(rep.best_direction[1] > 0.99, "{:?}", rep.best_direction);
    }

    #[test]
    fn t_column_sign() {
        let g = GridField::on_disk(1.0, 10, |x, y| (1.0 - (x * x + y * y)) * (2.0 + x));
        let t = symmetry_metrics(&g, 8).unwrap().t_derivative.unwrap();
        assert!(t.positive > 0 && t.nonnegative_somewhere);
    }
}
