//! Uniform Cartesian grids: sampling, second-order finite-difference jets,
//! and the flux-form solver for `div(e^{2ξ} grad Ψ) = 0`.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::cquat::{CScalar, C_ZERO};
use crate::fields::{FieldError, JetSource, Point, Region, ScalarField};
use crate::jet::Jet2;

pub type NodeIndex = [usize; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),
    #[error("{} node(s) fall in the field's excluded set, first {:?}", nodes.len(), nodes.first())]
    NodeInExcludedSet { nodes: Vec<NodeIndex> },
    #[error("node {index:?} has no interior stencil")]
    BoundaryNode { index: NodeIndex },
    #[error("conjugate gradient stopped after {iterations} iterations at relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("coefficient e^(2ξ) = {value} at node {index:?} is not positive")]
    NonPositiveCoefficient { index: NodeIndex, value: f64 },
    #[error("ξ = {value} at node {index:?} is not real")]
    ComplexCoefficient { index: NodeIndex, value: CScalar },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed grid CSV: {0}")]
    Csv(String),
}

/// Node values on a uniform box grid, stored with the third index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    lo: Point,
    hi: Point,
    n: [usize; 3],
    values: Vec<CScalar>,
}

impl Grid3 {
    /// A zero-filled grid with `n[k] >= 3` nodes along axis `k`.
    pub fn new(lo: Point, hi: Point, n: [usize; 3]) -> Result<Self, GridError> {
        for k in 0..3 {
            if n[k] < 3 {
                return Err(GridError::InvalidGeometry(format!("axis {} has {} nodes (< 3)", k + 1, n[k])));
            }
            if !(lo[k] < hi[k]) {
                return Err(GridError::InvalidGeometry(format!("axis {}: [{}, {}]", k + 1, lo[k], hi[k])));
            }
        }
        Ok(Self { lo, hi, n, values: vec![C_ZERO; n[0] * n[1] * n[2]] })
    }

    pub fn cube(a: f64, b: f64, n: usize) -> Result<Self, GridError> {
        Self::new([a; 3], [b; 3], [n; 3])
    }

    pub fn lo(&self) -> Point {
        self.lo
    }

    pub fn hi(&self) -> Point {
        self.hi
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|k| (self.hi[k] - self.lo[k]) / (self.n[k] - 1) as f64)
    }

    /// Coordinate of node `i` along `axis`; the last node is exactly `hi`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.n[axis] {
            self.hi[axis]
        } else {
            self.lo[axis] + i as f64 * self.spacing()[axis]
        }
    }

    pub fn node(&self, idx: NodeIndex) -> Point {
        std::array::from_fn(|k| self.coord(k, idx[k]))
    }

    pub fn flat(&self, idx: NodeIndex) -> usize {
        (idx[0] * self.n[1] + idx[1]) * self.n[2] + idx[2]
    }

    pub fn unflat(&self, i: usize) -> NodeIndex {
        [i / (self.n[1] * self.n[2]), (i / self.n[2]) % self.n[1], i % self.n[2]]
    }

    pub fn get(&self, idx: NodeIndex) -> CScalar {
        self.values[self.flat(idx)]
    }

    pub fn set(&mut self, idx: NodeIndex, v: CScalar) {
        let i = self.flat(idx);
        self.values[i] = v;
    }

    pub fn values(&self) -> &[CScalar] {
        &self.values
    }

    pub fn indices(&self) -> impl Iterator<Item = NodeIndex> + '_ {
        (0..self.len()).map(|i| self.unflat(i))
    }

    pub fn is_interior(&self, idx: NodeIndex) -> bool {
        (0..3).all(|k| idx[k] >= 1 && idx[k] + 1 < self.n[k])
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = NodeIndex> + '_ {
        self.indices().filter(|&i| self.is_interior(i))
    }

    /// The box spanned by interior nodes; nearest-node snapping of any of
    /// its points lands on an interior node.
    pub fn interior_region(&self) -> Result<Region, FieldError> {
        let h = self.spacing();
        Region::new(std::array::from_fn(|k| self.lo[k] + h[k]), std::array::from_fn(|k| self.hi[k] - h[k]))
    }

    /// A copy of this geometry holding `field` at every node.
    pub fn sample(&self, field: &ScalarField) -> Result<Grid3, GridError> {
        let mut out = Grid3 { values: Vec::with_capacity(self.len()), ..self.clone() };
        let mut excluded = Vec::new();
        for idx in self.indices() {
            match field.value(self.node(idx)) {
                Ok(v) => out.values.push(v),
                Err(FieldError::EvalOutsideRegion { .. }) => {
                    excluded.push(idx);
                    out.values.push(C_ZERO);
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !excluded.is_empty() {
            return Err(GridError::NodeInExcludedSet { nodes: excluded });
        }
        Ok(out)
    }

    fn shifted(&self, idx: NodeIndex, axis: usize, delta: isize) -> NodeIndex {
        let mut j = idx;
        j[axis] = (idx[axis] as isize + delta) as usize;
        j
    }

    /// Central-difference jet at an interior node.
    pub fn fd_jet(&self, idx: NodeIndex) -> Result<Jet2, GridError> {
        if !self.is_interior(idx) {
            return Err(GridError::BoundaryNode { index: idx });
        }
        let h = self.spacing();
        let f0 = self.get(idx);
        let mut jet = Jet2::constant(f0);
        for a in 0..3 {
            let fp = self.get(self.shifted(idx, a, 1));
            let fm = self.get(self.shifted(idx, a, -1));
            jet.grad[a] = (fp - fm) / (2.0 * h[a]);
            jet.hess[a][a] = (fp - 2.0 * f0 + fm) / (h[a] * h[a]);
            for b in a + 1..3 {
                let at = |da: isize, db: isize| self.get(self.shifted(self.shifted(idx, a, da), b, db));
                let m = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[a] * h[b]);
                jet.hess[a][b] = m;
                jet.hess[b][a] = m;
            }
        }
        Ok(jet)
    }

    /// Nearest node to `p`, if within half a spacing on every axis.
    pub fn nearest_node(&self, p: Point) -> Result<NodeIndex, FieldError> {
        let h = self.spacing();
        let mut idx = [0usize; 3];
        for k in 0..3 {
            let t = ((p[k] - self.lo[k]) / h[k]).round();
            if !(t >= 0.0 && t <= (self.n[k] - 1) as f64) {
                return Err(FieldError::QueryOffNode { point: p });
            }
            idx[k] = t as usize;
            if (p[k] - self.coord(k, idx[k])).abs() > 0.5 * h[k] * (1.0 + 1e-12) {
                return Err(FieldError::QueryOffNode { point: p });
            }
        }
        Ok(idx)
    }

    /// CSV dump: header `x1,x2,x3,re,im`, one row per node, third index
    /// fastest.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x1,x2,x3,re,im")?;
        for idx in self.indices() {
            let p = self.node(idx);
            let v = self.get(idx);
            writeln!(w, "{},{},{},{},{}", p[0], p[1], p[2], v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads a dump written by [`Grid3::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Grid3, GridError> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| GridError::Csv("empty input".into()))?;
        let header = header.map_err(|e| GridError::Csv(e.to_string()))?;
        if header.trim() != "x1,x2,x3,re,im" {
            return Err(GridError::Csv(format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| GridError::Csv(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            let cols = cols.map_err(|e| GridError::Csv(format!("row {}: {e}", i + 2)))?;
            if cols.len() != 5 {
                return Err(GridError::Csv(format!("row {}: {} columns", i + 2, cols.len())));
            }
            rows.push(cols);
        }
        let distinct = |k: usize| {
            let mut v: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let axes = [distinct(0), distinct(1), distinct(2)];
        let n = [axes[0].len(), axes[1].len(), axes[2].len()];
        let lo = [axes[0][0], axes[1][0], axes[2][0]];
        let hi = [axes[0][n[0] - 1], axes[1][n[1] - 1], axes[2][n[2] - 1]];
        let mut grid = Grid3::new(lo, hi, n)?;
        if rows.len() != grid.len() {
            return Err(GridError::Csv(format!("{} rows for a {:?} grid", rows.len(), n)));
        }
        for (i, row) in rows.iter().enumerate() {
            let idx = grid.unflat(i);
            let p = grid.node(idx);
            if (0..3).any(|k| (p[k] - row[k]).abs() > 1e-9 * (1.0 + p[k].abs())) {
                return Err(GridError::Csv(format!("row {} is out of order", i + 2)));
            }
            grid.values[i] = CScalar::new(row[3], row[4]);
        }
        Ok(grid)
    }

    /// The grid as a field: jets from finite differences at the nearest
    /// node. Off-node and boundary queries fail.
    pub fn to_field(self: &Arc<Self>) -> ScalarField {
        ScalarField::from_source(Arc::new(GridField { grid: self.clone(), order: Vec::new() }))
    }
}

/// Derivative `d_{order[0]} d_{order[1]} ...` of a grid-backed field.
/// Entries that would need more than second differences are NaN.
struct GridField {
    grid: Arc<Grid3>,
    order: Vec<usize>,
}

impl JetSource for GridField {
    fn jet(&self, p: Point) -> Result<Jet2, FieldError> {
        let idx = self.grid.nearest_node(p)?;
        let fd = self.grid.fd_jet(idx).map_err(|e| match e {
            GridError::BoundaryNode { index } => FieldError::BoundaryNode { index },
            other => unreachable!("fd_jet: {other}"),
        })?;
        let nan = CScalar::new(f64::NAN, f64::NAN);
        Ok(match self.order.as_slice() {
            [] => fd,
            [k] => Jet2 { val: fd.grad[*k], grad: fd.hess[*k], hess: [[nan; 3]; 3] },
            [k, l] => Jet2 { val: fd.hess[*k][*l], grad: [nan; 3], hess: [[nan; 3]; 3] },
            _ => Jet2 { val: nan, grad: [nan; 3], hess: [[nan; 3]; 3] },
        })
    }

    fn partial(&self, axis: usize) -> ScalarField {
        let mut order = self.order.clone();
        order.push(axis);
        ScalarField::from_source(Arc::new(GridField { grid: self.grid.clone(), order }))
    }

    fn describe(&self) -> String {
        let d: String = self.order.iter().map(|k| format!("d{}", k + 1)).collect();
        format!("{d}grid{:?}", self.grid.n)
    }
}

/// `div(e^{2ξ} grad Ψ) = 0` in the box of `grid`, with Dirichlet data from
/// `boundary` on all six faces.
#[derive(Clone, Debug)]
pub struct TransportProblem {
    pub xi: ScalarField,
    pub grid: Grid3,
    pub boundary: ScalarField,
}

/// Symmetric sparse matrix in row-compressed form.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        let row = self.row_start[r]..self.row_start[r + 1];
        self.cols[row.clone()].iter().position(|&cc| cc == c).map(|i| self.vals[row.start + i]).unwrap_or(0.0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n)
            .all(|r| (self.row_start[r]..self.row_start[r + 1]).all(|i| self.entry(self.cols[i], r) == self.vals[i]))
    }

    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.n).all(|r| {
            let row = self.row_start[r]..self.row_start[r + 1];
            let (mut diag, mut off) = (0.0, 0.0);
            for i in row {
                if self.cols[i] == r {
                    diag += self.vals[i];
                } else {
                    off += self.vals[i].abs();
                }
            }
            diag >= off
        })
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut s = 0.0;
            for i in self.row_start[r]..self.row_start[r + 1] {
                s += self.vals[i] * x[self.cols[i]];
            }
            y[r] = s;
        }
    }
}

/// The assembled interior system `A psi = b` (split into real and
/// imaginary right-hand sides) and the bookkeeping to scatter it back.
#[derive(Debug, Clone)]
pub struct TransportSystem {
    pub matrix: SparseMatrix,
    pub rhs_re: Vec<f64>,
    pub rhs_im: Vec<f64>,
    /// Grid with boundary values filled in and interior zero.
    pub template: Grid3,
    /// `e^{2ξ}` at every node.
    pub coefficient: Vec<f64>,
    unknown_of: Vec<Option<usize>>,
}

fn nodal_coefficients(xi: &ScalarField, grid: &Grid3) -> Result<Vec<f64>, GridError> {
    let mut kappa = Vec::with_capacity(grid.len());
    for idx in grid.indices() {
        let x = xi.value(grid.node(idx))?;
        if x.im.abs() > 1e-12 * x.re.abs().max(1.0) {
            return Err(GridError::ComplexCoefficient { index: idx, value: x });
        }
        let value = (2.0 * x.re).exp();
        if !(value > 0.0 && value.is_finite()) {
            return Err(GridError::NonPositiveCoefficient { index: idx, value });
        }
        kappa.push(value);
    }
    Ok(kappa)
}

/// Flux-form 7-point assembly: for each interior node,
/// `sum_faces κ_face (Ψ_ctr - Ψ_nbr) / h^2 = 0` with `κ_face` the mean of
/// the nodal coefficients on both sides.
pub fn assemble_transport(problem: &TransportProblem) -> Result<TransportSystem, GridError> {
    let grid = &problem.grid;
    let kappa = nodal_coefficients(&problem.xi, grid)?;
    let mut template = grid.clone();
    let mut unknown_of = vec![None; grid.len()];
    let mut m = 0;
    for idx in grid.indices() {
        let i = grid.flat(idx);
        if grid.is_interior(idx) {
            unknown_of[i] = Some(m);
            m += 1;
            template.values[i] = C_ZERO;
        } else {
            template.values[i] = problem.boundary.value(grid.node(idx))?;
        }
    }

    let h = grid.spacing();
    let mut row_start = Vec::with_capacity(m + 1);
    let mut cols = Vec::with_capacity(7 * m);
    let mut vals = Vec::with_capacity(7 * m);
    let mut rhs_re = vec![0.0; m];
    let mut rhs_im = vec![0.0; m];
    for idx in grid.interior_indices() {
        let i = grid.flat(idx);
        let row = unknown_of[i].expect("interior");
        row_start.push(cols.len());
        let mut diag = 0.0;
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(6);
        for a in 0..3 {
            for d in [-1isize, 1] {
                let nb = grid.shifted(idx, a, d);
                let j = grid.flat(nb);
                let w = 0.5 * (kappa[i] + kappa[j]) / (h[a] * h[a]);
                diag += w;
                match unknown_of[j] {
                    Some(col) => entries.push((col, -w)),
                    None => {
                        let b = template.values[j];
                        rhs_re[row] += w * b.re;
                        rhs_im[row] += w * b.im;
                    }
                }
            }
        }
        entries.push((row, diag));
        entries.sort_by_key(|e| e.0);
        for (c, v) in entries {
            cols.push(c);
            vals.push(v);
        }
    }
    row_start.push(cols.len());
    let matrix = SparseMatrix { n: m, row_start, cols, vals };
    assert!(matrix.is_symmetric(), "transport matrix assembled asymmetric");
    Ok(TransportSystem { matrix, rhs_re, rhs_im, template, coefficient: kappa, unknown_of })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Plain conjugate gradient from `x = 0`, stopping at `||r|| <= tol ||b||`.
pub fn conjugate_gradient(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, CgStats), GridError> {
    let n = a.n;
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; n];
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok((x, CgStats { iterations: 0, relative_residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for it in 0..max_iters {
        let rel = rr.sqrt() / b_norm;
        if rel <= tol {
            return Ok((x, CgStats { iterations: it, relative_residual: rel }));
        }
        a.matvec(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    let rel = rr.sqrt() / b_norm;
    if rel <= tol {
        return Ok((x, CgStats { iterations: max_iters, relative_residual: rel }));
    }
    Err(GridError::NotConverged { iterations: max_iters, residual: rel })
}

pub const DEFAULT_TRANSPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct TransportOutcome {
    pub psi: Grid3,
    pub stats: CgStats,
    pub system: TransportSystem,
}

/// Solves the transport problem; `max_iters` defaults to ten times the
/// node count.
pub fn solve_transport(
    problem: &TransportProblem,
    tol: f64,
    max_iters: Option<usize>,
) -> Result<TransportOutcome, GridError> {
    let system = assemble_transport(problem)?;
    let max_iters = max_iters.unwrap_or(10 * problem.grid.len());
    let (re, mut stats) = conjugate_gradient(&system.matrix, &system.rhs_re, tol, max_iters)?;
    let im = if system.rhs_im.iter().any(|&b| b != 0.0) {
        let (im, s) = conjugate_gradient(&system.matrix, &system.rhs_im, tol, max_iters)?;
        stats.iterations += s.iterations;
        stats.relative_residual = stats.relative_residual.max(s.relative_residual);
        im
    } else {
        vec![0.0; re.len()]
    };
    let mut psi = system.template.clone();
    for (i, slot) in system.unknown_of.iter().enumerate() {
        if let Some(u) = slot {
            psi.values[i] = CScalar::new(re[*u], im[*u]);
        }
    }
    Ok(TransportOutcome { psi, stats, system })
}

pub fn transport_solve(problem: &TransportProblem, tol: f64, max_iters: Option<usize>) -> Result<Grid3, GridError> {
    Ok(solve_transport(problem, tol, max_iters)?.psi)
}

/// Net and gross flux of `e^{2ξ} grad Ψ` out of the node box
/// `[lo, hi]` (inclusive node indices), through the faces halfway to the
/// neighbouring nodes. Returns `(net, sum of |face flux|)`.
pub fn box_flux(psi: &Grid3, coefficient: &[f64], lo: NodeIndex, hi: NodeIndex) -> (f64, f64) {
    let h = psi.spacing();
    let (mut net, mut gross) = (0.0, 0.0);
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let area = h[b] * h[c];
        for (face, d) in [(lo[a], -1isize), (hi[a], 1)] {
            for ib in lo[b]..=hi[b] {
                for ic in lo[c]..=hi[c] {
                    let mut inside = [0; 3];
                    inside[a] = face;
                    inside[b] = ib;
                    inside[c] = ic;
                    let outside = psi.shifted(inside, a, d);
                    let (i, o) = (psi.flat(inside), psi.flat(outside));
                    let k = 0.5 * (coefficient[i] + coefficient[o]);
                    let flux = k * (psi.values[o].re - psi.values[i].re) / h[a] * area;
                    net += flux;
                    gross += flux.abs();
                }
            }
        }
    }
    (net, gross)
}
