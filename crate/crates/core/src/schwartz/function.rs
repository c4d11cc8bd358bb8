use std::io::Write;

use crate::algebra::{AlgebraElement, Group};
use crate::block::{self, C64, ZERO};
use crate::error::{LabError, Result};
use crate::schwartz::grid::Grid;

/// Number of outermost nodes inspected by the decay check.
pub const EDGE_NODES: usize = 4;

/// Matrix-valued samples on a grid, one `dim * dim` block per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    dim: usize,
    data: Vec<C64>,
}

impl SampledFunction {
    pub fn zeros(grid: &Grid, dim: usize) -> Self {
        Self {
            grid: *grid,
            dim,
            data: vec![ZERO; grid.points() * dim * dim],
        }
    }

    pub fn from_data(grid: &Grid, dim: usize, data: Vec<C64>) -> Result<Self> {
        let expected = grid.points() * dim * dim;
        if data.len() != expected {
            return Err(LabError::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        if !block::is_finite(&data) {
            return Err(LabError::InvalidInput("sample values must be finite".into()));
        }
        Ok(Self {
            grid: *grid,
            dim,
            data,
        })
    }

    pub fn from_fn(grid: &Grid, dim: usize, mut f: impl FnMut(f64) -> AlgebraElement) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.points() * dim * dim);
        for x in grid.nodes() {
            let v = f(x);
            if v.dim() != dim {
                return Err(LabError::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            data.extend_from_slice(v.as_slice());
        }
        Self::from_data(grid, dim, data)
    }

    /// `x -> f(x) a` for a scalar profile `f`.
    pub fn from_scalar(grid: &Grid, a: &AlgebraElement, mut f: impl FnMut(f64) -> C64) -> Self {
        let dim = a.dim();
        let mut data = Vec::with_capacity(grid.points() * dim * dim);
        for x in grid.nodes() {
            let s = f(x);
            data.extend(a.as_slice().iter().map(|z| z * s));
        }
        Self {
            grid: *grid,
            dim,
            data,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.points()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn block(&self, i: usize) -> &[C64] {
        let b = self.dim * self.dim;
        &self.data[i * b..(i + 1) * b]
    }

    pub(crate) fn block_mut(&mut self, i: usize) -> &mut [C64] {
        let b = self.dim * self.dim;
        &mut self.data[i * b..(i + 1) * b]
    }

    pub fn value(&self, i: usize) -> AlgebraElement {
        AlgebraElement::from_block(self.dim, self.block(i))
    }

    /// Node-wise operator norms.
    pub fn node_norms(&self) -> Vec<f64> {
        (0..self.len()).map(|i| block::op_norm(self.block(i), self.dim)).collect()
    }

    /// `sup_i ||f(x_i)||`.
    pub fn sup_norm(&self) -> f64 {
        self.node_norms().into_iter().fold(0.0, f64::max)
    }

    /// Ratio of the largest edge value to the largest value; zero for the zero function.
    pub fn edge_ratio(&self) -> f64 {
        let norms = self.node_norms();
        edge_ratio_1d(&norms)
    }

    /// Fails with [`LabError::DomainTruncation`] when the line truncation is not faithful.
    pub fn check_decay(&self, context: &str) -> Result<()> {
        self.check_decay_relative(context, 0.0)
    }

    /// Like [`Self::check_decay`], measuring edges against `max(sup, scale)`.
    /// Results that cancel to round-off are judged against the size of their inputs.
    pub fn check_decay_relative(&self, context: &str, scale: f64) -> Result<()> {
        if self.grid.group() == Group::Circle {
            return Ok(());
        }
        let norms = self.node_norms();
        let max = norms.iter().cloned().fold(scale, f64::max);
        let n = norms.len();
        let edge = norms[..EDGE_NODES].iter().chain(&norms[n - EDGE_NODES..]).cloned().fold(0.0, f64::max);
        let ratio = if max == 0.0 { 0.0 } else { edge / max };
        if ratio > self.grid.decay_tol() {
            return Err(LabError::DomainTruncation {
                context: context.to_string(),
                ratio,
                tolerance: self.grid.decay_tol(),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.dim != other.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid,
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            grid: self.grid,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// `sup_i ||f(x_i) - g(x_i)||`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }

    /// Node-wise `a f(x)`.
    pub fn left_mul(&self, a: &AlgebraElement) -> Result<Self> {
        self.check_element(a)?;
        let mut out = Self::zeros(&self.grid, self.dim);
        for i in 0..self.len() {
            block::mul(a.as_slice(), self.block(i), out.block_mut(i), self.dim);
        }
        Ok(out)
    }

    /// Node-wise `f(x) a`.
    pub fn right_mul(&self, a: &AlgebraElement) -> Result<Self> {
        self.check_element(a)?;
        let mut out = Self::zeros(&self.grid, self.dim);
        for i in 0..self.len() {
            block::mul(self.block(i), a.as_slice(), out.block_mut(i), self.dim);
        }
        Ok(out)
    }

    pub(crate) fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if a.dim() != self.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// CSV dump with columns `node,x,row,col,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| LabError::InvalidInput(format!("csv output failed: {e}"));
        w.write_record(["node", "x", "row", "col", "re", "im"]).map_err(io)?;
        let d = self.dim;
        for i in 0..self.len() {
            let x = self.grid.node(i);
            for (k, z) in self.block(i).iter().enumerate() {
                w.write_record([
                    i.to_string(),
                    x.to_string(),
                    (k / d).to_string(),
                    (k % d).to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| LabError::InvalidInput(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

pub(crate) fn edge_ratio_1d(norms: &[f64]) -> f64 {
    let max = norms.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let n = norms.len();
    let edge = norms[..EDGE_NODES]
        .iter()
        .chain(&norms[n - EDGE_NODES..])
        .cloned()
        .fold(0.0, f64::max);
    edge / max
}

/// Matrix-valued samples on the product grid, block `(i, j)` at `x_i, y_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSampledFunction {
    grid: Grid,
    dim: usize,
    data: Vec<C64>,
}

impl BiSampledFunction {
    pub fn zeros(grid: &Grid, dim: usize) -> Self {
        let n = grid.points();
        Self {
            grid: *grid,
            dim,
            data: vec![ZERO; n * n * dim * dim],
        }
    }

    pub fn from_data(grid: &Grid, dim: usize, data: Vec<C64>) -> Result<Self> {
        let n = grid.points();
        let expected = n * n * dim * dim;
        if data.len() != expected {
            return Err(LabError::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        if !block::is_finite(&data) {
            return Err(LabError::InvalidInput("sample values must be finite".into()));
        }
        Ok(Self {
            grid: *grid,
            dim,
            data,
        })
    }

    pub fn from_fn(grid: &Grid, dim: usize, mut f: impl FnMut(f64, f64) -> AlgebraElement) -> Result<Self> {
        let nodes = grid.nodes();
        let mut data = Vec::with_capacity(nodes.len() * nodes.len() * dim * dim);
        for &x in &nodes {
            for &y in &nodes {
                let v = f(x, y);
                if v.dim() != dim {
                    return Err(LabError::DimensionMismatch {
                        expected: dim,
                        found: v.dim(),
                    });
                }
                data.extend_from_slice(v.as_slice());
            }
        }
        Self::from_data(grid, dim, data)
    }

    /// `(x, y) -> f(x, y) a` for a scalar profile `f`.
    pub fn from_scalar(grid: &Grid, a: &AlgebraElement, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let dim = a.dim();
        let nodes = grid.nodes();
        let mut data = Vec::with_capacity(nodes.len() * nodes.len() * dim * dim);
        for &x in &nodes {
            for &y in &nodes {
                let s = f(x, y);
                data.extend(a.as_slice().iter().map(|z| z * s));
            }
        }
        Self {
            grid: *grid,
            dim,
            data,
        }
    }

    /// `(x, y) -> f(x) g(y)`.
    pub fn outer(f: &SampledFunction, g: &SampledFunction) -> Result<Self> {
        f.ensure_compatible(g)?;
        let grid = *f.grid();
        let d = f.dim();
        let mut out = Self::zeros(&grid, d);
        let n = grid.points();
        for i in 0..n {
            for j in 0..n {
                block::mul(f.block(i), g.block(j), out.block_mut(i, j), d);
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.grid.points()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn block(&self, i: usize, j: usize) -> &[C64] {
        let b = self.dim * self.dim;
        let at = (i * self.grid.points() + j) * b;
        &self.data[at..at + b]
    }

    pub(crate) fn block_mut(&mut self, i: usize, j: usize) -> &mut [C64] {
        let b = self.dim * self.dim;
        let at = (i * self.grid.points() + j) * b;
        &mut self.data[at..at + b]
    }

    pub fn value(&self, i: usize, j: usize) -> AlgebraElement {
        AlgebraElement::from_block(self.dim, self.block(i, j))
    }

    pub fn sup_norm(&self) -> f64 {
        let b = self.dim * self.dim;
        self.data
            .chunks(b)
            .map(|c| block::op_norm(c, self.dim))
            .fold(0.0, f64::max)
    }

    /// Largest edge value over the largest value, across all four edges.
    pub fn edge_ratio(&self) -> f64 {
        let (edge, max) = self.edge_and_max();
        if max == 0.0 {
            0.0
        } else {
            edge / max
        }
    }

    fn edge_and_max(&self) -> (f64, f64) {
        let n = self.grid.points();
        let d = self.dim;
        let mut max = 0.0f64;
        let mut edge = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = block::op_norm(self.block(i, j), d);
                max = max.max(v);
                let on_edge = i < EDGE_NODES || i >= n - EDGE_NODES || j < EDGE_NODES || j >= n - EDGE_NODES;
                if on_edge {
                    edge = edge.max(v);
                }
            }
        }
        (edge, max)
    }

    pub fn check_decay(&self, context: &str) -> Result<()> {
        self.check_decay_relative(context, 0.0)
    }

    /// Like [`Self::check_decay`], measuring edges against `max(sup, scale)`.
    pub fn check_decay_relative(&self, context: &str, scale: f64) -> Result<()> {
        if self.grid.group() == Group::Circle {
            return Ok(());
        }
        let (edge, max) = self.edge_and_max();
        let max = max.max(scale);
        let ratio = if max == 0.0 { 0.0 } else { edge / max };
        if ratio > self.grid.decay_tol() {
            return Err(LabError::DomainTruncation {
                context: context.to_string(),
                ratio,
                tolerance: self.grid.decay_tol(),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.dim != other.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_matches(&self, f: &SampledFunction) -> Result<()> {
        self.grid.ensure_same(f.grid())?;
        if self.dim != f.dim() {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            grid: self.grid,
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            grid: self.grid,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }

    /// Multiplies every node by the scalar `w(x_i, y_j)`.
    pub fn weighted(&self, mut w: impl FnMut(f64, f64) -> C64) -> Self {
        let mut out = self.clone();
        let nodes = self.grid.nodes();
        let n = nodes.len();
        for i in 0..n {
            for j in 0..n {
                let s = w(nodes[i], nodes[j]);
                for z in out.block_mut(i, j) {
                    *z *= s;
                }
            }
        }
        out
    }

    /// CSV dump with columns `i,j,x,y,row,col,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| LabError::InvalidInput(format!("csv output failed: {e}"));
        w.write_record(["i", "j", "x", "y", "row", "col", "re", "im"]).map_err(io)?;
        let d = self.dim;
        let n = self.grid.points();
        for i in 0..n {
            for j in 0..n {
                for (k, z) in self.block(i, j).iter().enumerate() {
                    w.write_record([
                        i.to_string(),
                        j.to_string(),
                        self.grid.node(i).to_string(),
                        self.grid.node(j).to_string(),
                        (k / d).to_string(),
                        (k % d).to_string(),
                        z.re.to_string(),
                        z.im.to_string(),
                    ])
                    .map_err(io)?;
                }
            }
        }
        w.flush()
            .map_err(|e| LabError::InvalidInput(format!("csv output failed: {e}")))?;
        Ok(())
    }
}
