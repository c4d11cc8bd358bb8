//! The split exact sequence `0 -> S(G^2, A) -> S(G^2, A) -> S(G, A; alpha) -> 0`
//! and its tensor-product model: the isomorphism `I1`, the maps `j`, `m`,
//! `iota`, `pi`, the sections `rho` and the homotopies `beta`.

pub mod scalar;

use crate::algebra::{Action, AlgebraElement, Group};
use crate::block::{self, C64, ZERO};
use crate::crossed::{d_alpha, module_act_algebra, twisted_convolve_with, CrossedElement, NodePropagators, Quadrature, Side};
use crate::error::{LabError, Result};
use crate::schwartz::{
    differentiate, differentiate_bi_unchecked, spectral::SpectralCalculus, Axis, BiSampledFunction, Grid,
    SampledFunction, DEFAULT_MEAN_ZERO_TOL,
};

/// Default sharpness `a` of the bump `exp(-a / (1 - (t/r)^2))`.
pub const DEFAULT_BUMP_SHARPNESS: f64 = 16.0;

/// A smooth compactly supported profile with unit discrete mass.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    grid: Grid,
    radius: f64,
    sharpness: f64,
    values: Vec<f64>,
}

impl BumpFunction {
    /// `c exp(-a / (1 - (t/r)^2))` on `|t| < r`, with `c` fixed so that the
    /// rectangle rule gives mass one.
    pub fn new(grid: &Grid, radius: f64, sharpness: f64) -> Result<Self> {
        let max_radius = match grid.group() {
            Group::Line => 1.0,
            Group::Circle => 0.5,
        };
        if !(radius > 0.0 && radius <= max_radius) {
            return Err(LabError::InvalidInput(format!("bump radius must lie in (0, {max_radius}], got {radius}")));
        }
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(LabError::InvalidInput(format!("bump sharpness must be positive, got {sharpness}")));
        }
        let profile = |t: f64| {
            let u = t / radius;
            if u.abs() < 1.0 {
                (-sharpness / (1.0 - u * u)).exp()
            } else {
                0.0
            }
        };
        let raw: Vec<f64> = (0..grid.points())
            .map(|i| {
                let mut t = grid.node(i);
                if grid.group() == Group::Circle && t >= 0.5 {
                    t -= 1.0;
                }
                profile(t)
            })
            .collect();
        let mass: f64 = raw.iter().sum::<f64>() * grid.spacing();
        if mass <= 0.0 {
            return Err(LabError::InvalidInput("bump support contains no grid node".into()));
        }
        Ok(Self {
            grid: *grid,
            radius,
            sharpness,
            values: raw.into_iter().map(|v| v / mass).collect(),
        })
    }

    /// Radius 1 on the line, 1/4 on the circle.
    pub fn standard(grid: &Grid) -> Result<Self> {
        let radius = match grid.group() {
            Group::Line => 1.0,
            Group::Circle => 0.25,
        };
        Self::new(grid, radius, DEFAULT_BUMP_SHARPNESS)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at node `i`, zero for `None`.
    fn at(&self, i: Option<usize>) -> f64 {
        i.map_or(0.0, |i| self.values[i])
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn as_function(&self) -> SampledFunction {
        let data = self.values.iter().map(|&v| C64::new(v, 0.0)).collect();
        SampledFunction::from_data(&self.grid, 1, data).expect("finite bump values")
    }
}

/// A formal sum `sum_i F_i (x) G_i` over `A`, compared only through [`iso_i1`].
#[derive(Debug, Clone)]
pub struct TensorElement {
    terms: Vec<(CrossedElement, CrossedElement)>,
}

impl TensorElement {
    pub fn new(terms: Vec<(CrossedElement, CrossedElement)>) -> Result<Self> {
        let Some((first, _)) = terms.first() else {
            return Err(LabError::InvalidInput("a tensor needs at least one term".into()));
        };
        for (f, g) in &terms {
            first.ensure_compatible(f)?;
            first.ensure_compatible(g)?;
        }
        Ok(Self { terms })
    }

    pub fn single(f: CrossedElement, g: CrossedElement) -> Result<Self> {
        Self::new(vec![(f, g)])
    }

    pub fn terms(&self) -> &[(CrossedElement, CrossedElement)] {
        &self.terms
    }

    pub fn action(&self) -> &Action {
        self.terms[0].0.action()
    }

    pub fn grid(&self) -> &Grid {
        self.terms[0].0.grid()
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms)
    }

    /// Sum of the input norms `sum_i ||F_i|| ||G_i||`, the scale of bilinear residuals.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|(f, g)| f.sup_norm() * g.sup_norm()).sum()
    }

    /// `a o (F (x) G) = (a o F) (x) G`
    pub fn act_left_algebra(&self, a: &AlgebraElement) -> Result<Self> {
        self.map_terms(|f, g| Ok((module_act_algebra(Side::Left, a, f)?, g.clone())))
    }

    /// `(F (x) G) o a = F (x) (G o a)`
    pub fn act_right_algebra(&self, a: &AlgebraElement) -> Result<Self> {
        self.map_terms(|f, g| Ok((f.clone(), module_act_algebra(Side::Right, a, g)?)))
    }

    /// `H o (F (x) G) = (H *_alpha F) (x) G`
    pub fn act_left_crossed(&self, h: &CrossedElement, quad: Quadrature) -> Result<Self> {
        self.map_terms(|f, g| Ok((twisted_convolve_with(h, f, quad)?, g.clone())))
    }

    /// `(F (x) G) o H = F (x) (G *_alpha H)`
    pub fn act_right_crossed(&self, h: &CrossedElement, quad: Quadrature) -> Result<Self> {
        self.map_terms(|f, g| Ok((f.clone(), twisted_convolve_with(g, h, quad)?)))
    }

    fn map_terms(
        &self,
        mut op: impl FnMut(&CrossedElement, &CrossedElement) -> Result<(CrossedElement, CrossedElement)>,
    ) -> Result<Self> {
        let terms = self.terms.iter().map(|(f, g)| op(f, g)).collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }
}

/// `I1(F (x) G)(x, y) = alpha_{-x}(F(x)) G(y)`.
pub fn iso_i1(t: &TensorElement) -> BiSampledFunction {
    let grid = *t.grid();
    let d = t.action().dim();
    let n = grid.points();
    let mut props = NodePropagators::new(&grid, t.action());
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; n * d * d];
    let b = d * d;
    let mut prod = vec![ZERO; b];
    for (f, g) in t.terms() {
        for i in 0..n {
            props.backward(i, f.func().block(i), &mut moved[i * b..(i + 1) * b]);
        }
        for i in 0..n {
            for j in 0..n {
                block::mul(&moved[i * b..(i + 1) * b], g.func().block(j), &mut prod, d);
                for (o, p) in out.block_mut(i, j).iter_mut().zip(&prod) {
                    *o += p;
                }
            }
        }
    }
    out
}

/// `m(F (x) G) = F *_alpha G`.
pub fn tensor_m(t: &TensorElement, quad: Quadrature) -> Result<CrossedElement> {
    let mut acc: Option<CrossedElement> = None;
    for (f, g) in t.terms() {
        let p = twisted_convolve_with(f, g, quad)?;
        acc = Some(match acc {
            None => p,
            Some(a) => a.add(&p)?,
        });
    }
    Ok(acc.expect("nonempty tensor"))
}

/// `j(F (x) G) = F' (x) G - F (x) T((T^{-1} G)')`.
pub fn tensor_j(t: &TensorElement) -> Result<TensorElement> {
    let mut terms = Vec::with_capacity(2 * t.terms().len());
    for (f, g) in t.terms() {
        let df = CrossedElement::new(differentiate(f.func())?, f.action())?;
        terms.push((df, g.clone()));
        terms.push((f.scale(C64::new(-1.0, 0.0)), d_alpha(g)?));
    }
    TensorElement::new(terms)
}

fn check_bi(f: &BiSampledFunction, action: &Action) -> Result<()> {
    if f.grid().group() != action.group() {
        return Err(LabError::ActionMismatch(format!(
            "action on the {} used with a {} grid",
            action.group(),
            f.grid().group()
        )));
    }
    if f.dim() != action.dim() {
        return Err(LabError::DimensionMismatch {
            expected: action.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

/// `iota(F) = (d/dx - d/dy) F + alpha'_0(F)`.
pub fn map_iota(f: &BiSampledFunction, action: &Action) -> Result<BiSampledFunction> {
    check_bi(f, action)?;
    f.check_decay("iota")?;
    let dx = differentiate_bi_unchecked(f, Axis::X);
    let dy = differentiate_bi_unchecked(f, Axis::Y);
    let mut out = dx.sub(&dy)?;
    let d = f.dim();
    let mut gen = vec![ZERO; d * d];
    let n = f.points();
    for i in 0..n {
        for j in 0..n {
            action.derive_block(f.block(i, j), &mut gen);
            for (o, g) in out.block_mut(i, j).iter_mut().zip(&gen) {
                *o += g;
            }
        }
    }
    Ok(out)
}

/// `pi(F)(x) = int alpha_y(F(y, x - y)) dy`.
pub fn map_pi(f: &BiSampledFunction, action: &Action) -> Result<CrossedElement> {
    check_bi(f, action)?;
    f.check_decay("pi")?;
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let w = grid.spacing();
    let mut props = NodePropagators::new(&grid, action);
    let mut out = SampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; d * d];
    for i in 0..n {
        let mut acc = vec![ZERO; d * d];
        for k in 0..n {
            if let Some(j) = grid.diff_index(i, k) {
                props.forward(k, f.block(k, j), &mut moved);
                for (a, m) in acc.iter_mut().zip(&moved) {
                    *a += m;
                }
            }
        }
        for (o, a) in out.block_mut(i).iter_mut().zip(&acc) {
            *o = a * w;
        }
    }
    // pi of a kernel element cancels to round-off; judge its edges against the input
    out.check_decay_relative("pi result", f.sup_norm() * w)?;
    CrossedElement::new(out, action)
}

fn check_bump(bump: &BumpFunction, grid: &Grid) -> Result<()> {
    if bump.grid() != grid {
        return Err(LabError::GridMismatch("bump function sampled on a different grid".into()));
    }
    Ok(())
}

/// `rho_x(f)(x, y) = phi(y) alpha_{-x}(f(x+y))`, `rho_y(f)(x, y) = phi(x) alpha_{-x}(f(x+y))`.
pub fn sect_rho(axis: Axis, f: &CrossedElement, bump: &BumpFunction) -> Result<BiSampledFunction> {
    let grid = *f.grid();
    check_bump(bump, &grid)?;
    f.func().check_decay("rho")?;
    let d = f.dim();
    let n = grid.points();
    let mut props = NodePropagators::new(&grid, f.action());
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; d * d];
    let phi = bump.values();
    for i in 0..n {
        for j in 0..n {
            let weight = match axis {
                Axis::X => phi[j],
                Axis::Y => phi[i],
            };
            if weight == 0.0 {
                continue;
            }
            let Some(s) = grid.sum_index(i, j) else { continue };
            props.backward(i, f.func().block(s), &mut moved);
            for (o, m) in out.block_mut(i, j).iter_mut().zip(&moved) {
                *o = m * weight;
            }
        }
    }
    Ok(out)
}

/// The homotopy `beta_x` (bump at `x + y - t`) or `beta_y` (bump at `t`).
///
/// On the line the inner antiderivative starts at `-L`; on the circle it is
/// the zero-mean antiderivative along each anti-diagonal.
pub fn homotopy_beta(axis: Axis, f: &BiSampledFunction, action: &Action, bump: &BumpFunction) -> Result<BiSampledFunction> {
    homotopy_beta_with_tol(axis, f, action, bump, DEFAULT_MEAN_ZERO_TOL)
}

pub fn homotopy_beta_with_tol(
    axis: Axis,
    f: &BiSampledFunction,
    action: &Action,
    bump: &BumpFunction,
    mean_zero_tol: f64,
) -> Result<BiSampledFunction> {
    check_bi(f, action)?;
    let grid = *f.grid();
    check_bump(bump, &grid)?;
    f.check_decay("beta")?;
    let d = f.dim();
    let b = d * d;
    let n = grid.points();
    let w = grid.spacing();
    let mut props = NodePropagators::new(&grid, action);
    let mut calc = SpectralCalculus::new(&grid);
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut integrand = vec![ZERO; n * b];
    let mut series = vec![ZERO; n];
    let mut masses = Vec::with_capacity(grid.antidiagonals());
    let mut scale = 0.0f64;

    for m in 0..grid.antidiagonals() {
        // twisted slice t -> alpha_t(F(t, s - t)) and its integral over t
        let mut total = vec![ZERO; b];
        for k in 0..n {
            let dst = &mut integrand[k * b..(k + 1) * b];
            match grid.partner(m, k) {
                Some(j) => {
                    props.forward(k, f.block(k, j), dst);
                    for (t, v) in total.iter_mut().zip(dst.iter()) {
                        *t += v;
                    }
                }
                None => dst.fill(ZERO),
            }
        }
        for t in total.iter_mut() {
            *t *= w;
        }
        let mut mass = vec![ZERO; b];
        let mut l1 = 0.0;
        for k in 0..n {
            let weight = match axis {
                Axis::X => bump.at(grid.partner(m, k)),
                Axis::Y => bump.values()[k],
            };
            let dst = &mut integrand[k * b..(k + 1) * b];
            if weight != 0.0 {
                for (v, t) in dst.iter_mut().zip(&total) {
                    *v -= t * weight;
                }
            }
            for (acc, v) in mass.iter_mut().zip(dst.iter()) {
                *acc += v;
            }
            l1 += block::op_norm(dst, d);
        }
        masses.push(block::op_norm(&mass, d) * w);
        scale = scale.max(l1 * w);

        for c in 0..b {
            for k in 0..n {
                series[k] = integrand[k * b + c];
            }
            calc.antiderivative(&mut series);
            for k in 0..n {
                integrand[k * b + c] = series[k];
            }
        }
        for i in 0..n {
            if let Some(j) = grid.partner(m, i) {
                props.backward(i, &integrand[i * b..(i + 1) * b], out.block_mut(i, j));
            }
        }
    }

    if let Some(worst) = masses.iter().cloned().reduce(f64::max) {
        if worst > mean_zero_tol * scale {
            return Err(LabError::MeanNotZero {
                mass: worst / scale,
                tolerance: mean_zero_tol,
            });
        }
    }
    out.check_decay_relative("beta result", f.sup_norm() * grid.spacing())?;
    Ok(out)
}

/// `F -> alpha_{-x}(pi(F)(x + y))`. On the circle this is the projection onto
/// the kernel of `iota` along which `beta o iota` differs from the identity.
pub fn kernel_projection(f: &BiSampledFunction, action: &Action) -> Result<BiSampledFunction> {
    let p = map_pi(f, action)?;
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let mut props = NodePropagators::new(&grid, action);
    let mut out = BiSampledFunction::zeros(&grid, d);
    for i in 0..n {
        for j in 0..n {
            if let Some(s) = grid.sum_index(i, j) {
                props.backward(i, p.func().block(s), out.block_mut(i, j));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass_and_support() {
        let g = Grid::line(10.0, 512).unwrap();
        let phi = BumpFunction::standard(&g).unwrap();
        assert!((phi.mass() - 1.0).abs() < 1e-12);
        for (x, v) in g.nodes().iter().zip(phi.values()) {
            if x.abs() >= 1.0 {
                assert_eq!(*v, 0.0);
            }
        }
        let c = Grid::circle(128).unwrap();
        let phi = BumpFunction::standard(&c).unwrap();
        assert!((phi.mass() - 1.0).abs() < 1e-12);
        assert!(phi.values()[0] > 0.0 && phi.values()[127] > 0.0 && phi.values()[64] == 0.0);
    }

    #[test]
    fn iota_of_gaussian_trivial_action() {
        let g = Grid::line(10.0, 256).unwrap();
        let id = AlgebraElement::identity(1);
        let act = Action::trivial(1, Group::Line);
        let f = BiSampledFunction::from_scalar(&g, &id, |x, y| C64::new((-x * x - y * y).exp(), 0.0));
        let want = f.weighted(|x, y| C64::new(-2.0 * x + 2.0 * y, 0.0));
        assert!(map_iota(&f, &act).unwrap().distance(&want).unwrap() < 1e-8);
        assert_eq!(map_pi(&BiSampledFunction::zeros(&g, 1), &act).unwrap().sup_norm(), 0.0);
    }
}
