//! The smooth crossed product `S(G, A; alpha)`: twisted convolutions, the
//! operator `T`, the conjugated derivative and the bimodule actions.

use serde::{Deserialize, Serialize};

use crate::algebra::{Action, AlgebraElement, Propagator};
use crate::block::{self, C64, ZERO};
use crate::error::{LabError, Result};
use crate::schwartz::{
    differentiate, differentiate_unchecked, BiSampledFunction, BlockConvolver, Direction, Grid, SampledFunction,
};

/// How defining integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    /// FFT shift-quadrature on the separated form of the action.
    #[default]
    Fast,
    /// Literal double (or triple) loops over the nodes.
    Direct,
}

/// An element of the crossed product (or of the bimodule `S_alpha`, which has
/// the same underlying space).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedElement {
    func: SampledFunction,
    action: Action,
}

impl CrossedElement {
    pub fn new(func: SampledFunction, action: &Action) -> Result<Self> {
        if func.grid().group() != action.group() {
            return Err(LabError::ActionMismatch(format!(
                "action on the {} used with a {} grid",
                action.group(),
                func.grid().group()
            )));
        }
        if func.dim() != action.dim() {
            return Err(LabError::DimensionMismatch {
                expected: action.dim(),
                found: func.dim(),
            });
        }
        Ok(Self {
            func,
            action: action.clone(),
        })
    }

    pub fn func(&self) -> &SampledFunction {
        &self.func
    }

    pub fn into_func(self) -> SampledFunction {
        self.func
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn grid(&self) -> &Grid {
        self.func.grid()
    }

    pub fn dim(&self) -> usize {
        self.func.dim()
    }

    pub fn sup_norm(&self) -> f64 {
        self.func.sup_norm()
    }

    pub(crate) fn with_func(&self, func: SampledFunction) -> Self {
        Self {
            func,
            action: self.action.clone(),
        }
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        self.func.ensure_compatible(&other.func)?;
        if self.action != other.action {
            return Err(LabError::ActionMismatch("operands carry different actions".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.with_func(self.func.add(&other.func)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        Ok(self.with_func(self.func.sub(&other.func)?))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.with_func(self.func.scale(s))
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.func.distance(&other.func)
    }
}

/// `U_{x_i}` and its inverse for every node.
pub(crate) struct NodePropagators {
    props: Vec<Propagator>,
    d: usize,
    tmp: Vec<C64>,
}

impl NodePropagators {
    pub fn new(grid: &Grid, action: &Action) -> Self {
        let props = grid.nodes().iter().map(|&x| action.propagator(x)).collect();
        let d = action.dim();
        Self {
            props,
            d,
            tmp: vec![ZERO; d * d],
        }
    }

    /// `out = alpha_{x_i}(a)`
    pub fn forward(&mut self, i: usize, a: &[C64], out: &mut [C64]) {
        let p = &self.props[i];
        block::sandwich(&p.forward, a, &p.backward, out, &mut self.tmp, self.d);
    }

    /// `out = alpha_{-x_i}(a)`
    pub fn backward(&mut self, i: usize, a: &[C64], out: &mut [C64]) {
        let p = &self.props[i];
        block::sandwich(&p.backward, a, &p.forward, out, &mut self.tmp, self.d);
    }

    /// `alpha_{+-x_i}` as an owned block.
    pub fn apply(&mut self, i: usize, a: &[C64], inverse: bool) -> Vec<C64> {
        let mut out = vec![ZERO; self.d * self.d];
        if inverse {
            self.backward(i, a, &mut out);
        } else {
            self.forward(i, a, &mut out);
        }
        out
    }
}

/// Node-wise `alpha_{sign * x}(f(x))`.
fn twist(f: &SampledFunction, action: &Action, inverse: bool) -> SampledFunction {
    let mut props = NodePropagators::new(f.grid(), action);
    let mut out = f.clone();
    for i in 0..f.len() {
        if inverse {
            props.backward(i, f.block(i), out.block_mut(i));
        } else {
            props.forward(i, f.block(i), out.block_mut(i));
        }
    }
    out
}

/// `(f *_alpha g)(x) = int f(y) alpha_y(g(x - y)) dy`.
pub fn twisted_convolve(f: &CrossedElement, g: &CrossedElement) -> Result<CrossedElement> {
    twisted_convolve_with(f, g, Quadrature::Fast)
}

pub fn twisted_convolve_with(f: &CrossedElement, g: &CrossedElement, quad: Quadrature) -> Result<CrossedElement> {
    f.ensure_compatible(g)?;
    let out = match quad {
        Quadrature::Fast => twisted_fast(f, g),
        Quadrature::Direct => twisted_direct(f, g),
    };
    out.check_decay("twisted convolution")?;
    Ok(f.with_func(out))
}

fn twisted_fast(f: &CrossedElement, g: &CrossedElement) -> SampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let b = d * d;
    let n = grid.points();
    let nodes = grid.nodes();
    let expansion = f.action().expansion();
    let mut conv = BlockConvolver::new(&grid, d);
    let g_spec = conv.spectrum(g.func().data(), true);
    let mut out = SampledFunction::zeros(&grid, d);
    let mut u = vec![ZERO; n * b];
    let mut tmp = vec![ZERO; b];
    for term in &expansion.terms {
        for k in 0..n {
            let c = term.profile.eval(nodes[k]);
            block::mul(f.func().block(k), &term.left, &mut u[k * b..(k + 1) * b], d);
            for z in &mut u[k * b..(k + 1) * b] {
                *z *= c;
            }
        }
        let u_spec = conv.spectrum(&u, false);
        let partial = conv.combine(&u_spec, &g_spec);
        for i in 0..n {
            block::mul(&partial[i * b..(i + 1) * b], &term.right, &mut tmp, d);
            for (o, t) in out.block_mut(i).iter_mut().zip(&tmp) {
                *o += t;
            }
        }
    }
    out
}

fn twisted_direct(f: &CrossedElement, g: &CrossedElement) -> SampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let w = grid.spacing();
    let mut props = NodePropagators::new(&grid, f.action());
    let mut out = SampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; d * d];
    for i in 0..n {
        let mut acc = vec![ZERO; d * d];
        for k in 0..n {
            if let Some(j) = grid.diff_index(i, k) {
                props.forward(k, g.func().block(j), &mut moved);
                block::mul_acc(f.func().block(k), &moved, &mut acc, d);
            }
        }
        for (o, a) in out.block_mut(i).iter_mut().zip(&acc) {
            *o = a * w;
        }
    }
    out
}

/// `(f *'_alpha g)(x) = int alpha_{-y}(f(x - y)) g(y) dy`.
pub fn twisted_convolve_alt(f: &CrossedElement, g: &CrossedElement) -> Result<CrossedElement> {
    twisted_convolve_alt_with(f, g, Quadrature::Fast)
}

pub fn twisted_convolve_alt_with(f: &CrossedElement, g: &CrossedElement, quad: Quadrature) -> Result<CrossedElement> {
    f.ensure_compatible(g)?;
    let out = match quad {
        Quadrature::Fast => twisted_alt_fast(f, g),
        Quadrature::Direct => twisted_alt_direct(f, g),
    };
    out.check_decay("twisted convolution")?;
    Ok(f.with_func(out))
}

fn twisted_alt_fast(f: &CrossedElement, g: &CrossedElement) -> SampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let b = d * d;
    let n = grid.points();
    let nodes = grid.nodes();
    let expansion = f.action().expansion();
    let mut conv = BlockConvolver::new(&grid, d);
    let mut out = SampledFunction::zeros(&grid, d);
    let mut a = vec![ZERO; n * b];
    let mut bb = vec![ZERO; n * b];
    let mut tmp = vec![ZERO; b];
    for term in &expansion.terms {
        for k in 0..n {
            block::mul(f.func().block(k), &term.right, &mut a[k * b..(k + 1) * b], d);
            let c = term.profile.eval(-nodes[k]);
            for (z, v) in bb[k * b..(k + 1) * b].iter_mut().zip(g.func().block(k)) {
                *z = v * c;
            }
        }
        let a_spec = conv.spectrum(&a, false);
        let b_spec = conv.spectrum(&bb, true);
        let partial = conv.combine(&a_spec, &b_spec);
        for i in 0..n {
            block::mul(&term.left, &partial[i * b..(i + 1) * b], &mut tmp, d);
            for (o, t) in out.block_mut(i).iter_mut().zip(&tmp) {
                *o += t;
            }
        }
    }
    out
}

fn twisted_alt_direct(f: &CrossedElement, g: &CrossedElement) -> SampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let w = grid.spacing();
    let mut props = NodePropagators::new(&grid, f.action());
    let mut out = SampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; d * d];
    for i in 0..n {
        let mut acc = vec![ZERO; d * d];
        for k in 0..n {
            if let Some(j) = grid.diff_index(i, k) {
                props.backward(k, f.func().block(j), &mut moved);
                block::mul_acc(&moved, g.func().block(k), &mut acc, d);
            }
        }
        for (o, a) in out.block_mut(i).iter_mut().zip(&acc) {
            *o = a * w;
        }
    }
    out
}

/// `T(f)(x) = alpha_x(f(x))`; the inverse direction applies `alpha_{-x}`.
pub fn op_t(f: &CrossedElement, direction: Direction) -> CrossedElement {
    f.with_func(twist(f.func(), f.action(), direction == Direction::Inverse))
}

/// `i(f)(x) = alpha_{-x}(f(x))`, an algebra isomorphism onto the alternative product.
pub fn iso_i(f: &CrossedElement, direction: Direction) -> CrossedElement {
    f.with_func(twist(f.func(), f.action(), direction == Direction::Forward))
}

/// `f' - alpha'_0(f)`.
pub fn d_alpha(f: &CrossedElement) -> Result<CrossedElement> {
    let df = differentiate(f.func())?;
    let d = f.dim();
    let mut out = df.clone();
    let mut gen = vec![ZERO; d * d];
    for i in 0..df.len() {
        f.action().derive_block(f.func().block(i), &mut gen);
        for (o, g) in out.block_mut(i).iter_mut().zip(&gen) {
            *o -= g;
        }
    }
    Ok(f.with_func(out))
}

/// `T (d/dx) T^{-1} f`, the composite form of [`d_alpha`].
pub fn d_alpha_composite(f: &CrossedElement) -> Result<CrossedElement> {
    f.func().check_decay("conjugated derivative")?;
    let untwisted = op_t(f, Direction::Inverse);
    let derived = f.with_func(differentiate_unchecked(untwisted.func()));
    Ok(op_t(&derived, Direction::Forward))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `a o F = a F(x)` and `F o a = F(x) alpha_x(a)`.
pub fn module_act_algebra(side: Side, a: &AlgebraElement, f: &CrossedElement) -> Result<CrossedElement> {
    f.func().check_element(a)?;
    match side {
        Side::Left => Ok(f.with_func(f.func().left_mul(a)?)),
        Side::Right => {
            let d = f.dim();
            let mut props = NodePropagators::new(f.grid(), f.action());
            let mut out = f.func().clone();
            let mut moved = vec![ZERO; d * d];
            for i in 0..f.func().len() {
                props.forward(i, a.as_slice(), &mut moved);
                block::mul(f.func().block(i), &moved, out.block_mut(i), d);
            }
            Ok(f.with_func(out))
        }
    }
}

/// Who acts on a bi-function, and from which side.
#[derive(Debug, Clone, Copy)]
pub enum BiAction<'a> {
    /// `(a o F)(x, y) = alpha_{-x}(a) F(x, y)`
    LeftAlgebra(&'a AlgebraElement),
    /// `(F o a)(x, y) = F(x, y) alpha_y(a)`
    RightAlgebra(&'a AlgebraElement),
    /// `(H o F)(x, y) = int alpha_{-x}(H(z)) F(x - z, y) dz`
    LeftCrossed(&'a CrossedElement),
    /// `(F o H)(x, y) = int F(x, z) alpha_z(H(y - z)) dz`
    RightCrossed(&'a CrossedElement),
}

pub fn bimodule_act_bifunction(
    actor: BiAction<'_>,
    f: &BiSampledFunction,
    action: &Action,
) -> Result<BiSampledFunction> {
    bimodule_act_bifunction_with(actor, f, action, Quadrature::Fast)
}

pub fn bimodule_act_bifunction_with(
    actor: BiAction<'_>,
    f: &BiSampledFunction,
    action: &Action,
    quad: Quadrature,
) -> Result<BiSampledFunction> {
    if f.grid().group() != action.group() || f.dim() != action.dim() {
        return Err(LabError::ActionMismatch("bi-function and action live on different spaces".into()));
    }
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    match actor {
        BiAction::LeftAlgebra(a) | BiAction::RightAlgebra(a) => {
            if a.dim() != d {
                return Err(LabError::DimensionMismatch {
                    expected: d,
                    found: a.dim(),
                });
            }
            let left = matches!(actor, BiAction::LeftAlgebra(_));
            let mut props = NodePropagators::new(&grid, action);
            let moved: Vec<Vec<C64>> = (0..n).map(|i| props.apply(i, a.as_slice(), left)).collect();
            let mut out = BiSampledFunction::zeros(&grid, d);
            for i in 0..n {
                for j in 0..n {
                    if left {
                        block::mul(&moved[i], f.block(i, j), out.block_mut(i, j), d);
                    } else {
                        block::mul(f.block(i, j), &moved[j], out.block_mut(i, j), d);
                    }
                }
            }
            Ok(out)
        }
        BiAction::LeftCrossed(h) | BiAction::RightCrossed(h) => {
            if h.action() != action {
                return Err(LabError::ActionMismatch("crossed actor carries a different action".into()));
            }
            f.ensure_matches(h.func())?;
            let left = matches!(actor, BiAction::LeftCrossed(_));
            let out = match (quad, left) {
                (Quadrature::Fast, true) => left_crossed_fast(h, f),
                (Quadrature::Fast, false) => right_crossed_fast(f, h),
                (Quadrature::Direct, true) => left_crossed_direct(h, f),
                (Quadrature::Direct, false) => right_crossed_direct(f, h),
            };
            out.check_decay("crossed action on a bi-function")?;
            Ok(out)
        }
    }
}

fn left_crossed_fast(h: &CrossedElement, f: &BiSampledFunction) -> BiSampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let b = d * d;
    let n = grid.points();
    let nodes = grid.nodes();
    let expansion = h.action().expansion();
    let mut conv = BlockConvolver::new(&grid, d);
    let kernels: Vec<_> = expansion
        .terms
        .iter()
        .map(|term| {
            let mut u = vec![ZERO; n * b];
            for k in 0..n {
                block::mul(h.func().block(k), &term.right, &mut u[k * b..(k + 1) * b], d);
            }
            conv.spectrum(&u, false)
        })
        .collect();
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut column = vec![ZERO; n * b];
    let mut tmp = vec![ZERO; b];
    for j in 0..n {
        for i in 0..n {
            column[i * b..(i + 1) * b].copy_from_slice(f.block(i, j));
        }
        let col_spec = conv.spectrum(&column, true);
        for (term, kernel) in expansion.terms.iter().zip(&kernels) {
            let partial = conv.combine(kernel, &col_spec);
            for i in 0..n {
                let c = term.profile.eval(-nodes[i]);
                block::mul(&term.left, &partial[i * b..(i + 1) * b], &mut tmp, d);
                for (o, t) in out.block_mut(i, j).iter_mut().zip(&tmp) {
                    *o += t * c;
                }
            }
        }
    }
    out
}

fn right_crossed_fast(f: &BiSampledFunction, h: &CrossedElement) -> BiSampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let b = d * d;
    let n = grid.points();
    let nodes = grid.nodes();
    let expansion = h.action().expansion();
    let mut conv = BlockConvolver::new(&grid, d);
    let h_spec = conv.spectrum(h.func().data(), true);
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut row = vec![ZERO; n * b];
    let mut tmp = vec![ZERO; b];
    for i in 0..n {
        for term in &expansion.terms {
            for k in 0..n {
                let c = term.profile.eval(nodes[k]);
                let dst = &mut row[k * b..(k + 1) * b];
                block::mul(f.block(i, k), &term.left, dst, d);
                for z in dst.iter_mut() {
                    *z *= c;
                }
            }
            let row_spec = conv.spectrum(&row, false);
            let partial = conv.combine(&row_spec, &h_spec);
            for j in 0..n {
                block::mul(&partial[j * b..(j + 1) * b], &term.right, &mut tmp, d);
                for (o, t) in out.block_mut(i, j).iter_mut().zip(&tmp) {
                    *o += t;
                }
            }
        }
    }
    out
}

fn left_crossed_direct(h: &CrossedElement, f: &BiSampledFunction) -> BiSampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let w = grid.spacing();
    let mut props = NodePropagators::new(&grid, h.action());
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; d * d];
    for i in 0..n {
        for k in 0..n {
            let Some(src) = grid.diff_index(i, k) else { continue };
            props.backward(i, h.func().block(k), &mut moved);
            for j in 0..n {
                let mut acc = vec![ZERO; d * d];
                block::mul(&moved, f.block(src, j), &mut acc, d);
                for (o, a) in out.block_mut(i, j).iter_mut().zip(&acc) {
                    *o += a * w;
                }
            }
        }
    }
    out
}

fn right_crossed_direct(f: &BiSampledFunction, h: &CrossedElement) -> BiSampledFunction {
    let grid = *f.grid();
    let d = f.dim();
    let n = grid.points();
    let w = grid.spacing();
    let mut props = NodePropagators::new(&grid, h.action());
    let mut out = BiSampledFunction::zeros(&grid, d);
    let mut moved = vec![ZERO; d * d];
    let mut acc = vec![ZERO; d * d];
    for j in 0..n {
        for k in 0..n {
            let Some(src) = grid.diff_index(j, k) else { continue };
            props.forward(k, h.func().block(src), &mut moved);
            for i in 0..n {
                block::mul(f.block(i, k), &moved, &mut acc, d);
                for (o, a) in out.block_mut(i, j).iter_mut().zip(&acc) {
                    *o += a * w;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Group;
    use crate::schwartz::convolve;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bump(grid: &Grid, a: &AlgebraElement, mu: f64, s: f64) -> SampledFunction {
        SampledFunction::from_scalar(grid, a, |x| C64::new((-(x - mu) * (x - mu) / (2.0 * s * s)).exp(), 0.0))
    }

    fn setup(n: usize) -> (Grid, Action, CrossedElement, CrossedElement) {
        let grid = Grid::line(10.0, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = AlgebraElement::random_hermitian(2, 1.0, &mut rng);
        let action = Action::unitary(h, Group::Line).unwrap();
        let a = AlgebraElement::random(2, 1.0, &mut rng);
        let b = AlgebraElement::random(2, 1.0, &mut rng);
        let f = CrossedElement::new(bump(&grid, &a, 0.7, 0.5), &action).unwrap();
        let g = CrossedElement::new(bump(&grid, &b, -1.1, 0.4), &action).unwrap();
        (grid, action, f, g)
    }

    #[test]
    fn fast_matches_direct() {
        let (_, _, f, g) = setup(128);
        let fast = twisted_convolve(&f, &g).unwrap();
        let direct = twisted_convolve_with(&f, &g, Quadrature::Direct).unwrap();
        assert!(fast.distance(&direct).unwrap() < 1e-12);
        let fast = twisted_convolve_alt(&f, &g).unwrap();
        let direct = twisted_convolve_alt_with(&f, &g, Quadrature::Direct).unwrap();
        assert!(fast.distance(&direct).unwrap() < 1e-12);
    }

    #[test]
    fn trivial_action_degenerates() {
        let (grid, _, f, g) = setup(128);
        let triv = Action::trivial(2, Group::Line);
        let f = CrossedElement::new(f.into_func(), &triv).unwrap();
        let g = CrossedElement::new(g.into_func(), &triv).unwrap();
        let plain = convolve(f.func(), g.func()).unwrap();
        assert!(twisted_convolve(&f, &g).unwrap().func().distance(&plain).unwrap() < 1e-12);
        assert!(twisted_convolve_alt(&f, &g).unwrap().func().distance(&plain).unwrap() < 1e-12);
        assert_eq!(op_t(&f, Direction::Forward), f);
        let _ = grid;
    }

    #[test]
    fn t_round_trip_and_derivatives() {
        let (_, _, f, _) = setup(256);
        let back = op_t(&op_t(&f, Direction::Forward), Direction::Inverse);
        assert!(back.distance(&f).unwrap() < 1e-12 * f.sup_norm());
        let formula = d_alpha(&f).unwrap();
        let composite = d_alpha_composite(&f).unwrap();
        assert!(formula.distance(&composite).unwrap() < 1e-8 * f.sup_norm());
    }

    #[test]
    fn bifunction_actions_fast_vs_direct() {
        let (grid, action, f, g) = setup(64);
        let big = BiSampledFunction::outer(f.func(), g.func()).unwrap();
        for left in [true, false] {
            let actor = if left { BiAction::LeftCrossed(&g) } else { BiAction::RightCrossed(&f) };
            let fast = bimodule_act_bifunction(actor, &big, &action).unwrap();
            let direct = bimodule_act_bifunction_with(actor, &big, &action, Quadrature::Direct).unwrap();
            assert!(fast.distance(&direct).unwrap() < 1e-12, "left = {left}");
        }
        let _ = grid;
    }

    #[test]
    fn mismatches_are_structural_errors() {
        let (grid, _, f, _) = setup(64);
        let other = Action::trivial(2, Group::Line);
        let g = CrossedElement::new(bump(&grid, &AlgebraElement::identity(2), 0.0, 0.5), &other).unwrap();
        assert!(matches!(twisted_convolve(&f, &g), Err(LabError::ActionMismatch(_))));
        let circle = Grid::circle(64).unwrap();
        assert!(CrossedElement::new(SampledFunction::zeros(&circle, 2), &other).is_err());
    }
}
