//! The coefficient algebra `M_n(C)` and one-parameter automorphism groups
//! acting on it by conjugation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::block::{self, C64, ONE, ZERO};
use crate::error::{LabError, Result};

/// Largest iterated-commutator order accepted by [`Action::generator_power`].
pub const MAX_GENERATOR_POWER: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;
const PERIODIC_SPECTRUM_TOL: f64 = 1e-9;

/// A square complex matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement {
    dim: usize,
    entries: Vec<C64>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.chunks(self.dim))
            .finish()
    }
}

impl AlgebraElement {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::InvalidInput("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(LabError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if !block::is_finite(&entries) {
            return Err(LabError::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LabError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    /// Builds a matrix from real parts only.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: block::identity(dim),
        }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let dim = values.len();
        let mut out = Self::zeros(dim);
        for (i, v) in values.iter().enumerate() {
            out.entries[i * dim + i] = *v;
        }
        out
    }

    pub(crate) fn from_block(dim: usize, entries: &[C64]) -> Self {
        Self {
            dim,
            entries: entries.to_vec(),
        }
    }

    /// Random matrix with entries uniform in the unit complex square, rescaled
    /// so that its operator norm equals `norm`.
    pub fn random<R: Rng + ?Sized>(dim: usize, norm: f64, rng: &mut R) -> Self {
        let entries: Vec<C64> = (0..dim * dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut out = Self { dim, entries };
        let n = out.seminorm();
        if n > 0.0 {
            out = out.scale(C64::new(norm / n, 0.0));
        }
        out
    }

    /// Random Hermitian matrix with operator norm `norm`.
    pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, norm: f64, rng: &mut R) -> Self {
        let a = Self::random(dim, 1.0, rng);
        let h = &a + &a.adjoint();
        let n = h.seminorm();
        if n == 0.0 {
            return Self::zeros(dim);
        }
        h.scale(C64::new(norm / n, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn from_matrix(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(LabError::InvalidInput("matrix must be square".into()));
        }
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(m[(r, c)]);
            }
        }
        Self::new(dim, entries)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Operator norm.
    pub fn seminorm(&self) -> f64 {
        block::op_norm(&self.entries, self.dim)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|r| {
            (0..d).all(|c| (self.entries[r * d + c] - self.entries[c * d + r].conj()).norm() <= tol)
        })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self * other)
    }
}

/// Operator norm of `a`.
pub fn seminorm(a: &AlgebraElement) -> f64 {
    a.seminorm()
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        AlgebraElement {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        AlgebraElement {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = AlgebraElement::zeros(self.dim);
        block::mul(&self.entries, &rhs.entries, &mut out.entries, self.dim);
        out
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Line,
    Circle,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Line => "line",
            Group::Circle => "circle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Trivial,
    UnitaryConjugation,
    NilpotentConjugation,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionKind::Trivial => "trivial",
            ActionKind::UnitaryConjugation => "unitary-conjugation",
            ActionKind::NilpotentConjugation => "nilpotent-conjugation",
        })
    }
}

/// Coefficient profile `c(y)` of one term in an [`ActionExpansion`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermProfile {
    /// `c(y) = exp(i * omega * y)`
    Phase(f64),
    /// `c(y) = coefficient * y^power`
    Monomial { power: i32, coefficient: f64 },
}

impl TermProfile {
    pub fn eval(&self, y: f64) -> C64 {
        match *self {
            TermProfile::Phase(omega) => C64::from_polar(1.0, omega * y),
            TermProfile::Monomial { power, coefficient } => {
                C64::new(coefficient * y.powi(power), 0.0)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExpansionTerm {
    pub profile: TermProfile,
    pub left: Vec<C64>,
    pub right: Vec<C64>,
}

/// Separated form `alpha_y(b) = sum_m c_m(y) L_m b R_m`. Fast quadratures
/// use it to move the `y` dependence out of the integrand's argument.
#[derive(Debug, Clone)]
pub struct ActionExpansion {
    pub dim: usize,
    pub terms: Vec<ExpansionTerm>,
}

/// `U_x` and `U_x^{-1}` with `alpha_x(a) = U_x a U_x^{-1}`.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    pub forward: Vec<C64>,
    pub backward: Vec<C64>,
}

impl Propagator {
    pub fn apply(&self, a: &[C64], out: &mut [C64], tmp: &mut [C64], d: usize) {
        block::sandwich(&self.forward, a, &self.backward, out, tmp, d);
    }
}

/// A one-parameter group of inner automorphisms of `M_n(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    kind: ActionKind,
    dim: usize,
    generator: Option<AlgebraElement>,
    group: Group,
}

impl Action {
    pub fn trivial(dim: usize, group: Group) -> Self {
        Self {
            kind: ActionKind::Trivial,
            dim,
            generator: None,
            group,
        }
    }

    /// `alpha_x(a) = exp(ixH) a exp(-ixH)` for Hermitian `H`. On the circle the
    /// spectrum of `H` must lie in `2 pi Z`.
    pub fn unitary(h: AlgebraElement, group: Group) -> Result<Self> {
        if !h.is_hermitian(HERMITIAN_TOL) {
            return Err(LabError::InvalidInput("generator of a unitary action must be Hermitian".into()));
        }
        if group == Group::Circle {
            let eig = SymmetricEigen::new(h.to_matrix());
            for &lam in eig.eigenvalues.iter() {
                let turns = lam / std::f64::consts::TAU;
                if (turns - turns.round()).abs() > PERIODIC_SPECTRUM_TOL {
                    return Err(LabError::InvalidInput(format!(
                        "circle action needs generator spectrum in 2*pi*Z, found eigenvalue {lam}"
                    )));
                }
            }
        }
        Ok(Self {
            kind: ActionKind::UnitaryConjugation,
            dim: h.dim(),
            generator: Some(h),
            group,
        })
    }

    /// `alpha_x(a) = exp(xN) a exp(-xN)` for nilpotent `N`.
    pub fn nilpotent(n: AlgebraElement, group: Group) -> Result<Self> {
        let d = n.dim();
        let mut power = AlgebraElement::identity(d);
        for _ in 0..d {
            power = &power * &n;
        }
        let scale = n.seminorm().max(1.0).powi(d as i32);
        if power.as_slice().iter().any(|z| z.norm() > 1e-14 * scale) {
            return Err(LabError::InvalidInput("generator of a nilpotent action must satisfy N^dim = 0".into()));
        }
        if group == Group::Circle && n.seminorm() > 0.0 {
            return Err(LabError::InvalidInput(
                "a nonzero nilpotent generator never gives a periodic action".into(),
            ));
        }
        Ok(Self {
            kind: ActionKind::NilpotentConjugation,
            dim: d,
            generator: Some(n),
            group,
        })
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn generator(&self) -> Option<&AlgebraElement> {
        self.generator.as_ref()
    }

    /// The same action regarded on another group. Fails if the action is not
    /// admissible there.
    pub fn on_group(&self, group: Group) -> Result<Self> {
        match self.kind {
            ActionKind::Trivial => Ok(Self::trivial(self.dim, group)),
            ActionKind::UnitaryConjugation => Self::unitary(self.generator.clone().unwrap(), group),
            ActionKind::NilpotentConjugation => Self::nilpotent(self.generator.clone().unwrap(), group),
        }
    }

    pub(crate) fn propagator(&self, x: f64) -> Propagator {
        let d = self.dim;
        match (&self.kind, &self.generator) {
            (ActionKind::UnitaryConjugation, Some(h)) => {
                let u = (h.to_matrix() * C64::new(0.0, x)).exp();
                let fwd = AlgebraElement::from_matrix(&u).expect("finite exponential");
                let back = fwd.adjoint();
                Propagator {
                    forward: fwd.entries,
                    backward: back.entries,
                }
            }
            (ActionKind::NilpotentConjugation, Some(n)) => Propagator {
                forward: nilpotent_exp(n, x),
                backward: nilpotent_exp(n, -x),
            },
            _ => Propagator {
                forward: block::identity(d),
                backward: block::identity(d),
            },
        }
    }

    fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if a.dim() != self.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// `alpha_x(a)`.
    pub fn act(&self, x: f64, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_element(a)?;
        if !x.is_finite() {
            return Err(LabError::InvalidInput(format!("group parameter must be finite, got {x}")));
        }
        if x == 0.0 || self.kind == ActionKind::Trivial {
            return Ok(a.clone());
        }
        let d = self.dim;
        let p = self.propagator(x);
        let mut out = AlgebraElement::zeros(d);
        let mut tmp = vec![ZERO; d * d];
        p.apply(&a.entries, &mut out.entries, &mut tmp, d);
        Ok(out)
    }

    /// The derivation `alpha'_0` applied to a flat block.
    pub(crate) fn derive_block(&self, a: &[C64], out: &mut [C64]) {
        let d = self.dim;
        match (&self.kind, &self.generator) {
            (ActionKind::Trivial, _) | (_, None) => out.fill(ZERO),
            (kind, Some(g)) => {
                let g = g.as_slice();
                block::mul(g, a, out, d);
                let mut right = vec![ZERO; d * d];
                block::mul(a, g, &mut right, d);
                let factor = if *kind == ActionKind::UnitaryConjugation {
                    C64::new(0.0, 1.0)
                } else {
                    ONE
                };
                for (o, r) in out.iter_mut().zip(&right) {
                    *o = (*o - r) * factor;
                }
            }
        }
    }

    /// `alpha'_0(a)`: `i[H, a]` for unitary, `[N, a]` for nilpotent, zero for trivial.
    pub fn derivation(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_element(a)?;
        let mut out = AlgebraElement::zeros(self.dim);
        self.derive_block(&a.entries, &mut out.entries);
        Ok(out)
    }

    /// The k-th derivative of `x -> alpha_x(a)` at zero.
    pub fn generator_power(&self, k: usize, a: &AlgebraElement) -> Result<AlgebraElement> {
        if k > MAX_GENERATOR_POWER {
            return Err(LabError::InvalidInput(format!(
                "derivative order {k} exceeds the cap {MAX_GENERATOR_POWER}"
            )));
        }
        self.check_element(a)?;
        let mut cur = a.clone();
        for _ in 0..k {
            cur = self.derivation(&cur)?;
        }
        Ok(cur)
    }

    pub fn expansion(&self) -> ActionExpansion {
        let d = self.dim;
        let terms = match (&self.kind, &self.generator) {
            (ActionKind::UnitaryConjugation, Some(h)) => {
                let eig = SymmetricEigen::new(h.to_matrix());
                let projectors: Vec<Vec<C64>> = (0..d)
                    .map(|p| {
                        let v = eig.eigenvectors.column(p);
                        let mut proj = vec![ZERO; d * d];
                        for r in 0..d {
                            for c in 0..d {
                                proj[r * d + c] = v[r] * v[c].conj();
                            }
                        }
                        proj
                    })
                    .collect();
                let mut terms = Vec::with_capacity(d * d);
                for p in 0..d {
                    for q in 0..d {
                        terms.push(ExpansionTerm {
                            profile: TermProfile::Phase(eig.eigenvalues[p] - eig.eigenvalues[q]),
                            left: projectors[p].clone(),
                            right: projectors[q].clone(),
                        });
                    }
                }
                terms
            }
            (ActionKind::NilpotentConjugation, Some(n)) => {
                let mut powers = vec![block::identity(d)];
                for k in 1..d {
                    let mut next = vec![ZERO; d * d];
                    block::mul(&powers[k - 1], n.as_slice(), &mut next, d);
                    powers.push(next);
                }
                let mut terms = Vec::new();
                for k in 0..d {
                    for l in 0..d {
                        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                        terms.push(ExpansionTerm {
                            profile: TermProfile::Monomial {
                                power: (k + l) as i32,
                                coefficient: sign / (factorial(k) * factorial(l)),
                            },
                            left: powers[k].clone(),
                            right: powers[l].clone(),
                        });
                    }
                }
                terms
            }
            _ => vec![ExpansionTerm {
                profile: TermProfile::Phase(0.0),
                left: block::identity(d),
                right: block::identity(d),
            }],
        };
        ActionExpansion { dim: d, terms }
    }

    /// Growth polynomial `p` with `||alpha_x(a)|| <= p(x) ||a||`.
    pub fn growth_bound(&self, x: f64) -> f64 {
        match (&self.kind, &self.generator) {
            (ActionKind::NilpotentConjugation, Some(n)) => {
                let s = n.seminorm() * x.abs();
                let mut term = 1.0;
                let mut sum = 0.0;
                for k in 0..self.dim {
                    if k > 0 {
                        term *= s / k as f64;
                    }
                    sum += term;
                }
                sum * sum
            }
            _ => 1.0,
        }
    }

    /// Constant `C_k` with `||alpha_0^{(k)}(a)|| <= C_k ||a||`.
    pub fn derivative_bound(&self, k: usize) -> f64 {
        match (&self.kind, &self.generator) {
            (ActionKind::Trivial, _) | (_, None) => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            (_, Some(g)) => (2.0 * g.seminorm()).powi(k as i32),
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn nilpotent_exp(n: &AlgebraElement, x: f64) -> Vec<C64> {
    let d = n.dim();
    let mut sum = block::identity(d);
    let mut term = block::identity(d);
    let mut next = vec![ZERO; d * d];
    for k in 1..d {
        block::mul(&term, n.as_slice(), &mut next, d);
        let s = x / k as f64;
        for (t, v) in term.iter_mut().zip(&next) {
            *t = v * s;
        }
        for (acc, t) in sum.iter_mut().zip(&term) {
            *acc += t;
        }
    }
    sum
}

/// Highest derivative order covered by a [`BoundCertificate`].
pub const CERTIFIED_DERIVATIVE_ORDER: usize = 4;

/// Measured growth and derivative ratios against the certified bounds.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub kind: ActionKind,
    /// `p(x)` at each sampled `x`.
    pub growth_polynomial: Vec<f64>,
    /// Worst `||alpha_x(a)|| / ||a||` at each sampled `x`.
    pub growth_ratios: Vec<f64>,
    /// `C_0 ..= C_K`.
    pub derivative_constants: Vec<f64>,
    /// Worst `||alpha_0^{(k)}(a)|| / ||a||` for `k = 0 ..= K`.
    pub derivative_ratios: Vec<f64>,
}

/// Checks the tempered growth bounds of `action` on random unit-norm elements.
pub fn verify_tempered_bounds<R: Rng + ?Sized>(
    action: &Action,
    xs: &[f64],
    trials: usize,
    rng: &mut R,
) -> Result<BoundCertificate> {
    if xs.is_empty() {
        return Err(LabError::InvalidInput("sample points must be nonempty".into()));
    }
    let d = action.dim();
    let samples: Vec<AlgebraElement> = (0..trials.max(1))
        .map(|_| AlgebraElement::random(d, 1.0, rng))
        .collect();
    // relative slack for rounding in the measured norms
    let slack = 1e-10;

    let mut growth_polynomial = Vec::with_capacity(xs.len());
    let mut growth_ratios = Vec::with_capacity(xs.len());
    for &x in xs {
        let bound = action.growth_bound(x);
        let mut worst = 0.0f64;
        for a in &samples {
            let ratio = action.act(x, a)?.seminorm() / a.seminorm();
            worst = worst.max(ratio);
        }
        if worst > bound * (1.0 + slack) {
            return Err(LabError::BoundViolation {
                x,
                order: 0,
                ratio: worst,
                bound,
            });
        }
        growth_polynomial.push(bound);
        growth_ratios.push(worst);
    }

    let mut derivative_constants = Vec::new();
    let mut derivative_ratios = Vec::new();
    for k in 0..=CERTIFIED_DERIVATIVE_ORDER {
        let bound = action.derivative_bound(k);
        let mut worst = 0.0f64;
        for a in &samples {
            let ratio = action.generator_power(k, a)?.seminorm() / a.seminorm();
            worst = worst.max(ratio);
        }
        if worst > bound * (1.0 + slack) + 1e-14 {
            return Err(LabError::BoundViolation {
                x: 0.0,
                order: k,
                ratio: worst,
                bound,
            });
        }
        derivative_constants.push(bound);
        derivative_ratios.push(worst);
    }

    Ok(BoundCertificate {
        kind: action.kind(),
        growth_polynomial,
        growth_ratios,
        derivative_constants,
        derivative_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn e12() -> AlgebraElement {
        AlgebraElement::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    fn diag01() -> AlgebraElement {
        AlgebraElement::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)])
    }

    #[test]
    fn seminorm_examples() {
        assert_eq!(AlgebraElement::identity(3).seminorm(), 1.0);
        assert_eq!(AlgebraElement::zeros(2).seminorm(), 0.0);
        let a = AlgebraElement::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((a.seminorm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_action_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = AlgebraElement::random(2, 1.0, &mut rng);
        let act = Action::trivial(2, Group::Line);
        assert_eq!(act.act(3.7, &a).unwrap(), a);
        assert_eq!(act.generator_power(1, &a).unwrap().seminorm(), 0.0);
    }

    #[test]
    fn unitary_conjugation_of_matrix_unit() {
        let act = Action::unitary(diag01(), Group::Line).unwrap();
        for &x in &[0.3, -1.2, 4.0] {
            let got = act.act(x, &e12()).unwrap();
            let want = AlgebraElement::from_rows(&[
                vec![c(0.0, 0.0), C64::from_polar(1.0, -x)],
                vec![c(0.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap();
            assert!((&got - &want).seminorm() < 1e-14);
        }
        let d = act.generator_power(1, &e12()).unwrap();
        let want = AlgebraElement::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!((&d - &want).seminorm() < 1e-15);
    }

    #[test]
    fn act_at_zero_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = AlgebraElement::random_hermitian(3, 1.0, &mut rng);
        let act = Action::unitary(h, Group::Line).unwrap();
        let a = AlgebraElement::random(3, 1.0, &mut rng);
        assert_eq!(act.act(0.0, &a).unwrap(), a);
    }

    #[test]
    fn rejects_bad_generators() {
        let not_herm = e12();
        assert!(Action::unitary(not_herm, Group::Line).is_err());
        assert!(Action::nilpotent(diag01(), Group::Line).is_err());
        assert!(Action::unitary(diag01(), Group::Circle).is_err());
        let periodic = AlgebraElement::diagonal(&[c(0.0, 0.0), c(std::f64::consts::TAU, 0.0)]);
        assert!(Action::unitary(periodic, Group::Circle).is_ok());
        assert!(Action::nilpotent(e12(), Group::Circle).is_err());
    }

    #[test]
    fn dimension_and_input_errors() {
        let act = Action::trivial(2, Group::Line);
        assert!(matches!(
            act.act(1.0, &AlgebraElement::identity(3)),
            Err(LabError::DimensionMismatch { .. })
        ));
        assert!(matches!(act.act(f64::NAN, &e12()), Err(LabError::InvalidInput(_))));
        assert!(act.generator_power(13, &e12()).is_err());
    }

    #[test]
    fn nilpotent_exponential_is_polynomial() {
        let act = Action::nilpotent(e12(), Group::Line).unwrap();
        let a = AlgebraElement::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        // e^{xN} = I + xN, so alpha_x(E21) = [[x, -x^2], [1, -x]]
        let x = 1.7;
        let got = act.act(x, &a).unwrap();
        let want = AlgebraElement::from_real_rows(&[&[x, -x * x], &[1.0, -x]]).unwrap();
        assert!((&got - &want).seminorm() < 1e-14);
    }

    #[test]
    fn expansion_reproduces_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = AlgebraElement::random_hermitian(3, 0.8, &mut rng);
        let n = AlgebraElement::from_real_rows(&[&[0.0, 0.4, -1.0], &[0.0, 0.0, 0.7], &[0.0, 0.0, 0.0]]).unwrap();
        let actions = [
            Action::unitary(h, Group::Line).unwrap(),
            Action::nilpotent(n, Group::Line).unwrap(),
            Action::trivial(3, Group::Line),
        ];
        let b = AlgebraElement::random(3, 1.0, &mut rng);
        for act in &actions {
            let exp = act.expansion();
            for &y in &[-2.5, 0.0, 0.9] {
                let mut sum = AlgebraElement::zeros(3);
                for t in &exp.terms {
                    let l = AlgebraElement::from_block(3, &t.left);
                    let r = AlgebraElement::from_block(3, &t.right);
                    sum = &sum + &(&(&l * &b) * &r).scale(t.profile.eval(y));
                }
                let direct = act.act(y, &b).unwrap();
                assert!((&sum - &direct).seminorm() < 1e-13, "{:?}", act.kind());
            }
        }
    }

    #[test]
    fn tempered_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xs: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5).collect();

        let triv = verify_tempered_bounds(&Action::trivial(2, Group::Line), &xs, 5, &mut rng).unwrap();
        assert!(triv.derivative_constants[1..].iter().all(|&c| c == 0.0));
        assert!(triv.growth_polynomial.iter().all(|&p| p == 1.0));

        let h = AlgebraElement::random_hermitian(2, 1.0, &mut rng);
        let uni = verify_tempered_bounds(&Action::unitary(h, Group::Line).unwrap(), &xs, 10, &mut rng).unwrap();
        let sup = uni.growth_ratios.iter().cloned().fold(0.0, f64::max);
        assert!((sup - 1.0).abs() < 1e-10);

        let nil = verify_tempered_bounds(&Action::nilpotent(e12(), Group::Line).unwrap(), &xs, 10, &mut rng).unwrap();
        for (x, r) in xs.iter().zip(&nil.growth_ratios) {
            assert!(*r <= (1.0 + x.abs()).powi(2) * (1.0 + 1e-12));
        }
    }
}
