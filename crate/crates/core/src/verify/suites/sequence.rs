use super::{check, relative, Check, Outcome, Suite, Trial};
use crate::algebra::{Action, AlgebraElement, Group};
use crate::crossed::{
    bimodule_act_bifunction_with, module_act_algebra, twisted_convolve_with, BiAction, CrossedElement, Quadrature, Side,
};
use crate::error::Result;
use crate::omega::{
    homotopy_beta_with_tol, iso_i1, kernel_projection, map_iota, map_pi, sect_rho, tensor_j, tensor_m, BumpFunction,
    TensorElement,
};
use crate::schwartz::{Axis, BiSampledFunction};
use crate::verify::config::SuiteConfig;

fn bump(t: &Trial<'_>) -> Result<BumpFunction> {
    let radius = match t.grid.group() {
        Group::Line => 1.0,
        Group::Circle => 0.25,
    };
    BumpFunction::new(&t.grid, radius, t.config.sequence.bump_sharpness)
}

struct Ctx<'a> {
    action: &'a Action,
    quad: Quadrature,
    bump: BumpFunction,
    mean_zero_tol: f64,
}

impl Ctx<'_> {
    fn act(&self, actor: BiAction<'_>, f: &BiSampledFunction) -> Result<BiSampledFunction> {
        bimodule_act_bifunction_with(actor, f, self.action, self.quad)
    }

    fn star(&self, f: &CrossedElement, g: &CrossedElement) -> Result<CrossedElement> {
        twisted_convolve_with(f, g, self.quad)
    }

    fn beta(&self, axis: Axis, f: &BiSampledFunction) -> Result<BiSampledFunction> {
        homotopy_beta_with_tol(axis, f, self.action, &self.bump, self.mean_zero_tol)
    }

    fn rho(&self, axis: Axis, f: &CrossedElement) -> Result<BiSampledFunction> {
        sect_rho(axis, f, &self.bump)
    }

    fn iota(&self, f: &BiSampledFunction) -> Result<BiSampledFunction> {
        map_iota(f, self.action)
    }

    fn pi(&self, f: &BiSampledFunction) -> Result<CrossedElement> {
        map_pi(f, self.action)
    }

    fn m(&self, t: &TensorElement) -> Result<CrossedElement> {
        tensor_m(t, self.quad)
    }
}

fn context<'a>(t: &Trial<'_>, action: &'a Action) -> Result<Ctx<'a>> {
    Ok(Ctx {
        action,
        quad: t.config.quadrature(),
        bump: bump(t)?,
        mean_zero_tol: t.config.sequence.mean_zero_tol,
    })
}

fn left(a: &AlgebraElement, f: &CrossedElement) -> Result<CrossedElement> {
    module_act_algebra(Side::Left, a, f)
}

fn right(a: &AlgebraElement, f: &CrossedElement) -> Result<CrossedElement> {
    module_act_algebra(Side::Right, a, f)
}

fn worst(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0f64, |w, v| Ok(w.max(v?)))
}

pub(crate) const BIMODULE: Suite = Suite {
    name: "bimodule",
    reference: "Lemma: S(G^2, A)_alpha is an S(G, A; alpha)-bimodule and the sequence maps are bimodule homomorphisms",
    checks: &[
        check("algebra-associativity", "(a o F) o b = a o (F o b)", 1e-10),
        check("crossed-algebra-compatibility", "(H o F) o a = H o (F o a) and (a o F) o H = a o (F o H)", 1e-8),
        check("algebra-crossed-composition", "(a o H) o F = a o (H o F) and F o (H o a) = (F o H) o a", 1e-8),
        check("left-crossed-module", "(H *_a K) o F = H o (K o F)", 1e-7),
        check("right-crossed-module", "F o (H *_a K) = (F o H) o K", 1e-7),
        check("crossed-commute", "(H o F) o K = H o (F o K)", 1e-8),
        check("i1-left-crossed", "I1((H *_a F) (x) G) = H o I1(F (x) G)", 1e-8),
        check("i1-right-crossed", "I1(F (x) (G *_a K)) = I1(F (x) G) o K", 1e-8),
        check("i1-algebra", "I1((a o F) (x) G) = a o I1(F (x) G) and I1(F (x) (G o a)) = I1(F (x) G) o a", 1e-10),
        check("iota-bimodule", "iota commutes with both algebra and both crossed actions", 1e-7),
        check("pi-bimodule", "pi(H o F) = H *_a pi(F), pi(F o H) = pi(F) *_a H and likewise for a", 1e-7),
        check("rho-x-homomorphism", "rho_x(H *_a f) = H o rho_x(f) and rho_x(f o a) = rho_x(f) o a", 1e-7),
        check("rho-y-homomorphism", "rho_y(a o f) = a o rho_y(f) and rho_y(f *_a H) = rho_y(f) o H", 1e-7),
        check("beta-x-homomorphism", "beta_x(H o F) = H o beta_x(F) and beta_x(F o a) = beta_x(F) o a", 1e-7),
        check("beta-y-homomorphism", "beta_y(a o F) = a o beta_y(F) and beta_y(F o H) = beta_y(F) o H", 1e-7),
    ],
    grid: SuiteConfig::session_grid,
    trial: bimodule_trial,
};

fn bimodule_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let action = t.action(t.grid.group())?;
    let c = context(t, &action)?;
    let d = action.dim();
    let f = t.bifunction(d)?;
    let h = t.crossed(&action)?;
    let k = t.crossed(&action)?;
    let g1 = t.crossed(&action)?;
    let g2 = t.crossed(&action)?;
    let a = t.element(d);
    let b = t.element(d);
    let (nf, nh, nk, na, nb) = (f.sup_norm(), h.sup_norm(), k.sup_norm(), a.seminorm(), b.seminorm());
    let (n1, n2) = (g1.sup_norm(), g2.sup_norm());
    use BiAction::*;
    let mut out: Outcome = Vec::new();

    let r = (|| c.act(RightAlgebra(&b), &c.act(LeftAlgebra(&a), &f)?)?.distance(&c.act(LeftAlgebra(&a), &c.act(RightAlgebra(&b), &f)?)?))();
    out.push(("algebra-associativity", relative(r, na * nf * nb)));

    let hf = c.act(LeftCrossed(&h), &f);
    let fh = c.act(RightCrossed(&h), &f);
    let r = (|| {
        let hf = hf.clone()?;
        let fh = fh.clone()?;
        let one = c.act(RightAlgebra(&a), &hf)?.distance(&c.act(LeftCrossed(&h), &c.act(RightAlgebra(&a), &f)?)?)?;
        let two = c.act(RightCrossed(&h), &c.act(LeftAlgebra(&a), &f)?)?.distance(&c.act(LeftAlgebra(&a), &fh)?)?;
        Ok(one.max(two))
    })();
    out.push(("crossed-algebra-compatibility", relative(r, na * nf * nh)));
    let r = (|| {
        let one = c.act(LeftCrossed(&left(&a, &h)?), &f)?.distance(&c.act(LeftAlgebra(&a), &hf.clone()?)?)?;
        let two = c.act(RightCrossed(&right(&a, &h)?), &f)?.distance(&c.act(RightAlgebra(&a), &fh.clone()?)?)?;
        Ok(one.max(two))
    })();
    out.push(("algebra-crossed-composition", relative(r, na * nf * nh)));
    let r = (|| c.act(LeftCrossed(&c.star(&h, &k)?), &f)?.distance(&c.act(LeftCrossed(&h), &c.act(LeftCrossed(&k), &f)?)?))();
    out.push(("left-crossed-module", relative(r, nh * nk * nf)));
    let r = (|| c.act(RightCrossed(&c.star(&h, &k)?), &f)?.distance(&c.act(RightCrossed(&k), &fh.clone()?)?))();
    out.push(("right-crossed-module", relative(r, nh * nk * nf)));
    let r = (|| c.act(RightCrossed(&k), &hf.clone()?)?.distance(&c.act(LeftCrossed(&h), &c.act(RightCrossed(&k), &f)?)?))();
    out.push(("crossed-commute", relative(r, nh * nk * nf)));

    let t1 = TensorElement::single(g1.clone(), g2.clone())?;
    let i1 = iso_i1(&t1);
    let r = (|| iso_i1(&t1.act_left_crossed(&h, c.quad)?).distance(&c.act(LeftCrossed(&h), &i1)?))();
    out.push(("i1-left-crossed", relative(r, nh * n1 * n2)));
    let r = (|| iso_i1(&t1.act_right_crossed(&k, c.quad)?).distance(&c.act(RightCrossed(&k), &i1)?))();
    out.push(("i1-right-crossed", relative(r, nk * n1 * n2)));
    let r = (|| {
        let one = iso_i1(&t1.act_left_algebra(&a)?).distance(&c.act(LeftAlgebra(&a), &i1)?)?;
        let two = iso_i1(&t1.act_right_algebra(&a)?).distance(&c.act(RightAlgebra(&a), &i1)?)?;
        Ok(one.max(two))
    })();
    out.push(("i1-algebra", relative(r, na * n1 * n2)));

    let iota_f = c.iota(&f);
    let r = (|| {
        let iota_f = iota_f.clone()?;
        worst([
            relative(c.iota(&hf.clone()?)?.distance(&c.act(LeftCrossed(&h), &iota_f)?), nh * nf),
            relative(c.iota(&fh.clone()?)?.distance(&c.act(RightCrossed(&h), &iota_f)?), nh * nf),
            relative(c.iota(&c.act(LeftAlgebra(&a), &f)?)?.distance(&c.act(LeftAlgebra(&a), &iota_f)?), na * nf),
            relative(c.iota(&c.act(RightAlgebra(&a), &f)?)?.distance(&c.act(RightAlgebra(&a), &iota_f)?), na * nf),
        ])
    })();
    out.push(("iota-bimodule", r));
    let r = (|| {
        let pf = c.pi(&f)?;
        worst([
            relative(c.pi(&hf.clone()?)?.distance(&c.star(&h, &pf)?), nh * nf),
            relative(c.pi(&fh.clone()?)?.distance(&c.star(&pf, &h)?), nh * nf),
            relative(c.pi(&c.act(LeftAlgebra(&a), &f)?)?.distance(&left(&a, &pf)?), na * nf),
            relative(c.pi(&c.act(RightAlgebra(&a), &f)?)?.distance(&right(&a, &pf)?), na * nf),
        ])
    })();
    out.push(("pi-bimodule", r));

    let r = (|| {
        let rho = c.rho(Axis::X, &g1)?;
        worst([
            relative(c.rho(Axis::X, &c.star(&h, &g1)?)?.distance(&c.act(LeftCrossed(&h), &rho)?), nh * n1),
            relative(c.rho(Axis::X, &right(&a, &g1)?)?.distance(&c.act(RightAlgebra(&a), &rho)?), na * n1),
        ])
    })();
    out.push(("rho-x-homomorphism", r));
    let r = (|| {
        let rho = c.rho(Axis::Y, &g1)?;
        worst([
            relative(c.rho(Axis::Y, &left(&a, &g1)?)?.distance(&c.act(LeftAlgebra(&a), &rho)?), na * n1),
            relative(c.rho(Axis::Y, &c.star(&g1, &h)?)?.distance(&c.act(RightCrossed(&h), &rho)?), nh * n1),
        ])
    })();
    out.push(("rho-y-homomorphism", r));
    let r = (|| {
        let beta = c.beta(Axis::X, &f)?;
        worst([
            relative(c.beta(Axis::X, &hf.clone()?)?.distance(&c.act(LeftCrossed(&h), &beta)?), nh * nf),
            relative(c.beta(Axis::X, &c.act(RightAlgebra(&a), &f)?)?.distance(&c.act(RightAlgebra(&a), &beta)?), na * nf),
        ])
    })();
    out.push(("beta-x-homomorphism", r));
    let r = (|| {
        let beta = c.beta(Axis::Y, &f)?;
        worst([
            relative(c.beta(Axis::Y, &c.act(LeftAlgebra(&a), &f)?)?.distance(&c.act(LeftAlgebra(&a), &beta)?), na * nf),
            relative(c.beta(Axis::Y, &fh.clone()?)?.distance(&c.act(RightCrossed(&h), &beta)?), nh * nf),
        ])
    })();
    out.push(("beta-y-homomorphism", r));
    Ok(out)
}

pub(crate) const TENSOR: Suite = Suite {
    name: "tensor",
    reference: "Proposition: I1 identifies the balanced tensor square with S(G^2, A)_alpha and carries j, m to iota, pi",
    checks: &[
        check("i1-balanced", "I1((F o a) (x) G) = I1(F (x) (a o G))", 1e-10),
        check("i1-bilinear", "I1(s + t) = I1(s) + I1(t)", 1e-14),
        check("m-balanced", "m((F o a) (x) G) = m(F (x) (a o G))", 1e-8),
        check("m-crossed-balanced", "m((F *_a K) (x) G) = m(F (x) (K *_a G))", 1e-8),
        check("j-balanced", "I1 j((F o a) (x) G) = I1 j(F (x) (a o G))", 1e-8),
        check("diagram-iota", "I1 o j = iota o I1", 1e-8),
        check("diagram-pi", "pi o I1 = m", 1e-8),
        check("j-left-module", "I1 j((H *_a F) (x) G) = H o I1 j(F (x) G)", 1e-8),
        check("j-right-module", "I1 j(F (x) (G *_a H)) = I1 j(F (x) G) o H", 1e-8),
        check("m-bimodule", "m((H *_a F) (x) G) = H *_a m(F (x) G) and m(F (x) (G *_a H)) = m(F (x) G) *_a H", 1e-8),
        check("m-gaussian", "m(g (x) g) for g = exp(-x^2) and the trivial action is sqrt(pi/2) exp(-x^2/2)", 1e-8),
    ],
    grid: SuiteConfig::session_grid,
    trial: tensor_trial,
};

fn tensor_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let action = t.action(t.grid.group())?;
    let c = context(t, &action)?;
    let d = action.dim();
    let f = t.crossed(&action)?;
    let g = t.crossed(&action)?;
    let f2 = t.crossed(&action)?;
    let g2 = t.crossed(&action)?;
    let h = t.crossed(&action)?;
    let a = t.element(d);
    let (nf, ng, nh, na) = (f.sup_norm(), g.sup_norm(), h.sup_norm(), a.seminorm());
    let s = nf * ng;
    let mut out: Outcome = Vec::new();

    let fa_g = TensorElement::single(right(&a, &f)?, g.clone())?;
    let f_ag = TensorElement::single(f.clone(), left(&a, &g)?)?;
    out.push(("i1-balanced", relative(iso_i1(&fa_g).distance(&iso_i1(&f_ag)), na * s)));
    let t1 = TensorElement::single(f.clone(), g.clone())?;
    let t2 = TensorElement::single(f2.clone(), g2.clone())?;
    let r = (|| iso_i1(&t1.concat(&t2)?).distance(&iso_i1(&t1).add(&iso_i1(&t2))?))();
    out.push(("i1-bilinear", relative(r, s + f2.sup_norm() * g2.sup_norm())));
    let r = (|| c.m(&fa_g)?.distance(&c.m(&f_ag)?))();
    out.push(("m-balanced", relative(r, na * s)));
    let r = (|| {
        let lhs = TensorElement::single(c.star(&f, &h)?, g.clone())?;
        let rhs = TensorElement::single(f.clone(), c.star(&h, &g)?)?;
        c.m(&lhs)?.distance(&c.m(&rhs)?)
    })();
    out.push(("m-crossed-balanced", relative(r, nh * s)));
    let r = (|| iso_i1(&tensor_j(&fa_g)?).distance(&iso_i1(&tensor_j(&f_ag)?)))();
    out.push(("j-balanced", relative(r, na * s)));
    let r = (|| iso_i1(&tensor_j(&t1)?).distance(&c.iota(&iso_i1(&t1))?))();
    out.push(("diagram-iota", relative(r, s)));
    let r = (|| c.pi(&iso_i1(&t1))?.distance(&c.m(&t1)?))();
    out.push(("diagram-pi", relative(r, s)));
    let j1 = tensor_j(&t1).map(|j| iso_i1(&j));
    let r = (|| {
        let lhs = iso_i1(&tensor_j(&t1.act_left_crossed(&h, c.quad)?)?);
        lhs.distance(&c.act(BiAction::LeftCrossed(&h), &j1.clone()?)?)
    })();
    out.push(("j-left-module", relative(r, nh * s)));
    let r = (|| {
        let lhs = iso_i1(&tensor_j(&t1.act_right_crossed(&h, c.quad)?)?);
        lhs.distance(&c.act(BiAction::RightCrossed(&h), &j1.clone()?)?)
    })();
    out.push(("j-right-module", relative(r, nh * s)));
    let r = (|| {
        let m = c.m(&t1)?;
        worst([
            relative(c.m(&t1.act_left_crossed(&h, c.quad)?)?.distance(&c.star(&h, &m)?), nh * s),
            relative(c.m(&t1.act_right_crossed(&h, c.quad)?)?.distance(&c.star(&m, &h)?), nh * s),
        ])
    })();
    out.push(("m-bimodule", r));
    if t.grid.group() == Group::Line {
        let r = (|| {
            let trivial = Action::trivial(d, Group::Line);
            let id = AlgebraElement::identity(d);
            let gauss = |w: f64, s: f64| {
                crate::schwartz::SampledFunction::from_scalar(&t.grid, &id, move |x| {
                    crate::block::C64::new(w * (-s * x * x).exp(), 0.0)
                })
            };
            let e = CrossedElement::new(gauss(1.0, 1.0), &trivial)?;
            let expected = gauss((std::f64::consts::PI / 2.0).sqrt(), 0.5);
            tensor_m(&TensorElement::single(e.clone(), e)?, c.quad)?.func().distance(&expected)
        })();
        out.push(("m-gaussian", r));
    }
    Ok(out)
}

macro_rules! sequence_checks {
    ($base:expr, $pr:expr, $bi:expr, $split:expr) => {
        &[
            check("m-after-j", "m o j = 0", $base),
            check("pi-after-iota", "pi o iota = 0", $base),
            check("pi-after-rho-x", "pi o rho_x = Id", $pr),
            check("pi-after-rho-y", "pi o rho_y = Id", $pr),
            check("beta-x-after-iota", "beta_x o iota = Id", $bi),
            check("beta-y-after-iota", "beta_y o iota = Id", $bi),
            check("splitting-x", "iota o beta_x + rho_x o pi = Id", $split),
            check("splitting-y", "iota o beta_y + rho_y o pi = Id", $split),
            check("beta-x-after-iota-corrected", "beta_x o iota = Id - P with P(F)(x, y) = alpha_{-x}(pi(F)(x + y))", $bi),
            check("beta-y-after-iota-corrected", "beta_y o iota = Id - P with P(F)(x, y) = alpha_{-x}(pi(F)(x + y))", $bi),
        ]
    };
}

const LINE_CHECKS: &[Check] = sequence_checks!(1e-8, 1e-7, 1e-6, 1e-6);
const CIRCLE_CHECKS: &[Check] = sequence_checks!(1e-9, 1e-9, 1e-9, 1e-9);

pub(crate) const EXACT_SEQUENCE_LINE: Suite = Suite {
    name: "exact-sequence-line",
    reference: "Theorem: rows are short exact sequences (G = R), split by rho and beta",
    checks: LINE_CHECKS,
    grid: SuiteConfig::line_grid,
    trial: sequence_trial,
};

pub(crate) const EXACT_SEQUENCE_CIRCLE: Suite = Suite {
    name: "exact-sequence-circle",
    reference: "Theorem: rows are short exact sequences (G = T), split by rho and beta",
    checks: CIRCLE_CHECKS,
    grid: SuiteConfig::circle_grid,
    trial: sequence_trial,
};

/// The sequence axioms on `t.grid`, shared by both groups.
pub(crate) fn sequence_outcome(t: &mut Trial<'_>, action: &Action) -> Result<Outcome> {
    let c = context(t, action)?;
    let d = action.dim();
    let big = t.bifunction(d)?;
    let f = t.crossed(action)?;
    let tensor = TensorElement::new(vec![(t.crossed(action)?, t.crossed(action)?), (t.crossed(action)?, t.crossed(action)?)])?;
    let nb = big.sup_norm();
    let nf = f.sup_norm();
    let mut out: Outcome = Vec::new();

    out.push(("m-after-j", relative((|| Ok(c.m(&tensor_j(&tensor)?)?.sup_norm()))(), tensor.scale())));
    let iota = c.iota(&big);
    out.push(("pi-after-iota", relative((|| Ok(c.pi(&iota.clone()?)?.sup_norm()))(), nb)));
    for (id, axis) in [("pi-after-rho-x", Axis::X), ("pi-after-rho-y", Axis::Y)] {
        out.push((id, relative((|| c.pi(&c.rho(axis, &f)?)?.distance(&f))(), nf)));
    }
    let pi_big = c.pi(&big);
    let projection = kernel_projection(&big, action);
    for (axis, plain, corrected, split) in [
        (Axis::X, "beta-x-after-iota", "beta-x-after-iota-corrected", "splitting-x"),
        (Axis::Y, "beta-y-after-iota", "beta-y-after-iota-corrected", "splitting-y"),
    ] {
        let bi = iota.clone().and_then(|i| c.beta(axis, &i));
        out.push((plain, relative((|| bi.clone()?.distance(&big))(), nb)));
        if t.grid.group() == Group::Circle {
            let r = (|| bi.clone()?.distance(&big.sub(&projection.clone()?)?))();
            out.push((corrected, relative(r, nb)));
        }
        let r = (|| {
            let lhs = c.iota(&c.beta(axis, &big)?)?.add(&c.rho(axis, &pi_big.clone()?)?)?;
            lhs.distance(&big)
        })();
        out.push((split, relative(r, nb)));
    }
    Ok(out)
}

fn sequence_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let action = t.action(t.grid.group())?;
    sequence_outcome(t, &action)
}

