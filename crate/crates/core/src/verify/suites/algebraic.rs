use rand::Rng;

use super::{check, relative, Outcome, Suite, Trial};
use crate::algebra::{verify_tempered_bounds, Action, ActionKind, AlgebraElement, Group};
use crate::block::C64;
use crate::crossed::{
    d_alpha, d_alpha_composite, iso_i, module_act_algebra, op_t, twisted_convolve_alt_with, twisted_convolve_with,
    CrossedElement, Quadrature, Side,
};
use crate::error::Result;
use crate::schwartz::{convolve, differentiate, fourier_transform, pointwise_multiply, Direction, SampledFunction};
use crate::verify::config::SuiteConfig;

fn alg_dist(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    (a - b).seminorm()
}

fn is_isometric(action: &Action) -> bool {
    action.kind() != ActionKind::NilpotentConjugation
}

pub(crate) const FOURIER: Suite = Suite {
    name: "fourier",
    reference: "Theorem: the Fourier transform exchanges pointwise product and convolution",
    checks: &[
        check("gaussian-fixed", "F(exp(-pi x^2)) = exp(-pi xi^2)", 1e-9),
        check("round-trip", "F^{-1} F f = f", 1e-10),
        check("parity", "F F f = f(-x)", 1e-9),
        check("homomorphism", "F(f g) = F f * F g", 1e-8),
        check("convolution-to-product", "F(f * g) = F f . F g", 1e-8),
    ],
    grid: SuiteConfig::line_grid,
    trial: fourier_trial,
};

fn fourier_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let dim = t.config.algebra.dim;
    let grid = t.grid;
    let f = t.function(dim)?;
    let g = t.function(dim)?;
    let nf = f.sup_norm();
    let ng = g.sup_norm();
    let mut out: Outcome = Vec::new();

    let id = AlgebraElement::identity(dim);
    let gauss = SampledFunction::from_scalar(&grid, &id, |x| C64::new((-std::f64::consts::PI * x * x).exp(), 0.0));
    out.push(("gaussian-fixed", fourier_transform(&gauss, Direction::Forward).and_then(|h| h.distance(&gauss))));

    let ff = fourier_transform(&f, Direction::Forward);
    out.push((
        "round-trip",
        relative(
            ff.clone().and_then(|h| fourier_transform(&h, Direction::Inverse)).and_then(|h| h.distance(&f)),
            nf,
        ),
    ));
    let parity = (|| {
        let twice = fourier_transform(&fourier_transform(&f, Direction::Forward)?, Direction::Forward)?;
        let mut reflected = SampledFunction::zeros(&grid, dim);
        for i in 0..grid.points() {
            if let Some(j) = grid.neg_index(i) {
                reflected.block_mut(i).copy_from_slice(f.block(j));
            }
        }
        twice.distance(&reflected)
    })();
    out.push(("parity", relative(parity, nf)));

    let hom = (|| {
        let lhs = fourier_transform(&pointwise_multiply(&f, &g)?, Direction::Forward)?;
        let rhs = convolve(&ff.clone()?, &fourier_transform(&g, Direction::Forward)?)?;
        lhs.distance(&rhs)
    })();
    out.push(("homomorphism", relative(hom, nf * ng)));
    let conv = (|| {
        let lhs = fourier_transform(&convolve(&f, &g)?, Direction::Forward)?;
        let rhs = pointwise_multiply(&ff.clone()?, &fourier_transform(&g, Direction::Forward)?)?;
        lhs.distance(&rhs)
    })();
    out.push(("convolution-to-product", relative(conv, nf * ng)));
    Ok(out)
}

pub(crate) const ACTION: Suite = Suite {
    name: "action",
    reference: "Definition: alpha is a tempered one-parameter automorphism group",
    checks: &[
        check("group-law", "alpha_x alpha_y = alpha_{x+y}", 1e-12),
        check("automorphism", "alpha_x(ab) = alpha_x(a) alpha_x(b)", 1e-12),
        check("generator-derivative", "d/dx alpha_x(a) at 0 equals alpha'_0(a)", 1e-8),
        check("periodicity", "alpha_{x+1} = alpha_x for actions of the circle", 1e-12),
        check(
            "tempered-bounds",
            "relative excess of ||alpha_x(a)|| over p(x)||a|| and of ||alpha^(k)_0(a)|| over C_k ||a||",
            1e-10,
        ),
        check("expansion", "alpha_y(b) = sum_m c_m(y) L_m b R_m", 1e-12),
        check("isometry", "||alpha_x(a)|| = ||a|| for unitary actions", 1e-12),
    ],
    grid: SuiteConfig::session_grid,
    trial: action_trial,
};

fn action_checks(action: &Action, t: &mut Trial<'_>, out: &mut Outcome) -> Result<()> {
    let dim = action.dim();
    let a = t.element(dim);
    let b = t.element(dim);
    let x: f64 = t.rng.random_range(-2.0..2.0);
    let y: f64 = t.rng.random_range(-2.0..2.0);

    let group = (|| {
        let lhs = action.act(x, &action.act(y, &a)?)?;
        let rhs = action.act(x + y, &a)?;
        Ok(alg_dist(&lhs, &rhs) / rhs.seminorm().max(a.seminorm()))
    })();
    out.push(("group-law", group));

    let auto = (|| {
        let lhs = action.act(x, &(&a * &b))?;
        let ax = action.act(x, &a)?;
        let bx = action.act(x, &b)?;
        Ok(alg_dist(&lhs, &(&ax * &bx)) / (ax.seminorm() * bx.seminorm()))
    })();
    out.push(("automorphism", auto));

    let deriv = (|| {
        let h = 1e-3;
        let at = |s: f64| action.act(s, &a);
        let stencil = &(&(&at(-2.0 * h)? - &at(2.0 * h)?) + &(&at(h)? - &at(-h)?).scale(C64::new(8.0, 0.0)))
            .scale(C64::new(1.0 / (12.0 * h), 0.0));
        Ok(alg_dist(stencil, &action.derivation(&a)?) / a.seminorm())
    })();
    out.push(("generator-derivative", deriv));

    if action.group() == Group::Circle {
        let per = (|| {
            let lhs = action.act(x + 1.0, &a)?;
            let rhs = action.act(x, &a)?;
            Ok(alg_dist(&lhs, &rhs).max(alg_dist(&action.act(1.0, &a)?, &a)) / a.seminorm())
        })();
        out.push(("periodicity", per));
    }

    let xs: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.5).collect();
    let bounds = verify_tempered_bounds(action, &xs, 4, &mut t.rng).map(|c| {
        let growth = c
            .growth_ratios
            .iter()
            .zip(&c.growth_polynomial)
            .map(|(r, p)| r / p)
            .fold(0.0, f64::max);
        let derivs = c
            .derivative_ratios
            .iter()
            .zip(&c.derivative_constants)
            .map(|(r, k)| if *k > 0.0 { r / k } else if *r > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max);
        (growth.max(derivs) - 1.0).max(0.0)
    });
    out.push(("tempered-bounds", bounds));

    let exp = (|| {
        let expansion = action.expansion();
        let mut sum = AlgebraElement::zeros(dim);
        for term in &expansion.terms {
            let l = AlgebraElement::new(dim, term.left.clone())?;
            let r = AlgebraElement::new(dim, term.right.clone())?;
            let piece = (&(&l * &b) * &r).scale(term.profile.eval(y));
            sum = &sum + &piece;
        }
        let rhs = action.act(y, &b)?;
        Ok(alg_dist(&sum, &rhs) / rhs.seminorm().max(b.seminorm()))
    })();
    out.push(("expansion", exp));

    if is_isometric(action) {
        let iso = action.act(x, &a).map(|ax| (ax.seminorm() - a.seminorm()).abs() / a.seminorm());
        out.push(("isometry", iso));
    }
    Ok(())
}

fn action_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let action = t.action(t.grid.group())?;
    let mut out = Vec::new();
    action_checks(&action, t, &mut out)?;
    Ok(out)
}

fn crossed_pair(t: &mut Trial<'_>, action: &Action) -> Result<(CrossedElement, CrossedElement, CrossedElement)> {
    Ok((t.crossed(action)?, t.crossed(action)?, t.crossed(action)?))
}

pub(crate) const CROSSED_ALGEBRA: Suite = Suite {
    name: "crossed-algebra",
    reference: "Proposition: S(G, A; alpha) is an algebra isomorphic to its alternative form",
    checks: &[
        check("associativity", "(f *_a g) *_a h = f *_a (g *_a h)", 1e-8),
        check("iso-homomorphism", "i(f *_a g) = i(f) *'_a i(g)", 1e-8),
        check("iso-round-trip", "i^{-1} i f = f", 1e-12),
        check("oracle-twisted", "fast and direct quadratures of *_a agree", 1e-12),
        check("oracle-alternative", "fast and direct quadratures of *'_a agree", 1e-12),
        check("trivial-twisted", "*_a = * for the trivial action", 1e-12),
        check("trivial-alternative", "*'_a = * for the trivial action", 1e-12),
        check("trivial-derivative", "d_alpha = d/dx for the trivial action", 1e-12),
        check("trivial-twists", "T = i = Id for the trivial action", 1e-12),
        check("trivial-module", "f o a = f a for the trivial action", 1e-12),
        check("module-associativity", "(a o f) o b = a o (f o b)", 1e-10),
        check("module-compatibility", "(a o f) *_a g = a o (f *_a g) and f *_a (g o a) = (f *_a g) o a", 1e-8),
        check("balanced-product", "(f o a) *_a g = f *_a (a o g)", 1e-8),
    ],
    grid: SuiteConfig::session_grid,
    trial: crossed_trial,
};

fn crossed_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let action = t.action(t.grid.group())?;
    let quad = t.config.quadrature();
    let (f, g, h) = crossed_pair(t, &action)?;
    let (nf, ng, nh) = (f.sup_norm(), g.sup_norm(), h.sup_norm());
    let a = t.element(action.dim());
    let b = t.element(action.dim());
    let mut out: Outcome = Vec::new();
    let star = |u: &CrossedElement, v: &CrossedElement| twisted_convolve_with(u, v, quad);

    let assoc = (|| star(&star(&f, &g)?, &h)?.distance(&star(&f, &star(&g, &h)?)?))();
    out.push(("associativity", relative(assoc, nf * ng * nh)));

    let hom = (|| {
        let lhs = iso_i(&star(&f, &g)?, Direction::Forward);
        let rhs = twisted_convolve_alt_with(&iso_i(&f, Direction::Forward), &iso_i(&g, Direction::Forward), quad)?;
        lhs.distance(&rhs)
    })();
    out.push(("iso-homomorphism", relative(hom, nf * ng)));
    let rt = iso_i(&iso_i(&f, Direction::Forward), Direction::Inverse).distance(&f);
    out.push(("iso-round-trip", relative(rt, nf)));

    let oracle = (|| {
        twisted_convolve_with(&f, &g, Quadrature::Fast)?.distance(&twisted_convolve_with(&f, &g, Quadrature::Direct)?)
    })();
    out.push(("oracle-twisted", relative(oracle, nf * ng)));
    let oracle_alt = (|| {
        twisted_convolve_alt_with(&f, &g, Quadrature::Fast)?
            .distance(&twisted_convolve_alt_with(&f, &g, Quadrature::Direct)?)
    })();
    out.push(("oracle-alternative", relative(oracle_alt, nf * ng)));

    let trivial = Action::trivial(action.dim(), action.group());
    let (tf, tg) = (CrossedElement::new(f.func().clone(), &trivial)?, CrossedElement::new(g.func().clone(), &trivial)?);
    let plain = convolve(f.func(), g.func());
    let tw = (|| star(&tf, &tg)?.func().distance(&plain.clone()?))();
    out.push(("trivial-twisted", relative(tw, nf * ng)));
    let alt = (|| twisted_convolve_alt_with(&tf, &tg, quad)?.func().distance(&plain.clone()?))();
    out.push(("trivial-alternative", relative(alt, nf * ng)));
    let der = (|| d_alpha(&tf)?.func().distance(&differentiate(f.func())?))();
    out.push(("trivial-derivative", relative(der, nf)));
    let twists = (|| {
        let mut worst = 0.0f64;
        for dir in [Direction::Forward, Direction::Inverse] {
            worst = worst.max(op_t(&tf, dir).distance(&tf)?);
            worst = worst.max(iso_i(&tf, dir).distance(&tf)?);
        }
        Ok(worst)
    })();
    out.push(("trivial-twists", relative(twists, nf)));
    let module = (|| module_act_algebra(Side::Right, &a, &tf)?.func().distance(&f.func().right_mul(&a)?))();
    out.push(("trivial-module", relative(module, nf * a.seminorm())));

    let scale_ab = nf * a.seminorm() * b.seminorm();
    let massoc = (|| {
        let lhs = module_act_algebra(Side::Right, &b, &module_act_algebra(Side::Left, &a, &f)?)?;
        let rhs = module_act_algebra(Side::Left, &a, &module_act_algebra(Side::Right, &b, &f)?)?;
        lhs.distance(&rhs)
    })();
    out.push(("module-associativity", relative(massoc, scale_ab)));
    let compat = (|| {
        let fg = star(&f, &g)?;
        let left = star(&module_act_algebra(Side::Left, &a, &f)?, &g)?.distance(&module_act_algebra(Side::Left, &a, &fg)?)?;
        let right =
            star(&f, &module_act_algebra(Side::Right, &a, &g)?)?.distance(&module_act_algebra(Side::Right, &a, &fg)?)?;
        Ok(left.max(right))
    })();
    out.push(("module-compatibility", relative(compat, nf * ng * a.seminorm())));
    let balanced = (|| {
        star(&module_act_algebra(Side::Right, &a, &f)?, &g)?.distance(&star(&f, &module_act_algebra(Side::Left, &a, &g)?)?)
    })();
    out.push(("balanced-product", relative(balanced, nf * ng * a.seminorm())));
    Ok(out)
}

pub(crate) const OPERATOR_T: Suite = Suite {
    name: "operator-T",
    reference: "Proposition: T(f)(x) = alpha_x(f(x)) conjugates d/dx into d_alpha",
    checks: &[
        check("round-trip", "T T^{-1} f = f", 1e-12),
        check("derivative-forms", "T (d/dx) T^{-1} f = f' - alpha'_0(f)", 1e-8),
        check("intertwining", "f' *_a g = f *_a d_alpha(g)", 1e-8),
        check("isometry", "||T f||_sup = ||f||_sup for unitary actions", 1e-10),
    ],
    grid: SuiteConfig::session_grid,
    trial: operator_t_trial,
};

fn operator_t_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let action = t.action(t.grid.group())?;
    let quad = t.config.quadrature();
    let f = t.crossed(&action)?;
    let g = t.crossed(&action)?;
    let (nf, ng) = (f.sup_norm(), g.sup_norm());
    let mut out: Outcome = Vec::new();
    let rt = op_t(&op_t(&f, Direction::Inverse), Direction::Forward).distance(&f);
    out.push(("round-trip", relative(rt, nf)));
    let forms = (|| d_alpha(&f)?.distance(&d_alpha_composite(&f)?))();
    out.push(("derivative-forms", relative(forms, nf)));
    let inter = (|| {
        let df = f.with_func(differentiate(f.func())?);
        twisted_convolve_with(&df, &g, quad)?.distance(&twisted_convolve_with(&f, &d_alpha(&g)?, quad)?)
    })();
    out.push(("intertwining", relative(inter, nf * ng)));
    if is_isometric(&action) {
        let tf = op_t(&f, Direction::Forward);
        out.push(("isometry", Ok((tf.sup_norm() - nf).abs() / nf)));
    }
    Ok(out)
}
