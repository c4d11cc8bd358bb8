use serde::{Deserialize, Serialize};

use super::{check, relative, run_suite, Outcome, Suite, Trial};
use crate::algebra::{Action, Group};
use crate::block::C64;
use crate::crossed::CrossedElement;
use crate::error::Result;
use crate::omega::scalar::{
    convolution_j, convolution_k, convolution_pi, pointwise_j, pointwise_pi, pointwise_section,
};
use crate::omega::{iso_i1, map_iota, map_pi, tensor_j, TensorElement};
use crate::schwartz::{
    cumulative_integral_with_tol, differentiate, fourier_transform, fourier_transform_2d, hadamard_divide_with_tol,
    multiply_by_difference, Direction,
};
use crate::verify::config::SuiteConfig;
use crate::verify::report::VerificationReport;

pub(crate) const SCALAR_SEQUENCES: Suite = Suite {
    name: "scalar-sequences",
    reference: "Proposition: the scalar pointwise and convolution rows are short exact sequences exchanged by the Fourier transform",
    checks: &[
        check("pointwise-pi-after-j", "pi(j(f)) = 0 with j(f) = (x - y) f and pi(f)(x) = f(x, x)", 1e-12),
        check("pointwise-pi-after-section", "pi(f(x) exp(-(x - y)^2)) = f", 1e-12),
        check("pointwise-exactness", "F in ker pi equals j(F / (x - y))", 1e-7),
        check("convolution-j-matches-general", "scalar j = (d/dx - d/dy) equals iota for the trivial action", 1e-10),
        check("convolution-pi-matches-general", "scalar pi(f)(x) = int f(y, x - y) dy equals pi for the trivial action", 1e-10),
        check("convolution-k-matches-general", "k(f (x) g) = f' g - f g' equals I1 j(f (x) g) for the trivial action", 1e-10),
        check("convolution-pi-after-j", "pi o j = 0 in the convolution row", 1e-8),
        check("convolution-pi-after-k", "pi o k = 0 in the convolution row", 1e-8),
        check("fourier-exchange-j", "F2(j_conv F) = 2 pi i j_pointwise(F2 F)", 1e-8),
        check("fourier-exchange-pi", "F(pi_conv F) = pi_pointwise(F2 F)", 1e-8),
    ],
    grid: SuiteConfig::line_grid,
    trial: scalar_trial,
};

fn scalar_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let trivial = Action::trivial(1, Group::Line);
    let big = t.bifunction(1)?;
    let f = t.function(1)?;
    let g = t.function(1)?;
    let (nb, nf, ng) = (big.sup_norm(), f.sup_norm(), g.sup_norm());
    let mut out: Outcome = Vec::new();

    out.push(("pointwise-pi-after-j", relative((|| Ok(pointwise_pi(&pointwise_j(&big)?)?.sup_norm()))(), nb)));
    out.push((
        "pointwise-pi-after-section",
        relative((|| pointwise_pi(&pointwise_section(&f)?)?.distance(&f))(), nf),
    ));
    let r = (|| {
        let kernel = big.sub(&pointwise_section(&pointwise_pi(&big)?)?)?;
        let quotient = hadamard_divide_with_tol(&kernel, t.config.sequence.diag_tol)?;
        pointwise_j(&quotient)?.distance(&kernel)
    })();
    out.push(("pointwise-exactness", relative(r, nb)));

    let r = (|| convolution_j(&big)?.distance(&map_iota(&big, &trivial)?))();
    out.push(("convolution-j-matches-general", relative(r, nb)));
    let r = (|| convolution_pi(&big)?.distance(map_pi(&big, &trivial)?.func()))();
    out.push(("convolution-pi-matches-general", relative(r, nb)));
    let r = (|| {
        let tensor = TensorElement::single(CrossedElement::new(f.clone(), &trivial)?, CrossedElement::new(g.clone(), &trivial)?)?;
        convolution_k(&f, &g)?.distance(&iso_i1(&tensor_j(&tensor)?))
    })();
    out.push(("convolution-k-matches-general", relative(r, nf * ng)));
    let r = (|| Ok(convolution_pi(&convolution_j(&big)?)?.sup_norm()))();
    out.push(("convolution-pi-after-j", relative(r, nb)));
    let r = (|| Ok(convolution_pi(&convolution_k(&f, &g)?)?.sup_norm()))();
    out.push(("convolution-pi-after-k", relative(r, nf * ng)));

    let spectrum = fourier_transform_2d(&big, Direction::Forward);
    let r = (|| {
        let lhs = fourier_transform_2d(&convolution_j(&big)?, Direction::Forward)?;
        let rhs = pointwise_j(&spectrum.clone()?)?.scale(C64::new(0.0, std::f64::consts::TAU));
        lhs.distance(&rhs)
    })();
    out.push(("fourier-exchange-j", relative(r, nb)));
    let r = (|| {
        let lhs = fourier_transform(&convolution_pi(&big)?, Direction::Forward)?;
        lhs.distance(&pointwise_pi(&spectrum.clone()?)?)
    })();
    out.push(("fourier-exchange-pi", relative(r, nb)));
    Ok(out)
}

/// Which scalar row [`scalar_sequence_check`] reports on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarVariant {
    Pointwise,
    /// The convolution row, together with its Fourier exchange with the pointwise row.
    Convolution,
}

/// The checks of one scalar row, from a run of the `scalar-sequences` suite.
pub fn scalar_sequence_check(variant: ScalarVariant, config: &SuiteConfig) -> Result<VerificationReport> {
    let mut report = run_suite(SCALAR_SEQUENCES.name, config)?;
    report.checks.retain(|c| match variant {
        ScalarVariant::Pointwise => c.id.starts_with("pointwise-"),
        ScalarVariant::Convolution => !c.id.starts_with("pointwise-"),
    });
    report.passed = report.checks.iter().all(|c| c.passed);
    Ok(report)
}

pub(crate) const HADAMARD: Suite = Suite {
    name: "hadamard",
    reference: "Lemma: a function vanishing on the diagonal is (x - y) times a smooth function",
    checks: &[
        check("divide-explicit-factor", "((x - y) G) / (x - y) = G", 1e-8),
        check("multiply-after-divide", "(x - y) (F / (x - y)) = F for F vanishing on the diagonal", 1e-7),
        check("antiderivative-after-derivative", "int_{-L}^x f' = f", 1e-8),
        check("derivative-after-antiderivative", "d/dx int_{-L}^x g = g for g of zero mean", 1e-8),
    ],
    grid: SuiteConfig::line_grid,
    trial: hadamard_trial,
};

fn hadamard_trial(t: &mut Trial<'_>) -> Result<Outcome> {
    let grid = t.grid;
    let d = t.config.algebra.dim;
    let tol = t.config.sequence.diag_tol;
    let mean_tol = t.config.sequence.mean_zero_tol;
    let g = t.bifunction(d)?;
    let base = t.bifunction(d)?;
    let f = t.function(d)?;
    let mut out: Outcome = Vec::new();

    let r = (|| hadamard_divide_with_tol(&multiply_by_difference(&g), tol)?.distance(&g))();
    out.push(("divide-explicit-factor", relative(r, g.sup_norm())));

    let n = grid.points();
    let mut ideal = base.clone();
    for i in 0..n {
        let diag = base.block(i, i).to_vec();
        for j in 0..n {
            let u = grid.node(i) - grid.node(j);
            let w = (-u * u).exp();
            for (o, v) in ideal.block_mut(i, j).iter_mut().zip(&diag) {
                *o -= v * w;
            }
        }
    }
    let r = (|| multiply_by_difference(&hadamard_divide_with_tol(&ideal, tol)?).distance(&ideal))();
    out.push(("multiply-after-divide", relative(r, ideal.sup_norm())));

    let df = differentiate(&f);
    let r = (|| cumulative_integral_with_tol(&df.clone()?, mean_tol)?.distance(&f))();
    out.push(("antiderivative-after-derivative", relative(r, f.sup_norm())));
    let r = (|| {
        let df = df.clone()?;
        Ok((differentiate(&cumulative_integral_with_tol(&df, mean_tol)?)?.distance(&df)?, df.sup_norm()))
    })();
    out.push(("derivative-after-antiderivative", r.map(|(d, s)| if d == 0.0 { 0.0 } else { d / s })));
    Ok(out)
}
