//! The scale-invariant cylinder functionals and the criterion quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldlab::{classify_exponents, CriterionKind, CylinderQuadrature};
use super::norms::{ball_mean, mixed_norm, mixed_norm_centered, FieldRef};
use super::prepared::Prepared;

/// The functional ladder entries, named as they appear in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Functional {
    A,
    E,
    C,
    CTilde,
    D,
    GTilde,
    G1,
    W,
    W1,
    WTilde1,
}

impl Functional {
    pub const ALL: [Functional; 10] = [
        Functional::A,
        Functional::E,
        Functional::C,
        Functional::CTilde,
        Functional::D,
        Functional::GTilde,
        Functional::G1,
        Functional::W,
        Functional::W1,
        Functional::WTilde1,
    ];

    /// Stable report label.
    pub fn label(&self) -> &'static str {
        match self {
            Functional::A => "A",
            Functional::E => "E",
            Functional::C => "C",
            Functional::CTilde => "Ctilde",
            Functional::D => "D",
            Functional::GTilde => "Gtilde",
            Functional::G1 => "G1",
            Functional::W => "W",
            Functional::W1 => "W1",
            Functional::WTilde1 => "Wtilde1",
        }
    }
}

/// Exponent pair on the borderline family `3/p + 2/q = 3` that parametrizes
/// the starred functionals. The Sobolev shift `p*` and the down shift `p#`
/// follow from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorderlinePair {
    pub p: f64,
    pub q: f64,
}

impl BorderlinePair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::ExponentRegime(format!("q = {q} below 1")));
        }
        let s = 3.0 / p + 2.0 / q;
        if (s - 3.0).abs() > 1e-9 {
            return Err(Error::ExponentRegime(format!(
                "(p, q) = ({p}, {q}) has 3/p + 2/q = {s}, need 3"
            )));
        }
        Ok(BorderlinePair { p, q })
    }

    /// The unique borderline pair with the given `q in [1, inf]`.
    pub fn from_q(q: f64) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::ExponentRegime(format!("q = {q} below 1")));
        }
        let p = 3.0 / (3.0 - 2.0 / q);
        Ok(BorderlinePair { p, q })
    }

    /// `p* = 3p/(3-p)`; infinite at `p = 3` (that is `q = 1`).
    pub fn p_star(&self) -> f64 {
        if self.p >= 3.0 {
            f64::INFINITY
        } else {
            3.0 * self.p / (3.0 - self.p)
        }
    }

    /// `p# = 3p/(3+p)`, defined on the gradient-of-vorticity branch `q <= 2`.
    pub fn p_sharp(&self) -> Option<f64> {
        if self.q <= 2.0 {
            Some(3.0 * self.p / (3.0 + self.p))
        } else {
            None
        }
    }
}

fn sup_kinetic(prep: &Prepared, quad: &CylinderQuadrature) -> f64 {
    let u = prep.u();
    let mut sup = 0.0f64;
    for j in quad.window.sup_slices() {
        let mut acc = 0.0;
        for cell in &quad.ball.cells {
            let mut m2 = 0.0;
            for a in 0..3 {
                let v = u.data[[j, cell.iz, cell.iy, cell.ix, a]];
                m2 += v * v;
            }
            acc += cell.weight * m2;
        }
        sup = sup.max(acc);
    }
    sup
}

/// Evaluate one functional over the cylinder. `exps` feeds the starred
/// entries and may be omitted for `A, E, C, Ctilde, D`.
pub fn functional(
    name: Functional,
    prep: &Prepared,
    quad: &CylinderQuadrature,
    exps: Option<&BorderlinePair>,
) -> Result<f64> {
    let r = quad.cylinder.r;
    let need_exps = || {
        exps.ok_or_else(|| {
            Error::ExponentRegime(format!("functional {} needs an exponent pair", name.label()))
        })
    };
    match name {
        Functional::A => Ok(sup_kinetic(prep, quad) / r),
        Functional::E => {
            let n = mixed_norm(FieldRef::Scalar(prep.grad_u_mag()), quad, 2.0, 2.0)?;
            Ok(n * n / r)
        }
        Functional::C => {
            let n = mixed_norm(FieldRef::Vector(prep.u()), quad, 3.0, 3.0)?;
            Ok(n.powi(3) / (r * r))
        }
        Functional::CTilde => {
            let n = mixed_norm_centered(prep.u(), quad, 3.0, 3.0)?;
            Ok(n.powi(3) / (r * r))
        }
        Functional::D => {
            let n = mixed_norm(FieldRef::Scalar(prep.p()?), quad, 1.5, 1.5)?;
            Ok(n.powf(1.5) / (r * r))
        }
        Functional::GTilde => {
            let e = need_exps()?;
            Ok(mixed_norm_centered(prep.u(), quad, e.p_star(), e.q)? / r)
        }
        Functional::G1 => {
            let e = need_exps()?;
            Ok(mixed_norm(FieldRef::Scalar(prep.grad_u_mag()), quad, e.p, e.q)? / r)
        }
        Functional::W => {
            let e = need_exps()?;
            Ok(mixed_norm(FieldRef::Vector(prep.w()), quad, e.p, e.q)? / r)
        }
        Functional::W1 | Functional::WTilde1 => {
            let e = need_exps()?;
            let p_sharp = e.p_sharp().ok_or_else(|| {
                Error::ExponentRegime(format!(
                    "{} is defined only for q <= 2, got q = {}",
                    name.label(),
                    e.q
                ))
            })?;
            let field = if name == Functional::W1 {
                prep.grad_w_mag()
            } else {
                prep.curl_w_mag()
            };
            Ok(mixed_norm(FieldRef::Scalar(field), quad, p_sharp, e.q)? / r)
        }
    }
}

/// Options selecting the velocity-centering flag and the curl replacement in
/// the vorticity-gradient quantity.
#[derive(Debug, Clone, Copy)]
pub struct CriterionOptions {
    pub centered_velocity: bool,
    pub curl_for_vorticity_gradient: bool,
}

impl Default for CriterionOptions {
    fn default() -> Self {
        CriterionOptions { centered_velocity: true, curl_for_vorticity_gradient: false }
    }
}

/// The scaled norm entering the interior regularity criteria: the kind's
/// mixed norm weighted by `r` to the power that renders it dimensionless.
pub fn criterion_quantity(
    kind: CriterionKind,
    prep: &Prepared,
    quad: &CylinderQuadrature,
    p: f64,
    q: f64,
    opts: &CriterionOptions,
) -> Result<f64> {
    let verdict = classify_exponents(kind, p, q);
    if !verdict.admissible {
        return Err(Error::ExponentRegime(
            verdict.rejection_reason.unwrap_or_else(|| "inadmissible exponents".into()),
        ));
    }
    let s = verdict.scale_dimension;
    let r = quad.cylinder.r;
    let (norm, dim) = match kind {
        CriterionKind::Velocity => {
            let n = if opts.centered_velocity {
                mixed_norm_centered(prep.u(), quad, p, q)?
            } else {
                mixed_norm(FieldRef::Vector(prep.u()), quad, p, q)?
            };
            (n, 1.0)
        }
        CriterionKind::VelocityGradient => {
            (mixed_norm(FieldRef::Scalar(prep.grad_u_mag()), quad, p, q)?, 2.0)
        }
        CriterionKind::Vorticity => (mixed_norm(FieldRef::Vector(prep.w()), quad, p, q)?, 2.0),
        CriterionKind::VorticityGradient => {
            if opts.curl_for_vorticity_gradient && p <= 1.0 {
                return Err(Error::ExponentRegime(
                    "curl replacement requires the spatial exponent above 1".into(),
                ));
            }
            let field = if opts.curl_for_vorticity_gradient {
                prep.curl_w_mag()
            } else {
                prep.grad_w_mag()
            };
            (mixed_norm(FieldRef::Scalar(field), quad, p, q)?, 3.0)
        }
    };
    Ok(r.powf(-(s - dim)) * norm)
}

/// Recentering never decreases the raw mixed norm by more than the
/// mean-extraction bound; exposed for the consistency checks around the
/// velocity criterion.
pub fn velocity_norms_plain_and_centered(
    prep: &Prepared,
    quad: &CylinderQuadrature,
    p: f64,
    q: f64,
) -> Result<(f64, f64)> {
    Ok((
        mixed_norm(FieldRef::Vector(prep.u()), quad, p, q)?,
        mixed_norm_centered(prep.u(), quad, p, q)?,
    ))
}

/// The scaled slice-mean term `(1/r^2) |B_r| * integral of |(u)_r(s)|^3 ds`
/// that pairs with `C` to dominate `Ctilde` through the crude cube split.
pub fn ball_mean_cubed_term(prep: &Prepared, quad: &CylinderQuadrature) -> f64 {
    let r = quad.cylinder.r;
    let mut acc = 0.0;
    for (j, tau) in quad.window.iter() {
        let m = ball_mean(prep.u(), j, &quad.ball);
        let mag = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
        acc += tau * mag.powi(3);
    }
    acc * quad.ball.weight_sum / (r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::{cylinder_mask, make_grid, FieldStack, ParabolicCylinder, VectorField};
    use crate::fieldlab::ScalarField;
    use std::f64::consts::PI;

    fn prep_const(c: [f64; 3], n: usize, r: f64) -> (Prepared, CylinderQuadrature) {
        let g = make_grid(n, 26, 2.0 * PI, 0.15, -3.75).unwrap();
        let u = VectorField::from_fn(g, move |_, _, _, _| c);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        stack.w = Some(VectorField::zeros(g));
        let q = ParabolicCylinder::new([PI, PI, PI], 0.0, r);
        let quad = cylinder_mask(&g, &q, 4).unwrap();
        (Prepared::new(stack), quad)
    }

    #[test]
    fn zero_fields_give_zero_everywhere() {
        let (prep, quad) = prep_const([0.0; 3], 16, 1.8);
        let exps = BorderlinePair::from_q(2.0).unwrap();
        for name in Functional::ALL {
            let v = functional(name, &prep, &quad, Some(&exps)).unwrap();
            assert_eq!(v, 0.0, "{}", name.label());
        }
    }

    #[test]
    fn cubic_functional_of_constant_velocity() {
        // C(1) = (4 pi / 3) |c|^3 for constant velocity at unit radius
        let (prep, quad) = prep_const([0.6, 0.0, 0.8], 64, 1.0);
        let got = functional(Functional::C, &prep, &quad, None).unwrap();
        let want = 4.0 * PI / 3.0;
        assert!((got - want).abs() / want < 0.01, "got {got} want {want}");
        // centered variant must vanish
        let ct = functional(Functional::CTilde, &prep, &quad, None).unwrap();
        assert!(ct < 1e-12);
    }

    #[test]
    fn criterion_quantity_constant_plain_velocity() {
        // constant u = (1,0,0), plain u, (p*, q) = (3, 6), r = 1/2:
        // value = (4 pi / 3)^(1/3) * r = 0.8060
        let g = make_grid(64, 26, 2.0 * PI, 0.02, -0.5).unwrap();
        let u = VectorField::from_fn(g, |_, _, _, _| [1.0, 0.0, 0.0]);
        let stack = FieldStack::new(g, u).unwrap();
        let prep = Prepared::new(stack);
        let q = ParabolicCylinder::new([PI, PI, PI], 0.0, 0.5);
        let quad = cylinder_mask(&g, &q, 4).unwrap();
        let opts = CriterionOptions { centered_velocity: false, ..Default::default() };
        let got =
            criterion_quantity(CriterionKind::Velocity, &prep, &quad, 3.0, 6.0, &opts).unwrap();
        let want = (4.0 * PI / 3.0f64).powf(1.0 / 3.0) * 0.5;
        assert!((got - want).abs() / want < 0.01, "got {got} want {want}");
        // centered variant vanishes on constants
        let centered =
            criterion_quantity(CriterionKind::Velocity, &prep, &quad, 3.0, 6.0, &Default::default())
                .unwrap();
        assert!(centered < 1e-12);
    }

    #[test]
    fn w1_requires_small_q() {
        let (prep, quad) = prep_const([1.0, 0.0, 0.0], 16, 1.8);
        let exps = BorderlinePair::from_q(4.0).unwrap();
        assert!(functional(Functional::W1, &prep, &quad, Some(&exps)).is_err());
    }

    #[test]
    fn pressure_shift_moves_only_d() {
        let g = make_grid(32, 8, 2.0 * PI, 0.2, -1.4).unwrap();
        let u = VectorField::from_fn(g, |x, y, _, _| [y.sin(), x.cos(), 0.0]);
        let p0 = ScalarField::from_fn(g, |x, _, z, _| (x - z).cos());
        let p1 = ScalarField::from_fn(g, |x, _, z, t| (x - z).cos() + 0.7 + 0.1 * t);
        let cyl = ParabolicCylinder::new([PI, PI, PI], 0.0, 1.0);
        let mk = |p: &ScalarField| {
            let mut stack = FieldStack::new(g, u.clone()).unwrap();
            stack.p = Some(p.clone());
            Prepared::new(stack)
        };
        let (pa, pb) = (mk(&p0), mk(&p1));
        let quad = cylinder_mask(&g, &cyl, 3).unwrap();
        for name in [Functional::A, Functional::E, Functional::C, Functional::CTilde] {
            let va = functional(name, &pa, &quad, None).unwrap();
            let vb = functional(name, &pb, &quad, None).unwrap();
            assert_eq!(va, vb, "{} moved under pressure shift", name.label());
        }
        let da = functional(Functional::D, &pa, &quad, None).unwrap();
        let db = functional(Functional::D, &pb, &quad, None).unwrap();
        assert!((da - db).abs() > 1e-3, "D must react to the shift");
    }

    #[test]
    fn centered_cubes_bounded_by_crude_split() {
        // |a - b|^3 <= 4(|a|^3 + |b|^3) applied cell-wise bounds Ctilde by
        // 4 C + 4 * the scaled mean term, exactly in the same quadrature.
        let g = make_grid(32, 8, 2.0 * PI, 0.2, -1.4).unwrap();
        let u = VectorField::from_fn(g, |x, y, z, _| {
            [(y + z).sin() + 0.4, (2.0 * x).cos(), (x - y).sin() - 0.2]
        });
        let stack = FieldStack::new(g, u).unwrap();
        let prep = Prepared::new(stack);
        let cyl = ParabolicCylinder::new([2.9, 3.2, 3.0], 0.0, 1.1);
        let quad = cylinder_mask(&g, &cyl, 3).unwrap();
        let ct = functional(Functional::CTilde, &prep, &quad, None).unwrap();
        let c = functional(Functional::C, &prep, &quad, None).unwrap();
        let mean_term = ball_mean_cubed_term(&prep, &quad);
        assert!(ct <= 4.0 * (c + mean_term) * (1.0 + 1e-12), "{ct} vs {}", 4.0 * (c + mean_term));
    }
}
