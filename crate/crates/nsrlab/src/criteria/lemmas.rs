//! Numerical audit of the localized inequalities behind the criteria: each
//! audit measures its left side, every right-hand term, and the minimal
//! constant making the inequality hold on the given configuration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fieldlab::{
    ball_quadrature, cylinder_mask, time_window, Cutoff, CylinderQuadrature, ParabolicCylinder,
};
use crate::normcore::{
    functional, mixed_norm, morrey_norm, BorderlinePair, FieldRef, Functional, MorreyParams,
    Prepared,
};
use crate::singops::DecompCtx;

/// Stable identifiers of the audited inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LemmaId {
    Lei2,
    BasicLemma,
    L31,
    Preest,
    Lemma36,
    Th34a,
    Th34b,
    Rk37,
    Lemma37a,
    Lemma37b,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Lei2,
        LemmaId::BasicLemma,
        LemmaId::L31,
        LemmaId::Preest,
        LemmaId::Lemma36,
        LemmaId::Th34a,
        LemmaId::Th34b,
        LemmaId::Rk37,
        LemmaId::Lemma37a,
        LemmaId::Lemma37b,
    ];

    /// Report label, stable across releases.
    pub fn label(&self) -> &'static str {
        match self {
            LemmaId::Lei2 => "lei2",
            LemmaId::BasicLemma => "basiclemma",
            LemmaId::L31 => "L3-1",
            LemmaId::Preest => "preest",
            LemmaId::Lemma36 => "lemma3-6",
            LemmaId::Th34a => "TH3-4a",
            LemmaId::Th34b => "TH3-4b",
            LemmaId::Rk37 => "RK3.7",
            LemmaId::Lemma37a => "lemma3-7a",
            LemmaId::Lemma37b => "lemma3-7b",
        }
    }
}

/// One audited inequality instance.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub id: LemmaId,
    pub applicable: bool,
    pub lhs: f64,
    pub rhs_terms: Vec<(String, f64)>,
    /// Minimal `N` with `lhs <= N * sum(rhs_terms)`.
    pub fitted_constant: f64,
    pub trivially_satisfied: bool,
    pub regime_notes: Vec<String>,
}

impl LemmaReport {
    fn inapplicable(id: LemmaId, note: String) -> Self {
        LemmaReport {
            id,
            applicable: false,
            lhs: 0.0,
            rhs_terms: Vec::new(),
            fitted_constant: 0.0,
            trivially_satisfied: false,
            regime_notes: vec![note],
        }
    }

    fn fit(id: LemmaId, lhs: f64, rhs_terms: Vec<(String, f64)>, notes: Vec<String>) -> Self {
        let sum: f64 = rhs_terms.iter().map(|t| t.1).sum();
        let (fitted, trivially) = if lhs <= 1e-300 {
            (0.0, true)
        } else if sum > 0.0 {
            (lhs / sum, false)
        } else {
            (f64::INFINITY, false)
        };
        LemmaReport {
            id,
            applicable: true,
            lhs,
            rhs_terms,
            fitted_constant: fitted,
            trivially_satisfied: trivially,
            regime_notes: notes,
        }
    }
}

/// Exponents and the Morrey bookkeeping of one audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditContext {
    pub center: [f64; 3],
    pub t: f64,
    pub r: f64,
    pub rho: f64,
    pub q: f64,
    pub p: f64,
    pub p_star: f64,
    pub p_sharp: Option<f64>,
    pub gamma: f64,
    pub m_gamma: f64,
    /// `m_gamma^(-1/(1+gamma))`, the radius range on which the energy
    /// estimate is claimed.
    pub radius_limit: f64,
    pub radius_within_limit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub context: AuditContext,
    pub reports: Vec<LemmaReport>,
}

#[derive(Debug, Clone, Copy)]
pub struct AuditOptions {
    pub gamma: f64,
    pub subsamples: usize,
    /// Skip the potential-decomposition remainder terms (the two `g` traces)
    /// to keep scans cheap.
    pub with_potential_remainders: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions { gamma: 1.0, subsamples: 4, with_potential_remainders: true }
    }
}

struct FnCache<'a> {
    prep: &'a Prepared,
    exps: BorderlinePair,
    quads: [CylinderQuadrature; 3],
}

#[derive(Clone, Copy)]
enum Radius {
    R,
    TwoR,
    Rho,
}

impl<'a> FnCache<'a> {
    fn quad(&self, at: Radius) -> &CylinderQuadrature {
        match at {
            Radius::R => &self.quads[0],
            Radius::TwoR => &self.quads[1],
            Radius::Rho => &self.quads[2],
        }
    }

    fn get(&self, name: Functional, at: Radius) -> Result<f64> {
        functional(name, self.prep, self.quad(at), Some(&self.exps))
    }
}

/// Audit every applicable inequality at the configuration `(z, r, rho)` with
/// the borderline exponents generated by `q`.
pub fn lemma_audit(
    prep: &Prepared,
    x: [f64; 3],
    t: f64,
    r: f64,
    rho: f64,
    q: f64,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    if !(2.0 * r <= rho * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "audit radii violate the hypothesis 0 < 2r <= rho (r = {r}, rho = {rho})"
        )));
    }
    if !(q >= 1.0) {
        return Err(Error::ExponentRegime(format!("q = {q} below 1")));
    }
    let exps = BorderlinePair::from_q(q)?;
    let grid = prep.grid();
    let quads = [
        cylinder_mask(grid, &ParabolicCylinder::new(x, t, r), opts.subsamples)?,
        cylinder_mask(grid, &ParabolicCylinder::new(x, t, 2.0 * r), opts.subsamples)?,
        cylinder_mask(grid, &ParabolicCylinder::new(x, t, rho), opts.subsamples)?,
    ];
    let cache = FnCache { prep, exps, quads };

    let (m_gamma, radius_limit) = match &prep.stack.f {
        Some(f) => {
            let params = MorreyParams::new(opts.gamma)?;
            let est = morrey_norm(f, &params)?;
            let limit = if est.value > 0.0 {
                est.value.powf(-1.0 / (1.0 + opts.gamma))
            } else {
                f64::INFINITY
            };
            (est.value, limit)
        }
        None => (0.0, f64::INFINITY),
    };
    let context = AuditContext {
        center: x,
        t,
        r,
        rho,
        q,
        p: exps.p,
        p_star: exps.p_star(),
        p_sharp: exps.p_sharp(),
        gamma: opts.gamma,
        m_gamma,
        radius_limit,
        radius_within_limit: r <= radius_limit,
    };

    let mut reports = Vec::with_capacity(LemmaId::ALL.len());
    for id in LemmaId::ALL {
        reports.push(audit_one(id, &cache, &context, prep, opts)?);
    }
    Ok(AuditReport { context, reports })
}

fn audit_one(
    id: LemmaId,
    cache: &FnCache<'_>,
    ctx: &AuditContext,
    prep: &Prepared,
    opts: &AuditOptions,
) -> Result<LemmaReport> {
    let (r, rho, q, p) = (ctx.r, ctx.rho, ctx.q, ctx.p);
    let has_pressure = prep.stack.p.is_some();
    let inv_q = if q == f64::INFINITY { 0.0 } else { 1.0 / q };
    match id {
        LemmaId::Lei2 => {
            if !has_pressure {
                return Ok(LemmaReport::inapplicable(id, "missing input: pressure".into()));
            }
            let lhs = cache.get(Functional::A, Radius::R)? + cache.get(Functional::E, Radius::R)?;
            let terms = vec![
                ("1".into(), 1.0),
                ("C(2r)".into(), cache.get(Functional::C, Radius::TwoR)?),
                ("D(2r)".into(), cache.get(Functional::D, Radius::TwoR)?),
            ];
            let mut notes = Vec::new();
            if !ctx.radius_within_limit {
                notes.push(format!(
                    "radius {} above the force-limited range {}",
                    r, ctx.radius_limit
                ));
            }
            Ok(LemmaReport::fit(id, lhs, terms, notes))
        }
        LemmaId::BasicLemma => {
            let a = cache.get(Functional::A, Radius::R)?;
            let e = cache.get(Functional::E, Radius::R)?;
            let gt = cache.get(Functional::GTilde, Radius::R)?;
            let lhs = cache.get(Functional::CTilde, Radius::R)?;
            let term = a.powf(inv_q) * e.powf(1.0 - inv_q) * gt;
            Ok(LemmaReport::fit(
                id,
                lhs,
                vec![("A^(1/q) E^(1-1/q) Gtilde (r)".into(), term)],
                Vec::new(),
            ))
        }
        LemmaId::L31 => {
            let lhs = cache.get(Functional::C, Radius::R)?;
            let terms = vec![
                ("(r/rho) C(rho)".into(), (r / rho) * cache.get(Functional::C, Radius::Rho)?),
                (
                    "(rho/r)^2 Ctilde(rho)".into(),
                    (rho / r).powi(2) * cache.get(Functional::CTilde, Radius::Rho)?,
                ),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, Vec::new()))
        }
        LemmaId::Preest => {
            if !has_pressure {
                return Ok(LemmaReport::inapplicable(id, "missing input: pressure".into()));
            }
            let lhs = cache.get(Functional::D, Radius::R)?;
            let force_term = (rho / r).powi(2)
                * rho.powf(1.5 * (ctx.gamma + 1.0))
                * ctx.m_gamma.powf(1.5);
            let terms = vec![
                (
                    "(rho/r)^2 Ctilde(rho)".into(),
                    (rho / r).powi(2) * cache.get(Functional::CTilde, Radius::Rho)?,
                ),
                ("(rho/r)^2 rho^(3(gamma+1)/2) m^(3/2)".into(), force_term),
                ("(r/rho) D(rho)".into(), (r / rho) * cache.get(Functional::D, Radius::Rho)?),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, Vec::new()))
        }
        LemmaId::Lemma36 => {
            let a = cache.get(Functional::A, Radius::R)?;
            let e = cache.get(Functional::E, Radius::R)?;
            let g1 = cache.get(Functional::G1, Radius::R)?;
            let lhs = cache.get(Functional::CTilde, Radius::R)?;
            let term = a.powf(inv_q) * e.powf(1.0 - inv_q) * g1;
            Ok(LemmaReport::fit(
                id,
                lhs,
                vec![("A^(1/q) E^(1-1/q) G1 (r)".into(), term)],
                Vec::new(),
            ))
        }
        LemmaId::Th34a => {
            if q == f64::INFINITY {
                return Ok(LemmaReport::inapplicable(id, "requires finite q".into()));
            }
            let lhs = cache.get(Functional::G1, Radius::R)?;
            let terms = vec![
                ("(rho/r) W(rho)".into(), (rho / r) * cache.get(Functional::W, Radius::Rho)?),
                (
                    "(r/rho)^(3/p-1) G1(rho)".into(),
                    (r / rho).powf(3.0 / p - 1.0) * cache.get(Functional::G1, Radius::Rho)?,
                ),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, Vec::new()))
        }
        LemmaId::Th34b => {
            if (q - 1.0).abs() > 1e-9 {
                return Ok(LemmaReport::inapplicable(id, "refined variant needs q = 1".into()));
            }
            if !opts.with_potential_remainders {
                return Ok(LemmaReport::inapplicable(id, "remainder trace disabled".into()));
            }
            let lhs = cache.get(Functional::G1, Radius::R)?;
            let g = gradient_remainder_trace(prep, ctx, opts)?;
            let terms = vec![
                ("(rho/r) W(rho)".into(), (rho / r) * cache.get(Functional::W, Radius::Rho)?),
                ("(r/rho) G1(rho)".into(), (r / rho) * cache.get(Functional::G1, Radius::Rho)?),
                ("g(u;r)".into(), g),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, Vec::new()))
        }
        LemmaId::Rk37 => {
            let rho_eff = rho.min(2.0 * r);
            let mut notes = Vec::new();
            if rho > 2.0 * r {
                notes.push(format!(
                    "outer radius clamped to 2r = {} per the comparable-radii hypothesis",
                    rho_eff
                ));
            }
            let grid = prep.grid();
            let quad_out = cylinder_mask(
                grid,
                &ParabolicCylinder::new(ctx.center, ctx.t, rho_eff),
                opts.subsamples,
            )?;
            let lhs = mixed_norm(
                FieldRef::Scalar(prep.grad_u_mag()),
                cache.quad(Radius::R),
                p,
                q,
            )?;
            let terms = vec![
                (
                    "||w|| over the outer cylinder".into(),
                    mixed_norm(FieldRef::Vector(prep.w()), &quad_out, p, q)?,
                ),
                (
                    "||u|| over the outer cylinder".into(),
                    mixed_norm(FieldRef::Vector(prep.u()), &quad_out, p, q)?,
                ),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, notes))
        }
        LemmaId::Lemma37a => {
            if q > 2.0 {
                return Ok(LemmaReport::inapplicable(id, "requires q <= 2".into()));
            }
            let lhs = cache.get(Functional::W, Radius::R)?;
            let terms = vec![
                ("(rho/r) W1(rho)".into(), (rho / r) * cache.get(Functional::W1, Radius::Rho)?),
                (
                    "(r/rho)^(3/p-1) W(rho)".into(),
                    (r / rho).powf(3.0 / p - 1.0) * cache.get(Functional::W, Radius::Rho)?,
                ),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, Vec::new()))
        }
        LemmaId::Lemma37b => {
            if !(q < 2.0) {
                return Ok(LemmaReport::inapplicable(id, "curl variant needs q < 2".into()));
            }
            if !opts.with_potential_remainders {
                return Ok(LemmaReport::inapplicable(id, "remainder trace disabled".into()));
            }
            let lhs = cache.get(Functional::G1, Radius::R)?;
            let g = tensor_remainder_trace(prep, ctx, opts)?;
            let terms = vec![
                (
                    "(rho/r) Wtilde1(rho)".into(),
                    (rho / r) * cache.get(Functional::WTilde1, Radius::Rho)?,
                ),
                (
                    "(r/rho)^(3/p) G1(rho)".into(),
                    (r / rho).powf(3.0 / p) * cache.get(Functional::G1, Radius::Rho)?,
                ),
                ("g(u;r)".into(), g),
            ];
            Ok(LemmaReport::fit(id, lhs, terms, Vec::new()))
        }
    }
}

/// `integral over (t - r^2, t) of |(grad h)_r| dt` with `h` the local
/// Biot-Savart remainder on `B_rho`.
fn gradient_remainder_trace(
    prep: &Prepared,
    ctx: &AuditContext,
    opts: &AuditOptions,
) -> Result<f64> {
    let grid = prep.grid();
    let window = time_window(grid, ctx.t, ctx.r)?;
    let ball = ball_quadrature(grid, ctx.center, ctx.r, opts.subsamples)?;
    let dctx = DecompCtx::new(grid, opts.subsamples);
    let cutoff = Cutoff::new(ctx.rho)?;
    let mut acc = 0.0;
    for (j, tau) in window.iter() {
        let avg = dctx.biot_savart_grad_ball_avg(&prep.stack, j, ctx.center, cutoff, &ball)?;
        acc += tau * avg;
    }
    Ok(acc)
}

/// `r^(3/p - 1) * (integral of |H(center, t)|^q dt)^(1/q)` with `H` the
/// curl-tensor remainder on `B_rho`.
fn tensor_remainder_trace(
    prep: &Prepared,
    ctx: &AuditContext,
    opts: &AuditOptions,
) -> Result<f64> {
    let grid = prep.grid();
    let window = time_window(grid, ctx.t, ctx.r)?;
    let dctx = DecompCtx::new(grid, opts.subsamples);
    let cutoff = Cutoff::new(ctx.rho)?;
    let idx = grid.nearest_sample(ctx.center);
    let mut acc = 0.0;
    for (j, tau) in window.iter() {
        let dec = dctx.curl_tensor_split(&prep.stack, j, ctx.center, cutoff)?;
        let mut mag2 = 0.0;
        for comp in &dec.harmonic {
            let v = comp[[idx[2], idx[1], idx[0]]];
            mag2 += v * v;
        }
        acc += tau * mag2.sqrt().powf(ctx.q);
    }
    Ok(ctx.r.powf(3.0 / ctx.p - 1.0) * acc.powf(1.0 / ctx.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::{make_grid, FieldStack, ScalarField, VectorField};
    use std::f64::consts::PI;

    fn zero_prep() -> Prepared {
        let g = make_grid(32, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let mut stack = FieldStack::new(g, VectorField::zeros(g)).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        stack.w = Some(VectorField::zeros(g));
        Prepared::new(stack)
    }

    #[test]
    fn zero_fields_audit_trivially() {
        let prep = zero_prep();
        let opts = AuditOptions { subsamples: 2, with_potential_remainders: false, ..Default::default() };
        let report = lemma_audit(&prep, [PI, PI, PI], 0.0, 0.8, 1.6, 2.0, &opts).unwrap();
        for rep in report.reports.iter().filter(|r| r.applicable) {
            assert!(rep.trivially_satisfied, "{} not trivially satisfied", rep.id.label());
            assert_eq!(rep.fitted_constant, 0.0);
        }
        // q = 2 keeps the q = 1 refinement and the strict q < 2 branch out
        assert!(report
            .reports
            .iter()
            .any(|r| r.id == LemmaId::Th34b && !r.applicable));
        assert!(report
            .reports
            .iter()
            .any(|r| r.id == LemmaId::Lemma37b && !r.applicable));
    }

    #[test]
    fn radius_hypothesis_is_enforced() {
        let prep = zero_prep();
        let opts = AuditOptions::default();
        let err = lemma_audit(&prep, [PI, PI, PI], 0.0, 1.0, 1.5, 2.0, &opts);
        match err {
            Err(Error::InvalidParameter(msg)) => {
                assert!(msg.contains("0 < 2r <= rho"), "message: {msg}")
            }
            other => panic!("expected the radius hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn elementary_split_constant_stays_small() {
        // The three-way split behind the C-transfer bound has constant 4, so
        // the fitted constant must stay well under 32 on any sampled field.
        let g = make_grid(32, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let u = VectorField::from_fn(g, |x, y, z, _| {
            [(y + z).sin() + 0.3, (2.0 * x).cos() - 0.1, (x - y).sin()]
        });
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::zeros(g));
        stack.w = Some(VectorField::zeros(g));
        let prep = Prepared::new(stack);
        let opts = AuditOptions { subsamples: 3, with_potential_remainders: false, ..Default::default() };
        let report = lemma_audit(&prep, [PI, PI, PI], 0.0, 0.8, 1.6, 2.0, &opts).unwrap();
        let l31 = report.reports.iter().find(|r| r.id == LemmaId::L31).unwrap();
        assert!(l31.applicable);
        assert!(
            l31.fitted_constant <= 32.0,
            "transfer constant {}",
            l31.fitted_constant
        );
    }
}
