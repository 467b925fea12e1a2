use rayon::prelude::*;

use crate::error::Result;
use crate::extremal::Extremal;
use crate::family::{self, Family, SweepCase};
use crate::functionals::{a_form, energies, stability_report, DistanceProblem, ReportConfig, SearchOptions, StabilityReport};
use crate::inequalities::{
    binomial_num2_p4, scan, verify_constant, GridSpec, InequalityId, InequalitySpec, Verification,
};
use crate::integrate::QuadratureRule;
use crate::params::Params;
use crate::spectrum::{
    alpha3, decay_fit, expansion_consistency, poincare_min_rayleigh, polar_fd_check, richardson_ratio,
    second_variation, solve_channel, weighted_correlation, weighted_mass, EigenPair, FormKind, SLChannel,
    DECAY_WINDOW,
};
use crate::zonal::{BubbleProfile, RadialProfile, ScaleModeProfile, SlopeProfile, ZonalField};

use super::config::RunConfig;
use super::report::{Cell, Plot, Report, Series, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Sharp constant, normalization, known eigenvalues and the Rayleigh cross-check.
    Constants,
    /// Radial channel eigenvalues, oscillation counts, decay and the spectral gap.
    Spectrum,
    /// Minimal weighted Rayleigh quotient against the closed-form bound.
    Poincare,
    /// Required constants of the elementary inequalities and their verification.
    Inequalities,
    /// Stability reports over the perturbation families.
    Stability,
    /// Second variation and the order of the Taylor remainder of the deficit.
    Expansion,
    /// Interpolation bound for the deficit along segments to the closest extremal.
    Interpolate,
    /// Polar form of the linearized operator against Cartesian differences.
    Polar,
    /// Every command above, in order.
    All,
}

impl Command {
    pub const EACH: [Command; 8] = [
        Command::Constants,
        Command::Spectrum,
        Command::Poincare,
        Command::Inequalities,
        Command::Stability,
        Command::Expansion,
        Command::Interpolate,
        Command::Polar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Spectrum => "spectrum",
            Command::Poincare => "poincare",
            Command::Inequalities => "inequalities",
            Command::Stability => "stability",
            Command::Expansion => "expansion",
            Command::Interpolate => "interpolate",
            Command::Polar => "polar",
            Command::All => "all",
        }
    }
}

pub const KAPPAS: [f64; 3] = [0.5, 0.1, 0.01];
pub const EXPANSION_EPS: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];
const RECOVERY_EPS: f64 = 1e-2;

/// Shared state of one invocation; the base-count sweep is computed at most once.
struct Context<'a> {
    cfg: &'a RunConfig,
    params: Params,
    rule: Option<QuadratureRule>,
    sweep: Option<Vec<SweepCase>>,
}

impl Context<'_> {
    fn rule(&mut self) -> Result<QuadratureRule> {
        if self.rule.is_none() {
            self.rule = Some(self.cfg.rule(&self.params, self.cfg.quad_count)?);
        }
        Ok(self.rule.clone().expect("set above"))
    }

    fn report_config(&self) -> ReportConfig {
        ReportConfig { multistarts: self.cfg.multistarts, ..ReportConfig::default() }
    }

    fn sweep(&mut self) -> Result<Vec<SweepCase>> {
        if self.sweep.is_none() {
            let rule = self.rule()?;
            self.sweep = Some(family::sweep(&self.params, &rule, &self.cfg.mesh(), &self.report_config())?);
        }
        Ok(self.sweep.clone().expect("set above"))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn kv(table: &mut Table, key: &str, value: f64) {
    table.push(vec![key.into(), value.into()]);
}

/// Runs one command (or all of them). A failing step ends its command with a failed check,
/// but everything computed before it is kept.
pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<Vec<Report>> {
    let params = cfg.validate()?;
    let mut ctx = Context { cfg, params, rule: None, sweep: None };
    let cmds: Vec<Command> = if cmd == Command::All { Command::EACH.to_vec() } else { vec![cmd] };
    Ok(cmds
        .into_iter()
        .map(|c| {
            let mut rep = Report::new(c.name(), params.n, params.p);
            let outcome = match c {
                Command::Constants => constants(&mut ctx, &mut rep),
                Command::Spectrum => spectrum(&mut ctx, &mut rep),
                Command::Poincare => poincare(&mut ctx, &mut rep),
                Command::Inequalities => inequalities(&mut ctx, &mut rep),
                Command::Stability => stability(&mut ctx, &mut rep),
                Command::Expansion => expansion(&mut ctx, &mut rep),
                Command::Interpolate => interpolate(&mut ctx, &mut rep),
                Command::Polar => polar(&mut ctx, &mut rep),
                Command::All => unreachable!("expanded above"),
            };
            if let Err(e) = outcome {
                rep.check(0, "error", false, e.to_string());
            }
            rep
        })
        .collect())
}

fn constants(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let rule = ctx.rule()?;
    let v = ZonalField::bubble(&q, 1.0, 1.0, 0.0);
    let (grad, mass) = energies(&v, &q, &rule)?;
    let rayleigh = grad / mass.powf(q.p / q.pstar);
    let unit = Extremal::unit(q.n);
    let mut el_max = 0.0f64;
    for i in 0..200 {
        let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
        let (res, size) = unit.p_laplace_parts(&q, r)?;
        el_max = el_max.max(res.abs() / size);
    }
    let mut t = Table::new("constants", &["quantity", "value"]);
    kv(&mut t, "S", q.s);
    kv(&mut t, "S^p", q.sp);
    kv(&mut t, "kappa0", q.kappa0);
    kv(&mut t, "p_star", q.pstar);
    kv(&mut t, "decay_rate", q.decay_rate());
    kv(&mut t, "alpha1", q.alpha1);
    kv(&mut t, "alpha2", q.alpha2);
    kv(&mut t, "rayleigh", rayleigh);
    kv(&mut t, "rayleigh_rel_error", rel(rayleigh, q.sp));
    kv(&mut t, "critical_mass", mass);
    kv(&mut t, "el_residual_max", el_max);
    rep.tables.push(t);
    rep.check(
        1,
        "sharp constant",
        rel(rayleigh, q.sp) < 1e-6,
        format!("Rayleigh quotient of the extremal off S^p by {:.3e}", rel(rayleigh, q.sp)),
    );
    rep.check(2, "Euler-Lagrange residual", el_max < 1e-6, format!("max relative residual {el_max:.3e}"));
    Ok(())
}

fn spectrum(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let mesh = ctx.cfg.mesh();
    let wanted = [(0usize, 5usize), (1, 2), (2, 1), (3, 1)];
    let channels: Vec<(SLChannel, Vec<EigenPair>)> = wanted
        .par_iter()
        .map(|&(l, k)| {
            let ch = SLChannel::new(&q, l, FormKind::Linearized, mesh)?;
            let pairs = solve_channel(&ch, k)?;
            Ok((ch, pairs))
        })
        .collect::<Result<_>>()?;
    let v = BubbleProfile::new(&q, 1.0);
    let dl = ScaleModeProfile::new(&q, 1.0);
    let sl = SlopeProfile::new(&q, 1.0);
    let known: [(usize, usize, &dyn RadialProfile); 3] = [(0, 1, &v), (0, 2, &dl), (1, 1, &sl)];

    let mut t = Table::new("channels", &["degree", "index", "alpha", "alpha_over_sp", "zeros", "decay_beta", "correlation"]);
    let mut correlations = Vec::new();
    for (ch, pairs) in &channels {
        for pr in pairs {
            let corr = known
                .iter()
                .find(|k| k.0 == pr.degree && k.1 == pr.index)
                .map(|k| weighted_correlation(ch, &pr.f, |r| k.2.eval(r)[0]).abs())
                .unwrap_or(f64::NAN);
            if corr.is_finite() {
                correlations.push(corr);
            }
            t.push(vec![
                pr.degree.into(),
                pr.index.into(),
                pr.alpha.into(),
                (pr.alpha / q.sp).into(),
                pr.zeros.into(),
                pr.decay_beta.into(),
                corr.into(),
            ]);
        }
    }
    rep.tables.push(t);

    let radial = &channels[0].1;
    let a1 = radial[0].alpha;
    let a2 = radial[1].alpha;
    let a2_axial = channels[1].1[0].alpha;
    let a3 = alpha3(&q, &mesh)?;
    let rich = richardson_ratio(&q, &mesh)?;
    let mut s = Table::new("summary", &["quantity", "value"]);
    kv(&mut s, "alpha1", a1);
    kv(&mut s, "alpha1_exact", q.alpha1);
    kv(&mut s, "alpha2", a2);
    kv(&mut s, "alpha2_axial", a2_axial);
    kv(&mut s, "alpha2_exact", q.alpha2);
    kv(&mut s, "alpha3", a3.alpha3);
    kv(&mut s, "alpha3_degree", a3.degree as f64);
    kv(&mut s, "gap", a3.gap);
    kv(&mut s, "richardson_ratio", rich);
    rep.tables.push(s);

    let tol = ctx.cfg.tol_eigen;
    let errs = [rel(a1, q.alpha1), rel(a2, q.alpha2), rel(a2_axial, q.alpha2)];
    let corr_min = correlations.iter().copied().fold(f64::INFINITY, f64::min);
    rep.check(
        3,
        "spectrum identities",
        errs.iter().all(|&e| e < tol) && corr_min > 0.999 && rich >= 3.0,
        format!(
            "relative errors {:.2e} {:.2e} {:.2e}, min correlation {corr_min:.6}, refinement ratio {rich:.2}",
            errs[0], errs[1], errs[2]
        ),
    );
    rep.check(4, "spectral gap", a3.gap > 1e-3, format!("alpha3/alpha2 - 1 = {:.4} (degree {})", a3.gap, a3.degree));
    let zeros: Vec<usize> = radial.iter().map(|p| p.zeros).collect();
    rep.check(5, "oscillation counts", zeros == [0, 1, 2, 3, 4], format!("sign changes {zeros:?}"));

    let beta = q.decay_rate();
    let analytic: Vec<f64> = [&v as &dyn RadialProfile, &dl]
        .iter()
        .map(|prof| {
            let f: Vec<f64> = mesh.radii().iter().map(|&r| prof.eval(r)[0]).collect();
            decay_fit(&EigenPair { f, ..radial[0].clone() }, DECAY_WINDOW)
        })
        .collect::<Result<_>>()?;
    let numeric = [radial[0].decay_beta, radial[1].decay_beta];
    let others: Vec<f64> = channels
        .iter()
        .flat_map(|(_, ps)| ps.iter())
        .filter(|p| !(p.degree == 0 && p.index <= 2))
        .map(|p| p.decay_beta)
        .filter(|b| b.is_finite())
        .collect();
    let lowest = others.iter().copied().fold(f64::INFINITY, f64::min);
    let close = analytic.iter().chain(&numeric).all(|b| (b - beta).abs() <= 0.05);
    rep.check(
        6,
        "decay",
        close && lowest >= 0.9 * beta,
        format!(
            "beta {beta:.4}; profile fits {:.4} {:.4}; eigenfunction fits {:.4} {:.4}; lowest other {lowest:.4} over {} fits",
            analytic[0],
            analytic[1],
            numeric[0],
            numeric[1],
            others.len()
        ),
    );

    rep.plots.push(Plot {
        name: "radial_modes".into(),
        x_label: "r".into(),
        y_label: "|f_k(r)|".into(),
        series: radial
            .iter()
            .take(3)
            .map(|pr| Series {
                label: format!("k = {}", pr.index),
                points: pr.radii().zip(&pr.f).step_by(10).map(|(r, f)| (r, f.abs())).collect(),
            })
            .collect(),
    });
    Ok(())
}

fn poincare(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let b = poincare_min_rayleigh(&q, &ctx.cfg.mesh())?;
    let mut t = Table::new("poincare", &["quantity", "value"]);
    kv(&mut t, "unconstrained", b.unconstrained);
    kv(&mut t, "constrained", b.constrained);
    kv(&mut t, "target", b.target);
    kv(&mut t, "constrained_over_target", b.constrained / b.target);
    for (l, v) in b.channel_first.iter().enumerate() {
        kv(&mut t, &format!("channel_{l}_first"), *v);
    }
    rep.tables.push(t);
    rep.check(
        12,
        "Poincare bound",
        b.constrained >= b.target * (1.0 - 1e-3),
        format!("min Rayleigh {:.6e} vs bound {:.6e}", b.constrained, b.target),
    );
    Ok(())
}

fn inequalities(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let (samples, seed) = (ctx.cfg.samples, ctx.cfg.seed);
    let mut jobs: Vec<(&'static str, InequalitySpec, Option<f64>)> = Vec::new();
    for id in InequalityId::ALL {
        if id.needs_kappa() {
            for k in KAPPAS {
                jobs.push(("scan", InequalitySpec::new(id, q.p, q.n, Some(k))?, None));
            }
        } else {
            jobs.push(("scan", InequalitySpec::new(id, q.p, q.n, None)?, None));
        }
    }
    for k in KAPPAS {
        jobs.push(("p2_zero", InequalitySpec::new(InequalityId::Num2, 2.0, 3, Some(k))?, Some(0.0)));
        jobs.push(("p4_binomial", InequalitySpec::new(InequalityId::Num2, 4.0, 5, Some(k))?, Some(binomial_num2_p4(k))));
    }
    let grid = GridSpec::default();
    let rows: Vec<(f64, f64, f64, f64, Verification)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (_, spec, fixed))| {
            let (req, t, c) = match fixed {
                Some(_) => (f64::NAN, f64::NAN, f64::NAN),
                None => {
                    let s = scan(spec, &grid)?;
                    (s.constant, s.argmax_t, s.argmax_cos)
                }
            };
            let used = fixed.unwrap_or(1.05 * req);
            Ok((req, t, c, used, verify_constant(spec, used, samples, seed.wrapping_add(i as u64))))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "inequalities",
        &["inequality", "mode", "p", "kappa", "required", "argmax_t", "argmax_cos", "constant", "samples", "verdict"],
    );
    let mut failures = Vec::new();
    for ((mode, spec, _), (req, at, ac, used, ver)) in jobs.iter().zip(&rows) {
        let verdict = match ver {
            Verification::Pass { .. } => "pass".to_string(),
            Verification::Counterexample { t, cos, slack } => {
                failures.push(format!("{} {mode} kappa={}", spec.id.name(), spec.kappa));
                format!("counterexample t={t:e} cos={cos} slack={slack:e}")
            }
        };
        let kappa = if spec.id.needs_kappa() { spec.kappa } else { f64::NAN };
        t.push(vec![
            spec.id.name().into(),
            (*mode).into(),
            spec.p.into(),
            kappa.into(),
            (*req).into(),
            (*at).into(),
            (*ac).into(),
            (*used).into(),
            samples.into(),
            verdict.into(),
        ]);
    }
    rep.tables.push(t);
    rep.check(
        7,
        "inequality constants",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} verifications with {samples} samples each", rows.len())
        } else {
            format!("counterexamples: {}", failures.join("; "))
        },
    );
    Ok(())
}

fn stability_row(family: &str, eps: f64, r: &StabilityReport) -> Vec<Cell> {
    vec![
        family.into(),
        eps.into(),
        r.deficit.into(),
        r.dist2.into(),
        r.grad_p_dist.into(),
        r.lpstar_dist.into(),
        r.regime_ratio.into(),
        r.regime.label().into(),
        r.main_ratio.into(),
        r.lambda_hat().into(),
        r.y_hat().into(),
    ]
}

/// One row for the extremal itself, then the sweep.
fn stability_table(extremal: &StabilityReport, cases: &[SweepCase]) -> Table {
    let mut t = Table::new(
        "stability",
        &[
            "family", "epsilon", "deficit", "dist2", "grad_p_dist", "lpstar_dist", "regime_ratio", "regime", "main_ratio",
            "lambda_hat", "y_hat",
        ],
    );
    t.push(stability_row("extremal", 0.0, extremal));
    for c in cases {
        t.push(stability_row(c.family.name(), c.eps, &c.report));
    }
    t
}

fn max_ratio(cases: &[SweepCase]) -> f64 {
    cases.iter().map(|c| c.report.main_ratio).fold(0.0, f64::max)
}

/// Distance recovery for v + εφ₃ against a brute-force grid.
fn recovery(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let rule = ctx.rule()?;
    let phi = family::direction(Family::ThirdMode, &q, &rule, &ctx.cfg.mesh())?;
    let u = family::member(&phi, RECOVERY_EPS, &q);
    let prob = DistanceProblem::new(&u, &q, &rule)?;
    let fit = prob.minimize(SearchOptions { multistarts: ctx.cfg.multistarts, tol: ctx.cfg.tol_quad })?;
    let (grid_min, grid_ll, grid_y) = prob.grid_scan((-0.05, 0.05), (-0.05, 0.05), 41);
    let predicted = RECOVERY_EPS * RECOVERY_EPS * a_form(&q, &Extremal::unit(q.n), &phi, &phi, &rule)?;
    let grad = prob.energy_gradient(fit.log_lambda, fit.y_axial, 1e-4);
    let (lam, y) = (fit.minimizer.lambda, fit.y_axial);
    let mut t = Table::new("recovery", &["quantity", "value"]);
    kv(&mut t, "epsilon", RECOVERY_EPS);
    kv(&mut t, "lambda_hat", lam);
    kv(&mut t, "y_hat", y);
    kv(&mut t, "dist2", fit.d2);
    kv(&mut t, "dist2_predicted", predicted);
    kv(&mut t, "grid_dist2", grid_min);
    kv(&mut t, "grid_lambda", grid_ll.exp());
    kv(&mut t, "grid_y", grid_y);
    kv(&mut t, "partial_log_lambda", grad[0]);
    kv(&mut t, "partial_y", grad[1]);
    rep.tables.push(t);
    let pass = (lam - 1.0).abs() <= 0.05
        && y.abs() <= 0.05
        && rel(fit.d2, predicted) <= 0.02
        && fit.d2 <= grid_min * (1.0 + 1e-9)
        && grad.iter().all(|g| g.abs() <= 1e-5);
    rep.check(
        10,
        "distance recovery",
        pass,
        format!(
            "lambda {lam:.5}, y {y:.1e}, d2 {:.4e} vs {predicted:.4e} ({:.2}%), grid {grid_min:.4e}, partials {:.1e} {:.1e}",
            fit.d2,
            100.0 * rel(fit.d2, predicted),
            grad[0],
            grad[1]
        ),
    );
    Ok(())
}

fn stability(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let base = ctx.sweep()?;
    let rule = ctx.rule()?;
    let at_v = stability_report(&ZonalField::bubble(&q, 1.0, 1.0, 0.0), &q, &rule, &ctx.report_config())?;
    rep.tables.push(stability_table(&at_v, &base));
    let fine_rule = ctx.cfg.rule(&q, 2 * ctx.cfg.quad_count)?;
    let cfg = ctx.report_config();
    let fine = family::sweep(&q, &fine_rule, &ctx.cfg.mesh(), &cfg)?;
    let (c_base, c_fine) = (max_ratio(&base), max_ratio(&fine));
    let mut s = Table::new("sweep_summary", &["quad_count", "cases", "max_main_ratio", "c_report"]);
    s.push(vec![ctx.cfg.quad_count.into(), base.len().into(), c_base.into(), cfg.c_report.into()]);
    s.push(vec![(2 * ctx.cfg.quad_count).into(), fine.len().into(), c_fine.into(), cfg.c_report.into()]);
    rep.tables.push(s);

    let floor = ctx.cfg.tol_quad * q.sp;
    let worst = base.iter().map(|c| c.report.deficit).fold(f64::INFINITY, f64::min);
    rep.check(11, "deficit nonnegative", worst >= -floor, format!("smallest deficit {worst:.3e} (floor -{floor:.1e})"));
    let sandwich_bad = base.iter().filter(|c| !c.report.sandwich_holds(q.p, 1e-9)).count();
    rep.check(11, "sandwich", sandwich_bad == 0, format!("{sandwich_bad} of {} cases violate it", base.len()));
    let at_v_worst = [at_v.deficit.abs(), at_v.dist2, at_v.grad_p_dist, at_v.lpstar_dist].into_iter().fold(0.0, f64::max);
    rep.check(11, "extremal row", at_v_worst < 1e-10, format!("largest distance field at u = v is {at_v_worst:.2e}"));
    let shift = rel(c_fine, c_base);
    rep.check(
        11,
        "stability bound",
        c_base <= cfg.c_report && c_fine <= cfg.c_report && shift < 0.1,
        format!(
            "max ratio {c_base:.6e} at count {}, {c_fine:.6e} at count {} (change {:.2e}); C_report {}",
            ctx.cfg.quad_count,
            2 * ctx.cfg.quad_count,
            shift,
            cfg.c_report
        ),
    );
    rep.plots.push(Plot {
        name: "main_ratio".into(),
        x_label: "epsilon".into(),
        y_label: "main ratio".into(),
        series: Family::ALL
            .iter()
            .map(|f| Series {
                label: f.name().into(),
                points: base.iter().filter(|c| c.family == *f).map(|c| (c.eps, c.report.main_ratio)).collect(),
            })
            .collect(),
    });
    recovery(ctx, rep)
}

fn expansion(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let rule = ctx.rule()?;
    let mesh = ctx.cfg.mesh();
    let v = Extremal::unit(q.n);
    let scale_dir = family::direction(Family::ScaleMode, &q, &rule, &mesh)?;
    let sv_scale = second_variation(&scale_dir, &v, &q, &rule)?;
    let positive = q.p * a_form(&q, &v, &scale_dir, &scale_dir, &rule)?;
    let a3 = alpha3(&q, &mesh)?;
    let phi = family::direction(Family::ThirdMode, &q, &rule, &mesh)?;
    let sv3 = second_variation(&phi, &v, &q, &rule)?;
    let predicted = q.p * (a3.alpha3 - q.alpha2) * weighted_mass(&phi, &v, &q, &rule)?;
    let fit = expansion_consistency(&phi, &q, &rule, &EXPANSION_EPS)?;

    let mut t = Table::new("second_variation", &["direction", "value", "reference"]);
    t.push(vec!["scale-mode".into(), sv_scale.into(), positive.into()]);
    t.push(vec!["third-mode".into(), sv3.into(), predicted.into()]);
    rep.tables.push(t);
    let mut e = Table::new("expansion", &["epsilon", "remainder"]);
    for &(eps, r) in &fit.remainders {
        e.push(vec![eps.into(), r.into()]);
    }
    rep.tables.push(e);
    let mut s = Table::new("expansion_fit", &["quantity", "value"]);
    kv(&mut s, "order", fit.order);
    kv(&mut s, "taylor_coefficient", fit.coefficient);
    rep.tables.push(s);

    rep.check(
        8,
        "second variation",
        sv_scale.abs() <= 1e-4 * positive && rel(sv3, predicted) <= 1e-2,
        format!(
            "scale mode {sv_scale:.2e} against {positive:.3e}; third mode {sv3:.6e} vs {predicted:.6e} ({:.2e})",
            rel(sv3, predicted)
        ),
    );
    let need = q.p.min(3.0) - 0.2;
    rep.check(9, "expansion order", fit.order >= need, format!("fitted order {:.3} (need {need:.2})", fit.order));
    rep.plots.push(Plot {
        name: "remainder".into(),
        x_label: "epsilon".into(),
        y_label: "remainder".into(),
        series: vec![Series { label: "third mode".into(), points: fit.remainders.clone() }],
    });
    Ok(())
}

fn interpolate(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let cases = ctx.sweep()?;
    let mut t = Table::new("interpolation", &["family", "epsilon", "t", "lhs", "rhs"]);
    let mut bad = 0;
    let mut total = 0;
    for c in &cases {
        for &(s, lhs, rhs) in &c.interpolation {
            total += 1;
            if lhs > rhs + 1e-12 * rhs.abs() {
                bad += 1;
            }
            t.push(vec![c.family.name().into(), c.eps.into(), s.into(), lhs.into(), rhs.into()]);
        }
    }
    rep.tables.push(t);
    rep.check(11, "interpolation", bad == 0 && total > 0, format!("{bad} of {total} points violate lhs <= rhs"));
    Ok(())
}

/// Finite-difference step for the Cartesian oracle; at 1e-3 the O(h²) truncation sits right at 1e-4.
const POLAR_STEP: f64 = 5e-4;

fn polar(ctx: &mut Context, rep: &mut Report) -> Result<()> {
    let q = ctx.params;
    let c = polar_fd_check(&q, 100, ctx.cfg.seed, POLAR_STEP)?;
    let mut t = Table::new("polar", &["quantity", "value"]);
    kv(&mut t, "points", c.points as f64);
    kv(&mut t, "max_rel_error", c.max_rel_error);
    kv(&mut t, "median_order", c.median_order);
    rep.tables.push(t);
    rep.check(
        13,
        "polar formula",
        c.max_rel_error < 1e-4 && (c.median_order - 2.0).abs() <= 0.3,
        format!("max relative error {:.2e}, difference order {:.3}", c.max_rel_error, c.median_order),
    );
    Ok(())
}
