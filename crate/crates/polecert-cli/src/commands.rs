use crate::args;
use crate::fail::{input_err, CmdResult, Failure};
use crate::historyexpr::HistoryExpr;
use crate::jsonfmt::to_json_17;
use crate::registry::scheme_for;
use crate::report::{
    tool_info, ComparisonBranch, ComparisonInequalities, ComparisonReport, GainNorms,
    RegionThresholds, RegionsReport, ReportDocument, SimSummary, TauStarReport,
};
use crate::request::{DesignRequest, PlantCoeffs};
use crate::svgplot;
use crate::tableio::{atomic_write, spectrum_csv, trajectory_csv};
use polecert_core::placement::{
    a_of_tau, classify_two_root, exp_estimate, region_thresholds, solve_tau_for_a_detailed,
    tau_star_three, AssignedRoots, ControllerDesign, ControllerKind, RootPair, RootTriple,
};
use polecert_core::quasipoly::NeutralQuasiPoly;
use polecert_core::sim::{
    estimate_decay_rate, integrate_hopfield, History, Nonlinearity, PlantSpec, Trajectory,
};
use polecert_core::spectrum::{certify_dominance, default_im_limit, find_roots, Rectangle, Verdict};
use std::f64::consts::PI;
use std::path::Path;

const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_HORIZON: f64 = 4.5;
const DEFAULT_HISTORY: &str = "1+sin(t)";
const HISTORY_SAMPLES: usize = 1024;

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => atomic_write(path, text)
            .map_err(|e| input_err(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(input_err(format!(
            "{what}: expected {n} comma-separated numbers, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>().map_err(|e| input_err(format!("{what}: bad number '{p}': {e}")))
        })
        .collect()
}

fn build_history(src: &str, tau: f64) -> Result<History, Failure> {
    let expr = HistoryExpr::parse(src)
        .map_err(|m| input_err(format!("history expression: {m}")))?;
    let value = expr.clone();
    let deriv = expr;
    Ok(History::from_fn_with_deriv(
        move |t| value.eval(t).0,
        move |t| deriv.eval(t).1,
        tau,
        HISTORY_SAMPLES,
    )?)
}

/// Default decay-fit window: skip the transient (the non-dominant assigned
/// modes enter with comparable weight), stop short of the horizon where
/// steep decays reach the envelope floor.
fn fit_decay(traj: &Trajectory, horizon: f64) -> (Option<f64>, [f64; 2]) {
    let t0 = (0.2 * horizon).min(1.0);
    let t1 = 0.9 * horizon;
    (estimate_decay_rate(traj, t0, t1).ok(), [t0, t1])
}

fn run_hopfield_sim(
    plant: &PlantCoeffs,
    design: &ControllerDesign,
    history_src: &str,
    horizon: f64,
    step: f64,
) -> Result<SimSummary, Failure> {
    let spec = PlantSpec::new(plant.nu, plant.mu, Nonlinearity::Tanh)?;
    let y0 = build_history(history_src, design.tau)?;
    let traj = integrate_hopfield(&spec, design, &y0, horizon, step)?;
    let (fitted_decay_rate, fit_window) = fit_decay(&traj, horizon);
    Ok(SimSummary {
        history: history_src.to_string(),
        horizon,
        step,
        samples: traj.times.len(),
        terminal_value: *traj.values.last().expect("trajectory is never empty"),
        fit_window,
        fitted_decay_rate,
    })
}

/// Synthesize, certify, and estimate for a resolved request. Mutates the
/// request so the echo carries every resolved option, making the report
/// re-runnable without flags. Returns the report and the exit code (0
/// certified, 2 refuted).
fn build_design_report(req: &mut DesignRequest, with_spectrum: bool) -> Result<(ReportDocument, i32), Failure> {
    let mut design = scheme_for(req.controller).design(req.plant.nu, req.plant.mu, &req.roots)?;
    let qp = design.quasipoly()?;
    let s1 = design.assigned_roots.s1();

    let epsilon = req.options.epsilon.unwrap_or(DEFAULT_EPSILON);
    req.options.epsilon = Some(epsilon);
    let im_limit = req.options.im_limit.unwrap_or_else(|| default_im_limit(design.tau));
    req.options.im_limit = Some(im_limit);

    let cert = certify_dominance(&qp, s1, im_limit)?;
    let certified = matches!(cert.verdict, Verdict::CertifiedStrict | Verdict::CertifiedBoundary);
    let estimate = if certified {
        Some(exp_estimate(&qp, &design.assigned_roots, epsilon)?)
    } else {
        None
    };

    let spectrum = if with_spectrum {
        let window = Rectangle::new(s1 - 25.0, s1 + 5.0, -im_limit, im_limit)?;
        Some(find_roots(&qp, &window)?)
    } else {
        None
    };

    let simulation = match req.options.horizon {
        Some(horizon) => {
            let step = req.options.step.unwrap_or(design.tau / 64.0);
            req.options.step = Some(step);
            let history =
                req.options.history.clone().unwrap_or_else(|| DEFAULT_HISTORY.to_string());
            req.options.history = Some(history.clone());
            Some(run_hopfield_sim(&req.plant, &design, &history, horizon, step)?)
        }
        None => None,
    };

    design.certificate = Some(cert);
    let code = if certified { 0 } else { 2 };
    let report = ReportDocument {
        tool: tool_info(),
        request: req.clone(),
        design,
        spectrum,
        estimate,
        simulation,
    };
    Ok((report, code))
}

pub fn cmd_design(a: args::DesignArgs) -> CmdResult {
    let mut req = DesignRequest::load(&a.request)?;
    req.options.epsilon = a.epsilon.or(req.options.epsilon);
    req.options.im_limit = a.im_limit.or(req.options.im_limit);
    req.options.horizon = a.horizon.or(req.options.horizon);
    req.options.step = a.step.or(req.options.step);
    req.validate()?;

    let (report, code) = build_design_report(&mut req, true)?;
    emit(&to_json_17(&report), a.out.as_deref())?;
    if let Some(plot) = &a.plot {
        let points: Vec<(f64, f64)> = report
            .spectrum
            .as_ref()
            .map(|s| s.roots.iter().map(|z| (z.re, z.im)).collect())
            .unwrap_or_default();
        let svg = svgplot::scatter_svg(&points, "Re s", "Im s");
        atomic_write(plot, &svg).map_err(|e| input_err(format!("{}: {e}", plot.display())))?;
    }
    Ok(code)
}

pub fn cmd_estimate_k(a: args::EstimateKArgs) -> CmdResult {
    let mut req = DesignRequest::load(&a.request)?;
    req.options.epsilon = a.epsilon.or(req.options.epsilon);
    req.validate()?;

    let (report, code) = build_design_report(&mut req, false)?;
    emit(&to_json_17(&report), a.out.as_deref())?;
    Ok(code)
}

pub fn cmd_spectrum(a: args::SpectrumArgs) -> CmdResult {
    let qp = match (&a.coeffs, &a.request) {
        (Some(coeffs), _) => {
            let c = parse_floats(coeffs, 4, "--coeffs")?;
            NeutralQuasiPoly::new(c[0], c[1], c[2], c[3])?
        }
        (None, Some(path)) => {
            let req = DesignRequest::load(path)?;
            let design =
                scheme_for(req.controller).design(req.plant.nu, req.plant.mu, &req.roots)?;
            design.quasipoly()?
        }
        (None, None) => unreachable!("clap requires coeffs or request"),
    };

    let window = match &a.window {
        Some(w) => {
            let v = parse_floats(w, 4, "--window")?;
            Rectangle::new(v[0], v[1], v[2], v[3])?
        }
        None => {
            let half = 50.0 / qp.tau;
            let im = 20.0 * PI / qp.tau;
            Rectangle::new(-half, half, -im, im)?
        }
    };

    let report = find_roots(&qp, &window)?;
    emit(&spectrum_csv(&report, qp.chain_abscissa()), a.out.as_deref())?;
    if let Some(plot) = &a.plot {
        let points: Vec<(f64, f64)> = report.roots.iter().map(|z| (z.re, z.im)).collect();
        let svg = svgplot::scatter_svg(&points, "Re s", "Im s");
        atomic_write(plot, &svg).map_err(|e| input_err(format!("{}: {e}", plot.display())))?;
    }
    Ok(0)
}

pub fn cmd_simulate(a: args::SimulateArgs) -> CmdResult {
    let (plant, design, history_src, horizon, step);
    if a.no_control {
        let p = parse_floats(a.plant.as_deref().expect("clap: --no-control requires --plant"), 2, "--plant")?;
        plant = PlantCoeffs { nu: p[0], mu: p[1] };
        // Zero gains leave the dynamics delay-free; the unit delay only
        // sizes the history window.
        design = ControllerDesign {
            kind: ControllerKind::P,
            kp: 0.0,
            kd: 0.0,
            tau: 1.0,
            plant_a: p[0] - p[1],
            assigned_roots: AssignedRoots::Pair(RootPair::new(-1.0, -2.0)?),
            certificate: None,
        };
        history_src = a.history.unwrap_or_else(|| DEFAULT_HISTORY.to_string());
        horizon = a.horizon.unwrap_or(DEFAULT_HORIZON);
        step = a.step.unwrap_or(design.tau / 64.0);
    } else {
        let path = a.request.as_ref().expect("clap requires request or --no-control");
        let req = DesignRequest::load(path)?;
        plant = req.plant;
        design = scheme_for(req.controller).design(req.plant.nu, req.plant.mu, &req.roots)?;
        history_src = a
            .history
            .or(req.options.history)
            .unwrap_or_else(|| DEFAULT_HISTORY.to_string());
        horizon = a.horizon.or(req.options.horizon).unwrap_or(DEFAULT_HORIZON);
        step = a.step.or(req.options.step).unwrap_or(design.tau / 64.0);
    }

    let spec = PlantSpec::new(plant.nu, plant.mu, Nonlinearity::Tanh)?;
    let y0 = build_history(&history_src, design.tau)?;
    let traj = integrate_hopfield(&spec, &design, &y0, horizon, step)?;
    let (fitted, _) = fit_decay(&traj, horizon);

    emit(&trajectory_csv(&traj, fitted), a.out.as_deref())?;
    if let Some(plot) = &a.plot {
        let points: Vec<(f64, f64)> =
            traj.times.iter().copied().zip(traj.values.iter().copied()).collect();
        let svg = svgplot::line_svg(&points, "t", "y");
        atomic_write(plot, &svg).map_err(|e| input_err(format!("{}: {e}", plot.display())))?;
    }
    Ok(0)
}

pub fn cmd_compare(a: args::CompareArgs) -> CmdResult {
    let p = parse_floats(&a.plant, 2, "--plant")?;
    let plant = PlantCoeffs { nu: p[0], mu: p[1] };
    let pd_roots = parse_floats(&a.pd_roots, 3, "--pd-roots")?;
    let p_pair = parse_floats(&a.p_pair, 2, "--p-pair")?;
    if pd_roots[0] != p_pair[0] {
        return Err(input_err(format!(
            "mismatched s₁: pd roots start at {} but the p pair starts at {}",
            pd_roots[0], p_pair[0]
        )));
    }

    let horizon = a.horizon.unwrap_or(DEFAULT_HORIZON);
    let branch = |kind: ControllerKind, roots: &[f64], note: Option<String>| -> Result<ComparisonBranch, Failure> {
        let mut design = scheme_for(kind).design(plant.nu, plant.mu, roots)?;
        let qp = design.quasipoly()?;
        let s1 = design.assigned_roots.s1();
        design.certificate = Some(certify_dominance(&qp, s1, default_im_limit(design.tau))?);
        let step = a.step.unwrap_or(design.tau / 64.0);
        let simulation = run_hopfield_sim(&plant, &design, DEFAULT_HISTORY, horizon, step)?;
        Ok(ComparisonBranch { design, simulation, note })
    };

    let coincident = p_pair[0] == p_pair[1];
    let pd = branch(ControllerKind::Pd, &pd_roots, None)?;
    let p = branch(
        ControllerKind::P,
        &p_pair,
        coincident.then(|| "non-semi-simple: sensitive to perturbation".to_string()),
    )?;

    let (kp, kd) = (pd.design.kp, pd.design.kd);
    let norms = GainNorms { max: kp.max(kd), sum: kp + kd, euclid: kp.hypot(kd) };
    let p_gain = p.design.kp;
    let inequalities = ComparisonInequalities {
        tau_pd_gt_tau_p: pd.design.tau > p.design.tau,
        p_gain_gt_max: p_gain > norms.max,
        p_gain_gt_sum: p_gain > norms.sum,
        p_gain_gt_euclid: p_gain > norms.euclid,
    };
    let refuted = [&pd, &p].iter().any(|b| {
        b.design
            .certificate
            .as_ref()
            .is_some_and(|c| c.verdict == Verdict::Refuted)
    });

    let report = ComparisonReport {
        tool: tool_info(),
        plant,
        tau_pd: pd.design.tau,
        tau_p: p.design.tau,
        tau_ratio: pd.design.tau / p.design.tau,
        pd_gain_norms: norms,
        p_gain,
        inequalities,
        pd,
        p,
    };
    emit(&to_json_17(&report), a.out.as_deref())?;
    Ok(if refuted { 2 } else { 0 })
}

pub fn cmd_tau_star(a: args::TauStarArgs) -> CmdResult {
    let r = parse_floats(&a.roots, 3, "--roots")?;
    let roots = RootTriple::new(r[0], r[1], r[2])?;
    let tau_star = tau_star_three(&roots)?;
    let search = a.a.map(|target| solve_tau_for_a_detailed(&roots, target)).transpose()?;
    let report = TauStarReport {
        tool: tool_info(),
        roots,
        tau_star,
        a_at_tau_star: a_of_tau(&roots, tau_star),
        equidistributed: roots.is_equidistributed(),
        a_target: a.a,
        search,
    };
    emit(&to_json_17(&report), a.out.as_deref())?;
    Ok(0)
}

pub fn cmd_regions(a: args::RegionsArgs) -> CmdResult {
    let p = parse_floats(&a.pair, 2, "--pair")?;
    let pair = RootPair::new(p[0], p[1])?;
    let label = classify_two_root(&pair, a.a, a.tau)?;
    let (phi1, phi2, phi3) = region_thresholds(a.tau * (pair.s1 - pair.s2));
    let report = RegionsReport {
        tool: tool_info(),
        pair,
        a: a.a,
        tau: a.tau,
        lambda3: (a.a + pair.s1) / (pair.s1 - pair.s2),
        thresholds: RegionThresholds { phi1, phi2, phi3 },
        label,
    };
    emit(&to_json_17(&report), a.out.as_deref())?;
    Ok(0)
}
