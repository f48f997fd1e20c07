use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use scs_core::analytic::{analytic_tail_curve, few_bs_curve, log_grid, Method, TailCurve};
use scs_core::montecarlo::{run_campaign, write_campaign, CampaignResult, McConfig};
use scs_core::transforms::{reduce, DensitySpec, FadingModel, PathLossModel, SystemSpec};
use scs_core::{Error, Result};

use crate::args::{
    GridArgs, McArgs, MethodArg, Parameter, SpecArgs, SweepArgs, TailArgs, TransformArgs, Which,
};
use crate::manifest::{set_flag, RunManifest, RESOLVED_SPEC_FILE};

/// Extra allowance on top of three standard errors when a simulated point
/// is compared with a quadrature value.
pub const QUADRATURE_ALLOWANCE: f64 = 1e-4;

pub struct Outcome {
    pub methods: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub eta: Vec<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    /// Human-readable summary for stderr.
    pub summary: Vec<String>,
}

pub fn load_spec(args: &SpecArgs) -> Result<SystemSpec> {
    let mut spec = SystemSpec::load(&args.spec)?;
    if let Some(v) = args.lambda0 {
        set_parameter(&mut spec, Parameter::Lambda0, v)?;
    }
    if let Some(v) = args.epsilon {
        set_parameter(&mut spec, Parameter::Epsilon, v)?;
    }
    if let Some(v) = args.noise {
        set_parameter(&mut spec, Parameter::Noise, v)?;
    }
    if let Some(v) = args.gain {
        spec.k = v;
    }
    if let Some(v) = args.sigma_db {
        set_parameter(&mut spec, Parameter::Sigma, v)?;
    }
    Ok(spec)
}

pub fn set_parameter(spec: &mut SystemSpec, p: Parameter, v: f64) -> Result<()> {
    match p {
        Parameter::Lambda0 => match &mut spec.density {
            DensitySpec::Homogeneous { lambda0 } => *lambda0 = v,
            _ => {
                return Err(Error::Schema(
                    "lambda0 applies only to homogeneous densities".into(),
                ))
            }
        },
        Parameter::Epsilon => match &mut spec.pathloss {
            PathLossModel::InversePower { epsilon } => *epsilon = v,
            _ => {
                return Err(Error::Schema(
                    "epsilon applies only to power-law path loss".into(),
                ))
            }
        },
        Parameter::Noise => spec.n = v,
        Parameter::Sigma => spec.fading = FadingModel::LogNormal { sigma_db: v },
    }
    Ok(())
}

pub fn eta_grid(g: &GridArgs) -> Result<Vec<f64>> {
    let mut eta = match &g.eta {
        Some(v) => v.clone(),
        None => log_grid(g.eta_min, g.eta_max, g.eta_points)?,
    };
    if g.eta_zero && eta.first() != Some(&0.0) {
        eta.insert(0, 0.0);
    }
    if eta.iter().any(|e| !(*e >= 0.0 && e.is_finite())) || eta.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "thresholds must be finite, non-negative and increasing".into(),
        ));
    }
    Ok(eta)
}

fn mc_config(m: &McArgs, eta: &[f64]) -> McConfig {
    McConfig {
        trials: m.trials,
        r_max: m.r_max,
        seed: m.seed,
        eta: eta.to_vec(),
        ..McConfig::default()
    }
}

fn few_bs_applies(spec: &SystemSpec) -> bool {
    matches!(spec.density, DensitySpec::Homogeneous { .. })
        && spec.epsilon().is_some()
        && spec.n == 0.0
}

#[derive(Serialize)]
struct ComparisonRow {
    eta: f64,
    analytic: Option<f64>,
    analytic_err: Option<f64>,
    mc: Option<f64>,
    mc_se: Option<f64>,
    fewbs: Option<f64>,
    mc_minus_analytic: Option<f64>,
    fewbs_minus_analytic: Option<f64>,
    mc_pass: Option<bool>,
}

/// `|p_hat - p| <= 3 SE + allowance`.
pub fn within_three_se(p_hat: f64, se: f64, p: f64, allowance: f64) -> bool {
    (p_hat - p).abs() <= 3.0 * se + allowance
}

fn write_comparison(
    path: &Path,
    eta: &[f64],
    analytic: Option<&TailCurve>,
    mc: Option<&TailCurve>,
    fewbs: Option<&TailCurve>,
) -> Result<(usize, usize)> {
    let mut w = csv::Writer::from_path(path)?;
    let (mut passed, mut checked) = (0, 0);
    for (i, &e) in eta.iter().enumerate() {
        let a = analytic.map(|c| (c.p[i], c.err[i]));
        let m = mc.map(|c| (c.p[i], c.err[i]));
        let f = fewbs.map(|c| c.p[i]);
        let pass = match (a, m) {
            (Some((p, _)), Some((ph, se))) => {
                let ok = within_three_se(ph, se, p, QUADRATURE_ALLOWANCE);
                checked += 1;
                passed += ok as usize;
                Some(ok)
            }
            _ => None,
        };
        w.serialize(ComparisonRow {
            eta: e,
            analytic: a.map(|x| x.0),
            analytic_err: a.map(|x| x.1),
            mc: m.map(|x| x.0),
            mc_se: m.map(|x| x.1),
            fewbs: f,
            mc_minus_analytic: a.zip(m).map(|(a, m)| m.0 - a.0),
            fewbs_minus_analytic: a.zip(f).map(|(a, f)| f - a.0),
            mc_pass: pass,
        })?;
    }
    w.flush()?;
    Ok((passed, checked))
}

pub fn cmd_tail(args: &TailArgs, spec: &SystemSpec) -> Result<Outcome> {
    let eta = eta_grid(&args.grid)?;
    let out = &args.spec.out;
    std::fs::create_dir_all(out)?;
    let want = |m: MethodArg| args.method == m || args.method == MethodArg::All;
    let mut outcome = Outcome {
        methods: vec![],
        outputs: vec![],
        eta: eta.clone(),
        seed: None,
        trials: None,
        summary: vec![],
    };

    let analytic = if want(MethodArg::Analytic) {
        let c = analytic_tail_curve(spec, &eta)?;
        let path = out.join("analytic.csv");
        c.save_csv(&path)?;
        outcome.methods.push("analytic".into());
        outcome.outputs.push(path);
        Some(c)
    } else {
        None
    };

    let fewbs = if args.method == MethodArg::Fewbs
        || (args.method == MethodArg::All && few_bs_applies(spec))
    {
        let c = few_bs_curve(spec, &eta)?;
        let path = out.join("fewbs.csv");
        c.save_csv(&path)?;
        outcome.methods.push("fewbs".into());
        outcome.outputs.push(path);
        Some(c)
    } else {
        if args.method == MethodArg::All {
            outcome
                .summary
                .push("few-BS curve skipped: it needs a noise-free homogeneous field".into());
        }
        None
    };

    let mc: Option<CampaignResult> = if want(MethodArg::Mc) {
        let cfg = mc_config(&args.mc, &eta);
        let res = run_campaign(spec, &cfg)?;
        outcome
            .outputs
            .extend(write_campaign(spec, &res, out, "mc")?);
        outcome.methods.push("mc".into());
        outcome.seed = Some(cfg.seed);
        outcome.trials = Some(cfg.trials);
        if res.failed > 0 {
            outcome
                .summary
                .push(format!("{} trials failed and were excluded", res.failed));
        }
        Some(res)
    } else {
        None
    };

    if outcome.methods.len() > 1 {
        let path = out.join("comparison.csv");
        let (passed, checked) = write_comparison(
            &path,
            &eta,
            analytic.as_ref(),
            mc.as_ref().map(|r| r.tail()),
            fewbs.as_ref(),
        )?;
        if checked > 0 {
            outcome.summary.push(format!(
                "comparison: {passed} of {checked} thresholds within 3 SE of the analytic curve"
            ));
        }
        outcome.outputs.push(path);
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct CheckRow {
    eta: f64,
    original: f64,
    original_se: f64,
    transformed: f64,
    transformed_se: f64,
    difference: f64,
    pass: bool,
}

pub fn cmd_transform(args: &TransformArgs, spec: &SystemSpec) -> Result<Outcome> {
    let out = &args.spec.out;
    std::fs::create_dir_all(out)?;
    let transformed = match args.which {
        Which::Fading => spec.absorb_fading()?,
        Which::Pathloss => spec.canonicalize_pathloss()?,
        Which::Noise => spec.canonicalize_noise()?,
        Which::Reduce => reduce(spec)?.to_spec(),
    };
    transformed.validate()?;
    let name = match args.which {
        Which::Fading => "fading",
        Which::Pathloss => "pathloss",
        Which::Noise => "noise",
        Which::Reduce => "reduce",
    };
    let path = out.join(format!("{name}.json"));
    std::fs::write(&path, transformed.to_json()?)?;
    let mut outcome = Outcome {
        methods: vec![name.to_string()],
        outputs: vec![path],
        eta: vec![],
        seed: None,
        trials: None,
        summary: vec![],
    };
    if args.verify {
        let eta = eta_grid(&args.grid)?;
        let cfg = mc_config(&args.mc, &eta);
        let a = run_campaign(spec, &cfg)?;
        // An independent stream for the transformed system.
        let b = run_campaign(
            &transformed,
            &cfg.clone().with_seed(cfg.seed.wrapping_add(1)),
        )?;
        let path = out.join("transform_check.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let mut passed = 0;
        for (i, &e) in eta.iter().enumerate() {
            let (pa, sa) = (a.tail().p[i], a.tail().err[i]);
            let (pb, sb) = (b.tail().p[i], b.tail().err[i]);
            let pass = (pa - pb).abs() <= 3.0 * (sa * sa + sb * sb).sqrt();
            passed += pass as usize;
            w.serialize(CheckRow {
                eta: e,
                original: pa,
                original_se: sa,
                transformed: pb,
                transformed_se: sb,
                difference: pb - pa,
                pass,
            })?;
        }
        w.flush()?;
        outcome.summary.push(format!(
            "transform check: {passed} of {} thresholds within 3 combined SE",
            eta.len()
        ));
        outcome.outputs.push(path);
        outcome.eta = eta;
        outcome.seed = Some(cfg.seed);
        outcome.trials = Some(cfg.trials);
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct SweepRow {
    param: f64,
    eta: f64,
    p: f64,
    err: f64,
    method: String,
}

pub fn cmd_sweep(args: &SweepArgs, spec: &SystemSpec) -> Result<Outcome> {
    let eta = eta_grid(&args.grid)?;
    let out = &args.spec.out;
    std::fs::create_dir_all(out)?;
    let path = out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    let methods: Vec<Method> = match args.method {
        MethodArg::Analytic => vec![Method::Analytic],
        MethodArg::Mc => vec![Method::MonteCarlo],
        MethodArg::Fewbs => vec![Method::FewBs],
        MethodArg::All => vec![Method::Analytic, Method::FewBs, Method::MonteCarlo],
    };
    let mut used: Vec<Method> = vec![];
    let mut skipped = 0;
    let cfg = mc_config(&args.mc, &eta);
    for &v in &args.values {
        let mut s = spec.clone();
        set_parameter(&mut s, args.parameter, v)?;
        for &m in &methods {
            let curve = match m {
                Method::Analytic => analytic_tail_curve(&s, &eta)?,
                Method::FewBs if args.method == MethodArg::All && !few_bs_applies(&s) => {
                    skipped += 1;
                    continue;
                }
                Method::FewBs => few_bs_curve(&s, &eta)?,
                Method::MonteCarlo => run_campaign(&s, &cfg)?.tail().clone(),
            };
            if !used.contains(&m) {
                used.push(m);
            }
            for (i, &e) in eta.iter().enumerate() {
                w.serialize(SweepRow {
                    param: v,
                    eta: e,
                    p: curve.p[i],
                    err: curve.err[i],
                    method: m.to_string(),
                })?;
            }
        }
    }
    w.flush()?;
    let mut summary = vec![];
    if skipped > 0 {
        summary.push(format!(
            "few-BS curve skipped for {skipped} value(s): it needs a noise-free homogeneous field"
        ));
    }
    let mc = used.contains(&Method::MonteCarlo);
    Ok(Outcome {
        methods: used.iter().map(|m| m.to_string()).collect(),
        outputs: vec![path],
        eta,
        seed: mc.then_some(cfg.seed),
        trials: mc.then_some(cfg.trials),
        summary,
    })
}

/// Save the resolved spec and the manifest next to the outputs.
pub fn finish(
    command: &str,
    raw_args: &[String],
    out: &Path,
    spec: &SystemSpec,
    outcome: Outcome,
    started: Instant,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out)?;
    let spec_path = out.join(RESOLVED_SPEC_FILE);
    std::fs::write(&spec_path, spec.to_json()?)?;
    let mut args = raw_args.to_vec();
    set_flag(&mut args, "--spec", &spec_path.to_string_lossy());
    let mut outputs = outcome.outputs;
    outputs.push(spec_path);
    let manifest = RunManifest {
        command: command.to_string(),
        args,
        spec: spec.clone(),
        methods: outcome.methods,
        outputs,
        seed: outcome.seed,
        trials: outcome.trials,
        eta: outcome.eta,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    manifest.save(out)
}
