//! Command-line surface: generate, diagnose, audit, scale-check.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nsrlab::criteria::{ckn_check, contraction_trace, evaluate_criterion, lemma_audit, AuditOptions};
use nsrlab::genflow::{generate, rescale, FlowFamily, FlowSpec, ForceSpec};
use nsrlab::normcore::{functional, BorderlinePair, Functional, LadderSpec, Prepared};

use crate::config::RunConfig;
use crate::container;
use crate::error::CliError;
use crate::report::{
    to_json, AuditJsonReport, ContractionJson, DiagnoseReport, LemmaJson, ReportMeta,
    ScaleCheckReport, ScaleEntryJson, TermJson, VerdictJson,
};

#[derive(Parser)]
#[command(
    name = "nsrlab",
    version,
    about = "Scale-invariant parabolic-cylinder diagnostics for sampled incompressible flows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Sample a test-flow family into a field container.
    Generate(GenerateArgs),
    /// Evaluate the interior regularity criteria at a point.
    Diagnose(DiagnoseArgs),
    /// Audit the localized inequalities at one radius pair.
    Audit(AuditArgs),
    /// Compare functionals across the exact scaling map.
    ScaleCheck(ScaleCheckArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    /// abc | single-mode-beltrami | homogeneous | random-solenoidal
    #[arg(long)]
    pub family: String,
    /// Spatial samples per axis.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    /// Time samples.
    #[arg(long, default_value_t = 16)]
    pub nt: usize,
    /// Time step.
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    /// Box side (defaults to 2 pi).
    #[arg(long)]
    pub length: Option<f64>,
    /// Start time (defaults so the trajectory ends at t = 0).
    #[arg(long)]
    pub t0: Option<f64>,
    /// Viscosity for the Beltrami families.
    #[arg(long, default_value_t = 0.1)]
    pub nu: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    pub amp_a: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    pub amp_b: f64,
    #[arg(long = "C", default_value_t = 1.0)]
    pub amp_c: f64,
    /// Beltrami wavenumber multiplier.
    #[arg(long, default_value_t = 1)]
    pub mode: u32,
    /// Amplitude for the single-mode and random families and the mock.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub max_mode: usize,
    /// Mollification radius of the homogeneous mock.
    #[arg(long, default_value_t = 0.25)]
    pub r_moll: f64,
    #[arg(long, default_value_t = 2.2)]
    pub taper_start: f64,
    #[arg(long, default_value_t = 2.9)]
    pub taper_end: f64,
    /// Mock center "x,y,z" (defaults to the box center).
    #[arg(long)]
    pub center: Option<String>,
    /// Constant body force "fx,fy,fz".
    #[arg(long)]
    pub force: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub container: PathBuf,
    /// Evaluation center "x,y,z".
    #[arg(long)]
    pub center: Option<String>,
    /// Evaluation time (defaults to the last sample).
    #[arg(long)]
    pub time: Option<f64>,
    /// TOML run configuration; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub rungs: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub subsamples: Option<usize>,
    /// Use the plain velocity instead of subtracting the slice mean.
    #[arg(long)]
    pub plain_velocity: bool,
    /// Replace the vorticity gradient by the curl of the vorticity.
    #[arg(long)]
    pub curl_vorticity_gradient: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so reports are byte-reproducible.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub container: PathBuf,
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long)]
    pub time: Option<f64>,
    /// Inner radius.
    #[arg(long)]
    pub r: f64,
    /// Outer radius; the hypotheses need 2r <= rho.
    #[arg(long)]
    pub rho: f64,
    /// Time exponent generating the borderline pair.
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 4)]
    pub subsamples: usize,
    /// Skip the potential-decomposition remainder traces.
    #[arg(long)]
    pub skip_remainders: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Args)]
pub struct ScaleCheckArgs {
    #[arg(long)]
    pub container: PathBuf,
    /// Scaling factor; an integer power of two.
    #[arg(long, default_value_t = 2)]
    pub lambda: u32,
    /// Reference center "x,y,z" (defaults to the box center).
    #[arg(long)]
    pub center: Option<String>,
    /// Reference time (defaults to the last sample).
    #[arg(long)]
    pub time: Option<f64>,
    /// Radii of the scaled evaluation, comma separated.
    #[arg(long, default_value = "0.4,0.5,0.6,0.7")]
    pub radii: String,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 4)]
    pub subsamples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
    /// Test hook: drop the velocity prefactor of the scaling map to verify
    /// the check catches broken exponents.
    #[arg(long, hide = true)]
    pub test_break_scaling: bool,
}

fn parse_vec3(text: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad vector '{text}': {e}")))?;
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("expected three components in '{text}'")));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn parse_radii(text: &str) -> Result<Vec<f64>, CliError> {
    let radii: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad radii '{text}': {e}")))?;
    if radii.is_empty() {
        return Err(CliError::Usage("need at least one radius".into()));
    }
    Ok(radii)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    init_worker_pool();
    match cli.cmd {
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Diagnose(args) => cmd_diagnose(args),
        Cmd::Audit(args) => cmd_audit(args),
        Cmd::ScaleCheck(args) => cmd_scale_check(args),
    }
}

fn init_worker_pool() {
    if let Ok(n) = std::env::var("NSRLAB_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let length = args.length.unwrap_or(2.0 * std::f64::consts::PI);
    let t0 = args.t0.unwrap_or(-((args.nt - 1) as f64) * args.dt);
    let grid = nsrlab::fieldlab::make_grid(args.n, args.nt, length, args.dt, t0)?;
    let center = match &args.center {
        Some(c) => parse_vec3(c)?,
        None => [length / 2.0; 3],
    };
    let family = match args.family.as_str() {
        "abc" => FlowFamily::Abc {
            a: args.amp_a,
            b: args.amp_b,
            c: args.amp_c,
            nu: args.nu,
            mode: args.mode,
        },
        "single-mode-beltrami" => FlowFamily::SingleModeBeltrami {
            amplitude: args.amplitude,
            nu: args.nu,
            mode: args.mode,
        },
        "homogeneous" => FlowFamily::HomogeneousMinusOne {
            amplitude: args.amplitude,
            r_moll: args.r_moll,
            taper_start: args.taper_start,
            taper_end: args.taper_end,
            center,
            axis: [0.0, 0.0, 1.0],
        },
        "random-solenoidal" => FlowFamily::RandomSolenoidal {
            seed: args.seed,
            max_mode: args.max_mode,
            amplitude: args.amplitude,
        },
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    };
    let mut spec = FlowSpec::new(family);
    if let Some(f) = &args.force {
        spec.force = Some(ForceSpec::Constant(parse_vec3(f)?));
    }
    let stack = generate(&spec, &grid)?;
    let crc = container::write_container(&args.out, &stack)?;
    println!(
        "wrote {} ({}^3 x {} samples, h = {:.6}, dt = {}, t in [{}, {}], crc32 {:08x})",
        args.out.display(),
        grid.nx,
        grid.nt,
        grid.h(),
        grid.dt,
        grid.t0,
        grid.last_time(),
        crc
    );
    Ok(())
}

fn load(container_path: &PathBuf) -> Result<(nsrlab::fieldlab::FieldStack, u32), CliError> {
    let stack = container::read_container(container_path)?;
    let crc = container::stored_crc(container_path)?;
    Ok((stack, crc))
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<(), CliError> {
    let (stack, crc) = load(&args.container)?;
    let grid = stack.grid;
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_toml(&std::fs::read_to_string(path)?)?,
        None => {
            let mut c = RunConfig::default();
            c.center = [grid.domain_length / 2.0; 3];
            c.time = grid.last_time();
            c
        }
    };
    if let Some(c) = &args.center {
        cfg.center = parse_vec3(c)?;
    }
    if let Some(t) = args.time {
        cfg.time = t;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if let Some(r0) = args.r0 {
        cfg.ladder.r0 = r0;
    }
    if let Some(ratio) = args.ratio {
        cfg.ladder.ratio = ratio;
    }
    if let Some(count) = args.rungs {
        cfg.ladder.count = count;
    }
    if let Some(theta) = args.theta {
        cfg.theta = theta;
    }
    if let Some(s) = args.subsamples {
        cfg.subsamples = s;
    }
    if args.plain_velocity {
        cfg.use_centered_velocity = false;
    }
    if args.curl_vorticity_gradient {
        cfg.curl_for_vorticity_gradient = true;
    }

    let prep = Prepared::new(stack);
    let mut verdicts = Vec::new();
    let mut warnings = Vec::new();
    for kind_cfg in &cfg.kinds {
        let criterion = cfg.criterion_config(kind_cfg);
        let v = evaluate_criterion(&prep, cfg.center, cfg.time, &criterion)?;
        verdicts.push(VerdictJson::from_verdict(
            kind_cfg.kind.label(),
            kind_cfg.p,
            kind_cfg.q,
            &v,
        ));
    }
    let ladder: LadderSpec = cfg.ladder.clone().into();
    let one_radius = match ckn_check(&prep, cfg.center, cfg.time, &ladder, cfg.epsilon, cfg.subsamples)
    {
        Ok(v) => Some(VerdictJson::from_verdict("one_radius", 3.0, 3.0, &v)),
        Err(nsrlab::Error::MissingField(which)) => {
            warnings.push(format!("one-radius check skipped: missing {which}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let contraction = match contraction_trace(
        &prep,
        cfg.center,
        cfg.time,
        cfg.ladder.r0,
        cfg.theta,
        6,
        cfg.epsilon,
        cfg.subsamples,
    ) {
        Ok(t) => Some(ContractionJson::from_trace(cfg.theta, &t)),
        Err(nsrlab::Error::MissingField(which)) => {
            warnings.push(format!("contraction trace skipped: missing {which}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let report = DiagnoseReport {
        meta: ReportMeta::new(&args.container.display().to_string(), crc, !args.no_timestamp),
        config: cfg,
        verdicts,
        one_radius_check: one_radius,
        contraction,
        warnings,
    };
    emit(&args.out, &to_json(&report)?)
}

fn cmd_audit(args: AuditArgs) -> Result<(), CliError> {
    let (stack, crc) = load(&args.container)?;
    let grid = stack.grid;
    let center = match &args.center {
        Some(c) => parse_vec3(c)?,
        None => [grid.domain_length / 2.0; 3],
    };
    let time = args.time.unwrap_or_else(|| grid.last_time());
    let prep = Prepared::new(stack);
    let opts = AuditOptions {
        gamma: args.gamma,
        subsamples: args.subsamples,
        with_potential_remainders: !args.skip_remainders,
    };
    let audit = lemma_audit(&prep, center, time, args.r, args.rho, args.q, &opts)?;
    let report = AuditJsonReport {
        meta: ReportMeta::new(&args.container.display().to_string(), crc, !args.no_timestamp),
        context: audit.context,
        lemmas: audit
            .reports
            .iter()
            .map(|r| LemmaJson {
                id: r.id.label(),
                applicable: r.applicable,
                lhs: r.lhs,
                rhs_terms: r
                    .rhs_terms
                    .iter()
                    .map(|(name, value)| TermJson { name: name.clone(), value: *value })
                    .collect(),
                fitted_constant: r.fitted_constant,
                trivially_satisfied: r.trivially_satisfied,
                regime_notes: r.regime_notes.clone(),
            })
            .collect(),
    };
    emit(&args.out, &to_json(&report)?)
}

/// Functionals compared by the scale check (the curl-variant gradients are
/// covered by the audit reports instead).
const SCALE_SET: [Functional; 9] = [
    Functional::A,
    Functional::E,
    Functional::C,
    Functional::CTilde,
    Functional::D,
    Functional::GTilde,
    Functional::G1,
    Functional::W,
    Functional::W1,
];

fn cmd_scale_check(args: ScaleCheckArgs) -> Result<(), CliError> {
    let (stack, crc) = load(&args.container)?;
    let grid = stack.grid;
    let center = match &args.center {
        Some(c) => parse_vec3(c)?,
        None => [grid.domain_length / 2.0; 3],
    };
    let time = args.time.unwrap_or_else(|| grid.last_time());
    let radii = parse_radii(&args.radii)?;
    let exps = BorderlinePair::from_q(args.q)?;
    let lam = args.lambda;
    let mut scaled = rescale(&stack, lam)?;
    if args.test_break_scaling {
        // deliberately wrong velocity exponent (lambda^0 instead of lambda^1)
        scaled.u.data.mapv_inplace(|v| v / lam as f64);
    }
    let scaled_center = [center[0] / lam as f64, center[1] / lam as f64, center[2] / lam as f64];
    let scaled_time = time / (lam * lam) as f64;

    let prep_ref = Prepared::new(stack);
    let prep_scaled = Prepared::new(scaled);

    let mut entries = Vec::new();
    let mut worst = 0.0f64;
    for &r in &radii {
        let quad_s = nsrlab::fieldlab::cylinder_mask(
            prep_scaled.grid(),
            &nsrlab::fieldlab::ParabolicCylinder::new(scaled_center, scaled_time, r),
            args.subsamples,
        )?;
        let quad_r = nsrlab::fieldlab::cylinder_mask(
            prep_ref.grid(),
            &nsrlab::fieldlab::ParabolicCylinder::new(center, time, lam as f64 * r),
            args.subsamples,
        )?;
        for name in SCALE_SET {
            let scaled_value = match functional(name, &prep_scaled, &quad_s, Some(&exps)) {
                Ok(v) => v,
                Err(nsrlab::Error::MissingField(_)) | Err(nsrlab::Error::ExponentRegime(_)) => {
                    continue
                }
                Err(e) => return Err(e.into()),
            };
            let reference_value = functional(name, &prep_ref, &quad_r, Some(&exps))?;
            let mismatch =
                (scaled_value - reference_value).abs() / reference_value.abs().max(1e-9);
            worst = worst.max(mismatch);
            entries.push(ScaleEntryJson {
                functional: name.label(),
                r,
                scaled_value,
                reference_value,
                relative_mismatch: mismatch,
            });
        }
    }
    let report = ScaleCheckReport {
        meta: ReportMeta::new(&args.container.display().to_string(), crc, !args.no_timestamp),
        lambda: lam,
        center,
        time,
        q: args.q,
        entries,
        worst_relative_mismatch: worst,
    };
    emit(&args.out, &to_json(&report)?)
}
