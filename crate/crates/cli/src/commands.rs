use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use coherence_core::channel::{
    self, lpc_with_tol, max_visibility_scan, random_psi_perp, random_vacuum_preserving_channel_with,
    ChannelError, KrausChannel, LossChannelParams, LpcReport, VisibilityScan, INEQUALITY_TOL,
    ZERO_LOSS_CREATION_TOL, ZERO_LOSS_TOL,
};
use coherence_core::dynamics::{Dissipator, DynamicsError, Model, ModelSpec};
use coherence_core::linalg::random::seeded_rng;
use coherence_core::linalg::{ComplexMatrix, STRUCTURAL_TOL};
use coherence_core::linear_optics::{
    induced_channel, vacuum_preservation_test, AncillaState, ModeUnitary, VacuumTest,
};
use coherence_core::spectra::{
    run_sweep, write_csv_to, EnvelopeConfig, SpectraError, SweepConfig, SweepSummary,
};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::literal::parse_complex_vector;
use crate::{
    CliError, DissipatorArg, ExtractArgs, GlobalOpts, LinoptArgs, LpcArgs, ModelKind, MzArgs,
    PsiArgs, SpectrumArgs, VerifyArgs,
};

type CliResult<T = ()> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid {what} in {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable result");
    text.push('\n');
    text
}

/// Sends the main result to `--output` or stdout.
fn emit(global: &GlobalOpts, text: &str) -> CliResult {
    match &global.output {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn vacuum_tol(global: &GlobalOpts) -> CliResult<f64> {
    match global.tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(CliError::Usage(format!("--tol {t} must be > 0"))),
        Some(t) => Ok(t),
        None => Ok(STRUCTURAL_TOL),
    }
}

fn validation(err: impl std::fmt::Display) -> CliError {
    CliError::Validation(err.to_string())
}

/// `(|1⟩ + … + |d⟩)/√d`.
fn uniform_psi(dim: usize) -> ComplexMatrix {
    let amp = Complex64::new(1.0 / ((dim - 1) as f64).sqrt(), 0.0);
    let mut v = vec![amp; dim];
    v[0] = Complex64::new(0.0, 0.0);
    ComplexMatrix::column(&v)
}

fn psi_from(args: &PsiArgs, dim: usize) -> CliResult<ComplexMatrix> {
    let amplitudes = match (&args.psi, &args.psi_file) {
        (Some(text), _) => parse_complex_vector(text).map_err(CliError::Usage)?,
        (None, Some(path)) => read_json::<Vec<[f64; 2]>>(path, "state")?
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect(),
        (None, None) => return Ok(uniform_psi(dim)),
    };
    let psi = ComplexMatrix::column(&amplitudes);
    channel::validate_psi_perp(&psi, dim).map_err(validation)?;
    Ok(psi)
}

fn load_channel(path: &Path, tol: f64) -> CliResult<KrausChannel> {
    let ch: KrausChannel = read_json(path, "channel")?;
    let deviation = ch.vacuum_deviation();
    if deviation > tol {
        return Err(CliError::Validation(
            ChannelError::NotVacuumPreserving { deviation }.to_string(),
        ));
    }
    Ok(ch)
}

pub fn lpc(global: &GlobalOpts, args: &LpcArgs) -> CliResult {
    let tol = vacuum_tol(global)?;
    let ch = load_channel(&args.channel, tol)?;
    let psi = psi_from(&args.psi, ch.dim())?;
    let report = lpc_with_tol(&ch, &psi, tol).map_err(validation)?;
    emit(global, &to_json(&report))
}

#[derive(Debug, Serialize)]
struct InequalitySummary {
    channels: u64,
    states_per_channel: u64,
    dim: u64,
    anc: u64,
    seed: u64,
    min_slack: f64,
    zero_loss_cases: u64,
    min_creation_at_zero_loss: Option<f64>,
    max_creation_at_zero_loss: Option<f64>,
    violations: u64,
    passed: bool,
}

pub fn verify_inequality(global: &GlobalOpts, args: &VerifyArgs) -> CliResult {
    let tol = vacuum_tol(global)?;
    let (d, anc) = (args.dim as usize, args.anc as usize);
    let mut rng = seeded_rng(global.seed);
    let mut summary = InequalitySummary {
        channels: args.count,
        states_per_channel: args.states,
        dim: args.dim,
        anc: args.anc,
        seed: global.seed,
        min_slack: f64::INFINITY,
        zero_loss_cases: 0,
        min_creation_at_zero_loss: None,
        max_creation_at_zero_loss: None,
        violations: 0,
        passed: true,
    };
    for _ in 0..args.count {
        let ch = random_vacuum_preserving_channel_with(&mut rng, d, anc);
        for _ in 0..args.states {
            let psi = random_psi_perp(&mut rng, d);
            let r: LpcReport = lpc_with_tol(&ch, &psi, tol).map_err(|e| CliError::Physics(e.to_string()))?;
            summary.min_slack = summary.min_slack.min(r.inequality_slack);
            let mut violated = r.inequality_slack < -INEQUALITY_TOL;
            if r.loss <= ZERO_LOSS_TOL {
                summary.zero_loss_cases += 1;
                let c = r.creation;
                summary.min_creation_at_zero_loss = Some(summary.min_creation_at_zero_loss.map_or(c, |m| m.min(c)));
                summary.max_creation_at_zero_loss = Some(summary.max_creation_at_zero_loss.map_or(c, |m| m.max(c)));
                violated |= c > ZERO_LOSS_CREATION_TOL;
            }
            if violated {
                summary.violations += 1;
            }
        }
    }
    summary.passed = summary.violations == 0;
    emit(global, &to_json(&summary))?;
    if summary.passed {
        Ok(())
    } else {
        Err(CliError::Physics(format!(
            "{} of {} cases violate the exclusion inequality",
            summary.violations,
            args.count * args.states
        )))
    }
}

#[derive(Debug, Serialize)]
struct LinoptReport {
    vacuum_test: VacuumTest,
    channel: KrausChannel,
    lpc: LpcReport,
}

pub fn linopt(global: &GlobalOpts, args: &LinoptArgs) -> CliResult {
    let mu: ModeUnitary = read_json(&args.smatrix, "mode unitary")?;
    let eta = if args.ancilla == "vacuum" {
        AncillaState::vacuum(mu.ancilla_modes())
    } else {
        read_json(Path::new(&args.ancilla), "ancilla state")?
    };
    let test = vacuum_preservation_test(&mu, &eta).map_err(validation)?;
    if !test.passed {
        return Err(CliError::VacuumTest(format!(
            "vacuum preservation test failed; offending ancilla modes {:?}",
            test.offending_modes
        )));
    }
    let ch = induced_channel(&mu, &eta).map_err(validation)?;
    let psi = uniform_psi(ch.dim());
    let lpc = lpc_with_tol(&ch, &psi, vacuum_tol(global)?).map_err(validation)?;
    if let Some(path) = &args.emit_channel {
        write_file(path, to_json(&ch).as_bytes())?;
    }
    emit(
        global,
        &to_json(&LinoptReport {
            vacuum_test: test,
            channel: ch,
            lpc,
        }),
    )
}

pub fn mz(global: &GlobalOpts, args: &MzArgs) -> CliResult {
    let tol = vacuum_tol(global)?;
    let ch = load_channel(&args.channel, tol)?;
    let psi = psi_from(&args.psi, ch.dim())?;
    let opts = VisibilityScan {
        n_unitaries: args.scan_unitaries as usize,
        n_chi: args.chi_points as usize,
        seed: global.seed,
        include_analytic: true,
    };
    let scan = max_visibility_scan(&ch, &psi, &opts).map_err(validation)?;
    let loss = lpc_with_tol(&ch, &psi, tol).map_err(validation)?.loss;
    let expected_offset = 0.5 - loss / 4.0;
    if (scan.fit.offset - expected_offset).abs() > 1e-9 {
        return Err(CliError::Physics(format!(
            "fringe offset {} differs from 1/2 - L/4 = {expected_offset}",
            scan.fit.offset
        )));
    }
    if let Some(path) = &args.fringe_csv {
        let samples = channel::fringe(&ch, &psi, &scan.best_unitary, opts.n_chi).map_err(validation)?;
        let mut csv = String::from("chi,p_A\n");
        for (chi, p) in samples {
            writeln!(csv, "{chi:.16e},{p:.16e}").expect("write to string");
        }
        write_file(path, csv.as_bytes())?;
    }
    emit(global, &to_json(&scan.fit))
}

fn sweep_error(err: SpectraError) -> CliError {
    match err {
        SpectraError::Config(_) => CliError::Validation(err.to_string()),
        SpectraError::Point { .. } | SpectraError::Inconsistent { .. } => CliError::Physics(err.to_string()),
        SpectraError::Io(_) => CliError::Io(err.to_string()),
        _ => CliError::Validation(err.to_string()),
    }
}

fn sweep_config(args: &SpectrumArgs) -> CliResult<SweepConfig> {
    let dissipator = args.dissipator.map(|d| match d {
        DissipatorArg::None => Dissipator::None,
        DissipatorArg::Relaxation => Dissipator::Relaxation,
        DissipatorArg::Dephasing => Dissipator::Dephasing,
    });
    let mut cfg = match (&args.config, args.model) {
        (Some(path), _) => read_json::<SweepConfig>(path, "sweep configuration")?,
        (None, ModelKind::Jc) => SweepConfig::jc_reference(Dissipator::None),
        (None, ModelKind::ThreeLevel) => SweepConfig::three_level_reference(false),
    };
    match (&mut cfg.model, args.model) {
        (Model::Jc(m), ModelKind::Jc) => {
            if let Some(d) = dissipator {
                m.dissipator = d;
            }
        }
        (Model::ThreeLevel(_), ModelKind::ThreeLevel) => {
            if dissipator.is_some_and(|d| d != Dissipator::None) {
                return Err(CliError::Validation(
                    "the three-level model has no dissipator".into(),
                ));
            }
        }
        _ => {
            return Err(CliError::Validation(format!(
                "configuration does not describe a {} model",
                match args.model {
                    ModelKind::Jc => "jc",
                    ModelKind::ThreeLevel => "three-level",
                }
            )))
        }
    }
    if args.envelope && cfg.envelope.is_none() {
        cfg.envelope = Some(EnvelopeConfig::default());
    }
    Ok(cfg)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"))
}

pub fn spectrum(global: &GlobalOpts, args: &SpectrumArgs) -> CliResult {
    let cfg = sweep_config(args)?;
    let started = Instant::now();
    let records = run_sweep(&cfg).map_err(sweep_error)?;
    let elapsed = started.elapsed().as_secs_f64();
    let mut csv = Vec::new();
    write_csv_to(&records, &mut csv).map_err(sweep_error)?;
    match &global.output {
        Some(path) => write_file(path, &csv)?,
        None => print!("{}", String::from_utf8(csv).expect("CSV is UTF-8")),
    }
    if !global.quiet {
        let s = SweepSummary::of(&records);
        eprintln!(
            "points={} min_p={:.6e} max_excess_loss={:.6e} max_sigma01={:.6e} min_p_envelope={} max_sigma01_envelope={} wall_time={elapsed:.2}s",
            s.points,
            s.min_p,
            s.max_excess_loss,
            s.max_sigma01_abs,
            fmt_opt(s.min_p_envelope),
            fmt_opt(s.max_sigma01_envelope),
        );
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExtractReport {
    #[serde(flatten)]
    params: LossChannelParams,
    photon_probability: f64,
    excess_coherence_loss: f64,
    sigma01_abs: f64,
    vacuum_deviation: f64,
}

pub fn extract(global: &GlobalOpts, args: &ExtractArgs) -> CliResult {
    let spec: ModelSpec = read_json(&args.config, "model configuration")?;
    let ch = spec.field_channel().map_err(|e| match e {
        DynamicsError::InvalidConfig(_) => CliError::Validation(e.to_string()),
        _ => CliError::Physics(e.to_string()),
    })?;
    emit(
        global,
        &to_json(&ExtractReport {
            excess_coherence_loss: ch.excess_coherence_loss(),
            sigma01_abs: ch.params.sigma01().norm(),
            photon_probability: ch.photon_probability,
            vacuum_deviation: ch.vacuum_deviation,
            params: ch.params,
        }),
    )
}
