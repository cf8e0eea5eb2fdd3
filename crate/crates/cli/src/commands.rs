use std::path::{Path, PathBuf};

use xyjoint::analysis::{
    classicality_statistic, collapse_pair_counts, collapse_pair_probs, csquared_from_patterns, estimate_vx,
    estimate_vy, vsquared_from_patterns, CorrelationEstimate, PatternStats, VisibilityEstimate, CLASSICAL_SIGMA,
};
use xyjoint::kd::{kd_from_state, reconstruct_kd, reconstruct_kd_from_counts, KDDistribution};
use xyjoint::povm::{build_povm, exact_pattern_probs, outcome_at, outcome_probs, JointPovm, ProbTable4, VisibilityTriple};
use xyjoint::qubit::{
    complex, density, eigenstate, maximally_mixed, min_eigenvalue_hermitian, Axis, OperatorMatrix, Sign,
};
use xyjoint::sim::{pair_probs_for, run_eigenstate_experiment, run_pair_experiment, with_threads, ExperimentConfig, OutcomeCounts4, PairCounts16};
use xyjoint::Complex64;

use crate::args::{
    BuildPovmArgs, EstimateArgs, FaultArg, ModeArg, ReconstructArgs, SimulateArgs, StateArg, VerifyArgs,
    VisibilityArgs,
};
use crate::bundle::{cell_label, manifest_path, manifest_ref, read_text, write_text, CountsFile, Mode, RunConfig, RunManifest};
use crate::checks::{self, CheckOutcome, PovmBuilder};
use crate::error::{CliError, CliResult};
use crate::format::{Document, Parsed, KD_SCHEMA, POVM_SCHEMA, REPORT_SCHEMA, VERIFY_SCHEMA};

/// Pair patterns agreeing with the squared eigenstate estimates within this many σ.
pub const CROSSCHECK_SIGMA: f64 = 5.0;

const PATTERN_LABELS: [&str; 4] = ["(0,0)", "(0,1)", "(1,0)", "(1,1)"];

fn triple(v: &VisibilityArgs) -> CliResult<VisibilityTriple> {
    Ok(VisibilityTriple::new(v.vx, v.vy, v.vz)?)
}

/// Writes `text` to `out` with its manifest, or to standard output.
fn emit(out: Option<&Path>, text: &str, mut manifest: RunManifest) -> CliResult<()> {
    match out {
        Some(path) => {
            manifest.outputs = vec![path.display().to_string()];
            write_text(path, text)?;
            write_text(&manifest_path(path), &manifest.to_text())?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn manifest_line(doc: &mut Document, out: Option<&Path>) {
    if let Some(path) = out {
        doc.str("manifest", &manifest_ref(path));
    }
}

fn write_matrix(doc: &mut Document, m: &OperatorMatrix) {
    let re: Vec<f64> = m.entries().iter().map(|z| z.re).collect();
    let im: Vec<f64> = m.entries().iter().map(|z| z.im).collect();
    doc.floats("re", &re);
    doc.floats("im", &im);
}

pub fn povm_text(povm: &JointPovm, out: Option<&Path>) -> CliResult<String> {
    let v = povm.visibilities();
    let mut doc = Document::new(POVM_SCHEMA);
    manifest_line(&mut doc, out);
    doc.section("visibilities");
    doc.float("vx", v.vx());
    doc.float("vy", v.vy());
    doc.float("vz", v.vz());
    doc.float("norm", v.norm_squared().sqrt());
    for (k, m) in povm.elements().iter().enumerate() {
        let (x, y) = outcome_at(k);
        doc.array_section("element");
        doc.str("x", &x.to_string());
        doc.str("y", &y.to_string());
        write_matrix(&mut doc, m);
        doc.float("min_eigenvalue", min_eigenvalue_hermitian(m)?);
    }
    Ok(doc.finish())
}

pub fn cmd_build_povm(args: &BuildPovmArgs) -> CliResult<()> {
    let povm = build_povm(triple(&args.visibilities)?);
    let text = povm_text(&povm, args.out.as_deref())?;
    emit(args.out.as_deref(), &text, RunManifest::new("build-povm"))
}

/// Validates the flag combination and returns the run configuration.
pub fn simulate_config(args: &SimulateArgs) -> CliResult<RunConfig> {
    let v = triple(&args.visibilities)?;
    let mut experiment = ExperimentConfig::new(v, args.shots, args.seed).with_flips(args.randomize_flips);
    let (mode, input) = match args.mode {
        ModeArg::Eigenstate => {
            if args.werner_p.is_some() {
                return Err(CliError::Usage("--werner-p applies to pair mode only".into()));
            }
            let axis = args.axis.ok_or_else(|| CliError::Usage("eigenstate mode needs --axis X or --axis Y".into()))?;
            if axis == Axis::Z {
                return Err(CliError::Usage("eigenstate mode accepts --axis X or Y, not Z".into()));
            }
            (Mode::Eigenstate, Some((axis, args.value.unwrap_or(Sign::Plus))))
        }
        ModeArg::Pair => {
            if args.axis.is_some() || args.value.is_some() {
                return Err(CliError::Usage("--axis and --value apply to eigenstate mode only".into()));
            }
            if args.randomize_flips {
                return Err(CliError::Usage("--randomize-flips applies to eigenstate mode only".into()));
            }
            experiment = experiment.with_werner(args.werner_p.unwrap_or(1.0));
            (Mode::Pair, None)
        }
    };
    experiment
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(RunConfig { mode, input, experiment })
}

/// Samples the configured run.
pub fn simulate_counts(config: &RunConfig) -> CliResult<Vec<u64>> {
    Ok(match config.input {
        Some((axis, value)) => run_eigenstate_experiment(&config.experiment, axis, value)?.counts.to_vec(),
        None => run_pair_experiment(&config.experiment)?.counts.to_vec(),
    })
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let config = simulate_config(args)?;
    let counts = match args.threads {
        Some(n) => with_threads(n as usize, || simulate_counts(&config))??,
        None => simulate_counts(&config)?,
    };
    let file = CountsFile { config: config.clone(), manifest: manifest_ref(&args.out), counts };
    let mut manifest = RunManifest::new("simulate");
    manifest.threads = Some(args.threads.map(|n| n as usize).unwrap_or_else(default_threads));
    manifest.config = Some(config);
    emit(Some(&args.out), &file.to_text(), manifest)
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Counts of `c` relabelled as if the input eigenvalue had been `+1`.
fn to_plus_frame(c: &OutcomeCounts4) -> [u64; 4] {
    let mask = match (c.input_axis, c.input_value) {
        (_, Sign::Plus) => 0,
        (Axis::X, Sign::Minus) => 0b10,
        (_, Sign::Minus) => 0b01,
    };
    let mut out = [0u64; 4];
    for (k, &n) in c.counts.iter().enumerate() {
        out[k ^ mask] += n;
    }
    out
}

fn pool_eigenstate(runs: &[OutcomeCounts4], axis: Axis) -> Option<OutcomeCounts4> {
    if runs.is_empty() {
        return None;
    }
    let mut total = [0u64; 4];
    for r in runs {
        for (t, n) in total.iter_mut().zip(to_plus_frame(r)) {
            *t += n;
        }
    }
    Some(OutcomeCounts4::new(total, axis, Sign::Plus))
}

/// Cross-check of a pair-run `V²` against a squared eigenstate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub delta: f64,
    pub sigma: f64,
}

impl CrossCheck {
    pub fn new(squared: &VisibilityEstimate, single: &VisibilityEstimate) -> Self {
        let linear = 2.0 * single.value.abs() * single.stderr;
        CrossCheck {
            delta: squared.value - single.value * single.value,
            sigma: (squared.stderr.powi(2) + linear.powi(2)).sqrt(),
        }
    }

    pub fn consistent(&self) -> bool {
        self.delta.abs() <= CROSSCHECK_SIGMA * self.sigma
    }
}

/// Everything `estimate` derives from a set of counts files.
#[derive(Debug, Clone)]
pub struct Estimates {
    pub inputs: Vec<String>,
    pub missing: Vec<String>,
    pub vx: Option<(VisibilityEstimate, u64)>,
    pub vy: Option<(VisibilityEstimate, u64)>,
    pub patterns: Option<PatternStats>,
    pub werner_p: Option<f64>,
    pub correlation: Option<CorrelationEstimate>,
    pub exact: Option<(VisibilityTriple, Option<PatternStats>)>,
}

pub fn estimate_from(files: &[(String, CountsFile)], full: bool, werner_correct: bool) -> CliResult<Estimates> {
    let mut x_runs = Vec::new();
    let mut y_runs = Vec::new();
    let mut pair_runs: Vec<(PairCounts16, f64)> = Vec::new();
    for (_, f) in files {
        if let Some(c) = f.eigenstate_counts() {
            match c.input_axis {
                Axis::X => x_runs.push(c),
                _ => y_runs.push(c),
            }
        } else if let Some(c) = f.pair_counts() {
            pair_runs.push((c, f.config.experiment.werner_p));
        }
    }
    let mut missing = Vec::new();
    if x_runs.is_empty() {
        missing.push("X-eigenstate run".to_owned());
    }
    if y_runs.is_empty() {
        missing.push("Y-eigenstate run".to_owned());
    }
    if pair_runs.is_empty() {
        missing.push("pair run".to_owned());
    }
    if files.is_empty() || (full && !missing.is_empty()) {
        return Err(CliError::Missing(missing));
    }

    let vx = pool_eigenstate(&x_runs, Axis::X).map(|c| estimate_vx(&c).map(|e| (e, c.total))).transpose()?;
    let vy = pool_eigenstate(&y_runs, Axis::Y).map(|c| estimate_vy(&c).map(|e| (e, c.total))).transpose()?;

    let werner_p = match pair_runs.first() {
        Some(&(_, p)) if pair_runs.iter().all(|&(_, q)| q == p) => Some(p),
        Some(_) => None,
        None => None,
    };
    let patterns = if pair_runs.is_empty() {
        None
    } else {
        let mut total = [0u64; 16];
        for (c, _) in &pair_runs {
            for (t, n) in total.iter_mut().zip(c.counts) {
                *t += n;
            }
        }
        let stats = collapse_pair_counts(&PairCounts16::new(total))?;
        Some(if werner_correct {
            let p = werner_p.ok_or_else(|| {
                CliError::Usage("--werner-correct needs pair runs with a common werner_p".into())
            })?;
            stats.werner_corrected(p)?
        } else {
            stats
        })
    };
    let correlation = patterns.as_ref().map(csquared_from_patterns);

    let first = files.first().map(|(_, f)| f.config.experiment.visibilities);
    let exact = first
        .filter(|v| files.iter().all(|(_, f)| f.config.experiment.visibilities == *v))
        .map(|v| {
            let pats = match (werner_correct, werner_p) {
                (_, None) => None,
                (true, Some(_)) => Some(exact_pattern_probs(v)),
                (false, Some(p)) => {
                    let cfg = ExperimentConfig::new(v, 1, 0).with_werner(p);
                    pair_probs_for(&cfg).and_then(|t| collapse_pair_probs(&t)).ok()
                }
            };
            (v, if pair_runs.is_empty() { None } else { pats })
        });

    Ok(Estimates {
        inputs: files.iter().map(|(name, _)| name.clone()).collect(),
        missing,
        vx,
        vy,
        patterns,
        werner_p: if werner_correct { werner_p } else { None },
        correlation,
        exact,
    })
}

fn verdict(c: &CorrelationEstimate) -> &'static str {
    if c.classical {
        "consistent-with-classical"
    } else {
        "non-classical"
    }
}

pub fn report_text(est: &Estimates, out: Option<&Path>) -> String {
    let mut doc = Document::new(REPORT_SCHEMA);
    manifest_line(&mut doc, out);
    doc.strs("inputs", &est.inputs);
    doc.strs("missing", &est.missing);
    for (name, e) in [("vx", &est.vx), ("vy", &est.vy)] {
        if let Some((e, shots)) = e {
            doc.section(name);
            doc.float("value", e.value);
            doc.float("stderr", e.stderr);
            doc.int("shots", *shots);
        }
    }
    if let (Some(stats), Some(c)) = (&est.patterns, &est.correlation) {
        doc.section("patterns");
        doc.strs("cells", &PATTERN_LABELS);
        doc.floats("e", stats.e());
        doc.floats("stderr", stats.stderr());
        doc.int("shots", stats.total_shots());
        doc.bool("werner_corrected", est.werner_p.is_some());
        if let Some(p) = est.werner_p {
            doc.float("werner_p", p);
        }

        let (vx2, vy2) = vsquared_from_patterns(stats);
        doc.section("vsquared");
        doc.float("vx2", vx2.value);
        doc.float("vx2_stderr", vx2.stderr);
        doc.float("vy2", vy2.value);
        doc.float("vy2_stderr", vy2.stderr);

        doc.section("correlation");
        doc.float("c_squared", c.c_squared);
        doc.float("stderr", c.stderr);
        doc.float("vz_magnitude", c.vz_magnitude);
        doc.float("s", classicality_statistic(stats));
        doc.float("s_stderr", c.stderr / 4.0);
        doc.float("sigma_level", CLASSICAL_SIGMA);
        doc.bool("classical", c.classical);
        doc.str("verdict", verdict(c));

        let checks: Vec<(&str, CrossCheck)> = [("vx2", &est.vx, &vx2), ("vy2", &est.vy, &vy2)]
            .into_iter()
            .filter_map(|(name, single, sq)| single.as_ref().map(|(s, _)| (name, CrossCheck::new(sq, s))))
            .collect();
        if !checks.is_empty() {
            doc.section("crosscheck");
            doc.float("sigma_level", CROSSCHECK_SIGMA);
            for (name, cc) in checks {
                doc.float(&format!("{name}_delta"), cc.delta);
                doc.float(&format!("{name}_sigma"), cc.sigma);
                doc.bool(&format!("{name}_consistent"), cc.consistent());
            }
        }
    }
    if let Some((v, pats)) = &est.exact {
        doc.section("exact");
        doc.float("vx", v.vx());
        doc.float("vy", v.vy());
        doc.float("vz", v.vz());
        doc.float("c_squared", -v.vz() * v.vz());
        doc.float("s", v.vz() * v.vz() / 4.0);
        if let Some(p) = pats {
            doc.floats("e", p.e());
        }
    }
    doc.finish()
}

pub fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let mut files = Vec::new();
    for path in &args.counts {
        files.push((path.display().to_string(), CountsFile::load(path)?));
    }
    let est = estimate_from(&files, args.full, args.werner_correct)?;
    if !est.missing.is_empty() {
        eprintln!("absent: {}", est.missing.join(", "));
    }
    if let Some((e, _)) = &est.vx {
        eprintln!("Vx = {:.5} ± {:.5}", e.value, e.stderr);
    }
    if let Some((e, _)) = &est.vy {
        eprintln!("Vy = {:.5} ± {:.5}", e.value, e.stderr);
    }
    if let Some(c) = &est.correlation {
        eprintln!("C² = {:.5} ± {:.5}: {}", c.c_squared, c.stderr, verdict(c));
    }
    let mut manifest = RunManifest::new("estimate");
    manifest.inputs = est.inputs.clone();
    emit(args.out.as_deref(), &report_text(&est, args.out.as_deref()), manifest)
}

/// `(vx, vy, |vz|)` recorded in an estimate report.
pub fn visibilities_from_report(text: &str, origin: &str) -> CliResult<(Option<f64>, Option<f64>, Option<f64>)> {
    let parsed = Parsed::parse(text, REPORT_SCHEMA, origin)?;
    let value = |section: &str, key: &str| -> CliResult<Option<f64>> {
        if parsed.has(section) {
            Ok(Some(parsed.section(section)?.f64(key)?))
        } else {
            Ok(None)
        }
    };
    Ok((value("vx", "value")?, value("vy", "value")?, value("correlation", "vz_magnitude")?))
}

pub fn state_density(state: StateArg) -> OperatorMatrix {
    let eig = |axis, value| density(&eigenstate(axis, value));
    match state {
        StateArg::XPlus => eig(Axis::X, Sign::Plus),
        StateArg::XMinus => eig(Axis::X, Sign::Minus),
        StateArg::YPlus => eig(Axis::Y, Sign::Plus),
        StateArg::YMinus => eig(Axis::Y, Sign::Minus),
        StateArg::ZPlus => eig(Axis::Z, Sign::Plus),
        StateArg::ZMinus => eig(Axis::Z, Sign::Minus),
        StateArg::Mixed => maximally_mixed(2).expect("dimension 2"),
    }
}

fn state_name(state: StateArg) -> &'static str {
    match state {
        StateArg::XPlus => "X+",
        StateArg::XMinus => "X-",
        StateArg::YPlus => "Y+",
        StateArg::YMinus => "Y-",
        StateArg::ZPlus => "Z+",
        StateArg::ZMinus => "Z-",
        StateArg::Mixed => "mixed",
    }
}

/// A reconstructed KD table with its provenance.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub source: &'static str,
    pub input: String,
    pub state: Option<(String, OperatorMatrix)>,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub probs: ProbTable4,
    pub kd: KDDistribution,
    pub stderr: Option<[Complex64; 4]>,
}

impl Reconstruction {
    pub fn correlation(&self) -> Complex64 {
        Complex64::new(0.0, -self.vz)
    }

    pub fn reference(&self) -> CliResult<Option<KDDistribution>> {
        self.state.as_ref().map(|(_, rho)| kd_from_state(rho)).transpose().map_err(Into::into)
    }
}

pub fn reconstruct(args: &ReconstructArgs) -> CliResult<Reconstruction> {
    let counts_file = args.counts.as_deref().map(CountsFile::load).transpose()?;
    let report = match &args.report {
        Some(path) => visibilities_from_report(&read_text(path)?, &path.display().to_string())?,
        None => (None, None, None),
    };
    let configured = counts_file.as_ref().map(|f| f.config.experiment.visibilities);
    let pick = |flag: Option<f64>, from_report: Option<f64>, from_config: Option<f64>, name: &str| {
        flag.or(from_report)
            .or(if args.report.is_none() { from_config } else { None })
            .ok_or_else(|| CliError::Usage(format!("no value for {name}: pass --{name} or --report")))
    };
    let vx = pick(args.vx, report.0, configured.map(|v| v.vx()), "vx")?;
    let vy = pick(args.vy, report.1, configured.map(|v| v.vy()), "vy")?;
    let vz = pick(args.vz, report.2, configured.map(|v| v.vz()), "vz")?;
    complex(vx, vy)?;
    complex(vz, 0.0)?;
    let c = Complex64::new(0.0, -vz);
    let rename = |e: xyjoint::Error| match e {
        xyjoint::Error::Singular { parameter: "c", .. } => xyjoint::Error::Singular { parameter: "vz", value: vz },
        other => other,
    };

    match (counts_file, args.exact_state) {
        (Some(file), _) => {
            let path = args.counts.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
            let counts = file
                .eigenstate_counts()
                .ok_or_else(|| CliError::Usage(format!("{path} is a pair run; reconstruct needs a single-qubit run")))?;
            let (kd, stderr) = reconstruct_kd_from_counts(&counts.counts, vx, vy, c).map_err(rename)?;
            let name = format!("{}{}", counts.input_axis, if counts.input_value == Sign::Plus { "+" } else { "-" });
            Ok(Reconstruction {
                source: "counts",
                input: path,
                state: Some((name, density(&eigenstate(counts.input_axis, counts.input_value)))),
                vx,
                vy,
                vz,
                probs: ProbTable4::from_counts(&counts.counts)?,
                kd,
                stderr: Some(stderr),
            })
        }
        (None, Some(state)) => {
            let rho = state_density(state);
            let probs = outcome_probs(&build_povm(VisibilityTriple::new(vx, vy, vz)?), &rho)?;
            let kd = reconstruct_kd(&probs, vx, vy, c).map_err(rename)?;
            Ok(Reconstruction {
                source: "exact",
                input: state_name(state).to_owned(),
                state: Some((state_name(state).to_owned(), rho)),
                vx,
                vy,
                vz,
                probs,
                kd,
                stderr: None,
            })
        }
        (None, None) => Err(CliError::Usage("pass --counts or --exact-state".into())),
    }
}

pub fn kd_text(r: &Reconstruction, out: Option<&Path>) -> CliResult<String> {
    let mut doc = Document::new(KD_SCHEMA);
    manifest_line(&mut doc, out);
    doc.str("source", r.source);
    doc.str("input", &r.input);
    if let Some((name, _)) = &r.state {
        doc.str("state", name);
    }

    doc.section("visibilities");
    doc.float("vx", r.vx);
    doc.float("vy", r.vy);
    doc.float("vz", r.vz);
    doc.float("c_re", r.correlation().re);
    doc.float("c_im", r.correlation().im);

    let cells: Vec<String> = (0..4).map(cell_label).collect();
    doc.section("probabilities");
    doc.strs("cells", &cells);
    doc.floats("p", r.probs.as_array());

    let entries = r.kd.entries();
    doc.section("kd");
    doc.strs("cells", &cells);
    doc.floats("re", &entries.map(|z| z.re));
    doc.floats("im", &entries.map(|z| z.im));
    if let Some(err) = &r.stderr {
        doc.floats("re_stderr", &err.map(|z| z.re));
        doc.floats("im_stderr", &err.map(|z| z.im));
    }

    let xs = Sign::BOTH.map(|s| r.kd.x_marginal(s));
    let ys = Sign::BOTH.map(|s| r.kd.y_marginal(s));
    doc.section("marginals");
    doc.strs("values", &["+1", "-1"]);
    doc.floats("x_re", &xs.map(|z| z.re));
    doc.floats("x_im", &xs.map(|z| z.im));
    doc.floats("y_re", &ys.map(|z| z.re));
    doc.floats("y_im", &ys.map(|z| z.im));

    if let Some(reference) = r.reference()? {
        let d: Vec<Complex64> = entries.iter().zip(reference.entries()).map(|(a, b)| a - b).collect();
        doc.section("deviation");
        doc.floats("re", &d.iter().map(|z| z.re).collect::<Vec<_>>());
        doc.floats("im", &d.iter().map(|z| z.im).collect::<Vec<_>>());
        doc.float("max_abs", r.kd.max_abs_diff(&reference));
    }
    Ok(doc.finish())
}

pub fn cmd_reconstruct(args: &ReconstructArgs) -> CliResult<()> {
    let r = reconstruct(args)?;
    for (k, z) in r.kd.entries().iter().enumerate() {
        eprintln!("rho{} = {:+.6} {:+.6}i", cell_label(k), z.re, z.im);
    }
    let mut manifest = RunManifest::new("reconstruct");
    manifest.inputs = [args.counts.as_ref(), args.report.as_ref()]
        .into_iter()
        .flatten()
        .map(|p: &PathBuf| p.display().to_string())
        .collect();
    emit(args.out.as_deref(), &kd_text(&r, args.out.as_deref())?, manifest)
}

pub fn builder_for(fault: Option<FaultArg>) -> PovmBuilder {
    match fault {
        None => checks::standard_builder,
        Some(FaultArg::YSign) => checks::y_sign_fault,
        Some(FaultArg::ElementSign) => checks::element_sign_fault,
    }
}

pub fn verify_text(results: &[CheckOutcome], grid: usize, seed: u64, out: Option<&Path>) -> String {
    let mut doc = Document::new(VERIFY_SCHEMA);
    manifest_line(&mut doc, out);
    doc.int("grid", grid as u64);
    doc.int("seed", seed);
    doc.bool("passed", results.iter().all(CheckOutcome::passed));
    for r in results {
        doc.array_section("check");
        doc.str("name", &r.name);
        doc.bool("passed", r.passed());
        doc.float("deviation", r.deviation);
        doc.float("tolerance", r.tolerance);
        doc.int("cases", r.cases as u64);
        if let Some(e) = &r.error {
            doc.str("error", e);
        }
    }
    doc.finish()
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let results = checks::run_all(builder_for(args.inject_fault), args.grid, args.seed);
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let note = r.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
        println!("{status} {:<28} deviation {:.3e} tolerance {:.1e} cases {}{note}", r.name, r.deviation, r.tolerance, r.cases);
    }
    if let Some(path) = &args.out {
        let mut manifest = RunManifest::new("verify");
        manifest.outputs = vec![path.display().to_string()];
        write_text(path, &verify_text(&results, args.grid, args.seed, Some(path)))?;
        write_text(&manifest_path(path), &manifest.to_text())?;
    }
    match results.iter().filter(|r| !r.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::Verification(n)),
    }
}
