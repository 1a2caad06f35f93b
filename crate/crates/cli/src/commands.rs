use std::fs;
use std::path::Path;

use lhvlab_core::chsh::{
    chsh_from_lhv, chsh_value, maximize_chsh_with, scan_planar, ChshSearch, ChshSettings, SearchSpace, StatePreset,
};
use lhvlab_core::io::ModelFile;
use lhvlab_core::lhv::{
    eq5_integral, lhv_from_separable, verify_reproduction, witness_noncommutativity_with, LhvModel,
    SeparableDecomposition, UFamilyState,
};
use lhvlab_core::operator::{pauli, scaled_commutator, Axis};
use lhvlab_core::probability::{validate_model_measure_with, ResponseFunction};
use lhvlab_core::random::{random_hermitian, random_two_qubit_decomposition, seeded, SeededRng};
use serde::Serialize;
use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};
use crate::output;

/// How a command ended. `Usage` maps to exit code 2, `Failed` to 1.
#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    Failed { body: String, message: String },
}

pub struct Report {
    pub body: String,
}

pub type Outcome = Result<Report, CommandError>;

fn usage(e: impl ToString) -> CommandError {
    CommandError::Usage(e.to_string())
}

fn render<J: Serialize, C: Serialize>(config: &RunConfig, summary: &J, rows: &[C]) -> Result<String, CommandError> {
    match config.output_format {
        OutputFormat::Json => output::json(summary),
        OutputFormat::Csv => output::csv(rows),
    }
    .map_err(CommandError::Usage)
}

fn finish(body: String, pass: bool, message: impl FnOnce() -> String) -> Outcome {
    if pass {
        Ok(Report { body })
    } else {
        Err(CommandError::Failed {
            body,
            message: message(),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eq5Row {
    pub alpha: f64,
    pub beta: f64,
    pub integral: f64,
    pub abs_error: f64,
}

#[derive(Serialize)]
struct Eq5Summary<'a> {
    alpha_steps: usize,
    tol_repro: f64,
    expected: f64,
    pass: bool,
    first_failure: Option<Eq5Row>,
    rows: &'a [Eq5Row],
}

pub fn cmd_reproduce_eq5(config: &RunConfig) -> Outcome {
    let last = (config.alpha_steps - 1) as f64;
    let mut rows = Vec::with_capacity(config.alpha_steps);
    for i in 0..config.alpha_steps {
        let alpha = i as f64 / last;
        let beta = 1.0 - alpha;
        let integral = eq5_integral(alpha, beta).map_err(usage)?;
        rows.push(Eq5Row {
            alpha,
            beta,
            integral,
            abs_error: (integral - 4.0).abs(),
        });
    }
    let first_failure = rows
        .iter()
        .find(|r| r.abs_error > config.tol_repro || r.abs_error.is_nan())
        .copied();
    let summary = Eq5Summary {
        alpha_steps: config.alpha_steps,
        tol_repro: config.tol_repro,
        expected: 4.0,
        pass: first_failure.is_none(),
        first_failure,
        rows: &rows,
    };
    let body = render(config, &summary, &rows)?;
    finish(body, summary.pass, || {
        let r = first_failure.unwrap();
        format!(
            "first failing row: alpha={} beta={} integral={} abs_error={}",
            r.alpha, r.beta, r.integral, r.abs_error
        )
    })
}

#[derive(Debug, Serialize)]
struct Violation {
    model: usize,
    kind: &'static str,
    detail: Value,
}

#[derive(Debug, Serialize)]
pub struct ModelRow {
    model: usize,
    atoms: usize,
    pairs: usize,
    max_abs_error: f64,
    measure_violations: usize,
    response_violations: usize,
    reproduction_failures: usize,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    source: String,
    seed: u64,
    trials: usize,
    probes_per_model: usize,
    tol_repro: f64,
    models_checked: usize,
    pairs_checked: usize,
    max_abs_error: f64,
    pass: bool,
    violations: &'a [Violation],
    models: &'a [ModelRow],
}

/// Where `verify` gets its models from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionSource {
    Random,
    File(std::path::PathBuf),
}

impl std::str::FromStr for DecompositionSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            Ok(Self::Random)
        } else if s.is_empty() {
            Err("decomposition source must be 'random' or a path".into())
        } else {
            Ok(Self::File(s.into()))
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn check_model(
    index: usize,
    model: &LhvModel,
    pairs: usize,
    rng: &mut SeededRng,
    config: &RunConfig,
    violations: &mut Vec<Violation>,
) -> Result<ModelRow, CommandError> {
    let tol = config.tolerances();
    let measure = validate_model_measure_with(model.measure(), config.tol_measure);
    let responses = model.response_violations(&tol).map_err(usage)?;
    let (d1, d2) = model.site_dims();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..pairs {
        let v1 = random_hermitian(rng, d1).map_err(usage)?;
        let v2 = random_hermitian(rng, d2).map_err(usage)?;
        let r = verify_reproduction(model, &v1, &v2, config.tol_repro).map_err(usage)?;
        let err = (r.lhs - r.rhs).abs();
        worst = worst.max(err);
        if !r.pass {
            failures += 1;
            violations.push(Violation {
                model: index,
                kind: "reproduction",
                detail: serde_json::json!({ "lhs": r.lhs, "rhs": r.rhs, "abs_error": err }),
            });
        }
    }
    for m in &measure {
        violations.push(Violation {
            model: index,
            kind: "measure",
            detail: to_value(m),
        });
    }
    for r in &responses {
        violations.push(Violation {
            model: index,
            kind: "response",
            detail: to_value(r),
        });
    }
    Ok(ModelRow {
        model: index,
        atoms: model.space().len(),
        pairs,
        max_abs_error: worst,
        measure_violations: measure.len(),
        response_violations: responses.len(),
        reproduction_failures: failures,
    })
}

/// Random source: `trials` models, `probes` pairs each.
/// File source: the single model in the file, `trials * probes` pairs.
pub fn cmd_verify(config: &RunConfig, source: &DecompositionSource, trials: usize, probes: usize) -> Outcome {
    if trials < 1 {
        return Err(usage("--trials must be at least 1"));
    }
    if probes < 1 {
        return Err(usage("--probes must be at least 1"));
    }
    let mut rng = seeded(config.rng_seed);
    let mut violations = Vec::new();
    let mut models = Vec::new();
    let source_name = match source {
        DecompositionSource::Random => {
            for index in 0..trials {
                let decomp = random_two_qubit_decomposition(&mut rng).map_err(usage)?;
                let model = lhv_from_separable(&decomp).map_err(usage)?;
                models.push(check_model(index, &model, probes, &mut rng, config, &mut violations)?);
            }
            "random".to_string()
        }
        DecompositionSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let file = ModelFile::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let measure = file.measure_violations(config.tol_measure).map_err(usage)?;
            if measure.is_empty() {
                match file.to_model(&config.tolerances()) {
                    Ok(model) => {
                        let pairs = trials.saturating_mul(probes);
                        models.push(check_model(0, &model, pairs, &mut rng, config, &mut violations)?);
                    }
                    Err(e) => violations.push(Violation {
                        model: 0,
                        kind: "model",
                        detail: Value::String(e.to_string()),
                    }),
                }
            } else {
                for m in &measure {
                    violations.push(Violation {
                        model: 0,
                        kind: "measure",
                        detail: to_value(m),
                    });
                }
            }
            path.display().to_string()
        }
    };
    let summary = VerifySummary {
        source: source_name,
        seed: config.rng_seed,
        trials,
        probes_per_model: probes,
        tol_repro: config.tol_repro,
        models_checked: models.len(),
        pairs_checked: models.iter().map(|m| m.pairs).sum(),
        max_abs_error: models.iter().map(|m| m.max_abs_error).fold(0.0, f64::max),
        pass: violations.is_empty(),
        violations: &violations,
        models: &models,
    };
    let body = render(config, &summary, &models)?;
    finish(body, summary.pass, || {
        let first = &violations[0];
        format!(
            "{} violation(s); first: model {} {} {}",
            violations.len(),
            first.model,
            first.kind,
            first.detail
        )
    })
}

#[derive(Debug, Serialize)]
pub struct AtomRow {
    atom: String,
    weight: f64,
    f1: f64,
    f2: f64,
    in_event: bool,
}

#[derive(Serialize)]
struct WitnessSummary<'a> {
    alpha: f64,
    beta: f64,
    site1_operators: [String; 2],
    site2_operators: [String; 2],
    event: Vec<&'a str>,
    measure: f64,
    commutators_nonnull: bool,
    commutator_norms: [f64; 2],
    null_commutator_case: bool,
    pass: bool,
    atoms: &'a [AtomRow],
}

/// Witness event of the `U(alpha, 1 - alpha)` model for `(a1, b1)` at site 1 and
/// `(a2, b2)` at site 2. Null commutators are reported, not failed, as long as
/// the event measure is then zero.
pub fn cmd_witness(config: &RunConfig, alpha: f64, site1: (Axis, Axis), site2: (Axis, Axis)) -> Outcome {
    let u = UFamilyState::from_alpha(alpha).map_err(usage)?;
    let model = lhv_from_separable(&SeparableDecomposition::u_family(u).map_err(usage)?).map_err(usage)?;
    let (a1, b1) = (pauli(site1.0), pauli(site1.1));
    let (a2, b2) = (pauli(site2.0), pauli(site2.1));
    let w = witness_noncommutativity_with(&model, &a1, &b1, &a2, &b2, config.tol_null).map_err(usage)?;
    let c1 = scaled_commutator(&a1, &b1).map_err(usage)?;
    let c2 = scaled_commutator(&a2, &b2).map_err(usage)?;
    let atoms = (0..model.space().len())
        .map(|i| {
            Ok(AtomRow {
                atom: model.space().atoms()[i].clone(),
                weight: model.measure().weight(i),
                f1: model.f1().evaluate(&c1, i)?,
                f2: model.f2().evaluate(&c2, i)?,
                in_event: w.event.contains(i),
            })
        })
        .collect::<lhvlab_core::Result<Vec<_>>>()
        .map_err(usage)?;
    let null_case = !w.commutators_nonnull;
    let pass = if null_case { w.measure == 0.0 } else { w.measure > 0.0 };
    let summary = WitnessSummary {
        alpha: u.alpha,
        beta: u.beta,
        site1_operators: [site1.0.to_string(), site1.1.to_string()],
        site2_operators: [site2.0.to_string(), site2.1.to_string()],
        event: w.event.labels(),
        measure: w.measure,
        commutators_nonnull: w.commutators_nonnull,
        commutator_norms: w.commutator_norms,
        null_commutator_case: null_case,
        pass,
        atoms: &atoms,
    };
    let body = render(config, &summary, &atoms)?;
    finish(body, pass, || {
        let dump = ModelFile::from_model(&model)
            .to_json_pretty()
            .unwrap_or_else(|e| format!("<model export failed: {e}>"));
        format!("witness event has measure {}; model:\n{dump}", w.measure)
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
struct LhvCheck {
    chsh_lhv: f64,
    chsh_state: f64,
    abs_diff: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ChshSummary {
    state: String,
    separable: bool,
    search_space: SearchSpace,
    grid_steps: usize,
    refine_iters: usize,
    value: f64,
    angles: Vec<f64>,
    settings: ChshSettings,
    classical_bound: f64,
    quantum_bound: f64,
    exceeds_classical_bound: bool,
    lhv_check: Option<LhvCheck>,
    pass: bool,
}

/// Maximizes CHSH for a preset state. For states with a known separable
/// decomposition, the LHV model value at the optimum must equal the state
/// value and stay within the classical bound.
pub fn cmd_chsh(
    config: &RunConfig,
    state: StatePreset,
    grid_steps: usize,
    refine_iters: usize,
    full_sphere: bool,
    scan_path: Option<&Path>,
) -> Outcome {
    if grid_steps < 4 {
        return Err(usage(format!("--grid-steps must be at least 4, got {grid_steps}")));
    }
    let rho = state.density().map_err(usage)?;
    let search = ChshSearch {
        grid_steps,
        refine_iters,
        space: if full_sphere {
            SearchSpace::FullSphere
        } else {
            SearchSpace::Planar
        },
    };
    let opt = maximize_chsh_with(&rho, &search).map_err(usage)?;
    let decomposition = state.decomposition().map_err(usage)?;
    let lhv_check = match &decomposition {
        Some(d) => {
            let model = lhv_from_separable(d).map_err(usage)?;
            let chsh_lhv = chsh_from_lhv(&model, &opt.settings).map_err(usage)?;
            let chsh_state = chsh_value(&rho, &opt.settings).map_err(usage)?;
            let abs_diff = (chsh_lhv - chsh_state).abs();
            Some(LhvCheck {
                chsh_lhv,
                chsh_state,
                abs_diff,
                pass: abs_diff <= config.tol_repro && chsh_lhv.abs() <= 2.0 + config.tol_repro,
            })
        }
        None => None,
    };
    let pass = lhv_check.is_none_or(|c| c.pass && opt.value <= 2.0 + config.tol_repro);
    let summary = ChshSummary {
        state: state.to_string(),
        separable: decomposition.is_some(),
        search_space: opt.space,
        grid_steps,
        refine_iters,
        value: opt.value,
        angles: opt.angles.clone(),
        settings: opt.settings,
        classical_bound: 2.0,
        quantum_bound: 2.0 * std::f64::consts::SQRT_2,
        exceeds_classical_bound: opt.value > 2.0 + config.tol_repro,
        lhv_check,
        pass,
    };
    let needs_scan = config.output_format == OutputFormat::Csv || scan_path.is_some();
    let scan = if needs_scan {
        scan_planar(&rho, grid_steps).map_err(usage)?
    } else {
        Vec::new()
    };
    if let Some(path) = scan_path {
        let text = output::csv(&scan).map_err(CommandError::Usage)?;
        fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let body = render(config, &summary, &scan)?;
    finish(body, pass, || match lhv_check {
        Some(c) => format!(
            "separable state {state}: search value {}, LHV value {} vs state value {}",
            opt.value, c.chsh_lhv, c.chsh_state
        ),
        None => format!("state {state}: search value {}", opt.value),
    })
}
