use std::path::PathBuf;

use irp_core::pipelines::{
    ClassificationPipeline, HedgedPrediction, Method, PredictionSet, RegressionPipeline,
};
use irp_core::pvalues::{asymptotic_constant, binary_irp_pvalue, BinaryIrp, Dominating, Icp};
use irp_core::summaries::{ClassifierSpec, FitFallback, RegressorSpec};
use irp_core::types::split_training;
use irp_core::validity::{
    audit_pvariable, check_dominance, monte_carlo_coverage, reproduce_table_k, Dominance,
    DominanceWitness, GeneratorKind, GeneratorSpec, PipelineSpec, TableRow, ValidityReport,
};
use irp_core::Task;
use serde::Serialize;

use crate::args::{
    DominateArgs, Format, MethodArg, ModeArg, PredictArgs, PvalueArgs, TableArgs, TaskArg,
    ValidateArgs,
};
use crate::config::{required, FileConfig};
use crate::dataset::{load_test, load_training};
use crate::error::{CliError, CliResult};
use crate::output::{json_document, num};

const DEFAULT_K_MAX: u32 = 7;
const DEFAULT_EXACT_M: usize = 10;
const DEFAULT_MC_M: usize = 20;
const DEFAULT_MC_L: usize = 200;
const DEFAULT_TRIALS: u64 = 10_000;
const DEFAULT_EPSILON: f64 = 0.05;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_THRESHOLD: f64 = 0.5;
const DEFAULT_DIM: usize = 2;
const DEFAULT_REGRESSION_NOISE: f64 = 0.5;
const DEFAULT_FLIP_RATE: f64 = 0.1;

/// Rendered output and whether the command's check passed.
pub struct Rendered {
    pub text: String,
    pub passed: bool,
}

fn ok(text: String) -> CliResult<Rendered> {
    Ok(Rendered { text, passed: true })
}

fn task(arg: TaskArg) -> Task {
    match arg {
        TaskArg::Regression => Task::Regression,
        TaskArg::Classification => Task::Classification,
    }
}

fn method(arg: MethodArg) -> Method {
    match arg {
        MethodArg::Irp => Method::Irp,
        MethodArg::Icp => Method::Icp,
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Irp => "irp",
        Method::Icp => "icp",
    }
}

fn check_epsilon(eps: f64) -> CliResult<f64> {
    if eps > 0.0 && eps < 1.0 {
        Ok(eps)
    } else {
        Err(CliError::usage(format!(
            "--epsilon must lie in (0, 1), got {eps}"
        )))
    }
}

#[derive(Serialize)]
struct TableBody<'a> {
    k_max: u32,
    rows: &'a [TableRow],
}

pub fn table(args: &TableArgs, file: &FileConfig) -> CliResult<Rendered> {
    let cfg = file.engine(&args.engine)?;
    let k_max = args.k_max.or(file.k_max).unwrap_or(DEFAULT_K_MAX);
    let json = args.json || args.format.or(file.format) == Some(Format::Json);
    let rows = reproduce_table_k(k_max, &cfg)?;
    if json {
        return ok(json_document("table", &TableBody { k_max, rows: &rows })?);
    }
    let line = |label: &str, cell: &dyn Fn(&TableRow) -> String| {
        let cells: Vec<String> = rows.iter().map(|r| format!("{:>7}", cell(r))).collect();
        format!("{label:<6}{}", cells.join(""))
    };
    let text = [
        line("k", &|r| r.k.to_string()),
        line("IRP", &|r| format!("{:.3}", r.irp)),
        line("ICP", &|r| r.icp.to_string()),
        line("ratio", &|r| format!("{:.3}", r.ratio)),
    ]
    .join("\n");
    ok(text)
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum PvalueBody {
    Finite {
        m: u64,
        k: u64,
        irp: f64,
        icp: f64,
        ratio: f64,
        degenerate: bool,
    },
    Asymptotic {
        m: u64,
        k: u64,
        a_k: f64,
        c_star: f64,
        pvalue: f64,
    },
}

pub fn pvalue(args: &PvalueArgs, file: &FileConfig) -> CliResult<Rendered> {
    let cfg = file.engine(&args.engine)?;
    let m = required(args.m, file.m, "m")?;
    let k = required(args.k, file.k, "k")?;
    if m == 0 {
        return Err(CliError::usage("--m must be at least 1"));
    }
    if k > m {
        return Err(CliError::usage(format!("--k = {k} exceeds --m = {m}")));
    }
    let body = if args.asymptotic {
        let k32 = u32::try_from(k).map_err(|_| CliError::usage(format!("--k = {k} too large")))?;
        let c = asymptotic_constant(k32, &cfg)?;
        PvalueBody::Asymptotic {
            m,
            k,
            a_k: c.a_k,
            c_star: c.c_star,
            pvalue: c.a_k / m as f64,
        }
    } else {
        let irp = binary_irp_pvalue(m, k, &cfg)?;
        let icp = (k + 1) as f64 / (m + 1) as f64;
        PvalueBody::Finite {
            m,
            k,
            irp,
            icp,
            ratio: irp / icp,
            degenerate: k == m,
        }
    };
    if args.json {
        return ok(json_document("pvalue", &body)?);
    }
    let text = match body {
        PvalueBody::Finite {
            m,
            k,
            irp,
            icp,
            ratio,
            degenerate,
        } => {
            let mut s = format!(
                "m = {m}, k = {k}\nIRP p-value: {}\nICP p-value: {}\nratio: {}",
                num(irp),
                num(icp),
                num(ratio)
            );
            if degenerate {
                s.push_str("\ndegenerate: k = m");
            }
            s
        }
        PvalueBody::Asymptotic {
            m,
            k,
            a_k,
            c_star,
            pvalue,
        } => format!(
            "m = {m}, k = {k}\na_k: {}\nc*: {}\nasymptotic p-value a_k/m: {}",
            num(a_k),
            num(c_star),
            num(pvalue)
        ),
    };
    ok(text)
}

#[derive(Serialize)]
struct PredictRow {
    row: usize,
    #[serde(flatten)]
    prediction: HedgedPrediction,
    /// Prediction set at the requested significance level.
    gamma: PredictionSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covered: Option<bool>,
}

#[derive(Serialize)]
struct PredictBody {
    task: Task,
    method: Method,
    epsilon: f64,
    l: usize,
    m: usize,
    k: usize,
    fallback: Option<FitFallback>,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<usize>,
    predictions: Vec<PredictRow>,
}

enum Fitted {
    Regression(RegressionPipeline),
    Classification(ClassificationPipeline),
}

fn render_set(s: &PredictionSet) -> String {
    match s {
        PredictionSet::Interval { lower, upper } => format!("[{}, {}]", num(*lower), num(*upper)),
        PredictionSet::RealLine => "(-inf, inf)".into(),
        PredictionSet::Labels { labels } => {
            let l: Vec<String> = labels.iter().map(i8::to_string).collect();
            format!("{{{}}}", l.join(", "))
        }
    }
}

fn path(flag: &Option<PathBuf>, file: &Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
    required(flag.clone(), file.clone(), name)
}

pub fn predict(args: &PredictArgs, file: &FileConfig) -> CliResult<Rendered> {
    let cfg = file.engine(&args.engine)?;
    let train = path(&args.train, &file.train, "train")?;
    let test = path(&args.test, &file.test, "test")?;
    let split_at = required(args.split_at, file.split_at, "split-at")?;
    let task = task(required(args.task, file.task, "task")?);
    let epsilon = check_epsilon(args.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON))?;
    let method = method(args.method.or(file.method).unwrap_or(MethodArg::Irp));
    let defaults = ClassifierSpec::default();
    let classifier = ClassifierSpec {
        learning_rate: args
            .learning_rate
            .or(file.learning_rate)
            .unwrap_or(defaults.learning_rate),
        epochs: args.epochs.or(file.epochs).unwrap_or(defaults.epochs),
        regularization: args
            .regularization
            .or(file.regularization)
            .unwrap_or(defaults.regularization),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        ..defaults
    };

    let training = load_training(&train, task)?;
    let dim = training.dim();
    let testing = load_test(&test, task, dim)?;
    let split = split_training(training.examples(task)?, split_at)?;
    let fitted = match task {
        Task::Regression => {
            Fitted::Regression(RegressionPipeline::fit(&split, &RegressorSpec::default())?)
        }
        Task::Classification => {
            Fitted::Classification(ClassificationPipeline::fit(&split, &classifier)?)
        }
    };
    let (k, fallback) = match &fitted {
        Fitted::Regression(p) => (p.k(), p.fallback()),
        Fitted::Classification(p) => (p.k(), p.fallback()),
    };

    let mut rows = Vec::with_capacity(testing.features.len());
    for (i, x) in testing.features.iter().enumerate() {
        let prediction = match &fitted {
            Fitted::Regression(p) => p.predict(x, method, &cfg)?,
            Fitted::Classification(p) => p.predict(x, method, &cfg)?,
        };
        let gamma = prediction.prediction_set(epsilon)?;
        let label = testing.labels.get(i).copied();
        let covered = label.map(|y| gamma.contains(y));
        rows.push(PredictRow {
            row: i + 1,
            prediction,
            gamma,
            label,
            covered,
        });
    }
    let errors = (!testing.labels.is_empty())
        .then(|| rows.iter().filter(|r| r.covered == Some(false)).count());
    let body = PredictBody {
        task,
        method,
        epsilon,
        l: split.l(),
        m: split.m(),
        k,
        fallback,
        errors,
        predictions: rows,
    };
    if args.json {
        return ok(json_document("predict", &body)?);
    }

    let mut lines = vec![format!(
        "{} {} epsilon = {}, l = {}, m = {}, k = {}",
        method_name(method),
        match task {
            Task::Regression => "regression",
            Task::Classification => "classification",
        },
        num(epsilon),
        body.l,
        body.m,
        body.k
    )];
    if let Some(f) = fallback {
        lines.push(format!("fallback: {f:?}"));
    }
    for r in &body.predictions {
        let p = &r.prediction;
        let mut line = format!(
            "row {}: point {} set {} incertitude {} gamma {}",
            r.row,
            num(p.point),
            render_set(&p.set),
            num(p.incertitude),
            render_set(&r.gamma)
        );
        if p.degenerate {
            line.push_str(" degenerate");
        }
        if p.vacuous {
            line.push_str(" vacuous");
        }
        if let (Some(y), Some(c)) = (r.label, r.covered) {
            line.push_str(&format!(
                " label {} {}",
                num(y),
                if c { "covered" } else { "missed" }
            ));
        }
        lines.push(line);
    }
    if let Some(e) = errors {
        lines.push(format!("errors: {e} of {}", body.predictions.len()));
    }
    ok(lines.join("\n"))
}

#[derive(Serialize)]
struct ValidateBody {
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorSpec>,
    #[serde(flatten)]
    report: ValidityReport,
}

pub fn validate(args: &ValidateArgs, file: &FileConfig) -> CliResult<Rendered> {
    let cfg = file.engine(&args.engine)?;
    let mode = args.mode.or(file.mode).unwrap_or(ModeArg::Exact);
    let body = match mode {
        ModeArg::Exact => {
            let m = args
                .m
                .or(file.m.map(|v| v as usize))
                .unwrap_or(DEFAULT_EXACT_M);
            let a = args
                .threshold
                .or(file.threshold)
                .unwrap_or(DEFAULT_THRESHOLD);
            let dominating = Dominating::new(a)?;
            let mut report = audit_pvariable(&BinaryIrp::new(cfg)?, m)?;
            report.extend(audit_pvariable(&Icp, m)?);
            report.extend(audit_pvariable(&dominating, m)?);
            ValidateBody {
                threshold: Some(a),
                generator: None,
                report,
            }
        }
        ModeArg::Mc => {
            let task = task(args.task.or(file.task).unwrap_or(TaskArg::Regression));
            let kind = match task {
                Task::Regression => GeneratorKind::LinearBoundedNoise,
                Task::Classification => GeneratorKind::NoisyHalfspace,
            };
            let default_noise = match task {
                Task::Regression => DEFAULT_REGRESSION_NOISE,
                Task::Classification => DEFAULT_FLIP_RATE,
            };
            let generator = GeneratorSpec {
                kind,
                dim: args.dim.or(file.dim).unwrap_or(DEFAULT_DIM),
                noise: args.noise.or(file.noise).unwrap_or(default_noise),
                proper: args.l.or(file.l).unwrap_or(DEFAULT_MC_L),
                calibration: args
                    .m
                    .or(file.m.map(|v| v as usize))
                    .unwrap_or(DEFAULT_MC_M),
            };
            let epsilon = check_epsilon(args.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON))?;
            let spec = PipelineSpec::hedged(method(
                args.method.or(file.method).unwrap_or(MethodArg::Irp),
            ));
            let report = monte_carlo_coverage(
                &spec,
                &generator,
                epsilon,
                args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
                args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                &cfg,
            )?;
            ValidateBody {
                threshold: None,
                generator: Some(generator),
                report,
            }
        }
    };
    let passed = body.report.passed;
    if args.json {
        return Ok(Rendered {
            text: json_document("validate", &body)?,
            passed,
        });
    }
    let r = &body.report;
    let mut lines = vec![match (r.trials, r.seed) {
        (Some(t), Some(s)) => format!("monte carlo m = {}, trials = {t}, seed = {s}", r.m),
        _ => format!("exact m = {}", r.m),
    }];
    for c in &r.cells {
        let se = c
            .std_error
            .map(|s| format!(" (SE {})", num(s)))
            .unwrap_or_default();
        lines.push(format!(
            "{} epsilon {}: probability {}{se} bound {} {}",
            c.pvariable,
            num(c.epsilon),
            num(c.probability),
            num(c.threshold),
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    if let Some(mm) = r.set_mismatches {
        lines.push(format!("irp/icp set mismatches: {mm}"));
    }
    lines.push(format!(
        "{}: {} of {} cells pass",
        if passed { "PASS" } else { "FAIL" },
        r.cells.iter().filter(|c| c.pass).count(),
        r.cells.len()
    ));
    Ok(Rendered {
        text: lines.join("\n"),
        passed,
    })
}

#[derive(Serialize)]
struct DominateBody {
    m: usize,
    threshold: f64,
    verdict: Dominance,
    witness: Option<DominanceWitness>,
}

pub fn dominate(args: &DominateArgs, file: &FileConfig) -> CliResult<Rendered> {
    let m = required(args.m, file.m.map(|v| v as usize), "m")?;
    let a = args
        .threshold
        .or(file.threshold)
        .unwrap_or(DEFAULT_THRESHOLD);
    let result = check_dominance(&Dominating::new(a)?, &Icp, m)?;
    let passed = result.verdict == Dominance::Strict;
    let body = DominateBody {
        m,
        threshold: a,
        verdict: result.verdict,
        witness: result.witness,
    };
    if args.json {
        return Ok(Rendered {
            text: json_document("dominate", &body)?,
            passed,
        });
    }
    let verdict = match body.verdict {
        Dominance::Strict => "strict",
        Dominance::Weak => "weak",
        Dominance::None => "none",
    };
    let mut text = format!("m = {m}, threshold = {}\nverdict: {verdict}", num(a));
    if let Some(w) = &body.witness {
        text.push_str(&format!(
            "\nwitness: k = {}, test summary = {}\ndominating p-value: {}\nICP p-value: {}",
            w.k,
            u8::from(w.test),
            num(w.p1),
            num(w.p2)
        ));
    }
    Ok(Rendered { text, passed })
}
