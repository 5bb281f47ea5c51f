mod args;
mod subject;

use std::io::Read;
use std::process::ExitCode;

use clap::Parser;
use log::info;

use propcheck::documents::{from_json, to_json, InstanceDocument, OutcomeDocument, ReportDocument};
use propcheck::{
    dive_campaign, run_campaign, replay_transcript, BranchOp, ComparisonMode, DiveConfig, EnumerationCap,
    Error, GenConfig, ReferenceFilter, TestReport,
};

use args::{Cli, Command, DiveArgs, Generation, Mode, OracleArgs, ReplayArgs, RunArgs};
use subject::{parse_level, parse_pair, CheckerSpec, Subject};

const PASSED: u8 = 0;
const COUNTEREXAMPLE: u8 = 1;
const USAGE: u8 = 2;
const CAP_EXCEEDED: u8 = 3;
const NOT_REPRODUCED: u8 = 4;

/// Failure of a subcommand, with its exit code.
struct Exit(u8, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit { .. } => CAP_EXCEEDED,
            _ => USAGE,
        };
        Exit(code, e.to_string())
    }
}

type Outcome = Result<u8, Exit>;

fn gen_config(g: &Generation) -> Result<GenConfig, Exit> {
    let cfg = GenConfig {
        n_vars: g.vars,
        value_min: g.min,
        value_max: g.max,
        density: g.density,
        n_tests: g.tests,
        seed: g.seed,
        cap: EnumerationCap::new(g.cap)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &TestReport, trusted: &Subject, tested: &Subject) -> u8 {
    let doc = ReportDocument::from_report(report, Some(trusted.to_string()), Some(tested.to_string()));
    println!("{}", to_json(&doc));
    eprintln!("{report}");
    if report.passed {
        PASSED
    } else {
        COUNTEREXAMPLE
    }
}

fn run(a: RunArgs) -> Outcome {
    let (trusted, tested) = parse_pair(&a.subjects.trusted, &a.subjects.tested)?;
    let cfg = gen_config(&a.generation)?;
    let mode = match a.mode {
        Mode::Check => ComparisonMode::Equality,
        Mode::Stronger => ComparisonMode::TestedSubsetOfTrusted,
    };
    info!("{:?} campaign: trusted {trusted}, tested {tested}", a.mode);
    let report = run_campaign(
        trusted.filter(cfg.n_vars, cfg.cap).as_ref(),
        tested.filter(cfg.n_vars, cfg.cap).as_ref(),
        mode,
        &cfg,
    )?;
    Ok(emit(&report, &trusted, &tested))
}

fn dive(a: DiveArgs) -> Outcome {
    let (trusted, tested) = parse_pair(&a.subjects.trusted, &a.subjects.tested)?;
    let cfg = gen_config(&a.generation)?;
    let dives = DiveConfig {
        nb_dives: a.dives,
        max_depth: a.max_depth,
        seed: cfg.seed,
    };
    dives.validate()?;
    info!("dive campaign: trusted {trusted}, tested {tested}");
    let (n, cap) = (cfg.n_vars, cfg.cap);
    let report = dive_campaign(
        || trusted.stateful(n, cap),
        || tested.stateful(n, cap),
        ComparisonMode::Equality,
        &cfg,
        &dives,
    )?;
    Ok(emit(&report, &trusted, &tested))
}

fn oracle(a: OracleArgs) -> Outcome {
    let level = parse_level(&a.level)?;
    let checker = CheckerSpec::parse(&a.checker)?;
    let mut input = String::new();
    std::io::stdin()
        .read_to_string(&mut input)
        .map_err(|e| Exit(USAGE, format!("cannot read stdin: {e}")))?;
    let instance = from_json::<InstanceDocument>(&input)?.to_instance()?;
    let filter = ReferenceFilter::new(level, checker.build(instance.arity())).with_cap(EnumerationCap::new(a.cap)?);
    let outcome = propcheck::Filter::apply(&filter, &instance)?;
    println!("{}", to_json(&OutcomeDocument::from(&outcome)));
    Ok(PASSED)
}

fn replay(a: ReplayArgs) -> Outcome {
    let text = std::fs::read_to_string(&a.report)
        .map_err(|e| Exit(USAGE, format!("cannot read {}: {e}", a.report.display())))?;
    let report: ReportDocument = from_json(&text)?;
    let Some(cx) = &report.counterexample else {
        return Err(Exit(USAGE, "the report has no counterexample; nothing to replay".into()));
    };
    let (Some(trusted), Some(tested)) = (&report.trusted, &report.tested) else {
        return Err(Exit(USAGE, "the report does not name its trusted and tested filters".into()));
    };
    let (trusted, tested) = parse_pair(trusted, tested)?;
    let mode = report.comparison_mode()?;
    let root = cx.shrunk.to_instance()?;
    let n = root.arity();
    let cap = EnumerationCap::DEFAULT;

    let reproduced = match &cx.transcript {
        Some(ops) => {
            let ops: Vec<BranchOp> = ops.iter().map(Into::into).collect();
            let mismatch = replay_transcript(
                &root,
                trusted.stateful(n, cap).as_mut(),
                tested.stateful(n, cap).as_mut(),
                mode,
                &ops,
            )?;
            if let Some(m) = &mismatch {
                eprintln!("reproduced after {} operations: {}", ops.len(), m.reason);
            }
            mismatch.is_some()
        }
        None => {
            let cmp = propcheck::compare_once(
                trusted.filter(n, cap).as_ref(),
                tested.filter(n, cap).as_ref(),
                mode,
                &root,
            )?;
            if let Some(reason) = &cmp.verdict {
                eprintln!("reproduced on {root}: {reason}");
            }
            cmp.verdict.is_some()
        }
    };
    if reproduced {
        Ok(COUNTEREXAMPLE)
    } else {
        eprintln!("the recorded failure did not reproduce");
        Ok(NOT_REPRODUCED)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Dive(a) => dive(a),
        Command::Oracle(a) => oracle(a),
        Command::Replay(a) => replay(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
