//! The verification front end behind the command-line binary: a fully
//! serializable run configuration, subcommand dispatch, and deterministic
//! line-record output. (config, seed) -> report is a pure function; repeated
//! runs are byte-identical.
//!
//! Exit statuses: 0 every check passed, 1 a falsification was found (with
//! witnesses), 2 configuration error, 3 indeterminate (a depth cap was
//! reached before an interval comparison settled).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::axioms::{
    check_axiom1, check_axiom2, default_epsilons, search_axiom_constants, Verdict,
};
use crate::config::{edge_shift_from_file, system_from_selector};
use crate::inverse_limit::{extend_thread, Chooser, Thread};
use crate::quotient::{enumerate_admissible_two_sided, verify_conjugacy, QuotientSystem};
use crate::rational::Rational;
use crate::report::{axiom_report_lines, replay_witnesses, witness_line};
use crate::sampling::{
    random_thread, random_two_sided, rng_from_seed, stable_partner, stable_prefix_for,
    unstable_partner,
};
use crate::shift_union::example2_witness;
use crate::smale::{
    bracket_construct, derive_hat_constants, disconnectedness_evidence, finite_to_one_check,
    stable_membership, unstable_membership, verify_contraction, BracketChoice, ContractionCase,
    PairKind, SmaleConstants, SmaleError,
};
use crate::symbolic::OneSidedWord;
use crate::system::{AxiomConstants, System};
use crate::with_system;

pub const STATUS_PASS: u8 = 0;
pub const STATUS_FALSIFIED: u8 = 1;
pub const STATUS_CONFIG_ERROR: u8 = 2;
pub const STATUS_INDETERMINATE: u8 = 3;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AxiomSelect {
    One,
    Two,
    Both,
}

impl std::fmt::Display for AxiomSelect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxiomSelect::One => write!(f, "1"),
            AxiomSelect::Two => write!(f, "2"),
            AxiomSelect::Both => write!(f, "both"),
        }
    }
}

/// One fully specified run; serializes to `key = value` lines and parses
/// back, so any report can be regenerated from its configuration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunConfig {
    Verify {
        system: String,
        axiom: AxiomSelect,
        constants: AxiomConstants,
        resolution: Rational,
        epsilons: Vec<Rational>,
        csv: bool,
    },
    Search {
        system: String,
        k_max: u32,
        gammas: Vec<Rational>,
        betas: Vec<Rational>,
        resolution: Rational,
        screen_resolution: Option<Rational>,
    },
    Bracket {
        system: String,
        constants: AxiomConstants,
        x: Vec<String>,
        y: Vec<String>,
        depth: usize,
    },
    SmaleVerify {
        system: String,
        constants: AxiomConstants,
        resolution: Rational,
        samples: usize,
        seed: u64,
        depth: usize,
    },
    Conjugacy {
        sft: String,
        samples: usize,
        depth: usize,
        seed: u64,
    },
    FalsifyExample2 {
        big_k: u32,
        depth_n: u32,
        gamma: Rational,
    },
    Replay {
        witness_text: String,
    },
}

pub struct RunOutput {
    pub status: u8,
    pub lines: Vec<String>,
}

impl RunOutput {
    fn config_error(message: impl std::fmt::Display) -> Self {
        RunOutput {
            status: STATUS_CONFIG_ERROR,
            lines: vec![format!("error kind=config message={message}")],
        }
    }
}

fn list(v: &[Rational]) -> String {
    v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> Result<Vec<Rational>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad rational {t:?}")))
        .collect()
}

impl RunConfig {
    /// Serialize as `key = value` lines. `parse` inverts this exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        match self {
            RunConfig::Verify { system, axiom, constants, resolution, epsilons, csv } => {
                put("command", "verify".into());
                put("system", system.clone());
                put("axiom", axiom.to_string());
                put("K", constants.big_k.to_string());
                put("beta", constants.beta.to_string());
                put("gamma", constants.gamma.to_string());
                put("resolution", resolution.to_string());
                put("epsilons", list(epsilons));
                put("csv", csv.to_string());
            }
            RunConfig::Search { system, k_max, gammas, betas, resolution, screen_resolution } => {
                put("command", "search".into());
                put("system", system.clone());
                put("K-max", k_max.to_string());
                put("gammas", list(gammas));
                put("betas", list(betas));
                put("resolution", resolution.to_string());
                if let Some(s) = screen_resolution {
                    put("screen-resolution", s.to_string());
                }
            }
            RunConfig::Bracket { system, constants, x, y, depth } => {
                put("command", "bracket".into());
                put("system", system.clone());
                put("K", constants.big_k.to_string());
                put("beta", constants.beta.to_string());
                put("gamma", constants.gamma.to_string());
                put("x", x.join(";"));
                put("y", y.join(";"));
                put("depth", depth.to_string());
            }
            RunConfig::SmaleVerify { system, constants, resolution, samples, seed, depth } => {
                put("command", "smale-verify".into());
                put("system", system.clone());
                put("K", constants.big_k.to_string());
                put("beta", constants.beta.to_string());
                put("gamma", constants.gamma.to_string());
                put("resolution", resolution.to_string());
                put("samples", samples.to_string());
                put("seed", seed.to_string());
                put("depth", depth.to_string());
            }
            RunConfig::Conjugacy { sft, samples, depth, seed } => {
                put("command", "conjugacy".into());
                put("sft", sft.clone());
                put("samples", samples.to_string());
                put("depth", depth.to_string());
                put("seed", seed.to_string());
            }
            RunConfig::FalsifyExample2 { big_k, depth_n, gamma } => {
                put("command", "falsify-example2".into());
                put("K", big_k.to_string());
                put("N", depth_n.to_string());
                put("gamma", gamma.to_string());
            }
            RunConfig::Replay { witness_text } => {
                put("command", "replay".into());
                // newlines escaped so the config stays line-oriented
                put("witnesses", witness_text.replace('\n', "\\n"));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<RunConfig, String> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| map.get(k).cloned().ok_or_else(|| format!("missing field {k}"));
        let rational = |k: &str| -> Result<Rational, String> {
            get(k)?.parse().map_err(|_| format!("field {k} is not a rational"))
        };
        let number = |k: &str| -> Result<u64, String> {
            get(k)?.parse().map_err(|_| format!("field {k} is not an integer"))
        };
        let constants = || -> Result<AxiomConstants, String> {
            AxiomConstants::new(rational("beta")?, number("K")? as u32, rational("gamma")?)
                .map_err(|e| e.to_string())
        };
        match get("command")?.as_str() {
            "verify" => Ok(RunConfig::Verify {
                system: get("system")?,
                axiom: match get("axiom")?.as_str() {
                    "1" => AxiomSelect::One,
                    "2" => AxiomSelect::Two,
                    "both" => AxiomSelect::Both,
                    other => return Err(format!("bad axiom selector {other:?}")),
                },
                constants: constants()?,
                resolution: rational("resolution")?,
                epsilons: parse_list(&get("epsilons")?)?,
                csv: get("csv")? == "true",
            }),
            "search" => Ok(RunConfig::Search {
                system: get("system")?,
                k_max: number("K-max")? as u32,
                gammas: parse_list(&get("gammas")?)?,
                betas: parse_list(&get("betas")?)?,
                resolution: rational("resolution")?,
                screen_resolution: map
                    .get("screen-resolution")
                    .map(|s| s.parse().map_err(|_| "bad screen-resolution".to_string()))
                    .transpose()?,
            }),
            "bracket" => Ok(RunConfig::Bracket {
                system: get("system")?,
                constants: constants()?,
                x: get("x")?.split(';').map(str::to_string).collect(),
                y: get("y")?.split(';').map(str::to_string).collect(),
                depth: number("depth")? as usize,
            }),
            "smale-verify" => Ok(RunConfig::SmaleVerify {
                system: get("system")?,
                constants: constants()?,
                resolution: rational("resolution")?,
                samples: number("samples")? as usize,
                seed: number("seed")?,
                depth: number("depth")? as usize,
            }),
            "conjugacy" => Ok(RunConfig::Conjugacy {
                sft: get("sft")?,
                samples: number("samples")? as usize,
                depth: number("depth")? as usize,
                seed: number("seed")?,
            }),
            "falsify-example2" => Ok(RunConfig::FalsifyExample2 {
                big_k: number("K")? as u32,
                depth_n: number("N")? as u32,
                gamma: rational("gamma")?,
            }),
            "replay" => Ok(RunConfig::Replay {
                witness_text: get("witnesses")?.replace("\\n", "\n"),
            }),
            other => Err(format!("unknown command {other:?}")),
        }
    }
}

/// Execute a run. Pure in (config): repeated invocations produce identical
/// output.
pub fn run(config: &RunConfig) -> RunOutput {
    match config {
        RunConfig::Verify { system, axiom, constants, resolution, epsilons, csv } => {
            let any = match system_from_selector(system) {
                Ok(s) => s,
                Err(e) => return RunOutput::config_error(e),
            };
            with_system!(&any, |sys| run_verify(sys, axiom, constants, resolution, epsilons, *csv))
        }
        RunConfig::Search { system, k_max, gammas, betas, resolution, screen_resolution } => {
            let any = match system_from_selector(system) {
                Ok(s) => s,
                Err(e) => return RunOutput::config_error(e),
            };
            if gammas.is_empty() || betas.is_empty() || *k_max == 0 {
                return RunOutput::config_error("search needs K-max >= 1 and nonempty grids");
            }
            with_system!(&any, |sys| run_search(
                sys,
                *k_max,
                gammas,
                betas,
                resolution,
                screen_resolution.as_ref()
            ))
        }
        RunConfig::Bracket { system, constants, x, y, depth } => {
            let any = match system_from_selector(system) {
                Ok(s) => s,
                Err(e) => return RunOutput::config_error(e),
            };
            with_system!(&any, |sys| run_bracket(sys, constants, x, y, *depth))
        }
        RunConfig::SmaleVerify { system, constants, resolution, samples, seed, depth } => {
            let any = match system_from_selector(system) {
                Ok(s) => s,
                Err(e) => return RunOutput::config_error(e),
            };
            with_system!(&any, |sys| run_smale_verify(
                sys, constants, resolution, *samples, *seed, *depth
            ))
        }
        RunConfig::Conjugacy { sft, samples, depth, seed } => {
            run_conjugacy(sft, *samples, *depth, *seed)
        }
        RunConfig::FalsifyExample2 { big_k, depth_n, gamma } => {
            run_falsify_example2(*big_k, *depth_n, gamma)
        }
        RunConfig::Replay { witness_text } => match replay_witnesses(witness_text) {
            Ok(summary) => RunOutput {
                status: STATUS_PASS,
                lines: vec![format!(
                    "replay replayed={} skipped={} verdict=reproduced",
                    summary.replayed, summary.skipped
                )],
            },
            Err(e) => RunOutput {
                status: STATUS_FALSIFIED,
                lines: vec![format!("replay verdict=mismatch message={e}")],
            },
        },
    }
}

fn run_verify<S: System + Sync>(
    sys: &S,
    axiom: &AxiomSelect,
    constants: &AxiomConstants,
    resolution: &Rational,
    epsilons: &[Rational],
    csv: bool,
) -> RunOutput {
    let mut lines = Vec::new();
    let mut failed = false;
    if matches!(axiom, AxiomSelect::One | AxiomSelect::Both) {
        let report = check_axiom1(sys, constants, resolution);
        failed |= report.verdict == Verdict::Fail;
        lines.extend(axiom_report_lines(&report));
        if csv {
            lines.extend(axiom1_csv(sys, constants, resolution));
        }
    }
    if matches!(axiom, AxiomSelect::Two | AxiomSelect::Both) {
        let eps = if epsilons.is_empty() {
            default_epsilons(&constants.beta)
        } else {
            epsilons.to_vec()
        };
        match check_axiom2(sys, constants, resolution, &eps) {
            Ok(report) => {
                failed |= report.verdict == Verdict::Fail;
                lines.extend(axiom_report_lines(&report));
            }
            Err(e) => return RunOutput::config_error(e),
        }
    }
    RunOutput { status: if failed { STATUS_FALSIFIED } else { STATUS_PASS }, lines }
}

/// (pair, ratio) table for plotting: every net pair within β with a positive
/// denominator.
fn axiom1_csv<S: System>(sys: &S, c: &AxiomConstants, resolution: &Rational) -> Vec<String> {
    let net = sys.net(resolution);
    let mut lines = vec!["csv x,y,distance,ratio".to_string()];
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            let d = sys.metric(&net[i], &net[j]);
            if d > c.beta {
                continue;
            }
            let num = sys.metric(
                &crate::system::iterate(sys, &net[i], c.big_k),
                &crate::system::iterate(sys, &net[j], c.big_k),
            );
            let den = sys.metric(
                &crate::system::iterate(sys, &net[i], 2 * c.big_k),
                &crate::system::iterate(sys, &net[j], 2 * c.big_k),
            );
            if !den.is_zero() {
                lines.push(format!("csv {},{},{},{}", net[i], net[j], d, &num / &den));
            }
        }
    }
    lines
}

fn run_search<S: System + Sync>(
    sys: &S,
    k_max: u32,
    gammas: &[Rational],
    betas: &[Rational],
    resolution: &Rational,
    screen: Option<&Rational>,
) -> RunOutput {
    let outcome = match search_axiom_constants(sys, 1..=k_max, gammas, betas, resolution, screen) {
        Ok(o) => o,
        Err(e) => return RunOutput::config_error(e),
    };
    let mut lines = Vec::new();
    for attempt in &outcome.attempts {
        lines.push(format!(
            "search-attempt system={} K={} beta={} gamma={} axiom1={} axiom2={} detail={}",
            sys.name(),
            attempt.constants.big_k,
            attempt.constants.beta,
            attempt.constants.gamma,
            attempt.axiom1_pass,
            attempt.axiom2_pass.map(|b| b.to_string()).unwrap_or_else(|| "skipped".into()),
            attempt.detail.replace(' ', "_"),
        ));
    }
    match outcome.found {
        Some((c, a1, a2)) => {
            lines.push(format!(
                "search-result system={} verdict=found K={} beta={} gamma={}",
                sys.name(),
                c.big_k,
                c.beta,
                c.gamma
            ));
            lines.extend(axiom_report_lines(&a1));
            lines.extend(axiom_report_lines(&a2));
            RunOutput { status: STATUS_PASS, lines }
        }
        None => {
            lines.push(format!("search-result system={} verdict=none-found", sys.name()));
            RunOutput { status: STATUS_FALSIFIED, lines }
        }
    }
}

fn run_bracket<S: System>(
    sys: &S,
    constants: &AxiomConstants,
    x_text: &[String],
    y_text: &[String],
    depth: usize,
) -> RunOutput {
    let parse_thread = |texts: &[String]| -> Result<Thread<S::Point>, String> {
        let entries = texts
            .iter()
            .map(|t| sys.parse_point(t).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Thread::new(sys, entries).map_err(|e| e.to_string())
    };
    let (x, y) = match (parse_thread(x_text), parse_thread(y_text)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return RunOutput::config_error(e),
    };
    let hc = match derive_hat_constants(sys, constants) {
        Ok(hc) => hc,
        Err(e) => return RunOutput::config_error(e),
    };
    let needed = depth + 3 * constants.big_k as usize;
    let deepen = |t: &Thread<S::Point>| extend_thread(sys, t, needed, &mut Chooser::Canonical);
    let (x, y) = match (deepen(&x), deepen(&y)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return RunOutput::config_error(e),
    };
    match bracket_construct(sys, &x, &y, constants, &hc, depth, BracketChoice::Least) {
        Ok(z) => {
            let entries =
                z.entries().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
            let stable = stable_membership(sys, &z, &x, &hc.eps_prime, constants);
            let unstable = unstable_membership(sys, &z, &y, &hc.eps_prime, constants);
            let lines = vec![
                format!("bracket system={} depth={} entries={}", sys.name(), z.depth(), entries),
                format!(
                    "bracket-membership stable={:?} unstable={:?} eps-prime={}",
                    stable.map(|d| format!("{d:?}")),
                    unstable.map(|(d, n)| format!("{d:?}@{n}")),
                    hc.eps_prime
                ),
            ];
            RunOutput { status: STATUS_PASS, lines }
        }
        Err(SmaleError::NoAdmissiblePreimage { stage, anchor, near, radius }) => RunOutput {
            status: STATUS_FALSIFIED,
            lines: vec![format!(
                "bracket system={} verdict=no-admissible-preimage stage={stage} anchor={anchor} near={near} radius={radius}",
                sys.name()
            )],
        },
        Err(e) => RunOutput::config_error(e),
    }
}

fn run_smale_verify<S: System + Sync>(
    sys: &S,
    constants: &AxiomConstants,
    resolution: &Rational,
    samples: usize,
    seed: u64,
    depth: usize,
) -> RunOutput {
    let hc = match derive_hat_constants(sys, constants) {
        Ok(hc) => hc,
        Err(e) => return RunOutput::config_error(e),
    };
    let sc = SmaleConstants::from_derived(constants, &hc);
    let mut lines = vec![format!(
        "smale-constants system={} eps-hat={} eps-prime={} eps-double-prime={} lambda={}",
        sys.name(),
        sc.eps_x,
        sc.eps_x_prime,
        hc.eps_double_prime,
        constants.gamma,
    )];

    let net = sys.net(resolution);
    let mut rng = rng_from_seed(seed);
    let prefix = stable_prefix_for(&hc.eps_prime, &constants.gamma, constants.big_k, &sys.diameter());
    let mut cases = Vec::new();
    let mut attempts = 0usize;
    while cases.iter().filter(|c: &&ContractionCase<S::Point>| c.kind == PairKind::Stable).count()
        < samples
        && attempts < 20 * samples
    {
        attempts += 1;
        let y = match random_thread(sys, &mut rng, &net, depth.max(prefix + 4)) {
            Ok(y) => y,
            Err(e) => return RunOutput::config_error(e),
        };
        if let Ok(z) = stable_partner(sys, &mut rng, &y, prefix) {
            cases.push(ContractionCase { kind: PairKind::Stable, y, z });
        }
    }
    let mut attempts = 0usize;
    while cases.iter().filter(|c: &&ContractionCase<S::Point>| c.kind == PairKind::Unstable).count()
        < samples
        && attempts < 40 * samples
    {
        attempts += 1;
        let y = match random_thread(sys, &mut rng, &net, depth.max(prefix + 4)) {
            Ok(y) => y,
            Err(e) => return RunOutput::config_error(e),
        };
        match unstable_partner(sys, &mut rng, &y, &net, &hc.eps_prime) {
            Ok(Some(z)) => cases.push(ContractionCase { kind: PairKind::Unstable, y, z }),
            Ok(None) => {}
            Err(e) => return RunOutput::config_error(e),
        }
    }
    let report = match verify_contraction(sys, &cases, constants, 16) {
        Ok(r) => r,
        Err(e) => return RunOutput::config_error(e),
    };
    lines.push(format!(
        "contraction system={} cases={} passed={} failed={} indeterminate={}",
        sys.name(),
        cases.len(),
        report.passed,
        report.failed,
        report.indeterminate
    ));

    let finite = match finite_to_one_check(sys, resolution) {
        Ok(f) => f,
        Err(e) => return RunOutput::config_error(e),
    };
    lines.push(format!(
        "finite-to-one system={} max={} checked={} witnesses={}",
        sys.name(),
        finite.max_count,
        finite.points_checked,
        finite.witnesses.join("|")
    ));

    // disconnectedness evidence on one seeded base thread per projection depth
    let mut escapes = 0usize;
    for n in 0..=depth.min(6) as u32 {
        let y = match random_thread(sys, &mut rng, &net, depth.max(6)) {
            Ok(y) => y,
            Err(e) => return RunOutput::config_error(e),
        };
        let mut members = Vec::new();
        for _ in 0..8 {
            if let Ok(z) = stable_partner(sys, &mut rng, &y, prefix.max(n as usize)) {
                members.push(z);
            }
        }
        match disconnectedness_evidence(sys, &y, &hc.eps_prime, constants, n, &members) {
            Ok(ev) => {
                escapes += ev.escapes.len();
                lines.push(format!(
                    "disconnectedness system={} n={} fiber={} samples={} escapes={}",
                    sys.name(),
                    n,
                    ev.fiber.len(),
                    ev.samples_checked,
                    ev.escapes.len()
                ));
            }
            Err(e) => return RunOutput::config_error(e),
        }
    }

    let status = if report.failed > 0 || escapes > 0 {
        STATUS_FALSIFIED
    } else if report.indeterminate > 0 {
        STATUS_INDETERMINATE
    } else {
        STATUS_PASS
    };
    RunOutput { status, lines }
}

fn run_conjugacy(sft: &str, samples: usize, depth: usize, seed: u64) -> RunOutput {
    let spec = if let Some(path) = sft.strip_prefix("file:") {
        match edge_shift_from_file(std::path::Path::new(path)) {
            Ok(s) => s,
            Err(e) => return RunOutput::config_error(e),
        }
    } else {
        match system_from_selector(sft) {
            Ok(crate::config::AnySystem::Shift(s)) => s.spec().clone(),
            Ok(_) => return RunOutput::config_error("conjugacy needs a shift of finite type"),
            Err(e) => return RunOutput::config_error(e),
        }
    };
    let q = match QuotientSystem::new(spec) {
        Ok(q) => q,
        Err(e) => return RunOutput::config_error(e),
    };
    let mut rng = rng_from_seed(seed);
    let mut words: Vec<_> = (0..samples).map(|_| random_two_sided(q.base(), &mut rng, 5)).collect();
    words.extend(enumerate_admissible_two_sided(q.base(), 4));
    let report = match verify_conjugacy(&q, &words, depth, 5) {
        Ok(r) => r,
        Err(e) => return RunOutput::config_error(e),
    };
    let mut lines = vec![format!(
        "conjugacy sft={sft} samples={} commutation-failures={} injectivity-max-depth={} injectivity-failures={} surjectivity-threads={} surjectivity-failures={}",
        report.samples,
        report.commutation_failures.len(),
        report.injectivity_max_depth.map(|d| d.to_string()).unwrap_or_else(|| "none".into()),
        report.injectivity_failures.len(),
        report.surjectivity_threads,
        report.surjectivity_failures.len(),
    )];
    let search = match q.quotient_axiom_constants(&Rational::two_pow_neg(6)) {
        Ok(s) => s,
        Err(e) => return RunOutput::config_error(e),
    };
    match &search.found {
        Some((c, _, _)) => lines.push(format!(
            "conjugacy-constants sft={sft} K={} beta={} gamma={}",
            c.big_k, c.beta, c.gamma
        )),
        None => lines.push(format!("conjugacy-constants sft={sft} verdict=none-found")),
    }
    let pass = report.all_pass() && search.found.is_some();
    RunOutput { status: if pass { STATUS_PASS } else { STATUS_FALSIFIED }, lines }
}

fn run_falsify_example2(big_k: u32, depth_n: u32, gamma: &Rational) -> RunOutput {
    match example2_witness(big_k, depth_n, gamma.clone()) {
        Ok(cert) => {
            let beta = cert.witness_distance.clone(); // any β >= ε works; record ε itself
            let constants = AxiomConstants::new(beta, big_k, gamma.clone()).unwrap();
            let mut lines = vec![format!(
                "falsify-example2 K={} N={} gamma={} x={} y={} witness-distance={} ball-radius={} target={} preimages={} verdict=falsified",
                cert.big_k,
                cert.depth_n,
                cert.gamma,
                cert.x,
                cert.y,
                cert.witness_distance,
                cert.ball_radius,
                cert.target,
                cert.preimage_certificate.len(),
            )];
            let witness = crate::axioms::Witness::Axiom2(crate::axioms::Axiom2Witness {
                x: cert.x.to_string(),
                epsilon: cert.witness_distance.clone(),
                w: cert.y.to_string(),
                target: cert.target.to_string(),
                preimages: cert
                    .preimage_certificate
                    .iter()
                    .map(|r| (r.point.to_string(), r.distance.clone()))
                    .collect(),
                best_distance: cert
                    .preimage_certificate
                    .iter()
                    .map(|r| r.distance.clone())
                    .min()
                    .unwrap(),
            });
            lines.push(witness_line("example2", &constants, &witness));
            RunOutput { status: STATUS_FALSIFIED, lines }
        }
        Err(e) => RunOutput::config_error(e),
    }
}

/// Parse a one-sided-word thread from `e0;e1;…` notation (shift systems).
pub fn parse_word_thread(text: &str) -> Result<Vec<OneSidedWord>, String> {
    text.split(';').map(|t| OneSidedWord::parse(t.trim())).collect()
}
