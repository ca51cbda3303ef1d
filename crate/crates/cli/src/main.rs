//! `gembed`: class checks, knowledge problems and diagnostics over rewrite
//! theories stored in `.trs`, `.frame` and `.eqs` files.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gembed::catalog;
use gembed::contracting::{check_contracting, check_strictly_contracting};
use gembed::formats::{parse_axioms, parse_frame, parse_terms, parse_theory, print_frame, print_theory, FrameFile, TheoryFile};
use gembed::gemb::{check_graph_embedded_trs, check_hom_embedded_trs, graph_embedded_rel, GembError, GembOptions};
use gembed::knowledge::{cap_solve, deduce, saturate, static_equivalent, KnowledgeError, KnowledgeOptions, StaticEquivalence};
use gembed::mpcp::{generate_reduction, solution_recipe, solve_bounded, MpcpInstance};
use gembed::rewriting::{check_convergent, ConvergenceBudgets, ConvergenceVerdict, DEFAULT_NORMALIZE_BUDGET};
use gembed::syntax::parse_term;
use gembed::theory::{
    combination_check, deduce_permutative, forward_closure_bounded, fvp_sufficient, layered_check, EqPresentation,
    ForwardClosure, FvpVerdict, LayeredVerdict, PermutativeError, DEFAULT_CLASS_CAP, DEFAULT_DECOMPOSITION_CAP,
    DEFAULT_FORWARD_CLOSURE_BOUND,
};
use gembed::{Symbol, Term, Trs};

const HOLDS: u8 = 0;
const FAILS: u8 = 1;
const UNKNOWN: u8 = 2;
const INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "gembed", version, about = "Graph-embedded and contracting rewrite theories: class checks and knowledge problems")]
struct Cli {
    /// Machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Run deduction, static equivalence and cap on theories that are not
    /// known to be contracting convergent. Results are marked heuristic.
    #[arg(long, global = true)]
    force: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_NORMALIZE_BUDGET)]
    normalize_budget: usize,
    #[arg(long, global = true, default_value_t = KnowledgeOptions::default().gst_cap)]
    gst_cap: usize,
    /// Context bound for static-equivalence equations (default c_R squared).
    #[arg(long, global = true)]
    context_bound: Option<usize>,
    #[arg(long, global = true, default_value_t = KnowledgeOptions::default().candidate_cap)]
    candidate_cap: usize,
    /// The distinguished fresh public name (picked automatically otherwise).
    #[arg(long, global = true)]
    fresh_name: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Property {
    GraphEmbedded,
    HomEmbedded,
    Subterm,
    Convergent,
    Contracting,
    StrictlyContracting,
    FvpSufficient,
    Layered,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a class property of a theory.
    Check {
        #[arg(long)]
        theory: String,
        #[arg(long, value_enum)]
        property: Property,
        /// Largest context searched per layered witness.
        #[arg(long, default_value_t = 8)]
        context_cap: usize,
        #[arg(long, default_value_t = DEFAULT_DECOMPOSITION_CAP)]
        decomposition_cap: usize,
        #[arg(long, default_value_t = GembOptions::default().state_cap)]
        state_cap: usize,
    },
    /// Normal form of a term, with the rewrite trace.
    Normalize {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        term: String,
    },
    /// A graph-embedding derivation from one term to another.
    GembWitness {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = GembOptions::default().state_cap)]
        state_cap: usize,
    },
    /// Is a ground term deducible from a frame?
    Deduce {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        frame: String,
        #[arg(long)]
        term: String,
    },
    /// Are two frames statically equivalent?
    StaticEquiv {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        frame1: String,
        #[arg(long)]
        frame2: String,
    },
    /// Cap problem: can the secret be built from the given terms?
    Cap {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        secret: String,
        /// One ground term per line.
        #[arg(long)]
        terms: PathBuf,
    },
    /// Deduction modulo a permutative axiom set.
    DeducePermutative {
        #[arg(long)]
        axioms: String,
        #[arg(long)]
        frame: String,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        class_cap: usize,
    },
    /// Applicability of the combination results to a union.
    CombineCheck {
        #[arg(long)]
        theory1: String,
        #[arg(long, conflicts_with = "axioms", required_unless_present = "axioms")]
        theory2: Option<String>,
        #[arg(long)]
        axioms: Option<String>,
    },
    /// Bounded forward closure of a theory.
    ForwardClosure {
        #[arg(long)]
        theory: String,
        #[arg(long, default_value_t = DEFAULT_FORWARD_CLOSURE_BOUND)]
        bound: usize,
    },
    /// Writes the rewrite system, frame and target of the MPCP reduction.
    GenMpcp {
        /// Pairs as `alpha:beta,...` over the letters a and b.
        #[arg(long)]
        pairs: String,
        #[arg(long, default_value = "")]
        alpha0: String,
        #[arg(long, default_value = "")]
        beta0: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Also search for a solution of at most this many pairs.
        #[arg(long)]
        solve: Option<usize>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT, message: message.into() }
    }

    fn budget(message: impl Into<String>) -> Self {
        Failure { code: UNKNOWN, message: message.into() }
    }
}

fn knowledge_failure(e: KnowledgeError) -> Failure {
    match e {
        KnowledgeError::GstOverflow { .. }
        | KnowledgeError::CandidateOverflow { .. }
        | KnowledgeError::Normalize(_)
        | KnowledgeError::Gemb(GembError::StateCap(_)) => Failure::budget(e.to_string()),
        _ => Failure::input(e.to_string()),
    }
}

fn gemb_failure(e: GembError) -> Failure {
    match e {
        GembError::StateCap(_) => Failure::budget(e.to_string()),
        _ => Failure::input(e.to_string()),
    }
}

struct Report {
    command: &'static str,
    verdict: &'static str,
    code: u8,
    lines: Vec<String>,
    details: Value,
}

impl Report {
    fn new(command: &'static str, verdict: &'static str, code: u8) -> Self {
        Report { command, verdict, code, lines: Vec::new(), details: json!({}) }
    }

    fn line(mut self, l: impl Into<String>) -> Self {
        self.lines.push(l.into());
        self
    }

    fn detail(mut self, key: &str, v: impl Serialize) -> Self {
        self.details[key] = serde_json::to_value(v).expect("report values serialize");
        self
    }
}

#[derive(Serialize)]
struct Config<'a> {
    normalize_budget: usize,
    gst_cap: usize,
    context_bound: Option<usize>,
    candidate_cap: usize,
    fresh_name: &'a Option<String>,
    force: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    extra: Option<Value>,
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))
}

/// A `.trs` path, or the name of a bundled theory.
fn load_theory(arg: &str) -> Result<TheoryFile, Failure> {
    if !Path::new(arg).exists() && catalog::THEORIES.iter().any(|(n, _)| *n == arg) {
        return Ok(catalog::theory(arg));
    }
    parse_theory(&read(arg)?).map_err(|e| Failure::input(format!("{arg}: {e}")))
}

fn load_frame(arg: &str) -> Result<FrameFile, Failure> {
    if !Path::new(arg).exists() && catalog::FRAMES.iter().any(|(n, _)| *n == arg) {
        return Ok(catalog::frame(arg));
    }
    parse_frame(&read(arg)?).map_err(|e| Failure::input(format!("{arg}: {e}")))
}

fn load_axioms(arg: &str) -> Result<EqPresentation, Failure> {
    if !Path::new(arg).exists() && catalog::AXIOMS.iter().any(|(n, _)| *n == arg) {
        return Ok(catalog::axioms(arg));
    }
    parse_axioms(&read(arg)?).map_err(|e| Failure::input(format!("{arg}: {e}")))
}

fn term(src: &str) -> Result<Term, Failure> {
    parse_term(src).map_err(|e| Failure::input(format!("term `{src}`: {e}")))
}

fn ground(src: &str) -> Result<Term, Failure> {
    let t = term(src)?;
    if !t.is_ground() {
        return Err(Failure::input(format!("term `{src}` is not ground")));
    }
    Ok(t)
}

fn yes_no(b: bool) -> (&'static str, u8) {
    if b {
        ("yes", HOLDS)
    } else {
        ("no", FAILS)
    }
}

/// `None` when the theory is contracting convergent, otherwise the reason.
fn precondition(trs: &Trs) -> Result<Option<String>, Failure> {
    let c = check_contracting(trs).map_err(|e| Failure::input(e.to_string()))?;
    if !c.contracting {
        return Ok(Some(format!("not contracting (rule {})", c.first_failure.unwrap_or(0))));
    }
    match check_convergent(trs, &ConvergenceBudgets::default()) {
        ConvergenceVerdict::Yes { .. } => Ok(None),
        ConvergenceVerdict::No { .. } => Ok(Some("not convergent".into())),
        ConvergenceVerdict::Unknown { reason } => Ok(Some(format!("convergence unknown: {reason}"))),
    }
}

/// Refuses without `--force`; with it, returns the caveat to attach.
fn gate(cli: &Cli, command: &'static str, trs: &Trs) -> Result<Result<Option<String>, Report>, Failure> {
    match precondition(trs)? {
        None => Ok(Ok(None)),
        Some(reason) if cli.force => Ok(Ok(Some(reason))),
        Some(reason) => Ok(Err(Report::new(command, "unknown", UNKNOWN)
            .line(format!("theory is {reason}; rerun with --force for a heuristic answer"))
            .detail("precondition", &reason))),
    }
}

fn heuristic(mut r: Report, caveat: Option<String>) -> Report {
    if let Some(reason) = caveat {
        r.code = UNKNOWN;
        r.lines.push(format!("heuristic: theory is {reason}, so completeness is not guaranteed"));
        r.details["heuristic"] = json!(reason);
    }
    r
}

fn options(cli: &Cli) -> KnowledgeOptions {
    KnowledgeOptions {
        normalize_budget: cli.normalize_budget,
        gst_cap: cli.gst_cap,
        context_bound: cli.context_bound,
        candidate_cap: cli.candidate_cap,
        fresh_name: cli.fresh_name.clone(),
    }
}

fn check(cli: &Cli, theory: &str, property: Property, context_cap: usize, decomposition_cap: usize, state_cap: usize) -> Result<Report, Failure> {
    let th = load_theory(theory)?;
    let trs = &th.trs;
    let budgets = ConvergenceBudgets { normalize_steps: cli.normalize_budget.min(ConvergenceBudgets::default().normalize_steps), ..Default::default() };
    let r = match property {
        Property::GraphEmbedded => {
            let opts = GembOptions { state_cap, ..Default::default() };
            let rep = check_graph_embedded_trs(trs, &opts).map_err(gemb_failure)?;
            let (v, c) = yes_no(rep.holds);
            Report::new("check", v, c).detail("certificate", &rep)
        }
        Property::HomEmbedded => {
            let rep = check_hom_embedded_trs(trs);
            let (v, c) = yes_no(rep.holds);
            let mut r = Report::new("check", v, c).detail("certificate", &rep);
            for (i, ok) in rep.rules.iter().enumerate().filter(|(_, ok)| !**ok) {
                r = r.line(format!("rule {}: rhs is not embedded in lhs ({ok})", i + 1));
            }
            r
        }
        Property::Subterm => {
            let rep = trs.subterm_shape();
            let (v, c) = yes_no(rep.holds);
            Report::new("check", v, c).detail("certificate", &rep)
        }
        Property::Convergent => {
            let v = check_convergent(trs, &budgets);
            let (verdict, code) = match &v {
                ConvergenceVerdict::Yes { .. } => ("yes", HOLDS),
                ConvergenceVerdict::No { .. } => ("no", FAILS),
                ConvergenceVerdict::Unknown { .. } => ("unknown", UNKNOWN),
            };
            Report::new("check", verdict, code).detail("certificate", &v)
        }
        Property::Contracting => {
            let rep = check_contracting(trs).map_err(|e| Failure::input(e.to_string()))?;
            let (v, c) = yes_no(rep.contracting);
            let mut r = Report::new("check", v, c).detail("certificate", &rep);
            if let Some(i) = rep.first_failure {
                r = r.line(format!("first uncertified rule: {i} ({})", trs.rules()[i - 1]));
            }
            r
        }
        Property::StrictlyContracting => {
            let holds = check_strictly_contracting(trs).map_err(|e| Failure::input(e.to_string()))?;
            let rep = check_contracting(trs).map_err(|e| Failure::input(e.to_string()))?;
            let (v, c) = yes_no(holds);
            Report::new("check", v, c).detail("certificate", &rep)
        }
        Property::FvpSufficient => {
            let v = fvp_sufficient(trs, &budgets).map_err(|e| Failure::input(e.to_string()))?;
            let r = match &v {
                FvpVerdict::Yes => Report::new("check", "yes", HOLDS),
                FvpVerdict::NotApplicable { reason } => Report::new("check", "not-applicable", FAILS).line(reason.clone()),
            };
            r.detail("certificate", &v)
        }
        Property::Layered => {
            let v = layered_check(trs, context_cap, decomposition_cap).map_err(|e| Failure::budget(e.to_string()))?;
            let (verdict, code) = match &v {
                LayeredVerdict::Layered { .. } => ("yes", HOLDS),
                LayeredVerdict::NotLayeredEvidence { .. } => ("no", FAILS),
                LayeredVerdict::Unknown { .. } => ("unknown", UNKNOWN),
            };
            let mut r = Report::new("check", verdict, code).detail("certificate", &v);
            if let LayeredVerdict::Unknown { rule, .. } | LayeredVerdict::NotLayeredEvidence { rule, .. } = &v {
                r = r.line(format!("no witness for rule {}", rule + 1));
            }
            r
        }
    };
    Ok(r.detail("theory", &th.name).detail("property", property).detail(
        "extra",
        json!({"context_cap": context_cap, "decomposition_cap": decomposition_cap, "state_cap": state_cap}),
    ))
}

fn normalize(cli: &Cli, theory: &str, t: &str) -> Result<Report, Failure> {
    let th = load_theory(theory)?;
    let t = term(t)?;
    match th.trs.normalize(&t, cli.normalize_budget) {
        Ok((nf, trace)) => Ok(Report::new("normalize", "normal-form", HOLDS)
            .line(format!("{t} ->* {nf} in {} steps", trace.steps.len()))
            .detail("normal_form", nf.to_string())
            .detail("trace", &trace)),
        Err(e) => Err(Failure::budget(e.to_string())),
    }
}

fn gemb_witness(from: &str, to: &str, state_cap: usize) -> Result<Report, Failure> {
    let (s, t) = (term(from)?, term(to)?);
    let opts = GembOptions { state_cap, ..Default::default() };
    let r = match graph_embedded_rel(&s, &t, &opts).map_err(gemb_failure)? {
        Some(d) => {
            let mut r = Report::new("gemb-witness", "yes", HOLDS);
            for step in &d.steps {
                r = r.line(format!("{:?} at {} ({})", step.rule, step.position, step.symbol));
            }
            r.detail("derivation", &d)
        }
        None => Report::new("gemb-witness", "no", FAILS).line(format!("{t} is not graph-embedded in {s}")),
    };
    Ok(r)
}

fn deduce_cmd(cli: &Cli, theory: &str, frame: &str, t: &str) -> Result<Report, Failure> {
    let th = load_theory(theory)?;
    let fr = load_frame(frame)?;
    let t = ground(t)?;
    let caveat = match gate(cli, "deduce", &th.trs)? {
        Ok(c) => c,
        Err(refused) => return Ok(refused),
    };
    let opts = options(cli);
    let recipe = deduce(&fr.frame, &th.trs, &t, &opts).map_err(knowledge_failure)?;
    let mut r = match &recipe {
        Some(z) => Report::new("deduce", "deducible", HOLDS).line(format!("recipe: {z}")).detail("recipe", z.to_string()),
        None => Report::new("deduce", "not-deducible", FAILS).line(format!("{t} is not deducible from {}", fr.frame)),
    };
    if cli.json {
        let state = saturate(&fr.frame, &th.trs, &opts).map_err(knowledge_failure)?;
        r = r.detail("saturation", &state);
    }
    Ok(heuristic(r.detail("theory", &th.name).detail("frame", fr.frame.to_string()).detail("term", t.to_string()), caveat))
}

fn static_equiv_cmd(cli: &Cli, theory: &str, f1: &str, f2: &str) -> Result<Report, Failure> {
    let th = load_theory(theory)?;
    let (a, b) = (load_frame(f1)?, load_frame(f2)?);
    let caveat = match gate(cli, "static-equiv", &th.trs)? {
        Ok(c) => c,
        Err(refused) => return Ok(refused),
    };
    let opts = options(cli);
    let v = static_equivalent(&a.frame, &b.frame, &th.trs, &opts).map_err(knowledge_failure)?;
    let mut r = match &v {
        StaticEquivalence::Equivalent { equations_checked } => {
            Report::new("static-equiv", "equivalent", HOLDS).line(format!("{equations_checked} equations checked"))
        }
        StaticEquivalence::NotEquivalent { witness, holds_in } => Report::new("static-equiv", "not-equivalent", FAILS)
            .line(format!("witness: {witness} holds in frame {holds_in} only"))
            .detail("witness", witness.to_string()),
    };
    r = r.detail("result", &v);
    if cli.json {
        let sa = saturate(&a.frame, &th.trs, &opts).map_err(knowledge_failure)?;
        let sb = saturate(&b.frame, &th.trs, &opts).map_err(knowledge_failure)?;
        r = r.detail("saturation", json!([sa, sb]));
    }
    Ok(heuristic(r.detail("theory", &th.name), caveat))
}

fn cap_cmd(cli: &Cli, theory: &str, secret: &str, terms: &Path) -> Result<Report, Failure> {
    let th = load_theory(theory)?;
    let src = fs::read_to_string(terms).map_err(|e| Failure::input(format!("{}: {e}", terms.display())))?;
    let ts = parse_terms(&src).map_err(|e| Failure::input(format!("{}: {e}", terms.display())))?;
    let caveat = match gate(cli, "cap", &th.trs)? {
        Ok(c) => c,
        Err(refused) => return Ok(refused),
    };
    let sol = cap_solve(&th.trs, &ts, &Symbol::new(secret), &BTreeSet::new(), &options(cli)).map_err(knowledge_failure)?;
    let r = match &sol {
        Some(s) => Report::new("cap", "cap-found", HOLDS)
            .line(format!("cap: {}", s.cap))
            .line(format!("instance: {}", s.instantiate()))
            .detail("cap", s.cap.to_string())
            .detail("solution", s),
        None => Report::new("cap", "no-cap", FAILS).line(format!("{secret} cannot be built from the terms")),
    };
    Ok(heuristic(r.detail("theory", &th.name), caveat))
}

fn deduce_permutative_cmd(axioms: &str, frame: &str, t: &str, class_cap: usize) -> Result<Report, Failure> {
    let e = load_axioms(axioms)?;
    let fr = load_frame(frame)?;
    let t = ground(t)?;
    let recipe = deduce_permutative(&e, &fr.frame, &t, class_cap).map_err(|err| match err {
        PermutativeError::ClassCap { .. } => Failure::budget(err.to_string()),
        _ => Failure::input(err.to_string()),
    })?;
    let r = match recipe {
        Some(z) => Report::new("deduce-permutative", "deducible", HOLDS).line(format!("recipe: {z}")).detail("recipe", z.to_string()),
        None => Report::new("deduce-permutative", "not-deducible", FAILS),
    };
    Ok(r.detail("extra", json!({"class_cap": class_cap})))
}

fn combine_cmd(theory1: &str, theory2: Option<&str>, axioms: Option<&str>) -> Result<Report, Failure> {
    let r1 = load_theory(theory1)?;
    let r2 = theory2.map(load_theory).transpose()?;
    let e = axioms.map(load_axioms).transpose()?;
    let rep = combination_check(&r1.trs, r2.as_ref().map(|t| &t.trs), e.as_ref(), &ConvergenceBudgets::default())
        .map_err(|err| Failure::input(err.to_string()))?;
    let (v, c) = if rep.applicable { ("applicable", HOLDS) } else { ("not-applicable", FAILS) };
    let mut r = Report::new("combine-check", v, c);
    for s in &rep.shared {
        r = r.line(format!("shared {}: constructor in first {}, in second {}", s.symbol, s.constructor_in_first, s.constructor_in_second));
    }
    for p in &rep.premises {
        r = r.line(format!("premise {}: {}", p.name, p.holds));
    }
    for c in &rep.conclusions {
        r = r.line(format!("conclusion: {c}"));
    }
    Ok(r.detail("report", &rep))
}

fn forward_closure_cmd(theory: &str, bound: usize) -> Result<Report, Failure> {
    let th = load_theory(theory)?;
    let v = forward_closure_bounded(&th.trs, bound);
    let r = match &v {
        ForwardClosure::Closed { rules, iterations } => {
            let mut r = Report::new("forward-closure", "closed", HOLDS).line(format!("closed after {iterations} iterations"));
            for rule in rules {
                r = r.line(rule.to_string());
            }
            r
        }
        ForwardClosure::Unknown { rules_at_bound, bound } => Report::new("forward-closure", "unknown", UNKNOWN)
            .line(format!("{rules_at_bound} rules and still growing at bound {bound}")),
    };
    Ok(r.detail("result", &v).detail("theory", &th.name).detail("extra", json!({ "bound": bound })))
}

fn gen_mpcp(pairs: &str, alpha0: &str, beta0: &str, out: &Path, solve: Option<usize>) -> Result<Report, Failure> {
    let inst = MpcpInstance::parse(pairs, alpha0, beta0).map_err(|e| Failure::input(e.to_string()))?;
    let red = generate_reduction(&inst).map_err(|e| Failure::input(e.to_string()))?;
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let files = [
        ("mpcp.trs", print_theory("mpcp", &red.trs)),
        ("mpcp.frame", print_frame("mpcp", &red.frame)),
        ("target.txt", format!("{}\n", red.target)),
    ];
    let mut r = Report::new("gen-mpcp", "generated", HOLDS);
    for (name, body) in &files {
        let p = out.join(name);
        fs::write(&p, body).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
        r = r.line(format!("wrote {}", p.display()));
    }
    r = r.detail("target", red.target.to_string()).detail("rules", red.trs.rules().iter().map(ToString::to_string).collect::<Vec<_>>());
    if let Some(max) = solve {
        match solve_bounded(&inst, max) {
            Some(idx) => {
                let zeta = solution_recipe(&inst, &idx).map_err(|e| Failure::input(e.to_string()))?.expect("solution");
                r = r
                    .line(format!("solution {idx:?}, recipe {zeta}"))
                    .detail("solution", &idx)
                    .detail("recipe", zeta.to_string());
            }
            None => r = r.line(format!("no solution with at most {max} pairs")).detail("solution", Value::Null),
        }
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Check { theory, property, context_cap, decomposition_cap, state_cap } => {
            check(cli, theory, *property, *context_cap, *decomposition_cap, *state_cap)
        }
        Command::Normalize { theory, term } => normalize(cli, theory, term),
        Command::GembWitness { from, to, state_cap } => gemb_witness(from, to, *state_cap),
        Command::Deduce { theory, frame, term } => deduce_cmd(cli, theory, frame, term),
        Command::StaticEquiv { theory, frame1, frame2 } => static_equiv_cmd(cli, theory, frame1, frame2),
        Command::Cap { theory, secret, terms } => cap_cmd(cli, theory, secret, terms),
        Command::DeducePermutative { axioms, frame, term, class_cap } => deduce_permutative_cmd(axioms, frame, term, *class_cap),
        Command::CombineCheck { theory1, theory2, axioms } => combine_cmd(theory1, theory2.as_deref(), axioms.as_deref()),
        Command::ForwardClosure { theory, bound } => forward_closure_cmd(theory, *bound),
        Command::GenMpcp { pairs, alpha0, beta0, out, solve } => gen_mpcp(pairs, alpha0, beta0, out, *solve),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let elapsed = start.elapsed();
    let mut config = serde_json::to_value(Config {
        normalize_budget: cli.normalize_budget,
        gst_cap: cli.gst_cap,
        context_bound: cli.context_bound,
        candidate_cap: cli.candidate_cap,
        fresh_name: &cli.fresh_name,
        force: cli.force,
        extra: None,
    })
    .expect("config serializes");
    match result {
        Ok(mut r) => {
            if let Some(extra) = r.details.as_object_mut().and_then(|m| m.remove("extra")) {
                config["extra"] = extra;
            }
            if cli.json {
                let mut out = json!({"command": r.command, "verdict": r.verdict, "exit_code": r.code, "config": config});
                for (k, v) in r.details.as_object().expect("details is an object") {
                    out[k] = v.clone();
                }
                if cli.timing {
                    out["elapsed_ms"] = json!(elapsed.as_secs_f64() * 1e3);
                }
                emit(&serde_json::to_string_pretty(&out).expect("report serializes"));
            } else {
                emit(&format!("{}: {}", r.command, r.verdict));
                for l in &r.lines {
                    emit(&format!("  {l}"));
                }
                emit(&format!("  config: {config}"));
                if cli.timing {
                    emit(&format!("  elapsed: {elapsed:.2?}"));
                }
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            if cli.json {
                let out = json!({"verdict": if f.code == INPUT { "input-error" } else { "unknown" }, "error": f.message, "exit_code": f.code, "config": config});
                emit(&serde_json::to_string_pretty(&out).expect("report serializes"));
            } else {
                eprintln!("gembed: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
