//! Executes a scenario's tasks and assembles the run report.
//!
//! Every task draws its randomness from a ChaCha stream seeded by the
//! scenario seed and the task name, so reports are byte-identical across
//! runs and independent of task scheduling. `--parallel` runs tasks on
//! scoped threads; the report is always assembled in declaration order.

use crate::embed::{build_embedding, randomness_evidence, verify_embedding, SchemeKind};
use crate::error::{Error, Result};
use crate::lang::{Formula, PredicateId, PropertyId, StateId};
use crate::measurement::{check_procedure_independence, mean_conditional};
use crate::prob::FiniteProbabilitySpace;
use crate::qstruct::{
    classical_conditioning_failure_witness, classical_family, is_generalized_probability_measure,
    OrthoLattice, PropertySpace, StateProbabilityFamily,
};
use crate::quantum::{
    born, default_state_sample, lueders, max_abs, ordering_family_check, proj_join,
    quantum_conditional_paths, Projector, ZERO_BRANCH_TOL,
};
use crate::rational::{self, format_rational, Rational};
use crate::report::{CsvTable, Report, TaskReport, REPORT_SCHEMA_VERSION, TOOL_NAME};
use crate::scenario::{Scenario, TaskKind, Tolerances};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub seed_override: Option<u64>,
    /// Overrides both tolerances when set.
    pub tolerance_override: Option<f64>,
    /// Empty means "run every task the scenario lists".
    pub task_filter: Vec<TaskKind>,
    pub parallel: bool,
    pub trials_override: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub tables: Vec<CsvTable>,
}

struct TaskOutput {
    pass: bool,
    detail: Value,
    tables: Vec<CsvTable>,
}

pub fn run_scenario(sc: &Scenario, cfg: &RunConfig) -> Result<RunOutcome> {
    let seed = cfg.seed_override.unwrap_or(sc.seed);
    let trials = cfg.trials_override.unwrap_or(sc.trials);
    let tolerances = match cfg.tolerance_override {
        Some(t) => Tolerances {
            float_abs: t,
            verify: t,
        },
        None => sc.tolerances,
    };
    let tasks: Vec<TaskKind> = sc
        .tasks
        .iter()
        .copied()
        .filter(|t| cfg.task_filter.is_empty() || cfg.task_filter.contains(t))
        .collect();
    if tasks.is_empty() {
        return Err(Error::Scenario(
            "the task filter removed every task".into(),
        ));
    }

    let execute_one = |task: TaskKind| -> (TaskReport, Vec<CsvTable>) {
        match execute(task, sc, seed, tolerances, trials) {
            Ok(out) => (
                TaskReport {
                    task: task.name().into(),
                    pass: out.pass,
                    detail: out.detail,
                },
                out.tables,
            ),
            Err(e) => (run_error_report(task, e), Vec::new()),
        }
    };

    // report order follows the scenario's declaration order either way
    let results: Vec<(TaskReport, Vec<CsvTable>)> = if cfg.parallel {
        let execute_one = &execute_one;
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks
                .iter()
                .map(|&task| scope.spawn(move || execute_one(task)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("task thread"))
                .collect()
        })
    } else {
        tasks.iter().map(|&t| execute_one(t)).collect()
    };
    let mut reports: Vec<TaskReport> = Vec::with_capacity(tasks.len());
    let mut tables: Vec<CsvTable> = Vec::new();
    for (report, mut task_tables) in results {
        reports.push(report);
        tables.append(&mut task_tables);
    }

    let pass = reports.iter().all(|t| t.pass);
    Ok(RunOutcome {
        report: Report {
            tool: TOOL_NAME,
            version: crate::report::tool_version(),
            schema: REPORT_SCHEMA_VERSION,
            scenario: sc.name.clone(),
            seed,
            tolerances: tolerances.into(),
            tasks: reports,
            pass,
        },
        tables,
    })
}

fn run_error_report(task: TaskKind, e: Error) -> TaskReport {
    TaskReport {
        task: task.name().into(),
        pass: false,
        detail: json!({ "error": e.to_string() }),
    }
}

fn task_rng(seed: u64, task: TaskKind) -> ChaCha8Rng {
    // FNV-1a over the task name, folded into the scenario seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in task.name().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn execute(
    task: TaskKind,
    sc: &Scenario,
    seed: u64,
    tolerances: Tolerances,
    trials: usize,
) -> Result<TaskOutput> {
    match task {
        TaskKind::CheckModel => check_model(sc, seed, trials),
        TaskKind::MeanProb => mean_prob(sc),
        TaskKind::Born => born_task(sc, tolerances),
        TaskKind::Embed => embed_task(sc),
        TaskKind::Verify => verify_task(sc, tolerances),
        TaskKind::WitnessNonclassicality => witness_task(sc, tolerances),
        TaskKind::LatticeReport => lattice_report(sc, seed, tolerances),
    }
}

fn kolmogorov_json(space: &FiniteProbabilitySpace, trials: usize, rng: &mut ChaCha8Rng) -> (bool, Value) {
    let report = space.check_kolmogorov(trials, rng);
    let detail = json!({
        "pass": report.pass(),
        "trials": report.trials,
        "points": space.len(),
        "normalization_deficit": report.normalization_deficit.as_ref().map(format_rational),
        "negative_points": report.negative_points,
        "additivity_violations": report.additivity_violations.len(),
    });
    (report.pass(), detail)
}

fn check_model(sc: &Scenario, seed: u64, trials: usize) -> Result<TaskOutput> {
    let s = sc.structure.as_ref().expect("validated at load");
    let mut rng = task_rng(seed, TaskKind::CheckModel);
    let mut pass = true;

    let (xi_ok, xi_detail) = kolmogorov_json(s.xi(), trials, &mut rng);
    pass &= xi_ok;

    let mut context_spaces = Vec::new();
    if let Some(reg) = &sc.registry {
        for proc in reg.procedures() {
            let (ok, detail) = kolmogorov_json(proc.contexts(), trials, &mut rng);
            pass &= ok;
            context_spaces.push(json!({ "procedure": proc.id().to_string(), "report": detail }));
        }
    }

    // the conditional measure induced by each positive predicate atom
    let mut conditional_checks = Vec::new();
    let preds: Vec<PredicateId> = s.model().predicates().map(|(p, _)| p.clone()).collect();
    for pred in preds {
        let beta = Formula::Atom(pred.clone());
        if !s.is_positive(&beta)? {
            continue;
        }
        let report = s.check_conditional_measure(&beta, trials, &mut rng)?;
        pass &= report.pass();
        conditional_checks.push(json!({
            "given": beta.to_string(),
            "pass": report.pass(),
            "trials": report.trials,
            "certainty_failures": report.certainty_failures.len(),
            "additivity_failures": report.additivity_failures.len(),
            "inclusion_exclusion_failures": report.inclusion_exclusion_failures.len(),
        }));
    }

    // injectivity of the extension map is diagnostic only: generated models
    // legitimately repeat extensions across contexts
    let injectivity: Vec<String> = s
        .model()
        .injectivity_violations()
        .into_iter()
        .map(|(a, b)| format!("{a} and {b} share an extension"))
        .collect();

    Ok(TaskOutput {
        pass,
        detail: json!({
            "xi": xi_detail,
            "context_spaces": context_spaces,
            "conditional_measures": conditional_checks,
            "injectivity_warnings": injectivity,
        }),
        tables: Vec::new(),
    })
}

fn mean_prob(sc: &Scenario) -> Result<TaskOutput> {
    let s = sc.structure.as_ref().expect("validated at load");
    let reg = sc.registry.as_ref().expect("validated at load");
    let mut pass = true;
    let mut rows_json = Vec::new();
    let mut rows_csv = Vec::new();
    for spec in &sc.mean_prob {
        let independence =
            check_procedure_independence(s, reg, &spec.a, &spec.b, Rational::zero())?;
        pass &= independence.pass();
        let chosen = match &spec.procedure {
            Some(m) => Some((m.clone(), mean_conditional(s, reg, &spec.a, &spec.b, m)?)),
            None => independence
                .means
                .first()
                .map(|pm| (pm.procedure.clone(), pm.mean.clone())),
        };
        let (proc_name, mean) = match chosen {
            Some((m, v)) => (m.to_string(), v),
            None => {
                return Err(Error::Scenario(format!(
                    "no admissible procedure for {} given {}",
                    spec.a, spec.b
                )))
            }
        };
        rows_csv.push(vec![
            spec.a.to_string(),
            spec.b.to_string(),
            proc_name.clone(),
            format_rational(&mean),
        ]);
        rows_json.push(json!({
            "a": spec.a.to_string(),
            "b": spec.b.to_string(),
            "procedure": proc_name,
            "mean": format_rational(&mean),
            "procedure_means": independence
                .means
                .iter()
                .map(|pm| json!({
                    "procedure": pm.procedure.to_string(),
                    "mean": format_rational(&pm.mean),
                }))
                .collect::<Vec<_>>(),
            "max_pairwise_deviation": format_rational(&independence.max_deviation),
            "independent": independence.pass(),
        }));
    }
    Ok(TaskOutput {
        pass,
        detail: json!({ "queries": rows_json }),
        tables: vec![CsvTable {
            name: "mean-prob".into(),
            header: vec!["a".into(), "b".into(), "procedure".into(), "mean".into()],
            rows: rows_csv,
        }],
    })
}

fn born_task(sc: &Scenario, tolerances: Tolerances) -> Result<TaskOutput> {
    let q = sc.quantum.as_ref().expect("validated at load");
    let tol = tolerances.float_abs;
    let mut pass = true;
    let mut csv_rows = Vec::new();
    let mut born_rows = Vec::new();
    let identity = Projector::identity(q.dim())?;

    for (s, rho) in q.states() {
        // normalization against the full projector
        let total = born(rho, &identity)?;
        if (total - 1.0).abs() > tol {
            pass = false;
        }
        for (e, p) in q.properties() {
            let value = born(rho, p)?;
            csv_rows.push(vec![s.to_string(), e.to_string(), format!("{value}")]);
            born_rows.push(json!({
                "state": s.to_string(),
                "property": e.to_string(),
                "born": value,
            }));
        }
    }

    // additivity over orthogonal property pairs, against the join projector
    let props: Vec<(&PropertyId, &Projector)> = q.properties().collect();
    let mut additivity_failures = Vec::new();
    for (i, (pi, pp)) in props.iter().enumerate() {
        for (qi, qp) in props.iter().skip(i + 1) {
            if max_abs(&(pp.matrix() * qp.matrix())) > tol {
                continue;
            }
            let joined = proj_join(pp, qp)?;
            for (s, rho) in q.states() {
                let lhs = born(rho, &joined)?;
                let rhs = born(rho, pp)? + born(rho, qp)?;
                if (lhs - rhs).abs() > tol {
                    pass = false;
                    additivity_failures.push(json!({
                        "state": s.to_string(),
                        "pair": [pi.to_string(), qi.to_string()],
                        "join": lhs,
                        "sum": rhs,
                    }));
                }
            }
        }
    }

    // update invariants and two-path consistency on every admissible triple
    let mut update_failures = Vec::new();
    for (s, rho) in q.states() {
        for (f_name, f) in q.properties() {
            if born(rho, f)? <= ZERO_BRANCH_TOL {
                continue;
            }
            let updated = lueders(rho, f)?;
            let repeat = born(&updated, f)?;
            if (repeat - 1.0).abs() > tol {
                pass = false;
                update_failures.push(json!({
                    "state": s.to_string(),
                    "property": f_name.to_string(),
                    "repeat_probability": repeat,
                }));
            }
            for (e_name, e) in q.properties() {
                let (by_trace, by_update) = quantum_conditional_paths(rho, e, f)?;
                if (by_trace - by_update).abs() > tol {
                    pass = false;
                    update_failures.push(json!({
                        "state": s.to_string(),
                        "after": f_name.to_string(),
                        "property": e_name.to_string(),
                        "by_trace": by_trace,
                        "by_update": by_update,
                    }));
                }
            }
        }
    }

    Ok(TaskOutput {
        pass,
        detail: json!({
            "dim": q.dim(),
            "values": born_rows,
            "additivity_failures": additivity_failures,
            "update_failures": update_failures,
        }),
        tables: vec![CsvTable {
            name: "born".into(),
            header: vec!["state".into(), "property".into(), "born".into()],
            rows: csv_rows,
        }],
    })
}

fn embed_task(sc: &Scenario) -> Result<TaskOutput> {
    let q = sc.quantum.as_ref().expect("validated at load");
    let spec = sc.embedding.as_ref().expect("validated at load");
    let e = build_embedding(q, &spec.groups, spec.scheme, spec.state_weights.as_ref())?;
    let fallbacks: Vec<Value> = e
        .fallbacks()
        .iter()
        .map(|f| {
            json!({
                "state": f.state.to_string(),
                "property": f.property.to_string(),
                "born": f.born_value,
                "approximated": format_rational(&f.approximated),
                "bias": f.bias,
            })
        })
        .collect();
    Ok(TaskOutput {
        pass: true,
        detail: json!({
            "scheme": spec.scheme.kind.name(),
            "contexts_per_procedure": spec.scheme.context_count,
            "resolution": spec.scheme.resolution,
            "universe_points": e.structure().model().universe_len(),
            "procedures": e.registry().procedures().count(),
            "fallbacks": fallbacks,
        }),
        tables: Vec::new(),
    })
}

fn verify_task(sc: &Scenario, tolerances: Tolerances) -> Result<TaskOutput> {
    let q = sc.quantum.as_ref().expect("validated at load");
    let spec = sc.embedding.as_ref().expect("validated at load");
    let e = build_embedding(q, &spec.groups, spec.scheme, spec.state_weights.as_ref())?;
    let report = verify_embedding(&e, tolerances.verify)?;
    let mut pass = report.pass();

    let evidence = randomness_evidence(&e)?;
    if spec.scheme.kind == SchemeKind::Hybrid && !evidence.both_sources_active() {
        pass = false;
    }

    let csv_rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.state.to_string(),
                r.property.to_string(),
                format_rational(&r.classical_mean),
                format!("{}", r.born_value),
                format!("{}", rational::to_f64(&r.deviation)),
            ]
        })
        .collect();
    let rows_json: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "state": r.state.to_string(),
                "property": r.property.to_string(),
                "classical_mean": format_rational(&r.classical_mean),
                "born": r.born_value,
                "deviation": rational::to_f64(&r.deviation),
            })
        })
        .collect();

    Ok(TaskOutput {
        pass,
        detail: json!({
            "rows": rows_json,
            "max_deviation": report.max_deviation,
            "exact": report.exact,
            "tolerance": report.tolerance,
            "fallbacks": report.fallback_count,
            "compatibility_violations": report
                .compatibility_violations
                .iter()
                .map(|(a, b)| format!("{a} k {b} without commutation"))
                .collect::<Vec<_>>(),
            "independence_failures": report
                .independence_failures
                .iter()
                .map(|(p, s, d)| format!("property {p} state {s}: deviation {d}"))
                .collect::<Vec<_>>(),
            "interior_conditional": evidence
                .interior_conditional
                .as_ref()
                .map(|(s, p, c)| format!("{s} / {p} @ {c}")),
            "context_variation": evidence
                .context_variation
                .as_ref()
                .map(|(s, p, c1, c2)| format!("{s} / {p} across {c1} vs {c2}")),
        }),
        tables: vec![CsvTable {
            name: "verify".into(),
            header: vec![
                "state".into(),
                "property".into(),
                "classical_mean".into(),
                "born".into(),
                "deviation".into(),
            ],
            rows: csv_rows,
        }],
    })
}

/// Lattice and family sources shared by the witness and lattice tasks:
/// quantum fixtures yield a float family over the projector lattice,
/// classical fixtures an exact family over the declared lattice.
enum LatticeFamily {
    Float(OrthoLattice, StateProbabilityFamily<f64>),
    Exact(OrthoLattice, StateProbabilityFamily<Rational>),
}

fn lattice_family(sc: &Scenario) -> Result<LatticeFamily> {
    if let Some(q) = &sc.quantum {
        let lattice = match &sc.lattice {
            Some(l) => l.clone(),
            None => q.projector_lattice()?,
        };
        return Ok(LatticeFamily::Float(lattice, q.born_family()?));
    }
    let lattice = sc
        .lattice
        .clone()
        .ok_or_else(|| Error::Scenario("no lattice fixture available".into()))?;
    let s = sc
        .structure
        .as_ref()
        .ok_or_else(|| Error::Scenario("no model to derive a family from".into()))?;
    let reg = sc
        .registry
        .as_ref()
        .ok_or_else(|| Error::Scenario("no registry to derive a family from".into()))?;
    let states: Vec<StateId> = s
        .model()
        .predicates()
        .filter_map(|(p, _)| match p {
            PredicateId::State(st) => Some(st.clone()),
            PredicateId::Property(_, _) => None,
        })
        .collect();
    let space = PropertySpace::new(lattice.elements().to_vec(), states);
    let family = classical_family(s, reg, &space)?;
    Ok(LatticeFamily::Exact(lattice, family))
}

fn witness_task(sc: &Scenario, tolerances: Tolerances) -> Result<TaskOutput> {
    let spec = sc.witness.as_ref().expect("validated at load");
    let (found, detail) = match lattice_family(sc)? {
        LatticeFamily::Float(lattice, family) => {
            let witness = classical_conditioning_failure_witness(
                &lattice,
                &family,
                &spec.state,
                &spec.conditioning,
                &tolerances.float_abs,
            )?;
            match witness {
                Some(w) => (
                    true,
                    json!({
                        "pair": [w.e1.to_string(), w.e2.to_string()],
                        "left": w.left,
                        "right": w.right,
                    }),
                ),
                None => (false, Value::Null),
            }
        }
        LatticeFamily::Exact(lattice, family) => {
            let witness = classical_conditioning_failure_witness(
                &lattice,
                &family,
                &spec.state,
                &spec.conditioning,
                &Rational::zero(),
            )?;
            match witness {
                Some(w) => (
                    true,
                    json!({
                        "pair": [w.e1.to_string(), w.e2.to_string()],
                        "left": format_rational(&w.left),
                        "right": format_rational(&w.right),
                    }),
                ),
                None => (false, Value::Null),
            }
        }
    };
    Ok(TaskOutput {
        pass: found == spec.expect_found,
        detail: json!({
            "state": spec.state.to_string(),
            "conditioning": spec.conditioning.to_string(),
            "expected": if spec.expect_found { "found" } else { "none" },
            "found": found,
            "witness": detail,
        }),
        tables: Vec::new(),
    })
}

fn lattice_report(sc: &Scenario, seed: u64, tolerances: Tolerances) -> Result<TaskOutput> {
    let mut pass = true;
    let (laws, distributive, gpm, ordering) = match lattice_family(sc)? {
        LatticeFamily::Float(lattice, family) => {
            let laws = lattice.validate();
            pass &= laws.pass();
            let mut gpm_rows = Vec::new();
            for state in family.states() {
                let report = is_generalized_probability_measure(
                    &lattice,
                    &family,
                    &state,
                    &tolerances.float_abs,
                )?;
                pass &= report.pass();
                gpm_rows.push(json!({
                    "state": state.to_string(),
                    "pass": report.pass(),
                    "families_checked": report.families_checked,
                    "normalization_failure": report.normalization_failure,
                    "additivity_violations": report
                        .additivity_violations
                        .iter()
                        .map(|v| json!({
                            "family": v.family,
                            "join": v.join_value,
                            "sum": v.summed_value,
                        }))
                        .collect::<Vec<_>>(),
                }));
            }
            let ordering = match &sc.quantum {
                Some(q) => {
                    let sample = default_state_sample(q, seed)?;
                    let report = ordering_family_check(q, &sample)?;
                    pass &= report.pass();
                    json!({
                        "pairs_checked": report.pairs_checked,
                        "sample_size": report.sample_size,
                        "low_confidence": report.low_confidence,
                        "counterexamples": report
                            .counterexamples
                            .iter()
                            .map(|c| json!({
                                "p": c.p.to_string(),
                                "q": c.q.to_string(),
                                "projector_order": c.projector_order,
                                "separating_state": c.separating_state,
                            }))
                            .collect::<Vec<_>>(),
                    })
                }
                None => Value::Null,
            };
            (laws, lattice.is_distributive(), gpm_rows, ordering)
        }
        LatticeFamily::Exact(lattice, family) => {
            let laws = lattice.validate();
            pass &= laws.pass();
            let mut gpm_rows = Vec::new();
            for state in family.states() {
                let report = is_generalized_probability_measure(
                    &lattice,
                    &family,
                    &state,
                    &Rational::zero(),
                )?;
                pass &= report.pass();
                gpm_rows.push(json!({
                    "state": state.to_string(),
                    "pass": report.pass(),
                    "families_checked": report.families_checked,
                    "normalization_failure": report.normalization_failure,
                    "additivity_violations": report
                        .additivity_violations
                        .iter()
                        .map(|v| json!({
                            "family": v.family,
                            "join": v.join_value,
                            "sum": v.summed_value,
                        }))
                        .collect::<Vec<_>>(),
                }));
            }
            (laws, lattice.is_distributive(), gpm_rows, Value::Null)
        }
    };

    Ok(TaskOutput {
        pass,
        detail: json!({
            "laws_pass": laws.pass(),
            "law_violations": laws.violations,
            "distributive": distributive,
            "generalized_measures": gpm,
            "ordering_family": ordering,
        }),
        tables: Vec::new(),
    })
}
