//! Acceptance suite: one line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;

use gridshell::cli_io::{
    check_comparability, check_local_thinness, check_recut_invariance, check_square_zero,
    generator_tops, run, Command, FlowcatReport, Flavor, HomologyReport, LinePlacement, RunConfig,
    ShellingReport,
};
use gridshell::domains::{decompose, maslov_index, Domain};
use gridshell::homology::{minus_homology_truncated, tilde_homology};
use gridshell::states::{bigrading, enumerate_generators, maslov, GridState};
use gridshell::GridDiagram;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn corpus(max_n: usize) -> Vec<(&'static str, GridDiagram)> {
    common::corpus_up_to(max_n)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config(command: Command, grid: &str) -> RunConfig {
    RunConfig {
        json: true,
        ..RunConfig::new(command, grid)
    }
}

/// Every run whose JSON output the criteria read, keyed by a short label.
fn runs() -> Vec<(String, RunConfig)> {
    let mut out = Vec::new();
    for (name, g) in corpus(7) {
        out.push((format!("homology {name}"), config(Command::Homology, name)));
        let top = enumerate_generators(&g, 8).unwrap().iter().map(|x| maslov(&g, x)).max().unwrap();
        out.push((
            format!("homology minus {name}"),
            RunConfig {
                flavor: Flavor::Minus,
                m_floor: Some(top - 4),
                ..config(Command::Homology, name)
            },
        ));
    }
    for (name, g) in corpus(5) {
        out.push((
            format!("shelling {name} cap 4"),
            RunConfig {
                line: LinePlacement::All,
                interval_cap: 4,
                ..config(Command::Shelling, name)
            },
        ));
        if g.n() <= 4 {
            out.push((
                format!("shelling {name} cap 5"),
                RunConfig {
                    line: LinePlacement::All,
                    interval_cap: 5,
                    ..config(Command::Shelling, name)
                },
            ));
        }
        out.push((
            format!("flowcat {name}"),
            RunConfig {
                gap_cap: 4,
                ..config(Command::Flowcat, name)
            },
        ));
    }
    out.push(("verify corpus".into(), config(Command::Verify, "corpus")));
    out
}

fn run_all(threads: usize) -> BTreeMap<String, (i32, String)> {
    runs()
        .into_iter()
        .map(|(label, cfg)| {
            let o = run(&RunConfig {
                threads: Some(threads),
                ..cfg
            });
            (label, (o.code, o.stdout))
        })
        .collect()
}

fn reports<T: serde::de::DeserializeOwned>(
    outputs: &BTreeMap<String, (i32, String)>,
    prefix: &str,
) -> Result<Vec<(String, T)>, String> {
    outputs
        .iter()
        .filter(|(k, _)| k.starts_with(prefix))
        .map(|(k, (code, text))| {
            let r = serde_json::from_str(text).map_err(|e| format!("{k}: exit {code}, {e}"))?;
            Ok((k.clone(), r))
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    for (name, g) in corpus(7) {
        let top = enumerate_generators(&g, 8).unwrap().iter().map(|x| maslov(&g, x)).max().unwrap();
        let c = check_square_zero(&g, top - 4).map_err(|e| format!("{name}: {e}"))?;
        ensure(c.passed, || format!("{name}: {:?}", c.counterexample))?;
        cases += c.cases;
    }
    Ok(format!("{cases} tilde and minus sectors on 5 grids"))
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    for (name, g) in corpus(5) {
        let c = check_local_thinness(&g, &generator_tops(&g).unwrap());
        ensure(c.passed, || format!("{name}: {:?}", c.counterexample))?;
        cases += c.cases;
    }
    ensure(cases > 0, || "no length-3 intervals".into())?;
    Ok(format!("{cases} length-3 intervals, each with 2 maximal chains"))
}

fn criterion_3(outputs: &BTreeMap<String, (i32, String)>) -> Outcome {
    let rs: Vec<(String, ShellingReport)> = reports(outputs, "shelling ")?;
    let (mut checks, mut discrepancies) = (0, 0);
    for (k, r) in &rs {
        ensure(r.el_weak_failures == 0 && r.replay_failures == 0, || {
            format!("{k}: {:?}", r.first_failure)
        })?;
        ensure(r.line_positions_x2.len() == r.line_positions_x2.last().map_or(0, |p| p / 2 + 1), || {
            format!("{k}: not every placement of l")
        })?;
        checks += r.el_checks;
        discrepancies += r.weak_strict_discrepancies;
    }
    ensure(rs.len() == 6 && checks > 0, || "missing shelling runs".into())?;
    Ok(format!("{checks} interval checks over all placements of l; weak/strict discrepancies {discrepancies}"))
}

fn criterion_4(outputs: &BTreeMap<String, (i32, String)>) -> Outcome {
    let rs: Vec<(String, ShellingReport)> = reports(outputs, "shelling ")?;
    let mut checks = 0;
    for (k, r) in &rs {
        ensure(r.bjorner_failures == 0, || format!("{k}: {:?}", r.first_failure))?;
        checks += r.bjorner_checks;
    }
    ensure(checks > 0, || "no interval with two maximal chains".into())?;
    Ok(format!("{checks} induced orders are shellings"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut total, mut index_one) = (0, 0);
    while total < 10_000 {
        let n = 2 + total % 3;
        let g = common::random_knot_grid(&mut rng, n);
        let x = enumerate_generators(&g, 8).unwrap().choose(&mut rng).unwrap().clone();
        let d = common::random_positive_domain(&mut rng, &g, &x);
        total += 1;
        let parts = decompose(&g, &d).map_err(|e| format!("{e} on a positive domain"))?;
        let mu = maslov_index(&g, &d);
        ensure(parts.len() as i64 == mu, || format!("{} rectangles, index {mu}", parts.len()))?;
        let mut sum = Domain::zero(d.from.clone());
        for (rect, _) in &parts {
            ensure(rect.is_empty_for(&sum.to), || "non-empty rectangle in decomposition".into())?;
            sum = sum.then(&Domain::from_rectangle(rect, &sum.to));
        }
        ensure(sum == d, || "rectangles do not re-sum to the domain".into())?;
        if mu == 1 && d.marking_count(&g).x_counts.iter().all(|&c| c == 0) {
            index_one += 1;
            let (rect, _) = &parts[0];
            ensure(rect.is_empty_for(&d.from) && Domain::from_rectangle(rect, &d.from) == d, || {
                "index-one domain is not an empty rectangle".into()
            })?;
        }
    }
    ensure(index_one > 0, || "no index-one domains sampled".into())?;
    Ok(format!("{total} domains, {index_one} of index one"))
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    let mut grids = 0;
    for n in 2..=3 {
        for g in common::all_knot_grids(n) {
            let (lq, dc) = check_comparability(&g, &g, 4, 1).map_err(|e| e.to_string())?;
            ensure(lq.passed && dc.passed, || format!("{lq:?} {dc:?}"))?;
            cases += lq.cases;
            grids += 1;
        }
    }
    Ok(format!("{cases} pairs on {grids} grids"))
}

fn criterion_7() -> Outcome {
    let mut grids: Vec<GridDiagram> = corpus(5).into_iter().map(|(_, g)| g).collect();
    grids.extend(common::all_knot_grids(3));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [4, 4, 5, 5] {
        grids.push(common::random_knot_grid(&mut rng, n));
    }
    let mut gens = 0;
    for g in &grids {
        let c = check_recut_invariance(g).map_err(|e| e.to_string())?;
        ensure(c.passed, || format!("{:?}", c.counterexample))?;
        for x in enumerate_generators(g, 8).unwrap() {
            let (m, a) = common::j_route(g, &x);
            ensure(m.is_integer() && a.is_integer(), || format!("{x}: M={m} A={a}"))?;
            let s = GridState::bare(x.clone());
            let b0 = bigrading(g, &s);
            ensure(b0.maslov == m.to_integer() && b0.alexander == a.to_integer(), || format!("{x}"))?;
            for slot in 0..g.n() {
                let b1 = bigrading(g, &s.times_u(slot));
                ensure(b1.maslov == b0.maslov - 2 && b1.alexander == b0.alexander - 1, || {
                    format!("U{} on {x}", slot + 1)
                })?;
            }
            gens += 1;
        }
    }
    Ok(format!("{gens} generators on {} grids", grids.len()))
}

fn criterion_8(outputs: &BTreeMap<String, (i32, String)>) -> Outcome {
    let total = |name: &str| -> Result<usize, String> {
        let (_, text) = outputs.get(&format!("homology {name}")).ok_or("missing run")?;
        let r: HomologyReport = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Ok(r.dims.total())
    };
    let want = [("unknot-2", 2), ("unknot-3", 4), ("trefoil-5a", 48), ("trefoil-5b", 48)];
    for (name, t) in want {
        let got = total(name)?;
        ensure(got == t, || format!("{name}: total {got}, expected {t}"))?;
    }
    let a = tilde_homology(&gridshell::corpus::corpus_grid("trefoil-5a").unwrap().unwrap(), 8).unwrap();
    let b = tilde_homology(&gridshell::corpus::corpus_grid("trefoil-5b").unwrap().unwrap(), 8).unwrap();
    ensure(a == b, || "trefoil presentations disagree".into())?;
    let u = gridshell::corpus::corpus_grid("unknot-2").unwrap().unwrap();
    for s in 0..=2 {
        let (dims, valid) = minus_homology_truncated(&u, -s, -6).map_err(|e| e.to_string())?;
        ensure(-2 * s >= valid && dims.get(-2 * s, -s) == 1, || format!("tower at A={}", -s))?;
    }
    Ok("totals 2, 4, 48, 48; trefoils agree; tower at (0,0), (-2,-1), (-4,-2)".into())
}

fn criterion_9(outputs: &BTreeMap<String, (i32, String)>) -> Outcome {
    let rs: Vec<(String, FlowcatReport)> = reports(outputs, "flowcat ")?;
    let (mut spaces, mut middles) = (0, 0);
    for (k, r) in &rs {
        ensure(r.failures() == 0 && r.unknown() == 0, || format!("{k}: {:?}", r.first_failure))?;
        ensure(r.verdicts.get("Ball") == Some(&r.morphism_spaces), || format!("{k}: {:?}", r.verdicts))?;
        spaces += r.morphism_spaces;
        middles += r.composition_middles;
    }
    ensure(rs.len() == 4 && spaces > 0, || "missing flowcat runs".into())?;
    Ok(format!("{spaces} morphism spaces are balls, {middles} compositions checked"))
}

fn criterion_10(one: &BTreeMap<String, (i32, String)>, four: &BTreeMap<String, (i32, String)>) -> Outcome {
    for (k, v) in one {
        ensure(four.get(k) == Some(v), || format!("{k} differs between 1 and 4 threads"))?;
        ensure(v.0 == 0, || format!("{k} exited {}", v.0))?;
    }
    Ok(format!("{} reports byte-identical", one.len()))
}

fn main() -> ExitCode {
    let four = run_all(4);
    let one = run_all(1);
    let results: Vec<Outcome> = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(&four),
        criterion_4(&four),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(&four),
        criterion_9(&four),
        criterion_10(&one, &four),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {}: PASS {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
