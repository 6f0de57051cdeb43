//! Acceptance criteria 1-8. Each criterion prints one PASS/FAIL line; the
//! target exits non-zero if any criterion fails. It has its own `main` so the
//! lines are never captured.

use std::collections::BTreeMap;
use std::time::Instant;

use carve_core::batch;
use carve_core::canonical::{hash, structural_equal};
use carve_core::diagram::{
    ChordId, CuspStyle, Decoration, HandleKind, Presentation, TopoType,
};
use carve_core::fixtures;
use carve_core::invariants::{
    census, check_carve_shape, detect_loose, LooseRule, Looseness,
};
use carve_core::morse::{perturb_chord, CriticalPoint, MooreSpaceSpec};
use carve_core::moves::{self, MoveError};
use carve_core::pipelines::{carve, construct_ploose, CarveInput};
use carve_core::random;
use carve_core::trace::{replay, replay_with, MoveTrace, StandardRules};
use carve_core::validate::validate;
use carve_core::Rational;
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_inputs() -> Vec<CarveInput> {
    let mut rng = random::rng(0x7e02);
    (0..200).map(|_| random::carve_input(&mut rng)).collect()
}

fn criterion_1(traces: &mut Vec<MoveTrace>) -> Outcome {
    let inputs = random_inputs();
    let mut chords = 0;
    for (i, (input, report)) in inputs.iter().zip(batch::carve_all(&inputs)).enumerate() {
        let report = report.map_err(|e| format!("input {i}: carve failed: {e}"))?;
        let n = input.presentation.n();
        let expected: BTreeMap<u32, i64> =
            (0..=n).map(|k| (k, i64::from(k + 1 == n))).collect();
        ensure(report.stats.handle_delta == expected, || {
            format!("input {i}: handle delta {:?}", report.stats.handle_delta)
        })?;
        check_carve_shape(&input.presentation, &report.result, &report.stats.attaching_correspondence)
            .map_err(|e| format!("input {i}: {e}"))?;
        let before = census(&input.presentation);
        let after = census(&report.result);
        ensure(after.euler - before.euler == if (n - 1) % 2 == 0 { 1 } else { -1 }, || {
            format!("input {i}: euler shift")
        })?;
        ensure(validate(&report.result).is_empty(), || format!("input {i}: result invalid"))?;
        chords += input.presentation.chords.len();
        traces.push(report.trace);
    }
    Ok(format!("200 inputs, {chords} chords, delta {{n-1: +1}} and bijection on all"))
}

fn criterion_2(traces: &mut Vec<MoveTrace>) -> Outcome {
    for n in 3..=5 {
        let r = carve(&fixtures::ex1(n)).map_err(|e| e.to_string())?;
        ensure(r.stats.boat_count == 0 && r.stats.slide_count == 1, || {
            format!("n={n}: {} boats, {} slides", r.stats.boat_count, r.stats.slide_count)
        })?;
        ensure(structural_equal(&r.result, &fixtures::ex1_result(n)), || {
            format!("n={n}: result differs from hand-encoded golden")
        })?;
        let l = fixtures::lambda(&r.result);
        ensure(detect_loose(&r.result, l) == Looseness::Unknown, || {
            format!("n={n}: lambda flagged loose")
        })?;
        traces.push(r.trace);
    }
    Ok("0 boats, 1 slide, golden match for n = 3, 4, 5".into())
}

fn criterion_3(traces: &mut Vec<MoveTrace>) -> Outcome {
    let mut cases = 0;
    for n in 3..=5 {
        for k in 1..n {
            let r = carve(&fixtures::ex3(n, k)).map_err(|e| e.to_string())?;
            ensure(r.stats.boat_count == 1 && r.stats.slide_count == 2, || {
                format!("n={n} k={k}: {} boats, {} slides", r.stats.boat_count, r.stats.slide_count)
            })?;
            let extra = r
                .result
                .handles
                .values()
                .find(|h| h.index + 1 == n && h.kind == HandleKind::Subcritical)
                .map(|h| h.id)
                .ok_or("no new handle")?;
            let lambda = fixtures::lambda(&r.result);
            let mut seen = Vec::new();
            replay_with(&r.trace, &StandardRules, |_, pre, post| {
                let before = pre.legendrians.get(&lambda).map(|l| l.passes(extra));
                let after = post.legendrians.get(&lambda).map(|l| l.passes(extra));
                if before != after {
                    seen.push(after.unwrap_or(0));
                }
            })
            .map_err(|e| e.to_string())?;
            ensure(seen == vec![1, 2, 3, 1], || format!("n={n} k={k}: pass counts {seen:?}"))?;
            ensure(r.trace.count("cusp_pass_over_handle") == 1, || "no cusp pass".into())?;
            moves::cancel_handle_legendrian(&r.result, extra, lambda)
                .map_err(|e| format!("n={n} k={k}: not cancellable: {e}"))?;
            let verdict = detect_loose(&r.result, lambda);
            ensure(verdict == Looseness::Loose(LooseRule::L3), || {
                format!("n={n} k={k}: verdict {verdict}")
            })?;
            traces.push(r.trace);
            cases += 1;
        }
    }
    Ok(format!("{cases} cases: 1 boat, 2 slides, passes 3 -> 1, cancellable, Loose(L3)"))
}

fn criterion_4(traces: &mut Vec<MoveTrace>) -> Outcome {
    for n in [3, 5] {
        for p in [0, 1, 2, 5] {
            let r = construct_ploose(&MooreSpaceSpec::single(p), n).map_err(|e| e.to_string())?;
            let ctx = format!("p={p} n={n}");
            ensure(r.result.legendrians.len() == 1, || format!("{ctx}: {} Legendrians", r.result.legendrians.len()))?;
            let (id, l) = r.result.legendrians.iter().next().expect("one");
            ensure(l.topo_type == TopoType::ConnectSumOfUnknots { components: 4 }, || {
                format!("{ctx}: topology {:?}", l.topo_type)
            })?;
            let ring_sites: Vec<_> = l
                .decorations
                .iter()
                .filter_map(|d| match d {
                    Decoration::CuspConnectSum { style: CuspStyle::CuspRing, site: Some(s), .. } => Some(s),
                    _ => None,
                })
                .collect();
            ensure(ring_sites.len() == 3 && r.stats.boat_sites.len() == 3, || {
                format!("{ctx}: {} connect-sum sites, {} boat sites", ring_sites.len(), r.stats.boat_sites.len())
            })?;
            ensure(census(&r.result).counts == BTreeMap::from([(0, 1)]), || format!("{ctx}: census"))?;
            let verdict = detect_loose(&r.result, *id);
            if p == 0 {
                ensure(verdict.is_loose(), || format!("{ctx}: verdict {verdict}"))?;
            }
            traces.push(r.trace);
        }
    }
    Ok("8 runs: one Legendrian, 4 unknot components, 3 sites; p = 0 loose".into())
}

fn criterion_5() -> Outcome {
    let mut rng = random::rng(0x5eed);
    let (mut boats, mut slides, mut rejected) = (0usize, 0usize, 0usize);
    for case in 0..10_000 {
        let (mut p, _, _) = random::slide_scene(&mut rng);
        for _ in 0..rng.gen_range(1..=6) {
            let Some(id) = p.chords.keys().copied().nth(rng.gen_range(0..p.chords.len().max(1))) else {
                break;
            };
            let c = p.chords[&id].clone();
            let before = p.clone();
            if rng.gen_bool(0.5) {
                match moves::boat_move(&p, id) {
                    Ok(q) => {
                        ensure(q.chords.len() == p.chords.len(), || format!("case {case}: boat changed chord count"))?;
                        ensure(q.chords[&id].local_index == 0 && q.chords[&id].grading == c.grading, || {
                            format!("case {case}: boat result")
                        })?;
                        boats += 1;
                        p = q;
                    }
                    Err(MoveError::AlreadyMaximum(_)) => {
                        ensure(c.local_index == 0, || format!("case {case}: spurious AlreadyMaximum"))?
                    }
                    Err(e) => return Err(format!("case {case}: boat failed: {e}")),
                }
            } else {
                match moves::handleslide_minus(&p, id) {
                    Ok(q) => {
                        ensure(c.local_index == 0, || format!("case {case}: slide at index {}", c.local_index))?;
                        ensure(q.chords.len() + 1 == p.chords.len(), || format!("case {case}: slide chord count"))?;
                        ensure(
                            q.chords.iter().all(|(k, v)| p.chords.get(k) == Some(v)),
                            || format!("case {case}: slide created or changed a chord"),
                        )?;
                        slides += 1;
                        p = q;
                    }
                    Err(e) => {
                        if c.local_index != 0 {
                            ensure(matches!(e, MoveError::NotMaximum { .. }) || matches!(e, MoveError::DegenerateChord(_)), || {
                                format!("case {case}: non-maximum slide rejected with {e}")
                            })?;
                        }
                        rejected += 1;
                    }
                }
            }
            ensure(before.chords.len() >= p.chords.len(), || format!("case {case}: chord count grew"))?;
        }
    }
    Ok(format!("10000 cases: {boats} boats, {slides} slides, {rejected} rejections, no violations"))
}

fn criterion_6(traces: &[MoveTrace]) -> Outcome {
    for (i, result) in batch::check_all(traces).into_iter().enumerate() {
        let v = result.map_err(|e| format!("trace {i}: {e}"))?;
        ensure(v.is_empty(), || format!("trace {i}: {}", v[0]))?;
    }
    Ok(format!("{} traces, no grading changes", traces.len()))
}

fn criterion_7(traces: &[MoveTrace]) -> Outcome {
    let first = batch::replay_all(traces);
    let second = batch::replay_seq(traces);
    for (i, ((a, b), t)) in first.into_iter().zip(second).zip(traces).enumerate() {
        let a = a.map_err(|e| format!("trace {i}: {e}"))?;
        let b = b.map_err(|e| format!("trace {i}: {e}"))?;
        ensure(a == b && a == t.final_hash(), || format!("trace {i}: hashes {a} {b} {}", t.final_hash()))?;
    }
    // Independent pipeline runs emit byte-identical traces.
    let inputs = random_inputs();
    for (i, input) in inputs.iter().take(50).enumerate() {
        let x = serde_json::to_string(&carve(input).map_err(|e| e.to_string())?.trace).unwrap();
        let y = serde_json::to_string(&carve(input).map_err(|e| e.to_string())?.trace).unwrap();
        ensure(x == y, || format!("input {i}: traces differ between runs"))?;
    }
    let a = construct_ploose(&MooreSpaceSpec::single(2), 5).map_err(|e| e.to_string())?;
    let b = construct_ploose(&MooreSpaceSpec::single(2), 5).map_err(|e| e.to_string())?;
    ensure(a.trace == b.trace && hash(&replay(&a.trace).map_err(|e| e.to_string())?) == b.trace.final_hash(), || {
        "ploose traces differ".into()
    })?;
    Ok(format!("{} traces replay to recorded final hash twice", traces.len()))
}

fn criterion_8() -> Outcome {
    let mut rng = random::rng(0x8);
    let mut cases = 0;
    while cases < 1000 {
        let p: Presentation = random::carve_input(&mut rng).presentation;
        let Some(id) = p.chords.keys().copied().nth(rng.gen_range(0..p.chords.len().max(1))) else {
            continue;
        };
        let mut p = p;
        p.chords.get_mut(&id).expect("present").degenerate = true;
        let m = p.legendrians[&p.chords[&id].from].dim;
        let k = rng.gen_range(1..=4usize);
        let resolution: Vec<CriticalPoint> = (0..k)
            .map(|_| CriticalPoint::new(rng.gen_range(0..=m), Rational::new(rng.gen_range(-20..20), rng.gen_range(1..4))))
            .collect();
        let q = perturb_chord(&p, id, &resolution).map_err(|e| format!("case {cases}: {e}"))?;
        ensure(q.chords.len() as i64 - p.chords.len() as i64 == k as i64 - 1, || {
            format!("case {cases}: count changed by {}", q.chords.len() as i64 - p.chords.len() as i64)
        })?;
        ensure(!q.chords.contains_key(&id) && q.chords.values().all(|c| !c.degenerate), || {
            format!("case {cases}: degenerate chord remains")
        })?;
        let old = p.chords[&id].length;
        let fresh: Vec<_> = q.chords.values().filter(|c| !p.chords.contains_key(&c.id)).collect();
        ensure(fresh.len() == k, || format!("case {cases}: {} fresh chords", fresh.len()))?;
        let others: Vec<_> = p.chords.values().filter(|c| c.id != id).collect();
        for o in &others {
            ensure(q.chords.get(&o.id) == Some(*o), || format!("case {cases}: {} changed", o.id))?;
            for f in &fresh {
                let kept = (o.length < old && o.length < f.length) || (o.length > old && o.length > f.length) || o.length == old;
                ensure(kept, || format!("case {cases}: order of {} vs {} changed", o.id, f.id))?;
            }
        }
        let mut order: Vec<ChordId> = others.iter().map(|c| c.id).collect();
        order.sort_by_key(|c| p.chords[c].order_key());
        let mut after: Vec<ChordId> = q.chords.keys().copied().filter(|c| order.contains(c)).collect();
        after.sort_by_key(|c| q.chords[c].order_key());
        ensure(order == after, || format!("case {cases}: unrelated order changed"))?;
        cases += 1;
    }
    Ok("1000 cases: count delta k-1, order preserved".into())
}

fn main() {
    let mut traces = Vec::new();
    let mut results: Vec<(u32, Outcome, f64)> = Vec::new();
    let mut run = |n: u32, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        results.push((n, r, t.elapsed().as_secs_f64()));
    };
    run(1, &mut || criterion_1(&mut traces));
    run(2, &mut || criterion_2(&mut traces));
    run(3, &mut || criterion_3(&mut traces));
    run(4, &mut || criterion_4(&mut traces));
    run(5, &mut criterion_5);
    let traces = traces;
    run(6, &mut || criterion_6(&traces));
    run(7, &mut || criterion_7(&traces));
    run(8, &mut criterion_8);

    let mut failed = Vec::new();
    for (n, r, secs) in &results {
        match r {
            Ok(detail) => println!("criterion {n}: PASS ({secs:.2}s) {detail}"),
            Err(why) => {
                println!("criterion {n}: FAIL ({secs:.2}s) {why}");
                failed.push(*n);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
