//! Acceptance suite: one PASS/FAIL line per criterion, with measured runtime against its
//! budget. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use invmap_cli::experiments::{
    block_projection, cfi_pair, check_blocks, check_closure, check_homogeneity, check_invariant_systems,
    check_maschke, check_oracle, closure, homogeneity, invariant_systems, maschke, oracle, separation,
};
use invmap_cli::ExperimentReport;
use invmap_core::imrefine::im_equivalent;
use invmap_core::structures::{CfiStructure, OrderedGraph};
use invmap_core::wl::wl_equivalent;

const SEED: u64 = 20;

type Outcome = Result<(bool, String), String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn verdict(r: &ExperimentReport, key: &str) -> String {
    r.verdict_value(key).unwrap_or("missing").to_string()
}

/// Turns a `check_*` result into an outcome carrying the listed verdicts.
fn checked(r: &ExperimentReport, ok: bool, keys: &[&str]) -> Outcome {
    let detail: Vec<String> = keys.iter().map(|k| format!("{k}={}", verdict(r, k))).collect();
    Ok((ok, detail.join(" ")))
}

fn c1_isomorphism_invariant() -> Outcome {
    let g = OrderedGraph::catalog("K4").map_err(|e| e.to_string())?;
    let loads: Vec<Vec<u32>> = (0..16u32).map(|m| (0..4).map(|v| (m >> v) & 1).collect()).collect();
    let structures: Vec<CfiStructure> = loads
        .iter()
        .map(|l| CfiStructure::build(g.clone(), 2, l))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut mismatches = 0;
    let mut isomorphic = 0;
    for a in &structures {
        for b in &structures {
            let found = a.brute_force_isomorphic(b).map_err(|e| e.to_string())?;
            if let Some(pi) = &found {
                isomorphic += 1;
                if a.apply_twist(pi).map_err(|e| e.to_string())?.load() != b.load() {
                    mismatches += 1;
                }
            }
            if found.is_some() != (a.iso_invariant() == b.iso_invariant()) {
                mismatches += 1;
            }
        }
    }
    Ok((mismatches == 0, format!("pairs=256 isomorphic={isomorphic} mismatches={mismatches}")))
}

fn c2_automorphism_dimension() -> Outcome {
    let expected = [("K4", 3), ("cube", 5), ("K33", 4), ("prism", 4), ("petersen", 6)];
    let mut ok = true;
    let mut seen = Vec::new();
    for (name, dim) in expected {
        for p in [2, 3] {
            let g = OrderedGraph::catalog(name).map_err(|e| e.to_string())?;
            let formula = g.undirected_count() - g.n() + 1;
            let s = CfiStructure::build(g.clone(), p, &vec![0; g.n()]).map_err(|e| e.to_string())?;
            let d = s.automorphism_basis().dim();
            ok &= d == dim && d == formula;
            seen.push(format!("{name}/p{p}={d}"));
        }
    }
    Ok((ok, seen.join(" ")))
}

fn c3_wl_blindness() -> Outcome {
    let (a, b) = cfi_pair("K4", 2).map_err(|e| e.to_string())?;
    let (a, b) = (a.to_structure(), b.to_structure());
    let k1 = wl_equivalent(&a, &b, 1).map_err(|e| e.to_string())?;
    let mut minimal = None;
    let mut tried = 1;
    for k in 2..=4 {
        match wl_equivalent(&a, &b, k) {
            Ok(true) => tried = k,
            Ok(false) => {
                minimal = Some(k);
                break;
            }
            Err(invmap_core::Error::BudgetExceeded { .. }) => break,
            Err(e) => return Err(e.to_string()),
        }
    }
    let reported = match minimal {
        Some(k) => k.to_string(),
        None => format!(">{tried}"),
    };
    let exceeds_one = minimal.is_none_or(|k| k > 1);
    Ok((k1 && exceeds_one, format!("equivalent-at-k1={k1} minimal-distinguishing-k={reported}")))
}

fn c4_im_matching_prime() -> Outcome {
    let (a, b) = cfi_pair("K4", 2).map_err(|e| e.to_string())?;
    let eq = im_equivalent(&a.to_structure(), &b.to_structure(), 3, &[2]).map_err(|e| e.to_string())?;
    Ok((!eq, format!("im-equivalent(k=3,Q={{2}})={eq} expected=false")))
}

fn c5_im_coprime_prime() -> Outcome {
    let (a, b) = cfi_pair("K4", 2).map_err(|e| e.to_string())?;
    let eq = im_equivalent(&a.to_structure(), &b.to_structure(), 3, &[3]).map_err(|e| e.to_string())?;
    let r = separation("K4", 2, 3, 3, SEED).map_err(|e| e.to_string())?;
    let f3 = verdict(&r, "similar-over-F3");
    let f2 = verdict(&r, "similar-over-F2");
    Ok((
        eq && f3 == "true" && f2 == "false",
        format!("im-equivalent(k=3,Q={{3}})={eq} similar-over-F3={f3} (want true) similar-over-F2={f2} (want false)"),
    ))
}

fn c6_homogeneity() -> Outcome {
    let instances = vec![("K4".to_string(), 2), ("prism".to_string(), 2)];
    let r = homogeneity(&instances, 6).map_err(|e| e.to_string())?;
    checked(&r, check_homogeneity(&r).is_ok(), &["K4-p2-minimal-k", "prism-p2-minimal-k"])
}

fn c7_maschke() -> Outcome {
    let r = maschke(27, &[2, 3, 5, 7]).map_err(|e| e.to_string())?;
    checked(&r, check_maschke(&r).is_ok(), &["cases", "disagreements"])
}

fn c8_block_projection() -> Outcome {
    let r = block_projection(100, SEED).map_err(|e| e.to_string())?;
    checked(&r, check_blocks(&r).is_ok(), &["samples", "invertible-faithful-samples", "violations"])
}

fn c9_similarity_oracle() -> Outcome {
    let r = oracle(200, SEED).map_err(|e| e.to_string())?;
    checked(
        &r,
        check_oracle(&r).is_ok(),
        &[
            "present-F2",
            "disagreements-F2",
            "bad-witnesses-F2",
            "present-F3",
            "disagreements-F3",
            "bad-witnesses-F3",
        ],
    )
}

fn c10_invariant_systems() -> Outcome {
    let r = invariant_systems(50, SEED).map_err(|e| e.to_string())?;
    checked(&r, check_invariant_systems(&r).is_ok(), &["solvable", "violations"])
}

fn c11_closure() -> Outcome {
    let r = closure(&[2, 3], &[2, 3, 5]).map_err(|e| e.to_string())?;
    checked(&r, check_closure(&r).is_ok(), &["violations"])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 isomorphism invariant exact on K4 p=2 (256 pairs)", 10, c1_isomorphism_invariant),
        ("2 automorphism dimension m-|V|+1, p in {2,3}", 1, c2_automorphism_dimension),
        ("3 WL blind at k=1 on CFI[K4;2] pair", 30, c3_wl_blindness),
        ("4 IM separates CFI[K4;2] pair at k=3, Q={2}", 300, c4_im_matching_prime),
        ("5 IM blind at k=3, Q={3}; bases similar over F3 only", 600, c5_im_coprime_prime),
        ("6 homogeneity on K4, prism at p=2 within k<=6", 300, c6_homogeneity),
        ("7 Maschke agreement, |G|<=27, q in {2,3,5,7}", 60, c7_maschke),
        ("8 block projections stay in H and keep invertibility", 60, c8_block_projection),
        ("9 similarity decider matches exhaustive search", 300, c9_similarity_oracle),
        ("10 invariant systems: symmetric solutions and kernel span", 60, c10_invariant_systems),
        ("11 closure of stable pair configurations over F2, F3, F5", 120, c11_closure),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.2}s / {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
