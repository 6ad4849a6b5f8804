use std::time::Instant;

use crate::exactnum::{parse_rational, FactorBudget, Rational};
use crate::family::build;
use crate::localred::{check_13_rule, support_oracle, tamagawa_with};

use super::{compute_record, enumerate_t, search_v13_4, verify_parity, verify_unique_v13_2, E2_J};

/// Outcome of one self-test check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub result: Result<String, String>,
    pub seconds: f64,
}

fn q(s: &str) -> Rational {
    parse_rational(s).expect("literal parameter")
}

fn run(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> CheckOutcome {
    let start = Instant::now();
    let result = f();
    CheckOutcome { name, result, seconds: start.elapsed().as_secs_f64() }
}

/// Fast cross-checks over small heights: the reference curve, parity,
/// uniqueness of `v13 = 2`, the rule at 13, the support oracle and the
/// `v13 = 4` search.
pub fn selftest(budget: FactorBudget) -> Vec<CheckOutcome> {
    let h4: Vec<_> = enumerate_t(4).iter().map(|t| compute_record(t, budget, false)).collect();
    vec![
        run("reference curve t = 2", || {
            let r = compute_record(&q("2"), budget, false);
            match (r.d.as_ref().map(ToString::to_string), r.j.as_deref(), r.c_e.as_deref(), r.v13) {
                (Some(d), Some(E2_J), Some("169"), Some(2)) if d == "17" && r.is_ok() => {
                    Ok("d = 17, c_E = 169".into())
                }
                _ => Err(format!("got {}", r.to_json_line())),
            }
        }),
        run("t = -1, 1/2, 2 give one curve", || {
            let keys: Vec<_> = ["-1", "1/2", "2"]
                .iter()
                .map(|t| {
                    let r = compute_record(&q(t), budget, false);
                    (r.d.map(|d| d.to_string()), r.j)
                })
                .collect();
            if keys.iter().all(|k| *k == keys[0]) {
                Ok("same d and j".into())
            } else {
                Err(format!("{keys:?}"))
            }
        }),
        run("parity for height <= 4", || {
            let rep = verify_parity(&h4);
            if rep.passed() {
                Ok(format!("{} curves", rep.checked))
            } else {
                Err(format!("{:?} {:?}", rep.violations, rep.errors))
            }
        }),
        run("v13 = 2 only for the reference curve", || {
            let rep = verify_unique_v13_2(&h4);
            let mut twos = rep.with_v13(2).to_vec();
            twos.sort();
            if rep.passed() && twos == ["-1", "1/2", "2"] {
                Ok(format!("{} curves", h4.len()))
            } else {
                Err(format!("v13 = 2 at {twos:?}; {:?}", rep.violations))
            }
        }),
        run("rule at 13", || {
            let mut ts = enumerate_t(4);
            ts.extend(["13", "14", "26", "1/13"].map(q));
            for t in &ts {
                let Ok(fc) = build(t) else { continue };
                let g = tamagawa_with(&fc, budget).map_err(|e| e.to_string())?;
                let rule = check_13_rule(&fc, &g);
                if !rule.agrees() {
                    return Err(format!("t = {}: {rule:?}", fc.t));
                }
            }
            Ok(format!("{} parameters", ts.len()))
        }),
        run("support oracle for height <= 4", || {
            let mut n = 0;
            for t in enumerate_t(4) {
                let Ok(fc) = build(&t) else { continue };
                let missed = support_oracle(&fc, budget).map_err(|e| e.to_string())?;
                if !missed.is_empty() {
                    return Err(format!("t = {}: missed {missed:?}", fc.t));
                }
                n += 1;
            }
            Ok(format!("{n} curves"))
        }),
        run("v13 = 4 search on {1,8,9}", || {
            let recs = search_v13_4(&[], &[], true, budget);
            let bad: Vec<_> = recs
                .iter()
                .filter(|r| r.condition1 == Some(true) && r.condition2 == Some(true) && r.v13 != Some(4))
                .collect();
            if recs.is_empty() || !bad.is_empty() {
                Err(format!("{} records, inconsistent: {bad:?}", recs.len()))
            } else {
                Ok(format!("{} records", recs.len()))
            }
        }),
    ]
}
