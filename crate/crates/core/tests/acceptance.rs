//! Acceptance gate. Prints one line per criterion and exits nonzero when the
//! set of failing criteria differs from `KNOWN_FAILURES`.

use std::time::Instant;

use fqm_core::cli;
use fqm_core::discrepancy::{erdos_turan_bound, ordered_box_counts, uniform_discrepancy, UnitSequence1D};
use fqm_core::expsum::{boundary_allowance, complete_exp_sum, pattern_exp_sum, FrequencyVector};
use fqm_core::identities::*;
use fqm_core::line::{integral_i, integral_i_exact, mean_line_distance, LineSpec};
use fqm_core::pattern::{count_all_permutations, DisplacementPattern};
use fqm_core::repro::{format_ratio_milli, reproduce, TableId};
use fqm_core::{fermat_quotient_oracle, FermatQuotientTable, MatrixIndex, OddPrime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

/// The double integral equals 1/3 only for integer slopes; at C = 2.5 it is
/// 0.32133..., so the first half of criterion 6 cannot pass.
const KNOWN_FAILURES: &[u32] = &[6];

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn table(p: u64) -> FermatQuotientTable {
    FermatQuotientTable::build(OddPrime::new(p as i64).unwrap())
}

fn odd_primes_up_to(n: u64) -> Vec<u64> {
    (3..=n).filter(|&k| fqm_core::arith::is_prime(k)).collect()
}

fn table_one() -> Outcome {
    let r = reproduce(TableId::T1).unwrap();
    outcome(
        r.all_match && r.cells_checked == 120,
        format!(
            "{} of {} cells match (110 entries + 10 inverses)",
            r.cells_checked - r.mismatches.len(),
            r.cells_checked
        ),
    )
}

fn pattern_tables() -> Outcome {
    let region = [
        346896u64, 348099, 334422, 248000, 248000, 248000, 30710, 41004, 39999, 39576, 39402, 37904,
    ];
    let counts = [
        14360u64, 57802, 56512, 41624, 10480, 6912, 4995, 7256, 6555, 10070, 5338, 7125,
    ];
    let ratios = [
        "1.048", "1.041", "1.065", "0.253", "1.005", "1.525", "1.485", "1.022", "1.131", "0.736", "1.390", "1.041",
    ];
    let mut rows = Vec::new();
    let mut fixtures_match = true;
    for id in [TableId::A11, TableId::A12, TableId::A2] {
        let r = reproduce(id).unwrap();
        fixtures_match &= r.all_match;
        rows.extend(r.rows);
    }
    let mut bad = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let ratio = format_ratio_milli(row.report.ratio_milli_truncated());
        if row.report.region_card != region[k] || row.report.count != counts[k] || ratio != ratios[k] {
            bad.push(k + 1);
        }
    }
    outcome(
        fixtures_match && bad.is_empty() && rows.len() == 12,
        format!(
            "{} of 12 rows exact in region size, count and ratio; mismatched rows {bad:?}",
            12 - bad.len()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let primes = odd_primes_up_to(313);
    let exhaustive: u64 = primes
        .par_iter()
        .map(|&p| {
            let t = table(p);
            let mut bad = 0u64;
            for a in 0..p {
                for b in 1..p {
                    let idx = MatrixIndex::new(a as i64, b as i64, t.prime()).unwrap();
                    bad += (t.entry(idx) != fermat_quotient_oracle(a * p + b, t.prime()).unwrap()) as u64;
                }
            }
            bad
        })
        .sum();
    let mut sampled = 0u64;
    for (p, seed) in [(10007u64, 1u64), (100003, 2)] {
        let t = table(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let (a, b) = (rng.gen_range(0..p), rng.gen_range(1..p));
            let idx = MatrixIndex::new(a as i64, b as i64, t.prime()).unwrap();
            sampled += (t.entry(idx) != fermat_quotient_oracle(a * p + b, t.prime()).unwrap()) as u64;
        }
    }
    outcome(
        exhaustive == 0 && sampled == 0,
        format!(
            "{} primes <= 313 exhaustive, 2 x 10^4 sampled cells; {} mismatches",
            primes.len(),
            exhaustive + sampled
        ),
    )
}

fn identities() -> Outcome {
    let exhaustive: u64 = odd_primes_up_to(101)
        .par_iter()
        .map(|&p| {
            let t = table(p);
            let mut bad = 0u64;
            for a in 0..p {
                for b in 1..p {
                    bad += !reflection_holds(&t, a, b) as u64;
                    bad += !row_formula_holds(&t, a, b) as u64;
                    for s in 0..p {
                        bad += !row_shift_holds(&t, a, s, b) as u64;
                    }
                    for b2 in 1..p {
                        bad += !product_law_holds(&t, a, b, b2) as u64;
                    }
                }
            }
            for b1 in 1..p {
                for b2 in 1..p {
                    bad += !logarithm_law_holds(&t, b1, b2) as u64;
                }
            }
            bad
        })
        .sum();
    let p = 100003u64;
    let t = table(p);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sampled = 0u64;
    for _ in 0..100_000 {
        let (a, s) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let (b1, b2) = (rng.gen_range(1..p), rng.gen_range(1..p));
        sampled += !reflection_holds(&t, a, b1) as u64;
        sampled += !row_formula_holds(&t, a, b1) as u64;
        sampled += !row_shift_holds(&t, a, s, b1) as u64;
        sampled += !logarithm_law_holds(&t, b1, b2) as u64;
        sampled += !product_law_holds(&t, a, b1, b2) as u64;
    }
    outcome(
        exhaustive == 0 && sampled == 0,
        format!(
            "exhaustive p <= 101 and 10^5 instances at p = 100003; {} failures",
            exhaustive + sampled
        ),
    )
}

fn line_means() -> Outcome {
    let frozen: Value = serde_json::from_str(include_str!("fixtures/line_mean.json")).unwrap();
    let line = LineSpec::new(1.0, 0.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for case in frozen["cases"].as_array().unwrap() {
        let p = case["p"].as_u64().unwrap();
        let r = mean_line_distance(&table(p), &line);
        let numerator = r.exact_numerator.unwrap().to_string();
        pass &= numerator == case["numerator"].as_str().unwrap();
        if let Some(tol) = case["tolerance"].as_f64() {
            pass &= r.deviation <= tol;
            parts.push(format!("p={p} |M-1/3|={:.5} <= {tol}", r.deviation));
        }
        if p == 11 {
            pass &= numerator == "43" && r.mean == 43.0 / 121.0;
            parts.push(format!("M(11)={numerator}/121"));
        }
    }
    outcome(pass, parts.join(", "))
}

fn double_integral() -> Outcome {
    let fractional = integral_i(&LineSpec::new(2.5, 0.3).unwrap(), 1_000_000).unwrap();
    let integer = integral_i_exact(&LineSpec::new(1.0, 0.0).unwrap());
    let err = (fractional - 1.0 / 3.0).abs();
    let exact_ok = (integer - 1.0 / 3.0).abs() <= 4.0 * f64::EPSILON;
    outcome(
        err <= 1e-3 && exact_ok,
        format!(
            "C=2.5, D=0.3 gives {fractional:.7} (off by {err:.1e}, tolerance 1e-3); C=1, D=0 exact gives {integer}"
        ),
    )
}

fn frequency_vectors(n: usize, bound: i64) -> Vec<FrequencyVector> {
    let mut out = Vec::new();
    let mut h = vec![-bound; n];
    loop {
        if h.iter().any(|&x| x != 0) {
            out.push(FrequencyVector::new(h.clone()));
        }
        let Some(i) = (0..n).rev().find(|&i| h[i] < bound) else {
            return out;
        };
        h[i] += 1;
        for x in &mut h[i + 1..] {
            *x = -bound;
        }
    }
}

/// Patterns with distinct second components: first components drawn from
/// `{0, 1, 2}` over two column layouts, plus a few spread-out shapes.
fn distinct_t_patterns() -> Vec<DisplacementPattern> {
    let mut out = Vec::new();
    for layout in [[0i64, 1, 2], [0, 2, 5]] {
        for n in 1..=3usize {
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let v = (0..n)
                    .map(|j| (((code / 3usize.pow(j as u32)) % 3) as i64, layout[j]))
                    .collect();
                out.push(DisplacementPattern::new(v).unwrap());
            }
        }
    }
    for v in [
        vec![(10, 6), (1, 7), (2, 8)],
        vec![(26, -11), (26, 12), (26, 33)],
        vec![(-3, 4), (5, -2)],
    ] {
        out.push(DisplacementPattern::new(v).unwrap());
    }
    out
}

fn exp_sum_bounds() -> Outcome {
    let patterns = distinct_t_patterns();
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut gap_violations = 0usize;
    for p in [11u64, 101] {
        let t = table(p);
        for pat in &patterns {
            if fqm_core::pattern::admissible_region(t.prime(), pat).is_empty() {
                continue;
            }
            let allowance = boundary_allowance(pat, p);
            let found: Vec<(bool, bool)> = frequency_vectors(pat.dim(), 3)
                .par_iter()
                .map(|h| {
                    let full = complete_exp_sum(&t, pat, h).unwrap();
                    let part = pattern_exp_sum(&t, pat, h).unwrap();
                    let bound = (pat.dim() as u64 * p) as f64;
                    (
                        full.norm > bound + 1e-6,
                        (full.value() - part.value()).norm() > allowance + 1e-6,
                    )
                })
                .collect();
            checked += found.len();
            violations += found.iter().filter(|x| x.0).count();
            gap_violations += found.iter().filter(|x| x.1).count();
        }
    }
    outcome(
        violations == 0 && gap_violations == 0,
        format!("{checked} (p, pattern, h) cases; {violations} over N p, {gap_violations} over 4 M p"),
    )
}

fn partition() -> Outcome {
    let cells: Vec<(i64, i64)> = (0..2).flat_map(|s| (0..3).map(move |t| (s, t))).collect();
    let mut patterns = Vec::new();
    for n in 1..=3u32 {
        for code in 0..6usize.pow(n) {
            patterns.push((0..n).map(|j| cells[(code / 6usize.pow(j)) % 6]).collect::<Vec<_>>());
        }
    }
    let failures: usize = odd_primes_up_to(101)
        .par_iter()
        .map(|&p| {
            let t = table(p);
            patterns
                .iter()
                .filter(|v| {
                    let pat = DisplacementPattern::new(v.to_vec()).unwrap();
                    let r = count_all_permutations(&t, &pat).unwrap();
                    r.iter().map(|x| x.count).sum::<u64>() + r[0].tie_count != r[0].region_card
                })
                .count()
        })
        .sum();
    let mut table_fail = 0;
    let mut configs = 0;
    for tab in fqm_core::fixtures::pattern_tables() {
        let t = table(tab.prime as u64);
        for row in &tab.rows {
            let r = count_all_permutations(&t, &row.pattern().unwrap()).unwrap();
            configs += 1;
            table_fail += (r.iter().map(|x| x.count).sum::<u64>() + r[0].tie_count != r[0].region_card) as usize;
        }
    }
    outcome(
        failures == 0 && table_fail == 0,
        format!(
            "{} patterns over primes <= 101 and {configs} table configurations; {} failures",
            patterns.len(),
            failures + table_fail
        ),
    )
}

fn combinatorics() -> Outcome {
    let mut bad = 0;
    for l in 1u64..=12 {
        for n in 1u64..=4.min(l) {
            let (mut strict, mut weak) = (0u128, 0u128);
            let mut idx = vec![1u64; n as usize];
            loop {
                strict += idx.windows(2).all(|w| w[0] < w[1]) as u128;
                weak += idx.windows(2).all(|w| w[0] <= w[1]) as u128;
                let Some(i) = (0..idx.len()).rev().find(|&i| idx[i] < l) else {
                    break;
                };
                idx[i] += 1;
                for x in &mut idx[i + 1..] {
                    *x = 1;
                }
            }
            bad += (ordered_box_counts(n, l).unwrap() != (strict, weak)) as usize;
        }
    }
    let (s, _) = ordered_box_counts(4, 1000).unwrap();
    let share = s as f64 / 1e12;
    let gap = (share - 1.0 / 24.0).abs();
    outcome(
        bad == 0 && gap <= 1e-3,
        format!("brute enumeration N <= 4, L <= 12: {bad} mismatches; B*(4,1000)/1000^4 = {share:.6}, off 1/24 by {gap:.1e}"),
    )
}

/// Largest `|count/n - length|` over intervals with endpoints in
/// `{0, 1} + values`, all four open/closed variants, via sorted counts.
fn grid_discrepancy(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let below = |x: f64| sorted.partition_point(|&y| y < x);
    let upto = |x: f64| sorted.partition_point(|&y| y <= x);
    let mut grid = sorted.clone();
    grid.extend([0.0, 1.0]);
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    let n = xs.len() as f64;
    let mut best = 0.0f64;
    for (i, &lo) in grid.iter().enumerate() {
        for &hi in &grid[i..] {
            let len = hi - lo;
            let closed = upto(hi) - below(lo);
            best = best.max((closed as f64 / n - len).abs());
            if hi > lo {
                let open = below(hi) - upto(lo);
                let half_a = below(hi) - below(lo);
                let half_b = upto(hi) - upto(lo);
                for c in [open, half_a, half_b] {
                    best = best.max((c as f64 / n - len).abs());
                }
            }
        }
    }
    best
}

fn discrepancy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst, mut et_fail, mut et_cases) = (0.0f64, 0, 0);
    for k in 0..100 {
        let len = rng.gen_range(1..=200);
        let xs: Vec<f64> = if k % 5 == 0 {
            (0..len).map(|_| rng.gen_range(0..16) as f64 / 16.0).collect()
        } else {
            (0..len).map(|_| rng.gen::<f64>()).collect()
        };
        let s = UnitSequence1D::new(xs.clone()).unwrap();
        let d = uniform_discrepancy(&s);
        worst = worst.max((d - grid_discrepancy(&xs)).abs());
        for kk in [2u64, 3, 5, 10, 20, 50] {
            et_cases += 1;
            et_fail += (d * len as f64 > erdos_turan_bound(&s, kk).unwrap() + 1e-9) as usize;
        }
    }
    outcome(
        worst <= 1e-12 && et_fail == 0,
        format!(
            "100 sequences, max oracle gap {worst:.1e}; Erdos-Turan held in {} of {et_cases} cases",
            et_cases - et_fail
        ),
    )
}

fn run_job(threads: &str, job: &[&str]) -> Vec<u8> {
    let argv = ["fq", "--threads", threads].into_iter().chain(job.iter().copied());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    cli::run(argv, &mut out, &mut err);
    out
}

fn determinism() -> Outcome {
    let jobs: &[&[&str]] = &[
        &["repro", "--table", "all"],
        &["matrix", "--p", "11"],
        &["line-mean", "--p", "11", "--c", "1"],
        &["line-mean", "--p", "100003", "--c", "1"],
        &[
            "line-mean",
            "--p",
            "10007",
            "--c",
            "2.5",
            "--d",
            "0.3",
            "--integral-steps",
            "1000000",
        ],
        &["perm-sweep", "--p", "601", "--vectors", "0,4;7,5;3,10;7,16"],
        &[
            "pattern-count",
            "--p",
            "211",
            "--sigma",
            "2,1,3",
            "--vectors",
            "26,-11;26,12;26,33",
        ],
        &[
            "--seed",
            "4",
            "expsum",
            "--p",
            "101",
            "--vectors",
            "0,0;1,2;2,5",
            "--random-h",
            "20",
            "--m",
            "1",
            "--y",
            "5000",
        ],
        &[
            "discrepancy",
            "--p",
            "1009",
            "--vectors",
            "0,1;1,2",
            "--l",
            "8",
            "--h-bound",
            "4",
        ],
        &["zeros", "--pmin", "3", "--pmax", "2000", "--bmax", "50"],
    ];
    let mut differing = Vec::new();
    for job in jobs {
        let base = run_job("1", job);
        if base.is_empty() || ["4", "16"].iter().any(|n| run_job(n, job) != base) {
            differing.push(job[0]);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} jobs compared at 1, 4 and 16 threads; differing: {differing:?}",
            jobs.len()
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, Check); 11] = [
        (1, "table 1", table_one),
        (2, "pattern tables", pattern_tables),
        (3, "oracle equivalence", oracle_equivalence),
        (4, "identity suite", identities),
        (5, "line mean convergence", line_means),
        (6, "double integral", double_integral),
        (7, "exponential sum bound", exp_sum_bounds),
        (8, "partition identity", partition),
        (9, "ordered box counts", combinatorics),
        (10, "discrepancy toolkit", discrepancy),
        (11, "determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let started = Instant::now();
        let r = check();
        let ms = started.elapsed().as_secs_f64() * 1e3;
        if !r.pass {
            failed.push(id);
        }
        println!(
            "criterion {id:>2} {} {name}: {} [{ms:.0} ms]",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    let passed = criteria.len() - failed.len();
    println!(
        "{passed} of {} criteria pass; failing {failed:?}, expected failing {KNOWN_FAILURES:?}",
        criteria.len()
    );
    if failed != KNOWN_FAILURES {
        std::process::exit(1);
    }
}
