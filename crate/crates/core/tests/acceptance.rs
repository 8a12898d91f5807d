//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a non-zero status if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use apseq::heightgraph::GraphContext;
use apseq::oracle::{coded_prefix, default_window, Status};
use apseq::spectrum::algorithm_one_spectrum;
use apseq::{
    constant_ap_witnesses, corpus, dekking_spectrum, height, APDecider, host_two_letter,
    prefix_ap_scan, spectrum, Alphabet, AutoClassification, Error, IntMatrix, Letter, Morphism,
    SeedPair, SpectrumOptions, Word,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn big(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn set<T: Ord + Copy>(v: &[T]) -> BTreeSet<T> {
    v.iter().copied().collect()
}

/// Residues modulo `p` on which the prefix is constant, with their letters.
fn scanned_constants(w: &[Letter], p: u64) -> Result<Vec<(u64, Letter)>, String> {
    Ok(prefix_ap_scan(w, p)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter_map(|r| match r.status {
            Status::Constant(b) => Some((r.residue, b)),
            Status::Violated(..) => None,
        })
        .collect())
}

fn expand(witnesses: &[(u64, Letter)], reduced: u64, p: u64) -> Vec<(u64, Letter)> {
    (0..p)
        .filter_map(|k| {
            witnesses
                .iter()
                .find(|(r, _)| k % reduced == *r)
                .map(|&(_, b)| (k, b))
        })
        .collect()
}

fn proper_example_spectrum() -> Outcome {
    let s = corpus::proper_01_0110();
    let m = s.incidence();
    ensure!(m.row_power(2).0 == big(&[6, 12]), "1M^2 = {}", m.row_power(2));
    let desc = spectrum(&s).map_err(|e| e.to_string())?;
    ensure!(desc.infinite_primes == set(&[3]), "infinite primes {:?}", desc.infinite_primes);
    ensure!(
        desc.bounded_primes == BTreeMap::from([(2, 1)]),
        "bounded primes {:?}",
        desc.bounded_primes
    );
    for p in 1..=200u64 {
        let mut q = p;
        while q % 3 == 0 {
            q /= 3;
        }
        let expected = q == 1 || q == 2;
        ensure!(desc.member(p).unwrap() == expected, "membership of {p}");
    }
    Ok(())
}

fn proper_example_decisions() -> Outcome {
    let s = corpus::proper_01_0110();
    let prefix = s
        .fixed_point_prefix(&SeedPair::one_sided(0), 10_000)
        .map_err(|e| e.to_string())?;
    for (p, reduced, expected) in [
        (2u64, 1u64, vec![]),
        (3, 1, vec![]),
        (6, 6, vec![(0u64, 0usize), (1, 1)]),
        (12, 6, vec![(0, 0), (1, 1)]),
    ] {
        let w = constant_ap_witnesses(&s, None, p).map_err(|e| e.to_string())?;
        let got: Vec<(u64, Letter)> = w.iter().map(|w| (w.residue, w.letter)).collect();
        ensure!(got == expected, "p = {p}: witnesses {got:?}");
        ensure!(w.iter().all(|w| w.reduced == reduced), "p = {p}: reduced difference");
        let scanned = scanned_constants(&prefix, p)?;
        ensure!(
            scanned == expand(&expected, reduced.max(1), p),
            "p = {p}: prefix scan gives {scanned:?}"
        );
    }
    Ok(())
}

fn six_letter_matrix() -> Outcome {
    let tau = corpus::proper_six_letter();
    let m = tau.incidence();
    let sums = m.pow(6).map_err(|e| e.to_string())?.column_sums();
    ensure!(
        sums.0 == big(&[930072, 1860144, 1675961, 1159797, 1675961, 1159797]),
        "column sums {sums}"
    );
    ensure!(sums.gcd() == BigInt::from(1), "gcd {}", sums.gcd());
    let desc = spectrum(&tau).map_err(|e| e.to_string())?;
    ensure!(desc.is_trivial(), "spectrum {desc}");
    Ok(())
}

fn length_four_height_three() -> Outcome {
    let s = corpus::height_three_length_four();
    let hd = height(&s, &SeedPair::one_sided(0)).map_err(|e| e.to_string())?;
    ensure!(hd.h == 3, "height {}", hd.h);
    let desc = dekking_spectrum(4, 3).map_err(|e| e.to_string())?;
    for p in 1..=100u64 {
        let expected = (p.trailing_zeros() as u64..=p.trailing_zeros() as u64)
            .any(|z| matches!(p >> z, 1 | 3));
        ensure!(desc.member(p).unwrap() == expected, "membership of {p}");
    }
    let via_dispatch = spectrum(&s).map_err(|e| e.to_string())?;
    ensure!(via_dispatch == desc, "dispatch gives {via_dispatch}");
    Ok(())
}

fn two_class_graph() -> Outcome {
    let s = corpus::length_three_height_two();
    let ctx = GraphContext::new(&s, None).map_err(|e| e.to_string())?;
    ensure!(ctx.height.h == 2, "height {}", ctx.height.h);
    ensure!(
        ctx.height.classes == vec![set(&[0, 3]), set(&[1, 2])],
        "classes {:?}",
        ctx.height.classes
    );
    ensure!(ctx.graph.vertex_count() == 2, "{} vertices", ctx.graph.vertex_count());
    let id = Morphism::identity(s.domain());
    let class = ctx.graph.classify(&id).map_err(|e| e.to_string())?;
    ensure!(class == AutoClassification::NoConstantAP, "classified as {class:?}");
    ensure!(ctx.graph.branching_number() == 2, "branching {}", ctx.graph.branching_number());
    Ok(())
}

fn six_vertex_graph() -> Outcome {
    let s = corpus::length_five_height_two();
    let ctx = GraphContext::new(&s, None).map_err(|e| e.to_string())?;
    let g = &ctx.graph;
    ensure!(g.vertex_count() == 6, "{} vertices", g.vertex_count());
    let id = Morphism::identity(s.domain());
    let w10 = g.constant_difference_witnesses(&id, 10, 1).map_err(|e| e.to_string())?;
    ensure!(w10 == vec![(1, 1)], "q = 10: {w10:?}");
    for q in [5, 2, 1] {
        let w = g.constant_difference_witnesses(&id, q, 1).map_err(|e| e.to_string())?;
        ensure!(w.is_empty(), "q = {q}: {w:?}");
    }
    let prefix = s.fixed_point_prefix(&ctx.seed, 10_000).map_err(|e| e.to_string())?;
    let scanned = scanned_constants(&prefix, 10)?;
    ensure!(scanned == vec![(1, 1)], "prefix scan mod 10 gives {scanned:?}");
    Ok(())
}

fn coded_graph() -> Outcome {
    let s = corpus::length_three_height_two();
    let phi = corpus::four_to_three_coding();
    let a = phi.codomain().index_of("a").ok_or("no letter a")?;
    let ctx = GraphContext::new(&s, None).map_err(|e| e.to_string())?;
    let check = ctx.check_difference(&phi, 2).map_err(|e| e.to_string())?;
    ensure!(check.witnesses == vec![(0, a)], "p = 2: {:?}", check.witnesses);
    let prefix = coded_prefix(&s, &ctx.seed, Some(&phi), 20_000).map_err(|e| e.to_string())?;
    for j in 0..6u32 {
        for i in 0..4u32 {
            let p = 2u64.pow(j) * 3u64.pow(i);
            if p > 48 {
                continue;
            }
            let check = ctx.check_difference(&phi, p).map_err(|e| e.to_string())?;
            let letters: BTreeSet<Letter> = check.witnesses.iter().map(|&(_, b)| b).collect();
            ensure!(letters.iter().all(|&b| b == a), "p = {p}: letters {letters:?}");
            let scanned = scanned_constants(&prefix, p)?;
            ensure!(scanned == check.expanded(), "p = {p}: prefix scan gives {scanned:?}");
        }
    }
    let reports = ctx.graph.level_reports(&phi, 5).map_err(|e| e.to_string())?;
    for w in reports.windows(2) {
        ensure!(
            w[1].singleton_count == 3 * w[0].singleton_count,
            "s_{} = {}, s_{} = {}",
            w[1].level,
            w[1].singleton_count,
            w[0].level,
            w[0].singleton_count
        );
        ensure!(w[1].new_essential_periods.is_empty(), "new periods at level {}", w[1].level);
    }
    Ok(())
}

fn unbounded_periods() -> Outcome {
    let s = corpus::length_two_height_three();
    let ctx = GraphContext::new(&s, None).map_err(|e| e.to_string())?;
    ensure!(ctx.height.h == 3, "height {}", ctx.height.h);
    ensure!(
        ctx.height.classes == vec![set(&[0]), set(&[1]), set(&[2, 3])],
        "classes {:?}",
        ctx.height.classes
    );
    let id = Morphism::identity(s.domain());
    let class = ctx.graph.classify(&id).map_err(|e| e.to_string())?;
    ensure!(
        matches!(class, AutoClassification::UnboundedEssentialPeriods { .. }),
        "classified as {class:?}"
    );
    let reports = ctx.graph.level_reports(&id, 5).map_err(|e| e.to_string())?;
    ensure!(reports[0].singleton_count == 2, "s_0 = {}", reports[0].singleton_count);
    ensure!(reports[1].singleton_count == 5, "s_1 = {}", reports[1].singleton_count);
    let new1: Vec<(u64, u64, Letter)> = reports[1]
        .new_essential_periods
        .iter()
        .map(|e| (e.period, e.residue, e.letter))
        .collect();
    ensure!(new1 == vec![(6, 2, 2)], "new periods at level 1: {new1:?}");
    let periods: BTreeSet<u64> = reports
        .iter()
        .flat_map(|r| r.new_essential_periods.iter().map(|e| e.period))
        .collect();
    ensure!(periods == set(&[3, 6, 12, 24, 48, 96]), "periods {periods:?}");
    Ok(())
}

fn open_example_scan() -> Outcome {
    let s = corpus::open_three_letter();
    match spectrum(&s) {
        Err(Error::ProperRequired) => {}
        other => return Err(format!("spectrum gave {other:?}")),
    }
    let prefix = s
        .fixed_point_prefix(&SeedPair::one_sided(0), 1 << 15)
        .map_err(|e| e.to_string())?;
    for m in 0..=10 {
        let p = 1u64 << m;
        let scanned = scanned_constants(&prefix, p)?;
        ensure!(scanned.is_empty(), "p = {p}: constant residues {scanned:?}");
    }
    Ok(())
}

fn random_matrix(rng: &mut ChaCha8Rng, max_entry: i64) -> IntMatrix {
    let d = rng.gen_range(1..=4);
    let rows: Vec<Vec<i64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.gen_range(0..=max_entry)).collect())
        .collect();
    IntMatrix::from_rows(&rows).expect("square matrix")
}

fn nilpotent_exponent_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for _ in 0..200 {
        let m = random_matrix(&mut rng, 7);
        let d = m.rows();
        for p in [2u64, 3, 5, 7] {
            let q = BigInt::from(p);
            let some = (0..=3 * d).any(|k| m.row_power(k).divisible_by(&q));
            let at_d = m.row_power(d).divisible_by(&q);
            ensure!(some == at_d, "p = {p}, M =\n{m}");
        }
    }
    Ok(())
}

/// Random primitive left-proper substitution whose fixed point is not periodic.
fn random_proper(rng: &mut ChaCha8Rng) -> Morphism {
    loop {
        let d = rng.gen_range(2..=4);
        let images: Vec<Word> = (0..d)
            .map(|a| {
                let len = rng.gen_range(if a == 0 { 2 } else { 1 }..=4);
                let mut w = vec![0];
                w.extend((1..len).map(|_| rng.gen_range(0..d)));
                Word::new(w)
            })
            .collect();
        let alphabet = Alphabet::digits(d);
        let sigma = Morphism::new(alphabet.clone(), alphabet, images).expect("valid images");
        if !sigma.is_primitive() {
            continue;
        }
        match spectrum(&sigma) {
            Ok(_) => return sigma,
            Err(Error::PeriodicInput { .. }) => continue,
            Err(e) => panic!("unexpected error {e} on {sigma}"),
        }
    }
}

fn decisions_match_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let options = SpectrumOptions::default();
    for _ in 0..50 {
        let sigma = random_proper(&mut rng);
        let seed = sigma.canonical_seed().ok_or("left-proper input has a seed")?;
        let decider = APDecider::new(&sigma, None, &options).map_err(|e| format!("{sigma}: {e}"))?;
        let decisions: Vec<_> = (1..=36u64)
            .map(|p| decider.decide(p))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("{sigma}: {e}"))?;
        // Rejections need a window sized by the requested difference, not
        // the reduced one.
        let d = sigma.domain().len() as u32;
        let window = (1..=36u64)
            .map(|p| {
                let e = apseq::arith::factor_u64(p).into_values().max().unwrap_or(0);
                default_window(p, sigma.max_len(), d * e, 1 << 20)
            })
            .max()
            .unwrap_or(10_000);
        let prefix = sigma.fixed_point_prefix(&seed, window).map_err(|e| e.to_string())?;
        for dec in &decisions {
            let residues: Vec<(u64, Letter)> =
                dec.witnesses.iter().map(|w| (w.residue, w.letter)).collect();
            let expected = expand(&residues, dec.reduced, dec.requested);
            let scanned = scanned_constants(&prefix, dec.requested)?;
            ensure!(
                scanned == expected,
                "{sigma}, p = {}: decided {expected:?}, scan {scanned:?}",
                dec.requested
            );
        }
    }
    Ok(())
}

fn host_matches_matrix_algorithm() -> Outcome {
    let mut cases = vec![corpus::proper_01_0110(), corpus::fibonacci()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x2_1E77E2);
    while cases.len() < 40 {
        let len0 = rng.gen_range(2..=5);
        let len1 = rng.gen_range(1..=5);
        if len0 == len1 {
            continue;
        }
        let mut image = |len: usize| {
            let mut w = vec![0];
            w.extend((1..len).map(|_| rng.gen_range(0..2)));
            Word::new(w)
        };
        let images = vec![image(len0), image(len1)];
        let alphabet = Alphabet::digits(2);
        let sigma = Morphism::new(alphabet.clone(), alphabet, images).expect("valid images");
        if sigma.is_primitive() && algorithm_one_spectrum(&sigma).is_ok() {
            cases.push(sigma);
        }
    }
    for sigma in &cases {
        let host = host_two_letter(sigma).map_err(|e| format!("{sigma}: {e}"))?;
        let alg = algorithm_one_spectrum(sigma).map_err(|e| format!("{sigma}: {e}"))?;
        ensure!(host == alg, "{sigma}: host {host}, matrix algorithm {alg}");
    }
    Ok(())
}

fn positional_refinement() -> Outcome {
    for sigma in corpus::constant_length() {
        let ctx = GraphContext::new(&sigma, None).map_err(|e| e.to_string())?;
        let g = &ctx.graph;
        let id = Morphism::identity(ctx.sigma.domain());
        for m in 0..=3 {
            let n = g.difference(m).map_err(|e| e.to_string())?;
            for k in 0..n {
                let here = g.alphabet_at(&id, k, m).map_err(|e| e.to_string())?;
                let mut union = BTreeSet::new();
                for j in 0..g.length() as u64 {
                    union.extend(g.alphabet_at(&id, k + j * n, m + 1).map_err(|e| e.to_string())?);
                }
                ensure!(here == union, "{sigma}: k = {k}, m = {m}");
            }
        }
    }
    Ok(())
}

fn singleton_growth() -> Outcome {
    let phi = corpus::four_to_three_coding();
    for sigma in corpus::constant_length() {
        let ctx = GraphContext::new(&sigma, None).map_err(|e| e.to_string())?;
        let mut codings = vec![Morphism::identity(ctx.sigma.domain())];
        if ctx.sigma.domain().len() == 4 {
            codings.push(phi.clone());
        }
        for coding in &codings {
            let reports = ctx.graph.level_reports(coding, 5).map_err(|e| e.to_string())?;
            let l = ctx.graph.length() as u64;
            for w in reports.windows(2) {
                ensure!(
                    w[1].singleton_count >= l * w[0].singleton_count,
                    "{sigma}: s_{} = {} < {l}·{}",
                    w[1].level,
                    w[1].singleton_count,
                    w[0].singleton_count
                );
                ensure!(
                    w[1].new_essential_periods.is_empty()
                        == (w[1].singleton_count == l * w[0].singleton_count),
                    "{sigma}: new periods at level {} disagree with the counts",
                    w[1].level
                );
            }
        }
    }
    Ok(())
}

fn integral_recurrences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for _ in 0..200 {
        let m = random_matrix(&mut rng, 5);
        let rec = m.minimal_recurrence().map_err(|e| format!("{e}\n{m}"))?;
        let d = m.rows();
        let powers: Vec<_> = (0..=rec.rank + d + 1).map(|k| m.row_power(k)).collect();
        for k in rec.rank + 1..=rec.rank + d {
            let base = k - rec.rank - 1;
            let combo: Vec<BigInt> = (0..d)
                .map(|j| {
                    rec.coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, a)| a * &powers[base + i].0[j])
                        .sum()
                })
                .collect();
            ensure!(combo == powers[k].0, "recurrence fails at k = {k} for\n{m}");
        }
    }
    Ok(())
}

type Check = (&'static str, fn() -> Outcome);

fn property_suites() -> Outcome {
    let parts: [Check; 6] = [
        ("(a) zero row power modulo p", nilpotent_exponent_property),
        ("(b) decisions vs prefix scans", decisions_match_oracle),
        ("(c) two-letter formula vs matrix algorithm", host_matches_matrix_algorithm),
        ("(d) positional refinement", positional_refinement),
        ("(e) singleton counts grow by l", singleton_growth),
        ("(f) integral recurrences", integral_recurrences),
    ];
    let mut failures = Vec::new();
    for (name, f) in parts {
        let start = Instant::now();
        let result = f();
        println!("      {name}: {} ({:.2?})", if result.is_ok() { "ok" } else { "FAILED" }, start.elapsed());
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [Check; 10] = [
        ("spectrum of 0->01, 1->0110 and 1M^2", proper_example_spectrum),
        ("differences 2, 3, 6, 12 on 0->01, 1->0110", proper_example_decisions),
        ("six-letter column sums and trivial spectrum", six_letter_matrix),
        ("height 3 and divisors of 3·4^n", length_four_height_three),
        ("length 3, height 2: no constant subsequence", two_class_graph),
        ("length 5: essential period 10 for letter 1", six_vertex_graph),
        ("coded length-3 sequence: difference 2 on letter a", coded_graph),
        ("length 2, height 3: unbounded essential periods", unbounded_periods),
        ("non-proper three-letter example: prefix scans", open_example_scan),
        ("randomized property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        match result {
            Ok(()) => println!("PASS {:>2}  {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2}  {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
