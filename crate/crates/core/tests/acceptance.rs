//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dutchbook::algebra::EventAlgebra;
use dutchbook::coherence::{
    assess, fundamental_interval, logical_consistency, Book, LogicalVerdict, ProbInterval, Verdict,
};
use dutchbook::exchange::{mixture_approximation, restrict, xi_state};
use dutchbook::formula::{parse, Formula, Universe, World};
use dutchbook::rational::{int, ratio, Rational};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(number: usize, name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<String, String>) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let outcome = match result {
        Ok(detail) => match limit {
            Some(limit) if elapsed > limit => Outcome {
                pass: false,
                detail: format!("{detail}; took {elapsed:.2?}, limit {limit:?}"),
            },
            _ => Outcome { pass: true, detail },
        },
        Err(detail) => Outcome { pass: false, detail },
    };
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {number}: {name}: {} ({elapsed:.2?})", outcome.detail);
    outcome.pass
}

const NAMES: [&str; 4] = ["A", "B", "C", "D"];

fn random_formula(rng: &mut ChaCha8Rng, universe: &Universe, depth: u32) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        let name = &universe.names()[rng.gen_range(0..universe.len())];
        let v = Formula::var(universe, name).unwrap();
        return if rng.gen_bool(0.3) { Formula::not(v) } else { v };
    }
    let l = random_formula(rng, universe, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::not(l),
        1 => Formula::and(l, random_formula(rng, universe, depth - 1)),
        _ => Formula::or(l, random_formula(rng, universe, depth - 1)),
    }
}

fn grid_probability(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(0..=10), 10)
}

struct RandomBook {
    universe: Universe,
    formulas: Vec<Formula>,
    book: Book,
}

fn random_book(rng: &mut ChaCha8Rng, max_assessments: usize, price: impl Fn(&mut ChaCha8Rng, &EventAlgebra, &Formula) -> Rational) -> RandomBook {
    loop {
        let vars = rng.gen_range(1..=4);
        let universe = Universe::new(NAMES[..vars].iter().copied()).unwrap();
        let constraint = rng.gen_bool(0.25).then(|| random_formula(rng, &universe, 2));
        let Ok(algebra) = EventAlgebra::build(universe.clone(), constraint) else {
            continue;
        };
        let algebra = Arc::new(algebra);
        let mut book = Book::new(algebra.clone());
        let mut formulas = Vec::new();
        for _ in 0..rng.gen_range(1..=max_assessments) {
            let f = random_formula(rng, &universe, 2);
            let p = price(rng, &algebra, &f);
            book.push_formula(&f, p).unwrap();
            formulas.push(f);
        }
        return RandomBook { universe, formulas, book };
    }
}

/// Independent check of a verdict: formulas are evaluated world by world
/// rather than through the algebra's events.
fn independent_check(rb: &RandomBook, verdict: &Verdict) -> Result<(), String> {
    let worlds: &[World] = rb.book.algebra().worlds();
    let prices: Vec<Rational> = rb.book.probabilities().cloned().collect();
    match verdict {
        Verdict::Consistent(state) => {
            let m = state.masses();
            if m.iter().any(Signed::is_negative) || m.iter().sum::<Rational>() != Rational::one() {
                return Err("state is not a distribution".into());
            }
            for (f, p) in rb.formulas.iter().zip(&prices) {
                let v: Rational = worlds.iter().zip(m).filter(|(w, _)| f.evaluate(w)).map(|(_, x)| x).sum();
                if v != *p {
                    return Err(format!("state misses price of {f}"));
                }
            }
        }
        Verdict::Inconsistent(stakes) => {
            let mut top = None::<Rational>;
            for w in worlds {
                let balance: Rational = rb
                    .formulas
                    .iter()
                    .zip(&prices)
                    .zip(stakes)
                    .map(|((f, p), s)| s * (p - if f.evaluate(w) { int(1) } else { int(0) }))
                    .sum();
                if balance > int(-1) {
                    return Err(format!("balance {balance} in world {w}"));
                }
                top = Some(top.map_or(balance.clone(), |t| t.max(balance)));
            }
            if top != Some(int(-1)) {
                return Err("stakes are not normalized".into());
            }
        }
    }
    Ok(())
}

fn criterion_1() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut consistent, mut inconsistent) = (0, 0);
    for i in 0..600 {
        let rb = random_book(&mut rng, 5, |rng, _, _| grid_probability(rng));
        let verdict = assess(&rb.book).map_err(|e| format!("book {i}: {e}"))?;
        independent_check(&rb, &verdict).map_err(|e| format!("book {i} over {:?}: {e}", rb.universe.names()))?;
        if verdict.is_consistent() {
            consistent += 1;
        } else {
            inconsistent += 1;
        }
    }
    if consistent == 0 || inconsistent == 0 {
        return Err(format!("one-sided sample: {consistent} consistent, {inconsistent} inconsistent"));
    }
    Ok(format!("600 books, {consistent} consistent and {inconsistent} inconsistent, every certificate confirmed"))
}

fn criterion_2() -> Result<String, String> {
    let u = Universe::new(["X1", "X2", "X3"]).unwrap();
    let constraint = parse("~(X1 & X2) & ~(X1 & X3) & ~(X2 & X3)", &u).unwrap();
    let algebra = EventAlgebra::build(u.clone(), Some(constraint)).map_err(|e| e.to_string())?;
    let atoms: Vec<String> = algebra.worlds().iter().map(|w| w.to_string()).collect();
    if atoms != ["000", "001", "010", "100"] {
        return Err(format!("atoms {atoms:?}"));
    }
    let not_x1 = algebra.event_of(&parse("~X1", &u).unwrap()).unwrap();
    let members: Vec<String> = not_x1.members().map(|i| algebra.worlds()[i].to_string()).collect();
    if members != ["000", "001", "010"] {
        return Err(format!("~X1 = {members:?}"));
    }
    let x1 = algebra.event_of(&parse("X1", &u).unwrap()).unwrap();
    let x2 = algebra.event_of(&parse("X2", &u).unwrap()).unwrap();
    match logical_consistency(&algebra, &[x1, x2]).map_err(|e| e.to_string())? {
        LogicalVerdict::Unsatisfiable => Ok("4 atoms 000 001 010 100; ~X1 has 3 worlds; {X1, X2} unsatisfiable".into()),
        other => Err(format!("{{X1, X2}} gave {other:?}")),
    }
}

/// Gaussian elimination over the rationals. Returns `None` for a singular
/// square system.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of `{x >= 0 : Ax = b}`, for `A` of full row rank, by trying
/// every square column basis.
fn vertices(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Vec<Rational>> {
    let (m, n) = (a.len(), a[0].len());
    let mut out = Vec::new();
    for basis in combinations(n, m) {
        let sub: Vec<Vec<Rational>> = a.iter().map(|row| basis.iter().map(|&j| row[j].clone()).collect()).collect();
        if let Some(xb) = solve_square(sub, b.to_vec()) {
            if xb.iter().all(|x| !x.is_negative()) {
                let mut x = vec![Rational::zero(); n];
                for (&j, v) in basis.iter().zip(xb) {
                    x[j] = v;
                }
                out.push(x);
            }
        }
    }
    out
}

fn criterion_3() -> Result<String, String> {
    let u = Universe::new(["X1", "X2"]).unwrap();
    let algebra = Arc::new(EventAlgebra::free(u.clone()).unwrap());
    let worlds = algebra.worlds().to_vec();
    let f = |s: &str| parse(s, &u).unwrap();
    let indicator = |g: &Formula| -> Vec<Rational> {
        worlds.iter().map(|w| if g.evaluate(w) { int(1) } else { int(0) }).collect()
    };
    let (x1, x2) = (f("X1"), f("X2"));
    let queries = [(f("X1 & X2"), "conjunction"), (f("X1 | X2"), "disjunction")];
    let grid: Vec<Rational> = (0..5).map(|i| ratio(i, 4)).collect();
    let mut checked = 0;
    for p in &grid {
        for q in &grid {
            let mut book = Book::new(algebra.clone());
            book.push_formula(&x1, p.clone()).unwrap();
            book.push_formula(&x2, q.clone()).unwrap();
            let a = vec![vec![int(1); worlds.len()], indicator(&x1), indicator(&x2)];
            let b = vec![int(1), p.clone(), q.clone()];
            let verts = vertices(&a, &b);
            for (query, kind) in &queries {
                let (lo, hi) = if *kind == "conjunction" {
                    ((p + q - int(1)).max(int(0)), p.clone().min(q.clone()))
                } else {
                    (p.clone().max(q.clone()), (p + q).min(int(1)))
                };
                let event = algebra.event_of(query).unwrap();
                let lp = fundamental_interval(&book, &event).map_err(|e| e.to_string())?;
                if lp.bounds() != Some((&lo, &hi)) {
                    return Err(format!("LP {kind} at ({p}, {q}): {:?}", lp.bounds()));
                }
                let ind = indicator(query);
                let values: Vec<Rational> = verts
                    .iter()
                    .map(|x| x.iter().zip(&ind).map(|(a, b)| a * b).sum())
                    .collect();
                let (vlo, vhi) = (values.iter().min().cloned(), values.iter().max().cloned());
                if vlo != Some(lo.clone()) || vhi != Some(hi.clone()) {
                    return Err(format!("vertex oracle {kind} at ({p}, {q}): {vlo:?} {vhi:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} intervals match the closed forms by LP and by vertex enumeration"))
}

fn criterion_4() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut small: Vec<Rational> = (1..=20).flat_map(|d| (0..=d).map(move |n| ratio(n, d))).collect();
    small.sort();
    small.dedup();
    let mut found = 0;
    let mut degenerate = 0;
    let mut attempts = 0;
    while found < 50 {
        attempts += 1;
        if attempts > 10_000 {
            return Err("could not draw 50 consistent books".into());
        }
        // Prices drawn from a random state keep most books consistent.
        let rb = random_book(&mut rng, 4, |rng, algebra, f| {
            let weights: Vec<u32> = (0..algebra.len()).map(|_| rng.gen_range(0..4)).collect();
            let total: u32 = weights.iter().sum::<u32>().max(1);
            let hit: u32 = algebra.worlds().iter().zip(&weights).filter(|(w, _)| f.evaluate(w)).map(|(_, x)| x).sum();
            ratio(hit as i64, total as i64)
        });
        if !assess(&rb.book).map_err(|e| e.to_string())?.is_consistent() {
            continue;
        }
        let query = random_formula(&mut rng, &rb.universe, 2);
        let event = rb.book.algebra().event_of(&query).unwrap();
        let interval = fundamental_interval(&rb.book, &event).map_err(|e| e.to_string())?;
        let ProbInterval::Interval { lo, hi, .. } = &interval else {
            return Err("consistent book with an empty interval".into());
        };
        if lo == hi {
            degenerate += 1;
        }
        for r in &small {
            let extended = rb.book.with(event.clone(), r.clone()).unwrap();
            let inside = lo <= r && r <= hi;
            let ok = assess(&extended).map_err(|e| e.to_string())?.is_consistent();
            if inside != ok {
                return Err(format!("{query} := {r} with interval [{lo}, {hi}]: extends = {ok}"));
            }
        }
        found += 1;
    }
    Ok(format!("50 books x {} rationals agree with [lo, hi] ({degenerate} point intervals)", small.len()))
}

fn criterion_5() -> Result<String, String> {
    let mut checked = 0;
    for big_n in 1..=8usize {
        for k in 0..=big_n {
            let xi = xi_state(big_n, k).map_err(|e| e.to_string())?;
            let members: Vec<u32> = (0u32..1 << big_n).filter(|m| m.count_ones() as usize == k).collect();
            let total = members.len() as i64;
            for n in 1..=big_n {
                let closed = restrict(&xi, n).map_err(|e| e.to_string())?;
                // Each pattern on the first n coordinates, counted by brute force.
                for pattern in 0u32..1 << n {
                    let hits = members.iter().filter(|m| *m & ((1 << n) - 1) == pattern).count() as i64;
                    let brute = ratio(hits, total);
                    let class = pattern.count_ones() as usize;
                    if closed.value(class) != &brute {
                        return Err(format!("N={big_n} K={k} n={n} pattern {pattern:b}: {} vs {brute}", closed.value(class)));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} miniterm values match enumeration for N <= 8"))
}

fn criterion_6() -> Result<String, String> {
    let big = mixture_approximation(&xi_state(1000, 500).map_err(|e| e.to_string())?, 3).map_err(|e| e.to_string())?;
    if big.sup_error >= ratio(1, 100) {
        return Err(format!("sup_error for N=1000 is {}", big.sup_error));
    }
    let mut errors = Vec::new();
    for t in [8usize, 16, 32, 64, 128] {
        let a = mixture_approximation(&xi_state(2 * t, t).map_err(|e| e.to_string())?, 3).map_err(|e| e.to_string())?;
        errors.push(a.sup_error);
    }
    if errors.windows(2).any(|w| w[1] > w[0]) {
        return Err(format!("family not monotone: {errors:?}"));
    }
    let shown: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
    Ok(format!("N=1000 sup_error {}; T=8..128 gives {}", big.sup_error, shown.join(", ")))
}

fn shipped_books() -> Vec<PathBuf> {
    let mut books: Vec<PathBuf> = std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("books"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "book"))
        .collect();
    books.sort();
    books
}

fn criterion_7() -> Result<String, String> {
    let books = shipped_books();
    let mut runs = 0;
    for book in &books {
        let book = book.to_str().unwrap();
        let commands: [&[&str]; 4] = [&["check", book], &["--json", "check", book], &["interval", book], &["--json", "interval", book]];
        for args in commands {
            let go = || Command::new(env!("CARGO_BIN_EXE_dutchbook")).args(args).output().unwrap();
            let (first, second) = (go(), go());
            if first.stdout != second.stdout || first.status.code() != second.status.code() {
                return Err(format!("{args:?} differs between runs"));
            }
            runs += 1;
        }
    }
    for args in [["exchange", "approx", "--xi", "1000,500", "--n", "3"], ["exchange", "restrict", "--xi", "8,3", "--n", "4"]] {
        let go = || Command::new(env!("CARGO_BIN_EXE_dutchbook")).args(args).output().unwrap();
        if go().stdout != go().stdout {
            return Err(format!("{args:?} differs between runs"));
        }
        runs += 1;
    }
    Ok(format!("{runs} commands over {} shipped books are bit-identical across runs", books.len()))
}

fn main() {
    let results = [
        criterion(1, "dichotomy on random books", Some(Duration::from_secs(60)), criterion_1),
        criterion(2, "constrained three-team algebra", None, criterion_2),
        criterion(3, "conjunction and disjunction intervals", Some(Duration::from_secs(10)), criterion_3),
        criterion(4, "intervals are closed and exact", Some(Duration::from_secs(60)), criterion_4),
        criterion(5, "exchangeable restriction identities", Some(Duration::from_secs(30)), criterion_5),
        criterion(6, "product mixture approximation", Some(Duration::from_secs(30)), criterion_6),
        criterion(7, "deterministic reports", None, criterion_7),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
