//! Exit criteria. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fails.

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use geonil::cli;
use geonil::dynmap::{ExampleInstance, ExampleName, FieldMap, IntMap, Point, PointSpace};
use geonil::ff::{prime_power, Field, FieldRef};
use geonil::fib::{fibonacci, generator_bound_check, verify_lemma5, FibGroup};
use geonil::mpoly::{parse_poly_with, FieldPoly, MultiPoly, DEFAULT_TERM_BUDGET};
use geonil::orbits::{
    brent, depth_profile, orbit_status, periodic_points, rho_stats, trajectory, OrbitOutcome, DEFAULT_ORBIT_BUDGET,
    DEFAULT_SCAN_CAP,
};
use geonil::search::{run_search, Classification, SearchMode, SearchResult, SearchSpace, Shard};
use geonil::theorems::{
    thm4_cross_checks, verify_lemma5_suite, verify_non_uniformity, verify_thm3, verify_thm4, Budgets, Subject,
    Variant, Verdict, NON_UNIFORMITY_WITNESS, THM4_DEPTH_OFFSET,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Brute-force oracle for Example 1: its own GF(p) / GF(p^2) arithmetic
// (t^2 = r for a non-residue r), full enumeration of Y, and orbit following
// with a visited set.

#[derive(Clone, Copy)]
struct Gf {
    p: u64,
    m: u32,
    r: u64,
}

type E = (u64, u64);

impl Gf {
    fn new(p: u64, m: u32) -> Gf {
        assert!(m == 1 || m == 2);
        let squares: HashSet<u64> = (1..p).map(|x| x * x % p).collect();
        let r = (2..p).find(|x| !squares.contains(x)).unwrap_or(1);
        Gf { p, m, r }
    }
    fn elems(&self) -> Vec<E> {
        let hi = if self.m == 2 { self.p } else { 1 };
        (0..hi).flat_map(|b| (0..self.p).map(move |a| (a, b))).collect()
    }
    fn c(&self, n: i64) -> E {
        (n.rem_euclid(self.p as i64) as u64, 0)
    }
    fn add(&self, x: E, y: E) -> E {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }
    fn sub(&self, x: E, y: E) -> E {
        ((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }
    fn mul(&self, x: E, y: E) -> E {
        let p = self.p;
        (
            (x.0 * y.0 + x.1 * y.1 % p * self.r) % p,
            (x.0 * y.1 + x.1 * y.0) % p,
        )
    }
    fn pow(&self, x: E, k: u32) -> E {
        (0..k).fold((1, 0), |acc, _| self.mul(acc, x))
    }
}

/// Max depth over Y(F_{p^m}) for Example 1 with parameter `a`, or `None`
/// if some orbit never reaches the origin.
fn example1_oracle_max_depth(p: u64, a: i64, m: u32) -> Option<u64> {
    let f = Gf::new(p, m);
    let a = f.c(a);
    let zero = (0, 0);
    let step = |(x, y, z): (E, E, E)| {
        let d = f.sub(x, y);
        let z2 = f.mul(z, z);
        let az2 = f.mul(a, z2);
        let c1 = f.mul(f.mul(f.add(f.mul(x, x), az2), d), f.pow(z, 3));
        let inner = f.add(f.mul(y, y), az2);
        let c2 = f.mul(f.mul(f.add(f.mul(inner, inner), f.mul(a, f.pow(z, 4))), d), z);
        let c3 = f.mul(d, f.pow(z, 5));
        (c1, c2, c3)
    };
    let els = f.elems();
    let mut worst = 0;
    for &x in &els {
        for &y in &els {
            for &z in &els {
                let on_y = f.sub(f.add(f.mul(x, x), f.mul(a, f.mul(z, z))), f.mul(y, z)) == zero;
                if !on_y {
                    continue;
                }
                let mut cur = (x, y, z);
                let mut seen = HashSet::new();
                let mut depth = 0;
                while cur != (zero, zero, zero) {
                    if !seen.insert(cur) {
                        return None;
                    }
                    cur = step(cur);
                    depth += 1;
                }
                worst = worst.max(depth);
            }
        }
    }
    Some(worst)
}

// ---------------------------------------------------------------------------

fn c1_example1_geometric_nilpotency() -> Check {
    let mut scanned = 0;
    for p in [3u64, 5, 7] {
        for a in 0..3 {
            let ex = ExampleInstance::example1(a);
            for m in 1..=2 {
                let sys = ex.over(&Field::extension(p, m).map_err(err)?);
                let t = depth_profile(&sys.map_eval, &sys.variety_eval, &sys.fixed_point, DEFAULT_ORBIT_BUDGET)
                    .map_err(err)?;
                ensure(
                    t.non_terminating_count == 0 && t.budget_exhausted_count == 0,
                    format!("p={p} a={a} m={m}: {} non-terminating, {} exhausted", t.non_terminating_count, t.budget_exhausted_count),
                )?;
                scanned += t.point_count;
            }
        }
    }
    Ok(format!("18 fields, {scanned} points of Y, all reach the origin"))
}

fn c2_example1_spot_value() -> Check {
    let f = Field::prime(5).map_err(err)?;
    let sys = ExampleInstance::example1(1).over(&f);
    let start = Point::parse("2,0,1", &f)?;
    let path: Vec<String> = trajectory(&sys.map_eval, &start, &sys.fixed_point, DEFAULT_ORBIT_BUDGET)
        .iter()
        .map(|p| p.format(&f))
        .collect();
    let expected = ["(2,0,1)", "(0,4,2)", "(2,2,2)", "(0,0,0)"];
    ensure(path == expected, format!("trajectory {path:?}"))?;
    let depth = orbit_status(&sys.map_eval, &start, &sys.fixed_point, DEFAULT_ORBIT_BUDGET).depth();
    ensure(depth == Some(3), format!("depth {depth:?}"))?;
    Ok(path.join(" -> "))
}

fn c3_non_uniformity() -> Check {
    let (p, a, m) = NON_UNIFORMITY_WITNESS;
    let base = example1_oracle_max_depth(p, a, 1).ok_or("oracle saw a cycle over F_p")?;
    let ext = example1_oracle_max_depth(p, a, m).ok_or("oracle saw a cycle over the extension")?;
    ensure(ext > base, format!("oracle: max depth {base} at m=1, {ext} at m={m}"))?;
    let report = verify_non_uniformity(&Subject::from(&ExampleInstance::example1(a)), p, m, Budgets::default())
        .map_err(err)?;
    ensure(report.verdict == Verdict::Verified, format!("library verdict {}", report.verdict))?;
    let seq = report.stats.extra["max_depth_sequence"].clone();
    ensure(
        seq == serde_json::json!([base, ext]),
        format!("library sequence {seq} disagrees with oracle [{base}, {ext}]"),
    )?;
    Ok(format!("p={p} a={a}: max depth {base} over F_{p}, {ext} over F_{p}^{m} (oracle and library agree)"))
}

fn c4_thm3_corrected() -> Check {
    let mut seen = Vec::new();
    for p in [2u64, 3, 5] {
        let r = verify_thm3(Variant::Corrected, p, 2, Budgets::default()).map_err(err)?;
        let max = r.stats.max_depth.unwrap_or(0);
        ensure(max <= p + 1, format!("p={p}: max depth {max} > {}", p + 1))?;
        ensure(
            r.stats.extra["exact_law_holds"] == serde_json::json!(true),
            format!("p={p}: exact law broken {} times", r.stats.extra["exact_law_breaks"]),
        )?;
        ensure(r.verdict == Verdict::Verified, format!("p={p}: verdict {}", r.verdict))?;
        seen.push(format!("p={p} max={max}"));
    }
    Ok(format!("exact law holds; {}", seen.join(", ")))
}

fn c5_thm4() -> Check {
    // Literal variant.
    let r = verify_thm4(Variant::Literal, 3, 1, Budgets::default()).map_err(err)?;
    ensure(r.verdict == Verdict::Falsified, format!("literal p=3 verdict {}", r.verdict))?;
    let has_222 = r
        .witnesses
        .iter()
        .any(|w| w.point == Some(vec![vec![2], vec![2], vec![2]]) && w.cycle_len == Some(1));
    ensure(has_222, "literal p=3: fixed point (2,2,2) not among witnesses")?;
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let code = cli::run(
        ["geonil", "verify", "--claim", "thm4", "--variant", "literal", "--p", "3"],
        &mut out,
        &mut errs,
    );
    ensure(code == cli::EXIT_FALSIFIED, format!("literal exit code {code}"))?;
    ensure(String::from_utf8_lossy(&out).contains("(2,2,2)"), "witness (2,2,2) not printed")?;

    // Corrected variant, as stated.
    let mut problems = Vec::new();
    for p in [3u64, 5, 7] {
        let r = verify_thm4(Variant::Corrected, p, 2, Budgets::default()).map_err(err)?;
        if r.verdict != Verdict::Verified {
            let w = r.witnesses.iter().find(|w| w.role == "cycle");
            problems.push(format!(
                "corrected p={p}: {} (cycle at {:?})",
                r.verdict,
                w.and_then(|w| w.point.clone())
            ));
        }
    }
    let mut stated = (0, 0);
    let mut observed = (0, 0);
    for p in [3u64, 5, 7] {
        let field = Field::prime(p).map_err(err)?;
        for c in thm4_cross_checks(&field, DEFAULT_ORBIT_BUDGET).map_err(err)? {
            stated.1 += 1;
            observed.1 += 1;
            stated.0 += c.agrees(2) as u64;
            observed.0 += c.agrees(THM4_DEPTH_OFFSET) as u64;
        }
    }
    if stated.0 != stated.1 {
        problems.push(format!(
            "depth = hit + 2 holds on {}/{} orbits (depth = hit + {THM4_DEPTH_OFFSET} holds on {}/{})",
            stated.0, stated.1, observed.0, observed.1
        ));
    }
    if problems.is_empty() {
        Ok("literal falsified at (2,2,2) with exit 2; corrected verified; cross-check holds".into())
    } else {
        Err(format!("literal half passes; {}", problems.join("; ")))
    }
}

fn c6_lemma5() -> Check {
    let r = verify_lemma5_suite(50, Budgets::default()).map_err(err)?;
    ensure(r.verdict == Verdict::Verified, format!("suite verdict {}", r.verdict))?;
    let z5 = verify_lemma5(&FibGroup::additive(5), 1).map_err(err)?;
    ensure(z5.hit_index == 4 && z5.cycle_len == 20, format!("Z/5 seed 1: hit {} L {}", z5.hit_index, z5.cycle_len))?;
    ensure(z5.identity_at_l_minus_1 && z5.bijective, "Z/5 seed 1: structure checks failed")?;
    Ok(format!("{} (n, a0) pairs; Z/5 seed 1 hits at 4, L = 20", r.stats.extra["checks"]))
}

fn fields_up_to(q_max: u64) -> Vec<FieldRef> {
    (2..=q_max)
        .filter_map(prime_power)
        .map(|(p, m)| Field::extension(p, m).expect("small field"))
        .collect()
}

fn c7_generator_bound() -> Check {
    let mut checked = 0;
    let mut failures = Vec::new();
    for f in fields_up_to(64) {
        let order = BigInt::from(f.q() - 1);
        for k in (1..).take_while(|&k| BigInt::from(fibonacci(k)) < order) {
            let r = generator_bound_check(&f, k).map_err(err)?;
            checked += 1;
            if let Some(i) = r.first_identity {
                failures.push(format!("q={} k={k} (F_k={}): a_{i} = 1", f.q(), r.fib_k));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{checked} (field, k) pairs"))
    } else {
        Err(format!("{} of {checked} (field, k) pairs fail: {}", failures.len(), failures.join(", ")))
    }
}

fn random_field_map(rng: &mut ChaCha8Rng, f: &FieldRef, n: usize) -> Vec<Point> {
    let space = PointSpace::new(f.q(), n);
    let size = space.size().unwrap();
    (0..size).map(|_| space.point(f, rng.gen_range(0..size))).collect()
}

fn brute_periodic(step: impl Fn(&Point) -> Point, points: &[Point]) -> HashSet<Point> {
    let n = points.len();
    points
        .iter()
        .filter(|p| {
            let mut cur = step(p);
            for _ in 0..n {
                if &cur == *p {
                    return true;
                }
                cur = step(&cur);
            }
            false
        })
        .cloned()
        .collect()
}

fn all_examples() -> Vec<ExampleInstance> {
    let mut v: Vec<ExampleInstance> = (0..3).map(ExampleInstance::example1).collect();
    v.extend(ExampleName::ALL[1..].iter().map(|&n| ExampleInstance::named(n)));
    v
}

fn c8_oracle_equivalences() -> Check {
    let f3 = Field::prime(3).map_err(err)?;
    let space = PointSpace::new(3, 3);
    let cube: Vec<Point> = (0..27).map(|i| space.point(&f3, i)).collect();
    // (a) symbolic second iterate vs applying twice.
    for ex in all_examples() {
        let t: FieldMap = ex.map.reduce(&f3);
        let t2 = t.iterate_symbolic(2, DEFAULT_TERM_BUDGET).map_err(err)?;
        let once = t.compile();
        for p in &cube {
            let symbolic = t2.eval_map(p).map_err(err)?;
            ensure(symbolic == once.apply(&once.apply(p)), format!("{}: T^2 mismatch at {}", ex.name, p.format(&f3)))?;
        }
    }
    // (b) Brent vs a visited-map cycle finder.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let succ: Vec<u32> = (0..64).map(|_| rng.gen_range(0..64)).collect();
        let start = rng.gen_range(0..64u32);
        let mut first_seen = HashMap::new();
        let mut cur = start;
        let mut i = 0u64;
        let (mu, lambda) = loop {
            if let Some(&j) = first_seen.get(&cur) {
                break (j, i - j);
            }
            first_seen.insert(cur, i);
            cur = succ[cur as usize];
            i += 1;
        };
        match brent(start, None, |&x| succ[x as usize], 1000) {
            OrbitOutcome::EnteredCycle { tail, cycle_len, .. } => ensure(
                (tail, cycle_len) == (mu, lambda),
                format!("trial {trial}: brent ({tail},{cycle_len}) vs ({mu},{lambda})"),
            )?,
            other => return Err(format!("trial {trial}: {other:?}")),
        }
    }
    // (c) periodic points vs the definition.
    for ex in all_examples() {
        let m = ex.map.reduce(&f3).compile();
        let lib: HashSet<Point> = periodic_points(&m, DEFAULT_SCAN_CAP).map_err(err)?.into_iter().collect();
        ensure(lib == brute_periodic(|p| m.apply(p), &cube), format!("{}: periodic points differ", ex.name))?;
    }
    for q in [2u64, 3] {
        let f = Field::prime(q).map_err(err)?;
        let sp = PointSpace::new(q, 2);
        let plane: Vec<Point> = (0..q * q).map(|i| sp.point(&f, i)).collect();
        for _ in 0..50 {
            let coeff = |rng: &mut ChaCha8Rng| BigInt::from(rng.gen_range(0..q));
            let mut terms = Vec::new();
            for i in 0..q as u32 {
                for j in 0..q as u32 {
                    terms.push((vec![i, j], coeff(&mut rng)));
                }
            }
            let f1 = MultiPoly::from_terms(geonil::mpoly::Integers, 2, terms.clone()).map_err(err)?;
            let g1 = MultiPoly::from_terms(
                geonil::mpoly::Integers,
                2,
                terms.into_iter().map(|(e, _)| (e, coeff(&mut rng))),
            )
            .map_err(err)?;
            let m = IntMap::new(vec![f1, g1]).map_err(err)?.reduce(&f).compile();
            let lib: HashSet<Point> = periodic_points(&m, DEFAULT_SCAN_CAP).map_err(err)?.into_iter().collect();
            ensure(lib == brute_periodic(|p| m.apply(p), &plane), format!("random map over F_{q}^2 differs"))?;
        }
        // And genuinely arbitrary self-maps of the plane, through the graph.
        for _ in 0..50 {
            let table = random_field_map(&mut rng, &f, 2);
            let lib = geonil::orbits::FunctionalGraph::from_fn(table.len(), |i| sp.index(&table[i]) as usize);
            let brute = brute_periodic(|p| table[sp.index(p) as usize].clone(), &plane);
            let libset: HashSet<Point> = lib.periodic_nodes().map(|v| sp.point(&f, v as u64)).collect();
            ensure(libset == brute, format!("random self-map of F_{q}^2 differs"))?;
        }
    }
    Ok("iterate/eval agree on F_3^3; Brent = naive on 200 maps; periodic points = brute force".into())
}

fn c9_rho_stats() -> Check {
    let f5 = Field::prime(5).map_err(err)?;
    let h = parse_poly_with("t^2 + 1", &["t"], &[]).map_err(err)?.reduce(&f5);
    let s = rho_stats(&h).map_err(err)?;
    ensure(s.components.len() == 1, format!("{} components", s.components.len()))?;
    let c = &s.components[0];
    ensure(
        c.cycle_length == 3 && c.cycle == vec![0, 1, 2] && c.tail_nodes == 2 && c.max_tail == 1,
        format!("{c:?}"),
    )?;
    let mut fields = 0;
    for f in fields_up_to(64) {
        for a in 0..3 {
            let h: FieldPoly = parse_poly_with("t^2 + a", &["t"], &[("a", BigInt::from(a))]).map_err(err)?.reduce(&f);
            let s = rho_stats(&h).map_err(err)?;
            ensure(s.node_count() == f.q(), format!("q={} a={a}: {} nodes", f.q(), s.node_count()))?;
        }
        fields += 1;
    }
    Ok(format!("t^2+1 over F_5 exact; component sizes sum to q over {fields} fields"))
}

fn c10_search_smoke() -> Check {
    let mut space = SearchSpace::new(2, 2, 1, 3);
    space.keep_all = true;
    let whole = run_search(&space).map_err(err)?;
    // 5 monomials of degree 1..2, two coordinates, 2 variety monomials.
    let expected_total = 2u64.pow(10) * (2u64.pow(2) - 1);
    ensure(whole.summary.total == expected_total, format!("total {}", whole.summary.total))?;
    ensure(whole.summary.classified() == expected_total, "counts do not conserve")?;
    ensure(whole.candidates.len() as u64 == expected_total, "not every pair recorded")?;

    let mut merged: Option<SearchResult> = None;
    for index in 0..4 {
        let mut s = space.clone();
        s.shard = Shard { index, count: 4 };
        let part = run_search(&s).map_err(err)?;
        ensure(part.summary.classified() == part.summary.total, "shard counts do not conserve")?;
        merged = Some(match merged {
            None => part,
            Some(m) => m.merge(part),
        });
    }
    let merged = merged.unwrap();
    ensure(merged.json_lines() == whole.json_lines(), "4 shards differ from the unsharded run")?;
    ensure(run_search(&space).map_err(err)?.json_lines() == whole.json_lines(), "rerun differs")?;

    let mut random = space.clone();
    random.mode = SearchMode::Random { samples: 200 };
    random.seed = 99;
    ensure(
        run_search(&random).map_err(err)?.json_lines() == run_search(&random).map_err(err)?.json_lines(),
        "seeded random runs differ",
    )?;

    // Cycle rejections re-checked by a separate orbit run.
    let mut fields = HashMap::new();
    for c in &whole.candidates {
        if let Classification::RejectedCycle { m, start, cycle_len, .. } = &c.classification {
            let f = fields.entry(*m).or_insert_with(|| Field::extension(2, *m).unwrap()).clone();
            let (map, _) = space.pair(c.index);
            let compiled = map.reduce(&f).compile();
            let start = Point::from_slice(&[f.elem(&start[0]).map_err(err)?, f.elem(&start[1]).map_err(err)?]);
            match orbit_status(&compiled, &start, &Point::zeros(2), DEFAULT_ORBIT_BUDGET) {
                OrbitOutcome::EnteredCycle { cycle_len: l, .. } if l == *cycle_len => {}
                other => return Err(format!("pair {}: witness re-run gives {other:?}", c.index)),
            }
        }
    }
    let s = whole.summary;
    Ok(format!(
        "{} pairs: {} cycle, {} uniform, {} inconclusive, {} surviving; shards and reruns identical",
        s.total, s.rejected_cycle, s.rejected_uniform, s.inconclusive, s.surviving
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("1 example1 geometric nilpotency", c1_example1_geometric_nilpotency, Duration::from_secs(60)),
        ("2 example1 spot orbit", c2_example1_spot_value, Duration::from_secs(60)),
        ("3 non-uniformity evidence", c3_non_uniformity, Duration::from_secs(300)),
        ("4 example 2 corrected depth law", c4_thm3_corrected, Duration::from_secs(30)),
        ("5 example 3 literal and corrected", c5_thm4, Duration::from_secs(300)),
        ("6 fibonacci return suite", c6_lemma5, Duration::from_secs(10)),
        ("7 generator lower bound", c7_generator_bound, Duration::from_secs(10)),
        ("8 oracle equivalences", c8_oracle_equivalences, Duration::from_secs(300)),
        ("9 rho stats", c9_rho_stats, Duration::from_secs(60)),
        ("10 search smoke test", c10_search_smoke, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        let result = match result {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; took {elapsed:.1?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{elapsed:.1?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{elapsed:.1?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
