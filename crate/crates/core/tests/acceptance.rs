//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints a PASS/FAIL line; the process fails if any criterion does.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use inaccessible::inaccessibility::{
    chi, chi2_from_marginals, chi_c, chi_c_recursive, marginal_power_sum, power_sum,
    power_sum_identity_rhs, random_probability, ProbVector,
};
use inaccessible::lattice::{
    ideal_block_count, ideal_configurations_brute, max_accessible_brute, orbit_canonical, Statement,
};
use inaccessible::mes::{
    build, in_mes_set, marginals, q_from_bloch, reconstruct, sample, Membership,
};
use inaccessible::models::{classify, Model, ModelClass};
use inaccessible::quasiprob::{check_rules, g_counterexample, g_family_range, Valuation};
use inaccessible::qubit::{
    is_positive_semidefinite, mub_marginals, q_to_rho, random_density_with, rho_to_q, PurityMode,
};
use inaccessible::verify::{random_real_state, rank_of_marginal_map};
use inaccessible::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Named = (&'static str, fn(&mut Criterion));

#[derive(Default)]
struct Criterion {
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn within(&mut self, what: &str, deviation: f64, tol: f64) {
        self.check(
            format!("{what}: worst {deviation:.3e} (tol {tol:e})"),
            deviation <= tol,
        );
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Closed form written out independently of the library.
fn block_count_formula(dim: usize, depth: usize) -> usize {
    if dim.is_multiple_of(depth) {
        dim / depth
    } else {
        (dim / depth).saturating_sub(1)
    }
}

fn counting(c: &mut Criterion) {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for dim in 1..=12 {
        for depth in 1..=dim {
            let brute = max_accessible_brute(dim, depth).unwrap();
            let library = ideal_block_count(dim, depth);
            if brute != block_count_formula(dim, depth) || brute != library {
                mismatches.push((dim, depth, brute));
            }
        }
    }
    c.check(
        format!("formula = exhaustive search for 1 <= d <= D <= 12, mismatches {mismatches:?}"),
        mismatches.is_empty(),
    );
    c.check(
        "(5,2): formula 1 = search 1",
        max_accessible_brute(5, 2).unwrap() == 1 && block_count_formula(5, 2) == 1,
    );
    let elapsed = start.elapsed();
    c.check(
        format!("elapsed {elapsed:.2?} < 30 s"),
        elapsed < Duration::from_secs(30),
    );
}

fn examples(c: &mut Criterion) {
    let start = Instant::now();
    for dim in [2, 3] {
        for depth in 1..=dim {
            let class = classify(Model::new(dim, depth).unwrap());
            let ok = matches!(class, ModelClass::Classical { .. } | ModelClass::Useless);
            c.check(format!("({dim},{depth}) is {class:?}"), ok);
            let brute = max_accessible_brute(dim, depth).unwrap();
            c.check(
                format!("({dim},{depth}) search finds {brute} accessible level-d statements"),
                if depth == 1 { brute == dim } else { brute <= 1 },
            );
        }
    }
    let st = |a: usize, b: usize| Statement::from_atoms(4, [a, b]).unwrap();
    let expected: BTreeSet<BTreeSet<Statement>> = [
        [st(0, 1), st(2, 3)],
        [st(0, 2), st(1, 3)],
        [st(0, 3), st(1, 2)],
    ]
    .into_iter()
    .map(BTreeSet::from)
    .collect();
    let found: BTreeSet<BTreeSet<Statement>> = ideal_configurations_brute(4, 2)
        .unwrap()
        .into_iter()
        .map(|f| f.into_iter().collect())
        .collect();
    c.check(
        "(4,2) ideal configurations are exactly the three pairings",
        found == expected,
    );
    let orbits: BTreeSet<Vec<Statement>> = found
        .iter()
        .map(|f| orbit_canonical(4, &f.iter().copied().collect::<Vec<_>>()).unwrap())
        .collect();
    c.check(
        format!("(4,2) pairings form {} orbit(s)", orbits.len()),
        orbits.len() == 1,
    );
    let elapsed = start.elapsed();
    c.check(
        format!("elapsed {elapsed:.2?} < 1 s"),
        elapsed < Duration::from_secs(1),
    );
}

fn mes_structure(c: &mut Criterion) {
    let start = Instant::now();
    for d in [2usize, 3, 5, 7] {
        let m = build(d).unwrap();
        let parts = m.partitions();
        let blocks: Vec<&[usize]> = m.blocks().collect();
        let mut overlap = 0;
        for k1 in 0..parts.len() {
            for k2 in k1 + 1..parts.len() {
                for a in &parts[k1] {
                    for b in &parts[k2] {
                        overlap = overlap.max(a.iter().filter(|x| b.contains(x)).count());
                    }
                }
            }
        }
        let per_atom: BTreeSet<usize> = (0..d * d)
            .map(|i| blocks.iter().filter(|b| b.contains(&i)).count())
            .collect();
        c.check(
            format!(
                "d={d}: {} partitions, {} blocks, max overlap {overlap}, blocks per atom {per_atom:?}",
                parts.len(),
                blocks.len()
            ),
            parts.len() == d + 1
                && blocks.len() == d * (d + 1)
                && overlap <= 1
                && per_atom == BTreeSet::from([d + 1]),
        );
    }
    let elapsed = start.elapsed();
    c.check(
        format!("elapsed {elapsed:.2?} < 1 s"),
        elapsed < Duration::from_secs(1),
    );
}

fn bijection(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in [2usize, 3, 5] {
        let m = build(d).unwrap();
        let mut worst = 0.0f64;
        let mut in_range = true;
        for _ in 0..1000 {
            let q = random_real_state(&mut rng, d * d);
            in_range &= q.iter().all(|x| (-1.0..=2.0).contains(x));
            let back = reconstruct(&m, &marginals(&m, &q).unwrap()).unwrap();
            worst = worst.max(max_abs(&q, back.values()));
        }
        c.check(format!("d={d}: sampled entries lie in [-1, 2]"), in_range);
        c.within(
            &format!("d={d}: reconstruct(marginals(q)) = q"),
            worst,
            1e-12,
        );
        let full = rank_of_marginal_map(&m, None).unwrap();
        let dropped: Vec<usize> = (0..=d)
            .map(|k| rank_of_marginal_map(&m, Some(k)).unwrap())
            .collect();
        c.check(
            format!("d={d}: rank {full}, ranks with one partition dropped {dropped:?}"),
            full == d * d - 1 && dropped.iter().all(|&r| r < d * d - 1),
        );
    }
}

fn qubit_state_space(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = 1e-9;
    let (mut implication_failures, mut psd_mismatches) = (0, 0);
    let (mut inside, mut converse_only) = (0, 0);
    for _ in 0..100_000 {
        // Uniform Bloch coordinates in a cube cover every q with Σq = 1
        // near the state space, on both sides of its boundary.
        let r: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
        let q = q_from_bloch(r);
        let purity_bound = power_sum(&q, 2) <= 0.5 + tol;
        let pairs_ok = (0..4).all(|i| {
            (i + 1..4).all(|j| {
                let s = q[i] + q[j];
                s >= -tol && s <= 1.0 + tol
            })
        });
        if purity_bound {
            inside += 1;
            if !pairs_ok {
                implication_failures += 1;
            }
        } else if pairs_ok {
            converse_only += 1;
        }
        let psd = is_positive_semidefinite(&q_to_rho(&q).unwrap());
        if psd != (chi(&q).unwrap() >= 2.0 - tol) {
            psd_mismatches += 1;
        }
    }
    c.check(
        format!("Σq² <= 1/2 implies all pair sums in [0,1]: {implication_failures} failures over {inside} states"),
        implication_failures == 0 && inside > 0,
    );
    c.check(
        format!("pair constraints alone admit {converse_only} states outside the purity bound (expected, converse is false)"),
        true,
    );
    c.check(
        format!("PSD(q_to_rho(q)) <=> X(q) >= 2: {psd_mismatches} mismatches"),
        psd_mismatches == 0,
    );
}

fn qubit_correspondence(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let m = build(2).unwrap();
    let (mut round, mut purity, mut spin, mut pure_dev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let mode = if k % 2 == 0 {
            PurityMode::Mixed
        } else {
            PurityMode::Pure
        };
        let rho = random_density_with(&mut rng, mode);
        let q = rho_to_q(&rho);
        round = round.max(q_to_rho(&q).unwrap().max_abs_diff(rho.matrix()));
        let x2 = chi(&q).unwrap();
        purity = purity.max((x2 - 2.0 / rho.purity()).abs());
        if mode == PurityMode::Pure {
            pure_dev = pure_dev.max((x2 - 2.0).abs());
        }
        // Spin probabilities from the Bloch vector: (1 ± r_k) / 2.
        let r = rho.bloch();
        let expected: Vec<Vec<f64>> = r
            .iter()
            .map(|x| vec![(1.0 + x) / 2.0, (1.0 - x) / 2.0])
            .collect();
        let from_q = marginals(&m, &q).unwrap();
        let from_rho = mub_marginals(&rho);
        for (k, e) in expected.iter().enumerate() {
            spin = spin
                .max(max_abs(&from_q.0[k], e))
                .max(max_abs(&from_rho.0[k], e));
        }
    }
    c.within("round trip rho -> q -> rho", round, 1e-12);
    c.within("X2(q(rho)) = 2 / tr rho²", purity, 1e-12);
    c.within("pure states have X = 2", pure_dev, 1e-9);
    c.within("marginals = spin probabilities along x, y, z", spin, 1e-12);
}

fn measure_properties(c: &mut Criterion) {
    let orders = [0.5, 2.0, 3.0, 5.0];
    let mut exact = true;
    for d in 1..=10 {
        for order in orders {
            exact &= chi_c(&ProbVector::uniform(d), order).unwrap() == d as f64;
        }
    }
    c.check(
        "X_c(uniform_d) = d exactly for d <= 10, c in {0.5, 2, 3, 5}",
        exact,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mult = 0.0f64;
    for _ in 0..1000 {
        let (lp, ls) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let p = random_probability(&mut rng, lp);
        let s = random_probability(&mut rng, ls);
        for order in orders {
            let lhs = chi_c(&p.tensor(&s), order).unwrap();
            let rhs = chi_c(&p, order).unwrap() * chi_c(&s, order).unwrap();
            mult = mult.max((lhs - rhs).abs());
        }
    }
    c.within("multiplicativity on 1000 tensor pairs", mult, 1e-9);

    let (mut perm_exact, mut bounds_ok) = (true, true);
    for _ in 0..10_000 {
        let len = rng.random_range(1..=12);
        let p = random_probability(&mut rng, len);
        let mut shuffled = p.values().to_vec();
        shuffled.shuffle(&mut rng);
        let shuffled = ProbVector::new(shuffled).unwrap();
        for order in orders {
            let x = chi_c(&p, order).unwrap();
            perm_exact &= chi_c(&shuffled, order).unwrap() == x;
            bounds_ok &= (1.0..=len as f64).contains(&x);
        }
    }
    c.check(
        "permutation invariance is exact on 10^4 samples",
        perm_exact,
    );
    c.check("1 <= X_c <= D on 10^4 samples", bounds_ok);

    for d in [2usize, 3] {
        let m = build(d).unwrap();
        let a = sample(&m, 10_000, 70 + d as u64).unwrap();
        let b = sample(&m, 10_000, 80 + d as u64).unwrap();
        let mut worst = f64::NEG_INFINITY;
        for (qa, qb) in a.iter().zip(&b) {
            let lambda: f64 = rng.random();
            let mixed: Vec<f64> = qa
                .values()
                .iter()
                .zip(qb.values())
                .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                .collect();
            let floor = chi(qa.values()).unwrap().min(chi(qb.values()).unwrap());
            worst = worst.max(floor - chi(&mixed).unwrap());
        }
        c.check(
            format!("quasi-concavity on 10^4 mixtures in Q_{d}: worst shortfall {worst:.3e}"),
            worst <= 1e-12,
        );
    }
}

fn recursions(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for d in [3usize, 5] {
        let m = build(d).unwrap();
        let states: Vec<Vec<f64>> = (0..100)
            .map(|_| random_probability(&mut rng, d * d).values().to_vec())
            .collect();
        for order in 2..=6u32 {
            let mut identity = 0.0f64;
            let mut recursive = 0.0f64;
            for q in &states {
                let lhs = marginal_power_sum(&m, q, order).unwrap();
                identity = identity.max((lhs - power_sum_identity_rhs(d, q, order)).abs());
                let direct = chi_c(&ProbVector::new(q.clone()).unwrap(), order as f64).unwrap();
                let via = chi_c_recursive(&m, q, order).unwrap_or(f64::NAN);
                let dev = (via - direct).abs();
                recursive = recursive.max(if dev.is_nan() { f64::INFINITY } else { dev });
            }
            c.within(
                &format!("d={d}, c={order}: Σ_k S_c(p^k) matches the closed-form expansion"),
                identity,
                1e-9,
            );
            c.within(
                &format!("d={d}, c={order}: recursive X_c = X_c"),
                recursive,
                1e-9,
            );
        }
    }

    let mut f2 = 0.0f64;
    for d in [2usize, 3, 5] {
        let m = build(d).unwrap();
        for _ in 0..200 {
            let q = random_real_state(&mut rng, d * d);
            let am = marginals(&m, &q).unwrap();
            f2 = f2.max((chi2_from_marginals(&m, &am).unwrap() - 1.0 / power_sum(&q, 2)).abs());
        }
    }
    c.within(
        "F2(marginals) = 1/Σq² on real states with negative entries",
        f2,
        1e-12,
    );

    let m2 = build(2).unwrap();
    let r = chi_c_recursive(&m2, &[0.25; 4], 3);
    c.check(
        format!("(d=2, c=3) gives {r:?}"),
        matches!(r, Err(Error::DegenerateHierarchy { depth: 2, order: 3 })),
    );
}

fn d3_counterexample(c: &mut Criterion) {
    let t = (3.0 + 33f64.sqrt()) / 24.0;
    let q = [0.25 - t, 0.0, 0.0, 0.25, 0.25, 0.25, 0.0, 0.0, t];
    let m = build(3).unwrap();
    c.check(
        format!("Σq - 1 = {:e}", q.iter().sum::<f64>() - 1.0),
        q.iter().sum::<f64>() == 1.0,
    );
    c.within("|Σq² - 1/3|", (power_sum(&q, 2) - 1.0 / 3.0).abs(), 1e-12);
    let triple = q[0] + q[1] + q[2];
    c.check(
        format!("block {{0,1,2}} sums to {triple:.6} = 1/4 - t"),
        triple < 0.0 && (triple - (0.25 - t)).abs() < 1e-15,
    );
    c.check(
        "rejected in blocks mode",
        !in_mes_set(&m, &q, Membership::BlocksOnly, 1e-9).unwrap(),
    );
    c.check(
        "rejected in all-level-d mode",
        !in_mes_set(&m, &q, Membership::AllLevelD, 1e-9).unwrap(),
    );
}

fn monotonicity(c: &mut Criterion) {
    let (lo, _) = g_family_range();
    let xs: Vec<f64> = (0..100)
        .map(|k| lo + (0.5 - lo) * k as f64 / 99.0)
        .collect();
    let rows: Vec<_> = xs.iter().map(|&x| g_counterexample(x).unwrap()).collect();
    let closed = rows
        .iter()
        .map(|r| {
            let x = r.x;
            (r.joint_given_c - x * (x - 1.0))
                .abs()
                .max((r.b_given_c - (x - 1.0)).abs())
                .max((r.a_given_bc - x).abs())
        })
        .fold(0.0, f64::max);
    let product = rows
        .iter()
        .map(|r| (r.joint_given_c - r.b_given_c * r.a_given_bc).abs())
        .fold(0.0, f64::max);
    c.within(
        "closed forms x(x-1), x-1, x vs lattice conditionals",
        closed,
        1e-12,
    );
    c.within("product rule Q(A∧B|C) = Q(B|C) Q(A|B∧C)", product, 1e-12);
    c.check(
        "Q(A∧B|C) strictly decreasing",
        rows.windows(2)
            .all(|w| w[1].joint_given_c < w[0].joint_given_c),
    );
    c.check(
        "Q(B|C) and Q(A|B∧C) strictly increasing",
        rows.windows(2)
            .all(|w| w[1].b_given_c > w[0].b_given_c && w[1].a_given_bc > w[0].a_given_bc),
    );
}

fn rules(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s3 = 3f64.sqrt();
    let a = (1.0 + 1.0 / s3) / 4.0;
    let mut states = vec![vec![a, a, a, (1.0 - s3) / 4.0]];
    for dim in 2..=8 {
        states.push(random_real_state(&mut rng, dim));
        states.push(random_probability(&mut rng, dim).values().to_vec());
    }
    let negative = states.iter().filter(|q| q.iter().any(|&x| x < 0.0)).count();
    c.check(
        format!(
            "{negative} of {} states have negative entries",
            states.len()
        ),
        negative > 0,
    );
    for (k, q) in states.iter().enumerate() {
        let r = check_rules(&Valuation::new(q.clone()).unwrap(), 10_000, k as u64).unwrap();
        c.check(
            format!(
                "D={}: sum {:.1e}, product {:.1e}, Bayes {:.1e} over {} triples",
                q.len(),
                r.sum_rule_worst,
                r.product_rule_worst,
                r.bayes_worst,
                r.trials - r.skipped
            ),
            r.passed && r.trials - r.skipped > 0,
        );
    }
}

fn main() {
    let criteria: [Named; 11] = [
        ("block counting vs exhaustive search", counting),
        ("two-, three- and four-atom examples", examples),
        ("MES partition structure", mes_structure),
        ("marginal map bijection and minimality", bijection),
        ("d=2 state space equivalences", qubit_state_space),
        ("qubit correspondence", qubit_correspondence),
        ("inaccessibility measure properties", measure_properties),
        ("power-sum recursions", recursions),
        ("d=3 counterexample", d3_counterexample),
        ("conditional monotonicity family", monotonicity),
        ("sum, product and Bayes rules", rules),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut c = Criterion::default();
        run(&mut c);
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}  {name}", i + 1);
        for (what, ok) in &c.checks {
            if !ok || !c.passed() {
                println!("    [{}] {what}", if *ok { "ok" } else { "FAIL" });
            }
        }
        if !c.passed() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("all 11 criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
