//! Finite sweeps that check each structural result against an independent
//! brute-force oracle.

use std::collections::BTreeSet;
use std::time::Instant;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inaccessibility::chi;
use crate::lattice::{
    disjoint_canonical, for_each_partition, ideal_block_count, ideal_configurations_brute,
    is_admissible_access, max_accessible_brute, orbit_canonical, Configuration, Statement,
    MAX_BRUTE_DIM,
};
use crate::mes::{build, in_mes_set, marginals, q_from_bloch, reconstruct, Membership, MesModel};
use crate::models::{
    allowed_inflations, allowed_inflations_printed, classify, compose, inflate,
    inflation_compatible_with_composition, Model, ModelClass,
};
use crate::quasiprob::g_monotonicity_scan;
use crate::qubit::{is_positive_semidefinite, q_to_rho};
use crate::DEFAULT_TOL;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub id: String,
    pub description: String,
    pub ranges: String,
    pub passed: bool,
    pub worst_deviation: f64,
    /// Wall-clock time; not serialised so reports stay reproducible.
    #[serde(skip)]
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Outcome of one check before timing is attached.
struct Outcome {
    ranges: String,
    worst_deviation: f64,
    counterexample: Option<String>,
    warnings: Vec<String>,
}

impl Outcome {
    fn new(ranges: impl Into<String>) -> Self {
        Self {
            ranges: ranges.into(),
            worst_deviation: 0.0,
            counterexample: None,
            warnings: Vec::new(),
        }
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        if self.counterexample.is_none() {
            self.counterexample = Some(what());
        }
    }

    fn deviation(&mut self, value: f64) {
        // NaN counts as the worst possible deviation.
        if value.is_nan() || value > self.worst_deviation {
            self.worst_deviation = if value.is_nan() { f64::INFINITY } else { value };
        }
    }
}

fn timed(
    id: &str,
    description: &str,
    check: impl FnOnce() -> Result<Outcome>,
) -> Result<LemmaReport> {
    let start = Instant::now();
    let o = check()?;
    Ok(LemmaReport {
        id: id.into(),
        description: description.into(),
        ranges: o.ranges,
        passed: o.counterexample.is_none(),
        worst_deviation: o.worst_deviation,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        counterexample: o.counterexample,
        warnings: o.warnings,
    })
}

/// Runs every check. `max_dim` bounds the atom count of the exhaustive
/// lattice searches.
pub fn run_all(max_dim: usize, seed: u64) -> Result<Vec<LemmaReport>> {
    if max_dim > MAX_BRUTE_DIM {
        return Err(Error::DimensionTooLarge {
            dim: max_dim,
            max: MAX_BRUTE_DIM,
        });
    }
    if max_dim == 0 {
        return Err(Error::InvalidArgument("max D must be >= 1".into()));
    }
    Ok(vec![
        timed(
            "L1",
            "an inaccessible top forces every statement inaccessible",
            || check_top_inaccessible(max_dim.min(5)),
        )?,
        timed(
            "L2",
            "accessible level-d statements are pairwise disjoint",
            || check_disjointness(max_dim.min(8)),
        )?,
        timed(
            "L3",
            "maximal number of accessible level-d statements",
            || check_counting(max_dim),
        )?,
        timed(
            "L4",
            "ideal configurations are unique up to relabelling",
            || check_uniqueness(max_dim.min(8)),
        )?,
        timed(
            "L5",
            "dimensions a classical model can be inflated to",
            || check_inflation_sets(max_dim),
        )?,
        timed(
            "L6",
            "inflation commutes with composition",
            check_inflation_composition,
        )?,
        timed(
            "L7",
            "MES partitions, block count and overlaps",
            check_mes_structure,
        )?,
        timed(
            "L8",
            "marginal map is a bijection and every partition is needed",
            || check_marginal_bijection(seed),
        )?,
        timed("E1", "two atoms: only classical or useless models", || {
            check_small_example(2)
        })?,
        timed(
            "E2",
            "three atoms: only classical or useless models",
            || check_small_example(3),
        )?,
        timed(
            "E3",
            "(4,2): exactly three ideal configurations, one orbit",
            check_four_two,
        )?,
        timed(
            "C3",
            "d=3 state obeying normalisation and purity bound but not positivity",
            check_d3_counterexample,
        )?,
        timed(
            "Q2",
            "d=2: normalisation and purity bound imply the pair constraints",
            || check_qubit_implication(100_000, seed),
        )?,
        timed(
            "B3",
            "conditional composite decreases while its factors increase",
            check_monotonicity,
        )?,
    ])
}

/// Labels every statement and its negation alike; `pair_bits` assigns the
/// pairs `(s, ¬s)` with `s < ¬s` in increasing order of `s`.
fn negation_consistent_labels(dim: usize, pair_bits: u64) -> Vec<bool> {
    let full = (1u64 << dim) - 1;
    let mut labels = vec![false; 1 << dim];
    let mut k = 0;
    for s in 0..1u64 << dim {
        let neg = !s & full;
        if s < neg {
            let on = pair_bits >> k & 1 == 1;
            labels[s as usize] = on;
            labels[neg as usize] = on;
            k += 1;
        }
    }
    labels
}

/// Direct pairwise closure test.
fn closed_under_meet_and_join(labels: &[bool]) -> bool {
    let accessible: Vec<usize> = (0..labels.len()).filter(|&s| labels[s]).collect();
    accessible
        .iter()
        .all(|&x| accessible.iter().all(|&y| labels[x & y] && labels[x | y]))
}

fn check_top_inaccessible(max_dim: usize) -> Result<Outcome> {
    let mut o = Outcome::new(format!(
        "1 <= D <= {max_dim}, all negation-consistent labellings"
    ));
    for dim in 1..=max_dim {
        let pairs = 1u32 << (dim - 1);
        // The pair (⊥, ⊤) is bit 0; it stays inaccessible.
        for rest in 0..1u64 << (pairs - 1) {
            let labels = negation_consistent_labels(dim, rest << 1);
            let closed = closed_under_meet_and_join(&labels);
            let cfg = Configuration::explicit(dim, 1, labels.clone())?;
            if is_admissible_access(&cfg)?.admissible != closed {
                o.fail(|| format!("D={dim}: closure test disagrees on labelling {rest:#x}"));
            }
            if closed && labels.iter().any(|&a| a) {
                o.fail(|| format!("D={dim}: labelling {rest:#x} is closed with ⊤ inaccessible"));
            }
        }
    }
    Ok(o)
}

fn check_disjointness(max_dim: usize) -> Result<Outcome> {
    let mut o = Outcome::new(format!("1 <= d <= D <= {max_dim}"));
    for dim in 1..=max_dim {
        for depth in 1..=dim {
            let mut err = None;
            for_each_partition(dim, depth, |cells| {
                if err.is_some() || o.counterexample.is_some() {
                    return;
                }
                let run = || -> Result<Option<String>> {
                    let gens = cells
                        .iter()
                        .map(|&c| Statement::new(dim, c))
                        .collect::<Result<Vec<_>>>()?;
                    let cfg = Configuration::generated(dim, depth, gens)?;
                    if !is_admissible_access(&cfg)?.admissible {
                        return Ok(Some(format!(
                            "({dim},{depth}) cells {cells:?} not admissible"
                        )));
                    }
                    let level: Vec<Statement> = cfg
                        .accessible_statements()?
                        .into_iter()
                        .filter(|s| s.level() == depth)
                        .collect();
                    for (i, a) in level.iter().enumerate() {
                        for b in &level[i + 1..] {
                            if a.bits() & b.bits() != 0 {
                                return Ok(Some(format!("({dim},{depth}): {a} and {b} overlap")));
                            }
                        }
                    }
                    Ok(None)
                };
                match run() {
                    Ok(Some(msg)) => o.fail(|| msg),
                    Ok(None) => {}
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(o)
}

fn check_counting(max_dim: usize) -> Result<Outcome> {
    let mut o = Outcome::new(format!("1 <= d <= D <= {max_dim}"));
    for dim in 1..=max_dim {
        for depth in 1..=dim {
            let formula = ideal_block_count(dim, depth);
            let brute = max_accessible_brute(dim, depth)?;
            o.deviation(formula.abs_diff(brute) as f64);
            if formula != brute {
                o.fail(|| format!("({dim},{depth}): formula {formula}, search {brute}"));
            }
        }
    }
    Ok(o)
}

fn canonical(dim: usize, family: &[Statement]) -> Result<Vec<Statement>> {
    if dim <= 6 {
        orbit_canonical(dim, family)
    } else {
        disjoint_canonical(dim, family)
    }
}

fn check_uniqueness(max_dim: usize) -> Result<Outcome> {
    let mut o = Outcome::new(format!("2 <= d <= D <= {max_dim}"));
    for dim in 2..=max_dim {
        for depth in 2..=dim {
            let families = ideal_configurations_brute(dim, depth)?;
            let forms: BTreeSet<Vec<Statement>> = families
                .iter()
                .map(|f| canonical(dim, f))
                .collect::<Result<_>>()?;
            if forms.len() != 1 {
                o.fail(|| {
                    format!(
                        "({dim},{depth}): {} ideal families fall into {} orbits",
                        families.len(),
                        forms.len()
                    )
                });
            }
        }
    }
    Ok(o)
}

fn check_inflation_sets(max_dim: usize) -> Result<Outcome> {
    let mut o = Outcome::new(format!(
        "1 <= m <= 5, 1 <= d <= 4, search over D <= {max_dim}"
    ));
    for depth in 1..=4 {
        let counts = (depth..=max_dim)
            .map(|dim| Ok((dim, max_accessible_brute(dim, depth)?)))
            .collect::<Result<Vec<_>>>()?;
        for m in 1..=5 {
            let claimed = allowed_inflations(m, depth)?;
            let searched: BTreeSet<usize> = counts
                .iter()
                .filter(|&&(_, n)| n == m)
                .map(|&(dim, _)| dim)
                .collect();
            let visible: BTreeSet<usize> = claimed.range(..=max_dim).copied().collect();
            if visible != searched {
                o.fail(|| format!("m={m}, d={depth}: {visible:?} vs search {searched:?}"));
            }
            let printed = allowed_inflations_printed(m, depth);
            if depth > 1 && printed != claimed {
                o.warnings.push(format!(
                    "m={m}, d={depth}: closed-form list {printed:?} differs from counting result {claimed:?}"
                ));
            }
        }
    }
    Ok(o)
}

fn check_inflation_composition() -> Result<Outcome> {
    let mut o = Outcome::new("2 <= m1, m2 <= 5, 1 <= c <= 3");
    for m1 in 2..=5usize {
        for m2 in 2..=5usize {
            for c in 1..=3u32 {
                let m = m1 * m2;
                let expected = Model::new(m.pow(c + 1), m.pow(c))?;
                let product = compose(inflate(m1, c)?, inflate(m2, c)?)?;
                let ok = inflation_compatible_with_composition(m1, m2, c)?
                    && product.model == expected
                    && product.blocks.len() == expected.ideal_blocks()
                    && classify(product.model) == ModelClass::Nontrivial { m };
                if !ok {
                    o.fail(|| format!("m1={m1}, m2={m2}, c={c}: got {}", product.model));
                }
            }
        }
    }
    Ok(o)
}

fn check_mes_structure() -> Result<Outcome> {
    let mut o = Outcome::new("d in {2, 3, 5, 7}");
    for d in [2usize, 3, 5, 7] {
        let m = build(d)?;
        let blocks: Vec<&[usize]> = m.blocks().collect();
        let mut worst_overlap = 0;
        for k1 in 0..m.partitions().len() {
            for k2 in k1 + 1..m.partitions().len() {
                for a in &m.partitions()[k1] {
                    for b in &m.partitions()[k2] {
                        worst_overlap =
                            worst_overlap.max(a.iter().filter(|x| b.contains(x)).count());
                    }
                }
            }
        }
        let per_atom_ok =
            (0..d * d).all(|i| blocks.iter().filter(|b| b.contains(&i)).count() == d + 1);
        let ok = m.partitions().len() == d + 1
            && blocks.len() == d * (d + 1)
            && blocks.iter().all(|b| b.len() == d)
            && worst_overlap <= 1
            && per_atom_ok;
        if !ok {
            o.fail(|| format!("d={d}: overlap {worst_overlap}, {} blocks", blocks.len()));
        }
    }
    Ok(o)
}

/// A random real state with `Σq = 1` and every entry in `[-1, 2]`.
pub fn random_real_state<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let x: Vec<f64> = (0..len).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mean = x.iter().sum::<f64>() / len as f64;
    x.iter().map(|v| v - mean + 1.0 / len as f64).collect()
}

/// Rank of `q ↦ (block sums of every kept partition)` restricted to the
/// hyperplane `Σq = 1`, computed on the basis `e_i - e_last`. Exact rational
/// elimination for `d <= 3`, floating point with pivot tolerance `1e-9`
/// above.
pub fn rank_of_marginal_map(model: &MesModel, drop: Option<usize>) -> Result<usize> {
    let parts = model.partitions();
    if let Some(k) = drop {
        if k >= parts.len() {
            return Err(Error::InvalidArgument(format!(
                "partition {k} out of range 0..{}",
                parts.len()
            )));
        }
    }
    let n = model.atoms();
    let last = n - 1;
    let rows: Vec<Vec<i64>> = parts
        .iter()
        .enumerate()
        .filter(|(k, _)| Some(*k) != drop)
        .flat_map(|(_, p)| p.iter())
        .map(|block| {
            (0..last)
                .map(|i| block.contains(&i) as i64 - block.contains(&last) as i64)
                .collect()
        })
        .collect();
    if model.d() <= 3 {
        let m: Vec<Vec<Rational64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(Rational64::from_integer).collect())
            .collect();
        Ok(rank_exact(m))
    } else {
        let m: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x as f64).collect())
            .collect();
        Ok(rank_float(m, 1e-9))
    }
}

fn rank_exact(mut m: Vec<Vec<Rational64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != Rational64::from_integer(0))
        else {
            continue;
        };
        m.swap(rank, pivot);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != Rational64::from_integer(0) {
                let f = row[col] / pivot_row[col];
                for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_float(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()));
        let Some(pivot) = pivot.filter(|&p| m[p][col].abs() > tol) else {
            continue;
        };
        m.swap(rank, pivot);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank {
                let f = row[col] / pivot_row[col];
                for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn check_marginal_bijection(seed: u64) -> Result<Outcome> {
    let mut o = Outcome::new("d in {2, 3, 5}, 1000 states each");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for d in [2usize, 3, 5] {
        let m = build(d)?;
        let full = d * d - 1;
        let rank = rank_of_marginal_map(&m, None)?;
        if rank != full {
            o.fail(|| format!("d={d}: rank {rank}, expected {full}"));
        }
        for k in 0..=d {
            let r = rank_of_marginal_map(&m, Some(k))?;
            if r >= full {
                o.fail(|| format!("d={d}: dropping partition {k} leaves rank {r}"));
            }
        }
        for _ in 0..1000 {
            let q = random_real_state(&mut rng, d * d);
            let back = reconstruct(&m, &marginals(&m, &q)?)?;
            let dev = q
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            o.deviation(dev);
            if dev > 1e-12 {
                o.fail(|| format!("d={d}: round trip of {q:?} off by {dev:e}"));
            }
        }
    }
    Ok(o)
}

fn check_small_example(dim: usize) -> Result<Outcome> {
    let mut o = Outcome::new(format!("D={dim}, 1 <= d <= {dim}"));
    for depth in 1..=dim {
        let class = classify(Model::new(dim, depth)?);
        let brute = max_accessible_brute(dim, depth)?;
        let ok = match class {
            ModelClass::Classical { m } => depth == 1 && m == dim && brute == dim,
            ModelClass::Useless => depth > 1 && brute <= 1,
            ModelClass::Nontrivial { .. } => false,
        };
        if !ok {
            o.fail(|| format!("({dim},{depth}) classified {class:?}, search found {brute} blocks"));
        }
    }
    Ok(o)
}

fn check_four_two() -> Result<Outcome> {
    let mut o = Outcome::new("(D, d) = (4, 2)");
    let expected: Vec<Vec<Statement>> = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]]
        .iter()
        .map(|fam| {
            fam.iter()
                .map(|b| Statement::from_atoms(4, b.iter().copied()))
                .collect()
        })
        .collect::<Result<_>>()?;
    let found = ideal_configurations_brute(4, 2)?;
    if found != expected {
        o.fail(|| format!("found {found:?}"));
    }
    let orbits: BTreeSet<Vec<Statement>> = found
        .iter()
        .map(|f| orbit_canonical(4, f))
        .collect::<Result<_>>()?;
    if orbits.len() != 1 {
        o.fail(|| format!("{} orbits", orbits.len()));
    }
    Ok(o)
}

/// The d = 3 state `(1/4 - t, 0, 0, 1/4, 1/4, 1/4, 0, 0, t)` with
/// `t = (3 + √33) / 24`.
pub fn d3_counterexample() -> Vec<f64> {
    let t = (3.0 + 33f64.sqrt()) / 24.0;
    vec![0.25 - t, 0.0, 0.0, 0.25, 0.25, 0.25, 0.0, 0.0, t]
}

fn check_d3_counterexample() -> Result<Outcome> {
    let mut o = Outcome::new("d = 3");
    let q = d3_counterexample();
    let m = build(3)?;
    let sum_dev = (q.iter().sum::<f64>() - 1.0).abs();
    let sq_dev = (q.iter().map(|x| x * x).sum::<f64>() - 1.0 / 3.0).abs();
    o.deviation(sum_dev.max(sq_dev));
    if sum_dev != 0.0 {
        o.fail(|| format!("Σq - 1 = {sum_dev:e}"));
    }
    if sq_dev > 1e-12 {
        o.fail(|| format!("|Σq² - 1/3| = {sq_dev:e}"));
    }
    let triple = q[0] + q[1] + q[2];
    if triple >= 0.0 {
        o.fail(|| format!("block {{0,1,2}} sums to {triple}"));
    }
    for mode in [Membership::BlocksOnly, Membership::AllLevelD] {
        if in_mes_set(&m, &q, mode, DEFAULT_TOL)? {
            o.fail(|| format!("accepted under {mode:?}"));
        }
    }
    Ok(o)
}

fn check_qubit_implication(samples: usize, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::new(format!(
        "{samples} states with Bloch vector in [-1.5, 1.5]³"
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5155_4249_5432);
    let tol = DEFAULT_TOL;
    let mut inside = 0usize;
    for _ in 0..samples {
        let r: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
        let q = q_from_bloch(r);
        let x = chi(&q)?;
        let pure_bound = x >= 2.0 - tol;
        if pure_bound {
            inside += 1;
            for i in 0..4 {
                for j in i + 1..4 {
                    let s = q[i] + q[j];
                    let excess = (-s).max(s - 1.0);
                    o.deviation(excess.max(0.0));
                    if excess > tol {
                        o.fail(|| format!("q={q:?}: pair ({i},{j}) sums to {s}"));
                    }
                }
            }
        }
        let psd = is_positive_semidefinite(&q_to_rho(&q)?);
        if psd != pure_bound {
            o.fail(|| format!("q={q:?}: positivity {psd} but X(q) = {x}"));
        }
    }
    if inside == 0 || inside == samples {
        o.fail(|| "sample never crossed the boundary".into());
    }
    Ok(o)
}

fn check_monotonicity() -> Result<Outcome> {
    let mut o = Outcome::new("100 points on [1-√3, 1/2]");
    let scan = g_monotonicity_scan(100)?;
    o.deviation(scan.closed_form_worst.max(scan.product_rule_worst));
    if !scan.passed {
        o.fail(|| format!("{scan:?}"));
    }
    Ok(o)
}
