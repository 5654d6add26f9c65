//! Maximal expressive standard (MES) models of prime accessibility-depth `d`:
//! `d + 1` partitions of the `d²` atoms into blocks of `d` atoms, any two
//! blocks from different partitions sharing exactly one atom.
//!
//! The map [`marginals`] sends a quasi-probability state to the `d + 1`
//! accessible probability vectors (one per partition); [`reconstruct`] is its
//! inverse.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, UnitBall};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inaccessibility::chi;
use crate::DEFAULT_TOL;

/// Real vector summing to one; entries may be negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuasiState(Vec<f64>);

impl QuasiState {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, DEFAULT_TOL)
    }

    pub fn with_tolerance(values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "state must be a non-empty vector of finite numbers".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self(values))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for QuasiState {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<QuasiState> for Vec<f64> {
    fn from(q: QuasiState) -> Self {
        q.0
    }
}

/// One vector per partition, entry `j` being the value of block `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AccessibleMarginals(pub Vec<Vec<f64>>);

impl AccessibleMarginals {
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.0
    }

    /// Every vector has entries in `[0, 1]` and sums to one.
    pub fn is_probability(&self, tol: f64) -> bool {
        self.0.iter().all(|p| {
            p.iter().all(|&x| x >= -tol && x <= 1.0 + tol)
                && (p.iter().sum::<f64>() - 1.0).abs() <= tol
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct MesModelRepr {
    d: usize,
    partitions: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MesModelRepr", into = "MesModelRepr")]
pub struct MesModel {
    d: usize,
    partitions: Vec<Vec<Vec<usize>>>,
    /// `block_of[k][i]`: index of the block of partition `k` holding atom `i`.
    block_of: Vec<Vec<usize>>,
}

impl TryFrom<MesModelRepr> for MesModel {
    type Error = Error;

    fn try_from(r: MesModelRepr) -> Result<Self> {
        Self::from_partitions(r.d, r.partitions)
    }
}

impl From<MesModel> for MesModelRepr {
    fn from(m: MesModel) -> Self {
        Self {
            d: m.d,
            partitions: m.partitions,
        }
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

impl MesModel {
    /// Wraps hand-built partitions. Each partition must cover the `d²` atoms
    /// exactly once; the remaining MES invariants are checked by
    /// [`verify_overlaps`].
    pub fn from_partitions(d: usize, partitions: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("depth must be positive".into()));
        }
        let n = d
            .checked_mul(d)
            .ok_or_else(|| Error::Overflow("d²".into()))?;
        let mut block_of = Vec::with_capacity(partitions.len());
        for (k, partition) in partitions.iter().enumerate() {
            let mut owner = vec![usize::MAX; n];
            for (j, block) in partition.iter().enumerate() {
                for &i in block {
                    if i >= n {
                        return Err(Error::AtomOutOfRange { index: i, dim: n });
                    }
                    if owner[i] != usize::MAX {
                        return Err(Error::InvalidArgument(format!(
                            "atom {i} appears twice in partition {k}"
                        )));
                    }
                    owner[i] = j;
                }
            }
            if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
                return Err(Error::InvalidArgument(format!(
                    "atom {i} is not covered by partition {k}"
                )));
            }
            block_of.push(owner);
        }
        Ok(Self {
            d,
            partitions,
            block_of,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of atoms, `d²`.
    pub fn atoms(&self) -> usize {
        self.d * self.d
    }

    pub fn partitions(&self) -> &[Vec<Vec<usize>>] {
        &self.partitions
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[usize]> {
        self.partitions.iter().flatten().map(Vec::as_slice)
    }

    pub fn block_of(&self, partition: usize, atom: usize) -> usize {
        self.block_of[partition][atom]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.atoms() {
            return Err(Error::DimensionMismatch {
                left: self.atoms(),
                right: len,
            });
        }
        Ok(())
    }
}

/// Partition 0 holds the consecutive blocks `{kd, …, kd + d - 1}`; partition
/// `y + 1` puts atom `j` in block `(⌊j/d⌋·y + j mod d) mod d`.
pub fn build(d: usize) -> Result<MesModel> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let n = d * d;
    let mut partitions = vec![(0..d).map(|k| (k * d..(k + 1) * d).collect()).collect()];
    for y in 0..d {
        let mut blocks = vec![Vec::with_capacity(d); d];
        for j in 0..n {
            blocks[((j / d) * y + j % d) % d].push(j);
        }
        partitions.push(blocks);
    }
    MesModel::from_partitions(d, partitions)
}

/// Exhaustively checks the MES invariants: `d + 1` partitions of `d` blocks
/// of `d` atoms, blocks from different partitions sharing at most one atom.
pub fn verify_overlaps(model: &MesModel) -> bool {
    let d = model.d;
    if model.partitions.len() != d + 1 {
        return false;
    }
    if model
        .partitions
        .iter()
        .any(|p| p.len() != d || p.iter().any(|b| b.len() != d))
    {
        return false;
    }
    let n = model.atoms();
    let sets: Vec<(usize, Vec<bool>)> = model
        .partitions
        .iter()
        .enumerate()
        .flat_map(|(k, p)| {
            p.iter().map(move |b| {
                let mut set = vec![false; n];
                b.iter().for_each(|&i| set[i] = true);
                (k, set)
            })
        })
        .collect();
    for (x, (kx, a)) in sets.iter().enumerate() {
        for (ky, b) in &sets[x + 1..] {
            if kx == ky {
                continue;
            }
            let shared = a.iter().zip(b).filter(|(p, q)| **p && **q).count();
            if shared > 1 {
                return false;
            }
        }
    }
    true
}

pub fn marginals(model: &MesModel, q: &[f64]) -> Result<AccessibleMarginals> {
    model.check_len(q.len())?;
    Ok(AccessibleMarginals(
        model
            .partitions
            .iter()
            .map(|p| p.iter().map(|b| b.iter().map(|&i| q[i]).sum()).collect())
            .collect(),
    ))
}

/// Inverse of [`marginals`]: `q_i = (Σ_k p^k[block(k, i)] - 1) / d`.
pub fn reconstruct(model: &MesModel, am: &AccessibleMarginals) -> Result<QuasiState> {
    reconstruct_with_tolerance(model, am, DEFAULT_TOL)
}

pub fn reconstruct_with_tolerance(
    model: &MesModel,
    am: &AccessibleMarginals,
    tol: f64,
) -> Result<QuasiState> {
    let vectors = am.vectors();
    if vectors.len() != model.partitions.len() {
        return Err(Error::DimensionMismatch {
            left: model.partitions.len(),
            right: vectors.len(),
        });
    }
    for (k, p) in vectors.iter().enumerate() {
        if p.len() != model.partitions[k].len() {
            return Err(Error::DimensionMismatch {
                left: model.partitions[k].len(),
                right: p.len(),
            });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InconsistentMarginals {
                deviation: (sum - 1.0).abs(),
            });
        }
    }
    let d = model.d as f64;
    let q: Vec<f64> = (0..model.atoms())
        .map(|i| {
            let through: f64 = vectors
                .iter()
                .enumerate()
                .map(|(k, p)| p[model.block_of[k][i]])
                .sum();
            (through - 1.0) / d
        })
        .collect();
    let deviation = marginals(model, &q)?.max_abs_diff(am);
    if deviation > tol {
        return Err(Error::InconsistentMarginals { deviation });
    }
    QuasiState::with_tolerance(q, tol.max(DEFAULT_TOL))
}

/// Which level-`d` statements must carry values in `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Only the `d(d + 1)` blocks of the partitions.
    #[default]
    BlocksOnly,
    /// Every statement with `d` atoms.
    AllLevelD,
}

/// Largest `d` accepted for [`Membership::AllLevelD`].
pub const MAX_ALL_LEVEL_DEPTH: usize = 4;

/// Level-`d` statements whose value leaves `[0, 1]`. In
/// [`Membership::AllLevelD`] mode at most two witnesses are reported: the
/// `d` smallest and the `d` largest entries.
pub fn mes_violations(
    model: &MesModel,
    q: &[f64],
    mode: Membership,
    tol: f64,
) -> Result<Vec<Vec<usize>>> {
    model.check_len(q.len())?;
    let in_range = |v: f64| v >= -tol && v <= 1.0 + tol;
    match mode {
        Membership::BlocksOnly => Ok(model
            .blocks()
            .filter(|b| !in_range(b.iter().map(|&i| q[i]).sum()))
            .map(<[usize]>::to_vec)
            .collect()),
        Membership::AllLevelD => {
            if model.d > MAX_ALL_LEVEL_DEPTH {
                return Err(Error::InvalidArgument(format!(
                    "all-level-d membership is limited to d <= {MAX_ALL_LEVEL_DEPTH}"
                )));
            }
            // Subset sums over d entries are bounded by the d smallest and the
            // d largest entries.
            let mut order: Vec<usize> = (0..q.len()).collect();
            order.sort_by(|&a, &b| q[a].total_cmp(&q[b]).then(a.cmp(&b)));
            let d = model.d;
            let mut out = Vec::new();
            for subset in [&order[..d], &order[order.len() - d..]] {
                let mut subset = subset.to_vec();
                if !in_range(subset.iter().map(|&i| q[i]).sum()) {
                    subset.sort_unstable();
                    if !out.contains(&subset) {
                        out.push(subset);
                    }
                }
            }
            Ok(out)
        }
    }
}

/// `q` sums to one and the selected level-`d` statements have values in
/// `[0, 1]`.
pub fn in_mes_set(model: &MesModel, q: &[f64], mode: Membership, tol: f64) -> Result<bool> {
    model.check_len(q.len())?;
    if (q.iter().sum::<f64>() - 1.0).abs() > tol {
        return Ok(false);
    }
    Ok(mes_violations(model, q, mode, tol)?.is_empty())
}

/// Membership in the admissible state space: a block-level MES state with
/// inaccessibility at least `d`.
pub fn in_state_space(model: &MesModel, q: &[f64], tol: f64) -> Result<bool> {
    if !in_mes_set(model, q, Membership::BlocksOnly, tol)? {
        return Ok(false);
    }
    Ok(chi(q)? >= model.d as f64 - tol)
}

pub fn is_pure(model: &MesModel, q: &[f64], tol: f64) -> Result<bool> {
    Ok(in_state_space(model, q, tol)? && (chi(q)? - model.d as f64).abs() <= tol)
}

/// Sign patterns of the four atoms for `d = 2`, matching the qubit frame:
/// `q_i = (1 + s_i · r) / 4`.
pub const QUBIT_SIGNS: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
];

pub fn q_from_bloch(r: [f64; 3]) -> Vec<f64> {
    QUBIT_SIGNS
        .iter()
        .map(|s| (1.0 + s[0] * r[0] + s[1] * r[1] + s[2] * r[2]) / 4.0)
        .collect()
}

pub const DEFAULT_MAX_ATTEMPTS: usize = 1_000_000;

/// Draws `n` admissible states, deterministically in `seed`.
pub fn sample(model: &MesModel, n: usize, seed: u64) -> Result<Vec<QuasiState>> {
    sample_with(model, n, seed, DEFAULT_MAX_ATTEMPTS)
}

/// For `d = 2` states come from points uniform in the unit ball. Otherwise
/// zero-sum perturbations of the uniform state, uniform in the ball
/// `Σq² <= 1/d`, are drawn until the block constraints hold; each state may
/// take at most `max_attempts` draws.
pub fn sample_with(
    model: &MesModel,
    n: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Vec<QuasiState>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = model.d;
    if d == 2 {
        return (0..n)
            .map(|_| {
                let r: [f64; 3] = UnitBall.sample(&mut rng);
                QuasiState::new(q_from_bloch(r))
            })
            .collect();
    }
    let len = model.atoms();
    let center = 1.0 / len as f64;
    let radius = (1.0 / d as f64 - 1.0 / (d * d) as f64).sqrt();
    let free_dims = (len - 1) as f64;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut accepted = None;
        for _ in 0..max_attempts {
            let mut delta: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            let mean = delta.iter().sum::<f64>() / len as f64;
            delta.iter_mut().for_each(|x| *x -= mean);
            let norm = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let u: f64 = rng.random();
            let scale = radius * u.powf(1.0 / free_dims) / norm;
            let q: Vec<f64> = delta.iter().map(|x| center + x * scale).collect();
            if in_state_space(model, &q, DEFAULT_TOL)? {
                accepted = Some(q);
                break;
            }
        }
        let q = accepted.ok_or(Error::SamplingExhausted {
            attempts: max_attempts,
        })?;
        out.push(QuasiState::new(q)?);
    }
    Ok(out)
}

/// CSV with columns `q_0 … q_{d²-1}, chi, pure`.
pub fn samples_to_csv(model: &MesModel, states: &[QuasiState], tol: f64) -> Result<String> {
    let mut out = (0..model.atoms())
        .map(|i| format!("q_{i}"))
        .chain(["chi".to_string(), "pure".to_string()])
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for q in states {
        let mut row: Vec<String> = q.values().iter().map(|v| v.to_string()).collect();
        row.push(chi(q.values())?.to_string());
        row.push(is_pure(model, q.values(), tol)?.to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
