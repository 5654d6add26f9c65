//! The inaccessibility measure `X_c(p) = (Σ p_i^c)^(1/(1-c))`, its extension
//! `X(q) = 1 / Σ q_i²` to quasi-probability states, and the formulas that
//! recover it from the accessible marginals of an MES model.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mes::{build, marginals, sample, AccessibleMarginals, MesModel};
use crate::DEFAULT_TOL;

/// Entries in `[0, 1]` summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, DEFAULT_TOL)
    }

    pub fn with_tolerance(values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotProbability("empty vector".into()));
        }
        if let Some(v) = values
            .iter()
            .find(|v| !v.is_finite() || **v < -tol || **v > 1.0 + tol)
        {
            return Err(Error::NotProbability(format!("entry {v} outside [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self(values))
    }

    /// The flat vector over `len` outcomes.
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

    /// Tensor product `p ⊗ s`, index `i * s.len() + j`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .flat_map(|a| other.0.iter().map(move |b| a * b))
                .collect(),
        )
    }
}

fn integer_order(c: f64) -> Option<i32> {
    (c.fract() == 0.0 && c.abs() <= i32::MAX as f64).then_some(c as i32)
}

fn pow(x: f64, c: f64) -> f64 {
    match integer_order(c) {
        Some(k) => x.powi(k),
        None => x.powf(c),
    }
}

fn check_order(c: f64) -> Result<()> {
    if !c.is_finite() || c <= 0.0 || c == 1.0 {
        return Err(Error::InvalidOrder(c));
    }
    Ok(())
}

/// `X_c(p)` for `c > 0`, `c != 1`.
///
/// Entries are summed in ascending order after scaling by the largest entry,
/// so the result does not depend on the order of `p` and is exact on flat
/// vectors.
pub fn chi_c(p: &ProbVector, c: f64) -> Result<f64> {
    check_order(c)?;
    let mut values: Vec<f64> = p.values().iter().map(|v| v.max(0.0)).collect();
    values.sort_by(f64::total_cmp);
    let largest = *values.last().expect("non-empty");
    let scaled: f64 = values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| pow(v / largest, c))
        .sum();
    Ok((largest * scaled).powf(1.0 / (1.0 - c)) / largest)
}

/// `Σ x_i^c` with integer `c` evaluated by repeated multiplication, so
/// negative entries stay well defined.
pub fn power_sum(values: &[f64], c: u32) -> f64 {
    values.iter().map(|v| v.powi(c as i32)).sum()
}

/// `X(q) = 1 / Σ q_i²` on any real vector.
pub fn chi(q: &[f64]) -> Result<f64> {
    let s2 = power_sum(q, 2);
    if s2 == 0.0 {
        return Err(Error::InvalidArgument("zero vector".into()));
    }
    Ok(1.0 / s2)
}

/// `X_2(q) = d / (Σ_k 1/X_2(p^k) - 1)` from the accessible marginals.
pub fn chi2_from_marginals(model: &MesModel, am: &AccessibleMarginals) -> Result<f64> {
    if am.vectors().len() != model.partitions().len() {
        return Err(Error::DimensionMismatch {
            left: model.partitions().len(),
            right: am.vectors().len(),
        });
    }
    let inverse_sum: f64 = am.vectors().iter().map(|p| power_sum(p, 2)).sum();
    Ok(model.d() as f64 / (inverse_sum - 1.0))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_k Σ_j (p^k_j)^c`, the power sum of all accessible marginals.
pub fn marginal_power_sum(model: &MesModel, q: &[f64], c: u32) -> Result<f64> {
    Ok(marginals(model, q)?
        .vectors()
        .iter()
        .map(|p| power_sum(p, c))
        .sum())
}

/// `d + 2 - 2^(c-1)`, the coefficient of `S_c` in the marginal expansion.
pub fn hierarchy_denominator(d: usize, c: u32) -> f64 {
    d as f64 + 2.0 - 2f64.powi(c as i32 - 1)
}

/// Cross terms of the marginal expansion at order `c`:
/// `Σ_{i=1}^{⌊(c-1)/2⌋} C(c,i) S_i S_{c-i}` plus `C(c,c/2) S_{c/2}² / 2` for
/// even `c`. `sums[k]` holds `S_k` (with `sums[1] = 1`).
fn cross_terms(sums: &[f64], c: u32) -> f64 {
    let mut g: f64 = (1..=(c - 1) / 2)
        .map(|i| binomial(c, i) * sums[i as usize] * sums[(c - i) as usize])
        .sum();
    if c.is_multiple_of(2) {
        let half = (c / 2) as usize;
        g += binomial(c, c / 2) * sums[half] * sums[half] / 2.0;
    }
    g
}

/// Right-hand side of the closed-form expansion
/// `Σ_k S_c(p^k) = (d + 2 - 2^(c-1)) S_c + cross terms`, evaluated from the
/// power sums of `q` itself.
pub fn power_sum_identity_rhs(d: usize, q: &[f64], c: u32) -> f64 {
    let sums: Vec<f64> = (0..=c)
        .map(|k| if k == 1 { 1.0 } else { power_sum(q, k) })
        .collect();
    hierarchy_denominator(d, c) * sums[c as usize] + cross_terms(&sums, c)
}

/// `X_c(q)` for integer `c >= 2`, obtained by solving the marginal expansion
/// for `S_2, …, S_c` in turn.
///
/// The expansion only accounts for products of at most two distinct atoms
/// sharing a block, so the result equals `X_c(q)` when `c = 2` or when
/// blocks hold two atoms; for larger blocks and `c >= 3` it differs.
pub fn chi_c_recursive(model: &MesModel, q: &[f64], c: u32) -> Result<f64> {
    if c < 2 {
        return Err(Error::InvalidOrder(c as f64));
    }
    let d = model.d();
    if let Some(k) = (2..=c).find(|&k| hierarchy_denominator(d, k) == 0.0) {
        return Err(Error::DegenerateHierarchy { depth: d, order: k });
    }
    let am = marginals(model, q)?;
    let mut sums = vec![0.0, 1.0];
    for k in 2..=c {
        let tilde: f64 = am.vectors().iter().map(|p| power_sum(p, k)).sum();
        let s_k = (tilde - cross_terms(&sums, k)) / hierarchy_denominator(d, k);
        sums.push(s_k);
    }
    let s_c = sums[c as usize];
    if s_c <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "recovered power sum S_{c} = {s_c} is not positive"
        )));
    }
    Ok(s_c.powf(1.0 / (1.0 - c as f64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyBridge {
    /// `log X_c(p)`.
    pub renyi: f64,
    /// `1 - Σ p^c`.
    pub tsallis: f64,
    /// `-Σ p log p`, the `c -> 1` limit of `log X_c`.
    pub shannon_limit: f64,
}

pub fn entropy_bridge(p: &ProbVector, c: f64) -> Result<EntropyBridge> {
    let x = chi_c(p, c)?;
    let shannon: f64 = p
        .values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum();
    Ok(EntropyBridge {
        renyi: x.ln(),
        tsallis: 1.0 - p.values().iter().map(|&v| pow(v.max(0.0), c)).sum::<f64>(),
        shannon_limit: shannon.max(0.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub worst_deviation: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub passed: bool,
    pub properties: Vec<PropertyCheck>,
}

/// Orders exercised by [`property_report`].
pub const REPORT_ORDERS: [f64; 4] = [0.5, 2.0, 3.0, 5.0];

pub fn random_probability<R: Rng + ?Sized>(rng: &mut R, len: usize) -> ProbVector {
    let raw: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    ProbVector(raw.into_iter().map(|x| x / total).collect())
}

fn check(name: &str, trials: usize, worst: f64, passed: bool) -> PropertyCheck {
    PropertyCheck {
        name: name.into(),
        passed,
        worst_deviation: worst,
        trials,
    }
}

/// Samples the defining properties of `X_c` on random probability vectors of
/// the given dimensions, and quasi-concavity of `X` on admissible states of
/// the MES models with `d = 2` and `d = 3`.
pub fn property_report(dims: &[usize], trials: usize, seed: u64) -> Result<PropertyReport> {
    if trials == 0 || dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(
            "need trials >= 1 and positive dimensions".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut properties = Vec::new();

    let mut worst = 0.0f64;
    let mut n = 0;
    for &d in dims {
        for c in REPORT_ORDERS {
            worst = worst.max((chi_c(&ProbVector::uniform(d), c)? - d as f64).abs());
            n += 1;
        }
    }
    properties.push(check("counting", n, worst, worst == 0.0));

    let (mut sym, mut mult, mut mono, mut bounds) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut bounds_ok = true;
    for t in 0..trials {
        let len = dims[t % dims.len()];
        let p = random_probability(&mut rng, len);
        let mut shuffled = p.values().to_vec();
        shuffled.shuffle(&mut rng);
        let shuffled = ProbVector(shuffled);
        let s = random_probability(&mut rng, dims[(t + 1) % dims.len()]);
        let ps = p.tensor(&s);
        for c in REPORT_ORDERS {
            let x = chi_c(&p, c)?;
            sym = sym.max((chi_c(&shuffled, c)? - x).abs());
            let product = x * chi_c(&s, c)?;
            mult = mult.max((chi_c(&ps, c)? - product).abs() / product);
            mono = mono.max(x - chi_c(&ProbVector::uniform(len), c)?);
            let excess = (1.0 - x).max(x - len as f64);
            bounds = bounds.max(excess);
            bounds_ok &= x >= 1.0 - 1e-12 && x <= len as f64 * (1.0 + 1e-12);
        }
    }
    let n = trials * REPORT_ORDERS.len();
    properties.push(check("symmetry", n, sym, sym == 0.0));
    properties.push(check("multiplicativity", n, mult, mult <= 1e-9));
    properties.push(check("monotonicity", n, mono.max(0.0), mono <= 1e-12));
    properties.push(check("bounds", n, bounds.max(0.0), bounds_ok));

    let mut worst = 0.0f64;
    for d in [2usize, 3] {
        let model = build(d)?;
        let a = sample(&model, trials, rng.random())?;
        let b = sample(&model, trials, rng.random())?;
        for (qa, qb) in a.iter().zip(&b) {
            let lambda: f64 = rng.random();
            let mixed: Vec<f64> = qa
                .values()
                .iter()
                .zip(qb.values())
                .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                .collect();
            let floor = chi(qa.values())?.min(chi(qb.values())?);
            worst = worst.max(floor - chi(&mixed)?);
        }
    }
    properties.push(check(
        "quasi_concavity",
        2 * trials,
        worst.max(0.0),
        worst <= 1e-12,
    ));

    Ok(PropertyReport {
        passed: properties.iter().all(|p| p.passed),
        properties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(values: &[f64]) -> ProbVector {
        ProbVector::new(values.to_vec()).unwrap()
    }

    /// Direct evaluation of the defining formula.
    fn chi_c_direct(p: &[f64], c: f64) -> f64 {
        p.iter()
            .map(|v| v.powf(c))
            .sum::<f64>()
            .powf(1.0 / (1.0 - c))
    }

    #[test]
    fn reported_values() {
        for c in [0.5, 2.0, 3.0, 7.5] {
            assert_eq!(chi_c(&p(&[1.0, 0.0, 0.0, 0.0]), c).unwrap(), 1.0);
            assert_eq!(chi_c(&p(&[0.5, 0.5, 0.0, 0.0]), c).unwrap(), 2.0);
        }
        assert_eq!(chi_c(&ProbVector::uniform(9), 2.0).unwrap(), 9.0);
    }

    #[test]
    fn invalid_orders() {
        let v = p(&[0.5, 0.5]);
        for c in [1.0, 0.0, -2.0, f64::NAN] {
            assert!(chi_c(&v, c).is_err());
        }
        assert!(ProbVector::new(vec![0.6, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.2, -0.2]).is_err());
    }

    #[test]
    fn agrees_with_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let len = rng.random_range(1..12);
            let v = random_probability(&mut rng, len);
            for c in [0.3, 0.5, 2.0, 3.0, 4.5] {
                let direct = chi_c_direct(v.values(), c);
                assert!((chi_c(&v, c).unwrap() - direct).abs() <= 1e-12 * direct);
            }
        }
    }

    #[test]
    fn quasi_measure() {
        assert_eq!(chi(&[0.5, 0.0, 0.0, 0.5]).unwrap(), 2.0);
        assert_eq!(chi(&[0.25; 4]).unwrap(), 4.0);
        let s3 = 3f64.sqrt();
        let s = (1.0 + 1.0 / s3) / 4.0;
        assert!((chi(&[s, s, s, (1.0 - s3) / 4.0]).unwrap() - 2.0).abs() < 1e-14);
        assert!(chi(&[0.0, 0.0]).is_err());
        let v = p(&[0.7, 0.2, 0.1]);
        assert!((chi(v.values()).unwrap() - chi_c(&v, 2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn marginal_formula_examples() {
        let m = build(2).unwrap();
        let am = marginals(&m, &[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(chi2_from_marginals(&m, &am).unwrap(), 2.0);
        let am = marginals(&m, &[0.25; 4]).unwrap();
        assert_eq!(chi2_from_marginals(&m, &am).unwrap(), 4.0);
        let m3 = build(3).unwrap();
        let mut e = vec![0.0; 9];
        e[0] = 1.0;
        assert_eq!(
            chi2_from_marginals(&m3, &marginals(&m3, &e).unwrap()).unwrap(),
            1.0
        );
    }

    #[test]
    fn second_order_identity_matches_brute_expansion() {
        // Oracle: expand Σ_k Σ_j (Σ_{i in block} q_i)² over atom pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2usize, 3, 5] {
            let m = build(d).unwrap();
            for _ in 0..20 {
                let q: Vec<f64> = {
                    let raw: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..2.0)).collect();
                    let shift = (raw.iter().sum::<f64>() - 1.0) / (d * d) as f64;
                    raw.iter().map(|x| x - shift).collect()
                };
                let mut brute = 0.0;
                for block in m.blocks() {
                    for &i in block {
                        for &j in block {
                            brute += q[i] * q[j];
                        }
                    }
                }
                let rhs = power_sum_identity_rhs(d, &q, 2);
                assert!((brute - rhs).abs() < 1e-10, "d={d}: {brute} vs {rhs}");
            }
        }
    }

    #[test]
    fn recursion_on_two_atom_blocks() {
        let m = build(2).unwrap();
        assert_eq!(chi_c_recursive(&m, &[0.5, 0.5, 0.0, 0.0], 2).unwrap(), 2.0);
        assert_eq!(
            chi_c_recursive(&m, &[0.25; 4], 3),
            Err(Error::DegenerateHierarchy { depth: 2, order: 3 })
        );
        assert!(chi_c_recursive(&m, &[0.25; 4], 1).is_err());
    }

    #[test]
    fn recursion_second_order_any_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [3usize, 5] {
            let m = build(d).unwrap();
            for _ in 0..50 {
                let q = random_probability(&mut rng, d * d);
                let direct = chi_c(&q, 2.0).unwrap();
                let rec = chi_c_recursive(&m, q.values(), 2).unwrap();
                assert!((rec - direct).abs() <= 1e-9 * direct);
            }
        }
    }

    #[test]
    fn higher_order_expansion_needs_two_atom_blocks() {
        // For blocks of three atoms the triple products inside a block are
        // missing from the closed-form expansion.
        let m = build(3).unwrap();
        let q = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let lhs = marginal_power_sum(&m, &q, 3).unwrap();
        let rhs = power_sum_identity_rhs(3, &q, 3);
        assert!((lhs - rhs).abs() < 1e-15);
        let q = [
            1.0 / 3.0,
            1.0 / 3.0,
            1.0 / 3.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ];
        let lhs = marginal_power_sum(&m, &q, 3).unwrap();
        let rhs = power_sum_identity_rhs(3, &q, 3);
        // The block {0,1,2} contributes 6 q0 q1 q2 = 6/27 beyond the expansion.
        assert!((lhs - rhs - 6.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn bridge() {
        let b = entropy_bridge(&p(&[0.5, 0.5]), 2.0).unwrap();
        assert!((b.renyi - 2f64.ln()).abs() < 1e-15);
        let b = entropy_bridge(&p(&[1.0, 0.0]), 2.0).unwrap();
        assert_eq!((b.renyi, b.tsallis, b.shannon_limit), (0.0, 0.0, 0.0));
        let b = entropy_bridge(&p(&[0.7, 0.3]), 2.0).unwrap();
        let x2: f64 = 1.0 / (0.49 + 0.09);
        assert!((b.renyi - x2.ln()).abs() < 1e-12);
        assert!((b.tsallis - 0.42).abs() < 1e-12);
    }

    #[test]
    fn report_passes() {
        let report = property_report(&[2, 3, 4, 6], 200, 1).unwrap();
        assert!(report.passed, "{report:#?}");
        let mu = ProbVector::uniform(2).tensor(&ProbVector::uniform(3));
        for c in REPORT_ORDERS {
            assert!((chi_c(&mu, c).unwrap() - 6.0).abs() < 1e-12);
        }
    }
}
