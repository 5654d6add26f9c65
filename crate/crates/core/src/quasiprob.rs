//! Quasi-probability valuation of a statement lattice: the additive extension
//! of a state `q` to every statement, conditionals, and the sum, product and
//! Bayes rules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{Statement, MAX_DIM};
use crate::mes::MesModel;
use crate::DEFAULT_TOL;

/// Conditioning values with smaller magnitude are treated as zero.
pub const ZERO_CONDITIONING: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Valuation {
    q: Vec<f64>,
}

impl Valuation {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() || q.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: q.len(),
                max: MAX_DIM,
            });
        }
        let sum: f64 = q.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn state(&self) -> &[f64] {
        &self.q
    }

    fn check(&self, s: Statement) -> Result<()> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: s.dim(),
            });
        }
        Ok(())
    }

    /// `Q(s) = Σ_{i ∈ s} q_i`.
    pub fn value(&self, s: Statement) -> Result<f64> {
        self.check(s)?;
        Ok(s.atoms().map(|i| self.q[i]).sum())
    }

    /// `Q(y | x) = Q(x ∧ y) / Q(x)`; exactly 1 when `x` implies `y` and
    /// exactly 0 when `x ∧ y` is absurd.
    pub fn conditional(&self, y: Statement, x: Statement) -> Result<f64> {
        self.check(y)?;
        let vx = self.value(x)?;
        if vx.abs() < ZERO_CONDITIONING {
            return Err(Error::ZeroConditioning);
        }
        if x.implies(y)? {
            return Ok(1.0);
        }
        let xy = x.meet(y)?;
        if xy.is_bottom() {
            return Ok(0.0);
        }
        Ok(self.value(xy)? / vx)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RulesReport {
    pub trials: usize,
    pub skipped: usize,
    pub sum_rule_worst: f64,
    pub product_rule_worst: f64,
    pub bayes_worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Conditioning values below this magnitude are skipped by [`check_rules`].
pub const RULES_MIN_CONDITIONING: f64 = 1e-6;
pub const RULES_TOL: f64 = 1e-12;

/// Scale-aware deviation: absolute below 1, relative above.
fn deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Checks the sum, product and Bayes rules on `trials` random statement
/// triples `(x, y, z)`.
pub fn check_rules(v: &Valuation, trials: usize, seed: u64) -> Result<RulesReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = v.dim();
    let full = if dim == 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    };
    let draw = |rng: &mut ChaCha8Rng| Statement::new(dim, rng.random::<u64>() & full);
    let (mut sum_w, mut prod_w, mut bayes_w) = (0.0f64, 0.0f64, 0.0f64);
    let mut skipped = 0;
    for _ in 0..trials {
        let (x, y, z) = (draw(&mut rng)?, draw(&mut rng)?, draw(&mut rng)?);
        if let Some((s, p, b)) = rule_deviations(v, x, y, z)? {
            sum_w = sum_w.max(s);
            prod_w = prod_w.max(p);
            bayes_w = bayes_w.max(b);
        } else {
            skipped += 1;
        }
    }
    Ok(RulesReport {
        trials,
        skipped,
        sum_rule_worst: sum_w,
        product_rule_worst: prod_w,
        bayes_worst: bayes_w,
        tolerance: RULES_TOL,
        passed: sum_w <= RULES_TOL && prod_w <= RULES_TOL && bayes_w <= RULES_TOL,
    })
}

/// Deviations of the three rules for one triple, or `None` when one of the
/// conditioning statements `z`, `x ∧ z`, `y ∧ z` is (nearly) zero-valued.
pub fn rule_deviations(
    v: &Valuation,
    x: Statement,
    y: Statement,
    z: Statement,
) -> Result<Option<(f64, f64, f64)>> {
    let xz = x.meet(z)?;
    let yz = y.meet(z)?;
    if [z, xz, yz]
        .iter()
        .map(|s| v.value(*s))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .any(|val| val.abs() < RULES_MIN_CONDITIONING)
    {
        return Ok(None);
    }
    let c = |a: Statement, b: Statement| v.conditional(a, b);
    let x_or_y = x.join(y)?;
    let x_and_y = x.meet(y)?;
    let sum = deviation(c(x_or_y, z)?, c(x, z)? + c(y, z)? - c(x_and_y, z)?);
    let product = deviation(c(x_and_y, z)?, c(x, z)? * c(y, xz)?);
    let bayes = deviation(c(y, xz)?, c(y, z)? * c(x, yz)? / c(x, z)?);
    Ok(Some((sum, product, bayes)))
}

/// Every MES block has a value in `[0, 1]`.
pub fn accessible_restriction_ok(model: &MesModel, v: &Valuation) -> Result<bool> {
    if v.dim() != model.atoms() {
        return Err(Error::DimensionMismatch {
            left: model.atoms(),
            right: v.dim(),
        });
    }
    Ok(model.blocks().all(|b| {
        let val: f64 = b.iter().map(|&i| v.q[i]).sum();
        (-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&val)
    }))
}

/// The one-parameter family on four atoms in which the composite value
/// `Q(A ∧ B | C)` decreases while both of its product-rule factors
/// `Q(B | C)` and `Q(A | B ∧ C)` increase, for `A = s0 ∨ s1`, `B = s0 ∨ s2`,
/// `C = s0 ∨ s1 ∨ s2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GCounterexample {
    pub x: f64,
    pub q: [f64; 4],
    /// `Q(A ∧ B | C)`
    pub joint_given_c: f64,
    /// `Q(B | C)`
    pub b_given_c: f64,
    /// `Q(A | B ∧ C)`
    pub a_given_bc: f64,
}

pub fn g_family_state(x: f64) -> [f64; 4] {
    [
        x * (x - 1.0) / 4.0,
        (2.0 - x) / 4.0,
        -(x - 1.0) * (x - 1.0) / 4.0,
        0.75,
    ]
}

pub fn g_family_range() -> (f64, f64) {
    let r = 3f64.sqrt();
    (1.0 - r, 1.0 + r)
}

/// Conditionals of the family evaluated on the lattice.
pub fn g_counterexample(x: f64) -> Result<GCounterexample> {
    let (lo, hi) = g_family_range();
    if !x.is_finite() || x < lo - 1e-12 || x > hi + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "x = {x} outside [1-√3, 1+√3]"
        )));
    }
    let q = g_family_state(x);
    let v = Valuation::new(q.to_vec())?;
    let a = Statement::from_atoms(4, [0, 1])?;
    let b = Statement::from_atoms(4, [0, 2])?;
    let c = Statement::from_atoms(4, [0, 1, 2])?;
    Ok(GCounterexample {
        x,
        q,
        joint_given_c: v.conditional(a.meet(b)?, c)?,
        b_given_c: v.conditional(b, c)?,
        a_given_bc: v.conditional(a, b.meet(c)?)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityScan {
    pub points: usize,
    pub closed_form_worst: f64,
    pub product_rule_worst: f64,
    pub joint_decreasing: bool,
    pub factors_increasing: bool,
    pub passed: bool,
}

/// Evaluates the family on `points` evenly spaced `x ∈ [1-√3, 1/2]`,
/// comparing with the closed forms `x(x-1)`, `x-1`, `x` and checking the
/// direction of every finite difference.
pub fn g_monotonicity_scan(points: usize) -> Result<MonotonicityScan> {
    if points < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let (lo, _) = g_family_range();
    let hi = 0.5;
    let rows = (0..points)
        .map(|k| g_counterexample(lo + (hi - lo) * k as f64 / (points - 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    let mut closed = 0.0f64;
    let mut product = 0.0f64;
    for r in &rows {
        let x = r.x;
        closed = closed
            .max((r.joint_given_c - x * (x - 1.0)).abs())
            .max((r.b_given_c - (x - 1.0)).abs())
            .max((r.a_given_bc - x).abs());
        product = product.max((r.joint_given_c - r.b_given_c * r.a_given_bc).abs());
    }
    let joint_decreasing = rows
        .windows(2)
        .all(|w| w[1].joint_given_c < w[0].joint_given_c);
    let factors_increasing = rows
        .windows(2)
        .all(|w| w[1].b_given_c > w[0].b_given_c && w[1].a_given_bc > w[0].a_given_bc);
    Ok(MonotonicityScan {
        points,
        closed_form_worst: closed,
        product_rule_worst: product,
        joint_decreasing,
        factors_increasing,
        passed: closed <= 1e-12 && product <= 1e-12 && joint_decreasing && factors_increasing,
    })
}
