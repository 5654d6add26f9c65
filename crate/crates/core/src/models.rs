//! Model-level algebra: classification, composition and inflation.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ideal_block_count;

/// A model `(D, d)`: `D` atoms with accessibility-depth `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Model {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "d")]
    pub depth: usize,
}

impl Model {
    pub fn new(dim: usize, depth: usize) -> Result<Self> {
        if depth == 0 || depth > dim {
            return Err(Error::InvalidModel {
                dim,
                depth,
                reason: "need 1 <= d <= D".into(),
            });
        }
        Ok(Self { dim, depth })
    }

    pub fn ideal_blocks(&self) -> usize {
        ideal_block_count(self.dim, self.depth)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.dim, self.depth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ModelClass {
    Classical { m: usize },
    Useless,
    Nontrivial { m: usize },
}

pub fn classify(model: Model) -> ModelClass {
    if model.depth == 1 {
        return ModelClass::Classical { m: model.dim };
    }
    match model.ideal_blocks() {
        0 | 1 => ModelClass::Useless,
        m => ModelClass::Nontrivial { m },
    }
}

/// Result of composing two models. Atom `(i, j)` of the factors becomes atom
/// `i * D2 + j` of the product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Composition {
    pub model: Model,
    pub left: Model,
    pub right: Model,
    /// Cross products of the factors' ideal blocks, as sorted atom lists.
    pub blocks: Vec<Vec<usize>>,
}

impl Composition {
    pub fn pair(&self, i: usize, j: usize) -> usize {
        i * self.right.dim + j
    }

    pub fn unpair(&self, alpha: usize) -> (usize, usize) {
        (alpha / self.right.dim, alpha % self.right.dim)
    }
}

fn ideal_ranges(model: Model) -> impl Iterator<Item = std::ops::Range<usize>> {
    (0..model.ideal_blocks()).map(move |k| k * model.depth..(k + 1) * model.depth)
}

pub fn compose(left: Model, right: Model) -> Result<Composition> {
    let dim = left
        .dim
        .checked_mul(right.dim)
        .ok_or_else(|| Error::Overflow("composite atom count".into()))?;
    let model = Model::new(dim, left.depth * right.depth)?;
    let mut blocks = Vec::new();
    for b1 in ideal_ranges(left) {
        for b2 in ideal_ranges(right) {
            let mut block: Vec<usize> = b1
                .clone()
                .flat_map(|i| b2.clone().map(move |j| i * right.dim + j))
                .collect();
            block.sort_unstable();
            blocks.push(block);
        }
    }
    Ok(Composition {
        model,
        left,
        right,
        blocks,
    })
}

/// Inflation of a classical model of dimension `m` with parameter `c`:
/// `(m^(c+1), m^c)`.
pub fn inflate(m: usize, c: u32) -> Result<Model> {
    if m < 2 || c < 1 {
        return Err(Error::InvalidArgument(format!(
            "inflation needs m >= 2 and c >= 1 (got m={m}, c={c})"
        )));
    }
    let depth = m
        .checked_pow(c)
        .ok_or_else(|| Error::Overflow(format!("{m}^{c}")))?;
    let dim = depth
        .checked_mul(m)
        .ok_or_else(|| Error::Overflow(format!("{m}^{}", c + 1)))?;
    Model::new(dim, depth)
}

/// All `D` whose ideal configuration at depth `d` has exactly `m` accessible
/// blocks.
pub fn allowed_inflations(m: usize, depth: usize) -> Result<BTreeSet<usize>> {
    if m == 0 || depth == 0 {
        return Err(Error::InvalidArgument(format!(
            "need m >= 1 and d >= 1 (got m={m}, d={depth})"
        )));
    }
    // For D >= (m + 2) d the block count is at least m + 1.
    Ok((depth..(m + 2) * depth)
        .filter(|&dim| ideal_block_count(dim, depth) == m)
        .collect())
}

/// The set `{m d} ∪ {(m + 1) d + i : 1 <= i <= m - 1}` as it is usually
/// written; kept for comparison with [`allowed_inflations`].
pub fn allowed_inflations_printed(m: usize, depth: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::from([m * depth]);
    out.extend((1..m).map(|i| (m + 1) * depth + i));
    out
}

pub fn inflation_compatible_with_composition(m1: usize, m2: usize, c: u32) -> Result<bool> {
    let direct = inflate(
        m1.checked_mul(m2)
            .ok_or_else(|| Error::Overflow("m1 * m2".into()))?,
        c,
    )?;
    let composed = compose(inflate(m1, c)?, inflate(m2, c)?)?.model;
    Ok(direct == composed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(dim: usize, depth: usize) -> Model {
        Model::new(dim, depth).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(classify(model(4, 1)), ModelClass::Classical { m: 4 });
        assert_eq!(classify(model(3, 2)), ModelClass::Useless);
        assert_eq!(classify(model(4, 2)), ModelClass::Nontrivial { m: 2 });
        assert_eq!(classify(model(2, 2)), ModelClass::Useless);
        assert_eq!(classify(model(5, 2)), ModelClass::Useless);
        assert!(Model::new(2, 3).is_err());
        assert!(Model::new(2, 0).is_err());
    }

    #[test]
    fn composition() {
        let c = compose(model(2, 2), model(2, 1)).unwrap();
        assert_eq!(c.model, model(4, 2));
        assert_eq!(c.blocks, vec![vec![0, 2], vec![1, 3]]);

        assert_eq!(
            compose(model(2, 1), model(3, 1)).unwrap().model,
            model(6, 1)
        );

        let c = compose(model(4, 2), model(9, 3)).unwrap();
        assert_eq!(c.model, model(36, 6));
        assert_eq!(c.blocks.len(), 6);
        assert_eq!(c.unpair(c.pair(3, 7)), (3, 7));
    }

    #[test]
    fn composite_blocks_are_cross_products() {
        // Oracle: rebuild each product block from explicit atom pairs.
        let (a, b) = (model(4, 2), model(9, 3));
        let c = compose(a, b).unwrap();
        let mut expected = Vec::new();
        for k1 in 0..2 {
            for k2 in 0..3 {
                let mut block = Vec::new();
                for i in 0..4 {
                    for j in 0..9 {
                        if i / 2 == k1 && j / 3 == k2 {
                            block.push(i * 9 + j);
                        }
                    }
                }
                expected.push(block);
            }
        }
        assert_eq!(c.blocks, expected);
        let mut seen: Vec<usize> = c.blocks.concat();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 36);
    }

    #[test]
    fn inflation() {
        assert_eq!(inflate(2, 1).unwrap(), model(4, 2));
        assert_eq!(inflate(3, 1).unwrap(), model(9, 3));
        assert_eq!(inflate(2, 2).unwrap(), model(8, 4));
        assert!(inflate(1, 1).is_err());
        assert!(inflate(2, 0).is_err());
        assert!(matches!(inflate(1 << 20, 5), Err(Error::Overflow(_))));
    }

    #[test]
    fn allowed_inflation_sets() {
        assert_eq!(allowed_inflations(2, 2).unwrap(), BTreeSet::from([4, 7]));
        assert_eq!(
            allowed_inflations(2, 3).unwrap(),
            BTreeSet::from([6, 10, 11])
        );
        assert_eq!(allowed_inflations(1, 2).unwrap(), BTreeSet::from([2, 5]));
        assert_eq!(allowed_inflations(3, 1).unwrap(), BTreeSet::from([3]));
        assert_eq!(allowed_inflations_printed(2, 3), BTreeSet::from([6, 10]));
    }

    #[test]
    fn compatibility() {
        assert!(inflation_compatible_with_composition(2, 3, 1).unwrap());
        assert!(inflation_compatible_with_composition(2, 2, 2).unwrap());
        assert!(inflation_compatible_with_composition(3, 5, 1).unwrap());
        assert_eq!(inflate(15, 1).unwrap(), model(225, 15));
    }

    #[test]
    fn compose_is_multiplicative_and_associative() {
        let models = [model(2, 1), model(4, 2), model(3, 3), model(6, 2)];
        for &a in &models {
            for &b in &models {
                for &c in &models {
                    let ab_c = compose(compose(a, b).unwrap().model, c).unwrap().model;
                    let a_bc = compose(a, compose(b, c).unwrap().model).unwrap().model;
                    assert_eq!(ab_c, a_bc);
                    assert_eq!(ab_c.dim, a.dim * b.dim * c.dim);
                    assert_eq!(ab_c.depth, a.depth * b.depth * c.depth);
                }
            }
        }
    }
}
