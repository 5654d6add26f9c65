//! Boolean lattice of statements over `D` mutually exclusive atomic
//! statements, truth and accessibility labels, and the exhaustive search
//! machinery used to find ideal configurations.
//!
//! A statement is the disjunction of the atoms in its bit-set, so meet, join
//! and negation are intersection, union and complement. The level of a
//! statement is its number of atoms.

use std::fmt;

use itertools::Itertools;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Largest atom count a [`Statement`] can represent.
pub const MAX_DIM: usize = 64;
/// Largest atom count for which explicit `2^D` label maps are built.
pub const MAX_EXPLICIT_DIM: usize = 20;
/// Largest atom count accepted by the exhaustive searches.
pub const MAX_BRUTE_DIM: usize = 12;
/// Largest atom count rendered by [`to_dot`].
pub const MAX_DOT_DIM: usize = 6;
/// Cap on the number of violations collected by [`is_admissible_access`].
pub const VIOLATION_LIMIT: usize = 32;

fn mask(dim: usize) -> u64 {
    if dim == 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

fn check_dim(dim: usize, max: usize) -> Result<()> {
    if dim > max {
        Err(Error::DimensionTooLarge { dim, max })
    } else {
        Ok(())
    }
}

/// A statement of the lattice over `dim` atoms.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Statement {
    dim: u8,
    bits: u64,
}

/// Ordered by dimension, then lexicographically by sorted atom list.
impl Ord for Statement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.atoms().cmp(other.atoms()))
    }
}

impl PartialOrd for Statement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Statement {
    pub fn new(dim: usize, bits: u64) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        if bits & !mask(dim) != 0 {
            let index = 63 - (bits & !mask(dim)).leading_zeros() as usize;
            return Err(Error::AtomOutOfRange { index, dim });
        }
        Ok(Self {
            dim: dim as u8,
            bits,
        })
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(dim: usize, atoms: I) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        let mut bits = 0u64;
        for index in atoms {
            if index >= dim {
                return Err(Error::AtomOutOfRange { index, dim });
            }
            bits |= 1 << index;
        }
        Ok(Self {
            dim: dim as u8,
            bits,
        })
    }

    /// The absurd statement. Panics if `dim > MAX_DIM`.
    pub fn bottom(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self {
            dim: dim as u8,
            bits: 0,
        }
    }

    /// The tautology. Panics if `dim > MAX_DIM`.
    pub fn top(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self {
            dim: dim as u8,
            bits: mask(dim),
        }
    }

    pub fn atom(dim: usize, index: usize) -> Result<Self> {
        Self::from_atoms(dim, [index])
    }

    /// Parses `"0|1|3"`; the empty string is the bottom statement.
    pub fn parse(dim: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "⊥" {
            return Self::new(dim, 0);
        }
        if text == "⊤" {
            check_dim(dim, MAX_DIM)?;
            return Ok(Self::top(dim));
        }
        let atoms = text
            .split('|')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad atom index {t:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_atoms(dim, atoms)
    }

    pub fn dim(self) -> usize {
        self.dim as usize
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn level(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_bottom(self) -> bool {
        self.bits == 0
    }

    pub fn is_top(self) -> bool {
        self.bits == mask(self.dim())
    }

    pub fn contains(self, atom: usize) -> bool {
        atom < self.dim() && self.bits >> atom & 1 == 1
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.dim()).filter(move |i| bits >> i & 1 == 1)
    }

    fn same_dim(self, other: Self) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        } else {
            Ok(())
        }
    }

    pub fn meet(self, other: Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            bits: self.bits & other.bits,
        })
    }

    pub fn join(self, other: Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            bits: self.bits | other.bits,
        })
    }

    pub fn negate(self) -> Self {
        Self {
            dim: self.dim,
            bits: !self.bits & mask(self.dim()),
        }
    }

    /// `self` implies `other` iff every atom of `self` is an atom of `other`.
    pub fn implies(self, other: Self) -> Result<bool> {
        self.same_dim(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// Node name used in DOT output: sorted atom indices joined by `|`.
    pub fn dot_name(self) -> String {
        self.atoms().join("|")
    }

    /// Relabels atoms: atom `i` becomes `perm[i]`.
    pub fn permute(self, perm: &[usize]) -> Self {
        let bits = self.atoms().fold(0u64, |acc, i| acc | 1 << perm[i]);
        Self {
            dim: self.dim,
            bits,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bottom() {
            return f.write_str("⊥");
        }
        write!(f, "{{{}}}", self.atoms().join(","))
    }
}

impl fmt::Debug for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.dim)
    }
}

impl Serialize for Statement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.level()))?;
        for a in self.atoms() {
            seq.serialize_element(&a)?;
        }
        seq.end()
    }
}

/// Number of statements over `dim` atoms, `2^dim`.
pub fn statement_count(dim: usize) -> Result<u128> {
    check_dim(dim, 127)?;
    Ok(1u128 << dim)
}

/// Exactly one atom is true.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruthAssignment {
    dim: usize,
    true_atom: usize,
}

impl TruthAssignment {
    pub fn new(dim: usize, true_atom: usize) -> Result<Self> {
        check_dim(dim, MAX_DIM)?;
        if true_atom >= dim {
            return Err(Error::AtomOutOfRange {
                index: true_atom,
                dim,
            });
        }
        Ok(Self { dim, true_atom })
    }

    pub fn true_atom(&self) -> usize {
        self.true_atom
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn truth_of(t: &TruthAssignment, s: Statement) -> bool {
    s.contains(t.true_atom)
}

/// Number of accessible level-`depth` statements in an ideal configuration
/// of the model `(dim, depth)`.
pub fn ideal_block_count(dim: usize, depth: usize) -> usize {
    if depth == 0 || depth > dim {
        return 0;
    }
    if dim.is_multiple_of(depth) {
        dim / depth
    } else {
        dim / depth - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Access {
    /// One label per statement, indexed by the statement's bit pattern.
    Explicit(Vec<bool>),
    /// Accessible statements are the unions of the blocks and the residual
    /// atoms not covered by any block.
    Blocks(Vec<Statement>),
}

/// A model `(D, d)` together with an accessibility assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    dim: usize,
    depth: usize,
    access: Access,
}

fn validate_model(dim: usize, depth: usize) -> Result<()> {
    if dim == 0 || depth == 0 || depth > dim {
        return Err(Error::InvalidModel {
            dim,
            depth,
            reason: "need 1 <= d <= D".into(),
        });
    }
    Ok(())
}

/// Splits the atoms `0..dim` into the cells of the Boolean algebra generated
/// by `generators`.
fn generated_cells(dim: usize, generators: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut cells = vec![mask(dim)];
    for g in generators {
        let mut next = Vec::with_capacity(cells.len() + 1);
        for &c in &cells {
            for part in [c & g, c & !g] {
                if part != 0 {
                    next.push(part);
                }
            }
        }
        cells = next;
    }
    cells
}

fn is_union_of_cells(bits: u64, cells: &[u64]) -> bool {
    cells.iter().all(|&c| bits & c == 0 || bits & c == c)
}

impl Configuration {
    pub fn explicit(dim: usize, depth: usize, labels: Vec<bool>) -> Result<Self> {
        validate_model(dim, depth)?;
        check_dim(dim, MAX_EXPLICIT_DIM)?;
        if labels.len() != 1 << dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} labels, got {}",
                1usize << dim,
                labels.len()
            )));
        }
        Ok(Self {
            dim,
            depth,
            access: Access::Explicit(labels),
        })
    }

    /// Labels exactly the listed statements accessible.
    pub fn from_accessible<I>(dim: usize, depth: usize, accessible: I) -> Result<Self>
    where
        I: IntoIterator<Item = Statement>,
    {
        validate_model(dim, depth)?;
        check_dim(dim, MAX_EXPLICIT_DIM)?;
        let mut labels = vec![false; 1 << dim];
        for s in accessible {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: s.dim(),
                });
            }
            labels[s.bits as usize] = true;
        }
        Ok(Self {
            dim,
            depth,
            access: Access::Explicit(labels),
        })
    }

    /// Labels accessible the closure of `generators` (together with top and
    /// bottom) under meet, join and negation.
    pub fn generated<I>(dim: usize, depth: usize, generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = Statement>,
    {
        validate_model(dim, depth)?;
        check_dim(dim, MAX_EXPLICIT_DIM)?;
        let gens = generators
            .into_iter()
            .map(|s| {
                if s.dim() == dim {
                    Ok(s.bits)
                } else {
                    Err(Error::DimensionMismatch {
                        left: dim,
                        right: s.dim(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let cells = generated_cells(dim, gens);
        let labels = (0..1u64 << dim)
            .map(|bits| is_union_of_cells(bits, &cells))
            .collect();
        Ok(Self {
            dim,
            depth,
            access: Access::Explicit(labels),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.access, Access::Explicit(_))
    }

    fn cells(blocks: &[Statement], dim: usize) -> Vec<u64> {
        let mut cells: Vec<u64> = blocks.iter().map(|b| b.bits).collect();
        let covered = cells.iter().fold(0, |acc, c| acc | c);
        let residual = mask(dim) & !covered;
        if residual != 0 {
            cells.push(residual);
        }
        cells
    }

    pub fn is_accessible(&self, s: Statement) -> bool {
        if s.dim() != self.dim {
            return false;
        }
        match &self.access {
            Access::Explicit(labels) => labels[s.bits as usize],
            Access::Blocks(blocks) => is_union_of_cells(s.bits, &Self::cells(blocks, self.dim)),
        }
    }

    /// Accessible statements at level `d`, sorted.
    pub fn level_blocks(&self) -> Vec<Statement> {
        match &self.access {
            Access::Explicit(labels) => {
                let mut out: Vec<_> = (0..labels.len() as u64)
                    .filter(|&b| labels[b as usize] && b.count_ones() as usize == self.depth)
                    .map(|bits| Statement {
                        dim: self.dim as u8,
                        bits,
                    })
                    .collect();
                out.sort();
                out
            }
            Access::Blocks(blocks) => {
                let mut out: Vec<_> = Self::cells(blocks, self.dim)
                    .into_iter()
                    .filter(|c| c.count_ones() as usize == self.depth)
                    .map(|bits| Statement {
                        dim: self.dim as u8,
                        bits,
                    })
                    .collect();
                out.sort();
                out
            }
        }
    }

    /// Materialises the `2^D` label map.
    pub fn to_explicit(&self) -> Result<Self> {
        check_dim(self.dim, MAX_EXPLICIT_DIM)?;
        let labels = match &self.access {
            Access::Explicit(labels) => labels.clone(),
            Access::Blocks(blocks) => {
                let cells = Self::cells(blocks, self.dim);
                (0..1u64 << self.dim)
                    .map(|b| is_union_of_cells(b, &cells))
                    .collect()
            }
        };
        Ok(Self {
            dim: self.dim,
            depth: self.depth,
            access: Access::Explicit(labels),
        })
    }

    /// All accessible statements (explicit representation only up to
    /// [`MAX_EXPLICIT_DIM`]).
    pub fn accessible_statements(&self) -> Result<Vec<Statement>> {
        let explicit = self.to_explicit()?;
        let Access::Explicit(labels) = &explicit.access else {
            unreachable!()
        };
        Ok(labels
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(b, _)| Statement {
                dim: self.dim as u8,
                bits: b as u64,
            })
            .collect())
    }
}

/// Canonical ideal configuration: consecutive blocks `{0..d-1}, {d..2d-1}, …`.
pub fn ideal_configuration(dim: usize, depth: usize) -> Result<Configuration> {
    validate_model(dim, depth)?;
    check_dim(dim, MAX_DIM)?;
    let blocks = (0..ideal_block_count(dim, depth))
        .map(|k| Statement::from_atoms(dim, k * depth..(k + 1) * depth))
        .collect::<Result<Vec<_>>>()?;
    Ok(Configuration {
        dim,
        depth,
        access: Access::Blocks(blocks),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NegationMismatch {
        statement: Statement,
        negation: Statement,
    },
    BelowDepth {
        statement: Statement,
    },
    MeetNotAccessible {
        left: Statement,
        right: Statement,
        meet: Statement,
    },
    JoinNotAccessible {
        left: Statement,
        right: Statement,
        join: Statement,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegationMismatch {
                statement,
                negation,
            } => write!(
                f,
                "{statement} and its negation {negation} carry different labels"
            ),
            Self::BelowDepth { statement } => write!(
                f,
                "{statement} at level {} is accessible below the depth",
                statement.level()
            ),
            Self::MeetNotAccessible { left, right, meet } => {
                write!(f, "{left} ∧ {right} = {meet} must be accessible")
            }
            Self::JoinNotAccessible { left, right, join } => {
                write!(f, "{left} ∨ {right} = {join} must be accessible")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

/// Checks negation preservation, closure of accessible statements under
/// meet and join, and the depth floor. At most [`VIOLATION_LIMIT`]
/// violations are reported.
pub fn is_admissible_access(cfg: &Configuration) -> Result<Admissibility> {
    let violations = collect_violations(cfg, VIOLATION_LIMIT)?;
    Ok(Admissibility {
        admissible: violations.is_empty(),
        violations,
    })
}

/// Same checks as [`is_admissible_access`], stopping at the first violation.
pub fn first_violation(cfg: &Configuration) -> Result<Option<Violation>> {
    Ok(collect_violations(cfg, 1)?.into_iter().next())
}

fn collect_violations(cfg: &Configuration, limit: usize) -> Result<Vec<Violation>> {
    let explicit;
    let labels = match &cfg.access {
        Access::Explicit(l) => l,
        Access::Blocks(_) => {
            explicit = cfg.to_explicit()?;
            match &explicit.access {
                Access::Explicit(l) => l,
                Access::Blocks(_) => unreachable!(),
            }
        }
    };
    let dim = cfg.dim;
    let full = mask(dim);
    let st = |bits: u64| Statement {
        dim: dim as u8,
        bits,
    };
    let mut out = Vec::new();

    for bits in 0..labels.len() as u64 {
        let neg = !bits & full;
        if bits < neg && labels[bits as usize] != labels[neg as usize] {
            out.push(Violation::NegationMismatch {
                statement: st(bits),
                negation: st(neg),
            });
            if out.len() >= limit {
                return Ok(out);
            }
        }
    }

    let accessible: Vec<u64> = (0..labels.len() as u64)
        .filter(|&b| labels[b as usize])
        .collect();

    for &bits in &accessible {
        let level = bits.count_ones() as usize;
        if level > 0 && level < cfg.depth {
            out.push(Violation::BelowDepth {
                statement: st(bits),
            });
            if out.len() >= limit {
                return Ok(out);
            }
        }
    }

    // The accessible set is closed iff it equals the algebra generated by
    // its own members, which has 2^cells elements.
    if accessible.is_empty() {
        return Ok(out);
    }
    let cells = generated_cells(dim, accessible.iter().copied());
    if accessible.len() as u128 == 1u128 << cells.len() {
        return Ok(out);
    }
    for (i, &x) in accessible.iter().enumerate() {
        for &y in &accessible[i + 1..] {
            let meet = x & y;
            if !labels[meet as usize] {
                out.push(Violation::MeetNotAccessible {
                    left: st(x),
                    right: st(y),
                    meet: st(meet),
                });
                if out.len() >= limit {
                    return Ok(out);
                }
            }
            let join = x | y;
            if !labels[join as usize] {
                out.push(Violation::JoinNotAccessible {
                    left: st(x),
                    right: st(y),
                    join: st(join),
                });
                if out.len() >= limit {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Visits every partition of the atoms `0..dim` into cells of at least
/// `min_cell` atoms. Each admissible accessibility assignment is the Boolean
/// algebra generated by such a partition.
pub fn for_each_partition<F: FnMut(&[u64])>(dim: usize, min_cell: usize, mut visit: F) {
    fn rec<F: FnMut(&[u64])>(
        atom: usize,
        dim: usize,
        min_cell: usize,
        cells: &mut Vec<u64>,
        visit: &mut F,
    ) {
        let remaining = dim - atom;
        let deficit: usize = cells
            .iter()
            .map(|c| min_cell.saturating_sub(c.count_ones() as usize))
            .sum();
        if deficit > remaining {
            return;
        }
        if atom == dim {
            visit(cells);
            return;
        }
        let bit = 1u64 << atom;
        for i in 0..cells.len() {
            cells[i] |= bit;
            rec(atom + 1, dim, min_cell, cells, visit);
            cells[i] &= !bit;
        }
        if deficit + min_cell <= remaining {
            cells.push(bit);
            rec(atom + 1, dim, min_cell, cells, visit);
            cells.pop();
        }
    }
    if dim == 0 {
        visit(&[]);
        return;
    }
    let mut cells = Vec::with_capacity(dim);
    rec(0, dim, min_cell.max(1), &mut cells, &mut visit);
}

/// Number of unions of cells containing exactly `level` atoms.
fn unions_at_level(cells: &[u64], level: usize) -> usize {
    let mut ways = vec![0usize; level + 1];
    ways[0] = 1;
    for c in cells {
        let size = c.count_ones() as usize;
        for s in (size..=level).rev() {
            ways[s] += ways[s - size];
        }
    }
    ways[level]
}

fn statements_at_level(cells: &[u64], level: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for pick in 0u32..1 << cells.len() {
        let bits = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| pick >> i & 1 == 1)
            .fold(0u64, |acc, (_, c)| acc | c);
        if bits.count_ones() as usize == level {
            out.push(bits);
        }
    }
    out
}

fn validate_brute(dim: usize, depth: usize) -> Result<()> {
    validate_model(dim, depth)?;
    check_dim(dim, MAX_BRUTE_DIM)
}

/// Exhaustive maximum of the number of accessible level-`depth` statements
/// over every admissible configuration of `(dim, depth)`.
pub fn max_accessible_brute(dim: usize, depth: usize) -> Result<usize> {
    validate_brute(dim, depth)?;
    let mut best = 0;
    for_each_partition(dim, depth, |cells| {
        best = best.max(unions_at_level(cells, depth));
    });
    Ok(best)
}

/// All distinct families of accessible level-`depth` statements attaining
/// [`max_accessible_brute`], each sorted, found by exhaustive search.
pub fn ideal_configurations_brute(dim: usize, depth: usize) -> Result<Vec<Vec<Statement>>> {
    validate_brute(dim, depth)?;
    let best = max_accessible_brute(dim, depth)?;
    let mut found = Vec::new();
    for_each_partition(dim, depth, |cells| {
        if unions_at_level(cells, depth) == best {
            let mut family: Vec<Statement> = statements_at_level(cells, depth)
                .into_iter()
                .map(|bits| Statement {
                    dim: dim as u8,
                    bits,
                })
                .collect();
            family.sort();
            found.push(family);
        }
    });
    found.sort();
    found.dedup();
    Ok(found)
}

/// Lexicographically smallest sorted image of `family` under every atom
/// permutation. Exponential in `dim`; limited to `dim <= 8`.
pub fn orbit_canonical(dim: usize, family: &[Statement]) -> Result<Vec<Statement>> {
    check_dim(dim, 8)?;
    let mut best: Option<Vec<Statement>> = None;
    for perm in (0..dim).permutations(dim) {
        let mut image: Vec<Statement> = family.iter().map(|s| s.permute(&perm)).collect();
        image.sort();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    Ok(best.unwrap_or_default())
}

/// Canonical relabelling of a family of pairwise-disjoint statements: atoms
/// are renumbered in order of first appearance after sorting the family by
/// decreasing size. Two disjoint families are related by an atom permutation
/// iff their canonical forms agree.
pub fn disjoint_canonical(dim: usize, family: &[Statement]) -> Result<Vec<Statement>> {
    check_dim(dim, MAX_DIM)?;
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if a.bits & b.bits != 0 {
                return Err(Error::InvalidArgument(format!(
                    "{a} and {b} overlap; family is not disjoint"
                )));
            }
        }
    }
    let mut sorted = family.to_vec();
    sorted.sort_by(|a, b| b.level().cmp(&a.level()).then(a.cmp(b)));
    let mut perm = vec![usize::MAX; dim];
    let mut next = 0;
    for s in &sorted {
        for a in s.atoms() {
            perm[a] = next;
            next += 1;
        }
    }
    for p in perm.iter_mut().filter(|p| **p == usize::MAX) {
        *p = next;
        next += 1;
    }
    let mut image: Vec<Statement> = family.iter().map(|s| s.permute(&perm)).collect();
    image.sort();
    Ok(image)
}

/// The classical lattice whose atoms are the accessible blocks of a
/// configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalSublattice {
    dim: usize,
    blocks: Vec<Statement>,
}

impl ClassicalSublattice {
    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Statement] {
        &self.blocks
    }

    /// Maps a statement over the `m` block-atoms to the original lattice.
    pub fn lift(&self, s: Statement) -> Result<Statement> {
        if s.dim() != self.m() {
            return Err(Error::DimensionMismatch {
                left: self.m(),
                right: s.dim(),
            });
        }
        let bits = s.atoms().fold(0u64, |acc, k| acc | self.blocks[k].bits);
        Statement::new(self.dim, bits)
    }
}

pub fn classical_sublattice(cfg: &Configuration) -> Result<ClassicalSublattice> {
    let blocks = cfg.level_blocks();
    if blocks.len() <= 1 {
        return Err(Error::UselessModel {
            blocks: blocks.len(),
            depth: cfg.depth,
        });
    }
    Ok(ClassicalSublattice {
        dim: cfg.dim,
        blocks,
    })
}

/// Hasse diagram in Graphviz DOT syntax, one `rank=same` group per level.
pub fn to_dot(cfg: &Configuration) -> Result<String> {
    let dim = cfg.dim;
    check_dim(dim, MAX_DOT_DIM)?;
    let mut by_level: Vec<Vec<u64>> = vec![Vec::new(); dim + 1];
    for bits in 0..1u64 << dim {
        by_level[bits.count_ones() as usize].push(bits);
    }
    let st = |bits| Statement {
        dim: dim as u8,
        bits,
    };
    let mut out = String::new();
    out.push_str(&format!(
        "graph hasse {{\n  // model (D={dim}, d={})\n  rankdir=BT;\n  node [shape=box, style=filled];\n",
        cfg.depth
    ));
    for level in &by_level {
        out.push_str("  { rank=same;");
        for &bits in level {
            let s = st(bits);
            let accessible = cfg.is_accessible(s);
            out.push_str(&format!(
                " \"{}\" [label=\"{}\", access=\"{}\", fillcolor=\"{}\"];",
                s.dot_name(),
                s,
                if accessible { "A" } else { "N" },
                if accessible { "plum" } else { "white" }
            ));
        }
        out.push_str(" }\n");
    }
    for level in &by_level {
        for &bits in level {
            for i in (0..dim).filter(|i| bits >> i & 1 == 0) {
                out.push_str(&format!(
                    "  \"{}\" -- \"{}\";\n",
                    st(bits).dot_name(),
                    st(bits | 1 << i).dot_name()
                ));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
