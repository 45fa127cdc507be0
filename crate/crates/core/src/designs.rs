//! Combinatorial t-designs: representation, exhaustive verification, and
//! the constructions used as raw material for authentication codes.
//!
//! A `t-(v,k,lambda)` design is a family of k-subsets (blocks) of a
//! v-point set such that every t-subset of points lies in exactly
//! `lambda` blocks. Steiner systems are the `lambda = 1` case; the
//! constructions here produce Steiner triple systems (k=3), boolean
//! quadruple systems on 2^d points, and doubled quadruple systems.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::util::binomial;

/// A t-(v,k,lambda) block design with points 0..v-1.
///
/// Structural invariants (block size, point range, strict ordering inside
/// a block, no repeated blocks) are enforced at construction; the coverage
/// condition is checked separately by [`verify_design`]. Blocks are kept
/// in lexicographic order, which is the canonical form used by the file
/// format and all constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    t: usize,
    v: usize,
    k: usize,
    lambda: u64,
    blocks: Vec<Vec<usize>>,
}

impl Design {
    /// Build a design from declared parameters and blocks.
    ///
    /// Blocks may arrive in any order and are sorted into canonical
    /// (lexicographic) order. Each block must be a strictly increasing
    /// k-tuple of points in `0..v`; repeated blocks are rejected.
    pub fn new(t: usize, v: usize, k: usize, lambda: u64, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if !(1 <= t && t <= k && k <= v) {
            return Err(Error::Parameter(format!(
                "design parameters must satisfy 1 <= t <= k <= v, got t={t} k={k} v={v}"
            )));
        }
        if lambda == 0 {
            return Err(Error::Parameter("lambda must be positive".into()));
        }
        for (index, block) in blocks.iter().enumerate() {
            if block.len() != k {
                return Err(Error::Structural {
                    index,
                    reason: format!("has {} points, expected k={k}", block.len()),
                });
            }
            for window in block.windows(2) {
                if window[0] >= window[1] {
                    return Err(Error::Structural {
                        index,
                        reason: "points are not strictly increasing".into(),
                    });
                }
            }
            if let Some(&p) = block.last() {
                if p >= v {
                    return Err(Error::Structural {
                        index,
                        reason: format!("point {p} is out of range for v={v}"),
                    });
                }
            }
        }
        blocks.sort();
        if let Some(pos) = blocks.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Structural {
                index: pos + 1,
                reason: format!("repeated block {:?}", blocks[pos]),
            });
        }
        Ok(Design { t, v, k, lambda, blocks })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// Number of blocks.
    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// True if `block` (any order) occurs in this design.
    pub fn contains_block(&self, block: &[usize]) -> bool {
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        self.blocks.binary_search(&sorted).is_ok()
    }

    /// Serialize to the canonical text format:
    /// a `t v k lambda b` header line, then one block per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {} {} {}", self.t, self.v, self.k, self.lambda, self.b()).unwrap();
        for block in &self.blocks {
            writeln!(out, "{}", block.iter().join(" ")).unwrap();
        }
        out
    }

    /// Parse the text format. Lines starting with `#` are comments.
    /// Blocks are accepted in any order; duplicates are rejected.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty design file".into()))?;
        let fields: Vec<u64> = header
            .split_whitespace()
            .map(|f| {
                f.parse::<u64>()
                    .map_err(|_| Error::Format(format!("bad header field {f:?}")))
            })
            .collect::<Result<_>>()?;
        let [t, v, k, lambda, b] = fields[..] else {
            return Err(Error::Format(format!(
                "header must be `t v k lambda b`, got {} fields",
                fields.len()
            )));
        };
        let mut blocks = Vec::with_capacity(b as usize);
        for line in lines {
            let block: Vec<usize> = line
                .split_whitespace()
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|_| Error::Format(format!("bad point {f:?}")))
                })
                .collect::<Result<_>>()?;
            blocks.push(block);
        }
        if blocks.len() != b as usize {
            return Err(Error::Format(format!(
                "header declares {b} blocks, file has {}",
                blocks.len()
            )));
        }
        Design::new(t as usize, v as usize, k as usize, lambda, blocks)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        crate::util::write_atomic(path, &self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Design::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Outcome of exhaustive design verification.
#[derive(Debug, Clone)]
pub struct DesignReport {
    /// True iff every t-subset of points lies in exactly `lambda` blocks.
    pub is_valid: bool,
    /// Each t-subset whose block count differs from `lambda`, with the
    /// observed count (0 for uncovered subsets).
    pub violations: Vec<(Vec<usize>, u64)>,
    /// `lambda_s` for s = 0..=t, computed from the parameters.
    /// Empty when some value is not an integer (the design cannot be valid).
    pub lambda_profile: Vec<u64>,
    /// Arithmetic identities relating the parameters.
    pub identity_checks: IdentityChecks,
}

/// Identities every valid design satisfies.
#[derive(Debug, Clone)]
pub struct IdentityChecks {
    /// b*k == v*r
    pub replication: bool,
    /// C(v,t)*lambda == b*C(k,t)
    pub block_count: bool,
    /// r*(k-1) == lambda_2*(v-1); only defined for t >= 2.
    pub pair_replication: Option<bool>,
}

/// Count blocks through every t-subset and report deviations from lambda.
///
/// A single counting pass over blocks accumulates the C(k,t) subsets each
/// block covers; afterwards every t-subset of the point set is checked, so
/// uncovered subsets are reported too.
pub fn verify_design(candidate: &Design) -> DesignReport {
    let (t, v, k, lambda, b) = (
        candidate.t,
        candidate.v,
        candidate.k,
        candidate.lambda,
        candidate.b() as u64,
    );
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for block in &candidate.blocks {
        for subset in block.iter().copied().combinations(t) {
            *counts.entry(subset).or_insert(0) += 1;
        }
    }
    let mut violations = Vec::new();
    for subset in (0..v).combinations(t) {
        let observed = counts.get(&subset).copied().unwrap_or(0);
        if observed != lambda {
            violations.push((subset, observed));
        }
    }

    let lambda_profile: Vec<u64> = (0..=t)
        .map(|s| lambda_s_params(t, v, k, lambda, s))
        .collect::<Option<_>>()
        .unwrap_or_default();

    let r = lambda_s_params(t, v, k, lambda, 1.min(t));
    let replication = r.map(|r| b * k as u64 == v as u64 * r).unwrap_or(false);
    let block_count = binomial(v as u64, t as u64)
        .checked_mul(lambda)
        .map(|lhs| lhs == b * binomial(k as u64, t as u64))
        .unwrap_or(false);
    let pair_replication = if t >= 2 {
        Some(match (r, lambda_s_params(t, v, k, lambda, 2)) {
            (Some(r), Some(l2)) => r * (k as u64 - 1) == l2 * (v as u64 - 1),
            _ => false,
        })
    } else {
        None
    };

    DesignReport {
        is_valid: violations.is_empty(),
        violations,
        lambda_profile,
        identity_checks: IdentityChecks {
            replication,
            block_count,
            pair_replication,
        },
    }
}

/// Number of blocks through any s-subset of a valid t-(v,k,lambda) design:
/// `lambda * C(v-s, t-s) / C(k-s, t-s)`.
pub fn lambda_s(design: &Design, s: usize) -> Result<u64> {
    if s > design.t {
        return Err(Error::Parameter(format!(
            "lambda_s requires s <= t, got s={s} with t={}",
            design.t
        )));
    }
    lambda_s_params(design.t, design.v, design.k, design.lambda, s).ok_or_else(|| {
        Error::Parameter(format!(
            "lambda_{s} is not an integer for t={} v={} k={}",
            design.t, design.v, design.k
        ))
    })
}

/// Formula value of lambda_s from raw parameters; `None` if it is not
/// an integer (such parameters admit no design).
pub(crate) fn lambda_s_params(t: usize, v: usize, k: usize, lambda: u64, s: usize) -> Option<u64> {
    let num = lambda.checked_mul(binomial((v - s) as u64, (t - s) as u64))?;
    let den = binomial((k - s) as u64, (t - s) as u64);
    (num % den == 0).then(|| num / den)
}

/// Steiner triple system STS(v), a 2-(v,3,1) design.
///
/// Uses the quasigroup constructions over Z_{2n+1} (v = 6n+3) and over a
/// half-idempotent quasigroup on Z_{2n} plus a fixed point (v = 6n+1).
/// Both are deterministic and produce the canonical block order.
pub fn construct_sts(v: usize) -> Result<Design> {
    if v < 7 || (v % 6 != 1 && v % 6 != 3) {
        return Err(Error::Admissibility(format!(
            "STS(v) requires v = 1 or 3 (mod 6) and v >= 7, got v={v} (v mod 6 = {})",
            v % 6
        )));
    }
    let blocks = if v % 6 == 3 {
        sts_blocks_mod3(v)
    } else {
        sts_blocks_mod1(v)
    };
    Design::new(2, v, 3, 1, blocks)
}

/// v = 6n+3: points are Z_{2n+1} x {0,1,2}, encoded as 3i+j.
/// Triples {(i,0),(i,1),(i,2)} plus {(i,r),(j,r),((i+j)/2, r+1)} where
/// the half is taken in Z_{2n+1} (multiplication by n+1).
fn sts_blocks_mod3(v: usize) -> Vec<Vec<usize>> {
    let n = (v - 3) / 6;
    let m = 2 * n + 1;
    let point = |i: usize, j: usize| 3 * i + j;
    let mut blocks = Vec::with_capacity(v * (v - 1) / 6);
    for i in 0..m {
        blocks.push(vec![point(i, 0), point(i, 1), point(i, 2)]);
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let half = (i + j) * (n + 1) % m;
            for r in 0..3 {
                let mut block = vec![point(i, r), point(j, r), point(half, (r + 1) % 3)];
                block.sort_unstable();
                blocks.push(block);
            }
        }
    }
    blocks
}

/// v = 6n+1: points are Z_{2n} x {0,1,2} plus one extra point, encoded as
/// 3i+j and v-1. Uses the half-idempotent commutative quasigroup obtained
/// from (Z_{2n}, +) by renaming symbols so that x o x = x for x < n.
fn sts_blocks_mod1(v: usize) -> Vec<Vec<usize>> {
    let n = (v - 1) / 6;
    let m = 2 * n;
    let inf = v - 1;
    let point = |i: usize, j: usize| 3 * i + j;
    // Symbol renaming: evens 2i -> i, odds 2i+1 -> n+i. Applying it to the
    // sum table of Z_{2n} keeps the table a commutative Latin square and
    // pins x o x = x for the first n elements.
    let rename: Vec<usize> = (0..m)
        .map(|z| if z % 2 == 0 { z / 2 } else { n + (z - 1) / 2 })
        .collect();
    let q = |x: usize, y: usize| rename[(x + y) % m];

    let mut blocks = Vec::with_capacity(v * (v - 1) / 6);
    for i in 0..n {
        blocks.push(vec![point(i, 0), point(i, 1), point(i, 2)]);
    }
    for i in 0..n {
        for r in 0..3 {
            let mut block = vec![inf, point(n + i, r), point(i, (r + 1) % 3)];
            block.sort_unstable();
            blocks.push(block);
        }
    }
    for x in 0..m {
        for y in (x + 1)..m {
            for r in 0..3 {
                let mut block = vec![point(x, r), point(y, r), point(q(x, y), (r + 1) % 3)];
                block.sort_unstable();
                blocks.push(block);
            }
        }
    }
    blocks
}

/// Boolean Steiner quadruple system SQS(2^d): points are the vectors of a
/// d-dimensional binary space in lexicographic (= numeric) order, blocks
/// are the 4-subsets with zero vector sum.
pub fn construct_boolean_sqs(d: u32) -> Result<Design> {
    if d < 3 {
        return Err(Error::Parameter(format!(
            "the boolean quadruple system needs dimension d >= 3, got d={d}"
        )));
    }
    let v = 1usize << d;
    let mut blocks = Vec::new();
    for i in 0..v {
        for j in (i + 1)..v {
            for l in (j + 1)..v {
                let m = i ^ j ^ l;
                if m > l {
                    blocks.push(vec![i, j, l, m]);
                }
            }
        }
    }
    Design::new(3, v, 4, 1, blocks)
}

/// Block-type census of the boolean SQS(8), viewing points as the
/// vertices of a cube: a block is a face if some coordinate is constant
/// on it, an inscribed tetrahedron if it is one of the two parity
/// classes, and an opposite-edge plane otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCensus {
    pub faces: usize,
    pub opposite_edges: usize,
    pub tetrahedra: usize,
}

pub fn boolean_sqs8_census(design: &Design) -> Result<BlockCensus> {
    if design.v() != 8 || design.k() != 4 {
        return Err(Error::Parameter(
            "block census is defined for the 8-point quadruple system".into(),
        ));
    }
    let mut census = BlockCensus {
        faces: 0,
        opposite_edges: 0,
        tetrahedra: 0,
    };
    for block in design.blocks() {
        let is_face = (0..3).any(|bit| {
            let first = block[0] >> bit & 1;
            block.iter().all(|&p| p >> bit & 1 == first)
        });
        let parity = block[0].count_ones() % 2;
        let is_tetra = block.iter().all(|&p| p.count_ones() % 2 == parity);
        if is_face {
            census.faces += 1;
        } else if is_tetra {
            census.tetrahedra += 1;
        } else {
            census.opposite_edges += 1;
        }
    }
    Ok(census)
}

/// One-factorization of the complete graph on v points (v even): v-1
/// perfect matchings jointly covering every pair exactly once. Circle
/// method: point v-1 is fixed, the rest rotate.
pub fn one_factorization(v: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if v < 2 || v % 2 != 0 {
        return Err(Error::Parameter(format!(
            "a one-factorization needs an even number of points, got v={v}"
        )));
    }
    let m = v - 1;
    let mut factors = Vec::with_capacity(m);
    for round in 0..m {
        let mut matching = Vec::with_capacity(v / 2);
        let mut push = |a: usize, b: usize| matching.push((a.min(b), a.max(b)));
        push(round, v - 1);
        for i in 1..=(v / 2 - 1) {
            push((round + i) % m, (round + m - i) % m);
        }
        matching.sort_unstable();
        factors.push(matching);
    }
    Ok(factors)
}

/// Double an SQS(v) into an SQS(2v).
///
/// Two disjoint copies of the base system, plus crossing blocks that pair
/// edge e of factor F_i in copy 0 with every edge of F_i in copy 1,
/// where F_0..F_{v-2} is a one-factorization of the copy point set.
/// Block count: 2b + (v-1)(v/2)^2.
pub fn double_sqs(base: &Design) -> Result<Design> {
    if base.t() != 3 || base.k() != 4 || base.lambda() != 1 {
        return Err(Error::Parameter(format!(
            "doubling needs a 3-(v,4,1) system, got a {}-({},{},{}) design",
            base.t(),
            base.v(),
            base.k(),
            base.lambda()
        )));
    }
    let v = base.v();
    let factors = one_factorization(v)?;
    let mut blocks = Vec::with_capacity(2 * base.b() + (v - 1) * (v / 2) * (v / 2));
    for block in base.blocks() {
        blocks.push(block.clone());
        blocks.push(block.iter().map(|&p| p + v).collect());
    }
    for factor in &factors {
        for &(a, b) in factor {
            for &(c, d) in factor {
                blocks.push(vec![a, b, c + v, d + v]);
            }
        }
    }
    Design::new(3, 2 * v, 4, 1, blocks)
}
