//! Variable dependency graph, node partitioning and the internal/external
//! split of right-hand-side terms.
//!
//! A partition is scored by
//!
//! ```text
//! score = F - lambda * P + even_bonus * E
//! ```
//!
//! where `F` is the fraction of the total weight that stays inside blocks,
//! `P = sum |B|(|B|-1) / (n(n-1))` is the fraction of ordered variable pairs
//! that share a block, and `E` is the fraction of blocks that have even size
//! and are connected through off-diagonal weight. Merging only pays when it
//! captures enough weight to offset the growth of `P`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::odedsl::{InputKind, OdeSystem};
use crate::poly::{Monomial, Polynomial};
use crate::Rational;

/// Weighted incidence between equations and the variables they mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepGraph {
    n: usize,
    /// `weights[i][j]`: number of distinct terms of equation `i` that
    /// involve variable `j`, inputs counted through their dependencies.
    weights: Vec<Vec<u32>>,
}

impl DepGraph {
    pub fn from_weights(weights: Vec<Vec<u32>>) -> Self {
        let n = weights.len();
        assert!(weights.iter().all(|r| r.len() == n), "square weight matrix");
        DepGraph { n, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.weights[i][j]
    }

    pub fn weights(&self) -> &[Vec<u32>] {
        &self.weights
    }

    pub fn incidence(&self) -> Vec<Vec<bool>> {
        self.weights.iter().map(|r| r.iter().map(|&w| w > 0).collect()).collect()
    }

    /// `0`/`1` grid, one row per equation.
    pub fn incidence_text(&self) -> String {
        let mut out = String::new();
        for row in &self.weights {
            let cells: Vec<&str> = row.iter().map(|&w| if w > 0 { "1" } else { "0" }).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Graph with rows and columns permuted: vertex `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> DepGraph {
        let mut w = vec![vec![0; self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                w[perm[i]][perm[j]] = self.weights[i][j];
            }
        }
        DepGraph { n: self.n, weights: w }
    }

    /// Weight between distinct variables; self-dependence is internal to
    /// every partition and is left out of the score.
    fn total(&self) -> u64 {
        let n = self.n;
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| self.weights[i][j] as u64).sum()
    }
}

/// Incidence of `sys` with inputs expanded to their dependency sets.
pub fn build_dependency(sys: &OdeSystem) -> DepGraph {
    let n = sys.dim();
    let mut w = vec![vec![0u32; n]; n];
    for (i, p) in sys.rhs.iter().enumerate() {
        for m in p.monomials() {
            for j in sys.expanded_support(m) {
                w[i][j] += 1;
            }
        }
    }
    DepGraph { n, weights: w }
}

/// Blocks of variable indices, each ascending, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonicalizes the given blocks. Panics on overlap or on an empty block.
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        assert!(blocks.iter().all(|b| !b.is_empty()), "empty block");
        blocks.sort();
        let mut seen = BTreeSet::new();
        for b in &blocks {
            for &v in b {
                assert!(seen.insert(v), "blocks overlap");
            }
        }
        Partition { blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    /// Block labels per vertex, relabelled in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            blocks[l].push(v);
        }
        Partition::new(blocks.into_iter().filter(|b| !b.is_empty()).collect())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of covered vertices.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Block index per vertex.
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![usize::MAX; self.size()];
        for (k, b) in self.blocks.iter().enumerate() {
            for &v in b {
                l[v] = k;
            }
        }
        l
    }

    pub fn block_of(&self, v: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&v).is_ok())
    }

    pub fn relabel(&self, perm: &[usize]) -> Partition {
        Partition::new(self.blocks.iter().map(|b| b.iter().map(|&v| perm[v]).collect()).collect())
    }
}

/// Knobs of the partition score.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionConfig {
    pub max_block: usize,
    pub lambda: Rational,
    pub even_bonus: Rational,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            max_block: 6,
            lambda: Rational::new(BigInt::from(2), BigInt::from(3)),
            even_bonus: Rational::new(BigInt::one(), BigInt::from(8)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("exhaustive search supports at most {max} variables, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("max_block must be at least 1")]
    BadMaxBlock,
}

/// Largest graph accepted by [`exhaustive_partition`].
pub const EXHAUSTIVE_LIMIT: usize = 10;

fn cohesive(g: &DepGraph, block: &[usize]) -> bool {
    if block.len() <= 1 {
        return true;
    }
    let mut seen = vec![false; block.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for (b, s) in seen.iter_mut().enumerate() {
            if !*s && g.weights[block[a]][block[b]] + g.weights[block[b]][block[a]] > 0 {
                *s = true;
                stack.push(b);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Exact score of `p` on `g`.
pub fn score(g: &DepGraph, p: &Partition, cfg: &PartitionConfig) -> Rational {
    score_blocks(g, p.blocks(), cfg)
}

fn score_blocks(g: &DepGraph, blocks: &[Vec<usize>], cfg: &PartitionConfig) -> Rational {
    let n = g.n;
    let total = g.total();
    let mut internal = 0u64;
    for b in blocks {
        for &i in b {
            for &j in b.iter().filter(|&&j| j != i) {
                internal += g.weights[i][j] as u64;
            }
        }
    }
    let mut s = if total == 0 { Rational::zero() } else { Rational::new(internal.into(), total.into()) };
    if n > 1 {
        let pairs: u64 = blocks.iter().map(|b| (b.len() * (b.len() - 1)) as u64).sum();
        s -= &cfg.lambda * Rational::new(pairs.into(), ((n * (n - 1)) as u64).into());
    }
    if !blocks.is_empty() {
        let even = blocks.iter().filter(|b| b.len() % 2 == 0 && cohesive(g, b)).count();
        s += &cfg.even_bonus * Rational::new(even.into(), blocks.len().into());
    }
    s
}

fn canonical(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    blocks.retain(|b| !b.is_empty());
    for b in blocks.iter_mut() {
        b.sort_unstable();
    }
    blocks.sort();
    blocks
}

/// Largest graph that [`partition`] solves exactly.
pub const EXACT_LIMIT: usize = 10;

/// Score-maximizing partition.
///
/// Graphs with at most [`EXACT_LIMIT`] variables are solved exactly by
/// dynamic programming over subsets; larger ones use
/// [`greedy_partition`]. Ties go to the smallest canonical block list.
pub fn partition(g: &DepGraph, cfg: &PartitionConfig) -> Result<Partition, PartitionError> {
    if cfg.max_block == 0 {
        return Err(PartitionError::BadMaxBlock);
    }
    if g.n <= EXACT_LIMIT {
        if let Some(p) = exact_partition(g, cfg) {
            return Ok(p);
        }
    }
    greedy_partition(g, cfg)
}

/// Greedy agglomeration followed by local refinement.
///
/// Merges are taken best-first while they strictly improve the score, ties
/// going to the merge whose block has the smallest minimum index. The result
/// is then refined by single-vertex moves, swaps, merges and two-way splits
/// until no such step improves the score.
pub fn greedy_partition(g: &DepGraph, cfg: &PartitionConfig) -> Result<Partition, PartitionError> {
    if cfg.max_block == 0 {
        return Err(PartitionError::BadMaxBlock);
    }
    let n = g.n;
    let mut blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut current = score_blocks(g, &blocks, cfg);
    loop {
        let mut best: Option<(Rational, usize, Vec<Vec<usize>>)> = None;
        for a in 0..blocks.len() {
            for b in a + 1..blocks.len() {
                if blocks[a].len() + blocks[b].len() > cfg.max_block {
                    continue;
                }
                let mut cand = blocks.clone();
                let moved = cand.remove(b);
                cand[a].extend(moved);
                let cand = canonical(cand);
                let s = score_blocks(g, &cand, cfg);
                let key_min = blocks[a][0].min(blocks[b][0]);
                let better = match &best {
                    None => s > current,
                    Some((bs, bm, _)) => s > *bs || (s == *bs && key_min < *bm),
                };
                if better {
                    best = Some((s, key_min, cand));
                }
            }
        }
        match best {
            Some((s, _, cand)) => {
                current = s;
                blocks = cand;
            }
            None => break,
        }
    }
    while let Some((s, cand)) = refine_step(g, &blocks, &current, cfg) {
        current = s;
        blocks = cand;
    }
    Ok(Partition { blocks })
}

/// Best strictly improving neighbour, ties broken by the canonical order of
/// the resulting partition.
fn refine_step(
    g: &DepGraph,
    blocks: &[Vec<usize>],
    current: &Rational,
    cfg: &PartitionConfig,
) -> Option<(Rational, Vec<Vec<usize>>)> {
    let mut best: Option<(Rational, Vec<Vec<usize>>)> = None;
    let consider = |cand: Vec<Vec<usize>>, best: &mut Option<(Rational, Vec<Vec<usize>>)>| {
        if cand.iter().any(|b| b.len() > cfg.max_block) {
            return;
        }
        let cand = canonical(cand);
        let s = score_blocks(g, &cand, cfg);
        if s <= *current {
            return;
        }
        let better = match best {
            None => true,
            Some((bs, bc)) => s > *bs || (s == *bs && cand < *bc),
        };
        if better {
            *best = Some((s, cand));
        }
    };
    let k = blocks.len();
    // Move one vertex to another block or to a new singleton.
    for a in 0..k {
        for (pos, &v) in blocks[a].iter().enumerate() {
            for b in 0..=k {
                if b == a || (b == k && blocks[a].len() == 1) {
                    continue;
                }
                let mut cand = blocks.to_vec();
                cand[a].remove(pos);
                if b == k {
                    cand.push(vec![v]);
                } else {
                    cand[b].push(v);
                }
                consider(cand, &mut best);
            }
        }
    }
    // Swap two vertices between blocks.
    for a in 0..k {
        for b in a + 1..k {
            for pa in 0..blocks[a].len() {
                for pb in 0..blocks[b].len() {
                    let mut cand = blocks.to_vec();
                    let t = cand[a][pa];
                    cand[a][pa] = cand[b][pb];
                    cand[b][pb] = t;
                    consider(cand, &mut best);
                }
            }
        }
    }
    // Merge two blocks.
    for a in 0..k {
        for b in a + 1..k {
            let mut cand = blocks.to_vec();
            let moved = cand.remove(b);
            cand[a].extend(moved);
            consider(cand, &mut best);
        }
    }
    // Split a block in two.
    for a in 0..k {
        let len = blocks[a].len();
        if len < 2 || len > 12 {
            continue;
        }
        // Masks with the first member fixed on the left side.
        for mask in 0u32..(1 << (len - 1)) {
            let mut left = vec![blocks[a][0]];
            let mut right = Vec::new();
            for (t, &v) in blocks[a][1..].iter().enumerate() {
                if mask & (1 << t) != 0 {
                    left.push(v);
                } else {
                    right.push(v);
                }
            }
            if right.is_empty() {
                continue;
            }
            let mut cand = blocks.to_vec();
            cand[a] = left;
            cand.push(right);
            consider(cand, &mut best);
        }
    }
    best
}

/// Subset dynamic programming. For a fixed block count `k` the score is a
/// sum of per-block values, so each `k` is optimized separately in scaled
/// integer arithmetic. `None` if the knobs do not fit the integer range.
fn exact_partition(g: &DepGraph, cfg: &PartitionConfig) -> Option<Partition> {
    let n = g.n;
    if n == 0 {
        return Some(Partition { blocks: Vec::new() });
    }
    let to_i = |r: &BigInt| i128::try_from(r).ok();
    let (ln, ld) = (to_i(cfg.lambda.numer())?, to_i(cfg.lambda.denom())?);
    let (bn, bd) = (to_i(cfg.even_bonus.numer())?, to_i(cfg.even_bonus.denom())?);
    let w = (g.total() as i128).max(1);
    let pairs_all = ((n * (n - 1)) as i128).max(1);
    let full = (1usize << n) - 1;
    let mut internal = vec![0i128; full + 1];
    let mut pairs = vec![0i128; full + 1];
    let mut good = vec![0i128; full + 1];
    let mut size = vec![0usize; full + 1];
    for mask in 1..=full {
        let members: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        size[mask] = members.len();
        if members.len() > cfg.max_block {
            continue;
        }
        internal[mask] =
            members.iter().map(|&i| members.iter().filter(|&&j| j != i).map(|&j| g.weights[i][j] as i128).sum::<i128>()).sum();
        pairs[mask] = (members.len() * (members.len() - 1)) as i128;
        good[mask] = (members.len() % 2 == 0 && cohesive(g, &members)) as i128;
    }
    let lists = |mask: usize| -> Vec<usize> { (0..n).filter(|v| mask & (1 << v) != 0).collect() };
    let mut best_overall: Option<(Rational, Vec<Vec<usize>>)> = None;
    for k in 1..=n {
        let kk = k as i128;
        let value = |b: usize| -> i128 {
            internal[b] * pairs_all * kk * ld * bd - ln * pairs[b] * w * kk * bd + bn * good[b] * w * pairs_all * ld
        };
        // best[j][S]: best sum over partitions of S into exactly j blocks.
        let mut best: Vec<Vec<Option<i128>>> = vec![vec![None; full + 1]; k + 1];
        best[0][0] = Some(0);
        for j in 1..=k {
            for s in 1..=full {
                let low = s & s.wrapping_neg();
                let rest = s ^ low;
                let mut sub = rest;
                let mut top: Option<i128> = None;
                loop {
                    let b = sub | low;
                    if size[b] <= cfg.max_block {
                        if let Some(r) = best[j - 1][s ^ b] {
                            let v = value(b) + r;
                            if top.is_none_or(|t| v > t) {
                                top = Some(v);
                            }
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
                best[j][s] = top;
            }
        }
        let Some(_) = best[k][full] else { continue };
        // Reconstruct the smallest canonical block list achieving the optimum.
        let mut blocks = Vec::new();
        let mut s = full;
        for j in (1..=k).rev() {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            let target = best[j][s].unwrap();
            let mut chosen: Option<Vec<usize>> = None;
            let mut sub = rest;
            loop {
                let b = sub | low;
                if size[b] <= cfg.max_block {
                    if let Some(r) = best[j - 1][s ^ b] {
                        if value(b) + r == target {
                            let l = lists(b);
                            if chosen.as_ref().is_none_or(|c| l < *c) {
                                chosen = Some(l);
                            }
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            let c = chosen.unwrap();
            for &v in &c {
                s ^= 1 << v;
            }
            blocks.push(c);
        }
        let sc = score_blocks(g, &blocks, cfg);
        let better = match &best_overall {
            None => true,
            Some((bs, bb)) => sc > *bs || (sc == *bs && blocks < *bb),
        };
        if better {
            best_overall = Some((sc, blocks));
        }
    }
    best_overall.map(|(_, blocks)| Partition { blocks })
}

/// Score-maximal partition over all set partitions with blocks of at most
/// `max_block` elements. Ties go to the smallest canonical block list.
pub fn exhaustive_partition(g: &DepGraph, cfg: &PartitionConfig) -> Result<Partition, PartitionError> {
    if cfg.max_block == 0 {
        return Err(PartitionError::BadMaxBlock);
    }
    let n = g.n;
    if n > EXHAUSTIVE_LIMIT {
        return Err(PartitionError::TooLarge { n, max: EXHAUSTIVE_LIMIT });
    }
    if n == 0 {
        return Ok(Partition { blocks: Vec::new() });
    }
    let mut best: Option<(Rational, Vec<Vec<usize>>)> = None;
    let mut labels = vec![0usize; n];
    let mut sizes = vec![0usize; n];
    sizes[0] = 1;
    rgs(1, 1, &mut labels, &mut sizes, &mut |labels| {
        let k = labels.iter().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            blocks[l].push(v);
        }
        let blocks = canonical(blocks);
        let s = score_blocks(g, &blocks, cfg);
        let better = match &best {
            None => true,
            Some((bs, bb)) => s > *bs || (s == *bs && blocks < *bb),
        };
        if better {
            best = Some((s, blocks));
        }
    }, cfg.max_block);
    Ok(Partition { blocks: best.unwrap().1 })
}

/// Restricted growth strings with block-size limit.
fn rgs(
    pos: usize,
    used: usize,
    labels: &mut Vec<usize>,
    sizes: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
    max_block: usize,
) {
    if pos == labels.len() {
        visit(labels);
        return;
    }
    for l in 0..=used.min(labels.len() - 1) {
        if sizes[l] >= max_block {
            continue;
        }
        labels[pos] = l;
        sizes[l] += 1;
        rgs(pos + 1, used.max(l + 1), labels, sizes, visit, max_block);
        sizes[l] -= 1;
    }
}

/// Terms of one block's equations, by whether they stay inside the block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTerms {
    pub internal: Vec<(usize, Polynomial)>,
    pub external: Vec<(usize, Polynomial)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermSplit {
    pub blocks: Vec<BlockTerms>,
}

/// Whether the term `m` of an equation in `block` is internal to it.
/// Declared inputs are external regardless of their dependencies.
pub fn is_internal(sys: &OdeSystem, block: &[usize], m: &Monomial) -> bool {
    let n = sys.dim();
    if m.support().any(|i| i >= n && sys.inputs[i - n].kind == InputKind::Declared) {
        return false;
    }
    sys.expanded_support(m).iter().all(|v| block.binary_search(v).is_ok())
}

/// Splits every equation's terms into those internal to its block and the
/// rest.
pub fn split_terms(sys: &OdeSystem, p: &Partition) -> TermSplit {
    let blocks = p
        .blocks()
        .iter()
        .map(|b| {
            let mut internal = Vec::new();
            let mut external = Vec::new();
            for &eq in b {
                for t in sys.rhs.get(eq).split() {
                    let m = t.monomials().next().unwrap().clone();
                    if is_internal(sys, b, &m) {
                        internal.push((eq, t));
                    } else {
                        external.push((eq, t));
                    }
                }
            }
            BlockTerms { internal, external }
        })
        .collect();
    TermSplit { blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odedsl::{parse, resolve_dot_references, DotMode};

    pub(crate) const FLUID: &str = "params a, b, c, d, k, l, m;
vars x1, x2, x3, x4;
dot x1 = x2;
dot x2 = -b/a*x2 - c/a*x1 + d/a*x3;
dot x3 = x4;
dot x4 = -k*(x3^2 - 1)*x4 - l*x3 + m*dot(x2);
";

    fn fluid() -> OdeSystem {
        resolve_dot_references(&parse(FLUID).unwrap(), DotMode::Aux).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn fluid_incidence() {
        let g = build_dependency(&fluid());
        assert_eq!(g.incidence_text(), "0 1 0 0\n1 1 1 0\n0 0 0 1\n1 1 1 1\n");
        assert_eq!(g.weights()[3], vec![1, 1, 3, 2]);
    }

    #[test]
    fn small_incidences() {
        let osc = parse("params a; vars x1,x2; dot x1 = x2; dot x2 = -x1 - a*x2;").unwrap();
        assert_eq!(build_dependency(&osc).incidence(), vec![vec![false, true], vec![true, true]]);
        let dec = parse("vars x1, x2; dot x1 = x1; dot x2 = x2;").unwrap();
        assert_eq!(build_dependency(&dec).incidence_text(), "1 0\n0 1\n");
    }

    #[test]
    fn fluid_scores_by_hand() {
        let g = build_dependency(&fluid());
        let cfg = PartitionConfig::default();
        // off-diagonal weight 6 of 9 inside, pair fraction 4/12, both blocks
        // even and connected
        let two = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(score(&g, &two, &cfg), q(2, 3) - q(2, 3) * q(1, 3) + q(1, 8));
        let one = Partition::new(vec![vec![0, 1, 2, 3]]);
        assert_eq!(score(&g, &one, &cfg), q(1, 1) - q(2, 3) + q(1, 8));
    }

    #[test]
    fn fluid_partition() {
        let g = build_dependency(&fluid());
        let want = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        for max_block in [2, 6] {
            let cfg = PartitionConfig { max_block, ..Default::default() };
            assert_eq!(partition(&g, &cfg).unwrap(), want);
            assert_eq!(exhaustive_partition(&g, &cfg).unwrap(), want);
        }
    }

    #[test]
    fn oracle_examples() {
        let cfg3 = PartitionConfig { max_block: 3, ..Default::default() };
        let k3 = DepGraph::from_weights(vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(exhaustive_partition(&k3, &cfg3).unwrap(), Partition::new(vec![vec![0, 1, 2]]));
        let empty = DepGraph::from_weights(vec![vec![0; 4]; 4]);
        assert_eq!(exhaustive_partition(&empty, &cfg3).unwrap(), Partition::singletons(4));
        assert_eq!(partition(&empty, &cfg3).unwrap(), Partition::singletons(4));
        let pairs = DepGraph::from_weights(vec![
            vec![1, 1, 0, 0],
            vec![1, 1, 0, 0],
            vec![0, 0, 1, 1],
            vec![0, 0, 1, 1],
        ]);
        let cfg = PartitionConfig::default();
        let want = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(partition(&pairs, &cfg).unwrap(), want);
        assert_eq!(exhaustive_partition(&pairs, &cfg).unwrap(), want);
        let single = DepGraph::from_weights(vec![vec![1]]);
        assert_eq!(partition(&single, &cfg).unwrap(), Partition::singletons(1));
        let big = DepGraph::from_weights(vec![vec![0; 11]; 11]);
        assert!(matches!(exhaustive_partition(&big, &cfg), Err(PartitionError::TooLarge { .. })));
    }

    #[test]
    fn split_fluid() {
        let sys = fluid();
        let p = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        let s = split_terms(&sys, &p);
        let names = sys.ambient_names();
        let show = |ts: &[(usize, Polynomial)]| -> Vec<(usize, String)> {
            ts.iter()
                .map(|(e, t)| (*e, crate::render::polynomial(t, crate::render::Symbols::new(&names, &sys.parameters))))
                .collect()
        };
        assert_eq!(show(&s.blocks[0].external), vec![(1, "d/a*x3".into())]);
        assert_eq!(show(&s.blocks[1].external), vec![(3, "u".into())]);
        assert_eq!(
            show(&s.blocks[1].internal),
            vec![(2, "x4".into()), (3, "k*x4".into()), (3, "-l*x3".into()), (3, "-k*x3^2*x4".into())]
        );
        let all = split_terms(&sys, &Partition::new(vec![vec![0, 1, 2, 3]]));
        assert!(all.blocks[0].external.is_empty());
    }
}
