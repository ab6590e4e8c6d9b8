//! Partitions of a mode set into disjoint blocks, and the refinement
//! preorder that drives multipartite monotonicity.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// A disjoint cover of the mode set `{0, .., N-1}`.
///
/// Blocks are kept in canonical form (each block sorted, blocks ordered by
/// smallest element) so that equality is syntactic and display output is
/// deterministic. The text syntax is 1-based: `"1|23"` splits mode 1 from
/// modes 2 and 3; blocks with modes above 9 use comma lists (`"1|10,11"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n_modes: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from blocks of zero-based mode indices. The
    /// blocks must be nonempty, pairwise disjoint, and cover `0..n` for
    /// `n` the total number of modes.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("partition has no blocks".into()));
        }
        let mut seen = BTreeSet::new();
        let mut total = 0usize;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("partition block is empty".into()));
            }
            for &m in block {
                if !seen.insert(m) {
                    return Err(Error::InvalidArgument(format!(
                        "mode {} appears in more than one block",
                        m + 1
                    )));
                }
            }
            total += block.len();
        }
        let n_modes = total;
        if seen.iter().next_back() != Some(&(n_modes - 1)) || seen.len() != n_modes {
            return Err(Error::InvalidArgument(
                "blocks must cover modes 1..N with no gaps".into(),
            ));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { n_modes, blocks })
    }

    /// The finest partition `1|2|...|N`.
    pub fn finest(n_modes: usize) -> Self {
        Self {
            n_modes,
            blocks: (0..n_modes).map(|m| vec![m]).collect(),
        }
    }

    /// The single-block (coarsest) partition.
    pub fn coarsest(n_modes: usize) -> Self {
        Self {
            n_modes,
            blocks: vec![(0..n_modes).collect()],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_finest(&self) -> bool {
        self.blocks.len() == self.n_modes
    }

    /// `true` iff `self` refines `other`: every block of `other` is a
    /// union of blocks of `self`. Reflexive and transitive; the finest
    /// partition refines every partition of the same mode set.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: other.n_modes,
            });
        }
        let mut block_of = vec![0usize; self.n_modes];
        for (bi, block) in other.blocks.iter().enumerate() {
            for &m in block {
                block_of[m] = bi;
            }
        }
        Ok(self
            .blocks
            .iter()
            .all(|block| block.iter().all(|&m| block_of[m] == block_of[block[0]])))
    }

    /// Every partition of `n` modes, canonically ordered. Intended for
    /// small `n` (the count is the Bell number).
    pub fn all(n_modes: usize) -> Vec<Partition> {
        fn rec(next: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Partition>) {
            if next == n {
                out.push(Partition::new(blocks.clone()).expect("enumeration is valid"));
                return;
            }
            for i in 0..blocks.len() {
                blocks[i].push(next);
                rec(next + 1, n, blocks, out);
                blocks[i].pop();
            }
            blocks.push(vec![next]);
            rec(next + 1, n, blocks, out);
            blocks.pop();
        }
        let mut out = Vec::new();
        if n_modes > 0 {
            rec(0, n_modes, &mut Vec::new(), &mut out);
        }
        out
    }

    /// Parses the 1-based text syntax: blocks separated by `|`; a block is
    /// either a digit string (`"23"` = modes 2 and 3) or a comma list
    /// (`"10,11"`). The modes must cover `1..=N` for `N` the largest mode.
    pub fn parse(text: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in text.split('|') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "empty block in partition {text:?}"
                )));
            }
            let mut block = Vec::new();
            if part.contains(',') {
                for tok in part.split(',') {
                    let tok = tok.trim();
                    let m: usize = tok.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad mode index {tok:?} in {text:?}"))
                    })?;
                    if m == 0 {
                        return Err(Error::InvalidArgument(
                            "mode indices are 1-based; 0 is not a mode".into(),
                        ));
                    }
                    block.push(m - 1);
                }
            } else {
                for ch in part.chars() {
                    let d = ch.to_digit(10).ok_or_else(|| {
                        Error::InvalidArgument(format!("bad character {ch:?} in {text:?}"))
                    })?;
                    if d == 0 {
                        return Err(Error::InvalidArgument(
                            "mode indices are 1-based; 0 is not a mode".into(),
                        ));
                    }
                    block.push(d as usize - 1);
                }
            }
            blocks.push(block);
        }
        Self::new(blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits_ok = self.n_modes <= 9;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            if digits_ok {
                for &m in block {
                    write!(f, "{}", m + 1)?;
                }
            } else {
                for (j, &m) in block.iter().enumerate() {
                    if j > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", m + 1)?;
                }
            }
        }
        Ok(())
    }
}
