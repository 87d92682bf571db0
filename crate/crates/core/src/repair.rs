//! Single-node repair from any d = k+1 helpers, each sending exactly
//! ell/2 symbols.
//!
//! The parity rows are folded along the failed node's group digit: role 0
//! keeps the rows with that digit 0, role 1 the rows with digit 1, and
//! role 2 sums row pairs. Folding turns the failed node into two virtual
//! diagonal columns and every other node into a single folded column, an
//! (n+1)-column code over ell/2 rows from which the two virtual columns
//! plus the unaccessed survivors are decoded as erasures.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::codec::Codeword;
use crate::construct::{column_l, CodeParams, ParityBlocks};
use crate::error::{CodeError, Result};
use crate::linalg::Matrix;

/// What each helper transmits: `ell/2` functionals, each the sum of the
/// listed coordinates of the helper's vector (one coordinate for roles 0
/// and 1, a pair for role 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    pub failed: usize,
    pub group: usize,
    pub role: usize,
    pub requests: Vec<Vec<usize>>,
}

impl RepairPlan {
    /// Applies the plan to one helper's vector.
    pub fn extract(&self, params: &CodeParams, symbols: &[u64]) -> Vec<u64> {
        let f = &params.field;
        self.requests
            .iter()
            .map(|req| req.iter().fold(0u64, |acc, &b| f.add(acc, symbols[b])))
            .collect()
    }
}

/// Sparse blocks of one reduced column: `(block_row, column) -> length-r
/// field column`, mirroring the layout of `ParityBlocks`.
pub type ReducedBlocks = BTreeMap<(usize, usize), Vec<u64>>;

/// One column of the reduced system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnLabel {
    /// A surviving node, by its original index.
    Survivor(usize),
    /// The first virtual half of the failed node.
    Tilde,
    /// The second virtual half of the failed node.
    Hat,
}

/// The folded `(n+1)`-column block parity structure over `ell/2` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSystem {
    pub half: usize,
    pub r: usize,
    pub columns: Vec<(ColumnLabel, ReducedBlocks)>,
}

impl ReducedSystem {
    pub fn column(&self, label: &ColumnLabel) -> &ReducedBlocks {
        &self
            .columns
            .iter()
            .find(|(l, _)| l == label)
            .expect("column label present")
            .1
    }
}

/// Result of a repair: the recovered vector and the bandwidth spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairTranscript {
    pub failed: usize,
    pub helpers: BTreeSet<usize>,
    pub symbols_downloaded: usize,
    pub recovered: Vec<u64>,
}

/// Inserts `bit` as digit `pos` of `a`, shifting higher digits up.
fn insert_bit(a: usize, pos: usize, bit: usize) -> usize {
    let low = a & ((1 << pos) - 1);
    let high = (a >> pos) << (pos + 1);
    high | (bit << pos) | low
}

/// Deterministic download plan for a failed node.
pub fn plan_repair(params: &CodeParams, failed: usize) -> Result<RepairPlan> {
    if failed >= params.n {
        return Err(CodeError::InvalidParams(format!(
            "failed index {failed} out of range for n={}",
            params.n
        )));
    }
    let group = failed / 3;
    let role = failed % 3;
    let requests = (0..params.ell / 2)
        .map(|a| match role {
            0 => vec![insert_bit(a, group, 0)],
            1 => vec![insert_bit(a, group, 1)],
            _ => vec![insert_bit(a, group, 0), insert_bit(a, group, 1)],
        })
        .collect();
    Ok(RepairPlan {
        failed,
        group,
        role,
        requests,
    })
}

/// Builds the folded parity structure for a failed node.
pub fn build_reduced_system(
    params: &CodeParams,
    _blocks: &ParityBlocks,
    failed: usize,
) -> Result<ReducedSystem> {
    if failed >= params.n {
        return Err(CodeError::InvalidParams(format!(
            "failed index {failed} out of range for n={}",
            params.n
        )));
    }
    let f = &params.field;
    let (r, half) = (params.r, params.ell / 2);
    let g = failed / 3;
    let role = failed % 3;
    let col = |idx: usize| column_l(f, params.lambdas[idx], r);
    let neg_col = |idx: usize| -> Vec<u64> { col(idx).iter().map(|&v| f.neg(v)).collect() };
    let diagonal = |c: Vec<u64>| -> ReducedBlocks {
        (0..half).map(|a| ((a, a), c.clone())).collect()
    };

    let mut columns: Vec<(ColumnLabel, ReducedBlocks)> = Vec::new();

    // the two virtual columns and the two same-group survivors are all
    // diagonal; the constants depend on the within-group role
    let (tilde, hat) = match role {
        0 => (col(6 * g), neg_col(6 * g + 1)),
        1 => (neg_col(6 * g + 2), col(6 * g + 3)),
        _ => (col(6 * g + 4), col(6 * g + 5)),
    };
    columns.push((ColumnLabel::Tilde, diagonal(tilde)));
    columns.push((ColumnLabel::Hat, diagonal(hat)));
    for t in 0..3 {
        if t == role {
            continue;
        }
        let constant = match (role, t) {
            (0, 1) => col(6 * g + 2),
            (0, 2) => col(6 * g + 4),
            (1, 0) => col(6 * g + 1),
            (1, 2) => col(6 * g + 5),
            (2, 0) => col(6 * g),
            (2, 1) => col(6 * g + 3),
            _ => unreachable!(),
        };
        columns.push((ColumnLabel::Survivor(3 * g + t), diagonal(constant)));
    }

    // other groups keep the construction shape, with the group digit
    // re-indexed to skip the failed group's position
    let sub_cols = |x: &[u64], y: &[u64]| -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| f.sub(a, b)).collect()
    };
    for s in 0..params.groups() {
        if s == g {
            continue;
        }
        let pos = if s < g { s } else { s - 1 };
        let bit = 1usize << pos;
        for t in 0..3 {
            let mut blocks = BTreeMap::new();
            for a in 0..half {
                let ai = (a >> pos) & 1;
                match t {
                    0 => {
                        blocks.insert((a, a), col(6 * s + ai));
                        if ai == 0 {
                            blocks
                                .insert((a, a | bit), sub_cols(&col(6 * s), &col(6 * s + 1)));
                        }
                    }
                    1 => {
                        blocks.insert((a, a), col(6 * s + 2 + ai));
                        if ai == 1 {
                            blocks.insert(
                                (a, a & !bit),
                                sub_cols(&col(6 * s + 3), &col(6 * s + 2)),
                            );
                        }
                    }
                    _ => {
                        blocks.insert((a, a), col(6 * s + 4 + ai));
                    }
                }
            }
            columns.push((ColumnLabel::Survivor(3 * s + t), blocks));
        }
    }
    Ok(ReducedSystem { half, r, columns })
}

/// A prepared repair for a fixed (failed, helpers) pair: the folded
/// system matrix is inverted once and applied to any number of stripes.
#[derive(Debug, Clone)]
pub struct RepairContext {
    failed: usize,
    helpers: BTreeSet<usize>,
    half: usize,
    r: usize,
    group: usize,
    role: usize,
    inv: Matrix,
    /// Reduced blocks of each helper, in the iteration order of `helpers`.
    helper_columns: Vec<ReducedBlocks>,
    tilde_pos: usize,
    hat_pos: usize,
}

/// Validates helpers and inverts the folded system for a failed node.
pub fn prepare_repair(
    params: &CodeParams,
    blocks: &ParityBlocks,
    failed: usize,
    helpers: &BTreeSet<usize>,
) -> Result<RepairContext> {
    if helpers.len() != params.d {
        return Err(CodeError::WrongHelperCount {
            want: params.d,
            got: helpers.len(),
        });
    }
    if helpers.contains(&failed) {
        return Err(CodeError::PlanMismatch(
            "failed node cannot be its own helper".into(),
        ));
    }
    if helpers.iter().any(|&h| h >= params.n) {
        return Err(CodeError::PlanMismatch("helper index out of range".into()));
    }
    let half = params.ell / 2;
    let r = params.r;
    let system = build_reduced_system(params, blocks, failed)?;

    // unknown columns: the virtual pair plus every unaccessed survivor
    let unknown: Vec<&ColumnLabel> = system
        .columns
        .iter()
        .map(|(l, _)| l)
        .filter(|l| match l {
            ColumnLabel::Survivor(node) => !helpers.contains(node),
            _ => true,
        })
        .collect();
    debug_assert_eq!(unknown.len(), r);

    let mut a = Matrix::zeros(half * r, r * half);
    let mut helper_columns = vec![BTreeMap::new(); helpers.len()];
    for (label, col_blocks) in &system.columns {
        match label {
            ColumnLabel::Survivor(node) if helpers.contains(node) => {
                let pos = helpers.iter().position(|h| h == node).unwrap();
                helper_columns[pos] = col_blocks.clone();
            }
            _ => {
                let pos = unknown.iter().position(|l| *l == label).unwrap();
                for (&(row, b), col) in col_blocks {
                    for (t, &v) in col.iter().enumerate() {
                        a[(row * r + t, pos * half + b)] = v;
                    }
                }
            }
        }
    }
    let inv = a.invert(&params.field)?;
    let tilde_pos = unknown.iter().position(|l| **l == ColumnLabel::Tilde).unwrap();
    let hat_pos = unknown.iter().position(|l| **l == ColumnLabel::Hat).unwrap();
    Ok(RepairContext {
        failed,
        helpers: helpers.clone(),
        half,
        r,
        group: failed / 3,
        role: failed % 3,
        inv,
        helper_columns,
        tilde_pos,
        hat_pos,
    })
}

impl RepairContext {
    /// Recovers the failed node from one stripe of helper transmissions,
    /// given per helper (in `helpers` iteration order) the `ell/2`
    /// symbols produced by [`RepairPlan::extract`].
    pub fn run(&self, params: &CodeParams, helper_data: &[Vec<u64>]) -> Result<RepairTranscript> {
        let (half, r) = (self.half, self.r);
        if helper_data.len() != self.helpers.len()
            || helper_data.iter().any(|v| v.len() != half)
        {
            return Err(CodeError::PlanMismatch(format!(
                "expected {} vectors of {} symbols",
                self.helpers.len(),
                half
            )));
        }
        let f = &params.field;
        let mut rhs = vec![0u64; half * r];
        for (col_blocks, data) in self.helper_columns.iter().zip(helper_data) {
            for (&(row, b), col) in col_blocks {
                let sym = data[b];
                if sym == 0 {
                    continue;
                }
                for (t, &v) in col.iter().enumerate() {
                    let idx = row * r + t;
                    rhs[idx] = f.sub(rhs[idx], f.mul(v, sym));
                }
            }
        }
        let x = self.inv.mul_vec(&rhs, f)?;
        let tilde = &x[self.tilde_pos * half..(self.tilde_pos + 1) * half];
        let hat = &x[self.hat_pos * half..(self.hat_pos + 1) * half];

        // unfold the virtual pair back into the failed node's coordinates
        let mut recovered = vec![0u64; 2 * half];
        for a in 0..half {
            let lo = insert_bit(a, self.group, 0);
            let hi = insert_bit(a, self.group, 1);
            match self.role {
                0 => {
                    recovered[lo] = f.sub(tilde[a], hat[a]);
                    recovered[hi] = hat[a];
                }
                1 => {
                    recovered[lo] = tilde[a];
                    recovered[hi] = f.sub(hat[a], tilde[a]);
                }
                _ => {
                    recovered[lo] = tilde[a];
                    recovered[hi] = hat[a];
                }
            }
        }
        Ok(RepairTranscript {
            failed: self.failed,
            helpers: self.helpers.clone(),
            symbols_downloaded: self.helpers.len() * half,
            recovered,
        })
    }
}

/// Repairs a failed node from `d = k+1` helper transmissions.
///
/// `helper_data` holds, per helper in the iteration order of `helpers`,
/// the `ell/2` symbols produced by [`RepairPlan::extract`]. One-shot
/// wrapper around [`prepare_repair`] and [`RepairContext::run`].
pub fn repair_node(
    params: &CodeParams,
    blocks: &ParityBlocks,
    failed: usize,
    helpers: &BTreeSet<usize>,
    helper_data: &[Vec<u64>],
) -> Result<RepairTranscript> {
    prepare_repair(params, blocks, failed, helpers)?.run(params, helper_data)
}

/// Convenience wrapper: plans the repair, extracts each helper's share
/// from the codeword, and runs [`repair_node`].
pub fn repair_from_codeword(
    params: &CodeParams,
    blocks: &ParityBlocks,
    cw: &Codeword,
    failed: usize,
    helpers: &BTreeSet<usize>,
) -> Result<RepairTranscript> {
    let plan = plan_repair(params, failed)?;
    let helper_data: Vec<Vec<u64>> = helpers
        .iter()
        .map(|&h| plan.extract(params, &cw.nodes[h]))
        .collect();
    repair_node(params, blocks, failed, helpers, &helper_data)
}
