//! Code instance construction: constant selection, Vandermonde columns,
//! and the sparse parity blocks that define the array code.
//!
//! An `(n, k)` instance stores `ell = 2^(n/3)` symbols per node and is
//! parameterized by `2n` distinct field constants `lambda_0..lambda_{2n-1}`,
//! six per group of three nodes. The per-group constraint is that the two
//! derived ratios `gamma_{6i+1}` and `gamma_{6i+2}` differ.

use std::collections::BTreeMap;

use crate::error::{CodeError, Result};
use crate::field::Field;
use crate::linalg::Matrix;

/// Parameters of one code instance; the single source of truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub d: usize,
    pub ell: usize,
    pub field: Field,
    pub lambdas: Vec<u64>,
}

impl CodeParams {
    /// Builds an instance with deterministically selected constants.
    pub fn new(n: usize, k: usize, field: Field) -> Result<Self> {
        let lambdas = select_lambdas(n, &field)?;
        Self::with_lambdas(n, k, field, lambdas)
    }

    /// Builds an instance from explicit constants (e.g. read back from a
    /// manifest), revalidating every invariant.
    pub fn with_lambdas(n: usize, k: usize, field: Field, lambdas: Vec<u64>) -> Result<Self> {
        if n < 3 || !n.is_multiple_of(3) {
            return Err(CodeError::InvalidParams(format!(
                "n={n} must be a positive multiple of 3 (non-multiples are obtained by puncturing a larger instance, which this library does not implement)"
            )));
        }
        if k < 1 || k > n - 2 {
            return Err(CodeError::InvalidParams(format!(
                "k={k} must satisfy 1 <= k <= n-2 = {}",
                n - 2
            )));
        }
        if lambdas.len() != 2 * n {
            return Err(CodeError::InvalidParams(format!(
                "expected {} lambdas, got {}",
                2 * n,
                lambdas.len()
            )));
        }
        let mut seen = lambdas.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != lambdas.len() || lambdas.iter().any(|&l| l >= field.modulus()) {
            return Err(CodeError::InvalidParams(
                "lambdas must be distinct canonical field elements".into(),
            ));
        }
        let params = CodeParams {
            n,
            k,
            r: n - k,
            d: k + 1,
            ell: 1 << (n / 3),
            field,
            lambdas,
        };
        for i in 0..n / 3 {
            if params.gamma(i, 1)? == params.gamma(i, 2)? {
                return Err(CodeError::InvalidParams(format!(
                    "gamma constraint violated in group {i}"
                )));
            }
        }
        Ok(params)
    }

    pub fn groups(&self) -> usize {
        self.n / 3
    }

    /// The ratio `gamma_{6i+which}` for group `i`, `which` in {1, 2}.
    pub fn gamma(&self, group: usize, which: usize) -> Result<u64> {
        assert!(which == 1 || which == 2);
        let f = &self.field;
        let l = |j: usize| self.lambdas[6 * group + j];
        let x = l(which);
        let num = f.mul(f.sub(x, l(3)), f.sub(x, l(5)));
        let den = f.mul(f.sub(x, l(0)), f.sub(x, l(4)));
        Ok(f.neg(f.div(num, den)?))
    }
}

/// Deterministically selects `2n` distinct constants satisfying the
/// per-group gamma constraint, consuming candidates `0, 1, 2, ...` in
/// ascending order, seven per group.
pub fn select_lambdas(n: usize, field: &Field) -> Result<Vec<u64>> {
    if n < 3 || !n.is_multiple_of(3) {
        return Err(CodeError::InvalidParams(format!(
            "n={n} must be a positive multiple of 3"
        )));
    }
    let p = field.modulus();
    let min = 2 * n as u64 + 1;
    if p < min {
        return Err(CodeError::FieldTooSmall { p, n, min });
    }
    let f = field;
    let mut lambdas: Vec<u64> = Vec::with_capacity(2 * n);
    let mut cursor = 0u64;
    for _group in 0..n / 3 {
        // seven fresh candidates, ascending, skipping already-chosen values;
        // the one of eta[5]/eta[6] left unused stays available to later groups
        let mut eta = Vec::with_capacity(7);
        while eta.len() < 7 {
            if !lambdas.contains(&cursor) {
                eta.push(cursor);
            }
            cursor += 1;
        }
        let l0 = eta[0];
        let l1 = eta[1];
        let l2 = eta[2];
        let l3 = eta[3];
        let l4 = eta[4];
        // xi = ((l2-l0)(l2-l4)(l1-l3)) / ((l1-l0)(l1-l4)(l2-l3))
        let num = f.mul(f.mul(f.sub(l2, l0), f.sub(l2, l4)), f.sub(l1, l3));
        let den = f.mul(f.mul(f.sub(l1, l0), f.sub(l1, l4)), f.sub(l2, l3));
        let xi = f.div(num, den)?;
        // the forbidden value is the root of xi*(l1 - x) = l2 - x,
        // i.e. x = (l2 - xi*l1) / (1 - xi); no root when xi = 1
        let forbidden = if xi == 1 {
            None
        } else {
            Some(f.div(f.sub(l2, f.mul(xi, l1)), f.sub(1, xi))?)
        };
        let (l5, unused) = if Some(eta[5]) != forbidden {
            (eta[5], eta[6])
        } else {
            (eta[6], eta[5])
        };
        lambdas.extend_from_slice(&[l0, l1, l2, l3, l4, l5]);
        cursor = unused;
    }
    Ok(lambdas)
}

/// The column `(1, lambda, lambda^2, ..., lambda^{r-1})`.
pub fn column_l(field: &Field, lambda: u64, r: usize) -> Vec<u64> {
    let mut col = Vec::with_capacity(r);
    let mut acc = 1u64;
    for _ in 0..r {
        col.push(acc);
        acc = field.mul(acc, lambda);
    }
    col
}

/// Sparse parity blocks: per node, a map from `(block_row, column)` to a
/// length-r field column. Only nonzero blocks are stored; every block row
/// of every node holds at most two of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityBlocks {
    pub nodes: Vec<BTreeMap<(usize, usize), Vec<u64>>>,
}

impl ParityBlocks {
    pub fn block(&self, node: usize, a: usize, b: usize) -> Option<&Vec<u64>> {
        self.nodes[node].get(&(a, b))
    }
}

/// Builds the full sparse block structure for an instance.
///
/// For group `i` (digit position `i` of the coordinate index):
/// node `3i` is upper-bidiagonal in digit `i` with `L_{6i}`, `L_{6i+1}`
/// and off-diagonal `L_{6i} - L_{6i+1}`; node `3i+1` mirrors it one row
/// down with `L_{6i+2}`, `L_{6i+3}`; node `3i+2` is plain diagonal with
/// `L_{6i+4}`, `L_{6i+5}`.
pub fn build_parity_blocks(params: &CodeParams) -> ParityBlocks {
    let f = &params.field;
    let (r, ell) = (params.r, params.ell);
    let col = |idx: usize| column_l(f, params.lambdas[idx], r);
    let sub_cols = |x: &[u64], y: &[u64]| -> Vec<u64> {
        x.iter().zip(y).map(|(&a, &b)| f.sub(a, b)).collect()
    };
    let mut nodes = Vec::with_capacity(params.n);
    for node in 0..params.n {
        let group = node / 3;
        let role = node % 3;
        let bit = 1usize << group;
        let mut blocks = BTreeMap::new();
        for a in 0..ell {
            let ai = (a >> group) & 1;
            match role {
                0 => {
                    blocks.insert((a, a), col(6 * group + ai));
                    if ai == 0 {
                        blocks.insert((a, a | bit), sub_cols(&col(6 * group), &col(6 * group + 1)));
                    }
                }
                1 => {
                    blocks.insert((a, a), col(6 * group + 2 + ai));
                    if ai == 1 {
                        blocks.insert(
                            (a, a & !bit),
                            sub_cols(&col(6 * group + 3), &col(6 * group + 2)),
                        );
                    }
                }
                _ => {
                    blocks.insert((a, a), col(6 * group + 4 + ai));
                }
            }
        }
        nodes.push(blocks);
    }
    ParityBlocks { nodes }
}

/// Dense rendering of the top-left `u*r x u` submatrix of node `i`'s blocks.
pub fn submatrix_a(params: &CodeParams, blocks: &ParityBlocks, node: usize, u: usize) -> Matrix {
    assert!(u >= 1 && u <= params.ell);
    let r = params.r;
    let mut m = Matrix::zeros(u * r, u);
    for (&(a, b), col) in &blocks.nodes[node] {
        if a < u && b < u {
            for (t, &v) in col.iter().enumerate() {
                m[(a * r + t, b)] = v;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf7() -> Field {
        Field::new(7).unwrap()
    }

    #[test]
    fn lambdas_n3_p7() {
        let l = select_lambdas(3, &gf7()).unwrap();
        assert_eq!(l, vec![0, 1, 2, 3, 4, 5]);
        let params = CodeParams::with_lambdas(3, 1, gf7(), l).unwrap();
        assert_eq!(params.gamma(0, 1).unwrap(), 5);
        assert_eq!(params.gamma(0, 2).unwrap(), 6);
    }

    #[test]
    fn field_too_small() {
        let f = Field::new(5).unwrap();
        assert_eq!(
            select_lambdas(3, &f),
            Err(CodeError::FieldTooSmall { p: 5, n: 3, min: 7 })
        );
    }

    #[test]
    fn rejects_bad_n_k() {
        let f = Field::new(257).unwrap();
        assert!(CodeParams::new(10, 5, f).is_err());
        assert!(CodeParams::new(9, 8, f).is_err());
        assert!(CodeParams::new(9, 0, f).is_err());
    }

    #[test]
    fn column_l_examples() {
        let f = Field::new(19).unwrap();
        assert_eq!(column_l(&f, 0, 4), vec![1, 0, 0, 0]);
        assert_eq!(column_l(&f, 1, 3), vec![1, 1, 1]);
        assert_eq!(column_l(&f, 2, 4), vec![1, 2, 4, 8]);
    }

    #[test]
    fn single_group_node2_diagonal() {
        let params = CodeParams::new(3, 1, gf7()).unwrap();
        let blocks = build_parity_blocks(&params);
        let r = params.r;
        let l4 = column_l(&params.field, params.lambdas[4], r);
        let l5 = column_l(&params.field, params.lambdas[5], r);
        assert_eq!(blocks.nodes[2].len(), 2);
        assert_eq!(blocks.block(2, 0, 0), Some(&l4));
        assert_eq!(blocks.block(2, 1, 1), Some(&l5));
    }

    #[test]
    fn n9_block_counts() {
        let f = Field::new(257).unwrap();
        let params = CodeParams::new(9, 5, f).unwrap();
        let blocks = build_parity_blocks(&params);
        let ell = params.ell;
        for node in 0..9 {
            let expect = if node % 3 == 2 { ell } else { ell + ell / 2 };
            assert_eq!(blocks.nodes[node].len(), expect, "node {node}");
            // each block row holds at most two nonzero blocks
            for a in 0..ell {
                let per_row = blocks.nodes[node].keys().filter(|&&(x, _)| x == a).count();
                assert!(per_row <= 2);
            }
        }
    }

    #[test]
    fn block_locality() {
        let f = Field::new(257).unwrap();
        let params = CodeParams::new(9, 5, f).unwrap();
        let blocks = build_parity_blocks(&params);
        for node in 0..9 {
            let group = node / 3;
            for &(a, b) in blocks.nodes[node].keys() {
                assert_eq!(a & !(1 << group), b & !(1 << group));
            }
        }
    }

    #[test]
    fn submatrix_top_left() {
        let f = Field::new(257).unwrap();
        let params = CodeParams::new(9, 5, f).unwrap();
        let blocks = build_parity_blocks(&params);
        let r = params.r;
        // node 8 with u=1: single diagonal block L_16
        let m = submatrix_a(&params, &blocks, 8, 1);
        let l16 = column_l(&params.field, params.lambdas[16], r);
        for t in 0..r {
            assert_eq!(m[(t, 0)], l16[t]);
        }
        // node 0 with u=2: [[L0, L0-L1], [0, L1]]
        let m = submatrix_a(&params, &blocks, 0, 2);
        let l0 = column_l(&params.field, params.lambdas[0], r);
        let l1 = column_l(&params.field, params.lambdas[1], r);
        for t in 0..r {
            assert_eq!(m[(t, 0)], l0[t]);
            assert_eq!(m[(t, 1)], params.field.sub(l0[t], l1[t]));
            assert_eq!(m[(r + t, 0)], 0);
            assert_eq!(m[(r + t, 1)], l1[t]);
        }
    }

    #[test]
    fn lambda_sweep_determinism_and_validity() {
        for n in (3..=30).step_by(3) {
            let p = crate::field::smallest_prime_at_least(2 * n as u64 + 1);
            let f = Field::new(p).unwrap();
            let l1 = select_lambdas(n, &f).unwrap();
            let l2 = select_lambdas(n, &f).unwrap();
            assert_eq!(l1, l2);
            // with_lambdas revalidates distinctness and the gamma constraint
            CodeParams::with_lambdas(n, 1, f, l1).unwrap();
        }
    }
}
