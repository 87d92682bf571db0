//! Numeric verification oracles: erasure-type enumeration, the block
//! matrix M of a canonical pattern, the polynomial filter F with its
//! compressed matrix Q, and exhaustive decode/repair sweeps.
//!
//! These check invertibility claims numerically over the working field
//! instead of symbolically, which is exact and cheap at the instance
//! sizes this library targets.

use std::collections::BTreeSet;

use crate::codec::{
    canonical_pattern, decode_erasures_generic, decode_erasures_structured, encode, type_weighted_sum,
    Codeword,
};
use crate::construct::{build_parity_blocks, submatrix_a, CodeParams};
use crate::error::{CodeError, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::repair::repair_from_codeword;

/// Largest n accepted by the exhaustive sweeps.
pub const SWEEP_MAX_N: usize = 12;

/// A 7-component erasure type vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVector {
    pub z: [usize; 7],
}

impl TypeVector {
    pub fn weighted_sum(&self) -> usize {
        type_weighted_sum(&self.z)
    }

    /// Number of groups touched.
    pub fn z_total(&self) -> usize {
        self.z.iter().sum()
    }

    /// All type vectors with weighted sum `r` that fit in `groups` groups.
    pub fn enumerate(r: usize, groups: usize) -> Vec<TypeVector> {
        let mut out = Vec::new();
        let weights = [3usize, 2, 2, 2, 1, 1, 1];
        let mut z = [0usize; 7];
        fn rec(
            pos: usize,
            left: usize,
            weights: &[usize; 7],
            z: &mut [usize; 7],
            groups: usize,
            out: &mut Vec<TypeVector>,
        ) {
            if pos == 7 {
                if left == 0 && z.iter().sum::<usize>() <= groups {
                    out.push(TypeVector { z: *z });
                }
                return;
            }
            for c in 0..=left / weights[pos] {
                z[pos] = c;
                rec(pos + 1, left - c * weights[pos], weights, z, groups, out);
            }
            z[pos] = 0;
        }
        rec(0, r, &weights, &mut z, groups, &mut out);
        out
    }
}

/// The Case-1 filter polynomials: per `a`, the quadratic factors
/// `g_{a,i}` and their product `f_a` of degree `2*z1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterPolys {
    pub z1: usize,
    /// Per `a`: (factors `g_{a,i}` as coefficient vectors, `f_a` coefficients).
    pub polys: Vec<(Vec<Vec<u64>>, Vec<u64>)>,
}

/// Coefficients (ascending degree) of the monic polynomial with the
/// given roots.
pub fn poly_from_roots(f: &Field, roots: &[u64]) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for &root in roots {
        // multiply by (x - root)
        let mut next = vec![0u64; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(root, c));
        }
        coeffs = next;
    }
    coeffs
}

pub fn poly_eval(f: &Field, coeffs: &[u64], x: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| f.add(f.mul(acc, x), c))
}

fn poly_mul(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// Builds the Case-1 polynomials; requires `r = 3*z1`.
pub fn build_filter_polys(params: &CodeParams, z1: usize) -> Result<FilterPolys> {
    if params.r != 3 * z1 || z1 == 0 || z1 > params.groups() {
        return Err(CodeError::Case1Only { r: params.r, z1 });
    }
    let f = &params.field;
    let l = |j: usize| params.lambdas[j];
    let polys = (0..1usize << z1)
        .map(|a| {
            let factors: Vec<Vec<u64>> = (0..z1)
                .map(|i| {
                    if (a >> i) & 1 == 0 {
                        poly_from_roots(f, &[l(6 * i), l(6 * i + 4)])
                    } else {
                        poly_from_roots(f, &[l(6 * i + 3), l(6 * i + 5)])
                    }
                })
                .collect();
            let fa = factors
                .iter()
                .fold(vec![1u64], |acc, g| poly_mul(f, &acc, g));
            (factors, fa)
        })
        .collect();
    Ok(FilterPolys { z1, polys })
}

/// The shifted-coefficient window matrix of a polynomial: `rows` copies
/// of the coefficient vector, row `t` starting at column `t`, total
/// width `rows + deg`.
pub fn window_matrix(coeffs: &[u64], rows: usize) -> Matrix {
    let width = rows + coeffs.len() - 1;
    let mut m = Matrix::zeros(rows, width);
    for t in 0..rows {
        for (j, &c) in coeffs.iter().enumerate() {
            m[(t, t + j)] = c;
        }
    }
    m
}

/// The square block matrix of a canonical erasure pattern: for each
/// erased node (ascending), its top-left `2^z`-block submatrix.
#[allow(non_snake_case)]
pub fn build_M(params: &CodeParams, ty: &TypeVector) -> Result<Matrix> {
    if ty.weighted_sum() != params.r {
        return Err(CodeError::InvalidParams(format!(
            "type vector weighs {}, expected r = {}",
            ty.weighted_sum(),
            params.r
        )));
    }
    if ty.z_total() > params.groups() {
        return Err(CodeError::InvalidParams(format!(
            "type vector touches {} groups, instance has {}",
            ty.z_total(),
            params.groups()
        )));
    }
    let width = 1usize << ty.z_total();
    let blocks = build_parity_blocks(params);
    let pattern = canonical_pattern(&ty.z);
    let r = params.r;
    let mut m = Matrix::zeros(width * r, width * pattern.len());
    for (pos, &node) in pattern.iter().enumerate() {
        let sub = submatrix_a(params, &blocks, node, width);
        for row in 0..width * r {
            for b in 0..width {
                m[(row, pos * width + b)] = sub[(row, b)];
            }
        }
    }
    Ok(m)
}

/// The Case-1 filter: block diagonal in the `z1 x r` windows of `f_a`.
#[allow(non_snake_case)]
pub fn build_filter_F(params: &CodeParams, z1: usize) -> Result<Matrix> {
    let polys = build_filter_polys(params, z1)?;
    let r = params.r;
    let mut f = Matrix::zeros((1 << z1) * z1, (1 << z1) * r);
    for (a, (_, fa)) in polys.polys.iter().enumerate() {
        let w = window_matrix(fa, z1);
        for t in 0..z1 {
            for c in 0..r {
                f[(a * z1 + t, a * r + c)] = w[(t, c)];
            }
        }
    }
    Ok(f)
}

/// The nonzero columns of `F * M`, in left-to-right order: a square
/// matrix of side `2^z1 * z1`.
#[allow(non_snake_case)]
pub fn build_Q(params: &CodeParams, z1: usize) -> Result<Matrix> {
    let f_mat = build_filter_F(params, z1)?;
    let ty = TypeVector {
        z: [z1, 0, 0, 0, 0, 0, 0],
    };
    let m = build_M(params, &ty)?;
    let fm = f_mat.mul(&m, &params.field)?;
    let nonzero: Vec<usize> = (0..fm.cols())
        .filter(|&c| (0..fm.rows()).any(|r| fm[(r, c)] != 0))
        .collect();
    let side = (1usize << z1) * z1;
    if nonzero.len() != side {
        return Err(CodeError::InvalidParams(format!(
            "expected {side} nonzero columns, found {}",
            nonzero.len()
        )));
    }
    let mut q = Matrix::zeros(side, side);
    for (qc, &c) in nonzero.iter().enumerate() {
        for r in 0..side {
            q[(r, qc)] = fm[(r, c)];
        }
    }
    Ok(q)
}

/// One record of a sweep report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRecord {
    pub kind: &'static str,
    pub pattern: String,
    pub pass: bool,
    pub bandwidth: Option<usize>,
}

impl std::fmt::Display for SweepRecord {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let result = if self.pass { "pass" } else { "fail" };
        match self.bandwidth {
            Some(bw) => write!(out, "{} {} {} {}", self.kind, self.pattern, result, bw),
            None => write!(out, "{} {} {} -", self.kind, self.pattern, result),
        }
    }
}

/// A line-oriented sweep report: one record per exercised case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
}

impl SweepReport {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass).count()
    }

    pub fn total(&self) -> usize {
        self.records.len()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.total()
    }
}

impl std::fmt::Display for SweepReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for rec in &self.records {
            writeln!(out, "{rec}")?;
        }
        Ok(())
    }
}

fn combinations(pool: &[usize], pick: usize) -> Vec<Vec<usize>> {
    if pick == 0 {
        return vec![Vec::new()];
    }
    if pool.len() < pick {
        return Vec::new();
    }
    let mut out = combinations(&pool[1..], pick - 1)
        .into_iter()
        .map(|mut rest| {
            rest.insert(0, pool[0]);
            rest
        })
        .collect::<Vec<_>>();
    out.extend(combinations(&pool[1..], pick));
    out
}

fn join(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Deterministic nonzero test codeword for sweeps.
fn sweep_codeword(params: &CodeParams) -> Result<Codeword> {
    let blocks = build_parity_blocks(params);
    let data: Vec<Vec<u64>> = (0..params.k)
        .map(|i| {
            (0..params.ell)
                .map(|a| params.field.elem((i as u64 * 131 + a as u64 * 17 + 7) * 3))
                .collect()
        })
        .collect();
    encode(params, &blocks, &data)
}

fn guard(params: &CodeParams) -> Result<()> {
    if params.n > SWEEP_MAX_N {
        return Err(CodeError::InstanceTooLarge(params.n, SWEEP_MAX_N));
    }
    Ok(())
}

/// Decodes every erasure pattern of `r` nodes with both decode paths.
pub fn sweep_mds(params: &CodeParams) -> Result<SweepReport> {
    guard(params)?;
    let blocks = build_parity_blocks(params);
    let cw = sweep_codeword(params)?;
    let all: Vec<usize> = (0..params.n).collect();
    let mut records = Vec::new();
    for pattern in combinations(&all, params.r) {
        let erased: BTreeSet<usize> = pattern.iter().copied().collect();
        let mut damaged = cw.clone();
        for &e in &erased {
            damaged.nodes[e] = vec![0; params.ell];
        }
        let structured = decode_erasures_structured(params, &blocks, &damaged, &erased);
        let generic = decode_erasures_generic(params, &blocks, &damaged, &erased);
        let pass = structured.as_ref() == Ok(&cw) && generic.as_ref() == Ok(&cw);
        records.push(SweepRecord {
            kind: "mds",
            pattern: join(&pattern),
            pass,
            bandwidth: None,
        });
    }
    Ok(SweepReport { records })
}

/// Repairs every node from every helper set of size `d`.
pub fn sweep_repair(params: &CodeParams) -> Result<SweepReport> {
    guard(params)?;
    let blocks = build_parity_blocks(params);
    let cw = sweep_codeword(params)?;
    let mut records = Vec::new();
    for failed in 0..params.n {
        let pool: Vec<usize> = (0..params.n).filter(|&i| i != failed).collect();
        for helpers in combinations(&pool, params.d) {
            let set: BTreeSet<usize> = helpers.iter().copied().collect();
            let result = repair_from_codeword(params, &blocks, &cw, failed, &set);
            let (pass, bw) = match result {
                Ok(t) => (
                    t.recovered == cw.nodes[failed]
                        && t.symbols_downloaded == params.d * params.ell / 2,
                    t.symbols_downloaded,
                ),
                Err(_) => (false, 0),
            };
            records.push(SweepRecord {
                kind: "repair",
                pattern: format!("{failed}<-{}", join(&helpers)),
                pass,
                bandwidth: Some(bw),
            });
        }
    }
    Ok(SweepReport { records })
}
