//! Encoding and whole-node erasure recovery.
//!
//! Two independent routes are provided for each direction:
//!
//! * rowwise: every array row is a codeword of the systematic `[n, k]` code
//!   `(I_k | Ã)`, so parities are `x·Ã` and a row with erasures is a small
//!   linear system over `Ã`;
//! * block: parities are `f = d·A` with `A = Ã ⊗ D`, and recovery solves
//!   `d_F = (f_S − d_S·A_S)·A_F⁻¹` where `A_S = [A_ij]_{i,j∈S}` and
//!   `A_F = [A_ij]_{i∈F, j∈S}`.
//!
//! Vectors follow node-major order: `d[0][0], …, d[m−1][0], d[0][1], …`,
//! and likewise for parities.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{ArrayLayout, Cell, CodeParams, GeneratorA};
use crate::field::{FieldError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{failed} nodes failed but the code tolerates only {r}")]
    TooManyErasures { failed: usize, r: usize },
    #[error("erasure pattern {0:?} is not recoverable with this code")]
    Unrecoverable(Vec<usize>),
    #[error("cell ({row}, {col}) is missing from a surviving column")]
    MissingSymbol { row: usize, col: usize },
    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The `m × n` data symbols of one collection epoch, `d[i][j]` being
/// symbol `i` of node `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataBlock {
    params: CodeParams,
    /// Node-major: index `i + j·m`.
    values: Vec<u32>,
}

/// JSON form of a [`DataBlock`]. `params` is optional on input and checked
/// against the code when present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<CodeParams>,
    pub d: Vec<Vec<u32>>,
}

impl DataBlock {
    pub fn zeros(params: CodeParams) -> Self {
        DataBlock { params, values: vec![0; params.n() * params.m()] }
    }

    /// Wraps node-major values; every value must be a residue mod `q`.
    pub fn from_linear(params: CodeParams, values: Vec<u32>) -> Result<Self, CodecError> {
        if values.len() != params.n() * params.m() {
            return Err(CodecError::DimensionMismatch(format!(
                "expected {} data symbols, got {}",
                params.n() * params.m(),
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= params.q()) {
            return Err(FieldError::OutOfRange { value: v as u64, q: params.q() }.into());
        }
        Ok(DataBlock { params, values })
    }

    /// From an `m × n` grid (`grid[i][j] = d[i][j]`).
    pub fn from_grid(params: CodeParams, grid: &[Vec<u32>]) -> Result<Self, CodecError> {
        let (m, n) = (params.m(), params.n());
        if grid.len() != m || grid.iter().any(|row| row.len() != n) {
            return Err(CodecError::DimensionMismatch(format!("data grid must be {m}x{n}")));
        }
        let mut values = vec![0; n * m];
        for (i, row) in grid.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                values[i + j * m] = v;
            }
        }
        DataBlock::from_linear(params, values)
    }

    pub fn random<R: Rng + ?Sized>(params: CodeParams, rng: &mut R) -> Self {
        let q = params.q();
        let values = (0..params.n() * params.m()).map(|_| rng.gen_range(0..q)).collect();
        DataBlock { params, values }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.values[i + j * self.params.m()]
    }

    pub fn linear(&self) -> &[u32] {
        &self.values
    }

    /// Node `j`'s `m` symbols.
    pub fn node(&self, j: usize) -> &[u32] {
        let m = self.params.m();
        &self.values[j * m..(j + 1) * m]
    }

    pub fn to_grid(&self) -> DataGrid {
        let (m, n) = (self.params.m(), self.params.n());
        DataGrid { params: Some(self.params), d: (0..m).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect() }
    }

    /// Cellwise sum, used to check linearity.
    pub fn add(&self, other: &DataBlock) -> Result<DataBlock, CodecError> {
        ensure_params(&self.params, &other.params)?;
        let f = self.params.field();
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(DataBlock { params: self.params, values })
    }
}

/// The `(m+p) × n` stored array; `None` marks an erased cell.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawCodeword")]
pub struct CodewordArray {
    params: CodeParams,
    cells: Vec<Option<u32>>,
}

#[derive(Deserialize)]
struct RawCodeword {
    params: CodeParams,
    cells: Vec<Vec<Option<u32>>>,
}

impl TryFrom<RawCodeword> for CodewordArray {
    type Error = CodecError;

    fn try_from(raw: RawCodeword) -> Result<Self, Self::Error> {
        let (h, n) = (raw.params.height(), raw.params.n());
        if raw.cells.len() != h || raw.cells.iter().any(|row| row.len() != n) {
            return Err(CodecError::DimensionMismatch(format!("codeword cells must be {h}x{n}")));
        }
        let q = raw.params.q();
        let cells: Vec<Option<u32>> = raw.cells.into_iter().flatten().collect();
        if let Some(v) = cells.iter().flatten().find(|&&v| v >= q) {
            return Err(FieldError::OutOfRange { value: *v as u64, q }.into());
        }
        Ok(CodewordArray { params: raw.params, cells })
    }
}

impl CodewordArray {
    fn blank(params: CodeParams) -> Self {
        CodewordArray { params, cells: vec![Some(0); params.height() * params.n()] }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u32> {
        self.cells[row * self.params.n() + col]
    }

    fn set(&mut self, row: usize, col: usize, v: u32) {
        let n = self.params.n();
        self.cells[row * n + col] = Some(v);
    }

    /// Rows of the array in row-major order.
    pub fn rows(&self) -> Vec<Vec<Option<u32>>> {
        self.cells.chunks(self.params.n()).map(<[_]>::to_vec).collect()
    }

    /// Node `j`'s stored column, or `None` if any cell of it is erased.
    pub fn column(&self, j: usize) -> Option<Vec<u32>> {
        (0..self.params.height()).map(|row| self.get(row, j)).collect()
    }

    /// Builds an array from per-node columns; `None` marks an unavailable node.
    pub fn from_columns(params: CodeParams, columns: &[Option<Vec<u32>>]) -> Result<Self, CodecError> {
        let (h, n) = (params.height(), params.n());
        if columns.len() != n {
            return Err(CodecError::DimensionMismatch(format!("expected {n} columns, got {}", columns.len())));
        }
        let mut out = CodewordArray { params, cells: vec![None; h * n] };
        for (j, col) in columns.iter().enumerate() {
            let Some(col) = col else { continue };
            if col.len() != h {
                return Err(CodecError::DimensionMismatch(format!("column {j} has {} cells, expected {h}", col.len())));
            }
            for (row, &v) in col.iter().enumerate() {
                if v >= params.q() {
                    return Err(FieldError::OutOfRange { value: v as u64, q: params.q() }.into());
                }
                out.set(row, j, v);
            }
        }
        Ok(out)
    }

    /// Copy with every column in `pattern.failed()` erased.
    pub fn erase(&self, pattern: &ErasurePattern) -> CodewordArray {
        let mut out = self.clone();
        let n = self.params.n();
        for &j in pattern.failed() {
            for row in 0..self.params.height() {
                out.cells[row * n + j] = None;
            }
        }
        out
    }

    /// Columns containing at least one erased cell.
    pub fn erased_columns(&self) -> Vec<usize> {
        (0..self.params.n()).filter(|&j| self.column(j).is_none()).collect()
    }

    /// Cellwise sum of two complete arrays.
    pub fn add(&self, other: &CodewordArray) -> Result<CodewordArray, CodecError> {
        ensure_params(&self.params, &other.params)?;
        let f = self.params.field();
        let cells =
            self.cells.iter().zip(&other.cells).map(|(a, b)| Some(f.add(a.unwrap_or(0), b.unwrap_or(0)))).collect();
        Ok(CodewordArray { params: self.params, cells })
    }
}

impl Serialize for CodewordArray {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            params: &'a CodeParams,
            cells: Vec<Vec<Option<u32>>>,
        }
        Out { params: &self.params, cells: self.rows() }.serialize(s)
    }
}

/// Failed nodes `F` and survivors `S`, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErasurePattern {
    failed: Vec<usize>,
    surviving: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, failed: impl IntoIterator<Item = usize>) -> Result<Self, CodecError> {
        let mut mask = vec![false; n];
        for index in failed {
            if index >= n {
                return Err(CodecError::NodeOutOfRange { index, n });
            }
            mask[index] = true;
        }
        let failed = (0..n).filter(|&j| mask[j]).collect();
        let surviving = (0..n).filter(|&j| !mask[j]).collect();
        Ok(ErasurePattern { failed, surviving })
    }

    pub fn none(n: usize) -> Self {
        ErasurePattern { failed: Vec::new(), surviving: (0..n).collect() }
    }

    pub fn failed(&self) -> &[usize] {
        &self.failed
    }

    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    pub fn n(&self) -> usize {
        self.failed.len() + self.surviving.len()
    }
}

fn ensure_params(a: &CodeParams, b: &CodeParams) -> Result<(), CodecError> {
    if a != b {
        return Err(CodecError::DimensionMismatch(format!("parameters differ: {a:?} vs {b:?}")));
    }
    Ok(())
}

/// Rowwise encoding: each array row's `r` parities are its `k` data symbols
/// times `Ã`.
pub fn encode(gen: &GeneratorA, layout: &ArrayLayout, data: &DataBlock) -> Result<CodewordArray, CodecError> {
    let params = *gen.params();
    ensure_params(&params, layout.params())?;
    ensure_params(&params, data.params())?;
    let (m, p) = (params.m(), params.p());
    let mut out = CodewordArray::blank(params);
    for row in 0..params.height() {
        let x: Vec<u32> = layout.row_data(row).iter().map(|&l| data.values[l]).collect();
        let parities = gen.a_tilde().left_mul_vec(&x)?;
        for (&l, &v) in layout.row_data(row).iter().zip(&x) {
            out.set(row, l / m, v);
        }
        for (&t, v) in layout.row_parity(row).iter().zip(parities) {
            out.set(row, t / p, v);
        }
    }
    Ok(out)
}

/// Generator-path encoding `f = d·A`, placing each symbol by the layout.
pub fn encode_with_generator(
    gen: &GeneratorA,
    layout: &ArrayLayout,
    data: &DataBlock,
) -> Result<CodewordArray, CodecError> {
    let params = *gen.params();
    ensure_params(&params, layout.params())?;
    ensure_params(&params, data.params())?;
    let (n, m, p) = (params.n(), params.m(), params.p());
    let f = gen.a_full().left_mul_vec(&data.values)?;
    let mut out = CodewordArray::blank(params);
    for j in 0..n {
        for i in 0..m {
            let (row, col) = layout.data_cell(i, j);
            out.set(row, col, data.get(i, j));
        }
        for i in 0..p {
            let (row, col) = layout.parity_cell(i, j);
            out.set(row, col, f[i + j * p]);
        }
    }
    Ok(out)
}

fn check_inputs(
    params: &CodeParams,
    layout: &ArrayLayout,
    partial: &CodewordArray,
    pattern: &ErasurePattern,
) -> Result<(), CodecError> {
    ensure_params(params, layout.params())?;
    ensure_params(params, partial.params())?;
    if pattern.n() != params.n() {
        return Err(CodecError::DimensionMismatch(format!(
            "pattern covers {} nodes, code has {}",
            pattern.n(),
            params.n()
        )));
    }
    if pattern.failed().len() > params.r() {
        return Err(CodecError::TooManyErasures { failed: pattern.failed().len(), r: params.r() });
    }
    for &j in pattern.surviving() {
        for row in 0..params.height() {
            if partial.get(row, j).is_none() {
                return Err(CodecError::MissingSymbol { row, col: j });
            }
        }
    }
    Ok(())
}

/// Recovers all data by solving the block system over the surviving columns.
pub fn decode(
    gen: &GeneratorA,
    layout: &ArrayLayout,
    partial: &CodewordArray,
    pattern: &ErasurePattern,
) -> Result<DataBlock, CodecError> {
    let params = *gen.params();
    check_inputs(&params, layout, partial, pattern)?;
    let (m, p) = (params.m(), params.p());
    let field = params.field();
    let read = |cell: (usize, usize)| partial.get(cell.0, cell.1).expect("surviving cell present");

    let mut values = vec![0; params.n() * m];
    for &j in pattern.surviving() {
        for i in 0..m {
            values[i + j * m] = read(layout.data_cell(i, j));
        }
    }
    if pattern.failed().is_empty() {
        return Ok(DataBlock { params, values });
    }

    let s_rows: Vec<usize> = pattern.surviving().iter().flat_map(|&j| gen.node_rows(j)).collect();
    let f_rows: Vec<usize> = pattern.failed().iter().flat_map(|&j| gen.node_rows(j)).collect();
    let s_cols: Vec<usize> = pattern.surviving().iter().flat_map(|&j| gen.node_cols(j)).collect();

    let d_s: Vec<u32> = s_rows.iter().map(|&l| values[l]).collect();
    let f_s: Vec<u32> = pattern
        .surviving()
        .iter()
        .flat_map(|&j| (0..p).map(move |i| (i, j)))
        .map(|(i, j)| read(layout.parity_cell(i, j)))
        .collect();

    let a_s = gen.a_full().select(&s_rows, &s_cols);
    let a_f = gen.a_full().select(&f_rows, &s_cols);
    let known = a_s.left_mul_vec(&d_s)?;
    let rhs: Vec<u32> = f_s.iter().zip(&known).map(|(&a, &b)| field.sub(a, b)).collect();

    let unrecoverable = || CodecError::Unrecoverable(pattern.failed().to_vec());
    let d_f = if a_f.is_square() {
        let inv = a_f.inverse().map_err(|e| match e {
            FieldError::Singular => unrecoverable(),
            other => other.into(),
        })?;
        inv.left_mul_vec(&rhs)?
    } else {
        // Fewer than r failures: overdetermined but consistent.
        a_f.solve_left(&rhs).map_err(|e| match e {
            FieldError::Singular => unrecoverable(),
            other => other.into(),
        })?
    };
    for (&l, v) in f_rows.iter().zip(d_f) {
        values[l] = v;
    }
    Ok(DataBlock { params, values })
}

/// Recovers data by solving each array row on its own `[n, k]` code.
/// Rows are independent and are solved in parallel.
pub fn decode_rowwise(
    a_tilde: &Matrix,
    layout: &ArrayLayout,
    partial: &CodewordArray,
    pattern: &ErasurePattern,
) -> Result<DataBlock, CodecError> {
    let params = *layout.params();
    if a_tilde.rows() != params.k() || a_tilde.cols() != params.r() || a_tilde.field() != params.field() {
        return Err(CodecError::DimensionMismatch(format!(
            "Ã must be {}x{} over GF({})",
            params.k(),
            params.r(),
            params.q()
        )));
    }
    check_inputs(&params, layout, partial, pattern)?;
    let field = params.field();
    let (m, p) = (params.m(), params.p());
    let mut failed = vec![false; params.n()];
    for &j in pattern.failed() {
        failed[j] = true;
    }

    let solved: Vec<Vec<(usize, u32)>> = (0..params.height())
        .into_par_iter()
        .map(|row| -> Result<Vec<(usize, u32)>, CodecError> {
            let data = layout.row_data(row);
            let parity = layout.row_parity(row);
            let unknown: Vec<usize> = (0..data.len()).filter(|&a| failed[data[a] / m]).collect();
            let mut out: Vec<(usize, u32)> = data
                .iter()
                .filter(|&&l| !failed[l / m])
                .map(|&l| (l, partial.get(row, l / m).expect("surviving cell")))
                .collect();
            if unknown.is_empty() {
                return Ok(out);
            }
            let known: Vec<(usize, u32)> = (0..data.len())
                .filter(|&a| !failed[data[a] / m])
                .map(|a| (a, partial.get(row, data[a] / m).expect("surviving cell")))
                .collect();
            let live: Vec<usize> = (0..parity.len()).filter(|&c| !failed[parity[c] / p]).collect();
            let rhs: Vec<u32> = live
                .iter()
                .map(|&c| {
                    let f = partial.get(row, parity[c] / p).expect("surviving cell");
                    known.iter().fold(f, |acc, &(a, x)| field.sub(acc, field.mul(x, a_tilde.get(a, c))))
                })
                .collect();
            let system = a_tilde.select(&unknown, &live);
            let x = system.solve_left(&rhs).map_err(|e| match e {
                FieldError::Singular => CodecError::Unrecoverable(pattern.failed().to_vec()),
                other => other.into(),
            })?;
            out.extend(unknown.iter().map(|&a| data[a]).zip(x));
            Ok(out)
        })
        .collect::<Result<_, _>>()?;

    let mut values = vec![0; params.n() * m];
    for (l, v) in solved.into_iter().flatten() {
        values[l] = v;
    }
    Ok(DataBlock { params, values })
}

/// Which kind of symbol sits in each cell, for display purposes.
pub fn describe_cell(layout: &ArrayLayout, row: usize, col: usize) -> String {
    match layout.cell(row, col) {
        Cell::Data { i, j } => format!("d{i},{j}"),
        Cell::Parity { i, j } => format!("f{i},{j}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_generator, build_layout, derive_params, design_code, example_a_tilde_gf7};
    use crate::field::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn four_node() -> (GeneratorA, ArrayLayout) {
        let params = derive_params(4, 2).unwrap().with_field(3).unwrap();
        let f3 = PrimeField::new(3).unwrap();
        let a_tilde = Matrix::from_rows(f3, &[vec![1, 1], vec![1, 2]]).unwrap();
        (build_generator(params, a_tilde).unwrap(), build_layout(params))
    }

    fn eight_node() -> (GeneratorA, ArrayLayout) {
        let params = derive_params(8, 3).unwrap().with_field(7).unwrap();
        (build_generator(params, example_a_tilde_gf7()).unwrap(), build_layout(params))
    }

    #[test]
    fn zero_data_zero_parity() {
        let (g, l) = eight_node();
        let cw = encode(&g, &l, &DataBlock::zeros(*g.params())).unwrap();
        assert!(cw.rows().iter().flatten().all(|c| *c == Some(0)));
    }

    #[test]
    fn unit_vector_gives_generator_row() {
        let (g, l) = eight_node();
        let params = *g.params();
        for unit in [0, 7, 23, 39] {
            let mut v = vec![0; 40];
            v[unit] = 1;
            let cw = encode(&g, &l, &DataBlock::from_linear(params, v).unwrap()).unwrap();
            for j in 0..8 {
                for i in 0..3 {
                    let (row, col) = l.parity_cell(i, j);
                    assert_eq!(cw.get(row, col), Some(g.a_full().get(unit, i + 3 * j)));
                }
            }
        }
    }

    #[test]
    fn last_row_parities_match_rowwise_product() {
        let (g, l) = eight_node();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = DataBlock::random(*g.params(), &mut rng);
        let cw = encode(&g, &l, &data).unwrap();
        let x = [data.get(2, 1), data.get(0, 3), data.get(3, 4), data.get(1, 6), data.get(4, 7)];
        let expect = g.a_tilde().left_mul_vec(&x).unwrap();
        let got: Vec<u32> = [(0, 0), (2, 2), (1, 5)]
            .iter()
            .map(|&(i, j)| {
                let (row, col) = l.parity_cell(i, j);
                assert_eq!(row, 7);
                cw.get(row, col).unwrap()
            })
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn no_erasures_is_identity() {
        let (g, l) = eight_node();
        let data = DataBlock::random(*g.params(), &mut ChaCha8Rng::seed_from_u64(1));
        let cw = encode(&g, &l, &data).unwrap();
        let none = ErasurePattern::none(8);
        assert_eq!(decode(&g, &l, &cw, &none).unwrap(), data);
        assert_eq!(decode_rowwise(g.a_tilde(), &l, &cw, &none).unwrap(), data);
    }

    #[test]
    fn four_node_all_pairs() {
        let (g, l) = four_node();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..100 {
            let data = DataBlock::random(*g.params(), &mut rng);
            let cw = encode(&g, &l, &data).unwrap();
            for failed in crate::subsets::colex(4, 2) {
                let pat = ErasurePattern::new(4, failed).unwrap();
                let lost = cw.erase(&pat);
                assert_eq!(decode(&g, &l, &lost, &pat).unwrap(), data);
                assert_eq!(decode_rowwise(g.a_tilde(), &l, &lost, &pat).unwrap(), data);
            }
        }
    }

    #[test]
    fn eight_node_specific_pattern() {
        let (g, l) = eight_node();
        let data = DataBlock::random(*g.params(), &mut ChaCha8Rng::seed_from_u64(247));
        let cw = encode(&g, &l, &data).unwrap();
        let pat = ErasurePattern::new(8, [2, 4, 7]).unwrap();
        let lost = cw.erase(&pat);
        assert_eq!(lost.erased_columns(), vec![2, 4, 7]);
        assert_eq!(decode(&g, &l, &lost, &pat).unwrap(), data);
    }

    /// One row of the 4-node code over GF(3) with two erased cells: the
    /// brute-force oracle tries all 9 candidate data pairs.
    #[test]
    fn single_row_matches_brute_force() {
        let (g, l) = four_node();
        let data = DataBlock::from_linear(*g.params(), vec![2, 1, 0, 2]).unwrap();
        let cw = encode(&g, &l, &data).unwrap();
        let pat = ErasurePattern::new(4, [0, 2]).unwrap();
        let lost = cw.erase(&pat);
        let rowwise = decode_rowwise(g.a_tilde(), &l, &lost, &pat).unwrap();

        // Row 0 holds d00, f01, d02, f03; both data cells are erased.
        let mut candidates = Vec::new();
        for x0 in 0..3 {
            for x1 in 0..3 {
                let par = g.a_tilde().left_mul_vec(&[x0, x1]).unwrap();
                if Some(par[0]) == lost.get(0, 1) && Some(par[1]) == lost.get(0, 3) {
                    candidates.push((x0, x1));
                }
            }
        }
        assert_eq!(candidates, vec![(rowwise.get(0, 0), rowwise.get(0, 2))]);
        assert_eq!(candidates[0], (data.get(0, 0), data.get(0, 2)));
    }

    #[test]
    fn partial_failures_below_r() {
        let g = design_code(9, 3, None).unwrap();
        let l = build_layout(*g.params());
        let data = DataBlock::random(*g.params(), &mut ChaCha8Rng::seed_from_u64(3));
        let cw = encode(&g, &l, &data).unwrap();
        for failed in [vec![4], vec![0, 8]] {
            let pat = ErasurePattern::new(9, failed).unwrap();
            let lost = cw.erase(&pat);
            assert_eq!(decode(&g, &l, &lost, &pat).unwrap(), data);
            assert_eq!(decode_rowwise(g.a_tilde(), &l, &lost, &pat).unwrap(), data);
        }
    }

    #[test]
    fn error_paths() {
        let (g, l) = four_node();
        let data = DataBlock::random(*g.params(), &mut ChaCha8Rng::seed_from_u64(5));
        let cw = encode(&g, &l, &data).unwrap();
        let too_many = ErasurePattern::new(4, [0, 1, 2]).unwrap();
        assert_eq!(
            decode(&g, &l, &cw.erase(&too_many), &too_many),
            Err(CodecError::TooManyErasures { failed: 3, r: 2 })
        );
        let pat = ErasurePattern::new(4, [1]).unwrap();
        let other = ErasurePattern::new(4, [2]).unwrap();
        assert!(matches!(decode(&g, &l, &cw.erase(&pat), &other), Err(CodecError::MissingSymbol { col: 1, .. })));
        assert!(matches!(ErasurePattern::new(4, [4]), Err(CodecError::NodeOutOfRange { .. })));

        // Repeated columns in Ã: a non-MDS code.
        let f3 = PrimeField::new(3).unwrap();
        let bad = build_generator(*g.params(), Matrix::from_rows(f3, &[vec![1, 1], vec![1, 1]]).unwrap()).unwrap();
        let cw = encode(&bad, &l, &data).unwrap();
        let pat = ErasurePattern::new(4, [0, 2]).unwrap();
        assert_eq!(decode(&bad, &l, &cw.erase(&pat), &pat), Err(CodecError::Unrecoverable(vec![0, 2])));
        assert_eq!(
            decode_rowwise(bad.a_tilde(), &l, &cw.erase(&pat), &pat),
            Err(CodecError::Unrecoverable(vec![0, 2]))
        );
    }

    #[test]
    fn codeword_json_marks_erasures_as_null() {
        let (g, l) = four_node();
        let data = DataBlock::from_linear(*g.params(), vec![1, 2, 0, 1]).unwrap();
        let cw = encode(&g, &l, &data).unwrap();
        let pat = ErasurePattern::new(4, [1]).unwrap();
        let json = serde_json::to_value(cw.erase(&pat)).unwrap();
        assert_eq!(json["cells"][0][1], serde_json::Value::Null);
        assert_eq!(json["cells"][0][0], 1);
        let back: CodewordArray = serde_json::from_value(json).unwrap();
        assert_eq!(back, cw.erase(&pat));
        let bad = serde_json::json!({"params": g.params(), "cells": [[0, 1, 2]]});
        assert!(serde_json::from_value::<CodewordArray>(bad).is_err());
    }

    #[test]
    fn data_grid_round_trip() {
        let (g, _) = eight_node();
        let data = DataBlock::random(*g.params(), &mut ChaCha8Rng::seed_from_u64(9));
        let grid = data.to_grid();
        assert_eq!(grid.d.len(), 5);
        assert_eq!(grid.d[3][1], data.get(3, 1));
        assert_eq!(DataBlock::from_grid(*g.params(), &grid.d).unwrap(), data);
        assert!(DataBlock::from_grid(*g.params(), &grid.d[..4]).is_err());
    }
}
