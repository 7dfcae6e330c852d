//! Code construction: parameters, the array layout, and the generator
//! `A = Ã ⊗ D` for the stacked lowest-density vertical array code.
//!
//! Each node stores `m` data and `p` parity symbols in an `(m+p) × n` array.
//! Data symbol `d[i][j]` (symbol `i` of node `j`) lives in row
//! `(i + j·m) mod (m+p)`; parity `f[i][j]` lives in row `(j·m − i − 1) mod (m+p)`.
//! Every array row then holds `k` data and `r` parity cells and is encoded
//! independently with the systematic `[n, k]` code `(I_k | Ã)`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{next_prime, FieldError, Matrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("GF({q}) is too small: need at least {needed} distinct points")]
    FieldTooSmall { q: u32, needed: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Node count `n`, survivors `k`, tolerated failures `r`, data symbols `m`
/// and parity symbols `p` per node, and the field modulus `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct CodeParams {
    n: usize,
    k: usize,
    r: usize,
    m: usize,
    p: usize,
    q: u32,
}

#[derive(Deserialize)]
struct RawParams {
    n: usize,
    k: usize,
    r: usize,
    m: usize,
    p: usize,
    q: u32,
}

impl TryFrom<RawParams> for CodeParams {
    type Error = ConstructError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        let params = CodeParams::new(raw.n, raw.r, raw.m, raw.p, raw.q)?;
        if params.k != raw.k {
            return Err(ConstructError::InvalidParams(format!(
                "k = {} is inconsistent with n = {}, r = {}",
                raw.k, raw.n, raw.r
            )));
        }
        Ok(params)
    }
}

impl CodeParams {
    /// Validates an explicit parameter set. `q` only has to be prime here;
    /// whether it is large enough depends on the chosen `Ã`.
    pub fn new(n: usize, r: usize, m: usize, p: usize, q: u32) -> Result<Self, ConstructError> {
        if n < 2 {
            return Err(ConstructError::InvalidParams(format!("need n >= 2, got {n}")));
        }
        if r < 1 || r >= n {
            return Err(ConstructError::InvalidParams(format!("need 1 <= r < n, got r = {r}, n = {n}")));
        }
        if m == 0 || p == 0 {
            return Err(ConstructError::InvalidParams("m and p must be positive".into()));
        }
        let k = n - r;
        if p * k != m * r {
            return Err(ConstructError::InvalidParams(format!("p·k = {} differs from m·r = {}", p * k, m * r)));
        }
        PrimeField::new(q)?;
        Ok(CodeParams { n, k, r, m, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Array height `m + p`.
    pub fn height(&self) -> usize {
        self.m + self.p
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("validated at construction")
    }

    /// Repetition factor of an extended code, `gcd(m, p)`.
    pub fn extension(&self) -> usize {
        self.m.gcd(&self.p)
    }

    /// Same code shape over a different prime field.
    pub fn with_field(&self, q: u32) -> Result<Self, ConstructError> {
        CodeParams::new(self.n, self.r, self.m, self.p, q)
    }

    /// Parameters of the dual code: `k` and `r` swap, as do `m` and `p`.
    pub fn dual(&self) -> Self {
        CodeParams { n: self.n, k: self.r, r: self.k, m: self.p, p: self.m, q: self.q }
    }
}

/// Smallest array for `n` nodes and `r` failures: `m = k/g`, `p = r/g` with
/// `g = gcd(k, r)`, over the smallest prime field with at least `n` elements.
pub fn derive_params(n: usize, r: usize) -> Result<CodeParams, ConstructError> {
    if n < 2 || r < 1 || r >= n {
        return Err(ConstructError::InvalidParams(format!("need 1 <= r < n and n >= 2, got n = {n}, r = {r}")));
    }
    let k = n - r;
    let g = k.gcd(&r);
    let q = next_prime(n as u64);
    let q = u32::try_from(q).map_err(|_| ConstructError::InvalidParams(format!("n = {n} too large")))?;
    CodeParams::new(n, r, k / g, r / g, q)
}

/// What occupies a cell of the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    /// `d[i][j]`: data symbol `i` of node `j`.
    Data { i: usize, j: usize },
    /// `f[i][j]`: parity symbol `i` of node `j`.
    Parity { i: usize, j: usize },
}

/// Placement of every data and parity symbol in the `(m+p) × n` array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayLayout {
    params: CodeParams,
    data_cells: Vec<(usize, usize)>,
    parity_cells: Vec<(usize, usize)>,
    grid: Vec<Cell>,
    row_data: Vec<Vec<usize>>,
    row_parity: Vec<Vec<usize>>,
}

pub fn build_layout(params: CodeParams) -> ArrayLayout {
    let (n, m, p, h) = (params.n, params.m, params.p, params.height());
    let mut grid: Vec<Option<Cell>> = vec![None; h * n];
    let mut data_cells = Vec::with_capacity(n * m);
    let mut parity_cells = Vec::with_capacity(n * p);
    let mut row_data = vec![Vec::with_capacity(params.k); h];
    let mut row_parity = vec![Vec::with_capacity(params.r); h];

    // Linear data index l = i + j·m, ascending, so each row lists its data
    // symbols in the order they multiply Ã.
    for l in 0..n * m {
        let (i, j) = (l % m, l / m);
        let row = l % h;
        data_cells.push((row, j));
        row_data[row].push(l);
        let slot = &mut grid[row * n + j];
        assert!(slot.is_none(), "data cell ({row}, {j}) placed twice");
        *slot = Some(Cell::Data { i, j });
    }
    for t in 0..n * p {
        let (i, j) = (t % p, t / p);
        let row = h - 1 - t % h;
        debug_assert_eq!(row as i64, ((j * m) as i64 - i as i64 - 1).rem_euclid(h as i64));
        parity_cells.push((row, j));
        row_parity[row].push(t);
        let slot = &mut grid[row * n + j];
        assert!(slot.is_none(), "cell ({row}, {j}) holds both data and parity");
        *slot = Some(Cell::Parity { i, j });
    }
    let grid = grid.into_iter().map(|c| c.expect("data and parity cells tile the array")).collect();
    ArrayLayout { params, data_cells, parity_cells, grid, row_data, row_parity }
}

impl ArrayLayout {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    /// `(row, column)` of data symbol `d[i][j]`.
    pub fn data_cell(&self, i: usize, j: usize) -> (usize, usize) {
        self.data_cells[i + j * self.params.m]
    }

    /// `(row, column)` of parity symbol `f[i][j]`.
    pub fn parity_cell(&self, i: usize, j: usize) -> (usize, usize) {
        self.parity_cells[i + j * self.params.p]
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.grid[row * self.params.n + col]
    }

    /// Linear data indices `i + j·m` stored in `row`, ascending. Position `a`
    /// in this list multiplies row `a` of `Ã`.
    pub fn row_data(&self, row: usize) -> &[usize] {
        &self.row_data[row]
    }

    /// Linear parity indices `i + j·p` stored in `row`, ascending. Position
    /// `c` in this list is produced by column `c` of `Ã`.
    pub fn row_parity(&self, row: usize) -> &[usize] {
        &self.row_parity[row]
    }
}

/// Cauchy matrix `1/(x_i − y_j)` with `x_i = i`, `y_j = k + j`. Every square
/// submatrix of a Cauchy matrix is itself Cauchy and hence nonsingular.
pub fn cauchy_totally_nonsingular(k: usize, r: usize, field: PrimeField) -> Result<Matrix, ConstructError> {
    if (field.modulus() as usize) < k + r {
        return Err(ConstructError::FieldTooSmall { q: field.modulus(), needed: k + r });
    }
    let mut out = Matrix::zeros(field, k, r);
    for i in 0..k {
        for j in 0..r {
            let diff = field.sub(i as u32, (k + j) as u32);
            out.set(i, j, field.inv(diff)?);
        }
    }
    Ok(out)
}

/// The 5×3 totally nonsingular matrix over GF(7) used for the `[8, 5]` worked
/// example. It is smaller than a Cauchy construction would allow (7 < 8).
pub fn example_a_tilde_gf7() -> Matrix {
    let f = PrimeField::new(7).expect("7 is prime");
    Matrix::from_rows(f, &[vec![1, 1, 1], vec![1, 3, 6], vec![1, 4, 2], vec![1, 6, 4], vec![1, 2, 5]])
        .expect("entries are residues mod 7")
}

/// `(m+p) × (m+p)` antidiagonal: `D[i][j] = 1` iff `i + j + 1 ≡ 0 (mod m+p)`.
pub fn build_d_matrix(m: usize, p: usize, field: PrimeField) -> Matrix {
    let h = m + p;
    Matrix::from_fn(field, h, h, |i, j| u32::from((i + j + 1) % h == 0))
}

/// Closed-form zero test for block `A[i_blk][j_blk]` (an `m × p` block):
/// nonzero iff `(i_blk − j_blk)·p mod (m+p) ≠ 0`.
pub fn block_support(params: &CodeParams, i_blk: usize, j_blk: usize) -> bool {
    let h = params.height() as i64;
    ((i_blk as i64 - j_blk as i64) * params.p as i64).rem_euclid(h) != 0
}

/// The nonsystematic generator part of a constructed code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorA {
    params: CodeParams,
    a_tilde: Matrix,
    d_mat: Matrix,
    a_full: Matrix,
}

pub fn build_generator(params: CodeParams, a_tilde: Matrix) -> Result<GeneratorA, ConstructError> {
    if a_tilde.rows() != params.k || a_tilde.cols() != params.r {
        return Err(ConstructError::DimensionMismatch(format!(
            "Ã must be {}x{}, got {}x{}",
            params.k,
            params.r,
            a_tilde.rows(),
            a_tilde.cols()
        )));
    }
    if a_tilde.field() != params.field() {
        return Err(FieldError::FieldMismatch { left: params.q, right: a_tilde.field().modulus() }.into());
    }
    let d_mat = build_d_matrix(params.m, params.p, params.field());
    let a_full = a_tilde.kron(&d_mat)?;
    debug_assert_eq!((a_full.rows(), a_full.cols()), (params.n * params.m, params.n * params.p));
    Ok(GeneratorA { params, a_tilde, d_mat, a_full })
}

/// Minimal code for `n` nodes and `r` failures with a Cauchy `Ã`. When
/// `q` is given it replaces the default smallest prime `>= n`.
pub fn design_code(n: usize, r: usize, q: Option<u32>) -> Result<GeneratorA, ConstructError> {
    let mut params = derive_params(n, r)?;
    if let Some(q) = q {
        params = params.with_field(q)?;
    }
    let a_tilde = cauchy_totally_nonsingular(params.k, params.r, params.field())?;
    build_generator(params, a_tilde)
}

/// Code reusing the mother code `a` times: per-node symbols become
/// `(a·m, a·p)` and `A` is rebuilt as `Ã ⊗ D` with `D` of order `a(m+p)`.
pub fn extend_code(gen: &GeneratorA, a: usize) -> Result<GeneratorA, ConstructError> {
    if a < 1 {
        return Err(ConstructError::InvalidParams("extension factor must be >= 1".into()));
    }
    let p = &gen.params;
    let params = CodeParams::new(p.n, p.r, p.m * a, p.p * a, p.q)?;
    build_generator(params, gen.a_tilde.clone())
}

/// Dual code: nonsystematic part `−Aᵀ`, with `k ↔ r` and `m ↔ p`.
///
/// `D` is symmetric, so `−Aᵀ = (−Ãᵀ) ⊗ D` and the dual is again a stacked
/// code with `Ã' = −Ãᵀ` on the same layout rule.
pub fn dual_code(gen: &GeneratorA) -> GeneratorA {
    let params = gen.params.dual();
    GeneratorA {
        params,
        a_tilde: gen.a_tilde.transpose().neg(),
        d_mat: gen.d_mat.clone(),
        a_full: gen.a_full.transpose().neg(),
    }
}

impl GeneratorA {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn a_tilde(&self) -> &Matrix {
        &self.a_tilde
    }

    pub fn d_mat(&self) -> &Matrix {
        &self.d_mat
    }

    pub fn a_full(&self) -> &Matrix {
        &self.a_full
    }

    pub fn field(&self) -> PrimeField {
        self.a_full.field()
    }

    /// Scalar row indices of node `j`'s data symbols in `A`.
    pub fn node_rows(&self, j: usize) -> std::ops::Range<usize> {
        j * self.params.m..(j + 1) * self.params.m
    }

    /// Scalar column indices of node `j`'s parity symbols in `A`.
    pub fn node_cols(&self, j: usize) -> std::ops::Range<usize> {
        j * self.params.p..(j + 1) * self.params.p
    }

    /// Block `A[i][j]`, the contribution of node `i`'s data to node `j`'s parities.
    pub fn block(&self, i: usize, j: usize) -> Matrix {
        let rows: Vec<usize> = self.node_rows(i).collect();
        let cols: Vec<usize> = self.node_cols(j).collect();
        self.a_full.select(&rows, &cols)
    }

    pub fn block_is_zero(&self, i: usize, j: usize) -> bool {
        self.node_rows(i).all(|r| self.node_cols(j).all(|c| self.a_full.get(r, c) == 0))
    }

    pub fn to_spec(&self) -> CodeSpec {
        CodeSpec {
            n: self.params.n,
            r: self.params.r,
            q: self.params.q,
            a_tilde: self.a_tilde.to_rows(),
            extension: self.params.extension(),
        }
    }

    pub fn from_spec(spec: &CodeSpec) -> Result<GeneratorA, ConstructError> {
        let base = derive_params(spec.n, spec.r)?;
        let a = spec.extension;
        if a < 1 {
            return Err(ConstructError::InvalidParams("extension must be >= 1".into()));
        }
        let params = CodeParams::new(spec.n, spec.r, base.m * a, base.p * a, spec.q)?;
        let a_tilde = Matrix::from_rows(params.field(), &spec.a_tilde)?;
        build_generator(params, a_tilde)
    }
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

fn one() -> usize {
    1
}

/// Portable description of a code: enough to rebuild it exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub r: usize,
    pub q: u32,
    pub a_tilde: Vec<Vec<u32>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub extension: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn derive_params_examples() {
        let p = derive_params(8, 3).unwrap();
        assert_eq!((p.m(), p.p(), p.k(), p.q()), (5, 3, 5, 11));
        let p = derive_params(4, 2).unwrap();
        assert_eq!((p.m(), p.p(), p.q()), (1, 1, 5));
        let p = derive_params(6, 1).unwrap();
        assert_eq!((p.m(), p.p(), p.q()), (5, 1, 7));
        assert_eq!(derive_params(2, 1).unwrap().q(), 2);
    }

    #[test]
    fn derive_params_rejects_degenerate() {
        assert!(matches!(derive_params(4, 4), Err(ConstructError::InvalidParams(_))));
        assert!(matches!(derive_params(4, 0), Err(ConstructError::InvalidParams(_))));
        assert!(matches!(derive_params(1, 1), Err(ConstructError::InvalidParams(_))));
        assert!(CodeParams::new(6, 2, 3, 2, 7).is_err());
        assert!(CodeParams::new(6, 2, 2, 1, 8).is_err());
    }

    #[test]
    fn layout_small_examples() {
        let l = build_layout(derive_params(8, 3).unwrap());
        assert_eq!(l.data_cell(0, 0), (0, 0));
        assert_eq!(l.data_cell(3, 1), (0, 1));
        assert_eq!(l.parity_cell(0, 0), (7, 0));

        let l = build_layout(derive_params(4, 2).unwrap());
        assert_eq!(l.data_cell(0, 0), (0, 0));
        assert_eq!(l.parity_cell(0, 0), (1, 0));
        assert_eq!(l.parity_cell(0, 1), (0, 1));
        assert_eq!(l.data_cell(0, 1), (1, 1));
    }

    #[test]
    fn cauchy_requires_room() {
        assert_eq!(cauchy_totally_nonsingular(5, 3, gf(7)), Err(ConstructError::FieldTooSmall { q: 7, needed: 8 }));
        assert_eq!(cauchy_totally_nonsingular(1, 1, gf(2)).unwrap().to_rows(), vec![vec![1]]);
        // 1/(i − (2 + j)) over GF(5)
        let c = cauchy_totally_nonsingular(2, 2, gf(5)).unwrap();
        assert_eq!(c.to_rows(), vec![vec![2, 3], vec![4, 2]]);
    }

    #[test]
    fn d_matrix_shapes() {
        assert_eq!(build_d_matrix(1, 1, gf(3)).to_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(build_d_matrix(1, 0, gf(3)).to_rows(), vec![vec![1]]);
        let d = build_d_matrix(5, 3, gf(7));
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(d.get(i, j), u32::from(i + j == 7));
            }
        }
    }

    #[test]
    fn four_node_generator() {
        let params = derive_params(4, 2).unwrap().with_field(3).unwrap();
        let a_tilde = Matrix::from_rows(gf(3), &[vec![1, 1], vec![1, 2]]).unwrap();
        let g = build_generator(params, a_tilde).unwrap();
        assert_eq!(g.a_full().to_rows(), vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 2], vec![1, 0, 2, 0]]);
        assert!(!block_support(&params, 0, 2));
        assert!(block_support(&params, 0, 1));
    }

    #[test]
    fn generator_rejects_bad_shape_or_field() {
        let params = derive_params(4, 2).unwrap();
        let wrong_shape = Matrix::identity(params.field(), 3);
        assert!(matches!(build_generator(params, wrong_shape), Err(ConstructError::DimensionMismatch(_))));
        let wrong_field = Matrix::from_rows(gf(3), &[vec![1, 1], vec![1, 2]]).unwrap();
        assert!(matches!(build_generator(params, wrong_field), Err(ConstructError::Field(_))));
    }

    #[test]
    fn extension_and_dual_shapes() {
        let g = design_code(4, 2, None).unwrap();
        assert_eq!(extend_code(&g, 1).unwrap(), g);
        assert!(extend_code(&g, 0).is_err());
        let e = extend_code(&g, 3).unwrap();
        assert_eq!((e.params().m(), e.params().p()), (3, 3));
        assert!(e.a_full().row_weights().iter().all(|&w| w == 2));

        let g = design_code(8, 3, None).unwrap();
        let d = dual_code(&g);
        assert_eq!((d.params().k(), d.params().r(), d.params().m(), d.params().p()), (3, 5, 3, 5));
        assert_eq!(d.a_full(), &d.a_tilde().kron(d.d_mat()).unwrap());
        assert_eq!(dual_code(&d), g);
    }

    #[test]
    fn spec_round_trip() {
        let g = extend_code(&design_code(6, 2, None).unwrap(), 2).unwrap();
        let spec = g.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: CodeSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(GeneratorA::from_spec(&back).unwrap(), g);

        let plain = design_code(4, 2, None).unwrap().to_spec();
        let json = serde_json::to_string(&plain).unwrap();
        assert_eq!(json, r#"{"n":4,"r":2,"q":5,"a_tilde":[[2,3],[4,2]]}"#);
    }

    #[test]
    fn params_json_validates() {
        let p = derive_params(8, 3).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<CodeParams>(&json).unwrap(), p);
        assert!(serde_json::from_str::<CodeParams>(r#"{"n":8,"k":4,"r":3,"m":5,"p":3,"q":11}"#).is_err());
        assert!(serde_json::from_str::<CodeParams>(r#"{"n":8,"k":5,"r":3,"m":5,"p":2,"q":11}"#).is_err());
    }
}
