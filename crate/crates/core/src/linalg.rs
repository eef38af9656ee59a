//! Signed tropical matrices: permanents by optimal assignment, tropical
//! Cramer solving, signs of tropical minors and an exhaustive genericity test.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupValue;
use crate::tropical::{Sign, SignedTropical, Tropical};

/// A rectangular matrix of signed tropical numbers over one group arity.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SignedMatrixRepr", into = "SignedMatrixRepr")]
pub struct SignedMatrix {
    arity: usize,
    rows: usize,
    cols: usize,
    entries: Vec<SignedTropical>,
}

#[derive(Serialize, Deserialize)]
struct SignedMatrixRepr {
    arity: usize,
    entries: Vec<Vec<SignedTropical>>,
}

impl TryFrom<SignedMatrixRepr> for SignedMatrix {
    type Error = Error;

    fn try_from(r: SignedMatrixRepr) -> Result<Self> {
        SignedMatrix::new(r.arity, r.entries)
    }
}

impl From<SignedMatrix> for SignedMatrixRepr {
    fn from(m: SignedMatrix) -> Self {
        SignedMatrixRepr {
            arity: m.arity,
            entries: (0..m.rows).map(|i| m.row(i).to_vec()).collect(),
        }
    }
}

impl SignedMatrix {
    /// Builds a matrix from rows, checking that it is rectangular and that
    /// every finite entry has the declared arity.
    pub fn new(arity: usize, rows: Vec<Vec<SignedTropical>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for e in r {
                if let Some(a) = e.modulus().arity() {
                    if a != arity {
                        return Err(Error::ArityMismatch {
                            expected: arity,
                            found: a,
                        });
                    }
                }
            }
        }
        Ok(Self::from_rows_unchecked(arity, rows, cols))
    }

    pub(crate) fn from_rows_unchecked(
        arity: usize,
        rows: Vec<Vec<SignedTropical>>,
        cols: usize,
    ) -> Self {
        let n_rows = rows.len();
        let entries: Vec<SignedTropical> = rows.into_iter().flatten().collect();
        debug_assert_eq!(entries.len(), n_rows * cols);
        SignedMatrix {
            arity,
            rows: n_rows,
            cols,
            entries,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &SignedTropical {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[SignedTropical] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    fn check_indices(&self, rows: &[usize], cols: &[usize]) -> Result<()> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::DimensionMismatch(format!(
                "row index {i} out of range"
            )));
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "column index {j} out of range"
            )));
        }
        Ok(())
    }

    /// The submatrix with the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<SignedMatrix> {
        self.check_indices(rows, cols)?;
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
            .collect();
        Ok(SignedMatrix {
            arity: self.arity,
            rows: rows.len(),
            cols: cols.len(),
            entries,
        })
    }

    /// The rows `rows`, all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Result<SignedMatrix> {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &cols)
    }

    pub fn transpose(&self) -> SignedMatrix {
        let entries = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        SignedMatrix {
            arity: self.arity,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// A copy with column `j` replaced by `column`.
    pub fn with_column(&self, j: usize, column: &[SignedTropical]) -> Result<SignedMatrix> {
        if column.len() != self.rows || j >= self.cols {
            return Err(Error::DimensionMismatch(
                "replacement column does not fit".into(),
            ));
        }
        let mut out = self.clone();
        for (i, v) in column.iter().enumerate() {
            out.entries[i * self.cols + j] = v.clone();
        }
        Ok(out)
    }
}

impl fmt::Debug for SignedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "SignedMatrix {}x{} (arity {})",
            self.rows, self.cols, self.arity
        )?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Result of a tropical permanent computation.
///
/// For a finite permanent attained by several permutations `unique` is false
/// and `sign` is `Zero`; see [`PermanentResult::is_degenerate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermanentResult {
    pub value: Tropical,
    /// `permutation[i]` is the column assigned to row `i`.
    pub permutation: Option<Vec<usize>>,
    pub unique: bool,
    pub sign: Sign,
}

impl PermanentResult {
    fn bottom() -> Self {
        PermanentResult {
            value: Tropical::Bottom,
            permutation: None,
            unique: false,
            sign: Sign::Zero,
        }
    }

    /// Finite and attained by a unique permutation.
    pub fn is_nonsingular(&self) -> bool {
        self.unique && !self.value.is_bottom()
    }

    /// Finite but attained by more than one permutation.
    pub fn is_degenerate(&self) -> bool {
        !self.unique && !self.value.is_bottom()
    }

    /// The sign, or an error for a degenerate permanent.
    pub fn definite_sign(&self) -> Result<Sign> {
        if self.is_degenerate() {
            return Err(Error::Degenerate(
                "tropical minor attained by several permutations".into(),
            ));
        }
        Ok(self.sign)
    }
}

/// Parity sign of a permutation given as `perm[i] = image of i`.
pub fn permutation_sign(perm: &[usize]) -> Sign {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0;
    for start in 0..perm.len() {
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    if transpositions % 2 == 0 {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

struct Assignment {
    /// column assigned to each row
    row_to_col: Vec<usize>,
    /// dual potentials for the minimization of `-w`: `u_i + v_j <= -w_ij`
    u: Vec<GroupValue>,
    v: Vec<GroupValue>,
}

/// Max-weight perfect matching by the Hungarian method with exact group
/// potentials. `None` entries are absent edges. Returns `None` when no
/// perfect matching exists.
fn max_weight_assignment(w: &[Vec<Option<GroupValue>>], arity: usize) -> Option<Assignment> {
    let n = w.len();
    let zero = GroupValue::zero(arity);
    // 1-based rows and columns; column 0 is the virtual root.
    let mut u = vec![zero.clone(); n + 1];
    let mut v = vec![zero.clone(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<GroupValue>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<GroupValue> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(wij) = &w[i0 - 1][j - 1] {
                    let cur = &(&(-wij) - &u[i0]) - &v[j];
                    if minv[j].as_ref().is_none_or(|m| cur < *m) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta?;
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = &u[p[j]] + &delta;
                    v[j] = &v[j] - &delta;
                } else if let Some(m) = &minv[j] {
                    minv[j] = Some(m - &delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    Some(Assignment {
        row_to_col,
        u: u[1..].to_vec(),
        v: v[1..].to_vec(),
    })
}

/// Whether the bipartite graph `adj` (known to have a perfect matching) has
/// exactly one, by repeatedly matching forced degree-1 vertices.
fn has_unique_perfect_matching(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut row_alive = vec![true; n];
    let mut col_alive = vec![true; n];
    let mut row_deg: Vec<usize> = adj
        .iter()
        .map(|r| r.iter().filter(|&&e| e).count())
        .collect();
    let mut col_deg: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| adj[i][j]).count())
        .collect();
    let mut removed = 0;

    let remove = |i: usize,
                  j: usize,
                  row_alive: &mut Vec<bool>,
                  col_alive: &mut Vec<bool>,
                  row_deg: &mut Vec<usize>,
                  col_deg: &mut Vec<usize>| {
        row_alive[i] = false;
        col_alive[j] = false;
        for jj in 0..n {
            if adj[i][jj] && col_alive[jj] {
                col_deg[jj] -= 1;
            }
        }
        for ii in 0..n {
            if adj[ii][j] && row_alive[ii] {
                row_deg[ii] -= 1;
            }
        }
    };

    while removed < n {
        let forced_row = (0..n).find(|&i| row_alive[i] && row_deg[i] == 1);
        let pair = if let Some(i) = forced_row {
            (0..n).find(|&j| col_alive[j] && adj[i][j]).map(|j| (i, j))
        } else {
            (0..n)
                .find(|&j| col_alive[j] && col_deg[j] == 1)
                .and_then(|j| (0..n).find(|&i| row_alive[i] && adj[i][j]).map(|i| (i, j)))
        };
        match pair {
            Some((i, j)) => {
                remove(
                    i,
                    j,
                    &mut row_alive,
                    &mut col_alive,
                    &mut row_deg,
                    &mut col_deg,
                );
                removed += 1;
            }
            None => return false,
        }
    }
    true
}

/// The tropical permanent `max_σ Σ_i |M_{iσ(i)}|`, with an optimal
/// permutation, a uniqueness flag and the sign when the optimum is unique.
pub fn tropical_permanent(m: &SignedMatrix) -> Result<PermanentResult> {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 {
        return Err(Error::DimensionMismatch(format!(
            "permanent needs a non-empty square matrix, got {rows}x{cols}"
        )));
    }
    let n = rows;
    let weights: Vec<Vec<Option<GroupValue>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| m.get(i, j).modulus().finite().cloned())
                .collect()
        })
        .collect();
    let Some(assignment) = max_weight_assignment(&weights, m.arity()) else {
        return Ok(PermanentResult::bottom());
    };
    let perm = assignment.row_to_col;

    let mut value = GroupValue::zero(m.arity());
    let mut sign = permutation_sign(&perm);
    for (i, &j) in perm.iter().enumerate() {
        let e = m.get(i, j);
        value = &value + e.modulus().finite().expect("matched edge is finite");
        sign = sign * e.sign();
    }

    let tight: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    weights[i][j]
                        .as_ref()
                        .is_some_and(|wij| (&(&assignment.u[i] + &assignment.v[j]) + wij).is_zero())
                })
                .collect()
        })
        .collect();
    debug_assert!(perm.iter().enumerate().all(|(i, &j)| tight[i][j]));
    let unique = has_unique_perfect_matching(&tight);

    Ok(PermanentResult {
        value: Tropical::Finite(value),
        permutation: Some(perm),
        unique,
        sign: if unique { sign } else { Sign::Zero },
    })
}

/// Tropical Cramer solution of the lifted system `A x + b = 0`:
/// `|x_j| = tper(A[j←b]) - tper(A)` and
/// `sign(x_j) = -sign(tper A[j←b]) · sign(tper A)`.
pub fn tropical_cramer(a: &SignedMatrix, b: &[SignedTropical]) -> Result<Vec<SignedTropical>> {
    let (rows, cols) = a.shape();
    if rows != cols || b.len() != rows {
        return Err(Error::DimensionMismatch(format!(
            "Cramer needs a square system, got {rows}x{cols} with {} constants",
            b.len()
        )));
    }
    let det = tropical_permanent(a)?;
    if det.value.is_bottom() {
        return Err(Error::Singular);
    }
    if !det.unique {
        return Err(Error::Degenerate(
            "system matrix has several optimal permutations".into(),
        ));
    }
    let det_value = det.value.finite().expect("finite permanent").clone();
    (0..cols)
        .map(|j| {
            let numerator = tropical_permanent(&a.with_column(j, b)?)?;
            if numerator.value.is_bottom() {
                return Ok(SignedTropical::zero());
            }
            if !numerator.unique {
                return Err(Error::Degenerate(format!(
                    "Cramer numerator for column {j} has several optimal permutations"
                )));
            }
            let modulus = numerator.value.odiv(&det_value)?;
            Ok(SignedTropical::with_sign(
                (numerator.sign * det.sign).flip(),
                modulus,
            ))
        })
        .collect()
}

/// Access to signs of tropical minors of a fixed matrix. This is the only
/// window pivoting strategies get onto the instance data.
pub trait MinorOracle {
    fn minor_sign(&self, rows: &[usize], cols: &[usize]) -> Result<Sign>;
}

/// Sign of the tropical minor on `rows × cols`.
pub fn minor_sign_oracle(m: &SignedMatrix, rows: &[usize], cols: &[usize]) -> Result<Sign> {
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "minor needs equally sized non-empty index sets, got {} and {}",
            rows.len(),
            cols.len()
        )));
    }
    tropical_permanent(&m.submatrix(rows, cols)?)?.definite_sign()
}

impl MinorOracle for SignedMatrix {
    fn minor_sign(&self, rows: &[usize], cols: &[usize]) -> Result<Sign> {
        minor_sign_oracle(self, rows, cols)
    }
}

/// Size limits for the exhaustive genericity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenericityLimits {
    /// Largest accepted row or column count.
    pub max_dim: usize,
    /// Largest accepted `min(rows, cols)`, i.e. the largest minor examined.
    pub max_minor: usize,
}

impl Default for GenericityLimits {
    fn default() -> Self {
        GenericityLimits {
            max_dim: 12,
            max_minor: 5,
        }
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it
/// returns `Some`.
pub(crate) fn find_combination<T>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    if k > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let Some(t) = f(&idx) {
            return Some(t);
        }
        let pos = (0..k).rev().find(|&p| idx[p] < n - k + p)?;
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// The first square submatrix (by size, then lexicographically) that is
/// finite but not tropically non-singular.
pub fn find_degenerate_minor(
    m: &SignedMatrix,
    limits: GenericityLimits,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let (rows, cols) = m.shape();
    if rows.max(cols) > limits.max_dim || rows.min(cols) > limits.max_minor {
        return Err(Error::SizeGuard(format!(
            "{rows}x{cols} matrix exceeds the exhaustive limit (dimension {} / minor size {})",
            limits.max_dim, limits.max_minor
        )));
    }
    for k in 1..=rows.min(cols) {
        let mut failure: Option<Error> = None;
        let found = find_combination(rows, k, |r| {
            find_combination(cols, k, |c| {
                let sub = match m.submatrix(r, c).and_then(|s| tropical_permanent(&s)) {
                    Ok(p) => p,
                    Err(e) => {
                        failure = Some(e);
                        return Some((Vec::new(), Vec::new()));
                    }
                };
                sub.is_degenerate().then(|| (r.to_vec(), c.to_vec()))
            })
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Every square submatrix has bottom permanent or a unique optimal
/// permutation. Exhaustive, so guarded by `limits`.
pub fn is_tropically_generic(m: &SignedMatrix, limits: GenericityLimits) -> Result<bool> {
    Ok(find_degenerate_minor(m, limits)?.is_none())
}
