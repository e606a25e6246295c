//! Dense integer matrices and the normal forms used to present finitely
//! generated abelian groups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = *x;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Validation("ragged integer matrix".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors (all of length `len`).
    pub fn from_columns(len: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(len, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..len {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect()).unwrap_or_else(|_| unreachable!())
            .with_cols(self.cols)
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
    }

    fn with_cols(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    /// Smallest `k >= 1` with `self^k = I`, searching up to `cap`.
    pub fn order(&self, cap: usize) -> Option<usize> {
        if !self.is_square() {
            return None;
        }
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.mul(self);
            if acc.data.iter().any(|x| x.abs() > 1 << 40) {
                return None;
            }
        }
        None
    }

    pub fn pow(&self, k: usize) -> IntMatrix {
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut m: Vec<Vec<i128>> = (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] == 0 {
                match (k + 1..n).find(|&i| m[i][k] != 0) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        if n == 0 {
            return 1;
        }
        (sign * m[n - 1][n - 1]) as i64
    }

    /// Integer inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::Argument("only square matrices have inverses".into()));
        }
        let s = snf(self)?;
        if s.rank != self.rows || s.diagonal.iter().any(|&d| d != 1) {
            return Err(Error::Argument(format!("matrix {self:?} is not invertible over Z")));
        }
        // U A V = I  =>  A^{-1} = V U
        Ok(s.v.mul(&s.u))
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `u · a · v = diag(diagonal, 0, …)` with `u`, `v` unimodular and each
/// diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub diagonal: Vec<i64>,
    pub rank: usize,
}

struct Work {
    m: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    u_inv: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    v_inv: Vec<Vec<i128>>,
}

fn ident(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

impl Work {
    /// row_i += c · row_j
    fn add_row(&mut self, i: usize, j: usize, c: i128) {
        for k in 0..self.m[0].len() {
            self.m[i][k] += c * self.m[j][k];
        }
        let n = self.u.len();
        for k in 0..n {
            self.u[i][k] += c * self.u[j][k];
        }
        for row in self.u_inv.iter_mut() {
            row[j] -= c * row[i];
        }
    }

    /// col_i += c · col_j
    fn add_col(&mut self, i: usize, j: usize, c: i128) {
        for row in self.m.iter_mut() {
            row[i] += c * row[j];
        }
        for row in self.v.iter_mut() {
            row[i] += c * row[j];
        }
        let n = self.v_inv.len();
        for k in 0..n {
            self.v_inv[j][k] -= c * self.v_inv[i][k];
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.m.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.m.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.m[i].iter_mut() {
            *x = -*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -row[i];
        }
    }
}

fn to_i64_matrix(m: &[Vec<i128>], rows: usize, cols: usize) -> Result<IntMatrix> {
    let mut out = IntMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out[(i, j)] = i64::try_from(m[i][j])
                .map_err(|_| Error::Resource("integer overflow in normal form computation".into()))?;
        }
    }
    Ok(out)
}

pub fn snf(a: &IntMatrix) -> Result<Snf> {
    let (r, c) = (a.rows, a.cols);
    let mut w = Work {
        m: (0..r).map(|i| a.row(i).iter().map(|&x| x as i128).collect()).collect(),
        u: ident(r),
        u_inv: ident(r),
        v: ident(c),
        v_inv: ident(c),
    };
    let mut rank = 0;
    for t in 0..r.min(c) {
        // smallest nonzero entry of the remaining block
        let pivot = (t..r)
            .flat_map(|i| (t..c).map(move |j| (i, j)))
            .filter(|&(i, j)| w.m[i][j] != 0)
            .min_by_key(|&(i, j)| w.m[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if w.m[i][t] != 0 {
                    let qt = w.m[i][t].div_euclid(w.m[t][t]);
                    w.add_row(i, t, -qt);
                    if w.m[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..c {
                if w.m[t][j] != 0 {
                    let qt = w.m[t][j].div_euclid(w.m[t][t]);
                    w.add_col(j, t, -qt);
                    if w.m[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                let best = (t..r)
                    .map(|i| (i, t))
                    .chain((t..c).map(|j| (t, j)))
                    .filter(|&(i, j)| w.m[i][j] != 0)
                    .min_by_key(|&(i, j)| w.m[i][j].abs())
                    .unwrap();
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            let d = w.m[t][t];
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| w.m[i][j] % d != 0));
            match bad {
                Some(i) => w.add_row(t, i, 1),
                None => break,
            }
        }
        if w.m[t][t] < 0 {
            w.negate_row(t);
        }
        rank += 1;
    }
    let diagonal = (0..rank)
        .map(|i| i64::try_from(w.m[i][i]).map_err(|_| Error::Resource("integer overflow in SNF".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Snf {
        u: to_i64_matrix(&w.u, r, r)?,
        u_inv: to_i64_matrix(&w.u_inv, r, r)?,
        v: to_i64_matrix(&w.v, c, c)?,
        v_inv: to_i64_matrix(&w.v_inv, c, c)?,
        diagonal,
        rank,
    })
}

/// Basis (as columns) of the integer kernel `{x : a x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Result<IntMatrix> {
    let s = snf(a)?;
    let idx: Vec<usize> = (s.rank..a.cols).collect();
    Ok(s.v.select_cols(&idx))
}

/// Some integer solution of `a x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[i64]) -> Result<Option<Vec<i64>>> {
    let s = snf(a)?;
    let ub = s.u.apply(b);
    let mut y = vec![0i64; a.cols];
    for (i, val) in ub.iter().enumerate() {
        if i < s.rank {
            if val % s.diagonal[i] != 0 {
                return Ok(None);
            }
            y[i] = val / s.diagonal[i];
        } else if *val != 0 {
            return Ok(None);
        }
    }
    Ok(Some(s.v.apply(&y)))
}

/// Row-style Hermite normal form: the nonzero rows of the result form a
/// basis of the row lattice, in echelon form with positive pivots and the
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(a: &IntMatrix) -> IntMatrix {
    let mut m: Vec<Vec<i128>> = (0..a.rows).map(|i| a.row(i).iter().map(|&x| x as i128).collect()).collect();
    let cols = a.cols;
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        // gcd-combine all rows below r into row r for column c
        for i in r + 1..m.len() {
            while m[i][c] != 0 {
                let qt = m[r][c].div_euclid(m[i][c]);
                for k in 0..cols {
                    m[r][k] -= qt * m[i][k];
                }
                m.swap(r, i);
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let qt = m[i][c].div_euclid(m[r][c]);
            for k in 0..cols {
                m[i][k] -= qt * m[r][k];
            }
        }
        r += 1;
    }
    let rows: Vec<Vec<i64>> =
        m.into_iter().take(r).map(|row| row.into_iter().map(|x| x as i64).collect()).collect();
    IntMatrix::from_rows(rows).unwrap().with_cols(cols)
}

/// Finitely generated abelian group `⊕ Z/d_i ⊕ Z^free_rank` in Smith form:
/// every `d_i >= 2` and `d_i | d_{i+1}`. Canonical coordinates list the
/// torsion coordinates first, then the free ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FGAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl FGAbelianGroup {
    pub fn trivial() -> Self {
        FGAbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn cyclic(n: i64) -> Self {
        if n == 1 {
            Self::trivial()
        } else if n == 0 {
            Self::free(1)
        } else {
            FGAbelianGroup { free_rank: 0, torsion: vec![n.abs()] }
        }
    }

    /// Number of canonical coordinates.
    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion.iter().map(|&d| d as u64).product())
    }

    /// Modulus of each coordinate, 0 for free ones.
    pub fn moduli(&self) -> Vec<i64> {
        let mut m = self.torsion.clone();
        m.extend(std::iter::repeat(0).take(self.free_rank));
        m
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (x, &d) in v.iter_mut().zip(&self.torsion) {
            *x = x.rem_euclid(d);
        }
    }

    pub fn reduced(&self, v: &[i64]) -> Vec<i64> {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        v
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let v: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduced(&v)
    }

    pub fn is_zero(&self, v: &[i64]) -> bool {
        self.reduced(v).iter().all(|&x| x == 0)
    }

    /// Reduces the torsion rows of an endomorphism matrix.
    pub fn reduce_endomorphism(&self, m: &IntMatrix) -> IntMatrix {
        let mut out = m.clone();
        for (i, &d) in self.torsion.iter().enumerate() {
            for j in 0..m.cols() {
                out[(i, j)] = out[(i, j)].rem_euclid(d);
            }
        }
        out
    }

    /// Whether `m` (on canonical coordinates) descends to an endomorphism:
    /// it must kill `d_i · e_i` for every torsion generator.
    pub fn is_endomorphism(&self, m: &IntMatrix) -> bool {
        let n = self.ngens();
        if m.rows() != n || m.cols() != n {
            return false;
        }
        let moduli = self.moduli();
        self.torsion.iter().enumerate().all(|(i, &di)| {
            (0..n).all(|j| {
                let x = di * m[(j, i)];
                match moduli[j] {
                    0 => x == 0,
                    dj => x % dj == 0,
                }
            })
        })
    }
}

/// `Z^n / span(relations)` with its projection and a section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FGAbelianGroup,
    /// Canonical coordinates of the image of each standard basis vector.
    pub projection: IntMatrix,
    /// A lift of each canonical generator to `Z^n` (as columns).
    pub section: IntMatrix,
}

impl Quotient {
    /// Quotient of `Z^n` by the column span of `relations` (`n × k`).
    pub fn of(n: usize, relations: &IntMatrix) -> Result<Quotient> {
        if relations.rows() != n {
            return Err(Error::Argument("relation matrix has the wrong number of rows".into()));
        }
        let s = snf(relations)?;
        let mut tors_idx = Vec::new();
        let mut torsion = Vec::new();
        for (i, &d) in s.diagonal.iter().enumerate() {
            if d > 1 {
                tors_idx.push(i);
                torsion.push(d);
            }
        }
        let free_idx: Vec<usize> = (s.rank..n).collect();
        let idx: Vec<usize> = tors_idx.iter().chain(free_idx.iter()).copied().collect();
        let group = FGAbelianGroup { free_rank: free_idx.len(), torsion };
        let projection = group.reduce_endomorphism(&s.u.select_rows(&idx));
        let section = s.u_inv.select_cols(&idx);
        Ok(Quotient { group, projection, section })
    }

    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        self.group.reduced(&self.projection.apply(x))
    }

    /// The endomorphism of the quotient induced by `m` on `Z^n`, if `m`
    /// preserves the relation lattice.
    pub fn induced(&self, m: &IntMatrix) -> Result<IntMatrix> {
        let induced = self.group.reduce_endomorphism(&self.projection.mul(m).mul(&self.section));
        // m must send relations (the kernel of the projection) to relations
        let n = self.projection.cols();
        let k = self.section.cols();
        for j in 0..n {
            let mut e = vec![0i64; n];
            e[j] = 1;
            let lhs = self.project(&m.apply(&e));
            let rhs = self.group.reduced(&induced.apply(&self.project(&e)));
            if lhs != rhs {
                return Err(Error::Argument(format!(
                    "map does not descend to the quotient (basis vector {j} of {n}, {k} generators)"
                )));
            }
        }
        Ok(induced)
    }
}

/// A subgroup of an [`FGAbelianGroup`], with the inclusion of its canonical
/// generators into the ambient canonical coordinates (as columns).
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FGAbelianGroup,
    pub inclusion: IntMatrix,
}

impl Subgroup {
    /// The subgroup of `ambient` generated by the columns of `gens`.
    pub fn generated_by(ambient: &FGAbelianGroup, gens: &IntMatrix) -> Result<Subgroup> {
        let m = ambient.ngens();
        let k = gens.cols();
        let tors = torsion_columns(ambient);
        // kernel of Z^k -> A
        let rel = integer_kernel(&gens.hcat(&tors.neg()))?;
        let rel_k = rel.select_rows(&(0..k).collect::<Vec<_>>());
        let q = Quotient::of(k, &rel_k)?;
        let mut inclusion = gens.mul(&q.section);
        for j in 0..inclusion.cols() {
            let col = ambient.reduced(&inclusion.column(j));
            for i in 0..m {
                inclusion[(i, j)] = col[i];
            }
        }
        Ok(Subgroup { group: q.group, inclusion })
    }

    /// Canonical coordinates (in the subgroup) of an ambient element, if it
    /// lies in the subgroup.
    pub fn coordinates(&self, ambient: &FGAbelianGroup, y: &[i64]) -> Result<Option<Vec<i64>>> {
        let tors = torsion_columns(ambient);
        let system = self.inclusion.hcat(&tors);
        Ok(solve_integer(&system, y)?.map(|x| self.group.reduced(&x[..self.group.ngens()])))
    }
}

/// `diag(d_1, …, d_t)` padded with zero rows for the free coordinates.
fn torsion_columns(g: &FGAbelianGroup) -> IntMatrix {
    let m = g.ngens();
    let mut t = IntMatrix::zeros(m, g.torsion.len());
    for (i, &d) in g.torsion.iter().enumerate() {
        t[(i, i)] = d;
    }
    t
}

/// Kernel of an endomorphism given on canonical coordinates.
pub fn kernel_of_endomorphism(group: &FGAbelianGroup, m: &IntMatrix) -> Result<Subgroup> {
    if !group.is_endomorphism(m) {
        return Err(Error::Argument("matrix does not define an endomorphism of the group".into()));
    }
    let n = group.ngens();
    let tors = torsion_columns(group);
    let ker = integer_kernel(&m.hcat(&tors.neg()))?;
    let gens = ker.select_rows(&(0..n).collect::<Vec<_>>());
    Subgroup::generated_by(group, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn check_snf(a: &IntMatrix) {
        let s = snf(a).unwrap();
        let d = s.u.mul(a).mul(&s.v);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let want = if i == j && i < s.rank { s.diagonal[i] } else { 0 };
                assert_eq!(d[(i, j)], want, "{a:?}");
            }
        }
        assert!(s.u.mul(&s.u_inv).is_identity());
        assert!(s.v.mul(&s.v_inv).is_identity());
        assert!(s.diagonal.windows(2).all(|w| w[1] % w[0] == 0));
        assert!(s.diagonal.iter().all(|&x| x > 0));
    }

    #[test]
    fn snf_small() {
        check_snf(&mat(&[&[-2]]));
        check_snf(&mat(&[&[1, -1], &[-1, 1]]));
        check_snf(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        let s = snf(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).unwrap();
        assert_eq!(s.diagonal, vec![2, 6, 12]);
        check_snf(&IntMatrix::zeros(2, 3));
    }

    #[test]
    fn kernels_and_solutions() {
        let a = mat(&[&[1, -1], &[-1, 1]]);
        let k = integer_kernel(&a).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(a.apply(&k.column(0)).iter().all(|&x| x == 0));
        assert_eq!(solve_integer(&mat(&[&[2]]), &[3]).unwrap(), None);
        assert_eq!(solve_integer(&mat(&[&[2]]), &[4]).unwrap(), Some(vec![2]));
    }

    #[test]
    fn hermite_basis() {
        // A2 coroots in the coweight basis
        let h = hermite_rows(&mat(&[&[2, -1], &[-1, 2], &[1, 1], &[-2, 1], &[1, -2], &[-1, -1]]));
        assert_eq!(h.rows(), 2);
        assert_eq!(h.det().abs(), 3);
        assert_eq!(h, mat(&[&[1, 1], &[0, 3]]));
    }

    #[test]
    fn quotient_examples() {
        let q = Quotient::of(1, &mat(&[&[-2]])).unwrap();
        assert_eq!(q.group, FGAbelianGroup::cyclic(2));
        let q = Quotient::of(2, &mat(&[&[-1, 1], &[1, -1]])).unwrap();
        assert_eq!(q.group, FGAbelianGroup::free(1));
        assert_eq!(q.project(&[1, 0]), q.project(&[0, 1]));
    }

    #[test]
    fn kernel_examples() {
        // Z with σ = -1: kernel of (σ - 1) = kernel of -2 is trivial
        let z = FGAbelianGroup::free(1);
        assert_eq!(kernel_of_endomorphism(&z, &mat(&[&[-2]])).unwrap().group, FGAbelianGroup::trivial());
        // Z/2 with σ = id: kernel of 0 is everything
        let z2 = FGAbelianGroup::cyclic(2);
        assert_eq!(kernel_of_endomorphism(&z2, &mat(&[&[0]])).unwrap().group, z2);
        // Z/4 with multiplication by 2: kernel Z/2
        let z4 = FGAbelianGroup::cyclic(4);
        let k = kernel_of_endomorphism(&z4, &mat(&[&[2]])).unwrap();
        assert_eq!(k.group, FGAbelianGroup::cyclic(2));
        assert_eq!(k.coordinates(&z4, &[2]).unwrap(), Some(vec![1]));
        assert_eq!(k.coordinates(&z4, &[1]).unwrap(), None);
        // multiplication by 3 on Z/2 x Z is not defined on Z/2 -> Z? it is; map e1 -> e2 is not
        let g = FGAbelianGroup { free_rank: 1, torsion: vec![2] };
        assert!(kernel_of_endomorphism(&g, &mat(&[&[0, 0], &[1, 0]])).is_err());
    }

    #[test]
    fn unimodular_inverse() {
        let a = mat(&[&[2, 1], &[1, 1]]);
        assert!(a.mul(&a.inverse_unimodular().unwrap()).is_identity());
        assert!(mat(&[&[2]]).inverse_unimodular().is_err());
        assert_eq!(mat(&[&[0, -1], &[1, -1]]).order(12), Some(3));
    }

    proptest! {
        #[test]
        fn snf_is_correct(rows in 1usize..4, cols in 1usize..5, seed in prop::collection::vec(-4i64..5, 20)) {
            let a = IntMatrix::from_rows((0..rows).map(|i| (0..cols).map(|j| seed[i * cols + j]).collect()).collect()).unwrap();
            check_snf(&a);
            let k = integer_kernel(&a).unwrap();
            for j in 0..k.cols() {
                prop_assert!(a.apply(&k.column(j)).iter().all(|&x| x == 0));
            }
        }
    }
}
