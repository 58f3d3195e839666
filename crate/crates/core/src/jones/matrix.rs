//! Small dense matrices over [`Laurent`], and the crossing / cup / cap maps.

use std::fmt;
use std::sync::OnceLock;

use crate::laurent::{Laurent, LaurentError};

#[derive(Clone, PartialEq, Eq)]
pub struct LMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Laurent>,
}

impl LMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Laurent::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Laurent::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Laurent>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn column(v: &[Laurent]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn row(v: &[Laurent]) -> Self {
        Self { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Laurent {
        &self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: Laurent) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j].add_assign_ref(&a.checked_mul(b)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; the left factor indexes the more significant digit.
    pub fn kron(&self, other: &Self) -> Result<Self, LaurentError> {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = a.checked_mul(other.get(k, l))?;
                        out.set(i * other.rows + k, j * other.cols + l, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Laurent) -> Result<Self, LaurentError> {
        let data = self.data.iter().map(|x| x.checked_mul(s)).collect::<Result<_, _>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// When `self = s * other` for a Laurent scalar `s`, returns `s`.
    pub fn ratio_to(&self, other: &Self) -> Option<Laurent> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        let (i, b) = other.data.iter().enumerate().find(|(_, b)| !b.is_zero())?;
        let s = self.data[i].div_exact(b).ok()?;
        (other.scale(&s).ok()? == *self).then_some(s)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for r in (0..self.rows).filter(|&r| r != skip_r) {
            for c in (0..self.cols).filter(|&c| c != skip_c) {
                data.push(self.get(r, c).clone());
            }
        }
        Self { rows: self.rows - 1, cols: self.cols - 1, data }
    }

    /// Cofactor expansion along the first row.
    pub fn det(&self) -> Result<Laurent, LaurentError> {
        assert_eq!(self.rows, self.cols);
        if self.rows == 1 {
            return Ok(self.data[0].clone());
        }
        let mut acc = Laurent::zero();
        for c in 0..self.cols {
            let a = self.get(0, c);
            if a.is_zero() {
                continue;
            }
            let term = a.checked_mul(&self.minor(0, c).det()?)?;
            acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        Ok(acc)
    }

    /// Exact inverse via the adjugate; requires the determinant to divide
    /// every cofactor in the Laurent ring.
    pub fn inverse(&self) -> Result<Self, LaurentError> {
        let n = self.rows;
        let det = self.det()?;
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut cof = self.minor(r, c).det()?;
                if (r + c) % 2 == 1 {
                    cof = -&cof;
                }
                out.set(c, r, cof.div_exact(&det)?);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for LMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The crossing, cup and cap maps on `V = C²`. Basis of `V⊗V` is
/// `00, 01, 10, 11` with the left strand as the first digit; matrices act on
/// column vectors (row = output).
#[derive(Clone, Debug)]
pub struct RMatrixSet {
    pub r: LMatrix,
    pub r_inv: LMatrix,
    pub cup: [Laurent; 4],
    pub cap: [Laurent; 4],
}

impl RMatrixSet {
    pub const DIM: usize = 2;

    pub fn cup_matrix(&self) -> LMatrix {
        LMatrix::column(&self.cup)
    }

    pub fn cap_matrix(&self) -> LMatrix {
        LMatrix::row(&self.cap)
    }

    /// `(cap⊗id)(id⊗cup)` and `(id⊗cap)(cup⊗id)`, both 2×2.
    pub fn zigzags(&self) -> Result<(LMatrix, LMatrix), LaurentError> {
        let id = LMatrix::identity(2);
        let left = self.cap_matrix().kron(&id)?.mul(&id.kron(&self.cup_matrix())?)?;
        let right = id.kron(&self.cap_matrix())?.mul(&self.cup_matrix().kron(&id)?)?;
        Ok((left, right))
    }

    /// A kink on one strand, `(id⊗cap)(X⊗id)(id⊗cup)`, for `X = R` or `R⁻¹`.
    pub fn kink(&self, positive: bool) -> Result<LMatrix, LaurentError> {
        let id = LMatrix::identity(2);
        let x = if positive { &self.r } else { &self.r_inv };
        id.kron(&self.cap_matrix())?.mul(&x.kron(&id)?)?.mul(&id.kron(&self.cup_matrix())?)
    }

    /// `R` turned a quarter: `(cap⊗id⊗id)(id⊗R⊗id)(id⊗id⊗cup)`.
    pub fn rotated_r(&self) -> Result<LMatrix, LaurentError> {
        let id = LMatrix::identity(2);
        let id4 = LMatrix::identity(4);
        self.cap_matrix().kron(&id4)?.mul(&id.kron(&self.r)?.kron(&id)?)?.mul(&id4.kron(&self.cup_matrix())?)
    }

    /// Value of a closed unknotted circle.
    pub fn loop_value(&self) -> Result<Laurent, LaurentError> {
        let mut acc = Laurent::zero();
        for (a, b) in self.cap.iter().zip(&self.cup) {
            acc.add_assign_ref(&a.checked_mul(b)?);
        }
        Ok(acc)
    }
}

fn q(c: i64, half_exp: i32) -> Laurent {
    Laurent::monomial(c, half_exp)
}

/// The Jones `R`-matrix with its exact inverse, and the cup/cap pair that
/// makes `R = q^(1/2)·I + q·(cup·cap)`.
pub fn standard_rmatrix() -> &'static RMatrixSet {
    static SET: OnceLock<RMatrixSet> = OnceLock::new();
    SET.get_or_init(|| {
        let z = Laurent::zero;
        let r = LMatrix::from_rows(vec![
            vec![q(1, 1), z(), z(), z()],
            vec![z(), z(), q(1, 2), z()],
            vec![z(), q(1, 2), &q(1, 1) - &q(1, 3), z()],
            vec![z(), z(), z(), q(1, 1)],
        ]);
        let r_inv = r.inverse().expect("R has a monomial determinant");
        RMatrixSet { r, r_inv, cup: [z(), q(-1, -1), q(1, 0), z()], cap: [z(), q(1, 0), q(-1, 1), z()] }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_entries() {
        let m = standard_rmatrix();
        assert_eq!(m.r.get(0, 0).to_string(), "q^(1/2)");
        assert_eq!(m.r.get(2, 2).to_string(), "q^(1/2)-q^(3/2)");
        assert_eq!(m.r.get(1, 2).to_string(), "q");
        assert_eq!(m.r.det().unwrap().to_string(), "-q^3");
    }

    #[test]
    fn inverse_is_exact() {
        let m = standard_rmatrix();
        assert_eq!(m.r.mul(&m.r_inv).unwrap(), LMatrix::identity(4));
        assert_eq!(m.r_inv.mul(&m.r).unwrap(), LMatrix::identity(4));
    }

    #[test]
    fn kron_and_ratio() {
        let a = LMatrix::identity(2).kron(&LMatrix::identity(2)).unwrap();
        assert_eq!(a, LMatrix::identity(4));
        let s = q(-3, 5);
        assert_eq!(a.scale(&s).unwrap().ratio_to(&a), Some(s));
    }
}
