//! Square integer matrices with arbitrary-size entries, column-style Hermite
//! normal form, and triangularization of unipotent matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    e: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.e[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.e[i * self.n + j]
    }
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            e: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_big_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("matrix must have at least one row"));
        }
        let mut e = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            e.extend(r);
        }
        Ok(IntMatrix { n, e })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.e.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `A^q` by repeated squaring; `A^0 = I`.
    pub fn pow(&self, mut q: u64) -> IntMatrix {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while q > 0 {
            if q & 1 == 1 {
                result = result.mul(&base);
            }
            q >>= 1;
            if q > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `A·v` for a vector over any scalar backend.
    pub fn apply<S: Scalar>(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n, "vector length differs from matrix size");
        (0..self.n)
            .map(|i| {
                let mut acc = S::zero_val();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if a.is_zero() {
                        continue;
                    }
                    acc = if a.is_one() {
                        acc.plus(x)
                    } else {
                        acc.plus(&x.scale_int(a))
                    };
                }
                acc
            })
            .collect()
    }

    pub fn minus_identity(&self) -> IntMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= 1;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        let mut m = self.clone();
        let mut sign = 1;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = v / &prev;
                }
            }
            prev = m[(k, k)].clone();
        }
        if sign < 0 {
            -prev
        } else {
            prev
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Lower triangular with ones on the diagonal.
    pub fn is_lower_unitriangular(&self) -> bool {
        (0..self.n).all(|i| {
            self[(i, i)].is_one() && (i + 1..self.n).all(|j| self[(i, j)].is_zero())
        })
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            BigRational::from_integer(self[(i, j)].clone())
                        } else if j - n == i {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or_else(|| Error::invalid("matrix is singular"))?;
            a.swap(c, p);
            let piv = a[c][c].clone();
            for x in a[c].iter_mut() {
                *x /= &piv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..2 * n {
                        let t = &f * &a[c][j];
                        a[r][j] -= t;
                    }
                }
            }
        }
        let mut inv = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let q = &a[i][n + j];
                if !q.is_integer() {
                    return Err(Error::invalid("matrix is not unimodular"));
                }
                inv[(i, j)] = q.to_integer();
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.e.swap(a * self.n + j, b * self.n + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.n {
                self.e.swap(i * self.n + a, i * self.n + b);
            }
        }
    }

    /// col_dst += c · col_src
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.n {
            let t = &self[(i, src)] * c;
            self[(i, dst)] += t;
        }
    }

    /// row_dst += c · row_src
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.n {
            let t = &self[(src, j)] * c;
            self[(dst, j)] += t;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.n {
            let t = -&self[(i, c)];
            self[(i, c)] = t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.n {
            let t = -&self[(r, j)];
            self[(r, j)] = t;
        }
    }
}

/// `(A − I)^d = 0`, i.e. every eigenvalue is 1.
pub fn is_unipotent(a: &IntMatrix) -> bool {
    a.minus_identity().pow(a.dim() as u64).is_zero()
}

/// Least `m ≤ max_m` with `A^m` unipotent.
pub fn least_unipotent_power(a: &IntMatrix, max_m: u64) -> Option<u64> {
    let mut p = a.clone();
    for m in 1..=max_m {
        if is_unipotent(&p) {
            return Some(m);
        }
        p = p.mul(a);
    }
    None
}

/// Column-style Hermite normal form `H = M·U` with `U` unimodular.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub rank: usize,
}

impl ColumnHnf {
    /// Columns of `U` spanning the integer kernel of `M` (a saturated basis).
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.u.dim())
            .map(|c| (0..self.u.dim()).map(|r| self.u[(r, c)].clone()).collect())
            .collect()
    }
}

/// Reduce `m` by unimodular column operations to lower echelon form: row by
/// row, the entries right of the current pivot column are cleared by a
/// Euclidean reduction, the pivot is made positive, and entries left of it
/// are reduced into `[0, pivot)`. Pivot candidates are chosen by smallest
/// absolute value, then lowest column index.
pub fn column_hnf(m: &IntMatrix) -> ColumnHnf {
    let n = m.dim();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(n);
    let mut u_inv = IntMatrix::identity(n);
    let mut pc = 0;

    // every column operation on H and U is mirrored by the inverse row
    // operation on U⁻¹
    let swap = |h: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, a: usize, b: usize| {
        h.swap_cols(a, b);
        u.swap_cols(a, b);
        ui.swap_rows(a, b);
    };
    let add = |h: &mut IntMatrix,
               u: &mut IntMatrix,
               ui: &mut IntMatrix,
               dst: usize,
               src: usize,
               c: &BigInt| {
        h.add_col(dst, src, c);
        u.add_col(dst, src, c);
        ui.add_row(src, dst, &-c);
    };

    for row in 0..n {
        if pc == n {
            break;
        }
        loop {
            let best = (pc..n)
                .filter(|&c| !h[(row, c)].is_zero())
                .min_by(|&a, &b| h[(row, a)].abs().cmp(&h[(row, b)].abs()).then(a.cmp(&b)));
            let Some(best) = best else { break };
            swap(&mut h, &mut u, &mut u_inv, pc, best);
            let piv = h[(row, pc)].clone();
            let mut done = true;
            for c in pc + 1..n {
                if h[(row, c)].is_zero() {
                    continue;
                }
                let q = h[(row, c)].div_floor(&piv);
                add(&mut h, &mut u, &mut u_inv, c, pc, &-q);
                if !h[(row, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(row, pc)].is_zero() {
            continue;
        }
        if h[(row, pc)].is_negative() {
            h.negate_col(pc);
            u.negate_col(pc);
            u_inv.negate_row(pc);
        }
        let piv = h[(row, pc)].clone();
        for c in 0..pc {
            let q = h[(row, c)].div_floor(&piv);
            if !q.is_zero() {
                add(&mut h, &mut u, &mut u_inv, c, pc, &-q);
            }
        }
        pc += 1;
    }
    ColumnHnf {
        h,
        u,
        u_inv,
        rank: pc,
    }
}

/// Unimodular `P` with `det P = 1` and `P⁻¹AP` lower triangular with unit
/// diagonal.
///
/// A primitive fixed vector `v` of `A` (from the saturated kernel of `A − I`)
/// completes to a unimodular basis `Q` with `v` last; in that basis `A` is
/// block lower triangular `[[A′, 0], [r, 1]]`, and `A′` is unipotent of one
/// dimension less.
pub fn unipotent_triangularize(a: &IntMatrix) -> Result<IntMatrix> {
    if !is_unipotent(a) {
        return Err(Error::NotUnipotent);
    }
    let (mut p, _) = triangularize_rec(a);
    if p.det().is_negative() {
        p.negate_col(0);
    }
    Ok(p)
}

/// Returns `(P, P⁻¹)`.
fn triangularize_rec(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let n = a.dim();
    if n == 1 {
        return (IntMatrix::identity(1), IntMatrix::identity(1));
    }
    let hnf = column_hnf(&a.minus_identity());
    debug_assert!(hnf.rank < n, "unipotent matrix has a fixed vector");
    let (q, q_inv) = (hnf.u, hnf.u_inv);
    let b = q_inv.mul(a).mul(&q);

    let mut sub = IntMatrix::zeros(n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            sub[(i, j)] = b[(i, j)].clone();
        }
    }
    let (p1, p1_inv) = triangularize_rec(&sub);
    let lift = |m: &IntMatrix| {
        let mut out = IntMatrix::identity(n);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                out[(i, j)] = m[(i, j)].clone();
            }
        }
        out
    };
    (q.mul(&lift(&p1)), lift(&p1_inv).mul(&q_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
        // product of elementary matrices with small multipliers
        let mut q = IntMatrix::identity(n);
        for _ in 0..3 * n {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            let c = BigInt::from(rng.random_range(-2..=2i64));
            q.add_row(i, j, &c);
        }
        q
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[2, 1], &[7, 4]]).det(), BigInt::from(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).det(), BigInt::zero());
        assert_eq!(
            m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]).det(),
            BigInt::from(2 * (3 - 2) - 0 + (1 - 3))
        );
    }

    #[test]
    fn powers_and_inverse() {
        let a = m(&[&[1, 0], &[1, 1]]);
        assert_eq!(a.pow(3), m(&[&[1, 0], &[3, 1]]));
        assert_eq!(a.pow(0), IntMatrix::identity(2));
        let big = m(&[&[2, 1], &[1, 1]]).pow(200);
        assert!(big[(0, 0)].bits() > 64);
        assert_eq!(big.det(), BigInt::one());
        let inv = big.inverse().unwrap();
        assert_eq!(big.mul(&inv), IntMatrix::identity(2));
        assert!(m(&[&[2, 0], &[0, 1]]).inverse().is_err());
    }

    #[test]
    fn unipotence() {
        assert!(is_unipotent(&IntMatrix::identity(3)));
        assert!(is_unipotent(&m(&[&[1, 0], &[5, 1]])));
        assert!(!is_unipotent(&m(&[&[2, 0], &[0, 1]])));
        // rotation by a quarter turn: A⁴ = I
        let r = m(&[&[0, -1], &[1, 0]]);
        assert!(!is_unipotent(&r));
        assert_eq!(least_unipotent_power(&r, 10), Some(4));
        assert_eq!(least_unipotent_power(&m(&[&[2, 1], &[1, 1]]), 10), None);
    }

    #[test]
    fn hnf_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.random_range(1..=5);
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-6..=6)).collect())
                .collect();
            let a = IntMatrix::from_rows(&rows).unwrap();
            let hnf = column_hnf(&a);
            assert_eq!(a.mul(&hnf.u), hnf.h);
            assert_eq!(hnf.u.mul(&hnf.u_inv), IntMatrix::identity(n));
            for v in hnf.kernel_basis() {
                let av = a.apply(&v.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>());
                assert!(av.iter().all(|x| x.is_zero()));
            }
            for c in hnf.rank..n {
                assert!((0..n).all(|r| hnf.h[(r, c)].is_zero()));
            }
        }
    }

    #[test]
    fn triangularize_examples() {
        assert_eq!(
            unipotent_triangularize(&IntMatrix::identity(1)).unwrap(),
            IntMatrix::identity(1)
        );
        let l = m(&[&[1, 0, 0], &[4, 1, 0], &[-2, 7, 1]]);
        let p = unipotent_triangularize(&l).unwrap();
        assert!(p.inverse().unwrap().mul(&l).mul(&p).is_lower_unitriangular());
        assert!(matches!(
            unipotent_triangularize(&m(&[&[2, 1], &[1, 1]])),
            Err(Error::NotUnipotent)
        ));
    }

    #[test]
    fn triangularize_random_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(1..=5);
            let mut l = IntMatrix::identity(n);
            for i in 0..n {
                for j in 0..i {
                    l[(i, j)] = BigInt::from(rng.random_range(-5..=5i64));
                }
            }
            let q = random_unimodular(&mut rng, n);
            let a = q.mul(&l).mul(&q.inverse().unwrap());
            let p = unipotent_triangularize(&a).unwrap();
            assert_eq!(p.det(), BigInt::one());
            assert!(p.inverse().unwrap().mul(&a).mul(&p).is_lower_unitriangular());
        }
    }
}
