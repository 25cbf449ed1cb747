//! Dense symmetric linear algebra for the Galerkin systems.
//!
//! The discrete problems are small (basis sizes ≤ O(100)), so a classic
//! Householder reduction + implicit-shift QL eigensolver and a pivoted
//! Cholesky for rank-revealing overlap factorization cover everything.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::tridiag::{fix_sign, EigenPairs, Normalization};

/// Dense symmetric matrix, full row-major storage kept symmetric.
#[derive(Debug, Clone)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    /// Build from an entry function evaluated on the upper triangle and
    /// mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Force symmetry on an almost-symmetric full matrix: (M + Mᵀ)/2.
    pub fn from_full_symmetrized(n: usize, full: Vec<T>) -> Result<Self> {
        if full.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {}×{} = {} entries, got {}",
                n,
                n,
                n * n,
                full.len()
            )));
        }
        let mut m = Self::zeros(n);
        let half = T::of(0.5);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = (full[i * n + j] + full[j * n + i]) * half;
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Principal submatrix on the given index set (in the given order).
    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix<T> {
        let r = idx.len();
        let mut m = SymMatrix::zeros(r);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.data[a * r + b] = self.get(i, j);
            }
        }
        m
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![T::zero(); self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut s = T::zero();
            for j in 0..self.n {
                s += row[j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    /// All eigenpairs, ascending, orthonormal vectors with deterministic sign.
    pub fn eigen_sym(&self) -> Result<EigenPairs<T>> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Shape("eigen_sym on empty matrix".into()));
        }
        // Householder reduction (tred2), accumulating the transform in z.
        let mut z = self.data.clone();
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        tred2(n, &mut z, &mut d, &mut e);
        tql2(n, &mut z, &mut d, &mut e)?;

        // Sort ascending, carrying columns along.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let values: Vec<T> = order.iter().map(|&k| d[k]).collect();
        let mut vectors = Vec::with_capacity(n);
        for &k in &order {
            let mut v: Vec<T> = (0..n).map(|row| z[row * n + k]).collect();
            fix_sign(&mut v);
            vectors.push(v);
        }
        Ok(EigenPairs {
            values,
            vectors,
            normalization: Normalization::DiscreteL2,
        })
    }

    /// Solve `A x = b` for positive definite `A` (plain Cholesky).
    pub fn cholesky_solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Shape(format!(
                "cholesky_solve: matrix is {n}×{n}, rhs has {}",
                b.len()
            )));
        }
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut s = self.get(j, j);
            for k in 0..j {
                s -= l[j * n + k] * l[j * n + k];
            }
            if s <= T::zero() {
                return Err(Error::NotCoercive(format!(
                    "non-positive pivot {s} at column {j} in Cholesky"
                )));
            }
            let ljj = s.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        let mut x = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = l[i * n + k] * x[k];
                x[i] -= t;
            }
            x[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = l[k * n + i] * x[k];
                x[i] -= t;
            }
            x[i] /= l[i * n + i];
        }
        Ok(x)
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form with
/// accumulation of the orthogonal transform (EISPACK `tred2` layout:
/// `z` row-major, transform ends up in `z`'s columns).
fn tred2<T: Real>(n: usize, z: &mut [T], d: &mut [T], e: &mut [T]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let mut scale = T::zero();
            for k in 0..=l {
                scale += z[i * n + k].abs();
            }
            if scale == T::zero() {
                e[i] = z[i * n + l];
            } else {
                for k in 0..=l {
                    z[i * n + k] /= scale;
                    h += z[i * n + k] * z[i * n + k];
                }
                let f = z[i * n + l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[i * n + l] = f - g;
                let mut f_acc = T::zero();
                for j in 0..=l {
                    z[j * n + i] = z[i * n + j] / h;
                    let mut g_acc = T::zero();
                    for k in 0..=j {
                        g_acc += z[j * n + k] * z[i * n + k];
                    }
                    for k in j + 1..=l {
                        g_acc += z[k * n + j] * z[i * n + k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * z[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let t = f * e[k] + g * z[i * n + k];
                        z[j * n + k] -= t;
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g += z[i * n + k] * z[k * n + j];
                }
                for k in 0..i {
                    let t = g * z[k * n + i];
                    z[k * n + j] -= t;
                }
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = T::one();
        for j in 0..i {
            z[j * n + i] = T::zero();
            z[i * n + j] = T::zero();
        }
    }
}

/// Implicit-shift QL on the tridiagonal (d, e) with accumulation into `z`
/// (EISPACK `tql2`).
fn tql2<T: Real>(n: usize, z: &mut [T], d: &mut [T], e: &mut [T]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = T::of(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::eps() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Numerical(format!(
                    "QL sweep failed to deflate row {l} after 64 iterations"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = pythag(g, T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Overflow-safe √(a² + b²).
fn pythag<T: Real>(a: T, b: T) -> T {
    let (a, b) = (a.abs(), b.abs());
    if a > b {
        let q = b / a;
        a * (T::one() + q * q).sqrt()
    } else if b > T::zero() {
        let q = a / b;
        b * (T::one() + q * q).sqrt()
    } else {
        T::zero()
    }
}

/// Rank-revealing factorization of a positive semi-definite matrix:
/// `S[perm[..rank], perm[..rank]] = L Lᵀ` with greedy diagonal pivoting.
#[derive(Debug, Clone)]
pub struct PivotedCholesky<T> {
    /// Full pivot order; the first `rank` indices are the retained columns.
    pub perm: Vec<usize>,
    /// Lower-triangular `rank × rank` factor, row-major.
    pub factor: Vec<T>,
    pub rank: usize,
}

impl<T: Real> PivotedCholesky<T> {
    pub fn retained(&self) -> &[usize] {
        &self.perm[..self.rank]
    }

    fn l(&self, i: usize, j: usize) -> T {
        self.factor[i * self.rank + j]
    }

    /// Solve L y = b (forward substitution) for a length-`rank` rhs.
    pub fn forward_solve(&self, b: &[T]) -> Vec<T> {
        let r = self.rank;
        let mut y = b.to_vec();
        for i in 0..r {
            for k in 0..i {
                let t = self.l(i, k) * y[k];
                y[i] -= t;
            }
            y[i] /= self.l(i, i);
        }
        y
    }

    /// Solve Lᵀ x = b (back substitution) for a length-`rank` rhs.
    pub fn back_solve(&self, b: &[T]) -> Vec<T> {
        let r = self.rank;
        let mut x = b.to_vec();
        for i in (0..r).rev() {
            for k in i + 1..r {
                let t = self.l(k, i) * x[k];
                x[i] -= t;
            }
            x[i] /= self.l(i, i);
        }
        x
    }
}

/// Greedy diagonally-pivoted Cholesky.  Stops once the largest remaining
/// pivot drops below `drop_tol` × (largest initial pivot); ties pick the
/// lowest index, so the permutation is deterministic.
pub fn pivoted_cholesky<T: Real>(s: &SymMatrix<T>, drop_tol: T) -> Result<PivotedCholesky<T>> {
    let n = s.n();
    let mut a = s.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    let mut max_init = T::zero();
    for i in 0..n {
        max_init = max_init.max(a.get(i, i));
    }
    let psd_floor = -drop_tol * max_init.max(T::one());
    for i in 0..n {
        if a.get(i, i) < psd_floor {
            return Err(Error::NotPsd(format!(
                "diagonal entry {} at index {i} is negative",
                a.get(i, i)
            )));
        }
    }
    if max_init <= T::zero() {
        return Ok(PivotedCholesky {
            perm,
            factor: Vec::new(),
            rank: 0,
        });
    }

    let threshold = drop_tol * max_init;
    let mut rank = n;
    for k in 0..n {
        // Largest remaining diagonal entry; first index wins ties.
        let mut jmax = k;
        let mut dmax = a.get(k, k);
        for j in k + 1..n {
            if a.get(j, j) > dmax {
                dmax = a.get(j, j);
                jmax = j;
            }
        }
        if dmax < psd_floor {
            return Err(Error::NotPsd(format!(
                "remaining pivot {dmax} is negative at step {k}"
            )));
        }
        if dmax < threshold {
            rank = k;
            break;
        }
        if jmax != k {
            swap_sym(&mut a, k, jmax);
            perm.swap(k, jmax);
        }
        let piv = a.get(k, k).sqrt();
        a.set(k, k, piv);
        for i in k + 1..n {
            let v = a.get(i, k) / piv;
            a.data[i * n + k] = v;
        }
        for j in k + 1..n {
            for i in j..n {
                let v = a.data[i * n + j] - a.data[i * n + k] * a.data[j * n + k];
                a.data[i * n + j] = v;
                a.data[j * n + i] = v;
            }
        }
    }

    let mut factor = vec![T::zero(); rank * rank];
    for i in 0..rank {
        for j in 0..=i {
            factor[i * rank + j] = a.data[i * n + j];
        }
    }
    Ok(PivotedCholesky { perm, factor, rank })
}

/// Swap row/column i and j of a symmetric matrix in place.
fn swap_sym<T: Real>(a: &mut SymMatrix<T>, i: usize, j: usize) {
    let n = a.n();
    for k in 0..n {
        a.data.swap(i * n + k, j * n + k);
    }
    for k in 0..n {
        a.data.swap(k * n + i, k * n + j);
    }
}

/// Generalized symmetric eigenproblem `A c = λ S c` reduced to standard form
/// on the subspace retained by the pivoted Cholesky of `S`.
///
/// Returned vectors have full length with zeros in the dropped directions and
/// satisfy cᵀ S c = 1.
#[derive(Debug, Clone)]
pub struct GenEig<T> {
    pub pairs: EigenPairs<T>,
    /// Basis indices retained by the overlap factorization.
    pub retained: Vec<usize>,
}

pub fn gen_sym_eig<T: Real>(
    a: &SymMatrix<T>,
    s: &SymMatrix<T>,
    drop_tol: T,
) -> Result<GenEig<T>> {
    let n = a.n();
    if s.n() != n {
        return Err(Error::Shape(format!(
            "gen_sym_eig: A is {n}×{n} but S is {}×{}",
            s.n(),
            s.n()
        )));
    }
    let pc = pivoted_cholesky(s, drop_tol)?;
    let r = pc.rank;
    if r == 0 {
        return Err(Error::DegenerateBasis(
            "overlap matrix has numerical rank 0".into(),
        ));
    }
    let idx = pc.retained().to_vec();
    let a_rr = a.submatrix(&idx);

    // M = L⁻¹ A L⁻ᵀ, built column by column: W = L⁻¹ A, M = L⁻¹ Wᵀ.
    let mut w = vec![T::zero(); r * r];
    for j in 0..r {
        let col: Vec<T> = (0..r).map(|i| a_rr.get(i, j)).collect();
        let y = pc.forward_solve(&col);
        for i in 0..r {
            w[i * r + j] = y[i];
        }
    }
    let mut m_full = vec![T::zero(); r * r];
    for j in 0..r {
        let col: Vec<T> = (0..r).map(|i| w[j * r + i]).collect(); // row j of W
        let y = pc.forward_solve(&col);
        for i in 0..r {
            m_full[i * r + j] = y[i];
        }
    }
    let m = SymMatrix::from_full_symmetrized(r, m_full)?;
    let reduced = m.eigen_sym()?;

    let mut vectors = Vec::with_capacity(r);
    for y in &reduced.vectors {
        let zc = pc.back_solve(y);
        let mut full = vec![T::zero(); n];
        for (pos, &orig) in idx.iter().enumerate() {
            full[orig] = zc[pos];
        }
        fix_sign(&mut full);
        vectors.push(full);
    }
    Ok(GenEig {
        pairs: EigenPairs {
            values: reduced.values,
            vectors,
            normalization: Normalization::DiscreteL2,
        },
        retained: idx,
    })
}
