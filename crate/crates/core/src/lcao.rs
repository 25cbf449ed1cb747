//! Atom-centered Hermite–Gaussian basis: pointwise evaluation, Galerkin
//! assembly over the quadrature grid, and the discrete source / eigenvalue
//! solves.
//!
//! The basis functions are orthonormal Hermite functions translated to the
//! nuclear positions, χ_μ(x) = h_n(x − c_k).  Because −½h_n″(y) =
//! (n + ½ − y²/2)·h_n(y), the operator applies to a basis function without
//! any numerical differentiation, so residuals are available pointwise in
//! closed form.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{gen_sym_eig, pivoted_cholesky, SymMatrix};
use crate::model::MolecularSystem;
use crate::num::Real;

/// Relative pivot threshold used by default when factorizing the overlap
/// matrix; directions below this are treated as numerically dependent.
pub fn overlap_drop_tol<T: Real>() -> T {
    T::of(1e-8)
}

/// Basis functions should have decayed below this magnitude at the ends of
/// the quadrature box, otherwise the assembled matrices are untrustworthy.
pub fn boundary_decay_tol<T: Real>() -> T {
    T::of(1e-14)
}

/// First `n` orthonormal Hermite functions h_0, …, h_{n−1} evaluated at `x`,
/// by the upward recurrence
/// h_{k+1}(x) = x·√(2/(k+1))·h_k(x) − √(k/(k+1))·h_{k−1}(x),
/// seeded with h_0(x) = π^{−1/4} e^{−x²/2}.
pub fn hermite_functions<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut h = Vec::with_capacity(n);
    if n == 0 {
        return h;
    }
    let h0 = (-x * x * T::of(0.5)).exp() * T::of(std::f64::consts::PI).powf(T::of(-0.25));
    h.push(h0);
    if n == 1 {
        return h;
    }
    h.push(x * T::SQRT_2() * h0);
    for k in 1..n - 1 {
        let kf = T::of(k as f64);
        let next = x * (T::of(2.0) / (kf + T::one())).sqrt() * h[k]
            - (kf / (kf + T::one())).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Single Hermite function h_n(x).
pub fn hermite_function<T: Real>(n: usize, x: T) -> T {
    hermite_functions(n + 1, x)[n]
}

/// Derivatives h′_0, …, h′_{n−1} at `x` from already-evaluated values,
/// via h′_k(x) = √(2k)·h_{k−1}(x) − x·h_k(x).
pub fn hermite_derivatives<T: Real>(h: &[T], x: T) -> Vec<T> {
    let mut d = Vec::with_capacity(h.len());
    for (k, &hk) in h.iter().enumerate() {
        let lower = if k == 0 {
            T::zero()
        } else {
            (T::of(2.0) * T::of(k as f64)).sqrt() * h[k - 1]
        };
        d.push(lower - x * hk);
    }
    d
}

/// Atom-centered basis: a list of (center, number of functions) blocks, in
/// enumeration order.  Basis function μ is h_n(x − c) where (c, n) =
/// `function(μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AOBasis<T> {
    pub atoms: Vec<(T, usize)>,
}

impl<T: Real> AOBasis<T> {
    pub fn new(atoms: Vec<(T, usize)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Config("basis needs at least one atom".into()));
        }
        for &(_, n) in &atoms {
            if n == 0 {
                return Err(Error::Config(
                    "every atom needs at least one basis function".into(),
                ));
            }
        }
        Ok(AOBasis { atoms })
    }

    /// Two blocks of sizes `n1`, `n2` on the nuclei of `sys`.
    pub fn diatomic(sys: &MolecularSystem<T>, n1: usize, n2: usize) -> Result<Self> {
        Self::new(vec![(sys.center(0), n1), (sys.center(1), n2)])
    }

    /// One block of `n` functions centered at `center`.
    pub fn single(center: T, n: usize) -> Result<Self> {
        Self::new(vec![(center, n)])
    }

    pub fn size(&self) -> usize {
        self.atoms.iter().map(|&(_, n)| n).sum()
    }

    /// (center, degree) of basis function `mu` in enumeration order.
    pub fn function(&self, mu: usize) -> (T, usize) {
        let mut offset = 0;
        for &(c, n) in &self.atoms {
            if mu < offset + n {
                return (c, mu - offset);
            }
            offset += n;
        }
        panic!("basis index {mu} out of range (size {})", self.size());
    }

    pub fn eval(&self, mu: usize, x: T) -> T {
        let (c, deg) = self.function(mu);
        hermite_function(deg, x - c)
    }

    /// Evaluate every basis function at every grid node; row μ holds χ_μ on
    /// the grid.  One recurrence pass per atom per node.
    pub fn eval_on_grid(&self, grid: &Grid<T>) -> Vec<Vec<T>> {
        let n_pts = grid.n_points();
        let size = self.size();
        let mut rows = vec![vec![T::zero(); n_pts]; size];
        for (i, &x) in grid.points().iter().enumerate() {
            let mut offset = 0;
            for &(c, n) in &self.atoms {
                let h = hermite_functions(n, x - c);
                for (k, &v) in h.iter().enumerate() {
                    rows[offset + k][i] = v;
                }
                offset += n;
            }
        }
        rows
    }
}

/// (A χ)(x) for χ = h_degree(x − center): the oscillator identity turns
/// −½χ″ into (degree + ½ − y²/2)·χ, and the multiplicative part is
/// V(x) + ς.
pub fn apply_a_to_basis<T: Real>(
    sys: &MolecularSystem<T>,
    center: T,
    degree: usize,
    x: T,
) -> T {
    let y = x - center;
    let h = hermite_function(degree, y);
    operator_symbol(sys, degree, y, sys.potential_total(x)) * h
}

/// The scalar factor (n + ½ − y²/2 + V + ς) multiplying h_n(y) in (Aχ)(x).
fn operator_symbol<T: Real>(sys: &MolecularSystem<T>, degree: usize, y: T, v_at_x: T) -> T {
    T::of(degree as f64) + T::of(0.5) - y * y * T::of(0.5) + v_at_x + sys.sigma
}

/// Sampled basis rows and operator-applied rows on the grid: returns
/// (χ_μ(x_i), (Aχ_μ)(x_i)).
fn sampled_basis_and_operator<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
    basis: &AOBasis<T>,
) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let b = basis.eval_on_grid(grid);
    let size = basis.size();
    let n_pts = grid.n_points();
    let v: Vec<T> = grid.points().iter().map(|&x| sys.potential_total(x)).collect();
    let mut ab = vec![vec![T::zero(); n_pts]; size];
    for mu in 0..size {
        let (c, deg) = basis.function(mu);
        for (i, &x) in grid.points().iter().enumerate() {
            ab[mu][i] = operator_symbol(sys, deg, x - c, v[i]) * b[mu][i];
        }
    }
    (b, ab)
}

/// Galerkin matrices of the operator and the overlap in the atomic basis,
/// assembled with the grid's trapezoid quadrature.
#[derive(Debug, Clone)]
pub struct GalerkinMatrices<T> {
    pub a_chi: SymMatrix<T>,
    pub s_chi: SymMatrix<T>,
    pub basis: AOBasis<T>,
    /// Largest basis-function magnitude seen at the two box endpoints; if it
    /// exceeds `boundary_decay_tol` the quadrature box is too small.
    pub max_boundary_value: T,
}

pub fn assemble_galerkin<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
    basis: &AOBasis<T>,
) -> Result<GalerkinMatrices<T>> {
    let (b, ab) = sampled_basis_and_operator(grid, sys, basis);
    let size = basis.size();
    let n_pts = grid.n_points();

    let mut max_boundary = T::zero();
    for row in &b {
        max_boundary = max_boundary.max(row[0].abs()).max(row[n_pts - 1].abs());
    }
    if max_boundary > boundary_decay_tol::<T>() {
        log::warn!(
            "basis not decayed at quadrature box ends (max endpoint value {max_boundary}); \
             enlarge the box"
        );
    }

    let mut s = SymMatrix::zeros(size);
    for i in 0..size {
        for j in i..size {
            let v = grid.quad_inner(&b[i], &b[j])?;
            s.set(i, j, v);
        }
    }
    let mut a_full = vec![T::zero(); size * size];
    for i in 0..size {
        for j in 0..size {
            a_full[i * size + j] = grid.quad_inner(&b[i], &ab[j])?;
        }
    }
    let a = SymMatrix::from_full_symmetrized(size, a_full)?;

    Ok(GalerkinMatrices {
        a_chi: a,
        s_chi: s,
        basis: basis.clone(),
        max_boundary_value: max_boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Source,
    Eigen,
}

/// A discrete solution in the atomic basis.  Coefficients of functions
/// dropped by the overlap factorization are zero.
#[derive(Debug, Clone)]
pub struct DiscreteSolution<T> {
    pub kind: SolutionKind,
    pub basis: AOBasis<T>,
    pub coefficients: Vec<T>,
    /// Basis indices retained by the overlap factorization.
    pub retained: Vec<usize>,
    /// Discrete eigenvalue λ_{iN} (eigen solves only).
    pub lambda: Option<T>,
    /// The next discrete eigenvalue λ_{i+1,N} (eigen solves only).
    pub lambda_next: Option<T>,
}

impl<T: Real> DiscreteSolution<T> {
    pub fn eval(&self, x: T) -> T {
        let mut acc = T::zero();
        let mut offset = 0;
        for &(c, n) in &self.basis.atoms {
            let h = hermite_functions(n, x - c);
            for (k, &v) in h.iter().enumerate() {
                acc += self.coefficients[offset + k] * v;
            }
            offset += n;
        }
        acc
    }

    pub fn eval_on_grid(&self, grid: &Grid<T>) -> Vec<T> {
        grid.points().iter().map(|&x| self.eval(x)).collect()
    }

    /// Analytic derivative u′_N on the grid via h′_n = √(2n)h_{n−1} − y·h_n.
    pub fn derivative_on_grid(&self, grid: &Grid<T>) -> Vec<T> {
        grid.points()
            .iter()
            .map(|&x| {
                let mut acc = T::zero();
                let mut offset = 0;
                for &(c, n) in &self.basis.atoms {
                    let y = x - c;
                    let h = hermite_functions(n, y);
                    let d = hermite_derivatives(&h, y);
                    for (k, &v) in d.iter().enumerate() {
                        acc += self.coefficients[offset + k] * v;
                    }
                    offset += n;
                }
                acc
            })
            .collect()
    }

    /// Flip the global sign so that ⟨reference, u_N⟩ ≥ 0 over the grid.
    pub fn align_sign_to(&mut self, grid: &Grid<T>, reference: &[T]) -> Result<()> {
        let u = self.eval_on_grid(grid);
        if grid.quad_inner(reference, &u)? < T::zero() {
            for c in &mut self.coefficients {
                *c = -*c;
            }
        }
        Ok(())
    }
}

/// Load vector ⟨χ_μ, f⟩ for a grid-sampled source.
pub fn basis_inner_products<T: Real>(
    grid: &Grid<T>,
    basis: &AOBasis<T>,
    f: &[T],
) -> Result<Vec<T>> {
    let rows = basis.eval_on_grid(grid);
    rows.iter().map(|row| grid.quad_inner(row, f)).collect()
}

/// L²-projection coefficients of a source: solve S f^χ = ⟨χ, f⟩ on the
/// retained subspace of the overlap factorization, zeros elsewhere.
pub fn source_projection<T: Real>(
    mats: &GalerkinMatrices<T>,
    load: &[T],
    drop_tol: T,
) -> Result<Vec<T>> {
    let n = mats.basis.size();
    if load.len() != n {
        return Err(Error::Shape(format!(
            "load vector has {} entries, basis has {n}",
            load.len()
        )));
    }
    let pc = pivoted_cholesky(&mats.s_chi, drop_tol)?;
    if pc.rank == 0 {
        return Err(Error::DegenerateBasis(
            "overlap matrix has numerical rank 0".into(),
        ));
    }
    let idx = pc.retained();
    let rhs: Vec<T> = idx.iter().map(|&i| load[i]).collect();
    let y = pc.forward_solve(&rhs);
    let sol = pc.back_solve(&y);
    let mut full = vec![T::zero(); n];
    for (pos, &orig) in idx.iter().enumerate() {
        full[orig] = sol[pos];
    }
    Ok(full)
}

/// Solve the discrete source problem A^χ a = S^χ f^χ on the subspace the
/// overlap factorization retains; `f_chi` are L²-projection coefficients of
/// the source (see [`source_projection`]).
pub fn galerkin_source_solve<T: Real>(
    mats: &GalerkinMatrices<T>,
    f_chi: &[T],
    drop_tol: T,
) -> Result<DiscreteSolution<T>> {
    let n = mats.basis.size();
    if f_chi.len() != n {
        return Err(Error::Shape(format!(
            "projection vector has {} entries, basis has {n}",
            f_chi.len()
        )));
    }
    let pc = pivoted_cholesky(&mats.s_chi, drop_tol)?;
    if pc.rank == 0 {
        return Err(Error::DegenerateBasis(
            "overlap matrix has numerical rank 0".into(),
        ));
    }
    let idx = pc.retained().to_vec();
    let rhs_full = mats.s_chi.matvec(f_chi);
    let rhs: Vec<T> = idx.iter().map(|&i| rhs_full[i]).collect();
    let a_rr = mats.a_chi.submatrix(&idx);
    let sol_r = a_rr.cholesky_solve(&rhs)?;
    let mut coefficients = vec![T::zero(); n];
    for (pos, &orig) in idx.iter().enumerate() {
        coefficients[orig] = sol_r[pos];
    }
    Ok(DiscreteSolution {
        kind: SolutionKind::Source,
        basis: mats.basis.clone(),
        coefficients,
        retained: idx,
        lambda: None,
        lambda_next: None,
    })
}

/// Solve the discrete eigenvalue problem and return the `i`-th pair
/// (1-based) together with the next eigenvalue.  The eigenvector is
/// S-normalized, which for quadrature-consistent S means ‖u_N‖_{L²} = 1 in
/// the grid inner product.
pub fn galerkin_eig_solve<T: Real>(
    mats: &GalerkinMatrices<T>,
    i: usize,
    drop_tol: T,
) -> Result<DiscreteSolution<T>> {
    if i == 0 {
        return Err(Error::Config("eigenvalue index is 1-based".into()));
    }
    let ge = gen_sym_eig(&mats.a_chi, &mats.s_chi, drop_tol)?;
    if ge.pairs.values.len() < i + 1 {
        return Err(Error::DegenerateBasis(format!(
            "need {} independent basis functions for eigenvalue {i} and its successor, \
             overlap factorization retained only {}",
            i + 1,
            ge.pairs.values.len()
        )));
    }
    Ok(DiscreteSolution {
        kind: SolutionKind::Eigen,
        basis: mats.basis.clone(),
        coefficients: ge.pairs.vectors[i - 1].clone(),
        retained: ge.retained,
        lambda: Some(ge.pairs.values[i - 1]),
        lambda_next: Some(ge.pairs.values[i]),
    })
}

/// The manufactured source whose atomic pieces are first excited Hermite
/// functions: f = Σ_k (−½Δ + V_k + ς_k) h_1(· − c_k), available in closed
/// form through the oscillator identity.
pub fn source_term_eval<T: Real>(sys: &MolecularSystem<T>, x: T) -> T {
    let mut total = T::zero();
    for k in 0..2 {
        let y = x - sys.center(k);
        let factor = T::of(1.5) - y * y * T::of(0.5)
            + sys.atomic_potential(k, x)
            + sys.atomic_shift(k);
        total += factor * hermite_function(1, y);
    }
    total
}

/// Pointwise strong residual: f − A u_N for source solutions (pass the
/// analytic source), λ u_N − A u_N for eigenpairs (pass nothing).
pub fn residual_eval<T: Real>(
    sys: &MolecularSystem<T>,
    sol: &DiscreteSolution<T>,
    f: Option<&dyn Fn(T) -> T>,
    x: T,
) -> Result<T> {
    let mut au = T::zero();
    let mut u = T::zero();
    let mut offset = 0;
    let v = sys.potential_total(x);
    for &(c, n) in &sol.basis.atoms {
        let y = x - c;
        let h = hermite_functions(n, y);
        for (k, &hv) in h.iter().enumerate() {
            let coeff = sol.coefficients[offset + k];
            u += coeff * hv;
            au += coeff * operator_symbol(sys, k, y, v) * hv;
        }
        offset += n;
    }
    match (sol.kind, f) {
        (SolutionKind::Source, Some(f)) => Ok(f(x) - au),
        (SolutionKind::Source, None) => Err(Error::Config(
            "source residual needs the analytic source term".into(),
        )),
        (SolutionKind::Eigen, None) => {
            let lambda = sol
                .lambda
                .ok_or_else(|| Error::Config("eigen solution is missing its eigenvalue".into()))?;
            Ok(lambda * u - au)
        }
        (SolutionKind::Eigen, Some(_)) => Err(Error::Config(
            "eigen residual takes no source term".into(),
        )),
    }
}

/// Strong residual sampled on the whole grid; `f_grid` must be the source
/// sampled on the same grid for source solutions and absent for eigenpairs.
pub fn residual_on_grid<T: Real>(
    sys: &MolecularSystem<T>,
    sol: &DiscreteSolution<T>,
    grid: &Grid<T>,
    f_grid: Option<&[T]>,
) -> Result<Vec<T>> {
    let (b, ab) = sampled_basis_and_operator(grid, sys, &sol.basis);
    let n_pts = grid.n_points();
    let mut au = vec![T::zero(); n_pts];
    for (mu, row) in ab.iter().enumerate() {
        let c = sol.coefficients[mu];
        for i in 0..n_pts {
            au[i] += c * row[i];
        }
    }
    match (sol.kind, f_grid) {
        (SolutionKind::Source, Some(f)) => {
            if f.len() != n_pts {
                return Err(Error::Shape(format!(
                    "source has {} samples, grid has {n_pts}",
                    f.len()
                )));
            }
            Ok((0..n_pts).map(|i| f[i] - au[i]).collect())
        }
        (SolutionKind::Source, None) => Err(Error::Config(
            "source residual needs the sampled source term".into(),
        )),
        (SolutionKind::Eigen, None) => {
            let lambda = sol
                .lambda
                .ok_or_else(|| Error::Config("eigen solution is missing its eigenvalue".into()))?;
            let mut u = vec![T::zero(); n_pts];
            for (mu, row) in b.iter().enumerate() {
                let c = sol.coefficients[mu];
                for i in 0..n_pts {
                    u[i] += c * row[i];
                }
            }
            Ok((0..n_pts).map(|i| lambda * u[i] - au[i]).collect())
        }
        (SolutionKind::Eigen, Some(_)) => Err(Error::Config(
            "eigen residual takes no source term".into(),
        )),
    }
}
