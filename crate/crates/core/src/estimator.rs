//! Guaranteed a posteriori error bounds.
//!
//! The residual is split by the partition of unity into two atomic pieces
//! and a far-field piece.  Each atomic piece is measured in the dual norm of
//! its shifted single-atom operator through a truncated spectral expansion
//! (which gives two-sided, monotone-in-J enclosures), the far piece through
//! one solve with the shifted free operator.  The pieces combine with the
//! partition constant C into bounds for the source problem and, with a
//! lower bound on the next eigenvalue, for eigenvalue problems.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::lcao::{residual_on_grid, DiscreteSolution, SolutionKind};
use crate::model::{
    assemble_atomic_operator, assemble_far_operator, weyl_lower_bound, MolecularSystem,
    ReferenceSolution, Subdomain,
};
use crate::num::Real;
use crate::partition::{constant_big_c, constant_c_a, CaMode, PartitionOfUnity};
use crate::tridiag::SymTridiag;

/// Lowest eigenpairs of one localized operator, continuum-normalized on the
/// grid.  `values` holds one more eigenvalue than the expansion uses; the
/// extra one caps the spectral remainder.
#[derive(Debug, Clone)]
pub struct SpectralBasis<T> {
    pub sub: Subdomain<T>,
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

impl<T: Real> SpectralBasis<T> {
    /// Number of modes used in the captured part of the expansion.
    pub fn j_modes(&self) -> usize {
        self.values.len() - 1
    }

    /// The same basis truncated to `j_modes` captured modes (plus the tail
    /// eigenvalue), for studying convergence in the truncation degree without
    /// re-diagonalizing.
    pub fn truncated(&self, j_modes: usize) -> Result<SpectralBasis<T>> {
        if j_modes == 0 || j_modes > self.j_modes() {
            return Err(Error::Config(format!(
                "cannot truncate a {}-mode spectral basis to {j_modes} modes",
                self.j_modes()
            )));
        }
        Ok(SpectralBasis {
            sub: self.sub.clone(),
            values: self.values[..=j_modes].to_vec(),
            vectors: self.vectors[..=j_modes].to_vec(),
        })
    }
}

/// Diagonalize the atom-`k` operator on its ball and keep the lowest
/// `j_modes` + 1 eigenpairs.
pub fn atomic_spectral_basis<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
    k: usize,
    radius: T,
    j_modes: usize,
) -> Result<SpectralBasis<T>> {
    if j_modes == 0 {
        return Err(Error::Config("spectral expansion needs at least one mode".into()));
    }
    let sub = Subdomain::new(grid, sys.center(k), radius)?;
    if sub.n_interior() < j_modes + 1 {
        return Err(Error::Config(format!(
            "subdomain has {} interior nodes, fewer than the {} spectral modes requested",
            sub.n_interior(),
            j_modes + 1
        )));
    }
    let op = assemble_atomic_operator(grid, &sub, sys.charge(k), sys.alpha, sys.atomic_shift(k))?;
    let pairs = op.eigen_lowest(j_modes + 1)?.into_continuum(grid.h());
    if !(pairs.values[0] > T::zero()) {
        return Err(Error::NotCoercive(format!(
            "atomic operator {k} has lowest eigenvalue {}",
            pairs.values[0]
        )));
    }
    Ok(SpectralBasis {
        sub,
        values: pairs.values,
        vectors: pairs.vectors,
    })
}

/// Two-sided enclosure of a localized dual norm ‖w‖²_{A_k⁻¹}.
#[derive(Debug, Clone, Copy)]
pub struct DualNormParts<T> {
    /// Captured part Σ_{j≤J} ⟨w, ψ_j⟩²/ε_j — a lower bound.
    pub lower: T,
    /// Captured part plus remainder/ε — an upper bound.
    pub upper: T,
    /// L²-mass of w not captured by the expansion, clipped at zero.
    pub remainder: T,
}

/// Enclose ‖w‖²_{A_k⁻¹} for a full-grid `w` supported on the ball of
/// `spect`.  With `remainder_last_kept` the remainder is divided by the last
/// kept eigenvalue ε_J instead of ε_{J+1} (a marginally looser but
/// historically common variant).
pub fn partial_dual_norm<T: Real>(
    grid: &Grid<T>,
    spect: &SpectralBasis<T>,
    w_full: &[T],
    remainder_last_kept: bool,
) -> Result<DualNormParts<T>> {
    if w_full.len() != grid.n_points() {
        return Err(Error::Shape(format!(
            "weighted residual has {} samples, grid has {}",
            w_full.len(),
            grid.n_points()
        )));
    }
    let h = grid.h();
    let w_loc = spect.sub.slice(w_full);
    let w_int = &w_loc[1..w_loc.len() - 1];
    let j = spect.j_modes();

    let mut norm_sq = T::zero();
    for &v in w_int {
        norm_sq += v * v;
    }
    norm_sq *= h;

    let mut captured = T::zero();
    let mut coeff_mass = T::zero();
    for jj in 0..j {
        let psi = &spect.vectors[jj];
        let mut c = T::zero();
        for (wv, pv) in w_int.iter().zip(psi.iter()) {
            c += *wv * *pv;
        }
        c *= h;
        captured += c * c / spect.values[jj];
        coeff_mass += c * c;
    }
    let remainder = (norm_sq - coeff_mass).max(T::zero());
    let eps_tail = if remainder_last_kept {
        spect.values[j - 1]
    } else {
        spect.values[j]
    };
    Ok(DualNormParts {
        lower: captured,
        upper: captured + remainder / eps_tail,
        remainder,
    })
}

/// Far-field dual term ⟨w, (−½Δ + ς₃)⁻¹ w⟩ for a full-grid `w`, through one
/// Dirichlet solve on the box.
pub fn far_field_dual_term<T: Real>(
    grid: &Grid<T>,
    far_op: &SymTridiag<T>,
    w_full: &[T],
) -> Result<T> {
    let n = grid.n_points();
    if w_full.len() != n {
        return Err(Error::Shape(format!(
            "weighted residual has {} samples, grid has {n}",
            w_full.len()
        )));
    }
    let w_int = &w_full[1..n - 1];
    let v = far_op.solve(w_int)?;
    let mut acc = T::zero();
    for (wv, vv) in w_int.iter().zip(v.iter()) {
        acc += *wv * *vv;
    }
    Ok((acc * grid.h()).max(T::zero()))
}

/// How the lower bound for the next eigenvalue is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// Use the next discrete eigenvalue λ_{i+1,N} itself (not guaranteed —
    /// discrete eigenvalues sit above the exact ones).
    NonGuaranteed,
    /// Sum of single-atom eigenvalues with half the kinetic energy each — a
    /// fully computable guaranteed lower bound.
    Weyl,
    /// A trusted reference eigenvalue supplied from outside.
    Oracle,
}

/// Spectral-gap constants entering the eigenvalue bounds.
#[derive(Debug, Clone, Copy)]
pub struct GapData<T> {
    pub lambda_in: T,
    pub lambda_lower_next: T,
    /// γ = (1 − λ_{iN}/λ̲)².
    pub gamma: T,
    /// γ̂ = γ·λ̲.
    pub gamma_hat: T,
    pub mode: GapMode,
}

pub fn gap_constants<T: Real>(
    lambda_in: T,
    lambda_lower_next: T,
    mode: GapMode,
) -> Result<GapData<T>> {
    if !(lambda_lower_next > T::zero()) {
        return Err(Error::NotCoercive(format!(
            "next-eigenvalue lower bound {lambda_lower_next} is not positive"
        )));
    }
    if lambda_in >= lambda_lower_next {
        return Err(Error::GapViolation(format!(
            "discrete eigenvalue {lambda_in} does not sit below the next-eigenvalue \
             lower bound {lambda_lower_next}; the gap constants are undefined"
        )));
    }
    let ratio = T::one() - lambda_in / lambda_lower_next;
    let gamma = ratio * ratio;
    Ok(GapData {
        lambda_in,
        lambda_lower_next,
        gamma,
        gamma_hat: gamma * lambda_lower_next,
        mode,
    })
}

/// Produce λ̲, the lower bound for the eigenvalue after `sol.lambda`, in the
/// requested mode.  `oracle` supplies the trusted value for `GapMode::Oracle`.
pub fn lower_bound_next_eigenvalue<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
    sol: &DiscreteSolution<T>,
    mode: GapMode,
    oracle: Option<T>,
) -> Result<T> {
    match mode {
        GapMode::NonGuaranteed => sol.lambda_next.ok_or_else(|| {
            Error::Config("discrete solution has no next eigenvalue".into())
        }),
        GapMode::Weyl => weyl_lower_bound(grid, sys),
        GapMode::Oracle => {
            oracle.ok_or_else(|| Error::Config("oracle gap mode needs a reference eigenvalue".into()))
        }
    }
}

/// Localized residual indicators η₁², η₂² (atomic upper bounds) and η₃²
/// (far field), with their sum r̃².
#[derive(Debug, Clone, Copy)]
pub struct LocalIndicators<T> {
    pub eta_sq: [T; 3],
    pub r_tilde_sq: T,
}

/// Everything reusable across a basis-size sweep at fixed model parameters:
/// partition, constants, spectral bases, far operator.
#[derive(Debug, Clone)]
pub struct EstimatorContext<T> {
    pub sys: MolecularSystem<T>,
    pub pu: PartitionOfUnity<T>,
    pub c_a: T,
    pub big_c: T,
    pub spectral: [SpectralBasis<T>; 2],
    far_op: SymTridiag<T>,
    sqrt_p: [Vec<T>; 3],
    remainder_last_kept: bool,
}

impl<T: Real> EstimatorContext<T> {
    pub fn new(
        grid: &Grid<T>,
        sys: &MolecularSystem<T>,
        ell: T,
        j_modes: usize,
        remainder_last_kept: bool,
        ca_mode: CaMode,
        lambda_1_ref: Option<T>,
    ) -> Result<Self> {
        let pu = PartitionOfUnity::new(sys.r, ell)?;
        let c_a = constant_c_a(sys, ca_mode, lambda_1_ref)?;
        let big_c = constant_big_c(&pu, sys, grid, c_a);
        let spectral = [
            atomic_spectral_basis(grid, sys, 0, pu.ball_radius(), j_modes)?,
            atomic_spectral_basis(grid, sys, 1, pu.ball_radius(), j_modes)?,
        ];
        let far_op = assemble_far_operator(grid, sys.sigma_3)?;
        let mut sqrt_p: [Vec<T>; 3] = Default::default();
        for &x in grid.points() {
            let s = pu.eval(x);
            for k in 0..3 {
                sqrt_p[k].push(s.p[k].max(T::zero()).sqrt());
            }
        }
        Ok(EstimatorContext {
            sys: sys.clone(),
            pu,
            c_a,
            big_c,
            spectral,
            far_op,
            sqrt_p,
            remainder_last_kept,
        })
    }

    /// Split a full-grid strong residual into the three local indicators.
    pub fn local_indicators(&self, grid: &Grid<T>, residual: &[T]) -> Result<LocalIndicators<T>> {
        let n = grid.n_points();
        if residual.len() != n {
            return Err(Error::Shape(format!(
                "residual has {} samples, grid has {n}",
                residual.len()
            )));
        }
        let mut eta_sq = [T::zero(); 3];
        for k in 0..2 {
            let w: Vec<T> = (0..n).map(|i| self.sqrt_p[k][i] * residual[i]).collect();
            let parts =
                partial_dual_norm(grid, &self.spectral[k], &w, self.remainder_last_kept)?;
            eta_sq[k] = parts.upper;
        }
        let w3: Vec<T> = (0..n).map(|i| self.sqrt_p[2][i] * residual[i]).collect();
        eta_sq[2] = far_field_dual_term(grid, &self.far_op, &w3)?;
        Ok(LocalIndicators {
            eta_sq,
            r_tilde_sq: eta_sq[0] + eta_sq[1] + eta_sq[2],
        })
    }

    /// Two-sided enclosure of the atom-`k` dual norm of the √p_k-weighted
    /// residual, at a truncation degree `j_modes` at most the context's own.
    pub fn dual_norm_parts(
        &self,
        grid: &Grid<T>,
        residual: &[T],
        k: usize,
        j_modes: usize,
    ) -> Result<DualNormParts<T>> {
        if k >= 2 {
            return Err(Error::Config(format!(
                "atom index {k} out of range for the two-atom estimator"
            )));
        }
        let n = grid.n_points();
        if residual.len() != n {
            return Err(Error::Shape(format!(
                "residual has {} samples, grid has {n}",
                residual.len()
            )));
        }
        let spect = self.spectral[k].truncated(j_modes)?;
        let w: Vec<T> = (0..n).map(|i| self.sqrt_p[k][i] * residual[i]).collect();
        partial_dual_norm(grid, &spect, &w, self.remainder_last_kept)
    }

    /// Guaranteed bound ‖u − u_N‖_A ≤ √(C·r̃²) for a source solution.
    pub fn bound_source(
        &self,
        grid: &Grid<T>,
        sol: &DiscreteSolution<T>,
        f_grid: &[T],
    ) -> Result<BoundReport<T>> {
        if sol.kind != SolutionKind::Source {
            return Err(Error::Config("bound_source needs a source solution".into()));
        }
        let residual = residual_on_grid(&self.sys, sol, grid, Some(f_grid))?;
        let ind = self.local_indicators(grid, &residual)?;
        Ok(BoundReport {
            eta_sq: ind.eta_sq,
            r_tilde_sq: ind.r_tilde_sq,
            big_c: self.big_c,
            c_a: self.c_a,
            bound_energy: (self.big_c * ind.r_tilde_sq).sqrt(),
            bound_eig: None,
            gap: None,
        })
    }

    /// Guaranteed eigenpair bounds: energy-norm bound for the eigenvector
    /// and the interval 0 ≤ λ_{iN} − λ_i ≤ C γ⁻¹ r̃².
    pub fn bound_eigen(
        &self,
        grid: &Grid<T>,
        sol: &DiscreteSolution<T>,
        gap: &GapData<T>,
    ) -> Result<BoundReport<T>> {
        if sol.kind != SolutionKind::Eigen {
            return Err(Error::Config("bound_eigen needs an eigenpair solution".into()));
        }
        let lambda = sol
            .lambda
            .ok_or_else(|| Error::Config("eigen solution is missing its eigenvalue".into()))?;
        let residual = residual_on_grid(&self.sys, sol, grid, None)?;
        let ind = self.local_indicators(grid, &residual)?;
        let r2 = ind.r_tilde_sq;
        let c = self.big_c;
        let lin = c / gap.gamma * r2;
        let quad = lambda * (c / gap.gamma_hat) * (c / gap.gamma_hat) * r2 * r2;
        Ok(BoundReport {
            eta_sq: ind.eta_sq,
            r_tilde_sq: r2,
            big_c: c,
            c_a: self.c_a,
            bound_energy: (lin + quad).sqrt(),
            bound_eig: Some(lin),
            gap: Some(*gap),
        })
    }
}

/// One validated bound evaluation.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport<T> {
    pub eta_sq: [T; 3],
    pub r_tilde_sq: T,
    pub big_c: T,
    pub c_a: T,
    /// Bound on the energy-norm error of the discrete solution.
    pub bound_energy: T,
    /// Bound on λ_{iN} − λ_i (eigen solves only).
    pub bound_eig: Option<T>,
    pub gap: Option<GapData<T>>,
}

/// Energy-norm (and eigenvalue) error against a reference solution, with
/// the discrete derivative taken analytically and the reference derivative
/// by second-order differences.
#[derive(Debug, Clone, Copy)]
pub struct TrueErrors<T> {
    pub err_energy: T,
    pub err_eig: Option<T>,
}

pub fn true_errors<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
    sol: &DiscreteSolution<T>,
    reference: &ReferenceSolution<T>,
) -> Result<TrueErrors<T>> {
    let n = grid.n_points();
    let (ref_u, lambda_ref) = match (sol.kind, reference) {
        (SolutionKind::Source, ReferenceSolution::Source { u }) => (u, None),
        (
            SolutionKind::Eigen,
            ReferenceSolution::Eigen {
                lambda_1, phi_1, ..
            },
        ) => (phi_1, Some(*lambda_1)),
        _ => {
            return Err(Error::Config(
                "reference kind does not match the discrete solution".into(),
            ))
        }
    };
    if ref_u.len() != n {
        return Err(Error::Shape(format!(
            "reference has {} samples, grid has {n}",
            ref_u.len()
        )));
    }

    let mut u = sol.eval_on_grid(grid);
    let mut du = sol.derivative_on_grid(grid);
    if sol.kind == SolutionKind::Eigen && grid.quad_inner(ref_u, &u)? < T::zero() {
        for v in &mut u {
            *v = -*v;
        }
        for v in &mut du {
            *v = -*v;
        }
    }

    let two_h = grid.h() * T::of(2.0);
    let mut dref = vec![T::zero(); n];
    for i in 1..n - 1 {
        dref[i] = (ref_u[i + 1] - ref_u[i - 1]) / two_h;
    }
    dref[0] = (-T::of(3.0) * ref_u[0] + T::of(4.0) * ref_u[1] - ref_u[2]) / two_h;
    dref[n - 1] = (T::of(3.0) * ref_u[n - 1] - T::of(4.0) * ref_u[n - 2] + ref_u[n - 3]) / two_h;

    let e: Vec<T> = (0..n).map(|i| ref_u[i] - u[i]).collect();
    let de: Vec<T> = (0..n).map(|i| dref[i] - du[i]).collect();
    let ve: Vec<T> = grid
        .points()
        .iter()
        .zip(&e)
        .map(|(&x, &ei)| (sys.potential_total(x) + sys.sigma) * ei)
        .collect();
    let form = T::of(0.5) * grid.quad_inner(&de, &de)? + grid.quad_inner(&e, &ve)?;
    Ok(TrueErrors {
        err_energy: form.max(T::zero()).sqrt(),
        err_eig: match (sol.lambda, lambda_ref) {
            (Some(l), Some(lr)) => Some(l - lr),
            _ => None,
        },
    })
}
