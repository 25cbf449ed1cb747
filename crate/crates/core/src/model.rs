//! Soft-Coulomb diatomic model: the reference operator, the atomic operators
//! on their balls, finite-difference reference solutions, and the Weyl
//! spectral lower bound.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::num::Real;
use crate::tridiag::SymTridiag;

/// Bounded 1D surrogate for the Coulomb interaction: 1/√(α² + x²).
pub fn soft_coulomb<T: Real>(alpha: T, x: T) -> T {
    (alpha * alpha + x * x).sqrt().recip()
}

/// A diatomic with soft-Coulomb nuclei at −R and +R.
///
/// `sigma` shifts the full operator A = −½Δ + V + ς into coercivity;
/// `sigma_1`, `sigma_2` shift the atomic operators and `sigma_3` the
/// far-field operator.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularSystem<T> {
    pub r: T,
    pub z_left: T,
    pub z_right: T,
    pub alpha: T,
    pub sigma: T,
    pub sigma_1: T,
    pub sigma_2: T,
    pub sigma_3: T,
}

impl<T: Real> MolecularSystem<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: T,
        z_left: T,
        z_right: T,
        alpha: T,
        sigma: T,
        sigma_1: T,
        sigma_2: T,
        sigma_3: T,
    ) -> Result<Self> {
        if !(r > T::zero()) {
            return Err(Error::Config(format!("R must be positive, got {r}")));
        }
        if !(alpha > T::zero()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if z_left < T::zero() || z_right < T::zero() {
            return Err(Error::Config(format!(
                "charges must be non-negative, got ({z_left}, {z_right})"
            )));
        }
        Ok(MolecularSystem {
            r,
            z_left,
            z_right,
            alpha,
            sigma,
            sigma_1,
            sigma_2,
            sigma_3,
        })
    }

    /// Nuclear position of atom `k` (0 = left at −R, 1 = right at +R).
    pub fn center(&self, k: usize) -> T {
        match k {
            0 => -self.r,
            1 => self.r,
            _ => panic!("atom index {k} out of range"),
        }
    }

    pub fn charge(&self, k: usize) -> T {
        match k {
            0 => self.z_left,
            1 => self.z_right,
            _ => panic!("atom index {k} out of range"),
        }
    }

    /// Atomic shift ς_k (0-based atom index; the far field has its own).
    pub fn atomic_shift(&self, k: usize) -> T {
        match k {
            0 => self.sigma_1,
            1 => self.sigma_2,
            _ => panic!("atom index {k} out of range"),
        }
    }

    /// External potential −z_left V_α(x+R) − z_right V_α(x−R), without the
    /// shift ς.  Bounded below by −(z_left+z_right)/α.
    pub fn potential_total(&self, x: T) -> T {
        -self.z_left * soft_coulomb(self.alpha, x + self.r)
            - self.z_right * soft_coulomb(self.alpha, x - self.r)
    }

    /// Potential of the single atom `k`: −z_k V_α(x − R_k).
    pub fn atomic_potential(&self, k: usize, x: T) -> T {
        -self.charge(k) * soft_coulomb(self.alpha, x - self.center(k))
    }
}

/// Closed ball Ω = [center−radius, center+radius] snapped to grid nodes.
///
/// `lo..=hi` are the covered grid indices; functions in H¹₀(Ω) vanish at
/// both slice endpoints, so the Dirichlet operators act on the strictly
/// interior nodes `lo+1..=hi-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain<T> {
    pub center: T,
    pub radius: T,
    pub lo: usize,
    pub hi: usize,
}

impl<T: Real> Subdomain<T> {
    pub fn new(grid: &Grid<T>, center: T, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::Config(format!(
                "subdomain radius must be positive, got {radius}"
            )));
        }
        let half_h = grid.h() * T::of(0.5);
        let (a, b) = (center - radius, center + radius);
        if a < grid.x_min() - half_h || b > grid.x_max() + half_h {
            return Err(Error::Config(format!(
                "subdomain [{a}, {b}] does not fit in the box [{}, {}]",
                grid.x_min(),
                grid.x_max()
            )));
        }
        let lo = grid.nearest_index(a);
        let hi = grid.nearest_index(b);
        if hi < lo + 2 {
            return Err(Error::Config(format!(
                "subdomain [{a}, {b}] covers fewer than 3 grid points"
            )));
        }
        Ok(Subdomain {
            center,
            radius,
            lo,
            hi,
        })
    }

    /// Number of covered grid points (boundary included).
    pub fn n_points(&self) -> usize {
        self.hi - self.lo + 1
    }

    /// Number of strictly interior (Dirichlet) unknowns.
    pub fn n_interior(&self) -> usize {
        self.hi - self.lo - 1
    }

    /// View of a full-grid vector restricted to the subdomain.
    pub fn slice<'a>(&self, v: &'a [T]) -> &'a [T] {
        &v[self.lo..=self.hi]
    }
}

/// Second-order FD discretization of A = −½Δ + V + ς on the interior nodes
/// of `grid` (homogeneous Dirichlet at the box ends).
pub fn assemble_hamiltonian<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
) -> Result<SymTridiag<T>> {
    let h2 = grid.h() * grid.h();
    let xs = grid.points();
    let n = xs.len() - 2;
    let diag: Vec<T> = xs[1..=n]
        .iter()
        .map(|&x| h2.recip() + sys.potential_total(x) + sys.sigma)
        .collect();
    let off = vec![-(T::of(2.0) * h2).recip(); n - 1];
    let t = SymTridiag::new(diag, off)?;
    if t.count_below(T::zero()) > 0 {
        return Err(Error::NotCoercive(
            "reference operator has a non-positive eigenvalue; increase sigma".into(),
        ));
    }
    Ok(t)
}

/// Dirichlet FD operator −½Δ − charge·V_α(x − center) + shift on the
/// interior nodes of the subdomain.
pub fn assemble_atomic_operator<T: Real>(
    grid: &Grid<T>,
    sub: &Subdomain<T>,
    charge: T,
    alpha: T,
    shift: T,
) -> Result<SymTridiag<T>> {
    let h2 = grid.h() * grid.h();
    let xs = grid.points();
    let diag: Vec<T> = xs[sub.lo + 1..sub.hi]
        .iter()
        .map(|&x| h2.recip() - charge * soft_coulomb(alpha, x - sub.center) + shift)
        .collect();
    let off = vec![-(T::of(2.0) * h2).recip(); diag.len() - 1];
    let t = SymTridiag::new(diag, off)?;
    if t.count_below(T::zero()) > 0 {
        return Err(Error::NotCoercive(format!(
            "atomic operator at center {} has a non-positive eigenvalue; increase its shift",
            sub.center
        )));
    }
    Ok(t)
}

/// Shifted Dirichlet Laplacian −½Δ + ς₃ on the full box (interior nodes).
pub fn assemble_far_operator<T: Real>(grid: &Grid<T>, sigma_3: T) -> Result<SymTridiag<T>> {
    if !(sigma_3 > T::zero()) {
        return Err(Error::NotCoercive(format!(
            "far-field shift must be positive, got {sigma_3}"
        )));
    }
    let h2 = grid.h() * grid.h();
    let n = grid.n_points() - 2;
    let diag = vec![h2.recip() + sigma_3; n];
    let off = vec![-(T::of(2.0) * h2).recip(); n - 1];
    SymTridiag::new(diag, off)
}

/// Finite-difference reference solution on the full grid.
#[derive(Debug, Clone)]
pub enum ReferenceSolution<T> {
    /// u solving (FD A) u = f, padded with the zero boundary values.
    Source { u: Vec<T> },
    /// Two lowest eigenpairs; φ₁ is continuum-L²-normalized with a
    /// deterministic sign, padded with zero boundary values.
    Eigen {
        lambda_1: T,
        phi_1: Vec<T>,
        lambda_2: T,
    },
}

/// Pad an interior-node vector with the Dirichlet zeros at both box ends.
fn pad_interior<T: Real>(interior: &[T], n_points: usize) -> Vec<T> {
    let mut full = vec![T::zero(); n_points];
    full[1..=interior.len()].copy_from_slice(interior);
    full
}

/// Reference source solve: u with (FD A) u = f.
pub fn reference_solve_source<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
    f: &[T],
) -> Result<ReferenceSolution<T>> {
    if f.len() != grid.n_points() {
        return Err(Error::Shape(format!(
            "source vector has {} entries for a {}-point grid",
            f.len(),
            grid.n_points()
        )));
    }
    let a = assemble_hamiltonian(grid, sys)?;
    let u_int = a.solve(&f[1..grid.n_points() - 1])?;
    Ok(ReferenceSolution::Source {
        u: pad_interior(&u_int, grid.n_points()),
    })
}

/// Reference eigensolve: two lowest eigenpairs of the FD operator.
pub fn reference_solve_eigen<T: Real>(
    grid: &Grid<T>,
    sys: &MolecularSystem<T>,
) -> Result<ReferenceSolution<T>> {
    let a = assemble_hamiltonian(grid, sys)?;
    let pairs = a.eigen_lowest(2)?.into_continuum(grid.h());
    Ok(ReferenceSolution::Eigen {
        lambda_1: pairs.values[0],
        phi_1: pad_interior(&pairs.vectors[0], grid.n_points()),
        lambda_2: pairs.values[1],
    })
}

/// Guaranteed lower bound on λ₂(A) by the Weyl inequality:
/// λ₁(−¼Δ + V₁ + ς/2) + λ₂(−¼Δ + V₂ + ς/2), both operators discretized on
/// the full box grid.  Exact at the FD-matrix level because the two
/// half-kinetic matrices sum to the reference matrix.
pub fn weyl_lower_bound<T: Real>(grid: &Grid<T>, sys: &MolecularSystem<T>) -> Result<T> {
    let h2 = grid.h() * grid.h();
    let xs = grid.points();
    let n = xs.len() - 2;
    let half_sigma = sys.sigma * T::of(0.5);
    let half_kinetic_diag = (T::of(2.0) * h2).recip();
    let half_kinetic_off = -(T::of(4.0) * h2).recip();

    let mut lowest = [T::zero(); 2];
    for k in 0..2 {
        let diag: Vec<T> = xs[1..=n]
            .iter()
            .map(|&x| half_kinetic_diag + sys.atomic_potential(k, x) + half_sigma)
            .collect();
        let off = vec![half_kinetic_off; n - 1];
        let t = SymTridiag::new(diag, off)?;
        if t.count_below(T::zero()) > 0 {
            return Err(Error::NotCoercive(format!(
                "half-kinetic operator of atom {} is not coercive",
                k + 1
            )));
        }
        // Atom 1 contributes its lowest eigenvalue, atom 2 its second.
        let pairs = t.eigen_lowest(k + 1)?;
        lowest[k] = pairs.values[k];
    }
    Ok(lowest[0] + lowest[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_system(sigma: f64) -> MolecularSystem<f64> {
        MolecularSystem::new(1.0, 1.0, 1.0, 0.5, sigma, 3.0, 3.0, 1.0).unwrap()
    }

    fn default_grid() -> Grid<f64> {
        Grid::new(-5.0, 5.0, 2001).unwrap()
    }

    #[test]
    fn soft_coulomb_closed_forms() {
        assert!((soft_coulomb(0.5f64, 0.0) - 2.0).abs() < 1e-15);
        assert!((soft_coulomb(0.5, 1.0) - 1.0 / 1.25f64.sqrt()).abs() < 1e-15);
        assert_eq!(soft_coulomb(0.5, 3.0), soft_coulomb(0.5, -3.0));
        // Monotone decay away from the origin.
        let mut prev = soft_coulomb(0.5, 0.0);
        for i in 1..100 {
            let v = soft_coulomb(0.5, i as f64 * 0.3);
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn potential_closed_forms_and_parity() {
        let sys = default_system(4.0);
        let at0 = sys.potential_total(0.0);
        assert!((at0 + 2.0 / 1.25f64.sqrt()).abs() < 1e-14);
        let at_nucleus = sys.potential_total(-1.0);
        assert!((at_nucleus + 2.0 + 1.0 / 4.25f64.sqrt()).abs() < 1e-14);
        // Symmetric charges → even potential.
        for i in 0..50 {
            let x = -5.0 + 0.2 * i as f64;
            assert!((sys.potential_total(x) - sys.potential_total(-x)).abs() < 1e-14);
        }
        // Global lower bound.
        for i in 0..2001 {
            let x = -5.0 + 0.005 * i as f64;
            assert!(sys.potential_total(x) >= -(1.0 + 1.0) / 0.5 - 1e-14);
        }
    }

    #[test]
    fn free_shifted_hamiltonian_is_coercive_with_unit_floor() {
        let sys = MolecularSystem::new(1.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
        let grid = default_grid();
        let a = assemble_hamiltonian(&grid, &sys).unwrap();
        let pairs = a.eigen_lowest(1).unwrap();
        assert!(pairs.values[0] >= 1.0);
        assert!((pairs.values[0] - (1.0 + std::f64::consts::PI.powi(2) / 200.0)).abs() < 1e-3);
    }

    #[test]
    fn reference_ground_state_matches_reported_coercivity_constants() {
        let grid = default_grid();
        // 1/√λ₁ at ς = 3 and ς = 4, with the softness √0.5 that the
        // reference constants correspond to.
        for (sigma, c_a) in [(3.0, 0.83), (4.0, 0.64)] {
            let sys =
                MolecularSystem::new(1.0, 1.0, 1.0, 0.5f64.sqrt(), sigma, 3.0, 3.0, 1.0).unwrap();
            let a = assemble_hamiltonian(&grid, &sys).unwrap();
            let lam1 = a.eigen_lowest(1).unwrap().values[0];
            let got = 1.0 / lam1.sqrt();
            assert!(
                (got - c_a).abs() / c_a < 0.02,
                "ς={sigma}: 1/√λ₁ = {got}, expected ≈ {c_a}"
            );
        }
    }

    #[test]
    fn eigenvalues_shift_exactly_with_sigma() {
        let grid = Grid::new(-5.0, 5.0, 801).unwrap();
        let e1 = match reference_solve_eigen(&grid, &default_system(3.0)).unwrap() {
            ReferenceSolution::Eigen {
                lambda_1, lambda_2, ..
            } => (lambda_1, lambda_2),
            _ => unreachable!(),
        };
        let e2 = match reference_solve_eigen(&grid, &default_system(4.5)).unwrap() {
            ReferenceSolution::Eigen {
                lambda_1, lambda_2, ..
            } => (lambda_1, lambda_2),
            _ => unreachable!(),
        };
        assert!((e2.0 - e1.0 - 1.5).abs() < 1e-9);
        assert!((e2.1 - e1.1 - 1.5).abs() < 1e-9);
    }

    #[test]
    fn reference_eigenvector_is_even_and_normalized() {
        let grid = Grid::new(-5.0, 5.0, 1201).unwrap();
        let sol = reference_solve_eigen(&grid, &default_system(4.0)).unwrap();
        let (phi, lam1, lam2) = match &sol {
            ReferenceSolution::Eigen {
                phi_1,
                lambda_1,
                lambda_2,
            } => (phi_1, *lambda_1, *lambda_2),
            _ => unreachable!(),
        };
        assert!(lam1 < lam2);
        let norm = grid.quad_inner(phi, phi).unwrap();
        assert!((norm - 1.0).abs() < 1e-10, "‖φ₁‖² = {norm}");
        let n = grid.n_points();
        for i in 0..n {
            assert!((phi[i] - phi[n - 1 - i]).abs() < 1e-8);
        }
    }

    #[test]
    fn source_round_trip() {
        let grid = Grid::new(-5.0, 5.0, 801).unwrap();
        let sys = default_system(4.0);
        let a = assemble_hamiltonian(&grid, &sys).unwrap();
        let v: Vec<f64> = (0..799).map(|i| ((i as f64) * 0.01).sin()).collect();
        let f_int = a.matvec(&v);
        let mut f = vec![0.0; 801];
        f[1..800].copy_from_slice(&f_int);
        let sol = reference_solve_source(&grid, &sys, &f).unwrap();
        let u = match &sol {
            ReferenceSolution::Source { u } => u,
            _ => unreachable!(),
        };
        for i in 0..799 {
            assert!((u[i + 1] - v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn atomic_operator_spectrum_translation_invariant_and_free_limit() {
        let grid = default_grid();
        let s1 = Subdomain::new(&grid, -1.0, 1.0).unwrap();
        let s2 = Subdomain::new(&grid, 1.0, 1.0).unwrap();
        let op1 = assemble_atomic_operator(&grid, &s1, 1.0, 0.5, 3.0).unwrap();
        let op2 = assemble_atomic_operator(&grid, &s2, 1.0, 0.5, 3.0).unwrap();
        let e1 = op1.eigen_lowest(3).unwrap();
        let e2 = op2.eigen_lowest(3).unwrap();
        for (a, b) in e1.values.iter().zip(&e2.values) {
            assert!((a - b).abs() < 1e-10);
        }
        // Zero charge on [ -1, 1 ]: Dirichlet Laplacian ground state π²/8 + shift.
        let free = assemble_atomic_operator(&grid, &s1.clone(), 0.0, 0.5, 1.0).unwrap();
        let g = free.eigen_lowest(1).unwrap().values[0];
        let want = std::f64::consts::PI.powi(2) / 8.0 + 1.0;
        assert!((g - want).abs() / want < 1e-4, "got {g}, want ≈ {want}");
        // Charged atomic operator with modest shift stays positive.
        let s3 = Subdomain::new(&grid, -1.0, 1.4).unwrap();
        let op3 = assemble_atomic_operator(&grid, &s3, 1.0, 0.5, 3.0).unwrap();
        assert!(op3.eigen_lowest(1).unwrap().values[0] > 0.0);
    }

    #[test]
    fn far_operator_ground_state_and_screened_solve() {
        let grid = default_grid();
        let far = assemble_far_operator(&grid, 1.0).unwrap();
        let e = far.eigen_lowest(1).unwrap();
        let want = 1.0 + std::f64::consts::PI.powi(2) / 200.0;
        assert!((e.values[0] - want).abs() < 1e-4);
        // (−½Δ + 1) w = 1 → w ≈ 1 deep inside the box.
        let rhs = vec![1.0; grid.n_points() - 2];
        let w = far.solve(&rhs).unwrap();
        let mid = w[w.len() / 2];
        assert!((mid - 1.0).abs() < 5e-3, "w(0) = {mid}");
        assert!(assemble_far_operator(&grid, 0.0).is_err());
    }

    #[test]
    fn weyl_bound_sits_below_second_eigenvalue() {
        let grid = Grid::new(-5.0, 5.0, 1201).unwrap();
        for sigma in [3.0, 4.0, 6.0] {
            let sys = default_system(sigma);
            let weyl = weyl_lower_bound(&grid, &sys).unwrap();
            let lam2 = match reference_solve_eigen(&grid, &sys).unwrap() {
                ReferenceSolution::Eigen { lambda_2, .. } => lambda_2,
                _ => unreachable!(),
            };
            assert!(weyl <= lam2 + 1e-12, "ς={sigma}: weyl {weyl} > λ₂ {lam2}");
            assert!(weyl > 0.0);
        }
    }

    #[test]
    fn asymmetric_system_weyl_uses_stated_operator_order() {
        // z_right → 0 keeps atom 2 free: bound = λ₁(−¼Δ+V₁+ς/2) + λ₂(−¼Δ+ς/2).
        let grid = Grid::new(-5.0, 5.0, 1201).unwrap();
        let sys = MolecularSystem::new(1.0, 1.0, 0.0, 0.5, 4.0, 3.0, 3.0, 1.0).unwrap();
        let weyl = weyl_lower_bound(&grid, &sys).unwrap();
        let h2 = grid.h() * grid.h();
        let xs = grid.points();
        let n = xs.len() - 2;
        let diag1: Vec<f64> = xs[1..=n]
            .iter()
            .map(|&x| 0.5 / h2 - soft_coulomb(0.5, x + 1.0) + 2.0)
            .collect();
        let t1 = SymTridiag::new(diag1, vec![-0.25 / h2; n - 1]).unwrap();
        let diag2 = vec![0.5 / h2 + 2.0; n];
        let t2 = SymTridiag::new(diag2, vec![-0.25 / h2; n - 1]).unwrap();
        let want = t1.eigen_lowest(1).unwrap().values[0] + t2.eigen_lowest(2).unwrap().values[1];
        assert!((weyl - want).abs() < 1e-10);
    }

    #[test]
    fn subdomain_geometry_checks() {
        let grid = default_grid();
        // Doesn't fit.
        assert!(Subdomain::new(&grid, -1.0, 5.0).is_err());
        // Too small.
        assert!(Subdomain::new(&grid, 0.0, 1e-4).is_err());
        let sub = Subdomain::new(&grid, 1.0, 1.4).unwrap();
        assert_eq!(sub.n_points(), sub.hi - sub.lo + 1);
        assert!((grid.points()[sub.lo] - (-0.4)).abs() < 1e-12);
        assert!((grid.points()[sub.hi] - 2.4).abs() < 1e-12);
    }

    #[test]
    fn invalid_system_parameters_are_config_errors() {
        assert!(MolecularSystem::new(0.0, 1.0, 1.0, 0.5, 4.0, 3.0, 3.0, 1.0).is_err());
        assert!(MolecularSystem::new(1.0, -1.0, 1.0, 0.5, 4.0, 3.0, 3.0, 1.0).is_err());
        assert!(MolecularSystem::new(1.0, 1.0, 1.0, 0.0, 4.0, 3.0, 3.0, 1.0).is_err());
    }
}
