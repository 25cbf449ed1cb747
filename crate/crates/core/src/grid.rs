//! Uniform grids and trapezoid quadrature.
//!
//! All continuum objects (reference solutions, residuals, partition samples)
//! live on a uniform grid over a symmetric box.  The composite trapezoid rule
//! is the single quadrature used everywhere: on smooth integrands that decay
//! at the box ends it is exponentially accurate, so no second quadrature
//! subsystem is needed.

use crate::error::{Error, Result};
use crate::num::Real;

/// Uniform grid on `[x_min, x_max]` with `n_points` nodes (spacing `h`).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    x_min: T,
    x_max: T,
    h: T,
    points: Vec<T>,
}

impl<T: Real> Grid<T> {
    /// Build a uniform grid with `n_points >= 3` nodes including both ends.
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) {
            return Err(Error::Config(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::Config(format!(
                "grid needs at least 3 points, got {n_points}"
            )));
        }
        let h = (x_max - x_min) / T::of((n_points - 1) as f64);
        let points = (0..n_points)
            .map(|i| x_min + h * T::of(i as f64))
            .collect();
        Ok(Grid { x_min, x_max, h, points })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    /// Node spacing.
    pub fn h(&self) -> T {
        self.h
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// All nodes, including both endpoints.
    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Sample a function on every node.
    pub fn sample(&self, f: impl Fn(T) -> T) -> Vec<T> {
        self.points.iter().map(|&x| f(x)).collect()
    }

    /// Index of the node closest to `x`.
    pub fn nearest_index(&self, x: T) -> usize {
        let raw = ((x - self.x_min) / self.h).round();
        let i = raw.to_f64().unwrap_or(0.0).max(0.0) as usize;
        i.min(self.points.len() - 1)
    }

    /// Composite trapezoid approximation of `∫ f·g` over the box.
    ///
    /// `f` and `g` are nodal samples of the two factors.  The end nodes carry
    /// half weight; with integrands that vanish at the box ends this reduces
    /// to `h · Σ f_i g_i`.
    pub fn quad_inner(&self, f: &[T], g: &[T]) -> Result<T> {
        let n = self.points.len();
        if f.len() != n || g.len() != n {
            return Err(Error::Shape(format!(
                "quad_inner: grid has {} nodes, factors have {} and {}",
                n,
                f.len(),
                g.len()
            )));
        }
        let mut acc = T::zero();
        for i in 0..n {
            acc += f[i] * g[i];
        }
        let half = T::of(0.5);
        acc -= half * (f[0] * g[0] + f[n - 1] * g[n - 1]);
        Ok(acc * self.h)
    }

    /// Trapezoid approximation of the squared L² norm of a nodal vector.
    pub fn norm_sq(&self, f: &[T]) -> Result<T> {
        self.quad_inner(f, f)
    }
}
