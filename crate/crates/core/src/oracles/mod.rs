//! Closed-form resolvents used as independent references for the
//! discretized operators.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gallery::{
    build_delay_operator, build_interval_laplacian, build_odd_order, build_thermostat, delay_left_eigenfunction,
    BoundaryCondition, GalleryOperator,
};
use crate::numerics::{eigenpair_near, resolvent};

/// Panels per sub-integral of the composite Simpson rule.
pub const SIMPSON_PANELS: usize = 10_000;

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
pub fn composite_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = panels.max(2).next_multiple_of(2);
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * k as f64);
    }
    s * h / 3.0
}

type Kernel = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Integral kernel `k(x, y)` of a resolvent on an interval.
pub struct KernelOracle {
    pub name: &'static str,
    pub mu: f64,
    pub domain: (f64, f64),
    pub declared_order: f64,
    kernel: Kernel,
}

impl core::fmt::Debug for KernelOracle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("KernelOracle")
            .field("name", &self.name)
            .field("mu", &self.mu)
            .field("domain", &self.domain)
            .finish()
    }
}

impl KernelOracle {
    fn check(&self, x: f64, y: f64) -> Result<()> {
        let (a, b) = self.domain;
        if !(a..=b).contains(&x) || !(a..=b).contains(&y) {
            return Err(Error::OutOfDomain { x, y });
        }
        Ok(())
    }

    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x, y)?;
        Ok((self.kernel)(x, y))
    }

    /// `∫ k(x, y) f(y) dy`, split at the diagonal.
    pub fn apply(&self, f: &dyn Fn(f64) -> f64, x: f64) -> Result<f64> {
        self.check(x, x)?;
        let (a, b) = self.domain;
        let g = |y: f64| (self.kernel)(x, y) * f(y);
        let below = x - 1e-12 * (x - a);
        let left = composite_simpson(&|y| (self.kernel)(x, y.min(below)) * f(y), a, x, SIMPSON_PANELS);
        let right = composite_simpson(&g, x, b, SIMPSON_PANELS);
        Ok(left + right)
    }
}

/// Green's function of `−d²/dx²` on `(0, 1)` with Dirichlet conditions.
pub fn dirichlet_green(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return Err(Error::OutOfDomain { x, y });
    }
    Ok(if y <= x { y * (1.0 - x) } else { x * (1.0 - y) })
}

pub fn dirichlet_green_oracle() -> KernelOracle {
    KernelOracle {
        name: "dirichlet_green",
        mu: 0.0,
        domain: (0.0, 1.0),
        declared_order: 2.0,
        kernel: Box::new(|x, y| if y <= x { y * (1.0 - x) } else { x * (1.0 - y) }),
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0 / PI) {
        return Err(Error::InvalidParameter { name: "beta", reason: "must lie in (0, 1/pi)".into() });
    }
    Ok(())
}

/// Kernel of `R(0)` for the thermostat conditions on `(0, π)`.
pub fn thermostat_oracle(beta: f64) -> Result<KernelOracle> {
    check_beta(beta)?;
    let ib = 1.0 / beta;
    Ok(KernelOracle {
        name: "thermostat",
        mu: 0.0,
        domain: (0.0, PI),
        declared_order: 2.0,
        kernel: Box::new(move |x, y| if y < x { ib } else { ib + x - y }),
    })
}

/// `∫_x^π (1/β + x − y) f(y) dy + (1/β) ∫_0^x f(y) dy`.
pub fn thermostat_resolvent_at_zero(f: &dyn Fn(f64) -> f64, x: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(0.0..=PI).contains(&x) {
        return Err(Error::OutOfDomain { x, y: x });
    }
    let ib = 1.0 / beta;
    let right = composite_simpson(&|y| (ib + x - y) * f(y), x, PI, SIMPSON_PANELS);
    let left = ib * composite_simpson(f, 0.0, x, SIMPSON_PANELS);
    Ok(left + right)
}

/// Kernel of `R(μ, d/dx)` on the unit circle.
pub fn periodic_first_order_oracle(mu: f64) -> Result<KernelOracle> {
    if mu == 0.0 {
        return Err(Error::MuZero);
    }
    let d = libm::expm1(mu);
    Ok(KernelOracle {
        name: "periodic_first_order",
        mu,
        domain: (0.0, 1.0),
        declared_order: f64::INFINITY,
        kernel: Box::new(move |x, y| {
            let e = libm::exp(mu * (x - y));
            if y < x {
                e / d
            } else {
                e * (d + 1.0) / d
            }
        }),
    })
}

/// `e^{μx}( e^μ/(e^μ−1) ∫_0^1 e^{−μy} f(y) dy − ∫_0^x e^{−μy} f(y) dy )`.
pub fn periodic_first_order_resolvent(f: &dyn Fn(f64) -> f64, x: f64, mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::MuZero);
    }
    let g = |y: f64| libm::exp(-mu * y) * f(y);
    let head = composite_simpson(&g, 0.0, x, SIMPSON_PANELS);
    let tail = composite_simpson(&g, x, 1.0, SIMPSON_PANELS);
    let total = head + tail;
    let em = libm::exp(mu);
    Ok(libm::exp(mu * x) * (em / (em - 1.0) * total - head))
}

/// `R(μ)1 = 1/μ` whenever `A1 = 0`.
pub fn neumann_constant_identity(mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::MuZero);
    }
    Ok(1.0 / mu)
}

/// Error of one mesh against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    pub h: f64,
    /// Sup-norm error, or the ℓ¹ distance for the delay study.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub oracle: &'static str,
    pub points: Vec<ConvergencePoint>,
    /// `log(e₁/e₂) / log(h₁/h₂)` for consecutive meshes.
    pub pairwise_orders: Vec<f64>,
    pub declared_order: f64,
}

impl ConvergenceStudy {
    /// Smallest pairwise order.
    pub fn observed_order(&self) -> f64 {
        self.pairwise_orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_error(&self) -> f64 {
        self.points.iter().map(|p| p.error).fold(0.0, f64::max)
    }
}

pub fn observed_order(e1: f64, h1: f64, e2: f64, h2: f64) -> f64 {
    libm::log(e1 / e2) / libm::log(h1 / h2)
}

/// Sup-norm distance between `R(μ)f_h` and `g` sampled at the nodes.
pub fn nodal_error(op: &GalleryOperator, mu: f64, f: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let r = resolvent(&op.matrix, mu)?;
    let nodes = &op.grid.nodes;
    let fh: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let rf = r.mul_vec(&fh);
    let mut err = 0.0f64;
    for (x, v) in nodes.iter().zip(rf) {
        err = err.max((v - g(*x)?).abs());
    }
    Ok(err)
}

fn study(oracle: &'static str, declared_order: f64, points: Vec<ConvergencePoint>) -> ConvergenceStudy {
    let pairwise_orders = points
        .windows(2)
        .map(|w| observed_order(w[0].error, w[0].h, w[1].error, w[1].h))
        .collect();
    ConvergenceStudy { oracle, points, pairwise_orders, declared_order }
}

fn sorted(n_list: &[usize]) -> Result<Vec<usize>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(Error::InvalidParameter { name: "n_list", reason: "need at least two distinct meshes".into() });
    }
    Ok(ns)
}

/// Dirichlet `R(0)` applied to `f(y) = e^y` against the Green's function.
pub fn dirichlet_convergence(n_list: &[usize]) -> Result<ConvergenceStudy> {
    let f = |y: f64| libm::exp(y);
    let exact = |x: f64| {
        // ∫ G(x, y) e^y dy = x(e − 1) + 1 − e^x
        Ok(x * (core::f64::consts::E - 1.0) + 1.0 - libm::exp(x))
    };
    let points = sorted(n_list)?
        .into_iter()
        .map(|n| {
            let op = build_interval_laplacian(BoundaryCondition::Dirichlet, n)?;
            Ok(ConvergencePoint { n, h: op.h(), error: nodal_error(&op, 0.0, &f, &exact)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(study("dirichlet_green", 2.0, points))
}

/// Thermostat `R(0)` applied to `f(y) = e^{−y}` against the quadrature oracle.
pub fn thermostat_convergence(beta: f64, n_list: &[usize]) -> Result<ConvergenceStudy> {
    let f = |y: f64| libm::exp(-y);
    let exact = |x: f64| thermostat_resolvent_at_zero(&f, x, beta);
    let points = sorted(n_list)?
        .into_iter()
        .map(|n| {
            let op = build_thermostat(beta, n)?;
            Ok(ConvergencePoint { n, h: op.h(), error: nodal_error(&op, 0.0, &f, &exact)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(study("thermostat", 2.0, points))
}

/// Sup error of the `ℓ = 0` odd-order resolvent at `μ` against the exact
/// circle resolvent, with `f(y) = exp(sin 2πy)`.
pub fn periodic_first_order_error(n: usize, mu: f64) -> Result<ConvergencePoint> {
    let op = build_odd_order(0, n)?;
    let f = |y: f64| libm::exp(libm::sin(2.0 * PI * y));
    let exact = |x: f64| periodic_first_order_resolvent(&f, x, mu);
    Ok(ConvergencePoint { n, h: op.h(), error: nodal_error(&op, mu, &f, &exact)? })
}

/// `‖R(μ)1 − (1/μ)1‖_∞`.
pub fn constant_identity_error(op: &GalleryOperator, mu: f64) -> Result<f64> {
    let target = neumann_constant_identity(mu)?;
    let r = resolvent(&op.matrix, mu)?;
    let ones = alloc::vec![1.0; op.dim()];
    Ok(r.mul_vec(&ones).iter().map(|v| (v - target).abs()).fold(0.0, f64::max))
}

/// Sampled `ψ = (1, c·v)` paired through the quadrature weights, with the
/// state slot last.
pub fn delay_sampled_left_vector(op: &GalleryOperator, c: f64) -> Vec<f64> {
    let n = op.grid.n;
    let w = op.frame.weights().as_slice();
    (0..=n)
        .map(|j| if j == n { 1.0 } else { c * delay_left_eigenfunction(op.grid.nodes[j]) * w[j] })
        .collect()
}

/// `Σ_j |ψ_j/ψ_n − ψ̂_j|` between the computed left eigenvector at `0` and the
/// sampled `ψ̂`, both scaled to a unit state slot.
pub fn delay_left_eigenvector_error(c: f64, n: usize) -> Result<ConvergencePoint> {
    let op = build_delay_operator(c, n)?;
    let psi = delay_sampled_left_vector(&op, c);
    let pair = eigenpair_near(&op.matrix, 0.0)?;
    let left = pair.left_vector.as_slice();
    let s = left[n];
    let error = left.iter().zip(&psi).map(|(l, p)| (l / s - p).abs()).sum();
    Ok(ConvergencePoint { n, h: op.h(), error })
}

pub fn delay_left_eigenvector_study(c: f64, n_list: &[usize]) -> Result<ConvergenceStudy> {
    let points = sorted(n_list)?
        .into_iter()
        .map(|n| delay_left_eigenvector_error(c, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(study("delay_left_eigenvector", 2.0, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_examples() {
        assert_eq!(dirichlet_green(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(dirichlet_green(0.2, 0.7).unwrap(), dirichlet_green(0.7, 0.2).unwrap());
        assert!(matches!(dirichlet_green(0.0, 0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn thermostat_constant() {
        let v = thermostat_resolvent_at_zero(&|_| 1.0, 0.0, 0.2).unwrap();
        assert!((v - (PI / 0.2 - PI * PI / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn periodic_constant() {
        for x in [0.0, 0.3, 0.99] {
            let v = periodic_first_order_resolvent(&|_| 1.0, x, 2.0).unwrap();
            assert!((v - 0.5).abs() < 1e-12);
        }
        assert_eq!(periodic_first_order_resolvent(&|_| 1.0, 0.5, 0.0), Err(Error::MuZero));
    }

    #[test]
    fn kernel_matches_formula() {
        let k = periodic_first_order_oracle(1.5).unwrap();
        let f = |y: f64| libm::cos(3.0 * y) + 2.0;
        let a = k.apply(&f, 0.4).unwrap();
        let b = periodic_first_order_resolvent(&f, 0.4, 1.5).unwrap();
        assert!((a - b).abs() < 1e-9);
    }
}
