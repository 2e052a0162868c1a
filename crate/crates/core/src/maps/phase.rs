//! Maps of `R^{2n}` (or quotients of it) with coordinates ordered
//! `(q¹, p₁, q², p₂, …)` and symplectic form `Σ dqⁱ ∧ dpᵢ`.

use std::fmt;

use nalgebra::DMatrix;
use rand::RngCore;

use super::plane::PlaneMap;
use crate::error::{domain_error, Error, Result};
use crate::quotient::reduce_unchecked;
use crate::sampling::{open_ball, open_uniform};

/// Where a phase map may be evaluated and sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// All of `R^dim`; cannot be sampled.
    Whole(usize),
    /// Product of open intervals.
    OpenBox(Vec<(f64, f64)>),
    /// Open ball about the origin.
    OpenBall { dim: usize, radius: f64 },
}

impl Domain {
    pub fn unit_cube(dim: usize) -> Self {
        Domain::OpenBox(vec![(0.0, 1.0); dim])
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Whole(d) => *d,
            Domain::OpenBox(b) => b.len(),
            Domain::OpenBall { dim, .. } => *dim,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Domain::Whole(_) => true,
            Domain::OpenBox(b) => x.iter().zip(b).all(|(v, (lo, hi))| lo < v && v < hi),
            Domain::OpenBall { radius, .. } => x.iter().map(|v| v * v).sum::<f64>() < radius * radius,
        }
    }

    /// Distance to the boundary; negative outside.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Whole(_) => f64::INFINITY,
            Domain::OpenBox(b) => x
                .iter()
                .zip(b)
                .map(|(v, (lo, hi))| (v - lo).min(hi - v))
                .fold(f64::INFINITY, f64::min),
            Domain::OpenBall { radius, .. } => radius - x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        match self {
            Domain::Whole(_) => Err(Error::InvalidArgument(
                "cannot sample an unbounded domain".into(),
            )),
            Domain::OpenBox(b) => Ok(b.iter().map(|&(lo, hi)| open_uniform(rng, lo, hi)).collect()),
            Domain::OpenBall { dim, radius } => Ok(open_ball(rng, *dim, *radius)),
        }
    }
}

/// A map between phase spaces of equal dimension.
pub trait PhaseMap: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn name(&self) -> String;

    fn domain(&self) -> Domain {
        Domain::Whole(self.dim())
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Analytic Jacobian, `J[(i, j)] = ∂f_i/∂x_j`.
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>>;

    /// Lower bound on the distance to the locus where the map is not smooth.
    fn singular_distance(&self, _x: &[f64]) -> f64 {
        f64::INFINITY
    }

    fn components(&self) -> Vec<String> {
        vec![self.name()]
    }
}

impl<M: PhaseMap + ?Sized> PhaseMap for Box<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> String {
        (**self).name()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        (**self).jacobian(x)
    }
    fn singular_distance(&self, x: &[f64]) -> f64 {
        (**self).singular_distance(x)
    }
    fn components(&self) -> Vec<String> {
        (**self).components()
    }
}

/// The standard symplectic matrix for coordinates `(q¹, p₁, …, qⁿ, pₙ)`.
pub fn omega(dim: usize) -> DMatrix<f64> {
    assert!(dim.is_multiple_of(2), "odd phase-space dimension {dim}");
    let mut w = DMatrix::zeros(dim, dim);
    for i in (0..dim).step_by(2) {
        w[(i, i + 1)] = 1.0;
        w[(i + 1, i)] = -1.0;
    }
    w
}

/// `‖JᵀΩJ − Ω‖∞` (largest absolute entry).
pub fn symplectic_defect(j: &DMatrix<f64>) -> f64 {
    let w = omega(j.nrows());
    (j.transpose() * &w * j - w).abs().max()
}

fn check_len(name: &str, x: &[f64], dim: usize) -> Result<()> {
    if x.len() == dim {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name}: expected {dim} coordinates, got {}",
            x.len()
        )))
    }
}

#[derive(Debug, Clone)]
pub struct Identity(pub usize);

impl PhaseMap for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn name(&self) -> String {
        format!("id({})", self.0)
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("id", x, self.0)?;
        Ok(x.to_vec())
    }
    fn jacobian(&self, _: &[f64]) -> Result<DMatrix<f64>> {
        Ok(DMatrix::identity(self.0, self.0))
    }
}

#[derive(Debug, Clone)]
pub struct LinearMap {
    pub name: String,
    pub matrix: DMatrix<f64>,
}

impl PhaseMap for LinearMap {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(&self.name, x, self.dim())?;
        Ok((&self.matrix * nalgebra::DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect())
    }
    fn jacobian(&self, _: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.matrix.clone())
    }
}

/// `Ψ(q¹, p₁, q², p₂) = (q¹ − c·q², p₁, q², c·p₁ + p₂)`.
pub fn shear(c: f64) -> Result<LinearMap> {
    if !(c.is_finite() && c >= 1.0) {
        return Err(Error::InvalidArgument(format!("shear needs c >= 1, got {c}")));
    }
    #[rustfmt::skip]
    let matrix = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, -c, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, c, 0.0, 1.0,
    ]);
    Ok(LinearMap {
        name: format!("shear(c={c})"),
        matrix,
    })
}

/// Componentwise reduction onto representatives; `None` leaves a coordinate alone.
/// A local symplectomorphism with identity Jacobian.
#[derive(Debug, Clone)]
pub struct Wrap {
    pub periods: Vec<Option<f64>>,
}

impl PhaseMap for Wrap {
    fn dim(&self) -> usize {
        self.periods.len()
    }
    fn name(&self) -> String {
        "wrap".into()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("wrap", x, self.dim())?;
        Ok(x.iter()
            .zip(&self.periods)
            .map(|(&v, p)| match p {
                Some(l) => reduce_unchecked(v, *l),
                None => v,
            })
            .collect())
    }
    fn jacobian(&self, _: &[f64]) -> Result<DMatrix<f64>> {
        Ok(DMatrix::identity(self.dim(), self.dim()))
    }
}

/// `π: R⁴ → (R/Z) × R × R × (R/cZ)`.
pub fn wrap_project(c: f64) -> Result<Wrap> {
    if !(c.is_finite() && c >= 1.0) {
        return Err(Error::InvalidArgument(format!("wrap needs c >= 1, got {c}")));
    }
    Ok(Wrap {
        periods: vec![Some(1.0), None, None, Some(c)],
    })
}

/// Product of planar maps, one per symplectic pair.
#[derive(Debug)]
pub struct PlaneProduct {
    pub factors: Vec<Box<dyn PlaneMap>>,
}

impl PhaseMap for PlaneProduct {
    fn dim(&self) -> usize {
        2 * self.factors.len()
    }
    fn name(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|f| f.name()).collect();
        names.join(" x ")
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("product", x, self.dim())?;
        let mut out = Vec::with_capacity(x.len());
        for (f, pair) in self.factors.iter().zip(x.chunks_exact(2)) {
            out.extend_from_slice(&f.forward([pair[0], pair[1]])?);
        }
        Ok(out)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_len("product", x, self.dim())?;
        let mut j = DMatrix::zeros(self.dim(), self.dim());
        for (i, (f, pair)) in self.factors.iter().zip(x.chunks_exact(2)).enumerate() {
            let b = f.jacobian([pair[0], pair[1]])?;
            j.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&b);
        }
        Ok(j)
    }
    fn singular_distance(&self, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .zip(x.chunks_exact(2))
            .map(|(f, pair)| f.singular_distance([pair[0], pair[1]]))
            .fold(f64::INFINITY, f64::min)
    }
    fn components(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.name()).collect()
    }
}

/// Block-diagonal product of phase maps acting on consecutive coordinate blocks.
#[derive(Debug)]
pub struct BlockProduct {
    pub blocks: Vec<Box<dyn PhaseMap>>,
}

impl PhaseMap for BlockProduct {
    fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }
    fn name(&self) -> String {
        let names: Vec<String> = self.blocks.iter().map(|b| b.name()).collect();
        format!("({})", names.join(") x ("))
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("block product", x, self.dim())?;
        let mut out = Vec::with_capacity(x.len());
        let mut at = 0;
        for b in &self.blocks {
            out.extend(b.eval(&x[at..at + b.dim()])?);
            at += b.dim();
        }
        Ok(out)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_len("block product", x, self.dim())?;
        let mut j = DMatrix::zeros(self.dim(), self.dim());
        let mut at = 0;
        for b in &self.blocks {
            let d = b.dim();
            j.view_mut((at, at), (d, d)).copy_from(&b.jacobian(&x[at..at + d])?);
            at += d;
        }
        Ok(j)
    }
    fn singular_distance(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        let mut d = f64::INFINITY;
        for b in &self.blocks {
            d = d.min(b.singular_distance(&x[at..at + b.dim()]));
            at += b.dim();
        }
        d
    }
    fn components(&self) -> Vec<String> {
        self.blocks.iter().flat_map(|b| b.components()).collect()
    }
}

/// Composition; `stages[0]` is applied first. Jacobians chain by the product rule.
#[derive(Debug)]
pub struct Compose {
    pub stages: Vec<Box<dyn PhaseMap>>,
}

impl Compose {
    pub fn new(stages: Vec<Box<dyn PhaseMap>>) -> Result<Self> {
        let dim = stages
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty composition".into()))?
            .dim();
        if stages.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidArgument("dimension mismatch in composition".into()));
        }
        Ok(Compose { stages })
    }
}

impl PhaseMap for Compose {
    fn dim(&self) -> usize {
        self.stages[0].dim()
    }
    fn name(&self) -> String {
        let names: Vec<String> = self.stages.iter().rev().map(|s| s.name()).collect();
        names.join(" . ")
    }
    fn domain(&self) -> Domain {
        self.stages[0].domain()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        for s in &self.stages {
            y = s.eval(&y)?;
        }
        Ok(y)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut y = x.to_vec();
        let mut j = DMatrix::identity(self.dim(), self.dim());
        for s in &self.stages {
            j = s.jacobian(&y)? * j;
            y = s.eval(&y)?;
        }
        Ok(j)
    }
    /// Each stage's distance is pulled back by the accumulated stretch
    /// (Frobenius norm bounds the operator norm).
    fn singular_distance(&self, x: &[f64]) -> f64 {
        let mut y = x.to_vec();
        let mut stretch = 1.0_f64;
        let mut d = f64::INFINITY;
        for s in &self.stages {
            d = d.min(s.singular_distance(&y) / stretch);
            match (s.jacobian(&y), s.eval(&y)) {
                (Ok(j), Ok(next)) => {
                    stretch *= j.norm().max(1.0);
                    y = next;
                }
                _ => return 0.0,
            }
        }
        d
    }
    fn components(&self) -> Vec<String> {
        self.stages.iter().flat_map(|s| s.components()).collect()
    }
}

/// A map restricted to a domain; evaluation outside it is a domain error.
#[derive(Debug)]
pub struct Restricted<M> {
    pub map: M,
    pub domain: Domain,
}

impl<M: PhaseMap> PhaseMap for Restricted<M> {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn name(&self) -> String {
        self.map.name()
    }
    fn domain(&self) -> Domain {
        self.domain.clone()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.domain.contains(x) {
            return Err(domain_error(&self.name(), x));
        }
        self.map.eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if !self.domain.contains(x) {
            return Err(domain_error(&self.name(), x));
        }
        self.map.jacobian(x)
    }
    fn singular_distance(&self, x: &[f64]) -> f64 {
        self.map
            .singular_distance(x)
            .min(self.domain.boundary_distance(x))
    }
    fn components(&self) -> Vec<String> {
        self.map.components()
    }
}
