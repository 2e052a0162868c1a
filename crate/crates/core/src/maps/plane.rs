//! Area-preserving maps between planar regions.
//!
//! Cylinder coordinates are ordered `(angle, height)` with area form
//! `d(angle) ∧ d(height)`, except for [`LambdaPrime`] whose domain keeps the
//! `(height, angle)` order of the second symplectic pair.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use nalgebra::Matrix2;
use rand::{Rng, RngCore};

use crate::error::{domain_error, singular_error, Error, Result};
use crate::quotient::{circle_distance, reduce_unchecked};
use crate::sampling::open_uniform;

pub type Point2 = [f64; 2];
pub type Mat2 = Matrix2<f64>;

/// Relative slack for closed-domain membership tests.
const CLOSED_SLACK: f64 = 1e-12;

/// A map between planar regions with forward/inverse evaluation and Jacobian.
pub trait PlaneMap: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn in_domain(&self, p: Point2) -> bool;

    fn forward(&self, p: Point2) -> Result<Point2>;

    fn inverse(&self, _p: Point2) -> Result<Point2> {
        Err(Error::NotInvertible { map: self.name() })
    }

    fn jacobian(&self, p: Point2) -> Result<Mat2>;

    /// The constant value of `det J` off the singular set.
    fn declared_det(&self) -> f64 {
        1.0
    }

    /// Lower bound on the distance from `p` to the locus where the map is
    /// not smooth, domain boundary included.
    fn singular_distance(&self, _p: Point2) -> f64 {
        f64::INFINITY
    }

    fn singular_set(&self) -> &'static str {
        "none"
    }

    /// Uniform sample from the domain (or from a stated box for unbounded domains).
    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2;
}

impl<M: PlaneMap + ?Sized> PlaneMap for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn in_domain(&self, p: Point2) -> bool {
        (**self).in_domain(p)
    }
    fn forward(&self, p: Point2) -> Result<Point2> {
        (**self).forward(p)
    }
    fn inverse(&self, p: Point2) -> Result<Point2> {
        (**self).inverse(p)
    }
    fn jacobian(&self, p: Point2) -> Result<Mat2> {
        (**self).jacobian(p)
    }
    fn declared_det(&self) -> f64 {
        (**self).declared_det()
    }
    fn singular_distance(&self, p: Point2) -> f64 {
        (**self).singular_distance(p)
    }
    fn singular_set(&self) -> &'static str {
        (**self).singular_set()
    }
    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        (**self).sample_domain(rng)
    }
}

#[inline]
fn rotate(k: u8, x: f64, y: f64) -> Point2 {
    match k & 3 {
        0 => [x, y],
        1 => [-y, x],
        2 => [-x, -y],
        _ => [y, -x],
    }
}

#[inline]
fn rotation(k: u8) -> Mat2 {
    let [a, b] = rotate(k, 1.0, 0.0);
    let [c, d] = rotate(k, 0.0, 1.0);
    Mat2::new(a, c, b, d)
}

/// Concentric polar coordinates of an offset `(a, b)` from a square center:
/// the Chebyshev radius `m` and the angle that is linear along each side of
/// the square of half-side `m`, starting at `-π/4` on the right side.
/// Returns `None` at the center.
#[inline]
pub fn square_polar(a: f64, b: f64) -> Option<(f64, f64)> {
    let (aa, ab) = (a.abs(), b.abs());
    let m = aa.max(ab);
    if m == 0.0 {
        return None;
    }
    let theta = if aa >= ab {
        if a > 0.0 {
            FRAC_PI_4 * (b / m)
        } else {
            PI - FRAC_PI_4 * (b / m)
        }
    } else if b > 0.0 {
        FRAC_PI_2 - FRAC_PI_4 * (a / m)
    } else {
        3.0 * FRAC_PI_2 + FRAC_PI_4 * (a / m)
    };
    Some((m, theta))
}

/// `χ`: the cylinder `(R/LZ) × [0, H)` onto the punctured closed disc of area `L·H`.
///
/// `χ(q, p) = ρ(p)·e^{2πiq/L}` with `ρ(p) = sqrt(L(H − p)/π)`, so `p = 0` is the
/// boundary circle and `p → H` collapses onto the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi {
    pub circumference: f64,
    pub height: f64,
}

impl Chi {
    pub fn new(circumference: f64, height: f64) -> Result<Self> {
        if !(circumference > 0.0 && height > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "chi needs positive circumference and height, got {circumference}, {height}"
            )));
        }
        Ok(Chi {
            circumference,
            height,
        })
    }

    pub fn radius(&self) -> f64 {
        (self.circumference * self.height / PI).sqrt()
    }

    #[inline]
    fn rho(&self, p: f64) -> f64 {
        (self.circumference * (self.height - p) / PI).sqrt()
    }

    /// Evaluation on the closed cylinder; `p = H` goes to the center.
    pub fn forward_closed(&self, [q, p]: Point2) -> Result<Point2> {
        if !(q.is_finite() && (0.0..=self.height).contains(&p)) {
            return Err(domain_error("chi", &[q, p]));
        }
        let rho = self.rho(p);
        let theta = 2.0 * PI * q / self.circumference;
        Ok([rho * theta.cos(), rho * theta.sin()])
    }
}

impl PlaneMap for Chi {
    fn name(&self) -> String {
        format!("chi(L={}, H={})", self.circumference, self.height)
    }

    fn in_domain(&self, [q, p]: Point2) -> bool {
        q.is_finite() && p >= 0.0 && p < self.height
    }

    fn forward(&self, x: Point2) -> Result<Point2> {
        if !self.in_domain(x) {
            return Err(domain_error("chi", &x));
        }
        self.forward_closed(x)
    }

    fn inverse(&self, [u, v]: Point2) -> Result<Point2> {
        let r2 = u * u + v * v;
        let max2 = self.circumference * self.height / PI;
        if !(r2 > 0.0 && r2 <= max2 * (1.0 + CLOSED_SLACK)) {
            return Err(domain_error("chi inverse", &[u, v]));
        }
        let q = reduce_unchecked(v.atan2(u) * self.circumference / (2.0 * PI), self.circumference);
        let p = (self.height - PI * r2 / self.circumference).max(0.0);
        Ok([q, p])
    }

    fn jacobian(&self, x @ [q, p]: Point2) -> Result<Mat2> {
        if !self.in_domain(x) {
            return Err(domain_error("chi", &x));
        }
        let rho = self.rho(p);
        let k = 2.0 * PI / self.circumference;
        let drho = -self.circumference / (2.0 * PI * rho);
        let (s, c) = (k * q).sin_cos();
        Ok(Mat2::new(-rho * s * k, c * drho, rho * c * k, s * drho))
    }

    fn singular_distance(&self, [_, p]: Point2) -> f64 {
        (self.height - p).min(p)
    }

    fn singular_set(&self) -> &'static str {
        "top circle p = H (collapses to the disc center)"
    }

    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        [
            rng.random::<f64>() * self.circumference,
            open_uniform(rng, 0.0, self.height),
        ]
    }
}

/// `κ`: the closed disc of radius `side/√π` onto the square `[0, side]²`.
///
/// Concentric equal-area map: the circle of radius `R` goes to the square of
/// half-side `m = R·√π/2` around the square center, and the angle is linear
/// along each side of that square. The four diagonal rays are the singular set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub side: f64,
}

impl Kappa {
    pub fn new(side: f64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa side {side}")));
        }
        Ok(Kappa { side })
    }

    pub fn disc_radius(&self) -> f64 {
        self.side / PI.sqrt()
    }

    #[inline]
    fn sector(theta: f64) -> (u8, f64) {
        let k = (theta / FRAC_PI_2).round();
        ((k as i64).rem_euclid(4) as u8, theta - k * FRAC_PI_2)
    }

    /// Polar coordinates `(R, θ)` of `κ⁻¹(y)`, without trigonometry.
    #[inline]
    pub fn inverse_polar(&self, [x, y]: Point2) -> Option<(f64, f64)> {
        let h = 0.5 * self.side;
        square_polar(x - h, y - h).map(|(m, theta)| (2.0 * m / PI.sqrt(), theta))
    }

    fn in_square(&self, [x, y]: Point2) -> bool {
        let slack = CLOSED_SLACK * self.side;
        (-slack..=self.side + slack).contains(&x) && (-slack..=self.side + slack).contains(&y)
    }
}

impl PlaneMap for Kappa {
    fn name(&self) -> String {
        format!("kappa(side={})", self.side)
    }

    fn in_domain(&self, [u, v]: Point2) -> bool {
        let rmax = self.disc_radius();
        u * u + v * v <= rmax * rmax * (1.0 + CLOSED_SLACK)
    }

    fn forward(&self, w @ [u, v]: Point2) -> Result<Point2> {
        if !self.in_domain(w) {
            return Err(domain_error("kappa", &w));
        }
        let r = u.hypot(v);
        let (k, local) = Self::sector(v.atan2(u));
        let m = r * PI.sqrt() / 2.0;
        let [a, b] = rotate(k, m, m * local / FRAC_PI_4);
        let h = 0.5 * self.side;
        Ok([h + a, h + b])
    }

    fn inverse(&self, y: Point2) -> Result<Point2> {
        if !self.in_square(y) {
            return Err(domain_error("kappa inverse", &y));
        }
        Ok(match self.inverse_polar(y) {
            None => [0.0, 0.0],
            Some((r, theta)) => [r * theta.cos(), r * theta.sin()],
        })
    }

    fn jacobian(&self, w @ [u, v]: Point2) -> Result<Mat2> {
        if !self.in_domain(w) {
            return Err(domain_error("kappa", &w));
        }
        let r = u.hypot(v);
        if r == 0.0 {
            return Err(singular_error("kappa", &w));
        }
        let (k, theta) = Self::sector(v.atan2(u));
        // local frame: rotate the point back into the right-hand sector
        let [lu, lv] = rotate((4 - k) & 3, u, v);
        let a = PI.sqrt() / 2.0;
        let b = 2.0 / PI.sqrt();
        let local = Mat2::new(
            a * lu / r,
            a * lv / r,
            b * (theta * lu - lv) / r,
            b * (theta * lv + lu) / r,
        );
        let rot = rotation(k);
        Ok(rot * local * rot.transpose())
    }

    fn singular_distance(&self, [u, v]: Point2) -> f64 {
        let diagonal = (u.abs() - v.abs()).abs() / std::f64::consts::SQRT_2;
        diagonal.min(self.disc_radius() - u.hypot(v))
    }

    fn singular_set(&self) -> &'static str {
        "the four diagonal rays and the center (boundary circle excluded from checks)"
    }

    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        let rmax = self.disc_radius();
        loop {
            let u = open_uniform(rng, -1.0, 1.0);
            let v = open_uniform(rng, -1.0, 1.0);
            if u * u + v * v < 1.0 {
                return [u * rmax, v * rmax];
            }
        }
    }
}

/// The inverse of a planar map, as a map in its own right.
#[derive(Debug, Clone)]
pub struct Inverse<M>(pub M);

impl<M: PlaneMap> PlaneMap for Inverse<M> {
    fn name(&self) -> String {
        format!("{}^-1", self.0.name())
    }

    fn in_domain(&self, p: Point2) -> bool {
        self.0.inverse(p).is_ok()
    }

    fn forward(&self, p: Point2) -> Result<Point2> {
        self.0.inverse(p)
    }

    fn inverse(&self, p: Point2) -> Result<Point2> {
        self.0.forward(p)
    }

    fn jacobian(&self, p: Point2) -> Result<Mat2> {
        let x = self.0.inverse(p)?;
        self.0
            .jacobian(x)?
            .try_inverse()
            .ok_or_else(|| singular_error(&self.name(), &p))
    }

    fn declared_det(&self) -> f64 {
        self.0.declared_det().recip()
    }

    fn singular_distance(&self, p: Point2) -> f64 {
        match self.0.inverse(p) {
            Ok(x) => {
                let d = self.0.singular_distance(x);
                match self.0.jacobian(x) {
                    Ok(j) => d / j.norm().max(1.0),
                    Err(_) => 0.0,
                }
            }
            Err(_) => 0.0,
        }
    }

    fn singular_set(&self) -> &'static str {
        self.0.singular_set()
    }

    /// Pushforward of the inner map's uniform samples; uniform when the map
    /// has constant Jacobian determinant.
    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        loop {
            let x = self.0.sample_domain(rng);
            if let Ok(y) = self.0.forward(x) {
                return y;
            }
        }
    }
}

/// Result of straightening a corner. `singular` is set for the corner point itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Straightened {
    pub point: Point2,
    pub singular: bool,
}

/// `z ↦ z²/|z|` on the closed quadrant, valued in the closed upper half-plane.
pub fn corner_straighten(z @ [x, y]: Point2) -> Result<Straightened> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(domain_error("corner_straighten", &z));
    }
    let r = x.hypot(y);
    if r == 0.0 {
        return Ok(Straightened {
            point: [0.0, 0.0],
            singular: true,
        });
    }
    Ok(Straightened {
        point: [(x * x - y * y) / r, 2.0 * x * y / r],
        singular: false,
    })
}

/// [`corner_straighten`] as a map. It doubles area: `det J = 2` off the corner.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CornerStraighten;

impl PlaneMap for CornerStraighten {
    fn name(&self) -> String {
        "corner_straighten".into()
    }

    fn in_domain(&self, [x, y]: Point2) -> bool {
        x >= 0.0 && y >= 0.0
    }

    fn forward(&self, p: Point2) -> Result<Point2> {
        corner_straighten(p).map(|s| s.point)
    }

    fn inverse(&self, w @ [u, v]: Point2) -> Result<Point2> {
        if !(v >= 0.0 && u.is_finite()) {
            return Err(domain_error("corner_straighten inverse", &w));
        }
        let r = u.hypot(v);
        let half = 0.5 * v.atan2(u);
        Ok([r * half.cos(), r * half.sin()])
    }

    fn jacobian(&self, z @ [x, y]: Point2) -> Result<Mat2> {
        if !self.in_domain(z) {
            return Err(domain_error("corner_straighten", &z));
        }
        let r = x.hypot(y);
        if r == 0.0 {
            return Err(singular_error("corner_straighten", &z));
        }
        let r3 = r * r * r;
        let d = x * x - y * y;
        Ok(Mat2::new(
            2.0 * x / r - d * x / r3,
            -2.0 * y / r - d * y / r3,
            2.0 * y / r - 2.0 * x * x * y / r3,
            2.0 * x / r - 2.0 * x * y * y / r3,
        ))
    }

    fn declared_det(&self) -> f64 {
        2.0
    }

    fn singular_distance(&self, [x, y]: Point2) -> f64 {
        x.hypot(y)
    }

    fn singular_set(&self) -> &'static str {
        "the corner 0"
    }

    /// Samples the unit box `[0, 1)²` of the quadrant.
    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        [rng.random(), rng.random()]
    }
}

/// `(h, θ) ↦ (θ, height − h)`: turns a `(height, angle)` chart into the
/// `(angle, height)` chart of [`Chi`] while keeping orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeAxes {
    pub height: f64,
}

impl PlaneMap for ExchangeAxes {
    fn name(&self) -> String {
        "exchange".into()
    }
    fn in_domain(&self, [h, t]: Point2) -> bool {
        h.is_finite() && t.is_finite()
    }
    fn forward(&self, [h, t]: Point2) -> Result<Point2> {
        Ok([t, self.height - h])
    }
    fn inverse(&self, [t, g]: Point2) -> Result<Point2> {
        Ok([self.height - g, t])
    }
    fn jacobian(&self, _: Point2) -> Result<Mat2> {
        Ok(Mat2::new(0.0, 1.0, -1.0, 0.0))
    }
    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        [rng.random(), rng.random()]
    }
}

/// Diagonal linear map `(x, y) ↦ (sx·x, sy·y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisScale {
    pub sx: f64,
    pub sy: f64,
}

impl PlaneMap for AxisScale {
    fn name(&self) -> String {
        format!("scale({}, {})", self.sx, self.sy)
    }
    fn in_domain(&self, [x, y]: Point2) -> bool {
        x.is_finite() && y.is_finite()
    }
    fn forward(&self, [x, y]: Point2) -> Result<Point2> {
        Ok([self.sx * x, self.sy * y])
    }
    fn inverse(&self, [x, y]: Point2) -> Result<Point2> {
        Ok([x / self.sx, y / self.sy])
    }
    fn jacobian(&self, _: Point2) -> Result<Mat2> {
        Ok(Mat2::new(self.sx, 0.0, 0.0, self.sy))
    }
    fn declared_det(&self) -> f64 {
        self.sx * self.sy
    }
    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        [rng.random(), rng.random()]
    }
}

/// Left-to-right composition of planar maps: `stages[0]` is applied first.
#[derive(Debug)]
pub struct PlaneChain {
    pub stages: Vec<Box<dyn PlaneMap>>,
}

impl PlaneChain {
    pub fn new(stages: Vec<Box<dyn PlaneMap>>) -> Self {
        assert!(!stages.is_empty(), "empty chain");
        PlaneChain { stages }
    }
}

impl PlaneMap for PlaneChain {
    fn name(&self) -> String {
        let names: Vec<String> = self.stages.iter().rev().map(|s| s.name()).collect();
        names.join(" . ")
    }

    fn in_domain(&self, p: Point2) -> bool {
        self.forward(p).is_ok()
    }

    fn forward(&self, p: Point2) -> Result<Point2> {
        self.stages.iter().try_fold(p, |x, s| s.forward(x))
    }

    fn inverse(&self, p: Point2) -> Result<Point2> {
        self.stages.iter().rev().try_fold(p, |x, s| s.inverse(x))
    }

    fn jacobian(&self, p: Point2) -> Result<Mat2> {
        let mut x = p;
        let mut j = Mat2::identity();
        for s in &self.stages {
            j = s.jacobian(x)? * j;
            x = s.forward(x)?;
        }
        Ok(j)
    }

    fn declared_det(&self) -> f64 {
        self.stages.iter().map(|s| s.declared_det()).product()
    }

    fn singular_distance(&self, p: Point2) -> f64 {
        let mut x = p;
        let mut stretch = 1.0_f64;
        let mut d = f64::INFINITY;
        for s in &self.stages {
            d = d.min(s.singular_distance(x) / stretch);
            match (s.jacobian(x), s.forward(x)) {
                (Ok(j), Ok(y)) => {
                    stretch *= j.norm().max(1.0);
                    x = y;
                }
                _ => return 0.0,
            }
        }
        d
    }

    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        loop {
            let x = self.stages[0].sample_domain(rng);
            if self.in_domain(x) {
                return x;
            }
        }
    }
}

/// `λ = κ ∘ χ` from the cylinder `(R/Z) × (0, 1)` onto `(0, 1)² ∖ {y₀}`.
///
/// The top `p = 1` of the closed cylinder goes to `y₀ = (1/2, 1/2)` and the
/// bottom `p = 0` onto the boundary of the square.
#[derive(Debug)]
pub struct Lambda {
    chi: Chi,
    kappa: Kappa,
}

impl Default for Lambda {
    fn default() -> Self {
        Lambda {
            chi: Chi {
                circumference: 1.0,
                height: 1.0,
            },
            kappa: Kappa { side: 1.0 },
        }
    }
}

impl Lambda {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn puncture(&self) -> Point2 {
        [0.5, 0.5]
    }

    /// Continuous extension to the closed cylinder `(R/Z) × [0, 1]`.
    pub fn forward_closed(&self, [q, p]: Point2) -> Result<Point2> {
        if !(q.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(domain_error("lambda", &[q, p]));
        }
        self.kappa.forward(self.chi.forward_closed([q, p])?)
    }

    /// `λ⁻¹` as `(angle representative in [0, 1), height)`, or `None` outside
    /// `(0, 1)² ∖ {y₀}`. Uses the concentric polar form directly.
    #[inline]
    pub fn inverse_fast(&self, [x, y]: Point2) -> Option<(f64, f64)> {
        if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
            return None;
        }
        let (m, theta) = square_polar(x - 0.5, y - 0.5)?;
        // R = 2m/√π and p = 1 − πR²
        let p = 1.0 - 4.0 * m * m;
        Some((reduce_unchecked(theta / (2.0 * PI), 1.0), p))
    }
}

impl PlaneMap for Lambda {
    fn name(&self) -> String {
        "lambda".into()
    }

    fn in_domain(&self, [q, p]: Point2) -> bool {
        q.is_finite() && p > 0.0 && p < 1.0
    }

    fn forward(&self, x: Point2) -> Result<Point2> {
        if !self.in_domain(x) {
            return Err(domain_error("lambda", &x));
        }
        self.kappa.forward(self.chi.forward(x)?)
    }

    fn inverse(&self, y: Point2) -> Result<Point2> {
        self.inverse_fast(y)
            .map(|(q, p)| [q, p])
            .ok_or_else(|| domain_error("lambda inverse", &y))
    }

    fn jacobian(&self, x: Point2) -> Result<Mat2> {
        if !self.in_domain(x) {
            return Err(domain_error("lambda", &x));
        }
        let w = self.chi.forward(x)?;
        Ok(self.kappa.jacobian(w)? * self.chi.jacobian(x)?)
    }

    fn singular_distance(&self, [q, p]: Point2) -> f64 {
        // χ sends q = 1/8 + k/4 onto the diagonal rays of κ
        let diag = circle_distance(q - 0.125, 0.0, 0.25);
        diag.min(1.0 - p).min(p)
    }

    fn singular_set(&self) -> &'static str {
        "angles 1/8 + k/4 (diagonals of the square) and the top circle (puncture)"
    }

    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        [rng.random(), open_uniform(rng, 0.0, 1.0)]
    }
}

/// `λ'` from `(0, 1) × (R/cZ)` onto `((0, 1) × (0, c)) ∖ {z₀}`, `z₀ = (1/2, c/2)`.
///
/// Built as `scale ∘ κ_{√c} ∘ χ_{c,1} ∘ exchange`: the exchange sends
/// `(Q, P)` to `(angle P, height 1 − Q)`, so `Q → 0` collapses onto `z₀` and
/// `Q → 1` reaches the boundary of the rectangle.
#[derive(Debug)]
pub struct LambdaPrime {
    c: f64,
    chain: PlaneChain,
}

impl LambdaPrime {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 1.0) {
            return Err(Error::InvalidArgument(format!("lambda' needs c >= 1, got {c}")));
        }
        let sc = c.sqrt();
        let chain = PlaneChain::new(vec![
            Box::new(ExchangeAxes { height: 1.0 }),
            Box::new(Chi::new(c, 1.0)?),
            Box::new(Kappa::new(sc)?),
            Box::new(AxisScale {
                sx: 1.0 / sc,
                sy: sc,
            }),
        ]);
        Ok(LambdaPrime { c, chain })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn puncture(&self) -> Point2 {
        [0.5, 0.5 * self.c]
    }

    /// `λ'⁻¹` as `(Q, P representative in [0, c))`, or `None` outside the
    /// punctured open rectangle.
    #[inline]
    pub fn inverse_fast(&self, [x, y]: Point2) -> Option<(f64, f64)> {
        if !(x > 0.0 && x < 1.0 && y > 0.0 && y < self.c) {
            return None;
        }
        let sc = self.c.sqrt();
        let (m, theta) = square_polar((x - 0.5) * sc, (y - 0.5 * self.c) / sc)?;
        // disc radius R = 2m/√π; height 1 − πR²/c; Q = 1 − height
        let q = 4.0 * m * m / self.c;
        let angle = reduce_unchecked(theta * self.c / (2.0 * PI), self.c);
        Some((q, angle))
    }
}

impl PlaneMap for LambdaPrime {
    fn name(&self) -> String {
        format!("lambda'(c={})", self.c)
    }

    fn in_domain(&self, [q, p]: Point2) -> bool {
        q > 0.0 && q < 1.0 && p.is_finite()
    }

    fn forward(&self, x: Point2) -> Result<Point2> {
        if !self.in_domain(x) {
            return Err(domain_error("lambda'", &x));
        }
        self.chain.forward(x)
    }

    fn inverse(&self, z: Point2) -> Result<Point2> {
        self.inverse_fast(z)
            .map(|(q, p)| [q, p])
            .ok_or_else(|| domain_error("lambda' inverse", &z))
    }

    fn jacobian(&self, x: Point2) -> Result<Mat2> {
        if !self.in_domain(x) {
            return Err(domain_error("lambda'", &x));
        }
        self.chain.jacobian(x)
    }

    fn singular_distance(&self, [q, p]: Point2) -> f64 {
        let quarter = 0.25 * self.c;
        let diag = circle_distance(p - 0.125 * self.c, 0.0, quarter);
        diag.min(q).min(1.0 - q)
    }

    fn singular_set(&self) -> &'static str {
        "angles c(1/8 + k/4) (diagonals) and Q = 0 (puncture)"
    }

    fn sample_domain(&self, rng: &mut dyn RngCore) -> Point2 {
        [open_uniform(rng, 0.0, 1.0), rng.random::<f64>() * self.c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream;
    use approx::assert_abs_diff_eq;

    /// Fourth-order central differences.
    fn fd_jacobian(m: &dyn PlaneMap, p: Point2, h: f64) -> Mat2 {
        let mut j = Mat2::zeros();
        for col in 0..2 {
            let at = |t: f64| {
                let mut x = p;
                x[col] += t;
                m.forward(x).unwrap()
            };
            let (a, b, c, d) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
            for row in 0..2 {
                j[(row, col)] = (-a[row] + 8.0 * b[row] - 8.0 * c[row] + d[row]) / (12.0 * h);
            }
        }
        j
    }

    fn check_det_and_fd(m: &dyn PlaneMap, seed: u64, count: usize) {
        let mut rng = stream(seed, 0);
        let mut checked = 0;
        while checked < count {
            let p = m.sample_domain(&mut rng);
            if m.singular_distance(p) < 1e-4 {
                continue;
            }
            let j = m.jacobian(p).unwrap();
            assert!(
                (j.determinant() - m.declared_det()).abs() < 1e-9,
                "{}: det {} at {p:?}",
                m.name(),
                j.determinant()
            );
            if checked < 2000 {
                let f = fd_jacobian(m, p, 1e-6);
                let err = (f - j).abs().max() / j.abs().max().max(1.0);
                assert!(err < 1e-5, "{}: fd mismatch {err} at {p:?}", m.name());
            }
            checked += 1;
        }
    }

    #[test]
    fn chi_examples() {
        let chi = Chi::new(1.0, 1.0).unwrap();
        let r = PI.sqrt().recip();
        let a = chi.forward([0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(a[0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], 0.0, epsilon = 1e-15);
        // ρ(0.75) = sqrt(0.25/π), angle 2π·0.25 = π/2
        let b = chi.forward([0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], (0.25 / PI).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], 0.28209479177387814, epsilon = 1e-15);
        assert!(chi.forward([0.0, 1.0]).is_err());
        assert!(chi.forward([0.0, -0.1]).is_err());
    }

    #[test]
    fn chi_unit_determinant() {
        check_det_and_fd(&Chi::new(1.0, 1.0).unwrap(), 11, 10_000);
        check_det_and_fd(&Chi::new(2.5, 0.7).unwrap(), 12, 2_000);
    }

    #[test]
    fn kappa_examples() {
        let k = Kappa::new(1.0).unwrap();
        assert_eq!(k.forward([0.0, 0.0]).unwrap(), [0.5, 0.5]);
        let e = k.forward([PI.sqrt().recip(), 0.0]).unwrap();
        assert_abs_diff_eq!(e[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1], 0.5, epsilon = 1e-15);
        let top = k.forward([0.0, PI.sqrt().recip()]).unwrap();
        assert_abs_diff_eq!(top[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(top[1], 1.0, epsilon = 1e-15);
        assert!(k.forward([1.0, 0.0]).is_err());
        assert!(k.jacobian([0.0, 0.0]).is_err());
    }

    #[test]
    fn kappa_boundary_goes_to_square_boundary() {
        let k = Kappa::new(2.0).unwrap();
        for i in 0..360 {
            let t = i as f64 * PI / 180.0;
            let [x, y] = k
                .forward([k.disc_radius() * t.cos(), k.disc_radius() * t.sin()])
                .unwrap();
            let edge = x.min(y).min(2.0 - x).min(2.0 - y);
            assert!(edge.abs() < 1e-12, "angle {t}: {x}, {y}");
        }
    }

    #[test]
    fn kappa_round_trip_and_determinant() {
        for side in [1.0, 2.0f64.sqrt(), PI.sqrt()] {
            let k = Kappa::new(side).unwrap();
            let mut rng = stream(3, side.to_bits());
            for _ in 0..10_000 {
                let w = k.sample_domain(&mut rng);
                let back = k.inverse(k.forward(w).unwrap()).unwrap();
                assert!((back[0] - w[0]).abs() < 1e-10 && (back[1] - w[1]).abs() < 1e-10);
            }
            check_det_and_fd(&k, 5, 10_000);
        }
    }

    #[test]
    fn kappa_inverse_determinant() {
        check_det_and_fd(&Inverse(Kappa::new(1.0).unwrap()), 6, 10_000);
    }

    #[test]
    fn square_polar_agrees_with_kappa() {
        let k = Kappa::new(1.0).unwrap();
        let mut rng = stream(4, 0);
        for _ in 0..1000 {
            let w = k.sample_domain(&mut rng);
            let y = k.forward(w).unwrap();
            let (r, theta) = k.inverse_polar(y).unwrap();
            assert_abs_diff_eq!(r, w[0].hypot(w[1]), epsilon = 1e-12);
            assert!(circle_distance(theta, w[1].atan2(w[0]), 2.0 * PI) < 1e-12);
        }
    }

    #[test]
    fn corner_examples() {
        assert_eq!(corner_straighten([1.0, 0.0]).unwrap().point, [1.0, 0.0]);
        let i = corner_straighten([0.0, 1.0]).unwrap().point;
        assert_abs_diff_eq!(i[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(i[1], 0.0, epsilon = 1e-15);
        // (1+i)² = 2i and |1+i| = √2
        let d = corner_straighten([1.0, 1.0]).unwrap().point;
        assert_abs_diff_eq!(d[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 2.0f64.sqrt(), epsilon = 1e-15);
        let zero = corner_straighten([0.0, 0.0]).unwrap();
        assert!(zero.singular);
        assert_eq!(zero.point, [0.0, 0.0]);
        assert!(corner_straighten([-1.0, 0.5]).is_err());
    }

    #[test]
    fn corner_doubles_area() {
        check_det_and_fd(&CornerStraighten, 7, 10_000);
        let mut rng = stream(8, 0);
        for _ in 0..1000 {
            let z = CornerStraighten.sample_domain(&mut rng);
            let back = CornerStraighten
                .inverse(CornerStraighten.forward(z).unwrap())
                .unwrap();
            assert!((back[0] - z[0]).abs() < 1e-12 && (back[1] - z[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_round_trip_and_determinant() {
        let l = Lambda::new();
        let mut rng = stream(9, 0);
        for _ in 0..10_000 {
            let x = l.sample_domain(&mut rng);
            let y = l.forward(x).unwrap();
            assert!(y[0] > 0.0 && y[0] < 1.0 && y[1] > 0.0 && y[1] < 1.0);
            let back = l.inverse(y).unwrap();
            assert!(circle_distance(back[0], x[0], 1.0) < 1e-9);
            assert!((back[1] - x[1]).abs() < 1e-9);
        }
        check_det_and_fd(&l, 10, 10_000);
    }

    #[test]
    fn lambda_top_approaches_puncture() {
        let l = Lambda::new();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let [x, y] = l.forward([0.3, 1.0 - eps]).unwrap();
            let d = (x - 0.5).hypot(y - 0.5);
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-3);
        assert_eq!(l.forward_closed([0.3, 1.0]).unwrap(), [0.5, 0.5]);
    }

    #[test]
    fn lambda_prime_round_trip_and_determinant() {
        for c in [1.0, 1.5, 2.0, PI] {
            let l = LambdaPrime::new(c).unwrap();
            let mut rng = stream(11, c.to_bits());
            for _ in 0..10_000 {
                let x = l.sample_domain(&mut rng);
                let z = l.forward(x).unwrap();
                assert!(z[0] > 0.0 && z[0] < 1.0 && z[1] > 0.0 && z[1] < c, "{z:?}");
                let back = l.inverse(z).unwrap();
                assert!((back[0] - x[0]).abs() < 1e-9);
                assert!(circle_distance(back[1], x[1], c) < 1e-9);
            }
            check_det_and_fd(&l, 12, 10_000);
        }
    }

    #[test]
    fn lambda_prime_collapses_onto_z0() {
        let l = LambdaPrime::new(2.0).unwrap();
        let [x, y] = l.forward([1e-12, 0.7]).unwrap();
        assert!((x - 0.5).abs() < 1e-5 && (y - 1.0).abs() < 1e-5);
        assert!(l.inverse(l.puncture()).is_err());
    }

    #[test]
    fn lambda_prime_c1_fills_the_punctured_square() {
        let l = LambdaPrime::new(1.0).unwrap();
        let mut rng = stream(13, 0);
        for _ in 0..100_000 {
            let z = l.forward(l.sample_domain(&mut rng)).unwrap();
            assert!(z[0] > 0.0 && z[0] < 1.0 && z[1] > 0.0 && z[1] < 1.0);
            assert_ne!(z, [0.5, 0.5]);
        }
    }
}
