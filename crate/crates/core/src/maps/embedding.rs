//! The cube embedding `φ = (λ × λ') ∘ π ∘ Ψ` and the ball embedding
//! `ψ = (κ⁻¹ × id) ∘ φ ∘ (κ × ⋯ × κ)`.

use nalgebra::DMatrix;

use super::phase::{
    shear, wrap_project, BlockProduct, Compose, Domain, Identity, PhaseMap, PlaneProduct,
    Restricted,
};
use super::plane::{Inverse, Kappa, Lambda, LambdaPrime, PlaneMap, Point2};
use crate::config::EmbeddingConfig;
use crate::error::Result;
use crate::quotient::reduce_unchecked;

/// `φ: (0,1)^{2n} → (0,1)^{2n−1} × (0,c)`.
///
/// Coordinates keep the phase-space order, so the long factor `(0, c)` is
/// coordinate 3 (`p₂`). For `n ≥ 3` the trailing `2n − 4` coordinates pass
/// through unchanged.
#[derive(Debug)]
pub struct Phi {
    config: EmbeddingConfig,
    map: Restricted<Box<dyn PhaseMap>>,
    lambda: Lambda,
    lambda_prime: LambdaPrime,
}

pub fn build_phi(config: &EmbeddingConfig) -> Result<Phi> {
    config.validate()?;
    let c = config.c;
    let core = Compose::new(vec![
        Box::new(shear(c)?),
        Box::new(wrap_project(c)?),
        Box::new(PlaneProduct {
            factors: vec![Box::new(Lambda::new()), Box::new(LambdaPrime::new(c)?)],
        }),
    ])?;
    let map: Box<dyn PhaseMap> = if config.n == 2 {
        Box::new(core)
    } else {
        Box::new(BlockProduct {
            blocks: vec![Box::new(core), Box::new(Identity(2 * config.n - 4))],
        })
    };
    Ok(Phi {
        config: config.clone(),
        map: Restricted {
            map,
            domain: Domain::unit_cube(config.dim()),
        },
        lambda: Lambda::new(),
        lambda_prime: LambdaPrime::new(c)?,
    })
}

impl Phi {
    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn lambda_prime(&self) -> &LambdaPrime {
        &self.lambda_prime
    }

    /// Whether `y` lies in the target polydisc `(0,1)^{2n−1} × (0,c)`.
    pub fn in_codomain(&self, y: &[f64]) -> bool {
        y.len() == self.config.dim()
            && y.iter().enumerate().all(|(i, &v)| {
                let hi = if i == 3 { self.config.c } else { 1.0 };
                v > 0.0 && v < hi
            })
    }

    /// The unique cube point mapping to `y`, or `None` when `y` is not in the image.
    pub fn preimage(&self, y: &[f64]) -> Option<Vec<f64>> {
        if y.len() != self.config.dim() {
            return None;
        }
        let (q1bar, p1) = self.lambda.inverse_fast([y[0], y[1]])?;
        let (q2, p2bar) = self.lambda_prime.inverse_fast([y[2], y[3]])?;
        let pre = invert_wrapped_shear(self.config.c, q1bar, p1, q2, p2bar)?;
        let mut x = pre.to_vec();
        for &v in &y[4..] {
            if !(v > 0.0 && v < 1.0) {
                return None;
            }
            x.push(v);
        }
        Some(x)
    }
}

/// Inverts `π ∘ Ψ` on the open unit cube: `p₁ = P₁`, `q² = Q²`,
/// `q¹ ≡ Q̄¹ + c·Q²` (mod 1) and `p₂ ≡ P̄₂ − c·P₁` (mod c), with both
/// reconstructed coordinates required to lie in `(0, 1)`.
#[inline]
pub(crate) fn invert_wrapped_shear(
    c: f64,
    q1bar: f64,
    p1: f64,
    q2: f64,
    p2bar: f64,
) -> Option<[f64; 4]> {
    if !(p1 > 0.0 && p1 < 1.0 && q2 > 0.0 && q2 < 1.0) {
        return None;
    }
    let q1 = reduce_unchecked(q1bar + c * q2, 1.0);
    let p2 = reduce_unchecked(p2bar - c * p1, c);
    (q1 > 0.0 && p2 > 0.0 && p2 < 1.0).then_some([q1, p1, q2, p2])
}

impl PhaseMap for Phi {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn name(&self) -> String {
        format!("phi(n={}, c={})", self.config.n, self.config.c)
    }
    fn domain(&self) -> Domain {
        self.map.domain()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.map.eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.map.jacobian(x)
    }
    fn singular_distance(&self, x: &[f64]) -> f64 {
        self.map.singular_distance(x)
    }
    fn components(&self) -> Vec<String> {
        self.map.components()
    }
}

/// `ψ: B^{2n}_r → B²_r × R^{2n−2}` with `r = π^{−1/2}`.
#[derive(Debug)]
pub struct Psi {
    config: EmbeddingConfig,
    phi: Phi,
    kappa: Kappa,
    map: Restricted<Compose>,
}

/// Builds `ψ` for the hull bound `a`; requires `config.c == 1/a`.
pub fn build_psi(config: &EmbeddingConfig, a: f64) -> Result<Psi> {
    let expected = EmbeddingConfig::for_hull_bound(config.n, a)?;
    if (expected.c - config.c).abs() > 1e-12 * config.c {
        return Err(crate::error::Error::Config(format!(
            "psi with a = {a} needs c = {}, config has c = {}",
            expected.c, config.c
        )));
    }
    let n = config.n;
    let kappa = Kappa::new(1.0)?;
    let squares = PlaneProduct {
        factors: (0..n)
            .map(|_| Box::new(kappa) as Box<dyn PlaneMap>)
            .collect(),
    };
    let back = BlockProduct {
        blocks: vec![
            Box::new(PlaneProduct {
                factors: vec![Box::new(Inverse(kappa))],
            }),
            Box::new(Identity(2 * n - 2)),
        ],
    };
    let map = Compose::new(vec![
        Box::new(squares),
        Box::new(build_phi(config)?),
        Box::new(back),
    ])?;
    Ok(Psi {
        config: config.clone(),
        phi: build_phi(config)?,
        kappa,
        map: Restricted {
            map,
            domain: Domain::OpenBall {
                dim: config.dim(),
                radius: config.r,
            },
        },
    })
}

impl Psi {
    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    /// Whether the first symplectic pair lies in the open disc `B²_r`.
    pub fn first_factor_inside(&self, y: &[f64]) -> bool {
        y.len() >= 2 && y[0] * y[0] + y[1] * y[1] < self.config.r * self.config.r
    }

    /// The unique ball point mapping to `y`, or `None` when `y` is not in the image.
    pub fn preimage(&self, y: &[f64]) -> Option<Vec<f64>> {
        if !self.first_factor_inside(y) {
            return None;
        }
        let square: Point2 = self.kappa.forward([y[0], y[1]]).ok()?;
        let mut image = vec![square[0], square[1]];
        image.extend_from_slice(&y[2..]);
        let cube = self.phi.preimage(&image)?;
        let mut ball = Vec::with_capacity(cube.len());
        for pair in cube.chunks_exact(2) {
            ball.extend_from_slice(&self.kappa.inverse([pair[0], pair[1]]).ok()?);
        }
        let norm2: f64 = ball.iter().map(|v| v * v).sum();
        (norm2 < self.config.r * self.config.r).then_some(ball)
    }
}

impl PhaseMap for Psi {
    fn dim(&self) -> usize {
        self.map.dim()
    }
    fn name(&self) -> String {
        format!("psi(n={}, a={})", self.config.n, 1.0 / self.config.c)
    }
    fn domain(&self) -> Domain {
        self.map.domain()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.map.eval(x)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.map.jacobian(x)
    }
    fn singular_distance(&self, x: &[f64]) -> f64 {
        self.map.singular_distance(x)
    }
    fn components(&self) -> Vec<String> {
        self.map.components()
    }
}
