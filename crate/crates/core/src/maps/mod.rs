//! The primitive symplectomorphisms and the algebra that assembles `φ` and `ψ`.

pub mod check;
pub mod embedding;
pub mod phase;
pub mod plane;

pub use check::{
    check_injectivity, check_phi_containment, check_psi_containment, check_symplectic,
    fd_jacobian, image_volume, ContainmentReport, InjectivityReport, SymplecticOptions,
    SymplecticReport, VolumeReport,
};
pub use embedding::{build_phi, build_psi, Phi, Psi};
pub use phase::{
    omega, shear, symplectic_defect, wrap_project, BlockProduct, Compose, Domain, Identity,
    LinearMap, PhaseMap, PlaneProduct, Restricted, Wrap,
};
pub use plane::{
    corner_straighten, square_polar, AxisScale, Chi, CornerStraighten, ExchangeAxes, Inverse,
    Kappa, Lambda, LambdaPrime, Mat2, PlaneChain, PlaneMap, Point2, Straightened,
};
