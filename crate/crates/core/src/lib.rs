pub mod asymptotics;
pub mod characters;
pub mod chebyshev_jacobi;
pub mod ddouble;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod scalar;
pub mod special;

pub use characters::{CharacterParams, SignaturePartition};
pub use chebyshev_jacobi::{HalfInt, QuadratureSpec, ThetaRule};
pub use ddouble::DoubleDouble;
pub use dynamics::{LevelIndex, ParticleConfig, PathConfig};
pub use error::{Error, Result};
pub use kernel::{ContourKind, ContourSpec, KernelEvaluator, KernelPoint};
pub use scalar::Real;

pub type ThetaRule64 = ThetaRule<f64>;
pub type ThetaRuleDD = ThetaRule<DoubleDouble>;
