//! Large-N objects: the saddle of S, frozen boundary, limit shape, and the
//! incomplete beta, discrete Jacobi and symmetric Pearcey limit kernels.

mod beta;
mod jacobi;
mod limits;
mod pearcey;
mod saddle;

pub use beta::{incomplete_beta_kernel, incomplete_beta_via};
pub use jacobi::{discrete_jacobi_closed_form, discrete_jacobi_l};
pub use limits::{
    bulk_kernel_limit_check, pearcey_lattice_point, pearcey_limit_check, wall_limit_check,
    LimitComparison, Offset,
};
pub use pearcey::{
    gaussian_term, pearcey_integral_duffy, pearcey_integral_polar, symmetric_pearcey_k, PearceyGrid, PearceyPoint,
};
pub use saddle::{
    action_derivative, action_s, cubic_discriminant, cubic_r, eval_cubic, frozen_boundary, limit_density, limit_shape_h,
    q_poly, saddle, Region, SaddleData, ScaledPoint,
};
