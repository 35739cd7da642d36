//! Exact discrete optimal transport, closed-form quadratic transport on the
//! line, and maps lifted from points to configurations.

mod discrete;
mod lift;
mod one_d;

pub use discrete::{solve_discrete_ot, solve_transport, DualCertificate, TransportPlan};
pub use lift::{lift_map, lift_potential, AffineShift, IdentityPlus, PointMap};
pub use one_d::{solve_1d_quadratic, MonotoneMap1D, QuantileGrid, DEFAULT_GRID_SIZE};
