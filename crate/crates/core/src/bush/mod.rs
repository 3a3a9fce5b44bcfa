//! Bush assembly from kernels, α/β counting over a partition, and the
//! neighbour-exchange apparatus (s-normal families, `Q(Y, u)`, separable
//! stars, `T(u)`).

mod alpha_beta;
mod assembly;
mod exchange;

pub use alpha_beta::{alpha_beta_count, AlphaBetaParams, AlphaBetaReport, ClassInfo, ClassType, CountingCase};
pub use assembly::{assemble_bush, check_assembly_input, AssemblyInput};
pub use exchange::{
    discover_t, is_s_normal, is_separable, is_star, neighbor_exchange, q_set, s_normalize, separable_star,
    ExchangeIndex, NeighborExchange, TOutcome,
};
