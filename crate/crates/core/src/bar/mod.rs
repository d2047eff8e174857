//! Reduced cyclic chains CC_*(𝒜_n)((u)) and their operators.

mod chain;
mod ops;

pub use chain::{BarWord, ChainKey, Shape, UChain};
pub use ops::{
    cap_b11, cap_b11_word, cap_big_b11, cap_big_b11_word, connes_b, connes_b_word, cyclic_d, d_du,
    gamma_op, hoch_b, hoch_b_word, lie_derivative, CAP_SIGN,
};

/// Default bar cap L = (n+1)(N+U+1) + n for t-order N and top u-power U.
pub fn default_bar_cap(n: usize, order: u32, u_top: i64) -> usize {
    (n + 1) * (order as usize + u_top.max(0) as usize + 1) + n
}
