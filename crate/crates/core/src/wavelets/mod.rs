//! Daubechies wavelets and the tensor-product basis `ψ_{jlw}` on `R^p`.

pub mod checks;
mod family;
mod filter;
mod index;

pub use family::{Generator, WaveletFamily, MAX_ORDER};
pub use filter::{daubechies_low_pass, quadrature_mirror};
pub use index::{
    active_indices, eval_tensor, for_each_basis_at, types_at_level, AxisBox, TensorIndex, MAX_DIM,
};

/// Default Daubechies order for experiments whose largest smoothness is
/// `eta_max`: `⌈eta_max⌉ + 3`.
pub fn default_order(eta_max: f64) -> usize {
    (eta_max.max(0.0).ceil() as usize + 3).min(MAX_ORDER)
}
