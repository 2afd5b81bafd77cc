//! Hilbert symbols over `Q` and explicit cocycle models of the metaplectic
//! `SL_2` and of two double covers of `GL_2`.

mod gl2;
mod hilbert;
pub mod selftest;
mod sl2;

pub use gl2::{
    commutator, conj_action, h_alpha1, h_alpha2, mgl2_inv, mgl2_mul, mgl2_product, v_factor,
    w_alpha1, Cover, MetaGL2Elem,
};
pub use hilbert::{hilbert, hilbert_product, relevant_places, Place};
pub use selftest::{run_all_selftests, run_selftest, SelfTest, SelfTestReport};
pub use sl2::{
    alpha_cocycle, embed_sl2_gelbart, h_tilde, mat2, mat2_det, mat2_identity, mat2_inv_sl,
    mat2_mul, msl2_inv, msl2_mul, msl2_product, steinberg_opposite_identity, w_tilde, x_neg,
    x_of, x_pos, Mat2, MetaSL2Elem, Sl2Generator,
};
