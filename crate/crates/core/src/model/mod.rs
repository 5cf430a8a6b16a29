//! Binary paragraph vector models: parameters, the rounding coding layer
//! and the forward/backward passes.

mod binarize;
mod code;
mod forward;
mod io;
mod params;

pub use binarize::{binarize_backward, binarize_forward, round_activation, sigmoid, Activation};
pub use code::{pack_bits, unpack_bits, BinaryCode, MAX_CODE_BITS};
pub use forward::{
    code_logits, document_code, forward_backward, pvdbow_forward, pvdm_forward, pvdm_input, real_binary_forward,
    softmax_loss_grad, Gradients, ParamSource, SoftmaxGrads, SoftmaxSupport,
};
pub(crate) use code::words_for;
pub(crate) use forward::widen;
pub use params::{Matrix, ModelKind, ModelParams, ModelShape};
