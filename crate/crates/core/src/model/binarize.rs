use crate::error::{Error, Result};

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Rounds a sigmoid activation; exactly 0.5 maps to 1.
#[inline]
pub fn round_activation(s: f64) -> f64 {
    if s >= 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Nonlinearity placed in front of the softmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// Sigmoid followed by rounding in the forward pass; the backward pass
    /// uses the derivative of the un-rounded sigmoid.
    RoundedSigmoid,
    /// Continuous sigmoid, the smooth surrogate of `RoundedSigmoid`.
    Sigmoid,
    /// No nonlinearity (real-valued paragraph vectors).
    Identity,
}

impl Activation {
    /// Writes activations into `out` and sigmoid values into `cache`.
    pub fn forward(self, pre: &[f64], out: &mut [f64], cache: &mut [f64]) {
        match self {
            Activation::RoundedSigmoid => {
                for ((o, c), &x) in out.iter_mut().zip(cache.iter_mut()).zip(pre) {
                    *c = sigmoid(x);
                    *o = round_activation(*c);
                }
            }
            Activation::Sigmoid => {
                for ((o, c), &x) in out.iter_mut().zip(cache.iter_mut()).zip(pre) {
                    *c = sigmoid(x);
                    *o = *c;
                }
            }
            Activation::Identity => out.copy_from_slice(pre),
        }
    }

    /// In-place conversion of the gradient w.r.t. activations into the
    /// gradient w.r.t. the pre-activations.
    pub fn backward(self, grad: &mut [f64], cache: &[f64]) {
        match self {
            Activation::RoundedSigmoid | Activation::Sigmoid => {
                for (g, &s) in grad.iter_mut().zip(cache) {
                    *g *= s * (1.0 - s);
                }
            }
            Activation::Identity => {}
        }
    }
}

/// Sigmoid then round-half-up. Returns the {0,1} code and the sigmoid
/// activations needed by [`binarize_backward`].
pub fn binarize_forward(logits: &[f64]) -> Result<(Vec<u8>, Vec<f64>)> {
    if logits.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let cache: Vec<f64> = logits.iter().map(|&x| sigmoid(x)).collect();
    let code = cache.iter().map(|&s| round_activation(s) as u8).collect();
    Ok((code, cache))
}

/// Straight-through backward pass: `grad_out * s * (1 - s)`.
pub fn binarize_backward(grad_out: &[f64], cache: &[f64]) -> Result<Vec<f64>> {
    if grad_out.len() != cache.len() {
        return Err(Error::shape(cache.len(), grad_out.len()));
    }
    let mut grad = grad_out.to_vec();
    Activation::RoundedSigmoid.backward(&mut grad, cache);
    Ok(grad)
}
