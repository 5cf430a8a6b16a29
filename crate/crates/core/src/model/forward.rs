//! Forward and backward passes shared by training and inference.
//!
//! Every model maps an embedding-layer input `x` (the document vector, or
//! for PV-DM the document vector concatenated with context word vectors) to
//! a pre-activation vector, applies the coding nonlinearity and predicts a
//! term with a softmax restricted to a [`SoftmaxSupport`].

use super::binarize::{round_activation, sigmoid, Activation};
use super::code::{pack_bits, BinaryCode};
use super::params::{ModelKind, ModelParams, ModelShape};
use crate::error::{Error, Result};

/// Read access to model parameters, converted to `f64`.
pub trait ParamSource {
    fn shape(&self) -> &ModelShape;
    fn softmax_row(&self, id: u32, out: &mut [f64]);
    fn softmax_bias(&self, id: u32) -> f64;
    /// Whole `doc_dim × code_bits` projection, row-major.
    fn projection(&self, out: &mut [f64]);
    fn word_row(&self, id: u32, out: &mut [f64]);
}

impl ParamSource for ModelParams {
    fn shape(&self) -> &ModelShape {
        &self.shape
    }

    fn softmax_row(&self, id: u32, out: &mut [f64]) {
        widen(self.softmax_weights.row(id as usize), out);
    }

    fn softmax_bias(&self, id: u32) -> f64 {
        self.softmax_bias[id as usize] as f64
    }

    fn projection(&self, out: &mut [f64]) {
        let p = self.projection.as_ref().expect("model has a projection");
        widen(p.as_slice(), out);
    }

    fn word_row(&self, id: u32, out: &mut [f64]) {
        let w = self.word_embeddings.as_ref().expect("model has word embeddings");
        widen(w.row(id as usize), out);
    }
}

#[inline]
pub(crate) fn widen(src: &[f32], out: &mut [f64]) {
    for (o, &s) in out.iter_mut().zip(src) {
        *o = s as f64;
    }
}

/// Vocabulary rows participating in one softmax evaluation. Entry 0 is the
/// target; the others carry additive logit corrections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SoftmaxSupport {
    pub ids: Vec<u32>,
    pub corrections: Vec<f64>,
}

impl SoftmaxSupport {
    /// The exact softmax: target first, then every other id in order.
    pub fn full(target: u32, vocab_size: usize) -> Self {
        let mut ids = Vec::with_capacity(vocab_size);
        ids.push(target);
        ids.extend((0..vocab_size as u32).filter(|&i| i != target));
        SoftmaxSupport {
            corrections: vec![0.0; ids.len()],
            ids,
        }
    }

    pub fn clear(&mut self) {
        self.ids.clear();
        self.corrections.clear();
    }

    pub fn push(&mut self, id: u32, correction: f64) {
        self.ids.push(id);
        self.corrections.push(correction);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn target(&self) -> u32 {
        self.ids[0]
    }
}

/// Scratch buffers and results of [`forward_backward`].
#[derive(Debug, Clone, Default)]
pub struct Gradients {
    pub loss: f64,
    /// Gradient w.r.t. the embedding-layer input.
    pub input: Vec<f64>,
    /// Gradient for each support row, `support.len() × softmax_width`.
    pub rows: Vec<f64>,
    /// Gradient for each support bias.
    pub bias: Vec<f64>,
    /// Gradient w.r.t. the projection (Real-Binary only).
    pub projection: Vec<f64>,
    /// Softmax input of the last pass.
    pub hidden: Vec<f64>,
    pre: Vec<f64>,
    cache: Vec<f64>,
    weights: Vec<f64>,
    proj: Vec<f64>,
    grad_hidden: Vec<f64>,
}

impl Gradients {
    pub fn new() -> Self {
        Self::default()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Computes `pre = f(x)` for the model's embedding-to-coding map.
fn pre_activation(shape: &ModelShape, x: &[f64], proj: &[f64], pre: &mut Vec<f64>) {
    pre.clear();
    match shape.kind {
        ModelKind::RealBinaryPvdbow => {
            let c = shape.code_bits;
            pre.resize(c, 0.0);
            for (i, &xi) in x.iter().enumerate() {
                let row = &proj[i * c..(i + 1) * c];
                for (p, &w) in pre.iter_mut().zip(row) {
                    *p += xi * w;
                }
            }
        }
        _ => pre.extend_from_slice(x),
    }
}

/// Softmax over the support rows with logits `w_j·h + b_j + correction_j`.
/// Leaves `dL/dz_j` in `dlogits`, row gradients in `rows` and the gradient
/// w.r.t. `h` in `grad_hidden`; returns `-log p_0`.
fn softmax_core<P: ParamSource + ?Sized>(
    params: &P,
    hidden: &[f64],
    support: &SoftmaxSupport,
    weights: &mut Vec<f64>,
    dlogits: &mut Vec<f64>,
    rows: &mut Vec<f64>,
    grad_hidden: &mut Vec<f64>,
) -> Result<f64> {
    let width = hidden.len();
    let n = support.len();
    weights.resize(n * width, 0.0);
    dlogits.resize(n, 0.0);
    let mut max = f64::NEG_INFINITY;
    for (j, (&id, &corr)) in support.ids.iter().zip(&support.corrections).enumerate() {
        let row = &mut weights[j * width..(j + 1) * width];
        params.softmax_row(id, row);
        let z = dot(row, hidden) + params.softmax_bias(id) + corr;
        dlogits[j] = z;
        max = max.max(z);
    }
    let sum: f64 = dlogits.iter().map(|&z| (z - max).exp()).sum();
    let log_z = max + sum.ln();
    let loss = log_z - dlogits[0];
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss);
    }
    for (j, z) in dlogits.iter_mut().enumerate() {
        *z = (*z - log_z).exp() - if j == 0 { 1.0 } else { 0.0 };
    }

    rows.resize(n * width, 0.0);
    grad_hidden.clear();
    grad_hidden.resize(width, 0.0);
    for j in 0..n {
        let dz = dlogits[j];
        let w = &weights[j * width..(j + 1) * width];
        let gr = &mut rows[j * width..(j + 1) * width];
        for k in 0..width {
            gr[k] = dz * hidden[k];
            grad_hidden[k] += dz * w[k];
        }
    }
    Ok(loss)
}

/// Loss and gradients of the softmax layer alone, for a given softmax input.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxGrads {
    pub loss: f64,
    /// `support.len() × width` row gradients, in support order.
    pub rows: Vec<f64>,
    pub bias: Vec<f64>,
    pub hidden: Vec<f64>,
}

pub fn softmax_loss_grad<P: ParamSource + ?Sized>(
    params: &P,
    hidden: &[f64],
    support: &SoftmaxSupport,
) -> Result<SoftmaxGrads> {
    let shape = params.shape();
    if hidden.len() != shape.softmax_width() {
        return Err(Error::shape(shape.softmax_width(), hidden.len()));
    }
    check_support(support, shape.vocab_size)?;
    let mut weights = Vec::new();
    let mut out = SoftmaxGrads {
        loss: 0.0,
        rows: Vec::new(),
        bias: Vec::new(),
        hidden: Vec::new(),
    };
    out.loss = softmax_core(params, hidden, support, &mut weights, &mut out.bias, &mut out.rows, &mut out.hidden)?;
    Ok(out)
}

fn check_support(support: &SoftmaxSupport, vocab_size: usize) -> Result<()> {
    if support.is_empty() || support.ids.len() != support.corrections.len() {
        return Err(Error::shape(support.ids.len().max(1), support.corrections.len()));
    }
    if let Some(&bad) = support.ids.iter().find(|&&id| id as usize >= vocab_size) {
        return Err(Error::shape(vocab_size, bad as usize));
    }
    Ok(())
}

/// Loss and gradients for predicting `support.target()` from input `x`.
///
/// The loss is `-log softmax(z)[0]` with `z_j = w_j·h + b_j + correction_j`
/// over the support rows, where `h = act(pre(x))`. With
/// [`Activation::RoundedSigmoid`] the softmax sees the rounded code while the
/// gradient passes through the un-rounded sigmoid.
pub fn forward_backward<P: ParamSource + ?Sized>(
    params: &P,
    x: &[f64],
    support: &SoftmaxSupport,
    act: Activation,
    g: &mut Gradients,
) -> Result<f64> {
    let shape = *params.shape();
    if x.len() != shape.input_width() {
        return Err(Error::shape(shape.input_width(), x.len()));
    }
    check_support(support, shape.vocab_size)?;
    let width = shape.softmax_width();

    if shape.kind == ModelKind::RealBinaryPvdbow {
        g.proj.resize(shape.doc_dim * shape.code_bits, 0.0);
        params.projection(&mut g.proj);
    }
    pre_activation(&shape, x, &g.proj, &mut g.pre);
    g.hidden.resize(width, 0.0);
    g.cache.resize(width, 0.0);
    act.forward(&g.pre, &mut g.hidden, &mut g.cache);

    let loss = softmax_core(
        params,
        &g.hidden,
        support,
        &mut g.weights,
        &mut g.bias,
        &mut g.rows,
        &mut g.grad_hidden,
    )?;

    act.backward(&mut g.grad_hidden, &g.cache);

    match shape.kind {
        ModelKind::RealBinaryPvdbow => {
            let c = shape.code_bits;
            g.input.clear();
            g.input.resize(shape.doc_dim, 0.0);
            g.projection.resize(shape.doc_dim * c, 0.0);
            for (i, &xi) in x.iter().enumerate() {
                let prow = &g.proj[i * c..(i + 1) * c];
                g.input[i] = dot(prow, &g.grad_hidden);
                for (gp, &gh) in g.projection[i * c..(i + 1) * c].iter_mut().zip(&g.grad_hidden) {
                    *gp = xi * gh;
                }
            }
        }
        _ => {
            g.input.clear();
            g.input.extend_from_slice(&g.grad_hidden);
            g.projection.clear();
        }
    }
    g.loss = loss;
    Ok(loss)
}

/// PV-DBOW family step: predicts a term from the document vector alone.
pub fn pvdbow_forward<P: ParamSource + ?Sized>(
    params: &P,
    doc_vector: &[f64],
    support: &SoftmaxSupport,
    g: &mut Gradients,
) -> Result<f64> {
    if params.shape().kind == ModelKind::BinaryPvdm {
        return Err(Error::InvalidConfig("pvdbow_forward called on a PV-DM model".into()));
    }
    forward_backward(params, doc_vector, support, params.shape().kind.activation(), g)
}

/// Concatenates the document vector with the context word embeddings.
pub fn pvdm_input<P: ParamSource + ?Sized>(params: &P, doc_vector: &[f64], context: &[u32], out: &mut Vec<f64>) -> Result<()> {
    let shape = params.shape();
    if context.len() != shape.context_window {
        return Err(Error::shape(shape.context_window, context.len()));
    }
    if doc_vector.len() != shape.doc_dim {
        return Err(Error::shape(shape.doc_dim, doc_vector.len()));
    }
    out.clear();
    out.extend_from_slice(doc_vector);
    let dw = shape.word_dim;
    for &id in context {
        if id as usize >= shape.vocab_size {
            return Err(Error::shape(shape.vocab_size, id as usize));
        }
        let start = out.len();
        out.resize(start + dw, 0.0);
        params.word_row(id, &mut out[start..]);
    }
    Ok(())
}

/// PV-DM step. After the call `g.input[..doc_dim]` is the document gradient
/// and the following `word_dim`-sized blocks belong to the context words.
pub fn pvdm_forward<P: ParamSource + ?Sized>(
    params: &P,
    doc_vector: &[f64],
    context: &[u32],
    support: &SoftmaxSupport,
    g: &mut Gradients,
) -> Result<f64> {
    if params.shape().kind != ModelKind::BinaryPvdm {
        return Err(Error::InvalidConfig("pvdm_forward called on a non PV-DM model".into()));
    }
    let mut x = Vec::with_capacity(params.shape().input_width());
    pvdm_input(params, doc_vector, context, &mut x)?;
    forward_backward(params, &x, support, Activation::RoundedSigmoid, g)
}

/// Coding-layer pre-activations for a document vector.
pub fn code_logits<P: ParamSource + ?Sized>(params: &P, doc_vector: &[f64]) -> Result<Vec<f64>> {
    let shape = *params.shape();
    if doc_vector.len() != shape.doc_dim {
        return Err(Error::shape(shape.doc_dim, doc_vector.len()));
    }
    let mut proj = Vec::new();
    if shape.kind == ModelKind::RealBinaryPvdbow {
        proj.resize(shape.doc_dim * shape.code_bits, 0.0);
        params.projection(&mut proj);
    }
    let mut pre = Vec::new();
    pre_activation(&shape, doc_vector, &proj, &mut pre);
    Ok(pre)
}

/// The binary code of a document vector: the rounded sigmoid of its coding
/// pre-activations. For PV-DM this is the document segment of the
/// concatenated code. `None` for real-valued models.
pub fn document_code<P: ParamSource + ?Sized>(params: &P, doc_vector: &[f64]) -> Result<Option<BinaryCode>> {
    if !params.shape().kind.has_code() {
        return Ok(None);
    }
    let pre = code_logits(params, doc_vector)?;
    if pre.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let bits: Vec<u8> = pre.iter().map(|&z| round_activation(sigmoid(z)) as u8).collect();
    pack_bits(&bits).map(Some)
}

/// Real-Binary PV-DBOW: the untouched document vector and its short code.
pub fn real_binary_forward<P: ParamSource + ?Sized>(params: &P, doc_vector: &[f64]) -> Result<(Vec<f64>, BinaryCode)> {
    if params.shape().kind != ModelKind::RealBinaryPvdbow {
        return Err(Error::InvalidConfig("real_binary_forward needs a real-binary model".into()));
    }
    let code = document_code(params, doc_vector)?.expect("real-binary models produce codes");
    Ok((doc_vector.to_vec(), code))
}
