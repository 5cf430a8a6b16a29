use std::sync::atomic::{AtomicU32, Ordering};

use crate::error::{Error, Result};

/// One AdaGrad coordinate update: `state += g²`,
/// `param -= lr * g / (eps + sqrt(state))`.
#[inline]
pub fn adagrad_step(param: f64, grad: f64, state: f64, lr: f64, eps: f64) -> (f64, f64) {
    let state = state + grad * grad;
    (param - lr * grad / (eps + state.sqrt()), state)
}

/// Dense AdaGrad update over matching slices.
pub fn adagrad_update(param: &mut [f64], grad: &[f64], state: &mut [f64], lr: f64, eps: f64) -> Result<()> {
    if param.len() != grad.len() || state.len() != grad.len() {
        return Err(Error::shape(param.len(), grad.len().min(state.len())));
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient);
    }
    for ((p, &g), s) in param.iter_mut().zip(grad).zip(state.iter_mut()) {
        (*p, *s) = adagrad_step(*p, g, *s, lr, eps);
    }
    Ok(())
}

/// An `f32` cell with relaxed atomic loads and stores. Concurrent
/// read-modify-write sequences may lose updates but never tear values.
#[derive(Debug, Default)]
#[repr(transparent)]
pub struct AtomicF32(AtomicU32);

impl AtomicF32 {
    pub fn new(v: f32) -> Self {
        AtomicF32(AtomicU32::new(v.to_bits()))
    }

    #[inline]
    pub fn load(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub fn store(&self, v: f32) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }
}

pub fn atomic_vec(values: &[f32]) -> Vec<AtomicF32> {
    values.iter().map(|&v| AtomicF32::new(v)).collect()
}

pub fn atomic_zeros(n: usize) -> Vec<AtomicF32> {
    (0..n).map(|_| AtomicF32::new(0.0)).collect()
}

pub fn snapshot(cells: &[AtomicF32]) -> Vec<f32> {
    cells.iter().map(AtomicF32::load).collect()
}

/// AdaGrad over shared parameter cells, for concurrent sparse updates.
pub fn adagrad_update_shared(param: &[AtomicF32], grad: &[f64], state: &[AtomicF32], lr: f64, eps: f64) -> Result<()> {
    if param.len() != grad.len() || state.len() != grad.len() {
        return Err(Error::shape(param.len(), grad.len().min(state.len())));
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient);
    }
    for ((p, &g), s) in param.iter().zip(grad).zip(state) {
        if g == 0.0 {
            continue;
        }
        let (np, ns) = adagrad_step(p.load() as f64, g, s.load() as f64, lr, eps);
        p.store(np as f32);
        s.store(ns as f32);
    }
    Ok(())
}
