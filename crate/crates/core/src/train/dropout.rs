use rand::Rng;

/// Inverted dropout: each component is zeroed with probability `rate` and
/// survivors are scaled by `1 / (1 - rate)`. The applied multipliers are
/// written to `mask` for the backward pass.
pub fn dropout_apply<R: Rng + ?Sized>(values: &mut [f64], rate: f64, rng: &mut R, mask: &mut Vec<f64>) {
    assert!((0.0..1.0).contains(&rate), "dropout rate must lie in [0, 1)");
    mask.clear();
    if rate == 0.0 {
        mask.resize(values.len(), 1.0);
        return;
    }
    let keep = 1.0 / (1.0 - rate);
    for v in values.iter_mut() {
        let m = if rng.random::<f64>() < rate { 0.0 } else { keep };
        *v *= m;
        mask.push(m);
    }
}
