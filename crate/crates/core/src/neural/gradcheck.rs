use super::mlp::{Mlp, ShapeError};

/// Denominator floor for the relative error, so parameters whose gradient
/// is numerically zero are judged on absolute error instead.
pub const GRADCHECK_SCALE_FLOOR: f64 = 1e-6;

/// Largest relative error between [`Mlp::backward`] and central finite
/// differences of `output · output_grad`, over every parameter.
pub fn max_gradient_error(net: &Mlp, input: &[f64], output_grad: &[f64], h: f64) -> Result<f64, ShapeError> {
    let cache = net.forward_cached(input)?;
    let analytic = net.backward(&cache, output_grad)?;
    let mut probe = net.clone();
    let objective = |n: &Mlp| -> Result<f64, ShapeError> {
        Ok(n.forward(input)?.iter().zip(output_grad).map(|(o, g)| o * g).sum())
    };
    let mut worst = 0.0f64;
    for k in 0..net.n_params() {
        let orig = probe.params()[k];
        probe.params_mut()[k] = orig + h;
        let plus = objective(&probe)?;
        probe.params_mut()[k] = orig - h;
        let minus = objective(&probe)?;
        probe.params_mut()[k] = orig;
        let numeric = (plus - minus) / (2.0 * h);
        let a = analytic[k];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(GRADCHECK_SCALE_FLOOR);
        worst = worst.max(err);
    }
    Ok(worst)
}
