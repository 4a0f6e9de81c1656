use crate::math::{sqrt, tanh};
use crate::rng::SimRng;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("input has {got} values, network expects {expected}")]
    Input { expected: usize, got: usize },
    #[error("gradient has {got} values, network output has {expected}")]
    OutputGrad { expected: usize, got: usize },
    #[error("parameter vector has {got} values, layer sizes need {expected}")]
    Params { expected: usize, got: usize },
    #[error("a network needs at least an input and an output layer")]
    TooFewLayers,
}

/// Multi-layer perceptron: tanh on hidden layers, identity on the output.
///
/// Parameters live in one flat vector. Layer `l` stores its weight matrix
/// row-major (`out × in`) followed by its bias vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Post-activation values of every layer, input first.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    pub activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Dot product with four independent accumulators so the loop vectorizes.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ac, ar) = a.split_at(a.len() / 4 * 4);
    let (bc, br) = b.split_at(ac.len());
    for (x, y) in ac.chunks_exact(4).zip(bc.chunks_exact(4)) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ar.iter().zip(br).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

/// Rows of an orthonormal `rows × cols` matrix (orthonormal rows when
/// `rows <= cols`, orthonormal columns otherwise), by Gram-Schmidt.
fn orthogonal(rows: usize, cols: usize, rng: &mut SimRng) -> Vec<f64> {
    let (n, m) = if rows <= cols { (rows, cols) } else { (cols, rows) };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let norm = sqrt(v.iter().map(|x| x * x).sum());
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let mut w = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            w[r * cols + c] = if rows <= cols { basis[r][c] } else { basis[c][r] };
        }
    }
    w
}

impl Mlp {
    /// All-zero network.
    pub fn zeros(sizes: &[usize]) -> Result<Self, ShapeError> {
        if sizes.len() < 2 {
            return Err(ShapeError::TooFewLayers);
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params: vec![0.0; param_count(sizes)],
        })
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Result<Self, ShapeError> {
        let mut net = Self::zeros(sizes)?;
        if params.len() != net.params.len() {
            return Err(ShapeError::Params {
                expected: net.params.len(),
                got: params.len(),
            });
        }
        net.params = params;
        Ok(net)
    }

    /// Orthogonal weights scaled by `hidden_gain` (hidden layers) and
    /// `output_gain` (last layer); zero biases.
    pub fn orthogonal(sizes: &[usize], hidden_gain: f64, output_gain: f64, rng: &mut SimRng) -> Result<Self, ShapeError> {
        let mut net = Self::zeros(sizes)?;
        let n_layers = net.n_layers();
        let mut offset = 0;
        for l in 0..n_layers {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let gain = if l + 1 == n_layers { output_gain } else { hidden_gain };
            let w = orthogonal(fan_out, fan_in, rng);
            for (dst, src) in net.params[offset..offset + fan_in * fan_out].iter_mut().zip(&w) {
                *dst = gain * src;
            }
            offset += fan_in * fan_out + fan_out;
        }
        Ok(net)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// `(weights, biases)` slices of layer `l`.
    pub fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let off = self.layer_offset(l);
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        (&self.params[off..off + i * o], &self.params[off + i * o..off + i * o + o])
    }

    fn layer_offset(&self, l: usize) -> usize {
        param_count(&self.sizes[..=l])
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, ShapeError> {
        Ok(self.forward_cached(input)?.activations.pop().unwrap_or_default())
    }

    pub fn forward_cached(&self, input: &[f64]) -> Result<ForwardCache, ShapeError> {
        if input.len() != self.input_dim() {
            return Err(ShapeError::Input {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        let n_layers = self.n_layers();
        let mut activations = Vec::with_capacity(n_layers + 1);
        activations.push(input.to_vec());
        for l in 0..n_layers {
            let (w, b) = self.layer(l);
            let x = &activations[l];
            let fan_in = x.len();
            let hidden = l + 1 < n_layers;
            let out: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(r, bias)| {
                    let row = &w[r * fan_in..(r + 1) * fan_in];
                    let z = bias + dot(row, x);
                    if hidden {
                        tanh(z)
                    } else {
                        z
                    }
                })
                .collect();
            activations.push(out);
        }
        Ok(ForwardCache { activations })
    }

    /// Gradient of `output · output_grad` with respect to every parameter.
    pub fn backward(&self, cache: &ForwardCache, output_grad: &[f64]) -> Result<Vec<f64>, ShapeError> {
        let mut grads = vec![0.0; self.params.len()];
        self.backward_into(cache, output_grad, &mut grads)?;
        Ok(grads)
    }

    /// Like [`Mlp::backward`] but accumulates into `grads`.
    pub fn backward_into(&self, cache: &ForwardCache, output_grad: &[f64], grads: &mut [f64]) -> Result<(), ShapeError> {
        if output_grad.len() != self.output_dim() {
            return Err(ShapeError::OutputGrad {
                expected: self.output_dim(),
                got: output_grad.len(),
            });
        }
        if grads.len() != self.params.len() {
            return Err(ShapeError::Params {
                expected: self.params.len(),
                got: grads.len(),
            });
        }
        let n_layers = self.n_layers();
        let mut delta = output_grad.to_vec();
        for l in (0..n_layers).rev() {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = self.layer_offset(l);
            let x = &cache.activations[l];
            {
                let (gw, gb) = grads[off..off + fan_in * fan_out + fan_out].split_at_mut(fan_in * fan_out);
                for r in 0..fan_out {
                    let d = delta[r];
                    if d == 0.0 {
                        continue;
                    }
                    gb[r] += d;
                    for (g, xi) in gw[r * fan_in..(r + 1) * fan_in].iter_mut().zip(x) {
                        *g += d * xi;
                    }
                }
            }
            if l == 0 {
                break;
            }
            // propagate through W and the tanh of the previous layer
            let w = &self.params[off..off + fan_in * fan_out];
            let mut prev = vec![0.0; fan_in];
            for r in 0..fan_out {
                let d = delta[r];
                if d == 0.0 {
                    continue;
                }
                for (p, wi) in prev.iter_mut().zip(&w[r * fan_in..(r + 1) * fan_in]) {
                    *p += d * wi;
                }
            }
            for (p, a) in prev.iter_mut().zip(x) {
                *p *= 1.0 - a * a;
            }
            delta = prev;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_output_bias() {
        let mut net = Mlp::zeros(&[3, 4, 2]).unwrap();
        let n = net.n_params();
        net.params_mut()[n - 2] = 0.5;
        net.params_mut()[n - 1] = -1.5;
        assert_eq!(net.forward(&[1.0, 2.0, 3.0]).unwrap(), vec![0.5, -1.5]);
    }

    #[test]
    fn identity_layer() {
        let net = Mlp::from_params(&[2, 2], vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(net.forward(&[0.25, -4.0]).unwrap(), vec![0.25, -4.0]);
    }

    #[test]
    fn shape_errors() {
        let net = Mlp::zeros(&[3, 2]).unwrap();
        assert_eq!(net.forward(&[1.0]), Err(ShapeError::Input { expected: 3, got: 1 }));
        assert!(Mlp::zeros(&[3]).is_err());
        assert!(Mlp::from_params(&[2, 2], vec![0.0; 5]).is_err());
        let cache = net.forward_cached(&[1.0, 2.0, 3.0]).unwrap();
        assert!(net.backward(&cache, &[1.0]).is_err());
    }

    #[test]
    fn linear_weight_gradient_is_outer_product() {
        let net = Mlp::from_params(&[3, 2], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.0, 0.0]).unwrap();
        let x = [1.0, -2.0, 0.5];
        let g = [3.0, -1.0];
        let cache = net.forward_cached(&x).unwrap();
        let grads = net.backward(&cache, &g).unwrap();
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(grads[r * 3 + c], g[r] * x[c]);
            }
        }
        assert_eq!(&grads[6..], &g);
    }

    #[test]
    fn zero_output_grad_gives_zero_gradient() {
        let mut rng = SimRng::seed_from(2);
        let net = Mlp::orthogonal(&[4, 8, 2], 1.0, 1.0, &mut rng).unwrap();
        let cache = net.forward_cached(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(net.backward(&cache, &[0.0, 0.0]).unwrap().iter().all(|g| *g == 0.0));
    }

    #[test]
    fn orthogonal_rows_are_orthonormal() {
        let mut rng = SimRng::seed_from(5);
        let w = orthogonal(4, 9, &mut rng);
        for a in 0..4 {
            for b in 0..4 {
                let d: f64 = (0..9).map(|k| w[a * 9 + k] * w[b * 9 + k]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
        // tall matrix: orthonormal columns
        let w = orthogonal(9, 4, &mut rng);
        for a in 0..4 {
            let d: f64 = (0..9).map(|k| w[k * 4 + a] * w[k * 4 + a]).sum();
            assert!((d - 1.0).abs() < 1e-12);
        }
    }
}
