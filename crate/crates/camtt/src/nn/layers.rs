//! Network layers with explicit forward/backward passes. Convolutional
//! tensors carry shape [N, C, H, W]; fully connected tensors [N, D].

use rand::Rng;

use super::tensor::{Param, Tensor};
use crate::error::{Error, Result};

fn xavier_uniform(n: usize, fan_in: usize, fan_out: usize, rng: &mut impl Rng) -> Vec<f64> {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// 2-D convolution with stride 1 and same (zero) padding.
#[derive(Debug, Clone)]
pub struct Conv2d {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    /// [out][in][kh][kw]
    pub weight: Param,
    pub bias: Param,
    cache_input: Option<Tensor>,
}

impl Conv2d {
    pub fn new(
        in_channels: usize,
        out_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let fan_in = in_channels * kernel_h * kernel_w;
        let fan_out = out_channels * kernel_h * kernel_w;
        let n = out_channels * fan_in;
        Conv2d {
            in_channels,
            out_channels,
            kernel_h,
            kernel_w,
            weight: Param::new(xavier_uniform(n, fan_in, fan_out, rng)),
            bias: Param::zeros(out_channels),
            cache_input: None,
        }
    }

    fn check_input(&self, x: &Tensor) -> Result<(usize, usize, usize)> {
        if x.shape.len() != 4 || x.shape[1] != self.in_channels {
            return Err(Error::Size(format!(
                "conv expects [N, {}, H, W], got {:?}",
                self.in_channels, x.shape
            )));
        }
        Ok((x.shape[0], x.shape[2], x.shape[3]))
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Result<Tensor> {
        let (n, h, w) = self.check_input(x)?;
        let (ph, pw) = ((self.kernel_h - 1) / 2, (self.kernel_w - 1) / 2);
        let mut y = Tensor::zeros(&[n, self.out_channels, h, w]);
        let (ci, co) = (self.in_channels, self.out_channels);
        for b in 0..n {
            for oc in 0..co {
                for oy in 0..h {
                    for ox in 0..w {
                        let mut acc = self.bias.value[oc];
                        for ic in 0..ci {
                            for ky in 0..self.kernel_h {
                                let iy = oy + ky;
                                if iy < ph || iy - ph >= h {
                                    continue;
                                }
                                let iy = iy - ph;
                                for kx in 0..self.kernel_w {
                                    let ix = ox + kx;
                                    if ix < pw || ix - pw >= w {
                                        continue;
                                    }
                                    let ix = ix - pw;
                                    let wv = self.weight.value[((oc * ci + ic)
                                        * self.kernel_h
                                        + ky)
                                        * self.kernel_w
                                        + kx];
                                    acc += wv * x.data[((b * ci + ic) * h + iy) * w + ix];
                                }
                            }
                        }
                        y.data[((b * co + oc) * h + oy) * w + ox] = acc;
                    }
                }
            }
        }
        if train {
            self.cache_input = Some(x.clone());
        }
        Ok(y)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Result<Tensor> {
        let x = self
            .cache_input
            .as_ref()
            .ok_or_else(|| Error::Numerical("conv backward before forward".into()))?;
        let (n, h, w) = (x.shape[0], x.shape[2], x.shape[3]);
        let (ph, pw) = ((self.kernel_h - 1) / 2, (self.kernel_w - 1) / 2);
        let (ci, co) = (self.in_channels, self.out_channels);
        let mut dx = Tensor::zeros(&x.shape);
        for b in 0..n {
            for oc in 0..co {
                for oy in 0..h {
                    for ox in 0..w {
                        let g = dy.data[((b * co + oc) * h + oy) * w + ox];
                        if g == 0.0 {
                            continue;
                        }
                        self.bias.grad[oc] += g;
                        for ic in 0..ci {
                            for ky in 0..self.kernel_h {
                                let iy = oy + ky;
                                if iy < ph || iy - ph >= h {
                                    continue;
                                }
                                let iy = iy - ph;
                                for kx in 0..self.kernel_w {
                                    let ix = ox + kx;
                                    if ix < pw || ix - pw >= w {
                                        continue;
                                    }
                                    let ix = ix - pw;
                                    let widx = ((oc * ci + ic) * self.kernel_h + ky)
                                        * self.kernel_w
                                        + kx;
                                    let xidx = ((b * ci + ic) * h + iy) * w + ix;
                                    self.weight.grad[widx] += g * x.data[xidx];
                                    dx.data[xidx] += g * self.weight.value[widx];
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(dx)
    }
}

/// Per-channel batch normalization over (N, H, W) with running statistics.
#[derive(Debug, Clone)]
pub struct BatchNorm2d {
    pub channels: usize,
    pub gamma: Param,
    pub beta: Param,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub momentum: f64,
    pub eps: f64,
    cache: Option<BnCache>,
}

#[derive(Debug, Clone)]
struct BnCache {
    x_hat: Tensor,
    inv_std: Vec<f64>,
}

impl BatchNorm2d {
    pub fn new(channels: usize) -> Self {
        BatchNorm2d {
            channels,
            gamma: Param::new(vec![1.0; channels]),
            beta: Param::zeros(channels),
            running_mean: vec![0.0; channels],
            running_var: vec![1.0; channels],
            momentum: 0.1,
            eps: 1e-5,
            cache: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Result<Tensor> {
        if x.shape.len() != 4 || x.shape[1] != self.channels {
            return Err(Error::Size(format!(
                "batchnorm expects [N, {}, H, W], got {:?}",
                self.channels, x.shape
            )));
        }
        let (n, c, h, w) = (x.shape[0], x.shape[1], x.shape[2], x.shape[3]);
        let per_channel = (n * h * w) as f64;
        let mut y = Tensor::zeros(&x.shape);
        let mut x_hat = Tensor::zeros(&x.shape);
        let mut inv_std = vec![0.0; c];
        for ch in 0..c {
            let (mean, var) = if train {
                let mut mean = 0.0;
                for b in 0..n {
                    for i in 0..h * w {
                        mean += x.data[(b * c + ch) * h * w + i];
                    }
                }
                mean /= per_channel;
                let mut var = 0.0;
                for b in 0..n {
                    for i in 0..h * w {
                        let d = x.data[(b * c + ch) * h * w + i] - mean;
                        var += d * d;
                    }
                }
                var /= per_channel;
                self.running_mean[ch] =
                    (1.0 - self.momentum) * self.running_mean[ch] + self.momentum * mean;
                self.running_var[ch] =
                    (1.0 - self.momentum) * self.running_var[ch] + self.momentum * var;
                (mean, var)
            } else {
                (self.running_mean[ch], self.running_var[ch])
            };
            let istd = (var + self.eps).sqrt().recip();
            inv_std[ch] = istd;
            for b in 0..n {
                for i in 0..h * w {
                    let idx = (b * c + ch) * h * w + i;
                    let xh = (x.data[idx] - mean) * istd;
                    x_hat.data[idx] = xh;
                    y.data[idx] = self.gamma.value[ch] * xh + self.beta.value[ch];
                }
            }
        }
        if train {
            self.cache = Some(BnCache { x_hat, inv_std });
        }
        Ok(y)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Result<Tensor> {
        let cache = self
            .cache
            .as_ref()
            .ok_or_else(|| Error::Numerical("batchnorm backward before forward".into()))?;
        let (n, c, h, w) = (dy.shape[0], dy.shape[1], dy.shape[2], dy.shape[3]);
        let per_channel = (n * h * w) as f64;
        let mut dx = Tensor::zeros(&dy.shape);
        for ch in 0..c {
            let mut sum_dy = 0.0;
            let mut sum_dy_xhat = 0.0;
            for b in 0..n {
                for i in 0..h * w {
                    let idx = (b * c + ch) * h * w + i;
                    sum_dy += dy.data[idx];
                    sum_dy_xhat += dy.data[idx] * cache.x_hat.data[idx];
                }
            }
            self.beta.grad[ch] += sum_dy;
            self.gamma.grad[ch] += sum_dy_xhat;
            let g = self.gamma.value[ch];
            for b in 0..n {
                for i in 0..h * w {
                    let idx = (b * c + ch) * h * w + i;
                    dx.data[idx] = g * cache.inv_std[ch] / per_channel
                        * (per_channel * dy.data[idx]
                            - sum_dy
                            - cache.x_hat.data[idx] * sum_dy_xhat);
                }
            }
        }
        Ok(dx)
    }
}

/// Elementwise rectifier.
#[derive(Debug, Clone, Default)]
pub struct Relu {
    mask: Vec<bool>,
}

impl Relu {
    pub fn new() -> Self {
        Relu::default()
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Tensor {
        let mut y = x.clone();
        if train {
            self.mask = x.data.iter().map(|&v| v > 0.0).collect();
        }
        for v in y.data.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        y
    }

    pub fn backward(&self, dy: &Tensor) -> Tensor {
        let mut dx = dy.clone();
        for (v, &keep) in dx.data.iter_mut().zip(&self.mask) {
            if !keep {
                *v = 0.0;
            }
        }
        dx
    }
}

/// Max pooling along the last (W) axis. The window shrinks to the full
/// remaining width when the input is narrower than the nominal window, so
/// reduced input shapes still pool to at least one column.
#[derive(Debug, Clone)]
pub struct MaxPoolW {
    pub window: usize,
    argmax: Vec<usize>,
    input_shape: Vec<usize>,
}

impl MaxPoolW {
    pub fn new(window: usize) -> Self {
        MaxPoolW {
            window,
            argmax: Vec::new(),
            input_shape: Vec::new(),
        }
    }

    pub fn output_width(&self, w: usize) -> usize {
        if w <= self.window {
            1
        } else {
            w / self.window
        }
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Result<Tensor> {
        if x.shape.len() != 4 {
            return Err(Error::Size(format!("pool expects 4-D, got {:?}", x.shape)));
        }
        let (n, c, h, w) = (x.shape[0], x.shape[1], x.shape[2], x.shape[3]);
        let win = self.window.min(w);
        let ow = self.output_width(w);
        let mut y = Tensor::zeros(&[n, c, h, ow]);
        let mut argmax = vec![0usize; n * c * h * ow];
        for row in 0..n * c * h {
            for o in 0..ow {
                let start = o * win;
                let mut best = f64::NEG_INFINITY;
                let mut best_i = start;
                for i in start..(start + win).min(w) {
                    let v = x.data[row * w + i];
                    if v > best {
                        best = v;
                        best_i = i;
                    }
                }
                y.data[row * ow + o] = best;
                argmax[row * ow + o] = row * w + best_i;
            }
        }
        if train {
            self.argmax = argmax;
            self.input_shape = x.shape.clone();
        }
        Ok(y)
    }

    pub fn backward(&self, dy: &Tensor) -> Result<Tensor> {
        if self.argmax.is_empty() {
            return Err(Error::Numerical("pool backward before forward".into()));
        }
        let mut dx = Tensor::zeros(&self.input_shape);
        for (o, &src) in self.argmax.iter().enumerate() {
            dx.data[src] += dy.data[o];
        }
        Ok(dx)
    }
}

/// Fully connected layer, weight stored [out][in].
#[derive(Debug, Clone)]
pub struct Linear {
    pub in_features: usize,
    pub out_features: usize,
    pub weight: Param,
    pub bias: Param,
    cache_input: Option<Tensor>,
}

impl Linear {
    pub fn new(in_features: usize, out_features: usize, rng: &mut impl Rng) -> Self {
        Linear {
            in_features,
            out_features,
            weight: Param::new(xavier_uniform(
                in_features * out_features,
                in_features,
                out_features,
                rng,
            )),
            bias: Param::zeros(out_features),
            cache_input: None,
        }
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Result<Tensor> {
        if x.shape.len() != 2 || x.shape[1] != self.in_features {
            return Err(Error::Size(format!(
                "linear expects [N, {}], got {:?}",
                self.in_features, x.shape
            )));
        }
        let n = x.shape[0];
        let mut y = Tensor::zeros(&[n, self.out_features]);
        for b in 0..n {
            for o in 0..self.out_features {
                let mut acc = self.bias.value[o];
                for i in 0..self.in_features {
                    acc += self.weight.value[o * self.in_features + i]
                        * x.data[b * self.in_features + i];
                }
                y.data[b * self.out_features + o] = acc;
            }
        }
        if train {
            self.cache_input = Some(x.clone());
        }
        Ok(y)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Result<Tensor> {
        let x = self
            .cache_input
            .as_ref()
            .ok_or_else(|| Error::Numerical("linear backward before forward".into()))?;
        let n = x.shape[0];
        let mut dx = Tensor::zeros(&x.shape);
        for b in 0..n {
            for o in 0..self.out_features {
                let g = dy.data[b * self.out_features + o];
                self.bias.grad[o] += g;
                for i in 0..self.in_features {
                    self.weight.grad[o * self.in_features + i] +=
                        g * x.data[b * self.in_features + i];
                    dx.data[b * self.in_features + i] +=
                        g * self.weight.value[o * self.in_features + i];
                }
            }
        }
        Ok(dx)
    }
}

/// Elementwise logistic function.
#[derive(Debug, Clone, Default)]
pub struct Sigmoid {
    cache_output: Vec<f64>,
}

pub fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

impl Sigmoid {
    pub fn new() -> Self {
        Sigmoid::default()
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Tensor {
        let mut y = x.clone();
        for v in y.data.iter_mut() {
            *v = sigmoid(*v);
        }
        if train {
            self.cache_output = y.data.clone();
        }
        y
    }

    pub fn backward(&self, dy: &Tensor) -> Tensor {
        let mut dx = dy.clone();
        for (v, &y) in dx.data.iter_mut().zip(&self.cache_output) {
            *v *= y * (1.0 - y);
        }
        dx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn conv_identity_kernel_passes_input_through() {
        let mut rng = StdRng::seed_from_u64(0);
        let mut conv = Conv2d::new(1, 1, 3, 5, &mut rng);
        conv.weight.value.fill(0.0);
        // Center tap of the 3x5 kernel.
        conv.weight.value[1 * 5 + 2] = 1.0;
        conv.bias.value[0] = 0.0;
        let x = Tensor::from_vec(&[1, 1, 2, 4], (0..8).map(|v| v as f64).collect()).unwrap();
        let y = conv.forward(&x, false).unwrap();
        assert_eq!(y.data, x.data);
    }

    #[test]
    fn pool_takes_window_max_and_routes_gradient() {
        let mut pool = MaxPoolW::new(4);
        let x = Tensor::from_vec(&[1, 1, 1, 8], vec![1.0, 5.0, 2.0, 0.0, 3.0, 3.5, -1.0, 2.0])
            .unwrap();
        let y = pool.forward(&x, true).unwrap();
        assert_eq!(y.data, vec![5.0, 3.5]);
        let dx = pool
            .backward(&Tensor::from_vec(&[1, 1, 1, 2], vec![10.0, 20.0]).unwrap())
            .unwrap();
        assert_eq!(dx.data, vec![0.0, 10.0, 0.0, 0.0, 0.0, 20.0, 0.0, 0.0]);
    }

    #[test]
    fn narrow_pool_collapses_to_one_column() {
        let mut pool = MaxPoolW::new(4);
        let x = Tensor::from_vec(&[1, 1, 1, 2], vec![1.0, 7.0]).unwrap();
        let y = pool.forward(&x, false).unwrap();
        assert_eq!(y.shape, vec![1, 1, 1, 1]);
        assert_eq!(y.data, vec![7.0]);
    }

    #[test]
    fn batchnorm_train_normalizes_batch() {
        let mut bn = BatchNorm2d::new(1);
        let x = Tensor::from_vec(&[2, 1, 1, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = bn.forward(&x, true).unwrap();
        let mean: f64 = y.data.iter().sum::<f64>() / 4.0;
        let var: f64 = y.data.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn batchnorm_eval_uses_running_stats() {
        let mut bn = BatchNorm2d::new(1);
        let x = Tensor::from_vec(&[2, 1, 1, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        for _ in 0..200 {
            bn.forward(&x, true).unwrap();
        }
        // Running stats converge to the batch stats; eval then reproduces
        // the train-mode output.
        let y_train = bn.forward(&x, true).unwrap();
        let y_eval = bn.forward(&x, false).unwrap();
        for (a, b) in y_train.data.iter().zip(&y_eval.data) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-3);
        }
    }

    #[test]
    fn linear_matches_hand_product() {
        let mut rng = StdRng::seed_from_u64(1);
        let mut lin = Linear::new(2, 2, &mut rng);
        lin.weight.value = vec![1.0, 2.0, 3.0, 4.0];
        lin.bias.value = vec![0.5, -0.5];
        let x = Tensor::from_vec(&[1, 2], vec![10.0, 20.0]).unwrap();
        let y = lin.forward(&x, false).unwrap();
        assert_eq!(y.data, vec![50.5, 109.5]);
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_abs_diff_eq!(sigmoid(0.0), 0.5);
    }
}
