//! Feature extraction network: three conv(+BN+ReLU+maxpool) blocks over
//! the RD patch followed by three fully connected layers, ending in a
//! sigmoid feature vector of length 8.

use rand::Rng;

use super::layers::{BatchNorm2d, Conv2d, Linear, MaxPoolW, Relu, Sigmoid};
use super::tensor::{Param, Tensor};
use crate::error::{Error, Result};

pub const FEATURE_LEN: usize = 8;
const CHANNELS: [usize; 3] = [8, 16, 16];
const KERNEL_H: usize = 3;
const KERNEL_W: usize = 5;
const POOL: usize = 4;

#[derive(Debug, Clone)]
pub struct Cnn {
    pub input_rows: usize,
    pub input_cols: usize,
    pub flat_len: usize,
    conv: [Conv2d; 3],
    bn: [BatchNorm2d; 3],
    relu: [Relu; 5],
    pool: [MaxPoolW; 3],
    fc: [Linear; 3],
    out: Sigmoid,
}

impl Cnn {
    /// Build the network for a given patch shape. The flattened width is
    /// derived from the pooled spatial extent, so reduced test shapes
    /// (e.g. 5x32) chain correctly.
    pub fn new(input_rows: usize, input_cols: usize, rng: &mut impl Rng) -> Self {
        let pool = [MaxPoolW::new(POOL), MaxPoolW::new(POOL), MaxPoolW::new(POOL)];
        let mut w = input_cols;
        for p in &pool {
            w = p.output_width(w);
        }
        let flat_len = CHANNELS[2] * input_rows * w;
        Cnn {
            input_rows,
            input_cols,
            flat_len,
            conv: [
                Conv2d::new(1, CHANNELS[0], KERNEL_H, KERNEL_W, rng),
                Conv2d::new(CHANNELS[0], CHANNELS[1], KERNEL_H, KERNEL_W, rng),
                Conv2d::new(CHANNELS[1], CHANNELS[2], KERNEL_H, KERNEL_W, rng),
            ],
            bn: [
                BatchNorm2d::new(CHANNELS[0]),
                BatchNorm2d::new(CHANNELS[1]),
                BatchNorm2d::new(CHANNELS[2]),
            ],
            relu: Default::default(),
            pool,
            fc: [
                Linear::new(flat_len, 64, rng),
                Linear::new(64, 32, rng),
                Linear::new(32, FEATURE_LEN, rng),
            ],
            out: Sigmoid::new(),
        }
    }

    /// Forward a batch of patches shaped [N, 1, rows, cols]; values are
    /// expected pre-normalized to [0, 1].
    pub fn forward(&mut self, x: &Tensor, train: bool) -> Result<Tensor> {
        if x.shape.len() != 4
            || x.shape[1] != 1
            || x.shape[2] != self.input_rows
            || x.shape[3] != self.input_cols
        {
            return Err(Error::Size(format!(
                "cnn expects [N, 1, {}, {}], got {:?}",
                self.input_rows, self.input_cols, x.shape
            )));
        }
        let mut t = x.clone();
        for k in 0..3 {
            t = self.conv[k].forward(&t, train)?;
            t = self.bn[k].forward(&t, train)?;
            t = self.relu[k].forward(&t, train);
            t = self.pool[k].forward(&t, train)?;
        }
        let n = t.shape[0];
        let flat = Tensor::from_vec(&[n, self.flat_len], t.data)?;
        let mut t = self.fc[0].forward(&flat, train)?;
        t = self.relu[3].forward(&t, train);
        t = self.fc[1].forward(&t, train)?;
        t = self.relu[4].forward(&t, train);
        t = self.fc[2].forward(&t, train)?;
        Ok(self.out.forward(&t, train))
    }

    /// Backward from the gradient on the output features; accumulates
    /// parameter gradients and returns the gradient on the input patch.
    pub fn backward(&mut self, dy: &Tensor) -> Result<Tensor> {
        let mut g = self.out.backward(dy);
        g = self.fc[2].backward(&g)?;
        g = self.relu[4].backward(&g);
        g = self.fc[1].backward(&g)?;
        g = self.relu[3].backward(&g);
        g = self.fc[0].backward(&g)?;
        let n = g.shape[0];
        let pooled_w = {
            let mut w = self.input_cols;
            for p in &self.pool {
                w = p.output_width(w);
            }
            w
        };
        let mut g = Tensor::from_vec(&[n, CHANNELS[2], self.input_rows, pooled_w], g.data)?;
        for k in (0..3).rev() {
            g = self.pool[k].backward(&g)?;
            g = self.relu[k].backward(&g);
            g = self.bn[k].backward(&g)?;
            g = self.conv[k].backward(&g)?;
        }
        Ok(g)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = Vec::new();
        for c in self.conv.iter_mut() {
            out.push(&mut c.weight);
            out.push(&mut c.bias);
        }
        for b in self.bn.iter_mut() {
            out.push(&mut b.gamma);
            out.push(&mut b.beta);
        }
        for f in self.fc.iter_mut() {
            out.push(&mut f.weight);
            out.push(&mut f.bias);
        }
        out
    }

    pub fn zero_grad(&mut self) {
        for p in self.params_mut() {
            p.zero_grad();
        }
    }

    /// Flatten every parameter and running statistic for persistence.
    pub fn export(&self) -> (CnnShape, Vec<f64>) {
        let shape = CnnShape {
            input_rows: self.input_rows,
            input_cols: self.input_cols,
        };
        let mut blob = Vec::new();
        for c in &self.conv {
            blob.extend_from_slice(&c.weight.value);
            blob.extend_from_slice(&c.bias.value);
        }
        for b in &self.bn {
            blob.extend_from_slice(&b.gamma.value);
            blob.extend_from_slice(&b.beta.value);
            blob.extend_from_slice(&b.running_mean);
            blob.extend_from_slice(&b.running_var);
        }
        for f in &self.fc {
            blob.extend_from_slice(&f.weight.value);
            blob.extend_from_slice(&f.bias.value);
        }
        (shape, blob)
    }

    pub fn import(shape: &CnnShape, blob: &[f64]) -> Result<Self> {
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        let mut net = Cnn::new(shape.input_rows, shape.input_cols, &mut rng);
        let mut cursor = 0usize;
        let mut take = |n: usize| -> Result<&[f64]> {
            if cursor + n > blob.len() {
                return Err(Error::Size("weight blob too short".into()));
            }
            let s = &blob[cursor..cursor + n];
            cursor += n;
            Ok(s)
        };
        for c in net.conv.iter_mut() {
            c.weight.value.copy_from_slice(take(c.weight.value.len())?);
            c.bias.value.copy_from_slice(take(c.bias.value.len())?);
        }
        for b in net.bn.iter_mut() {
            b.gamma.value.copy_from_slice(take(b.gamma.value.len())?);
            b.beta.value.copy_from_slice(take(b.beta.value.len())?);
            b.running_mean.copy_from_slice(take(b.running_mean.len())?);
            b.running_var.copy_from_slice(take(b.running_var.len())?);
        }
        for f in net.fc.iter_mut() {
            f.weight.value.copy_from_slice(take(f.weight.value.len())?);
            f.bias.value.copy_from_slice(take(f.bias.value.len())?);
        }
        if cursor != blob.len() {
            return Err(Error::Size(format!(
                "weight blob has {} values, consumed {}",
                blob.len(),
                cursor
            )));
        }
        Ok(net)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CnnShape {
    pub input_rows: usize,
    pub input_cols: usize,
}

/// Normalize a raw [0, 255] patch into a [N=1, 1, rows, cols] input.
pub fn patch_to_input(patch: &[f64], rows: usize, cols: usize) -> Result<Tensor> {
    let data: Vec<f64> = patch.iter().map(|v| v / 255.0).collect();
    Tensor::from_vec(&[1, 1, rows, cols], data)
}
