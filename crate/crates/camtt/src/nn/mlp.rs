//! Classification head: the 8 extracted features concatenated with the
//! association belief, through three fully connected layers to a single
//! sigmoid probability.

use rand::Rng;

use super::cnn::FEATURE_LEN;
use super::layers::{Linear, Relu, Sigmoid};
use super::tensor::{Param, Tensor};
use crate::error::{Error, Result};

pub const MLP_INPUT: usize = FEATURE_LEN + 1;
const HIDDEN: [usize; 2] = [32, 16];

#[derive(Debug, Clone)]
pub struct Mlp {
    fc: [Linear; 3],
    relu: [Relu; 2],
    out: Sigmoid,
}

impl Mlp {
    pub fn new(rng: &mut impl Rng) -> Self {
        Mlp {
            fc: [
                Linear::new(MLP_INPUT, HIDDEN[0], rng),
                Linear::new(HIDDEN[0], HIDDEN[1], rng),
                Linear::new(HIDDEN[1], 1, rng),
            ],
            relu: Default::default(),
        out: Sigmoid::new(),
        }
    }

    /// Forward a batch shaped [N, 9] (features then belief) to [N, 1].
    pub fn forward(&mut self, x: &Tensor, train: bool) -> Result<Tensor> {
        if x.shape.len() != 2 || x.shape[1] != MLP_INPUT {
            return Err(Error::Size(format!(
                "mlp expects [N, {MLP_INPUT}], got {:?}",
                x.shape
            )));
        }
        let mut t = self.fc[0].forward(x, train)?;
        t = self.relu[0].forward(&t, train);
        t = self.fc[1].forward(&t, train)?;
        t = self.relu[1].forward(&t, train);
        t = self.fc[2].forward(&t, train)?;
        Ok(self.out.forward(&t, train))
    }

    pub fn backward(&mut self, dy: &Tensor) -> Result<Tensor> {
        let mut g = self.out.backward(dy);
        g = self.fc[2].backward(&g)?;
        g = self.relu[1].backward(&g);
        g = self.fc[1].backward(&g)?;
        g = self.relu[0].backward(&g);
        self.fc[0].backward(&g)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = Vec::new();
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

    /// Classification probability for one measurement.
    pub fn classify(&mut self, features: &[f64], assoc_belief: f64) -> Result<f64> {
        if features.len() != FEATURE_LEN {
            return Err(Error::Size(format!(
                "expected {FEATURE_LEN} features, got {}",
                features.len()
            )));
        }
        let mut input = features.to_vec();
        input.push(assoc_belief);
        let x = Tensor::from_vec(&[1, MLP_INPUT], input)?;
        Ok(self.forward(&x, false)?.data[0])
    }

    pub fn export(&self) -> Vec<f64> {
        let mut blob = Vec::new();
        for f in &self.fc {
            blob.extend_from_slice(&f.weight.value);
            blob.extend_from_slice(&f.bias.value);
        }
        blob
    }

    pub fn import(blob: &[f64]) -> Result<Self> {
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        let mut net = Mlp::new(&mut rng);
        let mut cursor = 0usize;
        for f in net.fc.iter_mut() {
            for buf in [&mut f.weight.value, &mut f.bias.value] {
                let n = buf.len();
                if cursor + n > blob.len() {
                    return Err(Error::Size("weight blob too short".into()));
                }
                buf.copy_from_slice(&blob[cursor..cursor + n]);
                cursor += n;
            }
        }
        if cursor != blob.len() {
            return Err(Error::Size("weight blob has trailing values".into()));
        }
        Ok(net)
    }
}
