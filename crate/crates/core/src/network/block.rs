use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{sigmoid_derivs, Jet2};
use crate::error::{Error, Result};

/// Single-hidden-layer sigmoid block without output bias.
///
/// Parameters are stored contiguously as hidden weights (`hidden × input_dim`,
/// row-major), hidden biases (`hidden`), then output weights
/// (`output_dim × hidden`, row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpBlock {
    pub name: String,
    pub input_dim: usize,
    pub hidden: usize,
    pub output_dim: usize,
    params: Vec<f64>,
}

impl MlpBlock {
    pub fn zeros(name: impl Into<String>, input_dim: usize, hidden: usize, output_dim: usize) -> Self {
        let n = Self::count(input_dim, hidden, output_dim);
        Self {
            name: name.into(),
            input_dim,
            hidden,
            output_dim,
            params: vec![0.0; n],
        }
    }

    pub const fn count(input_dim: usize, hidden: usize, output_dim: usize) -> usize {
        hidden * input_dim + hidden + output_dim * hidden
    }

    /// Hidden weights and biases uniform in `±sqrt(6 / (fan_in + fan_out))`,
    /// output weights uniform in `±1/sqrt(hidden)`.
    pub fn init_uniform<R: Rng>(&mut self, rng: &mut R) {
        let s = (6.0 / (self.input_dim + self.hidden) as f64).sqrt();
        let o = 1.0 / (self.hidden as f64).sqrt();
        let split = self.hidden * (self.input_dim + 1);
        for (k, p) in self.params.iter_mut().enumerate() {
            let bound = if k < split { s } else { o };
            *p = rng.random_range(-bound..bound);
        }
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn hidden_weights(&self) -> &[f64] {
        &self.params[..self.hidden * self.input_dim]
    }

    pub fn hidden_biases(&self) -> &[f64] {
        let o = self.hidden * self.input_dim;
        &self.params[o..o + self.hidden]
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.params[self.hidden * (self.input_dim + 1)..]
    }

    fn check_inputs(&self, len: usize) -> Result<()> {
        if len != self.input_dim {
            return Err(Error::BlockDimension {
                block: self.name.clone(),
                expected: self.input_dim,
                actual: len,
            });
        }
        Ok(())
    }

    pub fn forward(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_inputs(z.len())?;
        let (w, b, v) = (self.hidden_weights(), self.hidden_biases(), self.output_weights());
        let mut out = vec![0.0; self.output_dim];
        for j in 0..self.hidden {
            let row = &w[j * self.input_dim..(j + 1) * self.input_dim];
            let s = b[j] + row.iter().zip(z).map(|(a, x)| a * x).sum::<f64>();
            let a = sigmoid_derivs(s)[0];
            for (k, o) in out.iter_mut().enumerate() {
                *o += v[k * self.hidden + j] * a;
            }
        }
        Ok(out)
    }

    /// Propagates one-direction jets through the block.
    pub fn forward_jet(&self, z: &[Jet2]) -> Result<Vec<Jet2>> {
        self.check_inputs(z.len())?;
        let (w, b, v) = (self.hidden_weights(), self.hidden_biases(), self.output_weights());
        let mut out = vec![Jet2::default(); self.output_dim];
        for j in 0..self.hidden {
            let mut s = Jet2::constant(b[j]);
            for (i, zi) in z.iter().enumerate() {
                s.add_scaled(w[j * self.input_dim + i], *zi);
            }
            let a = s.sigmoid();
            for (k, o) in out.iter_mut().enumerate() {
                o.add_scaled(v[k * self.hidden + j], a);
            }
        }
        Ok(out)
    }

    /// Jets of the outputs and of their partial derivatives with respect to
    /// every block parameter. `tangents` is laid out `[param][component]`.
    pub(crate) fn forward_tangents(&self, z: &[Jet2], out: &mut [Jet2], tangents: &mut [Jet2]) -> Result<()> {
        self.check_inputs(z.len())?;
        let (din, h, n) = (self.input_dim, self.hidden, self.output_dim);
        debug_assert_eq!(out.len(), n);
        debug_assert_eq!(tangents.len(), self.num_params() * n);
        let (w, b, v) = (self.hidden_weights(), self.hidden_biases(), self.output_weights());
        out.fill(Jet2::default());
        tangents.fill(Jet2::default());
        let bias_base = h * din;
        let out_base = h * (din + 1);

        for j in 0..h {
            let mut s = Jet2::constant(b[j]);
            for (i, zi) in z.iter().enumerate() {
                s.add_scaled(w[j * din + i], *zi);
            }
            let [s0, s1, s2, s3] = sigmoid_derivs(s.value);
            let (sd, sdd) = (s.d1, s.d2);
            let act = Jet2::new(s0, s1 * sd, s2 * sd * sd + s1 * sdd);
            // d(act)/d(shift of s)
            let shift = Jet2::new(s1, s2 * sd, s3 * sd * sd + s2 * sdd);

            for k in 0..n {
                let vk = v[k * h + j];
                out[k].add_scaled(vk, act);
                tangents[(out_base + k * h + j) * n + k] = act;
                tangents[(bias_base + j) * n + k] = shift.scale(vk);
            }
            for (i, zi) in z.iter().enumerate() {
                let dw = Jet2::new(
                    s1 * zi.value,
                    s2 * zi.value * sd + s1 * zi.d1,
                    s3 * zi.value * sd * sd + s2 * (2.0 * sd * zi.d1 + zi.value * sdd) + s1 * zi.d2,
                );
                for k in 0..n {
                    tangents[(j * din + i) * n + k] = dw.scale(v[k * h + j]);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn two_neuron() -> MlpBlock {
        let mut b = MlpBlock::zeros("t", 1, 2, 1);
        // W = [1, 1], b = [0, 0], V = [1, 1]
        b.params_mut().copy_from_slice(&[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        b
    }

    #[test]
    fn parameter_count_has_no_output_bias() {
        assert_eq!(MlpBlock::count(1, 50, 1), 150);
        assert_eq!(MlpBlock::count(2, 50, 1), 200);
        assert_eq!(MlpBlock::count(2, 35, 2), 175);
        assert_eq!(MlpBlock::count(1, 35, 2), 140);
    }

    #[test]
    fn identity_block_sums_sigmoids() {
        let b = two_neuron();
        for x in [-1.3, 0.0, 0.4, 2.2] {
            let out = b.forward_jet(&[Jet2::seed(x, 1.0)]).unwrap()[0];
            // hand oracle: u = 2σ(x), u' = 2σ(1-σ), u'' = 2σ(1-σ)(1-2σ)
            let s = 1.0 / (1.0 + (-x).exp());
            assert!((out.value - 2.0 * s).abs() < 1e-15);
            assert!((out.d1 - 2.0 * s * (1.0 - s)).abs() < 1e-15);
            assert!((out.d2 - 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s)).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_input_gives_zero_derivatives() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut b = MlpBlock::zeros("c", 2, 7, 2);
        b.init_uniform(&mut rng);
        for o in b.forward_jet(&[Jet2::constant(0.3), Jet2::constant(-1.0)]).unwrap() {
            assert_eq!((o.d1, o.d2), (0.0, 0.0));
        }
    }

    #[test]
    fn dimension_mismatch_names_block() {
        let err = two_neuron().forward(&[1.0, 2.0]).unwrap_err();
        assert_eq!(
            err,
            Error::BlockDimension {
                block: "t".into(),
                expected: 1,
                actual: 2
            }
        );
    }

    #[test]
    fn init_respects_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut b = MlpBlock::zeros("x", 3, 50, 2);
        b.init_uniform(&mut rng);
        let s = (6.0f64 / 53.0).sqrt();
        assert!(b.hidden_weights().iter().chain(b.hidden_biases()).all(|w| w.abs() <= s));
        assert!(b.output_weights().iter().all(|w| w.abs() <= 1.0 / 50f64.sqrt()));
        assert!(b.params().iter().any(|w| *w != 0.0));
    }

    #[test]
    fn tangents_match_parameter_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut b = MlpBlock::zeros("fd", 2, 4, 2);
        b.init_uniform(&mut rng);
        let z = [Jet2::new(0.3, 1.0, 0.2), Jet2::new(-0.7, -0.5, 0.1)];
        let n = b.output_dim;
        let mut out = vec![Jet2::default(); n];
        let mut tang = vec![Jet2::default(); b.num_params() * n];
        b.forward_tangents(&z, &mut out, &mut tang).unwrap();
        assert_eq!(out, b.forward_jet(&z).unwrap());
        for p in 0..b.num_params() {
            let h = 1e-6;
            let mut plus = b.clone();
            plus.params_mut()[p] += h;
            let mut minus = b.clone();
            minus.params_mut()[p] -= h;
            let (jp, jm) = (plus.forward_jet(&z).unwrap(), minus.forward_jet(&z).unwrap());
            for k in 0..n {
                let fd = (jp[k] - jm[k]).scale(0.5 / h);
                let t = tang[p * n + k];
                for (a, e) in [(t.value, fd.value), (t.d1, fd.d1), (t.d2, fd.d2)] {
                    assert!(
                        (a - e).abs() <= 1e-7 * (1.0 + e.abs()),
                        "param {p} comp {k}: {a} vs {e}"
                    );
                }
            }
        }
    }
}
