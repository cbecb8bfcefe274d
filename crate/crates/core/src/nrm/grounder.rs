use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{softmax_in_place, NrmError};

pub const GROUNDER_MAGIC: &[u8; 4] = b"NRMG";

/// Linear-softmax classifier from observation features to a distribution
/// over the full alphabet (including `_empty`).
#[derive(Debug, Clone, PartialEq)]
pub struct Grounder {
    dim: usize,
    num_symbols: usize,
    /// Row-major `dim × |P|`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Grounder {
    pub fn zeros(dim: usize, num_symbols: usize) -> Self {
        Self {
            dim,
            num_symbols,
            weights: vec![0.0; dim * num_symbols],
            bias: vec![0.0; num_symbols],
        }
    }

    /// Small Gaussian weights (std 0.01) and zero bias.
    pub fn random<R: Rng + ?Sized>(dim: usize, num_symbols: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, 0.01).expect("valid std");
        let mut g = Self::zeros(dim, num_symbols);
        for w in &mut g.weights {
            *w = normal.sample(rng);
        }
        g
    }

    pub fn from_parts(dim: usize, num_symbols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self, NrmError> {
        if weights.len() != dim * num_symbols || bias.len() != num_symbols || num_symbols == 0 {
            return Err(NrmError::Dimension(format!(
                "grounder {dim}x{num_symbols} needs {} weights and {num_symbols} biases, got {} and {}",
                dim * num_symbols,
                weights.len(),
                bias.len()
            )));
        }
        Ok(Self {
            dim,
            num_symbols,
            weights,
            bias,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Weights followed by bias.
    pub fn params(&self) -> Vec<f64> {
        let mut v = self.weights.clone();
        v.extend_from_slice(&self.bias);
        v
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params(), "parameter vector length");
        let (w, b) = flat.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        self.bias.copy_from_slice(b);
    }

    pub(crate) fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights.iter_mut().chain(self.bias.iter_mut())
    }

    /// Symbol distribution for one observation.
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "observation dimension");
        let mut z = self.bias.clone();
        for (xi, row) in x.iter().zip(self.weights.chunks(self.num_symbols)) {
            if *xi == 0.0 {
                continue;
            }
            for (zj, wij) in z.iter_mut().zip(row) {
                *zj += xi * wij;
            }
        }
        softmax_in_place(&mut z);
        z
    }

    /// Most likely symbol index; ties go to the lowest index.
    pub fn classify(&self, x: &[f64]) -> usize {
        argmax(&self.predict(x))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + 8 * self.num_params());
        out.extend_from_slice(GROUNDER_MAGIC);
        out.extend_from_slice(&(self.dim as u64).to_le_bytes());
        out.extend_from_slice(&(self.num_symbols as u64).to_le_bytes());
        for v in self.weights.iter().chain(&self.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NrmError> {
        let bad = |message: &str| NrmError::Checkpoint(message.to_string());
        if bytes.len() < 20 || &bytes[..4] != GROUNDER_MAGIC {
            return Err(bad("missing NRMG header"));
        }
        let read_u64 = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
        let (dim, np) = (read_u64(4) as usize, read_u64(12) as usize);
        let count = dim
            .checked_mul(np)
            .and_then(|n| n.checked_add(np))
            .ok_or_else(|| bad("dimensions overflow"))?;
        if bytes.len() != 20 + 8 * count {
            return Err(bad(&format!(
                "expected {} bytes for a {dim}x{np} grounder, found {}",
                20 + 8 * count,
                bytes.len()
            )));
        }
        let values: Vec<f64> = bytes[20..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let (w, b) = values.split_at(dim * np);
        Self::from_parts(dim, np, w.to_vec(), b.to_vec())
    }

    pub fn save(&self, path: &Path) -> Result<(), NrmError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NrmError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn predictions_are_distributions() {
        let g = Grounder::random(6, 4, &mut rng::stream(1, "g"));
        let p = g.predict(&[1.0, 0.0, -2.0, 0.5, 0.0, 3.0]);
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn checkpoint_round_trip() {
        let g = Grounder::random(5, 3, &mut rng::stream(2, "g"));
        let bytes = g.to_bytes();
        assert_eq!(&bytes[..4], b"NRMG");
        assert_eq!(bytes.len(), 20 + 8 * (15 + 3));
        assert_eq!(Grounder::from_bytes(&bytes).unwrap(), g);
        assert!(Grounder::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(Grounder::from_bytes(b"NRMX").is_err());
    }

    #[test]
    fn flat_params_round_trip() {
        let mut g = Grounder::random(2, 2, &mut rng::stream(3, "g"));
        let mut p = g.params();
        p[5] = 7.0;
        g.set_params(&p);
        assert_eq!(g.bias()[1], 7.0);
    }
}
