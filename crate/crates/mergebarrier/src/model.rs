//! Toy decoder-only transformer with hand-written gradients, a trainer, and
//! synthetic tasks. Produces the homologous base/expert models that every
//! protection, merging, and attack scenario manipulates.
//!
//! Architecture, per layer: pre-norm RMS normalization (one learned gain
//! shared by the attention and FFN sublayers), causal multi-head or
//! group-query attention with 1/sqrt(head_dim) scaling, residual adds, and a
//! non-gated two-layer FFN `Act(x W1 + b1) W2 + c`. Learned absolute
//! position embeddings; no rotary embeddings (the attention projection
//! defense needs nothing between W_q and the score product).

mod forward;
mod grad;
mod tasks;
mod train;

pub use forward::{forward, forward_custom_ffn, loss_from_logits, FfnLayer, ForwardCache};
pub use grad::loss_and_grad;
pub use tasks::{accuracy, chance_level, gen_task, gen_task_seeded, TaskKind, TaskSpec};
pub use train::{train, OptimizerKind, TrainConfig};

use crate::activations::ActivationKind;
use crate::error::{Error, Result};
use crate::numkit::{Matrix, RngState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Shape of the toy transformer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab: usize,
    pub dim: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    /// Number of key/value heads. Equal to `n_heads` gives MHA; a divisor of
    /// `n_heads` gives GQA with `n_heads / n_kv_heads` query heads per group.
    pub n_kv_heads: usize,
    pub ffn_dim: usize,
    pub seq_len: usize,
    pub activation: ActivationKind,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.vocab == 0
            || self.dim == 0
            || self.n_layers == 0
            || self.n_heads == 0
            || self.n_kv_heads == 0
            || self.ffn_dim == 0
            || self.seq_len == 0
        {
            return Err(Error::Parameter("all model dimensions must be >= 1".into()));
        }
        if self.dim % self.n_heads != 0 {
            return Err(Error::Parameter(format!(
                "dim {} not divisible by n_heads {}",
                self.dim, self.n_heads
            )));
        }
        if self.n_heads % self.n_kv_heads != 0 {
            return Err(Error::Parameter(format!(
                "n_heads {} not divisible by n_kv_heads {}",
                self.n_heads, self.n_kv_heads
            )));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.dim / self.n_heads
    }

    /// Total width of the key/value projections.
    pub fn kv_dim(&self) -> usize {
        self.n_kv_heads * self.head_dim()
    }

    pub fn heads_per_group(&self) -> usize {
        self.n_heads / self.n_kv_heads
    }

    /// Expected tensor names and shapes, in canonical (lexicographic) order.
    pub fn schema(&self) -> Vec<(String, (usize, usize))> {
        let mut out = Vec::new();
        out.push(("embed.pos".to_string(), (self.seq_len, self.dim)));
        out.push(("embed.tok".to_string(), (self.vocab, self.dim)));
        out.push(("head.w".to_string(), (self.dim, self.vocab)));
        for i in 0..self.n_layers {
            out.push((attn_name(i, "wq"), (self.dim, self.dim)));
            out.push((attn_name(i, "wk"), (self.dim, self.kv_dim())));
            out.push((attn_name(i, "wv"), (self.dim, self.kv_dim())));
            out.push((attn_name(i, "wo"), (self.dim, self.dim)));
            out.push((ffn_name(i, "w1"), (self.dim, self.ffn_dim)));
            out.push((ffn_name(i, "b1"), (1, self.ffn_dim)));
            out.push((ffn_name(i, "w2"), (self.ffn_dim, self.dim)));
            out.push((ffn_name(i, "c"), (1, self.dim)));
            out.push((norm_name(i), (1, self.dim)));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

pub fn attn_name(layer: usize, part: &str) -> String {
    format!("layer.{layer}.attn.{part}")
}

pub fn ffn_name(layer: usize, part: &str) -> String {
    format!("layer.{layer}.ffn.{part}")
}

pub fn norm_name(layer: usize) -> String {
    format!("layer.{layer}.norm.g")
}

/// A model's weights: an ordered map from tensor name to dense matrix.
/// Iteration order is lexicographic by name — the canonical flattening order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedTensors {
    entries: BTreeMap<String, Matrix>,
}

impl NamedTensors {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Matrix) {
        self.entries.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Matrix> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Matrix> {
        self.entries.get_mut(name)
    }

    /// Fetch a tensor or fail naming it.
    pub fn tensor(&self, name: &str) -> Result<&Matrix> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::Schema(format!("missing tensor {name}")))
    }

    pub fn remove(&mut self, name: &str) -> Option<Matrix> {
        self.entries.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Matrix)> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Matrix)> {
        self.entries.iter_mut()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    pub fn total_params(&self) -> usize {
        self.entries.values().map(Matrix::len).sum()
    }

    /// Elementwise combination of two schema-identical tensor maps. Fails by
    /// listing the tensors present on only one side or shaped differently.
    pub fn try_zip(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        self.check_schema(other)?;
        let mut out = BTreeMap::new();
        for (name, a) in &self.entries {
            let b = &other.entries[name];
            let data: Vec<f64> = a
                .data()
                .iter()
                .zip(b.data())
                .map(|(x, y)| f(*x, *y))
                .collect();
            out.insert(
                name.clone(),
                Matrix::new(a.rows(), a.cols(), data).expect("combined tensor"),
            );
        }
        Ok(Self { entries: out })
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut out = BTreeMap::new();
        for (name, a) in &self.entries {
            let data: Vec<f64> = a.data().iter().map(|x| f(*x)).collect();
            out.insert(
                name.clone(),
                Matrix::new(a.rows(), a.cols(), data).expect("mapped tensor"),
            );
        }
        Self { entries: out }
    }

    pub fn check_schema(&self, other: &Self) -> Result<()> {
        let mut offending = Vec::new();
        for (name, a) in &self.entries {
            match other.entries.get(name) {
                None => offending.push(format!("{name} (missing on right)")),
                Some(b) if a.shape() != b.shape() => offending.push(format!(
                    "{name} ({}x{} vs {}x{})",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols()
                )),
                _ => {}
            }
        }
        for name in other.entries.keys() {
            if !self.entries.contains_key(name) {
                offending.push(format!("{name} (missing on left)"));
            }
        }
        if offending.is_empty() {
            Ok(())
        } else {
            Err(Error::Schema(offending.join(", ")))
        }
    }

    /// Validate names and shapes against a model configuration.
    pub fn validate(&self, cfg: &ModelConfig) -> Result<()> {
        let schema = cfg.schema();
        for (name, (rows, cols)) in &schema {
            let t = self.tensor(name)?;
            if t.shape() != (*rows, *cols) {
                return Err(Error::Schema(format!(
                    "tensor {name} has shape {}x{}, expected {rows}x{cols}",
                    t.rows(),
                    t.cols()
                )));
            }
        }
        if self.len() != schema.len() {
            let extra: Vec<&str> = self
                .names()
                .filter(|n| !schema.iter().any(|(s, _)| s == *n))
                .map(String::as_str)
                .collect();
            return Err(Error::Schema(format!(
                "unexpected tensors: {}",
                extra.join(", ")
            )));
        }
        Ok(())
    }
}

impl Default for NamedTensors {
    fn default() -> Self {
        Self::new()
    }
}

/// Token/target grids for one batch. `mask` marks the positions whose
/// predictions count toward loss and accuracy (the answer positions).
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub n: usize,
    pub seq_len: usize,
    pub tokens: Vec<u32>,
    pub targets: Vec<u32>,
    pub mask: Vec<bool>,
}

impl Batch {
    pub fn token(&self, seq: usize, pos: usize) -> u32 {
        self.tokens[seq * self.seq_len + pos]
    }

    pub fn target(&self, seq: usize, pos: usize) -> u32 {
        self.targets[seq * self.seq_len + pos]
    }

    pub fn masked(&self, seq: usize, pos: usize) -> bool {
        self.mask[seq * self.seq_len + pos]
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }
}

const INIT_SCALE: f64 = 0.02;

/// Gaussian initialization scaled by 0.02; biases zero, norm gains one.
/// Each tensor draws from its own name-keyed substream, so the result is
/// independent of construction order and deterministic per seed.
pub fn init_model(cfg: &ModelConfig, seed: u64) -> Result<NamedTensors> {
    cfg.validate()?;
    let root = RngState::new(seed);
    let mut w = NamedTensors::new();
    for (name, (rows, cols)) in cfg.schema() {
        let t = if name.ends_with(".b1") || name.ends_with(".c") {
            Matrix::zeros(rows, cols)
        } else if name.ends_with("norm.g") {
            Matrix::from_fn(rows, cols, |_, _| 1.0)
        } else {
            let mut rng = root.derive(&name);
            rng.gaussian_matrix(rows, cols).scale(INIT_SCALE)
        };
        w.insert(name, t);
    }
    Ok(w)
}
