use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tensor factor of a composite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled tensor factors. The order fixes the Kronecker
/// convention: the first subsystem is the most significant index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemLayout {
    subsystems: Vec<Subsystem>,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let subsystems: Vec<Subsystem> = parts
            .into_iter()
            .map(|(label, dim)| Subsystem { label: label.into(), dim })
            .collect();
        if subsystems.is_empty() {
            return Err(Error::Layout("a layout needs at least one subsystem".into()));
        }
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::Layout(format!("subsystem '{}' has dimension 0", s.label)));
            }
            if subsystems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::Layout(format!("duplicate label '{}'", s.label)));
            }
        }
        Ok(Self { subsystems })
    }

    /// Two-party layout `A ⊗ B`.
    pub fn bipartite(d_a: usize, d_b: usize) -> Result<Self> {
        Self::new([("A", d_a), ("B", d_b)])
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label.as_str())
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.subsystems[i].dim)
            .ok_or_else(|| Error::Layout(format!("unknown label '{label}'")))
    }

    /// Positions of `labels`, in layout order, rejecting unknown or repeated labels.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self
                .position(l.as_ref())
                .ok_or_else(|| Error::Layout(format!("unknown label '{}'", l.as_ref())))?;
            if out.contains(&p) {
                return Err(Error::Layout(format!("label '{}' listed twice", l.as_ref())));
            }
            out.push(p);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Sub-layout made of the given positions (kept in layout order).
    pub fn select(&self, positions: &[usize]) -> Self {
        let mut pos = positions.to_vec();
        pos.sort_unstable();
        Self { subsystems: pos.iter().map(|&i| self.subsystems[i].clone()).collect() }
    }

    /// Concatenation; fails on label collision.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.subsystems
                .iter()
                .chain(other.subsystems.iter())
                .map(|s| (s.label.clone(), s.dim)),
        )
    }

    /// Same dimensions, new labels.
    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Layout(format!(
                "relabel needs {} labels, got {}",
                self.len(),
                labels.len()
            )));
        }
        Self::new(labels.iter().zip(&self.subsystems).map(|(l, s)| (l.as_ref().to_string(), s.dim)))
    }
}

impl fmt::Display for SystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.subsystems.iter().map(|s| format!("{}:{}", s.label, s.dim)).collect();
        write!(f, "[{}]", parts.join(" ⊗ "))
    }
}

/// Row-major strides for a list of dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over the subsystems in `positions`,
/// enumerated in row-major order of those subsystems.
pub(crate) fn offsets(dims: &[usize], positions: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for k in 0..dims[p] {
                next.push(base + k * st[p]);
            }
        }
        out = next;
    }
    out
}
