//! Named test states and seeded random sampling.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::layout::SystemLayout;
use super::linalg::{c, CMatrix, CVector, C64};
use super::state::{basis_vector, DensityOperator, PureState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// The named state families. Werner states follow `p·|ψ⁻⟩⟨ψ⁻| + (1-p)·I/4`
/// and isotropic states `p·|Φ_d⟩⟨Φ_d| + (1-p)·I/d²`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    Bell(BellKind),
    /// `(1/d) Σ_i |ii⟩⟨ii|`.
    ClassicallyCorrelated { d: usize },
    Werner { p: f64 },
    Isotropic { p: f64, d: usize },
    /// `G G† / tr(G G†)` with `G` a seeded complex Gaussian `(d_a d_b) × rank` matrix.
    Random { d_a: usize, d_b: usize, rank: usize, seed: u64 },
}

pub const FAMILY_NAMES: [&str; 5] = ["bell", "classically_correlated", "werner", "isotropic", "random"];

impl StateFamily {
    /// Builds a family from its name and numeric parameters, as used by the
    /// state-spec format and the CLI.
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "bell" => &["which"],
            "classically_correlated" => &["d"],
            "werner" => &["p"],
            "isotropic" => &["p", "d"],
            "random" => &["d", "da", "db", "rank", "seed"],
            other => return Err(Error::Param(format!("unknown state family '{other}'"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Param(format!("family '{name}' has no parameter '{k}'")));
        }
        let get = |k: &str| params.get(k).copied();
        let count = |k: &str, default: usize| -> Result<usize> {
            match get(k) {
                None => Ok(default),
                Some(v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
                Some(v) => Err(Error::Param(format!("'{k}' must be a positive integer, got {v}"))),
            }
        };
        let prob = |k: &str| -> Result<f64> { get(k).ok_or_else(|| Error::Param(format!("family '{name}' needs '{k}'"))) };
        Ok(match name {
            "bell" => Self::Bell(match count("which", 1)? {
                1 => BellKind::PhiPlus,
                2 => BellKind::PhiMinus,
                3 => BellKind::PsiPlus,
                4 => BellKind::PsiMinus,
                w => return Err(Error::Param(format!("bell 'which' must be 1..=4, got {w}"))),
            }),
            "classically_correlated" => Self::ClassicallyCorrelated { d: count("d", 2)? },
            "werner" => Self::Werner { p: prob("p")? },
            "isotropic" => Self::Isotropic { p: prob("p")?, d: count("d", 2)? },
            _ => {
                let d = count("d", 2)?;
                let d_a = count("da", d)?;
                let d_b = count("db", d)?;
                let rank = count("rank", d_a * d_b)?;
                let seed = match get("seed") {
                    None => 0,
                    Some(s) if s >= 0.0 && s.fract() == 0.0 => s as u64,
                    Some(s) => return Err(Error::Param(format!("'seed' must be a non-negative integer, got {s}"))),
                };
                Self::Random { d_a, d_b, rank, seed }
            }
        })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Param(format!("p = {p} is outside [0, 1]")));
    }
    Ok(())
}

fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

fn max_entangled(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    v
}

pub fn bell_vector(kind: BellKind) -> CVector {
    let e = |a, b| basis_vector(&[2, 2], &[a, b]);
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match kind {
        BellKind::PhiPlus => (e(0, 0) + e(1, 1)) * s,
        BellKind::PhiMinus => (e(0, 0) - e(1, 1)) * s,
        BellKind::PsiPlus => (e(0, 1) + e(1, 0)) * s,
        BellKind::PsiMinus => (e(0, 1) - e(1, 0)) * s,
    }
}

/// Constructs the named state on layout `A ⊗ B`.
pub fn state_family(family: &StateFamily) -> Result<DensityOperator> {
    match *family {
        StateFamily::Bell(kind) => {
            Ok(PureState::new(bell_vector(kind), SystemLayout::bipartite(2, 2)?)?.density())
        }
        StateFamily::ClassicallyCorrelated { d } => {
            let mut m = CMatrix::zeros(d * d, d * d);
            for i in 0..d {
                m[(i * d + i, i * d + i)] = c(1.0 / d as f64, 0.0);
            }
            DensityOperator::new(m, SystemLayout::bipartite(d, d)?)
        }
        StateFamily::Werner { p } => {
            check_probability(p)?;
            let m = projector(&bell_vector(BellKind::PsiMinus)) * c(p, 0.0)
                + CMatrix::identity(4, 4) * c((1.0 - p) / 4.0, 0.0);
            DensityOperator::from_noisy(m, SystemLayout::bipartite(2, 2)?)
        }
        StateFamily::Isotropic { p, d } => {
            check_probability(p)?;
            let n = d * d;
            let m = projector(&max_entangled(d)) * c(p, 0.0) + CMatrix::identity(n, n) * c((1.0 - p) / n as f64, 0.0);
            DensityOperator::from_noisy(m, SystemLayout::bipartite(d, d)?)
        }
        StateFamily::Random { d_a, d_b, rank, seed } => {
            let layout = SystemLayout::bipartite(d_a, d_b)?;
            random_density_on(layout, rank, seed)
        }
    }
}

/// Seeded random mixed state of the given rank on an arbitrary layout.
pub fn random_density_on(layout: SystemLayout, rank: usize, seed: u64) -> Result<DensityOperator> {
    let d = layout.total_dim();
    if rank == 0 || rank > d {
        return Err(Error::Param(format!("rank must be in 1..={d}, got {rank}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(&mut rng, d, rank);
    DensityOperator::from_noisy(&g * g.adjoint(), layout)
}

/// Seeded random mixed state on a single labeled system.
pub fn random_density(label: &str, d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_on(SystemLayout::new([(label, d)])?, rank, seed)
}

/// Seeded Haar-random pure state.
pub fn random_pure(layout: SystemLayout, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(&mut rng, layout.total_dim(), 1);
    PureState::normalized(g.column(0).into_owned(), layout)
}

pub(crate) fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed isometry from a caller-supplied generator.
pub fn haar_isometry_with<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<CMatrix> {
    if cols == 0 || rows < cols {
        return Err(Error::Shape(format!("an isometry needs rows ≥ cols ≥ 1, got {rows}x{cols}")));
    }
    let g = gaussian_matrix(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the phase freedom of QR so the distribution is exactly Haar.
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Seeded Haar isometry `rows × cols` (`V†V = I`).
pub fn haar_isometry(rows: usize, cols: usize, seed: u64) -> Result<CMatrix> {
    haar_isometry_with(&mut ChaCha8Rng::seed_from_u64(seed), rows, cols)
}

pub fn haar_unitary(d: usize, seed: u64) -> Result<CMatrix> {
    haar_isometry(d, d, seed)
}

/// Independent child seed for stream `index` of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}
