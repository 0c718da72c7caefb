use nalgebra::DVector;

use super::layout::{offsets, SystemLayout};
use super::linalg::{c, eigh, eigvalsh, hermiticity_defect, CMatrix, CVector, C64, ZERO};
use crate::error::{Error, Result};

/// Tolerance used for every density-operator invariant.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues above this count toward the numerical rank.
pub const RANK_TOL: f64 = 1e-12;

/// Positive, unit-trace operator on a labeled tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    layout: SystemLayout,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity (all at 1e-10).
    pub fn new(matrix: CMatrix, layout: SystemLayout) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidState {
                invariant: "dimension",
                detail: format!("matrix is {}x{}, layout {} needs {d}x{d}", matrix.nrows(), matrix.ncols(), layout),
            });
        }
        let herm = hermiticity_defect(&matrix);
        if herm > STATE_TOL {
            return Err(Error::InvalidState { invariant: "hermitian", detail: format!("max |ρ - ρ†| = {herm:e}") });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState { invariant: "trace", detail: format!("trace = {} + {}i", tr.re, tr.im) });
        }
        let min = eigvalsh(&matrix).last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState {
                invariant: "positivity",
                detail: format!("smallest eigenvalue {min:e}"),
            });
        }
        Ok(Self { matrix, layout })
    }

    /// Hermitizes and renormalizes a matrix that is a state up to roundoff, then validates it.
    pub fn from_noisy(matrix: CMatrix, layout: SystemLayout) -> Result<Self> {
        let h = (&matrix + matrix.adjoint()) * c(0.5, 0.0);
        let tr = h.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidState { invariant: "trace", detail: format!("trace = {tr}") });
        }
        Self::new(h / c(tr, 0.0), layout)
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, layout: SystemLayout) -> Self {
        Self { matrix, layout }
    }

    /// Projector onto a normalized pure state.
    pub fn from_pure(state: &PureState) -> Self {
        let v = state.vector();
        Self { matrix: v * v.adjoint(), layout: state.layout().clone() }
    }

    /// `I/d` on the given layout.
    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.total_dim();
        Self { matrix: CMatrix::identity(d, d) / c(d as f64, 0.0), layout }
    }

    /// `|i⟩⟨i|` on a single labeled system.
    pub fn basis(label: &str, dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Param(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = c(1.0, 0.0);
        Ok(Self { matrix: m, layout: SystemLayout::new([(label, dim)])? })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix)
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > RANK_TOL).count()
    }

    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(Self { matrix: self.matrix.clone(), layout: self.layout.relabel(labels)? })
    }

    /// Kronecker composite `self ⊗ other`; labels must be disjoint.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self { matrix: self.matrix.kronecker(&other.matrix), layout })
    }

    /// Reduced operator on `keep`, surviving subsystems in their original order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Layout("partial trace needs at least one kept subsystem".into()));
        }
        let kept = self.layout.positions(keep)?;
        let dims = self.layout.dims();
        let traced: Vec<usize> = (0..dims.len()).filter(|p| !kept.contains(p)).collect();
        let rows = offsets(&dims, &kept);
        let inner = offsets(&dims, &traced);
        let n = rows.len();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for &t in &inner {
                    acc += self.matrix[(rows[i] + t, rows[j] + t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self { matrix: out, layout: self.layout.select(&kept) })
    }

    /// Reorders subsystems. `order` lists the labels in their new order.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.layout.len() {
            return Err(Error::Layout("permutation must list every subsystem exactly once".into()));
        }
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            let p = self
                .layout
                .position(l.as_ref())
                .ok_or_else(|| Error::Layout(format!("unknown label '{}'", l.as_ref())))?;
            if perm.contains(&p) {
                return Err(Error::Layout(format!("label '{}' listed twice", l.as_ref())));
            }
            perm.push(p);
        }
        let dims = self.layout.dims();
        let map = permuted_offsets(&dims, &perm);
        let n = map.len();
        let m = CMatrix::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        let layout = SystemLayout::new(perm.iter().map(|&p| {
            let s = &self.layout.subsystems()[p];
            (s.label.clone(), s.dim)
        }))?;
        Ok(Self { matrix: m, layout })
    }

    /// Merges adjacent subsystems into composite ones. Each group is a list of
    /// consecutive labels and the groups must cover the layout in order.
    pub fn regroup<S: AsRef<str>>(&self, groups: &[(&str, Vec<S>)]) -> Result<Self> {
        let mut expected = self.layout.labels();
        let mut parts = Vec::with_capacity(groups.len());
        for (name, members) in groups {
            if members.is_empty() {
                return Err(Error::Layout(format!("group '{name}' is empty")));
            }
            let mut dim = 1;
            for m in members {
                match expected.next() {
                    Some(l) if l == m.as_ref() => dim *= self.layout.dim_of(l)?,
                    _ => {
                        return Err(Error::Layout(format!(
                            "group '{name}' is not a consecutive run of the layout at '{}'",
                            m.as_ref()
                        )))
                    }
                }
            }
            parts.push((name.to_string(), dim));
        }
        if expected.next().is_some() {
            return Err(Error::Layout("groups do not cover the layout".into()));
        }
        Ok(Self { matrix: self.matrix.clone(), layout: SystemLayout::new(parts)? })
    }

    /// `(U_1 ⊗ … ⊗ U_n) ρ (U_1 ⊗ … ⊗ U_n)†` for one unitary per subsystem.
    pub fn apply_local_unitaries(&self, unitaries: &[CMatrix]) -> Result<Self> {
        if unitaries.len() != self.layout.len() {
            return Err(Error::Shape("one unitary per subsystem is required".into()));
        }
        let mut u = CMatrix::identity(1, 1);
        for (w, s) in unitaries.iter().zip(self.layout.subsystems()) {
            if w.nrows() != s.dim || w.ncols() != s.dim {
                return Err(Error::Shape(format!("unitary for '{}' must be {}x{}", s.label, s.dim, s.dim)));
            }
            u = u.kronecker(w);
        }
        Ok(Self { matrix: &u * &self.matrix * u.adjoint(), layout: self.layout.clone() })
    }

    /// Minimal purification `Σ_k √λ_k |k⟩|k⟩_E`, with `E` appended last and of
    /// dimension equal to the numerical rank. Eigenvalues are taken in
    /// decreasing order, which fixes the basis of `E`.
    pub fn purify(&self, env_label: &str) -> Result<PureState> {
        let (vals, vecs) = eigh(&self.matrix);
        let r = vals.iter().filter(|&&v| v > RANK_TOL).count().max(1);
        let layout = self.layout.concat(&SystemLayout::new([(env_label, r)])?)?;
        let kept: f64 = vals[..r].iter().map(|v| v.max(0.0)).sum();
        let d = self.dim();
        let mut v = CVector::zeros(d * r);
        for k in 0..r {
            let w = (vals[k].max(0.0) / kept).sqrt();
            for i in 0..d {
                v[i * r + k] = vecs[(i, k)] * w;
            }
        }
        PureState::new(v, layout)
    }

    /// Matrix `Φ` with columns `√λ_k |k⟩`, so that `ρ = Φ Φ†` and the
    /// purification is `Σ_k Φ[:,k] ⊗ |k⟩_E`.
    pub(crate) fn purification_matrix(&self) -> CMatrix {
        let psi = self.purify("__env").expect("purification of a validated state");
        let r = psi.layout().subsystems().last().map(|s| s.dim).unwrap_or(1);
        let d = self.dim();
        CMatrix::from_fn(d, r, |i, k| psi.vector()[i * r + k])
    }
}

/// Unit vector on a labeled tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: CVector,
    layout: SystemLayout,
}

impl PureState {
    pub fn new(vector: CVector, layout: SystemLayout) -> Result<Self> {
        if vector.len() != layout.total_dim() {
            return Err(Error::InvalidState {
                invariant: "dimension",
                detail: format!("vector has length {}, layout {} needs {}", vector.len(), layout, layout.total_dim()),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState { invariant: "norm", detail: format!("‖v‖ = {norm}") });
        }
        Ok(Self { vector, layout })
    }

    /// Normalizes `vector` before validating.
    pub fn normalized(vector: CVector, layout: SystemLayout) -> Result<Self> {
        let n = vector.norm();
        if n == 0.0 {
            return Err(Error::InvalidState { invariant: "norm", detail: "zero vector".into() });
        }
        Self::new(vector / c(n, 0.0), layout)
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    /// Reduced state on `keep` without forming the full projector.
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::Layout("partial trace needs at least one kept subsystem".into()));
        }
        let kept = self.layout.positions(keep)?;
        let m = self.bipartition_matrix(&kept);
        Ok(DensityOperator::from_parts_unchecked(&m * m.adjoint(), self.layout.select(&kept)))
    }

    /// The amplitudes arranged as a matrix with rows indexed by the subsystems
    /// at `kept` and columns by the rest.
    pub(crate) fn bipartition_matrix(&self, kept: &[usize]) -> CMatrix {
        let dims = self.layout.dims();
        let rest: Vec<usize> = (0..dims.len()).filter(|p| !kept.contains(p)).collect();
        let rows = offsets(&dims, kept);
        let cols = offsets(&dims, &rest);
        CMatrix::from_fn(rows.len(), cols.len(), |i, j| self.vector[rows[i] + cols[j]])
    }

    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(Self { vector: self.vector.clone(), layout: self.layout.relabel(labels)? })
    }

    /// Reorders subsystems; `order` lists labels in the new order.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            let p = self
                .layout
                .position(l.as_ref())
                .ok_or_else(|| Error::Layout(format!("unknown label '{}'", l.as_ref())))?;
            if perm.contains(&p) {
                return Err(Error::Layout(format!("label '{}' listed twice", l.as_ref())));
            }
            perm.push(p);
        }
        if perm.len() != self.layout.len() {
            return Err(Error::Layout("permutation must list every subsystem exactly once".into()));
        }
        let map = permuted_offsets(&self.layout.dims(), &perm);
        let v = CVector::from_iterator(map.len(), map.iter().map(|&i| self.vector[i]));
        let layout = SystemLayout::new(perm.iter().map(|&p| {
            let s = &self.layout.subsystems()[p];
            (s.label.clone(), s.dim)
        }))?;
        Ok(Self { vector: v, layout })
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.vector.dotc(&other.vector)
    }
}

/// For a permutation `perm` (new position -> old position), the old flat index
/// of every new flat index.
fn permuted_offsets(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    offsets(dims, perm)
}

/// Computational basis ket `|i_1 … i_n⟩` as a plain vector.
pub fn basis_vector(dims: &[usize], digits: &[usize]) -> CVector {
    let total: usize = dims.iter().product();
    let mut idx = 0;
    for (d, i) in dims.iter().zip(digits) {
        idx = idx * d + i;
    }
    let mut v = DVector::from_element(total, ZERO);
    v[idx] = c(1.0, 0.0);
    v
}

#[cfg(test)]
pub(crate) fn diag_matrix(values: &[f64]) -> CMatrix {
    nalgebra::DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::linalg::max_abs_diff;

    fn bell() -> DensityOperator {
        let v = (basis_vector(&[2, 2], &[0, 0]) + basis_vector(&[2, 2], &[1, 1])) / c(2f64.sqrt(), 0.0);
        PureState::new(v, SystemLayout::bipartite(2, 2).unwrap()).unwrap().density()
    }

    #[test]
    fn constructor_flags_each_invariant() {
        let l = SystemLayout::new([("A", 2)]).unwrap();
        let bad_trace = diag_matrix(&[0.5, 0.4]);
        assert!(matches!(DensityOperator::new(bad_trace, l.clone()), Err(Error::InvalidState { invariant: "trace", .. })));
        let negative = diag_matrix(&[1.2, -0.2]);
        assert!(matches!(
            DensityOperator::new(negative, l.clone()),
            Err(Error::InvalidState { invariant: "positivity", .. })
        ));
        let mut nonherm = diag_matrix(&[0.5, 0.5]);
        nonherm[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityOperator::new(nonherm, l.clone()), Err(Error::InvalidState { invariant: "hermitian", .. })));
        assert!(DensityOperator::new(diag_matrix(&[1.0]), l).is_err());
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = DensityOperator::basis("A", 2, 0).unwrap();
        let b = DensityOperator::basis("B", 2, 1).unwrap();
        let ab = a.tensor_product(&b).unwrap();
        let expected = basis_vector(&[2, 2], &[0, 1]);
        assert!(max_abs_diff(ab.matrix(), &(&expected * expected.adjoint())) < 1e-15);
        assert!(a.tensor_product(&a).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell().partial_trace(&["A"]).unwrap();
        assert!(max_abs_diff(r.matrix(), &diag_matrix(&[0.5, 0.5])) < 1e-15);
        assert!(bell().partial_trace(&["Z"]).is_err());
        assert!(bell().partial_trace::<&str>(&[]).is_err());
    }

    #[test]
    fn purify_pure_and_maximally_mixed() {
        let p = DensityOperator::basis("A", 2, 0).unwrap().purify("E").unwrap();
        assert_eq!(p.layout().dim_of("E").unwrap(), 1);
        let mixed = DensityOperator::maximally_mixed(SystemLayout::new([("A", 2)]).unwrap());
        let p = mixed.purify("E").unwrap();
        assert_eq!(p.layout().dim_of("E").unwrap(), 2);
        let sa = p.reduced(&["A"]).unwrap();
        let se = p.reduced(&["E"]).unwrap();
        assert!(max_abs_diff(sa.matrix(), &diag_matrix(&[0.5, 0.5])) < 1e-14);
        assert!(max_abs_diff(se.matrix(), &diag_matrix(&[0.5, 0.5])) < 1e-14);
    }

    #[test]
    fn purify_dyadic_spectrum() {
        let rho = DensityOperator::new(diag_matrix(&[0.5, 0.25, 0.25]), SystemLayout::new([("A", 3)]).unwrap()).unwrap();
        let p = rho.purify("E").unwrap();
        assert_eq!(p.layout().dim_of("E").unwrap(), 3);
        assert!(max_abs_diff(p.reduced(&["A"]).unwrap().matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn permute_then_back_is_identity() {
        let a = DensityOperator::basis("A", 2, 1).unwrap();
        let b = DensityOperator::maximally_mixed(SystemLayout::new([("B", 3)]).unwrap());
        let ab = a.tensor_product(&b).unwrap();
        let ba = ab.permute(&["B", "A"]).unwrap();
        assert!(max_abs_diff(ba.matrix(), b.tensor_product(&a).unwrap().matrix()) < 1e-15);
        assert!(max_abs_diff(ba.permute(&["A", "B"]).unwrap().matrix(), ab.matrix()) < 1e-15);
    }

    #[test]
    fn regroup_requires_consecutive_cover() {
        let ab = bell().tensor_product(&bell().relabel(&["C", "D"]).unwrap()).unwrap();
        let g = ab.regroup(&[("X", vec!["A", "B"]), ("Y", vec!["C", "D"])]).unwrap();
        assert_eq!(g.layout().dims(), vec![4, 4]);
        assert!(ab.regroup(&[("X", vec!["A", "C"]), ("Y", vec!["B", "D"])]).is_err());
        assert!(ab.regroup(&[("X", vec!["A", "B"])]).is_err());
    }
}
