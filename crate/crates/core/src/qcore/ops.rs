use super::{
    check_state, hermitian_eigen, hermitian_eigenvalues, pauli_y, symmetrize, CMatrix,
    DensityMatrix, Operator, C64, STATE_TOL,
};
use crate::error::{Error, Result};

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        let entries = kron(self.entries(), other.entries());
        if self.is_unitary() && other.is_unitary() {
            Operator::trusted_unitary(entries)
        } else {
            Operator::new(entries)
        }
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        let mut labels = self.labels().to_vec();
        labels.extend_from_slice(other.labels());
        DensityMatrix::from_trusted(kron(self.entries(), other.entries()), labels)
    }
}

/// Kronecker product; labels of density matrices are concatenated in operand order.
pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Reduced state on the subsystems in `keep`. The result keeps the labels in
/// the register order of `rho`, regardless of the order given in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::Validation(
            "partial trace needs at least one kept subsystem".into(),
        ));
    }
    let labels = rho.labels();
    for tag in keep {
        if !labels.iter().any(|l| l == tag) {
            return Err(Error::Label((*tag).to_string()));
        }
    }
    let n = labels.len();
    let kept: Vec<usize> = (0..n)
        .filter(|&q| keep.contains(&labels[q].as_str()))
        .collect();
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    // Full-register index for a (kept, traced) pair of sub-indices.
    let place = |sub: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
            let bit = (sub >> (m - 1 - pos)) & 1;
            acc | (bit << (n - 1 - q))
        })
    };
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..dk).map(|i| place(i, &kept)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|r| place(r, &traced)).collect();

    let full = rho.entries();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for &r in &traced_idx {
                acc += full[(kept_idx[i] | r, kept_idx[j] | r)];
            }
            out[(i, j)] = acc;
        }
    }
    let out_labels = kept.iter().map(|&q| labels[q].clone()).collect();
    Ok(DensityMatrix::from_trusted(out, out_labels))
}

/// `1/2 sum |eig(a - b)|` on raw Hermitian matrices.
pub(crate) fn trace_distance_matrices(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut diff = a - b;
    symmetrize(&mut diff);
    let d = if diff.nrows() == 2 {
        // Closed form for 2x2 Hermitian: eigenvalues m +- sqrt(h^2 + |off|^2).
        let m = 0.5 * (diff[(0, 0)].re + diff[(1, 1)].re);
        let h = 0.5 * (diff[(0, 0)].re - diff[(1, 1)].re);
        let r = h.hypot(diff[(0, 1)].norm());
        0.5 * ((m + r).abs() + (m - r).abs())
    } else {
        0.5 * hermitian_eigenvalues(&diff)
            .iter()
            .map(|v| v.abs())
            .sum::<f64>()
    };
    d.min(1.0)
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(trace_distance_matrices(a.entries(), b.entries()))
}

/// Wootters concurrence of a two-qubit state given as a raw matrix.
///
/// With `rho = B B^dagger`, the Wootters `lambda_i` are the singular values of
/// `B^T (Y (x) Y) B`; working with those avoids square roots of near-zero
/// eigenvalues, which would amplify round-off for almost pure states.
pub(crate) fn concurrence_unchecked(rho: &CMatrix) -> f64 {
    let yy = kron(pauli_y().entries(), pauli_y().entries());
    let mut h = rho.clone();
    symmetrize(&mut h);
    let (w, v) = hermitian_eigen(&h);
    let b = CMatrix::from_fn(4, 4, |i, j| v[(i, j)] * w[j].max(0.0).sqrt());
    let tau = b.transpose() * yy * &b;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    (sv[0] - sv[1] - sv[2] - sv[3]).clamp(0.0, 1.0)
}

pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    check_state(rho.entries(), STATE_TOL)?;
    Ok(concurrence_unchecked(rho.entries()))
}

/// `Tr(rho O)` for Hermitian `O`; the round-off imaginary part is dropped.
pub fn expectation(rho: &DensityMatrix, op: &Operator) -> Result<f64> {
    if op.dim() != rho.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            found: op.dim(),
        });
    }
    if !op.is_hermitian(STATE_TOL) {
        return Err(Error::Validation("observable is not Hermitian".into()));
    }
    let (r, o) = (rho.entries(), op.entries());
    let n = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += r[(i, j)] * o[(j, i)];
        }
    }
    Ok(acc.re)
}

/// `U rho U^dagger`.
pub fn apply_unitary(rho: &DensityMatrix, u: &Operator) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            found: u.dim(),
        });
    }
    if !u.is_unitary() {
        let defect = u.unitarity_defect();
        if defect > STATE_TOL {
            return Err(Error::Validation(format!(
                "operator is not unitary (defect {defect:.3e})"
            )));
        }
    }
    let m = u.entries() * rho.entries() * u.entries().adjoint();
    Ok(DensityMatrix::from_trusted(m, rho.labels().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{c64, pauli_x, pauli_z};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ket0() -> DensityMatrix {
        DensityMatrix::basis(0, ["A"]).unwrap()
    }
    fn ket1() -> DensityMatrix {
        DensityMatrix::basis(1, ["A"]).unwrap()
    }
    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_real_pure(&[s, 0.0, 0.0, s], ["A", "B"]).unwrap()
    }

    fn assert_mat_eq(a: &CMatrix, b: &CMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() <= tol, "{a}\n!=\n{b}");
        }
    }

    /// Random unitary `V diag(e^{i w}) V^dagger` from a Hermitian seed matrix.
    fn unitary_from(seed: &[f64], dim: usize) -> Operator {
        let mut h = CMatrix::zeros(dim, dim);
        let mut k = 0;
        for i in 0..dim {
            for j in i..dim {
                let z = c64(seed[k % seed.len()], seed[(k + 1) % seed.len()]);
                k += 2;
                if i == j {
                    h[(i, i)] = c64(z.re, 0.0);
                } else {
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
        }
        let (w, v) = hermitian_eigen(&h);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            w.iter().map(|&x| C64::from_polar(1.0, 3.0 * x)),
        ));
        Operator::unitary(&v * d * v.adjoint()).unwrap()
    }

    fn random_state(seed: &[f64], labels: &[&str]) -> DensityMatrix {
        let dim = 1usize << labels.len();
        // rho = A A^dagger / Tr(A A^dagger) is always a valid state.
        let a = CMatrix::from_fn(dim, dim, |i, j| {
            let k = (i * dim + j) * 2;
            c64(seed[k % seed.len()], seed[(k + 1) % seed.len()])
        });
        let m = &a * a.adjoint();
        let tr: C64 = (0..dim).map(|i| m[(i, i)]).sum();
        DensityMatrix::new(m / tr, labels.iter().copied()).unwrap()
    }

    #[test]
    fn tensor_identities_is_identity() {
        let i4 = tensor(&super::super::identity(2), &super::super::identity(2));
        assert_mat_eq(i4.entries(), &CMatrix::identity(4, 4), 0.0);
    }

    #[test]
    fn tensor_basis_projectors() {
        let p = tensor(&ket0(), &ket1().relabel(["B"]).unwrap());
        let mut expected = CMatrix::zeros(4, 4);
        expected[(1, 1)] = c64(1.0, 0.0);
        assert_mat_eq(p.entries(), &expected, 0.0);
        assert_eq!(p.labels(), ["A", "B"]);
    }

    #[test]
    fn tensor_x_z_hand_expansion() {
        let m = tensor(&pauli_x(), &pauli_z());
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 2)] = c64(1.0, 0.0);
        expected[(1, 3)] = c64(-1.0, 0.0);
        expected[(2, 0)] = c64(1.0, 0.0);
        expected[(3, 1)] = c64(-1.0, 0.0);
        assert_mat_eq(m.entries(), &expected, 0.0);
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let seed: Vec<f64> = (0..32)
            .map(|k| ((k * 37 % 17) as f64 - 8.0) / 7.0)
            .collect();
        let a = random_state(&seed, &["A"]);
        let b = random_state(&seed[5..], &["B"]);
        let ab = tensor(&a, &b);
        let ra = partial_trace(&ab, &["A"]).unwrap();
        assert_mat_eq(ra.entries(), a.entries(), 1e-14);
        let rb = partial_trace(&ab, &["B"]).unwrap();
        assert_mat_eq(rb.entries(), b.entries(), 1e-14);

        let marg = partial_trace(&bell(), &["A"]).unwrap();
        assert_mat_eq(
            marg.entries(),
            &(CMatrix::identity(2, 2) * c64(0.5, 0.0)),
            1e-15,
        );
    }

    #[test]
    fn partial_trace_keeps_register_order() {
        let seed: Vec<f64> = (0..64)
            .map(|k| ((k * 13 % 11) as f64 - 5.0) / 3.0)
            .collect();
        let a = random_state(&seed, &["A"]);
        let b = random_state(&seed[3..], &["B"]);
        let c = random_state(&seed[7..], &["C"]);
        let abc = tensor(&tensor(&a, &b), &c);
        let ac = partial_trace(&abc, &["C", "A"]).unwrap();
        assert_eq!(ac.labels(), ["A", "C"]);
        assert_mat_eq(ac.entries(), tensor(&a, &c).entries(), 1e-14);
    }

    #[test]
    fn partial_trace_rejects_unknown_label() {
        let err = partial_trace(&bell(), &["Z"]).unwrap_err();
        assert!(matches!(err, Error::Label(ref l) if l == "Z"));
        assert!(partial_trace(&bell(), &[]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let rho = bell();
        assert_abs_diff_eq!(trace_distance(&rho, &rho).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            trace_distance(&ket0(), &ket1()).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let mixed = DensityMatrix::maximally_mixed(["A"]);
        assert_abs_diff_eq!(
            trace_distance(&ket0(), &mixed).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(matches!(
            trace_distance(&ket0(), &bell()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn trace_distance_2x2_closed_form_matches_eigensolver() {
        let seed: Vec<f64> = (0..16)
            .map(|k| ((k * 29 % 13) as f64 - 6.0) / 5.0)
            .collect();
        let a = random_state(&seed, &["A"]);
        let b = random_state(&seed[2..], &["A"]);
        let diff = a.entries() - b.entries();
        let eig: f64 = 0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|v| v.abs())
                .sum::<f64>();
        assert_abs_diff_eq!(trace_distance(&a, &b).unwrap(), eig, epsilon = 1e-14);
    }

    #[test]
    fn concurrence_bell_and_product() {
        assert_abs_diff_eq!(concurrence(&bell()).unwrap(), 1.0, epsilon = 1e-9);
        let prod = DensityMatrix::basis(1, ["A", "B"]).unwrap();
        assert_abs_diff_eq!(concurrence(&prod).unwrap(), 0.0, epsilon = 1e-9);
    }

    /// Oracle: eigenvalues of the non-Hermitian product rho (Y(x)Y) rho* (Y(x)Y)
    /// straight from a complex Schur decomposition.
    fn concurrence_by_schur(rho: &CMatrix) -> f64 {
        let yy = kron(pauli_y().entries(), pauli_y().entries());
        let r = rho * &yy * rho.map(|z| z.conj()) * &yy;
        let ev = nalgebra::Schur::new(r)
            .eigenvalues()
            .expect("triangular Schur form");
        let mut l: Vec<f64> = ev.iter().map(|z| z.re.max(0.0).sqrt()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        (l[0] - l[1] - l[2] - l[3]).max(0.0)
    }

    #[test]
    fn concurrence_werner_half() {
        let p = 0.5;
        let w =
            bell().entries() * c64(p, 0.0) + CMatrix::identity(4, 4) * c64((1.0 - p) / 4.0, 0.0);
        let oracle = concurrence_by_schur(&w);
        assert_abs_diff_eq!(oracle, 0.25, epsilon = 1e-12);
        let rho = DensityMatrix::new(w, ["A", "B"]).unwrap();
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), oracle, epsilon = 1e-9);
    }

    #[test]
    fn concurrence_rejects_non_states() {
        let mut m = bell().into_entries();
        m[(0, 0)] = c64(2.0, 0.0);
        let bad = DensityMatrix::from_trusted(m, vec!["A".into(), "B".into()]);
        assert!(matches!(concurrence(&bad), Err(Error::Validation(_))));
        assert!(matches!(concurrence(&ket0()), Err(Error::Dimension { .. })));
    }

    #[test]
    fn expectation_examples() {
        let plus = DensityMatrix::from_real_pure(&[1.0, 1.0], ["A"]).unwrap();
        assert_abs_diff_eq!(
            expectation(&plus, &pauli_x()).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            expectation(&ket0(), &pauli_x()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let mut d = CMatrix::zeros(2, 2);
        d[(0, 0)] = c64(0.7, 0.0);
        d[(1, 1)] = c64(0.3, 0.0);
        let rho = DensityMatrix::new(d, ["A"]).unwrap();
        assert_abs_diff_eq!(expectation(&rho, &pauli_z()).unwrap(), 0.4, epsilon = 1e-15);
        assert!(expectation(&rho, &super::super::sigma_plus()).is_err());
    }

    #[test]
    fn apply_unitary_examples() {
        let rho = bell();
        let same = apply_unitary(&rho, &super::super::identity(4)).unwrap();
        assert_mat_eq(same.entries(), rho.entries(), 0.0);
        let flipped = apply_unitary(&ket0(), &pauli_x()).unwrap();
        assert_mat_eq(flipped.entries(), ket1().entries(), 0.0);
        let not_unitary = Operator::new(CMatrix::identity(2, 2) * c64(2.0, 0.0));
        assert!(matches!(
            apply_unitary(&ket0(), &not_unitary),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn validated_constructor_rejects_bad_matrices() {
        let mut m = CMatrix::identity(2, 2) * c64(0.5, 0.0);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(DensityMatrix::new(m.clone(), ["A"]).is_err());
        m[(1, 0)] = c64(0.1, 0.0);
        assert!(DensityMatrix::new(m.clone(), ["A"]).is_ok());
        assert!(DensityMatrix::new(m.clone(), ["A", "B"]).is_err());
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(1.1, 0.0),
            c64(-0.1, 0.0),
        ]));
        assert!(DensityMatrix::new(neg, ["A"]).is_err());
    }

    #[test]
    fn conjugate_local_matches_embedded_unitary() {
        let seed: Vec<f64> = (0..40).map(|k| ((k * 7 % 19) as f64 - 9.0) / 4.0).collect();
        let rho = random_state(&seed, &["a", "b", "c", "d"]);
        let u = unitary_from(&seed[3..], 4);
        for first in 0..3 {
            let mut fast = rho.entries().clone();
            super::super::conjugate_local(&mut fast, u.entries(), first, 4);
            let full = super::super::embed(u.entries(), first, 4);
            let slow = &full * rho.entries() * full.adjoint();
            assert_mat_eq(&fast, &slow, 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn purity_preserved_under_random_unitary(
            seed in proptest::collection::vec(-2.0f64..2.0, 24),
        ) {
            let rho = random_state(&seed, &["A", "B"]);
            let u = unitary_from(&seed[4..], 4);
            let out = apply_unitary(&rho, &u).unwrap();
            prop_assert!((out.purity() - rho.purity()).abs() < 1e-12);
            out.check(STATE_TOL).unwrap();
        }

        #[test]
        fn trace_distance_triangle_inequality(
            seed in proptest::collection::vec(-2.0f64..2.0, 40),
        ) {
            let a = random_state(&seed, &["A", "B"]);
            let b = random_state(&seed[7..], &["A", "B"]);
            let c = random_state(&seed[13..], &["A", "B"]);
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9);
            prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn partial_trace_is_contractive(
            seed in proptest::collection::vec(-2.0f64..2.0, 40),
        ) {
            let a = random_state(&seed, &["A", "B"]);
            let b = random_state(&seed[9..], &["A", "B"]);
            let ra = partial_trace(&a, &["A"]).unwrap();
            let rb = partial_trace(&b, &["A"]).unwrap();
            prop_assert!((ra.trace().re - 1.0).abs() < 1e-12);
            ra.check(STATE_TOL).unwrap();
            prop_assert!(
                trace_distance(&ra, &rb).unwrap() <= trace_distance(&a, &b).unwrap() + 1e-9
            );
        }

        #[test]
        fn concurrence_invariant_under_local_unitaries(
            seed in proptest::collection::vec(-2.0f64..2.0, 40),
        ) {
            let rho = random_state(&seed, &["A", "B"]);
            let ua = unitary_from(&seed[5..], 2);
            let ub = unitary_from(&seed[11..], 2);
            let local = tensor(&ua, &ub);
            let rotated = apply_unitary(&rho, &local).unwrap();
            let before = concurrence(&rho).unwrap();
            let after = concurrence(&rotated).unwrap();
            prop_assert!((before - after).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&before));
        }
    }
}
