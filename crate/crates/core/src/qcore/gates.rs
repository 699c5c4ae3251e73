use super::{c64, CMatrix, Operator, C64};

fn mat2(a: C64, b: C64, c: C64, d: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

const O: C64 = C64::new(0.0, 0.0);
const I1: C64 = C64::new(1.0, 0.0);

pub fn identity(dim: usize) -> Operator {
    Operator::trusted_unitary(CMatrix::identity(dim, dim))
}

pub fn pauli_x() -> Operator {
    Operator::trusted_unitary(mat2(O, I1, I1, O))
}

pub fn pauli_y() -> Operator {
    Operator::trusted_unitary(mat2(O, c64(0.0, -1.0), c64(0.0, 1.0), O))
}

pub fn pauli_z() -> Operator {
    Operator::trusted_unitary(mat2(I1, O, O, -I1))
}

/// `|0><1|`, raising towards the `sigma_z = +1` state.
pub fn sigma_plus() -> Operator {
    Operator::new(mat2(O, I1, O, O))
}

/// `|1><0|`.
pub fn sigma_minus() -> Operator {
    Operator::new(mat2(O, O, I1, O))
}

/// Two-qubit SWAP `|00><00| + |01><10| + |10><01| + |11><11|`.
pub fn swap() -> Operator {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = I1;
    m[(1, 2)] = I1;
    m[(2, 1)] = I1;
    m[(3, 3)] = I1;
    Operator::trusted_unitary(m)
}

/// Single-qubit projector `|k><k|`.
pub fn basis_projector(k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(k, k)] = I1;
    m
}

/// `I_left (x) u (x) I_right` with `u` acting on qubits `first..first+k` of an
/// `n_qubits` register.
pub fn embed(u: &CMatrix, first: usize, n_qubits: usize) -> CMatrix {
    let k = u.nrows().trailing_zeros() as usize;
    assert!(first + k <= n_qubits, "gate does not fit in register");
    let left = CMatrix::identity(1 << first, 1 << first);
    let right_q = n_qubits - first - k;
    let right = CMatrix::identity(1 << right_q, 1 << right_q);
    left.kronecker(u).kronecker(&right)
}

/// In-place `rho <- U rho U^dagger` where `U = I (x) u (x) I` acts on the
/// contiguous qubits `first..first+k`, without forming `U`.
pub fn conjugate_local(rho: &mut CMatrix, u: &CMatrix, first: usize, n_qubits: usize) {
    let gdim = u.nrows();
    let k = gdim.trailing_zeros() as usize;
    assert!(first + k <= n_qubits, "gate does not fit in register");
    let dim = 1usize << n_qubits;
    assert_eq!(rho.nrows(), dim);
    let right = 1usize << (n_qubits - first - k);
    let left = 1usize << first;
    let idx = |a: usize, x: usize, b: usize| (a * gdim + x) * right + b;

    let mut buf = vec![O; gdim];
    // rows: rho <- U rho
    for col in 0..dim {
        for a in 0..left {
            for b in 0..right {
                for (x, slot) in buf.iter_mut().enumerate() {
                    *slot = rho[(idx(a, x, b), col)];
                }
                for x in 0..gdim {
                    let mut acc = O;
                    for (xp, v) in buf.iter().enumerate() {
                        acc += u[(x, xp)] * v;
                    }
                    rho[(idx(a, x, b), col)] = acc;
                }
            }
        }
    }
    // columns: rho <- rho U^dagger
    for row in 0..dim {
        for a in 0..left {
            for b in 0..right {
                for (x, slot) in buf.iter_mut().enumerate() {
                    *slot = rho[(row, idx(a, x, b))];
                }
                for x in 0..gdim {
                    let mut acc = O;
                    for (xp, v) in buf.iter().enumerate() {
                        acc += v * u[(x, xp)].conj();
                    }
                    rho[(row, idx(a, x, b))] = acc;
                }
            }
        }
    }
}
