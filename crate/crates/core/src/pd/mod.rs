//! Validated SPD matrices, factorizations, spectral matrix functions and seeded sampling.

mod factor;
mod func;
mod matrix;
pub mod random;

pub use factor::{
    cholesky, kron, kron_capped, log_relative_spectrum, loewner_leq, simultaneous_diagonalize,
    sym_eig, symmetric_eigen, symmetric_eigenvalues, try_cholesky, CholeskyFactor,
    CongruencePair, EigenDecomposition, EIG_ITERS_PER_DIM, KRON_DIM_CAP,
};
pub use func::{exp_symmetric, mat_fn, MatFn};
pub use matrix::{make_spd, SpdMatrix, SYMMETRY_TOL};
pub use random::{random_spd, seeded_rng};

pub(crate) use matrix::symmetrize;
