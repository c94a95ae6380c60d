#![allow(dead_code)]

use jmsteer::linalg::{hermitian_eigensystem, tensor_product};
use jmsteer::{BipartiteState, Matrix, Povm, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

pub fn ginibre(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    Matrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    ginibre(rng, dim).hermitian_part()
}

/// G G† / Tr(G G†), full rank with probability one.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    let g = ginibre(rng, dim);
    let w = &g * &g.adjoint();
    let t = w.trace().re;
    w.scale_real(1.0 / t)
}

/// Random density matrix of rank `rank`.
pub fn random_density_rank(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Matrix {
    let mut w = Matrix::zeros(dim);
    for _ in 0..rank {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        w = &w + &Matrix::outer(&v);
    }
    let t = w.trace().re;
    w.scale_real(1.0 / t)
}

/// Unitary from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    let es = hermitian_eigensystem(&random_hermitian(rng, dim)).unwrap();
    Matrix::from_fn(dim, |i, j| es.vector(j)[i])
}

pub fn random_bipartite(rng: &mut ChaCha8Rng, d: usize) -> BipartiteState {
    BipartiteState::new(random_density(rng, d * d), d, d).unwrap()
}

pub fn random_product(rng: &mut ChaCha8Rng, d_a: usize, d_b: usize) -> BipartiteState {
    let a = random_density(rng, d_a);
    let b = random_density(rng, d_b);
    BipartiteState::new(tensor_product(&a, &b), d_a, d_b).unwrap()
}

/// E_i = S^{-1/2} A_i S^{-1/2} with S = Σ A_i and random PSD A_i.
pub fn random_povm(rng: &mut ChaCha8Rng, dim: usize, outcomes: usize) -> Povm {
    let parts: Vec<Matrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, dim);
            &g * &g.adjoint()
        })
        .collect();
    let total = parts.iter().fold(Matrix::zeros(dim), |acc, p| &acc + p);
    let inv_sqrt = hermitian_eigensystem(&total).unwrap().reconstruct_with(|l| 1.0 / l.sqrt());
    let effects = parts
        .iter()
        .map(|p| (&(&inv_sqrt * p) * &inv_sqrt).hermitian_part())
        .collect();
    Povm::new(dim, (0..outcomes as i64).collect(), effects).unwrap()
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Computational-basis measurement on C^d.
pub fn computational_basis(d: usize) -> Povm {
    let effects = (0..d)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[k] = C64::new(1.0, 0.0);
            Matrix::outer(&v)
        })
        .collect();
    Povm::new(d, (0..d as i64).collect(), effects).unwrap()
}

/// Discrete Fourier basis on C^d, mutually unbiased with the computational one.
pub fn fourier_basis(d: usize) -> Povm {
    let effects = (0..d)
        .map(|k| {
            let v: Vec<C64> = (0..d)
                .map(|j| {
                    let phase = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
                    C64::from_polar(1.0 / (d as f64).sqrt(), phase)
                })
                .collect();
            Matrix::outer(&v)
        })
        .collect();
    Povm::new(d, (0..d as i64).collect(), effects).unwrap()
}

/// Closed-form eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn qubit_eigenvalues(m: &Matrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean - r, mean + r]
}

/// Purification-derived ρ_AE for ρ_AB = Σ_k λ_k |v_k⟩⟨v_k|, with E
/// carrying the index k.
pub fn eve_state(state: &BipartiteState) -> BipartiteState {
    let (d_a, d_b) = (state.d_a(), state.d_b());
    let es = hermitian_eigensystem(state.rho()).unwrap();
    let n = d_a * d_b;
    let amps: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let w = es.values[k].max(0.0).sqrt();
            es.vector(k).into_iter().map(|c| c * w).collect()
        })
        .collect();
    let rho = Matrix::from_fn(d_a * n, |r, c| {
        let (a, k) = (r / n, r % n);
        let (a2, k2) = (c / n, c % n);
        (0..d_b)
            .map(|b| amps[k][a * d_b + b] * amps[k2][a2 * d_b + b].conj())
            .sum()
    });
    BipartiteState::new(rho.hermitian_part(), d_a, n).unwrap()
}
