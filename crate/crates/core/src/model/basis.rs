//! Trace-orthonormal Hermitian operator bases.

use num_complex::Complex64;

use crate::linalg::CMatrix;
use crate::model::ModelError;

/// `d²` Hermitian operators with `Tr(σ_μ σ^ν) = δ_μ^ν`.
///
/// The basis is self-dual: `σ_0 = I/√d`, then for each pair `j < k` the
/// symmetric and antisymmetric off-diagonal generators, then the `d−1`
/// traceless diagonal generators, all normalized to unit Hilbert–Schmidt norm.
/// For `d = 2` this is `{I, X, Y, Z}/√2`.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    d: usize,
    sigma: Vec<CMatrix<f64>>,
    dual: Vec<CMatrix<f64>>,
}

pub fn make_basis(d: usize) -> Result<OperatorBasis, ModelError> {
    if d < 2 {
        return Err(ModelError::BadDimension(d));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut sigma = Vec::with_capacity(d * d);
    sigma.push(CMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt()));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::new(h, 0.0);
            sym[(k, j)] = Complex64::new(h, 0.0);
            sigma.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = Complex64::new(0.0, -h);
            anti[(k, j)] = Complex64::new(0.0, h);
            sigma.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let diag = CMatrix::from_fn(d, d, |r, c| {
            if r != c {
                zero
            } else if r < l {
                Complex64::new(norm, 0.0)
            } else if r == l {
                Complex64::new(-(l as f64) * norm, 0.0)
            } else {
                zero
            }
        });
        sigma.push(diag);
    }
    let dual = sigma.clone();
    Ok(OperatorBasis { d, sigma, dual })
}

impl OperatorBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma(&self) -> &[CMatrix<f64>] {
        &self.sigma
    }

    pub fn dual(&self) -> &[CMatrix<f64>] {
        &self.dual
    }

    /// Gram matrix `Tr(σ_μ σ^ν)`.
    pub fn gram(&self) -> Vec<Vec<Complex64>> {
        self.sigma
            .iter()
            .map(|s| self.dual.iter().map(|t| s.trace_product(t)).collect())
            .collect()
    }

    /// `Σ c_{μ…ν} σ_μ ⊗ … ⊗ σ_ν` over `m` factors, first factor slowest.
    pub fn operator(&self, coefficients: &[f64], m: usize) -> CMatrix<f64> {
        self.expand(coefficients, m, &self.sigma)
    }

    /// Same expansion in the dual basis (observables).
    pub fn dual_operator(&self, coefficients: &[f64], m: usize) -> CMatrix<f64> {
        self.expand(coefficients, m, &self.dual)
    }

    fn expand(&self, coefficients: &[f64], m: usize, basis: &[CMatrix<f64>]) -> CMatrix<f64> {
        let n = self.d * self.d;
        assert_eq!(coefficients.len(), n.pow(m as u32), "coefficient count");
        let dim = self.d.pow(m as u32);
        let mut out = CMatrix::zeros(dim, dim);
        for (flat, &c) in coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut rest = flat;
            let mut factors = Vec::with_capacity(m);
            for _ in 0..m {
                factors.push(rest % n);
                rest /= n;
            }
            factors.reverse();
            let term = factors[1..]
                .iter()
                .fold(basis[factors[0]].clone(), |acc, &mu| acc.kron(&basis[mu]));
            out = &out + &term.scale_real(c);
        }
        out
    }

    /// Real coefficients `Tr(σ^μ⊗… X)` of an operator on `m` qudits.
    pub fn coefficients(&self, op: &CMatrix<f64>, m: usize) -> Vec<f64> {
        let n = self.d * self.d;
        let count = n.pow(m as u32);
        (0..count)
            .map(|flat| {
                let mut e = vec![0.0; count];
                e[flat] = 1.0;
                self.dual_operator(&e, m).trace_product(op).re
            })
            .collect()
    }
}
