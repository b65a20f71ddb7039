//! Born-rule synthesis of data tensors.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::Matrix;
use crate::model::rng::{derive_seed, keyed_rng};
use crate::model::{CorrelationConfig, CorrelationKind, Devices, ModelError, Provenance, ShotNoise};
use crate::tensor::{FusedIndexMap, Tensor};

/// Contracts axis `axis` of a row-major array with `w` (`shape[axis] × k`).
fn contract_axis(values: &[f64], shape: &[usize], axis: usize, w: &Matrix<f64>) -> (Vec<f64>, Vec<usize>) {
    let n = shape[axis];
    debug_assert_eq!(w.nrows(), n);
    let k = w.ncols();
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * k * inner];
    for o in 0..outer {
        for mu in 0..n {
            let src = &values[(o * n + mu) * inner..(o * n + mu + 1) * inner];
            for (col, &wk) in w.row(mu).iter().enumerate() {
                if wk == 0.0 {
                    continue;
                }
                let dst = &mut out[(o * k + col) * inner..(o * k + col + 1) * inner];
                for (x, &y) in dst.iter_mut().zip(src) {
                    *x += wk * y;
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = k;
    (out, new_shape)
}

/// Contracts the qudit axes of `count × (d²)^m` state coefficients with one
/// weight matrix per qudit (`None` leaves the axis in the coefficient basis).
fn contract(coefficients: &[f64], count: usize, n: usize, weights: &[Option<&Matrix<f64>>]) -> (Vec<f64>, Vec<usize>) {
    let mut shape = vec![count];
    shape.extend(std::iter::repeat_n(n, weights.len()));
    let mut values = coefficients.to_vec();
    for (q, w) in weights.iter().enumerate() {
        if let Some(w) = w {
            (values, shape) = contract_axis(&values, &shape, q + 1, w);
        }
    }
    (values, shape)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Coefficients of the unit-trace operator `τ(a, i_q)` mixed into the state
/// under `spam(q)`.
pub fn spam_tau(seed: u64, m: usize, d: usize, a: usize, iq: usize) -> Vec<f64> {
    let width = (d * d).pow(m as u32);
    let anchor = (d as f64).powf(-(m as f64) / 2.0);
    let mut rng = keyed_rng(seed, "spam-tau", &[a as u64, iq as u64]);
    let mut out = Vec::with_capacity(width);
    out.push(anchor);
    for _ in 1..width {
        out.push(anchor * gaussian(&mut rng));
    }
    out
}

/// Pair coefficients `Γ^{ij}[μ, ν]` (`d² × d²`) of the operator added to
/// `Σ_p^i ⊗ Σ_q^j` under `nonlocal(p, q)`.
///
/// Traceless; zero when either setting is the identity observable.
pub fn nonlocal_gamma(seed: u64, d: usize, i: usize, j: usize) -> Matrix<f64> {
    let n = d * d;
    if i == 0 || j == 0 {
        return Matrix::zeros(n, n);
    }
    let mut rng = keyed_rng(seed, "nonlocal-gamma", &[i as u64, j as u64]);
    let mut g = Matrix::from_fn(n, n, |_, _| gaussian(&mut rng));
    g[(0, 0)] = 0.0;
    g
}

fn check_devices(devices: &Devices, config: &CorrelationConfig) -> Result<(), ModelError> {
    devices.check()?;
    config.check()?;
    config.kind.validate(devices.m()).map_err(|e| match e {
        ModelError::InvalidConfig(msg) => ModelError::IncompatibleDevices(msg),
        other => other,
    })
}

/// Synthesizes `S_a^{i…k} = Tr(ρ_a Σ_1^i ⊗ … ⊗ Σ_m^k)` with the configured
/// correlation injected.
pub fn synthesize(devices: &Devices, config: &CorrelationConfig) -> Result<Tensor<f64>, ModelError> {
    check_devices(devices, config)?;
    let (m, d) = (devices.m(), devices.d());
    let n = d * d;
    let state = &devices.state;
    let all: Vec<Option<&Matrix<f64>>> = devices.measurements.iter().map(|w| Some(&w.weights)).collect();
    let (mut values, shape) = contract(&state.coefficients, state.count, n, &all);

    if !config.is_inert() {
        let eps = config.epsilon;
        match config.kind {
            CorrelationKind::None => {}
            CorrelationKind::Spam { qudit } => {
                let q = qudit - 1;
                let mq = devices.measurements[q].count();
                for iq in 0..mq {
                    let mut tau = Vec::with_capacity(state.count * state.width());
                    for a in 0..state.count {
                        tau.extend(spam_tau(config.seed, m, d, a, iq));
                    }
                    let column = devices.measurements[q].weights.select(&(0..n).collect::<Vec<_>>(), &[iq]);
                    let mut ws = all.clone();
                    ws[q] = Some(&column);
                    let (t, _) = contract(&tau, state.count, n, &ws);
                    // t has extent 1 on axis q+1; scatter into slice i_q = iq
                    let inner: usize = shape[q + 2..].iter().product();
                    let outer: usize = shape[..q + 1].iter().product();
                    for o in 0..outer {
                        for l in 0..inner {
                            let dst = (o * mq + iq) * inner + l;
                            values[dst] = (1.0 - eps) * values[dst] + eps * t[o * inner + l];
                        }
                    }
                }
            }
            CorrelationKind::Nonlocal { p, q } => {
                let (p, q) = (p - 1, q - 1);
                let mut ws = all.clone();
                ws[p] = None;
                ws[q] = None;
                let (partial, pshape) = contract(&state.coefficients, state.count, n, &ws);
                let gammas: Vec<Vec<Matrix<f64>>> = (0..shape[p + 1])
                    .map(|i| (0..shape[q + 1]).map(|j| nonlocal_gamma(config.seed, d, i, j)).collect())
                    .collect();
                let out_map = FusedIndexMap::new(shape.clone());
                let in_map = FusedIndexMap::new(pshape);
                for (flat, v) in values.iter_mut().enumerate() {
                    let mut index = out_map.defuse(flat).expect("in range");
                    let (i, j) = (index[p + 1], index[q + 1]);
                    let g = &gammas[i][j];
                    if i == 0 || j == 0 {
                        continue;
                    }
                    let mut extra = 0.0;
                    for mu in 0..n {
                        index[p + 1] = mu;
                        for nu in 0..n {
                            let c = g[(mu, nu)];
                            if c != 0.0 {
                                index[q + 1] = nu;
                                extra += c * partial[in_map.fuse(&index).expect("in range")];
                            }
                        }
                    }
                    *v += eps * extra;
                }
            }
        }
    }

    let provenance = Provenance::synthesized(devices.seed, devices.settings(), *config);
    Tensor::new(m, d, shape, values, provenance)
        .map_err(|e| ModelError::IncompatibleDevices(e.to_string()))
}

/// Adds independent `N(0, 1/shots)` noise to every entry.
pub fn add_shot_noise(s: &Tensor<f64>, shots: u64, seed: u64) -> Result<Tensor<f64>, ModelError> {
    if shots == 0 {
        return Err(ModelError::InvalidShots);
    }
    let sigma = 1.0 / (shots as f64).sqrt();
    let mut rng = keyed_rng(derive_seed(seed, "shot-noise", &[]), "stream", &[]);
    let noisy = s.map_values(|v| v + sigma * gaussian(&mut rng));
    let mut provenance = s.provenance().clone();
    provenance.shot_noise = Some(ShotNoise { shots, seed });
    Ok(noisy.with_provenance(provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::random_devices;

    #[test]
    fn contract_axis_matches_loops() {
        let values: Vec<f64> = (0..24).map(|v| v as f64).collect();
        let w = Matrix::from_rows(&[[1.0, 0.5], [2.0, -1.0], [0.0, 3.0]]);
        let (out, shape) = contract_axis(&values, &[2, 3, 4], 1, &w);
        assert_eq!(shape, vec![2, 2, 4]);
        for a in 0..2 {
            for k in 0..2 {
                for c in 0..4 {
                    let expected: f64 = (0..3).map(|mu| values[a * 12 + mu * 4 + c] * w[(mu, k)]).sum();
                    assert_eq!(out[a * 8 + k * 4 + c], expected);
                }
            }
        }
    }

    #[test]
    fn gamma_exempts_identity_setting() {
        assert_eq!(nonlocal_gamma(3, 2, 0, 2).max_abs(), 0.0);
        assert_eq!(nonlocal_gamma(3, 2, 1, 2)[(0, 0)], 0.0);
        assert!(nonlocal_gamma(3, 2, 1, 2).max_abs() > 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let dev = random_devices(2, 2, 2, &[2, 2], 1).unwrap();
        let cfg = CorrelationConfig {
            kind: CorrelationKind::Spam { qudit: 3 },
            epsilon: 0.1,
            seed: 0,
        };
        assert!(matches!(synthesize(&dev, &cfg), Err(ModelError::IncompatibleDevices(_))));
        let s = synthesize(&dev, &CorrelationConfig::none()).unwrap();
        assert!(matches!(add_shot_noise(&s, 0, 1), Err(ModelError::InvalidShots)));
    }
}
