//! Seeded random state and measurement devices.

use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{condition_number, singular_values, CMatrix, Matrix};
use crate::model::basis::{make_basis, OperatorBasis};
use crate::model::rng::keyed_rng;
use crate::model::ModelError;

/// Resample budget for badly conditioned draws.
pub const RESAMPLE_BUDGET: usize = 100;
/// Condition ceiling for device blocks accepted by [`random_devices`].
pub const DEVICE_KAPPA_MAX: f64 = 1e6;

/// A state preparation device: `ρ_a = R_a^{μν…} σ_μ⊗σ_ν⊗…`.
///
/// `coefficients` is `count × (d²)^m`, row-major with qudit 1 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct StateDevice {
    pub m: usize,
    pub d: usize,
    pub count: usize,
    pub coefficients: Vec<f64>,
}

impl StateDevice {
    pub fn width(&self) -> usize {
        (self.d * self.d).pow(self.m as u32)
    }

    pub fn row(&self, a: usize) -> &[f64] {
        let w = self.width();
        &self.coefficients[a * w..(a + 1) * w]
    }

    pub fn as_matrix(&self) -> Matrix<f64> {
        Matrix::from_vec(self.count, self.width(), self.coefficients.clone())
            .expect("state coefficients are finite")
    }

    pub fn density(&self, a: usize, basis: &OperatorBasis) -> CMatrix<f64> {
        basis.operator(self.row(a), self.m)
    }
}

/// One qudit's measurement device: `Σ^i = σ^μ W_μ^i`.
///
/// Setting 0 is always the identity observable.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementDevice {
    /// 1-based qudit label.
    pub qudit: usize,
    pub weights: Matrix<f64>,
}

impl MeasurementDevice {
    pub fn count(&self) -> usize {
        self.weights.ncols()
    }

    pub fn observable(&self, i: usize, basis: &OperatorBasis) -> CMatrix<f64> {
        basis.dual_operator(&self.weights.column(i), 1)
    }
}

/// A complete simulated apparatus.
#[derive(Clone, Debug)]
pub struct Devices {
    pub basis: OperatorBasis,
    pub state: StateDevice,
    pub measurements: Vec<MeasurementDevice>,
    pub seed: u64,
    /// Attempt index that produced these devices (0 when the first draw passed).
    pub attempt: usize,
}

impl Devices {
    pub fn m(&self) -> usize {
        self.state.m
    }

    pub fn d(&self) -> usize {
        self.state.d
    }

    /// `[N, M₁, …, M_m]`.
    pub fn settings(&self) -> Vec<usize> {
        std::iter::once(self.state.count)
            .chain(self.measurements.iter().map(MeasurementDevice::count))
            .collect()
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let (m, d) = (self.m(), self.d());
        if self.measurements.len() != m || self.basis.d() != d {
            return Err(ModelError::IncompatibleDevices(format!(
                "state device describes {m} qudits of dimension {d}, got {} measurement devices",
                self.measurements.len()
            )));
        }
        for (q, dev) in self.measurements.iter().enumerate() {
            if dev.weights.nrows() != d * d || dev.qudit != q + 1 {
                return Err(ModelError::IncompatibleDevices(format!(
                    "measurement device {} has shape {:?}",
                    dev.qudit,
                    dev.weights.shape()
                )));
            }
        }
        if self.state.coefficients.len() != self.state.count * self.state.width() {
            return Err(ModelError::IncompatibleDevices(
                "state coefficient count".into(),
            ));
        }
        Ok(())
    }
}

fn gaussian(rng: &mut impl rand::Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn draw_state(m: usize, d: usize, count: usize, seed: u64, attempt: usize) -> StateDevice {
    let width = (d * d).pow(m as u32);
    let anchor = (d as f64).powf(-(m as f64) / 2.0);
    let mut coefficients = Vec::with_capacity(count * width);
    for a in 0..count {
        let mut rng = keyed_rng(seed, "state", &[attempt as u64, a as u64]);
        coefficients.push(anchor);
        for _ in 1..width {
            coefficients.push(anchor * gaussian(&mut rng));
        }
    }
    StateDevice {
        m,
        d,
        count,
        coefficients,
    }
}

fn draw_measurement(qudit: usize, d: usize, count: usize, seed: u64, attempt: usize) -> MeasurementDevice {
    let n = d * d;
    let mut weights = Matrix::zeros(n, count);
    weights[(0, 0)] = (d as f64).sqrt();
    for i in 1..count {
        let mut rng = keyed_rng(seed, "measurement", &[attempt as u64, qudit as u64, i as u64]);
        for mu in 0..n {
            weights[(mu, i)] = gaussian(&mut rng);
        }
    }
    MeasurementDevice { qudit, weights }
}

fn blocks(total: usize, size: usize) -> impl Iterator<Item = usize> {
    (0..2).map(move |b| b * size).filter(move |&start| start + size <= total)
}

fn ok(block: &Matrix<f64>) -> bool {
    condition_number(block).is_ok_and(|k| k.is_finite() && k < DEVICE_KAPPA_MAX)
}

fn well_conditioned(state: &StateDevice, measurements: &[MeasurementDevice]) -> bool {
    let n = state.d * state.d;
    for dev in measurements {
        for start in blocks(dev.count(), n) {
            if !ok(&dev.weights.block(0, start, n, n)) {
                return false;
            }
        }
    }
    let width = state.width();
    let r = state.as_matrix();
    if state.count < width {
        let sv = singular_values(&r).expect("nonempty");
        let last = *sv.last().expect("nonempty");
        return last > 0.0 && sv[0] / last < DEVICE_KAPPA_MAX;
    }
    let state_blocks: Vec<_> = blocks(state.count, width).collect();
    if !state_blocks.iter().all(|&start| ok(&r.block(start, 0, width, width))) {
        return false;
    }
    generic_corners_conditioned(&r, &state_blocks, measurements)
}

/// Every corner `[d^{2m}:d^2,…,d^2]` the devices can fill, over all choices of
/// setting block per device.
fn generic_corners_conditioned(r: &Matrix<f64>, state_blocks: &[usize], measurements: &[MeasurementDevice]) -> bool {
    let width = r.ncols();
    let mut factors: Vec<Matrix<f64>> = vec![Matrix::identity(1)];
    for dev in measurements {
        let n = dev.weights.nrows();
        let starts: Vec<_> = blocks(dev.count(), n).collect();
        if starts.is_empty() {
            return true;
        }
        factors = factors
            .iter()
            .flat_map(|k| starts.iter().map(move |&s| k.kron(&dev.weights.block(0, s, n, n))))
            .collect();
    }
    state_blocks.iter().all(|&start| {
        let rows = r.block(start, 0, width, width);
        factors
            .iter()
            .all(|k| ok(&rows.matmul(k).expect("widths agree")))
    })
}

/// Draws a state device with `n` settings and one measurement device per
/// qudit with `m_list[q]` settings.
///
/// States are the maximally mixed state plus a Gaussian traceless
/// perturbation; observables are Gaussian combinations of the dual basis, with
/// setting 0 reserved for the identity. Draws are resampled while any
/// full-size device block, or any generic corner built from them, has
/// condition number above [`DEVICE_KAPPA_MAX`].
pub fn random_devices(
    m: usize,
    d: usize,
    n: usize,
    m_list: &[usize],
    seed: u64,
) -> Result<Devices, ModelError> {
    if m == 0 {
        return Err(ModelError::BadSettings("at least one qudit required".into()));
    }
    let basis = make_basis(d)?;
    if n == 0 || m_list.len() != m || m_list.contains(&0) {
        return Err(ModelError::BadSettings(format!(
            "need N ≥ 1 and {m} measurement counts ≥ 1, got N={n}, M={m_list:?}"
        )));
    }
    for attempt in 0..RESAMPLE_BUDGET {
        let state = draw_state(m, d, n, seed, attempt);
        let measurements: Vec<_> = m_list
            .iter()
            .enumerate()
            .map(|(q, &count)| draw_measurement(q + 1, d, count, seed, attempt))
            .collect();
        if well_conditioned(&state, &measurements) {
            return Ok(Devices {
                basis,
                state,
                measurements,
                seed,
                attempt,
            });
        }
    }
    Err(ModelError::ConditioningFailure {
        attempts: RESAMPLE_BUDGET,
    })
}
