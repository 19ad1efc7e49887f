//! Fourier feature embeddings: gamma(v) = [sin(2*pi*b_i.v), cos(2*pi*b_i.v)].
//!
//! Two frequency samplers are provided. Positional encoding lays
//! log-linearly spaced frequencies on each input axis (N/d per axis, top
//! frequency exactly `scale`); random Fourier features draw N rows from an
//! isotropic (or per-axis) Gaussian. Frequencies are stored in cycles; the
//! 2*pi lives inside [`embed`], so an integer row b pairs with integer bins
//! of the spectrum reports.
//!
//! Channel layout is interleaved: [sin_1, cos_1, sin_2, cos_2, ...], which
//! makes every consecutive pair a point on the unit circle and gives
//! ||gamma(v)||^2 = N identically.

use serde::{Deserialize, Serialize};

use crate::error::{FinrError, Result};
use crate::numerics::{dot, Mat, Rng};

/// Standard deviation of the RFF sampler: one value for all axes or one per
/// axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sigma {
    Scalar(f64),
    PerAxis(Vec<f64>),
}

impl Sigma {
    fn for_axis(&self, axis: usize) -> f64 {
        match self {
            Sigma::Scalar(s) => *s,
            Sigma::PerAxis(v) => v[axis],
        }
    }

    fn validate(&self, input_dim: usize) -> Result<()> {
        match self {
            Sigma::Scalar(s) if *s > 0.0 && s.is_finite() => Ok(()),
            Sigma::PerAxis(v) if v.len() == input_dim && v.iter().all(|s| *s > 0.0 && s.is_finite()) => {
                Ok(())
            }
            _ => Err(FinrError::invalid("sigma must be positive (one value or one per axis)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbeddingSpec {
    /// b_i = scale^(i/(N/d)) on one axis at a time; on-axis frequencies only.
    PositionalEncoding {
        input_dim: usize,
        num_freqs: usize,
        scale: f64,
    },
    /// b_i ~ N(0, diag(sigma^2)), seeded.
    RandomFourier {
        input_dim: usize,
        num_freqs: usize,
        sigma: Sigma,
        seed: u64,
    },
}

impl EmbeddingSpec {
    pub fn input_dim(&self) -> usize {
        match self {
            EmbeddingSpec::PositionalEncoding { input_dim, .. }
            | EmbeddingSpec::RandomFourier { input_dim, .. } => *input_dim,
        }
    }

    pub fn num_freqs(&self) -> usize {
        match self {
            EmbeddingSpec::PositionalEncoding { num_freqs, .. }
            | EmbeddingSpec::RandomFourier { num_freqs, .. } => *num_freqs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (d, n) = (self.input_dim(), self.num_freqs());
        if d < 1 || n < 1 {
            return Err(FinrError::invalid("need input_dim >= 1 and num_freqs >= 1"));
        }
        match self {
            EmbeddingSpec::PositionalEncoding { scale, .. } => {
                if !(*scale > 1.0 && scale.is_finite()) {
                    return Err(FinrError::invalid("positional encoding needs scale > 1"));
                }
                if n % d != 0 {
                    return Err(FinrError::invalid(format!(
                        "positional encoding splits num_freqs across axes; {n} is not divisible by {d}"
                    )));
                }
                Ok(())
            }
            EmbeddingSpec::RandomFourier { sigma, .. } => sigma.validate(d),
        }
    }
}

/// Realized frequency rows b_i (N x d), in cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMatrix {
    kind: String,
    seed: Option<u64>,
    b: Mat,
}

impl FrequencyMatrix {
    /// Wrap explicit rows; used by tests and theory experiments that pin
    /// frequencies by hand.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Ok(FrequencyMatrix {
            kind: "explicit".to_string(),
            seed: None,
            b: Mat::from_rows(rows)?,
        })
    }

    pub fn num_freqs(&self) -> usize {
        self.b.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.b.row(i)
    }

    pub fn matrix(&self) -> &Mat {
        &self.b
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    /// All rows integer-valued (needed by the loss-floor theory setting)?
    pub fn is_integer(&self) -> bool {
        self.b.data().iter().all(|v| (v - v.round()).abs() < 1e-12)
    }

    /// JSON form `{kind, d, N, rows, seed?}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "d": self.input_dim(),
            "N": self.num_freqs(),
            "rows": (0..self.num_freqs()).map(|i| self.row(i).to_vec()).collect::<Vec<_>>(),
            "seed": self.seed,
        })
    }
}

/// Realize the frequency rows of a spec. PE is deterministic; RFF is a pure
/// function of (spec, seed).
pub fn sample_frequencies(spec: &EmbeddingSpec) -> Result<FrequencyMatrix> {
    spec.validate()?;
    let d = spec.input_dim();
    let n = spec.num_freqs();
    match spec {
        EmbeddingSpec::PositionalEncoding { scale, .. } => {
            let per_axis = n / d;
            let mut rows = Vec::with_capacity(n);
            for axis in 0..d {
                for i in 1..=per_axis {
                    let mut row = vec![0.0; d];
                    row[axis] = scale.powf(i as f64 / per_axis as f64);
                    rows.push(row);
                }
            }
            Ok(FrequencyMatrix {
                kind: "positional_encoding".to_string(),
                seed: None,
                b: Mat::from_rows(&rows)?,
            })
        }
        EmbeddingSpec::RandomFourier { sigma, seed, .. } => {
            let mut rng = Rng::from_seed(*seed);
            let mut data = Vec::with_capacity(n * d);
            for _ in 0..n {
                for axis in 0..d {
                    data.push(rng.normal(0.0, sigma.for_axis(axis)));
                }
            }
            Ok(FrequencyMatrix {
                kind: "random_fourier".to_string(),
                seed: Some(*seed),
                b: Mat::from_vec(n, d, data)?,
            })
        }
    }
}

/// gamma(v): interleaved [sin(2 pi b_i.v), cos(2 pi b_i.v)], length 2N.
pub fn embed(freqs: &FrequencyMatrix, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != freqs.input_dim() {
        return Err(FinrError::dim(
            format!("input of dim {}", freqs.input_dim()),
            format!("{}", v.len()),
        ));
    }
    let mut out = Vec::with_capacity(2 * freqs.num_freqs());
    for i in 0..freqs.num_freqs() {
        let arg = 2.0 * std::f64::consts::PI * dot(freqs.row(i), v);
        out.push(arg.sin());
        out.push(arg.cos());
    }
    Ok(out)
}

/// Batch embedding: one row of gamma per row of `points` (P x d -> P x 2N).
pub fn embed_batch(freqs: &FrequencyMatrix, points: &Mat) -> Result<Mat> {
    if points.cols() != freqs.input_dim() {
        return Err(FinrError::dim(
            format!("points of dim {}", freqs.input_dim()),
            format!("{}", points.cols()),
        ));
    }
    let n = freqs.num_freqs();
    let mut out = Mat::zeros(points.rows(), 2 * n);
    for p in 0..points.rows() {
        let v = points.row(p);
        let row = out.row_mut(p);
        for i in 0..n {
            let arg = 2.0 * std::f64::consts::PI * dot(freqs.row(i), v);
            row[2 * i] = arg.sin();
            row[2 * i + 1] = arg.cos();
        }
    }
    Ok(out)
}

/// Both sides of the kernel identity
/// gamma(x).gamma(z) = sum_i cos(2 pi b_i.(x-z)).
///
/// Returned as (lhs, rhs) so callers can assert the gap at their own
/// tolerance.
pub fn gamma_dot(freqs: &FrequencyMatrix, x: &[f64], z: &[f64]) -> Result<(f64, f64)> {
    let gx = embed(freqs, x)?;
    let gz = embed(freqs, z)?;
    let lhs = dot(&gx, &gz);
    let mut rhs = 0.0;
    for i in 0..freqs.num_freqs() {
        let mut b_delta = 0.0;
        for (k, b) in freqs.row(i).iter().enumerate() {
            b_delta += b * (x[k] - z[k]);
        }
        rhs += (2.0 * std::f64::consts::PI * b_delta).cos();
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm2;

    #[test]
    fn pe_1d_rows_follow_the_log_linear_rule() {
        let spec = EmbeddingSpec::PositionalEncoding {
            input_dim: 1,
            num_freqs: 2,
            scale: 4.0,
        };
        let fm = sample_frequencies(&spec).unwrap();
        assert_eq!(fm.num_freqs(), 2);
        assert!((fm.row(0)[0] - 2.0).abs() < 1e-12); // 4^(1/2)
        assert!((fm.row(1)[0] - 4.0).abs() < 1e-12); // 4^(2/2)
    }

    #[test]
    fn pe_2d_rows_are_on_axis_blocks() {
        let spec = EmbeddingSpec::PositionalEncoding {
            input_dim: 2,
            num_freqs: 4,
            scale: 16.0,
        };
        let fm = sample_frequencies(&spec).unwrap();
        let expect = [[4.0, 0.0], [16.0, 0.0], [0.0, 4.0], [0.0, 16.0]];
        for (i, row) in expect.iter().enumerate() {
            assert!((fm.row(i)[0] - row[0]).abs() < 1e-12, "row {i}");
            assert!((fm.row(i)[1] - row[1]).abs() < 1e-12, "row {i}");
        }
    }

    #[test]
    fn pe_rejects_indivisible_num_freqs() {
        let spec = EmbeddingSpec::PositionalEncoding {
            input_dim: 2,
            num_freqs: 5,
            scale: 8.0,
        };
        assert!(sample_frequencies(&spec).is_err());
    }

    #[test]
    fn rff_sample_statistics_match_the_law_of_large_numbers() {
        let spec = EmbeddingSpec::RandomFourier {
            input_dim: 2,
            num_freqs: 1000,
            sigma: Sigma::Scalar(10.0),
            seed: 99,
        };
        let fm = sample_frequencies(&spec).unwrap();
        let entries = fm.matrix().data();
        let count = entries.len() as f64;
        let mean = entries.iter().sum::<f64>() / count;
        let std = (entries.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count).sqrt();
        assert!(mean.abs() < 3.0 * 10.0 / count.sqrt(), "mean {mean}");
        assert!((std - 10.0).abs() / 10.0 < 0.05, "std {std}");
    }

    #[test]
    fn rff_is_deterministic_in_the_seed() {
        let spec = EmbeddingSpec::RandomFourier {
            input_dim: 3,
            num_freqs: 8,
            sigma: Sigma::PerAxis(vec![1.0, 2.0, 3.0]),
            seed: 5,
        };
        let a = sample_frequencies(&spec).unwrap();
        let b = sample_frequencies(&spec).unwrap();
        assert_eq!(a.matrix().data(), b.matrix().data());
    }

    #[test]
    fn embed_at_zero_alternates_zero_one() {
        let fm = FrequencyMatrix::from_rows(&[vec![1.5], vec![3.0], vec![7.25]]).unwrap();
        let g = embed(&fm, &[0.0]).unwrap();
        assert_eq!(g.len(), 6);
        for pair in g.chunks(2) {
            assert_eq!(pair[0], 0.0);
            assert_eq!(pair[1], 1.0);
        }
    }

    #[test]
    fn embed_quarter_period() {
        let fm = FrequencyMatrix::from_rows(&[vec![1.0]]).unwrap();
        let g = embed(&fm, &[0.25]).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12); // sin(pi/2)
        assert!(g[1].abs() < 1e-12); // cos(pi/2)
    }

    #[test]
    fn pairs_stay_on_the_unit_circle_and_norm_is_n() {
        let spec = EmbeddingSpec::RandomFourier {
            input_dim: 2,
            num_freqs: 16,
            sigma: Sigma::Scalar(4.0),
            seed: 3,
        };
        let fm = sample_frequencies(&spec).unwrap();
        let mut rng = Rng::from_seed(77);
        for _ in 0..20 {
            let v = [rng.uniform(), rng.uniform()];
            let g = embed(&fm, &v).unwrap();
            for pair in g.chunks(2) {
                let r = pair[0] * pair[0] + pair[1] * pair[1];
                assert!((r - 1.0).abs() < 1e-12);
            }
            let norm_sq = norm2(&g).powi(2);
            assert!((norm_sq - 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_dot_trivial_cases() {
        let fm = FrequencyMatrix::from_rows(&[vec![1.0]]).unwrap();
        let (lhs, rhs) = gamma_dot(&fm, &[0.5], &[0.0]).unwrap();
        assert!((lhs - (-1.0)).abs() < 1e-12);
        assert!((rhs - (-1.0)).abs() < 1e-12);

        let spec = EmbeddingSpec::RandomFourier {
            input_dim: 2,
            num_freqs: 16,
            sigma: Sigma::Scalar(2.0),
            seed: 1,
        };
        let fm = sample_frequencies(&spec).unwrap();
        let x = [0.3, -0.2];
        let (lhs, rhs) = gamma_dot(&fm, &x, &x).unwrap();
        assert!((lhs - 16.0).abs() < 1e-10);
        assert!((rhs - 16.0).abs() < 1e-10);
    }

    #[test]
    fn gamma_dot_identity_over_random_pairs() {
        for (label, spec) in [
            (
                "pe",
                EmbeddingSpec::PositionalEncoding {
                    input_dim: 2,
                    num_freqs: 16,
                    scale: 10.0,
                },
            ),
            (
                "rff",
                EmbeddingSpec::RandomFourier {
                    input_dim: 2,
                    num_freqs: 16,
                    sigma: Sigma::Scalar(5.0),
                    seed: 8,
                },
            ),
        ] {
            let fm = sample_frequencies(&spec).unwrap();
            let mut rng = Rng::from_seed(202);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let x = [rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)];
                let z = [rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)];
                let (lhs, rhs) = gamma_dot(&fm, &x, &z).unwrap();
                worst = worst.max((lhs - rhs).abs());
            }
            assert!(worst <= 1e-10 * 16.0, "{label}: worst deviation {worst}");
        }
    }

    #[test]
    fn embed_batch_matches_single_embed() {
        let spec = EmbeddingSpec::RandomFourier {
            input_dim: 2,
            num_freqs: 5,
            sigma: Sigma::Scalar(3.0),
            seed: 4,
        };
        let fm = sample_frequencies(&spec).unwrap();
        let pts = Mat::from_rows(&[vec![0.1, 0.9], vec![0.4, 0.2], vec![0.0, 0.0]]).unwrap();
        let batch = embed_batch(&fm, &pts).unwrap();
        for p in 0..pts.rows() {
            let single = embed(&fm, pts.row(p)).unwrap();
            assert_eq!(batch.row(p), &single[..]);
        }
    }

    #[test]
    fn frequency_matrix_json_shape() {
        let spec = EmbeddingSpec::RandomFourier {
            input_dim: 1,
            num_freqs: 2,
            sigma: Sigma::Scalar(1.0),
            seed: 42,
        };
        let fm = sample_frequencies(&spec).unwrap();
        let v = fm.to_json();
        assert_eq!(v["kind"], "random_fourier");
        assert_eq!(v["d"], 1);
        assert_eq!(v["N"], 2);
        assert_eq!(v["seed"], 42);
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    }
}
