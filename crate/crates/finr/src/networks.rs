//! ReLU MLPs with optional additive terms, their gradients, and the two
//! structural facts this whole project leans on: a bias-free ReLU network is
//! locally a linear operator f(x) = A_x x, and it is positively homogeneous,
//! f(a x) = a f(x) for a >= 0.
//!
//! Hidden layers are ReLU, the output layer is linear. The ReLU derivative
//! at exactly 0 is defined as 0, so activation masks are reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{FinrError, Result};
use crate::numerics::{dot, Mat, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// W, b ~ U(-gain/sqrt(fan_in), +gain/sqrt(fan_in)).
    FanInUniform,
    /// Two-layer kernel-regime init: first-layer weights N(0,1), first-layer
    /// biases zero (trainable), second layer frozen at +-1/sqrt(2m). The
    /// scaling makes the infinite-width tangent kernel of the net equal
    /// (1/4pi)(u+1)(pi - arccos u) on unit inputs.
    NtkGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub scheme: InitScheme,
    pub gain: f64,
    pub seed: u64,
}

impl InitSpec {
    pub fn fan_in(seed: u64) -> Self {
        InitSpec {
            scheme: InitScheme::FanInUniform,
            gain: 1.0,
            seed,
        }
    }

    pub fn ntk(seed: u64) -> Self {
        InitSpec {
            scheme: InitScheme::NtkGaussian,
            gain: 1.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    /// Input width, hidden widths, output width.
    pub layer_widths: Vec<usize>,
    pub use_bias: bool,
    /// Last weight block (and its bias) gets zero gradient.
    pub freeze_last: bool,
    pub init: InitSpec,
}

impl MlpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 2 {
            return Err(FinrError::invalid("need at least input and output widths"));
        }
        if self.layer_widths.iter().any(|&w| w == 0) {
            return Err(FinrError::invalid("layer widths must be >= 1"));
        }
        if self.init.scheme == InitScheme::NtkGaussian && self.layer_widths.len() != 3 {
            return Err(FinrError::invalid(
                "ntk_gaussian init is defined for exactly [in, m, out] networks",
            ));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    pub fn num_weight_layers(&self) -> usize {
        self.layer_widths.len() - 1
    }
}

/// One weight matrix (out x in) plus optional bias; also reused as the
/// gradient/moment carrier since those share the shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBlock {
    pub weight: Mat,
    pub bias: Option<Vec<f64>>,
}

impl ParamBlock {
    fn zeros_like(&self) -> ParamBlock {
        ParamBlock {
            weight: Mat::zeros(self.weight.rows(), self.weight.cols()),
            bias: self.bias.as_ref().map(|b| vec![0.0; b.len()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub spec: MlpSpec,
    pub blocks: Vec<ParamBlock>,
}

/// Gradients (or any direction in parameter space) with the same block
/// structure as the network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub blocks: Vec<ParamBlock>,
}

impl MlpGrads {
    pub fn zeros_like(params: &MlpParams) -> MlpGrads {
        MlpGrads {
            blocks: params.blocks.iter().map(ParamBlock::zeros_like).collect(),
        }
    }

    pub fn dot(&self, other: &MlpGrads) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            acc += dot(a.weight.data(), b.weight.data());
            if let (Some(x), Some(y)) = (&a.bias, &b.bias) {
                acc += dot(x, y);
            }
        }
        acc
    }

    pub fn scale(&mut self, a: f64) {
        for b in &mut self.blocks {
            b.weight.scale(a);
            if let Some(bias) = &mut b.bias {
                for v in bias {
                    *v *= a;
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| {
            b.weight.is_finite()
                && b.bias.as_ref().map_or(true, |v| v.iter().all(|x| x.is_finite()))
        })
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }
}

impl MlpParams {
    /// theta += alpha * direction.
    pub fn axpy(&mut self, alpha: f64, dir: &MlpGrads) -> Result<()> {
        if dir.blocks.len() != self.blocks.len() {
            return Err(FinrError::InvalidState("direction/param block mismatch".into()));
        }
        for (p, d) in self.blocks.iter_mut().zip(&dir.blocks) {
            p.weight.axpy(alpha, &d.weight)?;
            if let (Some(b), Some(db)) = (&mut p.bias, &d.bias) {
                for (x, y) in b.iter_mut().zip(db) {
                    *x += alpha * y;
                }
            }
        }
        Ok(())
    }

    pub fn num_params(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.weight.data().len() + b.bias.as_ref().map_or(0, Vec::len))
            .sum()
    }

    /// Flatten every parameter (frozen ones included) into one vector;
    /// ordering is block-major, weights row-major, bias after weights.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for b in &self.blocks {
            out.extend_from_slice(b.weight.data());
            if let Some(bias) = &b.bias {
                out.extend_from_slice(bias);
            }
        }
        out
    }

    pub fn set_from_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(FinrError::dim(
                format!("{} params", self.num_params()),
                format!("{}", flat.len()),
            ));
        }
        let mut at = 0;
        for b in &mut self.blocks {
            let wlen = b.weight.data().len();
            b.weight.data_mut().copy_from_slice(&flat[at..at + wlen]);
            at += wlen;
            if let Some(bias) = &mut b.bias {
                let blen = bias.len();
                bias.copy_from_slice(&flat[at..at + blen]);
                at += blen;
            }
        }
        Ok(())
    }

    pub fn grads_flatten(grads: &MlpGrads) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &grads.blocks {
            out.extend_from_slice(b.weight.data());
            if let Some(bias) = &b.bias {
                out.extend_from_slice(bias);
            }
        }
        out
    }
}

/// Draw parameters for a spec. Deterministic in `spec.init.seed`; the sample
/// order is fixed (per block: weights row-major, then bias).
pub fn init_params(spec: &MlpSpec) -> Result<MlpParams> {
    spec.validate()?;
    let mut rng = Rng::from_seed(spec.init.seed);
    let mut blocks = Vec::with_capacity(spec.num_weight_layers());
    for l in 0..spec.num_weight_layers() {
        let (fan_in, fan_out) = (spec.layer_widths[l], spec.layer_widths[l + 1]);
        let mut wdata = Vec::with_capacity(fan_in * fan_out);
        let mut bias = if spec.use_bias { Some(vec![0.0; fan_out]) } else { None };
        match spec.init.scheme {
            InitScheme::FanInUniform => {
                let bound = spec.init.gain / (fan_in as f64).sqrt();
                for _ in 0..fan_in * fan_out {
                    wdata.push(rng.uniform_in(-bound, bound));
                }
                if let Some(b) = &mut bias {
                    for v in b.iter_mut() {
                        *v = rng.uniform_in(-bound, bound);
                    }
                }
            }
            InitScheme::NtkGaussian => {
                if l == 0 {
                    for _ in 0..fan_in * fan_out {
                        wdata.push(rng.standard_normal());
                    }
                    // first-layer biases start at zero (trainable)
                } else {
                    let m = fan_in as f64;
                    let scale = 1.0 / (2.0 * m).sqrt();
                    for _ in 0..fan_in * fan_out {
                        wdata.push(rng.sign() * scale);
                    }
                    // frozen output layer carries no additive term
                }
            }
        }
        blocks.push(ParamBlock {
            weight: Mat::from_vec(fan_out, fan_in, wdata)?,
            bias,
        });
    }
    Ok(MlpParams {
        spec: spec.clone(),
        blocks,
    })
}

/// Cached activations and ReLU masks from one forward pass over a batch.
/// `acts[0]` is the input batch, `acts[l]` the post-activation output of
/// layer l, `masks[l]` the 0/1 pattern of hidden layer l.
#[derive(Debug, Clone)]
pub struct Tape {
    pub acts: Vec<Mat>,
    pub masks: Vec<Mat>,
}

impl Tape {
    fn check_against(&self, params: &MlpParams) -> Result<()> {
        let l = params.spec.num_weight_layers();
        if self.acts.len() != l + 1 || self.masks.len() != l.saturating_sub(1) {
            return Err(FinrError::InvalidState(
                "tape does not match network depth".into(),
            ));
        }
        for (i, act) in self.acts.iter().enumerate() {
            if act.cols() != params.spec.layer_widths[i] {
                return Err(FinrError::InvalidState(format!(
                    "tape activation {i} has width {}, spec says {}",
                    act.cols(),
                    params.spec.layer_widths[i]
                )));
            }
        }
        Ok(())
    }
}

/// Batch forward pass: rows of `x` are inputs. Returns outputs and the tape.
pub fn forward_batch(params: &MlpParams, x: &Mat) -> Result<(Mat, Tape)> {
    if x.cols() != params.spec.input_dim() {
        return Err(FinrError::dim(
            format!("input width {}", params.spec.input_dim()),
            format!("{}", x.cols()),
        ));
    }
    let layers = params.spec.num_weight_layers();
    let mut acts = Vec::with_capacity(layers + 1);
    let mut masks = Vec::with_capacity(layers.saturating_sub(1));
    acts.push(x.clone());
    let mut cur = x.clone();
    for (l, block) in params.blocks.iter().enumerate() {
        let mut z = cur.matmul_transb(&block.weight)?;
        if let Some(bias) = &block.bias {
            for r in 0..z.rows() {
                let row = z.row_mut(r);
                for (v, b) in row.iter_mut().zip(bias) {
                    *v += b;
                }
            }
        }
        if l + 1 < layers {
            let mut mask = Mat::zeros(z.rows(), z.cols());
            for (zv, mv) in z.data_mut().iter_mut().zip(mask.data_mut().iter_mut()) {
                if *zv > 0.0 {
                    *mv = 1.0;
                } else {
                    *zv = 0.0;
                }
            }
            masks.push(mask);
        }
        acts.push(z.clone());
        cur = z;
    }
    Ok((cur, Tape { acts, masks }))
}

/// Single-input forward pass.
pub fn forward(params: &MlpParams, x: &[f64]) -> Result<(Vec<f64>, Tape)> {
    let xm = Mat::from_vec(1, x.len(), x.to_vec())?;
    let (y, tape) = forward_batch(params, &xm)?;
    Ok((y.row(0).to_vec(), tape))
}

/// Batch backward pass for the scalar objective sum_p <upstream_p, f(x_p)>.
/// Returns parameter gradients (summed over the batch) and the gradient with
/// respect to the inputs. Frozen-last networks get an exactly zero gradient
/// block for the last layer.
pub fn backward_batch(params: &MlpParams, tape: &Tape, upstream: &Mat) -> Result<(MlpGrads, Mat)> {
    tape.check_against(params)?;
    let layers = params.spec.num_weight_layers();
    if upstream.cols() != params.spec.output_dim() || upstream.rows() != tape.acts[0].rows() {
        return Err(FinrError::dim(
            format!(
                "upstream {}x{}",
                tape.acts[0].rows(),
                params.spec.output_dim()
            ),
            format!("{}x{}", upstream.rows(), upstream.cols()),
        ));
    }
    let mut grads = MlpGrads::zeros_like(params);
    let mut delta = upstream.clone();
    for l in (0..layers).rev() {
        let frozen = params.spec.freeze_last && l == layers - 1;
        if !frozen {
            grads.blocks[l].weight = delta.matmul_transa(&tape.acts[l])?;
            if let Some(db) = &mut grads.blocks[l].bias {
                for r in 0..delta.rows() {
                    for (acc, v) in db.iter_mut().zip(delta.row(r)) {
                        *acc += v;
                    }
                }
            }
        }
        let mut next = delta.matmul(&params.blocks[l].weight)?;
        if l > 0 {
            for (v, m) in next.data_mut().iter_mut().zip(tape.masks[l - 1].data()) {
                *v *= m;
            }
        }
        delta = next;
    }
    Ok((grads, delta))
}

/// Single-input backward pass.
pub fn backward(
    params: &MlpParams,
    tape: &Tape,
    upstream: &[f64],
) -> Result<(MlpGrads, Vec<f64>)> {
    let up = Mat::from_vec(1, upstream.len(), upstream.to_vec())?;
    let (grads, dx) = backward_batch(params, tape, &up)?;
    Ok((grads, dx.row(0).to_vec()))
}

/// The local linear operator A_x with f(x) = A_x x for bias-free networks:
/// A_x = W_L D_{L-1} W_{L-1} ... D_1 W_1 with D_l = diag(mask_l at x).
pub fn local_linear_operator(params: &MlpParams, x: &[f64]) -> Result<Mat> {
    if params.spec.use_bias {
        return Err(FinrError::invalid(
            "local linear operator is defined for bias-free networks",
        ));
    }
    let (_, tape) = forward(params, x)?;
    let mut a: Option<Mat> = None;
    for (l, block) in params.blocks.iter().enumerate() {
        let mut w = block.weight.clone();
        if let Some(prev) = a {
            w = w.matmul(&prev)?;
        }
        if l < params.spec.num_weight_layers() - 1 {
            // scale row k of the running product by the mask of unit k
            let mask = tape.masks[l].row(0);
            for (k, &m) in mask.iter().enumerate() {
                if m == 0.0 {
                    for v in w.row_mut(k) {
                        *v = 0.0;
                    }
                }
            }
        }
        a = Some(w);
    }
    Ok(a.unwrap())
}

/// Relative error of the positive-homogeneity identity f(a x) = a f(x);
/// bias-free networks satisfy this to machine precision, and the value is
/// returned rather than asserted so negative controls can inspect it.
pub fn scale_invariance_check(params: &MlpParams, x: &[f64], alpha: f64) -> Result<f64> {
    if params.spec.use_bias {
        return Err(FinrError::invalid(
            "scale invariance holds for bias-free networks; use a bias-free spec",
        ));
    }
    if alpha < 0.0 {
        return Err(FinrError::invalid("alpha must be nonnegative"));
    }
    let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
    let (f_scaled, _) = forward(params, &scaled)?;
    let (f_x, _) = forward(params, x)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in f_scaled.iter().zip(&f_x) {
        num += (a - alpha * b) * (a - alpha * b);
        den += (alpha * b) * (alpha * b);
    }
    Ok(num.sqrt() / (den.sqrt() + 1e-30))
}

/// Raw homogeneity error for any network (no bias-free precondition); used
/// as the negative control for bias networks.
pub fn homogeneity_error(params: &MlpParams, x: &[f64], alpha: f64) -> Result<f64> {
    let scaled: Vec<f64> = x.iter().map(|v| alpha * v).collect();
    let (f_scaled, _) = forward(params, &scaled)?;
    let (f_x, _) = forward(params, x)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in f_scaled.iter().zip(&f_x) {
        num += (a - alpha * b) * (a - alpha * b);
        den += (alpha * b) * (alpha * b);
    }
    Ok(num.sqrt() / (den.sqrt() + 1e-30))
}
