//! Feed-forward Q-network: two ReLU hidden layers, linear output, Adam, and a
//! checksummed binary model format.
//!
//! All math is f64. Batch passes split rows into a fixed number of chunks
//! and reduce chunk partials in index order, so results are bit-identical
//! whatever the thread count.

use rand::Rng;
use rayon::prelude::*;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

/// Fixed chunk count for batch parallelism. Determinism depends on this
/// being independent of the machine.
const PAR_CHUNKS: usize = 8;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

const MAGIC: &[u8; 8] = b"QUBEMLP1";

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("layer dims must be positive, got {0:?}")]
    BadDims([usize; 4]),
    #[error("input length {got} does not match input dim {want}")]
    InputDim { want: usize, got: usize },
    #[error("non-finite loss at adam step {step}")]
    NonFiniteLoss { step: u64 },
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic, not a model file")]
    BadMagic,
    #[error("model is for phase {found}, expected phase {expected}")]
    PhaseMismatch { expected: u8, found: u8 },
    #[error("file truncated at byte {offset}")]
    Truncated { offset: usize },
    #[error("{0} trailing bytes after checksum")]
    TrailingBytes(usize),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("implausible header: {0}")]
    BadHeader(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub in_dim: usize,
    pub out_dim: usize,
    /// Row-major, `out_dim` rows of `in_dim` weights.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

/// Q-network with dims (input, hidden1, hidden2, actions) and activations
/// ReLU, ReLU, linear.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub phase: u8,
    pub dims: [usize; 4],
    pub layers: Vec<Layer>,
}

impl MlpModel {
    /// Weights uniform in ±1/√fan_in, biases zero; deterministic under the
    /// caller's seeded rng.
    pub fn init<R: Rng>(phase: u8, dims: [usize; 4], rng: &mut R) -> Result<Self, NeuralError> {
        if dims.contains(&0) {
            return Err(NeuralError::BadDims(dims));
        }
        let mut layers = Vec::with_capacity(3);
        for k in 0..3 {
            let (i, o) = (dims[k], dims[k + 1]);
            let limit = 1.0 / (i as f64).sqrt();
            let w = (0..i * o).map(|_| rng.random_range(-limit..limit)).collect();
            layers.push(Layer {
                in_dim: i,
                out_dim: o,
                w,
                b: vec![0.0; o],
            });
        }
        Ok(MlpModel {
            phase,
            dims,
            layers,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.w.len() + l.b.len())
            .sum()
    }

    /// Single-observation forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        if x.len() != self.dims[0] {
            return Err(NeuralError::InputDim {
                want: self.dims[0],
                got: x.len(),
            });
        }
        let mut cur = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            let relu = k < 2;
            let mut next = vec![0.0; layer.out_dim];
            for (o, slot) in next.iter_mut().enumerate() {
                let row = &layer.w[o * layer.in_dim..(o + 1) * layer.in_dim];
                let mut acc = layer.b[o];
                for (wv, xv) in row.iter().zip(&cur) {
                    acc += wv * xv;
                }
                *slot = if relu && acc < 0.0 { 0.0 } else { acc };
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Batch forward writing all activations into `ws`; rows of `x` are
    /// observations.
    pub fn forward_batch(&self, x: &[f64], n: usize, ws: &mut BatchCache) {
        debug_assert_eq!(x.len(), n * self.dims[0]);
        linear_batch(x, n, &self.layers[0], true, &mut ws.a1);
        let a1 = std::mem::take(&mut ws.a1);
        linear_batch(&a1, n, &self.layers[1], true, &mut ws.a2);
        ws.a1 = a1;
        let a2 = std::mem::take(&mut ws.a2);
        linear_batch(&a2, n, &self.layers[2], false, &mut ws.q);
        ws.a2 = a2;
        ws.n = n;
    }
}

/// Activation buffers reused across batch passes.
#[derive(Debug, Default, Clone)]
pub struct BatchCache {
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub q: Vec<f64>,
    pub n: usize,
}

fn linear_batch(x: &[f64], n: usize, layer: &Layer, relu: bool, out: &mut Vec<f64>) {
    let (i_d, o_d) = (layer.in_dim, layer.out_dim);
    out.clear();
    out.resize(n * o_d, 0.0);
    if n == 0 {
        return;
    }
    let rows_per_chunk = n.div_ceil(PAR_CHUNKS).max(1);
    x.par_chunks(rows_per_chunk * i_d)
        .zip(out.par_chunks_mut(rows_per_chunk * o_d))
        .for_each(|(xc, oc)| {
            let rows = xc.len() / i_d;
            for r in 0..rows {
                let xr = &xc[r * i_d..(r + 1) * i_d];
                let orow = &mut oc[r * o_d..(r + 1) * o_d];
                for (o, slot) in orow.iter_mut().enumerate() {
                    let wrow = &layer.w[o * i_d..(o + 1) * i_d];
                    let mut acc = layer.b[o];
                    for (wv, xv) in wrow.iter().zip(xr) {
                        acc += wv * xv;
                    }
                    *slot = if relu && acc < 0.0 { 0.0 } else { acc };
                }
            }
        });
}

/// Per-parameter Adam moments.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m_w: Vec<Vec<f64>>,
    v_w: Vec<Vec<f64>>,
    m_b: Vec<Vec<f64>>,
    v_b: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> Self {
        AdamState {
            step: 0,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            eps: ADAM_EPS,
            m_w: model.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            v_w: model.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            m_b: model.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
            v_b: model.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }
}

/// Gradient accumulators matching a model's shape.
#[derive(Debug, Clone, Default)]
pub struct Gradients {
    pub gw: Vec<Vec<f64>>,
    pub gb: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeroed(model: &MlpModel) -> Self {
        Gradients {
            gw: model.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            gb: model.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }
}

/// Mean squared error over the taken-action outputs, with its gradients.
/// Gradients of the untaken outputs are identically zero.
#[allow(clippy::needless_range_loop)]
pub fn loss_and_grads(
    model: &MlpModel,
    obs: &[f64],
    n: usize,
    actions: &[usize],
    targets: &[f64],
    ws: &mut BatchCache,
) -> (f64, Gradients) {
    let [in_dim, h1, h2, out_dim] = model.dims;
    model.forward_batch(obs, n, ws);
    let q = &ws.q;
    let a1 = &ws.a1;
    let a2 = &ws.a2;

    let mut loss = 0.0;
    let mut d3 = vec![0.0; n];
    for r in 0..n {
        let err = q[r * out_dim + actions[r]] - targets[r];
        loss += err * err;
        d3[r] = 2.0 * err / n as f64;
    }
    loss /= n as f64;

    let w3 = &model.layers[2].w;
    let w2 = &model.layers[1].w;

    // Hidden deltas, row-parallel (disjoint writes).
    let mut d2 = vec![0.0; n * h2];
    let mut d1 = vec![0.0; n * h1];
    let rows_per_chunk = n.div_ceil(PAR_CHUNKS).max(1);
    d2.par_chunks_mut(rows_per_chunk * h2)
        .zip(d1.par_chunks_mut(rows_per_chunk * h1))
        .enumerate()
        .for_each(|(chunk, (d2c, d1c))| {
            let base = chunk * rows_per_chunk;
            let rows = d2c.len() / h2;
            for r in 0..rows {
                let row = base + r;
                let a = actions[row];
                let w3_row = &w3[a * h2..(a + 1) * h2];
                let a2_row = &a2[row * h2..(row + 1) * h2];
                let d2_row = &mut d2c[r * h2..(r + 1) * h2];
                for j in 0..h2 {
                    d2_row[j] = if a2_row[j] > 0.0 { d3[row] * w3_row[j] } else { 0.0 };
                }
                let a1_row = &a1[row * h1..(row + 1) * h1];
                let d1_row = &mut d1c[r * h1..(r + 1) * h1];
                for j in 0..h2 {
                    let dj = d2_row[j];
                    if dj == 0.0 {
                        continue;
                    }
                    let w2_row = &w2[j * h1..(j + 1) * h1];
                    for k in 0..h1 {
                        d1_row[k] += dj * w2_row[k];
                    }
                }
                for k in 0..h1 {
                    if a1_row[k] <= 0.0 {
                        d1_row[k] = 0.0;
                    }
                }
            }
        });

    // Weight/bias gradients: per-chunk partials summed in chunk order.
    let partials: Vec<Gradients> = (0..PAR_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * rows_per_chunk;
            let end = ((chunk + 1) * rows_per_chunk).min(n);
            let mut g = Gradients::zeroed(model);
            if start >= end {
                return g;
            }
            for row in start..end {
                let a = actions[row];
                let a2_row = &a2[row * h2..(row + 1) * h2];
                let gw3_row = &mut g.gw[2][a * h2..(a + 1) * h2];
                for j in 0..h2 {
                    gw3_row[j] += d3[row] * a2_row[j];
                }
                g.gb[2][a] += d3[row];

                let a1_row = &a1[row * h1..(row + 1) * h1];
                let d2_row = &d2[row * h2..(row + 1) * h2];
                for j in 0..h2 {
                    let dj = d2_row[j];
                    if dj == 0.0 {
                        continue;
                    }
                    let gw2_row = &mut g.gw[1][j * h1..(j + 1) * h1];
                    for k in 0..h1 {
                        gw2_row[k] += dj * a1_row[k];
                    }
                    g.gb[1][j] += dj;
                }

                let x_row = &obs[row * in_dim..(row + 1) * in_dim];
                let d1_row = &d1[row * h1..(row + 1) * h1];
                for k in 0..h1 {
                    let dk = d1_row[k];
                    if dk == 0.0 {
                        continue;
                    }
                    let gw1_row = &mut g.gw[0][k * in_dim..(k + 1) * in_dim];
                    for i in 0..in_dim {
                        gw1_row[i] += dk * x_row[i];
                    }
                    g.gb[0][k] += dk;
                }
            }
            g
        })
        .collect();

    let mut grads = Gradients::zeroed(model);
    for p in partials {
        for l in 0..3 {
            for (dst, src) in grads.gw[l].iter_mut().zip(&p.gw[l]) {
                *dst += src;
            }
            for (dst, src) in grads.gb[l].iter_mut().zip(&p.gb[l]) {
                *dst += src;
            }
        }
    }
    (loss, grads)
}

/// Double-Q targets: the online network selects the bootstrap action, the
/// target network evaluates it. Terminal transitions use the bare reward.
#[allow(clippy::too_many_arguments)]
pub fn td_targets(
    online: &MlpModel,
    target: &MlpModel,
    next_obs: &[f64],
    n: usize,
    rewards: &[f64],
    terminal: &[bool],
    gamma: f64,
    ws_online: &mut BatchCache,
    ws_target: &mut BatchCache,
) -> Vec<f64> {
    let out_dim = online.dims[3];
    online.forward_batch(next_obs, n, ws_online);
    target.forward_batch(next_obs, n, ws_target);
    let q_on = &ws_online.q;
    let q_tg = &ws_target.q;
    let mut y = vec![0.0; n];
    for r in 0..n {
        if terminal[r] {
            y[r] = rewards[r];
            continue;
        }
        let row = &q_on[r * out_dim..(r + 1) * out_dim];
        let mut best = 0;
        for (i, v) in row.iter().enumerate() {
            if *v > row[best] {
                best = i;
            }
        }
        y[r] = rewards[r] + gamma * q_tg[r * out_dim + best];
    }
    y
}

/// One MSE/Adam update over the batch; returns the pre-update loss.
#[allow(clippy::too_many_arguments)]
pub fn sgd_step(
    model: &mut MlpModel,
    adam: &mut AdamState,
    obs: &[f64],
    n: usize,
    actions: &[usize],
    targets: &[f64],
    lr: f64,
    ws: &mut BatchCache,
) -> Result<f64, NeuralError> {
    let (loss, grads) = loss_and_grads(model, obs, n, actions, targets, ws);
    if !loss.is_finite() {
        return Err(NeuralError::NonFiniteLoss { step: adam.step });
    }
    adam.step += 1;
    let t = adam.step as i32;
    let knobs = (adam.beta1, adam.beta2, adam.eps, lr);
    let bc = (1.0 - adam.beta1.powi(t), 1.0 - adam.beta2.powi(t));
    for l in 0..3 {
        adam_update(
            &mut model.layers[l].w,
            &grads.gw[l],
            &mut adam.m_w[l],
            &mut adam.v_w[l],
            knobs,
            bc,
        );
        adam_update(
            &mut model.layers[l].b,
            &grads.gb[l],
            &mut adam.m_b[l],
            &mut adam.v_b[l],
            knobs,
            bc,
        );
    }
    Ok(loss)
}

#[allow(clippy::needless_range_loop)]
fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    (beta1, beta2, eps, lr): (f64, f64, f64, f64),
    (bc1, bc2): (f64, f64),
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let mhat = m[i] / bc1;
        let vhat = v[i] / bc2;
        params[i] -= lr * mhat / (vhat.sqrt() + eps);
    }
}

/// Copies the online parameters into the target network.
pub fn sync(target: &mut MlpModel, online: &MlpModel) {
    target.clone_from(online);
}

/// Binary model format: magic, then a payload of phase id, layer count, dims
/// (u32 LE), per-layer weights row-major and biases (f64 LE), then a CRC32
/// of the payload.
pub fn save(model: &MlpModel, path: &Path) -> Result<(), ModelIoError> {
    let mut payload = Vec::new();
    payload.push(model.phase);
    payload.push(model.layers.len() as u8);
    for d in model.dims {
        payload.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for layer in &model.layers {
        for w in &layer.w {
            payload.extend_from_slice(&w.to_le_bytes());
        }
        for b in &layer.b {
            payload.extend_from_slice(&b.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&payload);
    let mut out = Vec::with_capacity(MAGIC.len() + payload.len() + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc.to_le_bytes());
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

/// Loads and verifies a model file; when `expected_phase` is given the header
/// phase must match.
pub fn load(path: &Path, expected_phase: Option<u8>) -> Result<MlpModel, ModelIoError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < MAGIC.len() + 4 {
        return Err(ModelIoError::Truncated { offset: bytes.len() });
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(ModelIoError::BadMagic);
    }
    let payload = &bytes[MAGIC.len()..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(ModelIoError::Checksum { stored, computed });
    }

    let mut offset = 0usize;
    let take = |payload: &[u8], offset: &mut usize, len: usize| -> Result<Vec<u8>, ModelIoError> {
        if *offset + len > payload.len() {
            return Err(ModelIoError::Truncated {
                offset: MAGIC.len() + *offset,
            });
        }
        let out = payload[*offset..*offset + len].to_vec();
        *offset += len;
        Ok(out)
    };

    let phase = take(payload, &mut offset, 1)?[0];
    if let Some(expected) = expected_phase {
        if phase != expected {
            return Err(ModelIoError::PhaseMismatch {
                expected,
                found: phase,
            });
        }
    }
    let layer_count = take(payload, &mut offset, 1)?[0] as usize;
    if layer_count != 3 {
        return Err(ModelIoError::BadHeader(format!(
            "expected 3 layers, file declares {layer_count}"
        )));
    }
    let mut dims = [0usize; 4];
    for d in dims.iter_mut() {
        let raw = take(payload, &mut offset, 4)?;
        *d = u32::from_le_bytes(raw.try_into().unwrap()) as usize;
        if *d == 0 || *d > 100_000 {
            return Err(ModelIoError::BadHeader(format!("dim {d} out of range")));
        }
    }
    let mut layers = Vec::with_capacity(3);
    for k in 0..3 {
        let (i, o) = (dims[k], dims[k + 1]);
        let mut w = Vec::with_capacity(i * o);
        let raw = take(payload, &mut offset, i * o * 8)?;
        for c in raw.chunks_exact(8) {
            w.push(f64::from_le_bytes(c.try_into().unwrap()));
        }
        let mut b = Vec::with_capacity(o);
        let raw = take(payload, &mut offset, o * 8)?;
        for c in raw.chunks_exact(8) {
            b.push(f64::from_le_bytes(c.try_into().unwrap()));
        }
        layers.push(Layer {
            in_dim: i,
            out_dim: o,
            w,
            b,
        });
    }
    if offset != payload.len() {
        return Err(ModelIoError::TrailingBytes(payload.len() - offset));
    }
    Ok(MlpModel {
        phase,
        dims,
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tmp_path(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("qube-test-{}-{name}", std::process::id()));
        p
    }

    #[test]
    fn parameter_counts_match_table_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = MlpModel::init(1, [12, 100, 50, 12], &mut rng).unwrap();
        assert_eq!(m.parameter_count(), 6962);
        let m2 = MlpModel::init(2, [4, 35, 16, 3], &mut rng).unwrap();
        assert_eq!(m2.dims[3], 3);
        assert!(MlpModel::init(1, [0, 4, 4, 2], &mut rng).is_err());
    }

    #[test]
    fn init_is_deterministic_under_seed() {
        let a = MlpModel::init(1, [6, 10, 8, 4], &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = MlpModel::init(1, [6, 10, 8, 4], &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_weights_give_zero_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut m = MlpModel::init(1, [5, 7, 6, 3], &mut rng).unwrap();
        for l in &mut m.layers {
            l.w.iter_mut().for_each(|w| *w = 0.0);
        }
        let q = m.forward(&[1.0, -2.0, 0.5, 3.0, -1.0]).unwrap();
        assert_eq!(q, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn relu_kill_leaves_output_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut m = MlpModel::init(1, [2, 3, 3, 2], &mut rng).unwrap();
        // Force all first-layer pre-activations negative.
        m.layers[0].w.iter_mut().for_each(|w| *w = -1.0);
        m.layers[0].b.iter_mut().for_each(|b| *b = -1.0);
        m.layers[2].b = vec![0.25, -0.75];
        // Second hidden layer sees zeros, so only its bias feeds forward;
        // zero that too.
        m.layers[1].b.iter_mut().for_each(|b| *b = -1.0);
        let q = m.forward(&[1.0, 1.0]).unwrap();
        assert_eq!(q, vec![0.25, -0.75]);
    }

    #[test]
    fn forward_rejects_wrong_input_len() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = MlpModel::init(1, [5, 7, 6, 3], &mut rng).unwrap();
        assert!(m.forward(&[0.0; 4]).is_err());
    }

    #[test]
    fn batch_forward_matches_single_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = MlpModel::init(1, [7, 11, 9, 5], &mut rng).unwrap();
        let n = 23;
        let x: Vec<f64> = (0..n * 7).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut ws = BatchCache::default();
        m.forward_batch(&x, n, &mut ws);
        for r in 0..n {
            let single = m.forward(&x[r * 7..(r + 1) * 7]).unwrap();
            assert_eq!(&ws.q[r * 5..(r + 1) * 5], single.as_slice());
        }
    }

    /// Central finite differences reproduce the analytic gradients.
    #[test]
    fn gradient_check_against_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for trial in 0..4 {
            let dims = [[4, 6, 5, 3], [5, 9, 7, 4], [3, 8, 6, 2], [6, 7, 7, 5]][trial];
            let model = MlpModel::init(1, dims, &mut rng).unwrap();
            let n = 6;
            let obs: Vec<f64> = (0..n * dims[0])
                .map(|_| rng.random_range(-1.5..1.5))
                .collect();
            let actions: Vec<usize> = (0..n).map(|_| rng.random_range(0..dims[3])).collect();
            let targets: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut ws = BatchCache::default();
            let (_, grads) = loss_and_grads(&model, &obs, n, &actions, &targets, &mut ws);

            let h = 1e-4;
            let mut worst: f64 = 0.0;
            for l in 0..3 {
                for idx in 0..model.layers[l].w.len() {
                    let mut plus = model.clone();
                    plus.layers[l].w[idx] += h;
                    let mut minus = model.clone();
                    minus.layers[l].w[idx] -= h;
                    let (lp, _) = loss_and_grads(&plus, &obs, n, &actions, &targets, &mut ws);
                    let (lm, _) = loss_and_grads(&minus, &obs, n, &actions, &targets, &mut ws);
                    let numeric = (lp - lm) / (2.0 * h);
                    let analytic = grads.gw[l][idx];
                    let scale = analytic.abs().max(numeric.abs()).max(1.0);
                    worst = worst.max((analytic - numeric).abs() / scale);
                }
            }
            assert!(worst <= 1e-5, "trial {trial}: worst relative error {worst}");
        }
    }

    #[test]
    fn td_targets_double_q_rule() {
        // Hand-built nets with fixed outputs via biases on zero weights.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut online = MlpModel::init(1, [2, 3, 3, 3], &mut rng).unwrap();
        let mut target = online.clone();
        for m in [&mut online, &mut target] {
            for l in &mut m.layers {
                l.w.iter_mut().for_each(|w| *w = 0.0);
                l.b.iter_mut().for_each(|b| *b = 0.0);
            }
        }
        // Online prefers action 2; target values it at 3.
        online.layers[2].b = vec![0.0, 1.0, 2.0];
        target.layers[2].b = vec![1.0, 7.0, 3.0];
        let next_obs = vec![0.0, 0.0];
        let mut wa = BatchCache::default();
        let mut wb = BatchCache::default();

        let y = td_targets(
            &online, &target, &next_obs, 1, &[-2.0], &[false], 0.9, &mut wa, &mut wb,
        );
        assert!((y[0] - (-2.0 + 0.9 * 3.0)).abs() < 1e-12);

        let y = td_targets(
            &online, &target, &next_obs, 1, &[5000.0], &[true], 0.9, &mut wa, &mut wb,
        );
        assert_eq!(y[0], 5000.0);

        let y = td_targets(
            &online, &target, &next_obs, 1, &[-2.0], &[false], 0.0, &mut wa, &mut wb,
        );
        assert_eq!(y[0], -2.0);

        // With online == target the rule degrades to plain Q-learning.
        let y = td_targets(
            &target, &target, &next_obs, 1, &[-1.0], &[false], 0.5, &mut wa, &mut wb,
        );
        assert!((y[0] - (-1.0 + 0.5 * 7.0)).abs() < 1e-12);
    }

    #[test]
    fn overfits_one_transition() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut model = MlpModel::init(1, [3, 12, 8, 2], &mut rng).unwrap();
        let mut adam = AdamState::new(&model);
        let mut ws = BatchCache::default();
        let obs = vec![0.3, -0.7, 1.1];
        let mut first = 0.0;
        let mut last = 0.0;
        for it in 0..4000 {
            let loss = sgd_step(
                &mut model,
                &mut adam,
                &obs,
                1,
                &[1],
                &[2.5],
                1e-3,
                &mut ws,
            )
            .unwrap();
            if it == 0 {
                first = loss;
            }
            last = loss;
        }
        assert!(last < first * 1e-4, "loss {first} -> {last}");
    }

    #[test]
    fn zero_error_batch_keeps_loss_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut model = MlpModel::init(1, [3, 6, 5, 2], &mut rng).unwrap();
        let obs = vec![0.5, 0.25, -1.0];
        let q = model.forward(&obs).unwrap();
        let mut adam = AdamState::new(&model);
        let mut ws = BatchCache::default();
        let loss = sgd_step(&mut model, &mut adam, &obs, 1, &[0], &[q[0]], 1e-4, &mut ws).unwrap();
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn sync_makes_target_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let online = MlpModel::init(1, [4, 6, 5, 3], &mut rng).unwrap();
        let mut target = MlpModel::init(1, [4, 6, 5, 3], &mut rng).unwrap();
        assert_ne!(online, target);
        sync(&mut target, &online);
        assert_eq!(online, target);
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = MlpModel::init(3, [24, 200, 100, 8], &mut rng).unwrap();
        let path = tmp_path("roundtrip.mlp");
        save(&model, &path).unwrap();
        let loaded = load(&path, Some(3)).unwrap();
        assert_eq!(model, loaded);
        // Re-saving produces identical bytes.
        let path2 = tmp_path("roundtrip2.mlp");
        save(&loaded, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
        std::fs::remove_file(&path).ok();
        std::fs::remove_file(&path2).ok();
    }

    #[test]
    fn corrupted_files_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = MlpModel::init(2, [4, 35, 16, 3], &mut rng).unwrap();
        let path = tmp_path("corrupt.mlp");
        save(&model, &path).unwrap();
        let good = std::fs::read(&path).unwrap();

        // Truncation.
        std::fs::write(&path, &good[..good.len() / 2]).unwrap();
        assert!(matches!(
            load(&path, None),
            Err(ModelIoError::Checksum { .. }) | Err(ModelIoError::Truncated { .. })
        ));

        // Bit flip in the payload.
        let mut flipped = good.clone();
        let mid = flipped.len() / 2;
        flipped[mid] ^= 0x40;
        std::fs::write(&path, &flipped).unwrap();
        assert!(matches!(load(&path, None), Err(ModelIoError::Checksum { .. })));

        // Wrong magic.
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        std::fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(load(&path, None), Err(ModelIoError::BadMagic)));

        // Phase mismatch.
        std::fs::write(&path, &good).unwrap();
        assert!(matches!(
            load(&path, Some(1)),
            Err(ModelIoError::PhaseMismatch {
                expected: 1,
                found: 2
            })
        ));
        std::fs::remove_file(&path).ok();
    }
}
