//! Gaussian-emission HMM over EMG feature frames.
//!
//! Training starts from the labeled calibration schedule and refines with
//! Baum-Welch (scaled forward-backward). Live decoding is causal filtering
//! in the log domain.

use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::features::{EmgFrame, FEATURE_DIM};
use super::{DecoderError, Gesture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    #[default]
    Diagonal,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureHmm {
    pub states: Vec<Gesture>,
    pub initial: Vec<f64>,
    /// Row-stochastic `T[i][j] = P(state j | state i)`.
    pub transition: Vec<Vec<f64>>,
    pub means: Vec<Vec<f64>>,
    /// Full 16×16 matrices, diagonal when `kind` is `Diagonal`.
    pub covariances: Vec<Vec<Vec<f64>>>,
    pub kind: CovarianceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub variance_floor: f64,
    /// Lower bound applied to transition and initial probabilities after training.
    pub transition_floor: f64,
    pub covariance: CovarianceKind,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-6,
            variance_floor: 1e-6,
            transition_floor: 1e-3,
            covariance: CovarianceKind::Diagonal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub model: GestureHmm,
    /// Log-likelihood of the training frames before each M-step, and of the final model.
    pub log_likelihoods: Vec<f64>,
}

struct Emission {
    mean: DVector<f64>,
    factor: Cholesky<f64, Dyn>,
    log_norm: f64,
}

impl Emission {
    fn log_density(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.mean;
        let y = self.factor.l_dirty().solve_lower_triangular(&diff).expect("cholesky factor is nonsingular");
        self.log_norm - 0.5 * y.norm_squared()
    }
}

impl GestureHmm {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn emissions(&self) -> Result<Vec<Emission>, DecoderError> {
        self.means
            .iter()
            .zip(&self.covariances)
            .enumerate()
            .map(|(s, (mean, cov))| {
                let d = mean.len();
                let sigma = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
                let factor = Cholesky::new(sigma)
                    .ok_or_else(|| DecoderError::Numeric(format!("covariance of state {s} is not positive definite")))?;
                let log_det: f64 = factor.l_dirty().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
                Ok(Emission {
                    mean: DVector::from_column_slice(mean),
                    factor,
                    log_norm: -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det),
                })
            })
            .collect()
    }

    fn validate(&self) -> Result<(), DecoderError> {
        let n = self.len();
        if n == 0 || self.initial.len() != n || self.transition.len() != n || self.means.len() != n || self.covariances.len() != n {
            return Err(DecoderError::InvalidInput("HMM parameter sizes disagree".into()));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != n || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(DecoderError::InvalidInput(format!("transition row {i} is not stochastic")));
            }
        }
        Ok(())
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn covariance_of(
    frames: &[&[f64]],
    weights: &[f64],
    mean: &[f64],
    kind: CovarianceKind,
    floor: f64,
) -> Vec<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    let d = mean.len();
    let mut cov = vec![vec![0.0; d]; d];
    for (x, &w) in frames.iter().zip(weights) {
        for i in 0..d {
            let di = x[i] - mean[i];
            match kind {
                CovarianceKind::Diagonal => cov[i][i] += w * di * di,
                CovarianceKind::Full => {
                    for j in 0..d {
                        cov[i][j] += w * di * (x[j] - mean[j]);
                    }
                }
            }
        }
    }
    for (i, row) in cov.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x /= total;
        }
        match kind {
            CovarianceKind::Diagonal => row[i] = row[i].max(floor),
            CovarianceKind::Full => row[i] += floor,
        }
    }
    cov
}

fn weighted_mean(frames: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut mean = vec![0.0; frames[0].len()];
    for (x, &w) in frames.iter().zip(weights) {
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += w * v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    mean
}

struct Posteriors {
    log_likelihood: f64,
    gamma: Vec<Vec<f64>>,
    xi_sum: Vec<Vec<f64>>,
}

fn forward_backward(model: &GestureHmm, obs: &[&[f64]]) -> Result<Posteriors, DecoderError> {
    let n = model.len();
    let t_len = obs.len();
    let emissions = model.emissions()?;
    // emission likelihoods scaled by the per-frame maximum
    let mut b = vec![vec![0.0; n]; t_len];
    let mut log_ll = 0.0;
    for (t, x) in obs.iter().enumerate() {
        let logs: Vec<f64> = emissions.iter().map(|e| e.log_density(x)).collect();
        let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        log_ll += mx;
        for j in 0..n {
            b[t][j] = (logs[j] - mx).exp();
        }
    }
    let mut alpha = vec![vec![0.0; n]; t_len];
    let mut scale = vec![0.0; t_len];
    for t in 0..t_len {
        for j in 0..n {
            let prior = if t == 0 {
                model.initial[j]
            } else {
                (0..n).map(|i| alpha[t - 1][i] * model.transition[i][j]).sum()
            };
            alpha[t][j] = prior * b[t][j];
        }
        scale[t] = alpha[t].iter().sum();
        if !(scale[t] > 0.0) {
            return Err(DecoderError::Numeric(format!("forward pass vanished at frame {t}")));
        }
        alpha[t].iter_mut().for_each(|a| *a /= scale[t]);
        log_ll += scale[t].ln();
    }
    let mut beta = vec![vec![1.0; n]; t_len];
    for t in (0..t_len.saturating_sub(1)).rev() {
        for i in 0..n {
            beta[t][i] = (0..n).map(|j| model.transition[i][j] * b[t + 1][j] * beta[t + 1][j]).sum::<f64>() / scale[t + 1];
        }
    }
    let gamma: Vec<Vec<f64>> = (0..t_len)
        .map(|t| {
            let g: Vec<f64> = (0..n).map(|i| alpha[t][i] * beta[t][i]).collect();
            let s: f64 = g.iter().sum();
            g.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let mut xi_sum = vec![vec![0.0; n]; n];
    for t in 0..t_len.saturating_sub(1) {
        for i in 0..n {
            for j in 0..n {
                xi_sum[i][j] += alpha[t][i] * model.transition[i][j] * b[t + 1][j] * beta[t + 1][j] / scale[t + 1];
            }
        }
    }
    Ok(Posteriors {
        log_likelihood: log_ll,
        gamma,
        xi_sum,
    })
}

fn initialize(obs: &[&[f64]], labels: &[Gesture], options: &TrainOptions) -> GestureHmm {
    let mut states: Vec<Gesture> = labels.to_vec();
    states.sort();
    states.dedup();
    let n = states.len();
    let index = |g: Gesture| states.binary_search(&g).unwrap();

    let mut means = Vec::with_capacity(n);
    let mut covariances = Vec::with_capacity(n);
    for &g in &states {
        let members: Vec<&[f64]> = obs.iter().zip(labels).filter(|(_, &l)| l == g).map(|(x, _)| *x).collect();
        if members.len() < 2 {
            warn!("gesture {g:?} has a single training frame; covariance falls back to the floor");
        }
        let w = vec![1.0; members.len()];
        let mean = weighted_mean(&members, &w);
        covariances.push(covariance_of(&members, &w, &mean, options.covariance, options.variance_floor));
        means.push(mean);
    }
    let mut counts = vec![vec![1.0; n]; n];
    for pair in labels.windows(2) {
        counts[index(pair[0])][index(pair[1])] += 1.0;
    }
    let transition = counts
        .into_iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.into_iter().map(|c| c / s).collect()
        })
        .collect();
    GestureHmm {
        initial: vec![1.0 / n as f64; n],
        states,
        transition,
        means,
        covariances,
        kind: options.covariance,
    }
}

fn apply_floor(p: &mut [f64], floor: f64) {
    p.iter_mut().for_each(|x| *x = x.max(floor));
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
}

/// Fits a model to labeled calibration frames. The states are the gestures
/// present in `labels`, ordered by [`Gesture::index`].
pub fn baum_welch_train(frames: &[EmgFrame], labels: &[Gesture], options: &TrainOptions) -> Result<TrainReport, DecoderError> {
    if frames.is_empty() || frames.len() != labels.len() {
        return Err(DecoderError::InvalidInput(format!(
            "need one label per frame and at least one frame, got {} frames and {} labels",
            frames.len(),
            labels.len()
        )));
    }
    if let Some(f) = frames.iter().find(|f| f.feature.len() != FEATURE_DIM || f.feature.iter().any(|x| !x.is_finite())) {
        return Err(DecoderError::InvalidInput(format!("training frame at sample {} is malformed", f.timestamp)));
    }
    let obs: Vec<&[f64]> = frames.iter().map(|f| f.feature.as_slice()).collect();
    let mut model = initialize(&obs, labels, options);
    let n = model.len();
    let mut log_likelihoods = Vec::new();
    for iteration in 0..=options.max_iterations {
        let post = forward_backward(&model, &obs)?;
        let improved = log_likelihoods.last().map(|prev| post.log_likelihood - prev);
        log_likelihoods.push(post.log_likelihood);
        if iteration == options.max_iterations || improved.is_some_and(|d| d < options.tolerance) {
            break;
        }
        model.initial = post.gamma[0].clone();
        for i in 0..n {
            let occupancy: f64 = post.gamma[..obs.len() - 1].iter().map(|g| g[i]).sum();
            if occupancy > 0.0 {
                model.transition[i] = post.xi_sum[i].iter().map(|x| x / occupancy).collect();
                let s: f64 = model.transition[i].iter().sum();
                model.transition[i].iter_mut().for_each(|x| *x /= s);
            }
            let w: Vec<f64> = post.gamma.iter().map(|g| g[i]).collect();
            if w.iter().sum::<f64>() > 1e-12 {
                model.means[i] = weighted_mean(&obs, &w);
                model.covariances[i] = covariance_of(&obs, &w, &model.means[i], options.covariance, options.variance_floor);
            }
        }
    }
    if n > 1 {
        apply_floor(&mut model.initial, options.transition_floor);
        for row in &mut model.transition {
            apply_floor(row, options.transition_floor);
        }
    }
    Ok(TrainReport { model, log_likelihoods })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedFrame {
    pub timestamp: usize,
    pub gesture: Gesture,
    /// Filtering distribution over the model's states.
    pub posterior: Vec<f64>,
}

/// Causal forward filter for live decoding, one frame at a time.
pub struct ForwardFilter<'a> {
    model: &'a GestureHmm,
    emissions: Vec<Emission>,
    log_transition: Vec<Vec<f64>>,
    log_alpha: Option<Vec<f64>>,
}

impl<'a> ForwardFilter<'a> {
    pub fn new(model: &'a GestureHmm) -> Result<Self, DecoderError> {
        model.validate()?;
        Ok(Self {
            emissions: model.emissions()?,
            log_transition: model.transition.iter().map(|r| r.iter().map(|p| p.ln()).collect()).collect(),
            log_alpha: None,
            model,
        })
    }

    /// Returns `None` (and logs a warning) for frames with non-finite features.
    pub fn push(&mut self, frame: &EmgFrame) -> Option<DecodedFrame> {
        if frame.feature.len() != FEATURE_DIM || frame.feature.iter().any(|x| !x.is_finite()) {
            warn!("skipping malformed frame at sample {}", frame.timestamp);
            return None;
        }
        let n = self.model.len();
        let mut next: Vec<f64> = (0..n)
            .map(|j| {
                let prior = match &self.log_alpha {
                    None => self.model.initial[j].ln(),
                    Some(prev) => log_sum_exp((0..n).map(|i| prev[i] + self.log_transition[i][j])),
                };
                prior + self.emissions[j].log_density(&frame.feature)
            })
            .collect();
        let norm = log_sum_exp(next.iter().copied());
        next.iter_mut().for_each(|x| *x -= norm);
        let posterior: Vec<f64> = next.iter().map(|x| x.exp()).collect();
        let best = (0..n).fold(0, |b, j| if posterior[j] > posterior[b] { j } else { b });
        self.log_alpha = Some(next);
        Some(DecodedFrame {
            timestamp: frame.timestamp,
            gesture: self.model.states[best],
            posterior,
        })
    }
}

/// Filters a whole stream; malformed frames are dropped.
pub fn forward_decode(model: &GestureHmm, frames: &[EmgFrame]) -> Result<Vec<DecodedFrame>, DecoderError> {
    let mut filter = ForwardFilter::new(model)?;
    Ok(frames.iter().filter_map(|f| filter.push(f)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn planted(seed: u64, script: &[(Gesture, usize)], sep: f64) -> (Vec<EmgFrame>, Vec<Gesture>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut frames = Vec::new();
        let mut labels = Vec::new();
        for &(g, count) in script {
            for _ in 0..count {
                let feature = (0..FEATURE_DIM)
                    .map(|d| sep * ((g.index() + d) % 5) as f64 + noise.sample(&mut rng))
                    .collect();
                frames.push(EmgFrame { feature, timestamp: frames.len() });
                labels.push(g);
            }
        }
        (frames, labels)
    }

    fn protocol() -> Vec<(Gesture, usize)> {
        Gesture::ALL.iter().map(|&g| (g, 56)).collect()
    }

    #[test]
    fn recovers_planted_means() {
        let (frames, labels) = planted(1, &protocol(), 10.0);
        let report = baum_welch_train(&frames, &labels, &TrainOptions::default()).unwrap();
        let model = report.model;
        assert_eq!(model.states, Gesture::ALL.to_vec());
        for (s, g) in model.states.iter().enumerate() {
            for d in 0..FEATURE_DIM {
                let truth = 10.0 * ((g.index() + d) % 5) as f64;
                assert!((model.means[s][d] - truth).abs() < 0.4, "state {s} dim {d}");
            }
        }
        for row in &model.transition {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn log_likelihood_is_monotone() {
        for (seed, sep) in [(2, 0.5), (3, 1.0), (4, 3.0)] {
            let (frames, labels) = planted(seed, &protocol(), sep);
            for kind in [CovarianceKind::Diagonal, CovarianceKind::Full] {
                let opts = TrainOptions { covariance: kind, ..Default::default() };
                let ll = baum_welch_train(&frames, &labels, &opts).unwrap().log_likelihoods;
                assert!(ll.len() >= 2);
                for w in ll.windows(2) {
                    assert!(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
                }
            }
        }
    }

    #[test]
    fn one_state_reduction() {
        let (frames, labels) = planted(5, &[(Gesture::Fist, 30)], 10.0);
        let model = baum_welch_train(&frames, &labels, &TrainOptions::default()).unwrap().model;
        assert_eq!(model.states, vec![Gesture::Fist]);
        assert_eq!(model.initial, vec![1.0]);
        assert_eq!(model.transition, vec![vec![1.0]]);
        let decoded = forward_decode(&model, &frames).unwrap();
        assert!(decoded.iter().all(|d| d.gesture == Gesture::Fist));
    }

    #[test]
    fn single_frame_segment_is_regularized() {
        let (frames, labels) = planted(6, &[(Gesture::Normal, 20), (Gesture::Spread, 1)], 10.0);
        let model = baum_welch_train(&frames, &labels, &TrainOptions::default()).unwrap().model;
        assert!(model.covariances[1][0][0] >= 1e-6);
    }

    #[test]
    fn decodes_planted_sequence() {
        let (train, labels) = planted(7, &protocol(), 10.0);
        let model = baum_welch_train(&train, &labels, &TrainOptions::default()).unwrap().model;
        let script = [
            (Gesture::Normal, 20),
            (Gesture::WaveDown, 15),
            (Gesture::Fist, 10),
            (Gesture::Normal, 10),
            (Gesture::Spread, 12),
            (Gesture::WaveUp, 15),
        ];
        let (test, truth) = planted(8, &script, 10.0);
        let decoded = forward_decode(&model, &test).unwrap();
        let hits = decoded.iter().zip(&truth).filter(|(d, t)| d.gesture == **t).count();
        assert!(hits as f64 >= 0.95 * truth.len() as f64, "{hits}/{}", truth.len());
        for d in &decoded {
            assert!((d.posterior.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn malformed_frames_are_skipped() {
        let (frames, labels) = planted(9, &protocol(), 10.0);
        let model = baum_welch_train(&frames, &labels, &TrainOptions::default()).unwrap().model;
        let mut bad = frames[..5].to_vec();
        bad[2].feature[3] = f64::NAN;
        assert_eq!(forward_decode(&model, &bad).unwrap().len(), 4);
        assert!(baum_welch_train(&bad, &labels[..5], &TrainOptions::default()).is_err());
    }
}
