// gss.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/gss.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "incar/log.h"
#include "packed.h"

namespace incar {

void ActivityMatrix::Validate() const {
  if (classes() < 1) throw Error("activity matrix needs a noise class");
  if (static_cast<Eigen::Index>(speakers.size()) != classes() - 1)
    throw Error("activity matrix speaker labels do not match its rows");
  if (!active.row(noise_class()).all())
    throw Error("noise class must be active in every frame");
}

ActivityMatrix ActivityFromRttm(const RttmSegmentList &rttm,
                                const std::string &recording,
                                Eigen::Index frames, double hop_seconds,
                                double context_seconds, double time_offset) {
  if (frames < 1) throw Error("activity needs at least one frame");
  if (hop_seconds <= 0.0) throw Error("hop must be positive");
  ActivityMatrix act;
  act.speakers = Speakers(rttm, recording);
  if (!rttm.empty() && act.speakers.empty())
    throw Error("recording " + recording + " not found in RTTM");
  const Eigen::Index K = static_cast<Eigen::Index>(act.speakers.size()) + 1;
  act.active.setConstant(K, frames, false);
  act.active.row(K - 1).setConstant(true);

  const Eigen::Index dilate =
      context_seconds > 0.0
          ? static_cast<Eigen::Index>(std::ceil(context_seconds / hop_seconds - 1e-9))
          : 0;
  // First frame whose stamp is >= t, robust to representation error.
  auto first_at_or_after = [&](double t) {
    return static_cast<Eigen::Index>(
        std::ceil((t - time_offset) / hop_seconds - 1e-9));
  };
  for (const auto &seg : rttm) {
    if (seg.recording != recording) continue;
    auto it = std::lower_bound(act.speakers.begin(), act.speakers.end(),
                               seg.speaker);
    const Eigen::Index k = it - act.speakers.begin();
    Eigen::Index lo = first_at_or_after(seg.onset) - dilate;
    Eigen::Index hi = first_at_or_after(seg.end()) + dilate;  // exclusive
    lo = std::max<Eigen::Index>(lo, 0);
    hi = std::min<Eigen::Index>(hi, frames);
    if (hi > lo) act.active.row(k).segment(lo, hi - lo).setConstant(true);
  }
  return act;
}

MaskTensor::MaskTensor(Eigen::Index classes, Eigen::Index frames,
                       Eigen::Index bins)
    : classes_(classes),
      frames_(frames),
      per_bin_(bins, RealMatrix::Zero(classes, frames)) {}

RealMatrix MaskTensor::ForClass(Eigen::Index k) const {
  RealMatrix out(frames_, bins());
  for (Eigen::Index f = 0; f < bins(); ++f) out.col(f) = per_bin_[f].row(k).transpose();
  return out;
}

namespace {

using internal::PackOuterProducts;
using internal::QuadraticCoefficients;
using internal::UnpackHermitian;

constexpr double kInitLoading = 1e-3;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Inverse of the lower triangle of m by forward substitution. Small
// matrices only; avoids the blocked solvers' setup cost.
ComplexMatrix LowerInverse(const ComplexMatrix &m) {
  const Eigen::Index n = m.rows();
  ComplexMatrix inv = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / m(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Complex acc = 0.0;
      for (Eigen::Index l = j; l < i; ++l) acc += m(i, l) * inv(l, j);
      inv(i, j) = -acc / m(i, i);
    }
  }
  return inv;
}

ComplexMatrix Hermitize(const ComplexMatrix &m) {
  return 0.5 * (m + m.adjoint());
}

// One frequency bin of the guided CACGMM.
class BinModel {
 public:
  BinModel(const ComplexMatrix &x, const ActivityMatrix &activity)
      : D_(x.rows()), K_(activity.classes()), T_(x.cols()), activity_(&activity) {
    RealVector norms = x.colwise().norm().transpose();
    for (Eigen::Index t = 0; t < T_; ++t)
      if (norms(t) > 0.0) valid_.push_back(t);
    ComplexMatrix z(D_, static_cast<Eigen::Index>(valid_.size()));
    gate_.resize(K_, static_cast<Eigen::Index>(valid_.size()));
    for (size_t i = 0; i < valid_.size(); ++i) {
      z.col(i) = x.col(valid_[i]) / norms(valid_[i]);
      gate_.col(i) = activity.active.col(valid_[i]);
    }
    outer_ = PackOuterProducts(z);
    // Frame-independent part of the log density: log((D-1)!) - D log(pi).
    log_norm_ = std::lgamma(static_cast<double>(D_)) -
                static_cast<double>(D_) * std::log(std::numbers::pi);

    pi_ = RealVector::Zero(K_);
    Eigen::Index active_classes = 0;
    for (Eigen::Index k = 0; k < K_; ++k)
      if (activity.active.row(k).any()) ++active_classes;
    for (Eigen::Index k = 0; k < K_; ++k)
      if (activity.active.row(k).any()) pi_(k) = 1.0 / active_classes;
    // The noise class starts spatially white; each speaker class starts
    // from the mean outer product of its active frames, so that a speaker
    // gated on the same frames as the noise class still separates.
    B_.assign(K_, ComplexMatrix::Identity(D_, D_));
    for (Eigen::Index k = 0; k + 1 < K_; ++k) {
      const RealVector g = gate_.row(k).cast<double>().transpose();
      const double count = g.sum();
      if (count <= 0.0) continue;
      ComplexMatrix B = UnpackHermitian(outer_ * g, D_) / count;
      B.diagonal().array() += kInitLoading * B.trace().real();
      B_[k] = B * (static_cast<double>(D_) / B.trace().real());
    }
  }

  // Posteriors into gamma_ and quadratic forms into quad_; returns the
  // log-likelihood of the current parameters.
  double EStep() {
    const Eigen::Index n = outer_.cols();
    RealMatrix logp(K_, n);
    quad_.resize(K_, n);
    for (Eigen::Index k = 0; k < K_; ++k) {
      Eigen::LLT<ComplexMatrix> llt(B_[k]);
      if (llt.info() != Eigen::Success)
        throw Error("CACGMM shape matrix lost positive definiteness");
      const double logdet =
          2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
      const ComplexMatrix Linv = LowerInverse(llt.matrixLLT());
      const RealVector a = QuadraticCoefficients(Linv.adjoint() * Linv);
      quad_.row(k) =
          (a.transpose() * outer_).cwiseMax(std::numeric_limits<double>::min());
      if (pi_(k) > 0.0) {
        logp.row(k) = (std::log(pi_(k)) + log_norm_ - logdet) -
                      static_cast<double>(D_) * quad_.row(k).array().log();
        for (Eigen::Index i = 0; i < n; ++i)
          if (!gate_(k, i)) logp(k, i) = kNegInf;
      } else {
        logp.row(k).setConstant(kNegInf);
      }
    }
    // Column-wise log-sum-exp. Terms are added in ascending order so the
    // result does not depend on class order.
    const Eigen::RowVectorXd top = logp.colwise().maxCoeff();
    gamma_ = (logp.rowwise() - top).array().exp().matrix();
    Eigen::RowVectorXd total(n);
    std::vector<double> col(K_);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < K_; ++k) col[k] = gamma_(k, i);
      std::sort(col.begin(), col.end());
      double acc = 0.0;
      for (double v : col) acc += v;
      total(i) = acc;
    }
    gamma_.array().rowwise() /= total.array();
    double ll = 0.0;
    std::vector<double> lse(n);
    for (Eigen::Index i = 0; i < n; ++i) lse[i] = top(i) + std::log(total(i));
    for (double v : lse) ll += v;
    return ll;
  }

  void MStep(double epsilon) {
    const Eigen::Index n = outer_.cols();
    if (n == 0) return;
    for (Eigen::Index k = 0; k < K_; ++k) {
      const double mass = gamma_.row(k).sum();
      pi_(k) = mass / static_cast<double>(n);
      if (mass <= 0.0) continue;
      RealVector weight = (gamma_.row(k).array() / quad_.row(k).array()).transpose();
      ComplexMatrix B = UnpackHermitian(outer_ * weight, D_);
      B *= static_cast<double>(D_) / mass;
      B = Hermitize(B);
      double tr = B.trace().real();
      B.diagonal().array() += epsilon * tr;
      tr = B.trace().real();
      B_[k] = B * (static_cast<double>(D_) / tr);
    }
  }

  // Scatter posteriors over all frames; zero-norm frames get the gated prior.
  void WriteMasks(RealMatrix *out) const {
    out->setZero(K_, T_);
    std::vector<char> filled(T_, 0);
    for (size_t i = 0; i < valid_.size(); ++i) {
      out->col(valid_[i]) = gamma_.col(i);
      filled[valid_[i]] = 1;
    }
    for (Eigen::Index t = 0; t < T_; ++t) {
      if (filled[t]) continue;
      std::vector<double> priors(K_);
      double total = 0.0, gated = 0.0;
      for (Eigen::Index k = 0; k < K_; ++k) {
        priors[k] = gate_prior(k, t);
        gated += activity_->active(k, t) ? 1.0 : 0.0;
      }
      std::sort(priors.begin(), priors.end());
      for (double p : priors) total += p;
      for (Eigen::Index k = 0; k < K_; ++k) {
        double uniform = activity_->active(k, t) ? 1.0 / gated : 0.0;
        (*out)(k, t) = total > 0.0 ? gate_prior(k, t) / total : uniform;
      }
    }
  }

  const RealVector &pi() const { return pi_; }
  const std::vector<ComplexMatrix> &shapes() const { return B_; }

 private:
  double gate_prior(Eigen::Index k, Eigen::Index t) const {
    return activity_->active(k, t) ? pi_(k) : 0.0;
  }

  Eigen::Index D_, K_, T_;
  const ActivityMatrix *activity_;
  std::vector<Eigen::Index> valid_;
  RealMatrix outer_;  // packed z z^H per valid frame
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> gate_;
  double log_norm_ = 0.0;
  RealVector pi_;
  std::vector<ComplexMatrix> B_;
  RealMatrix quad_;
  RealMatrix gamma_;
};

}  // namespace

EmResult EmFit(const Spectrogram &spec, const ActivityMatrix &activity,
               const EmConfig &config) {
  activity.Validate();
  const Eigen::Index D = spec.channels(), K = activity.classes(),
                     F = spec.bins(), T = spec.frames();
  if (D < 2) throw Error("guided EM needs at least 2 channels");
  if (config.iterations < 1) throw Error("EM needs at least one iteration");
  if (activity.frames() != T)
    throw Error("activity has " + std::to_string(activity.frames()) +
                " frames, spectrogram has " + std::to_string(T));
  if (K > D + 6)
    INCAR_WARN << "guided EM with " << K << " classes on " << D
               << " channels is poorly determined";

  EmResult result;
  result.state.weights.resize(K, F);
  result.state.shapes.assign(K, std::vector<ComplexMatrix>(F));
  result.masks = MaskTensor(K, T, F);
  result.log_likelihood.resize(config.iterations + 1, F);

  for (Eigen::Index f = 0; f < F; ++f) {
    BinModel model(spec.bin(f), activity);
    for (int it = 0; it < config.iterations; ++it) {
      result.log_likelihood(it, f) = model.EStep();
      model.MStep(config.epsilon);
    }
    result.log_likelihood(config.iterations, f) = model.EStep();
    model.WriteMasks(&result.masks.bin(f));
    result.state.weights.col(f) = model.pi();
    for (Eigen::Index k = 0; k < K; ++k)
      result.state.shapes[k][f] = model.shapes()[k];
  }
  return result;
}

SpatialCovariances EstimateSpatialCovariances(const Spectrogram &spec,
                                              const MaskTensor &masks,
                                              Eigen::Index target_class) {
  if (target_class < 0 || target_class >= masks.classes())
    throw Error("target class out of range");
  if (masks.frames() != spec.frames() || masks.bins() != spec.bins())
    throw Error("mask shape does not match spectrogram");
  const Eigen::Index F = spec.bins(), T = spec.frames();
  SpatialCovariances cov;
  cov.target.resize(F);
  cov.noise.resize(F);
  cov.target_fallback.assign(F, false);
  cov.noise_fallback.assign(F, false);
  constexpr double kTinyMass = 1e-10;
  for (Eigen::Index f = 0; f < F; ++f) {
    const ComplexMatrix &X = spec.bin(f);
    RealVector g = masks.bin(f).row(target_class).transpose();
    RealVector gc = RealVector::Ones(T) - g;
    ComplexMatrix plain = Hermitize(X * X.adjoint() / static_cast<double>(T));
    const double gs = g.sum(), gcs = gc.sum();
    if (gs > kTinyMass) {
      cov.target[f] = Hermitize(X * g.asDiagonal() * X.adjoint() / gs);
    } else {
      cov.target[f] = plain;
      cov.target_fallback[f] = true;
    }
    if (gcs > kTinyMass) {
      cov.noise[f] = Hermitize(X * gc.asDiagonal() * X.adjoint() / gcs);
    } else {
      cov.noise[f] = plain;
      cov.noise_fallback[f] = true;
    }
  }
  return cov;
}

BeamformerWeights MvdrSouden(const std::vector<ComplexMatrix> &phi_target,
                             const std::vector<ComplexMatrix> &phi_noise,
                             Eigen::Index ref_channel, double loading) {
  if (phi_target.size() != phi_noise.size())
    throw Error("target and noise covariance counts differ");
  BeamformerWeights bw;
  bw.ref_channel = ref_channel;
  bw.w.resize(phi_target.size());
  for (size_t f = 0; f < phi_target.size(); ++f) {
    const Eigen::Index D = phi_noise[f].rows();
    if (ref_channel < 0 || ref_channel >= D)
      throw Error("reference channel out of range");
    ComplexMatrix noise = Hermitize(phi_noise[f]);
    double tr = noise.trace().real();
    double lambda = tr > 0.0 ? loading * tr / static_cast<double>(D) : loading;
    noise.diagonal().array() += lambda;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(noise, Eigen::EigenvaluesOnly);
    double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
      throw Error("noise covariance is singular at frequency bin " +
                  std::to_string(f));
    ComplexMatrix num = noise.ldlt().solve(phi_target[f]);
    Complex den = num.trace();
    if (std::abs(den) <= 1e-300 || !num.allFinite()) {
      bw.w[f] = ComplexVector::Zero(D);
    } else {
      bw.w[f] = num.col(ref_channel) / den;
    }
  }
  return bw;
}

Spectrogram Beamform(const Spectrogram &spec, const BeamformerWeights &weights) {
  if (static_cast<Eigen::Index>(weights.w.size()) != spec.bins())
    throw Error("beamformer weights do not match the bin count");
  Spectrogram out(1, spec.frames(), spec.config(), spec.sample_rate());
  for (Eigen::Index f = 0; f < spec.bins(); ++f)
    out.bin(f) = weights.w[f].adjoint() * spec.bin(f);
  return out;
}

AudioBuffer GssEnhance(const AudioBuffer &audio, const RttmSegmentList &rttm,
                       const RttmSegment &segment, const GssConfig &config) {
  const int fs = audio.sample_rate();
  const Eigen::Index start = std::llround(segment.onset * fs);
  const Eigen::Index length = std::llround(segment.duration * fs);
  if (segment.onset < 0.0 || start + length > audio.num_samples() + 1)
    throw Error("segment [" + std::to_string(segment.onset) + ", " +
                std::to_string(segment.end()) + ") exceeds recording bounds");
  if (length < config.stft.window_length())
    throw Error("segment shorter than one STFT window");

  const Eigen::Index context = std::llround(config.context_seconds * fs);
  const Eigen::Index cut_begin = std::max<Eigen::Index>(start - context, 0);
  const Eigen::Index cut_end =
      std::min<Eigen::Index>(start + length + context, audio.num_samples());
  AudioBuffer cut = audio.Slice(cut_begin, std::max(cut_end, start + length) - cut_begin);

  AnalysisPadding padding;
  Spectrogram spec = PaddedStft(cut, config.stft, &padding);
  // Frames are stamped at their window centers.
  const double offset = (static_cast<double>(cut_begin - padding.left) +
                         0.5 * config.stft.window_length()) / fs;
  ActivityMatrix activity = ActivityFromRttm(
      rttm, segment.recording, spec.frames(),
      static_cast<double>(config.stft.hop()) / fs,
      config.activity_context_seconds, offset);
  // Frames centered in the analysis padding take the activity of the
  // nearest frame centered on real samples.
  {
    const double hop_s = static_cast<double>(config.stft.hop()) / fs;
    const double first_real = static_cast<double>(cut_begin) / fs;
    const double last_real = static_cast<double>(cut_begin + cut.num_samples() - 1) / fs;
    const Eigen::Index T = spec.frames();
    Eigen::Index lo = 0, hi = T - 1;
    while (lo < T - 1 && offset + lo * hop_s < first_real) ++lo;
    while (hi > lo && offset + hi * hop_s > last_real) --hi;
    for (Eigen::Index t = 0; t < lo; ++t) activity.active.col(t) = activity.active.col(lo);
    for (Eigen::Index t = hi + 1; t < T; ++t) activity.active.col(t) = activity.active.col(hi);
  }
  auto it = std::find(activity.speakers.begin(), activity.speakers.end(),
                      segment.speaker);
  if (it == activity.speakers.end())
    throw Error("speaker " + segment.speaker + " has no RTTM segment in " +
                segment.recording);
  const Eigen::Index target = it - activity.speakers.begin();

  EmResult em = EmFit(spec, activity, config.em);
  SpatialCovariances cov = EstimateSpatialCovariances(spec, em.masks, target);
  BeamformerWeights bw =
      MvdrSouden(cov.target, cov.noise, config.ref_channel, config.loading);
  Spectrogram enhanced = Beamform(spec, bw);
  if (config.post_mask) {
    for (Eigen::Index f = 0; f < enhanced.bins(); ++f) {
      RealVector gain =
          em.masks.bin(f).row(target).transpose().cwiseMax(config.mask_floor);
      enhanced.bin(f).row(0) =
          enhanced.bin(f).row(0).cwiseProduct(gain.transpose().cast<Complex>());
    }
  }
  AudioBuffer out = TrimmedIstft(enhanced, padding);
  return out.Slice(start - cut_begin, length);
}

}  // namespace incar
