// signal.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/signal.h"

#include <algorithm>
#include <numbers>
#include <random>

#include <unsupported/Eigen/FFT>

#include "incar/wav.h"

namespace incar {

SiSdrBreakdown SiSdr(const AudioBuffer &reference,
                     const AudioBuffer &estimate) {
  if (reference.channels() != 1 || estimate.channels() != 1)
    throw Error("SI-SDR expects mono buffers");
  CheckSameRate(reference, estimate);
  return SiSdr(reference.samples(), estimate.samples());
}

MixResult MixAtSnr(const AudioBuffer &clean, const AudioBuffer &noise,
                   double snr_db, const MixOptions &options) {
  CheckSameRate(clean, noise);
  if (clean.channels() != noise.channels())
    throw Error("clean and noise channel counts differ");
  const Eigen::Index n = clean.num_samples();
  if (noise.num_samples() == 0) throw Error("noise is empty");
  if (noise.num_samples() < n && !options.loop_noise)
    throw Error("noise shorter than clean signal");

  Eigen::Index offset = 0;
  if (options.random_offset) {
    std::mt19937_64 rng(options.seed);
    Eigen::Index span = noise.num_samples() >= n ? noise.num_samples() - n
                                                 : noise.num_samples() - 1;
    offset = std::uniform_int_distribution<Eigen::Index>(0, span)(rng);
  }
  RealMatrix segment(noise.channels(), n);
  for (Eigen::Index i = 0; i < n; ++i)
    segment.col(i) = noise.samples().col((offset + i) % noise.num_samples());

  const double p_clean = clean.Power();
  const double p_noise =
      n == 0 ? 0.0 : segment.squaredNorm() / static_cast<double>(segment.size());
  if (p_clean == 0.0) throw Error("clean signal is silent");
  if (p_noise == 0.0) throw Error("noise segment is silent");

  MixResult out;
  out.gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  out.scaled_noise = AudioBuffer(out.gain * segment, clean.sample_rate());
  out.mixture = AudioBuffer(clean.samples() + out.scaled_noise.samples(),
                            clean.sample_rate());
  return out;
}

namespace {

// Best rational approximation num/den of x with den <= max_den.
std::pair<int64_t, int64_t> Rationalize(double x, int64_t max_den) {
  int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(v);
    int64_t ai = static_cast<int64_t>(a);
    int64_t q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    int64_t p2 = ai * p1 + p0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = v - a;
    if (frac < 1e-12) break;
    v = 1.0 / frac;
  }
  return {p1, q1};
}

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double Blackman(double u) {  // u in [-1, 1]
  if (std::abs(u) >= 1.0) return 0.0;
  return 0.42 + 0.5 * std::cos(std::numbers::pi * u) +
         0.08 * std::cos(2.0 * std::numbers::pi * u);
}

constexpr int kResampleTaps = 64;

}  // namespace

AudioBuffer SpeedPerturb(const AudioBuffer &audio, double factor) {
  if (!(factor >= 0.5 && factor <= 2.0))
    throw Error("speed factor must lie in [0.5, 2.0]");
  if (factor == 1.0) return audio;

  const auto [num, den] = Rationalize(factor, 1000);
  const Eigen::Index in_len = audio.num_samples();
  const Eigen::Index out_len =
      static_cast<Eigen::Index>(std::llround(in_len / factor));
  const double cutoff = std::min(1.0, 1.0 / factor);
  constexpr int half = kResampleTaps / 2;

  // Polyphase table: one 64-tap row per fractional input position.
  RealMatrix table(den, kResampleTaps);
  for (int64_t phase = 0; phase < den; ++phase) {
    double frac = static_cast<double>(phase) / den;
    for (int j = 0; j < kResampleTaps; ++j) {
      double x = (j - half + 1) - frac;
      table(phase, j) = cutoff * Sinc(cutoff * x) * Blackman(x / half);
    }
  }

  RealMatrix out = RealMatrix::Zero(audio.channels(), out_len);
  for (Eigen::Index m = 0; m < out_len; ++m) {
    const int64_t pos = m * num;
    const Eigen::Index base = pos / den;
    const int64_t phase = pos % den;
    for (int j = 0; j < kResampleTaps; ++j) {
      Eigen::Index k = base + j - half + 1;
      if (k < 0 || k >= in_len) continue;
      out.col(m) += table(phase, j) * audio.samples().col(k);
    }
  }
  return AudioBuffer(std::move(out), audio.sample_rate());
}

BinaryMask SpecAugmentMasks(Eigen::Index frames, Eigen::Index features,
                            const SpecAugmentPolicy &policy) {
  if (policy.max_time_width < 0 || policy.max_freq_width < 0 ||
      policy.max_time_width > frames || policy.max_freq_width > features)
    throw Error("SpecAugment mask width does not fit the feature shape");
  BinaryMask mask = BinaryMask::Constant(frames, features, true);
  std::mt19937_64 rng(policy.seed);
  auto band = [&rng](Eigen::Index axis, int max_width) {
    int width = std::uniform_int_distribution<int>(1, max_width)(rng);
    Eigen::Index start =
        std::uniform_int_distribution<Eigen::Index>(0, axis - width)(rng);
    return std::pair<Eigen::Index, int>(start, width);
  };
  if (policy.max_time_width > 0) {
    for (int i = 0; i < policy.num_time_masks; ++i) {
      auto [start, width] = band(frames, policy.max_time_width);
      mask.middleRows(start, width).setConstant(false);
    }
  }
  if (policy.max_freq_width > 0) {
    for (int i = 0; i < policy.num_freq_masks; ++i) {
      auto [start, width] = band(features, policy.max_freq_width);
      mask.middleCols(start, width).setConstant(false);
    }
  }
  return mask;
}

std::vector<double> SpectralFlatness(const AudioBuffer &audio, int frame) {
  if (frame < 64) throw Error("spectral flatness frame must be >= 64 samples");
  RealVector mono = audio.samples().colwise().mean().transpose();
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(frame);
  std::vector<Complex> spec;
  std::vector<double> flatness;
  for (Eigen::Index start = 0; start + frame <= mono.size(); start += frame) {
    for (int n = 0; n < frame; ++n) {
      double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / frame);
      buf[n] = mono(start + n) * w;
    }
    fft.fwd(spec, buf);
    // DC and Nyquist are excluded; they are real-valued and skew the mean.
    const size_t lo = 1, hi = spec.size() - 1;
    double arith = 0.0;
    for (size_t k = lo; k < hi; ++k) arith += std::norm(spec[k]);
    arith /= static_cast<double>(hi - lo);
    if (arith <= 1e-20) {
      flatness.push_back(1.0);
      continue;
    }
    double log_sum = 0.0;
    for (size_t k = lo; k < hi; ++k)
      log_sum += std::log(std::norm(spec[k]) + 1e-12 * arith);
    double geo = std::exp(log_sum / static_cast<double>(hi - lo));
    flatness.push_back(std::clamp(geo / arith, 0.0, 1.0));
  }
  return flatness;
}

bool LooksLikeMusic(const AudioBuffer &audio, const MusicFilterConfig &config) {
  std::vector<double> sf = SpectralFlatness(audio, config.frame);
  if (sf.empty()) return false;
  double mean = 0.0;
  for (double v : sf) mean += v;
  mean /= static_cast<double>(sf.size());
  return mean >= config.flatness_lo && mean <= config.flatness_hi &&
         PowerDb(audio.Power()) > config.energy_threshold_db;
}

RealVector FftConvolve(const RealVector &a, const RealVector &b) {
  if (a.size() == 0 || b.size() == 0) return RealVector();
  const Eigen::Index n = a.size() + b.size() - 1;
  Eigen::Index nfft = 1;
  while (nfft < n) nfft <<= 1;
  std::vector<double> pa(nfft, 0.0), pb(nfft, 0.0);
  std::copy(a.data(), a.data() + a.size(), pa.begin());
  std::copy(b.data(), b.data() + b.size(), pb.begin());
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<Complex> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  std::vector<double> out;
  fft.inv(out, fa, nfft);
  return Eigen::Map<RealVector>(out.data(), n);
}

}  // namespace incar
