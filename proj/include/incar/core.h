// core.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_CORE_H_
#define INCAR_CORE_H_

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace incar {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<double>;
using RealVector = Vector<double>;
using ComplexMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;
using Point3 = Eigen::Vector3d;

// Data and precondition failures. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of an external hook command. The CLI maps these to exit code 3.
class HookError : public Error {
 public:
  using Error::Error;
};

// Multi-channel time-domain signal, one row per channel.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(RealMatrix samples, int sample_rate);
  AudioBuffer(Eigen::Index channels, Eigen::Index num_samples,
              int sample_rate);

  static AudioBuffer Mono(const RealVector &samples, int sample_rate);

  Eigen::Index channels() const { return samples_.rows(); }
  Eigen::Index num_samples() const { return samples_.cols(); }
  int sample_rate() const { return sample_rate_; }
  double duration() const {
    return static_cast<double>(num_samples()) / sample_rate_;
  }

  const RealMatrix &samples() const { return samples_; }
  RealMatrix &samples() { return samples_; }

  auto channel(Eigen::Index c) const { return samples_.row(c); }
  auto channel(Eigen::Index c) { return samples_.row(c); }

  // Mono buffer holding channel c.
  AudioBuffer Channel(Eigen::Index c) const;
  // Samples [begin, begin + count) of every channel; out-of-range
  // samples are zero.
  AudioBuffer Slice(Eigen::Index begin, Eigen::Index count) const;

  // Mean power over all channels and samples.
  double Power() const;
  double Energy() const { return samples_.squaredNorm(); }

 private:
  void Validate() const;

  RealMatrix samples_{1, 0};
  int sample_rate_ = 16000;
};

}  // namespace incar

#endif  // INCAR_CORE_H_
