// iva.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/iva.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "packed.h"

namespace incar {

namespace {

constexpr double kMinRcond = 1e-12;

RealMatrix Activations(const Spectrogram &x, const std::vector<ComplexMatrix> &W) {
  RealMatrix power = RealMatrix::Zero(x.channels(), x.frames());
  for (Eigen::Index f = 0; f < x.bins(); ++f)
    power += W[f].lazyProduct(x.bin(f)).cwiseAbs2();
  return power.cwiseSqrt();
}

// G(r) = r for r >= floor, r^2 / (2 floor) + floor / 2 below it. Its
// weight G'(r) / r is exactly 1 / max(r, floor).
double Contrast(double r, double floor) {
  return r >= floor ? r : r * r / (2.0 * floor) + 0.5 * floor;
}

double ObjectiveFromActivations(const RealMatrix &r, const std::vector<ComplexMatrix> &W,
                                Eigen::Index frames, double r_floor) {
  double contrast = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    contrast += Contrast(r.data()[i], r_floor);
  double logdet = 0.0;
  for (const auto &w : W) logdet += std::log(std::abs(w.partialPivLu().determinant()));
  return 2.0 * contrast / static_cast<double>(frames) - 2.0 * logdet;
}

}  // namespace

double IvaObjective(const Spectrogram &mixture,
                    const std::vector<ComplexMatrix> &W, double r_floor) {
  return ObjectiveFromActivations(Activations(mixture, W), W, mixture.frames(), r_floor);
}

AuxIvaResult AuxIva(const Spectrogram &mixture, const AuxIvaConfig &config) {
  const Eigen::Index D = mixture.channels(), T = mixture.frames(),
                     F = mixture.bins();
  if (D < 2) throw Error("IVA requires at least 2 channels");
  if (T < D) throw Error("IVA requires at least as many frames as channels");

  DemixingState st;
  st.W.assign(F, ComplexMatrix::Identity(D, D));
  st.V.assign(D, std::vector<ComplexMatrix>(F, ComplexMatrix::Zero(D, D)));
  std::vector<RealMatrix> outer(F);
  for (Eigen::Index f = 0; f < F; ++f)
    outer[f] = internal::PackOuterProducts(mixture.bin(f));
  st.r = Activations(mixture, st.W);
  std::vector<double> objective{ObjectiveFromActivations(st.r, st.W, T, config.r_floor)};

  for (int it = 0; it < config.iterations; ++it) {
    // Row n of W only moves r_n, so one activation pass per sweep suffices.
    for (Eigen::Index n = 0; n < D; ++n) {
      RealVector phi = st.r.row(n).transpose().cwiseMax(config.r_floor).cwiseInverse();
      for (Eigen::Index f = 0; f < F; ++f) {
        ComplexMatrix V =
            internal::UnpackHermitian(outer[f] * phi, D) / static_cast<double>(T);
        ComplexMatrix WV = st.W[f] * V;
        Eigen::PartialPivLU<ComplexMatrix> lu(WV);
        if (!(lu.rcond() > kMinRcond)) {
          V.diagonal().array() += 1e-6 * V.trace().real() / static_cast<double>(D) + 1e-12;
          WV = st.W[f] * V;
          lu.compute(WV);
          if (!(lu.rcond() > kMinRcond))
            throw Error("IVA update is singular for source " + std::to_string(n) +
                        " at frequency bin " + std::to_string(f));
        }
        ComplexVector w = lu.solve(ComplexVector::Unit(D, n));
        double norm = std::sqrt(std::max((w.adjoint() * V * w)(0, 0).real(), 1e-300));
        w /= norm;
        st.W[f].row(n) = w.adjoint();
        st.V[n][f] = std::move(V);
      }
    }
    st.r = Activations(mixture, st.W);
    objective.push_back(ObjectiveFromActivations(st.r, st.W, T, config.r_floor));
  }

  Spectrogram demixed(D, T, mixture.config(), mixture.sample_rate());
  for (Eigen::Index f = 0; f < F; ++f) demixed.bin(f) = st.W[f].lazyProduct(mixture.bin(f));
  return AuxIvaResult{std::move(demixed), std::move(st), std::move(objective)};
}

Spectrogram ProjectionBack(const Spectrogram &demixed,
                           const DemixingState &state, Eigen::Index ref_channel) {
  const Eigen::Index D = demixed.channels();
  if (D < 2) throw Error("IVA requires at least 2 channels");
  if (ref_channel < 0 || ref_channel >= D)
    throw Error("reference channel out of range");
  if (static_cast<Eigen::Index>(state.W.size()) != demixed.bins())
    throw Error("demixing matrices do not match the bin count");
  Spectrogram out = demixed;
  for (Eigen::Index f = 0; f < demixed.bins(); ++f) {
    Eigen::PartialPivLU<ComplexMatrix> lu(state.W[f]);
    if (!(lu.rcond() > kMinRcond))
      throw Error("demixing matrix is singular at frequency bin " + std::to_string(f));
    ComplexMatrix A = lu.inverse();
    out.bin(f) = A.row(ref_channel).transpose().asDiagonal() * demixed.bin(f);
  }
  return out;
}

std::vector<AudioBuffer> IvaEnhance(const AudioBuffer &audio,
                                    const IvaConfig &config) {
  if (audio.channels() < 2) throw Error("IVA requires at least 2 channels");
  if (audio.num_samples() < config.stft.window_length())
    throw Error("audio shorter than one STFT window");
  if (audio.Energy() == 0.0) throw Error("IVA input is silent");
  AnalysisPadding padding;
  Spectrogram mix = PaddedStft(audio, config.stft, &padding);
  AuxIvaResult res = AuxIva(mix, config.aux);
  Spectrogram scaled = ProjectionBack(res.demixed, res.state, config.ref_channel);
  AudioBuffer all = TrimmedIstft(scaled, padding);

  std::vector<Eigen::Index> order(all.channels());
  std::iota(order.begin(), order.end(), 0);
  RealVector energy = all.samples().rowwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return energy(a) > energy(b);
  });
  std::vector<AudioBuffer> out;
  for (Eigen::Index n : order) out.push_back(all.Channel(n));
  return out;
}

}  // namespace incar
