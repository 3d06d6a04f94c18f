// iva.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Auxiliary-function independent vector analysis with iterative
// projection updates and a spherical Laplacian source model.

#ifndef INCAR_IVA_H_
#define INCAR_IVA_H_

#include <vector>

#include "incar/core.h"
#include "incar/stft.h"

namespace incar {

struct DemixingState {
  std::vector<ComplexMatrix> W;  // per bin, D x D; row n demixes source n
  std::vector<std::vector<ComplexMatrix>> V;  // [n][f] weighted covariances
  RealMatrix r;  // D x T source activations sqrt(sum_f |y|^2)
};

struct AuxIvaConfig {
  int iterations = 30;
  double r_floor = 1e-8;
};

struct AuxIvaResult {
  Spectrogram demixed;
  DemixingState state;
  // Objective before the first and after every iteration.
  std::vector<double> objective;
};

// Negative log-likelihood surrogate minimized by AuxIVA:
// (2/T) sum_{n,t} G(r_nt) - 2 sum_f log|det W_f|, with G(r) = r above
// r_floor and its quadratic continuation below it.
double IvaObjective(const Spectrogram &mixture,
                    const std::vector<ComplexMatrix> &W, double r_floor);

// W starts at identity. Throws for fewer than two channels or fewer
// frames than channels.
AuxIvaResult AuxIva(const Spectrogram &mixture, const AuxIvaConfig &config = {});

// Rescales source n by (W_f^-1)[ref, n] so the sources sum to the
// reference channel.
Spectrogram ProjectionBack(const Spectrogram &demixed,
                           const DemixingState &state, Eigen::Index ref_channel);

struct IvaConfig {
  StftConfig stft = StftConfig::Default();
  AuxIvaConfig aux;
  Eigen::Index ref_channel = 0;
};

// One mono stream per channel, sorted by descending energy.
std::vector<AudioBuffer> IvaEnhance(const AudioBuffer &audio,
                                    const IvaConfig &config = {});

}  // namespace incar

#endif  // INCAR_IVA_H_
