// cluster.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_CLUSTER_H_
#define INCAR_CLUSTER_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "incar/core.h"
#include "incar/rttm.h"

namespace incar {

// Speaker embeddings, one row per segment.
struct EmbeddingSet {
  RealMatrix vectors;        // N x dim
  RttmSegmentList segments;  // parallel to rows; speaker fields unused

  void Validate() const;
};

// Binary container, little-endian:
//   "EMB1" | uint32 N | uint32 dim | N*dim float32 row-major |
//   N newline-terminated keys "<recording> <onset> <duration>"
EmbeddingSet ReadEmbeddings(std::istream &is);
EmbeddingSet ReadEmbeddings(const std::string &path);
void WriteEmbeddings(std::ostream &os, const EmbeddingSet &set);
void WriteEmbeddings(const std::string &path, const EmbeddingSet &set);

struct ClusterConfig {
  int max_speakers = 8;
  std::optional<int> num_speakers;  // skips the eigengap estimate
  double prune_keep = 0.2;          // fraction of each affinity row kept
  int kmeans_restarts = 10;
  int kmeans_iterations = 100;
  uint64_t seed = 0;
};

// Spectral clustering on cosine affinities: per-row top-p pruning,
// symmetrization, normalized Laplacian, eigengap speaker count, seeded
// k-means++ on row-normalized eigenvectors. Labels are 0..k-1, numbered
// in order of first appearance.
std::vector<int> SpectralCluster(const RealMatrix &embeddings,
                                 const ClusterConfig &config = {});

// Adds "spk<label>" speakers to the embedding segments and merges
// touching same-speaker segments.
RttmSegmentList LabelSegments(const EmbeddingSet &set, const std::vector<int> &labels);

}  // namespace incar

#endif  // INCAR_CLUSTER_H_
