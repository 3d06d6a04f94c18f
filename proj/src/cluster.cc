// cluster.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/cluster.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace incar {

// The container is little-endian and is read and written in host order.
static_assert(std::endian::native == std::endian::little);

void EmbeddingSet::Validate() const {
  if (vectors.rows() < 1) throw Error("embedding set is empty");
  if (static_cast<size_t>(vectors.rows()) != segments.size())
    throw Error("embedding rows and segment keys differ in count");
  if (!vectors.allFinite()) throw Error("embedding set has non-finite values");
}

EmbeddingSet ReadEmbeddings(std::istream &is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "EMB1", 4) != 0)
    throw Error("not an embedding container (bad magic)");
  uint32_t n = 0, dim = 0;
  is.read(reinterpret_cast<char *>(&n), 4);
  is.read(reinterpret_cast<char *>(&dim), 4);
  if (!is) throw Error("truncated embedding header");
  if (n == 0 || dim == 0) throw Error("embedding container has zero size");
  std::vector<float> raw(static_cast<size_t>(n) * dim);
  is.read(reinterpret_cast<char *>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!is) throw Error("truncated embedding matrix");
  EmbeddingSet set;
  set.vectors.resize(n, dim);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < dim; ++j) set.vectors(i, j) = raw[i * dim + j];
  std::string line;
  while (set.segments.size() < n && std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    RttmSegment seg;
    if (!(ls >> seg.recording >> seg.onset >> seg.duration))
      throw Error("bad embedding key: " + line);
    set.segments.push_back(seg);
  }
  set.Validate();
  return set;
}

EmbeddingSet ReadEmbeddings(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return ReadEmbeddings(is);
}

void WriteEmbeddings(std::ostream &os, const EmbeddingSet &set) {
  set.Validate();
  os.write("EMB1", 4);
  uint32_t n = static_cast<uint32_t>(set.vectors.rows());
  uint32_t dim = static_cast<uint32_t>(set.vectors.cols());
  os.write(reinterpret_cast<const char *>(&n), 4);
  os.write(reinterpret_cast<const char *>(&dim), 4);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < dim; ++j) {
      float v = static_cast<float>(set.vectors(i, j));
      os.write(reinterpret_cast<const char *>(&v), 4);
    }
  char buf[96];
  for (const auto &seg : set.segments) {
    std::snprintf(buf, sizeof(buf), " %.3f %.3f\n", seg.onset, seg.duration);
    os << seg.recording << buf;
  }
}

void WriteEmbeddings(const std::string &path, const EmbeddingSet &set) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  WriteEmbeddings(os, set);
}

namespace {

struct KMeansFit {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansFit KMeans(const RealMatrix &points, int k, int iterations, uint64_t seed) {
  const Eigen::Index n = points.rows();
  std::mt19937_64 rng(seed);
  RealMatrix centers(k, points.cols());
  // k-means++ seeding.
  centers.row(0) = points.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  RealVector d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      for (pick = 0; pick < n - 1; ++pick) {
        acc += d2(pick);
        if (acc >= u) break;
      }
    } else {
      pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    }
    centers.row(c) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  KMeansFit fit;
  fit.labels.assign(n, 0);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (fit.labels[i] != best || it == 0) changed = changed || fit.labels[i] != best;
      fit.labels[i] = static_cast<int>(best);
    }
    RealMatrix sums = RealMatrix::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(fit.labels[i]) += points.row(i);
      ++counts[fit.labels[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
    if (!changed && it > 0) break;
  }
  fit.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    fit.inertia += (points.row(i) - centers.row(fit.labels[i])).squaredNorm();
  return fit;
}

std::vector<int> Canonical(const std::vector<int> &labels) {
  std::vector<int> map(labels.size() + 1, -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    int &m = map[labels[i]];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

}  // namespace

std::vector<int> SpectralCluster(const RealMatrix &embeddings,
                                 const ClusterConfig &config) {
  const Eigen::Index n = embeddings.rows();
  if (n < 1) throw Error("no embeddings to cluster");
  if (!embeddings.allFinite()) throw Error("embeddings contain non-finite values");
  if (config.num_speakers && (*config.num_speakers < 1 || *config.num_speakers > n))
    throw Error("requested speaker count " + std::to_string(*config.num_speakers) +
                " is outside [1, " + std::to_string(n) + "]");
  if (n == 1) return {0};

  RealVector norms = embeddings.rowwise().norm();
  if ((norms.array() == 0.0).any()) throw Error("zero-norm embedding");
  RealMatrix unit = norms.cwiseInverse().asDiagonal() * embeddings;
  RealMatrix affinity = (unit * unit.transpose()).cwiseMax(0.0);

  // Keep the largest entries of each row (ties broken by index). The
  // diagonal always ranks first, so at least one neighbor is kept too.
  const Eigen::Index keep = std::max<Eigen::Index>(
      2, static_cast<Eigen::Index>(std::llround(config.prune_keep * n)));
  RealMatrix pruned = RealMatrix::Zero(n, n);
  std::vector<Eigen::Index> idx(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
      return affinity(i, a) > affinity(i, b);
    });
    for (Eigen::Index j = 0; j < keep; ++j) pruned(i, idx[j]) = affinity(i, idx[j]);
    pruned(i, i) = affinity(i, i);
  }
  RealMatrix sym = 0.5 * (pruned + pruned.transpose());

  RealVector inv_sqrt_deg = sym.rowwise().sum().cwiseSqrt().cwiseInverse();
  RealMatrix laplacian = RealMatrix::Identity(n, n) -
                         inv_sqrt_deg.asDiagonal() * sym * inv_sqrt_deg.asDiagonal();
  laplacian = 0.5 * (laplacian + laplacian.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(laplacian);
  const RealVector &lambda = eig.eigenvalues();

  int k = 1;
  if (config.num_speakers) {
    k = *config.num_speakers;
  } else {
    const Eigen::Index m = std::min<Eigen::Index>(config.max_speakers, n - 1);
    double best_gap = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double gap = lambda(i + 1) - lambda(i);
      if (gap > best_gap) {
        best_gap = gap;
        k = static_cast<int>(i + 1);
      }
    }
  }
  if (k == 1) return std::vector<int>(n, 0);

  RealMatrix spectral = eig.eigenvectors().leftCols(k);
  RealVector rn = spectral.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i)
    if (rn(i) > 0.0) spectral.row(i) /= rn(i);

  KMeansFit best;
  for (int r = 0; r < std::max(1, config.kmeans_restarts); ++r) {
    KMeansFit fit = KMeans(spectral, k, config.kmeans_iterations,
                           config.seed + static_cast<uint64_t>(r) * 7919u);
    if (fit.inertia < best.inertia - 1e-12) best = std::move(fit);
  }
  return Canonical(best.labels);
}

RttmSegmentList LabelSegments(const EmbeddingSet &set, const std::vector<int> &labels) {
  if (labels.size() != set.segments.size())
    throw Error("label count does not match embedding segments");
  RttmSegmentList out = set.segments;
  for (size_t i = 0; i < out.size(); ++i) out[i].speaker = "spk" + std::to_string(labels[i]);
  return MergeSpeakerSegments(out);
}

}  // namespace incar
