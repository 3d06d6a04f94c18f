// diarization_test.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "incar/cluster.h"
#include "incar/der.h"
#include "incar/refine.h"
#include "incar/rttm.h"
#include "incar/vad.h"
#include "testing.h"

namespace incar {
namespace {

using testing::BestPermutationAccuracy;
using testing::GaussianClusters;
using testing::OracleDer;

using testing::RandomRttm;

TEST(Rttm, EmptyInput) { EXPECT_TRUE(ParseRttmString("").empty()); }

TEST(Rttm, GrammarCase) {
  auto r = ParseRttmString("SPEAKER rec1 1 1.00 2.50 <NA> <NA> spkA <NA> <NA>\n");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].recording, "rec1");
  EXPECT_EQ(r[0].speaker, "spkA");
  EXPECT_EQ(r[0].onset, 1.0);
  EXPECT_EQ(r[0].duration, 2.5);
  EXPECT_EQ(SerializeRttm(r), "SPEAKER rec1 1 1.00 2.50 <NA> <NA> spkA <NA> <NA>\n");
}

TEST(Rttm, SkipsUnknownTypesAndComments) {
  auto r = ParseRttmString(
      ";; comment\n"
      "SPKR-INFO rec1 1 <NA> <NA> <NA> unknown spkA <NA> <NA>\n"
      "\n"
      "SPEAKER rec1 1 0.50 1.00 <NA> <NA> spkA <NA> <NA>\n");
  EXPECT_EQ(r.size(), 1u);
}

TEST(Rttm, ErrorsCarryLineNumbers) {
  try {
    ParseRttmString("SPEAKER a 1 0.00 1.00 <NA> <NA> x <NA> <NA>\nSPEAKER a 1 0.00\n");
    FAIL() << "expected a parse error";
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  try {
    ParseRttmString("SPEAKER a 1 0.00 -1.00 <NA> <NA> x <NA> <NA>\n");
    FAIL() << "expected a parse error";
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseRttmString("SPEAKER a 1 zero 1.00 <NA> <NA> x <NA> <NA>\n"), Error);
}

TEST(Rttm, RoundTripOnRandomLists) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    RttmSegmentList x = RandomRttm(rng, 3, 4, 1 + trial % 20, 100.0);
    SortRttm(&x);
    EXPECT_EQ(ParseRttmString(SerializeRttm(x)), x) << "trial " << trial;
  }
}

TEST(Rttm, MergeSpeakerSegments) {
  RttmSegmentList x{{"r", "a", 0.0, 1.0}, {"r", "a", 1.0, 1.0}, {"r", "b", 0.5, 1.0},
                    {"r", "a", 2.2, 1.0}};
  auto m = MergeSpeakerSegments(x);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], (RttmSegment{"r", "a", 0.0, 2.0}));
  EXPECT_EQ(MergeSpeakerSegments(x, 0.25).size(), 2u);
}

AudioBuffer Tone(double seconds, double begin, double end, int fs = 16000) {
  RealVector x = RealVector::Zero(std::llround(seconds * fs));
  for (Eigen::Index i = std::llround(begin * fs); i < std::llround(end * fs); ++i)
    x(i) = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / fs);
  return AudioBuffer::Mono(x, fs);
}

TEST(Vad, SilenceGivesNothing) {
  EXPECT_TRUE(EnergyVad(AudioBuffer(1, 32000, 16000)).empty());
}

TEST(Vad, ToneInSilence) {
  VadConfig cfg;
  cfg.min_speech = 0.1;
  auto regions = EnergyVad(Tone(3.0, 1.0, 2.0), cfg);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_NEAR(regions[0].begin, 1.0, cfg.frame + 1e-9);
  EXPECT_NEAR(regions[0].end, 2.0, cfg.frame + 1e-9);
}

TEST(Vad, ShortBurstIsPruned) {
  std::mt19937_64 rng(2);
  RealVector x = RealVector::Zero(32000);
  x.segment(16000, 800) = 0.3 * testing::SpeechLike(800, 16000, rng);  // 0.05 s
  VadConfig cfg;
  cfg.min_speech = 0.1;
  EXPECT_TRUE(EnergyVad(AudioBuffer::Mono(x, 16000), cfg).empty());
}

TEST(Vad, RegionsDisjointAndSorted) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RealVector x = 1e-3 * testing::WhiteNoise(16000 * 5, rng);
    for (int b = 0; b < 6; ++b) {
      const Eigen::Index s = static_cast<Eigen::Index>(u(rng) * 4.5 * 16000);
      const Eigen::Index n = static_cast<Eigen::Index>((0.02 + 0.4 * u(rng)) * 16000);
      x.segment(s, n) += 0.2 * testing::SpeechLike(n, 16000, rng);
    }
    auto regions = EnergyVad(AudioBuffer::Mono(x, 16000));
    for (size_t i = 0; i < regions.size(); ++i) {
      EXPECT_LT(regions[i].begin, regions[i].end);
      EXPECT_GE(regions[i].begin, 0.0);
      EXPECT_LE(regions[i].end, 5.0 + 1e-9);
      if (i > 0) {
        EXPECT_GT(regions[i].begin, regions[i - 1].end);
      }
    }
  }
}

TEST(Vad, ConfigValidation) {
  VadConfig bad;
  bad.frame = 0.0;
  EXPECT_THROW(EnergyVad(Tone(1.0, 0.2, 0.8), bad), Error);
  bad = VadConfig{};
  bad.hangover = -1;
  EXPECT_THROW(EnergyVad(Tone(1.0, 0.2, 0.8), bad), Error);
}

TEST(Cluster, TwoOrthogonalGroups) {
  std::mt19937_64 rng(4);
  RealMatrix e = RealMatrix::Zero(40, 8);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 4; ++j) e(i, (i < 20 ? 0 : 4) + j) = u(rng);
  auto labels = SpectralCluster(e);
  ASSERT_EQ(labels.size(), 40u);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(labels[i], i < 20 ? 0 : 1) << i;
}

TEST(Cluster, GaussianClustersRecovered) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = GaussianClusters(4, 50, 16, 5.0, rng);
    auto labels = SpectralCluster(c.points);
    EXPECT_EQ(*std::max_element(labels.begin(), labels.end()) + 1, 4);
    EXPECT_GE(BestPermutationAccuracy(c.labels, labels), 0.98);
  }
}

TEST(Cluster, IdenticalVectorsFormOneCluster) {
  RealMatrix e = RealMatrix::Ones(12, 5);
  auto labels = SpectralCluster(e);
  EXPECT_EQ(labels, std::vector<int>(12, 0));
}

TEST(Cluster, InvariantToPerVectorScaling) {
  std::mt19937_64 rng(6);
  auto c = GaussianClusters(3, 30, 10, 5.0, rng);
  RealMatrix scaled = c.points;
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) scaled.row(i) *= u(rng);
  EXPECT_EQ(SpectralCluster(c.points), SpectralCluster(scaled));
}

TEST(Cluster, GivenSpeakerCountAndErrors) {
  std::mt19937_64 rng(7);
  auto c = GaussianClusters(3, 10, 8, 5.0, rng);
  ClusterConfig cfg;
  cfg.num_speakers = 2;
  auto labels = SpectralCluster(c.points, cfg);
  EXPECT_EQ(*std::max_element(labels.begin(), labels.end()), 1);
  cfg.num_speakers = 31;
  EXPECT_THROW(SpectralCluster(c.points, cfg), Error);
  EXPECT_EQ(SpectralCluster(RealMatrix::Ones(1, 4)), std::vector<int>{0});
  RealMatrix bad = c.points;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(SpectralCluster(bad), Error);
}

TEST(Cluster, DeterministicAcrossCalls) {
  std::mt19937_64 rng(8);
  auto c = GaussianClusters(4, 20, 12, 3.0, rng);
  EXPECT_EQ(SpectralCluster(c.points), SpectralCluster(c.points));
}

TEST(Embeddings, ContainerRoundTrip) {
  std::mt19937_64 rng(9);
  EmbeddingSet set;
  set.vectors = RealMatrix::Random(5, 7);
  for (int i = 0; i < 5; ++i) set.segments.push_back({"rec", "", 1.25 * i, 1.5});
  std::stringstream ss;
  WriteEmbeddings(ss, set);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.substr(0, 4), "EMB1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 5);  // N, little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 7);  // dim
  EmbeddingSet back = ReadEmbeddings(ss);
  EXPECT_EQ(back.vectors, set.vectors.cast<float>().cast<double>());
  ASSERT_EQ(back.segments.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(back.segments[i].onset, set.segments[i].onset);
    EXPECT_EQ(back.segments[i].duration, 1.5);
  }
  std::stringstream bad("EMB2");
  EXPECT_THROW(ReadEmbeddings(bad), Error);
  std::stringstream truncated(bytes.substr(0, 20));
  EXPECT_THROW(ReadEmbeddings(truncated), Error);
}

TEST(Embeddings, LabelSegmentsMergesNeighbors) {
  EmbeddingSet set;
  set.vectors = RealMatrix::Ones(3, 2);
  set.segments = {{"r", "", 0.0, 1.0}, {"r", "", 1.0, 1.0}, {"r", "", 2.5, 1.0}};
  auto rttm = LabelSegments(set, {0, 0, 1});
  ASSERT_EQ(rttm.size(), 2u);
  EXPECT_EQ(rttm[0], (RttmSegment{"r", "spk0", 0.0, 2.0}));
  EXPECT_EQ(rttm[1].speaker, "spk1");
}

TEST(Der, IdentityIsZero) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = RandomRttm(rng, 2, 3, 10, 30.0);
    DerReport r = ScoreDer(x, x);
    EXPECT_EQ(r.der_pct, 0.0);
  }
}

TEST(Der, HandCaseMissedSpeech) {
  DerConfig cfg;
  cfg.collar = 0.0;
  DerReport r = ScoreDer({{"r", "A", 0.0, 10.0}}, {{"r", "X", 0.0, 8.0}}, cfg);
  EXPECT_NEAR(r.missed_seconds, 2.0, 1e-9);
  EXPECT_EQ(r.false_alarm_seconds, 0.0);
  EXPECT_EQ(r.confusion_seconds, 0.0);
  EXPECT_NEAR(r.der_pct, 20.0, 1e-9);
  EXPECT_EQ(r.speaker_map.at("r").at("X"), "A");
}

TEST(Der, CollarExcludesBoundaries) {
  DerConfig cfg;
  cfg.collar = 0.25;
  DerReport r = ScoreDer({{"r", "A", 1.0, 4.0}}, {{"r", "X", 1.2, 3.6}}, cfg);
  EXPECT_EQ(r.der_pct, 0.0);
  EXPECT_NEAR(r.reference_seconds, 3.5, 1e-9);
}

TEST(Der, MatchesFrameOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto ref = RandomRttm(rng, 2, 3, 8, 20.0);
    auto hyp = RandomRttm(rng, 2, 3, 8, 20.0);
    // Off-grid boundaries on half the trials.
    if (trial % 2)
      for (auto &s : hyp) s.onset += 0.003 + 0.004 * u(rng);
    const double collar = trial % 3 == 0 ? 0.0 : 0.25;
    DerConfig cfg;
    cfg.collar = collar;
    double oracle;
    try {
      oracle = OracleDer(ref, hyp, collar, 0.01);
    } catch (...) {
      continue;
    }
    if (!std::isfinite(oracle)) {
      EXPECT_THROW(ScoreDer(ref, hyp, cfg), Error);
      continue;
    }
    DerReport r = ScoreDer(ref, hyp, cfg);
    EXPECT_NEAR(r.der_pct, oracle, 0.1) << "trial " << trial;
    EXPECT_NEAR(r.der_pct, r.missed_pct + r.false_alarm_pct + r.confusion_pct, 1e-9);
    EXPECT_GE(r.missed_pct, 0.0);
    EXPECT_GE(r.false_alarm_pct, 0.0);
    EXPECT_GE(r.confusion_pct, 0.0);
  }
}

TEST(Der, HypothesisLabelNamesDoNotMatter) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto ref = RandomRttm(rng, 1, 3, 10, 20.0);
    auto hyp = RandomRttm(rng, 1, 3, 10, 20.0);
    auto renamed = hyp;
    for (auto &s : renamed) s.speaker = "z" + std::string(1, static_cast<char>('9' - s.speaker[1] + '0'));
    EXPECT_EQ(ScoreDer(ref, hyp).der_pct, ScoreDer(ref, renamed).der_pct);
  }
}

TEST(Der, EmptyReferenceIsError) {
  EXPECT_THROW(ScoreDer({}, {{"r", "A", 0.0, 1.0}}), Error);
  DerConfig cfg;
  cfg.resolution = 0.0;
  EXPECT_THROW(ScoreDer({{"r", "A", 0.0, 1.0}}, {}, cfg), Error);
}

TEST(Der, AssignmentMatchesBruteForce) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + trial % 4, cols = 1 + (trial / 4) % 4;
    RealMatrix w(rows, cols);
    for (auto &v : w.reshaped()) v = std::floor(u(rng));
    auto a = MaxWeightAssignment(w);
    double got = 0.0;
    for (int r = 0; r < rows; ++r)
      if (a[r] >= 0) got += w(r, a[r]);
    // Brute force over injective partial maps.
    std::vector<int> map(rows, -1);
    double best = 0.0;
    std::function<void(int, double)> search = [&](int r, double acc) {
      if (r == rows) {
        best = std::max(best, acc);
        return;
      }
      search(r + 1, acc);
      for (int c = 0; c < cols; ++c) {
        if (std::find(map.begin(), map.begin() + r, c) != map.begin() + r) continue;
        map[r] = c;
        search(r + 1, acc + w(r, c));
        map[r] = -1;
      }
    };
    search(0, 0.0);
    EXPECT_EQ(got, best) << "trial " << trial;
  }
}

TEST(Refine, FullCoverageIsNoOp) {
  RttmSegmentList x{{"r", "a", 0.0, 2.0}, {"r", "b", 1.0, 2.0}, {"r", "a", 2.0, 1.0}};
  auto y = RefineRttm(x, {{"r", {{0.0, 10.0}}}});
  EXPECT_EQ(y, NormalizeRttm(x));
}

TEST(Refine, IntersectionFragments) {
  auto y = RefineRttm({{"r", "a", 0.0, 10.0}}, {{"r", {{2.0, 5.0}, {7.0, 9.0}}}});
  ASSERT_EQ(y.size(), 2u);
  EXPECT_EQ(y[0], (RttmSegment{"r", "a", 2.0, 3.0}));
  EXPECT_EQ(y[1], (RttmSegment{"r", "a", 7.0, 2.0}));
}

TEST(Refine, ShortFragmentDropped) {
  RefineConfig cfg;
  cfg.min_duration = 0.1;
  auto y = RefineRttm({{"r", "a", 0.0, 10.0}}, {{"r", {{2.0, 2.08}, {5.0, 6.0}}}}, cfg);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0].onset, 5.0);
}

TEST(Refine, CloseFragmentsRejoined) {
  auto y = RefineRttm({{"r", "a", 0.0, 10.0}}, {{"r", {{2.0, 3.0}, {3.2, 4.0}}}});
  ASSERT_EQ(y.size(), 1u);
  EXPECT_NEAR(y[0].duration, 2.0, 1e-12);
}

TEST(Refine, NeverIncreasesSpeechAndIsIdempotent) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = NormalizeRttm(RandomRttm(rng, 2, 3, 12, 30.0));
    VadRegions vad;
    for (const auto &rec : {"rec0", "rec1"}) {
      double t = 0.0;
      while (t < 35.0) {
        const double b = t + 2.0 * u(rng), e = b + 0.05 + 3.0 * u(rng);
        vad[rec].push_back({b, e});
        t = e;
      }
    }
    auto once = RefineRttm(x, vad);
    auto twice = RefineRttm(once, vad);
    EXPECT_LE(TotalDuration(once), TotalDuration(x) + 1e-9) << trial;
    ASSERT_EQ(once.size(), twice.size()) << trial;
    for (size_t i = 0; i < once.size(); ++i) {
      EXPECT_EQ(once[i].speaker, twice[i].speaker);
      EXPECT_NEAR(once[i].onset, twice[i].onset, 1e-9);
      EXPECT_NEAR(once[i].duration, twice[i].duration, 1e-9);
    }
  }
}

TEST(Refine, MissingRecordingIsError) {
  EXPECT_THROW(RefineRttm({{"r", "a", 0.0, 1.0}}, {{"other", {}}}), Error);
}

}  // namespace
}  // namespace incar
