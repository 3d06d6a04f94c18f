// signal_test.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "incar/signal.h"
#include "incar/stft.h"
#include "incar/wav.h"
#include "oracles.h"
#include "testing.h"

namespace incar {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Direct DFT of one analysis frame, bin k.
Complex DirectDftBin(const RealVector &x, const RealVector &window, Eigen::Index start,
                     int fft, int k) {
  Complex acc = 0.0;
  for (Eigen::Index n = 0; n < window.size(); ++n)
    acc += x(start + n) * window(n) *
           std::polar(1.0, -2.0 * std::numbers::pi * k * n / fft);
  return acc;
}

TEST(StftConfigTest, RejectsBadGeometry) {
  EXPECT_THROW(StftConfig(512, 0, 512), Error);
  EXPECT_THROW(StftConfig(512, 600, 1024), Error);
  EXPECT_THROW(StftConfig(1024, 256, 512), Error);
  // sqrt-Hann squared is Hann, which is not COLA at hop 3/4 L.
  EXPECT_THROW(StftConfig(1024, 768, 1024), Error);
  EXPECT_NO_THROW(StftConfig(512, 128, 1024, WindowType::kHann));
}

TEST(StftTest, FrameCountAndShortInput) {
  const StftConfig cfg(512, 128, 512);
  const AudioBuffer a(1, 2000, 16000);
  EXPECT_EQ(Stft(a, cfg).frames(), (2000 - 512) / 128 + 1);
  EXPECT_EQ(Stft(a, cfg).bins(), 257);
  try {
    Stft(AudioBuffer(1, 511, 16000), cfg);
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("too short"), std::string::npos);
  }
}

TEST(StftTest, ZeroInZeroOut) {
  const StftConfig cfg = StftConfig::Default();
  Spectrogram s = Stft(AudioBuffer(2, 5000, 16000), cfg);
  for (Eigen::Index f = 0; f < s.bins(); ++f) EXPECT_EQ(s.bin(f).norm(), 0.0);
  EXPECT_EQ(Istft(s).samples().norm(), 0.0);
  EXPECT_EQ(Istft(s).num_samples(), cfg.SignalLength(s.frames()));
}

TEST(StftTest, BinCenteredSinusoidMatchesDirectDft) {
  const StftConfig cfg(512, 128, 512);
  const int k = 37;
  RealVector x(4096);
  for (Eigen::Index n = 0; n < x.size(); ++n)
    x(n) = std::cos(2.0 * std::numbers::pi * k * n / 512.0 + 0.3);
  Spectrogram s = Stft(AudioBuffer::Mono(x, 16000), cfg);
  for (Eigen::Index t = 0; t < s.frames(); ++t) {
    Eigen::Index peak = 0;
    double best = -1.0;
    for (Eigen::Index f = 0; f < s.bins(); ++f)
      if (std::abs(s.at(0, t, f)) > best) {
        best = std::abs(s.at(0, t, f));
        peak = f;
      }
    EXPECT_EQ(peak, k);
  }
  for (int f : {0, k - 1, k, k + 1, 200}) {
    const Complex oracle = DirectDftBin(x, cfg.window(), 3 * 128, 512, f);
    EXPECT_NEAR(std::abs(s.at(0, 3, f) - oracle), 0.0, 1e-9);
  }
}

TEST(StftTest, Linearity) {
  std::mt19937_64 rng(3);
  const StftConfig cfg(256, 64, 256);
  RealMatrix a(2, 3000), b(2, 3000);
  for (int c = 0; c < 2; ++c) {
    a.row(c) = testing::WhiteNoise(3000, rng).transpose();
    b.row(c) = testing::WhiteNoise(3000, rng).transpose();
  }
  Spectrogram sa = Stft(AudioBuffer(a, 8000), cfg), sb = Stft(AudioBuffer(b, 8000), cfg);
  Spectrogram sab = Stft(AudioBuffer(a + 2.0 * b, 8000), cfg);
  for (Eigen::Index f = 0; f < sa.bins(); ++f)
    EXPECT_LT((sab.bin(f) - sa.bin(f) - 2.0 * sb.bin(f)).norm(), 1e-10);
}

TEST(StftTest, SingleFrameIsLocal) {
  const StftConfig cfg(256, 64, 256);
  Spectrogram s(1, 10, cfg, 16000);
  for (Eigen::Index f = 0; f < s.bins(); ++f) s.at(0, 4, f) = Complex(1.0, 0.5);
  AudioBuffer y = Istft(s);
  for (Eigen::Index i = 0; i < y.num_samples(); ++i)
    if (i < 4 * 64 || i >= 4 * 64 + 256) {
      EXPECT_EQ(y.samples()(0, i), 0.0) << i;
    }
}

TEST(StftTest, PaddedRoundTripIsExactEverywhere) {
  std::mt19937_64 rng(5);
  const StftConfig cfg = StftConfig::Default();
  RealVector x = testing::WhiteNoise(7777, rng);
  AnalysisPadding pad;
  Spectrogram s = PaddedStft(AudioBuffer::Mono(x, 16000), cfg, &pad);
  AudioBuffer y = TrimmedIstft(s, pad);
  ASSERT_EQ(y.num_samples(), 7777);
  EXPECT_LT((y.samples().row(0).transpose() - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SiSdrTest, Sentinels) {
  std::mt19937_64 rng(1);
  RealVector s = testing::WhiteNoise(1000, rng);
  EXPECT_EQ(SiSdr(s, (2.0 * s).eval()).value_db, kInf);
  RealVector a = RealVector::Zero(4), b = RealVector::Zero(4);
  a << 1, 0, 0, 0;
  b << 0, 1, 0, 0;
  EXPECT_EQ(SiSdr(a, b).value_db, -kInf);
  EXPECT_THROW(SiSdr(RealVector::Zero(4).eval(), b), Error);
  EXPECT_THROW(SiSdr(a, RealVector::Zero(5).eval()), Error);
}

TEST(SiSdrTest, MatchesDirectFormulaAndIsScaleInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    RealVector s = testing::WhiteNoise(1000, rng);
    RealVector e = s + 0.5 * testing::WhiteNoise(1000, rng);
    const double v = SiSdr(s, e).value_db;
    EXPECT_NEAR(v, testing::SiSdrOracle(s, e), 1e-6);
    EXPECT_NEAR(SiSdr(s, (c(rng) * e).eval()).value_db, v, 1e-9);
  }
}

TEST(SiSdrTest, AudioOverloadRequiresMono) {
  AudioBuffer a(2, 100, 16000);
  EXPECT_THROW(SiSdr(a, a), Error);
}

TEST(MixTest, EqualPowerAtZeroDbHasUnitGain) {
  RealVector c(4), n(4);
  c << 1, -1, 1, -1;
  n << -1, 1, 1, -1;
  MixResult r = MixAtSnr(AudioBuffer::Mono(c, 8000), AudioBuffer::Mono(n, 8000), 0.0);
  EXPECT_DOUBLE_EQ(r.gain, 1.0);
}

TEST(MixTest, ReachesRequestedSnr) {
  std::mt19937_64 rng(2);
  for (double snr : {-5.0, 0.0, 5.0, 10.0, 20.0}) {
    AudioBuffer clean = AudioBuffer::Mono(testing::WhiteNoise(4000, rng, 0.3), 16000);
    AudioBuffer noise = AudioBuffer::Mono(testing::WhiteNoise(9000, rng, 2.0), 16000);
    MixResult r = MixAtSnr(clean, noise, snr, {.random_offset = true, .seed = 9});
    const double measured = PowerDb(clean.Power()) - PowerDb(r.scaled_noise.Power());
    EXPECT_NEAR(measured, snr, 0.01);
    EXPECT_LT((r.mixture.samples() - clean.samples() - r.scaled_noise.samples()).norm(), 1e-12);
  }
}

TEST(MixTest, Errors) {
  std::mt19937_64 rng(2);
  AudioBuffer clean = AudioBuffer::Mono(testing::WhiteNoise(100, rng), 16000);
  AudioBuffer shortn = AudioBuffer::Mono(testing::WhiteNoise(50, rng), 16000);
  EXPECT_THROW(MixAtSnr(clean, AudioBuffer(1, 200, 16000), 5.0), Error);
  EXPECT_THROW(MixAtSnr(AudioBuffer(1, 100, 16000), shortn, 5.0), Error);
  EXPECT_THROW(MixAtSnr(clean, shortn, 5.0), Error);
  EXPECT_NO_THROW(MixAtSnr(clean, shortn, 5.0, {.loop_noise = true}));
  EXPECT_THROW(MixAtSnr(clean, AudioBuffer::Mono(testing::WhiteNoise(100, rng), 8000), 5.0),
               Error);
}

TEST(SpeedPerturbTest, IdentityAndLengths) {
  std::mt19937_64 rng(4);
  AudioBuffer a = AudioBuffer::Mono(testing::WhiteNoise(16000, rng), 16000);
  EXPECT_EQ(SpeedPerturb(a, 1.0).samples(), a.samples());
  EXPECT_NEAR(SpeedPerturb(a, 1.1).num_samples(), 14545, 1);
  EXPECT_NEAR(SpeedPerturb(a, 0.9).num_samples(), 17778, 1);
  EXPECT_THROW(SpeedPerturb(a, 0.49), Error);
  EXPECT_THROW(SpeedPerturb(a, 2.01), Error);
}

TEST(SpeedPerturbTest, ScalesToneFrequency) {
  // A 1 kHz tone sped up by 1.1 becomes 1.1 kHz.
  RealVector x(16000);
  for (Eigen::Index n = 0; n < x.size(); ++n) x(n) = std::sin(2.0 * std::numbers::pi * 1000.0 * n / 16000.0);
  AudioBuffer y = SpeedPerturb(AudioBuffer::Mono(x, 16000), 1.1);
  const Eigen::Index m = 4096;
  RealVector seg = y.samples().row(0).segment(4000, m).transpose();
  double best = 0.0;
  int peak = 0;
  for (int k = 200; k < 400; ++k) {
    Complex acc = 0.0;
    for (Eigen::Index n = 0; n < m; ++n) acc += seg(n) * std::polar(1.0, -2.0 * std::numbers::pi * k * n / m);
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      peak = k;
    }
  }
  EXPECT_NEAR(peak * 16000.0 / m, 1100.0, 16000.0 / m);
}

TEST(SpecAugmentTest, DegenerateDeterministicAndBounded) {
  EXPECT_TRUE(SpecAugmentMasks(100, 80, {}).all());
  SpecAugmentPolicy p{2, 10, 2, 8, 42};
  BinaryMask a = SpecAugmentMasks(100, 80, p), b = SpecAugmentMasks(100, 80, p);
  EXPECT_TRUE((a == b).all());
  int zero_rows = 0, zero_cols = 0;
  for (Eigen::Index t = 0; t < 100; ++t) zero_rows += !a.row(t).any();
  for (Eigen::Index f = 0; f < 80; ++f) zero_cols += !a.col(f).any();
  EXPECT_LE(zero_rows, 20);
  EXPECT_LE(zero_cols, 16);
  // Every masked cell lies in a fully masked row or column.
  for (Eigen::Index t = 0; t < 100; ++t)
    for (Eigen::Index f = 0; f < 80; ++f)
      if (!a(t, f)) {
        EXPECT_TRUE(!a.row(t).any() || !a.col(f).any());
      }
  EXPECT_THROW(SpecAugmentMasks(5, 80, {1, 6, 0, 0, 1}), Error);
}

TEST(FlatnessTest, NoiseToneSilence) {
  std::mt19937_64 rng(8);
  double noise = 0.0, tone = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    RealVector n = testing::WhiteNoise(8192, rng);
    RealVector t(8192);
    const double f = 300.0 + 20.0 * seed;
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = std::sin(2.0 * std::numbers::pi * f * i / 16000.0);
    auto mean = [](const std::vector<double> &v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / v.size();
    };
    noise += mean(SpectralFlatness(AudioBuffer::Mono(n, 16000), 512)) / 50;
    tone += mean(SpectralFlatness(AudioBuffer::Mono(t, 16000), 512)) / 50;
  }
  EXPECT_GT(noise, 0.5);
  EXPECT_LT(tone, 0.1);
  for (double v : SpectralFlatness(AudioBuffer(1, 2048, 16000), 512)) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(SpectralFlatness(AudioBuffer(1, 2048, 16000), 32), Error);
}

TEST(MusicFilterTest, SilenceAndToneAreNotMusic) {
  RealVector t(16000);
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0);
  EXPECT_FALSE(LooksLikeMusic(AudioBuffer(1, 16000, 16000), {}));
  EXPECT_FALSE(LooksLikeMusic(AudioBuffer::Mono(t, 16000), {}));
}

TEST(FftConvolveTest, MatchesDirectSum) {
  std::mt19937_64 rng(6);
  RealVector a = testing::WhiteNoise(37, rng), b = testing::WhiteNoise(100, rng);
  RealVector c = FftConvolve(a, b);
  ASSERT_EQ(c.size(), 136);
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    double d = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k)
      if (n - k >= 0 && n - k < b.size()) d += a(k) * b(n - k);
    EXPECT_NEAR(c(n), d, 1e-10);
  }
}

TEST(WavTest, RoundTripsBothFormats) {
  std::mt19937_64 rng(7);
  RealMatrix x(3, 500);
  for (int c = 0; c < 3; ++c) x.row(c) = (0.3 * testing::WhiteNoise(500, rng)).transpose();
  x = x.cwiseMax(-0.99).cwiseMin(0.99);
  const AudioBuffer a(x, 22050);
  for (WavFormat fmt : {WavFormat::kPcm16, WavFormat::kFloat32}) {
    std::stringstream ss;
    WriteWav(ss, a, fmt);
    AudioBuffer b = ReadWav(ss);
    EXPECT_EQ(b.sample_rate(), 22050);
    ASSERT_EQ(b.channels(), 3);
    ASSERT_EQ(b.num_samples(), 500);
    EXPECT_LT((b.samples() - x).cwiseAbs().maxCoeff(),
              fmt == WavFormat::kPcm16 ? 1.0 / 32767 : 1e-7);
  }
  std::stringstream bad("RIFFxxxxJUNK");
  EXPECT_THROW(ReadWav(bad), Error);
  EXPECT_THROW(CheckSameRate(a, AudioBuffer(1, 1, 16000)), Error);
}

TEST(AudioBufferTest, Invariants) {
  RealMatrix x(1, 3);
  x << 0.0, std::nan(""), 1.0;
  EXPECT_THROW(AudioBuffer(x, 16000), Error);
  EXPECT_THROW(AudioBuffer(RealMatrix(0, 3), 16000), Error);
  EXPECT_THROW(AudioBuffer(1, 3, 0), Error);
  AudioBuffer a = AudioBuffer::Mono(RealVector::Ones(4), 16000);
  AudioBuffer s = a.Slice(2, 4);
  EXPECT_EQ(s.samples()(0, 1), 1.0);
  EXPECT_EQ(s.samples()(0, 2), 0.0);
}

}  // namespace
}  // namespace incar
