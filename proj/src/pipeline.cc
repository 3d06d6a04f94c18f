// pipeline.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "incar/log.h"
#include "incar/wav.h"

namespace incar {

namespace fs = std::filesystem;

void ParallelFor(size_t n, int workers, const std::function<void(size_t)> &fn) {
  const size_t threads = std::min<size_t>(std::max(workers, 1), n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

AugmentConfig AugmentConfig::Default() {
  CabinPreset cabin = DefaultCabin();
  AugmentConfig cfg;
  cfg.room = cabin.room;
  cfg.seats = cabin.seats;
  cfg.microphones = cabin.microphones;
  return cfg;
}

namespace {

AudioBuffer MatchChannels(const AudioBuffer &noise, Eigen::Index channels) {
  if (noise.channels() == channels) return noise;
  if (noise.channels() != 1)
    throw Error("noise has " + std::to_string(noise.channels()) + " channels, need 1 or " +
                std::to_string(channels));
  RealMatrix tiled = noise.samples().replicate(channels, 1);
  return AudioBuffer(std::move(tiled), noise.sample_rate());
}

std::string Join(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

Manifest AugmentCorpus(const Manifest &input, const std::vector<AudioBuffer> &noise_pool,
                       const AugmentConfig &config) {
  if (input.empty()) return {};
  if (noise_pool.empty()) throw Error("noise pool is empty");
  if (config.seats.empty()) throw Error("no source seats configured");
  if (config.speed_factors.empty()) throw Error("no speed factors configured");
  if (config.snr_high_db < config.snr_low_db) throw Error("SNR range is inverted");
  if (config.output_dir.empty()) throw Error("augmentation needs an output directory");
  ValidateManifest(input, false);
  for (double f : config.speed_factors)
    if (f < 0.5 || f > 2.0) throw Error("speed factor out of [0.5, 2]");

  const ScenePlacement placement{config.seats, config.microphones};
  const auto bank = RirBank(config.room, placement);  // shared by every entry
  const Eigen::Index mics = static_cast<Eigen::Index>(config.microphones.size());
  std::vector<AudioBuffer> noises;
  for (const auto &n : noise_pool) {
    if (n.sample_rate() != config.room.sample_rate)
      throw Error("noise sample rate differs from the room sample rate");
    noises.push_back(MatchChannels(n, mics));
  }
  fs::create_directories(config.output_dir);

  std::vector<std::optional<ManifestEntry>> out(input.size());
  ParallelFor(input.size(), config.workers, [&](size_t i) {
    const ManifestEntry &entry = input[i];
    std::seed_seq seq{static_cast<uint32_t>(config.seed), static_cast<uint32_t>(config.seed >> 32),
                      static_cast<uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const double speed = config.speed_factors[std::uniform_int_distribution<size_t>(
        0, config.speed_factors.size() - 1)(rng)];
    const size_t seat = std::uniform_int_distribution<size_t>(0, config.seats.size() - 1)(rng);
    const size_t noise = std::uniform_int_distribution<size_t>(0, noises.size() - 1)(rng);
    const double snr = std::uniform_real_distribution<double>(config.snr_low_db,
                                                               config.snr_high_db)(rng);
    const uint64_t mix_seed = rng();

    AudioBuffer clean;
    try {
      clean = LoadEntryAudio(entry);
      if (clean.channels() != 1) throw Error("close-talk audio must be mono");
      if (clean.sample_rate() != config.room.sample_rate)
        throw Error("sample rate " + std::to_string(clean.sample_rate()) +
                    " differs from the room");
      if (clean.Energy() == 0.0) throw Error("audio is silent");
    } catch (const Error &e) {
      INCAR_LOG << "skipping " << entry.id << ": " << e.what();
      return;
    }
    if (config.music_filter && LooksLikeMusic(clean, config.music)) {
      INCAR_LOG << "dropping " << entry.id << ": music-like spectrum";
      return;
    }

    AudioBuffer perturbed = SpeedPerturb(clean, speed);
    std::vector<std::vector<ImpulseResponse>> one{bank[seat]};
    // The reverberant tail is cut so the output keeps the perturbed length.
    AudioBuffer image = SourceImages(one, {perturbed})[0].Slice(0, perturbed.num_samples());
    MixResult mix = MixAtSnr(image, noises[noise], snr,
                             MixOptions{.random_offset = true, .loop_noise = true,
                                        .seed = mix_seed});

    ManifestEntry e;
    e.id = entry.id;
    e.path = Join(config.output_dir, entry.id + ".wav");
    e.duration = mix.mixture.duration();
    e.speaker = entry.speaker;
    e.transcription = entry.transcription;
    e.meta["source"] = entry.id;
    e.meta["speed"] = speed;
    e.meta["seat"] = seat;
    e.meta["noise"] = noise;
    e.meta["snr_db"] = snr;
    e.meta["gain"] = mix.gain;
    WriteWav(e.path, mix.mixture, WavFormat::kFloat32);
    if (config.write_components) {
      WriteWav(Join(config.output_dir, entry.id + ".image.wav"), image, WavFormat::kFloat32);
      WriteWav(Join(config.output_dir, entry.id + ".noise.wav"), mix.scaled_noise,
               WavFormat::kFloat32);
    }
    out[i] = std::move(e);
  });

  Manifest result;
  for (auto &e : out)
    if (e) result.push_back(std::move(*e));
  return result;
}

std::string SelectCandidate(
    const std::vector<std::pair<std::string, std::optional<double>>> &scores) {
  std::string best = "gss";
  std::optional<double> best_score;
  for (const auto &[tag, s] : scores)
    if (tag == "gss") best_score = s;
  for (const auto &[tag, s] : scores) {
    if (!s || tag == "gss") continue;
    if (!best_score || *s > *best_score) {
      best = tag;
      best_score = s;
    }
  }
  return best;
}

namespace {

std::string RecordingOf(const ManifestEntry &e) {
  if (e.meta.contains("recording")) return e.meta["recording"].get<std::string>();
  return fs::path(e.path).stem().string();
}

// Whole-file reads shared between utterances of one recording.
class RecordingCache {
 public:
  const AudioBuffer &Get(const std::string &path) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(path);
    if (it == cache_.end()) it = cache_.emplace(path, ReadWav(path)).first;
    return it->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::string, AudioBuffer> cache_;
};

}  // namespace

Track1Output Track1Infer(const Manifest &eval, const RttmSegmentList &rttm,
                         const Scorer &scorer, const Track1Config &config) {
  ValidateManifest(eval, true);
  if (!config.output_dir.empty()) fs::create_directories(config.output_dir);
  RecordingCache cache;
  Track1Output out;
  out.selection.resize(eval.size());
  out.audio.resize(eval.size());

  ParallelFor(eval.size(), config.workers, [&](size_t i) {
    const ManifestEntry &entry = eval[i];
    const AudioBuffer &recording = cache.Get(entry.path);
    if (entry.duration <= 0.0) throw Error("utterance " + entry.id + " needs a duration");
    RttmSegment seg{RecordingOf(entry), entry.speaker, entry.onset, entry.duration};

    std::vector<std::pair<std::string, AudioBuffer>> candidates;
    candidates.emplace_back("gss", GssEnhance(recording, rttm, seg, config.gss));
    if (config.use_iva) {
      const int fs = recording.sample_rate();
      AudioBuffer span = recording.Slice(std::llround(seg.onset * fs),
                                         std::llround(seg.duration * fs));
      try {
        std::vector<AudioBuffer> iva = IvaEnhance(span, config.iva);
        for (size_t n = 0; n < iva.size(); ++n)
          candidates.emplace_back("iva-" + std::to_string(n), std::move(iva[n]));
      } catch (const Error &e) {
        INCAR_WARN << "IVA failed for " << entry.id << ": " << e.what();
      }
    }

    std::vector<std::pair<std::string, std::optional<double>>> scores;
    for (const auto &[tag, audio] : candidates) {
      std::optional<double> s;
      try {
        s = scorer(entry.id, tag, audio);
      } catch (const std::exception &e) {
        INCAR_WARN << "scorer threw for " << entry.id << "/" << tag << ": " << e.what();
      }
      if (s && !std::isfinite(*s)) s.reset();
      scores.emplace_back(tag, s);
    }
    const std::string chosen = SelectCandidate(scores);
    bool scored = false;
    nlohmann::ordered_json table = nlohmann::ordered_json::object();
    for (const auto &[tag, s] : scores) {
      if (s) {
        scored = true;
        table[tag] = *s;
      } else {
        table[tag] = nullptr;
      }
    }
    if (!scored) INCAR_WARN << "utterance " << entry.id << " is unscored; emitting GSS";

    ManifestEntry sel = entry;
    sel.onset = 0.0;
    sel.meta["recording"] = seg.recording;
    sel.meta["onset"] = entry.onset;
    sel.meta["selected"] = chosen;
    sel.meta["scored"] = scored;
    sel.meta["scores"] = table;
    for (auto &[tag, audio] : candidates) {
      if (tag != chosen) continue;
      sel.duration = audio.duration();
      if (!config.output_dir.empty()) {
        sel.path = Join(config.output_dir, entry.id + ".wav");
        WriteWav(sel.path, audio, WavFormat::kFloat32);
      }
      out.audio[i] = std::move(audio);
    }
    out.selection[i] = std::move(sel);
  });
  return out;
}

namespace {

// Enhances each segment; segments GSS cannot process yield empty buffers.
std::vector<AudioBuffer> EnhanceAll(const AudioBuffer &audio, const RttmSegmentList &rttm,
                                    const Track2Config &config) {
  std::vector<AudioBuffer> out(rttm.size());
  ParallelFor(rttm.size(), config.workers, [&](size_t i) {
    const Eigen::Index n = std::llround(rttm[i].duration * audio.sample_rate());
    if (n < config.gss.stft.window_length()) {
      INCAR_WARN << "segment " << rttm[i].speaker << " at " << rttm[i].onset
                 << " s is shorter than one STFT window; not enhanced";
      out[i] = AudioBuffer(1, 0, audio.sample_rate());
      return;
    }
    out[i] = GssEnhance(audio, rttm, rttm[i], config.gss);
  });
  return out;
}

}  // namespace

Track2Result Track2Pipeline(const AudioBuffer &audio, const std::string &recording,
                            const std::optional<RttmSegmentList> &rttm1,
                            const std::optional<EmbeddingSet> &embeddings,
                            const Denoiser &denoise_hook, const Track2Config &config) {
  if (config.refinement_passes < 0) throw Error("refinement passes must be non-negative");
  Track2Result result;
  if (rttm1) {
    for (const auto &s : *rttm1)
      if (s.recording == recording) result.rttm1.push_back(s);
    if (!rttm1->empty() && result.rttm1.empty())
      throw Error("recording " + recording + " not found in RTTM");
  } else if (embeddings) {
    EmbeddingSet set = *embeddings;
    set.Validate();
    RttmSegmentList labeled = LabelSegments(set, SpectralCluster(set.vectors, config.cluster));
    for (const auto &s : labeled)
      if (s.recording == recording) result.rttm1.push_back(s);
  } else {
    throw Error("no diarization source");
  }
  SortRttm(&result.rttm1);

  RttmSegmentList current = result.rttm1;
  std::vector<AudioBuffer> enhanced = EnhanceAll(audio, current, config);
  result.first_pass = enhanced;
  for (int pass = 0; pass < config.refinement_passes; ++pass) {
    std::vector<std::vector<Interval>> speech(current.size());
    ParallelFor(current.size(), config.workers, [&](size_t i) {
      if (enhanced[i].num_samples() == 0) return;  // no speech evidence
      AudioBuffer clean;
      if (denoise_hook) {
        try {
          clean = denoise_hook(enhanced[i]);
        } catch (const Error &e) {
          INCAR_WARN << "denoise hook failed, using spectral gating: " << e.what();
        }
      }
      if (clean.num_samples() == 0) clean = SpectralGateDenoise(enhanced[i], config.denoise);
      for (Interval r : EnergyVad(clean, config.vad)) {
        r.begin += current[i].onset;
        r.end += current[i].onset;
        speech[i].push_back(r);
      }
    });
    current = RefineSegments(current, speech, config.refine);
    enhanced = EnhanceAll(audio, current, config);
  }
  result.rttm2 = current;
  result.final_pass = std::move(enhanced);
  return result;
}

}  // namespace incar
