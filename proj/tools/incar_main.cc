// incar_main.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Batch command-line front end. Exit codes: 0 success, 1 usage,
// 2 data error, 3 hook error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "incar/cluster.h"
#include "incar/config.h"
#include "incar/der.h"
#include "incar/hooks.h"
#include "incar/iva.h"
#include "incar/log.h"
#include "incar/manifest.h"
#include "incar/pipeline.h"
#include "incar/refine.h"
#include "incar/report.h"
#include "incar/room.h"
#include "incar/rttm.h"
#include "incar/vad.h"
#include "incar/wav.h"

namespace fs = std::filesystem;
using namespace incar;

namespace {

struct Common {
  std::string config_path;
  uint64_t seed = 0;
  int workers = 1;
  std::string hook_asr;
  std::string hook_denoise;

  KeyValueConfig Config() const {
    if (config_path.empty()) return KeyValueConfig();
    KeyValueConfig c = KeyValueConfig::Load(config_path);
    for (const auto &key : c.Keys())
      if (!kKnownKeys.contains(key)) INCAR_WARN << config_path << ": unknown key '" << key << "'";
    return c;
  }

  // Every key read by some subcommand.
  inline static const std::set<std::string> kKnownKeys{
      "stft.window", "stft.hop", "stft.fft", "stft.window_type",
      "gss.iterations", "gss.epsilon", "gss.context", "gss.activity_context",
      "gss.post_mask", "gss.mask_floor", "gss.loading", "gss.ref_channel",
      "iva.iterations", "iva.ref_channel",
      "vad.frame", "vad.threshold_db", "vad.hangover", "vad.min_speech", "vad.min_silence",
      "vad.floor_rise_db", "vad.floor_percentile",
      "refine.min_duration", "refine.gap_merge",
      "der.collar", "der.resolution",
      "cluster.max_speakers", "cluster.num_speakers", "cluster.prune_keep", "cluster.restarts",
      "denoise.gain_floor", "denoise.low_fraction",
      "augment.snr_low", "augment.snr_high", "augment.speed_factors", "augment.music_filter",
      "augment.write_components",
      "track1.use_iva", "track2.passes",
      "room.dims", "room.absorption", "room.max_order", "room.speed_of_sound",
      "room.sample_rate", "source", "mic"};
};

StftConfig StftFrom(const KeyValueConfig &c) {
  const StftConfig d = StftConfig::Default();
  return StftConfig(c.GetInt("stft.window", static_cast<int>(d.window_length())),
                    c.GetInt("stft.hop", static_cast<int>(d.hop())),
                    c.GetInt("stft.fft", static_cast<int>(d.fft_size())),
                    c.Get("stft.window_type", "sqrt_hann") == "hann" ? WindowType::kHann
                                                                     : WindowType::kSqrtHann);
}

GssConfig GssFrom(const KeyValueConfig &c, uint64_t seed) {
  GssConfig g;
  g.stft = StftFrom(c);
  g.em.iterations = c.GetInt("gss.iterations", g.em.iterations);
  g.em.epsilon = c.GetDouble("gss.epsilon", g.em.epsilon);
  g.context_seconds = c.GetDouble("gss.context", g.context_seconds);
  g.activity_context_seconds = c.GetDouble("gss.activity_context", g.activity_context_seconds);
  g.post_mask = c.GetBool("gss.post_mask", g.post_mask);
  g.mask_floor = c.GetDouble("gss.mask_floor", g.mask_floor);
  g.loading = c.GetDouble("gss.loading", g.loading);
  g.ref_channel = c.GetInt("gss.ref_channel", static_cast<int>(g.ref_channel));
  g.seed = seed;
  return g;
}

IvaConfig IvaFrom(const KeyValueConfig &c) {
  IvaConfig v;
  v.stft = StftFrom(c);
  v.aux.iterations = c.GetInt("iva.iterations", v.aux.iterations);
  v.ref_channel = c.GetInt("iva.ref_channel", static_cast<int>(v.ref_channel));
  return v;
}

VadConfig VadFrom(const KeyValueConfig &c) {
  VadConfig v;
  v.frame = c.GetDouble("vad.frame", v.frame);
  v.energy_threshold_db = c.GetDouble("vad.threshold_db", v.energy_threshold_db);
  v.hangover = c.GetInt("vad.hangover", v.hangover);
  v.min_speech = c.GetDouble("vad.min_speech", v.min_speech);
  v.min_silence = c.GetDouble("vad.min_silence", v.min_silence);
  v.floor_rise_db = c.GetDouble("vad.floor_rise_db", v.floor_rise_db);
  v.floor_percentile = c.GetDouble("vad.floor_percentile", v.floor_percentile);
  v.Validate();
  return v;
}

RefineConfig RefineFrom(const KeyValueConfig &c) {
  RefineConfig r;
  r.min_duration = c.GetDouble("refine.min_duration", r.min_duration);
  r.gap_merge = c.GetDouble("refine.gap_merge", r.gap_merge);
  return r;
}

DerConfig DerFrom(const KeyValueConfig &c) {
  DerConfig d;
  d.collar = c.GetDouble("der.collar", d.collar);
  d.resolution = c.GetDouble("der.resolution", d.resolution);
  return d;
}

ClusterConfig ClusterFrom(const KeyValueConfig &c, uint64_t seed) {
  ClusterConfig k;
  k.max_speakers = c.GetInt("cluster.max_speakers", k.max_speakers);
  if (c.Has("cluster.num_speakers")) k.num_speakers = c.GetInt("cluster.num_speakers", 0);
  k.prune_keep = c.GetDouble("cluster.prune_keep", k.prune_keep);
  k.kmeans_restarts = c.GetInt("cluster.restarts", k.kmeans_restarts);
  k.seed = seed;
  return k;
}

DenoiseConfig DenoiseFrom(const KeyValueConfig &c) {
  DenoiseConfig d;
  d.stft = StftFrom(c);
  d.gain_floor = c.GetDouble("denoise.gain_floor", d.gain_floor);
  d.low_fraction = c.GetDouble("denoise.low_fraction", d.low_fraction);
  return d;
}

std::string SegmentName(const RttmSegment &s) {
  const long long onset_ms = std::llround(s.onset * 1000.0);
  const long long end_ms = std::llround(s.end() * 1000.0);
  return s.recording + "-" + s.speaker + "-" + std::to_string(onset_ms) + "-" +
         std::to_string(end_ms);
}

void WriteText(const std::string &path, const std::string &text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp);
    os << text;
  }
  fs::rename(tmp, path);
}

std::pair<std::string, std::string> SplitNamed(const std::string &arg) {
  const size_t eq = arg.find('=');
  if (eq == std::string::npos) return {fs::path(arg).stem().string(), arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::vector<double> ReadValues(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::logic_error &) {
      throw Error("bad number '" + tok + "' in " + path);
    }
  }
  return v;
}

void WriteReport(const SessionReport &report, const std::string &json_path,
                 const std::string &text_path) {
  const std::string text = RenderText(report);
  const std::string json = ReportToJson(report).dump(2) + "\n";
  if (!text_path.empty()) WriteText(text_path, text);
  if (!json_path.empty()) WriteText(json_path, json);
  if (text_path.empty() && json_path.empty()) std::cout << text;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multi-channel in-car speech front end"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "random seed");
  app.add_option("--workers", common.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--hook-asr", common.hook_asr, "ASR scoring command with {in} and {out}");
  app.add_option("--hook-denoise", common.hook_denoise, "denoising command with {in} and {out}");

  std::function<void()> run;

  // rir
  auto *rir = app.add_subcommand("rir", "write impulse responses for a room config");
  std::string rir_out;
  rir->add_option("--out-dir", rir_out)->required();
  rir->callback([&] {
    run = [&] {
      RoomSpec room;
      ScenePlacement placement;
      RoomFromConfig(common.Config(), &room, &placement);
      auto bank = RirBank(room, placement);
      fs::create_directories(rir_out);
      for (size_t s = 0; s < bank.size(); ++s)
        for (size_t m = 0; m < bank[s].size(); ++m)
          WriteWav((fs::path(rir_out) / ("rir_s" + std::to_string(s) + "_m" +
                                         std::to_string(m) + ".wav")).string(),
                   AudioBuffer::Mono(bank[s][m].taps, bank[s][m].sample_rate),
                   WavFormat::kFloat32);
    };
  });

  // simulate
  auto *sim = app.add_subcommand("simulate", "far-field scene from dry sources");
  std::vector<std::string> sim_dry;
  std::string sim_out;
  sim->add_option("--dry", sim_dry, "one mono WAV per source")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out)->required();
  sim->callback([&] {
    run = [&] {
      RoomSpec room;
      ScenePlacement placement;
      RoomFromConfig(common.Config(), &room, &placement);
      std::vector<AudioBuffer> dry;
      for (const auto &p : sim_dry) dry.push_back(ReadWav(p));
      if (dry.size() < placement.sources.size()) placement.sources.resize(dry.size());
      WriteWav(sim_out, SimulateScene(room, placement, dry), WavFormat::kFloat32);
    };
  });

  // augment
  auto *aug = app.add_subcommand("augment", "simulate a far-field training corpus");
  std::string aug_manifest, aug_out_dir, aug_out_manifest;
  std::vector<std::string> aug_noise;
  aug->add_option("--manifest", aug_manifest)->required()->check(CLI::ExistingFile);
  aug->add_option("--noise", aug_noise, "noise WAV (repeatable)")->required()->check(CLI::ExistingFile);
  aug->add_option("--out-dir", aug_out_dir)->required();
  aug->add_option("--out-manifest", aug_out_manifest)->required();
  aug->callback([&] {
    run = [&] {
      const KeyValueConfig c = common.Config();
      AugmentConfig cfg = AugmentConfig::Default();
      ScenePlacement placement{cfg.seats, cfg.microphones};
      RoomFromConfig(c, &cfg.room, &placement);
      cfg.seats = placement.sources;
      cfg.microphones = placement.microphones;
      cfg.snr_low_db = c.GetDouble("augment.snr_low", cfg.snr_low_db);
      cfg.snr_high_db = c.GetDouble("augment.snr_high", cfg.snr_high_db);
      if (c.Has("augment.speed_factors")) cfg.speed_factors = c.GetDoubles("augment.speed_factors");
      cfg.music_filter = c.GetBool("augment.music_filter", cfg.music_filter);
      cfg.write_components = c.GetBool("augment.write_components", cfg.write_components);
      cfg.seed = common.seed;
      cfg.workers = common.workers;
      cfg.output_dir = aug_out_dir;
      std::vector<AudioBuffer> noise;
      for (const auto &p : aug_noise) noise.push_back(ReadWav(p));
      WriteManifest(aug_out_manifest, AugmentCorpus(ReadManifest(aug_manifest), noise, cfg));
    };
  });

  // gss
  auto *gss = app.add_subcommand("gss", "guided source separation of every RTTM segment");
  std::string gss_audio, gss_rttm, gss_out, gss_rec, gss_segments;
  gss->add_option("--audio", gss_audio)->required()->check(CLI::ExistingFile);
  gss->add_option("--rttm", gss_rttm)->required()->check(CLI::ExistingFile);
  gss->add_option("--recording", gss_rec, "recording id (default: audio file stem)");
  gss->add_option("--segments", gss_segments,
                  "RTTM of the segments to enhance (default: every segment of the recording)")
      ->check(CLI::ExistingFile);
  gss->add_option("--out-dir", gss_out)->required();
  gss->callback([&] {
    run = [&] {
      const GssConfig cfg = GssFrom(common.Config(), common.seed);
      const AudioBuffer audio = ReadWav(gss_audio);
      const std::string rec = gss_rec.empty() ? fs::path(gss_audio).stem().string() : gss_rec;
      RttmSegmentList rttm = LoadRttm(gss_rttm), mine;
      for (const auto &s : gss_segments.empty() ? rttm : LoadRttm(gss_segments))
        if (s.recording == rec) mine.push_back(s);
      if (mine.empty()) throw Error("recording " + rec + " not found in RTTM");
      fs::create_directories(gss_out);
      ParallelFor(mine.size(), common.workers, [&](size_t i) {
        WriteWav((fs::path(gss_out) / (SegmentName(mine[i]) + ".wav")).string(),
                 GssEnhance(audio, rttm, mine[i], cfg), WavFormat::kFloat32);
      });
    };
  });

  // iva
  auto *iva = app.add_subcommand("iva", "blind separation with AuxIVA");
  std::string iva_audio, iva_out;
  iva->add_option("--audio", iva_audio)->required()->check(CLI::ExistingFile);
  iva->add_option("--out-dir", iva_out)->required();
  iva->callback([&] {
    run = [&] {
      auto outputs = IvaEnhance(ReadWav(iva_audio), IvaFrom(common.Config()));
      fs::create_directories(iva_out);
      for (size_t n = 0; n < outputs.size(); ++n)
        WriteWav((fs::path(iva_out) / ("iva-" + std::to_string(n) + ".wav")).string(),
                 outputs[n], WavFormat::kFloat32);
    };
  });

  // vad
  auto *vad = app.add_subcommand("vad", "energy VAD, written as RTTM");
  std::string vad_audio, vad_out, vad_rec;
  int vad_channel = 0;
  vad->add_option("--audio", vad_audio)->required()->check(CLI::ExistingFile);
  vad->add_option("--channel", vad_channel);
  vad->add_option("--recording", vad_rec);
  vad->add_option("--out", vad_out, "RTTM path (default: stdout)");
  vad->callback([&] {
    run = [&] {
      const AudioBuffer audio = ReadWav(vad_audio);
      if (vad_channel < 0 || vad_channel >= audio.channels()) throw Error("channel out of range");
      const std::string rec = vad_rec.empty() ? fs::path(vad_audio).stem().string() : vad_rec;
      RttmSegmentList out;
      for (const auto &r : EnergyVad(audio.Channel(vad_channel), VadFrom(common.Config())))
        out.push_back({rec, "speech", r.begin, r.length()});
      if (vad_out.empty())
        std::cout << SerializeRttm(out);
      else
        SaveRttm(vad_out, out);
    };
  });

  // cluster
  auto *clu = app.add_subcommand("cluster", "spectral clustering of segment embeddings");
  std::string clu_emb, clu_out;
  std::optional<int> clu_k;
  clu->add_option("--embeddings", clu_emb)->required()->check(CLI::ExistingFile);
  clu->add_option("--num-speakers", clu_k);
  clu->add_option("--out", clu_out, "RTTM path (default: stdout)");
  clu->callback([&] {
    run = [&] {
      ClusterConfig cfg = ClusterFrom(common.Config(), common.seed);
      if (clu_k) cfg.num_speakers = clu_k;
      const EmbeddingSet set = ReadEmbeddings(clu_emb);
      const RttmSegmentList out = LabelSegments(set, SpectralCluster(set.vectors, cfg));
      if (clu_out.empty())
        std::cout << SerializeRttm(out);
      else
        SaveRttm(clu_out, out);
    };
  });

  // der
  auto *der = app.add_subcommand("der", "diarization error rate");
  std::string der_ref, der_hyp;
  std::optional<double> der_collar, der_res;
  der->add_option("--ref", der_ref)->required()->check(CLI::ExistingFile);
  der->add_option("--hyp", der_hyp)->required()->check(CLI::ExistingFile);
  der->add_option("--collar", der_collar);
  der->add_option("--resolution", der_res);
  der->callback([&] {
    run = [&] {
      DerConfig cfg = DerFrom(common.Config());
      if (der_collar) cfg.collar = *der_collar;
      if (der_res) cfg.resolution = *der_res;
      SessionReport report;
      report.der.push_back({fs::path(der_hyp).stem().string(),
                            ScoreDer(LoadRttm(der_ref), LoadRttm(der_hyp), cfg)});
      std::cout << RenderText(report);
    };
  });

  // refine
  auto *ref = app.add_subcommand("refine", "trim RTTM segments to VAD speech");
  std::string ref_rttm, ref_vad, ref_out;
  ref->add_option("--rttm", ref_rttm)->required()->check(CLI::ExistingFile);
  ref->add_option("--vad", ref_vad, "VAD regions as RTTM")->required()->check(CLI::ExistingFile);
  ref->add_option("--out", ref_out, "RTTM path (default: stdout)");
  ref->callback([&] {
    run = [&] {
      VadRegions regions;
      const RttmSegmentList rttm = LoadRttm(ref_rttm);
      for (const auto &r : Recordings(rttm)) regions[r];
      for (const auto &s : LoadRttm(ref_vad)) regions[s.recording].push_back({s.onset, s.end()});
      const RttmSegmentList out = RefineRttm(rttm, regions, RefineFrom(common.Config()));
      if (ref_out.empty())
        std::cout << SerializeRttm(out);
      else
        SaveRttm(ref_out, out);
    };
  });

  // track1
  auto *t1 = app.add_subcommand("track1", "GSS/IVA enhancement with ASR score fusion");
  std::string t1_manifest, t1_rttm, t1_out;
  t1->add_option("--manifest", t1_manifest)->required()->check(CLI::ExistingFile);
  t1->add_option("--rttm", t1_rttm)->required()->check(CLI::ExistingFile);
  t1->add_option("--out-dir", t1_out)->required();
  t1->callback([&] {
    run = [&] {
      const KeyValueConfig c = common.Config();
      if (common.hook_asr.empty()) throw CLI::RequiredError("--hook-asr");
      const HookSpec hook = HookSpec::Parse(common.hook_asr);
      Track1Config cfg;
      cfg.gss = GssFrom(c, common.seed);
      cfg.iva = IvaFrom(c);
      cfg.use_iva = c.GetBool("track1.use_iva", true);
      cfg.workers = common.workers;
      cfg.output_dir = (fs::path(t1_out) / "audio").string();
      const std::string work = (fs::path(t1_out) / "hook").string();
      fs::create_directories(work);
      Track1Output out = Track1Infer(ReadManifest(t1_manifest), LoadRttm(t1_rttm),
                                     HookScorer(hook, work), cfg);
      WriteManifest((fs::path(t1_out) / "selection.jsonl").string(), out.selection);
    };
  });

  // track2
  auto *t2 = app.add_subcommand("track2", "two-pass diarization refinement with GSS");
  std::string t2_audio, t2_rttm, t2_emb, t2_ref, t2_out, t2_rec;
  t2->add_option("--audio", t2_audio)->required()->check(CLI::ExistingFile);
  t2->add_option("--recording", t2_rec, "recording id (default: audio file stem)");
  t2->add_option("--rttm", t2_rttm, "first-pass RTTM")->check(CLI::ExistingFile);
  t2->add_option("--embeddings", t2_emb, "segment embeddings")->check(CLI::ExistingFile);
  t2->add_option("--reference", t2_ref, "reference RTTM for scoring")->check(CLI::ExistingFile);
  t2->add_option("--out-dir", t2_out)->required();
  t2->callback([&] {
    run = [&] {
      const KeyValueConfig c = common.Config();
      Track2Config cfg;
      cfg.gss = GssFrom(c, common.seed);
      cfg.vad = VadFrom(c);
      cfg.refine = RefineFrom(c);
      cfg.denoise = DenoiseFrom(c);
      cfg.cluster = ClusterFrom(c, common.seed);
      cfg.refinement_passes = c.GetInt("track2.passes", cfg.refinement_passes);
      cfg.workers = common.workers;
      const std::string rec = t2_rec.empty() ? fs::path(t2_audio).stem().string() : t2_rec;
      std::optional<RttmSegmentList> rttm1;
      std::optional<EmbeddingSet> emb;
      if (!t2_rttm.empty()) rttm1 = LoadRttm(t2_rttm);
      if (!t2_emb.empty()) emb = ReadEmbeddings(t2_emb);
      fs::create_directories(fs::path(t2_out) / "segments");
      Denoiser hook;
      if (!common.hook_denoise.empty()) {
        const std::string work = (fs::path(t2_out) / "hook").string();
        fs::create_directories(work);
        hook = HookDenoiser(HookSpec::Parse(common.hook_denoise), work);
      }
      const AudioBuffer audio = ReadWav(t2_audio);
      const Track2Result result = Track2Pipeline(audio, rec, rttm1, emb, hook, cfg);
      SaveRttm((fs::path(t2_out) / "rttm1.rttm").string(), result.rttm1);
      SaveRttm((fs::path(t2_out) / "rttm2.rttm").string(), result.rttm2);
      for (size_t i = 0; i < result.rttm2.size(); ++i) {
        if (result.final_pass[i].num_samples() == 0) continue;
        WriteWav((fs::path(t2_out) / "segments" / (SegmentName(result.rttm2[i]) + ".wav")).string(),
                 result.final_pass[i], WavFormat::kFloat32);
      }
      SessionReport report;
      if (!t2_ref.empty()) {
        const DerConfig dc = DerFrom(c);
        const RttmSegmentList reference = LoadRttm(t2_ref);
        report.der.push_back({"rttm1", ScoreDer(reference, result.rttm1, dc)});
        report.der.push_back({"rttm2", ScoreDer(reference, result.rttm2, dc)});
      }
      WriteReport(report, (fs::path(t2_out) / "report.json").string(),
                  (fs::path(t2_out) / "report.txt").string());
    };
  });

  // report
  auto *rep = app.add_subcommand("report", "DER table and SI-SDR summaries");
  std::string rep_ref, rep_json, rep_text;
  std::vector<std::string> rep_hyp, rep_sdr;
  rep->add_option("--reference", rep_ref)->check(CLI::ExistingFile);
  rep->add_option("--hyp", rep_hyp, "[name=]hypothesis.rttm (repeatable)");
  rep->add_option("--sisdr", rep_sdr, "[name=]values.txt, one dB value per line (repeatable)");
  rep->add_option("--json", rep_json);
  rep->add_option("--text", rep_text);
  rep->callback([&] {
    run = [&] {
      SessionReport report;
      if (!rep_hyp.empty()) {
        if (rep_ref.empty()) throw CLI::RequiredError("--reference");
        const DerConfig dc = DerFrom(common.Config());
        const RttmSegmentList reference = LoadRttm(rep_ref);
        for (const auto &h : rep_hyp) {
          auto [name, path] = SplitNamed(h);
          report.der.push_back({name, ScoreDer(reference, LoadRttm(path), dc)});
        }
      }
      for (const auto &s : rep_sdr) {
        auto [name, path] = SplitNamed(s);
        report.si_sdr.push_back(SummarizeSiSdr(name, ReadValues(path)));
      }
      WriteReport(report, rep_json, rep_text);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (run) run();
  } catch (const CLI::Error &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const HookError &e) {
    std::cerr << "hook error: " << e.what() << "\n";
    return 3;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
