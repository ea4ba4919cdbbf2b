// Copyright (c) 2026 The dubkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <set>

#include "dubkit/alignlab.hpp"
#include "dubkit/artifacts.hpp"
#include "dubkit/error.hpp"
#include "dubkit/flowcond.hpp"
#include "dubkit/formats.hpp"
#include "pipeline_internal.hpp"

namespace dubkit::pipeline {
namespace {

using detail::StageContext;

std::filesystem::path resolve(const PipelineConfig& cfg, const std::string& rel) {
  const std::filesystem::path p(rel);
  return p.is_absolute() ? p : cfg.data_root / p;
}

std::filesystem::path require_artifact(const SampleRecord& rec, const PipelineConfig& cfg,
                                       const std::string& role) {
  const auto it = rec.artifacts.find(role);
  if (it == rec.artifacts.end()) throw Error("missing artifact '" + role + "'");
  auto path = resolve(cfg, it->second);
  if (!std::filesystem::exists(path)) {
    throw Error("artifact '" + role + "' not found at " + it->second);
  }
  return path;
}

std::optional<std::filesystem::path> optional_artifact(const SampleRecord& rec, const PipelineConfig& cfg,
                                                       const std::string& role) {
  if (!rec.artifacts.count(role)) return std::nullopt;
  return require_artifact(rec, cfg, role);
}

// Writes a generated artifact and returns its manifest path.
std::string write_generated(const SampleRecord& rec, const PipelineConfig& cfg, std::string_view suffix,
                            std::string_view bytes) {
  const std::string rel = cfg.generated_dir + "/" + rec.clip_id + std::string(suffix);
  artifacts::write_file(resolve(cfg, rel), bytes);
  return rel;
}

FrameInterval to_frames(const formats::RttmSegment& s, int fps) {
  return {formats::seconds_to_frame(s.onset, fps), formats::seconds_to_frame(s.onset + s.duration, fps)};
}

std::int64_t clip_frames(const SampleRecord& rec, int fps) { return formats::seconds_to_frame(rec.duration, fps); }

void discard(SampleRecord& rec, FilterVerdict v) {
  rec.verdicts.push_back(std::move(v));
  rec.status = formats::SampleStatus::kDiscarded;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- separation-ingest / overlap-filter ---------------------------------------------

void separation_ingest(SampleRecord& rec, const StageContext& ctx) { require_artifact(rec, ctx.cfg, "vocal"); }

void overlap_stage(SampleRecord& rec, const StageContext& ctx) {
  const auto path = require_artifact(rec, ctx.cfg, ctx.cfg.overlap.role);
  std::vector<FrameInterval> spans;
  for (const auto& s : formats::parse_rttm(artifacts::read_file(path))) spans.push_back(to_frames(s, ctx.cfg.fps));
  auto v = overlap_filter(clip_frames(rec, ctx.cfg.fps), IntervalSet::normalized(std::move(spans)));
  if (v.keep) {
    rec.verdicts.push_back(std::move(v));
  } else {
    discard(rec, std::move(v));
  }
}

// --- diarize -------------------------------------------------------------------------

std::vector<std::pair<int, std::filesystem::path>> face_tracks(const SampleRecord& rec, const PipelineConfig& cfg) {
  std::vector<std::pair<int, std::filesystem::path>> out;
  constexpr std::string_view kPrefix = "face_emb.";
  for (const auto& [role, rel] : rec.artifacts) {
    if (role.rfind(kPrefix, 0) != 0) continue;
    const auto id_text = role.substr(kPrefix.size());
    int id = -1;
    try {
      std::size_t used = 0;
      id = std::stoi(id_text, &used);
      if (used != id_text.size()) id = -1;
    } catch (const std::exception&) {
    }
    if (id < 0) throw Error("artifact role '" + role + "' needs a non-negative face id");
    out.emplace_back(id, require_artifact(rec, cfg, role));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void diarize_stage(SampleRecord& rec, const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto vad = formats::parse_rttm(artifacts::read_file(require_artifact(rec, cfg, "vad")));
  std::stable_sort(vad.begin(), vad.end(), [](const auto& a, const auto& b) { return a.onset < b.onset; });
  std::vector<FrameInterval> segments;
  for (const auto& s : vad) {
    const auto f = to_frames(s, cfg.fps);
    if (f.empty()) throw Error("vad segment at " + fmt("%.3f", s.onset) + " s is shorter than one frame");
    if (!segments.empty() && f.start < segments.back().end) throw Error("vad segments overlap");
    segments.push_back(f);
  }
  if (segments.empty()) {
    discard(rec, {"diarize", false, "no speech segments", 0.0});
    return;
  }
  const Matrix emb = artifacts::read_matrix(require_artifact(rec, cfg, "spk_emb"));
  if (emb.rows() != static_cast<Eigen::Index>(segments.size())) {
    throw Error("spk_emb has " + std::to_string(emb.rows()) + " rows for " + std::to_string(segments.size()) +
                " vad segments");
  }
  Matrix affinity = diarize::cosine_affinity(emb);

  const auto tracks_meta = face_tracks(rec, cfg);
  if (!tracks_meta.empty()) {
    std::vector<Matrix> tracks;
    std::map<int, std::size_t> slot;
    for (const auto& [id, path] : tracks_meta) {
      slot[id] = tracks.size();
      tracks.push_back(artifacts::read_matrix(path));
      if (tracks.back().rows() != tracks.front().rows() || tracks.back().cols() != tracks.front().cols()) {
        throw Error("face tracks must share one shape");
      }
    }
    const auto normalized = diarize::normalize_face_embeddings(tracks);
    const auto frames = static_cast<std::size_t>(tracks.front().rows());
    const auto asd = diarize::parse_asd_scores(artifacts::read_file(require_artifact(rec, cfg, "asd")), frames);
    const auto active = diarize::select_active_speaker(asd);
    Matrix per_frame = Matrix::Zero(tracks.front().rows(), tracks.front().cols());
    std::vector<bool> available(frames, false);
    for (std::size_t f = 0; f < frames; ++f) {
      if (!active[f]) continue;
      const auto it = slot.find(*active[f]);
      if (it == slot.end()) throw Error("asd names face " + std::to_string(*active[f]) + " without a track");
      const auto& t = normalized[it->second];
      if (!t.available[f]) continue;
      per_frame.row(static_cast<Eigen::Index>(f)) = t.rows.row(static_cast<Eigen::Index>(f));
      available[f] = true;
    }
    const auto pooled = diarize::pool_segments(per_frame, available, segments);
    rec.has_face = std::any_of(pooled.available.begin(), pooled.available.end(), [](bool b) { return b; });
    if (*rec.has_face) {
      affinity = diarize::fuse_affinity(affinity, diarize::cosine_affinity(pooled.rows), pooled.available,
                                        cfg.diarize.visual_weight);
    }
  }

  const auto labels = diarize::cluster_speakers(affinity, cfg.diarize.cluster);
  const auto rttm = diarize::labels_to_rttm(
      labels, segments, rec.clip_id,
      diarize::RttmOptions{cfg.diarize.merge_adjacent, cfg.diarize.max_merge_gap, cfg.fps});
  rec.artifacts["diar_rttm"] = write_generated(rec, cfg, ".rttm", formats::serialize_rttm(rttm));

  rec.diarization.clear();
  std::vector<std::string> names;
  for (const auto& s : rttm) {
    rec.diarization.push_back({to_frames(s, cfg.fps), s.speaker});
    names.push_back(s.speaker);
  }
  const auto dense = tst::densify_labels(names);
  rec.speaker_labels = dense.labels;
  rec.tuples.clear();
  for (std::size_t i = 0; i < rec.diarization.size(); ++i) {
    const auto& span = rec.diarization[i].span;
    rec.tuples.push_back({span.start, dense.index[i], Gender::kUnknown, AgeGroup::kUnknown, span.end});
  }
  validate_tuples(rec.tuples);
}

// --- correct / scene ---------------------------------------------------------------------

void correct_stage(SampleRecord& rec, const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (rec.diarization.empty()) throw Error("record has no diarization");
  if (!ctx.mllm) throw Error("no MLLM client configured");
  correct::CorrectionRequest req;
  req.clip_id = rec.clip_id;
  if (const auto it = rec.artifacts.find("vocal"); it != rec.artifacts.end()) req.vocal_track = it->second;
  req.asr_transcript = rec.asr_transcript.empty() ? rec.transcript : rec.asr_transcript;
  std::set<std::string> labels;
  for (const auto& d : rec.diarization) {
    req.tuples.push_back({formats::frame_to_seconds(d.span.start, cfg.fps), d.speaker,
                          formats::frame_to_seconds(d.span.end, cfg.fps)});
    labels.insert(d.speaker);
  }
  const auto request = correct::make_request(req, cfg.correct.template_id, *ctx.templates);
  const std::string raw = ctx.mllm->complete(request);

  correct::CorrectionResponse resp;
  try {
    resp = correct::parse_response(raw);
  } catch (const Error& e) {
    discard(rec, {"parse-response", false, std::string("unparseable MLLM response: ") + e.what(), std::nullopt});
    return;
  }

  const auto asr = correct::normalize_text(req.asr_transcript, *ctx.tables);
  const auto corrected = correct::normalize_text(resp.transcript, *ctx.tables);
  auto tv = correct::verify_transcript(asr, corrected, cfg.correct.edit_unit, cfg.correct.max_edit_ratio);
  if (!tv.keep) {
    discard(rec, std::move(tv));
    return;
  }
  rec.verdicts.push_back(std::move(tv));

  auto check = correct::verify_speakers(labels, resp, rec.model_attrs);
  if (!check.verdict.keep) {
    discard(rec, std::move(check.verdict));
    return;
  }
  rec.verdicts.push_back(std::move(check.verdict));

  rec.transcript = corrected;
  for (auto& t : rec.tuples) {
    const auto& label = rec.speaker_labels.at(static_cast<std::size_t>(t.spk));
    if (const auto it = check.attributes.find(label); it != check.attributes.end()) {
      t.gender = it->second.gender;
      t.age = it->second.age;
    }
  }
  rec.timbre = std::move(check.timbre);
  rec.clue = resp.long_clue;
  rec.short_clue = resp.short_clue;
  if (!resp.emotion.empty()) rec.emotion = resp.emotion;
}

void scene_stage(SampleRecord& rec, const StageContext&) {
  std::set<int> speakers;
  for (const auto& t : rec.tuples) speakers.insert(t.spk);
  const int n = static_cast<int>(std::max(speakers.size(), rec.speaker_labels.size()));
  if (n < 1) {
    discard(rec, {"scene", false, "no active speaker", 0.0});
    return;
  }
  rec.scene = correct::categorize_scene(rec.has_face.value_or(false), n);
}

// --- tokenize / ssc-plan --------------------------------------------------------------------

void tokenize_stage(SampleRecord& rec, const StageContext& ctx) {
  const tst::Vocabulary vocab(ctx.cfg.tokenize.max_speakers);
  const auto tokens = tst::encode(rec.tuples, vocab);
  rec.artifacts["tst_tokens"] = write_generated(rec, ctx.cfg, ".tst", artifacts::encode_tokens(tokens));
}

void ssc_stage(SampleRecord& rec, const StageContext& ctx) {
  const auto tokens = artifacts::read_ints(require_artifact(rec, ctx.cfg, "speech_tokens"));
  align::validate_speech_tokens(tokens);
  rec.ssc_plan = flow::build_ssc_plan(tokens, rec.tuples, ctx.cfg.ssc.neighborhood);
  rec.cfg_drop = flow::cfg_drop_mask(1, ctx.cfg.ssc.cfg_drop_prob, ctx.cfg.seed ^ detail::fnv1a(rec.clip_id))[0];
}

// --- metrics ------------------------------------------------------------------------------------

void metrics_stage(SampleRecord& rec, const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  rec.metrics.clear();
  if (rec.hyp_transcript && !rec.transcript.empty()) {
    rec.metrics["cer"] = metrics::cer(rec.transcript, *rec.hyp_transcript);
    if (!metrics::split_words(rec.transcript).empty()) {
      rec.metrics["wer"] = metrics::wer(rec.transcript, *rec.hyp_transcript);
    }
  }
  if (const auto pred = optional_artifact(rec, cfg, "pred_vad")) {
    std::vector<FrameInterval> reference;
    for (const auto& t : rec.tuples) reference.push_back({t.start, t.end});
    if (reference.empty()) {
      for (const auto& d : rec.diarization) reference.push_back(d.span);
    }
    if (reference.empty()) throw Error("pred_vad given but the record has no reference intervals");
    std::vector<FrameInterval> spans;
    for (const auto& s : formats::parse_rttm(artifacts::read_file(*pred))) spans.push_back(to_frames(s, cfg.fps));
    rec.metrics["spk_tl"] = metrics::spk_tl(reference, IntervalSet::normalized(std::move(spans)));
  }
  const auto ref_mcep = optional_artifact(rec, cfg, "ref_mcep");
  const auto syn_mcep = optional_artifact(rec, cfg, "syn_mcep");
  if (ref_mcep && syn_mcep) {
    const Matrix a = artifacts::read_matrix(*ref_mcep);
    const Matrix b = artifacts::read_matrix(*syn_mcep);
    rec.metrics["mcd_dtw"] = metrics::mcd_dtw(a, b, cfg.metrics.mcd);
    rec.metrics["mcd_dtw_sl"] = metrics::mcd_dtw_sl(a, b, cfg.metrics.mcd);
  }
  auto similarity = [&](const char* syn_role, const char* ref_role, const char* key) {
    const auto syn = optional_artifact(rec, cfg, syn_role);
    const auto ref = optional_artifact(rec, cfg, ref_role);
    if (!syn || !ref) return;
    const Matrix s = artifacts::read_matrix(*syn);
    const Matrix r = artifacts::read_matrix(*ref);
    if (r.rows() != 1) throw Error(std::string(ref_role) + " must hold one row");
    const std::vector<double> rv(r.data(), r.data() + r.size());
    rec.metrics[key] = metrics::pooled_cosine_sim(s, rv);
  };
  similarity("syn_spk_emb", "ref_spk_emb", "spk_sim");
  similarity("syn_emo_emb", "ref_emo_emb", "emo_sim");
}

}  // namespace

FilterVerdict overlap_filter(std::int64_t clip_frames, const IntervalSet& overlaps) {
  const FrameInterval clip{0, clip_frames};
  const auto frames = overlaps.overlap_length(clip);
  if (frames > 0) {
    return {"overlap-filter", false, std::to_string(frames) + " overlapped-speech frames inside the clip",
            static_cast<double>(frames)};
  }
  return {"overlap-filter", true, {}, 0.0};
}

std::vector<SampleRecord> segment_source(const SampleRecord& source, std::span<const formats::SrtCue> cues,
                                         const PipelineConfig& cfg) {
  std::vector<SampleRecord> out;
  const auto hash = stage_hash(cfg, Stage::kSegmentIngest);
  for (const auto& cue : cues) {
    SampleRecord clip;
    char idx[16];
    std::snprintf(idx, sizeof idx, "%04d", cue.index);
    clip.clip_id = source.clip_id + "_" + idx;
    clip.kind = "clip";
    clip.series_id = source.series_id;
    const double start = static_cast<double>(cue.start.total_milliseconds()) / 1000.0;
    const double end = static_cast<double>(cue.end.total_milliseconds()) / 1000.0;
    clip.offset = source.offset + start;
    clip.duration = end - start;
    clip.transcript = cue.text;
    std::replace(clip.transcript.begin(), clip.transcript.end(), '\n', ' ');
    clip.model_attrs = source.model_attrs;
    for (const auto& [role, tmpl] : cfg.segment.clip_artifacts) {
      std::string path = tmpl;
      for (const auto& [key, value] : {std::pair<std::string, std::string>{"{clip_id}", clip.clip_id},
                                       std::pair<std::string, std::string>{"{source_id}", source.clip_id}}) {
        for (auto pos = path.find(key); pos != std::string::npos; pos = path.find(key, pos + value.size())) {
          path.replace(pos, key.size(), value);
        }
      }
      clip.artifacts[role] = path;
    }
    if (clip.duration > cfg.segment.max_clip_seconds) {
      discard(clip, {"segment-ingest", false,
                     "clip of " + fmt("%.3f", clip.duration) + " s exceeds " +
                         fmt("%.0f", cfg.segment.max_clip_seconds) + " s",
                     clip.duration});
    } else {
      clip.verdicts.push_back({"segment-ingest", true, {}, clip.duration});
    }
    clip.stage_hashes[std::string(to_string(Stage::kSegmentIngest))] = hash;
    out.push_back(std::move(clip));
  }
  return out;
}

namespace detail {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void apply_stage(Stage stage, SampleRecord& rec, const StageContext& ctx) {
  switch (stage) {
    case Stage::kSeparationIngest: return separation_ingest(rec, ctx);
    case Stage::kOverlapFilter: return overlap_stage(rec, ctx);
    case Stage::kDiarize: return diarize_stage(rec, ctx);
    case Stage::kCorrect: return correct_stage(rec, ctx);
    case Stage::kScene: return scene_stage(rec, ctx);
    case Stage::kTokenize: return tokenize_stage(rec, ctx);
    case Stage::kSscPlan: return ssc_stage(rec, ctx);
    case Stage::kMetrics: return metrics_stage(rec, ctx);
    case Stage::kSegmentIngest:
    case Stage::kStats:
      return;  // handled by the runner
  }
}

}  // namespace detail
}  // namespace dubkit::pipeline
