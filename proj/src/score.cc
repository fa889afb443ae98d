// src/score.cc

// Copyright 2026  The noisebench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "noisebench/score.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "noisebench/parallel.h"

namespace noisebench {

namespace {

bool IsWhitespace(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\v' || cp == U'\f' || cp == 0x00A0 || cp == 0x3000 ||
         (cp >= 0x2000 && cp <= 0x200B);
}

bool IsAsciiAlnum(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
         (cp >= U'A' && cp <= U'Z');
}

// Decodes the code point starting at text[pos] and returns its byte length.
std::size_t DecodeUtf8(std::string_view text, std::size_t pos, char32_t *cp) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  unsigned char lead = byte(pos);
  std::size_t len;
  char32_t value;
  if (lead < 0x80) {
    *cp = lead;
    return 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    value = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    value = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    value = lead & 0x07;
  } else {
    throw ScoreError(fmt::format("invalid UTF-8 lead byte at offset {}", pos));
  }
  if (pos + len > text.size())
    throw ScoreError(fmt::format("truncated UTF-8 sequence at offset {}", pos));
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char c = byte(pos + k);
    if ((c & 0xC0) != 0x80)
      throw ScoreError(fmt::format("invalid UTF-8 continuation at offset {}", pos + k));
    value = (value << 6) | (c & 0x3F);
  }
  static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
  if (value < kMinForLength[len] || value > 0x10FFFF ||
      (value >= 0xD800 && value <= 0xDFFF))
    throw ScoreError(fmt::format("invalid UTF-8 code point at offset {}", pos));
  *cp = value;
  return len;
}

}  // namespace

TokenSequence Tokenize(std::string_view transcript,
                       const TokenizeOptions &options) {
  TokenSequence tokens;
  bool in_ascii_run = false;
  std::size_t pos = 0;
  while (pos < transcript.size()) {
    char32_t cp;
    std::size_t len = DecodeUtf8(transcript, pos, &cp);
    std::string_view bytes = transcript.substr(pos, len);
    pos += len;
    if (IsWhitespace(cp)) {
      in_ascii_run = false;
      continue;
    }
    if (options.group_ascii_runs && IsAsciiAlnum(cp)) {
      if (in_ascii_run) {
        tokens.back() += bytes;
      } else {
        tokens.emplace_back(bytes);
        in_ascii_run = true;
      }
      continue;
    }
    in_ascii_run = false;
    tokens.emplace_back(bytes);
  }
  return tokens;
}

Alignment Align(const TokenSequence &ref, const TokenSequence &hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::int32_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::int32_t & {
    return cost[i * width + j];
  };
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::int32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      std::int32_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment result;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    std::int32_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == here) {
      result.path.push_back({ref[i - 1], hyp[j - 1], EditOp::kCorrect});
      ++result.correct;
      --i, --j;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      result.path.push_back({ref[i - 1], hyp[j - 1], EditOp::kSubstitution});
      ++result.substitutions;
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      result.path.push_back({ref[i - 1], std::nullopt, EditOp::kDeletion});
      ++result.deletions;
      --i;
    } else {
      result.path.push_back({std::nullopt, hyp[j - 1], EditOp::kInsertion});
      ++result.insertions;
      --j;
    }
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

double ScoreReport::cer() const {
  if (total_ref_tokens <= 0)
    throw ScoreError(fmt::format("report {} has no reference tokens",
                                 condition_label));
  return static_cast<double>(substitutions + deletions + insertions) /
         static_cast<double>(total_ref_tokens);
}

std::map<std::string, std::string> ReadTranscripts(
    const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is)
    throw ScoreError(fmt::format("missing or unreadable {}", path.string()));
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto key_end = line.find_first_of(" \t");
    std::string key = line.substr(0, key_end);
    std::string value;
    if (key_end != std::string::npos) {
      auto start = line.find_first_not_of(" \t", key_end);
      if (start != std::string::npos) value = line.substr(start);
    }
    if (key.empty())
      throw ScoreError(fmt::format("{}:{}: line starts with whitespace",
                                   path.string(), line_no));
    if (!out.emplace(key, value).second)
      throw ScoreError(fmt::format("{}:{}: duplicate id {}", path.string(),
                                   line_no, key));
  }
  return out;
}

ScoreReport ScoreCorpus(const CorpusManifest &refs,
                        const std::map<std::string, std::string> &hyps,
                        const std::string &condition_label,
                        const TokenizeOptions &options, int jobs) {
  if (refs.empty()) throw ScoreError("empty reference set");
  const auto &utts = refs.utterances();
  std::vector<UtteranceScore> scores(utts.size());
  ParallelFor(utts.size(), jobs, [&](std::size_t i) {
    auto it = hyps.find(utts[i].utt_id);
    scores[i].hypothesis_missing = it == hyps.end();
    TokenSequence hyp = scores[i].hypothesis_missing
                            ? TokenSequence{}
                            : Tokenize(it->second, options);
    scores[i].alignment = Align(Tokenize(utts[i].transcript, options), hyp);
  });

  ScoreReport report;
  report.condition_label = condition_label;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const Alignment &a = scores[i].alignment;
    report.total_ref_tokens += a.ref_length();
    report.substitutions += a.substitutions;
    report.deletions += a.deletions;
    report.insertions += a.insertions;
    report.correct += a.correct;
    if (scores[i].hypothesis_missing)
      report.missing_hypotheses.push_back(utts[i].utt_id);
    report.per_utterance.emplace(utts[i].utt_id, std::move(scores[i]));
  }
  for (const auto &[id, text] : hyps)
    if (!refs.Find(id)) report.extra_hypotheses.push_back(id);
  if (report.total_ref_tokens == 0)
    throw ScoreError(fmt::format("references in {} contain no tokens",
                                 refs.label()));
  return report;
}

std::string AlignmentDump(const ScoreReport &report) {
  std::string out;
  for (const auto &[id, score] : report.per_utterance) {
    std::string ref_line = id + " ref", hyp_line = id + " hyp",
                op_line = id + " op ";
    for (const auto &step : score.alignment.path) {
      ref_line += " " + step.ref.value_or("*");
      hyp_line += " " + step.hyp.value_or("*");
      op_line += " ";
      op_line += static_cast<char>(step.op);
    }
    out += ref_line + "\n" + hyp_line + "\n" + op_line + "\n";
  }
  return out;
}

ConditionSignificance CompareCers(const std::vector<double> &baseline_cers,
                                  double candidate_cer, std::int64_t n_units) {
  if (baseline_cers.empty()) throw ScoreError("no baseline engines given");
  if (n_units <= 0) throw ScoreError("n_units must be positive");
  double p = *std::min_element(baseline_cers.begin(), baseline_cers.end());
  if (!(p > 0.0 && p < 1.0))
    throw ScoreError(fmt::format(
        "best baseline CER {} is outside (0, 1); binomial sdev undefined", p));
  ConditionSignificance row;
  row.baseline_cer = p;
  row.candidate_cer = candidate_cer;
  row.n_units = n_units;
  row.sdev = 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n_units));
  row.num_sdev = 100.0 * (p - candidate_cer) / row.sdev;
  row.significant = row.num_sdev > kSignificanceSdevs;
  return row;
}

ConditionSignificance CompareEngines(const std::vector<ScoreReport> &baselines,
                                     const ScoreReport &candidate,
                                     std::int64_t n_units) {
  if (baselines.empty()) throw ScoreError("no baseline engines given");
  std::vector<double> cers;
  const ScoreReport *best = nullptr;
  for (const auto &b : baselines) {
    if (b.condition_label != candidate.condition_label)
      throw ScoreError(fmt::format(
          "baseline {} is condition \"{}\" but the candidate is \"{}\"",
          b.engine, b.condition_label, candidate.condition_label));
    cers.push_back(b.cer());
    if (!best || b.cer() < best->cer() ||
        (b.cer() == best->cer() && b.engine < best->engine))
      best = &b;
  }
  ConditionSignificance row = CompareCers(cers, candidate.cer(), n_units);
  row.condition_label = candidate.condition_label;
  row.baseline_engine = best->engine;
  return row;
}

SignificanceReport CompareConditions(const std::vector<ScoreReport> &baselines,
                                     const std::vector<ScoreReport> &candidates,
                                     std::int64_t n_units) {
  if (candidates.empty()) throw ScoreError("no candidate reports given");
  std::map<std::string, std::vector<ScoreReport>> by_label;
  for (const auto &b : baselines) by_label[b.condition_label].push_back(b);
  SignificanceReport report;
  report.candidate_engine = candidates.front().engine;
  std::set<std::string> seen;
  for (const auto &c : candidates) {
    if (!seen.insert(c.condition_label).second)
      throw ScoreError(fmt::format("two candidate reports for condition \"{}\"",
                                   c.condition_label));
    auto it = by_label.find(c.condition_label);
    if (it == by_label.end())
      throw ScoreError(fmt::format("no baseline report for condition \"{}\"",
                                   c.condition_label));
    report.conditions.push_back(CompareEngines(it->second, c, n_units));
  }
  return report;
}

std::string FormatSignificanceTable(const SignificanceReport &report,
                                    const std::vector<ScoreReport> &baselines,
                                    const std::vector<ScoreReport> &candidates) {
  std::vector<std::string> engines;
  for (const auto &b : baselines)
    if (std::find(engines.begin(), engines.end(), b.engine) == engines.end())
      engines.push_back(b.engine);
  auto cer_of = [](const std::vector<ScoreReport> &reports,
                   const std::string &engine,
                   const std::string &label) -> std::string {
    for (const auto &r : reports)
      if (r.engine == engine && r.condition_label == label)
        return fmt::format("{:.1f}", 100.0 * r.cer());
    return "-";
  };

  std::size_t name_width = 6;
  for (const auto &e : engines) name_width = std::max(name_width, e.size());
  name_width = std::max(name_width, report.candidate_engine.size());
  std::string out = fmt::format("{:<{}}", "ASR", name_width);
  for (const auto &c : report.conditions)
    out += fmt::format(" {:>8}", c.condition_label);
  out += "\n";
  for (const auto &e : engines) {
    out += fmt::format("{:<{}}", e, name_width);
    for (const auto &c : report.conditions)
      out += fmt::format(" {:>8}", cer_of(baselines, e, c.condition_label));
    out += "\n";
  }
  out += fmt::format("{:<{}}", report.candidate_engine, name_width);
  for (const auto &c : report.conditions) {
    std::string cell = cer_of(candidates, report.candidate_engine, c.condition_label);
    if (cell == "-") cell = fmt::format("{:.1f}", 100.0 * c.candidate_cer);
    out += fmt::format(" {:>8}", c.significant ? cell + "*" : cell);
  }
  out += "\n";
  out += fmt::format("{:<{}}", "sdev", name_width);
  for (const auto &c : report.conditions) out += fmt::format(" {:>8.2f}", c.sdev);
  out += "\n";
  out += fmt::format("{:<{}}", "#sdev", name_width);
  for (const auto &c : report.conditions)
    out += fmt::format(" {:>8}", fmt::format("{:.1f}{}", c.num_sdev,
                                             c.significant ? "*" : ""));
  out += "\n";
  out += fmt::format("(* = candidate better by more than {:g} sdev)\n",
                     kSignificanceSdevs);
  return out;
}

nlohmann::json ToJson(const ScoreReport &report) {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto &[id, s] : report.per_utterance) {
    const Alignment &a = s.alignment;
    nlohmann::json u = {{"utt_id", id},
                        {"ref_tokens", a.ref_length()},
                        {"hyp_tokens", a.hyp_length()},
                        {"substitutions", a.substitutions},
                        {"deletions", a.deletions},
                        {"insertions", a.insertions},
                        {"correct", a.correct},
                        {"hypothesis_missing", s.hypothesis_missing}};
    u["cer"] = a.ref_length() > 0
                   ? nlohmann::json(static_cast<double>(a.errors()) /
                                    static_cast<double>(a.ref_length()))
                   : nlohmann::json(nullptr);
    utts.push_back(std::move(u));
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "score_report"},
          {"condition_label", report.condition_label},
          {"engine", report.engine},
          {"cer", report.cer()},
          {"total_ref_tokens", report.total_ref_tokens},
          {"substitutions", report.substitutions},
          {"deletions", report.deletions},
          {"insertions", report.insertions},
          {"correct", report.correct},
          {"num_utterances", report.per_utterance.size()},
          {"missing_hypotheses", report.missing_hypotheses},
          {"extra_hypotheses", report.extra_hypotheses},
          {"per_utterance", utts}};
}

ScoreReport ScoreReportFromJson(const nlohmann::json &json) {
  if (json.value("kind", "") != "score_report")
    throw ScoreError("JSON is not a score report");
  ScoreReport r;
  r.condition_label = json.at("condition_label").get<std::string>();
  r.engine = json.value("engine", "");
  r.total_ref_tokens = json.at("total_ref_tokens").get<std::int64_t>();
  r.substitutions = json.at("substitutions").get<std::int64_t>();
  r.deletions = json.at("deletions").get<std::int64_t>();
  r.insertions = json.at("insertions").get<std::int64_t>();
  r.correct = json.value("correct", r.total_ref_tokens - r.substitutions - r.deletions);
  r.missing_hypotheses =
      json.value("missing_hypotheses", std::vector<std::string>{});
  r.extra_hypotheses = json.value("extra_hypotheses", std::vector<std::string>{});
  if (r.total_ref_tokens <= 0 || r.substitutions < 0 || r.deletions < 0 ||
      r.insertions < 0 || r.correct < 0 ||
      r.substitutions + r.deletions + r.correct != r.total_ref_tokens)
    throw ScoreError(fmt::format("score report \"{}\" has inconsistent totals",
                                 r.condition_label));

  std::int64_t n = 0, s = 0, d = 0, ins = 0;
  for (const auto &u : json.value("per_utterance", nlohmann::json::array())) {
    UtteranceScore score;
    score.alignment.substitutions = u.at("substitutions").get<std::int64_t>();
    score.alignment.deletions = u.at("deletions").get<std::int64_t>();
    score.alignment.insertions = u.at("insertions").get<std::int64_t>();
    score.alignment.correct = u.at("correct").get<std::int64_t>();
    score.hypothesis_missing = u.value("hypothesis_missing", false);
    n += score.alignment.ref_length();
    s += score.alignment.substitutions;
    d += score.alignment.deletions;
    ins += score.alignment.insertions;
    r.per_utterance.emplace(u.at("utt_id").get<std::string>(), std::move(score));
  }
  if (!r.per_utterance.empty() &&
      (n != r.total_ref_tokens || s != r.substitutions || d != r.deletions ||
       ins != r.insertions))
    throw ScoreError(fmt::format(
        "score report \"{}\": totals disagree with per-utterance counts",
        r.condition_label));
  return r;
}

std::string ToCsv(const ScoreReport &report) {
  std::string out =
      "utt_id,ref_tokens,substitutions,deletions,insertions,correct,cer\n";
  for (const auto &[id, s] : report.per_utterance) {
    const Alignment &a = s.alignment;
    std::string cer = a.ref_length() > 0
                          ? fmt::format("{:.6f}", static_cast<double>(a.errors()) /
                                                      static_cast<double>(a.ref_length()))
                          : "";
    out += fmt::format("{},{},{},{},{},{},{}\n", id, a.ref_length(),
                       a.substitutions, a.deletions, a.insertions, a.correct, cer);
  }
  return out;
}

nlohmann::json ToJson(const SignificanceReport &report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &c : report.conditions) {
    rows.push_back({{"condition_label", c.condition_label},
                    {"baseline_engine", c.baseline_engine},
                    {"baseline_cer", c.baseline_cer},
                    {"candidate_cer", c.candidate_cer},
                    {"n_units", c.n_units},
                    {"sdev", c.sdev},
                    {"num_sdev", c.num_sdev},
                    {"significant", c.significant}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "significance_report"},
          {"candidate_engine", report.candidate_engine},
          {"threshold_sdev", kSignificanceSdevs},
          {"conditions", rows}};
}

std::string ToCsv(const SignificanceReport &report) {
  std::string out =
      "condition,baseline_engine,baseline_cer,candidate_cer,n_units,sdev,"
      "num_sdev,significant\n";
  for (const auto &c : report.conditions)
    out += fmt::format("{},{},{:.6f},{:.6f},{},{:.4f},{:.4f},{}\n",
                       c.condition_label, c.baseline_engine, c.baseline_cer,
                       c.candidate_cer, c.n_units, c.sdev, c.num_sdev,
                       c.significant ? 1 : 0);
  return out;
}

}  // namespace noisebench
