// include/noisebench/score.h

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

#ifndef NOISEBENCH_SCORE_H_
#define NOISEBENCH_SCORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "noisebench/common.h"
#include "noisebench/manifest.h"

namespace noisebench {

using Token = std::string;
using TokenSequence = std::vector<Token>;

class ScoreError : public Error {
 public:
  using Error::Error;
};

struct TokenizeOptions {
  // Treat a maximal run of ASCII letters and digits as one token, for
  // mixed-script transcripts ("abc你好" -> abc, 你, 好).
  bool group_ascii_runs = false;
};

/// Drops whitespace (ASCII, U+00A0, U+2000-U+200B, U+3000) and emits one
/// token per remaining code point. Throws ScoreError on invalid UTF-8.
TokenSequence Tokenize(std::string_view transcript,
                       const TokenizeOptions &options = {});

enum class EditOp : char {
  kCorrect = 'C',
  kSubstitution = 'S',
  kDeletion = 'D',
  kInsertion = 'I',
};

struct AlignmentStep {
  std::optional<Token> ref;
  std::optional<Token> hyp;
  EditOp op = EditOp::kCorrect;
};

struct Alignment {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t correct = 0;
  std::vector<AlignmentStep> path;

  std::int64_t errors() const { return substitutions + deletions + insertions; }
  std::int64_t ref_length() const { return substitutions + deletions + correct; }
  std::int64_t hyp_length() const { return substitutions + insertions + correct; }
};

// Unit-cost Levenshtein alignment. When several minimal paths exist the
// backtrace (from the end of both sequences) prefers match, then
// substitution, then deletion, then insertion.
Alignment Align(const TokenSequence &ref, const TokenSequence &hyp);

struct UtteranceScore {
  Alignment alignment;
  bool hypothesis_missing = false;
};

struct ScoreReport {
  std::string condition_label;
  std::string engine;
  std::map<std::string, UtteranceScore> per_utterance;
  std::int64_t total_ref_tokens = 0;
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t correct = 0;
  std::vector<std::string> missing_hypotheses;  // scored as empty
  std::vector<std::string> extra_hypotheses;    // absent from refs, ignored

  /// (S + D + I) / N.
  double cer() const;
};

/// Reads a Kaldi text file ("<utt_id> <transcript>").
std::map<std::string, std::string> ReadTranscripts(
    const std::filesystem::path &path);

// Scores every reference utterance. A reference without a hypothesis is
// scored against an empty one and listed in missing_hypotheses; hypotheses
// for unknown ids are listed in extra_hypotheses and not scored. Throws
// ScoreError on an empty reference set or zero reference tokens.
ScoreReport ScoreCorpus(const CorpusManifest &refs,
                        const std::map<std::string, std::string> &hyps,
                        const std::string &condition_label,
                        const TokenizeOptions &options = {}, int jobs = 0);

/// Fixed-width ref/hyp/op lines per utterance; gaps print as "*".
std::string AlignmentDump(const ScoreReport &report);

struct ConditionSignificance {
  std::string condition_label;
  std::string baseline_engine;  // the engine whose CER is the minimum
  double baseline_cer = 0.0;    // p, fraction
  double candidate_cer = 0.0;   // fraction
  std::int64_t n_units = 0;
  double sdev = 0.0;            // percentage points
  double num_sdev = 0.0;        // positive: candidate better
  bool significant = false;
};

struct SignificanceReport {
  std::string candidate_engine;
  std::vector<ConditionSignificance> conditions;
};

/// Improvement threshold, in binomial standard deviations.
inline constexpr double kSignificanceSdevs = 4.0;

// Binomial comparison against the best baseline:
//   p        = min over baselines of CER
//   sdev     = 100 sqrt(p (1 - p) / n_units)         (percentage points)
//   num_sdev = 100 (p - candidate CER) / sdev
//   significant iff num_sdev > 4
// Throws ScoreError if baselines is empty, labels disagree, n_units <= 0,
// or p is not strictly between 0 and 1.
ConditionSignificance CompareEngines(const std::vector<ScoreReport> &baselines,
                                     const ScoreReport &candidate,
                                     std::int64_t n_units);

/// The same comparison on bare CER fractions.
ConditionSignificance CompareCers(const std::vector<double> &baseline_cers,
                                  double candidate_cer, std::int64_t n_units);

/// Groups reports by condition_label; conditions follow candidate order.
SignificanceReport CompareConditions(const std::vector<ScoreReport> &baselines,
                                     const std::vector<ScoreReport> &candidates,
                                     std::int64_t n_units);

/// Table in the layout: one CER row per engine, then sdev and #sdev rows,
/// with "*" marking significant conditions.
std::string FormatSignificanceTable(const SignificanceReport &report,
                                    const std::vector<ScoreReport> &baselines,
                                    const std::vector<ScoreReport> &candidates);

nlohmann::json ToJson(const ScoreReport &report);
/// Accepts summary-only reports (no per_utterance entries).
ScoreReport ScoreReportFromJson(const nlohmann::json &json);
/// Columns: utt_id,ref_tokens,substitutions,deletions,insertions,correct,cer.
std::string ToCsv(const ScoreReport &report);

nlohmann::json ToJson(const SignificanceReport &report);
/// Columns: condition,baseline_engine,baseline_cer,candidate_cer,n_units,
/// sdev,num_sdev,significant.
std::string ToCsv(const SignificanceReport &report);

}  // namespace noisebench

#endif  // NOISEBENCH_SCORE_H_
