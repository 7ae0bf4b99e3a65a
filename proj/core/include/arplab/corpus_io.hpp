#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arplab/bounds.hpp"
#include "arplab/encoding.hpp"
#include "arplab/markov.hpp"
#include "arplab/metrics.hpp"

namespace arplab {

struct Corpus {
  std::vector<std::vector<std::string>> sequences;
  std::string source_path;
  std::size_t token_count = 0;
  std::size_t line_count = 0;   // non-empty lines kept
  std::size_t empty_lines = 0;  // skipped
};

// Splits UTF-8 text into one whitespace-tokenized sequence per line. Empty
// lines are skipped and counted. Lowercasing is ASCII-only; no Unicode
// normalization is applied.
Corpus parse_corpus_text(const std::string& text, bool lowercase = false,
                         std::optional<std::size_t> max_lines = std::nullopt,
                         std::string source = "<memory>");

Corpus ingest(const std::string& path, bool lowercase = false,
              std::optional<std::size_t> max_lines = std::nullopt);

// Throws EncodingError with the byte offset of the first invalid byte.
void validate_utf8(const std::string& text);

// Model files: JSON with the vocabulary, zeta, the EOS column, and sparse
// triplets for B and the raw counts. Probabilities are printed with 17
// significant digits so a load reproduces them exactly.
void save_model(const TransitionModel& model, const std::string& path);
TransitionModel load_model(const std::string& path);

// Merge-table files: line 1 is "#arplab-merges v1 <bpe|re>", then one rule
// per line as left<TAB>right<TAB>step.
void save_merges(const MergeTable& table, const std::string& path);
MergeTable load_merges(const std::string& path,
                       std::optional<MergeOrigin> expected = std::nullopt);

// Token streams: one sequence per line, single-space separated.
void save_sequences(const std::vector<std::vector<std::string>>& seqs,
                    const std::string& path);
std::vector<std::vector<std::string>> load_sequences(const std::string& path);

// JSON renderers used by the command-line front-end.
std::string bound_report_to_json(const BoundReport& report);
std::string repetition_report_to_json(const RepetitionReport& report,
                                      bool per_sequence = false);

// Formats a double with 17 significant digits (shortest exact form is not
// required; parsing the result reproduces the bit pattern).
std::string format_double(double v);

}  // namespace arplab
