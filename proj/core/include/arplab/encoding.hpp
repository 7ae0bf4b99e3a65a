#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "arplab/error.hpp"

namespace arplab {

// Marker conventions: a trailing "@@" marks a non-final subword piece, an
// infix "==" joins full words into one token.
inline constexpr const char* kContinuationMarker = "@@";
inline constexpr const char* kJoinMarker = "==";

enum class MergeOrigin { Bpe, Re };

struct MergeRule {
  std::string left;
  std::string right;
  std::size_t step = 0;  // learning iteration that produced the rule
  MergeOrigin origin = MergeOrigin::Bpe;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

struct MergeTable {
  std::vector<MergeRule> rules;  // application order = list order
  MergeOrigin kind = MergeOrigin::Bpe;

  bool contains(const std::string& left, const std::string& right) const;
};

// Splits a word into UTF-8 code point symbols; all but the last carry the
// continuation marker. "low" -> [l@@, o@@, w].
std::vector<std::string> word_to_symbols(const std::string& word);

// Greedy frequency BPE over word types. Ties break toward the
// lexicographically smaller (left, right) pair.
MergeTable learn_bpe(const std::vector<std::vector<std::string>>& corpus,
                     std::size_t num_merges);

// Segments one word with the table, applying rules in learned order.
std::vector<std::string> bpe_split_word(const std::string& word, const MergeTable& table);

// Segments a word sequence; concatenating the output and deleting the
// continuation markers restores the input exactly.
std::vector<std::string> apply_bpe(const std::vector<std::string>& words,
                                   const MergeTable& table);

// One rebalanced-encoding pass over token streams: per step, build the
// first-order transition matrix of adjacent pairs (never across stream
// boundaries), stop once its maximum entry is <= gamma, otherwise merge every
// pair above gamma (sorted by token strings) and re-encode.
struct ReLearnResult {
  MergeTable table;
  std::size_t steps_run = 0;
  bool converged = false;       // max transition probability reached <= gamma
  double final_max_prob = 0.0;  // on the re-encoded streams
};

ReLearnResult learn_re(const std::vector<std::vector<std::string>>& streams,
                       std::size_t n_steps, double gamma);

// Applies merge rules in order with left-to-right scanning; after a merge the
// scan re-examines the merged position before advancing. The joined token is
// left + "==" + right with every "@@==" occurrence deleted, so subword pairs
// fuse seamlessly.
std::vector<std::string> apply_re(std::vector<std::string> words, const MergeTable& table);

// Applies the table to many streams, skipping streams that cannot contain a
// rule's left token. Produces exactly apply_re(stream, table) per stream.
void apply_re_streams(std::vector<std::vector<std::string>>& streams,
                      const MergeTable& table);

// Merges two adjacent tokens under the marker conventions.
std::string join_tokens(const std::string& left, const std::string& right);

// Inverse of the marker conventions at the surface level: "@@" glues pieces,
// "==" splits joined words. A trailing continuation marker at the end of the
// sequence is an error.
std::vector<std::string> detokenize(const std::vector<std::string>& tokens);

}  // namespace arplab
