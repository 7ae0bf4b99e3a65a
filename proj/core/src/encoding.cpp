#include "arplab/encoding.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace arplab {

namespace {

using SymbolPair = std::pair<std::string, std::string>;

bool ends_with_continuation(const std::string& s) {
  return s.size() >= 2 && s.compare(s.size() - 2, 2, kContinuationMarker) == 0;
}

std::string strip_continuation(const std::string& s) {
  return ends_with_continuation(s) ? s.substr(0, s.size() - 2) : s;
}

// Merges all non-overlapping left-to-right occurrences of the pair in a
// symbol list (BPE semantics: no re-examination after a merge).
void merge_pair_in_word(std::vector<std::string>& symbols, const SymbolPair& pair,
                        const std::string& merged) {
  std::size_t write = 0;
  for (std::size_t read = 0; read < symbols.size();) {
    if (read + 1 < symbols.size() && symbols[read] == pair.first &&
        symbols[read + 1] == pair.second) {
      symbols[write++] = merged;
      read += 2;
    } else {
      if (write != read) symbols[write] = std::move(symbols[read]);
      ++write;
      ++read;
    }
  }
  symbols.resize(write);
}

}  // namespace

bool MergeTable::contains(const std::string& left, const std::string& right) const {
  return std::any_of(rules.begin(), rules.end(), [&](const MergeRule& r) {
    return r.left == left && r.right == right;
  });
}

std::vector<std::string> word_to_symbols(const std::string& word) {
  if (word.empty()) throw InvalidArgument("word_to_symbols: empty word");
  std::vector<std::string> points;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto lead = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    len = std::min(len, word.size() - i);
    points.push_back(word.substr(i, len));
    i += len;
  }
  for (std::size_t k = 0; k + 1 < points.size(); ++k) points[k] += kContinuationMarker;
  return points;
}

MergeTable learn_bpe(const std::vector<std::vector<std::string>>& corpus,
                     std::size_t num_merges) {
  // Word-type frequencies; pair statistics are weighted by them.
  std::map<std::string, std::size_t> word_freq;
  for (const auto& seq : corpus) {
    for (const std::string& w : seq) ++word_freq[w];
  }
  if (word_freq.empty()) throw EmptyCorpus("learn_bpe: corpus has no words");

  std::vector<std::vector<std::string>> words;
  std::vector<std::size_t> freq;
  words.reserve(word_freq.size());
  for (const auto& [w, f] : word_freq) {
    words.push_back(word_to_symbols(w));
    freq.push_back(f);
  }

  // Ordered map keeps tie-breaking lexicographic without extra work.
  std::map<SymbolPair, std::size_t> pair_count;
  std::map<SymbolPair, std::set<std::size_t>> pair_words;
  auto add_word_pairs = [&](std::size_t wi, bool removing) {
    const auto& sym = words[wi];
    for (std::size_t k = 0; k + 1 < sym.size(); ++k) {
      SymbolPair p{sym[k], sym[k + 1]};
      if (removing) {
        auto it = pair_count.find(p);
        it->second -= freq[wi];
        if (it->second == 0) {
          pair_count.erase(it);
          pair_words.erase(p);
        }
      } else {
        pair_count[p] += freq[wi];
        pair_words[p].insert(wi);
      }
    }
  };
  for (std::size_t wi = 0; wi < words.size(); ++wi) add_word_pairs(wi, false);

  MergeTable table;
  table.kind = MergeOrigin::Bpe;
  for (std::size_t step = 0; step < num_merges; ++step) {
    if (pair_count.empty()) break;
    auto best = pair_count.begin();
    for (auto it = std::next(pair_count.begin()); it != pair_count.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const SymbolPair pair = best->first;
    const std::string merged = strip_continuation(pair.first) + pair.second;
    table.rules.push_back({pair.first, pair.second, step + 1, MergeOrigin::Bpe});

    const std::set<std::size_t> affected = pair_words[pair];
    for (std::size_t wi : affected) {
      add_word_pairs(wi, true);
      merge_pair_in_word(words[wi], pair, merged);
      add_word_pairs(wi, false);
    }
  }
  return table;
}

std::vector<std::string> bpe_split_word(const std::string& word, const MergeTable& table) {
  std::vector<std::string> symbols = word_to_symbols(word);
  for (const MergeRule& r : table.rules) {
    if (symbols.size() < 2) break;
    merge_pair_in_word(symbols, {r.left, r.right},
                       strip_continuation(r.left) + r.right);
  }
  return symbols;
}

std::vector<std::string> apply_bpe(const std::vector<std::string>& words,
                                   const MergeTable& table) {
  std::vector<std::string> out;
  std::unordered_map<std::string, std::vector<std::string>> cache;
  for (const std::string& w : words) {
    auto it = cache.find(w);
    if (it == cache.end()) {
      it = cache.emplace(w, bpe_split_word(w, table)).first;
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::string join_tokens(const std::string& left, const std::string& right) {
  std::string joined = left + kJoinMarker + right;
  // "@@==" means the pair was a split subword: fuse seamlessly.
  const std::string seam = std::string(kContinuationMarker) + kJoinMarker;
  std::size_t pos = 0;
  while ((pos = joined.find(seam, pos)) != std::string::npos) {
    joined.erase(pos, seam.size());
  }
  return joined;
}

namespace {

// One rule over one stream; returns whether anything merged.
bool merge_rule_in_stream(std::vector<std::string>& words, const MergeRule& rule,
                          const std::string& merged) {
  bool any = false;
  std::size_t i = 0;
  while (i + 1 < words.size()) {
    if (words[i] == rule.left && words[i + 1] == rule.right) {
      words[i] = merged;
      words.erase(words.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      any = true;
      // re-examine from the merged position before advancing
    } else {
      ++i;
    }
  }
  return any;
}

}  // namespace

std::vector<std::string> apply_re(std::vector<std::string> words, const MergeTable& table) {
  for (const MergeRule& rule : table.rules) {
    merge_rule_in_stream(words, rule, join_tokens(rule.left, rule.right));
  }
  return words;
}

void apply_re_streams(std::vector<std::vector<std::string>>& streams,
                      const MergeTable& table) {
  // token -> streams that may contain it; merges append to the merged
  // token's entry, so the index only ever over-approximates.
  std::unordered_map<std::string, std::vector<std::size_t>> index;
  for (std::size_t sid = 0; sid < streams.size(); ++sid) {
    for (const std::string& tok : streams[sid]) {
      auto& ids = index[tok];
      if (ids.empty() || ids.back() != sid) ids.push_back(sid);
    }
  }
  std::vector<std::size_t> stamp(streams.size(), 0);
  std::size_t rule_id = 0;
  for (const MergeRule& rule : table.rules) {
    ++rule_id;
    const auto it = index.find(rule.left);
    if (it == index.end()) continue;
    const std::string merged = join_tokens(rule.left, rule.right);
    // snapshot: inserting index[merged] below may rehash the map
    const std::vector<std::size_t> candidates = it->second;
    for (const std::size_t sid : candidates) {
      if (stamp[sid] == rule_id) continue;
      stamp[sid] = rule_id;
      if (merge_rule_in_stream(streams[sid], rule, merged)) {
        auto& ids = index[merged];
        if (ids.empty() || ids.back() != sid) ids.push_back(sid);
      }
    }
  }
}

ReLearnResult learn_re(const std::vector<std::vector<std::string>>& streams,
                       std::size_t n_steps, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidGamma("learn_re: gamma must lie in (0, 1]");
  }
  if (n_steps < 1) throw InvalidArgument("learn_re: n_steps must be >= 1");

  std::vector<std::vector<std::string>> work = streams;
  ReLearnResult out;
  out.table.kind = MergeOrigin::Re;

  // Adjacent-pair statistics with rows normalized by the row count, floored
  // at one. Returns the maximum transition probability and fills `above` with
  // every pair exceeding gamma, sorted by token strings.
  auto scan_pairs = [&](std::vector<SymbolPair>* above) {
    std::map<std::string, std::size_t> row_total;
    std::map<SymbolPair, std::size_t> pair_count;
    for (const auto& s : work) {
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        ++pair_count[{s[i], s[i + 1]}];
        ++row_total[s[i]];
      }
    }
    double max_prob = 0.0;
    for (const auto& [pair, cnt] : pair_count) {
      const std::size_t total = std::max<std::size_t>(1, row_total[pair.first]);
      const double prob = static_cast<double>(cnt) / static_cast<double>(total);
      max_prob = std::max(max_prob, prob);
      if (above != nullptr && prob > gamma) above->push_back(pair);
    }
    return max_prob;
  };

  std::set<SymbolPair> seen;
  for (std::size_t step = 1; step <= n_steps; ++step) {
    std::vector<SymbolPair> above;
    const double max_prob = scan_pairs(&above);
    if (max_prob <= gamma) {
      out.converged = true;
      out.final_max_prob = max_prob;
      return out;
    }
    out.steps_run = step;

    MergeTable step_rules;
    step_rules.kind = MergeOrigin::Re;
    for (const SymbolPair& p : above) {
      if (!seen.insert(p).second) continue;  // duplicates dropped on insertion
      step_rules.rules.push_back({p.first, p.second, step, MergeOrigin::Re});
    }
    out.table.rules.insert(out.table.rules.end(), step_rules.rules.begin(),
                           step_rules.rules.end());
    apply_re_streams(work, step_rules);
  }
  out.final_max_prob = scan_pairs(nullptr);
  out.converged = out.final_max_prob <= gamma;
  return out;
}

std::vector<std::string> detokenize(const std::vector<std::string>& tokens) {
  std::vector<std::string> words;
  std::string pending;
  bool open = false;
  for (const std::string& tok : tokens) {
    if (ends_with_continuation(tok)) {
      pending += strip_continuation(tok);
      open = true;
      continue;
    }
    pending += tok;
    open = false;
    // Split the completed surface unit on the join marker.
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = pending.find(kJoinMarker, start);
      if (pos == std::string::npos) {
        words.push_back(pending.substr(start));
        break;
      }
      words.push_back(pending.substr(start, pos - start));
      start = pos + 2;
    }
    pending.clear();
  }
  if (open || !pending.empty()) {
    throw MalformedMarkers("detokenize: trailing continuation marker at sequence end");
  }
  return words;
}

}  // namespace arplab
