#include "arplab/corpus_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace arplab {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

void check_token_storable(const std::string& tok) {
  if (tok.empty()) throw InvalidArgument("tokens must be non-empty");
  for (char c : tok) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw InvalidArgument("token '" + tok + "' contains whitespace");
    }
  }
}

}  // namespace

void validate_utf8(const std::string& text) {
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = s[i];
    std::size_t need = 0;
    unsigned cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      need = 1;
      cp = c & 0x1F;
      if (cp < 2) throw EncodingError("overlong UTF-8 sequence", i);
    } else if ((c & 0xF0) == 0xE0) {
      need = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      need = 3;
      cp = c & 0x07;
    } else {
      throw EncodingError("invalid UTF-8 lead byte", i);
    }
    if (i + need >= n) throw EncodingError("truncated UTF-8 sequence", i);
    for (std::size_t k = 1; k <= need; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) {
        throw EncodingError("invalid UTF-8 continuation byte", i + k);
      }
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if (need == 2 && cp < 0x800) throw EncodingError("overlong UTF-8 sequence", i);
    if (need == 3 && cp < 0x10000) throw EncodingError("overlong UTF-8 sequence", i);
    if (cp >= 0xD800 && cp <= 0xDFFF) throw EncodingError("UTF-8 surrogate code point", i);
    if (cp > 0x10FFFF) throw EncodingError("UTF-8 code point out of range", i);
    i += need + 1;
  }
}

Corpus parse_corpus_text(const std::string& text, bool lowercase,
                         std::optional<std::size_t> max_lines, std::string source) {
  validate_utf8(text);
  Corpus corpus;
  corpus.source_path = std::move(source);

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (max_lines && corpus.line_count >= *max_lines) break;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) {
        std::string tok = line.substr(i, j - i);
        if (lowercase) {
          for (char& ch : tok) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
        tokens.push_back(std::move(tok));
      }
      i = j;
    }
    if (tokens.empty()) {
      ++corpus.empty_lines;
      continue;
    }
    corpus.token_count += tokens.size();
    ++corpus.line_count;
    corpus.sequences.push_back(std::move(tokens));
  }
  return corpus;
}

Corpus ingest(const std::string& path, bool lowercase,
              std::optional<std::size_t> max_lines) {
  return parse_corpus_text(read_file(path), lowercase, max_lines, path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_model(const TransitionModel& model, const std::string& path) {
  const std::size_t n = model.n();
  std::ostringstream out;
  out << "{\n  \"version\": 1,\n  \"vocab\": [";
  for (std::size_t i = 0; i < n; ++i) {
    check_token_storable(model.vocab.tokens[i]);
    if (i) out << ", ";
    out << json(model.vocab.tokens[i]).dump();
  }
  out << "],\n  \"zeta\": " << format_double(model.zeta) << ",\n  \"b\": [";
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out << ", ";
    out << format_double(model.eos[i]);
  }
  out << "],\n  \"B\": [";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = model.b.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] == 0.0) continue;
      if (!first) out << ", ";
      first = false;
      out << "[" << i << ", " << j << ", " << format_double(row[j]) << "]";
    }
  }
  out << "],\n  \"counts\": [";
  for (std::size_t k = 0; k < model.counts.size(); ++k) {
    if (k) out << ", ";
    const BigramCount& c = model.counts[k];
    out << "[" << c.from << ", " << c.to << ", " << c.count << "]";
  }
  out << "]\n}\n";
  write_file(path, out.str());
}

TransitionModel load_model(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("version", 0) != 1) {
      throw SchemaError("model file: unsupported version");
    }
    const auto& vocab_json = doc.at("vocab");
    if (!vocab_json.is_array() || vocab_json.empty()) {
      throw SchemaError("model file: vocab must be a non-empty array");
    }
    std::vector<std::string> tokens;
    tokens.reserve(vocab_json.size());
    for (const auto& t : vocab_json) tokens.push_back(t.get<std::string>());
    const std::size_t n = tokens.size();

    TransitionModel m{Vocabulary::from_tokens(std::move(tokens)), Matrix(n, n, 0.0),
                      std::vector<double>(n, 0.0), 0.0, {}};

    const auto& b_json = doc.at("b");
    if (b_json.size() != n) throw SchemaError("model file: b has wrong length");
    for (std::size_t i = 0; i < n; ++i) m.eos[i] = b_json[i].get<double>();

    for (const auto& trip : doc.at("B")) {
      if (!trip.is_array() || trip.size() != 3) {
        throw SchemaError("model file: malformed B triplet");
      }
      const auto i = trip[0].get<std::size_t>();
      const auto j = trip[1].get<std::size_t>();
      if (i >= n || j >= n) throw SchemaError("model file: B triplet out of range");
      m.b(i, j) = trip[2].get<double>();
    }
    for (const auto& trip : doc.at("counts")) {
      if (!trip.is_array() || trip.size() != 3) {
        throw SchemaError("model file: malformed count triplet");
      }
      const auto i = trip[0].get<std::size_t>();
      const auto j = trip[1].get<std::size_t>();
      if (i >= n || j > n) throw SchemaError("model file: count triplet out of range");
      m.counts.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          trip[2].get<std::uint64_t>()});
    }

    const double stored_zeta = doc.at("zeta").get<double>();
    m.zeta = sparsity(m.b);
    if (std::abs(stored_zeta - m.zeta) > 1e-12) {
      throw SchemaError("model file: stored zeta " + format_double(stored_zeta) +
                        " does not match matrix sparsity " + format_double(m.zeta));
    }
    return m;
  } catch (const json::exception& e) {
    throw SchemaError("model file '" + path + "': " + e.what());
  }
}

void save_merges(const MergeTable& table, const std::string& path) {
  std::ostringstream out;
  out << "#arplab-merges v1 " << (table.kind == MergeOrigin::Bpe ? "bpe" : "re") << "\n";
  for (const MergeRule& r : table.rules) {
    if (r.left.find_first_of(" \t\n\r") != std::string::npos ||
        r.right.find_first_of(" \t\n\r") != std::string::npos) {
      throw InvalidArgument("merge rule tokens must not contain whitespace");
    }
    out << r.left << '\t' << r.right << '\t' << r.step << "\n";
  }
  write_file(path, out.str());
}

MergeTable load_merges(const std::string& path, std::optional<MergeOrigin> expected) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("merge file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  MergeTable table;
  if (line == "#arplab-merges v1 bpe") {
    table.kind = MergeOrigin::Bpe;
  } else if (line == "#arplab-merges v1 re") {
    table.kind = MergeOrigin::Re;
  } else {
    throw SchemaError("merge file '" + path + "' has a bad header: '" + line + "'");
  }
  if (expected && *expected != table.kind) {
    throw TypeMismatch("merge file '" + path + "' holds a " +
                       (table.kind == MergeOrigin::Bpe ? std::string("bpe") : std::string("re")) +
                       " table but a " +
                       (*expected == MergeOrigin::Bpe ? std::string("bpe") : std::string("re")) +
                       " table was expected");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw SchemaError("merge file '" + path + "': malformed line " + std::to_string(line_no));
    }
    MergeRule r;
    r.left = line.substr(0, t1);
    r.right = line.substr(t1 + 1, t2 - t1 - 1);
    try {
      r.step = std::stoul(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw SchemaError("merge file '" + path + "': bad step on line " + std::to_string(line_no));
    }
    r.origin = table.kind;
    if (r.left.empty() || r.right.empty()) {
      throw SchemaError("merge file '" + path + "': empty token on line " + std::to_string(line_no));
    }
    table.rules.push_back(std::move(r));
  }
  return table;
}

void save_sequences(const std::vector<std::vector<std::string>>& seqs,
                    const std::string& path) {
  std::ostringstream out;
  for (const auto& s : seqs) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      check_token_storable(s[i]);
      if (i) out << ' ';
      out << s[i];
    }
    out << '\n';
  }
  write_file(path, out.str());
}

std::vector<std::vector<std::string>> load_sequences(const std::string& path) {
  return ingest(path).sequences;
}

std::string bound_report_to_json(const BoundReport& r) {
  json j;
  j["arp"] = {
      {"diverged", r.arp_diverged},
      {"exact", r.arp_exact ? json(*r.arp_exact) : json(nullptr)},
  };
  if (r.series_fallback) {
    j["arp"]["series_partial_sum"] = r.series_fallback->value;
    j["arp"]["series_terms"] = r.series_fallback->terms_used;
    j["arp"]["series_converged"] = r.series_fallback->converged;
  }
  j["bounds"] = {
      {"spectral", r.spectral ? json(*r.spectral) : json(nullptr)},
      {"variance", r.variance ? json(*r.variance) : json(nullptr)},
      {"inflow_outflow", r.inflow_outflow ? json(*r.inflow_outflow) : json(nullptr)},
  };
  j["details"] = {
      {"nuclear_b2", r.nuclear_b2},
      {"sigma_min_used", r.sigma_min_used},
      {"sigma_min_gershgorin", r.sigma_min_gershgorin},
      {"rank_b2", r.rank_b2},
  };
  j["preconditions"] = {
      {"zeta_n", r.pre.zeta_n},
      {"rho_b2", r.pre.rho_converged ? json(r.pre.rho_b2) : json(nullptr)},
      {"rho_converged", r.pre.rho_converged},
      {"spectral_ok", r.pre.spectral_ok},
      {"diag_dominant", r.pre.diag_dominant},
      {"sigma_min_positive", r.pre.sigma_min_positive},
  };
  if (r.pre.dominance_failure_row) {
    j["preconditions"]["dominance_failure_row"] = *r.pre.dominance_failure_row;
  }
  return j.dump(2) + "\n";
}

std::string repetition_report_to_json(const RepetitionReport& r, bool per_sequence) {
  json j;
  j["sequences"] = r.sequences;
  j["rep_w"] = r.rep_w;
  j["rep_r"] = r.rep_r;
  j["rep_n"] = json::object();
  for (const auto& [order, v] : r.rep_n) {
    j["rep_n"][std::to_string(order)] = {
        {"value", v.value}, {"sequences_used", v.used}, {"sequences_skipped", v.skipped}};
  }
  if (r.ppl_c) {
    j["ppl_c"] = {
        {"ratio", r.ppl_c->ratio},
        {"generated_perplexity", r.ppl_c->generated.value},
        {"reference_perplexity", r.ppl_c->reference.value},
        {"generated_floored_transitions", r.ppl_c->generated.floored},
        {"reference_floored_transitions", r.ppl_c->reference.floored},
    };
  }
  if (per_sequence) {
    j["per_sequence"] = json::array();
    for (const SequenceMetrics& m : r.per_sequence) {
      json e = {{"length", m.length}, {"rep_w", m.rep_w}, {"rep_r", m.rep_r}};
      e["rep_n"] = json::object();
      for (const auto& [order, v] : m.rep_n) {
        e["rep_n"][std::to_string(order)] = v ? json(*v) : json(nullptr);
      }
      j["per_sequence"].push_back(std::move(e));
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace arplab
