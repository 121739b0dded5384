#include "typosearch/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "typosearch/error.hpp"

namespace typosearch {
namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      extra = 2;
    } else if ((c >> 3) == 0x1E) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  };
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<TypoPair> make_pair(std::string_view wrong,
                                  std::string_view correct,
                                  std::uint64_t weight,
                                  const Alphabet& alphabet) {
  TypoPair pair{alphabet.canonicalize(wrong), alphabet.canonicalize(correct),
                weight};
  if (pair.wrong.empty() || pair.correct.empty() || pair.weight < 1) {
    return std::nullopt;
  }
  return pair;
}

// wrong<TAB>correct[<TAB>weight]
bool parse_tsv_line(std::string_view line, const Alphabet& alphabet,
                    ParseResult& result) {
  auto fields = split(line, '\t');
  if (fields.size() < 2 || fields.size() > 3) return false;
  std::uint64_t weight = 1;
  if (fields.size() == 3) {
    auto w = fields[2];
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
    if (ec != std::errc{} || ptr != w.data() + w.size()) return false;
  }
  auto pair = make_pair(fields[0], fields[1], weight, alphabet);
  if (!pair) return false;
  result.pairs.push_back(std::move(*pair));
  return true;
}

// Two leading columns (typo, correction); further columns are ignored.
bool parse_twitter_line(std::string_view line, const Alphabet& alphabet,
                        ParseResult& result) {
  auto fields = split(line, '\t');
  if (fields.size() < 2) return false;
  auto pair = make_pair(fields[0], fields[1], 1, alphabet);
  if (!pair) return false;
  result.pairs.push_back(std::move(*pair));
  return true;
}

// One commit per line with an "edits" array of {src:{text}, tgt:{text},
// is_typo}. Each edit that changes exactly one whitespace token becomes a
// pair; other edits count as skipped.
bool parse_github_line(std::string_view line, const Alphabet& alphabet,
                       ParseResult& result) {
  auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return false;
  auto edits = doc.find("edits");
  if (edits == doc.end() || !edits->is_array()) return false;
  for (const auto& edit : *edits) {
    try {
      if (edit.contains("is_typo") && !edit.at("is_typo").get<bool>()) {
        ++result.skipped;
        continue;
      }
      auto src = edit.at("src").at("text").get<std::string>();
      auto tgt = edit.at("tgt").at("text").get<std::string>();
      auto src_tokens = split_whitespace(src);
      auto tgt_tokens = split_whitespace(tgt);
      std::optional<std::size_t> changed;
      bool single = src_tokens.size() == tgt_tokens.size();
      for (std::size_t i = 0; single && i < src_tokens.size(); ++i) {
        if (src_tokens[i] == tgt_tokens[i]) continue;
        if (changed) single = false;
        changed = i;
      }
      std::optional<TypoPair> pair;
      if (single && changed) {
        pair = make_pair(src_tokens[*changed], tgt_tokens[*changed], 1,
                         alphabet);
      }
      if (pair) {
        result.pairs.push_back(std::move(*pair));
      } else {
        ++result.skipped;
      }
    } catch (const nlohmann::json::exception&) {
      ++result.skipped;
    }
  }
  return true;
}

}  // namespace

std::string_view edit_type_name(EditType type) noexcept {
  switch (type) {
    case EditType::kDeletion: return "deletion";
    case EditType::kInsertion: return "insertion";
    case EditType::kReplication: return "replication";
    case EditType::kSubstitution: return "substitution";
    case EditType::kTransposition: return "transposition";
  }
  return "unknown";
}

std::optional<EditType> parse_edit_type(std::string_view name) noexcept {
  for (auto t : kAllEditTypes) {
    if (edit_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) noexcept {
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "github-jsonl") return CorpusFormat::kGithubJsonl;
  if (name == "twitter-tsv") return CorpusFormat::kTwitterTsv;
  return std::nullopt;
}

ParseResult parse_corpus(std::istream& in, CorpusFormat format,
                         const Alphabet& alphabet) {
  if (!in.good()) throw Error(ErrorCode::kIo, "corpus stream is not readable");
  ParseResult result;
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = strip_cr(raw);
    if (line.empty() || line.front() == '#') continue;
    bool ok = valid_utf8(line);
    if (ok) {
      switch (format) {
        case CorpusFormat::kTsv:
          ok = parse_tsv_line(line, alphabet, result);
          break;
        case CorpusFormat::kTwitterTsv:
          ok = parse_twitter_line(line, alphabet, result);
          break;
        case CorpusFormat::kGithubJsonl:
          ok = parse_github_line(line, alphabet, result);
          break;
      }
    }
    if (!ok) ++result.skipped;
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "error while reading corpus");
  if (result.pairs.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "no parseable records (" + std::to_string(result.skipped) +
                    " skipped)");
  }
  return result;
}

ParseResult parse_corpus_file(const std::filesystem::path& path,
                              CorpusFormat format, const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_corpus(in, format, alphabet);
}

void write_corpus_tsv(std::ostream& out, const std::vector<TypoPair>& pairs) {
  for (const auto& p : pairs) {
    out << p.wrong << '\t' << p.correct;
    if (p.weight != 1) out << '\t' << p.weight;
    out << '\n';
  }
}

std::vector<Opcode> align(std::string_view correct, std::string_view wrong) {
  const std::size_t n = correct.size();
  const std::size_t m = wrong.size();
  // lcs[i][j] = LCS(correct[i:], wrong[j:])
  std::vector<std::uint32_t> lcs((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return lcs[i * (m + 1) + j];
  };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = correct[i] == wrong[j] ? at(i + 1, j + 1) + 1
                                        : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  std::vector<Opcode> ops;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && correct[i] == wrong[j]) {
      std::size_t i0 = i;
      std::size_t j0 = j;
      while (i < n && j < m && correct[i] == wrong[j]) {
        ++i;
        ++j;
      }
      ops.push_back({OpTag::kEqual, i0, i, j0, j});
      continue;
    }
    std::size_t i0 = i;
    std::size_t j0 = j;
    while ((i < n || j < m) && !(i < n && j < m && correct[i] == wrong[j])) {
      if (j == m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
        ++i;
      } else {
        ++j;
      }
    }
    OpTag tag = i == i0 ? OpTag::kInsert
                        : (j == j0 ? OpTag::kDelete : OpTag::kReplace);
    ops.push_back({tag, i0, i, j0, j});
  }
  return ops;
}

std::string replay_opcodes(std::string_view correct, std::string_view wrong,
                           const std::vector<Opcode>& ops) {
  std::string out;
  for (const auto& op : ops) {
    switch (op.tag) {
      case OpTag::kEqual:
        out.append(correct.substr(op.a_begin, op.a_end - op.a_begin));
        break;
      case OpTag::kDelete:
        break;
      case OpTag::kInsert:
      case OpTag::kReplace:
        out.append(wrong.substr(op.b_begin, op.b_end - op.b_begin));
        break;
    }
  }
  return out;
}

double normalize_position(std::size_t index, std::size_t reference_length) {
  if (reference_length == 0 || index >= reference_length) {
    throw std::out_of_range("normalize_position: index " +
                            std::to_string(index) + " outside length " +
                            std::to_string(reference_length));
  }
  if (reference_length == 1) return 0.0;
  return static_cast<double>(index) / static_cast<double>(reference_length - 1);
}

std::optional<EditEvent> classify_single_edit(const TypoPair& pair,
                                              std::string_view source) {
  const std::string& c = pair.correct;
  const std::string& w = pair.wrong;
  if (c == w) return std::nullopt;

  const std::size_t n = c.size();
  const std::size_t m = w.size();
  if (n > m + 1 || m > n + 1) return std::nullopt;

  // Trim the common prefix and suffix; a single edit leaves a middle of at
  // most two characters on either side.
  std::size_t p = 0;
  while (p < n && p < m && c[p] == w[p]) ++p;
  std::size_t q = 0;
  while (q < n - p && q < m - p && c[n - 1 - q] == w[m - 1 - q]) ++q;
  const std::string_view cm = std::string_view(c).substr(p, n - p - q);
  const std::string_view wm = std::string_view(w).substr(p, m - p - q);

  EditEvent ev;
  ev.source = std::string(source);
  ev.weight = pair.weight;

  if (cm.size() == 2 && wm.size() == 2 && cm[0] != cm[1] && wm[0] == cm[1] &&
      wm[1] == cm[0]) {
    ev.type = EditType::kTransposition;
    ev.key = cm[0];
    ev.other_key = cm[1];
    ev.position_index = p;
    ev.position_rel = normalize_position(p, m);
    return ev;
  }

  if (cm.empty() && wm.size() == 1) {
    const char x = wm[0];
    std::size_t j = p;
    const bool run = (j > 0 && w[j - 1] == x) || (j + 1 < m && w[j + 1] == x);
    if (run) {
      while (j > 0 && w[j - 1] == x) --j;
      ev.type = EditType::kReplication;
      ev.key = x;
      ev.other_key = x;
    } else {
      ev.type = EditType::kInsertion;
      ev.key = j > 0 ? c[j - 1] : c[0];
      ev.other_key = x;
    }
    ev.position_index = j;
    ev.position_rel = normalize_position(j, m);
    return ev;
  }

  if (cm.size() == 1 && wm.empty()) {
    std::size_t i = p;
    while (i > 0 && c[i - 1] == c[i]) --i;
    ev.type = EditType::kDeletion;
    ev.key = c[i];
    ev.position_index = i;
    ev.position_rel = normalize_position(i, n);
    return ev;
  }

  if (cm.size() == 1 && wm.size() == 1) {
    ev.type = EditType::kSubstitution;
    ev.key = cm[0];
    ev.other_key = wm[0];
    ev.position_index = p;
    ev.position_rel = normalize_position(p, m);
    return ev;
  }

  return std::nullopt;
}

ClassificationSummary classify_corpus(const std::vector<TypoPair>& pairs,
                                      std::string_view source) {
  ClassificationSummary summary;
  for (const auto& pair : pairs) {
    if (pair.wrong == pair.correct) {
      summary.identical += pair.weight;
      continue;
    }
    auto ev = classify_single_edit(pair, source);
    if (!ev) {
      summary.multi_edit += pair.weight;
      continue;
    }
    summary.per_type[to_index(ev->type)] += ev->weight;
    summary.events.push_back(std::move(*ev));
  }
  return summary;
}

}  // namespace typosearch
