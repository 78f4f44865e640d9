#ifndef LEXMT_PIPELINE_HPP
#define LEXMT_PIPELINE_HPP

// End-to-end translation: parse, skolemize, derive entries, cover, build
// target bags, generate and realize. Also the golden-corpus checker and the
// bilexicon expansion listing.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "generator.hpp"
#include "lingware.hpp"
#include "parser.hpp"
#include "transfer.hpp"

namespace lexmt {

struct SessionConfig {
  std::string from = "english";
  std::string to = "spanish";
  int depth = 2;
  std::size_t max_results = 0;  // 0: no limit
  bool all = false;             // report every output, not just the first
  std::set<std::string> trace;  // parse, transfer, rules, generate
  ChartLimits limits;

  [[nodiscard]] bool tracing(const std::string& stage) const { return trace.count(stage) > 0; }
};

inline const std::vector<std::string>& trace_stages() {
  static const std::vector<std::string> stages{"parse", "transfer", "rules", "generate"};
  return stages;
}

/// Throws std::invalid_argument when the configuration cannot run on `lw`.
inline void validate(const SessionConfig& c, const Lingware& lw) {
  if (c.from == c.to) throw std::invalid_argument("source and target language are both " + c.from);
  for (const auto& lang : {c.from, c.to})
    if (!lw.has_language(lang)) throw std::invalid_argument("no " + lang + " lingware in " + lw.directory().string());
  if (!lw.has_transfer(c.from, c.to)) throw std::invalid_argument("no bilexicon between " + c.from + " and " + c.to);
  if (c.depth < 0) throw std::invalid_argument("derivation depth must be non-negative");
  for (const auto& s : c.trace)
    if (std::find(trace_stages().begin(), trace_stages().end(), s) == trace_stages().end())
      throw std::invalid_argument("unknown trace stage '" + s + "'");
}

enum class Stage { none, parse, transfer, generate };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::parse: return "parse";
    case Stage::transfer: return "transfer";
    case Stage::generate: return "generate";
    default: return "none";
  }
}

struct TranslationOutput {
  std::string text;
  std::string cover;  // entries used
  std::size_t analysis = 0;
  std::size_t cover_index = 0;
  std::vector<std::string> bag;
};

struct TranslationResult {
  std::string input;
  std::size_t analyses = 0;
  std::size_t covers = 0;
  std::vector<TranslationOutput> outputs;
  Stage failed = Stage::none;  // stage that stopped every path, when no output
  std::vector<std::string> diagnostics;
  std::vector<std::string> trace;

  [[nodiscard]] bool ok() const { return !outputs.empty(); }

  [[nodiscard]] std::vector<std::string> texts() const {
    std::vector<std::string> out;
    for (const auto& o : outputs) out.push_back(o.text);
    return out;
  }
};

inline TranslationResult translate(const std::string& text, const Lingware& lw, const SessionConfig& config) {
  validate(config, lw);
  TranslationResult result;
  result.input = text;
  const auto& sl_grammar = lw.grammar(config.from);
  const auto& tl_grammar = lw.grammar(config.to);
  const auto& transfer = lw.transfer(config.from, config.to);

  auto parsed = parse(text, sl_grammar, lw.lexicon(config.from), config.limits);
  result.analyses = parsed.analyses.size();
  if (parsed.analyses.empty()) {
    result.failed = Stage::parse;
    result.diagnostics.push_back("parse: " + parsed.diagnostic);
    return result;
  }

  struct Candidate {
    std::size_t analysis, index;
    Cover cover;
    std::shared_ptr<std::vector<BilexEntry>> derived;  // keeps the cover's entries alive
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < parsed.analyses.size(); ++a) {
    auto rep = skolemize(parsed.analyses[a]);
    if (config.tracing("parse")) result.trace.push_back("parse: analysis " + std::to_string(a + 1) + ": " + rep.text());
    std::vector<std::string> rule_trace;
    auto derived = std::make_shared<std::vector<BilexEntry>>(
        derive_entries(rep, transfer, config.depth, config.tracing("rules") ? &rule_trace : nullptr));
    for (auto& t : rule_trace) result.trace.push_back("rules: " + t);
    std::vector<const BilexEntry*> entries;
    for (const auto& e : transfer.entries()) entries.push_back(&e);
    for (const auto& e : *derived) entries.push_back(&e);
    auto covers = cover(rep, entries);
    if (covers.covers.empty())
      result.diagnostics.push_back("transfer: analysis " + std::to_string(a + 1) + ": " + covers.diagnostic);
    for (std::size_t i = 0; i < covers.covers.size(); ++i) {
      if (config.tracing("transfer"))
        result.trace.push_back("transfer: analysis " + std::to_string(a + 1) + " cover " + std::to_string(i + 1) + ": " +
                               covers.covers[i].text());
      candidates.push_back({a, i, std::move(covers.covers[i]), derived});
    }
  }
  result.covers = candidates.size();
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    auto kx = std::pair{x.cover.matches.size(), x.cover.derived()};
    auto ky = std::pair{y.cover.matches.size(), y.cover.derived()};
    return kx < ky;
  });

  std::set<std::string> seen;
  bool any_bag = false;
  for (const auto& c : candidates) {
    auto bags = build_tl_bag(c.cover);
    std::string where = "analysis " + std::to_string(c.analysis + 1) + " cover " + std::to_string(c.index + 1);
    if (bags.bags.empty()) {
      result.diagnostics.push_back("transfer: " + where + ": " + bags.diagnostic);
      continue;
    }
    any_bag = true;
    for (const auto& bag : bags.bags) {
      std::vector<std::string> bag_text;
      for (const auto& s : bag) bag_text.push_back(s.text());
      auto gen = generate(bag, tl_grammar, config.limits, config.tracing("generate"));
      if (config.tracing("generate")) {
        std::string b;
        for (const auto& s : bag_text) b += " " + s;
        result.trace.push_back("generate: " + where + ": bag" + b);
        for (auto& t : gen.trace) result.trace.push_back("generate:   " + t);
      }
      std::vector<std::string> failures;
      auto texts = realize_all(gen, &failures);
      for (auto& f : failures) result.diagnostics.push_back("generate: " + where + ": " + f);
      if (texts.empty() && failures.empty()) result.diagnostics.push_back("generate: " + where + ": " + gen.diagnostic);
      for (auto& t : texts) {
        if (!seen.insert(t).second) continue;
        result.outputs.push_back({t, c.cover.text(), c.analysis, c.index, bag_text});
        if (config.max_results && result.outputs.size() >= config.max_results) return result;
      }
    }
  }
  if (result.outputs.empty()) result.failed = any_bag ? Stage::generate : Stage::transfer;
  return result;
}

// -------------------------------------------------------------- golden corpus

enum class Expect { first, member, words };

struct CorpusLine {
  int line = 0;
  std::string source, expected;
  Expect mode = Expect::member;
};

struct CorpusOutcome {
  CorpusLine entry;
  bool passed = false;
  TranslationResult result;
};

struct CorpusReport {
  std::vector<CorpusOutcome> lines;
  [[nodiscard]] std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(lines.begin(), lines.end(), [](const auto& l) { return l.passed; }));
  }
  [[nodiscard]] std::size_t failed() const { return lines.size() - passed(); }
  [[nodiscard]] bool ok() const { return failed() == 0; }
};

class CorpusError : public std::runtime_error {
public:
  CorpusError(int line, const std::string& what) : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

private:
  int line_;
};

inline const char* expect_name(Expect e) {
  switch (e) {
    case Expect::first: return "first";
    case Expect::words: return "words";
    default: return "member";
  }
}

/// Tab-separated source, expected output and mode (first, member or words);
/// `#` starts a comment line. A missing mode means member.
inline std::vector<CorpusLine> read_corpus(std::string_view text) {
  std::vector<CorpusLine> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto trimmed = dsl::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    auto cols = dsl::split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3) throw CorpusError(number, "expected source<TAB>expected[<TAB>mode]");
    CorpusLine c{number, std::string(dsl::trim(cols[0])), std::string(dsl::trim(cols[1])), Expect::member};
    if (c.source.empty() || c.expected.empty()) throw CorpusError(number, "empty source or expected text");
    if (cols.size() == 3) {
      auto mode = dsl::trim(cols[2]);
      if (mode == "first") c.mode = Expect::first;
      else if (mode == "member") c.mode = Expect::member;
      else if (mode == "words") c.mode = Expect::words;
      else throw CorpusError(number, "unknown mode '" + std::string(mode) + "'");
    }
    out.push_back(std::move(c));
    if (end == text.size()) break;
  }
  return out;
}

/// Does some output contain every word of `expected` (as a multiset)?
inline bool realizes_words(const std::vector<std::string>& outputs, const std::string& expected) {
  auto want = dsl::words(expected);
  std::sort(want.begin(), want.end());
  for (const auto& o : outputs) {
    auto have = dsl::words(o);
    std::sort(have.begin(), have.end());
    if (std::includes(have.begin(), have.end(), want.begin(), want.end())) return true;
  }
  return false;
}

inline bool meets(const TranslationResult& r, const CorpusLine& c) {
  auto texts = r.texts();
  switch (c.mode) {
    case Expect::first: return !texts.empty() && texts.front() == c.expected;
    case Expect::words: return realizes_words(texts, c.expected);
    default: return std::find(texts.begin(), texts.end(), c.expected) != texts.end();
  }
}

inline CorpusReport check_corpus(const std::vector<CorpusLine>& corpus, const Lingware& lw, SessionConfig config) {
  config.max_results = 0;  // membership needs every output
  CorpusReport report;
  for (const auto& c : corpus) {
    CorpusOutcome o{c, false, translate(c.source, lw, config)};
    o.passed = meets(o.result, c);
    report.lines.push_back(std::move(o));
  }
  return report;
}

// ------------------------------------------------------------------ expansion

/// Listed entries followed by everything the rules derive from them, with
/// no relevance filter.
inline std::vector<BilexEntry> expand(const Lingware& lw, const SessionConfig& config,
                                      std::vector<std::string>* trace = nullptr) {
  validate(config, lw);
  const auto& t = lw.transfer(config.from, config.to);
  std::vector<BilexEntry> out(t.entries().begin(), t.entries().end());
  const auto& derived = t.derivable(config.depth, trace);
  out.insert(out.end(), derived.begin(), derived.end());
  return out;
}

// ---------------------------------------------------------------------- bags

/// Read a bag written as sign references with constant arguments, e.g.
/// `juan1(1) amar1[syn.tense=pres](2,1,3) a1(3) maría1(3)`.
inline std::vector<LexicalSign> read_bag(std::string_view text, const Lexicon& lex) {
  std::vector<LexicalSign> bag;
  std::string clean;
  for (const auto& l : dsl::split(text, '\n')) clean += dsl::strip_comment(l) + " ";
  for (const auto& ref : parse_sign_refs(clean)) {
    if (ref.head != SignRef::Head::lexicon || ref.context)
      throw std::invalid_argument("bag elements must be lexicon signs: " + ref.text());
    const auto* sign = lex.find(ref.name);
    if (!sign) throw std::invalid_argument("no " + lex.language() + " sign '" + ref.name + "'");
    StructureBuilder b(lex.hierarchy());
    b.put({}, sign->fs);
    for (const auto& [p, v] : ref.constraints)
      if (!b.set(make_path(p), v)) throw std::invalid_argument(ref.text() + ": " + b.failure());
    for (std::size_t k = 0; k < ref.args.size(); ++k) {
      const auto& a = ref.args[k];
      if (a.size() != 1 || a[0].empty() || !std::all_of(a[0].begin(), a[0].end(), ::isdigit))
        throw std::invalid_argument(ref.text() + ": bag arguments are integer constants");
      if (!b.set(sem_args_path() + Path{arg_feature(k)}, "\"" + a[0] + "\""))
        throw std::invalid_argument(ref.text() + ": " + b.failure());
    }
    auto fs = b.build();
    if (!fs) throw std::invalid_argument(ref.text() + ": " + b.failure());
    LexicalSign s = *sign;
    s.fs = std::move(*fs);
    bag.push_back(std::move(s));
  }
  return bag;
}

}  // namespace lexmt

#endif  // LEXMT_PIPELINE_HPP
