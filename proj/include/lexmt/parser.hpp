#ifndef LEXMT_PARSER_HPP
#define LEXMT_PARSER_HPP

// Source analysis: tokenization, chart parsing into sign lists with shared
// semantic variables, and skolemization of those variables.

#include <map>
#include <string>
#include <vector>

#include "chart.hpp"
#include "lexicon.hpp"

namespace lexmt {

/// Ordered sign list. Before skolemization `joint` is the authority: a tuple
/// whose features l1..ln hold the signs, so variables shared across signs stay
/// shared. After skolemization every sign is self-contained.
struct TransferRep {
  FeatureStructure joint;
  std::vector<LexicalSign> signs;
  bool skolemized = false;

  [[nodiscard]] std::size_t size() const { return signs.size(); }

  [[nodiscard]] std::vector<std::string> abbreviations() const {
    if (signs.empty()) return {};
    std::vector<NodeId> roots;
    for (std::size_t i = 0; i < signs.size(); ++i) roots.push_back(*joint.node_at({leaf_feature(i)}));
    return abbreviate(joint, roots);
  }

  [[nodiscard]] std::string text() const {
    std::string out;
    for (const auto& a : abbreviations()) out += (out.empty() ? "" : " ") + a;
    return out;
  }

  /// Build from independent signs (nothing shared between them).
  static TransferRep of(std::vector<LexicalSign> signs, const TypeHierarchy& h, bool skolemized) {
    TransferRep r;
    Workspace w(h);
    NodeId t = w.add(h.tuple());
    for (std::size_t i = 0; i < signs.size(); ++i) w.unify(*w.follow(t, {leaf_feature(i)}, true), w.import(signs[i].fs));
    r.joint = *w.extract(t);
    r.signs = std::move(signs);
    r.skolemized = skolemized;
    return r;
  }
};

struct ParseResult {
  std::vector<TransferRep> analyses;
  std::vector<FeatureStructure> trees;  // the complete edge behind each analysis
  std::string diagnostic;
  bool truncated = false;
};

/// Whitespace tokenization with punctuation stripped and contractions expanded.
inline std::vector<std::string> tokenize(std::string_view sentence, std::string_view language = {}) {
  static const std::map<std::string, std::vector<std::string>> spanish_contractions = {
      {"al", {"a", "el"}}, {"del", {"de", "el"}}, {"Al", {"a", "el"}}, {"Del", {"de", "el"}}};
  std::vector<std::string> out;
  for (auto w : dsl::words(sentence)) {
    while (!w.empty() && std::string_view(".,;:!?\"'()").find(w.back()) != std::string_view::npos) w.pop_back();
    while (!w.empty() && std::string_view("\"'(¿¡").find(w.front()) != std::string_view::npos) w.erase(0, 1);
    if (w.rfind("¿", 0) == 0 || w.rfind("¡", 0) == 0) w.erase(0, 2);
    if (w.empty()) continue;
    if (language == "spanish")
      if (auto it = spanish_contractions.find(w); it != spanish_contractions.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
        continue;
      }
    out.push_back(w);
  }
  return out;
}

namespace detail {

inline std::string joined(const std::vector<std::string>& tokens, std::size_t from, std::size_t to, char sep) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) s += (i > from ? std::string(1, sep) : "") + tokens[i];
  return s;
}

}  // namespace detail

inline ParseResult parse(const std::vector<std::string>& tokens, const Grammar& grammar, const Lexicon& lexicon,
                         ChartLimits limits = {}) {
  ParseResult result;
  if (&grammar.hierarchy() != &lexicon.hierarchy())
    throw std::invalid_argument("grammar and lexicon must share one type hierarchy");
  if (tokens.empty()) {
    result.diagnostic = "empty input";
    return result;
  }
  Chart<Span> chart(grammar, limits);
  std::vector<LexicalSign> items;
  std::vector<bool> covered(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t k = 1; k <= std::max<std::size_t>(1, lexicon.max_words()) && i + k <= tokens.size(); ++k) {
      auto found = lexicon.lookup(detail::joined(tokens, i, i + k, '_'));
      for (auto& s : found.signs) {
        chart.add_lexical(s.fs, Span{i, i + k}, items.size());
        items.push_back(std::move(s));
        for (std::size_t j = i; j < i + k; ++j) covered[j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!covered[i]) {
      result.diagnostic = "unknown " + lexicon.language() + " word '" + tokens[i] + "'";
      return result;
    }
  chart.run();
  result.truncated = chart.truncated();
  std::set<std::string> seen;
  const Edge<Span>* longest = nullptr;
  for (const auto& e : chart.edges()) {
    if (!longest || e.cover.size() > longest->cover.size()) longest = &e;
    if (e.cover.begin != 0 || e.cover.end != tokens.size()) continue;
    auto tree = rooted(e.fs, grammar.root());
    if (!tree) continue;
    std::vector<LexicalSign> signs;
    auto leaves = leaves_of(*tree, e.leaves());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      LexicalSign s = items[e.items[i]];
      s.fs = std::move(leaves[i]);
      signs.push_back(std::move(s));
    }
    TransferRep rep;
    rep.signs = std::move(signs);
    Workspace w(grammar.hierarchy());
    NodeId t = w.import(*tree);
    NodeId out = w.add(grammar.hierarchy().tuple());
    for (std::size_t i = 0; i < rep.signs.size(); ++i)
      w.unify(*w.follow(out, {leaf_feature(i)}, true), *w.follow(t, {leaf_feature(i)}, false));
    rep.joint = *w.extract(out);
    if (!seen.insert(render(rep.joint)).second) continue;
    result.analyses.push_back(std::move(rep));
    result.trees.push_back(std::move(*tree));
  }
  if (result.analyses.empty()) {
    result.diagnostic = "no complete " + grammar.root_name() + " analysis";
    if (longest) {
      result.diagnostic += "; longest constituent '" + detail::joined(tokens, longest->cover.begin, longest->cover.end, ' ') +
                           "' (" + grammar.hierarchy().name(longest->cat) + ", tokens " +
                           std::to_string(longest->cover.begin + 1) + "-" + std::to_string(longest->cover.end) + ")";
    }
    if (result.truncated) result.diagnostic += "; chart limit reached";
  }
  return result;
}

inline ParseResult parse(std::string_view sentence, const Grammar& grammar, const Lexicon& lexicon, ChartLimits limits = {}) {
  return parse(tokenize(sentence, lexicon.language()), grammar, lexicon, limits);
}

/// Replace semantic variables by integer constants. Each sign's first argument
/// is numbered first, in sign order; remaining variables follow in order of
/// first occurrence. Shared variables get one constant.
inline TransferRep skolemize(const TransferRep& rep) {
  if (rep.skolemized) throw std::invalid_argument("representation is already skolemized");
  TransferRep out;
  out.skolemized = true;
  if (rep.signs.empty()) {
    out.joint = rep.joint;
    return out;
  }
  const auto& h = rep.joint.hierarchy();
  Workspace w(h);
  NodeId root = w.import(rep.joint);
  int next = 1;
  auto bind = [&](std::size_t sign, std::size_t k) {
    auto a = w.follow(root, Path{leaf_feature(sign)} + sem_args_path() + Path{arg_feature(k)}, false);
    if (a && w.values(*a).empty()) w.set_values(*a, {Symbol(std::to_string(next++))});
  };
  for (std::size_t i = 0; i < rep.signs.size(); ++i) bind(i, 0);
  for (std::size_t i = 0; i < rep.signs.size(); ++i)
    for (std::size_t k = 1; k < kMaxArgs; ++k) bind(i, k);
  out.joint = *w.extract(root);
  for (std::size_t i = 0; i < rep.signs.size(); ++i) {
    LexicalSign s = rep.signs[i];
    s.fs = *out.joint.at({leaf_feature(i)});
    out.signs.push_back(std::move(s));
  }
  return out;
}

}  // namespace lexmt

#endif  // LEXMT_PARSER_HPP
