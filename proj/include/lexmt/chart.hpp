#ifndef LEXMT_CHART_HPP
#define LEXMT_CHART_HPP

// Agenda-driven chart shared by the parser and the bag generator. The two
// differ only in what an edge covers: a span of adjacent tokens, or a subset of
// bag elements. Edge structures are tuples
//
//     [ m: <category>, l1: <sign>, l2: <sign>, ... ]
//
// holding the mother category and every covered sign in linear order, so a
// complete edge carries its fully instantiated sign sequence.

#include <bit>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_set>
#include <vector>

#include "fs_text.hpp"
#include "grammar.hpp"

namespace lexmt {

inline Symbol leaf_feature(std::size_t i) {
  static std::vector<Symbol> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  while (cache.size() <= i) cache.emplace_back("l" + std::to_string(cache.size() + 1));
  return cache[i];
}

/// Contiguous token span [begin, end).
struct Span {
  std::size_t begin = 0, end = 0;

  static Span single(std::size_t i) { return {i, i + 1}; }
  [[nodiscard]] bool precedes(const Span& right) const { return end == right.begin; }
  [[nodiscard]] Span joined(const Span& right) const { return {begin, right.end}; }
  [[nodiscard]] std::size_t size() const { return end - begin; }
  [[nodiscard]] std::string key() const { return std::to_string(begin) + "-" + std::to_string(end); }
  bool operator==(const Span&) const = default;
};

/// Set of bag indices. One machine word up to 64 elements, a word vector beyond.
class Coverage {
public:
  static Coverage single(std::size_t i) {
    Coverage c;
    c.set(i);
    return c;
  }

  static Coverage all(std::size_t n) {
    Coverage c;
    for (std::size_t i = 0; i < n; ++i) c.set(i);
    return c;
  }

  void set(std::size_t i) {
    if (i < 64) {
      low_ |= std::uint64_t{1} << i;
      return;
    }
    std::size_t w = i / 64 - 1;
    if (high_.size() <= w) high_.resize(w + 1, 0);
    high_[w] |= std::uint64_t{1} << (i % 64);
  }

  [[nodiscard]] bool test(std::size_t i) const {
    if (i < 64) return (low_ >> i) & 1;
    std::size_t w = i / 64 - 1;
    return w < high_.size() && ((high_[w] >> (i % 64)) & 1);
  }

  [[nodiscard]] bool precedes(const Coverage& o) const {  // i.e. disjoint
    if (low_ & o.low_) return false;
    for (std::size_t w = 0; w < std::min(high_.size(), o.high_.size()); ++w)
      if (high_[w] & o.high_[w]) return false;
    return true;
  }

  [[nodiscard]] Coverage joined(const Coverage& o) const {
    Coverage c = *this;
    c.low_ |= o.low_;
    if (c.high_.size() < o.high_.size()) c.high_.resize(o.high_.size(), 0);
    for (std::size_t w = 0; w < o.high_.size(); ++w) c.high_[w] |= o.high_[w];
    return c;
  }

  [[nodiscard]] std::size_t size() const {
    std::size_t n = static_cast<std::size_t>(std::popcount(low_));
    for (auto w : high_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  [[nodiscard]] std::string key() const {
    std::string k = std::to_string(low_);
    for (auto w : high_) k += "." + std::to_string(w);
    return k;
  }

  [[nodiscard]] std::string text() const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < 64 * (high_.size() + 1); ++i)
      if (test(i)) {
        out += (first ? "" : ",") + std::to_string(i);
        first = false;
      }
    return out + "}";
  }

  bool operator==(const Coverage& o) const {
    auto trimmed = [](std::vector<std::uint64_t> v) {
      while (!v.empty() && v.back() == 0) v.pop_back();
      return v;
    };
    return low_ == o.low_ && trimmed(high_) == trimmed(o.high_);
  }

private:
  std::uint64_t low_ = 0;
  std::vector<std::uint64_t> high_;
};

template <class Cover>
struct Edge {
  FeatureStructure fs;
  TypeId cat = 0;
  Cover cover;
  std::vector<std::size_t> items;  // linearization: item index per leaf
  std::string rule;                // empty for lexical edges
  int left = -1, right = -1;
  int unary_depth = 0;

  [[nodiscard]] std::size_t leaves() const { return items.size(); }
};

struct ChartLimits {
  std::size_t max_edges = 100000;
  int max_unary_chain = 3;
};

/// Lexical edge structure: [m: #1=sign, l1: #1].
inline FeatureStructure lexical_edge(const FeatureStructure& sign) {
  const auto& h = sign.hierarchy();
  Workspace w(h);
  NodeId t = w.add(h.tuple());
  NodeId s = w.import(sign);
  w.unify(*w.follow(t, {mother_feature()}, true), s);
  w.unify(*w.follow(t, {leaf_feature(0)}, true), s);
  return *w.extract(t);
}

/// Apply a rule to daughter edges (one per rule daughter). Leaves are
/// concatenated in daughter order.
inline std::optional<FeatureStructure> combine(const GrammarRule& rule, const std::vector<const FeatureStructure*>& daughters,
                                               const std::vector<std::size_t>& leaf_counts) {
  const auto& h = rule.fs.hierarchy();
  Workspace w(h);
  NodeId r = w.import(rule.fs);
  NodeId out = w.add(h.tuple());
  if (!w.unify(*w.follow(out, {mother_feature()}, true), *w.follow(r, {mother_feature()}, false))) return std::nullopt;
  std::size_t leaf = 0;
  for (std::size_t i = 0; i < daughters.size(); ++i) {
    NodeId d = w.import(*daughters[i]);
    if (!w.unify(*w.follow(r, {daughter_feature(i)}, false), *w.follow(d, {mother_feature()}, false))) return std::nullopt;
    for (std::size_t j = 0; j < leaf_counts[i]; ++j)
      if (!w.unify(*w.follow(out, {leaf_feature(leaf++)}, true), *w.follow(d, {leaf_feature(j)}, false)))
        return std::nullopt;
  }
  return w.extract(out);
}

/// Unify an edge's mother with the root category; the instantiated edge on success.
inline std::optional<FeatureStructure> rooted(const FeatureStructure& edge, const FeatureStructure& root) {
  return unify_at(edge, {mother_feature()}, root);
}

/// The instantiated signs of a complete edge, in linear order.
inline std::vector<FeatureStructure> leaves_of(const FeatureStructure& edge, std::size_t n) {
  std::vector<FeatureStructure> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*edge.at({leaf_feature(i)}));
  return out;
}

template <class Cover>
class Chart {
public:
  Chart(const Grammar& g, ChartLimits limits = {}) : g_(&g), limits_(limits) {}

  void add_lexical(const FeatureStructure& sign, Cover cover, std::size_t item) {
    Edge<Cover> e;
    e.fs = lexical_edge(sign);
    e.cat = Grammar::category_of(e.fs, *e.fs.node_at({mother_feature()}));
    e.cover = std::move(cover);
    e.items = {item};
    agenda_.push_back(std::move(e));
  }

  void run() {
    while (!agenda_.empty()) {
      if (edges_.size() >= limits_.max_edges) {
        truncated_ = true;
        return;
      }
      Edge<Cover> e = std::move(agenda_.front());
      agenda_.pop_front();
      if (!seen_.insert(key(e)).second) continue;
      edges_.push_back(std::move(e));
      int i = static_cast<int>(edges_.size()) - 1;
      for (const auto& rule : g_->rules()) {
        if (rule.arity == 1) {
          if (edges_[i].unary_depth < limits_.max_unary_chain) try_rule(rule, i, -1);
          continue;
        }
        for (int j = 0; j <= i; ++j) {
          if (edges_[j].cover.precedes(edges_[i].cover)) try_rule(rule, j, i);
          if (j != i && edges_[i].cover.precedes(edges_[j].cover)) try_rule(rule, i, j);
        }
      }
    }
  }

  [[nodiscard]] const std::vector<Edge<Cover>>& edges() const { return edges_; }
  [[nodiscard]] bool truncated() const { return truncated_; }

private:
  [[nodiscard]] bool quick(TypeId rule_cat, TypeId edge_cat) const {
    return g_->hierarchy().glb(rule_cat, edge_cat) != kBottom;
  }

  void try_rule(const GrammarRule& rule, int a, int b) {
    const auto& x = edges_[a];
    if (!quick(rule.daughter_cats[0], x.cat)) return;
    std::optional<FeatureStructure> fs;
    Edge<Cover> e;
    if (b < 0) {
      fs = combine(rule, {&x.fs}, {x.leaves()});
      if (!fs) return;
      e.cover = x.cover;
      e.items = x.items;
      e.unary_depth = x.unary_depth + 1;
    } else {
      const auto& y = edges_[b];
      if (!quick(rule.daughter_cats[1], y.cat)) return;
      fs = combine(rule, {&x.fs, &y.fs}, {x.leaves(), y.leaves()});
      if (!fs) return;
      e.cover = x.cover.joined(y.cover);
      e.items = x.items;
      e.items.insert(e.items.end(), y.items.begin(), y.items.end());
    }
    e.fs = std::move(*fs);
    e.cat = Grammar::category_of(e.fs, *e.fs.node_at({mother_feature()}));
    e.rule = rule.name;
    e.left = a;
    e.right = b;
    agenda_.push_back(std::move(e));
  }

  static std::string key(const Edge<Cover>& e) {
    std::string k = e.cover.key() + "|";
    for (auto i : e.items) k += std::to_string(i) + ",";
    return k + "|" + render(e.fs);
  }

  const Grammar* g_;
  ChartLimits limits_;
  std::deque<Edge<Cover>> agenda_;
  std::vector<Edge<Cover>> edges_;
  std::unordered_set<std::string> seen_;
  bool truncated_ = false;
};

}  // namespace lexmt

#endif  // LEXMT_CHART_HPP
