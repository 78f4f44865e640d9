#ifndef LEXMT_GENERATOR_HPP
#define LEXMT_GENERATOR_HPP

// Bag generation: every ordering of a multiset of target signs that the
// target grammar accepts. The chart version combines edges over disjoint
// subsets of the bag; the brute-force version parses every permutation and
// serves as its oracle.

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chart.hpp"
#include "lexicon.hpp"

namespace lexmt {

struct GeneratedSequence {
  std::vector<std::size_t> order;  // bag index per position
  std::vector<LexicalSign> signs;  // instantiated by generation
};

struct GenerationResult {
  std::vector<GeneratedSequence> sequences;
  std::string diagnostic;
  bool truncated = false;
  std::vector<std::string> trace;  // chart edges, when requested
};

class OracleLimitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string order_key(const std::vector<std::size_t>& order) {
  std::string k;
  for (auto i : order) k += std::to_string(i) + ",";
  return k;
}

inline GeneratedSequence sequence_from(const FeatureStructure& tree, const std::vector<std::size_t>& order,
                                       const std::vector<LexicalSign>& bag) {
  GeneratedSequence s;
  s.order = order;
  auto leaves = leaves_of(tree, order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    LexicalSign sign = bag[order[i]];
    sign.fs = std::move(leaves[i]);
    s.signs.push_back(std::move(sign));
  }
  return s;
}

inline std::string bag_text(const std::vector<LexicalSign>& signs, const std::vector<std::size_t>& order) {
  std::string out;
  for (auto i : order) out += (out.empty() ? "" : " ") + signs[i].text();
  return out;
}

}  // namespace detail

inline GenerationResult generate(const std::vector<LexicalSign>& bag, const Grammar& grammar, ChartLimits limits = {},
                                 bool trace = false) {
  GenerationResult result;
  if (bag.empty()) {
    result.diagnostic = "empty bag";
    return result;
  }
  Chart<Coverage> chart(grammar, limits);
  for (std::size_t i = 0; i < bag.size(); ++i) chart.add_lexical(bag[i].fs, Coverage::single(i), i);
  chart.run();
  result.truncated = chart.truncated();
  const auto full = Coverage::all(bag.size());
  std::set<std::string> seen;
  const Edge<Coverage>* largest = nullptr;
  const auto& edges = chart.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (trace) {
      std::string line = "#" + std::to_string(k) + " " + e.cover.text() + " [" + detail::order_key(e.items) + "] " +
                         grammar.hierarchy().name(e.cat) + " " + (e.rule.empty() ? "lex" : e.rule);
      if (e.left >= 0) line += " <- #" + std::to_string(e.left) + (e.right >= 0 ? " #" + std::to_string(e.right) : "");
      result.trace.push_back(std::move(line));
    }
    if (!largest || e.cover.size() > largest->cover.size()) largest = &e;
    if (!(e.cover == full)) continue;
    auto tree = rooted(e.fs, grammar.root());
    if (!tree || !seen.insert(detail::order_key(e.items)).second) continue;
    result.sequences.push_back(detail::sequence_from(*tree, e.items, bag));
  }
  if (result.sequences.empty()) {
    result.diagnostic = "no ordering of the bag is a complete " + grammar.root_name();
    if (largest)
      result.diagnostic += "; largest constituent " + grammar.hierarchy().name(largest->cat) + " covers " +
                           std::to_string(largest->cover.size()) + " of " + std::to_string(bag.size()) + ": " +
                           detail::bag_text(bag, largest->items);
    if (result.truncated) result.diagnostic += "; chart limit reached";
  }
  return result;
}

/// Try every permutation of the bag with a CKY parse. Cells of a permutation
/// prefix are computed once and shared by all its extensions, but nothing is
/// pruned: each permutation is parsed in full.
inline GenerationResult brute_force_generate(const std::vector<LexicalSign>& bag, const Grammar& grammar,
                                             std::size_t limit = 8, ChartLimits limits = {}) {
  if (bag.size() > limit)
    throw OracleLimitError("bag of " + std::to_string(bag.size()) + " elements exceeds the oracle limit of " +
                           std::to_string(limit));
  GenerationResult result;
  if (bag.empty()) {
    result.diagnostic = "empty bag";
    return result;
  }
  struct Item {
    FeatureStructure fs;
    TypeId cat;
    std::size_t leaves;
    int unary_depth;
  };
  using Cell = std::vector<Item>;
  const std::size_t n = bag.size();
  const auto& h = grammar.hierarchy();
  auto cat_of = [](const FeatureStructure& fs) { return Grammar::category_of(fs, *fs.node_at({mother_feature()})); };

  auto add = [](Cell& cell, std::set<std::string>& seen, Item item) {
    if (seen.insert(render(item.fs)).second) cell.push_back(std::move(item));
  };
  // Unary closure in place, same chain cap as the chart.
  auto close = [&](Cell& cell, std::set<std::string>& seen) {
    for (std::size_t k = 0; k < cell.size(); ++k) {
      if (cell[k].unary_depth >= limits.max_unary_chain) continue;
      for (const auto& rule : grammar.rules()) {
        if (rule.arity != 1 || h.glb(rule.daughter_cats[0], cell[k].cat) == kBottom) continue;
        auto fs = combine(rule, {&cell[k].fs}, {cell[k].leaves});
        if (!fs) continue;
        TypeId c = cat_of(*fs);
        add(cell, seen, Item{std::move(*fs), c, cell[k].leaves, cell[k].unary_depth + 1});
      }
    }
  };

  std::vector<Cell> lexical(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto fs = lexical_edge(bag[i].fs);
    TypeId c = cat_of(fs);
    lexical[i].push_back(Item{std::move(fs), c, 1, 0});
  }

  // table[end - 1][begin] = cell for the span [begin, end) of the current prefix
  std::vector<std::vector<Cell>> table;
  std::vector<std::size_t> perm;
  std::vector<bool> used(n, false);
  std::set<std::string> accepted;

  auto extend = [&](std::size_t x) {
    std::size_t end = perm.size();  // x sits at position end - 1
    std::vector<Cell> column(end);
    {
      std::set<std::string> seen;
      for (const auto& it : lexical[x]) add(column[end - 1], seen, it);
      close(column[end - 1], seen);
    }
    for (std::size_t b = end - 1; b-- > 0;) {
      std::set<std::string> seen;
      Cell& cell = column[b];
      for (std::size_t mid = b + 1; mid < end; ++mid) {
        const Cell& left = table[mid - 1][b];
        const Cell& right = column[mid];
        for (const auto& l : left)
          for (const auto& r : right)
            for (const auto& rule : grammar.rules()) {
              if (rule.arity != 2 || h.glb(rule.daughter_cats[0], l.cat) == kBottom ||
                  h.glb(rule.daughter_cats[1], r.cat) == kBottom)
                continue;
              auto fs = combine(rule, {&l.fs, &r.fs}, {l.leaves, r.leaves});
              if (!fs) continue;
              TypeId c = cat_of(*fs);
              add(cell, seen, Item{std::move(*fs), c, l.leaves + r.leaves, 0});
            }
      }
      close(cell, seen);
    }
    table.push_back(std::move(column));
  };

  std::function<void()> search = [&]() {
    if (perm.size() == n) {
      for (const auto& it : table[n - 1][0]) {
        auto tree = rooted(it.fs, grammar.root());
        if (!tree) continue;
        if (accepted.insert(detail::order_key(perm)).second) result.sequences.push_back(detail::sequence_from(*tree, perm, bag));
        break;
      }
      return;
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (used[x]) continue;
      used[x] = true;
      perm.push_back(x);
      extend(x);
      search();
      table.pop_back();
      perm.pop_back();
      used[x] = false;
    }
  };
  search();
  if (result.sequences.empty()) result.diagnostic = "no permutation of the bag is a complete " + grammar.root_name();
  return result;
}

/// Surface string of a generated sequence.
inline std::string realize(const std::vector<LexicalSign>& sequence) {
  std::vector<std::string> words;
  for (const auto& s : sequence)
    for (const auto& w : dsl::words(synthesize(s))) words.push_back(w);
  if (!sequence.empty() && sequence.front().language() == "spanish") {
    std::vector<std::string> merged;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i + 1 < words.size() && words[i + 1] == "el" && (words[i] == "a" || words[i] == "de")) {
        merged.push_back(words[i] == "a" ? "al" : "del");
        ++i;
      } else {
        merged.push_back(words[i]);
      }
    }
    words = std::move(merged);
  }
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  if (!out.empty() && std::islower(static_cast<unsigned char>(out[0])))
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

/// Realized strings of a generation result, deduplicated, in sequence order.
/// Sequences that cannot be synthesized are reported in `failures`.
inline std::vector<std::string> realize_all(const GenerationResult& r, std::vector<std::string>* failures = nullptr) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : r.sequences) {
    try {
      auto text = realize(s.signs);
      if (seen.insert(text).second) out.push_back(std::move(text));
    } catch (const SynthesisError& e) {
      if (failures) failures->push_back(e.what());
    }
  }
  return out;
}

}  // namespace lexmt

#endif  // LEXMT_GENERATOR_HPP
