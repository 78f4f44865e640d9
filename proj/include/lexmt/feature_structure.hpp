#ifndef LEXMT_FEATURE_STRUCTURE_HPP
#define LEXMT_FEATURE_STRUCTURE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symbol.hpp"
#include "type_hierarchy.hpp"

namespace lexmt {

using NodeId = std::uint32_t;
using Path = std::vector<Symbol>;

/// "syn.agr" -> {syn, agr}; the empty string is the empty path.
inline Path make_path(std::string_view dotted) {
  Path p;
  if (dotted.empty()) return p;
  for (const auto& part : dsl::split(dotted, '.')) p.emplace_back(part);
  return p;
}

inline std::string path_string(const Path& p) {
  std::string out;
  for (const auto& s : p) {
    if (!out.empty()) out += '.';
    out += s.str();
  }
  return out;
}

inline Path operator+(Path a, const Path& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// Immutable typed feature structure: a rooted DAG whose nodes carry a type,
/// an optional finite set of atomic values, and feature arcs. Reentrancy is
/// node sharing. An empty value set leaves the node unconstrained; a
/// non-empty set admits any of its members, so a singleton is an ordinary
/// atom and a larger set is a join of atoms.
///
/// All structures point at the hierarchy they were built against, which must
/// outlive them.
class FeatureStructure {
public:
  struct Arc {
    Symbol feature;
    NodeId target;
  };

  struct Node {
    TypeId type;
    std::uint32_t arc_begin;
    std::uint32_t arc_count;
    std::uint32_t value_begin;
    std::uint32_t value_count;
  };

  FeatureStructure() = default;
  explicit FeatureStructure(const TypeHierarchy& h) : FeatureStructure(h, h.top()) {}
  FeatureStructure(const TypeHierarchy& h, TypeId type) : h_(&h) { nodes_.push_back({type, 0, 0, 0, 0}); }
  FeatureStructure(const TypeHierarchy& h, TypeId type, std::vector<Symbol> values) : h_(&h) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    nodes_.push_back({type, 0, 0, 0, static_cast<std::uint32_t>(values.size())});
    values_ = std::move(values);
  }

  [[nodiscard]] bool valid() const { return h_ != nullptr && !nodes_.empty(); }
  [[nodiscard]] const TypeHierarchy& hierarchy() const { return *h_; }
  [[nodiscard]] NodeId root() const { return 0; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] TypeId type(NodeId n = 0) const { return nodes_[n].type; }
  [[nodiscard]] const std::string& type_name(NodeId n = 0) const { return h_->name(nodes_[n].type); }

  [[nodiscard]] std::span<const Arc> arcs(NodeId n) const {
    const auto& node = nodes_[n];
    return {arcs_.data() + node.arc_begin, node.arc_count};
  }

  [[nodiscard]] std::span<const Symbol> values(NodeId n) const {
    const auto& node = nodes_[n];
    return {values_.data() + node.value_begin, node.value_count};
  }

  [[nodiscard]] std::optional<NodeId> child(NodeId n, Symbol feature) const {
    for (const auto& a : arcs(n))
      if (a.feature == feature) return a.target;
    return std::nullopt;
  }

  [[nodiscard]] std::optional<NodeId> node_at(const Path& p, NodeId from = 0) const {
    NodeId n = from;
    for (const auto& f : p) {
      auto c = child(n, f);
      if (!c) return std::nullopt;
      n = *c;
    }
    return n;
  }

  [[nodiscard]] bool has(const Path& p) const { return node_at(p).has_value(); }

  /// Type at the path, or nullopt when the path is absent.
  [[nodiscard]] std::optional<TypeId> type_at(const Path& p) const {
    auto n = node_at(p);
    if (!n) return std::nullopt;
    return nodes_[*n].type;
  }

  /// Single atomic value at the path, if exactly one.
  [[nodiscard]] std::optional<Symbol> atom_at(const Path& p) const {
    auto n = node_at(p);
    if (!n || nodes_[*n].value_count != 1) return std::nullopt;
    return values_[nodes_[*n].value_begin];
  }

  /// Copy of the substructure at `p`.
  [[nodiscard]] std::optional<FeatureStructure> at(const Path& p) const {
    auto n = node_at(p);
    if (!n) return std::nullopt;
    return subgraph(*n);
  }

  [[nodiscard]] FeatureStructure subgraph(NodeId n) const {
    std::vector<NodeId> keep;
    std::vector<std::int64_t> map(nodes_.size(), -1);
    collect(n, map, keep);
    return rebuild(keep, map, {});
  }

  /// Copy with the final arc of `p` removed (unreachable nodes dropped).
  [[nodiscard]] FeatureStructure without(const Path& p) const {
    if (p.empty()) return FeatureStructure(*h_);
    Path parent(p.begin(), p.end() - 1);
    auto host = node_at(parent);
    if (!host || !child(*host, p.back())) return *this;
    std::pair<NodeId, Symbol> cut{*host, p.back()};
    std::vector<NodeId> keep;
    std::vector<std::int64_t> map(nodes_.size(), -1);
    collect(0, map, keep, &cut);
    return rebuild(keep, map, cut);
  }

  /// Number of arcs entering each node.
  [[nodiscard]] std::vector<int> indegrees() const {
    std::vector<int> in(nodes_.size(), 0);
    for (const auto& a : arcs_) ++in[a.target];
    return in;
  }

private:
  friend class Workspace;

  void collect(NodeId n, std::vector<std::int64_t>& map, std::vector<NodeId>& keep,
               const std::pair<NodeId, Symbol>* cut = nullptr) const {
    if (map[n] >= 0) return;
    map[n] = static_cast<std::int64_t>(keep.size());
    keep.push_back(n);
    for (const auto& a : arcs(n)) {
      if (cut && cut->first == n && cut->second == a.feature) continue;
      collect(a.target, map, keep, cut);
    }
  }

  FeatureStructure rebuild(const std::vector<NodeId>& keep, const std::vector<std::int64_t>& map,
                           std::optional<std::pair<NodeId, Symbol>> cut) const {
    FeatureStructure out;
    out.h_ = h_;
    out.nodes_.reserve(keep.size());
    for (NodeId old : keep) {
      const auto& src = nodes_[old];
      Node n{src.type, static_cast<std::uint32_t>(out.arcs_.size()), 0, static_cast<std::uint32_t>(out.values_.size()),
             src.value_count};
      for (const auto& a : arcs(old)) {
        if (cut && cut->first == old && cut->second == a.feature) continue;
        out.arcs_.push_back({a.feature, static_cast<NodeId>(map[a.target])});
        ++n.arc_count;
      }
      for (const auto& v : values(old)) out.values_.push_back(v);
      out.nodes_.push_back(n);
    }
    return out;
  }

  const TypeHierarchy* h_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;  // per node, sorted by feature id
  std::vector<Symbol> values_;
};

/// Mutable union-find arena used to build and unify structures. Inputs are
/// copied in, so unification never touches its arguments.
class Workspace {
public:
  explicit Workspace(const TypeHierarchy& h) : h_(&h) {}

  [[nodiscard]] const TypeHierarchy& hierarchy() const { return *h_; }
  [[nodiscard]] bool failed() const { return failed_; }
  [[nodiscard]] const std::string& failure() const { return failure_; }

  NodeId add(TypeId type) {
    nodes_.push_back({type, {}, {}});
    parent_.push_back(static_cast<NodeId>(nodes_.size() - 1));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId import(const FeatureStructure& fs) {
    auto offset = static_cast<NodeId>(nodes_.size());
    for (NodeId i = 0; i < fs.node_count(); ++i) {
      WNode n{fs.type(i), {}, {}};
      auto vs = fs.values(i);
      n.values.assign(vs.begin(), vs.end());
      for (const auto& a : fs.arcs(i)) n.arcs.push_back({a.feature, a.target + offset});
      nodes_.push_back(std::move(n));
      parent_.push_back(static_cast<NodeId>(nodes_.size() - 1));
    }
    return offset;
  }

  NodeId find(NodeId n) {
    while (parent_[n] != n) {
      parent_[n] = parent_[parent_[n]];
      n = parent_[n];
    }
    return n;
  }

  [[nodiscard]] TypeId type(NodeId n) { return nodes_[find(n)].type; }

  /// Follow (and optionally create) a path. Returns nullopt when the path is
  /// absent and not created, or when creating it clashes with a type.
  std::optional<NodeId> follow(NodeId from, const Path& p, bool create) {
    NodeId n = find(from);
    for (const auto& f : p) {
      auto c = arc(n, f);
      if (!c) {
        if (!create) return std::nullopt;
        if (!constrain_type(n, h_->feature_host(f))) return std::nullopt;
        n = find(n);
        auto value_type = h_->constraint(nodes_[n].type, f);
        if (!value_type) return fail("feature " + f.str() + " not appropriate for " + h_->name(nodes_[n].type));
        NodeId fresh = add(*value_type);
        auto& arcs = nodes_[n].arcs;
        arcs.insert(std::lower_bound(arcs.begin(), arcs.end(), f, [](const auto& a, Symbol s) { return a.first < s; }),
                    {f, fresh});
        c = fresh;
      }
      n = find(*c);
    }
    return n;
  }

  bool constrain_type(NodeId n, TypeId t) {
    n = find(n);
    TypeId g = h_->glb(nodes_[n].type, t);
    if (g == kBottom) return failb("type clash: " + h_->name(nodes_[n].type) + " & " + h_->name(t));
    if (g != nodes_[n].type) {
      nodes_[n].type = g;
      dirty_.push_back(n);
    }
    return settle();
  }

  /// Replace a node's type outright (lexical rules that change a sign's
  /// type); appropriateness is re-checked for the node's features.
  bool force_type(NodeId n, TypeId t) {
    n = find(n);
    nodes_[n].type = t;
    dirty_.push_back(n);
    return settle();
  }

  bool constrain_values(NodeId n, std::vector<Symbol> values) {
    n = find(n);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (!merge_values(nodes_[n].values, values)) return failb("atomic value clash");
    return true;
  }

  /// Overwrite the value set (used when assigning fresh constants).
  void set_values(NodeId n, std::vector<Symbol> values) {
    std::sort(values.begin(), values.end());
    nodes_[find(n)].values = std::move(values);
  }

  [[nodiscard]] std::vector<Symbol> values(NodeId n) { return nodes_[find(n)].values; }

  std::vector<std::pair<Symbol, NodeId>> arcs(NodeId n) {
    auto out = nodes_[find(n)].arcs;
    for (auto& a : out) a.second = find(a.second);
    return out;
  }

  bool unify(NodeId a, NodeId b) {
    if (failed_) return false;
    std::vector<std::pair<NodeId, NodeId>> stack{{a, b}};
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      TypeId g = h_->glb(nodes_[x].type, nodes_[y].type);
      if (g == kBottom) return failb("type clash: " + h_->name(nodes_[x].type) + " & " + h_->name(nodes_[y].type));
      if (!merge_values(nodes_[x].values, nodes_[y].values)) return failb("atomic value clash");
      parent_[y] = x;
      nodes_[x].type = g;
      auto ya = std::move(nodes_[y].arcs);
      auto& xa = nodes_[x].arcs;
      std::vector<std::pair<Symbol, NodeId>> merged;
      merged.reserve(xa.size() + ya.size());
      std::size_t i = 0, j = 0;
      while (i < xa.size() || j < ya.size()) {
        if (j == ya.size() || (i < xa.size() && xa[i].first < ya[j].first)) {
          merged.push_back(xa[i++]);
        } else if (i == xa.size() || ya[j].first < xa[i].first) {
          merged.push_back(ya[j++]);
        } else {
          merged.push_back(xa[i]);
          stack.emplace_back(xa[i].second, ya[j].second);
          ++i;
          ++j;
        }
      }
      xa = std::move(merged);
      dirty_.push_back(x);
    }
    return settle();
  }

  /// Compact the structure reachable from `root`. Fails on cycles.
  std::optional<FeatureStructure> extract(NodeId root) {
    if (failed_) return std::nullopt;
    FeatureStructure out;
    out.h_ = h_;
    std::unordered_map<NodeId, NodeId> map;
    std::unordered_map<NodeId, int> state;
    std::vector<NodeId> order;
    // Iterative DFS: preorder numbering, arcs in feature-id order.
    struct Frame {
      NodeId node;
      std::size_t next;
    };
    std::vector<Frame> stack;
    auto enter = [&](NodeId n) {
      map[n] = static_cast<NodeId>(order.size());
      order.push_back(n);
      state[n] = 1;
      stack.push_back({n, 0});
    };
    enter(find(root));
    while (!stack.empty()) {
      auto& fr = stack.back();
      const auto& arcs = nodes_[fr.node].arcs;
      if (fr.next == arcs.size()) {
        state[fr.node] = 2;
        stack.pop_back();
        continue;
      }
      NodeId c = find(arcs[fr.next++].second);
      auto st = state.find(c);
      if (st == state.end()) {
        enter(c);
      } else if (st->second == 1) {
        failure_ = "cyclic structure";
        failed_ = true;
        return std::nullopt;
      }
    }
    out.nodes_.reserve(order.size());
    for (NodeId n : order) {
      const auto& w = nodes_[n];
      FeatureStructure::Node node{w.type, static_cast<std::uint32_t>(out.arcs_.size()),
                                  static_cast<std::uint32_t>(w.arcs.size()), static_cast<std::uint32_t>(out.values_.size()),
                                  static_cast<std::uint32_t>(w.values.size())};
      for (const auto& a : w.arcs) out.arcs_.push_back({a.first, map.at(find(a.second))});
      out.values_.insert(out.values_.end(), w.values.begin(), w.values.end());
      out.nodes_.push_back(node);
    }
    return out;
  }

private:
  struct WNode {
    TypeId type;
    std::vector<Symbol> values;
    std::vector<std::pair<Symbol, NodeId>> arcs;  // sorted by feature id
  };

  std::optional<NodeId> arc(NodeId n, Symbol f) {
    for (const auto& a : nodes_[n].arcs)
      if (a.first == f) return a.second;
    return std::nullopt;
  }

  static bool merge_values(std::vector<Symbol>& into, const std::vector<Symbol>& other) {
    if (other.empty()) return true;
    if (into.empty()) {
      into = other;
      return true;
    }
    std::vector<Symbol> both;
    std::set_intersection(into.begin(), into.end(), other.begin(), other.end(), std::back_inserter(both));
    if (both.empty()) return false;
    into = std::move(both);
    return true;
  }

  // Propagate appropriateness from nodes whose type or arcs changed: a node's
  // type must host all of its features, and every value must satisfy the
  // feature's constraint. Types only get more specific, so this terminates.
  bool settle() {
    while (!dirty_.empty()) {
      NodeId n = find(dirty_.back());
      dirty_.pop_back();
      TypeId t = nodes_[n].type;
      for (const auto& a : nodes_[n].arcs) {
        t = h_->glb(t, h_->feature_host(a.first));
        if (t == kBottom) return failb("feature " + a.first.str() + " not appropriate for " + h_->name(nodes_[n].type));
      }
      nodes_[n].type = t;
      for (const auto& a : nodes_[n].arcs) {
        auto c = h_->constraint(t, a.first);
        if (!c) return failb("feature " + a.first.str() + " not appropriate for " + h_->name(t));
        NodeId v = find(a.second);
        TypeId g = h_->glb(nodes_[v].type, *c);
        if (g == kBottom) return failb("value of " + a.first.str() + " violates " + h_->name(*c));
        if (g != nodes_[v].type) {
          nodes_[v].type = g;
          dirty_.push_back(v);
        }
      }
    }
    return true;
  }

  bool failb(std::string why) {
    failed_ = true;
    failure_ = std::move(why);
    dirty_.clear();
    return false;
  }

  std::nullopt_t fail(std::string why) {
    failb(std::move(why));
    return std::nullopt;
  }

  const TypeHierarchy* h_;
  std::vector<WNode> nodes_;
  std::vector<NodeId> parent_;
  std::vector<NodeId> dirty_;
  bool failed_ = false;
  std::string failure_;
};

/// Most general structure subsumed by both inputs, or nullopt on a type
/// clash, atomic value clash, appropriateness violation or cycle.
inline std::optional<FeatureStructure> unify(const FeatureStructure& a, const FeatureStructure& b) {
  Workspace w(a.hierarchy());
  NodeId ra = w.import(a);
  NodeId rb = w.import(b);
  if (!w.unify(ra, rb)) return std::nullopt;
  return w.extract(ra);
}

/// Unify `b` into the substructure of `a` at `p`, creating the path.
inline std::optional<FeatureStructure> unify_at(const FeatureStructure& a, const Path& p, const FeatureStructure& b) {
  Workspace w(a.hierarchy());
  NodeId ra = w.import(a);
  auto n = w.follow(ra, p, true);
  if (!n) return std::nullopt;
  NodeId rb = w.import(b);
  if (!w.unify(*n, rb)) return std::nullopt;
  return w.extract(ra);
}

/// Token-identify two paths of one structure.
inline std::optional<FeatureStructure> equate(const FeatureStructure& a, const Path& p, const Path& q) {
  Workspace w(a.hierarchy());
  NodeId ra = w.import(a);
  auto x = w.follow(ra, p, true);
  if (!x) return std::nullopt;
  auto y = w.follow(ra, q, true);
  if (!y) return std::nullopt;
  if (!w.unify(*x, *y)) return std::nullopt;
  return w.extract(ra);
}

/// True when `general` subsumes `specific`: every type, value restriction,
/// arc and reentrancy of `general` is matched in `specific`.
inline bool subsumes(const FeatureStructure& general, const FeatureStructure& specific) {
  const auto& h = general.hierarchy();
  std::vector<std::int64_t> image(general.node_count(), -1);
  std::vector<std::pair<NodeId, NodeId>> stack{{general.root(), specific.root()}};
  while (!stack.empty()) {
    auto [g, s] = stack.back();
    stack.pop_back();
    if (image[g] >= 0) {
      if (image[g] != s) return false;
      continue;
    }
    image[g] = s;
    if (!h.subsumes(general.type(g), specific.type(s))) return false;
    auto gv = general.values(g);
    auto sv = specific.values(s);
    if (!gv.empty()) {
      if (sv.empty()) return false;
      for (const auto& v : sv)
        if (std::find(gv.begin(), gv.end(), v) == gv.end()) return false;
    }
    for (const auto& a : general.arcs(g)) {
      auto c = specific.child(s, a.feature);
      if (!c) return false;
      stack.emplace_back(a.target, *c);
    }
  }
  return true;
}

/// Mutual subsumption; for acyclic structures this is isomorphism.
inline bool equivalent(const FeatureStructure& a, const FeatureStructure& b) { return subsumes(a, b) && subsumes(b, a); }

}  // namespace lexmt

#endif  // LEXMT_FEATURE_STRUCTURE_HPP
