#ifndef LEXMT_TYPE_HIERARCHY_HPP
#define LEXMT_TYPE_HIERARCHY_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <tuple>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dsl.hpp"
#include "symbol.hpp"

namespace lexmt {

using TypeId = int;
inline constexpr TypeId kBottom = -1;

class HierarchyError : public LingwareError {
public:
  using LingwareError::LingwareError;
};

/// Finite bounded type hierarchy with a precomputed greatest-lower-bound
/// table and feature appropriateness.
///
/// Declaration format:
///
///     types
///       top > sign index string
///       sign > proper-name common-noun
///     features
///       sign: orth string, syn syn
///
/// `a > b > c d` makes a the parent of b, and b the parent of c and d.
/// Every feature has one introducing type; a subtype may narrow the value
/// constraint but never widen it. Features that no type declares are open
/// features and may only sit on subtypes of `tuple`, which is added under
/// the top type when the declarations do not mention it.
class TypeHierarchy {
public:
  static TypeHierarchy compile(std::string_view text, const std::string& source = {}) {
    return compile(dsl::read_blocks(text, source), source);
  }

  static TypeHierarchy compile(const std::vector<dsl::Block>& blocks, const std::string& source = {}) {
    TypeHierarchy h;
    h.build(blocks, source);
    return h;
  }

  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] TypeId top() const { return top_; }
  [[nodiscard]] TypeId tuple() const { return tuple_; }
  [[nodiscard]] const std::string& name(TypeId t) const {
    static const std::string bottom = "_bottom_";
    return t == kBottom ? bottom : names_.at(static_cast<std::size_t>(t));
  }

  [[nodiscard]] std::optional<TypeId> find(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Throws HierarchyError for unknown names.
  [[nodiscard]] TypeId id(std::string_view name) const {
    if (auto t = find(name)) return *t;
    throw HierarchyError({}, 0, "unknown type '" + std::string(name) + "'");
  }

  [[nodiscard]] TypeId glb(TypeId a, TypeId b) const {
    if (a == kBottom || b == kBottom) return kBottom;
    return glb_[static_cast<std::size_t>(a) * names_.size() + static_cast<std::size_t>(b)];
  }

  [[nodiscard]] TypeId glb(std::string_view a, std::string_view b) const { return glb(id(a), id(b)); }

  /// True when `specific` is `general` or one of its descendants.
  [[nodiscard]] bool subsumes(TypeId general, TypeId specific) const {
    if (specific == kBottom) return true;
    if (general == kBottom) return false;
    return test(down_[static_cast<std::size_t>(general)], specific);
  }

  [[nodiscard]] const std::vector<TypeId>& parents(TypeId t) const { return parents_.at(static_cast<std::size_t>(t)); }
  [[nodiscard]] const std::vector<TypeId>& children(TypeId t) const { return children_.at(static_cast<std::size_t>(t)); }

  /// Most general type carrying `feature`, or nullopt for open features.
  [[nodiscard]] std::optional<TypeId> introducer(Symbol feature) const {
    auto it = intro_.find(feature);
    if (it == intro_.end()) return std::nullopt;
    return it->second;
  }

  /// Value constraint of `feature` on `t`; nullopt when inappropriate.
  /// Open features on tuple subtypes are constrained only by the top type.
  [[nodiscard]] std::optional<TypeId> constraint(TypeId t, Symbol feature) const {
    if (t == kBottom) return std::nullopt;
    auto it = intro_.find(feature);
    if (it == intro_.end()) {
      if (subsumes(tuple_, t)) return top_;
      return std::nullopt;
    }
    const auto& row = approp_[static_cast<std::size_t>(t)];
    auto f = row.find(feature);
    if (f == row.end()) return std::nullopt;
    return f->second;
  }

  /// Type a node must have to carry `feature`.
  [[nodiscard]] TypeId feature_host(Symbol feature) const {
    if (auto t = introducer(feature)) return *t;
    return tuple_;
  }

  /// Declared features appropriate for `t`, sorted by name.
  [[nodiscard]] std::vector<std::pair<Symbol, TypeId>> features(TypeId t) const {
    std::vector<std::pair<Symbol, TypeId>> out(approp_.at(static_cast<std::size_t>(t)).begin(),
                                               approp_.at(static_cast<std::size_t>(t)).end());
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first.str() < b.first.str(); });
    return out;
  }

  /// Types below or equal to t, as ids.
  [[nodiscard]] std::vector<TypeId> descendants(TypeId t) const {
    std::vector<TypeId> out;
    for (TypeId i = 0; i < static_cast<TypeId>(size()); ++i)
      if (subsumes(t, i)) out.push_back(i);
    return out;
  }

private:
  using Bits = std::vector<std::uint64_t>;

  static bool test(const Bits& b, TypeId i) {
    return (b[static_cast<std::size_t>(i) / 64] >> (static_cast<std::size_t>(i) % 64)) & 1U;
  }
  static void set(Bits& b, TypeId i) { b[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (static_cast<std::size_t>(i) % 64); }

  TypeId intern(const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<TypeId>(names_.size()));
    if (inserted) {
      names_.push_back(name);
      parents_.emplace_back();
      children_.emplace_back();
    }
    return it->second;
  }

  void add_edge(TypeId parent, TypeId child) {
    auto& p = parents_[static_cast<std::size_t>(child)];
    if (std::find(p.begin(), p.end(), parent) != p.end()) return;
    p.push_back(parent);
    children_[static_cast<std::size_t>(parent)].push_back(child);
  }

  struct Declaration {
    TypeId type;
    Symbol feature;
    TypeId value;
    int line;
  };

  void build(const std::vector<dsl::Block>& blocks, const std::string& source) {
    std::vector<std::tuple<std::string, Symbol, std::string, int>> raw_decls;
    for (const auto& block : blocks) {
      auto kw = dsl::keyword(block.header);
      if (kw == "types") {
        for (const auto& line : block.body) parse_edges(line, source);
      } else if (kw == "features") {
        for (const auto& line : block.body) {
          auto colon = line.text.find(':');
          if (colon == std::string::npos) throw HierarchyError(source, line.number, "expected 'type: feature value, ...'");
          std::string type(dsl::trim(std::string_view(line.text).substr(0, colon)));
          for (const auto& item : dsl::split(std::string_view(line.text).substr(colon + 1), ',')) {
            auto w = dsl::words(item);
            if (w.size() != 2) throw HierarchyError(source, line.number, "expected 'feature value-type' in '" + item + "'");
            raw_decls.emplace_back(type, Symbol(w[0]), w[1], line.number);
          }
        }
      }
    }
    if (names_.empty()) throw HierarchyError(source, 0, "no types declared");

    check_acyclic(source);
    compute_downsets();
    compute_glb(source);

    std::vector<TypeId> roots;
    for (TypeId t = 0; t < static_cast<TypeId>(names_.size()); ++t)
      if (parents_[static_cast<std::size_t>(t)].empty()) roots.push_back(t);
    if (roots.size() != 1) {
      std::string msg = "hierarchy must have a single top type; roots:";
      for (auto r : roots) msg += " " + names_[static_cast<std::size_t>(r)];
      throw HierarchyError(source, 0, msg);
    }
    top_ = roots.front();
    if (auto t = find("tuple")) {
      tuple_ = *t;
    } else {
      tuple_ = intern("tuple");
      add_edge(top_, tuple_);
      compute_downsets();
      compute_glb(source);
    }

    std::vector<Declaration> decls;
    for (auto& [type, feature, value, line] : raw_decls) {
      auto t = find(type);
      auto v = find(value);
      if (!t) throw HierarchyError(source, line, "unknown type '" + type + "' in feature declaration");
      if (!v) throw HierarchyError(source, line, "unknown value type '" + value + "' for feature " + feature.str());
      decls.push_back({*t, feature, *v, line});
    }
    compute_appropriateness(decls, source);
  }

  void parse_edges(const dsl::Line& line, const std::string& source) {
    std::string text = line.text;
    for (char& c : text)
      if (c == '{' || c == '}' || c == ',') c = ' ';
    std::vector<std::vector<std::string>> levels(1);
    for (auto& w : dsl::words(text)) {
      if (w == ">") {
        levels.emplace_back();
      } else {
        levels.back().push_back(w);
      }
    }
    for (const auto& level : levels)
      if (level.empty()) throw HierarchyError(source, line.number, "empty level in '" + line.text + "'");
    for (const auto& level : levels)
      for (const auto& n : level) intern(n);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
      for (const auto& p : levels[i])
        for (const auto& c : levels[i + 1]) {
          if (p == c) throw HierarchyError(source, line.number, "cycle detected: " + p + " > " + p);
          add_edge(ids_.at(p), ids_.at(c));
        }
  }

  void check_acyclic(const std::string& source) {
    std::vector<int> color(names_.size(), 0);
    std::vector<TypeId> stack;
    std::function<void(TypeId)> visit = [&](TypeId t) {
      color[static_cast<std::size_t>(t)] = 1;
      stack.push_back(t);
      for (TypeId c : children_[static_cast<std::size_t>(t)]) {
        if (color[static_cast<std::size_t>(c)] == 1) {
          std::string msg = "cycle detected:";
          auto it = std::find(stack.begin(), stack.end(), c);
          for (; it != stack.end(); ++it) msg += " " + names_[static_cast<std::size_t>(*it)] + " >";
          msg += " " + names_[static_cast<std::size_t>(c)];
          throw HierarchyError(source, 0, msg);
        }
        if (color[static_cast<std::size_t>(c)] == 0) visit(c);
      }
      stack.pop_back();
      color[static_cast<std::size_t>(t)] = 2;
    };
    for (TypeId t = 0; t < static_cast<TypeId>(names_.size()); ++t)
      if (color[static_cast<std::size_t>(t)] == 0) visit(t);
  }

  void compute_downsets() {
    std::size_t n = names_.size();
    std::size_t words = (n + 63) / 64;
    down_.assign(n, Bits(words, 0));
    // Reverse topological order: children before parents.
    std::vector<TypeId> order;
    std::vector<bool> done(n, false);
    std::function<void(TypeId)> visit = [&](TypeId t) {
      done[static_cast<std::size_t>(t)] = true;
      for (TypeId c : children_[static_cast<std::size_t>(t)])
        if (!done[static_cast<std::size_t>(c)]) visit(c);
      order.push_back(t);
    };
    for (TypeId t = 0; t < static_cast<TypeId>(n); ++t)
      if (!done[static_cast<std::size_t>(t)]) visit(t);
    for (TypeId t : order) {
      auto& d = down_[static_cast<std::size_t>(t)];
      set(d, t);
      for (TypeId c : children_[static_cast<std::size_t>(t)]) {
        const auto& dc = down_[static_cast<std::size_t>(c)];
        for (std::size_t w = 0; w < words; ++w) d[w] |= dc[w];
      }
    }
  }

  void compute_glb(const std::string& source) {
    std::size_t n = names_.size();
    std::size_t words = (n + 63) / 64;
    glb_.assign(n * n, kBottom);
    Bits common(words);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        bool any = false;
        for (std::size_t w = 0; w < words; ++w) {
          common[w] = down_[a][w] & down_[b][w];
          any = any || common[w] != 0;
        }
        TypeId result = kBottom;
        if (any) {
          // The GLB is the member of the common down-set whose own down-set is
          // the whole common set.
          for (std::size_t x = 0; x < n && result == kBottom; ++x) {
            if (!test(common, static_cast<TypeId>(x))) continue;
            if (down_[x] == common) result = static_cast<TypeId>(x);
          }
          if (result == kBottom) {
            std::string msg = "GLB of " + names_[a] + " and " + names_[b] + " is not unique; maximal common subtypes:";
            for (std::size_t x = 0; x < n; ++x) {
              if (!test(common, static_cast<TypeId>(x))) continue;
              bool maximal = true;
              for (std::size_t y = 0; y < n && maximal; ++y)
                if (y != x && test(common, static_cast<TypeId>(y)) && test(down_[y], static_cast<TypeId>(x))) maximal = false;
              if (maximal) msg += " " + names_[x];
            }
            throw HierarchyError(source, 0, msg);
          }
        }
        glb_[a * n + b] = result;
        glb_[b * n + a] = result;
      }
    }
  }

  void compute_appropriateness(const std::vector<Declaration>& decls, const std::string& source) {
    std::map<Symbol, std::vector<const Declaration*>> by_feature;
    for (const auto& d : decls) by_feature[d.feature].push_back(&d);
    approp_.assign(names_.size(), {});
    for (auto& [feature, ds] : by_feature) {
      const Declaration* intro = nullptr;
      for (const auto* d : ds) {
        bool covers_all = std::all_of(ds.begin(), ds.end(), [&](const Declaration* o) { return subsumes(d->type, o->type); });
        if (covers_all) {
          intro = d;
          break;
        }
      }
      if (!intro) {
        std::string msg = "appropriateness inconsistency: feature " + feature.str() + " introduced by incomparable types";
        for (const auto* d : ds) msg += " " + names_[static_cast<std::size_t>(d->type)];
        throw HierarchyError(source, ds.front()->line, msg);
      }
      for (const auto* d : ds)
        for (const auto* o : ds)
          if (d != o && subsumes(d->type, o->type) && !subsumes(d->value, o->value))
            throw HierarchyError(source, o->line,
                                 "appropriateness inconsistency: " + names_[static_cast<std::size_t>(o->type)] + "." +
                                     feature.str() + " value " + names_[static_cast<std::size_t>(o->value)] +
                                     " is not subsumed by the inherited constraint " +
                                     names_[static_cast<std::size_t>(d->value)] + " from " +
                                     names_[static_cast<std::size_t>(d->type)]);
      intro_[feature] = intro->type;
      for (TypeId t = 0; t < static_cast<TypeId>(names_.size()); ++t) {
        if (!subsumes(intro->type, t)) continue;
        TypeId value = top_;
        for (const auto* d : ds) {
          if (!subsumes(d->type, t)) continue;
          value = glb(value, d->value);
          if (value == kBottom)
            throw HierarchyError(source, d->line,
                                 "appropriateness inconsistency: inherited constraints for " + feature.str() + " on " +
                                     names_[static_cast<std::size_t>(t)] + " have no common subtype");
        }
        approp_[static_cast<std::size_t>(t)][feature] = value;
      }
    }
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> ids_;
  std::vector<std::vector<TypeId>> parents_;
  std::vector<std::vector<TypeId>> children_;
  std::vector<Bits> down_;
  std::vector<TypeId> glb_;
  std::unordered_map<Symbol, TypeId> intro_;
  std::vector<std::unordered_map<Symbol, TypeId>> approp_;
  TypeId top_ = 0;
  TypeId tuple_ = 0;
};

}  // namespace lexmt

#endif  // LEXMT_TYPE_HIERARCHY_HPP
