#ifndef LEXMT_FS_TEXT_HPP
#define LEXMT_FS_TEXT_HPP

// Text forms of feature structures: the canonical one-line rendering (also
// the golden-fixture format), its reader, and the path-equation builder used
// by the lingware DSL.
//
//   render:   [sign lang: english, orth: string="John", qualia: |qualia|, ...]
//   shared:   #1=index="3" on first occurrence, #1 afterwards
//   joins:    index="1"|"3"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "feature_structure.hpp"

namespace lexmt {

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

inline std::vector<FeatureStructure::Arc> sorted_arcs(const FeatureStructure& fs, NodeId n) {
  auto a = fs.arcs(n);
  std::vector<FeatureStructure::Arc> out(a.begin(), a.end());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.feature.str() < y.feature.str(); });
  return out;
}

inline std::vector<std::string> sorted_values(const FeatureStructure& fs, NodeId n) {
  std::vector<std::string> out;
  for (const auto& v : fs.values(n)) out.push_back(v.str());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Deterministic canonical rendering. Features appear in name order; nodes
/// reached by more than one arc get numbered tags in first-visit order; nodes
/// at a path in `shrink` print as their boxed type name `|type|`.
inline std::string render(const FeatureStructure& fs, const std::vector<Path>& shrink = {}) {
  std::set<Path> shrunk(shrink.begin(), shrink.end());
  auto in = fs.indegrees();
  std::map<NodeId, int> tags;
  std::string out;
  Path here;
  std::function<void(NodeId)> emit = [&](NodeId n) {
    if (shrunk.count(here)) {
      out += "|" + fs.type_name(n) + "|";
      return;
    }
    if (in[n] > 1) {
      if (auto t = tags.find(n); t != tags.end()) {
        out += "#" + std::to_string(t->second);
        return;
      }
      int tag = static_cast<int>(tags.size()) + 1;
      tags[n] = tag;
      out += "#" + std::to_string(tag) + "=";
    }
    auto arcs = detail::sorted_arcs(fs, n);
    auto values = detail::sorted_values(fs, n);
    if (!arcs.empty()) out += "[";
    out += fs.type_name(n);
    if (!values.empty()) {
      out += "=";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += "|";
        out += detail::quote(values[i]);
      }
    }
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      out += i ? ", " : " ";
      out += arcs[i].feature.str() + ": ";
      here.push_back(arcs[i].feature);
      emit(arcs[i].target);
      here.pop_back();
    }
    if (!arcs.empty()) out += "]";
  };
  emit(fs.root());
  return out;
}

class FsSyntaxError : public LingwareError {
public:
  using LingwareError::LingwareError;
};

/// Reader for `render` output. Shrunk nodes read back as bare types.
inline FeatureStructure parse_rendered(const TypeHierarchy& h, std::string_view text) {
  Workspace w(h);
  std::map<int, NodeId> tags;
  std::size_t pos = 0;
  auto error = [&](const std::string& what) -> FsSyntaxError {
    return FsSyntaxError({}, 0, what + " at offset " + std::to_string(pos) + " in '" + std::string(text) + "'");
  };
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto ident = [&] {
    skip();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           std::string_view("[]:,|=#\"").find(text[pos]) == std::string_view::npos)
      ++pos;
    if (start == pos) throw error("expected a name");
    return std::string(text.substr(start, pos - start));
  };
  auto string_lit = [&] {
    skip();
    if (pos >= text.size() || text[pos] != '"') throw error("expected a string");
    ++pos;
    std::string s;
    while (pos < text.size() && text[pos] != '"') {
      if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
      s += text[pos++];
    }
    if (pos >= text.size()) throw error("unterminated string");
    ++pos;
    return s;
  };
  auto peek = [&]() -> char {
    skip();
    return pos < text.size() ? text[pos] : '\0';
  };
  auto type_of = [&](const std::string& name) {
    auto t = h.find(name);
    if (!t) throw error("unknown type '" + name + "'");
    return *t;
  };

  std::function<NodeId()> node = [&]() -> NodeId {
    int tag = 0;
    if (peek() == '#') {
      ++pos;
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) throw error("expected tag number");
      tag = std::stoi(std::string(text.substr(start, pos - start)));
      if (peek() != '=') {
        auto it = tags.find(tag);
        if (it == tags.end()) throw error("reference to undefined tag #" + std::to_string(tag));
        return it->second;
      }
      ++pos;
    }
    NodeId n = 0;
    char c = peek();
    if (c == '|') {
      ++pos;
      n = w.add(type_of(ident()));
      if (peek() != '|') throw error("expected '|'");
      ++pos;
    } else {
      bool bracket = c == '[';
      if (bracket) ++pos;
      n = w.add(type_of(ident()));
      if (peek() == '=') {
        ++pos;
        std::vector<Symbol> values{Symbol(string_lit())};
        while (peek() == '|') {
          ++pos;
          values.emplace_back(string_lit());
        }
        w.constrain_values(n, values);
      }
      if (bracket) {
        bool first = true;
        while (peek() != ']') {
          if (!first) {
            if (peek() != ',') throw error("expected ',' or ']'");
            ++pos;
          }
          first = false;
          Symbol feat(ident());
          if (peek() != ':') throw error("expected ':'");
          ++pos;
          NodeId v = node();
          auto slot = w.follow(n, {feat}, true);
          if (!slot || !w.unify(*slot, v)) throw error("ill-typed structure: " + w.failure());
        }
        ++pos;
      }
    }
    if (tag) tags[tag] = n;
    return n;
  };
  NodeId root = node();
  if (peek() != '\0') throw error("trailing text");
  auto fs = w.extract(root);
  if (!fs) throw error("ill-formed structure: " + w.failure());
  return *fs;
}

/// Builds a structure from path equations:
///
///     syn.agr = 3sg          type constraint
///     orth = "John"          atomic value
///     sem.args.a1 = #x       reentrancy through a named tag
///     qualia.x = "a"|"b"     join of atoms
class StructureBuilder {
public:
  explicit StructureBuilder(const TypeHierarchy& h, std::optional<TypeId> root_type = std::nullopt)
      : w_(h), root_(w_.add(root_type.value_or(h.top()))) {}

  [[nodiscard]] Workspace& workspace() { return w_; }
  [[nodiscard]] NodeId root() const { return root_; }

  /// Node for a named tag, created on first use.
  NodeId tag(const std::string& name, std::optional<TypeId> type = std::nullopt) {
    auto it = tags_.find(name);
    if (it == tags_.end()) it = tags_.emplace(name, w_.add(type.value_or(w_.hierarchy().top()))).first;
    if (type) w_.constrain_type(it->second, *type);
    return it->second;
  }

  [[nodiscard]] bool has_tag(const std::string& name) const { return tags_.count(name) > 0; }
  [[nodiscard]] const std::map<std::string, NodeId>& tags() const { return tags_; }

  std::optional<NodeId> node(const Path& p) { return w_.follow(root_, p, true); }

  /// Apply one equation; false (with failure() set) on clash.
  bool set(const Path& p, std::string_view value) {
    auto n = node(p);
    if (!n) return false;
    return set_node(*n, value);
  }

  bool set_node(NodeId n, std::string_view value) {
    value = dsl::trim(value);
    if (value.empty()) return fail("empty value");
    if (value.front() == '#') {
      std::string name(value.substr(1));
      std::optional<TypeId> type;
      if (auto colon = name.find(':'); colon != std::string::npos) {
        type = lookup(name.substr(colon + 1));
        if (!type) return false;
        name = name.substr(0, colon);
      }
      return w_.unify(n, tag(name, type));
    }
    if (value.front() == '"') {
      std::vector<Symbol> values;
      for (const auto& part : dsl::split(value, '|')) values.emplace_back(dsl::unquote(part));
      return w_.constrain_values(n, values);
    }
    auto t = lookup(value);
    if (!t) return false;
    return w_.constrain_type(n, *t);
  }

  /// Unify a whole structure into the node at p.
  bool put(const Path& p, const FeatureStructure& fs) {
    auto n = node(p);
    if (!n) return false;
    return w_.unify(*n, w_.import(fs));
  }

  bool equate(const Path& p, const Path& q) {
    auto x = node(p);
    auto y = node(q);
    return x && y && w_.unify(*x, *y);
  }

  [[nodiscard]] const std::string& failure() const { return failure_.empty() ? w_.failure() : failure_; }

  std::optional<FeatureStructure> build() {
    if (!failure_.empty()) return std::nullopt;
    return w_.extract(root_);
  }

private:
  std::optional<TypeId> lookup(std::string_view name) {
    auto t = w_.hierarchy().find(name);
    if (!t) fail("unknown type '" + std::string(name) + "'");
    return t;
  }

  bool fail(std::string why) {
    failure_ = std::move(why);
    return false;
  }

  Workspace w_;
  NodeId root_;
  std::map<std::string, NodeId> tags_;
  std::string failure_;
};

}  // namespace lexmt

#endif  // LEXMT_FS_TEXT_HPP
