#ifndef LEXMT_GRAMMAR_HPP
#define LEXMT_GRAMMAR_HPP

// Unification grammars. Each rule names categories by their syn.cat value and
// semantic arguments by shared tags:
//
//     grammar spanish
//     root s
//     rule s(e) -> np[syn.agr=#a](s) vp[syn.agr=#a,syn.vform=fin](e,s)
//     rule vp(e,s) -> v[syn.val=trans](e,s,o) np(o)
//       head 1
//
// `head N` shares agr and vform between the mother and daughter N; other body
// lines are path equations over 0 (mother) and 1, 2, ... (daughters), e.g.
// `1.syn.gend = 2.syn.gend`. Rules with more than two daughters are
// binarized when loaded.

#include <algorithm>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "fs_text.hpp"
#include "sign_ref.hpp"

namespace lexmt {

inline Symbol mother_feature() {
  static const Symbol s("m");
  return s;
}

inline Symbol daughter_feature(std::size_t i) {
  static std::vector<Symbol> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  while (cache.size() <= i) cache.emplace_back("d" + std::to_string(cache.size() + 1));
  return cache[i];
}

struct GrammarRule {
  std::string name;
  FeatureStructure fs;  // tuple: m, d1[, d2]
  std::size_t arity = 0;
  TypeId mother_cat = 0;
  std::vector<TypeId> daughter_cats;  // syn.cat of each daughter, for the quick check
};

class Grammar {
public:
  Grammar() = default;

  static Grammar load(const TypeHierarchy& h, std::string_view text, const std::string& source = {}) {
    Grammar g;
    g.h_ = &h;
    g.read(dsl::read_blocks(text, source), source);
    return g;
  }

  /// A grammar with no rules, rooted at `root`.
  static Grammar empty(const TypeHierarchy& h, const std::string& language, const std::string& root = "s") {
    Grammar g;
    g.h_ = &h;
    g.language_ = language;
    g.set_root(root, {}, 0);
    return g;
  }

  [[nodiscard]] const TypeHierarchy& hierarchy() const { return *h_; }
  [[nodiscard]] const std::string& language() const { return language_; }
  [[nodiscard]] const FeatureStructure& root() const { return root_; }
  [[nodiscard]] const std::string& root_name() const { return root_name_; }
  [[nodiscard]] const std::vector<GrammarRule>& rules() const { return rules_; }

  /// syn.cat of a category, or top when absent.
  [[nodiscard]] static TypeId category_of(const FeatureStructure& fs, NodeId at = 0) {
    static const Path p = make_path("syn.cat");
    auto n = fs.node_at(p, at);
    return n ? fs.type(*n) : fs.hierarchy().top();
  }

private:
  void set_root(const std::string& name, const std::string& source, int line) {
    StructureBuilder b(*h_);
    if (!b.set(make_path("syn.cat"), name)) throw LingwareError(source, line, "bad root category: " + b.failure());
    root_ = *b.build();
    root_name_ = name;
  }

  void read(const std::vector<dsl::Block>& blocks, const std::string& source) {
    for (const auto& block : blocks) {
      auto kw = dsl::keyword(block.header);
      auto rest = dsl::rest(block.header);
      if (kw == "grammar") {
        language_ = rest;
      } else if (kw == "root") {
        set_root(rest, source, block.header.number);
      } else if (kw == "rule") {
        try {
          add_rule(rest, block.body, source, block.header.number);
        } catch (const SignRefError& e) {
          throw LingwareError(source, block.header.number, e.what());
        }
      } else {
        throw LingwareError(source, block.header.number, "unknown grammar block '" + kw + "'");
      }
    }
    if (root_name_.empty()) set_root("s", source, 0);
  }

  static bool apply_ref(StructureBuilder& b, const Path& at, const SignRef& ref, bool mother) {
    if (ref.head != SignRef::Head::lexicon) return false;
    if (!b.set(at, mother ? "phrase" : "category")) return false;
    if (ref.name != "_" && !b.set(at + make_path("syn.cat"), ref.name)) return false;
    for (const auto& [p, v] : ref.constraints)
      if (!b.set(at + make_path(p), v)) return false;
    for (std::size_t i = 0; i < ref.args.size(); ++i) {
      if (ref.args[i].size() != 1) return false;
      if (!b.set(at + sem_args() + Path{arg(i)}, "#" + ref.args[i][0] + ":index")) return false;
    }
    return true;
  }

  static const Path& sem_args() {
    static const Path p = make_path("sem.args");
    return p;
  }

  static Symbol arg(std::size_t i) { return Symbol("a" + std::to_string(i + 1)); }

  static Path slot(std::size_t i) { return i == 0 ? Path{mother_feature()} : Path{daughter_feature(i - 1)}; }

  void add_rule(const std::string& text, const std::vector<dsl::Line>& body, const std::string& source, int line) {
    auto arrow = text.find("->");
    if (arrow == std::string::npos) throw LingwareError(source, line, "expected 'rule MOTHER -> DAUGHTERS'");
    auto lhs = parse_sign_refs(std::string_view(text).substr(0, arrow));
    auto rhs = parse_sign_refs(std::string_view(text).substr(arrow + 2));
    if (lhs.size() != 1 || rhs.empty()) throw LingwareError(source, line, "a rule has one mother and at least one daughter");
    StructureBuilder b(*h_, h_->tuple());
    auto fail = [&](const std::string& what) {
      return LingwareError(source, line, "rule " + text + ": " + what + (b.failure().empty() ? "" : " (" + b.failure() + ")"));
    };
    if (!apply_ref(b, slot(0), lhs[0], true)) throw fail("bad mother");
    for (std::size_t i = 0; i < rhs.size(); ++i)
      if (!apply_ref(b, slot(i + 1), rhs[i], false)) throw fail("bad daughter " + std::to_string(i + 1));
    auto slot_path = [&](const std::string& dotted, int at) {
      auto dot = dotted.find('.');
      std::string head = dotted.substr(0, dot);
      if (head.empty() || !std::all_of(head.begin(), head.end(), ::isdigit))
        throw LingwareError(source, at, "path must start with 0 (mother) or a daughter number: " + dotted);
      auto k = static_cast<std::size_t>(std::stoul(head));
      if (k > rhs.size()) throw LingwareError(source, at, "no daughter " + head);
      return slot(k) + (dot == std::string::npos ? Path{} : make_path(dotted.substr(dot + 1)));
    };
    for (const auto& l : body) {
      if (dsl::keyword(l) == "head") {
        auto k = dsl::rest(l);
        for (const char* f : {"syn.agr", "syn.vform"})
          if (!b.equate(slot_path("0." + std::string(f), l.number), slot_path(k + "." + f, l.number)))
            throw fail("head sharing");
        continue;
      }
      auto eq = l.text.find('=');
      if (eq == std::string::npos) throw LingwareError(source, l.number, "expected equation or 'head N'");
      std::string left(dsl::trim(std::string_view(l.text).substr(0, eq)));
      std::string right(dsl::trim(std::string_view(l.text).substr(eq + 1)));
      bool ok = !right.empty() && std::isdigit(static_cast<unsigned char>(right[0]))
                    ? b.equate(slot_path(left, l.number), slot_path(right, l.number))
                    : b.set(slot_path(left, l.number), right);
      if (!ok) throw LingwareError(source, l.number, "equation failed: " + l.text + " (" + b.failure() + ")");
    }
    auto fs = b.build();
    if (!fs) throw fail("inconsistent rule");
    check_mother_variables(*fs, rhs.size(), source, line, text);
    binarize(text, *fs, rhs.size());
  }

  // Every semantic variable of the mother must come from some daughter.
  void check_mother_variables(const FeatureStructure& fs, std::size_t n, const std::string& source, int line,
                              const std::string& text) const {
    auto mother = fs.node_at({mother_feature()});
    auto margs = fs.node_at(sem_args(), *mother);
    if (!margs) return;
    std::set<NodeId> below;
    for (std::size_t i = 0; i < n; ++i) {
      auto d = fs.node_at({daughter_feature(i)});
      std::vector<NodeId> todo{*d};
      while (!todo.empty()) {
        NodeId x = todo.back();
        todo.pop_back();
        if (!below.insert(x).second) continue;
        for (const auto& a : fs.arcs(x)) todo.push_back(a.target);
      }
    }
    for (const auto& a : fs.arcs(*margs))
      if (!below.count(a.target))
        throw LingwareError(source, line, "rule " + text + ": mother argument " + a.feature.str() + " occurs in no daughter");
  }

  void push(std::string name, FeatureStructure fs, std::size_t arity) {
    GrammarRule r;
    r.name = std::move(name);
    r.arity = arity;
    r.mother_cat = category_of(fs, *fs.node_at({mother_feature()}));
    for (std::size_t i = 0; i < arity; ++i) r.daughter_cats.push_back(category_of(fs, *fs.node_at({daughter_feature(i)})));
    r.fs = std::move(fs);
    rules_.push_back(std::move(r));
  }

  // M -> D1 D2 ... Dn becomes M -> D1 R2, R2 -> D2 R3, ..., R(n-1) -> D(n-1) Dn,
  // where Rk is a tuple holding daughters k..n so sharing with M survives.
  void binarize(const std::string& name, const FeatureStructure& fs, std::size_t n) {
    if (n <= 2) {
      push(name, fs, n);
      return;
    }
    auto rest_tuple = [&](Workspace& w, NodeId root, std::size_t from) {
      NodeId t = w.add(h_->tuple());
      for (std::size_t k = from; k < n; ++k) {
        auto dst = w.follow(t, {Symbol("r" + std::to_string(k + 1))}, true);
        auto src = w.follow(root, {daughter_feature(k)}, false);
        w.unify(*dst, *src);
      }
      return t;
    };
    for (std::size_t k = 0; k + 1 < n; ++k) {
      Workspace w(*h_);
      NodeId root = w.import(fs);
      NodeId out = w.add(h_->tuple());
      NodeId m = k == 0 ? *w.follow(root, {mother_feature()}, false) : rest_tuple(w, root, k);
      w.unify(*w.follow(out, {mother_feature()}, true), m);
      w.unify(*w.follow(out, {daughter_feature(0)}, true), *w.follow(root, {daughter_feature(k)}, false));
      NodeId second = k + 2 == n ? *w.follow(root, {daughter_feature(k + 1)}, false) : rest_tuple(w, root, k + 1);
      w.unify(*w.follow(out, {daughter_feature(1)}, true), second);
      push(name + (k ? " #" + std::to_string(k + 1) : ""), *w.extract(out), 2);
    }
  }

  const TypeHierarchy* h_ = nullptr;
  std::string language_;
  FeatureStructure root_;
  std::string root_name_;
  std::vector<GrammarRule> rules_;
};

}  // namespace lexmt

#endif  // LEXMT_GRAMMAR_HPP
