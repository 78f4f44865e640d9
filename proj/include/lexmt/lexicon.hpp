#ifndef LEXMT_LEXICON_HPP
#define LEXMT_LEXICON_HPP

// Monolingual lexicons: lexical signs, paradigm tables for analysis and
// synthesis, and the monolingual lexical rules that bi-lexical rules apply to
// each side of an entry.
//
//     lexicon spanish
//     cell past3sg  syn.vform=fin syn.tense=past syn.agr=3sg
//
//     sign estirar1
//       type verb
//       lemma "estirar"
//       syn.cat = v
//       syn.val = trans
//       sem = estirar1(e,s,o)
//       form past3sg "estiró"
//       form inf "estirar"
//
//     sign manzana1
//       ...
//       derive tree manzano1 "manzano"
//       form tree.sg "manzano"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fs_text.hpp"

namespace lexmt {

inline const Path& sem_pred_path() {
  static const Path p = make_path("sem.pred");
  return p;
}

inline const Path& sem_args_path() {
  static const Path p = make_path("sem.args");
  return p;
}

inline Symbol arg_feature(std::size_t i) {
  static const Symbol names[] = {Symbol("a1"), Symbol("a2"), Symbol("a3"), Symbol("a4")};
  if (i >= 4) throw std::out_of_range("at most four semantic arguments");
  return names[i];
}

inline constexpr std::size_t kMaxArgs = 4;

/// One semantic argument: an unbound variable, a skolem constant, or a join
/// of constants (unifies with any member).
struct SemTerm {
  enum class Kind { variable, constant };
  Kind kind = Kind::variable;
  std::vector<int> constants;
  NodeId node = 0;

  [[nodiscard]] bool is_constant() const { return kind == Kind::constant; }
};

struct SemPredicate {
  std::string predicate;
  std::vector<SemTerm> args;
};

inline std::vector<int> constants_of(std::span<const Symbol> values) {
  std::vector<int> out;
  for (const auto& v : values) {
    const auto& s = v.str();
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      out.push_back(std::stoi(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Semantics of the sign rooted at `at` in `fs`.
inline SemPredicate semantics(const FeatureStructure& fs, NodeId at = 0) {
  SemPredicate p;
  if (auto n = fs.node_at(sem_pred_path(), at); n && fs.values(*n).size() == 1) p.predicate = fs.values(*n)[0].str();
  auto args = fs.node_at(sem_args_path(), at);
  if (!args) return p;
  for (std::size_t i = 0; i < kMaxArgs; ++i) {
    auto a = fs.child(*args, arg_feature(i));
    if (!a) break;
    SemTerm t;
    t.node = *a;
    t.constants = constants_of(fs.values(*a));
    t.kind = t.constants.empty() ? SemTerm::Kind::variable : SemTerm::Kind::constant;
    p.args.push_back(std::move(t));
  }
  return p;
}

inline std::size_t arity(const FeatureStructure& fs) { return semantics(fs).args.size(); }

/// Abbreviated notation for signs inside one structure, e.g. `love1(2,1,3)`
/// or `amar1(x1,x2,x3)`. Variables are numbered by first occurrence across
/// all the given signs, so sharing shows.
inline std::vector<std::string> abbreviate(const FeatureStructure& fs, const std::vector<NodeId>& signs) {
  std::map<NodeId, int> vars;
  std::vector<std::string> out;
  for (NodeId s : signs) {
    auto sem = semantics(fs, s);
    std::string text = sem.predicate.empty() ? fs.type_name(s) : sem.predicate;
    text += "(";
    for (std::size_t i = 0; i < sem.args.size(); ++i) {
      if (i) text += ",";
      const auto& a = sem.args[i];
      if (a.is_constant()) {
        for (std::size_t j = 0; j < a.constants.size(); ++j) text += (j ? "|" : "") + std::to_string(a.constants[j]);
      } else {
        auto [it, fresh] = vars.emplace(a.node, static_cast<int>(vars.size()) + 1);
        text += "x" + std::to_string(it->second);
      }
    }
    out.push_back(text + ")");
  }
  return out;
}

inline std::string abbreviate(const FeatureStructure& sign) { return abbreviate(sign, {sign.root()}).front(); }

struct ParadigmCell {
  std::string name;
  FeatureStructure features;  // inflectional constraints the form encodes
  std::string surface;        // `_` separates the words of multi-word lexemes
};

struct Derivation {
  std::string pred;
  std::string lemma;
  std::vector<ParadigmCell> cells;
};

struct Paradigm {
  std::string lemma;
  std::vector<ParadigmCell> cells;
  std::map<std::string, Derivation> derivations;

  [[nodiscard]] const ParadigmCell* cell(std::string_view name) const {
    for (const auto& c : cells)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct LexicalSign {
  std::string id;
  FeatureStructure fs;
  std::shared_ptr<const Paradigm> paradigm;
  std::string cell;  // paradigm cell the sign was looked up through, if any

  [[nodiscard]] std::string pred() const { return semantics(fs).predicate; }
  [[nodiscard]] std::string language() const { return fs.type_at(make_path("lang")) ? fs.type_name(*fs.node_at(make_path("lang"))) : std::string(); }
  [[nodiscard]] std::string lemma() const { return paradigm ? paradigm->lemma : std::string(); }
  [[nodiscard]] std::string text() const { return abbreviate(fs); }
};

class SynthesisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string spaced(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

inline std::string inflection_text(const FeatureStructure& fs) {
  std::string out;
  if (auto syn = fs.at(make_path("syn"))) out = render(*syn);
  return out.empty() ? render(fs) : out;
}

}  // namespace detail

/// Surface form for a sign under an inflection bundle: the unique form among
/// the paradigm cells whose constraints subsume the bundle.
inline std::string synthesize(const LexicalSign& sign, const FeatureStructure& inflection) {
  if (!sign.paradigm) throw SynthesisError("sign " + sign.id + " has no paradigm");
  std::set<std::string> forms;
  std::vector<std::string> cells;
  for (const auto& c : sign.paradigm->cells) {
    if (subsumes(c.features, inflection)) {
      forms.insert(c.surface);
      cells.push_back(c.name);
    }
  }
  if (forms.empty())
    throw SynthesisError("no paradigm cell of " + sign.id + " matches " + detail::inflection_text(inflection));
  if (forms.size() > 1) {
    std::string names;
    for (const auto& c : cells) names += " " + c;
    throw SynthesisError("inflection of " + sign.id + " is not fully instantiated (" +
                         detail::inflection_text(inflection) + " matches cells" + names + ")");
  }
  return detail::spaced(*forms.begin());
}

inline std::string synthesize(const LexicalSign& sign) { return synthesize(sign, sign.fs); }

/// A monolingual lexical rule. The input equations must unify with the sign;
/// output equations overwrite; `args` renews the semantic arguments.
struct MonoLexRule {
  std::string name;
  std::vector<std::pair<Path, std::string>> input;
  std::vector<std::pair<Path, std::string>> output;
  std::optional<TypeId> retype;
  std::string derive;   // derivation prefix in the sign's paradigm
  std::string require;  // paradigm cell the sign must have
  std::optional<std::size_t> in_arity;
  std::vector<std::string> out_args;  // names; repeats share a variable
  bool productive = false;            // also applied during lookup
};

namespace detail {

inline std::vector<std::pair<Path, std::string>> parse_equations(std::string_view text) {
  std::vector<std::pair<Path, std::string>> out;
  for (const auto& w : dsl::words(text)) {
    auto eq = w.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected path=value, got '" + w + "'");
    out.emplace_back(make_path(w.substr(0, eq)), w.substr(eq + 1));
  }
  return out;
}

inline std::pair<Path, std::string> parse_equation(std::string_view line) {
  auto eq = line.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("expected 'path = value'");
  std::string path(dsl::trim(line.substr(0, eq)));
  std::string value(dsl::trim(line.substr(eq + 1)));
  if (path == "type") path.clear();
  return {make_path(path), value};
}

inline std::vector<std::string> parse_arg_list(std::string_view text) {
  text = dsl::trim(text);
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw std::invalid_argument("expected (a,b,...) in '" + std::string(text) + "'");
  auto inner = dsl::trim(text.substr(1, text.size() - 2));
  if (inner.empty()) return {};
  return dsl::split(inner, ',');
}

/// Rebuild sem.args with fresh variables following the sharing pattern of
/// `names`.
inline std::optional<FeatureStructure> fresh_args(const FeatureStructure& fs, const std::vector<std::string>& names) {
  auto stripped = fs.without(sem_args_path());
  StructureBuilder b(fs.hierarchy(), fs.type());
  if (!b.put({}, stripped)) return std::nullopt;
  auto args = b.node(sem_args_path());
  if (!args) return std::nullopt;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!b.set(sem_args_path() + Path{arg_feature(i)}, "#" + names[i] + ":index")) return std::nullopt;
  return b.build();
}

}  // namespace detail

/// Derived signs from one rule application; empty when the rule does not apply.
inline std::vector<LexicalSign> apply_mono_rule(const MonoLexRule& rule, const LexicalSign& sign) {
  const auto& h = sign.fs.hierarchy();
  StructureBuilder in(h, sign.fs.type());
  if (!in.put({}, sign.fs)) return {};
  for (const auto& [p, v] : rule.input)
    if (!in.set(p, v)) return {};
  auto fs = in.build();
  if (!fs) return {};

  std::size_t n = arity(*fs);
  if (rule.in_arity && *rule.in_arity != n) return {};

  LexicalSign out{sign.id, *fs, sign.paradigm, sign.cell};
  if (!rule.require.empty() && (!sign.paradigm || !sign.paradigm->cell(rule.require))) return {};

  std::vector<std::pair<Path, std::string>> rewrites = rule.output;
  if (!rule.derive.empty()) {
    if (!sign.paradigm) return {};
    auto d = sign.paradigm->derivations.find(rule.derive);
    if (d == sign.paradigm->derivations.end()) return {};
    auto p = std::make_shared<Paradigm>();
    p->lemma = d->second.lemma;
    p->cells = d->second.cells;
    out.paradigm = std::move(p);
    out.id = d->second.pred;
    out.cell.clear();
    rewrites.emplace_back(make_path("orth"), "\"" + d->second.lemma + "\"");
    rewrites.emplace_back(sem_pred_path(), "\"" + d->second.pred + "\"");
  } else if (rule.name != "identity") {
    out.id = sign.id + "+" + rule.name;
  }

  FeatureStructure cur = out.fs;
  if (rule.retype) {
    Workspace w(h);
    NodeId r = w.import(cur);
    if (!w.force_type(r, *rule.retype)) return {};
    auto x = w.extract(r);
    if (!x) return {};
    cur = *x;
  }
  for (const auto& [p, v] : rewrites) {
    auto cut = cur.without(p);
    StructureBuilder b(h, cut.type());
    if (!b.put({}, cut) || !b.set(p, v)) return {};
    auto x = b.build();
    if (!x) return {};
    cur = *x;
  }

  std::vector<std::string> names = rule.out_args;
  if (names.empty()) {
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    // keep the sign's own sharing pattern among its arguments
    auto sem = semantics(cur);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (sem.args[i].node == sem.args[j].node) names[i] = names[j];
  }
  auto renewed = detail::fresh_args(cur, names);
  if (!renewed) return {};
  out.fs = *renewed;
  return {out};
}

struct LookupResult {
  std::vector<LexicalSign> signs;
  std::string diagnostic;
};

class Lexicon {
public:
  Lexicon() = default;

  static Lexicon load(const TypeHierarchy& h, std::string_view text, const std::string& source = {}) {
    Lexicon lex;
    lex.h_ = &h;
    lex.read(dsl::read_blocks(text, source), source);
    return lex;
  }

  /// Monolingual lexical rules for this language (`lexrule` blocks).
  void load_rules(std::string_view text, const std::string& source = {}) {
    for (const auto& block : dsl::read_blocks(text, source)) {
      if (dsl::keyword(block.header) != "lexrule")
        throw LingwareError(source, block.header.number, "expected 'lexrule NAME'");
      MonoLexRule r;
      r.name = dsl::rest(block.header);
      if (r.name.empty()) throw LingwareError(source, block.header.number, "lexrule needs a name");
      try {
        for (const auto& line : block.body) {
          auto kw = dsl::keyword(line);
          auto rest = dsl::rest(line);
          if (kw == "input") {
            r.input.push_back(detail::parse_equation(rest));
          } else if (kw == "output") {
            r.output.push_back(detail::parse_equation(rest));
          } else if (kw == "retype") {
            r.retype = h_->id(rest);
          } else if (kw == "derive") {
            r.derive = rest;
          } else if (kw == "require") {
            r.require = rest;
            if (!cells_.count(rest)) throw std::invalid_argument("unknown cell '" + rest + "'");
          } else if (kw == "productive") {
            r.productive = true;
          } else if (kw == "args") {
            auto arrow = rest.find("->");
            if (arrow == std::string::npos) throw std::invalid_argument("expected args (..) -> (..)");
            r.in_arity = detail::parse_arg_list(std::string_view(rest).substr(0, arrow)).size();
            r.out_args = detail::parse_arg_list(std::string_view(rest).substr(arrow + 2));
          } else {
            throw std::invalid_argument("unknown lexrule line '" + line.text + "'");
          }
        }
        for (const auto& [p, v] : r.input) check_equation(p, v);
        for (const auto& [p, v] : r.output) check_equation(p, v);
      } catch (const HierarchyError&) {
        throw;
      } catch (const std::exception& e) {
        throw LingwareError(source, block.header.number, "lexrule " + r.name + ": " + e.what());
      }
      rules_.push_back(std::move(r));
    }
  }

  [[nodiscard]] const TypeHierarchy& hierarchy() const { return *h_; }
  [[nodiscard]] const std::string& language() const { return language_; }
  [[nodiscard]] const std::vector<LexicalSign>& signs() const { return signs_; }
  [[nodiscard]] const std::vector<MonoLexRule>& rules() const { return rules_; }
  [[nodiscard]] std::size_t max_words() const { return max_words_; }

  [[nodiscard]] const LexicalSign* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &signs_[it->second];
  }

  [[nodiscard]] const MonoLexRule* rule(std::string_view name) const {
    for (const auto& r : rules_)
      if (r.name == name) return &r;
    return nullptr;
  }

  [[nodiscard]] const FeatureStructure* cell(std::string_view name) const {
    auto it = cells_.find(std::string(name));
    return it == cells_.end() ? nullptr : &it->second;
  }

  /// Signs whose paradigm lists `surface`, instantiated with the cell's
  /// features. Spaces and `_` are interchangeable in multi-word forms. A
  /// capitalized word falls back to its lower-case form.
  [[nodiscard]] LookupResult lookup(std::string_view surface) const {
    std::string key(dsl::trim(surface));
    std::replace(key.begin(), key.end(), ' ', '_');
    LookupResult r;
    collect(key, r.signs);
    if (r.signs.empty() && !key.empty() && std::isupper(static_cast<unsigned char>(key[0]))) {
      std::string lower = key;
      lower[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lower[0])));
      collect(lower, r.signs);
    }
    if (r.signs.empty()) r.diagnostic = "unknown " + language_ + " word '" + std::string(surface) + "'";
    return r;
  }

private:
  struct FormRef {
    std::size_t sign;
    std::string cell;        // plain cell name
    std::string derivation;  // derivation prefix, or empty
  };

  void check_equation(const Path& p, const std::string& v) const {
    StructureBuilder b(*h_);
    if (!b.set(p, v)) throw std::invalid_argument("bad equation " + path_string(p) + " = " + v + ": " + b.failure());
  }

  void collect(const std::string& key, std::vector<LexicalSign>& out) const {
    auto range = forms_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it) {
      const auto& ref = it->second;
      const auto& base = signs_[ref.sign];
      if (ref.derivation.empty()) {
        auto fs = unify(base.fs, cells_.at(ref.cell));
        if (!fs) continue;
        LexicalSign s{base.id, *fs, base.paradigm, ref.cell};
        out.push_back(s);
        for (const auto& rule : rules_)
          if (rule.productive && rule.derive.empty())
            for (auto& d : apply_mono_rule(rule, s)) out.push_back(std::move(d));
      } else {
        for (const auto& rule : rules_) {
          if (!rule.productive || rule.derive != ref.derivation) continue;
          for (auto& d : apply_mono_rule(rule, base)) {
            auto fs = unify(d.fs, cells_.at(ref.cell));
            if (!fs) continue;
            d.fs = *fs;
            d.cell = ref.cell;
            out.push_back(std::move(d));
          }
        }
      }
    }
  }

  void read(const std::vector<dsl::Block>& blocks, const std::string& source) {
    std::map<std::string, std::vector<dsl::Line>> templates;
    for (const auto& block : blocks) {
      auto kw = dsl::keyword(block.header);
      auto rest = dsl::rest(block.header);
      if (kw == "lexicon") {
        language_ = rest;
        if (!h_->find(language_)) throw LingwareError(source, block.header.number, "unknown language type '" + language_ + "'");
      } else if (kw == "cell") {
        auto w = dsl::words(rest);
        if (w.empty()) throw LingwareError(source, block.header.number, "cell needs a name");
        std::string text = rest.substr(w[0].size());
        for (const auto& l : block.body) text += " " + l.text;
        StructureBuilder b(*h_);
        try {
          for (const auto& [p, v] : detail::parse_equations(text))
            if (!b.set(p, v)) throw LingwareError(source, block.header.number, "cell " + w[0] + ": " + b.failure());
        } catch (const std::invalid_argument& e) {
          throw LingwareError(source, block.header.number, e.what());
        }
        cells_[w[0]] = *b.build();
      } else if (kw == "template") {
        templates[rest] = block.body;
      } else if (kw == "sign") {
        read_sign(block, templates, source);
      } else {
        throw LingwareError(source, block.header.number, "unknown lexicon block '" + kw + "'");
      }
    }
    if (language_.empty()) throw LingwareError(source, 0, "missing 'lexicon LANGUAGE' declaration");
  }

  void read_sign(const dsl::Block& block, const std::map<std::string, std::vector<dsl::Line>>& templates,
                 const std::string& source) {
    std::string id = dsl::rest(block.header);
    if (id.empty()) throw LingwareError(source, block.header.number, "sign needs an id");
    if (by_id_.count(id)) throw LingwareError(source, block.header.number, "duplicate sign id " + id);
    auto paradigm = std::make_shared<Paradigm>();
    std::optional<TypeId> type;
    std::vector<dsl::Line> lines;
    // templates expand in place, and may use other templates
    std::function<void(const std::vector<dsl::Line>&, int)> expand = [&](const std::vector<dsl::Line>& body, int depth) {
      for (const auto& line : body) {
        if (dsl::keyword(line) != "use") {
          lines.push_back(line);
          continue;
        }
        auto t = templates.find(dsl::rest(line));
        if (t == templates.end()) throw LingwareError(source, line.number, "unknown template '" + dsl::rest(line) + "'");
        if (depth > 16) throw LingwareError(source, line.number, "templates nest too deeply");
        expand(t->second, depth + 1);
      }
    };
    expand(block.body, 0);
    std::vector<std::pair<std::string, std::string>> forms;  // cell (maybe prefixed), surface
    std::vector<std::pair<Path, std::string>> equations;
    std::string sem;
    int sem_line = 0;
    for (const auto& line : lines) {
      auto kw = dsl::keyword(line);
      auto rest = dsl::rest(line);
      auto err = [&](const std::string& what) { return LingwareError(source, line.number, "sign " + id + ": " + what); };
      if (kw == "type") {
        type = h_->find(rest);
        if (!type) throw err("unknown type '" + rest + "'");
      } else if (kw == "lemma") {
        paradigm->lemma = dsl::unquote(rest);
      } else if (kw == "form") {
        auto w = dsl::words(rest);
        if (w.size() != 2) throw err("expected: form CELL \"surface\"");
        forms.emplace_back(w[0], dsl::unquote(w[1]));
      } else if (kw == "derive") {
        auto w = dsl::words(rest);
        if (w.size() != 3) throw err("expected: derive PREFIX PRED \"lemma\"");
        paradigm->derivations[w[0]] = Derivation{w[1], dsl::unquote(w[2]), {}};
      } else if (line.text.find('=') != std::string::npos) {
        auto [p, v] = detail::parse_equation(line.text);
        if (path_string(p) == "sem") {
          sem = v;
          sem_line = line.number;
        } else {
          equations.emplace_back(p, v);
        }
      } else {
        throw err("unrecognized line '" + line.text + "'");
      }
    }
    auto err = [&](const std::string& what) { return LingwareError(source, block.header.number, "sign " + id + ": " + what); };
    if (!type) throw err("missing type");
    if (paradigm->lemma.empty()) throw err("missing lemma");
    if (sem.empty()) throw err("missing sem");

    StructureBuilder b(*h_, *type);
    if (!b.set(make_path("lang"), language_)) throw err(b.failure());
    if (!b.set(make_path("orth"), "\"" + paradigm->lemma + "\"")) throw err(b.failure());
    for (const auto& [p, v] : equations)
      if (!b.set(p, v)) throw err(path_string(p) + " = " + v + ": " + b.failure());
    auto open = sem.find('(');
    if (open == std::string::npos) throw LingwareError(source, sem_line, "sign " + id + ": expected sem = pred(args)");
    std::string pred(dsl::trim(std::string_view(sem).substr(0, open)));
    auto args = detail::parse_arg_list(std::string_view(sem).substr(open));
    if (args.empty() || args.size() > kMaxArgs) throw LingwareError(source, sem_line, "sign " + id + ": 1 to 4 arguments");
    if (!b.set(sem_pred_path(), "\"" + pred + "\"")) throw err(b.failure());
    for (std::size_t i = 0; i < args.size(); ++i)
      if (!b.set(sem_args_path() + Path{arg_feature(i)}, "#" + args[i] + ":index")) throw err(b.failure());
    auto fs = b.build();
    if (!fs) throw err(b.failure());

    for (const auto& [cell, surface] : forms) {
      auto dot = cell.find('.');
      std::string prefix = dot == std::string::npos ? std::string() : cell.substr(0, dot);
      std::string name = dot == std::string::npos ? cell : cell.substr(dot + 1);
      auto c = cells_.find(name);
      if (c == cells_.end()) throw err("unknown cell '" + name + "'");
      if (prefix.empty()) {
        if (!unify(*fs, c->second)) throw err("cell " + name + " is incompatible with the sign");
        paradigm->cells.push_back({name, c->second, surface});
      } else {
        auto d = paradigm->derivations.find(prefix);
        if (d == paradigm->derivations.end()) throw err("form for undeclared derivation '" + prefix + "'");
        d->second.cells.push_back({name, c->second, surface});
      }
      forms_.emplace(surface, FormRef{signs_.size(), name, prefix});
      max_words_ = std::max<std::size_t>(max_words_, 1 + std::count(surface.begin(), surface.end(), '_'));
    }
    if (paradigm->cells.empty()) throw err("no forms");
    by_id_[id] = signs_.size();
    signs_.push_back(LexicalSign{id, *fs, paradigm, {}});
  }

  const TypeHierarchy* h_ = nullptr;
  std::string language_;
  std::map<std::string, FeatureStructure> cells_;
  std::vector<LexicalSign> signs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::multimap<std::string, FormRef> forms_;
  std::vector<MonoLexRule> rules_;
  std::size_t max_words_ = 1;
};

}  // namespace lexmt

#endif  // LEXMT_LEXICON_HPP
