#ifndef LEXMT_TRANSFER_HPP
#define LEXMT_TRANSFER_HPP

// Transfer: cover a skolemized source sign list with bilingual entries and
// collect the target signs of the entries used.
//
// Bilingual entries are written left language <-> right language and are
// usable in both directions:
//
//     bilexicon english spanish
//     bilex love1(e,x,y) <-> amar1(e,x,y) a1(y)
//     bilex the1[syn.agr=#n](x) <-> la1[syn.agr=#n](x) (:common-noun[syn.gend=fem](x))
//     bilex stab1(e,x,y) <-> le1(y) dar1(e,x,p,y) puñalada1[syn.agr=3pl](p) a1(y)
//       new p
//
// Shared argument names link signs, `#tags` share feature values, and a
// parenthesized sign is a context: it must unify with a sign handled by
// another entry of the same cover and is not itself translated. `x|y` as an
// argument joins the constants of x and y.
//
// Bi-lexical rules derive entries from single-sign entries:
//
//     birule support-verb
//       in  $N:common-noun(x) <-> $M:common-noun[qualia.supp.ntrl="tener1"](x)
//       out be1(e,s,y) adjective($N)(y) <-> tener1(e,s,y) identity($M)(y)
//
// `rule($N)` applies a monolingual lexical rule of the binder's language to
// the sign bound by $N. Variables of the output are fresh.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "chart.hpp"
#include "lexicon.hpp"
#include "parser.hpp"
#include "sign_ref.hpp"

namespace lexmt {

enum class Part { sl, tl, sl_context, tl_context };

inline Symbol part_feature(Part p, std::size_t i) {
  static const char* prefix[] = {"s", "t", "sc", "tc"};
  return Symbol(prefix[static_cast<int>(p)] + std::to_string(i + 1));
}

struct BilexEntry {
  struct Join {
    std::size_t tl;  // tl sign index
    std::size_t arg;
    std::vector<Path> sources;  // where the joined variables first occur
  };

  FeatureStructure fs;  // tuple holding s1.., t1.., sc1.., tc1..
  std::vector<LexicalSign> sl, tl, sl_context, tl_context;
  std::vector<Join> joins;
  std::string rule;    // deriving bi-lexical rule; empty for listed entries
  std::string parent;  // text of the entry the rule applied to
  int depth = 0;
  std::string source;
  int line = 0;

  [[nodiscard]] bool is_static() const { return rule.empty(); }

  [[nodiscard]] const std::vector<LexicalSign>& part(Part p) const {
    switch (p) {
      case Part::sl: return sl;
      case Part::tl: return tl;
      case Part::sl_context: return sl_context;
      default: return tl_context;
    }
  }

  [[nodiscard]] NodeId node(Part p, std::size_t i) const { return *fs.node_at({part_feature(p, i)}); }

  [[nodiscard]] std::string text() const {
    std::vector<NodeId> nodes;
    for (Part p : {Part::sl, Part::sl_context, Part::tl, Part::tl_context})
      for (std::size_t i = 0; i < part(p).size(); ++i) nodes.push_back(node(p, i));
    auto abbr = abbreviate(fs, nodes);
    std::string out;
    std::size_t k = 0;
    auto emit = [&](Part p, bool context) {
      for (std::size_t i = 0; i < part(p).size(); ++i) {
        if (!out.empty() && out.back() != ' ') out += " ";
        out += context ? "(" + abbr[k++] + ")" : abbr[k++];
      }
    };
    emit(Part::sl, false);
    emit(Part::sl_context, true);
    out += " <->";
    emit(Part::tl, false);
    emit(Part::tl_context, true);
    return out;
  }

  [[nodiscard]] std::string origin() const { return is_static() ? "static" : rule + " <- " + parent; }
};

struct BiLexicalRule {
  std::string name;
  SignRef sl_in, tl_in;
  std::vector<SignRef> sl_out, tl_out;
  std::set<std::string> fresh;
  std::string source;
  int line = 0;
};

/// Both directions' worth of bilingual lingware, as written.
class Bilexicon {
public:
  struct EntrySpec {
    std::vector<SignRef> left, right;
    std::set<std::string> fresh;
    std::string source;
    int line = 0;
  };
  struct RuleSpec {
    std::string name;
    SignRef in_left, in_right;
    std::vector<SignRef> out_left, out_right;
    std::set<std::string> fresh;
    std::string source;
    int line = 0;
  };

  void load(std::string_view text, const std::string& source = {}) {
    for (const auto& block : dsl::read_blocks(text, source)) {
      auto kw = dsl::keyword(block.header);
      int line = block.header.number;
      try {
        if (kw == "bilexicon") {
          auto w = dsl::words(dsl::rest(block.header));
          if (w.size() != 2) throw LingwareError(source, line, "expected 'bilexicon LEFT RIGHT'");
          left_ = w[0];
          right_ = w[1];
        } else if (kw == "bilex") {
          EntrySpec e;
          auto [l, r] = sides(dsl::rest(block.header), source, line);
          e.left = parse_sign_refs(l);
          e.right = parse_sign_refs(r);
          e.fresh = fresh_vars(block.body, source);
          e.source = source;
          e.line = line;
          entries_.push_back(std::move(e));
        } else if (kw == "birule") {
          RuleSpec r;
          r.name = dsl::rest(block.header);
          r.source = source;
          r.line = line;
          bool have_in = false, have_out = false;
          for (const auto& l : block.body) {
            auto k = dsl::keyword(l);
            if (k == "new") continue;
            auto [a, b] = sides(dsl::rest(l), source, l.number);
            if (k == "in") {
              auto left = parse_sign_refs(a), right = parse_sign_refs(b);
              if (left.size() != 1 || right.size() != 1)
                throw LingwareError(source, l.number, "rule input must be one sign on each side");
              r.in_left = left[0];
              r.in_right = right[0];
              have_in = true;
            } else if (k == "out") {
              r.out_left = parse_sign_refs(a);
              r.out_right = parse_sign_refs(b);
              have_out = true;
            } else {
              throw LingwareError(source, l.number, "expected in, out or new");
            }
          }
          if (!have_in || !have_out) throw LingwareError(source, line, "birule " + r.name + " needs in and out lines");
          r.fresh = fresh_vars(block.body, source);
          rules_.push_back(std::move(r));
        } else {
          throw LingwareError(source, line, "unknown block '" + kw + "'");
        }
      } catch (const SignRefError& e) {
        throw LingwareError(source, line, e.what());
      }
    }
  }

  [[nodiscard]] const std::string& left() const { return left_; }
  [[nodiscard]] const std::string& right() const { return right_; }
  [[nodiscard]] const std::vector<EntrySpec>& entry_specs() const { return entries_; }
  [[nodiscard]] const std::vector<RuleSpec>& rule_specs() const { return rules_; }

private:
  static std::pair<std::string, std::string> sides(const std::string& text, const std::string& source, int line) {
    auto arrow = text.find("<->");
    if (arrow == std::string::npos) throw LingwareError(source, line, "expected LEFT <-> RIGHT");
    return {text.substr(0, arrow), text.substr(arrow + 3)};
  }

  static std::set<std::string> fresh_vars(const std::vector<dsl::Line>& body, const std::string& source) {
    std::set<std::string> out;
    for (const auto& l : body) {
      if (dsl::keyword(l) != "new") {
        if (dsl::keyword(l) == "in" || dsl::keyword(l) == "out") continue;
        throw LingwareError(source, l.number, "unexpected line in entry: " + l.text);
      }
      for (const auto& v : dsl::words(dsl::rest(l))) out.insert(v);
    }
    return out;
  }

  std::string left_, right_;
  std::vector<EntrySpec> entries_;
  std::vector<RuleSpec> rules_;
};

namespace detail {

inline const Path& tense_path() {
  static const Path p = make_path("syn.tense");
  return p;
}
inline const Path& vform_path() {
  static const Path p = make_path("syn.vform");
  return p;
}
inline const Path& cat_path() {
  static const Path p = make_path("syn.cat");
  return p;
}

inline std::string var_tag(const std::string& name) { return "#_" + name + ":index"; }

// Assembles an entry bundle part by part.
class EntryBuilder {
public:
  EntryBuilder(const TypeHierarchy& h, std::string where) : b_(h, h.tuple()), where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(where_ + ": " + what + (b_.failure().empty() ? "" : " (" + b_.failure() + ")"));
  }

  // Place a sign (or type pattern when `sign` is null) and apply the
  // reference's constraints and arguments.
  void place(Part part, const SignRef& ref, const LexicalSign* sign) {
    auto& list = parts_[static_cast<int>(part)];
    std::size_t i = list.size();
    Path slot{part_feature(part, i)};
    LexicalSign proto;
    if (sign) {
      proto = *sign;
      if (!b_.put(slot, sign->fs)) fail("cannot place " + sign->id);
    } else {
      if (ref.head != SignRef::Head::type) fail("unknown sign '" + ref.name + "'");
      if (!b_.set(slot, ref.name)) fail("unknown type '" + ref.name + "'");
      proto.id = ":" + ref.name;
    }
    for (const auto& [p, v] : ref.constraints)
      if (!b_.set(slot + make_path(p), v)) fail("constraint " + p + "=" + v + " on " + ref.text());
    for (std::size_t k = 0; k < ref.args.size(); ++k) {
      Path at = slot + sem_args_path() + Path{arg_feature(k)};
      const auto& alts = ref.args[k];
      if (alts.size() > 1 && part == Part::tl) {
        joins_.push_back({i, k, alts});
        if (!b_.node(at)) fail("bad argument");
        for (const auto& a : alts) tl_vars_.insert(a);
        continue;
      }
      const std::string& name = alts[0];
      // a source-side join binds its first variable; the others stay open
      for (std::size_t j = 1; j < alts.size(); ++j) sl_vars_.insert(alts[j]);
      if (!b_.set(at, var_tag(name))) fail("argument " + name + " of " + ref.text());
      first_.emplace(name, at);
      (part == Part::tl || part == Part::tl_context ? tl_vars_ : sl_vars_).insert(name);
    }
    list.push_back(std::move(proto));
  }

  BilexEntry finish(const std::set<std::string>& fresh) {
    for (const auto& v : tl_vars_)
      if (!sl_vars_.count(v) && !fresh.count(v))
        fail("target variable '" + v + "' is not linked to the source side (declare it with 'new')");
    auto fs = b_.build();
    if (!fs) fail("inconsistent entry");
    // contexts ignore inflectional form
    for (Part p : {Part::sl_context, Part::tl_context})
      for (std::size_t i = 0; i < parts_[static_cast<int>(p)].size(); ++i)
        fs = fs->without(Path{part_feature(p, i)} + vform_path());
    BilexEntry e;
    e.fs = std::move(*fs);
    for (Part p : {Part::sl, Part::tl, Part::sl_context, Part::tl_context}) {
      auto& list = parts_[static_cast<int>(p)];
      for (std::size_t i = 0; i < list.size(); ++i) list[i].fs = *e.fs.at({part_feature(p, i)});
    }
    e.sl = std::move(parts_[0]);
    e.tl = std::move(parts_[1]);
    e.sl_context = std::move(parts_[2]);
    e.tl_context = std::move(parts_[3]);
    for (const auto& j : joins_) {
      BilexEntry::Join join{j.tl, j.arg, {}};
      for (const auto& name : j.vars) {
        auto it = first_.find(name);
        if (it == first_.end()) fail("joined variable '" + name + "' occurs nowhere else");
        join.sources.push_back(it->second);
      }
      e.joins.push_back(std::move(join));
    }
    return e;
  }

  StructureBuilder& builder() { return b_; }

private:
  struct PendingJoin {
    std::size_t tl, arg;
    std::vector<std::string> vars;
  };
  StructureBuilder b_;
  std::string where_;
  std::vector<LexicalSign> parts_[4];
  std::vector<PendingJoin> joins_;
  std::set<std::string> sl_vars_, tl_vars_;
  std::map<std::string, Path> first_;
};

inline Part part_of(bool target, bool context) {
  if (target) return context ? Part::tl_context : Part::tl;
  return context ? Part::sl_context : Part::sl;
}

inline std::set<int> constants_in(const FeatureStructure& fs) {
  std::set<int> out;
  for (NodeId n = 0; n < fs.node_count(); ++n)
    for (int c : constants_of(fs.values(n))) out.insert(c);
  return out;
}

inline bool specified(const TypeHierarchy& h, std::optional<TypeId> t, std::string_view root) {
  return t && *t != h.id(root);
}

}  // namespace detail

/// Entries and rules for one translation direction.
class TransferLingware {
public:
  TransferLingware(const Bilexicon& bl, const Lexicon& sl, const Lexicon& tl) : sl_(&sl), tl_(&tl) {
    bool forward = bl.left() == sl.language();
    if (!forward && bl.right() != sl.language())
      throw std::invalid_argument("bilexicon " + bl.left() + "-" + bl.right() + " does not cover " + sl.language());
    for (const auto& spec : bl.entry_specs()) {
      try {
        detail::EntryBuilder b(sl.hierarchy(), spec.source + ":" + std::to_string(spec.line));
        const auto& src = forward ? spec.left : spec.right;
        const auto& dst = forward ? spec.right : spec.left;
        for (const auto& ref : src) b.place(detail::part_of(false, ref.context), ref, find(sl, ref));
        for (const auto& ref : dst) {
          if (!ref.context && ref.head != SignRef::Head::lexicon) b.fail("only contexts may be type patterns");
          b.place(detail::part_of(true, ref.context), ref, find(tl, ref));
        }
        auto e = b.finish(spec.fresh);
        e.source = spec.source;
        e.line = spec.line;
        entries_.push_back(std::move(e));
      } catch (const std::exception& err) {
        throw LingwareError(spec.source, spec.line, err.what());
      }
    }
    for (const auto& spec : bl.rule_specs()) {
      BiLexicalRule r;
      r.name = spec.name;
      r.sl_in = forward ? spec.in_left : spec.in_right;
      r.tl_in = forward ? spec.in_right : spec.in_left;
      r.sl_out = forward ? spec.out_left : spec.out_right;
      r.tl_out = forward ? spec.out_right : spec.out_left;
      r.fresh = spec.fresh;
      r.source = spec.source;
      r.line = spec.line;
      for (const auto* in : {&r.sl_in, &r.tl_in})
        if (in->head != SignRef::Head::binder) throw LingwareError(spec.source, spec.line, "rule input must be $binders");
      for (bool target : {false, true}) {
        const Lexicon& lex = target ? tl : sl;
        const std::string& binder = target ? r.tl_in.name : r.sl_in.name;
        for (const auto& ref : target ? r.tl_out : r.sl_out) {
          if (ref.head == SignRef::Head::rule && !lex.rule(ref.name))
            throw LingwareError(spec.source, spec.line, "no " + lex.language() + " lexical rule '" + ref.name + "'");
          if (ref.head == SignRef::Head::lexicon && !lex.find(ref.name))
            throw LingwareError(spec.source, spec.line, "no " + lex.language() + " sign '" + ref.name + "'");
          auto operand = ref.head == SignRef::Head::rule ? ref.operand : ref.name;
          if ((ref.head == SignRef::Head::rule || ref.head == SignRef::Head::binder) && operand != binder)
            throw LingwareError(spec.source, spec.line, "$" + operand + " is not bound on the " + lex.language() + " side");
        }
      }
      rules_.push_back(std::move(r));
    }
  }

  [[nodiscard]] const Lexicon& sl() const { return *sl_; }
  [[nodiscard]] const Lexicon& tl() const { return *tl_; }
  [[nodiscard]] const std::vector<BilexEntry>& entries() const { return entries_; }
  [[nodiscard]] const std::vector<BiLexicalRule>& rules() const { return rules_; }

  /// Apply a rule to a single-sign entry; nullopt when the input does not match.
  [[nodiscard]] std::optional<BilexEntry> apply(const BiLexicalRule& rule, const BilexEntry& entry) const {
    if (entry.sl.size() != 1 || entry.tl.size() != 1 || !entry.sl_context.empty() || !entry.tl_context.empty() ||
        !entry.joins.empty())
      return std::nullopt;
    const auto& h = sl_->hierarchy();
    // input pattern over s1/t1
    StructureBuilder in(h, h.tuple());
    for (auto [ref, part] : {std::pair{&rule.sl_in, Part::sl}, std::pair{&rule.tl_in, Part::tl}}) {
      Path slot{part_feature(part, 0)};
      if (!ref->type.empty() && !in.set(slot, ref->type)) return std::nullopt;
      for (const auto& [p, v] : ref->constraints)
        if (!in.set(slot + make_path(p), v)) return std::nullopt;
      for (std::size_t k = 0; k < ref->args.size(); ++k)
        if (!in.set(slot + sem_args_path() + Path{arg_feature(k)}, detail::var_tag(ref->args[k][0]))) return std::nullopt;
    }
    auto pattern = in.build();
    if (!pattern) return std::nullopt;
    auto matched = unify(entry.fs, *pattern);
    if (!matched) return std::nullopt;
    std::map<std::string, LexicalSign> binders;
    {
      LexicalSign s = entry.sl[0], t = entry.tl[0];
      s.fs = *matched->at({part_feature(Part::sl, 0)});
      t.fs = *matched->at({part_feature(Part::tl, 0)});
      binders[rule.sl_in.name] = std::move(s);
      binders[rule.tl_in.name] = std::move(t);
    }
    detail::EntryBuilder b(h, rule.source + ":" + std::to_string(rule.line) + " " + rule.name);
    try {
      for (bool target : {false, true}) {
        const Lexicon& lex = target ? *tl_ : *sl_;
        for (const auto& ref : target ? rule.tl_out : rule.sl_out) {
          Part part = detail::part_of(target, ref.context);
          if (ref.head == SignRef::Head::lexicon || ref.head == SignRef::Head::type) {
            b.place(part, ref, find(lex, ref));
            continue;
          }
          auto bound = binders.find(ref.head == SignRef::Head::rule ? ref.operand : ref.name);
          if (bound == binders.end()) b.fail("unbound $" + (ref.head == SignRef::Head::rule ? ref.operand : ref.name));
          if (bound->second.language() != lex.language()) b.fail("$" + bound->first + " used on the wrong side");
          if (ref.head == SignRef::Head::binder) {
            b.place(part, ref, &bound->second);
            continue;
          }
          const auto* mono = lex.rule(ref.name);
          if (!mono) b.fail("no " + lex.language() + " lexical rule '" + ref.name + "'");
          auto out = apply_mono_rule(*mono, bound->second);
          if (out.empty()) return std::nullopt;
          b.place(part, ref, &out[0]);
        }
      }
      auto e = b.finish(rule.fresh);
      e.rule = rule.name;
      e.parent = entry.text();
      e.depth = entry.depth + 1;
      e.source = rule.source;
      e.line = rule.line;
      return e;
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }

  /// All entries derivable from the listed ones within `depth` rule
  /// applications, unfiltered. Cached per depth.
  [[nodiscard]] const std::vector<BilexEntry>& derivable(int depth, std::vector<std::string>* trace = nullptr) const {
    std::lock_guard lock(cache_mu_);
    auto it = cache_.find(depth);
    if (it != cache_.end() && !trace) return it->second;
    std::vector<BilexEntry> all;
    std::set<std::string> seen;
    for (const auto& e : entries_) seen.insert(e.text());
    std::vector<const BilexEntry*> frontier;
    for (const auto& e : entries_) frontier.push_back(&e);
    std::deque<BilexEntry> store;
    for (int d = 1; d <= depth && !frontier.empty(); ++d) {
      std::vector<const BilexEntry*> next;
      for (const auto* e : frontier)
        for (const auto& r : rules_) {
          auto out = apply(r, *e);
          if (!out || !seen.insert(out->text()).second) continue;
          if (trace) trace->push_back(e->text() + " -> " + render(out->fs));
          store.push_back(std::move(*out));
          next.push_back(&store.back());
        }
      frontier = std::move(next);
    }
    all.assign(store.begin(), store.end());
    return cache_[depth] = std::move(all);
  }

private:
  static const LexicalSign* find(const Lexicon& lex, const SignRef& ref) {
    if (ref.head != SignRef::Head::lexicon) return nullptr;
    const auto* s = lex.find(ref.name);
    if (!s) throw std::invalid_argument("no " + lex.language() + " sign '" + ref.name + "'");
    return s;
  }

  const Lexicon* sl_;
  const Lexicon* tl_;
  std::vector<BilexEntry> entries_;
  std::vector<BiLexicalRule> rules_;
  mutable std::map<int, std::vector<BilexEntry>> cache_;
  mutable std::mutex cache_mu_;
};

// ---------------------------------------------------------------- matching

/// One way an entry's source signs unify with rep positions.
struct Binding {
  std::vector<std::size_t> positions;  // rep position of each sl sign
  FeatureStructure fs;                 // the entry bundle after unification
};

namespace detail {

inline bool pred_compatible(const LexicalSign& pattern, const LexicalSign& sign) {
  auto p = pattern.pred();
  return p.empty() || p == sign.pred();
}

// Does the pattern (alone) unify with the sign? Cheap prefilter.
inline bool may_match(const LexicalSign& pattern, const LexicalSign& sign) {
  return pred_compatible(pattern, sign) && unify(pattern.fs, sign.fs).has_value();
}

}  // namespace detail

/// All one-to-one unifications of the entry's source signs with the signs at
/// `positions` (which must be as many as the source signs).
inline std::vector<Binding> match_entry(const BilexEntry& entry, const TransferRep& rep,
                                        const std::vector<std::size_t>& positions) {
  std::vector<Binding> out;
  if (positions.size() != entry.sl.size() || entry.sl.empty()) return out;
  for (auto p : positions)
    if (p >= rep.signs.size()) throw std::out_of_range("position outside the representation");
  std::vector<std::size_t> perm = positions;
  std::sort(perm.begin(), perm.end());
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size() && ok; ++i) ok = detail::pred_compatible(entry.sl[i], rep.signs[perm[i]]);
    if (!ok) continue;
    Workspace w(entry.fs.hierarchy());
    NodeId root = w.import(entry.fs);
    for (std::size_t i = 0; i < perm.size() && ok; ++i)
      ok = w.unify(*w.follow(root, {part_feature(Part::sl, i)}, false), w.import(rep.signs[perm[i]].fs));
    if (!ok) continue;
    out.push_back({perm, *w.extract(root)});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Entries derived by rules within `depth` applications whose source signs
/// and source contexts each unify with some sign of the rep.
inline std::vector<BilexEntry> derive_entries(const TransferRep& rep, const TransferLingware& lw, int depth,
                                              std::vector<std::string>* trace = nullptr) {
  if (depth < 0) throw std::invalid_argument("derivation depth must be non-negative");
  std::vector<BilexEntry> out;
  for (const auto& e : lw.derivable(depth, trace)) {
    bool relevant = true;
    for (const auto* part : {&e.sl, &e.sl_context})
      for (const auto& pattern : *part) {
        bool any = false;
        for (const auto& s : rep.signs)
          if (detail::may_match(pattern, s)) {
            any = true;
            break;
          }
        relevant = relevant && any;
      }
    if (relevant) out.push_back(e);
  }
  return out;
}

// ------------------------------------------------------------------- covers

struct EntryMatch {
  const BilexEntry* entry = nullptr;
  std::vector<std::size_t> positions;          // per sl sign
  std::vector<std::size_t> context_positions;  // per sl context sign
  FeatureStructure fs;
};

struct Cover {
  std::vector<EntryMatch> matches;

  [[nodiscard]] std::size_t derived() const {
    return static_cast<std::size_t>(
        std::count_if(matches.begin(), matches.end(), [](const EntryMatch& m) { return !m.entry->is_static(); }));
  }

  /// Index of the match consuming each position (-1 if none).
  [[nodiscard]] std::vector<int> assignment(std::size_t n) const {
    std::vector<int> a(n, -1);
    for (std::size_t i = 0; i < matches.size(); ++i)
      for (auto p : matches[i].positions) a[p] = static_cast<int>(i);
    return a;
  }

  /// Canonical description, used for ordering and comparison.
  [[nodiscard]] std::vector<std::string> keys() const {
    std::vector<std::string> k;
    for (const auto& m : matches) {
      std::string s = m.entry->text() + " @";
      for (auto p : m.positions) s += " " + std::to_string(p);
      if (!m.context_positions.empty()) {
        s += " ctx";
        for (auto p : m.context_positions) s += " " + std::to_string(p);
      }
      k.push_back(std::move(s));
    }
    std::sort(k.begin(), k.end());
    return k;
  }

  [[nodiscard]] std::string text() const {
    std::string out;
    for (const auto& k : keys()) out += (out.empty() ? "" : "; ") + k;
    return out;
  }
};

struct CoverResult {
  std::vector<Cover> covers;
  std::string diagnostic;
};

namespace detail {

// Unify the entry's source contexts with rep positions, one choice per
// context among `allowed` positions; every successful combination.
inline void bind_contexts(const EntryMatch& base, const TransferRep& rep, const std::vector<bool>& allowed,
                          std::vector<EntryMatch>& out) {
  const auto& ctx = base.entry->sl_context;
  if (ctx.empty()) {
    out.push_back(base);
    return;
  }
  std::vector<std::size_t> choice;
  std::function<void(const FeatureStructure&)> step = [&](const FeatureStructure& fs) {
    std::size_t i = choice.size();
    if (i == ctx.size()) {
      EntryMatch m = base;
      m.context_positions = choice;
      m.fs = fs;
      out.push_back(std::move(m));
      return;
    }
    for (std::size_t p = 0; p < rep.signs.size(); ++p) {
      if (!allowed[p] || !pred_compatible(ctx[i], rep.signs[p])) continue;
      auto next = unify_at(fs, {part_feature(Part::sl_context, i)}, rep.signs[p].fs);
      if (!next) continue;
      choice.push_back(p);
      step(*next);
      choice.pop_back();
    }
  };
  step(base.fs);
}

inline bool cover_less(const Cover& a, const Cover& b) {
  if (a.matches.size() != b.matches.size()) return a.matches.size() < b.matches.size();
  if (a.derived() != b.derived()) return a.derived() < b.derived();
  return a.keys() < b.keys();
}

}  // namespace detail

/// All exact covers of the rep by the entries, contexts satisfied. Ordered
/// by number of entries, then number of derived entries, then by text.
inline CoverResult cover(const TransferRep& rep, const std::vector<const BilexEntry*>& entries) {
  if (!rep.skolemized) throw std::invalid_argument("cover needs a skolemized representation");
  CoverResult result;
  const std::size_t n = rep.signs.size();
  if (n == 0) {
    result.covers.push_back({});
    return result;
  }
  // candidate matches, indexed by their lowest position
  std::vector<std::vector<EntryMatch>> by_first(n);
  std::vector<const BilexEntry*> context_only;
  std::vector<bool> coverable(n, false);
  for (const auto* e : entries) {
    if (e->sl.empty()) {
      if (!e->sl_context.empty()) context_only.push_back(e);
      continue;
    }
    if (e->sl.size() > n) continue;
    std::vector<std::vector<std::size_t>> cands(e->sl.size());
    bool possible = true;
    for (std::size_t i = 0; i < e->sl.size() && possible; ++i) {
      for (std::size_t p = 0; p < n; ++p)
        if (detail::may_match(e->sl[i], rep.signs[p])) cands[i].push_back(p);
      possible = !cands[i].empty();
    }
    if (!possible) continue;
    // injective choices of positions, as sorted sets, deduplicated
    std::set<std::vector<std::size_t>> sets;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> choose = [&](std::size_t i) {
      if (i == cands.size()) {
        auto s = pick;
        std::sort(s.begin(), s.end());
        sets.insert(s);
        return;
      }
      for (auto p : cands[i])
        if (std::find(pick.begin(), pick.end(), p) == pick.end()) {
          pick.push_back(p);
          choose(i + 1);
          pick.pop_back();
        }
    };
    choose(0);
    for (const auto& s : sets)
      for (auto& b : match_entry(*e, rep, s)) {
        for (auto p : b.positions) coverable[p] = true;
        by_first[s.front()].push_back(EntryMatch{e, std::move(b.positions), {}, std::move(b.fs)});
      }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (!coverable[p]) result.diagnostic += (result.diagnostic.empty() ? "" : ", ") + rep.signs[p].text();
  if (!result.diagnostic.empty()) {
    result.diagnostic = "no entry translates " + result.diagnostic;
    return result;
  }

  // exact partitions
  std::vector<std::vector<const EntryMatch*>> partitions;
  std::vector<bool> used(n, false);
  std::vector<const EntryMatch*> chosen;
  std::function<void()> search = [&]() {
    std::size_t p = 0;
    while (p < n && used[p]) ++p;
    if (p == n) {
      partitions.push_back(chosen);
      return;
    }
    for (const auto& m : by_first[p]) {
      bool free = std::none_of(m.positions.begin(), m.positions.end(), [&](std::size_t q) { return used[q]; });
      if (!free) continue;
      for (auto q : m.positions) used[q] = true;
      chosen.push_back(&m);
      search();
      chosen.pop_back();
      for (auto q : m.positions) used[q] = false;
    }
  };
  search();

  // context-only entries: every anchoring, each optional
  std::vector<EntryMatch> optional;
  for (const auto* e : context_only) {
    EntryMatch base{e, {}, {}, e->fs};
    detail::bind_contexts(base, rep, std::vector<bool>(n, true), optional);
  }

  for (const auto& part : partitions) {
    // resolve source contexts against positions consumed by other matches
    std::vector<std::vector<EntryMatch>> options;
    bool ok = true;
    for (const auto* m : part) {
      std::vector<bool> allowed(n, true);
      for (auto q : m->positions) allowed[q] = false;
      std::vector<EntryMatch> bound;
      detail::bind_contexts(*m, rep, allowed, bound);
      if (bound.empty()) {
        ok = false;
        break;
      }
      options.push_back(std::move(bound));
    }
    if (!ok) continue;
    std::vector<EntryMatch> pick;
    std::function<void(std::size_t)> expand = [&](std::size_t i) {
      if (i < options.size()) {
        for (const auto& o : options[i]) {
          pick.push_back(o);
          expand(i + 1);
          pick.pop_back();
        }
        return;
      }
      for (std::size_t mask = 0; mask < (std::size_t{1} << optional.size()); ++mask) {
        Cover c;
        c.matches = pick;
        for (std::size_t k = 0; k < optional.size(); ++k)
          if (mask >> k & 1) c.matches.push_back(optional[k]);
        result.covers.push_back(std::move(c));
      }
    };
    expand(0);
  }
  std::sort(result.covers.begin(), result.covers.end(), detail::cover_less);
  if (result.covers.empty()) result.diagnostic = "no exact cover satisfies the entries' contexts";
  return result;
}

inline CoverResult cover(const TransferRep& rep, const std::vector<BilexEntry>& entries) {
  std::vector<const BilexEntry*> ptrs;
  for (const auto& e : entries) ptrs.push_back(&e);
  return cover(rep, ptrs);
}

// --------------------------------------------------------------------- bags

struct BagResult {
  std::vector<std::vector<LexicalSign>> bags;  // one per way of satisfying target contexts
  std::string diagnostic;
};

namespace detail {

// Copy the tense of the first tensed source verb to target verbs that leave
// tense open and can be finite.
inline FeatureStructure copy_tense(const EntryMatch& m) {
  const auto& h = m.fs.hierarchy();
  const auto& e = *m.entry;
  std::optional<TypeId> tense;
  for (Part p : {Part::sl, Part::sl_context}) {
    for (std::size_t i = 0; i < e.part(p).size() && !tense; ++i) {
      auto t = m.fs.type_at(Path{part_feature(p, i)} + tense_path());
      if (specified(h, t, "tense")) tense = t;
    }
  }
  if (!tense) return m.fs;
  Workspace w(h);
  NodeId root = w.import(m.fs);
  for (Part p : {Part::tl, Part::tl_context})
    for (std::size_t i = 0; i < e.part(p).size(); ++i) {
      Path slot{part_feature(p, i)};
      auto cat = m.fs.type_at(slot + cat_path());
      if (!cat || *cat != h.id("v")) continue;
      if (specified(h, m.fs.type_at(slot + tense_path()), "tense")) continue;
      auto vform = m.fs.type_at(slot + vform_path());
      if (vform && h.glb(*vform, h.id("fin")) == kBottom) continue;
      Workspace trial = w;
      if (trial.constrain_type(*trial.follow(root, slot + tense_path(), true), *tense)) w = std::move(trial);
    }
  return *w.extract(root);
}

}  // namespace detail

/// Union of the target signs of a cover, with target contexts checked
/// against (and refining) signs contributed by other entries.
inline BagResult build_tl_bag(const Cover& c) {
  BagResult result;
  if (c.matches.empty()) {
    result.bags.emplace_back();
    return result;
  }
  const auto& h = c.matches[0].fs.hierarchy();
  Workspace w(h);
  struct Element {
    NodeId node;
    std::size_t match;
    const LexicalSign* proto;
  };
  std::vector<Element> elements;
  struct Context {
    NodeId node;
    std::size_t match;
    std::string text;
  };
  std::vector<Context> contexts;
  int next_constant = 0;
  for (std::size_t mi = 0; mi < c.matches.size(); ++mi) {
    const auto& m = c.matches[mi];
    auto fs = detail::copy_tense(m);
    for (int k : detail::constants_in(fs)) next_constant = std::max(next_constant, k);
    NodeId root = w.import(fs);
    for (const auto& j : m.entry->joins) {
      std::vector<Symbol> values;
      for (const auto& src : j.sources)
        if (auto n = fs.node_at(src))
          for (const auto& v : fs.values(*n)) values.push_back(v);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      auto at = w.follow(root, Path{part_feature(Part::tl, j.tl)} + sem_args_path() + Path{arg_feature(j.arg)}, true);
      w.set_values(*at, values);
    }
    for (std::size_t i = 0; i < m.entry->tl.size(); ++i)
      elements.push_back({*w.follow(root, {part_feature(Part::tl, i)}, false), mi, &m.entry->tl[i]});
    for (std::size_t i = 0; i < m.entry->tl_context.size(); ++i)
      contexts.push_back({*w.follow(root, {part_feature(Part::tl_context, i)}, false), mi,
                          abbreviate(m.entry->tl_context[i].fs)});
  }
  std::set<std::string> seen;
  std::string unsatisfied;
  std::function<void(std::size_t, Workspace&)> step = [&](std::size_t i, Workspace& ws) {
    if (i == contexts.size()) {
      Workspace done = ws;
      int fresh = next_constant;
      for (const auto& el : elements)
        for (std::size_t k = 0; k < kMaxArgs; ++k) {
          auto a = done.follow(el.node, sem_args_path() + Path{arg_feature(k)}, false);
          if (a && done.values(*a).empty()) done.set_values(*a, {Symbol(std::to_string(++fresh))});
        }
      std::vector<LexicalSign> bag;
      std::string key;
      for (const auto& el : elements) {
        LexicalSign s = *el.proto;
        s.fs = *done.extract(el.node);
        key += render(s.fs) + "\n";
        bag.push_back(std::move(s));
      }
      if (seen.insert(key).second) result.bags.push_back(std::move(bag));
      return;
    }
    bool any = false;
    for (const auto& el : elements) {
      if (el.match == contexts[i].match) continue;
      Workspace trial = ws;
      if (!trial.unify(contexts[i].node, el.node)) continue;
      any = true;
      step(i + 1, trial);
    }
    if (!any && unsatisfied.empty()) unsatisfied = contexts[i].text;
  };
  step(0, w);
  if (result.bags.empty()) result.diagnostic = "target context " + unsatisfied + " matches no sign of another entry";
  return result;
}

}  // namespace lexmt

#endif  // LEXMT_TRANSFER_HPP
