#ifndef LEXMT_SIGN_REF_HPP
#define LEXMT_SIGN_REF_HPP

// Abbreviated sign notation shared by bilexical entries, bi-lexical rules and
// bag files:
//
//     love1(e,x,y)                     lexicon sign by id, argument variables
//     el1[syn.agr=#n](o)               extra path constraints
//     :common-noun[qualia.formal=tree-fruit](x)   any sign of a type
//     $N:common-noun(x)                bind the matched input sign to $N
//     noun-noun($N)(y,z)               monolingual rule applied to $N
//     consejo1(x|y)                    joinable argument
//     amar1(2,1,3)                     skolem constants
//     (marchar1(f,o))                  context sign

#include <string>
#include <string_view>
#include <vector>

#include "dsl.hpp"

namespace lexmt {

struct SignRef {
  enum class Head { lexicon, type, binder, rule };

  Head head = Head::lexicon;
  std::string name;     // sign id, type name, binder name ($ stripped) or rule name
  std::string type;     // binder type, when given
  std::string operand;  // binder the rule applies to
  std::vector<std::pair<std::string, std::string>> constraints;  // path, value
  std::vector<std::vector<std::string>> args;                    // each arg: one name, or several for a join
  bool has_args = false;
  bool context = false;

  [[nodiscard]] std::string text() const {
    std::string out;
    switch (head) {
      case Head::lexicon: out = name; break;
      case Head::type: out = ":" + name; break;
      case Head::binder: out = "$" + name + (type.empty() ? "" : ":" + type); break;
      case Head::rule: out = name + "($" + operand + ")"; break;
    }
    if (!constraints.empty()) {
      out += "[";
      for (std::size_t i = 0; i < constraints.size(); ++i)
        out += (i ? "," : "") + constraints[i].first + "=" + constraints[i].second;
      out += "]";
    }
    if (has_args) {
      out += "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        for (std::size_t j = 0; j < args[i].size(); ++j) out += (j ? "|" : "") + args[i][j];
      }
      out += ")";
    }
    return context ? "(" + out + ")" : out;
  }
};

class SignRefError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::size_t matching(std::string_view s, std::size_t open) {
  char o = s[open];
  char c = o == '(' ? ')' : ']';
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (in_string) continue;
    if (s[i] == o) ++depth;
    if (s[i] == c && --depth == 0) return i;
  }
  throw SignRefError("unbalanced '" + std::string(1, o) + "' in '" + std::string(s) + "'");
}

}  // namespace detail

inline SignRef parse_sign_ref(std::string_view text) {
  SignRef r;
  std::string_view s = dsl::trim(text);
  if (s.empty()) throw SignRefError("empty sign reference");
  if (s.front() == '(' && detail::matching(s, 0) == s.size() - 1) {
    r.context = true;
    s = dsl::trim(s.substr(1, s.size() - 2));
  }
  std::size_t i = 0;
  auto name_end = [&](std::size_t from) {
    std::size_t j = from;
    while (j < s.size() && s[j] != '[' && s[j] != '(' && s[j] != ':') ++j;
    return j;
  };
  if (s[0] == ':') {
    r.head = SignRef::Head::type;
    std::size_t j = name_end(1);
    r.name = std::string(s.substr(1, j - 1));
    i = j;
  } else if (s[0] == '$') {
    r.head = SignRef::Head::binder;
    std::size_t j = name_end(1);
    r.name = std::string(s.substr(1, j - 1));
    i = j;
    if (i < s.size() && s[i] == ':') {
      std::size_t k = name_end(i + 1);
      r.type = std::string(s.substr(i + 1, k - i - 1));
      i = k;
    }
  } else {
    std::size_t j = name_end(0);
    r.name = std::string(s.substr(0, j));
    i = j;
    if (i + 1 < s.size() && s[i] == '(' && s[i + 1] == '$') {
      std::size_t close = detail::matching(s, i);
      r.head = SignRef::Head::rule;
      r.operand = std::string(s.substr(i + 2, close - i - 2));
      i = close + 1;
    }
  }
  if (r.name.empty()) throw SignRefError("missing name in '" + std::string(text) + "'");
  if (i < s.size() && s[i] == '[') {
    std::size_t close = detail::matching(s, i);
    for (const auto& item : dsl::split(s.substr(i + 1, close - i - 1), ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw SignRefError("expected path=value in '" + item + "'");
      r.constraints.emplace_back(std::string(dsl::trim(std::string_view(item).substr(0, eq))),
                                 std::string(dsl::trim(std::string_view(item).substr(eq + 1))));
    }
    i = close + 1;
  }
  if (i < s.size() && s[i] == '(') {
    std::size_t close = detail::matching(s, i);
    r.has_args = true;
    auto inner = dsl::trim(s.substr(i + 1, close - i - 1));
    if (!inner.empty())
      for (const auto& a : dsl::split(inner, ',')) r.args.push_back(dsl::split(a, '|'));
    i = close + 1;
  }
  if (i != s.size()) throw SignRefError("unexpected text after sign reference: '" + std::string(text) + "'");
  return r;
}

/// Split a side of an entry into sign references; parentheses group.
inline std::vector<SignRef> parse_sign_refs(std::string_view text) {
  std::vector<SignRef> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    int depth = 0;
    bool in_string = false;
    while (j < text.size()) {
      char c = text[j];
      if (c == '"') in_string = !in_string;
      if (!in_string) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (depth == 0 && (c == ' ' || c == '\t')) break;
      }
      ++j;
    }
    out.push_back(parse_sign_ref(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

}  // namespace lexmt

#endif  // LEXMT_SIGN_REF_HPP
