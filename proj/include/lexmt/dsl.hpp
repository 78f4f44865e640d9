#ifndef LEXMT_DSL_HPP
#define LEXMT_DSL_HPP

// Line-oriented lingware source format.
//
// A file is a sequence of blocks. A block starts with an unindented header
// line and owns every following indented line. `#` starts a comment when it
// begins a line or follows whitespace and is itself followed by whitespace or
// the end of the line, so `#tag` reentrancy labels survive.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexmt {

class LingwareError : public std::runtime_error {
public:
  LingwareError(std::string source, int line, const std::string& what)
      : std::runtime_error(format(source, line, what)), source_(std::move(source)), line_(line) {}

  [[nodiscard]] const std::string& source() const { return source_; }
  [[nodiscard]] int line() const { return line_; }

private:
  static std::string format(const std::string& source, int line, const std::string& what) {
    std::string out = source.empty() ? std::string("<input>") : source;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::string source_;
  int line_;
};

namespace dsl {

struct Line {
  int number = 0;
  std::string text;  // comment stripped, trimmed
};

struct Block {
  Line header;
  std::vector<Line> body;
};

inline std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') in_string = !in_string;
    if (c != '#' || in_string) continue;
    bool starts = i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t';
    bool spaced = i + 1 == s.size() || s[i + 1] == ' ' || s[i + 1] == '\t';
    if (starts && spaced) return std::string(s.substr(0, i));
  }
  return std::string(s);
}

inline std::vector<Block> read_blocks(std::string_view text, const std::string& source = {}) {
  std::vector<Block> blocks;
  std::size_t pos = 0;
  int number = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    std::string stripped = strip_comment(raw);
    std::string_view body = trim(stripped);
    if (body.empty()) {
      if (end == text.size()) break;
      continue;
    }
    bool indented = !raw.empty() && (raw.front() == ' ' || raw.front() == '\t');
    if (indented) {
      if (blocks.empty()) throw LingwareError(source, number, "indented line outside a block");
      blocks.back().body.push_back({number, std::string(body)});
    } else {
      blocks.push_back({{number, std::string(body)}, {}});
    }
    if (end == text.size()) break;
  }
  return blocks;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LingwareError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Whitespace split.
inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

/// First word of a header line.
inline std::string keyword(const Line& l) {
  auto w = words(l.text);
  return w.empty() ? std::string() : w.front();
}

/// Text after the first word.
inline std::string rest(const Line& l) {
  std::string_view s = l.text;
  auto sp = s.find_first_of(" \t");
  if (sp == std::string_view::npos) return {};
  return std::string(trim(s.substr(sp)));
}

/// Unquote a "..." literal; plain words pass through.
inline std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

}  // namespace dsl
}  // namespace lexmt

#endif  // LEXMT_DSL_HPP
