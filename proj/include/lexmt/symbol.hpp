#ifndef LEXMT_SYMBOL_HPP
#define LEXMT_SYMBOL_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace lexmt {

/// Interned string. Feature names and atomic values (orthography, predicate
/// names, skolem constants) are compared by id.
class Symbol {
public:
  Symbol() = default;
  explicit Symbol(std::string_view s) : id_(table().intern(s)) {}

  [[nodiscard]] const std::string& str() const { return table().lookup(id_); }
  [[nodiscard]] std::uint32_t id() const { return id_; }
  [[nodiscard]] bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend auto operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

private:
  class Table {
  public:
    Table() { strings_.emplace_back(); }

    std::uint32_t intern(std::string_view s) {
      {
        std::shared_lock lock(mu_);
        if (auto it = index_.find(s); it != index_.end()) return it->second;
      }
      std::unique_lock lock(mu_);
      if (auto it = index_.find(s); it != index_.end()) return it->second;
      strings_.emplace_back(s);
      auto id = static_cast<std::uint32_t>(strings_.size() - 1);
      index_.emplace(std::string_view(strings_.back()), id);
      return id;
    }

    const std::string& lookup(std::uint32_t id) {
      std::shared_lock lock(mu_);
      return strings_[id];
    }

  private:
    std::shared_mutex mu_;
    std::deque<std::string> strings_;  // stable addresses for the views below
    std::unordered_map<std::string_view, std::uint32_t> index_;
  };

  static Table& table() {
    static Table t;
    return t;
  }

  std::uint32_t id_ = 0;
};

}  // namespace lexmt

template <>
struct std::hash<lexmt::Symbol> {
  std::size_t operator()(lexmt::Symbol s) const noexcept { return s.id(); }
};

#endif  // LEXMT_SYMBOL_HPP
