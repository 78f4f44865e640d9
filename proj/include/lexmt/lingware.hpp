#ifndef LEXMT_LINGWARE_HPP
#define LEXMT_LINGWARE_HPP

// Everything in one lingware directory:
//
//   hierarchy.tdl                the shared type hierarchy
//   LANG.lex, LANG.lexrules      lexicon and monolingual lexical rules
//   LANG.gram                    grammar
//   A-B.bilex, A-B.birules       bilingual entries and bi-lexical rules
//
// A language is any LANG with a .lex file. Bilingual files serve both
// directions.

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "grammar.hpp"
#include "lexicon.hpp"
#include "transfer.hpp"

namespace lexmt {

class Lingware {
public:
  Lingware(const Lingware&) = delete;
  Lingware& operator=(const Lingware&) = delete;

  static std::unique_ptr<Lingware> load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::invalid_argument("no lingware directory " + dir.string());
    std::unique_ptr<Lingware> lw(new Lingware);
    lw->dir_ = dir;
    auto read = [&](const fs::path& p) { return dsl::read_file(p.string()); };
    lw->h_ = std::make_unique<TypeHierarchy>(TypeHierarchy::compile(read(dir / "hierarchy.tdl"), "hierarchy.tdl"));

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());

    for (const auto& f : files) {
      if (f.extension() != ".lex") continue;
      std::string lang = f.stem().string();
      auto lex = Lexicon::load(*lw->h_, read(f), f.filename().string());
      if (lex.language() != lang)
        throw LingwareError(f.filename().string(), 1, "declares language '" + lex.language() + "'");
      if (auto rules = dir / (lang + ".lexrules"); fs::exists(rules)) lex.load_rules(read(rules), rules.filename().string());
      lw->lexicons_.emplace(lang, std::move(lex));
      auto gram = dir / (lang + ".gram");
      if (!fs::exists(gram)) throw LingwareError(gram.filename().string(), 0, "missing grammar for " + lang);
      lw->grammars_.emplace(lang, Grammar::load(*lw->h_, read(gram), gram.filename().string()));
    }

    for (const auto& f : files) {
      if (f.extension() != ".bilex") continue;
      auto bl = std::make_unique<Bilexicon>();
      bl->load(read(f), f.filename().string());
      if (auto rules = fs::path(f).replace_extension(".birules"); fs::exists(rules))
        bl->load(read(rules), rules.filename().string());
      const auto& a = bl->left();
      const auto& b = bl->right();
      if (!lw->lexicons_.count(a) || !lw->lexicons_.count(b))
        throw LingwareError(f.filename().string(), 1, "bilexicon for unknown language " + a + " or " + b);
      lw->transfer_.emplace(std::pair{a, b}, std::make_unique<TransferLingware>(*bl, lw->lexicons_.at(a), lw->lexicons_.at(b)));
      lw->transfer_.emplace(std::pair{b, a}, std::make_unique<TransferLingware>(*bl, lw->lexicons_.at(b), lw->lexicons_.at(a)));
      lw->bilexicons_.push_back(std::move(bl));
    }
    return lw;
  }

  [[nodiscard]] const std::filesystem::path& directory() const { return dir_; }
  [[nodiscard]] const TypeHierarchy& hierarchy() const { return *h_; }

  [[nodiscard]] std::vector<std::string> languages() const {
    std::vector<std::string> out;
    for (const auto& [name, lex] : lexicons_) out.push_back(name);
    return out;
  }

  [[nodiscard]] bool has_language(const std::string& lang) const { return lexicons_.count(lang) > 0; }

  [[nodiscard]] const Lexicon& lexicon(const std::string& lang) const {
    auto it = lexicons_.find(lang);
    if (it == lexicons_.end()) throw std::invalid_argument("no lexicon for language '" + lang + "'");
    return it->second;
  }

  [[nodiscard]] const Grammar& grammar(const std::string& lang) const {
    auto it = grammars_.find(lang);
    if (it == grammars_.end()) throw std::invalid_argument("no grammar for language '" + lang + "'");
    return it->second;
  }

  [[nodiscard]] bool has_transfer(const std::string& from, const std::string& to) const {
    return transfer_.count({from, to}) > 0;
  }

  [[nodiscard]] const TransferLingware& transfer(const std::string& from, const std::string& to) const {
    auto it = transfer_.find({from, to});
    if (it == transfer_.end()) throw std::invalid_argument("no bilexicon between " + from + " and " + to);
    return *it->second;
  }

private:
  Lingware() = default;

  std::filesystem::path dir_;
  std::unique_ptr<TypeHierarchy> h_;
  std::map<std::string, Lexicon> lexicons_;
  std::map<std::string, Grammar> grammars_;
  std::vector<std::unique_ptr<Bilexicon>> bilexicons_;
  std::map<std::pair<std::string, std::string>, std::unique_ptr<TransferLingware>> transfer_;
};

}  // namespace lexmt

#endif  // LEXMT_LINGWARE_HPP
