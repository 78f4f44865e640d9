// lexmt: command-line driver for the translation pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>

#include "lexmt/pipeline.hpp"

namespace {

using json = nlohmann::json;
using namespace lexmt;

enum Exit { ok = 0, mismatch = 1, parse_failed = 2, transfer_failed = 3, generate_failed = 4, usage = 64, data = 65 };

int exit_for(Stage s) {
  switch (s) {
    case Stage::parse: return parse_failed;
    case Stage::transfer: return transfer_failed;
    case Stage::generate: return generate_failed;
    default: return ok;
  }
}

std::string default_lingware() {
  if (const char* env = std::getenv("LEXMT_LINGWARE")) return env;
  return LEXMT_LINGWARE_DIR;
}

struct Options {
  std::string lingware = default_lingware();
  std::string from = "english", to = "spanish";
  int depth = 2;
  std::size_t max_results = 0;
  bool all = false;
  std::string trace;
  std::string report = "text";
  std::vector<std::string> text;
  std::string file;
};

SessionConfig config_of(const Options& o) {
  SessionConfig c;
  c.from = o.from;
  c.to = o.to;
  c.depth = o.depth;
  c.max_results = o.max_results;
  c.all = o.all;
  for (const auto& s : dsl::split(o.trace, ','))
    if (!dsl::trim(s).empty()) c.trace.insert(std::string(dsl::trim(s)));
  return c;
}

std::vector<std::string> inputs(const Options& o) {
  if (!o.text.empty()) {
    std::string joined;
    for (const auto& w : o.text) joined += (joined.empty() ? "" : " ") + w;
    return {joined};
  }
  std::vector<std::string> lines;
  for (std::string line; std::getline(std::cin, line);)
    if (!dsl::trim(line).empty()) lines.push_back(line);
  return lines;
}

void print_trace(const std::vector<std::string>& trace) {
  for (const auto& t : trace) std::cerr << t << "\n";
}

json outputs_json(const TranslationResult& r) {
  json out = json::array();
  for (const auto& o : r.outputs) out.push_back({{"text", o.text}, {"cover", o.cover}, {"analysis", o.analysis + 1}});
  return out;
}

int run_translate(const Lingware& lw, const Options& o) {
  auto config = config_of(o);
  int status = ok;
  for (const auto& line : inputs(o)) {
    auto r = translate(line, lw, config);
    print_trace(r.trace);
    status = std::max(status, exit_for(r.failed));
    if (o.report == "jsonl") {
      json rec{{"input", r.input},     {"ok", r.ok()},           {"analyses", r.analyses}, {"covers", r.covers},
               {"outputs", outputs_json(r)}, {"diagnostics", r.diagnostics}};
      if (!r.ok()) rec["failed_stage"] = stage_name(r.failed);
      std::cout << rec.dump() << "\n";
      continue;
    }
    if (!r.ok()) {
      std::cerr << "lexmt: " << stage_name(r.failed) << " failed for \"" << line << "\"\n";
      for (const auto& d : r.diagnostics) std::cerr << "  " << d << "\n";
      continue;
    }
    if (config.all)
      for (const auto& out : r.outputs) std::cout << out.text << "\n";
    else
      std::cout << r.outputs.front().text << "\n";
  }
  return status;
}

int run_check(const Lingware& lw, const Options& o) {
  std::vector<CorpusLine> corpus;
  try {
    corpus = read_corpus(dsl::read_file(o.file));
  } catch (const CorpusError& e) {
    std::cerr << "lexmt: " << o.file << ": " << e.what() << "\n";
    return data;
  }
  auto report = check_corpus(corpus, lw, config_of(o));
  for (const auto& l : report.lines) {
    print_trace(l.result.trace);
    if (o.report == "jsonl") {
      std::cout << json{{"line", l.entry.line},           {"source", l.entry.source},
                        {"expected", l.entry.expected},   {"mode", expect_name(l.entry.mode)},
                        {"passed", l.passed},             {"outputs", l.result.texts()},
                        {"diagnostics", l.result.diagnostics}}
                       .dump()
                << "\n";
      continue;
    }
    std::cout << (l.passed ? "PASS" : "FAIL") << " " << l.entry.line << ": " << l.entry.source << " => "
              << l.entry.expected << " (" << expect_name(l.entry.mode) << ")\n";
    if (!l.passed) {
      for (const auto& t : l.result.texts()) std::cout << "    got: " << t << "\n";
      for (const auto& d : l.result.diagnostics) std::cout << "    " << d << "\n";
    }
  }
  if (o.report != "jsonl") std::cout << report.passed() << " passed, " << report.failed() << " failed\n";
  return report.ok() ? ok : mismatch;
}

int run_expand(const Lingware& lw, const Options& o) {
  auto config = config_of(o);
  std::vector<std::string> trace;
  auto entries = expand(lw, config, config.tracing("rules") ? &trace : nullptr);
  print_trace(trace);
  for (const auto& e : entries) {
    if (o.report == "jsonl") {
      json rec{{"entry", e.text()}, {"origin", e.origin()}, {"depth", e.depth}};
      if (!e.is_static()) {
        rec["rule"] = e.rule;
        rec["parent"] = e.parent;
      }
      std::cout << rec.dump() << "\n";
    } else {
      std::cout << e.text() << "    [" << e.origin() << "]\n";
    }
  }
  return ok;
}

int run_parse(const Lingware& lw, const Options& o) {
  int status = ok;
  const auto& g = lw.grammar(o.from);
  const auto& lex = lw.lexicon(o.from);
  auto config = config_of(o);
  for (const auto& line : inputs(o)) {
    auto r = parse(line, g, lex, config.limits);
    std::vector<std::string> reps;
    for (const auto& a : r.analyses) reps.push_back(skolemize(a).text());
    if (r.analyses.empty()) status = parse_failed;
    if (o.report == "jsonl") {
      json rec{{"input", line}, {"analyses", reps}};
      if (!r.diagnostic.empty()) rec["diagnostic"] = r.diagnostic;
      std::cout << rec.dump() << "\n";
      continue;
    }
    if (r.analyses.empty()) std::cerr << "lexmt: " << r.diagnostic << "\n";
    for (std::size_t i = 0; i < reps.size(); ++i) {
      std::cout << reps[i] << "\n";
      if (config.tracing("parse")) std::cerr << render(r.trees[i]) << "\n";
    }
  }
  return status;
}

int run_generate(const Lingware& lw, const Options& o) {
  const auto& lex = lw.lexicon(o.to);
  std::vector<LexicalSign> bag;
  try {
    bag = read_bag(o.file == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : dsl::read_file(o.file), lex);
  } catch (const std::exception& e) {
    std::cerr << "lexmt: " << o.file << ": " << e.what() << "\n";
    return data;
  }
  auto config = config_of(o);
  auto r = generate(bag, lw.grammar(o.to), config.limits, config.tracing("generate"));
  print_trace(r.trace);
  std::vector<std::string> failures;
  auto texts = realize_all(r, &failures);
  for (const auto& f : failures) std::cerr << "lexmt: " << f << "\n";
  if (o.report == "jsonl") {
    json rec{{"bag", o.file}, {"outputs", texts}};
    if (texts.empty()) rec["diagnostic"] = r.diagnostic;
    std::cout << rec.dump() << "\n";
  } else {
    if (texts.empty()) std::cerr << "lexmt: " << r.diagnostic << "\n";
    for (const auto& t : texts) std::cout << t << "\n";
  }
  return texts.empty() ? generate_failed : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexicalist transfer translation between English and Spanish"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--lingware", o.lingware, "lingware directory")->check(CLI::ExistingDirectory);
    cmd->add_option("--from", o.from, "source language");
    cmd->add_option("--to", o.to, "target language");
    cmd->add_option("--depth", o.depth, "bi-lexical rule derivation depth")->check(CLI::NonNegativeNumber);
    cmd->add_option("--trace", o.trace, "comma-separated stages: parse, transfer, rules, generate");
    cmd->add_option("--report", o.report, "output format")->check(CLI::IsMember({"text", "jsonl"}));
  };
  auto* translate_cmd = app.add_subcommand("translate", "translate sentences (arguments, or one per stdin line)");
  common(translate_cmd);
  translate_cmd->add_flag("--all", o.all, "print every translation, not only the first");
  translate_cmd->add_option("--max-results", o.max_results, "stop after this many translations (0: no limit)");
  translate_cmd->add_option("text", o.text, "sentence");

  auto* check_cmd = app.add_subcommand("check", "check a golden corpus (source<TAB>expected<TAB>mode)");
  common(check_cmd);
  check_cmd->add_option("corpus", o.file, "corpus file")->required()->check(CLI::ExistingFile);

  auto* expand_cmd = app.add_subcommand("expand", "list bilingual entries and all entries derivable from them");
  common(expand_cmd);

  auto* parse_cmd = app.add_subcommand("parse", "print the skolemized analyses of sentences");
  common(parse_cmd);
  parse_cmd->add_option("text", o.text, "sentence");

  auto* generate_cmd = app.add_subcommand("generate", "realize a bag of target signs read from a file (- for stdin)");
  common(generate_cmd);
  generate_cmd->add_option("bag", o.file, "bag file")->required();

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<Lingware> lw;
  try {
    lw = Lingware::load(o.lingware);
  } catch (const std::exception& e) {
    std::cerr << "lexmt: " << e.what() << "\n";
    return data;
  }
  try {
    if (*translate_cmd) return run_translate(*lw, o);
    if (*check_cmd) return run_check(*lw, o);
    if (*expand_cmd) return run_expand(*lw, o);
    if (*parse_cmd) return run_parse(*lw, o);
    if (*generate_cmd) return run_generate(*lw, o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "lexmt: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
