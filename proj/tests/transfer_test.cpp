#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "lexmt/generator.hpp"
#include "lexmt/transfer.hpp"
#include "cover_oracle.hpp"

namespace lexmt {
namespace {

const std::string kDir = LEXMT_LINGWARE_DIR;

struct Fixture {
  TypeHierarchy h = TypeHierarchy::compile(dsl::read_file(kDir + "/hierarchy.tdl"), "hierarchy.tdl");
  Lexicon en, es;
  Grammar en_g, es_g;
  Bilexicon bl;
  std::unique_ptr<TransferLingware> fwd, bwd;
  Fixture() {
    en = Lexicon::load(h, dsl::read_file(kDir + "/english.lex"), "english.lex");
    en.load_rules(dsl::read_file(kDir + "/english.lexrules"), "english.lexrules");
    es = Lexicon::load(h, dsl::read_file(kDir + "/spanish.lex"), "spanish.lex");
    es.load_rules(dsl::read_file(kDir + "/spanish.lexrules"), "spanish.lexrules");
    en_g = Grammar::load(h, dsl::read_file(kDir + "/english.gram"), "english.gram");
    es_g = Grammar::load(h, dsl::read_file(kDir + "/spanish.gram"), "spanish.gram");
    bl.load(dsl::read_file(kDir + "/english-spanish.bilex"), "english-spanish.bilex");
    bl.load(dsl::read_file(kDir + "/english-spanish.birules"), "english-spanish.birules");
    fwd = std::make_unique<TransferLingware>(bl, en, es);
    bwd = std::make_unique<TransferLingware>(bl, es, en);
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

std::vector<TransferRep> reps_of(const std::string& sentence, bool spanish = false) {
  auto r = spanish ? parse(sentence, fx().es_g, fx().es) : parse(sentence, fx().en_g, fx().en);
  EXPECT_FALSE(r.analyses.empty()) << sentence << ": " << r.diagnostic;
  std::vector<TransferRep> out;
  for (const auto& a : r.analyses) out.push_back(skolemize(a));
  return out;
}

TransferRep rep_of(const std::string& sentence, bool spanish = false) {
  auto all = reps_of(sentence, spanish);
  return all.empty() ? TransferRep{} : all[0];
}

const BilexEntry* entry(const TransferLingware& lw, const std::string& text) {
  for (const auto& e : lw.entries())
    if (e.text() == text) return &e;
  ADD_FAILURE() << "no entry " << text;
  return nullptr;
}

std::vector<const BilexEntry*> usable(const TransferLingware& lw, const TransferRep& rep, std::vector<BilexEntry>& store,
                                      int depth = 2) {
  store = derive_entries(rep, lw, depth);
  std::vector<const BilexEntry*> out;
  for (const auto& e : lw.entries()) out.push_back(&e);
  for (const auto& e : store) out.push_back(&e);
  return out;
}

std::string bag_text(const std::vector<LexicalSign>& bag) {
  std::string out;
  for (const auto& s : bag) out += (out.empty() ? "" : " ") + s.text();
  return out;
}

std::multiset<std::string> bag_set(const std::vector<LexicalSign>& bag) {
  std::multiset<std::string> out;
  for (const auto& s : bag) out.insert(s.text());
  return out;
}

std::vector<std::string> texts(const std::vector<BilexEntry>& entries) {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.text());
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// ------------------------------------------------------------------- loading

TEST(Bilexicon, LoadsBothDirections) {
  EXPECT_EQ(fx().bl.left(), "english");
  EXPECT_EQ(fx().bl.right(), "spanish");
  EXPECT_EQ(fx().fwd->entries().size(), fx().bwd->entries().size());
  EXPECT_EQ(fx().fwd->rules().size(), 5u);
  ASSERT_TRUE(entry(*fx().fwd, "love1(x1,x2,x3) <-> amar1(x1,x2,x3) a1(x3)"));
  ASSERT_TRUE(entry(*fx().bwd, "amar1(x1,x2,x3) a1(x3) <-> love1(x1,x2,x3)"));
  // contexts change sides with the entry
  const auto* el = entry(*fx().bwd, "el1(x1) (common-noun(x1)) <-> the1(x1)");
  ASSERT_TRUE(el);
  EXPECT_EQ(el->sl_context.size(), 1u);
  EXPECT_TRUE(el->tl_context.empty());
}

TEST(Bilexicon, RejectsUnlinkedTargetVariables) {
  Bilexicon bl;
  bl.load("bilexicon english spanish\nbilex stab1(e,x,y) <-> dar1(e,x,p,y)\n");
  EXPECT_THROW(TransferLingware(bl, fx().en, fx().es), LingwareError);
  Bilexicon ok;
  ok.load("bilexicon english spanish\nbilex stab1(e,x,y) <-> dar1(e,x,p,y)\n  new p\n");
  EXPECT_NO_THROW(TransferLingware(ok, fx().en, fx().es));
}

TEST(Bilexicon, RejectsBadReferences) {
  auto load = [](const std::string& text) {
    Bilexicon bl;
    bl.load("bilexicon english spanish\n" + text);
    TransferLingware lw(bl, fx().en, fx().es);
  };
  EXPECT_THROW(load("bilex zzz1(x) <-> juan1(x)\n"), LingwareError);
  EXPECT_THROW(load("bilex john1(x) juan1(x)\n"), LingwareError);
  EXPECT_THROW(load("birule r\n  in $A:verb(e,s) <-> $B:verb(e,s)\n  out nosuch($A)(e,s) <-> identity($B)(e,s)\n"),
               LingwareError);
  EXPECT_THROW(load("birule r\n  in $A:verb(e,s) <-> $B:verb(e,s)\n  out identity($B)(e,s) <-> identity($A)(e,s)\n"),
               LingwareError);
  Bilexicon other;
  other.load("bilexicon french german\n");
  EXPECT_THROW(TransferLingware(other, fx().en, fx().es), std::invalid_argument);
}

TEST(Bilexicon, ContextsIgnoreVform) {
  // the causative entry's target context comes from an infinitive; it must
  // still be able to meet a gerund
  for (const auto& e : fx().fwd->derivable(2))
    for (std::size_t i = 0; i < e.tl_context.size(); ++i)
      EXPECT_FALSE(e.fs.node_at(Path{part_feature(Part::tl_context, i)} + make_path("syn.vform"))) << e.text();
}

// ------------------------------------------------------------------ matching

TEST(MatchEntry, IdiomBinding) {
  auto rep = rep_of("John kicked the bucket");
  ASSERT_EQ(rep.text(), "john1(1) kick1(2,1,3) the1(3) bucket1(3)");
  const auto* idiom = entry(*fx().fwd, "kick1(x1,x2,x3) the1(x3) bucket1(x3) <-> estirar1(x1,x2,x3) la1(x3) pata1(x3)");
  ASSERT_TRUE(idiom);
  auto b = match_entry(*idiom, rep, {1, 2, 3});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].positions, (std::vector<std::size_t>{1, 2, 3}));
  std::vector<NodeId> tl;
  for (std::size_t i = 0; i < 3; ++i) tl.push_back(*b[0].fs.node_at({part_feature(Part::tl, i)}));
  EXPECT_EQ(abbreviate(b[0].fs, tl), (std::vector<std::string>{"estirar1(2,1,3)", "la1(3)", "pata1(3)"}));
  // a plural bucket is not idiomatic
  auto plural = rep_of("John kicked the buckets");
  EXPECT_TRUE(match_entry(*idiom, plural, {1, 2, 3}).empty());
}

TEST(MatchEntry, NameMismatch) {
  auto rep = rep_of("John likes Mary");
  const auto* john = entry(*fx().fwd, "john1(x1) <-> juan1(x1)");
  ASSERT_TRUE(john);
  EXPECT_TRUE(match_entry(*john, rep, {2}).empty());
  EXPECT_EQ(match_entry(*john, rep, {0}).size(), 1u);
  EXPECT_TRUE(match_entry(*john, rep, {0, 2}).empty());
  EXPECT_THROW(match_entry(*john, rep, {7}), std::out_of_range);
}

TEST(MatchEntry, LoveBindsAllThreeArguments) {
  auto rep = rep_of("John likes Mary");
  const auto* love = entry(*fx().fwd, "love1(x1,x2,x3) <-> amar1(x1,x2,x3) a1(x3)");
  ASSERT_TRUE(love);
  auto b = match_entry(*love, rep, {1});
  ASSERT_EQ(b.size(), 1u);
  auto sem = semantics(*b[0].fs.at({part_feature(Part::sl, 0)}));
  ASSERT_EQ(sem.args.size(), 3u);
  EXPECT_EQ(sem.args[0].constants, std::vector<int>{2});
  EXPECT_EQ(sem.args[1].constants, std::vector<int>{1});
  EXPECT_EQ(sem.args[2].constants, std::vector<int>{3});
  EXPECT_EQ(abbreviate(*b[0].fs.at({part_feature(Part::tl, 1)})), "a1(3)");
}

// ---------------------------------------------------------------- derivation

TEST(DeriveEntries, AppleTree) {
  auto rep = rep_of("John likes the apple tree");
  auto d = derive_entries(rep, *fx().fwd, 2);
  ASSERT_EQ(d.size(), 1u) << ::testing::PrintToString(texts(d));
  EXPECT_EQ(d[0].text(), "apple1(x1,x2) tree1(x2) <-> manzano1(x2)");
  EXPECT_EQ(d[0].rule, "fruit-tree");
  EXPECT_EQ(d[0].parent, "apple1(x1) <-> manzana1(x1)");
  EXPECT_EQ(d[0].depth, 1);
}

TEST(DeriveEntries, SupportVerb) {
  auto rep = rep_of("John is thirsty");
  auto d = texts(derive_entries(rep, *fx().fwd, 2));
  EXPECT_EQ(d, (std::vector<std::string>{"be1(x1,x2,x3) thirsty1(x3) <-> tener1(x1,x2,x3) sed1(x3)"}));
  auto back = texts(derive_entries(rep_of("Juan tiene sed", true), *fx().bwd, 2));
  EXPECT_EQ(back, (std::vector<std::string>{"tener1(x1,x2,x3) sed1(x3) <-> be1(x1,x2,x3) thirsty1(x3)"}));
}

TEST(DeriveEntries, RelevanceFilter) {
  EXPECT_TRUE(derive_entries(rep_of("John likes Mary"), *fx().fwd, 2).empty());
  for (const auto& e : derive_entries(rep_of("John swam across the river"), *fx().fwd, 2))
    EXPECT_NE(e.rule, "fruit-tree") << e.text();
  EXPECT_THROW(derive_entries(rep_of("John likes Mary"), *fx().fwd, -1), std::invalid_argument);
}

TEST(DeriveEntries, TraceShowsParentAndResult) {
  std::vector<std::string> trace;
  (void)derive_entries(rep_of("John is thirsty"), *fx().fwd, 1, &trace);
  ASSERT_FALSE(trace.empty());
  bool found = false;
  for (const auto& t : trace)
    if (t.rfind("thirst1(x1) <-> sed1(x1) -> [", 0) == 0) found = true;
  EXPECT_TRUE(found) << trace[0];
}

TEST(DeriveEntries, DepthMonotonic) {
  for (const char* s : {"John is thirsty", "John marched the soldiers across the valley", "Mary thinks John just arrived",
                        "John likes the apple tree", "John swam across the river"}) {
    auto rep = rep_of(s);
    std::vector<std::string> prev;
    for (int d = 0; d <= 3; ++d) {
      auto cur = texts(derive_entries(rep, *fx().fwd, d));
      for (const auto& t : prev) EXPECT_TRUE(contains(cur, t)) << s << " depth " << d << ": " << t;
      if (d == 0) EXPECT_TRUE(cur.empty());
      prev = cur;
    }
  }
  std::set<std::string> all1, all2;
  for (const auto& e : fx().fwd->derivable(1)) all1.insert(e.text());
  for (const auto& e : fx().fwd->derivable(2)) all2.insert(e.text());
  EXPECT_TRUE(std::includes(all2.begin(), all2.end(), all1.begin(), all1.end()));
}

// Derived entries only fire on reps holding their licensing material.
TEST(DeriveEntries, Soundness) {
  for (const auto& e : fx().fwd->derivable(2)) {
    if (e.rule != "fruit-tree") continue;
    for (const char* s : {"John likes Mary", "John likes the tree", "John kicked the bucket"})
      EXPECT_FALSE(contains(texts(derive_entries(rep_of(s), *fx().fwd, 2)), e.text())) << s;
  }
}

// -------------------------------------------------------------------- covers

TEST(Cover, JohnLikesMary) {
  auto rep = rep_of("John likes Mary");
  std::vector<BilexEntry> store;
  auto r = cover(rep, usable(*fx().fwd, rep, store));
  ASSERT_EQ(r.covers.size(), 1u) << r.diagnostic;
  EXPECT_EQ(r.covers[0].matches.size(), 3u);
}

TEST(Cover, IdiomBeforeLiteral) {
  auto rep = rep_of("John kicked the bucket");
  std::vector<BilexEntry> store;
  auto r = cover(rep, usable(*fx().fwd, rep, store));
  ASSERT_GE(r.covers.size(), 2u);
  EXPECT_EQ(r.covers[0].matches.size(), 2u);
  EXPECT_EQ(r.covers[1].matches.size(), 4u);
  auto bag = build_tl_bag(r.covers[0]);
  ASSERT_EQ(bag.bags.size(), 1u);
  EXPECT_EQ(bag_set(bag.bags[0]), (std::multiset<std::string>{"juan1(1)", "estirar1(2,1,3)", "la1(3)", "pata1(3)"}));
  auto literal = build_tl_bag(r.covers[1]);
  ASSERT_EQ(literal.bags.size(), 1u);
  EXPECT_EQ(bag_set(literal.bags[0]), (std::multiset<std::string>{"juan1(1)", "patear1(2,1,3)", "el1(3)", "cubo1(3)"}));
}

TEST(Cover, CausativeWithLexicalizationPattern) {
  bool found = false;
  for (const auto& rep : reps_of("John marched the soldiers across the valley")) {
    std::vector<BilexEntry> store;
    auto r = cover(rep, usable(*fx().fwd, rep, store));
    for (const auto& c : r.covers) {
      std::set<std::string> rules;
      for (const auto& m : c.matches) rules.insert(m.entry->rule);
      if (!rules.count("causative") || !rules.count("lexicalization")) continue;
      auto bags = build_tl_bag(c);
      for (const auto& b : bags.bags) {
        auto out = realize_all(generate(b, fx().es_g));
        if (std::find(out.begin(), out.end(), "Juan hizo cruzar el valle a los soldados marchando") != out.end())
          found = true;
      }
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cover, DiagnosticNamesUncoveredPositions) {
  auto rep = rep_of("John likes Mary");
  std::vector<const BilexEntry*> only_john{entry(*fx().fwd, "john1(x1) <-> juan1(x1)")};
  auto r = cover(rep, only_john);
  EXPECT_TRUE(r.covers.empty());
  EXPECT_NE(r.diagnostic.find("love1(2,1,3)"), std::string::npos) << r.diagnostic;
  EXPECT_NE(r.diagnostic.find("mary1(3)"), std::string::npos) << r.diagnostic;
  EXPECT_EQ(r.diagnostic.find("john1"), std::string::npos) << r.diagnostic;
  auto raw = parse("John likes Mary", fx().en_g, fx().en).analyses.at(0);
  EXPECT_THROW(cover(raw, only_john), std::invalid_argument);
}

TEST(Cover, SourceContextNeedsAnotherEntry) {
  // el1's gender context sits on the noun, which only the noun entry consumes
  auto rep = rep_of("Juan ama al soldado", true);
  std::vector<BilexEntry> store;
  auto all = usable(*fx().bwd, rep, store);
  auto r = cover(rep, all);
  ASSERT_EQ(r.covers.size(), 1u) << r.diagnostic;
  for (const auto& m : r.covers[0].matches)
    for (auto p : m.context_positions) EXPECT_EQ(std::count(m.positions.begin(), m.positions.end(), p), 0);
  std::vector<const BilexEntry*> no_noun;
  for (const auto* e : all)
    if (e->text() != "soldado1(x1) <-> soldier1(x1)") no_noun.push_back(e);
  EXPECT_TRUE(cover(rep, no_noun).covers.empty());
}

TEST(Cover, ExactPartitionOnCorpus) {
  for (const char* s : {"John likes Mary", "John kicked the bucket", "Mary thinks John just arrived",
                        "John marched the soldiers across the valley", "John stabbed Mary", "John likes a piece of advice",
                        "John is thirsty"}) {
    for (const auto& rep : reps_of(s)) {
      std::vector<BilexEntry> store;
      for (const auto& c : cover(rep, usable(*fx().fwd, rep, store)).covers) {
        std::vector<int> seen(rep.size(), 0);
        for (const auto& m : c.matches)
          for (auto p : m.positions) ++seen[p];
        for (std::size_t p = 0; p < rep.size(); ++p) EXPECT_EQ(seen[p], 1) << s << " position " << p;
        auto a = c.assignment(rep.size());
        EXPECT_EQ(std::count(a.begin(), a.end(), -1), 0);
      }
    }
  }
}

TEST(Cover, OrderingIsFewestEntriesThenFewestDerived) {
  for (const char* s : {"John kicked the bucket", "John marched the soldiers across the valley", "John is thirsty"}) {
    for (const auto& rep : reps_of(s)) {
      std::vector<BilexEntry> store;
      auto covers = cover(rep, usable(*fx().fwd, rep, store)).covers;
      for (std::size_t i = 1; i < covers.size(); ++i) {
        auto a = std::pair{covers[i - 1].matches.size(), covers[i - 1].derived()};
        auto b = std::pair{covers[i].matches.size(), covers[i].derived()};
        EXPECT_LE(a, b) << s;
      }
    }
  }
}

std::set<std::vector<std::string>> cover_keys(const CoverResult& r) {
  std::set<std::vector<std::string>> out;
  for (const auto& c : r.covers) out.insert(c.keys());
  return out;
}

TEST(CoverOracle, AgreesOnCorpus) {
  for (const char* s : {"John likes Mary", "John kicked the bucket", "John marched the soldiers",
                        "Mary thinks John just arrived", "John is thirsty", "John likes the apple tree"}) {
    for (const auto& rep : reps_of(s)) {
      std::vector<BilexEntry> store;
      auto entries = usable(*fx().fwd, rep, store);
      auto fast = cover(rep, entries);
      EXPECT_EQ(cover_keys(fast), testing::oracle_covers(fx().h, rep, entries)) << s;
      EXPECT_FALSE(fast.covers.empty()) << s;
      EXPECT_EQ(fast.covers.size(), cover_keys(fast).size()) << s;
    }
  }
}

// Random reps of up to 7 signs, drawn from parsed sentences in both
// languages: prefixes, suffixes and random sub-lists keep or break the
// variable links the entries need.
TEST(CoverOracle, AgreesOnRandomReps) {
  std::vector<std::pair<TransferRep, const TransferLingware*>> pool;
  for (const char* s : {"John likes Mary", "John kicked the bucket", "John marched the soldiers",
                        "Mary thinks John just arrived", "John is thirsty", "John stabbed Mary",
                        "John swam across the river", "John likes a piece of advice"})
    for (auto& r : reps_of(s)) pool.emplace_back(std::move(r), fx().fwd.get());
  for (const char* s : {"Juan ama a María", "Juan hizo marchar a los soldados", "Juan estiró la pata",
                        "Juan le dio puñaladas a María", "Juan cruzó el río nadando"})
    for (auto& r : reps_of(s, true)) pool.emplace_back(std::move(r), fx().bwd.get());
  std::mt19937 rng(2024);
  int nonempty = 0;
  for (int round = 0; round < 120; ++round) {
    const auto& [source, lw] = pool[rng() % pool.size()];
    std::vector<LexicalSign> signs;
    for (const auto& s : source.signs)
      if (rng() % 4) signs.push_back(s);
    if (round % 3 == 0) signs = source.signs;
    if (signs.size() > 7) signs.resize(7);
    auto rep = TransferRep::of(signs, fx().h, true);
    std::vector<BilexEntry> store;
    auto entries = usable(*lw, rep, store);
    auto fast = cover(rep, entries);
    EXPECT_EQ(cover_keys(fast), testing::oracle_covers(fx().h, rep, entries)) << rep.text();
    nonempty += !fast.covers.empty();
  }
  EXPECT_GT(nonempty, 40);
}

// ---------------------------------------------------------------------- bags

TEST(Bag, AcabarDe) {
  auto rep = rep_of("Mary thinks John just arrived");
  std::vector<BilexEntry> store;
  auto r = cover(rep, usable(*fx().fwd, rep, store));
  ASSERT_EQ(r.covers.size(), 1u) << r.diagnostic;
  auto bag = build_tl_bag(r.covers[0]);
  ASSERT_EQ(bag.bags.size(), 1u) << bag.diagnostic;
  EXPECT_EQ(bag_set(bag.bags[0]), (std::multiset<std::string>{"maría1(1)", "pensar_que1(2,1,4)", "juan1(3)",
                                                             "acabar_de1(4,3,4)", "llegar1(4,3)"}));
}

TEST(Bag, EmptyCover) {
  auto bag = build_tl_bag(Cover{});
  ASSERT_EQ(bag.bags.size(), 1u);
  EXPECT_TRUE(bag.bags[0].empty());
  auto r = cover(TransferRep::of({}, fx().h, true), std::vector<const BilexEntry*>{});
  ASSERT_EQ(r.covers.size(), 1u);
  EXPECT_TRUE(r.covers[0].matches.empty());
}

TEST(Bag, TenseCopiedToTargetVerb) {
  auto rep = rep_of("John swam across the river");
  std::vector<BilexEntry> store;
  auto r = cover(rep, usable(*fx().fwd, rep, store));
  ASSERT_FALSE(r.covers.empty());
  auto bag = build_tl_bag(r.covers[0]);
  ASSERT_EQ(bag.bags.size(), 1u) << bag.diagnostic;
  for (const auto& s : bag.bags[0]) {
    auto tense = s.fs.type_at(make_path("syn.tense"));
    if (s.pred() == "cruzar1") EXPECT_EQ(fx().h.name(*tense), "past");
    // the gerund stays untensed
    if (s.pred() == "nadar1") EXPECT_TRUE(!tense || fx().h.name(*tense) == "tense");
  }
  EXPECT_EQ(realize_all(generate(bag.bags[0], fx().es_g)), (std::vector<std::string>{"Juan cruzó el río nadando"}));
}

TEST(Bag, TargetContextRejectsGenderMismatch) {
  auto rep = rep_of("John kicked the bucket");
  std::vector<BilexEntry> store;
  auto r = cover(rep, usable(*fx().fwd, rep, store));
  int rejected = 0;
  for (const auto& c : r.covers) {
    auto bag = build_tl_bag(c);
    if (bag.bags.empty()) {
      ++rejected;
      EXPECT_NE(bag.diagnostic.find("common-noun"), std::string::npos) << bag.diagnostic;
    }
  }
  EXPECT_EQ(rejected, 1);  // la1 with cubo1
}

TEST(Bag, TargetContextRefinesAnotherEntrysSign) {
  auto rep = rep_of("Juan hizo marchar a los soldados", true);
  std::vector<BilexEntry> store;
  auto r = cover(rep, usable(*fx().bwd, rep, store));
  ASSERT_FALSE(r.covers.empty()) << r.diagnostic;
  auto bag = build_tl_bag(r.covers[0]);
  ASSERT_EQ(bag.bags.size(), 1u) << bag.diagnostic;
  EXPECT_EQ(bag_set(bag.bags[0]),
            (std::multiset<std::string>{"john1(1)", "march1(3,4,2,1)", "the1(4)", "soldier1(4)"}));
  EXPECT_EQ(realize_all(generate(bag.bags[0], fx().en_g)), (std::vector<std::string>{"John marched the soldiers"}));
}

TEST(Bag, JoinedArgumentsAndNewVariables) {
  // only the analysis with "of advice" inside the noun phrase is covered
  auto advice = reps_of("John likes a piece of advice");
  ASSERT_EQ(advice.size(), 2u);
  std::vector<BilexEntry> store;
  EXPECT_TRUE(cover(advice[0], usable(*fx().fwd, advice[0], store)).covers.empty() !=
              cover(advice[1], usable(*fx().fwd, advice[1], store)).covers.empty());
  auto& covered = cover(advice[0], usable(*fx().fwd, advice[0], store)).covers.empty() ? advice[1] : advice[0];
  auto r = cover(covered, usable(*fx().fwd, covered, store));
  ASSERT_EQ(r.covers.size(), 1u) << r.diagnostic;
  auto bag = build_tl_bag(r.covers[0]);
  ASSERT_EQ(bag.bags.size(), 1u) << bag.diagnostic;
  EXPECT_EQ(realize_all(generate(bag.bags[0], fx().es_g)), (std::vector<std::string>{"Juan ama a un consejo"}));

  auto stab = rep_of("John stabbed Mary");
  r = cover(stab, usable(*fx().fwd, stab, store));
  ASSERT_EQ(r.covers.size(), 1u) << r.diagnostic;
  bag = build_tl_bag(r.covers[0]);
  ASSERT_EQ(bag.bags.size(), 1u) << bag.diagnostic;
  EXPECT_EQ(bag_set(bag.bags[0]), (std::multiset<std::string>{"juan1(1)", "le1(3)", "dar1(2,1,4,3)", "puñalada1(4)",
                                                             "a1(3)", "maría1(3)"}));
}

// Target constants come from the source rep, except fresh ones for
// target-only variables, which lie above every source constant.
TEST(BagProperties, ConstantPreservation) {
  for (const char* s : {"John likes Mary", "John kicked the bucket", "Mary thinks John just arrived",
                        "John marched the soldiers across the valley", "John stabbed Mary", "John likes a piece of advice",
                        "John is thirsty", "John likes the apple trees", "John swam across the river"}) {
    for (const auto& rep : reps_of(s)) {
      std::set<int> source;
      for (const auto& sign : rep.signs)
        for (const auto& a : semantics(sign.fs).args) source.insert(a.constants.begin(), a.constants.end());
      std::vector<BilexEntry> store;
      for (const auto& c : cover(rep, usable(*fx().fwd, rep, store)).covers) {
        bool has_new = false;
        for (const auto& m : c.matches) has_new = has_new || m.entry->text().find("dar1") != std::string::npos;
        for (const auto& b : build_tl_bag(c).bags)
          for (const auto& sign : b)
            for (const auto& a : semantics(sign.fs).args)
              for (int k : a.constants) {
                if (source.count(k)) continue;
                EXPECT_TRUE(has_new) << s << ": " << bag_text(b);
                EXPECT_GT(k, *source.rbegin());
              }
      }
    }
  }
}

}  // namespace
}  // namespace lexmt
