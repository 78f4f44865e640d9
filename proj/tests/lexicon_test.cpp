#include <gtest/gtest.h>

#include "lexmt/lexicon.hpp"

namespace lexmt {
namespace {

const std::string kDir = LEXMT_LINGWARE_DIR;

struct Fixture {
  TypeHierarchy h = TypeHierarchy::compile(dsl::read_file(kDir + "/hierarchy.tdl"), "hierarchy.tdl");
  Lexicon en, es;
  Fixture() {
    en = Lexicon::load(h, dsl::read_file(kDir + "/english.lex"), "english.lex");
    en.load_rules(dsl::read_file(kDir + "/english.lexrules"), "english.lexrules");
    es = Lexicon::load(h, dsl::read_file(kDir + "/spanish.lex"), "spanish.lex");
    es.load_rules(dsl::read_file(kDir + "/spanish.lexrules"), "spanish.lexrules");
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

FeatureStructure bundle(const std::string& equations) {
  StructureBuilder b(fx().h);
  for (const auto& w : dsl::words(equations)) {
    auto eq = w.find('=');
    EXPECT_TRUE(b.set(make_path(w.substr(0, eq)), w.substr(eq + 1)));
  }
  return *b.build();
}

std::string type_at(const FeatureStructure& fs, const char* path) {
  auto n = fs.node_at(make_path(path));
  return n ? fs.type_name(*n) : "-";
}

std::string atom_at(const FeatureStructure& fs, const char* path) {
  auto a = fs.atom_at(make_path(path));
  return a ? a->str() : "-";
}

TEST(Lookup, ProperName) {
  auto r = fx().en.lookup("John");
  ASSERT_EQ(r.signs.size(), 1u);
  EXPECT_EQ(r.signs[0].id, "john1");
  EXPECT_EQ(type_at(r.signs[0].fs, "syn.agr"), "3sg");
  EXPECT_EQ(r.signs[0].fs.type_name(), "proper-name");
  EXPECT_EQ(r.signs[0].language(), "english");
  EXPECT_TRUE(r.diagnostic.empty());
}

TEST(Lookup, InflectedVerb) {
  auto r = fx().es.lookup("ama");
  ASSERT_EQ(r.signs.size(), 1u);
  EXPECT_EQ(r.signs[0].id, "amar1");
  EXPECT_EQ(type_at(r.signs[0].fs, "syn.tense"), "pres");
  EXPECT_EQ(type_at(r.signs[0].fs, "syn.agr"), "3sg");
  EXPECT_EQ(type_at(r.signs[0].fs, "syn.vform"), "fin");
}

TEST(Lookup, UnknownWordHasDiagnostic) {
  auto r = fx().en.lookup("zzz");
  EXPECT_TRUE(r.signs.empty());
  EXPECT_NE(r.diagnostic.find("zzz"), std::string::npos);
}

TEST(Lookup, MultiWordAndDerivedForms) {
  auto r = fx().es.lookup("acaba de");
  ASSERT_EQ(r.signs.size(), 1u);
  EXPECT_EQ(r.signs[0].id, "acabar_de1");
  auto tree = fx().es.lookup("manzano");
  ASSERT_EQ(tree.signs.size(), 1u);
  EXPECT_EQ(tree.signs[0].pred(), "manzano1");
  EXPECT_EQ(type_at(tree.signs[0].fs, "qualia.formal"), "tree");
  EXPECT_EQ(type_at(tree.signs[0].fs, "syn.gend"), "masc");
}

TEST(MonoRule, AdjectiveFromStateNoun) {
  const auto* thirst = fx().en.find("thirst1");
  ASSERT_TRUE(thirst);
  auto out = apply_mono_rule(*fx().en.rule("adjective"), *thirst);
  ASSERT_EQ(out.size(), 1u);
  const auto& adj = out[0];
  EXPECT_EQ(adj.fs.type_name(), "adjective");
  EXPECT_EQ(adj.pred(), "thirsty1");
  EXPECT_EQ(atom_at(adj.fs, "orth"), "thirsty");
  EXPECT_EQ(atom_at(adj.fs, "qualia.supp.ntrl"), "be1");
  EXPECT_EQ(type_at(adj.fs, "syn.cat"), "adj");
  // compatible with the listed adjective
  EXPECT_TRUE(unify(adj.fs, fx().en.find("thirsty1")->fs));
}

TEST(MonoRule, FruitTree) {
  auto out = apply_mono_rule(*fx().es.rule("fruit-tree"), *fx().es.find("manzana1"));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].pred(), "manzano1");
  EXPECT_EQ(atom_at(out[0].fs, "orth"), "manzano");
  EXPECT_EQ(type_at(out[0].fs, "qualia.formal"), "tree");
  EXPECT_EQ(synthesize(out[0], bundle("syn.agr=3sg")), "manzano");
  EXPECT_TRUE(apply_mono_rule(*fx().es.rule("fruit-tree"), *fx().es.find("amar1")).empty());
}

TEST(MonoRule, FreshVariables) {
  const auto& amar = *fx().es.find("amar1");
  auto out = apply_mono_rule(*fx().es.rule("identity"), amar);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(equivalent(out[0].fs, amar.fs));
  auto caus = apply_mono_rule(*fx().en.rule("causative"), *fx().en.find("march1"));
  ASSERT_EQ(caus.size(), 1u);
  EXPECT_EQ(arity(caus[0].fs), 4u);
  EXPECT_EQ(type_at(caus[0].fs, "syn.val"), "caus");
  EXPECT_TRUE(apply_mono_rule(*fx().en.rule("causative"), *fx().en.find("swim1")).empty());
}

TEST(Synthesize, ParadigmCells) {
  EXPECT_EQ(synthesize(*fx().es.find("estirar1"), bundle("syn.vform=fin syn.tense=past syn.agr=3sg")), "estiró");
  EXPECT_EQ(synthesize(*fx().es.find("acabar_de1"), bundle("syn.vform=fin syn.tense=pres syn.agr=3sg")), "acaba de");
  EXPECT_EQ(synthesize(*fx().es.find("nadar1"), bundle("syn.vform=ger")), "nadando");
}

TEST(Synthesize, MissingCellIsAnError) {
  EXPECT_THROW((void)synthesize(*fx().es.find("sed1"), bundle("syn.agr=3pl")), SynthesisError);
  try {
    (void)synthesize(*fx().es.find("nadar1"), bundle("syn.vform=fin"));
    FAIL();
  } catch (const SynthesisError& e) {
    EXPECT_NE(std::string(e.what()).find("nadar1"), std::string::npos);
  }
}

// Every form looks up to a sign of the same lemma carrying the cell's features.
TEST(LexiconProperties, SynthesisRoundTrip) {
  for (const Lexicon* lex : {&fx().en, &fx().es}) {
    for (const auto& sign : lex->signs()) {
      for (const auto& cell : sign.paradigm->cells) {
        auto inst = unify(sign.fs, cell.features);
        ASSERT_TRUE(inst);
        std::string surface = synthesize(sign, *inst);
        auto found = lex->lookup(surface);
        bool ok = false;
        for (const auto& s : found.signs)
          if (s.lemma() == sign.lemma() && subsumes(cell.features, s.fs)) ok = true;
        EXPECT_TRUE(ok) << sign.id << " " << cell.name << " -> " << surface;
      }
    }
  }
}

TEST(LexiconProperties, IdentityIsRenaming) {
  for (const Lexicon* lex : {&fx().en, &fx().es}) {
    for (const auto& sign : lex->signs()) {
      auto out = apply_mono_rule(*lex->rule("identity"), sign);
      ASSERT_EQ(out.size(), 1u) << sign.id;
      EXPECT_TRUE(equivalent(out[0].fs, sign.fs)) << sign.id;
    }
  }
}

TEST(LexiconProperties, FruitTreeAppliesExactlyToTreeFruits) {
  const auto& h = fx().h;
  FeatureStructure pattern = bundle("qualia.formal=tree-fruit");
  std::set<std::string> applied, expected;
  for (const auto& sign : fx().es.signs()) {
    if (!apply_mono_rule(*fx().es.rule("fruit-tree"), sign).empty()) applied.insert(sign.id);
    if (sign.fs.type() == h.id("common-noun") && unify(sign.fs, pattern)) expected.insert(sign.id);
  }
  EXPECT_EQ(applied, expected);
  EXPECT_EQ(applied.size(), 6u);
  EXPECT_FALSE(applied.count("fresa1"));
}

}  // namespace
}  // namespace lexmt
