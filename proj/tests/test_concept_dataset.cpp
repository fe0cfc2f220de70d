#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "lexalign/concept_dataset.hpp"
#include "support.hpp"

using namespace lexalign;

namespace {

// Ten synsets shared by en/fr/ja, listed by hand:
//   s01..s08 at depth 6..9, s09 at depth 5, s10 at depth 3
//   s07 repeats s02's English lemma "bank"
// plus s11 (en, fr only) and s12 (fr only).
// Surviving: s01..s08 minus s07 (duplicate, higher id) = 7 records.
const char* kEn =
    "s01\t6\tphysical\tdog|domestic_dog\n"
    "s02\t7\tabstract\tbank|depository\n"
    "s03\t6\tabstract\thappiness\n"
    "s04\t8\tphysical\tvehicle\n"
    "s05\t9\tphysical\tcar|auto\n"
    "s06\t6\tabstract\tidea\n"
    "s07\t7\tphysical\tbank\n"
    "s08\t6\tabstract\ttime\n"
    "s09\t5\tabstract\tentity_like\n"
    "s10\t3\tphysical\tobject\n"
    "s11\t6\tphysical\tcat\n";
const char* kFr =
    "s01\t6\tphysical\tchien\n"
    "s02\t7\tabstract\tbanque\n"
    "s03\t6\tabstract\tbonheur\n"
    "s04\t8\tphysical\tvéhicule\n"
    "s05\t9\tphysical\tvoiture\n"
    "s06\t6\tabstract\tidée\n"
    "s07\t7\tphysical\tberge\n"
    "s08\t6\tabstract\ttemps\n"
    "s09\t5\tabstract\tentité\n"
    "s10\t3\tphysical\tobjet\n"
    "s11\t6\tphysical\tchat\n"
    "s12\t6\tphysical\tpomme\n";
const char* kJa =
    "s01\t6\tphysical\t犬\n"
    "s02\t7\tabstract\t銀行\n"
    "s03\t6\tabstract\t幸福\n"
    "s04\t8\tphysical\t乗り物\n"
    "s05\t9\tphysical\t車\n"
    "s06\t6\tabstract\t考え\n"
    "s07\t7\tphysical\t土手\n"
    "s08\t6\tabstract\t時間\n"
    "s09\t5\tabstract\t実体\n"
    "s10\t3\tphysical\t物体\n";

std::vector<WordnetExport> fixture_exports() {
  return {parse_export(kEn, "en"), parse_export(kFr, "fr"), parse_export(kJa, "ja")};
}

ConceptTable synthetic_table(std::size_t abstract, std::size_t physical) {
  std::vector<ConceptRecord> recs;
  const auto ids = fixture::make_ids(abstract + physical, "c");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ConceptRecord r;
    r.synset_id = ids[i];
    r.depth = 6;
    r.category = i < abstract ? Category::abstract : Category::physical;
    r.forms["en"] = "w" + std::to_string(i);
    recs.push_back(std::move(r));
  }
  return ConceptTable({"en"}, std::move(recs));
}

}  // namespace

TEST(BuildTable, FixtureYieldsSevenRecords) {
  const auto t = build_table(fixture_exports(), {"en", "fr", "ja"}, 5);
  ASSERT_EQ(t.size(), 7u);
  std::vector<std::string> ids;
  for (const auto& r : t.records()) ids.push_back(r.synset_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"s01", "s02", "s03", "s04", "s05", "s06", "s08"}));
  EXPECT_EQ(t.records()[0].form("en"), "dog");
  EXPECT_EQ(t.records()[0].form("ja"), "犬");
  EXPECT_EQ(t.records()[3].form("fr"), "véhicule");
  EXPECT_EQ(t.records()[2].category, Category::abstract);
}

TEST(BuildTable, InvariantToExportOrder) {
  auto ex = fixture_exports();
  const auto a = serialize_table(build_table(ex, {"ja", "en", "fr"}, 5));
  std::reverse(ex.begin(), ex.end());
  const auto b = serialize_table(build_table(ex, {"fr", "ja", "en"}, 5));
  EXPECT_EQ(a, b);
}

TEST(BuildTable, SingleLanguageIsExportMinusDepthFilter) {
  const auto fr = parse_export(kFr, "fr");
  const auto t = build_table({fr}, {"fr"}, 5);
  std::size_t expected = 0;
  for (const auto& r : fr.rows) expected += r.depth > 5;
  EXPECT_EQ(t.size(), expected);
  EXPECT_EQ(t.size(), 10u);
}

TEST(BuildTable, DepthBoundaryIsConfigurable) {
  EXPECT_EQ(build_table(fixture_exports(), {"en", "fr", "ja"}, 4).size(), 8u);  // s09 (depth 5) kept
}

TEST(BuildTable, Errors) {
  EXPECT_THROW(build_table({parse_export(kEn, "en")}, {"en", "fr"}, 5), ValidationError);
  EXPECT_THROW(parse_export("s01\t6\tphysical\tdog\ns01\t6\tphysical\thound\n", "en"), FormatError);
  EXPECT_THROW(parse_export("s01\tx\tphysical\tdog\n", "en"), FormatError);
  EXPECT_THROW(parse_export("s01\t6\tnoun.artifact\tdog\n", "en"), FormatError);
  EXPECT_THROW(build_table({parse_export(kEn, "en"), parse_export(kEn, "en")}, {"en"}, 5), ValidationError);
}

TEST(BuildTable, AnnotationsAndLexfileHeuristic) {
  const auto ex = parse_export("s01\t6\tnoun.artifact\tcar\t3\t1200\ns02\t6\tnoun.feeling\tjoy\t-\t50\n", "en", true);
  EXPECT_EQ(ex.rows[0].category, Category::physical);
  EXPECT_EQ(ex.rows[1].category, Category::abstract);
  EXPECT_EQ(ex.rows[0].sense_count, 3);
  EXPECT_FALSE(ex.rows[1].sense_count.has_value());
  EXPECT_EQ(ex.rows[1].frequency, 50);
  EXPECT_FALSE(category_from_lexfile("noun.Tops").has_value());
}

TEST(ConceptTableFormat, RoundTrip) {
  const auto t = build_table(fixture_exports(), {"en", "fr", "ja"}, 5);
  const auto text = serialize_table(t);
  EXPECT_EQ(serialize_table(parse_table(text)), text);
  EXPECT_THROW(parse_table("synset_id\tdepth\n"), FormatError);
}

TEST(SplitTable, ReferenceSplitCounts) {
  const auto t = synthetic_table(1919, 2478);
  const auto d = split_table(t, 1500, 42);
  EXPECT_EQ(d.ids({Role::train}).size(), 3000u);
  std::size_t test_abs = 0, test_phys = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (d.entries[i].role == Role::test) (t.records()[i].category == Category::abstract ? test_abs : test_phys)++;
  EXPECT_EQ(test_abs, 419u);
  EXPECT_EQ(test_phys, 978u);
  EXPECT_EQ(test_abs + test_phys, 1397u);
}

TEST(SplitTable, ZeroTrainIsAllTest) {
  const auto d = split_table(synthetic_table(5, 5), 0, 1);
  EXPECT_TRUE(d.ids({Role::train}).empty());
  EXPECT_EQ(d.ids({Role::test}).size(), 10u);
}

TEST(SplitTable, DeterministicAndSeedSensitive) {
  const auto t = synthetic_table(300, 400);
  EXPECT_EQ(split_table(t, 100, 7).entries, split_table(t, 100, 7).entries);
  EXPECT_NE(split_table(t, 100, 7).entries, split_table(t, 100, 8).entries);
}

TEST(SplitTable, PartitionProperty) {
  Rng gen(17);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t a = 1 + gen.below(60), p = 1 + gen.below(60);
    const std::size_t train = gen.below(std::min(a, p) + 1);
    const auto t = synthetic_table(a, p);
    const auto d = split_table(t, train, gen.next());
    std::set<std::string> tr, te;
    std::size_t tr_abs = 0, tr_phys = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_EQ(d.entries[i].synset_id, t.records()[i].synset_id);
      if (d.entries[i].role == Role::train) {
        tr.insert(d.entries[i].synset_id);
        (t.records()[i].category == Category::abstract ? tr_abs : tr_phys)++;
      } else {
        te.insert(d.entries[i].synset_id);
      }
    }
    EXPECT_EQ(tr.size() + te.size(), t.size());
    EXPECT_EQ(tr_abs, train);
    EXPECT_EQ(tr_phys, train);
  }
}

TEST(SplitTable, InsufficientCategory) {
  EXPECT_THROW(split_table(synthetic_table(3, 10), 4, 0), ValidationError);
}

TEST(Dictionary, FormatRoundTripAndErrors) {
  const auto d = split_table(synthetic_table(4, 4), 2, 3);
  EXPECT_EQ(parse_dictionary(serialize_dictionary(d)).entries, d.entries);
  EXPECT_THROW(parse_dictionary("a\tdev\n"), FormatError);
  EXPECT_THROW(parse_dictionary("a\ttrain\na\ttest\n"), ValidationError);
}

TEST(Downsample, PhysicalTestDownToAbstractCount) {
  std::vector<int> physical(978);
  std::iota(physical.begin(), physical.end(), 0);
  const auto kept = downsample_category(physical, 419, 5);
  EXPECT_EQ(kept.size(), 419u);
  EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end()));  // survivors keep order
  EXPECT_EQ(std::adjacent_find(kept.begin(), kept.end()), kept.end());
}

TEST(Downsample, IdentityAndDeterminism) {
  const std::vector<std::string> xs{"a", "b", "c"};
  EXPECT_EQ(downsample_category(xs, 3, 9), xs);
  const auto one = downsample_category(xs, 1, 9);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(downsample_category(xs, 1, 9), one);
  EXPECT_THROW(downsample_category(xs, 4, 9), ValidationError);
}

TEST(IdenticalForms, FixtureQuarter) {
  std::vector<ConceptRecord> recs(4);
  const char* en[] = {"taxi", "dog", "idea", "car"};
  const char* fr[] = {"taxi", "chien", "idée", "voiture"};
  for (int i = 0; i < 4; ++i) {
    recs[i].synset_id = "s" + std::to_string(i);
    recs[i].forms = {{"en", en[i]}, {"fr", fr[i]}};
  }
  const ConceptTable t({"en", "fr"}, recs);
  EXPECT_DOUBLE_EQ(identical_form_ratio(t, "fr", "en").value(), 0.25);
  EXPECT_DOUBLE_EQ(identical_form_ratio(t, "fr", "fr").value(), 1.0);
  EXPECT_THROW(identical_form_ratio(t, "de", "en"), ValidationError);
}

TEST(IdenticalForms, NfcAndCaseFolding) {
  std::vector<ConceptRecord> recs(3);
  recs[0] = {"s0", 6, Category::abstract, {{"en", "Paris"}, {"fr", "paris"}}, {}, {}};
  recs[1] = {"s1", 6, Category::abstract, {{"en", "caf\xc3\xa9"}, {"fr", "cafe\xcc\x81"}}, {}, {}};  // é vs e+◌́
  recs[2] = {"s2", 6, Category::abstract, {{"en", "STRASSE"}, {"fr", "stra\xc3\x9f" "e"}}, {}, {}};   // full folding
  const ConceptTable t({"en", "fr"}, recs);
  EXPECT_EQ(identical_form_ratio(t, "fr", "en").identical, 3u);
  EXPECT_EQ(identical_form_ratio(t, "en", "fr").identical, 3u);
}

TEST(CategoryStats, MeanAndLowerMedian) {
  std::vector<ConceptRecord> recs;
  const long long senses[] = {1, 2, 3};
  for (int i = 0; i < 3; ++i)
    recs.push_back({"a" + std::to_string(i), 6, Category::abstract, {{"en", "x"}}, senses[i], 10 * (i + 1)});
  // physical: even count for the lower-middle median, one record unannotated
  recs.push_back({"p0", 6, Category::physical, {{"en", "x"}}, 4, {}});
  recs.push_back({"p1", 6, Category::physical, {{"en", "x"}}, 1, 7});
  recs.push_back({"p2", 6, Category::physical, {{"en", "x"}}, {}, 3});
  recs.push_back({"p3", 6, Category::physical, {{"en", "x"}}, 2, 5});
  recs.push_back({"p4", 6, Category::physical, {{"en", "x"}}, 3, 9});
  const auto s = category_stats(ConceptTable({"en"}, recs));
  EXPECT_DOUBLE_EQ(*s[0].senses.mean, 2.0);
  EXPECT_EQ(*s[0].senses.median, 2);
  EXPECT_DOUBLE_EQ(*s[0].frequency.mean, 20.0);
  EXPECT_EQ(s[1].records, 5u);
  EXPECT_EQ(s[1].senses.count, 4u);
  EXPECT_EQ(s[1].senses.excluded, 1u);
  EXPECT_EQ(*s[1].senses.median, 2);  // {1,2,3,4} -> lower middle
  EXPECT_DOUBLE_EQ(*s[1].senses.mean, 2.5);
  EXPECT_EQ(s[1].frequency.excluded, 1u);
  EXPECT_EQ(*s[1].frequency.median, 5);  // {3,5,7,9}
}

TEST(CategoryStats, EmptyCategoryHasNoStatistics) {
  const auto s = category_stats(synthetic_table(3, 0));
  EXPECT_EQ(s[1].records, 0u);
  EXPECT_FALSE(s[1].senses.mean.has_value());
  EXPECT_FALSE(s[1].frequency.median.has_value());
  EXPECT_EQ(s[0].senses.excluded, 3u);
}
