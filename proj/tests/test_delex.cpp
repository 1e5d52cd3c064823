#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "nlgqe/delex.hpp"
#include "nlgqe/error.hpp"

using namespace nlgqe;

namespace {

const DelexRule* rule_for(const std::vector<DelexRule>& rules,
                          const std::string& attribute) {
  const DelexRule* r = find_rule(rules, attribute);
  REQUIRE(r != nullptr);
  return r;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    path = std::string("/tmp/nlgqe_delex_") + std::to_string(rand()) + ".tsv";
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("stock rules cover the domain attribute table") {
  const auto rules = default_rules();
  CHECK(rule_for(rules, "name")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "address")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "near")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "phone")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "postcode")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "price")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "count")->level == DelexLevel::kFull);

  const DelexRule* area = rule_for(rules, "area");
  CHECK(area->level == DelexLevel::kNamesOnly);
  CHECK(area->exceptions ==
        std::vector<std::string>{"city centre", "riverside"});

  for (const char* attr : {"customer_rating", "food", "kids_friendly",
                           "meal_type", "price_range", "type"}) {
    CHECK(rule_for(rules, attr)->level == DelexLevel::kNone);
  }
}

TEST_CASE("raw corpus spellings resolve through aliases") {
  const auto rules = default_rules();
  CHECK(rule_for(rules, "venue name")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "eatType")->level == DelexLevel::kNone);
  CHECK(rule_for(rules, "familyFriendly")->level == DelexLevel::kNone);
  CHECK(rule_for(rules, "priceRange")->level == DelexLevel::kNone);
  CHECK(rule_for(rules, "food/cuisine")->level == DelexLevel::kNone);
  CHECK(find_rule(rules, "weather") == nullptr);
}

TEST_CASE("placeholders derive from normalised attribute names") {
  CHECK(placeholder_for("name") == "X-name");
  CHECK(placeholder_for("Venue Name") == "X-venue_name");
}

TEST_CASE("full-level values are replaced in mr and text") {
  MeaningRepresentation mr{"inform",
                           {{"name", "hotel drisco"},
                            {"area", "pacific heights"}}};
  TextOutput text = make_text(
      "the hotel drisco in the pacific heights area is a nice hotel .");
  DelexResult r = delexicalize(mr, text, default_rules());

  CHECK(r.mr.slots[0].value == "X-name");
  CHECK(r.mr.slots[1].value == "X-area");
  CHECK(r.text.raw == "the X-name in the X-area area is a nice hotel .");
  REQUIRE(r.substitutions.size() == 2);
  CHECK(r.substitutions[0].original == "hotel drisco");
  CHECK(r.substitutions[0].span.has_value());
}

TEST_CASE("area exceptions survive delexicalisation") {
  MeaningRepresentation mr{"inform", {{"area", "city centre"}}};
  TextOutput text = make_text("it is in the city centre .");
  DelexResult r = delexicalize(mr, text, default_rules());
  CHECK(r.mr.slots[0].value == "city centre");
  CHECK(r.text.raw == "it is in the city centre .");
  CHECK(r.substitutions.empty());

  MeaningRepresentation named{"inform", {{"area", "riverside"}}};
  DelexResult r2 = delexicalize(named, make_text("on the riverside ."),
                                default_rules());
  CHECK(r2.text.raw == "on the riverside .");
}

TEST_CASE("matching is case-insensitive and covers every occurrence") {
  MeaningRepresentation mr{"inform", {{"name", "The Mill"}}};
  TextOutput text = make_text("The Mill is great. Visit the mill today.");
  DelexResult r = delexicalize(mr, text, default_rules());
  CHECK(r.text.raw == "X-name is great. Visit X-name today.");
  CHECK(r.substitutions.size() == 2);
  CHECK(r.substitutions[0].original == "The Mill");
  CHECK(r.substitutions[1].original == "the mill");
}

TEST_CASE("value matches stop at word boundaries") {
  MeaningRepresentation mr{"inform", {{"name", "Aroma"}}};
  TextOutput text = make_text("Aromatic dishes at Aroma .");
  DelexResult r = delexicalize(mr, text, default_rules());
  CHECK(r.text.raw == "Aromatic dishes at X-name .");
}

TEST_CASE("overlapping slot values claim disjoint spans, longest first") {
  MeaningRepresentation mr{"inform",
                           {{"name", "The Cricketers"},
                            {"near", "Café Sicilia"}}};
  TextOutput text =
      make_text("The Cricketers is located near Café Sicilia by the river .");
  DelexResult r = delexicalize(mr, text, default_rules());
  CHECK(r.text.raw == "X-name is located near X-near by the river .");

  // A value nested inside another value's claim is not replaced twice.
  MeaningRepresentation nested{"inform",
                               {{"name", "Blue Spice"}, {"near", "Blue"}}};
  DelexResult r2 = delexicalize(nested, make_text("try Blue Spice ."),
                                default_rules());
  CHECK(r2.text.raw == "try X-name .");
}

TEST_CASE("values absent from the text are recorded without a span") {
  MeaningRepresentation mr{"inform", {{"name", "The Vaults"}}};
  DelexResult r = delexicalize(mr, make_text("a cheap family place ."),
                               default_rules());
  CHECK(r.mr.slots[0].value == "X-name");
  REQUIRE(r.substitutions.size() == 1);
  CHECK_FALSE(r.substitutions[0].span.has_value());
}

TEST_CASE("delexicalisation is idempotent") {
  MeaningRepresentation mr{"inform",
                           {{"name", "The Mill"}, {"food", "Chinese"}}};
  TextOutput text = make_text("The Mill serves Chinese food .");
  DelexResult once = delexicalize(mr, text, default_rules());
  DelexResult twice = delexicalize(once.mr, once.text, default_rules());
  CHECK(twice.mr == once.mr);
  CHECK(twice.text.raw == once.text.raw);
  CHECK(twice.substitutions.empty());
}

TEST_CASE("relexicalisation reconstructs the original text") {
  MeaningRepresentation mr{"inform",
                           {{"name", "The Cricketers"},
                            {"near", "Café Sicilia"},
                            {"area", "riverside"}}};
  TextOutput text =
      make_text("The Cricketers near Café Sicilia is on the riverside .");
  DelexResult r = delexicalize(mr, text, default_rules());
  CHECK(relexicalize(r.text.raw, r.substitutions) == text.raw);
}

TEST_CASE("relexicalisation rejects texts missing a placeholder") {
  MeaningRepresentation mr{"inform", {{"name", "The Mill"}}};
  DelexResult r = delexicalize(mr, make_text("The Mill is fine ."),
                               default_rules());
  CHECK_THROWS_AS(relexicalize("something unrelated", r.substitutions),
                  DataError);
}

TEST_CASE("rule files load levels and exception lists") {
  TempFile file(
      "name\tfull\t-\n"
      "area\tnames_only\tcity centre,riverside\n"
      "food\tnone\t-\n"
      "colour\tfull\t-\n");
  auto rules = load_rules(file.path);
  CHECK(rule_for(rules, "name")->level == DelexLevel::kFull);
  CHECK(rule_for(rules, "area")->exceptions ==
        std::vector<std::string>{"city centre", "riverside"});
  CHECK(rule_for(rules, "colour")->level == DelexLevel::kFull);
}

TEST_CASE("rule files reject bad levels and bare names_only") {
  TempFile bad_level("name\tpartial\t-\n");
  CHECK_THROWS_AS(load_rules(bad_level.path), DataError);
  TempFile bare("area\tnames_only\n");
  CHECK_THROWS_AS(load_rules(bare.path), DataError);
  CHECK_THROWS_AS(load_rules("/nonexistent/rules.tsv"), DataError);
}

TEST_CASE("valueless slots never fire a substitution") {
  MeaningRepresentation mr{"inform", {{"name", ""}}};
  DelexResult r = delexicalize(mr, make_text("hello there ."), default_rules());
  CHECK(r.substitutions.empty());
  CHECK(r.mr.slots[0].value.empty());
}
