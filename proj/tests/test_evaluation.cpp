#include <doctest.h>

#include <algorithm>
#include <random>

#include "kgre/error.hpp"
#include "kgre/evaluation.hpp"
#include "support/oracles.hpp"

using namespace kgre;

namespace {

RelationTriple T(std::string s, std::string r, std::string o) { return {s, r, o}; }

std::vector<oracle::Triple> to_oracle(const std::vector<RelationTriple>& ts) {
  std::vector<oracle::Triple> out;
  for (const auto& t : ts) out.push_back({t.subject, t.relation, t.object});
  return out;
}

}  // namespace

TEST_CASE("micro_prf hand counts") {
  SUBCASE("perfect") {
    TripleSets g{{"a", {T("x", "r", "y")}}, {"b", {T("p", "r", "q"), T("p", "s", "q")}}};
    auto r = micro_prf(g, g);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);
  }
  SUBCASE("half right") {
    TripleSets g{{"a", {T("x", "r", "y"), T("x", "s", "y")}}};
    TripleSets p{{"a", {T("x", "r", "y"), T("x", "t", "y")}}};
    auto r = micro_prf(p, g);
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 0.5);
    CHECK(r.f1 == 0.5);
    CHECK(r.counts == Counts{1, 1, 1});
  }
  SUBCASE("nothing predicted") {
    TripleSets g{{"a", {T("x", "r", "y")}}};
    TripleSets p{{"a", {}}};
    auto r = micro_prf(p, g);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
  }
  SUBCASE("a gold triple is matched once") {
    TripleSets g{{"a", {T("x", "r", "y")}}};
    TripleSets p{{"a", {T("x", "r", "y"), T("x", "r", "y")}}};
    CHECK(micro_prf(p, g).counts == Counts{1, 1, 0});
  }
  SUBCASE("duplicate gold counts once") {
    TripleSets g{{"a", {T("x", "r", "y"), T("x", "r", "y")}}};
    TripleSets p{{"a", {T("x", "r", "y")}}};
    CHECK(micro_prf(p, g).counts == Counts{1, 0, 0});
  }
  SUBCASE("case sensitivity is configurable") {
    TripleSets g{{"a", {T("Alico", "r", "AIG")}}};
    TripleSets p{{"a", {T("alico", "r", "AIG")}}};
    CHECK(micro_prf(p, g).counts.correct == 0);
    CHECK(micro_prf(p, g, {true}).counts.correct == 1);
  }
}

TEST_CASE("mismatched ids are an error naming them") {
  TripleSets g{{"a", {}}, {"b", {}}};
  TripleSets p{{"a", {}}, {"c", {}}};
  try {
    micro_prf(p, g);
    FAIL("expected an error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("b") != std::string::npos);
    CHECK(msg.find("c") != std::string::npos);
  }
}

TEST_CASE("evaluator matches the brute-force oracle") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> n_ex(0, 20), n_tr(0, 5), sym(0, 2);
  auto triple = [&] {
    const char* e[] = {"A", "B", "C"};
    const char* r[] = {"r", "s", "t"};
    return T(e[sym(rng)], r[sym(rng)], e[sym(rng)]);
  };
  for (int trial = 0; trial < 200; ++trial) {
    TripleSets gold, pred;
    std::size_t correct = 0, predicted = 0, golds = 0;
    for (int i = n_ex(rng); i > 0; --i) {
      auto id = "e" + std::to_string(i);
      for (int k = n_tr(rng); k > 0; --k) gold[id].push_back(triple());
      for (int k = n_tr(rng); k > 0; --k) pred[id].push_back(triple());
      gold.try_emplace(id);
      pred.try_emplace(id);
      auto o = oracle::match(to_oracle(pred[id]), to_oracle(gold[id]));
      correct += o.correct;
      predicted += o.predicted;
      golds += o.gold;
    }
    auto r = micro_prf(pred, gold);
    CHECK(r.counts.correct == correct);
    CHECK(r.counts.predicted() == predicted);
    CHECK(r.counts.gold() == golds);

    Counts sum;
    for (const auto& [size, b] : r.per_triple_size) sum += b.counts;
    CHECK(sum == r.counts);

    for (auto& [id, ts] : pred) std::shuffle(ts.begin(), ts.end(), rng);
    CHECK(micro_prf(pred, gold).counts == r.counts);
  }
}

TEST_CASE("triple size buckets") {
  TripleSets g{{"a", {T("x", "r", "y")}},
               {"b", {T("x", "r", "y"), T("y", "r", "z")}},
               {"c", {T("p", "r", "q")}}};
  TripleSets p{{"a", {T("x", "r", "y")}}, {"b", {T("x", "r", "y")}}, {"c", {}}};
  auto b = triple_size_breakdown(p, g);
  REQUIRE(b.size() == 2);
  CHECK(b.at(1).examples == 2);
  CHECK(b.at(1).counts == Counts{1, 0, 1});
  CHECK(b.at(2).counts == Counts{1, 0, 1});

  TripleSets only1{{"a", g.at("a")}, {"c", g.at("c")}};
  TripleSets pred1{{"a", p.at("a")}, {"c", p.at("c")}};
  CHECK(micro_prf(pred1, only1).counts == b.at(1).counts);

  auto all = micro_prf(g, g);
  for (const auto& [size, bucket] : all.per_triple_size) CHECK(bucket.counts.f1() == 1.0);
}

TEST_CASE("found info ratio") {
  Example rc{"rc", "A met B .", {{"A", 0, 1, {}}, {"B", 6, 7, {}}}, {T("A", "r", "B")},
             TaskKind::RC};
  Example jree{"j", "C met D and E .", {}, {T("C", "r", "D"), T("C", "r", "E")}, TaskKind::JREE};
  auto fact = [](std::string s) { return GroundedFact{{s, 0, 1, "Q", -1.0}, s, "t"}; };
  GroundedKnowledge kg{{"rc", {fact("A"), fact("B")}}, {"j", {fact("C"), fact("D")}}};
  CHECK(found_info_ratio(kg, {rc}) == 1.0);
  CHECK(*found_info_ratio(kg, {rc, jree}) == doctest::Approx(4.0 / 5.0));
  kg["j"].push_back(fact("E"));
  kg["j"].push_back(fact("X"));
  kg["j"].push_back(fact("Y"));
  CHECK(*found_info_ratio(kg, {jree}) > 1.0);
  Example empty{"z", "nothing", {}, {}, TaskKind::JREE};
  CHECK_FALSE(found_info_ratio(kg, {empty}).has_value());
}

TEST_CASE("report serialization and aggregation") {
  TripleSets g{{"a", {T("x", "r", "y"), T("x", "s", "y")}}};
  TripleSets p{{"a", {T("x", "r", "y")}}};
  auto r = micro_prf(p, g);
  r.found_info_ratio = 1.25;
  auto back = EvalReport::from_json(json::parse(r.to_json().dump()));
  CHECK(back.counts == r.counts);
  CHECK(back.f1 == r.f1);
  CHECK(back.found_info_ratio == 1.25);
  CHECK(back.per_triple_size.at(2).counts == r.per_triple_size.at(2).counts);
  CHECK(r.to_table().find("all") != std::string::npos);
  CHECK(r.breakdown_csv().rfind("triple_size,", 0) == 0);
  CHECK_THROWS_AS(EvalReport::from_json(json::object()), Error);

  EvalReport a, b, c;
  a.precision = 0.5, a.recall = 0.5, a.f1 = 0.5;
  b.precision = 0.7, b.recall = 0.5, b.f1 = 0.6;
  c.precision = 0.9, c.recall = 0.5, c.f1 = 0.7;
  auto agg = combine_reports({a, b, c});
  CHECK(agg.runs == 3);
  CHECK(agg.precision_mean == doctest::Approx(0.7));
  CHECK(agg.precision_std == doctest::Approx(0.2));
  CHECK(agg.recall_std == doctest::Approx(0.0));
  CHECK(agg.f1_std == doctest::Approx(0.1));
  CHECK(combine_reports({a}).f1_std == 0.0);
}
