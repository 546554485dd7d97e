#include <doctest.h>

#include "kgre/corpus.hpp"
#include "kgre/error.hpp"
#include "kgre/json_io.hpp"
#include "support/files.hpp"

using namespace kgre;

namespace {

Example bill_oddie(std::string relation) {
  Example e;
  e.id = "webnlg_test_633";
  e.text = "Bill Oddie 's daughter is Kate Hardie .";
  e.task = TaskKind::JREE;
  e.gold_triples = {{"Bill Oddie", std::move(relation), "Kate Hardie"}};
  return e;
}

std::size_t count_kind(const ValidationReport& r, ViolationKind k) {
  std::size_t n = 0;
  for (const auto& v : r.violations) n += v.kind == k;
  return n;
}

}  // namespace

TEST_CASE("task and property names") {
  CHECK(parse_task("JREE") == TaskKind::JREE);
  CHECK(parse_task("ETRC") == TaskKind::ETRC);
  CHECK_FALSE(parse_task("etrc").has_value());
  CHECK_FALSE(parse_task("NER").has_value());
  CHECK(to_string(TaskKind::RC) == "RC");
  CHECK(has_positions(TaskKind::ETRC));
  CHECK_FALSE(has_positions(TaskKind::JREE));
  CHECK(parse_type_property("subclass_of") == TypeProperty::SubclassOf);
}

TEST_CASE("validate_corpus") {
  RelationSchema schema{{"child", "precededBy"}, std::nullopt};

  SUBCASE("empty corpus") {
    auto r = validate_corpus({}, schema);
    CHECK(r.ok());
    CHECK(r.example_count == 0);
    CHECK(r.triple_count == 0);
    CHECK(r.mean_triple_size() == 0.0);
  }
  SUBCASE("out-of-schema relation") {
    auto r = validate_corpus({bill_oddie("daughter")}, schema);
    CHECK(r.violations.size() == 1);
    CHECK(count_kind(r, ViolationKind::UnknownRelation) == 1);
  }
  SUBCASE("valid example") {
    auto r = validate_corpus({bill_oddie("child")}, schema);
    CHECK(r.ok());
    CHECK(r.triple_size_histogram.at(1) == 1);
  }
  SUBCASE("null relation is accepted") {
    RelationSchema with_null{{"child"}, "no_relation"};
    CHECK(validate_corpus({bill_oddie("no_relation")}, with_null).ok());
  }
  SUBCASE("every problem is reported") {
    auto a = bill_oddie("child");
    auto b = bill_oddie("child");
    b.gold_entities.push_back({"Bill", 0, 5, std::nullopt});
    b.gold_triples.push_back({"Bill Oddie", "child", "Ann"});
    auto c = bill_oddie("child");
    c.id = "rc";
    c.task = TaskKind::ETRC;
    auto r = validate_corpus({a, b, c}, schema);
    CHECK(count_kind(r, ViolationKind::DuplicateId) == 1);
    CHECK(count_kind(r, ViolationKind::BadSpan) == 1);
    CHECK(count_kind(r, ViolationKind::TripleNotInText) == 1);
    CHECK(count_kind(r, ViolationKind::MissingPositions) == 1);
    CHECK(r.example_count == 3);
    CHECK(r.triple_count == 4);
  }
}

TEST_CASE("canonical corpus round trip is byte identical") {
  testing::TempDir dir;
  std::string in =
      R"({"id":"a","text":"Alico is AIG .","entities":[{"surface":"Alico","start":0,"end":5,"type":"ORGANIZATION"},{"surface":"AIG","start":9,"end":12}],"triples":[{"subject":"Alico","relation":"org:parents","object":"AIG"}],"task":"ETRC"})"
      "\n"
      R"({"id":"b","text":"Irène Joliot-Curie was born in Paris .","entities":[],"triples":[],"task":"JREE"})"
      "\n";
  auto p = dir.write("in.jsonl", in);
  auto corpus = load_canonical_corpus(p);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].gold_entities[1].entity_type == std::nullopt);
  save_corpus(dir / "out.jsonl", corpus);
  CHECK(testing::slurp(dir / "out.jsonl") == in);
}

TEST_CASE("canonical corpus errors name line and field") {
  testing::TempDir dir;
  auto p = dir.write("bad.jsonl",
                     "{\"id\":\"a\",\"text\":\"x y\",\"entities\":[],\"triples\":[],\"task\":\"JREE\"}\n"
                     "\n"
                     "{\"id\":\"b\",\"text\":\"x y\",\"entities\":[{\"surface\":\"x\",\"start\":2,\"end\":1}],"
                     "\"triples\":[],\"task\":\"JREE\"}\n");
  try {
    load_canonical_corpus(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find(":3") != std::string::npos);
    CHECK(msg.find("end") != std::string::npos);
  }

  auto q = dir.write("sep.jsonl",
                     "{\"id\":\"a\",\"text\":\"x;y r z\",\"entities\":[],"
                     "\"triples\":[{\"subject\":\"x;y\",\"relation\":\"r\",\"object\":\"z\"}],\"task\":\"JREE\"}\n");
  CHECK_THROWS_AS(load_canonical_corpus(q), ParseError);
  auto r = dir.write("notjson.jsonl", "{oops\n");
  CHECK_THROWS_AS(load_canonical_corpus(r), ParseError);
  auto s = dir.write("missing.jsonl", "{\"id\":\"a\"}\n");
  CHECK_THROWS_WITH_AS(load_canonical_corpus(s), doctest::Contains("[text]"), ParseError);
}

TEST_CASE("schema loading") {
  testing::TempDir dir;
  auto p = dir.write("schema.json", R"({"relations":["a","b"],"null_relation":"no_relation"})");
  auto s = load_schema(p);
  CHECK(s.relations.size() == 2);
  CHECK(s.contains("b"));
  CHECK_FALSE(s.contains("no_relation"));
  CHECK(s.null_relation == "no_relation");
  save_schema(dir / "copy.json", s);
  auto t = load_schema(dir / "copy.json");
  CHECK(t.relations == s.relations);
  CHECK(t.null_relation == s.null_relation);

  auto dup = dir.write("dup.json", R"({"relations":["a","a"]})");
  CHECK_THROWS_AS(load_schema(dup), Error);
}

TEST_CASE("atomic file leaves nothing behind unless committed") {
  testing::TempDir dir;
  {
    AtomicFile f(dir / "x.jsonl");
    f.stream() << "partial";
  }
  CHECK_FALSE(std::filesystem::exists(dir / "x.jsonl"));
  CHECK_FALSE(std::filesystem::exists(dir / "x.jsonl.tmp"));
  {
    AtomicFile f(dir / "x.jsonl");
    f.stream() << "done";
    f.commit();
  }
  CHECK(testing::slurp(dir / "x.jsonl") == "done");
}

TEST_CASE("shipped fixtures validate cleanly") {
  auto corpus = load_canonical_corpus(testing::fixture("error_cases/corpus.jsonl"));
  auto schema = load_schema(testing::fixture("error_cases/schema.json"));
  auto r = validate_corpus(corpus, schema);
  for (const auto& v : r.violations) MESSAGE(v.example_id << ": " << v.detail);
  CHECK(r.ok());
}
