#include <doctest.h>

#include <atomic>

#include "kgre/error.hpp"
#include "kgre/json_io.hpp"
#include "kgre/kb.hpp"
#include "support/files.hpp"
#include "support/mock_server.hpp"

using namespace kgre;

namespace {

using Links = std::vector<LinkedMention>;

LinkedMention linked(std::string surface, std::string kb, std::size_t start = 0) {
  return {surface, start, start + surface.size(), std::move(kb), -1.0};
}

KBSnapshot small_snapshot() {
  KBSnapshot s;
  s["Q1"] = {"Q1", "Bill Oddie", {"human"}, {}};
  s["Q2"] = {"Q2", "Kate Hardie", {"human"}, {}};
  s["Q3"] = {"Q3", "Wall Street", {"street"}, {"road"}};
  s["Q4"] = {"Q4", "Peter Parker", {"fictional human", "human"}, {}};
  s["Q5"] = {"Q5", "Avengers", {"fictional organization"}, {}};
  s["Q6"] = {"Q6", "Someone", {"politician", "human"}, {}};
  s["Q7"] = {"Q7", "Nothing", {}, {}};
  return s;
}

}  // namespace

TEST_CASE("type frequency counts mention occurrences") {
  auto kb = small_snapshot();
  ELFile el{{"a", Links{linked("Bill Oddie", "Q1"), linked("Kate Hardie", "Q2", 20)}},
            {"b", Links{linked("Wall Street", "Q3")}}};
  auto f = build_type_frequency(el, kb, TypeProperty::InstanceOf);
  CHECK(f == TypeFrequency{{"human", 2}, {"street", 1}});
  CHECK(build_type_frequency({}, kb, TypeProperty::InstanceOf).empty());

  ELFile multi{{"a", Links{linked("Peter Parker", "Q4")}}};
  auto g = build_type_frequency(multi, kb, TypeProperty::InstanceOf);
  CHECK(g == TypeFrequency{{"fictional human", 1}, {"human", 1}});

  auto sub = build_type_frequency(el, kb, TypeProperty::SubclassOf);
  CHECK(sub == TypeFrequency{{"road", 1}});

  ELFile ghost{{"a", Links{linked("X", "Q404")}}};
  CHECK(build_type_frequency(ghost, kb, TypeProperty::InstanceOf).empty());
}

TEST_CASE("pick_type ordering") {
  TypeFrequency f{{"human", 10}, {"politician", 10}, {"city", 3}};
  CHECK(pick_type({"politician", "human"}, f) == "human");
  CHECK(pick_type({"city", "politician"}, f) == "politician");
  CHECK(pick_type({"zeta", "alpha"}, f) == "alpha");
  CHECK(pick_type({"zeta", "city"}, f) == "city");
  CHECK(pick_type({}, f) == "");
}

TEST_CASE("resolve_types") {
  auto kb = small_snapshot();
  ELFile el{{"s", Links{linked("Peter Parker", "Q4"), linked("Avengers", "Q5", 30),
                   linked("Nobody", "Q7", 50), linked("Ghost", "Q404", 60)}}};
  TypeFrequency freq{{"fictional human", 5}, {"human", 2}};
  GroundingDiagnostics diag;
  auto kg = resolve_types(el, kb, TypeProperty::InstanceOf, freq, &diag);
  const auto& facts = kg.at("s");
  REQUIRE(facts.size() == 2);
  CHECK(facts[0].type_label == "fictional human");
  CHECK(facts[0].label == "Peter Parker");
  CHECK(facts[1].type_label == "fictional organization");
  CHECK(diag.grounded == 2);
  CHECK(diag.missing_kb_id == 1);
  CHECK(diag.no_candidate_types == 1);
  CHECK(diag.missing_ids == std::vector<std::string>{"Q404"});

  ELFile tie{{"t", Links{linked("Someone", "Q6")}}};
  CHECK(resolve_types(tie, kb, TypeProperty::InstanceOf,
                      {{"human", 10}, {"politician", 10}})
            .at("t")[0]
            .type_label == "human");

  auto again = resolve_types(el, kb, TypeProperty::InstanceOf, freq);
  CHECK(again.at("s")[0].type_label == facts[0].type_label);
}

TEST_CASE("snapshot files") {
  testing::TempDir dir;
  auto p = dir.write("kb.jsonl",
                     R"({"kb_id":"Q2","label":"B","instance_of":["x"],"subclass_of":[]})" "\n"
                     R"({"kb_id":"Q1","label":"A","instance_of":[],"subclass_of":["y"]})" "\n");
  auto s = load_snapshot(p);
  CHECK(s.size() == 2);
  CHECK(s.at("Q1").subclass_of == std::vector<std::string>{"y"});
  save_snapshot(dir / "a.jsonl", s);
  save_snapshot(dir / "b.jsonl", load_snapshot(dir / "a.jsonl"));
  CHECK(testing::slurp(dir / "a.jsonl") == testing::slurp(dir / "b.jsonl"));
  CHECK(testing::slurp(dir / "a.jsonl").find("Q1") < testing::slurp(dir / "a.jsonl").find("Q2"));

  auto dup = dir.write("dup.jsonl",
                       R"({"kb_id":"Q1","label":"A","instance_of":[],"subclass_of":[]})" "\n"
                       R"({"kb_id":"Q1","label":"A","instance_of":[],"subclass_of":[]})" "\n");
  CHECK_THROWS_AS(load_snapshot(dup), Error);
}

TEST_CASE("remote kb client") {
  testing::MockServer mock;
  std::atomic<int> calls{0};
  std::atomic<int> failures_left{0};
  mock.server().Get(R"(/kb/entity/(\w+))", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    if (failures_left > 0) {
      --failures_left;
      res.status = 503;
      return;
    }
    auto id = req.matches[1].str();
    if (id == "Q404") {
      res.status = 404;
      return;
    }
    json j{{"kb_id", id}, {"label", "label " + id}, {"instance_of", {"human"}},
           {"subclass_of", json::array()}};
    res.set_content(j.dump(), "application/json");
  });
  mock.start();

  testing::TempDir dir;
  auto cache = dir.write("cache.jsonl",
                         R"({"kb_id":"Q1","label":"cached","instance_of":["city"],"subclass_of":[]})" "\n");
  KbClientOptions opts;
  opts.endpoint = mock.url() + "/kb";
  opts.cache_path = cache;
  opts.initial_backoff = std::chrono::milliseconds(1);

  SUBCASE("cache hit makes no request") {
    KbClient client(opts);
    auto r = client.fetch({"Q1"});
    CHECK(calls == 0);
    CHECK(r.remote_lookups == 0);
    CHECK(r.fragment.at("Q1").label == "cached");
  }
  SUBCASE("one cached and one new id give exactly one lookup") {
    KbClient client(opts);
    auto r = client.fetch({"Q1", "Q2"});
    CHECK(calls == 1);
    CHECK(r.remote_lookups == 1);
    CHECK(r.fragment.size() == 2);
    CHECK(load_snapshot(cache).contains("Q2"));

    KbClient reopened(opts);
    auto again = reopened.fetch({"Q1", "Q2"});
    CHECK(calls == 1);
    CHECK(again.fragment.size() == 2);
  }
  SUBCASE("unknown ids are reported, not returned") {
    KbClient client(opts);
    auto r = client.fetch({"Q404", "Q3"});
    CHECK(r.unknown_ids == std::vector<std::string>{"Q404"});
    CHECK_FALSE(r.fragment.contains("Q404"));
    CHECK(r.fragment.contains("Q3"));
  }
  SUBCASE("transient server errors are retried") {
    failures_left = 2;
    KbClient client(opts);
    auto r = client.fetch({"Q9"});
    CHECK(calls == 3);
    CHECK(r.fragment.contains("Q9"));
  }
  SUBCASE("persistent failure raises after bounded retries, partial results kept") {
    KbClient client(opts);
    client.fetch({"Q2"});
    failures_left = 100;
    CHECK_THROWS_AS(client.fetch({"Q5"}), TransportError);
    CHECK(calls == 1 + opts.max_attempts);
    CHECK(load_snapshot(cache).contains("Q2"));
  }
  SUBCASE("fetching twice yields an identical cache file") {
    {
      KbClient client(opts);
      client.fetch({"Q2", "Q3"});
    }
    auto first = testing::slurp(cache);
    KbClient client(opts);
    client.fetch({"Q2", "Q3"});
    CHECK(testing::slurp(cache) == first);
  }
}

TEST_CASE("unreachable kb endpoint") {
  KbClientOptions opts;
  opts.endpoint = "http://127.0.0.1:1";
  opts.max_attempts = 2;
  opts.initial_backoff = std::chrono::milliseconds(1);
  opts.timeout = std::chrono::seconds(1);
  KbClient client(opts);
  CHECK_THROWS_AS(client.fetch({"Q1"}), TransportError);
  CHECK_THROWS_AS(KbClient({"no-scheme", {}, 1, {}, {}}).fetch({"Q1"}), ConfigError);
}
