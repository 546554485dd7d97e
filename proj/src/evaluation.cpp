#include "kgre/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "kgre/error.hpp"
#include "kgre/text.hpp"

namespace kgre {

double Counts::precision() const {
  return predicted() == 0 ? 0.0
                          : static_cast<double>(correct) / static_cast<double>(predicted());
}

double Counts::recall() const {
  return gold() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold());
}

double Counts::f1() const {
  double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

std::vector<RelationTriple> dedupe(const std::vector<RelationTriple>& triples) {
  std::vector<RelationTriple> out;
  std::set<RelationTriple> seen;
  for (const auto& t : triples)
    if (seen.insert(t).second) out.push_back(t);
  return out;
}

namespace {

RelationTriple folded(const RelationTriple& t) {
  return {text::casefold_ws(t.subject), text::casefold_ws(t.relation),
          text::casefold_ws(t.object)};
}

void check_ids(const TripleSets& predictions, const TripleSets& gold) {
  std::vector<std::string> missing_pred, unknown_pred;
  for (const auto& [id, _] : gold)
    if (!predictions.count(id)) missing_pred.push_back(id);
  for (const auto& [id, _] : predictions)
    if (!gold.count(id)) unknown_pred.push_back(id);
  if (missing_pred.empty() && unknown_pred.empty()) return;

  auto list = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 10; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 10) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s;
  };
  std::string msg = "prediction and gold id sets differ";
  if (!missing_pred.empty()) msg += "; no predictions for: " + list(missing_pred);
  if (!unknown_pred.empty()) msg += "; predictions without gold: " + list(unknown_pred);
  throw Error(msg);
}

}  // namespace

Counts match_example(const std::vector<RelationTriple>& predicted,
                     const std::vector<RelationTriple>& gold,
                     const EvalOptions& opts) {
  std::multiset<RelationTriple> pool;
  for (const auto& g : gold) pool.insert(opts.casefold ? folded(g) : g);
  Counts c;
  for (const auto& p : predicted) {
    auto it = pool.find(opts.casefold ? folded(p) : p);
    if (it != pool.end()) {
      ++c.correct;
      pool.erase(it);
    } else {
      ++c.spurious;
    }
  }
  c.missed = pool.size();
  return c;
}

std::map<std::size_t, BucketScore> triple_size_breakdown(
    const TripleSets& predictions, const TripleSets& gold, const EvalOptions& opts) {
  check_ids(predictions, gold);
  std::map<std::size_t, BucketScore> buckets;
  for (const auto& [id, g] : gold) {
    auto gd = dedupe(g);
    auto& b = buckets[gd.size()];
    b.counts += match_example(predictions.at(id), gd, opts);
    ++b.examples;
  }
  return buckets;
}

EvalReport micro_prf(const TripleSets& predictions, const TripleSets& gold,
                     const EvalOptions& opts) {
  EvalReport r;
  r.per_triple_size = triple_size_breakdown(predictions, gold, opts);
  for (const auto& [size, b] : r.per_triple_size) {
    r.counts += b.counts;
    r.examples += b.examples;
  }
  r.precision = r.counts.precision();
  r.recall = r.counts.recall();
  r.f1 = r.counts.f1();
  return r;
}

std::optional<double> found_info_ratio(const GroundedKnowledge& kg,
                                       const Corpus& corpus) {
  std::size_t facts = 0, entities = 0;
  for (const auto& e : corpus) {
    if (!e.gold_entities.empty()) {
      entities += e.gold_entities.size();
    } else {
      std::set<std::string> args;
      for (const auto& t : e.gold_triples) {
        args.insert(t.subject);
        args.insert(t.object);
      }
      entities += args.size();
    }
    if (auto it = kg.find(e.id); it != kg.end()) facts += it->second.size();
  }
  if (entities == 0) return std::nullopt;
  return static_cast<double>(facts) / static_cast<double>(entities);
}

TripleSets gold_triples(const Corpus& corpus) {
  TripleSets out;
  for (const auto& e : corpus) out[e.id] = dedupe(e.gold_triples);
  return out;
}

namespace {

ordered_json counts_json(const Counts& c) {
  ordered_json j;
  j["correct"] = c.correct;
  j["spurious"] = c.spurious;
  j["missed"] = c.missed;
  return j;
}

Counts counts_from_json(const json& j) {
  return {j.at("correct").get<std::size_t>(), j.at("spurious").get<std::size_t>(),
          j.at("missed").get<std::size_t>()};
}

}  // namespace

ordered_json EvalReport::to_json() const {
  ordered_json j;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["examples"] = examples;
  j["counts"] = counts_json(counts);
  j["per_triple_size"] = ordered_json::array();
  for (const auto& [size, b] : per_triple_size) {
    ordered_json row;
    row["triple_size"] = size;
    row["examples"] = b.examples;
    row["precision"] = b.counts.precision();
    row["recall"] = b.counts.recall();
    row["f1"] = b.counts.f1();
    row["counts"] = counts_json(b.counts);
    j["per_triple_size"].push_back(std::move(row));
  }
  j["found_info_ratio"] = found_info_ratio ? ordered_json(*found_info_ratio)
                                           : ordered_json(nullptr);
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  try {
    r.counts = counts_from_json(j.at("counts"));
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.examples = j.value("examples", std::size_t{0});
    if (auto it = j.find("per_triple_size"); it != j.end()) {
      for (const auto& row : *it) {
        BucketScore b;
        b.counts = counts_from_json(row.at("counts"));
        b.examples = row.at("examples").get<std::size_t>();
        r.per_triple_size[row.at("triple_size").get<std::size_t>()] = b;
      }
    }
    if (auto it = j.find("found_info_ratio"); it != j.end() && !it->is_null())
      r.found_info_ratio = it->get<double>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  auto row = [&](const std::string& label, std::size_t n, const Counts& c) {
    os << std::left << std::setw(10) << label << std::right << std::setw(9) << n
       << std::setw(9) << c.correct << std::setw(9) << c.spurious << std::setw(9)
       << c.missed << std::setw(11) << c.precision() << std::setw(11) << c.recall()
       << std::setw(11) << c.f1() << '\n';
  };
  os << std::left << std::setw(10) << "bucket" << std::right << std::setw(9)
     << "examples" << std::setw(9) << "correct" << std::setw(9) << "spurious"
     << std::setw(9) << "missed" << std::setw(11) << "precision" << std::setw(11)
     << "recall" << std::setw(11) << "f1" << '\n';
  for (const auto& [size, b] : per_triple_size) row("T=" + std::to_string(size), b.examples, b.counts);
  row("all", examples, counts);
  if (found_info_ratio) os << "found_info_ratio " << *found_info_ratio << '\n';
  return os.str();
}

std::string EvalReport::breakdown_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "triple_size,examples,correct,spurious,missed,precision,recall,f1\n";
  for (const auto& [size, b] : per_triple_size) {
    os << size << ',' << b.examples << ',' << b.counts.correct << ','
       << b.counts.spurious << ',' << b.counts.missed << ',' << b.counts.precision()
       << ',' << b.counts.recall() << ',' << b.counts.f1() << '\n';
  }
  return os.str();
}

ordered_json AggregateReport::to_json() const {
  ordered_json j;
  j["runs"] = runs;
  j["precision"] = {{"mean", precision_mean}, {"std", precision_std}};
  j["recall"] = {{"mean", recall_mean}, {"std", recall_std}};
  j["f1"] = {{"mean", f1_mean}, {"std", f1_std}};
  return j;
}

AggregateReport combine_reports(const std::vector<EvalReport>& reports) {
  AggregateReport agg;
  agg.runs = reports.size();
  if (reports.empty()) return agg;
  auto stat = [&](auto get, double& mean, double& sd) {
    double sum = 0;
    for (const auto& r : reports) sum += get(r);
    mean = sum / static_cast<double>(reports.size());
    if (reports.size() < 2) {
      sd = 0;
      return;
    }
    double ss = 0;
    for (const auto& r : reports) ss += (get(r) - mean) * (get(r) - mean);
    sd = std::sqrt(ss / static_cast<double>(reports.size() - 1));
  };
  stat([](const EvalReport& r) { return r.precision; }, agg.precision_mean, agg.precision_std);
  stat([](const EvalReport& r) { return r.recall; }, agg.recall_mean, agg.recall_std);
  stat([](const EvalReport& r) { return r.f1; }, agg.f1_mean, agg.f1_std);
  return agg;
}

}  // namespace kgre
