#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgre/json_io.hpp"
#include "kgre/types.hpp"

namespace kgre {

// example_id -> triples
using TripleSets = std::map<std::string, std::vector<RelationTriple>>;

struct Counts {
  std::size_t correct = 0;
  std::size_t spurious = 0;
  std::size_t missed = 0;

  std::size_t predicted() const { return correct + spurious; }
  std::size_t gold() const { return correct + missed; }
  double precision() const;
  double recall() const;
  double f1() const;

  Counts& operator+=(const Counts& o) {
    correct += o.correct;
    spurious += o.spurious;
    missed += o.missed;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct BucketScore {
  Counts counts;
  std::size_t examples = 0;
};

struct EvalReport {
  Counts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::size_t, BucketScore> per_triple_size;
  std::optional<double> found_info_ratio;
  std::size_t examples = 0;

  ordered_json to_json() const;
  static EvalReport from_json(const json& j);
  std::string to_table() const;
  std::string breakdown_csv() const;
};

struct EvalOptions {
  bool casefold = false;
};

// Gold triples are deduplicated per example (first occurrence kept).
std::vector<RelationTriple> dedupe(const std::vector<RelationTriple>& triples);

// Exact (subject, relation, object) matching, each gold triple matched at most
// once; counts are pooled over all examples. Throws Error naming the ids when
// the prediction and gold id sets differ.
Counts match_example(const std::vector<RelationTriple>& predicted,
                     const std::vector<RelationTriple>& gold,
                     const EvalOptions& opts = {});

EvalReport micro_prf(const TripleSets& predictions, const TripleSets& gold,
                     const EvalOptions& opts = {});

// Buckets examples by their (deduplicated) gold triple count.
std::map<std::size_t, BucketScore> triple_size_breakdown(
    const TripleSets& predictions, const TripleSets& gold,
    const EvalOptions& opts = {});

// Grounded facts per gold entity over a split. Entity-absent examples use the
// distinct arguments of their gold triples as the entity set. Absent when the
// split has no gold entities.
std::optional<double> found_info_ratio(const GroundedKnowledge& kg,
                                       const Corpus& corpus);

TripleSets gold_triples(const Corpus& corpus);

struct AggregateReport {
  std::size_t runs = 0;
  double precision_mean = 0, precision_std = 0;
  double recall_mean = 0, recall_std = 0;
  double f1_mean = 0, f1_std = 0;

  ordered_json to_json() const;
};

// Mean and sample standard deviation over several runs' reports.
AggregateReport combine_reports(const std::vector<EvalReport>& reports);

}  // namespace kgre
