#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perinv/geometry.hpp"
#include "perinv/invariants.hpp"
#include "perinv/metrics.hpp"

namespace perinv {

/// KD-tree over fixed-length vectors answering L_inf range queries.
class AdaIndex {
 public:
  AdaIndex() = default;
  AdaIndex(std::vector<std::string> ids, Matrix vectors, int leaf_size = 8);

  int size() const noexcept { return static_cast<int>(vectors_.rows()); }
  int columns() const noexcept { return static_cast<int>(vectors_.cols()); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  /// Indices i with max_j |vectors(i, j) - query(j)| <= radius, ascending.
  std::vector<int> range_query(const RowVector& query, double radius) const;

 private:
  struct Node {
    int begin = 0, end = 0;  // slice of order_
    int axis = -1;           // -1 for a leaf
    double split = 0.0;
    int left = -1, right = -1;
  };

  int build(int begin, int end);
  void search(int node, const RowVector& query, double radius, std::vector<int>& out) const;

  std::vector<std::string> ids_;
  Matrix vectors_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int leaf_size_ = 8;
};

struct Quarantined {
  int index = 0;  // position in the input list
  std::string id;
  std::string reason;
};

/// Invariants of one corpus entry, computed once and shared by all stages.
struct DedupEntry {
  int source_index = 0;
  std::string id;
  RowVector ada1, ada2;
  RowDistribution pda1, pda2;
};

struct PreparedDataset {
  std::vector<DedupEntry> entries;
  std::vector<Quarantined> quarantined;
  int input_size = 0;
  int k = 0;
  double seconds = 0.0;
};

/// Computes ADA and PDA of orders 1 and 2 for every set. Entries whose
/// invariants fail (e.g. not full rank) are quarantined, never dropped silently.
PreparedDataset prepare_dataset(const std::vector<PeriodicSet>& sets, int k, int threads = 1);

/// Index over the order-1 ADA vectors of the prepared entries.
AdaIndex build_index(const PreparedDataset& data);

/// Convenience: prepare + index. Quarantined entries are appended to `skipped`.
AdaIndex build_index(const std::vector<PeriodicSet>& sets, int k,
                     std::vector<Quarantined>* skipped = nullptr, int threads = 1);

struct DedupConfig {
  double threshold = 1e-2;
  GroundMetric ground = GroundMetric::linf();
  int threads = 1;
};

struct StageReport {
  std::string name;
  long long pairs = 0;
  long long entries = 0;  // distinct entries of dataset A taking part in a pair
  double seconds = 0.0;
};

struct DedupReport {
  std::vector<StageReport> stages;
  double threshold = 0.0;
  std::string metric;
  int size_a = 0;  // entries of dataset A (the percentage base)
  int size_b = 0;  // 0 for a self-comparison
  bool self = true;
};

struct DedupPair {
  int a = 0, b = 0;  // positions in the prepared entry lists
  std::string id_a, id_b;
  int stage_reached = 1;
  // Unset distances are NaN: the pair was dropped before that stage.
  double d_ada, d_ada2, d_pda, d_pda2;
};

struct DedupResult {
  DedupReport report;
  std::vector<DedupPair> pairs;  // every stage-1 candidate, sorted by (id_a, id_b)

  std::vector<DedupPair> survivors() const;
};

/// Stage 1: L_inf range query on ADA (radius inflated for non-L_inf grounds);
/// stage 2: max over orders 1..2 of the ground distance between ADA vectors;
/// stage 3: EMD on PDA; stage 4: max over orders 1..2 of EMD on PDA.
/// Without `b` the dataset is compared with itself over pairs i < j.
DedupResult hierarchical_dedup(const PreparedDataset& a, const PreparedDataset* b,
                               const DedupConfig& config);
DedupResult hierarchical_dedup(const std::vector<PeriodicSet>& a,
                               const std::vector<PeriodicSet>* b, int k,
                               const DedupConfig& config);

/// Stage table as aligned text ("text") or CSV ("csv").
std::string report_summary(const DedupReport& report, const std::string& format = "text");

/// Pair list CSV: idA,idB,stage_reached,d_ADA,d_ADA2,d_PDA,d_PDA2.
std::string pairs_csv(const std::vector<DedupPair>& pairs);

}  // namespace perinv
