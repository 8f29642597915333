#include "perinv/dedup.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "perinv/error.hpp"
#include "perinv/parallel.hpp"

namespace perinv {

// ---------------------------------------------------------------- AdaIndex

AdaIndex::AdaIndex(std::vector<std::string> ids, Matrix vectors, int leaf_size)
    : ids_(std::move(ids)), vectors_(std::move(vectors)), leaf_size_(std::max(1, leaf_size)) {
  if (static_cast<Eigen::Index>(ids_.size()) != vectors_.rows())
    throw Error(ErrorCode::DimensionMismatch, "one id per indexed vector expected");
  order_.resize(static_cast<std::size_t>(vectors_.rows()));
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) build(0, size());
}

int AdaIndex::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size_) return id;

  // Split on the axis of largest spread at the median.
  int axis = 0;
  double spread = -1.0;
  for (int j = 0; j < columns(); ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = begin; i < end; ++i) {
      const double v = vectors_(order_[i], j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > spread) {
      spread = hi - lo;
      axis = j;
    }
  }
  if (spread <= 0.0) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int x, int y) { return vectors_(x, axis) < vectors_(y, axis); });
  const double split = vectors_(order_[mid], axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void AdaIndex::search(int id, const RowVector& query, double radius, std::vector<int>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int p = order_[i];
      if ((vectors_.row(p) - query).cwiseAbs().maxCoeff() <= radius) out.push_back(p);
    }
    return;
  }
  // Left holds values <= split, right holds values >= split.
  const double q = query(node.axis);
  if (q - radius <= node.split) search(node.left, query, radius, out);
  if (q + radius >= node.split) search(node.right, query, radius, out);
}

std::vector<int> AdaIndex::range_query(const RowVector& query, double radius) const {
  if (query.size() != columns())
    throw Error(ErrorCode::LengthMismatch, "query length differs from indexed vectors");
  std::vector<int> out;
  if (!nodes_.empty()) search(0, query, radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- preparation

PreparedDataset prepare_dataset(const std::vector<PeriodicSet>& sets, int k, int threads) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  struct Slot {
    std::optional<DedupEntry> entry;
    std::string error;
  };
  std::vector<Slot> slots(sets.size());
  parallel_for(sets.size(), threads, [&](std::size_t i) {
    const PeriodicSet& s = sets[i];
    try {
      if (!s.is_full_rank())
        throw Error(ErrorCode::NotFullRank, "deduplication needs full-rank periodic sets");
      DedupEntry e;
      e.source_index = static_cast<int>(i);
      e.id = s.id();
      e.pda1 = pda_h(s, 1, k);
      e.pda2 = pda_h(s, 2, k);
      e.ada1 = column_means(e.pda1);
      e.ada2 = column_means(e.pda2);
      slots[i].entry = std::move(e);
    } catch (const Error& err) {
      slots[i].error = err.what();
    }
  });
  PreparedDataset out;
  out.input_size = static_cast<int>(sets.size());
  out.k = k;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].entry)
      out.entries.push_back(std::move(*slots[i].entry));
    else
      out.quarantined.push_back({static_cast<int>(i), sets[i].id(), slots[i].error});
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

AdaIndex build_index(const PreparedDataset& data) {
  std::vector<std::string> ids;
  Matrix vectors(static_cast<Eigen::Index>(data.entries.size()), data.k);
  for (std::size_t i = 0; i < data.entries.size(); ++i) {
    ids.push_back(data.entries[i].id);
    vectors.row(static_cast<Eigen::Index>(i)) = data.entries[i].ada1;
  }
  return AdaIndex(std::move(ids), std::move(vectors));
}

AdaIndex build_index(const std::vector<PeriodicSet>& sets, int k, std::vector<Quarantined>* skipped,
                     int threads) {
  PreparedDataset data = prepare_dataset(sets, k, threads);
  if (skipped) skipped->insert(skipped->end(), data.quarantined.begin(), data.quarantined.end());
  return build_index(data);
}

// ---------------------------------------------------------------- pipeline

std::vector<DedupPair> DedupResult::survivors() const {
  std::vector<DedupPair> out;
  for (const auto& p : pairs)
    if (p.stage_reached == 4) out.push_back(p);
  return out;
}

namespace {

constexpr int kStages = 4;
const char* const kStageNames[kStages] = {"ADA", "ADA2", "PDA", "PDA2"};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

long long unique_left(const std::vector<DedupPair>& pairs, int stage, bool self) {
  std::set<int> seen;
  for (const auto& p : pairs) {
    if (p.stage_reached < stage) continue;
    seen.insert(p.a);
    if (self) seen.insert(p.b);
  }
  return static_cast<long long>(seen.size());
}

}  // namespace

DedupResult hierarchical_dedup(const PreparedDataset& a, const PreparedDataset* b,
                               const DedupConfig& config) {
  if (!(config.threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  const bool self = (b == nullptr);
  const PreparedDataset& right = self ? a : *b;
  if (!self && a.k != right.k) throw Error(ErrorCode::ColumnMismatch, "datasets prepared with different k");
  const double tau = config.threshold;
  const GroundMetric& g = config.ground;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  DedupResult result;
  DedupReport& report = result.report;
  report.threshold = tau;
  report.metric = g.name();
  report.size_a = a.input_size;
  report.size_b = self ? 0 : right.input_size;
  report.self = self;

  // Stage 1: candidates from the index.
  auto t = Clock::now();
  const AdaIndex index = build_index(right);
  const double radius = tau * g.linf_inflation(a.k);
  std::vector<std::vector<int>> hits(a.entries.size());
  parallel_for(a.entries.size(), config.threads, [&](std::size_t i) {
    for (int j : index.range_query(a.entries[i].ada1, radius))
      if (!self || j > static_cast<int>(i)) hits[i].push_back(j);
  });
  std::vector<DedupPair>& pairs = result.pairs;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    for (int j : hits[i]) {
      DedupPair p{static_cast<int>(i), j, a.entries[i].id, right.entries[j].id, 1, nan, nan, nan, nan};
      pairs.push_back(std::move(p));
    }
  }
  const double stage1_seconds = seconds_since(t);

  auto refine = [&](int stage, auto&& distance) {
    const auto start = Clock::now();
    parallel_for(pairs.size(), config.threads, [&](std::size_t i) {
      DedupPair& p = pairs[i];
      if (p.stage_reached < stage - 1) return;
      const double d = distance(p, a.entries[p.a], right.entries[p.b]);
      if (d <= tau) p.stage_reached = stage;
    });
    return seconds_since(start);
  };

  double times[kStages] = {stage1_seconds, 0, 0, 0};
  times[1] = refine(2, [&](DedupPair& p, const DedupEntry& x, const DedupEntry& y) {
    p.d_ada = ground_distance(x.ada1, y.ada1, g);
    p.d_ada2 = std::max(p.d_ada, ground_distance(x.ada2, y.ada2, g));
    // Stage 1 only used the L_inf box; enforce the ground bound on order 1 here.
    return p.d_ada2;
  });
  times[2] = refine(3, [&](DedupPair& p, const DedupEntry& x, const DedupEntry& y) {
    p.d_pda = emd(x.pda1, y.pda1, g).value;
    return p.d_pda;
  });
  times[3] = refine(4, [&](DedupPair& p, const DedupEntry& x, const DedupEntry& y) {
    p.d_pda2 = std::max(p.d_pda, emd(x.pda2, y.pda2, g).value);
    return p.d_pda2;
  });

  std::stable_sort(pairs.begin(), pairs.end(), [](const DedupPair& x, const DedupPair& y) {
    return std::tie(x.id_a, x.id_b, x.a, x.b) < std::tie(y.id_a, y.id_b, y.a, y.b);
  });

  for (int s = 0; s < kStages; ++s) {
    StageReport st;
    st.name = kStageNames[s];
    st.pairs = std::count_if(pairs.begin(), pairs.end(), [&](const DedupPair& p) { return p.stage_reached > s; });
    st.entries = unique_left(pairs, s + 1, self);
    st.seconds = times[s];
    report.stages.push_back(st);
  }
  return result;
}

DedupResult hierarchical_dedup(const std::vector<PeriodicSet>& a, const std::vector<PeriodicSet>* b, int k,
                               const DedupConfig& config) {
  const PreparedDataset pa = prepare_dataset(a, k, config.threads);
  if (!b) return hierarchical_dedup(pa, nullptr, config);
  const PreparedDataset pb = prepare_dataset(*b, k, config.threads);
  return hierarchical_dedup(pa, &pb, config);
}

// ---------------------------------------------------------------- output

std::string report_summary(const DedupReport& report, const std::string& format) {
  std::ostringstream out;
  auto percent = [&](long long entries) {
    return report.size_a > 0 ? 100.0 * static_cast<double>(entries) / report.size_a : 0.0;
  };
  if (format == "csv") {
    out << "stage,pairs,entries,percent,time_s\n";
    out << std::fixed;
    for (const auto& s : report.stages)
      out << s.name << ',' << s.pairs << ',' << s.entries << ',' << std::setprecision(4) << percent(s.entries)
          << ',' << std::setprecision(3) << s.seconds << '\n';
    return out.str();
  }
  if (format != "text") throw Error(ErrorCode::InvalidArgument, "unknown report format '" + format + "'");

  const int w = 10;
  out << std::left << std::setw(w) << "" << std::right;
  for (const auto& s : report.stages) out << std::setw(w) << s.name;
  out << '\n';
  if (report.stages.empty()) return out.str();
  out << std::fixed;
  out << std::left << std::setw(w) << "Pairs" << std::right;
  for (const auto& s : report.stages) out << std::setw(w) << s.pairs;
  out << '\n' << std::left << std::setw(w) << "Entries" << std::right;
  for (const auto& s : report.stages) out << std::setw(w) << s.entries;
  out << '\n' << std::left << std::setw(w) << "%" << std::right << std::setprecision(2);
  for (const auto& s : report.stages) out << std::setw(w) << percent(s.entries);
  out << '\n' << std::left << std::setw(w) << "Time (s)" << std::right << std::setprecision(1);
  for (const auto& s : report.stages) out << std::setw(w) << s.seconds;
  out << '\n';
  return out.str();
}

std::string pairs_csv(const std::vector<DedupPair>& pairs) {
  std::ostringstream out;
  out << "idA,idB,stage_reached,d_ADA,d_ADA2,d_PDA,d_PDA2\n";
  out << std::setprecision(17);
  auto field = [&](double v) {
    out << ',';
    if (!std::isnan(v)) out << v;
  };
  for (const auto& p : pairs) {
    out << p.id_a << ',' << p.id_b << ',' << p.stage_reached;
    field(p.d_ada);
    field(p.d_ada2);
    field(p.d_pda);
    field(p.d_pda2);
    out << '\n';
  }
  return out.str();
}

}  // namespace perinv
