#ifndef VAXNET_BENCH_HPP
#define VAXNET_BENCH_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vaxnet/cyclic.hpp"
#include "vaxnet/instance.hpp"
#include "vaxnet/oracle.hpp"
#include "vaxnet/solver.hpp"

namespace vaxnet {

struct BenchCase {
  std::string id;
  Instance instance;
  std::string density = "-";  // generator class when known
};


struct BenchRow {
  std::string id;
  int hubs = 0;
  int nodes = 0;
  int binvars = 0;
  std::string density;
  double exact_obj = 0.0;
  double exact_ms = 0.0;
  double cyclic_obj = 0.0;
  double cyclic_ms = 0.0;
  double gap_pct = 0.0;
  int cyclic_iterations = 0;
  bool exact_optimal = false;
  bool monotone = true;                 // every cyclic trace descends
  std::optional<double> oracle_obj;     // set when within the guard
  std::vector<std::string> flags;       // empty means "ok"; "oracle-ok" is informational

  std::string status() const;
  /// Rows whose exact solve was not proven optimal stay out of gap statistics.
  bool in_statistics() const;
};

struct BenchOptions {
  mip::SolveConfig solve;  // exact solve and every restricted cyclic solve
  double epsilon = 1e-6;
  int multistart = 1;
  ClosedHubRule closed_hubs = ClosedHubRule::force_closed;
  /// Uniform initial frequency (1 or 2) instead of the per-id draw.
  std::optional<int> seed_freq;
  int threads = 1;  // instances run concurrently, each solve single-thread
  bool oracle_check = true;
  double oracle_guard = kDefaultOracleGuard;
  /// Called once per finished row (serialized), with its index in the input.
  std::function<void(std::size_t, const BenchRow&)> on_row;
};

struct BenchSummary {
  int rows = 0;
  int counted = 0;  // rows in gap statistics
  double max_gap = 0.0;
  double mean_gap = 0.0;
  int cyclic_faster = 0;  // rows with cyclic_ms < exact_ms
};

/// FNV-1a (64 bit); bench seeds the cyclic draw with the hash of the id.
std::uint64_t fnv1a(std::string_view text);

BenchRow bench_instance(const BenchCase& c, const BenchOptions& opts);

/// Runs every case (concurrently up to opts.threads); rows come back in input
/// order. Throws std::invalid_argument on an empty case list.
std::vector<BenchRow> run_bench(const std::vector<BenchCase>& cases, const BenchOptions& opts);

BenchSummary summarize(const std::vector<BenchRow>& rows);

/// Header: instance,hubs,nodes,binvars,density,exact_obj,exact_ms,cyclic_obj,
/// cyclic_ms,gap_pct,status
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);
void write_bench_table(const std::vector<BenchRow>& rows, std::ostream& out);
void write_bench_summary(const BenchSummary& s, std::ostream& out);

}  // namespace vaxnet

#endif  // VAXNET_BENCH_HPP
