#pragma once

#include "bsgd/common.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

namespace bsgd {

/// Width of one transferred/stored value in the byte accounting.
inline constexpr std::uint64_t kFloatBytes = 4;

enum class ProductKind { Forward, Back };

/// One application of A_I^J or its transpose to a vector. `rows` and `cols`
/// are the dimensions of the block actually applied.
struct ProductEvent {
  ProductKind kind;
  Index rows;
  Index cols;
};

struct LedgerTotals {
  std::uint64_t block_mults = 0;
  std::uint64_t scalar_ops = 0;
  std::uint64_t bytes_master_to_node = 0;
  std::uint64_t bytes_node_to_master = 0;
  std::uint64_t node_storage_peak = 0;  // floats
  std::uint64_t master_storage = 0;     // floats, N*r + M*c + r + c
  std::uint64_t master_storage_alt = 0; // floats, M*r + N*c + r + c

  std::uint64_t bytes_moved() const { return bytes_master_to_node + bytes_node_to_master; }
  bool operator==(const LedgerTotals&) const = default;
};

/// Computation, communication and storage accounting for the simulated
/// master/servant network. Increments are thread-safe; totals are sums of
/// integers and therefore independent of the order events arrive in.
class CostLedger {
 public:
  CostLedger() = default;
  CostLedger(const CostLedger&) = delete;
  CostLedger& operator=(const CostLedger&) = delete;

  void record(const ProductEvent& ev);

  /// Master-node memories for an r x c system split into M x N blocks.
  void set_master_layout(Index rows, Index cols, Index row_blocks, Index col_blocks);
  void set_node_budget(std::optional<std::uint64_t> floats) { budget_ = floats; }
  std::optional<std::uint64_t> node_budget() const { return budget_; }
  bool within_budget() const;

  LedgerTotals totals() const;
  void reset();

 private:
  std::atomic<std::uint64_t> block_mults_{0};
  std::atomic<std::uint64_t> scalar_ops_{0};
  std::atomic<std::uint64_t> bytes_m2n_{0};
  std::atomic<std::uint64_t> bytes_n2m_{0};
  std::atomic<std::uint64_t> node_peak_{0};
  std::uint64_t master_ = 0;
  std::uint64_t master_alt_ = 0;
  std::optional<std::uint64_t> budget_;
};

/// Applies a batch of events produced by one epoch.
void account_epoch(CostLedger& ledger, const std::vector<ProductEvent>& events);

struct BlockTask {
  Index row_block;
  Index col_block;
  bool operator==(const BlockTask&) const = default;
};

using Round = std::vector<BlockTask>;

/// Packs tasks, in order, into ceil(tasks / node_num) rounds of at most
/// node_num tasks each.
std::vector<Round> plan_rounds(Index node_num, const std::vector<BlockTask>& tasks);

/// Ledger fed by replaying events round by round in the given schedule.
LedgerTotals replay_schedule(const std::vector<Round>& schedule,
                             const std::vector<ProductEvent>& events_per_task);

/// One candidate partition in the node-storage sweep.
struct StorageCandidate {
  Index row_blocks;
  Index col_blocks;
  Index max_block_rows;  // m
  Index max_block_cols;  // n
  std::uint64_t node_floats;          // m + n
  std::uint64_t master_floats;        // N*r + M*c
  std::uint64_t master_floats_alt;    // M*r + N*c
  bool within_budget;
};

struct StorageSweep {
  std::vector<StorageCandidate> candidates;
  /// Among budget-feasible grids, the one with the smallest master storage.
  std::optional<StorageCandidate> best;
};

/// For power-of-two column counts N (1..max_col_blocks) pairs each N with
/// the smallest power-of-two row count M whose largest block satisfies
/// m + n <= budget; every examined (M, N) is listed. Rows are split into M
/// contiguous near-equal ranges and the K x K image into N near-equal tiles.
StorageSweep storage_sweep(Index rows, Index side, int ndim, std::uint64_t budget,
                           Index max_row_blocks, Index max_col_blocks);

}  // namespace bsgd
