#include "bsgd/cluster.hpp"

#include "bsgd/partition.hpp"

#include <algorithm>

namespace bsgd {

void CostLedger::record(const ProductEvent& ev) {
  const auto m = static_cast<std::uint64_t>(ev.rows);
  const auto n = static_cast<std::uint64_t>(ev.cols);
  block_mults_.fetch_add(1, std::memory_order_relaxed);
  scalar_ops_.fetch_add(m * n, std::memory_order_relaxed);
  // Forward: x_J goes out, z_I comes back. Back: r_I out, g_J back.
  const std::uint64_t in = ev.kind == ProductKind::Forward ? n : m;
  const std::uint64_t out = ev.kind == ProductKind::Forward ? m : n;
  bytes_m2n_.fetch_add(in * kFloatBytes, std::memory_order_relaxed);
  bytes_n2m_.fetch_add(out * kFloatBytes, std::memory_order_relaxed);
  std::uint64_t peak = node_peak_.load(std::memory_order_relaxed);
  while (m + n > peak && !node_peak_.compare_exchange_weak(peak, m + n, std::memory_order_relaxed)) {
  }
}

void CostLedger::set_master_layout(Index rows, Index cols, Index row_blocks, Index col_blocks) {
  const auto r = static_cast<std::uint64_t>(rows);
  const auto c = static_cast<std::uint64_t>(cols);
  const auto m = static_cast<std::uint64_t>(row_blocks);
  const auto n = static_cast<std::uint64_t>(col_blocks);
  master_ = n * r + m * c + r + c;
  master_alt_ = m * r + n * c + r + c;
}

bool CostLedger::within_budget() const {
  return !budget_ || node_peak_.load(std::memory_order_relaxed) <= *budget_;
}

LedgerTotals CostLedger::totals() const {
  LedgerTotals t;
  t.block_mults = block_mults_.load();
  t.scalar_ops = scalar_ops_.load();
  t.bytes_master_to_node = bytes_m2n_.load();
  t.bytes_node_to_master = bytes_n2m_.load();
  t.node_storage_peak = node_peak_.load();
  t.master_storage = master_;
  t.master_storage_alt = master_alt_;
  return t;
}

void CostLedger::reset() {
  block_mults_ = 0;
  scalar_ops_ = 0;
  bytes_m2n_ = 0;
  bytes_n2m_ = 0;
  node_peak_ = 0;
}

void account_epoch(CostLedger& ledger, const std::vector<ProductEvent>& events) {
  for (const auto& ev : events) ledger.record(ev);
}

std::vector<Round> plan_rounds(Index node_num, const std::vector<BlockTask>& tasks) {
  if (node_num < 1) throw Error("plan_rounds: node_num must be >= 1");
  std::vector<Round> rounds;
  for (std::size_t k = 0; k < tasks.size(); k += static_cast<std::size_t>(node_num)) {
    const auto end = std::min(tasks.size(), k + static_cast<std::size_t>(node_num));
    rounds.emplace_back(tasks.begin() + static_cast<std::ptrdiff_t>(k),
                        tasks.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return rounds;
}

LedgerTotals replay_schedule(const std::vector<Round>& schedule,
                             const std::vector<ProductEvent>& events_per_task) {
  CostLedger ledger;
  std::size_t task = 0;
  for (const auto& round : schedule) {
    for (std::size_t k = 0; k < round.size(); ++k, ++task) {
      if (task >= events_per_task.size()) throw Error("replay_schedule: more tasks than events");
      ledger.record(events_per_task[task]);
    }
  }
  return ledger.totals();
}

StorageSweep storage_sweep(Index rows, Index side, int ndim, std::uint64_t budget,
                           Index max_row_blocks, Index max_col_blocks) {
  StorageSweep sweep;
  Index cols = side * side;
  if (ndim == 3) cols *= side;
  for (Index n = 1; n <= max_col_blocks && n <= cols; n *= 2) {
    const auto shape = tile_grid_shape(n, ndim);
    Index tile_cols = 1;
    bool tileable = true;
    for (int ax = 0; ax < ndim; ++ax) {
      const Index parts = shape[static_cast<std::size_t>(ax)];
      if (parts > side) {
        tileable = false;
        break;
      }
      tile_cols *= split_sizes(side, parts).front();
    }
    if (!tileable) continue;
    for (Index m = 1; m <= max_row_blocks && m <= rows; m *= 2) {
      StorageCandidate c;
      c.row_blocks = m;
      c.col_blocks = n;
      c.max_block_rows = split_sizes(rows, m).front();
      c.max_block_cols = tile_cols;
      c.node_floats = static_cast<std::uint64_t>(c.max_block_rows + c.max_block_cols);
      c.master_floats = static_cast<std::uint64_t>(n * rows + m * cols);
      c.master_floats_alt = static_cast<std::uint64_t>(m * rows + n * cols);
      c.within_budget = c.node_floats <= budget;
      sweep.candidates.push_back(c);
      if (c.within_budget &&
          (!sweep.best || c.master_floats < sweep.best->master_floats))
        sweep.best = c;
    }
  }
  return sweep;
}

}  // namespace bsgd
