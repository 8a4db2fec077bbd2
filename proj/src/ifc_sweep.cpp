#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>

#include "leoisl/csv.hpp"
#include "leoisl/ifc.hpp"

namespace leoisl::ifc {
namespace {

SlotNetwork network_for(const SlotInputs& in, double epoch_s) {
  return build_slot_network(in.constellation, in.ground_stations, in.aircraft, in.links, in.topology,
                            epoch_s);
}

bool needs_chain(std::span<const PlanMode> modes) {
  return std::any_of(modes.begin(), modes.end(), [](PlanMode m) {
    return m == PlanMode::optimized || m == PlanMode::fully_connected;
  });
}

}  // namespace

DeliveryPlan run_slot(const SlotInputs& inputs, double epoch_s, int epoch_index, int max_isls,
                      PlanMode mode, std::uint64_t rng_seed) {
  inputs.ifc.validate();
  const auto network = network_for(inputs, epoch_s);
  const auto requests = generate_requests(network, inputs.ifc, rng_seed, epoch_index);
  return plan_requests(requests, network, max_isls, mode, inputs.ifc);
}

std::vector<SweepRow> sweep_max_isls(const SlotInputs& inputs, std::span<const int> isls_range,
                                     std::span<const PlanMode> modes,
                                     std::span<const double> epochs,
                                     std::span<const std::uint64_t> seeds) {
  if (isls_range.empty() || modes.empty() || epochs.empty() || seeds.empty())
    throw std::invalid_argument("sweep_max_isls: every range must be non-empty");
  for (int k : isls_range) {
    if (k < 0) throw std::invalid_argument("sweep_max_isls: max_isls must be >= 0");
  }
  inputs.ifc.validate();
  const int top = *std::max_element(isls_range.begin(), isls_range.end());

  std::vector<SlotNetwork> networks;
  for (double t : epochs) networks.push_back(network_for(inputs, t));

  struct Cell {
    std::size_t epoch;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    for (auto seed : seeds) cells.push_back({e, seed});
  }

  std::vector<std::vector<SweepRow>> per_cell(cells.size());
  auto run_cell = [&](std::size_t i) {
    const auto& cell = cells[i];
    const auto& net = networks[cell.epoch];
    const auto requests = generate_requests(net, inputs.ifc, cell.seed, static_cast<int>(cell.epoch));
    std::optional<SlotSolution> solution;
    if (needs_chain(modes)) solution = solve_slot(requests, net, top, inputs.ifc);
    auto& rows = per_cell[i];
    for (int k : isls_range) {
      for (PlanMode mode : modes) {
        const DeliveryPlan plan =
            solution ? solution->plan(k, mode) : plan_requests(requests, net, k, mode, inputs.ifc);
        rows.push_back({k, mode, cell.seed, epochs[cell.epoch], plan.average_delay_s, plan.delivered,
                        plan.undelivered});
      }
    }
  };

  // Cells are independent; results are sorted afterwards, so the thread
  // count never changes the output.
  const std::size_t workers =
      std::min<std::size_t>(cells.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        run_cell(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (auto& r : per_cell) rows.insert(rows.end(), r.begin(), r.end());
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.max_isls, a.mode, a.seed, a.epoch_s) <
           std::tie(b.max_isls, b.mode, b.seed, b.epoch_s);
  });
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::string out = "max_isls,mode,seed,epoch_s,avg_delay_s,delivered,undelivered\n";
  for (const auto& r : rows) {
    out += csv::row({std::to_string(r.max_isls), std::string(to_string(r.mode)), std::to_string(r.seed),
                     csv::number(r.epoch_s), csv::number(r.avg_delay_s), std::to_string(r.delivered),
                     std::to_string(r.undelivered)});
  }
  return out;
}

std::vector<SweepSummary> summarize(std::span<const SweepRow> rows) {
  std::map<std::pair<int, PlanMode>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    auto& [sum, count] = acc[{r.max_isls, r.mode}];
    sum += r.avg_delay_s;
    ++count;
  }
  std::vector<SweepSummary> out;
  for (const auto& [key, v] : acc) out.push_back({key.first, key.second, v.first / v.second});
  return out;
}

}  // namespace leoisl::ifc
