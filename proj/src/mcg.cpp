#include "fragpart/mcg.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>

#include "fragpart/error.hpp"

namespace fragpart {

namespace {

using detail::PartitionAccess;

/// Closed-form number of (donor, slot) pairs realizing a move between the
/// given sizes, from the occupation numbers alone. Derived from the ordering
/// rule: a donor must be the last fragment of its size (or drop out as a
/// size-1 fragment), an acceptor the first of its size.
template <class Count>
int count_moves_impl(Count&& n, int donor_size, int acceptor_size) {
  const int d = donor_size, a = acceptor_size;
  if (d < 1 || n(d) < 1) return 0;
  if (a == 0) return d > 1 ? 1 : 0;
  if (n(a) < 1) return 0;
  if (d == 1) {
    // Any of the N_1 unit fragments may be the donor.
    if (a == 1) return n(1) >= 2 ? n(1) : 0;
    return n(1);
  }
  if (a == d - 1) return 0;
  if (a == d) return n(d) >= 2 ? 1 : 0;
  return 1;
}

/// Number of valid pairs given the distinct sizes present and their
/// occupation numbers. A size-d donor (d > 1) has one valid pair per other
/// present size except d - 1 (which swaps values), one more if N_d >= 2, and
/// the new-fragment slot; each unit fragment can attach to any other present
/// size, or to another unit fragment when N_1 >= 2.
template <class Count>
int valid_pairs_impl(std::span<const int> sizes, Count&& n) {
  const int k = static_cast<int>(sizes.size());
  int v = 0;
  for (int d : sizes) {
    if (d == 1) {
      const int ones = n(1);
      v += ones * (k - 1) + (ones >= 2 ? ones : 0);
    } else {
      v += k - (n(d - 1) > 0 ? 1 : 0) + (n(d) >= 2 ? 1 : 0);
    }
  }
  return v;
}

void distinct_sizes(std::span<const int> parts, std::vector<int>& out) {
  out.clear();
  for (int a : parts)
    if (out.empty() || out.back() != a) out.push_back(a);
}

/// valid_pairs_impl summed in closed form from the run structure.
int valid_pairs_from_runs(int distinct, int adjacent, int repeated, int ones) {
  const int k = distinct;
  const int has_ones = ones > 0 ? 1 : 0;
  return (k - has_ones) * k - adjacent + repeated + (has_ones ? ones * (k - 1) + (ones >= 2 ? ones : 0) : 0);
}

struct SpeciesChange {
  std::array<std::pair<int, int>, 4> entries{};
  int size = 0;
  void add(int species, int delta) {
    for (int k = 0; k < size; ++k)
      if (entries[static_cast<std::size_t>(k)].first == species) {
        entries[static_cast<std::size_t>(k)].second += delta;
        return;
      }
    entries[static_cast<std::size_t>(size++)] = {species, delta};
  }
  int delta(int species) const {
    for (int k = 0; k < size; ++k)
      if (entries[static_cast<std::size_t>(k)].first == species) return entries[static_cast<std::size_t>(k)].second;
    return 0;
  }
};

/// Occupation changes of moving one unit from size d to size a (0 = new fragment).
SpeciesChange move_change(int d, int a) {
  SpeciesChange c;
  c.add(d, -1);
  if (d > 1) c.add(d - 1, +1);
  if (a > 0) {
    c.add(a, -1);
    c.add(a + 1, +1);
  } else {
    c.add(1, +1);
  }
  return c;
}

Partition apply_copy(const Partition& p, int donor, int acceptor) {
  std::vector<int> parts = p.parts();
  const auto m = parts.size();
  --parts[static_cast<std::size_t>(donor)];
  if (static_cast<std::size_t>(acceptor) == m)
    parts.push_back(1);
  else
    ++parts[static_cast<std::size_t>(acceptor)];
  if (parts[static_cast<std::size_t>(donor)] == 0) parts.erase(parts.begin() + donor);
  return Partition::from_parts(parts);
}

}  // namespace

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::Transfer: return "transfer";
    case MoveKind::FreeNucleon: return "free_nucleon";
    case MoveKind::Attach: return "attach";
    case MoveKind::InvalidOrdering: return "invalid_ordering";
    case MoveKind::NoOp: return "no_op";
  }
  return "unknown";
}

std::string to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::PaperLiteral: return "paper-literal";
    case Kernel::ExactMH: return "exact-mh";
    case Kernel::RedrawMH: return "redraw-mh";
  }
  return "unknown";
}

Kernel kernel_from_name(const std::string& name) {
  if (name == "exact-mh" || name == "exact") return Kernel::ExactMH;
  if (name == "paper-literal" || name == "paper") return Kernel::PaperLiteral;
  if (name == "redraw-mh" || name == "redraw") return Kernel::RedrawMH;
  throw InvalidInput("unknown kernel '" + name + "' (expected exact-mh, redraw-mh or paper-literal)");
}

MoveKind classify_move(std::span<const int> parts, int donor, int acceptor) {
  const int m = static_cast<int>(parts.size());
  const int i = donor, j = acceptor;
  const int d = parts[static_cast<std::size_t>(i)];
  if (j == m) {
    if (d == 1) return MoveKind::NoOp;
    if (i + 1 < m && parts[static_cast<std::size_t>(i + 1)] > d - 1) return MoveKind::InvalidOrdering;
    return MoveKind::FreeNucleon;
  }
  const int a = parts[static_cast<std::size_t>(j)];
  if (d == 1) {
    // The donor disappears; the acceptor's new left neighbour skips it.
    int k = j - 1;
    if (k == i) --k;
    if (k >= 0 && parts[static_cast<std::size_t>(k)] < a + 1) return MoveKind::InvalidOrdering;
    return MoveKind::Attach;
  }
  if (a == d - 1) return MoveKind::NoOp;
  if (i + 1 < m) {
    const int next = i + 1 == j ? a + 1 : parts[static_cast<std::size_t>(i + 1)];
    if (next > d - 1) return MoveKind::InvalidOrdering;
  }
  if (j > 0) {
    const int prev = j - 1 == i ? d - 1 : parts[static_cast<std::size_t>(j - 1)];
    if (prev < a + 1) return MoveKind::InvalidOrdering;
  }
  return MoveKind::Transfer;
}

std::vector<MoveProposal> enumerate_proposals(const Partition& p) {
  const int m = p.multiplicity();
  std::vector<MoveProposal> out;
  out.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (j == i) continue;
      MoveProposal prop{i, j, classify_move(p.parts(), i, j), std::nullopt};
      if (is_valid(prop.kind)) prop.candidate = apply_copy(p, i, j);
      out.push_back(std::move(prop));
    }
  }
  return out;
}

int transition_multiplicity(const Partition& p, const Partition& q) {
  if (p.total_mass() != q.total_mass()) throw PreconditionError("partitions have different total mass");
  if (p == q) return 0;
  int n = 0;
  for (const auto& prop : enumerate_proposals(p))
    if (prop.candidate && *prop.candidate == q) ++n;
  return n;
}

int valid_pair_count(const Partition& p) {
  std::vector<int> sizes;
  distinct_sizes(p.parts(), sizes);
  return valid_pairs_impl(sizes, [&](int size) { return p.count(size); });
}

int count_moves(const Partition& p, int donor_size, int acceptor_size) {
  return count_moves_impl([&](int size) { return p.count(size); }, donor_size, acceptor_size);
}

ChainState::ChainState(Partition start, WeightModel model, Kernel kernel, std::uint64_t seed)
    : current_(std::move(start)), model_(std::move(model)), kernel_(kernel), rng_(seed) {
  if (current_.total_mass() < 2) throw PreconditionError("a chain needs a0 >= 2 to move");
  log_weight_ = model_.log_weight(current_);
  const auto& parts = current_.parts();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0 && parts[i] == parts[i - 1]) continue;
    const int d = parts[i];
    ++runs_.distinct;
    if (d > 1 && current_.count(d - 1) > 0) ++runs_.adjacent;
    if (d > 1 && current_.count(d) >= 2) ++runs_.repeated;
  }
}

double ChainState::move_log_weight_delta(int donor_size, int acceptor_size) const {
  if (model_.kind() == WeightModel::Kind::Uniform) return 0.0;
  const SpeciesChange c = move_change(donor_size, acceptor_size);
  double delta = 0.0;
  for (int k = 0; k < c.size; ++k) {
    const auto [species, dn] = c.entries[static_cast<std::size_t>(k)];
    if (dn == 0) continue;
    const int n = current_.count(species);
    delta += model_.log_species_factor(species, n + dn) - model_.log_species_factor(species, n);
  }
  return delta;
}

void ChainState::apply(int donor, int acceptor) {
  auto& parts = PartitionAccess::parts(current_);
  auto& counts = PartitionAccess::counts(current_);
  const auto i = static_cast<std::size_t>(donor);
  const int d = parts[i];
  --counts[static_cast<std::size_t>(d)];
  if (d > 1) ++counts[static_cast<std::size_t>(d - 1)];
  --parts[i];
  if (static_cast<std::size_t>(acceptor) == parts.size()) {
    parts.push_back(1);
    ++counts[1];
  } else {
    auto& a = parts[static_cast<std::size_t>(acceptor)];
    --counts[static_cast<std::size_t>(a)];
    ++a;
    ++counts[static_cast<std::size_t>(a)];
  }
  if (parts[i] == 0) parts.erase(parts.begin() + donor);
  assert(detail::is_consistent(current_));
}

void ChainState::step() {
  const auto& parts = current_.parts();
  const int m = current_.multiplicity();
  auto draw = [&](int& i, int& j) {
    i = static_cast<int>(rng_.below(static_cast<std::uint64_t>(m)));
    const int slot = static_cast<int>(rng_.below(static_cast<std::uint64_t>(m)));
    j = slot < i ? slot : slot + 1;
  };

  int i = 0, j = 0;
  if (kernel_ != Kernel::ExactMH) {
    do {
      draw(i, j);
    } while (!is_valid(classify_move(parts, i, j)));
  } else {
    draw(i, j);
  }
  ++steps_;
  if (!is_valid(classify_move(parts, i, j))) return;  // ExactMH self-transition

  const int d = parts[static_cast<std::size_t>(i)];
  const int a = j == m ? 0 : parts[static_cast<std::size_t>(j)];
  const double weight_delta = move_log_weight_delta(d, a);
  double log_ratio = weight_delta;
  Runs next_runs = runs_;
  if (kernel_ != Kernel::PaperLiteral) {
    const SpeciesChange c = move_change(d, a);
    auto next_count = [&](int size) { return current_.count(size) + c.delta(size); };
    const int forward = count_moves(current_, d, a);
    const int backward = count_moves_impl(next_count, a == 0 ? 1 : a + 1, d == 1 ? 0 : d - 1);
    assert(forward > 0 && backward > 0);
    log_ratio += std::log(static_cast<double>(backward) / forward);
    if (kernel_ == Kernel::ExactMH) {
      const int m_next = m + (a == 0 ? 1 : 0) - (d == 1 ? 1 : 0);
      log_ratio += 2.0 * std::log(static_cast<double>(m) / m_next);
    } else {
      // Only sizes touched by the move, and their upper neighbours, can
      // change the run structure.
      std::array<int, 8> touched{};
      int n_touched = 0;
      auto touch = [&](int size) {
        for (int t = 0; t < n_touched; ++t)
          if (touched[static_cast<std::size_t>(t)] == size) return;
        touched[static_cast<std::size_t>(n_touched++)] = size;
      };
      for (int k = 0; k < c.size; ++k) {
        const int size = c.entries[static_cast<std::size_t>(k)].first;
        touch(size);
        touch(size + 1);
      }
      auto before = [&](int size) { return current_.count(size); };
      for (int t = 0; t < n_touched; ++t) {
        const int size = touched[static_cast<std::size_t>(t)];
        const bool changed = c.delta(size) != 0;
        if (changed) {
          next_runs.distinct += (next_count(size) > 0) - (before(size) > 0);
          if (size > 1) next_runs.repeated += (next_count(size) >= 2) - (before(size) >= 2);
        }
        if (size > 1 && (changed || c.delta(size - 1) != 0))
          next_runs.adjacent += (next_count(size) > 0 && next_count(size - 1) > 0) -
                                (before(size) > 0 && before(size - 1) > 0);
      }
      const int pairs_now = valid_pairs_from_runs(runs_.distinct, runs_.adjacent, runs_.repeated, before(1));
      const int pairs_next =
          valid_pairs_from_runs(next_runs.distinct, next_runs.adjacent, next_runs.repeated, next_count(1));
      log_ratio += std::log(static_cast<double>(pairs_now) / pairs_next);
    }
  }
  if (log_ratio >= 0.0 || rng_.uniform01() < std::exp(log_ratio)) {
    apply(i, j);
    log_weight_ += weight_delta;
    ++accepted_;
    runs_ = next_runs;
    assert(kernel_ != Kernel::RedrawMH ||
           valid_pairs_from_runs(runs_.distinct, runs_.adjacent, runs_.repeated, current_.count(1)) ==
               valid_pair_count(current_));
  }
}

SummaryStatistics run_chain(int a0, const WeightModel& model, const ChainConfig& config,
                            SummaryStatistics sink, const std::function<void(const Partition&)>& on_sample) {
  if (a0 < 2) throw PreconditionError("run_chain needs a0 >= 2");
  if (sink.a0() != a0) throw PreconditionError("sink a0 does not match the chain");
  if (config.start && config.start->total_mass() != a0)
    throw PreconditionError("start partition has the wrong mass");
  ChainState chain(config.start ? *config.start : Partition::single(a0), model, config.kernel, config.seed);
  for (std::uint64_t s = 0; s < config.burn_in; ++s) chain.step();
  const std::uint64_t thinning = std::max<std::uint64_t>(config.thinning, 1);
  for (std::uint64_t s = 0; s < config.samples; ++s) {
    for (std::uint64_t t = 0; t < thinning; ++t) chain.step();
    sink.accumulate(chain.current());
    if (on_sample) on_sample(chain.current());
  }
  return sink;
}

SummaryStatistics run_chains(int a0, const WeightModel& model, const ChainConfig& config, int chains,
                             const std::vector<Selector>& selectors) {
  if (chains < 1) throw PreconditionError("need at least one chain");
  if (chains == 1) return run_chain(a0, model, config, SummaryStatistics(a0, selectors));
  std::vector<SummaryStatistics> partial(static_cast<std::size_t>(chains), SummaryStatistics(a0, selectors));
  const auto n = static_cast<std::uint64_t>(chains);
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < chains; ++c) {
    ChainConfig cfg = config;
    const auto idx = static_cast<std::uint64_t>(c);
    cfg.seed = Rng::derive(config.seed, idx);
    cfg.samples = config.samples / n + (idx < config.samples % n ? 1 : 0);
    partial[static_cast<std::size_t>(c)] =
        run_chain(a0, model, cfg, std::move(partial[static_cast<std::size_t>(c)]));
  }
  SummaryStatistics total(a0, selectors);
  for (const auto& p : partial) total.merge(p);
  return total;
}

namespace {

struct WindowEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

WindowEstimate trailing_window(const std::vector<double>& block_means, std::size_t window) {
  const auto first = block_means.end() - static_cast<std::ptrdiff_t>(window);
  double mean = 0.0;
  for (auto it = first; it != block_means.end(); ++it) mean += *it;
  mean /= static_cast<double>(window);
  double var = 0.0;
  for (auto it = first; it != block_means.end(); ++it) var += (*it - mean) * (*it - mean);
  var /= static_cast<double>(window - 1);
  return {mean, std::sqrt(var / static_cast<double>(window))};
}

}  // namespace

MemoryLossResult memory_loss_diagnostic(const Partition& seed_a, const Partition& seed_b,
                                        const WeightModel& model, Kernel kernel, std::uint64_t rng_seed,
                                        const MemoryLossOptions& options) {
  if (seed_a.total_mass() != seed_b.total_mass())
    throw PreconditionError("seed partitions have different total mass");
  if (seed_a == seed_b) return {0, true};
  if (options.block < 1 || options.window < 2) throw PreconditionError("need block >= 1 and window >= 2");

  ChainState a(seed_a, model, kernel, Rng::derive(rng_seed, 0));
  ChainState b(seed_b, model, kernel, Rng::derive(rng_seed, 1));
  std::vector<double> means_a, means_b;
  for (std::uint64_t steps = options.block; steps <= options.max_steps; steps += options.block) {
    double sum_a = 0.0, sum_b = 0.0;
    for (std::uint64_t s = 0; s < options.block; ++s) {
      a.step();
      b.step();
      sum_a += a.current().multiplicity();
      sum_b += b.current().multiplicity();
    }
    means_a.push_back(sum_a / static_cast<double>(options.block));
    means_b.push_back(sum_b / static_cast<double>(options.block));
    if (means_a.size() < options.window) continue;
    const auto ea = trailing_window(means_a, options.window);
    const auto eb = trailing_window(means_b, options.window);
    const double combined = std::hypot(ea.standard_error, eb.standard_error);
    if (std::abs(ea.mean - eb.mean) <= 2.0 * combined) return {steps, true};
  }
  return {options.max_steps, false};
}

}  // namespace fragpart
