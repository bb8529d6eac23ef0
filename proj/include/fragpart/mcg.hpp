#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fragpart/partition.hpp"
#include "fragpart/rng.hpp"
#include "fragpart/stats.hpp"
#include "fragpart/weight.hpp"

namespace fragpart {

/// What moving one unit from fragment i to slot j does. Slot M (one past
/// the last fragment) turns the unit into a new fragment of size 1.
enum class MoveKind {
  Transfer,         // between two fragments, donor survives
  FreeNucleon,      // donor of size > 1 sheds a unit into a new fragment
  Attach,           // a size-1 donor joins another fragment
  InvalidOrdering,  // result is not non-increasing at the stored indices
  NoOp,             // result equals the source multiset
};

std::string to_string(MoveKind kind);

inline bool is_valid(MoveKind kind) noexcept {
  return kind == MoveKind::Transfer || kind == MoveKind::FreeNucleon || kind == MoveKind::Attach;
}

/// Classifies pair (i, j), 0-based, i in [0, M), j in [0, M], j != i. O(1).
MoveKind classify_move(std::span<const int> parts, int donor, int acceptor);

struct MoveProposal {
  int donor = 0;
  int acceptor = 0;
  MoveKind kind = MoveKind::NoOp;
  /// Set for valid kinds only.
  std::optional<Partition> candidate;
};

/// All M * M ordered (donor, slot) pairs of p, classified.
std::vector<MoveProposal> enumerate_proposals(const Partition& p);

/// Number of (donor, slot) pairs of p whose candidate is q, by full
/// enumeration. Throws PreconditionError on mass mismatch.
int transition_multiplicity(const Partition& p, const Partition& q);

/// Number of valid (donor, slot) pairs of p, from its run structure in O(M).
int valid_pair_count(const Partition& p);

/// Same count in O(1) for the move taking one unit from a fragment of size
/// `donor_size` to one of size `acceptor_size` (0 = new fragment).
int count_moves(const Partition& p, int donor_size, int acceptor_size);

enum class Kernel {
  /// Redraw invalid pairs, accept with min(1, W_new / W_old).
  PaperLiteral,
  /// Invalid pairs are self-transitions; acceptance carries the Hastings
  /// factor n_qp M_p^2 / (n_pq M_q^2), giving exact detailed balance.
  ExactMH,
  /// PaperLiteral's redraw-until-valid proposal with the Hastings factor
  /// n_qp V_p / (n_pq V_q), V being the number of valid pairs. Exact, and
  /// no step is spent on an invalid pair.
  RedrawMH,
};

std::string to_string(Kernel kernel);
Kernel kernel_from_name(const std::string& name);

/// One Metropolis chain over partitions of a fixed mass.
class ChainState {
 public:
  ChainState(Partition start, WeightModel model, Kernel kernel, std::uint64_t seed);

  /// Advances one step; the current partition afterwards is the recorded sample.
  void step();

  const Partition& current() const noexcept { return current_; }
  double current_log_weight() const noexcept { return log_weight_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  std::uint64_t accepted_count() const noexcept { return accepted_; }
  Kernel kernel() const noexcept { return kernel_; }
  const WeightModel& model() const noexcept { return model_; }

 private:
  double move_log_weight_delta(int donor_size, int acceptor_size) const;
  void apply(int donor, int acceptor);

  Partition current_;
  WeightModel model_;
  Kernel kernel_;
  Rng rng_;
  double log_weight_;

  /// Run structure of current_, kept for RedrawMH: distinct sizes, sizes
  /// d > 1 with d - 1 also present, and sizes d > 1 occurring twice or more.
  struct Runs {
    int distinct = 0;
    int adjacent = 0;
    int repeated = 0;
  };
  Runs runs_;
  std::uint64_t steps_ = 0;
  std::uint64_t accepted_ = 0;
};

struct ChainConfig {
  Kernel kernel = Kernel::RedrawMH;
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 10000;
  std::uint64_t samples = 100000;
  std::uint64_t thinning = 1;
  /// Defaults to the single fragment (a0).
  std::optional<Partition> start;
};

/// Discards burn_in steps, then records `samples` states (one every
/// `thinning` steps) into `sink`. `on_sample` sees each recorded state.
SummaryStatistics run_chain(int a0, const WeightModel& model, const ChainConfig& config,
                            SummaryStatistics sink,
                            const std::function<void(const Partition&)>& on_sample = {});

/// Runs `chains` independent chains (seeds derived from config.seed, each
/// with its own burn-in, samples split evenly) in parallel and merges them
/// in chain order.
SummaryStatistics run_chains(int a0, const WeightModel& model, const ChainConfig& config,
                             int chains,
                             const std::vector<Selector>& selectors = default_selectors());

struct MemoryLossOptions {
  /// Steps per block; running estimates are compared at block boundaries.
  std::uint64_t block = 100;
  /// Number of trailing blocks forming each running estimate.
  std::uint64_t window = 10;
  std::uint64_t max_steps = 10'000'000;
};

struct MemoryLossResult {
  std::uint64_t steps_to_merge = 0;
  bool merged = false;
};

/// Runs chains from two seed partitions side by side and returns the first
/// block boundary at which their trailing-window <M> estimates agree within
/// two combined batch-means standard errors. Identical seeds merge at 0.
MemoryLossResult memory_loss_diagnostic(const Partition& seed_a, const Partition& seed_b,
                                        const WeightModel& model, Kernel kernel,
                                        std::uint64_t rng_seed, const MemoryLossOptions& options = {});

}  // namespace fragpart
