#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fragpart {

namespace detail {
struct PartitionAccess;
}

/// A partition of a0 units into fragments.
///
/// Two views of the same multiset are kept in sync: the fragment sizes in
/// non-increasing order (index i is fragment i+1 of the ordered list), and
/// the occupation numbers N_A indexed by size A in [0, a0]. Equality is
/// multiset equality, which for the canonical ordering is plain sequence
/// equality.
class Partition {
 public:
  /// Sorts `parts` non-increasing. Throws InvalidInput on an empty
  /// sequence or a part < 1.
  static Partition from_parts(std::span<const int> parts);
  static Partition from_parts(std::initializer_list<int> parts) {
    return from_parts(std::span<const int>(parts.begin(), parts.size()));
  }

  /// The one-fragment partition (a0).
  static Partition single(int a0);
  /// a0 fragments of size 1.
  static Partition all_ones(int a0);

  /// Parses the text form "4 3 1 1 1" (any whitespace, any order).
  static Partition parse(std::string_view text);

  const std::vector<int>& parts() const noexcept { return parts_; }
  int part(std::size_t i) const noexcept { return parts_[i]; }

  /// N_A; zero for sizes outside [1, a0].
  int count(int size) const noexcept {
    return size >= 1 && size <= total_ ? counts_[static_cast<std::size_t>(size)] : 0;
  }
  const std::vector<int>& counts() const noexcept { return counts_; }

  int total_mass() const noexcept { return total_; }
  int multiplicity() const noexcept { return static_cast<int>(parts_.size()); }

  /// Space-separated non-increasing parts.
  std::string to_string() const;

  friend bool operator==(const Partition& a, const Partition& b) noexcept {
    return a.parts_ == b.parts_;
  }
  friend auto operator<=>(const Partition& a, const Partition& b) noexcept {
    return a.parts_ <=> b.parts_;
  }

 private:
  friend struct detail::PartitionAccess;
  Partition() = default;

  std::vector<int> parts_;
  std::vector<int> counts_;
  int total_ = 0;
};

namespace detail {

/// Unchecked in-place mutation for the enumerator and the chain, which
/// maintain the invariants themselves.
struct PartitionAccess {
  static std::vector<int>& parts(Partition& p) noexcept { return p.parts_; }
  static std::vector<int>& counts(Partition& p) noexcept { return p.counts_; }
  static Partition make_empty(int a0) {
    Partition p;
    p.total_ = a0;
    p.counts_.assign(static_cast<std::size_t>(a0) + 1, 0);
    return p;
  }
};

/// True if the two views agree and conserve mass. Used by debug checks and tests.
bool is_consistent(const Partition& p);

}  // namespace detail

}  // namespace fragpart
