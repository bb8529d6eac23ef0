#include "fragpart/partition.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <numeric>

#include "fragpart/error.hpp"

namespace fragpart {

Partition Partition::from_parts(std::span<const int> parts) {
  if (parts.empty()) throw InvalidInput("partition needs at least one fragment");
  long total = 0;
  for (int a : parts) {
    if (a < 1) throw InvalidInput("fragment sizes must be >= 1, got " + std::to_string(a));
    total += a;
  }
  if (total > std::numeric_limits<int>::max()) throw InvalidInput("partition mass overflows int");

  Partition p = detail::PartitionAccess::make_empty(static_cast<int>(total));
  p.parts_.assign(parts.begin(), parts.end());
  std::sort(p.parts_.begin(), p.parts_.end(), std::greater<>());
  for (int a : p.parts_) ++p.counts_[static_cast<std::size_t>(a)];
  return p;
}

Partition Partition::single(int a0) {
  const int part[] = {a0};
  return from_parts(part);
}

Partition Partition::all_ones(int a0) {
  if (a0 < 1) throw InvalidInput("a0 must be >= 1");
  std::vector<int> ones(static_cast<std::size_t>(a0), 1);
  return from_parts(ones);
}

Partition Partition::parse(std::string_view text) {
  std::vector<int> parts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
                                 text[pos] == '\r'))
      ++pos;
    if (pos == text.size()) break;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{}) throw InvalidInput("cannot parse partition text: '" + std::string(text) + "'");
    parts.push_back(value);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  return from_parts(parts);
}

std::string Partition::to_string() const {
  std::string out;
  out.reserve(parts_.size() * 3);
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(parts_[i]);
  }
  return out;
}

namespace detail {

bool is_consistent(const Partition& p) {
  const auto& parts = p.parts();
  if (parts.empty() || parts.back() < 1) return false;
  if (!std::is_sorted(parts.begin(), parts.end(), std::greater<>())) return false;
  if (std::accumulate(parts.begin(), parts.end(), 0L) != p.total_mass()) return false;
  const auto& counts = p.counts();
  if (counts.size() != static_cast<std::size_t>(p.total_mass()) + 1) return false;
  long mass = 0, m = 0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    mass += static_cast<long>(a) * counts[a];
    m += counts[a];
  }
  if (counts[0] != 0) return false;
  if (mass != p.total_mass() || m != p.multiplicity()) return false;
  for (int a : parts)
    if (counts[static_cast<std::size_t>(a)] < 1) return false;
  return true;
}

}  // namespace detail

}  // namespace fragpart
