#pragma once

// Exhaustive set-partition enumeration in restricted-growth-string order.

#include <vector>

#include "lossgame/model.hpp"

namespace lossgame {

inline constexpr int kMaxEnumerationAgents = 12;

/// Single-pass generator over the set partitions of {0..n-1}.
///
///   PartitionEnumerator e(4);
///   do { use(e.partition()); } while (e.next());
class PartitionEnumerator {
 public:
  /// Throws SizeLimitError for n > 12, DomainError for n < 1.
  explicit PartitionEnumerator(int agent_count);

  const std::vector<int>& rgs() const noexcept { return rgs_; }
  Partition partition() const { return Partition::from_rgs(rgs_); }
  /// Advances to the next restricted-growth string; false when exhausted.
  bool next();

 private:
  std::vector<int> rgs_;
  std::vector<int> prefix_max_;  // prefix_max_[i] = max(rgs_[0..i])
};

template <typename Visitor>
void for_each_partition(int agent_count, Visitor&& visit) {
  PartitionEnumerator e(agent_count);
  do {
    visit(e.partition());
  } while (e.next());
}

std::vector<Partition> enumerate_partitions(int agent_count);

/// Every partition of {0..n-1} having `q` as one of its blocks.
std::vector<Partition> enumerate_partitions_containing(int agent_count, CoalitionSet q);

}  // namespace lossgame
