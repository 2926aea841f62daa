#include "lossgame/partitions.hpp"

#include <string>

#include "lossgame/errors.hpp"

namespace lossgame {

PartitionEnumerator::PartitionEnumerator(int agent_count) {
  if (agent_count < 1) throw DomainError("need at least one agent to enumerate");
  if (agent_count > kMaxEnumerationAgents) {
    throw SizeLimitError("partition enumeration is limited to " +
                         std::to_string(kMaxEnumerationAgents) + " agents, got " +
                         std::to_string(agent_count));
  }
  rgs_.assign(static_cast<std::size_t>(agent_count), 0);
  prefix_max_.assign(static_cast<std::size_t>(agent_count), 0);
}

bool PartitionEnumerator::next() {
  const std::size_t n = rgs_.size();
  // Rightmost position that may still grow: rgs[i] <= max(rgs[0..i-1]).
  for (std::size_t i = n; i-- > 1;) {
    if (rgs_[i] <= prefix_max_[i - 1]) {
      ++rgs_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], rgs_[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        rgs_[j] = 0;
        prefix_max_[j] = prefix_max_[i];
      }
      return true;
    }
  }
  return false;
}

std::vector<Partition> enumerate_partitions(int agent_count) {
  std::vector<Partition> out;
  for_each_partition(agent_count, [&](Partition p) { out.push_back(std::move(p)); });
  return out;
}

std::vector<Partition> enumerate_partitions_containing(int agent_count, CoalitionSet q) {
  if (q.empty()) throw DomainError("coalition must be non-empty");
  const CoalitionSet everyone = CoalitionSet::all(agent_count);
  if (!q.subset_of(everyone)) throw DomainError("coalition names agents outside the system");
  if (agent_count > kMaxEnumerationAgents) {
    throw SizeLimitError("partition enumeration is limited to " +
                         std::to_string(kMaxEnumerationAgents) + " agents");
  }

  const std::vector<int> outside = (everyone - q).members();
  if (outside.empty()) return {Partition(agent_count, {q})};

  std::vector<Partition> out;
  PartitionEnumerator e(static_cast<int>(outside.size()));
  do {
    std::vector<CoalitionSet> blocks{q};
    for (std::size_t i = 0; i < outside.size(); ++i) {
      const auto label = static_cast<std::size_t>(e.rgs()[i]) + 1;
      if (label == blocks.size()) blocks.emplace_back();
      blocks[label] = blocks[label] | CoalitionSet::singleton(outside[i]);
    }
    out.emplace_back(agent_count, std::move(blocks));
  } while (e.next());
  return out;
}

}  // namespace lossgame
