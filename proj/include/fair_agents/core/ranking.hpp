#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "fair_agents/core/types.hpp"

namespace fair_agents {

struct GroundedBallot {
  Ballot ballot;
  std::size_t violations = 0;
};

// Drops ids that are not in the catalog and repeated ids (first occurrence
// wins). Each dropped entry counts as one violation. Throws
// EmptyAfterGrounding when nothing survives and InvalidArgument on an empty
// catalog.
GroundedBallot validate_ballot(const Ballot& ballot, const Catalog& catalog);

struct KendallTau {
  std::int64_t discordant = 0;
  double normalized = 0.0;
};

// Kendall tau distance between two permutations of the same pool. Throws
// PoolMismatch otherwise.
KendallTau kendall_tau(std::span<const ItemId> a, std::span<const ItemId> b);

// Union of all ranked ids, sorted by id. Throws NoCandidates if every ballot
// is empty (or there are none).
Ranking candidate_pool(std::span<const Ballot> ballots);

// Keeps the entries of `ranking` that appear in `pool`, preserving order.
Ranking restrict_to(std::span<const ItemId> ranking, std::span<const ItemId> pool);

}  // namespace fair_agents
