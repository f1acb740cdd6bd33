#include "fair_agents/core/ranking.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "fair_agents/core/errors.hpp"

namespace fair_agents {

GroundedBallot validate_ballot(const Ballot& ballot, const Catalog& catalog) {
  if (catalog.empty()) throw InvalidArgument("validate_ballot: catalog is empty");

  GroundedBallot out;
  out.ballot = ballot;
  out.ballot.ranking.clear();
  std::set<std::string_view> seen;
  for (const auto& id : ballot.ranking) {
    if (!catalog.contains(id) || !seen.insert(id).second) {
      ++out.violations;
      continue;
    }
    out.ballot.ranking.push_back(id);
  }
  if (out.ballot.ranking.empty()) throw EmptyAfterGrounding(out.violations);
  return out;
}

namespace {

// Counts inversions of `seq` with a bottom-up merge sort.
std::int64_t count_inversions(std::vector<std::size_t> seq) {
  std::int64_t inversions = 0;
  std::vector<std::size_t> buf(seq.size());
  for (std::size_t width = 1; width < seq.size(); width *= 2) {
    for (std::size_t lo = 0; lo < seq.size(); lo += 2 * width) {
      std::size_t mid = std::min(lo + width, seq.size());
      std::size_t hi = std::min(lo + 2 * width, seq.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (seq[j] < seq[i]) {
          inversions += static_cast<std::int64_t>(mid - i);
          buf[k++] = seq[j++];
        } else {
          buf[k++] = seq[i++];
        }
      }
      while (i < mid) buf[k++] = seq[i++];
      while (j < hi) buf[k++] = seq[j++];
    }
    seq.swap(buf);
  }
  return inversions;
}

}  // namespace

KendallTau kendall_tau(std::span<const ItemId> a, std::span<const ItemId> b) {
  if (a.size() != b.size() || a.empty()) {
    throw PoolMismatch("kendall_tau: rankings differ in length or are empty");
  }
  std::unordered_map<std::string_view, std::size_t> position;
  position.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!position.emplace(a[i], i).second) {
      throw PoolMismatch("kendall_tau: '" + a[i] + "' repeated");
    }
  }
  std::vector<std::size_t> seq;
  seq.reserve(b.size());
  std::vector<bool> used(a.size(), false);
  for (const auto& id : b) {
    auto it = position.find(id);
    if (it == position.end() || used[it->second]) {
      throw PoolMismatch("kendall_tau: '" + id + "' not matched in the other ranking");
    }
    used[it->second] = true;
    seq.push_back(it->second);
  }

  KendallTau out;
  out.discordant = count_inversions(std::move(seq));
  const auto m = static_cast<double>(a.size());
  out.normalized = a.size() < 2 ? 0.0 : static_cast<double>(out.discordant) / (m * (m - 1) / 2);
  return out;
}

Ranking candidate_pool(std::span<const Ballot> ballots) {
  std::set<ItemId> pool;
  for (const auto& b : ballots) pool.insert(b.ranking.begin(), b.ranking.end());
  if (pool.empty()) throw NoCandidates();
  return {pool.begin(), pool.end()};
}

Ranking restrict_to(std::span<const ItemId> ranking, std::span<const ItemId> pool) {
  std::set<std::string_view> keep(pool.begin(), pool.end());
  Ranking out;
  for (const auto& id : ranking) {
    if (keep.contains(id)) out.push_back(id);
  }
  return out;
}

}  // namespace fair_agents
