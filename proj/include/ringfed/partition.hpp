#pragma once

#include "ringfed/dataset.hpp"
#include "ringfed/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ringfed {

// One client's slice of the parent dataset. Indices are unique within a
// shard; across a partition they are pairwise disjoint and cover the
// partitioned index set. sampling_seed drives this client's epoch shuffles.
struct ClientShard {
    int client_id = 0;
    std::vector<std::int32_t> indices;
    std::uint64_t sampling_seed = 0;

    Index size() const { return static_cast<Index>(indices.size()); }
};

enum class PartitionScheme { Iid, PathologicalShards, Dirichlet };

struct PartitionSpec {
    PartitionScheme scheme = PartitionScheme::Iid;
    int num_clients = 100;
    int shards_per_client = 2;  // pathological only
    double alpha = 0.5;         // dirichlet only, > 0
    std::uint64_t seed = 1;
};

// Random permutation split into num_clients equal blocks; any remainder
// N mod num_clients is dropped after the permutation.
std::vector<ClientShard> partition_iid(const Dataset& ds, int num_clients, std::uint64_t seed);

// Label-sorted indices (ties by original index) cut into
// num_clients*shards_per_client equal consecutive shards, dealt to clients
// by a seeded shard permutation.
std::vector<ClientShard> partition_pathological(const Dataset& ds, int num_clients,
                                                int shards_per_client, std::uint64_t seed);

// Per class, a proportion vector over clients is drawn from Dir(alpha) and
// the class's examples are allocated by largest-remainder rounding. Shard
// sizes are unequal; empty shards are possible at small alpha.
std::vector<ClientShard> partition_dirichlet(const Dataset& ds, int num_clients, double alpha,
                                             std::uint64_t seed);

std::vector<ClientShard> make_partition(const Dataset& ds, const PartitionSpec& spec);

std::string scheme_name(PartitionScheme scheme);

// Deterministic per-epoch reshuffle of a shard's indices. Epochs inside a
// round are numbered flat (period*E + e), so a P-period schedule and a
// single stretch of P*E epochs see identical batch streams.
std::vector<std::int32_t> epoch_order(const ClientShard& shard, int round, int epoch);

// Consecutive [begin,end) slices of an epoch order; the final short batch
// is included.
std::vector<std::pair<Index, Index>> batch_ranges(Index shard_size, int batch_size);

}  // namespace ringfed
