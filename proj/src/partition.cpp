#include "ringfed/partition.hpp"

#include "ringfed/errors.hpp"
#include "ringfed/rng.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ringfed {

namespace {

// Tags keep the seed streams of unrelated draws apart.
constexpr std::uint64_t kPermTag = 0x70a9;
constexpr std::uint64_t kDealTag = 0x6d31;
constexpr std::uint64_t kPropTag = 0x91c4;
constexpr std::uint64_t kSamplerTag = 0xe2f7;

std::vector<ClientShard> make_shards(int num_clients, std::uint64_t seed) {
    std::vector<ClientShard> shards(num_clients);
    for (int k = 0; k < num_clients; ++k) {
        shards[k].client_id = k;
        shards[k].sampling_seed = rng::mix({seed, kSamplerTag, static_cast<std::uint64_t>(k)});
    }
    return shards;
}

void check_clients(const Dataset& ds, int num_clients) {
    if (num_clients < 1) throw ConfigError("partition needs at least one client");
    if (static_cast<Index>(num_clients) > ds.size()) {
        std::ostringstream msg;
        msg << "cannot split " << ds.size() << " examples across " << num_clients << " clients";
        throw ConfigError(msg.str());
    }
}

}  // namespace

std::vector<ClientShard> partition_iid(const Dataset& ds, int num_clients, std::uint64_t seed) {
    check_clients(ds, num_clients);
    std::vector<std::int32_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    rng::Prng prng(rng::mix({seed, kPermTag}));
    prng.shuffle(order);

    const Index per_client = ds.size() / num_clients;  // remainder dropped
    auto shards = make_shards(num_clients, seed);
    for (int k = 0; k < num_clients; ++k) {
        shards[k].indices.assign(order.begin() + static_cast<std::ptrdiff_t>(k) * per_client,
                                 order.begin() + static_cast<std::ptrdiff_t>(k + 1) * per_client);
    }
    return shards;
}

std::vector<ClientShard> partition_pathological(const Dataset& ds, int num_clients,
                                                int shards_per_client, std::uint64_t seed) {
    check_clients(ds, num_clients);
    if (shards_per_client < 1) throw ConfigError("shards_per_client must be >= 1");
    const Index total_shards = static_cast<Index>(num_clients) * shards_per_client;
    if (ds.size() % total_shards != 0) {
        std::ostringstream msg;
        msg << "pathological partition: " << num_clients << " clients x " << shards_per_client
            << " shards = " << total_shards << " shards does not divide " << ds.size()
            << " examples";
        throw ConfigError(msg.str());
    }
    const Index shard_size = ds.size() / total_shards;

    // Sort by label, ties broken by original index (stable sort on position).
    std::vector<std::int32_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int32_t a, std::int32_t b) { return ds.labels(a) < ds.labels(b); });

    std::vector<std::int32_t> shard_ids(total_shards);
    std::iota(shard_ids.begin(), shard_ids.end(), 0);
    rng::Prng prng(rng::mix({seed, kDealTag}));
    prng.shuffle(shard_ids);

    auto shards = make_shards(num_clients, seed);
    for (int k = 0; k < num_clients; ++k) {
        auto& dst = shards[k].indices;
        dst.reserve(static_cast<std::size_t>(shards_per_client) * shard_size);
        for (int s = 0; s < shards_per_client; ++s) {
            const Index sid = shard_ids[static_cast<std::size_t>(k) * shards_per_client + s];
            const auto begin = order.begin() + sid * shard_size;
            dst.insert(dst.end(), begin, begin + shard_size);
        }
    }
    return shards;
}

std::vector<ClientShard> partition_dirichlet(const Dataset& ds, int num_clients, double alpha,
                                             std::uint64_t seed) {
    check_clients(ds, num_clients);
    if (!(alpha > 0.0)) throw ConfigError("dirichlet alpha must be > 0");

    // Bucket example indices by class, preserving dataset order.
    std::vector<std::vector<std::int32_t>> by_class(ds.num_classes);
    for (Index i = 0; i < ds.size(); ++i) {
        by_class[ds.labels(i)].push_back(static_cast<std::int32_t>(i));
    }

    auto shards = make_shards(num_clients, seed);
    for (int c = 0; c < ds.num_classes; ++c) {
        auto& pool = by_class[c];
        if (pool.empty()) continue;
        rng::Prng prng(rng::mix({seed, kPropTag, static_cast<std::uint64_t>(c)}));

        // Dir(alpha) over clients: normalized Gamma(alpha) draws.
        Eigen::VectorXd props(num_clients);
        for (int k = 0; k < num_clients; ++k) props(k) = prng.gamma(alpha);
        const double total = props.sum();
        if (total <= 0.0 || !std::isfinite(total)) {
            // All gamma draws underflowed (tiny alpha); give the class to one client.
            props.setZero();
            props(static_cast<Index>(prng.below(num_clients))) = 1.0;
        } else {
            props /= total;
        }

        // Largest-remainder rounding conserves the class total exactly.
        const auto n = static_cast<double>(pool.size());
        std::vector<Index> counts(num_clients);
        std::vector<std::pair<double, int>> remainders(num_clients);
        Index assigned = 0;
        for (int k = 0; k < num_clients; ++k) {
            const double quota = props(k) * n;
            counts[k] = static_cast<Index>(quota);
            assigned += counts[k];
            remainders[k] = {quota - static_cast<double>(counts[k]), k};
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;  // deterministic tie-break
        });
        for (Index left = static_cast<Index>(pool.size()) - assigned, i = 0; left > 0; --left, ++i) {
            ++counts[remainders[static_cast<std::size_t>(i)].second];
        }

        prng.shuffle(pool);
        std::size_t cursor = 0;
        for (int k = 0; k < num_clients; ++k) {
            shards[k].indices.insert(shards[k].indices.end(), pool.begin() + cursor,
                                     pool.begin() + cursor + counts[k]);
            cursor += static_cast<std::size_t>(counts[k]);
        }
    }
    return shards;
}

std::vector<ClientShard> make_partition(const Dataset& ds, const PartitionSpec& spec) {
    switch (spec.scheme) {
        case PartitionScheme::Iid:
            return partition_iid(ds, spec.num_clients, spec.seed);
        case PartitionScheme::PathologicalShards:
            return partition_pathological(ds, spec.num_clients, spec.shards_per_client, spec.seed);
        case PartitionScheme::Dirichlet:
            return partition_dirichlet(ds, spec.num_clients, spec.alpha, spec.seed);
    }
    throw ConfigError("unknown partition scheme");
}

std::string scheme_name(PartitionScheme scheme) {
    switch (scheme) {
        case PartitionScheme::Iid: return "iid";
        case PartitionScheme::PathologicalShards: return "pathological";
        case PartitionScheme::Dirichlet: return "dirichlet";
    }
    return "?";
}

std::vector<std::int32_t> epoch_order(const ClientShard& shard, int round, int epoch) {
    std::vector<std::int32_t> order = shard.indices;
    rng::Prng prng(rng::mix({shard.sampling_seed, static_cast<std::uint64_t>(round),
                             static_cast<std::uint64_t>(epoch)}));
    prng.shuffle(order);
    return order;
}

std::vector<std::pair<Index, Index>> batch_ranges(Index shard_size, int batch_size) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    std::vector<std::pair<Index, Index>> ranges;
    for (Index begin = 0; begin < shard_size; begin += batch_size) {
        ranges.emplace_back(begin, std::min<Index>(begin + batch_size, shard_size));
    }
    return ranges;
}

}  // namespace ringfed
