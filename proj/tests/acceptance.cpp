// Acceptance suite: runs every criterion end to end and prints one
// pass/fail line per criterion. Exit code = number of failed criteria.
//
// The heavy desk-scale criteria (6 and 7) share one deterministic synthetic
// corpus: 60,000/10,000 balanced 28x28 10-class images, MLP(784,64,10),
// 20 clients, 30% selected, pathological shards, E=5, and the tuned grid
// point lr=5e-3 / momentum=0.9 / decay=0.99.

#include "ringfed/aggregation.hpp"
#include "ringfed/metrics.hpp"
#include "ringfed/model.hpp"
#include "ringfed/orchestrator.hpp"
#include "ringfed/partition.hpp"
#include "ringfed/rng.hpp"
#include "ringfed/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace ringfed;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
    int failures = 0;

    void report(int number, const std::string& label, bool pass, double seconds,
                const std::string& detail) {
        std::printf("[%s] criterion %d: %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", number,
                    label.c_str(), seconds, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

double median3(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

constexpr double kNever = std::numeric_limits<double>::infinity();

double rnd_or_never(const MetricsLog& log, double target) {
    const auto rnd = rounds_to_target(log, target);
    return rnd ? static_cast<double>(*rnd) : kNever;
}

bool same_accuracy_trace(const MetricsLog& a, const MetricsLog& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].test_accuracy != b[i].test_accuracy) return false;
        if (a[i].test_loss != b[i].test_loss) return false;
    }
    return true;
}

Dataset labels_only_dataset(int n, int classes) {
    Dataset ds;
    ds.features = FeatureMatrix::Zero(n, 2);
    ds.labels.resize(n);
    for (int i = 0; i < n; ++i) ds.labels(i) = i % classes;
    ds.num_classes = classes;
    return ds;
}

bool disjoint_union_exact(const std::vector<ClientShard>& shards, Index n) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    Index total = 0;
    for (const ClientShard& shard : shards) {
        for (const std::int32_t idx : shard.indices) {
            if (idx < 0 || idx >= n) return false;
            if (seen[static_cast<std::size_t>(idx)]) return false;
            seen[static_cast<std::size_t>(idx)] = true;
            ++total;
        }
    }
    return total == n;
}

// ---- criterion 1 -----------------------------------------------------

void criterion_equivalence(Harness& h) {
    const auto t0 = Clock::now();

    SynthSpec spec;
    spec.train_count = 400;
    spec.test_count = 200;
    spec.classes = 2;
    spec.rows = 4;
    spec.cols = 4;
    spec.seed = 11;
    const SynthCorpus corpus = make_synth(spec);

    RunConfig base;
    base.model = ArchKind::LogisticRegression;
    base.total_clients = 10;
    base.select_frac = 0.5;
    base.rounds = 5;
    base.partition = PartitionScheme::Iid;
    base.lr = 0.05;
    base.momentum = 0.9;
    base.lr_decay = 0.99;
    base.batch_size = 10;
    base.seed = 5;

    bool pass = true;
    std::ostringstream detail;

    // RingFed(gamma=0, P in {2,3}) == FedAvg with E' = P*E.
    for (const int periods : {2, 3}) {
        RunConfig ring = base;
        ring.algorithm = Algorithm::RingFed;
        ring.gamma = 0.0;
        ring.periods = periods;
        ring.epochs = 2;
        RunConfig fed = base;
        fed.algorithm = Algorithm::FedAvg;
        fed.epochs = periods * 2;
        const bool ok = same_accuracy_trace(run_experiment(ring, corpus.train, corpus.test),
                                            run_experiment(fed, corpus.train, corpus.test));
        detail << "gamma0_P" << periods << "=" << (ok ? "bitwise" : "DIFFERS") << " ";
        pass = pass && ok;
    }

    // RingFed(P=1) == FedAvg with the same E, any gamma.
    {
        RunConfig ring = base;
        ring.algorithm = Algorithm::RingFed;
        ring.gamma = 0.8;
        ring.periods = 1;
        ring.epochs = 3;
        RunConfig fed = base;
        fed.algorithm = Algorithm::FedAvg;
        fed.epochs = 3;
        const bool ok = same_accuracy_trace(run_experiment(ring, corpus.train, corpus.test),
                                            run_experiment(fed, corpus.train, corpus.test));
        detail << "P1=" << (ok ? "bitwise" : "DIFFERS");
        pass = pass && ok;
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    h.report(1, "RingFed(gamma=0) and RingFed(P=1) reduce to FedAvg", pass && secs < 10.0, secs,
             detail.str());
}

// ---- criterion 2 -----------------------------------------------------

void criterion_ring_properties(Harness& h) {
    const auto t0 = Clock::now();
    rng::Prng prng(202);

    const int rings = 100, ring_size = 10, dim = 32;  // 1,000 vectors total
    bool mass_ok = true, identity_ok = true, rotation_ok = true;
    double worst_rel = 0.0;

    for (int r = 0; r < rings; ++r) {
        std::vector<ParamVector> old(ring_size);
        ParamVector sum = ParamVector::Zero(dim);
        for (auto& p : old) {
            p.resize(dim);
            for (int i = 0; i < dim; ++i) p(i) = prng.uniform();
            sum += p;
        }
        for (int g = 0; g <= 10; ++g) {
            const double gamma = g / 10.0;
            const auto next = ring_exchange(old, gamma);
            ParamVector new_sum = ParamVector::Zero(dim);
            for (const auto& p : next) new_sum += p;
            for (int i = 0; i < dim; ++i) {
                const double rel = std::abs(new_sum(i) - sum(i)) / std::abs(sum(i));
                worst_rel = std::max(worst_rel, rel);
                if (rel > 1e-12) mass_ok = false;
            }
            if (g == 0) {
                for (int k = 0; k < ring_size; ++k) identity_ok &= next[k] == old[k];
            }
            if (g == 10) {
                for (int k = 0; k < ring_size; ++k) {
                    rotation_ok &= next[k] == old[(k + ring_size - 1) % ring_size];
                }
            }
        }
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::ostringstream detail;
    detail << "max_rel_mass_err=" << worst_rel << " identity=" << (identity_ok ? "bitwise" : "NO")
           << " rotation=" << (rotation_ok ? "bitwise" : "NO");
    h.report(2, "ring exchange conserves mass; gamma=0 identity, gamma=1 rotation",
             mass_ok && identity_ok && rotation_ok && secs < 5.0, secs, detail.str());
}

// ---- criterion 3 -----------------------------------------------------

void criterion_gradient_checks(Harness& h) {
    const auto t0 = Clock::now();
    rng::Prng prng(303);
    double worst = 0.0;

    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(prng.below(7));
        const int classes = 2 + static_cast<int>(prng.below(4));
        const int hidden = 2 + static_cast<int>(prng.below(5));
        const Model model = (trial % 2 == 0) ? Model::logistic(d, classes)
                                             : Model::mlp(d, hidden, classes);
        const ParamVector params = init_params(model, 7000 + trial);

        const int batch = 1 + static_cast<int>(prng.below(8));
        FeatureMatrix X(batch, d);
        LabelVector y(batch);
        for (int i = 0; i < batch; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = prng.uniform();
            y(i) = static_cast<int>(prng.below(classes));
        }

        const ParamVector grad = backward(model, params, X, y);
        ParamVector probe = params;
        for (Index i = 0; i < params.size(); ++i) {
            const double step = 1e-5;
            probe(i) = params(i) + step;
            const double up = forward_loss(model, probe, X, y).loss;
            probe(i) = params(i) - step;
            const double down = forward_loss(model, probe, X, y).loss;
            probe(i) = params(i);
            const double fd = (up - down) / (2.0 * step);
            const double scale = std::max({std::abs(grad(i)), std::abs(fd), 1e-8});
            worst = std::max(worst, std::abs(grad(i) - fd) / scale);
        }
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::ostringstream detail;
    detail << "max_rel_err=" << worst << " over 50 instances";
    h.report(3, "backward matches central finite differences (<1e-4)",
             worst < 1e-4 && secs < 30.0, secs, detail.str());
}

// ---- criterion 4 -----------------------------------------------------

void criterion_partitions(Harness& h, const Dataset& big_train) {
    const auto t0 = Clock::now();
    bool pass = true;
    std::ostringstream detail;

    // Pathological: 100 clients x 2 shards over 60,000 -> 200 shards x 300.
    {
        const auto shards = partition_pathological(big_train, 100, 2, 404);
        bool sizes_ok = shards.size() == 100;
        bool labels_ok = true;
        for (const ClientShard& shard : shards) {
            sizes_ok &= shard.size() == 600;
            std::set<int> labels;
            for (const std::int32_t idx : shard.indices) labels.insert(big_train.labels(idx));
            labels_ok &= labels.size() <= 2;
        }
        const bool exact = disjoint_union_exact(shards, big_train.size());
        detail << "pathological[600/client=" << (sizes_ok ? "yes" : "NO")
               << ",<=2labels=" << (labels_ok ? "yes" : "NO")
               << ",union=" << (exact ? "exact" : "NO") << "] ";
        pass = pass && sizes_ok && labels_ok && exact;
    }

    // Dirichlet(0.001): average per-class max-client share over 100 seeds.
    {
        const Dataset small = labels_only_dataset(3000, 10);
        const int clients = 10;
        double share_sum = 0.0;
        int draws = 0;
        bool unions_ok = true;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto shards = partition_dirichlet(small, clients, 0.001, seed);
            unions_ok &= disjoint_union_exact(shards, small.size());
            for (int c = 0; c < 10; ++c) {
                int max_count = 0, class_total = 0;
                for (const ClientShard& shard : shards) {
                    int count = 0;
                    for (const std::int32_t idx : shard.indices) {
                        if (small.labels(idx) == c) ++count;
                    }
                    max_count = std::max(max_count, count);
                    class_total += count;
                }
                share_sum += static_cast<double>(max_count) / class_total;
                ++draws;
            }
        }
        const double mean_share = share_sum / draws;
        detail << "dirichlet[mean_max_share=" << mean_share
               << ",unions=" << (unions_ok ? "exact" : "NO") << "] ";
        pass = pass && mean_share > 0.99 && unions_ok;
    }

    // IID exactness on a divisible split.
    {
        const Dataset ds = labels_only_dataset(10000, 10);
        pass = pass && disjoint_union_exact(partition_iid(ds, 8, 1), ds.size());
        pass = pass && disjoint_union_exact(partition_pathological(ds, 10, 2, 2), ds.size());
        detail << "iid_union=exact";
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    h.report(4, "partition suite (pathological 200x300, Dirichlet sharpness, exactness)",
             pass && secs < 60.0, secs, detail.str());
}

// ---- criterion 5 -----------------------------------------------------

void criterion_metric_arithmetic(Harness& h) {
    const auto t0 = Clock::now();

    auto log_reaching = [](int at_round) {
        MetricsLog log;
        for (int r = 0; r <= 100; ++r) {
            MetricsRecord rec;
            rec.round = r;
            rec.test_accuracy = r >= at_round ? 0.91 : 0.50;
            log.push_back(rec);
        }
        return log;
    };
    auto rounded2 = [](double v) { return std::round(v * 100.0) / 100.0; };

    bool pass = true;
    std::ostringstream detail;
    const struct {
        int rnd, baseline;
        double want;
    } cases[] = {{82, 48, 1.71}, {8, 38, 0.21}, {29, 48, 0.60}};
    for (const auto& c : cases) {
        const auto ratio = cc_ratio(log_reaching(c.rnd), log_reaching(c.baseline), 0.90);
        const bool ok = ratio && rounded2(*ratio) == c.want;
        detail << "(" << c.rnd << "," << c.baseline << ")->" << (ratio ? rounded2(*ratio) : -1)
               << (ok ? " " : "(WANT " + std::to_string(c.want) + ") ");
        pass = pass && ok;
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    h.report(5, "C.C. ratios reproduce the reference RND arithmetic", pass && secs < 1.0, secs,
             detail.str());
}

// ---- criteria 6 and 7 ------------------------------------------------

RunConfig desk_scale_config() {
    RunConfig cfg;
    cfg.model = ArchKind::Mlp;
    cfg.hidden_dim = 64;
    cfg.total_clients = 20;
    cfg.select_frac = 0.3;
    cfg.rounds = 40;
    cfg.epochs = 5;
    cfg.partition = PartitionScheme::PathologicalShards;
    cfg.shards_per_client = 2;
    cfg.lr = 5e-3;  // tuned over the lr/momentum/decay grid
    cfg.momentum = 0.9;
    cfg.lr_decay = 0.99;
    cfg.batch_size = 50;
    cfg.target_accuracy = 0.90;
    return cfg;
}

void criterion_desk_scale(Harness& h, const Dataset& train6000, const Dataset& test) {
    const auto t0 = Clock::now();

    std::vector<double> fed_rnd, ring_rnd, fed_sd, ring_sd;
    for (const std::uint64_t seed : {1, 2, 3}) {
        RunConfig fed = desk_scale_config();
        fed.algorithm = Algorithm::FedAvg;
        fed.seed = seed;
        const MetricsLog fed_log = run_experiment(fed, train6000, test);
        fed_rnd.push_back(rnd_or_never(fed_log, 0.90));
        fed_sd.push_back(tail_stats(fed_log, 20).stdev);

        RunConfig ring = desk_scale_config();
        ring.algorithm = Algorithm::RingFed;
        ring.periods = 6;  // five exchanges per round
        ring.gamma = 0.8;
        ring.seed = seed;
        const MetricsLog ring_log = run_experiment(ring, train6000, test);
        ring_rnd.push_back(rnd_or_never(ring_log, 0.90));
        ring_sd.push_back(tail_stats(ring_log, 20).stdev);
    }

    const double fed_median = median3(fed_rnd);
    const double ring_median = median3(ring_rnd);
    const double fed_sd_median = median3(fed_sd);
    const double ring_sd_median = median3(ring_sd);
    const bool faster = ring_median < fed_median;
    const bool smoother = ring_sd_median < fed_sd_median;

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::ostringstream detail;
    detail << "median rnd90 ringfed=" << ring_median << " vs fedavg=" << fed_median
           << "; median tail_sd ringfed=" << ring_sd_median << " vs fedavg=" << fed_sd_median;
    h.report(6, "desk scale: RingFed-5 reaches 90% sooner and with a calmer tail",
             faster && smoother && secs < 900.0, secs, detail.str());
}

void criterion_gamma_trend(Harness& h, const Dataset& train6000, const Dataset& test) {
    const auto t0 = Clock::now();

    std::ostringstream detail;
    double best_high = 0.0, best_low = 0.0;
    for (const double gamma : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        std::vector<double> tails;
        for (const std::uint64_t seed : {1, 2, 3}) {
            RunConfig ring = desk_scale_config();
            ring.algorithm = Algorithm::RingFed;
            ring.periods = 6;
            ring.gamma = gamma;
            ring.seed = seed;
            const MetricsLog log = run_experiment(ring, train6000, test);
            tails.push_back(tail_stats(log, 20).mean);
        }
        const double median_tail = median3(tails);
        detail << "g" << gamma << "=" << median_tail << " ";
        if (gamma >= 0.5) {
            best_high = std::max(best_high, median_tail);
        } else {
            best_low = std::max(best_low, median_tail);
        }
    }

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    detail << "| best(g>=0.5)=" << best_high << " > best(g<0.5)=" << best_low;
    h.report(7, "gamma trend: the best tail mean needs gamma >= 0.5",
             best_high > best_low && secs < 2700.0, secs, detail.str());
}

// ---- criterion 8 -----------------------------------------------------

void criterion_ledger(Harness& h) {
    const auto t0 = Clock::now();

    SynthSpec spec;
    spec.train_count = 240;
    spec.test_count = 40;
    spec.classes = 2;
    spec.rows = 3;
    spec.cols = 3;
    spec.seed = 88;
    const SynthCorpus corpus = make_synth(spec);

    rng::Prng prng(808);
    bool pass = true;
    std::ostringstream detail;
    for (int trial = 0; trial < 20; ++trial) {
        RunConfig cfg;
        cfg.model = ArchKind::LogisticRegression;
        cfg.total_clients = 4 + static_cast<int>(prng.below(21));  // 4..24
        cfg.select_frac = 0.5 + 0.5 * prng.uniform();              // K >= 2
        cfg.rounds = 1 + static_cast<int>(prng.below(4));
        cfg.epochs = 1 + static_cast<int>(prng.below(2));
        cfg.periods = 1 + static_cast<int>(prng.below(4));
        cfg.gamma = prng.uniform();
        cfg.partition = PartitionScheme::Iid;
        cfg.batch_size = 32;
        cfg.lr = 0.01;
        cfg.momentum = 0.0;
        cfg.lr_decay = 1.0;
        cfg.seed = prng.next_u64();
        const Algorithm algorithms[] = {Algorithm::FedAvg, Algorithm::RingFed,
                                        Algorithm::FedProx, Algorithm::Scaffold};
        cfg.algorithm = algorithms[prng.below(4)];

        const MetricsLog log = run_experiment(cfg, corpus.train, corpus.test);
        const long long T = cfg.rounds;
        const long long K = cfg.selected_count();
        const long long expected_peer =
            cfg.algorithm == Algorithm::RingFed ? T * K * (cfg.periods - 1) : 0;
        const bool ok = log.back().uplink_units == T * K &&
                        log.back().downlink_units == T * cfg.total_clients &&
                        log.back().peer_units == expected_peer;
        if (!ok) {
            detail << "trial" << trial << "(" << algorithm_name(cfg.algorithm) << " T=" << T
                   << " K=" << K << " P=" << cfg.periods << ") got up=" << log.back().uplink_units
                   << " down=" << log.back().downlink_units << " peer=" << log.back().peer_units
                   << "; ";
            pass = false;
        }
    }
    if (pass) detail << "20/20 configs exact";

    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    h.report(8, "ledger: uplink=T*K, downlink=T*total, peer=T*K*(P-1)", pass && secs < 10.0, secs,
             detail.str());
}

}  // namespace

int main() {
    std::cout << "building the shared 60k/10k synthetic corpus...\n";
    const auto t0 = Clock::now();
    SynthSpec big;
    big.seed = 7;
    big.contrast = 0.38;
    big.wobble = 0.40;
    big.noise = 0.20;
    const SynthCorpus corpus = make_synth(big);
    const Dataset train6000 = corpus.train.head(6000);
    std::cout << "corpus ready (" << std::chrono::duration<double>(Clock::now() - t0).count()
              << "s)\n";

    Harness h;
    criterion_equivalence(h);
    criterion_ring_properties(h);
    criterion_gradient_checks(h);
    criterion_partitions(h, corpus.train);
    criterion_metric_arithmetic(h);
    criterion_desk_scale(h, train6000, corpus.test);
    criterion_gamma_trend(h, train6000, corpus.test);
    criterion_ledger(h);

    if (h.failures == 0) {
        std::cout << "acceptance: all criteria passed\n";
    } else {
        std::cout << "acceptance: " << h.failures << " criterion(s) failed\n";
    }
    return h.failures;
}
