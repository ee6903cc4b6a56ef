#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ringfed {

// One row of a run's trace. `round` counts completed communication rounds
// (0 = initial parameters); the transmission counters are cumulative.
struct MetricsRecord {
    int round = 0;
    double test_accuracy = 0.0;
    double test_loss = 0.0;
    long long uplink_units = 0;
    long long downlink_units = 0;
    long long peer_units = 0;
};

using MetricsLog = std::vector<MetricsRecord>;

// Smallest round index whose accuracy reaches the target; empty if never.
std::optional<int> rounds_to_target(const MetricsLog& log, double target_accuracy);

// rounds_to_target(log) / rounds_to_target(baseline); empty when either side
// never reaches the target. Matching zeros give exactly 1.
std::optional<double> cc_ratio(const MetricsLog& log, const MetricsLog& baseline,
                               double target_accuracy);

struct TailStats {
    double mean = 0.0;
    double stdev = 0.0;  // sample standard deviation; 0 for a single record
};

// Mean/stdev of test accuracy over the final `window` records.
TailStats tail_stats(const MetricsLog& log, int window);

struct Summary {
    double target_accuracy = 0.0;
    std::optional<int> rounds_to_target;
    double max_accuracy = 0.0;
    std::optional<double> cc_ratio;
    int tail_window = 0;
    TailStats tail;
};

Summary summarize(const MetricsLog& log, double target_accuracy, int tail_window,
                  const MetricsLog* baseline = nullptr);

// CSV schema (stable column order):
//   round,test_accuracy,test_loss,uplink_units,downlink_units,peer_units
// with accuracy and loss printed to 6 decimal places.
void emit_csv(const MetricsLog& log, const std::string& path);

// JSON report: records array mirroring the CSV, summary block, and the full
// resolved config (passed as pre-serialized key/value pairs) for provenance.
void emit_json(const MetricsLog& log, const Summary& summary,
               const std::vector<std::pair<std::string, std::string>>& config,
               const std::string& path);

// Parses the records array back out of an emitted JSON report.
MetricsLog parse_json_records(const std::string& path);

}  // namespace ringfed
