#include "ringfed/metrics.hpp"

#include "ringfed/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ringfed {

using nlohmann::json;

std::optional<int> rounds_to_target(const MetricsLog& log, double target_accuracy) {
    for (const MetricsRecord& rec : log) {
        if (rec.test_accuracy >= target_accuracy) return rec.round;
    }
    return std::nullopt;
}

std::optional<double> cc_ratio(const MetricsLog& log, const MetricsLog& baseline,
                               double target_accuracy) {
    const auto own = rounds_to_target(log, target_accuracy);
    const auto base = rounds_to_target(baseline, target_accuracy);
    if (!own || !base) return std::nullopt;
    if (*base == 0) return *own == 0 ? std::optional<double>(1.0) : std::nullopt;
    return static_cast<double>(*own) / static_cast<double>(*base);
}

TailStats tail_stats(const MetricsLog& log, int window) {
    if (window < 1) throw InternalError("tail_stats window must be >= 1");
    if (static_cast<int>(log.size()) < window) {
        throw InternalError("tail_stats: log has " + std::to_string(log.size()) +
                            " records, window needs " + std::to_string(window));
    }
    const std::size_t begin = log.size() - static_cast<std::size_t>(window);
    double mean = 0.0;
    for (std::size_t i = begin; i < log.size(); ++i) mean += log[i].test_accuracy;
    mean /= window;

    double ss = 0.0;
    for (std::size_t i = begin; i < log.size(); ++i) {
        const double d = log[i].test_accuracy - mean;
        ss += d * d;
    }
    const double stdev = window > 1 ? std::sqrt(ss / (window - 1)) : 0.0;
    return TailStats{mean, stdev};
}

Summary summarize(const MetricsLog& log, double target_accuracy, int tail_window,
                  const MetricsLog* baseline) {
    Summary s;
    s.target_accuracy = target_accuracy;
    s.rounds_to_target = rounds_to_target(log, target_accuracy);
    for (const MetricsRecord& rec : log) s.max_accuracy = std::max(s.max_accuracy, rec.test_accuracy);
    if (baseline != nullptr) s.cc_ratio = cc_ratio(log, *baseline, target_accuracy);
    s.tail_window = std::min<int>(tail_window, static_cast<int>(log.size()));
    if (s.tail_window >= 1) s.tail = tail_stats(log, s.tail_window);
    return s;
}

void emit_csv(const MetricsLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InternalError("cannot open " + path + " for writing");
    out << "round,test_accuracy,test_loss,uplink_units,downlink_units,peer_units\n";
    char line[160];
    for (const MetricsRecord& rec : log) {
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%lld,%lld,%lld\n", rec.round,
                      rec.test_accuracy, rec.test_loss, rec.uplink_units, rec.downlink_units,
                      rec.peer_units);
        out << line;
    }
    if (!out) throw InternalError("write failed for " + path);
}

namespace {

json record_to_json(const MetricsRecord& rec) {
    return json{{"round", rec.round},
                {"test_accuracy", rec.test_accuracy},
                {"test_loss", rec.test_loss},
                {"uplink_units", rec.uplink_units},
                {"downlink_units", rec.downlink_units},
                {"peer_units", rec.peer_units}};
}

}  // namespace

void emit_json(const MetricsLog& log, const Summary& summary,
               const std::vector<std::pair<std::string, std::string>>& config,
               const std::string& path) {
    json doc;
    json cfg = json::object();
    for (const auto& [key, value] : config) cfg[key] = value;
    doc["config"] = std::move(cfg);

    json records = json::array();
    for (const MetricsRecord& rec : log) records.push_back(record_to_json(rec));
    doc["records"] = std::move(records);

    json s;
    s["target_accuracy"] = summary.target_accuracy;
    s["rounds_to_target"] =
        summary.rounds_to_target ? json(*summary.rounds_to_target) : json(nullptr);
    s["max_accuracy"] = summary.max_accuracy;
    s["cc_ratio"] = summary.cc_ratio ? json(*summary.cc_ratio) : json(nullptr);
    s["tail_window"] = summary.tail_window;
    s["tail_mean"] = summary.tail.mean;
    s["tail_stdev"] = summary.tail.stdev;
    doc["summary"] = std::move(s);

    std::ofstream out(path);
    if (!out) throw InternalError("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw InternalError("write failed for " + path);
}

MetricsLog parse_json_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InternalError("cannot open " + path);
    json doc = json::parse(in);
    MetricsLog log;
    for (const json& r : doc.at("records")) {
        MetricsRecord rec;
        rec.round = r.at("round").get<int>();
        rec.test_accuracy = r.at("test_accuracy").get<double>();
        rec.test_loss = r.at("test_loss").get<double>();
        rec.uplink_units = r.at("uplink_units").get<long long>();
        rec.downlink_units = r.at("downlink_units").get<long long>();
        rec.peer_units = r.at("peer_units").get<long long>();
        log.push_back(rec);
    }
    return log;
}

}  // namespace ringfed
