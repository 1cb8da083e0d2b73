#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qgad/data/csv.hpp"
#include "qgad/data/series.hpp"

namespace qgad::data {

// Column-name mapping from the source CSV to the fields we consume.
// Defaults match CIC-IDS2018 processed-flow headers.
struct CsvSchema {
    std::string timestamp = "Timestamp";
    std::string fwd_iat_mean = "Fwd IAT Mean";
    std::string fwd_pkt_len_mean = "Fwd Pkt Len Mean";
    std::string label = "Label";
    std::string benign_label = "Benign";
    std::vector<std::string> time_formats = {
        "%d/%m/%Y %H:%M:%S", "%d/%m/%Y %H:%M", "%m/%d/%Y %H:%M:%S",
        "%m/%d/%Y %H:%M",    "%Y-%m-%d %H:%M:%S",
    };
};

struct FlowRecord {
    double timestamp = 0.0; // seconds
    double fwd_iat_mean = 0.0;
    double fwd_pkt_len_mean = 0.0;
    std::string label;
    bool is_attack = false;
};

struct IngestResult {
    std::vector<FlowRecord> records;
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
};

inline bool iequals(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

// Accepts plain numeric seconds (fixtures) or any of the schema's
// strptime-style formats, interpreted as UTC.
inline bool parse_timestamp(const std::string& raw, const CsvSchema& schema, double& out) {
    if (parse_double(raw, out)) return std::isfinite(out);
    for (const auto& fmt : schema.time_formats) {
        std::tm tm = {};
        std::istringstream ss(raw);
        ss >> std::get_time(&tm, fmt.c_str());
        if (ss.fail()) continue;
        tm.tm_isdst = 0;
        const std::time_t epoch = timegm(&tm);
        if (epoch == static_cast<std::time_t>(-1)) continue;
        out = static_cast<double>(epoch);
        return true;
    }
    return false;
}

// Parses flow records; rows with missing, unparseable, or non-finite values
// are dropped and counted.
inline IngestResult ingest_csv(const std::string& path, const CsvSchema& schema = {}) {
    const CsvTable table = read_csv(path);
    const int c_ts = table.column(schema.timestamp);
    const int c_iat = table.column(schema.fwd_iat_mean);
    const int c_len = table.column(schema.fwd_pkt_len_mean);
    const int c_label = table.column(schema.label);
    for (const auto& [col, name] :
         std::vector<std::pair<int, std::string>>{{c_ts, schema.timestamp},
                                                  {c_iat, schema.fwd_iat_mean},
                                                  {c_len, schema.fwd_pkt_len_mean},
                                                  {c_label, schema.label}}) {
        if (col < 0) throw IoError("input CSV is missing mapped column '" + name + "': " + path);
    }

    IngestResult out;
    const auto max_col = static_cast<std::size_t>(std::max({c_ts, c_iat, c_len, c_label}));
    for (const auto& row : table.rows) {
        ++out.rows_read;
        if (row.size() <= max_col) {
            ++out.rows_dropped;
            continue;
        }
        FlowRecord rec;
        if (!parse_timestamp(row[c_ts], schema, rec.timestamp) ||
            !parse_double(row[c_iat], rec.fwd_iat_mean) ||
            !parse_double(row[c_len], rec.fwd_pkt_len_mean)) {
            ++out.rows_dropped;
            continue;
        }
        if (!std::isfinite(rec.fwd_iat_mean) || !std::isfinite(rec.fwd_pkt_len_mean) ||
            rec.fwd_iat_mean < 0.0 || rec.fwd_pkt_len_mean < 0.0) {
            ++out.rows_dropped;
            continue;
        }
        rec.label = row[c_label];
        rec.is_attack = !iequals(rec.label, schema.benign_label);
        out.records.push_back(std::move(rec));
    }
    if (out.records.empty()) throw IoError("no valid rows after cleaning: " + path);
    return out;
}

struct AggregateResult {
    std::vector<IntervalAggregate> intervals;
    std::size_t filled_buckets = 0;
    long first_second = 0;
};

// Buckets records into contiguous 1-second intervals. Empty seconds carry
// the previous bucket's feature means forward with attack_count 0.
inline AggregateResult aggregate_1s(const std::vector<FlowRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate_1s: no records");

    struct Bucket {
        double sum_a = 0, sum_b = 0;
        long n = 0;
        long attacks = 0;
    };
    std::map<long, Bucket> buckets;
    for (const auto& rec : records) {
        auto& b = buckets[static_cast<long>(std::floor(rec.timestamp))];
        b.sum_a += rec.fwd_iat_mean;
        b.sum_b += rec.fwd_pkt_len_mean;
        b.n += 1;
        b.attacks += rec.is_attack ? 1 : 0;
    }

    AggregateResult out;
    const long first = buckets.begin()->first;
    const long last = buckets.rbegin()->first;
    out.first_second = first;
    out.intervals.reserve(static_cast<std::size_t>(last - first + 1));
    double prev_a = 0, prev_b = 0;
    for (long sec = first; sec <= last; ++sec) {
        IntervalAggregate iv;
        iv.t = sec - first;
        const auto it = buckets.find(sec);
        if (it != buckets.end()) {
            iv.a = it->second.sum_a / static_cast<double>(it->second.n);
            iv.b = it->second.sum_b / static_cast<double>(it->second.n);
            iv.attack_count = it->second.attacks;
        } else {
            iv.a = prev_a;
            iv.b = prev_b;
            iv.attack_count = 0;
            ++out.filled_buckets;
        }
        prev_a = iv.a;
        prev_b = iv.b;
        out.intervals.push_back(iv);
    }
    return out;
}

} // namespace qgad::data
