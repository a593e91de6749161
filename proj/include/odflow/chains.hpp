#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "odflow/graph.hpp"
#include "odflow/ingest.hpp"
#include "odflow/time.hpp"

namespace odflow::chains {

// Uniform interval grid anchored at a midnight epoch. Every log timestamp in
// [epoch, epoch + count·width) maps to exactly one index, and the 15/30/60
// minute grids share interval boundaries because all widths divide a day.
struct IntervalGrid {
    int width_minutes = 15;
    Timestamp epoch = 0;
    std::size_t count = 0;

    static IntervalGrid covering(Timestamp first, Timestamp last, int width_minutes);

    std::int64_t width_seconds() const { return static_cast<std::int64_t>(width_minutes) * 60; }
    std::size_t index_of(Timestamp t) const { return static_cast<std::size_t>((t - epoch) / width_seconds()); }
    Timestamp start_of(std::size_t index) const {
        return epoch + static_cast<Timestamp>(index) * width_seconds();
    }
    int slots_per_day() const { return 1440 / width_minutes; }
    int tod_slot(std::size_t index) const { return static_cast<int>(index % static_cast<std::size_t>(slots_per_day())); }
    int dow(std::size_t index) const { return weekday_of(start_of(index)); }
};

// Sorted, deduplicated building ids; positions are the canonical indices used
// by every aggregate table.
struct BuildingIndex {
    std::vector<std::string> ids;

    static BuildingIndex from_ids(std::vector<std::string> ids);
    static BuildingIndex from_logs(const std::vector<ingest::AnonLogRecord>& logs);

    std::size_t size() const { return ids.size(); }
    std::optional<std::size_t> find(const std::string& id) const;
};

struct TimelineEvent {
    std::string building_id;
    Timestamp ts = 0;
};

struct DeviceTimeline {
    std::string hash_id;
    std::vector<TimelineEvent> events;  // sorted by (ts, building_id)
};

struct TripLeg {
    std::string hash_id;
    std::string origin;
    std::string destination;
    Timestamp depart = 0;
    Timestamp arrive = 0;
};

// One timeline per hash_id, events sorted by (timestamp, building_id),
// timelines sorted by hash_id.
std::vector<DeviceTimeline> build_timelines(const std::vector<ingest::AnonLogRecord>& logs);

// One leg per consecutive event pair with differing buildings and a gap of at
// most max_gap; consecutive same-building events produce nothing.
std::vector<TripLeg> extract_trip_legs(const DeviceTimeline& timeline, std::int64_t max_gap_seconds);
std::vector<TripLeg> extract_all_trip_legs(const std::vector<DeviceTimeline>& timelines,
                                           std::int64_t max_gap_seconds);

// Per-building, per-interval aggregates. Rows are indexed building-major:
// cell (b, t) lives at b * grid.count + t.
struct SnapshotTable {
    IntervalGrid grid;
    BuildingIndex buildings;
    std::vector<std::int32_t> occupancy;
    std::vector<std::int32_t> entries;
    std::vector<std::int32_t> exits;
    std::vector<std::int32_t> orig_count;
    std::vector<std::int32_t> dest_count;
    std::vector<std::int32_t> enrolment;
    bool has_enrolment = false;

    std::size_t cell(std::size_t b, std::size_t t) const { return b * grid.count + t; }
};

struct FlowTable {
    IntervalGrid grid;
    std::size_t n_buildings = 0;
    std::vector<std::int32_t> counts;  // interval-major: (t * B + o) * B + d

    std::int32_t at(std::size_t t, std::size_t o, std::size_t d) const {
        return counts[(t * n_buildings + o) * n_buildings + d];
    }
    std::int32_t& at(std::size_t t, std::size_t o, std::size_t d) {
        return counts[(t * n_buildings + o) * n_buildings + d];
    }
    std::int64_t total_in_interval(std::size_t t) const;
};

// occupancy(b, t) = count of distinct devices with at least one log in b
// during interval t.
std::vector<std::int32_t> compute_occupancy(const std::vector<ingest::AnonLogRecord>& logs,
                                            const IntervalGrid& grid, const BuildingIndex& buildings);

// Per device and calendar day: the first event marks an entry, the last an
// exit, each at its own (building, interval).
void compute_entry_exit(const std::vector<DeviceTimeline>& timelines, const IntervalGrid& grid,
                        const BuildingIndex& buildings, std::vector<std::int32_t>& entries,
                        std::vector<std::int32_t>& exits);

// Each leg lands in the interval containing its departure.
FlowTable aggregate_flows(const std::vector<TripLeg>& legs, const IntervalGrid& grid,
                          const BuildingIndex& buildings);

// Sum of schedule enrolments whose block (one hour from interval_start)
// covers each grid interval.
std::vector<std::int32_t> join_enrolment(const std::vector<ingest::ScheduleRecord>& schedule,
                                         const IntervalGrid& grid, const BuildingIndex& buildings);

struct AggregateOptions {
    int width_minutes = 15;
    std::int64_t max_gap_seconds = 3600;
};

struct Aggregates {
    SnapshotTable snapshots;
    FlowTable flows;
    std::size_t n_legs = 0;
};

// Full per-interval aggregation over one anonymized log set. `building_ids`
// fixes the building universe (silent buildings keep zero rows); pass the ids
// from the AP mapping. Schedule is optional.
Aggregates aggregate_logs(const std::vector<ingest::AnonLogRecord>& logs,
                          const std::vector<std::string>& building_ids,
                          const std::vector<ingest::ScheduleRecord>* schedule, const AggregateOptions& options);

// Node-major regression samples: for target interval t ≥ 1, node (m, n) gets
// the origin/destination aggregates of t−1 plus the time-of-day slot and
// weekday of t−1; the target is flow(m→n, t).
struct FeatureTable {
    IntervalGrid grid;             // the aggregation grid (samples cover t = 1..count−1)
    std::size_t n_nodes = 0;       // V, ordered like OdGraph.nodes
    std::size_t numeric_dim = 0;   // 8, or 10 with enrolment
    bool with_enrolment = false;
    std::vector<double> x;         // (count−1) × V × numeric_dim
    std::vector<std::int32_t> tod;  // per sample interval (t−1 slot)
    std::vector<std::int32_t> dow;
    std::vector<double> y;  // (count−1) × V

    std::size_t sample_intervals() const { return grid.count == 0 ? 0 : grid.count - 1; }
    std::size_t row_count() const { return sample_intervals() * n_nodes; }
    const double* features(std::size_t s, std::size_t node) const {
        return x.data() + (s * n_nodes + node) * numeric_dim;
    }
    static std::vector<std::string> numeric_column_names(bool with_enrolment);
};

FeatureTable build_feature_table(const SnapshotTable& snapshots, const FlowTable& flows,
                                 const graph::OdGraph& graph, bool with_enrolment);

void write_snapshots_csv(const SnapshotTable& snapshots, const std::filesystem::path& path);
// Zero-flow pairs are omitted from the file.
void write_flows_csv(const FlowTable& flows, const BuildingIndex& buildings, const std::filesystem::path& path);
void write_features_csv(const FeatureTable& table, const graph::OdGraph& graph, const std::filesystem::path& path);
FeatureTable load_features_csv(std::istream& in, const graph::OdGraph& graph);

}  // namespace odflow::chains
