#include "odflow/chains.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "odflow/common.hpp"
#include "odflow/csv.hpp"

namespace odflow::chains {

IntervalGrid IntervalGrid::covering(Timestamp first, Timestamp last, int width_minutes) {
    if (1440 % width_minutes != 0) throw ValidationError("interval width must divide a day");
    if (last < first) throw std::invalid_argument("IntervalGrid::covering: last < first");
    IntervalGrid grid;
    grid.width_minutes = width_minutes;
    grid.epoch = midnight_of(first);
    grid.count = static_cast<std::size_t>((last - grid.epoch) / grid.width_seconds()) + 1;
    return grid;
}

std::int64_t FlowTable::total_in_interval(std::size_t t) const {
    std::int64_t sum = 0;
    const std::size_t base = t * n_buildings * n_buildings;
    for (std::size_t k = 0; k < n_buildings * n_buildings; ++k) sum += counts[base + k];
    return sum;
}

BuildingIndex BuildingIndex::from_ids(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return BuildingIndex{std::move(ids)};
}

BuildingIndex BuildingIndex::from_logs(const std::vector<ingest::AnonLogRecord>& logs) {
    std::vector<std::string> ids;
    ids.reserve(64);
    for (const auto& r : logs) ids.push_back(r.building_id);
    return from_ids(std::move(ids));
}

std::optional<std::size_t> BuildingIndex::find(const std::string& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
}

std::vector<DeviceTimeline> build_timelines(const std::vector<ingest::AnonLogRecord>& logs) {
    std::unordered_map<std::string, std::size_t> slot;
    std::vector<DeviceTimeline> timelines;
    for (const auto& r : logs) {
        auto [it, inserted] = slot.emplace(r.hash_id, timelines.size());
        if (inserted) timelines.push_back(DeviceTimeline{r.hash_id, {}});
        timelines[it->second].events.push_back(TimelineEvent{r.building_id, r.log_date});
    }
    for (auto& t : timelines) {
        std::stable_sort(t.events.begin(), t.events.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
            if (a.ts != b.ts) return a.ts < b.ts;
            return a.building_id < b.building_id;
        });
    }
    std::sort(timelines.begin(), timelines.end(),
              [](const DeviceTimeline& a, const DeviceTimeline& b) { return a.hash_id < b.hash_id; });
    return timelines;
}

std::vector<TripLeg> extract_trip_legs(const DeviceTimeline& timeline, std::int64_t max_gap_seconds) {
    std::vector<TripLeg> legs;
    for (std::size_t i = 1; i < timeline.events.size(); ++i) {
        const TimelineEvent& prev = timeline.events[i - 1];
        const TimelineEvent& next = timeline.events[i];
        if (prev.building_id == next.building_id) continue;
        if (next.ts - prev.ts > max_gap_seconds) continue;
        legs.push_back(TripLeg{timeline.hash_id, prev.building_id, next.building_id, prev.ts, next.ts});
    }
    return legs;
}

std::vector<TripLeg> extract_all_trip_legs(const std::vector<DeviceTimeline>& timelines,
                                           std::int64_t max_gap_seconds) {
    std::vector<TripLeg> all;
    for (const auto& t : timelines) {
        auto legs = extract_trip_legs(t, max_gap_seconds);
        all.insert(all.end(), std::make_move_iterator(legs.begin()), std::make_move_iterator(legs.end()));
    }
    return all;
}

std::vector<std::int32_t> compute_occupancy(const std::vector<ingest::AnonLogRecord>& logs,
                                            const IntervalGrid& grid, const BuildingIndex& buildings) {
    // Unique devices per (building, interval): tag logs with a dense device
    // id, then sort/unique the (cell, device) pairs.
    std::unordered_map<std::string, std::uint32_t> device_ids;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> seen;
    seen.reserve(logs.size());
    for (const auto& r : logs) {
        auto b = buildings.find(r.building_id);
        if (!b) continue;
        auto [it, inserted] = device_ids.emplace(r.hash_id, static_cast<std::uint32_t>(device_ids.size()));
        const std::size_t t = grid.index_of(r.log_date);
        seen.emplace_back(static_cast<std::uint64_t>(*b) * grid.count + t, it->second);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    std::vector<std::int32_t> occupancy(buildings.size() * grid.count, 0);
    for (const auto& [cell, device] : seen) ++occupancy[cell];
    return occupancy;
}

void compute_entry_exit(const std::vector<DeviceTimeline>& timelines, const IntervalGrid& grid,
                        const BuildingIndex& buildings, std::vector<std::int32_t>& entries,
                        std::vector<std::int32_t>& exits) {
    entries.assign(buildings.size() * grid.count, 0);
    exits.assign(buildings.size() * grid.count, 0);
    auto bump = [&](std::vector<std::int32_t>& table, const TimelineEvent& e) {
        auto b = buildings.find(e.building_id);
        if (!b) return;
        table[*b * grid.count + grid.index_of(e.ts)] += 1;
    };
    for (const auto& timeline : timelines) {
        const auto& ev = timeline.events;
        std::size_t day_start = 0;
        for (std::size_t i = 0; i <= ev.size(); ++i) {
            const bool day_break = i == ev.size() || midnight_of(ev[i].ts) != midnight_of(ev[day_start].ts);
            if (!day_break) continue;
            if (i > day_start) {
                bump(entries, ev[day_start]);
                bump(exits, ev[i - 1]);
            }
            day_start = i;
        }
    }
}

FlowTable aggregate_flows(const std::vector<TripLeg>& legs, const IntervalGrid& grid,
                          const BuildingIndex& buildings) {
    FlowTable table;
    table.grid = grid;
    table.n_buildings = buildings.size();
    table.counts.assign(grid.count * buildings.size() * buildings.size(), 0);
    for (const TripLeg& leg : legs) {
        auto o = buildings.find(leg.origin);
        auto d = buildings.find(leg.destination);
        if (!o || !d) continue;
        table.at(grid.index_of(leg.depart), *o, *d) += 1;
    }
    return table;
}

std::vector<std::int32_t> join_enrolment(const std::vector<ingest::ScheduleRecord>& schedule,
                                         const IntervalGrid& grid, const BuildingIndex& buildings) {
    std::vector<std::int32_t> enrolment(buildings.size() * grid.count, 0);
    const Timestamp grid_end = grid.start_of(grid.count);
    for (const auto& r : schedule) {
        auto b = buildings.find(r.building_id);
        if (!b) continue;
        // A schedule row covers one hour from its start.
        const Timestamp block_end = r.interval_start + 3600;
        if (block_end <= grid.epoch || r.interval_start >= grid_end) continue;
        Timestamp t = std::max(r.interval_start, grid.epoch);
        for (; t < std::min(block_end, grid_end); t += grid.width_seconds()) {
            enrolment[*b * grid.count + grid.index_of(t)] += static_cast<std::int32_t>(r.enrolment_no);
        }
    }
    return enrolment;
}

Aggregates aggregate_logs(const std::vector<ingest::AnonLogRecord>& logs,
                          const std::vector<std::string>& building_ids,
                          const std::vector<ingest::ScheduleRecord>* schedule, const AggregateOptions& options) {
    if (logs.empty()) throw ValidationError("aggregate: no log records");
    BuildingIndex buildings = BuildingIndex::from_ids(building_ids);
    Timestamp first = logs.front().log_date, last = logs.front().log_date;
    for (const auto& r : logs) {
        first = std::min(first, r.log_date);
        last = std::max(last, r.log_date);
    }
    const IntervalGrid grid = IntervalGrid::covering(first, last, options.width_minutes);

    Aggregates out;
    out.snapshots.grid = grid;
    out.snapshots.buildings = buildings;
    out.snapshots.occupancy = compute_occupancy(logs, grid, buildings);

    auto timelines = build_timelines(logs);
    compute_entry_exit(timelines, grid, buildings, out.snapshots.entries, out.snapshots.exits);
    auto legs = extract_all_trip_legs(timelines, options.max_gap_seconds);
    out.n_legs = legs.size();
    out.flows = aggregate_flows(legs, grid, buildings);

    const std::size_t b_count = buildings.size();
    out.snapshots.orig_count.assign(b_count * grid.count, 0);
    out.snapshots.dest_count.assign(b_count * grid.count, 0);
    for (const TripLeg& leg : legs) {
        auto o = buildings.find(leg.origin);
        auto d = buildings.find(leg.destination);
        if (!o || !d) continue;
        // Origins count at the departure interval, destinations at arrival.
        out.snapshots.orig_count[*o * grid.count + grid.index_of(leg.depart)] += 1;
        out.snapshots.dest_count[*d * grid.count + grid.index_of(leg.arrive)] += 1;
    }

    if (schedule) {
        out.snapshots.enrolment = join_enrolment(*schedule, grid, buildings);
        out.snapshots.has_enrolment = true;
    } else {
        out.snapshots.enrolment.assign(b_count * grid.count, 0);
    }
    return out;
}

std::vector<std::string> FeatureTable::numeric_column_names(bool with_enrolment) {
    std::vector<std::string> names = {"occ_o",   "occ_d",  "entry_o", "exit_o",
                                      "entry_d", "exit_d", "orig_o",  "dest_d"};
    if (with_enrolment) {
        names.push_back("enrol_o");
        names.push_back("enrol_d");
    }
    return names;
}

FeatureTable build_feature_table(const SnapshotTable& snapshots, const FlowTable& flows,
                                 const graph::OdGraph& graph, bool with_enrolment) {
    const IntervalGrid& grid = snapshots.grid;
    if (flows.grid.width_minutes != grid.width_minutes || flows.grid.epoch != grid.epoch ||
        flows.grid.count != grid.count)
        throw std::invalid_argument("build_feature_table: snapshot and flow grids differ");
    if (with_enrolment && !snapshots.has_enrolment)
        throw ValidationError("enrolment features requested but no schedule data was joined");
    const std::size_t b_count = snapshots.buildings.size();
    if (graph.buildings.size() != b_count) throw std::invalid_argument("build_feature_table: building set mismatch");
    for (std::size_t i = 0; i < b_count; ++i)
        if (graph.buildings[i].id != snapshots.buildings.ids[i])
            throw std::invalid_argument("build_feature_table: building order mismatch");

    FeatureTable table;
    table.grid = grid;
    table.n_nodes = graph.nodes.size();
    table.with_enrolment = with_enrolment;
    table.numeric_dim = with_enrolment ? 10 : 8;
    const std::size_t s_count = table.sample_intervals();
    table.x.assign(s_count * table.n_nodes * table.numeric_dim, 0.0);
    table.y.assign(s_count * table.n_nodes, 0.0);
    table.tod.resize(s_count);
    table.dow.resize(s_count);

    const std::size_t t_count = grid.count;
    auto cell = [t_count](std::size_t b, std::size_t t) { return b * t_count + t; };
    for (std::size_t s = 0; s < s_count; ++s) {
        const std::size_t prev = s;      // t − 1
        const std::size_t target = s + 1;  // t
        table.tod[s] = grid.tod_slot(prev);
        table.dow[s] = grid.dow(prev);
        double* xrow = table.x.data() + s * table.n_nodes * table.numeric_dim;
        double* yrow = table.y.data() + s * table.n_nodes;
        for (const graph::OdNode& node : graph.nodes) {
            const std::size_t m = node.origin;
            const std::size_t n = node.destination;
            double* f = xrow + node.index * table.numeric_dim;
            f[0] = snapshots.occupancy[cell(m, prev)];
            f[1] = snapshots.occupancy[cell(n, prev)];
            f[2] = snapshots.entries[cell(m, prev)];
            f[3] = snapshots.exits[cell(m, prev)];
            f[4] = snapshots.entries[cell(n, prev)];
            f[5] = snapshots.exits[cell(n, prev)];
            f[6] = snapshots.orig_count[cell(m, prev)];
            f[7] = snapshots.dest_count[cell(n, prev)];
            if (with_enrolment) {
                f[8] = snapshots.enrolment[cell(m, prev)];
                f[9] = snapshots.enrolment[cell(n, prev)];
            }
            yrow[node.index] = flows.at(target, m, n);
        }
    }
    return table;
}

void write_snapshots_csv(const SnapshotTable& snapshots, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "building_id,interval_start,occupancy,entries,exits,orig_count,dest_count";
    if (snapshots.has_enrolment) out << ",enrolment";
    out << '\n';
    for (std::size_t b = 0; b < snapshots.buildings.size(); ++b) {
        for (std::size_t t = 0; t < snapshots.grid.count; ++t) {
            const std::size_t c = snapshots.cell(b, t);
            out << snapshots.buildings.ids[b] << ',' << format_timestamp(snapshots.grid.start_of(t)) << ','
                << snapshots.occupancy[c] << ',' << snapshots.entries[c] << ',' << snapshots.exits[c] << ','
                << snapshots.orig_count[c] << ',' << snapshots.dest_count[c];
            if (snapshots.has_enrolment) out << ',' << snapshots.enrolment[c];
            out << '\n';
        }
    }
}

void write_flows_csv(const FlowTable& flows, const BuildingIndex& buildings, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "origin,destination,interval_start,flow\n";
    for (std::size_t t = 0; t < flows.grid.count; ++t) {
        for (std::size_t o = 0; o < flows.n_buildings; ++o) {
            for (std::size_t d = 0; d < flows.n_buildings; ++d) {
                const std::int32_t count = flows.at(t, o, d);
                if (count == 0) continue;
                out << buildings.ids[o] << ',' << buildings.ids[d] << ','
                    << format_timestamp(flows.grid.start_of(t)) << ',' << count << '\n';
            }
        }
    }
}

void write_features_csv(const FeatureTable& table, const graph::OdGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "interval_start,origin,destination";
    for (const auto& name : FeatureTable::numeric_column_names(table.with_enrolment)) out << ',' << name;
    out << ",tod,dow,flow\n";
    const std::size_t s_count = table.sample_intervals();
    for (std::size_t s = 0; s < s_count; ++s) {
        const std::string target_start = format_timestamp(table.grid.start_of(s + 1));
        for (std::size_t node = 0; node < table.n_nodes; ++node) {
            out << target_start << ',' << graph.origin_id(node) << ',' << graph.destination_id(node);
            const double* f = table.features(s, node);
            for (std::size_t c = 0; c < table.numeric_dim; ++c)
                out << ',' << static_cast<std::int64_t>(f[c]);
            out << ',' << table.tod[s] << ',' << table.dow[s] << ','
                << static_cast<std::int64_t>(table.y[s * table.n_nodes + node]) << '\n';
        }
    }
}

FeatureTable load_features_csv(std::istream& in, const graph::OdGraph& graph) {
    csv::Reader reader(in);
    auto require = [&](const std::string& name) {
        auto idx = reader.column(name);
        if (!idx) throw ValidationError("feature table: missing column '" + name + "'");
        return *idx;
    };
    const std::size_t start_col = require("interval_start");
    const std::size_t origin_col = require("origin");
    const std::size_t dest_col = require("destination");
    const bool with_enrolment = reader.column("enrol_o").has_value();
    const auto names = FeatureTable::numeric_column_names(with_enrolment);
    std::vector<std::size_t> numeric_cols;
    for (const auto& name : names) numeric_cols.push_back(require(name));
    const std::size_t tod_col = require("tod");
    const std::size_t dow_col = require("dow");
    const std::size_t flow_col = require("flow");

    struct Row {
        Timestamp target;
        std::size_t node;
        std::vector<double> numeric;
        int tod, dow;
        double flow;
    };
    std::vector<Row> rows;
    std::vector<std::string_view> fields;
    const std::size_t b_count = graph.buildings.size();
    std::unordered_map<std::string, std::size_t> building_index;
    for (std::size_t i = 0; i < b_count; ++i) building_index.emplace(graph.buildings[i].id, i);
    auto building_of = [&](std::string_view id) -> std::size_t {
        auto it = building_index.find(std::string(id));
        if (it == building_index.end()) throw ValidationError("feature table: unknown building " + std::string(id));
        return it->second;
    };
    Timestamp min_target = 0;
    Timestamp max_target = 0;
    while (reader.next(fields)) {
        Row row;
        auto ts = parse_timestamp(trim(fields[start_col]));
        if (!ts) throw ValidationError("feature table: bad timestamp at line " + std::to_string(reader.line_number()));
        row.target = *ts;
        const std::size_t o = building_of(trim(fields[origin_col]));
        const std::size_t d = building_of(trim(fields[dest_col]));
        row.node = graph::od_node_index(b_count, o, d);
        row.numeric.reserve(numeric_cols.size());
        for (std::size_t c : numeric_cols) row.numeric.push_back(std::stod(std::string(fields[c])));
        row.tod = std::stoi(std::string(fields[tod_col]));
        row.dow = std::stoi(std::string(fields[dow_col]));
        row.flow = std::stod(std::string(fields[flow_col]));
        if (rows.empty() || row.target < min_target) min_target = row.target;
        if (rows.empty() || row.target > max_target) max_target = row.target;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("feature table: no rows");

    // Width from the distinct target spacing; targets start at interval 1.
    std::int64_t width_s = 0;
    for (const Row& r : rows) {
        if (r.target != min_target) {
            std::int64_t gap = r.target - min_target;
            width_s = width_s == 0 ? gap : std::min(width_s, gap);
        }
    }
    if (width_s <= 0) throw ValidationError("feature table: cannot infer interval width");

    FeatureTable table;
    table.grid.width_minutes = static_cast<int>(width_s / 60);
    table.grid.epoch = min_target - width_s;
    table.grid.count = static_cast<std::size_t>((max_target - table.grid.epoch) / width_s) + 1;
    table.n_nodes = graph.nodes.size();
    table.with_enrolment = with_enrolment;
    table.numeric_dim = names.size();
    const std::size_t s_count = table.sample_intervals();
    table.x.assign(s_count * table.n_nodes * table.numeric_dim, 0.0);
    table.y.assign(s_count * table.n_nodes, 0.0);
    table.tod.assign(s_count, 0);
    table.dow.assign(s_count, 0);
    for (const Row& r : rows) {
        const std::size_t s = static_cast<std::size_t>((r.target - min_target) / width_s);
        double* f = table.x.data() + (s * table.n_nodes + r.node) * table.numeric_dim;
        std::copy(r.numeric.begin(), r.numeric.end(), f);
        table.tod[s] = r.tod;
        table.dow[s] = r.dow;
        table.y[s * table.n_nodes + r.node] = r.flow;
    }
    return table;
}

}  // namespace odflow::chains
