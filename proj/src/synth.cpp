#include "odflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "odflow/common.hpp"

namespace odflow::synth {

namespace {

// Monday 2019-09-02 00:00, start of a teaching block at the studied campus scale.
constexpr int kDay0Year = 2019, kDay0Month = 9, kDay0Day = 2;
constexpr int kFirstBlockHour = 9;
constexpr int kLastBlockHour = 17;  // last block start; blocks are one hour
constexpr int kBlocksPerDay = kLastBlockHour - kFirstBlockHour + 1;
constexpr Timestamp kLatestDeparture = 18 * 3600 + 1800;  // 18:30

bool is_weekday(int day_index) { return day_index % 7 < 5; }

}  // namespace

void SynthConfig::validate() const {
    if (n_buildings < 2) throw ValidationError("synth: need at least 2 buildings");
    if (n_buildings > 99) throw ValidationError("synth: at most 99 buildings");
    if (n_agents < 0) throw ValidationError("synth: negative agent count");
    if (weeks < 1) throw ValidationError("synth: need at least 1 week");
    if (ping_rate < 0.0) throw ValidationError("synth: negative ping rate");
    if (enrolment_coupling < 0.0) throw ValidationError("synth: negative enrolment coupling");
}

Campus generate_campus(const SynthConfig& config) {
    config.validate();
    Campus campus;
    campus.day0 = to_timestamp(CivilDateTime{kDay0Year, kDay0Month, kDay0Day, 0, 0, 0});
    campus.n_days = config.weeks * 7;

    std::mt19937_64 rng(mix_seed(config.seed, 0xCA3F05));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // ~1 km × 1 km box around a fixed downtown centroid.
    const double lat0 = 43.6577, lon0 = -79.3788;
    const double lat_half = 0.0045, lon_half = 0.0062;
    campus.buildings.reserve(config.n_buildings);
    for (int i = 0; i < config.n_buildings; ++i) {
        graph::Building b;
        char code[16];
        std::snprintf(code, sizeof(code), "B%02d", i);
        b.id = code;
        b.lat = lat0 + (2.0 * unit(rng) - 1.0) * lat_half;
        b.lon = lon0 + (2.0 * unit(rng) - 1.0) * lon_half;
        campus.buildings.push_back(std::move(b));
    }
    std::sort(campus.buildings.begin(), campus.buildings.end(),
              [](const graph::Building& a, const graph::Building& b) { return a.id < b.id; });

    // Weekly block pattern, constant across weeks like a course calendar.
    // Bigger buildings host bigger classes.
    const std::size_t b_count = campus.buildings.size();
    campus.weekly_enrolment.assign(b_count * 5 * kBlocksPerDay, 0);
    std::vector<double> size_factor(b_count);
    for (auto& f : size_factor) f = 0.5 + 1.5 * unit(rng);
    for (std::size_t b = 0; b < b_count; ++b) {
        for (int wd = 0; wd < 5; ++wd) {
            for (int slot = 0; slot < kBlocksPerDay; ++slot) {
                if (unit(rng) < 0.6) {
                    int base = 20 + static_cast<int>(unit(rng) * 180.0);
                    campus.weekly_enrolment[(b * 5 + wd) * kBlocksPerDay + slot] =
                        static_cast<std::int32_t>(std::lround(base * size_factor[b]));
                }
            }
        }
    }

    // Materialize the weekly pattern into dated schedule rows for the span.
    for (int day = 0; day < campus.n_days; ++day) {
        if (!is_weekday(day)) continue;
        const int wd = day % 7;
        const Timestamp midnight = campus.day0 + static_cast<Timestamp>(day) * kSecondsPerDay;
        for (std::size_t b = 0; b < b_count; ++b) {
            for (int slot = 0; slot < kBlocksPerDay; ++slot) {
                const std::int32_t enrolment = campus.weekly_enrolment[(b * 5 + wd) * kBlocksPerDay + slot];
                if (enrolment == 0) continue;
                campus.schedule.push_back(ingest::ScheduleRecord{
                    campus.buildings[b].id, midnight + (kFirstBlockHour + slot) * 3600, enrolment});
            }
        }
    }
    return campus;
}

std::int32_t Campus::enrolment_at(std::size_t b, Timestamp t) const {
    const Timestamp rel = t - day0;
    if (rel < 0) return 0;
    const int day = static_cast<int>(rel / kSecondsPerDay);
    if (day >= n_days || !is_weekday(day)) return 0;
    const int hour = static_cast<int>((rel % kSecondsPerDay) / 3600);
    if (hour < kFirstBlockHour || hour > kLastBlockHour) return 0;
    return weekly_enrolment[(b * 5 + day % 7) * kBlocksPerDay + (hour - kFirstBlockHour)];
}

SimulationOutput simulate(const SynthConfig& config, const Campus& campus) {
    config.validate();
    SimulationOutput out;
    const std::size_t b_count = campus.buildings.size();
    const double mean_ping_gap_s = config.ping_rate > 0.0 ? 900.0 / config.ping_rate : 0.0;

    std::vector<double> weights(b_count);
    for (int agent = 0; agent < config.n_agents; ++agent) {
        std::mt19937_64 rng(mix_seed(config.seed, 0xA6E47 + static_cast<std::uint64_t>(agent)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        for (int day = 0; day < campus.n_days; ++day) {
            if (!is_weekday(day)) continue;
            if (unit(rng) > 0.75) continue;  // skipped day
            const Timestamp midnight = campus.day0 + static_cast<Timestamp>(day) * kSecondsPerDay;
            // Arrive between 08:15 and 10:30.
            Timestamp now = midnight + 8 * 3600 + 900 + static_cast<Timestamp>(unit(rng) * 8100.0);
            const int n_visits = 2 + static_cast<int>(unit(rng) * 5.0);  // 2..6
            int previous = -1;

            for (int visit = 0; visit < n_visits; ++visit) {
                // Pick a building weighted by the enrolment of the block in
                // progress (plus a uniform floor so empty blocks still draw).
                double total = 0.0;
                for (std::size_t b = 0; b < b_count; ++b) {
                    double w = static_cast<int>(b) == previous
                                   ? 0.0
                                   : 1.0 + config.enrolment_coupling * campus.enrolment_at(b, now);
                    weights[b] = w;
                    total += w;
                }
                double pick = unit(rng) * total;
                std::size_t chosen = b_count - 1;
                for (std::size_t b = 0; b < b_count; ++b) {
                    if (pick < weights[b]) {
                        chosen = b;
                        break;
                    }
                    pick -= weights[b];
                }

                const Timestamp enter = now;
                // Stay through the current block: leave near the next hour
                // boundary with a small jitter, at least 25 minutes.
                const Timestamp next_hour = midnight + ((enter - midnight) / 3600 + 1) * 3600;
                const Timestamp jitter = static_cast<Timestamp>(unit(rng) * 1200.0) - 300;  // −5..+15 min
                Timestamp leave = std::max(enter + 1500, next_hour + jitter);
                const bool last = visit == n_visits - 1 || leave >= midnight + kLatestDeparture;
                if (leave > midnight + kLatestDeparture) leave = midnight + kLatestDeparture;
                if (leave <= enter) leave = enter + 60;

                out.truth.presence.push_back(PresenceSpan{static_cast<std::uint32_t>(agent),
                                                          static_cast<std::uint16_t>(chosen), enter, leave});

                // Association pings bracket the stay; interior pings arrive
                // as a Poisson stream.
                out.pings.push_back(LogPing{static_cast<std::uint32_t>(agent),
                                            static_cast<std::uint16_t>(chosen), enter});
                if (mean_ping_gap_s > 0.0) {
                    double t = static_cast<double>(enter);
                    while (true) {
                        t -= mean_ping_gap_s * std::log(1.0 - unit(rng));
                        if (t >= static_cast<double>(leave)) break;
                        out.pings.push_back(LogPing{static_cast<std::uint32_t>(agent),
                                                    static_cast<std::uint16_t>(chosen),
                                                    static_cast<Timestamp>(t)});
                    }
                }
                out.pings.push_back(LogPing{static_cast<std::uint32_t>(agent),
                                            static_cast<std::uint16_t>(chosen), leave});

                if (last) break;

                const Timestamp walk = 120 + static_cast<Timestamp>(unit(rng) * 360.0);  // 2..8 min
                out.truth.transitions.push_back(Transition{static_cast<std::uint32_t>(agent),
                                                           static_cast<std::uint16_t>(chosen), 0, leave,
                                                           leave + walk});
                previous = static_cast<int>(chosen);
                now = leave + walk;
            }
            // Fill in the destinations of this day's transitions.
        }
    }

    // Destination of each transition is the building of the following span.
    // Spans and transitions were appended in per-agent time order, so pair
    // them with a single pass.
    std::size_t span_cursor = 0;
    for (Transition& tr : out.truth.transitions) {
        while (span_cursor < out.truth.presence.size() &&
               (out.truth.presence[span_cursor].agent != tr.agent ||
                out.truth.presence[span_cursor].enter != tr.arrive)) {
            ++span_cursor;
        }
        if (span_cursor == out.truth.presence.size())
            throw std::logic_error("synth: dangling transition");
        tr.destination = out.truth.presence[span_cursor].building;
    }
    return out;
}

std::string mac_for_agent(std::uint32_t agent) {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "02:00:%02X:%02X:%02X:%02X", (agent >> 24) & 0xFF, (agent >> 16) & 0xFF,
                  (agent >> 8) & 0xFF, agent & 0xFF);
    return std::string(buf);
}

std::vector<std::int32_t> GroundTruth::occupancy_counts(const chains::IntervalGrid& grid,
                                                        std::size_t n_buildings) const {
    // Unique agents per (building, interval); overlapping spans of the same
    // agent in the same building must not double count.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> seen;
    for (const PresenceSpan& span : presence) {
        if (span.enter < grid.epoch) continue;
        const std::size_t t0 = grid.index_of(span.enter);
        const std::size_t t1 = std::min(grid.index_of(span.leave), grid.count - 1);
        for (std::size_t t = t0; t <= t1 && t < grid.count; ++t)
            seen.emplace_back(static_cast<std::uint64_t>(span.building) * grid.count + t, span.agent);
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    std::vector<std::int32_t> occupancy(n_buildings * grid.count, 0);
    for (const auto& [cell, agent] : seen) ++occupancy[cell];
    return occupancy;
}

chains::FlowTable GroundTruth::flow_counts(const chains::IntervalGrid& grid, std::size_t n_buildings) const {
    chains::FlowTable table;
    table.grid = grid;
    table.n_buildings = n_buildings;
    table.counts.assign(grid.count * n_buildings * n_buildings, 0);
    for (const Transition& tr : transitions) {
        if (tr.depart < grid.epoch) continue;
        const std::size_t t = grid.index_of(tr.depart);
        if (t >= grid.count) continue;
        table.at(t, tr.origin, tr.destination) += 1;
    }
    return table;
}

void write_logs_csv(const SimulationOutput& sim, const Campus& campus, std::ostream& out) {
    out << "mac_id,wifi_id,log_date\n";
    for (const LogPing& ping : sim.pings) {
        out << mac_for_agent(ping.agent) << ",AP-" << campus.buildings[ping.building].id << ','
            << format_timestamp(ping.ts) << '\n';
    }
}

void write_logs_csv(const SimulationOutput& sim, const Campus& campus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_logs_csv(sim, campus, out);
}

void write_mapping_csv(const Campus& campus, std::ostream& out) {
    out << "wifi_id,building_id,lat,lon\n";
    char buf[64];
    for (const graph::Building& b : campus.buildings) {
        std::snprintf(buf, sizeof(buf), "AP-%s,%s,%.6f,%.6f\n", b.id.c_str(), b.id.c_str(), b.lat, b.lon);
        out << buf;
    }
}

void write_mapping_csv(const Campus& campus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_mapping_csv(campus, out);
}

void write_schedule_csv(const Campus& campus, std::ostream& out) {
    out << "building_id,interval_start,enrolment_no\n";
    for (const ingest::ScheduleRecord& r : campus.schedule)
        out << r.building_id << ',' << format_timestamp(r.interval_start) << ',' << r.enrolment_no << '\n';
}

void write_schedule_csv(const Campus& campus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_schedule_csv(campus, out);
}

void write_truth_csvs(const SimulationOutput& sim, const Campus& campus, const std::filesystem::path& occupancy_path,
                      const std::filesystem::path& flows_path) {
    chains::IntervalGrid grid;
    grid.width_minutes = 15;
    grid.epoch = campus.day0;
    grid.count = static_cast<std::size_t>(campus.n_days) * 96;
    const std::size_t b_count = campus.buildings.size();

    const auto occupancy = sim.truth.occupancy_counts(grid, b_count);
    std::ofstream occ(occupancy_path);
    if (!occ) throw std::runtime_error("cannot write " + occupancy_path.string());
    occ << "building_id,interval_start,occupancy_true\n";
    for (std::size_t b = 0; b < b_count; ++b)
        for (std::size_t t = 0; t < grid.count; ++t) {
            const std::int32_t c = occupancy[b * grid.count + t];
            if (c == 0) continue;
            occ << campus.buildings[b].id << ',' << format_timestamp(grid.start_of(t)) << ',' << c << '\n';
        }

    const auto flows = sim.truth.flow_counts(grid, b_count);
    std::ofstream fl(flows_path);
    if (!fl) throw std::runtime_error("cannot write " + flows_path.string());
    fl << "origin,destination,interval_start,flow_true\n";
    for (std::size_t t = 0; t < grid.count; ++t)
        for (std::size_t o = 0; o < b_count; ++o)
            for (std::size_t d = 0; d < b_count; ++d) {
                const std::int32_t c = flows.at(t, o, d);
                if (c == 0) continue;
                fl << campus.buildings[o].id << ',' << campus.buildings[d].id << ','
                   << format_timestamp(grid.start_of(t)) << ',' << c << '\n';
            }
}

}  // namespace odflow::synth
