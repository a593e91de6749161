#include <doctest.h>

#include <stdexcept>

#include <map>
#include <set>
#include <sstream>

#include "odflow/chains.hpp"
#include "odflow/synth.hpp"

using namespace odflow;

namespace {

synth::SynthConfig small_config() {
    synth::SynthConfig config;
    config.n_buildings = 5;
    config.n_agents = 60;
    config.weeks = 1;
    config.seed = 11;
    config.ping_rate = 1.5;
    return config;
}

std::vector<ingest::AnonLogRecord> pipeline_logs(const synth::SimulationOutput& sim, const synth::Campus& campus,
                                                 ingest::IngestReport* report = nullptr) {
    std::stringstream raw, anon;
    synth::write_logs_csv(sim, campus, raw);
    std::vector<ingest::ApMapping> mapping;
    for (const auto& b : campus.buildings) mapping.push_back({"AP-" + b.id, b.id, b.lat, b.lon});
    auto r = ingest::anonymize_logs(raw, mapping, "test-salt", anon);
    if (report) *report = r;
    return ingest::load_anon_logs(anon);
}

}  // namespace

TEST_CASE("campus generation: cardinality, determinism, schedule shape") {
    synth::SynthConfig config;
    config.n_buildings = 22;
    config.n_agents = 10;
    config.weeks = 1;
    config.seed = 5;
    synth::Campus a = synth::generate_campus(config);
    synth::Campus b = synth::generate_campus(config);
    CHECK(a.buildings.size() == 22);
    std::set<std::string> ids;
    for (const auto& bld : a.buildings) ids.insert(bld.id);
    CHECK(ids.size() == 22);

    REQUIRE(a.schedule.size() == b.schedule.size());
    for (std::size_t i = 0; i < a.schedule.size(); ++i) {
        CHECK(a.schedule[i].building_id == b.schedule[i].building_id);
        CHECK(a.schedule[i].interval_start == b.schedule[i].interval_start);
        CHECK(a.schedule[i].enrolment_no == b.schedule[i].enrolment_no);
    }
    for (const auto& row : a.schedule) {
        CHECK(row.enrolment_no >= 0);
        const int wd = weekday_of(row.interval_start);
        CHECK(wd < 5);  // enrolment only on weekdays
    }
}

TEST_CASE("zero agents produce an empty world") {
    synth::SynthConfig config = small_config();
    config.n_agents = 0;
    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);
    CHECK(sim.pings.empty());
    CHECK(sim.truth.presence.empty());
    CHECK(sim.truth.transitions.empty());
}

TEST_CASE("identical config gives byte-identical log files") {
    synth::SynthConfig config = small_config();
    synth::Campus campus = synth::generate_campus(config);
    std::stringstream a, b;
    synth::write_logs_csv(synth::simulate(config, campus), campus, a);
    synth::write_logs_csv(synth::simulate(config, campus), campus, b);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("single agent: transitions pair consecutive same-day presence spans") {
    synth::SynthConfig config = small_config();
    config.n_agents = 1;
    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);

    std::size_t expected_transitions = 0;
    for (std::size_t i = 1; i < sim.truth.presence.size(); ++i) {
        const auto& prev = sim.truth.presence[i - 1];
        const auto& next = sim.truth.presence[i];
        if (prev.agent == next.agent && midnight_of(prev.leave) == midnight_of(next.enter))
            ++expected_transitions;
    }
    CHECK(sim.truth.transitions.size() == expected_transitions);
    for (std::size_t i = 0, k = 0; i + 1 < sim.truth.presence.size(); ++i) {
        const auto& prev = sim.truth.presence[i];
        const auto& next = sim.truth.presence[i + 1];
        if (prev.agent != next.agent || midnight_of(prev.leave) != midnight_of(next.enter)) continue;
        const auto& tr = sim.truth.transitions[k++];
        CHECK(tr.origin == prev.building);
        CHECK(tr.destination == next.building);
        CHECK(tr.depart == prev.leave);
        CHECK(tr.arrive == next.enter);
        CHECK(tr.origin != tr.destination);
    }
}

TEST_CASE("conservation: per-day flow totals equal the departures in the transition log") {
    synth::SynthConfig config = small_config();
    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);
    chains::IntervalGrid grid;
    grid.width_minutes = 60;
    grid.epoch = campus.day0;
    grid.count = static_cast<std::size_t>(campus.n_days) * 24;
    auto flows = sim.truth.flow_counts(grid, campus.buildings.size());

    std::map<std::pair<int, std::size_t>, int> departures;  // (building, day)
    for (const auto& tr : sim.truth.transitions)
        departures[{tr.origin, static_cast<std::size_t>((tr.depart - campus.day0) / kSecondsPerDay)}] += 1;
    for (const auto& [key, count] : departures) {
        const auto [b, day] = key;
        std::int64_t total = 0;
        for (std::size_t t = day * 24; t < (day + 1) * 24; ++t)
            for (std::size_t d = 0; d < campus.buildings.size(); ++d)
                total += flows.at(t, static_cast<std::size_t>(b), d);
        CHECK(total == count);
    }
}

TEST_CASE("pipeline flows equal ground truth exactly; occupancy recovers at high ping rate") {
    synth::SynthConfig config = small_config();
    config.ping_rate = 50.0;  // sanity mode: every presence interval pings
    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);
    auto logs = pipeline_logs(sim, campus);

    std::vector<std::string> ids;
    for (const auto& b : campus.buildings) ids.push_back(b.id);
    chains::AggregateOptions options;
    options.width_minutes = 15;
    auto aggregates = chains::aggregate_logs(logs, ids, nullptr, options);
    const auto& grid = aggregates.snapshots.grid;
    REQUIRE(grid.epoch == campus.day0);

    const auto truth_occupancy = sim.truth.occupancy_counts(grid, ids.size());
    const auto truth_flows = sim.truth.flow_counts(grid, ids.size());
    for (std::size_t b = 0; b < ids.size(); ++b)
        for (std::size_t t = 0; t < grid.count; ++t)
            CHECK(aggregates.snapshots.occupancy[b * grid.count + t] == truth_occupancy[b * grid.count + t]);
    for (std::size_t t = 0; t < grid.count; ++t)
        for (std::size_t o = 0; o < ids.size(); ++o)
            for (std::size_t d = 0; d < ids.size(); ++d)
                CHECK(aggregates.flows.at(t, o, d) == truth_flows.at(t, o, d));

    // Entry/exit equal the first/last presence boundaries per agent-day.
    std::map<std::pair<std::uint16_t, std::size_t>, int> entries_expected, exits_expected;
    std::map<std::pair<std::uint32_t, Timestamp>, std::pair<const synth::PresenceSpan*, const synth::PresenceSpan*>>
        day_spans;
    for (const auto& span : sim.truth.presence) {
        auto& slot = day_spans[{span.agent, midnight_of(span.enter)}];
        if (!slot.first || span.enter < slot.first->enter) slot.first = &span;
        if (!slot.second || span.leave > slot.second->leave) slot.second = &span;
    }
    for (const auto& [key, pair] : day_spans) {
        entries_expected[{pair.first->building, grid.index_of(pair.first->enter)}] += 1;
        exits_expected[{pair.second->building, grid.index_of(pair.second->leave)}] += 1;
    }
    std::int64_t entry_total = 0;
    for (auto v : aggregates.snapshots.entries) entry_total += v;
    std::int64_t expected_total = 0;
    for (const auto& [k, v] : entries_expected) expected_total += v;
    CHECK(entry_total == expected_total);
    for (const auto& [key, count] : entries_expected)
        CHECK(aggregates.snapshots.entries[key.first * grid.count + key.second] == count);
    for (const auto& [key, count] : exits_expected)
        CHECK(aggregates.snapshots.exits[key.first * grid.count + key.second] == count);
}

TEST_CASE("recovered occupancy is monotone in ping rate; flows recover at every rate") {
    std::vector<double> rates = {0.5, 1.5, 5.0, 50.0};
    double previous_ratio = 0.0;
    for (double rate : rates) {
        synth::SynthConfig config = small_config();
        config.ping_rate = rate;
        synth::Campus campus = synth::generate_campus(config);
        synth::SimulationOutput sim = synth::simulate(config, campus);
        auto logs = pipeline_logs(sim, campus);
        std::vector<std::string> ids;
        for (const auto& b : campus.buildings) ids.push_back(b.id);
        auto aggregates = chains::aggregate_logs(logs, ids, nullptr, {});
        const auto& grid = aggregates.snapshots.grid;

        const auto truth_occupancy = sim.truth.occupancy_counts(grid, ids.size());
        double recovered = 0.0, truth_total = 0.0;
        for (std::size_t i = 0; i < truth_occupancy.size(); ++i) {
            recovered += aggregates.snapshots.occupancy[i];
            truth_total += truth_occupancy[i];
        }
        REQUIRE(truth_total > 0.0);
        const double ratio = recovered / truth_total;
        CHECK(ratio <= 1.0 + 1e-12);
        CHECK(ratio >= previous_ratio - 1e-12);
        previous_ratio = ratio;

        const auto truth_flows = sim.truth.flow_counts(grid, ids.size());
        std::int64_t flow_diff = 0;
        for (std::size_t t = 0; t < grid.count; ++t)
            for (std::size_t o = 0; o < ids.size(); ++o)
                for (std::size_t d = 0; d < ids.size(); ++d)
                    flow_diff += std::abs(aggregates.flows.at(t, o, d) - truth_flows.at(t, o, d));
        CHECK(flow_diff == 0);
    }
}

TEST_CASE("emitted csv files carry the expected headers") {
    synth::SynthConfig config = small_config();
    config.n_agents = 3;
    synth::Campus campus = synth::generate_campus(config);
    synth::SimulationOutput sim = synth::simulate(config, campus);
    std::stringstream logs;
    synth::write_logs_csv(sim, campus, logs);
    CHECK(logs.str().rfind("mac_id,wifi_id,log_date\n", 0) == 0);
    std::stringstream schedule;
    synth::write_schedule_csv(campus, schedule);
    CHECK(schedule.str().rfind("building_id,interval_start,enrolment_no\n", 0) == 0);
}

TEST_CASE("synthetic macs are unique and locally administered") {
    std::set<std::string> macs;
    for (std::uint32_t i = 0; i < 3000; ++i) {
        auto mac = synth::mac_for_agent(i);
        CHECK(mac.rfind("02:", 0) == 0);
        macs.insert(mac);
    }
    CHECK(macs.size() == 3000);
}
