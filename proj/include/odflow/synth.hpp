#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "odflow/chains.hpp"
#include "odflow/graph.hpp"
#include "odflow/ingest.hpp"
#include "odflow/time.hpp"

namespace odflow::synth {

struct SynthConfig {
    int n_buildings = 22;
    int n_agents = 2000;
    int weeks = 4;
    std::uint64_t seed = 1;
    // Mean pings per agent per 15 minutes while inside a building, on top of
    // the association pings emitted at every arrival and departure.
    double ping_rate = 1.5;
    // Multiplier linking scheduled class size to building attractiveness;
    // 0 makes enrolment uninformative.
    double enrolment_coupling = 1.0;

    void validate() const;
};

struct Campus {
    std::vector<graph::Building> buildings;         // sorted by id
    std::vector<ingest::ScheduleRecord> schedule;   // weekday hourly blocks, whole span
    Timestamp day0 = 0;                             // Monday 00:00
    int n_days = 0;

    // Enrolment of the block covering `t` for building index b, 0 outside
    // scheduled blocks.
    std::int32_t enrolment_at(std::size_t b, Timestamp t) const;

    std::vector<std::int32_t> weekly_enrolment;  // b × weekday × hour-slot cache
};

Campus generate_campus(const SynthConfig& config);

struct PresenceSpan {
    std::uint32_t agent = 0;
    std::uint16_t building = 0;
    Timestamp enter = 0;
    Timestamp leave = 0;
};

struct Transition {
    std::uint32_t agent = 0;
    std::uint16_t origin = 0;
    std::uint16_t destination = 0;
    Timestamp depart = 0;
    Timestamp arrive = 0;
};

// Exact byproducts of the simulation; the pipeline's aggregates are checked
// against these.
struct GroundTruth {
    std::vector<PresenceSpan> presence;
    std::vector<Transition> transitions;

    std::vector<std::int32_t> occupancy_counts(const chains::IntervalGrid& grid, std::size_t n_buildings) const;
    chains::FlowTable flow_counts(const chains::IntervalGrid& grid, std::size_t n_buildings) const;
};

struct LogPing {
    std::uint32_t agent = 0;
    std::uint16_t building = 0;
    Timestamp ts = 0;
};

struct SimulationOutput {
    std::vector<LogPing> pings;  // ordered by (agent, ts)
    GroundTruth truth;
};

SimulationOutput simulate(const SynthConfig& config, const Campus& campus);

std::string mac_for_agent(std::uint32_t agent);

// File emission in the exact schemas the ingest stage consumes.
void write_logs_csv(const SimulationOutput& sim, const Campus& campus, std::ostream& out);
void write_logs_csv(const SimulationOutput& sim, const Campus& campus, const std::filesystem::path& path);
void write_mapping_csv(const Campus& campus, std::ostream& out);
void write_mapping_csv(const Campus& campus, const std::filesystem::path& path);
void write_schedule_csv(const Campus& campus, std::ostream& out);
void write_schedule_csv(const Campus& campus, const std::filesystem::path& path);
void write_truth_csvs(const SimulationOutput& sim, const Campus& campus, const std::filesystem::path& occupancy_path,
                      const std::filesystem::path& flows_path);

}  // namespace odflow::synth
