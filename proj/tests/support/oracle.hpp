#pragma once

// Brute-force reference implementations for the aggregation pipeline. Kept
// deliberately naive and independent of the chains module internals: plain
// nested loops, std::set/std::map, no shared helpers. The pipeline must match
// these cell for cell.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "odflow/ingest.hpp"
#include "odflow/time.hpp"

namespace oracle {

struct Event {
    std::string device;
    std::string building;
    odflow::Timestamp ts;
};

struct Leg {
    std::string device;
    std::string origin;
    std::string destination;
    odflow::Timestamp depart;
    odflow::Timestamp arrive;
};

inline std::vector<Event> to_events(const std::vector<odflow::ingest::AnonLogRecord>& logs) {
    std::vector<Event> events;
    for (const auto& r : logs) events.push_back(Event{r.hash_id, r.building_id, r.log_date});
    return events;
}

inline std::size_t interval_of(odflow::Timestamp ts, odflow::Timestamp epoch, int width_minutes) {
    return static_cast<std::size_t>((ts - epoch) / (static_cast<odflow::Timestamp>(width_minutes) * 60));
}

// occupancy[(building, interval)] = number of distinct devices seen there.
inline std::map<std::pair<std::string, std::size_t>, int> occupancy(const std::vector<Event>& events,
                                                                    odflow::Timestamp epoch, int width_minutes) {
    std::map<std::pair<std::string, std::size_t>, std::set<std::string>> present;
    for (const auto& e : events) present[{e.building, interval_of(e.ts, epoch, width_minutes)}].insert(e.device);
    std::map<std::pair<std::string, std::size_t>, int> counts;
    for (const auto& [cell, devices] : present) counts[cell] = static_cast<int>(devices.size());
    return counts;
}

// Sorted per-device event list with the (timestamp, building) tie rule.
inline std::vector<Event> device_events(const std::vector<Event>& events, const std::string& device) {
    std::vector<Event> mine;
    for (const auto& e : events)
        if (e.device == device) mine.push_back(e);
    std::sort(mine.begin(), mine.end(), [](const Event& a, const Event& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.building < b.building;
    });
    return mine;
}

inline std::set<std::string> devices_of(const std::vector<Event>& events) {
    std::set<std::string> devices;
    for (const auto& e : events) devices.insert(e.device);
    return devices;
}

// First/last event per device per calendar day.
inline void entries_exits(const std::vector<Event>& events, odflow::Timestamp epoch, int width_minutes,
                          std::map<std::pair<std::string, std::size_t>, int>& entries,
                          std::map<std::pair<std::string, std::size_t>, int>& exits) {
    entries.clear();
    exits.clear();
    for (const auto& device : devices_of(events)) {
        auto mine = device_events(events, device);
        std::set<odflow::Timestamp> days;
        for (const auto& e : mine) days.insert(odflow::midnight_of(e.ts));
        for (odflow::Timestamp day : days) {
            const Event* first = nullptr;
            const Event* last = nullptr;
            for (const auto& e : mine) {
                if (odflow::midnight_of(e.ts) != day) continue;
                if (!first) first = &e;
                last = &e;
            }
            entries[{first->building, interval_of(first->ts, epoch, width_minutes)}] += 1;
            exits[{last->building, interval_of(last->ts, epoch, width_minutes)}] += 1;
        }
    }
}

inline std::vector<Leg> trip_legs(const std::vector<Event>& events, std::int64_t max_gap_seconds) {
    std::vector<Leg> legs;
    for (const auto& device : devices_of(events)) {
        auto mine = device_events(events, device);
        for (std::size_t i = 1; i < mine.size(); ++i) {
            if (mine[i].building == mine[i - 1].building) continue;
            if (mine[i].ts - mine[i - 1].ts > max_gap_seconds) continue;
            legs.push_back(Leg{device, mine[i - 1].building, mine[i].building, mine[i - 1].ts, mine[i].ts});
        }
    }
    return legs;
}

// flows[(origin, destination, depart interval)] summed over legs.
inline std::map<std::tuple<std::string, std::string, std::size_t>, int> flows(const std::vector<Leg>& legs,
                                                                              odflow::Timestamp epoch,
                                                                              int width_minutes) {
    std::map<std::tuple<std::string, std::string, std::size_t>, int> counts;
    for (const auto& leg : legs)
        counts[{leg.origin, leg.destination, interval_of(leg.depart, epoch, width_minutes)}] += 1;
    return counts;
}

}  // namespace oracle
