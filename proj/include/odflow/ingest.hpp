#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "odflow/time.hpp"

namespace odflow::ingest {

struct RawLogRecord {
    std::string mac_id;
    std::string wifi_id;
    Timestamp log_date = 0;
};

struct ApMapping {
    std::string wifi_id;
    std::string building_id;
    double lat = 0.0;
    double lon = 0.0;
};

struct ScheduleRecord {
    std::string building_id;
    Timestamp interval_start = 0;
    std::int64_t enrolment_no = 0;
};

struct AnonLogRecord {
    std::string hash_id;
    std::string building_id;
    Timestamp log_date = 0;
};

// Maps the canonical field names onto the CSV header column names.
struct ColumnMap {
    std::string mac_id = "mac_id";
    std::string wifi_id = "wifi_id";
    std::string log_date = "log_date";
};

struct ParseStats {
    std::size_t rows_total = 0;
    std::size_t rows_skipped = 0;
};

// One record per well-formed row, input order preserved. Rows with an
// unparseable timestamp or missing fields are skipped and counted; a header
// missing a required column raises ValidationError.
std::vector<RawLogRecord> parse_log_file(std::istream& in, const ColumnMap& columns, ParseStats& stats);

// Lowercase hex SHA-256 of salt‖mac_id. Throws on empty mac_id.
std::string hash_mac(std::string_view mac_id, std::string_view salt);

// hash_mac with a per-device memo; one instance per dataset salt.
class MacHasher {
public:
    explicit MacHasher(std::string salt) : salt_(std::move(salt)) {}
    const std::string& hash(const std::string& mac_id);

private:
    std::string salt_;
    std::unordered_map<std::string, std::string> cache_;
};

std::vector<ApMapping> load_ap_mapping(std::istream& in);
std::vector<ScheduleRecord> load_schedule(std::istream& in);

using ApIndex = std::unordered_map<std::string, std::string>;  // wifi_id → building_id
ApIndex index_ap_mapping(const std::vector<ApMapping>& mapping);

struct ResolveStats {
    std::size_t unmapped_ssid = 0;
};

// Replaces the SSID with its building and the MAC with its digest.
// Unknown SSIDs drop the record and bump the counter.
std::optional<AnonLogRecord> resolve_building(const RawLogRecord& record, const ApIndex& index, MacHasher& hasher,
                                              ResolveStats& stats);

struct IngestReport {
    std::size_t rows_total = 0;
    std::size_t rows_skipped = 0;
    std::size_t unmapped_ssid = 0;
    std::size_t records_out = 0;

    std::string to_json() const;
};

// Full streaming pass: parse, anonymize, resolve, and write the anonymized
// CSV (`hash_id,building_id,log_date`).
IngestReport anonymize_logs(std::istream& raw_csv, const std::vector<ApMapping>& mapping, const std::string& salt,
                            std::ostream& anon_csv, const ColumnMap& columns = {});

std::vector<AnonLogRecord> load_anon_logs(std::istream& in);

}  // namespace odflow::ingest
