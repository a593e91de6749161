#include "odflow/ingest.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <stdexcept>
#include <unordered_set>

#include "odflow/common.hpp"
#include "odflow/csv.hpp"

#include <nlohmann/json.hpp>

namespace odflow::ingest {

namespace {

std::size_t require_column(const csv::Reader& reader, const std::string& name) {
    auto idx = reader.column(name);
    if (!idx) throw ValidationError("missing required column '" + name + "' in header");
    return *idx;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, std::int64_t& out) {
    s = trim(s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<RawLogRecord> parse_log_file(std::istream& in, const ColumnMap& columns, ParseStats& stats) {
    csv::Reader reader(in);
    if (reader.header().empty()) throw ValidationError("log file has no header row");
    const std::size_t mac_col = require_column(reader, columns.mac_id);
    const std::size_t wifi_col = require_column(reader, columns.wifi_id);
    const std::size_t date_col = require_column(reader, columns.log_date);
    const std::size_t need = std::max({mac_col, wifi_col, date_col}) + 1;

    std::vector<RawLogRecord> records;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        ++stats.rows_total;
        if (fields.size() < need) {
            ++stats.rows_skipped;
            continue;
        }
        const std::string_view mac = trim(fields[mac_col]);
        const std::string_view wifi = trim(fields[wifi_col]);
        const auto ts = parse_timestamp(trim(fields[date_col]));
        if (mac.empty() || wifi.empty() || !ts) {
            ++stats.rows_skipped;
            continue;
        }
        records.push_back(RawLogRecord{std::string(mac), std::string(wifi), *ts});
    }
    return records;
}

std::string hash_mac(std::string_view mac_id, std::string_view salt) {
    if (mac_id.empty()) throw std::invalid_argument("hash_mac: empty mac_id");
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("hash_mac: EVP context allocation failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, salt.data(), salt.size()) == 1 &&
              EVP_DigestUpdate(ctx, mac_id.data(), mac_id.size()) == 1 &&
              EVP_DigestFinal_ex(ctx, digest, &digest_len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("hash_mac: digest computation failed");

    static const char* kHex = "0123456789abcdef";
    std::string hex(digest_len * 2, '0');
    for (unsigned int i = 0; i < digest_len; ++i) {
        hex[2 * i] = kHex[digest[i] >> 4];
        hex[2 * i + 1] = kHex[digest[i] & 0x0f];
    }
    return hex;
}

const std::string& MacHasher::hash(const std::string& mac_id) {
    auto it = cache_.find(mac_id);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(mac_id, hash_mac(mac_id, salt_)).first->second;
}

std::vector<ApMapping> load_ap_mapping(std::istream& in) {
    csv::Reader reader(in);
    const std::size_t wifi_col = require_column(reader, "wifi_id");
    const std::size_t bld_col = require_column(reader, "building_id");
    const std::size_t lat_col = require_column(reader, "lat");
    const std::size_t lon_col = require_column(reader, "lon");

    std::vector<ApMapping> mapping;
    std::unordered_set<std::string> seen;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        if (fields.size() <= std::max({wifi_col, bld_col, lat_col, lon_col}))
            throw ValidationError("ap mapping: short row at line " + std::to_string(reader.line_number()));
        ApMapping m;
        m.wifi_id = std::string(trim(fields[wifi_col]));
        m.building_id = std::string(trim(fields[bld_col]));
        if (m.wifi_id.empty() || m.building_id.empty())
            throw ValidationError("ap mapping: empty id at line " + std::to_string(reader.line_number()));
        if (!parse_double(fields[lat_col], m.lat) || !parse_double(fields[lon_col], m.lon))
            throw ValidationError("ap mapping: bad coordinates at line " + std::to_string(reader.line_number()));
        if (m.lat < -90.0 || m.lat > 90.0 || m.lon < -180.0 || m.lon > 180.0)
            throw ValidationError("ap mapping: coordinates out of range for " + m.wifi_id);
        if (!seen.insert(m.wifi_id).second) throw ValidationError("ap mapping: duplicate wifi_id " + m.wifi_id);
        mapping.push_back(std::move(m));
    }
    return mapping;
}

std::vector<ScheduleRecord> load_schedule(std::istream& in) {
    csv::Reader reader(in);
    const std::size_t bld_col = require_column(reader, "building_id");
    const std::size_t start_col = require_column(reader, "interval_start");
    const std::size_t enr_col = require_column(reader, "enrolment_no");

    std::vector<ScheduleRecord> schedule;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        if (fields.size() <= std::max({bld_col, start_col, enr_col}))
            throw ValidationError("schedule: short row at line " + std::to_string(reader.line_number()));
        ScheduleRecord r;
        r.building_id = std::string(trim(fields[bld_col]));
        auto ts = parse_timestamp(trim(fields[start_col]));
        if (!ts) throw ValidationError("schedule: bad timestamp at line " + std::to_string(reader.line_number()));
        r.interval_start = *ts;
        if (!parse_int(fields[enr_col], r.enrolment_no) || r.enrolment_no < 0)
            throw ValidationError("schedule: bad enrolment at line " + std::to_string(reader.line_number()));
        schedule.push_back(std::move(r));
    }
    return schedule;
}

ApIndex index_ap_mapping(const std::vector<ApMapping>& mapping) {
    ApIndex index;
    index.reserve(mapping.size());
    for (const ApMapping& m : mapping) index.emplace(m.wifi_id, m.building_id);
    return index;
}

std::optional<AnonLogRecord> resolve_building(const RawLogRecord& record, const ApIndex& index, MacHasher& hasher,
                                              ResolveStats& stats) {
    auto it = index.find(record.wifi_id);
    if (it == index.end()) {
        ++stats.unmapped_ssid;
        return std::nullopt;
    }
    return AnonLogRecord{hasher.hash(record.mac_id), it->second, record.log_date};
}

std::string IngestReport::to_json() const {
    nlohmann::json j;
    j["rows_total"] = rows_total;
    j["rows_skipped"] = rows_skipped;
    j["unmapped_ssid"] = unmapped_ssid;
    j["records_out"] = records_out;
    return j.dump(2) + "\n";
}

IngestReport anonymize_logs(std::istream& raw_csv, const std::vector<ApMapping>& mapping, const std::string& salt,
                            std::ostream& anon_csv, const ColumnMap& columns) {
    csv::Reader reader(raw_csv);
    if (reader.header().empty()) throw ValidationError("log file has no header row");
    const std::size_t mac_col = require_column(reader, columns.mac_id);
    const std::size_t wifi_col = require_column(reader, columns.wifi_id);
    const std::size_t date_col = require_column(reader, columns.log_date);
    const std::size_t need = std::max({mac_col, wifi_col, date_col}) + 1;

    const ApIndex index = index_ap_mapping(mapping);
    MacHasher hasher(salt);
    IngestReport report;

    anon_csv << "hash_id,building_id,log_date\n";
    std::vector<std::string_view> fields;
    std::string mac;
    while (reader.next(fields)) {
        ++report.rows_total;
        if (fields.size() < need) {
            ++report.rows_skipped;
            continue;
        }
        const std::string_view mac_view = trim(fields[mac_col]);
        const std::string_view wifi = trim(fields[wifi_col]);
        const auto ts = parse_timestamp(trim(fields[date_col]));
        if (mac_view.empty() || wifi.empty() || !ts) {
            ++report.rows_skipped;
            continue;
        }
        auto it = index.find(std::string(wifi));
        if (it == index.end()) {
            ++report.unmapped_ssid;
            continue;
        }
        mac.assign(mac_view);
        anon_csv << hasher.hash(mac) << ',' << it->second << ',' << format_timestamp(*ts) << '\n';
        ++report.records_out;
    }
    return report;
}

std::vector<AnonLogRecord> load_anon_logs(std::istream& in) {
    csv::Reader reader(in);
    const std::size_t hash_col = require_column(reader, "hash_id");
    const std::size_t bld_col = require_column(reader, "building_id");
    const std::size_t date_col = require_column(reader, "log_date");
    std::vector<AnonLogRecord> records;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        if (fields.size() <= std::max({hash_col, bld_col, date_col})) continue;
        auto ts = parse_timestamp(trim(fields[date_col]));
        if (!ts) continue;
        records.push_back(
            AnonLogRecord{std::string(trim(fields[hash_col])), std::string(trim(fields[bld_col])), *ts});
    }
    return records;
}

}  // namespace odflow::ingest
