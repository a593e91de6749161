#include "odflow/csv.hpp"

#include "odflow/common.hpp"

namespace odflow::csv {

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Reader::Reader(std::istream& in) : in_(in) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        split_fields(line, ',', fields);
        header_.reserve(fields.size());
        for (auto f : fields) header_.emplace_back(trim(f));
        break;
    }
}

std::optional<std::size_t> Reader::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return i;
    }
    return std::nullopt;
}

bool Reader::next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
        ++line_number_;
        strip_cr(line_);
        if (line_.empty()) continue;
        split_fields(line_, ',', fields);
        return true;
    }
    return false;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += fields[i];
    }
    out.push_back('\n');
    return out;
}

}  // namespace odflow::csv
