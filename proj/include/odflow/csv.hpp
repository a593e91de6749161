#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odflow::csv {

// Line-oriented reader for the comma-separated files this toolkit exchanges.
// Fields never contain commas or quotes in any of our schemas, so no quoting
// rules apply. Handles CRLF line endings and skips blank lines.
class Reader {
public:
    explicit Reader(std::istream& in);

    const std::vector<std::string>& header() const { return header_; }

    // Column index for `name`, or nullopt.
    std::optional<std::size_t> column(std::string_view name) const;

    // Advances to the next non-blank row. Views stay valid until the next call.
    bool next(std::vector<std::string_view>& fields);

    std::size_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    std::vector<std::string> header_;
    std::string line_;
    std::size_t line_number_ = 0;
};

std::string join_row(const std::vector<std::string>& fields);

}  // namespace odflow::csv
