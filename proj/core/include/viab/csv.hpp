#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace viab::csv {

/// 17 significant digits; values at or beyond the sentinel print as inf/-inf.
std::string format(double v);

void write_header(std::ostream& os, const std::vector<std::string>& columns);

/// Comma-joins streamed cells and terminates the line on destruction.
class Row {
public:
    explicit Row(std::ostream& os) : os_(os) {}
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;
    ~Row();

    Row& operator<<(double v);
    Row& operator<<(const std::string& cell);

private:
    void sep();

    std::ostream& os_;
    bool first_ = true;
};

}  // namespace viab::csv
