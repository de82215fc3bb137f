#include "viab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "viab/common.hpp"

namespace viab::csv {

std::string format(double v)
{
    if (std::isnan(v)) return "nan";
    if (v >= kInfTime) return "inf";
    if (v <= -kInfTime) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_header(std::ostream& os, const std::vector<std::string>& columns)
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ',';
        os << columns[i];
    }
    os << '\n';
}

Row::~Row() { os_ << '\n'; }

void Row::sep()
{
    if (!first_) os_ << ',';
    first_ = false;
}

Row& Row::operator<<(double v)
{
    sep();
    os_ << format(v);
    return *this;
}

Row& Row::operator<<(const std::string& cell)
{
    sep();
    os_ << cell;
    return *this;
}

}  // namespace viab::csv
