#include "koopuq/numeric/format.hpp"

#include <charconv>
#include <system_error>

#include "koopuq/errors.hpp"

namespace koopuq::numeric {

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, const std::string& context) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    const char* end = last;
    while (end > first && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;

    double value = 0.0;
    const auto res = std::from_chars(first, end, value);
    if (res.ec != std::errc() || res.ptr != end || first == end)
        throw data_error(context + ": cannot parse '" + cell + "' as a number");
    return value;
}

}  // namespace koopuq::numeric
