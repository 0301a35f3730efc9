#include "cli/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace galpha::cli {

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_real(long double x) { return format_real(static_cast<double>(x)); }

CsvTable::Row& CsvTable::Row::real(double x) {
    fields_.push_back(format_real(x));
    return *this;
}

CsvTable::Row& CsvTable::Row::real(long double x) { return real(static_cast<double>(x)); }

CsvTable::Row& CsvTable::Row::complex(std::complex<double> z) {
    real(z.real());
    return real(z.imag());
}

CsvTable::Row& CsvTable::Row::integer(long long n) {
    fields_.push_back(std::to_string(n));
    return *this;
}

CsvTable::Row& CsvTable::Row::text(std::string s) {
    fields_.push_back(std::move(s));
    return *this;
}

CsvTable::Row& CsvTable::Row::empty() {
    fields_.emplace_back();
    return *this;
}

CsvTable::Row& CsvTable::add_row() { return rows_.emplace_back(); }

CsvTable::Row& CsvTable::add_footer() { return footer_.emplace_back(); }

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields, std::size_t width) {
    if (fields.size() != width) {
        throw std::logic_error("csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(width));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

} // namespace

void CsvTable::write(std::ostream& out) const {
    write_line(out, header_, header_.size());
    for (const auto& r : rows_) write_line(out, r.fields_, header_.size());
    for (const auto& r : footer_) write_line(out, r.fields_, header_.size());
}

} // namespace galpha::cli
