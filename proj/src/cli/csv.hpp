#pragma once

#include <complex>
#include <ostream>
#include <string>
#include <vector>

namespace galpha::cli {

/// Real formatted with %.17g.
std::string format_real(double x);
std::string format_real(long double x);

/// A CSV table: header, data rows and optional footer rows, all comma-separated.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    class Row {
    public:
        Row& real(double x);
        Row& real(long double x);
        /// Complex value as two columns (re, im).
        Row& complex(std::complex<double> z);
        Row& integer(long long n);
        Row& text(std::string s);
        Row& empty();

    private:
        friend class CsvTable;
        std::vector<std::string> fields_;
    };

    Row& add_row();
    Row& add_footer();

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

    /// Throws std::logic_error if a row's width differs from the header.
    void write(std::ostream& out) const;

private:
    std::vector<std::string> header_;
    std::vector<Row> rows_;
    std::vector<Row> footer_;
};

} // namespace galpha::cli
