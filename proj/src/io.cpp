#include "dqk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dqk {

namespace {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    std::ofstream out = open_out(path);
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::invalid_argument("csv row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv '" + path.string() + "'");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) row.push_back(std::stod(cell));
        if (row.size() != t.header.size()) throw std::runtime_error("ragged csv '" + path.string() + "'");
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& column_names)
{
    CsvTable t;
    if (column_names.empty()) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) t.header.push_back("c" + std::to_string(c));
    } else {
        if (static_cast<Eigen::Index>(column_names.size()) != m.cols())
            throw std::invalid_argument("column name count differs from matrix width");
        t.header = column_names;
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path)
{
    const CsvTable t = read_csv(path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.header.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[r][c];
    return m;
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series)
{
    constexpr double W = 800, H = 420, L = 70, R = 170, T = 40, B = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    double xmin = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
    double xmax = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : series) {
        if (s.values.size() != x.size()) throw std::invalid_argument("plot series length differs from x axis");
        for (double v : s.values)
            if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
    if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
    if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;

    auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
        << "</text>\n";
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double yv = ymin + (ymax - ymin) * i / 4.0, xv = xmin + (xmax - xmin) * i / 4.0;
        out << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(yv) << "\" y2=\"" << py(yv)
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << format_number(
                   std::round(yv * 1e4) / 1e4)
            << "</text>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
            << format_number(std::round(xv * 1e3) / 1e3) << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
        << escape_xml(x_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::isfinite(series[s].values[i])) out << px(x[i]) << ',' << py(series[s].values[i]) << ' ';
        out << "\"/>\n";
        const double ly = T + 14 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << W - R + 12 << "\" x2=\"" << W - R + 36 << "\" y1=\"" << ly - 4 << "\" y2=\""
            << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << W - R + 42 << "\" y=\"" << ly << "\">" << escape_xml(series[s].label)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace dqk
