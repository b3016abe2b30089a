#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dqk {

/// Header plus rows of numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Writes numbers with 17 significant digits so they re-parse exactly.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Matrix as CSV with the given column names (or c0, c1, ... when empty).
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& column_names = {});
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

struct PlotSeries {
    std::string label;
    std::vector<double> values;
};

/// Line chart of several series over a shared x axis, written as standalone SVG.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series);

}  // namespace dqk
