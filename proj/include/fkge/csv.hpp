#ifndef FKGE_CSV_HPP
#define FKGE_CSV_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fkge::csv {

/// One row of the standard study record file. The header is fixed:
///   alpha,beta,eps,p,tau,N,t_final,e1,e1_max,order,energy_dev,iters_max
struct Record {
  double alpha = 0.0;
  double beta = 0.0;
  double eps = 0.0;
  int p = 1;
  double tau = 0.0;
  std::string n;  // "128" or "32x64"
  double t_final = 0.0;
  double e1 = std::numeric_limits<double>::quiet_NaN();
  double e1_max = std::numeric_limits<double>::quiet_NaN();
  double order = std::numeric_limits<double>::quiet_NaN();
  double energy_dev = std::numeric_limits<double>::quiet_NaN();
  int iters_max = -1;  // negative -> blank
};

inline constexpr const char* kRecordHeader =
    "alpha,beta,eps,p,tau,N,t_final,e1,e1_max,order,energy_dev,iters_max";

/// Scientific notation, 6 significant digits by default; NaN renders empty.
std::string format_number(double v, bool full_precision = false);

void write_records(const std::filesystem::path& file, std::span<const Record> rows,
                   bool full_precision = false);

/// Generic table writer for series / layout files (first row is the header).
void write_table(const std::filesystem::path& file,
                 const std::vector<std::vector<std::string>>& rows);

/// Matplotlib sidecar that plots the named CSV (referenced by relative path).
void write_plot_script(const std::filesystem::path& script, const std::string& csv_name,
                       const std::string& x_column, const std::string& y_column,
                       bool log_x, bool log_y);

}  // namespace fkge::csv

#endif
