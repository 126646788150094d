#include "fkge/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fkge::csv {

std::string format_number(double v, bool full_precision) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), full_precision ? "%.17g" : "%.6e", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

}  // namespace

void write_records(const std::filesystem::path& file, std::span<const Record> rows,
                   bool full_precision) {
  auto out = open_out(file);
  out << kRecordHeader << "\n";
  for (const auto& r : rows) {
    out << format_number(r.alpha, full_precision) << ',' << format_number(r.beta, full_precision)
        << ',' << format_number(r.eps, full_precision) << ',' << r.p << ','
        << format_number(r.tau, full_precision) << ',' << r.n << ','
        << format_number(r.t_final, full_precision) << ',' << format_number(r.e1, full_precision)
        << ',' << format_number(r.e1_max, full_precision) << ','
        << format_number(r.order, full_precision) << ','
        << format_number(r.energy_dev, full_precision) << ',';
    if (r.iters_max >= 0) out << r.iters_max;
    out << "\n";
  }
}

void write_table(const std::filesystem::path& file,
                 const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(file);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << "\n";
  }
}

void write_plot_script(const std::filesystem::path& script, const std::string& csv_name,
                       const std::string& x_column, const std::string& y_column,
                       bool log_x, bool log_y) {
  auto out = open_out(script);
  out << "#!/usr/bin/env python3\n"
         "# Plots "
      << csv_name
      << " (expected next to this script).\n"
         "import csv, os\n"
         "import matplotlib.pyplot as plt\n\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "xs, ys = [], []\n"
         "with open(os.path.join(here, '"
      << csv_name
      << "')) as fh:\n"
         "    for row in csv.DictReader(fh):\n"
         "        if row.get('"
      << x_column << "') and row.get('" << y_column
      << "'):\n"
         "            xs.append(float(row['"
      << x_column << "']))\n"
         "            ys.append(float(row['"
      << y_column
      << "']))\n"
         "plt.plot(xs, ys, 'o-')\n";
  if (log_x) out << "plt.xscale('log')\n";
  if (log_y) out << "plt.yscale('log')\n";
  out << "plt.xlabel('" << x_column << "')\nplt.ylabel('" << y_column
      << "')\nplt.grid(True, which='both', alpha=0.3)\n"
         "plt.savefig(os.path.join(here, '"
      << csv_name
      << ".png'), dpi=150)\n"
         "print('wrote "
      << csv_name << ".png')\n";
}

}  // namespace fkge::csv
