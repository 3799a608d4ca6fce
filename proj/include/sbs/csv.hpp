#pragma once

#include "sbs/types.hpp"

#include <string>
#include <vector>

namespace sbs::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 when absent
  int n_rows() const { return static_cast<int>(rows.size()); }
};

Table read_file(const std::string& path);

/// Fixed formatting for reproducible artifacts ('%.10g', '.' decimal).
std::string format(double v);

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace sbs::csv
