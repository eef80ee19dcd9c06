#pragma once

#include <string>
#include <vector>

#include "types.hpp"

namespace vecgarch::io {

struct PriceTable {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Matrix prices;  // rows = dates, cols = tickers
};

// Reads `date,TICKER1,...` with ISO dates in ascending order and strictly
// positive prices.  Validation errors name the offending row.
PriceTable read_prices_csv(const std::string& path);

// Log returns of the first n_select columns (0 = all), optionally clipped to
// [date_from, date_to] by string comparison.
Sample to_log_returns(const PriceTable& table, int n_select = 0,
                      const std::string& date_from = "",
                      const std::string& date_to = "");

// Headerless numeric CSV, row per line, 17 significant digits.
void write_matrix_csv(const std::string& path, const Matrix& M);
void write_vector_csv(const std::string& path, const Vector& v);
Matrix read_matrix_csv(const std::string& path);
Vector read_vector_csv(const std::string& path);

// Price CSV writer used by the simulator (dates plus one column per series).
void write_prices_csv(const std::string& path,
                      const std::vector<std::string>& dates,
                      const std::vector<std::string>& tickers,
                      const Matrix& prices);

// ISO dates starting at 2000-01-03, one calendar day apart.
std::vector<std::string> synthetic_dates(int count);

}  // namespace vecgarch::io
