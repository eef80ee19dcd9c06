#include "io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace vecgarch::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, int row, const std::string& what) {
  const std::string v = trim(cell);
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw data_error("row " + std::to_string(row) + ": bad " + what + " '" + v + "'");
  }
}

void format_value(char* buf, size_t cap, double v) {
  std::snprintf(buf, cap, "%.17g", v);
}

}  // namespace

PriceTable read_prices_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open price file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw data_error("price file is empty: " + path);
  auto header = split_csv_line(trim(line));
  if (header.size() < 2 || trim(header[0]) != "date")
    throw data_error("price file header must be 'date,TICKER1,...'");

  PriceTable table;
  for (size_t i = 1; i < header.size(); ++i) {
    const std::string t = trim(header[i]);
    if (t.empty()) throw data_error("price file header has an empty ticker name");
    table.tickers.push_back(t);
  }
  const int ncol = static_cast<int>(table.tickers.size());

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto cells = split_csv_line(t);
    if (static_cast<int>(cells.size()) != ncol + 1)
      throw data_error("row " + std::to_string(lineno) + ": expected " +
                       std::to_string(ncol + 1) + " cells, got " +
                       std::to_string(cells.size()));
    const std::string date = trim(cells[0]);
    if (date.empty())
      throw data_error("row " + std::to_string(lineno) + ": empty date");
    if (!table.dates.empty() && !(table.dates.back() < date))
      throw data_error("row " + std::to_string(lineno) +
                       ": dates are not strictly increasing");
    table.dates.push_back(date);
    std::vector<double> row(ncol);
    for (int j = 0; j < ncol; ++j) {
      row[j] = parse_cell(cells[j + 1], lineno, "price");
      if (!(row[j] > 0.0))
        throw data_error("row " + std::to_string(lineno) +
                         ": nonpositive price in column " + table.tickers[j]);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2)
    throw data_error("price file needs at least 2 rows to form returns");
  table.prices.resize(rows.size(), ncol);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < ncol; ++j) table.prices(i, j) = rows[i][j];
  return table;
}

Sample to_log_returns(const PriceTable& table, int n_select,
                      const std::string& date_from, const std::string& date_to) {
  const int ncol = static_cast<int>(table.tickers.size());
  int n = n_select > 0 ? n_select : ncol;
  if (n > ncol)
    throw config_error("requested " + std::to_string(n) + " series, file has " +
                       std::to_string(ncol));
  std::vector<int> keep;
  for (size_t i = 0; i < table.dates.size(); ++i) {
    if (!date_from.empty() && table.dates[i] < date_from) continue;
    if (!date_to.empty() && date_to < table.dates[i]) continue;
    keep.push_back(static_cast<int>(i));
  }
  if (keep.size() < 2)
    throw data_error("fewer than 2 rows remain after the date filter");

  Sample s;
  s.n = n;
  s.z.reserve(keep.size() - 1);
  for (size_t r = 1; r < keep.size(); ++r) {
    Vector z(n);
    for (int j = 0; j < n; ++j)
      z(j) = std::log(table.prices(keep[r], j)) -
             std::log(table.prices(keep[r - 1], j));
    s.z.push_back(z);
  }
  return s;
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      format_value(buf, sizeof buf, M(i, j));
      out << buf;
      if (j + 1 < M.cols()) out << ',';
    }
    out << '\n';
  }
  if (!out) throw data_error("write failed: " + path);
}

void write_vector_csv(const std::string& path, const Vector& v) {
  write_matrix_csv(path, Matrix(v));
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    auto cells = split_csv_line(t);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_cell(c, lineno, "value"));
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw data_error("row " + std::to_string(lineno) + ": ragged matrix row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error("matrix file is empty: " + path);
  Matrix M(rows.size(), width);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j) M(i, j) = rows[i][j];
  return M;
}

Vector read_vector_csv(const std::string& path) {
  const Matrix M = read_matrix_csv(path);
  if (M.cols() != 1)
    throw data_error("expected a single-column vector file: " + path);
  return M.col(0);
}

void write_prices_csv(const std::string& path,
                      const std::vector<std::string>& dates,
                      const std::vector<std::string>& tickers,
                      const Matrix& prices) {
  if (prices.rows() != static_cast<Eigen::Index>(dates.size()) ||
      prices.cols() != static_cast<Eigen::Index>(tickers.size()))
    throw std::invalid_argument("write_prices_csv: shape mismatch");
  std::ofstream out(path);
  if (!out) throw data_error("cannot open output file: " + path);
  out << "date";
  for (const auto& t : tickers) out << ',' << t;
  out << '\n';
  char buf[64];
  for (size_t i = 0; i < dates.size(); ++i) {
    out << dates[i];
    for (Eigen::Index j = 0; j < prices.cols(); ++j) {
      format_value(buf, sizeof buf, prices(static_cast<Eigen::Index>(i), j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw data_error("write failed: " + path);
}

std::vector<std::string> synthetic_dates(int count) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(count);
  sys_days day = sys_days(year{2000} / January / 3);
  char buf[16];
  for (int i = 0; i < count; ++i) {
    const year_month_day ymd(day);
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    out.emplace_back(buf);
    day += days{1};
  }
  return out;
}

}  // namespace vecgarch::io
