#include "glx/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace glx {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string low;
  for (char ch : cell) low += static_cast<char>(std::tolower(
      static_cast<unsigned char>(ch)));
  return low == "nan" || low == "na";
}

void atomic_write(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("rename failed writing " + path);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& text) {
  atomic_write(path, text);
}

void write_matrix_market(const std::string& path,
                         const SparseSymmetricMatrix& m) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  const int d = m.dim();
  std::int64_t lines = d + m.nnz_offdiag();
  out << d << ' ' << d << ' ' << lines << '\n';
  for (int i = 0; i < d; ++i)
    out << (i + 1) << ' ' << (i + 1) << ' ' << format_double(m.diagonal()[i])
        << '\n';
  for (const auto& e : m.offdiag())
    out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << format_double(e.value)
        << '\n';
  atomic_write(path, out.str());
}

SparseSymmetricMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;

  // Header.
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" ||
        format != "coordinate" || field != "real" || symmetry != "symmetric")
      throw IoError(
          "expected a 'matrix coordinate real symmetric' header in " + path);
  }
  // Comments, then the size line.
  do {
    if (!std::getline(in, line)) throw IoError("missing size line: " + path);
  } while (!line.empty() && line[0] == '%');
  std::int64_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz))
      throw IoError("bad size line: " + path);
  }
  if (rows != cols || rows < 1)
    throw IoError("matrix must be square and nonempty: " + path);
  const int d = static_cast<int>(rows);

  SparseSymmetricMatrix m(d);
  std::vector<char> diag_seen(d, 0);
  std::int64_t seen = 0;
  while (seen < nnz) {
    if (!std::getline(in, line))
      throw IoError("fewer entries than declared: " + path);
    const std::string t = trimmed(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream ss(t);
    std::int64_t i1 = 0, j1 = 0;
    double v = 0.0;
    if (!(ss >> i1 >> j1 >> v)) throw IoError("bad entry line: " + path);
    ++seen;
    if (i1 < 1 || i1 > d || j1 < 1 || j1 > d)
      throw IoError("entry index out of range: " + path);
    if (!std::isfinite(v)) throw IoError("non-finite entry: " + path);
    const int i = static_cast<int>(i1 - 1), j = static_cast<int>(j1 - 1);
    if (i == j) {
      if (diag_seen[i]) throw IoError("duplicate diagonal entry: " + path);
      diag_seen[i] = 1;
      m.mutable_diagonal()[i] = v;
    } else {
      if (i < j)
        throw IoError(
            "upper-triangle entry in a symmetric coordinate file: " + path);
      if (v != 0.0) m.push_offdiag(i, j, v);
    }
  }
  try {
    m.finalize();
  } catch (const DimensionMismatchError&) {
    throw IoError("duplicate off-diagonal entry: " + path);
  }
  return m;
}

SampleSet read_samples_csv(const std::string& path, MissingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  // Header row: column names (ignored beyond the count).
  std::size_t ncols = std::count(line.begin(), line.end(), ',') + 1;

  std::vector<std::vector<double>> rows;  // NaN marks missing
  bool any_missing = false;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) continue;
    std::vector<double> row;
    row.reserve(ncols);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const std::string t = trimmed(cell);
      if (is_missing(t)) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        any_missing = true;
      } else {
        try {
          std::size_t used = 0;
          const double v = std::stod(t, &used);
          if (used != t.size()) throw std::invalid_argument(t);
          row.push_back(v);
        } catch (const std::exception&) {
          throw IoError("unparseable cell '" + t + "' in " + path);
        }
      }
    }
    if (!line.empty() && line.back() == ',')
      row.push_back(std::numeric_limits<double>::quiet_NaN()),
          any_missing = true;
    if (row.size() != ncols)
      throw IoError("inconsistent column count in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in " + path);

  if (any_missing) {
    if (policy == MissingPolicy::drop_rows) {
      std::erase_if(rows, [](const std::vector<double>& r) {
        return std::any_of(r.begin(), r.end(),
                           [](double v) { return std::isnan(v); });
      });
      if (rows.empty())
        throw IoError("every observation has missing cells: " + path);
    } else {
      // Per-column linear interpolation on the row index; boundary runs take
      // the nearest observed value. Fully missing columns are an error.
      const std::size_t n = rows.size();
      for (std::size_t cidx = 0; cidx < ncols; ++cidx) {
        std::vector<std::size_t> obs;
        for (std::size_t r = 0; r < n; ++r)
          if (!std::isnan(rows[r][cidx])) obs.push_back(r);
        if (obs.empty())
          throw IoError("column " + std::to_string(cidx) +
                        " has no observed values: " + path);
        for (std::size_t r = 0; r < n; ++r) {
          if (!std::isnan(rows[r][cidx])) continue;
          auto it = std::lower_bound(obs.begin(), obs.end(), r);
          if (it == obs.begin()) {
            rows[r][cidx] = rows[obs.front()][cidx];
          } else if (it == obs.end()) {
            rows[r][cidx] = rows[obs.back()][cidx];
          } else {
            const std::size_t hi = *it, lo = *(it - 1);
            const double w = static_cast<double>(r - lo) /
                             static_cast<double>(hi - lo);
            rows[r][cidx] =
                (1.0 - w) * rows[lo][cidx] + w * rows[hi][cidx];
          }
        }
      }
    }
  }

  SampleSet s;
  s.rows.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(ncols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t cidx = 0; cidx < ncols; ++cidx)
      s.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cidx)) =
          rows[r][cidx];
  return s;
}

void write_samples_csv(const std::string& path, const SampleSet& s) {
  std::ostringstream out;
  for (int j = 0; j < s.d(); ++j) out << (j ? "," : "") << "x" << j;
  out << '\n';
  for (int r = 0; r < s.n(); ++r) {
    for (int j = 0; j < s.d(); ++j)
      out << (j ? "," : "") << format_double(s.rows(r, j));
    out << '\n';
  }
  atomic_write(path, out.str());
}

}  // namespace glx
