#pragma once

// File formats: Matrix Market coordinate real symmetric (1-based, lower
// triangle, 17 significant digits -- lossless double round-trip) and headered
// CSV sample files with missing-value handling.

#include "glx/covariance.hpp"
#include "glx/numerics.hpp"

#include <stdexcept>
#include <string>

namespace glx {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes the diagonal and strictly-lower stored entries in coordinate
// symmetric format. Atomic: temp file + rename.
void write_matrix_market(const std::string& path,
                         const SparseSymmetricMatrix& m);

SparseSymmetricMatrix read_matrix_market(const std::string& path);

enum class MissingPolicy {
  drop_rows,    // delete observations with any missing cell (default)
  linear_time,  // per-column linear interpolation on the row index, ends held
};

// Headered CSV, rows = observations. Empty cells, "nan", and "NA" are
// missing. Column count must be constant.
SampleSet read_samples_csv(const std::string& path,
                           MissingPolicy policy = MissingPolicy::drop_rows);

void write_samples_csv(const std::string& path, const SampleSet& s);

// Writes `text` atomically (temp + rename); used for reports.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace glx
