#pragma once

#include <string>

#include "spectran/numkit/matrix.hpp"

namespace spectran::dataio {

using numkit::Matrix;

// EMB1 binary format: magic "EMB1", uint32-le rows, uint32-le cols, then
// rows*cols IEEE-754 float32 values row-major.

Matrix read_emb1(const std::string& path);
void write_emb1(const std::string& path, const Matrix& m);

/// Comma-separated values, one embedding row per line.
Matrix read_embedding_csv(const std::string& path);

/// Dispatch on the EMB1 magic; anything else is parsed as CSV.
/// Rejects non-finite entries with a data error.
Matrix load_embedding_matrix(const std::string& path);

}  // namespace spectran::dataio
