#pragma once

#include "lnlm/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace lnlm {

// Binary cache for the walk matrix M and the feature matrix B.
//
// Layout (all integers and floats little-endian):
//   8 bytes  magic "LNLMMAT1"
//   u32      kind (0 = M, 1 = B)
//   u64      graph hash
//   u32      window T
//   f64      negative sampling b
//   u32      feature dimension d
//   u64      seed
//   u64      rows
//   u64      cols
//   f64[rows*cols] row-major data
struct CacheKey {
  enum class Kind : std::uint32_t { WalkMatrix = 0, Features = 1 };
  Kind kind = Kind::WalkMatrix;
  std::uint64_t graph_hash = 0;
  std::uint32_t window = 0;
  double neg_b = 0.0;
  std::uint32_t dim = 0;
  std::uint64_t seed = 0;

  bool operator==(const CacheKey&) const = default;

  // File name unique to the key, e.g. "B-<hash>-T5-b1-d128-s7.bin".
  std::string file_name() const;
};

void write_matrix_cache(const std::filesystem::path& path, const CacheKey& key, const Matrix& m);

// nullopt when the file is missing or was written for a different key;
// throws InputError when the file is present but corrupt.
std::optional<Matrix> read_matrix_cache(const std::filesystem::path& path, const CacheKey& key);

}  // namespace lnlm
