#include "lnlm/matrix_cache.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lnlm {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'N', 'L', 'M', 'M', 'A', 'T', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
    throw InputError("matrix cache truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

std::string CacheKey::file_name() const {
  std::ostringstream s;
  s << (kind == Kind::WalkMatrix ? "M" : "B") << '-' << std::hex << graph_hash << std::dec << "-T"
    << window << "-b" << neg_b << "-d" << dim << "-s" << seed << ".bin";
  return s.str();
}

void write_matrix_cache(const std::filesystem::path& path, const CacheKey& key, const Matrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write cache file " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(key.kind));
  put<std::uint64_t>(out, key.graph_hash);
  put<std::uint32_t>(out, key.window);
  put<double>(out, key.neg_b);
  put<std::uint32_t>(out, key.dim);
  put<std::uint64_t>(out, key.seed);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  } else {
    for (Eigen::Index i = 0; i < m.size(); ++i) put<double>(out, m.data()[i]);
  }
  if (!out) throw InputError("failed writing cache file " + path.string());
}

std::optional<Matrix> read_matrix_cache(const std::filesystem::path& path, const CacheKey& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw InputError("not a matrix cache file: " + path.string());
  CacheKey stored;
  stored.kind = static_cast<CacheKey::Kind>(get<std::uint32_t>(in));
  stored.graph_hash = get<std::uint64_t>(in);
  stored.window = get<std::uint32_t>(in);
  stored.neg_b = get<double>(in);
  stored.dim = get<std::uint32_t>(in);
  stored.seed = get<std::uint64_t>(in);
  if (!(stored == key)) return std::nullopt;
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = get<double>(in);
  return m;
}

}  // namespace lnlm
