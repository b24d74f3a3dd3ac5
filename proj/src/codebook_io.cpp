#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "macfb/grassmann.hpp"

namespace macfb::grassmann {

static_assert(std::endian::native == std::endian::little, "codebook files are written in host order");

namespace {

constexpr char kMagic[8] = {'M', 'A', 'C', 'F', 'B', 'C', 'B', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 8 + 4 * 4 + 3 * 8;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T take(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw std::runtime_error("decode_codebook: truncated input");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_codebook(const Codebook& book) {
  const auto n = static_cast<std::size_t>(book.ambient_dim());
  const auto m = static_cast<std::size_t>(book.components());
  const auto k = static_cast<std::size_t>(book.size());
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + k * m * n * 16);
  for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m));
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, k);
  put<std::uint64_t>(out, book.master_seed());
  put<std::uint64_t>(out, book.stream_id());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto& block = book.component_block(static_cast<int>(j));
      for (std::size_t i = 0; i < n; ++i) {
        const Complex z = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
        put<double>(out, z.real());
        put<double>(out, z.imag());
      }
    }
  }
  return out;
}

Codebook decode_codebook(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("decode_codebook: not a codebook file");
  }
  std::size_t pos = sizeof(kMagic);
  if (take<std::uint32_t>(bytes, pos) != kVersion) throw std::runtime_error("decode_codebook: unsupported version");
  const auto n = take<std::uint32_t>(bytes, pos);
  const auto m = take<std::uint32_t>(bytes, pos);
  take<std::uint32_t>(bytes, pos);
  const auto k = take<std::uint64_t>(bytes, pos);
  const auto seed = take<std::uint64_t>(bytes, pos);
  const auto stream = take<std::uint64_t>(bytes, pos);
  if (n < 1 || m < 1 || k < 1 || k > static_cast<std::uint64_t>(kMaxCodebookSize) || n > 4096 || m > 4096) {
    throw std::runtime_error("decode_codebook: header out of range");
  }
  if (bytes.size() != kHeaderBytes + k * m * n * 16) throw std::runtime_error("decode_codebook: size mismatch");
  std::vector<Eigen::MatrixXcd> blocks(m, Eigen::MatrixXcd(n, static_cast<Eigen::Index>(k)));
  for (std::uint64_t c = 0; c < k; ++c) {
    for (std::uint32_t j = 0; j < m; ++j) {
      for (std::uint32_t i = 0; i < n; ++i) {
        const double re = take<double>(bytes, pos);
        const double im = take<double>(bytes, pos);
        blocks[j](i, static_cast<Eigen::Index>(c)) = Complex(re, im);
      }
    }
  }
  return Codebook(static_cast<int>(n), static_cast<int>(m), static_cast<std::int64_t>(k), std::move(blocks), seed,
                  stream);
}

void write_codebook(const std::filesystem::path& path, const Codebook& book) {
  const auto bytes = encode_codebook(book);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_codebook: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write_codebook: write failed for " + path.string());
}

Codebook read_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_codebook: cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_codebook(bytes);
}

}  // namespace macfb::grassmann
