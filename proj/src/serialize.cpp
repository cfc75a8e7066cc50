#include "leofl/serialize.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace leofl::nn {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'E', 'O', 'F', 'L', 'P', 'V', '\0'};

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> b{};
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T))) throw std::runtime_error("truncated parameter file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

struct ManifestEntry {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

std::vector<ManifestEntry> read_manifest(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("not a parameter file");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kParamFormatVersion) throw std::runtime_error("unsupported parameter file version");
  const auto count = get_le<std::uint32_t>(is);
  std::vector<ManifestEntry> m(count);
  for (auto& e : m) {
    const auto len = get_le<std::uint32_t>(is);
    e.name.resize(len);
    if (!is.read(e.name.data(), len)) throw std::runtime_error("truncated parameter manifest");
    e.rows = get_le<std::uint32_t>(is);
    e.cols = get_le<std::uint32_t>(is);
  }
  return m;
}

}  // namespace

void write_params(std::ostream& os, const ParamSet& params) {
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kParamFormatVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(params.items().size()));
  for (const auto& p : params.items()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.value.rows()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.value.cols()));
  }
  for (const auto& p : params.items()) {
    for (double v : p.value.values()) put_le<double>(os, v);
  }
  if (!os) throw std::runtime_error("failed writing parameters");
}

void read_params(std::istream& is, ParamSet& params) {
  const auto manifest = read_manifest(is);
  if (manifest.size() != params.items().size()) throw std::runtime_error("parameter manifest does not match model");
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& p = params.items()[i];
    if (manifest[i].name != p.name || manifest[i].rows != p.value.rows() || manifest[i].cols != p.value.cols()) {
      throw std::runtime_error("parameter manifest does not match model at " + manifest[i].name);
    }
  }
  for (auto& p : params.items()) {
    for (auto& v : p.value.values()) v = get_le<double>(is);
  }
}

ParamSet read_params(std::istream& is) {
  const auto manifest = read_manifest(is);
  ParamSet out;
  for (const auto& e : manifest) out.add(e.name, Tensor(e.rows, e.cols));
  for (auto& p : out.items()) {
    for (auto& v : p.value.values()) v = get_le<double>(is);
    p.zero_grad();
  }
  return out;
}

void save_params(const std::string& path, const ParamSet& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_params(os, params);
}

ParamSet load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_params(is);
}

}  // namespace leofl::nn
