#pragma once

#include <iosfwd>
#include <string>

#include "leofl/autodiff.hpp"

namespace leofl::nn {

// Binary parameter checkpoint:
//   "LEOFLPV" '\0' | u32 version | u32 tensor_count
//   per tensor: u32 name_len | name bytes | u32 rows | u32 cols
//   payload: all values, flat, little-endian IEEE-754 binary64, in manifest order
inline constexpr std::uint32_t kParamFormatVersion = 1;

void write_params(std::ostream& os, const ParamSet& params);
// Reads into `params`, whose layout must match the stored manifest.
void read_params(std::istream& is, ParamSet& params);
// Reads a standalone set (names and shapes from the manifest).
ParamSet read_params(std::istream& is);

void save_params(const std::string& path, const ParamSet& params);
ParamSet load_params(const std::string& path);

}  // namespace leofl::nn
