// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "irsense/tensor.hpp"
#include "irsense/types.hpp"

namespace irsense {

// Self-describing binary container: 8-byte magic, three little-endian u32
// dims (n1, n2, n3), then n1*n2*n3 complex entries as interleaved
// little-endian IEEE-754 doubles (re, im) in flat storage order (first
// index fastest). Round trips are bit-exact.
inline constexpr char kTensorMagic[8] = {'I', 'R', 'T', 'N', 'S', 'R', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "tensor container assumes a little-endian host");

inline void write_tensor(const Tensor3& t, std::ostream& os) {
  os.write(kTensorMagic, sizeof(kTensorMagic));
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(t.n1()),
                                 static_cast<std::uint32_t>(t.n2()),
                                 static_cast<std::uint32_t>(t.n3())};
  os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  os.write(reinterpret_cast<const char*>(t.data().data()),
           static_cast<std::streamsize>(t.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("write_tensor: stream write failed");
}

inline void write_tensor(const Tensor3& t, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_tensor: cannot open " + path.string());
  write_tensor(t, os);
}

inline Tensor3 read_tensor(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kTensorMagic, sizeof(magic)) != 0)
    throw std::runtime_error("read_tensor: bad magic, not a tensor container");
  std::uint32_t dims[3];
  is.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!is || dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw std::runtime_error("read_tensor: invalid dimensions");
  Tensor3 t(dims[0], dims[1], dims[2]);
  is.read(reinterpret_cast<char*>(t.data().data()),
          static_cast<std::streamsize>(t.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_tensor: truncated payload");
  return t;
}

inline Tensor3 read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_tensor: cannot open " + path.string());
  return read_tensor(is);
}

}  // namespace irsense
