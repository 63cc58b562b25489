#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pecs/grid.hpp"

namespace pecs {

// Malformed binary input; carries the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t offset, const std::string& what)
      : std::runtime_error(path + ": " + what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Complex grid container, little-endian:
//   "CKS1" (4 bytes), u32 rows, u32 cols, u8 domain tag
//   (0=Image 1=KSpace 2=HybridF 3=HybridP),
//   rows*cols (f32 re, f32 im) pairs, row-major.
// 13-byte header; values round-trip exactly at f32 precision.
void write_cks(const ComplexGrid& g, const std::string& path);
ComplexGrid read_cks(const std::string& path);

// 16-bit binary PGM of the magnitude image, linearly scaled so the peak
// maps to 65535 (an all-zero grid exports all zeros). center_shift rotates
// the DC bin to the geometric center for display (PSF exports).
void export_pgm(const ComplexGrid& g, const std::string& path, bool center_shift);

// Dataset manifest: JSON { "items": [ {"path": ..., "split": ...}, ... ] }
// with split in {"train", "val", "test"}. Paths are kept verbatim.
struct ManifestItem {
  std::string path;
  std::string split;
};

void write_manifest(const std::vector<ManifestItem>& items, const std::string& path);
std::vector<ManifestItem> read_manifest(const std::string& path);

}  // namespace pecs
