#include "pecs/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace pecs {

namespace {

constexpr char kCksMagic[4] = {'C', 'K', 'S', '1'};
constexpr std::size_t kCksHeader = 13;  // magic + 2 x u32 + u8

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u32(buf, bits);
}

std::uint32_t take_u32(const std::string& buf, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
  }
  return v;
}

float take_f32(const std::string& buf, std::size_t off) {
  const std::uint32_t bits = take_u32(buf, off);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return buf;
}

}  // namespace

void write_cks(const ComplexGrid& g, const std::string& path) {
  std::string buf;
  buf.reserve(kCksHeader + g.size() * 8);
  buf.append(kCksMagic, 4);
  put_u32(buf, static_cast<std::uint32_t>(g.rows()));
  put_u32(buf, static_cast<std::uint32_t>(g.cols()));
  buf.push_back(static_cast<char>(static_cast<std::uint8_t>(g.domain())));
  for (const auto& v : g.data()) {
    put_f32(buf, static_cast<float>(v.real()));
    put_f32(buf, static_cast<float>(v.imag()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_cks: cannot open " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_cks: write failed for " + path);
}

ComplexGrid read_cks(const std::string& path) {
  const std::string buf = read_file(path);
  if (buf.size() < kCksHeader) {
    throw ParseError(path, buf.size(), "truncated header");
  }
  if (std::memcmp(buf.data(), kCksMagic, 4) != 0) {
    throw ParseError(path, 0, "bad magic");
  }
  const std::uint32_t rows = take_u32(buf, 4);
  const std::uint32_t cols = take_u32(buf, 8);
  const std::uint8_t tag = static_cast<std::uint8_t>(buf[12]);
  if (tag > 3) throw ParseError(path, 12, "unknown domain tag");
  if (rows < 2 || cols < 1 || rows > (1u << 20) || cols > (1u << 20)) {
    throw ParseError(path, 4, "implausible dimensions");
  }
  const std::size_t want = kCksHeader + static_cast<std::size_t>(rows) * cols * 8;
  if (buf.size() != want) {
    throw ParseError(path, buf.size(), "payload size disagrees with header");
  }
  std::vector<cdouble> values(static_cast<std::size_t>(rows) * cols);
  std::size_t off = kCksHeader;
  for (auto& v : values) {
    const float re = take_f32(buf, off);
    const float im = take_f32(buf, off + 4);
    v = cdouble{re, im};
    off += 8;
  }
  return ComplexGrid(static_cast<int>(rows), static_cast<int>(cols),
                     static_cast<Domain>(tag), std::move(values));
}

void export_pgm(const ComplexGrid& g, const std::string& path, bool center_shift) {
  const int rows = g.rows();
  const int cols = g.cols();
  std::vector<double> mag(g.size());
  double peak = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int rr = r, cc = c;
      if (center_shift) {
        rr = (r + rows / 2) % rows;  // display position of input bin (r, c)
        cc = (c + cols / 2) % cols;
      }
      const double m = std::abs(g(r, c));
      mag[static_cast<std::size_t>(rr) * cols + cc] = m;
      peak = std::max(peak, m);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_pgm: cannot open " + path);
  out << "P5\n" << cols << " " << rows << "\n65535\n";
  const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;
  for (double m : mag) {
    const auto v = static_cast<std::uint16_t>(std::lround(m * scale));
    const unsigned char hi = static_cast<unsigned char>(v >> 8);  // big-endian samples
    const unsigned char lo = static_cast<unsigned char>(v & 0xff);
    out.put(static_cast<char>(hi));
    out.put(static_cast<char>(lo));
  }
  if (!out) throw std::runtime_error("export_pgm: write failed for " + path);
}

void write_manifest(const std::vector<ManifestItem>& items, const std::string& path) {
  nlohmann::json j;
  j["items"] = nlohmann::json::array();
  for (const auto& item : items) {
    j["items"].push_back({{"path", item.path}, {"split", item.split}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write_manifest: write failed for " + path);
}

std::vector<ManifestItem> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("read_manifest: " + path + ": " + e.what());
  }
  if (!j.contains("items") || !j["items"].is_array()) {
    throw std::runtime_error("read_manifest: missing items array in " + path);
  }
  std::vector<ManifestItem> items;
  for (const auto& entry : j["items"]) {
    ManifestItem item;
    item.path = entry.at("path").get<std::string>();
    item.split = entry.at("split").get<std::string>();
    if (item.split != "train" && item.split != "val" && item.split != "test") {
      throw std::runtime_error("read_manifest: unknown split '" + item.split + "'");
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace pecs
