#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mfc0/core.hpp"

namespace mfc0 {

// --- SHA-1 -----------------------------------------------------------------
// Compact streaming implementation, used for content hashes in run manifests.

class Sha1 {
 public:
  void update(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    total_bits_ += static_cast<std::uint64_t>(len) * 8;
    while (len > 0) {
      const std::size_t take = std::min(len, sizeof(buffer_) - buffer_len_);
      std::memcpy(buffer_ + buffer_len_, p, take);
      buffer_len_ += take;
      p += take;
      len -= take;
      if (buffer_len_ == sizeof(buffer_)) {
        process(buffer_);
        buffer_len_ = 0;
      }
    }
  }

  std::string hex_digest() {
    const std::uint64_t bits = total_bits_;
    const unsigned char one = 0x80;
    update(&one, 1);
    const unsigned char zero = 0x00;
    while (buffer_len_ != 56) update(&zero, 1);
    unsigned char len_be[8];
    for (int i = 0; i < 8; ++i)
      len_be[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(len_be, 8);

    char out[41];
    for (int i = 0; i < 5; ++i)
      std::snprintf(out + 8 * i, 9, "%08x", h_[i]);
    return std::string(out, 40);
  }

 private:
  static std::uint32_t rol(std::uint32_t v, int s) {
    return (v << s) | (v >> (32 - s));
  }

  void process(const unsigned char* block) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t(block[4 * i]) << 24) |
             (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) |
             std::uint32_t(block[4 * i + 3]);
    }
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);

    std::uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3], e = h_[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      const std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h_[0] += a;
    h_[1] += b;
    h_[2] += c;
    h_[3] += d;
    h_[4] += e;
  }

  std::uint32_t h_[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u,
                         0xC3D2E1F0u};
  unsigned char buffer_[64];
  std::size_t buffer_len_ = 0;
  std::uint64_t total_bits_ = 0;
};

inline std::string sha1_hex(const std::string& bytes) {
  Sha1 h;
  h.update(bytes.data(), bytes.size());
  return h.hex_digest();
}

// Hash compatible with `git hash-object`: the blob header is prepended
// before digesting, so manifests can be checked against git itself.
inline std::string git_blob_hash(const std::string& bytes) {
  Sha1 h;
  const std::string header = "blob " + std::to_string(bytes.size());
  h.update(header.data(), header.size() + 1);  // includes the NUL
  h.update(bytes.data(), bytes.size());
  return h.hex_digest();
}

// --- files -----------------------------------------------------------------

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

// --- matrix CSV ------------------------------------------------------------
// Headerless numeric rows; leading '#' lines carry free-form metadata.
// Values are printed with 17 significant digits so a write/read round trip
// reproduces every double bit-exactly.

inline std::string format_matrix_csv(const Matrix& M,
                                     const std::vector<std::string>& banner = {}) {
  std::string out;
  for (const std::string& line : banner) {
    out += "# ";
    out += line;
    out += '\n';
  }
  char buf[64];
  for (int r = 0; r < M.rows(); ++r) {
    for (int c = 0; c < M.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", M(r, c));
      if (c > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline void write_matrix_csv(const std::string& path, const Matrix& M,
                             const std::vector<std::string>& banner = {}) {
  write_file_bytes(path, format_matrix_csv(M, banner));
}

inline Matrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size())
          throw std::invalid_argument("trailing garbage");
        row.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(lineno) + ", field " +
                        std::to_string(row.size() + 1) + ": not a number: '" +
                        field + "'");
      }
    }
    if (row.empty())
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": no fields");
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected " +
                      std::to_string(rows.front().size()) + " fields, got " +
                      std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "no data rows");

  Matrix M(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) M(r, c) = rows[r][c];
  return M;
}

inline Matrix read_matrix_csv(const std::string& path) {
  return parse_matrix_csv(read_file_bytes(path));
}

// --- PGM -------------------------------------------------------------------
// Binary 8-bit grayscale; intensities map |M| linearly onto [0, 255], so the
// heaviest entry of the matrix renders white.

inline void write_pgm(const std::string& path, const Matrix& M) {
  if (M.size() == 0) throw Error(ErrorCode::BadConfig, "empty matrix");
  const double peak = M.cwiseAbs().maxCoeff();
  std::string out = "P5\n" + std::to_string(M.cols()) + " " +
                    std::to_string(M.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(M.size()));
  for (int r = 0; r < M.rows(); ++r) {
    for (int c = 0; c < M.cols(); ++c) {
      const double v = peak > 0.0 ? std::abs(M(r, c)) / peak : 0.0;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
  }
  write_file_bytes(path, out);
}

// --- manifest --------------------------------------------------------------

inline std::string iso_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc;
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Ordered key=value lines describing one run and the files it produced.
inline void write_manifest(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [key, value] : entries) {
    if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos)
      throw Error(ErrorCode::BadConfig, "manifest key contains '=' or newline");
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  write_file_bytes(path, out);
}

}  // namespace mfc0
