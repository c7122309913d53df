#pragma once

// Binary PGM (P5) frames. Photon-counting frames are written with maxval 1.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "matrix.hpp"

namespace twinepr {

inline void write_pgm(const std::filesystem::path& path, const BinaryFrame& frame, int maxval = 1) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "P5\n" << frame.cols() << ' ' << frame.rows() << '\n' << maxval << '\n';
  auto d = frame.data();
  out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

namespace detail {

inline bool read_pgm_token(std::istream& in, std::string& tok) {
  tok.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (!std::isspace(ch)) break;
  }
  if (ch == EOF) return false;
  tok.push_back(static_cast<char>(ch));
  while ((ch = in.peek()) != EOF && !std::isspace(ch)) tok.push_back(static_cast<char>(in.get()));
  return true;
}

}  // namespace detail

/// Reads an 8-bit P5 image. Throws IoError naming the file on any malformed
/// header, pixel above maxval, or truncated data.
inline BinaryFrame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::string magic, w, h, mv;
  if (!detail::read_pgm_token(in, magic) || magic != "P5") throw IoError(path.string(), "not a binary PGM (P5)");
  if (!detail::read_pgm_token(in, w) || !detail::read_pgm_token(in, h) || !detail::read_pgm_token(in, mv))
    throw IoError(path.string(), "truncated PGM header");
  long cols = 0, rows = 0, maxval = 0;
  try {
    cols = std::stol(w);
    rows = std::stol(h);
    maxval = std::stol(mv);
  } catch (const std::exception&) {
    throw IoError(path.string(), "non-numeric PGM header field");
  }
  if (cols <= 0 || rows <= 0 || maxval <= 0 || maxval > 255) throw IoError(path.string(), "unsupported PGM header");
  in.get();  // single whitespace after maxval
  BinaryFrame frame(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  auto d = frame.data();
  in.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size()));
  if (in.gcount() != static_cast<std::streamsize>(d.size())) throw IoError(path.string(), "truncated pixel data");
  for (unsigned char v : d)
    if (v > maxval) throw IoError(path.string(), "pixel value exceeds maxval");
  return frame;
}

}  // namespace twinepr
