#ifndef SEMAUTO_IO_UTIL_HPP
#define SEMAUTO_IO_UTIL_HPP

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>

#include "semauto/errors.hpp"

namespace semauto {

// streambuf over zlib's gzFile. gzread passes non-gzip bytes through
// unchanged, so one opener serves both plain and .gz inputs.
class GzInputBuf : public std::streambuf {
 public:
  explicit GzInputBuf(const std::string& path) {
    file_ = gzopen(path.c_str(), "rb");
    if (file_ == nullptr) throw Error("cannot open input file: " + path);
    setg(buf_, buf_, buf_);
  }
  GzInputBuf(const GzInputBuf&) = delete;
  GzInputBuf& operator=(const GzInputBuf&) = delete;
  ~GzInputBuf() override {
    if (file_ != nullptr) gzclose(file_);
  }

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const int n = gzread(file_, buf_, sizeof(buf_));
    if (n <= 0) return traits_type::eof();
    setg(buf_, buf_, buf_ + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_ = nullptr;
  char buf_[1 << 16];
};

class GzInputStream : public std::istream {
 public:
  explicit GzInputStream(const std::string& path) : std::istream(nullptr), buf_(path) {
    rdbuf(&buf_);
  }

 private:
  GzInputBuf buf_;
};

inline std::unique_ptr<std::istream> open_input(const std::string& path) {
  return std::make_unique<GzInputStream>(path);
}

// Write-to-temp-then-rename so readers never observe a half-written artifact
// and re-runs are idempotent.
class AtomicFile {
 public:
  explicit AtomicFile(const std::string& path)
      : path_(path), tmp_(path + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open output file: " + tmp_);
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw Error("write failed: " + tmp_);
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

inline void atomic_write_file(const std::string& path, const std::string& content) {
  AtomicFile f(path);
  f.stream() << content;
  f.commit();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace semauto

#endif  // SEMAUTO_IO_UTIL_HPP
