#include "mgfno/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace mgfno {

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(std::span<const double> values) {
    out_.reserve(out_.size() + 8 * values.size());
    for (double v : values) u64(std::bit_cast<std::uint64_t>(v));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw std::runtime_error("truncated file: needed " + std::to_string(n) +
                                                        " bytes at offset " + std::to_string(pos_));
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  void f64(std::span<double> out) {
    need(8 * out.size());
    for (auto& v : out) v = std::bit_cast<double>(u64());
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

Shape read_shape(Reader& r) {
  const std::uint32_t ndim = r.u32();
  if (ndim == 0 || ndim > 8) throw std::runtime_error("invalid rank " + std::to_string(ndim));
  Shape s(ndim);
  for (auto& e : s) {
    e = r.u64();
    if (e == 0) throw std::runtime_error("zero extent in file header");
  }
  return s;
}

}  // namespace

Shape Dataset::grid() const { return Shape(inputs.shape().begin() + 1, inputs.shape().end()); }

Tensor Dataset::input(std::size_t i) const {
  if (i >= count()) throw std::out_of_range("sample index out of range");
  const std::size_t m = shape_size(grid());
  return Tensor(grid(), std::vector<double>(inputs.storage().begin() + i * m, inputs.storage().begin() + (i + 1) * m));
}

Tensor Dataset::output(std::size_t i) const {
  if (i >= count()) throw std::out_of_range("sample index out of range");
  const std::size_t m = shape_size(grid());
  return Tensor(grid(),
                std::vector<double>(outputs.storage().begin() + i * m, outputs.storage().begin() + (i + 1) * m));
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > count()) throw std::out_of_range("invalid dataset slice");
  std::vector<Tensor> a, u;
  for (std::size_t i = begin; i < end; ++i) {
    a.push_back(input(i));
    u.push_back(output(i));
  }
  return Dataset{stack(a), stack(u), metadata};
}

Tensor stack(const std::vector<Tensor>& samples) {
  if (samples.empty()) throw std::invalid_argument("stack of zero samples");
  Shape s{samples.size()};
  s.insert(s.end(), samples[0].shape().begin(), samples[0].shape().end());
  std::vector<double> data;
  data.reserve(shape_size(s));
  for (const auto& t : samples) {
    require_same_shape(t.shape(), samples[0].shape(), "stack");
    data.insert(data.end(), t.storage().begin(), t.storage().end());
  }
  return Tensor(std::move(s), std::move(data));
}

std::vector<std::uint8_t> dataset_bytes(const Dataset& ds) {
  require_same_shape(ds.inputs.shape(), ds.outputs.shape(), "dataset inputs/outputs");
  Writer w;
  w.bytes("MGFD", 4);
  w.u32(kVersion);
  const Shape grid = ds.grid();
  w.u32(static_cast<std::uint32_t>(grid.size()));
  for (auto e : grid) w.u64(e);
  w.u64(ds.count());
  w.f64(ds.inputs.data());
  w.f64(ds.outputs.data());
  const std::string meta = ds.metadata.dump();
  w.u64(meta.size());
  w.bytes(meta.data(), meta.size());
  return w.take();
}

Dataset dataset_from_bytes(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.str(4) != "MGFD") throw std::runtime_error("bad magic: not an MGFD file");
  if (const auto v = r.u32(); v != kVersion) throw std::runtime_error("unsupported MGFD version " + std::to_string(v));
  const Shape grid = read_shape(r);
  const std::uint64_t n = r.u64();
  if (n == 0) throw std::runtime_error("MGFD file holds zero samples");
  Shape full{n};
  full.insert(full.end(), grid.begin(), grid.end());
  // Validate the declared size before allocating.
  r.need(2 * 8 * shape_size(full));
  Dataset ds{Tensor(full), Tensor(full), {}};
  r.f64(ds.inputs.data());
  r.f64(ds.outputs.data());
  const std::uint64_t len = r.u64();
  ds.metadata = nlohmann::json::parse(r.str(len));
  if (!r.done()) throw std::runtime_error("trailing bytes after MGFD metadata");
  return ds;
}

void dataset_write(const Dataset& ds, const std::filesystem::path& path) { write_file(dataset_bytes(ds), path); }

Dataset dataset_read(const std::filesystem::path& path) { return dataset_from_bytes(read_file(path)); }

void archive_write(const std::vector<NamedTensor>& entries, const std::filesystem::path& path) {
  Writer w;
  w.bytes("MGFT", 4);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    w.u32(static_cast<std::uint32_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    const bool cplx = is_complex(e.value);
    w.u8(cplx ? 1 : 0);
    const Shape& s = data_shape(e.value);
    w.u32(static_cast<std::uint32_t>(s.size()));
    for (auto x : s) w.u64(x);
    if (cplx) {
      const auto& c = std::get<ComplexTensor>(e.value);
      w.f64(c.re());
      w.f64(c.im());
    } else {
      w.f64(std::get<Tensor>(e.value).data());
    }
  }
  write_file(w.take(), path);
}

std::vector<NamedTensor> archive_read(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  Reader r(bytes);
  if (r.str(4) != "MGFT") throw std::runtime_error("bad magic: not an MGFT archive");
  if (const auto v = r.u32(); v != kVersion) throw std::runtime_error("unsupported MGFT version " + std::to_string(v));
  const std::uint32_t count = r.u32();
  std::vector<NamedTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor e;
    e.name = r.str(r.u32());
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw std::runtime_error("unknown tensor kind in archive");
    const Shape s = read_shape(r);
    r.need(8 * shape_size(s) * (kind + 1));
    if (kind == 1) {
      ComplexTensor c(s);
      r.f64(c.re());
      r.f64(c.im());
      e.value = std::move(c);
    } else {
      Tensor t(s);
      r.f64(t.data());
      e.value = std::move(t);
    }
    out.push_back(std::move(e));
  }
  if (!r.done()) throw std::runtime_error("trailing bytes in MGFT archive");
  return out;
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

}  // namespace mgfno
