#include "spectran/adapter/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spectran/errors.hpp"

namespace spectran::adapter {

namespace {

void write_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint64_t read_u64le(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void write_u64le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

}  // namespace

bool Checkpoint::has(const std::string& name) const {
  for (const auto& [n, _] : tensors)
    if (n == name) return true;
  return false;
}

const numkit::Matrix& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return m;
  throw DataError("checkpoint: missing tensor '" + name + "'");
}

double Checkpoint::meta(const std::string& name) const { return tensor(name)(0, 0); }

void Checkpoint::set(const std::string& name, numkit::Matrix m) {
  for (auto& [n, t] : tensors)
    if (n == name) {
      t = std::move(m);
      return;
    }
  tensors.emplace_back(name, std::move(m));
}

void Checkpoint::set_meta(const std::string& name, double v) { set(name, numkit::Matrix(1, 1, v)); }

Checkpoint Checkpoint::from_params(const numkit::ParamStore& params) {
  Checkpoint c;
  for (const auto& e : params.entries()) c.tensors.emplace_back(e.name, e.value);
  return c;
}

void Checkpoint::restore_params(numkit::ParamStore& params) const {
  for (auto& e : params.entries()) {
    const numkit::Matrix& t = tensor(e.name);
    if (!t.same_shape(e.value))
      throw ConfigError("checkpoint: tensor '" + e.name + "' has shape " + numkit::shape_str(t) +
                        ", expected " + numkit::shape_str(e.value));
    e.value = t;
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  std::ostringstream manifest;
  std::uint64_t offset = 0;
  for (const auto& [name, m] : ckpt.tensors) {
    manifest << name << ' ' << m.rows() << ' ' << m.cols() << ' ' << offset << '\n';
    out.write("EMB1", 4);
    write_u32le(out, static_cast<std::uint32_t>(m.rows()));
    write_u32le(out, static_cast<std::uint32_t>(m.cols()));
    std::vector<float> buf(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) buf[i] = static_cast<float>(m.data()[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    offset += 12 + buf.size() * sizeof(float);
  }
  const std::string text = manifest.str();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_u64le(out, offset);
  out.write("CKPT", 4);
  if (!out) throw DataError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  if (size < 12) throw DataError(path + ": not a checkpoint file");
  in.seekg(size - 12);
  unsigned char trailer[12];
  in.read(reinterpret_cast<char*>(trailer), 12);
  if (std::memcmp(trailer + 8, "CKPT", 4) != 0) throw DataError(path + ": bad checkpoint trailer");
  const std::uint64_t manifest_offset = read_u64le(trailer);
  if (manifest_offset > static_cast<std::uint64_t>(size - 12))
    throw DataError(path + ": bad manifest offset");

  const std::size_t manifest_len = static_cast<std::size_t>(size - 12) - manifest_offset;
  std::string text(manifest_len, '\0');
  in.seekg(static_cast<std::streamoff>(manifest_offset));
  in.read(text.data(), static_cast<std::streamsize>(manifest_len));

  Checkpoint ckpt;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    std::size_t rows = 0, cols = 0;
    std::uint64_t offset = 0;
    if (!(ls >> name >> rows >> cols >> offset))
      throw DataError(path + ": malformed manifest line '" + line + "'");
    in.seekg(static_cast<std::streamoff>(offset));
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EMB1", 4) != 0)
      throw DataError(path + ": tensor blob for '" + name + "' has bad magic");
    unsigned char hdr[8];
    in.read(reinterpret_cast<char*>(hdr), 8);
    const std::uint32_t r = hdr[0] | (hdr[1] << 8) | (hdr[2] << 16) | (hdr[3] << 24);
    const std::uint32_t c = hdr[4] | (hdr[5] << 8) | (hdr[6] << 16) | (hdr[7] << 24);
    if (r != rows || c != cols) throw DataError(path + ": manifest/blob shape mismatch for '" + name + "'");
    numkit::Matrix m(rows, cols);
    std::vector<float> buf(rows * cols);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw DataError(path + ": truncated tensor '" + name + "'");
    for (std::size_t i = 0; i < buf.size(); ++i) m.data()[i] = static_cast<double>(buf[i]);
    ckpt.tensors.emplace_back(name, std::move(m));
  }
  if (ckpt.tensors.empty()) throw DataError(path + ": empty checkpoint");
  return ckpt;
}

}  // namespace spectran::adapter
