#include "corenet/nnw1.hpp"

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "corenet/error.hpp"

namespace corenet {

namespace {

using nlohmann::json;

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    if (bytes_.size() - pos_ < 8) {
      throw Error(ErrorKind::kFormat, "NNW1: payload shorter than the manifest's shapes imply");
    }
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string crc_hex(std::string_view payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32_z(crc, reinterpret_cast<const Bytef*>(payload.data()), payload.size());
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return std::string("crc32:") + buf;
}

}  // namespace

std::string encode_nnw1(const Network& net) {
  std::string payload;
  json layers = json::array();
  for (const auto& w : net.weights()) {
    const bool sparse = w.is_sparse();
    layers.push_back({{"rows", w.rows()},
                      {"cols", w.cols()},
                      {"kind", sparse ? "sparse" : "dense"},
                      {"bias_embedded", net.bias_embedded()}});
    if (sparse) {
      const auto& m = std::get<SparseRowMatrix>(w.storage());
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto cols = m.row_cols(i);
        const auto vals = m.row_values(i);
        put_u64(payload, cols.size());
        for (std::size_t k = 0; k < cols.size(); ++k) {
          put_u64(payload, cols[k]);
          put_f64(payload, vals[k]);
        }
      }
    } else {
      const DenseMatrix d = w.to_dense();
      for (double v : d.data()) put_f64(payload, v);
    }
  }
  const json manifest = {{"format", "NNW1"}, {"layers", layers}, {"checksum", crc_hex(payload)}};
  const std::string text = manifest.dump();
  std::string out;
  put_u64(out, text.size());
  out += text;
  out += payload;
  return out;
}

Network decode_nnw1(std::string_view bytes) {
  if (bytes.size() < 8) throw Error(ErrorKind::kChecksum, "NNW1: file truncated before manifest");
  Reader header(bytes.substr(0, 8));
  const std::uint64_t manifest_len = header.u64();
  if (manifest_len > bytes.size() - 8) {
    throw Error(ErrorKind::kChecksum, "NNW1: file truncated inside manifest");
  }
  json manifest;
  try {
    manifest = json::parse(bytes.substr(8, manifest_len));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("NNW1: malformed manifest: ") + e.what());
  }
  const std::string_view payload = bytes.substr(8 + manifest_len);

  std::vector<std::size_t> layer_sizes;
  std::vector<WeightMatrix> weights;
  bool bias_embedded = true;
  try {
    if (manifest.at("format").get<std::string>() != "NNW1") {
      throw Error(ErrorKind::kFormat, "NNW1: unexpected format tag");
    }
    if (manifest.at("checksum").get<std::string>() != crc_hex(payload)) {
      throw Error(ErrorKind::kChecksum, "NNW1: checksum mismatch (file corrupt or truncated)");
    }
    const auto& layers = manifest.at("layers");
    if (!layers.is_array() || layers.empty()) {
      throw Error(ErrorKind::kFormat, "NNW1: manifest has no layers");
    }
    Reader in(payload);
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const auto& l = layers[k];
      const auto rows = l.at("rows").get<std::size_t>();
      const auto cols = l.at("cols").get<std::size_t>();
      const auto kind = l.at("kind").get<std::string>();
      const bool bias = l.at("bias_embedded").get<bool>();
      if (k == 0) {
        bias_embedded = bias;
        if (cols < (bias ? 2u : 1u)) throw Error(ErrorKind::kFormat, "NNW1: empty input layer");
        layer_sizes.push_back(cols - (bias ? 1 : 0));
      } else if (bias != bias_embedded) {
        throw Error(ErrorKind::kFormat, "NNW1: inconsistent bias_embedded flags");
      }
      layer_sizes.push_back(rows);
      if (kind == "dense") {
        DenseMatrix m(rows, cols);
        for (double& v : m.data()) v = in.f64();
        weights.emplace_back(std::move(m));
      } else if (kind == "sparse") {
        std::vector<SparseRow> r(rows);
        for (std::size_t i = 0; i < rows; ++i) {
          const std::uint64_t count = in.u64();
          if (count > cols) throw Error(ErrorKind::kFormat, "NNW1: sparse row longer than cols");
          for (std::uint64_t c = 0; c < count; ++c) {
            const auto col = static_cast<std::size_t>(in.u64());
            r[i].push_back({col, in.f64()});
          }
        }
        try {
          weights.emplace_back(SparseRowMatrix(cols, r));
        } catch (const Error& e) {
          throw Error(ErrorKind::kFormat, std::string("NNW1: ") + e.what());
        }
      } else {
        throw Error(ErrorKind::kFormat, "NNW1: unknown layer kind '" + kind + "'");
      }
    }
    if (!in.done()) throw Error(ErrorKind::kFormat, "NNW1: trailing bytes after last layer");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("NNW1: malformed manifest: ") + e.what());
  }
  try {
    return Network(std::move(layer_sizes), std::move(weights), bias_embedded);
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, std::string("NNW1: shape mismatch: ") + e.what());
  }
}

void save_weights(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kNotFound, "cannot write weights: " + path.string());
  const std::string bytes = encode_nnw1(net);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kNotFound, "failed writing weights: " + path.string());
}

Network load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "weights not found: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_nnw1(bytes);
}

}  // namespace corenet
