#include "riskavi/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "riskavi/errors.hpp"

namespace riskavi {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'R', 'A', 'V', 'I', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  void doubles(std::span<const double> v) {
    bytes(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& in, std::size_t end) : in_(in), end_(end) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void doubles(std::span<double> v) {
    const std::size_t n = v.size() * sizeof(double);
    need(n);
    std::memcpy(v.data(), in_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw CorruptCheckpoint("checkpoint truncated");
  }
  const std::string& in_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  if (!(ckpt.online.shape() == ckpt.target.shape())) {
    throw std::invalid_argument("checkpoint: online and target shapes differ");
  }
  for (const auto& [k, v] : ckpt.metadata) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("checkpoint: metadata keys/values may not contain '=' or newlines");
    }
  }

  std::string meta;
  for (const auto& [k, v] : ckpt.metadata) meta += k + "=" + v + "\n";

  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta.data(), meta.size());
  w.put<std::uint64_t>(ckpt.global_step);

  const auto& shape = ckpt.online.shape();
  const auto dims = shape.layer_dims();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(shape.n_actions));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(shape.n_tau));
  w.doubles(ckpt.online.data());
  w.doubles(ckpt.target.data());

  const auto& opt = ckpt.optimizer;
  w.put<std::uint8_t>(opt.kind == OptimizerKind::adam ? 1 : 0);
  w.put<std::uint8_t>(opt.diminishing ? 1 : 0);
  w.put<double>(opt.lr);
  w.put<double>(opt.beta1);
  w.put<double>(opt.beta2);
  w.put<double>(opt.epsilon);
  w.put<double>(opt.k_alpha);
  w.put<std::uint64_t>(opt.t);
  const bool has_moments = opt.m.size() == shape.parameter_count() && opt.v.size() == opt.m.size();
  w.put<std::uint8_t>(has_moments ? 1 : 0);
  if (has_moments) {
    w.doubles(opt.m);
    w.doubles(opt.v);
  }
  w.put<std::uint64_t>(fnv1a(w.str().data(), w.str().size()));
  return std::move(w.str());
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t)) throw CorruptCheckpoint("checkpoint too short");
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (stored != fnv1a(bytes.data(), body)) throw CorruptCheckpoint("checkpoint checksum mismatch");

  Reader r(bytes, body);
  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw CorruptCheckpoint("not a riskavi checkpoint (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CorruptCheckpoint("unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint ckpt;
  std::istringstream meta(r.bytes(r.get<std::uint32_t>()));
  for (std::string line; std::getline(meta, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CorruptCheckpoint("malformed metadata line");
    ckpt.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  ckpt.global_step = r.get<std::uint64_t>();

  const auto n_dims = r.get<std::uint32_t>();
  if (n_dims < 2 || n_dims > 64) throw CorruptCheckpoint("implausible layer count");
  std::vector<std::size_t> dims(n_dims);
  for (auto& d : dims) d = r.get<std::uint32_t>();
  NetworkShape shape;
  shape.obs_dim = dims.front();
  shape.hidden.assign(dims.begin() + 1, dims.end() - 1);
  shape.n_actions = r.get<std::uint32_t>();
  shape.n_tau = r.get<std::uint32_t>();
  if (shape.output_dim() != dims.back()) throw CorruptCheckpoint("output width does not match n_actions x n_tau");

  try {
    ckpt.online = NetworkParams(shape);
    ckpt.target = NetworkParams(shape);
  } catch (const std::invalid_argument& e) {
    throw CorruptCheckpoint(std::string("invalid network shape: ") + e.what());
  }
  r.doubles(ckpt.online.data());
  r.doubles(ckpt.target.data());

  auto& opt = ckpt.optimizer;
  opt.kind = r.get<std::uint8_t>() == 1 ? OptimizerKind::adam : OptimizerKind::sgd;
  opt.diminishing = r.get<std::uint8_t>() == 1;
  opt.lr = r.get<double>();
  opt.beta1 = r.get<double>();
  opt.beta2 = r.get<double>();
  opt.epsilon = r.get<double>();
  opt.k_alpha = r.get<double>();
  opt.t = r.get<std::uint64_t>();
  if (r.get<std::uint8_t>() == 1) {
    opt.m.resize(shape.parameter_count());
    opt.v.resize(shape.parameter_count());
    r.doubles(opt.m);
    r.doubles(opt.v);
  }
  if (r.pos() != body) throw CorruptCheckpoint("trailing bytes before checksum");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptCheckpoint("cannot open checkpoint: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace riskavi
