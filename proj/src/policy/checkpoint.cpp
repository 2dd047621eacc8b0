#include "wpnav/policy/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wpnav/common/error.hpp"

namespace wpnav {
namespace {

constexpr char kMagic[8] = {'W', 'P', 'N', 'V', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoints assume little-endian");

void put_u64(std::string& out, std::uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : b_(bytes) {}
  void need(std::size_t n) {
    if (pos_ + n > b_.size()) throw ParseError("truncated checkpoint", 0);
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, b_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void doubles(double* out, std::size_t n) {
    need(n * 8);
    std::memcpy(out, b_.data() + pos_, n * 8);
    pos_ += n * 8;
  }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

CheckpointMeta parse_header(const std::string& bytes, Reader& r) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw ParseError("not a wpnav checkpoint", 0);
  r.skip(8);
  const std::uint64_t version = r.u64();
  if (version != kVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version), 0);
  CheckpointMeta meta;
  meta.digest = r.str();
  meta.config_text = r.str();
  meta.note = r.str();
  return meta;
}

}  // namespace

std::string serialize_checkpoint(const Policy& policy, const std::string& note) {
  std::string out(kMagic, 8);
  put_u64(out, kVersion);
  put_str(out, policy.config().digest());
  put_str(out, policy.config().canonical());
  put_str(out, note);
  put_u64(out, policy.params().all().size());
  for (const auto& p : policy.params().all()) {
    put_str(out, p.name);
    put_u64(out, p.value.rows);
    put_u64(out, p.value.cols);
    out.append(reinterpret_cast<const char*>(p.value.data.data()), p.value.size() * 8);
  }
  return out;
}

CheckpointMeta read_checkpoint_meta(const std::string& bytes) {
  Reader r(bytes);
  return parse_header(bytes, r);
}

Policy deserialize_checkpoint(const std::string& bytes, const PolicyConfig& cfg,
                              const std::string& expected_digest, bool force,
                              CheckpointMeta* meta_out) {
  Reader r(bytes);
  const CheckpointMeta meta = parse_header(bytes, r);
  if (meta_out) *meta_out = meta;
  const std::string want = expected_digest.empty() ? cfg.digest() : expected_digest;
  if (meta.digest != want && !force)
    throw DigestMismatch("checkpoint digest " + meta.digest + " does not match config digest " +
                         want);
  Policy policy = Policy::zeros(cfg);
  const std::uint64_t count = r.u64();
  if (count != policy.params().all().size())
    throw ShapeError("checkpoint has " + std::to_string(count) + " parameters, policy expects " +
                     std::to_string(policy.params().all().size()));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = r.str();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    Parameter* p = policy.params().find(name);
    if (!p) throw ShapeError("checkpoint parameter " + name + " is not part of the policy");
    if (p->value.rows != rows || p->value.cols != cols)
      throw ShapeError("checkpoint parameter " + name + " has a different shape");
    r.doubles(p->value.data.data(), p->value.size());
  }
  if (r.pos() != bytes.size()) throw ParseError("trailing bytes in checkpoint", 0);
  return policy;
}

void save_checkpoint(const std::string& path, const Policy& policy, const std::string& note) {
  const std::string bytes = serialize_checkpoint(policy, note);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename " + tmp);
}

Policy load_checkpoint(const std::string& path, const PolicyConfig& cfg, bool force,
                       CheckpointMeta* meta) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_checkpoint(ss.str(), cfg, "", force, meta);
}

}  // namespace wpnav
