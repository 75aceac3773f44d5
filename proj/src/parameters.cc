#include "bicoref/parameters.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bicoref {
namespace {

constexpr char kMagic[4] = {'B', 'C', 'R', 'F'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw CheckpointError("checkpoint truncated while reading " + what);
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string take_string(std::istream& is, const std::string& what) {
  auto n = take<std::uint64_t>(is, what);
  if (n > (1ULL << 32)) throw CheckpointError("checkpoint: implausible length for " + what);
  std::string s(n, '\0');
  if (n > 0 && !is.read(s.data(), static_cast<std::streamsize>(n)))
    throw CheckpointError("checkpoint truncated while reading " + what);
  return s;
}

}  // namespace

Parameter& ParameterStore::add(const std::string& name, std::size_t rows, std::size_t cols,
                               std::mt19937_64& rng, bool zero) {
  if (zero) {
    std::mt19937_64 unused;
    Parameter& p = add_uniform(name, rows, cols, 0.0, unused);
    return p;
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return add_uniform(name, rows, cols, bound, rng);
}

Parameter& ParameterStore::add_uniform(const std::string& name, std::size_t rows, std::size_t cols,
                                       double bound, std::mt19937_64& rng) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (bound > 0.0) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = dist(rng);
  }
  p->grad = Matrix::Zero(p->value.rows(), p->value.cols());
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return *params_[it->second];
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return *params_[it->second];
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero(p->value.rows(), p->value.cols());
}

void ParameterStore::set_all_zero() {
  for (auto& p : params_) p->value.setZero();
}

void write_checkpoint(const std::filesystem::path& path, const std::string& metadata,
                      const ParameterStore& store) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kCheckpointVersion);
  put_string(os, metadata);
  const auto params = store.all();
  put<std::uint64_t>(os, params.size());
  for (const Parameter* p : params) {
    put_string(os, p->name);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(p->value.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(p->value.cols()));
    os.write(reinterpret_cast<const char*>(p->value.data()),
             static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint: " + path.string());
  char magic[4];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError("not a checkpoint file: " + path.string());
  const auto version = take<std::uint32_t>(is, "version");
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint format version " + std::to_string(version) +
                             " unsupported (expected " + std::to_string(kCheckpointVersion) + ")");
  CheckpointData data;
  data.metadata = take_string(is, "metadata");
  const auto count = take<std::uint64_t>(is, "parameter count");
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = take_string(is, "parameter name");
    const auto rows = take<std::uint64_t>(is, name + " rows");
    const auto cols = take<std::uint64_t>(is, name + " cols");
    if (rows * cols > (1ULL << 34)) throw CheckpointError("checkpoint: implausible shape for " + name);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (m.size() > 0 &&
        !is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw CheckpointError("checkpoint truncated in values of " + name);
    data.tensors.emplace(std::move(name), std::move(m));
  }
  return data;
}

void load_into(const CheckpointData& data, ParameterStore& store) {
  for (Parameter* p : store.all()) {
    auto it = data.tensors.find(p->name);
    if (it == data.tensors.end()) throw CheckpointError("checkpoint lacks parameter " + p->name);
    if (it->second.rows() != p->value.rows() || it->second.cols() != p->value.cols())
      throw CheckpointError("checkpoint shape mismatch for " + p->name);
    p->value = it->second;
  }
}

}  // namespace bicoref
