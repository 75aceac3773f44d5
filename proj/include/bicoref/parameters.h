#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicoref/autodiff.h"

namespace bicoref {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
};

// Owns every trainable matrix of a model, in registration order.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  // Glorot-uniform initialization, or zeros when `zero` is set.
  Parameter& add(const std::string& name, std::size_t rows, std::size_t cols,
                 std::mt19937_64& rng, bool zero = false);
  Parameter& add_uniform(const std::string& name, std::size_t rows, std::size_t cols,
                         double bound, std::mt19937_64& rng);

  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  void set_all_zero();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, std::size_t> index_;
};

// Binary checkpoint: magic, format version, metadata blob, then named
// parameters as (rows, cols, little-endian float64 values).
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Unreadable, foreign, version-mismatched or shape-mismatched checkpoint.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckpointData {
  std::string metadata;
  std::map<std::string, Matrix> tensors;
};

void write_checkpoint(const std::filesystem::path& path, const std::string& metadata,
                      const ParameterStore& store);
CheckpointData read_checkpoint(const std::filesystem::path& path);
// Copies tensors into the store; every store parameter must be present with
// matching shape.
void load_into(const CheckpointData& data, ParameterStore& store);

}  // namespace bicoref
