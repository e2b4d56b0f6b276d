#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "srlx/corpus.hpp"
#include "srlx/rng.hpp"

namespace srlx::nn {

using Mat = Eigen::MatrixXd;

struct Tensor {
  std::string name;
  Mat value;
  Mat grad;  // same shape, accumulated by Graph::backward
};

// Named dense tensors with gradient slots. Iteration order is sorted by
// name, so every walk over the store is deterministic.
class ParamStore {
 public:
  Tensor* create(const std::string& name, int rows, int cols);
  Tensor* get(const std::string& name);
  const Tensor* get(const std::string& name) const;
  bool has(const std::string& name) const { return tensors_.count(name) > 0; }
  size_t size() const { return tensors_.size(); }
  std::vector<std::string> names() const;

  void zero_grads();
  void check_finite() const;  // throws DataError on NaN/Inf values
  size_t parameter_count() const;

  template <typename F>
  void for_each(F&& f) {
    for (auto& [name, t] : tensors_) f(*t);
  }
  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [name, t] : tensors_) f(*t);
  }

  // bit-exact binary round trip; load requires matching names and shapes
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  std::map<std::string, std::unique_ptr<Tensor>> tensors_;
};

// uniform(-0.1, 0.1), the convention for embedding tables here
void init_embedding(Tensor& t, Rng& rng);
// Glorot-style uniform scaling for affine maps
void init_affine(Tensor& t, Rng& rng);

// Low-level container for named matrices (checkpoints, optimizer state).
// Format: magic, count, then per entry name, shape, raw doubles.
void write_tensor_file(const std::string& path,
                       const std::vector<std::pair<std::string, const Mat*>>& entries);
std::map<std::string, Mat> read_tensor_file(const std::string& path);

}  // namespace srlx::nn
