#include "srlx/nn/params.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace srlx::nn {

Tensor* ParamStore::create(const std::string& name, int rows, int cols) {
  if (rows <= 0 || cols <= 0)
    throw ConfigError("tensor " + name + " needs positive dimensions");
  auto t = std::make_unique<Tensor>();
  t->name = name;
  t->value = Mat::Zero(rows, cols);
  t->grad = Mat::Zero(rows, cols);
  auto [it, inserted] = tensors_.emplace(name, std::move(t));
  if (!inserted) throw ConfigError("duplicate tensor name: " + name);
  return it->second.get();
}

Tensor* ParamStore::get(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw DataError("no tensor named " + name);
  return it->second.get();
}

const Tensor* ParamStore::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw DataError("no tensor named " + name);
  return it->second.get();
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(tensors_.size());
  for (const auto& [name, t] : tensors_) out.push_back(name);
  return out;
}

void ParamStore::zero_grads() {
  for (auto& [name, t] : tensors_) t->grad.setZero();
}

void ParamStore::check_finite() const {
  for (const auto& [name, t] : tensors_)
    if (!t->value.allFinite())
      throw DataError("non-finite values in tensor " + name);
}

size_t ParamStore::parameter_count() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t->value.size();
  return n;
}

void ParamStore::save(const std::string& path) const {
  std::vector<std::pair<std::string, const Mat*>> entries;
  for (const auto& [name, t] : tensors_) entries.emplace_back(name, &t->value);
  write_tensor_file(path, entries);
}

void ParamStore::load(const std::string& path) {
  auto loaded = read_tensor_file(path);
  if (loaded.size() != tensors_.size())
    throw DataError("checkpoint holds " + std::to_string(loaded.size()) +
                    " tensors, store expects " + std::to_string(tensors_.size()));
  for (auto& [name, t] : tensors_) {
    auto it = loaded.find(name);
    if (it == loaded.end())
      throw DataError("checkpoint is missing tensor " + name);
    if (it->second.rows() != t->value.rows() ||
        it->second.cols() != t->value.cols())
      throw DataError("checkpoint shape mismatch for tensor " + name);
    t->value = it->second;
  }
}

void init_embedding(Tensor& t, Rng& rng) {
  for (int c = 0; c < t.value.cols(); ++c)
    for (int r = 0; r < t.value.rows(); ++r)
      t.value(r, c) = rng.uniform(-0.1, 0.1);
}

void init_affine(Tensor& t, Rng& rng) {
  double limit =
      std::sqrt(6.0 / static_cast<double>(t.value.rows() + t.value.cols()));
  for (int c = 0; c < t.value.cols(); ++c)
    for (int r = 0; r < t.value.rows(); ++r)
      t.value(r, c) = rng.uniform(-limit, limit);
}

namespace {

constexpr char kMagic[8] = {'S', 'R', 'L', 'X', 'T', 'E', 'N', '1'};

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError("truncated tensor file");
  return v;
}

}  // namespace

void write_tensor_file(
    const std::string& path,
    const std::vector<std::pair<std::string, const Mat*>>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write tensor file: " + path);
  out.write(kMagic, sizeof(kMagic));
  put<uint64_t>(out, entries.size());
  for (const auto& [name, m] : entries) {
    put<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<uint64_t>(out, static_cast<uint64_t>(m->rows()));
    put<uint64_t>(out, static_cast<uint64_t>(m->cols()));
    out.write(reinterpret_cast<const char*>(m->data()),
              static_cast<std::streamsize>(sizeof(double) * m->size()));
  }
  if (!out) throw DataError("short write on tensor file: " + path);
}

std::map<std::string, Mat> read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tensor file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError("not a tensor file: " + path);
  auto count = take<uint64_t>(in);
  std::map<std::string, Mat> out;
  for (uint64_t i = 0; i < count; ++i) {
    auto name_len = take<uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    auto rows = take<uint64_t>(in);
    auto cols = take<uint64_t>(in);
    if (!in || rows == 0 || cols == 0 || rows > (1u << 30) || cols > (1u << 30))
      throw ParseError("corrupt tensor header in " + path);
    Mat m(static_cast<int>(rows), static_cast<int>(cols));
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw ParseError("truncated tensor data in " + path);
    if (!out.emplace(name, std::move(m)).second)
      throw ParseError("duplicate tensor in file: " + name);
  }
  return out;
}

}  // namespace srlx::nn
