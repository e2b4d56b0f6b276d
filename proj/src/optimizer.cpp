#include "srlx/optimizer.hpp"

#include <cmath>

#include "srlx/corpus.hpp"

namespace srlx {

Adadelta::Adadelta(nn::ParamStore& params, double lr, double rho, double eps,
                   double clip_norm)
    : params_(&params), lr_(lr), rho_(rho), eps_(eps), clip_norm_(clip_norm) {
  if (lr <= 0.0 || rho <= 0.0 || rho >= 1.0 || eps <= 0.0) {
    throw ConfigError("bad adadelta hyperparameters");
  }
  params_->for_each([&](const nn::Tensor& t) {
    acc_.create("g2." + t.name, static_cast<int>(t.value.rows()),
                static_cast<int>(t.value.cols()));
    acc_.create("d2." + t.name, static_cast<int>(t.value.rows()),
                static_cast<int>(t.value.cols()));
  });
}

bool Adadelta::step() {
  bool finite = true;
  double sq_norm = 0.0;
  params_->for_each([&](const nn::Tensor& t) {
    if (!t.grad.allFinite()) finite = false;
    sq_norm += t.grad.squaredNorm();
  });
  if (!finite) {
    params_->zero_grads();
    return false;
  }
  double norm = std::sqrt(sq_norm);
  double scale = clip_norm_ > 0.0 && norm > clip_norm_ ? clip_norm_ / norm : 1.0;

  params_->for_each([&](nn::Tensor& t) {
    nn::Mat g = t.grad * scale;
    nn::Mat& eg = acc_.get("g2." + t.name)->value;
    nn::Mat& ed = acc_.get("d2." + t.name)->value;
    eg = rho_ * eg + (1.0 - rho_) * g.cwiseProduct(g);
    nn::Mat delta =
        -((ed.array() + eps_).sqrt() / (eg.array() + eps_).sqrt() * g.array())
             .matrix();
    ed = rho_ * ed + (1.0 - rho_) * delta.cwiseProduct(delta);
    t.value += lr_ * delta;
    t.grad.setZero();
  });
  ++steps_;
  return true;
}

const nn::Mat& Adadelta::sq_grad(const std::string& name) const {
  return acc_.get("g2." + name)->value;
}

const nn::Mat& Adadelta::sq_delta(const std::string& name) const {
  return acc_.get("d2." + name)->value;
}

void Adadelta::save(const std::string& path) const { acc_.save(path); }

void Adadelta::load(const std::string& path) { acc_.load(path); }

}  // namespace srlx
