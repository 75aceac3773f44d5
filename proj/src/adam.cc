#include "bicoref/adam.h"

#include <cmath>
#include <stdexcept>

namespace bicoref {

void Adam::step(ParameterStore& store) {
  const auto params = store.all();
  for (const Parameter* p : params) {
    if (p->grad.size() != p->value.size())
      throw std::invalid_argument("adam: gradient shape differs for " + p->name);
    if (!p->grad.allFinite()) throw std::runtime_error("adam: non-finite gradient in " + p->name);
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  for (Parameter* p : params) {
    auto [mit, inserted_m] = m_.try_emplace(p->name, Matrix::Zero(p->value.rows(), p->value.cols()));
    auto [vit, inserted_v] = v_.try_emplace(p->name, Matrix::Zero(p->value.rows(), p->value.cols()));
    Matrix& m = mit->second;
    Matrix& v = vit->second;
    m = config_.beta1 * m + (1.0 - config_.beta1) * p->grad;
    v = config_.beta2 * v + (1.0 - config_.beta2) * p->grad.cwiseAbs2();
    p->value.array() -= config_.learning_rate * (m.array() / correction1) /
                        ((v.array() / correction2).sqrt() + config_.epsilon);
  }
}

}  // namespace bicoref
