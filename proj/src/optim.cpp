#include "graphsos/optim.hpp"

namespace graphsos {

Optimizer parse_optimizer(std::string_view name) {
  if (name == "adam") return Optimizer::Adam;
  if (name == "sgd") return Optimizer::Sgd;
  throw FormatError("optimizer must be adam or sgd, got '" + std::string(name) + "'");
}

const char* to_string(Optimizer o) { return o == Optimizer::Adam ? "adam" : "sgd"; }

ParamStepper::ParamStepper(Optimizer kind, const AttentionParamsd& shape)
    : kind_(kind),
      first_(AttentionParamsd::zeros(shape.heads, shape.dim)),
      second_(AttentionParamsd::zeros(shape.heads, shape.dim)) {}

void ParamStepper::step(AttentionParamsd& params, const AttentionParamsd& direction, double lr) {
  if (kind_ == Optimizer::Sgd) {
    params.axpy(lr, direction);
    return;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1, t_), c2 = 1.0 - std::pow(beta2, t_);
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseAbs2();
    p.array() += lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t h = 0; h < params.query.size(); ++h) {
    update(params.query[h], first_.query[h], second_.query[h], direction.query[h]);
    update(params.key[h], first_.key[h], second_.key[h], direction.key[h]);
  }
}

}  // namespace graphsos
