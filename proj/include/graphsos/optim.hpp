#pragma once

#include <string_view>

#include "graphsos/attention.hpp"

namespace graphsos {

enum class Optimizer { Adam, Sgd };

Optimizer parse_optimizer(std::string_view name);
const char* to_string(Optimizer o);

/// Applies ascent steps `params += lr * update(direction)` to attention
/// projections. Sgd uses the direction as is; Adam rescales it per entry.
class ParamStepper {
 public:
  ParamStepper(Optimizer kind, const AttentionParamsd& shape);

  void step(AttentionParamsd& params, const AttentionParamsd& direction, double lr);

  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

 private:
  Optimizer kind_;
  AttentionParamsd first_, second_;
  int t_ = 0;
};

}  // namespace graphsos
