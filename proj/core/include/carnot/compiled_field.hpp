#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "carnot/vector_field.hpp"

namespace carnot {

/// Double-precision snapshot of a PolyVectorField for fast repeated evaluation.
class CompiledField {
 public:
  CompiledField() = default;
  explicit CompiledField(const PolyVectorField& f);

  int dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }

  /// out[j] = f_j(x).
  void evaluate(const double* x, double* out) const;
  /// out[j] += scale * f_j(x).
  void accumulate(const double* x, double scale, double* out) const;

 private:
  struct Term {
    double coeff;
    int component;
    std::array<std::uint8_t, kMaxDim> exps;
  };
  int dim_ = 0;
  int max_exp_ = 0;
  std::vector<Term> terms_;
};

}  // namespace carnot
