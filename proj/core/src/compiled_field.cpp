#include "carnot/compiled_field.hpp"

#include <algorithm>

#include "carnot/errors.hpp"

namespace carnot {

CompiledField::CompiledField(const PolyVectorField& f) : dim_(f.dim()) {
  for (int j = 0; j < f.dim(); ++j) {
    for (const auto& [alpha, c] : f[j].terms()) {
      terms_.push_back({c.get_d(), j, alpha.exponents});
      for (int i = 0; i < dim_; ++i) max_exp_ = std::max(max_exp_, alpha[i]);
    }
  }
  if (max_exp_ > 31) throw Error(ErrorCode::kInvalidArgument, "compiled field exponent above 31");
}

void CompiledField::evaluate(const double* x, double* out) const {
  std::fill(out, out + dim_, 0.0);
  accumulate(x, 1.0, out);
}

void CompiledField::accumulate(const double* x, double scale, double* out) const {
  if (terms_.empty() || scale == 0.0) return;
  double pw[kMaxDim][32];
  for (int i = 0; i < dim_; ++i) {
    pw[i][0] = 1.0;
    for (int e = 1; e <= max_exp_; ++e) pw[i][e] = pw[i][e - 1] * x[i];
  }
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int i = 0; i < dim_; ++i) v *= pw[i][t.exps[static_cast<std::size_t>(i)]];
    out[t.component] += scale * v;
  }
}

}  // namespace carnot
