// Copyright 2026 The mailrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mailrec/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "mailrec/errors.hpp"

namespace mailrec::ad {

namespace {

double evaluate(const LossFn& loss_fn) {
  Tape tape;
  return loss_fn(tape).value().item();
}

std::vector<std::size_t> sample_entries(std::size_t size, std::size_t max_entries) {
  std::vector<std::size_t> idx;
  if (max_entries == 0 || size <= max_entries) {
    idx.resize(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    return idx;
  }
  for (std::size_t k = 0; k < max_entries; ++k) {
    idx.push_back(k * size / max_entries);
  }
  return idx;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport grad_check(const LossFn& loss_fn,
                           std::span<const NamedTensor> params, double step,
                           double rel_tol, std::size_t max_entries) {
  if (!(step > 0.0)) throw ContractError("grad_check: step must be positive");

  for (const NamedTensor& p : params) {
    if (!p.tensor->requires_grad()) {
      throw ContractError("grad_check: parameter '" + p.name +
                          "' does not require grad");
    }
    p.tensor->zero_grad();
  }
  double base = 0.0;
  {
    Tape tape;
    Var loss = loss_fn(tape);
    base = loss.value().item();
    tape.backward(loss);
  }
  if (evaluate(loss_fn) != base || evaluate(loss_fn) != base) {
    throw ContractError("grad_check: loss function is not deterministic");
  }

  GradCheckReport report;
  for (const NamedTensor& p : params) {
    const std::vector<double> analytic(p.tensor->grad().begin(),
                                       p.tensor->grad().end());
    ParamCheck check;
    check.name = p.name;
    auto values = p.tensor->mutable_values();
    for (std::size_t k : sample_entries(values.size(), max_entries)) {
      const double original = values[k];
      values[k] = original + step;
      const double plus = evaluate(loss_fn);
      values[k] = original - step;
      const double minus = evaluate(loss_fn);
      values[k] = original;
      const double numeric = (plus - minus) / (2.0 * step);
      const double err = relative_error(analytic[k], numeric);
      ++check.entries_checked;
      if (err > check.max_rel_error || check.entries_checked == 1) {
        check.max_rel_error = err;
        check.worst_index = k;
        check.analytic = analytic[k];
        check.numeric = numeric;
      }
    }
    check.passed = check.max_rel_error <= rel_tol;
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.passed = report.passed && check.passed;
    report.params.push_back(std::move(check));
  }
  return report;
}

}  // namespace mailrec::ad
