#pragma once

#include "tensorpad/algorithms.hpp"
#include "tensorpad/expr.hpp"
#include "tensorpad/indices.hpp"
#include "tensorpad/notation.hpp"
#include "tensorpad/properties.hpp"
#include "tensorpad/session.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tptest {

using namespace tensorpad;

inline Session session_with(const std::vector<std::string>& lines) {
  Session s;
  for (const auto& l : lines) s.eval_line(l);
  return s;
}

inline std::string tex(const Expression& e) { return print_tex(e); }

/// Dense array with `rank` indices running over 0..dim-1.
struct NumericTensor {
  int rank = 0;
  int dim = 0;
  std::vector<double> data;

  NumericTensor() = default;
  NumericTensor(int r, int d) : rank(r), dim(d), data(static_cast<std::size_t>(std::pow(d, r)), 0.0) {}

  std::size_t offset(const std::vector<int>& idx) const {
    std::size_t o = 0;
    for (int i : idx) o = o * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
    return o;
  }
  double& at(const std::vector<int>& idx) { return data[offset(idx)]; }
  double at(const std::vector<int>& idx) const { return data[offset(idx)]; }
};

/// Numeric value of a sum of monomials whose factors are plain tensors (or
/// numbers), summing over every index name that occurs twice. Names listed in
/// `fixed` take the given values. A tensor is looked up as "name/rank" first,
/// then as "name".
class Evaluator {
public:
  Evaluator(std::map<std::string, NumericTensor> tensors, int dim) : tensors_(std::move(tensors)), dim_(dim) {}

  double operator()(const Expression& e, const std::map<std::string, int>& fixed = {}) const {
    if (e.is_sum()) {
      double s = 0;
      for (const auto& t : e.children) s += (*this)(t, fixed);
      return s * e.multiplier.get().get_d();
    }
    return term(e, fixed);
  }

private:
  double term(const ExprNode& t, const std::map<std::string, int>& fixed) const {
    struct Factor {
      const NumericTensor* tensor;
      std::vector<int> slot_var;
    };
    std::vector<Factor> factors;
    std::map<std::string, int> var_id;
    std::vector<int> fixed_values;
    const double coeff = t.multiplier.get().get_d();
    std::vector<const ExprNode*> fs;
    if (t.is_prod()) {
      for (const auto& c : t.children) fs.push_back(&c);
    } else {
      fs.push_back(&t);
    }
    double scalar = coeff;
    for (const ExprNode* f : fs) {
      if (f->is_number()) {
        if (f != &t) scalar *= f->multiplier.get().get_d();
        continue;
      }
      auto it = tensors_.find(f->name + "/" + std::to_string(f->children.size()));
      if (it == tensors_.end()) it = tensors_.find(f->name);
      if (it == tensors_.end()) throw std::runtime_error("no numeric value for " + f->name);
      Factor fac{&it->second, {}};
      for (const auto& c : f->children) {
        if (!c.is_index_slot()) throw std::runtime_error("nested factor in numeric evaluation");
        auto [v, fresh] = var_id.emplace(c.name, static_cast<int>(var_id.size()));
        fac.slot_var.push_back(v->second);
      }
      factors.push_back(std::move(fac));
    }
    std::vector<int> values(var_id.size(), 0);
    std::vector<int> open;
    for (const auto& [name, id] : var_id) {
      if (auto f = fixed.find(name); f != fixed.end()) values[static_cast<std::size_t>(id)] = f->second;
      else open.push_back(id);
    }
    double total = 0;
    std::vector<int> idx;
    for (;;) {
      double p = 1;
      for (const auto& fac : factors) {
        idx.clear();
        for (int v : fac.slot_var) idx.push_back(values[static_cast<std::size_t>(v)]);
        p *= fac.tensor->at(idx);
        if (p == 0) break;
      }
      total += p;
      std::size_t k = 0;
      while (k < open.size() && ++values[static_cast<std::size_t>(open[k])] == dim_) values[static_cast<std::size_t>(open[k++])] = 0;
      if (k == open.size()) break;
    }
    return scalar * total;
  }

  std::map<std::string, NumericTensor> tensors_;
  int dim_;
};

/// Random algebraic curvature tensor: a sum of Kulkarni-Nomizu squares of
/// symmetric matrices, so it has every Riemann symmetry including the cyclic one.
inline NumericTensor random_riemann(int dim, std::mt19937& rng, int pieces = 3) {
  std::normal_distribution<double> g(0.0, 1.0);
  NumericTensor r(4, dim);
  for (int k = 0; k < pieces; ++k) {
    std::vector<std::vector<double>> s(static_cast<std::size_t>(dim), std::vector<double>(static_cast<std::size_t>(dim)));
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) s[i][j] = s[j][i] = g(rng);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d)
            r.at({a, b, c, d}) += sign * (s[a][c] * s[b][d] - s[a][d] * s[b][c]);
  }
  return r;
}

/// Ricci tensor R_{b d} = R_{a b a d} and scalar, in a flat Euclidean metric.
inline std::pair<NumericTensor, NumericTensor> ricci_parts(const NumericTensor& r) {
  NumericTensor ric(2, r.dim), scalar(0, r.dim);
  for (int b = 0; b < r.dim; ++b)
    for (int d = 0; d < r.dim; ++d)
      for (int a = 0; a < r.dim; ++a) ric.at({b, d}) += r.at({a, b, a, d});
  for (int a = 0; a < r.dim; ++a) scalar.data[0] += ric.at({a, a});
  return {ric, scalar};
}

/// Trace-free part of a curvature tensor in a flat Euclidean metric.
inline NumericTensor weyl_part(const NumericTensor& r) {
  const int n = r.dim;
  std::vector<std::vector<double>> ric(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  double scalar = 0;
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a) ric[b][d] += r.at({a, b, a, d});
  for (int a = 0; a < n; ++a) scalar += ric[a][a];
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  NumericTensor w(4, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          w.at({a, b, c, d}) =
              r.at({a, b, c, d}) -
              (ric[a][c] * delta(b, d) - ric[a][d] * delta(b, c) + ric[b][d] * delta(a, c) - ric[b][c] * delta(a, d)) /
                  (n - 2) +
              scalar * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c)) / ((n - 1) * (n - 2));
  return w;
}

inline bool close(double a, double b, double rel = 1e-9) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

/// Equality of two sums regardless of term order: a - b collects to zero.
inline bool equal_as_sums(const Expression& a, const Expression& b) {
  return collect_terms(normalize(make_sum({a, make_prod({make_number(-1), b})}))).is_zero();
}

/// Equality after giving both sides the standard dummy names.
inline bool same_up_to_dummies(const Expression& a, const Expression& b, const PropertyRegistry& reg) {
  return equal_subtree(rename_dummies(a, reg), rename_dummies(b, reg), true);
}

} // namespace tptest
