#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nbrshap/blackbox.hpp"

namespace nbrshap {

// Built-in analytic black boxes used by tests, fixtures and demos.
//
//   indicator2d(x)  = 1{x1>0} 2 x2^2 - 1{x1<=0} x2^2
//   linear(x)       = sum_j beta_j x_j
//   rulebased3d(x)  = 1{x1>1 or x2>1} x3
//   gaussmix_cdf(x) = 0.5 Phi((x+2)/0.6) + 0.5 Phi((x-0.4)/1)
//   constant(x)     = c
struct BuiltinSpec {
    std::string name;
    std::vector<double> params;  // beta for linear, {c} for constant
};

// Standard normal CDF through erfc; Phi(z) = erfc(-z/sqrt(2))/2.
double norm_cdf(double z);

std::unique_ptr<BlackBox> make_builtin(const BuiltinSpec& spec);

// Arity the builtin expects, or 0 when any width works (linear adapts to
// its beta length; constant takes any width).
std::size_t builtin_arity(const BuiltinSpec& spec);

bool is_builtin_name(const std::string& name);

}  // namespace nbrshap
