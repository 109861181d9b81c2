#include "nbrshap/builtins.hpp"

#include <cmath>
#include <numbers>

#include "nbrshap/errors.hpp"

namespace nbrshap {
namespace {

class FixedArityBox : public BlackBox {
public:
    explicit FixedArityBox(std::size_t arity) : arity_(arity) {}

    void evaluate_batch(const double* rows, std::size_t n, std::size_t m,
                        double* out) const final {
        if (arity_ != 0 && m != arity_) {
            throw SchemaError("builtin arity mismatch: expected " + std::to_string(arity_) +
                              " features, got " + std::to_string(m));
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = eval_row(rows + i * m, m);
    }

protected:
    virtual double eval_row(const double* row, std::size_t m) const = 0;

private:
    std::size_t arity_;
};

class Indicator2d final : public FixedArityBox {
public:
    Indicator2d() : FixedArityBox(2) {}
    double eval_row(const double* r, std::size_t) const override {
        return r[0] > 0.0 ? 2.0 * r[1] * r[1] : -(r[1] * r[1]);
    }
};

class Linear final : public FixedArityBox {
public:
    explicit Linear(std::vector<double> beta)
        : FixedArityBox(beta.size()), beta_(std::move(beta)) {
        if (beta_.empty()) throw SchemaError("linear builtin: beta required");
    }
    double eval_row(const double* r, std::size_t m) const override {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc = std::fma(beta_[j], r[j], acc);
        return acc;
    }

private:
    std::vector<double> beta_;
};

class RuleBased3d final : public FixedArityBox {
public:
    RuleBased3d() : FixedArityBox(3) {}
    double eval_row(const double* r, std::size_t) const override {
        return (r[0] > 1.0 || r[1] > 1.0) ? r[2] : 0.0;
    }
};

class GaussMixCdf final : public FixedArityBox {
public:
    GaussMixCdf() : FixedArityBox(1) {}
    double eval_row(const double* r, std::size_t) const override {
        return 0.5 * norm_cdf((r[0] + 2.0) / 0.6) + 0.5 * norm_cdf((r[0] - 0.4) / 1.0);
    }
};

class Constant final : public FixedArityBox {
public:
    explicit Constant(double c) : FixedArityBox(0), c_(c) {}
    double eval_row(const double*, std::size_t) const override { return c_; }

private:
    double c_;
};

}  // namespace

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

std::unique_ptr<BlackBox> make_builtin(const BuiltinSpec& spec) {
    if (spec.name == "indicator2d") return std::make_unique<Indicator2d>();
    if (spec.name == "linear") return std::make_unique<Linear>(spec.params);
    if (spec.name == "rulebased3d") return std::make_unique<RuleBased3d>();
    if (spec.name == "gaussmix_cdf") return std::make_unique<GaussMixCdf>();
    if (spec.name == "constant") {
        if (spec.params.size() != 1) throw SchemaError("constant builtin: one parameter");
        return std::make_unique<Constant>(spec.params[0]);
    }
    throw SchemaError("unknown builtin black box: " + spec.name);
}

std::size_t builtin_arity(const BuiltinSpec& spec) {
    if (spec.name == "indicator2d") return 2;
    if (spec.name == "linear") return spec.params.size();
    if (spec.name == "rulebased3d") return 3;
    if (spec.name == "gaussmix_cdf") return 1;
    if (spec.name == "constant") return 0;
    throw SchemaError("unknown builtin black box: " + spec.name);
}

bool is_builtin_name(const std::string& name) {
    return name == "indicator2d" || name == "linear" || name == "rulebased3d" ||
           name == "gaussmix_cdf" || name == "constant";
}

}  // namespace nbrshap
