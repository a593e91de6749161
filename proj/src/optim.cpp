#include "odflow/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace odflow::num {

AdamOptimizer::AdamOptimizer(std::vector<Param*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Param* p : params_) {
        m_.emplace_back(p->value.rows(), p->value.cols());
        v_.emplace_back(p->value.rows(), p->value.cols());
    }
}

void AdamOptimizer::zero_grad() {
    for (Param* p : params_) p->zero_grad();
}

void AdamOptimizer::step() {
    ++step_count_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
    for (std::size_t k = 0; k < params_.size(); ++k) {
        Param& p = *params_[k];
        if (!p.grad.all_finite())
            throw std::runtime_error("adam: non-finite gradient for parameter '" + p.name + "'");
        double* theta = p.value.data();
        const double* g = p.grad.data();
        double* m = m_[k].data();
        double* v = v_[k].data();
        const std::size_t n = p.value.size();
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

}  // namespace odflow::num
