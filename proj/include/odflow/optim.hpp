#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odflow/matrix.hpp"

namespace odflow::num {

// A trainable tensor with its gradient accumulator. Gradients are zeroed at
// the start of each training step and filled by the model's backward pass.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;

    Param() = default;
    Param(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

    void zero_grad() { grad.fill(0.0); }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class AdamOptimizer {
public:
    AdamOptimizer(std::vector<Param*> params, AdamConfig config = {});

    void zero_grad();
    // One bias-corrected update from the accumulated gradients.
    // Throws std::runtime_error naming the parameter on a non-finite gradient.
    void step();

    std::int64_t step_count() const { return step_count_; }
    const AdamConfig& config() const { return config_; }

private:
    std::vector<Param*> params_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    AdamConfig config_;
    std::int64_t step_count_ = 0;
};

}  // namespace odflow::num
