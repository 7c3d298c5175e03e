#pragma once
// AdamW with decoupled weight decay over a ParamStore.

#include <cmath>
#include <stdexcept>
#include <string>

#include "graphlit/tensor.hpp"

namespace graphlit {

struct AdamWConfig {
    double lr = 0.0005;
    double weight_decay = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <class Real>
class AdamW {
public:
    explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

    const AdamWConfig& config() const { return cfg_; }
    int64_t step_count() const { return step_; }

    // One update over every entry. Gradients must be finite; a NaN gradient is
    // a training bug and aborts.
    void step(ParamStore<Real>& params) {
        ++step_;
        double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (auto& e : params.entries) {
            for (size_t i = 0; i < e.value.size(); ++i) {
                double g = static_cast<double>(e.grad[i]);
                if (std::isnan(g))
                    throw std::runtime_error("NaN gradient in parameter " + e.name);
                double m = cfg_.beta1 * static_cast<double>(e.m[i]) + (1.0 - cfg_.beta1) * g;
                double v = cfg_.beta2 * static_cast<double>(e.v[i]) + (1.0 - cfg_.beta2) * g * g;
                e.m[i] = static_cast<Real>(m);
                e.v[i] = static_cast<Real>(v);
                double mhat = m / bc1;
                double vhat = v / bc2;
                double w = static_cast<double>(e.value[i]);
                w -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.epsilon) + cfg_.weight_decay * w);
                e.value[i] = static_cast<Real>(w);
            }
        }
    }

private:
    AdamWConfig cfg_;
    int64_t step_ = 0;
};

}  // namespace graphlit
