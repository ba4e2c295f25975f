#include "withinhost/params.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "withinhost/errors.hpp"

namespace withinhost {

ModelParams default_params(int k_stages) {
    ModelParams params;
    params.set_equal_stages(k_stages);
    validate(params);
    return params;
}

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string("ModelParams: ") + name + " must be positive and finite");
    }
}

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string("ModelParams: ") + name + " must be nonnegative and finite");
    }
}

void require_switch(double value, const char* name) {
    if (value != 0.0 && value != 1.0) {
        throw ConfigError(std::string("ModelParams: ") + name + " must be 0 or 1");
    }
}

} // namespace

void validate(const ModelParams& p) {
    require_positive(p.lambda0, "lambda0");
    require_positive(p.dur_r, "dur_r");
    require_positive(p.dur_m, "dur_m");
    require_positive(p.dur_s, "dur_s");
    // beta and d0 may be zero: decoupled-decay analyses and the R0 edge
    // cases switch the infection or death pathway off entirely.
    require_nonnegative(p.beta, "beta");
    require_nonnegative(p.d0, "d0");
    require_positive(p.mu_mero, "mu_mero");
    require_positive(p.r_burst, "r_burst");
    require_positive(p.mu_g, "mu_g");
    require_positive(p.si_star, "si_star");
    require_positive(p.sa_star, "sa_star");
    require_positive(p.delta0, "delta0");
    require_positive(p.delta1, "delta1");
    require_positive(p.mu_bar, "mu_bar");
    require_positive(p.dev_time, "dev_time");
    if (!(p.alpha_g >= 0.0 && p.alpha_g <= 1.0)) {
        throw ConfigError("ModelParams: alpha_g must lie in [0,1]");
    }
    require_switch(p.gamma_r, "gamma_r");
    require_switch(p.gamma_m, "gamma_m");
    require_switch(p.gamma_s, "gamma_s");
    if (p.m0 < 0.0 || !std::isfinite(p.m0)) {
        throw ConfigError("ModelParams: m0 must be nonnegative and finite");
    }
    if (p.k_stages < 1) {
        throw ConfigError("ModelParams: k_stages must be a positive integer");
    }
    const auto k = static_cast<std::size_t>(p.k_stages);
    if (p.mu_i.size() != k || p.d_i.size() != k) {
        throw ConfigError("ModelParams: mu_i and d_i must have length k_stages");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!(p.mu_i[i] > 0.0) || !std::isfinite(p.mu_i[i])) {
            throw ConfigError("ModelParams: every mu_i must be positive and finite");
        }
        if (p.d_i[i] < 0.0 || !std::isfinite(p.d_i[i])) {
            throw ConfigError("ModelParams: every d_i must be nonnegative and finite");
        }
    }
}

} // namespace withinhost
