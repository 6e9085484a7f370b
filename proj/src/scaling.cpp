#include "ptlab/scaling.hpp"

#include "ptlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ptlab {

TimeHorizon TimeHorizon::make(double T, std::optional<double> stop_margin,
                              std::optional<double> mu_cap) {
    TimeHorizon h;
    h.T = T;
    h.stop_margin = stop_margin.value_or(1e-4 * T);
    h.mu_cap = mu_cap.value_or(1e6);
    h.validate();
    return h;
}

void TimeHorizon::validate() const {
    std::vector<std::string> v;
    if (!(T > 0.0) || !std::isfinite(T)) v.push_back("horizon.T must be finite and > 0");
    if (!(stop_margin > 0.0) || !(stop_margin < T))
        v.push_back("horizon.epsilon must satisfy 0 < epsilon < T");
    if (!(mu_cap >= 1.0)) v.push_back("horizon.mu_cap must be >= 1");
    if (!v.empty()) throw ValidationError(std::move(v));
}

namespace {

void check_window(double t, const TimeHorizon& h, const char* what) {
    if (!(t >= 0.0) || !(t < h.T)) {
        throw DomainError(std::string(what) + ": t = " + std::to_string(t) +
                          " outside [0, T) with T = " + std::to_string(h.T));
    }
}

} // namespace

double mu(double t, const TimeHorizon& h) {
    check_window(t, h, "mu");
    return std::min(h.T / (h.T - t), h.mu_cap);
}

double mu_dot_over_mu_sq(const TimeHorizon& h) { return 1.0 / h.T; }

TimeScale time_scale(double t, const TimeHorizon& h) {
    check_window(t, h, "time_scale");
    return {std::log(h.T / (h.T - t)), std::min(1.0 / (h.T - t), h.mu_cap)};
}

double scale_rate(double t, const TimeHorizon& h) {
    check_window(t, h, "scale_rate");
    return std::min(1.0 / (h.T - t), h.mu_cap);
}

double scale_rate_at_tau(double tau, const TimeHorizon& h) { return std::exp(tau) / h.T; }

bool cap_engaged(double t, const TimeHorizon& h) {
    return t >= 0.0 && t < h.T && h.T / (h.T - t) > h.mu_cap;
}

} // namespace ptlab
