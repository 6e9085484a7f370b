#pragma once

#include <string>
#include <string_view>

namespace ptlab {

/// sgn with sgn(0) = 0.
inline double sgn(double v) noexcept { return static_cast<double>((v > 0.0) - (v < 0.0)); }

/// Signed power |v|^a sgn(v); 0 at v = 0 for every a.
double signed_pow(double v, double a) noexcept;

/**
 * Named scalar time signal used for disturbances d(t) and time-varying
 * parameters theta(t):
 *   constant:  offset + amplitude
 *   sinusoid:  offset + amplitude * sin(frequency * t)
 *   square:    offset + amplitude * sgn0(sin(frequency * t))   (sgn0(0) = +1)
 * frequency is in rad/s.
 */
struct Signal {
    enum class Kind { constant, sinusoid, square };

    Kind kind = Kind::constant;
    double offset = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;

    static Signal constant(double value) { return {Kind::constant, 0.0, value, 0.0}; }
    static Signal sinusoid(double offset, double amplitude, double frequency) {
        return {Kind::sinusoid, offset, amplitude, frequency};
    }
    static Signal square(double offset, double amplitude, double frequency) {
        return {Kind::square, offset, amplitude, frequency};
    }

    double operator()(double t) const noexcept;
    /// sup_t |s(t)|
    double sup() const noexcept;
};

Signal::Kind parse_signal_kind(std::string_view name);
std::string_view to_string(Signal::Kind k);

} // namespace ptlab
