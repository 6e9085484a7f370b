#include "ptlab/signals.hpp"

#include "ptlab/errors.hpp"

#include <cmath>

namespace ptlab {

double signed_pow(double v, double a) noexcept {
    if (v == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(v), a), v);
}

double Signal::operator()(double t) const noexcept {
    switch (kind) {
    case Kind::constant: return offset + amplitude;
    case Kind::sinusoid: return offset + amplitude * std::sin(frequency * t);
    case Kind::square: return offset + amplitude * (std::sin(frequency * t) >= 0.0 ? 1.0 : -1.0);
    }
    return 0.0;
}

double Signal::sup() const noexcept {
    if (kind == Kind::constant) return std::abs(offset + amplitude);
    return std::abs(offset) + std::abs(amplitude);
}

Signal::Kind parse_signal_kind(std::string_view name) {
    if (name == "constant") return Signal::Kind::constant;
    if (name == "sinusoid") return Signal::Kind::sinusoid;
    if (name == "square") return Signal::Kind::square;
    throw ValidationError("unknown signal kind '" + std::string(name) +
                          "' (expected constant | sinusoid | square)");
}

std::string_view to_string(Signal::Kind k) {
    switch (k) {
    case Signal::Kind::constant: return "constant";
    case Signal::Kind::sinusoid: return "sinusoid";
    case Signal::Kind::square: return "square";
    }
    return "?";
}

} // namespace ptlab
