#include "eegclf/iir.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace eegclf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kButterOrder = 4; // 24 dB/octave per skirt

enum class Kind { lowpass, highpass };

// Bilinear transform of one analog Butterworth conjugate-pole pair.
// Prototype pair: s^2 + a1p*wc*s + wc^2 in the denominator; numerator wc^2
// for low-pass, s^2 for high-pass. kappa = 2*fs with wc prewarped.
Biquad bilinear_pair(double a1p, double wc, double kappa, Kind kind) {
    const double k2 = kappa * kappa;
    const double A1 = a1p * wc;
    const double A0 = wc * wc;
    const double a0 = k2 + A1 * kappa + A0;

    Biquad q;
    if (kind == Kind::lowpass) {
        q.b0 = A0 / a0;
        q.b1 = 2.0 * A0 / a0;
        q.b2 = A0 / a0;
    } else {
        q.b0 = k2 / a0;
        q.b1 = -2.0 * k2 / a0;
        q.b2 = k2 / a0;
    }
    q.a1 = (2.0 * A0 - 2.0 * k2) / a0;
    q.a2 = (k2 - A1 * kappa + A0) / a0;
    return q;
}

std::vector<Biquad> butterworth_sos(double cutoff_hz, double sample_rate, Kind kind) {
    const double kappa = 2.0 * sample_rate;
    const double wc = kappa * std::tan(kPi * cutoff_hz / sample_rate);
    std::vector<Biquad> sos;
    for (int k = 1; k <= kButterOrder / 2; ++k) {
        const double theta = kPi * (2.0 * k + kButterOrder - 1.0) / (2.0 * kButterOrder);
        const double a1p = -2.0 * std::cos(theta);
        sos.push_back(bilinear_pair(a1p, wc, kappa, kind));
    }
    return sos;
}

// DF2T single pass with caller-provided initial state (scaled by the first
// input value for steady-state startup).
void sos_pass(const std::vector<Biquad>& sections, std::vector<double>& x,
              const std::vector<std::pair<double, double>>& zi_unit) {
    const double x0 = x.empty() ? 0.0 : x.front();
    for (std::size_t s = 0; s < sections.size(); ++s) {
        const Biquad& q = sections[s];
        double z1 = zi_unit[s].first * x0;
        double z2 = zi_unit[s].second * x0;
        for (double& v : x) {
            const double in = v;
            const double y = q.b0 * in + z1;
            z1 = q.b1 * in - q.a1 * y + z2;
            z2 = q.b2 * in - q.a2 * y;
            v = y;
        }
    }
}

// Steady-state unit-input state per section, accounting for upstream gains.
std::vector<std::pair<double, double>> steady_state_zi(const std::vector<Biquad>& sections) {
    std::vector<std::pair<double, double>> zi(sections.size());
    double level = 1.0;
    for (std::size_t s = 0; s < sections.size(); ++s) {
        const Biquad& q = sections[s];
        const double g = q.dc_gain();
        zi[s] = {level * (g - q.b0), level * (q.b2 - q.a2 * g)};
        level *= g;
    }
    return zi;
}

} // namespace

double Biquad::pole_radius() const {
    const double disc = a1 * a1 - 4.0 * a2;
    if (disc < 0.0) return std::sqrt(a2);
    const double r1 = std::fabs((-a1 + std::sqrt(disc)) / 2.0);
    const double r2 = std::fabs((-a1 - std::sqrt(disc)) / 2.0);
    return std::max(r1, r2);
}

ZeroPhaseFilter design_broadband(double low_hz, double high_hz, double sample_rate) {
    if (sample_rate <= 0.0) throw std::invalid_argument("broadband filter: sample rate must be positive");
    if (!(low_hz >= 0.0) || !(low_hz < high_hz))
        throw std::invalid_argument("broadband filter: need 0 <= low < high, got [" +
                                    std::to_string(low_hz) + ", " + std::to_string(high_hz) + ")");
    if (!(high_hz < sample_rate / 2.0))
        throw std::invalid_argument("broadband filter: high edge must lie below Nyquist");

    ZeroPhaseFilter f;
    f.design_rate = sample_rate;
    f.low = low_hz;
    f.high = high_hz;
    if (low_hz > 0.0) {
        auto hp = butterworth_sos(low_hz, sample_rate, Kind::highpass);
        f.sections.insert(f.sections.end(), hp.begin(), hp.end());
    }
    auto lp = butterworth_sos(high_hz, sample_rate, Kind::lowpass);
    f.sections.insert(f.sections.end(), lp.begin(), lp.end());
    f.one_pass_poles = 2 * f.sections.size();

    for (const auto& q : f.sections) {
        const double r = q.pole_radius();
        if (!(r < 1.0 - 1e-12))
            throw std::invalid_argument("broadband filter: unstable design for band [" +
                                        std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                                        ") Hz at K=" + std::to_string(sample_rate) +
                                        " (pole radius " + std::to_string(r) + ")");
    }
    return f;
}

std::vector<double> zero_phase_filter(const std::vector<double>& x, const ZeroPhaseFilter& filter) {
    const std::size_t n = x.size();
    if (n < 2) return x;

    double rmax = 0.0;
    for (const auto& q : filter.sections) rmax = std::max(rmax, q.pole_radius());
    const auto settle = static_cast<std::size_t>(std::ceil(9.0 / std::max(1e-9, 1.0 - rmax)));
    const std::size_t pad = std::min(n - 1, std::max<std::size_t>(3 * (filter.one_pass_poles + 1), settle));

    // odd extension at both ends
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x[0] - x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

    const auto zi = steady_state_zi(filter.sections);
    sos_pass(filter.sections, ext, zi);
    std::reverse(ext.begin(), ext.end());
    sos_pass(filter.sections, ext, zi);
    std::reverse(ext.begin(), ext.end());

    return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

EegStream zero_phase_filter(const EegStream& stream, const ZeroPhaseFilter& filter) {
    stream.validate();
    if (filter.design_rate != stream.sample_rate)
        throw std::invalid_argument("zero-phase filter designed at K=" + std::to_string(filter.design_rate) +
                                    " applied to stream at K=" + std::to_string(stream.sample_rate));
    EegStream out = stream;
    std::vector<double> buf(stream.samples);
    for (std::size_t ch = 0; ch < stream.channels; ++ch) {
        const float* src = stream.channel(ch);
        for (std::size_t i = 0; i < stream.samples; ++i) buf[i] = src[i];
        const std::vector<double> y = zero_phase_filter(buf, filter);
        float* dst = out.channel(ch);
        for (std::size_t i = 0; i < stream.samples; ++i) dst[i] = static_cast<float>(y[i]);
    }
    return out;
}

EegStream broadband_filter(const EegStream& stream, double low_hz, double high_hz) {
    return zero_phase_filter(stream, design_broadband(low_hz, high_hz, stream.sample_rate));
}

} // namespace eegclf
