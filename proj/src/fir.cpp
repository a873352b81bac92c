#include "eegclf/fir.hpp"

#include "eegclf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eegclf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeFactor = 1.5;  // stopband measured at low/1.5 and high*1.5
constexpr double kStopbandWeight = 8.0;
constexpr double kPassRippleDb = 1.0;
constexpr double kStopAttenDb = 30.0;

struct Segment {
    double w1, w2;  // rad/sample
    double weight;
    double desired; // 0 or 1
};

// I_k = sum over segments of weight * integral of cos(k w) dw
double segment_integral(const std::vector<Segment>& segs, int k) {
    double acc = 0.0;
    for (const auto& s : segs) {
        if (s.weight == 0.0) continue;
        if (k == 0) acc += s.weight * (s.w2 - s.w1);
        else acc += s.weight * (std::sin(k * s.w2) - std::sin(k * s.w1)) / k;
    }
    return acc;
}

double rhs_integral(const std::vector<Segment>& segs, int k) {
    double acc = 0.0;
    for (const auto& s : segs) {
        if (s.weight == 0.0 || s.desired == 0.0) continue;
        if (k == 0) acc += s.weight * s.desired * (s.w2 - s.w1);
        else acc += s.weight * s.desired * (std::sin(k * s.w2) - std::sin(k * s.w1)) / k;
    }
    return acc;
}

// Symmetric positive definite solve via Cholesky with a relative jitter
// fallback for near-singular tap budgets.
std::vector<double> solve_spd(std::vector<double>& q, std::vector<double> b, std::size_t n) {
    double diag_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, q[i * n + i]);
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<double> l = q;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = l[i * n + j] -
                           kernels::dot(l.data() + i * n, l.data() + j * n, j);
                if (i == j) {
                    if (s <= 0.0) { ok = false; break; }
                    l[i * n + i] = std::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        if (ok) {
            std::vector<double> y(n), x(n);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = (b[i] - kernels::dot(l.data() + i * n, y.data(), i)) / l[i * n + i];
            for (std::size_t ii = n; ii-- > 0;) {
                double s = y[ii];
                for (std::size_t jj = ii + 1; jj < n; ++jj) s -= l[jj * n + ii] * x[jj];
                x[ii] = s / l[ii * n + ii];
            }
            return x;
        }
        const double jitter = diag_max * 1e-12 * std::pow(10.0, attempt);
        for (std::size_t i = 0; i < n; ++i) q[i * n + i] += jitter;
    }
    throw FilterDesignError("least-squares FIR system is numerically singular");
}

double to_db(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

} // namespace

std::string FirDesignReport::summary() const {
    std::ostringstream os;
    os << "passband [" << passband_min_db << ", " << passband_max_db << "] dB"
       << ", atten " << atten_low_edge_db << " dB @ " << low_measure_hz << " Hz"
       << ", " << atten_high_edge_db << " dB @ " << high_measure_hz << " Hz"
       << ", worst stopband " << stopband_worst_db << " dB"
       << (meets_spec ? " (ok)" : " (spec unmet)");
    return os.str();
}

double FirFilter::magnitude_at(double freq_hz) const {
    const std::size_t half = group_delay();
    const double w = 2.0 * kPi * freq_hz / design_rate;
    double a = taps[half];
    for (std::size_t k = 1; k <= half; ++k) a += 2.0 * taps[half + k] * std::cos(k * w);
    return std::fabs(a);
}

std::size_t default_fir_taps(double sample_rate) {
    auto t = static_cast<std::size_t>(std::ceil(sample_rate / 2.0));
    if (t % 2 == 0) ++t;
    return std::max<std::size_t>(t, 31);
}

namespace {

FirDesignReport evaluate_design(const FirFilter& f) {
    const double nyq = f.design_rate / 2.0;
    FirDesignReport r;
    r.low_measure_hz = f.band.low > 0.0 ? f.band.low / kEdgeFactor : 0.0;
    r.high_measure_hz = std::min(f.band.high * kEdgeFactor, 0.5 * (f.band.high + nyq));

    double pmin = 1e300, pmax = -1e300;
    const int grid = 400;
    for (int i = 0; i <= grid; ++i) {
        const double fr = f.band.low + (f.band.high - f.band.low) * i / grid;
        const double db = to_db(f.magnitude_at(fr));
        pmin = std::min(pmin, db);
        pmax = std::max(pmax, db);
    }
    r.passband_min_db = pmin;
    r.passband_max_db = pmax;

    r.atten_low_edge_db = f.band.low > 0.0 ? -to_db(f.magnitude_at(r.low_measure_hz)) : 1e3;
    r.atten_high_edge_db = -to_db(f.magnitude_at(r.high_measure_hz));

    double worst = -1e300;
    const int sgrid = 600;
    for (int i = 0; i <= sgrid; ++i) {
        const double fr = r.low_measure_hz * i / sgrid;
        if (f.band.low <= 0.0) break;
        worst = std::max(worst, to_db(f.magnitude_at(fr)));
    }
    for (int i = 0; i <= sgrid; ++i) {
        const double fr = r.high_measure_hz + (nyq - r.high_measure_hz) * i / sgrid;
        worst = std::max(worst, to_db(f.magnitude_at(fr)));
    }
    r.stopband_worst_db = worst;

    r.meets_spec = r.passband_max_db <= kPassRippleDb && r.passband_min_db >= -kPassRippleDb &&
                   r.atten_low_edge_db >= kStopAttenDb && r.atten_high_edge_db >= kStopAttenDb;
    return r;
}

} // namespace

FirFilter design_band_fir_unchecked(const BandSpec& band, double sample_rate, std::size_t taps) {
    band.validate_at(sample_rate);
    if (taps % 2 == 0 || taps < 31)
        throw std::invalid_argument("FIR tap count must be odd and >= 31, got " + std::to_string(taps));

    const double nyq = sample_rate / 2.0;
    const auto rad = [&](double hz) { return kPi * hz / nyq; };

    std::vector<Segment> segs;
    const double f_stop_lo = band.low > 0.0 ? band.low / kEdgeFactor : 0.0;
    const double f_stop_hi = std::min(band.high * kEdgeFactor, 0.5 * (band.high + nyq));
    if (band.low > 0.0)
        segs.push_back({0.0, rad(f_stop_lo), kStopbandWeight, 0.0});
    segs.push_back({rad(band.low), rad(band.high), 1.0, 1.0});
    segs.push_back({rad(f_stop_hi), kPi, kStopbandWeight, 0.0});

    const std::size_t half = (taps - 1) / 2;
    const std::size_t n = half + 1;

    // cache I_k for k = 0 .. 2*half
    std::vector<double> ik(2 * half + 1);
    for (std::size_t k = 0; k < ik.size(); ++k)
        ik[k] = segment_integral(segs, static_cast<int>(k));

    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t d = i > j ? i - j : j - i;
            q[i * n + j] = 0.5 * (ik[d] + ik[i + j]);
        }
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = rhs_integral(segs, static_cast<int>(i));

    const std::vector<double> a = solve_spd(q, std::move(b), n);

    FirFilter f;
    f.band = band;
    f.design_rate = sample_rate;
    f.taps.assign(taps, 0.0);
    f.taps[half] = a[0];
    for (std::size_t k = 1; k <= half; ++k) {
        f.taps[half + k] = 0.5 * a[k];
        f.taps[half - k] = 0.5 * a[k];
    }
    f.report = evaluate_design(f);
    return f;
}

FirFilter design_band_fir(const BandSpec& band, double sample_rate, std::size_t taps) {
    FirFilter f = design_band_fir_unchecked(band, sample_rate, taps);
    if (!f.report.meets_spec)
        throw FilterDesignError("band " + band.name + " too narrow for " + std::to_string(taps) +
                                " taps at K=" + std::to_string(sample_rate) + ": " +
                                f.report.summary());
    return f;
}

EegStream apply_fir(const EegStream& stream, const FirFilter& filter) {
    stream.validate();
    if (filter.design_rate != stream.sample_rate)
        throw std::invalid_argument("filter designed at K=" + std::to_string(filter.design_rate) +
                                    " applied to stream at K=" + std::to_string(stream.sample_rate));

    const std::size_t n = stream.samples;
    const std::size_t t = filter.taps.size();
    const std::size_t delay = filter.group_delay();
    const double* h = filter.taps.data();

    EegStream out = stream;
    std::vector<double> x(n);
    for (std::size_t ch = 0; ch < stream.channels; ++ch) {
        const float* src = stream.channel(ch);
        for (std::size_t i = 0; i < n; ++i) x[i] = src[i];
        float* dst = out.channel(ch);
        for (std::size_t i = 0; i < n; ++i) {
            // y[i] = sum_j h[j] * x[i + j - delay], zero outside [0, n)
            const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(delay);
            std::size_t j0 = start < 0 ? static_cast<std::size_t>(-start) : 0;
            std::size_t j1 = std::min<std::ptrdiff_t>(t, static_cast<std::ptrdiff_t>(n) - start);
            double acc;
            if (j0 == 0 && static_cast<std::size_t>(j1) == t) {
                acc = kernels::dot(h, x.data() + start, t);
            } else {
                acc = 0.0;
                for (std::size_t j = j0; j < static_cast<std::size_t>(j1); ++j)
                    acc += h[j] * x[static_cast<std::size_t>(start + static_cast<std::ptrdiff_t>(j))];
            }
            dst[i] = static_cast<float>(acc);
        }
    }
    return out;
}

} // namespace eegclf
