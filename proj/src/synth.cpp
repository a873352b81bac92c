#include "eegclf/synth.hpp"

#include "eegclf/bands.hpp"
#include "eegclf/rng.hpp"

#include <cmath>
#include <numbers>

namespace eegclf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMicrovoltScale = 40.0;

// One spectral component realized as a complex rotation, optionally with a
// slow sinusoidal amplitude modulation (the "burst" envelope).
struct Oscillator {
    double re, im;         // carrier state
    double rot_re, rot_im; // per-sample rotation
    double mre, mim;       // modulator state
    double mrot_re, mrot_im;
    double amp;
    double mod_depth;

    double step() {
        const double value = amp * (1.0 + mod_depth * mre) * re;
        double nre = re * rot_re - im * rot_im;
        double nim = re * rot_im + im * rot_re;
        re = nre;
        im = nim;
        nre = mre * mrot_re - mim * mrot_im;
        nim = mre * mrot_im + mim * mrot_re;
        mre = nre;
        mim = nim;
        return value;
    }

    void renormalize() {
        double n = std::sqrt(re * re + im * im);
        if (n > 0.0) { re /= n; im /= n; }
        n = std::sqrt(mre * mre + mim * mim);
        if (n > 0.0) { mre /= n; mim /= n; }
    }
};

Oscillator make_osc(double freq_hz, double sample_rate, double phase,
                    double amp, double mod_freq_hz, double mod_phase, double mod_depth) {
    Oscillator o;
    o.re = std::cos(phase);
    o.im = std::sin(phase);
    const double w = kTwoPi * freq_hz / sample_rate;
    o.rot_re = std::cos(w);
    o.rot_im = std::sin(w);
    o.mre = std::cos(mod_phase);
    o.mim = std::sin(mod_phase);
    const double wm = kTwoPi * mod_freq_hz / sample_rate;
    o.mrot_re = std::cos(wm);
    o.mrot_im = std::sin(wm);
    o.amp = amp;
    o.mod_depth = mod_depth;
    return o;
}

constexpr int kBandComponents = 4;
constexpr int kNoiseComponents = 48;
constexpr double kModDepth = 0.6;

// Band sinusoids plus the 1/f^beta bank; draw order is fixed so the stream
// is a pure function of (profile, dims, seed).
std::vector<Oscillator> build_bank(const ClassProfile& profile, double sample_rate,
                                   RandomStream& rng) {
    std::vector<Oscillator> bank;
    double total_band_power = 0.0;

    for (const auto& [band_name, weight] : profile.band_weights) {
        if (weight <= 0.0) continue;
        const BandSpec band = band_by_name(band_name);
        total_band_power += weight;
        const double per_comp_ms = weight / kBandComponents;
        for (int c = 0; c < kBandComponents; ++c) {
            const double span = band.high - band.low;
            const double freq = band.low + span * rng.uniform(0.12, 0.88);
            const double amp = std::sqrt(2.0 * per_comp_ms / (1.0 + kModDepth * kModDepth / 2.0)) *
                               rng.uniform(0.9, 1.1);
            bank.push_back(make_osc(freq, sample_rate, rng.uniform(0.0, kTwoPi), amp,
                                    rng.uniform(0.15, 0.4), rng.uniform(0.0, kTwoPi), kModDepth));
        }
    }

    if (profile.noise_scale > 0.0) {
        const double beta = profile.noise_exponent;
        const double f_lo = 0.3;
        const double f_hi = std::min(60.0, 0.45 * sample_rate);
        const double ratio = std::pow(f_hi / f_lo, 1.0 / (kNoiseComponents - 1));
        double unnormalized = 0.0;
        std::vector<double> freqs(kNoiseComponents), ms(kNoiseComponents);
        for (int j = 0; j < kNoiseComponents; ++j) {
            freqs[j] = f_lo * std::pow(ratio, j);
            const double df = freqs[j] * (ratio - 1.0);
            ms[j] = std::pow(freqs[j], -beta) * df;
            unnormalized += ms[j];
        }
        const double target = profile.noise_scale * total_band_power;
        for (int j = 0; j < kNoiseComponents; ++j) {
            const double comp_ms = ms[j] / unnormalized * target;
            const double amp = std::sqrt(2.0 * comp_ms);
            bank.push_back(make_osc(freqs[j], sample_rate, rng.uniform(0.0, kTwoPi), amp,
                                    rng.uniform(0.05, 0.15), rng.uniform(0.0, kTwoPi), 0.0));
        }
    }
    return bank;
}

void render(std::vector<Oscillator>& bank, std::size_t n, double gain, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (auto& osc : bank) acc += osc.step();
        out[i] += gain * acc;
        if ((i & 0xfff) == 0xfff)
            for (auto& osc : bank) osc.renormalize();
    }
}

} // namespace

EegStream synth_stream(const ClassProfile& profile, std::size_t channels,
                       double sample_rate, double duration_s,
                       std::uint64_t seed, const std::string& subject_id) {
    profile.validate();
    if (channels < 1) throw std::invalid_argument("synth_stream: channels must be >= 1");
    if (sample_rate <= 0.0) throw std::invalid_argument("synth_stream: sample rate must be positive");
    if (duration_s <= 0.0) throw std::invalid_argument("synth_stream: duration must be positive");

    const auto n = static_cast<std::size_t>(std::llround(sample_rate * duration_s));
    if (n < 1) throw std::invalid_argument("synth_stream: empty stream requested");

    EegStream s;
    s.subject_id = subject_id.empty()
                       ? "synth_c" + std::to_string(profile.class_id) + "_s" + std::to_string(seed)
                       : subject_id;
    s.class_label = profile.class_id;
    s.channels = channels;
    s.sample_rate = sample_rate;
    s.samples = n;
    s.data.assign(channels * n, 0.0f);

    const double rho = profile.channel_correlation;
    const double common_gain = std::sqrt(rho);
    const double indiv_gain = std::sqrt(1.0 - rho);

    std::vector<double> common(n, 0.0);
    {
        RandomStream rng(derive_seed(seed, {0}));
        auto bank = build_bank(profile, sample_rate, rng);
        render(bank, n, 1.0, common);
    }

    std::vector<double> buf(n);
    for (std::size_t ch = 0; ch < channels; ++ch) {
        std::fill(buf.begin(), buf.end(), 0.0);
        RandomStream rng(derive_seed(seed, {1, ch}));
        auto bank = build_bank(profile, sample_rate, rng);
        render(bank, n, 1.0, buf);
        float* row = s.channel(ch);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = static_cast<float>(kMicrovoltScale *
                                        (common_gain * common[i] + indiv_gain * buf[i]));
    }
    return s;
}

} // namespace eegclf
