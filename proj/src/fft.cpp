#include "bpl/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace bpl {

namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution via fftw_execute_dft is.
// FFTW_UNALIGNED lets one plan serve caller-owned buffers.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    PlanPair get(const GridSpec& spec) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(spec.dim, spec.points_per_axis);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<std::complex<double>> a(spec.size()), b(spec.size());
        auto* ap = reinterpret_cast<fftw_complex*>(a.data());
        auto* bp = reinterpret_cast<fftw_complex*>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair p;
        if (spec.dim == 1) {
            p.forward = fftw_plan_dft_1d(spec.points_per_axis, ap, bp, FFTW_FORWARD, flags);
            p.backward = fftw_plan_dft_1d(spec.points_per_axis, ap, bp, FFTW_BACKWARD, flags);
        } else {
            p.forward = fftw_plan_dft_2d(spec.points_per_axis, spec.points_per_axis,
                                         ap, bp, FFTW_FORWARD, flags);
            p.backward = fftw_plan_dft_2d(spec.points_per_axis, spec.points_per_axis,
                                          ap, bp, FFTW_BACKWARD, flags);
        }
        plans_[key] = p;
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, PlanPair> plans_;
};

}  // namespace

Spectrum forward_fft(const GridFunction& f) {
    Spectrum in(f.values.size()), out(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) in[i] = f.values[i];
    PlanPair p = PlanCache::instance().get(f.spec);
    fftw_execute_dft(p.forward, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

Spectrum inverse_fft(const GridSpec& spec, const Spectrum& spectrum) {
    if (spectrum.size() != spec.size()) fail(ErrorKind::Shape, "spectrum size mismatch");
    Spectrum in = spectrum, out(spectrum.size());
    PlanPair p = PlanCache::instance().get(spec);
    fftw_execute_dft(p.backward, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(spec.size());
    for (auto& z : out) z *= scale;
    return out;
}

GridFunction inverse_fft_real(const GridSpec& spec, const Spectrum& spectrum,
                              double* imag_l2) {
    Spectrum z = inverse_fft(spec, spectrum);
    GridFunction g = GridFunction::zeros(spec);
    double imag2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        g.values[i] = z[i].real();
        imag2 += z[i].imag() * z[i].imag();
    }
    if (imag_l2) *imag_l2 = std::sqrt(imag2 * spec.cell_volume());
    return g;
}

}  // namespace bpl
