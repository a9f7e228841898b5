#include <cmath>

#include "gfaccess/errors.hpp"
#include "gfaccess/numerics.hpp"

namespace gfaccess {

namespace {

void require_same_grid(double a, double b) {
    if (std::abs(a - b) > 1e-12 * std::max(a, b)) throw GridMismatch("convolution operands use different grid steps");
}

}  // namespace

DiscretizedPdf DiscretizedPdf::delta(double dz) {
    DiscretizedPdf d;
    d.dz = dz;
    d.dirac = true;
    return d;
}

DiscretizedPdf DiscretizedPdf::sample(const std::function<double(double)>& fn, double z_max, int intervals) {
    if (intervals < 1 || !(z_max > 0)) throw std::invalid_argument("DiscretizedPdf::sample: empty grid");
    DiscretizedPdf d;
    d.dz = z_max / intervals;
    d.values.resize(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) d.values[static_cast<std::size_t>(i)] = std::max(0.0, fn(i * d.dz));
    return d;
}

double DiscretizedPdf::mass() const {
    if (dirac) return 1.0;
    if (values.size() < 2) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return dz * (s - 0.5 * (values.front() + values.back()));
}

DiscretizedPdf convolve(const DiscretizedPdf& f, const DiscretizedPdf& g) {
    require_same_grid(f.dz, g.dz);
    if (f.dirac) return g;
    if (g.dirac) return f;
    const std::size_t n = std::min(f.values.size(), g.values.size());
    DiscretizedPdf h;
    h.dz = f.dz;
    h.values.assign(n, 0.0);
    const double* fv = f.values.data();
    const double* gv = g.values.data();
    for (std::size_t i = 1; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += fv[j] * gv[i - j];
        s -= 0.5 * (fv[0] * gv[i] + fv[i] * gv[0]);
        h.values[i] = s * h.dz;
    }
    return h;
}

double cdf_of_convolution(const std::vector<DiscretizedPdf>& fs, const std::function<double(double)>& cdf_factor,
                          double z) {
    const DiscretizedPdf* first = nullptr;
    DiscretizedPdf h;
    for (const auto& f : fs) {
        if (f.dirac) continue;
        if (!first) {
            first = &f;
            h = f;
        } else {
            h = convolve(h, f);
        }
    }
    if (!first) return cdf_factor(z);

    const double pos = z / h.dz;
    const long long idx = std::llround(pos);
    if (std::abs(pos - static_cast<double>(idx)) > 1e-9 * std::max(1.0, pos) || idx < 0 ||
        static_cast<std::size_t>(idx) >= h.values.size()) {
        throw GridMismatch("evaluation point is not on the convolution grid");
    }
    if (idx == 0) return cdf_factor(0.0);
    double s = 0.0;
    for (long long i = 0; i <= idx; ++i) {
        const double w = (i == 0 || i == idx) ? 0.5 : 1.0;
        s += w * h.values[static_cast<std::size_t>(i)] * cdf_factor(static_cast<double>(idx - i) * h.dz);
    }
    return std::min(1.0, std::max(0.0, s * h.dz));
}

}  // namespace gfaccess
