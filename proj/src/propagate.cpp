// SPDX-License-Identifier: Apache-2.0
//
// Band-limited angular-spectrum propagation on FFTW.

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <deque>
#include <memory>
#include <mutex>
#include <string>

#include "oam/field.hpp"
#include "oam/kernels.hpp"

namespace oam {

namespace {

using cd = std::complex<double>;

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

class FftPlan {
public:
    explicit FftPlan(int n) : n_(n)
    {
        const std::size_t len = static_cast<std::size_t>(n) * n;
        buffer_.reset(fftw_alloc_complex(len));
        if (!buffer_) throw Error("FFT buffer allocation failed");
        auto* buf = buffer_.get();
        std::lock_guard<std::mutex> lock(planner_mutex());
        forward_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (forward_ == nullptr || backward_ == nullptr) throw Error("FFTW planning failed");
    }
    ~FftPlan()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    int n() const { return n_; }
    cd* data() { return reinterpret_cast<cd*>(buffer_.get()); }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }

private:
    int n_;
    std::unique_ptr<fftw_complex, FftwFree> buffer_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

FftPlan& plan_for(int n)
{
    thread_local std::deque<std::unique_ptr<FftPlan>> cache;
    for (auto& p : cache)
        if (p->n() == n) return *p;
    cache.push_front(std::make_unique<FftPlan>(n));
    if (cache.size() > 4) cache.pop_back();
    return *cache.front();
}

double frequency(int index, int n, double df)
{
    // FFTW output order: 0, 1, ..., n/2 - 1, -n/2, ..., -1
    const int k = index < n / 2 ? index : index - n;
    return k * df;
}

double passband_limit(const GridSpec& g, double distance)
{
    const double df = 1.0 / g.window();
    const double t = 2.0 * df * distance;
    return 1.0 / (g.wavelength * std::sqrt(t * t + 1.0));
}

bool in_passband(double fx, double fy, double flim, double inv_lambda2)
{
    return std::abs(fx) < flim && std::abs(fy) < flim && fx * fx + fy * fy < inv_lambda2;
}

struct Transfer {
    GridSpec grid;
    double distance;
    std::vector<cd> h;
};

const std::vector<cd>& transfer_for(const GridSpec& g, double distance)
{
    thread_local std::deque<Transfer> cache;
    for (const auto& t : cache)
        if (t.grid == g && t.distance == distance) return t.h;

    const int n = g.n;
    const double df = 1.0 / g.window();
    const double flim = passband_limit(g, distance);
    const double inv_l2 = 1.0 / (g.wavelength * g.wavelength);
    std::vector<cd> h(g.size(), cd{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        const double fy = frequency(j, n, df);
        for (int i = 0; i < n; ++i) {
            const double fx = frequency(i, n, df);
            if (!in_passband(fx, fy, flim, inv_l2)) continue;
            const double kz = kTwoPi * std::sqrt(inv_l2 - fx * fx - fy * fy);
            h[static_cast<std::size_t>(j) * n + i] = std::polar(1.0, kz * distance);
        }
    }
    cache.push_front(Transfer{g, distance, std::move(h)});
    if (cache.size() > 6) cache.pop_back();
    return cache.front().h;
}

double spectrum_loss(const cd* spectrum, const GridSpec& g, double distance)
{
    const int n = g.n;
    const double df = 1.0 / g.window();
    const double flim = passband_limit(g, distance);
    const double inv_l2 = 1.0 / (g.wavelength * g.wavelength);
    double total = 0.0, lost = 0.0;
    for (int j = 0; j < n; ++j) {
        const double fy = frequency(j, n, df);
        for (int i = 0; i < n; ++i) {
            const double p = std::norm(spectrum[static_cast<std::size_t>(j) * n + i]);
            total += p;
            if (!in_passband(frequency(i, n, df), fy, flim, inv_l2)) lost += p;
        }
    }
    return total > 0.0 ? lost / total : 0.0;
}

FftPlan& load_spectrum(const ComplexField& field)
{
    field.grid.validate();
    if (field.values.size() != field.grid.size()) throw InvalidGrid("field size does not match its grid");
    FftPlan& plan = plan_for(field.grid.n);
    std::copy(field.values.begin(), field.values.end(), plan.data());
    plan.forward();
    return plan;
}

}  // namespace

double band_limit_loss(const ComplexField& field, double distance)
{
    FftPlan& plan = load_spectrum(field);
    return spectrum_loss(plan.data(), field.grid, distance);
}

ComplexField propagate(const ComplexField& field, double distance, double max_loss)
{
    if (!std::isfinite(distance)) throw InvalidGrid("propagation distance must be finite");
    FftPlan& plan = load_spectrum(field);
    const double loss = spectrum_loss(plan.data(), field.grid, distance);
    if (loss > max_loss)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "band limit would discard %.3g of the field power; enlarge the window or refine the pitch", loss);
        throw AliasingRisk(buf);
    }

    const std::vector<cd>& h = transfer_for(field.grid, distance);
    kernels::active().complex_multiply(plan.data(), h.data(), h.size());
    plan.backward();

    ComplexField out(field.grid);
    const double scale = 1.0 / static_cast<double>(field.grid.size());
    const cd* src = plan.data();
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = src[k] * scale;
    return out;
}

}  // namespace oam
