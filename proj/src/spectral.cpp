#include "agg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace agg {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace

int signed_mode(int k, int n) { return k < n / 2 ? k : k - n; }

double wavevector(const Grid& g, int k) {
    return M_PI * signed_mode(k, g.points_per_dim) / g.half_length;
}

double wavevector_sq(const Grid& g, std::size_t flat) {
    const int n = g.points_per_dim;
    if (g.dim == 1) {
        const double xi = wavevector(g, static_cast<int>(flat));
        return xi * xi;
    }
    const double xi = wavevector(g, static_cast<int>(flat) / n);
    const double eta = wavevector(g, static_cast<int>(flat) % n);
    return xi * xi + eta * eta;
}

struct SpectralWorkspace::Impl {
    fftw_complex* buffer = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

SpectralWorkspace::SpectralWorkspace(const Grid& g) : grid_(g), impl_(std::make_unique<Impl>()) {
    const std::size_t count = g.cell_count();
    impl_->buffer = fftw_alloc_complex(count);
    if (impl_->buffer == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    const int n = g.points_per_dim;
    if (g.dim == 1) {
        impl_->fwd = fftw_plan_dft_1d(n, impl_->buffer, impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        impl_->bwd = fftw_plan_dft_1d(n, impl_->buffer, impl_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
        impl_->fwd = fftw_plan_dft_2d(n, n, impl_->buffer, impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        impl_->bwd = fftw_plan_dft_2d(n, n, impl_->buffer, impl_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard lock(planner_mutex());
    if (impl_->fwd != nullptr) fftw_destroy_plan(impl_->fwd);
    if (impl_->bwd != nullptr) fftw_destroy_plan(impl_->bwd);
    if (impl_->buffer != nullptr) fftw_free(impl_->buffer);
}

FourierField SpectralWorkspace::forward(const Field& f) {
    require_same_grid(f.grid, grid_, "SpectralWorkspace::forward");
    const std::size_t count = grid_.cell_count();
    for (std::size_t i = 0; i < count; ++i) {
        impl_->buffer[i][0] = f.values[i];
        impl_->buffer[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd);
    FourierField out = FourierField::zeros(grid_);
    for (std::size_t i = 0; i < count; ++i)
        out.modes[i] = {impl_->buffer[i][0], impl_->buffer[i][1]};
    return out;
}

Field SpectralWorkspace::inverse(const FourierField& fh) {
    require_same_grid(fh.grid, grid_, "SpectralWorkspace::inverse");
    const std::size_t count = grid_.cell_count();
    for (std::size_t i = 0; i < count; ++i) {
        impl_->buffer[i][0] = fh.modes[i].real();
        impl_->buffer[i][1] = fh.modes[i].imag();
    }
    fftw_execute(impl_->bwd);
    Field out = Field::zeros(grid_);
    const double scale = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) out.values[i] = impl_->buffer[i][0] * scale;
    return out;
}

void SpectralWorkspace::forward_raw(std::complex<double>* data) {
    const std::size_t count = grid_.cell_count();
    for (std::size_t i = 0; i < count; ++i) {
        impl_->buffer[i][0] = data[i].real();
        impl_->buffer[i][1] = data[i].imag();
    }
    fftw_execute(impl_->fwd);
    for (std::size_t i = 0; i < count; ++i) data[i] = {impl_->buffer[i][0], impl_->buffer[i][1]};
}

void SpectralWorkspace::inverse_raw(std::complex<double>* data) {
    const std::size_t count = grid_.cell_count();
    for (std::size_t i = 0; i < count; ++i) {
        impl_->buffer[i][0] = data[i].real();
        impl_->buffer[i][1] = data[i].imag();
    }
    fftw_execute(impl_->bwd);
    const double scale = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i)
        data[i] = {impl_->buffer[i][0] * scale, impl_->buffer[i][1] * scale};
}

FourierField transform(const Field& f) {
    SpectralWorkspace ws(f.grid);
    return ws.forward(f);
}

Field inverse_transform(const FourierField& fh) {
    SpectralWorkspace ws(fh.grid);
    return ws.inverse(fh);
}

FourierField sample_symbol(const Grid& g, const RadialSymbol& symbol) {
    FourierField out = FourierField::zeros(g);
    for (std::size_t i = 0; i < out.modes.size(); ++i)
        out.modes[i] = symbol(wavevector_sq(g, i));
    return out;
}

Field spectral_convolve(SpectralWorkspace& ws, const Field& f, const FourierField& symbol) {
    require_same_grid(f.grid, symbol.grid, "spectral_convolve");
    FourierField fh = ws.forward(f);
    for (std::size_t i = 0; i < fh.modes.size(); ++i) fh.modes[i] *= symbol.modes[i];
    Field out = ws.inverse(fh);
    out.time_tag = f.time_tag;
    return out;
}

Field spectral_convolve(const Field& f, const FourierField& symbol) {
    SpectralWorkspace ws(f.grid);
    return spectral_convolve(ws, f, symbol);
}

std::vector<Field> spectral_gradient(SpectralWorkspace& ws, const Field& f) {
    const Grid& g = f.grid;
    const int n = g.points_per_dim;
    FourierField fh = ws.forward(f);
    std::vector<Field> out;
    out.reserve(g.dim);
    for (int axis = 0; axis < g.dim; ++axis) {
        FourierField dh = FourierField::zeros(g);
        for (std::size_t i = 0; i < fh.modes.size(); ++i) {
            const int k = g.dim == 1 ? static_cast<int>(i)
                                     : (axis == 0 ? static_cast<int>(i) / n : static_cast<int>(i) % n);
            if (signed_mode(k, n) == -n / 2) continue;  // odd multiplier: drop Nyquist
            dh.modes[i] = std::complex<double>(0.0, wavevector(g, k)) * fh.modes[i];
        }
        Field d = ws.inverse(dh);
        d.time_tag = f.time_tag;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<Field> spectral_gradient(const Field& f) {
    SpectralWorkspace ws(f.grid);
    return spectral_gradient(ws, f);
}

Field spectral_laplacian(const Field& f) {
    FourierField sym = sample_symbol(f.grid, [](double xisq) { return -xisq; });
    return spectral_convolve(f, sym);
}

void dealias_two_thirds(FourierField& fh) {
    const Grid& g = fh.grid;
    const int n = g.points_per_dim;
    const int cut = n / 3;
    auto keep = [&](int k) { return std::abs(signed_mode(k, n)) <= cut; };
    if (g.dim == 1) {
        for (int k = 0; k < n; ++k)
            if (!keep(k)) fh.modes[k] = 0.0;
    } else {
        for (int kx = 0; kx < n; ++kx)
            for (int ky = 0; ky < n; ++ky)
                if (!keep(kx) || !keep(ky)) fh.modes[g.at(kx, ky)] = 0.0;
    }
}

}  // namespace agg
