#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "agg/grid.hpp"

namespace agg {

/// Signed mode index for DFT bin k on an axis of N points: bins above N/2-1
/// wrap to negative frequencies, bin N/2 is the Nyquist mode -N/2.
int signed_mode(int k, int n);

/// Wavevector of bin k along one axis: pi * signed_mode / L.
double wavevector(const Grid& g, int k);

/// |xi|^2 of a flat bin index.
double wavevector_sq(const Grid& g, std::size_t flat);

/// Radial Fourier multiplier m(|xi|^2).
using RadialSymbol = std::function<double(double)>;

/// FFTW plans for one grid shape. Forward is the unnormalized DFT
/// sum_j f_j exp(-2 pi i jk/N); inverse divides by N^dim. Instances are not
/// safe for concurrent use; create one per thread.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(const Grid& g);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const { return grid_; }

    FourierField forward(const Field& f);
    Field inverse(const FourierField& fh);

    /// In-place bin-order transforms on raw complex data.
    void forward_raw(std::complex<double>* data);
    void inverse_raw(std::complex<double>* data);

  private:
    Grid grid_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

FourierField transform(const Field& f);
Field inverse_transform(const FourierField& fh);

/// Sample a radial symbol on the grid's modes.
FourierField sample_symbol(const Grid& g, const RadialSymbol& symbol);

/// Inverse-transform(symbol . transform(f)); exact for band-limited inputs.
Field spectral_convolve(const Field& f, const FourierField& symbol);
Field spectral_convolve(SpectralWorkspace& ws, const Field& f, const FourierField& symbol);

/// Per-axis derivatives via the i*xi multiplier; the Nyquist mode of each
/// derivative is zeroed.
std::vector<Field> spectral_gradient(const Field& f);
std::vector<Field> spectral_gradient(SpectralWorkspace& ws, const Field& f);

/// Laplacian via the -|xi|^2 multiplier.
Field spectral_laplacian(const Field& f);

/// Zero all modes with |signed index| > N/3 on any axis (2/3-rule mask).
void dealias_two_thirds(FourierField& fh);

}  // namespace agg
