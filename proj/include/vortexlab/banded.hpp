#ifndef VORTEXLAB_BANDED_HPP
#define VORTEXLAB_BANDED_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace vortexlab::banded {

/// Complex banded matrix with kl subdiagonals and ku superdiagonals, LU
/// factorization with partial pivoting (LAPACK-style band storage with kl
/// extra superdiagonals for pivot fill).
class BandedLU {
  public:
    BandedLU(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1),
          a_(static_cast<size_t>(n) * width_, {0.0, 0.0}), piv_(n, 0) {}

    // valid for |i - j| within the band
    std::complex<double>& at(int i, int j) {
        const int d = i - j; // in [-ku, kl]
        if (d < -ku_ || d > kl_) throw std::out_of_range("BandedLU::at outside band");
        return a_[static_cast<size_t>(j) * width_ + (kl_ + ku_ + d)];
    }

    void factor() {
        for (int k = 0; k < n_; ++k) {
            // pivot search in column k, rows k..min(k+kl, n-1)
            int p = k;
            double best = std::abs(entry(k, k));
            for (int i = k + 1; i <= std::min(k + kl_, n_ - 1); ++i) {
                const double v = std::abs(entry(i, k));
                if (v > best) { best = v; p = i; }
            }
            if (best == 0.0) throw std::runtime_error("BandedLU: singular matrix");
            piv_[k] = p;
            if (p != k)
                for (int j = k; j <= std::min(k + kl_ + ku_, n_ - 1); ++j)
                    std::swap(entry(k, j), entry(p, j));
            for (int i = k + 1; i <= std::min(k + kl_, n_ - 1); ++i) {
                const std::complex<double> m = entry(i, k) / entry(k, k);
                entry(i, k) = m;
                for (int j = k + 1; j <= std::min(k + kl_ + ku_, n_ - 1); ++j)
                    entry(i, j) -= m * entry(k, j);
            }
        }
        factored_ = true;
    }

    void solve(std::vector<std::complex<double>>& b) const {
        if (!factored_) throw std::logic_error("BandedLU: factor() first");
        for (int k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            for (int i = k + 1; i <= std::min(k + kl_, n_ - 1); ++i)
                b[i] -= centry(i, k) * b[k];
        }
        for (int k = n_ - 1; k >= 0; --k) {
            for (int j = k + 1; j <= std::min(k + kl_ + ku_, n_ - 1); ++j)
                b[k] -= centry(k, j) * b[j];
            b[k] /= centry(k, k);
        }
    }

    int size() const { return n_; }

  private:
    // storage valid for i - j in [-(ku+kl), kl] after fill
    std::complex<double>& entry(int i, int j) {
        return a_[static_cast<size_t>(j) * width_ + (kl_ + ku_ + i - j)];
    }
    const std::complex<double>& centry(int i, int j) const {
        return a_[static_cast<size_t>(j) * width_ + (kl_ + ku_ + i - j)];
    }
    int n_, kl_, ku_, width_;
    std::vector<std::complex<double>> a_;
    std::vector<int> piv_;
    bool factored_ = false;
};

} // namespace vortexlab::banded

#endif
