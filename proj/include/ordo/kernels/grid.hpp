#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "ordo/core/error.hpp"

namespace ordo::kernels {

using cplx = std::complex<double>;

/// Uniform periodic position grid q_i = q_min + i*dq, i = 0..n-1, with
/// dq = (q_max - q_min)/n and the centered conjugate momentum grid
/// p_j = 2*pi*hbar*j/(n*dq), j = -n/2 .. n/2-1.
class Grid1D {
public:
    Grid1D(double q_min, double q_max, int n, double hbar = 1.0) : q_min_(q_min), q_max_(q_max), n_(n), hbar_(hbar) {
        if (n < 8 || n % 2 != 0) throw DomainError("grid size must be even and >= 8");
        if (!(q_max > q_min)) throw DomainError("grid requires q_max > q_min");
        if (!(hbar > 0)) throw DomainError("hbar must be positive");
    }

    double q_min() const { return q_min_; }
    double q_max() const { return q_max_; }
    int n() const { return n_; }
    double hbar() const { return hbar_; }
    double length() const { return q_max_ - q_min_; }
    double dq() const { return length() / n_; }
    double q(int i) const { return q_min_ + i * dq(); }

    /// Signed momentum index of the k-th momentum slot, k = 0..n-1.
    int momentum_index(int k) const { return k - n_ / 2; }
    double p(int k) const { return 2.0 * std::numbers::pi * hbar_ * momentum_index(k) / (n_ * dq()); }
    double p_nyquist() const { return std::numbers::pi * hbar_ / dq(); }

    /// Minimum-image displacement of x into [-L/2, L/2).
    double wrap(double x) const {
        const double L = length();
        return x - L * std::floor(x / L + 0.5);
    }

    bool operator==(const Grid1D&) const = default;

private:
    double q_min_;
    double q_max_;
    int n_;
    double hbar_;
};

/// Grid samples of a wavefunction. The norm is the dq-weighted 2-norm.
struct WaveFunction {
    Grid1D grid;
    Eigen::VectorXcd samples;

    WaveFunction(Grid1D g, Eigen::VectorXcd s) : grid(g), samples(std::move(s)) {
        if (samples.size() != grid.n()) throw DomainError("wavefunction size does not match grid");
    }

    static WaveFunction sample(const Grid1D& g, const std::function<cplx(double)>& f) {
        Eigen::VectorXcd s(g.n());
        for (int i = 0; i < g.n(); ++i) s(i) = f(g.q(i));
        return WaveFunction(g, std::move(s));
    }

    /// Normalized Gaussian wave packet centered at q0 with mean momentum p0.
    static WaveFunction gaussian(const Grid1D& g, double q0, double p0, double width) {
        WaveFunction psi = sample(g, [&](double q) {
            const double x = (q - q0) / width;
            return std::exp(cplx(-0.5 * x * x, p0 * q / g.hbar()));
        });
        psi.normalize();
        return psi;
    }

    /// Plane wave with the k-th grid momentum, unit dq-norm.
    static WaveFunction plane_wave(const Grid1D& g, int k) {
        const double amp = 1.0 / std::sqrt(g.length());
        return sample(g, [&](double q) { return amp * std::exp(cplx(0.0, g.p(k) * (q - g.q_min()) / g.hbar())); });
    }

    double norm() const { return std::sqrt(grid.dq()) * samples.norm(); }
    void normalize() { samples /= norm(); }
    double distance(const WaveFunction& other) const { return std::sqrt(grid.dq()) * (samples - other.samples).norm(); }
};

} // namespace ordo::kernels
