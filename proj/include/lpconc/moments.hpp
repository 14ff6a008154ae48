#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lpconc {

// Streaming central moments up to 4th order with an associative merge,
// so parallel chunks can be combined in a fixed order.
class MomentAccumulator {
  public:
    void add(double x) {
        const double n1 = static_cast<double>(count_);
        ++count_;
        const double n = static_cast<double>(count_);
        const double delta = x - mean_;
        const double delta_n = delta / n;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean_ += delta_n;
        m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
               4.0 * delta_n * m3_;
        m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
        m2_ += term1;
    }

    static MomentAccumulator merge(const MomentAccumulator& a, const MomentAccumulator& b) {
        if (a.count_ == 0) return b;
        if (b.count_ == 0) return a;
        MomentAccumulator r;
        const double na = static_cast<double>(a.count_);
        const double nb = static_cast<double>(b.count_);
        const double n = na + nb;
        const double delta = b.mean_ - a.mean_;
        const double d2 = delta * delta;
        r.count_ = a.count_ + b.count_;
        r.mean_ = a.mean_ + delta * nb / n;
        r.m2_ = a.m2_ + b.m2_ + d2 * na * nb / n;
        r.m3_ = a.m3_ + b.m3_ + d2 * delta * na * nb * (na - nb) / (n * n) +
                3.0 * delta * (na * b.m2_ - nb * a.m2_) / n;
        r.m4_ = a.m4_ + b.m4_ +
                d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                6.0 * d2 * (na * na * b.m2_ + nb * nb * a.m2_) / (n * n) +
                4.0 * delta * (na * b.m3_ - nb * a.m3_) / n;
        return r;
    }

    std::uint64_t count() const { return count_; }
    double mean() const {
        require(1);
        return mean_;
    }
    // unbiased, divisor count-1
    double sample_variance() const {
        require(2);
        return m2_ / static_cast<double>(count_ - 1);
    }
    double central_moment2() const {
        require(1);
        return m2_ / static_cast<double>(count_);
    }
    double central_moment4() const {
        require(1);
        return m4_ / static_cast<double>(count_);
    }
    double mean_std_error() const {
        require(2);
        return std::sqrt(sample_variance() / static_cast<double>(count_));
    }
    // SE of the sample variance from the 4th central moment
    double variance_std_error() const {
        require(2);
        const double n = static_cast<double>(count_);
        const double s2 = sample_variance();
        double v = (central_moment4() - (n - 3.0) / (n - 1.0) * s2 * s2) / n;
        return std::sqrt(std::max(v, 0.0));
    }

  private:
    void require(std::uint64_t k) const {
        if (count_ < k)
            throw std::domain_error("MomentAccumulator: statistic undefined at this count");
    }

    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

}  // namespace lpconc
