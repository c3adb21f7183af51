#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace emoconv {

// Non-negative exact rational used where metrics must be bit-reproducible.
// Converting to double rounds once, so equal fractions give equal doubles.
class Fraction {
public:
    constexpr Fraction() = default;
    Fraction(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::domain_error("Fraction with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Throws std::overflow_error when the exact result does not fit.
    friend Fraction operator+(const Fraction& a, const Fraction& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        std::int64_t l, r, n, d;
        if (__builtin_mul_overflow(a.num_, b.den_ / g, &l) || __builtin_mul_overflow(b.num_, a.den_ / g, &r) ||
            __builtin_add_overflow(l, r, &n) || __builtin_mul_overflow(a.den_ / g, b.den_, &d))
            throw std::overflow_error("Fraction overflow");
        return Fraction(n, d);
    }
    friend Fraction operator/(const Fraction& a, std::int64_t k) {
        std::int64_t d;
        if (__builtin_mul_overflow(a.den_, k, &d)) throw std::overflow_error("Fraction overflow");
        return Fraction(a.num_, d);
    }
    friend bool operator==(const Fraction& a, const Fraction& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(const Fraction& a, const Fraction& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Fraction& a, const Fraction& b) { return b < a; }
    friend bool operator>=(const Fraction& a, const Fraction& b) { return !(a < b); }

private:
    void normalize() {
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace emoconv
