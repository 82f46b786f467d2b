#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kwrank {

// Exact rational over 64-bit integers. Rank scores are small fractions over
// the vocabulary size (7/10, 6/11, ...) and must reproduce to the digit, so
// everything score-related stays rational until rendered.
class Rational {
public:
    constexpr Rational() = default;

    Rational(long long num, long long den = 1) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
        normalize();
    }

    // Accepts "7", "0.40", "-1.5" and "2/5".
    static Rational from_string(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("empty rational literal");
        auto slash = s.find('/');
        if (slash != std::string_view::npos) {
            return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
        }
        bool negative = false;
        std::string_view rest = s;
        if (rest.front() == '+' || rest.front() == '-') {
            negative = rest.front() == '-';
            rest.remove_prefix(1);
        }
        auto dot = rest.find('.');
        std::string_view int_part = dot == std::string_view::npos ? rest : rest.substr(0, dot);
        std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
        if (int_part.empty() && frac_part.empty())
            throw std::invalid_argument("malformed rational literal: " + std::string(s));
        long long num = int_part.empty() ? 0 : parse_int(int_part);
        long long den = 1;
        for (char c : frac_part) {
            if (c < '0' || c > '9') throw std::invalid_argument("malformed rational literal: " + std::string(s));
            if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10)
                throw std::overflow_error("rational literal too long: " + std::string(s));
            num = num * 10 + (c - '0');
            den *= 10;
        }
        return Rational(negative ? -num : num, den);
    }

    long long num() const noexcept { return num_; }
    long long den() const noexcept { return den_; }
    bool is_zero() const noexcept { return num_ == 0; }

    Rational& operator+=(const Rational& o) {
        __int128 n = (__int128)num_ * o.den_ + (__int128)o.num_ * den_;
        __int128 d = (__int128)den_ * o.den_;
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("rational overflow");
        num_ = (long long)n;
        den_ = (long long)d;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        __int128 lhs = (__int128)a.num_ * b.den_;
        __int128 rhs = (__int128)b.num_ * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    double to_double() const noexcept { return (double)num_ / (double)den_; }

    std::string to_fraction() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Exact decimal when the reduced denominator is 2^a*5^b ("0.7", "0.25");
    // otherwise rounded half-up to max_digits fractional digits ("0.636364").
    std::string to_decimal(int max_digits = 6) const {
        __int128 n = num_ < 0 ? -(__int128)num_ : (__int128)num_;
        long long int_part = (long long)(n / den_);
        __int128 rem = n % den_;
        std::string digits;
        if (rem != 0) {
            for (int i = 0; i < max_digits && rem != 0; ++i) {
                rem *= 10;
                digits += char('0' + (int)(rem / den_));
                rem %= den_;
            }
            if (rem != 0 && 2 * rem >= den_) {
                // round half up with carry
                int i = (int)digits.size() - 1;
                for (; i >= 0; --i) {
                    if (digits[i] != '9') {
                        ++digits[i];
                        break;
                    }
                    digits[i] = '0';
                }
                if (i < 0) ++int_part;
            }
            while (!digits.empty() && digits.back() == '0') digits.pop_back();
        }
        std::string out;
        if (num_ < 0 && (int_part != 0 || !digits.empty())) out += '-';
        out += std::to_string(int_part);
        if (!digits.empty()) {
            out += '.';
            out += digits;
        }
        return out;
    }

private:
    static long long parse_int(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("malformed rational literal");
        bool negative = false;
        size_t i = 0;
        if (s[0] == '+' || s[0] == '-') {
            negative = s[0] == '-';
            i = 1;
            if (s.size() == 1) throw std::invalid_argument("malformed rational literal");
        }
        long long v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw std::invalid_argument("malformed rational literal: " + std::string(s));
            if (v > (INT64_MAX - 9) / 10) throw std::overflow_error("rational literal too long");
            v = v * 10 + (s[i] - '0');
        }
        return negative ? -v : v;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    long long num_ = 0;
    long long den_ = 1;
};

}  // namespace kwrank
