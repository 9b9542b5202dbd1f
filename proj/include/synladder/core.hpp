// core.hpp — Half-integer quantum numbers, error types, small shared utilities

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace synladder {

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

// Precondition violations: bad quantum numbers, basis mismatches, unknown modes.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested object exceeds a configured size cap.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A dressed-state denominator is (near-)singular for the requested drives.
struct ResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-diagonalizable / degenerate eigenproblem within tolerance.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative scheme failed to reach its tolerance.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The requested computation is outside what this build can do (e.g. dense-only
// operation above the dense cap); callers may fall back to an alternative.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite-size collapse could not be formed (non-overlapping rescaled ranges).
struct CollapseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A diagnostic quantity is undefined for the given states.
struct DiagnosticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Half-integer arithmetic
// ---------------------------------------------------------------------------

// Exact half-integer (stored as twice its value). Magnetic quantum numbers and
// hyperfine spins are half-integers; keeping them integral makes selection
// rules and mode identities exact.
struct HalfInt {
    int twice{0};

    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int twice_value) : twice(twice_value) {}

    static constexpr HalfInt from_int(int n) { return HalfInt{2 * n}; }

    constexpr double value() const { return 0.5 * static_cast<double>(twice); }
    constexpr bool is_integer() const { return twice % 2 == 0; }

    friend constexpr bool operator==(HalfInt a, HalfInt b) { return a.twice == b.twice; }
    friend constexpr bool operator!=(HalfInt a, HalfInt b) { return a.twice != b.twice; }
    friend constexpr bool operator<(HalfInt a, HalfInt b) { return a.twice < b.twice; }
    friend constexpr bool operator<=(HalfInt a, HalfInt b) { return a.twice <= b.twice; }
    friend constexpr bool operator>(HalfInt a, HalfInt b) { return a.twice > b.twice; }
    friend constexpr bool operator>=(HalfInt a, HalfInt b) { return a.twice >= b.twice; }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.twice + b.twice}; }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.twice - b.twice}; }
    friend constexpr HalfInt operator-(HalfInt a) { return HalfInt{-a.twice}; }
    friend constexpr HalfInt operator+(HalfInt a, int n) { return HalfInt{a.twice + 2 * n}; }
    friend constexpr HalfInt operator-(HalfInt a, int n) { return HalfInt{a.twice - 2 * n}; }

    std::string str() const {
        if (is_integer()) return std::to_string(twice / 2);
        return std::to_string(twice) + "/2";
    }
};

// Parse "9/2", "-3/2", "2", "1.5" style spellings.
inline HalfInt parse_half_int(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            int num = std::stoi(s.substr(0, slash));
            int den = std::stoi(s.substr(slash + 1));
            if (den == 2) return HalfInt{num};
            if (den == 1) return HalfInt{2 * num};
            throw DomainError("half-integer denominator must be 1 or 2: " + s);
        }
        double v = std::stod(s);
        double tw = 2.0 * v;
        int twi = static_cast<int>(tw >= 0 ? tw + 0.5 : tw - 0.5);
        if (std::abs(tw - twi) > 1e-9) throw DomainError("not a half-integer: " + s);
        return HalfInt{twi};
    } catch (const std::invalid_argument&) {
        throw DomainError("cannot parse half-integer: " + s);
    }
}

// ---------------------------------------------------------------------------
// Hashing (stable across runs; used for basis identity and output file names)
// ---------------------------------------------------------------------------

struct Fnv1a {
    std::uint64_t h{14695981039346656037ull};
    void feed(std::uint64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= (x >> (8 * i)) & 0xffull;
            h *= 1099511628211ull;
        }
    }
    void feed(int x) { feed(static_cast<std::uint64_t>(static_cast<std::int64_t>(x))); }
    void feed(const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    }
};

inline std::string hex16(std::uint64_t h) {
    static const char* d = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = d[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace synladder
