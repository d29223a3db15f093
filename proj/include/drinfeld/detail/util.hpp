#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace drinfeld {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands built over different ground configurations.
class config_mismatch : public error {
public:
    using error::error;
};

/// A value is indistinguishable from zero, or a requested precision is out of reach.
class precision_error : public error {
public:
    using error::error;
};

/// A precondition on the mathematical input does not hold.
class domain_error : public error {
public:
    using error::error;
};

namespace detail {

using i128 = __int128;

// Precision sentinel for exact values. Kept far from the int64 limits so that
// sums of a few sentinels cannot overflow.
inline constexpr std::int64_t k_exact = std::numeric_limits<std::int64_t>::max() / 8;

inline constexpr i128 k_i128_big = static_cast<i128>(1) << 100;

inline std::int64_t sat_add(std::int64_t a, std::int64_t b)
{
    if (a >= k_exact || b >= k_exact) {
        return k_exact;
    }
    const i128 s = static_cast<i128>(a) + b;
    if (s >= k_exact) {
        return k_exact;
    }
    if (s <= -k_exact) {
        return -k_exact;
    }
    return static_cast<std::int64_t>(s);
}

inline std::int64_t sat_mul(std::int64_t a, std::int64_t b)
{
    if (a >= k_exact || b >= k_exact) {
        return k_exact;
    }
    const i128 s = static_cast<i128>(a) * b;
    if (s >= k_exact) {
        return k_exact;
    }
    if (s <= -k_exact) {
        return -k_exact;
    }
    return static_cast<std::int64_t>(s);
}

inline i128 clamp128(i128 x)
{
    return std::clamp(x, -k_i128_big, k_i128_big);
}

inline i128 mul128(i128 a, i128 b)
{
    // Both factors are kept below 2^100; the product is clamped through long double
    // when it would leave the safe range.
    const long double approx = static_cast<long double>(a) * static_cast<long double>(b);
    if (approx > 1e30L || approx < -1e30L) {
        return approx > 0 ? k_i128_big : -k_i128_big;
    }
    return clamp128(a * b);
}

inline i128 add128(i128 a, i128 b)
{
    return clamp128(a + b);
}

/// q^k, clamped.
inline i128 pow128(std::int64_t q, std::int64_t k)
{
    i128 r = 1;
    for (std::int64_t i = 0; i < k; ++i) {
        r = mul128(r, q);
        if (r >= k_i128_big) {
            return k_i128_big;
        }
    }
    return r;
}

inline std::int64_t to_i64(i128 x)
{
    if (x >= k_exact) {
        return k_exact;
    }
    if (x <= -k_exact) {
        return -k_exact;
    }
    return static_cast<std::int64_t>(x);
}

inline std::int64_t ipow(std::int64_t b, unsigned e)
{
    std::int64_t r = 1;
    for (unsigned i = 0; i < e; ++i) {
        r *= b;
    }
    return r;
}

/// Static block partition of [0, n) over at most `threads` workers. `fn(tid, begin, end)`
/// is called once per non-empty block; block boundaries depend only on n and threads.
inline void parallel_blocks(std::size_t n, unsigned threads,
                            const std::function<void(unsigned, std::size_t, std::size_t)> &fn)
{
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
        if (n > 0) {
            fn(0, 0, n);
        }
        return;
    }
    const std::size_t t = std::min<std::size_t>(threads, n);
    const std::size_t chunk = (n + t - 1) / t;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) {
            break;
        }
        pool.emplace_back([&, w, b, e] {
            try {
                fn(static_cast<unsigned>(w), b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    for (auto &ep : errors) {
        if (ep) {
            std::rethrow_exception(ep);
        }
    }
}

} // namespace detail
} // namespace drinfeld
