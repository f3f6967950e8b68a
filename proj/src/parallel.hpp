#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace camtrack::detail {

/// Half-open [begin, end) bounds of stripe `i` when `count` items are split
/// into `stripes` row-contiguous stripes. Earlier stripes take the remainder.
struct Stripe {
    int begin;
    int end;
};

inline Stripe stripe_bounds(int count, int stripes, int i) {
    const int base = count / stripes;
    const int extra = count % stripes;
    const int begin = i * base + std::min(i, extra);
    return {begin, begin + base + (i < extra ? 1 : 0)};
}

/// Runs fn(stripe_index, begin, end) for every stripe. Stripe 0 runs on the
/// calling thread; the first exception thrown by any stripe is rethrown.
template <typename Fn>
void for_each_stripe(int count, int stripes, Fn&& fn) {
    stripes = std::max(stripes, 1);
    if (stripes == 1) {
        fn(0, 0, count);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(stripes));
    {
        std::vector<std::jthread> threads;
        threads.reserve(std::size_t(stripes - 1));
        for (int i = 1; i < stripes; ++i) {
            threads.emplace_back([&, i] {
                try {
                    const Stripe s = stripe_bounds(count, stripes, i);
                    fn(i, s.begin, s.end);
                } catch (...) {
                    errors[std::size_t(i)] = std::current_exception();
                }
            });
        }
        try {
            const Stripe s = stripe_bounds(count, stripes, 0);
            fn(0, s.begin, s.end);
        } catch (...) {
            errors[0] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace camtrack::detail
