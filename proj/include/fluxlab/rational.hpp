#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <vector>

namespace fluxlab {

// Exact arbitrary-precision rational. All cohomological-tier arithmetic
// happens in this type; doubles appear only on the sampled field tier.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Parses "p", "-p", or "p/q" with q > 0 after canonicalization.
Rat rat_from_string(const std::string& text);

std::string rat_to_string(const Rat& q);

inline double rat_to_double(const Rat& q) { return q.get_d(); }

bool all_zero(std::span<const Rat> v);

std::vector<std::string> rats_to_strings(std::span<const Rat> v);

} // namespace fluxlab
