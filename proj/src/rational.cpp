#include "fluxlab/rational.hpp"

#include <algorithm>
#include <cctype>

#include "fluxlab/errors.hpp"

namespace fluxlab {

namespace {

bool digits_only(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

} // namespace

Rat rat_from_string(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw ConfigInvalid("empty rational literal");

    bool negative = false;
    if (s[0] == '-' || s[0] == '+') {
        negative = (s[0] == '-');
        s.erase(s.begin());
    }

    std::string num = s, den = "1";
    if (auto slash = s.find('/'); slash != std::string::npos) {
        num = s.substr(0, slash);
        den = s.substr(slash + 1);
    }
    if (!digits_only(num) || !digits_only(den))
        throw ConfigInvalid("bad rational literal \"" + text + "\" (expected p, -p, or p/q)");

    Rat q{mpz_class(num), mpz_class(den)};
    if (q.get_den() == 0) throw ConfigInvalid("zero denominator in \"" + text + "\"");
    q.canonicalize();
    if (negative) q = -q;
    return q;
}

std::string rat_to_string(const Rat& q) {
    std::string s = q.get_num().get_str();
    if (q.get_den() != 1) s += "/" + q.get_den().get_str();
    return s;
}

bool all_zero(std::span<const Rat> v) {
    return std::all_of(v.begin(), v.end(), [](const Rat& q) { return q == 0; });
}

std::vector<std::string> rats_to_strings(std::span<const Rat> v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const Rat& q : v) out.push_back(rat_to_string(q));
    return out;
}

} // namespace fluxlab
