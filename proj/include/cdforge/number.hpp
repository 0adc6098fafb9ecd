#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cdforge/error.hpp"
#include "cdforge/group.hpp"

namespace cdforge {

inline bool is_prime(Residue n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (Residue d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/// Distinct prime factors in increasing order.
inline std::vector<Residue> prime_factors(Residue n) {
    std::vector<Residue> out;
    for (Residue p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline Residue mul_mod(Residue a, Residue b, Residue m) {
    return static_cast<Residue>((static_cast<__int128>(a) * b) % m);
}

inline Residue pow_mod(Residue base, Residue exp, Residue m) {
    Residue result = 1 % m;
    base = mod(base, m);
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Smallest primitive root modulo the prime p.
inline Residue primitive_root(Residue p) {
    if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
    if (p == 2) return 1;
    const auto factors = prime_factors(p - 1);
    for (Residue w = 2; w < p; ++w) {
        bool generates = true;
        for (Residue q : factors)
            if (pow_mod(w, (p - 1) / q, p) == 1) {
                generates = false;
                break;
            }
        if (generates) return w;
    }
    throw InvalidArgument("no primitive root modulo " + std::to_string(p));
}

/// The unique x in [0, m*n) with x = a (mod m) and x = b (mod n), gcd(m,n) = 1.
inline Residue crt(Residue a, Residue m, Residue b, Residue n) {
    if (std::gcd(m, n) != 1)
        throw InvalidArgument("moduli " + std::to_string(m) + " and " + std::to_string(n) +
                              " are not coprime");
    // m * (m^{-1} mod n) is 1 mod n and 0 mod m.
    Residue r0 = mod(m, n), r1 = n, s0 = 1, s1 = 0;
    while (r1 != 0) {
        const Residue q = r0 / r1;
        r0 = std::exchange(r1, r0 - q * r1);
        s0 = std::exchange(s1, s0 - q * s1);
    }
    const Residue inv = mod(s0, n);
    const Residue mn = m * n;
    const Residue lift = mod(b - a, n) * inv % n;
    return mod(a + m * lift, mn);
}

}  // namespace cdforge
