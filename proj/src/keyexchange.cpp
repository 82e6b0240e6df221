#include "phykeylab/keyexchange.hpp"

#include <stdexcept>
#include <vector>

namespace phykeylab::keyexchange {

namespace {

// a*b mod m without overflow for 64-bit operands.
std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t acc = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1u) acc = mulmod_u64(acc, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return acc;
}

// Fixed-window modular exponentiation: u64 fast path when everything fits a
// machine word (the common case for the sizes exercised here), GMP otherwise.
BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
    if (mpz_fits_ulong_p(mod.get_mpz_t()) && mpz_fits_ulong_p(exp.get_mpz_t())) {
        BigInt base_r = base % mod;
        if (base_r < 0) base_r += mod;
        return BigInt(powmod_u64(mpz_get_ui(base_r.get_mpz_t()), mpz_get_ui(exp.get_mpz_t()),
                                 mpz_get_ui(mod.get_mpz_t())));
    }
    BigInt r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

// true iff base a witnesses n composite; n odd, n-1 = d * 2^r.
bool mr_witness(const BigInt& n, unsigned long a, const BigInt& d, unsigned long r) {
    BigInt x = powm(BigInt(a), d, n);
    if (x == 1 || x == n - 1) return false;
    for (unsigned long i = 1; i < r; ++i) {
        x = x * x % n;
        if (x == n - 1) return false;
    }
    return true;
}

constexpr unsigned long kSmallBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

constexpr unsigned long kWideBases[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,  31,
                                        37, 41, 43, 47, 53, 59, 61, 67, 71, 73,  79,
                                        83, 89, 97, 101, 103, 107, 109, 113, 127};

}  // namespace

bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    for (unsigned long p : kSmallBases) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    BigInt d = n - 1;
    unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), r);

    static const BigInt kDeterministicBound("3317044064679887385961981");
    if (n < kDeterministicBound) {
        for (unsigned long a : kSmallBases)
            if (mr_witness(n, a, d, r)) return false;
        return true;
    }
    for (unsigned long a : kWideBases)
        if (mr_witness(n, a, d, r)) return false;
    return true;
}

PublicParams make_params(const BigInt& modulus_n, const BigInt& generator_g) {
    if (modulus_n < 2) throw std::invalid_argument("modulus must be >= 2");
    if (generator_g < 1 || generator_g >= modulus_n)
        throw std::invalid_argument("generator must satisfy 1 <= g < n");
    PublicParams p;
    p.modulus_n = modulus_n;
    p.generator_g = generator_g;
    p.prime_checked = is_prime(modulus_n);
    return p;
}

KeyShare public_share(const PublicParams& params, const SecretExponent& secret) {
    if (secret.value < 0) throw std::invalid_argument("secret exponent must be >= 0");
    return {powm(params.generator_g, secret.value, params.modulus_n)};
}

SharedKey shared_key(const PublicParams& params, const KeyShare& other_share,
                     const SecretExponent& own_secret) {
    if (own_secret.value < 0) throw std::invalid_argument("secret exponent must be >= 0");
    if (other_share.value < 0 || other_share.value >= params.modulus_n)
        throw std::invalid_argument("share out of range for modulus");
    return {powm(other_share.value, own_secret.value, params.modulus_n)};
}

bool verify_common(const SharedKey& cmk_local, const BigInt& cmk_entered) {
    return cmk_local.value == cmk_entered;
}

VerificationToken issue_token(const BigInt& k2, const SharedKey& cmk2) {
    if (k2 < 1) throw std::invalid_argument("k2 must be >= 1");
    if (cmk2.value < 1) throw std::invalid_argument("cmk2 must be >= 1");
    return {k2 * cmk2.value, k2};
}

bool verify_encryption_key(const BigInt& k2_entered, const VerificationToken& token,
                           const SharedKey& cmk2) {
    if (cmk2.value < 1) throw std::invalid_argument("cmk2 must be >= 1");
    if (!mpz_divisible_p(token.c1.get_mpz_t(), cmk2.value.get_mpz_t())) return false;
    return token.c1 / cmk2.value == k2_entered;
}

SecretExponent draw_secret(RngStream& rng, unsigned bits) {
    if (bits == 0) throw std::invalid_argument("secret width must be >= 1 bit");
    BigInt v = 0;
    unsigned words = (bits + 63) / 64;
    for (unsigned i = 0; i < words; ++i) {
        v <<= 64;
        std::uint64_t word = rng.next_u64();
        BigInt w;
        mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
        v |= w;
    }
    mpz_fdiv_r_2exp(v.get_mpz_t(), v.get_mpz_t(), bits);
    return {v};
}

}  // namespace phykeylab::keyexchange
