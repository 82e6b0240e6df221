#pragma once

#include <gmpxx.h>

#include "phykeylab/rng.hpp"

namespace phykeylab::keyexchange {

using BigInt = mpz_class;

/// Group parameters (modulus n, generator g). The modulus is not required to
/// be prime; prime_checked records what the primality test said so callers
/// can surface it.
struct PublicParams {
    BigInt modulus_n;
    BigInt generator_g;
    bool prime_checked = false;
};

struct SecretExponent {
    BigInt value;
};

struct KeyShare {
    BigInt value;
};

struct SharedKey {
    BigInt value;
};

/// Published product c1 = k2 * cmk2 used by the encryption-key gate.
struct VerificationToken {
    BigInt c1;
    BigInt k2;
};

/// Deterministic Miller-Rabin. The first twelve prime bases decide
/// correctly for all n below 3.317e24; above that a wider fixed base set is
/// used (no known counterexample, and always correct on composites it flags).
bool is_prime(const BigInt& n);

/// Validates n >= 2 and 1 <= g < n, runs the primality check on n.
PublicParams make_params(const BigInt& modulus_n, const BigInt& generator_g);

/// g^secret mod n.
KeyShare public_share(const PublicParams& params, const SecretExponent& secret);

/// other_share^own_secret mod n. Both sides land on g^(ab) mod n.
SharedKey shared_key(const PublicParams& params, const KeyShare& other_share,
                     const SecretExponent& own_secret);

/// Common-key gate: exact integer equality of the locally derived shared key
/// and the entered one.
bool verify_common(const SharedKey& cmk_local, const BigInt& cmk_entered);

/// c1 = k2 * cmk2, requires k2 >= 1 and cmk2 >= 1.
VerificationToken issue_token(const BigInt& k2, const SharedKey& cmk2);

/// Encryption-key gate: c1 must be exactly divisible by cmk2 and the
/// quotient must equal the entered k2. No rounding anywhere.
bool verify_encryption_key(const BigInt& k2_entered, const VerificationToken& token,
                           const SharedKey& cmk2);

/// Uniform secret in [0, 2^bits), drawn from the stream 64 bits at a time.
SecretExponent draw_secret(RngStream& rng, unsigned bits);

}  // namespace phykeylab::keyexchange
