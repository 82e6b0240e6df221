#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phykeylab/keyexchange.hpp"

namespace phykeylab::pipeline {

struct PipelineOptions {
    std::filesystem::path input_path;
    std::filesystem::path cipher_path;
    std::filesystem::path output_path;
    std::filesystem::path report_path;  // empty: no report file written
    bool raw_input = false;             // treat input as bytes, not PGM

    keyexchange::BigInt modulus;
    keyexchange::BigInt generator;
    std::optional<keyexchange::BigInt> secret_a;  // drawn from seed if absent
    std::optional<keyexchange::BigInt> secret_b;
    unsigned secret_bits = 32;

    // Gate overrides: what each party types in. Defaults to the true values,
    // so overriding these is how key-mismatch behavior is exercised.
    std::optional<keyexchange::BigInt> cmk_entered;
    std::optional<keyexchange::BigInt> k2_entered;

    std::uint64_t seed = 42;
};

struct PipelineReport {
    keyexchange::BigInt n;
    keyexchange::BigInt g;
    bool prime_checked = false;
    keyexchange::BigInt share_a;
    keyexchange::BigInt share_b;
    keyexchange::BigInt shared_key;
    bool common_key_ok = false;
    bool encryption_key_ok = false;
    std::optional<keyexchange::BigInt> k2;
    std::optional<double> scalability;  // absent for all-zero plaintext
    std::uint64_t message_bits = 0;     // binarized input length
    std::uint64_t rle_runs = 0;         // run-length code size of the input bits
    std::string input_sha256;
    std::string output_sha256;
    bool roundtrip_ok = false;
    std::uint64_t seed = 42;
    std::vector<std::string> transcript;  // human-readable step log

    std::string to_json() const;  // stable key order, two-space indent
};

/// Full exchange-encrypt-decrypt run. Both key gates are evaluated before
/// any ciphertext is produced; on a gate failure the report (and report
/// file, if requested) still records everything up to the failure, but no
/// cipher or output files are written. File and parse problems throw.
PipelineReport run_pipeline(const PipelineOptions& opt);

}  // namespace phykeylab::pipeline
