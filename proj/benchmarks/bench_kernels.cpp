// Serial reference vs OpenMP kernels on representative workloads. The serial
// variants are the ground truth the parallel ones are tested against; this
// target shows what the parallelism buys at each problem size.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "phykeylab/blockcipher.hpp"
#include "phykeylab/channelsim.hpp"
#include "phykeylab/phykeygen.hpp"
#include "phykeylab/rng.hpp"

namespace bc = phykeylab::blockcipher;
namespace cs = phykeylab::channelsim;
namespace pk = phykeylab::phykeygen;
using phykeylab::RngStream;

namespace {

bc::BlockSet random_blocks(std::size_t side) {
    RngStream rng({99, 0});
    std::vector<std::int64_t> v(side * side);
    for (auto& x : v) x = static_cast<std::int64_t>(rng.next_u64() % 256);
    return bc::to_block_matrix(bc::make_message_matrix(side, side, v));
}

}  // namespace

static void BM_encrypt_serial(benchmark::State& state) {
    auto blocks = random_blocks(static_cast<std::size_t>(state.range(0)));
    auto key = bc::key_matrix(21428);
    for (auto _ : state) {
        auto out = bc::encrypt_blocks_serial(blocks, key);
        benchmark::DoNotOptimize(out.blocks.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(blocks.blocks.size()));
}
BENCHMARK(BM_encrypt_serial)->Arg(128)->Arg(512)->Arg(2048);

static void BM_encrypt_parallel(benchmark::State& state) {
    auto blocks = random_blocks(static_cast<std::size_t>(state.range(0)));
    auto key = bc::key_matrix(21428);
    for (auto _ : state) {
        auto out = bc::encrypt_blocks(blocks, key);
        benchmark::DoNotOptimize(out.blocks.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(blocks.blocks.size()));
}
BENCHMARK(BM_encrypt_parallel)->Arg(128)->Arg(512)->Arg(2048);

static void BM_decrypt_serial(benchmark::State& state) {
    auto key = bc::key_matrix(21428);
    auto cipher = bc::encrypt_blocks(random_blocks(static_cast<std::size_t>(state.range(0))), key);
    for (auto _ : state) {
        auto out = bc::decrypt_blocks_serial(cipher, key);
        benchmark::DoNotOptimize(out.blocks.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cipher.blocks.size()));
}
BENCHMARK(BM_decrypt_serial)->Arg(512);

static void BM_decrypt_parallel(benchmark::State& state) {
    auto key = bc::key_matrix(21428);
    auto cipher = bc::encrypt_blocks(random_blocks(static_cast<std::size_t>(state.range(0))), key);
    for (auto _ : state) {
        auto out = bc::decrypt_blocks(cipher, key);
        benchmark::DoNotOptimize(out.blocks.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cipher.blocks.size()));
}
BENCHMARK(BM_decrypt_parallel)->Arg(512);

static void BM_ber_curve_serial(benchmark::State& state) {
    std::vector<double> grid{0.0, 4.0, 8.0};
    auto bits = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto pts = cs::ber_curve_serial(bits, grid, 2, {42, 0});
        benchmark::DoNotOptimize(pts.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bits * grid.size()));
}
BENCHMARK(BM_ber_curve_serial)->Arg(100000);

static void BM_ber_curve_parallel(benchmark::State& state) {
    std::vector<double> grid{0.0, 4.0, 8.0};
    auto bits = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto pts = cs::ber_curve(bits, grid, 2, {42, 0});
        benchmark::DoNotOptimize(pts.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bits * grid.size()));
}
BENCHMARK(BM_ber_curve_parallel)->Arg(100000);

static void BM_compare_schemes_serial(benchmark::State& state) {
    std::vector<double> snrs{0.0, 30.0};
    pk::QuantizerConfig cfg;
    for (auto _ : state) {
        auto grid = pk::compare_schemes_serial(2000, snrs, cfg, cfg,
                                               static_cast<std::size_t>(state.range(0)), 10,
                                               {42, 0});
        benchmark::DoNotOptimize(grid.data());
    }
}
BENCHMARK(BM_compare_schemes_serial)->Arg(8);

static void BM_compare_schemes_parallel(benchmark::State& state) {
    std::vector<double> snrs{0.0, 30.0};
    pk::QuantizerConfig cfg;
    for (auto _ : state) {
        auto grid = pk::compare_schemes(2000, snrs, cfg, cfg,
                                        static_cast<std::size_t>(state.range(0)), 10, {42, 0});
        benchmark::DoNotOptimize(grid.data());
    }
}
BENCHMARK(BM_compare_schemes_parallel)->Arg(8);

BENCHMARK_MAIN();
