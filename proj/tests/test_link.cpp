#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "drm/link.hpp"
#include "test_util.hpp"

using namespace drm;
using namespace drm::testing;

namespace {

struct Setup {
    PermutationSubset subset;
    PskConstellation psk;
    std::vector<BlockMatrices> words;

    Setup(unsigned K, unsigned M, PermutationPreset preset = PermutationPreset::lexicographic)
        : subset(build_permutation_subset(K, preset)), psk(M), words(enumerate_codewords(subset, psk)) {}
};

double oracle_frobenius_metric(const ComplexMatrix& Yt, const ComplexMatrix& Yp, const ComplexMatrix& X) {
    return oracle_norm_sq(Yt - oracle_matmul(Yp, X));
}

}  // namespace

TEST_CASE("differential_encode") {
    const Setup s(2, 4);
    std::mt19937_64 rng(41);
    const auto& X1 = s.words[rng() % s.words.size()];
    const auto V1 = differential_encode(DifferentialState::initial(2), X1);
    CHECK(V1.V == X1.X);
    CHECK(V1.t == 1);

    DifferentialState st = DifferentialState::initial(2);
    for (int t = 0; t < 10; ++t) st = differential_encode(st, s.words[0]);
    CHECK(st.V == ComplexMatrix::identity(2));

    const BlockMatrices bad{PermutationMatrix::identity(2), {1.0, 1.0}, ComplexMatrix{{1, 1}, {0, 1}}};
    CHECK_THROWS_AS(differential_encode(DifferentialState::initial(2), bad), std::invalid_argument);
    CHECK_THROWS_AS(differential_encode(DifferentialState::initial(3), X1), std::invalid_argument);
}

TEST_CASE("property: differential chain equals explicit product and stays closed") {
    for (unsigned K : {2u, 3u}) {
        for (unsigned M : {2u, 4u}) {
            const Setup s(K, M);
            std::mt19937_64 rng(42 + K * 10 + M);
            DifferentialState st = DifferentialState::initial(K);
            ComplexMatrix oracle = ComplexMatrix::identity(K);
            for (int t = 0; t < 100; ++t) {
                const auto& X = s.words[rng() % s.words.size()];
                st = differential_encode(st, X);
                oracle = oracle_matmul(oracle, X.X);
                CHECK(max_abs_diff(st.V, oracle) < 1e-10);
                CHECK(is_unit_monomial(st.V, 1e-10));
                // Every nonzero remains an M-PSK point.
                for (const auto& sig : slot_signals(st)) CHECK(s.psk.label_of(sig.symbol, 1e-10).has_value());
            }
        }
    }
}

TEST_CASE("slot_signals") {
    const auto id = slot_signals(ComplexMatrix::identity(2));
    REQUIRE(id.size() == 2);
    CHECK(id[0].pattern == 0);
    CHECK(id[0].symbol == Complex(1, 0));
    CHECK(id[1].pattern == 1);

    const ComplexMatrix V{{0, -1}, {1, 0}};
    const auto sig = slot_signals(V);
    CHECK(sig[0].pattern == 1);
    CHECK(sig[0].symbol == Complex(1, 0));
    CHECK(sig[1].pattern == 0);
    CHECK(sig[1].symbol == Complex(-1, 0));

    ComplexMatrix rebuilt(2, 2);
    for (std::size_t k = 0; k < sig.size(); ++k) rebuilt(sig[k].pattern, k) = sig[k].symbol;
    CHECK(rebuilt == V);

    CHECK_THROWS_AS(slot_signals(ComplexMatrix{{1, 0}, {0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(slot_signals(ComplexMatrix{{1, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("transmit_block") {
    std::mt19937_64 grng(43);
    Rng rng(43);
    const ComplexMatrix H = random_matrix(4, 3, grng);
    const Setup s(3, 4);
    const auto& X = s.words[17];
    CHECK(max_abs_diff(transmit_block(X.X, H, {0.0}, rng).Y, oracle_matmul(H, X.X)) < 1e-15);
    const auto Y = transmit_block(ComplexMatrix::identity(3), H, {0.0}, rng).Y;
    CHECK(Y == H);
    CHECK_THROWS_AS(transmit_block(ComplexMatrix::identity(2), H, {0.1}, rng), std::invalid_argument);
}

TEST_CASE("transmit_block noise variance") {
    Rng rng(44);
    const ComplexMatrix H(2, 2);
    const double sigma2 = 0.37;
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) acc += frobenius_norm_sq(transmit_block(ComplexMatrix::identity(2), H, {sigma2}, rng).Y);
    CHECK(std::abs(acc / (draws * 4.0) - sigma2) / sigma2 < 0.02);
}

TEST_CASE("drm_detect noiseless recovery") {
    for (unsigned K : {2u, 3u}) {
        for (unsigned M : {2u, 4u}) {
            const Setup s(K, M);
            Rng rng(45 + K + M);
            std::mt19937_64 grng(45 + K + M);
            int errors = 0;
            const int blocks = K == 3 && M == 4 ? 2000 : 10000;
            ComplexMatrix H = random_matrix(4, K, grng);
            DifferentialState st = DifferentialState::initial(K);
            ReceivedBlock prev = transmit_block(st.V, H, {0.0}, rng);
            for (int b = 0; b < blocks; ++b) {
                if (b % 100 == 0) {
                    H = random_matrix(4, K, grng);
                    st = DifferentialState::initial(K);
                    prev = transmit_block(st.V, H, {0.0}, rng);
                }
                const std::size_t w = rng() % s.words.size();
                st = differential_encode(st, s.words[w]);
                ReceivedBlock cur = transmit_block(st.V, H, {0.0}, rng);
                errors += drm_detect_index(cur, prev, s.words) != w;
                prev = std::move(cur);
            }
            CHECK(errors == 0);
        }
    }
}

TEST_CASE("drm_detect argmin and argmax forms agree") {
    std::mt19937_64 grng(46);
    for (unsigned K : {1u, 2u, 3u}) {
        for (unsigned M : {2u, 4u}) {
            const Setup s(K, M);
            for (int trial = 0; trial < 300; ++trial) {
                const ReceivedBlock a{random_matrix(3, K, grng)};
                const ReceivedBlock b{random_matrix(3, K, grng)};
                const std::size_t lib = drm_detect_index(a, b, s.words);
                CHECK(lib == drm_detect_frobenius_index(a, b, s.words));
                // Library index is also the explicit-oracle minimiser.
                double best = 1e300;
                std::size_t who = 0;
                for (std::size_t c = 0; c < s.words.size(); ++c) {
                    const double m = oracle_frobenius_metric(a.Y, b.Y, s.words[c].X);
                    if (m < best) {
                        best = m;
                        who = c;
                    }
                }
                CHECK(lib == who);
            }
        }
    }
}

TEST_CASE("drm_detect degenerate inputs") {
    const Setup s(2, 2);
    std::mt19937_64 grng(47);
    const ReceivedBlock cur{random_matrix(4, 2, grng)};
    const ReceivedBlock zero{ComplexMatrix(4, 2)};
    CHECK(drm_detect_index(cur, zero, s.words) == 0);
    CHECK_THROWS_AS(drm_detect(cur, zero, {}), std::invalid_argument);
}

TEST_CASE("property: detector metric identity for unitary codewords") {
    std::mt19937_64 grng(48);
    const Setup s(3, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix Yt = random_matrix(4, 3, grng);
        const ComplexMatrix Yp = random_matrix(4, 3, grng);
        const auto& X = s.words[grng() % s.words.size()].X;
        const double lhs = frobenius_norm_sq(Yt - matmul(Yp, X));
        const double rhs = frobenius_norm_sq(Yt) + frobenius_norm_sq(Yp) - 2.0 * trace_real_inner(Yt.adjoint(), matmul(Yp, X));
        CHECK(rel_diff(lhs, rhs) < 1e-9);
    }
}

TEST_CASE("property: common phase rotation does not change the decision") {
    std::mt19937_64 grng(49);
    std::uniform_real_distribution<double> ph(0.0, 2 * M_PI);
    const Setup s(2, 4);
    for (int trial = 0; trial < 300; ++trial) {
        const ReceivedBlock a{random_matrix(4, 2, grng)};
        const ReceivedBlock b{random_matrix(4, 2, grng)};
        const Complex rot = std::polar(1.0, ph(grng));
        CHECK(drm_detect_index(a, b, s.words) == drm_detect_index({rot * a.Y}, {rot * b.Y}, s.words));
    }
}

TEST_CASE("ndrm_detect") {
    const Setup s(2, 2);
    std::mt19937_64 grng(50);
    Rng rng(50);
    SUBCASE("noiseless with perfect CSI") {
        int errors = 0;
        for (int b = 0; b < 10000; ++b) {
            const ComplexMatrix H = random_matrix(4, 2, grng);
            const std::size_t w = rng() % s.words.size();
            const auto Y = transmit_block(s.words[w].X, H, {0.0}, rng);
            errors += ndrm_detect_index(Y, H, s.words) != w;
        }
        CHECK(errors == 0);
    }
    SUBCASE("zero channel estimate ties to candidate 0") {
        const ReceivedBlock Y{random_matrix(4, 2, grng)};
        const auto m = ndrm_metrics(Y, ComplexMatrix(4, 2), s.words);
        for (double v : m) CHECK(v == doctest::Approx(oracle_norm_sq(Y.Y)).epsilon(1e-12));
        CHECK(ndrm_detect_index(Y, ComplexMatrix(4, 2), s.words) == 0);
    }
    SUBCASE("metric table equals per-candidate recomputation") {
        for (int trial = 0; trial < 50; ++trial) {
            const ReceivedBlock Y{random_matrix(4, 2, grng)};
            const ComplexMatrix Hh = random_matrix(4, 2, grng);
            const auto m = ndrm_metrics(Y, Hh, s.words);
            REQUIRE(m.size() == 8);
            std::size_t best = 0;
            for (std::size_t c = 0; c < 8; ++c) {
                const double direct = oracle_norm_sq(Y.Y - oracle_matmul(Hh, s.words[c].X));
                CHECK(rel_diff(m[c], direct) < 1e-10);
                if (direct < oracle_norm_sq(Y.Y - oracle_matmul(Hh, s.words[best].X))) best = c;
            }
            CHECK(ndrm_detect_index(Y, Hh, s.words) == best);
        }
    }
    CHECK_THROWS_AS(ndrm_detect({ComplexMatrix(4, 2)}, ComplexMatrix(4, 2), {}), std::invalid_argument);
}

TEST_CASE("perturb_csi") {
    Rng rng(51);
    const ChannelRealization ch = draw_channel(4, 3, rng);
    const auto same = perturb_csi(ch, 0.0, 0.5, rng);
    CHECK(same.h1 == ch.h1);
    CHECK(same.H2 == ch.H2);
    CHECK(same.hd == ch.hd);
    CHECK_THROWS_AS(perturb_csi(ch, -0.1, 0.5, rng), std::invalid_argument);

    const double eta = 0.3, sigma2 = 0.2;
    double acc = 0.0;
    const int draws = 25000;  // 4 h1 entries each -> 1e5 samples
    for (int i = 0; i < draws; ++i) {
        const auto p = perturb_csi(ch, eta, sigma2, rng);
        for (std::size_t n = 0; n < 4; ++n) acc += std::norm(p.h1[n] - ch.h1[n]);
    }
    CHECK(std::abs(acc / (draws * 4.0) - eta * sigma2) / (eta * sigma2) < 0.02);

    // Direct-link error alone shifts every column of H equally.
    const auto pats = enumerate_patterns(4, 1, false).patterns;
    const std::vector<ReflectingPattern> sel{pats[1], pats[6], pats[11]};
    const ComplexMatrix H = build_equivalent_channel(ch, sel);
    ChannelRealization only_hd = ch;
    only_hd.hd = perturb_csi(ch, eta, sigma2, rng).hd;
    const ComplexMatrix D = build_equivalent_channel(only_hd, sel) - H;
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(std::abs(D(r, 0) - (only_hd.hd[r] - ch.hd[r])) < 1e-12);
        for (std::size_t k = 1; k < 3; ++k) CHECK(std::abs(D(r, k) - D(r, 0)) < 1e-12);
    }
}

TEST_CASE("detector scoring is identical across kernel variants") {
    const Setup s(3, 4);
    std::mt19937_64 grng(52);
    CorrelationDetector scalar(s.words, simd::scalar_kernels());
    const simd::Kernels* avx2 = simd::avx2_kernels();
    if (!avx2) return;
    CorrelationDetector vec(s.words, *avx2);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix a = random_matrix(4, 3, grng);
        const ComplexMatrix b = random_matrix(4, 3, grng);
        CHECK(scalar.argmax(a, b) == vec.argmax(a, b));
        for (std::size_t c = 0; c < s.words.size(); ++c) CHECK(std::abs(scalar.scores()[c] - vec.scores()[c]) < 1e-12);
    }
}
