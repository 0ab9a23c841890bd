#include <cmath>
#include <gtest/gtest.h>
#include <limits>
#include <set>

#include "mdepose/util/bytes.h"
#include "mdepose/util/error.h"
#include "mdepose/util/random.h"
#include "test_support.h"

using namespace mdepose;

TEST(Random, SplitMixReferenceOutputs) {
    // Reference outputs of SplitMix64 seeded with 1234567.
    SplitMix64 g(1234567);
    EXPECT_EQ(g.next(), 6457827717110365317ULL);
    EXPECT_EQ(g.next(), 3203168211198807973ULL);
    EXPECT_EQ(g.next(), 9817491932198370423ULL);
}

TEST(Random, Mix64IsSplitMixOutputFunction) {
    for (std::uint64_t s : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
        SplitMix64 g(s);
        EXPECT_EQ(g.next(), mix64(s + 0x9e3779b97f4a7c15ULL));
    }
}

TEST(Random, Fnv1aReferenceVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Random, XoshiroReference) {
    // Straight transcription of the reference xoshiro256** step.
    auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    std::uint64_t s[4];
    SplitMix64 sm(99);
    for (auto &v : s)
        v = sm.next();
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t expected = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        ASSERT_EQ(rng.next_u64(), expected) << i;
    }
}

TEST(Random, SameSeedSameStream) {
    Rng a(7), b(7), c(8);
    bool differs = false;
    for (int i = 0; i < 50; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        differs |= va != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Random, UniformIndexInRangeAndCoversAll) {
    Rng rng(3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto k = rng.uniform_index(7);
        ASSERT_LT(k, 7u);
        seen.insert(k);
    }
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_EQ(rng.uniform_index(1), 0u);
}

TEST(Random, UniformMoments) {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum2 += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
    EXPECT_NEAR(sum2 / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(Random, NormalMoments) {
    Rng rng(12);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sum2 / n, 1.0, 0.02);
}

TEST(Error, MessageCarriesCodeName) {
    const Error e(ErrorCode::kNoValidPairs, "scene x");
    EXPECT_EQ(e.code(), ErrorCode::kNoValidPairs);
    EXPECT_NE(std::string(e.what()).find("scene x"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(error_code_name(ErrorCode::kNoValidPairs)), std::string::npos);
}

TEST(Error, FormatErrorPositions) {
    const FormatError a("f.bin", FormatError::ByteOffset{17}, "short");
    EXPECT_EQ(a.byte_offset(), 17u);
    EXPECT_FALSE(a.line().has_value());
    const FormatError b("f.txt", FormatError::LineNumber{3}, "bad");
    EXPECT_EQ(b.line(), 3u);
    EXPECT_EQ(b.code(), ErrorCode::kFormatError);
}

TEST(Result, ValueAndError) {
    Result<int> ok(5);
    EXPECT_TRUE(ok.ok());
    EXPECT_EQ(*ok, 5);
    Result<int> bad(ErrorCode::kDegenerate, "x");
    EXPECT_FALSE(bad);
    EXPECT_EQ(bad.code(), ErrorCode::kDegenerate);
    EXPECT_THROW(bad.value(), Error);
}

TEST(Bytes, WriterReaderRoundTrip) {
    ByteWriter w;
    w.write<std::uint8_t>(0xab);
    w.write<std::uint16_t>(0x1234);
    w.write<std::int32_t>(-5);
    w.write<std::uint64_t>(0x0102030405060708ULL);
    w.write<float>(1.5f);
    w.write<double>(-2.25);
    w.write_bytes(std::string("name\0", 5));
    EXPECT_EQ(static_cast<unsigned char>(w.data()[1]), 0x34u); // little-endian

    ByteReader r(w.data(), "mem");
    EXPECT_EQ(r.read<std::uint8_t>(), 0xab);
    EXPECT_EQ(r.read<std::uint16_t>(), 0x1234);
    EXPECT_EQ(r.read<std::int32_t>(), -5);
    EXPECT_EQ(r.read<std::uint64_t>(), 0x0102030405060708ULL);
    EXPECT_EQ(r.read<float>(), 1.5f);
    EXPECT_EQ(r.read<double>(), -2.25);
    EXPECT_EQ(r.read_cstring(), "name");
    EXPECT_TRUE(r.at_end());
}

TEST(Bytes, TruncationReportsOffset) {
    ByteWriter w;
    w.write<std::uint32_t>(1);
    w.write<std::uint16_t>(2);
    ByteReader r(w.data(), "mem");
    r.read<std::uint32_t>();
    try {
        r.read<std::uint64_t>();
        FAIL();
    } catch (const FormatError &e) {
        ASSERT_TRUE(e.byte_offset().has_value());
        EXPECT_EQ(*e.byte_offset(), 6u);
    }
}

TEST(Bytes, FormatDoubleRoundTrips) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(gen) / (1 + i);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Bytes, FileRoundTripCreatesParents) {
    test::TempDir dir;
    const auto path = dir / "a/b/c.bin";
    const std::string payload("x\0y", 3);
    write_file(path, payload);
    EXPECT_EQ(read_file(path), payload);
    EXPECT_THROW(read_file(dir / "missing"), Error);
}
