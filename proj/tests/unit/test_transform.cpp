#include "helpers.hpp"

#include "thermoreg/transform.hpp"

#include <doctest.h>

#include <cmath>

using namespace thermo;

TEST_CASE("standardizer: hand-computed moments")
{
    Matrix x(3, 1);
    x << 1, 2, 3;
    const FeatureMatrix m(x, {"v"});
    const auto s = fit_standardizer(m);
    CHECK(s.means(0) == doctest::Approx(2.0));
    CHECK(s.stds(0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(s.stds(0) == doctest::Approx(0.8165).epsilon(1e-4));
    Matrix q(1, 1);
    q << 4;
    const auto out = apply_standardizer(s, FeatureMatrix(q, {"v"}));
    CHECK(out.values(0, 0) == doctest::Approx(2.0 / std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(out.values(0, 0) == doctest::Approx(2.449).epsilon(1e-3));
}

TEST_CASE("standardizer: zero variance names the column")
{
    Matrix x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    try {
        fit_standardizer(FeatureMatrix(x, {"ok", "flat"}));
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("zero variance") != std::string::npos);
        CHECK(std::string(e.what()).find("flat") != std::string::npos);
    }
}

TEST_CASE("standardizer: fixed point, mean row, and round trip")
{
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 5 + static_cast<Index>(rng.uniform_index(40));
        const Index d = 1 + static_cast<Index>(rng.uniform_index(6));
        Matrix x = testing::random_matrix(n, d, rng, 3.0);
        x.array() += 20.0;
        const FeatureMatrix m(x, testing::numbered("f", d));
        const auto s = fit_standardizer(m);
        const auto z = apply_standardizer(s, m);
        for (Index j = 0; j < d; ++j) {
            const double mean = z.values.col(j).mean();
            const double sd = std::sqrt((z.values.col(j).array() - mean).square().mean());
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(sd - 1.0) < 1e-9);
        }
        const auto again = fit_standardizer(z);
        CHECK((again.means.array().abs() < 1e-9).all());
        CHECK(((again.stds.array() - 1.0).abs() < 1e-9).all());
        const auto back = invert_standardizer(s, z);
        CHECK(((back.values - x).array().abs() / x.array().abs()).maxCoeff() <= 1e-12);
        const FeatureMatrix mean_row(s.means.transpose(), m.names);
        CHECK(apply_standardizer(s, mean_row).values.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("standardizer: unknown column on apply")
{
    Matrix x(3, 1);
    x << 1, 2, 3;
    const auto s = fit_standardizer(FeatureMatrix(x, {"a"}));
    CHECK_THROWS_AS(apply_standardizer(s, FeatureMatrix(x, {"b"})), DataError);
}

TEST_CASE("ordinal encoding")
{
    const auto v = encode_ordinal({"18-20", ">70", "26-30"}, default_age_map(), "Age");
    CHECK(v(0) == 0);
    CHECK(v(1) == 7);
    CHECK(v(2) == 2);
    const auto same = encode_ordinal({"26-30", "26-30"}, default_age_map(), "Age");
    CHECK((same.array() == 2).all());
    try {
        encode_ordinal({"18-20", "17-18"}, default_age_map(), "Age");
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("17-18") != std::string::npos);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("one-hot encoding")
{
    const auto g = encode_onehot("Gender", {"Female", "Male", "Female"});
    REQUIRE(g.names == std::vector<std::string>{"Gender_Female", "Gender_Male"});
    CHECK(g.values.col(0) == Vector((Vector(3) << 1, 0, 1).finished()));
    CHECK(g.values.col(1) == Vector((Vector(3) << 0, 1, 0).finished()));
    const auto one = encode_onehot("C", {"x", "x"});
    CHECK(one.cols() == 1);
    CHECK((one.values.array() == 1).all());
    const auto e = encode_onehot("Ethnicity", {"White", "Asian", "Black", "Asian", "White"});
    CHECK(e.cols() == 3);
    CHECK(e.names.front() == "Ethnicity_Asian");
    CHECK((e.values.rowwise().sum().array() == 1).all());
    CHECK_THROWS(encode_onehot("E", {}));
}

TEST_CASE("one-hot rows sum to one for random columns")
{
    Rng rng(5);
    const std::vector<std::string> cats{"a", "b", "c", "d", "e"};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::string> labels;
        const auto n = 1 + rng.uniform_index(30);
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(cats[rng.uniform_index(1 + rng.uniform_index(cats.size()))]);
        }
        const auto m = encode_onehot("v", labels);
        CHECK((m.values.rowwise().sum().array() == 1.0).all());
    }
}

TEST_CASE("one-hot: unseen category at apply gives zeros with a warning")
{
    testing::WarningCapture w;
    const auto map = fit_onehot("Gender", {"Female", "Male"});
    const auto m = encode_onehot(map, {"Other"});
    CHECK(m.values.sum() == 0.0);
    CHECK(w.contains("Other"));
}

TEST_CASE("polynomial terms")
{
    Matrix x(2, 2);
    x << 0, 0, 2, 3;
    const auto out = add_polynomial(FeatureMatrix(x, {"x", "y"}), "x", "y");
    REQUIRE(out.cols() == 5);
    CHECK(out.names[2] == square_name("x"));
    CHECK(out.names[3] == square_name("y"));
    CHECK(out.names[4] == interaction_name("x", "y"));
    CHECK(out.values.row(0).tail(3).isZero());
    CHECK(out.values(1, 2) == 4);
    CHECK(out.values(1, 3) == 9);
    CHECK(out.values(1, 4) == 6);
    CHECK_THROWS_AS(add_polynomial(FeatureMatrix(x, {"x", "y"}), "x", "zz"), DataError);
}

TEST_CASE("polynomial terms commute with row permutation")
{
    Rng rng(9);
    const Matrix x = testing::random_matrix(12, 3, rng);
    const FeatureMatrix m(x, {"a", "b", "c"});
    std::vector<std::size_t> perm = iota_indices(12);
    rng.shuffle(perm);
    const auto left = add_polynomial(m, "a", "c").take_rows(perm);
    const auto right = add_polynomial(m.take_rows(perm), "a", "c");
    CHECK(left.values == right.values);
}

TEST_CASE("replication")
{
    Matrix x(2, 2);
    x << 1, 2, 3, 4;
    const FeatureMatrix m(x, {"a", "b"});
    const auto same = replicate_feature(m, "a", 0);
    CHECK(same.values == m.values);
    CHECK(same.names == m.names);
    const auto rep = replicate_feature(m, "a", 3);
    REQUIRE(rep.cols() == 5);
    CHECK(rep.names[2] == "a_rep1");
    CHECK(rep.names[4] == "a_rep3");
    CHECK(rep.values.col(4) == m.values.col(0));
    CHECK_THROWS_AS(replicate_feature(m, "zz", 1), DataError);
}
