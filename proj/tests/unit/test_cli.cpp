#include "helpers.hpp"

#include "cli.hpp"

#include "thermoreg/csv.hpp"
#include <json.hpp>
#include "thermoreg/synthetic.hpp"

#include <doctest.h>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace {

int run_cli(std::initializer_list<std::string> args)
{
    std::vector<std::string> store{"thermoreg"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : store) {
        argv.push_back(s.data());
    }
    return thermo::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct SyntheticData {
    testing::TempDir dir{"cli"};
    std::filesystem::path csv;
    SyntheticData()
    {
        thermo::SyntheticOptions opt;
        opt.rows = 200;
        csv = dir.path / "FLIR_groups1and2.csv";
        std::ofstream out(csv);
        thermo::write_csv(out, thermo::make_synthetic_flir(opt));
    }
};

} // namespace

TEST_CASE("cli: usage errors exit 2, help exits 0")
{
    CHECK(run_cli({"no-such-command"}) == 2);
    CHECK(run_cli({"fit", "--bogus"}) == 2);
    CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("cli: missing dataset is a config error")
{
    testing::TempDir dir("cli_missing");
    CHECK(run_cli({"ingest", "--data", (dir.path / "absent.csv").string(), "--out", dir.path.string()}) != 0);
    CHECK(run_cli({"fit", "--data", dir.path.string(), "--model", "lasso", "--out", dir.path.string()}) != 0);
}

TEST_CASE("cli: unknown model and bad hyperparameters exit 2")
{
    SyntheticData data;
    const auto out = (data.dir.path / "o").string();
    CHECK(run_cli({"fit", "--data", data.csv.string(), "--model", "lasso", "--out", out}) == 2);
    CHECK(run_cli({"fit", "--data", data.csv.string(), "--model", "knn", "--hp", "n_neighbors=0", "--out", out}) ==
          2);
}

TEST_CASE("cli: ingest, fit and evaluate run on synthetic data deterministically")
{
    SyntheticData data;
    const auto a = data.dir.path / "a";
    const auto b = data.dir.path / "b";
    for (const auto& out : {a, b}) {
        REQUIRE(run_cli({"ingest", "--data", data.csv.string(), "--out", out.string(), "--seed", "3"}) == 0);
        REQUIRE(run_cli({"fit", "--data", data.csv.string(), "--model", "knn", "--hp", "n_neighbors=5", "--out",
                         out.string(), "--seed", "3"}) == 0);
        REQUIRE(run_cli({"evaluate", "--data", data.csv.string(), "--artifact", (out / "model.json").string(),
                         "--out", out.string(), "--seed", "3", "--format", "csv"}) == 0);
    }
    for (const auto* name : {"train.csv", "test.csv", "model.json", "evaluate.csv"}) {
        CAPTURE(name);
        CHECK(std::filesystem::exists(a / name));
        CHECK(slurp(a / name) == slurp(b / name));
    }
}

TEST_CASE("cli: table-iv on synthetic data with two seeds")
{
    SyntheticData data;
    const auto out = data.dir.path / "t4";
    REQUIRE(run_cli({"table-iv", "--data", data.csv.string(), "--seeds", "0,1", "--out", out.string()}) == 0);
    const auto j = nlohmann::json::parse(slurp(out / "table_iv.json"));
    CHECK(j["rows"].size() == 6);
    CHECK(j["provenance"]["seeds"].size() == 2);
}
