#include <doctest.h>

#include <pcvx/report.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace pcvx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/pcvx_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("sweep CSV round-trips values and blanks the NaN cells") {
    TempFile tmp("sweep.csv");
    std::vector<SweepRow> rows(2);
    rows[0].delta = 0.1;
    rows[0].value = 12.345678901234567;
    rows[0].lower = 0.5;
    rows[0].upper = 2.0;
    rows[0].method = "oracle";
    rows[0].condition = 1.0;
    rows[1].delta = 0.01;
    rows[1].value = 3.25;
    rows[1].method = "gram";
    // lower/upper/condition stay NaN -> empty cells
    write_sweep_csv(tmp.path, rows);

    const std::string text = slurp(tmp.path);
    std::istringstream lines(text);
    std::string header, line1, line2;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, line1));
    REQUIRE(std::getline(lines, line2));
    CHECK(header == "delta,value,lower,upper,method,condition");
    CHECK(line2 == "0.01,3.25,,,gram,");

    // full precision: parsing the written value restores the double exactly
    const std::string val = line1.substr(line1.find(',') + 1,
                                         line1.find(',', line1.find(',') + 1) -
                                             line1.find(',') - 1);
    CHECK(std::stod(val) == 12.345678901234567);

    CHECK_THROWS_AS(write_sweep_csv("/nonexistent_dir/x.csv", rows), ArgumentError);
}

TEST_CASE("configuration hashes are canonical and stable") {
    // frozen FNV-1a reference values
    CHECK(config_hash(nlohmann::json::object()) == "08f44b07b5901a25");
    CHECK(config_hash(nlohmann::json{{"degree", 12}}) == "cd4063ddfbf96bf6");

    // key order independence through canonical dumps
    nlohmann::json a;
    a["x"] = 1;
    a["y"] = 2;
    nlohmann::json b;
    b["y"] = 2;
    b["x"] = 1;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) != config_hash(nlohmann::json{{"x", 1}}));
}

TEST_CASE("JSON reports are stamped with their configuration") {
    TempFile tmp("report.json");
    nlohmann::json report;
    report["kind"] = "test";
    report["slope"] = -3.0;
    nlohmann::json config;
    config["degree"] = 12;
    write_json_report(tmp.path, report, config);

    nlohmann::json loaded = nlohmann::json::parse(slurp(tmp.path));
    CHECK(loaded.at("kind") == "test");
    CHECK(loaded.at("slope").get<double>() == -3.0);
    CHECK(loaded.at("config").at("degree").get<int>() == 12);
    CHECK(loaded.at("config_hash") == config_hash(config));
}

TEST_CASE("plot data writes paired columns only") {
    TempFile tmp("plot.dat");
    write_plot_data(tmp.path, {1.0, 2.0, 3.0}, {10.0, 20.0, 30.0});
    std::istringstream lines(slurp(tmp.path));
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        double x = 0.0, y = 0.0;
        REQUIRE((fields >> x >> y));
        CHECK(y == doctest::Approx(10.0 * x));
        ++count;
    }
    CHECK(count == 3);

    CHECK_THROWS_AS(write_plot_data(tmp.path, {1.0, 2.0}, {1.0}), ArgumentError);
}
