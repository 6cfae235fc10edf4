#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "qc/chabauty.hpp"
#include "qc/coleman.hpp"
#include "qc/curve.hpp"
#include "qc/rigidcoh.hpp"

using namespace qc;
namespace fs = std::filesystem;

namespace {

constexpr long kP = 7;
constexpr int kN = 8;  // enough digits for format tests, keeps them fast

const WeierstrassCurve& e37() {
    static WeierstrassCurve E = WeierstrassCurve::parse("0,0,1,-1,0");
    return E;
}

fs::path fresh_cache(const char* tag) {
    fs::path dir = fs::temp_directory_path() / (std::string("qc-fmt-") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("frobenius data serializes losslessly") {
    FrobeniusData fd = frobenius_lift(e37(), kP, kN);
    std::string text = serialize_frobenius(fd);
    FrobeniusData back = deserialize_frobenius(text);
    CHECK(back.p == fd.p);
    CHECK(back.N == fd.N);
    CHECK(back.prec == fd.prec);
    CHECK(back.ap == fd.ap);
    CHECK(back.loss == fd.loss);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(back.M[i][j].str() == fd.M[i][j].str());
        }
    CHECK(back.g[0].size() == fd.g[0].size());
    CHECK(back.g[1].size() == fd.g[1].size());
    // a second round trip reproduces the exact text
    CHECK(serialize_frobenius(back) == text);
}

TEST_CASE("frobenius cache: warm read gives the identical object") {
    fs::path dir = fresh_cache("frob");
    FrobeniusData cold = frobenius_lift(e37(), kP, kN, dir.string());
    fs::path file = dir / frobenius_cache_key(e37(), kP, kN);
    REQUIRE(fs::exists(file));
    FrobeniusData warm = frobenius_lift(e37(), kP, kN, dir.string());
    CHECK(serialize_frobenius(warm) == serialize_frobenius(cold));
    fs::remove_all(dir);
}

TEST_CASE("sweep report JSON round-trips and carries the schema tag") {
    fs::path dir = fresh_cache("sweep");
    ColemanSystem cs(e37(), kP, kN, dir.string());
    SweepReport rep = sweep(cs, RatPoint::affine(0, 0), 100, 2);

    std::string text = rep.to_json();
    nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["schema"] == "qc-sweep-1");
    CHECK(j["p"] == kP);
    CHECK(j["N"] == kN);
    CHECK(j["curve"] == "[0,0,1,-1,0]");
    CHECK(j["search_bound"] == 100);
    CHECK(j["conclusive"].is_boolean());
    CHECK(j["total_roots"].get<int>() == rep.total_roots);
    CHECK(j["disks"].size() == rep.disks.size());
    CHECK(j["integral_points"].size() == rep.integral_points.size());
    for (size_t i = 0; i < rep.disks.size(); ++i) {
        CHECK(j["disks"][i]["xbar"] == rep.disks[i].disk.xbar);
        CHECK(j["disks"][i]["roots"].size() == rep.disks[i].roots.size());
    }

    // lossless: parse . dump is the identity on the serialized form
    CHECK(nlohmann::json::parse(text).dump(1) == text);
    // the timing field is the only nondeterministic part
    nlohmann::json jd = nlohmann::json::parse(rep.to_json(false));
    CHECK(!jd.contains("seconds"));
    jd["seconds"] = rep.seconds;
    CHECK(jd == j);

    // cache determinism: a second system from the warm cache reproduces the
    // report bit for bit
    ColemanSystem warm(e37(), kP, kN, dir.string());
    SweepReport rep2 = sweep(warm, RatPoint::affine(0, 0), 100, 2);
    CHECK(rep2.to_json(false) == rep.to_json(false));
    CHECK(rep2.to_table() == rep.to_table());
    fs::remove_all(dir);
}

TEST_CASE("corrupt cache entries are rejected, not trusted") {
    fs::path dir = fresh_cache("corrupt");
    frobenius_lift(e37(), kP, kN, dir.string());
    fs::path file = dir / frobenius_cache_key(e37(), kP, kN);
    REQUIRE(fs::exists(file));
    std::ofstream(file) << "{ not json";
    // a recompute-or-throw is acceptable; silently using garbage is not
    try {
        FrobeniusData fd = frobenius_lift(e37(), kP, kN, dir.string());
        CHECK(fd.ap == trace_of_frobenius(e37(), kP));
    } catch (const std::exception&) {
        CHECK(true);
    }
    fs::remove_all(dir);
}

TEST_CASE("cache key separates curve, prime and precision") {
    std::string base = frobenius_cache_key(e37(), kP, kN);
    CHECK(base != frobenius_cache_key(e37(), 5, kN));
    CHECK(base != frobenius_cache_key(e37(), kP, kN + 1));
    WeierstrassCurve other = WeierstrassCurve::parse("0,0,0,0,1");
    CHECK(base != frobenius_cache_key(other, kP, kN));
}
