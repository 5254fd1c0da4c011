#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "levydiv/error.hpp"
#include "levydiv/model_file.hpp"

using namespace levydiv;

namespace {

ModelSpec parse(const std::string& text) {
    std::istringstream is(text);
    return parse_model(is);
}

bool parse_fails(const std::string& text, const std::string& needle = "") {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.code() == ErrorCode::ParseError && std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

const std::string kProblem = "q = 0.05\nbeta = 1.5\ndelta = 1\n";

}  // namespace

TEST_CASE("explicit phase-type input with sections") {
    const auto spec = parse(
        "[process]\nc = 4\nsigma = 0\nkappa = 2\nalpha = 0.4, 0.6\nT = -2, 1; 0, -3\n[problem]\n" + kProblem);
    CHECK(spec.model.c == 4.0);
    CHECK(spec.model.kappa == 2.0);
    REQUIRE(spec.model.jumps.dim() == 2);
    CHECK(spec.model.jumps.subgen()(0, 1) == 1.0);
    CHECK(spec.model.jumps.subgen()(1, 1) == -3.0);
    CHECK(spec.model.jumps.alpha()(1) == 0.6);
    CHECK(spec.params.q == 0.05);
    CHECK(spec.params.beta == 1.5);
    CHECK(spec.params.delta == 1.0);
}

TEST_CASE("shorthand laws and optional sections") {
    const auto e = parse("c = 4\nkappa = 2\njumps = exp(2)\n" + kProblem);
    CHECK(e.model.sigma == 0.0);
    CHECK(e.model.jumps.dim() == 1);
    CHECK(e.model.jumps.transform_minus_one(2.0) == doctest::Approx(-0.5));
    const auto h = parse("c = 4\nkappa = 2\njumps = hyperexp(0.3:1, 0.7:5)\n" + kProblem);
    REQUIRE(h.model.jumps.dim() == 2);
    CHECK(h.model.jumps.mean() == doctest::Approx(0.3 + 0.7 / 5.0));
    const auto bm = parse("c = 2\nsigma = 0.2\n" + kProblem);
    CHECK(bm.model.kappa == 0.0);
    CHECK(bm.model.sigma == 0.2);
}

TEST_CASE("malformed input is a parse error naming the problem") {
    CHECK(parse_fails("c = 4\nfoo = 1\n" + kProblem, "foo"));
    CHECK(parse_fails("[a]\nc = 4\n[b]\nc = 5\n" + kProblem, "duplicate"));
    CHECK(parse_fails("c = 4\nq = 0.05\nbeta = 1.5\n", "delta"));
    CHECK(parse_fails("c = four\n" + kProblem, "c"));
    CHECK(parse_fails("c = 4 5\n" + kProblem, "c"));
    CHECK(parse_fails("c = 4\nkappa = 2\nalpha = 0.5, 0.5\nT = -1, 0, 0\n" + kProblem, "T"));
    CHECK(parse_fails("c = 4\nkappa = 2\nalpha = 1\n" + kProblem, "together"));
    CHECK(parse_fails("c = 4\nkappa = 2\n" + kProblem, "jump law"));
    CHECK(parse_fails("c = 4\nkappa = 2\njumps = gamma(2)\n" + kProblem, "gamma"));
    CHECK(parse_fails("c = 4\nkappa = 2\njumps = hyperexp(0.3, 0.7)\n" + kProblem, "weight:rate"));
    CHECK(parse_fails("c = 4\nkappa = 2\njumps = exp(2)\nalpha = 1\nT = -1\n" + kProblem, "either"));
    CHECK(parse_fails("c = 4\nkappa = 2\nalpha = 0.9, 0.5\nT = -2, 1; 0, -3\n" + kProblem));
    CHECK(parse_fails("[process\nc = 4\n" + kProblem, "line"));
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.ini"), Error);
}

TEST_CASE("shipped case files match the built-in fit") {
    for (const auto& [file, ref] : {std::pair{"case1.ini", fx::case1()}, std::pair{"case2.ini", fx::case2()}}) {
        const auto spec = load_model_file(std::string(LEVYDIV_SOURCE_DIR) + "/models/" + file);
        CHECK(spec.model.c == ref.c);
        CHECK(spec.model.sigma == ref.sigma);
        CHECK(spec.model.kappa == ref.kappa);
        CHECK((spec.model.jumps.alpha() - ref.jumps.alpha()).norm() <= 1e-14);
        CHECK((spec.model.jumps.subgen() - ref.jumps.subgen()).norm() <= 1e-13);
        CHECK(spec.params.q == 0.05);
        CHECK(spec.params.beta == 1.5);
        CHECK(spec.params.delta == 1.0);
    }
}
