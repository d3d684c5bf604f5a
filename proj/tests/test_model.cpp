#include <doctest.h>

#include <string>

#include "delaylab/error.hpp"
#include "delaylab/model.hpp"

using namespace delaylab;

TEST_CASE("check_hypotheses examples") {
    const Model ok = model_from_text("t", "1", "x", {-1, 1});
    CHECK(check_hypotheses(ok, 64).passed());

    const Model bad_f = model_from_text("t", "-1", "x", {-1, 1});
    const HypothesisReport r = check_hypotheses(bad_f, 64);
    CHECK_FALSE(r.passed());
    CHECK_FALSE(r.checks[0].passed);
    CHECK(*r.checks[0].first_violation == -1.0);
    CHECK(r.checks[1].passed);
    CHECK(r.checks[2].passed);

    CHECK(check_hypotheses(model_from_text("q", "1", "x + x^2", {-0.8, 0.8}), 1024).passed());
    const HypothesisReport wide = check_hypotheses(model_from_text("q", "1", "x + x^2", {-1.5, 0.8}), 1024);
    CHECK_FALSE(wide.passed());
    CHECK_FALSE(wide.checks[1].passed);
    CHECK(*wide.checks[1].first_violation < -1.0);
}

TEST_CASE("linear model passes at every grid resolution") {
    const Model m = builtin_model("linear");
    for (std::size_t n = 16; n <= 4096; n = n * 3 / 2) CHECK(check_hypotheses(m, n).passed());
    CHECK_THROWS_AS(check_hypotheses(m, 15), PreconditionError);
}

TEST_CASE("turning point exclusion") {
    // g vanishes only at 0 and has the right sign elsewhere
    CHECK(check_hypotheses(model_from_text("c", "1", "x^3", {-1, 1}), 1025).passed());
    // a tiny wrong-signed interval away from 0 is caught
    CHECK_FALSE(check_hypotheses(model_from_text("w", "1", "x*(x - 0.3)*(x - 0.5)", {-1, 1}), 1024).passed());
}

TEST_CASE("validate_initial examples") {
    const Model lin = model_from_text("l", "1", "x", {-1.5, 1.5});
    CHECK(validate_initial(lin, {-1, 0.1, 0}).passed());

    const Model coupled = model_from_text("c", "1", "x + 10*z", {-1, 1});
    const HypothesisReport r = validate_initial(coupled, {-0.5, 0.1, 0});
    CHECK_FALSE(r.passed());
    CHECK(*r.checks[0].first_violation > 0.05);
    CHECK(coupled.g(-0.5, 0.06, 0) == doctest::Approx(0.1));

    CHECK_THROWS_AS(validate_initial(lin, {-1, 0.0, 0}), PreconditionError);
    CHECK_THROWS_AS(validate_initial(lin, {0.5, 0.1, 0}), PreconditionError);
    CHECK_THROWS_AS(validate_initial(lin, {-1, 2.0, 0}), PreconditionError);
    CHECK_THROWS_AS(validate_initial(lin, {-2, 0.1, 0}), PreconditionError);
}

TEST_CASE("builtin registry") {
    const Model lin = builtin_model("linear");
    CHECK(lin.f0(0.3) == 1.0);
    CHECK(lin.g0(0.3) == 0.3);
    CHECK(lin.window.x_min == -1.5);
    CHECK(lin.window.x_max == 1.5);
    CHECK(builtin_model("scaled").f0(0.0) == 2.0);
    const Model q = builtin_model("quadratic");
    CHECK(q.g0(0.5) == 0.75);
    CHECK(q.window.x_max == 0.8);

    try {
        builtin_model("cubic");
        FAIL("unknown model accepted");
    } catch (const UnknownModel& e) {
        const std::string msg = e.what();
        for (const auto& name : builtin_model_names()) CHECK(msg.find(name) != std::string::npos);
    }
}

TEST_CASE("model construction rejects bad windows") {
    CHECK_THROWS_AS(model_from_text("m", "1", "x", {0.1, 1}), PreconditionError);
    CHECK_THROWS_AS(model_from_text("m", "1", "x", {-1, 1}, 0.0), PreconditionError);
    CHECK_THROWS_AS(model_from_text("m", "1", "x +", {-1, 1}), ParseError);
}
