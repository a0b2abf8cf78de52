#include <doctest.h>

#include <qlap/io.hpp>
#include <qlap/minimize.hpp>
#include <qlap/sampling.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <string>

using namespace qlap;

TEST_CASE("format double round trips") {
    for (double x : {0.0, 1.0, -1.5, 0.1, 3.141592653589793, 1e-300, 6.02e23, -7.25e-12}) {
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("determinism: identical options and seed give identical json") {
    const ProblemParams pp{2, 3.0, 4.5, 30.0, 1.0};
    const auto g = make_grid(2, 10.0, 193);
    MinimizeOptions o;
    o.max_iter = 150;
    o.restarts = 2;
    o.tol_grad = 1e-6;
    o.seed = 42;
    o.rho_hat = 0.01;
    const auto a = to_json(global_minimize(pp, g, o)).dump(2);
    const auto b = to_json(global_minimize(pp, g, o)).dump(2);
    CHECK(a == b);
}
