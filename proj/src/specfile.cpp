#include "qsum/specfile.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qsum {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

namespace {

Complex parse_complex(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw spec_parse_error("field '" + field + "': expected a [re, im] pair");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

json emit_complex(Complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace

SpecFile parse_spec_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw spec_parse_error(std::string("not well-formed JSON: ") + e.what());
    }
    auto need = [&](const char* k) -> const json& {
        if (!j.contains(k)) throw spec_parse_error(std::string("missing field '") + k + "'");
        return j.at(k);
    };

    SpecFile sf;
    sf.spec.q = parse_complex(need("q"), "q");
    if (!need("n").is_number_integer()) throw spec_parse_error("field 'n': expected an integer");
    if (!need("d").is_number_integer()) throw spec_parse_error("field 'd': expected an integer");
    if (!need("r").is_number_integer()) throw spec_parse_error("field 'r': expected an integer");
    sf.spec.slope.n = need("n").get<int>();
    sf.spec.slope.d = need("d").get<int>();
    sf.spec.r = need("r").get<int>();
    sf.spec.a = parse_complex(need("a"), "a");
    sf.lambda.lambda = parse_complex(need("lambda"), "lambda");
    sf.lambda.d = sf.spec.slope.d;

    if (sf.spec.slope.n < 1 || sf.spec.slope.d < 1)
        throw spec_parse_error("fields 'n'/'d': must be positive");
    if (std::gcd(sf.spec.slope.n, sf.spec.slope.d) != 1)
        throw spec_parse_error("fields 'n'/'d': must be coprime (gcd(n,d) = 1)");
    if (!(std::abs(sf.spec.q) > 1.0)) throw spec_parse_error("field 'q': modulus must be > 1");
    if (sf.spec.a == Complex(0.0)) throw spec_parse_error("field 'a': must be nonzero");
    if (sf.spec.r < 1) throw spec_parse_error("field 'r': must be a positive integer");
    if (sf.lambda.lambda == Complex(0.0)) throw spec_parse_error("field 'lambda': must be nonzero");

    const json& W = need("W");
    const int m1 = sf.spec.m_minus_1();
    if (!W.is_array() || static_cast<int>(W.size()) != m1)
        throw spec_parse_error("field 'W': expected m-1 = d*r = " + std::to_string(m1) + " rows");
    for (int i = 0; i < m1; ++i) {
        const json& row = W[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != sf.spec.slope.n)
            throw spec_parse_error("field 'W[" + std::to_string(i) + "]': expected exactly n = " +
                                   std::to_string(sf.spec.slope.n) +
                                   " coefficient pairs (degree < n)");
        std::vector<Complex> coeffs;
        for (int k = 0; k < sf.spec.slope.n; ++k)
            coeffs.push_back(parse_complex(row[static_cast<std::size_t>(k)],
                                           "W[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
        sf.spec.W.push_back(std::move(coeffs));
    }

    if (j.contains("truncation")) {
        const json& t = j.at("truncation");
        if (t.contains("N")) sf.N = t.at("N").get<int>();
        if (t.contains("laplace_window")) sf.laplace_window = t.at("laplace_window").get<int>();
        if (t.contains("term_tol")) sf.ctx.term_tol = t.at("term_tol").get<double>();
        if (t.contains("test_tol")) sf.ctx.test_tol = t.at("test_tol").get<double>();
    }
    sf.ctx.validate();
    if (sf.N < sf.spec.slope.n) throw spec_parse_error("field 'truncation.N': must be >= n");

    sf.spec.validate();
    return sf;
}

SpecFile parse_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_parse_error("cannot open spec file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec_text(ss.str());
}

std::string emit_spec(const SpecFile& sf) {
    json j;
    j["q"] = emit_complex(sf.spec.q);
    j["n"] = sf.spec.slope.n;
    j["d"] = sf.spec.slope.d;
    j["a"] = emit_complex(sf.spec.a);
    j["r"] = sf.spec.r;
    json W = json::array();
    for (const auto& row : sf.spec.W) {
        json jr = json::array();
        for (Complex c : row) jr.push_back(emit_complex(c));
        W.push_back(jr);
    }
    j["W"] = W;
    j["lambda"] = emit_complex(sf.lambda.lambda);
    j["truncation"] = {{"N", sf.N},
                       {"laplace_window", sf.laplace_window},
                       {"term_tol", sf.ctx.term_tol},
                       {"test_tol", sf.ctx.test_tol}};
    return j.dump(2);
}

}  // namespace qsum
