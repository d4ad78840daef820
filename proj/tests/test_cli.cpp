#include "mouldcalc/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mouldcalc;

namespace {

struct RunResult {
    int rc = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    RunResult r;
    r.rc  = cli::run(std::move(args), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path demo_field_file() {
    static const std::filesystem::path p = [] {
        const auto path = std::filesystem::temp_directory_path() / "mouldcalc_cli_demo.vf";
        const Spectrum lam{{Scalar(1), Scalar(-1)}};
        const auto x = make_field(
            lam, {HomogeneousOp{Letter{{1, 1}}, {Scalar(1), Scalar(1)}},
                  HomogeneousOp{Letter{{2, 0}}, {Scalar(1), Scalar(Rational(-1, 2))}},
                  HomogeneousOp{Letter{{0, 2}}, {Scalar(Rational(1, 3)), Scalar(2)}}});
        save_field(x, path.string());
        return path;
    }();
    return p;
}

} // namespace

TEST_CASE("single-word evaluation prints the bare value") {
    const auto a = run_cli({"nil", "--weights", "0,1,0"});
    CHECK(a.rc == 0);
    CHECK(a.out == "2\n");
    const auto b = run_cli({"nil", "--weights", "0,0,0"});
    CHECK(b.rc == 0);
    CHECK(b.out == "0\n");
    const auto c = run_cli({"nil", "--weights", "2,-2"});
    CHECK(c.out == "-1/2\n");
    const auto d = run_cli({"nil", "--weights", "[0,1],[0,-1]"});
    CHECK(d.out == "[0, 1]\n");  // -1/i = i
}

TEST_CASE("malformed flags give a one-line diagnostic naming the flag") {
    const auto r = run_cli({"nil", "--weights", "0,1,x"});
    CHECK(r.rc == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("--weights") != std::string::npos);
    CHECK(r.err.find('\n') == r.err.size() - 1);

    const auto missing = run_cli({"nil"});
    CHECK(missing.rc != 0);

    const auto badsub = run_cli({"frobnicate"});
    CHECK(badsub.rc != 0);

    const auto badfile = run_cli({"act", "--field", "/definitely/not/here.vf", "--mould",
                                  "invfact", "--order", "3"});
    CHECK(badfile.rc == 2);
    CHECK(badfile.err.find("cannot open") != std::string::npos);

    const auto badmould = run_cli({"act", "--field", demo_field_file().string(), "--mould",
                                   "nope", "--order", "3"});
    CHECK(badmould.rc == 2);
    CHECK(badmould.err.find("--mould") != std::string::npos);
}

TEST_CASE("table verification reports the one flagged row and still exits clean") {
    const auto r = run_cli({"nil-table", "--length", "3", "--samples", "25", "--seed", "7"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("rows 14 discrepancies 1 ok") != std::string::npos);
    std::size_t flagged = 0;
    for (std::size_t pos = 0; (pos = r.out.find("documented-discrepancy", pos)) != std::string::npos;
         ++pos)
        ++flagged;
    CHECK(flagged == 1);
    CHECK(r.out.find("row (w, 0, 0)") != std::string::npos);

    for (const char* len : {"1", "2"}) {
        const auto q = run_cli({"nil-table", "--length", len, "--samples", "25", "--seed", "7"});
        CHECK(q.rc == 0);
        CHECK(q.out.find("discrepancies 0 ok") != std::string::npos);
    }
}

TEST_CASE("route cross-checking lists the admissible routes on demand") {
    const auto r = run_cli({"nil-check", "--weights", "1,-1,0", "--all-routes"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("route position 1 = -1") != std::string::npos);
    CHECK(r.out.find("agree true") != std::string::npos);
    const auto quiet = run_cli({"nil-check", "--weights", "1,-1,0"});
    CHECK(quiet.out.find("route") == std::string::npos);
    CHECK(quiet.out.find("value -1") != std::string::npos);
    const auto base = run_cli({"nil-check", "--weights", "0,0"});
    CHECK(base.out.find("base-case") != std::string::npos);
}

TEST_CASE("variance evaluation matches the library on the same configuration") {
    const auto r = run_cli({"variance", "--mould", "invfact", "--letter", "(0,2)", "--word",
                            "[(1,1),(2,0)]", "--lambda", "1,-1"});
    CHECK(r.rc == 0);
    // no occurrence of c in the word: locality forces 0
    CHECK(r.out == "0\n");

    const auto s = run_cli({"variance", "--mould", "invfact", "--letter", "(1,1)", "--word",
                            "[(1,1),(2,0)]", "--lambda", "1,-1"});
    const Spectrum lam{{Scalar(1), Scalar(-1)}};
    const auto ctx = make_variance_context(
        Letter{{1, 1}}, lam, {Letter{{1, 1}}, Letter{{2, 0}}});
    const Scalar want =
        var_c(invfact_mould().with_spectrum(lam), ctx)(Word({Letter{{1, 1}}, Letter{{2, 0}}}));
    CHECK(s.out == want.str() + "\n");

    const auto dim = run_cli({"variance", "--mould", "invfact", "--letter", "(1,1,0)", "--word",
                              "[(1,1)]", "--lambda", "1,-1"});
    CHECK(dim.rc == 2);
    CHECK(dim.err.find("--letter") != std::string::npos);
}

TEST_CASE("action output switches between matrix entries and field terms") {
    const std::string field = demo_field_file().string();
    const auto mat = run_cli({"act", "--field", field, "--mould", "invfact", "--order", "3"});
    CHECK(mat.rc == 0);
    CHECK(mat.out.find("entry x^") != std::string::npos);
    CHECK(mat.out.find("dim 2 order 3") != std::string::npos);

    const auto fld = run_cli({"act", "--field", field, "--mould", "nil", "--order", "4",
                              "--emit", "field"});
    CHECK(fld.rc == 0);
    CHECK(fld.out.find("term 1 x^(2,1) 1") != std::string::npos);

    // a unital mould cannot be a derivation
    const auto bad = run_cli({"act", "--field", field, "--mould", "invfact", "--order", "3",
                              "--emit", "field"});
    CHECK(bad.rc == 3);
    CHECK(bad.err.find("derivation") != std::string::npos);
}

TEST_CASE("decomposition reports reconstruction, residuals and derivation checks") {
    const auto r = run_cli({"decompose", "--field", demo_field_file().string(), "--order", "5"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("reconstruction exact") != std::string::npos);
    CHECK(r.out.find("residual degree 5 : 0") != std::string::npos);
    CHECK(r.out.find("derivation nil-part pass") != std::string::npos);
    CHECK(r.out.find("derivation dia-part pass") != std::string::npos);
    CHECK(r.out.rfind("ok\n") == r.out.size() - 3);
}

TEST_CASE("randomized suites pass and honour their seeds") {
    for (const char* kind : {"derivation", "nabla", "alternality", "functional"}) {
        const auto r = run_cli({"check", kind, "--seed", "5", "--trials", "4", "--maxlen", "3"});
        INFO(kind << ": " << r.out << r.err);
        CHECK(r.rc == 0);
        CHECK(r.out.find("failures 0 ok") != std::string::npos);
    }
    const auto seedless = run_cli({"check", "derivation", "--trials", "2"});
    CHECK(seedless.rc != 0);
}

TEST_CASE("oracle runs end to end from a field file") {
    const std::string field = demo_field_file().string();
    const auto r = run_cli({"oracle", "--field", field, "--letter", "(0,2)", "--mould",
                            "invfact", "--order", "5"});
    CHECK(r.rc == 0);
    CHECK(r.out.substr(0, 5) == "PASS\n");
    CHECK(r.out.find("agree on all") != std::string::npos);

    // alphabet letter with clashing coefficients is a mathematical error
    const auto clash = run_cli({"oracle", "--field", field, "--letter", "(1,1)", "--mould",
                                "invfact", "--order", "4", "--coeffs", "5,5"});
    CHECK(clash.rc == 3);
    CHECK(clash.err.find("different operator") != std::string::npos);

    // the field's own operator is the default for alphabet letters
    const auto own = run_cli({"oracle", "--field", field, "--letter", "(1,1)", "--mould",
                              "invfact", "--order", "4"});
    CHECK(own.rc == 0);
}

TEST_CASE("identical invocations produce identical bytes") {
    const std::vector<std::string> args{"nil-table", "--length", "2", "--samples", "40",
                                        "--seed", "123"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.rc == b.rc);
    CHECK(a.out == b.out);
    const auto c = run_cli({"check", "functional", "--seed", "77", "--trials", "3"});
    const auto d = run_cli({"check", "functional", "--seed", "77", "--trials", "3"});
    CHECK(c.out == d.out);
}

TEST_CASE("structured output is valid JSON with the same content") {
    const auto r = run_cli({"nil", "--weights", "0,1,0", "--format", "structured"});
    CHECK(r.rc == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("value") == "2");

    const auto t = run_cli({"nil-table", "--length", "3", "--samples", "10", "--seed", "7",
                            "--format", "structured"});
    const json jt = json::parse(t.out);
    CHECK(jt.at("rows").size() == 14);
    CHECK(jt.at("discrepancies") == 1);
    CHECK(jt.at("ok") == true);

    const auto o = run_cli({"oracle", "--field", demo_field_file().string(), "--letter",
                            "(0,2)", "--mould", "invfact", "--order", "4", "--format",
                            "structured"});
    const json jo = json::parse(o.out);
    CHECK(jo.at("pass") == true);
    CHECK(jo.at("mismatches") == 0);

    const auto d = run_cli({"decompose", "--field", demo_field_file().string(), "--order", "4",
                            "--format", "structured"});
    const json jd = json::parse(d.out);
    CHECK(jd.at("reconstruction_exact") == true);
    CHECK(jd.at("ok") == true);

    // scalars printed in structured mode re-parse to equal values
    const auto v = run_cli({"nil", "--weights", "[0,1],[0,-1]", "--format", "structured"});
    const json jv = json::parse(v.out);
    CHECK(parse_scalar(jv.at("value").get<std::string>()) ==
          Scalar(Rational(0), Rational(1)));
}
