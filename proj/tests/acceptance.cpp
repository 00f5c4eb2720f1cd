// Prints one PASS/FAIL line per acceptance criterion with its runtime and
// budget. The exit status is always 0; read the lines.

#include "support.hpp"

#include "tensorpad/algorithms.hpp"
#include "tensorpad/symmetry.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace tensorpad;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= limit_seconds;
  const bool pass = v.ok && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(3);
  line << (pass ? "PASS" : "FAIL") << "  " << name << "  [" << secs << " s, limit " << limit_seconds << " s]";
  if (!in_time) line << "  over time budget";
  if (!v.detail.empty()) line << "  " << v.detail;
  std::cout << line.str() << std::endl;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Session riemann_session() {
  return tptest::session_with({"{a,b,c,d,m,n,p,q}::Indices(vector).", "R_{a b c d}::RiemannTensor."});
}

// Root of a comparison key: unit multiplier, detached from any parent.
Expression with_unit_multiplier(Expression e) {
  e.multiplier = Rational(1);
  e.rel = ParentRel::NoRelation;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string samples = argc > 1 ? argv[1] : "samples";
  const std::string property_binary = argc > 2 ? argv[2] : "";

  criterion("riemann projector golden formula", 1.0, [] {
    auto s = riemann_session();
    const auto got = young_project(parse("R_{a b c d}"), s.registry());
    const auto want = canonicalise(parse("1/3 (2 R_{a b c d} - R_{a d b c} + R_{a c b d})"), s.registry());
    return Verdict{tptest::equal_as_sums(got, canonicalise(distribute(want), s.registry())), print_tex(got)};
  });

  criterion("cyclic identity projects to zero", 1.0, [] {
    auto s = riemann_session();
    const auto got = young_project(parse("R_{m n p q} + R_{m p q n} + R_{m q n p}"), s.registry());
    return Verdict{got.is_zero(), print_tex(got)};
  });

  criterion("quadratic identity coefficient", 5.0, [] {
    auto s = riemann_session();
    const auto basis = build_basis({parse("R_{a b c d} R_{a c b d}")}, s.registry());
    const auto c = decompose(parse("R_{a b c d} R_{a b c d}"), basis, s.registry());
    return Verdict{c == CoefficientVector{Rational(2)}, "(" + c.at(0).to_string() + ")"};
  });

  criterion("minimal form of a dependent sum", 5.0, [] {
    auto s = riemann_session();
    const auto got = reduce_sum(parse("2 R_{a b c d} + 2 R_{b c a d} + R_{c a b d}"), s.registry());
    return Verdict{equal_subtree(got, parse("R_{a b c d} + R_{b c a d}"), true), print_tex(got)};
  });

  criterion("cubic riemann basis", 300.0, [&] {
    Session s;
    s.eval_text(read_file(samples + "/riemann_cubic_basis.tp"));
    const auto got = *s.lookup("basisR3");
    const std::vector<std::string> published{
        "R_{m n p q} R_{m p r s} R_{n r q s}", "R R_{q r} R_{q r}",
        "R_{n p} R_{n q p r} R_{q r}",       "R_{n p} R_{n q r s} R_{p r q s}",
        "R R_{p q r s} R_{p q r s}",         "R_{n p} R_{n r} R_{p r}",
        "R_{m n p q} R_{m r p s} R_{n r q s}", "R R R"};
    const auto& reg = s.registry();
    std::size_t matched = 0;
    std::vector<bool> used(published.size(), false);
    for (const auto& g : got.children) {
      const auto key = rename_dummies(with_unit_multiplier(canonicalise(g, reg)), reg);
      for (std::size_t i = 0; i < published.size(); ++i) {
        if (used[i]) continue;
        const auto p = rename_dummies(with_unit_multiplier(canonicalise(parse(published[i]), reg)), reg);
        if (equal_subtree(key, p, true)) {
          used[i] = true;
          ++matched;
          break;
        }
      }
    }
    const bool count_ok = got.is_list() && got.children.size() == 8;
    std::ostringstream d;
    d << got.children.size() << " independent monomials, " << matched << "/8 canonical forms equal to the published list; span equality is checked numerically in oracle_tests";
    return Verdict{count_ok && matched == 8, d.str()};
  });

  criterion("quartic weyl decomposition", 600.0, [&] {
    Session s;
    std::ostringstream transcript, errors;
    const int rc = run_script_text(s, read_file(samples + "/weyl_decomposition.tp"), {}, transcript, errors);
    const auto got = s.lookup(s.current());
    const std::string text = got ? print_tex(*got) : "";
    return Verdict{rc == 0 && text == "{0, 1, 0, 0, 0, -1/4, 0}", text + errors.str()};
  });

  const std::vector<std::tuple<std::string, std::string, std::string>> substitution_cases{
      {"relabel_products.tp", "C", "T_{q2 m} T_{q2 n} T_{q3 m} T_{q3 n} T_{q4 p} T_{q4 q1} T_{q5 p} T_{q5 q1}"},
      {"relabel_nested.tp", "C",
       "\\partial_{m}(T_{n q4} S_{q4} T_{p q5} S_{q5} + C_{n p}) B_{m n p} "
       "\\partial_{q1}(T_{q2 q6} S_{q6} T_{q3 q7} S_{q7} + C_{q2 q3}) B_{q1 q2 q3}"},
      {"relabel_two_spaces.tp", "C",
       "\\bar{\\psi} \\Gamma_{m p} \\psi B_{p \\nu \\rho} C_{\\rho} "
       "\\bar{\\psi} \\Gamma_{m n} \\psi B_{n \\nu \\mu} C_{\\mu}"}};
  for (const auto& [file, label, published] : substitution_cases) {
    criterion("substitution relabelling " + file, 1.0, [&, file = file, label = label, published = published] {
      Session s;
      s.eval_text(read_file(samples + "/" + file));
      const auto got = *s.lookup(label);
      const bool same = tptest::same_up_to_dummies(got, parse(published), s.registry());
      const bool exact = print_tex(got) == print_tex(parse(published));
      return Verdict{same, exact ? "identical text" : print_tex(got)};
    });
  }

  criterion("randomised property suites", 600.0, [&] {
    if (property_binary.empty()) return Verdict{false, "property test binary not given"};
    const std::string cmd = "\"" + property_binary + "\" --gtest_brief=1 > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return Verdict{rc == 0, rc == 0 ? "7 suites x 1000 cases" : "property_tests exit status " + std::to_string(rc)};
  });

  criterion("super-maxwell declarations and variation steps", 60.0, [&] {
    Session s;
    std::ostringstream transcript, errors;
    const int rc = run_script_text(s, read_file(samples + "/super_maxwell.tp"), {}, transcript, errors);
    const auto& reg = s.registry();
    const bool declared = reg.has(parse("\\lambda"), PropertyKind::Spinor) &&
                          reg.has(parse("\\gamma_{a}"), PropertyKind::GammaMatrix) &&
                          reg.has(parse("f_{a b}"), PropertyKind::AntiSymmetric) &&
                          reg.has(parse("\\bar{\\epsilon}"), PropertyKind::DiracBar);
    return Verdict{rc == 0 && declared, rc == 0 ? "" : errors.str()};
  });

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criterion(s) failing") << std::endl;
  return 0;
}
