#include "charfol/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

using namespace charfol;

namespace {

double eval3(const std::string& s, const Vec3& p) { return evaluate(parse(s, 3), p); }

// Random polynomial of total degree <= 4 as text, plus a plain evaluator of
// the same monomials used as the finite-difference subject.
struct Poly {
  struct Term {
    double c;
    int a, b, d;
  };
  std::vector<Term> terms;

  std::string text() const {
    std::string s;
    for (const auto& t : terms) {
      if (!s.empty()) s += " + ";
      s += "(" + std::to_string(t.c) + ")*x^" + std::to_string(t.a) + "*y^" + std::to_string(t.b) + "*z^" +
           std::to_string(t.d);
    }
    return s;
  }
  double operator()(const Vec3& p) const {
    double v = 0;
    for (const auto& t : terms) v += t.c * std::pow(p.x(), t.a) * std::pow(p.y(), t.b) * std::pow(p.z(), t.d);
    return v;
  }
};

Poly random_poly(std::mt19937_64& g) {
  std::uniform_int_distribution<int> n_terms(1, 6), deg(0, 4);
  std::uniform_real_distribution<double> coef(-2, 2);
  Poly p;
  const int n = n_terms(g);
  for (int i = 0; i < n; ++i) {
    int a = deg(g), b = deg(g), d = deg(g);
    while (a + b + d > 4) {
      if (a > 0) --a;
      else if (b > 0) --b;
      else --d;
    }
    p.terms.push_back({std::round(coef(g) * 1000) / 1000, a, b, d});
  }
  return p;
}

// Random expression text over the full grammar, kept inside the domains of
// log and sqrt by wrapping their arguments.
std::string random_text(std::mt19937_64& g, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  const char* vars[] = {"x", "y", "z"};
  if (depth == 0) {
    const int k = pick(g);
    if (k < 4) return vars[k % 3];
    return std::to_string(k - 3) + ".25";
  }
  const std::string a = random_text(g, depth - 1), b = random_text(g, depth - 1);
  switch (pick(g)) {
    case 0: return a + " + " + b;
    case 1: return a + " - " + b;
    case 2: return a + "*" + b;
    case 3: return "(" + a + ")/(2 + cos(" + b + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "exp(-(" + a + ")^2)";
    case 6: return "log(1 + (" + a + ")^2)";
    case 7: return "sqrt(3 + sin(" + a + "))";
    case 8: return "-" + a;
    default: return "(" + a + ")^2";
  }
}

}  // namespace

TEST(Parse, LeafCountOfEllipsoidText) {
  // Leaves: x 2 1 y 2 1 z 2 1 1.
  EXPECT_EQ(parse("x^2/1 + y^2/1 + z^2/1 - 1", 3).leaf_count(), 10u);
}

TEST(Parse, ParaboloidMember) {
  const Expr e = parse("z - 1*(x^2+y^2)", 3);
  for (const Vec3& p : {Vec3(0.3, -1.2, 2.0), Vec3(-4, 1, 0.5)})
    EXPECT_DOUBLE_EQ(evaluate(e, p), p.z() - (p.x() * p.x() + p.y() * p.y()));
}

TEST(Parse, IncompleteBinaryOpReportsOffset) {
  try {
    parse("x +", 3);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("foo(x)", 3), ParseError);
  EXPECT_THROW(parse("w + 1", 3), ParseError);
  EXPECT_THROW(parse("z", 2), ParseError);
  EXPECT_THROW(parse("u", 3), ParseError);
  EXPECT_THROW(parse("(x + 1", 3), ParseError);
  EXPECT_THROW(parse("x y", 3), ParseError);
  EXPECT_THROW(parse("", 3), ParseError);
}

TEST(Parse, PrecedenceAndAssociativity) {
  const Vec3 p(2, 3, 5);
  EXPECT_DOUBLE_EQ(eval3("2^3^2", p), 512.0);
  EXPECT_DOUBLE_EQ(eval3("-2^2", p), 4.0);
  EXPECT_DOUBLE_EQ(eval3("x - y - z", p), -6.0);
  EXPECT_DOUBLE_EQ(eval3("x / y * z", p), 2.0 / 3.0 * 5.0);
  EXPECT_DOUBLE_EQ(eval3("1 + x*y^2", p), 19.0);
  EXPECT_DOUBLE_EQ(eval3("  x*  ( y+z ) ", p), 16.0);
  EXPECT_DOUBLE_EQ(eval3("1.5e1 + .5", p), 15.5);
}

TEST(Parse, ParameterVariables) {
  const Expr e = parse("u*cos(v)", 2);
  const double vars[] = {2.0, 0.5};
  EXPECT_DOUBLE_EQ(evaluate<double>(e, std::span<const double>(vars, 2)), 2.0 * std::cos(0.5));
}

TEST(Jet, BilinearForm) {
  const auto j = eval_jet2<2>(parse("u*v", 2), Vec2(3, 5));
  EXPECT_EQ(j.v, 15.0);
  EXPECT_EQ(j.g, Vec2(5, 3));
  EXPECT_EQ(j.h, (Mat2() << 0, 1, 1, 0).finished());
}

TEST(Jet, SphereAtPole) {
  const auto j = eval_jet2<3>(parse("x^2 + y^2 + z^2 - 1", 3), Vec3(0, 0, 1));
  EXPECT_EQ(j.v, 0.0);
  EXPECT_EQ(j.g, Vec3(0, 0, 2));
  EXPECT_EQ(j.h, Mat3(2 * Mat3::Identity()));
}

TEST(Jet, DomainErrors) {
  EXPECT_THROW(eval_jet2<3>(parse("log(x)", 3), Vec3(0, 1, 1)), DomainError);
  EXPECT_THROW(eval_jet2<3>(parse("sqrt(y)", 3), Vec3(0, -1, 1)), DomainError);
  EXPECT_THROW(eval_jet2<3>(parse("1/(x - 1)", 3), Vec3(1, 0, 0)), DomainError);
  try {
    eval_jet2<3>(parse("z + log(x)", 3), Vec3(-1, 0, 0));
  } catch (const DomainError& e) {
    EXPECT_NE(e.subexpression().find("log"), std::string::npos);
  }
}

TEST(Jet, AbsIsOneSidedAtZero) {
  const auto j = eval_jet2<3>(parse("abs(x)", 3), Vec3(0, 0, 0));
  EXPECT_EQ(j.v, 0.0);
  EXPECT_EQ(j.g.norm(), 0.0);
  EXPECT_EQ(j.h.norm(), 0.0);
  EXPECT_EQ(eval_jet2<3>(parse("abs(x)", 3), Vec3(-2, 0, 0)).g.x(), -1.0);
}

TEST(Jet, TranscendentalDerivatives) {
  const Vec3 p(0.4, -0.3, 0.7);
  const auto j = eval_jet2<3>(parse("sin(x*y) + exp(z)*tan(x)", 3), p);
  const double x = p.x(), y = p.y(), z = p.z();
  const double sec2 = 1 / (std::cos(x) * std::cos(x));
  EXPECT_NEAR(j.g.x(), y * std::cos(x * y) + std::exp(z) * sec2, 1e-14);
  EXPECT_NEAR(j.g.y(), x * std::cos(x * y), 1e-14);
  EXPECT_NEAR(j.g.z(), std::exp(z) * std::tan(x), 1e-14);
  EXPECT_NEAR(j.h(0, 1), std::cos(x * y) - x * y * std::sin(x * y), 1e-14);
  EXPECT_NEAR(j.h(0, 2), std::exp(z) * sec2, 1e-14);
}

// Property: derivatives of random polynomials agree with central differences.
TEST(JetProperty, PolynomialsMatchCentralDifferences) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  const double h = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const Poly poly = random_poly(g);
    const Expr e = parse(poly.text(), 3);
    const Vec3 p(coord(g), coord(g), coord(g));
    const auto j = eval_jet2<3>(e, p);
    EXPECT_NEAR(j.v, poly(p), 1e-12 * (1 + std::abs(j.v)));
    const double scale = 1 + j.g.cwiseAbs().maxCoeff() + j.h.cwiseAbs().maxCoeff();
    for (int a = 0; a < 3; ++a) {
      const Vec3 ea = h * Vec3::Unit(a);
      const double fd = (poly(p + ea) - poly(p - ea)) / (2 * h);
      EXPECT_NEAR(j.g[a], fd, 1e-5 * scale) << poly.text();
      for (int b = 0; b < 3; ++b) {
        const Vec3 eb = h * Vec3::Unit(b);
        const double fd2 =
            (poly(p + ea + eb) - poly(p + ea - eb) - poly(p - ea + eb) + poly(p - ea - eb)) / (4 * h * h);
        EXPECT_NEAR(j.h(a, b), fd2, 1e-5 * scale) << poly.text();
      }
    }
    EXPECT_EQ(j.h, j.h.transpose());
  }
}

// Property: printing then reparsing is a fixed point of the AST.
TEST(PrinterProperty, RoundTripIsStable) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> coord(-1, 1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string text = random_text(g, 1 + trial % 4);
    const Expr a = parse(text, 3);
    const Expr b = parse(to_string(a), 3);
    EXPECT_TRUE(a == b) << text << "  ->  " << to_string(a);
    EXPECT_EQ(to_string(b), to_string(a));
    const Vec3 p(coord(g), coord(g), coord(g));
    try {
      const double va = evaluate(a, p);
      EXPECT_EQ(va, evaluate(b, p));
    } catch (const DomainError&) {
      EXPECT_THROW(evaluate(b, p), DomainError);
    }
  }
}

TEST(Evaluate, SharedTreeAcrossCopies) {
  const Expr a = parse("x*y + z", 3);
  const Expr b = a;
  EXPECT_TRUE(a == b);
  EXPECT_EQ(&a.root(), &b.root());
}
