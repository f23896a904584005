#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radcomp/errors.hpp"

namespace radcomp {

/// A compiled scalar expression in the single variable `t`.
///
/// Grammar: `+ - * / ^`, parentheses, numbers, the constants `pi` and `e`,
/// and the functions sin cos tan exp log sqrt sinh cosh tanh abs pos
/// (positive part), plus the binary min and max. The source is kept verbatim
/// so a curvature defined by formula serializes back unchanged.
class Expression {
 public:
  Expression() : Expression("0") {}

  explicit Expression(std::string source) : source_(std::move(source)) {
    Parser p{source_, 0, &program_};
    p.expression();
    p.skip_space();
    if (p.pos != source_.size())
      throw DomainError("formula '" + source_ + "': unexpected '" + source_.substr(p.pos, 1) +
                        "' at column " + std::to_string(p.pos + 1));
    int depth = 0;
    for (const Instr& in : program_) {
      depth += stack_effect(in.op);
      max_depth_ = std::max(max_depth_, depth);
    }
    if (max_depth_ > kStackSize) throw DomainError("formula '" + source_ + "' nests too deeply");
  }

  const std::string& source() const { return source_; }

  double operator()(double t) const {
    std::array<double, kStackSize> st;
    int sp = 0;
    for (const Instr& in : program_) {
      switch (in.op) {
        case Op::Const: st[sp++] = in.value; break;
        case Op::Var: st[sp++] = t; break;
        case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::Add: --sp; st[sp - 1] += st[sp]; break;
        case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
        case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
        case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
        case Op::Pow: --sp; st[sp - 1] = power(st[sp - 1], st[sp]); break;
        case Op::Min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
        case Op::Max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
        case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
        case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
        case Op::Tan: st[sp - 1] = std::tan(st[sp - 1]); break;
        case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Op::Log: st[sp - 1] = std::log(st[sp - 1]); break;
        case Op::Sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
        case Op::Sinh: st[sp - 1] = std::sinh(st[sp - 1]); break;
        case Op::Cosh: st[sp - 1] = std::cosh(st[sp - 1]); break;
        case Op::Tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
        case Op::Abs: st[sp - 1] = std::abs(st[sp - 1]); break;
        case Op::Pos: st[sp - 1] = std::max(st[sp - 1], 0.0); break;
      }
    }
    return st[0];
  }

 private:
  static constexpr int kStackSize = 64;

  enum class Op {
    Const, Var, Neg, Add, Sub, Mul, Div, Pow, Min, Max,
    Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Abs, Pos
  };
  struct Instr {
    Op op;
    double value = 0.0;
  };

  static int stack_effect(Op op) {
    switch (op) {
      case Op::Const:
      case Op::Var: return 1;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
      case Op::Pow: case Op::Min: case Op::Max: return -1;
      default: return 0;
    }
  }

  // Integer exponents go through repeated multiplication so that
  // (1-t)^2 stays exact and defined for negative bases.
  static double power(double base, double ex) {
    if (ex == std::round(ex) && std::abs(ex) <= 64) {
      int n = static_cast<int>(std::abs(ex));
      double r = 1.0, b = base;
      while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
      }
      return ex < 0 ? 1.0 / r : r;
    }
    return std::pow(base, ex);
  }

  struct Parser {
    std::string_view src;
    std::size_t pos;
    std::vector<Instr>* out;

    [[noreturn]] void fail(const std::string& msg) const {
      throw DomainError("formula '" + std::string(src) + "': " + msg + " at column " +
                        std::to_string(pos + 1));
    }
    void skip_space() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_space();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    void expect(char c) {
      if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    void emit(Op op, double v = 0.0) { out->push_back({op, v}); }

    void expression() {
      term();
      for (;;) {
        if (accept('+')) { term(); emit(Op::Add); }
        else if (accept('-')) { term(); emit(Op::Sub); }
        else break;
      }
    }
    void term() {
      unary();
      for (;;) {
        if (accept('*')) { unary(); emit(Op::Mul); }
        else if (accept('/')) { unary(); emit(Op::Div); }
        else break;
      }
    }
    void unary() {
      if (accept('-')) { unary(); emit(Op::Neg); return; }
      if (accept('+')) { unary(); return; }
      power_expr();
    }
    void power_expr() {
      primary();
      if (accept('^')) {
        unary();
        emit(Op::Pow);
      }
    }
    void primary() {
      skip_space();
      if (pos >= src.size()) fail("unexpected end");
      const char c = src[pos];
      if (accept('(')) {
        expression();
        expect(')');
        return;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::string rest(src.substr(pos));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("bad number");
        pos += static_cast<std::size_t>(end - rest.c_str());
        emit(Op::Const, v);
        return;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < src.size() && std::isalnum(static_cast<unsigned char>(src[pos]))) ++pos;
        const std::string_view name = src.substr(start, pos - start);
        if (name == "t") { emit(Op::Var); return; }
        if (name == "pi") { emit(Op::Const, std::numbers::pi); return; }
        if (name == "e") { emit(Op::Const, std::numbers::e); return; }
        call(name);
        return;
      }
      fail(std::string("unexpected '") + c + "'");
    }
    void call(std::string_view name) {
      static constexpr std::array<std::pair<std::string_view, Op>, 11> unary_fns{{
          {"sin", Op::Sin}, {"cos", Op::Cos}, {"tan", Op::Tan}, {"exp", Op::Exp},
          {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"sinh", Op::Sinh}, {"cosh", Op::Cosh},
          {"tanh", Op::Tanh}, {"abs", Op::Abs}, {"pos", Op::Pos}}};
      expect('(');
      expression();
      if (name == "min" || name == "max") {
        expect(',');
        expression();
        expect(')');
        emit(name == "min" ? Op::Min : Op::Max);
        return;
      }
      expect(')');
      for (const auto& [n, op] : unary_fns) {
        if (n == name) {
          emit(op);
          return;
        }
      }
      fail("unknown function '" + std::string(name) + "'");
    }
  };

  std::string source_;
  std::vector<Instr> program_;
  int max_depth_ = 0;
};

}  // namespace radcomp
