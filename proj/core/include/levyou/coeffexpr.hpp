#pragma once

// Time-dependent coefficient expressions.
//
// Grammar (standard precedence, left associative):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | primary
//   primary := number | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | abs
//
// Parsed expressions are immutable and may be evaluated from any thread.

#include "levyou/linalg.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace levyou {

class CoeffExpr {
public:
    enum class Kind { Number, Time, Negate, Add, Sub, Mul, Div, Sin, Cos, Exp, Abs };

    struct Node;

    // The constant 0.
    CoeffExpr();

    static CoeffExpr parse(std::string_view src);
    static CoeffExpr constant(double value);
    static CoeffExpr time();

    // Evaluates at t. Throws EvalError on division by zero or a non-finite result.
    double operator()(double t) const;

    // Minimal-parenthesis rendering that re-parses to a structurally equal tree.
    std::string to_string() const;

    Kind kind() const noexcept;
    // True when the tree contains no reference to t.
    bool is_constant() const noexcept;

    friend bool operator==(const CoeffExpr& a, const CoeffExpr& b);

    friend CoeffExpr operator+(const CoeffExpr& a, const CoeffExpr& b);
    friend CoeffExpr operator-(const CoeffExpr& a, const CoeffExpr& b);
    friend CoeffExpr operator*(const CoeffExpr& a, const CoeffExpr& b);
    friend CoeffExpr operator/(const CoeffExpr& a, const CoeffExpr& b);
    friend CoeffExpr operator-(const CoeffExpr& a);

private:
    explicit CoeffExpr(std::shared_ptr<const Node> root);

    std::shared_ptr<const Node> root_;
};

CoeffExpr parse_expr(std::string_view src);
double eval_expr(const CoeffExpr& e, double t);

// d x d grid of expressions, evaluated to a real matrix.
class MatrixFn {
public:
    MatrixFn() = default;
    MatrixFn(std::size_t dim, std::vector<CoeffExpr> row_major);

    static MatrixFn parse(const std::vector<std::vector<std::string>>& rows);
    static MatrixFn constant(const Matrix& m);
    static MatrixFn scalar(const CoeffExpr& e);

    std::size_t dim() const noexcept { return dim_; }
    const CoeffExpr& entry(std::size_t row, std::size_t col) const {
        return entries_.at(row * dim_ + col);
    }
    bool is_constant() const noexcept;

    Matrix operator()(double t) const;
    // Writes dim*dim values in column-major (Eigen) order.
    void evaluate_into(double t, double* out) const;

private:
    std::size_t dim_ = 0;
    std::vector<CoeffExpr> entries_;
};

class VectorFn {
public:
    VectorFn() = default;
    explicit VectorFn(std::vector<CoeffExpr> entries);

    static VectorFn parse(const std::vector<std::string>& entries);
    static VectorFn constant(const Vector& v);

    std::size_t dim() const noexcept { return entries_.size(); }
    const CoeffExpr& entry(std::size_t i) const { return entries_.at(i); }
    bool is_zero() const noexcept;

    Vector operator()(double t) const;

private:
    std::vector<CoeffExpr> entries_;
};

// Samples max |entry(t)| on n points of [t0, t1]. Returns a warning message
// when the sup exceeds bound, nothing otherwise.
std::optional<std::string> probe_bound(const MatrixFn& m, double t0, double t1, std::size_t n,
                                       double bound);
std::optional<std::string> probe_bound(const VectorFn& v, double t0, double t1, std::size_t n,
                                       double bound);

}  // namespace levyou
