#include "levyou/coeffexpr.hpp"

#include "levyou/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace levyou {

struct CoeffExpr::Node {
    Kind kind = Kind::Number;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const CoeffExpr::Node>;
using Kind = CoeffExpr::Kind;

NodePtr make_leaf(Kind kind, double value = 0.0) {
    auto n = std::make_shared<CoeffExpr::Node>();
    n->kind = kind;
    n->value = value;
    return n;
}

NodePtr make_node(Kind kind, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<CoeffExpr::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ == src_.size()) {
            throw SyntaxError("empty expression", pos_);
        }
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') {
                throw SyntaxError("unbalanced ')'", pos_);
            }
            throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        }
        return root;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                src_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(Kind::Add, lhs, operand_after("+"));
            } else if (accept('-')) {
                lhs = make_node(Kind::Sub, lhs, operand_after("-"));
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(Kind::Mul, lhs, unary_after("*"));
            } else if (accept('/')) {
                lhs = make_node(Kind::Div, lhs, unary_after("/"));
            } else {
                return lhs;
            }
        }
    }

    NodePtr operand_after(const char* op) {
        require_operand(op);
        return parse_term();
    }

    NodePtr unary_after(const char* op) {
        require_operand(op);
        return parse_unary();
    }

    void require_operand(const char* op) {
        skip_ws();
        if (pos_ == src_.size() || src_[pos_] == ')') {
            throw SyntaxError(std::string("dangling operator '") + op + "'", pos_);
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) {
            require_operand("-");
            return make_node(Kind::Negate, parse_unary());
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ == src_.size()) {
            throw SyntaxError("unexpected end of expression", pos_);
        }
        const char c = src_[pos_];
        if (c == '(') {
            const std::size_t open = pos_;
            ++pos_;
            require_operand("(");
            NodePtr inner = parse_expr();
            if (!accept(')')) {
                throw SyntaxError("unbalanced '('", open);
            }
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') {
            return parse_number();
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            return parse_identifier();
        }
        throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        double value = 0.0;
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
        if (ec == std::errc::result_out_of_range) {
            throw SyntaxError("numeric literal out of range", start);
        }
        if (ec != std::errc() || ptr == first) {
            throw SyntaxError("malformed number", start);
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        return make_leaf(Kind::Number, value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            const bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                              (c >= '0' && c <= '9') || c == '_';
            if (!word) {
                break;
            }
            ++pos_;
        }
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "t") {
            return make_leaf(Kind::Time);
        }
        Kind fn;
        if (name == "sin") {
            fn = Kind::Sin;
        } else if (name == "cos") {
            fn = Kind::Cos;
        } else if (name == "exp") {
            fn = Kind::Exp;
        } else if (name == "abs") {
            fn = Kind::Abs;
        } else {
            throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
        }
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != '(') {
            throw SyntaxError("expected '(' after " + std::string(name), pos_);
        }
        const std::size_t open = pos_;
        ++pos_;
        require_operand("(");
        NodePtr arg = parse_expr();
        if (!accept(')')) {
            throw SyntaxError("unbalanced '('", open);
        }
        return make_node(fn, std::move(arg));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw EvalError(std::string("non-finite result in ") + what);
    }
    return v;
}

double eval_node(const CoeffExpr::Node& n, double t) {
    switch (n.kind) {
        case Kind::Number:
            return n.value;
        case Kind::Time:
            return t;
        case Kind::Negate:
            return -eval_node(*n.lhs, t);
        case Kind::Add:
            return checked(eval_node(*n.lhs, t) + eval_node(*n.rhs, t), "'+'");
        case Kind::Sub:
            return checked(eval_node(*n.lhs, t) - eval_node(*n.rhs, t), "'-'");
        case Kind::Mul:
            return checked(eval_node(*n.lhs, t) * eval_node(*n.rhs, t), "'*'");
        case Kind::Div: {
            const double num = eval_node(*n.lhs, t);
            const double den = eval_node(*n.rhs, t);
            if (den == 0.0) {
                throw EvalError("division by zero at t=" + std::to_string(t));
            }
            return checked(num / den, "'/'");
        }
        case Kind::Sin:
            return std::sin(eval_node(*n.lhs, t));
        case Kind::Cos:
            return std::cos(eval_node(*n.lhs, t));
        case Kind::Exp:
            return checked(std::exp(eval_node(*n.lhs, t)), "exp");
        case Kind::Abs:
            return std::fabs(eval_node(*n.lhs, t));
    }
    return 0.0;
}

int precedence(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub:
            return 1;
        case Kind::Mul:
        case Kind::Div:
            return 2;
        case Kind::Negate:
            return 3;
        default:
            return 4;
    }
}

void render(const CoeffExpr::Node& n, std::ostringstream& out);

void render_child(const CoeffExpr::Node& child, bool parens, std::ostringstream& out) {
    if (parens) {
        out << '(';
    }
    render(child, out);
    if (parens) {
        out << ')';
    }
}

void render(const CoeffExpr::Node& n, std::ostringstream& out) {
    switch (n.kind) {
        case Kind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out << buf;
            return;
        }
        case Kind::Time:
            out << 't';
            return;
        case Kind::Negate:
            out << '-';
            render_child(*n.lhs, precedence(n.lhs->kind) < precedence(Kind::Negate), out);
            return;
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp:
        case Kind::Abs: {
            const char* name = n.kind == Kind::Sin   ? "sin"
                               : n.kind == Kind::Cos ? "cos"
                               : n.kind == Kind::Exp ? "exp"
                                                     : "abs";
            out << name << '(';
            render(*n.lhs, out);
            out << ')';
            return;
        }
        default:
            break;
    }
    const int p = precedence(n.kind);
    const char op = n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-' : n.kind == Kind::Mul ? '*' : '/';
    render_child(*n.lhs, precedence(n.lhs->kind) < p, out);
    out << ' ' << op << ' ';
    render_child(*n.rhs, precedence(n.rhs->kind) <= p, out);
}

bool same_tree(const CoeffExpr::Node* a, const CoeffExpr::Node* b) {
    if (a == b) {
        return true;
    }
    if (a == nullptr || b == nullptr || a->kind != b->kind) {
        return false;
    }
    if (a->kind == Kind::Number) {
        return a->value == b->value;
    }
    return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
}

bool mentions_time(const CoeffExpr::Node* n) {
    if (n == nullptr) {
        return false;
    }
    if (n->kind == Kind::Time) {
        return true;
    }
    return mentions_time(n->lhs.get()) || mentions_time(n->rhs.get());
}

}  // namespace

CoeffExpr::CoeffExpr() : root_(make_leaf(Kind::Number, 0.0)) {}

CoeffExpr::CoeffExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

CoeffExpr CoeffExpr::parse(std::string_view src) { return CoeffExpr(Parser(src).parse()); }

CoeffExpr CoeffExpr::constant(double value) {
    if (value < 0.0) {
        return CoeffExpr(make_node(Kind::Negate, make_leaf(Kind::Number, -value)));
    }
    return CoeffExpr(make_leaf(Kind::Number, value));
}

CoeffExpr CoeffExpr::time() { return CoeffExpr(make_leaf(Kind::Time)); }

double CoeffExpr::operator()(double t) const { return eval_node(*root_, t); }

std::string CoeffExpr::to_string() const {
    std::ostringstream out;
    render(*root_, out);
    return out.str();
}

CoeffExpr::Kind CoeffExpr::kind() const noexcept { return root_->kind; }

bool CoeffExpr::is_constant() const noexcept { return !mentions_time(root_.get()); }

bool operator==(const CoeffExpr& a, const CoeffExpr& b) {
    return same_tree(a.root_.get(), b.root_.get());
}

CoeffExpr operator+(const CoeffExpr& a, const CoeffExpr& b) {
    return CoeffExpr(make_node(Kind::Add, a.root_, b.root_));
}
CoeffExpr operator-(const CoeffExpr& a, const CoeffExpr& b) {
    return CoeffExpr(make_node(Kind::Sub, a.root_, b.root_));
}
CoeffExpr operator*(const CoeffExpr& a, const CoeffExpr& b) {
    return CoeffExpr(make_node(Kind::Mul, a.root_, b.root_));
}
CoeffExpr operator/(const CoeffExpr& a, const CoeffExpr& b) {
    return CoeffExpr(make_node(Kind::Div, a.root_, b.root_));
}
CoeffExpr operator-(const CoeffExpr& a) { return CoeffExpr(make_node(Kind::Negate, a.root_)); }

CoeffExpr parse_expr(std::string_view src) { return CoeffExpr::parse(src); }

double eval_expr(const CoeffExpr& e, double t) {
    if (!std::isfinite(t)) {
        throw DomainError("expression evaluated at non-finite t");
    }
    return e(t);
}

// --- MatrixFn ---------------------------------------------------------------

MatrixFn::MatrixFn(std::size_t dim, std::vector<CoeffExpr> row_major)
    : dim_(dim), entries_(std::move(row_major)) {
    if (dim_ == 0 || entries_.size() != dim_ * dim_) {
        throw DomainError("matrix function needs dim*dim entries with dim > 0");
    }
}

MatrixFn MatrixFn::parse(const std::vector<std::vector<std::string>>& rows) {
    const std::size_t d = rows.size();
    std::vector<CoeffExpr> entries;
    entries.reserve(d * d);
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw DomainError("matrix function rows must have " + std::to_string(d) + " entries");
        }
        for (const auto& src : row) {
            entries.push_back(CoeffExpr::parse(src));
        }
    }
    return MatrixFn(d, std::move(entries));
}

MatrixFn MatrixFn::constant(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DomainError("matrix function must be square");
    }
    const auto d = static_cast<std::size_t>(m.rows());
    std::vector<CoeffExpr> entries;
    entries.reserve(d * d);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            entries.push_back(CoeffExpr::constant(m(i, j)));
        }
    }
    return MatrixFn(d, std::move(entries));
}

MatrixFn MatrixFn::scalar(const CoeffExpr& e) { return MatrixFn(1, {e}); }

bool MatrixFn::is_constant() const noexcept {
    for (const auto& e : entries_) {
        if (!e.is_constant()) {
            return false;
        }
    }
    return true;
}

Matrix MatrixFn::operator()(double t) const {
    Matrix m(dim_, dim_);
    evaluate_into(t, m.data());
    return m;
}

void MatrixFn::evaluate_into(double t, double* out) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            out[j * dim_ + i] = entries_[i * dim_ + j](t);
        }
    }
}

// --- VectorFn ---------------------------------------------------------------

VectorFn::VectorFn(std::vector<CoeffExpr> entries) : entries_(std::move(entries)) {}

VectorFn VectorFn::parse(const std::vector<std::string>& entries) {
    std::vector<CoeffExpr> parsed;
    parsed.reserve(entries.size());
    for (const auto& src : entries) {
        parsed.push_back(CoeffExpr::parse(src));
    }
    return VectorFn(std::move(parsed));
}

VectorFn VectorFn::constant(const Vector& v) {
    std::vector<CoeffExpr> entries;
    entries.reserve(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        entries.push_back(CoeffExpr::constant(v(i)));
    }
    return VectorFn(std::move(entries));
}

bool VectorFn::is_zero() const noexcept {
    for (const auto& e : entries_) {
        if (!(e == CoeffExpr::constant(0.0))) {
            return false;
        }
    }
    return true;
}

Vector VectorFn::operator()(double t) const {
    Vector v(static_cast<Eigen::Index>(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = entries_[i](t);
    }
    return v;
}

// --- boundedness probe ------------------------------------------------------

namespace {

template <class Fn>
std::optional<std::string> probe(Fn&& sup_at, const char* label, double t0, double t1,
                                 std::size_t n, double bound) {
    if (n < 2) {
        n = 2;
    }
    double worst = 0.0;
    double worst_t = t0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
        const double v = sup_at(t);
        if (v > worst) {
            worst = v;
            worst_t = t;
        }
    }
    if (worst > bound) {
        std::ostringstream msg;
        msg << label << " reaches |entry| = " << worst << " at t = " << worst_t
            << ", above the boundedness probe limit " << bound;
        return msg.str();
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> probe_bound(const MatrixFn& m, double t0, double t1, std::size_t n,
                                       double bound) {
    return probe([&](double t) { return m(t).cwiseAbs().maxCoeff(); }, "matrix coefficient", t0,
                 t1, n, bound);
}

std::optional<std::string> probe_bound(const VectorFn& v, double t0, double t1, std::size_t n,
                                       double bound) {
    if (v.dim() == 0) {
        return std::nullopt;
    }
    return probe([&](double t) { return v(t).cwiseAbs().maxCoeff(); }, "vector coefficient", t0,
                 t1, n, bound);
}

}  // namespace levyou
