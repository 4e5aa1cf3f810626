#include "dmnbot/expr.hpp"

#include <cctype>
#include <charconv>

#include "dmnbot/errors.hpp"

namespace dmnbot {

std::string_view to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "=";
}

ExprPtr Expr::make_literal(Value v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Literal;
    e->literal = std::move(v);
    return e;
}

ExprPtr Expr::make_var(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->name = normalize_name(name);
    return e;
}

ExprPtr Expr::make_if(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::If;
    e->operands = {std::move(cond), std::move(then_branch), std::move(else_branch)};
    return e;
}

ExprPtr Expr::make_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Cmp;
    e->op = op;
    e->operands = {std::move(lhs), std::move(rhs)};
    return e;
}

ExprPtr Expr::make_bool(Kind kind, std::vector<ExprPtr> operands) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->operands = std::move(operands);
    return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || a->operands.size() != b->operands.size()) return false;
    switch (a->kind) {
        case Expr::Kind::Literal:
            if (a->literal.kind() != b->literal.kind() || !(a->literal == b->literal)) return false;
            break;
        case Expr::Kind::Var:
            if (a->name != b->name) return false;
            break;
        case Expr::Kind::Cmp:
            if (a->op != b->op) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a->operands.size(); ++i) {
        if (!expr_equal(a->operands[i], b->operands[i])) return false;
    }
    return true;
}

namespace {

struct Token {
    enum class Type { End, Ident, String, Number, Op, LParen, RParen } type = Type::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.pos = i_;
            if (i_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[i_];
            if (c == '"') {
                t.type = Token::Type::String;
                ++i_;
                while (i_ < src_.size() && src_[i_] != '"') {
                    if (src_[i_] == '\\' && i_ + 1 < src_.size()) ++i_;
                    t.text.push_back(src_[i_++]);
                }
                if (i_ >= src_.size()) throw ParseError("unterminated string literal at offset " + std::to_string(t.pos));
                ++i_;
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])) &&
                        (out.empty() || out.back().type == Token::Type::Op || out.back().type == Token::Type::LParen))) {
                t.type = Token::Type::Number;
                t.text.push_back(src_[i_++]);
                while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) {
                    t.text.push_back(src_[i_++]);
                }
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.type = Token::Type::Ident;
                while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) {
                    t.text.push_back(src_[i_++]);
                }
            } else if (c == '(') {
                t.type = Token::Type::LParen;
                ++i_;
            } else if (c == ')') {
                t.type = Token::Type::RParen;
                ++i_;
            } else if (c == '=' || c == '<' || c == '>' || c == '!') {
                t.type = Token::Type::Op;
                t.text.push_back(src_[i_++]);
                if (i_ < src_.size() && src_[i_] == '=') t.text.push_back(src_[i_++]);
                if (t.text == "!") throw ParseError("unexpected '!' at offset " + std::to_string(t.pos));
            } else {
                throw ParseError(std::string("unexpected character '") + c + "' at offset " + std::to_string(t.pos));
            }
            out.push_back(std::move(t));
        }
    }

private:
    void skip_space() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ExprPtr parse() {
        auto e = expr();
        if (peek().type != Token::Type::End) fail("trailing input");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }

    bool is_keyword(std::string_view kw) const {
        return peek().type == Token::Type::Ident && peek().text == kw;
    }

    void expect_keyword(std::string_view kw) {
        if (!is_keyword(kw)) fail("expected '" + std::string(kw) + "'");
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at offset " + std::to_string(peek().pos));
    }

    ExprPtr expr() {
        if (is_keyword("if")) {
            ++pos_;
            auto c = expr();
            expect_keyword("then");
            auto t = expr();
            expect_keyword("else");
            auto e = expr();
            return Expr::make_if(std::move(c), std::move(t), std::move(e));
        }
        return or_expr();
    }

    ExprPtr or_expr() {
        std::vector<ExprPtr> ops{and_expr()};
        while (is_keyword("or")) {
            ++pos_;
            ops.push_back(and_expr());
        }
        return ops.size() == 1 ? ops.front() : Expr::make_bool(Expr::Kind::Or, std::move(ops));
    }

    ExprPtr and_expr() {
        std::vector<ExprPtr> ops{not_expr()};
        while (is_keyword("and")) {
            ++pos_;
            ops.push_back(not_expr());
        }
        return ops.size() == 1 ? ops.front() : Expr::make_bool(Expr::Kind::And, std::move(ops));
    }

    ExprPtr not_expr() {
        if (is_keyword("not")) {
            ++pos_;
            return Expr::make_bool(Expr::Kind::Not, {not_expr()});
        }
        return cmp();
    }

    ExprPtr cmp() {
        auto lhs = primary();
        if (peek().type == Token::Type::Op) {
            auto op_text = take().text;
            CmpOp op = CmpOp::Eq;
            if (op_text == "=" || op_text == "==") op = CmpOp::Eq;
            else if (op_text == "!=") op = CmpOp::Ne;
            else if (op_text == "<") op = CmpOp::Lt;
            else if (op_text == "<=") op = CmpOp::Le;
            else if (op_text == ">") op = CmpOp::Gt;
            else if (op_text == ">=") op = CmpOp::Ge;
            else fail("unknown operator " + op_text);
            auto rhs = primary();
            return Expr::make_cmp(op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.type) {
            case Token::Type::LParen: {
                ++pos_;
                auto e = expr();
                if (peek().type != Token::Type::RParen) fail("expected ')'");
                ++pos_;
                return e;
            }
            case Token::Type::String: return Expr::make_literal(Value::string(take().text));
            case Token::Type::Number: {
                auto v = parse_literal(take().text);
                if (!v) fail("bad number");
                return Expr::make_literal(*v);
            }
            case Token::Type::Ident: {
                if (t.text == "true" || t.text == "false") {
                    return Expr::make_literal(Value::boolean(take().text == "true"));
                }
                if (t.text == "if" || t.text == "then" || t.text == "else" || t.text == "and" || t.text == "or") {
                    fail("unexpected keyword '" + t.text + "'");
                }
                return Expr::make_var(take().text);
            }
            default: fail("expected a value");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

bool is_atomic(const ExprPtr& e) {
    return e->kind == Expr::Kind::Literal || e->kind == Expr::Kind::Var;
}

std::string wrap(const ExprPtr& e, bool allow_cmp) {
    if (is_atomic(e) || (allow_cmp && e->kind == Expr::Kind::Cmp)) return print_expression(e);
    return "(" + print_expression(e) + ")";
}

void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
    if (e->kind == Expr::Kind::Var) {
        for (const auto& n : out) if (n == e->name) return;
        out.push_back(e->name);
    }
    for (const auto& op : e->operands) collect_vars(op, out);
}

bool as_bool(const Value& v, std::string_view where) {
    if (!v.is_boolean()) throw TypeError(std::string(where) + " expects a boolean, got " + v.literal());
    return v.as_boolean();
}

}  // namespace

ExprPtr parse_expression(std::string_view text) {
    return Parser(Lexer(text).run()).parse();
}

std::string print_expression(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Literal: return e->literal.literal();
        case Expr::Kind::Var: return e->name;
        case Expr::Kind::If:
            return "if " + wrap(e->operands[0], true) + " then " + wrap(e->operands[1], true) + " else " +
                   (e->operands[2]->kind == Expr::Kind::If ? print_expression(e->operands[2])
                                                            : wrap(e->operands[2], true));
        case Expr::Kind::Cmp:
            return wrap(e->operands[0], false) + " " + std::string(to_string(e->op)) + " " +
                   wrap(e->operands[1], false);
        case Expr::Kind::And:
        case Expr::Kind::Or: {
            std::string out;
            for (std::size_t i = 0; i < e->operands.size(); ++i) {
                if (i) out += e->kind == Expr::Kind::And ? " and " : " or ";
                out += wrap(e->operands[i], true);
            }
            return out;
        }
        case Expr::Kind::Not: return "not " + wrap(e->operands[0], false);
    }
    return {};
}

std::vector<std::string> free_variables(const ExprPtr& e) {
    std::vector<std::string> out;
    collect_vars(e, out);
    return out;
}

Value evaluate_expression(const ExprPtr& e, const VarLookup& lookup) {
    switch (e->kind) {
        case Expr::Kind::Literal: return e->literal;
        case Expr::Kind::Var: {
            auto v = lookup(e->name);
            if (!v) throw MissingBinding("no value bound for '" + e->name + "'");
            return *v;
        }
        case Expr::Kind::If:
            return as_bool(evaluate_expression(e->operands[0], lookup), "if condition")
                       ? evaluate_expression(e->operands[1], lookup)
                       : evaluate_expression(e->operands[2], lookup);
        case Expr::Kind::Cmp: {
            Value l = evaluate_expression(e->operands[0], lookup);
            Value r = evaluate_expression(e->operands[1], lookup);
            if (l.kind() != r.kind()) {
                throw TypeError("cannot compare " + l.literal() + " with " + r.literal());
            }
            if (e->op == CmpOp::Eq) return Value::boolean(l == r);
            if (e->op == CmpOp::Ne) return Value::boolean(!(l == r));
            if (!l.is_number()) throw TypeError("ordering comparison needs numbers, got " + l.literal());
            double a = l.as_number(), b = r.as_number();
            switch (e->op) {
                case CmpOp::Lt: return Value::boolean(a < b);
                case CmpOp::Le: return Value::boolean(a <= b);
                case CmpOp::Gt: return Value::boolean(a > b);
                case CmpOp::Ge: return Value::boolean(a >= b);
                default: break;
            }
            return Value::boolean(false);
        }
        case Expr::Kind::And:
            for (const auto& op : e->operands) {
                if (!as_bool(evaluate_expression(op, lookup), "and")) return Value::boolean(false);
            }
            return Value::boolean(true);
        case Expr::Kind::Or:
            for (const auto& op : e->operands) {
                if (as_bool(evaluate_expression(op, lookup), "or")) return Value::boolean(true);
            }
            return Value::boolean(false);
        case Expr::Kind::Not:
            return Value::boolean(!as_bool(evaluate_expression(e->operands[0], lookup), "not"));
    }
    return {};
}

std::optional<TypeRef> infer_type(const ExprPtr& e, const TypeLookup& lookup) {
    auto boolean_operand = [&](const ExprPtr& op) {
        auto t = infer_type(op, lookup);
        if (t && *t != TypeRef::Boolean) throw TypeError("expected a boolean operand in '" + print_expression(e) + "'");
    };
    switch (e->kind) {
        case Expr::Kind::Literal: return e->literal.type();
        case Expr::Kind::Var: return lookup(e->name);
        case Expr::Kind::If: {
            boolean_operand(e->operands[0]);
            auto a = infer_type(e->operands[1], lookup);
            auto b = infer_type(e->operands[2], lookup);
            if (!a || !b) return a ? a : b;
            if (*a == *b) return a;
            if (is_numeric(*a) && is_numeric(*b)) {
                return (*a == TypeRef::Double || *b == TypeRef::Double) ? TypeRef::Double : TypeRef::Integer;
            }
            throw TypeError("branches of '" + print_expression(e) + "' have different types");
        }
        case Expr::Kind::Cmp: {
            auto a = infer_type(e->operands[0], lookup);
            auto b = infer_type(e->operands[1], lookup);
            if (a && b) {
                bool compatible = *a == *b || (is_numeric(*a) && is_numeric(*b));
                if (!compatible) throw TypeError("'" + print_expression(e) + "' compares different types");
                if (e->op != CmpOp::Eq && e->op != CmpOp::Ne && !is_numeric(*a)) {
                    throw TypeError("'" + print_expression(e) + "' orders non-numeric values");
                }
            }
            return TypeRef::Boolean;
        }
        case Expr::Kind::And:
        case Expr::Kind::Or:
        case Expr::Kind::Not:
            for (const auto& op : e->operands) boolean_operand(op);
            return TypeRef::Boolean;
    }
    return std::nullopt;
}

}  // namespace dmnbot
