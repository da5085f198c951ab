#include "jetcalc/expr.hpp"

#include <cctype>

#include "jetcalc/errors.hpp"

namespace jetcalc {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const JetContext& ctx) : text_(text), ctx_(ctx) {}

  ExprPtr parseAll() {
    skipSpace();
    if (pos_ == text_.size()) throw SyntaxError("empty expression", pos_);
    auto e = parseSum();
    skipSpace();
    if (pos_ != text_.size()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  using Node = ExprNode;

  static ExprPtr make(Node::Kind k, std::size_t pos, std::vector<ExprPtr> children = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->position = pos;
    n->children = std::move(children);
    return n;
  }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parseSum() {
    auto lhs = parseProduct();
    for (;;) {
      skipSpace();
      const std::size_t at = pos_;
      if (accept('+'))
        lhs = make(Node::Kind::Add, at, {lhs, parseProduct()});
      else if (accept('-'))
        lhs = make(Node::Kind::Sub, at, {lhs, parseProduct()});
      else
        return lhs;
    }
  }

  ExprPtr parseProduct() {
    auto lhs = parseUnary();
    for (;;) {
      skipSpace();
      const std::size_t at = pos_;
      if (accept('*'))
        lhs = make(Node::Kind::Mul, at, {lhs, parseUnary()});
      else if (accept('/'))
        lhs = make(Node::Kind::Div, at, {lhs, parseUnary()});
      else
        return lhs;
    }
  }

  ExprPtr parseUnary() {
    skipSpace();
    const std::size_t at = pos_;
    if (accept('-')) return make(Node::Kind::Neg, at, {parseUnary()});
    if (accept('+')) return parseUnary();
    return parsePower();
  }

  ExprPtr parsePower() {
    auto base = parseAtom();
    skipSpace();
    const std::size_t at = pos_;
    if (accept('^')) {
      skipSpace();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) throw SyntaxError("expected a nonnegative integer exponent", pos_);
      if (pos_ - start > 6) throw SyntaxError("exponent too large", start);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Pow;
      n->position = at;
      n->exponent = static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
      n->children = {base};
      return n;
    }
    return base;
  }

  std::string_view readSubscript() {
    // Called just after '_'.
    if (pos_ < text_.size() && text_[pos_] == '{') {
      const std::size_t open = pos_++;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '}') ++pos_;
      if (pos_ == text_.size()) throw SyntaxError("unterminated '{' in subscript", open);
      auto s = text_.substr(start, pos_ - start);
      ++pos_;
      return s;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError("empty subscript", pos_);
    return text_.substr(start, pos_ - start);
  }

  ExprPtr parseAtom() {
    skipSpace();
    const std::size_t at = pos_;
    if (pos_ == text_.size()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parseSum();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      auto n = make(Node::Kind::Number, at);
      std::const_pointer_cast<Node>(n)->number = Rational::parse(text_.substr(at, pos_ - at));
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view id = text_.substr(at, pos_ - at);
      std::string_view sub;
      bool hasSub = false;
      if (pos_ < text_.size() && text_[pos_] == '_') {
        ++pos_;
        sub = readSubscript();
        hasSub = true;
      }
      if (id == "D") {
        if (!hasSub) throw SyntaxError("'D' must carry a subscript, e.g. D_x", at);
        auto sigma = ctx_.parseSubscript(sub);
        if (!sigma) throw UnknownIdentifier(std::string(id) + "_" + std::string(sub), at);
        auto n = make(Node::Kind::Derivative, at);
        std::const_pointer_cast<Node>(n)->sigma = *sigma;
        return n;
      }
      auto v = ctx_.resolve(id);
      if (!v) throw UnknownIdentifier(std::string(id), at);
      if (hasSub) {
        if (!v->isJetLike())
          throw SyntaxError("'" + std::string(id) + "' does not take a derivative subscript", at);
        auto sigma = ctx_.parseSubscript(sub);
        if (!sigma) throw UnknownIdentifier(std::string(id) + "_" + std::string(sub), at);
        v->sigma = *sigma;
      }
      auto n = make(Node::Kind::Variable, at);
      std::const_pointer_cast<Node>(n)->var = *v;
      return n;
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  const JetContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

bool ExprNode::containsDerivative() const {
  if (kind == Kind::Derivative) return true;
  for (const auto& c : children)
    if (c->containsDerivative()) return true;
  return false;
}

ExprPtr parseExpression(std::string_view text, const JetContext& ctx) { return Parser(text, ctx).parseAll(); }

DiffPoly evaluatePoly(const ExprNode& node) {
  using K = ExprNode::Kind;
  switch (node.kind) {
    case K::Number:
      return DiffPoly(node.number);
    case K::Variable:
      return DiffPoly::variable(node.var);
    case K::Derivative:
      throw SyntaxError("total-derivative operator in a scalar expression", node.position);
    case K::Add:
      return evaluatePoly(*node.children[0]) + evaluatePoly(*node.children[1]);
    case K::Sub:
      return evaluatePoly(*node.children[0]) - evaluatePoly(*node.children[1]);
    case K::Mul:
      return evaluatePoly(*node.children[0]) * evaluatePoly(*node.children[1]);
    case K::Div: {
      DiffPoly d = evaluatePoly(*node.children[1]);
      if (!d.isConstant()) throw SyntaxError("division is only allowed by nonzero rational constants", node.position);
      if (d.isZero()) throw SyntaxError("division by zero", node.position);
      return evaluatePoly(*node.children[0]).scaled(Rational(1) / d.constantTerm());
    }
    case K::Neg:
      return -evaluatePoly(*node.children[0]);
    case K::Pow:
      return evaluatePoly(*node.children[0]).pow(node.exponent);
  }
  return {};
}

DiffPoly parsePoly(std::string_view text, const JetContext& ctx) { return evaluatePoly(*parseExpression(text, ctx)); }

std::vector<std::string> splitTopLevel(std::string_view text, char separator) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == separator && depth == 0) {
      out.push_back(current);
      current.clear();
      continue;
    }
    current += c;
  }
  out.push_back(current);
  return out;
}

}  // namespace jetcalc
