#include "scenegen/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "scenegen/error.hpp"
#include "scenegen/util.hpp"

namespace scenegen::dsl {

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "at",    "offset", "by",   "facing", "left",  "right",   "ahead",     "behind",
    "of",    "in",     "with", "deg",    "True",  "False",   "Range",     "Uniform",
    "Workspace", "RectangularRegion", "create_room"};

const std::set<std::string, std::less<>> kWithProperties = {"allowCollisions", "z", "width", "length"};
const std::set<std::string, std::less<>> kSettableProperties = {"allowCollisions", "z"};

}  // namespace

std::string_view to_string(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Keyword: return "keyword";
    case Tok::Eq: return "'='";
    case Tok::At: return "'@'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Dot: return "'.'";
    case Tok::Newline: return "end of line";
  }
  return "?";
}

bool is_keyword(std::string_view word) { return kKeywords.count(word) > 0; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, depth = 0, i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::string tok_text, SourcePos pos, double number = 0) {
    out.push_back(Token{kind, std::move(tok_text), number, pos});
  };

  while (i < text.size()) {
    const char c = text[i];
    const SourcePos pos{line, col};
    if (c == '\n') {
      if (depth == 0 && !out.empty() && out.back().kind != Tok::Newline) push(Tok::Newline, "\n", pos);
      advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const bool prev_ident = !out.empty() && (out.back().kind == Tok::Ident || out.back().kind == Tok::RParen);
    const bool digit = std::isdigit(static_cast<unsigned char>(c)) != 0;
    const bool leading_dot = c == '.' && !prev_ident && i + 1 < text.size() &&
                             std::isdigit(static_cast<unsigned char>(text[i + 1]));
    if (digit || leading_dot) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      std::string lexeme(text.substr(i, j - i));
      auto value = parse_number(lexeme);
      if (!value) throw ParseError(pos.line, pos.column, "malformed number '" + lexeme + "'");
      push(Tok::Number, lexeme, pos, *value);
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string word(text.substr(i, j - i));
      push(is_keyword(word) ? Tok::Keyword : Tok::Ident, word, pos);
      advance(j - i);
      continue;
    }
    if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != c && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != c) throw ParseError(pos.line, pos.column, "unterminated string");
      push(Tok::String, std::string(text.substr(i + 1, j - i - 1)), pos);
      advance(j + 1 - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '=': kind = Tok::Eq; break;
      case '@': kind = Tok::At; break;
      case '(': kind = Tok::LParen; ++depth; break;
      case ')':
        kind = Tok::RParen;
        if (depth > 0) --depth;
        break;
      case ',': kind = Tok::Comma; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '.': kind = Tok::Dot; break;
      default: {
        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + hex64(static_cast<unsigned char>(c)).substr(14);
        throw ParseError(pos.line, pos.column, "illegal character '" + shown + "'");
      }
    }
    push(kind, std::string(1, c), pos);
    advance(1);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<Attr> attr_from_string(std::string_view name) {
  if (name == "position") return Attr::Position;
  if (name == "heading") return Attr::Heading;
  if (name == "width") return Attr::Width;
  if (name == "length") return Attr::Length;
  if (name == "height") return Attr::Height;
  if (name == "z") return Attr::Z;
  return std::nullopt;
}

std::string_view to_string(Attr attr) {
  switch (attr) {
    case Attr::Position: return "position";
    case Attr::Heading: return "heading";
    case Attr::Width: return "width";
    case Attr::Length: return "length";
    case Attr::Height: return "height";
    case Attr::Z: return "z";
  }
  return "?";
}

bool is_position_specifier(SpecKind kind) {
  return kind != SpecKind::Facing && kind != SpecKind::With;
}

bool valid_sides(std::string_view sides) {
  if (sides.empty()) return false;
  std::set<char> seen;
  for (char c : sides) {
    if (kWallSides.find(c) == std::string_view::npos || !seen.insert(c).second) return false;
  }
  return true;
}

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, expr::Num>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, expr::Bool>) return x.value == y.value;
        else if constexpr (std::is_same_v<T, expr::Point>) return same(x.x, y.x) && same(x.y, y.y);
        else if constexpr (std::is_same_v<T, expr::Range>) return same(x.lo, y.lo) && same(x.hi, y.hi);
        else if constexpr (std::is_same_v<T, expr::Uniform>) {
          return std::equal(x.options.begin(), x.options.end(), y.options.begin(), y.options.end(),
                            [](const ExprPtr& p, const ExprPtr& q) { return same(p, q); });
        } else if constexpr (std::is_same_v<T, expr::Deg>) return same(x.inner, y.inner);
        else if constexpr (std::is_same_v<T, expr::Binary>) return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
        else if constexpr (std::is_same_v<T, expr::Neg>) return same(x.inner, y.inner);
        else if constexpr (std::is_same_v<T, expr::Var>) return x.name == y.name;
        else if constexpr (std::is_same_v<T, expr::AttrRef>) return x.object == y.object && x.attr == y.attr;
        else if constexpr (std::is_same_v<T, expr::Region>) {
          return same(x.center, y.center) && same(x.heading, y.heading) && same(x.width, y.width) &&
                 same(x.length, y.length);
        }
      },
      a->node);
}

namespace {

bool same_spec(const Specifier& a, const Specifier& b) {
  return a.kind == b.kind && same(a.value, b.value) && a.operand.object == b.operand.object &&
         same(a.operand.point, b.operand.point) && a.name == b.name;
}

bool same_stmt(const Statement& a, const Statement& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, stmt::Assign>) return x.name == y.name && same(x.value, y.value);
        else if constexpr (std::is_same_v<T, stmt::Instance>) {
          return x.name == y.name && x.internal_name == y.internal_name && x.type_name == y.type_name &&
                 std::equal(x.specifiers.begin(), x.specifiers.end(), y.specifiers.begin(),
                            y.specifiers.end(), same_spec);
        } else if constexpr (std::is_same_v<T, stmt::Workspace>) return same(x.region, y.region);
        else if constexpr (std::is_same_v<T, stmt::PropertySet>) {
          return x.object == y.object && x.property == y.property && same(x.value, y.value);
        } else if constexpr (std::is_same_v<T, stmt::CreateRoom>) {
          return same(x.length, y.length) && same(x.width, y.width) && same(x.x, y.x) && same(x.y, y.y) &&
                 x.sides == y.sides;
        }
      },
      a.node);
}

}  // namespace

bool operator==(const ScenarioAst& a, const ScenarioAst& b) {
  return std::equal(a.statements.begin(), a.statements.end(), b.statements.begin(), b.statements.end(),
                    same_stmt);
}

TypeResolver exact_types(std::vector<std::string> names) {
  return [names = std::move(names)](std::string_view n) -> std::optional<std::string> {
    for (const auto& t : names) {
      if (t == n) return t;
    }
    return std::nullopt;
  };
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class NameKind { Value, Region, Object };

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, const TypeResolver& types) : toks_(tokens), types_(types) {
    if (!toks_.empty()) {
      const Token& last = toks_.back();
      end_pos_ = SourcePos{last.pos.line, last.pos.column + last.text.size()};
      if (last.kind == Tok::Newline) end_pos_ = last.pos;
    }
  }

  ScenarioAst run() {
    ScenarioAst ast;
    while (!at_end()) {
      if (check(Tok::Newline)) {
        ++i_;
        continue;
      }
      ast.statements.push_back(statement());
      if (!at_end()) expect(Tok::Newline, "end of statement");
    }
    return ast;
  }

 private:
  // --- token helpers -----------------------------------------------------
  bool at_end() const { return i_ >= toks_.size(); }
  const Token* peek(std::size_t ahead = 0) const {
    return i_ + ahead < toks_.size() ? &toks_[i_ + ahead] : nullptr;
  }
  bool check(Tok kind, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->kind == kind;
  }
  bool check_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->kind == Tok::Keyword && t->text == kw;
  }
  SourcePos pos() const { return at_end() ? end_pos_ : toks_[i_].pos; }

  [[noreturn]] void fail(const std::string& msg) const {
    const SourcePos p = pos();
    throw ParseError(p.line, p.column, msg);
  }
  [[noreturn]] void fail_at(SourcePos p, const std::string& msg) const { throw ParseError(p.line, p.column, msg); }

  std::string found() const {
    if (at_end()) return "end of input";
    const Token& t = toks_[i_];
    if (t.kind == Tok::Newline) return "end of line";
    return "'" + t.text + "'";
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (!check(kind)) fail("expected " + std::string(what) + ", found " + found());
    return toks_[i_++];
  }
  void expect_kw(std::string_view kw) {
    if (!check_kw(kw)) fail("expected '" + std::string(kw) + "', found " + found());
    ++i_;
  }
  bool accept(Tok kind) {
    if (!check(kind)) return false;
    ++i_;
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!check_kw(kw)) return false;
    ++i_;
    return true;
  }

  std::optional<std::string> type_name(std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    if (!t || t->kind != Tok::Ident || names_.count(t->text)) return std::nullopt;
    return types_ ? types_(t->text) : std::nullopt;
  }

  void define(const Token& tok, NameKind kind) {
    if (types_ && types_(tok.text)) fail_at(tok.pos, "'" + tok.text + "' is a model type name");
    if (tok.text == "workspace") fail_at(tok.pos, "'workspace' is reserved");
    if (names_.count(tok.text)) fail_at(tok.pos, "'" + tok.text + "' is already defined");
    names_[tok.text] = kind;
  }

  // --- statements --------------------------------------------------------
  Statement statement() {
    const SourcePos start = pos();
    if (check_kw("create_room")) return {create_room(), start};
    const Token& first = *peek();
    if (first.kind == Tok::Ident && first.text == "workspace" && check(Tok::Eq, 1)) return {workspace(), start};
    if (first.kind == Tok::Ident && check(Tok::Dot, 1) && check(Tok::Ident, 2) && check(Tok::Eq, 3)) {
      return {property_set(), start};
    }
    if (first.kind == Tok::Ident && check(Tok::Eq, 1)) {
      if (type_name(2)) return {instance(), start};
      return {assign(), start};
    }
    if (type_name()) return {instance(), start};
    if (first.kind == Tok::Ident && !names_.count(first.text) && std::isupper(static_cast<unsigned char>(first.text[0]))) {
      fail("unknown type name '" + first.text + "'");
    }
    fail("expected a statement, found " + found());
  }

  stmt::Workspace workspace() {
    const SourcePos p = pos();
    if (workspace_defined_) fail_at(p, "workspace is already declared");
    i_ += 2;  // workspace =
    expect_kw("Workspace");
    expect(Tok::LParen, "'('");
    ExprPtr region = expression();
    expect(Tok::RParen, "')'");
    workspace_defined_ = true;
    return {region};
  }

  stmt::CreateRoom create_room() {
    expect_kw("create_room");
    expect(Tok::LParen, "'('");
    stmt::CreateRoom room;
    room.length = expression();
    expect(Tok::Comma, "','");
    room.width = expression();
    auto keyword_arg = [&](std::string_view key) -> bool {
      if (!(check(Tok::Comma) && peek(1) && peek(1)->kind == Tok::Ident && peek(1)->text == key)) return false;
      i_ += 2;
      expect(Tok::Eq, "'='");
      return true;
    };
    room.x = keyword_arg("x") ? expression() : number(0);
    room.y = keyword_arg("y") ? expression() : number(0);
    room.sides = std::string(kWallSides);
    if (keyword_arg("sides")) {
      const Token& s = expect(Tok::String, "a sides string such as 'NSWE'");
      if (!valid_sides(s.text)) {
        fail_at(s.pos, "sides must be a nonempty combination of N, S, W, E without repeats");
      }
      room.sides = s.text;
    }
    expect(Tok::RParen, "')'");
    return room;
  }

  stmt::PropertySet property_set() {
    const Token& obj = *peek();
    const Token& prop = *peek(2);
    auto it = names_.find(obj.text);
    if (it == names_.end()) fail_at(obj.pos, "'" + obj.text + "' is not defined");
    if (it->second != NameKind::Object) fail_at(obj.pos, "'" + obj.text + "' is not an object");
    if (!kSettableProperties.count(prop.text)) {
      fail_at(prop.pos, "property '" + prop.text + "' cannot be assigned (allowed: allowCollisions, z)");
    }
    i_ += 4;
    return {obj.text, prop.text, expression()};
  }

  stmt::Assign assign() {
    const Token& name = *peek();
    i_ += 2;
    ExprPtr value = expression();
    define(name, std::holds_alternative<expr::Region>(value->node) ? NameKind::Region : NameKind::Value);
    return {name.text, value};
  }

  stmt::Instance instance() {
    stmt::Instance inst;
    std::optional<Token> name_tok;
    if (check(Tok::Ident) && check(Tok::Eq, 1)) {
      name_tok = *peek();
      i_ += 2;
    }
    const Token& type_tok = *peek();
    inst.type_name = *type_name();
    ++i_;
    if (name_tok && name_tok->text == "ego") {
      if (ego_defined_) fail_at(name_tok->pos, "ego is already declared");
    }

    if (!at_end() && !check(Tok::Newline)) {
      inst.specifiers.push_back(specifier());
      while (accept(Tok::Comma)) inst.specifiers.push_back(specifier());
    }
    validate_specifiers(inst.specifiers);

    if (name_tok) {
      define(*name_tok, NameKind::Object);
      if (name_tok->text == "ego") ego_defined_ = true;
      inst.name = name_tok->text;
      inst.internal_name = name_tok->text;
    } else {
      inst.internal_name = inst.type_name + "#" + std::to_string(anonymous_[inst.type_name]++);
    }
    (void)type_tok;
    return inst;
  }

  void validate_specifiers(const std::vector<Specifier>& specs) const {
    const Specifier* position = nullptr;
    const Specifier* facing = nullptr;
    std::set<std::string> withs;
    for (const auto& s : specs) {
      if (is_position_specifier(s.kind)) {
        if (position) fail_at(s.pos, "duplicate position specifier (object already positioned)");
        position = &s;
      } else if (s.kind == SpecKind::Facing) {
        if (facing) fail_at(s.pos, "duplicate 'facing' specifier");
        facing = &s;
      } else if (!withs.insert(s.name).second) {
        fail_at(s.pos, "duplicate 'with " + s.name + "' specifier");
      }
    }
  }

  Specifier specifier() {
    Specifier s;
    s.pos = pos();
    if (accept_kw("at")) {
      s.kind = SpecKind::At;
      s.value = expression();
    } else if (accept_kw("offset")) {
      expect_kw("by");
      s.kind = SpecKind::OffsetBy;
      s.value = expression();
    } else if (accept_kw("facing")) {
      s.kind = SpecKind::Facing;
      s.value = expression();
    } else if (accept_kw("left") || check_kw("right")) {
      const bool right = accept_kw("right");
      expect_kw("of");
      s.kind = right ? SpecKind::RightOf : SpecKind::LeftOf;
      s.operand = operand();
    } else if (accept_kw("ahead")) {
      expect_kw("of");
      s.kind = SpecKind::AheadOf;
      s.operand = operand();
      if (accept_kw("by")) s.value = expression();
    } else if (accept_kw("behind")) {
      s.kind = SpecKind::Behind;
      s.operand = operand();
      if (accept_kw("by")) s.value = expression();
    } else if (accept_kw("in")) {
      s.kind = SpecKind::InRegion;
      const Token& region = expect(Tok::Ident, "a region name");
      if (region.text != "workspace") {
        auto it = names_.find(region.text);
        if (it == names_.end()) fail_at(region.pos, "region '" + region.text + "' is not defined");
        if (it->second != NameKind::Region) fail_at(region.pos, "'" + region.text + "' is not a region");
      }
      s.name = region.text;
    } else if (accept_kw("with")) {
      s.kind = SpecKind::With;
      const Token& prop = expect(Tok::Ident, "a property name");
      if (!kWithProperties.count(prop.text)) {
        fail_at(prop.pos, "unknown property '" + prop.text + "' (allowed: allowCollisions, z, width, length)");
      }
      s.name = prop.text;
      s.value = expression();
    } else {
      fail("expected a specifier (at, offset by, facing, left of, right of, ahead of, behind, in, with), found " +
           found());
    }
    return s;
  }

  Operand operand() {
    if (check(Tok::Ident) && !check(Tok::Dot, 1) && !check(Tok::At, 1)) {
      auto it = names_.find(peek()->text);
      if (it != names_.end() && it->second == NameKind::Object) {
        return Operand{toks_[i_++].text, nullptr};
      }
    }
    return Operand{std::nullopt, expression()};
  }

  // --- expressions -------------------------------------------------------
  template <typename T>
  ExprPtr make(SourcePos p, T node) {
    return std::make_shared<const Expr>(Expr{std::move(node), p});
  }
  ExprPtr number(double v) { return make(pos(), expr::Num{v}); }

  ExprPtr expression() {
    const SourcePos p = pos();
    ExprPtr lhs = arith();
    if (accept(Tok::At)) return make(p, expr::Point{lhs, arith()});
    return lhs;
  }

  ExprPtr arith() {
    ExprPtr lhs = term();
    while (check(Tok::Plus) || check(Tok::Minus)) {
      const SourcePos p = pos();
      const BinOp op = toks_[i_++].kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
      lhs = make(p, expr::Binary{op, lhs, term()});
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = postfix();
    while (check(Tok::Star) || check(Tok::Slash)) {
      const SourcePos p = pos();
      const BinOp op = toks_[i_++].kind == Tok::Star ? BinOp::Mul : BinOp::Div;
      lhs = make(p, expr::Binary{op, lhs, postfix()});
    }
    return lhs;
  }

  ExprPtr postfix() {
    ExprPtr e = unary();
    while (check_kw("deg")) {
      const SourcePos p = pos();
      ++i_;
      e = make(p, expr::Deg{e});
    }
    return e;
  }

  ExprPtr unary() {
    if (check(Tok::Minus)) {
      const SourcePos p = pos();
      ++i_;
      return make(p, expr::Neg{unary()});
    }
    return primary();
  }

  std::vector<ExprPtr> call_args(std::size_t min, std::size_t max) {
    const SourcePos p = pos();
    expect(Tok::LParen, "'('");
    std::vector<ExprPtr> args;
    if (!check(Tok::RParen)) {
      args.push_back(expression());
      while (accept(Tok::Comma)) args.push_back(expression());
    }
    expect(Tok::RParen, "')'");
    if (args.size() < min || args.size() > max) {
      fail_at(p, "expected " + (min == max ? std::to_string(min) : "at least " + std::to_string(min)) +
                     " argument(s), got " + std::to_string(args.size()));
    }
    return args;
  }

  ExprPtr primary() {
    const SourcePos p = pos();
    if (at_end()) fail("expected an expression, found end of input");
    const Token& t = toks_[i_];
    switch (t.kind) {
      case Tok::Number: ++i_; return make(p, expr::Num{t.number});
      case Tok::LParen: {
        ++i_;
        ExprPtr inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Keyword: {
        if (t.text == "True" || t.text == "False") {
          ++i_;
          return make(p, expr::Bool{t.text == "True"});
        }
        if (t.text == "Range") {
          ++i_;
          auto args = call_args(2, 2);
          return make(p, expr::Range{args[0], args[1]});
        }
        if (t.text == "Uniform") {
          ++i_;
          return make(p, expr::Uniform{call_args(1, SIZE_MAX)});
        }
        if (t.text == "RectangularRegion") {
          ++i_;
          auto args = call_args(4, 4);
          return make(p, expr::Region{args[0], args[1], args[2], args[3]});
        }
        break;
      }
      case Tok::Ident: {
        ++i_;
        if (accept(Tok::Dot)) {
          const Token& attr_tok = expect(Tok::Ident, "an attribute name");
          auto it = names_.find(t.text);
          if (it == names_.end()) fail_at(t.pos, "'" + t.text + "' is used before it is defined");
          if (it->second != NameKind::Object) fail_at(t.pos, "'" + t.text + "' is not an object");
          auto attr = attr_from_string(attr_tok.text);
          if (!attr) {
            fail_at(attr_tok.pos, "unknown attribute '" + attr_tok.text +
                                      "' (allowed: position, heading, width, length, height, z)");
          }
          return make(p, expr::AttrRef{t.text, *attr});
        }
        if (t.text == "workspace" && workspace_defined_) return make(p, expr::Var{t.text});
        if (!names_.count(t.text)) {
          if (types_ && types_(t.text)) fail_at(t.pos, "model type '" + t.text + "' cannot be used as a value");
          fail_at(t.pos, "'" + t.text + "' is used before it is defined");
        }
        return make(p, expr::Var{t.text});
      }
      default: break;
    }
    fail("expected an expression, found " + found());
  }

  const std::vector<Token>& toks_;
  const TypeResolver& types_;
  std::size_t i_ = 0;
  SourcePos end_pos_;
  std::map<std::string, NameKind, std::less<>> names_;
  std::map<std::string, int> anonymous_;
  bool ego_defined_ = false;
  bool workspace_defined_ = false;
};

// ---------------------------------------------------------------------------
// Printer

std::string_view op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

std::string print_operand(const Operand& o) { return o.object ? *o.object : print_expr(*o.point); }

std::string print_specifier(const Specifier& s) {
  switch (s.kind) {
    case SpecKind::At: return "at " + print_expr(*s.value);
    case SpecKind::OffsetBy: return "offset by " + print_expr(*s.value);
    case SpecKind::Facing: return "facing " + print_expr(*s.value);
    case SpecKind::LeftOf: return "left of " + print_operand(s.operand);
    case SpecKind::RightOf: return "right of " + print_operand(s.operand);
    case SpecKind::AheadOf:
      return "ahead of " + print_operand(s.operand) + (s.value ? " by " + print_expr(*s.value) : "");
    case SpecKind::Behind:
      return "behind " + print_operand(s.operand) + (s.value ? " by " + print_expr(*s.value) : "");
    case SpecKind::InRegion: return "in " + s.name;
    case SpecKind::With: return "with " + s.name + " " + print_expr(*s.value);
  }
  return {};
}

}  // namespace

ScenarioAst parse_scenario(const std::vector<Token>& tokens, const TypeResolver& types) {
  return Parser(tokens, types).run();
}

ScenarioAst parse_scenario(std::string_view text, const TypeResolver& types) {
  return parse_scenario(tokenize(text), types);
}

std::string print_expr(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, expr::Num>) {
          return x.value < 0 ? "(-" + format_number(-x.value) + ")" : format_number(x.value);
        } else if constexpr (std::is_same_v<T, expr::Bool>) return x.value ? "True" : "False";
        else if constexpr (std::is_same_v<T, expr::Point>) return "(" + print_expr(*x.x) + " @ " + print_expr(*x.y) + ")";
        else if constexpr (std::is_same_v<T, expr::Range>) return "Range(" + print_expr(*x.lo) + ", " + print_expr(*x.hi) + ")";
        else if constexpr (std::is_same_v<T, expr::Uniform>) {
          std::string out = "Uniform(";
          for (std::size_t i = 0; i < x.options.size(); ++i) out += (i ? ", " : "") + print_expr(*x.options[i]);
          return out + ")";
        } else if constexpr (std::is_same_v<T, expr::Deg>) return "(" + print_expr(*x.inner) + " deg)";
        else if constexpr (std::is_same_v<T, expr::Binary>) {
          return "(" + print_expr(*x.lhs) + " " + std::string(op_text(x.op)) + " " + print_expr(*x.rhs) + ")";
        } else if constexpr (std::is_same_v<T, expr::Neg>) return "(-" + print_expr(*x.inner) + ")";
        else if constexpr (std::is_same_v<T, expr::Var>) return x.name;
        else if constexpr (std::is_same_v<T, expr::AttrRef>) return x.object + "." + std::string(to_string(x.attr));
        else if constexpr (std::is_same_v<T, expr::Region>) {
          return "RectangularRegion(" + print_expr(*x.center) + ", " + print_expr(*x.heading) + ", " +
                 print_expr(*x.width) + ", " + print_expr(*x.length) + ")";
        }
      },
      e.node);
}

std::string print_scenario(const ScenarioAst& ast) {
  std::ostringstream out;
  for (const auto& st : ast.statements) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, stmt::Assign>) {
            out << s.name << " = " << print_expr(*s.value);
          } else if constexpr (std::is_same_v<T, stmt::Instance>) {
            if (s.name) out << *s.name << " = ";
            out << s.type_name;
            for (std::size_t i = 0; i < s.specifiers.size(); ++i) {
              out << (i ? ", " : " ") << print_specifier(s.specifiers[i]);
            }
          } else if constexpr (std::is_same_v<T, stmt::Workspace>) {
            out << "workspace = Workspace(" << print_expr(*s.region) << ")";
          } else if constexpr (std::is_same_v<T, stmt::PropertySet>) {
            out << s.object << "." << s.property << " = " << print_expr(*s.value);
          } else if constexpr (std::is_same_v<T, stmt::CreateRoom>) {
            out << "create_room(" << print_expr(*s.length) << ", " << print_expr(*s.width)
                << ", x=" << print_expr(*s.x) << ", y=" << print_expr(*s.y) << ", sides='" << s.sides << "')";
          }
        },
        st.node);
    out << "\n";
  }
  return out.str();
}

}  // namespace scenegen::dsl
