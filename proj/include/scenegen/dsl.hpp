#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scenegen::dsl {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
  bool operator==(const SourcePos&) const = default;
};

enum class Tok {
  Ident,
  Number,
  String,
  Keyword,
  Eq,
  At,
  LParen,
  RParen,
  Comma,
  Plus,
  Minus,
  Star,
  Slash,
  Dot,
  Newline,
};

std::string_view to_string(Tok kind);

struct Token {
  Tok kind;
  std::string text;
  double number = 0;  // Number tokens only
  SourcePos pos;
};

/// Splits scenario text into tokens. `#` comments run to end of line; newlines
/// inside parentheses and blank lines produce no Newline token.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view word);

// ---------------------------------------------------------------------------
// AST

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { Add, Sub, Mul, Div };
enum class Attr { Position, Heading, Width, Length, Height, Z };

std::optional<Attr> attr_from_string(std::string_view name);
std::string_view to_string(Attr attr);

namespace expr {
struct Num { double value; };
struct Bool { bool value; };
struct Point { ExprPtr x, y; };                 // a @ b
struct Range { ExprPtr lo, hi; };
struct Uniform { std::vector<ExprPtr> options; };
struct Deg { ExprPtr inner; };
struct Binary { BinOp op; ExprPtr lhs, rhs; };
struct Neg { ExprPtr inner; };
struct Var { std::string name; };
struct AttrRef { std::string object; Attr attr; };
/// RectangularRegion(center, heading, width, length)
struct Region { ExprPtr center, heading, width, length; };
}  // namespace expr

struct Expr {
  using Node = std::variant<expr::Num, expr::Bool, expr::Point, expr::Range, expr::Uniform,
                            expr::Deg, expr::Binary, expr::Neg, expr::Var, expr::AttrRef,
                            expr::Region>;
  Node node;
  SourcePos pos;
};

/// Structural equality, ignoring source positions.
bool same(const ExprPtr& a, const ExprPtr& b);

/// Target of left of / right of / ahead of / behind: an object or a point.
struct Operand {
  std::optional<std::string> object;
  ExprPtr point;
};

enum class SpecKind { At, OffsetBy, Facing, LeftOf, RightOf, AheadOf, Behind, InRegion, With };

bool is_position_specifier(SpecKind kind);

struct Specifier {
  SpecKind kind;
  ExprPtr value;        // point (At, OffsetBy), heading (Facing), distance (AheadOf/Behind "by"), With value
  Operand operand;      // LeftOf, RightOf, AheadOf, Behind
  std::string name;     // InRegion region, With property
  SourcePos pos;
};

namespace stmt {
struct Assign { std::string name; ExprPtr value; };
struct Instance {
  std::optional<std::string> name;  // as written
  std::string internal_name;        // name, or a generated "Type#k" for anonymous objects
  std::string type_name;            // canonical registry type name
  std::vector<Specifier> specifiers;
};
struct Workspace { ExprPtr region; };
struct PropertySet { std::string object; std::string property; ExprPtr value; };
struct CreateRoom { ExprPtr length, width, x, y; std::string sides; };
}  // namespace stmt

struct Statement {
  using Node = std::variant<stmt::Assign, stmt::Instance, stmt::Workspace, stmt::PropertySet,
                            stmt::CreateRoom>;
  Node node;
  SourcePos pos;
};

struct ScenarioAst {
  std::vector<Statement> statements;
};

bool operator==(const ScenarioAst& a, const ScenarioAst& b);

/// Maps an identifier to a canonical model type name, or nullopt.
using TypeResolver = std::function<std::optional<std::string>(std::string_view)>;

TypeResolver exact_types(std::vector<std::string> names);

ScenarioAst parse_scenario(const std::vector<Token>& tokens, const TypeResolver& types);
ScenarioAst parse_scenario(std::string_view text, const TypeResolver& types);

/// Canonical source text; parse_scenario(print_scenario(ast)) == ast.
std::string print_scenario(const ScenarioAst& ast);
std::string print_expr(const Expr& e);

inline constexpr std::string_view kWallSides = "NSWE";
bool valid_sides(std::string_view sides);

}  // namespace scenegen::dsl
