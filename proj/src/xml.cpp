#include "scenegen/xml.hpp"

#include <sstream>

#include <boost/property_tree/xml_parser.hpp>

#include "scenegen/error.hpp"

namespace scenegen::xml {

namespace pt = boost::property_tree;

Tree parse(std::string_view text, std::string_view what, bool keep_comments) {
  std::istringstream in{std::string(text)};
  Tree tree;
  int flags = pt::xml_parser::trim_whitespace;
  if (!keep_comments) flags |= pt::xml_parser::no_comments;
  try {
    pt::read_xml(in, tree, flags);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::Usage, "malformed XML in " + std::string(what) + " (line " +
                                      std::to_string(e.line()) + "): " + e.message());
  }
  return tree;
}

std::string write(const Tree& tree) {
  std::ostringstream out;
  pt::write_xml(out, tree, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

std::optional<std::string> attr(const Tree& node, const std::string& name) {
  if (auto v = node.get_optional<std::string>("<xmlattr>." + name)) return *v;
  return std::nullopt;
}

std::string trimmed_text(const Tree& node) {
  const std::string& s = node.data();
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace scenegen::xml
