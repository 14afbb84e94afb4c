#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/property_tree/ptree.hpp>

namespace scenegen::xml {

using Tree = boost::property_tree::ptree;

/// Parses an XML document; throws scenegen::Error (Usage) naming `what` and
/// the failing line on malformed input.
Tree parse(std::string_view text, std::string_view what, bool keep_comments = false);

std::string write(const Tree& tree);

std::optional<std::string> attr(const Tree& node, const std::string& name);
std::string trimmed_text(const Tree& node);

}  // namespace scenegen::xml
