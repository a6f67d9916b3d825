#pragma once

#include "catdiag/parser.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace catdiag::test {

inline std::string corpus_path(const std::string& name) { return std::string(CATDIAG_CORPUS_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Context corpus_context(const std::string& name) { return parse_context(slurp(corpus_path(name))); }

inline Term T(const Context& ctx, const std::string& text) { return parse_term(text, ctx); }

} // namespace catdiag::test
