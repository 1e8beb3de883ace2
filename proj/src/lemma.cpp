#include "spinflip/lemma.hpp"

#include <stdexcept>
#include <string>

namespace spinflip {

std::string_view to_string(MiddleTerm middle) {
  switch (middle) {
    case MiddleTerm::tst: return "tst";
    case MiddleTerm::sts: return "sts";
    case MiddleTerm::symmetric: return "symmetric";
  }
  return "unknown";
}

MiddleTerm parse_middle_term(std::string_view name) {
  if (name == "tst") return MiddleTerm::tst;
  if (name == "sts") return MiddleTerm::sts;
  if (name == "symmetric") return MiddleTerm::symmetric;
  throw std::invalid_argument("unknown middle term: " + std::string(name));
}

}  // namespace spinflip
