#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lacuna/group.hpp"

namespace lacuna {

// gens(F5), ball(F2,2), sphere(F2,2), interval(N,0,16), powers2(10),
// elements(F2: a1, a2 a1^-1), or a path to a set JSON file.
FiniteSet parse_set_expression(const std::string& text, const Limits& limits = {});

// Returns the process exit status. Documents go to `out`, errors to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace lacuna
