#ifndef SPOTTER_DOMAINS_H
#define SPOTTER_DOMAINS_H

#include <string>

namespace spotter::owpddl {

// Built-in copies of the files under domains/; the binaries do not depend
// on the working directory.
const std::string &builtin_domain_text();
const std::string &builtin_problem_text(int puzzle); // 1, 2 or 3

} // namespace spotter::owpddl

#endif
