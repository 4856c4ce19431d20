#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    cbc::cli::Options options;
#ifdef CBC_INJECT_FEASIBILITY_FAULT
    options.invert_engine_feasibility = true;
#endif
    return cbc::cli::run(args, std::cout, std::cerr, options);
}
