#include <iostream>

#include "dsolkit/cli.hpp"

int main(int argc, char** argv) {
    return dsolkit::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
