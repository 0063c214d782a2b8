#include <iostream>
#include <string>
#include <vector>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
    return darboux::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
