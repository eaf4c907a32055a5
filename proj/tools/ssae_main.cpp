#include <iostream>
#include <string>
#include <vector>

#include "ssae/cli.hpp"

int main(int argc, char** argv) {
    return ssae::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
