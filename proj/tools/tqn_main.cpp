#include <iostream>

#include "tqn/cli.hpp"

int main(int argc, char** argv) {
    return tqn::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
