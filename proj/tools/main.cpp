#include <iostream>

#include "pulsefal/cli.hpp"

int main(int argc, char** argv) {
    return pulsefal::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
