#include <iostream>

#include <curvhom/cli.hpp>

int main(int argc, char** argv) {
    return curvhom::run_cli(argc, argv, std::cout, std::cerr);
}
