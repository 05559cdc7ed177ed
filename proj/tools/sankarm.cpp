#include "sankarm/pipeline.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return sankarm::run_cli(argc, argv, std::cout, std::cerr);
}
